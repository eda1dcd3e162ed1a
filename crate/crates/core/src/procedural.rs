//! Seeded synthetic photographs: smooth multi-octave value noise over a
//! random base color, with mid-tone luminance and moderate chroma. Useful as
//! stand-in ground truths for tests, benchmarks and demos.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::color::Image;

struct ValueNoise {
    cells: usize,
    grid: Vec<f64>,
}

impl ValueNoise {
    fn new(cells: usize, rng: &mut ChaCha8Rng) -> Self {
        let grid = (0..(cells + 1) * (cells + 1)).map(|_| rng.random_range(-1.0..1.0)).collect();
        Self { cells, grid }
    }

    /// `u, v` in `[0, 1]`.
    fn sample(&self, u: f64, v: f64) -> f64 {
        let (fx, fy) = (u * self.cells as f64, v * self.cells as f64);
        let (x0, y0) = ((fx.floor() as usize).min(self.cells - 1), (fy.floor() as usize).min(self.cells - 1));
        let smooth = |t: f64| t * t * (3.0 - 2.0 * t);
        let (tx, ty) = (smooth(fx - x0 as f64), smooth(fy - y0 as f64));
        let at = |x: usize, y: usize| self.grid[y * (self.cells + 1) + x];
        let top = at(x0, y0) * (1.0 - tx) + at(x0 + 1, y0) * tx;
        let bottom = at(x0, y0 + 1) * (1.0 - tx) + at(x0 + 1, y0 + 1) * tx;
        top * (1.0 - ty) + bottom * ty
    }
}

fn octaves(rng: &mut ChaCha8Rng) -> Vec<(ValueNoise, f64)> {
    [(2, 0.55), (5, 0.3), (13, 0.15)].into_iter().map(|(cells, weight)| (ValueNoise::new(cells, rng), weight)).collect()
}

fn fractal(layers: &[(ValueNoise, f64)], u: f64, v: f64) -> f64 {
    layers.iter().map(|(n, w)| w * n.sample(u, v)).sum()
}

/// A `width × height` image determined entirely by `seed`.
pub fn natural_image(seed: u64, width: usize, height: usize) -> Image {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base_level = rng.random_range(0.3..0.55);
    let tint: [f64; 3] = std::array::from_fn(|_| rng.random_range(-0.08..0.08));
    let luminance_amp = rng.random_range(0.12..0.22);
    let chroma_amp = rng.random_range(0.03..0.08);
    let luma = octaves(&mut rng);
    let chroma: [Vec<(ValueNoise, f64)>; 2] = [octaves(&mut rng), octaves(&mut rng)];
    Image::from_fn(width, height, |x, y| {
        let u = x as f64 / (width.max(2) - 1) as f64;
        let v = y as f64 / (height.max(2) - 1) as f64;
        let l = base_level + luminance_amp * fractal(&luma, u, v);
        let (ca, cb) = (chroma_amp * fractal(&chroma[0], u, v), chroma_amp * fractal(&chroma[1], u, v));
        [l + tint[0] + ca, l + tint[1] - 0.5 * ca + 0.5 * cb, l + tint[2] - cb]
    })
}
