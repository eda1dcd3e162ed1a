use super::{clamp_unit, ColorError};

/// Row-major RGB raster in nonlinear sRGB, every channel in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    data: Vec<f32>,
}

impl Image {
    /// Build from interleaved RGB samples. Values are clamped to `[0, 1]`
    /// (NaN becomes 0).
    pub fn new(width: usize, height: usize, mut data: Vec<f32>) -> Result<Self, ColorError> {
        if width == 0 || height == 0 {
            return Err(ColorError::InvalidImage(format!("dimensions must be at least 1x1, got {width}x{height}")));
        }
        if data.len() != width * height * 3 {
            return Err(ColorError::InvalidImage(format!(
                "expected {} samples for {width}x{height}, got {}",
                width * height * 3,
                data.len()
            )));
        }
        for v in &mut data {
            *v = clamp_unit(*v as f64) as f32;
        }
        Ok(Self { width, height, data })
    }

    /// Uniform image of one color.
    ///
    /// # Panics
    /// If either dimension is zero.
    pub fn filled(width: usize, height: usize, rgb: [f64; 3]) -> Self {
        Self::from_fn(width, height, |_, _| rgb)
    }

    /// # Panics
    /// If either dimension is zero.
    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> [f64; 3]) -> Self {
        let pixels = (0..height).flat_map(|y| (0..width).map(move |x| (x, y)));
        Self::from_pixels(width, height, pixels.map(|(x, y)| f(x, y)))
    }

    pub(crate) fn from_pixels(width: usize, height: usize, pixels: impl Iterator<Item = [f64; 3]>) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be nonzero");
        let mut data = Vec::with_capacity(width * height * 3);
        for p in pixels {
            data.extend(p.map(|v| clamp_unit(v) as f32));
        }
        assert_eq!(data.len(), width * height * 3);
        Self { width, height, data }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    /// Interleaved RGB samples.
    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn pixel(&self, x: usize, y: usize) -> [f64; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i] as f64, self.data[i + 1] as f64, self.data[i + 2] as f64]
    }

    pub fn pixels(&self) -> impl Iterator<Item = [f64; 3]> + '_ {
        self.data.chunks_exact(3).map(|p| [p[0] as f64, p[1] as f64, p[2] as f64])
    }

    /// Apply `f` to every pixel and re-clamp.
    pub fn map_pixels(&self, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        Self::from_pixels(self.width, self.height, self.pixels().map(f))
    }

    pub fn same_dimensions(&self, other: &Image) -> bool {
        self.width == other.width && self.height == other.height
    }

    /// Largest absolute per-channel difference. Images must share dimensions.
    pub fn max_abs_diff(&self, other: &Image) -> f64 {
        assert!(self.same_dimensions(other), "dimension mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| (*a as f64 - *b as f64).abs()).fold(0.0, f64::max)
    }

    /// Mean absolute per-channel difference. Images must share dimensions.
    pub fn mean_abs_diff(&self, other: &Image) -> f64 {
        assert!(self.same_dimensions(other), "dimension mismatch");
        let sum: f64 = self.data.iter().zip(&other.data).map(|(a, b)| (*a as f64 - *b as f64).abs()).sum();
        sum / self.data.len() as f64
    }

    /// Fraction of pixels with at least one channel at 0 or 1.
    pub fn clipped_fraction(&self) -> f64 {
        let clipped = self.data.chunks_exact(3).filter(|p| p.iter().any(|&c| c <= 0.0 || c >= 1.0)).count();
        clipped as f64 / self.pixel_count() as f64
    }
}

/// Per-pixel (L*, a*, b*) raster. Only produced from an [`Image`].
#[derive(Debug, Clone, PartialEq)]
pub struct LabImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl LabImage {
    pub(crate) fn from_raw(width: usize, height: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), width * height * 3);
        Self { width, height, data }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> impl Iterator<Item = [f64; 3]> + '_ {
        self.data.chunks_exact(3).map(|p| [p[0], p[1], p[2]])
    }

    /// Lightness channel, row-major.
    pub fn lightness(&self) -> impl Iterator<Item = f64> + '_ {
        self.data.iter().step_by(3).copied()
    }

    /// Apply `f` to every (L*, a*, b*) triple.
    pub fn map_pixels(&self, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        let data = self.pixels().flat_map(f).collect();
        Self::from_raw(self.width, self.height, data)
    }
}
