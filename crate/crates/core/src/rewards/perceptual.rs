//! Perceptual distances for the consistency reward: a built-in SSIM-based
//! distance and an adapter for an external metric process.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

use thiserror::Error;

use crate::color::io::write_png16;
use crate::color::{rgb_to_lab, Chromaticity, Image};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("images differ in size: {a:?} vs {b:?}")]
    DimensionMismatch { a: (usize, usize), b: (usize, usize) },
    #[error("metric command failed: {0}")]
    Command(String),
    #[error("metric returned an invalid distance: {0:?}")]
    BadOutput(String),
}

/// A distance `d >= 0` between two images; 0 means perceptually identical.
pub trait PerceptualDistance {
    fn distance(&self, a: &Image, b: &Image) -> Result<f64, MetricError>;
}

impl<T: PerceptualDistance + ?Sized> PerceptualDistance for &T {
    fn distance(&self, a: &Image, b: &Image) -> Result<f64, MetricError> {
        (**self).distance(a, b)
    }
}

/// `1 - SSIM` on the L* channel (scaled to `[0, 1]`), with an 11×11 Gaussian
/// window (σ = 1.5) evaluated at every fully-inside position. Images smaller
/// than the window use a window as large as the image allows.
#[derive(Debug, Clone, Copy)]
pub struct StructuralDistance {
    pub window: usize,
    pub sigma: f64,
}

impl Default for StructuralDistance {
    fn default() -> Self {
        Self { window: 11, sigma: 1.5 }
    }
}

const SSIM_C1: f64 = 0.01 * 0.01;
const SSIM_C2: f64 = 0.03 * 0.03;

fn gaussian(size: usize, sigma: f64) -> Vec<f64> {
    let center = (size as f64 - 1.0) / 2.0;
    let w: Vec<f64> = (0..size).map(|i| (-(i as f64 - center).powi(2) / (2.0 * sigma * sigma)).exp()).collect();
    let sum: f64 = w.iter().sum();
    w.into_iter().map(|v| v / sum).collect()
}

/// Separable "valid" convolution.
fn filter(plane: &[f64], width: usize, height: usize, kx: &[f64], ky: &[f64]) -> (Vec<f64>, usize, usize) {
    let ow = width + 1 - kx.len();
    let oh = height + 1 - ky.len();
    let mut rows = vec![0.0; ow * height];
    for y in 0..height {
        let row = &plane[y * width..(y + 1) * width];
        for x in 0..ow {
            rows[y * ow + x] = kx.iter().zip(&row[x..]).map(|(k, v)| k * v).sum();
        }
    }
    let mut out = vec![0.0; ow * oh];
    for y in 0..oh {
        for x in 0..ow {
            out[y * ow + x] = ky.iter().enumerate().map(|(j, k)| k * rows[(y + j) * ow + x]).sum();
        }
    }
    (out, ow, oh)
}

/// Mean SSIM between two equally sized lightness planes with values in `[0, 1]`.
pub fn ssim_plane(a: &[f64], b: &[f64], width: usize, height: usize, window: usize, sigma: f64) -> f64 {
    let kx = gaussian(window.min(width).max(1), sigma);
    let ky = gaussian(window.min(height).max(1), sigma);
    let blur = |p: &[f64]| filter(p, width, height, &kx, &ky).0;
    let aa: Vec<f64> = a.iter().map(|v| v * v).collect();
    let bb: Vec<f64> = b.iter().map(|v| v * v).collect();
    let ab: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
    let (mu_a, mu_b) = (blur(a), blur(b));
    let (e_aa, e_bb, e_ab) = (blur(&aa), blur(&bb), blur(&ab));
    let n = mu_a.len();
    let mut total = 0.0;
    for i in 0..n {
        let (ma, mb) = (mu_a[i], mu_b[i]);
        let var_a = e_aa[i] - ma * ma;
        let var_b = e_bb[i] - mb * mb;
        let cov = e_ab[i] - ma * mb;
        total += ((2.0 * ma * mb + SSIM_C1) * (2.0 * cov + SSIM_C2))
            / ((ma * ma + mb * mb + SSIM_C1) * (var_a + var_b + SSIM_C2));
    }
    total / n as f64
}

impl PerceptualDistance for StructuralDistance {
    fn distance(&self, a: &Image, b: &Image) -> Result<f64, MetricError> {
        if !a.same_dimensions(b) {
            return Err(MetricError::DimensionMismatch { a: (a.width(), a.height()), b: (b.width(), b.height()) });
        }
        let plane =
            |img: &Image| -> Vec<f64> { rgb_to_lab(img, &Chromaticity::D65).lightness().map(|l| l / 100.0).collect() };
        let ssim = ssim_plane(&plane(a), &plane(b), a.width(), a.height(), self.window, self.sigma);
        Ok((1.0 - ssim).max(0.0))
    }
}

/// Out-of-process metric. The command runs under `sh -c`, receives two
/// absolute image paths on stdin (one per line) and must print one decimal
/// distance `d >= 0` on stdout. A nonzero exit, a spawn failure, or anything
/// unparseable is a [`MetricError`].
#[derive(Debug, Clone)]
pub struct ExternalMetric {
    command: String,
}

impl ExternalMetric {
    pub fn new(command: impl Into<String>) -> Self {
        Self { command: command.into() }
    }

    pub fn command(&self) -> &str {
        &self.command
    }

    /// Query the metric for two images already on disk.
    pub fn distance_paths(&self, a: &Path, b: &Path) -> Result<f64, MetricError> {
        let absolute = |p: &Path| -> Result<PathBuf, MetricError> {
            std::path::absolute(p).map_err(|e| MetricError::Command(format!("{}: {e}", p.display())))
        };
        let (a, b) = (absolute(a)?, absolute(b)?);
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(&self.command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| MetricError::Command(format!("spawn {:?}: {e}", self.command)))?;
        if let Some(mut stdin) = child.stdin.take() {
            // a metric that ignores its input may close the pipe early
            let _ = writeln!(stdin, "{}\n{}", a.display(), b.display());
        }
        let output = child.wait_with_output().map_err(|e| MetricError::Command(e.to_string()))?;
        if !output.status.success() {
            return Err(MetricError::Command(format!(
                "{:?} exited with {}: {}",
                self.command,
                output.status,
                String::from_utf8_lossy(&output.stderr).trim()
            )));
        }
        let text = String::from_utf8_lossy(&output.stdout);
        match text.trim().parse::<f64>() {
            Ok(d) if d.is_finite() && d >= 0.0 => Ok(d),
            _ => Err(MetricError::BadOutput(text.trim().to_owned())),
        }
    }
}

impl PerceptualDistance for ExternalMetric {
    fn distance(&self, a: &Image, b: &Image) -> Result<f64, MetricError> {
        let dir = tempfile::tempdir().map_err(|e| MetricError::Command(e.to_string()))?;
        let (pa, pb) = (dir.path().join("edited.png"), dir.path().join("reference.png"));
        for (path, img) in [(&pa, a), (&pb, b)] {
            write_png16(path, img).map_err(|e| MetricError::Command(e.to_string()))?;
        }
        self.distance_paths(&pa, &pb)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn textured(seed: u64) -> Image {
        Image::from_fn(24, 20, |x, y| {
            let v = ((x as u64 * 31 + y as u64 * 17 + seed * 7) % 23) as f64 / 23.0;
            [v, 0.5 * v + 0.2, 0.4]
        })
    }

    #[test]
    fn identical_images_have_zero_distance() {
        let img = textured(1);
        assert_eq!(StructuralDistance::default().distance(&img, &img).unwrap(), 0.0);
        let tiny = Image::filled(3, 2, [0.3, 0.6, 0.9]);
        assert_eq!(StructuralDistance::default().distance(&tiny, &tiny).unwrap(), 0.0);
    }

    #[test]
    fn distance_grows_with_corruption() {
        let a = textured(1);
        let b = a.map_pixels(|p| p.map(|v| 0.9 * v + 0.05));
        let c = textured(5);
        let m = StructuralDistance::default();
        let (db, dc) = (m.distance(&a, &b).unwrap(), m.distance(&a, &c).unwrap());
        assert!(db > 0.0 && db < dc, "{db} {dc}");
    }

    #[test]
    fn ssim_matches_hand_computed_constant_planes() {
        // constant planes: SSIM = (2ab + C1) / (a^2 + b^2 + C1), variances vanish
        let (a, b) = (vec![0.4; 16], vec![0.6; 16]);
        let expected = (2.0 * 0.4 * 0.6 + SSIM_C1) / (0.16 + 0.36 + SSIM_C1);
        assert!((ssim_plane(&a, &b, 4, 4, 11, 1.5) - expected).abs() < 1e-12);
    }

    #[test]
    fn size_mismatch_is_an_error() {
        let m = StructuralDistance::default();
        assert!(matches!(
            m.distance(&Image::filled(2, 2, [0.5; 3]), &Image::filled(3, 2, [0.5; 3])),
            Err(MetricError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn external_metric_reads_paths_and_distance() {
        let img = textured(2);
        // prints 0.25 after checking it received two absolute, existing paths
        let stub = ExternalMetric::new(
            r#"read a; read b; case "$a" in /*) ;; *) exit 3;; esac; test -f "$a" && test -f "$b" && echo 0.25"#,
        );
        assert_eq!(stub.distance(&img, &img).unwrap(), 0.25);
    }

    #[test]
    fn external_metric_failures() {
        let img = textured(2);
        assert!(matches!(ExternalMetric::new("exit 7").distance(&img, &img), Err(MetricError::Command(_))));
        assert!(matches!(ExternalMetric::new("echo banana").distance(&img, &img), Err(MetricError::BadOutput(_))));
        assert!(matches!(ExternalMetric::new("echo -1").distance(&img, &img), Err(MetricError::BadOutput(_))));
    }
}
