//! Global photometric attributes and their signed deltas.
//!
//! Exposure is defined on the L* channel. Contrast, saturation and color
//! temperature are toolkit constructions:
//! - contrast: population standard deviation of L*/100
//! - saturation: mean Lab chroma / 100, clamped to `[0, 1]`
//! - color temperature: gray-world white, McCamy CCT, expressed in mireds

use std::fmt;
use std::ops::{Index, Neg};

use serde::{Deserialize, Serialize};

use crate::color::{
    chromaticity_to_cct, estimate_white_chromaticity, rgb_to_lab, Chromaticity, Image, MAX_CCT_KELVIN, MIN_CCT_KELVIN,
};

/// The K = 4 measured attributes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttributeKind {
    Exposure,
    Contrast,
    Saturation,
    Cct,
}

impl AttributeKind {
    /// Canonical order, also the operator composition order.
    pub const ALL: [AttributeKind; 4] = [Self::Exposure, Self::Contrast, Self::Saturation, Self::Cct];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Exposure => "exposure",
            Self::Contrast => "contrast",
            Self::Saturation => "saturation",
            Self::Cct => "cct",
        }
    }
}

impl fmt::Display for AttributeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub const MIN_CCT_MIRED: f64 = 1e6 / MAX_CCT_KELVIN;
pub const MAX_CCT_MIRED: f64 = 1e6 / MIN_CCT_KELVIN;

fn d65_mired() -> f64 {
    1e6 / chromaticity_to_cct(&Chromaticity::D65).expect("D65 lies on the locus")
}

/// Attribute values of one image.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttributeVector {
    pub exposure: f64,
    pub contrast: f64,
    pub saturation: f64,
    pub cct_mired: f64,
    /// Set when the white estimate failed and `cct_mired` holds the D65 fallback.
    #[serde(default)]
    pub cct_fallback: bool,
}

impl AttributeVector {
    pub fn get(&self, kind: AttributeKind) -> f64 {
        match kind {
            AttributeKind::Exposure => self.exposure,
            AttributeKind::Contrast => self.contrast,
            AttributeKind::Saturation => self.saturation,
            AttributeKind::Cct => self.cct_mired,
        }
    }
}

/// Measure the four attributes of `img`.
pub fn measure_attributes(img: &Image) -> AttributeVector {
    let lab = rgb_to_lab(img, &Chromaticity::D65);
    let n = img.pixel_count() as f64;

    let mean_l = lab.lightness().sum::<f64>() / n;
    let var_l = lab.lightness().map(|l| (l - mean_l).powi(2)).sum::<f64>() / n;
    let chroma = lab.pixels().map(|[_, a, b]| a.hypot(b)).sum::<f64>() / n;

    let (cct_mired, cct_fallback) = match estimate_white_chromaticity(img).and_then(|c| chromaticity_to_cct(&c)) {
        Ok(kelvin) => ((1e6 / kelvin).clamp(MIN_CCT_MIRED, MAX_CCT_MIRED), false),
        Err(_) => (d65_mired(), true),
    };

    AttributeVector {
        exposure: (mean_l / 100.0).clamp(0.0, 1.0),
        contrast: (var_l.sqrt() / 100.0).clamp(0.0, 0.5),
        saturation: (chroma / 100.0).clamp(0.0, 1.0),
        cct_mired,
        cct_fallback,
    }
}

/// Signed per-attribute differences, same units as [`AttributeVector`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AttributeDelta {
    pub exposure: f64,
    pub contrast: f64,
    pub saturation: f64,
    pub cct_mired: f64,
}

impl AttributeDelta {
    pub fn between(a: &AttributeVector, b: &AttributeVector) -> Self {
        Self {
            exposure: a.exposure - b.exposure,
            contrast: a.contrast - b.contrast,
            saturation: a.saturation - b.saturation,
            cct_mired: a.cct_mired - b.cct_mired,
        }
    }

    pub fn get(&self, kind: AttributeKind) -> f64 {
        match kind {
            AttributeKind::Exposure => self.exposure,
            AttributeKind::Contrast => self.contrast,
            AttributeKind::Saturation => self.saturation,
            AttributeKind::Cct => self.cct_mired,
        }
    }

    pub fn is_zero(&self) -> bool {
        AttributeKind::ALL.iter().all(|k| self.get(*k) == 0.0)
    }
}

impl Index<AttributeKind> for AttributeDelta {
    type Output = f64;

    fn index(&self, kind: AttributeKind) -> &f64 {
        match kind {
            AttributeKind::Exposure => &self.exposure,
            AttributeKind::Contrast => &self.contrast,
            AttributeKind::Saturation => &self.saturation,
            AttributeKind::Cct => &self.cct_mired,
        }
    }
}

impl Neg for AttributeDelta {
    type Output = Self;

    fn neg(self) -> Self {
        Self {
            exposure: -self.exposure,
            contrast: -self.contrast,
            saturation: -self.saturation,
            cct_mired: -self.cct_mired,
        }
    }
}

/// `measure_attributes(a) - measure_attributes(b)`. Pass `(edited, input)` or
/// `(ground_truth, input)` to get the usual Δa.
pub fn attribute_delta(a: &Image, b: &Image) -> AttributeDelta {
    AttributeDelta::between(&measure_attributes(a), &measure_attributes(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::color::lab_pixel_to_srgb;
    use crate::retouch::apply_exposure;

    fn gray_l(l: f64) -> [f64; 3] {
        lab_pixel_to_srgb([l, 0.0, 0.0], &Chromaticity::D65)
    }

    #[test]
    fn uniform_white() {
        let a = measure_attributes(&Image::filled(4, 4, [1.0; 3]));
        assert!((a.exposure - 1.0).abs() < 1e-9);
        assert!(a.contrast.abs() < 1e-9);
        assert!(a.saturation < 1e-5);
        assert!(!a.cct_fallback);
        assert!((a.cct_mired - 153.7).abs() < 0.5);
    }

    #[test]
    fn uniform_mid_gray() {
        let a = measure_attributes(&Image::filled(4, 4, gray_l(50.0)));
        assert!((a.exposure - 0.5).abs() < 1e-5);
        assert!(a.contrast.abs() < 1e-9);
    }

    #[test]
    fn two_tone_population_std() {
        // population std of {0.3, 0.7} is 0.2
        let img = Image::from_fn(4, 4, |x, _| gray_l(if x % 2 == 0 { 30.0 } else { 70.0 }));
        let a = measure_attributes(&img);
        assert!((a.exposure - 0.5).abs() < 1e-5);
        assert!((a.contrast - 0.2).abs() < 1e-5);
    }

    #[test]
    fn black_image_falls_back_to_d65() {
        let a = measure_attributes(&Image::filled(2, 2, [0.0; 3]));
        assert!(a.cct_fallback);
        assert!((a.cct_mired - d65_mired()).abs() < 1e-12);
        assert_eq!(a.exposure, 0.0);
    }

    #[test]
    fn delta_properties() {
        let x = Image::from_fn(5, 5, |i, j| [0.2 + 0.1 * i as f64, 0.3, 0.1 + 0.15 * j as f64]);
        assert!(attribute_delta(&x, &x).is_zero());
        let xe = apply_exposure(&x, 0.7).unwrap();
        let d = attribute_delta(&xe, &x);
        assert!(d.exposure > 0.0);
        assert_eq!(attribute_delta(&x, &xe), -d);
        assert_eq!(d[AttributeKind::Exposure], d.exposure);
    }
}
