//! Global retouching operators: exposure, contrast, saturation and color
//! temperature, plus their canonical composition.
//!
//! Exposure works on linear light. Contrast and saturation work in
//! L*a*b* (D65). Color temperature re-estimates the scene white with the
//! gray-world assumption and adapts it along the Planckian locus with a
//! Bradford transform.

mod magnitude;

pub use magnitude::{LevelSet, MagnitudeError, MagnitudeTable, MagnitudeWord, RatioLevels};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attributes::AttributeKind;
use crate::color::{
    self, bradford_adaptation_rgb, chromaticity_to_cct, estimate_white_chromaticity, lab_to_rgb, linear_to_srgb,
    mat_vec, planckian_chromaticity, rgb_to_lab, srgb_to_linear, Chromaticity, ColorError, Image,
};

pub const MAX_ABS_EXPOSURE_EV: f64 = 4.0;
pub const MAX_CONTRAST_SCALE: f64 = 4.0;
pub const MAX_SATURATION_SCALE: f64 = 4.0;
pub const MAX_ABS_CCT_SHIFT_MIRED: f64 = 200.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RetouchError {
    #[error("{name} = {value} is out of range {range}")]
    ParamOutOfRange { name: &'static str, value: f64, range: &'static str },
    #[error(transparent)]
    Color(#[from] ColorError),
}

fn check(name: &'static str, value: f64, ok: bool, range: &'static str) -> Result<(), RetouchError> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(RetouchError::ParamOutOfRange { name, value, range })
    }
}

fn check_exposure(ev: f64) -> Result<(), RetouchError> {
    check("exposure_ev", ev, ev.abs() <= MAX_ABS_EXPOSURE_EV, "[-4, 4]")
}

fn check_contrast(scale: f64) -> Result<(), RetouchError> {
    check("contrast_scale", scale, scale > 0.0 && scale <= MAX_CONTRAST_SCALE, "(0, 4]")
}

fn check_saturation(scale: f64) -> Result<(), RetouchError> {
    check("saturation_scale", scale, (0.0..=MAX_SATURATION_SCALE).contains(&scale), "[0, 4]")
}

fn check_cct(shift: f64) -> Result<(), RetouchError> {
    check("cct_shift_mired", shift, shift.abs() <= MAX_ABS_CCT_SHIFT_MIRED, "[-200, 200]")
}

/// One global edit: the four operator parameters. `(0, 1, 1, 0)` is the identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct RetouchParams {
    exposure_ev: f64,
    contrast_scale: f64,
    saturation_scale: f64,
    cct_shift_mired: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    exposure_ev: f64,
    contrast_scale: f64,
    saturation_scale: f64,
    cct_shift_mired: f64,
}

impl TryFrom<RawParams> for RetouchParams {
    type Error = RetouchError;

    fn try_from(raw: RawParams) -> Result<Self, Self::Error> {
        RetouchParams::new(raw.exposure_ev, raw.contrast_scale, raw.saturation_scale, raw.cct_shift_mired)
    }
}

impl From<RetouchParams> for RawParams {
    fn from(p: RetouchParams) -> Self {
        RawParams {
            exposure_ev: p.exposure_ev,
            contrast_scale: p.contrast_scale,
            saturation_scale: p.saturation_scale,
            cct_shift_mired: p.cct_shift_mired,
        }
    }
}

impl Default for RetouchParams {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl RetouchParams {
    pub const IDENTITY: RetouchParams =
        RetouchParams { exposure_ev: 0.0, contrast_scale: 1.0, saturation_scale: 1.0, cct_shift_mired: 0.0 };

    pub fn new(
        exposure_ev: f64,
        contrast_scale: f64,
        saturation_scale: f64,
        cct_shift_mired: f64,
    ) -> Result<Self, RetouchError> {
        check_exposure(exposure_ev)?;
        check_contrast(contrast_scale)?;
        check_saturation(saturation_scale)?;
        check_cct(cct_shift_mired)?;
        Ok(Self { exposure_ev, contrast_scale, saturation_scale, cct_shift_mired })
    }

    pub fn exposure_ev(&self) -> f64 {
        self.exposure_ev
    }

    pub fn contrast_scale(&self) -> f64 {
        self.contrast_scale
    }

    pub fn saturation_scale(&self) -> f64 {
        self.saturation_scale
    }

    pub fn cct_shift_mired(&self) -> f64 {
        self.cct_shift_mired
    }

    /// Parameter of one attribute in its native unit.
    pub fn get(&self, kind: AttributeKind) -> f64 {
        match kind {
            AttributeKind::Exposure => self.exposure_ev,
            AttributeKind::Contrast => self.contrast_scale,
            AttributeKind::Saturation => self.saturation_scale,
            AttributeKind::Cct => self.cct_shift_mired,
        }
    }

    /// Copy with one attribute replaced (validated).
    pub fn with(mut self, kind: AttributeKind, value: f64) -> Result<Self, RetouchError> {
        match kind {
            AttributeKind::Exposure => {
                check_exposure(value)?;
                self.exposure_ev = value;
            }
            AttributeKind::Contrast => {
                check_contrast(value)?;
                self.contrast_scale = value;
            }
            AttributeKind::Saturation => {
                check_saturation(value)?;
                self.saturation_scale = value;
            }
            AttributeKind::Cct => {
                check_cct(value)?;
                self.cct_shift_mired = value;
            }
        }
        Ok(self)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    /// True when the given attribute's parameter is its identity value.
    pub fn is_identity_for(&self, kind: AttributeKind) -> bool {
        self.get(kind) == Self::IDENTITY.get(kind)
    }

    /// `(-ev, 1/contrast, 1/saturation, -mired)`. Fails for a zero saturation
    /// scale or when a reciprocal leaves the valid range.
    pub fn inverse(&self) -> Result<Self, RetouchError> {
        let recip = |v: f64| if v == 1.0 { 1.0 } else { 1.0 / v };
        Self::new(-self.exposure_ev, recip(self.contrast_scale), recip(self.saturation_scale), -self.cct_shift_mired)
    }
}

/// Multiply linear light by `2^ev`.
pub fn apply_exposure(img: &Image, ev: f64) -> Result<Image, RetouchError> {
    check_exposure(ev)?;
    if ev == 0.0 {
        return Ok(img.clone());
    }
    let gain = ev.exp2();
    Ok(img.map_pixels(|p| p.map(|c| linear_to_srgb(srgb_to_linear(c) * gain))))
}

/// Scale L* about the pivot 50; a* and b* are untouched.
pub fn apply_contrast(img: &Image, scale: f64) -> Result<Image, RetouchError> {
    check_contrast(scale)?;
    if scale == 1.0 {
        return Ok(img.clone());
    }
    let d65 = Chromaticity::D65;
    let lab = rgb_to_lab(img, &d65).map_pixels(|[l, a, b]| [(50.0 + scale * (l - 50.0)).clamp(0.0, 100.0), a, b]);
    Ok(lab_to_rgb(&lab, &d65))
}

/// Scale Lab chroma: `(a*, b*) <- scale * (a*, b*)`.
pub fn apply_saturation(img: &Image, scale: f64) -> Result<Image, RetouchError> {
    check_saturation(scale)?;
    if scale == 1.0 {
        return Ok(img.clone());
    }
    let d65 = Chromaticity::D65;
    let lab = rgb_to_lab(img, &d65).map_pixels(|[l, a, b]| [l, scale * a, scale * b]);
    Ok(lab_to_rgb(&lab, &d65))
}

/// Target white for a mired shift.
///
/// The white moves along the displacement of the Planckian locus between the
/// source and target temperatures, which keeps the tint (offset from the
/// locus) intact. The step length along that direction is then refined with
/// a secant search so that the McCamy estimate of the result differs from the
/// source by exactly `shift_mired`.
pub fn shifted_white(source: &Chromaticity, shift_mired: f64) -> Result<Chromaticity, RetouchError> {
    let source_kelvin = chromaticity_to_cct(source)?;
    let target_mired = 1e6 / source_kelvin + shift_mired;
    let target_kelvin = 1e6 / target_mired;
    if target_mired.is_nan()
        || target_mired <= 0.0
        || !(color::MIN_CCT_KELVIN..=color::MAX_CCT_KELVIN).contains(&target_kelvin)
    {
        return Err(ColorError::CctOutOfRange {
            kelvin: if target_mired > 0.0 { target_kelvin } else { f64::INFINITY },
        }
        .into());
    }
    let from = planckian_chromaticity(source_kelvin)?;
    let to = planckian_chromaticity(target_kelvin)?;
    let (dx, dy) = (to.x() - from.x(), to.y() - from.y());
    let at = |s: f64| Chromaticity::new(source.x() + s * dx, source.y() + s * dy);
    let residual = |s: f64| -> Result<f64, ColorError> { Ok(1e6 / chromaticity_to_cct(&at(s)?)? - target_mired) };

    let (mut s0, mut s1) = (0.0, 1.0);
    let (mut r0, mut r1) = (-shift_mired, residual(s1)?);
    for _ in 0..20 {
        if r1.abs() < 1e-9 || r1 == r0 {
            break;
        }
        let s2 = s1 - r1 * (s1 - s0) / (r1 - r0);
        (s0, r0) = (s1, r1);
        s1 = s2;
        r1 = residual(s1)?;
    }
    Ok(at(s1)?)
}

/// Shift white balance by `shift_mired` (positive = warmer).
pub fn apply_cct_shift(img: &Image, shift_mired: f64) -> Result<Image, RetouchError> {
    check_cct(shift_mired)?;
    if shift_mired == 0.0 {
        return Ok(img.clone());
    }
    let source = estimate_white_chromaticity(img)?;
    let target = shifted_white(&source, shift_mired)?;
    let m = bradford_adaptation_rgb(&source, &target);
    Ok(img.map_pixels(|p| mat_vec(&m, p.map(srgb_to_linear)).map(linear_to_srgb)))
}

fn apply_one(img: &Image, kind: AttributeKind, params: &RetouchParams) -> Result<Image, RetouchError> {
    let v = params.get(kind);
    match kind {
        AttributeKind::Exposure => apply_exposure(img, v),
        AttributeKind::Contrast => apply_contrast(img, v),
        AttributeKind::Saturation => apply_saturation(img, v),
        AttributeKind::Cct => apply_cct_shift(img, v),
    }
}

/// Apply all four operators in canonical order: exposure, contrast,
/// saturation, color temperature. Identity steps are skipped, so a stack with
/// a single active parameter is bit-identical to that operator alone.
pub fn apply_stack(img: &Image, params: &RetouchParams) -> Result<Image, RetouchError> {
    let mut out = img.clone();
    for kind in AttributeKind::ALL {
        if !params.is_identity_for(kind) {
            out = apply_one(&out, kind, params)?;
        }
    }
    Ok(out)
}

/// Apply the operators in reverse canonical order (color temperature first).
/// `apply_stack(apply_stack_reversed(x, p), p.inverse())` undoes each step in
/// turn, up to gamut clipping and white re-estimation.
pub fn apply_stack_reversed(img: &Image, params: &RetouchParams) -> Result<Image, RetouchError> {
    let mut out = img.clone();
    for kind in AttributeKind::ALL.into_iter().rev() {
        if !params.is_identity_for(kind) {
            out = apply_one(&out, kind, params)?;
        }
    }
    Ok(out)
}
