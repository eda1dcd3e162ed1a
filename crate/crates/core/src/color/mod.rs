//! Color-space plumbing: the [`Image`] raster, sRGB transfer functions,
//! CIE L*a*b*, chromaticity and correlated color temperature.
//!
//! All arithmetic runs in `f64`; images store `f32` channels in nonlinear
//! sRGB, clamped to `[0, 1]` whenever they are written.

mod image;
pub mod io;

pub use self::image::{Image, LabImage};

use std::sync::LazyLock;

use thiserror::Error;

/// Lowest CCT, in kelvin, accepted anywhere in the toolkit.
pub const MIN_CCT_KELVIN: f64 = 1500.0;
/// Highest CCT, in kelvin, accepted anywhere in the toolkit.
pub const MAX_CCT_KELVIN: f64 = 40000.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ColorError {
    #[error("image is (nearly) black: mean luminance {mean_luminance:e} < 1e-6")]
    AllBlackImage { mean_luminance: f64 },
    #[error("chromaticity ({x:.4}, {y:.4}) is outside the CCT estimator's validity region")]
    OutOfLocus { x: f64, y: f64 },
    #[error("correlated color temperature {kelvin:.1} K is outside [1500, 40000] K")]
    CctOutOfRange { kelvin: f64 },
    #[error("invalid chromaticity ({x}, {y}): need x > 0, y > 0, x + y < 1")]
    InvalidChromaticity { x: f64, y: f64 },
    #[error("invalid image: {0}")]
    InvalidImage(String),
}

/// CIE 1931 (x, y) chromaticity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chromaticity {
    x: f64,
    y: f64,
}

impl Chromaticity {
    /// CIE standard illuminant D65, the sRGB reference white.
    pub const D65: Chromaticity = Chromaticity { x: 0.3127, y: 0.3290 };
    /// CIE standard illuminant A (incandescent).
    pub const ILLUMINANT_A: Chromaticity = Chromaticity { x: 0.4476, y: 0.4074 };

    pub fn new(x: f64, y: f64) -> Result<Self, ColorError> {
        if x.is_finite() && y.is_finite() && x > 0.0 && y > 0.0 && x + y < 1.0 {
            Ok(Self { x, y })
        } else {
            Err(ColorError::InvalidChromaticity { x, y })
        }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    /// Tristimulus values of this chromaticity scaled to `Y = 1`.
    pub fn to_xyz(&self) -> [f64; 3] {
        [self.x / self.y, 1.0, (1.0 - self.x - self.y) / self.y]
    }

    fn from_xyz(xyz: [f64; 3]) -> Result<Self, ColorError> {
        let sum = xyz[0] + xyz[1] + xyz[2];
        Self::new(xyz[0] / sum, xyz[1] / sum)
    }
}

impl Default for Chromaticity {
    fn default() -> Self {
        Self::D65
    }
}

pub(crate) type Mat3 = [[f64; 3]; 3];

pub(crate) fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub(crate) fn mat_vec(m: &Mat3, v: [f64; 3]) -> [f64; 3] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

pub(crate) fn mat_inverse(m: &Mat3) -> Mat3 {
    let c = |r: usize, s: usize| m[r % 3][s % 3];
    let mut adj = [[0.0; 3]; 3];
    for (i, row) in adj.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            // cofactor of (j, i) gives the transposed adjugate directly
            *cell = c(j + 1, i + 1) * c(j + 2, i + 2) - c(j + 1, i + 2) * c(j + 2, i + 1);
        }
    }
    let det: f64 = (0..3).map(|k| m[0][k] * adj[k][0]).sum();
    adj.map(|row| row.map(|v| v / det))
}

fn diag(v: [f64; 3]) -> Mat3 {
    [[v[0], 0.0, 0.0], [0.0, v[1], 0.0], [0.0, 0.0, v[2]]]
}

/// Linear sRGB → XYZ, built from the Rec. 709 primaries and the D65 white so
/// that RGB (1, 1, 1) lands exactly on `Chromaticity::D65.to_xyz()`.
static RGB_TO_XYZ: LazyLock<Mat3> = LazyLock::new(|| {
    let primaries = [[0.64, 0.33], [0.30, 0.60], [0.15, 0.06]];
    let cols: Vec<[f64; 3]> = primaries.iter().map(|&[x, y]| [x / y, 1.0, (1.0 - x - y) / y]).collect();
    let p: Mat3 = [
        [cols[0][0], cols[1][0], cols[2][0]],
        [cols[0][1], cols[1][1], cols[2][1]],
        [cols[0][2], cols[1][2], cols[2][2]],
    ];
    let s = mat_vec(&mat_inverse(&p), Chromaticity::D65.to_xyz());
    mat_mul(&p, &diag(s))
});

static XYZ_TO_RGB: LazyLock<Mat3> = LazyLock::new(|| mat_inverse(&RGB_TO_XYZ));

const BRADFORD: Mat3 = [[0.8951, 0.2664, -0.1614], [-0.7502, 1.7135, 0.0367], [0.0389, -0.0685, 1.0296]];

pub fn linear_rgb_to_xyz(rgb: [f64; 3]) -> [f64; 3] {
    mat_vec(&RGB_TO_XYZ, rgb)
}

pub fn xyz_to_linear_rgb(xyz: [f64; 3]) -> [f64; 3] {
    mat_vec(&XYZ_TO_RGB, xyz)
}

/// sRGB EOTF: nonlinear code value to linear light. Input is clamped to `[0, 1]`.
pub fn srgb_to_linear(c: f64) -> f64 {
    let c = clamp_unit(c);
    if c <= 0.04045 {
        c / 12.92
    } else {
        ((c + 0.055) / 1.055).powf(2.4)
    }
}

/// Inverse sRGB EOTF. Input is clamped to `[0, 1]`.
pub fn linear_to_srgb(v: f64) -> f64 {
    let v = clamp_unit(v);
    if v >= 1.0 {
        1.0
    } else if v <= 0.0031308 {
        v * 12.92
    } else {
        1.055 * v.powf(1.0 / 2.4) - 0.055
    }
}

/// Clamp to `[0, 1]`, mapping NaN to 0.
pub(crate) fn clamp_unit(v: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(0.0, 1.0)
    }
}

const LAB_DELTA: f64 = 6.0 / 29.0;

fn lab_f(t: f64) -> f64 {
    if t > LAB_DELTA * LAB_DELTA * LAB_DELTA {
        t.cbrt()
    } else {
        t / (3.0 * LAB_DELTA * LAB_DELTA) + 4.0 / 29.0
    }
}

fn lab_f_inv(f: f64) -> f64 {
    if f > LAB_DELTA {
        f * f * f
    } else {
        3.0 * LAB_DELTA * LAB_DELTA * (f - 4.0 / 29.0)
    }
}

pub fn xyz_to_lab(xyz: [f64; 3], white: &Chromaticity) -> [f64; 3] {
    let wn = white.to_xyz();
    let fx = lab_f(xyz[0] / wn[0]);
    let fy = lab_f(xyz[1] / wn[1]);
    let fz = lab_f(xyz[2] / wn[2]);
    [116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)]
}

pub fn lab_to_xyz(lab: [f64; 3], white: &Chromaticity) -> [f64; 3] {
    let wn = white.to_xyz();
    let fy = (lab[0] + 16.0) / 116.0;
    let fx = fy + lab[1] / 500.0;
    let fz = fy - lab[2] / 200.0;
    [wn[0] * lab_f_inv(fx), wn[1] * lab_f_inv(fy), wn[2] * lab_f_inv(fz)]
}

/// One nonlinear sRGB pixel to L*a*b* relative to `white`.
pub fn srgb_pixel_to_lab(rgb: [f64; 3], white: &Chromaticity) -> [f64; 3] {
    let lin = rgb.map(srgb_to_linear);
    xyz_to_lab(linear_rgb_to_xyz(lin), white)
}

/// One L*a*b* pixel to nonlinear sRGB, clamped per channel.
pub fn lab_pixel_to_srgb(lab: [f64; 3], white: &Chromaticity) -> [f64; 3] {
    xyz_to_linear_rgb(lab_to_xyz(lab, white)).map(linear_to_srgb)
}

pub fn rgb_to_lab(img: &Image, white_point: &Chromaticity) -> LabImage {
    let data = img.pixels().flat_map(|p| srgb_pixel_to_lab(p, white_point)).collect();
    LabImage::from_raw(img.width(), img.height(), data)
}

pub fn lab_to_rgb(img: &LabImage, white_point: &Chromaticity) -> Image {
    Image::from_pixels(img.width(), img.height(), img.pixels().map(|p| lab_pixel_to_srgb(p, white_point)))
}

/// Mean linear RGB of an image, in `f64`.
pub(crate) fn mean_linear_rgb(img: &Image) -> [f64; 3] {
    let mut acc = [0.0f64; 3];
    for p in img.pixels() {
        for c in 0..3 {
            acc[c] += srgb_to_linear(p[c]);
        }
    }
    let n = img.pixel_count() as f64;
    acc.map(|v| v / n)
}

/// Gray-world white estimate: mean linear RGB taken to XYZ and projected to (x, y).
pub fn estimate_white_chromaticity(img: &Image) -> Result<Chromaticity, ColorError> {
    let xyz = linear_rgb_to_xyz(mean_linear_rgb(img));
    if xyz[1].is_nan() || xyz[1] < 1e-6 {
        return Err(ColorError::AllBlackImage { mean_luminance: xyz[1] });
    }
    Chromaticity::from_xyz(xyz)
}

/// McCamy's cubic approximation of correlated color temperature.
pub fn chromaticity_to_cct(c: &Chromaticity) -> Result<f64, ColorError> {
    let denom = 0.1858 - c.y;
    if denom.abs() < 1e-6 {
        return Err(ColorError::OutOfLocus { x: c.x, y: c.y });
    }
    let n = (c.x - 0.3320) / denom;
    let cct = ((449.0 * n + 3525.0) * n + 6823.3) * n + 5520.33;
    if !(MIN_CCT_KELVIN..=MAX_CCT_KELVIN).contains(&cct) {
        return Err(ColorError::OutOfLocus { x: c.x, y: c.y });
    }
    Ok(cct)
}

/// Chromaticity of a blackbody at `kelvin`, using the cubic-spline Planckian
/// locus approximation of Kim et al. Fitted on 1667–25000 K; the polynomials
/// are extrapolated smoothly over the rest of `[1500, 40000]` K.
pub fn planckian_chromaticity(kelvin: f64) -> Result<Chromaticity, ColorError> {
    if !(MIN_CCT_KELVIN..=MAX_CCT_KELVIN).contains(&kelvin) {
        return Err(ColorError::CctOutOfRange { kelvin });
    }
    let t = kelvin;
    let (t2, t3) = (t * t, t * t * t);
    let x = if t <= 4000.0 {
        -0.2661239e9 / t3 - 0.2343589e6 / t2 + 0.8776956e3 / t + 0.179910
    } else {
        -3.0258469e9 / t3 + 2.1070379e6 / t2 + 0.2226347e3 / t + 0.240390
    };
    let (x2, x3) = (x * x, x * x * x);
    let y = if t <= 2222.0 {
        -1.1063814 * x3 - 1.34811020 * x2 + 2.18555832 * x - 0.20219683
    } else if t <= 4000.0 {
        -0.9549476 * x3 - 1.37418593 * x2 + 2.09137015 * x - 0.16748867
    } else {
        3.0817580 * x3 - 5.87338670 * x2 + 3.75112997 * x - 0.37001483
    };
    Chromaticity::new(x, y)
}

/// Bradford von Kries adaptation expressed directly on linear sRGB triples.
pub fn bradford_adaptation_rgb(source: &Chromaticity, target: &Chromaticity) -> Mat3 {
    let src = mat_vec(&BRADFORD, source.to_xyz());
    let tgt = mat_vec(&BRADFORD, target.to_xyz());
    let scale = diag([tgt[0] / src[0], tgt[1] / src[1], tgt[2] / src[2]]);
    let xyz_adapt = mat_mul(&mat_inverse(&BRADFORD), &mat_mul(&scale, &BRADFORD));
    mat_mul(&XYZ_TO_RGB, &mat_mul(&xyz_adapt, &RGB_TO_XYZ))
}
