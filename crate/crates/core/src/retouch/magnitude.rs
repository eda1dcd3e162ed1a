//! Mapping from magnitude words to operator parameters.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{MAX_ABS_CCT_SHIFT_MIRED, MAX_ABS_EXPOSURE_EV, MAX_CONTRAST_SCALE, MAX_SATURATION_SCALE};
use crate::attributes::AttributeKind;

#[derive(Debug, Error)]
pub enum MagnitudeError {
    #[error("cannot read magnitude table {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed magnitude table: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid magnitude table: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MagnitudeWord {
    Slight,
    Moderate,
    Strong,
}

impl MagnitudeWord {
    pub const ALL: [MagnitudeWord; 3] = [Self::Slight, Self::Moderate, Self::Strong];
}

/// One value per magnitude word.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelSet {
    pub slight: f64,
    pub moderate: f64,
    pub strong: f64,
}

impl LevelSet {
    pub fn get(&self, word: MagnitudeWord) -> f64 {
        match word {
            MagnitudeWord::Slight => self.slight,
            MagnitudeWord::Moderate => self.moderate,
            MagnitudeWord::Strong => self.strong,
        }
    }

    fn values(&self) -> [f64; 3] {
        [self.slight, self.moderate, self.strong]
    }
}

/// Multiplicative levels for an attribute whose operator takes a ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatioLevels {
    pub increase: LevelSet,
    pub decrease: LevelSet,
}

/// Numeric meaning of "slightly", "moderately" and "strongly" per attribute.
///
/// Exposure levels are EV magnitudes and color temperature levels are mired
/// magnitudes; the sign comes from the direction. Contrast and saturation
/// store the multiplier for each direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MagnitudeTable {
    pub exposure_ev: LevelSet,
    pub contrast: RatioLevels,
    pub saturation: RatioLevels,
    pub cct_mired: LevelSet,
}

impl Default for MagnitudeTable {
    fn default() -> Self {
        let ratios = RatioLevels {
            increase: LevelSet { slight: 1.10, moderate: 1.25, strong: 1.50 },
            decrease: LevelSet { slight: 0.90, moderate: 0.80, strong: 0.67 },
        };
        Self {
            exposure_ev: LevelSet { slight: 0.3, moderate: 0.7, strong: 1.2 },
            contrast: ratios,
            saturation: ratios,
            cct_mired: LevelSet { slight: 10.0, moderate: 25.0, strong: 50.0 },
        }
    }
}

fn strictly_increasing(v: [f64; 3]) -> bool {
    v[0] < v[1] && v[1] < v[2]
}

impl MagnitudeTable {
    pub fn from_json(text: &str) -> Result<Self, MagnitudeError> {
        let table: Self = serde_json::from_str(text)?;
        table.validate()?;
        Ok(table)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, MagnitudeError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| MagnitudeError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }

    pub fn validate(&self) -> Result<(), MagnitudeError> {
        let invalid = |msg: String| Err(MagnitudeError::Invalid(msg));
        for (name, levels, max) in [
            ("exposure_ev", &self.exposure_ev, MAX_ABS_EXPOSURE_EV),
            ("cct_mired", &self.cct_mired, MAX_ABS_CCT_SHIFT_MIRED),
        ] {
            let v = levels.values();
            if !(v[0] > 0.0 && strictly_increasing(v) && v[2] <= max) {
                return invalid(format!(
                    "{name} levels must satisfy 0 < slight < moderate < strong <= {max}, got {v:?}"
                ));
            }
        }
        for (name, r, max) in
            [("contrast", &self.contrast, MAX_CONTRAST_SCALE), ("saturation", &self.saturation, MAX_SATURATION_SCALE)]
        {
            let up = r.increase.values();
            if !(up[0] > 1.0 && strictly_increasing(up) && up[2] <= max) {
                return invalid(format!(
                    "{name}.increase must satisfy 1 < slight < moderate < strong <= {max}, got {up:?}"
                ));
            }
            let down = r.decrease.values();
            if !(down[0] < 1.0 && down[0] > down[1] && down[1] > down[2] && down[2] > 0.0) {
                return invalid(format!(
                    "{name}.decrease must satisfy 1 > slight > moderate > strong > 0, got {down:?}"
                ));
            }
        }
        Ok(())
    }

    /// Operator parameter for moving `kind` up (increase / warmer) or down by `word`.
    pub fn lookup(&self, kind: AttributeKind, up: bool, word: MagnitudeWord) -> f64 {
        let sign = if up { 1.0 } else { -1.0 };
        match kind {
            AttributeKind::Exposure => sign * self.exposure_ev.get(word),
            AttributeKind::Cct => sign * self.cct_mired.get(word),
            AttributeKind::Contrast => Self::ratio(&self.contrast, up, word),
            AttributeKind::Saturation => Self::ratio(&self.saturation, up, word),
        }
    }

    fn ratio(r: &RatioLevels, up: bool, word: MagnitudeWord) -> f64 {
        if up {
            r.increase.get(word)
        } else {
            r.decrease.get(word)
        }
    }

    /// Inverse of [`lookup`](Self::lookup): which (direction, word) produces
    /// `value`, within a relative tolerance of 1e-9. `None` for identity or
    /// off-table values.
    pub fn classify(&self, kind: AttributeKind, value: f64) -> Option<(bool, MagnitudeWord)> {
        [true, false].into_iter().find_map(|up| {
            MagnitudeWord::ALL.into_iter().find_map(|word| {
                let v = self.lookup(kind, up, word);
                ((v - value).abs() <= 1e-9 * v.abs().max(1.0)).then_some((up, word))
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid_and_monotone() {
        let t = MagnitudeTable::default();
        t.validate().unwrap();
        assert_eq!(t.lookup(AttributeKind::Exposure, true, MagnitudeWord::Slight), 0.3);
        assert_eq!(t.lookup(AttributeKind::Exposure, false, MagnitudeWord::Strong), -1.2);
        assert_eq!(t.lookup(AttributeKind::Contrast, false, MagnitudeWord::Strong), 0.67);
        assert_eq!(t.lookup(AttributeKind::Saturation, true, MagnitudeWord::Moderate), 1.25);
        assert_eq!(t.lookup(AttributeKind::Cct, false, MagnitudeWord::Moderate), -25.0);
    }

    #[test]
    fn classify_inverts_lookup() {
        let t = MagnitudeTable::default();
        for kind in AttributeKind::ALL {
            for up in [true, false] {
                for word in MagnitudeWord::ALL {
                    assert_eq!(t.classify(kind, t.lookup(kind, up, word)), Some((up, word)));
                }
            }
        }
        assert_eq!(t.classify(AttributeKind::Contrast, 1.0), None);
        assert_eq!(t.classify(AttributeKind::Exposure, 0.5), None);
    }

    #[test]
    fn json_round_trip_and_validation() {
        let t = MagnitudeTable::default();
        assert_eq!(MagnitudeTable::from_json(&t.to_json()).unwrap(), t);
        let mut bad = t.clone();
        bad.exposure_ev.moderate = 0.2;
        assert!(matches!(MagnitudeTable::from_json(&bad.to_json()), Err(MagnitudeError::Invalid(_))));
        let missing = r#"{"exposure_ev":{"slight":0.3,"moderate":0.7}}"#;
        assert!(matches!(MagnitudeTable::from_json(missing), Err(MagnitudeError::Parse(_))));
    }
}
