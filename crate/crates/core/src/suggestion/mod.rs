//! Edit suggestions: the closed keyword grammar the critic emits, its
//! canonical renderer, and the validator for complete critic outputs.

mod critic;
mod grammar;

pub use critic::{validate_critic_output, BlockKind, CriticOutput, FormatViolation, ReasoningSection};
pub use grammar::{
    parse_suggestion, parse_suggestion_list, parse_suggestion_list_spanned, render_instruction, render_suggestion,
    Grammar, Spanned,
};

use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attributes::AttributeKind;
use crate::retouch::MagnitudeWord;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SuggestionError {
    #[error("cannot parse suggestion {text:?} at bytes {}..{}: {reason}", span.start, span.end)]
    UnparseableSuggestion { text: String, span: Range<usize>, reason: String },
    #[error("{name} is targeted by more than one suggestion (bytes {}..{})", span.start, span.end)]
    DuplicateAttribute { name: String, span: Range<usize> },
    #[error("direction {direction} does not apply to {attribute}")]
    InvalidDirection { attribute: RetouchAttribute, direction: Direction },
}

/// Attributes a retouch suggestion may name. Depth of field parses but has
/// no operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RetouchAttribute {
    Exposure,
    Contrast,
    Saturation,
    Cct,
    Dof,
}

impl RetouchAttribute {
    pub const ALL: [RetouchAttribute; 5] = [Self::Exposure, Self::Contrast, Self::Saturation, Self::Cct, Self::Dof];

    /// The measured attribute behind this one, if any.
    pub fn measurable(&self) -> Option<AttributeKind> {
        match self {
            Self::Exposure => Some(AttributeKind::Exposure),
            Self::Contrast => Some(AttributeKind::Contrast),
            Self::Saturation => Some(AttributeKind::Saturation),
            Self::Cct => Some(AttributeKind::Cct),
            Self::Dof => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Exposure => "exposure",
            Self::Contrast => "contrast",
            Self::Saturation => "saturation",
            Self::Cct => "cct",
            Self::Dof => "dof",
        }
    }
}

impl From<AttributeKind> for RetouchAttribute {
    fn from(kind: AttributeKind) -> Self {
        match kind {
            AttributeKind::Exposure => Self::Exposure,
            AttributeKind::Contrast => Self::Contrast,
            AttributeKind::Saturation => Self::Saturation,
            AttributeKind::Cct => Self::Cct,
        }
    }
}

impl fmt::Display for RetouchAttribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Increase,
    Decrease,
    Warmer,
    Cooler,
}

impl Direction {
    /// Increase and warmer move the measured attribute up (warmer = more mireds).
    pub fn is_up(&self) -> bool {
        matches!(self, Self::Increase | Self::Warmer)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Increase => "increase",
            Self::Decrease => "decrease",
            Self::Warmer => "warmer",
            Self::Cooler => "cooler",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Magnitude {
    Slight,
    Moderate,
    Strong,
    Unspecified,
}

impl Magnitude {
    pub const ALL: [Magnitude; 4] = [Self::Slight, Self::Moderate, Self::Strong, Self::Unspecified];

    /// Word used when applying the suggestion; unspecified means moderate.
    pub fn resolved(&self) -> MagnitudeWord {
        match self {
            Self::Slight => MagnitudeWord::Slight,
            Self::Moderate | Self::Unspecified => MagnitudeWord::Moderate,
            Self::Strong => MagnitudeWord::Strong,
        }
    }
}

impl From<MagnitudeWord> for Magnitude {
    fn from(word: MagnitudeWord) -> Self {
        match word {
            MagnitudeWord::Slight => Self::Slight,
            MagnitudeWord::Moderate => Self::Moderate,
            MagnitudeWord::Strong => Self::Strong,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RestoreTask {
    Deblur,
    Dehaze,
    Denoise,
    Demoire,
    Deshadow,
    Lowlight,
    Derain,
}

impl RestoreTask {
    pub const ALL: [RestoreTask; 7] =
        [Self::Deblur, Self::Dehaze, Self::Denoise, Self::Demoire, Self::Deshadow, Self::Lowlight, Self::Derain];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Deblur => "deblur",
            Self::Dehaze => "dehaze",
            Self::Denoise => "denoise",
            Self::Demoire => "demoire",
            Self::Deshadow => "deshadow",
            Self::Lowlight => "lowlight",
            Self::Derain => "derain",
        }
    }

    /// Dataset degradation tag ("blur", "haze", ...) or task name ("deblur").
    pub fn from_label(label: &str) -> Option<Self> {
        let l = label.trim().to_lowercase().replace(['-', '_', ' '], "");
        let task = match l.as_str() {
            "deblur" | "blur" | "motionblur" | "defocus" => Self::Deblur,
            "dehaze" | "haze" | "fog" | "foggy" | "hazy" => Self::Dehaze,
            "denoise" | "noise" | "noisy" => Self::Denoise,
            "demoire" | "moire" | "moiré" => Self::Demoire,
            "deshadow" | "shadow" => Self::Deshadow,
            "lowlight" | "dark" | "lowlightenhancement" => Self::Lowlight,
            "derain" | "rain" | "rainy" => Self::Derain,
            _ => return None,
        };
        Some(task)
    }
}

impl fmt::Display for RestoreTask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A well-formed retouch suggestion: color temperature takes warmer/cooler,
/// everything else increase/decrease.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Retouch {
    attribute: RetouchAttribute,
    direction: Direction,
    magnitude: Magnitude,
}

impl Retouch {
    pub fn new(
        attribute: RetouchAttribute,
        direction: Direction,
        magnitude: Magnitude,
    ) -> Result<Self, SuggestionError> {
        let cct_direction = matches!(direction, Direction::Warmer | Direction::Cooler);
        if (attribute == RetouchAttribute::Cct) != cct_direction {
            return Err(SuggestionError::InvalidDirection { attribute, direction });
        }
        Ok(Self { attribute, direction, magnitude })
    }

    pub fn attribute(&self) -> RetouchAttribute {
        self.attribute
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn magnitude(&self) -> Magnitude {
        self.magnitude
    }

    /// Depth-of-field edits have no operator.
    pub fn supported(&self) -> bool {
        self.attribute.measurable().is_some()
    }
}

/// One parsed edit suggestion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EditSuggestion {
    Retouch(Retouch),
    Restore(RestoreTask),
}

impl EditSuggestion {
    /// Convenience constructor; panics on an invalid attribute/direction pair.
    pub fn retouch(attribute: RetouchAttribute, direction: Direction, magnitude: Magnitude) -> Self {
        Self::Retouch(Retouch::new(attribute, direction, magnitude).expect("valid retouch"))
    }

    pub fn restore(task: RestoreTask) -> Self {
        Self::Restore(task)
    }

    pub fn as_retouch(&self) -> Option<&Retouch> {
        match self {
            Self::Retouch(r) => Some(r),
            Self::Restore(_) => None,
        }
    }

    pub fn restore_task(&self) -> Option<RestoreTask> {
        match self {
            Self::Restore(t) => Some(*t),
            Self::Retouch(_) => None,
        }
    }

    /// Measured attribute targeted by a supported retouch suggestion.
    pub fn measurable_attribute(&self) -> Option<AttributeKind> {
        self.as_retouch().and_then(|r| r.attribute.measurable())
    }

    pub fn supported(&self) -> bool {
        match self {
            Self::Retouch(r) => r.supported(),
            Self::Restore(_) => true,
        }
    }

    /// Name used for duplicate detection.
    fn target_name(&self) -> &'static str {
        match self {
            Self::Retouch(r) => r.attribute.name(),
            Self::Restore(t) => t.name(),
        }
    }
}

impl fmt::Display for EditSuggestion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_suggestion(self))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum SuggestionRepr {
    Retouch {
        attribute: RetouchAttribute,
        direction: Direction,
        magnitude: Magnitude,
        #[serde(default = "yes", skip_deserializing)]
        supported: bool,
    },
    Restore {
        task: RestoreTask,
    },
}

fn yes() -> bool {
    true
}

impl Serialize for EditSuggestion {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let repr = match self {
            Self::Retouch(r) => SuggestionRepr::Retouch {
                attribute: r.attribute,
                direction: r.direction,
                magnitude: r.magnitude,
                supported: r.supported(),
            },
            Self::Restore(task) => SuggestionRepr::Restore { task: *task },
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for EditSuggestion {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match SuggestionRepr::deserialize(d)? {
            SuggestionRepr::Retouch { attribute, direction, magnitude, .. } => {
                Retouch::new(attribute, direction, magnitude).map(Self::Retouch).map_err(serde::de::Error::custom)
            }
            SuggestionRepr::Restore { task } => Ok(Self::Restore(task)),
        }
    }
}
