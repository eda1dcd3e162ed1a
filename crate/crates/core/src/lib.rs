//! Deterministic reward, retouching and dataset-synthesis toolkit for
//! instruction-driven photographic enhancement.
//!
//! Layers, bottom up:
//! - [`color`]: the [`Image`] raster, sRGB / L*a*b* conversions, CCT
//! - [`retouch`]: exposure, contrast, saturation and white-balance operators
//! - [`attributes`]: the four measured attributes and their deltas
//! - [`suggestion`]: edit-suggestion grammar and critic-output validation
//! - [`rewards`]: compliance, photometric, perceptual and critic rewards
//! - [`rl_math`]: group advantages, clipped surrogate, KL and NFT velocity math
//! - [`datagen`]: paired sample synthesis, rule-based references, manifests

pub mod attributes;
pub mod color;
pub mod datagen;
pub mod procedural;
pub mod retouch;
pub mod rewards;
pub mod rl_math;
pub mod suggestion;

pub use attributes::{attribute_delta, measure_attributes, AttributeDelta, AttributeKind, AttributeVector};
pub use color::{Chromaticity, Image, LabImage};
pub use retouch::{apply_stack, MagnitudeTable, RetouchParams};
pub use suggestion::{
    parse_suggestion, parse_suggestion_list, render_instruction, validate_critic_output, EditSuggestion,
};
