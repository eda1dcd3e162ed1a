//! Rewards for the edited image (compliance-gated photometric and perceptual
//! terms) and for the critic (format, score ranking, suggestion exploration).

mod perceptual;

pub use perceptual::{ssim_plane, ExternalMetric, MetricError, PerceptualDistance, StructuralDistance};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attributes::{attribute_delta, AttributeDelta, AttributeKind};
use crate::color::Image;
use crate::datagen::{generate_reference, DatagenError};
use crate::retouch::MagnitudeTable;
use crate::suggestion::{validate_critic_output, EditSuggestion, RestoreTask};

#[derive(Debug, Error)]
pub enum RewardError {
    #[error("suggestion {0} has no measurable attribute")]
    UnmeasurableAttribute(String),
    #[error("perceptual metric failed: {0}")]
    MetricFailure(#[from] MetricError),
    #[error("score {0} is outside [0, 100]")]
    ScoreOutOfRange(i64),
    #[error("no retouch suggestion to apply and no restoration label to check")]
    NoApplicableSuggestion,
    #[error("invalid reward config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Reference(#[from] DatagenError),
}

/// One value per measured attribute.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerAttribute {
    pub exposure: f64,
    pub contrast: f64,
    pub saturation: f64,
    pub cct: f64,
}

impl PerAttribute {
    pub fn get(&self, kind: AttributeKind) -> f64 {
        match kind {
            AttributeKind::Exposure => self.exposure,
            AttributeKind::Contrast => self.contrast,
            AttributeKind::Saturation => self.saturation,
            AttributeKind::Cct => self.cct,
        }
    }

    pub fn from_fn(mut f: impl FnMut(AttributeKind) -> f64) -> Self {
        Self {
            exposure: f(AttributeKind::Exposure),
            contrast: f(AttributeKind::Contrast),
            saturation: f(AttributeKind::Saturation),
            cct: f(AttributeKind::Cct),
        }
    }

    pub fn mean(&self) -> f64 {
        (self.exposure + self.contrast + self.saturation + self.cct) / 4.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RewardConfig {
    pub lambda1: f64,
    pub lambda2: f64,
    pub tau: PerAttribute,
    pub epsilon: f64,
    pub dead_zone: PerAttribute,
}

pub const DEFAULT_TAU: PerAttribute = PerAttribute { exposure: 0.01, contrast: 0.01, saturation: 0.01, cct: 3.0 };

impl Default for RewardConfig {
    fn default() -> Self {
        Self { lambda1: 1.0, lambda2: 0.5, tau: DEFAULT_TAU, epsilon: 1e-6, dead_zone: DEFAULT_TAU }
    }
}

impl RewardConfig {
    pub fn validate(&self) -> Result<(), RewardError> {
        let bad = |what: &str, v: f64| RewardError::InvalidConfig(format!("{what} = {v}"));
        for (name, v) in [("lambda1", self.lambda1), ("lambda2", self.lambda2)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(bad(name, v));
            }
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(bad("epsilon", self.epsilon));
        }
        for kind in AttributeKind::ALL {
            let (t, d) = (self.tau.get(kind), self.dead_zone.get(kind));
            if !(t.is_finite() && t > 0.0) {
                return Err(bad(&format!("tau.{kind}"), t));
            }
            if !(d.is_finite() && d >= 0.0) {
                return Err(bad(&format!("dead_zone.{kind}"), d));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplianceDetail {
    pub suggestion: EditSuggestion,
    pub attribute: AttributeKind,
    pub delta: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Compliance {
    pub score: f64,
    pub details: Vec<ComplianceDetail>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardBreakdown {
    pub compliance: f64,
    pub per_attribute: PerAttribute,
    pub photometric: f64,
    pub perceptual: f64,
    pub perceptual_distance: f64,
    pub total: f64,
    pub compliance_details: Vec<ComplianceDetail>,
}

/// `true` iff the measured change has the suggested sign and clears the dead zone.
pub fn compliance_indicator(
    suggestion: &EditSuggestion,
    delta_e: &AttributeDelta,
    cfg: &RewardConfig,
) -> Result<bool, RewardError> {
    let (kind, up) = match (suggestion.measurable_attribute(), suggestion.as_retouch()) {
        (Some(kind), Some(r)) => (kind, r.direction().is_up()),
        _ => return Err(RewardError::UnmeasurableAttribute(suggestion.to_string())),
    };
    let d = delta_e.get(kind);
    let sign_ok = if up { d > 0.0 } else { d < 0.0 };
    Ok(sign_ok && d.abs() >= cfg.dead_zone.get(kind))
}

/// Mean compliance over the color/tone suggestions; 1.0 when there are none.
pub fn semantic_compliance(suggestions: &[EditSuggestion], x: &Image, xe: &Image, cfg: &RewardConfig) -> Compliance {
    compliance_from_delta(suggestions, &attribute_delta(xe, x), cfg)
}

fn compliance_from_delta(suggestions: &[EditSuggestion], delta_e: &AttributeDelta, cfg: &RewardConfig) -> Compliance {
    let details: Vec<ComplianceDetail> = suggestions
        .iter()
        .filter_map(|s| {
            let attribute = s.measurable_attribute()?;
            let satisfied = compliance_indicator(s, delta_e, cfg).ok()?;
            Some(ComplianceDetail { suggestion: *s, attribute, delta: delta_e.get(attribute), satisfied })
        })
        .collect();
    let score = if details.is_empty() {
        1.0
    } else {
        details.iter().filter(|d| d.satisfied).count() as f64 / details.len() as f64
    };
    Compliance { score, details }
}

pub fn attribute_reward(delta_e: f64, delta_gt: f64, tau: f64, epsilon: f64) -> f64 {
    if delta_gt.abs() < tau {
        if delta_e.abs() <= tau {
            1.0
        } else {
            0.0
        }
    } else {
        (1.0 - (delta_e - delta_gt).abs() / (delta_gt.abs() + epsilon)).clamp(0.0, 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Photometric {
    pub per_attribute: PerAttribute,
    pub mean: f64,
}

pub fn photometric_reward(x: &Image, xe: &Image, xgt: &Image, cfg: &RewardConfig) -> Photometric {
    photometric_from_deltas(&attribute_delta(xe, x), &attribute_delta(xgt, x), cfg)
}

pub fn photometric_from_deltas(delta_e: &AttributeDelta, delta_gt: &AttributeDelta, cfg: &RewardConfig) -> Photometric {
    let per_attribute =
        PerAttribute::from_fn(|k| attribute_reward(delta_e.get(k), delta_gt.get(k), cfg.tau.get(k), cfg.epsilon));
    Photometric { per_attribute, mean: per_attribute.mean() }
}

pub fn perceptual_from_distance(d: f64) -> f64 {
    (-d).exp()
}

pub fn perceptual_reward(xe: &Image, xgt: &Image, metric: &dyn PerceptualDistance) -> Result<f64, RewardError> {
    Ok(perceptual_from_distance(metric.distance(xe, xgt)?))
}

/// The gated reward `r_comp × (λ₁·r_photo + λ₂·r_perc)`.
pub fn artist_reward(
    x: &Image,
    xe: &Image,
    xgt: &Image,
    suggestions: &[EditSuggestion],
    cfg: &RewardConfig,
    metric: &dyn PerceptualDistance,
) -> Result<RewardBreakdown, RewardError> {
    cfg.validate()?;
    let distance = metric.distance(xe, xgt)?;
    let ax = crate::attributes::measure_attributes(x);
    let delta_e = AttributeDelta::between(&crate::attributes::measure_attributes(xe), &ax);
    let delta_gt = AttributeDelta::between(&crate::attributes::measure_attributes(xgt), &ax);
    let compliance = compliance_from_delta(suggestions, &delta_e, cfg);
    let photo = photometric_from_deltas(&delta_e, &delta_gt, cfg);
    let perceptual = perceptual_from_distance(distance);
    Ok(RewardBreakdown {
        compliance: compliance.score,
        per_attribute: photo.per_attribute,
        photometric: photo.mean,
        perceptual,
        perceptual_distance: distance,
        total: compliance.score * (cfg.lambda1 * photo.mean + cfg.lambda2 * perceptual),
        compliance_details: compliance.details,
    })
}

/// One artist-reward request in a batch.
pub struct RewardRequest<'a> {
    pub input: &'a Image,
    pub edited: &'a Image,
    pub gt: &'a Image,
    pub suggestions: &'a [EditSuggestion],
}

/// Scores every request; a failing metric call only fails its own entry.
pub fn artist_reward_batch(
    requests: &[RewardRequest<'_>],
    cfg: &RewardConfig,
    metric: &dyn PerceptualDistance,
) -> Vec<Result<RewardBreakdown, RewardError>> {
    requests.iter().map(|r| artist_reward(r.input, r.edited, r.gt, r.suggestions, cfg, metric)).collect()
}

/// 1 when the edit scores strictly higher than the input, else 0.
pub fn score_ranking_reward(score_x: i64, score_xe: i64) -> Result<u8, RewardError> {
    for s in [score_x, score_xe] {
        if !(0..=100).contains(&s) {
            return Err(RewardError::ScoreOutOfRange(s));
        }
    }
    Ok(u8::from(score_x < score_xe))
}

/// 1.0 when the critic text passes the format validator, else 0.0.
pub fn format_reward(text: &str) -> f64 {
    if validate_critic_output(text).is_ok() {
        1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplorationReward {
    pub reward: f64,
    pub photometric: Photometric,
    pub restore_factor: f64,
}

/// Scores critic suggestions by applying them rule-based to `x` and comparing
/// the resulting reference with `xgt` photometrically. Restoration
/// suggestions must name exactly the sample's degradation label (if any).
pub fn suggestion_exploration_reward(
    x: &Image,
    xgt: &Image,
    suggestions: &[EditSuggestion],
    restoration_label: Option<RestoreTask>,
    cfg: &RewardConfig,
    table: &MagnitudeTable,
) -> Result<ExplorationReward, RewardError> {
    cfg.validate()?;
    let has_retouch = suggestions.iter().any(|s| s.measurable_attribute().is_some());
    if !has_retouch && restoration_label.is_none() {
        return Err(RewardError::NoApplicableSuggestion);
    }
    let named: Vec<RestoreTask> = suggestions.iter().filter_map(|s| s.restore_task()).collect();
    let matched = match restoration_label {
        Some(label) => !named.is_empty() && named.iter().all(|t| *t == label),
        None => named.is_empty(),
    };
    let restore_factor = if matched { 1.0 } else { 0.0 };
    let reference = generate_reference(x, suggestions, table)?;
    let photometric = photometric_reward(x, &reference.image, xgt, cfg);
    Ok(ExplorationReward { reward: restore_factor * photometric.mean, photometric, restore_factor })
}
