//! Synthetic training pairs: perturb a ground-truth image with a sampled
//! retouch stack and record the corrective instruction. Also hosts the
//! rule-based reference generator that turns suggestions into an image.

mod manifest;

pub use manifest::{parse_manifest, read_manifest, write_manifest, SampleManifestRecord};

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attributes::AttributeKind;
use crate::color::io::{read_image, write_png16, ImageIoError};
use crate::color::Image;
use crate::retouch::{apply_stack, apply_stack_reversed, MagnitudeTable, MagnitudeWord, RetouchError, RetouchParams};
use crate::suggestion::{render_instruction, Direction, EditSuggestion, Magnitude, RestoreTask, RetouchAttribute};

#[derive(Debug, Error)]
pub enum DatagenError {
    #[error("unknown restoration label {0:?}")]
    UnknownRestorationLabel(String),
    #[error("no restoration label for {0}")]
    MissingLabel(String),
    #[error("more than one suggestion targets {0}")]
    DuplicateAttribute(AttributeKind),
    #[error("invalid synthesis plan: {0}")]
    InvalidPlan(String),
    #[error("manifest line {line}: {message}")]
    SchemaViolation { line: usize, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Image(#[from] ImageIoError),
    #[error(transparent)]
    Retouch(#[from] RetouchError),
}

fn default_source() -> String {
    "synthetic".to_owned()
}

/// How perturbations are sampled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthesisPlan {
    pub attributes: Vec<AttributeKind>,
    pub magnitudes: Vec<MagnitudeWord>,
    /// Chance of stacking each further attribute after the first.
    pub multi_edit_probability: f64,
    pub master_seed: u64,
    /// Chance that a sample is left untouched.
    #[serde(default)]
    pub noop_probability: f64,
    #[serde(default = "default_source")]
    pub source: String,
}

impl Default for SynthesisPlan {
    fn default() -> Self {
        Self {
            attributes: AttributeKind::ALL.to_vec(),
            magnitudes: MagnitudeWord::ALL.to_vec(),
            multi_edit_probability: 0.5,
            master_seed: 0,
            noop_probability: 0.0,
            source: default_source(),
        }
    }
}

impl SynthesisPlan {
    pub fn from_json(text: &str) -> Result<Self, DatagenError> {
        let plan: Self = serde_json::from_str(text).map_err(|e| DatagenError::InvalidPlan(e.to_string()))?;
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<(), DatagenError> {
        let bad = |m: String| Err(DatagenError::InvalidPlan(m));
        if self.attributes.is_empty() {
            return bad("no attributes to perturb".into());
        }
        if self.magnitudes.is_empty() {
            return bad("empty magnitude pool".into());
        }
        for (i, a) in self.attributes.iter().enumerate() {
            if self.attributes[..i].contains(a) {
                return bad(format!("attribute {a} listed twice"));
            }
        }
        for (name, p) in
            [("multi_edit_probability", self.multi_edit_probability), ("noop_probability", self.noop_probability)]
        {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} = {p} is outside [0, 1]"));
            }
        }
        Ok(())
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of sample `index`, independent of every other index.
pub fn sample_seed(master_seed: u64, index: u64) -> u64 {
    splitmix64(master_seed ^ splitmix64(index))
}

/// Corrective edit drawn for one sample seed. The perturbation applied to
/// the ground truth is its inverse.
pub fn sample_correction(
    plan: &SynthesisPlan,
    table: &MagnitudeTable,
    seed: u64,
) -> Result<RetouchParams, DatagenError> {
    plan.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if rng.random::<f64>() < plan.noop_probability {
        return Ok(RetouchParams::IDENTITY);
    }
    let mut attrs = plan.attributes.clone();
    attrs.shuffle(&mut rng);
    let mut count = 1;
    while count < attrs.len() && rng.random::<f64>() < plan.multi_edit_probability {
        count += 1;
    }
    let mut params = RetouchParams::IDENTITY;
    for &kind in &attrs[..count] {
        let up = rng.random::<bool>();
        let word = plan.magnitudes[rng.random_range(0..plan.magnitudes.len())];
        params = params.with(kind, table.lookup(kind, up, word))?;
    }
    Ok(params)
}

/// Perturbation (ground truth → input) for one sample seed.
pub fn sample_perturbation(
    plan: &SynthesisPlan,
    table: &MagnitudeTable,
    seed: u64,
) -> Result<RetouchParams, DatagenError> {
    Ok(sample_correction(plan, table, seed)?.inverse()?)
}

/// Suggestions (canonical order) that undo `perturbation`, using the table's
/// wording. A correction that is not a table entry is an `InvalidPlan` error.
pub fn corrective_suggestions(
    perturbation: &RetouchParams,
    table: &MagnitudeTable,
) -> Result<Vec<EditSuggestion>, DatagenError> {
    let correction = perturbation.inverse()?;
    AttributeKind::ALL
        .into_iter()
        .filter(|k| !correction.is_identity_for(*k))
        .map(|kind| {
            let value = correction.get(kind);
            let (up, word) = table.classify(kind, value).ok_or_else(|| {
                DatagenError::InvalidPlan(format!("{kind} correction {value} is not in the magnitude table"))
            })?;
            let direction = match (kind, up) {
                (AttributeKind::Cct, true) => Direction::Warmer,
                (AttributeKind::Cct, false) => Direction::Cooler,
                (_, true) => Direction::Increase,
                (_, false) => Direction::Decrease,
            };
            Ok(EditSuggestion::retouch(RetouchAttribute::from(kind), direction, Magnitude::from(word)))
        })
        .collect()
}

/// A synthesized input image and its manifest record (paths left empty).
#[derive(Debug, Clone)]
pub struct Synthesized {
    pub input: Image,
    pub record: SampleManifestRecord,
}

fn synthesize(
    base: &Image,
    plan: &SynthesisPlan,
    table: &MagnitudeTable,
    index: u64,
    restoration: Option<RestoreTask>,
) -> Result<Synthesized, DatagenError> {
    let seed = sample_seed(plan.master_seed, index);
    let params = sample_perturbation(plan, table, seed)?;
    let input = apply_stack_reversed(base, &params)?;
    let mut suggestions: Vec<EditSuggestion> = restoration.into_iter().map(EditSuggestion::restore).collect();
    suggestions.extend(corrective_suggestions(&params, table)?);
    let record = SampleManifestRecord {
        sample_id: format!("{}-{index:06}", plan.source),
        input_path: PathBuf::new(),
        gt_path: PathBuf::new(),
        instruction: render_instruction(&suggestions),
        params,
        restoration_label: restoration,
        seed,
        source: plan.source.clone(),
    };
    Ok(Synthesized { input, record })
}

/// Retouch-only pair: perturb `gt` and record the correction.
pub fn synthesize_pair(
    gt: &Image,
    plan: &SynthesisPlan,
    table: &MagnitudeTable,
    index: u64,
) -> Result<Synthesized, DatagenError> {
    synthesize(gt, plan, table, index, None)
}

/// Restoration + retouch pair: stack a perturbation on an already degraded
/// image; the instruction starts with the restoration phrase.
pub fn synthesize_multi_edit(
    degraded: &Image,
    restoration_label: &str,
    plan: &SynthesisPlan,
    table: &MagnitudeTable,
    index: u64,
) -> Result<Synthesized, DatagenError> {
    let task = RestoreTask::from_label(restoration_label)
        .ok_or_else(|| DatagenError::UnknownRestorationLabel(restoration_label.to_owned()))?;
    synthesize(degraded, plan, table, index, Some(task))
}

/// A suggestion the reference generator could not apply.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedSuggestion {
    pub suggestion: EditSuggestion,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct Reference {
    pub image: Image,
    pub params: RetouchParams,
    pub skipped: Vec<SkippedSuggestion>,
}

/// Operator parameters for the retouch subset of `suggestions`, plus the
/// suggestions that have no operator.
pub fn suggestions_to_params(
    suggestions: &[EditSuggestion],
    table: &MagnitudeTable,
) -> Result<(RetouchParams, Vec<SkippedSuggestion>), DatagenError> {
    let mut params = RetouchParams::IDENTITY;
    let mut seen = Vec::new();
    let mut skipped = Vec::new();
    for s in suggestions {
        match (s.as_retouch(), s.measurable_attribute()) {
            (Some(r), Some(kind)) => {
                if seen.contains(&kind) {
                    return Err(DatagenError::DuplicateAttribute(kind));
                }
                seen.push(kind);
                let value = table.lookup(kind, r.direction().is_up(), r.magnitude().resolved());
                params = params.with(kind, value)?;
            }
            (Some(_), None) => {
                skipped.push(SkippedSuggestion { suggestion: *s, reason: "depth of field has no operator".into() })
            }
            (None, _) => skipped
                .push(SkippedSuggestion { suggestion: *s, reason: "restoration is not applied rule-based".into() }),
        }
    }
    Ok((params, skipped))
}

/// Pseudo-edited reference: apply the retouch suggestions to `x` in
/// canonical operator order.
pub fn generate_reference(
    x: &Image,
    suggestions: &[EditSuggestion],
    table: &MagnitudeTable,
) -> Result<Reference, DatagenError> {
    let (params, skipped) = suggestions_to_params(suggestions, table)?;
    let image = apply_stack(x, &params)?;
    Ok(Reference { image, params, skipped })
}

const IMAGE_EXTENSIONS: [&str; 5] = ["png", "jpg", "jpeg", "tif", "tiff"];

/// Image files directly inside `dir`, sorted by file name.
pub fn list_images(dir: &Path) -> Result<Vec<PathBuf>, DatagenError> {
    let io_err = |source| DatagenError::Io { path: dir.to_path_buf(), source };
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err)? {
        let path = entry.map_err(io_err)?.path();
        let is_image = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| IMAGE_EXTENSIONS.contains(&e.to_lowercase().as_str()));
        if path.is_file() && is_image {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Synthesize one sample per image in `gt_dir`, writing inputs as 16-bit
/// PNGs into `out_dir`. With `labels` (file name → degradation tag) every
/// sample becomes a restoration + retouch pair. Records are in file-name order.
pub fn synthesize_directory(
    gt_dir: &Path,
    plan: &SynthesisPlan,
    table: &MagnitudeTable,
    out_dir: &Path,
    labels: Option<&BTreeMap<String, String>>,
) -> Result<Vec<SampleManifestRecord>, DatagenError> {
    plan.validate()?;
    fs::create_dir_all(out_dir).map_err(|source| DatagenError::Io { path: out_dir.to_path_buf(), source })?;
    let mut records = Vec::new();
    for (index, gt_path) in list_images(gt_dir)?.into_iter().enumerate() {
        let gt = read_image(&gt_path)?;
        let name = gt_path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let mut sample = match labels {
            None => synthesize_pair(&gt, plan, table, index as u64)?,
            Some(map) => {
                let label = map.get(&name).ok_or_else(|| DatagenError::MissingLabel(name.clone()))?;
                synthesize_multi_edit(&gt, label, plan, table, index as u64)?
            }
        };
        let input_path = out_dir.join(format!("{}.png", sample.record.sample_id));
        write_png16(&input_path, &sample.input)?;
        sample.record.input_path = input_path;
        sample.record.gt_path = gt_path;
        records.push(sample.record);
    }
    Ok(records)
}
