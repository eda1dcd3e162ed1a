use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use photocraft::color::io::{read_image, write_png16};
use photocraft::datagen::{generate_reference, synthesize_directory, write_manifest, SynthesisPlan};
use photocraft::rewards::{artist_reward, ExternalMetric, PerceptualDistance, RewardConfig, StructuralDistance};
use photocraft::rl_math::{group_advantages, reward_to_probability, RewardGroup};
use photocraft::suggestion::parse_suggestion_list_spanned;
use photocraft::{measure_attributes, parse_suggestion_list, validate_critic_output, EditSuggestion, MagnitudeTable};
use serde_json::json;

#[derive(Parser)]
#[command(name = "photocraft", version, about = "Retouching rewards, critic-output checks and pair synthesis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the four measured attributes of an image.
    Measure { image: PathBuf },
    /// Parse a suggestion list and print the structured suggestions.
    Parse {
        #[arg(long)]
        suggestions: PathBuf,
    },
    /// Check a critic output against the template; exits 1 on violations.
    Validate { file: PathBuf },
    /// Compute the gated artist reward for an edit.
    Score {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        edited: PathBuf,
        #[arg(long)]
        gt: PathBuf,
        #[arg(long)]
        suggestions: PathBuf,
        /// Shell command implementing the external distance protocol.
        #[arg(long)]
        metric_cmd: Option<String>,
        /// JSON reward config overriding the defaults.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Group-normalized advantages and probabilities, one reward per line.
    Advantages {
        #[arg(long)]
        rewards: PathBuf,
    },
    /// Apply suggestions rule-based and write the reference image.
    Reference {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        suggestions: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        magnitudes: Option<PathBuf>,
    },
    /// Synthesize perturbed pairs from a directory of ground truths.
    Synth {
        #[arg(long)]
        gt_dir: PathBuf,
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
        /// Treat inputs as degraded images and prepend their restoration task.
        #[arg(long, requires = "labels")]
        multi_edit: bool,
        /// JSON object mapping file names to degradation labels.
        #[arg(long, requires = "multi_edit")]
        labels: Option<PathBuf>,
        #[arg(long)]
        magnitudes: Option<PathBuf>,
    },
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_suggestions(path: &Path) -> Result<Vec<EditSuggestion>> {
    let text = read_text(path)?;
    parse_suggestion_list(&text).with_context(|| format!("parsing suggestions in {}", path.display()))
}

fn load_table(path: Option<&Path>) -> Result<MagnitudeTable> {
    match path {
        Some(p) => MagnitudeTable::load(p).with_context(|| format!("loading {}", p.display())),
        None => Ok(MagnitudeTable::default()),
    }
}

fn print_json(value: &impl serde::Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Measure { image } => {
            print_json(&measure_attributes(&read_image(&image)?))?;
        }
        Command::Parse { suggestions } => {
            let text = read_text(&suggestions)?;
            let parsed = parse_suggestion_list_spanned(&text)?;
            let items: Vec<_> = parsed
                .iter()
                .map(|s| json!({ "suggestion": s.suggestion, "span": [s.span.start, s.span.end], "text": s.source }))
                .collect();
            print_json(&items)?;
        }
        Command::Validate { file } => match validate_critic_output(&read_text(&file)?) {
            Ok(out) => print_json(&out)?,
            Err(violations) => {
                for v in &violations {
                    eprintln!("{v}");
                }
                print_json(&json!({ "violations": violations }))?;
                return Ok(ExitCode::FAILURE);
            }
        },
        Command::Score { input, edited, gt, suggestions, metric_cmd, config } => {
            let cfg = match config {
                Some(p) => serde_json::from_str(&read_text(&p)?).with_context(|| format!("parsing {}", p.display()))?,
                None => RewardConfig::default(),
            };
            let metric: Box<dyn PerceptualDistance> = match metric_cmd {
                Some(cmd) => Box::new(ExternalMetric::new(cmd)),
                None => Box::new(StructuralDistance::default()),
            };
            let (x, xe, xgt) = (read_image(&input)?, read_image(&edited)?, read_image(&gt)?);
            let breakdown = artist_reward(&x, &xe, &xgt, &read_suggestions(&suggestions)?, &cfg, metric.as_ref())?;
            print_json(&breakdown)?;
        }
        Command::Advantages { rewards } => {
            let values = read_text(&rewards)?
                .lines()
                .filter(|l| !l.trim().is_empty())
                .enumerate()
                .map(|(i, l)| l.trim().parse::<f64>().with_context(|| format!("reward {}: {l:?}", i + 1)))
                .collect::<Result<Vec<f64>>>()?;
            let group = RewardGroup::new(values)?;
            let adv = group_advantages(&group);
            print_json(&json!({
                "advantages": adv.values,
                "degenerate": adv.degenerate,
                "probabilities": reward_to_probability(&group),
            }))?;
        }
        Command::Reference { input, suggestions, out, magnitudes } => {
            let table = load_table(magnitudes.as_deref())?;
            let reference = generate_reference(&read_image(&input)?, &read_suggestions(&suggestions)?, &table)?;
            for s in &reference.skipped {
                eprintln!("skipped {:?}: {}", s.suggestion.to_string(), s.reason);
            }
            write_png16(&out, &reference.image)?;
            print_json(&json!({ "params": reference.params, "skipped": reference.skipped }))?;
        }
        Command::Synth { gt_dir, plan, out, manifest, multi_edit, labels, magnitudes } => {
            let plan = SynthesisPlan::from_json(&read_text(&plan)?)?;
            let table = load_table(magnitudes.as_deref())?;
            let labels: Option<BTreeMap<String, String>> = match (multi_edit, labels) {
                (true, Some(p)) => {
                    Some(serde_json::from_str(&read_text(&p)?).with_context(|| format!("parsing {}", p.display()))?)
                }
                (true, None) => bail!("--multi-edit needs --labels"),
                (false, _) => None,
            };
            let records = synthesize_directory(&gt_dir, &plan, &table, &out, labels.as_ref())?;
            write_manifest(&records, &manifest)?;
            eprintln!("wrote {} samples to {}", records.len(), manifest.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
