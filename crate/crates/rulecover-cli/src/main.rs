//! Command-line front end: learn a minimum-size decision set from CSV,
//! then predict, explain, or inspect it.

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rulecover::dataset::{self, RawDataset};
use rulecover::enumerator::{enumerate_terms, EnumerateOptions};
use rulecover::model::{DecisionSet, Outcome};
use rulecover::pipeline::{self, LearnConfig};
use rulecover::setcover::{CoverBackend, Objective};
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

#[derive(Parser)]
#[command(
    name = "rulecover",
    about = "Provably minimum-size decision sets: exhaustive rule enumeration plus exact set cover",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Rules,
    Literals,
}

impl From<ObjectiveArg> for Objective {
    fn from(a: ObjectiveArg) -> Self {
        match a {
            ObjectiveArg::Rules => Objective::Rules,
            ObjectiveArg::Literals => Objective::Literals,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Bnb,
    Maxsat,
}

impl From<BackendArg> for CoverBackend {
    fn from(a: BackendArg) -> Self {
        match a {
            BackendArg::Bnb => CoverBackend::BranchBound,
            BackendArg::Maxsat => CoverBackend::MaxSat,
        }
    }
}

#[derive(Args)]
struct SeedArg {
    /// Seed for all solver randomness; identical seeds reproduce the model
    /// byte for byte.
    #[arg(long, default_value_t = 0, env = "RULECOVER_SEED")]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Learn a decision set from a CSV file (last column is the class).
    Learn {
        input: PathBuf,
        /// Minimize the number of rules or the total number of literals.
        #[arg(long, value_enum, default_value = "rules")]
        objective: ObjectiveArg,
        /// Disable coverage-based symmetry breaking during enumeration.
        #[arg(long)]
        no_symmetry_breaking: bool,
        /// Exact cover backend.
        #[arg(long, value_enum, default_value = "bnb")]
        cover_backend: BackendArg,
        /// Keep duplicate identical rows as separate examples instead of
        /// merging them.
        #[arg(long)]
        keep_duplicates: bool,
        /// Map abstentions to this class at prediction time.
        #[arg(long)]
        default_class: Option<String>,
        /// Stop enumeration after this many terms per class (voids the
        /// optimality guarantee; flagged in the stats).
        #[arg(long)]
        max_terms: Option<usize>,
        /// Abort with partial diagnostics after this many seconds.
        #[arg(long)]
        timeout_s: Option<u64>,
        /// Output model path (default: input with a .model.json suffix).
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Predict classes for a CSV file using a learned model.
    Predict {
        #[arg(long)]
        model: PathBuf,
        data: PathBuf,
        /// Override the model's abstention fallback class.
        #[arg(long)]
        default_class: Option<String>,
    },
    /// Print the fired rules for each row of a CSV file.
    Explain {
        #[arg(long)]
        model: PathBuf,
        data: PathBuf,
    },
    /// Enumerate all irreducible terms for one class and dump them as JSON.
    Enumerate {
        input: PathBuf,
        /// Class to enumerate (by name).
        #[arg(long)]
        class: String,
        #[arg(long)]
        no_symmetry_breaking: bool,
        #[arg(long)]
        keep_duplicates: bool,
        #[arg(long)]
        max_terms: Option<usize>,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Print model metrics, optionally re-scored against a CSV file.
    Stats {
        #[arg(long)]
        model: PathBuf,
        data: Option<PathBuf>,
    },
}

fn main() {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    if let Err(e) = run(&mut out) {
        // A closed pipe downstream (e.g. `| head`) is a normal exit.
        if let Some(ioe) = e.downcast_ref::<io::Error>() {
            if ioe.kind() == io::ErrorKind::BrokenPipe {
                std::process::exit(0);
            }
        }
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn read_csv(path: &Path) -> Result<RawDataset> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(dataset::parse_csv(&text)?)
}

fn read_model(path: &Path) -> Result<DecisionSet> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(DecisionSet::from_json(&text)?)
}

/// Encoded feature rows plus the label column when the file carries one.
type EncodedRows = (Vec<Vec<bool>>, Option<Vec<String>>);

/// Encode data rows through the model's binarization map. Accepts files in
/// the training layout (features + class column) or features only.
fn encode_rows(model: &DecisionSet, raw: &RawDataset) -> Result<EncodedRows> {
    let map = model.map();
    let expected: Vec<&str> = map.columns.iter().map(|c| c.name.as_str()).collect();
    let got: Vec<&str> = raw.feature_names.iter().map(|s| s.as_str()).collect();
    if got != expected {
        bail!(
            "feature columns {:?} do not match the model's {:?}",
            got,
            expected
        );
    }
    let mut rows = Vec::with_capacity(raw.rows.len());
    for (i, (values, _)) in raw.rows.iter().enumerate() {
        rows.push(map.encode_row(values, i + 1)?);
    }
    let labels = if raw.class_name == map.class_feature {
        Some(raw.rows.iter().map(|(_, c)| c.clone()).collect())
    } else {
        None
    };
    Ok((rows, labels))
}

fn outcome_text(model: &DecisionSet, outcome: &Outcome) -> String {
    match outcome {
        Outcome::Class(c) => model.map().classes[*c].clone(),
        Outcome::Abstain => "ABSTAIN".to_string(),
        Outcome::Ambiguous(cs) => {
            let names: Vec<&str> = cs
                .iter()
                .map(|&c| model.map().classes[c].as_str())
                .collect();
            format!("AMBIGUOUS:{}", names.join("|"))
        }
    }
}

fn run(out: &mut impl Write) -> Result<()> {
    match Cli::parse().command {
        Command::Learn {
            input,
            objective,
            no_symmetry_breaking,
            cover_backend,
            keep_duplicates,
            default_class,
            max_terms,
            timeout_s,
            output,
            seed,
        } => {
            let raw = read_csv(&input)?;
            let cfg = LearnConfig {
                objective: objective.into(),
                symmetry_breaking: !no_symmetry_breaking,
                backend: cover_backend.into(),
                keep_duplicates,
                seed: seed.seed,
                max_terms,
                timeout: timeout_s.map(Duration::from_secs),
                default_class,
            };
            let outcome = pipeline::learn(&raw, &cfg)?;
            let model = &outcome.model;

            let out_path = output.unwrap_or_else(|| {
                let mut p = input.clone();
                p.set_extension("model.json");
                p
            });
            fs::write(&out_path, model.to_json())
                .with_context(|| format!("cannot write {}", out_path.display()))?;

            let (ds, map) = dataset::binarize(&raw)?;
            writeln!(out,
                "dataset: {} rows, {} features ({} binary), {} classes, {} dropped by majority vote",
                raw.rows.len(),
                raw.feature_names.len(),
                ds.num_features,
                map.class_count(),
                outcome.dropped_rows
            )?;
            for w in map.dropped_features() {
                writeln!(out, "warning: constant feature '{w}' dropped")?;
            }
            for r in &outcome.reports {
                writeln!(
                    out,
                    "class {}: |pos|={} |neg|={}, {} terms{} in {:.3}s, cover cost {} in {:.3}s",
                    r.class,
                    r.positives,
                    r.negatives,
                    r.terms_enumerated,
                    if r.truncated { " (TRUNCATED)" } else { "" },
                    r.enumerate_time.as_secs_f64(),
                    r.cover_cost,
                    r.cover_time.as_secs_f64()
                )?;
            }
            let s = model.stats();
            writeln!(
                out,
                "model: {} rules, {} literals, total size {}, train accuracy {:.4}",
                s.rule_count, s.literal_count, s.total_size, s.train_accuracy
            )?;
            writeln!(out, "{}", model.render())?;
            writeln!(
                out,
                "wrote {} ({:.3}s total)",
                out_path.display(),
                outcome.total_time.as_secs_f64()
            )?;
        }

        Command::Predict {
            model,
            data,
            default_class,
        } => {
            let mut model = read_model(&model)?;
            if let Some(name) = default_class {
                let idx = model
                    .map()
                    .class_index(&name)
                    .with_context(|| format!("unknown default class '{name}'"))?;
                model.set_default_class(Some(idx));
            }
            let raw = read_csv(&data)?;
            let (rows, labels) = encode_rows(&model, &raw)?;
            writeln!(out, "row,label,prediction,fired")?;
            let mut correct = 0usize;
            for (i, bits) in rows.iter().enumerate() {
                let p = model.predict(bits)?;
                let label = labels
                    .as_ref()
                    .map(|ls| ls[i].as_str())
                    .unwrap_or("")
                    .to_string();
                let text = outcome_text(&model, &p.outcome);
                if !label.is_empty() && text == label {
                    correct += 1;
                }
                writeln!(out, "{},{},{},{}", i + 1, label, text, p.fired.len())?;
            }
            if labels.is_some() {
                eprintln!("{}/{} correct", correct, rows.len());
            }
        }

        Command::Explain { model, data } => {
            let model = read_model(&model)?;
            let raw = read_csv(&data)?;
            let (rows, _) = encode_rows(&model, &raw)?;
            for (i, bits) in rows.iter().enumerate() {
                let fired = model.explain(bits)?;
                if fired.is_empty() {
                    writeln!(out, "row {}: (no rule fires)", i + 1)?;
                } else {
                    for (_, rendered) in fired {
                        writeln!(out, "row {}: {}", i + 1, rendered)?;
                    }
                }
            }
        }

        Command::Enumerate {
            input,
            class,
            no_symmetry_breaking,
            keep_duplicates,
            max_terms,
            seed,
        } => {
            let raw = read_csv(&input)?;
            let (ds, map) = dataset::binarize(&raw)?;
            let class_idx = map
                .class_index(&class)
                .with_context(|| format!("unknown class '{class}'"))?;
            let split = dataset::resolve_consistency(&ds, class_idx, keep_duplicates);
            let terms = enumerate_terms(
                &split.positives,
                &split.negatives,
                ds.num_features,
                class_idx,
                &EnumerateOptions {
                    symmetry_breaking: !no_symmetry_breaking,
                    max_terms,
                    seed: seed.seed,
                    deadline: None,
                },
            )?;
            if terms.truncated() {
                eprintln!(
                    "warning: enumeration truncated at {} terms; optimality guarantees void",
                    terms.len()
                );
            }
            writeln!(out, "{}", serde_json::to_string_pretty(terms.terms())?)?;
        }

        Command::Stats { model, data } => {
            let model = read_model(&model)?;
            let s = model.stats();
            writeln!(out, "classes: {}", model.map().classes.join(", "))?;
            writeln!(out, "rules: {}", model.rule_count())?;
            writeln!(out, "literals: {}", model.literal_count())?;
            writeln!(out, "total size: {}", model.total_size())?;
            if !s.objective.is_empty() {
                writeln!(
                    out,
                    "trained with objective={} symmetry_breaking={} seed={}",
                    s.objective, s.symmetry_breaking, s.seed
                )?;
                writeln!(out, "training accuracy: {:.4}", s.train_accuracy)?;
                for c in &s.per_class {
                    writeln!(
                        out,
                        "class {}: |pos|={} |neg|={}, {} terms{}, cover cost {}",
                        c.class,
                        c.positives,
                        c.negatives,
                        c.terms_enumerated,
                        if c.truncated { " (TRUNCATED)" } else { "" },
                        c.cover_cost
                    )?;
                }
            }
            if let Some(path) = data {
                let raw = read_csv(&path)?;
                let (rows, labels) = encode_rows(&model, &raw)?;
                match labels {
                    Some(labels) => {
                        let mut correct = 0usize;
                        for (bits, label) in rows.iter().zip(&labels) {
                            let p = model.predict(bits)?;
                            if outcome_text(&model, &p.outcome) == *label {
                                correct += 1;
                            }
                        }
                        writeln!(
                            out,
                            "accuracy on {}: {:.4} ({}/{})",
                            path.display(),
                            correct as f64 / rows.len().max(1) as f64,
                            correct,
                            rows.len()
                        )?;
                    }
                    None => writeln!(
                        out,
                        "data file has no matching class column; accuracy skipped"
                    )?,
                }
            }
        }
    }
    Ok(())
}
