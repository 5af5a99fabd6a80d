//! End-to-end learning pipeline: binarize, then per class enumerate
//! irreducible terms, solve the exact cover, and assemble the decision set.
//! Classes run on their own threads; assembly is sequential in class order
//! so output never depends on completion order.

use crate::dataset::{
    self, binarize, BinarizationMap, BinaryDataset, ClassSplit, DatasetError, RawDataset,
};
use crate::enumerator::{self, EnumerateError, EnumerateOptions, Term, TermSet};
use crate::model::{self, ClassStats, DecisionSet, ModelError, ModelStats, Outcome};
use crate::setcover::{self, CoverBackend, CoverError, CoverSolution, Objective};
use std::time::{Duration, Instant};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error("class {class}: {source}")]
    Enumerate {
        class: String,
        source: EnumerateError,
    },
    #[error("class {class}: {source}")]
    Cover { class: String, source: CoverError },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("learned model misclassifies surviving training vector {vector:?} of class '{class}' ({got})")]
    AgreementViolation {
        vector: Vec<bool>,
        class: String,
        got: String,
    },
    #[error("unknown default class '{0}'")]
    UnknownDefaultClass(String),
    #[error("timed out after {elapsed:.1?}; completed classes: {completed:?}")]
    Timeout {
        elapsed: Duration,
        completed: Vec<String>,
    },
}

#[derive(Clone, Debug)]
pub struct LearnConfig {
    pub objective: Objective,
    pub symmetry_breaking: bool,
    pub backend: CoverBackend,
    pub keep_duplicates: bool,
    pub seed: u64,
    pub max_terms: Option<usize>,
    pub timeout: Option<Duration>,
    pub default_class: Option<String>,
}

impl Default for LearnConfig {
    fn default() -> Self {
        LearnConfig {
            objective: Objective::Rules,
            symmetry_breaking: true,
            backend: CoverBackend::BranchBound,
            keep_duplicates: false,
            seed: 0,
            max_terms: None,
            timeout: None,
            default_class: None,
        }
    }
}

/// Timings are reported separately from the model so model files stay
/// byte-identical across runs.
#[derive(Clone, Debug)]
pub struct ClassReport {
    pub class: String,
    pub positives: usize,
    pub negatives: usize,
    pub terms_enumerated: usize,
    pub truncated: bool,
    pub cover_cost: u64,
    pub enumerate_time: Duration,
    pub cover_time: Duration,
}

#[derive(Debug)]
pub struct LearnOutcome {
    pub model: DecisionSet,
    pub reports: Vec<ClassReport>,
    pub dropped_rows: u32,
    pub total_time: Duration,
}

struct ClassResult {
    split: ClassSplit,
    terms: TermSet,
    cover: CoverSolution,
    enumerate_time: Duration,
    cover_time: Duration,
}

/// Deterministic per-class seed derivation.
fn class_seed(seed: u64, class: usize) -> u64 {
    let mut z = seed
        .wrapping_mul(0x9E3779B97F4A7C15)
        .wrapping_add(class as u64 + 1);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z ^ (z >> 31)
}

fn learn_class(
    ds: &BinaryDataset,
    class: usize,
    cfg: &LearnConfig,
    deadline: Option<Instant>,
) -> Result<ClassResult, PipelineError> {
    let split = dataset::resolve_consistency(ds, class, cfg.keep_duplicates);
    let started = Instant::now();

    let (terms, cover, enumerate_time, cover_time) = if split.positives.is_empty() {
        (
            TermSet::new(Vec::new(), class, false),
            CoverSolution {
                selected: Vec::new(),
                cost: 0,
            },
            Duration::ZERO,
            Duration::ZERO,
        )
    } else if split.negatives.is_empty() {
        // Degenerate class: the always-firing empty term is the whole cover.
        let terms = TermSet::new(vec![Term::empty(split.positives.len())], class, false);
        let cost = match cfg.objective {
            Objective::Rules => 1,
            Objective::Literals => 0,
        };
        (
            terms,
            CoverSolution {
                selected: vec![0],
                cost,
            },
            Duration::ZERO,
            Duration::ZERO,
        )
    } else {
        let opts = EnumerateOptions {
            symmetry_breaking: cfg.symmetry_breaking,
            max_terms: cfg.max_terms,
            seed: class_seed(cfg.seed, class),
            deadline,
        };
        let terms = enumerator::enumerate_terms(
            &split.positives,
            &split.negatives,
            ds.num_features,
            class,
            &opts,
        )
        .map_err(|source| PipelineError::Enumerate {
            class: class.to_string(),
            source,
        })?;
        let enumerate_time = started.elapsed();

        let cover_started = Instant::now();
        let matrix = setcover::build_matrix(&terms).map_err(|source| PipelineError::Cover {
            class: class.to_string(),
            source,
        })?;
        let cover = setcover::solve_exact(
            &matrix,
            cfg.objective,
            cfg.backend,
            &setcover::SolveOptions {
                seed: class_seed(cfg.seed, class),
                deadline,
            },
        )
        .map_err(|source| PipelineError::Cover {
            class: class.to_string(),
            source,
        })?;
        (terms, cover, enumerate_time, cover_started.elapsed())
    };

    Ok(ClassResult {
        split,
        terms,
        cover,
        enumerate_time,
        cover_time,
    })
}

/// Learn a decision set from binarized data.
pub fn learn_binary(
    ds: &BinaryDataset,
    map: &BinarizationMap,
    cfg: &LearnConfig,
) -> Result<LearnOutcome, PipelineError> {
    let started = Instant::now();
    let deadline = cfg.timeout.map(|t| started + t);

    let default_class = match &cfg.default_class {
        Some(name) => Some(
            map.class_index(name)
                .ok_or_else(|| PipelineError::UnknownDefaultClass(name.clone()))?,
        ),
        None => None,
    };

    // Classes are independent; run them on scoped threads and collect in
    // class order.
    let results: Vec<Result<ClassResult, PipelineError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..ds.class_count)
            .map(|class| scope.spawn(move || learn_class(ds, class, cfg, deadline)))
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });

    let mut class_results = Vec::with_capacity(results.len());
    for (class, result) in results.into_iter().enumerate() {
        let named = |e: PipelineError| match e {
            PipelineError::Enumerate { source, .. } => PipelineError::Enumerate {
                class: map.classes[class].clone(),
                source,
            },
            PipelineError::Cover { source, .. } => PipelineError::Cover {
                class: map.classes[class].clone(),
                source,
            },
            other => other,
        };
        match result {
            Ok(r) => class_results.push(r),
            Err(e) => {
                let e = named(e);
                if matches!(
                    &e,
                    PipelineError::Enumerate {
                        source: EnumerateError::Timeout,
                        ..
                    } | PipelineError::Cover {
                        source: CoverError::Timeout,
                        ..
                    }
                ) {
                    return Err(PipelineError::Timeout {
                        elapsed: started.elapsed(),
                        completed: class_results
                            .iter()
                            .map(|r| map.classes[r.terms.class_index()].clone())
                            .collect(),
                    });
                }
                return Err(e);
            }
        }
    }

    let per_class: Vec<(TermSet, CoverSolution)> = class_results
        .iter()
        .map(|r| (r.terms.clone(), r.cover.clone()))
        .collect();
    let mut model = model::assemble(&per_class, map.clone())?;
    model.set_default_class(default_class);

    verify_training_agreement(&model, &class_results, map)?;

    let dropped_rows = class_results.first().map_or(0, |r| r.split.dropped);
    let metrics = model.metrics(ds)?;
    let stats = ModelStats {
        objective: cfg.objective.as_str().to_string(),
        symmetry_breaking: cfg.symmetry_breaking,
        seed: cfg.seed,
        rule_count: metrics.rule_count,
        literal_count: metrics.literal_count,
        total_size: metrics.total_size,
        train_accuracy: metrics.train_accuracy,
        per_class: class_results
            .iter()
            .enumerate()
            .map(|(class, r)| ClassStats {
                class: map.classes[class].clone(),
                positives: r.split.positives.len(),
                negatives: r.split.negatives.len(),
                terms_enumerated: r.terms.len(),
                truncated: r.terms.truncated(),
                cover_cost: r.cover.cost,
            })
            .collect(),
    };
    model.set_stats(stats);

    let reports = class_results
        .iter()
        .enumerate()
        .map(|(class, r)| ClassReport {
            class: map.classes[class].clone(),
            positives: r.split.positives.len(),
            negatives: r.split.negatives.len(),
            terms_enumerated: r.terms.len(),
            truncated: r.terms.truncated(),
            cover_cost: r.cover.cost,
            enumerate_time: r.enumerate_time,
            cover_time: r.cover_time,
        })
        .collect();

    Ok(LearnOutcome {
        model,
        reports,
        dropped_rows,
        total_time: started.elapsed(),
    })
}

/// Learn a decision set from raw tabular data.
pub fn learn(raw: &RawDataset, cfg: &LearnConfig) -> Result<LearnOutcome, PipelineError> {
    let (ds, map) = binarize(raw)?;
    learn_binary(&ds, &map, cfg)
}

/// Every surviving training vector must get its majority class back, with
/// no abstention and no ambiguity. Cover completeness guarantees coverage;
/// discrimination guarantees no wrong-class rule fires.
fn verify_training_agreement(
    model: &DecisionSet,
    class_results: &[ClassResult],
    map: &BinarizationMap,
) -> Result<(), PipelineError> {
    for (class, r) in class_results.iter().enumerate() {
        for vector in &r.split.positives {
            let p = model.predict(vector)?;
            // The default class does not apply here: a surviving vector of a
            // learned class must be covered by that class's own rules.
            if p.fired.is_empty() || p.outcome != Outcome::Class(class) {
                return Err(PipelineError::AgreementViolation {
                    vector: vector.clone(),
                    class: map.classes[class].clone(),
                    got: match p.outcome {
                        Outcome::Class(c) => format!("class {}", map.classes[c]),
                        Outcome::Abstain => "abstain".to_string(),
                        Outcome::Ambiguous(cs) => format!(
                            "ambiguous {:?}",
                            cs.iter().map(|&c| &map.classes[c]).collect::<Vec<_>>()
                        ),
                    },
                });
            }
        }
    }
    Ok(())
}
