//! Provably minimum-size decision set learning.
//!
//! Two phases: exhaustive enumeration of all irreducible rules per class
//! (dual-rail partial MaxSAT with models delivered in nondecreasing size
//! order), then an exact set cover selecting the fewest rules or fewest
//! literals that still cover every positive training example.

pub mod bitset;
pub mod dataset;
pub mod enumerator;
pub mod maxsat;
pub mod model;
pub mod oracle;
pub mod pipeline;
pub mod sat;
pub mod setcover;

pub use dataset::{binarize, parse_csv, BinarizationMap, BinaryDataset, ClassSplit, RawDataset};
pub use enumerator::{enumerate_terms, EnumerateOptions, FeatureLit, Term, TermSet};
pub use maxsat::{CostedModel, PartialInstance};
pub use model::{assemble, DecisionSet, Metrics, Outcome, Prediction, Rule};
pub use pipeline::{learn, learn_binary, LearnConfig, LearnOutcome, PipelineError};
pub use sat::{Lit, SolveOutcome, Solver, Var};
pub use setcover::{
    build_matrix, greedy_cover, reduce, solve_exact, CoverBackend, CoverMatrix, CoverSolution,
    Objective,
};
