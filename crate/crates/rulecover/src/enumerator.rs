//! Dual-rail term encoding and exhaustive enumeration of irreducible terms
//! for one target class.
//!
//! Each feature gets two selector variables: one for "appears positively" in
//! the candidate term and one for "appears negatively", with a hard clause
//! forbidding both at once. Hard clauses force the term to discriminate every
//! negative example and (via per-example coverage indicators) to cover at
//! least one positive example; soft clauses prefer leaving features out, so
//! minimum-cost models are smallest terms. Enumerating models in
//! nondecreasing cost order while blocking each found term together with all
//! its supersets yields exactly the irreducible valid terms.

use crate::bitset::BitSet;
use crate::maxsat::{self, Blocking, CostedModel, MaxSatError, PartialInstance, SearchOptions};
use crate::sat::{Lit, Var};
use serde::de::Error as _;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::HashSet;
use std::time::Instant;
use thiserror::Error;

/// A literal over a Boolean feature: the feature must equal `positive`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeatureLit {
    pub feature: usize,
    pub positive: bool,
}

impl FeatureLit {
    pub fn new(feature: usize, positive: bool) -> Self {
        FeatureLit { feature, positive }
    }

    /// True when the literal falsifies (discriminates) the example.
    pub fn discriminates(&self, example: &[bool]) -> bool {
        example[self.feature] != self.positive
    }
}

impl std::fmt::Debug for FeatureLit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}f{}",
            if self.positive { "" } else { "!" },
            self.feature
        )
    }
}

/// A conjunction of feature literals with its positive-example coverage.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Term {
    literals: Vec<FeatureLit>,
    coverage: BitSet,
}

impl Term {
    /// Literals are sorted by feature; at most one literal per feature.
    pub fn new(mut literals: Vec<FeatureLit>, coverage: BitSet) -> Term {
        literals.sort();
        for pair in literals.windows(2) {
            assert_ne!(pair[0].feature, pair[1].feature, "one literal per feature");
        }
        Term { literals, coverage }
    }

    /// The empty term: fires everywhere, covers every positive example.
    pub fn empty(num_positives: usize) -> Term {
        let mut coverage = BitSet::new(num_positives);
        for i in 0..num_positives {
            coverage.insert(i);
        }
        Term {
            literals: Vec::new(),
            coverage,
        }
    }

    pub fn literals(&self) -> &[FeatureLit] {
        &self.literals
    }

    pub fn size(&self) -> usize {
        self.literals.len()
    }

    pub fn coverage(&self) -> &BitSet {
        &self.coverage
    }

    /// True when no literal discriminates the example.
    pub fn agrees_with(&self, example: &[bool]) -> bool {
        self.literals.iter().all(|l| !l.discriminates(example))
    }

    pub fn is_subterm_of(&self, other: &Term) -> bool {
        self.literals.iter().all(|l| other.literals.contains(l))
    }
}

impl std::fmt::Debug for Term {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.literals.is_empty() {
            write!(f, "(true)")?;
        } else {
            write!(f, "(")?;
            for (i, l) in self.literals.iter().enumerate() {
                if i > 0 {
                    write!(f, " & ")?;
                }
                write!(f, "{l:?}")?;
            }
            write!(f, ")")?;
        }
        write!(f, "@{:?}", self.coverage.indices())
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Term", 3)?;
        let lits: Vec<(usize, u8)> = self
            .literals
            .iter()
            .map(|l| (l.feature, u8::from(l.positive)))
            .collect();
        s.serialize_field("literals", &lits)?;
        s.serialize_field("size", &self.size())?;
        s.serialize_field("coverage", &self.coverage.indices())?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for Term {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            literals: Vec<(usize, u8)>,
            size: usize,
            coverage: Vec<usize>,
        }
        let raw = Raw::deserialize(deserializer)?;
        if raw.size != raw.literals.len() {
            return Err(D::Error::custom("term size does not match literal count"));
        }
        let mut features: Vec<usize> = raw.literals.iter().map(|&(f, _)| f).collect();
        features.sort_unstable();
        features.dedup();
        if features.len() != raw.literals.len() {
            return Err(D::Error::custom("term has two literals on one feature"));
        }
        let width = raw.coverage.iter().max().map_or(0, |m| m + 1);
        let literals = raw
            .literals
            .into_iter()
            .map(|(f, p)| FeatureLit::new(f, p != 0))
            .collect();
        Ok(Term::new(
            literals,
            BitSet::from_indices(width, &raw.coverage),
        ))
    }
}

/// Variable layout of the dual-rail encoding for one class.
#[derive(Clone, Debug)]
pub struct DualRailVars {
    pos: Vec<Var>,
    neg: Vec<Var>,
    cover: Vec<Var>,
}

impl DualRailVars {
    fn new(num_features: usize, num_positives: usize) -> DualRailVars {
        let pos = (0..num_features).map(|r| Var::new(r as u32 + 1)).collect();
        let neg = (0..num_features)
            .map(|r| Var::new((num_features + r) as u32 + 1))
            .collect();
        let cover = (0..num_positives)
            .map(|i| Var::new((2 * num_features + i) as u32 + 1))
            .collect();
        DualRailVars { pos, neg, cover }
    }

    /// Selector for "feature `r` appears positively in the term".
    pub fn positive_rail(&self, r: usize) -> Var {
        self.pos[r]
    }

    /// Selector for "feature `r` appears negatively in the term".
    pub fn negative_rail(&self, r: usize) -> Var {
        self.neg[r]
    }

    /// Indicator for "the term covers positive example `i`".
    pub fn cover_var(&self, i: usize) -> Var {
        self.cover[i]
    }

    pub fn num_features(&self) -> usize {
        self.pos.len()
    }

    pub fn num_positives(&self) -> usize {
        self.cover.len()
    }

    pub fn num_vars(&self) -> usize {
        2 * self.pos.len() + self.cover.len()
    }

    /// The rail literal selecting the given term literal.
    fn rail_lit(&self, l: FeatureLit) -> Lit {
        if l.positive {
            Lit::positive(self.pos[l.feature])
        } else {
            Lit::positive(self.neg[l.feature])
        }
    }

    /// The rail variable that would discriminate `example[r]`: the positive
    /// rail when the example has a 0 there, the negative rail when it has 1.
    fn discriminating_rail(&self, example: &[bool], r: usize) -> Lit {
        if example[r] {
            Lit::positive(self.neg[r])
        } else {
            Lit::positive(self.pos[r])
        }
    }
}

#[derive(Debug, Error)]
pub enum EnumerateError {
    #[error("class has no positive examples")]
    NoPositives,
    #[error("class has no negative examples")]
    NoNegatives,
    #[error("example width {found} differs from feature count {expected}")]
    WidthMismatch { expected: usize, found: usize },
    #[error("positive and negative example sets overlap")]
    OverlappingSplits,
    #[error("model sets both rails of feature {0}")]
    BothRails(usize),
    #[error("encoding unsatisfiable before any term was found; the class splits should make this impossible")]
    Unlearnable,
    #[error("deadline exceeded")]
    Timeout,
    #[error(transparent)]
    MaxSat(MaxSatError),
}

impl From<MaxSatError> for EnumerateError {
    fn from(e: MaxSatError) -> Self {
        match e {
            MaxSatError::Timeout => EnumerateError::Timeout,
            other => EnumerateError::MaxSat(other),
        }
    }
}

fn check_widths(
    positives: &[Vec<bool>],
    negatives: &[Vec<bool>],
    num_features: usize,
) -> Result<(), EnumerateError> {
    for e in positives.iter().chain(negatives) {
        if e.len() != num_features {
            return Err(EnumerateError::WidthMismatch {
                expected: num_features,
                found: e.len(),
            });
        }
    }
    Ok(())
}

/// Build the partial MaxSAT instance whose models are the valid terms for
/// one class: hard clauses forbid double rails, discriminate every negative
/// example, define the per-positive coverage indicators, and require at
/// least one covered positive; soft clauses prefer empty rails.
pub fn build_encoding(
    positives: &[Vec<bool>],
    negatives: &[Vec<bool>],
    num_features: usize,
) -> Result<(PartialInstance, DualRailVars), EnumerateError> {
    if positives.is_empty() {
        return Err(EnumerateError::NoPositives);
    }
    if negatives.is_empty() {
        return Err(EnumerateError::NoNegatives);
    }
    check_widths(positives, negatives, num_features)?;

    let vars = DualRailVars::new(num_features, positives.len());
    let mut inst = PartialInstance::new(vars.num_vars());

    // A feature cannot appear both positively and negatively.
    for r in 0..num_features {
        inst.add_hard(vec![
            Lit::negative(vars.positive_rail(r)),
            Lit::negative(vars.negative_rail(r)),
        ]);
    }
    // Every negative example must be discriminated by some chosen literal.
    for e in negatives {
        inst.add_hard(
            (0..num_features)
                .map(|r| vars.discriminating_rail(e, r))
                .collect(),
        );
    }
    // cover_i holds exactly when no chosen literal discriminates positive i.
    for (i, e) in positives.iter().enumerate() {
        let t = vars.cover_var(i);
        for r in 0..num_features {
            inst.add_hard(vec![Lit::negative(t), !vars.discriminating_rail(e, r)]);
        }
        let mut back: Vec<Lit> = vec![Lit::positive(t)];
        back.extend((0..num_features).map(|r| vars.discriminating_rail(e, r)));
        inst.add_hard(back);
    }
    // The term must cover at least one positive example.
    inst.add_hard(
        (0..positives.len())
            .map(|i| Lit::positive(vars.cover_var(i)))
            .collect(),
    );
    // Prefer to leave every feature out of the term.
    for r in 0..num_features {
        inst.add_soft(Lit::negative(vars.positive_rail(r)));
        inst.add_soft(Lit::negative(vars.negative_rail(r)));
    }
    Ok((inst, vars))
}

/// Read the term and its coverage off a model of the encoding. Coverage
/// comes straight from the indicator variables.
pub fn decode_term(model: &CostedModel, vars: &DualRailVars) -> Result<Term, EnumerateError> {
    let mut literals = Vec::new();
    for r in 0..vars.num_features() {
        let p = model.value(vars.positive_rail(r));
        let n = model.value(vars.negative_rail(r));
        if p && n {
            return Err(EnumerateError::BothRails(r));
        }
        if p || n {
            literals.push(FeatureLit::new(r, p));
        }
    }
    let mut coverage = BitSet::new(vars.num_positives());
    for i in 0..vars.num_positives() {
        if model.value(vars.cover_var(i)) {
            coverage.insert(i);
        }
    }
    Ok(Term::new(literals, coverage))
}

#[derive(Clone, Debug)]
pub struct EnumerateOptions {
    pub symmetry_breaking: bool,
    /// Safety valve; truncation voids the optimality guarantees and is
    /// flagged on the resulting set.
    pub max_terms: Option<usize>,
    pub seed: u64,
    pub deadline: Option<Instant>,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions {
            symmetry_breaking: true,
            max_terms: None,
            seed: 0,
            deadline: None,
        }
    }
}

/// All irreducible terms for one class, in discovery order.
#[derive(Clone, Debug)]
pub struct TermSet {
    terms: Vec<Term>,
    class_index: usize,
    truncated: bool,
}

impl TermSet {
    pub fn new(terms: Vec<Term>, class_index: usize, truncated: bool) -> Self {
        TermSet {
            terms,
            class_index,
            truncated,
        }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn class_index(&self) -> usize {
        self.class_index
    }

    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn sizes_nondecreasing(&self) -> bool {
        self.terms.windows(2).all(|w| w[0].size() <= w[1].size())
    }

    pub fn no_term_contains_an_earlier_one(&self) -> bool {
        for (i, t) in self.terms.iter().enumerate() {
            for earlier in &self.terms[..i] {
                if earlier.is_subterm_of(t) {
                    return false;
                }
            }
        }
        true
    }

    pub fn coverage_union(&self) -> Option<BitSet> {
        let mut it = self.terms.iter();
        let first = it.next()?;
        let mut acc = first.coverage().clone();
        for t in it {
            acc.union_with(t.coverage());
        }
        Some(acc)
    }
}

/// Enumerate every irreducible valid term for one class by exhaustive
/// MaxSAT model enumeration. Each found term is blocked together with all
/// its supersets; with symmetry breaking on, later terms must additionally
/// cover some positive example the found term missed.
pub fn enumerate_terms(
    positives: &[Vec<bool>],
    negatives: &[Vec<bool>],
    num_features: usize,
    class_index: usize,
    opts: &EnumerateOptions,
) -> Result<TermSet, EnumerateError> {
    check_widths(positives, negatives, num_features)?;
    if positives.is_empty() {
        return Ok(TermSet::new(Vec::new(), class_index, false));
    }
    if opts.max_terms == Some(0) {
        return Ok(TermSet::new(Vec::new(), class_index, true));
    }
    if negatives.is_empty() {
        // Nothing to discriminate: the empty term is the single irreducible
        // term and it always fires.
        return Ok(TermSet::new(
            vec![Term::empty(positives.len())],
            class_index,
            false,
        ));
    }
    let pos_set: HashSet<&[bool]> = positives.iter().map(|v| v.as_slice()).collect();
    if negatives.iter().any(|n| pos_set.contains(n.as_slice())) {
        return Err(EnumerateError::OverlappingSplits);
    }

    let (inst, vars) = build_encoding(positives, negatives, num_features)?;
    let search = SearchOptions {
        seed: opts.seed,
        // Cost equals term size, which never exceeds the feature count.
        cost_cap: Some(num_features + 1),
        deadline: opts.deadline,
    };

    let mut terms: Vec<Term> = Vec::new();
    let mut truncated = false;
    let mut decode_failure: Option<EnumerateError> = None;
    let summary = maxsat::enumerate_nondecreasing(&inst, &search, |model| {
        let term = match decode_term(model, &vars) {
            Ok(t) => t,
            Err(e) => {
                decode_failure = Some(e);
                return Blocking::stop_after(vec![]);
            }
        };
        debug_assert_eq!(term.size() as u32, model.cost());
        debug_assert!(!term.coverage().is_empty(), "coverage clause violated");

        // Block this term and every superset of it.
        let block: Vec<Lit> = term.literals().iter().map(|&l| !vars.rail_lit(l)).collect();
        let mut clauses = vec![block];

        let full_coverage = term.coverage().is_full();
        if opts.symmetry_breaking && !full_coverage {
            // Later terms must cover something this one missed.
            clauses.push(
                term.coverage()
                    .missing()
                    .iter()
                    .map(|&i| Lit::positive(vars.cover_var(i)))
                    .collect(),
            );
        }

        terms.push(term);
        let reached_cap = opts.max_terms.is_some_and(|cap| terms.len() >= cap);
        if reached_cap {
            truncated = true;
        }
        let stop = reached_cap || (opts.symmetry_breaking && full_coverage);
        Blocking { clauses, stop }
    })?;
    if let Some(e) = decode_failure {
        return Err(e);
    }
    if summary.models == 0 {
        // Disjoint nonempty splits always admit at least one valid term.
        return Err(EnumerateError::Unlearnable);
    }

    let set = TermSet::new(terms, class_index, truncated);
    debug_assert!(set.sizes_nondecreasing());
    debug_assert!(set.no_term_contains_an_earlier_one());
    Ok(set)
}
