//! Independent brute-force reference implementations used by tests and
//! derived expected values. These share domain types with the pipeline but
//! none of its algorithms: terms come from exhaustive candidate enumeration,
//! covers from subset enumeration, satisfiability from truth tables.

use crate::bitset::BitSet;
use crate::enumerator::{FeatureLit, Term};
use crate::sat::Lit;
use crate::setcover::{CoverMatrix, Objective};
use thiserror::Error;

/// Input ceilings keeping full oracle suites fast.
pub const MAX_TERM_FEATURES: usize = 12;
pub const MAX_COVER_COLUMNS: usize = 22;
pub const MAX_TRUTHTABLE_VARS: usize = 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("{what} exceeds the oracle limit ({got} > {limit})")]
    LimitExceeded {
        what: &'static str,
        got: usize,
        limit: usize,
    },
}

fn check_limit(what: &'static str, got: usize, limit: usize) -> Result<(), OracleError> {
    if got > limit {
        Err(OracleError::LimitExceeded { what, got, limit })
    } else {
        Ok(())
    }
}

fn discriminates_all(literals: &[FeatureLit], examples: &[Vec<bool>]) -> bool {
    examples
        .iter()
        .all(|e| literals.iter().any(|l| l.discriminates(e)))
}

fn covers_some(literals: &[FeatureLit], examples: &[Vec<bool>]) -> bool {
    examples
        .iter()
        .any(|e| literals.iter().all(|l| !l.discriminates(e)))
}

fn is_valid(literals: &[FeatureLit], positives: &[Vec<bool>], negatives: &[Vec<bool>]) -> bool {
    discriminates_all(literals, negatives) && covers_some(literals, positives)
}

/// Every irreducible valid term, found by walking all 3^K candidate terms
/// and checking all proper subterms of the valid ones.
pub fn all_irreducible_terms(
    positives: &[Vec<bool>],
    negatives: &[Vec<bool>],
    num_features: usize,
) -> Result<Vec<Term>, OracleError> {
    check_limit("feature count", num_features, MAX_TERM_FEATURES)?;
    let mut result = Vec::new();
    // Candidate states per feature: 0 = absent, 1 = positive, 2 = negative.
    let mut state = vec![0u8; num_features];
    loop {
        let literals: Vec<FeatureLit> = state
            .iter()
            .enumerate()
            .filter(|(_, &s)| s != 0)
            .map(|(r, &s)| FeatureLit::new(r, s == 1))
            .collect();
        if is_valid(&literals, positives, negatives) {
            let mut irreducible = true;
            'subsets: for mask in 0u32..(1u32 << literals.len()) {
                if mask == (1u32 << literals.len()) - 1 {
                    continue; // the term itself
                }
                let sub: Vec<FeatureLit> = literals
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, &l)| l)
                    .collect();
                if is_valid(&sub, positives, negatives) {
                    irreducible = false;
                    break 'subsets;
                }
            }
            if irreducible {
                let mut coverage = BitSet::new(positives.len());
                for (i, e) in positives.iter().enumerate() {
                    if literals.iter().all(|l| !l.discriminates(e)) {
                        coverage.insert(i);
                    }
                }
                result.push(Term::new(literals, coverage));
            }
        }
        // Next candidate in ternary counting order.
        let mut i = 0;
        loop {
            if i == num_features {
                return Ok(result);
            }
            state[i] += 1;
            if state[i] < 3 {
                break;
            }
            state[i] = 0;
            i += 1;
        }
    }
}

/// Exact minimum cover cost by enumerating all 2^L column subsets.
pub fn min_cover_bruteforce(m: &CoverMatrix, objective: Objective) -> Result<u64, OracleError> {
    let n = m.num_columns();
    check_limit("column count", n, MAX_COVER_COLUMNS)?;
    // Subset DP over the low bit: union and weight of `mask` extend
    // `mask & (mask - 1)`.
    let mut best = u64::MAX;
    let mut union: Vec<BitSet> = Vec::with_capacity(1 << n);
    let mut weight: Vec<u64> = Vec::with_capacity(1 << n);
    union.push(BitSet::new(m.num_rows()));
    weight.push(0);
    for mask in 1usize..(1 << n) {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        let mut u = union[rest].clone();
        u.union_with(m.column(low));
        let w = weight[rest] + m.effective_weight(low, objective);
        if u.is_full() {
            best = best.min(w);
        }
        union.push(u);
        weight.push(w);
    }
    Ok(best)
}

/// Exhaustive truth-table evaluation: satisfiability plus model count.
pub fn sat_truthtable(num_vars: usize, clauses: &[Vec<Lit>]) -> Result<(bool, u64), OracleError> {
    check_limit("variable count", num_vars, MAX_TRUTHTABLE_VARS)?;
    let mut count = 0u64;
    for mask in 0u64..(1u64 << num_vars) {
        let holds = |l: &Lit| {
            let bit = mask & (1 << (l.var().id() - 1)) != 0;
            bit == l.is_positive()
        };
        if clauses.iter().all(|c| c.iter().any(holds)) {
            count += 1;
        }
    }
    Ok((count > 0, count))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn lits(t: &Term) -> Vec<(usize, bool)> {
        t.literals()
            .iter()
            .map(|l| (l.feature, l.positive))
            .collect()
    }

    #[test]
    fn date_positive_class_terms() {
        let e1 = vec![false, true, true, false];
        let e2 = vec![true, false, true, false];
        let e4 = vec![true, false, false, true];
        let terms = all_irreducible_terms(&[e2], &[e1, e4], 4).unwrap();
        let got: HashSet<Vec<(usize, bool)>> = terms.iter().map(lits).collect();
        let expected: HashSet<Vec<(usize, bool)>> = [
            vec![(0, true), (2, true)],
            vec![(0, true), (3, false)],
            vec![(1, false), (2, true)],
            vec![(1, false), (3, false)],
        ]
        .into_iter()
        .collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn date_negative_class_terms() {
        let e1 = vec![false, true, true, false];
        let e2 = vec![true, false, true, false];
        let e4 = vec![true, false, false, true];
        let terms = all_irreducible_terms(&[e1, e4], &[e2], 4).unwrap();
        let got: HashSet<Vec<(usize, bool)>> = terms.iter().map(lits).collect();
        let expected: HashSet<Vec<(usize, bool)>> = [
            vec![(0, false)],
            vec![(1, true)],
            vec![(2, false)],
            vec![(3, true)],
        ]
        .into_iter()
        .collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn no_negatives_leaves_only_the_empty_term() {
        let terms = all_irreducible_terms(&[vec![true], vec![false]], &[], 1).unwrap();
        assert_eq!(terms.len(), 1);
        assert!(terms[0].literals().is_empty());
    }

    #[test]
    fn limits_are_enforced() {
        assert!(matches!(
            all_irreducible_terms(&[], &[], 13),
            Err(OracleError::LimitExceeded { .. })
        ));
        assert!(matches!(
            sat_truthtable(21, &[]),
            Err(OracleError::LimitExceeded { .. })
        ));
    }

    #[test]
    fn date_cover_minimums() {
        let pos = CoverMatrix::new(
            2,
            vec![
                BitSet::from_indices(2, &[0, 1]),
                BitSet::from_indices(2, &[0, 1]),
                BitSet::from_indices(2, &[0, 1]),
                BitSet::from_indices(2, &[0, 1]),
            ],
            vec![2, 2, 2, 2],
        );
        assert_eq!(min_cover_bruteforce(&pos, Objective::Rules).unwrap(), 1);
        assert_eq!(min_cover_bruteforce(&pos, Objective::Literals).unwrap(), 2);
        let neg = CoverMatrix::new(
            2,
            vec![
                BitSet::from_indices(2, &[0]),
                BitSet::from_indices(2, &[0]),
                BitSet::from_indices(2, &[1]),
                BitSet::from_indices(2, &[1]),
            ],
            vec![1, 1, 1, 1],
        );
        assert_eq!(min_cover_bruteforce(&neg, Objective::Rules).unwrap(), 2);
    }

    #[test]
    fn all_ones_single_row_costs_one() {
        let m = CoverMatrix::new(
            1,
            vec![BitSet::from_indices(1, &[0]), BitSet::from_indices(1, &[0])],
            vec![3, 2],
        );
        assert_eq!(min_cover_bruteforce(&m, Objective::Rules).unwrap(), 1);
        assert_eq!(min_cover_bruteforce(&m, Objective::Literals).unwrap(), 2);
    }

    #[test]
    fn truth_table_counts_models() {
        let l = Lit::from_dimacs;
        // (x1 or x2) has 3 models over 2 vars.
        let (sat, count) = sat_truthtable(2, &[vec![l(1), l(2)]]).unwrap();
        assert!(sat);
        assert_eq!(count, 3);
        let (sat, count) = sat_truthtable(1, &[vec![l(1)], vec![l(-1)]]).unwrap();
        assert!(!sat);
        assert_eq!(count, 0);
    }
}
