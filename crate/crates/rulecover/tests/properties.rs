//! Property tests for the spec-level invariants that hold on arbitrary
//! inputs, with brute-force oracles as the reference.

mod common;

use proptest::collection::vec;
use proptest::prelude::*;
use rulecover::bitset::BitSet;
use rulecover::dataset::{resolve_consistency, BinaryDataset};
use rulecover::enumerator::{enumerate_terms, EnumerateOptions, FeatureLit, Term};
use rulecover::oracle;
use rulecover::sat::{Lit, Solver};
use rulecover::setcover::{solve_exact, CoverBackend, CoverMatrix, Objective};

fn lit_strategy(num_vars: usize) -> impl Strategy<Value = Lit> {
    (1..=num_vars as i32, any::<bool>())
        .prop_map(|(v, pos)| Lit::from_dimacs(if pos { v } else { -v }))
}

fn cnf_strategy(num_vars: usize) -> impl Strategy<Value = Vec<Vec<Lit>>> {
    vec(vec(lit_strategy(num_vars), 1..4), 0..12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The solver agrees with the truth table on satisfiability, and any
    /// model it returns satisfies every clause.
    #[test]
    fn solver_matches_truth_table(cnf in cnf_strategy(6), seed in 0u64..8) {
        let (expected_sat, _) = oracle::sat_truthtable(6, &cnf).unwrap();
        let mut s = Solver::with_seed(seed);
        s.ensure_vars(6);
        for c in &cnf {
            s.add_clause(c);
        }
        match s.solve(&[]) {
            rulecover::SolveOutcome::Sat(m) => {
                prop_assert!(expected_sat);
                for c in &cnf {
                    prop_assert!(c.iter().any(|&l| m.lit_true(l)));
                }
            }
            rulecover::SolveOutcome::Unsat => prop_assert!(!expected_sat),
        }
    }

    /// Consistency resolution partitions the distinct vectors: for every
    /// vector and every target class, it lands in exactly one of the two
    /// splits, and the same side regardless of duplicates order.
    #[test]
    fn resolution_partitions_vectors(
        rows in vec((vec(any::<bool>(), 3), 0usize..2), 1..20)
    ) {
        let ds = BinaryDataset {
            num_features: 3,
            examples: rows,
            class_count: 2,
        };
        let distinct: std::collections::HashSet<Vec<bool>> =
            ds.examples.iter().map(|(v, _)| v.clone()).collect();
        for target in 0..2 {
            let split = resolve_consistency(&ds, target, false);
            prop_assert_eq!(
                split.positives.len() + split.negatives.len(),
                distinct.len()
            );
            for v in &distinct {
                let in_pos = split.positives.contains(v);
                let in_neg = split.negatives.contains(v);
                prop_assert!(in_pos ^ in_neg);
            }
        }
        // Both targets assign each vector consistently: positive for
        // exactly one of the two classes.
        let p0 = resolve_consistency(&ds, 0, false);
        let p1 = resolve_consistency(&ds, 1, false);
        for v in &distinct {
            prop_assert!(p0.positives.contains(v) ^ p1.positives.contains(v));
        }
    }

    /// Exact covers are feasible and never beat the subset-enumeration
    /// minimum; both backends agree.
    #[test]
    fn exact_cover_is_optimal_and_feasible(
        raw_cols in vec((vec(any::<bool>(), 5), 1u32..4), 1..9),
        objective in prop_oneof![Just(Objective::Rules), Just(Objective::Literals)],
    ) {
        let rows = 5;
        let mut columns: Vec<BitSet> = raw_cols
            .iter()
            .map(|(bits, _)| {
                let idx: Vec<usize> = bits
                    .iter()
                    .enumerate()
                    .filter(|(_, &b)| b)
                    .map(|(i, _)| i)
                    .collect();
                BitSet::from_indices(rows, &idx)
            })
            .collect();
        for r in 0..rows {
            if !columns.iter().any(|c| c.contains(r)) {
                columns[0].insert(r);
            }
        }
        let weights: Vec<u32> = raw_cols.iter().map(|(_, w)| *w).collect();
        let m = CoverMatrix::new(rows, columns, weights);
        let expected = oracle::min_cover_bruteforce(&m, objective).unwrap();
        let bnb = solve_exact(&m, objective, CoverBackend::BranchBound, &Default::default()).unwrap();
        let msat = solve_exact(&m, objective, CoverBackend::MaxSat, &Default::default()).unwrap();
        prop_assert_eq!(bnb.cost, expected);
        prop_assert_eq!(&bnb.selected, &msat.selected);
        prop_assert!(bnb.covers_all(&m));
        prop_assert_eq!(bnb.recompute_cost(&m, objective), bnb.cost);
    }

    /// Every enumerated term is irreducible: no proper subterm still
    /// discriminates all negatives while covering a positive.
    #[test]
    fn enumerated_terms_are_irreducible(seed in 0u64..48) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let ds = common::random_dataset(&mut rng, 6, 16);
        for class in 0..2 {
            let (pos, neg) = common::class_split(&ds, class);
            let ts = enumerate_terms(
                &pos,
                &neg,
                ds.num_features,
                class,
                &EnumerateOptions { symmetry_breaking: false, seed, ..Default::default() },
            )
            .unwrap();
            for t in ts.terms() {
                let lits = t.literals();
                for drop in 0..lits.len() {
                    let sub: Vec<FeatureLit> = lits
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| *i != drop)
                        .map(|(_, &l)| l)
                        .collect();
                    let discriminates_all = neg
                        .iter()
                        .all(|e| sub.iter().any(|l| l.discriminates(e)));
                    let covers_some = pos
                        .iter()
                        .any(|e| sub.iter().all(|l| !l.discriminates(e)));
                    prop_assert!(
                        !(discriminates_all && covers_some),
                        "reducible term {t:?}"
                    );
                }
            }
        }
    }

    /// Term JSON round-trips through the dump schema.
    #[test]
    fn term_serialization_round_trips(
        lits in proptest::collection::btree_map(0usize..8, any::<bool>(), 0..5),
        cov in vec(0usize..6, 0..6),
    ) {
        let literals: Vec<FeatureLit> = lits
            .into_iter()
            .map(|(f, p)| FeatureLit::new(f, p))
            .collect();
        let width = cov.iter().max().map_or(0, |m| m + 1);
        let term = Term::new(literals, BitSet::from_indices(width, &cov));
        let json = serde_json::to_string(&term).unwrap();
        let back: Term = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back.literals(), term.literals());
        prop_assert_eq!(back.coverage().indices(), term.coverage().indices());
    }
}
