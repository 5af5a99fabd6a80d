//! Totalizer cardinality encoding.
//!
//! Builds a balanced counting tree over input literals. Output literal `i`
//! (0-based) is implied whenever at least `i + 1` inputs are true, so
//! asserting its negation caps the count at `i`. Counts are truncated at
//! `cap`, which keeps the encoding linear in `cap * n` clauses while staying
//! arc-consistent for any bound below `cap`.

use super::{Lit, Solver};

#[derive(Debug, Clone)]
pub struct Totalizer {
    outputs: Vec<Lit>,
}

impl Totalizer {
    /// Encode a counter over `inputs` into `solver`, tracking counts up to
    /// `cap`. Duplicate input literals are counted with multiplicity.
    pub fn build(solver: &mut Solver, inputs: &[Lit], cap: usize) -> Totalizer {
        assert!(cap >= 1, "totalizer cap must be at least 1");
        let outputs = if inputs.is_empty() {
            Vec::new()
        } else {
            merge_tree(solver, inputs, cap)
        };
        Totalizer { outputs }
    }

    /// Literal implied when at least `k` inputs are true (`k >= 1`).
    /// `None` when `k` exceeds the tracked range.
    pub fn at_least(&self, k: usize) -> Option<Lit> {
        if k == 0 {
            return None;
        }
        self.outputs.get(k - 1).copied()
    }

    /// Number of count thresholds tracked.
    pub fn tracked(&self) -> usize {
        self.outputs.len()
    }
}

fn merge_tree(solver: &mut Solver, lits: &[Lit], cap: usize) -> Vec<Lit> {
    if lits.len() == 1 {
        return vec![lits[0]];
    }
    let (left, right) = lits.split_at(lits.len() / 2);
    let a = merge_tree(solver, left, cap);
    let b = merge_tree(solver, right, cap);
    let out_len = (a.len() + b.len()).min(cap);
    let outputs: Vec<Lit> = (0..out_len)
        .map(|_| Lit::positive(solver.new_var()))
        .collect();
    // (a_i and b_j) implies out_{i+j}; index 0 on either side means "no
    // contribution from that child".
    for i in 0..=a.len() {
        for j in 0..=b.len() {
            let s = i + j;
            if s == 0 || s > out_len {
                continue;
            }
            let mut cl = Vec::with_capacity(3);
            if i > 0 {
                cl.push(!a[i - 1]);
            }
            if j > 0 {
                cl.push(!b[j - 1]);
            }
            cl.push(outputs[s - 1]);
            solver.add_clause(&cl);
        }
    }
    outputs
}
