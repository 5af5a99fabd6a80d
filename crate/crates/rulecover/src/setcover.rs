//! Exact minimum-cost set cover over enumerated terms.
//!
//! Columns are term coverages, rows are positive examples. The objective is
//! either the number of selected columns (rule count) or the weighted sum of
//! column sizes (literal count). Classical optimum-preserving reductions run
//! first, then a branch-and-bound or MaxSAT backend certifies the optimal
//! cost, and a deterministic completion pass extracts the lexicographically
//! smallest optimal selection so equal-cost ties never depend on the backend.

use crate::bitset::BitSet;
use crate::enumerator::TermSet;
use crate::maxsat::{self, PartialInstance, SearchOptions};
use crate::sat::Lit;
use std::io::{self, Write};
use std::time::Instant;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Objective {
    /// Minimize the number of selected terms.
    Rules,
    /// Minimize the total number of literals over selected terms.
    Literals,
}

impl Objective {
    pub fn as_str(self) -> &'static str {
        match self {
            Objective::Rules => "rules",
            Objective::Literals => "literals",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoverBackend {
    BranchBound,
    MaxSat,
}

impl CoverBackend {
    pub fn as_str(self) -> &'static str {
        match self {
            CoverBackend::BranchBound => "bnb",
            CoverBackend::MaxSat => "maxsat",
        }
    }
}

#[derive(Debug, Error)]
pub enum CoverError {
    #[error("term set is empty")]
    EmptyTermSet,
    #[error("row {0} is not covered by any column")]
    UncoveredRow(usize),
    #[error("column {0} has zero weight")]
    ZeroWeightColumn(usize),
    #[error("deadline exceeded")]
    Timeout,
    #[error("cover maxsat backend failed: {0}")]
    Backend(#[from] maxsat::MaxSatError),
}

/// Boolean coverage matrix with per-column weights (term sizes).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverMatrix {
    num_rows: usize,
    columns: Vec<BitSet>,
    weights: Vec<u32>,
}

impl CoverMatrix {
    pub fn new(num_rows: usize, columns: Vec<BitSet>, weights: Vec<u32>) -> CoverMatrix {
        assert_eq!(columns.len(), weights.len());
        for c in &columns {
            assert_eq!(c.width(), num_rows);
        }
        CoverMatrix {
            num_rows,
            columns,
            weights,
        }
    }

    pub fn num_rows(&self) -> usize {
        self.num_rows
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &BitSet {
        &self.columns[j]
    }

    pub fn weight(&self, j: usize) -> u32 {
        self.weights[j]
    }

    pub fn covers(&self, j: usize, row: usize) -> bool {
        self.columns[j].contains(row)
    }

    /// Per-column cost under the given objective.
    pub fn effective_weight(&self, j: usize, objective: Objective) -> u64 {
        match objective {
            Objective::Rules => 1,
            Objective::Literals => self.weights[j] as u64,
        }
    }

    fn validate(&self) -> Result<(), CoverError> {
        if self.columns.is_empty() {
            return Err(CoverError::EmptyTermSet);
        }
        for (j, w) in self.weights.iter().enumerate() {
            if *w == 0 {
                return Err(CoverError::ZeroWeightColumn(j));
            }
        }
        for row in 0..self.num_rows {
            if !self.columns.iter().any(|c| c.contains(row)) {
                return Err(CoverError::UncoveredRow(row));
            }
        }
        Ok(())
    }

    /// Plain text dump: header `L M'`, then M' rows of 0/1, then weights.
    pub fn write_text<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "{} {}", self.num_columns(), self.num_rows)?;
        for row in 0..self.num_rows {
            let line: Vec<&str> = self
                .columns
                .iter()
                .map(|c| if c.contains(row) { "1" } else { "0" })
                .collect();
            writeln!(w, "{}", line.join(" "))?;
        }
        let ws: Vec<String> = self.weights.iter().map(|x| x.to_string()).collect();
        writeln!(w, "{}", ws.join(" "))
    }
}

/// Cover matrix of a term set: columns are coverages, weights are sizes.
pub fn build_matrix(terms: &TermSet) -> Result<CoverMatrix, CoverError> {
    if terms.is_empty() {
        return Err(CoverError::EmptyTermSet);
    }
    let num_rows = terms.terms()[0].coverage().width();
    let columns: Vec<BitSet> = terms.terms().iter().map(|t| t.coverage().clone()).collect();
    let weights: Vec<u32> = terms.terms().iter().map(|t| t.size() as u32).collect();
    let m = CoverMatrix::new(num_rows, columns, weights);
    for row in 0..m.num_rows {
        if !m.columns.iter().any(|c| c.contains(row)) {
            return Err(CoverError::UncoveredRow(row));
        }
    }
    Ok(m)
}

/// A selected column set together with its objective value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverSolution {
    pub selected: Vec<usize>,
    pub cost: u64,
}

impl CoverSolution {
    pub fn covers_all(&self, m: &CoverMatrix) -> bool {
        let mut covered = BitSet::new(m.num_rows());
        for &j in &self.selected {
            covered.union_with(m.column(j));
        }
        covered.is_full()
    }

    pub fn recompute_cost(&self, m: &CoverMatrix, objective: Objective) -> u64 {
        self.selected
            .iter()
            .map(|&j| m.effective_weight(j, objective))
            .sum()
    }
}

/// Result of optimum-preserving preprocessing.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub matrix: CoverMatrix,
    /// Columns (original indices) present in every optimal cover.
    pub forced: Vec<usize>,
    /// Reduced column index -> original column index.
    pub column_map: Vec<usize>,
}

/// Apply reductions until fixpoint:
/// (a/b) a column is deleted when another column covers at least as much for
/// a strictly smaller weight, or for equal weight with a smaller index (the
/// index condition keeps the lexicographic tie-break intact);
/// (c) a row covered by exactly one column forces that column;
/// (d) a row is deleted when covering some other row necessarily covers it.
#[allow(clippy::needless_range_loop)] // parallel liveness arrays read clearer indexed
pub fn reduce(m: &CoverMatrix, objective: Objective) -> Result<Reduction, CoverError> {
    m.validate()?;
    let n_cols = m.num_columns();
    let n_rows = m.num_rows();
    let mut col_live = vec![true; n_cols];
    let mut row_live = vec![true; n_rows];
    let mut forced: Vec<usize> = Vec::new();
    let eff = |j: usize| m.effective_weight(j, objective);

    loop {
        let mut changed = false;

        // Current covering-column set of each live row, over live columns.
        let row_cols: Vec<BitSet> = (0..n_rows)
            .map(|r| {
                let mut s = BitSet::new(n_cols);
                if row_live[r] {
                    for j in 0..n_cols {
                        if col_live[j] && m.covers(j, r) {
                            s.insert(j);
                        }
                    }
                }
                s
            })
            .collect();

        // (d) row dominance: drop r when cols(r') is a subset of cols(r).
        for r in 0..n_rows {
            if !row_live[r] {
                continue;
            }
            for r2 in 0..n_rows {
                if r2 == r || !row_live[r2] {
                    continue;
                }
                let strict = row_cols[r2] != row_cols[r];
                if row_cols[r2].is_subset(&row_cols[r]) && (strict || r2 < r) {
                    row_live[r] = false;
                    changed = true;
                    break;
                }
            }
        }

        // Column coverage restricted to live rows.
        let live_cov = |j: usize| {
            let mut s = BitSet::new(n_rows);
            for r in m.column(j).iter() {
                if row_live[r] {
                    s.insert(r);
                }
            }
            s
        };
        let covs: Vec<BitSet> = (0..n_cols).map(live_cov).collect();

        // (a/b) column dominance, restricted so the lexicographically
        // smallest optimum always survives.
        for j in 0..n_cols {
            if !col_live[j] {
                continue;
            }
            if covs[j].is_empty() {
                col_live[j] = false;
                changed = true;
                continue;
            }
            for j2 in 0..n_cols {
                if j2 == j || !col_live[j2] {
                    continue;
                }
                if covs[j].is_subset(&covs[j2])
                    && (eff(j2) < eff(j) || (eff(j2) == eff(j) && j2 < j))
                {
                    col_live[j] = false;
                    changed = true;
                    break;
                }
            }
        }

        // (c) singleton rows force their column.
        for r in 0..n_rows {
            if !row_live[r] {
                continue;
            }
            let covering: Vec<usize> = (0..n_cols)
                .filter(|&j| col_live[j] && m.covers(j, r))
                .collect();
            match covering.len() {
                0 => return Err(CoverError::UncoveredRow(r)),
                1 => {
                    let j = covering[0];
                    forced.push(j);
                    col_live[j] = false;
                    for r2 in m.column(j).iter() {
                        row_live[r2] = false;
                    }
                    changed = true;
                }
                _ => {}
            }
        }

        if !changed {
            break;
        }
    }

    // Assemble the residual matrix over live rows and columns.
    let live_rows: Vec<usize> = (0..n_rows).filter(|&r| row_live[r]).collect();
    let row_index: Vec<Option<usize>> = {
        let mut v = vec![None; n_rows];
        for (new, &old) in live_rows.iter().enumerate() {
            v[old] = Some(new);
        }
        v
    };
    let mut column_map = Vec::new();
    let mut columns = Vec::new();
    let mut weights = Vec::new();
    for j in 0..n_cols {
        if !col_live[j] {
            continue;
        }
        let mut cov = BitSet::new(live_rows.len());
        for r in m.column(j).iter() {
            if let Some(new) = row_index[r] {
                cov.insert(new);
            }
        }
        if cov.is_empty() {
            continue;
        }
        column_map.push(j);
        columns.push(cov);
        weights.push(m.weight(j));
    }
    forced.sort_unstable();
    Ok(Reduction {
        matrix: CoverMatrix::new(live_rows.len(), columns, weights),
        forced,
        column_map,
    })
}

/// Feasible cover by the classic ratio greedy: repeatedly take the column
/// minimizing weight per newly covered row.
pub fn greedy_cover(m: &CoverMatrix, objective: Objective) -> CoverSolution {
    let mut covered = BitSet::new(m.num_rows());
    let mut selected = Vec::new();
    let mut cost = 0u64;
    while !covered.is_full() {
        let mut best: Option<(u64, u64, usize)> = None; // (w * SCALE / new, w, j)
        for j in 0..m.num_columns() {
            if selected.contains(&j) {
                continue;
            }
            let mut fresh = m.column(j).clone();
            fresh.difference_with(&covered);
            let new = fresh.count() as u64;
            if new == 0 {
                continue;
            }
            let w = m.effective_weight(j, objective);
            let ratio = w * 1_000_000 / new;
            let key = (ratio, w, j);
            if best.is_none_or(|b| key < b) {
                best = Some(key);
            }
        }
        let (_, w, j) = best.expect("validated matrix always has a cover");
        selected.push(j);
        cost += w;
        covered.union_with(m.column(j));
    }
    selected.sort_unstable();
    CoverSolution { selected, cost }
}

#[derive(Clone, Debug, Default)]
pub struct SolveOptions {
    pub seed: u64,
    pub deadline: Option<Instant>,
}

/// Precomputed per-row covering-column bitsets.
fn row_cover_sets(m: &CoverMatrix) -> Vec<BitSet> {
    (0..m.num_rows())
        .map(|r| {
            let mut s = BitSet::new(m.num_columns());
            for j in 0..m.num_columns() {
                if m.covers(j, r) {
                    s.insert(j);
                }
            }
            s
        })
        .collect()
}

/// Packing lower bound: greedily collect rows whose available covering
/// columns are pairwise disjoint; any cover pays at least each such row's
/// cheapest column.
#[allow(clippy::needless_range_loop)]
fn packing_bound(
    m: &CoverMatrix,
    objective: Objective,
    row_cols: &[BitSet],
    covered: &BitSet,
    available: &BitSet,
) -> u64 {
    let mut used = BitSet::new(m.num_columns());
    let mut bound = 0u64;
    for r in 0..m.num_rows() {
        if covered.contains(r) {
            continue;
        }
        let mut avail = row_cols[r].clone();
        avail.intersect_with(available);
        if avail.is_empty() || avail.intersects(&used) {
            continue;
        }
        let cheapest = avail
            .iter()
            .map(|j| m.effective_weight(j, objective))
            .min()
            .unwrap();
        bound += cheapest;
        used.union_with(&avail);
    }
    bound
}

struct BranchBound<'a> {
    m: &'a CoverMatrix,
    objective: Objective,
    row_cols: Vec<BitSet>,
    best: u64,
    deadline: Option<Instant>,
    nodes: u64,
}

impl<'a> BranchBound<'a> {
    fn run(
        m: &'a CoverMatrix,
        objective: Objective,
        opts: &SolveOptions,
    ) -> Result<u64, CoverError> {
        let ub = greedy_cover(m, objective).cost;
        let mut bb = BranchBound {
            m,
            objective,
            row_cols: row_cover_sets(m),
            best: ub,
            deadline: opts.deadline,
            nodes: 0,
        };
        let mut available = BitSet::new(m.num_columns());
        for j in 0..m.num_columns() {
            available.insert(j);
        }
        bb.search(BitSet::new(m.num_rows()), &mut available, 0)?;
        Ok(bb.best)
    }

    fn search(
        &mut self,
        covered: BitSet,
        available: &mut BitSet,
        cost: u64,
    ) -> Result<(), CoverError> {
        self.nodes += 1;
        if self.nodes.is_multiple_of(1024) {
            if let Some(d) = self.deadline {
                if Instant::now() > d {
                    return Err(CoverError::Timeout);
                }
            }
        }
        if covered.is_full() {
            self.best = self.best.min(cost);
            return Ok(());
        }
        let lb = packing_bound(self.m, self.objective, &self.row_cols, &covered, available);
        if cost + lb >= self.best {
            return Ok(());
        }

        // Branch on the uncovered row with the fewest available columns.
        let mut branch_row = None;
        let mut fewest = usize::MAX;
        for r in 0..self.m.num_rows() {
            if covered.contains(r) {
                continue;
            }
            let mut avail = self.row_cols[r].clone();
            avail.intersect_with(available);
            let n = avail.count();
            if n == 0 {
                return Ok(()); // infeasible branch
            }
            if n < fewest {
                fewest = n;
                branch_row = Some(r);
            }
        }
        let row = branch_row.expect("some row uncovered");

        // Among its columns, branch on the one covering the most new rows
        // (cheapest first on ties).
        let mut pick = None;
        let mut pick_key = (0i64, u64::MAX, usize::MAX);
        for j in self.row_cols[row].iter() {
            if !available.contains(j) {
                continue;
            }
            let mut fresh = self.m.column(j).clone();
            fresh.difference_with(&covered);
            let key = (
                -(fresh.count() as i64),
                self.m.effective_weight(j, self.objective),
                j,
            );
            if pick.is_none() || key < pick_key {
                pick = Some(j);
                pick_key = key;
            }
        }
        let j = pick.unwrap();

        // Include j.
        let mut with = covered.clone();
        with.union_with(self.m.column(j));
        let w = self.m.effective_weight(j, self.objective);
        if cost + w < self.best {
            self.search(with, available, cost + w)?;
        }
        // Exclude j.
        available.remove(j);
        self.search(covered, available, cost)?;
        available.insert(j);
        Ok(())
    }
}

/// MaxSAT backend: one selector variable per column, a hard clause per row,
/// and soft clauses preferring unselected columns. Literal weights are
/// realized by duplicating the soft unit.
fn maxsat_cost(
    m: &CoverMatrix,
    objective: Objective,
    opts: &SolveOptions,
) -> Result<u64, CoverError> {
    let n = m.num_columns();
    let mut inst = PartialInstance::new(n);
    let selector = |j: usize| Lit::positive(crate::sat::Var::new(j as u32 + 1));
    for r in 0..m.num_rows() {
        let clause: Vec<Lit> = (0..n).filter(|&j| m.covers(j, r)).map(selector).collect();
        inst.add_hard(clause);
    }
    for j in 0..n {
        let copies = match objective {
            Objective::Rules => 1,
            Objective::Literals => m.weight(j),
        };
        for _ in 0..copies {
            inst.add_soft(!selector(j));
        }
    }
    let ub = greedy_cover(m, objective).cost;
    let search = SearchOptions {
        seed: opts.seed,
        cost_cap: Some(ub as usize + 1),
        deadline: opts.deadline,
    };
    let model = maxsat::solve_min(&inst, &search)?;
    Ok(model.cost() as u64)
}

/// Lexicographically smallest selection achieving exactly `target` cost:
/// include-first depth-first search over columns in index order.
fn lex_min_selection(
    m: &CoverMatrix,
    objective: Objective,
    target: u64,
    deadline: Option<Instant>,
) -> Result<Vec<usize>, CoverError> {
    let n = m.num_columns();
    let row_cols = row_cover_sets(m);
    // suffix_cover[j] = union of columns j.. ; used for feasibility pruning.
    let mut suffix_cover = vec![BitSet::new(m.num_rows()); n + 1];
    for j in (0..n).rev() {
        suffix_cover[j] = suffix_cover[j + 1].union(m.column(j));
    }

    struct Ctx<'a> {
        m: &'a CoverMatrix,
        objective: Objective,
        target: u64,
        row_cols: &'a [BitSet],
        suffix_cover: &'a [BitSet],
        deadline: Option<Instant>,
        nodes: u64,
    }

    fn dfs(
        ctx: &mut Ctx,
        j: usize,
        covered: &BitSet,
        cost: u64,
        chosen: &mut Vec<usize>,
    ) -> Result<bool, CoverError> {
        ctx.nodes += 1;
        if ctx.nodes.is_multiple_of(1024) {
            if let Some(d) = ctx.deadline {
                if Instant::now() > d {
                    return Err(CoverError::Timeout);
                }
            }
        }
        if covered.is_full() {
            return Ok(cost == ctx.target);
        }
        if j == ctx.m.num_columns() {
            return Ok(false);
        }
        if !covered.union(&ctx.suffix_cover[j]).is_full() {
            return Ok(false);
        }
        let mut available = BitSet::new(ctx.m.num_columns());
        for jj in j..ctx.m.num_columns() {
            available.insert(jj);
        }
        let lb = packing_bound(ctx.m, ctx.objective, ctx.row_cols, covered, &available);
        if cost + lb > ctx.target {
            return Ok(false);
        }

        // Optimal covers are irredundant, so only include columns that add
        // coverage.
        let mut fresh = ctx.m.column(j).clone();
        fresh.difference_with(covered);
        let w = ctx.m.effective_weight(j, ctx.objective);
        if !fresh.is_empty() && cost + w <= ctx.target {
            let with = covered.union(ctx.m.column(j));
            chosen.push(j);
            if dfs(ctx, j + 1, &with, cost + w, chosen)? {
                return Ok(true);
            }
            chosen.pop();
        }
        dfs(ctx, j + 1, covered, cost, chosen)
    }

    let mut ctx = Ctx {
        m,
        objective,
        target,
        row_cols: &row_cols,
        suffix_cover: &suffix_cover,
        deadline,
        nodes: 0,
    };
    let mut chosen = Vec::new();
    let found = dfs(&mut ctx, 0, &BitSet::new(m.num_rows()), 0, &mut chosen)?;
    assert!(found, "an optimal cover of the certified cost must exist");
    Ok(chosen)
}

/// Globally optimal cover under the chosen objective. Both backends certify
/// the same optimal cost; ties between equal-cost optima break to the
/// lexicographically smallest selected index set.
pub fn solve_exact(
    m: &CoverMatrix,
    objective: Objective,
    backend: CoverBackend,
    opts: &SolveOptions,
) -> Result<CoverSolution, CoverError> {
    m.validate()?;
    let red = reduce(m, objective)?;
    let forced_cost: u64 = red
        .forced
        .iter()
        .map(|&j| m.effective_weight(j, objective))
        .sum();

    let (residual_cost, residual_sel) = if red.matrix.num_rows() == 0 {
        (0, Vec::new())
    } else {
        let cost = match backend {
            CoverBackend::BranchBound => BranchBound::run(&red.matrix, objective, opts)?,
            CoverBackend::MaxSat => maxsat_cost(&red.matrix, objective, opts)?,
        };
        let sel = lex_min_selection(&red.matrix, objective, cost, opts.deadline)?;
        (cost, sel)
    };

    let mut selected: Vec<usize> = red.forced.clone();
    selected.extend(residual_sel.into_iter().map(|j| red.column_map[j]));
    selected.sort_unstable();
    let solution = CoverSolution {
        selected,
        cost: forced_cost + residual_cost,
    };
    debug_assert!(solution.covers_all(m));
    debug_assert_eq!(solution.recompute_cost(m, objective), solution.cost);
    Ok(solution)
}
