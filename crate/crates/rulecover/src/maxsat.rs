//! Partial MaxSAT solving and exhaustive model enumeration in nondecreasing
//! cost order.
//!
//! Soft clauses are unit literals with unit weight; the cost of a model is
//! the number of falsified soft clauses. The search is a lower-bound linear
//! scan: a totalizer counts falsified softs and level `k` solves under the
//! assumption "at most k falsified", so models arrive level by level. Each
//! blocking clause persists in the hard part, as do the solver's learned
//! clauses across levels.

use crate::sat::{Lit, Model, SolveOutcome, Solver, Totalizer, Var};
use std::io::{self, Write};
use std::time::Instant;
use thiserror::Error;

/// A partial CNF formula: hard clauses plus unit soft clauses.
#[derive(Clone, Debug, Default)]
pub struct PartialInstance {
    num_vars: usize,
    hard: Vec<Vec<Lit>>,
    soft: Vec<Lit>,
}

impl PartialInstance {
    pub fn new(num_vars: usize) -> Self {
        PartialInstance {
            num_vars,
            hard: Vec::new(),
            soft: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn hard(&self) -> &[Vec<Lit>] {
        &self.hard
    }

    pub fn soft(&self) -> &[Lit] {
        &self.soft
    }

    pub fn add_hard(&mut self, lits: Vec<Lit>) {
        for l in &lits {
            self.num_vars = self.num_vars.max(l.var().id() as usize);
        }
        self.hard.push(lits);
    }

    /// Add the unit soft clause `(lit)`.
    pub fn add_soft(&mut self, lit: Lit) {
        self.num_vars = self.num_vars.max(lit.var().id() as usize);
        self.soft.push(lit);
    }

    /// WDIMACS dump for external cross-checks. Soft clauses carry weight 1,
    /// hard clauses the top weight.
    pub fn write_wdimacs<W: Write>(&self, w: &mut W) -> io::Result<()> {
        let top = self.soft.len() + 1;
        writeln!(
            w,
            "p wcnf {} {} {}",
            self.num_vars,
            self.hard.len() + self.soft.len(),
            top
        )?;
        for c in &self.hard {
            write!(w, "{top} ")?;
            for l in c {
                write!(w, "{} ", l.to_dimacs())?;
            }
            writeln!(w, "0")?;
        }
        for &l in &self.soft {
            writeln!(w, "1 {} 0", l.to_dimacs())?;
        }
        Ok(())
    }
}

/// A hard-clause model together with its soft-clause cost.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostedModel {
    values: Vec<bool>,
    cost: u32,
}

impl CostedModel {
    pub fn cost(&self) -> u32 {
        self.cost
    }

    pub fn num_vars(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    pub fn value(&self, v: Var) -> bool {
        self.values[v.id() as usize]
    }

    pub fn lit_true(&self, l: Lit) -> bool {
        self.value(l.var()) == l.is_positive()
    }
}

#[derive(Debug, Error)]
pub enum MaxSatError {
    #[error("hard clauses are unsatisfiable")]
    HardUnsat,
    #[error("blocking callback returned no clauses for a delivered model")]
    EmptyBlocking,
    #[error("blocking clause {0:?} is satisfied by the model it should block")]
    BlockingSatisfied(Vec<i32>),
    #[error("blocking clause mentions variable {0} outside the instance universe")]
    BlockingOutOfUniverse(u32),
    #[error("deadline exceeded")]
    Timeout,
}

/// Knobs for the level search.
#[derive(Clone, Debug, Default)]
pub struct SearchOptions {
    pub seed: u64,
    /// Strict upper bound on the optimal cost, when the caller knows one.
    /// Keeps the totalizer small. Must exceed every cost the search can
    /// reach before exhausting; enumeration callers must cap at or above
    /// the maximum achievable cost.
    pub cost_cap: Option<usize>,
    pub deadline: Option<Instant>,
}

/// Clauses to add after a delivered model, and whether to stop enumerating.
#[derive(Clone, Debug, Default)]
pub struct Blocking {
    pub clauses: Vec<Vec<Lit>>,
    pub stop: bool,
}

impl Blocking {
    pub fn clauses(clauses: Vec<Vec<Lit>>) -> Self {
        Blocking {
            clauses,
            stop: false,
        }
    }

    pub fn stop_after(clauses: Vec<Vec<Lit>>) -> Self {
        Blocking {
            clauses,
            stop: true,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EnumerationSummary {
    pub models: usize,
    /// True when the hard part (plus accumulated blocking clauses) became
    /// unsatisfiable; false when the callback stopped the stream early.
    pub exhausted: bool,
    pub last_cost: Option<u32>,
}

struct LevelSearch {
    solver: Solver,
    indicators: Vec<Lit>,
    outputs: Vec<Lit>,
    universe: usize,
}

impl LevelSearch {
    /// Returns `None` when the hard part alone is unsatisfiable.
    fn new(inst: &PartialInstance, opts: &SearchOptions) -> Option<LevelSearch> {
        let mut solver = Solver::with_seed(opts.seed);
        solver.ensure_vars(inst.num_vars);
        for c in &inst.hard {
            solver.add_clause(c);
        }
        if !solver.solve(&[]).is_sat() {
            return None;
        }
        // Falsifying the unit soft clause (l) means making !l true.
        let indicators: Vec<Lit> = inst.soft.iter().map(|&l| !l).collect();
        let cap = inst
            .soft
            .len()
            .min(opts.cost_cap.unwrap_or(inst.soft.len()));
        let outputs = if indicators.is_empty() || cap == 0 {
            Vec::new()
        } else {
            let tot = Totalizer::build(&mut solver, &indicators, cap);
            (1..=tot.tracked())
                .map(|k| tot.at_least(k).unwrap())
                .collect()
        };
        Some(LevelSearch {
            solver,
            indicators,
            outputs,
            universe: inst.num_vars,
        })
    }

    /// Solve under "at most `level` falsified softs". Levels at or beyond
    /// the tracked range run unbounded.
    fn solve_level(&mut self, level: usize) -> SolveOutcome {
        if level < self.outputs.len() {
            self.solver.solve(&[!self.outputs[level]])
        } else {
            self.solver.solve(&[])
        }
    }

    fn final_level(&self, level: usize) -> bool {
        level >= self.outputs.len()
    }

    fn costed(&self, model: &Model) -> CostedModel {
        let cost = self
            .indicators
            .iter()
            .filter(|&&l| model.lit_true(l))
            .count() as u32;
        let mut values = vec![false; self.universe + 1];
        for (v, slot) in values.iter_mut().enumerate().skip(1) {
            *slot = model.value(Var::new(v as u32));
        }
        CostedModel { values, cost }
    }
}

fn check_deadline(opts: &SearchOptions) -> Result<(), MaxSatError> {
    match opts.deadline {
        Some(d) if Instant::now() > d => Err(MaxSatError::Timeout),
        _ => Ok(()),
    }
}

/// Minimum-cost model of the instance, or `HardUnsat`.
pub fn solve_min(inst: &PartialInstance, opts: &SearchOptions) -> Result<CostedModel, MaxSatError> {
    let mut search = LevelSearch::new(inst, opts).ok_or(MaxSatError::HardUnsat)?;
    for level in 0.. {
        check_deadline(opts)?;
        match search.solve_level(level) {
            SolveOutcome::Sat(m) => {
                let cm = search.costed(&m);
                debug_assert!(
                    search.final_level(level) || cm.cost as usize <= level,
                    "level bound violated"
                );
                return Ok(cm);
            }
            SolveOutcome::Unsat => {
                debug_assert!(
                    !search.final_level(level),
                    "hard part satisfiable, unbounded level cannot be UNSAT"
                );
            }
        }
    }
    unreachable!()
}

/// Exhaustively enumerate hard-part models in nondecreasing cost order.
///
/// After each model the callback returns blocking clauses, which are added
/// to the hard part; each must be falsified by the model it blocks (this is
/// what guarantees progress). The stream ends when the hard part becomes
/// unsatisfiable or the callback sets `stop`.
pub fn enumerate_nondecreasing(
    inst: &PartialInstance,
    opts: &SearchOptions,
    mut on_model: impl FnMut(&CostedModel) -> Blocking,
) -> Result<EnumerationSummary, MaxSatError> {
    let mut summary = EnumerationSummary::default();
    let mut search = match LevelSearch::new(inst, opts) {
        Some(s) => s,
        None => {
            summary.exhausted = true;
            return Ok(summary);
        }
    };
    let mut level = 0usize;
    loop {
        check_deadline(opts)?;
        match search.solve_level(level) {
            SolveOutcome::Sat(m) => {
                let cm = search.costed(&m);
                if let Some(prev) = summary.last_cost {
                    debug_assert!(cm.cost >= prev, "cost order violated");
                }
                summary.models += 1;
                summary.last_cost = Some(cm.cost);
                let blocking = on_model(&cm);
                if blocking.clauses.is_empty() && !blocking.stop {
                    return Err(MaxSatError::EmptyBlocking);
                }
                for clause in &blocking.clauses {
                    for l in clause {
                        let id = l.var().id();
                        if id as usize > search.universe {
                            return Err(MaxSatError::BlockingOutOfUniverse(id));
                        }
                    }
                    if clause.iter().any(|&l| cm.lit_true(l)) {
                        return Err(MaxSatError::BlockingSatisfied(
                            clause.iter().map(|l| l.to_dimacs()).collect(),
                        ));
                    }
                    search.solver.add_clause(clause);
                }
                if blocking.stop {
                    return Ok(summary);
                }
            }
            SolveOutcome::Unsat => {
                if search.final_level(level) {
                    summary.exhausted = true;
                    return Ok(summary);
                }
                level += 1;
            }
        }
    }
}
