//! Embedded incremental CDCL satisfiability engine.
//!
//! Conflict-driven clause learning with two-watched-literal propagation,
//! first-UIP conflict analysis, activity-based branching with phase saving,
//! and Luby restarts. Clauses may be added between solve calls and each call
//! accepts a list of assumption literals. Behaviour is deterministic for a
//! fixed seed and clause insertion order.

mod heap;
mod totalizer;

pub use totalizer::Totalizer;

use heap::VarHeap;
use std::io::{self, Write};

/// A propositional variable. Ids start at 1.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(u32);

impl Var {
    pub fn new(id: u32) -> Var {
        assert!(id >= 1, "variable ids start at 1");
        Var(id)
    }

    pub fn id(self) -> u32 {
        self.0
    }

    fn index(self) -> usize {
        self.0 as usize
    }
}

impl std::fmt::Debug for Var {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// A literal: a variable or its negation, packed as `id << 1 | negated`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    pub fn positive(v: Var) -> Lit {
        Lit(v.0 << 1)
    }

    pub fn negative(v: Var) -> Lit {
        Lit(v.0 << 1 | 1)
    }

    pub fn new(v: Var, positive: bool) -> Lit {
        if positive {
            Lit::positive(v)
        } else {
            Lit::negative(v)
        }
    }

    /// Build from a DIMACS-style signed integer (nonzero).
    pub fn from_dimacs(x: i32) -> Lit {
        assert!(x != 0);
        Lit::new(Var::new(x.unsigned_abs()), x > 0)
    }

    pub fn to_dimacs(self) -> i32 {
        let v = self.var().id() as i32;
        if self.is_positive() {
            v
        } else {
            -v
        }
    }

    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    fn code(self) -> usize {
        self.0 as usize
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl std::fmt::Debug for Lit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// A total satisfying assignment over the solver's allocated variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model {
    values: Vec<bool>,
}

impl Model {
    pub fn value(&self, v: Var) -> bool {
        self.values[v.index()]
    }

    pub fn lit_true(&self, l: Lit) -> bool {
        self.value(l.var()) == l.is_positive()
    }

    pub fn num_vars(&self) -> usize {
        self.values.len().saturating_sub(1)
    }
}

/// Result of a solve call.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    Sat(Model),
    Unsat,
}

impl SolveOutcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveOutcome::Sat(_))
    }

    pub fn model(&self) -> Option<&Model> {
        match self {
            SolveOutcome::Sat(m) => Some(m),
            SolveOutcome::Unsat => None,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SolverStats {
    pub decisions: u64,
    pub propagations: u64,
    pub conflicts: u64,
    pub restarts: u64,
}

#[derive(Debug)]
struct Clause {
    lits: Vec<Lit>,
    learnt: bool,
}

const VAR_DECAY: f64 = 0.95;
const RESCALE_LIMIT: f64 = 1e100;
const RESTART_BASE: u64 = 100;
const RANDOM_BRANCH_FREQ: f64 = 0.02;

/// Incremental CDCL solver. Single-owner; distinct instances share nothing.
pub struct Solver {
    num_vars: usize,
    clauses: Vec<Clause>,
    /// watches[l.code()] holds indices of clauses in which l is watched.
    watches: Vec<Vec<u32>>,
    assign: Vec<Option<bool>>,
    level: Vec<u32>,
    reason: Vec<Option<u32>>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    act_inc: f64,
    heap: VarHeap,
    phase: Vec<bool>,
    seen: Vec<bool>,
    rng: XorShift64,
    unsat: bool,
    stats: SolverStats,
}

impl Default for Solver {
    fn default() -> Self {
        Self::new()
    }
}

impl Solver {
    pub fn new() -> Solver {
        Solver::with_seed(0)
    }

    pub fn with_seed(seed: u64) -> Solver {
        Solver {
            num_vars: 0,
            clauses: Vec::new(),
            watches: vec![Vec::new(), Vec::new()],
            assign: vec![None],
            level: vec![0],
            reason: vec![None],
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: vec![0.0],
            act_inc: 1.0,
            heap: VarHeap::new(),
            phase: vec![false],
            seen: vec![false],
            rng: XorShift64::new(seed),
            unsat: false,
            stats: SolverStats::default(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn stats(&self) -> &SolverStats {
        &self.stats
    }

    pub fn new_var(&mut self) -> Var {
        self.num_vars += 1;
        self.assign.push(None);
        self.level.push(0);
        self.reason.push(None);
        self.activity.push(0.0);
        self.phase.push(false);
        self.seen.push(false);
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        self.heap.grow(self.num_vars);
        let v = Var(self.num_vars as u32);
        self.heap.insert(v.0, &self.activity);
        v
    }

    /// Allocate variables until `n` exist.
    pub fn ensure_vars(&mut self, n: usize) {
        while self.num_vars < n {
            self.new_var();
        }
    }

    /// Add a clause. An empty literal list puts the solver in a permanent
    /// UNSAT state. Variables above the current count are auto-allocated.
    pub fn add_clause(&mut self, lits: &[Lit]) {
        for l in lits {
            self.ensure_vars(l.var().index());
        }
        self.cancel_until(0);
        if self.unsat {
            return;
        }

        // Root-level simplification: drop falsified literals, skip satisfied
        // clauses and tautologies, reject duplicates.
        let mut simplified: Vec<Lit> = Vec::with_capacity(lits.len());
        for &l in lits {
            match self.lit_value(l) {
                Some(true) => return,
                Some(false) => continue,
                None => {
                    if simplified.contains(&!l) {
                        return;
                    }
                    if !simplified.contains(&l) {
                        simplified.push(l);
                    }
                }
            }
        }

        match simplified.len() {
            0 => self.unsat = true,
            1 => {
                self.enqueue(simplified[0], None);
                if self.propagate().is_some() {
                    self.unsat = true;
                }
            }
            _ => {
                let ci = self.clauses.len() as u32;
                self.watches[simplified[0].code()].push(ci);
                self.watches[simplified[1].code()].push(ci);
                self.clauses.push(Clause {
                    lits: simplified,
                    learnt: false,
                });
            }
        }
    }

    /// CNF cardinality constraint: at most `bound` of `lits` are true.
    /// Totalizer-encoded; arc-consistent under unit propagation.
    pub fn add_atmost(&mut self, lits: &[Lit], bound: usize) {
        if bound >= lits.len() {
            return;
        }
        if bound == 0 {
            for &l in lits {
                self.add_clause(&[!l]);
            }
            return;
        }
        let tot = Totalizer::build(self, lits, bound + 1);
        let over = tot.at_least(bound + 1).expect("cap covers bound + 1");
        self.add_clause(&[!over]);
    }

    fn lit_value(&self, l: Lit) -> Option<bool> {
        self.assign[l.var().index()].map(|v| v == l.is_positive())
    }

    fn decision_level(&self) -> usize {
        self.trail_lim.len()
    }

    fn enqueue(&mut self, l: Lit, reason: Option<u32>) {
        debug_assert!(self.lit_value(l).is_none());
        let v = l.var().index();
        self.assign[v] = Some(l.is_positive());
        self.level[v] = self.decision_level() as u32;
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn cancel_until(&mut self, target: usize) {
        if self.decision_level() <= target {
            return;
        }
        let keep = self.trail_lim[target];
        for i in (keep..self.trail.len()).rev() {
            let v = self.trail[i].var().index();
            self.phase[v] = self.assign[v].unwrap();
            self.assign[v] = None;
            self.reason[v] = None;
            self.heap.insert(v as u32, &self.activity);
        }
        self.trail.truncate(keep);
        self.trail_lim.truncate(target);
        self.qhead = keep;
    }

    /// Unit propagation over the two-watched-literal scheme.
    /// Returns the index of a conflicting clause, if any.
    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;

            let mut ws = std::mem::take(&mut self.watches[false_lit.code()]);
            let mut conflict = None;
            let mut i = 0;
            let mut j = 0;
            'clauses: while i < ws.len() {
                let ci = ws[i];
                i += 1;
                let clause = &mut self.clauses[ci as usize];
                // Keep the falsified watch at position 1.
                if clause.lits[0] == false_lit {
                    clause.lits.swap(0, 1);
                }
                debug_assert_eq!(clause.lits[1], false_lit);
                let first = clause.lits[0];
                let first_val = self.assign[first.var().index()].map(|v| v == first.is_positive());
                if first_val == Some(true) {
                    ws[j] = ci;
                    j += 1;
                    continue;
                }
                for k in 2..clause.lits.len() {
                    let lk = clause.lits[k];
                    let vk = self.assign[lk.var().index()].map(|v| v == lk.is_positive());
                    if vk != Some(false) {
                        clause.lits.swap(1, k);
                        let new_watch = clause.lits[1];
                        self.watches[new_watch.code()].push(ci);
                        continue 'clauses;
                    }
                }
                // No replacement: the clause is unit or conflicting.
                ws[j] = ci;
                j += 1;
                if first_val == Some(false) {
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                    conflict = Some(ci);
                } else {
                    self.enqueue(first, Some(ci));
                }
            }
            ws.truncate(j);
            self.watches[false_lit.code()] = ws;
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    fn bump(&mut self, v: Var) {
        self.activity[v.index()] += self.act_inc;
        if self.activity[v.index()] > RESCALE_LIMIT {
            for a in &mut self.activity {
                *a *= 1.0 / RESCALE_LIMIT;
            }
            self.act_inc *= 1.0 / RESCALE_LIMIT;
        }
        self.heap.on_bump(v.0, &self.activity);
    }

    /// First-UIP conflict analysis. Returns the learnt clause (asserting
    /// literal first) and the backjump level.
    fn analyze(&mut self, mut confl: u32) -> (Vec<Lit>, usize) {
        let mut out: Vec<Lit> = Vec::new();
        let mut path_count = 0u32;
        let mut resolve_lit: Option<Lit> = None;
        let mut idx = self.trail.len();
        let current = self.decision_level() as u32;

        loop {
            let lits = self.clauses[confl as usize].lits.clone();
            let skip = usize::from(resolve_lit.is_some());
            for &q in &lits[skip..] {
                let v = q.var();
                if !self.seen[v.index()] && self.level[v.index()] > 0 {
                    self.seen[v.index()] = true;
                    self.bump(v);
                    if self.level[v.index()] == current {
                        path_count += 1;
                    } else {
                        out.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var().index()] {
                    break;
                }
            }
            let pl = self.trail[idx];
            self.seen[pl.var().index()] = false;
            path_count -= 1;
            resolve_lit = Some(pl);
            if path_count == 0 {
                break;
            }
            confl = self.reason[pl.var().index()].expect("non-UIP literal has a reason");
        }
        out.insert(0, !resolve_lit.unwrap());
        for &q in &out[1..] {
            self.seen[q.var().index()] = false;
        }

        let backjump = if out.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for i in 2..out.len() {
                if self.level[out[i].var().index()] > self.level[out[max_i].var().index()] {
                    max_i = i;
                }
            }
            out.swap(1, max_i);
            self.level[out[1].var().index()] as usize
        };
        (out, backjump)
    }

    fn learn(&mut self, lits: Vec<Lit>) {
        if lits.len() == 1 {
            self.enqueue(lits[0], None);
        } else {
            let ci = self.clauses.len() as u32;
            self.watches[lits[0].code()].push(ci);
            self.watches[lits[1].code()].push(ci);
            let asserting = lits[0];
            self.clauses.push(Clause { lits, learnt: true });
            self.enqueue(asserting, Some(ci));
        }
    }

    fn pick_branch_var(&mut self) -> Option<Var> {
        if self.rng.next_f64() < RANDOM_BRANCH_FREQ && self.num_vars > 0 {
            for _ in 0..8 {
                let v = (self.rng.next_u64() % self.num_vars as u64) as usize + 1;
                if self.assign[v].is_none() {
                    return Some(Var(v as u32));
                }
            }
        }
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.assign[v as usize].is_none() {
                return Some(Var(v));
            }
        }
        debug_assert!(self.assign[1..=self.num_vars].iter().all(|a| a.is_some()));
        None
    }

    fn extract_model(&self) -> Model {
        let mut values = vec![false; self.num_vars + 1];
        for (v, slot) in values.iter_mut().enumerate().skip(1) {
            *slot = self.assign[v].unwrap_or(false);
        }
        Model { values }
    }

    /// Decide satisfiability of the clause database under `assumptions`.
    pub fn solve(&mut self, assumptions: &[Lit]) -> SolveOutcome {
        for l in assumptions {
            self.ensure_vars(l.var().index());
        }
        if self.unsat {
            return SolveOutcome::Unsat;
        }
        self.cancel_until(0);
        if self.propagate().is_some() {
            self.unsat = true;
            return SolveOutcome::Unsat;
        }

        let mut conflicts_since_restart = 0u64;
        let mut restart_round = 1u32;
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                conflicts_since_restart += 1;
                if self.decision_level() == 0 {
                    self.unsat = true;
                    return SolveOutcome::Unsat;
                }
                let (learnt, backjump) = self.analyze(confl);
                self.cancel_until(backjump);
                self.learn(learnt);
                self.act_inc /= VAR_DECAY;
            } else if conflicts_since_restart >= RESTART_BASE * luby(restart_round) {
                self.stats.restarts += 1;
                restart_round += 1;
                conflicts_since_restart = 0;
                self.cancel_until(0);
            } else {
                let dl = self.decision_level();
                if dl < assumptions.len() {
                    let a = assumptions[dl];
                    match self.lit_value(a) {
                        Some(true) => self.trail_lim.push(self.trail.len()),
                        Some(false) => {
                            self.cancel_until(0);
                            return SolveOutcome::Unsat;
                        }
                        None => {
                            self.trail_lim.push(self.trail.len());
                            self.enqueue(a, None);
                        }
                    }
                } else if let Some(v) = self.pick_branch_var() {
                    self.stats.decisions += 1;
                    self.trail_lim.push(self.trail.len());
                    let lit = Lit::new(v, self.phase[v.index()]);
                    self.enqueue(lit, None);
                } else {
                    let model = self.extract_model();
                    self.cancel_until(0);
                    return SolveOutcome::Sat(model);
                }
            }
        }
    }

    /// Dump the problem clauses in DIMACS CNF format. Root-level units
    /// appear as unit clauses; learned clauses are implied and omitted.
    pub fn write_dimacs<W: Write>(&self, w: &mut W) -> io::Result<()> {
        let root_units = if self.trail_lim.is_empty() {
            self.trail.len()
        } else {
            self.trail_lim[0]
        };
        let problem: Vec<&Clause> = self.clauses.iter().filter(|c| !c.learnt).collect();
        let n_clauses = problem.len() + root_units + usize::from(self.unsat);
        writeln!(w, "p cnf {} {}", self.num_vars, n_clauses)?;
        for lit in &self.trail[..root_units] {
            writeln!(w, "{} 0", lit.to_dimacs())?;
        }
        for c in problem {
            for l in &c.lits {
                write!(w, "{} ", l.to_dimacs())?;
            }
            writeln!(w, "0")?;
        }
        if self.unsat {
            writeln!(w, "0")?;
        }
        Ok(())
    }

    #[cfg(test)]
    fn learnt_count(&self) -> usize {
        self.clauses.iter().filter(|c| c.learnt).count()
    }
}

/// Luby restart sequence: 1,1,2,1,1,2,4,...
fn luby(i: u32) -> u64 {
    let mut x = (i - 1) as u64;
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) / 2;
        seq -= 1;
        x %= size;
    }
    1u64 << seq
}

#[derive(Debug)]
struct XorShift64 {
    state: u64,
}

impl XorShift64 {
    fn new(seed: u64) -> XorShift64 {
        // splitmix64 scramble so seed 0 is usable
        let mut z = seed.wrapping_add(0x9E3779B97F4A7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^= z >> 31;
        XorShift64 { state: z | 1 }
    }

    fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.state = x;
        x
    }

    fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}
