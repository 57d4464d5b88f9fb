//! Exact minimization of `c̄` and `ĉ` over grouped invariant decompositions.
//!
//! A candidate decomposition assigns each boundary ray either to a group `G`
//! (the part `B_G = Σ_{ρ∈G} D_ρ / n_ρ`) or to nothing. Groups are disjoint,
//! so the largest admissible weight of a group is the minimum over its rays of
//! `cap_ρ(n) = n·B_ρ − n + 1`, the room left once `(1 − 1/n) D_ρ` is placed.
//!
//! The search is a depth-first branch and bound. The lower bound uses that
//! `k` disjoint group vectors drawn from rays whose classes satisfy `D`
//! independent linear relations span at least `k − D` dimensions, and that each
//! weight is at most 1 (the pair is lc) and at most the remaining coefficients.
//!
//! Ties are broken by enumeration order, which is the lexicographic order of
//! grouping signatures: rays are visited in index order, a group is opened at
//! its smallest ray, partner sets follow increasing bitmask order, orbifold
//! indices ascend lexicographically, and leaving a ray out comes last. The
//! first leaf is the prime decomposition.

use std::collections::HashMap;
use std::sync::RwLock;

use num_traits::{One, Signed, Zero};

use super::{check_pair, ComplexityError, ComplexityReport, Mode, OrbifoldDecomposition, OrbifoldStructure, Part, Setting};
use crate::divisor::InvariantDivisor;
use crate::fan::Fan;
use crate::num::{Int, Rat};
use crate::par;

/// How independent search branches are scheduled. Without the `parallel`
/// feature both variants run sequentially. Results never depend on it.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimizeOptions {
    /// Largest orbifold index considered.
    pub orbifold_cap: u64,
    /// Largest number of candidate rays accepted.
    pub partition_limit: usize,
    pub execution: Execution,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self { orbifold_cap: 12, partition_limit: 12, execution: Execution::default() }
    }
}

pub fn minimize(f: &Fan, b: &InvariantDivisor, mode: &Mode, opts: &MinimizeOptions) -> Result<ComplexityReport, ComplexityError> {
    check_pair(f, b, mode)?;
    let setting = Setting::new(f, mode)?;
    let cands = setting.candidates(b);
    if cands.len() > opts.partition_limit.min(30) {
        return Err(ComplexityError::SearchTooLarge { got: cands.len(), limit: opts.partition_limit.min(30) });
    }
    let prime = OrbifoldDecomposition::prime(b, cands.iter().copied());
    let c = setting.pair_complexity(b);

    let fine_problem = Problem::new(&setting, b, &cands, 1);
    let fine = fine_problem.solve(opts.execution);
    let orb_problem = Problem::new(&setting, b, &cands, opts.orbifold_cap.max(1));
    let orb = orb_problem.solve(opts.execution);

    let fine_dec = fine_problem.decomposition(&fine.groups);
    let orb_dec = orb_problem.decomposition(&orb.groups);
    Ok(ComplexityReport {
        mode: mode.clone(),
        dim: setting.dim,
        class_rank: setting.class_rank,
        c,
        prime,
        c_fine: fine.value,
        fine_span: setting.span_dim(&fine_dec.parts),
        fine: fine_dec,
        c_orb: orb.value,
        orbifold_span: setting.span_dim(&orb_dec.parts),
        orbifold: orb_dec,
        nodes: fine.nodes + orb.nodes,
    })
}

/// Minimizes many pairs. With parallel execution the instances are spread over
/// the pool and each search runs sequentially.
pub fn minimize_batch(
    instances: &[(Fan, InvariantDivisor, Mode)],
    opts: &MinimizeOptions,
) -> Vec<Result<ComplexityReport, ComplexityError>> {
    let inner = MinimizeOptions { execution: Execution::Sequential, ..opts.clone() };
    par::map(instances, opts.execution, |(f, b, m)| minimize(f, b, m, &inner))
}

/// A group: bitmask of candidate positions and the chosen orbifold-option
/// index of each member, in position order.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Group {
    mask: u32,
    options: Vec<usize>,
}

#[derive(Debug, Clone)]
struct Outcome {
    value: Rat,
    groups: Vec<Group>,
    nodes: u64,
}

struct Problem<'a> {
    setting: &'a Setting,
    nrays: usize,
    rays: Vec<usize>,
    coeff: Vec<Rat>,
    classes: Vec<Vec<Rat>>,
    ns: Vec<Vec<u64>>,
    caps: Vec<Vec<Rat>>,
}

impl<'a> Problem<'a> {
    fn new(setting: &'a Setting, b: &InvariantDivisor, cands: &[usize], cap: u64) -> Self {
        let coeff: Vec<Rat> = cands.iter().map(|&r| b.coeff(r).clone()).collect();
        let ns: Vec<Vec<u64>> = coeff.iter().map(|c| allowed_indices(c, cap)).collect();
        let caps = ns
            .iter()
            .zip(&coeff)
            .map(|(opts, c)| {
                opts.iter()
                    .map(|&n| {
                        let n = Rat::from_integer(Int::from(n));
                        &n * c - &n + Rat::one()
                    })
                    .collect()
            })
            .collect();
        Self {
            setting,
            nrays: b.len(),
            rays: cands.to_vec(),
            coeff,
            classes: cands.iter().map(|&r| setting.classes[r].clone()).collect(),
            ns,
            caps,
        }
    }

    fn k(&self) -> usize {
        self.rays.len()
    }

    fn prime_value(&self) -> Rat {
        let sum: Rat = self.coeff.iter().sum();
        let span = Echelon::spanned(self.classes.iter());
        Rat::from_integer(Int::from(self.setting.dim + span)) - sum
    }

    fn prime_groups(&self) -> Vec<Group> {
        (0..self.k()).map(|p| Group { mask: 1 << p, options: vec![0] }).collect()
    }

    fn solve(&self, exec: Execution) -> Outcome {
        let k = self.k();
        let seed = Outcome { value: self.prime_value(), groups: self.prime_groups(), nodes: 1 };
        if k == 0 {
            return seed;
        }
        let root = State::new(k, self.setting.class_rank);
        let branches = self.options(&root);
        let shared = RwLock::new(seed.value.clone());
        let results = par::map(&branches, exec, |opt| {
            let mut s = Searcher { problem: self, shared: &shared, best: seed.clone(), nodes: 0, memo: HashMap::new() };
            s.best.nodes = 0;
            let mut state = root.clone();
            s.apply_and_recurse(&mut state, opt);
            s.best.nodes = s.nodes;
            s.best
        });
        let nodes: u64 = results.iter().map(|r| r.nodes).sum();
        let mut best = seed;
        for r in results {
            if r.value < best.value {
                best = r;
            }
        }
        best.nodes = nodes + 1;
        best
    }

    /// Branch options at a node, in enumeration order.
    fn options(&self, state: &State) -> Vec<Choice> {
        let p = state.unassigned.trailing_zeros() as usize;
        let rest = state.unassigned & !(1u32 << p);
        let mut out = Vec::new();
        let mut sub = 0u32;
        loop {
            let mask = sub | (1 << p);
            let members: Vec<usize> = (0..self.k()).filter(|&i| mask & (1 << i) != 0).collect();
            let radices: Vec<usize> = members.iter().map(|&i| self.ns[i].len()).collect();
            let mut digits = vec![0usize; members.len()];
            loop {
                let cap = members.iter().zip(&digits).map(|(&i, &d)| &self.caps[i][d]).min().unwrap().clone();
                if cap.is_positive() {
                    out.push(Choice::Group(Group { mask, options: digits.clone() }, cap));
                }
                if !advance(&mut digits, &radices) {
                    break;
                }
            }
            if sub == rest {
                break;
            }
            sub = (sub.wrapping_sub(rest)) & rest;
        }
        out.push(Choice::Exclude(p));
        out
    }

    fn group_vector(&self, g: &Group) -> Vec<Rat> {
        let mut v = vec![Rat::zero(); self.setting.class_rank];
        let members = (0..self.k()).filter(|&i| g.mask & (1 << i) != 0);
        for (i, &d) in members.zip(&g.options) {
            let n = Rat::from_integer(Int::from(self.ns[i][d]));
            for (vi, x) in v.iter_mut().zip(&self.classes[i]) {
                *vi += x / &n;
            }
        }
        v
    }

    fn decomposition(&self, groups: &[Group]) -> OrbifoldDecomposition {
        let mut orbifold = OrbifoldStructure::trivial();
        let mut assigned = 0u32;
        let mut parts = Vec::new();
        for g in groups {
            assigned |= g.mask;
            let mut d = InvariantDivisor::zero(self.nrays);
            let members = (0..self.k()).filter(|&i| g.mask & (1 << i) != 0);
            let mut cap: Option<Rat> = None;
            for (i, &o) in members.zip(&g.options) {
                let n = self.ns[i][o];
                orbifold.set(self.rays[i], n);
                d.set_coeff(self.rays[i], Rat::new(Int::one(), Int::from(n)));
                let c = self.caps[i][o].clone();
                cap = Some(match cap {
                    Some(x) if x <= c => x,
                    _ => c,
                });
            }
            parts.push(Part { b: cap.unwrap(), divisor: d });
        }
        for i in 0..self.k() {
            if assigned & (1 << i) == 0 {
                orbifold.set(self.rays[i], *self.ns[i].last().unwrap());
            }
        }
        OrbifoldDecomposition::new(orbifold, parts)
    }
}

/// Divisors `n ≤ cap` of the denominator of `c` with `1 − 1/n ≤ c`, ascending.
fn allowed_indices(c: &Rat, cap: u64) -> Vec<u64> {
    let denom = c.denom().clone();
    let mut out = Vec::new();
    for n in 1..=cap {
        if (&denom % Int::from(n)).is_zero() && Rat::one() - Rat::new(Int::one(), Int::from(n)) <= *c {
            out.push(n);
        }
    }
    out
}

fn advance(digits: &mut [usize], radices: &[usize]) -> bool {
    for i in (0..digits.len()).rev() {
        digits[i] += 1;
        if digits[i] < radices[i] {
            return true;
        }
        digits[i] = 0;
    }
    false
}

#[derive(Debug, Clone)]
enum Choice {
    Group(Group, Rat),
    Exclude(usize),
}

#[derive(Debug, Clone)]
struct State {
    unassigned: u32,
    kept: u32,
    groups: Vec<Group>,
    norm: Rat,
    basis: Echelon,
}

impl State {
    fn new(k: usize, r: usize) -> Self {
        let all = if k == 32 { u32::MAX } else { (1u32 << k) - 1 };
        Self { unassigned: all, kept: all, groups: Vec::new(), norm: Rat::zero(), basis: Echelon::new(r) }
    }
}

struct Searcher<'p, 'a> {
    problem: &'p Problem<'a>,
    shared: &'p RwLock<Rat>,
    best: Outcome,
    nodes: u64,
    memo: HashMap<u32, usize>,
}

impl Searcher<'_, '_> {
    fn apply_and_recurse(&mut self, state: &mut State, choice: &Choice) {
        match choice {
            Choice::Group(g, b) => {
                let v = self.problem.group_vector(g);
                let added = state.basis.insert(v);
                state.unassigned &= !g.mask;
                state.norm += b;
                state.groups.push(g.clone());
                self.visit(state);
                state.groups.pop();
                state.norm -= b;
                state.unassigned |= g.mask;
                if added {
                    state.basis.pop();
                }
            }
            Choice::Exclude(p) => {
                state.unassigned &= !(1 << p);
                state.kept &= !(1 << p);
                self.visit(state);
                state.kept |= 1 << p;
                state.unassigned |= 1 << p;
            }
        }
    }

    fn visit(&mut self, state: &mut State) {
        self.nodes += 1;
        let bound = self.lower_bound(state);
        if bound >= self.best.value || bound > *self.shared.read().unwrap() {
            return;
        }
        if state.unassigned == 0 {
            // At a leaf the bound is the exact value.
            self.best.value = bound.clone();
            self.best.groups = state.groups.clone();
            let mut shared = self.shared.write().unwrap();
            if bound < *shared {
                *shared = bound;
            }
            return;
        }
        for choice in self.problem.options(state) {
            self.apply_and_recurse(state, &choice);
        }
    }

    fn relations(&mut self, mask: u32) -> usize {
        if let Some(&d) = self.memo.get(&mask) {
            return d;
        }
        let members: Vec<&Vec<Rat>> = (0..self.problem.k()).filter(|&i| mask & (1 << i) != 0).map(|i| &self.problem.classes[i]).collect();
        let d = members.len() - Echelon::spanned(members.into_iter());
        self.memo.insert(mask, d);
        d
    }

    fn lower_bound(&mut self, state: &State) -> Rat {
        let p = self.problem;
        let closed = state.groups.len();
        let rank = state.basis.rank();
        let remaining = state.unassigned.count_ones() as usize;
        let room: Rat = (0..p.k()).filter(|&i| state.unassigned & (1 << i) != 0).map(|i| &p.coeff[i]).sum();
        let d = self.relations(state.kept);
        let base = Rat::from_integer(Int::from(p.setting.dim)) - &state.norm;
        let mut best: Option<Rat> = None;
        for future in 0..=remaining {
            let span = rank.max((closed + future).saturating_sub(d));
            let gain = Rat::from_integer(Int::from(future)).min(room.clone());
            let v = Rat::from_integer(Int::from(span)) - gain;
            best = Some(match best {
                Some(b) if b <= v => b,
                _ => v,
            });
        }
        base + best.unwrap()
    }
}

/// Incremental row echelon basis over Q.
#[derive(Debug, Clone)]
struct Echelon {
    dim: usize,
    rows: Vec<(usize, Vec<Rat>)>,
}

impl Echelon {
    fn new(dim: usize) -> Self {
        Self { dim, rows: Vec::new() }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    fn spanned<'v>(vs: impl Iterator<Item = &'v Vec<Rat>>) -> usize {
        let mut e: Option<Echelon> = None;
        for v in vs {
            e.get_or_insert_with(|| Echelon::new(v.len())).insert(v.clone());
        }
        e.map_or(0, |e| e.rank())
    }

    /// Adds `v` if it is independent of the current rows.
    fn insert(&mut self, mut v: Vec<Rat>) -> bool {
        debug_assert_eq!(v.len(), self.dim);
        for (p, row) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let f = v[*p].clone();
            for (x, y) in v.iter_mut().zip(row) {
                *x -= &f * y;
            }
        }
        match v.iter().position(|x| !x.is_zero()) {
            Some(p) => {
                let lead = v[p].clone();
                for x in v.iter_mut() {
                    *x /= &lead;
                }
                self.rows.push((p, v));
                true
            }
            None => false,
        }
    }

    fn pop(&mut self) {
        self.rows.pop();
    }
}
