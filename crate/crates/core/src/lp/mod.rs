//! The cut formulation of the shortest bibranching problem and its dual:
//! certificate checkers, objectives, and an exact integral dual solver.
//!
//! Primal: min w·x with x(δ⁺S') ≥ 1 for ∅ ≠ S' ⊆ S, x(δ⁻T') ≥ 1 for ∅ ≠ T' ⊆ T, x ≥ 0.
//! Dual: max Σy + Σz with, for every arc a,
//! Σ_{S' : a ∈ δ⁺S'} y(S') + Σ_{T' : a ∈ δ⁻T'} z(T') ≤ w(a), y, z ≥ 0.

pub mod branch;
pub mod simplex;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::graph::{ArcSet, Instance, Side};
use branch::{solve_integer, IntegerOutcome, Search};
use simplex::{q, LinearProgram, Q};

/// Largest side handled by the subset sweeps of the checkers.
pub const MAX_CHECK_SIDE: usize = 20;
/// Largest side for which the dual is written out explicitly.
pub const MAX_DUAL_SIDE: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LpError {
    #[error("side {side:?} has {size} vertices, more than {limit}")]
    TooLarge { side: Side, size: usize, limit: usize },
    #[error("the dual is unbounded: no bibranching exists")]
    UnboundedDual,
    #[error("primal vector has {got} entries, instance has {m} arcs")]
    LengthMismatch { got: usize, m: usize },
    #[error("dual key {0:?} is not a nonempty sorted subset of its side")]
    BadSubset(Vec<usize>),
    #[error("slackness needs feasible inputs: {0}")]
    InfeasibleInput(String),
}

/// x: one exact rational per arc.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpPrimal {
    values: Vec<Q>,
}

impl LpPrimal {
    pub fn new(values: Vec<Q>) -> Self {
        LpPrimal { values }
    }

    pub fn zeros(m: usize) -> Self {
        LpPrimal { values: vec![Q::zero(); m] }
    }

    pub fn indicator(b: &ArcSet) -> Self {
        let mut values = vec![Q::zero(); b.universe()];
        for i in b.iter() {
            values[i] = Q::one();
        }
        LpPrimal { values }
    }

    pub fn values(&self) -> &[Q] {
        &self.values
    }

    pub fn is_integral(&self) -> bool {
        self.values.iter().all(|v| v.is_integer())
    }

    /// The arc set when every entry is 0 or 1.
    pub fn as_arc_set(&self) -> Option<ArcSet> {
        let mut b = ArcSet::empty(self.values.len());
        for (i, v) in self.values.iter().enumerate() {
            if v.is_one() {
                b.insert(i);
            } else if !v.is_zero() {
                return None;
            }
        }
        Some(b)
    }

    fn sum_over(&self, arcs: impl Iterator<Item = usize>) -> Q {
        arcs.fold(Q::zero(), |acc, i| acc + &self.values[i])
    }
}

/// (y, z) as finitely supported maps keyed by sorted vertex lists. Zero
/// entries are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LpDual {
    pub y: BTreeMap<Vec<usize>, Q>,
    pub z: BTreeMap<Vec<usize>, Q>,
}

impl LpDual {
    pub fn add(&mut self, side: Side, mut set: Vec<usize>, value: Q) {
        if value.is_zero() {
            return;
        }
        set.sort_unstable();
        let map = match side {
            Side::S => &mut self.y,
            Side::T => &mut self.z,
        };
        let slot = map.entry(set).or_insert_with(Q::zero);
        *slot += value;
        map.retain(|_, v| !v.is_zero());
    }

    pub fn value(&self) -> Q {
        self.y.values().chain(self.z.values()).fold(Q::zero(), |acc, v| acc + v)
    }

    pub fn is_integral(&self) -> bool {
        self.y.values().chain(self.z.values()).all(|v| v.is_integer())
    }

    /// Σ_{S' ∋ u} y(S') for u ∈ S, or Σ_{T' ∋ v} z(T') for v ∈ T.
    pub fn vertex_sum(&self, side: Side, v: usize) -> Q {
        let map = match side {
            Side::S => &self.y,
            Side::T => &self.z,
        };
        map.iter().filter(|(k, _)| k.binary_search(&v).is_ok()).fold(Q::zero(), |acc, (_, x)| acc + x)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrimalViolation {
    Negative { arc: usize },
    /// x(δ⁺S') < 1.
    OutCut(Vec<usize>),
    /// x(δ⁻T') < 1.
    InCut(Vec<usize>),
}

impl fmt::Display for PrimalViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrimalViolation::Negative { arc } => write!(f, "primal infeasible: x(a{}) < 0", arc + 1),
            PrimalViolation::OutCut(s) => write!(f, "primal infeasible: x(out-cut of {s:?}) < 1"),
            PrimalViolation::InCut(t) => write!(f, "primal infeasible: x(in-cut of {t:?}) < 1"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DualViolation {
    Negative { side: Side, set: Vec<usize> },
    Arc(usize),
}

impl fmt::Display for DualViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DualViolation::Negative { side, set } => write!(f, "dual infeasible: negative value on {side:?} set {set:?}"),
            DualViolation::Arc(a) => write!(f, "dual infeasible at arc a{}", a + 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SlackViolation {
    /// x(a) > 0 on an arc whose dual constraint is not tight.
    Arc(usize),
    /// y(S') > 0 but x(δ⁺S') ≠ 1.
    SSet(Vec<usize>),
    /// z(T') > 0 but x(δ⁻T') ≠ 1.
    TSet(Vec<usize>),
}

impl fmt::Display for SlackViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SlackViolation::Arc(a) => write!(f, "slackness fails at arc a{}", a + 1),
            SlackViolation::SSet(s) => write!(f, "slackness fails at S set {s:?}"),
            SlackViolation::TSet(t) => write!(f, "slackness fails at T set {t:?}"),
        }
    }
}

fn side_limit(inst: &Instance, limit: usize) -> Result<(), LpError> {
    for side in [Side::S, Side::T] {
        let size = inst.side_vertices(side).len();
        if size > limit {
            return Err(LpError::TooLarge { side, size, limit });
        }
    }
    Ok(())
}

fn check_len(inst: &Instance, x: &LpPrimal) -> Result<(), LpError> {
    if x.values.len() != inst.m() {
        return Err(LpError::LengthMismatch { got: x.values.len(), m: inst.m() });
    }
    Ok(())
}

fn subsets(ground: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    (1u64..1 << ground.len()).map(move |mask| (0..ground.len()).filter(|k| mask >> k & 1 == 1).map(|k| ground[k]).collect())
}

fn crosses(set: &[usize], inside: usize, outside: usize) -> bool {
    set.binary_search(&inside).is_ok() && set.binary_search(&outside).is_err()
}

/// Nonnegativity, then every S-cut, then every T-cut (subsets in bitmask
/// order); the first violated constraint is returned.
pub fn primal_feasible(inst: &Instance, x: &LpPrimal) -> Result<Option<PrimalViolation>, LpError> {
    side_limit(inst, MAX_CHECK_SIDE)?;
    check_len(inst, x)?;
    if let Some(arc) = x.values.iter().position(|v| v.is_negative()) {
        return Ok(Some(PrimalViolation::Negative { arc }));
    }
    let arcs = inst.arcs();
    for set in subsets(inst.s_vertices()) {
        let out = x.sum_over((0..arcs.len()).filter(|&i| crosses(&set, arcs[i].tail, arcs[i].head)));
        if out < Q::one() {
            return Ok(Some(PrimalViolation::OutCut(set)));
        }
    }
    for set in subsets(inst.t_vertices()) {
        let inn = x.sum_over((0..arcs.len()).filter(|&i| crosses(&set, arcs[i].head, arcs[i].tail)));
        if inn < Q::one() {
            return Ok(Some(PrimalViolation::InCut(set)));
        }
    }
    Ok(None)
}

fn validate_keys(inst: &Instance, d: &LpDual) -> Result<(), LpError> {
    for (side, map) in [(Side::S, &d.y), (Side::T, &d.z)] {
        for key in map.keys() {
            let sorted = key.windows(2).all(|w| w[0] < w[1]);
            let on_side = key.iter().all(|&v| v < inst.n() && inst.side_of(v) == side);
            if key.is_empty() || !sorted || !on_side {
                return Err(LpError::BadSubset(key.clone()));
            }
        }
    }
    Ok(())
}

/// Left-hand side of the dual constraint of arc `i`.
fn dual_load(inst: &Instance, d: &LpDual, i: usize) -> Q {
    let a = inst.arc(i);
    let ys = d.y.iter().filter(|(k, _)| crosses(k, a.tail, a.head)).fold(Q::zero(), |acc, (_, v)| acc + v);
    let zs = d.z.iter().filter(|(k, _)| crosses(k, a.head, a.tail)).fold(Q::zero(), |acc, (_, v)| acc + v);
    ys + zs
}

pub fn dual_feasible(inst: &Instance, d: &LpDual) -> Result<Option<DualViolation>, LpError> {
    validate_keys(inst, d)?;
    for (side, map) in [(Side::S, &d.y), (Side::T, &d.z)] {
        if let Some((set, _)) = map.iter().find(|(_, v)| v.is_negative()) {
            return Ok(Some(DualViolation::Negative { side, set: set.clone() }));
        }
    }
    Ok((0..inst.m()).find(|&i| dual_load(inst, d, i) > q(inst.arc(i).weight)).map(DualViolation::Arc))
}

/// (w·x, Σy + Σz).
pub fn objectives(inst: &Instance, x: &LpPrimal, d: &LpDual) -> Result<(Q, Q), LpError> {
    check_len(inst, x)?;
    let primal = inst.arcs().iter().zip(&x.values).fold(Q::zero(), |acc, (a, v)| acc + q(a.weight) * v);
    Ok((primal, d.value()))
}

pub fn comp_slack_check(inst: &Instance, x: &LpPrimal, d: &LpDual) -> Result<Option<SlackViolation>, LpError> {
    if let Some(v) = primal_feasible(inst, x)? {
        return Err(LpError::InfeasibleInput(v.to_string()));
    }
    if let Some(v) = dual_feasible(inst, d)? {
        return Err(LpError::InfeasibleInput(v.to_string()));
    }
    let arcs = inst.arcs();
    for (i, v) in x.values.iter().enumerate() {
        if v.is_positive() && dual_load(inst, d, i) != q(arcs[i].weight) {
            return Ok(Some(SlackViolation::Arc(i)));
        }
    }
    for set in d.y.keys() {
        let out = x.sum_over((0..arcs.len()).filter(|&i| crosses(set, arcs[i].tail, arcs[i].head)));
        if !out.is_one() {
            return Ok(Some(SlackViolation::SSet(set.clone())));
        }
    }
    for set in d.z.keys() {
        let inn = x.sum_over((0..arcs.len()).filter(|&i| crosses(set, arcs[i].head, arcs[i].tail)));
        if !inn.is_one() {
            return Ok(Some(SlackViolation::TSet(set.clone())));
        }
    }
    Ok(None)
}

/// A dual variable: y(S') or z(T'), keyed by side and sorted subset.
pub type DualVar = (Side, Vec<usize>);

/// The dual written out: one variable per nonempty subset of S (bitmask order),
/// then of T; one row per arc.
pub fn dual_program(inst: &Instance) -> Result<(LinearProgram, Vec<DualVar>), LpError> {
    side_limit(inst, MAX_DUAL_SIDE)?;
    let mut vars: Vec<(Side, Vec<usize>)> = subsets(inst.s_vertices()).map(|s| (Side::S, s)).collect();
    vars.extend(subsets(inst.t_vertices()).map(|t| (Side::T, t)));
    let mut lp = LinearProgram::new(vec![Q::one(); vars.len()]);
    for a in inst.arcs() {
        let row = vars
            .iter()
            .map(|(side, set)| {
                let hit = match side {
                    Side::S => crosses(set, a.tail, a.head),
                    Side::T => crosses(set, a.head, a.tail),
                };
                if hit {
                    Q::one()
                } else {
                    Q::zero()
                }
            })
            .collect();
        lp.add_row(row, q(a.weight));
    }
    Ok((lp, vars))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegralDual {
    pub dual: LpDual,
    pub value: i64,
}

/// An integral optimum of the dual, by simplex and branch-and-bound.
pub fn solve_dual_integral(inst: &Instance) -> Result<IntegralDual, LpError> {
    let (lp, vars) = dual_program(inst)?;
    let sol = match solve_integer(&lp, Search::Optimal) {
        IntegerOutcome::Optimal(s) => s,
        IntegerOutcome::Unbounded => return Err(LpError::UnboundedDual),
        IntegerOutcome::Infeasible => unreachable!("y = z = 0 is feasible for nonnegative weights"),
    };
    let mut dual = LpDual::default();
    for ((side, set), v) in vars.into_iter().zip(sol.x) {
        dual.add(side, set, Q::from_integer(v));
    }
    let value = sol.value.to_integer().to_i64().expect("dual value fits in i64");
    Ok(IntegralDual { dual, value })
}
