//! The M♮-convex submodular flow formulation:
//!
//! min w(ξ) + g_S(∂ξ|_S) + g_T(−∂ξ|_T) over ξ ∈ {0,1}^{A[S,T]}.
//!
//! Includes an exhaustive solver, a Benders decomposition solver, the
//! potential-based optimality checker and a potential finder.

use std::fmt;

use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::arborescence::{min_arborescence, ArborescenceError, RootedInstance};
use crate::exec::{self, Exec};
use crate::graph::{ArcSet, DiArc, Digraph, Instance, IntVecOnSet, Side};
use crate::lp::branch::{solve_integer, IntegerOutcome, Search};
use crate::lp::simplex::{q, LinearProgram, LpOutcome, Q};
use crate::mconvex::{ArgminFailure, ArgminVerdict, ExtValue, GTable, MConvexError, MConvexOracle, ShiftSign};

/// Largest |A[S,T]| for the enumeration-based solvers.
pub const MAX_CROSS_ARCS: usize = 24;
/// Largest side for [`find_optimal_potential`].
pub const MAX_POTENTIAL_SIDE: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MsfError {
    #[error("{what} = {got} exceeds the limit {limit}")]
    TooLarge { what: &'static str, got: usize, limit: usize },
    #[error("no feasible flow exists")]
    Infeasible,
    #[error("the flow is infeasible")]
    FlowInfeasible,
    #[error("arc a{} is not an S-T arc", .0 + 1)]
    NotCrossArc(usize),
    #[error("arc set has universe {got}, instance has {m} arcs")]
    UniverseMismatch { got: usize, m: usize },
    #[error("potential ground sets do not match the instance")]
    PotentialShape,
    #[error("the flow is not optimal: no potential satisfies the optimality conditions")]
    NotOptimalFlow,
    #[error("constructed potential was rejected: {0}")]
    Uncertified(String),
    #[error(transparent)]
    Oracle(#[from] MConvexError),
}

fn limit(what: &'static str, got: usize, limit: usize) -> Result<(), MsfError> {
    if got > limit {
        return Err(MsfError::TooLarge { what, got, limit });
    }
    Ok(())
}

/// A 0-1 flow supported on A[S,T].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Flow {
    arcs: ArcSet,
}

impl Flow {
    pub fn new(inst: &Instance, arcs: ArcSet) -> Result<Self, MsfError> {
        if arcs.universe() != inst.m() {
            return Err(MsfError::UniverseMismatch { got: arcs.universe(), m: inst.m() });
        }
        if let Some(a) = arcs.iter().find(|&a| !inst.cross_arcs().contains(&a)) {
            return Err(MsfError::NotCrossArc(a));
        }
        Ok(Flow { arcs })
    }

    pub fn from_indices(inst: &Instance, idx: &[usize]) -> Result<Self, MsfError> {
        let arcs = ArcSet::from_indices(inst.m(), idx.iter().copied())
            .map_err(|_| MsfError::UniverseMismatch { got: idx.iter().max().map_or(0, |x| x + 1), m: inst.m() })?;
        Flow::new(inst, arcs)
    }

    /// Bit k of `mask` selects the k-th arc of A[S,T].
    pub fn from_cross_mask(inst: &Instance, mask: u64) -> Self {
        Flow { arcs: ArcSet::from_mask(inst.m(), inst.cross_arcs(), mask) }
    }

    pub fn arcs(&self) -> &ArcSet {
        &self.arcs
    }

    pub fn cross_mask(&self, inst: &Instance) -> u64 {
        inst.cross_arcs().iter().enumerate().filter(|(_, &a)| self.arcs.contains(a)).fold(0, |m, (k, _)| m | 1 << k)
    }

    /// ∂ξ restricted to S.
    pub fn eta_s(&self, inst: &Instance) -> IntVecOnSet {
        let full = inst.boundary(&self.arcs).expect("flow arcs are S-T arcs");
        full.restrict(inst.s_vertices())
    }

    /// −∂ξ restricted to T.
    pub fn eta_t(&self, inst: &Instance) -> IntVecOnSet {
        let full = inst.boundary(&self.arcs).expect("flow arcs are S-T arcs");
        full.restrict(inst.t_vertices()).negated()
    }
}

/// Vertex potentials: p on S, q on T.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Potential {
    pub p: IntVecOnSet,
    pub q: IntVecOnSet,
}

impl Potential {
    pub fn new(inst: &Instance, p: Vec<i64>, q: Vec<i64>) -> Result<Self, MsfError> {
        if p.len() != inst.s_vertices().len() || q.len() != inst.t_vertices().len() {
            return Err(MsfError::PotentialShape);
        }
        Ok(Potential {
            p: IntVecOnSet::new(inst.s_vertices().to_vec(), p),
            q: IntVecOnSet::new(inst.t_vertices().to_vec(), q),
        })
    }

    pub fn zero(inst: &Instance) -> Self {
        Potential { p: IntVecOnSet::zeros(inst.s_vertices()), q: IntVecOnSet::zeros(inst.t_vertices()) }
    }

    fn check_shape(&self, inst: &Instance) -> Result<(), MsfError> {
        if self.p.ground() != inst.s_vertices() || self.q.ground() != inst.t_vertices() {
            return Err(MsfError::PotentialShape);
        }
        Ok(())
    }

    /// w(a) + p(u) − q(v) for a = uv in A[S,T].
    pub fn reduced_cost(&self, inst: &Instance, arc: usize) -> i64 {
        let a = inst.arc(arc);
        a.weight + self.p.get(a.tail) - self.q.get(a.head)
    }

    /// p ≤ 0, q ≥ 0, and both vanish where the flow boundary has magnitude ≥ 2.
    pub fn sign_facts_hold(&self, inst: &Instance, flow: &Flow) -> bool {
        let b = inst.boundary(flow.arcs()).expect("flow arcs are S-T arcs");
        self.p.iter().all(|(u, x)| x <= 0 && (b.get(u).abs() < 2 || x == 0))
            && self.q.iter().all(|(v, x)| x >= 0 && (b.get(v).abs() < 2 || x == 0))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MsfSolution {
    pub flow: Flow,
    pub value: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Brute,
    Benders,
}

/// g_S and g_T tabulated for one instance, with per-arc data for fast
/// evaluation over cross-arc bitmasks.
#[derive(Debug, Clone)]
pub struct Oracles {
    pub g_s: GTable,
    pub g_t: GTable,
    /// Per cross arc: (S position bit, T position bit, weight).
    cross: Vec<(u64, u64, i64)>,
}

impl Oracles {
    pub fn new(inst: &Instance, exec: Exec) -> Result<Self, MsfError> {
        let g_s = MConvexOracle::new(inst, Side::S).table(exec)?;
        let g_t = MConvexOracle::new(inst, Side::T).table(exec)?;
        let pos = |ground: &[usize], v: usize| 1u64 << ground.binary_search(&v).expect("vertex on its side");
        let cross = inst
            .cross_arcs()
            .iter()
            .map(|&i| {
                let a = inst.arc(i);
                (pos(inst.s_vertices(), a.tail), pos(inst.t_vertices(), a.head), a.weight)
            })
            .collect();
        Ok(Oracles { g_s, g_t, cross })
    }

    /// Objective at the flow given as a cross-arc bitmask. The boundary is
    /// nonnegative on S and nonpositive on T, so only supports matter.
    pub fn objective_mask(&self, mask: u64) -> ExtValue {
        let (mut s, mut t, mut w) = (0u64, 0u64, 0i64);
        for (k, &(sb, tb, wt)) in self.cross.iter().enumerate() {
            if mask >> k & 1 == 1 {
                s |= sb;
                t |= tb;
                w += wt;
            }
        }
        (self.g_s.at_mask(s) + self.g_t.at_mask(t)).plus(w)
    }

    pub fn objective(&self, inst: &Instance, flow: &Flow) -> ExtValue {
        self.objective_mask(flow.cross_mask(inst))
    }

    pub fn check_potential(&self, inst: &Instance, flow: &Flow, pot: &Potential) -> Result<PotentialVerdict, MsfError> {
        pot.check_shape(inst)?;
        if !self.objective(inst, flow).is_finite() {
            return Err(MsfError::FlowInfeasible);
        }
        for &arc in inst.cross_arcs() {
            let r = pot.reduced_cost(inst, arc);
            let bad = if flow.arcs().contains(arc) { r > 0 } else { r < 0 };
            if bad {
                return Ok(PotentialVerdict::ArcCondition { arc, reduced_cost: r });
            }
        }
        let sides = [
            (Side::S, &self.g_s, flow.eta_s(inst), &pot.p, ShiftSign::Minus),
            (Side::T, &self.g_t, flow.eta_t(inst), &pot.q, ShiftSign::Plus),
        ];
        for (side, table, eta, shift, sign) in sides {
            if let ArgminVerdict::NotMember { reason, witness } = table.argmin_member(&eta, shift, sign)? {
                return Ok(PotentialVerdict::SideCondition { side, reason, witness });
            }
        }
        Ok(PotentialVerdict::Optimal)
    }
}

pub fn msf_objective(inst: &Instance, flow: &Flow) -> Result<ExtValue, MsfError> {
    Ok(Oracles::new(inst, Exec::Sequential)?.objective(inst, flow))
}

pub fn flow_feasible(inst: &Instance, flow: &Flow) -> Result<bool, MsfError> {
    Ok(msf_objective(inst, flow)?.is_finite())
}

pub fn solve_msf(inst: &Instance, method: Method) -> Result<MsfSolution, MsfError> {
    solve_msf_with(inst, method, Exec::default())
}

/// Minimizer ties are broken by the lexicographically least ξ bitstring
/// (cross arcs in index order).
pub fn solve_msf_with(inst: &Instance, method: Method, exec: Exec) -> Result<MsfSolution, MsfError> {
    match method {
        Method::Brute => solve_brute(inst, exec),
        Method::Benders => solve_benders(inst).map(|run| run.solution),
    }
}

fn bitstring_key(mask: u64) -> u64 {
    mask.reverse_bits()
}

fn solve_brute(inst: &Instance, exec: Exec) -> Result<MsfSolution, MsfError> {
    let k = inst.cross_arcs().len();
    limit("S-T arc count", k, MAX_CROSS_ARCS)?;
    let oracles = Oracles::new(inst, exec)?;
    let best = exec::min_over_range(exec, 1u64 << k, |mask| {
        oracles.objective_mask(mask).finite().map(|v| ((v, bitstring_key(mask)), mask))
    });
    let ((value, _), mask) = best.ok_or(MsfError::Infeasible)?;
    Ok(MsfSolution { flow: Flow::from_cross_mask(inst, mask), value })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CutKind {
    /// h ≥ constant + Σ coeff·ξ(a).
    Optimality { constant: i64, coeffs: Vec<(usize, i64)> },
    /// Σ_{a ∈ arcs} ξ(a) ≥ 1.
    Feasibility { arcs: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BendersCut {
    pub side: Side,
    pub kind: CutKind,
}

impl BendersCut {
    /// Lower bound on h at `flow` (optimality cuts only).
    pub fn bound_at(&self, flow: &Flow) -> Option<i64> {
        match &self.kind {
            CutKind::Optimality { constant, coeffs } => {
                Some(constant + coeffs.iter().filter(|(a, _)| flow.arcs().contains(*a)).map(|(_, c)| c).sum::<i64>())
            }
            CutKind::Feasibility { .. } => None,
        }
    }

    /// Whether `flow` satisfies the cut's feasibility constraint (always true
    /// for optimality cuts).
    pub fn admits(&self, flow: &Flow) -> bool {
        match &self.kind {
            CutKind::Optimality { .. } => true,
            CutKind::Feasibility { arcs } => arcs.iter().any(|&a| flow.arcs().contains(a)),
        }
    }
}

/// The side subproblem at ξ as a rooted arborescence problem: vertices of the
/// side not in the support X = supp(∓∂ξ) plus a root standing for X; arcs of
/// the side graph (reversed for S) entering X are dropped, arcs leaving X
/// start at the root.
pub fn benders_cut(inst: &Instance, side: Side, flow: &Flow) -> BendersCut {
    let sg = inst.side_graph(side);
    let d = match side {
        Side::T => sg.graph.clone(),
        Side::S => sg.graph.reversed(),
    };
    let eta = match side {
        Side::S => flow.eta_s(inst),
        Side::T => flow.eta_t(inst),
    };
    let in_x: Vec<bool> = sg.vertices.iter().map(|&v| eta.get(v) > 0).collect();
    let rest: Vec<usize> = (0..sg.vertices.len()).filter(|&l| !in_x[l]).collect();
    let root = rest.len();
    let mut id = vec![usize::MAX; sg.vertices.len()];
    for (k, &l) in rest.iter().enumerate() {
        id[l] = k;
    }
    let arcs: Vec<DiArc> = d
        .arcs()
        .iter()
        .filter(|a| !in_x[a.head])
        .map(|a| DiArc::new(if in_x[a.tail] { root } else { id[a.tail] }, id[a.head], a.weight))
        .collect();
    let sub = RootedInstance { graph: Digraph::new(root + 1, arcs).expect("endpoints in range"), root };
    // the side endpoint of each cross arc
    let endpoint = |a: usize| match side {
        Side::S => inst.arc(a).tail,
        Side::T => inst.arc(a).head,
    };
    match min_arborescence(&sub) {
        Ok(arb) => {
            let mut sets: Vec<(Vec<usize>, i64)> = Vec::new();
            for (k, &l) in rest.iter().enumerate() {
                if arb.dual.vertex[k] > 0 {
                    sets.push((vec![sg.vertices[l]], arb.dual.vertex[k]));
                }
            }
            for (members, y) in &arb.dual.sets {
                let mut global: Vec<usize> = members.iter().map(|&k| sg.vertices[rest[k]]).collect();
                global.sort_unstable();
                sets.push((global, *y));
            }
            let constant = sets.iter().map(|(_, y)| y).sum();
            let coeffs = inst
                .cross_arcs()
                .iter()
                .map(|&a| {
                    let v = endpoint(a);
                    (a, -sets.iter().filter(|(s, _)| s.binary_search(&v).is_ok()).map(|(_, y)| y).sum::<i64>())
                })
                .filter(|(_, c)| *c != 0)
                .collect();
            BendersCut { side, kind: CutKind::Optimality { constant, coeffs } }
        }
        Err(ArborescenceError::Infeasible { .. }) => {
            let comps = d.source_components();
            let k = comps
                .iter()
                .find(|k| k.iter().all(|&l| !in_x[l]))
                .expect("an unreachable vertex lies below an uncovered source component");
            let members: Vec<usize> = k.iter().map(|&l| sg.vertices[l]).collect();
            let arcs = inst.cross_arcs().iter().copied().filter(|&a| members.contains(&endpoint(a))).collect();
            BendersCut { side, kind: CutKind::Feasibility { arcs } }
        }
        Err(e) => unreachable!("subproblem has nonnegative weights and a valid root: {e}"),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BendersRun {
    pub solution: MsfSolution,
    /// Every cut added, with the master solution that generated it.
    pub cuts: Vec<(BendersCut, Flow)>,
    pub iterations: usize,
}

/// Benders decomposition with the master problem solved by enumeration of
/// {0,1}^{A[S,T]} against the current cuts. Each round solves the master,
/// then the S and T subproblems at its minimizer, and adds every violated
/// cut (S first). Stops when no cut is violated.
pub fn solve_benders(inst: &Instance) -> Result<BendersRun, MsfError> {
    let k = inst.cross_arcs().len();
    limit("S-T arc count", k, MAX_CROSS_ARCS)?;
    let total = 1usize << k;
    let weights: Vec<i64> = inst.cross_arcs().iter().map(|&a| inst.arc(a).weight).collect();
    let mask_sum = |mask: usize, per_bit: &[i64]| -> i64 {
        per_bit.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, c)| c).sum()
    };
    let base: Vec<i64> = (0..total).map(|m| mask_sum(m, &weights)).collect();
    let mut theta = [vec![0i64; total], vec![0i64; total]];
    let mut excluded = vec![false; total];
    let mut cuts = Vec::new();
    let mut iterations = 0;
    loop {
        iterations += 1;
        let best = (0..total)
            .filter(|&m| !excluded[m])
            .min_by_key(|&m| (base[m] + theta[0][m] + theta[1][m], bitstring_key(m as u64)))
            .ok_or(MsfError::Infeasible)?;
        let flow = Flow::from_cross_mask(inst, best as u64);
        let mut added = false;
        for (slot, side) in [Side::S, Side::T].into_iter().enumerate() {
            let cut = benders_cut(inst, side, &flow);
            match &cut.kind {
                CutKind::Feasibility { arcs } => {
                    let bits: Vec<usize> =
                        arcs.iter().map(|a| inst.cross_arcs().binary_search(a).expect("cross arc")).collect();
                    for (m, ex) in excluded.iter_mut().enumerate() {
                        if bits.iter().all(|b| m >> b & 1 == 0) {
                            *ex = true;
                        }
                    }
                }
                CutKind::Optimality { constant, coeffs } => {
                    let h = cut.bound_at(&flow).expect("optimality cut");
                    if theta[slot][best] >= h {
                        continue;
                    }
                    let mut per_bit = vec![0i64; k];
                    for (a, c) in coeffs {
                        per_bit[inst.cross_arcs().binary_search(a).expect("cross arc")] = *c;
                    }
                    for (m, th) in theta[slot].iter_mut().enumerate() {
                        *th = (*th).max(constant + mask_sum(m, &per_bit));
                    }
                }
            }
            cuts.push((cut, flow.clone()));
            added = true;
        }
        if !added {
            let value = base[best] + theta[0][best] + theta[1][best];
            return Ok(BendersRun { solution: MsfSolution { flow, value }, cuts, iterations });
        }
    }
}

/// Outcome of the optimality check for a (flow, potential) pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PotentialVerdict {
    Optimal,
    /// Reduced cost has the wrong sign on a cross arc (positive on a flow
    /// arc, negative off the flow).
    ArcCondition { arc: usize, reduced_cost: i64 },
    /// The side boundary does not minimize the shifted cost function.
    SideCondition { side: Side, reason: ArgminFailure, witness: IntVecOnSet },
}

impl PotentialVerdict {
    pub fn is_optimal(&self) -> bool {
        matches!(self, PotentialVerdict::Optimal)
    }
}

impl fmt::Display for PotentialVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PotentialVerdict::Optimal => f.write_str("optimal"),
            PotentialVerdict::ArcCondition { arc, reduced_cost } => {
                write!(f, "reduced cost condition fails at arc a{} (reduced cost {reduced_cost})", arc + 1)
            }
            PotentialVerdict::SideCondition { side, reason, witness } => {
                write!(f, "{side:?}-side minimizer condition fails ({reason:?}, better point {witness:?})")
            }
        }
    }
}

pub fn check_optimal_potential(inst: &Instance, flow: &Flow, pot: &Potential) -> Result<PotentialVerdict, MsfError> {
    Oracles::new(inst, Exec::Sequential)?.check_potential(inst, flow, pot)
}

/// An integral potential certifying `flow`, found by solving the linear
/// system of optimality conditions (with coordinates at boundary magnitude
/// ≥ 2 fixed to zero and every entry bounded by the total weight) and
/// falling back to branch-and-bound when the LP vertex is fractional.
pub fn find_optimal_potential(inst: &Instance, flow: &Flow) -> Result<Potential, MsfError> {
    for side in [Side::S, Side::T] {
        limit("side size", inst.side_vertices(side).len(), MAX_POTENTIAL_SIDE)?;
    }
    let oracles = Oracles::new(inst, Exec::Sequential)?;
    if !oracles.objective(inst, flow).is_finite() {
        return Err(MsfError::FlowInfeasible);
    }
    let s = inst.s_vertices();
    let t = inst.t_vertices();
    let eta_s = flow.eta_s(inst);
    let eta_t = flow.eta_t(inst);
    // variables: p' = −p on free S vertices, then q on free T vertices
    let mut var_of = vec![None; inst.n()];
    let mut vars = Vec::new();
    for (v, x) in eta_s.iter().chain(eta_t.iter()) {
        if x < 2 {
            var_of[v] = Some(vars.len());
            vars.push(v);
        }
    }
    let nv = vars.len();
    let mut lp = LinearProgram::new(vec![-Q::one(); nv]);
    let mut infeasible_constant = false;
    let mut push = |lp: &mut LinearProgram, terms: &[(usize, i64)], rhs: i64| {
        let mut row = vec![Q::zero(); nv];
        for &(v, c) in terms {
            if let Some(j) = var_of[v] {
                row[j] += q(c);
            }
        }
        if row.iter().all(|c| c.is_zero()) {
            infeasible_constant |= rhs < 0;
        } else {
            lp.add_row(row, q(rhs));
        }
    };
    for &a in inst.cross_arcs() {
        let arc = inst.arc(a);
        if flow.arcs().contains(a) {
            push(&mut lp, &[(arc.tail, -1), (arc.head, -1)], -arc.weight);
        } else {
            push(&mut lp, &[(arc.tail, 1), (arc.head, 1)], arc.weight);
        }
    }
    for (table, ground, eta) in [(&oracles.g_s, s, &eta_s), (&oracles.g_t, t, &eta_t)] {
        let cur = eta.supp_pos_mask();
        let g_cur = table.at_mask(cur).finite().expect("flow is feasible");
        for (mask, g) in table.masks() {
            let Some(g) = g.finite() else { continue };
            // shift(cur) − shift(mask) ≤ g(mask) − g(cur)
            let terms: Vec<(usize, i64)> = (0..ground.len())
                .filter_map(|k| {
                    let c = (cur >> k & 1) as i64 - (mask >> k & 1) as i64;
                    (c != 0).then_some((ground[k], c))
                })
                .collect();
            push(&mut lp, &terms, g - g_cur);
        }
    }
    let cap = inst.total_weight();
    for j in 0..nv {
        let mut row = vec![Q::zero(); nv];
        row[j] = Q::one();
        lp.add_row(row, q(cap));
    }
    if infeasible_constant {
        return Err(MsfError::NotOptimalFlow);
    }
    let assemble = |vals: &[i64]| {
        let mut pot = Potential::zero(inst);
        for (j, &v) in vars.iter().enumerate() {
            match inst.side_of(v) {
                Side::S => pot.p.set(v, -vals[j]),
                Side::T => pot.q.set(v, vals[j]),
            }
        }
        pot
    };
    let accept = |vals: &[i64]| -> Result<Option<Potential>, MsfError> {
        let pot = assemble(vals);
        Ok(oracles.check_potential(inst, flow, &pot)?.is_optimal().then_some(pot))
    };
    let relaxed = match lp.solve() {
        LpOutcome::Optimal(sol) => sol.x,
        LpOutcome::Infeasible => return Err(MsfError::NotOptimalFlow),
        LpOutcome::Unbounded => unreachable!("every variable is bounded"),
    };
    let to_i64 = |x: &Q| x.to_integer().to_i64().expect("bounded by total weight");
    let rounded: [Vec<i64>; 2] = [
        relaxed.iter().map(|x| to_i64(&x.floor())).collect(),
        relaxed.iter().map(|x| to_i64(&x.ceil())).collect(),
    ];
    for cand in &rounded {
        if let Some(pot) = accept(cand)? {
            return Ok(pot);
        }
    }
    let vals: Vec<i64> = match solve_integer(&lp, Search::FirstFeasible) {
        IntegerOutcome::Optimal(sol) => sol.x.iter().map(|x| x.to_i64().expect("bounded")).collect(),
        IntegerOutcome::Infeasible => return Err(MsfError::NotOptimalFlow),
        IntegerOutcome::Unbounded => unreachable!("every variable is bounded"),
    };
    accept(&vals)?.ok_or_else(|| MsfError::Uncertified(format!("integral point {vals:?} fails the checker")))
}
