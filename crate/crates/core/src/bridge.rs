//! Translations between optimal LP certificates (x, y, z) and optimal MSF
//! certificates (ξ, p, q), plus the tightening step and the auxiliary rooted
//! graphs used by the MSF → LP direction.

use num_traits::ToPrimitive;
use thiserror::Error;

use crate::arborescence::{min_arborescence, ArborescenceError, RootedInstance};
use crate::exec::Exec;
use crate::graph::{ArcSet, DiArc, Digraph, Instance, Side};
use crate::lp::simplex::q;
use crate::lp::{
    comp_slack_check, dual_feasible, objectives, primal_feasible, solve_dual_integral, LpDual, LpError, LpPrimal,
};
use crate::msf::{Flow, MsfError, Oracles, Potential, PotentialVerdict};
use crate::testkit::brute_min_bibranching;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BridgeError {
    #[error("certificate entries must be integral (x in {{0,1}})")]
    NotIntegral,
    #[error("input pair is not optimal: {0}")]
    InputNotOptimal(String),
    #[error("potential is not optimal: {0}")]
    NotOptimalPotential(String),
    #[error("potential is not tight at flow arc a{}", .arc + 1)]
    NotTight { arc: usize },
    #[error("root arc weight at vertex {vertex} would be negative")]
    NegativeRootWeight { side: Side, vertex: usize },
    #[error("{side:?} side: restricted arborescence weighs {restricted}, unrestricted {full}")]
    RootSetMismatch { side: Side, restricted: i64, full: i64 },
    #[error("tightening did not finish within {0} rounds")]
    RoundLimit(usize),
    #[error("constructed certificate rejected: {0}")]
    CertificateRejected(String),
    #[error(transparent)]
    Arborescence(#[from] ArborescenceError),
    #[error(transparent)]
    Msf(#[from] MsfError),
    #[error(transparent)]
    Lp(#[from] LpError),
}

fn verdict_error(v: PotentialVerdict) -> Result<(), String> {
    match v {
        PotentialVerdict::Optimal => Ok(()),
        other => Err(other.to_string()),
    }
}

/// Reads off (ξ, p, q) from an integral optimal LP pair: ξ is x on A[S,T],
/// −p(u) and q(v) are the dual mass on sets containing the vertex.
pub fn potentials_from_lp_dual(inst: &Instance, x: &LpPrimal, d: &LpDual) -> Result<(Flow, Potential), BridgeError> {
    let arcs = x.as_arc_set().ok_or(BridgeError::NotIntegral)?;
    if arcs.universe() != inst.m() {
        return Err(LpError::LengthMismatch { got: arcs.universe(), m: inst.m() }.into());
    }
    if !d.is_integral() {
        return Err(BridgeError::NotIntegral);
    }
    let mut cross = ArcSet::empty(inst.m());
    for &a in inst.cross_arcs() {
        if arcs.contains(a) {
            cross.insert(a);
        }
    }
    let flow = Flow::new(inst, cross)?;
    let as_int = |v: num_rational::BigRational| v.to_integer().to_i64().ok_or(BridgeError::NotIntegral);
    let p = inst.s_vertices().iter().map(|&u| as_int(-d.vertex_sum(Side::S, u))).collect::<Result<_, _>>()?;
    let qv = inst.t_vertices().iter().map(|&v| as_int(d.vertex_sum(Side::T, v))).collect::<Result<_, _>>()?;
    let pot = Potential::new(inst, p, qv)?;
    let oracles = Oracles::new(inst, Exec::Sequential)?;
    match oracles.check_potential(inst, &flow, &pot) {
        Ok(v) => verdict_error(v).map_err(BridgeError::InputNotOptimal)?,
        Err(MsfError::FlowInfeasible) => return Err(BridgeError::InputNotOptimal("flow is infeasible".into())),
        Err(e) => return Err(e.into()),
    }
    Ok((flow, pot))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tightened {
    pub potential: Potential,
    pub rounds: usize,
}

/// Makes w(a) + p(u) − q(v) = 0 on every flow arc. The first slack flow arc
/// (ascending index) gets p(u) := β − w(a), q(v) := β with
/// β = max(0, w(a) + p(u)); the scan restarts after every update and the
/// result is re-checked each round.
pub fn tighten_potential(inst: &Instance, flow: &Flow, pot: &Potential) -> Result<Tightened, BridgeError> {
    let oracles = Oracles::new(inst, Exec::Sequential)?;
    let check = |p: &Potential| -> Result<(), BridgeError> {
        verdict_error(oracles.check_potential(inst, flow, p)?).map_err(BridgeError::NotOptimalPotential)
    };
    check(pot)?;
    let max_rounds = inst.cross_arcs().len();
    let mut cur = pot.clone();
    let mut rounds = 0;
    while let Some(a) = flow.arcs().iter().find(|&a| cur.reduced_cost(inst, a) != 0) {
        rounds += 1;
        if rounds > max_rounds {
            return Err(BridgeError::RoundLimit(max_rounds));
        }
        let arc = inst.arc(a);
        let beta = (arc.weight + cur.p.get(arc.tail)).max(0);
        cur.p.set(arc.tail, beta - arc.weight);
        cur.q.set(arc.head, beta);
        check(&cur)?;
    }
    Ok(Tightened { potential: cur, rounds })
}

/// Where an auxiliary arc comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuxArc {
    /// Root arc for this instance vertex.
    Root(usize),
    /// Copy of this instance arc.
    Arc(usize),
}

/// One auxiliary graph. Vertices `0..k` are the side's vertices (ascending),
/// `k` is the root. D_T has arcs root → v with weight q(v); D_S has arcs
/// u → root with weight −p(u) and is solved on its reversal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuxGraph {
    pub side: Side,
    pub graph: Digraph,
    pub root: usize,
    pub vertices: Vec<usize>,
    pub origin: Vec<AuxArc>,
}

impl AuxGraph {
    /// The arborescence problem: D_T as is, D_S reversed.
    pub fn rooted(&self) -> RootedInstance {
        let graph = match self.side {
            Side::T => self.graph.clone(),
            Side::S => self.graph.reversed(),
        };
        RootedInstance { graph, root: self.root }
    }

    /// Arcs as (tail, head, weight) in instance ids, with `None` for the root.
    pub fn labelled_arcs(&self) -> Vec<(Option<usize>, Option<usize>, i64)> {
        let name = |x: usize| (x != self.root).then(|| self.vertices[x]);
        self.graph.arcs().iter().map(|a| (name(a.tail), name(a.head), a.weight)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuxPair {
    pub s: AuxGraph,
    pub t: AuxGraph,
}

pub fn build_aux(inst: &Instance, pot: &Potential) -> Result<AuxPair, BridgeError> {
    let make = |side: Side| -> Result<AuxGraph, BridgeError> {
        let sg = inst.side_graph(side);
        let k = sg.vertices.len();
        let mut arcs = Vec::new();
        let mut origin = Vec::new();
        for (l, &v) in sg.vertices.iter().enumerate() {
            let w = match side {
                Side::T => pot.q.get(v),
                Side::S => -pot.p.get(v),
            };
            if w < 0 {
                return Err(BridgeError::NegativeRootWeight { side, vertex: v });
            }
            arcs.push(match side {
                Side::T => DiArc::new(k, l, w),
                Side::S => DiArc::new(l, k, w),
            });
            origin.push(AuxArc::Root(v));
        }
        for (a, &i) in sg.graph.arcs().iter().zip(&sg.arcs) {
            arcs.push(*a);
            origin.push(AuxArc::Arc(i));
        }
        let graph = Digraph::new(k + 1, arcs).expect("endpoints in range");
        Ok(AuxGraph { side, graph, root: k, vertices: sg.vertices, origin })
    };
    Ok(AuxPair { s: make(Side::S)?, t: make(Side::T)? })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpCertificate {
    pub arcs: ArcSet,
    pub x: LpPrimal,
    pub dual: LpDual,
    pub value: i64,
}

/// Builds (x*, y*, z*) from a tight optimal (ξ, p, q). On each side the dual
/// comes from a minimum arborescence of the full auxiliary graph; the arc set
/// comes from one whose root arcs enter exactly the flow support, which must
/// weigh the same.
pub fn lp_cert_from_potential(inst: &Instance, flow: &Flow, pot: &Potential) -> Result<LpCertificate, BridgeError> {
    if let Some(arc) = flow.arcs().iter().find(|&a| pot.reduced_cost(inst, a) != 0) {
        return Err(BridgeError::NotTight { arc });
    }
    let aux = build_aux(inst, pot)?;
    let mut arcs = flow.arcs().clone();
    let mut dual = LpDual::default();
    for (g, eta) in [(&aux.s, flow.eta_s(inst)), (&aux.t, flow.eta_t(inst))] {
        let rooted = g.rooted();
        let full = min_arborescence(&rooted)?;
        let in_x: Vec<bool> = g.vertices.iter().map(|&v| eta.get(v) > 0).collect();
        let keep: Vec<usize> = (0..rooted.graph.m())
            .filter(|&i| {
                let a = rooted.graph.arc(i);
                match g.origin[i] {
                    AuxArc::Root(_) => in_x[a.head],
                    AuxArc::Arc(_) => !in_x[a.head],
                }
            })
            .collect();
        let restricted = RootedInstance {
            graph: Digraph::new(rooted.graph.n(), keep.iter().map(|&i| rooted.graph.arc(i)).collect())
                .expect("endpoints in range"),
            root: rooted.root,
        };
        let arb = min_arborescence(&restricted)?;
        if arb.weight != full.weight {
            return Err(BridgeError::RootSetMismatch { side: g.side, restricted: arb.weight, full: full.weight });
        }
        for i in arb.arcs.iter() {
            if let AuxArc::Arc(a) = g.origin[keep[i]] {
                arcs.insert(a);
            }
        }
        for (l, &v) in g.vertices.iter().enumerate() {
            dual.add(g.side, vec![v], q(full.dual.vertex[l]));
        }
        for (members, y) in &full.dual.sets {
            dual.add(g.side, members.iter().map(|&l| g.vertices[l]).collect(), q(*y));
        }
    }
    let x = LpPrimal::indicator(&arcs);
    if let Some(v) = primal_feasible(inst, &x)? {
        return Err(BridgeError::CertificateRejected(v.to_string()));
    }
    if let Some(v) = dual_feasible(inst, &dual)? {
        return Err(BridgeError::CertificateRejected(v.to_string()));
    }
    if let Some(v) = comp_slack_check(inst, &x, &dual)? {
        return Err(BridgeError::CertificateRejected(v.to_string()));
    }
    let (pv, dv) = objectives(inst, &x, &dual)?;
    if pv != dv {
        return Err(BridgeError::CertificateRejected(format!("primal value {pv} differs from dual value {dv}")));
    }
    let value = inst.weight_of(&arcs);
    Ok(LpCertificate { arcs, x, dual, value })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    BrutePrimal,
    IntegralDual,
    LpToMsf,
    Tighten,
    MsfToLp,
    Agreement,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("stage {stage:?}: {detail}")]
pub struct RoundtripError {
    pub stage: Stage,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundtripReport {
    pub primal_value: i64,
    pub dual_value: i64,
    pub msf_value: i64,
    pub certificate_value: i64,
    pub tighten_rounds: usize,
    pub flow: Flow,
    pub potential: Potential,
    pub certificate: LpCertificate,
}

/// Brute-force primal and integral dual, then LP → MSF, tightening, and
/// MSF → LP, with values compared along the way.
pub fn roundtrip_verify(inst: &Instance) -> Result<RoundtripReport, RoundtripError> {
    let fail = |stage: Stage| move |e: &dyn std::fmt::Display| RoundtripError { stage, detail: e.to_string() };
    let primal = brute_min_bibranching(inst).map_err(|e| fail(Stage::BrutePrimal)(&e))?;
    let dual = solve_dual_integral(inst).map_err(|e| fail(Stage::IntegralDual)(&e))?;
    if dual.value != primal.value {
        return Err(fail(Stage::Agreement)(&format!("primal {} but dual {}", primal.value, dual.value)));
    }
    let x = LpPrimal::indicator(&primal.arcs);
    let (flow, pot) = potentials_from_lp_dual(inst, &x, &dual.dual).map_err(|e| fail(Stage::LpToMsf)(&e))?;
    let msf_value = Oracles::new(inst, Exec::Sequential)
        .map_err(|e| fail(Stage::LpToMsf)(&e))?
        .objective(inst, &flow)
        .finite()
        .ok_or_else(|| fail(Stage::LpToMsf)(&"flow is infeasible"))?;
    let tight = tighten_potential(inst, &flow, &pot).map_err(|e| fail(Stage::Tighten)(&e))?;
    let cert = lp_cert_from_potential(inst, &flow, &tight.potential).map_err(|e| fail(Stage::MsfToLp)(&e))?;
    let (_, cert_dual) = objectives(inst, &cert.x, &cert.dual).map_err(|e| fail(Stage::MsfToLp)(&e))?;
    if msf_value != primal.value || cert.value != primal.value || cert_dual != q(primal.value) {
        return Err(fail(Stage::Agreement)(&format!(
            "values: primal {}, msf {}, certificate {} / {}",
            primal.value, msf_value, cert.value, cert_dual
        )));
    }
    Ok(RoundtripReport {
        primal_value: primal.value,
        dual_value: dual.value,
        msf_value,
        certificate_value: cert.value,
        tighten_rounds: tight.rounds,
        flow,
        potential: tight.potential,
        certificate: cert,
    })
}
