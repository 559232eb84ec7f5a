//! Brute-force reference oracles and seeded instance generators.
//!
//! Everything here works straight from the definitions (subset sweeps,
//! reachability, parent-pointer walks) and shares no code with the solvers.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::arborescence::RootedInstance;
use crate::exec::{self, Exec};
use crate::graph::{ArcSet, DiArc, Digraph, Instance};

pub const MAX_BRUTE_ARCS: usize = 24;
pub const MAX_ENUM_ARCS: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TestkitError {
    #[error("{what} = {got} exceeds the limit {limit}")]
    TooLarge { what: &'static str, got: usize, limit: usize },
    #[error("no bibranching exists")]
    Infeasible,
    #[error("both sides must be nonempty")]
    EmptySide,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

fn too_large(what: &'static str, got: usize, limit: usize) -> Result<(), TestkitError> {
    if got > limit {
        return Err(TestkitError::TooLarge { what, got, limit });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteBibranching {
    pub arcs: ArcSet,
    pub value: i64,
}

pub fn brute_min_bibranching(inst: &Instance) -> Result<BruteBibranching, TestkitError> {
    brute_min_bibranching_with(inst, Exec::default())
}

/// Minimum-weight arc set in which every S-vertex reaches T and every
/// T-vertex is reachable from S. Among optimal sets the one with fewest arcs
/// wins, then the lexicographically least sorted index list.
pub fn brute_min_bibranching_with(inst: &Instance, exec: Exec) -> Result<BruteBibranching, TestkitError> {
    let m = inst.m();
    too_large("arc count", m, MAX_BRUTE_ARCS)?;
    too_large("vertex count", inst.n(), 64)?;
    let bit = |v: usize| 1u64 << v;
    let s_mask: u64 = inst.s_vertices().iter().map(|&v| bit(v)).sum();
    let t_mask: u64 = inst.t_vertices().iter().map(|&v| bit(v)).sum();
    let tails: Vec<u64> = inst.arcs().iter().map(|a| bit(a.tail)).collect();
    let heads: Vec<u64> = inst.arcs().iter().map(|a| bit(a.head)).collect();
    let mut in_arcs = vec![0u32; inst.n()];
    let mut out_arcs = vec![0u32; inst.n()];
    for (i, a) in inst.arcs().iter().enumerate() {
        in_arcs[a.head] |= 1 << i;
        out_arcs[a.tail] |= 1 << i;
    }
    let closure = |mask: u32, start: u64, from: &[u64], to: &[u64]| {
        let mut reach = start;
        loop {
            let mut next = reach;
            for i in 0..m {
                if mask >> i & 1 == 1 && next & from[i] != 0 {
                    next |= to[i];
                }
            }
            if next == reach {
                return reach;
            }
            reach = next;
        }
    };
    let best = exec::min_over_range(exec, 1u64 << m, |code| {
        let mask = code as u32;
        if inst.t_vertices().iter().any(|&v| mask & in_arcs[v] == 0)
            || inst.s_vertices().iter().any(|&v| mask & out_arcs[v] == 0)
        {
            return None;
        }
        if closure(mask, s_mask, &tails, &heads) & t_mask != t_mask {
            return None;
        }
        if closure(mask, t_mask, &heads, &tails) & s_mask != s_mask {
            return None;
        }
        let weight: i64 = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| inst.arc(i).weight).sum();
        // same cardinality: the set holding the lowest differing index is lexicographically smaller
        let lex = (!mask).reverse_bits();
        Some(((weight, mask.count_ones(), lex), mask))
    });
    let ((value, _, _), mask) = best.ok_or(TestkitError::Infeasible)?;
    let arcs = ArcSet::from_indices(m, (0..m).filter(|i| mask >> i & 1 == 1)).expect("indices in range");
    Ok(BruteBibranching { arcs, value })
}

/// Root set of `arcs` (given by `mask` over `d`'s arc list) if it is a
/// branching: in-degree ≤ 1 and no cycle among parent pointers.
fn branching_roots(n: usize, arcs: &[DiArc], mask: u64) -> Option<Vec<usize>> {
    let mut parent = vec![usize::MAX; n];
    for (i, a) in arcs.iter().enumerate() {
        if mask >> i & 1 == 1 {
            if parent[a.head] != usize::MAX {
                return None;
            }
            parent[a.head] = a.tail;
        }
    }
    for start in 0..n {
        let mut v = start;
        let mut steps = 0;
        while parent[v] != usize::MAX {
            v = parent[v];
            steps += 1;
            if steps > n {
                return None;
            }
        }
    }
    Some((0..n).filter(|&v| parent[v] == usize::MAX).collect())
}

/// All branchings of `d` whose root set is exactly `roots`, in bitmask order.
pub fn enumerate_branchings_with_roots(d: &Digraph, roots: &[usize]) -> Result<Vec<ArcSet>, TestkitError> {
    too_large("arc count", d.m(), MAX_ENUM_ARCS)?;
    let mut want = roots.to_vec();
    want.sort_unstable();
    want.dedup();
    let all: Vec<usize> = (0..d.m()).collect();
    Ok((0..1u64 << d.m())
        .filter(|&mask| branching_roots(d.n(), d.arcs(), mask).is_some_and(|r| r == want))
        .map(|mask| ArcSet::from_mask(d.m(), &all, mask))
        .collect())
}

/// Minimum r-arborescence weight by choosing one entering arc per non-root
/// vertex and keeping the acyclic choices.
pub fn brute_min_arborescence(inst: &RootedInstance) -> Option<i64> {
    let n = inst.graph.n();
    let arcs = inst.graph.arcs();
    let choices: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            if v == inst.root {
                Vec::new()
            } else {
                (0..arcs.len()).filter(|&i| arcs[i].head == v && arcs[i].tail != v).collect()
            }
        })
        .collect();
    if (0..n).any(|v| v != inst.root && choices[v].is_empty()) {
        return None;
    }
    let mut best: Option<i64> = None;
    let mut pick = vec![0usize; n];
    loop {
        let mask: u64 = (0..n).filter(|&v| v != inst.root).map(|v| 1u64 << choices[v][pick[v]]).sum();
        if branching_roots(n, arcs, mask).is_some_and(|r| r == [inst.root]) {
            let w: i64 = (0..n).filter(|&v| v != inst.root).map(|v| arcs[choices[v][pick[v]]].weight).sum();
            best = Some(best.map_or(w, |b| b.min(w)));
        }
        let mut v = 0;
        loop {
            if v == n {
                return best;
            }
            if v != inst.root && pick[v] + 1 < choices[v].len() {
                pick[v] += 1;
                break;
            }
            pick[v] = 0;
            v += 1;
        }
    }
}

/// A random digraph on at least two vertices rooted at 0; arcs avoid
/// self-loops and may be parallel.
pub fn random_rooted_digraph(seed: u64, max_n: usize, max_arcs: usize, wmax: i64) -> RootedInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=max_n.max(2));
    let m = rng.random_range(1..=max_arcs.max(1));
    let arcs = (0..m)
        .map(|_| {
            let tail = rng.random_range(0..n);
            let mut head = rng.random_range(0..n - 1);
            if head >= tail {
                head += 1;
            }
            DiArc::new(tail, head, rng.random_range(0..=wmax))
        })
        .collect();
    RootedInstance { graph: Digraph::new(n, arcs).expect("endpoints in range"), root: 0 }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RepartitionOutcome {
    /// `swapped` is the vertex t of the second conclusion, `None` for the first.
    Found { b1: ArcSet, b2: ArcSet, swapped: Option<usize> },
    NotFound,
}

/// Searches every split of the arcs of `d` into two branchings (B1', B2')
/// with R(B1') = R(B1) − s and R(B2') = R(B2) + s, or with
/// R(B1') = R(B1) − s + t and R(B2') = R(B2) + s − t for some t ∈ R(B2) ∖ R(B1).
pub fn repartition_search(d: &Digraph, b1: &ArcSet, b2: &ArcSet, s: usize) -> Result<RepartitionOutcome, TestkitError> {
    too_large("arc count", d.m(), MAX_ENUM_ARCS)?;
    let m = d.m();
    let full = (1u64 << m) - 1;
    let to_mask = |b: &ArcSet| b.iter().fold(0u64, |acc, i| acc | 1 << i);
    let (m1, m2) = (to_mask(b1), to_mask(b2));
    if m1 & m2 != 0 || m1 | m2 != full {
        return Err(TestkitError::InvalidInput("B1, B2 must partition the arcs".into()));
    }
    let invalid = || TestkitError::InvalidInput("B1 and B2 must be branchings".into());
    let r1 = branching_roots(d.n(), d.arcs(), m1).ok_or_else(invalid)?;
    let r2 = branching_roots(d.n(), d.arcs(), m2).ok_or_else(invalid)?;
    if !r1.contains(&s) || r2.contains(&s) {
        return Err(TestkitError::InvalidInput(format!("vertex {s} must be in R(B1) \\ R(B2)")));
    }
    let sorted = |mut v: Vec<usize>| {
        v.sort_unstable();
        v
    };
    let base1: Vec<usize> = r1.iter().copied().filter(|&v| v != s).collect();
    let base2: Vec<usize> = sorted(r2.iter().copied().chain([s]).collect());
    let mut targets = vec![(base1.clone(), base2.clone(), None)];
    for &t in r2.iter().filter(|t| !r1.contains(t)) {
        let t1 = sorted(base1.iter().copied().chain([t]).collect());
        let t2 = base2.iter().copied().filter(|&v| v != t).collect();
        targets.push((t1, t2, Some(t)));
    }
    let all: Vec<usize> = (0..m).collect();
    for mask in 0..=full {
        let (Some(q1), Some(q2)) = (branching_roots(d.n(), d.arcs(), mask), branching_roots(d.n(), d.arcs(), full & !mask))
        else {
            continue;
        };
        if let Some((_, _, t)) = targets.iter().find(|(t1, t2, _)| *t1 == q1 && *t2 == q2) {
            return Ok(RepartitionOutcome::Found {
                b1: ArcSet::from_mask(m, &all, mask),
                b2: ArcSet::from_mask(m, &all, full & !mask),
                swapped: *t,
            });
        }
    }
    Ok(RepartitionOutcome::NotFound)
}

/// A random valid repartition input: two random branchings on at most `max_n`
/// vertices, their arc multiset as D, and s ∈ R(B1) ∖ R(B2).
pub fn random_repartition_triple(seed: u64, max_n: usize) -> (Digraph, ArcSet, ArcSet, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let n = rng.random_range(2..=max_n.max(2));
        let forest = |rng: &mut ChaCha8Rng| {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(rng);
            let mut arcs = Vec::new();
            for k in 1..n {
                if rng.random_bool(0.6) {
                    let tail = order[rng.random_range(0..k)];
                    arcs.push(DiArc::new(tail, order[k], 0));
                }
            }
            arcs
        };
        let a1 = forest(&mut rng);
        let a2 = forest(&mut rng);
        let has_parent = |arcs: &[DiArc], v: usize| arcs.iter().any(|a| a.head == v);
        let candidates: Vec<usize> = (0..n).filter(|&v| !has_parent(&a1, v) && has_parent(&a2, v)).collect();
        if candidates.is_empty() {
            continue;
        }
        let s = candidates[rng.random_range(0..candidates.len())];
        let k1 = a1.len();
        let m = k1 + a2.len();
        let arcs: Vec<DiArc> = a1.into_iter().chain(a2).collect();
        let d = Digraph::new(n, arcs).expect("endpoints in range");
        let b1 = ArcSet::from_indices(m, 0..k1).expect("in range");
        let b2 = ArcSet::from_indices(m, k1..m).expect("in range");
        return (d, b1, b2, s);
    }
}

/// Relative frequency of A[S], A[T] and A[S,T] arcs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArcMix {
    pub s: u32,
    pub t: u32,
    pub st: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenConfig {
    pub seed: u64,
    pub ns: usize,
    pub nt: usize,
    pub arcs: usize,
    pub wmax: i64,
    pub mix: ArcMix,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { seed: 0, ns: 2, nt: 2, arcs: 6, wmax: 8, mix: ArcMix { s: 1, t: 1, st: 2 } }
    }
}

/// Seeded random instance with S = 0..ns and T = ns..ns+nt. Arc classes that
/// need two vertices on one side fall back to S-T arcs when that side is a
/// single vertex.
pub fn gen_instance(cfg: &GenConfig) -> Result<Instance, TestkitError> {
    if cfg.ns == 0 || cfg.nt == 0 {
        return Err(TestkitError::EmptySide);
    }
    if cfg.wmax < 0 {
        return Err(TestkitError::InvalidInput("wmax must be nonnegative".into()));
    }
    let total = cfg.mix.s + cfg.mix.t + cfg.mix.st;
    if total == 0 {
        return Err(TestkitError::InvalidInput("arc mix must not be all zero".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (ns, nt) = (cfg.ns, cfg.nt);
    let pair = |rng: &mut ChaCha8Rng, lo: usize, len: usize| {
        let tail = rng.random_range(0..len);
        let mut head = rng.random_range(0..len - 1);
        if head >= tail {
            head += 1;
        }
        (lo + tail, lo + head)
    };
    let arcs = (0..cfg.arcs)
        .map(|_| {
            let r = rng.random_range(0..total);
            let (tail, head) = if r < cfg.mix.s && ns >= 2 {
                pair(&mut rng, 0, ns)
            } else if r >= cfg.mix.s && r < cfg.mix.s + cfg.mix.t && nt >= 2 {
                pair(&mut rng, ns, nt)
            } else {
                (rng.random_range(0..ns), ns + rng.random_range(0..nt))
            };
            DiArc::new(tail, head, rng.random_range(0..=cfg.wmax))
        })
        .collect();
    let s: Vec<usize> = (0..ns).collect();
    Instance::new(ns + nt, &s, arcs).map_err(|e| TestkitError::InvalidInput(e.to_string()))
}
