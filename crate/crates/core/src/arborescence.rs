//! Minimum-weight r-arborescences (Edmonds' contraction algorithm) with an
//! integral laminar dual, and minimum branchings with a prescribed root set.

use thiserror::Error;

use crate::graph::{ArcSet, DiArc, Digraph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArborescenceError {
    #[error("vertex {vertex} is not reachable from the root")]
    Infeasible { vertex: usize },
    #[error("arc {arc} has negative weight")]
    NegativeWeight { arc: usize },
    #[error("root {root} out of range")]
    RootOutOfRange { root: usize },
    #[error("root vertex {vertex} out of range")]
    RootSetOutOfRange { vertex: usize },
}

/// A weighted digraph with a distinguished root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedInstance {
    pub graph: Digraph,
    pub root: usize,
}

/// Dual of the cut formulation of the r-arborescence problem:
/// singleton values ρ(v) and set values ρ(T') on a laminar family.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ArborescenceDual {
    /// ρ(v) per vertex; the root entry is always zero.
    pub vertex: Vec<i64>,
    /// Sets with at least two vertices and positive value, sorted members.
    pub sets: Vec<(Vec<usize>, i64)>,
}

impl ArborescenceDual {
    pub fn objective(&self) -> i64 {
        self.vertex.iter().sum::<i64>() + self.sets.iter().map(|(_, y)| y).sum::<i64>()
    }

    /// Left-hand side of the dual constraint for `a`: ρ(head) plus every set
    /// value whose set `a` enters.
    pub fn load(&self, a: DiArc) -> i64 {
        let entered: i64 = self
            .sets
            .iter()
            .filter(|(set, _)| set.binary_search(&a.head).is_ok() && set.binary_search(&a.tail).is_err())
            .map(|(_, y)| y)
            .sum();
        self.vertex[a.head] + entered
    }

    pub fn is_laminar(&self) -> bool {
        let sets: Vec<&Vec<usize>> = self.sets.iter().map(|(s, _)| s).collect();
        sets.iter().enumerate().all(|(i, a)| {
            sets[i + 1..].iter().all(|b| {
                let inter = a.iter().filter(|v| b.binary_search(v).is_ok()).count();
                inter == 0 || inter == a.len() || inter == b.len()
            })
        })
    }

    /// First arc (not entering the root) whose dual constraint is violated,
    /// or a negative entry.
    pub fn first_violation(&self, inst: &RootedInstance) -> Option<DualViolation> {
        if let Some(v) = self.vertex.iter().position(|&x| x < 0) {
            return Some(DualViolation::NegativeVertex(v));
        }
        if self.sets.iter().any(|(s, y)| *y < 0 || s.len() < 2) {
            return Some(DualViolation::BadSet);
        }
        inst.graph
            .arcs()
            .iter()
            .enumerate()
            .filter(|(_, a)| a.head != inst.root && a.tail != a.head)
            .find(|(_, a)| self.load(**a) > a.weight)
            .map(|(i, _)| DualViolation::Arc(i))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualViolation {
    NegativeVertex(usize),
    BadSet,
    Arc(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arborescence {
    pub arcs: ArcSet,
    pub weight: i64,
    pub dual: ArborescenceDual,
}

impl Arborescence {
    /// Checks the slackness pair: every chosen arc is tight, and every set
    /// with positive value is entered by exactly one chosen arc.
    pub fn slackness_holds(&self, inst: &RootedInstance) -> bool {
        let arcs = inst.graph.arcs();
        let tight = self.arcs.iter().all(|i| self.dual.load(arcs[i]) == arcs[i].weight);
        let single_entry = self.dual.sets.iter().all(|(set, _)| {
            let entering = self
                .arcs
                .iter()
                .filter(|&i| set.binary_search(&arcs[i].head).is_ok() && set.binary_search(&arcs[i].tail).is_err())
                .count();
            entering == 1
        });
        tight && single_entry
    }
}

#[derive(Debug, Clone, Copy)]
struct LevelArc {
    tail: usize,
    head: usize,
    cost: i64,
}

/// Minimum-weight arborescence rooted at `inst.root` spanning every vertex.
pub fn min_arborescence(inst: &RootedInstance) -> Result<Arborescence, ArborescenceError> {
    let g = &inst.graph;
    let n = g.n();
    if inst.root >= n {
        return Err(ArborescenceError::RootOutOfRange { root: inst.root });
    }
    if let Some(arc) = g.arcs().iter().position(|a| a.weight < 0) {
        return Err(ArborescenceError::NegativeWeight { arc });
    }
    let reach = g.reachable_from(&[inst.root], &ArcSet::full(g.m()));
    if let Some(vertex) = reach.iter().position(|&r| !r) {
        return Err(ArborescenceError::Infeasible { vertex });
    }

    // Arcs into the root or self-loops never take part.
    let usable: Vec<usize> =
        (0..g.m()).filter(|&i| g.arc(i).head != inst.root && g.arc(i).tail != g.arc(i).head).collect();
    let level: Vec<LevelArc> = usable
        .iter()
        .map(|&i| {
            let a = g.arc(i);
            LevelArc { tail: a.tail, head: a.head, cost: a.weight }
        })
        .collect();
    let members: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    let mut raw_duals = Vec::new();
    let chosen = contract_and_solve(n, inst.root, &level, &members, &mut raw_duals);

    let mut arcs = ArcSet::empty(g.m());
    for k in chosen {
        arcs.insert(usable[k]);
    }
    let weight = arcs.iter().map(|i| g.arc(i).weight).sum();

    let mut dual = ArborescenceDual { vertex: vec![0; n], sets: Vec::new() };
    for (set, y) in raw_duals {
        if set.len() == 1 {
            dual.vertex[set[0]] += y;
        } else {
            dual.sets.push((set, y));
        }
    }
    dual.sets.sort();
    Ok(Arborescence { arcs, weight, dual })
}

/// One level of Edmonds' algorithm. Returns the chosen arcs as indices into
/// `arcs`; pushes (members, value) for every positive node dual.
fn contract_and_solve(
    n: usize,
    root: usize,
    arcs: &[LevelArc],
    members: &[Vec<usize>],
    duals: &mut Vec<(Vec<usize>, i64)>,
) -> Vec<usize> {
    // cheapest entering arc, lowest index on ties
    let mut best = vec![usize::MAX; n];
    for (i, a) in arcs.iter().enumerate() {
        if a.head == root || a.tail == a.head {
            continue;
        }
        if best[a.head] == usize::MAX || a.cost < arcs[best[a.head]].cost {
            best[a.head] = i;
        }
    }
    let mut y = vec![0i64; n];
    for v in (0..n).filter(|&v| v != root) {
        debug_assert_ne!(best[v], usize::MAX, "reachability was checked up front");
        y[v] = arcs[best[v]].cost;
        if y[v] > 0 {
            duals.push((members[v].clone(), y[v]));
        }
    }
    let parent = |v: usize| if v == root { None } else { Some(arcs[best[v]].tail) };

    // cycles of the parent map
    let mut cycle_of = vec![usize::MAX; n];
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    let mut state = vec![0u8; n];
    for start in 0..n {
        let mut walk = Vec::new();
        let mut v = start;
        while state[v] == 0 {
            state[v] = 1;
            walk.push(v);
            match parent(v) {
                Some(p) => v = p,
                None => break,
            }
        }
        if state[v] == 1 && parent(v).is_some() {
            let pos = walk.iter().position(|&w| w == v).expect("cycle start on walk");
            let cyc = walk[pos..].to_vec();
            for &w in &cyc {
                cycle_of[w] = cycles.len();
            }
            cycles.push(cyc);
        }
        for w in walk {
            state[w] = 2;
        }
    }
    if cycles.is_empty() {
        return (0..n).filter(|&v| v != root).map(|v| best[v]).collect();
    }

    // contract each cycle into one node
    let mut comp = vec![usize::MAX; n];
    let mut next_members: Vec<Vec<usize>> = Vec::new();
    let mut cycle_node = vec![usize::MAX; cycles.len()];
    for v in 0..n {
        if comp[v] != usize::MAX {
            continue;
        }
        let id = next_members.len();
        if cycle_of[v] == usize::MAX {
            comp[v] = id;
            next_members.push(members[v].clone());
        } else {
            let c = cycle_of[v];
            cycle_node[c] = id;
            let mut set = Vec::new();
            for &w in &cycles[c] {
                comp[w] = id;
                set.extend_from_slice(&members[w]);
            }
            set.sort_unstable();
            next_members.push(set);
        }
    }
    let mut origin = Vec::new();
    let mut next_arcs = Vec::new();
    for (i, a) in arcs.iter().enumerate() {
        let (ct, ch) = (comp[a.tail], comp[a.head]);
        if ct != ch && a.head != root {
            origin.push(i);
            next_arcs.push(LevelArc { tail: ct, head: ch, cost: a.cost - y[a.head] });
        }
    }
    let inner = contract_and_solve(next_members.len(), comp[root], &next_arcs, &next_members, duals);

    let mut chosen: Vec<usize> = inner.iter().map(|&j| origin[j]).collect();
    let mut entry = vec![usize::MAX; cycles.len()];
    for &i in &chosen {
        let h = arcs[i].head;
        if cycle_of[h] != usize::MAX {
            entry[cycle_of[h]] = h;
        }
    }
    for (c, cyc) in cycles.iter().enumerate() {
        debug_assert_ne!(entry[c], usize::MAX, "contracted node {} not entered", cycle_node[c]);
        chosen.extend(cyc.iter().filter(|&&v| v != entry[c]).map(|&v| best[v]));
    }
    chosen.sort_unstable();
    chosen
}

/// A branching (or cobranching) with a prescribed root set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedBranching {
    pub arcs: ArcSet,
    pub value: i64,
}

/// Minimum-weight branching of `d` whose root set is exactly `roots`
/// (`reversed`: cobranching whose coroot set is exactly `roots`).
///
/// A super-root gets zero-weight arcs to the vertices of `roots`; arcs of `d`
/// entering those vertices are dropped so every prescribed vertex must be
/// entered from the super-root.
pub fn min_branching_with_roots(
    d: &Digraph,
    roots: &[usize],
    reversed: bool,
) -> Result<RootedBranching, ArborescenceError> {
    if reversed {
        return min_branching_with_roots(&d.reversed(), roots, false);
    }
    let n = d.n();
    let mut is_root = vec![false; n];
    for &r in roots {
        if r >= n {
            return Err(ArborescenceError::RootSetOutOfRange { vertex: r });
        }
        is_root[r] = true;
    }
    if let Some(arc) = d.arcs().iter().position(|a| a.weight < 0) {
        return Err(ArborescenceError::NegativeWeight { arc });
    }
    let mut aux_arcs = Vec::new();
    let mut origin = Vec::new();
    for (i, a) in d.arcs().iter().enumerate() {
        if !is_root[a.head] {
            aux_arcs.push(*a);
            origin.push(Some(i));
        }
    }
    for r in (0..n).filter(|&r| is_root[r]) {
        aux_arcs.push(DiArc::new(n, r, 0));
        origin.push(None);
    }
    let aux = RootedInstance { graph: Digraph::new(n + 1, aux_arcs).expect("aux endpoints in range"), root: n };
    let arb = min_arborescence(&aux)?;
    let mut arcs = ArcSet::empty(d.m());
    for k in arb.arcs.iter() {
        if let Some(i) = origin[k] {
            arcs.insert(i);
        }
    }
    Ok(RootedBranching { arcs, value: arb.weight })
}
