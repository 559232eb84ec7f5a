//! Directed graphs, the S/T bipartition, cut and boundary operators, and the
//! branching / cobranching / bibranching predicates.

mod sets;
pub mod text;

use std::collections::VecDeque;

use fixedbitset::FixedBitSet;
use thiserror::Error;

pub use sets::{ArcSet, IntVecOnSet};

/// Largest admissible arc weight (exclusive).
pub const WEIGHT_LIMIT: i64 = 1 << 31;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range (n = {n})")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("arc index {arc} out of range (m = {m})")]
    ArcOutOfRange { arc: usize, m: usize },
    #[error("arc a{} is not an S-T arc", .arc + 1)]
    NotCrossArc { arc: usize },
    #[error("vector ground set does not match")]
    GroundMismatch,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InstanceError {
    #[error("S must be nonempty")]
    EmptyS,
    #[error("T must be nonempty")]
    EmptyT,
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("vertex {0} listed in both S and T")]
    BothSides(usize),
    #[error("vertex {0} listed in neither S nor T")]
    NoSide(usize),
    #[error("vertex {0} listed twice")]
    Duplicate(usize),
    #[error("arc a{} is a self-loop", .0 + 1)]
    SelfLoop(usize),
    #[error("arc a{} goes from T to S", .0 + 1)]
    TToS(usize),
    #[error("arc a{a} has weight {w} outside [0, 2^31)", a = .0 + 1, w = .1)]
    BadWeight(usize, i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    S,
    T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CutDir {
    Out,
    In,
}

/// Which of A[S], A[T], A[S,T] an arc belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArcClass {
    InS,
    InT,
    Cross,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DiArc {
    pub tail: usize,
    pub head: usize,
    pub weight: i64,
}

impl DiArc {
    pub fn new(tail: usize, head: usize, weight: i64) -> Self {
        DiArc { tail, head, weight }
    }

    pub fn reversed(self) -> Self {
        DiArc { tail: self.head, head: self.tail, weight: self.weight }
    }
}

/// A weighted digraph on vertices `0..n`. Parallel arcs are allowed, arc
/// identity is the position in the arc list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    arcs: Vec<DiArc>,
}

/// Result of the branching (or cobranching) test. `roots` holds R(B) for a
/// branching and R*(B) for a cobranching; it is filled in even when the arc
/// set fails the test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchingClass {
    pub is_branching: bool,
    pub roots: Vec<usize>,
}

impl Digraph {
    pub fn new(n: usize, arcs: Vec<DiArc>) -> Result<Self, GraphError> {
        for a in &arcs {
            for v in [a.tail, a.head] {
                if v >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: v, n });
                }
            }
        }
        Ok(Digraph { n, arcs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[DiArc] {
        &self.arcs
    }

    pub fn arc(&self, i: usize) -> DiArc {
        self.arcs[i]
    }

    pub fn reversed(&self) -> Digraph {
        Digraph { n: self.n, arcs: self.arcs.iter().map(|a| a.reversed()).collect() }
    }

    fn membership(&self, x: &[usize]) -> Result<Vec<bool>, GraphError> {
        let mut member = vec![false; self.n];
        for &v in x {
            if v >= self.n {
                return Err(GraphError::VertexOutOfRange { vertex: v, n: self.n });
            }
            member[v] = true;
        }
        Ok(member)
    }

    /// δ⁺X (`CutDir::Out`) or δ⁻X (`CutDir::In`).
    pub fn cut_arcs(&self, x: &[usize], dir: CutDir) -> Result<ArcSet, GraphError> {
        let member = self.membership(x)?;
        let mut cut = ArcSet::empty(self.m());
        for (i, a) in self.arcs.iter().enumerate() {
            let hit = match dir {
                CutDir::Out => member[a.tail] && !member[a.head],
                CutDir::In => !member[a.tail] && member[a.head],
            };
            if hit {
                cut.insert(i);
            }
        }
        Ok(cut)
    }

    /// Strongly connected components with no entering arc, each sorted, listed
    /// by ascending minimum vertex.
    pub fn source_components(&self) -> Vec<Vec<usize>> {
        let comp = self.scc_ids();
        let k = comp.iter().copied().max().map_or(0, |c| c + 1);
        let mut entered = vec![false; k];
        for a in &self.arcs {
            if comp[a.tail] != comp[a.head] {
                entered[comp[a.head]] = true;
            }
        }
        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); k];
        for v in 0..self.n {
            groups[comp[v]].push(v);
        }
        let mut out: Vec<Vec<usize>> =
            groups.into_iter().enumerate().filter(|(c, _)| !entered[*c]).map(|(_, g)| g).collect();
        out.sort_by_key(|g| g[0]);
        out
    }

    /// Component id per vertex (Tarjan, iterative).
    pub fn scc_ids(&self) -> Vec<usize> {
        let n = self.n;
        let mut adj = vec![Vec::new(); n];
        for a in &self.arcs {
            adj[a.tail].push(a.head);
        }
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut on_stack = vec![false; n];
        let mut comp = vec![usize::MAX; n];
        let mut stack = Vec::new();
        let mut next_index = 0;
        let mut next_comp = 0;
        for start in 0..n {
            if index[start] != usize::MAX {
                continue;
            }
            let mut call: Vec<(usize, usize)> = vec![(start, 0)];
            index[start] = next_index;
            low[start] = next_index;
            next_index += 1;
            stack.push(start);
            on_stack[start] = true;
            while let Some(&mut (v, ref mut pos)) = call.last_mut() {
                if *pos < adj[v].len() {
                    let w = adj[v][*pos];
                    *pos += 1;
                    if index[w] == usize::MAX {
                        index[w] = next_index;
                        low[w] = next_index;
                        next_index += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    call.pop();
                    if let Some(&(parent, _)) = call.last() {
                        low[parent] = low[parent].min(low[v]);
                    }
                    if low[v] == index[v] {
                        while let Some(w) = stack.pop() {
                            on_stack[w] = false;
                            comp[w] = next_comp;
                            if w == v {
                                break;
                            }
                        }
                        next_comp += 1;
                    }
                }
            }
        }
        comp
    }

    /// Branching test: in-degree at most one and no directed cycle.
    pub fn classify_branching(&self, b: &ArcSet) -> BranchingClass {
        let mut parent: Vec<Option<usize>> = vec![None; self.n];
        let mut ok = true;
        for i in b.iter() {
            let a = self.arcs[i];
            if parent[a.head].is_some() {
                ok = false;
            }
            parent[a.head] = Some(a.tail);
        }
        let roots: Vec<usize> = (0..self.n).filter(|&v| parent[v].is_none()).collect();
        if ok {
            ok = !has_parent_cycle(&parent);
        }
        BranchingClass { is_branching: ok, roots }
    }

    /// Cobranching test (the reversal is a branching); `roots` is R*(B).
    pub fn classify_cobranching(&self, b: &ArcSet) -> BranchingClass {
        self.reversed().classify_branching(b)
    }

    /// Vertices reachable from `sources` using only arcs in `allowed`.
    pub fn reachable_from(&self, sources: &[usize], allowed: &ArcSet) -> Vec<bool> {
        let mut adj = vec![Vec::new(); self.n];
        for i in allowed.iter() {
            let a = self.arcs[i];
            adj[a.tail].push(a.head);
        }
        let mut seen = vec![false; self.n];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for &s in sources {
            if !seen[s] {
                seen[s] = true;
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen
    }
}

/// Whether following parent pointers ever closes a cycle.
fn has_parent_cycle(parent: &[Option<usize>]) -> bool {
    // 0 = unvisited, 1 = on current walk, 2 = done
    let mut state = vec![0u8; parent.len()];
    for start in 0..parent.len() {
        let mut walk = Vec::new();
        let mut v = start;
        loop {
            match state[v] {
                2 => break,
                1 => return true,
                _ => {}
            }
            state[v] = 1;
            walk.push(v);
            match parent[v] {
                Some(p) => v = p,
                None => break,
            }
        }
        for w in walk {
            state[w] = 2;
        }
    }
    false
}

/// The subgraph D[S] or D[T] in local numbering.
#[derive(Debug, Clone)]
pub struct SideGraph {
    pub side: Side,
    pub graph: Digraph,
    /// Local vertex -> instance vertex (ascending).
    pub vertices: Vec<usize>,
    /// Local arc -> instance arc (ascending).
    pub arcs: Vec<usize>,
}

impl SideGraph {
    pub fn local_of(&self, v: usize) -> Option<usize> {
        self.vertices.binary_search(&v).ok()
    }
}

/// Both predicates reported by [`Instance::is_bibranching`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BibranchingCheck {
    /// Every S-vertex reaches T and every T-vertex is reachable from S.
    pub reachability: bool,
    /// B[S] cobranching, B[T] branching, and B[S,T] covers exactly R*(B[S]) and R(B[T]).
    pub structured: bool,
}

/// A shortest-bibranching instance: digraph, S/T bipartition, arc weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    graph: Digraph,
    in_s: FixedBitSet,
    s: Vec<usize>,
    t: Vec<usize>,
    cross: Vec<usize>,
}

impl Instance {
    /// Builds an instance on `0..n` with the given S; T is the complement.
    pub fn new(n: usize, s: &[usize], arcs: Vec<DiArc>) -> Result<Self, InstanceError> {
        let mut in_s = FixedBitSet::with_capacity(n);
        for &v in s {
            if v >= n {
                return Err(InstanceError::VertexOutOfRange(v));
            }
            if in_s.contains(v) {
                return Err(InstanceError::Duplicate(v));
            }
            in_s.insert(v);
        }
        let s: Vec<usize> = in_s.ones().collect();
        let t: Vec<usize> = (0..n).filter(|&v| !in_s.contains(v)).collect();
        if s.is_empty() {
            return Err(InstanceError::EmptyS);
        }
        if t.is_empty() {
            return Err(InstanceError::EmptyT);
        }
        let mut cross = Vec::new();
        for (i, a) in arcs.iter().enumerate() {
            if a.tail >= n {
                return Err(InstanceError::VertexOutOfRange(a.tail));
            }
            if a.head >= n {
                return Err(InstanceError::VertexOutOfRange(a.head));
            }
            if a.tail == a.head {
                return Err(InstanceError::SelfLoop(i));
            }
            if !(0..WEIGHT_LIMIT).contains(&a.weight) {
                return Err(InstanceError::BadWeight(i, a.weight));
            }
            match (in_s.contains(a.tail), in_s.contains(a.head)) {
                (false, true) => return Err(InstanceError::TToS(i)),
                (true, false) => cross.push(i),
                _ => {}
            }
        }
        let graph = Digraph { n, arcs };
        Ok(Instance { graph, in_s, s, t, cross })
    }

    pub fn n(&self) -> usize {
        self.graph.n
    }

    pub fn m(&self) -> usize {
        self.graph.arcs.len()
    }

    pub fn arcs(&self) -> &[DiArc] {
        &self.graph.arcs
    }

    pub fn arc(&self, i: usize) -> DiArc {
        self.graph.arcs[i]
    }

    pub fn digraph(&self) -> &Digraph {
        &self.graph
    }

    pub fn s_vertices(&self) -> &[usize] {
        &self.s
    }

    pub fn t_vertices(&self) -> &[usize] {
        &self.t
    }

    pub fn side_vertices(&self, side: Side) -> &[usize] {
        match side {
            Side::S => &self.s,
            Side::T => &self.t,
        }
    }

    pub fn side_of(&self, v: usize) -> Side {
        if self.in_s.contains(v) {
            Side::S
        } else {
            Side::T
        }
    }

    pub fn arc_class(&self, i: usize) -> ArcClass {
        let a = self.graph.arcs[i];
        match (self.in_s.contains(a.tail), self.in_s.contains(a.head)) {
            (true, true) => ArcClass::InS,
            (false, false) => ArcClass::InT,
            _ => ArcClass::Cross,
        }
    }

    /// Indices of A[S,T] in ascending order.
    pub fn cross_arcs(&self) -> &[usize] {
        &self.cross
    }

    pub fn total_weight(&self) -> i64 {
        self.graph.arcs.iter().map(|a| a.weight).sum()
    }

    pub fn weight_of(&self, b: &ArcSet) -> i64 {
        b.iter().map(|i| self.graph.arcs[i].weight).sum()
    }

    pub fn cut_arcs(&self, x: &[usize], dir: CutDir) -> Result<ArcSet, GraphError> {
        self.graph.cut_arcs(x, dir)
    }

    /// D[S] or D[T] with local numbering.
    pub fn side_graph(&self, side: Side) -> SideGraph {
        let vertices = self.side_vertices(side).to_vec();
        let mut local = vec![usize::MAX; self.n()];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i;
        }
        let want = match side {
            Side::S => ArcClass::InS,
            Side::T => ArcClass::InT,
        };
        let mut arcs = Vec::new();
        let mut local_arcs = Vec::new();
        for i in 0..self.m() {
            if self.arc_class(i) == want {
                let a = self.graph.arcs[i];
                arcs.push(i);
                local_arcs.push(DiArc::new(local[a.tail], local[a.head], a.weight));
            }
        }
        let graph = Digraph { n: vertices.len(), arcs: local_arcs };
        SideGraph { side, graph, vertices, arcs }
    }

    /// ∂ξ over all vertices: arcs of ξ leaving v minus arcs of ξ entering v.
    pub fn boundary(&self, xi: &ArcSet) -> Result<IntVecOnSet, GraphError> {
        let mut values = vec![0i64; self.n()];
        for i in xi.iter() {
            if i >= self.m() {
                return Err(GraphError::ArcOutOfRange { arc: i, m: self.m() });
            }
            if self.arc_class(i) != ArcClass::Cross {
                return Err(GraphError::NotCrossArc { arc: i });
            }
            let a = self.graph.arcs[i];
            values[a.tail] += 1;
            values[a.head] -= 1;
        }
        Ok(IntVecOnSet::new((0..self.n()).collect(), values))
    }

    /// Restriction of B to A[S], A[T] or A[S,T].
    pub fn arcs_of_class(&self, b: &ArcSet, class: ArcClass) -> ArcSet {
        let mut out = ArcSet::empty(self.m());
        for i in b.iter().filter(|&i| self.arc_class(i) == class) {
            out.insert(i);
        }
        out
    }

    pub fn is_bibranching(&self, b: &ArcSet) -> BibranchingCheck {
        let forward = self.graph.reachable_from(&self.s, b);
        let reaches_t = self.graph.reversed().reachable_from(&self.t, b);
        let reachability =
            self.t.iter().all(|&v| forward[v]) && self.s.iter().all(|&v| reaches_t[v]);
        BibranchingCheck { reachability, structured: self.is_structured_bibranching(b) }
    }

    fn is_structured_bibranching(&self, b: &ArcSet) -> bool {
        let cover = self.arcs_of_class(b, ArcClass::Cross);
        let Ok(boundary) = self.boundary(&cover) else {
            return false;
        };
        let sides = [(Side::S, true), (Side::T, false)];
        sides.into_iter().all(|(side, co)| {
            let sg = self.side_graph(side);
            let mut local = ArcSet::empty(sg.graph.m());
            for (li, &gi) in sg.arcs.iter().enumerate() {
                if b.contains(gi) {
                    local.insert(li);
                }
            }
            let class = if co {
                sg.graph.classify_cobranching(&local)
            } else {
                sg.graph.classify_branching(&local)
            };
            let roots: Vec<usize> = class.roots.iter().map(|&l| sg.vertices[l]).collect();
            let covered: Vec<usize> = sg
                .vertices
                .iter()
                .copied()
                .filter(|&v| if co { boundary.get(v) > 0 } else { boundary.get(v) < 0 })
                .collect();
            class.is_branching && roots == covered
        })
    }
}
