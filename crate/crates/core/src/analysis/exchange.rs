//! The exchange graph `H_ε` on `A`, its vertex classes and its tree
//! decompositions.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::{AnalysisError, ClawFamily};
use crate::instance::{ConflictGraph, VertexId, VertexSet};

/// Arc `(a, b)` iff `a ∈ N_b^+`, `a ≠ b` and `w_a ≥ (1−ε)·w_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExchangeGraph {
    pub epsilon: f64,
    pub vertices: VertexSet,
    pub arcs: BTreeSet<(VertexId, VertexId)>,
    /// orientation-free adjacency
    neighbors: BTreeMap<VertexId, VertexSet>,
}

impl ExchangeGraph {
    pub fn has_arc(&self, a: VertexId, b: VertexId) -> bool {
        self.arcs.contains(&(a, b))
    }

    pub fn joined(&self, a: VertexId, b: VertexId) -> bool {
        self.has_arc(a, b) || self.has_arc(b, a)
    }

    /// Distinct vertices joined to `v` in either direction.
    pub fn neighbors(&self, v: VertexId) -> &VertexSet {
        &self.neighbors[&v]
    }

    /// In-degree plus out-degree.
    pub fn total_degree(&self, v: VertexId) -> usize {
        self.arcs.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn max_total_degree(&self) -> usize {
        self.vertices
            .iter()
            .map(|&v| self.total_degree(v))
            .max()
            .unwrap_or(0)
    }

    /// Orientation of an undirected edge as an arc: the endpoint lying in the
    /// other's `N^+` is the tail, the lower id when both arcs exist.
    pub fn orient(&self, u: VertexId, v: VertexId) -> Option<(VertexId, VertexId)> {
        let (lo, hi) = (u.min(v), u.max(v));
        if self.has_arc(lo, hi) {
            Some((lo, hi))
        } else if self.has_arc(hi, lo) {
            Some((hi, lo))
        } else {
            None
        }
    }

    /// Undirected edges `(u, v)`, `u < v`, ascending.
    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let set: BTreeSet<_> = self
            .arcs
            .iter()
            .map(|&(a, b)| (a.min(b), a.max(b)))
            .collect();
        set.into_iter().collect()
    }
}

pub fn build_exchange_graph(
    g: &ConflictGraph,
    family: &ClawFamily,
    epsilon: f64,
) -> Result<ExchangeGraph, AnalysisError> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(AnalysisError::BadParameters {
            epsilon,
            delta: f64::NAN,
        });
    }
    let mut arcs = BTreeSet::new();
    for &b in &family.a {
        let wb = g.weight(b);
        for &a in family.closed(b) {
            if a != b && g.weight(a) >= (1.0 - epsilon) * wb {
                arcs.insert((a, b));
            }
        }
    }
    let mut neighbors: BTreeMap<VertexId, VertexSet> =
        family.a.iter().map(|&v| (v, VertexSet::new())).collect();
    for &(a, b) in &arcs {
        neighbors.get_mut(&a).unwrap().insert(b);
        neighbors.get_mut(&b).unwrap().insert(a);
    }
    let h = ExchangeGraph {
        epsilon,
        vertices: family.a.clone(),
        arcs,
        neighbors,
    };
    let bound = g.k() * (g.k() - 1);
    for &v in &h.vertices {
        let degree = h.total_degree(v);
        if degree > bound {
            return Err(AnalysisError::DegreeBound {
                vertex: v,
                degree,
                bound,
            });
        }
    }
    Ok(h)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VertexClass {
    I1,
    I2,
    D,
}

impl VertexClass {
    pub fn name(self) -> &'static str {
        match self {
            VertexClass::I1 => "I1",
            VertexClass::I2 => "I2",
            VertexClass::D => "D",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub i1: VertexSet,
    pub i2: VertexSet,
    pub d: VertexSet,
    /// (tail, head) per isolated edge, ascending by tail
    pub isolated_edges: Vec<(VertexId, VertexId)>,
}

impl Classification {
    pub fn class_of(&self, v: VertexId) -> Option<VertexClass> {
        if self.i1.contains(&v) {
            Some(VertexClass::I1)
        } else if self.i2.contains(&v) {
            Some(VertexClass::I2)
        } else if self.d.contains(&v) {
            Some(VertexClass::D)
        } else {
            None
        }
    }

    /// Every vertex that is not isolated.
    pub fn non_isolated(&self) -> VertexSet {
        self.i2.union(&self.d).copied().collect()
    }

    pub fn isolated_or_edge(&self) -> VertexSet {
        self.i1.union(&self.i2).copied().collect()
    }
}

pub fn classify_vertices(h: &ExchangeGraph) -> Classification {
    let mut c = Classification {
        i1: VertexSet::new(),
        i2: VertexSet::new(),
        d: VertexSet::new(),
        isolated_edges: Vec::new(),
    };
    for &v in &h.vertices {
        let nb = h.neighbors(v);
        match nb.len() {
            0 => {
                c.i1.insert(v);
            }
            1 => {
                let u = *nb.first().unwrap();
                if h.neighbors(u).len() == 1 {
                    c.i2.insert(v);
                    if v < u {
                        c.isolated_edges.push(h.orient(v, u).unwrap());
                    }
                } else {
                    c.d.insert(v);
                }
            }
            _ => {
                c.d.insert(v);
            }
        }
    }
    c.isolated_edges.sort_unstable();
    c
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecompositionMode {
    Stars,
    Min2Trees,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tree {
    pub vertices: VertexSet,
    /// arcs of `H_ε` as (tail, head)
    pub edges: Vec<(VertexId, VertexId)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub mode: DecompositionMode,
    pub trees: Vec<Tree>,
}

impl Decomposition {
    pub fn covered(&self) -> VertexSet {
        self.trees.iter().flat_map(|t| t.vertices.iter().copied()).collect()
    }

    /// Checks the size and cover invariants of the mode against `input`.
    pub fn validate(&self, k: usize, input: &VertexSet) -> Result<(), String> {
        let mut seen = VertexSet::new();
        for t in &self.trees {
            for &v in &t.vertices {
                if !seen.insert(v) {
                    return Err(format!("vertex {v} is covered twice"));
                }
            }
            if t.edges.len() + 1 != t.vertices.len() {
                return Err(format!("{:?} is not a tree", t.vertices));
            }
            let deg = k * (k - 1);
            match self.mode {
                DecompositionMode::Stars => {
                    if t.vertices.len() < 2 || t.vertices.len() > 1 + deg {
                        return Err(format!("star of size {}", t.vertices.len()));
                    }
                    if t.vertices.len() > 2 {
                        let center = star_center(t);
                        if center.is_none() {
                            return Err(format!("{:?} is not a star", t.vertices));
                        }
                    }
                }
                DecompositionMode::Min2Trees => {
                    if t.edges.len() < 2 || t.vertices.len() > 1 + 2 * deg {
                        return Err(format!(
                            "tree with {} edges and {} vertices",
                            t.edges.len(),
                            t.vertices.len()
                        ));
                    }
                }
            }
        }
        if &seen != input {
            return Err("decomposition does not cover its input exactly".into());
        }
        Ok(())
    }
}

fn star_center(t: &Tree) -> Option<VertexId> {
    let mut deg: BTreeMap<VertexId, usize> = BTreeMap::new();
    for &(a, b) in &t.edges {
        *deg.entry(a).or_default() += 1;
        *deg.entry(b).or_default() += 1;
    }
    deg.into_iter()
        .find(|&(_, d)| d + 1 == t.vertices.len())
        .map(|(v, _)| v)
}

type UEdge = (VertexId, VertexId);

/// BFS spanning forest of `H[input]`, roots and neighbors in ascending id.
fn spanning_forest(h: &ExchangeGraph, input: &VertexSet) -> BTreeSet<UEdge> {
    let mut seen = VertexSet::new();
    let mut edges = BTreeSet::new();
    for &root in input {
        if !seen.insert(root) {
            continue;
        }
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &u in h.neighbors(v) {
                if input.contains(&u) && seen.insert(u) {
                    edges.insert((v.min(u), v.max(u)));
                    queue.push_back(u);
                }
            }
        }
    }
    edges
}

fn forest_adjacency(vertices: &VertexSet, edges: &BTreeSet<UEdge>) -> BTreeMap<VertexId, Vec<VertexId>> {
    let mut adj: BTreeMap<VertexId, Vec<VertexId>> =
        vertices.iter().map(|&v| (v, Vec::new())).collect();
    for &(u, v) in edges {
        adj.get_mut(&u).unwrap().push(v);
        adj.get_mut(&v).unwrap().push(u);
    }
    adj
}

/// Vertices reachable from `start` without using edge `skip`.
fn part_of(
    adj: &BTreeMap<VertexId, Vec<VertexId>>,
    start: VertexId,
    skip: UEdge,
) -> VertexSet {
    let mut seen = VertexSet::from([start]);
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &u in &adj[&v] {
            if (v.min(u), v.max(u)) == skip {
                continue;
            }
            if seen.insert(u) {
                stack.push(u);
            }
        }
    }
    seen
}

fn into_decomposition(
    h: &ExchangeGraph,
    mode: DecompositionMode,
    input: &VertexSet,
    edges: &BTreeSet<UEdge>,
) -> Decomposition {
    let adj = forest_adjacency(input, edges);
    let mut seen = VertexSet::new();
    let mut trees = Vec::new();
    for &root in input {
        if seen.contains(&root) {
            continue;
        }
        let vertices = part_of(&adj, root, (usize::MAX, usize::MAX));
        seen.extend(vertices.iter().copied());
        let tree_edges = edges
            .iter()
            .filter(|(u, _)| vertices.contains(u))
            .map(|&(u, v)| h.orient(u, v).expect("forest edges come from H"))
            .collect();
        trees.push(Tree {
            vertices,
            edges: tree_edges,
        });
    }
    Decomposition { mode, trees }
}

/// Spanning forest of `H[input]` pruned to stars: while some edge has both
/// endpoints of degree ≥ 2 (the middle of a path of length 3), the
/// lexicographically smallest one is removed.
pub fn star_decomposition(
    g: &ConflictGraph,
    h: &ExchangeGraph,
    input: &VertexSet,
) -> Result<Decomposition, AnalysisError> {
    for &v in input {
        if !h.vertices.contains(&v) {
            return Err(AnalysisError::NotInA(v));
        }
        if !h.neighbors(v).iter().any(|u| input.contains(u)) {
            return Err(AnalysisError::IsolatedInput(v));
        }
    }
    let mut edges = spanning_forest(h, input);
    let mut degree: BTreeMap<VertexId, usize> = input.iter().map(|&v| (v, 0)).collect();
    for &(u, v) in &edges {
        *degree.get_mut(&u).unwrap() += 1;
        *degree.get_mut(&v).unwrap() += 1;
    }
    loop {
        let middle = edges
            .iter()
            .copied()
            .find(|(u, v)| degree[u] >= 2 && degree[v] >= 2);
        let Some((u, v)) = middle else { break };
        edges.remove(&(u, v));
        *degree.get_mut(&u).unwrap() -= 1;
        *degree.get_mut(&v).unwrap() -= 1;
    }
    let dec = into_decomposition(h, DecompositionMode::Stars, input, &edges);
    if let Err(msg) = dec.validate(g.k(), input) {
        panic!("star decomposition invariant broken: {msg}");
    }
    Ok(dec)
}

/// Spanning forest of `H[input]` split while some edge leaves at least two
/// edges on both sides; the lexicographically smallest such edge goes first.
/// Every component of `H[input]` must have at least 3 vertices.
pub fn min2_tree_decomposition(
    g: &ConflictGraph,
    h: &ExchangeGraph,
    input: &VertexSet,
) -> Result<Decomposition, AnalysisError> {
    for &v in input {
        if !h.vertices.contains(&v) {
            return Err(AnalysisError::NotInA(v));
        }
    }
    let mut edges = spanning_forest(h, input);
    {
        let adj = forest_adjacency(input, &edges);
        for &v in input {
            if part_of(&adj, v, (usize::MAX, usize::MAX)).len() < 3 {
                return Err(AnalysisError::SmallComponent(v));
            }
        }
    }
    loop {
        let adj = forest_adjacency(input, &edges);
        let count = |part: &VertexSet, skip: UEdge| {
            edges
                .iter()
                .filter(|&&e| e != skip && part.contains(&e.0))
                .count()
        };
        let cut = edges.iter().copied().find(|&e| {
            count(&part_of(&adj, e.0, e), e) >= 2 && count(&part_of(&adj, e.1, e), e) >= 2
        });
        let Some(e) = cut else { break };
        edges.remove(&e);
    }
    let dec = into_decomposition(h, DecompositionMode::Min2Trees, input, &edges);
    if let Err(msg) = dec.validate(g.k(), input) {
        panic!("min2 decomposition invariant broken: {msg}");
    }
    Ok(dec)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeBoundCheck {
    /// Σ over tree arcs of the tail weight
    pub lhs: f64,
    /// (t−1)(1−ε)/(t−ε) · w(T)
    pub rhs: f64,
    pub holds: bool,
}

/// `Σ_{(a,b)∈E(T)} w_a ≥ (t−1)(1−ε)/(t−ε)·w(T)` for a tree with `t ≥ 2`
/// vertices whose arcs satisfy `(1−ε)w_b ≤ w_a ≤ w_b`.
pub fn verify_tree_weight_bound(
    tree: &Tree,
    weights: &[f64],
    epsilon: f64,
) -> Result<TreeBoundCheck, AnalysisError> {
    if !(0.0..=0.5).contains(&epsilon) {
        return Err(AnalysisError::BadParameters {
            epsilon,
            delta: f64::NAN,
        });
    }
    let t = tree.vertices.len();
    if t < 2 {
        return Err(AnalysisError::TrivialTree);
    }
    for &(a, b) in &tree.edges {
        let (wa, wb) = (weights[a], weights[b]);
        if wa > wb || wa < (1.0 - epsilon) * wb {
            return Err(AnalysisError::NotInExchangeGraph(a, b));
        }
    }
    let lhs: f64 = tree.edges.iter().map(|&(a, _)| weights[a]).sum();
    let total: f64 = tree.vertices.iter().map(|&v| weights[v]).sum();
    let tf = t as f64;
    let rhs = (tf - 1.0) * (1.0 - epsilon) / (tf - epsilon) * total;
    let holds = lhs - rhs >= -1e-12 * lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE);
    Ok(TreeBoundCheck { lhs, rhs, holds })
}
