//! Set-packing instances, vertex-weighted conflict graphs and independent-set
//! solutions.
//!
//! Vertex ids are dense integers `0..n`. For a set-packing instance the order
//! of the sets defines the vertex order of its conflict graph.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

pub type VertexId = usize;

/// A sorted set of vertex ids.
pub type VertexSet = BTreeSet<VertexId>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InstanceError {
    #[error("k must be positive")]
    ZeroK,
    #[error("set {index} is empty")]
    EmptySet { index: usize },
    #[error("set {index} has {size} elements but k = {k}")]
    SetTooLarge { index: usize, size: usize, k: usize },
    #[error("set {index}: element {element} is outside the universe [0, {universe_size})")]
    ElementOutOfRange {
        index: usize,
        element: u32,
        universe_size: usize,
    },
    #[error("set {index}: element {element} appears twice")]
    DuplicateElement { index: usize, element: u32 },
    #[error("vertex {vertex}: weight {weight} is negative or not finite")]
    BadWeight { vertex: usize, weight: f64 },
    #[error("edge ({u}, {v}) references a vertex outside 0..{n}")]
    EdgeOutOfRange { u: usize, v: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("vertex {vertex} is outside 0..{n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("vertices {0} and {1} are adjacent; the set is not independent")]
    NotIndependent(VertexId, VertexId),
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSet {
    pub weight: f64,
    /// Sorted, duplicate-free element ids.
    pub elements: Vec<u32>,
}

/// Weighted family of sets with at most `k` elements each.
#[derive(Debug, Clone, PartialEq)]
pub struct SetPackInstance {
    k: usize,
    universe_size: usize,
    sets: Vec<WeightedSet>,
}

impl SetPackInstance {
    /// Validates the family. Elements of each set are sorted on the way in;
    /// duplicates inside a set are rejected.
    pub fn new(
        k: usize,
        universe_size: usize,
        sets: Vec<WeightedSet>,
    ) -> Result<Self, InstanceError> {
        if k == 0 {
            return Err(InstanceError::ZeroK);
        }
        let mut checked = Vec::with_capacity(sets.len());
        for (index, mut set) in sets.into_iter().enumerate() {
            if !(set.weight >= 0.0 && set.weight.is_finite()) {
                return Err(InstanceError::BadWeight {
                    vertex: index,
                    weight: set.weight,
                });
            }
            if set.elements.is_empty() {
                return Err(InstanceError::EmptySet { index });
            }
            if set.elements.len() > k {
                return Err(InstanceError::SetTooLarge {
                    index,
                    size: set.elements.len(),
                    k,
                });
            }
            set.elements.sort_unstable();
            for pair in set.elements.windows(2) {
                if pair[0] == pair[1] {
                    return Err(InstanceError::DuplicateElement {
                        index,
                        element: pair[0],
                    });
                }
            }
            if let Some(&element) = set.elements.last() {
                if element as usize >= universe_size {
                    return Err(InstanceError::ElementOutOfRange {
                        index,
                        element,
                        universe_size,
                    });
                }
            }
            checked.push(set);
        }
        Ok(Self {
            k,
            universe_size,
            sets: checked,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn universe_size(&self) -> usize {
        self.universe_size
    }

    pub fn sets(&self) -> &[WeightedSet] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// One vertex per set (input order), an edge whenever two sets intersect.
    pub fn conflict_graph(&self) -> ConflictGraph {
        // element -> sets containing it
        let mut owners: Vec<Vec<usize>> = vec![Vec::new(); self.universe_size];
        for (i, set) in self.sets.iter().enumerate() {
            for &e in &set.elements {
                owners[e as usize].push(i);
            }
        }
        let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); self.sets.len()];
        for group in &owners {
            for (x, &u) in group.iter().enumerate() {
                for &v in &group[x + 1..] {
                    adjacency[u].push(v);
                    adjacency[v].push(u);
                }
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        ConflictGraph {
            k: self.k,
            weights: self.sets.iter().map(|s| s.weight).collect(),
            adjacency,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "p setpack {} {} {}",
            self.k,
            self.universe_size,
            self.sets.len()
        );
        for set in &self.sets {
            let _ = write!(out, "s {}", set.weight);
            for e in &set.elements {
                let _ = write!(out, " {e}");
            }
            out.push('\n');
        }
        out
    }
}

/// Convenience wrapper for [`SetPackInstance::conflict_graph`].
pub fn build_conflict_graph(inst: &SetPackInstance) -> ConflictGraph {
    inst.conflict_graph()
}

/// Vertex-weighted undirected graph, asserted (k+1)-claw free by its `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConflictGraph {
    k: usize,
    weights: Vec<f64>,
    adjacency: Vec<Vec<VertexId>>,
}

impl ConflictGraph {
    /// Builds a graph from a weight vector and an edge list. Duplicate edges
    /// collapse; self-loops and out-of-range endpoints are errors.
    pub fn new(
        k: usize,
        weights: Vec<f64>,
        edges: impl IntoIterator<Item = (VertexId, VertexId)>,
    ) -> Result<Self, InstanceError> {
        if k == 0 {
            return Err(InstanceError::ZeroK);
        }
        for (vertex, &weight) in weights.iter().enumerate() {
            if !(weight >= 0.0 && weight.is_finite()) {
                return Err(InstanceError::BadWeight { vertex, weight });
            }
        }
        let n = weights.len();
        let mut adjacency = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(InstanceError::EdgeOutOfRange { u, v, n });
            }
            if u == v {
                return Err(InstanceError::SelfLoop(u));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self {
            k,
            weights,
            adjacency,
        })
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn weight(&self, v: VertexId) -> f64 {
        self.weights[v]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Sorted neighbor list of `v`.
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v].len()
    }

    pub fn adjacent(&self, u: VertexId, v: VertexId) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Same structure, new weights (used by weight scaling).
    pub fn with_weights(&self, weights: Vec<f64>) -> Result<Self, InstanceError> {
        assert_eq!(weights.len(), self.n(), "weight vector length mismatch");
        for (vertex, &weight) in weights.iter().enumerate() {
            if !(weight >= 0.0 && weight.is_finite()) {
                return Err(InstanceError::BadWeight { vertex, weight });
            }
        }
        Ok(Self {
            k: self.k,
            weights,
            adjacency: self.adjacency.clone(),
        })
    }

    /// Induced subgraph on `keep` (ascending ids). Returns the subgraph and,
    /// for each new vertex, its id in `self`.
    pub fn induced_subgraph(&self, keep: &VertexSet) -> (ConflictGraph, Vec<VertexId>) {
        let map: Vec<VertexId> = keep.iter().copied().collect();
        let mut local = vec![usize::MAX; self.n()];
        for (i, &v) in map.iter().enumerate() {
            local[v] = i;
        }
        let adjacency = map
            .iter()
            .map(|&v| {
                self.adjacency[v]
                    .iter()
                    .filter_map(|&u| (local[u] != usize::MAX).then_some(local[u]))
                    .collect()
            })
            .collect();
        let sub = ConflictGraph {
            k: self.k,
            weights: map.iter().map(|&v| self.weights[v]).collect(),
            adjacency,
        };
        (sub, map)
    }

    /// N(X, B): vertices of `b` adjacent to some vertex of `x`, plus `x ∩ b`.
    pub fn neighborhood(&self, x: &VertexSet, b: &VertexSet) -> VertexSet {
        let mut out: VertexSet = x.intersection(b).copied().collect();
        for &v in x {
            for &u in &self.adjacency[v] {
                if b.contains(&u) {
                    out.insert(u);
                }
            }
        }
        out
    }

    /// N(v, B) for a single vertex.
    pub fn vertex_neighborhood(&self, v: VertexId, b: &VertexSet) -> VertexSet {
        let mut out: VertexSet = self.adjacency[v]
            .iter()
            .copied()
            .filter(|u| b.contains(u))
            .collect();
        if b.contains(&v) {
            out.insert(v);
        }
        out
    }

    pub fn is_independent(&self, x: &VertexSet) -> bool {
        self.first_conflict(x).is_none()
    }

    /// Lexicographically first edge inside `x`, if any.
    pub fn first_conflict(&self, x: &VertexSet) -> Option<(VertexId, VertexId)> {
        x.iter().find_map(|&v| {
            self.adjacency[v]
                .iter()
                .find(|&&u| u > v && x.contains(&u))
                .map(|&u| (v, u))
        })
    }

    /// Σ w_v over `x`, ascending vertex order.
    pub fn weight_sum<'a>(&self, x: impl IntoIterator<Item = &'a VertexId>) -> f64 {
        x.into_iter().map(|&v| self.weights[v]).sum()
    }

    /// Σ w_v² over `x`, ascending vertex order.
    pub fn squared_weight_sum<'a>(&self, x: impl IntoIterator<Item = &'a VertexId>) -> f64 {
        x.into_iter().map(|&v| self.weights[v] * self.weights[v]).sum()
    }

    /// Searches for a claw with `k + 1` talons. The search is exponential in
    /// `k`; intended for desk-scale graphs.
    pub fn find_claw(&self, k: usize) -> Option<Claw> {
        let need = k + 1;
        let mut chosen = Vec::with_capacity(need);
        for center in 0..self.n() {
            let nbrs = &self.adjacency[center];
            if nbrs.len() < need {
                continue;
            }
            if self.independent_extension(nbrs, 0, need, &mut chosen) {
                return Some(Claw {
                    center,
                    talons: chosen,
                });
            }
            chosen.clear();
        }
        None
    }

    fn independent_extension(
        &self,
        pool: &[VertexId],
        from: usize,
        need: usize,
        chosen: &mut Vec<VertexId>,
    ) -> bool {
        if chosen.len() == need {
            return true;
        }
        if pool.len() - from < need - chosen.len() {
            return false;
        }
        for i in from..pool.len() {
            let v = pool[i];
            if chosen.iter().all(|&c| !self.adjacent(c, v)) {
                chosen.push(v);
                if self.independent_extension(pool, i + 1, need, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "p mwis {} {}", self.n(), self.edge_count());
        for (v, w) in self.weights.iter().enumerate() {
            let _ = writeln!(out, "v {v} {w}");
        }
        for (u, v) in self.edges() {
            let _ = writeln!(out, "e {u} {v}");
        }
        out
    }
}

/// A claw: `center` adjacent to pairwise non-adjacent `talons`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Claw {
    pub center: VertexId,
    pub talons: Vec<VertexId>,
}

/// True iff no vertex of `g` has `k + 1` pairwise non-adjacent neighbors.
pub fn verify_claw_free(g: &ConflictGraph, k: usize) -> (bool, Option<Claw>) {
    match g.find_claw(k) {
        Some(claw) => (false, Some(claw)),
        None => (true, None),
    }
}

/// An independent set with a cached total weight.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    vertices: VertexSet,
    total_weight: f64,
}

impl Solution {
    pub fn empty() -> Self {
        Self {
            vertices: VertexSet::new(),
            total_weight: 0.0,
        }
    }

    /// Checks independence in `g` and caches the weight.
    pub fn new(g: &ConflictGraph, vertices: VertexSet) -> Result<Self, InstanceError> {
        if let Some(&vertex) = vertices.iter().next_back() {
            if vertex >= g.n() {
                return Err(InstanceError::VertexOutOfRange { vertex, n: g.n() });
            }
        }
        if let Some((u, v)) = g.first_conflict(&vertices) {
            return Err(InstanceError::NotIndependent(u, v));
        }
        let total_weight = g.weight_sum(&vertices);
        Ok(Self {
            vertices,
            total_weight,
        })
    }

    pub fn vertices(&self) -> &VertexSet {
        &self.vertices
    }

    pub fn into_vertices(self) -> VertexSet {
        self.vertices
    }

    pub fn weight(&self) -> f64 {
        self.total_weight
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    /// Space-separated ids, the solution file format.
    pub fn to_text(&self) -> String {
        let ids: Vec<String> = self.vertices.iter().map(|v| v.to_string()).collect();
        format!("{}\n", ids.join(" "))
    }
}
