//! Exact maximum-weight independent set by branch and bound.
//!
//! Branches on the vertex of highest remaining degree (include first) and
//! bounds by the chosen weight plus all remaining weight. Among optimal sets
//! the lexicographically smallest one is returned.

use crate::instance::{ConflictGraph, Solution, VertexId, VertexSet};
use crate::solver::greedy;

#[derive(Debug, Clone)]
pub struct ExactResult {
    pub solution: Solution,
    pub nodes_explored: u64,
    pub proven_optimal: bool,
}

/// Weights closer than this (relative) count as ties.
const TIE_TOLERANCE: f64 = 1e-12;

struct Search<'a> {
    g: &'a ConflictGraph,
    best: Vec<VertexId>,
    best_weight: f64,
    nodes: u64,
    budget: Option<u64>,
    exhausted: bool,
}

impl Search<'_> {
    fn tol(&self) -> f64 {
        TIE_TOLERANCE * self.best_weight.abs().max(1.0)
    }

    fn offer(&mut self, chosen: &[VertexId], weight: f64) {
        let mut sorted = chosen.to_vec();
        sorted.sort_unstable();
        let tol = self.tol();
        if weight > self.best_weight + tol
            || ((weight - self.best_weight).abs() <= tol && sorted < self.best)
        {
            self.best = sorted;
            self.best_weight = weight;
        }
    }

    fn branch(&mut self, pool: &[VertexId], chosen: &mut Vec<VertexId>, weight: f64) {
        if self.exhausted {
            return;
        }
        self.nodes += 1;
        if self.budget.is_some_and(|b| self.nodes > b) {
            self.exhausted = true;
            return;
        }
        let rest: f64 = pool.iter().map(|&v| self.g.weight(v)).sum();
        if weight + rest < self.best_weight - self.tol() {
            return;
        }
        let in_pool = |u: &VertexId| pool.binary_search(u).is_ok();
        let mut pick: Option<(usize, VertexId)> = None;
        for &v in pool {
            let d = self.g.neighbors(v).iter().filter(|u| in_pool(u)).count();
            if pick.is_none_or(|(bd, _)| d > bd) {
                pick = Some((d, v));
            }
        }
        let Some((degree, v)) = pick else {
            self.offer(chosen, weight);
            return;
        };
        if degree == 0 {
            // every remaining vertex is free to take
            let before = chosen.len();
            chosen.extend_from_slice(pool);
            self.offer(chosen, weight + rest);
            chosen.truncate(before);
            return;
        }
        let without_closed: Vec<VertexId> = pool
            .iter()
            .copied()
            .filter(|&u| u != v && !self.g.adjacent(u, v))
            .collect();
        chosen.push(v);
        self.branch(&without_closed, chosen, weight + self.g.weight(v));
        chosen.pop();
        let without_v: Vec<VertexId> = pool.iter().copied().filter(|&u| u != v).collect();
        self.branch(&without_v, chosen, weight);
    }
}

pub fn exact_mwis(g: &ConflictGraph, node_budget: Option<u64>) -> ExactResult {
    let start = greedy(g);
    let mut search = Search {
        g,
        best: start.vertices().iter().copied().collect(),
        best_weight: start.weight(),
        nodes: 0,
        budget: node_budget,
        exhausted: false,
    };
    let pool: Vec<VertexId> = (0..g.n()).filter(|&v| g.weight(v) > 0.0).collect();
    search.branch(&pool, &mut Vec::new(), 0.0);
    let vertices: VertexSet = search.best.into_iter().collect();
    ExactResult {
        solution: Solution::new(g, vertices).expect("search keeps independence"),
        nodes_explored: search.nodes,
        proven_optimal: !search.exhausted,
    }
}
