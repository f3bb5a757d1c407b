//! Exchange enumeration shared by the floating-point and the scaled-integer
//! searches.

use std::fmt::Debug;
use std::ops::{Add, Sub};

use crate::instance::{ConflictGraph, VertexId, VertexSet};

/// Guided-weight arithmetic. `improves` decides whether adding weight
/// `incoming` in exchange for `outgoing` is a strict improvement.
pub trait Magnitude:
    Copy + Debug + PartialEq + PartialOrd + Default + Add<Output = Self> + Sub<Output = Self>
{
    fn improves(incoming: Self, outgoing: Self) -> bool;
    fn is_positive(self) -> bool;
    fn to_f64(self) -> f64;
    fn render(self) -> String;
}

/// Relative margin below which a floating-point gain is treated as rounding.
pub const FLOAT_GAIN_TOLERANCE: f64 = 1e-12;

impl Magnitude for f64 {
    fn improves(incoming: f64, outgoing: f64) -> bool {
        incoming - outgoing > FLOAT_GAIN_TOLERANCE * (incoming + outgoing)
    }
    fn is_positive(self) -> bool {
        self > 0.0
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn render(self) -> String {
        crate::tsv::num(self)
    }
}

impl Magnitude for u128 {
    fn improves(incoming: u128, outgoing: u128) -> bool {
        incoming > outgoing
    }
    fn is_positive(self) -> bool {
        self > 0
    }
    fn to_f64(self) -> f64 {
        self as f64
    }
    fn render(self) -> String {
        self.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnumerationMode {
    /// Every independent candidate set, in lexicographic order.
    Full,
    /// Only candidate sets that are connected through shared solution
    /// neighbors.
    Connected,
}

impl std::str::FromStr for EnumerationMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "full" => Ok(EnumerationMode::Full),
            "connected" => Ok(EnumerationMode::Connected),
            other => Err(format!("unknown enumeration mode `{other}` (full|connected)")),
        }
    }
}

impl std::fmt::Display for EnumerationMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EnumerationMode::Full => "full",
            EnumerationMode::Connected => "connected",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExchangeMove<T> {
    pub incoming: VertexSet,
    pub outgoing: VertexSet,
    pub gain: T,
}

/// In-sum and out-sum of the guided weight, each accumulated in ascending
/// vertex order.
pub fn exchange_sums<T: Magnitude>(
    g: &ConflictGraph,
    guide: &[T],
    s: &VertexSet,
    incoming: &VertexSet,
) -> (VertexSet, T, T) {
    let outgoing = g.neighborhood(incoming, s);
    let sum = |x: &VertexSet| x.iter().fold(T::default(), |acc, &v| acc + guide[v]);
    (outgoing.clone(), sum(incoming), sum(&outgoing))
}

/// The move for a given incoming set, if it is independent, disjoint from
/// `s` and strictly improving.
pub fn evaluate<T: Magnitude>(
    g: &ConflictGraph,
    guide: &[T],
    s: &VertexSet,
    incoming: &VertexSet,
) -> Option<ExchangeMove<T>> {
    if incoming.is_empty() || !incoming.is_disjoint(s) || !g.is_independent(incoming) {
        return None;
    }
    let (outgoing, gin, gout) = exchange_sums(g, guide, s, incoming);
    T::improves(gin, gout).then(|| ExchangeMove {
        incoming: incoming.clone(),
        outgoing,
        gain: gin - gout,
    })
}

/// Incremental state for one growing candidate set.
struct Workspace<'a, T> {
    g: &'a ConflictGraph,
    guide: &'a [T],
    s: &'a VertexSet,
    in_s: Vec<bool>,
    /// how many chosen vertices touch each solution vertex
    cover: Vec<u32>,
    /// how many chosen vertices are adjacent to each vertex
    blocked: Vec<u32>,
    chosen: Vec<VertexId>,
    sums: Vec<(T, T)>,
}

impl<'a, T: Magnitude> Workspace<'a, T> {
    fn new(g: &'a ConflictGraph, guide: &'a [T], s: &'a VertexSet) -> Self {
        let mut in_s = vec![false; g.n()];
        for &v in s {
            in_s[v] = true;
        }
        Self {
            g,
            guide,
            s,
            in_s,
            cover: vec![0; g.n()],
            blocked: vec![0; g.n()],
            chosen: Vec::new(),
            sums: vec![(T::default(), T::default())],
        }
    }

    fn can_add(&self, v: VertexId) -> bool {
        self.blocked[v] == 0
    }

    fn push(&mut self, v: VertexId) {
        let (mut gin, mut gout) = *self.sums.last().unwrap();
        gin = gin + self.guide[v];
        for &u in self.g.neighbors(v) {
            if self.in_s[u] {
                if self.cover[u] == 0 {
                    gout = gout + self.guide[u];
                }
                self.cover[u] += 1;
            } else {
                self.blocked[u] += 1;
            }
        }
        self.chosen.push(v);
        self.sums.push((gin, gout));
    }

    fn pop(&mut self) {
        let v = self.chosen.pop().expect("pop on empty workspace");
        self.sums.pop();
        for &u in self.g.neighbors(v) {
            if self.in_s[u] {
                self.cover[u] -= 1;
            } else {
                self.blocked[u] -= 1;
            }
        }
    }

    /// Confirms an incremental hit against the canonical ascending sums.
    fn current_move(&self) -> Option<ExchangeMove<T>> {
        let (gin, gout) = *self.sums.last().unwrap();
        if !T::improves(gin, gout) {
            return None;
        }
        let incoming: VertexSet = self.chosen.iter().copied().collect();
        let (outgoing, gin, gout) = exchange_sums(self.g, self.guide, self.s, &incoming);
        T::improves(gin, gout).then(|| ExchangeMove {
            incoming,
            outgoing,
            gain: gin - gout,
        })
    }
}

/// Vertices outside `s` with positive guided weight, ascending.
fn candidates<T: Magnitude>(g: &ConflictGraph, guide: &[T], s: &VertexSet) -> Vec<VertexId> {
    (0..g.n())
        .filter(|v| !s.contains(v) && guide[*v].is_positive())
        .collect()
}

/// Lexicographically smallest improving move with at most `budget` incoming
/// vertices.
pub fn find_move<T: Magnitude>(
    g: &ConflictGraph,
    guide: &[T],
    s: &VertexSet,
    budget: usize,
    mode: EnumerationMode,
) -> Option<ExchangeMove<T>> {
    if budget == 0 {
        return None;
    }
    let cands = candidates(g, guide, s);
    let mut ws = Workspace::new(g, guide, s);
    match mode {
        EnumerationMode::Full => full_dfs(&mut ws, &cands, 0, budget),
        EnumerationMode::Connected => connected_search(&mut ws, &cands, budget),
    }
}

/// Preorder over sets extended by increasing ids visits them in
/// lexicographic order, so the first hit is the answer.
fn full_dfs<T: Magnitude>(
    ws: &mut Workspace<'_, T>,
    cands: &[VertexId],
    from: usize,
    budget: usize,
) -> Option<ExchangeMove<T>> {
    for i in from..cands.len() {
        let v = cands[i];
        if !ws.can_add(v) {
            continue;
        }
        ws.push(v);
        if let Some(m) = ws.current_move() {
            return Some(m);
        }
        if ws.chosen.len() < budget {
            if let Some(m) = full_dfs(ws, cands, i + 1, budget) {
                return Some(m);
            }
        }
        ws.pop();
    }
    None
}

/// Interaction graph on the candidates: adjacent in `g` or sharing a
/// neighbor in `s`. Indexed by candidate position.
fn interaction_graph(g: &ConflictGraph, s: &VertexSet, cands: &[VertexId]) -> Vec<Vec<usize>> {
    let mut pos = vec![usize::MAX; g.n()];
    for (i, &v) in cands.iter().enumerate() {
        pos[v] = i;
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); cands.len()];
    for (i, &v) in cands.iter().enumerate() {
        for &u in g.neighbors(v) {
            if pos[u] != usize::MAX {
                adj[i].push(pos[u]);
            }
        }
    }
    for &x in s {
        let touching: Vec<usize> = g
            .neighbors(x)
            .iter()
            .filter_map(|&u| (pos[u] != usize::MAX).then_some(pos[u]))
            .collect();
        for (a, &i) in touching.iter().enumerate() {
            for &j in &touching[a + 1..] {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    adj
}

struct Connected<'c> {
    cands: &'c [VertexId],
    adj: Vec<Vec<usize>>,
    /// for each candidate, how many chosen candidates equal or neighbor it
    closed: Vec<u32>,
    budget: usize,
}

/// Roots ascend; every connected set is grown from its smallest member
/// (ESU enumeration), so the first root with a hit holds the answer.
fn connected_search<T: Magnitude>(
    ws: &mut Workspace<'_, T>,
    cands: &[VertexId],
    budget: usize,
) -> Option<ExchangeMove<T>> {
    let mut st = Connected {
        cands,
        adj: interaction_graph(ws.g, ws.s, cands),
        closed: vec![0; cands.len()],
        budget,
    };
    for root in 0..cands.len() {
        let mut best: Option<ExchangeMove<T>> = None;
        let ext: Vec<usize> = st.adj[root].iter().copied().filter(|&u| u > root).collect();
        st.enter(ws, root);
        consider(ws, &mut best);
        if budget > 1 {
            esu_extend(ws, &mut st, ext, root, &mut best);
        }
        st.leave(ws, root);
        if best.is_some() {
            return best;
        }
    }
    None
}

impl Connected<'_> {
    fn enter<T: Magnitude>(&mut self, ws: &mut Workspace<'_, T>, i: usize) {
        self.closed[i] += 1;
        for &u in &self.adj[i] {
            self.closed[u] += 1;
        }
        ws.push(self.cands[i]);
    }

    fn leave<T: Magnitude>(&mut self, ws: &mut Workspace<'_, T>, i: usize) {
        self.closed[i] -= 1;
        for &u in &self.adj[i] {
            self.closed[u] -= 1;
        }
        ws.pop();
    }
}

fn consider<T: Magnitude>(ws: &Workspace<'_, T>, best: &mut Option<ExchangeMove<T>>) {
    if let Some(m) = ws.current_move() {
        let better = match best {
            Some(b) => m.incoming.iter().lt(b.incoming.iter()),
            None => true,
        };
        if better {
            *best = Some(m);
        }
    }
}

fn esu_extend<T: Magnitude>(
    ws: &mut Workspace<'_, T>,
    st: &mut Connected<'_>,
    mut ext: Vec<usize>,
    root: usize,
    best: &mut Option<ExchangeMove<T>>,
) {
    while let Some(w) = ext.pop() {
        if !ws.can_add(st.cands[w]) {
            continue;
        }
        let mut next = ext.clone();
        for &u in &st.adj[w] {
            if u > root && st.closed[u] == 0 {
                next.push(u);
            }
        }
        st.enter(ws, w);
        consider(ws, best);
        if ws.chosen.len() < st.budget {
            esu_extend(ws, st, next, root, best);
        }
        st.leave(ws, w);
    }
}

/// `S ∪ C ∖ N(C,S)`, or `None` when the move no longer matches `s`.
pub fn apply<T>(g: &ConflictGraph, s: &VertexSet, m: &ExchangeMove<T>) -> Option<VertexSet> {
    if !m.incoming.is_disjoint(s) || g.neighborhood(&m.incoming, s) != m.outgoing {
        return None;
    }
    let mut next: VertexSet = s.difference(&m.outgoing).copied().collect();
    next.extend(m.incoming.iter().copied());
    assert!(g.is_independent(&next), "exchange produced a dependent set");
    Some(next)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep<T> {
    pub step: usize,
    pub gain: T,
    pub incoming: usize,
    pub outgoing: usize,
    /// w(S) and w²(S) after the step, in the weights the search ran on
    pub weight: T,
    pub weight2: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace<T> {
    pub steps: Vec<TraceStep<T>>,
}

impl<T> Default for Trace<T> {
    fn default() -> Self {
        Self { steps: Vec::new() }
    }
}

impl<T: Magnitude> Trace<T> {
    pub fn improvements(&self) -> usize {
        self.steps.len()
    }

    /// `step gain |C| |N(C,S)| w(S) w2(S)`, one line per improvement.
    pub fn to_tsv(&self) -> String {
        let mut out = crate::tsv::row(["step", "gain", "|C|", "|N(C,S)|", "w(S)", "w2(S)"]);
        for s in &self.steps {
            out.push_str(&crate::tsv::row([
                s.step.to_string(),
                s.gain.render(),
                s.incoming.to_string(),
                s.outgoing.to_string(),
                s.weight.render(),
                s.weight2.render(),
            ]));
        }
        out
    }
}

pub struct SearchOutcome<T> {
    pub vertices: VertexSet,
    pub trace: Trace<T>,
    pub locally_optimal: bool,
}

/// Applies first improvements until none remains or the cap is reached.
/// `weight` and `weight2` are only used for the trace.
#[allow(clippy::too_many_arguments)]
pub fn run<T: Magnitude>(
    g: &ConflictGraph,
    guide: &[T],
    weight: &[T],
    weight2: &[T],
    start: VertexSet,
    budget: usize,
    mode: EnumerationMode,
    max_improvements: Option<u64>,
) -> SearchOutcome<T> {
    let total = |x: &[T], s: &VertexSet| s.iter().fold(T::default(), |acc, &v| acc + x[v]);
    let mut s = start;
    let mut trace = Trace::default();
    loop {
        if max_improvements.is_some_and(|cap| trace.steps.len() as u64 >= cap) {
            let locally_optimal = find_move(g, guide, &s, budget, mode).is_none();
            return SearchOutcome {
                vertices: s,
                trace,
                locally_optimal,
            };
        }
        let Some(m) = find_move(g, guide, &s, budget, mode) else {
            return SearchOutcome {
                vertices: s,
                trace,
                locally_optimal: true,
            };
        };
        s = apply(g, &s, &m).expect("fresh move applies");
        trace.steps.push(TraceStep {
            step: trace.steps.len() + 1,
            gain: m.gain,
            incoming: m.incoming.len(),
            outgoing: m.outgoing.len(),
            weight: total(weight, &s),
            weight2: total(weight2, &s),
        });
    }
}
