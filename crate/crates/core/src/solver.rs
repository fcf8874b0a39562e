//! Graph coloring search: exact decision by backtracking with domain
//! propagation, tabu local search for large instances, a BFS bipartiteness
//! test with odd-cycle certificates, and an exhaustive oracle for tiny graphs.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::coloring::{verify_proper, Coloring};
use crate::error::{PancakeError, Result};
use crate::graph::PancakeView;
use crate::perm::Permutation;

/// Vertex limit for complete (exhaustive) search on a pancake view.
pub const COMPLETE_LIMIT: u64 = 5040;
/// Vertex limit for heuristic search on a pancake view.
pub const HEURISTIC_LIMIT: u64 = 3_628_800;
/// Vertex limit of [`brute_force_chi`].
pub const BRUTE_FORCE_LIMIT: usize = 10;
/// Colors are kept in a 64-bit domain mask.
pub const MAX_COLORS: u32 = 64;

/// An explicit undirected simple graph in compressed adjacency form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl SimpleGraph {
    /// Builds a graph from an edge list; duplicate edges are merged and
    /// self-loops rejected.
    pub fn from_edges(vertices: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); vertices];
        for &(a, b) in edges {
            if a >= vertices || b >= vertices {
                return Err(PancakeError::Configuration(format!(
                    "edge ({a}, {b}) outside {vertices} vertices"
                )));
            }
            if a == b {
                return Err(PancakeError::Configuration(format!("self-loop at {a}")));
            }
            adj[a].push(b as u32);
            adj[b].push(a as u32);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self::from_lists(adj))
    }

    fn from_lists(adj: Vec<Vec<u32>>) -> Self {
        let mut offsets = Vec::with_capacity(adj.len() + 1);
        offsets.push(0);
        let mut targets = Vec::with_capacity(adj.iter().map(Vec::len).sum());
        for list in adj {
            targets.extend_from_slice(&list);
            offsets.push(targets.len());
        }
        SimpleGraph { offsets, targets }
    }

    /// Materializes a view; local vertex ids follow rank order.
    pub fn from_view(view: &PancakeView) -> Result<(Self, Vec<Permutation>)> {
        let vertices = view.vertices()?;
        let local = |p: &Permutation| -> u32 {
            vertices.binary_search(p).expect("neighbor inside view") as u32
        };
        let dense = view.is_full();
        let mut adj = Vec::with_capacity(vertices.len());
        for u in &vertices {
            let mut list = Vec::with_capacity(view.n() - 1);
            view.for_each_neighbor(u, |v, _| {
                list.push(if dense {
                    v.lex_rank().0 as u32
                } else {
                    local(&v)
                })
            });
            adj.push(list);
        }
        Ok((Self::from_lists(adj), vertices))
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.vertex_count()).flat_map(move |a| {
            self.neighbors(a)
                .iter()
                .filter(move |&&b| (b as usize) > a)
                .map(move |&b| (a, b as usize))
        })
    }

    /// Number of monochromatic edges under `colors`.
    pub fn conflicts(&self, colors: &[u32]) -> usize {
        self.edges()
            .filter(|&(a, b)| colors[a] == colors[b])
            .count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchBudget {
    pub max_seconds: f64,
    /// Decision nodes (complete mode) or moves (heuristic mode).
    pub max_nodes: u64,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_seconds: 600.0,
            max_nodes: u64::MAX,
            seed: 0,
        }
    }
}

impl SearchBudget {
    fn validate(&self) -> Result<()> {
        if !(self.max_seconds > 0.0) || self.max_nodes == 0 {
            return Err(PancakeError::Configuration(
                "search budget limits must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveStatus {
    Colored,
    Unsat,
    Timeout,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    Complete,
    Heuristic,
}

/// Result of a search on an explicit graph; colors are `1..=k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphOutcome {
    pub status: SolveStatus,
    pub colors: Option<Vec<u32>>,
    pub nodes: u64,
    pub elapsed: f64,
}

/// Result of a search on a pancake graph.
#[derive(Debug, Clone, Serialize)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    #[serde(skip)]
    pub coloring: Option<Coloring>,
    pub k: u32,
    pub nodes: u64,
    pub elapsed: f64,
}

fn check_colors(k: u32) -> Result<()> {
    if k == 0 || k > MAX_COLORS {
        return Err(PancakeError::Range {
            what: "k",
            value: k as u64,
            min: 1,
            max: MAX_COLORS as u64,
        });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Complete search

enum Trail {
    Domain(u32, u64),
    Assign(u32),
}

struct Frame {
    vertex: u32,
    candidates: u64,
    trail_mark: usize,
    used_before: u64,
}

struct Exact<'g> {
    graph: &'g SimpleGraph,
    full: u64,
    color: Vec<u32>,
    domain: Vec<u64>,
    trail: Vec<Trail>,
    queue: Vec<u32>,
    used: u64,
    assigned: usize,
    probing: bool,
    /// Product over remaining colors of the assignments each one forces,
    /// from the last probing pass.
    score: Vec<u64>,
}

impl<'g> Exact<'g> {
    fn new(graph: &'g SimpleGraph, k: u32) -> Self {
        let full = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
        let v = graph.vertex_count();
        Exact {
            graph,
            full,
            color: vec![0; v],
            domain: vec![full; v],
            trail: Vec::new(),
            queue: Vec::new(),
            used: 0,
            assigned: 0,
            probing: true,
            score: vec![1; v],
        }
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            match self.trail.pop().unwrap() {
                Trail::Domain(v, old) => self.domain[v as usize] = old,
                Trail::Assign(v) => {
                    self.color[v as usize] = 0;
                    self.assigned -= 1;
                }
            }
        }
    }

    /// Assigns color bit `c` (0-based) to `v` and propagates forced
    /// assignments. Returns `false` on a wipe-out.
    fn assign(&mut self, v: u32, c: u32) -> bool {
        self.queue.clear();
        if !self.set(v, c) {
            return false;
        }
        while let Some(u) = self.queue.pop() {
            if self.color[u as usize] != 0 {
                continue;
            }
            let d = self.domain[u as usize];
            if !self.set(u, d.trailing_zeros()) {
                return false;
            }
        }
        true
    }

    fn set(&mut self, v: u32, c: u32) -> bool {
        let bit = 1u64 << c;
        if self.domain[v as usize] & bit == 0 {
            return false;
        }
        self.color[v as usize] = c + 1;
        self.assigned += 1;
        self.used |= bit;
        self.trail.push(Trail::Assign(v));
        if self.domain[v as usize] != bit {
            self.trail.push(Trail::Domain(v, self.domain[v as usize]));
            self.domain[v as usize] = bit;
        }
        for &u in self.graph.neighbors(v as usize) {
            let d = self.domain[u as usize];
            if d & bit == 0 {
                continue;
            }
            if self.color[u as usize] != 0 {
                return false;
            }
            let nd = d & !bit;
            self.trail.push(Trail::Domain(u, d));
            self.domain[u as usize] = nd;
            if nd == 0 {
                return false;
            }
            if nd & (nd - 1) == 0 {
                self.queue.push(u);
            }
        }
        true
    }

    /// Failed-literal probing: drops every color whose assignment wipes out
    /// a domain under propagation, until nothing changes. Returns `false`
    /// if some vertex loses all colors.
    fn probe(&mut self) -> bool {
        loop {
            let mut changed = false;
            for v in 0..self.graph.vertex_count() as u32 {
                if self.color[v as usize] != 0 {
                    continue;
                }
                self.score[v as usize] = 1;
                let mut d = self.domain[v as usize];
                while d != 0 {
                    let c = d.trailing_zeros();
                    d &= d - 1;
                    let (mark, used, before) = (self.trail.len(), self.used, self.assigned);
                    let ok = self.assign(v, c);
                    let forced = (self.assigned - before) as u64;
                    self.undo_to(mark);
                    self.used = used;
                    if ok {
                        self.score[v as usize] *= 1 + forced;
                        continue;
                    }
                    let old = self.domain[v as usize];
                    let nd = old & !(1u64 << c);
                    if nd == 0 {
                        return false;
                    }
                    changed = true;
                    if nd & (nd - 1) == 0 {
                        if !self.assign(v, nd.trailing_zeros()) {
                            return false;
                        }
                        break;
                    }
                    self.trail.push(Trail::Domain(v, old));
                    self.domain[v as usize] = nd;
                }
            }
            if !changed {
                return true;
            }
        }
    }

    /// Smallest domain first, then most uncolored neighbors, then lowest id.
    /// With probing, the largest lookahead score replaces the neighbor count.
    fn pick(&self) -> Option<u32> {
        if self.probing {
            return (0..self.graph.vertex_count())
                .filter(|&v| self.color[v] == 0)
                .min_by_key(|&v| {
                    (
                        self.domain[v].count_ones(),
                        std::cmp::Reverse(self.score[v]),
                    )
                })
                .map(|v| v as u32);
        }
        let mut best: Option<(u32, usize, u32)> = None;
        for v in 0..self.graph.vertex_count() {
            if self.color[v] != 0 {
                continue;
            }
            let size = self.domain[v].count_ones();
            let free = self
                .graph
                .neighbors(v)
                .iter()
                .filter(|&&u| self.color[u as usize] == 0)
                .count();
            let better = match best {
                None => true,
                Some((bs, bf, _)) => size < bs || (size == bs && free > bf),
            };
            if better {
                best = Some((size, free, v as u32));
            }
        }
        best.map(|b| b.2)
    }

    fn run(&mut self, k: u32, budget: &SearchBudget, start: Instant) -> (SolveStatus, u64) {
        let g = self.graph;
        let v_count = g.vertex_count();
        if v_count == 0 {
            return (SolveStatus::Colored, 0);
        }
        // Colors are interchangeable: fix vertex 0 to color 1 and its first
        // neighbor to color 2.
        if !self.assign(0, 0) {
            return (SolveStatus::Unsat, 0);
        }
        if let Some(&u) = g.neighbors(0).first() {
            if k < 2 || !self.assign(u, 1) {
                return (SolveStatus::Unsat, 0);
            }
        }
        if self.probing && !self.probe() {
            return (SolveStatus::Unsat, 0);
        }
        let mut nodes = 0u64;
        let mut stack: Vec<Frame> = Vec::new();
        loop {
            if self.assigned == v_count {
                return (SolveStatus::Colored, nodes);
            }
            let v = self.pick().expect("unassigned vertex");
            let d = self.domain[v as usize];
            let fresh = d & !self.used & self.full;
            let candidates = (d & self.used) | (fresh & fresh.wrapping_neg());
            stack.push(Frame {
                vertex: v,
                candidates,
                trail_mark: self.trail.len(),
                used_before: self.used,
            });
            // Try candidates, backtracking as needed.
            loop {
                let Some(frame) = stack.last_mut() else {
                    return (SolveStatus::Unsat, nodes);
                };
                let (mark, used_before) = (frame.trail_mark, frame.used_before);
                if frame.candidates == 0 {
                    stack.pop();
                    self.undo_to(mark);
                    self.used = used_before;
                    continue;
                }
                let c = frame.candidates.trailing_zeros();
                frame.candidates &= frame.candidates - 1;
                let vertex = frame.vertex;
                self.undo_to(mark);
                self.used = used_before;
                nodes += 1;
                if nodes >= budget.max_nodes
                    || (nodes % 1024 == 0 && start.elapsed().as_secs_f64() > budget.max_seconds)
                {
                    return (SolveStatus::Timeout, nodes);
                }
                if self.assign(vertex, c) && (!self.probing || self.probe()) {
                    break;
                }
            }
        }
    }
}

/// Exhaustive k-coloring decision on an explicit graph.
pub fn complete_search(graph: &SimpleGraph, k: u32, budget: &SearchBudget) -> Result<GraphOutcome> {
    check_colors(k)?;
    budget.validate()?;
    let start = Instant::now();
    let mut search = Exact::new(graph, k);
    let (status, nodes) = search.run(k, budget, start);
    let colors = (status == SolveStatus::Colored).then(|| search.color.clone());
    if let Some(c) = &colors {
        assert_eq!(
            graph.conflicts(c),
            0,
            "complete search produced an improper coloring"
        );
    }
    Ok(GraphOutcome {
        status,
        colors,
        nodes,
        elapsed: start.elapsed().as_secs_f64(),
    })
}

// ---------------------------------------------------------------------------
// Heuristic search (tabu search over complete assignments)

struct Tabu<'g> {
    graph: &'g SimpleGraph,
    k: usize,
    color: Vec<u32>,
    /// `gamma[v * k + c]`: neighbors of `v` colored `c` (0-based colors here).
    gamma: Vec<u32>,
    tabu_until: Vec<u64>,
    conflicting: Vec<u32>,
    position: Vec<u32>,
    conflicts: usize,
}

const NOT_CONFLICTING: u32 = u32::MAX;

impl<'g> Tabu<'g> {
    fn new(graph: &'g SimpleGraph, k: usize, init: Vec<u32>) -> Self {
        let v = graph.vertex_count();
        let mut t = Tabu {
            graph,
            k,
            color: init,
            gamma: vec![0; v * k],
            tabu_until: vec![0; v * k],
            conflicting: Vec::new(),
            position: vec![NOT_CONFLICTING; v],
            conflicts: 0,
        };
        for a in 0..v {
            for &b in graph.neighbors(a) {
                t.gamma[a * k + t.color[b as usize] as usize] += 1;
            }
        }
        for a in 0..v {
            let g = t.gamma[a * k + t.color[a] as usize];
            t.conflicts += g as usize;
            if g > 0 {
                t.mark(a as u32);
            }
        }
        t.conflicts /= 2;
        t
    }

    fn mark(&mut self, v: u32) {
        if self.position[v as usize] == NOT_CONFLICTING {
            self.position[v as usize] = self.conflicting.len() as u32;
            self.conflicting.push(v);
        }
    }

    fn unmark(&mut self, v: u32) {
        let p = self.position[v as usize];
        if p != NOT_CONFLICTING {
            let last = self.conflicting.pop().unwrap();
            if last != v {
                self.conflicting[p as usize] = last;
                self.position[last as usize] = p;
            }
            self.position[v as usize] = NOT_CONFLICTING;
        }
    }

    fn refresh(&mut self, v: u32) {
        if self.gamma[v as usize * self.k + self.color[v as usize] as usize] > 0 {
            self.mark(v);
        } else {
            self.unmark(v);
        }
    }

    fn recolor(&mut self, v: u32, to: u32) {
        let k = self.k;
        let from = self.color[v as usize];
        self.conflicts -= self.gamma[v as usize * k + from as usize] as usize;
        self.conflicts += self.gamma[v as usize * k + to as usize] as usize;
        self.color[v as usize] = to;
        for &u in self.graph.neighbors(v as usize) {
            self.gamma[u as usize * k + from as usize] -= 1;
            self.gamma[u as usize * k + to as usize] += 1;
            let cu = self.color[u as usize];
            if cu == from || cu == to {
                self.refresh(u);
            }
        }
        self.refresh(v);
    }

    fn run(
        &mut self,
        rng: &mut ChaCha8Rng,
        max_moves: u64,
        deadline: f64,
        start: Instant,
    ) -> (bool, u64) {
        let k = self.k;
        let mut best = self.conflicts;
        let mut moves = 0u64;
        while self.conflicts > 0 {
            if moves >= max_moves || (moves % 4096 == 0 && start.elapsed().as_secs_f64() > deadline)
            {
                return (false, moves);
            }
            moves += 1;
            let mut pick: Option<(i64, u32, u32)> = None;
            let mut ties = 0u32;
            for idx in 0..self.conflicting.len() {
                let v = self.conflicting[idx];
                let cur = self.color[v as usize];
                let base = self.gamma[v as usize * k + cur as usize] as i64;
                for c in 0..k as u32 {
                    if c == cur {
                        continue;
                    }
                    let delta = self.gamma[v as usize * k + c as usize] as i64 - base;
                    let tabu = self.tabu_until[v as usize * k + c as usize] > moves;
                    let aspires = (self.conflicts as i64 + delta) < best as i64;
                    if tabu && !aspires {
                        continue;
                    }
                    match pick {
                        Some((d, _, _)) if delta > d => {}
                        Some((d, _, _)) if delta == d => {
                            ties += 1;
                            if rng.gen_range(0..ties) == 0 {
                                pick = Some((delta, v, c));
                            }
                        }
                        _ => {
                            ties = 1;
                            pick = Some((delta, v, c));
                        }
                    }
                }
            }
            let (v, c) = match pick {
                Some((_, v, c)) => (v, c),
                None => {
                    // every move is tabu: perturb a random conflicting vertex
                    let v = self.conflicting[rng.gen_range(0..self.conflicting.len())];
                    let c = (self.color[v as usize] + rng.gen_range(1..k as u32)) % k as u32;
                    (v, c)
                }
            };
            let from = self.color[v as usize];
            self.recolor(v, c);
            let tenure = (0.6 * self.conflicts as f64) as u64 + rng.gen_range(0..10);
            self.tabu_until[v as usize * k + from as usize] = moves + tenure;
            best = best.min(self.conflicts);
        }
        (true, moves)
    }
}

/// DSATUR-style greedy start that never exceeds `k` colors: vertices that
/// would need a new color take their least conflicting color instead.
fn greedy_start(graph: &SimpleGraph, k: usize, rng: &mut ChaCha8Rng) -> Vec<u32> {
    let v = graph.vertex_count();
    let mut order: Vec<usize> = (0..v).collect();
    // random tie-breaking keeps restarts diverse
    for i in (1..v).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let mut color = vec![u32::MAX; v];
    let mut counts = vec![0u32; k];
    for &a in &order {
        counts.iter_mut().for_each(|c| *c = 0);
        for &b in graph.neighbors(a) {
            let cb = color[b as usize];
            if cb != u32::MAX {
                counts[cb as usize] += 1;
            }
        }
        let best = (0..k).min_by_key(|&c| counts[c]).unwrap();
        color[a] = best as u32;
    }
    color
}

/// Tabu search for a proper `k`-coloring from one seed. Never reports unsat.
pub fn heuristic_search(
    graph: &SimpleGraph,
    k: u32,
    budget: &SearchBudget,
) -> Result<GraphOutcome> {
    check_colors(k)?;
    budget.validate()?;
    let start = Instant::now();
    if graph.vertex_count() == 0 {
        return Ok(GraphOutcome {
            status: SolveStatus::Colored,
            colors: Some(Vec::new()),
            nodes: 0,
            elapsed: 0.0,
        });
    }
    if k == 1 {
        let status = if graph.edge_count() == 0 {
            SolveStatus::Colored
        } else {
            SolveStatus::Timeout
        };
        return Ok(GraphOutcome {
            colors: (status == SolveStatus::Colored).then(|| vec![1; graph.vertex_count()]),
            status,
            nodes: 0,
            elapsed: 0.0,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let init = greedy_start(graph, k as usize, &mut rng);
    let mut tabu = Tabu::new(graph, k as usize, init);
    let (found, moves) = tabu.run(&mut rng, budget.max_nodes, budget.max_seconds, start);
    let colors = found.then(|| tabu.color.iter().map(|c| c + 1).collect::<Vec<u32>>());
    if let Some(c) = &colors {
        assert_eq!(
            graph.conflicts(c),
            0,
            "tabu search produced an improper coloring"
        );
    }
    Ok(GraphOutcome {
        status: if found {
            SolveStatus::Colored
        } else {
            SolveStatus::Timeout
        },
        colors,
        nodes: moves,
        elapsed: start.elapsed().as_secs_f64(),
    })
}

/// Runs independently seeded tabu searches (`seed`, `seed + 1`, …) and
/// returns the success with the lowest seed, or the last timeout.
pub fn heuristic_portfolio(
    graph: &SimpleGraph,
    k: u32,
    budget: &SearchBudget,
    workers: usize,
) -> Result<GraphOutcome> {
    let runs: Vec<Result<GraphOutcome>> = (0..workers.max(1) as u64)
        .into_par_iter()
        .map(|w| {
            let b = SearchBudget {
                seed: budget.seed.wrapping_add(w),
                ..*budget
            };
            heuristic_search(graph, k, &b)
        })
        .collect();
    let mut last = None;
    for r in runs {
        let r = r?;
        if r.status == SolveStatus::Colored {
            return Ok(r);
        }
        last = Some(r);
    }
    Ok(last.expect("at least one worker"))
}

// ---------------------------------------------------------------------------
// Pancake-level entry points

fn full_view_graph(view: &PancakeView, limit: u64) -> Result<SimpleGraph> {
    if !view.is_full() {
        return Err(PancakeError::Configuration(
            "coloring search runs on the unrestricted graph".into(),
        ));
    }
    if view.vertex_count() > limit {
        return Err(PancakeError::Size {
            vertices: view.vertex_count() as usize,
            limit: limit as usize,
        });
    }
    Ok(SimpleGraph::from_view(view)?.0)
}

pub(crate) fn to_coloring(
    view: &PancakeView,
    k: u32,
    colors: &[u32],
    name: &str,
) -> Result<Coloring> {
    let table = colors.iter().map(|&c| c as u8).collect();
    let coloring = Coloring::tabular(view.n(), k, name, table)?;
    let report = verify_proper(view, &coloring)?;
    assert!(report.proper, "solver witness failed verification");
    Ok(coloring)
}

/// Decides (complete mode) or searches for (heuristic mode) a proper
/// `k`-coloring of `P_n`. Colored witnesses are verified before returning.
pub fn find_k_coloring(
    view: &PancakeView,
    k: u32,
    budget: &SearchBudget,
    mode: SearchMode,
) -> Result<SolveOutcome> {
    let limit = match mode {
        SearchMode::Complete => COMPLETE_LIMIT,
        SearchMode::Heuristic => HEURISTIC_LIMIT,
    };
    let graph = full_view_graph(view, limit)?;
    let out = match mode {
        SearchMode::Complete => complete_search(&graph, k, budget)?,
        SearchMode::Heuristic => heuristic_search(&graph, k, budget)?,
    };
    let coloring = match &out.colors {
        Some(c) => Some(to_coloring(view, k, c, "solver")?),
        None => None,
    };
    Ok(SolveOutcome {
        status: out.status,
        coloring,
        k,
        nodes: out.nodes,
        elapsed: out.elapsed,
    })
}

/// Heuristic search with `workers` independently seeded tabu runs; see
/// [`heuristic_portfolio`].
pub fn find_k_coloring_portfolio(
    view: &PancakeView,
    k: u32,
    budget: &SearchBudget,
    workers: usize,
) -> Result<SolveOutcome> {
    let graph = full_view_graph(view, HEURISTIC_LIMIT)?;
    let out = heuristic_portfolio(&graph, k, budget, workers)?;
    let coloring = match &out.colors {
        Some(c) => Some(to_coloring(view, k, c, "solver")?),
        None => None,
    };
    Ok(SolveOutcome {
        status: out.status,
        coloring,
        k,
        nodes: out.nodes,
        elapsed: out.elapsed,
    })
}

/// One decision made while computing the chromatic number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiStep {
    pub k: u32,
    pub status: SolveStatus,
    pub nodes: u64,
    pub elapsed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiResult {
    /// Set when decided: `upper == lower == chi`.
    pub chi: Option<u32>,
    pub lower: u32,
    pub upper: u32,
    pub witness: Option<Vec<u32>>,
    pub steps: Vec<ChiStep>,
    pub elapsed: f64,
}

/// Chromatic number of an explicit graph by complete search, starting from
/// the bipartiteness lower bound and moving up one color at a time.
pub fn exact_chi_graph(graph: &SimpleGraph, budget: &SearchBudget) -> Result<ChiResult> {
    budget.validate()?;
    let start = Instant::now();
    let v = graph.vertex_count();
    let greedy = dsatur_greedy(graph);
    let upper_start = greedy.iter().copied().max().unwrap_or(0);
    let mut lower = if v == 0 {
        0
    } else if graph.edge_count() == 0 {
        1
    } else if bipartite_graph(graph).odd_cycle.is_none() {
        2
    } else {
        3
    };
    let mut result = ChiResult {
        chi: None,
        lower,
        upper: upper_start,
        witness: Some(greedy),
        steps: Vec::new(),
        elapsed: 0.0,
    };
    while lower < result.upper {
        let remaining = budget.max_seconds - start.elapsed().as_secs_f64();
        if remaining <= 0.0 {
            break;
        }
        let step_budget = SearchBudget {
            max_seconds: remaining,
            ..*budget
        };
        let out = complete_search(graph, lower, &step_budget)?;
        result.steps.push(ChiStep {
            k: lower,
            status: out.status,
            nodes: out.nodes,
            elapsed: out.elapsed,
        });
        match out.status {
            SolveStatus::Colored => {
                result.upper = lower;
                result.witness = out.colors;
            }
            SolveStatus::Unsat => lower += 1,
            SolveStatus::Timeout => break,
        }
    }
    result.lower = lower;
    if lower == result.upper {
        result.chi = Some(lower);
    }
    result.elapsed = start.elapsed().as_secs_f64();
    Ok(result)
}

/// Chromatic number of `P_n` (at most 5040 vertices), with a verified witness.
pub fn exact_chi(
    view: &PancakeView,
    budget: &SearchBudget,
) -> Result<(ChiResult, Option<Coloring>)> {
    let graph = full_view_graph(view, COMPLETE_LIMIT)?;
    let result = exact_chi_graph(&graph, budget)?;
    let coloring = match &result.witness {
        Some(c) => Some(to_coloring(view, result.upper, c, "exact")?),
        None => None,
    };
    Ok((result, coloring))
}

/// Greedy DSATUR coloring with colors `1..`.
pub fn dsatur_greedy(graph: &SimpleGraph) -> Vec<u32> {
    let v = graph.vertex_count();
    let mut color = vec![0u32; v];
    let mut seen: Vec<u64> = vec![0; v];
    for _ in 0..v {
        let pick = (0..v)
            .filter(|&a| color[a] == 0)
            .max_by_key(|&a| (seen[a].count_ones(), graph.degree(a), std::cmp::Reverse(a)))
            .unwrap();
        let c = (!seen[pick]).trailing_zeros() + 1;
        color[pick] = c;
        for &b in graph.neighbors(pick) {
            if c <= 64 {
                seen[b as usize] |= 1 << (c - 1);
            }
        }
    }
    color
}

// ---------------------------------------------------------------------------
// Bipartiteness

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphBipartiteness {
    /// Side (0/1) of every vertex when bipartite.
    pub sides: Option<Vec<u8>>,
    /// Closed walk `v_0, …, v_{m-1}` of odd length `m` (edge `v_{m-1} v_0` implied).
    pub odd_cycle: Option<Vec<usize>>,
}

/// BFS 2-coloring; on failure returns the odd cycle closed by the first
/// same-side edge found.
pub fn bipartite_graph(graph: &SimpleGraph) -> GraphBipartiteness {
    let v = graph.vertex_count();
    let mut side = vec![u8::MAX; v];
    let mut parent = vec![usize::MAX; v];
    let mut depth = vec![0usize; v];
    let mut queue = std::collections::VecDeque::new();
    for root in 0..v {
        if side[root] != u8::MAX {
            continue;
        }
        side[root] = 0;
        queue.push_back(root);
        while let Some(a) = queue.pop_front() {
            for &b in graph.neighbors(a) {
                let b = b as usize;
                if side[b] == u8::MAX {
                    side[b] = side[a] ^ 1;
                    parent[b] = a;
                    depth[b] = depth[a] + 1;
                    queue.push_back(b);
                } else if side[b] == side[a] {
                    return GraphBipartiteness {
                        sides: None,
                        odd_cycle: Some(close_cycle(a, b, &parent, &depth)),
                    };
                }
            }
        }
    }
    GraphBipartiteness {
        sides: Some(side),
        odd_cycle: None,
    }
}

fn close_cycle(a: usize, b: usize, parent: &[usize], depth: &[usize]) -> Vec<usize> {
    let (mut x, mut y) = (a, b);
    let mut left = vec![x];
    let mut right = vec![y];
    while depth[x] > depth[y] {
        x = parent[x];
        left.push(x);
    }
    while depth[y] > depth[x] {
        y = parent[y];
        right.push(y);
    }
    while x != y {
        x = parent[x];
        y = parent[y];
        left.push(x);
        right.push(y);
    }
    right.pop();
    // a … lca, then back down to b
    left.extend(right.into_iter().rev());
    left
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Bipartiteness {
    pub bipartite: bool,
    pub odd_cycle: Option<Vec<Permutation>>,
}

/// Bipartiteness of a pancake view, with an odd cycle of permutations as
/// certificate when it fails.
pub fn is_bipartite(view: &PancakeView) -> Result<Bipartiteness> {
    if view.n() > 10 {
        return Err(PancakeError::Capacity {
            n: view.n(),
            limit: 10,
            context: "bipartiteness test",
        });
    }
    let (graph, vertices) = SimpleGraph::from_view(view)?;
    let res = bipartite_graph(&graph);
    Ok(Bipartiteness {
        bipartite: res.odd_cycle.is_none(),
        odd_cycle: res
            .odd_cycle
            .map(|c| c.into_iter().map(|i| vertices[i]).collect()),
    })
}

// ---------------------------------------------------------------------------
// Oracle

/// Chromatic number by enumerating every set partition of the vertices
/// (restricted growth strings). Independent of the search code above.
pub fn brute_force_chi(vertices: usize, edges: &[(usize, usize)]) -> Result<u32> {
    if vertices > BRUTE_FORCE_LIMIT {
        return Err(PancakeError::Size {
            vertices,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    if vertices == 0 {
        return Ok(0);
    }
    let mut adj = vec![vec![false; vertices]; vertices];
    for &(a, b) in edges {
        adj[a][b] = true;
        adj[b][a] = true;
    }
    let mut best = vertices as u32;
    let mut rgs = vec![0u32; vertices];
    loop {
        let blocks = rgs.iter().max().unwrap() + 1;
        if blocks < best {
            let proper =
                (0..vertices).all(|a| (a + 1..vertices).all(|b| !adj[a][b] || rgs[a] != rgs[b]));
            if proper {
                best = blocks;
            }
        }
        // next restricted growth string
        let mut i = vertices - 1;
        loop {
            if i == 0 {
                return Ok(best);
            }
            let prefix_max = rgs[..i].iter().max().copied().unwrap();
            if rgs[i] <= prefix_max {
                rgs[i] += 1;
                for r in rgs.iter_mut().skip(i + 1) {
                    *r = 0;
                }
                break;
            }
            i -= 1;
        }
    }
}

/// Random graph `G(v, p)` from a seed.
pub fn random_graph(vertices: usize, p: f64, seed: u64) -> Vec<(usize, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for a in 0..vertices {
        for b in a + 1..vertices {
            if rng.gen_bool(p) {
                edges.push((a, b));
            }
        }
    }
    edges
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Vec<(usize, usize)> {
        (0..n).map(|i| (i, (i + 1) % n)).collect()
    }

    fn clique(n: usize) -> Vec<(usize, usize)> {
        (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .collect()
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(brute_force_chi(6, &cycle(6)).unwrap(), 2);
        assert_eq!(brute_force_chi(7, &cycle(7)).unwrap(), 3);
        assert_eq!(brute_force_chi(4, &clique(4)).unwrap(), 4);
        assert_eq!(brute_force_chi(10, &clique(10)).unwrap(), 10);
        assert_eq!(brute_force_chi(3, &[]).unwrap(), 1);
        assert!(brute_force_chi(11, &[]).is_err());
    }

    #[test]
    fn exact_matches_oracle_on_small_families() {
        let b = SearchBudget::default();
        for n in 3..=10 {
            for edges in [cycle(n), clique(n)] {
                let g = SimpleGraph::from_edges(n, &edges).unwrap();
                let r = exact_chi_graph(&g, &b).unwrap();
                assert_eq!(r.chi, Some(brute_force_chi(n, &edges).unwrap()));
            }
        }
    }

    #[test]
    fn complete_search_respects_k() {
        let g = SimpleGraph::from_edges(5, &clique(5)).unwrap();
        let b = SearchBudget::default();
        assert_eq!(
            complete_search(&g, 4, &b).unwrap().status,
            SolveStatus::Unsat
        );
        let out = complete_search(&g, 5, &b).unwrap();
        assert_eq!(out.status, SolveStatus::Colored);
        assert_eq!(g.conflicts(&out.colors.unwrap()), 0);
    }

    #[test]
    fn node_budget_gives_timeout() {
        let g = SimpleGraph::from_edges(10, &clique(10)).unwrap();
        let b = SearchBudget {
            max_nodes: 3,
            ..SearchBudget::default()
        };
        assert_eq!(
            complete_search(&g, 9, &b).unwrap().status,
            SolveStatus::Timeout
        );
    }

    #[test]
    fn odd_cycle_certificate() {
        let g = SimpleGraph::from_edges(9, &cycle(9)).unwrap();
        let cyc = bipartite_graph(&g).odd_cycle.unwrap();
        assert_eq!(cyc.len(), 9);
        for t in 0..cyc.len() {
            assert!(g
                .neighbors(cyc[t])
                .contains(&(cyc[(t + 1) % cyc.len()] as u32)));
        }
        assert!(
            bipartite_graph(&SimpleGraph::from_edges(8, &cycle(8)).unwrap())
                .odd_cycle
                .is_none()
        );
    }

    #[test]
    fn tabu_colors_easy_graphs() {
        let edges = random_graph(60, 0.1, 7);
        let g = SimpleGraph::from_edges(60, &edges).unwrap();
        let chi = exact_chi_graph(&g, &SearchBudget::default())
            .unwrap()
            .chi
            .unwrap();
        let b = SearchBudget {
            max_nodes: 200_000,
            seed: 3,
            ..SearchBudget::default()
        };
        let out = heuristic_search(&g, chi + 1, &b).unwrap();
        assert_eq!(out.status, SolveStatus::Colored);
        assert_eq!(g.conflicts(&out.colors.unwrap()), 0);
    }

    #[test]
    fn heuristic_never_claims_unsat() {
        let g = SimpleGraph::from_edges(5, &clique(5)).unwrap();
        let b = SearchBudget {
            max_nodes: 1000,
            ..SearchBudget::default()
        };
        assert_eq!(
            heuristic_search(&g, 4, &b).unwrap().status,
            SolveStatus::Timeout
        );
    }

    #[test]
    fn graph_input_errors() {
        assert!(SimpleGraph::from_edges(3, &[(0, 3)]).is_err());
        assert!(SimpleGraph::from_edges(3, &[(1, 1)]).is_err());
        let g = SimpleGraph::from_edges(3, &[(0, 1), (1, 0)]).unwrap();
        assert_eq!(g.edge_count(), 1);
        let bad = SearchBudget {
            max_seconds: 0.0,
            ..SearchBudget::default()
        };
        assert!(complete_search(&g, 2, &bad).is_err());
        assert!(complete_search(&g, 0, &SearchBudget::default()).is_err());
    }
}
