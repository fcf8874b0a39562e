//! Colorings of `P_n` that are constant on orbits of a group of symbol
//! relabellings. `σ` acts by `π ↦ σ∘π`, which commutes with every prefix
//! reversal, so the orbits span a quotient graph and any proper coloring of
//! it lifts to `P_n`. An edge inside one orbit needs `σ∘π = π∘r_i`, making
//! `σ` an involution; groups of odd order therefore give loop-free quotients.

use std::collections::HashSet;

use crate::error::{PancakeError, Result};
use crate::perm::{factorial, Permutation};
use crate::solver::{
    heuristic_search, to_coloring, SearchBudget, SimpleGraph, SolveOutcome, HEURISTIC_LIMIT,
};
use crate::PancakeView;

/// Largest group accepted by [`RelabelGroup::generate`].
pub const GROUP_LIMIT: usize = 5040;

/// `σ∘π`: replace every symbol `s` of `π` by `σ(s)`.
pub fn relabel(sigma: &Permutation, pi: &Permutation) -> Permutation {
    let entries: Vec<u8> = pi
        .as_slice()
        .iter()
        .map(|&s| sigma.at(s as usize))
        .collect();
    Permutation::new(&entries).expect("relabelling a permutation")
}

/// A finite group of symbol permutations of odd order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelabelGroup {
    n: usize,
    elements: Vec<Permutation>,
}

impl RelabelGroup {
    /// Closure of `generators` under composition.
    pub fn generate(n: usize, generators: &[Permutation]) -> Result<Self> {
        if let Some(g) = generators.iter().find(|g| g.n() != n) {
            return Err(PancakeError::Configuration(format!(
                "generator {g} is not on {n} symbols"
            )));
        }
        let id = Permutation::identity(n);
        let mut seen: HashSet<Permutation> = HashSet::from([id.clone()]);
        let mut elements = vec![id];
        let mut next = 0;
        while next < elements.len() {
            let x = elements[next].clone();
            next += 1;
            for g in generators {
                let y = relabel(g, &x);
                if seen.insert(y.clone()) {
                    if elements.len() == GROUP_LIMIT {
                        return Err(PancakeError::Configuration(format!(
                            "group has more than {GROUP_LIMIT} elements"
                        )));
                    }
                    elements.push(y);
                }
            }
        }
        if elements.len() % 2 == 0 {
            return Err(PancakeError::Configuration(format!(
                "group of even order {} contains an involution",
                elements.len()
            )));
        }
        Ok(RelabelGroup { n, elements })
    }

    /// Frobenius group of order 21 on the symbols `1..=7`: `s ↦ s + 1` and
    /// `s ↦ 2s` modulo 7.
    pub fn frobenius21(n: usize) -> Result<Self> {
        if !(7..=12).contains(&n) {
            return Err(PancakeError::Range {
                what: "n",
                value: n as u64,
                min: 7,
                max: 12,
            });
        }
        let map = |f: &dyn Fn(usize) -> usize| -> Permutation {
            let entries: Vec<u8> = (0..n)
                .map(|s| if s < 7 { f(s) as u8 + 1 } else { s as u8 + 1 })
                .collect();
            Permutation::new(&entries).expect("affine map on 1..=7")
        };
        Self::generate(n, &[map(&|s| (s + 1) % 7), map(&|s| 2 * s % 7)])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }
}

/// The orbit graph of `P_n` under a [`RelabelGroup`].
#[derive(Debug, Clone)]
pub struct OrbitQuotient {
    pub graph: SimpleGraph,
    /// Orbit id of every vertex, indexed by rank.
    pub orbit: Vec<u32>,
    /// Lex-smallest member of each orbit.
    pub representatives: Vec<Permutation>,
}

pub fn orbit_quotient(group: &RelabelGroup) -> Result<OrbitQuotient> {
    let n = group.n();
    let total = factorial(n);
    if total > HEURISTIC_LIMIT {
        return Err(PancakeError::Size {
            vertices: total as usize,
            limit: HEURISTIC_LIMIT as usize,
        });
    }
    let mut orbit = vec![u32::MAX; total as usize];
    let mut representatives = Vec::with_capacity(total as usize / group.order());
    for pi in Permutation::all(n) {
        if orbit[pi.lex_rank().index()] != u32::MAX {
            continue;
        }
        let id = representatives.len() as u32;
        for sigma in group.elements() {
            orbit[relabel(sigma, &pi).lex_rank().index()] = id;
        }
        representatives.push(pi);
    }
    let mut edges = Vec::with_capacity(representatives.len() * (n - 1));
    for (a, pi) in representatives.iter().enumerate() {
        for i in 2..=n {
            let b = orbit[pi.reversed(i).lex_rank().index()] as usize;
            if a == b {
                return Err(PancakeError::Configuration(format!(
                    "loop at orbit of {pi}"
                )));
            }
            edges.push((a, b));
        }
    }
    Ok(OrbitQuotient {
        graph: SimpleGraph::from_edges(representatives.len(), &edges)?,
        orbit,
        representatives,
    })
}

/// Tabu search for a proper `k`-coloring of the orbit graph; a success is
/// lifted to a table over `P_n` and verified before returning.
pub fn find_invariant_coloring(
    group: &RelabelGroup,
    k: u32,
    budget: &SearchBudget,
) -> Result<SolveOutcome> {
    let q = orbit_quotient(group)?;
    let out = heuristic_search(&q.graph, k, budget)?;
    let coloring = match &out.colors {
        Some(c) => {
            let lifted: Vec<u32> = q.orbit.iter().map(|&o| c[o as usize]).collect();
            let view = PancakeView::full(group.n())?;
            Some(to_coloring(
                &view,
                k,
                &lifted,
                &format!("invariant{}", group.order()),
            )?)
        }
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
