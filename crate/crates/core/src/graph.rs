//! Implicit pancake graphs `P_n` and their induced subgraphs.
//!
//! Nothing here materializes adjacency: neighbors are recomputed from the
//! prefix reversals, and whole-graph scans walk rank ranges in parallel.

use std::io::{self, Write};
use std::ops::Range;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{PancakeError, Result};
use crate::perm::{factorial, Permutation, Rank, ENUMERATION_LIMIT, MAX_N};

/// Number of consecutive ranks handled by one parallel work item.
const CHUNK: u64 = 1 << 13;

/// A view of `P_n`, optionally restricted to vertices whose first entry lies
/// in a set `K`, or to one hierarchical copy `P_{n-1}(j)` (last entry fixed).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PancakeView {
    n: usize,
    /// Bit `v` set iff first entry `v` is allowed.
    first_mask: u32,
    fixed_last: Option<u8>,
}

/// An edge `{u, v}` with `v = u · r_generator`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub u: Permutation,
    pub v: Permutation,
    pub generator: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct StreamStats {
    pub vertices: u64,
    pub edges: u64,
}

fn full_mask(n: usize) -> u32 {
    ((1u32 << n) - 1) << 1
}

impl PancakeView {
    pub fn full(n: usize) -> Result<Self> {
        if !(2..=MAX_N).contains(&n) {
            return Err(PancakeError::Range {
                what: "n",
                value: n as u64,
                min: 2,
                max: MAX_N as u64,
            });
        }
        Ok(PancakeView {
            n,
            first_mask: full_mask(n),
            fixed_last: None,
        })
    }

    /// The induced subgraph `P_{n,K}` on permutations with `π_1 ∈ K`.
    pub fn restricted(n: usize, first: &[u8]) -> Result<Self> {
        let mut view = Self::full(n)?;
        let mask = subset_mask(n, first)?;
        view.first_mask = mask;
        Ok(view)
    }

    /// The copy `P_{n-1}(j)`: permutations ending in `j`, joined by
    /// `r_2 … r_{n-1}` only.
    pub fn copy(n: usize, last: u8) -> Result<Self> {
        let mut view = Self::full(n)?;
        if n < 3 {
            return Err(PancakeError::Range {
                what: "n",
                value: n as u64,
                min: 3,
                max: MAX_N as u64,
            });
        }
        if last == 0 || last as usize > n {
            return Err(PancakeError::Range {
                what: "last element",
                value: last as u64,
                min: 1,
                max: n as u64,
            });
        }
        view.first_mask &= !(1 << last);
        view.fixed_last = Some(last);
        Ok(view)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_full(&self) -> bool {
        self.first_mask == full_mask(self.n) && self.fixed_last.is_none()
    }

    pub fn fixed_last(&self) -> Option<u8> {
        self.fixed_last
    }

    /// Allowed first entries, ascending.
    pub fn first_set(&self) -> Vec<u8> {
        (1..=self.n as u8)
            .filter(|v| self.first_mask & (1 << v) != 0)
            .collect()
    }

    pub fn vertex_count(&self) -> u64 {
        let k = self.first_mask.count_ones() as u64;
        match self.fixed_last {
            None => k * factorial(self.n - 1),
            Some(_) => k * factorial(self.n - 2),
        }
    }

    /// Largest prefix reversal that is an edge of this view.
    #[inline]
    pub fn max_generator(&self) -> usize {
        match self.fixed_last {
            None => self.n,
            Some(_) => self.n - 1,
        }
    }

    /// Degree of every vertex when the view is the full graph or a copy.
    pub fn regular_degree(&self) -> Option<usize> {
        if self.first_mask.count_ones() as usize == self.n - self.fixed_last.is_some() as usize {
            Some(self.max_generator() - 1)
        } else {
            None
        }
    }

    #[inline]
    pub fn contains(&self, pi: &Permutation) -> bool {
        pi.n() == self.n
            && self.first_mask & (1 << pi.first()) != 0
            && self.fixed_last.is_none_or(|j| pi.last() == j)
    }

    fn check_member(&self, pi: &Permutation) -> Result<()> {
        if self.contains(pi) {
            Ok(())
        } else {
            Err(PancakeError::Membership(pi.to_string()))
        }
    }

    /// One edge per prefix reversal whose image stays inside the view.
    pub fn neighbors(&self, pi: &Permutation) -> Result<Vec<Edge>> {
        self.check_member(pi)?;
        let mut out = Vec::with_capacity(self.n - 1);
        self.for_each_neighbor(pi, |v, generator| {
            out.push(Edge {
                u: *pi,
                v,
                generator,
            })
        });
        Ok(out)
    }

    /// Calls `f(neighbor, generator)` for every neighbor inside the view.
    /// The caller guarantees `pi` is a vertex of the view.
    #[inline]
    pub fn for_each_neighbor(&self, pi: &Permutation, mut f: impl FnMut(Permutation, usize)) {
        for g in 2..=self.max_generator() {
            let v = pi.reversed(g);
            if self.first_mask & (1 << v.first()) != 0 {
                f(v, g);
            }
        }
    }

    fn check_enumerable(&self) -> Result<()> {
        if self.n > ENUMERATION_LIMIT {
            return Err(PancakeError::Capacity {
                n: self.n,
                limit: ENUMERATION_LIMIT,
                context: "graph enumeration",
            });
        }
        Ok(())
    }

    /// Rank ranges covering the view: permutations with first entry `a`
    /// occupy ranks `[(a-1)(n-1)!, a(n-1)!)`.
    pub fn rank_ranges(&self) -> Vec<Range<u64>> {
        let block = factorial(self.n - 1);
        self.first_set()
            .into_iter()
            .map(|a| (a as u64 - 1) * block..a as u64 * block)
            .collect()
    }

    fn chunks(&self) -> Vec<Range<u64>> {
        let mut out = Vec::new();
        for r in self.rank_ranges() {
            let mut s = r.start;
            while s < r.end {
                let e = (s + CHUNK).min(r.end);
                out.push(s..e);
                s = e;
            }
        }
        out
    }

    fn walk_chunk(&self, range: Range<u64>, mut f: impl FnMut(&Permutation)) {
        let mut pi = Permutation::lex_unrank(Rank(range.start), self.n).expect("rank in range");
        for r in range.clone() {
            if self.fixed_last.is_none_or(|j| pi.last() == j) {
                f(&pi);
            }
            if r + 1 < range.end {
                pi.next_lex();
            }
        }
    }

    /// Visits every vertex in rank order, serially.
    pub fn for_each_vertex(&self, mut f: impl FnMut(&Permutation)) -> Result<()> {
        self.check_enumerable()?;
        for r in self.rank_ranges() {
            self.walk_chunk(r, &mut f);
        }
        Ok(())
    }

    /// Vertices in rank order.
    pub fn vertices(&self) -> Result<Vec<Permutation>> {
        let mut out = Vec::with_capacity(self.vertex_count() as usize);
        self.for_each_vertex(|p| out.push(*p))?;
        Ok(out)
    }

    /// Parallel fold over vertices. Each rank chunk is folded from
    /// `identity()`, and chunk results are merged left to right with `merge`,
    /// so the result does not depend on scheduling as long as `merge` is
    /// associative.
    pub fn fold_vertices<A, I, F, M>(&self, identity: I, fold: F, merge: M) -> Result<A>
    where
        A: Send,
        I: Fn() -> A + Sync + Send,
        F: Fn(&mut A, &Permutation) + Sync + Send,
        M: Fn(A, A) -> A + Sync + Send,
    {
        self.check_enumerable()?;
        Ok(self
            .chunks()
            .into_par_iter()
            .map(|range| {
                let mut acc = identity();
                self.walk_chunk(range, |p| fold(&mut acc, p));
                acc
            })
            .reduce(&identity, &merge))
    }

    /// Parallel fold over edges; each edge is produced once, from the endpoint
    /// that comes first in lexicographic (rank) order.
    pub fn fold_edges<A, I, F, M>(&self, identity: I, fold: F, merge: M) -> Result<A>
    where
        A: Send,
        I: Fn() -> A + Sync + Send,
        F: Fn(&mut A, &Edge) + Sync + Send,
        M: Fn(A, A) -> A + Sync + Send,
    {
        self.fold_vertices(
            identity,
            |acc, u| {
                self.for_each_neighbor(u, |v, generator| {
                    if *u < v {
                        fold(
                            acc,
                            &Edge {
                                u: *u,
                                v,
                                generator,
                            },
                        );
                    }
                })
            },
            merge,
        )
    }

    /// Streams every edge once to a concurrent visitor.
    pub fn stream_edges(&self, visitor: impl Fn(&Edge) + Sync + Send) -> Result<StreamStats> {
        self.fold_vertices(
            StreamStats::default,
            |acc, u| {
                acc.vertices += 1;
                self.for_each_neighbor(u, |v, generator| {
                    if *u < v {
                        acc.edges += 1;
                        visitor(&Edge {
                            u: *u,
                            v,
                            generator,
                        });
                    }
                })
            },
            |a, b| StreamStats {
                vertices: a.vertices + b.vertices,
                edges: a.edges + b.edges,
            },
        )
    }

    /// Single-worker edge streaming in rank order.
    pub fn stream_edges_serial(&self, mut visitor: impl FnMut(&Edge)) -> Result<StreamStats> {
        let mut stats = StreamStats::default();
        self.for_each_vertex(|u| {
            stats.vertices += 1;
            self.for_each_neighbor(u, |v, generator| {
                if *u < v {
                    stats.edges += 1;
                    visitor(&Edge {
                        u: *u,
                        v,
                        generator,
                    });
                }
            })
        })?;
        Ok(stats)
    }

    /// Writes the unrestricted graph in DIMACS `p edge` form, vertex ids
    /// `lex_rank + 1`, each edge once with `u < v`.
    pub fn write_dimacs<W: Write>(&self, out: &mut W) -> Result<()> {
        if !self.is_full() {
            return Err(PancakeError::Configuration(
                "DIMACS export is defined for the unrestricted graph only".into(),
            ));
        }
        self.check_enumerable()?;
        let n = self.n as u64;
        let io_err = |e: io::Error| PancakeError::Configuration(format!("write failed: {e}"));
        let vertices = factorial(self.n);
        writeln!(out, "p edge {} {}", vertices, vertices * (n - 1) / 2).map_err(io_err)?;
        let mut failure = None;
        self.stream_edges_serial(|e| {
            if failure.is_none() {
                let a = e.u.lex_rank().0 + 1;
                let b = e.v.lex_rank().0 + 1;
                if let Err(err) = writeln!(out, "e {a} {b}") {
                    failure = Some(err);
                }
            }
        })?;
        match failure {
            Some(e) => Err(io_err(e)),
            None => Ok(()),
        }
    }
}

pub(crate) fn subset_mask(n: usize, set: &[u8]) -> Result<u32> {
    if set.is_empty() {
        return Err(PancakeError::Configuration(
            "empty first-element set".into(),
        ));
    }
    let mut mask = 0u32;
    for &v in set {
        if v == 0 || v as usize > n {
            return Err(PancakeError::Range {
                what: "subset element",
                value: v as u64,
                min: 1,
                max: n as u64,
            });
        }
        mask |= 1 << v;
    }
    Ok(mask)
}

/// The homomorphism `P_{n,K} -> P_{|K|}`: deletes entries outside `K` and
/// relabels the survivors by the order-preserving bijection `K -> [|K|]`.
pub fn project(pi: &Permutation, set: &[u8]) -> Result<Permutation> {
    let mask = subset_mask(pi.n(), set)?;
    if mask & (1 << pi.first()) == 0 {
        return Err(PancakeError::Domain(format!(
            "{pi} has first entry outside {set:?}"
        )));
    }
    Ok(project_mask(pi, mask))
}

/// [`project`] with a precomputed bit mask of `K`; `π_1 ∈ K` is not checked.
#[inline]
pub fn project_mask(pi: &Permutation, mask: u32) -> Permutation {
    let mut buf = [0u8; MAX_N];
    let mut len = 0;
    for &v in pi.as_slice() {
        if mask & (1 << v) != 0 {
            buf[len] = (mask & ((1u32 << v) - 1)).count_ones() as u8 + 1;
            len += 1;
        }
    }
    Permutation::new(&buf[..len]).expect("projection is a permutation")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{BTreeSet, HashSet};
    use std::sync::atomic::{AtomicU64, Ordering};

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    #[test]
    fn neighbor_examples() {
        let view = PancakeView::full(4).unwrap();
        let got: BTreeSet<_> = view
            .neighbors(&p("[1234]"))
            .unwrap()
            .into_iter()
            .map(|e| e.v)
            .collect();
        let want: BTreeSet<_> = [p("[2134]"), p("[3214]"), p("[4321]")]
            .into_iter()
            .collect();
        assert_eq!(got, want);

        let p3 = PancakeView::full(3).unwrap();
        for pi in Permutation::all(3) {
            assert_eq!(p3.neighbors(&pi).unwrap().len(), 2);
        }

        let restricted = PancakeView::restricted(5, &[1, 2, 3]).unwrap();
        assert!(matches!(
            restricted.neighbors(&p("[41352]")),
            Err(PancakeError::Membership(_))
        ));
    }

    #[test]
    fn projection_examples() {
        assert_eq!(project(&p("[14352]"), &[1, 2, 3]).unwrap(), p("[132]"));
        assert_eq!(
            project(&p("[12345]"), &[1, 2, 3, 4, 5]).unwrap(),
            p("[12345]")
        );
        assert_eq!(project(&p("[45312]"), &[3, 4, 5]).unwrap(), p("[231]"));
        assert!(matches!(
            project(&p("[45312]"), &[1, 2]),
            Err(PancakeError::Domain(_))
        ));
    }

    #[test]
    fn edge_symmetry_up_to_six() {
        for n in 2..=6 {
            let view = PancakeView::full(n).unwrap();
            for u in Permutation::all(n) {
                let nb = view.neighbors(&u).unwrap();
                assert_eq!(nb.len(), n - 1);
                for e in nb {
                    assert_eq!(e.u.apply_reversal(e.generator).unwrap(), e.v);
                    assert!(view.neighbors(&e.v).unwrap().iter().any(|b| b.v == u));
                }
            }
        }
    }

    fn subsets(n: usize) -> impl Iterator<Item = Vec<u8>> {
        (1u32..(1 << n)).map(move |m| (1..=n as u8).filter(|v| m & (1 << (v - 1)) != 0).collect())
    }

    fn adjacent(a: &Permutation, b: &Permutation) -> bool {
        (2..=a.n()).any(|g| a.reversed(g) == *b)
    }

    #[test]
    fn projection_is_homomorphism_exhaustive() {
        for n in 2..=6 {
            for set in subsets(n) {
                let view = PancakeView::restricted(n, &set).unwrap();
                view.stream_edges_serial(|e| {
                    let a = project(&e.u, &set).unwrap();
                    let b = project(&e.v, &set).unwrap();
                    assert_ne!(a, b);
                    assert!(adjacent(&a, &b), "{} {} -> {a} {b}", e.u, e.v);
                })
                .unwrap();
            }
        }
    }

    #[test]
    fn fiber_sizes_up_to_eight() {
        // f_{m+1,m}: every vertex of P_m has m preimages (m+1 may not lead).
        for n in 3..=9 {
            let set: Vec<u8> = (1..n as u8).collect();
            let view = PancakeView::restricted(n, &set).unwrap();
            let mut counts = vec![0u32; factorial(n - 1) as usize];
            view.for_each_vertex(|pi| counts[project(pi, &set).unwrap().lex_rank().index()] += 1)
                .unwrap();
            assert!(counts.iter().all(|&c| c as usize == n - 1), "n = {n}");
        }
    }

    #[test]
    fn edge_counts() {
        assert_eq!(
            PancakeView::full(4)
                .unwrap()
                .stream_edges(|_| {})
                .unwrap()
                .edges,
            36
        );
        assert_eq!(
            PancakeView::full(3)
                .unwrap()
                .stream_edges(|_| {})
                .unwrap()
                .edges,
            6
        );
        for n in 2..=8 {
            let view = PancakeView::full(n).unwrap();
            let seen = AtomicU64::new(0);
            let stats = view
                .stream_edges(|_| {
                    seen.fetch_add(1, Ordering::Relaxed);
                })
                .unwrap();
            let want = factorial(n) * (n as u64 - 1) / 2;
            assert_eq!(stats.edges, want);
            assert_eq!(seen.load(Ordering::Relaxed), want);
            assert_eq!(stats.vertices, factorial(n));
        }
    }

    #[test]
    fn streamed_edges_are_distinct() {
        let view = PancakeView::full(6).unwrap();
        let mut seen = HashSet::new();
        view.stream_edges_serial(|e| {
            assert!(e.u < e.v);
            assert!(seen.insert((e.u, e.v)));
        })
        .unwrap();
        assert_eq!(seen.len(), 720 * 5 / 2);
    }

    #[test]
    fn enumeration_bound() {
        let view = PancakeView::full(13).unwrap();
        assert!(matches!(
            view.stream_edges(|_| {}),
            Err(PancakeError::Capacity { .. })
        ));
        assert!(view.neighbors(&Permutation::identity(13)).is_ok());
    }

    #[test]
    fn restricted_view_counts() {
        let view = PancakeView::restricted(5, &[2, 4]).unwrap();
        assert_eq!(view.vertex_count(), 48);
        assert_eq!(view.vertices().unwrap().len(), 48);
        assert!(view
            .vertices()
            .unwrap()
            .iter()
            .all(|v| [2, 4].contains(&v.first())));
    }

    #[test]
    fn hierarchical_copies() {
        for n in 3..=7 {
            let mut internal = 0;
            for j in 1..=n as u8 {
                let copy = PancakeView::copy(n, j).unwrap();
                assert_eq!(copy.vertex_count(), factorial(n - 1));
                let stats = copy.stream_edges(|_| {}).unwrap();
                assert_eq!(stats.vertices, factorial(n - 1));
                assert_eq!(stats.edges, factorial(n - 1) * (n as u64 - 2) / 2);
                internal += stats.edges;
            }
            // Every r_n edge joins two different copies, (n-2)! per pair.
            let full = PancakeView::full(n).unwrap();
            let mut between = std::collections::HashMap::new();
            full.stream_edges_serial(|e| {
                if e.generator == n {
                    assert_ne!(e.u.last(), e.v.last());
                    let key = (e.u.last().min(e.v.last()), e.u.last().max(e.v.last()));
                    *between.entry(key).or_insert(0u64) += 1;
                }
            })
            .unwrap();
            assert_eq!(between.len(), n * (n - 1) / 2);
            assert!(between.values().all(|&c| c == factorial(n - 2)));
            assert_eq!(
                internal + between.values().sum::<u64>(),
                factorial(n) * (n as u64 - 1) / 2
            );
        }
    }

    #[test]
    fn dimacs_header_and_lines() {
        let mut buf = Vec::new();
        PancakeView::full(3)
            .unwrap()
            .write_dimacs(&mut buf)
            .unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "p edge 6 6");
        assert_eq!(lines.len(), 7);
        // [123] (id 1) is joined to [213] (id 3) and [321] (id 6).
        assert_eq!(lines[1], "e 1 3");
        assert_eq!(lines[2], "e 1 6");
        for l in &lines[1..] {
            let parts: Vec<u64> = l[2..].split(' ').map(|t| t.parse().unwrap()).collect();
            assert!(parts[0] < parts[1]);
        }
        assert!(PancakeView::restricted(3, &[1])
            .unwrap()
            .write_dimacs(&mut Vec::new())
            .is_err());
    }
}
