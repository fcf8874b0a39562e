//! The quotient graph `Q_n` on the sets `D_i^j` and its closed-form
//! `(n-1)`-coloring, lifted to an equitable coloring of `P_n`.
//!
//! `(i, j)` and `(i', j')` are adjacent iff they share the last element
//! (`j = j'`, `i != i'`) or they are swapped (`i = j'`, `j = i'`). The
//! coloring starts from `f(i, j) = i - j (mod n)` in `[n-1]` and, for even
//! `n` and `j > n/2`, exchanges the values `n/2` and `n/2 + 1`.

use std::io::{self, Write};

use serde::Serialize;

use crate::coloring::Coloring;
use crate::error::{PancakeError, Result};
use crate::perm::MAX_N;

/// Vertex `(i, j)` of `Q_n`, naming `D_i^j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct QuotientVertex {
    pub i: u32,
    pub j: u32,
}

impl std::fmt::Display for QuotientVertex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

/// `n / 2`, kept as `2 · (n / 2) = n` so comparisons stay in integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HalfPoint {
    twice: u32,
}

impl HalfPoint {
    pub fn of(n: u32) -> Self {
        HalfPoint { twice: n }
    }

    pub fn is_integral(self) -> bool {
        self.twice % 2 == 0
    }

    /// `x == n/2`
    #[inline]
    pub fn equals(self, x: u32) -> bool {
        2 * x == self.twice
    }

    /// `x > n/2`
    #[inline]
    pub fn below(self, x: u32) -> bool {
        2 * x > self.twice
    }
}

fn check_pair(n: u32, i: u32, j: u32) -> Result<()> {
    if n < 3 {
        return Err(PancakeError::Range {
            what: "n",
            value: n as u64,
            min: 3,
            max: u32::MAX as u64,
        });
    }
    for (v, what) in [(i, "i"), (j, "j")] {
        if v == 0 || v > n {
            return Err(PancakeError::Range {
                what,
                value: v as u64,
                min: 1,
                max: n as u64,
            });
        }
    }
    if i == j {
        return Err(PancakeError::Domain(format!("(i, j) = ({i}, {j})")));
    }
    Ok(())
}

#[inline]
fn f_raw(n: u32, i: u32, j: u32) -> u32 {
    if i > j {
        i - j
    } else {
        n + i - j
    }
}

/// Correction applied to `f` on columns `j > n/2`: `+1` where `f = n/2`,
/// `-1` where `f = n/2 + 1`. Always zero for odd `n`.
#[inline]
pub fn epsilon(n: u32, i: u32, j: u32) -> i32 {
    let k = HalfPoint::of(n);
    if !k.below(j) {
        return 0;
    }
    let f = f_raw(n, i, j);
    if k.equals(f) {
        1
    } else if k.equals(f - 1) {
        -1
    } else {
        0
    }
}

#[inline]
fn c_raw(n: u32, i: u32, j: u32) -> u32 {
    (f_raw(n, i, j) as i32 + epsilon(n, i, j)) as u32
}

/// `f(D_i^j)`: `i - j` if `i > j`, otherwise `n + i - j`.
pub fn f_value(n: u32, i: u32, j: u32) -> Result<u32> {
    check_pair(n, i, j)?;
    Ok(f_raw(n, i, j))
}

/// `c(D_i^j) = f(D_i^j) + ε`.
pub fn c_value(n: u32, i: u32, j: u32) -> Result<u32> {
    check_pair(n, i, j)?;
    Ok(c_raw(n, i, j))
}

/// `Q_n` with an explicit adjacency list; vertices are ordered by `j`, then `i`.
#[derive(Debug, Clone)]
pub struct QuotientGraph {
    n: u32,
    vertices: Vec<QuotientVertex>,
    adjacency: Vec<Vec<usize>>,
}

impl QuotientGraph {
    pub fn build(n: u32) -> Result<Self> {
        if n < 3 {
            return Err(PancakeError::Range {
                what: "n",
                value: n as u64,
                min: 3,
                max: u32::MAX as u64,
            });
        }
        let vertices: Vec<QuotientVertex> = (1..=n)
            .flat_map(|j| {
                (1..=n)
                    .filter(move |&i| i != j)
                    .map(move |i| QuotientVertex { i, j })
            })
            .collect();
        let index = |v: QuotientVertex| quotient_index(n, v);
        let adjacency = vertices
            .iter()
            .map(|&v| {
                let mut adj: Vec<usize> = (1..=n)
                    .filter(|&i2| i2 != v.i && i2 != v.j)
                    .map(|i2| index(QuotientVertex { i: i2, j: v.j }))
                    .collect();
                adj.push(index(QuotientVertex { i: v.j, j: v.i }));
                adj.sort_unstable();
                adj
            })
            .collect();
        Ok(QuotientGraph {
            n,
            vertices,
            adjacency,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn vertices(&self) -> &[QuotientVertex] {
        &self.vertices
    }

    pub fn neighbors(&self, idx: usize) -> &[usize] {
        &self.adjacency[idx]
    }

    pub fn index_of(&self, v: QuotientVertex) -> usize {
        quotient_index(self.n, v)
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(a, b)` with `a < b`, by vertex index.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(a, adj)| adj.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
    }

    /// `c` on every vertex, in vertex order.
    pub fn coloring(&self) -> Vec<u32> {
        self.vertices
            .iter()
            .map(|v| c_raw(self.n, v.i, v.j))
            .collect()
    }

    pub fn write_dimacs<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "p edge {} {}", self.vertices.len(), self.edge_count())?;
        for (a, b) in self.edges() {
            writeln!(out, "e {} {}", a + 1, b + 1)?;
        }
        Ok(())
    }
}

fn quotient_index(n: u32, v: QuotientVertex) -> usize {
    let col = (v.j - 1) as usize * (n - 1) as usize;
    col + if v.i < v.j { v.i - 1 } else { v.i - 2 } as usize
}

pub fn build_quotient(n: u32) -> Result<QuotientGraph> {
    QuotientGraph::build(n)
}

/// Checks `c` against every edge of `Q_n` without materializing it: same
/// column edges need `c` injective on each column, swapped pairs need
/// `c(i, j) != c(j, i)`.
pub fn quotient_coloring_is_proper(n: u32) -> Result<bool> {
    check_pair(n, 1, 2)?;
    for j in 1..=n {
        let mut seen = vec![false; n as usize];
        for i in (1..=n).filter(|&i| i != j) {
            let c = c_raw(n, i, j) as usize;
            if c == 0 || c >= n as usize || seen[c] {
                return Ok(false);
            }
            seen[c] = true;
        }
    }
    for j in 1..=n {
        for i in j + 1..=n {
            if c_raw(n, i, j) == c_raw(n, j, i) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The equitable `(n-1)`-coloring of `P_n`: `π ↦ c(π_1, π_n)`.
pub fn lift(n: usize) -> Result<Coloring> {
    if !(3..=MAX_N).contains(&n) {
        return Err(PancakeError::Range {
            what: "n",
            value: n as u64,
            min: 3,
            max: MAX_N as u64,
        });
    }
    let m = n as u32;
    Ok(Coloring::functional(n, m - 1, "equitable-nm1", move |p| {
        c_raw(m, p.first() as u32, p.last() as u32)
    }))
}

/// Hamiltonian cycle of `Q_n` grouping vertices by last element
/// `j = n, n-1, …, 1`; inside a group the first element increases
/// cyclically, starting right after `j`. Starts at `(1, n)`.
pub fn hamiltonian_order(n: u32) -> Vec<QuotientVertex> {
    let mut out = Vec::with_capacity((n * (n - 1)) as usize);
    for j in (1..=n).rev() {
        let mut i = j % n + 1;
        for _ in 0..n - 1 {
            out.push(QuotientVertex { i, j });
            i = i % n + 1;
            if i == j {
                i = i % n + 1;
            }
        }
    }
    out
}

/// Greedy (first-fit) coloring of `Q_n` visiting vertices in `order`.
pub fn greedy_coloring(graph: &QuotientGraph, order: &[QuotientVertex]) -> Vec<u32> {
    let mut colors = vec![0u32; graph.vertices().len()];
    for &v in order {
        let idx = graph.index_of(v);
        let mut used: Vec<u32> = graph.neighbors(idx).iter().map(|&u| colors[u]).collect();
        used.sort_unstable();
        let mut c = 1;
        for u in used {
            if u == c {
                c += 1;
            }
        }
        colors[idx] = c;
    }
    colors
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::{verify_perfect, verify_proper};
    use crate::graph::PancakeView;
    use crate::perm::factorial;
    use std::collections::HashMap;

    fn brute_adjacent(a: QuotientVertex, b: QuotientVertex) -> bool {
        (a.j == b.j && a.i != b.i) || (a.i == b.j && a.j == b.i)
    }

    #[test]
    fn quotient_sizes() {
        let q4 = build_quotient(4).unwrap();
        assert_eq!((q4.vertices().len(), q4.edge_count()), (12, 18));
        let q6 = build_quotient(6).unwrap();
        assert_eq!((q6.vertices().len(), q6.edge_count()), (30, 75));
        let q3 = build_quotient(3).unwrap();
        assert_eq!((q3.vertices().len(), q3.edge_count()), (6, 6));
        // 2-regular and connected: a single 6-cycle
        assert!((0..6).all(|v| q3.neighbors(v).len() == 2));
        let mut seen = vec![false; 6];
        let mut stack = vec![0];
        while let Some(v) = stack.pop() {
            if !std::mem::replace(&mut seen[v], true) {
                stack.extend_from_slice(q3.neighbors(v));
            }
        }
        assert!(seen.iter().all(|&s| s));
        assert!(build_quotient(2).is_err());
    }

    #[test]
    fn adjacency_matches_rules() {
        for n in 3..=9 {
            let q = build_quotient(n).unwrap();
            let vs = q.vertices();
            for a in 0..vs.len() {
                assert_eq!(q.neighbors(a).len(), (n - 1) as usize);
                for b in 0..vs.len() {
                    let listed = q.neighbors(a).contains(&b);
                    assert_eq!(listed, brute_adjacent(vs[a], vs[b]), "{} {}", vs[a], vs[b]);
                }
            }
            assert_eq!(q.edge_count() as u32, n * (n - 1) * (n - 1) / 2);
        }
    }

    #[test]
    fn quotient_matches_pancake_adjacency() {
        // X ~ Y in Q_n iff some member of X is adjacent to some member of Y.
        for n in 3..=6usize {
            let q = build_quotient(n as u32).unwrap();
            let mut found = std::collections::HashSet::new();
            PancakeView::full(n)
                .unwrap()
                .stream_edges_serial(|e| {
                    let a = QuotientVertex {
                        i: e.u.first() as u32,
                        j: e.u.last() as u32,
                    };
                    let b = QuotientVertex {
                        i: e.v.first() as u32,
                        j: e.v.last() as u32,
                    };
                    assert_ne!(a, b);
                    found.insert((
                        q.index_of(a).min(q.index_of(b)),
                        q.index_of(a).max(q.index_of(b)),
                    ));
                })
                .unwrap();
            let listed: std::collections::HashSet<_> = q.edges().collect();
            assert_eq!(found, listed, "n = {n}");
        }
    }

    #[test]
    fn value_examples() {
        assert_eq!(f_value(5, 3, 1).unwrap(), 2);
        assert_eq!(f_value(5, 1, 3).unwrap(), 3);
        assert_eq!(f_value(6, 2, 5).unwrap(), 3);
        assert_eq!(c_value(6, 2, 5).unwrap(), 4);
        assert_eq!(c_value(6, 3, 5).unwrap(), 3);
        assert_eq!(c_value(5, 3, 1).unwrap(), 2);
        assert!(matches!(f_value(5, 2, 2), Err(PancakeError::Domain(_))));
        assert!(matches!(c_value(5, 2, 2), Err(PancakeError::Domain(_))));
        assert!(c_value(5, 6, 2).is_err());
    }

    #[test]
    fn odd_n_has_no_correction() {
        for n in (3..=99).step_by(2) {
            for i in 1..=n {
                for j in (1..=n).filter(|&j| j != i) {
                    assert_eq!(epsilon(n, i, j), 0);
                }
            }
        }
    }

    #[test]
    fn columns_injective_and_in_range() {
        for n in 3..=200u32 {
            for j in 1..=n {
                let mut cs: Vec<u32> = (1..=n)
                    .filter(|&i| i != j)
                    .map(|i| c_raw(n, i, j))
                    .collect();
                let mut fs: Vec<u32> = (1..=n)
                    .filter(|&i| i != j)
                    .map(|i| f_raw(n, i, j))
                    .collect();
                cs.sort_unstable();
                fs.sort_unstable();
                let want: Vec<u32> = (1..n).collect();
                assert_eq!(cs, want, "n={n} j={j}");
                assert_eq!(fs, want);
            }
        }
    }

    /// Walks every swapped pair `(i, j) ~ (j, i)` with `j < i` through the
    /// case split of the properness argument and checks each case.
    #[test]
    fn swapped_pairs_by_case() {
        let mut cases: HashMap<&'static str, usize> = HashMap::new();
        for n in 3..=200u32 {
            let k = HalfPoint::of(n);
            for j in 1..n {
                for i in j + 1..=n {
                    let (cx, cy) = (c_raw(n, i, j), c_raw(n, j, i));
                    let case = if !k.is_integral() {
                        "odd"
                    } else if !k.below(i) {
                        "j<i<=k"
                    } else if !k.below(j) {
                        "j<=k<i"
                    } else {
                        match (epsilon(n, i, j), epsilon(n, j, i)) {
                            (a, b) if a == b => "k<j<i equal",
                            (-1, 1) => "k<j<i (-1,+1)",
                            (1, -1) => "k<j<i (+1,-1)",
                            _ => "k<j<i mixed parity",
                        }
                    };
                    *cases.entry(case).or_default() += 1;
                    assert_ne!(cx, cy, "n={n} i={i} j={j} case {case}");
                }
            }
        }
        for case in [
            "odd",
            "j<i<=k",
            "j<=k<i",
            "k<j<i equal",
            "k<j<i mixed parity",
        ] {
            assert!(
                cases.get(case).copied().unwrap_or(0) > 0,
                "case {case} never hit"
            );
        }
    }

    #[test]
    fn both_exchanges_occur() {
        let mut plus = 0;
        let mut minus = 0;
        for n in (4..=200u32).step_by(2) {
            for i in 1..=n {
                for j in (1..=n).filter(|&j| j != i) {
                    match epsilon(n, i, j) {
                        1 => plus += 1,
                        -1 => minus += 1,
                        _ => {}
                    }
                }
            }
        }
        assert!(plus > 0 && minus > 0);
    }

    #[test]
    fn quotient_proper_all_n() {
        for n in 3..=200 {
            assert!(quotient_coloring_is_proper(n).unwrap(), "n = {n}");
        }
        // and on the materialized graph
        for n in 3..=40 {
            let q = build_quotient(n).unwrap();
            let c = q.coloring();
            assert!(q.edges().all(|(a, b)| c[a] != c[b]));
        }
    }

    #[test]
    fn uncorrected_f_is_not_proper_for_even_n() {
        for n in (4..=20u32).step_by(2) {
            let clash = (1..=n).any(|j| (j + 1..=n).any(|i| f_raw(n, i, j) == f_raw(n, j, i)));
            assert!(clash, "n = {n}");
        }
    }

    #[test]
    fn lifted_coloring_classes() {
        for n in 3..=8usize {
            let view = PancakeView::full(n).unwrap();
            let r = verify_proper(&view, &lift(n).unwrap()).unwrap();
            assert!(r.proper, "n = {n}");
            assert_eq!(r.class_sizes.len(), n - 1);
            let size = n as u64 * factorial(n - 2);
            assert!(
                r.class_sizes.iter().all(|&s| s == size),
                "n={n} {:?}",
                r.class_sizes
            );
        }
    }

    #[test]
    fn lift_on_p3_is_the_bipartition() {
        let c = lift(3).unwrap();
        for p in crate::perm::Permutation::all(3) {
            let want = if p.parity().is_even() { 1 } else { 2 };
            // same partition as parity, up to naming
            assert_eq!(
                c.color(&p) == 1,
                want == c.color(&crate::perm::Permutation::identity(3))
            );
        }
    }

    #[test]
    fn lifted_coloring_not_perfect_for_four_and_six() {
        for n in [4, 6] {
            let r = verify_perfect(&PancakeView::full(n).unwrap(), &lift(n).unwrap()).unwrap();
            assert_eq!(r.perfect, Some(false));
        }
    }

    fn equal_up_to_renaming(a: &[u32], b: &[u32]) -> bool {
        let mut fwd = HashMap::new();
        let mut back = HashMap::new();
        a.iter()
            .zip(b)
            .all(|(x, y)| *fwd.entry(*x).or_insert(*y) == *y && *back.entry(*y).or_insert(*x) == *x)
    }

    #[test]
    fn hamiltonian_order_is_a_cycle() {
        for n in 3..=12 {
            let q = build_quotient(n).unwrap();
            let order = hamiltonian_order(n);
            assert_eq!(order.len(), q.vertices().len());
            assert_eq!(order[0], QuotientVertex { i: 1, j: n });
            for t in 0..order.len() {
                let (a, b) = (order[t], order[(t + 1) % order.len()]);
                assert!(brute_adjacent(a, b), "{a} {b}");
            }
        }
    }

    #[test]
    fn greedy_along_cycle_matches_closed_form() {
        for n in [4, 6] {
            let q = build_quotient(n).unwrap();
            let greedy = greedy_coloring(&q, &hamiltonian_order(n));
            assert!(equal_up_to_renaming(&greedy, &q.coloring()), "n = {n}");
        }
    }

    #[test]
    fn dimacs_of_q4() {
        let mut buf = Vec::new();
        build_quotient(4).unwrap().write_dimacs(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("p edge 12 18\n"));
        assert_eq!(text.lines().count(), 19);
    }
}
