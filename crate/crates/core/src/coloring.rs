//! Vertex colorings of pancake graphs and the proper / equitable / perfect
//! verifiers.

use std::fmt;
use std::io::{BufRead, Write};
use std::sync::Arc;

use serde::Serialize;

use crate::error::{PancakeError, Result};
use crate::graph::PancakeView;
use crate::perm::{factorial, Permutation, ENUMERATION_LIMIT};

/// At most this many violating edges are kept as witnesses.
pub const WITNESS_CAP: usize = 10;

type ColorFn = dyn Fn(&Permutation) -> u32 + Send + Sync;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ColoringKind {
    Functional,
    Tabular,
}

#[derive(Clone)]
enum Rule {
    Functional(Arc<ColorFn>),
    Tabular(Arc<Vec<u8>>),
}

/// A total map from the vertices of `P_n` to colors `1..=k`.
#[derive(Clone)]
pub struct Coloring {
    n: usize,
    k: u32,
    name: String,
    rule: Rule,
}

impl fmt::Debug for Coloring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Coloring")
            .field("n", &self.n)
            .field("k", &self.k)
            .field("name", &self.name)
            .field("kind", &self.kind())
            .finish()
    }
}

impl Coloring {
    /// Wraps a closed-form rule. The rule must return colors in `1..=k`.
    pub fn functional<F>(n: usize, k: u32, name: impl Into<String>, rule: F) -> Self
    where
        F: Fn(&Permutation) -> u32 + Send + Sync + 'static,
    {
        Coloring {
            n,
            k,
            name: name.into(),
            rule: Rule::Functional(Arc::new(rule)),
        }
    }

    /// A table indexed by lexicographic rank.
    pub fn tabular(n: usize, k: u32, name: impl Into<String>, table: Vec<u8>) -> Result<Self> {
        if n == 0 || n > ENUMERATION_LIMIT {
            return Err(PancakeError::Capacity {
                n,
                limit: ENUMERATION_LIMIT,
                context: "tabular coloring",
            });
        }
        if k == 0 || k > u8::MAX as u32 {
            return Err(PancakeError::Range {
                what: "color count",
                value: k as u64,
                min: 1,
                max: u8::MAX as u64,
            });
        }
        if table.len() as u64 != factorial(n) {
            return Err(PancakeError::Configuration(format!(
                "table has {} entries, expected {}",
                table.len(),
                factorial(n)
            )));
        }
        if let Some((r, &c)) = table
            .iter()
            .enumerate()
            .find(|(_, &c)| c == 0 || c as u32 > k)
        {
            return Err(PancakeError::Configuration(format!(
                "rank {r} has color {c} outside 1..={k}"
            )));
        }
        Ok(Coloring {
            n,
            k,
            name: name.into(),
            rule: Rule::Tabular(Arc::new(table)),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> ColoringKind {
        match self.rule {
            Rule::Functional(_) => ColoringKind::Functional,
            Rule::Tabular(_) => ColoringKind::Tabular,
        }
    }

    #[inline]
    pub fn color(&self, pi: &Permutation) -> u32 {
        match &self.rule {
            Rule::Functional(f) => f(pi),
            Rule::Tabular(t) => t[pi.lex_rank().index()] as u32,
        }
    }

    /// The table entries, when tabular.
    pub fn table(&self) -> Option<&[u8]> {
        match &self.rule {
            Rule::Tabular(t) => Some(t),
            Rule::Functional(_) => None,
        }
    }

    /// Evaluates the rule on every vertex and stores the result by rank.
    pub fn to_tabular(&self) -> Result<Coloring> {
        if let Rule::Tabular(_) = self.rule {
            return Ok(self.clone());
        }
        if self.n > ENUMERATION_LIMIT {
            return Err(PancakeError::Capacity {
                n: self.n,
                limit: ENUMERATION_LIMIT,
                context: "tabulation",
            });
        }
        let table = Permutation::all(self.n)
            .map(|p| u8::try_from(self.color(&p)).unwrap_or(0))
            .collect();
        Coloring::tabular(self.n, self.k, self.name.clone(), table)
    }

    /// Writes the coloring file: a `pancake-coloring n=<n> k=<k>` header and one
    /// `<rank> <color>` line per vertex in rank order.
    pub fn write_to<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "pancake-coloring n={} k={}", self.n, self.k)?;
        for (r, p) in Permutation::all(self.n).enumerate() {
            writeln!(out, "{} {}", r, self.color(&p))?;
        }
        Ok(())
    }

    /// Reads a coloring file; ranks must run `0..n!` in order.
    pub fn read_from<R: BufRead>(input: R, name: impl Into<String>) -> Result<Coloring> {
        let mut lines = input.lines();
        let parse_err = |m: String| PancakeError::Parse(m);
        let header = lines
            .next()
            .ok_or_else(|| parse_err("empty coloring file".into()))?
            .map_err(|e| parse_err(e.to_string()))?;
        let (n, k) = parse_header(&header)?;
        if n == 0 || n > ENUMERATION_LIMIT {
            return Err(PancakeError::Capacity {
                n,
                limit: ENUMERATION_LIMIT,
                context: "coloring file",
            });
        }
        let total = factorial(n);
        let mut table = Vec::with_capacity(total as usize);
        for line in lines {
            let line = line.map_err(|e| parse_err(e.to_string()))?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let (Some(r), Some(c), None) = (it.next(), it.next(), it.next()) else {
                return Err(parse_err(format!("malformed line {line:?}")));
            };
            let r: u64 = r
                .parse()
                .map_err(|_| parse_err(format!("bad rank in {line:?}")))?;
            let c: u32 = c
                .parse()
                .map_err(|_| parse_err(format!("bad color in {line:?}")))?;
            if r != table.len() as u64 {
                return Err(parse_err(format!(
                    "expected rank {}, found {r}",
                    table.len()
                )));
            }
            if c == 0 || c > k {
                return Err(parse_err(format!("color {c} outside 1..={k} at rank {r}")));
            }
            table.push(c as u8);
        }
        if table.len() as u64 != total {
            return Err(parse_err(format!(
                "file has {} ranks, expected {total}",
                table.len()
            )));
        }
        Coloring::tabular(n, k, name, table)
    }
}

fn parse_header(line: &str) -> Result<(usize, u32)> {
    let bad = || PancakeError::Parse(format!("bad coloring header {line:?}"));
    let mut it = line.split_whitespace();
    if it.next() != Some("pancake-coloring") {
        return Err(bad());
    }
    let n = it
        .next()
        .and_then(|t| t.strip_prefix("n="))
        .and_then(|t| t.parse().ok())
        .ok_or_else(bad)?;
    let k = it
        .next()
        .and_then(|t| t.strip_prefix("k="))
        .and_then(|t| t.parse().ok())
        .ok_or_else(bad)?;
    if it.next().is_some() {
        return Err(bad());
    }
    Ok((n, k))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EdgeWitness {
    pub u: Permutation,
    pub v: Permutation,
    pub generator: usize,
    pub color: u32,
}

/// Two vertices of one color whose neighbor-color multisets differ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PerfectWitness {
    pub color: u32,
    pub a: Permutation,
    pub b: Permutation,
    /// `a_profile[c-1]` = number of neighbors of `a` with color `c`.
    pub a_profile: Vec<u32>,
    pub b_profile: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub n: usize,
    pub k: u32,
    pub vertices: u64,
    pub edges_checked: u64,
    pub proper: bool,
    pub violations: u64,
    pub witnesses: Vec<EdgeWitness>,
    pub class_sizes: Vec<u64>,
    pub equitable: bool,
    /// All classes exactly the same size.
    pub strongly_equitable: bool,
    /// Only filled by [`verify_perfect`].
    pub perfect: Option<bool>,
    pub perfect_witness: Option<PerfectWitness>,
}

struct Partial {
    vertices: u64,
    edges: u64,
    violations: u64,
    witnesses: Vec<EdgeWitness>,
    classes: Vec<u64>,
    out_of_range: u64,
    /// Per color: first vertex seen and its neighbor-color profile.
    reference: Vec<Option<(Permutation, Vec<u32>)>>,
    perfect_witness: Option<PerfectWitness>,
}

impl Partial {
    fn new(k: u32) -> Self {
        Partial {
            vertices: 0,
            edges: 0,
            violations: 0,
            witnesses: Vec::new(),
            classes: vec![0; k as usize],
            out_of_range: 0,
            reference: Vec::new(),
            perfect_witness: None,
        }
    }

    fn merge(mut self, other: Partial) -> Partial {
        self.vertices += other.vertices;
        self.edges += other.edges;
        self.violations += other.violations;
        self.out_of_range += other.out_of_range;
        let room = WITNESS_CAP - self.witnesses.len();
        self.witnesses
            .extend(other.witnesses.into_iter().take(room));
        for (a, b) in self.classes.iter_mut().zip(other.classes) {
            *a += b;
        }
        if self.reference.is_empty() {
            self.reference = other.reference;
        } else {
            for (c, (mine, theirs)) in self.reference.iter_mut().zip(other.reference).enumerate() {
                match (mine.as_ref(), theirs) {
                    (None, t) => *mine = t,
                    (Some((a, pa)), Some((b, pb))) => {
                        if self.perfect_witness.is_none() && *pa != pb {
                            self.perfect_witness = Some(PerfectWitness {
                                color: c as u32 + 1,
                                a: *a,
                                b,
                                a_profile: pa.clone(),
                                b_profile: pb,
                            });
                        }
                    }
                    (Some(_), None) => {}
                }
            }
        }
        if self.perfect_witness.is_none() {
            self.perfect_witness = other.perfect_witness;
        }
        self
    }
}

fn check_compatible(view: &PancakeView, coloring: &Coloring) -> Result<()> {
    if view.n() != coloring.n() {
        return Err(PancakeError::Configuration(format!(
            "coloring is for n = {}, view has n = {}",
            coloring.n(),
            view.n()
        )));
    }
    Ok(())
}

fn scan(view: &PancakeView, coloring: &Coloring, profiles: bool) -> Result<VerifyReport> {
    check_compatible(view, coloring)?;
    let k = coloring.k();
    let partial = view.fold_vertices(
        || {
            let mut p = Partial::new(k);
            if profiles {
                p.reference = vec![None; k as usize];
            }
            p
        },
        |acc, u| {
            acc.vertices += 1;
            let cu = coloring.color(u);
            let in_range = (1..=k).contains(&cu);
            if in_range {
                acc.classes[cu as usize - 1] += 1;
            } else {
                acc.out_of_range += 1;
            }
            let mut profile = if profiles {
                vec![0u32; k as usize]
            } else {
                Vec::new()
            };
            view.for_each_neighbor(u, |v, generator| {
                let forward = *u < v;
                if !forward && !profiles {
                    return;
                }
                let cv = coloring.color(&v);
                if profiles && (1..=k).contains(&cv) {
                    profile[cv as usize - 1] += 1;
                }
                if forward {
                    acc.edges += 1;
                    if cu == cv {
                        acc.violations += 1;
                        if acc.witnesses.len() < WITNESS_CAP {
                            acc.witnesses.push(EdgeWitness {
                                u: *u,
                                v,
                                generator,
                                color: cu,
                            });
                        }
                    }
                }
            });
            if profiles && in_range {
                let slot = &mut acc.reference[cu as usize - 1];
                match slot {
                    None => *slot = Some((*u, profile)),
                    Some((a, pa)) => {
                        if acc.perfect_witness.is_none() && *pa != profile {
                            acc.perfect_witness = Some(PerfectWitness {
                                color: cu,
                                a: *a,
                                b: *u,
                                a_profile: pa.clone(),
                                b_profile: profile,
                            });
                        }
                    }
                }
            }
        },
        Partial::merge,
    )?;
    if partial.out_of_range > 0 {
        return Err(PancakeError::Configuration(format!(
            "{} vertices received colors outside 1..={k}",
            partial.out_of_range
        )));
    }
    let used: Vec<u64> = partial.classes.clone();
    let max = used.iter().copied().max().unwrap_or(0);
    let min = used.iter().copied().min().unwrap_or(0);
    Ok(VerifyReport {
        n: view.n(),
        k,
        vertices: partial.vertices,
        edges_checked: partial.edges,
        proper: partial.violations == 0,
        violations: partial.violations,
        witnesses: partial.witnesses,
        class_sizes: used,
        equitable: max - min <= 1,
        strongly_equitable: max == min,
        perfect: profiles.then_some(partial.perfect_witness.is_none()),
        perfect_witness: partial.perfect_witness,
    })
}

/// Checks that no edge of `view` is monochromatic. Class sizes and the
/// equitability flags are filled as well.
pub fn verify_proper(view: &PancakeView, coloring: &Coloring) -> Result<VerifyReport> {
    scan(view, coloring, false)
}

/// Same scan as [`verify_proper`]; `equitable` is `max - min <= 1` over the
/// `k` class sizes.
pub fn verify_equitable(view: &PancakeView, coloring: &Coloring) -> Result<VerifyReport> {
    scan(view, coloring, false)
}

/// Additionally checks that the multiset of neighbor colors depends only on
/// a vertex's own color.
pub fn verify_perfect(view: &PancakeView, coloring: &Coloring) -> Result<VerifyReport> {
    scan(view, coloring, true)
}

/// Color `π_1`: the partition into the efficient dominating sets `D_i`.
pub fn first_element_coloring(n: usize) -> Coloring {
    Coloring::functional(n, n as u32, "first-element", |p| p.first() as u32)
}

/// Color by permutation parity (1 = even, 2 = odd). Proper exactly when every
/// prefix reversal of `P_n` is odd, i.e. `n <= 3`.
pub fn parity_coloring(n: usize) -> Coloring {
    Coloring::functional(n, 2, "parity", |p| if p.parity().is_even() { 1 } else { 2 })
}

pub fn constant_coloring(n: usize) -> Coloring {
    Coloring::functional(n, 1, "constant", |_| 1)
}
