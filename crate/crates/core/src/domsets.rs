//! Efficient dominating sets of `P_n`: the sets `D_i` (first entry `i`) and
//! their pieces `D_i^j` (first entry `i`, last entry `j`), which are the
//! efficient dominating sets of the copies `P_{n-1}(j)`.

use serde::Serialize;

use crate::error::{PancakeError, Result};
use crate::graph::PancakeView;
use crate::perm::{factorial, Permutation, Rank};

/// Domination scans keep a rank-indexed bitset, so they are capped lower
/// than plain enumeration.
pub const DOMINATION_LIMIT: usize = 10;

const WITNESS_CAP: usize = 10;

/// Names `D_i` (no `j`) or `D_i^j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DomSetId {
    pub i: u8,
    pub j: Option<u8>,
}

impl DomSetId {
    pub fn first(i: u8) -> Self {
        DomSetId { i, j: None }
    }

    pub fn first_last(i: u8, j: u8) -> Self {
        DomSetId { i, j: Some(j) }
    }

    fn validate(&self, n: usize) -> Result<()> {
        let in_range = |v: u8, what| {
            if v == 0 || v as usize > n {
                Err(PancakeError::Range {
                    what,
                    value: v as u64,
                    min: 1,
                    max: n as u64,
                })
            } else {
                Ok(())
            }
        };
        in_range(self.i, "first element")?;
        if let Some(j) = self.j {
            in_range(j, "last element")?;
            if j == self.i {
                return Err(PancakeError::IdentityConflict(j));
            }
        }
        Ok(())
    }
}

/// Members of `D_i` or `D_i^j`, sorted by rank.
pub fn dom_set(n: usize, id: DomSetId) -> Result<Vec<Permutation>> {
    if n < 3 {
        return Err(PancakeError::Range {
            what: "n",
            value: n as u64,
            min: 3,
            max: crate::perm::ENUMERATION_LIMIT as u64,
        });
    }
    id.validate(n)?;
    let view = PancakeView::restricted(n, &[id.i])?;
    let mut out = Vec::new();
    view.for_each_vertex(|p| {
        if id.j.is_none_or(|j| p.last() == j) {
            out.push(*p);
        }
    })?;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DominationWitness {
    pub vertex: Permutation,
    pub in_set: bool,
    /// Number of neighbors of `vertex` inside the set.
    pub set_neighbors: u32,
}

/// Certificate for [`is_efficient_dominating`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DominationCertificate {
    pub independent: bool,
    pub unique_domination: bool,
    pub witnesses: Vec<DominationWitness>,
}

impl DominationCertificate {
    pub fn efficient(&self) -> bool {
        self.independent && self.unique_domination
    }
}

struct Bitset(Vec<u64>);

impl Bitset {
    fn new(len: u64) -> Self {
        Bitset(vec![0; len.div_ceil(64) as usize])
    }
    fn insert(&mut self, r: Rank) {
        self.0[r.index() / 64] |= 1 << (r.index() % 64);
    }
    fn contains(&self, r: Rank) -> bool {
        self.0[r.index() / 64] & (1 << (r.index() % 64)) != 0
    }
}

/// Checks that `set` is independent in `view` and that every other vertex
/// of the view has exactly one neighbor in it. Witnesses are the first
/// offending vertices in rank order.
pub fn is_efficient_dominating(
    view: &PancakeView,
    set: &[Permutation],
) -> Result<DominationCertificate> {
    if view.n() > DOMINATION_LIMIT {
        return Err(PancakeError::Capacity {
            n: view.n(),
            limit: DOMINATION_LIMIT,
            context: "domination check",
        });
    }
    let mut members = Bitset::new(factorial(view.n()));
    for p in set {
        if !view.contains(p) {
            return Err(PancakeError::Membership(p.to_string()));
        }
        members.insert(p.lex_rank());
    }
    struct Acc {
        independent: bool,
        unique: bool,
        witnesses: Vec<DominationWitness>,
    }
    let acc = view.fold_vertices(
        || Acc {
            independent: true,
            unique: true,
            witnesses: Vec::new(),
        },
        |acc, u| {
            let mut count = 0u32;
            view.for_each_neighbor(u, |v, _| {
                if members.contains(v.lex_rank()) {
                    count += 1;
                }
            });
            let in_set = members.contains(u.lex_rank());
            let bad = if in_set {
                acc.independent &= count == 0;
                count != 0
            } else {
                acc.unique &= count == 1;
                count != 1
            };
            if bad && acc.witnesses.len() < WITNESS_CAP {
                acc.witnesses.push(DominationWitness {
                    vertex: *u,
                    in_set,
                    set_neighbors: count,
                });
            }
        },
        |mut a, b| {
            a.independent &= b.independent;
            a.unique &= b.unique;
            let room = WITNESS_CAP - a.witnesses.len();
            a.witnesses.extend(b.witnesses.into_iter().take(room));
            a
        },
    )?;
    Ok(DominationCertificate {
        independent: acc.independent,
        unique_domination: acc.unique,
        witnesses: acc.witnesses,
    })
}

/// Outcome of [`partition_check`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionReport {
    pub n: usize,
    pub parts: usize,
    pub part_size: u64,
    /// Every vertex of `P_n` lies in exactly one `D_i^j`.
    pub covers_exactly_once: bool,
    /// All parts have `(n-2)!` members.
    pub uniform_sizes: bool,
    /// `D_i` is the union of the `D_i^j` over `j != i`, for every `i`.
    pub unions_match: bool,
}

impl PartitionReport {
    pub fn ok(&self) -> bool {
        self.covers_exactly_once && self.uniform_sizes && self.unions_match
    }
}

/// Checks that `{D_i^j : i != j}` partitions `Sym_n` into `n(n-1)` parts
/// and that each `D_i` is the union of its row.
pub fn partition_check(n: usize) -> Result<PartitionReport> {
    if !(3..=DOMINATION_LIMIT).contains(&n) {
        return Err(PancakeError::Range {
            what: "n",
            value: n as u64,
            min: 3,
            max: DOMINATION_LIMIT as u64,
        });
    }
    let total = factorial(n) as usize;
    let mut cover = vec![0u8; total];
    let mut parts = 0;
    let mut uniform = true;
    let mut unions_match = true;
    for i in 1..=n as u8 {
        let mut row = Vec::new();
        for j in (1..=n as u8).filter(|&j| j != i) {
            let part = dom_set(n, DomSetId::first_last(i, j))?;
            parts += 1;
            uniform &= part.len() as u64 == factorial(n - 2);
            for p in &part {
                let c = &mut cover[p.lex_rank().index()];
                *c = c.saturating_add(1);
            }
            row.extend(part);
        }
        row.sort();
        unions_match &= row == dom_set(n, DomSetId::first(i))?;
    }
    Ok(PartitionReport {
        n,
        parts,
        part_size: factorial(n - 2),
        covers_exactly_once: cover.iter().all(|&c| c == 1),
        uniform_sizes: uniform,
        unions_match,
    })
}
