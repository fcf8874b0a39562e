//! Explicit colorings: the parity 4-coloring of `P_5`, `P_6`, `P_7`, block
//! composition along the first element (subadditivity), and the table of
//! upper bounds on `χ(P_n)`.

use serde::Serialize;

use crate::coloring::Coloring;
use crate::error::{PancakeError, Result};
use crate::graph::{project_mask, subset_mask};
use crate::perm::{Permutation, ENUMERATION_LIMIT};

/// Position of a vertex on its cycle in the spanning subgraph generated by
/// `r_4` and `r_5`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CyclePosition {
    /// Lexicographically smallest vertex of the cycle.
    pub representative: Permutation,
    /// Steps from the representative, walking `r_5, r_4, r_5, …`.
    pub distance: u8,
}

/// The 10 vertices `π, π·r_5, π·r_5·r_4, …`.
pub fn alternating_cycle(pi: &Permutation) -> Result<[Permutation; 10]> {
    if pi.n() < 5 {
        return Err(PancakeError::Range {
            what: "n",
            value: pi.n() as u64,
            min: 5,
            max: crate::perm::MAX_N as u64,
        });
    }
    let mut walk = [*pi; 10];
    for t in 1..10 {
        walk[t] = walk[t - 1].reversed(if t % 2 == 1 { 5 } else { 4 });
    }
    Ok(walk)
}

pub fn cycle_position(pi: &Permutation) -> Result<CyclePosition> {
    let walk = alternating_cycle(pi)?;
    let (t, rep) = walk
        .iter()
        .enumerate()
        .min_by_key(|(_, p)| **p)
        .map(|(t, p)| (t, *p))
        .unwrap();
    // From the representative, the r_5 edge leads forward along `walk` when
    // t is even and backward when t is odd.
    let distance = if t % 2 == 0 { (10 - t) % 10 } else { t };
    Ok(CyclePosition {
        representative: rep,
        distance: distance as u8,
    })
}

fn check_parity4_n(n: usize) -> Result<()> {
    if !(5..=7).contains(&n) {
        return Err(PancakeError::Range {
            what: "n",
            value: n as u64,
            min: 5,
            max: 7,
        });
    }
    Ok(())
}

/// Colors 1/2 alternate along cycles of even permutations, 3/4 along cycles
/// of odd ones.
pub fn parity4_color(pi: &Permutation) -> Result<u32> {
    check_parity4_n(pi.n())?;
    Ok(parity4_raw(pi))
}

#[inline]
fn parity4_raw(pi: &Permutation) -> u32 {
    let d = cycle_position(pi).expect("n >= 5").distance as u32 % 2;
    if pi.parity().is_even() {
        1 + d
    } else {
        3 + d
    }
}

pub fn parity4_coloring(n: usize) -> Result<Coloring> {
    check_parity4_n(n)?;
    Ok(Coloring::functional(n, 4, "parity4", parity4_raw))
}

/// Summary of the `r_4`/`r_5` cycle decomposition of `P_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CyclePartition {
    pub n: usize,
    pub cycles: u64,
    pub all_length_ten: bool,
    pub parity_constant: bool,
}

/// Walks every cycle once (from its representative) and checks that the
/// cycles are disjoint 10-cycles with constant permutation parity.
pub fn cycle_partition(n: usize) -> Result<CyclePartition> {
    if !(5..=ENUMERATION_LIMIT).contains(&n) {
        return Err(PancakeError::Range {
            what: "n",
            value: n as u64,
            min: 5,
            max: ENUMERATION_LIMIT as u64,
        });
    }
    let view = crate::graph::PancakeView::full(n)?;
    let mut covered = vec![false; crate::perm::factorial(n) as usize];
    let mut cycles = 0;
    let mut ten = true;
    let mut parity = true;
    view.for_each_vertex(|p| {
        let pos = cycle_position(p).unwrap();
        if pos.representative != *p {
            return;
        }
        cycles += 1;
        let walk = alternating_cycle(p).unwrap();
        ten &= walk[9].reversed(4) == *p;
        let mut distinct = walk.to_vec();
        distinct.sort();
        distinct.dedup();
        ten &= distinct.len() == 10;
        parity &= walk.iter().all(|q| q.parity() == p.parity());
        for q in walk {
            let c = &mut covered[q.lex_rank().index()];
            ten &= !*c;
            *c = true;
        }
    })?;
    Ok(CyclePartition {
        n,
        cycles,
        all_length_ten: ten && covered.iter().all(|&c| c),
        parity_constant: parity,
    })
}

/// Optimal 3-coloring of `P_4` by rank, found once by the exact solver.
pub const P4_THREE_COLORING: [u8; 24] = [
    1, 1, 2, 2, 2, 1, 2, 2, 1, 2, 1, 1, 1, 3, 2, 1, 3, 2, 1, 2, 2, 3, 1, 3,
];

/// Coloring used on one block of a [`BlockScheme`].
#[derive(Debug, Clone)]
pub enum BaseColoring {
    /// `P_1`: one color.
    Single,
    /// Permutation parity; proper on `P_2` and `P_3`.
    Parity,
    /// The frozen `P_4` table.
    FrozenP4,
    /// The parity 4-coloring of `P_5`, `P_6`, `P_7`.
    Parity4,
    /// Any caller-supplied coloring of `P_m`.
    Supplied(Coloring),
}

impl BaseColoring {
    /// Registered base for a block of `size` elements, if any.
    pub fn for_size(size: usize) -> Option<Self> {
        match size {
            1 => Some(BaseColoring::Single),
            2 | 3 => Some(BaseColoring::Parity),
            4 => Some(BaseColoring::FrozenP4),
            5..=7 => Some(BaseColoring::Parity4),
            _ => None,
        }
    }

    pub fn colors(&self) -> u32 {
        match self {
            BaseColoring::Single => 1,
            BaseColoring::Parity => 2,
            BaseColoring::FrozenP4 => 3,
            BaseColoring::Parity4 => 4,
            BaseColoring::Supplied(c) => c.k(),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            BaseColoring::Single => "single",
            BaseColoring::Parity => "parity",
            BaseColoring::FrozenP4 => "frozen-p4",
            BaseColoring::Parity4 => "parity4",
            BaseColoring::Supplied(c) => c.name(),
        }
    }

    #[inline]
    fn color(&self, pi: &Permutation) -> u32 {
        match self {
            BaseColoring::Single => 1,
            BaseColoring::Parity => {
                if pi.parity().is_even() {
                    1
                } else {
                    2
                }
            }
            BaseColoring::FrozenP4 => P4_THREE_COLORING[pi.lex_rank().index()] as u32,
            BaseColoring::Parity4 => parity4_raw(pi),
            BaseColoring::Supplied(c) => c.color(pi),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Block {
    /// First and last element of the interval, inclusive.
    pub lo: u8,
    pub hi: u8,
    pub base: BaseColoring,
}

impl Block {
    pub fn size(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }
}

/// Partition of `[n]` into consecutive intervals, each with a base coloring.
#[derive(Debug, Clone)]
pub struct BlockScheme {
    n: usize,
    blocks: Vec<Block>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockSummary {
    pub lo: u8,
    pub hi: u8,
    pub base: String,
    pub colors: u32,
    pub offset: u32,
}

impl BlockScheme {
    /// Blocks `{1..s_1}, {s_1+1..s_1+s_2}, …` with registered bases.
    pub fn from_sizes(sizes: &[usize]) -> Result<Self> {
        Self::with_supplied(sizes, &[])
    }

    /// Like [`from_sizes`](Self::from_sizes), but `supplied` colorings take
    /// precedence for blocks whose size matches their `n`.
    pub fn with_supplied(sizes: &[usize], supplied: &[Coloring]) -> Result<Self> {
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(PancakeError::Configuration(
                "block sizes must be positive".into(),
            ));
        }
        let n: usize = sizes.iter().sum();
        if n > ENUMERATION_LIMIT {
            return Err(PancakeError::Capacity {
                n,
                limit: ENUMERATION_LIMIT,
                context: "block composition",
            });
        }
        let mut blocks = Vec::with_capacity(sizes.len());
        let mut lo = 1u8;
        for &size in sizes {
            let base = supplied
                .iter()
                .find(|c| c.n() == size)
                .map(|c| BaseColoring::Supplied(c.clone()))
                .or_else(|| BaseColoring::for_size(size))
                .ok_or_else(|| {
                    PancakeError::Configuration(format!(
                        "no base coloring registered for block size {size}"
                    ))
                })?;
            blocks.push(Block {
                lo,
                hi: lo + size as u8 - 1,
                base,
            });
            lo += size as u8;
        }
        Ok(BlockScheme { n, blocks })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn colors(&self) -> u32 {
        self.blocks.iter().map(|b| b.base.colors()).sum()
    }

    pub fn summary(&self) -> Vec<BlockSummary> {
        let mut offset = 0;
        self.blocks
            .iter()
            .map(|b| {
                let s = BlockSummary {
                    lo: b.lo,
                    hi: b.hi,
                    base: b.base.name().to_string(),
                    colors: b.base.colors(),
                    offset,
                };
                offset += b.base.colors();
                s
            })
            .collect()
    }
}

/// Colors `π` by the block `B ∋ π_1`: `offset(B) + base_B(project(π, B))`.
pub fn compose(scheme: &BlockScheme) -> Result<Coloring> {
    struct Resolved {
        mask: u32,
        offset: u32,
        base: BaseColoring,
    }
    let mut resolved = Vec::new();
    let mut owner = [usize::MAX; 32];
    let mut offset = 0;
    for (idx, b) in scheme.blocks.iter().enumerate() {
        let members: Vec<u8> = (b.lo..=b.hi).collect();
        for &v in &members {
            owner[v as usize] = idx;
        }
        resolved.push(Resolved {
            mask: subset_mask(scheme.n, &members)?,
            offset,
            base: b.base.clone(),
        });
        offset += b.base.colors();
    }
    let name = format!(
        "compose[{}]",
        scheme
            .blocks
            .iter()
            .map(|b| b.size().to_string())
            .collect::<Vec<_>>()
            .join(",")
    );
    Ok(Coloring::functional(scheme.n, offset, name, move |p| {
        let r = &resolved[owner[p.first() as usize]];
        r.offset + r.base.color(&project_mask(p, r.mask))
    }))
}

// ---------------------------------------------------------------------------
// Bounds

/// Known `χ(P_m)` for `0 <= m <= 9`; `P_0` is empty and `P_1` a single vertex.
pub const KNOWN_CHI: [u64; 10] = [0, 1, 2, 2, 3, 3, 4, 4, 4, 4];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundRow {
    /// Equation number (`"1"` … `"7"`) or `"table1"` for the known values.
    pub equation: String,
    pub name: String,
    pub value: Option<i64>,
    pub applicable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub n: u64,
    pub rows: Vec<BoundRow>,
    /// Minimum applicable upper bound.
    pub best: i64,
    pub best_equation: String,
    pub lower: i64,
    pub lower_reason: String,
}

impl BoundReport {
    pub fn row(&self, equation: &str) -> Option<&BoundRow> {
        self.rows.iter().find(|r| r.equation == equation)
    }

    pub fn value(&self, equation: &str) -> Option<i64> {
        self.row(equation).and_then(|r| r.value)
    }
}

fn piecewise_small(n: i64) -> i64 {
    match n % 4 {
        1 => n - 1,
        3 => n - 3,
        _ => n - 2,
    }
}

fn piecewise_mid(n: i64) -> i64 {
    match n % 4 {
        1 => n - 3,
        3 => n - 5,
        _ => n - 4,
    }
}

fn piecewise_large(n: i64) -> i64 {
    match n % 4 {
        0 => n - 8,
        k => n - (k + 4),
    }
}

/// `4·⌊n/9⌋ + χ(P_{n mod 9})`.
pub fn subadditive_bound(n: u64) -> u64 {
    4 * (n / 9) + KNOWN_CHI[(n % 9) as usize]
}

/// `⌊(2/3)(n + 2)⌋`, Catlin's bound with `Δ = n - 1`.
pub fn catlin_bound(n: u64) -> u64 {
    2 * (n + 2) / 3
}

pub fn upper_bound_table(n: u64) -> Result<BoundReport> {
    if n < 2 {
        return Err(PancakeError::Range {
            what: "n",
            value: n,
            min: 2,
            max: u64::MAX,
        });
    }
    let m = n as i64;
    let row = |eq: &str, name: &str, value: Option<i64>, applicable: bool| BoundRow {
        equation: eq.to_string(),
        name: name.to_string(),
        value,
        applicable,
    };
    let rows = vec![
        row("1", "Brooks (n-1)", Some(m - 1), n >= 4),
        row(
            "2",
            "Brooks improved for triangle-free (n-2)",
            Some(m - 2),
            n >= 5,
        ),
        row(
            "3",
            "Catlin (2/3)(n+2)",
            Some(catlin_bound(n) as i64),
            n >= 8,
        ),
        row(
            "4",
            "piecewise, 5 <= n <= 8",
            Some(piecewise_small(m)),
            (5..=8).contains(&n),
        ),
        row(
            "5",
            "piecewise, 9 <= n <= 16",
            Some(piecewise_mid(m)),
            (9..=16).contains(&n),
        ),
        row("6", "piecewise, n >= 17", Some(piecewise_large(m)), n >= 17),
        row(
            "7",
            "subadditive 4*floor(n/9) + chi(P_{n mod 9})",
            Some(subadditive_bound(n) as i64),
            n >= 9,
        ),
        row(
            "table1",
            "known chromatic number",
            KNOWN_CHI
                .get(n as usize)
                .map(|&c| c as i64)
                .filter(|_| n >= 2),
            n <= 9,
        ),
    ];
    let (best, best_equation) = rows
        .iter()
        .filter(|r| r.applicable)
        .filter_map(|r| r.value.map(|v| (v, r.equation.clone())))
        .min_by_key(|(v, _)| *v)
        .expect("an upper bound applies for every n >= 2");
    let (lower, lower_reason) = match n {
        2 | 3 => (2, "P_n has edges"),
        4 | 5 => (3, "7-cycles for n >= 4"),
        _ => (4, "chi(P_6) = 4 and P_{n-1} is an induced subgraph of P_n"),
    };
    Ok(BoundReport {
        n,
        rows,
        best,
        best_equation,
        lower,
        lower_reason: lower_reason.to_string(),
    })
}
