//! Permutations of `[n]` in one-line notation, prefix reversals, parity and
//! the lexicographic rank bijection `Sym_n <-> [0, n!)`.
//!
//! Positions and values are 1-based, ranks are 0-based.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{PancakeError, Result};

/// Largest `n` supported by permutation arithmetic (`20!` still fits in a `u64`).
pub const MAX_N: usize = 20;

/// Largest `n` for which whole-graph enumeration is allowed.
pub const ENUMERATION_LIMIT: usize = 12;

/// `FACTORIALS[m] = m!` for `0 <= m <= 20`.
pub const FACTORIALS: [u64; MAX_N + 1] = {
    let mut f = [1u64; MAX_N + 1];
    let mut i = 1;
    while i <= MAX_N {
        f[i] = f[i - 1] * i as u64;
        i += 1;
    }
    f
};

pub fn factorial(m: usize) -> u64 {
    FACTORIALS[m]
}

/// Parity of a permutation (or of a prefix reversal viewed as one).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    pub fn is_even(self) -> bool {
        self == Parity::Even
    }
}

/// Lexicographic index of a permutation among all of `Sym_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Rank(pub u64);

impl Rank {
    pub fn value(self) -> u64 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A permutation `[π_1 π_2 … π_n]` of `[n]`, stored inline so it is `Copy`.
///
/// Entries past `n` are kept at zero, which makes the derived equality and
/// hashing agree with the logical value.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Permutation {
    len: u8,
    entries: [u8; MAX_N],
}

impl Permutation {
    /// Builds a permutation from one-line notation, checking that `entries`
    /// is a bijection on `[n]`.
    pub fn new(entries: &[u8]) -> Result<Self> {
        let n = entries.len();
        if n == 0 || n > MAX_N {
            return Err(PancakeError::Range {
                what: "permutation length",
                value: n as u64,
                min: 1,
                max: MAX_N as u64,
            });
        }
        let mut seen = 0u32;
        for &v in entries {
            if v == 0 || v as usize > n || seen & (1 << v) != 0 {
                return Err(PancakeError::Parse(format!(
                    "{entries:?} is not a permutation of [1, {n}]"
                )));
            }
            seen |= 1 << v;
        }
        let mut buf = [0u8; MAX_N];
        buf[..n].copy_from_slice(entries);
        Ok(Permutation {
            len: n as u8,
            entries: buf,
        })
    }

    pub fn identity(n: usize) -> Self {
        assert!((1..=MAX_N).contains(&n), "identity of size {n}");
        let mut entries = [0u8; MAX_N];
        for (p, e) in entries.iter_mut().take(n).enumerate() {
            *e = p as u8 + 1;
        }
        Permutation {
            len: n as u8,
            entries,
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.len as usize
    }

    #[inline]
    pub fn as_slice(&self) -> &[u8] {
        &self.entries[..self.len as usize]
    }

    #[inline]
    pub fn first(&self) -> u8 {
        self.entries[0]
    }

    #[inline]
    pub fn last(&self) -> u8 {
        self.entries[self.len as usize - 1]
    }

    /// Entry at 1-based position `pos`.
    #[inline]
    pub fn at(&self, pos: usize) -> u8 {
        self.as_slice()[pos - 1]
    }

    /// `π · r_i`: the permutation with its first `i` entries reversed.
    pub fn apply_reversal(&self, i: usize) -> Result<Self> {
        if i < 2 || i > self.n() {
            return Err(PancakeError::Range {
                what: "prefix reversal length",
                value: i as u64,
                min: 2,
                max: self.n() as u64,
            });
        }
        Ok(self.reversed(i))
    }

    /// Unchecked variant of [`apply_reversal`](Self::apply_reversal) for hot loops.
    #[inline]
    pub fn reversed(&self, i: usize) -> Self {
        let mut out = *self;
        out.entries[..i].reverse();
        out
    }

    #[inline]
    pub fn reverse_prefix_in_place(&mut self, i: usize) {
        self.entries[..i].reverse();
    }

    /// Parity via cycle decomposition: a permutation with `c` cycles on `n`
    /// points is even iff `n - c` is even.
    pub fn parity(&self) -> Parity {
        let n = self.n();
        let mut visited = 0u32;
        let mut cycles = 0;
        for start in 0..n {
            if visited & (1 << start) != 0 {
                continue;
            }
            cycles += 1;
            let mut p = start;
            while visited & (1 << p) == 0 {
                visited |= 1 << p;
                p = self.entries[p] as usize - 1;
            }
        }
        if (n - cycles) % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// 0-based position of this permutation in lexicographic order.
    pub fn lex_rank(&self) -> Rank {
        let n = self.n();
        let mut unused: u32 = ((1u32 << n) - 1) << 1;
        let mut rank = 0u64;
        for (p, &v) in self.as_slice().iter().enumerate() {
            let smaller = (unused & ((1u32 << v) - 1)).count_ones() as u64;
            rank += smaller * FACTORIALS[n - 1 - p];
            unused &= !(1u32 << v);
        }
        Rank(rank)
    }

    /// Inverse of [`lex_rank`](Self::lex_rank).
    pub fn lex_unrank(rank: Rank, n: usize) -> Result<Self> {
        if n == 0 || n > MAX_N {
            return Err(PancakeError::Range {
                what: "n",
                value: n as u64,
                min: 1,
                max: MAX_N as u64,
            });
        }
        if rank.0 >= FACTORIALS[n] {
            return Err(PancakeError::Range {
                what: "rank",
                value: rank.0,
                min: 0,
                max: FACTORIALS[n] - 1,
            });
        }
        let mut unused: u32 = ((1u32 << n) - 1) << 1;
        let mut rest = rank.0;
        let mut entries = [0u8; MAX_N];
        for (p, e) in entries.iter_mut().take(n).enumerate() {
            let f = FACTORIALS[n - 1 - p];
            let mut skip = rest / f;
            rest %= f;
            let mut bits = unused;
            loop {
                let v = bits.trailing_zeros();
                if skip == 0 {
                    *e = v as u8;
                    unused &= !(1 << v);
                    break;
                }
                skip -= 1;
                bits &= bits - 1;
            }
        }
        Ok(Permutation {
            len: n as u8,
            entries,
        })
    }

    /// Advances to the lexicographic successor; returns `false` (leaving the
    /// value unchanged) on the last permutation.
    pub fn next_lex(&mut self) -> bool {
        let s = &mut self.entries[..self.len as usize];
        let n = s.len();
        if n < 2 {
            return false;
        }
        let mut i = n - 1;
        while i > 0 && s[i - 1] > s[i] {
            i -= 1;
        }
        if i == 0 {
            return false;
        }
        let mut j = n - 1;
        while s[j] < s[i - 1] {
            j -= 1;
        }
        s.swap(i - 1, j);
        s[i..].reverse();
        true
    }

    /// Iterates over all of `Sym_n` in lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = Permutation> {
        let mut next = Some(Permutation::identity(n));
        std::iter::from_fn(move || {
            let cur = next?;
            let mut succ = cur;
            next = if succ.next_lex() { Some(succ) } else { None };
            Some(cur)
        })
    }
}

/// Parity of `r_i` regarded as a permutation of `[i]`: even iff `i ≡ 0, 1 (mod 4)`.
pub fn reversal_parity(i: usize) -> Result<Parity> {
    if i < 2 {
        return Err(PancakeError::Range {
            what: "prefix reversal length",
            value: i as u64,
            min: 2,
            max: u64::MAX,
        });
    }
    Ok(match i % 4 {
        0 | 1 => Parity::Even,
        _ => Parity::Odd,
    })
}

impl PartialOrd for Permutation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic on entries, matching rank order for equal `n`.
impl Ord for Permutation {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len
            .cmp(&other.len)
            .then_with(|| self.as_slice().cmp(other.as_slice()))
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        // Single-digit values are written packed, larger n needs separators.
        let spaced = self.n() > 9;
        for (p, v) in self.as_slice().iter().enumerate() {
            if spaced && p > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Permutation {
    type Err = PancakeError;

    /// Accepts `[14352]`, `[1 4 3 5 2]`, `1 4 3 5 2` and comma separated forms.
    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim();
        let bracketed = trimmed.starts_with('[') && trimmed.ends_with(']');
        let body = if bracketed {
            &trimmed[1..trimmed.len() - 1]
        } else {
            trimmed
        };
        let tokens: Vec<&str> = body
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .collect();
        let bad = || PancakeError::Parse(format!("cannot read permutation from {s:?}"));
        let entries: Vec<u8> = if tokens.len() == 1 && tokens[0].len() > 1 {
            tokens[0]
                .chars()
                .map(|c| c.to_digit(10).map(|d| d as u8).ok_or_else(bad))
                .collect::<Result<_>>()?
        } else {
            tokens
                .iter()
                .map(|t| t.parse::<u8>().map_err(|_| bad()))
                .collect::<Result<_>>()?
        };
        Permutation::new(&entries)
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
