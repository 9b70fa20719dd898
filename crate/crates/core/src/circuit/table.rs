use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use super::{Circuit, Gate};
use crate::error::{Error, Result};

/// A point `A ∈ 2ⁿ`. Its table index is `Σ bits[i]·2^i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Assignment {
    bits: Vec<bool>,
}

impl Assignment {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        Assignment { bits }
    }

    pub fn from_index(index: usize, n: u32) -> Self {
        Assignment {
            bits: (0..n).map(|i| (index >> i) & 1 == 1).collect(),
        }
    }

    pub fn index(&self) -> usize {
        self.bits
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | ((b as usize) << i))
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Every assignment over `n` variables, in table order.
    pub fn all(n: u32) -> impl Iterator<Item = Assignment> {
        (0..1usize << n).map(move |i| Assignment::from_index(i, n))
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, b) in self.bits.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", *b as u8)?;
        }
        write!(f, ")")
    }
}

/// The canonical form of a `=_A` class: one bit per assignment.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TruthTable {
    n: u32,
    words: Vec<u64>,
}

fn word_count(n: u32) -> usize {
    if n <= 6 {
        1
    } else {
        1 << (n - 6)
    }
}

fn tail_mask(n: u32) -> u64 {
    if n >= 6 {
        !0
    } else {
        (1u64 << (1u32 << n)) - 1
    }
}

impl TruthTable {
    pub fn zero(n: u32) -> Self {
        TruthTable {
            n,
            words: vec![0; word_count(n)],
        }
    }

    pub fn one(n: u32) -> Self {
        let mut t = TruthTable {
            n,
            words: vec![!0; word_count(n)],
        };
        t.mask();
        t
    }

    pub fn from_fn(n: u32, f: impl Fn(usize) -> bool) -> Self {
        let mut t = TruthTable::zero(n);
        for i in 0..t.len() {
            if f(i) {
                t.set(i, true);
            }
        }
        t
    }

    pub(crate) fn from_words(n: u32, words: Vec<u64>) -> Self {
        let mut t = TruthTable { n, words };
        t.mask();
        t
    }

    /// Parses the bit string produced by `Display` (index 0 first).
    pub fn from_bit_str(s: &str) -> Result<Self> {
        let len = s.len();
        if !len.is_power_of_two() {
            return Err(Error::Invalid(format!(
                "truth table length {len} is not a power of two"
            )));
        }
        let n = len.trailing_zeros();
        let mut t = TruthTable::zero(n);
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => t.set(i, true),
                _ => return Err(Error::Invalid(format!("bad truth-table digit {ch:?}"))),
            }
        }
        Ok(t)
    }

    fn mask(&mut self) {
        let m = tail_mask(self.n);
        if let Some(w) = self.words.last_mut() {
            *w &= m;
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        1 << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, i: usize) -> bool {
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    pub fn at(&self, a: &Assignment) -> bool {
        self.get(a.index())
    }

    pub fn set(&mut self, i: usize, v: bool) {
        if v {
            self.words[i >> 6] |= 1 << (i & 63);
        } else {
            self.words[i >> 6] &= !(1 << (i & 63));
        }
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_one(&self) -> bool {
        *self == TruthTable::one(self.n)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| self.get(i))
    }

    fn zip(&self, other: &TruthTable, f: impl Fn(u64, u64) -> u64) -> Result<TruthTable> {
        if self.n != other.n {
            return Err(Error::Arity {
                expected: self.n as usize,
                got: other.n as usize,
            });
        }
        Ok(TruthTable::from_words(
            self.n,
            self.words.iter().zip(&other.words).map(|(&a, &b)| f(a, b)).collect(),
        ))
    }

    pub fn and(&self, other: &TruthTable) -> Result<TruthTable> {
        self.zip(other, |a, b| a & b)
    }

    pub fn or(&self, other: &TruthTable) -> Result<TruthTable> {
        self.zip(other, |a, b| a | b)
    }

    pub fn not(&self) -> TruthTable {
        TruthTable::from_words(self.n, self.words.iter().map(|w| !w).collect())
    }

    /// Bitwise `self ≤ other`.
    pub fn leq(&self, other: &TruthTable) -> Result<bool> {
        Ok(self.zip(other, |a, b| a & !b)?.is_zero())
    }
}

impl fmt::Display for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            write!(f, "{}", self.get(i) as u8)?;
        }
        Ok(())
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruthTable({self})")
    }
}

impl Serialize for TruthTable {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// How a leaf gate is read during tabulation.
pub(crate) enum Leaf<'a> {
    Fixed(bool),
    /// Table variable `j` of the output table.
    Var(u32),
    /// An already tabulated function with the output's variable count.
    Table(&'a TruthTable),
}

const PATTERNS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

const CHUNK: usize = 16;

/// Bit-parallel evaluation of `c` into a table over `n` table variables.
/// `leaf` is consulted once per distinct leaf gate.
pub(crate) fn tabulate<'a>(c: &Circuit, n: u32, mut leaf: impl FnMut(Gate) -> Result<Leaf<'a>>) -> Result<TruthTable> {
    let reach = c.reachable();
    let gates = &c.gates()[..reach.len()];
    let mut leaves: Vec<Option<Leaf<'a>>> = Vec::with_capacity(gates.len());
    for (i, g) in gates.iter().enumerate() {
        let l = match g {
            Gate::Var(_) | Gate::RVar(_) if reach[i] => {
                let l = leaf(*g)?;
                match &l {
                    Leaf::Var(j) if *j >= n => {
                        return Err(Error::Arity {
                            expected: n as usize,
                            got: *j as usize + 1,
                        })
                    }
                    Leaf::Table(t) if t.num_vars() != n => {
                        return Err(Error::Arity {
                            expected: n as usize,
                            got: t.num_vars() as usize,
                        })
                    }
                    _ => {}
                }
                Some(l)
            }
            _ => None,
        };
        leaves.push(l);
    }
    let total = word_count(n);
    let mut out = Vec::with_capacity(total);
    let mut vals = vec![0u64; gates.len() * CHUNK];
    let mut start = 0;
    while start < total {
        let width = CHUNK.min(total - start);
        for (i, g) in gates.iter().enumerate() {
            if !reach[i] {
                continue;
            }
            for k in 0..width {
                let w = start + k;
                let v = match *g {
                    Gate::Const(b) => {
                        if b {
                            !0
                        } else {
                            0
                        }
                    }
                    Gate::Var(_) | Gate::RVar(_) => match leaves[i].as_ref().unwrap() {
                        Leaf::Fixed(b) => {
                            if *b {
                                !0
                            } else {
                                0
                            }
                        }
                        Leaf::Var(j) => {
                            let j = *j as usize;
                            if j < 6 {
                                PATTERNS[j]
                            } else if (w >> (j - 6)) & 1 == 1 {
                                !0
                            } else {
                                0
                            }
                        }
                        Leaf::Table(t) => t.words[w],
                    },
                    Gate::Not(x) => !vals[x.index() * CHUNK + k],
                    Gate::And(x, y) => vals[x.index() * CHUNK + k] & vals[y.index() * CHUNK + k],
                    Gate::Or(x, y) => vals[x.index() * CHUNK + k] | vals[y.index() * CHUNK + k],
                };
                vals[i * CHUNK + k] = v;
            }
        }
        let o = c.output().index();
        out.extend_from_slice(&vals[o * CHUNK..o * CHUNK + width]);
        start += width;
    }
    Ok(TruthTable::from_words(n, out))
}
