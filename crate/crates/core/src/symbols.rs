//! Symbol spaces and the bit/integer conversions between them.
//!
//! A symbol is addressed either by its *index* (the unsigned integer read off
//! its k-bit pattern, which also fixes the row order of codebooks) or by its
//! integer *value*. For unsigned spaces the two coincide; for two's-complement
//! spaces index `2^(k-1)` holds value `-2^(k-1)`.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Longest bit string a [`Word`] can hold.
pub const MAX_WORD_BITS: usize = 64;

/// A fixed-length bit string, most-significant (leftmost) bit first.
///
/// Bit `0` is the leftmost character of the printed form and lives in the
/// highest used position of `value`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Word {
    value: u64,
    len: u8,
}

impl Word {
    pub fn new(value: u64, len: usize) -> Result<Self> {
        if len == 0 || len > MAX_WORD_BITS {
            return Err(Error::Shape {
                expected: MAX_WORD_BITS,
                found: len,
            });
        }
        if len < 64 && value >> len != 0 {
            return Err(Error::Range {
                value: value as i64,
                min: 0,
                max: ((1u64 << len) - 1) as i64,
            });
        }
        Ok(Word {
            value,
            len: len as u8,
        })
    }

    pub fn zeros(len: usize) -> Result<Self> {
        Word::new(0, len)
    }

    pub fn from_bools(bits: &[bool]) -> Result<Self> {
        let value = bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64);
        Word::new(value, bits.len())
    }

    /// Packed value; the leftmost bit is the most significant.
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Bit at position `i`, counted from the left.
    pub fn bit(&self, i: usize) -> bool {
        assert!(i < self.len(), "bit index {i} out of range");
        (self.value >> (self.len() - 1 - i)) & 1 == 1
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len()).map(move |i| self.bit(i))
    }

    pub fn count_ones(&self) -> u32 {
        self.value.count_ones()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl std::str::FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse {
                    line: 0,
                    msg: format!("unexpected character {other:?} in bit string"),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        Word::from_bools(&bits)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Signedness {
    Unsigned,
    TwosComplement,
}

/// The set of source symbols together with their integer values.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolSpace {
    k: usize,
    signedness: Signedness,
    values: Vec<i64>,
    // Only populated for custom spaces; the standard ones invert arithmetically.
    lookup: Option<HashMap<i64, usize>>,
}

impl SymbolSpace {
    /// All `2^k` values `0..2^k`.
    pub fn unsigned(k: usize) -> Result<Self> {
        check_width(k)?;
        let m = 1i64 << k;
        Ok(SymbolSpace {
            k,
            signedness: Signedness::Unsigned,
            values: (0..m).collect(),
            lookup: None,
        })
    }

    /// All `2^k` values of k-bit two's complement, in bit-pattern order.
    pub fn twos_complement(k: usize) -> Result<Self> {
        check_width(k)?;
        let m = 1i64 << k;
        let half = m >> 1;
        Ok(SymbolSpace {
            k,
            signedness: Signedness::TwosComplement,
            values: (0..m).map(|i| if i >= half { i - m } else { i }).collect(),
            lookup: None,
        })
    }

    pub fn new(k: usize, signedness: Signedness) -> Result<Self> {
        match signedness {
            Signedness::Unsigned => SymbolSpace::unsigned(k),
            Signedness::TwosComplement => SymbolSpace::twos_complement(k),
        }
    }

    /// A space with an explicit value list, index `i` holding `values[i]`.
    /// `values.len()` may be any count in `2..=2^k`.
    pub fn custom(k: usize, signedness: Signedness, values: Vec<i64>) -> Result<Self> {
        check_width(k)?;
        if values.len() < 2 || values.len() > 1usize << k {
            return Err(Error::InvalidSpace(format!(
                "{} values do not fit a {k}-bit index",
                values.len()
            )));
        }
        let mut lookup = HashMap::with_capacity(values.len());
        for (i, &v) in values.iter().enumerate() {
            if lookup.insert(v, i).is_some() {
                return Err(Error::InvalidSpace(format!("value {v} listed twice")));
            }
        }
        Ok(SymbolSpace {
            k,
            signedness,
            values,
            lookup: Some(lookup),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of symbols.
    pub fn m(&self) -> usize {
        self.values.len()
    }

    pub fn signedness(&self) -> Signedness {
        self.signedness
    }

    pub fn is_signed(&self) -> bool {
        self.signedness == Signedness::TwosComplement
    }

    pub fn value(&self, index: usize) -> i64 {
        self.values[index]
    }

    /// All values in index order.
    pub fn symbol_values(&self) -> &[i64] {
        &self.values
    }

    pub fn min_value(&self) -> i64 {
        *self
            .values
            .iter()
            .min()
            .expect("space has at least two symbols")
    }

    pub fn max_value(&self) -> i64 {
        *self
            .values
            .iter()
            .max()
            .expect("space has at least two symbols")
    }

    pub fn index_of(&self, value: i64) -> Result<usize> {
        let found = match &self.lookup {
            Some(map) => map.get(&value).copied(),
            None => {
                let m = self.m() as i64;
                let idx = match self.signedness {
                    Signedness::Unsigned => value,
                    Signedness::TwosComplement if value < 0 => {
                        if value >= -m / 2 {
                            value + m
                        } else {
                            -1
                        }
                    }
                    Signedness::TwosComplement => {
                        if value >= m / 2 {
                            -1
                        } else {
                            value
                        }
                    }
                };
                (0..m).contains(&idx).then_some(idx as usize)
            }
        };
        found.ok_or_else(|| Error::Range {
            value,
            min: self.min_value(),
            max: self.max_value(),
        })
    }

    /// k-bit representation of `value`, most-significant bit first.
    pub fn to_bits(&self, value: i64) -> Result<Word> {
        let idx = self.index_of(value)?;
        Word::new(idx as u64, self.k)
    }

    /// Inverse of [`SymbolSpace::to_bits`].
    pub fn from_bits(&self, bits: &Word) -> Result<i64> {
        if bits.len() != self.k {
            return Err(Error::Shape {
                expected: self.k,
                found: bits.len(),
            });
        }
        let idx = bits.value() as usize;
        self.values.get(idx).copied().ok_or(Error::Range {
            value: idx as i64,
            min: 0,
            max: self.m() as i64 - 1,
        })
    }
}

fn check_width(k: usize) -> Result<()> {
    if k == 0 || k > 24 {
        return Err(Error::InvalidSpace(format!(
            "bit width {k} outside supported range 1..=24"
        )));
    }
    Ok(())
}
