//! Codebooks, generator matrices and the baseline codes used for comparison.
//!
//! Codewords are stored packed in `u64`, leftmost bit most significant, which
//! keeps Hamming distances down to a single `popcount`.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::symbols::{Signedness, SymbolSpace, Word, MAX_WORD_BITS};

/// Hamming distance between two equal-length bit strings.
pub fn hamming_distance(a: &Word, b: &Word) -> Result<u32> {
    if a.len() != b.len() {
        return Err(Error::Shape {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok((a.value() ^ b.value()).count_ones())
}

#[inline]
pub(crate) fn packed_distance(a: u64, b: u64) -> u32 {
    (a ^ b).count_ones()
}

/// An injective map from the symbols of a [`SymbolSpace`] to n-bit codewords.
#[derive(Clone, Debug)]
pub struct Codebook {
    space: SymbolSpace,
    n: usize,
    rows: Vec<u64>,
    index: HashMap<u64, usize>,
}

impl PartialEq for Codebook {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space && self.n == other.n && self.rows == other.rows
    }
}

impl Codebook {
    pub fn new(space: SymbolSpace, words: &[Word]) -> Result<Self> {
        let n = words.first().map(Word::len).unwrap_or(0);
        for w in words {
            if w.len() != n {
                return Err(Error::Shape {
                    expected: n,
                    found: w.len(),
                });
            }
        }
        Codebook::from_packed(space, n, words.iter().map(Word::value).collect())
    }

    /// Builds a codebook from packed rows, row `i` encoding symbol index `i`.
    pub fn from_packed(space: SymbolSpace, n: usize, rows: Vec<u64>) -> Result<Self> {
        if rows.len() != space.m() {
            return Err(Error::Shape {
                expected: space.m(),
                found: rows.len(),
            });
        }
        if n == 0 || n > MAX_WORD_BITS {
            return Err(Error::Shape {
                expected: MAX_WORD_BITS,
                found: n,
            });
        }
        if n < 64 {
            if let Some(&bad) = rows.iter().find(|&&r| r >> n != 0) {
                return Err(Error::Range {
                    value: bad as i64,
                    min: 0,
                    max: ((1u64 << n) - 1) as i64,
                });
            }
        }
        let mut index = HashMap::with_capacity(rows.len());
        for (i, &r) in rows.iter().enumerate() {
            if let Some(first) = index.insert(r, i) {
                return Err(Error::DuplicateCodeword { first, second: i });
            }
        }
        if n < space.k() {
            log::warn!(
                "codebook length n={n} is shorter than the symbol width k={}",
                space.k()
            );
        }
        Ok(Codebook {
            space,
            n,
            rows,
            index,
        })
    }

    pub fn space(&self) -> &SymbolSpace {
        &self.space
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn packed_rows(&self) -> &[u64] {
        &self.rows
    }

    /// Codeword for a symbol index.
    pub fn encode(&self, symbol_index: usize) -> Result<Word> {
        let row = self.rows.get(symbol_index).ok_or(Error::Range {
            value: symbol_index as i64,
            min: 0,
            max: self.m() as i64 - 1,
        })?;
        Word::new(*row, self.n)
    }

    /// Symbol index for a codeword of this codebook.
    pub fn inverse_lookup(&self, codeword: &Word) -> Result<usize> {
        if codeword.len() != self.n {
            return Err(Error::Shape {
                expected: self.n,
                found: codeword.len(),
            });
        }
        self.index
            .get(&codeword.value())
            .copied()
            .ok_or_else(|| Error::NotFound(codeword.to_string()))
    }

    pub fn words(&self) -> Vec<Word> {
        self.rows
            .iter()
            .map(|&r| Word::new(r, self.n).expect("rows validated at construction"))
            .collect()
    }

    pub fn min_distance(&self) -> u32 {
        let mut best = u32::MAX;
        for i in 0..self.m() {
            for j in i + 1..self.m() {
                best = best.min(packed_distance(self.rows[i], self.rows[j]));
            }
        }
        best
    }

    /// Reorders the columns; `perm[c]` is the source column of output column `c`.
    pub fn permute_columns(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.n)?;
        let n = self.n;
        let rows = self
            .rows
            .iter()
            .map(|&r| {
                perm.iter().enumerate().fold(0u64, |acc, (c, &src)| {
                    let bit = (r >> (n - 1 - src)) & 1;
                    acc | bit << (n - 1 - c)
                })
            })
            .collect();
        Codebook::from_packed(self.space.clone(), n, rows)
    }

    /// Reassigns codewords to symbols; symbol `i` gets the old codeword of `perm[i]`.
    pub fn permute_rows(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.m())?;
        let rows = perm.iter().map(|&src| self.rows[src]).collect();
        Codebook::from_packed(self.space.clone(), self.n, rows)
    }

    /// Renders the codebook in its text format.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "# k={} n={} signed={}\n",
            self.space.k(),
            self.n,
            self.space.is_signed() as u8
        );
        for w in self.words() {
            let _ = writeln!(out, "{w}");
        }
        out
    }

    /// Parses the text format. Whitespace inside a row is ignored.
    pub fn parse_text(text: &str) -> Result<Self> {
        let (header, rows) = parse_bit_rows(text)?;
        let Header::Codebook { k, n, signed } = header else {
            return Err(Error::Parse {
                line: 1,
                msg: "expected a codebook header, found a generator header".into(),
            });
        };
        check_row_widths(&rows, n)?;
        let signedness = if signed {
            Signedness::TwosComplement
        } else {
            Signedness::Unsigned
        };
        let full = SymbolSpace::new(k, signedness).map_err(|e| Error::Parse {
            line: 1,
            msg: e.to_string(),
        })?;
        let space = if rows.len() == full.m() {
            full
        } else if rows.len() >= 2 && rows.len() < full.m() {
            SymbolSpace::custom(k, signedness, full.symbol_values()[..rows.len()].to_vec())?
        } else {
            return Err(Error::Parse {
                line: rows.last().map(|r| r.0).unwrap_or(1),
                msg: format!("expected {} codewords, found {}", full.m(), rows.len()),
            });
        };
        let words: Vec<Word> = rows.into_iter().map(|(_, w)| w).collect();
        Codebook::new(space, &words)
    }
}

fn check_permutation(perm: &[usize], len: usize) -> Result<()> {
    let mut seen = vec![false; len];
    if perm.len() != len {
        return Err(Error::Shape {
            expected: len,
            found: perm.len(),
        });
    }
    for &p in perm {
        if p >= len || std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidConfig(format!(
                "{perm:?} is not a permutation"
            )));
        }
    }
    Ok(())
}

/// A k×n generator matrix over GF(2); symbol `x` maps to the row vector `xG`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorMatrix {
    n: usize,
    rows: Vec<u64>,
}

impl GeneratorMatrix {
    pub fn new(rows: &[Word]) -> Result<Self> {
        let n = rows.first().map(Word::len).ok_or(Error::Shape {
            expected: 1,
            found: 0,
        })?;
        if let Some(bad) = rows.iter().find(|w| w.len() != n) {
            return Err(Error::Shape {
                expected: n,
                found: bad.len(),
            });
        }
        Ok(GeneratorMatrix {
            n,
            rows: rows.iter().map(Word::value).collect(),
        })
    }

    pub fn from_packed(n: usize, rows: Vec<u64>) -> Result<Self> {
        let words = rows
            .iter()
            .map(|&r| Word::new(r, n))
            .collect::<Result<Vec<_>>>()?;
        GeneratorMatrix::new(&words)
    }

    pub fn k(&self) -> usize {
        self.rows.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn packed_rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn rank(&self) -> usize {
        gf2_rank(&self.rows)
    }

    /// Encodes a k-bit message row vector.
    pub fn encode(&self, message: u64) -> u64 {
        span_word(&self.rows, message)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("# generator k={} n={}\n", self.k(), self.n);
        for &r in &self.rows {
            let w = Word::new(r, self.n).expect("rows validated at construction");
            let _ = writeln!(out, "{w}");
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let (header, rows) = parse_bit_rows(text)?;
        let Header::Generator { k, n } = header else {
            return Err(Error::Parse {
                line: 1,
                msg: "expected a generator header, found a codebook header".into(),
            });
        };
        check_row_widths(&rows, n)?;
        if rows.len() != k {
            return Err(Error::Parse {
                line: rows.last().map(|r| r.0).unwrap_or(1),
                msg: format!("expected {k} generator rows, found {}", rows.len()),
            });
        }
        let words: Vec<Word> = rows.into_iter().map(|(_, w)| w).collect();
        GeneratorMatrix::new(&words)
    }
}

/// `message · rows` over GF(2); the leftmost message bit selects `rows[0]`.
pub(crate) fn span_word(rows: &[u64], message: u64) -> u64 {
    let k = rows.len();
    rows.iter()
        .enumerate()
        .filter(|(j, _)| (message >> (k - 1 - j)) & 1 == 1)
        .fold(0, |acc, (_, &r)| acc ^ r)
}

/// All `2^k` codewords spanned by `rows`, in message order.
pub(crate) fn span_all(rows: &[u64], out: &mut Vec<u64>) {
    let k = rows.len();
    out.clear();
    out.resize(1usize << k, 0);
    for x in 1usize..1 << k {
        let low = x.trailing_zeros() as usize;
        out[x] = out[x & (x - 1)] ^ rows[k - 1 - low];
    }
}

pub(crate) fn gf2_rank(rows: &[u64]) -> usize {
    let mut basis: Vec<u64> = Vec::with_capacity(rows.len());
    for &r in rows {
        let reduced = basis.iter().fold(r, |acc, &b| acc.min(acc ^ b));
        if reduced != 0 {
            basis.push(reduced);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

/// Builds the codebook of a linear code; row `i` is `bits(i) · G`.
pub fn from_generator(g: &GeneratorMatrix, space: &SymbolSpace) -> Result<Codebook> {
    if space.k() != g.k() {
        return Err(Error::Shape {
            expected: g.k(),
            found: space.k(),
        });
    }
    let mut rows = Vec::new();
    span_all(&g.rows, &mut rows);
    rows.truncate(space.m());
    Codebook::from_packed(space.clone(), g.n, rows)
}

/// One unordered symbol pair of a distance profile.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProfilePoint {
    pub i: usize,
    pub j: usize,
    pub value_diff: u64,
    pub distance: u32,
}

/// Hamming distance against numeric difference for every unordered symbol pair.
pub fn distance_profile(cb: &Codebook) -> Vec<ProfilePoint> {
    let m = cb.m();
    let values = cb.space().symbol_values();
    let mut out = Vec::with_capacity(m * (m - 1) / 2);
    for i in 0..m {
        for j in i + 1..m {
            out.push(ProfilePoint {
                i,
                j,
                value_diff: values[i].abs_diff(values[j]),
                distance: packed_distance(cb.rows[i], cb.rows[j]),
            });
        }
    }
    out
}

fn systematic(parity: &[u64], parity_bits: usize) -> GeneratorMatrix {
    let k = parity.len();
    let n = k + parity_bits;
    let rows = parity
        .iter()
        .enumerate()
        .map(|(j, &p)| (1u64 << (n - 1 - j)) | p)
        .collect();
    GeneratorMatrix::from_packed(n, rows).expect("baseline generator is well formed")
}

/// Systematic Hamming (7,4) generator `[I4 | P]`.
pub fn hamming_7_4() -> GeneratorMatrix {
    systematic(&[0b110, 0b101, 0b011, 0b111], 3)
}

/// Hamming (15,11) shortened to a systematic (12,8) single-error-correcting
/// code: eight distinct parity columns of weight at least two.
pub fn hamming_12_8() -> GeneratorMatrix {
    systematic(
        &[
            0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100, 0b0111, 0b1011,
        ],
        4,
    )
}

/// The (8,3) Hadamard code: rows of the Sylvester 8×8 Hadamard matrix with
/// +1 mapped to 0 and -1 to 1.
pub fn hadamard_8_3() -> Codebook {
    let rows = (0u64..8)
        .map(|i| {
            (0u64..8).fold(0u64, |acc, j| {
                (acc << 1) | ((i & j).count_ones() as u64 & 1)
            })
        })
        .collect();
    Codebook::from_packed(SymbolSpace::unsigned(3).expect("valid width"), 8, rows)
        .expect("Hadamard rows are distinct")
}

/// Codebook of a baseline by name: `hamming74`, `hamming128` or `hadamard83`.
pub fn baseline(name: &str) -> Result<Codebook> {
    match name {
        "hamming74" => from_generator(&hamming_7_4(), &SymbolSpace::unsigned(4)?),
        "hamming128" => from_generator(&hamming_12_8(), &SymbolSpace::unsigned(8)?),
        "hadamard83" => Ok(hadamard_8_3()),
        other => Err(Error::InvalidConfig(format!(
            "unknown baseline {other:?} (expected hamming74, hamming128 or hadamard83)"
        ))),
    }
}

pub const BASELINE_NAMES: [&str; 3] = ["hamming74", "hamming128", "hadamard83"];

#[derive(Debug, PartialEq)]
enum Header {
    Codebook { k: usize, n: usize, signed: bool },
    Generator { k: usize, n: usize },
}

fn parse_header(line: &str) -> Result<Header> {
    let err = |msg: String| Error::Parse { line: 1, msg };
    let body = line
        .strip_prefix('#')
        .ok_or_else(|| err("missing '#' header line".into()))?;
    let mut generator = false;
    let mut fields: HashMap<&str, &str> = HashMap::new();
    for tok in body.split_whitespace() {
        if tok == "generator" {
            generator = true;
            continue;
        }
        let (key, val) = tok
            .split_once('=')
            .ok_or_else(|| err(format!("malformed header field {tok:?}")))?;
        fields.insert(key, val);
    }
    let num = |key: &str| -> Result<usize> {
        fields
            .get(key)
            .ok_or_else(|| err(format!("header is missing {key}=")))?
            .parse()
            .map_err(|_| err(format!("header field {key} is not a number")))
    };
    let (k, n) = (num("k")?, num("n")?);
    if generator {
        return Ok(Header::Generator { k, n });
    }
    let signed = match fields.get("signed").copied() {
        None | Some("0") => false,
        Some("1") => true,
        Some(other) => return Err(err(format!("signed must be 0 or 1, got {other:?}"))),
    };
    Ok(Header::Codebook { k, n, signed })
}

fn parse_bit_rows(text: &str) -> Result<(Header, Vec<(usize, Word)>)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (_, first) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty file".into(),
    })?;
    let header = parse_header(first)?;
    let rows = lines
        .filter(|(_, l)| !l.starts_with('#'))
        .map(|(no, l)| {
            l.parse::<Word>()
                .map(|w| (no, w))
                .map_err(|e| Error::Parse {
                    line: no,
                    msg: match e {
                        Error::Parse { msg, .. } => msg,
                        other => other.to_string(),
                    },
                })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((header, rows))
}

fn check_row_widths(rows: &[(usize, Word)], n: usize) -> Result<()> {
    match rows.iter().find(|(_, w)| w.len() != n) {
        Some((line, w)) => Err(Error::Parse {
            line: *line,
            msg: format!("expected {n} bits, found {}", w.len()),
        }),
        None => Ok(()),
    }
}
