//! Loss functions on the symbol space.
//!
//! The same table serves as the metric `δ(s, s*)` of a simulation and as the
//! decoder loss `L(s*, s)`. Tables may be asymmetric, so callers must keep the
//! argument order straight: [`LossTable::get`] takes the decoded symbol first.

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbols::SymbolSpace;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LossSpec {
    /// `|s* - s|` on integer values.
    AbsDiff,
    /// `(s* - s)^2` on integer values.
    SquaredDiff,
    /// `Σ α_i |a_i(s*) - a_i(s)|`, where `weights[i]` scales bit `i`
    /// counted from the least-significant end.
    WeightedBits { weights: Vec<f64> },
    /// Explicit m×m table indexed `[decoded][sent]` by symbol index.
    Table { table: Vec<Vec<f64>> },
    /// 0 on the diagonal, 1 elsewhere.
    ZeroOne,
}

impl LossSpec {
    /// Short label used in file names and CSV output.
    pub fn label(&self) -> &'static str {
        match self {
            LossSpec::AbsDiff => "abs",
            LossSpec::SquaredDiff => "squared",
            LossSpec::WeightedBits { .. } => "weighted_bits",
            LossSpec::Table { .. } => "table",
            LossSpec::ZeroOne => "zero_one",
        }
    }

    /// Bitwise weights `α_i = 2^i`, whose loss equals the value of `s* XOR s`.
    pub fn xor_weights(k: usize) -> Self {
        LossSpec::WeightedBits {
            weights: (0..k).map(|i| (1u64 << i) as f64).collect(),
        }
    }

    /// Reads an m×m table from headerless CSV.
    pub fn table_from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut table = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record?;
            let row = record
                .iter()
                .map(|cell| {
                    cell.parse::<f64>().map_err(|_| Error::Parse {
                        line: line + 1,
                        msg: format!("not a number: {cell:?}"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            table.push(row);
        }
        Ok(LossSpec::Table { table })
    }

    /// Checks the loss against a symbol space.
    pub fn validate(&self, space: &SymbolSpace) -> Result<()> {
        match self {
            LossSpec::WeightedBits { weights } => {
                if weights.len() != space.k() {
                    return Err(Error::InvalidLoss(format!(
                        "{} bit weights for a {}-bit space",
                        weights.len(),
                        space.k()
                    )));
                }
                if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
                    return Err(Error::InvalidLoss(
                        "bit weights must be finite and nonnegative".into(),
                    ));
                }
            }
            LossSpec::Table { table } => {
                let m = space.m();
                if table.len() != m || table.iter().any(|r| r.len() != m) {
                    return Err(Error::InvalidLoss(format!("table must be {m}x{m}")));
                }
                for (i, row) in table.iter().enumerate() {
                    if row.iter().any(|x| !x.is_finite() || *x < 0.0) {
                        return Err(Error::InvalidLoss(format!(
                            "row {i} has a negative or non-finite entry"
                        )));
                    }
                    if row[i] != 0.0 {
                        return Err(Error::InvalidLoss(format!("diagonal entry {i} is nonzero")));
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// Loss between two symbol values, `s_star` being the decoded one.
pub fn loss(spec: &LossSpec, space: &SymbolSpace, s_star: i64, s: i64) -> Result<f64> {
    spec.validate(space)?;
    let (a, b) = (space.index_of(s_star)?, space.index_of(s)?);
    Ok(pair_loss(spec, space, a, b))
}

fn pair_loss(spec: &LossSpec, space: &SymbolSpace, a: usize, b: usize) -> f64 {
    let (va, vb) = (space.value(a), space.value(b));
    match spec {
        LossSpec::AbsDiff => va.abs_diff(vb) as f64,
        LossSpec::SquaredDiff => {
            let d = va.abs_diff(vb) as f64;
            d * d
        }
        LossSpec::WeightedBits { weights } => {
            let diff = a ^ b;
            weights
                .iter()
                .enumerate()
                .filter(|(i, _)| (diff >> i) & 1 == 1)
                .map(|(_, w)| w)
                .sum()
        }
        LossSpec::Table { table } => table[a][b],
        LossSpec::ZeroOne => (a != b) as u8 as f64,
    }
}

/// Dense m×m loss matrix indexed `[decoded][sent]` by symbol index.
#[derive(Clone, Debug, PartialEq)]
pub struct LossTable {
    m: usize,
    data: Vec<f64>,
}

impl LossTable {
    pub fn new(spec: &LossSpec, space: &SymbolSpace) -> Result<Self> {
        spec.validate(space)?;
        let m = space.m();
        let mut data = Vec::with_capacity(m * m);
        for a in 0..m {
            for b in 0..m {
                data.push(pair_loss(spec, space, a, b));
            }
        }
        Ok(LossTable { m, data })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn get(&self, decoded: usize, sent: usize) -> f64 {
        self.data[decoded * self.m + sent]
    }

    /// Row of losses for one decoded candidate.
    #[inline]
    pub fn row(&self, decoded: usize) -> &[f64] {
        &self.data[decoded * self.m..(decoded + 1) * self.m]
    }

    pub fn max_entry(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    pub fn total(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.m).map(<[f64]>::to_vec).collect()
    }
}

/// Full m×m table for a loss; entry `(i, j)` is the loss between indices i and j.
pub fn loss_table(spec: &LossSpec, space: &SymbolSpace) -> Result<LossTable> {
    LossTable::new(spec, space)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(k: usize) -> SymbolSpace {
        SymbolSpace::unsigned(k).unwrap()
    }

    #[test]
    fn pointwise_examples() {
        let sp = u(4);
        assert_eq!(loss(&LossSpec::AbsDiff, &sp, 7, 8).unwrap(), 1.0);
        assert_eq!(loss(&LossSpec::SquaredDiff, &sp, 0, 8).unwrap(), 64.0);
        assert_eq!(loss(&LossSpec::xor_weights(4), &sp, 9, 3).unwrap(), 10.0);
        assert!(matches!(
            loss(&LossSpec::AbsDiff, &sp, 16, 0),
            Err(Error::Range { .. })
        ));
    }

    #[test]
    fn signed_values_do_not_wrap() {
        let sp = SymbolSpace::twos_complement(4).unwrap();
        assert_eq!(loss(&LossSpec::AbsDiff, &sp, -8, 7).unwrap(), 15.0);
        assert_eq!(loss(&LossSpec::SquaredDiff, &sp, 0, -1).unwrap(), 1.0);
    }

    #[test]
    fn table_examples() {
        let t = loss_table(&LossSpec::AbsDiff, &u(1)).unwrap();
        assert_eq!(t.to_rows(), vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        let t = loss_table(&LossSpec::SquaredDiff, &u(2)).unwrap();
        assert_eq!(t.get(0, 3), 9.0);
    }

    #[test]
    fn scalar_tables_are_symmetric_with_zero_diagonal() {
        for spec in [LossSpec::AbsDiff, LossSpec::SquaredDiff] {
            for sp in [u(4), SymbolSpace::twos_complement(4).unwrap()] {
                let t = loss_table(&spec, &sp).unwrap();
                for i in 0..sp.m() {
                    assert_eq!(t.get(i, i), 0.0);
                    for j in 0..sp.m() {
                        assert_eq!(t.get(i, j), t.get(j, i));
                    }
                }
            }
        }
    }

    #[test]
    fn xor_weights_match_xor_value() {
        for k in 1..=8 {
            let sp = u(k);
            let t = loss_table(&LossSpec::xor_weights(k), &sp).unwrap();
            for a in 0..sp.m() {
                for b in 0..sp.m() {
                    assert_eq!(t.get(a, b), (a ^ b) as f64);
                }
            }
        }
    }

    #[test]
    fn table_agrees_with_pointwise() {
        let sp = SymbolSpace::twos_complement(3).unwrap();
        let specs = [
            LossSpec::AbsDiff,
            LossSpec::SquaredDiff,
            LossSpec::ZeroOne,
            LossSpec::WeightedBits {
                weights: vec![0.5, 3.0, 1.0],
            },
        ];
        for spec in &specs {
            let t = loss_table(spec, &sp).unwrap();
            for (a, &va) in sp.symbol_values().iter().enumerate() {
                for (b, &vb) in sp.symbol_values().iter().enumerate() {
                    assert_eq!(t.get(a, b), loss(spec, &sp, va, vb).unwrap());
                }
            }
        }
    }

    #[test]
    fn custom_table_validation() {
        let sp = u(1);
        let asym = LossSpec::Table {
            table: vec![vec![0.0, 2.0], vec![5.0, 0.0]],
        };
        let t = loss_table(&asym, &sp).unwrap();
        assert_eq!((t.get(0, 1), t.get(1, 0)), (2.0, 5.0));

        let nonzero_diag = LossSpec::Table {
            table: vec![vec![1.0, 2.0], vec![5.0, 0.0]],
        };
        assert!(matches!(
            loss_table(&nonzero_diag, &sp),
            Err(Error::InvalidLoss(_))
        ));
        let negative = LossSpec::Table {
            table: vec![vec![0.0, -2.0], vec![5.0, 0.0]],
        };
        assert!(loss_table(&negative, &sp).is_err());
        let ragged = LossSpec::Table {
            table: vec![vec![0.0, 2.0], vec![5.0]],
        };
        assert!(loss_table(&ragged, &sp).is_err());
        assert!(loss_table(&LossSpec::xor_weights(3), &u(2)).is_err());
    }

    #[test]
    fn table_from_csv() {
        let spec = LossSpec::table_from_csv("0, 1.5\n2,0\n".as_bytes()).unwrap();
        assert_eq!(
            spec,
            LossSpec::Table {
                table: vec![vec![0.0, 1.5], vec![2.0, 0.0]]
            }
        );
        let bad = LossSpec::table_from_csv("0,x\n1,0\n".as_bytes()).unwrap_err();
        assert!(matches!(bad, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn spec_serde_shape() {
        let spec: LossSpec = serde_json::from_str(r#"{"kind":"squared_diff"}"#).unwrap();
        assert_eq!(spec, LossSpec::SquaredDiff);
        let spec: LossSpec =
            serde_json::from_str(r#"{"kind":"weighted_bits","weights":[1,2]}"#).unwrap();
        assert_eq!(spec, LossSpec::xor_weights(2));
        assert!(serde_json::from_str::<LossSpec>(r#"{"kind":"median"}"#).is_err());
    }
}
