//! Codebook search.
//!
//! Candidates are scored by the pairwise objective
//! `v = Σ_{i≠j} L(i, j) · exp(-d_H(c_i, c_j) / 2σ²)`, plus a penalty for every
//! pair of identical codewords. Lower is better throughout.

mod ga;
mod genome;
mod hill;
mod ledger;
mod linear;

pub use ga::ga_optimize;
pub use hill::hill_climb;
pub use ledger::{run_search, RunLedger};
pub use linear::ga_optimize_linear;

use serde::{Deserialize, Serialize};

use crate::codes::{packed_distance, Codebook, GeneratorMatrix};
use crate::error::{Error, Result};
use crate::loss::{LossSpec, LossTable};
use crate::symbols::SymbolSpace;

/// Objective settings: loss, design noise level and duplicate penalty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitnessConfig {
    pub loss: LossSpec,
    pub sigma: f64,
    /// Surcharge per duplicated codeword pair. Defaults to `m² · max L`.
    #[serde(default)]
    pub duplicate_penalty: Option<f64>,
}

impl FitnessConfig {
    pub fn new(loss: LossSpec, sigma: f64) -> Self {
        FitnessConfig {
            loss,
            sigma,
            duplicate_penalty: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Ga,
    HillClimb,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MutationOp {
    /// Exchange two bit positions of the chromosome.
    Swap,
    /// Invert one bit position.
    Flip,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    pub algorithm: Algorithm,
    pub population_size: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    /// Probability that an offspring is mutated once.
    pub mutation_rate: f64,
    pub elitism_count: usize,
    pub tournament_size: usize,
    pub mutation_op: MutationOp,
    /// Hill-climbing restarts.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            algorithm: Algorithm::Ga,
            population_size: 200,
            generations: 2000,
            crossover_rate: 0.9,
            mutation_rate: 0.3,
            elitism_count: 2,
            tournament_size: 2,
            mutation_op: MutationOp::Swap,
            restarts: 20,
            seed: 0,
        }
    }
}

impl SearchConfig {
    pub fn hill_climb() -> Self {
        SearchConfig {
            algorithm: Algorithm::HillClimb,
            ..Default::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        for (name, rate) in [
            ("crossover_rate", self.crossover_rate),
            ("mutation_rate", self.mutation_rate),
        ] {
            if !(0.0..=1.0).contains(&rate) {
                return bad(format!("{name} must lie in [0, 1], got {rate}"));
            }
        }
        match self.algorithm {
            Algorithm::Ga => {
                if self.population_size < 2 {
                    return bad("population_size must be at least 2".into());
                }
                if self.elitism_count >= self.population_size {
                    return bad("elitism_count must be below population_size".into());
                }
                if self.tournament_size == 0 {
                    return bad("tournament_size must be positive".into());
                }
            }
            Algorithm::HillClimb => {
                if self.restarts == 0 {
                    return bad("restarts must be positive".into());
                }
            }
        }
        Ok(())
    }
}

/// Result of a codebook search.
#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub codebook: Codebook,
    /// Present for linear searches.
    pub generator: Option<GeneratorMatrix>,
    pub best_fitness: f64,
    /// Best fitness seen so far, one entry per generation (GA) or restart
    /// (hill climbing); the GA trace starts with the initial population.
    pub trace: Vec<f64>,
    pub evaluations: u64,
}

/// Precomputed scorer for candidate m×n bit matrices of one symbol space.
#[derive(Clone, Debug)]
pub struct Fitness {
    m: usize,
    n: usize,
    table: LossTable,
    // exp(-d / 2σ²) for d = 0..=n
    weights: Vec<f64>,
    penalty: f64,
}

impl Fitness {
    pub fn new(space: &SymbolSpace, n: usize, cfg: &FitnessConfig) -> Result<Self> {
        if !(cfg.sigma > 0.0 && cfg.sigma.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "design sigma must be positive, got {}",
                cfg.sigma
            )));
        }
        if n == 0 || n > crate::symbols::MAX_WORD_BITS {
            return Err(Error::InvalidConfig(format!(
                "codeword length {n} unsupported"
            )));
        }
        let table = LossTable::new(&cfg.loss, space)?;
        let m = space.m();
        // The unpenalized objective can never reach the sum of all table
        // entries, so a penalty at least that large dominates it.
        let ceiling = table.total();
        let penalty = match cfg.duplicate_penalty {
            Some(p) if p < ceiling || !p.is_finite() => {
                return Err(Error::InvalidConfig(format!(
                    "duplicate_penalty {p} does not dominate the objective (needs >= {ceiling})"
                )))
            }
            Some(p) => p,
            None => ((m * m) as f64 * table.max_entry()).max(1.0),
        };
        let scale = 1.0 / (2.0 * cfg.sigma * cfg.sigma);
        let weights = (0..=n).map(|d| (-(d as f64) * scale).exp()).collect();
        Ok(Fitness {
            m,
            n,
            table,
            weights,
            penalty,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn penalty(&self) -> f64 {
        self.penalty
    }

    /// The unpenalized objective `v`.
    pub fn objective(&self, rows: &[u64]) -> f64 {
        self.score(rows).0
    }

    /// `v` plus the penalty times the number of duplicate pairs.
    pub fn evaluate(&self, rows: &[u64]) -> f64 {
        let (v, dups) = self.score(rows);
        v + self.penalty * dups as f64
    }

    fn score(&self, rows: &[u64]) -> (f64, usize) {
        debug_assert_eq!(rows.len(), self.m);
        let mut v = 0.0;
        let mut dups = 0;
        for i in 0..rows.len() {
            for j in i + 1..rows.len() {
                let d = packed_distance(rows[i], rows[j]) as usize;
                dups += (d == 0) as usize;
                v += (self.table.get(i, j) + self.table.get(j, i)) * self.weights[d];
            }
        }
        (v, dups)
    }

    /// Fitness change from flipping one bit of row `row`.
    pub(crate) fn flip_delta(&self, rows: &[u64], row: usize, mask: u64) -> f64 {
        let old = rows[row];
        let new = old ^ mask;
        let mut delta = 0.0;
        for (j, &other) in rows.iter().enumerate() {
            if j == row {
                continue;
            }
            let d_old = packed_distance(old, other) as usize;
            let d_new = packed_distance(new, other) as usize;
            let pair = self.table.get(row, j) + self.table.get(j, row);
            delta += pair * (self.weights[d_new] - self.weights[d_old]);
            delta += self.penalty * ((d_new == 0) as i32 - (d_old == 0) as i32) as f64;
        }
        delta
    }
}

/// Number of unordered pairs of identical rows.
pub fn duplicate_pairs(rows: &[u64]) -> usize {
    let mut sorted = rows.to_vec();
    sorted.sort_unstable();
    sorted
        .chunk_by(|a, b| a == b)
        .map(|run| run.len() * (run.len() - 1) / 2)
        .sum()
}

/// Objective `v` of a codebook.
pub fn objective_v(cb: &Codebook, loss: &LossSpec, sigma: f64) -> Result<f64> {
    let f = Fitness::new(cb.space(), cb.n(), &FitnessConfig::new(loss.clone(), sigma))?;
    Ok(f.objective(cb.packed_rows()))
}

/// Penalized fitness of a candidate matrix that may contain duplicate rows.
pub fn fitness(space: &SymbolSpace, n: usize, rows: &[u64], cfg: &FitnessConfig) -> Result<f64> {
    if rows.len() != space.m() {
        return Err(Error::Shape {
            expected: space.m(),
            found: rows.len(),
        });
    }
    Ok(Fitness::new(space, n, cfg)?.evaluate(rows))
}

fn check_dimensions(space: &SymbolSpace, n: usize) -> Result<()> {
    if n == 0 || n > 63 {
        return Err(Error::InvalidConfig(format!(
            "codeword length {n} outside 1..=63"
        )));
    }
    if (space.m() as u128) > 1u128 << n {
        return Err(Error::InvalidConfig(format!(
            "{} symbols cannot have distinct {n}-bit codewords",
            space.m()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes;

    fn two_point() -> Codebook {
        let sp = SymbolSpace::unsigned(1).unwrap();
        Codebook::new(sp, &["0".parse().unwrap(), "1".parse().unwrap()]).unwrap()
    }

    #[test]
    fn objective_two_point() {
        let v = objective_v(&two_point(), &LossSpec::AbsDiff, 1.0).unwrap();
        // direct evaluation: two ordered pairs, loss 1, distance 1
        let expected = 2.0 * (-0.5f64).exp();
        assert!((v - expected).abs() < 1e-15);
        assert!((v - 1.21306).abs() < 1e-5);
    }

    #[test]
    fn zero_loss_gives_zero_objective() {
        let cb = codes::baseline("hamming74").unwrap();
        let zero = LossSpec::Table {
            table: vec![vec![0.0; 16]; 16],
        };
        assert_eq!(objective_v(&cb, &zero, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn penalty_counts_duplicate_pairs() {
        let sp = SymbolSpace::unsigned(2).unwrap();
        let cfg = FitnessConfig {
            loss: LossSpec::AbsDiff,
            sigma: 1.0,
            duplicate_penalty: Some(1000.0),
        };
        let f = Fitness::new(&sp, 3, &cfg).unwrap();

        let distinct = [0b000, 0b011, 0b101, 0b110];
        assert_eq!(f.evaluate(&distinct), f.objective(&distinct));

        let one_dup = [0b000, 0b000, 0b101, 0b110];
        assert_eq!(duplicate_pairs(&one_dup), 1);
        assert_eq!(f.evaluate(&one_dup), f.objective(&one_dup) + 1000.0);

        let all_same = [0b111; 4];
        assert_eq!(duplicate_pairs(&all_same), 6);
        assert_eq!(f.evaluate(&all_same), f.objective(&all_same) + 6000.0);
        // identical rows contribute their full loss: Σ_{i≠j} |i-j| = 20
        assert_eq!(f.objective(&all_same), 20.0);
    }

    #[test]
    fn default_penalty_and_validation() {
        let sp = SymbolSpace::unsigned(4).unwrap();
        let f = Fitness::new(&sp, 7, &FitnessConfig::new(LossSpec::SquaredDiff, 1.0)).unwrap();
        assert_eq!(f.penalty(), 256.0 * 225.0);
        let weak = FitnessConfig {
            duplicate_penalty: Some(1.0),
            ..FitnessConfig::new(LossSpec::AbsDiff, 1.0)
        };
        assert!(Fitness::new(&sp, 7, &weak).is_err());
        assert!(Fitness::new(&sp, 7, &FitnessConfig::new(LossSpec::AbsDiff, 0.0)).is_err());
        assert!(fitness(&sp, 7, &[0; 3], &FitnessConfig::new(LossSpec::AbsDiff, 1.0)).is_err());
    }

    #[test]
    fn flip_delta_matches_full_evaluation() {
        let sp = SymbolSpace::twos_complement(3).unwrap();
        let f = Fitness::new(&sp, 5, &FitnessConfig::new(LossSpec::SquaredDiff, 0.8)).unwrap();
        let rows = [
            0b00000, 0b00001, 0b00011, 0b00111, 0b01111, 0b11111, 0b11110, 0b11100,
        ];
        let base = f.evaluate(&rows);
        for r in 0..rows.len() {
            for bit in 0..5 {
                let mask = 1u64 << bit;
                let mut flipped = rows;
                flipped[r] ^= mask;
                let exact = f.evaluate(&flipped) - base;
                let delta = f.flip_delta(&rows, r, mask);
                assert!((exact - delta).abs() < 1e-9 * base.abs().max(1.0));
            }
        }
    }

    #[test]
    fn search_config_validation() {
        assert!(SearchConfig::default().validate().is_ok());
        let bad = SearchConfig {
            mutation_rate: 1.5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = SearchConfig {
            population_size: 1,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = SearchConfig {
            restarts: 0,
            ..SearchConfig::hill_climb()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn infeasible_dimensions() {
        let sp = SymbolSpace::unsigned(4).unwrap();
        assert!(check_dimensions(&sp, 3).is_err());
        assert!(check_dimensions(&sp, 4).is_ok());
    }
}
