//! Independent oracles shared by the integration tests. Nothing here goes
//! through the library's decoding or fitness code paths.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sigecc::{Codebook, LossSpec, SymbolSpace};

/// Loss straight from its definition, decoded symbol index first.
pub fn direct_loss(spec: &LossSpec, space: &SymbolSpace, decoded: usize, sent: usize) -> f64 {
    let (a, b) = (space.value(decoded), space.value(sent));
    match spec {
        LossSpec::AbsDiff => (a - b).abs() as f64,
        LossSpec::SquaredDiff => ((a - b) * (a - b)) as f64,
        LossSpec::ZeroOne => {
            if decoded == sent {
                0.0
            } else {
                1.0
            }
        }
        LossSpec::WeightedBits { weights } => (0..space.k())
            .map(|i| weights[i] * (((decoded >> i) & 1) as f64 - ((sent >> i) & 1) as f64).abs())
            .sum(),
        LossSpec::Table { table } => table[decoded][sent],
    }
}

fn bpsk(cb: &Codebook, i: usize) -> Vec<f64> {
    let w = cb.encode(i).unwrap();
    w.iter().map(|b| if b { -1.0 } else { 1.0 }).collect()
}

/// Brute-force Bayes decision: unnormalized posterior weights, expected loss
/// per candidate, lowest index among scores tied to 1e-12 relative.
pub fn brute_force_bayes(rx: &[f64], cb: &Codebook, spec: &LossSpec, sigma: f64) -> usize {
    let m = cb.m();
    let log_lik: Vec<f64> = (0..m)
        .map(|i| {
            let d2: f64 = bpsk(cb, i)
                .iter()
                .zip(rx)
                .map(|(x, y)| (x - y).powi(2))
                .sum();
            -d2 / (2.0 * sigma * sigma)
        })
        .collect();
    let top = log_lik.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = log_lik.iter().map(|l| (l - top).exp()).collect();
    let z: f64 = weights.iter().sum();
    let risk: Vec<f64> = (0..m)
        .map(|j| {
            (0..m)
                .map(|i| weights[i] / z * direct_loss(spec, cb.space(), j, i))
                .sum()
        })
        .collect();
    let mut best = 0;
    for j in 1..m {
        if risk[j] < risk[best] - 1e-12 * risk[best].abs() {
            best = j;
        }
    }
    best
}

/// Brute-force nearest modulated codeword.
pub fn brute_force_soft(rx: &[f64], cb: &Codebook) -> usize {
    let d2: Vec<f64> = (0..cb.m())
        .map(|i| {
            bpsk(cb, i)
                .iter()
                .zip(rx)
                .map(|(x, y)| (x - y).powi(2))
                .sum()
        })
        .collect();
    let mut best = 0;
    for j in 1..d2.len() {
        if d2[j] < d2[best] - 1e-12 * d2[best].abs() {
            best = j;
        }
    }
    best
}

/// Objective straight from the double sum over ordered pairs.
pub fn direct_objective(rows: &[u64], space: &SymbolSpace, spec: &LossSpec, sigma: f64) -> f64 {
    let mut v = 0.0;
    for i in 0..rows.len() {
        for j in 0..rows.len() {
            if i != j {
                let d = (rows[i] ^ rows[j]).count_ones() as f64;
                v += direct_loss(spec, space, i, j) * (-d / (2.0 * sigma * sigma)).exp();
            }
        }
    }
    v
}

/// Exhaustive minimum of the penalized fitness over every m×n bit matrix.
pub fn exhaustive_optimum(
    space: &SymbolSpace,
    n: usize,
    spec: &LossSpec,
    sigma: f64,
    penalty: f64,
) -> f64 {
    let m = space.m();
    let bits = m * n;
    assert!(bits <= 20, "search space too large");
    let mut best = f64::INFINITY;
    for code in 0u64..1 << bits {
        let rows: Vec<u64> = (0..m)
            .map(|r| (code >> ((m - 1 - r) * n)) & ((1 << n) - 1))
            .collect();
        let mut dups = 0;
        for i in 0..m {
            for j in i + 1..m {
                dups += (rows[i] == rows[j]) as usize;
            }
        }
        best = best.min(direct_objective(&rows, space, spec, sigma) + penalty * dups as f64);
    }
    best
}

/// Exhaustive minimum over all k×n generator matrices.
pub fn exhaustive_linear_optimum(
    space: &SymbolSpace,
    n: usize,
    spec: &LossSpec,
    sigma: f64,
    penalty: f64,
) -> f64 {
    let k = space.k();
    let mut best = f64::INFINITY;
    for code in 0u64..1 << (k * n) {
        let g: Vec<u64> = (0..k)
            .map(|r| (code >> ((k - 1 - r) * n)) & ((1 << n) - 1))
            .collect();
        let rows: Vec<u64> = (0..1usize << k)
            .map(|x| {
                (0..k)
                    .filter(|j| (x >> (k - 1 - j)) & 1 == 1)
                    .fold(0, |acc, j| acc ^ g[j])
            })
            .collect();
        let mut dups = 0;
        for i in 0..rows.len() {
            for j in i + 1..rows.len() {
                dups += (rows[i] == rows[j]) as usize;
            }
        }
        best = best.min(direct_objective(&rows, space, spec, sigma) + penalty * dups as f64);
    }
    best
}

/// Received words: noisy modulated codewords plus some arbitrary points.
pub fn fuzz_corpus(cb: &Codebook, count: usize, seed: u64) -> Vec<(Vec<f64>, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|t| {
            let sigma: f64 = rng.random_range(0.25..2.5);
            let rx: Vec<f64> = if t % 4 == 0 {
                (0..cb.n()).map(|_| rng.random_range(-2.0..2.0)).collect()
            } else {
                let i = rng.random_range(0..cb.m());
                bpsk(cb, i)
                    .into_iter()
                    .map(|x| x + sigma * rng.sample::<f64, _>(StandardNormal))
                    .collect()
            };
            (rx, sigma)
        })
        .collect()
}

/// A random codebook with distinct rows.
pub fn random_codebook(space: SymbolSpace, n: usize, seed: u64) -> Codebook {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows: Vec<u64> = Vec::new();
    while rows.len() < space.m() {
        let r = rng.random_range(0..1u64 << n);
        if !rows.contains(&r) {
            rows.push(r);
        }
    }
    Codebook::from_packed(space, n, rows).unwrap()
}

/// A random asymmetric loss table with zero diagonal.
pub fn random_table(m: usize, seed: u64) -> LossSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    LossSpec::Table {
        table: (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        if i == j {
                            0.0
                        } else {
                            rng.random_range(0.0..10.0)
                        }
                    })
                    .collect()
            })
            .collect(),
    }
}
