//! Hard, soft and Bayes decoders.
//!
//! The canonical Bayes decoder minimizes posterior expected loss over every
//! candidate symbol. The mean/median forms for squared and absolute loss are
//! fast paths that are checked against it in the test suite.
//!
//! Every argmin here breaks ties toward the lowest symbol index. Two scores
//! count as tied when they agree to within [`TIE_RTOL`] relative precision.

use serde::{Deserialize, Serialize};

use crate::channel::{hard_quantize, modulate_packed};
use crate::codes::{packed_distance, Codebook};
use crate::error::{Error, Result};
use crate::loss::{LossSpec, LossTable};

/// Relative precision below which two scores are treated as equal.
pub const TIE_RTOL: f64 = 1e-12;

/// Index of the smallest score; ties (within [`TIE_RTOL`]) go to the lowest index.
pub fn argmin_lowest<I: IntoIterator<Item = f64>>(scores: I) -> usize {
    let mut it = scores.into_iter().enumerate();
    let (mut best, mut best_val) = it.next().expect("at least one score");
    for (i, v) in it {
        if v < best_val - TIE_RTOL * best_val.abs() {
            best = i;
            best_val = v;
        }
    }
    best
}

/// Posterior distribution over symbol indices given a received word.
#[derive(Clone, Debug, PartialEq)]
pub struct Posterior {
    probs: Vec<f64>,
}

impl Posterior {
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn mode(&self) -> usize {
        argmin_lowest(self.probs.iter().map(|p| -p))
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.probs
    }
}

/// `p(s | c')` under a uniform prior and AWGN with standard deviation `sigma`.
pub fn posterior(c_prime: &[f64], cb: &Codebook, sigma: f64) -> Result<Posterior> {
    check_sigma(sigma)?;
    let modulated = Modulated::new(cb);
    modulated.check_len(c_prime)?;
    let mut probs = vec![0.0; cb.m()];
    modulated.squared_distances(c_prime, &mut probs);
    normalize_posterior(&mut probs, sigma);
    Ok(Posterior { probs })
}

/// Turns squared distances into normalized posterior weights in place.
fn normalize_posterior(d2: &mut [f64], sigma: f64) {
    let scale = 1.0 / (2.0 * sigma * sigma);
    let min_d2 = d2.iter().copied().fold(f64::INFINITY, f64::min);
    let mut total = 0.0;
    for x in d2.iter_mut() {
        // log-sum-exp: shift by the largest logit before exponentiating
        *x = (-(*x - min_d2) * scale).exp();
        total += *x;
    }
    for x in d2.iter_mut() {
        *x /= total;
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "decoder sigma must be positive and finite, got {sigma}"
        )))
    }
}

/// BPSK images of all codewords, row-major m×n.
#[derive(Clone, Debug)]
struct Modulated {
    n: usize,
    points: Vec<f64>,
}

impl Modulated {
    fn new(cb: &Codebook) -> Self {
        let n = cb.n();
        let mut points = vec![0.0; cb.m() * n];
        for (row, chunk) in cb.packed_rows().iter().zip(points.chunks_mut(n)) {
            modulate_packed(*row, n, chunk);
        }
        Modulated { n, points }
    }

    fn check_len(&self, c_prime: &[f64]) -> Result<()> {
        if c_prime.len() == self.n {
            Ok(())
        } else {
            Err(Error::Shape {
                expected: self.n,
                found: c_prime.len(),
            })
        }
    }

    fn squared_distances(&self, c_prime: &[f64], out: &mut [f64]) {
        for (d, point) in out.iter_mut().zip(self.points.chunks(self.n)) {
            *d = point
                .iter()
                .zip(c_prime)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
        }
    }
}

/// Sign-quantizes, then picks the codeword nearest in Hamming distance.
pub fn hard_decode(c_prime: &[f64], cb: &Codebook) -> Result<usize> {
    if c_prime.len() != cb.n() {
        return Err(Error::Shape {
            expected: cb.n(),
            found: c_prime.len(),
        });
    }
    Ok(hard_from_word(hard_quantize(c_prime), cb.packed_rows()))
}

fn hard_from_word(word: u64, rows: &[u64]) -> usize {
    let mut best = 0;
    let mut best_d = u32::MAX;
    for (i, &r) in rows.iter().enumerate() {
        let d = packed_distance(word, r);
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

/// Nearest modulated codeword in Euclidean distance.
pub fn soft_decode(c_prime: &[f64], cb: &Codebook) -> Result<usize> {
    let modulated = Modulated::new(cb);
    modulated.check_len(c_prime)?;
    let mut d2 = vec![0.0; cb.m()];
    modulated.squared_distances(c_prime, &mut d2);
    Ok(argmin_lowest(d2))
}

/// Symbol minimizing the posterior expected loss, searched over all candidates.
pub fn bayes_decode(c_prime: &[f64], cb: &Codebook, loss: &LossSpec, sigma: f64) -> Result<usize> {
    let table = LossTable::new(loss, cb.space())?;
    let post = posterior(c_prime, cb, sigma)?;
    Ok(bayes_from_posterior(post.probs(), &table))
}

/// Exhaustive expected-loss argmin for a given posterior.
pub fn bayes_from_posterior(probs: &[f64], table: &LossTable) -> usize {
    argmin_lowest((0..table.m()).map(|j| {
        table
            .row(j)
            .iter()
            .zip(probs)
            .map(|(l, p)| l * p)
            .sum::<f64>()
    }))
}

/// Closed-form Bayes decoding for the scalar losses: nearest value to the
/// posterior mean (squared loss) or the lower weighted median (absolute loss).
pub fn bayes_decode_fast(
    c_prime: &[f64],
    cb: &Codebook,
    loss: &LossSpec,
    sigma: f64,
) -> Result<usize> {
    let fast = FastForm::new(loss, cb)?;
    let post = posterior(c_prime, cb, sigma)?;
    Ok(fast.decode(post.probs()))
}

#[derive(Clone, Debug)]
enum FastForm {
    NearestMean { values: Vec<f64> },
    LowerMedian { by_value: Vec<usize> },
}

impl FastForm {
    fn new(loss: &LossSpec, cb: &Codebook) -> Result<Self> {
        let values: Vec<f64> = cb
            .space()
            .symbol_values()
            .iter()
            .map(|&v| v as f64)
            .collect();
        match loss {
            LossSpec::SquaredDiff => Ok(FastForm::NearestMean { values }),
            LossSpec::AbsDiff => {
                let mut by_value: Vec<usize> = (0..values.len()).collect();
                by_value.sort_by_key(|&i| cb.space().value(i));
                Ok(FastForm::LowerMedian { by_value })
            }
            _ => Err(Error::UnsupportedLoss(
                "closed-form Bayes decoding needs abs_diff or squared_diff",
            )),
        }
    }

    fn decode(&self, probs: &[f64]) -> usize {
        match self {
            FastForm::NearestMean { values } => {
                let mean: f64 = values.iter().zip(probs).map(|(v, p)| v * p).sum();
                argmin_lowest(values.iter().map(|v| (v - mean) * (v - mean)))
            }
            FastForm::LowerMedian { by_value } => {
                let mut cumulative = 0.0;
                for &i in by_value {
                    cumulative += probs[i];
                    if cumulative >= 0.5 - TIE_RTOL {
                        return i;
                    }
                }
                *by_value.last().expect("nonempty space")
            }
        }
    }
}

/// Decoder selection, with the noise level the Bayes forms assume.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DecodeMethod {
    Hard,
    Soft,
    Bayes { loss: LossSpec, sigma: f64 },
    BayesFast { loss: LossSpec, sigma: f64 },
}

#[derive(Clone, Debug)]
enum Prepared {
    Hard,
    Soft,
    Bayes { table: LossTable, sigma: f64 },
    BayesFast { form: FastForm, sigma: f64 },
}

/// A decoder with its codebook-dependent tables precomputed, for hot loops.
#[derive(Clone, Debug)]
pub struct Decoder {
    rows: Vec<u64>,
    modulated: Modulated,
    kind: Prepared,
}

/// Reusable per-thread buffer for [`Decoder::decode_with`].
#[derive(Clone, Debug, Default)]
pub struct Scratch {
    buf: Vec<f64>,
}

impl Decoder {
    pub fn new(cb: &Codebook, method: &DecodeMethod) -> Result<Self> {
        let kind = match method {
            DecodeMethod::Hard => Prepared::Hard,
            DecodeMethod::Soft => Prepared::Soft,
            DecodeMethod::Bayes { loss, sigma } => {
                check_sigma(*sigma)?;
                Prepared::Bayes {
                    table: LossTable::new(loss, cb.space())?,
                    sigma: *sigma,
                }
            }
            DecodeMethod::BayesFast { loss, sigma } => {
                check_sigma(*sigma)?;
                Prepared::BayesFast {
                    form: FastForm::new(loss, cb)?,
                    sigma: *sigma,
                }
            }
        };
        Ok(Decoder {
            rows: cb.packed_rows().to_vec(),
            modulated: Modulated::new(cb),
            kind,
        })
    }

    pub fn n(&self) -> usize {
        self.modulated.n
    }

    pub fn decode(&self, c_prime: &[f64]) -> Result<usize> {
        self.modulated.check_len(c_prime)?;
        Ok(self.decode_with(c_prime, &mut Scratch::default()))
    }

    /// Decodes without allocating; `c_prime` must have length n.
    pub fn decode_with(&self, c_prime: &[f64], scratch: &mut Scratch) -> usize {
        debug_assert_eq!(c_prime.len(), self.modulated.n);
        if let Prepared::Hard = self.kind {
            return hard_from_word(hard_quantize(c_prime), &self.rows);
        }
        let d2 = &mut scratch.buf;
        d2.resize(self.rows.len(), 0.0);
        self.modulated.squared_distances(c_prime, d2);
        match &self.kind {
            Prepared::Hard => unreachable!(),
            Prepared::Soft => argmin_lowest(d2.iter().copied()),
            Prepared::Bayes { table, sigma } => {
                normalize_posterior(d2, *sigma);
                bayes_from_posterior(d2, table)
            }
            Prepared::BayesFast { form, sigma } => {
                normalize_posterior(d2, *sigma);
                form.decode(d2)
            }
        }
    }
}
