//! Monte Carlo estimation of the symbol-space error rate `e_δ` against SNR.
//!
//! Each (config, SNR) cell draws its symbols from shards of
//! [`SHARD_SYMBOLS`] symbols, each shard on its own stream seeded with
//! `cell_seed + shard_index`. The cell seed depends only on the run seed
//! and the SNR value, so two configs with the same seed and code
//! dimensions see the same symbols and the same noise. That pairing makes
//! decoder and codebook comparisons much tighter than independent runs
//! would be.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{estimate_noise_variance, modulate_packed, ChannelModel};
use crate::codes::Codebook;
use crate::decode::{DecodeMethod, Decoder, Scratch};
use crate::error::{Error, Result};
use crate::loss::{LossSpec, LossTable};
use crate::par;

pub const SHARD_SYMBOLS: usize = 4096;

/// Default SNR grid in dB: -4 to +8 in 1 dB steps.
pub fn default_snr_grid() -> Vec<f64> {
    (-4..=8).map(f64::from).collect()
}

/// Where the Bayes decoder gets its noise level.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaSource {
    /// The channel's actual sigma.
    TrueValue,
    /// Blind estimate from this many extra random codewords.
    Estimated { probe_words: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DecoderKind {
    Hard,
    Soft,
    Bayes { loss: LossSpec },
    BayesFast { loss: LossSpec },
}

impl DecoderKind {
    pub fn label(&self) -> &'static str {
        match self {
            DecoderKind::Hard => "hard",
            DecoderKind::Soft => "soft",
            DecoderKind::Bayes { .. } => "bayes",
            DecoderKind::BayesFast { .. } => "bayes_fast",
        }
    }

    fn method(&self, sigma: f64) -> DecodeMethod {
        match self {
            DecoderKind::Hard => DecodeMethod::Hard,
            DecoderKind::Soft => DecodeMethod::Soft,
            DecoderKind::Bayes { loss } => DecodeMethod::Bayes {
                loss: loss.clone(),
                sigma,
            },
            DecoderKind::BayesFast { loss } => DecodeMethod::BayesFast {
                loss: loss.clone(),
                sigma,
            },
        }
    }

    fn uses_sigma(&self) -> bool {
        matches!(
            self,
            DecoderKind::Bayes { .. } | DecoderKind::BayesFast { .. }
        )
    }
}

#[derive(Clone, Debug)]
pub struct SimulationConfig {
    pub codebook_id: String,
    pub codebook: Codebook,
    pub decoder: DecoderKind,
    /// Error metric; the table is read `[decoded][sent]`.
    pub metric: LossSpec,
    pub snr_db: Vec<f64>,
    pub num_symbols: usize,
    pub seed: u64,
    pub sigma_source: SigmaSource,
}

impl SimulationConfig {
    /// Desk-scale defaults: 10^5 symbols, the default SNR grid, true sigma.
    pub fn new(
        codebook_id: impl Into<String>,
        codebook: Codebook,
        decoder: DecoderKind,
        metric: LossSpec,
    ) -> Self {
        SimulationConfig {
            codebook_id: codebook_id.into(),
            codebook,
            decoder,
            metric,
            snr_db: default_snr_grid(),
            num_symbols: 100_000,
            seed: 0,
            sigma_source: SigmaSource::TrueValue,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.num_symbols == 0 {
            return Err(Error::InvalidConfig(
                "num_symbols must be at least 1".into(),
            ));
        }
        if self.snr_db.is_empty() {
            return Err(Error::InvalidConfig("SNR list is empty".into()));
        }
        if let Some(bad) = self.snr_db.iter().find(|s| !s.is_finite()) {
            return Err(Error::InvalidConfig(format!("SNR {bad} is not finite")));
        }
        if let SigmaSource::Estimated { probe_words: 0 } = self.sigma_source {
            return Err(Error::InvalidConfig("probe_words must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SnrPoint {
    pub snr_db: f64,
    /// Mean per-symbol loss.
    pub e_delta: f64,
    pub stderr: f64,
    pub n_symbols: usize,
    pub sigma_true: f64,
    /// Sigma handed to the decoder (estimated or true).
    pub sigma_used: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimulationResult {
    pub codebook_id: String,
    pub decoder: String,
    pub points: Vec<SnrPoint>,
}

impl SimulationResult {
    pub fn at(&self, snr_db: f64) -> Option<&SnrPoint> {
        self.points.iter().find(|p| p.snr_db == snr_db)
    }
}

// splitmix64 finalizer
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn cell_seed(seed: u64, snr_db: f64) -> u64 {
    mix(seed ^ mix(snr_db.to_bits()))
}

const PROBE_TAG: u64 = 0x70_72_6f_62_65;

#[derive(Clone, Copy, Default)]
struct Tally {
    count: usize,
    sum: f64,
    sum_sq: f64,
}

fn run_shard(
    cb: &Codebook,
    decoder: &Decoder,
    metric: &LossTable,
    channel: &ChannelModel,
    seed: u64,
    count: usize,
) -> Tally {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (m, n) = (cb.m(), cb.n());
    let rows = cb.packed_rows();
    let mut buf = vec![0.0; n];
    let mut scratch = Scratch::default();
    let mut tally = Tally::default();
    for _ in 0..count {
        let sent = rng.random_range(0..m);
        modulate_packed(rows[sent], n, &mut buf);
        channel.add_noise(&mut buf, &mut rng);
        let decoded = decoder.decode_with(&buf, &mut scratch);
        let loss = metric.get(decoded, sent);
        tally.count += 1;
        tally.sum += loss;
        tally.sum_sq += loss * loss;
    }
    tally
}

fn probe_sigma(cb: &Codebook, channel: &ChannelModel, words: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = cb.n();
    let received: Vec<Vec<f64>> = (0..words)
        .map(|_| {
            let mut buf = vec![0.0; n];
            modulate_packed(cb.packed_rows()[rng.random_range(0..cb.m())], n, &mut buf);
            channel.add_noise(&mut buf, &mut rng);
            buf
        })
        .collect();
    Ok(estimate_noise_variance(&received, cb)?.sqrt())
}

/// Runs one configuration over its SNR grid.
pub fn run(cfg: &SimulationConfig) -> Result<SimulationResult> {
    cfg.validate()?;
    let cb = &cfg.codebook;
    let metric = LossTable::new(&cfg.metric, cb.space())?;
    let mut points = Vec::with_capacity(cfg.snr_db.len());
    for &snr_db in &cfg.snr_db {
        let channel = ChannelModel::from_snr_db(snr_db)?;
        let base = cell_seed(cfg.seed, snr_db);
        let sigma_used = match cfg.sigma_source {
            SigmaSource::Estimated { probe_words } if cfg.decoder.uses_sigma() => {
                probe_sigma(cb, &channel, probe_words, mix(base ^ PROBE_TAG))?
            }
            _ => channel.sigma(),
        };
        let decoder = Decoder::new(cb, &cfg.decoder.method(sigma_used))?;

        let shards = cfg.num_symbols.div_ceil(SHARD_SYMBOLS);
        let tallies = par::map_range(shards, |s| {
            let count = SHARD_SYMBOLS.min(cfg.num_symbols - s * SHARD_SYMBOLS);
            run_shard(
                cb,
                &decoder,
                &metric,
                &channel,
                base.wrapping_add(s as u64),
                count,
            )
        });
        let total = tallies.iter().fold(Tally::default(), |acc, t| Tally {
            count: acc.count + t.count,
            sum: acc.sum + t.sum,
            sum_sq: acc.sum_sq + t.sum_sq,
        });
        let n = total.count as f64;
        let mean = total.sum / n;
        let stderr = if total.count > 1 {
            let var = ((total.sum_sq - total.sum * mean) / (n - 1.0)).max(0.0);
            (var / n).sqrt()
        } else {
            0.0
        };
        points.push(SnrPoint {
            snr_db,
            e_delta: mean,
            stderr,
            n_symbols: total.count,
            sigma_true: channel.sigma(),
            sigma_used,
        });
    }
    Ok(SimulationResult {
        codebook_id: cfg.codebook_id.clone(),
        decoder: cfg.decoder.label().to_string(),
        points,
    })
}

/// One line of a sweep table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub codebook_id: String,
    pub decoder: String,
    pub snr_db: f64,
    pub e_delta: f64,
    pub stderr: f64,
    pub n_symbols: usize,
    pub sigma_used: f64,
}

/// Runs every configuration and returns a long table sorted by
/// (codebook id, decoder, SNR).
pub fn sweep(cfgs: &[SimulationConfig]) -> Result<Vec<SweepRow>> {
    let results = par::map_slice(cfgs, run)
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let mut rows: Vec<SweepRow> = results
        .into_iter()
        .flat_map(|r| {
            let (id, dec) = (r.codebook_id, r.decoder);
            r.points.into_iter().map(move |p| SweepRow {
                codebook_id: id.clone(),
                decoder: dec.clone(),
                snr_db: p.snr_db,
                e_delta: p.e_delta,
                stderr: p.stderr,
                n_symbols: p.n_symbols,
                sigma_used: p.sigma_used,
            })
        })
        .collect();
    rows.sort_by(|a, b| {
        a.codebook_id
            .cmp(&b.codebook_id)
            .then_with(|| a.decoder.cmp(&b.decoder))
            .then_with(|| a.snr_db.total_cmp(&b.snr_db))
    });
    Ok(rows)
}

pub const CSV_HEADER: [&str; 7] = [
    "codebook_id",
    "decoder",
    "snr_db",
    "e_delta",
    "stderr",
    "n_symbols",
    "sigma_used",
];

/// Writes sweep rows as CSV with a header line.
pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.codebook_id.clone(),
            r.decoder.clone(),
            r.snr_db.to_string(),
            r.e_delta.to_string(),
            r.stderr.to_string(),
            r.n_symbols.to_string(),
            r.sigma_used.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
