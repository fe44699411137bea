//! Baseband BPSK over an additive white Gaussian noise channel.
//!
//! Polarity is bit 0 → +1, bit 1 → -1 with unit symbol energy. SNR is quoted
//! per coded bit, so `SNR_linear = 1 / σ²` and 0 dB corresponds to σ = 1.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::codes::Codebook;
use crate::error::{Error, Result};
use crate::symbols::Word;

/// Lower clamp on the blind noise-variance estimate.
pub const VARIANCE_FLOOR: f64 = 1e-6;

#[inline]
pub fn bpsk_symbol(bit: bool) -> f64 {
    if bit {
        -1.0
    } else {
        1.0
    }
}

pub fn bpsk_modulate(bits: &Word) -> Vec<f64> {
    bits.iter().map(bpsk_symbol).collect()
}

/// Modulates a packed n-bit row into `out`.
#[inline]
pub(crate) fn modulate_packed(row: u64, n: usize, out: &mut [f64]) {
    for (i, x) in out.iter_mut().enumerate().take(n) {
        *x = bpsk_symbol((row >> (n - 1 - i)) & 1 == 1);
    }
}

/// Sign quantizer: nonnegative → bit 0, negative → bit 1.
pub fn hard_quantize(received: &[f64]) -> u64 {
    received
        .iter()
        .fold(0u64, |acc, &x| (acc << 1) | (x < 0.0) as u64)
}

pub fn snr_db_to_sigma(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0).sqrt()
}

pub fn sigma_to_snr_db(sigma: f64) -> f64 {
    -10.0 * (sigma * sigma).log10()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelModel {
    sigma: f64,
}

impl ChannelModel {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "noise sigma must be positive and finite, got {sigma}"
            )));
        }
        Ok(ChannelModel { sigma })
    }

    pub fn from_snr_db(snr_db: f64) -> Result<Self> {
        ChannelModel::new(snr_db_to_sigma(snr_db))
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Returns `signal + noise` with iid N(0, σ²) components.
    pub fn transmit<R: Rng + ?Sized>(&self, signal: &[f64], rng: &mut R) -> Vec<f64> {
        let mut out = signal.to_vec();
        self.add_noise(&mut out, rng);
        out
    }

    pub fn add_noise<R: Rng + ?Sized>(&self, signal: &mut [f64], rng: &mut R) {
        for x in signal.iter_mut() {
            let z: f64 = StandardNormal.sample(rng);
            *x += self.sigma * z;
        }
    }
}

/// Population variance of the modulated codebook entries, all codewords
/// equally likely.
pub fn codebook_signal_variance(cb: &Codebook) -> f64 {
    let total = (cb.m() * cb.n()) as f64;
    let ones: u32 = cb.packed_rows().iter().map(|r| r.count_ones()).sum();
    let p = ones as f64 / total;
    // entries are ±1, so E[x²] = 1 and E[x] = 1 - 2p
    let mean = 1.0 - 2.0 * p;
    1.0 - mean * mean
}

/// Blind noise-variance estimate: the variance of the pooled received
/// samples minus the variance of the modulated codebook, floored at
/// [`VARIANCE_FLOOR`].
pub fn estimate_noise_variance(received: &[Vec<f64>], cb: &Codebook) -> Result<f64> {
    let mut count = 0usize;
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for word in received {
        if word.len() != cb.n() {
            return Err(Error::Shape {
                expected: cb.n(),
                found: word.len(),
            });
        }
        // Welford
        for &x in word {
            count += 1;
            let delta = x - mean;
            mean += delta / count as f64;
            m2 += delta * (x - mean);
        }
    }
    if count == 0 {
        return Err(Error::EmptySample);
    }
    let sample_var = m2 / count as f64;
    Ok((sample_var - codebook_signal_variance(cb)).max(VARIANCE_FLOOR))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes;
    use crate::symbols::SymbolSpace;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn modulation_examples() {
        assert_eq!(bpsk_modulate(&"0000000".parse().unwrap()), vec![1.0; 7]);
        assert_eq!(bpsk_modulate(&"10".parse().unwrap()), vec![-1.0, 1.0]);
        let w: Word = "1011001".parse().unwrap();
        assert_eq!(hard_quantize(&bpsk_modulate(&w)), w.value());
        let mut buf = [0.0; 7];
        modulate_packed(w.value(), 7, &mut buf);
        assert_eq!(buf.to_vec(), bpsk_modulate(&w));
    }

    #[test]
    fn snr_conversion() {
        assert_eq!(snr_db_to_sigma(0.0), 1.0);
        assert!((snr_db_to_sigma(10.0) - 0.1f64.sqrt()).abs() < 1e-15);
        assert!((snr_db_to_sigma(-10.0) - 10f64.sqrt()).abs() < 1e-14);
        assert!((sigma_to_snr_db(snr_db_to_sigma(3.7)) - 3.7).abs() < 1e-12);
        let grid: Vec<f64> = (-40..=40)
            .map(|d| snr_db_to_sigma(d as f64 * 0.5))
            .collect();
        assert!(grid.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn channel_rejects_bad_sigma() {
        assert!(ChannelModel::new(0.0).is_err());
        assert!(ChannelModel::new(-1.0).is_err());
        assert!(ChannelModel::new(f64::NAN).is_err());
    }

    #[test]
    fn vanishing_noise_is_identity() {
        let ch = ChannelModel::new(1e-300).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = vec![1.0, -1.0, 1.0, 1.0];
        assert_eq!(ch.transmit(&x, &mut rng), x);
    }

    #[test]
    fn transmit_is_reproducible_and_length_preserving() {
        let ch = ChannelModel::new(0.7).unwrap();
        let x = vec![1.0; 13];
        let a = ch.transmit(&x, &mut ChaCha8Rng::seed_from_u64(99));
        let b = ch.transmit(&x, &mut ChaCha8Rng::seed_from_u64(99));
        assert_eq!(a, b);
        assert_eq!(a.len(), 13);
    }

    #[test]
    fn noise_variance_matches_sigma() {
        let sigma = 0.8;
        let ch = ChannelModel::new(sigma).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let x = vec![0.0; 1_000_000];
        let y = ch.transmit(&x, &mut rng);
        let var = y.iter().map(|v| v * v).sum::<f64>() / y.len() as f64;
        assert!((var / (sigma * sigma) - 1.0).abs() < 0.01, "var = {var}");
    }

    fn random_codewords(
        cb: &Codebook,
        words: usize,
        ch: &ChannelModel,
        seed: u64,
    ) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..words)
            .map(|_| {
                let i = rng.random_range(0..cb.m());
                ch.transmit(&bpsk_modulate(&cb.encode(i).unwrap()), &mut rng)
            })
            .collect()
    }

    #[test]
    fn variance_estimate_is_consistent() {
        // Hamming(7,4): every position is half zeros, half ones.
        let cb = codes::baseline("hamming74").unwrap();
        assert!((codebook_signal_variance(&cb) - 1.0).abs() < 1e-12);
        for (sigma, seed) in [(1.0, 5u64), (0.5, 6), (2.0, 7)] {
            let ch = ChannelModel::new(sigma).unwrap();
            let rx = random_codewords(&cb, 10_000, &ch, seed);
            let est = estimate_noise_variance(&rx, &cb).unwrap();
            let truth = sigma * sigma;
            assert!((est / truth - 1.0).abs() < 0.10, "sigma {sigma}: {est}");
        }
    }

    #[test]
    fn variance_estimate_floors_at_zero_noise() {
        let cb = codes::baseline("hamming74").unwrap();
        let rx: Vec<Vec<f64>> = (0..16)
            .map(|i| bpsk_modulate(&cb.encode(i).unwrap()))
            .collect();
        assert_eq!(estimate_noise_variance(&rx, &cb).unwrap(), VARIANCE_FLOOR);
    }

    #[test]
    fn variance_estimate_errors() {
        let cb = codes::baseline("hamming74").unwrap();
        assert!(matches!(
            estimate_noise_variance(&[], &cb),
            Err(Error::EmptySample)
        ));
        assert!(matches!(
            estimate_noise_variance(&[vec![0.0; 3]], &cb),
            Err(Error::Shape { .. })
        ));
    }

    #[test]
    fn signal_variance_of_unbalanced_codebook() {
        let sp = SymbolSpace::unsigned(1).unwrap();
        let cb = Codebook::new(sp, &["00".parse().unwrap(), "01".parse().unwrap()]).unwrap();
        // three +1 and one -1: mean 0.5, variance 0.75
        assert!((codebook_signal_variance(&cb) - 0.75).abs() < 1e-15);
    }
}
