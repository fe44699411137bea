//! Random-restart, first-improvement bit-flip hill climbing.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::genome::distinct_rows;
use super::{check_dimensions, Algorithm, Fitness, FitnessConfig, SearchConfig, SearchOutcome};
use crate::codes::Codebook;
use crate::error::{Error, Result};
use crate::symbols::SymbolSpace;

/// Relative margin a flip must beat before it counts as an improvement.
pub(crate) const IMPROVE_RTOL: f64 = 1e-12;

/// Climbs from a random duplicate-free codebook until no single bit flip
/// improves fitness, restarting `search.restarts` times.
pub fn hill_climb(
    space: &SymbolSpace,
    n: usize,
    cfg: &FitnessConfig,
    search: &SearchConfig,
) -> Result<SearchOutcome> {
    if search.algorithm != Algorithm::HillClimb {
        return Err(Error::InvalidConfig(
            "hill_climb needs algorithm = hill_climb".into(),
        ));
    }
    search.validate()?;
    check_dimensions(space, n)?;
    let fitness = Fitness::new(space, n, cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(search.seed);
    let m = space.m();
    let mut moves: Vec<usize> = (0..m * n).collect();

    let mut best: Option<(Vec<u64>, f64)> = None;
    let mut trace = Vec::with_capacity(search.restarts);
    let mut evaluations = 0u64;

    for _ in 0..search.restarts {
        let mut rows = distinct_rows(m, n, &mut rng);
        let mut current = fitness.evaluate(&rows);
        evaluations += 1;
        loop {
            moves.shuffle(&mut rng);
            let margin = IMPROVE_RTOL * current.abs().max(1.0);
            let mut improved = false;
            for &pos in &moves {
                let (row, mask) = (pos / n, 1u64 << (n - 1 - pos % n));
                evaluations += 1;
                if fitness.flip_delta(&rows, row, mask) < -margin {
                    rows[row] ^= mask;
                    current = fitness.evaluate(&rows);
                    improved = true;
                    break;
                }
            }
            if !improved {
                break;
            }
        }
        if best.as_ref().is_none_or(|(_, f)| current < *f) {
            best = Some((rows, current));
        }
        trace.push(best.as_ref().map(|b| b.1).expect("set above"));
    }

    let (rows, best_fitness) = best.expect("at least one restart");
    Ok(SearchOutcome {
        codebook: Codebook::from_packed(space.clone(), n, rows)?,
        generator: None,
        best_fitness,
        trace,
        evaluations,
    })
}
