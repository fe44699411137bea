//! Genetic algorithm over bit-matrix chromosomes.
//!
//! Offspring are bred sequentially from one seeded stream and only fitness
//! evaluation fans out, so a run depends on the seed alone.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::genome::{crossover, mutate, random_rows};
use super::{
    check_dimensions, duplicate_pairs, Algorithm, Fitness, FitnessConfig, SearchConfig,
    SearchOutcome,
};
use crate::codes::Codebook;
use crate::error::{Error, Result};
use crate::par;
use crate::symbols::SymbolSpace;

pub(crate) struct GaRun {
    pub best: Vec<u64>,
    pub best_fitness: f64,
    pub trace: Vec<f64>,
    pub evaluations: u64,
}

fn tournament<R: Rng + ?Sized>(fits: &[f64], size: usize, rng: &mut R) -> usize {
    let mut best = rng.random_range(0..fits.len());
    for _ in 1..size {
        let c = rng.random_range(0..fits.len());
        if fits[c] < fits[best] {
            best = c;
        }
    }
    best
}

/// Runs the generation loop on chromosomes of `rows` rows by `n` bits.
///
/// `init_ok` screens the initial draw: a failing individual is resampled
/// once, then kept regardless.
pub(crate) fn evolve<F, V>(
    rows: usize,
    n: usize,
    search: &SearchConfig,
    score: F,
    init_ok: V,
) -> GaRun
where
    F: Fn(&[u64]) -> f64 + Sync + Send,
    V: Fn(&[u64]) -> bool,
{
    let mut rng = ChaCha8Rng::seed_from_u64(search.seed);
    let len = rows * n;
    let pop_size = search.population_size;

    let mut pop: Vec<Vec<u64>> = (0..pop_size)
        .map(|_| {
            let first = random_rows(rows, n, &mut rng);
            if init_ok(&first) {
                first
            } else {
                random_rows(rows, n, &mut rng)
            }
        })
        .collect();
    let mut fits = par::map_slice(&pop, |g| score(g));
    let mut evaluations = pop_size as u64;

    let mut best_idx = argmin(&fits);
    let mut best = pop[best_idx].clone();
    let mut best_fitness = fits[best_idx];
    let mut trace = Vec::with_capacity(search.generations + 1);
    trace.push(best_fitness);

    for _ in 0..search.generations {
        let mut order: Vec<usize> = (0..pop_size).collect();
        order.sort_by(|&a, &b| fits[a].total_cmp(&fits[b]));

        let mut next: Vec<Vec<u64>> = Vec::with_capacity(pop_size);
        let mut next_fits = Vec::with_capacity(pop_size);
        for &i in order.iter().take(search.elitism_count) {
            next.push(pop[i].clone());
            next_fits.push(fits[i]);
        }

        let mut children: Vec<Vec<u64>> = Vec::with_capacity(pop_size);
        while next.len() + children.len() < pop_size {
            let a = tournament(&fits, search.tournament_size, &mut rng);
            let b = tournament(&fits, search.tournament_size, &mut rng);
            let (c1, c2) = if len > 1 && rng.random_bool(search.crossover_rate) {
                let cut = rng.random_range(1..len);
                crossover(&pop[a], &pop[b], n, cut)
            } else {
                (pop[a].clone(), pop[b].clone())
            };
            for mut child in [c1, c2] {
                if next.len() + children.len() == pop_size {
                    break;
                }
                if rng.random_bool(search.mutation_rate) {
                    mutate(&mut child, n, search.mutation_op, &mut rng);
                }
                children.push(child);
            }
        }

        let child_fits = par::map_slice(&children, |g| score(g));
        evaluations += children.len() as u64;
        next.extend(children);
        next_fits.extend(child_fits);
        pop = next;
        fits = next_fits;

        best_idx = argmin(&fits);
        if fits[best_idx] < best_fitness {
            best_fitness = fits[best_idx];
            best = pop[best_idx].clone();
        }
        trace.push(best_fitness);
    }

    GaRun {
        best,
        best_fitness,
        trace,
        evaluations,
    }
}

fn argmin(fits: &[f64]) -> usize {
    fits.iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("nonempty population")
}

/// Searches general m×n codebooks with the genetic algorithm.
pub fn ga_optimize(
    space: &SymbolSpace,
    n: usize,
    cfg: &FitnessConfig,
    search: &SearchConfig,
) -> Result<SearchOutcome> {
    if search.algorithm != Algorithm::Ga {
        return Err(Error::InvalidConfig(
            "ga_optimize needs algorithm = ga".into(),
        ));
    }
    search.validate()?;
    check_dimensions(space, n)?;
    let fitness = Fitness::new(space, n, cfg)?;
    let run = evolve(
        space.m(),
        n,
        search,
        |g| fitness.evaluate(g),
        |g| duplicate_pairs(g) == 0,
    );
    if duplicate_pairs(&run.best) > 0 {
        return Err(Error::SearchFailed(format!(
            "best candidate still has duplicate codewords after {} generations; \
             raise the generation budget or the duplicate penalty",
            search.generations
        )));
    }
    Ok(SearchOutcome {
        codebook: Codebook::from_packed(space.clone(), n, run.best)?,
        generator: None,
        best_fitness: run.best_fitness,
        trace: run.trace,
        evaluations: run.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loss::LossSpec;

    fn small_search(seed: u64) -> SearchConfig {
        SearchConfig {
            population_size: 40,
            generations: 60,
            seed,
            ..Default::default()
        }
    }

    #[test]
    fn trace_is_nonincreasing() {
        let sp = SymbolSpace::unsigned(3).unwrap();
        let cfg = FitnessConfig::new(LossSpec::SquaredDiff, 1.0);
        let out = ga_optimize(&sp, 6, &cfg, &small_search(1)).unwrap();
        assert_eq!(out.trace.len(), 61);
        assert!(out.trace.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(*out.trace.last().unwrap(), out.best_fitness);
        assert!(out.codebook.min_distance() > 0);
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let sp = SymbolSpace::unsigned(3).unwrap();
        let cfg = FitnessConfig::new(LossSpec::AbsDiff, 1.0);
        let a = ga_optimize(&sp, 6, &cfg, &small_search(7)).unwrap();
        let b = ga_optimize(&sp, 6, &cfg, &small_search(7)).unwrap();
        assert_eq!(a.codebook, b.codebook);
        assert_eq!(a.trace, b.trace);
    }

    #[test]
    fn best_fitness_matches_returned_codebook() {
        let sp = SymbolSpace::twos_complement(3).unwrap();
        let cfg = FitnessConfig::new(LossSpec::SquaredDiff, 0.9);
        let out = ga_optimize(&sp, 6, &cfg, &small_search(3)).unwrap();
        let f = Fitness::new(&sp, 6, &cfg).unwrap();
        assert_eq!(f.evaluate(out.codebook.packed_rows()), out.best_fitness);
    }

    #[test]
    fn rejects_wrong_algorithm_and_impossible_sizes() {
        let sp = SymbolSpace::unsigned(3).unwrap();
        let cfg = FitnessConfig::new(LossSpec::AbsDiff, 1.0);
        assert!(ga_optimize(&sp, 6, &cfg, &SearchConfig::hill_climb()).is_err());
        assert!(ga_optimize(&sp, 2, &cfg, &small_search(0)).is_err());
    }

    #[test]
    fn exhausted_budget_with_duplicates_is_an_error() {
        // 4 symbols in 2 bits leaves no slack; with one generation and a
        // tiny population the search is unlikely to be duplicate free for
        // some seed, and when it is not the error must surface.
        let sp = SymbolSpace::unsigned(2).unwrap();
        let cfg = FitnessConfig::new(LossSpec::AbsDiff, 1.0);
        let mut saw_error = false;
        for seed in 0..200 {
            let search = SearchConfig {
                population_size: 2,
                generations: 0,
                elitism_count: 0,
                seed,
                ..Default::default()
            };
            match ga_optimize(&sp, 2, &cfg, &search) {
                Ok(out) => assert_eq!(duplicate_pairs(out.codebook.packed_rows()), 0),
                Err(Error::SearchFailed(_)) => saw_error = true,
                Err(e) => panic!("unexpected error {e}"),
            }
        }
        assert!(saw_error);
    }
}
