//! Genetic search over generator matrices of linear codes.

use super::ga::evolve;
use super::{check_dimensions, Algorithm, Fitness, FitnessConfig, SearchConfig, SearchOutcome};
use crate::codes::{from_generator, gf2_rank, span_all, GeneratorMatrix};
use crate::error::{Error, Result};
use crate::symbols::SymbolSpace;

/// Evolves k×n generator matrices; a rank-deficient matrix spans duplicate
/// codewords and is penalized through the ordinary fitness.
pub fn ga_optimize_linear(
    space: &SymbolSpace,
    n: usize,
    cfg: &FitnessConfig,
    search: &SearchConfig,
) -> Result<SearchOutcome> {
    if search.algorithm != Algorithm::Ga {
        return Err(Error::InvalidConfig(
            "ga_optimize_linear needs algorithm = ga".into(),
        ));
    }
    search.validate()?;
    check_dimensions(space, n)?;
    if space.m() != 1usize << space.k() {
        return Err(Error::InvalidConfig(
            "linear codes need a full 2^k symbol space".into(),
        ));
    }
    let k = space.k();
    let fitness = Fitness::new(space, n, cfg)?;
    let run = evolve(
        k,
        n,
        search,
        |g| {
            let mut words = Vec::with_capacity(1 << k);
            span_all(g, &mut words);
            fitness.evaluate(&words)
        },
        |g| gf2_rank(g) == k,
    );
    if gf2_rank(&run.best) < k {
        return Err(Error::SearchFailed(format!(
            "no full-rank generator found in {} generations",
            search.generations
        )));
    }
    let generator = GeneratorMatrix::from_packed(n, run.best)?;
    Ok(SearchOutcome {
        codebook: from_generator(&generator, space)?,
        generator: Some(generator),
        best_fitness: run.best_fitness,
        trace: run.trace,
        evaluations: run.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loss::LossSpec;

    #[test]
    fn returns_full_rank_generator() {
        let sp = SymbolSpace::unsigned(4).unwrap();
        let cfg = FitnessConfig::new(LossSpec::SquaredDiff, 1.0);
        let search = SearchConfig {
            population_size: 50,
            generations: 50,
            seed: 4,
            ..Default::default()
        };
        let out = ga_optimize_linear(&sp, 7, &cfg, &search).unwrap();
        let g = out.generator.unwrap();
        assert_eq!((g.k(), g.n(), g.rank()), (4, 7, 4));
        let f = Fitness::new(&sp, 7, &cfg).unwrap();
        assert_eq!(f.evaluate(out.codebook.packed_rows()), out.best_fitness);
        assert!(out.trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn chromosome_is_much_shorter_than_general_search() {
        // k·n bits for a generator against m·n bits for a full codebook
        let (k, n, m) = (4usize, 7usize, 16usize);
        assert_eq!(k * n, 28);
        assert_eq!(m * n, 112);
    }

    #[test]
    fn custom_spaces_rejected() {
        let sp =
            SymbolSpace::custom(2, crate::symbols::Signedness::Unsigned, vec![0, 1, 2]).unwrap();
        let cfg = FitnessConfig::new(LossSpec::AbsDiff, 1.0);
        assert!(ga_optimize_linear(&sp, 3, &cfg, &SearchConfig::default()).is_err());
    }
}
