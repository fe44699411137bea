use std::time::Instant;

use serde::Serialize;

use super::{
    ga_optimize, ga_optimize_linear, hill_climb, Algorithm, FitnessConfig, SearchConfig,
    SearchOutcome,
};
use crate::error::{Error, Result};
use crate::symbols::{Signedness, SymbolSpace};

/// JSON-serializable record of one optimization run.
#[derive(Clone, Debug, Serialize)]
pub struct RunLedger {
    pub schema: u32,
    pub k: usize,
    pub signedness: Signedness,
    pub n: usize,
    pub linear: bool,
    pub fitness: FitnessConfig,
    pub search: SearchConfig,
    pub seed: u64,
    pub best_fitness: f64,
    pub evaluations: u64,
    pub wall_time_secs: f64,
    /// Best-so-far fitness per generation or restart.
    pub trace: Vec<f64>,
    pub codebook: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator: Option<String>,
}

/// Dispatches to the requested search and records a ledger for it.
pub fn run_search(
    space: &SymbolSpace,
    n: usize,
    cfg: &FitnessConfig,
    search: &SearchConfig,
    linear: bool,
) -> Result<(SearchOutcome, RunLedger)> {
    let start = Instant::now();
    let outcome = match (search.algorithm, linear) {
        (Algorithm::Ga, false) => ga_optimize(space, n, cfg, search)?,
        (Algorithm::Ga, true) => ga_optimize_linear(space, n, cfg, search)?,
        (Algorithm::HillClimb, false) => hill_climb(space, n, cfg, search)?,
        (Algorithm::HillClimb, true) => {
            return Err(Error::InvalidConfig(
                "linear search is only available with the genetic algorithm".into(),
            ))
        }
    };
    let ledger = RunLedger {
        schema: 1,
        k: space.k(),
        signedness: space.signedness(),
        n,
        linear,
        fitness: cfg.clone(),
        search: search.clone(),
        seed: search.seed,
        best_fitness: outcome.best_fitness,
        evaluations: outcome.evaluations,
        wall_time_secs: start.elapsed().as_secs_f64(),
        trace: outcome.trace.clone(),
        codebook: outcome.codebook.to_text(),
        generator: outcome.generator.as_ref().map(|g| g.to_text()),
    };
    Ok((outcome, ledger))
}
