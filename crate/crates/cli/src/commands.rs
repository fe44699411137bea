use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use log::info;
use sigecc::codes::{self, distance_profile, BASELINE_NAMES};
use sigecc::optimize::{run_search, Fitness};
use sigecc::sim::{self, DecoderKind, SimulationConfig};
use sigecc::{Codebook, LossSpec, SymbolSpace};

use crate::config::{self, CodebookSource, DecoderName, OptimizeConfig, SimulateConfig};
use crate::error::{CliError, CliResult};
use crate::manifest::{self, RunManifest};

/// Settings shared by every command.
pub struct Context {
    pub config: Option<PathBuf>,
    pub seed: Option<u64>,
    pub out: PathBuf,
}

/// Files written by a command, in write order.
#[derive(Default)]
pub struct Artifacts {
    files: BTreeMap<String, String>,
}

impl Artifacts {
    fn write(&mut self, out: &Path, name: &str, bytes: &[u8]) -> CliResult<()> {
        let path = out.join(name);
        fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        info!("wrote {}", path.display());
        self.files
            .insert(name.to_string(), manifest::sha256_hex(bytes));
        Ok(())
    }
}

fn require_config(ctx: &Context, command: &str) -> CliResult<PathBuf> {
    ctx.config
        .clone()
        .ok_or_else(|| CliError::Usage(format!("{command} needs --config <FILE>")))
}

fn prepare_out(out: &Path) -> CliResult<()> {
    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))
}

fn absolute(path: &Path) -> PathBuf {
    fs::canonicalize(path).unwrap_or_else(|_| path.to_path_buf())
}

fn finish(ctx: &Context, mut m: RunManifest, artifacts: Artifacts) -> CliResult<RunManifest> {
    m.out = ctx.out.clone();
    m.artifacts = artifacts.files;
    manifest::write(&ctx.out, &m)?;
    Ok(m)
}

fn blank_manifest(command: &str) -> RunManifest {
    RunManifest {
        schema: config::SCHEMA_VERSION,
        command: command.into(),
        config: None,
        input: None,
        seed: None,
        linear: false,
        out: PathBuf::new(),
        artifacts: BTreeMap::new(),
    }
}

pub fn optimize(ctx: &Context, linear_flag: bool) -> CliResult<RunManifest> {
    let path = require_config(ctx, "optimize")?;
    let (mut cfg, raw): (OptimizeConfig, _) = config::load(&path)?;
    config::check_schema(&path, cfg.schema)?;
    cfg.resolve_defaults(&raw);
    if let Some(seed) = ctx.seed {
        cfg.search.seed = seed;
    }
    let linear = linear_flag || cfg.linear;
    let space = SymbolSpace::new(cfg.k, cfg.signedness).map_err(CliError::usage)?;
    Fitness::new(&space, cfg.n, &cfg.fitness).map_err(CliError::usage)?;
    cfg.search.validate().map_err(CliError::usage)?;

    prepare_out(&ctx.out)?;
    let (outcome, ledger) =
        run_search(&space, cfg.n, &cfg.fitness, &cfg.search, linear).map_err(CliError::runtime)?;
    info!(
        "best fitness {:.6} after {} evaluations",
        outcome.best_fitness, outcome.evaluations
    );

    let mut artifacts = Artifacts::default();
    match &outcome.generator {
        Some(g) if linear => artifacts.write(&ctx.out, "generator.txt", g.to_text().as_bytes())?,
        _ => artifacts.write(
            &ctx.out,
            "codebook.txt",
            outcome.codebook.to_text().as_bytes(),
        )?,
    }
    let mut ledger_json = serde_json::to_string_pretty(&ledger).map_err(CliError::runtime)?;
    ledger_json.push('\n');
    artifacts.write(&ctx.out, "ledger.json", ledger_json.as_bytes())?;

    let mut m = blank_manifest("optimize");
    m.config = Some(absolute(&path));
    m.seed = Some(cfg.search.seed);
    m.linear = linear;
    finish(ctx, m, artifacts)
}

fn load_codebook(src: &CodebookSource, base: &Path) -> CliResult<Codebook> {
    match (&src.path, &src.baseline) {
        (Some(p), None) => read_codebook(&base.join(p)),
        (None, Some(name)) => baseline(name),
        _ => Err(CliError::Usage(format!(
            "codebook `{}`: give exactly one of `path` or `baseline`",
            src.id
        ))),
    }
}

fn read_codebook(path: &Path) -> CliResult<Codebook> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Codebook::parse_text(&text).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

fn baseline(name: &str) -> CliResult<Codebook> {
    codes::baseline(name).map_err(|_| {
        CliError::Usage(format!(
            "unknown baseline `{name}`, expected one of {}",
            BASELINE_NAMES.join(", ")
        ))
    })
}

fn check_loss(loss: &LossSpec, cb: &Codebook, id: &str, what: &str) -> CliResult<()> {
    loss.validate(cb.space())
        .map_err(|e| CliError::Usage(format!("codebook `{id}`: {what}: {e}")))
}

pub fn simulate(ctx: &Context) -> CliResult<RunManifest> {
    let path = require_config(ctx, "simulate")?;
    let (cfg, _): (SimulateConfig, _) = config::load(&path)?;
    config::check_schema(&path, cfg.schema)?;
    if cfg.codebooks.is_empty() || cfg.decoders.is_empty() {
        return Err(CliError::Usage(
            "need at least one codebook and one decoder".into(),
        ));
    }
    let mut ids = HashSet::new();
    for src in &cfg.codebooks {
        if !ids.insert(src.id.as_str()) {
            return Err(CliError::Usage(format!(
                "duplicate codebook id `{}`",
                src.id
            )));
        }
    }
    let seed = ctx.seed.unwrap_or(cfg.seed);
    let base = path.parent().unwrap_or(Path::new("."));
    let decoder_loss = cfg
        .decoder_loss
        .clone()
        .unwrap_or_else(|| cfg.metric.clone());

    let mut runs = Vec::new();
    for src in &cfg.codebooks {
        let cb = load_codebook(src, base)?;
        info!("codebook `{}` from {}", src.id, src.describe());
        check_loss(&cfg.metric, &cb, &src.id, "metric")?;
        for &name in &cfg.decoders {
            let decoder = match name {
                DecoderName::Hard => DecoderKind::Hard,
                DecoderName::Soft => DecoderKind::Soft,
                DecoderName::Bayes => DecoderKind::Bayes {
                    loss: decoder_loss.clone(),
                },
                DecoderName::BayesFast => DecoderKind::BayesFast {
                    loss: decoder_loss.clone(),
                },
            };
            if matches!(name, DecoderName::Bayes | DecoderName::BayesFast) {
                check_loss(&decoder_loss, &cb, &src.id, "decoder_loss")?;
            }
            runs.push(SimulationConfig {
                snr_db: cfg.snr_db.clone(),
                num_symbols: cfg.num_symbols,
                seed,
                sigma_source: cfg.sigma_source,
                ..SimulationConfig::new(src.id.clone(), cb.clone(), decoder, cfg.metric.clone())
            });
        }
    }

    prepare_out(&ctx.out)?;
    let rows = sim::sweep(&runs).map_err(|e| match e {
        sigecc::Error::InvalidConfig(_) | sigecc::Error::UnsupportedLoss(_) => CliError::usage(e),
        _ => CliError::runtime(e),
    })?;
    let mut csv = Vec::new();
    sim::write_csv(&rows, &mut csv).map_err(CliError::runtime)?;
    let mut artifacts = Artifacts::default();
    artifacts.write(&ctx.out, "results.csv", &csv)?;

    let mut m = blank_manifest("simulate");
    m.config = Some(absolute(&path));
    m.seed = Some(seed);
    finish(ctx, m, artifacts)
}

pub const PROFILE_HEADER: &str = "i,j,abs_value_diff,hamming_distance";

pub fn profile(ctx: &Context, codebook: &Path) -> CliResult<RunManifest> {
    let cb = read_codebook(codebook)?;
    prepare_out(&ctx.out)?;
    let mut csv = String::from(PROFILE_HEADER);
    csv.push('\n');
    for p in distance_profile(&cb) {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            p.i, p.j, p.value_diff, p.distance
        ));
    }
    let mut artifacts = Artifacts::default();
    artifacts.write(&ctx.out, "profile.csv", csv.as_bytes())?;
    let mut m = blank_manifest("profile");
    m.input = Some(absolute(codebook).display().to_string());
    finish(ctx, m, artifacts)
}

pub fn baselines(ctx: &Context, name: &str) -> CliResult<RunManifest> {
    let cb = baseline(name)?;
    prepare_out(&ctx.out)?;
    let mut artifacts = Artifacts::default();
    artifacts.write(&ctx.out, &format!("{name}.txt"), cb.to_text().as_bytes())?;
    let mut m = blank_manifest("baselines");
    m.input = Some(name.to_string());
    finish(ctx, m, artifacts)
}

/// Files whose bytes depend only on (config, seed).
fn deterministic(name: &str) -> bool {
    name != "ledger.json"
}

/// Re-runs a recorded command and checks the outputs against the recorded
/// checksums.
pub fn replay(manifest_path: &Path, out: Option<PathBuf>) -> CliResult<RunManifest> {
    let old = manifest::read(manifest_path)?;
    let ctx = Context {
        config: old.config.clone(),
        seed: old.seed,
        out: out.unwrap_or_else(|| old.out.clone()),
    };
    let input = || {
        old.input.clone().ok_or_else(|| {
            CliError::Usage(format!("{}: `input` is missing", manifest_path.display()))
        })
    };
    let new = match old.command.as_str() {
        "optimize" => optimize(&ctx, old.linear)?,
        "simulate" => simulate(&ctx)?,
        "profile" => profile(&ctx, Path::new(&input()?))?,
        "baselines" => baselines(&ctx, &input()?)?,
        other => return Err(CliError::Usage(format!("cannot replay command `{other}`"))),
    };
    for (name, sum) in old.artifacts.iter().filter(|(n, _)| deterministic(n)) {
        if new.artifacts.get(name) != Some(sum) {
            return Err(CliError::Runtime(format!(
                "replayed {name} differs from the recorded checksum"
            )));
        }
    }
    Ok(new)
}
