use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use coprime_floors::counting::{
    density_experiment, direct_count_with, mobius_count_with, CountOptions, DensityOptions, InnerMethod,
};
use coprime_floors::dioph::{convergent_rows, convergents, estimate_type, find_window, TypeMode};
use coprime_floors::equidist::{
    default_koksma_constant, et_koksma_upper, linear_bound, linear_exact_check, monotone_check, monotone_sequence,
    nu_sequence, quadratic_bound, reciprocal_sum, weyl_bound_report, weyl_sum, WeylBoundOptions,
};
use coprime_floors::realnum::Real;

use crate::config::{parse_rational, BoundKind, Command, ExperimentConfig};
use crate::error::CliError;
use crate::output::Table;

/// Environment variable naming the fixture directory.
pub const FIXTURE_DIR_VAR: &str = "COPRIME_FIXTURE_DIR";

const CONSTANTS_FILE: &str = "empirical_constants.json";

#[derive(Debug, Clone, Serialize)]
pub struct FixtureUse {
    pub file: String,
    pub version: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: Command,
    pub config: Value,
    pub results: Value,
    pub fixtures: Vec<FixtureUse>,
    pub workers: usize,
    pub wall_time_s: f64,
}

#[derive(Deserialize)]
struct Constants {
    version: u64,
    quadratic_max_ratio: f64,
    reciprocal_max_ratio: f64,
}

pub fn fixture_dir() -> PathBuf {
    std::env::var_os(FIXTURE_DIR_VAR)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures"))
}

fn load_constants(used: &mut Vec<FixtureUse>) -> Result<Constants, CliError> {
    let path = fixture_dir().join(CONSTANTS_FILE);
    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliError::Config(format!("cannot read fixture {}: {e}", path.display())))?;
    let c: Constants = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("malformed fixture {}: {e}", path.display())))?;
    used.push(FixtureUse {
        file: CONSTANTS_FILE.into(),
        version: c.version,
    });
    Ok(c)
}

fn to_value<T: Serialize>(v: &T) -> Result<Value, CliError> {
    Ok(serde_json::to_value(v)?)
}

fn without_nulls(v: Value) -> Value {
    match v {
        Value::Object(map) => Value::Object(map.into_iter().filter(|(_, v)| !v.is_null()).collect()),
        other => other,
    }
}

fn real(cfg: &ExperimentConfig) -> Result<Real, CliError> {
    let r = Real::new(cfg.first_alpha()?)?;
    Ok(match cfg.max_bits {
        Some(b) => r.with_max_bits(b),
        None => r,
    })
}

struct Outcome {
    results: Value,
    table: Table,
}

fn count(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let p = cfg.problem()?;
    let x = ExperimentConfig::need(&cfg.x, "x")?;
    let workers = cfg.workers();
    let direct = direct_count_with(&p, x, CountOptions { workers, early_exit: true })?;
    let mobius = mobius_count_with(&p, x, cfg.cutoff, workers, InnerMethod::default())?;
    let mut table = Table::new(["x", "direct", "mobius"]);
    table.rows.push(vec![x.to_string(), direct.count.to_string(), mobius.count.to_string()]);
    let results = json!({
        "problem": p,
        "x": x,
        "count": direct.count,
        "direct": direct.count,
        "mobius": mobius.count,
        "agree": direct.count == mobius.count,
        "d_cutoff": mobius.d_cutoff,
        "cutoff_bound": mobius.cutoff_bound,
    });
    Ok(Outcome { results, table })
}

fn density(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let p = cfg.problem()?;
    let grid = ExperimentConfig::need(&cfg.grid, "grid")?;
    let opts = DensityOptions {
        workers: cfg.workers(),
        tau: cfg.tau.as_deref().map(parse_rational).transpose()?,
        tau_star: cfg.tau_star.as_deref().map(parse_rational).transpose()?,
    };
    let run = density_experiment(&p, &grid, &opts)?;
    let rows = run.rows();
    let mut table = Table::new(["x", "count", "density", "target", "abs_error"]);
    for r in &rows {
        let v = to_value(r)?;
        table.push_values(["x", "count", "density", "target", "abs_error"].iter().map(|k| &v[*k]));
    }
    let mut results = to_value(&run)?;
    results["rows"] = to_value(&rows)?;
    Ok(Outcome { results, table })
}

fn discrepancy(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let p = cfg.problem()?;
    let d = ExperimentConfig::need(&cfg.d, "d")?;
    let big_n = ExperimentConfig::need(&cfg.big_n, "N")?;
    let ps = nu_sequence(&p, d, big_n)?;
    let c = cfg.big_c.unwrap_or_else(|| default_koksma_constant(p.k()));
    let report = et_koksma_upper(&ps, cfg.big_h.unwrap_or(20), c)?;
    let k = p.k();
    let mut table = Table::new((1..=k).map(|j| format!("h_{j}")).chain(["magnitude".into(), "r_h".into()]));
    for t in &report.weyl_terms {
        let mut row: Vec<String> = t.h.iter().map(|h| h.to_string()).collect();
        row.push(Value::from(t.magnitude).to_string());
        row.push(Value::from(t.r_h).to_string());
        table.rows.push(row);
    }
    let mut results = to_value(&report)?;
    results["d"] = json!(d);
    Ok(Outcome { results, table })
}

fn weyl(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let big_n = ExperimentConfig::need(&cfg.big_n, "N")?;
    let results = match &cfg.hvec {
        Some(hvec) => {
            let p = cfg.problem()?;
            to_value(&weyl_sum(&p, cfg.d.unwrap_or(1), hvec, big_n)?)?
        }
        None => {
            let opts = WeylBoundOptions {
                q: cfg.q.map(u128::from),
                epsilon: cfg.epsilon,
            };
            let r = weyl_bound_report(
                &cfg.first_alpha()?,
                ExperimentConfig::need(&cfg.degree, "degree")?,
                ExperimentConfig::need(&cfg.h, "h")?,
                big_n,
                &cfg.g_poly(),
                &opts,
            )?;
            to_value(&r)?
        }
    };
    let table = Table::fields(&results);
    Ok(Outcome { results, table })
}

fn bounds(cfg: &ExperimentConfig, fixtures: &mut Vec<FixtureUse>) -> Result<Outcome, CliError> {
    fn need<T: Clone>(f: &Option<T>, name: &str) -> Result<T, CliError> {
        ExperimentConfig::need(f, name)
    }
    let results = match need(&cfg.bound, "bound")? {
        BoundKind::Linear => {
            let h = need(&cfg.h, "h")?;
            let big_n = need(&cfg.big_n, "N")?;
            let mut v = json!({
                "bound": "linear",
                "q": cfg.q,
                "h": h,
                "N": big_n,
                "value": linear_bound(need(&cfg.q, "q")?, h, big_n)?,
            });
            if cfg.alpha.is_some() {
                v["check"] = to_value(&linear_exact_check(&cfg.first_alpha()?, h, big_n)?)?;
            }
            v
        }
        BoundKind::Quadratic => {
            let c = load_constants(fixtures)?;
            let r = quadratic_bound(
                &cfg.first_alpha()?,
                need(&cfg.h, "h")?,
                cfg.d.unwrap_or(1),
                need(&cfg.big_n, "N")?,
                &cfg.g_poly(),
            )?;
            let mut v = to_value(&r)?;
            v["bound"] = json!("quadratic");
            v["pinned_max_ratio"] = json!(c.quadratic_max_ratio);
            v
        }
        BoundKind::Reciprocal => {
            let c = load_constants(fixtures)?;
            let r = reciprocal_sum(
                &cfg.first_alpha()?,
                need(&cfg.big_k, "K")?,
                need(&cfg.big_n, "N")?,
                cfg.q.map(u128::from),
            )?;
            let mut v = to_value(&r)?;
            v["bound"] = json!("reciprocal");
            v["pinned_max_ratio"] = json!(c.reciprocal_max_ratio);
            v
        }
        BoundKind::Monotone => {
            let (u, v, m) = (need(&cfg.u, "u")?, need(&cfg.v, "v")?, need(&cfg.big_m, "M")?);
            let variant = need(&cfg.variant, "variant")?;
            json!({
                "bound": "monotone",
                "variant": variant,
                "u": u,
                "v": v,
                "M": m,
                "log_values": monotone_sequence(u, v, m, variant)?,
                "nondecreasing": monotone_check(u, v, m, variant)?,
            })
        }
    };
    let table = Table::fields(&results);
    Ok(Outcome { results, table })
}

fn dioph(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let alpha = real(cfg)?;
    let max_q = u128::from(ExperimentConfig::need(&cfg.max_q, "max_q")?);
    let mode = cfg.mode.unwrap_or(TypeMode::Polynomial);
    let cs = convergents(&alpha, max_q)?;
    let rows = convergent_rows(&cs.list);
    let mut results = json!({
        "alpha": alpha.spec(),
        "max_q": max_q,
        "terminated": cs.terminated,
        "convergents": rows,
    });
    // A type estimate needs at least two convergents past q = 1.
    if cs.list.iter().filter(|c| c.q >= 2).count() >= 2 {
        results["type"] = to_value(&estimate_type(&alpha, max_q, mode)?)?;
    }
    if let Some(big_q) = cfg.big_q {
        let w = find_window(&alpha, big_q, cfg.varpi.unwrap_or(0.5), mode)?;
        results["window"] = to_value(&w)?;
    }
    let mut table = Table::new(["index", "a", "q", "log_ratio", "quality_lo", "quality_hi"]);
    for r in &rows {
        let v = to_value(r)?;
        table.push_values(["index", "a", "q", "log_ratio", "quality_lo", "quality_hi"].iter().map(|k| &v[*k]));
    }
    Ok(Outcome { results, table })
}

/// Validates `cfg`, runs `command` on a pool of `cfg.workers` threads and
/// returns the report with its CSV table.
pub fn run(command: Command, cfg: &ExperimentConfig) -> Result<(RunReport, Table), CliError> {
    if cfg.command.is_some_and(|c| c != command) {
        return Err(CliError::Config(format!(
            "config is for `{}`, not `{}`",
            to_value(&cfg.command)?.as_str().unwrap_or_default(),
            to_value(&command)?.as_str().unwrap_or_default()
        )));
    }
    cfg.validate(command)?;
    let workers = cfg.workers();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| coprime_floors::Error::ResourceLimit(format!("cannot start {workers} workers: {e}")))?;
    let start = Instant::now();
    let mut fixtures = Vec::new();
    let outcome = pool.install(|| match command {
        Command::Count => count(cfg),
        Command::Density => density(cfg),
        Command::Discrepancy => discrepancy(cfg),
        Command::Weyl => weyl(cfg),
        Command::Bounds => bounds(cfg, &mut fixtures),
        Command::Dioph => dioph(cfg),
    })?;
    let report = RunReport {
        command,
        config: without_nulls(to_value(cfg)?),
        results: outcome.results,
        fixtures,
        workers,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    Ok((report, outcome.table))
}
