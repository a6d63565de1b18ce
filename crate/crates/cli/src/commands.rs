use std::fs;

use hypersaw::experiments::{
    ballisticity_scan, beta_fit, run_verification, sample_walks, scaling_csv, scaling_sweep, scan_csv,
    speed_estimate, EpsRule, Normalization, ScalingPoint, ScanRow,
};
use hypersaw::rng::{replica_stream, stream_rng};
use hypersaw::samplers::{Chain, ChainCheckpoint};
use hypersaw::{Error, Result, SamplerKind, Walk};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Resolved;
use crate::output::{to_json, Run};

/// How a successful command ended.
#[derive(Debug, PartialEq, Eq)]
pub enum Outcome {
    Done,
    VerificationFailed,
}

pub const DEFAULT_ESTIMATE_SAMPLES: usize = 1_000;
pub const CHECKPOINT: &str = "checkpoint.json";

fn walk_file(index: usize) -> String {
    format!("walk_{index:06}.json")
}

fn write_walks(run: &mut Run, first: usize, walks: &[Walk]) -> Result<()> {
    for (k, w) in walks.iter().enumerate() {
        let mut text = w.to_json()?;
        text.push('\n');
        run.write(&walk_file(first + k), text.as_bytes())?;
    }
    Ok(())
}

fn say(cfg: &Resolved, line: impl AsRef<str>) {
    if !cfg.quiet {
        println!("{}", line.as_ref());
    }
}

pub fn sample(cfg: &Resolved) -> Result<Outcome> {
    let seed = cfg.require_seed()?;
    let params = &cfg.params;
    params.validate()?;
    let count = cfg.samples_or(1);
    let mut run = Run::start("sample", &cfg.out)?;
    let diagnostics = match params.sampler {
        SamplerKind::Rejection => {
            let drawn = sample_walks(params, count)?;
            write_walks(&mut run, 0, &drawn.walks)?;
            json!({ "attempts": drawn.attempts })
        }
        SamplerKind::Mcmc => {
            let mut chain = Chain::new(params, stream_rng(seed, replica_stream(params.n, 0)))?;
            let walks: Vec<Walk> = (0..count).map(|_| chain.next_sample().clone()).collect();
            write_walks(&mut run, 0, &walks)?;
            run.write(CHECKPOINT, &to_json(&chain.checkpoint())?)?;
            json!({ "chain": chain.stats() })
        }
    };
    let manifest = run.finish(params, cfg, diagnostics)?;
    say(cfg, format!("wrote {count} walks; manifest {}", manifest.display()));
    Ok(Outcome::Done)
}

pub fn resume(cfg: &Resolved) -> Result<Outcome> {
    let path = cfg
        .checkpoint
        .as_ref()
        .ok_or_else(|| Error::Config("resume needs --checkpoint or \"checkpoint\" in the config".into()))?;
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read checkpoint {}: {e}", path.display())))?;
    let cp: ChainCheckpoint = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("invalid checkpoint {}: {e}", path.display())))?;
    let params = cp.params.clone();
    let mut chain = Chain::resume(cp)?;
    let first = chain.emitted();
    let count = cfg.samples_or(1);
    let walks: Vec<Walk> = (0..count).map(|_| chain.next_sample().clone()).collect();
    let mut run = Run::start("resume", &cfg.out)?;
    write_walks(&mut run, first, &walks)?;
    run.write(CHECKPOINT, &to_json(&chain.checkpoint())?)?;
    let manifest = run.finish(&params, cfg, json!({ "chain": chain.stats(), "resumed_from": path }))?;
    say(cfg, format!("wrote walks {first}..{}; manifest {}", first + count, manifest.display()));
    Ok(Outcome::Done)
}

fn report_diagnostics(rows: &[ScanRow]) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| {
                json!({
                    "n": r.n,
                    "runtime_seconds": r.report.runtime_seconds,
                    "autocorrelation_time": r.report.autocorrelation_time,
                })
            })
            .collect(),
    )
}

pub fn speed(cfg: &Resolved) -> Result<Outcome> {
    cfg.require_seed()?;
    let params = &cfg.params;
    let report = speed_estimate(params, cfg.samples_or(DEFAULT_ESTIMATE_SAMPLES))?;
    let rows = [ScanRow { n: params.n, report }];
    let mut run = Run::start("speed", &cfg.out)?;
    run.write("speed.csv", scan_csv(&rows).as_bytes())?;
    run.finish(params, cfg, report_diagnostics(&rows))?;
    let r = &rows[0].report;
    say(cfg, format!("speed at n = {}: {} (95% CI {} .. {})", params.n, r.estimate, r.ci95.0, r.ci95.1));
    Ok(Outcome::Done)
}

pub fn scan(cfg: &Resolved) -> Result<Outcome> {
    cfg.require_seed()?;
    let n_values = cfg.require_n_values()?;
    let rows = ballisticity_scan(&cfg.params, &n_values, cfg.samples_or(DEFAULT_ESTIMATE_SAMPLES))?;
    let mut run = Run::start("scan", &cfg.out)?;
    run.write("scan.csv", scan_csv(&rows).as_bytes())?;
    run.finish(&cfg.params, cfg, report_diagnostics(&rows))?;
    for r in &rows {
        say(cfg, format!("n = {:>5}: speed {} (ci_low {})", r.n, r.report.estimate, r.report.ci95.0));
    }
    Ok(Outcome::Done)
}

/// Step from one sweep size to the next.
#[derive(Debug, Serialize)]
struct TrendStep {
    n_from: usize,
    n_to: usize,
    change: f64,
    combined_std_error: f64,
    /// `change <= 3 * combined_std_error`.
    nonincreasing_within_3se: bool,
}

#[derive(Debug, Serialize)]
struct ScalingSummary {
    eps_rule: EpsRule,
    normalization: Normalization,
    /// Fit under the configured normalization; `None` with fewer than 3 sizes.
    fit: Option<hypersaw::experiments::BetaFit>,
    raw_fit: Option<hypersaw::experiments::BetaFit>,
    rescaled_fit: Option<hypersaw::experiments::BetaFit>,
    trend: Vec<TrendStep>,
    nonincreasing_within_3se: bool,
}

fn summarize(points: &[ScalingPoint], rule: EpsRule, normalization: Normalization) -> ScalingSummary {
    let fit_with = |norm| (points.len() >= 3).then(|| beta_fit(points, norm).ok()).flatten();
    let trend: Vec<TrendStep> = points
        .windows(2)
        .map(|w| {
            let change = w[1].mean_displacement - w[0].mean_displacement;
            let se = w[0].report.std_error.hypot(w[1].report.std_error);
            TrendStep {
                n_from: w[0].n,
                n_to: w[1].n,
                change,
                combined_std_error: se,
                nonincreasing_within_3se: change <= 3.0 * se,
            }
        })
        .collect();
    ScalingSummary {
        eps_rule: rule,
        normalization,
        fit: fit_with(normalization),
        raw_fit: fit_with(Normalization::Raw),
        rescaled_fit: fit_with(Normalization::Rescaled),
        nonincreasing_within_3se: trend.iter().all(|t| t.nonincreasing_within_3se),
        trend,
    }
}

pub fn scaling(cfg: &Resolved) -> Result<Outcome> {
    cfg.require_seed()?;
    let n_values = cfg.require_n_values()?;
    let rule = cfg
        .eps_rule
        .ok_or_else(|| Error::Config("no eps rule given: pass --eps-rule or set \"eps_rule\"".into()))?;
    let points = scaling_sweep(&cfg.params, &n_values, rule, cfg.samples_or(DEFAULT_ESTIMATE_SAMPLES))?;
    let summary = summarize(&points, rule, cfg.normalization);
    let mut run = Run::start("scaling", &cfg.out)?;
    run.write("scaling.csv", scaling_csv(&points).as_bytes())?;
    run.write("scaling_fit.json", &to_json(&summary)?)?;
    let timings: Vec<Value> = points
        .iter()
        .map(|p| json!({ "n": p.n, "runtime_seconds": p.report.runtime_seconds }))
        .collect();
    run.finish(&cfg.params, cfg, Value::Array(timings))?;
    for p in &points {
        say(cfg, format!("n = {:>5}, eps = {}: mean displacement {}", p.n, p.eps, p.mean_displacement));
    }
    if let Some(f) = &summary.fit {
        say(cfg, format!("beta = {} (r^2 = {})", f.beta, f.r_squared));
    }
    Ok(Outcome::Done)
}

pub fn verify(cfg: &Resolved) -> Result<Outcome> {
    let seed = cfg.require_seed()?;
    let report = run_verification(&cfg.verify, seed)?;
    let mut run = Run::start("verify", &cfg.out)?;
    run.write("verify.json", &to_json(&report)?)?;
    run.finish(&cfg.verify.walk.clone().with_seed(seed), cfg, Value::Null)?;
    for s in &report.suites {
        let name = serde_json::to_value(s)?["suite"].as_str().unwrap_or("?").to_owned();
        say(cfg, format!("{} {name}", if s.pass() { "PASS" } else { "FAIL" }));
    }
    Ok(if report.pass { Outcome::Done } else { Outcome::VerificationFailed })
}

