use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Result};
use crate::rng::{replica_stream, stream_rng};
use crate::samplers::{rejection_sample, Chain, ChainStats};
use crate::stats::{batch_means_estimate, iid_estimate, EstimateReport, Method};
use crate::walk::{SamplerKind, SawParams, Walk};

/// Smallest sample count accepted by the estimators.
pub const MIN_SAMPLES: usize = 10;

/// Walks drawn for one parameter set, with provenance of the randomness.
#[derive(Clone, Debug)]
pub struct WalkSample {
    pub walks: Vec<Walk>,
    pub method: Method,
    pub chain: Option<ChainStats>,
    /// Total rejection attempts, for the i.i.d. sampler.
    pub attempts: Option<u64>,
}

/// Draws `count` walks. Rejection replica `k` uses stream `(n, k)`, the MCMC
/// chain uses stream `(n, 0)`; the streams depend on `n` and the seed only,
/// so runs that share them see identical randomness.
pub fn sample_walks(params: &SawParams, count: usize) -> Result<WalkSample> {
    params.validate()?;
    match params.sampler {
        SamplerKind::Rejection => {
            let draws: Vec<(Walk, u64)> = (0..count as u64)
                .into_par_iter()
                .map(|k| rejection_sample(params, &mut stream_rng(params.seed, replica_stream(params.n, k))))
                .collect::<Result<_>>()?;
            let attempts = draws.iter().map(|(_, a)| a).sum();
            Ok(WalkSample {
                walks: draws.into_iter().map(|(w, _)| w).collect(),
                method: Method::Iid,
                chain: None,
                attempts: Some(attempts),
            })
        }
        SamplerKind::Mcmc => {
            let mut chain = Chain::new(params, stream_rng(params.seed, replica_stream(params.n, 0)))?;
            let walks = (0..count).map(|_| chain.next_sample().clone()).collect();
            Ok(WalkSample {
                walks,
                method: Method::BatchMeans,
                chain: Some(chain.stats()),
                attempts: None,
            })
        }
    }
}

/// End-to-end displacements `d(x_0, x_n)` of `count` sampled walks.
pub fn sample_displacements(params: &SawParams, count: usize) -> Result<(Vec<f64>, Method)> {
    let s = sample_walks(params, count)?;
    Ok((s.walks.iter().map(Walk::displacement).collect(), s.method))
}

fn summarize(values: &[f64], method: Method) -> Result<EstimateReport> {
    match method {
        Method::Iid => iid_estimate(values),
        Method::BatchMeans => batch_means_estimate(values),
    }
}

fn method_of(params: &SawParams) -> Method {
    match params.sampler {
        SamplerKind::Rejection => Method::Iid,
        SamplerKind::Mcmc => Method::BatchMeans,
    }
}

/// Estimate of `E[d(x_0, x_n)]`. For `n = 1` the displacement is `eps`
/// deterministically and is reported exactly.
pub fn displacement_estimate(params: &SawParams, n_samples: usize) -> Result<EstimateReport> {
    params.validate()?;
    if n_samples < MIN_SAMPLES {
        return usage(format!("need at least {MIN_SAMPLES} samples, got {n_samples}"));
    }
    let start = Instant::now();
    let mut report = if params.n == 1 {
        EstimateReport {
            estimate: params.eps,
            std_error: 0.0,
            ci95: (params.eps, params.eps),
            n_samples: n_samples as u64,
            method: method_of(params),
            runtime_seconds: 0.0,
            autocorrelation_time: None,
        }
    } else {
        let (values, method) = sample_displacements(params, n_samples)?;
        summarize(&values, method)?
    };
    report.runtime_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Estimate of the speed `E[d(x_0, x_n)] / n`.
pub fn speed_estimate(params: &SawParams, n_samples: usize) -> Result<EstimateReport> {
    Ok(displacement_estimate(params, n_samples)?.scaled(1.0 / params.n as f64))
}

/// One row of a ballisticity scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub n: usize,
    pub report: EstimateReport,
}

pub(crate) fn check_ascending(n_values: &[usize]) -> Result<()> {
    if n_values.is_empty() {
        return usage("n_values must not be empty");
    }
    if n_values.windows(2).any(|w| w[0] >= w[1]) || n_values[0] == 0 {
        return usage("n_values must be positive and strictly ascending");
    }
    Ok(())
}

/// Speed estimates for every `n` in `n_values`, computed in parallel and
/// returned in the order of `n_values`.
pub fn ballisticity_scan(base: &SawParams, n_values: &[usize], n_samples: usize) -> Result<Vec<ScanRow>> {
    check_ascending(n_values)?;
    n_values
        .par_iter()
        .map(|&n| {
            let p = base.clone().with_n(n);
            Ok(ScanRow {
                n,
                report: speed_estimate(&p, n_samples)?,
            })
        })
        .collect()
}

pub const SCAN_HEADER: &str = "n,estimate,std_error,ci_low,ci_high,method,samples";

/// The scan as CSV with header [`SCAN_HEADER`].
pub fn scan_csv(rows: &[ScanRow]) -> String {
    let mut out = String::from(SCAN_HEADER);
    out.push('\n');
    for r in rows {
        let e = &r.report;
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.n,
            e.estimate,
            e.std_error,
            e.ci95.0,
            e.ci95.1,
            e.method.as_str(),
            e.n_samples
        ));
    }
    out
}
