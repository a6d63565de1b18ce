use serde::{Deserialize, Serialize};

use super::estimates::sample_walks;
use crate::analysis::{
    estimate_delta, near_count, near_geodesic_fraction, surface_density, verify_two_geodesics, DeltaEstimate,
    TwoGeodesicsConfig, TwoGeodesicsReport,
};
use crate::error::{usage, Result};
use crate::stats::{batch_means, iid_estimate, mean, t_quantile_at, Method};
use crate::walk::{SawParams, Walk};

/// Vertices near the end-to-end chord and the chord length: the quantities
/// behind the disjoint-ball area count.
pub fn ball_packing_statistic(walk: &Walk, radius: f64) -> Result<(usize, f64)> {
    Ok((near_count(walk, radius)?, walk.displacement()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub samples: usize,
    pub threshold: f64,
    pub min_fraction: f64,
    /// Mean fraction: the empirical constant `c_1`.
    pub mean_fraction: f64,
    pub all_positive: bool,
    pub fractions: Vec<f64>,
}

/// Hull-boundary density of `samples` sampled walks (d = 2).
pub fn surface_density_study(params: &SawParams, samples: usize) -> Result<DensityReport> {
    if samples == 0 {
        return usage("need at least one sample");
    }
    let walks = sample_walks(params, samples)?.walks;
    let mut fractions = Vec::with_capacity(samples);
    let mut threshold = 0.0;
    for w in &walks {
        let (f, t) = surface_density(w)?;
        fractions.push(f);
        threshold = t;
    }
    let min_fraction = fractions.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(DensityReport {
        samples,
        threshold,
        min_fraction,
        mean_fraction: mean(&fractions),
        all_positive: min_fraction > 0.0,
        fractions,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NearGeodesicReport {
    pub samples: usize,
    pub radius: f64,
    pub mean_fraction: f64,
    pub std_error: f64,
    pub method: Method,
    /// Lower end of the two-sided 99% interval of the mean fraction.
    pub ci99_low: f64,
    /// Mean of `near_count / d(x_0, x_n)`, the per-length density.
    pub mean_density_per_length: f64,
    pub min_gap_ok: bool,
}

/// Fraction of vertices within `radius` of `[x_0, x_n]` over sampled walks.
pub fn near_geodesic_study(params: &SawParams, radius: f64, samples: usize) -> Result<NearGeodesicReport> {
    let drawn = sample_walks(params, samples)?;
    let mut fractions = Vec::with_capacity(samples);
    let mut densities = Vec::with_capacity(samples);
    let mut min_gap_ok = true;
    for w in &drawn.walks {
        fractions.push(near_geodesic_fraction(w, radius)?);
        let (count, length) = ball_packing_statistic(w, radius)?;
        densities.push(count as f64 / length);
        if w.n() >= 2 {
            min_gap_ok &= w.min_pairwise_gap()?.0 > w.params().avoidance_radius();
        }
    }
    let (m, se, df) = match drawn.method {
        Method::Iid => {
            let r = iid_estimate(&fractions)?;
            (r.estimate, r.std_error, samples - 1)
        }
        Method::BatchMeans => {
            let b = batch_means(&fractions)?;
            (b.mean, b.std_error, b.batches - 1)
        }
    };
    Ok(NearGeodesicReport {
        samples,
        radius,
        mean_fraction: m,
        std_error: se,
        method: drawn.method,
        ci99_low: m - t_quantile_at(df, 0.99) * se,
        mean_density_per_length: mean(&densities),
        min_gap_ok,
    })
}

/// Settings of the geometric verification suites.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub delta: f64,
    pub delta_samples: u64,
    pub radius_cap: f64,
    pub two_geodesics_trials: u64,
    pub separation: f64,
    pub half_length: f64,
    /// Walk parameters for the density and near-chord suites.
    pub walk: SawParams,
    pub density_samples: usize,
    pub near_samples: usize,
    /// Distance to the chord below which a vertex counts as near.
    pub near_radius: f64,
    pub suites: Vec<Suite>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            delta: 0.89,
            delta_samples: 10_000,
            radius_cap: 20.0,
            two_geodesics_trials: 1_000,
            separation: 3.0,
            half_length: 50.0,
            walk: SawParams::new(2, 0.5, 50).with_sampler(crate::walk::SamplerKind::Mcmc),
            density_samples: 100,
            near_samples: 1_000,
            near_radius: 2.0,
            suites: vec![Suite::Delta, Suite::TwoGeodesics, Suite::HullDensity, Suite::NearGeodesic],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Delta,
    TwoGeodesics,
    HullDensity,
    NearGeodesic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "suite", rename_all = "snake_case")]
pub enum SuiteResult {
    Delta {
        pass: bool,
        threshold: f64,
        estimate: DeltaEstimate,
    },
    TwoGeodesics {
        pass: bool,
        report: TwoGeodesicsReport,
    },
    HullDensity {
        pass: bool,
        geodesic_fixture_fraction: f64,
        report: DensityReport,
    },
    NearGeodesic {
        pass: bool,
        report: NearGeodesicReport,
    },
}

impl SuiteResult {
    pub fn pass(&self) -> bool {
        match self {
            SuiteResult::Delta { pass, .. }
            | SuiteResult::TwoGeodesics { pass, .. }
            | SuiteResult::HullDensity { pass, .. }
            | SuiteResult::NearGeodesic { pass, .. } => *pass,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub pass: bool,
    pub suites: Vec<SuiteResult>,
}

/// Runs the requested suites with all randomness derived from `seed`.
pub fn run_verification(cfg: &VerifyConfig, seed: u64) -> Result<VerificationReport> {
    let walk_params = cfg.walk.clone().with_seed(seed);
    let mut suites = Vec::new();
    for suite in &cfg.suites {
        let result = match suite {
            Suite::Delta => {
                let estimate = estimate_delta(2, cfg.delta_samples, cfg.radius_cap, seed)?;
                SuiteResult::Delta {
                    pass: estimate.max_observed <= cfg.delta,
                    threshold: cfg.delta,
                    estimate,
                }
            }
            Suite::TwoGeodesics => {
                let mut g = TwoGeodesicsConfig::new(2, cfg.delta, cfg.two_geodesics_trials);
                g.separation = cfg.separation;
                g.half_length = cfg.half_length;
                let report = verify_two_geodesics(&g, seed)?;
                SuiteResult::TwoGeodesics {
                    pass: report.pass,
                    report,
                }
            }
            Suite::HullDensity => {
                let fixture = Walk::geodesic(&walk_params)?;
                let fixture_fraction = surface_density(&fixture)?.0;
                let report = surface_density_study(&walk_params, cfg.density_samples)?;
                SuiteResult::HullDensity {
                    pass: fixture_fraction == 1.0 && report.all_positive,
                    geodesic_fixture_fraction: fixture_fraction,
                    report,
                }
            }
            Suite::NearGeodesic => {
                let report = near_geodesic_study(&walk_params, cfg.near_radius, cfg.near_samples)?;
                SuiteResult::NearGeodesic {
                    pass: report.ci99_low > 0.0 && report.min_gap_ok,
                    report,
                }
            }
        };
        suites.push(result);
    }
    Ok(VerificationReport {
        pass: suites.iter().all(SuiteResult::pass),
        suites,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::SamplerKind;

    #[test]
    fn geodesic_packing() {
        let w = Walk::geodesic(&SawParams::new(2, 0.5, 6).with_eps(0.5)).unwrap();
        let (count, len) = ball_packing_statistic(&w, 0.0).unwrap();
        assert_eq!(count, 7);
        assert!((len - 3.0).abs() < 1e-12);
    }

    #[test]
    fn small_density_study() {
        let p = SawParams::new(2, 0.5, 8).with_seed(2);
        let r = surface_density_study(&p, 5).unwrap();
        assert_eq!(r.fractions.len(), 5);
        assert!(r.fractions.iter().all(|f| (0.0..=1.0).contains(f)));
        assert_eq!(r.threshold, 0.25);
    }

    #[test]
    fn small_near_study() {
        let p = SawParams::new(2, 0.5, 6).with_seed(4).with_sampler(SamplerKind::Mcmc);
        let r = near_geodesic_study(&p, 1.0, 40).unwrap();
        assert!(r.mean_fraction >= 2.0 / 7.0);
        assert!(r.min_gap_ok);
        assert_eq!(r.method, Method::BatchMeans);
    }

    #[test]
    fn quick_verification_run() {
        let cfg = VerifyConfig {
            delta_samples: 50,
            two_geodesics_trials: 5,
            walk: SawParams::new(2, 0.5, 6).with_sampler(SamplerKind::Mcmc),
            density_samples: 5,
            near_samples: 40,
            ..VerifyConfig::default()
        };
        let r = run_verification(&cfg, 1).unwrap();
        assert_eq!(r.suites.len(), 4);
        assert!(r.pass);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["suites"][0]["suite"], "delta");
    }
}
