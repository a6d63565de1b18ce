use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::estimates::{check_ascending, displacement_estimate};
use crate::error::{usage, Error, Result};
use crate::stats::{ols, EstimateReport, LinearFit};
use crate::walk::{SawParams, Walk};

/// Step length as a function of the number of steps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "lowercase")]
pub enum EpsRule {
    /// `eps` independent of `n`.
    Const { eps: f64 },
    /// `eps = 1 / n`.
    Inverse,
    /// `eps = n^(-beta0)`.
    Power { beta0: f64 },
}

impl EpsRule {
    pub fn eps(&self, n: usize) -> f64 {
        match *self {
            EpsRule::Const { eps } => eps,
            EpsRule::Inverse => 1.0 / n as f64,
            EpsRule::Power { beta0 } => (n as f64).powf(-beta0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            EpsRule::Const { eps } if !(eps > 0.0 && eps.is_finite()) => {
                Err(Error::Config(format!("const rule needs eps > 0, got {eps}")))
            }
            EpsRule::Power { beta0 } if !beta0.is_finite() => Err(Error::Config("power rule needs a finite beta0".into())),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for EpsRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EpsRule::Const { eps } => write!(f, "const:{eps}"),
            EpsRule::Inverse => write!(f, "inverse"),
            EpsRule::Power { beta0 } => write!(f, "power:{beta0}"),
        }
    }
}

/// Parses `const:EPS`, `inverse` or `power:BETA0`.
impl FromStr for EpsRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("unrecognized eps rule '{s}' (expected const:EPS, inverse or power:BETA0)"));
        let rule = match s.split_once(':') {
            None if s == "inverse" => EpsRule::Inverse,
            Some(("const", v)) => EpsRule::Const { eps: v.parse().map_err(|_| bad())? },
            Some(("power", v)) => EpsRule::Power { beta0: v.parse().map_err(|_| bad())? },
            _ => return Err(bad()),
        };
        rule.validate()?;
        Ok(rule)
    }
}

/// One size of a scaling sweep. `mean_displacement` is the unscaled `d(x_0, x_n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub n: usize,
    pub eps: f64,
    pub mean_displacement: f64,
    pub report: EstimateReport,
}

/// Displacement estimates with step length `rule.eps(n)` and avoidance
/// radius `c * rule.eps(n)` for every `n`. Sampler, seed and chain settings
/// come from `base`; the streams are keyed by `n`, so the `const` rule with
/// `base.eps` reproduces [`super::ballisticity_scan`].
pub fn scaling_sweep(base: &SawParams, n_values: &[usize], rule: EpsRule, n_samples: usize) -> Result<Vec<ScalingPoint>> {
    check_ascending(n_values)?;
    rule.validate()?;
    n_values
        .par_iter()
        .map(|&n| {
            let eps = rule.eps(n);
            let p = base.clone().with_n(n).with_eps(eps);
            let report = displacement_estimate(&p, n_samples)?;
            Ok(ScalingPoint {
                n,
                eps,
                mean_displacement: report.estimate,
                report,
            })
        })
        .collect()
}

pub const SCALING_HEADER: &str = "n,eps,mean_displacement,std_error,ci_low,ci_high,method,samples";

pub fn scaling_csv(points: &[ScalingPoint]) -> String {
    let mut out = String::from(SCALING_HEADER);
    out.push('\n');
    for p in points {
        let r = &p.report;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            p.n,
            p.eps,
            p.mean_displacement,
            r.std_error,
            r.ci95.0,
            r.ci95.1,
            r.method.as_str(),
            r.n_samples
        ));
    }
    out
}

/// What is regressed on `log n` in a β fit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// `d(x_0, x_n)` itself.
    #[default]
    Raw,
    /// `d(x_0, x_n) / eps`, the displacement measured in units of the step.
    Rescaled,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaFit {
    pub beta: f64,
    pub r_squared: f64,
    pub intercept: f64,
    pub normalization: Normalization,
    /// Fit of `log(y / log n)` on `log n`, i.e. a power law times one
    /// logarithm; `None` when some `n < 2`.
    pub log_corrected: Option<LinearFit>,
}

/// Least-squares slope of `log y` against `log n`, `y` chosen by `normalization`.
pub fn beta_fit(points: &[ScalingPoint], normalization: Normalization) -> Result<BetaFit> {
    if points.len() < 3 {
        return usage("beta_fit needs at least 3 points");
    }
    let mut ns: Vec<usize> = points.iter().map(|p| p.n).collect();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() != points.len() {
        return usage("beta_fit needs distinct n values");
    }
    let mut x = Vec::with_capacity(points.len());
    let mut y = Vec::with_capacity(points.len());
    for p in points {
        let v = match normalization {
            Normalization::Raw => p.mean_displacement,
            Normalization::Rescaled => p.mean_displacement / p.eps,
        };
        if !(v > 0.0) {
            return usage(format!("non-positive displacement {v} at n = {}", p.n));
        }
        x.push((p.n as f64).ln());
        y.push(v.ln());
    }
    let fit = ols(&x, &y)?;
    let log_corrected = if points.iter().all(|p| p.n >= 2) {
        let yc: Vec<f64> = y.iter().zip(&x).map(|(v, ln_n)| v - ln_n.ln()).collect();
        Some(ols(&x, &yc)?)
    } else {
        None
    };
    Ok(BetaFit {
        beta: fit.slope,
        r_squared: fit.r_squared,
        intercept: fit.intercept,
        normalization,
        log_corrected,
    })
}

/// End-to-end distance of the walk with the given frame-relative directions
/// and unit steps on the hyperboloid of radius `radius` (curvature
/// `-1/radius^2`), developed with explicit tangent frames.
pub fn displacement_on_scaled_space(directions: &[Vec<f64>], radius: f64) -> Result<f64> {
    let d = directions.first().map_or(0, Vec::len);
    if d < 2 || !(radius > 0.0) {
        return usage("need d >= 2 and a positive radius");
    }
    let mink = |a: &[f64], b: &[f64]| -a[0] * b[0] + a[1..].iter().zip(&b[1..]).map(|(p, q)| p * q).sum::<f64>();
    let mut x = vec![0.0; d + 1];
    x[0] = radius;
    let mut frame: Vec<Vec<f64>> = (0..d)
        .map(|i| {
            let mut e = vec![0.0; d + 1];
            e[i + 1] = 1.0;
            e
        })
        .collect();
    let (ch, sh) = ((1.0 / radius).cosh(), (1.0 / radius).sinh());
    for u in directions {
        if u.len() != d {
            return usage("directions of unequal length");
        }
        let v: Vec<f64> = (0..=d).map(|r| (0..d).map(|i| u[i] * frame[i][r]).sum()).collect();
        let velocity: Vec<f64> = (0..=d).map(|r| sh / radius * x[r] + ch * v[r]).collect();
        for f in frame.iter_mut() {
            let along = mink(f, &v);
            for r in 0..=d {
                f[r] += along * (velocity[r] - v[r]);
            }
        }
        for r in 0..=d {
            x[r] = ch * x[r] + radius * sh * v[r];
        }
    }
    let mut o = vec![0.0; d + 1];
    o[0] = radius;
    let cosh_ratio = -mink(&o, &x) / (radius * radius);
    Ok(radius * cosh_ratio.max(1.0).acosh())
}

/// Worst violation of `d(x_0, x_n) = eps d_eps(x_0, x_n)` over `walks`, where
/// `d_eps` is measured on the walk with unit steps on `(1/eps) H^d`.
/// Self-avoidance transfers too: radius `c eps` on `H^d` is radius `c` there.
pub fn rescaling_identity_error(walks: &[Walk]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for w in walks {
        let eps = w.eps();
        let scaled = displacement_on_scaled_space(&w.directions(), 1.0 / eps)?;
        worst = worst.max((w.displacement() - eps * scaled).abs());
    }
    Ok(worst)
}
