//! Estimators and error bars.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{usage, Error, Result};

/// How a standard error was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Iid,
    BatchMeans,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Iid => "iid",
            Method::BatchMeans => "batch_means",
        }
    }
}

/// A point estimate with its standard error and 95% interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub estimate: f64,
    pub std_error: f64,
    pub ci95: (f64, f64),
    pub n_samples: u64,
    pub method: Method,
    pub runtime_seconds: f64,
    /// Integrated autocorrelation time of the input series, batch-means estimate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub autocorrelation_time: Option<f64>,
}

impl EstimateReport {
    /// Rescales the estimate, its error and its interval by `factor > 0`.
    pub fn scaled(mut self, factor: f64) -> Self {
        self.estimate *= factor;
        self.std_error *= factor;
        self.ci95 = (self.ci95.0 * factor, self.ci95.1 * factor);
        self
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance; zero for fewer than two values.
pub fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Student-t quantile for a two-sided interval of coverage `level`.
pub fn t_quantile_at(df: usize, level: f64) -> f64 {
    StudentsT::new(0.0, 1.0, df.max(1) as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(0.5 + 0.5 * level)
}

/// The 95% two-sided Student-t quantile.
pub fn t_quantile(df: usize) -> f64 {
    t_quantile_at(df, 0.95)
}

fn report(estimate: f64, std_error: f64, df: usize, n: usize, method: Method) -> EstimateReport {
    let half = if std_error > 0.0 { t_quantile(df) * std_error } else { 0.0 };
    EstimateReport {
        estimate,
        std_error,
        ci95: (estimate - half, estimate + half),
        n_samples: n as u64,
        method,
        runtime_seconds: 0.0,
        autocorrelation_time: None,
    }
}

/// Mean with the i.i.d. standard error `s / sqrt(N)`.
pub fn iid_estimate(xs: &[f64]) -> Result<EstimateReport> {
    if xs.len() < 2 {
        return usage("an i.i.d. estimate needs at least two samples");
    }
    let se = (variance(xs) / xs.len() as f64).sqrt();
    Ok(report(mean(xs), se, xs.len() - 1, xs.len(), Method::Iid))
}

pub const MIN_BATCHES: usize = 20;

/// Batch-means summary of a correlated series.
#[derive(Clone, Debug, PartialEq)]
pub struct BatchMeans {
    pub batches: usize,
    pub batch_size: usize,
    pub mean: f64,
    pub std_error: f64,
    /// `batch_size * Var(batch means) / Var(series)`; `None` for a constant series.
    pub autocorrelation_time: Option<f64>,
}

/// Splits `xs` into `max(20, floor(sqrt N))` equal batches (capped at `N`),
/// dropping the leading remainder.
pub fn batch_means(xs: &[f64]) -> Result<BatchMeans> {
    let n = xs.len();
    if n < MIN_BATCHES {
        return usage(format!("batch means needs at least {MIN_BATCHES} samples, got {n}"));
    }
    let batches = MIN_BATCHES.max((n as f64).sqrt() as usize).min(n);
    let size = n / batches;
    let used = &xs[n - batches * size..];
    let means: Vec<f64> = used.chunks(size).map(mean).collect();
    let grand = mean(&means);
    let var_b = variance(&means);
    let var_x = variance(used);
    Ok(BatchMeans {
        batches,
        batch_size: size,
        mean: grand,
        std_error: (var_b / batches as f64).sqrt(),
        autocorrelation_time: (var_x > 0.0).then(|| size as f64 * var_b / var_x),
    })
}

pub fn batch_means_estimate(xs: &[f64]) -> Result<EstimateReport> {
    let bm = batch_means(xs)?;
    let mut r = report(bm.mean, bm.std_error, bm.batches - 1, bm.batches * bm.batch_size, Method::BatchMeans);
    r.autocorrelation_time = bm.autocorrelation_time;
    Ok(r)
}

/// Two-sample Kolmogorov-Smirnov statistic `sup |F_a - F_b|`.
pub fn ks_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Degenerate("KS distance of an empty sample".into()));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut best) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        best = best.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(best)
}

/// Ordinary least squares fit `y = intercept + slope x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn ols(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() || x.len() < 2 {
        return usage("least squares needs two equally long series of length >= 2");
    }
    let (mx, my) = (mean(x), mean(y));
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - sse / syy };
    Ok(LinearFit { slope, intercept, r_squared })
}
