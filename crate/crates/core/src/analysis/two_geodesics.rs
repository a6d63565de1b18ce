//! Numerical check that a geodesic joining two far-apart bi-infinite
//! geodesics passes within `2 delta` of their common perpendicular.
//!
//! Set-up: `x_0 = o` and `y_0 = (cosh D, sinh D, 0, ...)`. Geodesic `A` runs
//! through `o` in a direction `a` orthogonal to `e_1`, geodesic `B` through
//! `y_0` in a direction `b` orthogonal to `e_1`, so the segment `[x_0, y_0]`
//! meets both at right angles and realizes `dist(A, B) = D`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Result};
use crate::hyperbolic::{dist_coords, random_unit_direction};
use crate::rng::stream_rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoGeodesicsConfig {
    pub d: usize,
    pub delta: f64,
    /// Distance `D` between the two geodesics; must exceed `3 delta`.
    pub separation: f64,
    pub trials: u64,
    /// Points are drawn at arc-length parameters uniform in `[-half_length, half_length]`.
    pub half_length: f64,
    /// Spacing of sample points along `[x, y]`.
    pub step: f64,
}

impl TwoGeodesicsConfig {
    pub fn new(d: usize, delta: f64, trials: u64) -> Self {
        TwoGeodesicsConfig {
            d,
            delta,
            separation: 3.0,
            trials,
            half_length: 50.0,
            step: 1e-2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoGeodesicsReport {
    pub trials: u64,
    pub max_observed: f64,
    pub threshold: f64,
    pub pass: bool,
    pub separation: f64,
    /// Sampling `[x, y]` at spacing `step` overstates each distance by at most `step / 2`.
    pub discretization_bound: f64,
}

/// One instance: parameters `s` along `A`, `t` along `B`, and the unit
/// directions of `A` and `B` (both orthogonal to `e_1`).
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub s: f64,
    pub t: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

/// Distance from `g` to the segment of the `e_1` axis between `o` and `y0`.
fn axis_segment_distance(g: &[f64], y0: &[f64], len: f64) -> f64 {
    let rest2: f64 = g[2..].iter().map(|v| v * v).sum();
    let foot = (g[1] / g[0]).atanh();
    if (0.0..=len).contains(&foot) {
        rest2.sqrt().asinh()
    } else if foot < 0.0 {
        (g[1] * g[1] + rest2).sqrt().asinh()
    } else {
        dist_coords(g, y0)
    }
}

/// `dist([x, y], [x_0, y_0])`, minimizing over points of `[x, y]` spaced by `step`.
pub fn segment_gap(d: usize, separation: f64, inst: &Instance, step: f64) -> f64 {
    let big_d = separation;
    let mut x = vec![0.0; d + 1];
    x[0] = inst.s.cosh();
    for i in 1..d {
        x[i + 1] = inst.s.sinh() * inst.a[i];
    }
    let mut y = vec![0.0; d + 1];
    y[0] = big_d.cosh() * inst.t.cosh();
    y[1] = big_d.sinh() * inst.t.cosh();
    for i in 1..d {
        y[i + 1] = inst.t.sinh() * inst.b[i];
    }
    let mut y0 = vec![0.0; d + 1];
    y0[0] = big_d.cosh();
    y0[1] = big_d.sinh();

    let ab: f64 = inst.a.iter().zip(&inst.b).map(|(p, q)| p * q).sum();
    let cosh_len = inst.s.cosh() * big_d.cosh() * inst.t.cosh() - inst.s.sinh() * inst.t.sinh() * ab;
    let len = cosh_len.max(1.0).acosh();
    if len < 1e-12 {
        return axis_segment_distance(&x, &y0, big_d);
    }
    let m = (len / step).ceil() as usize;
    let sl = len.sinh();
    let mut g = vec![0.0; d + 1];
    let mut best = f64::INFINITY;
    for k in 0..=m {
        let lam = k as f64 / m as f64;
        let (wx, wy) = (((1.0 - lam) * len).sinh() / sl, (lam * len).sinh() / sl);
        for i in 0..=d {
            g[i] = wx * x[i] + wy * y[i];
        }
        let s2: f64 = g[1..].iter().map(|v| v * v).sum();
        g[0] = (1.0 + s2).sqrt();
        best = best.min(axis_segment_distance(&g, &y0, big_d));
    }
    best
}

/// A unit vector orthogonal to `e_1`, uniform on that great sphere.
fn orthogonal_direction<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    let mut u = vec![0.0];
    u.extend(random_unit_direction(d - 1, rng));
    u
}

fn random_instance<R: Rng + ?Sized>(cfg: &TwoGeodesicsConfig, rng: &mut R) -> Instance {
    let l = cfg.half_length;
    let s = rng.random_range(-l..=l);
    let t = rng.random_range(-l..=l);
    Instance {
        s,
        t,
        a: orthogonal_direction(cfg.d, rng),
        b: orthogonal_direction(cfg.d, rng),
    }
}

/// Runs `trials` random instances (trial `k` on its own random stream) and
/// reports the largest observed gap against the threshold `2 delta`.
pub fn verify_two_geodesics(cfg: &TwoGeodesicsConfig, seed: u64) -> Result<TwoGeodesicsReport> {
    if cfg.d < 2 {
        return usage("dimension must be >= 2");
    }
    if !(cfg.delta > 0.0) {
        return usage("delta must be positive");
    }
    if !(cfg.separation > 3.0 * cfg.delta) {
        return usage(format!(
            "separation {} must exceed 3 delta = {}",
            cfg.separation,
            3.0 * cfg.delta
        ));
    }
    if !(cfg.step > 0.0) || !(cfg.half_length >= 0.0) || cfg.half_length > 300.0 {
        return usage("step must be positive and half_length in [0, 300]");
    }
    let max_observed = (0..cfg.trials)
        .into_par_iter()
        .map(|k| {
            let inst = random_instance(cfg, &mut stream_rng(seed, k));
            segment_gap(cfg.d, cfg.separation, &inst, cfg.step)
        })
        .reduce(|| 0.0, f64::max);
    let threshold = 2.0 * cfg.delta;
    Ok(TwoGeodesicsReport {
        trials: cfg.trials,
        max_observed,
        threshold,
        pass: max_observed < threshold,
        separation: cfg.separation,
        discretization_bound: cfg.step / 2.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::{dist, dist_to_geodesic_segment, geodesic_point, HPoint};

    fn inst(s: f64, t: f64, a: Vec<f64>, b: Vec<f64>) -> Instance {
        Instance { s, t, a, b }
    }

    #[test]
    fn shared_segment_has_zero_gap() {
        let gap = segment_gap(2, 3.0, &inst(0.0, 0.0, vec![0.0, 1.0], vec![0.0, 1.0]), 1e-2);
        assert!(gap < 1e-12);
    }

    #[test]
    fn symmetric_instance_is_below_bound() {
        for t in [1.0, 10.0, 50.0] {
            let gap = segment_gap(2, 3.0, &inst(t, -t, vec![0.0, 1.0], vec![0.0, 1.0]), 1e-2);
            assert!(gap < 1.78, "t = {t}: {gap}");
        }
    }

    #[test]
    fn matches_coordinate_computation() {
        let mut rng = stream_rng(2, 0);
        let d = 3;
        for _ in 0..10 {
            let s = rng.random_range(-4.0..4.0);
            let t = rng.random_range(-4.0..4.0);
            let i = inst(s, t, orthogonal_direction(d, &mut rng), orthogonal_direction(d, &mut rng));
            let fast = segment_gap(d, 3.0, &i, 0.05);

            let mut xs = vec![0.0; d];
            for k in 1..d {
                xs[k] = s.sinh() * i.a[k];
            }
            let x = HPoint::from_spatial(&xs).unwrap();
            let y = HPoint::from_slice(&[
                3f64.cosh() * t.cosh(),
                3f64.sinh() * t.cosh(),
                t.sinh() * i.b[1],
                t.sinh() * i.b[2],
            ])
            .unwrap();
            let x0 = HPoint::origin(d);
            let y0 = HPoint::on_axis(d, 3.0);
            let len = dist(&x, &y).unwrap();
            let m = (len / 0.05).ceil() as usize;
            let slow = (0..=m)
                .map(|k| {
                    let p = geodesic_point(&x, &y, k as f64 / m as f64).unwrap();
                    dist_to_geodesic_segment(&p, &x0, &y0)
                })
                .fold(f64::INFINITY, f64::min);
            assert!((fast - slow).abs() < 1e-7, "{fast} vs {slow}");
        }
    }

    #[test]
    fn rejects_close_geodesics() {
        let mut cfg = TwoGeodesicsConfig::new(2, 0.89, 3);
        cfg.separation = 2.6;
        assert!(verify_two_geodesics(&cfg, 0).is_err());
    }

    #[test]
    fn small_run_passes() {
        let r = verify_two_geodesics(&TwoGeodesicsConfig::new(2, 0.89, 40), 5).unwrap();
        assert!(r.pass);
        assert_eq!(r.threshold, 1.78);
        assert!(r.max_observed < 1.78);
    }
}
