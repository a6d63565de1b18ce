mod common;

use hypersaw::experiments::{
    ball_packing_statistic, ballisticity_scan, beta_fit, displacement_estimate, rescaling_identity_error,
    sample_walks, scaling_csv, scaling_sweep, scan_csv, speed_estimate, EpsRule, Normalization, ScalingPoint,
    SCALING_HEADER, SCAN_HEADER,
};
use hypersaw::rng::stream_rng;
use hypersaw::stats::{EstimateReport, Method};
use hypersaw::{SamplerKind, SawParams, Walk};
use rand::Rng;

#[test]
fn two_step_mean_matches_quadrature() {
    let oracle = common::mean_displacement(2, 1.0, 0.5);
    let r = displacement_estimate(&SawParams::new(2, 0.5, 2).with_seed(401), 20_000).unwrap();
    assert!((r.estimate - oracle).abs() < 3.0 * r.std_error, "{} vs {oracle}", r.estimate);
    let speed = speed_estimate(&SawParams::new(2, 0.5, 2).with_seed(401), 20_000).unwrap();
    assert!((speed.estimate - r.estimate / 2.0).abs() < 1e-15);
}

#[test]
fn doubling_samples_shrinks_the_error() {
    let p = SawParams::new(2, 0.5, 5).with_seed(402);
    let a = speed_estimate(&p, 4_000).unwrap();
    let b = speed_estimate(&p.with_seed(403), 8_000).unwrap();
    let ratio = b.std_error / a.std_error;
    assert!((ratio / std::f64::consts::FRAC_1_SQRT_2 - 1.0).abs() < 0.2, "ratio {ratio}");
}

#[test]
fn larger_avoidance_radius_walks_further() {
    let wide = speed_estimate(&SawParams::new(2, 0.9, 5).with_seed(404), 5_000).unwrap();
    let narrow = speed_estimate(&SawParams::new(2, 0.1, 5).with_seed(404), 5_000).unwrap();
    assert!(wide.estimate >= narrow.estimate - 3.0 * wide.std_error.hypot(narrow.std_error));
}

#[test]
fn const_rule_reproduces_the_scan() {
    let base = SawParams::new(2, 0.5, 1).with_seed(405).with_sampler(SamplerKind::Mcmc);
    let ns = [2, 4, 6];
    let rows = ballisticity_scan(&base, &ns, 40).unwrap();
    let points = scaling_sweep(&base, &ns, EpsRule::Const { eps: 1.0 }, 40).unwrap();
    for (r, p) in rows.iter().zip(&points) {
        assert_eq!(r.n, p.n);
        let per_step = p.report.clone().scaled(1.0 / p.n as f64);
        assert_eq!(r.report.estimate, per_step.estimate);
        assert_eq!(r.report.ci95, per_step.ci95);
    }
    assert!(scan_csv(&rows).starts_with(SCAN_HEADER));
    assert!(scaling_csv(&points).starts_with(SCALING_HEADER));
}

#[test]
fn scan_output_is_deterministic() {
    let base = SawParams::new(2, 0.5, 1).with_seed(406);
    let a = scan_csv(&ballisticity_scan(&base, &[1, 3, 5], 30).unwrap());
    let b = scan_csv(&ballisticity_scan(&base, &[1, 3, 5], 30).unwrap());
    assert_eq!(a, b);
    assert!(a.lines().nth(1).unwrap().starts_with("1,1,0,1,1,iid,30"));
}

#[test]
fn rescaling_identity_holds_for_sampled_walks() {
    for eps in [0.5, 1.0] {
        let p = SawParams::new(2, 0.5, 10).with_eps(eps).with_seed(407);
        let walks = sample_walks(&p, 50).unwrap().walks;
        assert!(rescaling_identity_error(&walks).unwrap() < 1e-9);
    }
    let p = SawParams::new(3, 0.5, 8).with_eps(0.5).with_seed(408).with_sampler(SamplerKind::Mcmc);
    let walks = sample_walks(&p, 30).unwrap().walks;
    assert!(rescaling_identity_error(&walks).unwrap() < 1e-9);
}

fn synthetic(n: usize, mean: f64) -> ScalingPoint {
    ScalingPoint {
        n,
        eps: 1.0,
        mean_displacement: mean,
        report: EstimateReport {
            estimate: mean,
            std_error: 0.0,
            ci95: (mean, mean),
            n_samples: 100,
            method: Method::Iid,
            runtime_seconds: 0.0,
            autocorrelation_time: None,
        },
    }
}

#[test]
fn beta_fit_recovers_exponents() {
    let ns = [8usize, 16, 32, 64, 128, 256];
    let exact: Vec<ScalingPoint> = ns.iter().map(|&n| synthetic(n, (n as f64).powf(0.75))).collect();
    let fit = beta_fit(&exact, Normalization::Raw).unwrap();
    assert!((fit.beta - 0.75).abs() < 1e-12);
    assert!((fit.r_squared - 1.0).abs() < 1e-12);
    let mut rng = stream_rng(409, 0);
    for _ in 0..200 {
        let noisy: Vec<ScalingPoint> = ns
            .iter()
            .map(|&n| synthetic(n, (n as f64).powf(0.75) * (1.0 + rng.random_range(-0.01..0.01))))
            .collect();
        let fit = beta_fit(&noisy, Normalization::Raw).unwrap();
        assert!((fit.beta - 0.75).abs() < 0.02);
    }
}

#[test]
fn sampled_walks_are_always_self_avoiding() {
    for sampler in [SamplerKind::Rejection, SamplerKind::Mcmc] {
        let p = SawParams::new(2, 0.5, 12).with_seed(410).with_sampler(sampler);
        for w in sample_walks(&p, 40).unwrap().walks {
            assert!(w.is_self_avoiding());
            let (count, length) = ball_packing_statistic(&w, 0.0).unwrap();
            assert!(count >= 2 && length > 0.5);
        }
    }
}

#[test]
fn geodesic_packing_density() {
    let w = Walk::geodesic(&SawParams::new(3, 0.5, 9).with_eps(0.5)).unwrap();
    let (count, length) = ball_packing_statistic(&w, 0.3).unwrap();
    assert_eq!(count, 10);
    assert!((count as f64 / length - 10.0 / 4.5).abs() < 1e-12);
}
