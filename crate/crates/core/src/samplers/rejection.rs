use rand::Rng;

use crate::error::{Error, Result};
use crate::hyperbolic::random_unit_direction;
use crate::walk::{Clearance, SawParams, StepGeometry, Walk};

/// Draws `n` i.i.d. uniform directions, checking each new vertex against
/// the earlier ones as soon as it exists. Returns the directions if the
/// whole walk is self-avoiding. Stopping at the first clash does not change
/// the law of accepted walks.
fn attempt<R: Rng + ?Sized>(
    g: &StepGeometry,
    clearance: &Clearance,
    dirs: &mut [f64],
    v: &mut [f64],
    rng: &mut R,
) -> bool {
    for k in 0..g.n {
        let u = random_unit_direction(g.d, rng);
        dirs[k * g.d..(k + 1) * g.d].copy_from_slice(&u);
        if !g.vertex_clear(dirs, clearance, k + 1, v) {
            return false;
        }
    }
    true
}

/// Exact sampler for the conditioned product measure: redraw until the
/// developed walk is self-avoiding. Returns the walk and the number of attempts.
pub fn rejection_sample<R: Rng + ?Sized>(params: &SawParams, rng: &mut R) -> Result<(Walk, u64)> {
    params.validate()?;
    let g = StepGeometry::new(params.d, params.n, params.eps);
    let clearance = Clearance::new(params.avoidance_radius());
    let mut dirs = vec![0.0; params.n * params.d];
    let mut v = vec![0.0; params.d + 1];
    for attempts in 1..=params.rejection_cap {
        if attempt(&g, &clearance, &mut dirs, &mut v, rng) {
            let mut w = Walk::from_flat(dirs, params)?;
            w.set_valid(true);
            return Ok((w, attempts));
        }
    }
    Err(Error::Feasibility {
        attempts: params.rejection_cap,
        acceptance_rate: 3.0 / params.rejection_cap as f64,
    })
}

/// Number of self-avoiding walks among `trials` independent unconditioned draws.
pub fn acceptance_count<R: Rng + ?Sized>(params: &SawParams, trials: u64, rng: &mut R) -> Result<u64> {
    params.validate()?;
    let g = StepGeometry::new(params.d, params.n, params.eps);
    let clearance = Clearance::new(params.avoidance_radius());
    let mut dirs = vec![0.0; params.n * params.d];
    let mut v = vec![0.0; params.d + 1];
    Ok((0..trials)
        .filter(|_| attempt(&g, &clearance, &mut dirs, &mut v, rng))
        .count() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    #[test]
    fn single_step_always_accepted() {
        let p = SawParams::new(3, 0.9, 1);
        let mut rng = stream_rng(1, 0);
        for _ in 0..50 {
            let (w, attempts) = rejection_sample(&p, &mut rng).unwrap();
            assert_eq!(attempts, 1);
            assert!((w.displacement() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn accepted_walks_are_self_avoiding() {
        let p = SawParams::new(2, 0.7, 6);
        let mut rng = stream_rng(2, 0);
        for _ in 0..100 {
            let (w, _) = rejection_sample(&p, &mut rng).unwrap();
            assert!(w.is_flagged_valid());
            assert!(w.is_self_avoiding());
        }
    }

    #[test]
    fn cap_exhaustion_reports_feasibility() {
        let mut p = SawParams::new(2, 0.99, 40);
        p.rejection_cap = 5;
        match rejection_sample(&p, &mut stream_rng(3, 0)) {
            Err(Error::Feasibility { attempts, acceptance_rate }) => {
                assert_eq!(attempts, 5);
                assert!((acceptance_rate - 0.6).abs() < 1e-15);
            }
            other => panic!("expected feasibility error, got {other:?}"),
        }
    }

    #[test]
    fn seeded_runs_repeat() {
        let p = SawParams::new(2, 0.5, 5);
        let a = rejection_sample(&p, &mut stream_rng(9, 4)).unwrap();
        let b = rejection_sample(&p, &mut stream_rng(9, 4)).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
    }
}
