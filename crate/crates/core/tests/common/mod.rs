//! Independent oracles for two-step walks, from the hyperbolic law of cosines.
//!
//! For `n = 2` the only constrained pair is `(x_0, x_2)`. With interior angle
//! `psi` at `x_1`, `cosh d(x_0, x_2) = cosh^2 eps - sinh^2 eps cos psi`, and
//! `psi` has density proportional to `sin^(d-2) psi` on `[0, pi]`.

#![allow(dead_code)]

use std::f64::consts::PI;

pub fn end_to_end(eps: f64, psi: f64) -> f64 {
    let (ch, sh) = (eps.cosh(), eps.sinh());
    (ch * ch - sh * sh * psi.cos()).acosh()
}

/// Smallest angle at which the two-step walk is self-avoiding.
pub fn critical_angle(eps: f64, c: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, PI);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if end_to_end(eps, mid) > c * eps {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Composite Simpson rule on `[a, b]` with `2 m` intervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
    let h = (b - a) / (2 * m) as f64;
    let mut s = f(a) + f(b);
    for i in 1..2 * m {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

fn weight(d: usize) -> impl Fn(f64) -> f64 {
    move |psi: f64| psi.sin().powi(d as i32 - 2)
}

/// Probability that two i.i.d. uniform steps are self-avoiding.
pub fn acceptance_probability(d: usize, eps: f64, c: f64) -> f64 {
    let w = weight(d);
    let lo = critical_angle(eps, c);
    simpson(&w, lo, PI, 2_000) / simpson(&w, 0.0, PI, 2_000)
}

/// `E[d(x_0, x_2)]` under the two-step SAW measure.
pub fn mean_displacement(d: usize, eps: f64, c: f64) -> f64 {
    let w = weight(d);
    let lo = critical_angle(eps, c);
    simpson(|psi| end_to_end(eps, psi) * w(psi), lo, PI, 2_000) / simpson(&w, lo, PI, 2_000)
}
