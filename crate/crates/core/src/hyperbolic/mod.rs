//! Hyperboloid-model primitives for `H^d`.
//!
//! Points live on the upper sheet of `<x, x> = -1` in Minkowski space
//! `R^{d,1}` with the form `<u, v> = -u_0 v_0 + sum_i u_i v_i`. Isometries are
//! orthochronous Lorentz matrices, so everything here is linear algebra plus a
//! handful of stable inverse-hyperbolic evaluations.
//!
//! Far from the origin the hyperboloid coordinates grow like `e^r` and inner
//! products between nearby far points cancel catastrophically. The functions
//! taking raw slices (`origin_to_segment`, `origin_to_line`, `dist_from_origin`)
//! expect coordinates expressed in a frame centred near the query, which is how
//! the walk and analysis modules call them.

mod geodesic;
mod isometry;
mod klein;
mod point;
mod sampling;

pub use geodesic::{
    dist, dist_to_geodesic_line, dist_to_geodesic_segment, exp_map, geodesic_point,
    line_distance_by_search, log_map, parallel_transport,
};
pub use isometry::{boost_to, rotation_fixing, Isometry};
pub use klein::{klein_lift, klein_project, KleinPoint};
pub use point::{HPoint, TangentVector};
pub use sampling::{random_rotation, random_unit_direction};

pub(crate) use geodesic::dist_coords;
pub(crate) use isometry::{boost_apply, recentre};

use nalgebra::DVector;

use crate::error::{usage, Result};

/// Largest distance from the origin the kernel accepts; `cosh` overflows past ~710.
pub const MAX_RADIUS: f64 = 700.0;

/// Minkowski bilinear form `-u_0 v_0 + sum_{i>=1} u_i v_i`.
pub fn mink_inner(u: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
    if u.len() != v.len() {
        return usage(format!("dimension mismatch: {} vs {}", u.len(), v.len()));
    }
    if u.len() < 3 {
        return usage(format!("need d >= 2, got ambient length {}", u.len()));
    }
    Ok(mink(u.as_slice(), v.as_slice()))
}

#[inline]
pub(crate) fn mink(u: &[f64], v: &[f64]) -> f64 {
    debug_assert_eq!(u.len(), v.len());
    let mut s = -u[0] * v[0];
    for i in 1..u.len() {
        s += u[i] * v[i];
    }
    s
}

#[inline]
pub(crate) fn spatial_norm_sq(x: &[f64]) -> f64 {
    x[1..].iter().map(|a| a * a).sum()
}

/// Hyperbolic distance from the origin `o = (1, 0, ..., 0)` to `x`.
///
/// Uses `asinh |x_spatial|`, which is accurate at every scale.
#[inline]
pub fn dist_from_origin(x: &[f64]) -> f64 {
    spatial_norm_sq(x).sqrt().asinh()
}

/// `ln sinh t` for `t > 0`, without overflow for large `t`.
pub(crate) fn ln_sinh(t: f64) -> f64 {
    if t <= 0.0 {
        f64::NEG_INFINITY
    } else if t > 20.0 {
        t - std::f64::consts::LN_2 + (-(-2.0 * t).exp()).ln_1p()
    } else {
        t.sinh().ln()
    }
}

/// `asinh(e^z)` without forming `e^z` when it would overflow.
pub(crate) fn asinh_exp(z: f64) -> f64 {
    if z > 20.0 {
        z + std::f64::consts::LN_2 + (-2.0 * z).exp() / 4.0
    } else {
        z.exp().asinh()
    }
}

/// Distance from the origin to the complete geodesic through `a` and `b`.
///
/// `a`, `b` are hyperboloid coordinates in a frame centred at the query point;
/// `len_ab` is `dist(a, b)` computed by the caller from the best-conditioned
/// data it has. Uses `sinh h = sinh|oa| sinh|ob| sin(angle at o) / sinh|ab|`.
pub fn origin_to_line(a: &[f64], b: &[f64], len_ab: f64) -> f64 {
    let na = spatial_norm_sq(a).sqrt();
    let nb = spatial_norm_sq(b).sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    let sin_phi = sin_angle_between(&a[1..], &b[1..], na, nb);
    if sin_phi == 0.0 {
        return 0.0;
    }
    let ln_sinh_h = na.ln() + nb.ln() + sin_phi.ln() - ln_sinh(len_ab);
    asinh_exp(ln_sinh_h)
}

/// Distance from the origin to the geodesic segment `[a, b]`, frame conventions
/// as for [`origin_to_line`].
pub fn origin_to_segment(a: &[f64], b: &[f64], len_ab: f64) -> f64 {
    let x = dist_from_origin(a);
    let y = dist_from_origin(b);
    if x == 0.0 || y == 0.0 {
        return 0.0;
    }
    if len_ab <= 1e-12 {
        return x.min(y);
    }
    // the segment minimum sits at an endpoint iff that endpoint's angle is obtuse
    if angle_is_obtuse(x, len_ab, y) {
        return x;
    }
    if angle_is_obtuse(y, len_ab, x) {
        return y;
    }
    origin_to_line(a, b, len_ab).min(x).min(y)
}

/// In a triangle with sides `adj1`, `adj2` meeting at a vertex and `opp`
/// opposite it, whether that vertex angle exceeds `pi/2`. Half-angle form:
/// `sin^2(A/2) = sinh(s - adj1) sinh(s - adj2) / (sinh adj1 sinh adj2)`.
pub(crate) fn angle_is_obtuse(adj1: f64, adj2: f64, opp: f64) -> bool {
    let s = 0.5 * (adj1 + adj2 + opp);
    let (p, q) = (s - adj1, s - adj2);
    if p <= 0.0 || q <= 0.0 {
        return false;
    }
    ln_sinh(p) + ln_sinh(q) - ln_sinh(adj1) - ln_sinh(adj2) > (0.5f64).ln()
}

/// `sin` of the angle between two Euclidean vectors, stable near 0 and `pi`.
fn sin_angle_between(u: &[f64], v: &[f64], nu: f64, nv: f64) -> f64 {
    let mut diff = 0.0;
    let mut sum = 0.0;
    for (a, b) in u.iter().zip(v) {
        let (ua, vb) = (a / nu, b / nv);
        diff += (ua - vb) * (ua - vb);
        sum += (ua + vb) * (ua + vb);
    }
    (0.5 * (diff * sum).sqrt()).min(1.0)
}
