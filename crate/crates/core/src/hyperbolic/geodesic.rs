use nalgebra::DVector;

use super::isometry::recentre;
use super::point::renormalize;
use super::{mink, origin_to_line, origin_to_segment, HPoint, TangentVector, MAX_RADIUS};
use crate::error::{usage, Error, Result};

/// Hyperbolic distance `arccosh(-<p, q>)`.
///
/// Below `-<p,q> = 2` the value comes from `2 asinh(|p - q|_M / 2)`, which
/// keeps full relative precision for nearly coincident points.
pub fn dist(p: &HPoint, q: &HPoint) -> Result<f64> {
    if p.dim() != q.dim() {
        return usage("points have different dimensions");
    }
    let (a, b) = (p.as_slice(), q.as_slice());
    let ip = -mink(a, b);
    if !ip.is_finite() {
        return Err(Error::NumericIntegrity("distance overflow".into()));
    }
    if ip < 1.0 - 1e-9 * a[0] * b[0] {
        return Err(Error::NumericIntegrity(format!(
            "-<p,q> = {ip} < 1: inputs are off the hyperboloid"
        )));
    }
    Ok(dist_coords(a, b))
}

pub(crate) fn dist_coords(a: &[f64], b: &[f64]) -> f64 {
    let ip = -mink(a, b);
    if ip > 2.0 {
        ip.acosh()
    } else {
        let mut c = -(a[0] - b[0]) * (a[0] - b[0]);
        for i in 1..a.len() {
            c += (a[i] - b[i]) * (a[i] - b[i]);
        }
        2.0 * (0.5 * c.max(0.0).sqrt()).asinh()
    }
}

/// `cosh(t) p + sinh(t) v` for a unit tangent `v` at `p`, renormalized.
pub fn exp_map(v: &TangentVector, t: f64) -> Result<HPoint> {
    v.require_unit()?;
    if !(t >= 0.0) || !t.is_finite() {
        return usage(format!("geodesic parameter must be finite and >= 0, got {t}"));
    }
    if t > MAX_RADIUS {
        return Err(Error::NumericIntegrity(format!(
            "step length {t} exceeds the working radius"
        )));
    }
    let p = v.base().coords();
    let mut out = (p * t.cosh() + v.vec() * t.sinh()).as_slice().to_vec();
    renormalize(&mut out)?;
    Ok(HPoint::from_vec_unchecked(out))
}

/// Unit initial direction and length of the geodesic from `p` to `q`.
pub fn log_map(p: &HPoint, q: &HPoint) -> Result<(TangentVector, f64)> {
    let t = dist(p, q)?;
    if t < 1e-12 {
        return Err(Error::Degenerate(
            "log_map of coincident points has no direction".into(),
        ));
    }
    // q - cosh(t) p, written to avoid cancellation for small t
    let half = (0.5 * t).sinh();
    let u = (q.coords() - p.coords()) - p.coords() * (2.0 * half * half);
    let v = u / t.sinh();
    Ok((TangentVector::from_parts_unchecked(p.clone(), v), t))
}

/// Parallel transport of `v` (tangent at `p`) along the geodesic to `q`:
/// `v + <q, v> / (1 - <p, q>) (p + q)`.
pub fn parallel_transport(p: &HPoint, q: &HPoint, v: &TangentVector) -> Result<TangentVector> {
    if p.dim() != q.dim() || v.vec().len() != p.coords().len() {
        return usage("dimension mismatch in parallel transport");
    }
    let ip_pv = mink(p.as_slice(), v.vec().as_slice());
    if ip_pv.abs() > 1e-9 * p.coords().norm() * v.vec().norm().max(1.0) {
        return usage("vector is not tangent at the source point");
    }
    if dist(p, q)? == 0.0 {
        return Ok(v.clone());
    }
    let pq = mink(p.as_slice(), q.as_slice());
    let coef = mink(q.as_slice(), v.vec().as_slice()) / (1.0 - pq);
    let w = v.vec() + (p.coords() + q.coords()) * coef;
    Ok(TangentVector::from_parts_unchecked(q.clone(), w))
}

/// The point a fraction `s` of the way from `a` to `b` along their geodesic.
pub fn geodesic_point(a: &HPoint, b: &HPoint, s: f64) -> Result<HPoint> {
    let len = dist(a, b)?;
    if len == 0.0 {
        return Ok(a.clone());
    }
    let sl = len.sinh();
    let wa = ((1.0 - s) * len).sinh() / sl;
    let wb = (s * len).sinh() / sl;
    let mut out = (a.coords() * wa + b.coords() * wb).as_slice().to_vec();
    renormalize(&mut out)?;
    Ok(HPoint::from_vec_unchecked(out))
}

/// Distance from `p` to the complete geodesic through `a` and `b`.
///
/// Computed in the frame centred at `p`, where the height of the triangle
/// `(p, a, b)` has a cancellation-free closed form. Falls back to a
/// golden-section search if that evaluation is not finite.
pub fn dist_to_geodesic_line(p: &HPoint, a: &HPoint, b: &HPoint) -> Result<f64> {
    let len = dist(a, b)?;
    if len < 1e-12 {
        return Err(Error::Degenerate(
            "geodesic line through coincident points".into(),
        ));
    }
    dist(p, a)?;
    let ra = recentre(p.as_slice(), a.as_slice());
    let rb = recentre(p.as_slice(), b.as_slice());
    let h = origin_to_line(&ra, &rb, len);
    if h.is_finite() {
        Ok(h)
    } else {
        line_distance_by_search(p, a, b)
    }
}

/// Distance from `p` to the geodesic segment `[a, b]`; `a = b` reduces to
/// `dist(p, a)`.
pub fn dist_to_geodesic_segment(p: &HPoint, a: &HPoint, b: &HPoint) -> f64 {
    let (ps, as_, bs) = (p.as_slice(), a.as_slice(), b.as_slice());
    let len = dist_coords(as_, bs);
    if len < 1e-12 {
        return dist_coords(ps, as_);
    }
    let ra = recentre(ps, as_);
    let rb = recentre(ps, bs);
    origin_to_segment(&ra, &rb, len)
}

/// Golden-section minimization of `t -> dist(p, gamma(t))` over the full line
/// through `a`, `b` (with bracket expansion). Slow; used as a cross-check.
pub fn line_distance_by_search(p: &HPoint, a: &HPoint, b: &HPoint) -> Result<f64> {
    let (w, len) = log_map(a, b)?;
    let pa = a.coords().clone();
    let wv = w.vec().clone();
    let f = |t: f64| point_at(&pa, &wv, t).map_or(f64::INFINITY, |g| dist_coords(p.as_slice(), &g));
    let h = 1e-3;
    let mut lo = -1.0;
    let mut hi = len + 1.0;
    let mut grow = 1.0;
    while f(lo) > f(lo + h) && lo > -MAX_RADIUS {
        grow *= 2.0;
        lo -= grow;
    }
    grow = 1.0;
    while f(hi) > f(hi - h) && hi < MAX_RADIUS {
        grow *= 2.0;
        hi += grow;
    }
    Ok(golden_section_min(f, lo, hi, 1e-10).1)
}

fn point_at(a: &DVector<f64>, w: &DVector<f64>, t: f64) -> Option<Vec<f64>> {
    let mut g = (a * t.cosh() + w * t.sinh()).as_slice().to_vec();
    renormalize(&mut g).ok()?;
    Some(g)
}

/// Golden-section search for the minimum of a unimodal `f` on `[lo, hi]`.
pub(crate) fn golden_section_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    let (x, fx) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    let (fl, fh) = (f(lo), f(hi));
    if fl < fx {
        (lo, fl)
    } else if fh < fx {
        (hi, fh)
    } else {
        (x, fx)
    }
}
