use nalgebra::DVector;

use super::{mink, spatial_norm_sq, MAX_RADIUS};
use crate::error::{usage, Error, Result};

/// Tolerance on `|<x,x> + 1|`, relative to `x_0^2`, above which a point is
/// refused instead of renormalized.
pub(crate) const DRIFT_TOL: f64 = 1e-6;

/// A point of `H^d` in hyperboloid coordinates `(x_0, x_1, ..., x_d)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HPoint {
    coords: DVector<f64>,
}

impl HPoint {
    /// The origin `o = (1, 0, ..., 0)` of `H^d`.
    pub fn origin(d: usize) -> Self {
        let mut coords = DVector::zeros(d + 1);
        coords[0] = 1.0;
        HPoint { coords }
    }

    /// The point at signed distance `t` from the origin along the `e_1` axis.
    pub fn on_axis(d: usize, t: f64) -> Self {
        let mut coords = DVector::zeros(d + 1);
        coords[0] = t.cosh();
        coords[1] = t.sinh();
        HPoint { coords }
    }

    /// Validates `coords` and projects them exactly onto the hyperboloid.
    pub fn new(coords: DVector<f64>) -> Result<Self> {
        let mut v = coords.as_slice().to_vec();
        renormalize(&mut v)?;
        Ok(HPoint {
            coords: DVector::from_vec(v),
        })
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(coords))
    }

    /// Lifts a spatial vector `y` to the unique point `(sqrt(1 + |y|^2), y)`.
    pub fn from_spatial(y: &[f64]) -> Result<Self> {
        if y.len() < 2 {
            return usage("need d >= 2");
        }
        let mut v = Vec::with_capacity(y.len() + 1);
        v.push((1.0 + y.iter().map(|a| a * a).sum::<f64>()).sqrt());
        v.extend_from_slice(y);
        check_radius(&v)?;
        Ok(HPoint {
            coords: DVector::from_vec(v),
        })
    }

    pub(crate) fn from_vec_unchecked(v: Vec<f64>) -> Self {
        HPoint {
            coords: DVector::from_vec(v),
        }
    }

    /// Dimension `d` of the hyperbolic space.
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn as_slice(&self) -> &[f64] {
        self.coords.as_slice()
    }

    /// Minkowski self-product; `-1` up to rounding.
    pub fn mink_norm_sq(&self) -> f64 {
        mink(self.as_slice(), self.as_slice())
    }
}

/// A tangent vector `vec` at `base`: `<base, vec> = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector {
    base: HPoint,
    vec: DVector<f64>,
}

impl TangentVector {
    pub fn new(base: HPoint, vec: DVector<f64>) -> Result<Self> {
        if vec.len() != base.coords.len() {
            return usage("tangent vector dimension does not match base point");
        }
        let scale = base.coords.norm() * vec.norm().max(1.0);
        let ip = mink(base.as_slice(), vec.as_slice());
        if ip.abs() > 1e-9 * scale {
            return usage(format!("vector is not tangent at base (<p,v> = {ip:e})"));
        }
        Ok(TangentVector { base, vec })
    }

    /// Like [`TangentVector::new`] but also requires `<v,v> = 1`.
    pub fn unit(base: HPoint, vec: DVector<f64>) -> Result<Self> {
        let t = Self::new(base, vec)?;
        t.require_unit()?;
        Ok(t)
    }

    /// The tangent vector `(0, u)` at the origin for a Euclidean direction `u`.
    pub fn at_origin(u: &[f64]) -> Result<Self> {
        let mut v = Vec::with_capacity(u.len() + 1);
        v.push(0.0);
        v.extend_from_slice(u);
        Self::new(HPoint::origin(u.len()), DVector::from_vec(v))
    }

    pub(crate) fn from_parts_unchecked(base: HPoint, vec: DVector<f64>) -> Self {
        TangentVector { base, vec }
    }

    pub fn base(&self) -> &HPoint {
        &self.base
    }

    pub fn vec(&self) -> &DVector<f64> {
        &self.vec
    }

    /// Minkowski length `sqrt(<v, v>)` (tangent vectors are spacelike).
    pub fn norm(&self) -> f64 {
        mink(self.vec.as_slice(), self.vec.as_slice()).max(0.0).sqrt()
    }

    pub fn is_unit(&self) -> bool {
        let n2 = mink(self.vec.as_slice(), self.vec.as_slice());
        (n2 - 1.0).abs() <= 1e-9 * self.vec.norm_squared().max(1.0)
    }

    pub(crate) fn require_unit(&self) -> Result<()> {
        if self.is_unit() {
            Ok(())
        } else {
            usage(format!(
                "tangent vector is not unit (<v,v> = {})",
                mink(self.vec.as_slice(), self.vec.as_slice())
            ))
        }
    }

    /// Same base, vector scaled by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        TangentVector {
            base: self.base.clone(),
            vec: &self.vec * s,
        }
    }
}

fn check_radius(v: &[f64]) -> Result<()> {
    if !v.iter().all(|a| a.is_finite()) || v[0] > MAX_RADIUS.cosh() {
        return Err(Error::NumericIntegrity(format!(
            "point beyond the working radius {MAX_RADIUS}"
        )));
    }
    Ok(())
}

/// Refuses points that drifted more than [`DRIFT_TOL`] (relative to `x_0^2`)
/// off the hyperboloid, otherwise resets `x_0 = sqrt(1 + |x_spatial|^2)`.
pub(crate) fn renormalize(v: &mut [f64]) -> Result<()> {
    if v.len() < 3 {
        return usage(format!("need d >= 2, got ambient length {}", v.len()));
    }
    check_radius(v)?;
    if v[0] <= 0.0 {
        return Err(Error::NumericIntegrity(
            "point is not on the positive sheet".into(),
        ));
    }
    let defect = mink(v, v) + 1.0;
    if defect.abs() > DRIFT_TOL * v[0] * v[0] {
        return Err(Error::NumericIntegrity(format!(
            "point is off the hyperboloid (<x,x> + 1 = {defect:e})"
        )));
    }
    v[0] = (1.0 + spatial_norm_sq(v)).sqrt();
    Ok(())
}
