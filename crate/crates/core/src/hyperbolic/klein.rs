use nalgebra::DVector;

use super::HPoint;
use crate::error::{usage, Result};

/// A point of the Klein (projective) ball model: Euclidean norm `< 1`.
/// Hyperbolic geodesics are straight chords here.
#[derive(Clone, Debug, PartialEq)]
pub struct KleinPoint {
    coords: DVector<f64>,
}

impl KleinPoint {
    pub fn new(coords: DVector<f64>) -> Result<Self> {
        if !(coords.norm() < 1.0) {
            return usage(format!(
                "Klein coordinates must lie in the open unit ball (|k| = {})",
                coords.norm()
            ));
        }
        Ok(KleinPoint { coords })
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }
}

/// `(x_1 / x_0, ..., x_d / x_0)`.
pub fn klein_project(p: &HPoint) -> KleinPoint {
    let x = p.as_slice();
    KleinPoint {
        coords: DVector::from_iterator(x.len() - 1, x[1..].iter().map(|a| a / x[0])),
    }
}

/// Inverse of [`klein_project`]: `(1, k) / sqrt(1 - |k|^2)`.
pub fn klein_lift(k: &KleinPoint) -> Result<HPoint> {
    let r2 = k.coords.norm_squared();
    if !(r2 < 1.0) {
        return usage("Klein point outside the unit ball");
    }
    let s = 1.0 / (1.0 - r2).sqrt();
    let spatial: Vec<f64> = k.coords.iter().map(|a| a * s).collect();
    HPoint::from_spatial(&spatial)
}
