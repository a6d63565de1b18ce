use nalgebra::{DMatrix, DVector};

use super::point::renormalize;
use super::{HPoint, TangentVector};
use crate::error::{usage, Error, Result};

/// An orthochronous Lorentz transformation of `R^{d,1}`, acting on `H^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct Isometry {
    matrix: DMatrix<f64>,
}

impl Isometry {
    pub fn identity(d: usize) -> Self {
        Isometry {
            matrix: DMatrix::identity(d + 1, d + 1),
        }
    }

    /// Checks `M^T J M = J` (relative to the size of `M`) and `M_00 >= 1`.
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        let n = matrix.nrows();
        if n != matrix.ncols() || n < 3 {
            return usage("isometry must be a square (d+1)x(d+1) matrix with d >= 2");
        }
        let scale = matrix.amax().powi(2).max(1.0);
        let mut j = DMatrix::identity(n, n);
        j[(0, 0)] = -1.0;
        let defect = (matrix.transpose() * &j * &matrix - &j).amax();
        if defect > 1e-8 * scale {
            return usage(format!(
                "matrix does not preserve the Minkowski form (defect {defect:e})"
            ));
        }
        if matrix[(0, 0)] < 1.0 - 1e-8 * scale {
            return usage("matrix is not orthochronous");
        }
        Ok(Isometry { matrix })
    }

    pub(crate) fn from_matrix_unchecked(matrix: DMatrix<f64>) -> Self {
        Isometry { matrix }
    }

    /// `diag(1, r)`: a rotation (or reflection) about the origin.
    pub fn embed_rotation(r: &DMatrix<f64>) -> Result<Self> {
        check_orthogonal(r)?;
        let d = r.nrows();
        let mut m = DMatrix::zeros(d + 1, d + 1);
        m[(0, 0)] = 1.0;
        m.view_mut((1, 1), (d, d)).copy_from(r);
        Ok(Isometry { matrix: m })
    }

    /// The boost of rapidity `eps` along the unit Euclidean direction `u`,
    /// taking `o` to `(cosh eps, sinh eps * u)`. Its differential transports
    /// frames parallel along that geodesic.
    pub fn step(u: &[f64], eps: f64) -> Self {
        let d = u.len();
        let (ch, sh) = (eps.cosh(), eps.sinh());
        let mut m = DMatrix::identity(d + 1, d + 1);
        m[(0, 0)] = ch;
        for i in 0..d {
            m[(0, 1 + i)] = sh * u[i];
            m[(1 + i, 0)] = sh * u[i];
            for k in 0..d {
                m[(1 + i, 1 + k)] += (ch - 1.0) * u[i] * u[k];
            }
        }
        Isometry { matrix: m }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows() - 1
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Isometry) -> Isometry {
        Isometry {
            matrix: &self.matrix * &other.matrix,
        }
    }

    /// `J M^T J`, exact for Lorentz matrices.
    pub fn inverse(&self) -> Isometry {
        let mut m = self.matrix.transpose();
        let n = m.nrows();
        for i in 1..n {
            m[(0, i)] = -m[(0, i)];
            m[(i, 0)] = -m[(i, 0)];
        }
        Isometry { matrix: m }
    }

    /// Applies the map and renormalizes the image onto the hyperboloid.
    pub fn apply(&self, p: &HPoint) -> Result<HPoint> {
        if p.dim() != self.dim() {
            return usage("isometry and point dimensions differ");
        }
        let mut v = (&self.matrix * p.coords()).as_slice().to_vec();
        renormalize(&mut v)?;
        Ok(HPoint::from_vec_unchecked(v))
    }

    pub fn apply_vector(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.matrix * v
    }

    pub fn apply_tangent(&self, v: &TangentVector) -> Result<TangentVector> {
        let base = self.apply(v.base())?;
        Ok(TangentVector::from_parts_unchecked(
            base,
            self.apply_vector(v.vec()),
        ))
    }

    /// `L(o)`.
    pub fn image_of_origin(&self) -> Result<HPoint> {
        let mut v = self.matrix.column(0).iter().copied().collect::<Vec<_>>();
        renormalize(&mut v)?;
        Ok(HPoint::from_vec_unchecked(v))
    }

    /// The orthonormal tangent frame `L(e_1), ..., L(e_d)` at `L(o)`.
    pub fn frame_vectors(&self) -> Vec<DVector<f64>> {
        (1..=self.dim())
            .map(|j| self.matrix.column(j).into_owned())
            .collect()
    }
}

/// The boost taking `o` to `p` that acts as the identity on the Euclidean
/// orthocomplement of `p`'s spatial direction.
pub fn boost_to(p: &HPoint) -> Isometry {
    let x = p.as_slice();
    let d = p.dim();
    let mut m = DMatrix::identity(d + 1, d + 1);
    m[(0, 0)] = x[0];
    let w = 1.0 / (1.0 + x[0]);
    for i in 0..d {
        m[(0, 1 + i)] = x[1 + i];
        m[(1 + i, 0)] = x[1 + i];
        for k in 0..d {
            m[(1 + i, 1 + k)] += x[1 + i] * x[1 + k] * w;
        }
    }
    Isometry { matrix: m }
}

/// `boost_to(p) ∘ diag(1, r) ∘ boost_to(p)^{-1}`: the isometry fixing `p`
/// that acts as `r` in the boosted standard frame at `p`.
pub fn rotation_fixing(p: &HPoint, r: &DMatrix<f64>) -> Result<Isometry> {
    if r.nrows() != p.dim() {
        return usage("rotation dimension does not match the point");
    }
    let b = boost_to(p);
    let e = Isometry::embed_rotation(r)?;
    Ok(b.compose(&e).compose(&b.inverse()))
}

fn check_orthogonal(r: &DMatrix<f64>) -> Result<()> {
    if r.nrows() != r.ncols() {
        return usage("rotation must be square");
    }
    let defect = (r.transpose() * r - DMatrix::identity(r.nrows(), r.nrows())).amax();
    if defect > 1e-9 {
        return Err(Error::Usage(format!(
            "matrix is not orthogonal (defect {defect:e})"
        )));
    }
    Ok(())
}

/// In-place `v <- B v` for the step boost of direction `u` with
/// `ch = cosh eps`, `sh = sinh eps` (pass `-sh` for the inverse).
/// The time coordinate is recomputed from the spatial part afterwards; the
/// return value is the new squared spatial norm, i.e. `sinh^2` of the distance
/// from the origin.
#[inline]
pub(crate) fn boost_apply(u: &[f64], ch: f64, sh: f64, v: &mut [f64]) -> f64 {
    let mut us = 0.0;
    for (ui, vi) in u.iter().zip(&v[1..]) {
        us += ui * vi;
    }
    let v0 = v[0];
    let coef = (ch - 1.0) * us + sh * v0;
    let mut n2 = 0.0;
    for (ui, vi) in u.iter().zip(v[1..].iter_mut()) {
        *vi += coef * ui;
        n2 += *vi * *vi;
    }
    v[0] = (1.0 + n2).sqrt();
    n2
}

/// Coordinates of `x` in the frame `boost_to(p)`, i.e. `boost_to(p)^{-1} x`.
pub(crate) fn recentre(p: &[f64], x: &[f64]) -> Vec<f64> {
    let d = p.len() - 1;
    let mut ps_xs = 0.0;
    for i in 1..=d {
        ps_xs += p[i] * x[i];
    }
    let coef = x[0] - ps_xs / (1.0 + p[0]);
    let mut out = vec![0.0; d + 1];
    let mut n2 = 0.0;
    for i in 1..=d {
        out[i] = x[i] - p[i] * coef;
        n2 += out[i] * out[i];
    }
    out[0] = (1.0 + n2).sqrt();
    out
}
