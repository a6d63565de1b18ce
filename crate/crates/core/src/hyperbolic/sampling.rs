use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

/// A uniform point of the Euclidean unit sphere `S^{d-1}` (normalized
/// isotropic Gaussian). Interpreted in whatever frame the caller attaches.
pub fn random_unit_direction<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if n > 1e-300 {
            return v.into_iter().map(|a| a / n).collect();
        }
    }
}

/// A Haar-distributed element of `O(d)`.
///
/// QR of a Gaussian matrix with the signs of `R`'s diagonal folded into `Q`
/// gives Haar measure; one extra fair sign flip of the first row keeps it
/// Haar while making the reflection component explicit.
pub fn random_rotation<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    if rng.random::<bool>() {
        q.row_mut(0).neg_mut();
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn directions_are_unit() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in 2..6 {
            let u = random_unit_direction(d, &mut rng);
            assert_eq!(u.len(), d);
            assert!((u.iter().map(|a| a * a).sum::<f64>().sqrt() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rotations_are_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for d in 2..6 {
            let q = random_rotation(d, &mut rng);
            let defect = (q.transpose() * &q - DMatrix::identity(d, d)).amax();
            assert!(defect < 1e-9);
        }
    }
}
