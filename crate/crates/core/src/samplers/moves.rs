use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Result};
use crate::hyperbolic::{random_rotation, random_unit_direction};
use crate::walk::Walk;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MoveKind {
    Pivot,
    Regrow,
}

/// Reusable buffers so repeated moves do not allocate.
#[derive(Clone, Debug, Default)]
pub(crate) struct Scratch {
    proposal: Vec<f64>,
    point: Vec<f64>,
}

impl Scratch {
    fn prepare(&mut self, w: &Walk) {
        self.proposal.clear();
        self.proposal.extend_from_slice(w.flat_directions());
        self.point.resize(w.d() + 1, 0.0);
    }
}

/// Rigid pivot about `x_i`: the tail `x_{i+1}..x_n` is moved by the isometry
/// fixing `x_i` that acts as `q` on the frame at `x_i`. With parallel-transported
/// frames this rotates every direction from index `i` on by `q`.
pub(crate) fn pivot_in_place(w: &mut Walk, i: usize, q: &DMatrix<f64>, s: &mut Scratch) -> bool {
    let d = w.d();
    s.prepare(w);
    let mut rotated = [0.0f64; 16];
    let mut spill = Vec::new();
    let buf: &mut [f64] = if d <= 16 {
        &mut rotated[..d]
    } else {
        spill.resize(d, 0.0);
        &mut spill
    };
    for u in s.proposal[i * d..].chunks_mut(d) {
        for (r, out) in buf.iter_mut().enumerate() {
            *out = (0..d).map(|c| q[(r, c)] * u[c]).sum();
        }
        u.copy_from_slice(buf);
    }
    w.try_update(i, &s.proposal, &mut s.point)
}

/// Replaces directions `start..start + block.len()` with `block`.
pub(crate) fn regrow_in_place(w: &mut Walk, start: usize, block: &[f64], s: &mut Scratch) -> bool {
    s.prepare(w);
    let d = w.d();
    s.proposal[start * d..start * d + block.len()].copy_from_slice(block);
    w.try_update(start, &s.proposal, &mut s.point)
}

pub(crate) fn random_pivot<R: Rng + ?Sized>(w: &mut Walk, rng: &mut R, s: &mut Scratch) -> bool {
    let i = rng.random_range(0..w.n());
    let q = random_rotation(w.d(), rng);
    pivot_in_place(w, i, &q, s)
}

pub(crate) fn random_regrow<R: Rng + ?Sized>(w: &mut Walk, rng: &mut R, block_max: usize, s: &mut Scratch) -> bool {
    let n = w.n();
    let len = rng.random_range(1..=block_max.clamp(1, n));
    let start = rng.random_range(0..=n - len);
    let mut block = Vec::with_capacity(len * w.d());
    for _ in 0..len {
        block.extend(random_unit_direction(w.d(), rng));
    }
    regrow_in_place(w, start, &block, s)
}

/// One pivot move with a uniform pivot index and a Haar rotation. The walk
/// is left unchanged when the proposal is not self-avoiding.
pub fn pivot_move<R: Rng + ?Sized>(w: &mut Walk, rng: &mut R) -> bool {
    random_pivot(w, rng, &mut Scratch::default())
}

/// Pivot about `x_i` with a caller-chosen orthogonal `q`.
pub fn pivot_with(w: &mut Walk, i: usize, q: &DMatrix<f64>) -> Result<bool> {
    if i >= w.n() {
        return usage(format!("pivot index {i} out of range for n = {}", w.n()));
    }
    let d = w.d();
    if q.shape() != (d, d) || (q.transpose() * q - DMatrix::identity(d, d)).amax() > 1e-9 {
        return usage("pivot matrix must be orthogonal of size d x d");
    }
    Ok(pivot_in_place(w, i, q, &mut Scratch::default()))
}

/// One block-regrow move: a block of length uniform in `1..=block_max` at a
/// uniform position gets fresh i.i.d. directions.
pub fn block_regrow_move<R: Rng + ?Sized>(w: &mut Walk, rng: &mut R, block_max: usize) -> Result<bool> {
    if block_max == 0 || block_max > w.n() {
        return usage(format!("block_max must lie in 1..={}", w.n()));
    }
    Ok(random_regrow(w, rng, block_max, &mut Scratch::default()))
}

/// Regrow with caller-chosen unit directions starting at index `start`.
pub fn regrow_with(w: &mut Walk, start: usize, block: &[Vec<f64>]) -> Result<bool> {
    let d = w.d();
    if block.is_empty() || start + block.len() > w.n() {
        return usage("regrow block out of range");
    }
    if block.iter().any(|u| u.len() != d || (u.iter().map(|a| a * a).sum::<f64>().sqrt() - 1.0).abs() > 1e-9) {
        return usage("regrow directions must be unit vectors of length d");
    }
    let flat: Vec<f64> = block.iter().flatten().copied().collect();
    Ok(regrow_in_place(w, start, &flat, &mut Scratch::default()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use crate::walk::SawParams;

    fn walk() -> Walk {
        let p = SawParams::new(3, 0.5, 4);
        let dirs = vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.6, 0.8],
            vec![0.8, 0.0, 0.6],
        ];
        let mut w = Walk::develop(&dirs, &p).unwrap();
        assert!(w.is_self_avoiding());
        w.set_valid(true);
        w
    }

    #[test]
    fn identity_pivot_is_a_no_op() {
        let mut w = walk();
        let before = w.clone();
        assert!(pivot_with(&mut w, 1, &DMatrix::identity(3, 3)).unwrap());
        assert_eq!(w, before);
    }

    #[test]
    fn reversing_pivot_is_rejected_and_leaves_walk() {
        let p = SawParams::new(2, 0.5, 2);
        let mut w = Walk::geodesic(&p).unwrap();
        let before = w.clone();
        let flip = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 1.0]);
        assert!(!pivot_with(&mut w, 1, &flip).unwrap());
        assert_eq!(w, before);
    }

    #[test]
    fn pivot_preserves_distances_within_tail() {
        let mut w = walk();
        let before = w.pair_distances();
        let q = random_rotation(3, &mut stream_rng(5, 0));
        if pivot_with(&mut w, 1, &q).unwrap() {
            let after = w.pair_distances();
            for a in 1..=4 {
                for b in 1..=4 {
                    assert!((before[a][b] - after[a][b]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn rejected_regrow_leaves_walk() {
        let p = SawParams::new(2, 0.5, 3);
        let mut w = Walk::geodesic(&p).unwrap();
        let before = w.clone();
        assert!(!regrow_with(&mut w, 1, &[vec![-1.0, 0.0]]).unwrap());
        assert_eq!(w, before);
        assert!(regrow_with(&mut w, 1, &[vec![0.0, 1.0]]).unwrap());
        assert_eq!(w.direction(1), &[0.0, 1.0]);
        assert!(w.is_self_avoiding());
    }

    #[test]
    fn bad_arguments() {
        let mut w = walk();
        assert!(pivot_with(&mut w, 4, &DMatrix::identity(3, 3)).is_err());
        assert!(pivot_with(&mut w, 0, &DMatrix::identity(2, 2)).is_err());
        assert!(pivot_with(&mut w, 0, &(DMatrix::identity(3, 3) * 2.0)).is_err());
        assert!(block_regrow_move(&mut w, &mut stream_rng(0, 0), 5).is_err());
        assert!(regrow_with(&mut w, 3, &[vec![1.0, 0.0, 0.0], vec![1.0, 0.0, 0.0]]).is_err());
    }

    #[test]
    fn random_moves_keep_walk_valid() {
        let p = SawParams::new(2, 0.6, 12);
        let mut w = Walk::geodesic(&p).unwrap();
        let mut rng = stream_rng(8, 0);
        for k in 0..500 {
            if k % 2 == 0 {
                pivot_move(&mut w, &mut rng);
            } else {
                block_regrow_move(&mut w, &mut rng, 4).unwrap();
            }
            assert!(w.is_self_avoiding());
        }
        for k in 0..12 {
            assert!((w.pair_distance(k, k + 1) - 1.0).abs() < 1e-8);
        }
    }
}
