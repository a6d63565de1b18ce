//! Distances from walk vertices to the chord `[x_0, x_n]`.

use crate::error::{Error, Result};
use crate::hyperbolic::origin_to_segment;
use crate::walk::Walk;

/// `dist(x_i, [x_0, x_n])` for every vertex, each evaluated in the frame at `x_i`.
pub fn chord_distances(walk: &Walk) -> Result<Vec<f64>> {
    let n = walk.n();
    let len = walk.displacement();
    if len < 1e-12 {
        return Err(Error::Degenerate("x_0 and x_n coincide; the chord is undefined".into()));
    }
    Ok((0..=n)
        .map(|i| {
            if i == 0 || i == n {
                return 0.0;
            }
            origin_to_segment(&walk.position_in_frame(0, i), &walk.position_in_frame(n, i), len)
        })
        .collect())
}

/// Fraction of the `n + 1` vertices within `radius` of the chord `[x_0, x_n]`.
pub fn near_geodesic_fraction(walk: &Walk, radius: f64) -> Result<f64> {
    Ok(near_count(walk, radius)? as f64 / (walk.n() + 1) as f64)
}

/// Number of vertices within `radius` of the chord `[x_0, x_n]`.
pub fn near_count(walk: &Walk, radius: f64) -> Result<usize> {
    if !(radius >= 0.0) {
        return Err(Error::Usage(format!("radius must be >= 0, got {radius}")));
    }
    Ok(chord_distances(walk)?.iter().filter(|&&h| h <= radius).count())
}
