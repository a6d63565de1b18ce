//! Convex hulls of finite point sets in `H^2` via the Klein model.
//!
//! Geodesics are chords in the Klein model, so the hyperbolic hull is the
//! Euclidean hull of the projected points. The projection is taken in the
//! frame of a central input point to keep the Klein coordinates away from
//! the ideal boundary, and each boundary distance is evaluated in the frame
//! of the point it belongs to.

use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};
use crate::hyperbolic::{dist_coords, origin_to_segment, recentre, HPoint};
use crate::walk::Walk;

/// Relative tolerance of the orientation predicate: `|cross| <= tol |b - a| |c - a|`
/// counts as collinear.
pub const COLLINEAR_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HullResult {
    /// Indices of the hull vertices in counter-clockwise order (in the Klein
    /// picture of the central frame). For a collinear input these are the two
    /// extreme points; for a single distinct point, just that point.
    pub boundary_vertices: Vec<usize>,
    /// Hyperbolic distance from every input point to the hull boundary.
    pub per_point_boundary_distance: Vec<f64>,
    /// Index of the point whose frame the Klein picture uses.
    pub centre: usize,
    /// Klein coordinates of every input point in that frame.
    pub klein: Vec<[f64; 2]>,
}

impl HullResult {
    /// Whether the hull degenerated to a segment or a point.
    pub fn is_degenerate(&self) -> bool {
        self.boundary_vertices.len() < 3
    }

    /// Boundary edges as index pairs; a degenerate hull has at most one.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let b = &self.boundary_vertices;
        match b.len() {
            0 | 1 => Vec::new(),
            2 => vec![(b[0], b[1])],
            k => (0..k).map(|i| (b[i], b[(i + 1) % k])).collect(),
        }
    }
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn norm(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Strict left turn `o -> a -> b`, with near-collinear triples counted as not left.
fn left_turn(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> bool {
    cross(o, a, b) > COLLINEAR_TOL * norm(a, o) * norm(b, o)
}

/// Andrew's monotone chain on 2-d points; returns indices of the strict hull
/// vertices counter-clockwise, starting from the lexicographically smallest.
pub fn monotone_chain(pts: &[[f64; 2]]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    idx.sort_by(|&i, &j| {
        pts[i][0]
            .total_cmp(&pts[j][0])
            .then(pts[i][1].total_cmp(&pts[j][1]))
            .then(i.cmp(&j))
    });
    idx.dedup_by(|a, b| pts[*a] == pts[*b]);
    if idx.len() <= 2 {
        return idx;
    }
    let mut hull: Vec<usize> = Vec::with_capacity(2 * idx.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &usize>> = if pass == 0 {
            Box::new(idx.iter())
        } else {
            Box::new(idx.iter().rev())
        };
        for &i in iter {
            while hull.len() >= start + 2
                && !left_turn(pts[hull[hull.len() - 2]], pts[hull[hull.len() - 1]], pts[i])
            {
                hull.pop();
            }
            hull.push(i);
        }
        hull.pop();
    }
    if hull.len() == 2 && hull[0] == hull[1] {
        hull.pop();
    }
    hull
}

/// All hull computations go through this: `view(k)` gives every input point
/// in coordinates centred at point `k`, `len(i, j)` their pairwise distances.
fn hull_core(
    count: usize,
    view: impl Fn(usize) -> Vec<Vec<f64>>,
    len: impl Fn(usize, usize) -> f64,
) -> Result<HullResult> {
    if count == 0 {
        return usage("convex hull of an empty point set");
    }
    // centre: the point minimizing its largest distance to the others
    let centre = (0..count)
        .map(|i| (i, (0..count).map(|j| len(i, j)).fold(0.0, f64::max)))
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let central = view(centre);
    let klein: Vec<[f64; 2]> = central.iter().map(|x| [x[1] / x[0], x[2] / x[0]]).collect();
    let mut boundary = monotone_chain(&klein);
    if boundary.len() == 2 {
        // a collinear set: keep the extreme pair, i.e. the farthest-apart one
        boundary = extreme_pair(count, &len);
    }
    let edges: Vec<(usize, usize)> = match boundary.len() {
        1 => Vec::new(),
        2 => vec![(boundary[0], boundary[1])],
        k => (0..k).map(|i| (boundary[i], boundary[(i + 1) % k])).collect(),
    };
    let per_point: Vec<f64> = (0..count)
        .map(|k| {
            if edges.is_empty() {
                return len(k, boundary[0]);
            }
            let local = view(k);
            edges
                .iter()
                .map(|&(i, j)| origin_to_segment(&local[i], &local[j], len(i, j)))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    Ok(HullResult {
        boundary_vertices: boundary,
        per_point_boundary_distance: per_point,
        centre,
        klein,
    })
}

fn extreme_pair(count: usize, len: &impl Fn(usize, usize) -> f64) -> Vec<usize> {
    let mut best = (f64::NEG_INFINITY, 0, 0);
    for i in 0..count {
        for j in i + 1..count {
            let l = len(i, j);
            if l > best.0 {
                best = (l, i, j);
            }
        }
    }
    vec![best.1, best.2]
}

fn check_planar(points: &[HPoint]) -> Result<()> {
    if let Some(p) = points.iter().find(|p| p.dim() != 2) {
        return Err(Error::Usage(format!("convex hulls need d = 2, got d = {}", p.dim())));
    }
    Ok(())
}

/// Hull of arbitrary points of `H^2` given in absolute coordinates.
pub fn convex_hull(points: &[HPoint]) -> Result<HullResult> {
    check_planar(points)?;
    let raw: Vec<&[f64]> = points.iter().map(|p| p.as_slice()).collect();
    let table: Vec<Vec<f64>> = raw
        .iter()
        .map(|a| raw.iter().map(|b| dist_coords(a, b)).collect())
        .collect();
    hull_core(
        points.len(),
        |k| {
            raw.iter()
                .enumerate()
                .map(|(j, x)| {
                    if j == k {
                        HPoint::origin(2).as_slice().to_vec()
                    } else {
                        recentre(raw[k], x)
                    }
                })
                .collect()
        },
        |i, j| table[i][j],
    )
}

/// Hull of a walk's vertices, with every distance taken from the step chain.
pub fn walk_hull(walk: &Walk) -> Result<HullResult> {
    if walk.d() != 2 {
        return usage(format!("convex hulls need d = 2, got d = {}", walk.d()));
    }
    let table = walk.pair_distances();
    hull_core(walk.n() + 1, |k| walk.positions_in_frame(k), |i, j| table[i][j])
}

/// Fraction of the walk's vertices within `(1 - c) eps / 2` of the hull
/// boundary, together with that threshold.
pub fn surface_density(walk: &Walk) -> Result<(f64, f64)> {
    let p = walk.params();
    let threshold = 0.5 * (1.0 - p.c) * p.eps;
    let hull = walk_hull(walk)?;
    let near = hull
        .per_point_boundary_distance
        .iter()
        .filter(|&&h| h <= threshold)
        .count();
    Ok((near as f64 / (walk.n() + 1) as f64, threshold))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::{dist_to_geodesic_segment, exp_map, line_distance_by_search, TangentVector};
    use crate::walk::SawParams;

    fn polar(angle: f64, r: f64) -> HPoint {
        exp_map(&TangentVector::at_origin(&[angle.cos(), angle.sin()]).unwrap(), r).unwrap()
    }

    #[test]
    fn triangle_is_its_own_hull() {
        let pts = vec![polar(0.0, 1.0), polar(2.0, 1.5), polar(4.0, 0.7)];
        let h = convex_hull(&pts).unwrap();
        let mut b = h.boundary_vertices.clone();
        b.sort();
        assert_eq!(b, vec![0, 1, 2]);
        assert!(h.per_point_boundary_distance.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn one_or_two_points() {
        let h = convex_hull(&[polar(0.3, 2.0)]).unwrap();
        assert_eq!(h.boundary_vertices, vec![0]);
        assert_eq!(h.per_point_boundary_distance, vec![0.0]);
        let h = convex_hull(&[polar(0.3, 2.0), polar(2.0, 1.0)]).unwrap();
        assert_eq!(h.boundary_vertices.len(), 2);
        assert!(h.per_point_boundary_distance.iter().all(|&x| x == 0.0));
        assert!(convex_hull(&[]).is_err());
        assert!(convex_hull(&[HPoint::origin(3)]).is_err());
    }

    #[test]
    fn interior_origin_distance_matches_search() {
        let pts = vec![polar(0.1, 2.0), polar(2.2, 2.1), polar(4.3, 1.9), HPoint::origin(2)];
        let h = convex_hull(&pts).unwrap();
        assert_eq!(h.boundary_vertices.len(), 3);
        assert!(!h.boundary_vertices.contains(&3));
        let o = &pts[3];
        let expected = [(0, 1), (1, 2), (2, 0)]
            .iter()
            .map(|&(i, j)| {
                let closed = dist_to_geodesic_segment(o, &pts[i], &pts[j]);
                let searched = line_distance_by_search(o, &pts[i], &pts[j]).unwrap();
                assert!((closed - searched).abs() < 1e-7);
                closed
            })
            .fold(f64::INFINITY, f64::min);
        assert!((h.per_point_boundary_distance[3] - expected).abs() < 1e-9);
        assert!(expected > 0.5);
    }

    #[test]
    fn collinear_points_form_a_segment() {
        let pts: Vec<HPoint> = [-2.0, -0.5, 0.0, 1.0, 3.0].iter().map(|&t| HPoint::on_axis(2, t)).collect();
        let h = convex_hull(&pts).unwrap();
        let mut b = h.boundary_vertices.clone();
        b.sort();
        assert_eq!(b, vec![0, 4]);
        assert!(h.per_point_boundary_distance.iter().all(|&x| x < 1e-9));
    }

    #[test]
    fn monotone_chain_drops_collinear_and_duplicates() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [2.0, 2.0], [0.0, 2.0], [1.0, 1.0], [2.0, 2.0]];
        let h = monotone_chain(&pts);
        assert_eq!(h, vec![0, 2, 3, 4]);
    }

    #[test]
    fn geodesic_walk_density_is_one() {
        let w = Walk::geodesic(&SawParams::new(2, 0.5, 12)).unwrap();
        let (f, threshold) = surface_density(&w).unwrap();
        assert_eq!(f, 1.0);
        assert_eq!(threshold, 0.25);
    }

    #[test]
    fn short_walks_have_density_one() {
        let p = SawParams::new(2, 0.5, 2);
        let w = Walk::develop(&[vec![1.0, 0.0], vec![0.6, 0.8]], &p).unwrap();
        assert_eq!(surface_density(&w).unwrap().0, 1.0);
        assert!(surface_density(&Walk::geodesic(&SawParams::new(3, 0.5, 2)).unwrap()).is_err());
    }
}
