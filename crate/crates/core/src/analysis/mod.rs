//! Geometric diagnostics: thin triangles, the two-geodesics bound, Klein
//! hulls and distances to the end-to-end chord.

mod delta;
mod hull;
mod near;
mod two_geodesics;

pub use delta::{estimate_delta, random_triangle, side_thinness, triangle_thinness, DeltaEstimate, SIDE_STEP};
pub use hull::{convex_hull, monotone_chain, surface_density, walk_hull, HullResult, COLLINEAR_TOL};
pub use near::{chord_distances, near_count, near_geodesic_fraction};
pub use two_geodesics::{segment_gap, verify_two_geodesics, Instance, TwoGeodesicsConfig, TwoGeodesicsReport};
