//! Continuous self-avoiding walks on hyperbolic space.
//!
//! Points live on the hyperboloid model of `H^d`. A walk is a sequence of
//! frame-relative unit step directions; positions and frames are caches
//! developed from those directions. On top of that sit an exact rejection
//! sampler, a pivot/block-regrow Metropolis chain, geometric analyses
//! (thin triangles, Klein-model hulls) and the experiment drivers used by
//! the `hypersaw` command-line tool.

pub mod analysis;
pub mod error;
pub mod experiments;
pub mod hyperbolic;
pub mod rng;
pub mod samplers;
pub mod stats;
pub mod walk;

pub use error::{Error, Result};
pub use hyperbolic::{HPoint, Isometry, KleinPoint, TangentVector};
pub use walk::{McmcSettings, SamplerKind, SawParams, Walk, WalkRecord};
