//! The self-avoiding walk state.
//!
//! The canonical state is the sequence of frame-relative step directions.
//! Step `k` moves a distance `eps` from `x_k` along the tangent vector whose
//! coordinates in the frame at `x_k` are `directions[k]`, and the frame is
//! parallel-transported along that step. In matrix form the frame at `x_k` is
//! a Lorentz matrix `M_k` with `M_{k+1} = M_k B(u_k, eps)`, where `B(u, eps)`
//! is the step boost, and `x_k = M_k o`.
//!
//! Pair distances never go through the absolute coordinates of `x_k` (they
//! grow like `e^{dist(o, x_k)}` and cancel catastrophically). Instead the
//! position of `x_j` in the frame of `x_i` is built from the step boosts
//! between them, which keeps every distance at relative precision.

use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};
use crate::hyperbolic::{boost_apply, HPoint, Isometry, MAX_RADIUS};
use nalgebra::DMatrix;

/// Which sampler produces walks for an experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SamplerKind {
    #[default]
    Rejection,
    Mcmc,
}

/// MCMC knobs. Unset fields take size-dependent defaults, see [`McmcSettings::resolve`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct McmcSettings {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub burn_in: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thinning: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pivot_fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_max: Option<usize>,
}

/// Fully determined MCMC settings for a walk length.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolvedMcmc {
    pub burn_in: u64,
    pub thinning: u64,
    pub pivot_fraction: f64,
    pub block_max: usize,
}

impl McmcSettings {
    /// Defaults: `burn_in = 10 n^2`, `thinning = n`, `pivot_fraction = 0.8`,
    /// `block_max = min(n, 16)`. An explicit `block_max` is capped at `n`.
    pub fn resolve(&self, n: usize) -> ResolvedMcmc {
        let n64 = n as u64;
        ResolvedMcmc {
            burn_in: self.burn_in.unwrap_or(10 * n64 * n64),
            thinning: self.thinning.unwrap_or(n64.max(1)),
            pivot_fraction: self.pivot_fraction.unwrap_or(0.8),
            block_max: self.block_max.unwrap_or(16).min(n).max(1),
        }
    }
}

pub const DEFAULT_REJECTION_CAP: u64 = 10_000_000;

fn default_eps() -> f64 {
    1.0
}

fn default_cap() -> u64 {
    DEFAULT_REJECTION_CAP
}

/// Full configuration of one walk ensemble.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SawParams {
    pub d: usize,
    pub c: f64,
    pub n: usize,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub sampler: SamplerKind,
    #[serde(default)]
    pub mcmc: McmcSettings,
    #[serde(default = "default_cap")]
    pub rejection_cap: u64,
}

impl SawParams {
    pub fn new(d: usize, c: f64, n: usize) -> Self {
        SawParams {
            d,
            c,
            n,
            eps: 1.0,
            seed: 0,
            sampler: SamplerKind::Rejection,
            mcmc: McmcSettings::default(),
            rejection_cap: DEFAULT_REJECTION_CAP,
        }
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn with_sampler(mut self, sampler: SamplerKind) -> Self {
        self.sampler = sampler;
        self
    }

    pub fn with_mcmc(mut self, mcmc: McmcSettings) -> Self {
        self.mcmc = mcmc;
        self
    }

    /// Minimum allowed pair distance `c * eps`.
    pub fn avoidance_radius(&self) -> f64 {
        self.c * self.eps
    }

    pub fn resolved_mcmc(&self) -> ResolvedMcmc {
        self.mcmc.resolve(self.n)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.d < 2 {
            return bad(format!("dimension d must be >= 2, got {}", self.d));
        }
        if !(self.c > 0.0 && self.c < 1.0) {
            return bad(format!("c must lie in (0, 1), got {}", self.c));
        }
        if self.n < 1 {
            return bad("n must be >= 1".into());
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return bad(format!("eps must be positive, got {}", self.eps));
        }
        if self.n as f64 * self.eps > MAX_RADIUS {
            return bad(format!(
                "n * eps = {} exceeds the working radius {MAX_RADIUS}",
                self.n as f64 * self.eps
            ));
        }
        if self.rejection_cap == 0 {
            return bad("rejection_cap must be >= 1".into());
        }
        if let Some(p) = self.mcmc.pivot_fraction {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("pivot_fraction must lie in [0, 1], got {p}"));
            }
        }
        if self.mcmc.thinning == Some(0) {
            return bad("thinning must be >= 1".into());
        }
        if self.mcmc.block_max == Some(0) {
            return bad("block_max must be >= 1".into());
        }
        Ok(())
    }
}

/// Threshold test `dist > c eps` on squared spatial norms, with an exact
/// `asinh` fallback near the boundary so it agrees with the reported distances.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Clearance {
    radius: f64,
    lo: f64,
    hi: f64,
}

impl Clearance {
    pub(crate) fn new(radius: f64) -> Self {
        let s2 = radius.sinh().powi(2);
        Clearance {
            radius,
            lo: s2 * (1.0 - 1e-12),
            hi: s2 * (1.0 + 1e-12),
        }
    }

    #[inline]
    pub(crate) fn clear(&self, spatial_norm_sq: f64) -> bool {
        if spatial_norm_sq > self.hi {
            true
        } else if spatial_norm_sq < self.lo {
            false
        } else {
            spatial_norm_sq.sqrt().asinh() > self.radius
        }
    }
}

/// Precomputed step geometry shared by every chain computation on a walk.
#[derive(Clone, Copy, Debug)]
pub(crate) struct StepGeometry {
    pub d: usize,
    pub n: usize,
    pub ch: f64,
    pub sh: f64,
}

impl StepGeometry {
    pub(crate) fn new(d: usize, n: usize, eps: f64) -> Self {
        StepGeometry {
            d,
            n,
            ch: eps.cosh(),
            sh: eps.sinh(),
        }
    }

    #[inline]
    pub(crate) fn dir<'a>(&self, dirs: &'a [f64], k: usize) -> &'a [f64] {
        &dirs[k * self.d..(k + 1) * self.d]
    }

    /// Checks every non-adjacent pair `(a, b)` with `b >= first_b`.
    ///
    /// For each `b` the position of `x_b` is carried backwards through the
    /// frames `b-1, b-2, ..., 0`; the same loop backs [`Walk::pair_distances`],
    /// so both agree bit-for-bit.
    pub(crate) fn pairs_clear(&self, dirs: &[f64], clearance: &Clearance, first_b: usize, v: &mut [f64]) -> bool {
        for b in first_b.max(2)..=self.n {
            v.fill(0.0);
            v[0] = 1.0;
            boost_apply(self.dir(dirs, b - 1), self.ch, self.sh, v);
            for a in (0..b - 1).rev() {
                let s2 = boost_apply(self.dir(dirs, a), self.ch, self.sh, v);
                if !clearance.clear(s2) {
                    return false;
                }
            }
        }
        true
    }

    /// Checks only the pairs `(a, b)` with `b = last`, i.e. the newest vertex
    /// against all earlier non-adjacent ones.
    pub(crate) fn vertex_clear(&self, dirs: &[f64], clearance: &Clearance, last: usize, v: &mut [f64]) -> bool {
        if last < 2 {
            return true;
        }
        v.fill(0.0);
        v[0] = 1.0;
        boost_apply(self.dir(dirs, last - 1), self.ch, self.sh, v);
        for a in (0..last - 1).rev() {
            let s2 = boost_apply(self.dir(dirs, a), self.ch, self.sh, v);
            if !clearance.clear(s2) {
                return false;
            }
        }
        true
    }

    /// `out = m B(u, +-eps)` for column-major `(d+1) x (d+1)` matrices.
    #[inline]
    pub(crate) fn advance(&self, m: &[f64], u: &[f64], sh: f64, out: &mut [f64]) {
        let dd = self.d + 1;
        let mut w = [0.0f64; 16];
        let mut wv: Vec<f64>;
        let w: &mut [f64] = if dd <= 16 {
            &mut w[..dd]
        } else {
            wv = vec![0.0; dd];
            &mut wv
        };
        for (i, ui) in u.iter().enumerate() {
            let col = &m[(1 + i) * dd..(2 + i) * dd];
            for r in 0..dd {
                w[r] += ui * col[r];
            }
        }
        let ch = self.ch;
        for r in 0..dd {
            let c0 = m[r];
            out[r] = ch * c0 + sh * w[r];
        }
        for (j, uj) in u.iter().enumerate() {
            for r in 0..dd {
                let c0 = m[r];
                out[(1 + j) * dd + r] = m[(1 + j) * dd + r] + uj * (sh * c0 + (ch - 1.0) * w[r]);
            }
        }
    }
}

/// An `n`-step walk: directions plus cached frames and points.
#[derive(Clone, Debug)]
pub struct Walk {
    params: SawParams,
    directions: Vec<f64>,
    frames: Vec<f64>,
    points: Vec<f64>,
    valid: bool,
}

impl PartialEq for Walk {
    fn eq(&self, other: &Self) -> bool {
        self.params.d == other.params.d
            && self.params.n == other.params.n
            && self.params.c == other.params.c
            && self.params.eps == other.params.eps
            && self.directions == other.directions
            && self.frames == other.frames
    }
}

impl Walk {
    /// Develops frame-relative directions from the origin with the standard frame.
    pub fn develop(directions: &[Vec<f64>], params: &SawParams) -> Result<Walk> {
        let flat: Vec<f64> = directions.iter().flatten().copied().collect();
        if directions.iter().any(|u| u.len() != params.d) {
            return usage(format!("every direction must have length d = {}", params.d));
        }
        Self::from_flat(flat, params)
    }

    /// Develops from an arbitrary base frame (`base(o)` and `base(e_i)`).
    pub fn develop_from(base: &Isometry, directions: &[Vec<f64>], params: &SawParams) -> Result<Walk> {
        if base.dim() != params.d {
            return usage("base frame dimension differs from d");
        }
        let mut w = Self::develop(directions, params)?;
        w.frames[..(params.d + 1) * (params.d + 1)].copy_from_slice(base.matrix().as_slice());
        w.redevelop_from(0);
        Ok(w)
    }

    /// `directions` laid out row by row, `n * d` entries.
    pub fn from_flat(directions: Vec<f64>, params: &SawParams) -> Result<Walk> {
        let (d, n) = (params.d, params.n);
        if d < 2 || n < 1 {
            return usage("walk needs d >= 2 and n >= 1");
        }
        if directions.len() != n * d {
            return usage(format!(
                "expected {n} directions of length {d}, got {} values",
                directions.len()
            ));
        }
        for (k, u) in directions.chunks(d).enumerate() {
            let norm = u.iter().map(|a| a * a).sum::<f64>().sqrt();
            if !((norm - 1.0).abs() <= 1e-9) {
                return usage(format!("direction {k} is not unit (norm {norm})"));
            }
        }
        if !(params.eps > 0.0) || n as f64 * params.eps > MAX_RADIUS {
            return Err(Error::NumericIntegrity(format!(
                "walk of {n} steps of length {} exceeds the working radius",
                params.eps
            )));
        }
        let dd = d + 1;
        let mut frames = vec![0.0; (n + 1) * dd * dd];
        for i in 0..dd {
            frames[i * dd + i] = 1.0;
        }
        let mut w = Walk {
            params: params.clone(),
            directions,
            frames,
            points: vec![0.0; (n + 1) * dd],
            valid: false,
        };
        w.redevelop_from(0);
        Ok(w)
    }

    /// The straight walk with every direction `e_1`; self-avoiding for all `c < 1`.
    pub fn geodesic(params: &SawParams) -> Result<Walk> {
        let mut flat = vec![0.0; params.n * params.d];
        for k in 0..params.n {
            flat[k * params.d] = 1.0;
        }
        let mut w = Self::from_flat(flat, params)?;
        w.valid = true;
        Ok(w)
    }

    pub(crate) fn geometry(&self) -> StepGeometry {
        StepGeometry::new(self.params.d, self.params.n, self.params.eps)
    }

    /// Recomputes frames and points for vertices `first + 1 ..= n`.
    pub(crate) fn redevelop_from(&mut self, first: usize) {
        let g = self.geometry();
        let dd = g.d + 1;
        let fsz = dd * dd;
        if first == 0 {
            self.store_point(0);
        }
        for k in first..g.n {
            let (head, tail) = self.frames.split_at_mut((k + 1) * fsz);
            let m = &head[k * fsz..];
            g.advance(m, &self.directions[k * g.d..(k + 1) * g.d], g.sh, &mut tail[..fsz]);
            self.store_point(k + 1);
        }
    }

    fn store_point(&mut self, k: usize) {
        let dd = self.params.d + 1;
        let col = &self.frames[k * dd * dd..k * dd * dd + dd];
        let p = &mut self.points[k * dd..(k + 1) * dd];
        let mut n2 = 0.0;
        for r in 1..dd {
            p[r] = col[r];
            n2 += col[r] * col[r];
        }
        p[0] = (1.0 + n2).sqrt();
    }

    /// Replaces the directions from index `first` on with `proposal[first..]`
    /// if the result stays self-avoiding; the current walk must be valid.
    pub(crate) fn try_update(&mut self, first: usize, proposal: &[f64], scratch: &mut [f64]) -> bool {
        let g = self.geometry();
        let clearance = Clearance::new(self.params.avoidance_radius());
        if !g.pairs_clear(proposal, &clearance, first + 1, scratch) {
            return false;
        }
        self.directions[first * g.d..].copy_from_slice(&proposal[first * g.d..]);
        self.redevelop_from(first);
        true
    }

    pub(crate) fn set_valid(&mut self, valid: bool) {
        self.valid = valid;
    }

    pub(crate) fn flat_directions(&self) -> &[f64] {
        &self.directions
    }

    pub fn params(&self) -> &SawParams {
        &self.params
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn d(&self) -> usize {
        self.params.d
    }

    pub fn eps(&self) -> f64 {
        self.params.eps
    }

    /// Whether a sampler has certified this walk as self-avoiding.
    pub fn is_flagged_valid(&self) -> bool {
        self.valid
    }

    pub fn direction(&self, k: usize) -> &[f64] {
        let d = self.params.d;
        &self.directions[k * d..(k + 1) * d]
    }

    pub fn directions(&self) -> Vec<Vec<f64>> {
        self.directions.chunks(self.params.d).map(|c| c.to_vec()).collect()
    }

    /// Hyperboloid coordinates of `x_k` in the base frame.
    pub fn point_coords(&self, k: usize) -> &[f64] {
        let dd = self.params.d + 1;
        &self.points[k * dd..(k + 1) * dd]
    }

    pub fn point(&self, k: usize) -> HPoint {
        HPoint::from_vec_unchecked(self.point_coords(k).to_vec())
    }

    pub fn points(&self) -> Vec<HPoint> {
        (0..=self.params.n).map(|k| self.point(k)).collect()
    }

    /// The frame at `x_k` as the isometry taking `(o, e_1..e_d)` to it.
    pub fn frame(&self, k: usize) -> Isometry {
        let dd = self.params.d + 1;
        let m = &self.frames[k * dd * dd..(k + 1) * dd * dd];
        Isometry::from_matrix_unchecked(DMatrix::from_column_slice(dd, dd, m))
    }

    /// `dist(x_i, x_j)` through the chain of steps between them.
    pub fn pair_distance(&self, i: usize, j: usize) -> f64 {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        if a == b {
            return 0.0;
        }
        let g = self.geometry();
        let mut v = vec![0.0; g.d + 1];
        v[0] = 1.0;
        let mut s2 = 0.0;
        for k in (a..b).rev() {
            s2 = boost_apply(g.dir(&self.directions, k), g.ch, g.sh, &mut v);
        }
        s2.sqrt().asinh()
    }

    /// End-to-end displacement `dist(x_0, x_n)`.
    pub fn displacement(&self) -> f64 {
        self.pair_distance(0, self.params.n)
    }

    /// All pairwise distances, `table[i][j] = dist(x_i, x_j)`.
    pub fn pair_distances(&self) -> Vec<Vec<f64>> {
        let g = self.geometry();
        let n = g.n;
        let mut t = vec![vec![0.0; n + 1]; n + 1];
        let mut v = vec![0.0; g.d + 1];
        for b in 1..=n {
            v.fill(0.0);
            v[0] = 1.0;
            for a in (0..b).rev() {
                let s2 = boost_apply(g.dir(&self.directions, a), g.ch, g.sh, &mut v);
                let dist = s2.sqrt().asinh();
                t[a][b] = dist;
                t[b][a] = dist;
            }
        }
        t
    }

    /// True iff every pair `i < j` is more than `c * eps` apart (strict).
    pub fn is_self_avoiding(&self) -> bool {
        let g = self.geometry();
        let mut v = vec![0.0; g.d + 1];
        g.pairs_clear(&self.directions, &Clearance::new(self.params.avoidance_radius()), 2, &mut v)
    }

    /// Closest non-adjacent pair `|i - j| >= 2`, ties broken lexicographically.
    pub fn min_pairwise_gap(&self) -> Result<(f64, (usize, usize))> {
        let n = self.params.n;
        if n < 2 {
            return Err(Error::Degenerate(
                "walks with fewer than 2 steps have no non-adjacent pairs".into(),
            ));
        }
        let t = self.pair_distances();
        let mut best = (f64::INFINITY, (0, 2));
        for (i, row) in t.iter().enumerate() {
            for (j, &dist) in row.iter().enumerate().skip(i + 2) {
                if dist < best.0 {
                    best = (dist, (i, j));
                }
            }
        }
        Ok(best)
    }

    /// Coordinates of every vertex in the frame at `x_k` (so `x_k` sits at
    /// the origin), computed from the steps between them.
    pub fn positions_in_frame(&self, k: usize) -> Vec<Vec<f64>> {
        let g = self.geometry();
        let dd = g.d + 1;
        let fsz = dd * dd;
        let mut out = vec![Vec::new(); g.n + 1];
        let mut origin = vec![0.0; dd];
        origin[0] = 1.0;
        out[k] = origin;
        let mut m = identity_flat(dd);
        let mut next = vec![0.0; fsz];
        for j in k..g.n {
            g.advance(&m, g.dir(&self.directions, j), g.sh, &mut next);
            std::mem::swap(&mut m, &mut next);
            out[j + 1] = hyperboloid_column(&m, dd);
        }
        let mut m = identity_flat(dd);
        for j in (0..k).rev() {
            g.advance(&m, g.dir(&self.directions, j), -g.sh, &mut next);
            std::mem::swap(&mut m, &mut next);
            out[j] = hyperboloid_column(&m, dd);
        }
        out
    }

    /// Coordinates of `x_j` in the frame at `x_k`.
    pub fn position_in_frame(&self, j: usize, k: usize) -> Vec<f64> {
        let g = self.geometry();
        let mut v = vec![0.0; g.d + 1];
        v[0] = 1.0;
        if j > k {
            for m in (k..j).rev() {
                boost_apply(g.dir(&self.directions, m), g.ch, g.sh, &mut v);
            }
        } else {
            for m in j..k {
                boost_apply(g.dir(&self.directions, m), g.ch, -g.sh, &mut v);
            }
        }
        v
    }

    pub fn to_record(&self) -> WalkRecord {
        WalkRecord {
            d: self.params.d,
            c: self.params.c,
            n: self.params.n,
            eps: self.params.eps,
            directions: self.directions(),
            points: Some(self.points.chunks(self.params.d + 1).map(|c| c.to_vec()).collect()),
        }
    }

    /// Rebuilds a walk from its JSON record; stored points are ignored and
    /// recomputed from the directions.
    pub fn from_record(rec: &WalkRecord) -> Result<Walk> {
        let params = SawParams::new(rec.d, rec.c, rec.n).with_eps(rec.eps);
        params.validate()?;
        let mut w = Self::develop(&rec.directions, &params)?;
        w.valid = w.is_self_avoiding();
        Ok(w)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_record())?)
    }

    pub fn from_json(s: &str) -> Result<Walk> {
        let rec: WalkRecord = serde_json::from_str(s)?;
        Self::from_record(&rec)
    }
}

fn identity_flat(dd: usize) -> Vec<f64> {
    let mut m = vec![0.0; dd * dd];
    for i in 0..dd {
        m[i * dd + i] = 1.0;
    }
    m
}

fn hyperboloid_column(m: &[f64], dd: usize) -> Vec<f64> {
    let mut p = m[..dd].to_vec();
    p[0] = (1.0 + p[1..].iter().map(|a| a * a).sum::<f64>()).sqrt();
    p
}

/// On-disk walk format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkRecord {
    pub d: usize,
    pub c: f64,
    pub n: usize,
    pub eps: f64,
    pub directions: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
}
