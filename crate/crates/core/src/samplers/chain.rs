use rand::Rng;
use serde::{Deserialize, Serialize};

use super::moves::{random_pivot, random_regrow, MoveKind, Scratch};
use crate::error::{usage, Result};
use crate::rng::SawRng;
use crate::stats::batch_means;
use crate::walk::{ResolvedMcmc, SamplerKind, SawParams, Walk};

/// Proposal and acceptance counters of a chain.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ChainStats {
    pub proposals: u64,
    pub acceptances: u64,
    pub pivot_proposals: u64,
    pub pivot_acceptances: u64,
    pub regrow_proposals: u64,
    pub regrow_acceptances: u64,
    /// Integrated autocorrelation time of the emitted displacements (batch means).
    pub autocorrelation_time: Option<f64>,
}

fn rate(accepted: u64, proposed: u64) -> Option<f64> {
    (proposed > 0).then(|| accepted as f64 / proposed as f64)
}

impl ChainStats {
    pub fn acceptance_rate(&self) -> Option<f64> {
        rate(self.acceptances, self.proposals)
    }

    pub fn pivot_rate(&self) -> Option<f64> {
        rate(self.pivot_acceptances, self.pivot_proposals)
    }

    pub fn regrow_rate(&self) -> Option<f64> {
        rate(self.regrow_acceptances, self.regrow_proposals)
    }

    fn record(&mut self, kind: MoveKind, accepted: bool) {
        let a = accepted as u64;
        self.proposals += 1;
        self.acceptances += a;
        match kind {
            MoveKind::Pivot => {
                self.pivot_proposals += 1;
                self.pivot_acceptances += a;
            }
            MoveKind::Regrow => {
                self.regrow_proposals += 1;
                self.regrow_acceptances += a;
            }
        }
    }
}

/// A pivot + block-regrow Metropolis chain targeting the SAW measure.
///
/// Every proposal is accepted iff the result is self-avoiding. Both proposal
/// kinds are symmetric with respect to the unconditioned product measure, so
/// this is a Metropolis kernel for the conditioned one.
#[derive(Clone, Debug)]
pub struct Chain {
    walk: Walk,
    rng: SawRng,
    settings: ResolvedMcmc,
    stats: ChainStats,
    burned_in: bool,
    displacements: Vec<f64>,
    scratch: Scratch,
}

impl Chain {
    /// Starts from the geodesic walk, which is valid for every `c < 1`.
    pub fn new(params: &SawParams, rng: SawRng) -> Result<Chain> {
        params.validate()?;
        let walk = Walk::geodesic(params)?;
        Ok(Self::assemble(walk, rng, false))
    }

    /// Starts from a given self-avoiding walk; burn-in is still applied.
    pub fn from_walk(walk: Walk, rng: SawRng) -> Result<Chain> {
        walk.params().validate()?;
        if !walk.is_self_avoiding() {
            return usage("a chain must start from a self-avoiding walk");
        }
        let mut walk = walk;
        walk.set_valid(true);
        Ok(Self::assemble(walk, rng, false))
    }

    fn assemble(walk: Walk, rng: SawRng, burned_in: bool) -> Chain {
        let settings = walk.params().resolved_mcmc();
        Chain {
            walk,
            rng,
            settings,
            stats: ChainStats::default(),
            burned_in,
            displacements: Vec::new(),
            scratch: Scratch::default(),
        }
    }

    pub fn settings(&self) -> &ResolvedMcmc {
        &self.settings
    }

    pub fn walk(&self) -> &Walk {
        &self.walk
    }

    /// One Metropolis step; returns which move was tried and whether it was accepted.
    pub fn step(&mut self) -> (MoveKind, bool) {
        let pivot = self.rng.random::<f64>() < self.settings.pivot_fraction;
        let (kind, accepted) = if pivot {
            (MoveKind::Pivot, random_pivot(&mut self.walk, &mut self.rng, &mut self.scratch))
        } else {
            let bm = self.settings.block_max;
            (MoveKind::Regrow, random_regrow(&mut self.walk, &mut self.rng, bm, &mut self.scratch))
        };
        self.stats.record(kind, accepted);
        (kind, accepted)
    }

    fn ensure_burned_in(&mut self) {
        if !self.burned_in {
            for _ in 0..self.settings.burn_in {
                self.step();
            }
            self.burned_in = true;
        }
    }

    /// Advances by `thinning` steps (after burn-in on first use) and returns the state.
    pub fn next_sample(&mut self) -> &Walk {
        self.ensure_burned_in();
        for _ in 0..self.settings.thinning {
            self.step();
        }
        self.displacements.push(self.walk.displacement());
        &self.walk
    }

    /// `count` thinned samples, returning their end-to-end displacements.
    pub fn sample_displacements(&mut self, count: usize) -> Vec<f64> {
        (0..count).map(|_| self.next_sample().displacement()).collect()
    }

    /// Counters plus the autocorrelation time of all displacements emitted so far.
    pub fn stats(&self) -> ChainStats {
        let mut s = self.stats.clone();
        s.autocorrelation_time = batch_means(&self.displacements).ok().and_then(|b| b.autocorrelation_time);
        s
    }

    pub fn emitted(&self) -> usize {
        self.displacements.len()
    }

    pub fn checkpoint(&self) -> ChainCheckpoint {
        ChainCheckpoint {
            params: self.walk.params().clone(),
            directions: self.walk.directions(),
            rng: self.rng.clone(),
            stats: self.stats.clone(),
            burned_in: self.burned_in,
            displacements: self.displacements.clone(),
        }
    }

    /// Continues a checkpointed chain exactly where it stopped.
    pub fn resume(cp: ChainCheckpoint) -> Result<Chain> {
        cp.params.validate()?;
        let mut walk = Walk::develop(&cp.directions, &cp.params)?;
        if !walk.is_self_avoiding() {
            return usage("checkpointed walk is not self-avoiding");
        }
        walk.set_valid(true);
        let mut chain = Self::assemble(walk, cp.rng, cp.burned_in);
        chain.stats = cp.stats;
        chain.displacements = cp.displacements;
        Ok(chain)
    }
}

/// Serializable chain state: parameters, current directions, generator
/// position and counters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainCheckpoint {
    pub params: SawParams,
    pub directions: Vec<Vec<f64>>,
    pub rng: SawRng,
    pub stats: ChainStats,
    pub burned_in: bool,
    pub displacements: Vec<f64>,
}

/// Runs a fresh chain and collects `samples` thinned walks.
pub fn run_chain(params: &SawParams, samples: usize, rng: SawRng) -> Result<(Vec<Walk>, ChainStats)> {
    if params.sampler != SamplerKind::Mcmc {
        return usage("run_chain requires the mcmc sampler");
    }
    let mut chain = Chain::new(params, rng)?;
    let walks = (0..samples).map(|_| chain.next_sample().clone()).collect();
    Ok((walks, chain.stats()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use crate::walk::McmcSettings;

    fn mcmc(n: usize) -> SawParams {
        SawParams::new(2, 0.5, n).with_sampler(SamplerKind::Mcmc)
    }

    #[test]
    fn single_step_chain_accepts_everything() {
        let p = mcmc(1).with_mcmc(McmcSettings {
            burn_in: Some(0),
            thinning: Some(1),
            ..Default::default()
        });
        let (walks, stats) = run_chain(&p, 200, stream_rng(1, 0)).unwrap();
        assert_eq!(walks.len(), 200);
        assert!(walks.iter().all(|w| w.is_self_avoiding()));
        assert_eq!(stats.pivot_rate(), Some(1.0));
        assert_eq!(stats.acceptances, stats.proposals);
    }

    #[test]
    fn emitted_walks_are_valid_and_reproducible() {
        let p = mcmc(8);
        let (a, sa) = run_chain(&p, 30, stream_rng(4, 0)).unwrap();
        let (b, sb) = run_chain(&p, 30, stream_rng(4, 0)).unwrap();
        assert_eq!(a, b);
        assert_eq!(sa, sb);
        assert!(a.iter().all(|w| w.is_self_avoiding()));
        assert!(sa.acceptances <= sa.proposals);
        for r in [sa.acceptance_rate(), sa.pivot_rate(), sa.regrow_rate()].into_iter().flatten() {
            assert!((0.0..=1.0).contains(&r));
        }
        assert!(sa.autocorrelation_time.is_some());
    }

    #[test]
    fn requires_mcmc_sampler() {
        assert!(run_chain(&SawParams::new(2, 0.5, 3), 1, stream_rng(0, 0)).is_err());
    }

    #[test]
    fn checkpoint_resume_continues_exactly() {
        let p = mcmc(6);
        let mut straight = Chain::new(&p, stream_rng(12, 3)).unwrap();
        let all = straight.sample_displacements(40);

        let mut first = Chain::new(&p, stream_rng(12, 3)).unwrap();
        let head = first.sample_displacements(15);
        let json = serde_json::to_string(&first.checkpoint()).unwrap();
        let mut resumed = Chain::resume(serde_json::from_str(&json).unwrap()).unwrap();
        let tail = resumed.sample_displacements(25);

        assert_eq!(&all[..15], &head[..]);
        assert_eq!(&all[15..], &tail[..]);
        assert_eq!(straight.stats(), resumed.stats());
    }
}
