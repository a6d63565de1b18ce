//! Configuration resolution: command-line flags over the JSON config file
//! over built-in defaults.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use hypersaw::experiments::{EpsRule, Normalization, VerifyConfig};
use hypersaw::{Error, McmcSettings, Result, SamplerKind, SawParams};
use serde::{Deserialize, Serialize};

/// Flags shared by every subcommand.
#[derive(Args, Debug, Clone, Default)]
pub struct Flags {
    /// JSON configuration file; flags override its keys.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Seed of all randomness. Required unless given in the config.
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Number of walks or Monte Carlo samples.
    #[arg(long, global = true, value_name = "N")]
    pub samples: Option<usize>,
    /// Suppress the summary on standard output.
    #[arg(short, long, global = true)]
    pub quiet: bool,

    #[arg(long, global = true)]
    pub d: Option<usize>,
    #[arg(long, global = true)]
    pub c: Option<f64>,
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    /// `rejection` or `mcmc`.
    #[arg(long, global = true, value_parser = parse_sampler)]
    pub sampler: Option<SamplerKind>,
    #[arg(long, global = true)]
    pub burn_in: Option<u64>,
    #[arg(long, global = true)]
    pub thinning: Option<u64>,
    #[arg(long, global = true)]
    pub pivot_fraction: Option<f64>,
    #[arg(long, global = true)]
    pub block_max: Option<usize>,
    #[arg(long, global = true)]
    pub rejection_cap: Option<u64>,
    /// Comma-separated, strictly ascending walk lengths.
    #[arg(long, global = true, value_delimiter = ',', value_name = "N,N,...")]
    pub n_values: Option<Vec<usize>>,
    /// `const:EPS`, `inverse` or `power:BETA0`.
    #[arg(long, global = true, value_name = "RULE")]
    pub eps_rule: Option<String>,
    /// `raw` or `rescaled`.
    #[arg(long, global = true, value_parser = parse_normalization)]
    pub normalization: Option<Normalization>,
    /// Chain checkpoint to continue from.
    #[arg(long, global = true, value_name = "PATH")]
    pub checkpoint: Option<PathBuf>,
}

fn parse_sampler(s: &str) -> std::result::Result<SamplerKind, String> {
    match s {
        "rejection" => Ok(SamplerKind::Rejection),
        "mcmc" => Ok(SamplerKind::Mcmc),
        _ => Err(format!("unknown sampler '{s}' (expected rejection or mcmc)")),
    }
}

fn parse_normalization(s: &str) -> std::result::Result<Normalization, String> {
    match s {
        "raw" => Ok(Normalization::Raw),
        "rescaled" => Ok(Normalization::Rescaled),
        _ => Err(format!("unknown normalization '{s}' (expected raw or rescaled)")),
    }
}

/// Walk parameters where every key may be absent.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsPatch {
    pub d: Option<usize>,
    pub c: Option<f64>,
    pub n: Option<usize>,
    pub eps: Option<f64>,
    pub sampler: Option<SamplerKind>,
    pub mcmc: Option<McmcSettings>,
    pub rejection_cap: Option<u64>,
}

impl ParamsPatch {
    fn apply(&self, p: &mut SawParams) {
        if let Some(v) = self.d {
            p.d = v;
        }
        if let Some(v) = self.c {
            p.c = v;
        }
        if let Some(v) = self.n {
            p.n = v;
        }
        if let Some(v) = self.eps {
            p.eps = v;
        }
        if let Some(v) = self.sampler {
            p.sampler = v;
        }
        if let Some(m) = &self.mcmc {
            let t = &mut p.mcmc;
            t.burn_in = m.burn_in.or(t.burn_in);
            t.thinning = m.thinning.or(t.thinning);
            t.pivot_fraction = m.pivot_fraction.or(t.pivot_fraction);
            t.block_max = m.block_max.or(t.block_max);
        }
        if let Some(v) = self.rejection_cap {
            p.rejection_cap = v;
        }
    }

    fn from_flags(f: &Flags) -> Self {
        let mcmc = McmcSettings {
            burn_in: f.burn_in,
            thinning: f.thinning,
            pivot_fraction: f.pivot_fraction,
            block_max: f.block_max,
        };
        ParamsPatch {
            d: f.d,
            c: f.c,
            n: f.n,
            eps: f.eps,
            sampler: f.sampler,
            mcmc: (mcmc != McmcSettings::default()).then_some(mcmc),
            rejection_cap: f.rejection_cap,
        }
    }
}

/// An eps rule written either as `"inverse"`-style text or as a tagged object.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RuleSpec {
    Text(String),
    Tagged(EpsRule),
}

impl RuleSpec {
    fn resolve(&self) -> Result<EpsRule> {
        match self {
            RuleSpec::Text(s) => s.parse(),
            RuleSpec::Tagged(r) => {
                r.validate()?;
                Ok(*r)
            }
        }
    }
}

/// The config file layout. All keys are optional.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
    pub samples: Option<usize>,
    pub quiet: Option<bool>,
    pub params: Option<ParamsPatch>,
    pub n_values: Option<Vec<usize>>,
    pub eps_rule: Option<RuleSpec>,
    pub normalization: Option<Normalization>,
    pub verify: Option<VerifyConfig>,
    pub checkpoint: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("invalid config {}: {e}", path.display())))
    }
}

pub const DEFAULT_OUT: &str = "hypersaw-out";

/// Everything a command needs, after precedence has been applied. This is
/// what the manifest hashes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Resolved {
    pub seed: Option<u64>,
    #[serde(skip)]
    pub jobs: Option<usize>,
    #[serde(skip)]
    pub out: PathBuf,
    #[serde(skip)]
    pub quiet: bool,
    pub samples: Option<usize>,
    pub params: SawParams,
    pub n_values: Option<Vec<usize>>,
    pub eps_rule: Option<EpsRule>,
    pub normalization: Normalization,
    pub verify: VerifyConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checkpoint: Option<PathBuf>,
}

impl Resolved {
    pub fn new(flags: &Flags) -> Result<Self> {
        let file = match &flags.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let seed = flags.seed.or(file.seed);
        let patch_flags = ParamsPatch::from_flags(flags);

        let mut params = SawParams::new(2, 0.5, 10);
        if let Some(p) = &file.params {
            p.apply(&mut params);
        }
        patch_flags.apply(&mut params);
        params.seed = seed.unwrap_or(0);

        // the verify suites' walk follows the same precedence on top of its own defaults
        let mut verify = file.verify.clone().unwrap_or_default();
        if let Some(p) = &file.params {
            p.apply(&mut verify.walk);
        }
        patch_flags.apply(&mut verify.walk);

        let eps_rule = match &flags.eps_rule {
            Some(s) => Some(s.parse()?),
            None => file.eps_rule.as_ref().map(RuleSpec::resolve).transpose()?,
        };
        if flags.jobs == Some(0) || file.jobs == Some(0) {
            return Err(Error::Config("jobs must be at least 1".into()));
        }
        Ok(Resolved {
            seed,
            jobs: flags.jobs.or(file.jobs),
            out: flags.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
            quiet: flags.quiet || file.quiet.unwrap_or(false),
            samples: flags.samples.or(file.samples),
            params,
            n_values: flags.n_values.clone().or(file.n_values),
            eps_rule,
            normalization: flags.normalization.or(file.normalization).unwrap_or_default(),
            verify,
            checkpoint: flags.checkpoint.clone().or(file.checkpoint),
        })
    }

    pub fn require_seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::Config("no seed given: pass --seed or set \"seed\" in the config".into()))
    }

    pub fn samples_or(&self, default: usize) -> usize {
        self.samples.unwrap_or(default)
    }

    pub fn require_n_values(&self) -> Result<Vec<usize>> {
        self.n_values
            .clone()
            .ok_or_else(|| Error::Config("no n values given: pass --n-values or set \"n_values\"".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_config(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    #[test]
    fn flags_override_config_override_defaults() {
        let cfg = write_config(r#"{"seed": 5, "samples": 40, "params": {"n": 7, "c": 0.3, "mcmc": {"thinning": 3}}}"#);
        let flags = Flags {
            config: Some(cfg.path().to_path_buf()),
            n: Some(9),
            burn_in: Some(11),
            ..Flags::default()
        };
        let r = Resolved::new(&flags).unwrap();
        assert_eq!(r.seed, Some(5));
        assert_eq!(r.samples, Some(40));
        assert_eq!((r.params.d, r.params.c, r.params.n, r.params.eps), (2, 0.3, 9, 1.0));
        assert_eq!(r.params.mcmc.thinning, Some(3));
        assert_eq!(r.params.mcmc.burn_in, Some(11));
        assert_eq!(r.params.seed, 5);
        assert_eq!(r.verify.walk.n, 9);
    }

    #[test]
    fn eps_rule_accepts_text_and_objects() {
        let cfg = write_config(r#"{"eps_rule": "power:0.5"}"#);
        let flags = Flags {
            config: Some(cfg.path().to_path_buf()),
            ..Flags::default()
        };
        assert_eq!(Resolved::new(&flags).unwrap().eps_rule, Some(EpsRule::Power { beta0: 0.5 }));
        let cfg = write_config(r#"{"eps_rule": {"rule": "const", "eps": 0.25}}"#);
        let flags = Flags {
            config: Some(cfg.path().to_path_buf()),
            ..Flags::default()
        };
        assert_eq!(Resolved::new(&flags).unwrap().eps_rule, Some(EpsRule::Const { eps: 0.25 }));
    }

    #[test]
    fn bad_configs_are_config_errors() {
        let cfg = write_config(r#"{"sed": 1}"#);
        let flags = Flags {
            config: Some(cfg.path().to_path_buf()),
            ..Flags::default()
        };
        assert_eq!(Resolved::new(&flags).unwrap_err().kind(), "config");
        let missing = Flags {
            config: Some(PathBuf::from("/nonexistent/config.json")),
            ..Flags::default()
        };
        assert_eq!(Resolved::new(&missing).unwrap_err().kind(), "config");
        assert_eq!(Resolved::new(&Flags::default()).unwrap().require_seed().unwrap_err().kind(), "config");
    }
}
