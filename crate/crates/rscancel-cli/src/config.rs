//! Pipeline configuration: a TOML file of `key = value` pairs, overridden
//! by command-line flags.

use std::path::{Path, PathBuf};

use rscancel::{parse_rational, Rational};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::fail::{CliError, CliResult};

pub const SEED_ENV: &str = "RS_CANCEL_SEED";

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    /// `instructive` replaces the whole pipeline by the three-vertex example.
    pub preset: Option<String>,
    pub lambda: Option<String>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub coefficients: CoefficientSource,
    #[serde(default)]
    pub underlying: UnderlyingSource,
    #[serde(default)]
    pub caps: Caps,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientSource {
    pub file: Option<PathBuf>,
    /// Rows of the power-of-ten table; defaults to `1..=n`.
    pub rows: Option<Vec<u32>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnderlyingSource {
    pub file: Option<PathBuf>,
    /// `pg27`: the incidence graph of the projective plane of order 7.
    pub preset: Option<String>,
    pub n: Option<usize>,
    pub girth: Option<usize>,
    pub seed: Option<u64>,
    pub attempts: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Caps {
    /// Cycle labels up to this many syllables are counted in the report.
    pub cycle: Option<usize>,
    /// Relator index cap for Dehn reduction.
    pub relator: Option<usize>,
    /// Upper bound on Dehn steps per word.
    pub dehn: Option<usize>,
}

impl PipelineConfig {
    pub fn load(path: &Path) -> CliResult<PipelineConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))
    }

    /// Fields set in `other` win.
    pub fn overlay(mut self, other: PipelineConfig) -> PipelineConfig {
        macro_rules! take {
            ($($f:ident).+) => {
                if other.$($f).+.is_some() {
                    self.$($f).+ = other.$($f).+;
                }
            };
        }
        take!(preset);
        take!(lambda);
        take!(out);
        take!(coefficients.file);
        take!(coefficients.rows);
        take!(underlying.file);
        take!(underlying.preset);
        take!(underlying.n);
        take!(underlying.girth);
        take!(underlying.seed);
        take!(underlying.attempts);
        take!(caps.cycle);
        take!(caps.relator);
        take!(caps.dehn);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum UnderlyingPlan {
    File(PathBuf),
    Pg27,
    Generate { n: usize, girth: usize, seed: u64, attempts: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum CoefficientPlan {
    File(PathBuf),
    /// `None` means rows `1..=n` once `n` is known.
    Rows(Option<Vec<u32>>),
}

/// A configuration with every default filled in.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Resolved {
    pub instructive: bool,
    #[serde(serialize_with = "ser_ratio")]
    pub lambda: Rational,
    #[serde(skip)]
    pub out: PathBuf,
    pub coefficients: CoefficientPlan,
    pub underlying: UnderlyingPlan,
    pub cycle_cap: usize,
    pub relator_cap: usize,
    pub dehn_cap: usize,
}

fn ser_ratio<S: serde::Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

pub fn resolve(cfg: &PipelineConfig) -> CliResult<Resolved> {
    let instructive = match cfg.preset.as_deref() {
        None => false,
        Some("instructive") => true,
        Some(p) => return Err(CliError::usage(format!("unknown preset {p:?}; the only preset is \"instructive\""))),
    };
    let lambda = parse_rational(cfg.lambda.as_deref().unwrap_or("1/6")).map_err(|e| CliError::parse(e.to_string()))?;
    if lambda <= Rational::from_integer(0) || lambda >= Rational::from_integer(1) {
        return Err(CliError::usage(format!("λ must lie in (0, 1), got {lambda}")));
    }
    let u = &cfg.underlying;
    let underlying = if let Some(f) = &u.file {
        UnderlyingPlan::File(f.clone())
    } else if let Some(p) = &u.preset {
        if p != "pg27" {
            return Err(CliError::usage(format!("unknown underlying preset {p:?}; use \"pg27\"")));
        }
        UnderlyingPlan::Pg27
    } else {
        let seed = match u.seed {
            Some(s) => s,
            None => match std::env::var(SEED_ENV) {
                Ok(v) => v.trim().parse().map_err(|_| CliError::usage(format!("{SEED_ENV}={v:?} is not an integer")))?,
                Err(_) => 0,
            },
        };
        UnderlyingPlan::Generate { n: u.n.unwrap_or(12), girth: u.girth.unwrap_or(3), seed, attempts: u.attempts.unwrap_or(50) }
    };
    let coefficients = match &cfg.coefficients.file {
        Some(f) => CoefficientPlan::File(f.clone()),
        None => CoefficientPlan::Rows(cfg.coefficients.rows.clone()),
    };
    let positive = |v: Option<usize>, d: usize, name: &str| match v.unwrap_or(d) {
        0 => Err(CliError::usage(format!("{name} cap must be positive"))),
        x => Ok(x),
    };
    Ok(Resolved {
        instructive,
        lambda,
        out: cfg.out.clone().unwrap_or_else(|| PathBuf::from("out")),
        coefficients,
        underlying,
        cycle_cap: positive(cfg.caps.cycle, 6, "cycle")?,
        relator_cap: positive(cfg.caps.relator, 6, "relator")?,
        dehn_cap: positive(cfg.caps.dehn, 10_000, "dehn")?,
    })
}

impl Resolved {
    /// SHA-256 over the resolved configuration and the contents of every
    /// input file it names.
    pub fn hash(&self) -> CliResult<String> {
        let mut h = Sha256::new();
        h.update(serde_json::to_vec(self).expect("config serializes"));
        let mut files = Vec::new();
        if let CoefficientPlan::File(f) = &self.coefficients {
            files.push(f);
        }
        if let UnderlyingPlan::File(f) = &self.underlying {
            files.push(f);
        }
        for f in files {
            h.update(std::fs::read(f).map_err(|e| CliError::io(f, e))?);
        }
        Ok(h.finalize().iter().map(|b| format!("{b:02x}")).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip_and_overlay() {
        let text = "lambda = \"1/8\"\n[underlying]\nn = 20\nseed = 4\n[caps]\nrelator = 8\n";
        let cfg: PipelineConfig = toml::from_str(text).unwrap();
        assert_eq!(cfg.underlying.n, Some(20));
        let flags = PipelineConfig { underlying: UnderlyingSource { seed: Some(9), ..Default::default() }, ..Default::default() };
        let merged = cfg.overlay(flags);
        assert_eq!(merged.underlying.seed, Some(9));
        assert_eq!(merged.underlying.n, Some(20));
        let r = resolve(&merged).unwrap();
        assert_eq!(r.lambda, Rational::new(1, 8));
        assert_eq!(r.relator_cap, 8);
        assert_eq!(r.underlying, UnderlyingPlan::Generate { n: 20, girth: 3, seed: 9, attempts: 50 });
    }

    #[test]
    fn bad_configs() {
        assert!(toml::from_str::<PipelineConfig>("colour = 3").is_err());
        let cfg = PipelineConfig { lambda: Some("3/2".into()), ..Default::default() };
        assert!(resolve(&cfg).is_err());
        let cfg = PipelineConfig { preset: Some("nope".into()), ..Default::default() };
        assert!(resolve(&cfg).is_err());
    }

    #[test]
    fn hash_depends_on_config() {
        let a = resolve(&PipelineConfig::default()).unwrap();
        let b = resolve(&PipelineConfig { lambda: Some("1/8".into()), ..Default::default() }).unwrap();
        assert_eq!(a.hash().unwrap(), a.hash().unwrap());
        assert_ne!(a.hash().unwrap(), b.hash().unwrap());
    }
}
