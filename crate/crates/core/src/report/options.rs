use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bounds::BoundKind;
use crate::criteria::CriterionMethod;
use crate::error::{Error, Result};
use crate::lattice::{Family, Lattice};
use crate::zeta::ZetaMode;

/// Command options, shared by the flags and the configuration file.
/// Unset fields fall back to the per-command defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, clap::Args)]
#[serde(default, deny_unknown_fields)]
pub struct Options {
    /// Coarse lattice: Z4 or D4 (repeatable).
    #[arg(long = "lattice", value_name = "Z4|D4")]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub lattice: Vec<String>,
    /// Scale factor(s) for the lattices: one for all, or one per lattice.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub mu: Vec<f64>,
    /// Eavesdropper antennas.
    #[arg(long)]
    pub ne: Option<usize>,
    /// Coherence time in channel uses.
    #[arg(long = "T")]
    #[serde(rename = "T")]
    pub t: Option<usize>,
    #[arg(long)]
    pub gamma_min: Option<f64>,
    #[arg(long)]
    pub gamma_max: Option<f64>,
    #[arg(long)]
    pub gamma_points: Option<usize>,
    /// Monte Carlo trials per SNR point.
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// paper (approximate closed forms) or validated.
    #[arg(long)]
    pub mode: Option<ZetaMode>,
    /// Zeta arguments (comma-separated).
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub s: Vec<f64>,
    /// Shift `a` for the shifted zeta.
    #[arg(long)]
    pub a: Option<f64>,
    /// Bound kinds (comma-separated).
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub kind: Vec<BoundKind>,
    /// direct_sum or zeta_closed_form.
    #[arg(long)]
    pub method: Option<CriterionMethod>,
    /// Squared-norm truncation of finite codebooks.
    #[arg(long)]
    pub truncation_norm: Option<f64>,
    /// Squared radius of direct lattice sums.
    #[arg(long)]
    pub radius_sq: Option<f64>,
    /// Also estimate the legitimate receiver at this SNR.
    #[arg(long)]
    pub bob_gamma: Option<f64>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output file (directory for `figure`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// TOML or JSON configuration, or a run manifest to replay.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

macro_rules! prefer {
    ($hi:ident, $lo:ident; $($f:ident),*; $($v:ident),*) => {
        Options {
            $($f: $hi.$f.clone().or_else(|| $lo.$f.clone()),)*
            $($v: if $hi.$v.is_empty() { $lo.$v.clone() } else { $hi.$v.clone() },)*
        }
    };
}

impl Options {
    /// Field-wise merge; values set in `self` win.
    pub fn overlay(&self, lower: &Options) -> Options {
        prefer!(self, lower;
            ne, t, gamma_min, gamma_max, gamma_points, trials, seed, mode, a, method,
            truncation_norm, radius_sq, bob_gamma, threads, out, config;
            lattice, mu, s, kind)
    }

    /// Reads a TOML or JSON file. A run manifest (JSON with a `params`
    /// object) yields the parameters it recorded.
    pub fn from_file(path: &Path) -> Result<Options> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let is_json = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if is_json {
            let v: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            let params = match v.get("params") {
                Some(p) => p.clone(),
                None => v,
            };
            serde_json::from_value(params)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
        } else {
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
        }
    }

    /// Flags over the configuration file named by `--config`, if any.
    pub fn resolve_file(&self) -> Result<Options> {
        match &self.config {
            Some(p) => Ok(self.overlay(&Options::from_file(p)?)),
            None => Ok(self.clone()),
        }
    }

    /// `(family, mu)` per requested lattice, given defaults for each.
    pub fn lattice_specs(&self, default_mu: impl Fn(Family) -> f64) -> Result<Vec<LatticeSpec>> {
        let families: Vec<Family> = if self.lattice.is_empty() {
            vec![Family::Z4, Family::D4]
        } else {
            self.lattice
                .iter()
                .map(|s| parse_family(s))
                .collect::<Result<_>>()?
        };
        let mus: Vec<f64> = match self.mu.len() {
            0 => families.iter().map(|&f| default_mu(f)).collect(),
            1 => vec![self.mu[0]; families.len()],
            n if n == families.len() => self.mu.clone(),
            n => {
                return Err(Error::Config(format!(
                    "{n} scale factors for {} lattices",
                    families.len()
                )))
            }
        };
        families
            .into_iter()
            .zip(mus)
            .map(|(family, mu)| {
                if !(mu > 0.0 && mu.is_finite()) {
                    return Err(Error::Config(format!("scale must be positive, got {mu}")));
                }
                Ok(LatticeSpec { family, mu })
            })
            .collect()
    }
}

pub fn parse_family(s: &str) -> Result<Family> {
    match s.to_ascii_uppercase().as_str() {
        "Z4" => Ok(Family::Z4),
        "D4" => Ok(Family::D4),
        other => Err(Error::Config(format!(
            "unknown lattice {other:?} (expected Z4 or D4)"
        ))),
    }
}

/// A built-in lattice and a scale factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeSpec {
    pub family: Family,
    pub mu: f64,
}

impl LatticeSpec {
    pub fn lattice(&self) -> Result<Lattice> {
        let base = match self.family {
            Family::Z4 => Lattice::integer(4),
            Family::D4 => Lattice::d4(),
        };
        if self.mu == 1.0 {
            Ok(base)
        } else {
            base.scaled(self.mu)
        }
    }

    pub fn label(&self) -> String {
        self.lattice()
            .map(|l| l.label().to_string())
            .unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win() {
        let flags = Options {
            seed: Some(7),
            lattice: vec!["D4".into()],
            ..Options::default()
        };
        let file = Options {
            seed: Some(1),
            trials: Some(5000),
            lattice: vec!["Z4".into(), "D4".into()],
            ..Options::default()
        };
        let m = flags.overlay(&file);
        assert_eq!(m.seed, Some(7));
        assert_eq!(m.trials, Some(5000));
        assert_eq!(m.lattice, vec!["D4".to_string()]);
    }

    #[test]
    fn config_files() {
        let dir = tempfile::tempdir().unwrap();
        let toml_path = dir.path().join("run.toml");
        std::fs::write(
            &toml_path,
            "seed = 3\nT = 2\nlattice = [\"Z4\"]\nmode = \"paper\"\n",
        )
        .unwrap();
        let o = Options::from_file(&toml_path).unwrap();
        assert_eq!(
            (o.seed, o.t, o.mode),
            (Some(3), Some(2), Some(ZetaMode::Approximate))
        );

        let json_path = dir.path().join("m.json");
        std::fs::write(
            &json_path,
            r#"{"command":"zeta","params":{"s":[8.0],"ne":2}}"#,
        )
        .unwrap();
        let o = Options::from_file(&json_path).unwrap();
        assert_eq!(o.s, vec![8.0]);

        std::fs::write(&toml_path, "bogus = 1\n").unwrap();
        assert!(Options::from_file(&toml_path).is_err());
    }

    #[test]
    fn lattice_specs() {
        let o = Options::default();
        let specs = o.lattice_specs(|_| 1.0).unwrap();
        assert_eq!(specs.len(), 2);
        let o = Options {
            lattice: vec!["z4".into(), "D4".into()],
            mu: vec![1.0, 0.5],
            ..Options::default()
        };
        let specs = o.lattice_specs(|_| 1.0).unwrap();
        assert_eq!(specs[1].mu, 0.5);
        assert_eq!(specs[1].label(), "0.5*D4");
        let bad = Options {
            lattice: vec!["E8".into()],
            ..Options::default()
        };
        assert!(bad.lattice_specs(|_| 1.0).is_err());
    }
}
