//! Scenario configuration and its validated, resolved form.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channel::ErasureMatrix;
use crate::codec::{presets, textfmt, DegreeDistribution, Precode, PrecodeSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Fcc,
    Pcc,
    Nocoop,
    Perfect,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Fcc, Scheme::Pcc, Scheme::Nocoop, Scheme::Perfect];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Fcc => "fcc",
            Scheme::Pcc => "pcc",
            Scheme::Nocoop => "nocoop",
            Scheme::Perfect => "perfect",
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fidelity {
    /// Neighbour sets only.
    #[default]
    Structural,
    /// `T`-bit XOR packets, checked bit-exactly at the end of each run.
    Payload,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InterUser {
    Uniform(f64),
    Matrix(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErasureSpec {
    pub user_to_dest: Vec<f64>,
    pub inter_user: InterUser,
}

/// Distribution references: preset names (see [`presets::NAMES`]) or paths
/// to distribution files, relative to the config file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistSpec {
    /// `Φ^(1)..Φ^(M)` for FCC.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fcc: Option<Vec<String>>,
    /// `Ω` for PCC, no-cooperation and perfect cooperation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<String>,
}

fn default_packet_bits() -> usize {
    1024
}
fn default_period() -> usize {
    1
}
fn default_trials() -> usize {
    200
}

/// One experiment, as read from a TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(rename = "M")]
    pub users: usize,
    /// Message packets per user; derived from `k` and the precode if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// LT-input (intermediate) packets per user.
    pub k: usize,
    /// Coded packets per time slot.
    #[serde(rename = "N")]
    pub symbols_per_slot: usize,
    /// Packet length in bits.
    #[serde(rename = "T", default = "default_packet_bits")]
    pub packet_bits: usize,
    pub erasures: ErasureSpec,
    pub scheme: Scheme,
    #[serde(default)]
    pub dists: DistSpec,
    /// PCC user decoding period in frames.
    #[serde(rename = "F", default = "default_period")]
    pub decode_period: usize,
    #[serde(default)]
    pub precode: PrecodeSpec,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub fidelity: Fidelity,
    /// Defaults to `⌈10k/N⌉`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_frames: Option<usize>,
    /// Scale PCC throughput by `1 − control_overhead`.
    #[serde(default)]
    pub fold_overhead: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(String),
    #[error("config key `{key}`: {message}")]
    Invalid { key: &'static str, message: String },
}

fn invalid(key: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { key, message: message.into() }
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        Self::from_toml(&text)
    }

    /// Small symmetric two-user scenario, handy as a base for tests.
    pub fn two_user(scheme: Scheme, k: usize, n_slot: usize, dest: [f64; 2], inter: f64) -> Self {
        Self {
            users: 2,
            n: None,
            k,
            symbols_per_slot: n_slot,
            packet_bits: default_packet_bits(),
            erasures: ErasureSpec {
                user_to_dest: dest.to_vec(),
                inter_user: InterUser::Uniform(inter),
            },
            scheme,
            dists: DistSpec::default(),
            decode_period: 1,
            precode: PrecodeSpec::default(),
            trials: 1,
            master_seed: 0,
            fidelity: Fidelity::Structural,
            max_frames: None,
            fold_overhead: false,
        }
    }

    /// Validates and resolves distributions relative to `base_dir`.
    pub fn resolve(&self, base_dir: Option<&Path>) -> Result<Scenario, ConfigError> {
        let m = self.users;
        if m == 0 || m > u16::MAX as usize {
            return Err(invalid("M", "must be at least 1"));
        }
        if self.k == 0 {
            return Err(invalid("k", "must be positive"));
        }
        if self.symbols_per_slot == 0 {
            return Err(invalid("N", "must be positive"));
        }
        if self.packet_bits == 0 {
            return Err(invalid("T", "must be positive"));
        }
        if self.decode_period == 0 {
            return Err(invalid("F", "must be at least 1"));
        }
        if self.trials == 0 {
            return Err(invalid("trials", "must be at least 1"));
        }
        self.precode.validate().map_err(|e| invalid("precode", e.to_string()))?;
        let n = match self.n {
            Some(n) => {
                if n == 0 || self.precode.intermediate_len(n) != self.k {
                    return Err(invalid(
                        "n",
                        format!(
                            "n={n} needs k={} under the precode, config has k={}",
                            self.precode.intermediate_len(n),
                            self.k
                        ),
                    ));
                }
                n
            }
            None => match self.precode.message_len(self.k) {
                0 => return Err(invalid("k", "too small for the precode rate")),
                n => n,
            },
        };
        let max_frames = self.max_frames.unwrap_or((10 * self.k).div_ceil(self.symbols_per_slot));
        if max_frames == 0 || self.symbols_per_slot * max_frames < self.k {
            return Err(invalid("max_frames", "N·max_frames must be at least k"));
        }
        if self.erasures.user_to_dest.len() != m {
            return Err(invalid(
                "erasures",
                format!("user_to_dest has {} entries for M={m}", self.erasures.user_to_dest.len()),
            ));
        }
        let erasures = match &self.erasures.inter_user {
            InterUser::Uniform(e) => ErasureMatrix::uniform(self.erasures.user_to_dest.clone(), *e),
            InterUser::Matrix(rows) => {
                ErasureMatrix::new(self.erasures.user_to_dest.clone(), rows.clone())
            }
        }
        .map_err(|e| invalid("erasures", e.to_string()))?;

        let load = |name: &str, key: &'static str| load_distribution(name, base_dir, key);
        let dists = match self.scheme {
            Scheme::Fcc => {
                if self.dists.omega.is_some() {
                    return Err(invalid("dists", "fcc takes `dists.fcc`, not `dists.omega`"));
                }
                let names = match &self.dists.fcc {
                    Some(names) => names.clone(),
                    None => (1..=m).map(|i| format!("fcc-m{i}")).collect(),
                };
                if names.len() != m {
                    return Err(invalid(
                        "dists",
                        format!("fcc needs exactly M={m} distributions, got {}", names.len()),
                    ));
                }
                names.iter().map(|n| load(n, "dists")).collect::<Result<Vec<_>, _>>()?
            }
            scheme => {
                if self.dists.fcc.is_some() {
                    return Err(invalid("dists", format!("{scheme} takes `dists.omega` only")));
                }
                let name = match &self.dists.omega {
                    Some(name) => name.clone(),
                    None => default_omega(scheme, m),
                };
                vec![load(&name, "dists")?]
            }
        };

        let precodes = (0..m)
            .map(|u| {
                let seed = precode_seed(self.master_seed, u);
                Precode::new(&self.precode, n, seed).map_err(|e| invalid("precode", e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Scenario { config: self.clone(), n, max_frames, erasures, dists, precodes })
    }
}

fn precode_seed(master_seed: u64, user: usize) -> u64 {
    use rand::RngCore;
    let label = crate::channel::StreamLabel::new(
        u64::MAX,
        0,
        crate::channel::Link::Precode { user: user as u16 },
    );
    crate::channel::rng_stream(master_seed, label).next_u64()
}

fn default_omega(scheme: Scheme, users: usize) -> String {
    match scheme {
        Scheme::Pcc if (2..=4).contains(&users) => format!("pcc-m{users}"),
        Scheme::Perfect if users <= 4 => format!("fcc-m{users}"),
        _ => "fcc-m1".to_string(),
    }
}

/// A preset name, or a path to a distribution file.
pub fn load_distribution(
    name: &str,
    base_dir: Option<&Path>,
    key: &'static str,
) -> Result<DegreeDistribution, ConfigError> {
    if presets::NAMES.contains(&name) {
        return presets::by_name(name).map_err(|e| invalid(key, e.to_string()));
    }
    let path = match base_dir {
        Some(dir) => dir.join(name),
        None => PathBuf::from(name),
    };
    let text = std::fs::read_to_string(&path).map_err(|e| {
        invalid(key, format!("`{name}` is neither a preset nor a readable file ({e})"))
    })?;
    textfmt::parse_distribution(&text).map_err(|e| invalid(key, format!("{}: {e}", path.display())))
}

/// A validated scenario with everything resolved.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    /// Message packets per user.
    pub n: usize,
    pub max_frames: usize,
    pub erasures: ErasureMatrix,
    /// `Φ^(1)..Φ^(M)` for FCC, `[Ω]` otherwise.
    pub dists: Vec<DegreeDistribution>,
    /// One precode per user.
    pub precodes: Vec<Precode>,
}

impl Scenario {
    pub fn users(&self) -> usize {
        self.config.users
    }

    pub fn k(&self) -> usize {
        self.config.k
    }

    pub fn scheme(&self) -> Scheme {
        self.config.scheme
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_as_documented() {
        let text = r#"
            M = 2
            k = 1000
            N = 100
            scheme = "pcc"
            F = 2
            trials = 10
            master_seed = 7
            precode = { kind = "none" }
            [erasures]
            user_to_dest = [0.2, 0.6]
            inter_user = 0.3
            [dists]
            omega = "partial-example"
        "#;
        let cfg = ScenarioConfig::from_toml(text).unwrap();
        let sc = cfg.resolve(None).unwrap();
        assert_eq!(sc.n, 1000);
        assert_eq!(sc.max_frames, 100);
        assert_eq!(sc.erasures.between(0, 1), 0.3);
        assert_eq!(sc.dists.len(), 1);
        let again = ScenarioConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn precode_derives_message_length() {
        let cfg = ScenarioConfig::two_user(Scheme::Nocoop, 2000, 200, [0.2, 0.2], 0.5);
        assert_eq!(cfg.resolve(None).unwrap().n, 1900);
        let mut bad = cfg.clone();
        bad.n = Some(1950);
        assert!(matches!(bad.resolve(None), Err(ConfigError::Invalid { key: "n", .. })));
    }

    #[test]
    fn diagnostics_name_the_key() {
        let mut cfg = ScenarioConfig::two_user(Scheme::Fcc, 100, 10, [0.2, 0.2], 0.5);
        cfg.dists.fcc = Some(vec!["fcc-m1".into()]);
        assert!(matches!(cfg.resolve(None), Err(ConfigError::Invalid { key: "dists", .. })));
        let mut cfg = ScenarioConfig::two_user(Scheme::Pcc, 100, 10, [0.2, 0.2], 0.5);
        cfg.erasures.user_to_dest = vec![0.1];
        assert!(matches!(cfg.resolve(None), Err(ConfigError::Invalid { key: "erasures", .. })));
        cfg.erasures.user_to_dest = vec![0.1, 0.1];
        cfg.max_frames = Some(2);
        assert!(matches!(cfg.resolve(None), Err(ConfigError::Invalid { key: "max_frames", .. })));
        assert!(ScenarioConfig::from_toml("M = 2\nbogus = 1\n").is_err());
    }
}
