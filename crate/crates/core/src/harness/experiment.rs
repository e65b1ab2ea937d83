use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::protocol::{
    run_trials, ConfigError, InterUser, ProtocolError, Scenario, ScenarioConfig, Scheme,
    TranscriptStats,
};

/// The swept parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Axis {
    /// Every inter-user link.
    EInter,
    /// Every user-to-destination link.
    EDest,
    /// One user's destination link (0-based).
    EUser(usize),
    /// PCC decoding period.
    Period,
}

impl Axis {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "e_inter" => Some(Axis::EInter),
            "e_dest" => Some(Axis::EDest),
            "F" => Some(Axis::Period),
            _ => {
                let i: usize = name.strip_prefix("e_")?.parse().ok()?;
                (i >= 1).then(|| Axis::EUser(i - 1))
            }
        }
    }

    fn apply(self, cfg: &mut ScenarioConfig, v: f64) -> Result<(), ConfigError> {
        let bad = |message: String| ConfigError::Invalid { key: "sweep.values", message };
        match self {
            Axis::EInter => cfg.erasures.inter_user = InterUser::Uniform(v),
            Axis::EDest => cfg.erasures.user_to_dest.iter_mut().for_each(|e| *e = v),
            Axis::EUser(i) => {
                let users = cfg.erasures.user_to_dest.len();
                *cfg.erasures
                    .user_to_dest
                    .get_mut(i)
                    .ok_or_else(|| bad(format!("axis e_{} but only {users} users", i + 1)))? = v;
            }
            Axis::Period => {
                if v < 1.0 || v.fract() != 0.0 {
                    return Err(bad(format!("F must be a positive integer, got {v}")));
                }
                cfg.decode_period = v as usize;
            }
        }
        Ok(())
    }
}

/// One scheme/distribution combination run along the axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Variant {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub scheme: Scheme,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fcc: Option<Vec<String>>,
}

impl Variant {
    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.scheme.name().to_string())
    }

    fn apply(&self, cfg: &mut ScenarioConfig) {
        cfg.scheme = self.scheme;
        if let Some(o) = &self.omega {
            cfg.dists.omega = Some(o.clone());
        }
        if let Some(f) = &self.fcc {
            cfg.dists.fcc = Some(f.clone());
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<String>,
    #[serde(default)]
    pub values: Vec<f64>,
    #[serde(default)]
    pub variants: Vec<Variant>,
}

/// A resolved sweep point.
#[derive(Debug, Clone)]
pub struct Point {
    pub axis_value: Option<f64>,
    pub variant: String,
    pub scenario: Scenario,
}

#[derive(Debug, Clone)]
pub struct Experiment {
    pub base: ScenarioConfig,
    pub sweep: SweepSpec,
    pub base_dir: Option<PathBuf>,
}

impl Experiment {
    pub fn from_toml(text: &str, base_dir: Option<PathBuf>) -> Result<Self, HarnessError> {
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
        let sweep = match table.remove("sweep") {
            Some(v) => v.try_into().map_err(|e: toml::de::Error| ConfigError::Parse(format!("[sweep]: {e}")))?,
            None => SweepSpec::default(),
        };
        let base: ScenarioConfig =
            table.try_into().map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
        Ok(Self { base, sweep, base_dir })
    }

    pub fn axis(&self) -> Result<Option<Axis>, HarnessError> {
        match &self.sweep.axis {
            None => {
                if !self.sweep.values.is_empty() {
                    return Err(ConfigError::Invalid { key: "sweep.axis", message: "values given without an axis".into() }.into());
                }
                Ok(None)
            }
            Some(name) => match Axis::parse(name) {
                Some(a) if !self.sweep.values.is_empty() => Ok(Some(a)),
                Some(_) => Err(ConfigError::Invalid { key: "sweep.values", message: "empty".into() }.into()),
                None => Err(ConfigError::Invalid {
                    key: "sweep.axis",
                    message: format!("unknown axis `{name}` (e_inter, e_dest, e_<user>, F)"),
                }
                .into()),
            },
        }
    }

    pub fn variants(&self) -> Vec<Variant> {
        if self.sweep.variants.is_empty() {
            vec![Variant { label: None, scheme: self.base.scheme, omega: None, fcc: None }]
        } else {
            self.sweep.variants.clone()
        }
    }

    /// Every (axis value, variant) combination, resolved, axis-major.
    pub fn points(&self) -> Result<Vec<Point>, HarnessError> {
        let axis = self.axis()?;
        let values: Vec<Option<f64>> = match axis {
            Some(_) => self.sweep.values.iter().copied().map(Some).collect(),
            None => vec![None],
        };
        let mut out = Vec::new();
        for v in values {
            for variant in self.variants() {
                let mut cfg = self.base.clone();
                if let (Some(a), Some(v)) = (axis, v) {
                    a.apply(&mut cfg, v)?;
                }
                variant.apply(&mut cfg);
                let scenario = cfg.resolve(self.base_dir.as_deref())?;
                out.push(Point { axis_value: v, variant: variant.label(), scenario });
            }
        }
        Ok(out)
    }

    /// Canonical text the config hash is taken over.
    pub fn canonical(&self) -> String {
        let mut s = self.base.to_toml();
        s.push_str("\n[sweep]\n");
        s.push_str(&toml::to_string(&self.sweep).expect("sweep serializes"));
        s
    }

    pub fn header(&self) -> String {
        format!(
            "# config_hash={} master_seed={}",
            super::output::hash_text(&self.canonical()),
            self.base.master_seed
        )
    }

    pub fn simulate(&self, workers: Option<usize>) -> Result<Vec<(Point, Vec<TranscriptStats>)>, HarnessError> {
        self.points()?
            .into_iter()
            .map(|p| {
                let runs = run_trials(&p.scenario, workers)?;
                Ok::<_, ProtocolError>((p, runs))
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(HarnessError::from)
    }
}
