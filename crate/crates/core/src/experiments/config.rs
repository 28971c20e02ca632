use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::signal_model::{GridPolicy, GroupSpec, OverlapPolicy, ValueLaw};
use crate::{Error, Result};

/// Estimation scheme compared by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// Each user on its own.
    Omp,
    /// Centralized joint recovery at the base station.
    Somp,
    /// Cooperative, simple majority voting.
    Diomp,
    /// Cooperative, adaptive weighted voting.
    Wdiomp,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Omp, Algorithm::Somp, Algorithm::Diomp, Algorithm::Wdiomp];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Omp => "omp",
            Algorithm::Somp => "somp",
            Algorithm::Diomp => "diomp",
            Algorithm::Wdiomp => "wdiomp",
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// SNR of every user, in dB.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SnrSpec {
    Uniform(f64),
    PerUser(Vec<f64>),
}

/// A named SNR assignment. Each profile is evaluated on the same signals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnrProfile {
    pub tag: String,
    pub snr_db: SnrSpec,
}

impl SnrProfile {
    pub fn uniform(tag: impl Into<String>, snr_db: f64) -> Self {
        Self {
            tag: tag.into(),
            snr_db: SnrSpec::Uniform(snr_db),
        }
    }

    pub fn per_user(&self, num_users: usize) -> Vec<f64> {
        match &self.snr_db {
            SnrSpec::Uniform(v) => vec![*v; num_users],
            SnrSpec::PerUser(v) => v.clone(),
        }
    }
}

fn half() -> f64 {
    0.5
}
fn default_forgetting() -> f64 {
    0.1
}
fn yes() -> bool {
    true
}
fn default_q() -> u64 {
    36
}

/// Parameters of one Monte Carlo experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    /// `K`
    pub num_users: usize,
    /// `N`
    pub num_antennas: usize,
    /// `L̂`
    pub num_atoms: usize,
    /// `d / λ`
    #[serde(default = "half")]
    pub element_spacing: f64,
    /// Training lengths `T` to sweep.
    pub t_list: Vec<usize>,
    /// `L_g`
    pub global_sparsity: usize,
    #[serde(default)]
    pub groups: Vec<GroupSpec>,
    /// Total sparsity `L` given to the algorithms. Defaults to the largest
    /// per-user support size implied by the groups.
    #[serde(default)]
    pub sparsity: Option<usize>,
    pub snr_profiles: Vec<SnrProfile>,
    /// Randomly permute which user gets which SNR in every trial.
    #[serde(default)]
    pub shuffle_snr: bool,
    pub algorithms: Vec<Algorithm>,
    /// `v`
    #[serde(default = "default_forgetting")]
    pub forgetting_factor: f64,
    /// `M`
    pub trials: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub value_law: ValueLaw,
    #[serde(default)]
    pub grid_policy: GridPolicy,
    #[serde(default)]
    pub overlap_policy: OverlapPolicy,
    /// Draw a new sparsity profile every trial; otherwise one profile is
    /// drawn from the master seed and reused.
    #[serde(default = "yes")]
    pub redraw_profile: bool,
    /// Users count their own support in the vote.
    #[serde(default = "yes")]
    pub include_self: bool,
    /// `q`, bits per real or imaginary measurement sample fed back in the
    /// centralized scheme.
    #[serde(default = "default_q")]
    pub bits_per_sample: u64,
}

impl ScenarioConfig {
    /// Total sparsity `L` the algorithms are told.
    pub fn sparsity(&self) -> usize {
        self.sparsity.unwrap_or_else(|| {
            let mut per_user = vec![self.global_sparsity; self.num_users];
            for g in &self.groups {
                for &m in &g.members {
                    if let Some(s) = per_user.get_mut(m) {
                        *s += g.sparsity;
                    }
                }
            }
            per_user.into_iter().max().unwrap_or(self.global_sparsity)
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.num_users == 0 || self.num_antennas == 0 || self.num_atoms == 0 {
            return bad("users, antennas and atoms must all be positive".into());
        }
        if !(self.element_spacing > 0.0 && self.element_spacing.is_finite()) {
            return bad(format!("element spacing {} is not positive", self.element_spacing));
        }
        if self.t_list.is_empty() {
            return bad("t_list is empty".into());
        }
        if self.trials == 0 {
            return bad("at least one trial is required".into());
        }
        if self.snr_profiles.is_empty() {
            return bad("no SNR profile given".into());
        }
        let mut tags = BTreeSet::new();
        for p in &self.snr_profiles {
            if !tags.insert(p.tag.as_str()) {
                return bad(format!("duplicate SNR tag {:?}", p.tag));
            }
            if let SnrSpec::PerUser(v) = &p.snr_db {
                if v.len() != self.num_users {
                    return bad(format!(
                        "SNR profile {:?} lists {} values for {} users",
                        p.tag,
                        v.len(),
                        self.num_users
                    ));
                }
            }
            if p.per_user(self.num_users).iter().any(|s| s.is_nan()) {
                return bad(format!("SNR profile {:?} contains NaN", p.tag));
            }
        }
        for (j, g) in self.groups.iter().enumerate() {
            if let Some(&m) = g.members.iter().find(|&&m| m >= self.num_users) {
                return bad(format!("group {j} lists user {m} of {}", self.num_users));
            }
        }
        if self.overlap_policy == OverlapPolicy::Disjoint {
            let total = self.global_sparsity + self.groups.iter().map(|g| g.sparsity).sum::<usize>();
            if total > self.num_atoms {
                return bad(format!(
                    "disjoint supports need {total} atoms, dictionary has {}",
                    self.num_atoms
                ));
            }
        }
        let sparsity = self.sparsity();
        if sparsity == 0 {
            return bad("total sparsity is zero".into());
        }
        let t_min = *self.t_list.iter().min().expect("non-empty");
        if sparsity > t_min || sparsity > self.num_atoms {
            return bad(format!(
                "sparsity {sparsity} exceeds min(T = {t_min}, L̂ = {})",
                self.num_atoms
            ));
        }
        if self.algorithms.contains(&Algorithm::Wdiomp)
            && !(self.forgetting_factor > 0.0 && self.forgetting_factor < 1.0)
        {
            return bad(format!("forgetting factor {} not in (0, 1)", self.forgetting_factor));
        }
        if !self.include_self && self.num_users == 1 {
            return bad("a single user that excludes itself has no one to hear".into());
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> std::result::Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_toml_str(&text).map_err(|message| Error::Parse {
            path: path.to_owned(),
            message,
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }

    /// One of the shipped experiments: `exp1`, `exp2` or `exp3`.
    pub fn preset(name: &str) -> Option<Self> {
        let base = Self {
            name: name.to_owned(),
            num_users: 10,
            num_antennas: 128,
            num_atoms: 200,
            element_spacing: 0.5,
            t_list: (10..=40).step_by(2).collect(),
            global_sparsity: 5,
            groups: Vec::new(),
            sparsity: None,
            snr_profiles: Vec::new(),
            shuffle_snr: false,
            algorithms: Algorithm::ALL.to_vec(),
            forgetting_factor: 0.1,
            trials: 1000,
            master_seed: 20_190_902,
            value_law: ValueLaw::RealGaussian,
            grid_policy: GridPolicy::SpatialFrequency,
            overlap_policy: OverlapPolicy::Disjoint,
            redraw_profile: true,
            include_self: true,
            bits_per_sample: 36,
        };
        match name {
            "exp1" => Some(Self {
                snr_profiles: vec![SnrProfile::uniform("snr10", 10.0), SnrProfile::uniform("snr20", 20.0)],
                ..base
            }),
            "exp2" => {
                let mut snr = vec![20.0; 7];
                snr.extend([0.0; 3]);
                Some(Self {
                    snr_profiles: vec![SnrProfile {
                        tag: "mixed".into(),
                        snr_db: SnrSpec::PerUser(snr),
                    }],
                    shuffle_snr: true,
                    master_seed: 20_190_903,
                    ..base
                })
            }
            "exp3" => Some(Self {
                groups: vec![
                    GroupSpec { sparsity: 3, members: (0..5).collect() },
                    GroupSpec { sparsity: 3, members: (5..10).collect() },
                ],
                snr_profiles: vec![SnrProfile::uniform("snr20", 20.0)],
                master_seed: 20_190_904,
                ..base
            }),
            _ => None,
        }
    }

    pub const PRESETS: [&'static str; 3] = ["exp1", "exp2", "exp3"];
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid() {
        for name in ScenarioConfig::PRESETS {
            let cfg = ScenarioConfig::preset(name).unwrap();
            cfg.validate().unwrap();
        }
        assert!(ScenarioConfig::preset("exp4").is_none());
        assert_eq!(ScenarioConfig::preset("exp1").unwrap().sparsity(), 5);
        assert_eq!(ScenarioConfig::preset("exp3").unwrap().sparsity(), 8);
    }

    #[test]
    fn toml_round_trip() {
        let cfg = ScenarioConfig::preset("exp2").unwrap();
        let back = ScenarioConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn minimal_toml_uses_defaults() {
        let cfg = ScenarioConfig::from_toml_str(
            r#"
            name = "tiny"
            num_users = 2
            num_antennas = 8
            num_atoms = 12
            t_list = [4]
            global_sparsity = 2
            snr_profiles = [{ tag = "hi", snr_db = 30.0 }]
            algorithms = ["omp", "wdiomp"]
            trials = 3
            master_seed = 1
            "#,
        )
        .unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.forgetting_factor, 0.1);
        assert!(cfg.include_self && cfg.redraw_profile);
        assert_eq!(cfg.value_law, ValueLaw::RealGaussian);
        assert_eq!(cfg.grid_policy, GridPolicy::SpatialFrequency);
    }

    #[test]
    fn unknown_keys_rejected() {
        let mut text = ScenarioConfig::preset("exp1").unwrap().to_toml_string();
        text.push_str("\nbogus = 1\n");
        assert!(ScenarioConfig::from_toml_str(&text).is_err());
    }

    #[test]
    fn invalid_configs_rejected() {
        let ok = ScenarioConfig::preset("exp3").unwrap();
        let cases: Vec<Box<dyn Fn(&mut ScenarioConfig)>> = vec![
            Box::new(|c| c.t_list.clear()),
            Box::new(|c| c.trials = 0),
            Box::new(|c| c.t_list = vec![6]),
            Box::new(|c| c.num_atoms = 10),
            Box::new(|c| c.snr_profiles[0].snr_db = SnrSpec::PerUser(vec![1.0; 3])),
            Box::new(|c| c.groups[0].members.push(10)),
            Box::new(|c| c.forgetting_factor = 1.5),
            Box::new(|c| c.snr_profiles.push(c.snr_profiles[0].clone())),
            Box::new(|c| c.snr_profiles.clear()),
        ];
        for mutate in cases {
            let mut cfg = ok.clone();
            mutate(&mut cfg);
            assert!(matches!(cfg.validate(), Err(Error::Config(_))), "{cfg:?}");
        }
    }
}
