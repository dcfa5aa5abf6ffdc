//! Run configuration, read from TOML.
//!
//! Relative paths are resolved against the directory holding the config
//! file.

use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BetweennessMode, DEFAULT_PIVOTS};
use crate::grouping::{ConstantSource, GroupingSpec, HttpSource, ScoreFile, ScoreSource, SplitRule};
use crate::influence::IterationParams;
use crate::interactions::{DatasetFormat, OnError};
use crate::robustness::RemovalOrder;
use crate::temporal::TimeUnit;
use crate::virality::InfluencerThresholds;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dataset: DatasetConfig,
    pub scores: ScoresConfig,
    #[serde(default)]
    pub groups: GroupsConfig,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub robustness: RobustnessConfig,
    #[serde(default)]
    pub influence: InfluenceConfig,
    #[serde(default)]
    pub temporal: TemporalConfig,
    #[serde(default)]
    pub virality: ViralityConfig,
    #[serde(default)]
    pub output: OutputConfig,
    /// Directory relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    pub path: PathBuf,
    /// Inferred from the extension when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<DatasetFormat>,
    #[serde(default)]
    pub on_error: OnError,
    #[serde(default = "one")]
    pub sample_fraction: f64,
    #[serde(default)]
    pub sample_seed: u64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase", deny_unknown_fields)]
pub enum ScoresConfig {
    File {
        path: PathBuf,
    },
    Http {
        base_url: String,
        /// Name of the environment variable holding a bearer token.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        token_env: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cache_dir: Option<PathBuf>,
        #[serde(default = "default_parallelism")]
        parallelism: usize,
        #[serde(default = "default_retries")]
        max_retries: u32,
        #[serde(default = "default_timeout")]
        timeout_secs: u64,
    },
    Constant {
        value: f64,
    },
}

fn default_parallelism() -> usize {
    4
}

fn default_retries() -> u32 {
    3
}

fn default_timeout() -> u64 {
    10
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupsConfig {
    /// Percentile shares, lowest scores first.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fractions: Option<Vec<f64>>,
    /// Explicit cut points; exclusive with `fractions`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub names: Vec<String>,
}

impl GroupsConfig {
    /// Defaults to the 70/20/10 botscore split.
    pub fn spec(&self) -> Result<GroupingSpec> {
        let rule = match (&self.fractions, &self.thresholds) {
            (Some(_), Some(_)) => {
                return Err(Error::Config("[groups] takes either `fractions` or `thresholds`, not both".into()))
            }
            (Some(f), None) => SplitRule::Percentiles(f.clone()),
            (None, Some(t)) => SplitRule::Thresholds(t.clone()),
            (None, None) if self.names.is_empty() => return Ok(GroupingSpec::likely_automation()),
            (None, None) => SplitRule::Percentiles(vec![1.0 / self.names.len() as f64; self.names.len()]),
        };
        Ok(GroupingSpec {
            rule,
            names: self.names.clone(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BetweennessSetting {
    #[default]
    Auto,
    Exact,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisConfig {
    pub epsilon: f64,
    pub seed: u64,
    pub betweenness: BetweennessSetting,
    pub pivots: usize,
    pub epsilon_overrides: EpsilonOverrides,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            epsilon: 0.10,
            seed: 0,
            betweenness: BetweennessSetting::Auto,
            pivots: DEFAULT_PIVOTS,
            epsilon_overrides: EpsilonOverrides::default(),
        }
    }
}

/// Per-perspective tolerance; unset entries use `analysis.epsilon`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpsilonOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub statistical: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub network: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub robustness: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub influence: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temporal: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub virality: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RobustnessConfig {
    /// `score_desc` or `random`.
    pub order: String,
    pub seed: u64,
}

impl Default for RobustnessConfig {
    fn default() -> Self {
        RobustnessConfig {
            order: "score_desc".into(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InfluenceConfig {
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub weighted: bool,
}

impl Default for InfluenceConfig {
    fn default() -> Self {
        InfluenceConfig {
            damping: 0.85,
            tol: 1e-10,
            max_iter: 1000,
            weighted: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TemporalConfig {
    pub unit: TimeUnit,
    pub include_uncategorized: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ViralityConfig {
    pub top_k: usize,
    pub jaccard_threshold: f64,
    pub min_size: f64,
    pub max_hours: f64,
}

impl Default for ViralityConfig {
    fn default() -> Self {
        ViralityConfig {
            top_k: 8,
            jaccard_threshold: 0.5,
            min_size: 50.0,
            max_hours: 24.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: "out".into() }
    }
}

impl RunConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| match Error::io(path, e) {
            Error::FileNotFound(p) => Error::Config(format!("config file not found: {}", p.display())),
            e => e,
        })?;
        let mut cfg = Self::from_toml(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let eps = &self.analysis.epsilon_overrides;
        let all = [
            Some(self.analysis.epsilon),
            eps.statistical,
            eps.network,
            eps.robustness,
            eps.influence,
            eps.structure,
            eps.temporal,
            eps.virality,
        ];
        if all.iter().flatten().any(|e| !(*e > 0.0)) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        if !(self.dataset.sample_fraction > 0.0 && self.dataset.sample_fraction <= 1.0) {
            return Err(Error::InvalidFraction(self.dataset.sample_fraction));
        }
        if self.analysis.pivots == 0 {
            return Err(Error::Config("analysis.pivots must be positive".into()));
        }
        self.removal_order()?;
        self.groups.spec()?;
        Ok(())
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn dataset_path(&self) -> PathBuf {
        self.resolve(&self.dataset.path)
    }

    pub fn dataset_format(&self) -> DatasetFormat {
        self.dataset
            .format
            .unwrap_or_else(|| DatasetFormat::from_path(&self.dataset.path))
    }

    pub fn output_dir(&self) -> PathBuf {
        self.resolve(&self.output.dir)
    }

    pub fn epsilon_for(&self, perspective: crate::pipeline::Perspective) -> f64 {
        use crate::pipeline::Perspective as P;
        let o = &self.analysis.epsilon_overrides;
        match perspective {
            P::Statistical => o.statistical,
            P::Network => o.network,
            P::Robustness => o.robustness,
            P::Influence => o.influence,
            P::Structure => o.structure,
            P::Temporal => o.temporal,
            P::Virality => o.virality,
        }
        .unwrap_or(self.analysis.epsilon)
    }

    /// Sets the global tolerance and drops every override.
    pub fn override_epsilon(&mut self, epsilon: f64) {
        self.analysis.epsilon = epsilon;
        self.analysis.epsilon_overrides = EpsilonOverrides::default();
    }

    /// Replaces every seed in the config.
    pub fn override_seed(&mut self, seed: u64) {
        self.dataset.sample_seed = seed;
        self.analysis.seed = seed;
        self.robustness.seed = seed;
    }

    pub fn betweenness_mode(&self) -> BetweennessMode {
        let seed = self.analysis.seed;
        match self.analysis.betweenness {
            BetweennessSetting::Auto => BetweennessMode::Auto { seed },
            BetweennessSetting::Exact => BetweennessMode::Exact,
            BetweennessSetting::Sampled => BetweennessMode::Sampled {
                pivots: self.analysis.pivots,
                seed,
            },
        }
    }

    pub fn removal_order(&self) -> Result<RemovalOrder> {
        match self.robustness.order.as_str() {
            "random" => Ok(RemovalOrder::Random {
                seed: self.robustness.seed,
            }),
            other => other.parse(),
        }
    }

    pub fn iteration_params(&self) -> IterationParams {
        IterationParams {
            damping: self.influence.damping,
            tol: self.influence.tol,
            max_iter: self.influence.max_iter,
            weighted: self.influence.weighted,
        }
    }

    pub fn influencer_thresholds(&self) -> InfluencerThresholds {
        InfluencerThresholds {
            min_size: self.virality.min_size,
            max_hours: self.virality.max_hours,
        }
    }

    /// Builds the configured score source. A missing score file is a
    /// configuration error naming the path.
    pub fn score_source(&self) -> Result<Box<dyn ScoreSource + Sync>> {
        Ok(match &self.scores {
            ScoresConfig::File { path } => {
                let path = self.resolve(path);
                match ScoreFile::load(&path) {
                    Err(Error::FileNotFound(p)) => {
                        return Err(Error::Config(format!("score file not found: {}", p.display())))
                    }
                    other => Box::new(other?),
                }
            }
            ScoresConfig::Http {
                base_url,
                token_env,
                cache_dir,
                parallelism,
                max_retries,
                timeout_secs,
            } => {
                let mut src = HttpSource::new(base_url.clone());
                if let Some(var) = token_env {
                    src = src.with_token_env(var);
                }
                src.cache_dir = cache_dir.as_ref().map(|d| self.resolve(d));
                src.parallelism = *parallelism;
                src.max_retries = *max_retries;
                src.timeout = Duration::from_secs(*timeout_secs);
                Box::new(src)
            }
            ScoresConfig::Constant { value } => Box::new(ConstantSource(*value)),
        })
    }
}
