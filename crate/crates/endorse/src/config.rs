//! Run configuration.
//!
//! A run is described by a single JSON file naming the campaign, the
//! tweet source, and any non-default resources. Relative paths inside
//! the file resolve against the file's own directory, so a config can
//! sit next to its data and work from any working directory.
//!
//! ```json
//! {
//!   "campaign": "campaign.json",
//!   "tweets": "tweets.jsonl",
//!   "alpha": 1.0,
//!   "top_n": 30,
//!   "out_dir": "out"
//! }
//! ```
//!
//! Instead of `tweets`, a `provider` block selects live collection:
//! `{"kind": "file", "path": "pool.jsonl", "max_count": 500}`.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::bayes::DEFAULT_NEUTRAL_BAND;
use crate::decision::DEFAULT_THRESHOLD;

pub const DEFAULT_ALPHA: f64 = 1.0;
pub const DEFAULT_TOP_N: usize = 30;
pub const DEFAULT_MIN_COUNT: u64 = 1;
pub const DEFAULT_MAX_COUNT: usize = 500;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("i/o failure on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config does not parse: {0}")]
    Parse(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Where tweets come from when they are not read from a file directly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProviderKind {
    File,
    Http,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProviderConfig {
    pub kind: ProviderKind,
    /// Tweet pool path; required for the file provider.
    pub path: Option<PathBuf>,
    #[serde(default = "default_max_count")]
    pub max_count: usize,
}

fn default_max_count() -> usize {
    DEFAULT_MAX_COUNT
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LexiconPaths {
    pub positive: PathBuf,
    pub negative: PathBuf,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelPaths {
    pub emotion: Option<PathBuf>,
    pub polarity: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    campaign: PathBuf,
    tweets: Option<PathBuf>,
    provider: Option<ProviderConfig>,
    lexicon: Option<LexiconPaths>,
    #[serde(default)]
    models: ModelPaths,
    stopwords: Option<PathBuf>,
    #[serde(default = "default_alpha")]
    alpha: f64,
    #[serde(default = "default_top_n")]
    top_n: usize,
    #[serde(default = "default_min_count")]
    min_count: u64,
    #[serde(default = "default_neutral_band")]
    neutral_band: f64,
    #[serde(default = "default_threshold")]
    threshold: f64,
    #[serde(default = "default_out_dir")]
    out_dir: PathBuf,
}

fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}

fn default_top_n() -> usize {
    DEFAULT_TOP_N
}

fn default_min_count() -> u64 {
    DEFAULT_MIN_COUNT
}

fn default_neutral_band() -> f64 {
    DEFAULT_NEUTRAL_BAND
}

fn default_threshold() -> f64 {
    DEFAULT_THRESHOLD
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

/// A fully resolved and validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub campaign: PathBuf,
    pub tweets: Option<PathBuf>,
    pub provider: Option<ProviderConfig>,
    pub lexicon: Option<LexiconPaths>,
    pub models: ModelPaths,
    pub stopwords: Option<PathBuf>,
    pub alpha: f64,
    pub top_n: usize,
    pub min_count: u64,
    pub neutral_band: f64,
    pub threshold: f64,
    pub out_dir: PathBuf,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out_dir: Option<PathBuf>,
    pub threshold: Option<f64>,
    pub alpha: Option<f64>,
    pub top_n: Option<usize>,
    pub neutral_band: Option<f64>,
}

impl RunConfig {
    /// Loads a config file, resolves its relative paths against the
    /// file's directory, applies any command-line overrides, and
    /// validates the result.
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self, ConfigError> {
        let raw_text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let raw: RawConfig =
            serde_json::from_str(&raw_text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        let resolve = |p: PathBuf| -> PathBuf {
            if p.is_absolute() {
                p
            } else {
                base.join(p)
            }
        };

        let mut provider = raw.provider;
        if let Some(p) = provider.as_mut() {
            p.path = p.path.take().map(&resolve);
        }
        let config = RunConfig {
            campaign: resolve(raw.campaign),
            tweets: raw.tweets.map(&resolve),
            provider,
            lexicon: raw.lexicon.map(|l| LexiconPaths {
                positive: resolve(l.positive),
                negative: resolve(l.negative),
            }),
            models: ModelPaths {
                emotion: raw.models.emotion.map(&resolve),
                polarity: raw.models.polarity.map(&resolve),
            },
            stopwords: raw.stopwords.map(&resolve),
            alpha: overrides.alpha.unwrap_or(raw.alpha),
            top_n: overrides.top_n.unwrap_or(raw.top_n),
            min_count: raw.min_count,
            neutral_band: overrides.neutral_band.unwrap_or(raw.neutral_band),
            threshold: overrides.threshold.unwrap_or(raw.threshold),
            // An output dir given on the command line is relative to the
            // caller's working directory, not the config file.
            out_dir: overrides.out_dir.clone().unwrap_or_else(|| resolve(raw.out_dir)),
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        match (&self.tweets, &self.provider) {
            (None, None) => {
                return Err(ConfigError::Invalid(
                    "either `tweets` or `provider` must be given".into(),
                ))
            }
            (Some(_), Some(_)) => {
                return Err(ConfigError::Invalid(
                    "`tweets` and `provider` are mutually exclusive".into(),
                ))
            }
            _ => {}
        }
        if let Some(provider) = &self.provider {
            if provider.kind == ProviderKind::File && provider.path.is_none() {
                return Err(ConfigError::Invalid(
                    "file provider needs a `path`".into(),
                ));
            }
            if provider.max_count == 0 {
                return Err(ConfigError::Invalid("provider `max_count` must be at least 1".into()));
            }
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(ConfigError::Invalid(format!(
                "`alpha` must be finite and positive, got {}",
                self.alpha
            )));
        }
        if self.top_n == 0 {
            return Err(ConfigError::Invalid("`top_n` must be at least 1".into()));
        }
        if self.min_count == 0 {
            return Err(ConfigError::Invalid("`min_count` must be at least 1".into()));
        }
        if !(self.neutral_band.is_finite() && self.neutral_band >= 0.0) {
            return Err(ConfigError::Invalid(format!(
                "`neutral_band` must be finite and non-negative, got {}",
                self.neutral_band
            )));
        }
        if !self.threshold.is_finite() {
            return Err(ConfigError::Invalid(format!(
                "`threshold` must be finite, got {}",
                self.threshold
            )));
        }
        Ok(())
    }
}
