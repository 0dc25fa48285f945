//! Tweet acquisition and corpus persistence.
//!
//! A campaign names one brand and exactly two candidate celebrities; each
//! entity carries the query terms used to collect its tweets. Collected
//! tweets are stored as JSONL, one object per line, and grouped per entity
//! into a [`Corpus`]. Providers abstract over the tweet source: the
//! file-backed provider replays a recorded pool deterministically, the HTTP
//! provider is a stub that only validates its configuration.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One collected tweet, attributed to the entity whose query fetched it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawTweet {
    pub id: String,
    pub entity: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created_at: Option<String>,
}

/// Whether an entity is the brand under review or a candidate celebrity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntityKind {
    Brand,
    Celebrity,
}

/// A named entity plus the query terms used to collect its tweets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityProfile {
    pub name: String,
    pub kind: EntityKind,
    pub query_terms: Vec<String>,
}

/// One brand compared against exactly two celebrities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CampaignSpec {
    pub brand: EntityProfile,
    pub celebrities: Vec<EntityProfile>,
}

impl CampaignSpec {
    /// Parses and validates a campaign file.
    pub fn from_json_file(path: &Path) -> Result<Self, IngestError> {
        let raw = std::fs::read_to_string(path).map_err(|source| IngestError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let spec: CampaignSpec = serde_json::from_str(&raw).map_err(|e| IngestError::MalformedLine {
            line: e.line(),
            reason: e.to_string(),
        })?;
        spec.validate()?;
        Ok(spec)
    }

    /// Checks the structural rules: one brand, two celebrities, unique
    /// non-empty names, and at least one query term per entity.
    pub fn validate(&self) -> Result<(), IngestError> {
        let invalid = |reason: String| IngestError::InvalidCampaign(reason);
        if self.brand.kind != EntityKind::Brand {
            return Err(invalid(format!("entity {:?} must have kind brand", self.brand.name)));
        }
        if self.celebrities.len() != 2 {
            return Err(invalid(format!(
                "expected exactly 2 celebrities, found {}",
                self.celebrities.len()
            )));
        }
        let mut names = Vec::new();
        for profile in self.entities() {
            if profile.name.is_empty() {
                return Err(invalid("entity names must be non-empty".into()));
            }
            if profile.query_terms.is_empty() {
                return Err(invalid(format!("entity {:?} has no query terms", profile.name)));
            }
            if names.contains(&profile.name.as_str()) {
                return Err(invalid(format!("duplicate entity name {:?}", profile.name)));
            }
            names.push(profile.name.as_str());
        }
        for celebrity in &self.celebrities {
            if celebrity.kind != EntityKind::Celebrity {
                return Err(invalid(format!(
                    "entity {:?} must have kind celebrity",
                    celebrity.name
                )));
            }
        }
        Ok(())
    }

    /// Brand first, then the two celebrities in declaration order.
    pub fn entities(&self) -> impl Iterator<Item = &EntityProfile> {
        std::iter::once(&self.brand).chain(self.celebrities.iter())
    }
}

/// Tweets grouped per entity, preserving per-entity insertion order.
/// Entities iterate in name order so downstream output is deterministic.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    entities: BTreeMap<String, Vec<RawTweet>>,
}

impl Corpus {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a tweet to its entity's list, creating the entity on first use.
    pub fn push(&mut self, tweet: RawTweet) {
        self.entities.entry(tweet.entity.clone()).or_default().push(tweet);
    }

    pub fn entity_names(&self) -> impl Iterator<Item = &str> {
        self.entities.keys().map(String::as_str)
    }

    pub fn tweets(&self, entity: &str) -> &[RawTweet] {
        self.entities.get(entity).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[RawTweet])> {
        self.entities.iter().map(|(name, tweets)| (name.as_str(), tweets.as_slice()))
    }

    pub fn entity_count(&self) -> usize {
        self.entities.len()
    }

    pub fn tweet_count(&self) -> usize {
        self.entities.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.values().all(Vec::is_empty)
    }
}

impl FromIterator<RawTweet> for Corpus {
    fn from_iter<I: IntoIterator<Item = RawTweet>>(iter: I) -> Self {
        let mut corpus = Corpus::new();
        for tweet in iter {
            corpus.push(tweet);
        }
        corpus
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("i/o failure on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("invalid campaign: {0}")]
    InvalidCampaign(String),
}

/// Loads a JSONL tweet file into a corpus grouped by entity.
///
/// Line numbers in errors are 1-based. Unknown keys are tolerated; `id`,
/// `entity`, and `text` are required, and `id` must be non-empty.
pub fn load_jsonl(path: &Path) -> Result<Corpus, IngestError> {
    let file = File::open(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut corpus = Corpus::new();
    for (index, line) in BufReader::new(file).lines().enumerate() {
        let line_no = index + 1;
        let line = line.map_err(|source| IngestError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let tweet: RawTweet =
            serde_json::from_str(&line).map_err(|e| IngestError::MalformedLine {
                line: line_no,
                reason: e.to_string(),
            })?;
        if tweet.id.is_empty() {
            return Err(IngestError::MalformedLine {
                line: line_no,
                reason: "tweet id must be non-empty".into(),
            });
        }
        corpus.push(tweet);
    }
    Ok(corpus)
}

/// Writes a corpus as JSONL, entities in name order, tweets in stored order.
pub fn save_jsonl(corpus: &Corpus, path: &Path) -> Result<(), IngestError> {
    let io_err = |source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut file = File::create(path).map_err(io_err)?;
    for (_, tweets) in corpus.iter() {
        for tweet in tweets {
            let line = serde_json::to_string(tweet).expect("tweet serialization cannot fail");
            file.write_all(line.as_bytes()).map_err(io_err)?;
            file.write_all(b"\n").map_err(io_err)?;
        }
    }
    Ok(())
}

#[derive(Debug, Error)]
pub enum ProviderError {
    #[error("provider unavailable: {0}")]
    Unavailable(String),
    #[error("provider quota exceeded")]
    QuotaExceeded,
}

/// A tweet as a provider yields it: not yet attributed to an entity.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct ProviderTweet {
    pub id: String,
    pub text: String,
    #[serde(default)]
    pub created_at: Option<String>,
}

/// A source of tweets matching a set of query terms.
pub trait TweetProvider {
    /// Returns at most `max_count` tweets matching any of the query terms,
    /// in the provider's stream order.
    fn fetch(&self, query_terms: &[String], max_count: usize)
        -> Result<Vec<ProviderTweet>, ProviderError>;
}

/// Replays a recorded JSONL pool: a tweet matches when its text contains any
/// query term, compared case-insensitively. Stream order is file order.
#[derive(Debug, Clone)]
pub struct FileProvider {
    path: PathBuf,
}

impl FileProvider {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Self { path: path.into() }
    }
}

impl TweetProvider for FileProvider {
    fn fetch(
        &self,
        query_terms: &[String],
        max_count: usize,
    ) -> Result<Vec<ProviderTweet>, ProviderError> {
        let file = File::open(&self.path).map_err(|e| {
            ProviderError::Unavailable(format!("cannot open {}: {e}", self.path.display()))
        })?;
        let needles: Vec<String> = query_terms.iter().map(|t| t.to_lowercase()).collect();
        let mut matches = Vec::new();
        for (index, line) in BufReader::new(file).lines().enumerate() {
            if matches.len() >= max_count {
                break;
            }
            let line = line.map_err(|e| {
                ProviderError::Unavailable(format!("read failure in {}: {e}", self.path.display()))
            })?;
            let tweet: ProviderTweet = serde_json::from_str(&line).map_err(|e| {
                ProviderError::Unavailable(format!(
                    "malformed pool line {}: {e}",
                    index + 1
                ))
            })?;
            let haystack = tweet.text.to_lowercase();
            if needles.iter().any(|needle| haystack.contains(needle)) {
                matches.push(tweet);
            }
        }
        Ok(matches)
    }
}

/// Stub for live collection. Construction validates the `ENDORSE_API_BASE`
/// and `ENDORSE_API_TOKEN` settings; fetching always reports the provider
/// as unavailable because no network client ships with this build.
#[derive(Debug, Clone)]
pub struct HttpProvider {
    base_url: String,
    #[allow(dead_code)]
    token: String,
}

impl HttpProvider {
    pub const BASE_URL_VAR: &'static str = "ENDORSE_API_BASE";
    pub const TOKEN_VAR: &'static str = "ENDORSE_API_TOKEN";

    pub fn from_env() -> Result<Self, ProviderError> {
        let read = |var: &str| {
            std::env::var(var)
                .map_err(|_| ProviderError::Unavailable(format!("{var} is not set")))
        };
        Self::from_parts(read(Self::BASE_URL_VAR)?, read(Self::TOKEN_VAR)?)
    }

    pub fn from_parts(base_url: String, token: String) -> Result<Self, ProviderError> {
        if base_url.is_empty() || token.is_empty() {
            return Err(ProviderError::Unavailable(
                "base url and token must be non-empty".into(),
            ));
        }
        Ok(Self { base_url, token })
    }
}

impl TweetProvider for HttpProvider {
    fn fetch(
        &self,
        _query_terms: &[String],
        _max_count: usize,
    ) -> Result<Vec<ProviderTweet>, ProviderError> {
        Err(ProviderError::Unavailable(format!(
            "live collection against {} is not implemented in this build",
            self.base_url
        )))
    }
}

/// Collects up to `max_count` tweets for one entity and stamps them with the
/// entity's name: attribution comes from the query, not from the pool.
pub fn fetch(
    provider: &dyn TweetProvider,
    profile: &EntityProfile,
    max_count: usize,
) -> Result<Vec<RawTweet>, ProviderError> {
    let stream = provider.fetch(&profile.query_terms, max_count)?;
    Ok(stream
        .into_iter()
        .map(|t| RawTweet {
            id: t.id,
            entity: profile.name.clone(),
            text: t.text,
            created_at: t.created_at,
        })
        .collect())
}
