//! Lexicon-based sentiment scoring.
//!
//! A tweet's score is the number of positive word occurrences minus the
//! number of negative ones, as plain integers: `good good bad` scores +1.
//! Word lists are plain text, one word per line, with `;` and `#` comment
//! lines. A word found on both sides is excluded from both and reported,
//! so the sets are always disjoint. A default list pair is bundled and any
//! other file pair can be loaded in its place.

use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::sync::LazyLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::textprep::CleanTweet;

const BUNDLED_POSITIVE: &str = include_str!("../data/positive-words.txt");
const BUNDLED_NEGATIVE: &str = include_str!("../data/negative-words.txt");

static BUNDLED: LazyLock<OpinionLexicon> = LazyLock::new(|| {
    OpinionLexicon::from_sources(BUNDLED_POSITIVE, BUNDLED_NEGATIVE)
        .expect("bundled lexicon files are valid")
});

/// Disjoint positive and negative word sets, lowercase.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OpinionLexicon {
    positive: HashSet<String>,
    negative: HashSet<String>,
    conflicts: Vec<String>,
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("i/o failure on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{side} word list is empty")]
    EmptyLexicon { side: &'static str },
    #[error("words added to both sides: {0:?}")]
    Conflict(Vec<String>),
    #[error("entity {0:?} has no scores to average")]
    EmptyEntity(String),
}

fn parse_word_list(source: &str) -> HashSet<String> {
    source
        .lines()
        .map(str::trim)
        .filter(|line| !line.is_empty() && !line.starts_with(';') && !line.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

impl OpinionLexicon {
    /// Builds a lexicon from the contents of a positive and a negative word
    /// list. Words on both sides are excluded from both and recorded.
    pub fn from_sources(positive: &str, negative: &str) -> Result<Self, LexiconError> {
        let mut lexicon = Self {
            positive: parse_word_list(positive),
            negative: parse_word_list(negative),
            conflicts: Vec::new(),
        };
        lexicon.resolve_conflicts();
        lexicon.check_non_empty()?;
        Ok(lexicon)
    }

    /// The word lists shipped with the crate, parsed once.
    pub fn bundled() -> &'static OpinionLexicon {
        &BUNDLED
    }

    fn resolve_conflicts(&mut self) {
        let shared: Vec<String> = self
            .positive
            .intersection(&self.negative)
            .cloned()
            .collect();
        for word in &shared {
            self.positive.remove(word);
            self.negative.remove(word);
        }
        self.conflicts.extend(shared);
        self.conflicts.sort();
        self.conflicts.dedup();
    }

    fn check_non_empty(&self) -> Result<(), LexiconError> {
        if self.positive.is_empty() {
            return Err(LexiconError::EmptyLexicon { side: "positive" });
        }
        if self.negative.is_empty() {
            return Err(LexiconError::EmptyLexicon { side: "negative" });
        }
        Ok(())
    }

    /// Adds words to both sides. A word listed in both `extra_positive` and
    /// `extra_negative` in the same call is rejected; a new word clashing
    /// with the opposite existing side is excluded from both and recorded,
    /// the same rule the loader applies.
    pub fn augment(
        &mut self,
        extra_positive: &[String],
        extra_negative: &[String],
    ) -> Result<(), LexiconError> {
        let pos: HashSet<String> = extra_positive.iter().map(|w| w.to_lowercase()).collect();
        let neg: HashSet<String> = extra_negative.iter().map(|w| w.to_lowercase()).collect();
        let mut both: Vec<String> = pos.intersection(&neg).cloned().collect();
        if !both.is_empty() {
            both.sort();
            return Err(LexiconError::Conflict(both));
        }
        self.positive.extend(pos);
        self.negative.extend(neg);
        self.resolve_conflicts();
        self.check_non_empty()
    }

    pub fn is_positive(&self, word: &str) -> bool {
        self.positive.contains(word)
    }

    pub fn is_negative(&self, word: &str) -> bool {
        self.negative.contains(word)
    }

    pub fn positive_count(&self) -> usize {
        self.positive.len()
    }

    pub fn negative_count(&self) -> usize {
        self.negative.len()
    }

    /// Words excluded because they appeared on both sides, sorted.
    pub fn conflicts(&self) -> &[String] {
        &self.conflicts
    }

    /// Positive words in sorted order.
    pub fn positive_words(&self) -> Vec<&str> {
        let mut words: Vec<&str> = self.positive.iter().map(String::as_str).collect();
        words.sort_unstable();
        words
    }

    /// Negative words in sorted order.
    pub fn negative_words(&self) -> Vec<&str> {
        let mut words: Vec<&str> = self.negative.iter().map(String::as_str).collect();
        words.sort_unstable();
        words
    }
}

/// Loads a lexicon from a positive and a negative word list file.
pub fn load_lexicon(positive: &Path, negative: &Path) -> Result<OpinionLexicon, LexiconError> {
    let read = |path: &Path| {
        std::fs::read_to_string(path).map_err(|source| LexiconError::Io {
            path: path.to_path_buf(),
            source,
        })
    };
    OpinionLexicon::from_sources(&read(positive)?, &read(negative)?)
}

/// One tweet's integer sentiment score.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentimentScore {
    pub tweet_id: String,
    pub score: i64,
}

/// Per-entity mean of tweet scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanSentiment {
    pub entity: String,
    pub mean: f64,
    pub n: usize,
}

/// Positive occurrences minus negative occurrences. Every occurrence
/// counts: a token matching twice contributes twice.
pub fn score_tokens(tokens: &[String], lexicon: &OpinionLexicon) -> i64 {
    let mut score = 0i64;
    for token in tokens {
        if lexicon.is_positive(token) {
            score += 1;
        } else if lexicon.is_negative(token) {
            score -= 1;
        }
    }
    score
}

pub fn score_tweet(tweet: &CleanTweet, lexicon: &OpinionLexicon) -> SentimentScore {
    SentimentScore {
        tweet_id: tweet.id.clone(),
        score: score_tokens(&tweet.tokens, lexicon),
    }
}

/// Arithmetic mean of an entity's scores; an entity with no scores has no
/// mean and is an error, never silently zero.
pub fn mean_sentiment(entity: &str, scores: &[i64]) -> Result<MeanSentiment, LexiconError> {
    if scores.is_empty() {
        return Err(LexiconError::EmptyEntity(entity.to_owned()));
    }
    let sum: i64 = scores.iter().sum();
    Ok(MeanSentiment {
        entity: entity.to_owned(),
        mean: sum as f64 / scores.len() as f64,
        n: scores.len(),
    })
}

/// Means are reported with seven decimal places.
pub fn format_mean(mean: f64) -> String {
    format!("{mean:.7}")
}
