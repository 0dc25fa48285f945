//! Tweet text normalization.
//!
//! [`clean_text`] applies a fixed sequence of rules: URL tokens, retweet
//! markers, hashtag tokens, and mention tokens are removed whole; then
//! punctuation, symbols, and emoji go, then digits, the remainder is
//! lowercased, and whitespace runs collapse to single spaces. The output
//! alphabet is letters and single spaces only, and cleaning is idempotent.
//!
//! No stemming and no stop-word removal happens here: scoring and
//! classification see every surviving word. Stop words are dropped much
//! later, only when word clouds are built.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::ingest::{Corpus, RawTweet};

/// A tweet after cleaning, with its whitespace tokens precomputed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanTweet {
    pub id: String,
    pub entity: String,
    pub text_clean: String,
    pub tokens: Vec<String>,
}

impl CleanTweet {
    /// Cleans one raw tweet. The result may have empty text; corpus-level
    /// filtering decides whether it survives.
    pub fn from_raw(raw: &RawTweet) -> Self {
        let text_clean = clean_text(&raw.text);
        let tokens = tokenize(&text_clean);
        Self {
            id: raw.id.clone(),
            entity: raw.entity.clone(),
            text_clean,
            tokens,
        }
    }
}

/// Per-entity tweet counts before and after cleaning.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleaningReport {
    pub entity: String,
    pub before_count: usize,
    pub after_count: usize,
}

/// Cleaned tweets grouped per entity, in entity name order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CleanCorpus {
    entities: Vec<(String, Vec<CleanTweet>)>,
}

impl CleanCorpus {
    pub fn entity_names(&self) -> impl Iterator<Item = &str> {
        self.entities.iter().map(|(name, _)| name.as_str())
    }

    pub fn tweets(&self, entity: &str) -> &[CleanTweet] {
        self.entities
            .iter()
            .find(|(name, _)| name == entity)
            .map(|(_, tweets)| tweets.as_slice())
            .unwrap_or(&[])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[CleanTweet])> {
        self.entities
            .iter()
            .map(|(name, tweets)| (name.as_str(), tweets.as_slice()))
    }

    pub fn tweet_count(&self) -> usize {
        self.entities.iter().map(|(_, t)| t.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.iter().all(|(_, t)| t.is_empty())
    }

    pub fn from_tweets(tweets: Vec<CleanTweet>) -> Self {
        let mut entities: Vec<(String, Vec<CleanTweet>)> = Vec::new();
        for tweet in tweets {
            match entities.iter_mut().find(|(name, _)| *name == tweet.entity) {
                Some((_, list)) => list.push(tweet),
                None => entities.push((tweet.entity.clone(), vec![tweet])),
            }
        }
        entities.sort_by(|(a, _), (b, _)| a.cmp(b));
        Self { entities }
    }
}

fn is_url_token(token: &str) -> bool {
    let lower = token.to_ascii_lowercase();
    lower.starts_with("http://") || lower.starts_with("https://") || lower.starts_with("www.")
}

fn is_mention_token(token: &str) -> bool {
    token.starts_with('@')
}

fn is_hashtag_token(token: &str) -> bool {
    token.starts_with('#')
}

/// Normalizes raw tweet text. Rules, in order: drop URL tokens
/// (`http://`, `https://`, `www.` prefixes); drop retweet markers (a
/// leading `RT` and any `RT` directly before a mention); drop hashtag
/// tokens whole; drop mention tokens whole; drop punctuation, symbols,
/// and emoji; drop digits; lowercase; collapse whitespace and trim.
///
/// Hashtags and mentions are removed as whole tokens so campaign tags
/// cannot leak their embedded words into scoring.
pub fn clean_text(raw: &str) -> String {
    let tokens: Vec<&str> = raw.split_whitespace().filter(|t| !is_url_token(t)).collect();
    let mut kept: Vec<&str> = Vec::new();
    for (index, token) in tokens.iter().enumerate() {
        let retweet_marker = *token == "RT"
            && (index == 0 || tokens.get(index + 1).is_some_and(|next| is_mention_token(next)));
        if retweet_marker || is_hashtag_token(token) || is_mention_token(token) {
            continue;
        }
        kept.push(token);
    }
    let letters_only: String = kept
        .join(" ")
        .chars()
        .filter(|c| c.is_alphabetic() || *c == ' ')
        .collect();
    let lowered = letters_only.to_lowercase();
    let swept: String = lowered
        .chars()
        .filter(|c| c.is_alphabetic() || *c == ' ')
        .collect();
    let mut out = String::with_capacity(swept.len());
    for word in swept.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

/// Splits cleaned text on spaces, yielding no empty tokens.
pub fn tokenize(text_clean: &str) -> Vec<String> {
    text_clean
        .split(' ')
        .filter(|t| !t.is_empty())
        .map(str::to_owned)
        .collect()
}

/// Cleans every entity's tweets and reports before/after counts.
///
/// Dropped per entity: tweets whose raw text is the literal `NA`, tweets
/// that clean to empty text, and exact duplicates of an earlier cleaned
/// text (the first occurrence survives). Entities are processed and
/// reported in corpus name order.
pub fn clean_corpus(corpus: &Corpus) -> (CleanCorpus, Vec<CleaningReport>) {
    let mut entities = Vec::new();
    let mut reports = Vec::new();
    for (entity, raw_tweets) in corpus.iter() {
        let mut seen: HashSet<String> = HashSet::new();
        let mut kept: Vec<CleanTweet> = Vec::new();
        for raw in raw_tweets {
            if raw.text == "NA" {
                continue;
            }
            let cleaned = CleanTweet::from_raw(raw);
            if cleaned.text_clean.is_empty() || !seen.insert(cleaned.text_clean.clone()) {
                continue;
            }
            kept.push(cleaned);
        }
        reports.push(CleaningReport {
            entity: entity.to_owned(),
            before_count: raw_tweets.len(),
            after_count: kept.len(),
        });
        entities.push((entity.to_owned(), kept));
    }
    (CleanCorpus { entities }, reports)
}
