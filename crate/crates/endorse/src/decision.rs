//! The decision engine: from aggregates to a recommendation.
//!
//! Method 1 ranks entities by their mean lexicon score: a mean strictly
//! above the threshold (0.2 by default) reads as positive, and the
//! recommended celebrity is the sole positive one, both, or none.
//!
//! Method 2 compares the two celebrities on three dimensions: the joy
//! share of emotion calls, the positive share of polarity calls, and the
//! share of positive words among the top cloud terms. The better value
//! takes rank 1 per dimension, and whoever holds rank 1 on most
//! dimensions is recommended. Exact ties rank both first and are
//! flagged; an overall tie yields no recommendation. Rank vectors can
//! also be supplied from a file instead of being derived.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytics::{EmotionDistribution, PolarityDistribution, WordCloudData};
use crate::bayes::EmotionClass;
use crate::lexicon::{MeanSentiment, OpinionLexicon};

/// Mean-score threshold above which an entity counts as positive.
pub const DEFAULT_THRESHOLD: f64 = 0.2;

#[derive(Debug, Error)]
pub enum DecisionError {
    #[error("i/o failure on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid rank file: {0}")]
    InvalidRankFile(String),
}

/// Verdict of the mean-score test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SentimentClass {
    Positive,
    NotPositive,
}

impl SentimentClass {
    pub fn label(self) -> &'static str {
        match self {
            SentimentClass::Positive => "positive",
            SentimentClass::NotPositive => "not_positive",
        }
    }
}

impl fmt::Display for SentimentClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Positive iff the mean is strictly above [`DEFAULT_THRESHOLD`]; a mean
/// exactly on the threshold is not positive.
pub fn classify_mean(mean: f64) -> SentimentClass {
    classify_mean_with(mean, DEFAULT_THRESHOLD)
}

pub fn classify_mean_with(mean: f64, threshold: f64) -> SentimentClass {
    if mean > threshold {
        SentimentClass::Positive
    } else {
        SentimentClass::NotPositive
    }
}

/// Rank on one comparison dimension: 1 beats 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Rank {
    First,
    Second,
}

impl Rank {
    pub fn value(self) -> u8 {
        match self {
            Rank::First => 1,
            Rank::Second => 2,
        }
    }
}

impl TryFrom<u8> for Rank {
    type Error = String;

    fn try_from(value: u8) -> Result<Self, Self::Error> {
        match value {
            1 => Ok(Rank::First),
            2 => Ok(Rank::Second),
            other => Err(format!("rank must be 1 or 2, got {other}")),
        }
    }
}

impl From<Rank> for u8 {
    fn from(rank: Rank) -> u8 {
        rank.value()
    }
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// Ranks on the three comparison dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankVector {
    pub emotion: Rank,
    pub polarity: Rank,
    pub cloud: Rank,
}

impl RankVector {
    pub fn new(emotion: Rank, polarity: Rank, cloud: Rank) -> Self {
        Self {
            emotion,
            polarity,
            cloud,
        }
    }

    /// The published `1_2_2` style notation, dimensions in
    /// emotion, polarity, cloud order.
    pub fn notation(&self) -> String {
        format!("{}_{}_{}", self.emotion, self.polarity, self.cloud)
    }

    pub fn first_count(&self) -> usize {
        [self.emotion, self.polarity, self.cloud]
            .into_iter()
            .filter(|r| *r == Rank::First)
            .count()
    }
}

/// The three per-entity values the ranks are derived from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntityMetrics {
    pub entity: String,
    /// Share of emotion calls that came out joy.
    pub joy_share: f64,
    /// Positive calls over positive plus negative calls.
    pub positive_share: f64,
    /// Share of top cloud terms found in the positive lexicon.
    pub cloud_positive_share: f64,
}

/// Computes the three comparison metrics from an entity's aggregates.
/// Empty denominators yield 0 rather than an error: an entity with no
/// signal simply cannot win a dimension.
pub fn entity_metrics(
    emotions: &EmotionDistribution,
    polarity: &PolarityDistribution,
    cloud: &WordCloudData,
    lexicon: &OpinionLexicon,
) -> EntityMetrics {
    let joy_share = if emotions.total == 0 {
        0.0
    } else {
        emotions.count(EmotionClass::Joy) as f64 / emotions.total as f64
    };
    let polar_calls = polarity.positive + polarity.negative;
    let positive_share = if polar_calls == 0 {
        0.0
    } else {
        polarity.positive as f64 / polar_calls as f64
    };
    let top_terms = cloud.overall();
    let cloud_positive_share = if top_terms.is_empty() {
        0.0
    } else {
        let positive = top_terms
            .iter()
            .filter(|entry| lexicon.is_positive(&entry.term))
            .count();
        positive as f64 / top_terms.len() as f64
    };
    EntityMetrics {
        entity: emotions.entity.clone(),
        joy_share,
        positive_share,
        cloud_positive_share,
    }
}

/// Which dimensions tied exactly during rank derivation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct RankTies {
    pub emotion: bool,
    pub polarity: bool,
    pub cloud: bool,
}

impl RankTies {
    pub fn any(self) -> bool {
        self.emotion || self.polarity || self.cloud
    }
}

/// Ranks two entities per dimension: the strictly larger metric takes
/// rank 1, and an exact tie gives both rank 1 and sets the tie flag.
pub fn derive_ranks(a: &EntityMetrics, b: &EntityMetrics) -> (RankVector, RankVector, RankTies) {
    fn rank_pair(x: f64, y: f64) -> (Rank, Rank, bool) {
        if x > y {
            (Rank::First, Rank::Second, false)
        } else if y > x {
            (Rank::Second, Rank::First, false)
        } else {
            (Rank::First, Rank::First, true)
        }
    }
    let (a_emotion, b_emotion, tie_emotion) = rank_pair(a.joy_share, b.joy_share);
    let (a_polarity, b_polarity, tie_polarity) = rank_pair(a.positive_share, b.positive_share);
    let (a_cloud, b_cloud, tie_cloud) = rank_pair(a.cloud_positive_share, b.cloud_positive_share);
    (
        RankVector::new(a_emotion, a_polarity, a_cloud),
        RankVector::new(b_emotion, b_polarity, b_cloud),
        RankTies {
            emotion: tie_emotion,
            polarity: tie_polarity,
            cloud: tie_cloud,
        },
    )
}

/// The two recommendation methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Lexicon,
    NaiveBayes,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Lexicon => "lexicon",
            Method::NaiveBayes => "naive_bayes",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Who a method recommends.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Recommended {
    Celebrity(String),
    Both,
    Neither,
}

impl Recommended {
    /// The published string form: the name, `Both`, or `None`.
    pub fn label(&self) -> &str {
        match self {
            Recommended::Celebrity(name) => name,
            Recommended::Both => "Both",
            Recommended::Neither => "None",
        }
    }
}

impl fmt::Display for Recommended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Per-celebrity annotation inside a recommendation: the mean-score
/// verdict under method 1, the rank vector under method 2.
#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Class(SentimentClass),
    Ranks(RankVector),
}

impl Verdict {
    pub fn notation(&self) -> String {
        match self {
            Verdict::Class(class) => class.label().to_owned(),
            Verdict::Ranks(ranks) => ranks.notation(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CelebrityVerdict {
    pub name: String,
    pub verdict: Verdict,
}

/// One method's outcome for a campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct Recommendation {
    pub brand: String,
    pub method: Method,
    pub verdicts: Vec<CelebrityVerdict>,
    pub recommended: Recommended,
    pub tie: bool,
}

/// Method 1: the recommended celebrity is the sole one whose mean is
/// positive; two give `Both`, zero give `None`.
pub fn recommend_method1(
    brand: &MeanSentiment,
    celebrities: &[MeanSentiment; 2],
    threshold: f64,
) -> Recommendation {
    let verdicts: Vec<CelebrityVerdict> = celebrities
        .iter()
        .map(|mean| CelebrityVerdict {
            name: mean.entity.clone(),
            verdict: Verdict::Class(classify_mean_with(mean.mean, threshold)),
        })
        .collect();
    let positive: Vec<&str> = celebrities
        .iter()
        .filter(|mean| classify_mean_with(mean.mean, threshold) == SentimentClass::Positive)
        .map(|mean| mean.entity.as_str())
        .collect();
    let recommended = match positive.as_slice() {
        [] => Recommended::Neither,
        [sole] => Recommended::Celebrity((*sole).to_owned()),
        _ => Recommended::Both,
    };
    Recommendation {
        brand: brand.entity.clone(),
        method: Method::Lexicon,
        verdicts,
        recommended,
        tie: false,
    }
}

/// Whether a past brand/celebrity pairing looks supported by the data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Q1Support {
    Supported,
    Unsupported,
}

impl Q1Support {
    pub fn label(self) -> &'static str {
        match self {
            Q1Support::Supported => "supported",
            Q1Support::Unsupported => "unsupported",
        }
    }
}

/// The first campaign question: was the existing pairing a good idea?
#[derive(Debug, Clone, PartialEq)]
pub struct Q1Answer {
    pub brand: String,
    pub brand_class: SentimentClass,
    pub celebrities: Vec<(String, Q1Support)>,
}

/// A positive celebrity mean marks the past pairing as supported. The
/// brand's own verdict travels along as context.
pub fn answer_q1(
    brand: &MeanSentiment,
    celebrities: &[MeanSentiment; 2],
    threshold: f64,
) -> Q1Answer {
    Q1Answer {
        brand: brand.entity.clone(),
        brand_class: classify_mean_with(brand.mean, threshold),
        celebrities: celebrities
            .iter()
            .map(|mean| {
                let support = match classify_mean_with(mean.mean, threshold) {
                    SentimentClass::Positive => Q1Support::Supported,
                    SentimentClass::NotPositive => Q1Support::Unsupported,
                };
                (mean.entity.clone(), support)
            })
            .collect(),
    }
}

/// A celebrity with a rank vector, ready for method 2.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedCelebrity {
    pub name: String,
    pub ranks: RankVector,
}

/// Method 2: whoever holds rank 1 on more dimensions wins; equal counts
/// are a tie and yield no recommendation. Swapping the two arguments
/// never changes who is recommended.
pub fn recommend_method2(
    brand: &str,
    a: &RankedCelebrity,
    b: &RankedCelebrity,
) -> Recommendation {
    let firsts_a = a.ranks.first_count();
    let firsts_b = b.ranks.first_count();
    let (recommended, tie) = if firsts_a > firsts_b {
        (Recommended::Celebrity(a.name.clone()), false)
    } else if firsts_b > firsts_a {
        (Recommended::Celebrity(b.name.clone()), false)
    } else {
        (Recommended::Neither, true)
    };
    Recommendation {
        brand: brand.to_owned(),
        method: Method::NaiveBayes,
        verdicts: vec![
            CelebrityVerdict {
                name: a.name.clone(),
                verdict: Verdict::Ranks(a.ranks),
            },
            CelebrityVerdict {
                name: b.name.clone(),
                verdict: Verdict::Ranks(b.ranks),
            },
        ],
        recommended,
        tie,
    }
}

#[derive(Debug, Deserialize)]
struct RankFileEntry {
    name: String,
    emotion: u8,
    polarity: u8,
    cloud: u8,
}

#[derive(Debug, Deserialize)]
struct RankFile {
    celebrities: Vec<RankFileEntry>,
}

/// Externally supplied rank vectors, keyed by celebrity name. These take
/// the place of derived ranks, so published rankings can be replayed.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOverrides {
    pub celebrities: Vec<RankedCelebrity>,
}

impl RankOverrides {
    /// Reads `{"celebrities": [{"name", "emotion", "polarity", "cloud"}, ...]}`
    /// with ranks given as 1 or 2. Exactly two celebrities are expected.
    pub fn from_json_file(path: &Path) -> Result<Self, DecisionError> {
        let raw = std::fs::read_to_string(path).map_err(|source| DecisionError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let file: RankFile = serde_json::from_str(&raw)
            .map_err(|e| DecisionError::InvalidRankFile(e.to_string()))?;
        if file.celebrities.len() != 2 {
            return Err(DecisionError::InvalidRankFile(format!(
                "expected exactly 2 celebrities, found {}",
                file.celebrities.len()
            )));
        }
        let mut celebrities = Vec::new();
        for entry in file.celebrities {
            let rank = |value: u8, dimension: &str| {
                Rank::try_from(value).map_err(|e| {
                    DecisionError::InvalidRankFile(format!("{}: {dimension}: {e}", entry.name))
                })
            };
            celebrities.push(RankedCelebrity {
                ranks: RankVector::new(
                    rank(entry.emotion, "emotion")?,
                    rank(entry.polarity, "polarity")?,
                    rank(entry.cloud, "cloud")?,
                ),
                name: entry.name,
            });
        }
        Ok(Self { celebrities })
    }

    pub fn get(&self, name: &str) -> Option<&RankedCelebrity> {
        self.celebrities.iter().find(|c| c.name == name)
    }
}
