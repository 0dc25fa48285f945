//! Naive Bayes emotion and polarity classification.
//!
//! Models are multinomial with Laplace smoothing: the prior of a class is
//! its share of training documents, and the likelihood of a token is
//! `(count + alpha) / (class_tokens + alpha * (vocab + 1))`. The `+ 1`
//! reserves one shared pseudo-slot that stands in for every token the
//! training vocabulary has never seen, so likelihoods over the vocabulary
//! plus that slot always sum to one. Classification runs in log space and
//! posteriors are normalized after subtracting the maximum score.
//!
//! Six emotions are recognized: anger, disgust, fear, joy, sadness, and
//! surprise. When the top two emotion posteriors are closer than the tie
//! tolerance the tweet stays unclassified rather than being forced into a
//! class. Polarity compares the positive and negative posteriors as a
//! ratio; a ratio within the neutral band of 1 reads as neutral.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::OpinionLexicon;
use crate::textprep::CleanTweet;

/// Posterior gaps below this count as ties.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Default width of the neutral band around a polarity ratio of 1.
pub const DEFAULT_NEUTRAL_BAND: f64 = 1e-9;

/// Version written into model files.
pub const MODEL_VERSION: u32 = 1;

/// The six recognized emotions, in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmotionClass {
    Anger,
    Disgust,
    Fear,
    Joy,
    Sadness,
    Surprise,
}

impl EmotionClass {
    pub const ALL: [EmotionClass; 6] = [
        EmotionClass::Anger,
        EmotionClass::Disgust,
        EmotionClass::Fear,
        EmotionClass::Joy,
        EmotionClass::Sadness,
        EmotionClass::Surprise,
    ];

    pub fn label(self) -> &'static str {
        match self {
            EmotionClass::Anger => "anger",
            EmotionClass::Disgust => "disgust",
            EmotionClass::Fear => "fear",
            EmotionClass::Joy => "joy",
            EmotionClass::Sadness => "sadness",
            EmotionClass::Surprise => "surprise",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.label() == label)
    }
}

impl fmt::Display for EmotionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Class labels of a polarity model, in canonical order.
pub const POLARITY_LABELS: [&str; 2] = ["negative", "positive"];

/// What a model classifies. Arbitrary label sets train as `Generic`;
/// the emotion and polarity label sets are recognized automatically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Emotion,
    Polarity,
    Generic,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Emotion => "emotion",
            ModelKind::Polarity => "polarity",
            ModelKind::Generic => "generic",
        })
    }
}

/// One training document: tokens plus the class they belong to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledDoc {
    pub tokens: Vec<String>,
    pub label: String,
}

impl LabeledDoc {
    pub fn new(tokens: impl IntoIterator<Item = impl Into<String>>, label: impl Into<String>) -> Self {
        Self {
            tokens: tokens.into_iter().map(Into::into).collect(),
            label: label.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum BayesError {
    #[error("i/o failure on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("smoothing constant must be positive and finite, got {0}")]
    InvalidAlpha(f64),
    #[error("class {0:?} has no training documents")]
    EmptyClass(String),
    #[error("document label {0:?} is not in the class list")]
    UnknownLabel(String),
    #[error("class {0:?} appears more than once")]
    DuplicateClass(String),
    #[error("the class list is empty")]
    NoClasses,
    #[error("model file version {found}, this build reads version {MODEL_VERSION}")]
    VersionMismatch { found: u32 },
    #[error("model is {found}, expected {expected}")]
    KindMismatch { expected: ModelKind, found: ModelKind },
}

/// A trained multinomial model. Log-likelihood rows hold the vocabulary
/// in sorted order plus the shared unseen slot as the final entry.
#[derive(Debug, Clone, PartialEq)]
pub struct NaiveBayesModel {
    kind: ModelKind,
    classes: Vec<String>,
    log_priors: Vec<f64>,
    vocab: Vec<String>,
    vocab_index: HashMap<String, usize>,
    log_likelihoods: Vec<Vec<f64>>,
    alpha: f64,
}

fn infer_kind(classes: &[String]) -> ModelKind {
    let set: BTreeSet<&str> = classes.iter().map(String::as_str).collect();
    let emotions: BTreeSet<&str> = EmotionClass::ALL.iter().map(|c| c.label()).collect();
    let polarity: BTreeSet<&str> = POLARITY_LABELS.into_iter().collect();
    if set == emotions {
        ModelKind::Emotion
    } else if set == polarity {
        ModelKind::Polarity
    } else {
        ModelKind::Generic
    }
}

/// Trains a model from labeled documents.
///
/// Every class must be distinct and backed by at least one document, every
/// document label must name a listed class, and `alpha` must be positive
/// and finite. The class order given here is the posterior order.
pub fn train(
    docs: &[LabeledDoc],
    classes: &[String],
    alpha: f64,
) -> Result<NaiveBayesModel, BayesError> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(BayesError::InvalidAlpha(alpha));
    }
    if classes.is_empty() {
        return Err(BayesError::NoClasses);
    }
    let mut class_index: HashMap<&str, usize> = HashMap::new();
    for (index, class) in classes.iter().enumerate() {
        if class_index.insert(class.as_str(), index).is_some() {
            return Err(BayesError::DuplicateClass(class.clone()));
        }
    }

    let mut doc_counts = vec![0usize; classes.len()];
    let mut token_counts = vec![0usize; classes.len()];
    let mut word_counts: Vec<BTreeMap<&str, usize>> = vec![BTreeMap::new(); classes.len()];
    let mut vocab_set: BTreeSet<&str> = BTreeSet::new();
    for doc in docs {
        let &class = class_index
            .get(doc.label.as_str())
            .ok_or_else(|| BayesError::UnknownLabel(doc.label.clone()))?;
        doc_counts[class] += 1;
        token_counts[class] += doc.tokens.len();
        for token in &doc.tokens {
            *word_counts[class].entry(token.as_str()).or_insert(0) += 1;
            vocab_set.insert(token.as_str());
        }
    }
    for (class, &count) in classes.iter().zip(&doc_counts) {
        if count == 0 {
            return Err(BayesError::EmptyClass(class.clone()));
        }
    }

    let vocab: Vec<String> = vocab_set.iter().map(|t| t.to_string()).collect();
    let total_docs = docs.len() as f64;
    let log_priors: Vec<f64> = doc_counts
        .iter()
        .map(|&n| (n as f64 / total_docs).ln())
        .collect();
    let slots = vocab.len() as f64 + 1.0;
    let mut log_likelihoods = Vec::with_capacity(classes.len());
    for class in 0..classes.len() {
        let denominator = token_counts[class] as f64 + alpha * slots;
        let mut row = Vec::with_capacity(vocab.len() + 1);
        for token in &vocab {
            let count = word_counts[class].get(token.as_str()).copied().unwrap_or(0);
            row.push(((count as f64 + alpha) / denominator).ln());
        }
        row.push((alpha / denominator).ln());
        log_likelihoods.push(row);
    }

    let vocab_index = vocab
        .iter()
        .enumerate()
        .map(|(index, token)| (token.clone(), index))
        .collect();
    Ok(NaiveBayesModel {
        kind: infer_kind(classes),
        classes: classes.to_vec(),
        log_priors,
        vocab,
        vocab_index,
        log_likelihoods,
        alpha,
    })
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    version: u32,
    kind: ModelKind,
    classes: Vec<String>,
    log_priors: Vec<f64>,
    vocab: Vec<String>,
    log_likelihoods: Vec<Vec<f64>>,
    alpha: f64,
}

fn invalid_data(path: &Path, reason: impl fmt::Display) -> BayesError {
    BayesError::Io {
        path: path.to_path_buf(),
        source: std::io::Error::new(std::io::ErrorKind::InvalidData, reason.to_string()),
    }
}

impl NaiveBayesModel {
    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn vocab_len(&self) -> usize {
        self.vocab.len()
    }

    /// Posterior probability per class, aligned with [`Self::classes`].
    /// Unseen tokens use the shared pseudo-slot; with no tokens at all the
    /// posteriors are the class priors.
    pub fn classify(&self, tokens: &[String]) -> Vec<f64> {
        let unseen = self.vocab.len();
        let mut scores = self.log_priors.clone();
        for token in tokens {
            let slot = self.vocab_index.get(token.as_str()).copied().unwrap_or(unseen);
            for (class, score) in scores.iter_mut().enumerate() {
                *score += self.log_likelihoods[class][slot];
            }
        }
        let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut posteriors: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
        let sum: f64 = posteriors.iter().sum();
        for p in &mut posteriors {
            *p /= sum;
        }
        posteriors
    }

    /// Writes the model as versioned JSON.
    pub fn save(&self, path: &Path) -> Result<(), BayesError> {
        let file = ModelFile {
            version: MODEL_VERSION,
            kind: self.kind,
            classes: self.classes.clone(),
            log_priors: self.log_priors.clone(),
            vocab: self.vocab.clone(),
            log_likelihoods: self.log_likelihoods.clone(),
            alpha: self.alpha,
        };
        let json = serde_json::to_string_pretty(&file).expect("model serialization cannot fail");
        std::fs::write(path, json).map_err(|source| BayesError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Reads a model written by [`Self::save`]. The version is checked
    /// before anything else; log values round-trip bit for bit.
    pub fn load(path: &Path) -> Result<Self, BayesError> {
        let raw = std::fs::read_to_string(path).map_err(|source| BayesError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let value: serde_json::Value =
            serde_json::from_str(&raw).map_err(|e| invalid_data(path, e))?;
        let version = value
            .get("version")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| invalid_data(path, "missing version field"))?;
        if version != u64::from(MODEL_VERSION) {
            return Err(BayesError::VersionMismatch {
                found: version.try_into().unwrap_or(u32::MAX),
            });
        }
        let file: ModelFile =
            serde_json::from_value(value).map_err(|e| invalid_data(path, e))?;
        if !(file.alpha > 0.0 && file.alpha.is_finite()) {
            return Err(invalid_data(path, "alpha must be positive and finite"));
        }
        if file.classes.is_empty()
            || file.log_priors.len() != file.classes.len()
            || file.log_likelihoods.len() != file.classes.len()
            || file
                .log_likelihoods
                .iter()
                .any(|row| row.len() != file.vocab.len() + 1)
        {
            return Err(invalid_data(path, "inconsistent model dimensions"));
        }
        let vocab_index = file
            .vocab
            .iter()
            .enumerate()
            .map(|(index, token)| (token.clone(), index))
            .collect();
        Ok(NaiveBayesModel {
            kind: file.kind,
            classes: file.classes,
            log_priors: file.log_priors,
            vocab: file.vocab,
            vocab_index,
            log_likelihoods: file.log_likelihoods,
            alpha: file.alpha,
        })
    }

    #[cfg(test)]
    fn shift_all_log_likelihoods(&mut self, delta: f64) {
        for row in &mut self.log_likelihoods {
            for value in row {
                *value += delta;
            }
        }
    }
}

/// Emotion posteriors for one tweet, in [`EmotionClass::ALL`] order.
/// `best_fit` is `None` when the top two posteriors tie.
#[derive(Debug, Clone, PartialEq)]
pub struct EmotionResult {
    pub tweet_id: String,
    pub posteriors: [f64; 6],
    pub best_fit: Option<EmotionClass>,
}

/// A model whose classes are exactly the six emotions.
#[derive(Debug, Clone, PartialEq)]
pub struct EmotionModel {
    model: NaiveBayesModel,
    canonical_order: [usize; 6],
}

impl TryFrom<NaiveBayesModel> for EmotionModel {
    type Error = BayesError;

    fn try_from(model: NaiveBayesModel) -> Result<Self, Self::Error> {
        if model.kind != ModelKind::Emotion {
            return Err(BayesError::KindMismatch {
                expected: ModelKind::Emotion,
                found: model.kind,
            });
        }
        let mut canonical_order = [0usize; 6];
        for (slot, emotion) in EmotionClass::ALL.iter().enumerate() {
            canonical_order[slot] = model
                .classes
                .iter()
                .position(|c| c == emotion.label())
                .expect("emotion kind guarantees all six labels");
        }
        Ok(Self {
            model,
            canonical_order,
        })
    }
}

impl EmotionModel {
    pub fn as_model(&self) -> &NaiveBayesModel {
        &self.model
    }

    /// Classifies one tweet. A margin below [`TIE_TOLERANCE`] between the
    /// two best posteriors leaves the tweet unclassified.
    pub fn classify_emotion(&self, tweet: &CleanTweet) -> EmotionResult {
        let raw = self.model.classify(&tweet.tokens);
        let mut posteriors = [0f64; 6];
        for (slot, &model_index) in self.canonical_order.iter().enumerate() {
            posteriors[slot] = raw[model_index];
        }
        let mut best = 0usize;
        for index in 1..6 {
            if posteriors[index] > posteriors[best] {
                best = index;
            }
        }
        let runner_up = posteriors
            .iter()
            .enumerate()
            .filter(|(index, _)| *index != best)
            .map(|(_, p)| *p)
            .fold(f64::NEG_INFINITY, f64::max);
        let best_fit = if posteriors[best] - runner_up < TIE_TOLERANCE {
            None
        } else {
            Some(EmotionClass::ALL[best])
        };
        EmotionResult {
            tweet_id: tweet.id.clone(),
            posteriors,
            best_fit,
        }
    }
}

/// Polarity call for one tweet: the posterior ratio and its label.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarityResult {
    pub tweet_id: String,
    pub pos_posterior: f64,
    pub neg_posterior: f64,
    pub ratio: f64,
    pub label: PolarityLabel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolarityLabel {
    Positive,
    Negative,
    Neutral,
}

impl PolarityLabel {
    pub fn label(self) -> &'static str {
        match self {
            PolarityLabel::Positive => "positive",
            PolarityLabel::Negative => "negative",
            PolarityLabel::Neutral => "neutral",
        }
    }
}

impl fmt::Display for PolarityLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A model whose classes are exactly `negative` and `positive`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarityModel {
    model: NaiveBayesModel,
    positive_index: usize,
    negative_index: usize,
}

impl TryFrom<NaiveBayesModel> for PolarityModel {
    type Error = BayesError;

    fn try_from(model: NaiveBayesModel) -> Result<Self, Self::Error> {
        if model.kind != ModelKind::Polarity {
            return Err(BayesError::KindMismatch {
                expected: ModelKind::Polarity,
                found: model.kind,
            });
        }
        let position = |label: &str| {
            model
                .classes
                .iter()
                .position(|c| c == label)
                .expect("polarity kind guarantees both labels")
        };
        Ok(Self {
            positive_index: position("positive"),
            negative_index: position("negative"),
            model,
        })
    }
}

impl PolarityModel {
    pub fn as_model(&self) -> &NaiveBayesModel {
        &self.model
    }

    /// Labels one tweet by the ratio of positive to negative posterior.
    /// A ratio within `neutral_band` of 1 is neutral; with the default
    /// band of [`DEFAULT_NEUTRAL_BAND`] only exact ties read as neutral.
    pub fn classify_polarity(&self, tweet: &CleanTweet, neutral_band: f64) -> PolarityResult {
        let posteriors = self.model.classify(&tweet.tokens);
        let pos_posterior = posteriors[self.positive_index];
        let neg_posterior = posteriors[self.negative_index];
        let ratio = pos_posterior / neg_posterior;
        let label = if (ratio - 1.0).abs() <= neutral_band {
            PolarityLabel::Neutral
        } else if ratio > 1.0 {
            PolarityLabel::Positive
        } else {
            PolarityLabel::Negative
        };
        PolarityResult {
            tweet_id: tweet.id.clone(),
            pos_posterior,
            neg_posterior,
            ratio,
            label,
        }
    }
}

fn parse_labeled_lines(source: &str) -> Result<Vec<LabeledDoc>, BayesError> {
    source
        .lines()
        .enumerate()
        .map(|(index, line)| {
            serde_json::from_str(line).map_err(|e| BayesError::MalformedLine {
                line: index + 1,
                reason: e.to_string(),
            })
        })
        .collect()
}

/// Loads training documents from JSONL, one `{"tokens": [...], "label": "..."}`
/// object per line.
pub fn load_labeled_jsonl(path: &Path) -> Result<Vec<LabeledDoc>, BayesError> {
    let raw = std::fs::read_to_string(path).map_err(|source| BayesError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_labeled_lines(&raw)
}

/// The bundled emotion training corpus: emotion words as one-token
/// documents, the same number for each of the six classes so that the
/// priors start even and signal-free tweets tie rather than drift.
pub fn bundled_emotion_seed() -> Vec<LabeledDoc> {
    parse_labeled_lines(include_str!("../data/emotion-seed.jsonl"))
        .expect("bundled emotion seed is valid")
}

/// Builds polarity training documents from an opinion lexicon, one
/// one-token document per word. Both sides are truncated to the smaller
/// side's size (in sorted word order) so the priors start even and a
/// tweet with equal positive and negative evidence lands on a ratio of 1.
pub fn polarity_seed(lexicon: &OpinionLexicon) -> Vec<LabeledDoc> {
    let positive = lexicon.positive_words();
    let negative = lexicon.negative_words();
    let size = positive.len().min(negative.len());
    let mut docs = Vec::with_capacity(size * 2);
    for word in &negative[..size] {
        docs.push(LabeledDoc::new([*word], "negative"));
    }
    for word in &positive[..size] {
        docs.push(LabeledDoc::new([*word], "positive"));
    }
    docs
}

/// The canonical emotion class list for training.
pub fn emotion_classes() -> Vec<String> {
    EmotionClass::ALL.iter().map(|c| c.label().to_string()).collect()
}

/// The canonical polarity class list for training.
pub fn polarity_classes() -> Vec<String> {
    POLARITY_LABELS.iter().map(|l| l.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn doc(tokens: &[&str], label: &str) -> LabeledDoc {
        LabeledDoc::new(tokens.iter().copied(), label)
    }

    fn classes(labels: &[&str]) -> Vec<String> {
        labels.iter().map(|l| l.to_string()).collect()
    }

    fn tweet(id: &str, tokens: &[&str]) -> CleanTweet {
        CleanTweet {
            id: id.into(),
            entity: "E".into(),
            text_clean: tokens.join(" "),
            tokens: tokens.iter().map(|t| t.to_string()).collect(),
        }
    }

    /// Recomputes posteriors by direct arithmetic on the smoothing formula,
    /// in plain probability space, sharing nothing with the implementation.
    fn oracle_posteriors(
        docs: &[LabeledDoc],
        class_list: &[String],
        alpha: f64,
        input: &[String],
    ) -> Vec<f64> {
        let vocab: BTreeSet<&str> = docs
            .iter()
            .flat_map(|d| d.tokens.iter().map(String::as_str))
            .collect();
        let slots = vocab.len() as f64 + 1.0;
        let mut weights = Vec::new();
        for class in class_list {
            let class_docs: Vec<&LabeledDoc> =
                docs.iter().filter(|d| &d.label == class).collect();
            let prior = class_docs.len() as f64 / docs.len() as f64;
            let class_tokens: usize = class_docs.iter().map(|d| d.tokens.len()).sum();
            let denominator = class_tokens as f64 + alpha * slots;
            let mut weight = prior;
            for token in input {
                let count = if vocab.contains(token.as_str()) {
                    class_docs
                        .iter()
                        .flat_map(|d| d.tokens.iter())
                        .filter(|t| *t == token)
                        .count() as f64
                } else {
                    0.0
                };
                let numerator = if vocab.contains(token.as_str()) {
                    count + alpha
                } else {
                    alpha
                };
                weight *= numerator / denominator;
            }
            weights.push(weight);
        }
        let total: f64 = weights.iter().sum();
        weights.into_iter().map(|w| w / total).collect()
    }

    fn two_class_model() -> NaiveBayesModel {
        train(
            &[doc(&["good"], "A"), doc(&["bad"], "B")],
            &classes(&["A", "B"]),
            1.0,
        )
        .expect("train")
    }

    #[test]
    fn train_reproduces_the_hand_worked_values() {
        let model = two_class_model();
        assert_eq!(model.kind(), ModelKind::Generic);
        assert_eq!(model.vocab_len(), 2);
        let prior_a = model.classify(&[])[0];
        assert!(
            (prior_a - 0.5).abs() < 1e-12,
            "prior(A) must be 1/2, got {prior_a}"
        );
        // likelihood(good|A) = (1 + 1) / (1 + 1 * 3) = 1/2; recover it from
        // the posterior of a single-token input.
        let posteriors = model.classify(&["good".into()]);
        // posterior(A) = 0.5*0.5 / (0.5*0.5 + 0.5*0.25) = 2/3
        assert!(
            (posteriors[0] - 2.0 / 3.0).abs() < 1e-12,
            "posterior(A|good) must be 2/3, got {}",
            posteriors[0]
        );
    }

    #[test]
    fn single_class_has_prior_one() {
        let model = train(&[doc(&["x"], "A")], &classes(&["A"]), 1.0).expect("train");
        assert_eq!(model.classify(&[]), [1.0]);
        assert_eq!(model.classify(&["anything".into()]), [1.0]);
    }

    #[test]
    fn train_rejects_a_class_without_documents() {
        let err = train(&[doc(&["x"], "A")], &classes(&["A", "B"]), 1.0)
            .expect_err("class B has no docs");
        match err {
            BayesError::EmptyClass(label) => assert_eq!(label, "B"),
            other => panic!("expected EmptyClass, got {other:?}"),
        }
    }

    #[test]
    fn train_rejects_bad_alpha() {
        let docs = [doc(&["x"], "A")];
        for alpha in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            let err = train(&docs, &classes(&["A"]), alpha).expect_err("bad alpha");
            assert!(matches!(err, BayesError::InvalidAlpha(_)), "alpha {alpha} must be rejected");
        }
    }

    #[test]
    fn train_rejects_unknown_labels_and_duplicates() {
        let err = train(&[doc(&["x"], "C")], &classes(&["A", "B"]), 1.0)
            .expect_err("label C is not a class");
        assert!(matches!(err, BayesError::UnknownLabel(_)));
        let err = train(&[doc(&["x"], "A")], &classes(&["A", "A"]), 1.0)
            .expect_err("duplicate class");
        assert!(matches!(err, BayesError::DuplicateClass(_)));
        let err = train(&[], &[], 1.0).expect_err("no classes");
        assert!(matches!(err, BayesError::NoClasses));
    }

    #[test]
    fn empty_input_returns_the_priors() {
        let model = train(
            &[doc(&["x"], "A"), doc(&["y"], "A"), doc(&["z"], "B")],
            &classes(&["A", "B"]),
            1.0,
        )
        .expect("train");
        let posteriors = model.classify(&[]);
        assert!((posteriors[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((posteriors[1] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn likelihoods_per_class_sum_to_one_including_the_unseen_slot() {
        let model = train(
            &[
                doc(&["good", "good", "fun"], "A"),
                doc(&["bad"], "B"),
                doc(&["bad", "awful"], "B"),
            ],
            &classes(&["A", "B"]),
            0.7,
        )
        .expect("train");
        for row in &model.log_likelihoods {
            let total: f64 = row.iter().map(|l| l.exp()).sum();
            assert!(
                (total - 1.0).abs() < 1e-9,
                "vocabulary plus unseen slot must carry all probability mass, got {total}"
            );
        }
    }

    #[test]
    fn classify_matches_the_direct_arithmetic_oracle() {
        let docs = vec![
            doc(&["good", "great", "good"], "A"),
            doc(&["bad", "awful"], "B"),
            doc(&["good", "bad"], "A"),
        ];
        let class_list = classes(&["A", "B"]);
        for (input, alpha) in [
            (vec!["good".to_string()], 1.0),
            (vec!["bad".to_string(), "bad".to_string()], 1.0),
            (vec!["good".to_string(), "mystery".to_string()], 0.5),
            (vec!["mystery".to_string()], 2.0),
            (vec![], 1.0),
        ] {
            let model = train(&docs, &class_list, alpha).expect("train");
            let got = model.classify(&input);
            let want = oracle_posteriors(&docs, &class_list, alpha, &input);
            for (g, w) in got.iter().zip(&want) {
                assert!(
                    (g - w).abs() <= 1e-9,
                    "posterior mismatch for {input:?} alpha {alpha}: got {got:?}, oracle {want:?}"
                );
            }
        }
    }

    #[test]
    fn scaling_every_likelihood_leaves_posteriors_unchanged() {
        let mut model = train(
            &[
                doc(&["good", "fun"], "A"),
                doc(&["bad"], "B"),
                doc(&["ok", "bad"], "C"),
            ],
            &classes(&["A", "B", "C"]),
            1.0,
        )
        .expect("train");
        let input: Vec<String> = vec!["good".into(), "bad".into(), "zzz".into()];
        let before = model.classify(&input);
        model.shift_all_log_likelihoods(3.0_f64.ln());
        let after = model.classify(&input);
        for (b, a) in before.iter().zip(&after) {
            assert!(
                (b - a).abs() < 1e-12,
                "a shared likelihood factor must cancel in normalization"
            );
        }
    }

    #[test]
    fn label_swap_swaps_posteriors() {
        let docs = vec![doc(&["good", "nice"], "A"), doc(&["bad"], "B")];
        let swapped = vec![doc(&["good", "nice"], "B"), doc(&["bad"], "A")];
        let model = train(&docs, &classes(&["A", "B"]), 1.0).expect("train");
        let mirror = train(&swapped, &classes(&["A", "B"]), 1.0).expect("train");
        let input = vec!["good".into()];
        let p = model.classify(&input);
        let q = mirror.classify(&input);
        assert!((p[0] - q[1]).abs() < 1e-12 && (p[1] - q[0]).abs() < 1e-12);
    }

    fn emotion_model() -> EmotionModel {
        train(&bundled_emotion_seed(), &emotion_classes(), 1.0)
            .expect("train")
            .try_into()
            .expect("emotion kind")
    }

    #[test]
    fn seed_trained_model_finds_the_obvious_emotion() {
        let model = emotion_model();
        let result = model.classify_emotion(&tweet("t1", &["so", "happy", "today"]));
        assert_eq!(result.best_fit, Some(EmotionClass::Joy));
        let total: f64 = result.posteriors.iter().sum();
        assert!((total - 1.0).abs() < 1e-9, "posteriors must sum to one");
        let result = model.classify_emotion(&tweet("t2", &["this", "is", "terrifying"]));
        assert_eq!(result.best_fit, Some(EmotionClass::Fear));
    }

    #[test]
    fn signal_free_tweet_is_unclassified_under_the_balanced_seed() {
        let model = emotion_model();
        let result = model.classify_emotion(&tweet("t1", &["the", "trains", "run"]));
        assert_eq!(
            result.best_fit, None,
            "balanced classes tie exactly on unseen-only input"
        );
        for p in result.posteriors {
            assert!((p - 1.0 / 6.0).abs() < 1e-12);
        }
    }

    #[test]
    fn six_way_tie_on_empty_input_is_unclassified() {
        let model = emotion_model();
        let result = model.classify_emotion(&tweet("t1", &[]));
        assert_eq!(result.best_fit, None);
    }

    #[test]
    fn emotion_wrapper_rejects_other_kinds() {
        let err = EmotionModel::try_from(two_class_model()).expect_err("generic model");
        assert!(matches!(
            err,
            BayesError::KindMismatch {
                expected: ModelKind::Emotion,
                ..
            }
        ));
    }

    fn polarity_model() -> PolarityModel {
        let lexicon = OpinionLexicon::from_sources("good\ngreat\nnice\n", "bad\nawful\npoor\n")
            .expect("lexicon");
        train(&polarity_seed(&lexicon), &polarity_classes(), 1.0)
            .expect("train")
            .try_into()
            .expect("polarity kind")
    }

    #[test]
    fn polarity_labels_follow_the_ratio() {
        let model = polarity_model();
        let result = model.classify_polarity(&tweet("t1", &["good"]), DEFAULT_NEUTRAL_BAND);
        assert_eq!(result.label, PolarityLabel::Positive);
        assert!(result.ratio > 1.0);
        let result = model.classify_polarity(&tweet("t2", &["awful"]), DEFAULT_NEUTRAL_BAND);
        assert_eq!(result.label, PolarityLabel::Negative);
        assert!(result.ratio < 1.0);
    }

    #[test]
    fn balanced_evidence_is_neutral() {
        let model = polarity_model();
        let result = model.classify_polarity(&tweet("t1", &["good", "bad"]), DEFAULT_NEUTRAL_BAND);
        assert_eq!(
            result.label,
            PolarityLabel::Neutral,
            "one positive and one negative word cancel exactly, ratio {}",
            result.ratio
        );
        let result = model.classify_polarity(&tweet("t2", &[]), DEFAULT_NEUTRAL_BAND);
        assert_eq!(result.label, PolarityLabel::Neutral, "empty input ties the even priors");
        assert_eq!(result.ratio, 1.0);
    }

    #[test]
    fn wider_neutral_band_absorbs_weak_signal() {
        let model = polarity_model();
        let tweet = tweet("t1", &["good", "good", "bad"]);
        let strict = model.classify_polarity(&tweet, DEFAULT_NEUTRAL_BAND);
        assert_eq!(strict.label, PolarityLabel::Positive);
        let wide = model.classify_polarity(&tweet, 10.0);
        assert_eq!(wide.label, PolarityLabel::Neutral);
    }

    #[test]
    fn polarity_wrapper_rejects_other_kinds() {
        let err = PolarityModel::try_from(two_class_model()).expect_err("generic model");
        assert!(matches!(
            err,
            BayesError::KindMismatch {
                expected: ModelKind::Polarity,
                ..
            }
        ));
    }

    #[test]
    fn kind_is_inferred_from_the_class_set() {
        assert_eq!(infer_kind(&emotion_classes()), ModelKind::Emotion);
        assert_eq!(infer_kind(&polarity_classes()), ModelKind::Polarity);
        assert_eq!(infer_kind(&classes(&["A", "B"])), ModelKind::Generic);
        let reordered = classes(&["joy", "anger", "fear", "surprise", "disgust", "sadness"]);
        assert_eq!(infer_kind(&reordered), ModelKind::Emotion, "order does not matter");
    }

    #[test]
    fn save_and_load_round_trip_bit_for_bit() {
        let model = train(
            &[
                doc(&["good", "great"], "A"),
                doc(&["bad"], "B"),
                doc(&["meh", "bad"], "B"),
            ],
            &classes(&["A", "B"]),
            0.3,
        )
        .expect("train");
        let file = tempfile::NamedTempFile::new().expect("temp file");
        model.save(file.path()).expect("save");
        let loaded = NaiveBayesModel::load(file.path()).expect("load");
        assert_eq!(loaded.classes, model.classes);
        assert_eq!(loaded.vocab, model.vocab);
        assert_eq!(loaded.kind, model.kind);
        assert_eq!(loaded.alpha.to_bits(), model.alpha.to_bits());
        for (a, b) in loaded.log_priors.iter().zip(&model.log_priors) {
            assert_eq!(a.to_bits(), b.to_bits(), "log priors must round-trip exactly");
        }
        for (row_a, row_b) in loaded.log_likelihoods.iter().zip(&model.log_likelihoods) {
            for (a, b) in row_a.iter().zip(row_b) {
                assert_eq!(a.to_bits(), b.to_bits(), "log likelihoods must round-trip exactly");
            }
        }
    }

    #[test]
    fn load_rejects_other_versions() {
        let model = two_class_model();
        let file = tempfile::NamedTempFile::new().expect("temp file");
        model.save(file.path()).expect("save");
        let mut text = std::fs::read_to_string(file.path()).expect("read");
        text = text.replace("\"version\": 1", "\"version\": 99");
        std::fs::write(file.path(), text).expect("write");
        let err = NaiveBayesModel::load(file.path()).expect_err("version 99");
        match err {
            BayesError::VersionMismatch { found } => assert_eq!(found, 99),
            other => panic!("expected VersionMismatch, got {other:?}"),
        }
    }

    #[test]
    fn load_rejects_truncated_files_as_io_failures() {
        let model = two_class_model();
        let file = tempfile::NamedTempFile::new().expect("temp file");
        model.save(file.path()).expect("save");
        let text = std::fs::read_to_string(file.path()).expect("read");
        std::fs::write(file.path(), &text[..text.len() / 2]).expect("write");
        let err = NaiveBayesModel::load(file.path()).expect_err("truncated file");
        assert!(matches!(err, BayesError::Io { .. }));
    }

    #[test]
    fn labeled_jsonl_round_trips_through_the_loader() {
        let mut file = tempfile::NamedTempFile::new().expect("temp file");
        use std::io::Write as _;
        writeln!(file, r#"{{"tokens":["happy","day"],"label":"joy"}}"#).expect("write");
        writeln!(file, r#"{{"tokens":[],"label":"sadness"}}"#).expect("write");
        let docs = load_labeled_jsonl(file.path()).expect("load");
        assert_eq!(docs.len(), 2);
        assert_eq!(docs[0].tokens, ["happy", "day"]);
        assert_eq!(docs[1].label, "sadness");
        writeln!(file, "not json").expect("write");
        let err = load_labeled_jsonl(file.path()).expect_err("bad line");
        assert!(matches!(err, BayesError::MalformedLine { line: 3, .. }));
    }

    #[test]
    fn bundled_seed_is_balanced_across_the_six_classes() {
        let docs = bundled_emotion_seed();
        assert_eq!(docs.len(), 270);
        for emotion in EmotionClass::ALL {
            let count = docs.iter().filter(|d| d.label == emotion.label()).count();
            assert_eq!(count, 45, "class {emotion} must hold the same share of the seed");
        }
        assert!(
            docs.iter().all(|d| d.tokens.len() == 1),
            "seed documents are single words"
        );
    }

    #[test]
    fn polarity_seed_is_balanced() {
        let lexicon = OpinionLexicon::bundled();
        let docs = polarity_seed(lexicon);
        let positive = docs.iter().filter(|d| d.label == "positive").count();
        let negative = docs.iter().filter(|d| d.label == "negative").count();
        assert_eq!(positive, negative, "both polarity classes get the same doc count");
        assert!(positive >= 100);
    }

    fn doc_strategy() -> impl Strategy<Value = Vec<LabeledDoc>> {
        proptest::collection::vec(
            (
                proptest::collection::vec("[a-d]{1,2}", 0..5),
                prop_oneof![Just("A".to_string()), Just("B".to_string())],
            )
                .prop_map(|(tokens, label)| LabeledDoc { tokens, label }),
            2..12,
        )
        .prop_filter("both classes need documents", |docs| {
            docs.iter().any(|d| d.label == "A") && docs.iter().any(|d| d.label == "B")
        })
    }

    proptest! {
        #[test]
        fn posteriors_are_a_probability_distribution(
            docs in doc_strategy(),
            input in proptest::collection::vec("[a-e]{1,2}", 0..6),
            alpha in 0.1f64..4.0,
        ) {
            let model = train(&docs, &classes(&["A", "B"]), alpha).expect("train");
            let posteriors = model.classify(&input);
            let total: f64 = posteriors.iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-9, "sum {total}");
            for p in &posteriors {
                prop_assert!(*p > 0.0 && *p < 1.0 || posteriors.len() == 1,
                    "smoothing keeps posteriors off 0 and 1, got {posteriors:?}");
            }
        }

        #[test]
        fn posteriors_match_the_oracle_on_random_cases(
            docs in doc_strategy(),
            input in proptest::collection::vec("[a-e]{1,2}", 0..5),
            alpha in 0.25f64..3.0,
        ) {
            let class_list = classes(&["A", "B"]);
            let model = train(&docs, &class_list, alpha).expect("train");
            let got = model.classify(&input);
            let want = oracle_posteriors(&docs, &class_list, alpha, &input);
            for (g, w) in got.iter().zip(&want) {
                prop_assert!((g - w).abs() <= 1e-9, "got {got:?}, oracle {want:?}");
            }
        }
    }
}
