//! Aggregation of per-tweet results into plottable artifacts.
//!
//! Distributions count emotion and polarity calls per entity, histograms
//! bin the integer lexicon scores, and word clouds rank term frequencies
//! with stop words removed. [`emit_plots`] writes each aggregate as JSON,
//! CSV, and a self-contained SVG; every byte of that output is a pure
//! function of the aggregates, so reruns reproduce files exactly.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::LazyLock;

use serde_json::json;
use thiserror::Error;

use crate::bayes::{EmotionClass, EmotionResult, PolarityLabel, PolarityResult};
use crate::textprep::CleanTweet;

static BUNDLED_STOPWORDS: LazyLock<HashSet<String>> =
    LazyLock::new(|| parse_stopwords(include_str!("../data/stopwords.txt")));

#[derive(Debug, Error)]
pub enum AnalyticsError {
    #[error("entity {0:?} has no data to aggregate")]
    EmptyEntity(String),
    #[error("i/o failure on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

fn parse_stopwords(source: &str) -> HashSet<String> {
    source
        .lines()
        .map(str::trim)
        .filter(|line| !line.is_empty() && !line.starts_with(';') && !line.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

/// The stop-word list shipped with the crate.
pub fn bundled_stopwords() -> &'static HashSet<String> {
    &BUNDLED_STOPWORDS
}

/// Loads a stop-word file: one word per line, `;`/`#` comments.
pub fn load_stopwords(path: &Path) -> Result<HashSet<String>, AnalyticsError> {
    let raw = std::fs::read_to_string(path).map_err(|source| AnalyticsError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(parse_stopwords(&raw))
}

/// Labels of the emotion distribution rows, in emission order.
pub const EMOTION_ROW_LABELS: [&str; 7] = [
    "anger",
    "disgust",
    "fear",
    "joy",
    "sadness",
    "surprise",
    "unclassified",
];

/// Emotion call counts for one entity. `counts` follows
/// [`EMOTION_ROW_LABELS`]: the six classes in canonical order, then the
/// unclassified bucket.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmotionDistribution {
    pub entity: String,
    pub counts: [u64; 7],
    pub total: u64,
}

impl EmotionDistribution {
    pub fn count(&self, class: EmotionClass) -> u64 {
        self.counts[class as usize]
    }

    pub fn unclassified(&self) -> u64 {
        self.counts[6]
    }
}

/// Counts every result, keeping ties visible as their own bucket.
pub fn emotion_distribution(entity: &str, results: &[EmotionResult]) -> EmotionDistribution {
    let mut counts = [0u64; 7];
    for result in results {
        let slot = match result.best_fit {
            Some(class) => class as usize,
            None => 6,
        };
        counts[slot] += 1;
    }
    EmotionDistribution {
        entity: entity.to_owned(),
        counts,
        total: results.len() as u64,
    }
}

/// Polarity call counts for one entity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarityDistribution {
    pub entity: String,
    pub positive: u64,
    pub negative: u64,
    pub neutral: u64,
    pub total: u64,
}

pub fn polarity_distribution(entity: &str, results: &[PolarityResult]) -> PolarityDistribution {
    let mut distribution = PolarityDistribution {
        entity: entity.to_owned(),
        positive: 0,
        negative: 0,
        neutral: 0,
        total: results.len() as u64,
    };
    for result in results {
        match result.label {
            PolarityLabel::Positive => distribution.positive += 1,
            PolarityLabel::Negative => distribution.negative += 1,
            PolarityLabel::Neutral => distribution.neutral += 1,
        }
    }
    distribution
}

/// Integer score bins plus the mean and population standard deviation,
/// the two parameters a normal-curve overlay needs.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreHistogram {
    pub entity: String,
    pub bins: BTreeMap<i64, u64>,
    pub mean: f64,
    pub stddev: f64,
    pub n: usize,
}

pub fn score_histogram(entity: &str, scores: &[i64]) -> Result<ScoreHistogram, AnalyticsError> {
    if scores.is_empty() {
        return Err(AnalyticsError::EmptyEntity(entity.to_owned()));
    }
    let mut bins: BTreeMap<i64, u64> = BTreeMap::new();
    for &score in scores {
        *bins.entry(score).or_insert(0) += 1;
    }
    let n = scores.len();
    let mean = scores.iter().sum::<i64>() as f64 / n as f64;
    let variance = scores
        .iter()
        .map(|&s| {
            let d = s as f64 - mean;
            d * d
        })
        .sum::<f64>()
        / n as f64;
    Ok(ScoreHistogram {
        entity: entity.to_owned(),
        bins,
        mean,
        stddev: variance.sqrt(),
        n,
    })
}

/// Which tweets a word-cloud group draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CloudGroup {
    /// Every tweet of the entity.
    Overall,
    /// Tweets whose best-fit emotion is this class.
    Emotion(EmotionClass),
    /// Tweets left unclassified by an emotion tie.
    Unclassified,
}

impl CloudGroup {
    pub fn label(self) -> &'static str {
        match self {
            CloudGroup::Overall => "overall",
            CloudGroup::Emotion(class) => class.label(),
            CloudGroup::Unclassified => "unclassified",
        }
    }
}

/// One ranked term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CloudEntry {
    pub term: String,
    pub weight: u64,
}

/// Ranked term frequencies for one entity, one list per group. The
/// overall group is always present; emotion groups appear only when
/// emotion results were supplied and the group has surviving terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordCloudData {
    pub entity: String,
    pub groups: Vec<(CloudGroup, Vec<CloudEntry>)>,
}

fn ranked_terms(
    counts: &HashMap<&str, u64>,
    top_n: usize,
    min_count: u64,
) -> Vec<CloudEntry> {
    let mut entries: Vec<CloudEntry> = counts
        .iter()
        .filter(|(_, &weight)| weight >= min_count)
        .map(|(&term, &weight)| CloudEntry {
            term: term.to_owned(),
            weight,
        })
        .collect();
    entries.sort_by(|a, b| b.weight.cmp(&a.weight).then_with(|| a.term.cmp(&b.term)));
    entries.truncate(top_n);
    entries
}

/// Counts non-stop-word tokens per term, ranks them by weight with ties
/// broken lexicographically, keeps terms occurring at least `min_count`
/// times, and truncates each group to `top_n`. When emotion results are
/// given, tweets are additionally grouped by their best-fit emotion, with
/// tied tweets collected under an unclassified group.
pub fn wordcloud_data(
    entity: &str,
    tweets: &[CleanTweet],
    emotions: Option<&[EmotionResult]>,
    stopwords: &HashSet<String>,
    top_n: usize,
    min_count: u64,
) -> WordCloudData {
    let mut overall: HashMap<&str, u64> = HashMap::new();
    for tweet in tweets {
        for token in &tweet.tokens {
            if !stopwords.contains(token.as_str()) {
                *overall.entry(token.as_str()).or_insert(0) += 1;
            }
        }
    }
    let mut groups = vec![(CloudGroup::Overall, ranked_terms(&overall, top_n, min_count))];

    if let Some(results) = emotions {
        let best_fit: HashMap<&str, Option<EmotionClass>> = results
            .iter()
            .map(|r| (r.tweet_id.as_str(), r.best_fit))
            .collect();
        let group_list: Vec<CloudGroup> = EmotionClass::ALL
            .into_iter()
            .map(CloudGroup::Emotion)
            .chain([CloudGroup::Unclassified])
            .collect();
        for group in group_list {
            let mut counts: HashMap<&str, u64> = HashMap::new();
            for tweet in tweets {
                let fits = match (group, best_fit.get(tweet.id.as_str())) {
                    (CloudGroup::Emotion(class), Some(Some(best))) => *best == class,
                    (CloudGroup::Unclassified, Some(None)) => true,
                    _ => false,
                };
                if !fits {
                    continue;
                }
                for token in &tweet.tokens {
                    if !stopwords.contains(token.as_str()) {
                        *counts.entry(token.as_str()).or_insert(0) += 1;
                    }
                }
            }
            let entries = ranked_terms(&counts, top_n, min_count);
            if !entries.is_empty() {
                groups.push((group, entries));
            }
        }
    }
    WordCloudData {
        entity: entity.to_owned(),
        groups,
    }
}

impl WordCloudData {
    pub fn group(&self, group: CloudGroup) -> Option<&[CloudEntry]> {
        self.groups
            .iter()
            .find(|(g, _)| *g == group)
            .map(|(_, entries)| entries.as_slice())
    }

    pub fn overall(&self) -> &[CloudEntry] {
        self.group(CloudGroup::Overall).unwrap_or(&[])
    }
}

/// One aggregate ready for emission.
#[derive(Debug, Clone)]
pub enum Aggregate {
    Emotion(EmotionDistribution),
    Polarity(PolarityDistribution),
    Histogram(ScoreHistogram),
    Cloud(WordCloudData),
}

impl Aggregate {
    fn kind(&self) -> &'static str {
        match self {
            Aggregate::Emotion(_) => "emotion",
            Aggregate::Polarity(_) => "polarity",
            Aggregate::Histogram(_) => "histogram",
            Aggregate::Cloud(_) => "cloud",
        }
    }

    fn entity(&self) -> &str {
        match self {
            Aggregate::Emotion(d) => &d.entity,
            Aggregate::Polarity(d) => &d.entity,
            Aggregate::Histogram(h) => &h.entity,
            Aggregate::Cloud(c) => &c.entity,
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            Aggregate::Emotion(d) => {
                let counts: BTreeMap<&str, u64> = EMOTION_ROW_LABELS
                    .iter()
                    .zip(d.counts)
                    .map(|(&label, count)| (label, count))
                    .collect();
                json!({"entity": d.entity, "counts": counts, "total": d.total})
            }
            Aggregate::Polarity(d) => json!({
                "entity": d.entity,
                "counts": {
                    "positive": d.positive,
                    "negative": d.negative,
                    "neutral": d.neutral,
                },
                "total": d.total,
            }),
            Aggregate::Histogram(h) => {
                let bins: Vec<serde_json::Value> = h
                    .bins
                    .iter()
                    .map(|(score, count)| json!({"score": score, "count": count}))
                    .collect();
                json!({
                    "entity": h.entity,
                    "bins": bins,
                    "mean": h.mean,
                    "stddev": h.stddev,
                    "n": h.n,
                })
            }
            Aggregate::Cloud(c) => {
                let groups: Vec<serde_json::Value> = c
                    .groups
                    .iter()
                    .map(|(group, entries)| {
                        let terms: Vec<serde_json::Value> = entries
                            .iter()
                            .map(|e| json!({"term": e.term, "weight": e.weight}))
                            .collect();
                        json!({"group": group.label(), "terms": terms})
                    })
                    .collect();
                json!({"entity": c.entity, "groups": groups})
            }
        }
    }

    fn to_csv(&self) -> String {
        let mut out = String::new();
        match self {
            Aggregate::Emotion(d) => {
                out.push_str("entity,class,count\n");
                for (label, count) in EMOTION_ROW_LABELS.iter().zip(d.counts) {
                    let _ = writeln!(out, "{},{label},{count}", csv_field(&d.entity));
                }
            }
            Aggregate::Polarity(d) => {
                out.push_str("entity,label,count\n");
                for (label, count) in [
                    ("positive", d.positive),
                    ("negative", d.negative),
                    ("neutral", d.neutral),
                ] {
                    let _ = writeln!(out, "{},{label},{count}", csv_field(&d.entity));
                }
            }
            Aggregate::Histogram(h) => {
                out.push_str("entity,score,count\n");
                for (score, count) in &h.bins {
                    let _ = writeln!(out, "{},{score},{count}", csv_field(&h.entity));
                }
            }
            Aggregate::Cloud(c) => {
                out.push_str("entity,group,term,weight\n");
                for (group, entries) in &c.groups {
                    for entry in entries {
                        let _ = writeln!(
                            out,
                            "{},{},{},{}",
                            csv_field(&c.entity),
                            group.label(),
                            csv_field(&entry.term),
                            entry.weight
                        );
                    }
                }
            }
        }
        out
    }

    fn to_svg(&self) -> String {
        match self {
            Aggregate::Emotion(d) => {
                let bars: Vec<(String, f64)> = EMOTION_ROW_LABELS
                    .iter()
                    .zip(d.counts)
                    .map(|(&label, count)| (label.to_owned(), count as f64))
                    .collect();
                bar_chart_svg(&format!("Emotions: {}", d.entity), &bars, None)
            }
            Aggregate::Polarity(d) => {
                let bars = vec![
                    ("positive".to_owned(), d.positive as f64),
                    ("negative".to_owned(), d.negative as f64),
                    ("neutral".to_owned(), d.neutral as f64),
                ];
                bar_chart_svg(&format!("Polarity: {}", d.entity), &bars, None)
            }
            Aggregate::Histogram(h) => {
                let bars: Vec<(String, f64)> = h
                    .bins
                    .iter()
                    .map(|(score, count)| (score.to_string(), *count as f64))
                    .collect();
                bar_chart_svg(
                    &format!("Scores: {}", h.entity),
                    &bars,
                    Some((h.mean, h.stddev, h.n)),
                )
            }
            Aggregate::Cloud(c) => cloud_svg(c),
        }
    }
}

pub(crate) fn csv_field(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_owned()
    }
}

fn xml_escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

const CHART_WIDTH: f64 = 640.0;
const BAR_AREA_HEIGHT: f64 = 260.0;
const MARGIN_LEFT: f64 = 40.0;
const MARGIN_TOP: f64 = 40.0;

/// A fixed-size vertical bar chart. With `curve` parameters, a scaled
/// normal density is drawn over the bars.
fn bar_chart_svg(title: &str, bars: &[(String, f64)], curve: Option<(f64, f64, usize)>) -> String {
    let height = MARGIN_TOP + BAR_AREA_HEIGHT + 60.0;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{CHART_WIDTH}" height="{height}" viewBox="0 0 {CHART_WIDTH} {height}">"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        CHART_WIDTH / 2.0,
        xml_escape(title)
    );
    let max = bars.iter().map(|(_, v)| *v).fold(0.0f64, f64::max).max(1.0);
    let slot = (CHART_WIDTH - MARGIN_LEFT - 20.0) / bars.len().max(1) as f64;
    let bar_width = (slot * 0.7).min(60.0);
    for (index, (label, value)) in bars.iter().enumerate() {
        let x = MARGIN_LEFT + index as f64 * slot + (slot - bar_width) / 2.0;
        let bar_height = value / max * BAR_AREA_HEIGHT;
        let y = MARGIN_TOP + BAR_AREA_HEIGHT - bar_height;
        let _ = writeln!(
            svg,
            r##"<rect x="{x:.2}" y="{y:.2}" width="{bar_width:.2}" height="{bar_height:.2}" fill="#4878a8"/>"##
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
            x + bar_width / 2.0,
            MARGIN_TOP + BAR_AREA_HEIGHT + 16.0,
            xml_escape(label)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
            x + bar_width / 2.0,
            y - 4.0,
            value
        );
    }
    if let Some((mean, stddev, n)) = curve {
        if stddev > 0.0 && bars.len() > 1 {
            // Bars sit at integer scores; map score -> slot center x.
            let scores: Vec<f64> = bars
                .iter()
                .map(|(label, _)| label.parse::<f64>().unwrap_or(0.0))
                .collect();
            let lo = scores[0];
            let hi = scores[scores.len() - 1];
            let span = (hi - lo).max(1.0);
            let mut points = String::new();
            let steps = 120;
            for step in 0..=steps {
                let score = lo + span * step as f64 / steps as f64;
                let z = (score - mean) / stddev;
                let density = (-0.5 * z * z).exp()
                    / (stddev * std::f64::consts::TAU.sqrt());
                // Scale the density to the count axis: expected count per
                // unit-width bin.
                let expected = density * n as f64;
                let x = MARGIN_LEFT
                    + ((score - lo) / span) * ((bars.len() - 1) as f64 * slot)
                    + slot / 2.0;
                let y = MARGIN_TOP + BAR_AREA_HEIGHT
                    - (expected / max * BAR_AREA_HEIGHT).min(BAR_AREA_HEIGHT);
                if !points.is_empty() {
                    points.push(' ');
                }
                let _ = write!(points, "{x:.2},{y:.2}");
            }
            let _ = writeln!(
                svg,
                r##"<polyline points="{points}" fill="none" stroke="#c04848" stroke-width="1.5"/>"##
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle">mean {mean:.4}, stddev {stddev:.4}, n {n}</text>"#,
            CHART_WIDTH / 2.0,
            MARGIN_TOP + BAR_AREA_HEIGHT + 40.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Renders ranked term rows, largest weight first, font size scaled by
/// weight. Deterministic by construction: no packing, no randomness.
fn cloud_svg(cloud: &WordCloudData) -> String {
    let mut rows: Vec<(String, String, u64)> = Vec::new();
    for (group, entries) in &cloud.groups {
        for entry in entries {
            rows.push((group.label().to_owned(), entry.term.clone(), entry.weight));
        }
    }
    let row_height = 24.0;
    let height = MARGIN_TOP + rows.len() as f64 * row_height + 20.0;
    let max_weight = rows.iter().map(|(_, _, w)| *w).max().unwrap_or(1).max(1) as f64;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{CHART_WIDTH}" height="{height:.2}" viewBox="0 0 {CHART_WIDTH} {height:.2}">"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        CHART_WIDTH / 2.0,
        xml_escape(&format!("Terms: {}", cloud.entity))
    );
    for (index, (group, term, weight)) in rows.iter().enumerate() {
        let y = MARGIN_TOP + (index as f64 + 1.0) * row_height;
        let size = 10.0 + (*weight as f64 / max_weight) * 14.0;
        let _ = writeln!(
            svg,
            r##"<text x="{MARGIN_LEFT:.2}" y="{y:.2}" font-family="sans-serif" font-size="11" fill="#888888">{}</text>"##,
            xml_escape(group)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{y:.2}" font-family="sans-serif" font-size="{size:.2}">{} ({weight})</text>"#,
            MARGIN_LEFT + 110.0,
            xml_escape(term)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// A filename-safe, deterministic slug of an entity name.
pub fn entity_slug(entity: &str) -> String {
    let mut slug = String::new();
    for c in entity.to_lowercase().chars() {
        if c.is_alphanumeric() {
            slug.push(c);
        } else if !slug.ends_with('-') {
            slug.push('-');
        }
    }
    let slug = slug.trim_matches('-').to_owned();
    if slug.is_empty() {
        "entity".to_owned()
    } else {
        slug
    }
}

/// Writes every aggregate as `{kind}_{entity}.json`, `.csv`, and `.svg`
/// inside `out_dir`, returning the written paths in emission order.
pub fn emit_plots(aggregates: &[Aggregate], out_dir: &Path) -> Result<Vec<PathBuf>, AnalyticsError> {
    let io_err = |path: &Path, source| AnalyticsError::Io {
        path: path.to_path_buf(),
        source,
    };
    std::fs::create_dir_all(out_dir).map_err(|e| io_err(out_dir, e))?;
    let mut written = Vec::new();
    for aggregate in aggregates {
        let base = format!("{}_{}", aggregate.kind(), entity_slug(aggregate.entity()));
        let json_path = out_dir.join(format!("{base}.json"));
        let json = serde_json::to_string_pretty(&aggregate.to_json())
            .expect("aggregate serialization cannot fail");
        std::fs::write(&json_path, json + "\n").map_err(|e| io_err(&json_path, e))?;
        written.push(json_path);
        let csv_path = out_dir.join(format!("{base}.csv"));
        std::fs::write(&csv_path, aggregate.to_csv()).map_err(|e| io_err(&csv_path, e))?;
        written.push(csv_path);
        let svg_path = out_dir.join(format!("{base}.svg"));
        std::fs::write(&svg_path, aggregate.to_svg()).map_err(|e| io_err(&svg_path, e))?;
        written.push(svg_path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn emotion_result(id: &str, best_fit: Option<EmotionClass>) -> EmotionResult {
        EmotionResult {
            tweet_id: id.into(),
            posteriors: [1.0 / 6.0; 6],
            best_fit,
        }
    }

    fn polarity_result(id: &str, label: PolarityLabel) -> PolarityResult {
        PolarityResult {
            tweet_id: id.into(),
            pos_posterior: 0.5,
            neg_posterior: 0.5,
            ratio: 1.0,
            label,
        }
    }

    fn clean_tweet(id: &str, tokens: &[&str]) -> CleanTweet {
        CleanTweet {
            id: id.into(),
            entity: "E".into(),
            text_clean: tokens.join(" "),
            tokens: tokens.iter().map(|t| t.to_string()).collect(),
        }
    }

    #[test]
    fn emotion_distribution_counts_by_best_fit() {
        let results = vec![
            emotion_result("1", Some(EmotionClass::Joy)),
            emotion_result("2", Some(EmotionClass::Joy)),
            emotion_result("3", Some(EmotionClass::Sadness)),
            emotion_result("4", None),
        ];
        let distribution = emotion_distribution("Pepsi", &results);
        assert_eq!(distribution.count(EmotionClass::Joy), 2);
        assert_eq!(distribution.count(EmotionClass::Sadness), 1);
        assert_eq!(distribution.unclassified(), 1);
        assert_eq!(distribution.total, 4);
        assert_eq!(distribution.counts.iter().sum::<u64>(), distribution.total);
    }

    #[test]
    fn empty_results_give_zero_distributions() {
        let distribution = emotion_distribution("X", &[]);
        assert_eq!(distribution.counts, [0; 7]);
        assert_eq!(distribution.total, 0);
        let distribution = polarity_distribution("X", &[]);
        assert_eq!(
            (distribution.positive, distribution.negative, distribution.neutral, distribution.total),
            (0, 0, 0, 0)
        );
    }

    #[test]
    fn polarity_distribution_counts_labels() {
        let results = vec![
            polarity_result("1", PolarityLabel::Positive),
            polarity_result("2", PolarityLabel::Positive),
            polarity_result("3", PolarityLabel::Negative),
            polarity_result("4", PolarityLabel::Neutral),
        ];
        let distribution = polarity_distribution("Nike", &results);
        assert_eq!(distribution.positive, 2);
        assert_eq!(distribution.negative, 1);
        assert_eq!(distribution.neutral, 1);
        assert_eq!(distribution.total, 4);
    }

    #[test]
    fn histogram_bins_and_moments() {
        let histogram = score_histogram("E", &[0, 0, 1]).expect("histogram");
        assert_eq!(histogram.bins.get(&0), Some(&2));
        assert_eq!(histogram.bins.get(&1), Some(&1));
        assert_eq!(histogram.n, 3);
        assert!((histogram.mean - 1.0 / 3.0).abs() < 1e-12);
        let expected_stddev = (2.0 / 9.0_f64).sqrt();
        assert!((histogram.stddev - expected_stddev).abs() < 1e-12);
    }

    #[test]
    fn histogram_of_one_score_has_zero_spread() {
        let histogram = score_histogram("E", &[5]).expect("histogram");
        assert_eq!(histogram.bins.get(&5), Some(&1));
        assert_eq!(histogram.stddev, 0.0);
        assert_eq!(histogram.mean, 5.0);
    }

    #[test]
    fn histogram_of_nothing_is_an_error() {
        let err = score_histogram("Ghost", &[]).expect_err("no scores");
        assert!(matches!(err, AnalyticsError::EmptyEntity(_)));
    }

    #[test]
    fn wordcloud_ranks_terms_by_weight_then_name() {
        let tweets = vec![clean_tweet("1", &["good", "day"]), clean_tweet("2", &["good"])];
        let cloud = wordcloud_data("E", &tweets, None, &HashSet::new(), 10, 1);
        let overall = cloud.overall();
        assert_eq!(overall.len(), 2);
        assert_eq!((overall[0].term.as_str(), overall[0].weight), ("good", 2));
        assert_eq!((overall[1].term.as_str(), overall[1].weight), ("day", 1));
    }

    #[test]
    fn wordcloud_breaks_ties_lexicographically() {
        let tweets = vec![clean_tweet("1", &["b", "a"]), clean_tweet("2", &["a", "b"])];
        let cloud = wordcloud_data("E", &tweets, None, &HashSet::new(), 1, 1);
        let overall = cloud.overall();
        assert_eq!(overall.len(), 1, "top_n truncates");
        assert_eq!(overall[0].term, "a", "equal weights fall back to name order");
        assert_eq!(overall[0].weight, 2);
    }

    #[test]
    fn wordcloud_respects_stopwords_and_min_count() {
        let stopwords: HashSet<String> = ["the".to_string(), "a".to_string()].into();
        let tweets = vec![
            clean_tweet("1", &["the", "game", "was", "fine"]),
            clean_tweet("2", &["the", "game"]),
        ];
        let cloud = wordcloud_data("E", &tweets, None, &stopwords, 10, 2);
        let overall = cloud.overall();
        assert_eq!(overall.len(), 1, "min_count 2 keeps only repeated terms");
        assert_eq!(overall[0].term, "game");
    }

    #[test]
    fn wordcloud_of_only_stopwords_is_empty() {
        let stopwords: HashSet<String> = ["the".to_string()].into();
        let tweets = vec![clean_tweet("1", &["the", "the"])];
        let cloud = wordcloud_data("E", &tweets, None, &stopwords, 10, 1);
        assert!(cloud.overall().is_empty());
        assert_eq!(cloud.groups.len(), 1, "only the overall group is present");
    }

    #[test]
    fn wordcloud_groups_by_best_fit_emotion() {
        let tweets = vec![
            clean_tweet("1", &["happy", "day"]),
            clean_tweet("2", &["sad", "day"]),
            clean_tweet("3", &["plain", "day"]),
        ];
        let emotions = vec![
            emotion_result("1", Some(EmotionClass::Joy)),
            emotion_result("2", Some(EmotionClass::Sadness)),
            emotion_result("3", None),
        ];
        let cloud = wordcloud_data("E", &tweets, Some(&emotions), &HashSet::new(), 10, 1);
        let joy = cloud.group(CloudGroup::Emotion(EmotionClass::Joy)).expect("joy group");
        assert!(joy.iter().any(|e| e.term == "happy"));
        assert!(!joy.iter().any(|e| e.term == "sad"));
        let unclassified = cloud.group(CloudGroup::Unclassified).expect("unclassified group");
        assert!(unclassified.iter().any(|e| e.term == "plain"));
        assert!(
            cloud.group(CloudGroup::Emotion(EmotionClass::Fear)).is_none(),
            "empty groups are omitted"
        );
        let overall_total: u64 = cloud.overall().iter().map(|e| e.weight).sum();
        assert_eq!(overall_total, 6, "overall keeps every non-stop token");
    }

    #[test]
    fn bundled_stopwords_cover_function_words() {
        let stopwords = bundled_stopwords();
        assert!(stopwords.len() >= 100);
        for word in ["the", "and", "is", "of"] {
            assert!(stopwords.contains(word), "{word} must be a stop word");
        }
        assert!(!stopwords.contains("good"), "opinion words are not stop words");
    }

    #[test]
    fn entity_slugs_are_filename_safe() {
        assert_eq!(entity_slug("Burger King"), "burger-king");
        assert_eq!(entity_slug("Beyoncé"), "beyoncé");
        assert_eq!(entity_slug("A/B: test?"), "a-b-test");
        assert_eq!(entity_slug("---"), "entity");
    }

    #[test]
    fn emit_plots_writes_three_files_per_aggregate() {
        let dir = tempfile::tempdir().expect("temp dir");
        let aggregates = vec![
            Aggregate::Emotion(emotion_distribution("Burger King", &[
                emotion_result("1", Some(EmotionClass::Joy)),
            ])),
            Aggregate::Histogram(score_histogram("Burger King", &[0, 1, 1]).expect("histogram")),
        ];
        let written = emit_plots(&aggregates, dir.path()).expect("emit");
        let names: Vec<String> = written
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
            .collect();
        assert_eq!(
            names,
            [
                "emotion_burger-king.json",
                "emotion_burger-king.csv",
                "emotion_burger-king.svg",
                "histogram_burger-king.json",
                "histogram_burger-king.csv",
                "histogram_burger-king.svg",
            ]
        );
        for path in &written {
            assert!(path.exists());
        }
        let csv = std::fs::read_to_string(dir.path().join("emotion_burger-king.csv")).expect("read");
        assert!(csv.starts_with("entity,class,count\n"));
        assert!(csv.contains("Burger King,joy,1\n"));
    }

    #[test]
    fn emit_plots_with_no_aggregates_writes_nothing() {
        let dir = tempfile::tempdir().expect("temp dir");
        let written = emit_plots(&[], dir.path()).expect("emit");
        assert!(written.is_empty());
        assert_eq!(std::fs::read_dir(dir.path()).expect("read dir").count(), 0);
    }

    #[test]
    fn emit_plots_is_byte_deterministic() {
        let dir_a = tempfile::tempdir().expect("temp dir");
        let dir_b = tempfile::tempdir().expect("temp dir");
        let aggregates = vec![
            Aggregate::Polarity(polarity_distribution("Café, Inc", &[
                polarity_result("1", PolarityLabel::Positive),
            ])),
            Aggregate::Cloud(wordcloud_data(
                "Café, Inc",
                &[clean_tweet("1", &["good", "day", "good"])],
                None,
                &HashSet::new(),
                5,
                1,
            )),
        ];
        let first = emit_plots(&aggregates, dir_a.path()).expect("emit");
        let second = emit_plots(&aggregates, dir_b.path()).expect("emit");
        for (a, b) in first.iter().zip(&second) {
            let bytes_a = std::fs::read(a).expect("read");
            let bytes_b = std::fs::read(b).expect("read");
            assert_eq!(bytes_a, bytes_b, "{} must be reproducible", a.display());
        }
    }

    #[test]
    fn csv_fields_with_commas_are_quoted() {
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    }

    proptest! {
        #[test]
        fn distribution_counts_always_sum_to_total(
            fits in proptest::collection::vec(proptest::option::of(0usize..6), 0..30)
        ) {
            let results: Vec<EmotionResult> = fits
                .iter()
                .enumerate()
                .map(|(index, fit)| emotion_result(&index.to_string(), fit.map(|f| EmotionClass::ALL[f])))
                .collect();
            let distribution = emotion_distribution("E", &results);
            prop_assert_eq!(distribution.counts.iter().sum::<u64>(), distribution.total);
            prop_assert_eq!(distribution.total as usize, results.len());
        }

        #[test]
        fn histogram_bins_sum_to_n(scores in proptest::collection::vec(-20i64..20, 1..50)) {
            let histogram = score_histogram("E", &scores).expect("histogram");
            prop_assert_eq!(histogram.bins.values().sum::<u64>() as usize, scores.len());
            prop_assert!(histogram.stddev >= 0.0);
        }

        #[test]
        fn untruncated_overall_cloud_conserves_tokens(
            token_lists in proptest::collection::vec(
                proptest::collection::vec("[a-e]{1,2}", 0..8),
                0..10,
            )
        ) {
            let tweets: Vec<CleanTweet> = token_lists
                .iter()
                .enumerate()
                .map(|(index, tokens)| {
                    let refs: Vec<&str> = tokens.iter().map(String::as_str).collect();
                    clean_tweet(&index.to_string(), &refs)
                })
                .collect();
            let cloud = wordcloud_data("E", &tweets, None, &HashSet::new(), usize::MAX, 1);
            let weight_sum: u64 = cloud.overall().iter().map(|e| e.weight).sum();
            let token_total: usize = token_lists.iter().map(Vec::len).sum();
            prop_assert_eq!(weight_sum as usize, token_total);
        }
    }
}
