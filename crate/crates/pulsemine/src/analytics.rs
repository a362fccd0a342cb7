//! Aggregation of classified documents into reports.
//!
//! Everything here is pure arithmetic over immutable inputs: volume per
//! UTC calendar bucket, polarity shares over a window, share deltas
//! between two windows, and per-term aspect breakdowns. Rendering to
//! CSV/JSON/SVG lives in [`render`].

pub mod render;

use std::collections::BTreeMap;

use chrono::{DateTime, Utc};

use crate::docstore::{format_timestamp, Document};
use crate::sentiment::SentimentAnnotation;
use crate::textnorm;

#[derive(Debug, thiserror::Error)]
pub enum AnalyticsError {
    #[error("window {from}..{to} contains no classified documents")]
    EmptyWindow { from: String, to: String },
    #[error("invalid window: from {from} is after to {to}")]
    BadWindow { from: String, to: String },
    #[error("{report} reports cannot be rendered as {format}")]
    UnsupportedFormat { report: &'static str, format: &'static str },
}

pub type Result<T> = std::result::Result<T, AnalyticsError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bucket {
    Hour,
    Day,
}

impl Bucket {
    pub fn as_str(self) -> &'static str {
        match self {
            Bucket::Hour => "hour",
            Bucket::Day => "day",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "hour" => Some(Bucket::Hour),
            "day" => Some(Bucket::Day),
            _ => None,
        }
    }

    fn seconds(self) -> i64 {
        match self {
            Bucket::Hour => 3600,
            Bucket::Day => 86400,
        }
    }

    /// Start of the UTC calendar bucket containing `ts`.
    pub fn truncate(self, ts: DateTime<Utc>) -> DateTime<Utc> {
        let step = self.seconds();
        let start = ts.timestamp().div_euclid(step) * step;
        DateTime::from_timestamp(start, 0).expect("bucket start in range")
    }
}

/// Relevant-document counts per bucket; empty buckets are never listed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VolumeSeries {
    pub entity_id: String,
    pub bucket: Bucket,
    /// Strictly increasing in bucket start.
    pub points: Vec<(DateTime<Utc>, u64)>,
}

impl VolumeSeries {
    pub fn total(&self) -> u64 {
        self.points.iter().map(|(_, c)| c).sum()
    }
}

/// Label percentages over one window, indexed by the canonical label order.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarityShare {
    pub from: DateTime<Utc>,
    pub to: DateTime<Utc>,
    pub total: u64,
    pub shares: [f64; 3],
}

/// Percentage-point movement between two windows. The exact triple sums to
/// zero; the rounded one may not, which is the price of integer reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaReport {
    pub exact: [f64; 3],
    pub rounded: [i64; 3],
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AspectEntry {
    pub count: u64,
    pub by_polarity: [u64; 3],
}

/// Per aspect term: how many relevant documents mention it and how those
/// documents were classified. Keys are the terms in canonical joined form.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AspectReport {
    pub entries: BTreeMap<String, AspectEntry>,
}

/// Counts relevant documents per calendar bucket.
pub fn volume_series<'a, I>(docs: I, entity_id: &str, bucket: Bucket) -> VolumeSeries
where
    I: IntoIterator<Item = (&'a Document, bool)>,
{
    let mut buckets: BTreeMap<DateTime<Utc>, u64> = BTreeMap::new();
    for (doc, relevant) in docs {
        if relevant {
            *buckets.entry(bucket.truncate(doc.timestamp)).or_insert(0) += 1;
        }
    }
    VolumeSeries {
        entity_id: entity_id.to_string(),
        bucket,
        points: buckets.into_iter().collect(),
    }
}

/// Shares of each label among the annotations, as percentages of the
/// window's total. The caller supplies annotations already restricted to
/// the window; an empty window has no defined shares and errors.
pub fn polarity_share(
    annotations: &[SentimentAnnotation],
    from: DateTime<Utc>,
    to: DateTime<Utc>,
) -> Result<PolarityShare> {
    if from > to {
        return Err(AnalyticsError::BadWindow {
            from: format_timestamp(from),
            to: format_timestamp(to),
        });
    }
    if annotations.is_empty() {
        return Err(AnalyticsError::EmptyWindow {
            from: format_timestamp(from),
            to: format_timestamp(to),
        });
    }
    let mut counts = [0u64; 3];
    for annotation in annotations {
        counts[annotation.label.index()] += 1;
    }
    let total = annotations.len() as u64;
    let shares = counts.map(|c| 100.0 * c as f64 / total as f64);
    Ok(PolarityShare { from, to, total, shares })
}

/// Componentwise share movement from `before` to `after`, both exact and
/// rounded to the nearest integer with halves away from zero.
pub fn share_delta(before: &PolarityShare, after: &PolarityShare) -> DeltaReport {
    let mut exact = [0.0; 3];
    let mut rounded = [0i64; 3];
    for c in 0..3 {
        exact[c] = after.shares[c] - before.shares[c];
        rounded[c] = exact[c].round() as i64;
    }
    DeltaReport { exact, rounded }
}

/// Per-term mention counts over the relevant documents, with the polarity
/// breakdown joined from the annotations by document id. Terms are token
/// sequences; a document mentions a term when its normalized tokens
/// contain the term contiguously.
pub fn aspect_report<'a, I>(
    docs: I,
    annotations: &[SentimentAnnotation],
    aspect_terms: &[Vec<String>],
) -> AspectReport
where
    I: IntoIterator<Item = (&'a Document, bool)>,
{
    let label_of: BTreeMap<&str, usize> = annotations
        .iter()
        .map(|a| (a.doc_id.as_str(), a.label.index()))
        .collect();

    let mut entries: BTreeMap<String, AspectEntry> = aspect_terms
        .iter()
        .filter(|t| !t.is_empty())
        .map(|t| (t.join(" "), AspectEntry::default()))
        .collect();

    for (doc, relevant) in docs {
        if !relevant {
            continue;
        }
        let tokens = textnorm::normalize_surfaces(&doc.text);
        for term in aspect_terms {
            if term.is_empty() || !contains_term(&tokens, term) {
                continue;
            }
            let entry = entries.get_mut(&term.join(" ")).expect("term registered");
            entry.count += 1;
            if let Some(&label) = label_of.get(doc.id.as_str()) {
                entry.by_polarity[label] += 1;
            }
        }
    }
    AspectReport { entries }
}

fn contains_term(tokens: &[String], term: &[String]) -> bool {
    term.len() <= tokens.len()
        && tokens
            .windows(term.len())
            .any(|w| w.iter().zip(term).all(|(a, b)| a == b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::docstore::parse_timestamp;
    use crate::sentiment::{Method, SentimentLabel};

    fn doc(id: &str, text: &str, ts: &str) -> Document {
        Document {
            id: id.to_string(),
            text: text.to_string(),
            author: "a".to_string(),
            timestamp: parse_timestamp(ts).unwrap(),
            geo: None,
            source: "t".to_string(),
            lang: None,
        }
    }

    fn annotation(doc_id: &str, label: SentimentLabel) -> SentimentAnnotation {
        let mut probs = [0.0; 3];
        probs[label.index()] = 1.0;
        SentimentAnnotation {
            doc_id: doc_id.to_string(),
            label,
            probs,
            method: Method::Lexicon,
        }
    }

    #[test]
    fn truncation_is_utc_calendar() {
        let ts = parse_timestamp("2016-04-28T13:05:09Z").unwrap();
        assert_eq!(
            format_timestamp(Bucket::Day.truncate(ts)),
            "2016-04-28T00:00:00Z"
        );
        assert_eq!(
            format_timestamp(Bucket::Hour.truncate(ts)),
            "2016-04-28T13:00:00Z"
        );
    }

    #[test]
    fn volume_counts_relevant_docs_per_bucket() {
        let docs = [
            doc("1", "x", "2016-04-28T10:00:00Z"),
            doc("2", "x", "2016-04-28T23:59:59Z"),
            doc("3", "x", "2016-04-30T00:00:00Z"),
            doc("4", "x", "2016-04-29T12:00:00Z"), // irrelevant
        ];
        let relevance = [true, true, true, false];
        let series = volume_series(
            docs.iter().zip(relevance),
            "uber",
            Bucket::Day,
        );
        assert_eq!(series.points.len(), 2);
        assert_eq!(series.points[0].1, 2);
        assert_eq!(series.points[1].1, 1);
        assert_eq!(series.total(), 3);
        assert_eq!(
            format_timestamp(series.points[0].0),
            "2016-04-28T00:00:00Z"
        );
        for pair in series.points.windows(2) {
            assert!(pair[0].0 < pair[1].0);
        }
    }

    #[test]
    fn empty_volume_series() {
        let series = volume_series(std::iter::empty(), "uber", Bucket::Day);
        assert!(series.points.is_empty());
        assert_eq!(series.total(), 0);
    }

    #[test]
    fn shares_are_percentages_of_total() {
        let anns = vec![
            annotation("1", SentimentLabel::Positive),
            annotation("2", SentimentLabel::Positive),
            annotation("3", SentimentLabel::Negative),
            annotation("4", SentimentLabel::Neutral),
        ];
        let from = parse_timestamp("2016-04-28T00:00:00Z").unwrap();
        let to = parse_timestamp("2016-04-28T23:59:59Z").unwrap();
        let share = polarity_share(&anns, from, to).unwrap();
        assert_eq!(share.total, 4);
        assert_eq!(share.shares, [50.0, 25.0, 25.0]);
        let sum: f64 = share.shares.iter().sum();
        assert!((sum - 100.0).abs() < 1e-9);

        let all_neutral = vec![annotation("1", SentimentLabel::Neutral)];
        let share = polarity_share(&all_neutral, from, to).unwrap();
        assert_eq!(share.shares, [0.0, 0.0, 100.0]);
    }

    #[test]
    fn empty_window_and_bad_window_error() {
        let from = parse_timestamp("2016-04-28T00:00:00Z").unwrap();
        let to = parse_timestamp("2016-04-28T23:59:59Z").unwrap();
        assert!(matches!(
            polarity_share(&[], from, to),
            Err(AnalyticsError::EmptyWindow { .. })
        ));
        assert!(matches!(
            polarity_share(&[], to, from),
            Err(AnalyticsError::BadWindow { .. })
        ));
    }

    #[test]
    fn delta_subtracts_and_rounds_half_away_from_zero() {
        let from = parse_timestamp("2016-04-28T00:00:00Z").unwrap();
        let to = parse_timestamp("2016-04-28T23:59:59Z").unwrap();
        let mk = |shares: [f64; 3]| PolarityShare { from, to, total: 1, shares };

        let d = share_delta(&mk([50.0, 25.0, 25.0]), &mk([45.0, 27.0, 28.0]));
        assert_eq!(d.exact, [-5.0, 2.0, 3.0]);
        assert_eq!(d.rounded, [-5, 2, 3]);

        let same = mk([33.0, 33.0, 34.0]);
        let zero = share_delta(&same, &same);
        assert_eq!(zero.exact, [0.0, 0.0, 0.0]);
        assert_eq!(zero.rounded, [0, 0, 0]);

        // antisymmetry
        let a = mk([60.0, 30.0, 10.0]);
        let b = mk([40.0, 35.0, 25.0]);
        let ab = share_delta(&a, &b);
        let ba = share_delta(&b, &a);
        for c in 0..3 {
            assert_eq!(ab.exact[c], -ba.exact[c]);
        }

        // halves move away from zero in both directions
        let h = share_delta(&mk([0.0, 50.0, 50.0]), &mk([0.0, 49.5, 50.5]));
        assert_eq!(h.rounded[1], -1);
        assert_eq!(h.rounded[2], 1);
    }

    #[test]
    fn fixture_day_counts_reproduce_reported_deltas() {
        let from = parse_timestamp("2016-04-28T00:00:00Z").unwrap();
        let to = parse_timestamp("2016-04-30T23:59:59Z").unwrap();
        let share_of = |counts: [u64; 3]| {
            let total: u64 = counts.iter().sum();
            PolarityShare {
                from,
                to,
                total,
                shares: counts.map(|c| 100.0 * c as f64 / total as f64),
            }
        };
        let day1 = share_of([82, 48, 117]);
        let day2 = share_of([55, 34, 91]);
        assert!((day1.shares[0] - 33.198).abs() < 0.001);
        assert!((day1.shares[1] - 19.433).abs() < 0.001);
        assert!((day1.shares[2] - 47.368).abs() < 0.001);
        assert!((day2.shares[0] - 30.556).abs() < 0.001);

        let delta = share_delta(&day1, &day2);
        assert!((delta.exact[0] + 2.643).abs() < 0.001);
        assert!((delta.exact[1] + 0.544).abs() < 0.001);
        assert!((delta.exact[2] - 3.187).abs() < 0.001);
        assert_eq!(delta.rounded, [-3, -1, 3]);

        let exact_sum: f64 = delta.exact.iter().sum();
        assert!(exact_sum.abs() < 1e-9);
        let rounded_sum: i64 = delta.rounded.iter().sum();
        assert_eq!(rounded_sum, -1);
    }

    #[test]
    fn aspects_count_term_mentions_with_polarity() {
        let docs = [
            doc("1", "o preço subiu", "2016-04-28T10:00:00Z"),
            doc("2", "preço justo", "2016-04-28T11:00:00Z"),
            doc("3", "bom preço hoje", "2016-04-28T12:00:00Z"),
            doc("4", "sem menções", "2016-04-28T13:00:00Z"),
            doc("5", "preço irrelevante", "2016-04-28T14:00:00Z"), // not relevant
        ];
        let relevance = [true, true, true, true, false];
        let anns = vec![
            annotation("1", SentimentLabel::Negative),
            annotation("2", SentimentLabel::Positive),
            annotation("3", SentimentLabel::Positive),
            annotation("4", SentimentLabel::Neutral),
        ];
        let terms = vec![vec!["preço".to_string()], vec!["app".to_string()]];
        let report = aspect_report(docs.iter().zip(relevance), &anns, &terms);

        let preco = &report.entries["preço"];
        assert_eq!(preco.count, 3);
        assert_eq!(preco.by_polarity, [2, 1, 0]);

        let app = &report.entries["app"];
        assert_eq!(app.count, 0);
        assert_eq!(app.by_polarity, [0, 0, 0]);

        let empty = aspect_report(docs.iter().zip(relevance), &anns, &[]);
        assert!(empty.entries.is_empty());
    }

    #[test]
    fn multi_token_terms_match_contiguously() {
        let docs = [
            doc("1", "o uber app falhou", "2016-04-28T10:00:00Z"),
            doc("2", "uber tem app", "2016-04-28T11:00:00Z"),
        ];
        let anns = vec![
            annotation("1", SentimentLabel::Negative),
            annotation("2", SentimentLabel::Neutral),
        ];
        let terms = vec![vec!["uber".to_string(), "app".to_string()]];
        let report = aspect_report(docs.iter().zip([true, true]), &anns, &terms);
        let entry = &report.entries["uber app"];
        assert_eq!(entry.count, 1);
        assert_eq!(entry.by_polarity, [0, 1, 0]);
    }
}
