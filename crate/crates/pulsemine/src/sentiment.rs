//! Document polarity, two ways.
//!
//! The lexicon path sums per-term scores with a short negation window and
//! needs no training. The classifier path runs multinomial logistic
//! regression over sparse features (bag-of-words, Brown cluster indicators,
//! mean embeddings) built by [`features::FeatureExtractor`].

pub mod classifier;
pub mod features;
pub mod lexicon;

use serde::{Deserialize, Serialize};

use crate::docstore::Document;
use crate::textnorm;

#[derive(Debug, thiserror::Error)]
pub enum SentimentError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("lexicon invalid at line {line}: {reason}")]
    BadLexicon { line: usize, reason: String },
    #[error("dataset invalid at line {line}: {reason}")]
    BadDataset { line: usize, reason: String },
    #[error("dataset has no examples")]
    EmptyDataset,
    #[error("loss became non-finite during epoch {epoch}")]
    NonFiniteLoss { epoch: usize },
    #[error("model file invalid at line {line}: {reason}")]
    BadModelFile { line: usize, reason: String },
    #[error("unknown label {0:?} (expected positive, negative or neutral)")]
    BadLabel(String),
    #[error("classify configuration inconsistent: {0}")]
    BadConfig(String),
}

pub type Result<T> = std::result::Result<T, SentimentError>;

/// The three polarities, in canonical order. The order doubles as the
/// integer encoding and the argmax tie-break preference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SentimentLabel {
    Positive,
    Negative,
    Neutral,
}

pub const LABELS: [SentimentLabel; 3] = [
    SentimentLabel::Positive,
    SentimentLabel::Negative,
    SentimentLabel::Neutral,
];

impl SentimentLabel {
    pub fn index(self) -> usize {
        match self {
            SentimentLabel::Positive => 0,
            SentimentLabel::Negative => 1,
            SentimentLabel::Neutral => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        LABELS.get(i).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SentimentLabel::Positive => "positive",
            SentimentLabel::Negative => "negative",
            SentimentLabel::Neutral => "neutral",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "positive" => Ok(SentimentLabel::Positive),
            "negative" => Ok(SentimentLabel::Negative),
            "neutral" => Ok(SentimentLabel::Neutral),
            other => Err(SentimentError::BadLabel(other.to_string())),
        }
    }
}

impl std::fmt::Display for SentimentLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Lexicon,
    Classifier,
}

/// One classified document: label plus the per-label probability triple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentimentAnnotation {
    pub doc_id: String,
    pub label: SentimentLabel,
    pub probs: [f64; 3],
    pub method: Method,
}

/// Parses a labeled dataset, one `label<TAB>text` example per line.
/// Blank lines and `#` comments are skipped; text is normalized here so
/// the result feeds straight into training.
pub fn parse_dataset(text: &str) -> Result<Vec<(Vec<String>, SentimentLabel)>> {
    let mut examples = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim_end();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (label, body) = line.split_once('\t').ok_or_else(|| {
            SentimentError::BadDataset {
                line: idx + 1,
                reason: "expected label<TAB>text".to_string(),
            }
        })?;
        let label = SentimentLabel::parse(label).map_err(|e| SentimentError::BadDataset {
            line: idx + 1,
            reason: e.to_string(),
        })?;
        examples.push((textnorm::normalize_surfaces(body), label));
    }
    Ok(examples)
}

pub fn load_dataset(path: &std::path::Path) -> Result<Vec<(Vec<String>, SentimentLabel)>> {
    parse_dataset(&std::fs::read_to_string(path)?)
}

/// Everything `classify_document` may need; which parts must be present
/// depends on the method.
#[derive(Debug, Clone, Copy, Default)]
pub struct ClassifyConfig<'a> {
    pub lexicon: Option<&'a lexicon::Lexicon>,
    pub model: Option<&'a classifier::LinearModel>,
    pub extractor: Option<&'a features::FeatureExtractor>,
}

/// Normalizes the document text and classifies it with the chosen method.
/// Lexicon mode reports one-hot probabilities on the chosen label.
pub fn classify_document(
    doc: &Document,
    method: Method,
    config: &ClassifyConfig<'_>,
) -> Result<SentimentAnnotation> {
    let tokens = textnorm::normalize_surfaces(&doc.text);
    match method {
        Method::Lexicon => {
            let lex = config.lexicon.ok_or_else(|| {
                SentimentError::BadConfig("lexicon method needs a lexicon".to_string())
            })?;
            let (_, label) = lexicon::lexicon_score(&tokens, lex);
            let mut probs = [0.0; 3];
            probs[label.index()] = 1.0;
            Ok(SentimentAnnotation {
                doc_id: doc.id.clone(),
                label,
                probs,
                method: Method::Lexicon,
            })
        }
        Method::Classifier => {
            let model = config.model.ok_or_else(|| {
                SentimentError::BadConfig("classifier method needs a model".to_string())
            })?;
            let extractor = config.extractor.ok_or_else(|| {
                SentimentError::BadConfig("classifier method needs a feature extractor".to_string())
            })?;
            let fv = extractor.featurize(&tokens);
            let (label, probs) = classifier::predict(model, &fv);
            Ok(SentimentAnnotation {
                doc_id: doc.id.clone(),
                label,
                probs,
                method: Method::Classifier,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::docstore::parse_timestamp;

    fn doc(text: &str) -> Document {
        Document {
            id: "d1".to_string(),
            text: text.to_string(),
            author: "a".to_string(),
            timestamp: parse_timestamp("2016-04-28T00:00:00Z").unwrap(),
            geo: None,
            source: "t".to_string(),
            lang: None,
        }
    }

    #[test]
    fn label_encoding_is_canonical() {
        assert_eq!(SentimentLabel::Positive.index(), 0);
        assert_eq!(SentimentLabel::Negative.index(), 1);
        assert_eq!(SentimentLabel::Neutral.index(), 2);
        for label in LABELS {
            assert_eq!(SentimentLabel::from_index(label.index()), Some(label));
            assert_eq!(SentimentLabel::parse(label.as_str()).unwrap(), label);
        }
        assert!(SentimentLabel::parse("meh").is_err());
    }

    #[test]
    fn annotation_serde_round_trip() {
        let ann = SentimentAnnotation {
            doc_id: "d1".to_string(),
            label: SentimentLabel::Negative,
            probs: [0.1, 0.7, 0.2],
            method: Method::Classifier,
        };
        let json = serde_json::to_string(&ann).unwrap();
        assert!(json.contains("\"label\":\"negative\""));
        assert!(json.contains("\"method\":\"classifier\""));
        let back: SentimentAnnotation = serde_json::from_str(&json).unwrap();
        assert_eq!(ann, back);
    }

    #[test]
    fn lexicon_mode_is_one_hot() {
        let lex = lexicon::Lexicon::from_tsv("excelente\t2\n").unwrap();
        let config = ClassifyConfig { lexicon: Some(&lex), ..Default::default() };
        let ann = classify_document(&doc("serviço excelente"), Method::Lexicon, &config).unwrap();
        assert_eq!(ann.label, SentimentLabel::Positive);
        assert_eq!(ann.probs, [1.0, 0.0, 0.0]);
        assert_eq!(ann.method, Method::Lexicon);

        let neutral = classify_document(&doc("sem opinião"), Method::Lexicon, &config).unwrap();
        assert_eq!(neutral.label, SentimentLabel::Neutral);
        assert_eq!(neutral.probs, [0.0, 0.0, 1.0]);
    }

    #[test]
    fn dataset_parsing_normalizes_and_validates() {
        let text = "# labeled examples\n\
                    positive\tAMEI o serviço!!!\n\
                    \n\
                    neutral\tchegou agora\n\
                    negative\thorrível https://x.co/a\n";
        let examples = parse_dataset(text).unwrap();
        assert_eq!(examples.len(), 3);
        assert_eq!(examples[0].1, SentimentLabel::Positive);
        assert_eq!(examples[0].0, vec!["amei", "o", "serviço", "!"]);
        assert_eq!(examples[2].0, vec!["horrível", "<url>"]);

        match parse_dataset("positive missing tab\n") {
            Err(SentimentError::BadDataset { line: 1, .. }) => {}
            other => panic!("expected BadDataset, got {other:?}"),
        }
        match parse_dataset("ok\tsome text\n") {
            Err(SentimentError::BadDataset { line: 1, .. }) => {}
            other => panic!("expected BadDataset, got {other:?}"),
        }
        assert!(parse_dataset("").unwrap().is_empty());
    }

    #[test]
    fn missing_pieces_are_config_errors() {
        let config = ClassifyConfig::default();
        assert!(matches!(
            classify_document(&doc("x"), Method::Lexicon, &config),
            Err(SentimentError::BadConfig(_))
        ));
        assert!(matches!(
            classify_document(&doc("x"), Method::Classifier, &config),
            Err(SentimentError::BadConfig(_))
        ));
    }

    #[test]
    fn classifier_mode_matches_manual_pipeline() {
        let dataset = vec![
            (vec!["bom".to_string()], SentimentLabel::Positive),
            (vec!["mau".to_string()], SentimentLabel::Negative),
            (vec!["ok".to_string()], SentimentLabel::Neutral),
        ];
        let extractor = features::FeatureExtractor::from_dataset(
            dataset.iter().map(|(t, _)| t.as_slice()),
            None,
            None,
        );
        let config = classifier::TrainConfig {
            mode: classifier::TrainMode::FullBatch,
            epochs: 50,
            learning_rate: 0.5,
            l2: 0.0,
            seed: 1,
        };
        let (model, _) = classifier::train(&dataset, &extractor, &config).unwrap();

        let d = doc("bom");
        let classify_config = ClassifyConfig {
            model: Some(&model),
            extractor: Some(&extractor),
            ..Default::default()
        };
        let ann = classify_document(&d, Method::Classifier, &classify_config).unwrap();

        let tokens = textnorm::normalize_surfaces(&d.text);
        let (label, probs) = classifier::predict(&model, &extractor.featurize(&tokens));
        assert_eq!(ann.label, label);
        assert_eq!(ann.probs, probs);
        assert_eq!(ann.label, SentimentLabel::Positive);
    }
}
