//! Lexicon-based polarity scoring.
//!
//! A lexicon maps single normalized terms to signed scores and lists
//! negation words. Scoring sums term scores over a token sequence, with a
//! sign flip for any scored token standing within 3 positions after a
//! negation word.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use super::{Result, SentimentError, SentimentLabel};
use crate::textnorm;

/// Tokens this many positions past a negation word have their score
/// negated.
const NEGATION_WINDOW: usize = 3;

#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    scores: BTreeMap<String, f64>,
    negations: BTreeSet<String>,
}

impl Lexicon {
    /// Parses `term<TAB>score` lines; `#`-prefixed lines are comments and
    /// blank lines are skipped. A score of `NEG` marks a negation word.
    /// Terms are normalized on load and must stay single tokens.
    pub fn from_tsv(text: &str) -> Result<Self> {
        let mut lexicon = Lexicon::default();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim_end();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (term, score) = line.split_once('\t').ok_or_else(|| {
                SentimentError::BadLexicon {
                    line: line_no,
                    reason: "expected term<TAB>score".to_string(),
                }
            })?;
            let mut normalized = textnorm::normalize_surfaces(term);
            if normalized.len() != 1 {
                return Err(SentimentError::BadLexicon {
                    line: line_no,
                    reason: format!("term {term:?} is not a single normalized token"),
                });
            }
            let term = normalized.pop().unwrap();
            if lexicon.scores.contains_key(&term) || lexicon.negations.contains(&term) {
                return Err(SentimentError::BadLexicon {
                    line: line_no,
                    reason: format!("duplicate term {term:?}"),
                });
            }
            if score == "NEG" {
                lexicon.negations.insert(term);
            } else {
                let value: f64 = score
                    .parse()
                    .ok()
                    .filter(|v: &f64| v.is_finite())
                    .ok_or_else(|| SentimentError::BadLexicon {
                        line: line_no,
                        reason: format!("score {score:?} is neither a finite number nor NEG"),
                    })?;
                lexicon.scores.insert(term, value);
            }
        }
        Ok(lexicon)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_tsv(&fs::read_to_string(path)?)
    }

    pub fn score_of(&self, term: &str) -> Option<f64> {
        self.scores.get(term).copied()
    }

    pub fn is_negation(&self, term: &str) -> bool {
        self.negations.contains(term)
    }

    pub fn len(&self) -> usize {
        self.scores.len() + self.negations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty() && self.negations.is_empty()
    }
}

/// Sums lexicon scores over the tokens. A negation word arms a window of
/// [`NEGATION_WINDOW`] following tokens whose scores flip sign; a fresh
/// negation word re-arms the window rather than stacking. The label is the
/// sign of the total.
pub fn lexicon_score(tokens: &[String], lexicon: &Lexicon) -> (f64, SentimentLabel) {
    let mut total = 0.0;
    let mut window = 0usize;
    for token in tokens {
        if lexicon.is_negation(token) {
            window = NEGATION_WINDOW;
            continue;
        }
        if let Some(score) = lexicon.score_of(token) {
            total += if window > 0 { -score } else { score };
        }
        window = window.saturating_sub(1);
    }
    let label = if total > 0.0 {
        SentimentLabel::Positive
    } else if total < 0.0 {
        SentimentLabel::Negative
    } else {
        SentimentLabel::Neutral
    };
    (total, label)
}
