//! Multinomial logistic regression over sparse feature vectors.
//!
//! The objective is mean cross-entropy plus (l2/2)·‖W‖² with biases left
//! unregularized. Full-batch mode runs plain gradient descent; sgd mode
//! visits examples in a seed-shuffled order once per epoch. All state is
//! kept in sorted maps and updated in a fixed order, so training twice
//! with the same inputs writes byte-identical model files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use super::features::{FeatureExtractor, FeatureVector};
use super::{Result, SentimentError, SentimentLabel, LABELS};

const MODEL_MAGIC: &str = "pulsemine-model 1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrainMode {
    FullBatch,
    Sgd,
}

impl TrainMode {
    pub fn as_str(self) -> &'static str {
        match self {
            TrainMode::FullBatch => "full-batch",
            TrainMode::Sgd => "sgd",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "full-batch" => Some(TrainMode::FullBatch),
            "sgd" => Some(TrainMode::Sgd),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub mode: TrainMode,
    pub epochs: usize,
    pub learning_rate: f64,
    pub l2: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            mode: TrainMode::FullBatch,
            epochs: 100,
            learning_rate: 0.1,
            l2: 0.0,
            seed: 1,
        }
    }
}

/// Training provenance carried inside the model file.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelMeta {
    pub seed: u64,
    pub mode: TrainMode,
    pub epochs: usize,
    pub learning_rate: f64,
    pub l2: f64,
    /// Embedding dimension used at feature time; 0 = embeddings disabled.
    pub emb_dim: usize,
    /// Brown prefix lengths used at feature time; empty = clusters disabled.
    pub prefix_lengths: Vec<usize>,
    /// FNV-1a over the sorted bag-of-words vocabulary.
    pub vocab_hash: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    weights: BTreeMap<String, [f64; 3]>,
    biases: [f64; 3],
    meta: ModelMeta,
}

impl LinearModel {
    pub fn weights(&self) -> &BTreeMap<String, [f64; 3]> {
        &self.weights
    }

    pub fn biases(&self) -> &[f64; 3] {
        &self.biases
    }

    pub fn meta(&self) -> &ModelMeta {
        &self.meta
    }

    /// Bag-of-words vocabulary recovered from the feature ids.
    pub fn bow_vocab(&self) -> std::collections::BTreeSet<String> {
        self.weights
            .keys()
            .filter_map(|f| f.strip_prefix("bow:"))
            .map(str::to_string)
            .collect()
    }
}

fn fnv1a64<I: IntoIterator<Item = impl AsRef<[u8]>>>(chunks: I) -> u64 {
    let mut hash = 0xcbf29ce484222325u64;
    for chunk in chunks {
        for &byte in chunk.as_ref() {
            hash ^= byte as u64;
            hash = hash.wrapping_mul(0x100000001b3);
        }
        hash ^= b'\n' as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

fn softmax3(scores: [f64; 3]) -> [f64; 3] {
    let max = scores[0].max(scores[1]).max(scores[2]);
    let exps = [
        (scores[0] - max).exp(),
        (scores[1] - max).exp(),
        (scores[2] - max).exp(),
    ];
    let sum = exps[0] + exps[1] + exps[2];
    [exps[0] / sum, exps[1] / sum, exps[2] / sum]
}

fn raw_scores(weights: &BTreeMap<String, [f64; 3]>, biases: &[f64; 3], fv: &FeatureVector) -> [f64; 3] {
    let mut scores = *biases;
    for (feature, value) in fv {
        if let Some(w) = weights.get(feature) {
            for c in 0..3 {
                scores[c] += w[c] * value;
            }
        }
    }
    scores
}

/// Label probabilities under the model; features the model never saw
/// contribute nothing.
pub fn predict(model: &LinearModel, fv: &FeatureVector) -> (SentimentLabel, [f64; 3]) {
    let probs = softmax3(raw_scores(&model.weights, &model.biases, fv));
    let mut best = 0;
    for c in 1..3 {
        if probs[c] > probs[best] {
            best = c;
        }
    }
    (LABELS[best], probs)
}

/// Objective value and its gradient at (weights, biases) over a featurized
/// dataset: mean cross-entropy plus (l2/2)·‖W‖², biases unregularized.
/// Public so the analytic gradient can be checked against finite
/// differences from the outside.
pub fn loss_and_gradient(
    weights: &BTreeMap<String, [f64; 3]>,
    biases: &[f64; 3],
    dataset: &[(FeatureVector, usize)],
    l2: f64,
) -> (f64, BTreeMap<String, [f64; 3]>, [f64; 3]) {
    let n = dataset.len() as f64;
    let mut loss = 0.0;
    let mut grad_w: BTreeMap<String, [f64; 3]> =
        weights.keys().map(|k| (k.clone(), [0.0; 3])).collect();
    let mut grad_b = [0.0; 3];

    for (fv, y) in dataset {
        let probs = softmax3(raw_scores(weights, biases, fv));
        loss -= probs[*y].ln();
        for c in 0..3 {
            let coeff = probs[c] - if c == *y { 1.0 } else { 0.0 };
            grad_b[c] += coeff;
            for (feature, value) in fv {
                if let Some(g) = grad_w.get_mut(feature) {
                    g[c] += coeff * value;
                }
            }
        }
    }

    loss /= n;
    for g in &mut grad_b {
        *g /= n;
    }
    for (feature, w) in weights {
        let g = grad_w.get_mut(feature).expect("same key set");
        for c in 0..3 {
            g[c] = g[c] / n + l2 * w[c];
            loss += 0.5 * l2 * w[c] * w[c];
        }
    }
    (loss, grad_w, grad_b)
}

/// Per-epoch objective values, measured before each epoch's updates.
#[derive(Debug, Clone, Default)]
pub struct TrainReport {
    pub epoch_losses: Vec<f64>,
}

/// Featurizes the dataset with `extractor` and fits the model. Weights
/// start at zero for every feature occurring in the featurized data, so
/// the serialized model carries the complete feature space.
pub fn train(
    dataset: &[(Vec<String>, SentimentLabel)],
    extractor: &FeatureExtractor,
    config: &TrainConfig,
) -> Result<(LinearModel, TrainReport)> {
    if dataset.is_empty() {
        return Err(SentimentError::EmptyDataset);
    }
    let featurized: Vec<(FeatureVector, usize)> = dataset
        .iter()
        .map(|(tokens, label)| (extractor.featurize(tokens), label.index()))
        .collect();

    let mut weights: BTreeMap<String, [f64; 3]> = featurized
        .iter()
        .flat_map(|(fv, _)| fv.keys())
        .map(|k| (k.clone(), [0.0; 3]))
        .collect();
    let mut biases = [0.0; 3];
    let mut report = TrainReport::default();

    match config.mode {
        TrainMode::FullBatch => {
            for epoch in 0..config.epochs {
                let (loss, grad_w, grad_b) =
                    loss_and_gradient(&weights, &biases, &featurized, config.l2);
                if !loss.is_finite() {
                    return Err(SentimentError::NonFiniteLoss { epoch });
                }
                report.epoch_losses.push(loss);
                for (feature, g) in &grad_w {
                    let w = weights.get_mut(feature).expect("same key set");
                    for c in 0..3 {
                        w[c] -= config.learning_rate * g[c];
                    }
                }
                for c in 0..3 {
                    biases[c] -= config.learning_rate * grad_b[c];
                }
            }
        }
        TrainMode::Sgd => {
            let mut rng = ChaCha20Rng::seed_from_u64(config.seed);
            let mut order: Vec<usize> = (0..featurized.len()).collect();
            for epoch in 0..config.epochs {
                let (loss, _, _) = loss_and_gradient(&weights, &biases, &featurized, config.l2);
                if !loss.is_finite() {
                    return Err(SentimentError::NonFiniteLoss { epoch });
                }
                report.epoch_losses.push(loss);
                order.shuffle(&mut rng);
                for &i in &order {
                    let (fv, y) = &featurized[i];
                    let probs = softmax3(raw_scores(&weights, &biases, fv));
                    for c in 0..3 {
                        let coeff = probs[c] - if c == *y { 1.0 } else { 0.0 };
                        biases[c] -= config.learning_rate * coeff;
                        // regularization applied lazily, on touched features
                        for (feature, value) in fv {
                            let w = weights.get_mut(feature).expect("registered feature");
                            w[c] -= config.learning_rate * (coeff * value + config.l2 * w[c]);
                        }
                    }
                }
            }
        }
    }

    let vocab_hash = fnv1a64(
        weights
            .keys()
            .filter_map(|f| f.strip_prefix("bow:")),
    );
    let meta = ModelMeta {
        seed: config.seed,
        mode: config.mode,
        epochs: config.epochs,
        learning_rate: config.learning_rate,
        l2: config.l2,
        emb_dim: extractor.embeddings().map_or(0, |t| t.dim()),
        prefix_lengths: extractor.brown().map_or_else(Vec::new, |(_, l)| l.to_vec()),
        vocab_hash,
    };
    Ok((LinearModel { weights, biases, meta }, report))
}

fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Versioned flat text: a fixed header then one `feature w0 w1 w2` line per
/// feature, floats at 17 significant digits so loading reproduces every
/// bit.
pub fn save(model: &LinearModel, path: &Path) -> Result<()> {
    let meta = &model.meta;
    let mut out = String::new();
    let _ = writeln!(out, "{MODEL_MAGIC}");
    let _ = writeln!(out, "seed {}", meta.seed);
    let _ = writeln!(out, "mode {}", meta.mode.as_str());
    let _ = writeln!(out, "epochs {}", meta.epochs);
    let _ = writeln!(out, "learning_rate {}", fmt_f64(meta.learning_rate));
    let _ = writeln!(out, "l2 {}", fmt_f64(meta.l2));
    let _ = writeln!(out, "dim {}", meta.emb_dim);
    let prefixes = if meta.prefix_lengths.is_empty() {
        "-".to_string()
    } else {
        meta.prefix_lengths
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(",")
    };
    let _ = writeln!(out, "prefix_lengths {prefixes}");
    let _ = writeln!(out, "vocab_hash {:016x}", meta.vocab_hash);
    let _ = writeln!(
        out,
        "bias {} {} {}",
        fmt_f64(model.biases[0]),
        fmt_f64(model.biases[1]),
        fmt_f64(model.biases[2])
    );
    for (feature, w) in &model.weights {
        let _ = writeln!(out, "{feature} {} {} {}", fmt_f64(w[0]), fmt_f64(w[1]), fmt_f64(w[2]));
    }
    fs::write(path, out)?;
    Ok(())
}

fn header_field<'a>(
    lines: &mut std::iter::Enumerate<std::str::Lines<'a>>,
    key: &str,
) -> Result<(usize, &'a str)> {
    match lines.next() {
        Some((i, line)) => match line.strip_prefix(key).and_then(|r| r.strip_prefix(' ')) {
            Some(value) => Ok((i + 1, value)),
            None => Err(SentimentError::BadModelFile {
                line: i + 1,
                reason: format!("expected \"{key} ...\", found {line:?}"),
            }),
        },
        None => Err(SentimentError::BadModelFile {
            line: 0,
            reason: format!("missing {key:?} header line"),
        }),
    }
}

fn parse_or<T: std::str::FromStr>(value: &str, line: usize, what: &str) -> Result<T> {
    value.parse().map_err(|_| SentimentError::BadModelFile {
        line,
        reason: format!("bad {what} {value:?}"),
    })
}

pub fn load(path: &Path) -> Result<LinearModel> {
    let data = fs::read_to_string(path)?;
    let mut lines = data.lines().enumerate();

    match lines.next() {
        Some((_, MODEL_MAGIC)) => {}
        Some((_, other)) => {
            return Err(SentimentError::BadModelFile {
                line: 1,
                reason: format!("unrecognized header {other:?}"),
            })
        }
        None => {
            return Err(SentimentError::BadModelFile {
                line: 1,
                reason: "empty file".to_string(),
            })
        }
    }

    let (line, value) = header_field(&mut lines, "seed")?;
    let seed: u64 = parse_or(value, line, "seed")?;
    let (line, value) = header_field(&mut lines, "mode")?;
    let mode = TrainMode::parse(value).ok_or_else(|| SentimentError::BadModelFile {
        line,
        reason: format!("bad mode {value:?}"),
    })?;
    let (line, value) = header_field(&mut lines, "epochs")?;
    let epochs: usize = parse_or(value, line, "epochs")?;
    let (line, value) = header_field(&mut lines, "learning_rate")?;
    let learning_rate: f64 = parse_or(value, line, "learning_rate")?;
    let (line, value) = header_field(&mut lines, "l2")?;
    let l2: f64 = parse_or(value, line, "l2")?;
    let (line, value) = header_field(&mut lines, "dim")?;
    let emb_dim: usize = parse_or(value, line, "dim")?;
    let (line, value) = header_field(&mut lines, "prefix_lengths")?;
    let prefix_lengths: Vec<usize> = if value == "-" {
        Vec::new()
    } else {
        value
            .split(',')
            .map(|p| parse_or(p, line, "prefix length"))
            .collect::<Result<_>>()?
    };
    let (line, value) = header_field(&mut lines, "vocab_hash")?;
    let vocab_hash = u64::from_str_radix(value, 16).map_err(|_| SentimentError::BadModelFile {
        line,
        reason: format!("bad vocab_hash {value:?}"),
    })?;

    let (line, value) = header_field(&mut lines, "bias")?;
    let bias_fields: Vec<&str> = value.split(' ').collect();
    if bias_fields.len() != 3 {
        return Err(SentimentError::BadModelFile {
            line,
            reason: "bias needs exactly 3 values".to_string(),
        });
    }
    let mut biases = [0.0; 3];
    for (c, field) in bias_fields.iter().enumerate() {
        biases[c] = parse_or(field, line, "bias value")?;
    }

    let mut weights: BTreeMap<String, [f64; 3]> = BTreeMap::new();
    for (i, raw) in lines {
        let line_no = i + 1;
        let fields: Vec<&str> = raw.split(' ').collect();
        if fields.len() != 4 {
            return Err(SentimentError::BadModelFile {
                line: line_no,
                reason: "expected \"feature w0 w1 w2\"".to_string(),
            });
        }
        let mut w = [0.0; 3];
        for c in 0..3 {
            let value: f64 = parse_or(fields[c + 1], line_no, "weight")?;
            if !value.is_finite() {
                return Err(SentimentError::BadModelFile {
                    line: line_no,
                    reason: format!("non-finite weight {value}"),
                });
            }
            w[c] = value;
        }
        if weights.insert(fields[0].to_string(), w).is_some() {
            return Err(SentimentError::BadModelFile {
                line: line_no,
                reason: format!("duplicate feature {:?}", fields[0]),
            });
        }
    }

    let recomputed = fnv1a64(weights.keys().filter_map(|f| f.strip_prefix("bow:")));
    if recomputed != vocab_hash {
        return Err(SentimentError::BadModelFile {
            line: 0,
            reason: format!(
                "vocab_hash mismatch: header {vocab_hash:016x}, features {recomputed:016x}"
            ),
        });
    }

    Ok(LinearModel {
        weights,
        biases,
        meta: ModelMeta {
            seed,
            mode,
            epochs,
            learning_rate,
            l2,
            emb_dim,
            prefix_lengths,
            vocab_hash,
        },
    })
}
