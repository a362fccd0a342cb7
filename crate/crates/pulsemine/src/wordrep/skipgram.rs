//! Skip-gram embeddings with negative sampling.
//!
//! Deliberately small and deterministic: single thread, one seeded RNG,
//! fixed update order (epochs, then sequences, then positions, then
//! context offsets). Two runs with the same corpus, hyperparameters and
//! seed produce byte-identical tables.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::{RepError, Result};

pub const UNK: &str = "<unk>";

/// Learning rate never decays below this floor.
const LR_FLOOR: f64 = 0.0001;

#[derive(Debug, Clone)]
pub struct SkipgramConfig {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for SkipgramConfig {
    fn default() -> Self {
        SkipgramConfig {
            dim: 25,
            window: 5,
            negatives: 5,
            epochs: 5,
            learning_rate: 0.025,
            seed: 1,
        }
    }
}

/// Word vectors of a fixed dimension, including one for [`UNK`].
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    vectors: BTreeMap<String, Vec<f64>>,
}

impl EmbeddingTable {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.vectors.get(word).map(Vec::as_slice)
    }

    /// Vector used for out-of-vocabulary words.
    pub fn unk(&self) -> &[f64] {
        self.vectors[UNK].as_slice()
    }

    /// The word's vector, falling back to [`UNK`].
    pub fn get_or_unk(&self, word: &str) -> &[f64] {
        self.vectors.get(word).map_or_else(|| self.unk(), Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Words in sorted order, [`UNK`] included.
    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.vectors.keys().map(String::as_str)
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Trains input/output vector pairs on the logistic objective: one positive
/// update per (center, in-window context) pair and `negatives` noise words
/// drawn from the unigram^(3/4) distribution. A noise draw that hits the
/// positive context word is skipped, not redrawn. The learning rate decays
/// linearly per processed center token down to a fixed floor.
pub fn train_skipgram(corpus: &[Vec<String>], config: &SkipgramConfig) -> Result<EmbeddingTable> {
    if config.dim == 0 {
        return Err(RepError::ZeroDim);
    }
    let mut counts: BTreeMap<&str, i64> = BTreeMap::new();
    let mut total_tokens = 0usize;
    for sequence in corpus {
        for word in sequence {
            *counts.entry(word).or_insert(0) += 1;
            total_tokens += 1;
        }
    }
    if total_tokens == 0 {
        return Err(RepError::EmptyCorpus);
    }

    let vocab: Vec<&str> = counts.keys().copied().collect();
    let index: BTreeMap<&str, usize> = vocab.iter().enumerate().map(|(i, &w)| (w, i)).collect();

    // noise distribution: cumulative unigram counts raised to 3/4
    let mut noise_cdf = Vec::with_capacity(vocab.len());
    let mut acc = 0.0f64;
    for &w in &vocab {
        acc += (counts[w] as f64).powf(0.75);
        noise_cdf.push(acc);
    }
    let noise_total = acc;

    let dim = config.dim;
    let mut rng = ChaCha20Rng::seed_from_u64(config.seed);
    let mut input: Vec<Vec<f64>> = vocab
        .iter()
        .map(|_| {
            (0..dim)
                .map(|_| (rng.gen::<f64>() - 0.5) / dim as f64)
                .collect()
        })
        .collect();
    let mut output: Vec<Vec<f64>> = vec![vec![0.0; dim]; vocab.len()];

    let sequences: Vec<Vec<usize>> = corpus
        .iter()
        .map(|s| s.iter().map(|w| index[w.as_str()]).collect())
        .collect();

    let schedule_len = (config.epochs * total_tokens) as f64;
    let mut processed = 0usize;
    let mut gradient = vec![0.0f64; dim];

    for _ in 0..config.epochs {
        for sequence in &sequences {
            for (pos, &center) in sequence.iter().enumerate() {
                let lr = (config.learning_rate * (1.0 - processed as f64 / (schedule_len + 1.0)))
                    .max(LR_FLOOR);
                processed += 1;

                let lo = pos.saturating_sub(config.window);
                let hi = (pos + config.window).min(sequence.len() - 1);
                for (ctx_pos, &positive) in sequence.iter().enumerate().take(hi + 1).skip(lo) {
                    if ctx_pos == pos {
                        continue;
                    }
                    gradient.iter_mut().for_each(|g| *g = 0.0);
                    for k in 0..=config.negatives {
                        let (target, label) = if k == 0 {
                            (positive, 1.0)
                        } else {
                            let draw = rng.gen::<f64>() * noise_total;
                            let target = noise_cdf.partition_point(|&c| c <= draw).min(vocab.len() - 1);
                            if target == positive {
                                continue;
                            }
                            (target, 0.0)
                        };
                        let score: f64 = input[center]
                            .iter()
                            .zip(&output[target])
                            .map(|(a, b)| a * b)
                            .sum();
                        let g = (label - sigmoid(score)) * lr;
                        for d in 0..dim {
                            gradient[d] += g * output[target][d];
                            output[target][d] += g * input[center][d];
                        }
                    }
                    for d in 0..dim {
                        input[center][d] += gradient[d];
                    }
                }
            }
        }
    }

    let mut vectors: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let mut unk = vec![0.0f64; dim];
    for (i, &word) in vocab.iter().enumerate() {
        for d in 0..dim {
            unk[d] += input[i][d];
        }
        vectors.insert(word.to_string(), input[i].clone());
    }
    for component in &mut unk {
        *component /= vocab.len() as f64;
    }
    vectors.insert(UNK.to_string(), unk);

    Ok(EmbeddingTable { dim, vectors })
}

/// Writes `dim N` then one `word v1 .. vN` line per word, 9 significant
/// digits, sorted by word.
pub fn save(table: &EmbeddingTable, path: &Path) -> Result<()> {
    let mut out = format!("dim {}\n", table.dim);
    for (word, vector) in &table.vectors {
        out.push_str(word);
        for component in vector {
            out.push(' ');
            out.push_str(&format!("{component:.8e}"));
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn load(path: &Path) -> Result<EmbeddingTable> {
    let data = fs::read_to_string(path)?;
    let mut lines = data.lines().enumerate();
    let dim: usize = match lines.next() {
        Some((_, first)) => match first.strip_prefix("dim ") {
            Some(n) => n.parse().map_err(|_| RepError::BadModelFile {
                line: 1,
                reason: format!("bad dimension {n:?}"),
            })?,
            None => {
                return Err(RepError::BadModelFile {
                    line: 1,
                    reason: "expected header \"dim N\"".to_string(),
                })
            }
        },
        None => {
            return Err(RepError::BadModelFile {
                line: 1,
                reason: "empty file".to_string(),
            })
        }
    };
    if dim == 0 {
        return Err(RepError::ZeroDim);
    }

    let mut vectors = BTreeMap::new();
    for (i, line) in lines {
        let line_no = i + 1;
        let mut fields = line.split(' ');
        let word = fields.next().filter(|w| !w.is_empty()).ok_or_else(|| {
            RepError::BadModelFile {
                line: line_no,
                reason: "missing word".to_string(),
            }
        })?;
        let vector: Vec<f64> = fields
            .map(|f| {
                f.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| RepError::BadModelFile {
                        line: line_no,
                        reason: format!("bad component {f:?}"),
                    })
            })
            .collect::<Result<_>>()?;
        if vector.len() != dim {
            return Err(RepError::BadModelFile {
                line: line_no,
                reason: format!("expected {dim} components, found {}", vector.len()),
            });
        }
        if vectors.insert(word.to_string(), vector).is_some() {
            return Err(RepError::BadModelFile {
                line: line_no,
                reason: format!("duplicate word {word:?}"),
            });
        }
    }
    if !vectors.contains_key(UNK) {
        return Err(RepError::BadModelFile {
            line: 0,
            reason: format!("missing {UNK:?} vector"),
        });
    }
    Ok(EmbeddingTable { dim, vectors })
}
