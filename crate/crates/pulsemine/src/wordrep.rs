//! Word representations learned from an unlabeled corpus.
//!
//! Two families, both consumed as classifier features: hierarchical Brown
//! clusters (bit-string paths in a merge tree) and dense skip-gram
//! embeddings. Training is single-threaded and deterministic; trained
//! artifacts are immutable.

pub mod brown;
pub mod skipgram;

#[derive(Debug, thiserror::Error)]
pub enum RepError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("corpus has no tokens")]
    EmptyCorpus,
    #[error("vocabulary has {vocab} words, fewer than the requested {requested} clusters")]
    VocabTooSmall { vocab: usize, requested: usize },
    #[error("embedding dimension must be positive")]
    ZeroDim,
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },
    #[error("model file invalid at line {line}: {reason}")]
    BadModelFile { line: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, RepError>;

/// Cosine similarity. A zero-norm operand yields 0 so unseen or degenerate
/// vectors compare as dissimilar instead of erroring.
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(RepError::DimMismatch { left: u.len(), right: v.len() });
    }
    let mut dot = 0.0;
    let mut nu = 0.0;
    let mut nv = 0.0;
    for (a, b) in u.iter().zip(v) {
        dot += a * b;
        nu += a * a;
        nv += b * b;
    }
    if nu == 0.0 || nv == 0.0 {
        return Ok(0.0);
    }
    Ok(dot / (nu.sqrt() * nv.sqrt()))
}
