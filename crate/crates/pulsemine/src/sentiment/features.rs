//! Sparse feature vectors for the linear classifier.
//!
//! Three namespaces, each optional per configuration:
//! - `bow:<term>` — token counts over the training vocabulary, L2-normalized
//!   within the block;
//! - `brown:<L>:<prefix>` — binary cluster-path indicators;
//! - `emb:<i>` — componentwise mean of the tokens' embedding vectors, with
//!   the `<unk>` vector standing in for out-of-vocabulary tokens.

use std::collections::{BTreeMap, BTreeSet};

use crate::wordrep::brown::{brown_features, BrownHierarchy};
use crate::wordrep::skipgram::EmbeddingTable;

pub type FeatureVector = BTreeMap<String, f64>;

#[derive(Debug, Clone)]
pub struct FeatureExtractor {
    vocab: BTreeSet<String>,
    brown: Option<(BrownHierarchy, Vec<usize>)>,
    embeddings: Option<EmbeddingTable>,
}

impl FeatureExtractor {
    pub fn new(
        vocab: BTreeSet<String>,
        brown: Option<(BrownHierarchy, Vec<usize>)>,
        embeddings: Option<EmbeddingTable>,
    ) -> Self {
        FeatureExtractor { vocab, brown, embeddings }
    }

    /// Vocabulary = every token appearing in the training examples.
    pub fn from_dataset<'a, I>(
        examples: I,
        brown: Option<(BrownHierarchy, Vec<usize>)>,
        embeddings: Option<EmbeddingTable>,
    ) -> Self
    where
        I: IntoIterator<Item = &'a [String]>,
    {
        let vocab = examples
            .into_iter()
            .flatten()
            .cloned()
            .collect::<BTreeSet<String>>();
        FeatureExtractor { vocab, brown, embeddings }
    }

    pub fn vocab(&self) -> &BTreeSet<String> {
        &self.vocab
    }

    pub fn brown(&self) -> Option<(&BrownHierarchy, &[usize])> {
        self.brown.as_ref().map(|(h, l)| (h, l.as_slice()))
    }

    pub fn embeddings(&self) -> Option<&EmbeddingTable> {
        self.embeddings.as_ref()
    }

    pub fn featurize(&self, tokens: &[String]) -> FeatureVector {
        let mut fv = FeatureVector::new();

        let mut counts: BTreeMap<&str, f64> = BTreeMap::new();
        for token in tokens {
            if self.vocab.contains(token) {
                *counts.entry(token.as_str()).or_insert(0.0) += 1.0;
            }
        }
        let norm: f64 = counts.values().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 0.0 {
            for (term, count) in counts {
                fv.insert(format!("bow:{term}"), count / norm);
            }
        }

        if let Some((hierarchy, prefix_lengths)) = &self.brown {
            for token in tokens {
                for feature in brown_features(token, hierarchy, prefix_lengths) {
                    fv.insert(feature, 1.0);
                }
            }
        }

        if let Some(table) = &self.embeddings {
            let dim = table.dim();
            let mut mean = vec![0.0f64; dim];
            if !tokens.is_empty() {
                for token in tokens {
                    let vector = table.get_or_unk(token);
                    for (m, v) in mean.iter_mut().zip(vector) {
                        *m += v;
                    }
                }
                for component in &mut mean {
                    *component /= tokens.len() as f64;
                }
            }
            for (i, component) in mean.into_iter().enumerate() {
                fv.insert(format!("emb:{i}"), component);
            }
        }

        fv
    }
}
