//! Greedy agglomerative word clustering over class-bigram mutual
//! information, producing one bit-string path per word.
//!
//! The implementation is the exact greedy algorithm: every step evaluates
//! the objective for every live cluster pair and takes the best merge.
//! That is quadratic per step in the cluster count, fine at the corpus
//! sizes this crate targets, and it keeps the whole merge sequence
//! checkable against a from-scratch oracle.
//!
//! Determinism pins down the arithmetic, not just the algorithm: counts
//! stay integers, the objective term is one fixed f64 expression, and both
//! candidate enumeration and term summation run in ascending cluster-id
//! order. Cluster ids are assigned from the sorted vocabulary and a merge
//! keeps the smaller id, so id order always equals lexicographic order of
//! each cluster's smallest word, which is the tie-break rule.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use super::{RepError, Result};

/// Unigram counts, adjacent-bigram counts and the token total for one
/// corpus. Bigrams never cross sequence boundaries.
#[derive(Debug, Clone, Default)]
pub struct CorpusStats {
    pub unigrams: BTreeMap<String, i64>,
    pub bigrams: BTreeMap<(String, String), i64>,
    pub total_tokens: i64,
}

impl CorpusStats {
    pub fn from_corpus(corpus: &[Vec<String>]) -> Self {
        let mut stats = CorpusStats::default();
        for sequence in corpus {
            for word in sequence {
                *stats.unigrams.entry(word.clone()).or_insert(0) += 1;
                stats.total_tokens += 1;
            }
            for pair in sequence.windows(2) {
                *stats
                    .bigrams
                    .entry((pair[0].clone(), pair[1].clone()))
                    .or_insert(0) += 1;
            }
        }
        stats
    }
}

/// Result of clustering: a path per word plus the merge sequence, each
/// merge named by the smallest word of either side.
#[derive(Debug, Clone)]
pub struct BrownHierarchy {
    paths: BTreeMap<String, String>,
    merge_log: Vec<(String, String)>,
    counts: BTreeMap<String, i64>,
    requested_clusters: usize,
}

impl BrownHierarchy {
    pub fn path(&self, word: &str) -> Option<&str> {
        self.paths.get(word).map(String::as_str)
    }

    /// Word → path map, sorted by word.
    pub fn paths(&self) -> &BTreeMap<String, String> {
        &self.paths
    }

    pub fn merge_log(&self) -> &[(String, String)] {
        &self.merge_log
    }

    pub fn requested_clusters(&self) -> usize {
        self.requested_clusters
    }

    pub fn vocab_len(&self) -> usize {
        self.paths.len()
    }
}

/// One objective term, fixed expression so independent implementations
/// reproduce it bit for bit: (n/t) * log2(n*t / (l*r)) for a class pair
/// with joint count n, left marginal l, right marginal r, bigram total t.
fn ami_term(n: i64, l: i64, r: i64, t: i64) -> f64 {
    (n as f64 / t as f64) * ((n as f64 * t as f64) / (l as f64 * r as f64)).log2()
}

/// Clusters the corpus vocabulary down to a single root, recording every
/// merge. `final_clusters` sets where the flat clustering is read off; the
/// greedy criterion is the same on both sides of that line, so it does not
/// change the tree, only the precondition |vocab| >= final_clusters.
///
/// Each step merges the live pair maximizing average mutual information of
/// the class-bigram distribution; ties fall to the earliest pair in
/// ascending (smallest-word, smallest-word) order.
pub fn brown_cluster(corpus: &[Vec<String>], final_clusters: usize) -> Result<BrownHierarchy> {
    let stats = CorpusStats::from_corpus(corpus);
    if stats.total_tokens == 0 {
        return Err(RepError::EmptyCorpus);
    }
    let vocab: Vec<String> = stats.unigrams.keys().cloned().collect();
    if final_clusters == 0 || vocab.len() < final_clusters {
        return Err(RepError::VocabTooSmall {
            vocab: vocab.len(),
            requested: final_clusters,
        });
    }

    let index: BTreeMap<&str, usize> = vocab
        .iter()
        .enumerate()
        .map(|(i, w)| (w.as_str(), i))
        .collect();

    // integer count tables keyed by cluster id; id i starts as vocab[i]
    let mut bigrams: BTreeMap<(usize, usize), i64> = BTreeMap::new();
    let mut left = vec![0i64; vocab.len()];
    let mut right = vec![0i64; vocab.len()];
    let mut total = 0i64;
    for ((a, b), n) in &stats.bigrams {
        let (ia, ib) = (index[a.as_str()], index[b.as_str()]);
        *bigrams.entry((ia, ib)).or_insert(0) += n;
        left[ia] += n;
        right[ib] += n;
        total += n;
    }

    let mut live: Vec<usize> = (0..vocab.len()).collect();
    let mut merge_log = Vec::with_capacity(vocab.len().saturating_sub(1));

    // leaf node per initial cluster; merges stack internal nodes on top
    #[derive(Clone)]
    enum Node {
        Leaf(usize),
        Internal(usize, usize),
    }
    let mut nodes: Vec<Node> = (0..vocab.len()).map(Node::Leaf).collect();
    let mut cluster_node: Vec<usize> = (0..vocab.len()).collect();

    while live.len() > 1 {
        let mut best: Option<(f64, usize, usize)> = None;
        for (pi, &a) in live.iter().enumerate() {
            for &b in &live[pi + 1..] {
                let score = ami_after_merge(&bigrams, &left, &right, total, a, b);
                let better = match best {
                    Some((top, _, _)) => score > top,
                    None => true,
                };
                if better {
                    best = Some((score, a, b));
                }
            }
        }
        let (_, a, b) = best.expect("live.len() > 1 guarantees a candidate");

        merge_log.push((vocab[a].clone(), vocab[b].clone()));
        apply_merge(&mut bigrams, &mut left, &mut right, a, b);
        live.retain(|&c| c != b);
        let parent = nodes.len();
        nodes.push(Node::Internal(cluster_node[a], cluster_node[b]));
        cluster_node[a] = parent;
    }

    // paths: left child of every merge extends with 0, right with 1
    let mut paths: BTreeMap<String, String> = BTreeMap::new();
    let root = cluster_node[live[0]];
    let mut stack = vec![(root, String::new())];
    while let Some((node, path)) = stack.pop() {
        match &nodes[node] {
            Node::Leaf(word) => {
                paths.insert(vocab[*word].clone(), path);
            }
            Node::Internal(l, r) => {
                stack.push((*l, format!("{path}0")));
                stack.push((*r, format!("{path}1")));
            }
        }
    }

    Ok(BrownHierarchy {
        paths,
        merge_log,
        counts: stats.unigrams,
        requested_clusters: final_clusters,
    })
}

/// Objective value of the clustering that would result from folding `b`
/// into `a`. Terms are summed in ascending (left, right) id order.
fn ami_after_merge(
    bigrams: &BTreeMap<(usize, usize), i64>,
    left: &[i64],
    right: &[i64],
    total: i64,
    a: usize,
    b: usize,
) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let mut merged: BTreeMap<(usize, usize), i64> = BTreeMap::new();
    for (&(c, d), &n) in bigrams {
        let c = if c == b { a } else { c };
        let d = if d == b { a } else { d };
        *merged.entry((c, d)).or_insert(0) += n;
    }
    let l_merged = left[a] + left[b];
    let r_merged = right[a] + right[b];
    let mut ami = 0.0;
    for (&(c, d), &n) in &merged {
        let l = if c == a { l_merged } else { left[c] };
        let r = if d == a { r_merged } else { right[d] };
        ami += ami_term(n, l, r, total);
    }
    ami
}

fn apply_merge(
    bigrams: &mut BTreeMap<(usize, usize), i64>,
    left: &mut [i64],
    right: &mut [i64],
    a: usize,
    b: usize,
) {
    let old = std::mem::take(bigrams);
    for ((c, d), n) in old {
        let c = if c == b { a } else { c };
        let d = if d == b { a } else { d };
        *bigrams.entry((c, d)).or_insert(0) += n;
    }
    left[a] += left[b];
    left[b] = 0;
    right[a] += right[b];
    right[b] = 0;
}

/// Features for one word: `brown:L:p` per configured length L, where p is
/// the path truncated to L bits. Unknown words get no features.
pub fn brown_features(word: &str, hierarchy: &BrownHierarchy, prefix_lengths: &[usize]) -> Vec<String> {
    let Some(path) = hierarchy.path(word) else {
        return Vec::new();
    };
    prefix_lengths
        .iter()
        .map(|&len| {
            let cut = len.min(path.len());
            format!("brown:{len}:{}", &path[..cut])
        })
        .collect()
}

/// Writes `word<TAB>bitpath<TAB>count` lines, sorted by word.
pub fn save(hierarchy: &BrownHierarchy, path: &Path) -> Result<()> {
    let mut out = String::new();
    for (word, bits) in &hierarchy.paths {
        let count = hierarchy.counts.get(word).copied().unwrap_or(0);
        out.push_str(word);
        out.push('\t');
        out.push_str(bits);
        out.push('\t');
        out.push_str(&count.to_string());
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Reads a file written by [`save`]. The merge history is not persisted,
/// so the loaded hierarchy carries paths and counts only.
pub fn load(path: &Path) -> Result<BrownHierarchy> {
    let data = fs::read_to_string(path)?;
    let mut paths = BTreeMap::new();
    let mut counts = BTreeMap::new();
    for (i, line) in data.lines().enumerate() {
        let line_no = i + 1;
        let mut fields = line.split('\t');
        let (word, bits, count) = match (fields.next(), fields.next(), fields.next(), fields.next()) {
            (Some(w), Some(b), Some(c), None) => (w, b, c),
            _ => {
                return Err(RepError::BadModelFile {
                    line: line_no,
                    reason: "expected word<TAB>bitpath<TAB>count".to_string(),
                })
            }
        };
        if word.is_empty() {
            return Err(RepError::BadModelFile {
                line: line_no,
                reason: "empty word".to_string(),
            });
        }
        if !bits.chars().all(|c| c == '0' || c == '1') {
            return Err(RepError::BadModelFile {
                line: line_no,
                reason: format!("path {bits:?} has characters other than 0/1"),
            });
        }
        let count: i64 = count.parse().map_err(|_| RepError::BadModelFile {
            line: line_no,
            reason: format!("count {count:?} is not an integer"),
        })?;
        if count < 1 {
            return Err(RepError::BadModelFile {
                line: line_no,
                reason: format!("count {count} is not positive"),
            });
        }
        if paths.insert(word.to_string(), bits.to_string()).is_some() {
            return Err(RepError::BadModelFile {
                line: line_no,
                reason: format!("duplicate word {word:?}"),
            });
        }
        counts.insert(word.to_string(), count);
    }

    // prefix-code check: in sorted order a violated prefix is adjacent
    let mut by_path: Vec<&String> = paths.values().collect();
    by_path.sort();
    for pair in by_path.windows(2) {
        if pair[1].starts_with(pair[0].as_str()) {
            return Err(RepError::BadModelFile {
                line: 0,
                reason: format!("paths {:?} and {:?} break the prefix code", pair[0], pair[1]),
            });
        }
    }

    Ok(BrownHierarchy {
        requested_clusters: 1,
        merge_log: Vec::new(),
        paths,
        counts,
    })
}
