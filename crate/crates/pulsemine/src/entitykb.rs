//! Knowledge base of target entities and mention detection.
//!
//! Entities carry the surface forms they are known by plus a context
//! profile (token weights) used to pick one candidate when a surface form
//! is shared. Detection runs a prefix tree over normalized token sequences
//! with a leftmost-longest, non-overlapping policy.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::docstore::Document;
use crate::textnorm::{self, Token};

#[derive(Debug, thiserror::Error)]
pub enum KbError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("knowledge base parse failure: {0}")]
    Parse(String),
    #[error("duplicate entity id {0:?}")]
    DuplicateId(String),
    #[error("entity {0:?} has an empty id")]
    EmptyId(String),
    #[error("entity {0:?} has no surface forms")]
    NoSurfaceForms(String),
    #[error("entity {id:?} surface form {form:?} normalizes to no tokens")]
    EmptySurfaceForm { id: String, form: String },
    #[error("entity {id:?} profile key {key:?} does not normalize to a single word")]
    BadProfileKey { id: String, key: String },
    #[error("entity {id:?} profile key {key:?} has negative weight {weight}")]
    NegativeWeight { id: String, key: String, weight: f64 },
    #[error("unknown entity id {0:?}")]
    UnknownEntity(String),
}

pub type Result<T> = std::result::Result<T, KbError>;

/// One target entity. Surface forms and profile keys are kept in normalized
/// token form, so matching never depends on how the KB author spelled them.
#[derive(Debug, Clone)]
pub struct Entity {
    pub id: String,
    pub name: String,
    pub surface_forms: BTreeSet<Vec<String>>,
    pub profile: BTreeMap<String, f64>,
}

#[derive(Debug, Deserialize)]
struct KbFile {
    entities: Vec<EntityRecord>,
}

#[derive(Debug, Deserialize)]
struct EntityRecord {
    id: String,
    name: String,
    surface_forms: Vec<String>,
    #[serde(default)]
    profile: BTreeMap<String, f64>,
}

#[derive(Debug, Clone)]
pub struct KnowledgeBase {
    entities: BTreeMap<String, Entity>,
}

impl KnowledgeBase {
    pub fn from_json(json: &str) -> Result<Self> {
        let file: KbFile = serde_json::from_str(json).map_err(|e| KbError::Parse(e.to_string()))?;
        let mut entities = BTreeMap::new();
        for record in file.entities {
            let entity = validate_record(record)?;
            if entities.contains_key(&entity.id) {
                return Err(KbError::DuplicateId(entity.id));
            }
            entities.insert(entity.id.clone(), entity);
        }
        Ok(KnowledgeBase { entities })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn get(&self, id: &str) -> Option<&Entity> {
        self.entities.get(id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.entities.contains_key(id)
    }

    /// Entities in id order.
    pub fn entities(&self) -> impl Iterator<Item = &Entity> {
        self.entities.values()
    }

    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }
}

fn validate_record(record: EntityRecord) -> Result<Entity> {
    if record.id.is_empty() {
        return Err(KbError::EmptyId(record.name));
    }
    if record.surface_forms.is_empty() {
        return Err(KbError::NoSurfaceForms(record.id));
    }
    let mut surface_forms = BTreeSet::new();
    for form in &record.surface_forms {
        let tokens = textnorm::normalize_surfaces(form);
        if tokens.is_empty() {
            return Err(KbError::EmptySurfaceForm {
                id: record.id,
                form: form.clone(),
            });
        }
        surface_forms.insert(tokens);
    }
    let mut profile = BTreeMap::new();
    for (key, weight) in record.profile {
        let normalized = textnorm::normalize_surfaces(&key);
        if normalized.len() != 1 {
            return Err(KbError::BadProfileKey { id: record.id, key });
        }
        if weight < 0.0 || !weight.is_finite() {
            return Err(KbError::NegativeWeight { id: record.id, key, weight });
        }
        // two keys may collapse to one normalized word; weights add up
        *profile.entry(normalized.into_iter().next().unwrap()).or_insert(0.0) += weight;
    }
    Ok(Entity {
        id: record.id,
        name: record.name,
        surface_forms,
        profile,
    })
}

/// Prefix tree over surface-form token sequences. A node is accepting when
/// `entity_ids` is nonempty; the set then names every entity sharing the
/// form spelled by the path to that node.
#[derive(Debug, Default)]
struct TrieNode {
    children: HashMap<String, TrieNode>,
    entity_ids: BTreeSet<String>,
}

#[derive(Debug)]
pub struct SurfaceFormMatcher {
    root: TrieNode,
}

impl SurfaceFormMatcher {
    pub fn build(kb: &KnowledgeBase) -> Self {
        let mut root = TrieNode::default();
        for entity in kb.entities() {
            for form in &entity.surface_forms {
                let mut node = &mut root;
                for word in form {
                    node = node.children.entry(word.clone()).or_default();
                }
                node.entity_ids.insert(entity.id.clone());
            }
        }
        SurfaceFormMatcher { root }
    }

    /// Longest surface form starting at `tokens[start]`, as (length, ids).
    fn longest_match_at(&self, tokens: &[Token], start: usize) -> Option<(usize, &BTreeSet<String>)> {
        let mut node = &self.root;
        let mut best: Option<(usize, &BTreeSet<String>)> = None;
        for (offset, token) in tokens[start..].iter().enumerate() {
            match node.children.get(token.surface()) {
                Some(next) => node = next,
                None => break,
            }
            if !node.entity_ids.is_empty() {
                best = Some((offset + 1, &node.entity_ids));
            }
        }
        best
    }
}

/// One detected entity mention inside a normalized token sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mention {
    pub doc_id: String,
    /// Token index range [start, end).
    pub start: usize,
    pub end: usize,
    pub surface: Vec<String>,
    pub candidates: BTreeSet<String>,
    pub resolved: Option<String>,
    pub confidence: OrderedConfidence,
}

/// Confidence wrapper keeping Mention Eq-comparable in tests; the value is
/// a cosine similarity in [0, 1].
#[derive(Debug, Clone, Copy, PartialOrd)]
pub struct OrderedConfidence(pub f64);

impl PartialEq for OrderedConfidence {
    fn eq(&self, other: &Self) -> bool {
        self.0.to_bits() == other.0.to_bits()
    }
}

impl Eq for OrderedConfidence {}

impl Mention {
    pub fn confidence(&self) -> f64 {
        self.confidence.0
    }
}

/// Scans left to right; at each position takes the longest surface form
/// starting there and resumes after it. Output is sorted by start and
/// non-overlapping by construction. Resolution is left to `disambiguate`.
pub fn detect_mentions(doc_id: &str, tokens: &[Token], matcher: &SurfaceFormMatcher) -> Vec<Mention> {
    let mut mentions = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        match matcher.longest_match_at(tokens, i) {
            Some((len, ids)) => {
                mentions.push(Mention {
                    doc_id: doc_id.to_string(),
                    start: i,
                    end: i + len,
                    surface: tokens[i..i + len].iter().map(|t| t.surface().to_string()).collect(),
                    candidates: ids.clone(),
                    resolved: None,
                    confidence: OrderedConfidence(0.0),
                });
                i += len;
            }
            None => i += 1,
        }
    }
    mentions
}

/// Resolves a mention against its document context.
///
/// One candidate resolves outright with confidence 1.0. With several, each
/// is scored by cosine between the context token counts and the entity
/// profile; the top candidate wins only when its score is positive and
/// strictly above the runner-up, and the score becomes the confidence.
/// Ties and all-zero scores leave the mention unresolved at confidence 0.
pub fn disambiguate(mention: &mut Mention, context: &[Token], kb: &KnowledgeBase) {
    if mention.candidates.len() == 1 {
        mention.resolved = Some(mention.candidates.iter().next().unwrap().clone());
        mention.confidence = OrderedConfidence(1.0);
        return;
    }

    let mut counts: BTreeMap<&str, f64> = BTreeMap::new();
    for token in context {
        *counts.entry(token.surface()).or_insert(0.0) += 1.0;
    }

    let mut best: Option<(&str, f64)> = None;
    let mut runner_up = 0.0f64;
    for id in &mention.candidates {
        // candidates come from matcher nodes, which only hold KB ids
        let entity = kb.get(id).expect("candidate id present in kb");
        let score = profile_cosine(&counts, &entity.profile);
        match best {
            Some((_, top)) if score > top => {
                runner_up = top;
                best = Some((id, score));
            }
            Some(_) => runner_up = runner_up.max(score),
            None => best = Some((id, score)),
        }
    }

    if let Some((id, score)) = best {
        if score > 0.0 && score > runner_up {
            mention.resolved = Some(id.to_string());
            mention.confidence = OrderedConfidence(score);
            return;
        }
    }
    mention.resolved = None;
    mention.confidence = OrderedConfidence(0.0);
}

fn profile_cosine(counts: &BTreeMap<&str, f64>, profile: &BTreeMap<String, f64>) -> f64 {
    let mut dot = 0.0;
    for (word, weight) in profile {
        if let Some(c) = counts.get(word.as_str()) {
            dot += c * weight;
        }
    }
    if dot == 0.0 {
        return 0.0;
    }
    let count_norm: f64 = counts.values().map(|c| c * c).sum::<f64>().sqrt();
    let profile_norm: f64 = profile.values().map(|w| w * w).sum::<f64>().sqrt();
    dot / (count_norm * profile_norm)
}

/// Detects and disambiguates every mention in one document.
pub fn annotate_document(doc: &Document, kb: &KnowledgeBase, matcher: &SurfaceFormMatcher) -> Vec<Mention> {
    let tokens = textnorm::normalize(&doc.text);
    let mut mentions = detect_mentions(&doc.id, &tokens, matcher);
    for mention in &mut mentions {
        let context: Vec<Token> = tokens[..mention.start]
            .iter()
            .chain(&tokens[mention.end..])
            .cloned()
            .collect();
        disambiguate(mention, &context, kb);
    }
    mentions
}

/// True iff some mention in the document resolves to `entity_id`.
pub fn filter_relevant(
    doc: &Document,
    entity_id: &str,
    kb: &KnowledgeBase,
    matcher: &SurfaceFormMatcher,
) -> Result<bool> {
    if !kb.contains(entity_id) {
        return Err(KbError::UnknownEntity(entity_id.to_string()));
    }
    Ok(annotate_document(doc, kb, matcher)
        .iter()
        .any(|m| m.resolved.as_deref() == Some(entity_id)))
}
