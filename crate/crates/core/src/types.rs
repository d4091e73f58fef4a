//! Shared domain types: spans, documents, gold clusters, actions and the
//! memory-policy configuration.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

/// A closed token interval `[start, end]` over document-global token indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(usize, usize)", into = "(usize, usize)")]
pub struct MentionSpan {
    pub start: usize,
    pub end: usize,
}

impl MentionSpan {
    pub const fn new(start: usize, end: usize) -> Self {
        Self { start, end }
    }

    /// Number of tokens covered. Zero for an inverted span.
    pub fn len(&self) -> usize {
        if self.end < self.start {
            0
        } else {
            self.end - self.start + 1
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, t: usize) -> bool {
        self.start <= t && t <= self.end
    }
}

impl From<(usize, usize)> for MentionSpan {
    fn from((start, end): (usize, usize)) -> Self {
        Self { start, end }
    }
}

impl From<MentionSpan> for (usize, usize) {
    fn from(s: MentionSpan) -> Self {
        (s.start, s.end)
    }
}

impl fmt::Display for MentionSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.start, self.end)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoldCluster {
    pub entity_id: u32,
    pub mentions: Vec<MentionSpan>,
}

impl GoldCluster {
    pub fn new(entity_id: u32, mentions: Vec<MentionSpan>) -> Self {
        Self {
            entity_id,
            mentions,
        }
    }

    pub fn is_singleton(&self) -> bool {
        self.mentions.len() == 1
    }
}

/// A candidate span together with its proposal score.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Candidate {
    pub span: MentionSpan,
    pub score: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Document {
    pub doc_id: String,
    pub tokens: Vec<String>,
    /// Token index at which each sentence begins.
    pub sentence_boundaries: Vec<usize>,
    pub genre: Option<String>,
    pub candidate_mentions: Vec<Candidate>,
    pub gold_clusters: Vec<GoldCluster>,
}

impl Document {
    /// A document whose candidate mentions are exactly its gold mentions
    /// (score 0), in processing order.
    pub fn with_gold(
        doc_id: impl Into<String>,
        tokens: Vec<String>,
        gold_clusters: Vec<GoldCluster>,
    ) -> Self {
        let mut doc = Self {
            doc_id: doc_id.into(),
            tokens,
            sentence_boundaries: Vec::new(),
            genre: None,
            candidate_mentions: Vec::new(),
            gold_clusters,
        };
        doc.reset_candidates_to_gold();
        doc
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn reset_candidates_to_gold(&mut self) {
        let (mut spans, _) = crate::ingest::order_mentions(self.gold_mentions().collect());
        self.candidate_mentions = spans
            .drain(..)
            .map(|span| Candidate { span, score: 0.0 })
            .collect();
    }

    pub fn gold_mentions(&self) -> impl Iterator<Item = MentionSpan> + '_ {
        self.gold_clusters
            .iter()
            .flat_map(|c| c.mentions.iter().copied())
    }

    pub fn gold_mention_count(&self) -> usize {
        self.gold_clusters.iter().map(|c| c.mentions.len()).sum()
    }

    /// Candidate spans in processing order.
    pub fn candidate_spans(&self) -> Vec<MentionSpan> {
        crate::ingest::order_mentions(self.candidate_mentions.iter().map(|c| c.span).collect()).0
    }

    /// Surface tokens of a span. Out-of-range portions are skipped.
    pub fn span_tokens(&self, span: MentionSpan) -> &[String] {
        let end = (span.end + 1).min(self.tokens.len());
        let start = span.start.min(end);
        &self.tokens[start..end]
    }

    pub fn span_text(&self, span: MentionSpan) -> String {
        self.span_tokens(span).join(" ")
    }
}

/// A single mention-clustering decision. Cell indices are positions in the
/// memory, which stay stable across evictions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "action", content = "cell", rename_all = "snake_case")]
pub enum Action {
    Coref(usize),
    #[serde(rename = "new")]
    NewEntity,
    #[serde(rename = "evict")]
    EvictAndReplace(usize),
    #[serde(rename = "ignore_cap")]
    IgnoreCapacity,
    #[serde(rename = "ignore_inv")]
    IgnoreInvalid,
}

impl Action {
    /// Short tag used in trace files.
    pub fn tag(&self) -> &'static str {
        match self {
            Action::Coref(_) => "coref",
            Action::NewEntity => "new",
            Action::EvictAndReplace(_) => "evict",
            Action::IgnoreCapacity => "ignore_cap",
            Action::IgnoreInvalid => "ignore_inv",
        }
    }

    pub fn cell(&self) -> Option<usize> {
        match *self {
            Action::Coref(c) | Action::EvictAndReplace(c) => Some(c),
            _ => None,
        }
    }

    /// True when the mention ends up in some cluster.
    pub fn is_tracked(&self) -> bool {
        matches!(
            self,
            Action::Coref(_) | Action::NewEntity | Action::EvictAndReplace(_)
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    /// U-MEM: new entity only when the mention score is positive.
    Unbounded,
    /// U-MEM*: every non-coreferent mention becomes a new entity.
    UnboundedStar,
    /// LB-MEM: any tracked entity may be evicted.
    LearnedBounded,
    /// RB-MEM: only the least recently used entity may be evicted.
    RuleBounded,
}

impl Policy {
    pub fn is_bounded(&self) -> bool {
        matches!(self, Policy::LearnedBounded | Policy::RuleBounded)
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Policy::Unbounded => "U-MEM",
            Policy::UnboundedStar => "U-MEM*",
            Policy::LearnedBounded => "LB-MEM",
            Policy::RuleBounded => "RB-MEM",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Capacity {
    Finite(usize),
    Unbounded,
}

impl Capacity {
    pub fn admits(&self, n: usize) -> bool {
        match *self {
            Capacity::Finite(c) => n <= c,
            Capacity::Unbounded => true,
        }
    }

    /// Whether a memory holding `n` cells has room for one more.
    pub fn has_room(&self, n: usize) -> bool {
        match *self {
            Capacity::Finite(c) => n < c,
            Capacity::Unbounded => true,
        }
    }

    pub fn finite(&self) -> Option<usize> {
        match *self {
            Capacity::Finite(c) => Some(c),
            Capacity::Unbounded => None,
        }
    }
}

impl fmt::Display for Capacity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Capacity::Finite(c) => write!(f, "{c}"),
            Capacity::Unbounded => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SingletonMode {
    /// Singletons are annotated and scored (LitBank convention).
    KeepSingletons,
    /// Singletons are removed before scoring (OntoNotes convention).
    DropSingletons,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicyConfig {
    pub policy: Policy,
    pub capacity: Capacity,
    pub singleton_mode: SingletonMode,
}

impl PolicyConfig {
    pub fn new(policy: Policy, capacity: Capacity, singleton_mode: SingletonMode) -> Self {
        Self {
            policy,
            capacity,
            singleton_mode,
        }
    }

    pub fn unbounded() -> Self {
        Self::new(
            Policy::Unbounded,
            Capacity::Unbounded,
            SingletonMode::KeepSingletons,
        )
    }

    pub fn learned(capacity: usize) -> Self {
        Self::new(
            Policy::LearnedBounded,
            Capacity::Finite(capacity),
            SingletonMode::KeepSingletons,
        )
    }

    pub fn rule(capacity: usize) -> Self {
        Self::new(
            Policy::RuleBounded,
            Capacity::Finite(capacity),
            SingletonMode::KeepSingletons,
        )
    }

    pub fn with_singletons(mut self, mode: SingletonMode) -> Self {
        self.singleton_mode = mode;
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        match (self.policy, self.capacity) {
            (p, Capacity::Unbounded) if p.is_bounded() => {
                return Err(ConfigError::BoundedWithoutCapacity(p))
            }
            (p, Capacity::Finite(_)) if !p.is_bounded() => {
                return Err(ConfigError::UnboundedWithCapacity(p))
            }
            (_, Capacity::Finite(0)) => return Err(ConfigError::ZeroCapacity),
            _ => {}
        }
        if self.policy == Policy::UnboundedStar
            && self.singleton_mode == SingletonMode::KeepSingletons
        {
            return Err(ConfigError::StarWithSingletons);
        }
        Ok(())
    }
}

/// Checks every structural invariant of a document. Never aborts; an empty
/// list means the document is well formed.
pub fn validate_document(doc: &Document) -> Vec<String> {
    let mut violations = Vec::new();
    let n = doc.tokens.len();

    for (i, w) in doc.sentence_boundaries.windows(2).enumerate() {
        if w[0] >= w[1] {
            violations.push(format!(
                "sentence boundary {}: {} not greater than {}",
                i + 1,
                w[1],
                w[0]
            ));
        }
    }
    if let Some((i, &b)) = doc
        .sentence_boundaries
        .iter()
        .enumerate()
        .find(|(_, &b)| b >= n)
    {
        violations.push(format!(
            "sentence boundary {i}: {b} out of range for {n} tokens"
        ));
    }

    let check_span = |what: &str, span: MentionSpan, out: &mut Vec<String>| {
        if span.start > span.end {
            out.push(format!("{what}: start > end"));
        } else if span.end >= n {
            out.push(format!(
                "{what}: end {} out of range for {n} tokens",
                span.end
            ));
        }
    };

    let mut seen = HashSet::new();
    for (i, c) in doc.candidate_mentions.iter().enumerate() {
        check_span(&format!("mention {i}"), c.span, &mut violations);
        if !seen.insert(c.span) {
            violations.push(format!("duplicate candidate mention {}", c.span));
        }
    }

    let mut seen = HashSet::new();
    for (ci, cluster) in doc.gold_clusters.iter().enumerate() {
        if cluster.mentions.is_empty() {
            violations.push(format!("gold cluster {ci}: empty"));
        }
        for (mi, &span) in cluster.mentions.iter().enumerate() {
            check_span(
                &format!("gold cluster {ci} mention {mi}"),
                span,
                &mut violations,
            );
            if !seen.insert(span) {
                violations.push(format!("duplicate gold mention {span}"));
            }
        }
    }
    violations
}
