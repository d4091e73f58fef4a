//! Score providers stand in for the learned scoring functions of the
//! clustering model:
//!
//! * `mention_score`: how likely a span is a mention,
//! * `coref_score`: mention-to-entity score, already including the additive
//!   mention score,
//! * `*_remaining_score`: anticipated number of remaining mentions of a
//!   tracked entity or of the incoming mention.
//!
//! The engine calls [`ScoreProvider::begin_document`] once per run and
//! [`ScoreProvider::begin_mention`] before querying scores for each mention.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::engine::{hashed_unit_vector, EntityCell, REPR_DIM};
use crate::error::ScoreError;
use crate::ingest::order_mentions;
use crate::types::{Candidate, Document, MentionSpan};

/// The mention currently being clustered.
#[derive(Clone, Copy, Debug)]
pub struct MentionContext<'a> {
    pub doc: &'a Document,
    /// Position in the processing order.
    pub index: usize,
    pub span: MentionSpan,
}

pub trait ScoreProvider {
    fn begin_document(
        &mut self,
        _doc: &Document,
        _mentions: &[MentionSpan],
    ) -> Result<(), ScoreError> {
        Ok(())
    }

    fn begin_mention(
        &mut self,
        _ctx: &MentionContext<'_>,
        _cells: &[EntityCell],
    ) -> Result<(), ScoreError> {
        Ok(())
    }

    fn mention_score(&mut self, ctx: &MentionContext<'_>) -> Result<f64, ScoreError>;

    fn coref_score(
        &mut self,
        ctx: &MentionContext<'_>,
        position: usize,
        cell: &EntityCell,
    ) -> Result<f64, ScoreError>;

    fn cell_remaining_score(
        &mut self,
        ctx: &MentionContext<'_>,
        position: usize,
        cell: &EntityCell,
    ) -> Result<f64, ScoreError>;

    fn mention_remaining_score(&mut self, ctx: &MentionContext<'_>) -> Result<f64, ScoreError>;

    /// Gold entity of the mention, for providers with oracle knowledge.
    fn entity_label(&self, _ctx: &MentionContext<'_>) -> Option<u32> {
        None
    }

    fn mention_repr(&self, ctx: &MentionContext<'_>) -> Vec<f64> {
        hashed_unit_vector(&ctx.doc.span_text(ctx.span), REPR_DIM)
    }
}

impl<S: ScoreProvider + ?Sized> ScoreProvider for Box<S> {
    fn begin_document(
        &mut self,
        doc: &Document,
        mentions: &[MentionSpan],
    ) -> Result<(), ScoreError> {
        (**self).begin_document(doc, mentions)
    }
    fn begin_mention(
        &mut self,
        ctx: &MentionContext<'_>,
        cells: &[EntityCell],
    ) -> Result<(), ScoreError> {
        (**self).begin_mention(ctx, cells)
    }
    fn mention_score(&mut self, ctx: &MentionContext<'_>) -> Result<f64, ScoreError> {
        (**self).mention_score(ctx)
    }
    fn coref_score(
        &mut self,
        ctx: &MentionContext<'_>,
        p: usize,
        c: &EntityCell,
    ) -> Result<f64, ScoreError> {
        (**self).coref_score(ctx, p, c)
    }
    fn cell_remaining_score(
        &mut self,
        ctx: &MentionContext<'_>,
        p: usize,
        c: &EntityCell,
    ) -> Result<f64, ScoreError> {
        (**self).cell_remaining_score(ctx, p, c)
    }
    fn mention_remaining_score(&mut self, ctx: &MentionContext<'_>) -> Result<f64, ScoreError> {
        (**self).mention_remaining_score(ctx)
    }
    fn entity_label(&self, ctx: &MentionContext<'_>) -> Option<u32> {
        (**self).entity_label(ctx)
    }
    fn mention_repr(&self, ctx: &MentionContext<'_>) -> Vec<f64> {
        (**self).mention_repr(ctx)
    }
}

/// Scores derived from gold annotations: +1/-1 mention and coreference
/// scores, and exact remaining-mention counts.
#[derive(Clone, Debug, Default)]
pub struct GoldScorer {
    span_entity: HashMap<MentionSpan, u32>,
    cluster_size: HashMap<u32, usize>,
    /// Processing positions of each entity's mentions in the current run.
    positions: HashMap<u32, Vec<usize>>,
}

pub fn gold_scorer(doc: &Document) -> GoldScorer {
    GoldScorer::new(doc)
}

impl GoldScorer {
    pub fn new(doc: &Document) -> Self {
        let mut span_entity = HashMap::new();
        let mut cluster_size = HashMap::new();
        for c in &doc.gold_clusters {
            for &m in &c.mentions {
                span_entity.insert(m, c.entity_id);
            }
            *cluster_size.entry(c.entity_id).or_insert(0) += c.mentions.len();
        }
        Self {
            span_entity,
            cluster_size,
            positions: HashMap::new(),
        }
    }

    fn processed_before(&self, entity: u32, index: usize) -> usize {
        self.positions
            .get(&entity)
            .map_or(0, |p| p.partition_point(|&i| i < index))
    }

    /// Gold mentions of `entity` not processed before position `index`.
    fn remaining_from(&self, entity: u32, index: usize) -> usize {
        let size = self.cluster_size.get(&entity).copied().unwrap_or(0);
        size.saturating_sub(self.processed_before(entity, index))
    }
}

impl ScoreProvider for GoldScorer {
    fn begin_document(
        &mut self,
        _doc: &Document,
        mentions: &[MentionSpan],
    ) -> Result<(), ScoreError> {
        self.positions.clear();
        for (i, m) in mentions.iter().enumerate() {
            if let Some(&e) = self.span_entity.get(m) {
                self.positions.entry(e).or_default().push(i);
            }
        }
        Ok(())
    }

    fn mention_score(&mut self, ctx: &MentionContext<'_>) -> Result<f64, ScoreError> {
        Ok(if self.span_entity.contains_key(&ctx.span) {
            1.0
        } else {
            -1.0
        })
    }

    fn coref_score(
        &mut self,
        ctx: &MentionContext<'_>,
        _: usize,
        cell: &EntityCell,
    ) -> Result<f64, ScoreError> {
        let same = match (self.span_entity.get(&ctx.span), cell.gold_entity_id) {
            (Some(&e), Some(c)) => e == c,
            _ => false,
        };
        Ok(if same { 1.0 } else { -1.0 })
    }

    fn cell_remaining_score(
        &mut self,
        ctx: &MentionContext<'_>,
        _: usize,
        cell: &EntityCell,
    ) -> Result<f64, ScoreError> {
        // the current mention counts as processed for every tracked entity
        Ok(cell
            .gold_entity_id
            .map_or(0, |e| self.remaining_from(e, ctx.index + 1)) as f64)
    }

    fn mention_remaining_score(&mut self, ctx: &MentionContext<'_>) -> Result<f64, ScoreError> {
        Ok(self
            .span_entity
            .get(&ctx.span)
            .map_or(0, |&e| self.remaining_from(e, ctx.index)) as f64)
    }

    fn entity_label(&self, ctx: &MentionContext<'_>) -> Option<u32> {
        self.span_entity.get(&ctx.span).copied()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct StringMatchConfig {
    pub lowercase: bool,
    pub strip_determiners: bool,
}

const DETERMINERS: &[&str] = &["a", "an", "the", "this", "that", "these", "those"];

/// Exact surface-string matching. Every candidate is a mention; a mention
/// corefers with a cell iff its normalized string equals the cell's.
#[derive(Clone, Debug, Default)]
pub struct StringMatchScorer {
    config: StringMatchConfig,
    keys: Vec<u32>,
    occurrences: Vec<Vec<usize>>,
}

pub fn string_match_scorer(config: StringMatchConfig) -> StringMatchScorer {
    StringMatchScorer::new(config)
}

impl StringMatchScorer {
    pub fn new(config: StringMatchConfig) -> Self {
        Self {
            config,
            keys: Vec::new(),
            occurrences: Vec::new(),
        }
    }

    pub fn normalize(&self, tokens: &[String]) -> String {
        let mut toks: Vec<String> = tokens
            .iter()
            .map(|t| {
                if self.config.lowercase {
                    t.to_lowercase()
                } else {
                    t.clone()
                }
            })
            .collect();
        if self.config.strip_determiners
            && toks.len() > 1
            && DETERMINERS.contains(&toks[0].to_lowercase().as_str())
        {
            toks.remove(0);
        }
        toks.join(" ")
    }

    fn later_occurrences(&self, key: u32, index: usize) -> usize {
        let occ = &self.occurrences[key as usize];
        occ.len() - occ.partition_point(|&i| i <= index)
    }

    fn key_at(&self, index: usize) -> Result<u32, ScoreError> {
        self.keys
            .get(index)
            .copied()
            .ok_or_else(|| ScoreError::ShapeMismatch {
                mention: index,
                detail: "mention outside the document's candidate list".into(),
            })
    }
}

impl ScoreProvider for StringMatchScorer {
    fn begin_document(
        &mut self,
        doc: &Document,
        mentions: &[MentionSpan],
    ) -> Result<(), ScoreError> {
        let mut interner: HashMap<String, u32> = HashMap::new();
        self.keys.clear();
        self.occurrences.clear();
        for (i, &m) in mentions.iter().enumerate() {
            let norm = self.normalize(doc.span_tokens(m));
            let next = interner.len() as u32;
            let key = *interner.entry(norm).or_insert(next);
            if key as usize == self.occurrences.len() {
                self.occurrences.push(Vec::new());
            }
            self.occurrences[key as usize].push(i);
            self.keys.push(key);
        }
        Ok(())
    }

    fn mention_score(&mut self, _: &MentionContext<'_>) -> Result<f64, ScoreError> {
        Ok(1.0)
    }

    fn coref_score(
        &mut self,
        ctx: &MentionContext<'_>,
        _: usize,
        cell: &EntityCell,
    ) -> Result<f64, ScoreError> {
        // Every mention a cell holds shares the string of the mention that
        // (re)initialized it, so comparing against the anchor suffices.
        let same = self.key_at(ctx.index)? == self.key_at(cell.anchor_index)?;
        Ok(if same { 1.0 } else { -1.0 })
    }

    fn cell_remaining_score(
        &mut self,
        ctx: &MentionContext<'_>,
        _: usize,
        cell: &EntityCell,
    ) -> Result<f64, ScoreError> {
        let key = self.key_at(cell.anchor_index)?;
        Ok(self.later_occurrences(key, ctx.index) as f64)
    }

    fn mention_remaining_score(&mut self, ctx: &MentionContext<'_>) -> Result<f64, ScoreError> {
        let key = self.key_at(ctx.index)?;
        Ok(self.later_occurrences(key, ctx.index) as f64)
    }
}

/// One mention's worth of recorded scores, in cell order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub doc_id: Option<String>,
    pub s_m: f64,
    pub s_c: Vec<f64>,
    pub f_r_cells: Vec<f64>,
    pub f_r_mention: f64,
}

pub fn parse_score_rows(text: &str) -> Result<Vec<ScoreRow>, ScoreError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| ScoreError::Parse {
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

pub fn write_score_rows(rows: &[ScoreRow]) -> String {
    let mut out = String::new();
    for r in rows {
        out.push_str(&serde_json::to_string(r).expect("score rows serialize"));
        out.push('\n');
    }
    out
}

/// Serves scores recorded from an earlier run. Rows tagged with a `doc_id`
/// are grouped per document; untagged rows form one shared sequence.
#[derive(Clone, Debug, Default)]
pub struct ReplayScorer {
    by_doc: HashMap<String, Vec<ScoreRow>>,
    untagged: Vec<ScoreRow>,
    active: Option<String>,
    current: usize,
}

pub fn replay_scorer(score_file: &Path) -> Result<ReplayScorer, ScoreError> {
    ReplayScorer::from_path(score_file)
}

impl ReplayScorer {
    pub fn from_rows(rows: Vec<ScoreRow>) -> Self {
        let mut scorer = Self::default();
        for r in rows {
            match &r.doc_id {
                Some(id) => scorer.by_doc.entry(id.clone()).or_default().push(r),
                None => scorer.untagged.push(r),
            }
        }
        scorer
    }

    pub fn from_path(path: &Path) -> Result<Self, ScoreError> {
        let text = fs::read_to_string(path).map_err(|source| ScoreError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(Self::from_rows(parse_score_rows(&text)?))
    }

    fn rows(&self) -> &[ScoreRow] {
        match &self.active {
            Some(id) => self.by_doc.get(id).map_or(&[], Vec::as_slice),
            None => &self.untagged,
        }
    }

    fn row(&self) -> &ScoreRow {
        &self.rows()[self.current]
    }
}

fn mismatch(mention: usize, detail: impl Into<String>) -> ScoreError {
    ScoreError::ShapeMismatch {
        mention,
        detail: detail.into(),
    }
}

impl ScoreProvider for ReplayScorer {
    fn begin_document(
        &mut self,
        doc: &Document,
        mentions: &[MentionSpan],
    ) -> Result<(), ScoreError> {
        self.active = self
            .by_doc
            .contains_key(&doc.doc_id)
            .then(|| doc.doc_id.clone());
        let have = self.rows().len();
        if have != mentions.len() {
            return Err(mismatch(
                have.min(mentions.len()),
                format!(
                    "document {} has {} mentions, score file has {have} rows",
                    doc.doc_id,
                    mentions.len()
                ),
            ));
        }
        Ok(())
    }

    fn begin_mention(
        &mut self,
        ctx: &MentionContext<'_>,
        cells: &[EntityCell],
    ) -> Result<(), ScoreError> {
        let i = ctx.index;
        let row = self
            .rows()
            .get(i)
            .ok_or_else(|| mismatch(i, "no score row for mention"))?;
        if row.s_c.len() != cells.len() {
            return Err(mismatch(
                i,
                format!(
                    "engine has {} cells, row has {} coreference scores",
                    cells.len(),
                    row.s_c.len()
                ),
            ));
        }
        if row.f_r_cells.len() != cells.len() {
            return Err(mismatch(
                i,
                format!(
                    "engine has {} cells, row has {} remaining scores",
                    cells.len(),
                    row.f_r_cells.len()
                ),
            ));
        }
        self.current = i;
        Ok(())
    }

    fn mention_score(&mut self, _: &MentionContext<'_>) -> Result<f64, ScoreError> {
        Ok(self.row().s_m)
    }

    fn coref_score(
        &mut self,
        ctx: &MentionContext<'_>,
        position: usize,
        _: &EntityCell,
    ) -> Result<f64, ScoreError> {
        self.row().s_c.get(position).copied().ok_or_else(|| {
            mismatch(
                ctx.index,
                format!("no coreference score for cell {position}"),
            )
        })
    }

    fn cell_remaining_score(
        &mut self,
        ctx: &MentionContext<'_>,
        position: usize,
        _: &EntityCell,
    ) -> Result<f64, ScoreError> {
        self.row()
            .f_r_cells
            .get(position)
            .copied()
            .ok_or_else(|| mismatch(ctx.index, format!("no remaining score for cell {position}")))
    }

    fn mention_remaining_score(&mut self, _: &MentionContext<'_>) -> Result<f64, ScoreError> {
        Ok(self.row().f_r_mention)
    }
}

/// Wraps a provider and records a full score row for every mention.
#[derive(Debug)]
pub struct RecordingScorer<S> {
    inner: S,
    tag_documents: bool,
    doc_id: Option<String>,
    rows: Vec<ScoreRow>,
}

impl<S: ScoreProvider> RecordingScorer<S> {
    pub fn new(inner: S) -> Self {
        Self {
            inner,
            tag_documents: false,
            doc_id: None,
            rows: Vec::new(),
        }
    }

    /// Tag every recorded row with its document id.
    pub fn tagged(mut self) -> Self {
        self.tag_documents = true;
        self
    }

    pub fn rows(&self) -> &[ScoreRow] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<ScoreRow> {
        self.rows
    }

    fn last(&self) -> &ScoreRow {
        self.rows.last().expect("begin_mention records a row first")
    }
}

impl<S: ScoreProvider> ScoreProvider for RecordingScorer<S> {
    fn begin_document(
        &mut self,
        doc: &Document,
        mentions: &[MentionSpan],
    ) -> Result<(), ScoreError> {
        self.doc_id = self.tag_documents.then(|| doc.doc_id.clone());
        self.inner.begin_document(doc, mentions)
    }

    fn begin_mention(
        &mut self,
        ctx: &MentionContext<'_>,
        cells: &[EntityCell],
    ) -> Result<(), ScoreError> {
        self.inner.begin_mention(ctx, cells)?;
        let s_m = self.inner.mention_score(ctx)?;
        let mut s_c = Vec::with_capacity(cells.len());
        let mut f_r_cells = Vec::with_capacity(cells.len());
        for (j, cell) in cells.iter().enumerate() {
            s_c.push(self.inner.coref_score(ctx, j, cell)?);
            f_r_cells.push(self.inner.cell_remaining_score(ctx, j, cell)?);
        }
        let f_r_mention = self.inner.mention_remaining_score(ctx)?;
        self.rows.push(ScoreRow {
            doc_id: self.doc_id.clone(),
            s_m,
            s_c,
            f_r_cells,
            f_r_mention,
        });
        Ok(())
    }

    fn mention_score(&mut self, _: &MentionContext<'_>) -> Result<f64, ScoreError> {
        Ok(self.last().s_m)
    }

    fn coref_score(
        &mut self,
        _: &MentionContext<'_>,
        position: usize,
        _: &EntityCell,
    ) -> Result<f64, ScoreError> {
        Ok(self.last().s_c[position])
    }

    fn cell_remaining_score(
        &mut self,
        _: &MentionContext<'_>,
        position: usize,
        _: &EntityCell,
    ) -> Result<f64, ScoreError> {
        Ok(self.last().f_r_cells[position])
    }

    fn mention_remaining_score(&mut self, _: &MentionContext<'_>) -> Result<f64, ScoreError> {
        Ok(self.last().f_r_mention)
    }

    fn entity_label(&self, ctx: &MentionContext<'_>) -> Option<u32> {
        self.inner.entity_label(ctx)
    }

    fn mention_repr(&self, ctx: &MentionContext<'_>) -> Vec<f64> {
        self.inner.mention_repr(ctx)
    }
}

/// Keeps the `floor(ratio * doc_len)` highest-scoring candidates, returned
/// in processing order. Equal scores favour the earlier span.
pub fn propose_top_spans(candidates: &[Candidate], ratio: f64, doc_len: usize) -> Vec<MentionSpan> {
    // the epsilon absorbs binary rounding of decimal ratios, e.g. 0.3 * 70
    let k = (ratio * doc_len as f64 + 1e-9).floor().max(0.0) as usize;
    let mut ranked: Vec<Candidate> = candidates.to_vec();
    ranked.sort_by_key(|c| c.span);
    ranked.dedup_by_key(|c| c.span);
    // stable: ties keep processing order
    ranked.sort_by(|a, b| b.score.total_cmp(&a.score));
    ranked.truncate(k);
    order_mentions(ranked.into_iter().map(|c| c.span).collect()).0
}
