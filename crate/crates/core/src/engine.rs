//! Incremental mention clustering over a bounded (or unbounded) entity memory.
//!
//! Each mention is handled in two steps. First, the best coreference score
//! over the tracked cells decides whether the mention joins an existing
//! entity (strictly positive score). Otherwise the memory policy decides
//! between opening a new entity, evicting a tracked one, or ignoring the
//! mention for lack of capacity or as invalid.

use serde::Serialize;

use crate::error::EngineError;
use crate::scoring::{MentionContext, ScoreProvider};
use crate::types::{Action, Capacity, Document, MentionSpan, Policy, PolicyConfig};

/// Dimension of the hash-derived mention representations.
pub const REPR_DIM: usize = 16;

#[derive(Clone, Debug, PartialEq)]
pub struct EntityCell {
    pub cell_id: u64,
    pub representation: Vec<f64>,
    pub mention_count: usize,
    /// Processing index of the most recent mention that entered this cell.
    pub last_use_ordinal: usize,
    pub gold_entity_id: Option<u32>,
    /// Processing index of the mention that (re)initialized this cell.
    pub anchor_index: usize,
}

impl EntityCell {
    pub fn new(
        cell_id: u64,
        representation: Vec<f64>,
        anchor_index: usize,
        gold_entity_id: Option<u32>,
        last_use_ordinal: usize,
    ) -> Self {
        Self {
            cell_id,
            representation,
            mention_count: 1,
            last_use_ordinal,
            gold_entity_id,
            anchor_index,
        }
    }
}

/// Folds a mention representation into a cell by a running average weighted
/// by the cell's previous mention count.
pub fn update_entity(cell: &mut EntityCell, mention_repr: &[f64]) -> Result<(), EngineError> {
    if cell.representation.len() != mention_repr.len() {
        return Err(EngineError::DimensionMismatch {
            expected: cell.representation.len(),
            found: mention_repr.len(),
        });
    }
    let n = cell.mention_count as f64;
    for (e, x) in cell.representation.iter_mut().zip(mention_repr) {
        *e = (n * *e + x) / (n + 1.0);
    }
    cell.mention_count += 1;
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct MemoryState {
    /// Creation order; an evicted cell is replaced in place.
    pub cells: Vec<EntityCell>,
    pub capacity: Capacity,
    pub next_ordinal: usize,
    next_cell_id: u64,
}

impl MemoryState {
    pub fn new(capacity: Capacity) -> Self {
        Self {
            cells: Vec::new(),
            capacity,
            next_ordinal: 0,
            next_cell_id: 0,
        }
    }

    pub fn with_cells(capacity: Capacity, cells: Vec<EntityCell>) -> Self {
        let next_cell_id = cells.iter().map(|c| c.cell_id + 1).max().unwrap_or(0);
        Self {
            cells,
            capacity,
            next_ordinal: 0,
            next_cell_id,
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn is_full(&self) -> bool {
        !self.capacity.has_room(self.cells.len())
    }

    /// Position of the least recently used cell.
    pub fn lru_position(&self) -> Option<usize> {
        self.cells
            .iter()
            .enumerate()
            .min_by_key(|(_, c)| c.last_use_ordinal)
            .map(|(j, _)| j)
    }

    fn fresh_cell(
        &mut self,
        ctx: &MentionContext<'_>,
        repr: Vec<f64>,
        label: Option<u32>,
    ) -> Result<EntityCell, EngineError> {
        if let Some(other) = self.cells.first() {
            if other.representation.len() != repr.len() {
                return Err(EngineError::DimensionMismatch {
                    expected: other.representation.len(),
                    found: repr.len(),
                });
            }
        }
        let id = self.next_cell_id;
        self.next_cell_id += 1;
        Ok(EntityCell::new(id, repr, ctx.index, label, ctx.index))
    }

    fn apply(
        &mut self,
        action: Action,
        ctx: &MentionContext<'_>,
        repr: Vec<f64>,
        label: Option<u32>,
    ) -> Result<(), EngineError> {
        match action {
            Action::Coref(j) => {
                let cell = &mut self.cells[j];
                update_entity(cell, &repr)?;
                cell.last_use_ordinal = ctx.index;
            }
            Action::NewEntity => {
                let cell = self.fresh_cell(ctx, repr, label)?;
                self.cells.push(cell);
            }
            Action::EvictAndReplace(j) => {
                let cell = self.fresh_cell(ctx, repr, label)?;
                self.cells[j] = cell;
            }
            Action::IgnoreCapacity | Action::IgnoreInvalid => {}
        }
        self.next_ordinal += 1;
        Ok(())
    }
}

/// Index of the minimum; ties go to the lowest index.
fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v < values[best] {
            best = i;
        }
    }
    best
}

/// Second step for U-MEM (`star == false`) and U-MEM* (`star == true`).
pub fn decide_unbounded<S: ScoreProvider + ?Sized>(
    _state: &MemoryState,
    ctx: &MentionContext<'_>,
    scores: &mut S,
    star: bool,
) -> Result<Action, EngineError> {
    if star || scores.mention_score(ctx)? > 0.0 {
        Ok(Action::NewEntity)
    } else {
        Ok(Action::IgnoreInvalid)
    }
}

fn outcome(d: usize, evict: usize, m: usize) -> Action {
    if d < m {
        Action::EvictAndReplace(evict)
    } else if d == m {
        Action::IgnoreCapacity
    } else {
        Action::IgnoreInvalid
    }
}

/// Second step for LB-MEM: argmin over every cell's remaining score, the
/// mention's remaining score and its mention score.
pub fn decide_lb<S: ScoreProvider + ?Sized>(
    state: &MemoryState,
    ctx: &MentionContext<'_>,
    scores: &mut S,
) -> Result<Action, EngineError> {
    if !state.is_full() {
        return decide_unbounded(state, ctx, scores, false);
    }
    let m = state.cells.len();
    let mut candidates = Vec::with_capacity(m + 2);
    for (j, cell) in state.cells.iter().enumerate() {
        candidates.push(scores.cell_remaining_score(ctx, j, cell)?);
    }
    candidates.push(scores.mention_remaining_score(ctx)?);
    candidates.push(scores.mention_score(ctx)?);
    let d = argmin(&candidates);
    Ok(outcome(d, d, m))
}

/// Second step for RB-MEM: like LB-MEM but only the least recently used
/// cell may be evicted.
pub fn decide_rb<S: ScoreProvider + ?Sized>(
    state: &MemoryState,
    ctx: &MentionContext<'_>,
    scores: &mut S,
) -> Result<Action, EngineError> {
    if !state.is_full() {
        return decide_unbounded(state, ctx, scores, false);
    }
    let Some(lru) = state.lru_position() else {
        // a full memory with no cells only arises from a zero capacity
        return Ok(Action::IgnoreCapacity);
    };
    let candidates = [
        scores.cell_remaining_score(ctx, lru, &state.cells[lru])?,
        scores.mention_remaining_score(ctx)?,
        scores.mention_score(ctx)?,
    ];
    Ok(outcome(argmin(&candidates), lru, 1))
}

/// Processes one mention and updates the memory accordingly.
pub fn step<S: ScoreProvider + ?Sized>(
    state: &mut MemoryState,
    ctx: &MentionContext<'_>,
    scores: &mut S,
    policy: &PolicyConfig,
) -> Result<Action, EngineError> {
    scores.begin_mention(ctx, &state.cells)?;

    let mut top: Option<(usize, f64)> = None;
    for (j, cell) in state.cells.iter().enumerate() {
        let s = scores.coref_score(ctx, j, cell)?;
        if top.is_none_or(|(_, best)| s > best) {
            top = Some((j, s));
        }
    }

    let action = match top {
        Some((j, s)) if s > 0.0 => Action::Coref(j),
        _ => match policy.policy {
            Policy::Unbounded => decide_unbounded(state, ctx, scores, false)?,
            Policy::UnboundedStar => decide_unbounded(state, ctx, scores, true)?,
            Policy::LearnedBounded => decide_lb(state, ctx, scores)?,
            Policy::RuleBounded => decide_rb(state, ctx, scores)?,
        },
    };

    let repr = if matches!(action, Action::IgnoreCapacity | Action::IgnoreInvalid) {
        Vec::new()
    } else {
        scores.mention_repr(ctx)
    };
    let label = scores.entity_label(ctx);
    state.apply(action, ctx, repr, label)?;
    Ok(action)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RunStats {
    /// Mean memory size sampled after every mention step.
    pub avg_entities_in_memory: f64,
    pub max_entities_in_memory: usize,
    pub ignored_capacity_count: usize,
    pub ignored_invalid_count: usize,
    pub eviction_count: usize,
    pub actions: Vec<Action>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClusteringResult {
    pub doc_id: String,
    /// Mentions in the order they were processed.
    pub mentions: Vec<MentionSpan>,
    pub predicted_clusters: Vec<Vec<MentionSpan>>,
    pub stats: RunStats,
}

impl ClusteringResult {
    pub fn trace(&self) -> Vec<TraceRecord> {
        trace_records(&self.mentions, &self.stats.actions)
    }
}

/// Rebuilds clusters from an action sequence: every cell (re)initialization
/// opens a new cluster, and evicted clusters are kept.
pub fn clusters_from_actions(
    mentions: &[MentionSpan],
    actions: &[Action],
) -> Vec<Vec<MentionSpan>> {
    let mut clusters: Vec<Vec<MentionSpan>> = Vec::new();
    let mut cell_cluster: Vec<usize> = Vec::new();
    for (&m, &a) in mentions.iter().zip(actions) {
        match a {
            Action::Coref(j) => clusters[cell_cluster[j]].push(m),
            Action::NewEntity => {
                cell_cluster.push(clusters.len());
                clusters.push(vec![m]);
            }
            Action::EvictAndReplace(j) => {
                cell_cluster[j] = clusters.len();
                clusters.push(vec![m]);
            }
            Action::IgnoreCapacity | Action::IgnoreInvalid => {}
        }
    }
    clusters
}

/// Runs the engine over `mentions`, which must already be in processing order.
pub fn run_document<S: ScoreProvider + ?Sized>(
    doc: &Document,
    mentions: &[MentionSpan],
    scores: &mut S,
    policy: &PolicyConfig,
) -> Result<ClusteringResult, EngineError> {
    policy.validate()?;
    scores.begin_document(doc, mentions)?;

    let mut state = MemoryState::new(policy.capacity);
    let mut stats = RunStats {
        actions: Vec::with_capacity(mentions.len()),
        ..RunStats::default()
    };
    let mut occupancy = 0usize;

    for (index, &span) in mentions.iter().enumerate() {
        let ctx = MentionContext { doc, index, span };
        let action = step(&mut state, &ctx, scores, policy)?;
        match action {
            Action::IgnoreCapacity => stats.ignored_capacity_count += 1,
            Action::IgnoreInvalid => stats.ignored_invalid_count += 1,
            Action::EvictAndReplace(_) => stats.eviction_count += 1,
            _ => {}
        }
        stats.actions.push(action);
        occupancy += state.len();
        stats.max_entities_in_memory = stats.max_entities_in_memory.max(state.len());
    }
    if !mentions.is_empty() {
        stats.avg_entities_in_memory = occupancy as f64 / mentions.len() as f64;
    }

    Ok(ClusteringResult {
        doc_id: doc.doc_id.clone(),
        mentions: mentions.to_vec(),
        predicted_clusters: clusters_from_actions(mentions, &stats.actions),
        stats,
    })
}

/// One line of an action trace.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRecord {
    pub mention: MentionSpan,
    pub action: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cell: Option<usize>,
}

/// Trace records for an action sequence. New entities are reported with the
/// position they were appended at.
pub fn trace_records(mentions: &[MentionSpan], actions: &[Action]) -> Vec<TraceRecord> {
    let mut size = 0;
    mentions
        .iter()
        .zip(actions)
        .map(|(&mention, &a)| {
            let cell = match a {
                Action::NewEntity => {
                    size += 1;
                    Some(size - 1)
                }
                other => other.cell(),
            };
            TraceRecord {
                mention,
                action: a.tag(),
                cell,
            }
        })
        .collect()
}

pub fn trace_jsonl(records: &[TraceRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("trace records serialize"));
        out.push('\n');
    }
    out
}

/// Deterministic unit vector derived from a string: FNV-1a seeds a
/// splitmix64 stream whose outputs are mapped to [-1, 1) and normalized.
pub fn hashed_unit_vector(text: &str, dim: usize) -> Vec<f64> {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in text.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut v: Vec<f64> = (0..dim)
        .map(|_| {
            h = h.wrapping_add(0x9e37_79b9_7f4a_7c15);
            let mut z = h;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
            z ^= z >> 31;
            (z >> 11) as f64 / (1u64 << 52) as f64 - 1.0
        })
        .collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::ScoreError;
    use crate::types::SingletonMode;

    /// Returns the same fixed scores for every mention.
    struct Fixed {
        s_m: f64,
        s_c: Vec<f64>,
        f_r_cells: Vec<f64>,
        f_r_mention: f64,
    }

    impl ScoreProvider for Fixed {
        fn mention_score(&mut self, _: &MentionContext<'_>) -> Result<f64, ScoreError> {
            Ok(self.s_m)
        }
        fn coref_score(
            &mut self,
            _: &MentionContext<'_>,
            p: usize,
            _: &EntityCell,
        ) -> Result<f64, ScoreError> {
            Ok(self.s_c[p])
        }
        fn cell_remaining_score(
            &mut self,
            _: &MentionContext<'_>,
            p: usize,
            _: &EntityCell,
        ) -> Result<f64, ScoreError> {
            Ok(self.f_r_cells[p])
        }
        fn mention_remaining_score(&mut self, _: &MentionContext<'_>) -> Result<f64, ScoreError> {
            Ok(self.f_r_mention)
        }
    }

    fn fixed(s_m: f64, s_c: &[f64], f_r_cells: &[f64], f_r_mention: f64) -> Fixed {
        Fixed {
            s_m,
            s_c: s_c.to_vec(),
            f_r_cells: f_r_cells.to_vec(),
            f_r_mention,
        }
    }

    fn doc() -> Document {
        Document::with_gold("d", vec!["x".into(); 4], vec![])
    }

    /// Cells whose last-use ordinals are given; position 0 is oldest by creation.
    fn state(capacity: Capacity, last_use: &[usize]) -> MemoryState {
        let cells = last_use
            .iter()
            .enumerate()
            .map(|(i, &u)| EntityCell::new(i as u64, vec![0.0; REPR_DIM], u, None, u))
            .collect();
        MemoryState::with_cells(capacity, cells)
    }

    fn ctx(doc: &Document) -> MentionContext<'_> {
        MentionContext {
            doc,
            index: 10,
            span: MentionSpan::new(0, 0),
        }
    }

    #[test]
    fn update_arithmetic() {
        let mut c = EntityCell::new(0, vec![2.0], 0, None, 0);
        update_entity(&mut c, &[4.0]).unwrap();
        assert_eq!((c.representation.clone(), c.mention_count), (vec![3.0], 2));

        let mut c = EntityCell::new(0, vec![1.0, 1.0], 0, None, 0);
        c.mention_count = 3;
        update_entity(&mut c, &[5.0, 9.0]).unwrap();
        assert_eq!(
            (c.representation.clone(), c.mention_count),
            (vec![2.0, 3.0], 4)
        );

        assert!(matches!(
            update_entity(&mut c, &[1.0]),
            Err(EngineError::DimensionMismatch {
                expected: 2,
                found: 1
            })
        ));
    }

    #[test]
    fn empty_memory_new_entity() {
        let d = doc();
        for policy in [
            PolicyConfig::learned(3),
            PolicyConfig::rule(3),
            PolicyConfig::unbounded(),
        ] {
            let mut st = MemoryState::new(policy.capacity);
            let a = step(&mut st, &ctx(&d), &mut fixed(0.5, &[], &[], 0.0), &policy).unwrap();
            assert_eq!(a, Action::NewEntity);
            assert_eq!(st.len(), 1);
        }
    }

    #[test]
    fn coref_picks_max_positive() {
        let d = doc();
        let mut st = state(Capacity::Unbounded, &[0, 1]);
        let a = step(
            &mut st,
            &ctx(&d),
            &mut fixed(-1.0, &[-0.5, 0.2], &[0.0, 0.0], 0.0),
            &PolicyConfig::unbounded(),
        )
        .unwrap();
        assert_eq!(a, Action::Coref(1));
        assert_eq!(st.cells[1].mention_count, 2);
        assert_eq!(st.cells[1].last_use_ordinal, 10);
    }

    #[test]
    fn coref_ties_go_to_lowest_position() {
        let d = doc();
        let mut st = state(Capacity::Unbounded, &[0, 1, 2]);
        let a = step(
            &mut st,
            &ctx(&d),
            &mut fixed(1.0, &[0.3, 0.7, 0.7], &[0.0; 3], 0.0),
            &PolicyConfig::unbounded(),
        )
        .unwrap();
        assert_eq!(a, Action::Coref(1));
    }

    #[test]
    fn zero_top_score_is_not_coreference() {
        let d = doc();
        let mut st = state(Capacity::Unbounded, &[0]);
        let a = step(
            &mut st,
            &ctx(&d),
            &mut fixed(1.0, &[0.0], &[0.0], 0.0),
            &PolicyConfig::unbounded(),
        )
        .unwrap();
        assert_eq!(a, Action::NewEntity);
    }

    #[test]
    fn unbounded_invalid() {
        let d = doc();
        let mut st = state(Capacity::Unbounded, &[0, 1]);
        let a = step(
            &mut st,
            &ctx(&d),
            &mut fixed(-1.0, &[-0.1, -0.1], &[0.0; 2], 0.0),
            &PolicyConfig::unbounded(),
        )
        .unwrap();
        assert_eq!(a, Action::IgnoreInvalid);
        assert_eq!(st.len(), 2);
    }

    #[test]
    fn unbounded_decisions() {
        let d = doc();
        let st = MemoryState::new(Capacity::Unbounded);
        let c = ctx(&d);
        let run =
            |s_m, star| decide_unbounded(&st, &c, &mut fixed(s_m, &[], &[], 0.0), star).unwrap();
        assert_eq!(run(0.4, false), Action::NewEntity);
        assert_eq!(run(-0.4, false), Action::IgnoreInvalid);
        assert_eq!(run(-0.4, true), Action::NewEntity);
    }

    #[test]
    fn lb_outcomes() {
        let d = doc();
        let c = ctx(&d);
        let st = state(Capacity::Finite(2), &[0, 1]);
        let lb = |f: Fixed| decide_lb(&st, &c, &mut { f }).unwrap();
        assert_eq!(
            lb(fixed(5.0, &[], &[0.1, 3.0], 2.0)),
            Action::EvictAndReplace(0)
        );
        assert_eq!(
            lb(fixed(6.0, &[], &[4.0, 5.0], 0.5)),
            Action::IgnoreCapacity
        );
        assert_eq!(
            lb(fixed(-2.0, &[], &[4.0, 5.0], 3.0)),
            Action::IgnoreInvalid
        );
        // ties prefer the lower index: cell over mention over invalid
        assert_eq!(
            lb(fixed(1.0, &[], &[1.0, 1.0], 1.0)),
            Action::EvictAndReplace(0)
        );
        assert_eq!(
            lb(fixed(1.0, &[], &[2.0, 2.0], 1.0)),
            Action::IgnoreCapacity
        );
    }

    #[test]
    fn lb_with_room_behaves_like_unbounded() {
        let d = doc();
        let c = ctx(&d);
        let st = state(Capacity::Finite(3), &[0, 1]);
        assert_eq!(
            decide_lb(&st, &c, &mut fixed(0.1, &[], &[0.0, 0.0], 9.0)).unwrap(),
            Action::NewEntity
        );
        assert_eq!(
            decide_rb(&st, &c, &mut fixed(-0.1, &[], &[0.0, 0.0], 9.0)).unwrap(),
            Action::IgnoreInvalid
        );
    }

    #[test]
    fn rb_outcomes() {
        let d = doc();
        let c = ctx(&d);
        // cell 1 is least recently used
        let st = state(Capacity::Finite(2), &[5, 2]);
        assert_eq!(
            decide_rb(&st, &c, &mut fixed(1.0, &[], &[7.0, 0.2], 1.0)).unwrap(),
            Action::EvictAndReplace(1)
        );
        assert_eq!(
            decide_rb(&st, &c, &mut fixed(1.0, &[], &[7.0, 9.0], 0.1)).unwrap(),
            Action::IgnoreCapacity
        );
    }

    #[test]
    fn rb_restriction_cost_against_lb() {
        let d = doc();
        let c = ctx(&d);
        // non-LRU cell 0 has nothing left, LRU cell 1 has 9
        let st = state(Capacity::Finite(2), &[5, 2]);
        let scores = || fixed(10.0, &[], &[0.0, 9.0], 8.0);
        assert_eq!(
            decide_rb(&st, &c, &mut scores()).unwrap(),
            Action::IgnoreCapacity
        );
        assert_eq!(
            decide_lb(&st, &c, &mut scores()).unwrap(),
            Action::EvictAndReplace(0)
        );
    }

    #[test]
    fn eviction_reinitializes_in_place() {
        let d = doc();
        let mut st = state(Capacity::Finite(2), &[0, 1]);
        st.cells[0].mention_count = 4;
        let a = step(
            &mut st,
            &ctx(&d),
            &mut fixed(5.0, &[-1.0, -1.0], &[0.0, 3.0], 2.0),
            &PolicyConfig::learned(2),
        )
        .unwrap();
        assert_eq!(a, Action::EvictAndReplace(0));
        assert_eq!(st.cells[0].mention_count, 1);
        assert_eq!(st.cells[0].cell_id, 2);
        assert_eq!(st.cells[0].last_use_ordinal, 10);
        assert_eq!(st.cells[0].anchor_index, 10);
        assert_eq!(st.len(), 2);
    }

    #[test]
    fn star_policy_rejected_with_singletons() {
        let d = doc();
        let policy = PolicyConfig::new(
            Policy::UnboundedStar,
            Capacity::Unbounded,
            SingletonMode::KeepSingletons,
        );
        let err = run_document(&d, &[], &mut fixed(1.0, &[], &[], 0.0), &policy).unwrap_err();
        assert!(matches!(err, EngineError::Config(_)));
    }

    #[test]
    fn clusters_keep_evicted_lineages() {
        let s = MentionSpan::new;
        let mentions = [s(0, 0), s(1, 1), s(2, 2), s(3, 3), s(4, 4)];
        let actions = [
            Action::NewEntity,
            Action::Coref(0),
            Action::EvictAndReplace(0),
            Action::IgnoreCapacity,
            Action::Coref(0),
        ];
        assert_eq!(
            clusters_from_actions(&mentions, &actions),
            vec![vec![s(0, 0), s(1, 1)], vec![s(2, 2), s(4, 4)]]
        );
        let trace = trace_jsonl(&trace_records(&mentions[..2], &actions[..2]));
        assert_eq!(
            trace,
            "{\"mention\":[0,0],\"action\":\"new\",\"cell\":0}\n{\"mention\":[1,1],\"action\":\"coref\",\"cell\":0}\n"
        );
    }

    #[test]
    fn hashed_vectors_are_unit_and_stable() {
        let a = hashed_unit_vector("Obama", REPR_DIM);
        let b = hashed_unit_vector("Obama", REPR_DIM);
        let c = hashed_unit_vector("obama", REPR_DIM);
        assert_eq!(a, b);
        assert_ne!(a, c);
        let norm: f64 = a.iter().map(|x| x * x).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }
}
