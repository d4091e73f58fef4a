//! Ground-truth action sequences for teacher forcing. Decisions maximize the
//! number of gold mentions kept in a bounded memory, using exact remaining
//! mention counts from the gold clusters.

use std::collections::HashMap;

use serde::Serialize;

use crate::engine::EntityCell;
use crate::error::ScoreError;
use crate::scoring::{MentionContext, ScoreProvider};
use crate::types::{Action, Capacity, Document, GoldCluster, MentionSpan, Policy, PolicyConfig};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrackedEntity {
    /// `None` for a cell opened on an invalid mention (U-MEM* only).
    pub gold_entity_id: Option<u32>,
    pub remaining_mentions: usize,
    pub last_seen_ordinal: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleState {
    pub tracked: Vec<TrackedEntity>,
    pub capacity: Capacity,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleStep {
    pub mention: MentionSpan,
    pub action: Action,
    /// Mentions of this mention's gold entity still to come after it.
    pub remaining: Option<usize>,
}

impl OracleState {
    fn tracked_position(&self, entity: u32) -> Option<usize> {
        self.tracked
            .iter()
            .position(|t| t.gold_entity_id == Some(entity))
    }

    fn lru_position(&self) -> Option<usize> {
        self.tracked
            .iter()
            .enumerate()
            .min_by_key(|(_, t)| t.last_seen_ordinal)
            .map(|(j, _)| j)
    }
}

fn full_memory_choice(state: &OracleState, policy: Policy, new_count: usize) -> Action {
    let victim = match policy {
        Policy::LearnedBounded => state
            .tracked
            .iter()
            .enumerate()
            .filter(|(_, t)| t.remaining_mentions <= new_count)
            .min_by_key(|(_, t)| (t.remaining_mentions, t.last_seen_ordinal))
            .map(|(j, _)| j),
        Policy::RuleBounded => state
            .lru_position()
            .filter(|&j| state.tracked[j].remaining_mentions <= new_count),
        // unbounded memories are never full
        Policy::Unbounded | Policy::UnboundedStar => None,
    };
    victim.map_or(Action::IgnoreCapacity, Action::EvictAndReplace)
}

/// Oracle decisions with per-step remaining counts, for `mentions` in
/// processing order.
pub fn oracle_trace(
    mentions: &[MentionSpan],
    gold: &[GoldCluster],
    policy: &PolicyConfig,
) -> Vec<OracleStep> {
    let mut entity_of: HashMap<MentionSpan, u32> = HashMap::new();
    let mut size: HashMap<u32, usize> = HashMap::new();
    for c in gold {
        for &m in &c.mentions {
            entity_of.insert(m, c.entity_id);
        }
        *size.entry(c.entity_id).or_insert(0) += c.mentions.len();
    }
    let mut processed: HashMap<u32, usize> = HashMap::new();
    let mut state = OracleState {
        tracked: Vec::new(),
        capacity: policy.capacity,
    };

    let mut steps = Vec::with_capacity(mentions.len());
    for (i, &m) in mentions.iter().enumerate() {
        let Some(&e) = entity_of.get(&m) else {
            let action = if policy.policy == Policy::UnboundedStar {
                state.tracked.push(TrackedEntity {
                    gold_entity_id: None,
                    remaining_mentions: 0,
                    last_seen_ordinal: i,
                });
                Action::NewEntity
            } else {
                Action::IgnoreInvalid
            };
            steps.push(OracleStep {
                mention: m,
                action,
                remaining: None,
            });
            continue;
        };

        let seen = processed.entry(e).or_insert(0);
        *seen += 1;
        let remaining_after = size[&e].saturating_sub(*seen);
        let new_count = remaining_after + 1;
        let fresh = TrackedEntity {
            gold_entity_id: Some(e),
            remaining_mentions: remaining_after,
            last_seen_ordinal: i,
        };

        let action = if let Some(j) = state.tracked_position(e) {
            state.tracked[j] = fresh;
            Action::Coref(j)
        } else if state.capacity.has_room(state.tracked.len()) {
            state.tracked.push(fresh);
            Action::NewEntity
        } else {
            let action = full_memory_choice(&state, policy.policy, new_count);
            if let Action::EvictAndReplace(j) = action {
                state.tracked[j] = fresh;
            }
            action
        };
        steps.push(OracleStep {
            mention: m,
            action,
            remaining: Some(remaining_after),
        });
    }
    steps
}

pub fn oracle_actions(
    mentions: &[MentionSpan],
    gold: &[GoldCluster],
    policy: &PolicyConfig,
) -> Vec<Action> {
    oracle_trace(mentions, gold, policy)
        .into_iter()
        .map(|s| s.action)
        .collect()
}

#[derive(Serialize)]
struct OracleTraceLine<'a> {
    mention: MentionSpan,
    action: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    cell: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    remaining: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    doc_id: Option<&'a str>,
}

/// Oracle trace in the engine's action-trace layout plus a `remaining` field.
pub fn oracle_trace_jsonl(steps: &[OracleStep], doc_id: Option<&str>) -> String {
    let mut out = String::new();
    let mut size = 0usize;
    for s in steps {
        let cell = match s.action {
            Action::NewEntity => {
                size += 1;
                Some(size - 1)
            }
            other => other.cell(),
        };
        let line = OracleTraceLine {
            mention: s.mention,
            action: s.action.tag(),
            cell,
            remaining: s.remaining,
            doc_id,
        };
        out.push_str(&serde_json::to_string(&line).expect("trace lines serialize"));
        out.push('\n');
    }
    out
}

/// Counts of gold mentions kept and dropped by the oracle.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Trackability {
    pub gold_mentions: usize,
    pub ignored_capacity: usize,
}

impl Trackability {
    pub fn fraction(&self) -> f64 {
        if self.gold_mentions == 0 {
            1.0
        } else {
            1.0 - self.ignored_capacity as f64 / self.gold_mentions as f64
        }
    }
}

pub fn document_trackability(doc: &Document, policy: &PolicyConfig) -> Trackability {
    let mentions = doc.candidate_spans();
    let steps = oracle_trace(&mentions, &doc.gold_clusters, policy);
    Trackability {
        gold_mentions: steps.iter().filter(|s| s.remaining.is_some()).count(),
        ignored_capacity: steps
            .iter()
            .filter(|s| s.action == Action::IgnoreCapacity)
            .count(),
    }
}

/// Fraction of gold mentions the oracle keeps (anything but
/// `IgnoreCapacity`) over a corpus.
pub fn oracle_trackable_fraction<'a>(
    corpus: impl IntoIterator<Item = &'a Document>,
    policy: &PolicyConfig,
) -> f64 {
    let mut total = Trackability::default();
    for doc in corpus {
        let t = document_trackability(doc, policy);
        total.gold_mentions += t.gold_mentions;
        total.ignored_capacity += t.ignored_capacity;
    }
    total.fraction()
}

/// Scores that force the engine to reproduce a given action sequence: +1/-1
/// coreference scores, and remaining/mention scores arranged so the
/// second-step argmin lands on the intended outcome.
#[derive(Clone, Debug)]
pub struct TeacherForcedScorer {
    actions: Vec<Action>,
}

impl TeacherForcedScorer {
    pub fn new(actions: Vec<Action>) -> Self {
        Self { actions }
    }

    fn action(&self, ctx: &MentionContext<'_>) -> Result<Action, ScoreError> {
        self.actions
            .get(ctx.index)
            .copied()
            .ok_or_else(|| ScoreError::ShapeMismatch {
                mention: ctx.index,
                detail: "no forced action for mention".into(),
            })
    }
}

impl ScoreProvider for TeacherForcedScorer {
    fn mention_score(&mut self, ctx: &MentionContext<'_>) -> Result<f64, ScoreError> {
        Ok(match self.action(ctx)? {
            Action::IgnoreInvalid => -1.0,
            _ => 1.0,
        })
    }

    fn coref_score(
        &mut self,
        ctx: &MentionContext<'_>,
        position: usize,
        _: &EntityCell,
    ) -> Result<f64, ScoreError> {
        Ok(if self.action(ctx)? == Action::Coref(position) {
            1.0
        } else {
            -1.0
        })
    }

    fn cell_remaining_score(
        &mut self,
        ctx: &MentionContext<'_>,
        position: usize,
        _: &EntityCell,
    ) -> Result<f64, ScoreError> {
        Ok(if self.action(ctx)? == Action::EvictAndReplace(position) {
            0.0
        } else {
            2.0
        })
    }

    fn mention_remaining_score(&mut self, ctx: &MentionContext<'_>) -> Result<f64, ScoreError> {
        Ok(match self.action(ctx)? {
            Action::IgnoreCapacity | Action::IgnoreInvalid => 0.0,
            _ => 1.0,
        })
    }
}
