//! # memcoref
//!
//! Incremental coreference clustering with a bounded entity memory.
//!
//! Mentions are processed left to right. Each one either joins a tracked
//! entity, opens a new one, evicts a tracked entity, or is ignored (for lack
//! of capacity, or as an invalid mention). Four memory policies are
//! provided: unbounded (`U-MEM`), unbounded-with-all-mentions (`U-MEM*`),
//! learned-bounded (`LB-MEM`) and LRU rule-bounded (`RB-MEM`).
//!
//! The learned scoring functions are abstracted behind [`ScoreProvider`];
//! deterministic providers (gold oracle, string match, replay of recorded
//! scores) ship with the crate.
//!
//! ## Modules
//!
//! - [`types`]: spans, documents, actions, policy configuration
//! - [`ingest`]: CoNLL-2012 and JSON-lines readers, mention ordering
//! - [`analytics`]: entity spread, active entity counts, histograms, Spearman
//! - [`scoring`]: score providers and top-span proposal
//! - [`engine`]: the clustering state machine
//! - [`oracle`]: teacher-forcing ground-truth actions
//! - [`metrics`]: MUC, B³, CEAF-φ4, CoNLL F1
//!
//! ```
//! use memcoref::{gold_scorer, run_document, score_document, Document, GoldCluster, MentionSpan};
//! use memcoref::{PolicyConfig, SingletonMode};
//!
//! let s = MentionSpan::new;
//! let doc = Document::with_gold(
//!     "demo",
//!     "Ann saw Bob . She waved".split(' ').map(String::from).collect(),
//!     vec![GoldCluster::new(0, vec![s(0, 0), s(4, 4)]), GoldCluster::new(1, vec![s(2, 2)])],
//! );
//! let mentions = doc.candidate_spans();
//! let mut scorer = gold_scorer(&doc);
//! let out = run_document(&doc, &mentions, &mut scorer, &PolicyConfig::learned(1)).unwrap();
//! let gold: Vec<_> = doc.gold_clusters.iter().map(|c| c.mentions.clone()).collect();
//! let report = score_document(&gold, &out.predicted_clusters, SingletonMode::KeepSingletons);
//! assert!(report.conll_f1 < 1.0); // one cell cannot hold Ann across Bob
//! ```

pub mod analytics;
pub mod assignment;
pub mod engine;
pub mod error;
pub mod ingest;
pub mod metrics;
pub mod oracle;
pub mod scoring;
pub mod synthetic;
pub mod types;

pub use analytics::{
    active_entity_count, doc_stats, entity_spread, max_active_entities, spearman, spread_histogram,
    CorpusSummary, DocStats,
};
pub use engine::{
    run_document, step, update_entity, ClusteringResult, EntityCell, MemoryState, RunStats,
};
pub use error::{AnalyticsError, ConfigError, EngineError, IngestError, ScoreError};
pub use ingest::{
    order_mentions, parse_conll, parse_jsonl, to_jsonl, ClusterRecord, CorpusFormat, CorpusSource,
};
pub use metrics::{
    b_cubed, ceaf_phi4, conll_f1, muc, score_document, CorpusScorer, ScoreReport, PRF,
};
pub use oracle::{oracle_actions, oracle_trace, oracle_trackable_fraction, TeacherForcedScorer};
pub use scoring::{
    gold_scorer, propose_top_spans, replay_scorer, string_match_scorer, GoldScorer, MentionContext,
    RecordingScorer, ReplayScorer, ScoreProvider, StringMatchConfig, StringMatchScorer,
};
pub use types::{
    validate_document, Action, Candidate, Capacity, Document, GoldCluster, MentionSpan, Policy,
    PolicyConfig, SingletonMode,
};
