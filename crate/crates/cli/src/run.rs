use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use memcoref::engine::TraceRecord;
use memcoref::scoring::{parse_score_rows, write_score_rows, ScoreRow};
use memcoref::{
    gold_scorer, run_document, string_match_scorer, Capacity, ClusterRecord, ClusteringResult,
    Document, Policy, PolicyConfig, RecordingScorer, ReplayScorer, RunStats, ScoreProvider,
    StringMatchConfig,
};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::corpus::{load, par_map, write_text};
use crate::failure::{Failure, Kind};
use crate::{InputArgs, SingletonArg};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyArg {
    Unbounded,
    Ustar,
    Lb,
    Rb,
}

impl From<PolicyArg> for Policy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Unbounded => Policy::Unbounded,
            PolicyArg::Ustar => Policy::UnboundedStar,
            PolicyArg::Lb => Policy::LearnedBounded,
            PolicyArg::Rb => Policy::RuleBounded,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScorerSpec {
    Gold,
    StringMatch,
    Replay(PathBuf),
}

impl fmt::Display for ScorerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScorerSpec::Gold => f.write_str("gold"),
            ScorerSpec::StringMatch => f.write_str("string-match"),
            ScorerSpec::Replay(p) => write!(f, "replay:{}", p.display()),
        }
    }
}

fn parse_scorer(s: &str) -> Result<ScorerSpec, String> {
    match s {
        "gold" => Ok(ScorerSpec::Gold),
        "string-match" => Ok(ScorerSpec::StringMatch),
        _ => match s.strip_prefix("replay:") {
            Some(p) if !p.is_empty() => Ok(ScorerSpec::Replay(PathBuf::from(p))),
            _ => Err("expected gold, string-match or replay:PATH".into()),
        },
    }
}

#[derive(Args, Debug)]
pub struct RunArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value = "unbounded")]
    policy: PolicyArg,
    /// Memory capacity; required for lb and rb, rejected for the unbounded policies.
    #[arg(long)]
    capacity: Option<usize>,
    /// gold, string-match or replay:PATH
    #[arg(long, default_value = "gold", value_parser = parse_scorer)]
    scorer: ScorerSpec,
    #[arg(long, value_enum, default_value = "keep")]
    singletons: SingletonArg,
    /// Predicted clusters, one JSON line per document.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Action trace, one JSON line per mention.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Record every score the engine consumed, in the replay format.
    #[arg(long)]
    record_scores: Option<PathBuf>,
    /// Run manifest: configuration, tool version and per-document digests.
    #[arg(long)]
    manifest: Option<PathBuf>,
}

pub fn policy_config(
    policy: PolicyArg,
    capacity: Option<usize>,
    singletons: SingletonArg,
) -> Result<PolicyConfig, Failure> {
    let capacity = capacity.map_or(Capacity::Unbounded, Capacity::Finite);
    let config = PolicyConfig::new(policy.into(), capacity, singletons.into());
    config.validate()?;
    Ok(config)
}

/// Replay rows split by document.
struct ReplayRows {
    by_doc: HashMap<String, Vec<ScoreRow>>,
    untagged: Vec<ScoreRow>,
}

impl ReplayRows {
    fn read(path: &PathBuf, docs: &[Document]) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::new(Kind::Parse, format!("{}: {e}", path.display())))?;
        let rows = parse_score_rows(&text)
            .map_err(|e| Failure::new(Kind::Parse, format!("{}: {e}", path.display())))?;
        let mut out = ReplayRows {
            by_doc: HashMap::new(),
            untagged: Vec::new(),
        };
        for r in rows {
            match &r.doc_id {
                Some(id) => out.by_doc.entry(id.clone()).or_default().push(r),
                None => out.untagged.push(r),
            }
        }
        if !out.untagged.is_empty() && (docs.len() > 1 || !out.by_doc.is_empty()) {
            return Err(Failure::new(
                Kind::Replay,
                "score rows without doc_id can only replay a single-document corpus",
            ));
        }
        Ok(out)
    }

    fn scorer_for(&self, doc: &Document) -> ReplayScorer {
        let rows = match self.by_doc.get(&doc.doc_id) {
            Some(rows) => rows.clone(),
            None => self.untagged.clone(),
        };
        ReplayScorer::from_rows(rows)
    }
}

struct DocOutput {
    result: ClusteringResult,
    rows: Vec<ScoreRow>,
    doc_len: usize,
}

fn drive<S: ScoreProvider>(
    doc: &Document,
    scorer: S,
    policy: &PolicyConfig,
    record: bool,
) -> Result<DocOutput, Failure> {
    let mentions = doc.candidate_spans();
    let (result, rows) = if record {
        let mut rec = RecordingScorer::new(scorer).tagged();
        let r = run_document(doc, &mentions, &mut rec, policy);
        (r, rec.into_rows())
    } else {
        let mut scorer = scorer;
        (
            run_document(doc, &mentions, &mut scorer, policy),
            Vec::new(),
        )
    };
    let result = result.map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", doc.doc_id, f.message);
        f
    })?;
    Ok(DocOutput {
        result,
        rows,
        doc_len: doc.len(),
    })
}

#[derive(Serialize)]
struct TraceLine<'a> {
    doc_id: &'a str,
    #[serde(flatten)]
    record: &'a TraceRecord,
}

#[derive(Serialize)]
struct ManifestConfig {
    policy: PolicyArg,
    capacity: Option<usize>,
    scorer: String,
    singletons: &'static str,
    inputs: Vec<String>,
    format: Option<&'static str>,
    seed: Option<u64>,
}

#[derive(Serialize)]
struct DocDigest<'a> {
    doc_id: &'a str,
    sha256: String,
}

#[derive(Serialize)]
struct RunManifest<'a> {
    tool: &'static str,
    version: &'static str,
    config: ManifestConfig,
    documents: Vec<DocDigest<'a>>,
}

pub fn execute(args: &RunArgs) -> Result<(), Failure> {
    let policy = policy_config(args.policy, args.capacity, args.singletons)?;
    let docs = load(&args.input)?;
    let record = args.record_scores.is_some();
    let replay = match &args.scorer {
        ScorerSpec::Replay(path) => Some(ReplayRows::read(path, &docs)?),
        _ => None,
    };

    let outputs = par_map(args.input.jobs, &docs, |doc| match &args.scorer {
        ScorerSpec::Gold => drive(doc, gold_scorer(doc), &policy, record),
        ScorerSpec::StringMatch => drive(
            doc,
            string_match_scorer(StringMatchConfig::default()),
            &policy,
            record,
        ),
        ScorerSpec::Replay(_) => {
            let rows = replay
                .as_ref()
                .expect("replay rows are loaded for replay scorers");
            drive(doc, rows.scorer_for(doc), &policy, record)
        }
    })?;

    let mut clusters_text = String::new();
    let mut trace_text = String::new();
    let mut digests = Vec::new();
    let mut rows = Vec::new();
    for out in &outputs {
        let r = &out.result;
        let cluster_line = serde_json::to_string(&ClusterRecord {
            doc_id: r.doc_id.clone(),
            clusters: r.predicted_clusters.clone(),
            doc_len: Some(out.doc_len),
        })
        .expect("cluster records serialize");
        let mut doc_trace = String::new();
        for record in r.trace() {
            let line = TraceLine {
                doc_id: &r.doc_id,
                record: &record,
            };
            doc_trace.push_str(&serde_json::to_string(&line).expect("trace lines serialize"));
            doc_trace.push('\n');
        }
        let mut h = Sha256::new();
        h.update(cluster_line.as_bytes());
        h.update(b"\n");
        h.update(doc_trace.as_bytes());
        digests.push(DocDigest {
            doc_id: &r.doc_id,
            sha256: hex::encode(h.finalize()),
        });
        clusters_text.push_str(&cluster_line);
        clusters_text.push('\n');
        trace_text.push_str(&doc_trace);
        rows.extend(out.rows.iter().cloned());
    }

    if let Some(p) = &args.out {
        write_text(p, &clusters_text)?;
    }
    if let Some(p) = &args.trace {
        write_text(p, &trace_text)?;
    }
    if let Some(p) = &args.record_scores {
        write_text(p, &write_score_rows(&rows))?;
    }
    if let Some(p) = &args.manifest {
        let manifest = RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            config: ManifestConfig {
                policy: args.policy,
                capacity: args.capacity,
                scorer: args.scorer.to_string(),
                singletons: match args.singletons {
                    SingletonArg::Keep => "keep",
                    SingletonArg::Drop => "drop",
                },
                inputs: args
                    .input
                    .inputs
                    .iter()
                    .map(|p| p.display().to_string())
                    .collect(),
                format: args.input.format.map(|f| match f {
                    crate::InputFormat::Conll => "conll",
                    crate::InputFormat::Jsonl => "jsonl",
                }),
                seed: None,
            },
            documents: digests,
        };
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        write_text(p, &text)?;
    }

    let stats: Vec<&RunStats> = outputs.iter().map(|o| &o.result.stats).collect();
    print!("{}", stats_table(&policy, &stats));
    Ok(())
}

/// Memory occupancy and ignored-mention summary over the corpus.
fn stats_table(policy: &PolicyConfig, stats: &[&RunStats]) -> String {
    let n = stats.len();
    let mean = |f: &dyn Fn(&RunStats) -> f64| {
        if n == 0 {
            0.0
        } else {
            stats.iter().map(|s| f(s)).sum::<f64>() / n as f64
        }
    };
    let avg_entities = mean(&|s| s.avg_entities_in_memory);
    let max_entities = stats
        .iter()
        .map(|s| s.max_entities_in_memory)
        .max()
        .unwrap_or(0);
    let ignored_cap = mean(&|s| s.ignored_capacity_count as f64);
    let ignored_inv = mean(&|s| s.ignored_invalid_count as f64);
    let evictions = mean(&|s| s.eviction_count as f64);
    let total = |f: &dyn Fn(&RunStats) -> usize| stats.iter().map(|s| f(s)).sum::<usize>();

    let mut out = String::new();
    out.push_str(&format!(
        "{:<8} {:>8} {:>9} {:>12} {:>12} {:>16} {:>16} {:>10}\n",
        "Policy",
        "Capacity",
        "Documents",
        "Avg. in mem",
        "Max in mem",
        "Ignored (cap.)",
        "Ignored (inv.)",
        "Evictions"
    ));
    out.push_str(&format!(
        "{:<8} {:>8} {:>9} {:>12.1} {:>12} {:>16.1} {:>16.1} {:>10.1}\n",
        policy.policy.to_string(),
        policy.capacity.to_string(),
        n,
        avg_entities,
        max_entities,
        ignored_cap,
        ignored_inv,
        evictions
    ));
    out.push_str(&format!(
        "Totals: ignored (capacity) {}, ignored (invalid) {}, evictions {}\n",
        total(&|s| s.ignored_capacity_count),
        total(&|s| s.ignored_invalid_count),
        total(&|s| s.eviction_count)
    ));
    out
}
