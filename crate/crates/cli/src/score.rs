use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use memcoref::ingest::{parse_cluster_file, read_file};
use memcoref::metrics::filter_singletons;
use memcoref::{score_document, spearman, ClusterRecord, CorpusScorer, ScoreReport, SingletonMode};
use serde::Serialize;

use crate::corpus::write_text;
use crate::failure::{Failure, Kind};
use crate::SingletonArg;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GoldFormat {
    /// Cluster JSON lines, as written by `run --out`.
    Clusters,
    Jsonl,
    Conll,
}

#[derive(Args, Debug)]
pub struct ScoreArgs {
    gold: PathBuf,
    /// Predicted clusters (cluster JSON lines).
    pred: PathBuf,
    #[arg(long, value_enum, default_value = "keep")]
    singletons: SingletonArg,
    /// Layout of the gold file.
    #[arg(long, value_enum, default_value = "clusters")]
    format: GoldFormat,
    /// Also write the report as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

fn read_clusters(path: &Path) -> Result<Vec<ClusterRecord>, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::new(Kind::Parse, format!("{}: {e}", path.display())))?;
    parse_cluster_file(&text)
        .map_err(|e| Failure::new(Kind::Parse, format!("{}:{e}", path.display())))
}

fn read_gold(path: &Path, format: GoldFormat) -> Result<Vec<ClusterRecord>, Failure> {
    let docs = match format {
        GoldFormat::Clusters => return read_clusters(path),
        GoldFormat::Jsonl => read_file(memcoref::CorpusFormat::JsonLines, path)?,
        GoldFormat::Conll => read_file(memcoref::CorpusFormat::Conll2012, path)?,
    };
    Ok(docs.iter().map(ClusterRecord::gold_of).collect())
}

fn by_id(
    records: Vec<ClusterRecord>,
    path: &Path,
) -> Result<BTreeMap<String, ClusterRecord>, Failure> {
    let mut out = BTreeMap::new();
    for r in records {
        let id = r.doc_id.clone();
        if out.insert(id.clone(), r).is_some() {
            return Err(Failure::new(
                Kind::Alignment,
                format!("{}: duplicate doc_id {id}", path.display()),
            ));
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct DocScore<'a> {
    doc_id: &'a str,
    conll_f1: f64,
    doc_len: Option<usize>,
    entities: usize,
}

#[derive(Serialize)]
struct Correlations {
    f1_vs_doc_len: Option<f64>,
    f1_vs_entities: Option<f64>,
}

#[derive(Serialize)]
struct ScoreOutput<'a> {
    report: ScoreReport,
    documents: Vec<DocScore<'a>>,
    spearman: Correlations,
}

pub fn execute(args: &ScoreArgs) -> Result<(), Failure> {
    let gold = by_id(read_gold(&args.gold, args.format)?, &args.gold)?;
    let pred = by_id(read_clusters(&args.pred)?, &args.pred)?;

    let missing: Vec<&str> = gold
        .keys()
        .filter(|k| !pred.contains_key(*k))
        .map(String::as_str)
        .collect();
    let extra: Vec<&str> = pred
        .keys()
        .filter(|k| !gold.contains_key(*k))
        .map(String::as_str)
        .collect();
    if !missing.is_empty() || !extra.is_empty() {
        let mut msg = String::from("doc_ids do not align");
        if !missing.is_empty() {
            msg.push_str(&format!(
                "; missing from predictions: {}",
                missing.join(", ")
            ));
        }
        if !extra.is_empty() {
            msg.push_str(&format!("; not in gold: {}", extra.join(", ")));
        }
        return Err(Failure::new(Kind::Alignment, msg));
    }

    let mode: SingletonMode = args.singletons.into();
    let mut corpus = CorpusScorer::new();
    let mut documents = Vec::new();
    for (id, g) in &gold {
        let p = &pred[id];
        corpus.add_document(&g.clusters, &p.clusters, mode);
        documents.push(DocScore {
            doc_id: id,
            conll_f1: score_document(&g.clusters, &p.clusters, mode).conll_f1,
            doc_len: g.doc_len.or(p.doc_len),
            entities: filter_singletons(&g.clusters, mode).len(),
        });
    }
    let report = corpus.report();

    let f1s: Vec<f64> = documents.iter().map(|d| d.conll_f1).collect();
    let lens: Option<Vec<f64>> = documents
        .iter()
        .map(|d| d.doc_len.map(|l| l as f64))
        .collect();
    let entities: Vec<f64> = documents.iter().map(|d| d.entities as f64).collect();
    let correlations = Correlations {
        f1_vs_doc_len: lens.and_then(|l| spearman(&f1s, &l).ok()),
        f1_vs_entities: spearman(&f1s, &entities).ok(),
    };

    print!("{}", report.table());
    let show = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |r| format!("{r:.3}"));
    println!(
        "Spearman (F1, document length): {}",
        show(correlations.f1_vs_doc_len)
    );
    println!(
        "Spearman (F1, entity count): {}",
        show(correlations.f1_vs_entities)
    );

    if let Some(path) = &args.json {
        let out = ScoreOutput {
            report,
            documents,
            spearman: correlations,
        };
        let mut text = serde_json::to_string_pretty(&out).expect("score output serializes");
        text.push('\n');
        write_text(path, &text)?;
    }
    Ok(())
}
