use std::fs;
use std::path::PathBuf;

use clap::Args;
use memcoref::analytics::{summarize, HistogramBucket};
use memcoref::{doc_stats, spread_histogram, DocStats};

use crate::corpus::{load, par_map};
use crate::failure::Failure;
use crate::InputArgs;

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Number of spread-histogram buckets.
    #[arg(long, default_value_t = 10)]
    buckets: usize,
    /// Leave single-mention entities out of the histogram.
    #[arg(long)]
    exclude_singletons: bool,
    /// Directory for doc_stats.csv and spread_histogram.csv.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn execute(args: &AnalyzeArgs) -> Result<(), Failure> {
    let docs = load(&args.input)?;
    let stats: Vec<DocStats> = par_map(args.input.jobs, &docs, |d| Ok(doc_stats(d)))?;
    let summary = summarize(&stats);
    let histogram = spread_histogram(&docs, args.buckets, args.exclude_singletons);

    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).map_err(|e| Failure::write(dir, e))?;
        write_doc_stats(&dir.join("doc_stats.csv"), &stats)?;
        write_histogram(&dir.join("spread_histogram.csv"), &histogram)?;
    }

    println!("Documents: {}", summary.documents);
    println!(
        "Max Active: {}, Max Total: {}",
        summary.max_active, summary.max_total
    );
    println!(
        "Max Active (non-singleton): {}, Max Total (non-singleton): {}",
        summary.max_active_non_singleton, summary.max_total_non_singleton
    );
    Ok(())
}

fn write_doc_stats(path: &std::path::Path, stats: &[DocStats]) -> Result<(), Failure> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Failure::write(path, e))?;
    for s in stats {
        w.serialize(s).map_err(|e| Failure::write(path, e))?;
    }
    if stats.is_empty() {
        w.write_record([
            "doc_id",
            "mae",
            "mae_non_singleton",
            "total_entities",
            "non_singleton_entities",
            "doc_len",
        ])
        .map_err(|e| Failure::write(path, e))?;
    }
    w.flush().map_err(|e| Failure::write(path, e))
}

fn write_histogram(path: &std::path::Path, buckets: &[HistogramBucket]) -> Result<(), Failure> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Failure::write(path, e))?;
    w.write_record(["bucket_lo", "bucket_hi", "count"])
        .map_err(|e| Failure::write(path, e))?;
    for b in buckets {
        w.write_record([b.lo.to_string(), b.hi.to_string(), b.count.to_string()])
            .map_err(|e| Failure::write(path, e))?;
    }
    w.flush().map_err(|e| Failure::write(path, e))
}
