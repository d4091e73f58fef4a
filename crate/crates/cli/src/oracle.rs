use std::path::PathBuf;

use clap::Args;
use memcoref::oracle::{document_trackability, oracle_trace, oracle_trace_jsonl, Trackability};
use memcoref::PolicyConfig;

use crate::corpus::{load, par_map, write_text};
use crate::failure::Failure;
use crate::run::{policy_config, PolicyArg};
use crate::{InputArgs, SingletonArg};

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value = "lb")]
    policy: PolicyArg,
    /// One or more capacities, comma separated (bounded policies only).
    #[arg(long, value_delimiter = ',')]
    capacity: Vec<usize>,
    #[arg(long, value_enum, default_value = "keep")]
    singletons: SingletonArg,
    /// Directory for per-capacity oracle traces.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn execute(args: &OracleArgs) -> Result<(), Failure> {
    let capacities: Vec<Option<usize>> = if args.capacity.is_empty() {
        vec![None]
    } else {
        args.capacity.iter().copied().map(Some).collect()
    };
    let policies: Vec<(Option<usize>, PolicyConfig)> = capacities
        .iter()
        .map(|&c| policy_config(args.policy, c, args.singletons).map(|p| (c, p)))
        .collect::<Result<_, _>>()?;
    let docs = load(&args.input)?;

    println!(
        "{:<10} {:>10} {:>10} {:>10}",
        "Capacity", "Gold", "Ignored", "Trackable"
    );
    for (cap, policy) in &policies {
        let per_doc: Vec<(Trackability, String)> = par_map(args.input.jobs, &docs, |doc| {
            let trace = match &args.out {
                Some(_) => oracle_trace_jsonl(
                    &oracle_trace(&doc.candidate_spans(), &doc.gold_clusters, policy),
                    Some(&doc.doc_id),
                ),
                None => String::new(),
            };
            Ok((document_trackability(doc, policy), trace))
        })?;
        let mut total = Trackability::default();
        let mut text = String::new();
        for (t, trace) in &per_doc {
            total.gold_mentions += t.gold_mentions;
            total.ignored_capacity += t.ignored_capacity;
            text.push_str(trace);
        }
        let label = cap.map_or_else(|| "inf".to_string(), |c| c.to_string());
        println!(
            "{:<10} {:>10} {:>10} {:>10.4}",
            label,
            total.gold_mentions,
            total.ignored_capacity,
            total.fraction()
        );
        if let Some(dir) = &args.out {
            std::fs::create_dir_all(dir).map_err(|e| Failure::write(dir, e))?;
            write_text(&dir.join(format!("oracle_c{label}.jsonl")), &text)?;
        }
    }
    Ok(())
}
