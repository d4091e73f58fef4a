use std::path::PathBuf;

use clap::Args;
use memcoref::synthetic::{long_document, synthetic_corpus, SyntheticParams};
use memcoref::to_jsonl;

use crate::corpus::write_text;
use crate::failure::Failure;

#[derive(Args, Debug)]
pub struct SynthArgs {
    /// Seed for the generator; the same seed always yields the same corpus.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    docs: usize,
    #[arg(long, default_value_t = 64)]
    max_tokens: usize,
    #[arg(long, default_value_t = 8)]
    max_entities: usize,
    #[arg(long, default_value_t = 20)]
    max_mentions: usize,
    #[arg(long, default_value_t = 3)]
    max_span_len: usize,
    /// Upper bound on non-gold candidate mentions per document.
    #[arg(long, default_value_t = 0)]
    max_invalid: usize,
    /// Emit a single long document with this many mentions instead.
    #[arg(long)]
    long: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

pub fn execute(args: &SynthArgs) -> Result<(), Failure> {
    let docs = match args.long {
        Some(n) => vec![long_document(args.seed, n)],
        None => synthetic_corpus(
            args.seed,
            args.docs,
            &SyntheticParams {
                max_tokens: args.max_tokens,
                max_entities: args.max_entities,
                max_mentions: args.max_mentions,
                max_span_len: args.max_span_len,
                max_invalid: args.max_invalid,
            },
        ),
    };
    let mut text = String::new();
    for d in &docs {
        text.push_str(&to_jsonl(d));
        text.push('\n');
    }
    write_text(&args.out, &text)
}
