use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use memcoref::ingest::read_file;
use memcoref::{CorpusFormat, Document};
use rayon::prelude::*;

use crate::failure::{Failure, Kind};
use crate::{InputArgs, InputFormat};

fn expand(inputs: &[PathBuf]) -> Result<Vec<PathBuf>, Failure> {
    let mut out = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut files: Vec<PathBuf> = fs::read_dir(p)
                .map_err(|e| Failure::new(Kind::Parse, format!("{}: {e}", p.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file())
                .collect();
            files.sort();
            out.extend(files);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

pub fn format_of(path: &Path, explicit: Option<InputFormat>) -> CorpusFormat {
    match explicit {
        Some(InputFormat::Conll) => CorpusFormat::Conll2012,
        Some(InputFormat::Jsonl) => CorpusFormat::JsonLines,
        None => match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl" | "json") => CorpusFormat::JsonLines,
            _ => CorpusFormat::Conll2012,
        },
    }
}

/// Reads every input, sorted by doc_id (stable, so equal ids keep input
/// order).
pub fn load(args: &InputArgs) -> Result<Vec<Document>, Failure> {
    let mut docs = Vec::new();
    for path in expand(&args.inputs)? {
        docs.extend(read_file(format_of(&path, args.format), &path)?);
    }
    docs.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
    if let Some(w) = docs.windows(2).find(|w| w[0].doc_id == w[1].doc_id) {
        return Err(Failure::new(
            Kind::Parse,
            format!("duplicate doc_id {}", w[0].doc_id),
        ));
    }
    Ok(docs)
}

/// Maps `f` over documents on a pool of `jobs` workers. Output order follows
/// input order whatever the completion order.
pub fn par_map<T, F>(jobs: usize, docs: &[Document], f: F) -> Result<Vec<T>, Failure>
where
    T: Send,
    F: Fn(&Document) -> Result<T, Failure> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Failure::new(Kind::Config, e.to_string()))?;
    pool.install(|| docs.par_iter().map(&f).collect())
}

pub fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Failure::write(dir, e))?;
    }
    let mut f = fs::File::create(path).map_err(|e| Failure::write(path, e))?;
    f.write_all(text.as_bytes())
        .map_err(|e| Failure::write(path, e))
}
