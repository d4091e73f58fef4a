//! Acceptance suite. Prints one PASS/FAIL/SKIP line per criterion and exits
//! non-zero if any criterion fails.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use memcoref::analytics::{doc_stats, max_active_entities, summarize};
use memcoref::assignment::max_weight_assignment;
use memcoref::engine::{run_document, trace_jsonl};
use memcoref::ingest::read_file;
use memcoref::metrics::{
    b_cubed, b_cubed_counts, ceaf_phi4, muc, muc_counts, phi4, phi4_matrix, Cluster,
};
use memcoref::oracle::{oracle_actions, TeacherForcedScorer};
use memcoref::scoring::{parse_score_rows, write_score_rows};
use memcoref::synthetic::{long_document, synthetic_corpus, SyntheticParams};
use memcoref::{
    gold_scorer, string_match_scorer, Action, Capacity, CorpusFormat, CorpusScorer, Document,
    MentionSpan, Policy, PolicyConfig, RecordingScorer, ReplayScorer, SingletonMode,
    StringMatchConfig, PRF,
};

type Outcome = Result<String, String>;
type Criterion = Box<dyn Fn() -> Option<Outcome>>;

fn check(cond: bool, ok: impl Into<String>, fail: impl Into<String>) -> Outcome {
    if cond {
        Ok(ok.into())
    } else {
        Err(fail.into())
    }
}

fn gold_of(doc: &Document) -> Vec<Cluster> {
    doc.gold_clusters
        .iter()
        .map(|c| c.mentions.clone())
        .collect()
}

fn canonical(clusters: &[Cluster]) -> Vec<Cluster> {
    let mut out: Vec<Cluster> = clusters
        .iter()
        .map(|c| {
            let mut c = c.clone();
            c.sort();
            c
        })
        .collect();
    out.sort();
    out
}

fn small_corpus() -> Vec<Document> {
    // ≤ 64 tokens, ≤ 8 entities, ≤ 20 mentions
    synthetic_corpus(2024, 500, &SyntheticParams::default())
}

/// A metric is perfect on a document if every defined ratio is exactly 1.
/// MUC has no links to count on all-singleton documents, so both of its
/// denominators are zero there; the partition-identity check covers those.
fn perfect_where_defined(gold: &[Cluster], pred: &[Cluster]) -> bool {
    let m = muc_counts(gold, pred);
    let muc_ok = if m.recall_den == 0.0 && m.precision_den == 0.0 {
        true
    } else {
        muc(gold, pred).f1 == 1.0
    };
    muc_ok && b_cubed(gold, pred).f1 == 1.0 && ceaf_phi4(gold, pred).f1 == 1.0
}

fn criterion_1() -> Outcome {
    let t0 = Instant::now();
    let corpus = small_corpus();
    let mut corpus_scores = CorpusScorer::new();
    for doc in &corpus {
        let mentions = doc.candidate_spans();
        let run = run_document(
            doc,
            &mentions,
            &mut gold_scorer(doc),
            &PolicyConfig::unbounded(),
        )
        .map_err(|e| e.to_string())?;
        let gold = gold_of(doc);
        if canonical(&run.predicted_clusters) != canonical(&gold) {
            return Err(format!("{}: clusters differ from gold", doc.doc_id));
        }
        if !perfect_where_defined(&gold, &run.predicted_clusters) {
            return Err(format!("{}: a metric is below 1.0", doc.doc_id));
        }
        corpus_scores.add_document(
            &gold,
            &run.predicted_clusters,
            SingletonMode::KeepSingletons,
        );
    }
    let r = corpus_scores.report();
    let elapsed = t0.elapsed();
    let all_one = [r.muc, r.b_cubed, r.ceaf_phi4]
        .iter()
        .all(|m| m.precision == 1.0 && m.recall == 1.0 && m.f1 == 1.0);
    check(
        all_one && elapsed < Duration::from_secs(5),
        format!(
            "500 docs, MUC = B3 = CEAF = 1.0 exactly, {:.2}s",
            elapsed.as_secs_f64()
        ),
        format!("report {r:?}, {:.2}s", elapsed.as_secs_f64()),
    )
}

fn criterion_2() -> Outcome {
    let corpus = small_corpus();
    let mut all_singleton_docs = 0;
    for doc in &corpus {
        let mentions = doc.candidate_spans();
        let cap = max_active_entities(doc).max(1);
        let policy = PolicyConfig::learned(cap);
        let actions = oracle_actions(&mentions, &doc.gold_clusters, &policy);
        if actions.contains(&Action::IgnoreCapacity) {
            return Err(format!(
                "{}: oracle ignored a mention at capacity {cap}",
                doc.doc_id
            ));
        }
        let gold = gold_of(doc);
        let forced = run_document(
            doc,
            &mentions,
            &mut TeacherForcedScorer::new(actions.clone()),
            &policy,
        )
        .map_err(|e| e.to_string())?;
        let scored = run_document(doc, &mentions, &mut gold_scorer(doc), &policy)
            .map_err(|e| e.to_string())?;
        for (what, run) in [("teacher-forced", &forced), ("gold-scored", &scored)] {
            if run.stats.ignored_capacity_count != 0 {
                return Err(format!("{}: {what} engine ignored a mention", doc.doc_id));
            }
            if canonical(&run.predicted_clusters) != canonical(&gold) {
                return Err(format!("{}: {what} clusters differ from gold", doc.doc_id));
            }
            if !perfect_where_defined(&gold, &run.predicted_clusters) {
                return Err(format!("{}: {what} CoNLL F1 below 100", doc.doc_id));
            }
        }
        if muc_counts(&gold, &gold).recall_den == 0.0 {
            all_singleton_docs += 1;
        }
    }
    Ok(format!(
        "500 docs at capacity max(1, MAE): 0 ignored, clusters = gold ({all_singleton_docs} all-singleton docs have no MUC links)"
    ))
}

fn ignored_total(corpus: &[Document], policy: PolicyConfig) -> usize {
    corpus
        .iter()
        .map(|doc| {
            oracle_actions(&doc.candidate_spans(), &doc.gold_clusters, &policy)
                .into_iter()
                .filter(|a| *a == Action::IgnoreCapacity)
                .count()
        })
        .sum()
}

fn criterion_3() -> Outcome {
    let p = SyntheticParams {
        max_tokens: 400,
        max_entities: 40,
        max_mentions: 120,
        max_span_len: 3,
        max_invalid: 0,
    };
    let corpus = synthetic_corpus(77, 200, &p);
    let n = corpus.len() as f64;
    let lb5 = ignored_total(&corpus, PolicyConfig::learned(5));
    let rb5 = ignored_total(&corpus, PolicyConfig::rule(5));
    let rb10 = ignored_total(&corpus, PolicyConfig::rule(10));
    let rb20 = ignored_total(&corpus, PolicyConfig::rule(20));
    let summary = format!(
        "mean ignored at 5: LB {:.2} vs RB {:.2}; RB 20/10/5: {:.2}/{:.2}/{:.2}",
        lb5 as f64 / n,
        rb5 as f64 / n,
        rb20 as f64 / n,
        rb10 as f64 / n,
        rb5 as f64 / n
    );
    check(
        lb5 <= rb5 && rb20 <= rb10 && rb10 <= rb5,
        summary.clone(),
        summary,
    )
}

fn criterion_4() -> Outcome {
    let sp = |i: usize| MentionSpan::new(i, i);
    let cl = |s: &str| -> Cluster { s.bytes().map(|b| sp((b - b'a') as usize)).collect() };
    let cls = |v: &[&str]| -> Vec<Cluster> { v.iter().map(|s| cl(s)).collect() };
    type Metric = fn(&[Cluster], &[Cluster]) -> PRF;
    // name, metric, gold, pred, precision, recall; all hand-computed
    type Fixture = (&'static str, Metric, Vec<Cluster>, Vec<Cluster>, f64, f64);
    let fixtures: Vec<Fixture> = vec![
        (
            "muc identical",
            muc,
            cls(&["abc", "de"]),
            cls(&["abc", "de"]),
            1.0,
            1.0,
        ),
        ("muc split", muc, cls(&["abc"]), cls(&["ab", "c"]), 1.0, 0.5),
        (
            "muc all singletons",
            muc,
            cls(&["abc"]),
            cls(&["a", "b", "c"]),
            0.0,
            0.0,
        ),
        (
            "muc missing mention",
            muc,
            cls(&["abc"]),
            cls(&["ab"]),
            1.0,
            0.5,
        ),
        (
            "muc four split two",
            muc,
            cls(&["abcd"]),
            cls(&["ab", "cd"]),
            1.0,
            2.0 / 3.0,
        ),
        (
            "muc merged",
            muc,
            cls(&["ab", "cd"]),
            cls(&["abcd"]),
            2.0 / 3.0,
            1.0,
        ),
        ("muc empty pred", muc, cls(&["abc"]), vec![], 0.0, 0.0),
        (
            "b3 identical",
            b_cubed,
            cls(&["abc", "de"]),
            cls(&["abc", "de"]),
            1.0,
            1.0,
        ),
        (
            "b3 merged",
            b_cubed,
            cls(&["ab", "c"]),
            cls(&["abc"]),
            5.0 / 9.0,
            1.0,
        ),
        (
            "b3 spurious mention",
            b_cubed,
            cls(&["ab"]),
            cls(&["abx"]),
            4.0 / 9.0,
            1.0,
        ),
        (
            "b3 all singletons",
            b_cubed,
            cls(&["abc"]),
            cls(&["a", "b", "c"]),
            1.0,
            1.0 / 3.0,
        ),
        (
            "b3 five split",
            b_cubed,
            cls(&["abcde"]),
            cls(&["ab", "cde"]),
            1.0,
            13.0 / 25.0,
        ),
        ("b3 empty pred", b_cubed, cls(&["abc"]), vec![], 0.0, 0.0),
        (
            "ceaf identical",
            ceaf_phi4,
            cls(&["abc", "de"]),
            cls(&["abc", "de"]),
            1.0,
            1.0,
        ),
        (
            "ceaf crossed",
            ceaf_phi4,
            cls(&["ab", "cd"]),
            cls(&["ac", "bd"]),
            0.5,
            0.5,
        ),
        (
            "ceaf split",
            ceaf_phi4,
            cls(&["abc"]),
            cls(&["ab", "c"]),
            0.4,
            0.8,
        ),
        (
            "ceaf merged",
            ceaf_phi4,
            cls(&["ab", "c"]),
            cls(&["abc"]),
            0.8,
            0.4,
        ),
        (
            "ceaf five split",
            ceaf_phi4,
            cls(&["abcde"]),
            cls(&["ab", "cde"]),
            0.375,
            0.75,
        ),
        (
            "ceaf empty pred",
            ceaf_phi4,
            cls(&["abc"]),
            vec![],
            0.0,
            0.0,
        ),
    ];
    let mut failures = Vec::new();
    for (name, f, gold, pred, p, r) in &fixtures {
        let m = f(gold, pred);
        if (m.precision - p).abs() > 1e-9 || (m.recall - r).abs() > 1e-9 {
            failures.push(format!("{name}: got P={} R={}", m.precision, m.recall));
        }
    }

    // corpus aggregation sums counts rather than averaging documents
    let mut corpus = CorpusScorer::new();
    corpus.add_document(
        &cls(&["abc"]),
        &cls(&["ab", "c"]),
        SingletonMode::KeepSingletons,
    );
    corpus.add_document(&cls(&["xy"]), &cls(&["xy"]), SingletonMode::KeepSingletons);
    let agg = corpus.report().muc;
    if (agg.recall - 2.0 / 3.0).abs() > 1e-9 || (agg.precision - 1.0).abs() > 1e-9 {
        failures.push(format!("muc corpus aggregation: got {agg:?}"));
    }
    let b3 = b_cubed_counts(&cls(&["ab", "c"]), &cls(&["abc"]));
    if (b3.precision_num - 5.0 / 3.0).abs() > 1e-9 || b3.precision_den != 3.0 {
        failures.push(format!("b3 counts: got {b3:?}"));
    }

    // alignment against factorial enumeration, all shapes up to 6 x 6
    let mut rng_state = 0x2545_f491_4f6c_dd1du64;
    let mut next = move || {
        rng_state ^= rng_state << 13;
        rng_state ^= rng_state >> 7;
        rng_state ^= rng_state << 17;
        rng_state
    };
    let mut alignments = 0;
    for ng in 1..=6 {
        for np in 1..=6 {
            for _ in 0..20 {
                let mut gold: Vec<Cluster> = vec![Vec::new(); ng];
                let mut pred: Vec<Cluster> = vec![Vec::new(); np];
                for i in 0..14 {
                    gold[(next() % ng as u64) as usize].push(sp(i));
                    if next() % 7 != 0 {
                        pred[(next() % np as u64) as usize].push(sp(i));
                    }
                }
                gold.retain(|c| !c.is_empty());
                pred.retain(|c| !c.is_empty());
                let w = phi4_matrix(&gold, &pred);
                let chosen: f64 = max_weight_assignment(&w)
                    .iter()
                    .enumerate()
                    .filter_map(|(i, j)| j.map(|j| w[i][j]))
                    .sum();
                let best = brute_force_alignment(&gold, &pred);
                if (chosen - best).abs() > 1e-9 {
                    failures.push(format!(
                        "alignment {}x{}: {chosen} vs {best}",
                        gold.len(),
                        pred.len()
                    ));
                }
                alignments += 1;
            }
        }
    }
    check(
        failures.is_empty(),
        format!(
            "{} hand fixtures + 2 aggregation checks within 1e-9; {alignments} alignments match enumeration",
            fixtures.len()
        ),
        failures.join("; "),
    )
}

fn brute_force_alignment(gold: &[Cluster], pred: &[Cluster]) -> f64 {
    fn go(i: usize, gold: &[Cluster], pred: &[Cluster], used: &mut Vec<bool>) -> f64 {
        if i == gold.len() {
            return 0.0;
        }
        let mut best = go(i + 1, gold, pred, used);
        for j in 0..pred.len() {
            if !used[j] {
                used[j] = true;
                best = best.max(phi4(&gold[i], &pred[j]) + go(i + 1, gold, pred, used));
                used[j] = false;
            }
        }
        best
    }
    go(0, gold, pred, &mut vec![false; pred.len()])
}

fn corpus_files(path: &Path) -> Vec<PathBuf> {
    if path.is_dir() {
        let mut files: Vec<PathBuf> = std::fs::read_dir(path)
            .map(|rd| rd.filter_map(|e| e.ok().map(|e| e.path())).collect())
            .unwrap_or_default();
        files.retain(|p| p.is_file());
        files.sort();
        files
    } else {
        vec![path.to_path_buf()]
    }
}

fn criterion_5() -> Option<Outcome> {
    // (env var, name, expected max active, expected max total)
    let corpora = [
        ("MEMCOREF_LITBANK", "LitBank", 18, 199),
        ("MEMCOREF_ONTONOTES", "OntoNotes", 24, 94),
    ];
    let mut lines = Vec::new();
    let mut ran = false;
    for (var, name, mae, total) in corpora {
        let Some(path) = std::env::var_os(var) else {
            lines.push(format!("{name}: {var} not set"));
            continue;
        };
        ran = true;
        let mut stats = Vec::new();
        for file in corpus_files(Path::new(&path)) {
            let format = if file.extension().is_some_and(|e| e == "jsonl") {
                CorpusFormat::JsonLines
            } else {
                CorpusFormat::Conll2012
            };
            match read_file(format, &file) {
                Ok(docs) => stats.extend(docs.iter().map(doc_stats)),
                Err(e) => return Some(Err(format!("{name}: {e}"))),
            }
        }
        let s = summarize(&stats);
        let with = (s.max_active, s.max_total) == (mae, total);
        let without = (s.max_active_non_singleton, s.max_total_non_singleton) == (mae, total);
        let got = format!(
            "{name}: with singletons {}/{}, without {}/{}",
            s.max_active, s.max_total, s.max_active_non_singleton, s.max_total_non_singleton
        );
        if !(with || without) {
            return Some(Err(format!("{got}; expected {mae}/{total}")));
        }
        let variant = if with {
            "with singletons"
        } else {
            "without singletons"
        };
        lines.push(format!("{name} {mae}/{total} matched {variant}"));
    }
    ran.then(|| Ok(lines.join("; ")))
}

fn criterion_6() -> Outcome {
    // Each sample times a batch of back-to-back runs covering 100k
    // mentions, so every size is measured over a similar stretch of wall
    // time. Batches are interleaved across sizes so a transient slowdown of
    // the host hits every size alike; each size keeps its best batch.
    let sizes = [1_000usize, 10_000, 100_000];
    let rounds = 5;
    let policy = PolicyConfig::learned(20);
    let docs: Vec<(Document, Vec<MentionSpan>)> = sizes
        .iter()
        .map(|&n| {
            let doc = long_document(n as u64, n);
            let mentions = doc.candidate_spans();
            (doc, mentions)
        })
        .collect();
    let mut best = vec![f64::INFINITY; sizes.len()];
    for _ in 0..rounds {
        for (k, (doc, mentions)) in docs.iter().enumerate() {
            let batch = 100_000 / sizes[k];
            let t = Instant::now();
            for _ in 0..batch {
                let mut scorer = string_match_scorer(StringMatchConfig::default());
                let run = run_document(doc, mentions, &mut scorer, &policy).expect("run");
                assert_eq!(run.stats.actions.len(), mentions.len());
            }
            best[k] = best[k].min(t.elapsed().as_secs_f64() / batch as f64);
        }
    }
    let points: Vec<(f64, f64)> = sizes
        .iter()
        .zip(&best)
        .map(|(&n, &t)| (n as f64, t))
        .collect();
    let per_mention: Vec<f64> = points.iter().map(|(n, t)| t / n).collect();
    let spread = per_mention.iter().cloned().fold(f64::MIN, f64::max)
        / per_mention.iter().cloned().fold(f64::MAX, f64::min);

    let xs: Vec<f64> = points.iter().map(|(n, _)| n.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, t)| t.ln()).collect();
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = sxy * sxy / (sxx * syy);

    let summary = format!(
        "per-mention {:.0}/{:.0}/{:.0} ns (max/min {spread:.2}), log-log slope {slope:.3}, R² {r2:.4}",
        per_mention[0] * 1e9,
        per_mention[1] * 1e9,
        per_mention[2] * 1e9
    );
    check(
        spread < 2.0 && (slope - 1.0).abs() <= 0.1 && r2 >= 0.99,
        summary.clone(),
        summary,
    )
}

fn criterion_7() -> Outcome {
    // The replay path must accept externally produced score dumps.
    let doc = long_document(1, 50);
    let mentions = doc.candidate_spans();
    let policy = PolicyConfig::learned(4);
    let mut rec = RecordingScorer::new(gold_scorer(&doc));
    let original = run_document(&doc, &mentions, &mut rec, &policy).map_err(|e| e.to_string())?;
    let dump = write_score_rows(rec.rows());
    let rows = parse_score_rows(&dump).map_err(|e| e.to_string())?;
    let replayed = run_document(&doc, &mentions, &mut ReplayScorer::from_rows(rows), &policy)
        .map_err(|e| e.to_string())?;
    check(
        replayed.stats.actions == original.stats.actions,
        "out of scope: neural F1 tables, GPU memory/runtime figures and error-analysis counts need \
         trained span scorers; score dumps can be replayed through the replay scorer",
        "replay interface did not reproduce a recorded run",
    )
}

fn criterion_8() -> Outcome {
    let p = SyntheticParams {
        max_tokens: 120,
        max_entities: 14,
        max_mentions: 40,
        max_span_len: 3,
        max_invalid: 8,
    };
    let corpus = synthetic_corpus(8, 150, &p);
    let policies = [
        PolicyConfig::unbounded(),
        PolicyConfig::new(
            Policy::UnboundedStar,
            Capacity::Unbounded,
            SingletonMode::DropSingletons,
        ),
        PolicyConfig::learned(3),
        PolicyConfig::rule(3),
    ];
    let mut runs = 0;
    for policy in policies {
        for use_strings in [false, true] {
            let mut original = String::new();
            let mut rows = Vec::new();
            for doc in &corpus {
                let mentions = doc.candidate_spans();
                let run = if use_strings {
                    let mut rec =
                        RecordingScorer::new(string_match_scorer(StringMatchConfig::default()))
                            .tagged();
                    let run = run_document(doc, &mentions, &mut rec, &policy);
                    rows.extend(rec.into_rows());
                    run
                } else {
                    let mut rec = RecordingScorer::new(gold_scorer(doc)).tagged();
                    let run = run_document(doc, &mentions, &mut rec, &policy);
                    rows.extend(rec.into_rows());
                    run
                }
                .map_err(|e| e.to_string())?;
                original.push_str(&trace_jsonl(&run.trace()));
            }
            let reread = parse_score_rows(&write_score_rows(&rows)).map_err(|e| e.to_string())?;
            let mut replay = ReplayScorer::from_rows(reread);
            let mut replayed = String::new();
            for doc in &corpus {
                let run = run_document(doc, &doc.candidate_spans(), &mut replay, &policy)
                    .map_err(|e| e.to_string())?;
                replayed.push_str(&trace_jsonl(&run.trace()));
            }
            if original.as_bytes() != replayed.as_bytes() {
                return Err(format!("{} trace differs after replay", policy.policy));
            }
            runs += 1;
        }
    }
    Ok(format!(
        "{runs} recorded corpus runs (4 policies x 2 scorers) replay byte-identically"
    ))
}

fn main() {
    let criteria: Vec<(&str, Criterion)> = vec![
        ("gold-oracle perfection", Box::new(|| Some(criterion_1()))),
        ("capacity sufficiency", Box::new(|| Some(criterion_2()))),
        ("policy dominance", Box::new(|| Some(criterion_3()))),
        (
            "metric oracle equivalence",
            Box::new(|| Some(criterion_4())),
        ),
        ("corpus statistics", Box::new(criterion_5)),
        ("linear runtime", Box::new(|| Some(criterion_6()))),
        ("out-of-scope statement", Box::new(|| Some(criterion_7()))),
        ("record/replay fidelity", Box::new(|| Some(criterion_8()))),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Some(Ok(msg)) => println!("PASS [{}] {name}: {msg}", i + 1),
            Some(Err(msg)) => {
                failed += 1;
                println!("FAIL [{}] {name}: {msg}", i + 1);
            }
            None => println!(
                "SKIP [{}] {name}: not run, set MEMCOREF_LITBANK / MEMCOREF_ONTONOTES to a corpus file or directory",
                i + 1
            ),
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
