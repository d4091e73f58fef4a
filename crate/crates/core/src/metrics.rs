//! Coreference metrics: MUC, B³, CEAF-φ4 and their unweighted CoNLL average.
//!
//! Every metric is computed as numerator/denominator pairs so that corpus
//! scores sum counts over documents before dividing, as the reference
//! scorer does. A zero denominator yields zero.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::assignment::{assignment_weight, max_weight_assignment};
use crate::types::{MentionSpan, SingletonMode};

pub type Cluster = Vec<MentionSpan>;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PRF {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl PRF {
    pub fn new(precision: f64, recall: f64) -> Self {
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        Self {
            precision,
            recall,
            f1,
        }
    }
}

/// Unreduced metric counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct MetricCounts {
    pub recall_num: f64,
    pub recall_den: f64,
    pub precision_num: f64,
    pub precision_den: f64,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

impl MetricCounts {
    pub fn prf(&self) -> PRF {
        PRF::new(
            ratio(self.precision_num, self.precision_den),
            ratio(self.recall_num, self.recall_den),
        )
    }

    pub fn add(&mut self, other: &MetricCounts) {
        self.recall_num += other.recall_num;
        self.recall_den += other.recall_den;
        self.precision_num += other.precision_num;
        self.precision_den += other.precision_den;
    }
}

/// Drops clusters of size one when singletons are not scored.
pub fn filter_singletons(clusters: &[Cluster], mode: SingletonMode) -> Vec<Cluster> {
    match mode {
        SingletonMode::KeepSingletons => clusters.to_vec(),
        SingletonMode::DropSingletons => clusters.iter().filter(|c| c.len() > 1).cloned().collect(),
    }
}

fn membership(clusters: &[Cluster]) -> HashMap<MentionSpan, usize> {
    let mut m = HashMap::new();
    for (i, c) in clusters.iter().enumerate() {
        for &x in c {
            m.insert(x, i);
        }
    }
    m
}

/// Link-based recall counts of `key` against `response`.
fn muc_recall(key: &[Cluster], response: &[Cluster]) -> (f64, f64) {
    let owner = membership(response);
    let (mut num, mut den) = (0usize, 0usize);
    for k in key.iter().filter(|k| !k.is_empty()) {
        let mut parts = HashSet::new();
        let mut unaligned = 0;
        for x in k {
            match owner.get(x) {
                Some(&r) => {
                    parts.insert(r);
                }
                None => unaligned += 1,
            }
        }
        num += k.len() - (parts.len() + unaligned);
        den += k.len() - 1;
    }
    (num as f64, den as f64)
}

pub fn muc_counts(gold: &[Cluster], pred: &[Cluster]) -> MetricCounts {
    let (recall_num, recall_den) = muc_recall(gold, pred);
    let (precision_num, precision_den) = muc_recall(pred, gold);
    MetricCounts {
        recall_num,
        recall_den,
        precision_num,
        precision_den,
    }
}

pub fn muc(gold: &[Cluster], pred: &[Cluster]) -> PRF {
    muc_counts(gold, pred).prf()
}

/// Mention-averaged recall counts of `key` against `response`; mentions
/// missing from the response earn nothing.
fn b_cubed_recall(key: &[Cluster], response: &[Cluster]) -> (f64, f64) {
    let owner = membership(response);
    let (mut num, mut den) = (0.0, 0.0);
    for k in key.iter().filter(|k| !k.is_empty()) {
        let mut overlap: HashMap<usize, usize> = HashMap::new();
        for x in k {
            if let Some(&r) = owner.get(x) {
                *overlap.entry(r).or_insert(0) += 1;
            }
        }
        let n = k.len() as f64;
        num += overlap.values().map(|&c| (c * c) as f64).sum::<f64>() / n;
        den += n;
    }
    (num, den)
}

pub fn b_cubed_counts(gold: &[Cluster], pred: &[Cluster]) -> MetricCounts {
    let (recall_num, recall_den) = b_cubed_recall(gold, pred);
    let (precision_num, precision_den) = b_cubed_recall(pred, gold);
    MetricCounts {
        recall_num,
        recall_den,
        precision_num,
        precision_den,
    }
}

pub fn b_cubed(gold: &[Cluster], pred: &[Cluster]) -> PRF {
    b_cubed_counts(gold, pred).prf()
}

/// Entity similarity `2|K ∩ R| / (|K| + |R|)`.
pub fn phi4(key: &[MentionSpan], response: &[MentionSpan]) -> f64 {
    if key.is_empty() && response.is_empty() {
        return 0.0;
    }
    let r: HashSet<&MentionSpan> = response.iter().collect();
    let common = key.iter().filter(|x| r.contains(x)).count();
    2.0 * common as f64 / (key.len() + response.len()) as f64
}

/// φ4 similarity between every gold (row) and predicted (column) cluster.
pub fn phi4_matrix(gold: &[Cluster], pred: &[Cluster]) -> Vec<Vec<f64>> {
    gold.iter()
        .map(|g| pred.iter().map(|p| phi4(g, p)).collect())
        .collect()
}

pub fn ceaf_phi4_counts(gold: &[Cluster], pred: &[Cluster]) -> MetricCounts {
    let gold: Vec<Cluster> = gold.iter().filter(|c| !c.is_empty()).cloned().collect();
    let pred: Vec<Cluster> = pred.iter().filter(|c| !c.is_empty()).cloned().collect();
    let sim = phi4_matrix(&gold, &pred);
    let best = assignment_weight(&sim, &max_weight_assignment(&sim));
    MetricCounts {
        recall_num: best,
        recall_den: gold.len() as f64,
        precision_num: best,
        precision_den: pred.len() as f64,
    }
}

pub fn ceaf_phi4(gold: &[Cluster], pred: &[Cluster]) -> PRF {
    ceaf_phi4_counts(gold, pred).prf()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub muc: PRF,
    pub b_cubed: PRF,
    pub ceaf_phi4: PRF,
    pub conll_f1: f64,
}

/// Assembles a report; the CoNLL F1 is the unweighted mean of the three F1s.
pub fn conll_f1(muc: PRF, b_cubed: PRF, ceaf_phi4: PRF) -> ScoreReport {
    ScoreReport {
        muc,
        b_cubed,
        ceaf_phi4,
        conll_f1: (muc.f1 + b_cubed.f1 + ceaf_phi4.f1) / 3.0,
    }
}

impl ScoreReport {
    /// Text table with one row per metric, values in percent to one decimal.
    pub fn table(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!(
            "{:<10} {:>7} {:>7} {:>7}\n",
            "Metric", "Prec.", "Rec.", "F1"
        ));
        for (name, m) in [
            ("MUC", self.muc),
            ("B3", self.b_cubed),
            ("CEAF_phi4", self.ceaf_phi4),
        ] {
            s.push_str(&format!(
                "{:<10} {:>7.1} {:>7.1} {:>7.1}\n",
                name,
                100.0 * m.precision,
                100.0 * m.recall,
                100.0 * m.f1
            ));
        }
        s.push_str(&format!(
            "{:<10} {:>23.1}\n",
            "Avg. F1",
            100.0 * self.conll_f1
        ));
        s
    }
}

/// Accumulates counts over documents.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CorpusScorer {
    pub muc: MetricCounts,
    pub b_cubed: MetricCounts,
    pub ceaf_phi4: MetricCounts,
    pub documents: usize,
}

impl CorpusScorer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_document(&mut self, gold: &[Cluster], pred: &[Cluster], mode: SingletonMode) {
        let gold = filter_singletons(gold, mode);
        let pred = filter_singletons(pred, mode);
        self.muc.add(&muc_counts(&gold, &pred));
        self.b_cubed.add(&b_cubed_counts(&gold, &pred));
        self.ceaf_phi4.add(&ceaf_phi4_counts(&gold, &pred));
        self.documents += 1;
    }

    pub fn report(&self) -> ScoreReport {
        conll_f1(self.muc.prf(), self.b_cubed.prf(), self.ceaf_phi4.prf())
    }
}

pub fn score_document(gold: &[Cluster], pred: &[Cluster], mode: SingletonMode) -> ScoreReport {
    let mut c = CorpusScorer::new();
    c.add_document(gold, pred, mode);
    c.report()
}
