//! Corpus statistics over gold clusters: entity spread, active entity count,
//! maximum active entities, spread histograms and rank correlation.

use serde::Serialize;

use crate::error::AnalyticsError;
use crate::types::{Document, GoldCluster, MentionSpan};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpreadRecord {
    pub entity_id: u32,
    pub spread: MentionSpan,
    pub mention_count: usize,
    pub spread_fraction: f64,
}

/// Token interval from the first mention's start to the last mention's end.
pub fn entity_spread(cluster: &GoldCluster) -> Result<MentionSpan, AnalyticsError> {
    let start = cluster.mentions.iter().map(|m| m.start).min();
    let end = cluster.mentions.iter().map(|m| m.end).max();
    match (start, end) {
        (Some(start), Some(end)) => Ok(MentionSpan::new(start, end)),
        _ => Err(AnalyticsError::EmptyCluster),
    }
}

fn spreads(doc: &Document) -> impl Iterator<Item = MentionSpan> + '_ {
    doc.gold_clusters
        .iter()
        .filter_map(|c| entity_spread(c).ok())
}

pub fn spread_records(doc: &Document) -> Vec<SpreadRecord> {
    let len = doc.len().max(1) as f64;
    doc.gold_clusters
        .iter()
        .filter_map(|c| {
            let spread = entity_spread(c).ok()?;
            Some(SpreadRecord {
                entity_id: c.entity_id,
                spread,
                mention_count: c.mentions.len(),
                spread_fraction: spread.len() as f64 / len,
            })
        })
        .collect()
}

/// Number of entities whose spread covers token `t`. Singletons count.
pub fn active_entity_count(doc: &Document, t: usize) -> Result<usize, AnalyticsError> {
    if t >= doc.len() {
        return Err(AnalyticsError::IndexOutOfRange {
            index: t,
            len: doc.len(),
        });
    }
    Ok(spreads(doc).filter(|s| s.contains(t)).count())
}

/// Maximum number of simultaneously covering intervals, by an endpoint sweep.
pub fn max_overlap(intervals: impl IntoIterator<Item = MentionSpan>) -> usize {
    // (coordinate, delta); a closed [s, e] contributes +1 at s and -1 at e + 1.
    let mut events: Vec<(usize, i64)> = intervals
        .into_iter()
        .flat_map(|s| [(s.start, 1), (s.end + 1, -1)])
        .collect();
    // at equal coordinates the exits sort first
    events.sort_unstable();
    let mut cur = 0i64;
    let mut best = 0i64;
    for (_, d) in events {
        cur += d;
        best = best.max(cur);
    }
    best as usize
}

/// Maximum active entity count of a document; 0 when it has no entities.
pub fn max_active_entities(doc: &Document) -> usize {
    max_overlap(spreads(doc))
}

/// Same statistic with singleton clusters left out.
pub fn max_active_entities_non_singleton(doc: &Document) -> usize {
    max_overlap(
        doc.gold_clusters
            .iter()
            .filter(|c| c.mentions.len() > 1)
            .filter_map(|c| entity_spread(c).ok()),
    )
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DocStats {
    pub doc_id: String,
    pub mae: usize,
    pub mae_non_singleton: usize,
    pub total_entities: usize,
    pub non_singleton_entities: usize,
    pub doc_len: usize,
}

pub fn doc_stats(doc: &Document) -> DocStats {
    DocStats {
        doc_id: doc.doc_id.clone(),
        mae: max_active_entities(doc),
        mae_non_singleton: max_active_entities_non_singleton(doc),
        total_entities: doc.gold_clusters.len(),
        non_singleton_entities: doc
            .gold_clusters
            .iter()
            .filter(|c| c.mentions.len() > 1)
            .count(),
        doc_len: doc.len(),
    }
}

/// Corpus-level maxima. Associative: merging partial summaries with
/// [`CorpusSummary::merge`] equals summarizing the concatenated corpus.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CorpusSummary {
    pub documents: usize,
    pub max_active: usize,
    pub max_active_non_singleton: usize,
    pub max_total: usize,
    pub max_total_non_singleton: usize,
}

impl CorpusSummary {
    pub fn add(&mut self, s: &DocStats) {
        self.documents += 1;
        self.max_active = self.max_active.max(s.mae);
        self.max_active_non_singleton = self.max_active_non_singleton.max(s.mae_non_singleton);
        self.max_total = self.max_total.max(s.total_entities);
        self.max_total_non_singleton = self.max_total_non_singleton.max(s.non_singleton_entities);
    }

    pub fn merge(mut self, other: &CorpusSummary) -> Self {
        self.documents += other.documents;
        self.max_active = self.max_active.max(other.max_active);
        self.max_active_non_singleton = self
            .max_active_non_singleton
            .max(other.max_active_non_singleton);
        self.max_total = self.max_total.max(other.max_total);
        self.max_total_non_singleton = self
            .max_total_non_singleton
            .max(other.max_total_non_singleton);
        self
    }
}

pub fn summarize<'a>(stats: impl IntoIterator<Item = &'a DocStats>) -> CorpusSummary {
    let mut out = CorpusSummary::default();
    for s in stats {
        out.add(s);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HistogramBucket {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

/// Histogram of spread fractions over `buckets` uniform bins on [0, 1].
/// Bin `k` holds fractions in `[k/B, (k+1)/B)`, the last bin also holds 1.
pub fn spread_histogram<'a>(
    corpus: impl IntoIterator<Item = &'a Document>,
    buckets: usize,
    exclude_singletons: bool,
) -> Vec<HistogramBucket> {
    let buckets = buckets.max(1);
    let mut counts = vec![0usize; buckets];
    for doc in corpus {
        let len = doc.len();
        if len == 0 {
            continue;
        }
        for c in &doc.gold_clusters {
            if exclude_singletons && c.mentions.len() <= 1 {
                continue;
            }
            let Ok(spread) = entity_spread(c) else {
                continue;
            };
            // integer arithmetic keeps bin edges exact
            let k = (spread.len().min(len) * buckets / len).min(buckets - 1);
            counts[k] += 1;
        }
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(k, count)| HistogramBucket {
            lo: k as f64 / buckets as f64,
            hi: (k + 1) as f64 / buckets as f64,
            count,
        })
        .collect()
}

/// Fractional ranks (1-based); tied values share their average rank.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64, AnalyticsError> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(AnalyticsError::DegenerateInput);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman rank correlation with average-rank tie handling.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64, AnalyticsError> {
    if xs.len() != ys.len() {
        return Err(AnalyticsError::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 2 {
        return Err(AnalyticsError::TooFewObservations(xs.len()));
    }
    pearson(&average_ranks(xs), &average_ranks(ys))
}
