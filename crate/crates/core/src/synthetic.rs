//! Seeded synthetic documents for tests, benchmarks and CLI fixtures.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::types::{Candidate, Document, GoldCluster, MentionSpan};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SyntheticParams {
    pub max_tokens: usize,
    pub max_entities: usize,
    pub max_mentions: usize,
    pub max_span_len: usize,
    /// Extra non-gold candidate spans added per document (upper bound).
    pub max_invalid: usize,
}

impl Default for SyntheticParams {
    fn default() -> Self {
        Self {
            max_tokens: 64,
            max_entities: 8,
            max_mentions: 20,
            max_span_len: 3,
            max_invalid: 0,
        }
    }
}

const VOCAB: &[&str] = &[
    "the", "a", "of", "and", "to", "in", "was", "said", "he", "she", "it", "they", "house",
    "river", "king", "city", "letter", "ship", "night", "road",
];

fn random_span<R: Rng>(rng: &mut R, len: usize, max_span_len: usize) -> MentionSpan {
    let start = rng.gen_range(0..len);
    let width = rng.gen_range(1..=max_span_len.max(1));
    MentionSpan::new(start, (start + width - 1).min(len - 1))
}

pub fn synthetic_document<R: Rng>(
    rng: &mut R,
    doc_id: impl Into<String>,
    p: &SyntheticParams,
) -> Document {
    let len = rng.gen_range(1..=p.max_tokens.max(1));
    let span_len = p.max_span_len.max(1);
    let distinct_possible: usize = (1..=span_len.min(len)).map(|w| len - w + 1).sum();
    let n = rng.gen_range(1..=p.max_mentions.max(1).min(distinct_possible));
    let m = rng.gen_range(1..=p.max_entities.max(1).min(n));

    let mut spans = BTreeSet::new();
    while spans.len() < n {
        spans.insert(random_span(rng, len, span_len));
    }
    let mut spans: Vec<MentionSpan> = spans.into_iter().collect();
    spans.shuffle(rng);

    let mut clusters: BTreeMap<u32, Vec<MentionSpan>> = BTreeMap::new();
    for (i, &s) in spans.iter().enumerate() {
        let e = if i < m { i } else { rng.gen_range(0..m) } as u32;
        clusters.entry(e).or_default().push(s);
    }
    let gold: Vec<GoldCluster> = clusters
        .into_iter()
        .map(|(e, mut ms)| {
            ms.sort();
            GoldCluster::new(e, ms)
        })
        .collect();

    let mut tokens: Vec<String> = (0..len)
        .map(|_| VOCAB[rng.gen_range(0..VOCAB.len())].to_string())
        .collect();
    for c in &gold {
        for s in &c.mentions {
            tokens[s.end] = format!("E{}", c.entity_id);
        }
    }

    let mut doc = Document::with_gold(doc_id, tokens, gold);
    if p.max_invalid > 0 {
        let gold_spans: BTreeSet<MentionSpan> = doc.gold_mentions().collect();
        let extra = rng.gen_range(0..=p.max_invalid);
        let mut seen = BTreeSet::new();
        for _ in 0..extra * 4 {
            if seen.len() == extra {
                break;
            }
            let s = random_span(rng, len, span_len);
            if !gold_spans.contains(&s) {
                seen.insert(s);
            }
        }
        for s in seen {
            doc.candidate_mentions.push(Candidate {
                span: s,
                score: -rng.gen::<f64>(),
            });
        }
        doc.candidate_mentions.sort_by_key(|c| c.span);
    }
    doc
}

pub fn synthetic_corpus(seed: u64, documents: usize, p: &SyntheticParams) -> Vec<Document> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..documents)
        .map(|i| synthetic_document(&mut rng, format!("synth-{i:05}"), p))
        .collect()
}

/// A long single-token-mention document whose entities are locally
/// concentrated: mention `i` refers to one of a dozen entities around
/// `i / 8`, so long-lived memories keep churning.
pub fn long_document(seed: u64, mentions: usize) -> Document {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tokens = Vec::with_capacity(2 * mentions);
    let mut clusters: BTreeMap<u32, Vec<MentionSpan>> = BTreeMap::new();
    for i in 0..mentions {
        let e = (i / 8 + rng.gen_range(0..12)) as u32;
        clusters
            .entry(e)
            .or_default()
            .push(MentionSpan::new(2 * i, 2 * i));
        tokens.push(format!("E{e}"));
        tokens.push(VOCAB[rng.gen_range(0..VOCAB.len())].to_string());
    }
    let gold = clusters
        .into_iter()
        .map(|(e, ms)| GoldCluster::new(e, ms))
        .collect();
    Document::with_gold(format!("long-{mentions}"), tokens, gold)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::validate_document;

    #[test]
    fn generated_documents_are_valid() {
        let p = SyntheticParams {
            max_invalid: 5,
            ..SyntheticParams::default()
        };
        for doc in synthetic_corpus(7, 200, &p) {
            assert!(
                validate_document(&doc).is_empty(),
                "{:?}",
                validate_document(&doc)
            );
            assert!(doc.len() <= 64);
            assert!(doc.gold_clusters.len() <= 8);
            assert!(doc.gold_mention_count() <= 20);
        }
    }

    #[test]
    fn seeded_generation_is_reproducible() {
        let p = SyntheticParams::default();
        assert_eq!(synthetic_corpus(3, 20, &p), synthetic_corpus(3, 20, &p));
        assert_ne!(synthetic_corpus(3, 20, &p), synthetic_corpus(4, 20, &p));
    }
}
