//! Corpus-level part-of-speech distribution reporting.

use crate::corpus::DocumentCollection;
use crate::error::{Error, Result};
use crate::exec;
use crate::text::tag::{PosTag, Tagger};

/// Percentage of tokens per coarse class across a collection's bodies.
/// Numbers and stopwords fold into `others`; the five fields sum to 100.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PosDistribution {
    pub noun: f64,
    pub verb: f64,
    pub adjective: f64,
    pub preposition: f64,
    pub others: f64,
    /// Total number of tokens counted.
    pub tokens: u64,
}

impl PosDistribution {
    /// Class name and percentage pairs, in reporting order.
    pub fn classes(&self) -> [(&'static str, f64); 5] {
        [
            ("Noun", self.noun),
            ("Verb", self.verb),
            ("Adjective", self.adjective),
            ("Preposition", self.preposition),
            ("Others", self.others),
        ]
    }
}

/// Per-document class counts: noun, verb, adjective, preposition, others.
type Counts = [u64; 5];

fn count_document(tagger: &Tagger, body: &str) -> Result<Counts> {
    let mut counts = [0u64; 5];
    for token in tagger.tag_text(body)? {
        let slot = match token.tag {
            PosTag::Noun => 0,
            PosTag::Verb => 1,
            PosTag::Adjective => 2,
            PosTag::Preposition => 3,
            PosTag::Number | PosTag::Stopword | PosTag::Other => 4,
        };
        counts[slot] += 1;
    }
    Ok(counts)
}

/// Tags every document body and reports the class mix as percentages.
pub fn pos_distribution(tagger: &Tagger, collection: &DocumentCollection) -> Result<PosDistribution> {
    distribution_impl(tagger, collection, true)
}

/// Sequential fallback of [`pos_distribution`]; same result, single thread.
pub fn pos_distribution_seq(
    tagger: &Tagger,
    collection: &DocumentCollection,
) -> Result<PosDistribution> {
    distribution_impl(tagger, collection, false)
}

fn distribution_impl(
    tagger: &Tagger,
    collection: &DocumentCollection,
    parallel: bool,
) -> Result<PosDistribution> {
    if collection.is_empty() {
        return Err(Error::EmptyCollection);
    }
    let per_doc = exec::map_collect(collection.documents(), parallel, |doc| {
        count_document(tagger, &doc.body)
    });
    let mut totals = [0u64; 5];
    for counts in per_doc {
        let counts = counts?;
        for (total, count) in totals.iter_mut().zip(counts) {
            *total += count;
        }
    }
    let tokens: u64 = totals.iter().sum();
    if tokens == 0 {
        return Err(Error::NoTokens);
    }
    let pct = |c: u64| c as f64 / tokens as f64 * 100.0;
    Ok(PosDistribution {
        noun: pct(totals[0]),
        verb: pct(totals[1]),
        adjective: pct(totals[2]),
        preposition: pct(totals[3]),
        others: pct(totals[4]),
        tokens,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Document;
    use approx::assert_abs_diff_eq;

    fn collection(bodies: &[&str]) -> DocumentCollection {
        let docs = bodies
            .iter()
            .enumerate()
            .map(|(i, body)| Document {
                id: format!("d{i}"),
                title: String::new(),
                body: body.to_string(),
            })
            .collect();
        DocumentCollection::from_documents(docs, "test").unwrap()
    }

    #[test]
    fn percentages_sum_to_one_hundred() {
        let corpus = collection(&[
            "The cat sat in the house",
            "A quick fox jumps over lazy dogs in 2009",
        ]);
        let dist = pos_distribution(&Tagger::default(), &corpus).unwrap();
        let sum: f64 = dist.classes().iter().map(|(_, p)| p).sum();
        assert_abs_diff_eq!(sum, 100.0, epsilon = 1e-9);
        assert!(dist.noun > 0.0 && dist.preposition > 0.0);
    }

    #[test]
    fn counts_match_a_hand_tagged_sentence() {
        let corpus = collection(&["The cat sat in the house"]);
        let dist = pos_distribution(&Tagger::default(), &corpus).unwrap();
        assert_eq!(dist.tokens, 6);
        assert_abs_diff_eq!(dist.noun, 100.0 * 2.0 / 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(dist.verb, 100.0 / 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(dist.adjective, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(dist.preposition, 100.0 / 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(dist.others, 100.0 * 2.0 / 6.0, epsilon = 1e-12);
    }

    #[test]
    fn sequential_and_parallel_agree_exactly() {
        let bodies: Vec<String> = (0..64)
            .map(|i| format!("Document {i} describes a quick test of the tagging pipeline"))
            .collect();
        let refs: Vec<&str> = bodies.iter().map(String::as_str).collect();
        let corpus = collection(&refs);
        let tagger = Tagger::default();
        let par = pos_distribution(&tagger, &corpus).unwrap();
        let seq = pos_distribution_seq(&tagger, &corpus).unwrap();
        assert_eq!(par, seq);
    }

    #[test]
    fn empty_collection_is_an_error() {
        let corpus = collection(&[]);
        assert!(pos_distribution(&Tagger::default(), &corpus).is_err());
    }
}
