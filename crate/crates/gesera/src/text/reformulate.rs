//! Query reformulation: turning a tagged summary into retrieval terms.
//!
//! Four strategies are supported. `Raw` drops stopwords and numbers and
//! keeps everything else. `NounPhrase` keeps maximal adjective/noun chunks
//! ending in a noun, each as one phrase term. `Keyword` enumerates
//! unigrams, bigrams, and trigrams inside the stretches that survive
//! stopword and number removal. `Gesera` keeps nouns, verbs, and
//! adjectives as single-word terms.

use std::collections::HashSet;

use crate::error::Error;
use crate::text::tag::{PosTag, TaggedToken};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    Raw,
    NounPhrase,
    Keyword,
    Gesera,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::Raw,
        Strategy::NounPhrase,
        Strategy::Keyword,
        Strategy::Gesera,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Strategy::Raw => "raw",
            Strategy::NounPhrase => "np",
            Strategy::Keyword => "kw",
            Strategy::Gesera => "gesera",
        }
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_lowercase().as_str() {
            "raw" => Ok(Strategy::Raw),
            "np" | "noun-phrase" | "noun_phrase" => Ok(Strategy::NounPhrase),
            "kw" | "keyword" => Ok(Strategy::Keyword),
            "gesera" => Ok(Strategy::Gesera),
            other => Err(Error::File {
                path: other.to_string(),
                message: "unknown strategy (expected raw, np, kw, or gesera)".to_string(),
            }),
        }
    }
}

/// A reformulated query. Terms may be multi-word phrases; phrases are
/// scored as bags of their words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub terms: Vec<String>,
    pub strategy: Strategy,
}

impl Query {
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// All words across all terms, in term order.
    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().flat_map(|t| t.split_whitespace())
    }

    /// Distinct words in first-occurrence order.
    pub fn unique_words(&self) -> Vec<&str> {
        let mut seen = HashSet::new();
        self.words().filter(|w| seen.insert(*w)).collect()
    }
}

/// True for the classes every strategy removes outright.
fn removed(tag: PosTag) -> bool {
    matches!(tag, PosTag::Stopword | PosTag::Number)
}

/// Builds a query from tagged tokens under the given strategy.
pub fn reformulate(tokens: &[TaggedToken], strategy: Strategy) -> Query {
    let terms = match strategy {
        Strategy::Raw => raw_terms(tokens),
        Strategy::NounPhrase => noun_phrase_terms(tokens),
        Strategy::Keyword => keyword_terms(tokens),
        Strategy::Gesera => gesera_terms(tokens),
    };
    Query { terms, strategy }
}

fn raw_terms(tokens: &[TaggedToken]) -> Vec<String> {
    tokens
        .iter()
        .filter(|t| !removed(t.tag))
        .map(|t| t.surface.clone())
        .collect()
}

fn gesera_terms(tokens: &[TaggedToken]) -> Vec<String> {
    tokens
        .iter()
        .filter(|t| matches!(t.tag, PosTag::Noun | PosTag::Verb | PosTag::Adjective))
        .map(|t| t.surface.clone())
        .collect()
}

/// Maximal runs of adjectives and nouns, each trimmed to its last noun.
/// Runs without a noun produce nothing.
fn noun_phrase_terms(tokens: &[TaggedToken]) -> Vec<String> {
    let mut terms = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        if !matches!(tokens[i].tag, PosTag::Adjective | PosTag::Noun) {
            i += 1;
            continue;
        }
        let start = i;
        while i < tokens.len() && matches!(tokens[i].tag, PosTag::Adjective | PosTag::Noun) {
            i += 1;
        }
        let run = &tokens[start..i];
        if let Some(last_noun) = run.iter().rposition(|t| t.tag == PosTag::Noun) {
            let chunk: Vec<&str> = run[..=last_noun].iter().map(|t| t.surface.as_str()).collect();
            terms.push(chunk.join(" "));
        }
    }
    terms
}

/// Unigrams, bigrams, and trigrams inside each stretch of consecutive kept
/// tokens, deduplicated, enumerated by n-gram size and then by position.
/// Removed tokens break stretches, so no n-gram spans one.
fn keyword_terms(tokens: &[TaggedToken]) -> Vec<String> {
    let mut segments: Vec<Vec<&str>> = Vec::new();
    let mut current: Vec<&str> = Vec::new();
    for token in tokens {
        if removed(token.tag) {
            if !current.is_empty() {
                segments.push(std::mem::take(&mut current));
            }
        } else {
            current.push(token.surface.as_str());
        }
    }
    if !current.is_empty() {
        segments.push(current);
    }
    let mut seen = HashSet::new();
    let mut terms = Vec::new();
    for n in 1..=3 {
        for segment in &segments {
            for window in segment.windows(n) {
                let term = window.join(" ");
                if seen.insert(term.clone()) {
                    terms.push(term);
                }
            }
        }
    }
    terms
}
