//! Part-of-speech classes and the taggers that assign them.
//!
//! The pipeline only needs coarse classes (noun, verb, adjective,
//! preposition, number, stopword, other), not full Penn tags. Two backends
//! produce them: a built-in heuristic tagger for raw text and a
//! pass-through parser for text that arrives already tagged as
//! `token/TAG` pairs.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;
use std::sync::LazyLock;

use crate::error::{Error, Result};
use crate::text::tokenize::tokenize;

const DEFAULT_STOPWORDS: &str = include_str!("data/stopwords.txt");
const DEFAULT_LEXICON: &str = include_str!("data/lexicon.tsv");

/// Coarse part-of-speech class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PosTag {
    Noun,
    Verb,
    Adjective,
    Preposition,
    Number,
    Stopword,
    Other,
}

impl PosTag {
    pub fn label(self) -> &'static str {
        match self {
            PosTag::Noun => "noun",
            PosTag::Verb => "verb",
            PosTag::Adjective => "adjective",
            PosTag::Preposition => "preposition",
            PosTag::Number => "number",
            PosTag::Stopword => "stopword",
            PosTag::Other => "other",
        }
    }
}

impl std::fmt::Display for PosTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// A lowercased surface form paired with its class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedToken {
    pub surface: String,
    pub tag: PosTag,
}

impl TaggedToken {
    pub fn new(surface: impl Into<String>, tag: PosTag) -> Self {
        TaggedToken {
            surface: surface.into(),
            tag,
        }
    }
}

/// Maps a Penn Treebank label (or one of this crate's class names) to a
/// coarse class. Unknown labels are an error naming the label.
pub fn map_tag_label(label: &str) -> Result<PosTag> {
    let upper = label.trim().to_ascii_uppercase();
    let tag = match upper.as_str() {
        "NN" | "NNS" | "NNP" | "NNPS" | "NOUN" => PosTag::Noun,
        "VB" | "VBD" | "VBG" | "VBN" | "VBP" | "VBZ" | "VERB" => PosTag::Verb,
        "JJ" | "JJR" | "JJS" | "ADJECTIVE" => PosTag::Adjective,
        "IN" | "TO" | "PREPOSITION" => PosTag::Preposition,
        "CD" | "NUMBER" => PosTag::Number,
        "DT" | "PDT" | "WDT" | "PRP" | "PRP$" | "WP" | "WP$" | "WRB" | "CC" | "EX" | "MD"
        | "POS" | "RP" | "UH" | "STOPWORD" => PosTag::Stopword,
        "RB" | "RBR" | "RBS" | "FW" | "SYM" | "LS" | "." | "," | ":" | ";" | "(" | ")" | "``"
        | "''" | "#" | "$" | "-LRB-" | "-RRB-" | "HYPH" | "NFP" | "OTHER" => PosTag::Other,
        _ => {
            return Err(Error::UnknownTagLabel {
                label: label.trim().to_string(),
            })
        }
    };
    Ok(tag)
}

/// Parses a stopword list: one word per line, `#` starts a comment line,
/// blank lines are ignored. Words are lowercased.
pub fn parse_stopwords(text: &str) -> HashSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

/// Loads a stopword list from a file in the format of [`parse_stopwords`].
pub fn load_stopwords(path: impl AsRef<Path>) -> Result<HashSet<String>> {
    let path = path.as_ref();
    let text =
        fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(parse_stopwords(&text))
}

/// Parses a lexicon: `word<TAB>TAG` per line, `#` comments and blank lines
/// ignored. Words are lowercased; tags go through [`map_tag_label`].
pub fn parse_lexicon(text: &str, source: &str) -> Result<HashMap<String, PosTag>> {
    let mut lexicon = HashMap::new();
    for (idx, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (word, label) = trimmed.split_once('\t').ok_or_else(|| {
            Error::record(source, idx + 1, "expected word<TAB>TAG")
        })?;
        let tag = map_tag_label(label)
            .map_err(|e| Error::record(source, idx + 1, e.to_string()))?;
        lexicon.insert(word.trim().to_lowercase(), tag);
    }
    Ok(lexicon)
}

/// Loads a lexicon file in the format of [`parse_lexicon`].
pub fn load_lexicon(path: impl AsRef<Path>) -> Result<HashMap<String, PosTag>> {
    let path = path.as_ref();
    let label = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|e| Error::io(&label, e))?;
    parse_lexicon(&text, &label)
}

static DEFAULT_STOPWORD_SET: LazyLock<HashSet<String>> =
    LazyLock::new(|| parse_stopwords(DEFAULT_STOPWORDS));

static DEFAULT_LEXICON_MAP: LazyLock<HashMap<String, PosTag>> = LazyLock::new(|| {
    parse_lexicon(DEFAULT_LEXICON, "bundled lexicon").expect("bundled lexicon is well-formed")
});

/// Rule-based tagger for raw text.
///
/// Precedence per token: number shape, stopword list, lexicon, suffix
/// rules, then noun as the default for unknown words. The bundled stopword
/// list leaves prepositions to the lexicon so they keep their own class.
#[derive(Debug, Clone)]
pub struct HeuristicTagger {
    stopwords: HashSet<String>,
    lexicon: HashMap<String, PosTag>,
}

impl Default for HeuristicTagger {
    fn default() -> Self {
        HeuristicTagger {
            stopwords: DEFAULT_STOPWORD_SET.clone(),
            lexicon: DEFAULT_LEXICON_MAP.clone(),
        }
    }
}

impl HeuristicTagger {
    pub fn new(stopwords: HashSet<String>, lexicon: HashMap<String, PosTag>) -> Self {
        HeuristicTagger { stopwords, lexicon }
    }

    /// Replaces the stopword list, keeping the lexicon.
    pub fn with_stopwords(mut self, stopwords: HashSet<String>) -> Self {
        self.stopwords = stopwords;
        self
    }

    /// Replaces the lexicon, keeping the stopword list.
    pub fn with_lexicon(mut self, lexicon: HashMap<String, PosTag>) -> Self {
        self.lexicon = lexicon;
        self
    }

    /// Classifies one lowercased token.
    pub fn tag_token(&self, token: &str) -> PosTag {
        if is_number_token(token) {
            return PosTag::Number;
        }
        if self.stopwords.contains(token) {
            return PosTag::Stopword;
        }
        if let Some(&tag) = self.lexicon.get(token) {
            return tag;
        }
        if let Some(tag) = suffix_tag(token) {
            return tag;
        }
        if token.chars().any(char::is_alphabetic) {
            PosTag::Noun
        } else {
            PosTag::Other
        }
    }

    pub fn tag_tokens(&self, tokens: &[String]) -> Vec<TaggedToken> {
        tokens
            .iter()
            .map(|t| TaggedToken::new(t.clone(), self.tag_token(t)))
            .collect()
    }

    /// Tokenizes and tags raw text.
    pub fn tag_text(&self, text: &str) -> Vec<TaggedToken> {
        self.tag_tokens(&tokenize(text))
    }
}

/// A token shaped like a number: contains a digit and no letters.
fn is_number_token(token: &str) -> bool {
    !token.is_empty()
        && token.chars().any(char::is_numeric)
        && !token.chars().any(char::is_alphabetic)
}

fn suffix_tag(token: &str) -> Option<PosTag> {
    let n = token.chars().count();
    if token.ends_with("ly") {
        return Some(PosTag::Other);
    }
    if token.ends_with("ing") && n >= 5 {
        return Some(PosTag::Verb);
    }
    if token.ends_with("ed") && n >= 4 {
        return Some(PosTag::Verb);
    }
    if token.ends_with("ous") || token.ends_with("ful") || token.ends_with("ive") {
        return Some(PosTag::Adjective);
    }
    None
}

/// Parses text that is already tagged as whitespace-separated `token/TAG`
/// pairs. The tag is taken after the last `/` so surfaces may contain
/// slashes. Surfaces are lowercased.
pub fn parse_pretagged(text: &str) -> Result<Vec<TaggedToken>> {
    text.split_whitespace()
        .map(|pair| {
            let (word, label) = pair
                .rsplit_once('/')
                .filter(|(w, l)| !w.is_empty() && !l.is_empty())
                .ok_or_else(|| Error::PretaggedToken {
                    token: pair.to_string(),
                })?;
            Ok(TaggedToken::new(word.to_lowercase(), map_tag_label(label)?))
        })
        .collect()
}

/// Tagging backend used by indexing and query reformulation.
#[derive(Debug, Clone)]
pub enum Tagger {
    /// Tokenize raw text and classify with [`HeuristicTagger`].
    Heuristic(HeuristicTagger),
    /// Treat input text as pre-tagged `token/TAG` pairs.
    Pretagged,
}

impl Default for Tagger {
    fn default() -> Self {
        Tagger::Heuristic(HeuristicTagger::default())
    }
}

impl Tagger {
    /// Produces tagged tokens from input text under this backend.
    pub fn tag_text(&self, text: &str) -> Result<Vec<TaggedToken>> {
        match self {
            Tagger::Heuristic(h) => Ok(h.tag_text(text)),
            Tagger::Pretagged => parse_pretagged(text),
        }
    }

    /// Produces the plain token stream used for indexing document fields.
    pub fn index_tokens(&self, text: &str) -> Result<Vec<String>> {
        match self {
            Tagger::Heuristic(_) => Ok(tokenize(text)),
            Tagger::Pretagged => {
                Ok(parse_pretagged(text)?.into_iter().map(|t| t.surface).collect())
            }
        }
    }
}
