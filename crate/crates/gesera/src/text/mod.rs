//! Text analysis: tokenization, part-of-speech tagging, query
//! reformulation, and corpus tag statistics.

pub mod distribution;
pub mod reformulate;
pub mod tag;
pub mod tokenize;

pub use distribution::{pos_distribution, pos_distribution_seq, PosDistribution};
pub use reformulate::{reformulate, Query, Strategy};
pub use tag::{
    load_lexicon, load_stopwords, map_tag_label, parse_lexicon, parse_pretagged,
    parse_stopwords, HeuristicTagger, PosTag, TaggedToken, Tagger,
};
pub use tokenize::tokenize;
