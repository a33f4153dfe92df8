//! Dependency-annotated sentences: roles, validation, the treebank file
//! format and missing-annotation filtering.

mod filter;
mod format;
mod role;
mod tree;

pub use filter::{filter_missing, DropReason, FilterDecision, MissingPolicy, NoTarget};
pub use format::{
    parse_corpus, parse_corpus_lenient, read_corpus_files, read_corpus_files_lenient, render_corpus, render_trees,
    CorpusSlice, LenientLoad, LoadError, ParseError, Rejected,
};
pub use role::{classify_phrase_rule, GrammaticalRole, PhraseRule, UnknownRole, UnknownRule};
pub use tree::{
    check_heads, is_missing_lemma, tree_depth, validate_tree, DependencyTree, SentenceMeta, Token,
    Violation, ViolationReport, MISSING_LEMMAS,
};
