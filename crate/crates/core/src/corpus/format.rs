//! Line-based treebank format.
//!
//! ```text
//! # century = 11
//! # doc_id = doc-a
//! # target = werden
//! # sent_id = s1
//! 1	er	er	PP	2	_
//! 2	wirt	werden	AX	0	_
//! ```
//!
//! Header keys are sticky (they apply to every following sentence) except
//! `sent_id`, which names only the next sentence. A header value of `_`
//! clears `dialect` or `target`. Lines starting with `## ` are comments.
#![allow(clippy::tabs_in_doc_comments)]

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::role::{GrammaticalRole, PhraseRule};
use super::tree::{is_missing_lemma, validate_tree, DependencyTree, SentenceMeta, Token, Violation, ViolationReport};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusSlice {
    pub century: u32,
    pub trees: Vec<DependencyTree>,
    pub provenance: Vec<PathBuf>,
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: expected 6 tab-separated columns, found {found}")]
    ColumnCount { line: usize, found: usize },
    #[error("line {line}: {column} `{value}` is not a non-negative integer")]
    BadInteger {
        line: usize,
        column: &'static str,
        value: String,
    },
    #[error("line {line}: unknown role code `{code}`")]
    UnknownRole { line: usize, code: String },
    #[error("line {line}: unknown phrase rule `{value}`")]
    UnknownRule { line: usize, value: String },
    #[error("line {line}: role `_` is only allowed when the lemma is a missing-annotation sentinel")]
    UnannotatedRole { line: usize },
    #[error("line {line}: malformed header `{text}`")]
    BadHeader { line: usize, text: String },
    #[error("line {line}: unknown header key `{key}`")]
    UnknownHeader { line: usize, key: String },
    #[error("line {line}: header line inside a sentence")]
    HeaderInsideSentence { line: usize },
    #[error("line {line}: sentence has no `century` header")]
    NoCentury { line: usize },
    #[error("line {line}: duplicate sentence id `{sentence_id}` in document `{doc_id}`")]
    DuplicateSentence {
        line: usize,
        doc_id: String,
        sentence_id: String,
    },
    #[error("line {line}: sentence `{sentence_id}`: {report}")]
    InvalidTree {
        line: usize,
        sentence_id: String,
        report: ViolationReport,
    },
    #[error("line {line}: invalid UTF-8 or read failure: {source}")]
    Io {
        line: usize,
        #[source]
        source: std::io::Error,
    },
}

impl ParseError {
    pub fn line(&self) -> usize {
        match self {
            ParseError::ColumnCount { line, .. }
            | ParseError::BadInteger { line, .. }
            | ParseError::UnknownRole { line, .. }
            | ParseError::UnknownRule { line, .. }
            | ParseError::UnannotatedRole { line }
            | ParseError::BadHeader { line, .. }
            | ParseError::UnknownHeader { line, .. }
            | ParseError::HeaderInsideSentence { line }
            | ParseError::NoCentury { line }
            | ParseError::DuplicateSentence { line, .. }
            | ParseError::InvalidTree { line, .. }
            | ParseError::Io { line, .. } => *line,
        }
    }
}

/// A sentence that parsed but failed tree validation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rejected {
    pub sentence_id: String,
    pub century: u32,
    /// Line of the first token.
    pub line: usize,
    /// Line of each token, by token position.
    pub token_lines: Vec<usize>,
    pub report: ViolationReport,
}

impl Rejected {
    /// Line that best locates a violation: the offending token's line where
    /// there is one, otherwise the first token line.
    pub fn line_of(&self, violation: &Violation) -> usize {
        let token = match violation {
            Violation::MultipleRoots { token } | Violation::HeadOutOfRange { token, .. } => {
                Some(*token)
            }
            Violation::Cycle { tokens } => tokens.first().copied(),
            Violation::NonContiguousIndex { position, .. } => Some(*position),
            Violation::NoRoot | Violation::Empty => None,
        };
        token
            .and_then(|t| self.token_lines.get(t.wrapping_sub(1)).copied())
            .unwrap_or(self.line)
    }
}

#[derive(Default)]
struct HeaderState {
    century: Option<u32>,
    doc_id: Option<String>,
    dialect: Option<String>,
    target: Option<String>,
    sent_id: Option<String>,
}

struct Reader {
    state: HeaderState,
    block: Vec<(usize, Token)>,
    seen: HashSet<(String, String)>,
    doc_counts: BTreeMap<String, usize>,
    slices: BTreeMap<u32, Vec<DependencyTree>>,
    rejected: Vec<Rejected>,
    lenient: bool,
}

fn parse_index(line: usize, column: &'static str, value: &str) -> Result<usize, ParseError> {
    value.parse::<usize>().map_err(|_| ParseError::BadInteger {
        line,
        column,
        value: value.to_owned(),
    })
}

fn parse_token_line(line: usize, text: &str) -> Result<Token, ParseError> {
    let cols: Vec<&str> = text.split('\t').collect();
    if cols.len() != 6 {
        return Err(ParseError::ColumnCount {
            line,
            found: cols.len(),
        });
    }
    let index = parse_index(line, "index", cols[0])?;
    let head = parse_index(line, "head", cols[4])?;
    let lemma = cols[2];
    let missing = is_missing_lemma(lemma);
    let role = match cols[3] {
        "_" if missing => None,
        "_" => return Err(ParseError::UnannotatedRole { line }),
        code => Some(
            code.parse::<GrammaticalRole>()
                .map_err(|e| ParseError::UnknownRole { line, code: e.0 })?,
        ),
    };
    let rule = match cols[5] {
        "_" => None,
        value => Some(
            value
                .parse::<PhraseRule>()
                .map_err(|e| ParseError::UnknownRule { line, value: e.0 })?,
        ),
    };
    Ok(Token {
        index,
        surface: cols[1].to_owned(),
        lemma: lemma.to_owned(),
        role,
        head,
        rule,
        missing,
    })
}

fn header_value(value: &str) -> Option<String> {
    if value == "_" {
        None
    } else {
        Some(value.to_owned())
    }
}

impl Reader {
    fn new(lenient: bool) -> Self {
        Reader {
            state: HeaderState::default(),
            block: Vec::new(),
            seen: HashSet::new(),
            doc_counts: BTreeMap::new(),
            slices: BTreeMap::new(),
            rejected: Vec::new(),
            lenient,
        }
    }

    fn header(&mut self, line: usize, text: &str) -> Result<(), ParseError> {
        if !self.block.is_empty() {
            return Err(ParseError::HeaderInsideSentence { line });
        }
        let body = &text[2..];
        let (key, value) = body.split_once('=').ok_or_else(|| ParseError::BadHeader {
            line,
            text: text.to_owned(),
        })?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "century" => {
                self.state.century = Some(value.parse::<u32>().map_err(|_| {
                    ParseError::BadInteger {
                        line,
                        column: "century",
                        value: value.to_owned(),
                    }
                })?)
            }
            "doc_id" => self.state.doc_id = Some(value.to_owned()),
            "dialect" => self.state.dialect = header_value(value),
            "target" => self.state.target = header_value(value),
            "sent_id" => self.state.sent_id = Some(value.to_owned()),
            other => {
                return Err(ParseError::UnknownHeader {
                    line,
                    key: other.to_owned(),
                })
            }
        }
        Ok(())
    }

    fn flush(&mut self) -> Result<(), ParseError> {
        if self.block.is_empty() {
            return Ok(());
        }
        let block = std::mem::take(&mut self.block);
        let first_line = block[0].0;
        let century = self
            .state
            .century
            .ok_or(ParseError::NoCentury { line: first_line })?;
        let doc_id = self.state.doc_id.clone().unwrap_or_else(|| "_".to_owned());
        let count = self.doc_counts.entry(doc_id.clone()).or_insert(0);
        *count += 1;
        let sentence_id = self
            .state
            .sent_id
            .take()
            .unwrap_or_else(|| format!("{doc_id}-{count}"));
        if !self.seen.insert((doc_id.clone(), sentence_id.clone())) {
            return Err(ParseError::DuplicateSentence {
                line: first_line,
                doc_id,
                sentence_id,
            });
        }
        let meta = SentenceMeta {
            sentence_id: sentence_id.clone(),
            century,
            doc_id,
            dialect: self.state.dialect.clone(),
            target_lemma: self.state.target.clone(),
        };
        let token_lines: Vec<usize> = block.iter().map(|(l, _)| *l).collect();
        let tokens: Vec<Token> = block.into_iter().map(|(_, t)| t).collect();
        match validate_tree(tokens, meta) {
            Ok(tree) => self.slices.entry(century).or_default().push(tree),
            Err(report) => {
                let rejected = Rejected {
                    sentence_id: sentence_id.clone(),
                    century,
                    line: first_line,
                    token_lines,
                    report: report.clone(),
                };
                if !self.lenient {
                    let line = rejected.line_of(&report.violations[0]);
                    return Err(ParseError::InvalidTree {
                        line,
                        sentence_id,
                        report,
                    });
                }
                self.rejected.push(rejected);
            }
        }
        Ok(())
    }

    fn run<R: BufRead>(mut self, input: R) -> Result<(Vec<CorpusSlice>, Vec<Rejected>), ParseError> {
        let mut line_no = 0;
        for line in input.lines() {
            line_no += 1;
            let text = line.map_err(|source| ParseError::Io {
                line: line_no,
                source,
            })?;
            let text = text.strip_suffix('\r').unwrap_or(&text);
            if text.trim().is_empty() {
                self.flush()?;
            } else if text.starts_with("## ") || text == "##" {
                continue;
            } else if text.starts_with("# ") {
                self.header(line_no, text)?;
            } else if text.starts_with('#') {
                return Err(ParseError::BadHeader {
                    line: line_no,
                    text: text.to_owned(),
                });
            } else {
                let token = parse_token_line(line_no, text)?;
                self.block.push((line_no, token));
            }
        }
        self.flush()?;
        let slices = self
            .slices
            .into_iter()
            .map(|(century, trees)| CorpusSlice {
                century,
                trees,
                provenance: Vec::new(),
            })
            .collect();
        Ok((slices, self.rejected))
    }
}

/// Parse a treebank, failing on the first malformed line or invalid tree.
/// Slices come back in ascending century order.
pub fn parse_corpus<R: Read>(input: R) -> Result<Vec<CorpusSlice>, ParseError> {
    Reader::new(false)
        .run(BufReader::new(input))
        .map(|(slices, _)| slices)
}

/// Like [`parse_corpus`] but sentences that fail tree validation are
/// collected instead of aborting the parse.
pub fn parse_corpus_lenient<R: Read>(
    input: R,
) -> Result<(Vec<CorpusSlice>, Vec<Rejected>), ParseError> {
    Reader::new(true).run(BufReader::new(input))
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{}: {source}", source.line())]
    Parse {
        path: PathBuf,
        #[source]
        source: ParseError,
    },
}

/// Parse several files and merge their slices by century, in path order.
pub fn read_corpus_files<P: AsRef<Path>>(paths: &[P]) -> Result<Vec<CorpusSlice>, LoadError> {
    load(paths, false).map(|(slices, _)| slices)
}

/// Loaded slices plus every rejected tree with the file it came from.
pub type LenientLoad = (Vec<CorpusSlice>, Vec<(PathBuf, Rejected)>);

/// Like [`read_corpus_files`] but invalid trees are returned with the file
/// they came from instead of aborting the load.
pub fn read_corpus_files_lenient<P: AsRef<Path>>(
    paths: &[P],
) -> Result<LenientLoad, LoadError> {
    load(paths, true)
}

fn load<P: AsRef<Path>>(
    paths: &[P],
    lenient: bool,
) -> Result<LenientLoad, LoadError> {
    let mut merged: BTreeMap<u32, CorpusSlice> = BTreeMap::new();
    let mut all_rejected = Vec::new();
    for path in paths {
        let path = path.as_ref();
        let file = File::open(path).map_err(|source| LoadError::Io {
            path: path.to_owned(),
            source,
        })?;
        let (slices, rejected) = Reader::new(lenient)
            .run(BufReader::new(file))
            .map_err(|source| match source {
                ParseError::Io { source, .. } => LoadError::Io {
                    path: path.to_owned(),
                    source,
                },
                source => LoadError::Parse {
                    path: path.to_owned(),
                    source,
                },
            })?;
        all_rejected.extend(rejected.into_iter().map(|r| (path.to_owned(), r)));
        for slice in slices {
            let entry = merged.entry(slice.century).or_insert_with(|| CorpusSlice {
                century: slice.century,
                trees: Vec::new(),
                provenance: Vec::new(),
            });
            entry.trees.extend(slice.trees);
            entry.provenance.push(path.to_owned());
        }
    }
    Ok((merged.into_values().collect(), all_rejected))
}

/// Canonical text form: headers are written only when they change, every
/// sentence carries its `sent_id`, and rules are always explicit.
pub fn render_trees<'a, I>(trees: I) -> String
where
    I: IntoIterator<Item = &'a DependencyTree>,
{
    let mut out = String::new();
    let mut century: Option<u32> = None;
    let mut doc_id: Option<&str> = None;
    let mut dialect: Option<Option<&str>> = None;
    let mut target: Option<Option<&str>> = None;
    for tree in trees {
        let meta = tree.meta();
        if century != Some(meta.century) {
            let _ = writeln!(out, "# century = {}", meta.century);
            century = Some(meta.century);
        }
        if doc_id != Some(meta.doc_id.as_str()) {
            let _ = writeln!(out, "# doc_id = {}", meta.doc_id);
            doc_id = Some(meta.doc_id.as_str());
        }
        let d = meta.dialect.as_deref();
        if dialect.unwrap_or(None) != d {
            let _ = writeln!(out, "# dialect = {}", d.unwrap_or("_"));
        }
        dialect = Some(d);
        let t = meta.target_lemma.as_deref();
        if target.unwrap_or(None) != t {
            let _ = writeln!(out, "# target = {}", t.unwrap_or("_"));
        }
        target = Some(t);
        let _ = writeln!(out, "# sent_id = {}", meta.sentence_id);
        for tok in tree.tokens() {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}",
                tok.index,
                tok.surface,
                tok.lemma,
                tok.role.map_or("_", |r| r.code()),
                tok.head,
                tok.rule.map_or("_", |r| r.as_str()),
            );
        }
        out.push('\n');
    }
    out
}

pub fn render_corpus(slices: &[CorpusSlice]) -> String {
    render_trees(slices.iter().flat_map(|s| s.trees.iter()))
}
