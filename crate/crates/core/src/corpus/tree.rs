use std::fmt;

use serde::{Deserialize, Serialize};

use super::role::{classify_phrase_rule, GrammaticalRole, PhraseRule};

/// Lemma sentinels used by the source corpora for words that are lost or unreadable.
pub const MISSING_LEMMAS: [&str; 2] = ["!", "unbekannt"];

pub fn is_missing_lemma(lemma: &str) -> bool {
    MISSING_LEMMAS.contains(&lemma)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    /// 1-based position in the sentence.
    pub index: usize,
    pub surface: String,
    pub lemma: String,
    /// `None` only for tokens whose annotation is missing.
    pub role: Option<GrammaticalRole>,
    /// Index of the governing token, 0 for the root.
    pub head: usize,
    /// Phrase rule; `None` means "derive from the head's role" until the
    /// tree is validated.
    pub rule: Option<PhraseRule>,
    pub missing: bool,
}

impl Token {
    pub fn new(index: usize, lemma: &str, role: GrammaticalRole, head: usize) -> Self {
        Token {
            index,
            surface: lemma.to_owned(),
            lemma: lemma.to_owned(),
            role: Some(role),
            head,
            rule: None,
            missing: false,
        }
    }

    /// A token whose lemma is one of the missing-annotation sentinels.
    pub fn missing(index: usize, sentinel: &str, head: usize) -> Self {
        Token {
            index,
            surface: sentinel.to_owned(),
            lemma: sentinel.to_owned(),
            role: None,
            head,
            rule: None,
            missing: true,
        }
    }

    pub fn with_surface(mut self, surface: &str) -> Self {
        self.surface = surface.to_owned();
        self
    }

    pub fn with_rule(mut self, rule: PhraseRule) -> Self {
        self.rule = Some(rule);
        self
    }

    pub fn is_root(&self) -> bool {
        self.head == 0
    }
}

/// Metadata shared by a sentence and set through header lines in treebank files.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceMeta {
    pub sentence_id: String,
    pub century: u32,
    pub doc_id: String,
    pub dialect: Option<String>,
    pub target_lemma: Option<String>,
}

impl SentenceMeta {
    pub fn new(sentence_id: &str, century: u32) -> Self {
        SentenceMeta {
            sentence_id: sentence_id.to_owned(),
            century,
            doc_id: "_".to_owned(),
            dialect: None,
            target_lemma: None,
        }
    }

    pub fn with_doc(mut self, doc_id: &str) -> Self {
        self.doc_id = doc_id.to_owned();
        self
    }

    pub fn with_target(mut self, target: &str) -> Self {
        self.target_lemma = Some(target.to_owned());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Violation {
    Empty,
    /// Token indices must run 1..=n in order.
    NonContiguousIndex { position: usize, index: usize },
    NoRoot,
    /// A second (or later) token with head 0.
    MultipleRoots { token: usize },
    HeadOutOfRange { token: usize, head: usize },
    /// Tokens on a head-pointer cycle, ascending.
    Cycle { tokens: Vec<usize> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty => write!(f, "empty sentence"),
            Violation::NonContiguousIndex { position, index } => {
                write!(f, "token at position {position} has index {index}")
            }
            Violation::NoRoot => write!(f, "no root"),
            Violation::MultipleRoots { token } => write!(f, "multiple roots at token {token}"),
            Violation::HeadOutOfRange { token, head } => {
                write!(f, "head {head} of token {token} out of range")
            }
            Violation::Cycle { tokens } => {
                let joined: Vec<String> = tokens.iter().map(|t| t.to_string()).collect();
                write!(f, "head cycle among tokens {}", joined.join(","))
            }
        }
    }
}

/// Every constraint a token list broke. Never empty.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub violations: Vec<Violation>,
}

impl fmt::Display for ViolationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join("; "))
    }
}

impl std::error::Error for ViolationReport {}

/// A validated sentence: one root, every other token has an in-range head,
/// and head pointers are acyclic. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DependencyTree {
    meta: SentenceMeta,
    tokens: Vec<Token>,
    root: usize,
}

/// Check the single-root, in-range-head and acyclicity constraints.
pub fn check_heads(heads: &[usize]) -> Vec<Violation> {
    let n = heads.len();
    if n == 0 {
        return vec![Violation::Empty];
    }
    let mut violations = Vec::new();
    let mut seen_root = false;
    for (i, &h) in heads.iter().enumerate() {
        let token = i + 1;
        if h == 0 {
            if seen_root {
                violations.push(Violation::MultipleRoots { token });
            }
            seen_root = true;
        } else if h > n {
            violations.push(Violation::HeadOutOfRange { token, head: h });
        }
    }
    if !seen_root {
        violations.push(Violation::NoRoot);
    }

    // Walk head pointers from each token; 0 = unvisited, 1 = on current walk,
    // 2 = finished. A revisit of a node on the current walk closes a cycle.
    let mut state = vec![0u8; n + 1];
    for start in 1..=n {
        if state[start] != 0 {
            continue;
        }
        let mut path = Vec::new();
        let mut cur = start;
        loop {
            if cur == 0 || cur > n || state[cur] == 2 {
                break;
            }
            if state[cur] == 1 {
                let pos = path.iter().position(|&t| t == cur).unwrap();
                let mut cycle: Vec<usize> = path[pos..].to_vec();
                cycle.sort_unstable();
                violations.push(Violation::Cycle { tokens: cycle });
                break;
            }
            state[cur] = 1;
            path.push(cur);
            cur = heads[cur - 1];
        }
        for t in path {
            state[t] = 2;
        }
    }
    violations
}

/// Validate a token list and attach sentence metadata.
///
/// Tokens whose rule is unset get it from the role of their head (the root
/// uses its own role). Missing tokens without a role yield `Other`.
pub fn validate_tree(
    tokens: Vec<Token>,
    meta: SentenceMeta,
) -> Result<DependencyTree, ViolationReport> {
    let mut violations = Vec::new();
    for (pos, t) in tokens.iter().enumerate() {
        if t.index != pos + 1 {
            violations.push(Violation::NonContiguousIndex {
                position: pos + 1,
                index: t.index,
            });
        }
    }
    if violations.is_empty() {
        let heads: Vec<usize> = tokens.iter().map(|t| t.head).collect();
        violations = check_heads(&heads);
    } else if tokens.is_empty() {
        violations.push(Violation::Empty);
    }
    if !violations.is_empty() {
        return Err(ViolationReport { violations });
    }

    let roles: Vec<Option<GrammaticalRole>> = tokens.iter().map(|t| t.role).collect();
    let mut tokens = tokens;
    let mut root = 0;
    for t in tokens.iter_mut() {
        t.missing = t.missing || is_missing_lemma(&t.lemma);
        if t.head == 0 {
            root = t.index;
        }
        if t.rule.is_none() {
            let governing = if t.head == 0 {
                t.role
            } else {
                roles[t.head - 1]
            };
            t.rule = Some(governing.map_or(PhraseRule::Other, classify_phrase_rule));
        }
    }
    Ok(DependencyTree { meta, tokens, root })
}

impl DependencyTree {
    pub fn meta(&self) -> &SentenceMeta {
        &self.meta
    }

    pub fn sentence_id(&self) -> &str {
        &self.meta.sentence_id
    }

    pub fn century(&self) -> u32 {
        self.meta.century
    }

    pub fn target_lemma(&self) -> Option<&str> {
        self.meta.target_lemma.as_deref()
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// 1-based index of the root token.
    pub fn root(&self) -> usize {
        self.root
    }

    pub fn token(&self, index: usize) -> &Token {
        &self.tokens[index - 1]
    }

    /// Child lists indexed by token index (slot 0 unused).
    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut children = vec![Vec::new(); self.tokens.len() + 1];
        for t in &self.tokens {
            if t.head != 0 {
                children[t.head].push(t.index);
            }
        }
        children
    }

    /// Arcs as (head, dependent) token indices.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.tokens
            .iter()
            .filter(|t| t.head != 0)
            .map(|t| (t.head, t.index))
    }

    pub fn has_missing(&self) -> bool {
        self.tokens.iter().any(|t| t.missing)
    }

    /// Rewrites metadata; tokens and structure are untouched.
    pub fn with_meta(mut self, meta: SentenceMeta) -> Self {
        self.meta = meta;
        self
    }
}

/// Length in arcs of the longest root-to-leaf path.
pub fn tree_depth(tree: &DependencyTree) -> usize {
    let children = tree.children();
    let mut depth = 0;
    let mut stack = vec![(tree.root(), 0usize)];
    while let Some((node, d)) = stack.pop() {
        depth = depth.max(d);
        for &c in &children[node] {
            stack.push((c, d + 1));
        }
    }
    depth
}
