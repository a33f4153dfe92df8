//! Scripted corpora with known network structure, used by the demo fixture
//! and by tests.

use crate::corpus::{validate_tree, CorpusSlice, DependencyTree, GrammaticalRole, SentenceMeta, Token};

use GrammaticalRole::{AD, AJ, AR, AX, IV, MV, N, PP, V};

/// Lemma whose sentences the demo corpus samples.
pub const DEMO_TARGET: &str = "werden";
/// Modal that heads the target construction early on.
pub const DEMO_RECEDING: (GrammaticalRole, &str) = (MV, "mögen");
/// Modal that takes the construction over.
pub const DEMO_EMERGING: (GrammaticalRole, &str) = (MV, "können");
pub const DEMO_CENTURIES: [u32; 4] = [14, 15, 16, 17];
/// First century in which the emerging modal occurs.
pub const DEMO_TAKEOVER: u32 = 16;

type Word<'a> = (&'a str, &'a str, GrammaticalRole, usize);

/// `missing` lists the heads of unreadable tokens appended after `words`.
fn sentence(century: u32, doc: &str, id: &str, words: &[Word<'_>], missing: &[usize]) -> DependencyTree {
    let mut tokens: Vec<Token> = words
        .iter()
        .enumerate()
        .map(|(i, &(surface, lemma, role, head))| Token::new(i + 1, lemma, role, head).with_surface(surface))
        .collect();
    for &head in missing {
        tokens.push(Token::missing(tokens.len() + 1, "!", head));
    }
    let meta = SentenceMeta::new(id, century).with_doc(doc).with_target(DEMO_TARGET);
    validate_tree(tokens, meta).expect("scripted sentence is a valid tree")
}

/// Sentence counts per template for one century:
/// (receding modal, emerging modal, auxiliary, reported speech, negated).
fn demo_counts(century: u32) -> [usize; 5] {
    match century {
        14 => [30, 0, 20, 15, 6],
        15 => [28, 0, 22, 14, 7],
        16 => [4, 30, 21, 15, 6],
        _ => [4, 32, 20, 16, 7],
    }
}

fn demo_slice(century: u32) -> CorpusSlice {
    let doc = format!("demo-{century}");
    let [receding, emerging, aux, speech, negated] = demo_counts(century);
    let mut trees = Vec::new();
    let mut next_id = {
        let mut n = 0;
        move || {
            n += 1;
            format!("s{n:03}")
        }
    };
    for _ in 0..receding {
        // er mag gut werden
        let w = [("er", "er", PP, 2), ("mag", "mögen", MV, 0), ("gut", "gut", AJ, 4), ("werden", "werden", V, 2)];
        trees.push(sentence(century, &doc, &next_id(), &w, &[]));
    }
    for _ in 0..emerging {
        // er kann gut werden
        let w = [("er", "er", PP, 2), ("kann", "können", MV, 0), ("gut", "gut", AJ, 4), ("werden", "werden", V, 2)];
        trees.push(sentence(century, &doc, &next_id(), &w, &[]));
    }
    for _ in 0..aux {
        // der Mann wird kommen
        let w = [("der", "der", AR, 2), ("Mann", "mann", N, 3), ("wird", "werden", AX, 0), ("kommen", "kommen", IV, 3)];
        trees.push(sentence(century, &doc, &next_id(), &w, &[]));
    }
    for _ in 0..speech {
        // er sagt es wird Tag
        let w = [
            ("er", "er", PP, 2),
            ("sagt", "sagen", V, 0),
            ("es", "es", PP, 4),
            ("wird", "werden", V, 2),
            ("Tag", "tag", N, 4),
        ];
        trees.push(sentence(century, &doc, &next_id(), &w, &[]));
    }
    for _ in 0..negated {
        // der Mann wird nicht kommen
        let w = [
            ("der", "der", AR, 2),
            ("Mann", "mann", N, 3),
            ("wird", "werden", AX, 0),
            ("nicht", "nicht", AD, 5),
            ("kommen", "kommen", IV, 3),
        ];
        trees.push(sentence(century, &doc, &next_id(), &w, &[]));
    }
    if century == 15 {
        // an unreadable word next to the target, and one away from it
        let w = [("er", "er", PP, 2), ("mag", "mögen", MV, 0), ("werden", "werden", V, 2)];
        trees.push(sentence(century, &doc, &next_id(), &w, &[3]));
        let w = [("der", "der", AR, 2), ("Mann", "mann", N, 3), ("wird", "werden", AX, 0), ("kommen", "kommen", IV, 3)];
        trees.push(sentence(century, &doc, &next_id(), &w, &[4]));
    }
    CorpusSlice {
        century,
        trees,
        provenance: Vec::new(),
    }
}

/// Four centuries in which the emerging modal replaces the receding one as
/// head of the target construction from [`DEMO_TAKEOVER`] on. The receding
/// modal stays in the corpus at low frequency. Century 15 contains one
/// sentence with a missing word next to the target and one with a missing
/// word elsewhere.
pub fn demo_corpus() -> Vec<CorpusSlice> {
    DEMO_CENTURIES.iter().map(|&c| demo_slice(c)).collect()
}

fn chain_sentence(century: u32, id: &str, lemmas: &[String]) -> DependencyTree {
    let tokens = lemmas
        .iter()
        .enumerate()
        .map(|(i, l)| Token::new(i + 1, l, N, i))
        .collect();
    let meta = SentenceMeta::new(id, century)
        .with_doc(&format!("chains-{century}"))
        .with_target(&lemmas[0]);
    validate_tree(tokens, meta).expect("chain is a valid tree")
}

/// Slices of `sentences` chain-shaped trees of the given depth. Before
/// `link_from` every sentence has its own vocabulary; from `link_from` on
/// the leaf lemma of each chain is the root lemma of the next, so the
/// network becomes one path of length `sentences · depth`.
pub fn chain_corpus(centuries: &[u32], link_from: u32, sentences: usize, depth: usize) -> Vec<CorpusSlice> {
    centuries
        .iter()
        .map(|&century| {
            let linked = century >= link_from;
            let trees = (0..sentences)
                .map(|s| {
                    let lemmas: Vec<String> = (0..=depth)
                        .map(|i| {
                            if linked {
                                format!("w{}", s * depth + i)
                            } else {
                                format!("w{s}x{i}")
                            }
                        })
                        .collect();
                    chain_sentence(century, &format!("c{s}"), &lemmas)
                })
                .collect();
            CorpusSlice {
                century,
                trees,
                provenance: Vec::new(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asn::{aggregate, NodeKey};
    use crate::corpus::{filter_missing, parse_corpus, render_corpus, tree_depth, MissingPolicy};

    #[test]
    fn demo_round_trips_through_text() {
        let slices = demo_corpus();
        let text = render_corpus(&slices);
        let back = parse_corpus(text.as_bytes()).unwrap();
        assert_eq!(render_corpus(&back), text);
    }

    #[test]
    fn shipped_fixture_is_current() {
        let fixture = include_str!("../fixtures/demo_corpus.tb");
        assert_eq!(fixture, render_corpus(&demo_corpus()));
    }

    #[test]
    fn demo_vocabulary() {
        let emerging = NodeKey::new(DEMO_EMERGING.0, DEMO_EMERGING.1);
        for slice in demo_corpus() {
            let asn = aggregate(&slice.trees).unwrap();
            assert!(asn.node_count() <= 14);
            assert_eq!(asn.contains(&emerging), slice.century >= DEMO_TAKEOVER);
        }
    }

    #[test]
    fn missing_words_in_century_15() {
        let slices = demo_corpus();
        let drops = slices[1]
            .trees
            .iter()
            .filter(|t| !filter_missing(t, MissingPolicy::DropAdjacentToTarget).unwrap().is_keep())
            .count();
        let any = slices[1].trees.iter().filter(|t| t.has_missing()).count();
        assert_eq!((drops, any), (1, 2));
    }

    #[test]
    fn chains() {
        let slices = chain_corpus(&[1, 2], 2, 4, 3);
        for s in &slices {
            assert!(s.trees.iter().all(|t| tree_depth(t) == 3));
        }
        let early = aggregate(&slices[0].trees).unwrap();
        let late = aggregate(&slices[1].trees).unwrap();
        assert_eq!(early.node_count(), 16);
        assert_eq!(late.node_count(), 13);
    }
}
