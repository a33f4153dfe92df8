use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Grammatical role labels attached to every annotated token.
///
/// Variants are declared in the lexicographic order of their codes so the
/// derived `Ord` agrees with string ordering of the rendered code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GrammaticalRole {
    /// Adverb
    AD,
    /// Adjective
    AJ,
    /// Article
    AR,
    /// Auxiliary
    AX,
    /// Coordinating conjunction
    CJ,
    /// Demonstrative pronoun
    DM,
    /// Infinitive verb
    IV,
    /// Modal verb
    MV,
    /// Noun
    N,
    /// Present participle
    PCPR,
    /// Past participle
    PCPS,
    /// Particle
    PK,
    /// Personal pronoun
    PP,
    /// Preposition
    PR,
    /// Possessive pronoun
    PS,
    /// Relative pronoun
    RPO,
    /// Reflexive pronoun
    RX,
    /// Subordinating conjunction
    SC,
    /// Verb
    V,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown grammatical role code `{0}`")]
pub struct UnknownRole(pub String);

impl GrammaticalRole {
    pub const ALL: [GrammaticalRole; 19] = [
        GrammaticalRole::AD,
        GrammaticalRole::AJ,
        GrammaticalRole::AR,
        GrammaticalRole::AX,
        GrammaticalRole::CJ,
        GrammaticalRole::DM,
        GrammaticalRole::IV,
        GrammaticalRole::MV,
        GrammaticalRole::N,
        GrammaticalRole::PCPR,
        GrammaticalRole::PCPS,
        GrammaticalRole::PK,
        GrammaticalRole::PP,
        GrammaticalRole::PR,
        GrammaticalRole::PS,
        GrammaticalRole::RPO,
        GrammaticalRole::RX,
        GrammaticalRole::SC,
        GrammaticalRole::V,
    ];

    pub fn code(self) -> &'static str {
        use GrammaticalRole::*;
        match self {
            AD => "AD",
            AJ => "AJ",
            AR => "AR",
            AX => "AX",
            CJ => "CJ",
            DM => "DM",
            IV => "IV",
            MV => "MV",
            N => "N",
            PCPR => "PCPR",
            PCPS => "PCPS",
            PK => "PK",
            PP => "PP",
            PR => "PR",
            PS => "PS",
            RPO => "RPO",
            RX => "RX",
            SC => "SC",
            V => "V",
        }
    }

    pub fn description(self) -> &'static str {
        use GrammaticalRole::*;
        match self {
            AD => "Adverb",
            AJ => "Adjective",
            AR => "Article",
            AX => "Auxiliary",
            CJ => "Coordinating Conjunction",
            DM => "Demonstrative Pronoun",
            IV => "Infinitive Verb",
            MV => "Modal Verb",
            N => "Noun",
            PCPR => "Present Participle",
            PCPS => "Past Participle",
            PK => "Particle",
            PP => "Personal Pronoun",
            PR => "Preposition",
            PS => "Possessive Pronoun",
            RPO => "Relative Pronoun",
            RX => "Reflexive Pronoun",
            SC => "Subordinating Conjunction",
            V => "Verb",
        }
    }

    pub fn is_pronoun(self) -> bool {
        use GrammaticalRole::*;
        matches!(self, PP | PS | DM | RX | RPO)
    }

    pub fn is_verbal(self) -> bool {
        use GrammaticalRole::*;
        matches!(self, V | IV | MV | AX | PCPR | PCPS)
    }
}

impl fmt::Display for GrammaticalRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for GrammaticalRole {
    type Err = UnknownRole;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GrammaticalRole::ALL
            .iter()
            .copied()
            .find(|r| r.code() == s)
            .ok_or_else(|| UnknownRole(s.to_owned()))
    }
}

/// Phrase rule an arc belongs to, decided by the role of the phrase head.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PhraseRule {
    NP,
    VP,
    PP,
    #[serde(rename = "OTHER")]
    Other,
}

impl PhraseRule {
    pub fn as_str(self) -> &'static str {
        match self {
            PhraseRule::NP => "NP",
            PhraseRule::VP => "VP",
            PhraseRule::PP => "PP",
            PhraseRule::Other => "OTHER",
        }
    }
}

impl fmt::Display for PhraseRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown phrase rule `{0}`")]
pub struct UnknownRule(pub String);

impl FromStr for PhraseRule {
    type Err = UnknownRule;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "NP" => Ok(PhraseRule::NP),
            "VP" => Ok(PhraseRule::VP),
            "PP" => Ok(PhraseRule::PP),
            "OTHER" => Ok(PhraseRule::Other),
            other => Err(UnknownRule(other.to_owned())),
        }
    }
}

/// Nouns and pronouns head nominal phrases, verb forms head verbal phrases,
/// prepositions head prepositional phrases. Everything else is `Other`.
pub fn classify_phrase_rule(head_role: GrammaticalRole) -> PhraseRule {
    if head_role == GrammaticalRole::N || head_role.is_pronoun() {
        PhraseRule::NP
    } else if head_role.is_verbal() {
        PhraseRule::VP
    } else if head_role == GrammaticalRole::PR {
        PhraseRule::PP
    } else {
        PhraseRule::Other
    }
}
