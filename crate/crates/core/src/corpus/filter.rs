use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::tree::DependencyTree;

/// How sentences with missing annotations are treated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MissingPolicy {
    /// Drop every sentence containing a missing token.
    DropAny,
    /// Drop only when a missing token is the head or a direct dependent of
    /// a target-lemma token.
    #[default]
    DropAdjacentToTarget,
    KeepAll,
}

impl MissingPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            MissingPolicy::DropAny => "drop-any",
            MissingPolicy::DropAdjacentToTarget => "drop-adjacent-to-target",
            MissingPolicy::KeepAll => "keep-all",
        }
    }
}

impl fmt::Display for MissingPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MissingPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "drop-any" => Ok(MissingPolicy::DropAny),
            "drop-adjacent-to-target" => Ok(MissingPolicy::DropAdjacentToTarget),
            "keep-all" => Ok(MissingPolicy::KeepAll),
            other => Err(format!("unknown missing policy `{other}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DropReason {
    ContainsMissing,
    MissingNeighborOfTarget,
    TargetNotFound,
}

impl fmt::Display for DropReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DropReason::ContainsMissing => "contains missing annotation",
            DropReason::MissingNeighborOfTarget => "missing neighbor of target",
            DropReason::TargetNotFound => "target lemma not found",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FilterDecision {
    Keep,
    Drop(DropReason),
}

impl FilterDecision {
    pub fn is_keep(self) -> bool {
        self == FilterDecision::Keep
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("sentence `{0}` has no target lemma; policy drop-adjacent-to-target needs one")]
pub struct NoTarget(pub String);

pub fn filter_missing(
    tree: &DependencyTree,
    policy: MissingPolicy,
) -> Result<FilterDecision, NoTarget> {
    match policy {
        MissingPolicy::KeepAll => Ok(FilterDecision::Keep),
        MissingPolicy::DropAny => Ok(if tree.has_missing() {
            FilterDecision::Drop(DropReason::ContainsMissing)
        } else {
            FilterDecision::Keep
        }),
        MissingPolicy::DropAdjacentToTarget => {
            let target = tree
                .target_lemma()
                .ok_or_else(|| NoTarget(tree.sentence_id().to_owned()))?;
            let targets: Vec<usize> = tree
                .tokens()
                .iter()
                .filter(|t| t.lemma == target)
                .map(|t| t.index)
                .collect();
            if targets.is_empty() {
                return Ok(FilterDecision::Drop(DropReason::TargetNotFound));
            }
            let adjacent = targets.iter().any(|&ti| {
                let t = tree.token(ti);
                let head_missing = t.head != 0 && tree.token(t.head).missing;
                head_missing
                    || tree
                        .tokens()
                        .iter()
                        .any(|d| d.head == ti && d.missing)
            });
            Ok(if adjacent {
                FilterDecision::Drop(DropReason::MissingNeighborOfTarget)
            } else {
                FilterDecision::Keep
            })
        }
    }
}
