//! Aggregated syntactic networks built from dependency treebanks.
//!
//! The pipeline runs corpus → [`asn`] → [`hierarchy`], [`graph_stats`] and
//! [`powerlaw`] per century, with [`diachrony`] comparing centuries.

pub mod asn;
pub mod corpus;
pub mod hierarchy;
pub mod graph_stats;
pub mod powerlaw;
pub mod diachrony;
pub mod synthetic;
pub mod cli;
