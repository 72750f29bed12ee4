//! Witness-producing finders for subdivisions in tournaments.
//!
//! Every finder returns either a [`subdivision::Subdivision`] that has been
//! re-checked by [`subdivision::verify`], or a structured
//! [`finder::FailureTrace`]. The [`oracle`] decides containment exactly on
//! small hosts.

pub mod bitset;
pub mod complete;
pub mod exec;
pub mod experiment;
pub mod finder;
pub mod oracle;
pub mod subdivision;
pub mod tournament;
pub mod transitive;
