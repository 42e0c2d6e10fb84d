//! Online monitoring of timed Büchi properties under assumptions, over
//! uncertain and partially observable event streams.
//!
//! The monitor consumes a stream of observation elements, each constraining
//! how many events happened in a time window and what the events looked
//! like, and answers verdict queries with one of four values: the property
//! is satisfied on every admissible continuation, violated on every one,
//! undetermined, or the observations have left the assumption's language
//! entirely. Internally everything runs on zone-based reach sets over the
//! assumption automaton and two property (x) assumption Büchi products,
//! pruned against precomputed non-emptiness certificates.

pub mod automata;
pub mod cli;
pub mod exec;
pub mod liveness;
pub mod monitor;
pub mod observations;
pub mod oracle;
pub mod rat;
pub mod zones;
