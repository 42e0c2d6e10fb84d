//! Brute-force reference implementations used by tests and cross-checks.
//!
//! Everything in here is deliberately independent of the symbolic engine:
//! emptiness is decided on classic clock regions instead of zones, word
//! consistency by explicit search instead of reach-set iteration, and
//! verdicts by exhaustive enumeration over a discrete time grid. The only
//! shared code is the automaton and observation data model. Nothing on the
//! production path calls into this module.

mod gen;
mod region;
mod words;

pub use gen::{random_instance, random_observation, random_tba, DiscreteInstance, GenConfig};
pub use region::{region_nonempty, RegionOracle};
pub use words::{brute_verdict, enumerate_runs, has_witness, OracleRun};

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error("oracle search exceeded the cap of {cap} {what}")]
    TooLarge { what: &'static str, cap: usize },
}
