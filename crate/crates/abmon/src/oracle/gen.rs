//! Seeded random instances for the engine/oracle cross-checks.
//!
//! Everything is driven by a caller-supplied RNG so that failing cases can
//! be replayed from the seed alone. Sizes default to the envelope the
//! exhaustive verdict search is comfortable with: up to three locations
//! and two clocks per automaton, integer constants up to five, windows
//! inside a horizon of ten.

use rand::Rng;

use crate::automata::{ClockConstraintAtom, Edge, Guard, Location, Rel, Tba};
use crate::observations::{Multiplicity, ObsFormula, ObservationElement};
use crate::rat::Rational;

#[derive(Clone, Debug)]
pub struct GenConfig {
    pub max_locations: usize,
    pub max_clocks: usize,
    pub max_constant: i64,
    pub max_edges: usize,
    pub max_elements: usize,
    /// Upper bound for window endpoints; queries land at or shortly after
    /// the largest generated endpoint.
    pub horizon: i64,
    /// Restrict observation formulas to letter atoms. Location and clock
    /// atoms resolve against one specific assumption, so cross-checks that
    /// swap the assumption out need this.
    pub letter_formulas_only: bool,
}

impl Default for GenConfig {
    fn default() -> GenConfig {
        GenConfig {
            max_locations: 3,
            max_clocks: 2,
            max_constant: 5,
            max_edges: 6,
            max_elements: 3,
            horizon: 10,
            letter_formulas_only: false,
        }
    }
}

/// A monitoring instance small enough for exhaustive verdict search.
#[derive(Clone, Debug)]
pub struct DiscreteInstance {
    pub assumption: Tba,
    pub prop: Tba,
    pub negprop: Tba,
    pub observation: Vec<ObservationElement>,
    pub query: Rational,
}

const ALPHABET: [&str; 2] = ["a", "b"];
const CLOCK_NAMES: [&str; 2] = ["x", "y"];
const RELS: [Rel; 5] = [Rel::Lt, Rel::Le, Rel::Eq, Rel::Ge, Rel::Gt];
const MULTS: [Multiplicity; 6] = [
    Multiplicity::Exactly(1),
    Multiplicity::Exactly(2),
    Multiplicity::AtMost(1),
    Multiplicity::AtMost(2),
    Multiplicity::AtLeast(0),
    Multiplicity::AtLeast(1),
];

/// A random automaton over the shared two-letter alphabet. Location zero
/// is always initial so the monitor can start; acceptance is a coin flip
/// per location and may well be empty, which is a legitimate instance.
pub fn random_tba(rng: &mut impl Rng, name: &str, cfg: &GenConfig) -> Tba {
    let nlocs = rng.gen_range(1..=cfg.max_locations);
    let nclocks = rng.gen_range(0..=cfg.max_clocks);
    let locations = (0..nlocs)
        .map(|i| Location {
            id: format!("q{i}"),
            initial: i == 0 || rng.gen_bool(0.3),
            accepting: rng.gen_bool(0.5),
        })
        .collect();
    let nedges = rng.gen_range(1..=cfg.max_edges);
    let edges = (0..nedges)
        .map(|_| {
            let natoms = if nclocks == 0 { 0 } else { rng.gen_range(0..=2) };
            let atoms = (0..natoms)
                .map(|_| ClockConstraintAtom {
                    clock: rng.gen_range(0..nclocks),
                    rel: RELS[rng.gen_range(0..RELS.len())],
                    constant: Rational::from_integer(rng.gen_range(0..=cfg.max_constant)),
                })
                .collect();
            let resets: Vec<usize> = (0..nclocks).filter(|_| rng.gen_bool(0.4)).collect();
            Edge {
                from: rng.gen_range(0..nlocs),
                to: rng.gen_range(0..nlocs),
                symbol: rng.gen_range(0..ALPHABET.len()),
                guard: Guard { atoms },
                resets,
            }
        })
        .collect();
    Tba {
        name: name.to_string(),
        alphabet: ALPHABET.iter().map(|s| s.to_string()).collect(),
        clocks: CLOCK_NAMES[..nclocks].iter().map(|s| s.to_string()).collect(),
        locations,
        edges,
        scale: 1,
    }
}

fn random_formula(rng: &mut impl Rng, assumption: &Tba, depth: usize, cfg: &GenConfig) -> ObsFormula {
    if depth > 0 && rng.gen_bool(0.4) {
        let op = rng.gen_range(0..3);
        let l = Box::new(random_formula(rng, assumption, depth - 1, cfg));
        return match op {
            0 => ObsFormula::Not(l),
            1 => ObsFormula::And(l, Box::new(random_formula(rng, assumption, depth - 1, cfg))),
            _ => ObsFormula::Or(l, Box::new(random_formula(rng, assumption, depth - 1, cfg))),
        };
    }
    let can_clock = !cfg.letter_formulas_only && !assumption.clocks.is_empty();
    let can_loc = !cfg.letter_formulas_only;
    let pick = rng.gen_range(0..10);
    if can_clock && pick < 2 {
        ObsFormula::Clock(ClockConstraintAtom {
            clock: rng.gen_range(0..assumption.clocks.len()),
            rel: RELS[rng.gen_range(0..RELS.len())],
            constant: Rational::from_integer(rng.gen_range(0..=cfg.max_constant)),
        })
    } else if can_loc && pick < 4 {
        ObsFormula::AtLocation(rng.gen_range(0..assumption.locations.len()))
    } else {
        ObsFormula::Letter(rng.gen_range(0..assumption.alphabet.len()))
    }
}

/// Random elements with integer windows inside the horizon, plus a query
/// on the half grid at or after every window's end.
pub fn random_observation(
    rng: &mut impl Rng,
    assumption: &Tba,
    cfg: &GenConfig,
) -> (Vec<ObservationElement>, Rational) {
    let k = rng.gen_range(1..=cfg.max_elements);
    let mut elements = Vec::with_capacity(k);
    let mut horizon = 0i64;
    for _ in 0..k {
        let lo = rng.gen_range(0..cfg.horizon);
        let hi = if rng.gen_bool(0.3) { lo } else { rng.gen_range(lo..=cfg.horizon) };
        horizon = horizon.max(hi);
        elements.push(ObservationElement {
            formula: random_formula(rng, assumption, 2, cfg),
            lo: Rational::from_integer(lo),
            hi: Rational::from_integer(hi),
            mult: MULTS[rng.gen_range(0..MULTS.len())],
        });
    }
    let query = Rational::from_integer(horizon) + Rational::new(rng.gen_range(0..=4), 2);
    (elements, query)
}

pub fn random_instance(rng: &mut impl Rng, cfg: &GenConfig) -> DiscreteInstance {
    let assumption = random_tba(rng, "assumption", cfg);
    let prop = random_tba(rng, "property", cfg);
    let negprop = random_tba(rng, "negated-property", cfg);
    let (observation, query) = random_observation(rng, &assumption, cfg);
    DiscreteInstance { assumption, prop, negprop, observation, query }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generation_is_deterministic_under_a_seed() {
        let cfg = GenConfig::default();
        let a = random_instance(&mut ChaCha8Rng::seed_from_u64(7), &cfg);
        let b = random_instance(&mut ChaCha8Rng::seed_from_u64(7), &cfg);
        assert_eq!(a.assumption.edges, b.assumption.edges);
        assert_eq!(a.prop.edges, b.prop.edges);
        assert_eq!(a.observation, b.observation);
        assert_eq!(a.query, b.query);
    }

    #[test]
    fn instances_respect_the_configured_bounds() {
        let cfg = GenConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let inst = random_instance(&mut rng, &cfg);
            for b in [&inst.assumption, &inst.prop, &inst.negprop] {
                assert!(b.locations.len() <= cfg.max_locations);
                assert!(b.clocks.len() <= cfg.max_clocks);
                assert!(!b.initial_locations().is_empty());
                assert!(!b.edges.is_empty() && b.edges.len() <= cfg.max_edges);
                for e in &b.edges {
                    for a in &e.guard.atoms {
                        assert!(a.constant.is_integer());
                        assert!(*a.constant.numer() <= cfg.max_constant);
                    }
                }
            }
            for el in &inst.observation {
                assert!(el.lo <= el.hi);
                assert!(el.hi <= Rational::from_integer(cfg.horizon));
                assert!(el.hi <= inst.query);
            }
        }
    }

    #[test]
    fn letter_only_mode_avoids_location_and_clock_atoms() {
        fn letters_only(f: &ObsFormula) -> bool {
            match f {
                ObsFormula::Letter(_) => true,
                ObsFormula::AtLocation(_) | ObsFormula::Clock(_) => false,
                ObsFormula::Not(g) => letters_only(g),
                ObsFormula::And(l, r) | ObsFormula::Or(l, r) => {
                    letters_only(l) && letters_only(r)
                }
            }
        }
        let cfg = GenConfig { letter_formulas_only: true, ..GenConfig::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let inst = random_instance(&mut rng, &cfg);
            for el in &inst.observation {
                assert!(letters_only(&el.formula));
            }
        }
    }
}
