//! The online monitor: three reach sets, three non-emptiness tables, four
//! verdict values.
//!
//! A session tracks the assumption automaton A and the two products
//! (property x A) and (negated property x A). Each observation element
//! pushes all three reach sets forward; a verdict query advances them to the
//! queried instant and tests which products still admit an accepting
//! divergent continuation.

use std::sync::Arc;

use crate::automata::{product, ProductError, Tba};
use crate::liveness::{compute_nonempty, intersects_nonempty, NonEmptyTable};
use crate::observations::{
    apply_element, normalize, Monitored, ObsFormula, ObservationElement, SymbolicStateSet,
};
use crate::rat::{format_rational, representable, scaled_int, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    /// Every admissible behavior satisfies the property.
    Sat,
    /// Every admissible behavior violates the property.
    Violated,
    /// Both outcomes are still possible.
    Unknown,
    /// No admissible behavior is left: the observations contradict the
    /// assumption.
    OutOfModel,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::Sat => "SAT",
            Verdict::Violated => "VIOLATED",
            Verdict::Unknown => "UNKNOWN",
            Verdict::OutOfModel => "OUT_OF_MODEL",
        };
        f.write_str(s)
    }
}

/// The information order on verdicts: may an issued verdict `a` be followed
/// by `b`? UNKNOWN precedes everything, OUT_OF_MODEL follows everything
/// (observations can always fall out of the assumption), and definitive
/// verdicts persist.
pub fn specificity_leq(a: Verdict, b: Verdict) -> bool {
    a == Verdict::Unknown || b == Verdict::OutOfModel || a == b
}

#[derive(Debug, thiserror::Error)]
pub enum InitError {
    #[error("alphabets differ: assumption has {assumption:?}, `{other}` has {got:?}")]
    AlphabetMismatch {
        assumption: Vec<String>,
        other: String,
        got: Vec<String>,
    },
    #[error("`{0}` has no initial location")]
    EmptyInitial(String),
    #[error("automata must share one scale: {0} vs {1}")]
    ScaleMismatch(i64, i64),
    #[error("product construction failed: {0}")]
    Product(#[from] ProductError),
}

#[derive(Debug, thiserror::Error)]
pub enum ObserveError {
    #[error("constant {0} is not representable at scale 1/{1}")]
    Scale(String, i64),
}

#[derive(Debug, thiserror::Error)]
pub enum QueryError {
    #[error("query time {t} precedes the observation horizon {horizon}")]
    BeforeHorizon { t: String, horizon: String },
    #[error("query time {0} is not representable at scale 1/{1}")]
    Scale(String, i64),
}

/// Monitoring state; cheap to clone (automata and tables are shared).
#[derive(Clone)]
pub struct MonitorState {
    assumption: Monitored,
    prop: Monitored,
    negprop: Monitored,
    table_assumption: Arc<NonEmptyTable>,
    table_prop: Arc<NonEmptyTable>,
    table_negprop: Arc<NonEmptyTable>,
    reach_assumption: SymbolicStateSet,
    reach_prop: SymbolicStateSet,
    reach_negprop: SymbolicStateSet,
    scale: i64,
    /// Supremum (scaled) of all processed observation windows; queries below
    /// it are rejected.
    horizon: i64,
    issued: Option<Verdict>,
    /// Runtime switch for the data-parallel schedule.
    pub parallel: bool,
}

/// Builds a monitor from scaled automata: the assumption A, an automaton for
/// the property, and one for its negation. Both property automata are paired
/// with A via the Büchi product; non-emptiness tables are computed up front.
pub fn init(assumption: &Tba, prop: &Tba, negprop: &Tba) -> Result<MonitorState, InitError> {
    for t in [prop, negprop] {
        if t.alphabet != assumption.alphabet {
            return Err(InitError::AlphabetMismatch {
                assumption: assumption.alphabet.clone(),
                other: t.name.clone(),
                got: t.alphabet.clone(),
            });
        }
        if t.scale != assumption.scale {
            return Err(InitError::ScaleMismatch(assumption.scale, t.scale));
        }
    }
    for t in [assumption, prop, negprop] {
        if t.initial_locations().is_empty() {
            return Err(InitError::EmptyInitial(t.name.clone()));
        }
    }

    let a = Arc::new(assumption.clone());
    let prop_prod = product(prop, assumption)?;
    let negprop_prod = product(negprop, assumption)?;

    let table_assumption = Arc::new(compute_nonempty(&a));
    let table_prop = Arc::new(compute_nonempty(&prop_prod.tba));
    let table_negprop = Arc::new(compute_nonempty(&negprop_prod.tba));

    let assumption_m = Monitored::from_assumption(a.clone());
    let prop_m = Monitored::from_product(prop_prod, a.clone());
    let negprop_m = Monitored::from_product(negprop_prod, a.clone());

    let reach_assumption = assumption_m.initial_set();
    let reach_prop = prop_m.initial_set();
    let reach_negprop = negprop_m.initial_set();

    Ok(MonitorState {
        assumption: assumption_m,
        prop: prop_m,
        negprop: negprop_m,
        table_assumption,
        table_prop,
        table_negprop,
        reach_assumption,
        reach_prop,
        reach_negprop,
        scale: assumption.scale,
        horizon: 0,
        issued: None,
        parallel: cfg!(feature = "parallel"),
    })
}

fn formula_constants(f: &ObsFormula, out: &mut Vec<Rational>) {
    match f {
        ObsFormula::Clock(a) => out.push(a.constant),
        ObsFormula::Not(g) => formula_constants(g, out),
        ObsFormula::And(l, r) | ObsFormula::Or(l, r) => {
            formula_constants(l, out);
            formula_constants(r, out);
        }
        _ => {}
    }
}

impl MonitorState {
    pub fn scale(&self) -> i64 {
        self.scale
    }

    /// Scaled supremum of the processed observation windows.
    pub fn horizon(&self) -> i64 {
        self.horizon
    }

    /// Entry counts of the three reach sets (assumption, property product,
    /// negated-property product).
    pub fn reach_sizes(&self) -> [usize; 3] {
        [
            self.reach_assumption.len(),
            self.reach_prop.len(),
            self.reach_negprop.len(),
        ]
    }

    pub fn reach_assumption(&self) -> &SymbolicStateSet {
        &self.reach_assumption
    }

    pub fn reach_prop(&self) -> &SymbolicStateSet {
        &self.reach_prop
    }

    pub fn reach_negprop(&self) -> &SymbolicStateSet {
        &self.reach_negprop
    }

    pub fn monitored_assumption(&self) -> &Monitored {
        &self.assumption
    }

    pub fn nonempty_tables(&self) -> [&NonEmptyTable; 3] {
        [
            &self.table_assumption,
            &self.table_prop,
            &self.table_negprop,
        ]
    }

    /// Consumes one observation element, pushing all three reach sets
    /// forward.
    pub fn observe(&mut self, e: &ObservationElement) -> Result<(), ObserveError> {
        for r in [e.lo, e.hi] {
            if !representable(r, self.scale) {
                return Err(ObserveError::Scale(format_rational(r), self.scale));
            }
        }
        let mut consts = Vec::new();
        formula_constants(&e.formula, &mut consts);
        for r in consts {
            if !representable(r, self.scale) {
                return Err(ObserveError::Scale(format_rational(r), self.scale));
            }
        }

        for part in normalize(e) {
            let scale = self.scale;
            let (ra, rp, rn) = crate::exec::join3(
                self.parallel,
                || apply_element(&self.reach_assumption, &part, &self.assumption, scale),
                || apply_element(&self.reach_prop, &part, &self.prop, scale),
                || apply_element(&self.reach_negprop, &part, &self.negprop, scale),
            );
            self.reach_assumption = ra;
            self.reach_prop = rp;
            self.reach_negprop = rn;
        }
        self.horizon = self.horizon.max(scaled_int(e.hi, self.scale));
        Ok(())
    }

    /// The verdict at time t, which must be at or beyond every observed
    /// window. Pure: repeated queries and later elements see the same state.
    pub fn verdict_at(&self, t: Rational) -> Result<Verdict, QueryError> {
        if !representable(t, self.scale) {
            return Err(QueryError::Scale(format_rational(t), self.scale));
        }
        let ts = scaled_int(t, self.scale);
        if ts < self.horizon {
            return Err(QueryError::BeforeHorizon {
                t: format_rational(t),
                horizon: format_rational(Rational::new(self.horizon, self.scale)),
            });
        }
        let (a_live, p_live, n_live) = crate::exec::join3(
            self.parallel,
            || {
                intersects_nonempty(
                    &self.reach_assumption.at_time(ts),
                    &self.table_assumption,
                )
            },
            || intersects_nonempty(&self.reach_prop.at_time(ts), &self.table_prop),
            || intersects_nonempty(&self.reach_negprop.at_time(ts), &self.table_negprop),
        );
        // Order matters: out-of-model wins, then satisfaction, then
        // violation. With a complementary property pair at most one of the
        // definitive cases can fire while a_live holds.
        Ok(if !a_live {
            Verdict::OutOfModel
        } else if !n_live {
            Verdict::Sat
        } else if !p_live {
            Verdict::Violated
        } else {
            Verdict::Unknown
        })
    }

    /// Queries and records the verdict, asserting the impartiality
    /// invariant: a verdict, once issued, may only be refined along the
    /// specificity order.
    pub fn issue_verdict(&mut self, t: Rational) -> Result<Verdict, QueryError> {
        let v = self.verdict_at(t)?;
        if let Some(prev) = self.issued {
            assert!(
                specificity_leq(prev, v),
                "impartiality violated: issued {prev} then {v}"
            );
        }
        if v != Verdict::Unknown {
            self.issued = Some(v);
        }
        Ok(v)
    }
}
