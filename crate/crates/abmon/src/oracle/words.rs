//! Word-level brute force: run enumeration on a stamp grid, observation
//! consistency witnesses, and the exhaustive four-valued verdict.
//!
//! Verdicts are decided by searching every consistent timed word with
//! stamps in half units of the instance's common grid. Consistency and
//! goodness constraints all compare clock differences against grid
//! constants, so the sets of admissible stamp vectors are cut out by
//! integer-unit inequalities; a nonempty such set always contains a
//! half-unit point, which makes the half-grid search exact rather than
//! approximate.

use std::collections::{HashMap, HashSet, VecDeque};

use num_integer::Integer;

use super::region::RegionOracle;
use super::OracleError;
use crate::automata::{product, Rel, Tba};
use crate::monitor::Verdict;
use crate::observations::{Multiplicity, ObsFormula, ObservationElement};
use crate::rat::{grid_points, scaled_int, Rational};

const CONFIG_CAP: usize = 500_000;

/// One finite run prefix: the start location and, per discrete step, the
/// emitted symbol, its absolute stamp, and the location entered.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleRun {
    pub start: usize,
    pub steps: Vec<(usize, Rational, usize)>,
}

/// Every run prefix of `b` with at most `max_steps` steps and stamps on
/// the `granularity` grid up to `horizon`, including the zero-step prefix
/// at each initial location. The prefix count is capped: automata with a
/// loop that stays enabled at a fixed stamp have unboundedly many prefixes
/// per added step, which is why the step bound is explicit.
pub fn enumerate_runs(
    b: &Tba,
    horizon: Rational,
    granularity: Rational,
    max_steps: usize,
    cap: usize,
) -> Result<Vec<OracleRun>, OracleError> {
    let zero = Rational::from_integer(0);
    let stamps = grid_points(zero, horizon, granularity);
    struct Prefix {
        loc: usize,
        v: Vec<Rational>,
        last: Rational,
        start: usize,
        steps: Vec<(usize, Rational, usize)>,
    }
    let mut queue: VecDeque<Prefix> = b
        .initial_locations()
        .into_iter()
        .map(|q| Prefix {
            loc: q,
            v: vec![zero; b.clocks.len()],
            last: zero,
            start: q,
            steps: Vec::new(),
        })
        .collect();
    let mut out = Vec::new();
    while let Some(p) = queue.pop_front() {
        out.push(OracleRun { start: p.start, steps: p.steps.clone() });
        if out.len() > cap {
            return Err(OracleError::TooLarge { what: "run prefixes", cap });
        }
        if p.steps.len() == max_steps {
            continue;
        }
        for &s in &stamps {
            if s < p.last {
                continue;
            }
            let elapsed = s - p.last;
            let shifted: Vec<Rational> = p.v.iter().map(|&x| x + elapsed).collect();
            for e in b.edges_from(p.loc) {
                if !e.guard.satisfied_by(&shifted) {
                    continue;
                }
                let mut post = shifted.clone();
                for &c in &e.resets {
                    post[c] = zero;
                }
                let mut steps = p.steps.clone();
                steps.push((e.symbol, s, e.to));
                queue.push_back(Prefix { loc: e.to, v: post, last: s, start: p.start, steps });
            }
        }
    }
    Ok(out)
}

/// The oracle's own formula evaluation, kept separate from the engine's
/// disjunct expansion on purpose: both sides of every cross-check should
/// reach truth values along different code paths.
fn formula_holds(f: &ObsFormula, letter: usize, loc: usize, v: &[Rational]) -> bool {
    match f {
        ObsFormula::Letter(a) => *a == letter,
        ObsFormula::AtLocation(q) => *q == loc,
        ObsFormula::Clock(atom) => rel_holds(atom.rel, v[atom.clock], atom.constant),
        ObsFormula::Not(g) => !formula_holds(g, letter, loc, v),
        ObsFormula::And(l, r) => {
            formula_holds(l, letter, loc, v) && formula_holds(r, letter, loc, v)
        }
        ObsFormula::Or(l, r) => {
            formula_holds(l, letter, loc, v) || formula_holds(r, letter, loc, v)
        }
    }
}

fn rel_holds(rel: Rel, lhs: Rational, rhs: Rational) -> bool {
    match rel {
        Rel::Lt => lhs < rhs,
        Rel::Le => lhs <= rhs,
        Rel::Eq => lhs == rhs,
        Rel::Ge => lhs >= rhs,
        Rel::Gt => lhs > rhs,
    }
}

fn rel_holds_int(rel: Rel, lhs: i64, rhs: i64) -> bool {
    match rel {
        Rel::Lt => lhs < rhs,
        Rel::Le => lhs <= rhs,
        Rel::Eq => lhs == rhs,
        Rel::Ge => lhs >= rhs,
        Rel::Gt => lhs > rhs,
    }
}

/// Whether one more event fits into the element right now.
fn admits_more(m: Multiplicity, count: u32) -> bool {
    match m {
        Multiplicity::Exactly(k) | Multiplicity::AtMost(k) => count < k,
        Multiplicity::AtLeast(_) => true,
    }
}

/// The count after one more event. `>= k` saturates at k, which is all the
/// closing test below needs; saturation keeps the search space finite.
fn bump(m: Multiplicity, count: u32) -> u32 {
    match m {
        Multiplicity::AtLeast(k) => (count + 1).min(k),
        _ => count + 1,
    }
}

/// Whether the element may be closed at this count.
fn closes(m: Multiplicity, count: u32) -> bool {
    match m {
        Multiplicity::Exactly(k) => count == k,
        Multiplicity::AtMost(_) => true,
        Multiplicity::AtLeast(k) => count >= k,
    }
}

/// Whether `a` can read `word` (letters at nondecreasing stamps) in a way
/// consistent with `elements`: events are matched to the elements in
/// order, stamps lie inside the windows, each element's formula holds of
/// the post-event configuration, and every multiplicity is closed by the
/// end of the word. Formulas resolve against `a` itself, so `a` plays the
/// assumption's role.
pub fn has_witness(a: &Tba, word: &[(usize, Rational)], elements: &[ObservationElement]) -> bool {
    for w in word.windows(2) {
        assert!(w[0].1 <= w[1].1, "word stamps must be nondecreasing");
    }
    let zero = Rational::from_integer(0);
    type Key = (usize, usize, u32, usize, Vec<Rational>);
    // Every move advances (event, element) lexicographically, so the
    // search is acyclic and plain memoization suffices.
    fn go(
        a: &Tba,
        word: &[(usize, Rational)],
        elements: &[ObservationElement],
        memo: &mut HashMap<Key, bool>,
        ev: usize,
        elem: usize,
        count: u32,
        loc: usize,
        v: &[Rational],
    ) -> bool {
        if elem == elements.len() {
            return ev == word.len();
        }
        let key = (ev, elem, count, loc, v.to_vec());
        if let Some(&hit) = memo.get(&key) {
            return hit;
        }
        let el = &elements[elem];
        let mut found = closes(el.mult, count)
            && go(a, word, elements, memo, ev, elem + 1, 0, loc, v);
        if !found && ev < word.len() && admits_more(el.mult, count) {
            let (letter, stamp) = word[ev];
            if el.lo <= stamp && stamp <= el.hi {
                let prev = if ev == 0 { Rational::from_integer(0) } else { word[ev - 1].1 };
                let shifted: Vec<Rational> = v.iter().map(|&x| x + (stamp - prev)).collect();
                for e in a.edges_from(loc) {
                    if e.symbol != letter || !e.guard.satisfied_by(&shifted) {
                        continue;
                    }
                    let mut post = shifted.clone();
                    for &c in &e.resets {
                        post[c] = Rational::from_integer(0);
                    }
                    if !formula_holds(&el.formula, letter, e.to, &post) {
                        continue;
                    }
                    if go(a, word, elements, memo, ev + 1, elem, bump(el.mult, count), e.to, &post)
                    {
                        found = true;
                        break;
                    }
                }
            }
        }
        memo.insert(key, found);
        found
    }
    let mut memo = HashMap::new();
    a.initial_locations().into_iter().any(|q| {
        go(a, word, elements, &mut memo, 0, 0, 0, q, &vec![zero; a.clocks.len()])
    })
}

/// One automaton as the verdict search sees it: the automaton to run, plus
/// the projection of its locations and clocks onto the assumption, against
/// which observation formulas resolve.
struct View<'a> {
    tba: &'a Tba,
    aloc: Vec<usize>,
    aclock: Vec<usize>,
}

/// Whether some word consistent with the whole observation leaves `view`
/// in a state from which an accepting divergent continuation exists after
/// delaying to the query time. Stamps range over half units.
fn good_after(
    view: &View,
    observation: &[ObservationElement],
    half: i64,
    t_half: i64,
) -> Result<bool, OracleError> {
    #[derive(Clone, PartialEq, Eq, Hash)]
    struct Cfg {
        elem: usize,
        count: u32,
        loc: usize,
        v: Vec<i64>,
        last: i64,
    }
    let mut oracle = RegionOracle::new(view.tba, half);
    let nclocks = view.tba.clocks.len();
    let mut seen: HashSet<Cfg> = HashSet::new();
    let mut queue: VecDeque<Cfg> = VecDeque::new();
    for q in view.tba.initial_locations() {
        let c = Cfg { elem: 0, count: 0, loc: q, v: vec![0; nclocks], last: 0 };
        if seen.insert(c.clone()) {
            queue.push_back(c);
        }
    }
    while let Some(c) = queue.pop_front() {
        if seen.len() > CONFIG_CAP {
            return Err(OracleError::TooLarge { what: "observation configurations", cap: CONFIG_CAP });
        }
        if c.elem == observation.len() {
            let at_query: Vec<Rational> = c
                .v
                .iter()
                .map(|&x| Rational::new(x + t_half - c.last, half))
                .collect();
            if oracle.nonempty(c.loc, &at_query) {
                return Ok(true);
            }
            continue;
        }
        let el = &observation[c.elem];
        let push = |cfg: Cfg, seen: &mut HashSet<Cfg>, queue: &mut VecDeque<Cfg>| {
            if seen.insert(cfg.clone()) {
                queue.push_back(cfg);
            }
        };
        if closes(el.mult, c.count) {
            push(Cfg { elem: c.elem + 1, count: 0, ..c.clone() }, &mut seen, &mut queue);
        }
        if admits_more(el.mult, c.count) {
            let lo = scaled_int(el.lo, half).max(c.last);
            let hi = scaled_int(el.hi, half);
            for stamp in lo..=hi {
                let elapsed = stamp - c.last;
                for e in view.tba.edges_from(c.loc) {
                    let shifted: Vec<i64> = c.v.iter().map(|&x| x + elapsed).collect();
                    let guard_ok = e
                        .guard
                        .atoms
                        .iter()
                        .all(|a| rel_holds_int(a.rel, shifted[a.clock], scaled_int(a.constant, half)));
                    if !guard_ok {
                        continue;
                    }
                    let mut post = shifted;
                    for &r in &e.resets {
                        post[r] = 0;
                    }
                    let assumption_view: Vec<Rational> = view
                        .aclock
                        .iter()
                        .map(|&i| Rational::new(post[i], half))
                        .collect();
                    if !formula_holds(&el.formula, e.symbol, view.aloc[e.to], &assumption_view) {
                        continue;
                    }
                    let cfg = Cfg {
                        elem: c.elem,
                        count: bump(el.mult, c.count),
                        loc: e.to,
                        v: post,
                        last: stamp,
                    };
                    push(cfg, &mut seen, &mut queue);
                }
            }
        }
    }
    Ok(false)
}

/// Exhaustive verdict per the four-valued definition: out of model when no
/// consistent word stays inside the assumption, satisfied when none stays
/// inside the negated property, violated when none stays inside the
/// property, unknown otherwise. Exact for instances whose constants and
/// window endpoints lie on a common grid.
pub fn brute_verdict(
    assumption: &Tba,
    prop: &Tba,
    negprop: &Tba,
    observation: &[ObservationElement],
    t: Rational,
) -> Result<Verdict, OracleError> {
    let mut unit = 1i64;
    for b in [assumption, prop, negprop] {
        for e in &b.edges {
            for a in &e.guard.atoms {
                unit = unit.lcm(a.constant.denom());
            }
        }
    }
    for el in observation {
        unit = unit.lcm(el.lo.denom()).lcm(el.hi.denom());
    }
    unit = unit.lcm(t.denom());
    let half = unit.checked_mul(2).expect("grid overflow");
    let t_half = scaled_int(t, half);
    for el in observation {
        assert!(
            scaled_int(el.hi, half) <= t_half,
            "query time must not precede the observation horizon"
        );
    }

    let assumption_view = View {
        tba: assumption,
        aloc: (0..assumption.locations.len()).collect(),
        aclock: (0..assumption.clocks.len()).collect(),
    };
    if !good_after(&assumption_view, observation, half, t_half)? {
        return Ok(Verdict::OutOfModel);
    }

    let neg = product(negprop, assumption)
        .expect("negated property and assumption must be compatible");
    let neg_view = View {
        tba: &neg.tba,
        aloc: neg.components.iter().map(|&(_, r, _)| r).collect(),
        aclock: neg.right_clock_map.clone(),
    };
    if !good_after(&neg_view, observation, half, t_half)? {
        return Ok(Verdict::Sat);
    }

    let pos = product(prop, assumption).expect("property and assumption must be compatible");
    let pos_view = View {
        tba: &pos.tba,
        aloc: pos.components.iter().map(|&(_, r, _)| r).collect(),
        aclock: pos.right_clock_map.clone(),
    };
    if !good_after(&pos_view, observation, half, t_half)? {
        return Ok(Verdict::Violated);
    }
    Ok(Verdict::Unknown)
}

#[cfg(test)]
mod tests {
    use super::super::testutil::{guarded_b_assumption, int, tba};
    use super::*;
    use crate::observations::{Multiplicity, ObsFormula, ObservationElement};

    fn universal(alphabet: &[&str]) -> Tba {
        let names: Vec<String> = alphabet.iter().map(|s| s.to_string()).collect();
        Tba::universal(&names)
    }

    fn element(f: ObsFormula, lo: i64, hi: i64, mult: Multiplicity) -> ObservationElement {
        ObservationElement { formula: f, lo: int(lo), hi: int(hi), mult }
    }

    /// Property pair for the classical deadline example: an `a` must occur
    /// at or before 10 and no `b` may occur at or before 20.
    fn deadline_prop() -> Tba {
        tba(
            "deadline",
            &["a", "b"],
            &["x"],
            &[("q0", true, false), ("q1", false, false), ("ok", false, true)],
            &[
                (0, 0, 1, vec![(0, Rel::Le, int(10))], vec![]),
                (1, 0, 1, vec![(0, Rel::Le, int(20))], vec![]),
                (1, 0, 2, vec![(0, Rel::Gt, int(20))], vec![]),
                (1, 1, 2, vec![(0, Rel::Gt, int(20))], vec![]),
                (2, 0, 2, vec![], vec![]),
                (2, 1, 2, vec![], vec![]),
            ],
        )
    }

    fn deadline_negprop() -> Tba {
        tba(
            "deadline-negated",
            &["a", "b"],
            &["x"],
            &[("p0", true, false), ("p1", false, false), ("bad", false, true)],
            &[
                (0, 1, 2, vec![], vec![]),
                (0, 0, 2, vec![(0, Rel::Gt, int(10))], vec![]),
                (0, 0, 1, vec![(0, Rel::Le, int(10))], vec![]),
                (1, 1, 2, vec![(0, Rel::Le, int(20))], vec![]),
                (1, 0, 1, vec![], vec![]),
                (1, 1, 1, vec![(0, Rel::Gt, int(20))], vec![]),
                (2, 0, 2, vec![], vec![]),
                (2, 1, 2, vec![], vec![]),
            ],
        )
    }

    #[test]
    fn counts_runs_on_a_two_edge_chain() {
        let chain = tba(
            "chain",
            &["a", "b"],
            &["x"],
            &[("q0", true, false), ("q1", false, false), ("q2", false, true)],
            &[
                (0, 0, 1, vec![], vec![0]),
                (1, 1, 2, vec![(0, Rel::Ge, int(1))], vec![]),
            ],
        );
        let runs = enumerate_runs(&chain, int(2), Rational::new(1, 2), 4, 10_000).unwrap();
        // 1 empty prefix, 5 one-step prefixes (a at each grid point), and 6
        // two-step prefixes (b at least one unit after the a).
        assert_eq!(runs.len(), 12);
        assert_eq!(runs.iter().filter(|r| r.steps.len() == 1).count(), 5);
        let pairs: Vec<_> = runs.iter().filter(|r| r.steps.len() == 2).collect();
        assert_eq!(pairs.len(), 6);
        for r in pairs {
            assert!(r.steps[1].1 - r.steps[0].1 >= int(1));
        }
    }

    #[test]
    fn unsatisfiable_initial_guards_leave_only_the_empty_prefix() {
        let stuck = tba(
            "stuck",
            &["a"],
            &["x"],
            &[("q0", true, true), ("q1", false, true)],
            &[(0, 0, 1, vec![(0, Rel::Ge, int(5))], vec![])],
        );
        let runs = enumerate_runs(&stuck, int(2), Rational::new(1, 2), 3, 1_000).unwrap();
        assert_eq!(runs.len(), 1);
        assert!(runs[0].steps.is_empty());
    }

    #[test]
    fn first_steps_appear_at_every_grid_point() {
        let b = guarded_b_assumption();
        let runs = enumerate_runs(&b, int(2), Rational::new(1, 2), 2, 100_000).unwrap();
        for k in 0..=4 {
            let s = Rational::new(k, 2);
            assert!(
                runs.iter().any(|r| r.steps.first() == Some(&(0, s, 1))),
                "missing a-step at {s}"
            );
        }
    }

    #[test]
    fn zero_delay_loops_hit_the_cap() {
        let spin = tba(
            "spin",
            &["a"],
            &[],
            &[("q0", true, true)],
            &[(0, 0, 0, vec![], vec![])],
        );
        let err = enumerate_runs(&spin, int(1), int(1), 50, 10).unwrap_err();
        assert!(matches!(err, OracleError::TooLarge { .. }));
    }

    #[test]
    fn witnesses_follow_windows_and_formulas() {
        let b = guarded_b_assumption();
        let a_then_b = [
            element(ObsFormula::Letter(0), 0, 0, Multiplicity::Exactly(1)),
            element(ObsFormula::Letter(1), 1, 2, Multiplicity::Exactly(1)),
        ];
        // The b falls inside its window but violates the assumption's own
        // guard (y <= 10 leads only into the trap, which is still a run).
        assert!(has_witness(&b, &[(0, int(0)), (1, Rational::new(3, 2))], &a_then_b));
        assert!(!has_witness(&b, &[(0, int(0)), (1, Rational::new(5, 2))], &a_then_b));
        assert!(!has_witness(&b, &[(1, int(0)), (0, int(1))], &a_then_b));
        assert!(!has_witness(&b, &[(0, int(0))], &a_then_b));

        let at_least = [
            element(ObsFormula::Letter(0), 0, 0, Multiplicity::Exactly(1)),
            element(ObsFormula::Letter(0), 1, 3, Multiplicity::AtLeast(0)),
        ];
        assert!(has_witness(&b, &[(0, int(0))], &at_least));
        assert!(has_witness(&b, &[(0, int(0)), (0, int(1)), (0, int(1)), (0, int(3))], &at_least));

        let at_most = [element(ObsFormula::Letter(0), 0, 5, Multiplicity::AtMost(1))];
        assert!(has_witness(&b, &[], &at_most));
        assert!(!has_witness(&b, &[(0, int(1)), (0, int(2))], &at_most));
    }

    #[test]
    fn witness_formulas_see_the_post_event_configuration() {
        let b = guarded_b_assumption();
        let into_q1 = [element(ObsFormula::AtLocation(1), 0, 5, Multiplicity::Exactly(1))];
        assert!(has_witness(&b, &[(0, int(1))], &into_q1));
        let into_q0 = [element(ObsFormula::AtLocation(0), 0, 5, Multiplicity::Exactly(1))];
        assert!(!has_witness(&b, &[(0, int(1))], &into_q0));

        // y resets on the a edge, so the post-event value is zero no matter
        // how late the event fires.
        let y_reset = [element(
            ObsFormula::Clock(crate::automata::ClockConstraintAtom {
                clock: 1,
                rel: Rel::Le,
                constant: int(0),
            }),
            0,
            5,
            Multiplicity::Exactly(1),
        )];
        assert!(has_witness(&b, &[(0, int(4))], &y_reset));
        let x_grown = [element(
            ObsFormula::Clock(crate::automata::ClockConstraintAtom {
                clock: 0,
                rel: Rel::Ge,
                constant: int(3),
            }),
            0,
            5,
            Multiplicity::Exactly(1),
        )];
        assert!(has_witness(&b, &[(0, int(4))], &x_grown));
        assert!(!has_witness(&b, &[(0, int(2))], &x_grown));
    }

    #[test]
    fn empty_observation_on_universal_instances_is_sat() {
        let assumption = universal(&["a", "b"]);
        let prop = universal(&["a", "b"]);
        let negprop = tba(
            "never",
            &["a", "b"],
            &[],
            &[("q0", true, false)],
            &[(0, 0, 0, vec![], vec![]), (0, 1, 0, vec![], vec![])],
        );
        let v = brute_verdict(&assumption, &prop, &negprop, &[], int(0)).unwrap();
        assert_eq!(v, Verdict::Sat);
    }

    #[test]
    fn unmatched_letters_leave_the_model() {
        let only_a = tba(
            "only-a",
            &["a", "b"],
            &[],
            &[("q0", true, true)],
            &[(0, 0, 0, vec![], vec![])],
        );
        let obs = [element(ObsFormula::Letter(1), 3, 3, Multiplicity::Exactly(1))];
        let v =
            brute_verdict(&only_a, &universal(&["a", "b"]), &universal(&["a", "b"]), &obs, int(3))
                .unwrap();
        assert_eq!(v, Verdict::OutOfModel);
    }

    #[test]
    fn deadline_scenarios_cover_three_verdicts() {
        let assumption = universal(&["a", "b"]);
        let prop = deadline_prop();
        let negprop = deadline_negprop();

        // A b at 5 refutes the property on every continuation.
        let early_b = [element(ObsFormula::Letter(1), 5, 5, Multiplicity::Exactly(1))];
        assert_eq!(
            brute_verdict(&assumption, &prop, &negprop, &early_b, int(5)).unwrap(),
            Verdict::Violated
        );

        // An a at 5 settles the property once the b deadline has passed.
        let timely_a = [element(ObsFormula::Letter(0), 5, 5, Multiplicity::Exactly(1))];
        assert_eq!(
            brute_verdict(&assumption, &prop, &negprop, &timely_a, int(21)).unwrap(),
            Verdict::Sat
        );
        assert_eq!(
            brute_verdict(&assumption, &prop, &negprop, &timely_a, int(15)).unwrap(),
            Verdict::Unknown
        );

        // Nothing observed past the request deadline: the property can no
        // longer be satisfied.
        assert_eq!(
            brute_verdict(&assumption, &prop, &negprop, &[], int(11)).unwrap(),
            Verdict::Violated
        );
    }

    #[test]
    fn agrees_with_the_monitor_on_the_deadline_pair() {
        let assumption = universal(&["a", "b"]);
        let prop = deadline_prop();
        let negprop = deadline_negprop();
        let timely_a = element(ObsFormula::Letter(0), 5, 5, Multiplicity::Exactly(1));
        for t in [5i64, 15, 21] {
            let mut m = crate::monitor::init(&assumption, &prop, &negprop).unwrap();
            m.observe(&timely_a).unwrap();
            let engine = m.verdict_at(int(t)).unwrap();
            let brute =
                brute_verdict(&assumption, &prop, &negprop, &[timely_a.clone()], int(t)).unwrap();
            assert_eq!(engine, brute, "mismatch at query {t}");
        }
    }
}
