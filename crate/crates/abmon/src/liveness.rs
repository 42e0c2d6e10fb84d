//! Büchi non-emptiness certificates.
//!
//! For each location q of an automaton this module computes the set of clock
//! valuations v such that some time-divergent run from (q, v) visits
//! accepting locations infinitely often, as a finite union of maximal zones.
//! Reach sets are pruned against these tables: a symbolic state contributes
//! admissible behavior only where it meets them.
//!
//! Divergence is handled by first strengthening the automaton so that every
//! accepting visit costs at least one time unit (see
//! [`crate::automata::strongly_non_zeno`]); on the strengthened automaton,
//! runs with infinitely many accepting visits diverge by construction, so a
//! plain Büchi fixed point suffices. The fixed point is the standard nested
//! one: greatest Y such that Y = Pre*(Acc /\ Pre(Y)), where Pre is one
//! delay-then-edge step computed backward on zones. The added witness clock
//! is projected away at the end; goodness of an original state does not
//! depend on it.

use std::sync::Arc;

use crate::automata::{strongly_non_zeno, Edge, Tba};
use crate::observations::{SymbolicStateSet, TIME_COL};
use crate::rat::Rational;
use crate::zones::{Rel, Zone};

/// Per-location maximal zones (over the automaton clocks, no time clock)
/// from which an accepting divergent run exists.
pub struct NonEmptyTable {
    zones: Vec<Vec<Zone>>,
    ctx: Arc<Vec<String>>,
}

impl NonEmptyTable {
    pub fn zones_at(&self, loc: usize) -> &[Zone] {
        &self.zones[loc]
    }

    pub fn clocks(&self) -> &Arc<Vec<String>> {
        &self.ctx
    }

    /// Membership of a concrete valuation (scaled units).
    pub fn contains(&self, loc: usize, valuation: &[Rational]) -> bool {
        self.zones[loc].iter().any(|z| z.satisfies(valuation))
    }

    pub fn is_all_empty(&self) -> bool {
        self.zones.iter().all(|v| v.is_empty())
    }

    /// Human-readable listing, one line per (location, zone).
    pub fn dump(&self, tba: &Tba) -> String {
        let mut out = String::new();
        for (q, zs) in self.zones.iter().enumerate() {
            let id = &tba.locations[q].id;
            if zs.is_empty() {
                out.push_str(&format!("{id}: (none)\n"));
                continue;
            }
            for z in zs {
                out.push_str(&format!("{id}: {}\n", describe_zone(z)));
            }
        }
        out
    }
}

fn describe_zone(z: &Zone) -> String {
    let names = z.clocks();
    let name = |i: usize| {
        if i == 0 {
            "0".to_string()
        } else {
            names[i - 1].clone()
        }
    };
    let mut parts = Vec::new();
    for i in 0..z.dim() {
        for j in 0..z.dim() {
            if i == j {
                continue;
            }
            let b = z.bound(i, j);
            if b.is_infinite() {
                continue;
            }
            // Skip the implicit x >= 0 rows.
            if i == 0 && b == crate::zones::Bound::LE_ZERO {
                continue;
            }
            let rel = if b.is_strict() { "<" } else { "<=" };
            let lhs = if j == 0 {
                name(i)
            } else if i == 0 {
                format!("-{}", name(j))
            } else {
                format!("{}-{}", name(i), name(j))
            };
            parts.push(format!("{lhs}{rel}{}", b.value()));
        }
    }
    if parts.is_empty() {
        "true".to_string()
    } else {
        parts.join(" & ")
    }
}

/// Matrix column of automaton clock c in table zones (no time clock here).
fn col(c: usize) -> usize {
    c + 1
}

/// Backward one-step predecessor through an edge: valuations from which some
/// delay makes the guard true and the post-reset state lands in `target`.
fn pre_edge(target: &Zone, e: &Edge) -> Zone {
    let mut z = target.clone();
    // The reset clocks were zero right after the edge.
    for &c in &e.resets {
        z = z.and_atom(col(c), Rel::Eq, 0);
        if z.is_empty() {
            return z;
        }
    }
    // Their pre-reset values are unconstrained.
    let cols: Vec<usize> = e.resets.iter().map(|&c| col(c)).collect();
    z = z.free(&cols);
    for a in &e.guard.atoms {
        z = z.and_atom(col(a.clock), a.rel, a.int_const());
        if z.is_empty() {
            return z;
        }
    }
    z.down()
}

/// Union-of-zones helper keeping only maximal elements, sorted for stable
/// comparison.
fn reduce(mut zs: Vec<Zone>) -> Vec<Zone> {
    zs.retain(|z| !z.is_empty());
    let mut out: Vec<Zone> = Vec::with_capacity(zs.len());
    for z in zs {
        if out.iter().any(|o| o.includes(&z)) {
            continue;
        }
        out.retain(|o| !z.includes(o));
        out.push(z);
    }
    out.sort_by(|a, b| a.cmp_key().cmp(&b.cmp_key()));
    out
}

fn union_lists_equal(a: &[Vec<Zone>], b: &[Vec<Zone>]) -> bool {
    a == b
}

/// Computes the non-emptiness table of a scaled automaton.
pub fn compute_nonempty(b: &Tba) -> NonEmptyTable {
    let nz = strongly_non_zeno(b);
    let t = &nz.tba;
    let ctx_nz: Arc<Vec<String>> = Arc::new(t.clocks.clone());
    let n = t.locations.len();
    let accepting: Vec<bool> = t.locations.iter().map(|l| l.accepting).collect();

    // Greatest fixed point over candidate good sets, one zone list per
    // location of the strengthened automaton.
    let mut y: Vec<Vec<Zone>> = (0..n)
        .map(|_| vec![Zone::universal(ctx_nz.clone())])
        .collect();

    let mut outer = 0usize;
    loop {
        outer += 1;
        assert!(outer <= 10_000, "non-emptiness fixed point did not converge");

        // Target layer: accepting states that can still step into y.
        let mut target: Vec<Vec<Zone>> = vec![Vec::new(); n];
        for (q, tgt) in target.iter_mut().enumerate() {
            if !accepting[q] {
                continue;
            }
            let mut acc = Vec::new();
            for e in t.edges_from(q) {
                for w in &y[e.to] {
                    acc.push(pre_edge(w, e));
                }
            }
            *tgt = reduce(acc);
        }

        // Least fixed point: everything that can reach the target layer.
        let mut x = target;
        loop {
            let mut changed = false;
            for e in &t.edges {
                let preds: Vec<Zone> = x[e.to].iter().map(|w| pre_edge(w, e)).collect();
                for p in preds {
                    if p.is_empty() {
                        continue;
                    }
                    if x[e.from].iter().any(|o| o.includes(&p)) {
                        continue;
                    }
                    x[e.from].retain(|o| !p.includes(o));
                    x[e.from].push(p);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        for l in x.iter_mut() {
            let owned = std::mem::take(l);
            *l = reduce(owned);
        }

        if union_lists_equal(&y, &x) {
            break;
        }
        y = x;
    }

    // Read the table off the original locations; the witness clock is
    // existentially irrelevant and gets projected away.
    let z_col = col(nz.z_idx);
    let zones: Vec<Vec<Zone>> = y
        .iter()
        .take(nz.n_original)
        .map(|zs| reduce(zs.iter().map(|z| z.project(z_col)).collect()))
        .collect();
    NonEmptyTable {
        zones,
        ctx: Arc::new(b.clocks.clone()),
    }
}

/// Whether some state of the reach set admits an accepting divergent
/// continuation: project away elapsed time, then test zone intersection
/// against the table.
pub fn intersects_nonempty(s: &SymbolicStateSet, table: &NonEmptyTable) -> bool {
    s.entries().any(|(q, z)| {
        if table.zones[*q].is_empty() {
            return false;
        }
        let untimed = z.project(TIME_COL);
        table.zones[*q]
            .iter()
            .any(|t| !t.intersect(&untimed).is_empty())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::parse_tba;

    fn rational(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn resetting_loop_is_good_below_its_guard() {
        // Self loop guarded x <= 5 with reset: from x <= 5 the loop can fire
        // forever with any pacing; from x > 5 it is stuck.
        let b = parse_tba(
            r#"{"name":"loop","alphabet":["a"],"clocks":["x"],
                "locations":[{"id":"q0","initial":true,"accepting":true}],
                "edges":[{"from":"q0","to":"q0","symbol":"a",
                          "guard":[{"clock":"x","rel":"<=","const":"5"}],
                          "resets":["x"]}]}"#,
        )
        .unwrap();
        let t = compute_nonempty(&b);
        assert!(t.contains(0, &[rational(0, 1)]));
        assert!(t.contains(0, &[rational(5, 1)]));
        assert!(t.contains(0, &[rational(9, 2)]));
        assert!(!t.contains(0, &[rational(51, 10)]));
        assert!(!t.contains(0, &[rational(6, 1)]));
    }

    #[test]
    fn strict_guard_excludes_the_boundary() {
        let b = parse_tba(
            r#"{"name":"loop","alphabet":["a"],"clocks":["x"],
                "locations":[{"id":"q0","initial":true,"accepting":true}],
                "edges":[{"from":"q0","to":"q0","symbol":"a",
                          "guard":[{"clock":"x","rel":"<","const":"5"}],
                          "resets":["x"]}]}"#,
        )
        .unwrap();
        let t = compute_nonempty(&b);
        assert!(t.contains(0, &[rational(9, 2)]));
        assert!(!t.contains(0, &[rational(5, 1)]));
    }

    #[test]
    fn unresetting_loop_admits_only_zeno_runs() {
        // Without the reset, infinitely many events must pile up before
        // x reaches 5, which kills time divergence: the table is empty. A
        // naive fixed point without the non-Zeno strengthening would wrongly
        // report x <= 5 here.
        let b = parse_tba(
            r#"{"name":"zeno","alphabet":["a"],"clocks":["x"],
                "locations":[{"id":"q0","initial":true,"accepting":true}],
                "edges":[{"from":"q0","to":"q0","symbol":"a",
                          "guard":[{"clock":"x","rel":"<=","const":"5"}]}]}"#,
        )
        .unwrap();
        let t = compute_nonempty(&b);
        assert!(t.is_all_empty());
    }

    #[test]
    fn unguarded_loop_is_universally_good() {
        let b = parse_tba(
            r#"{"name":"free","alphabet":["a"],"clocks":["x"],
                "locations":[{"id":"q0","initial":true,"accepting":true}],
                "edges":[{"from":"q0","to":"q0","symbol":"a"}]}"#,
        )
        .unwrap();
        let t = compute_nonempty(&b);
        assert!(t.contains(0, &[rational(0, 1)]));
        assert!(t.contains(0, &[rational(1000, 1)]));
    }

    #[test]
    fn acceptance_must_be_reachable() {
        // q1 is accepting but no edge leads there.
        let b = parse_tba(
            r#"{"name":"dead","alphabet":["a"],"clocks":[],
                "locations":[{"id":"q0","initial":true},
                             {"id":"q1","accepting":true}],
                "edges":[{"from":"q0","to":"q0","symbol":"a"},
                         {"from":"q1","to":"q1","symbol":"a"}]}"#,
        )
        .unwrap();
        let t = compute_nonempty(&b);
        assert!(t.zones_at(0).is_empty());
        assert!(!t.zones_at(1).is_empty());
    }

    #[test]
    fn deadline_handoff_shapes_the_entry_zone() {
        // q0 -a (x <= 3)-> q1 with x reset; q1 loops freely. Good at q0 only
        // while x <= 3, good at q1 always.
        let b = parse_tba(
            r#"{"name":"handoff","alphabet":["a"],"clocks":["x"],
                "locations":[{"id":"q0","initial":true},
                             {"id":"q1","accepting":true}],
                "edges":[{"from":"q0","to":"q1","symbol":"a",
                          "guard":[{"clock":"x","rel":"<=","const":"3"}],
                          "resets":["x"]},
                         {"from":"q1","to":"q1","symbol":"a"}]}"#,
        )
        .unwrap();
        let t = compute_nonempty(&b);
        assert!(t.contains(0, &[rational(3, 1)]));
        assert!(!t.contains(0, &[rational(7, 2)]));
        assert!(t.contains(1, &[rational(100, 1)]));
    }

    #[test]
    fn no_accepting_locations_means_empty_everywhere() {
        let b = parse_tba(
            r#"{"name":"none","alphabet":["a"],"clocks":[],
                "locations":[{"id":"q0","initial":true}],
                "edges":[{"from":"q0","to":"q0","symbol":"a"}]}"#,
        )
        .unwrap();
        assert!(compute_nonempty(&b).is_all_empty());
    }

    #[test]
    fn reach_sets_are_tested_after_dropping_time() {
        use crate::observations::Monitored;
        let b = parse_tba(
            r#"{"name":"loop","alphabet":["a"],"clocks":["x"],
                "locations":[{"id":"q0","initial":true,"accepting":true}],
                "edges":[{"from":"q0","to":"q0","symbol":"a",
                          "guard":[{"clock":"x","rel":"<=","const":"5"}],
                          "resets":["x"]}]}"#,
        )
        .unwrap();
        let table = compute_nonempty(&b);
        let m = Monitored::from_assumption(Arc::new(b));
        // Fresh start intersects the table.
        assert!(intersects_nonempty(&m.initial_set(), &table));
        // After advancing to time 7 without any event, x = 7 > 5: stuck.
        let late = m.initial_set().at_time(7);
        assert!(!intersects_nonempty(&late, &table));
        // Advancing to 4 keeps x inside the guard.
        assert!(intersects_nonempty(&m.initial_set().at_time(4), &table));
        // Empty reach sets never intersect.
        let empty = crate::observations::SymbolicStateSet::new("x");
        assert!(!intersects_nonempty(&empty, &table));
    }

    #[test]
    fn dump_lists_locations_and_zones() {
        let b = parse_tba(
            r#"{"name":"loop","alphabet":["a"],"clocks":["x"],
                "locations":[{"id":"q0","initial":true,"accepting":true}],
                "edges":[{"from":"q0","to":"q0","symbol":"a",
                          "guard":[{"clock":"x","rel":"<=","const":"5"}],
                          "resets":["x"]}]}"#,
        )
        .unwrap();
        let t = compute_nonempty(&b);
        let text = t.dump(&b);
        assert!(text.contains("q0:"));
        assert!(text.contains("x<=5"));
    }
}