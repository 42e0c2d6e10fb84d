//! Region-graph emptiness, the arbiter the zone engine is checked against.
//!
//! States are classic Alur-Dill clock regions: an integer part per clock
//! (or "above the ceiling") plus the ordering of nonzero fractional parts.
//! All constants are first rescaled to integers, so rational guards and
//! rational start valuations cost nothing but a finer grid.
//!
//! Time divergence is handled with a credit construction applied on the
//! fly: a fresh credit clock must reach one internal unit before every
//! accepting visit, which routes accepting nodes through credited copies
//! and makes consecutive accepting visits at least one unit apart. After
//! that, a divergent accepting run exists from a state iff the reachable
//! part of the credit-region graph has an SCC containing both a discrete
//! edge and a credited node, so plain SCC analysis decides emptiness.

use std::collections::{HashMap, VecDeque};

use num_integer::Integer;

use crate::automata::{Rel, Tba};
use crate::rat::{scaled_int, Rational};

/// Exploration backstop; a blown cap means the instance is far outside the
/// sizes the oracle is meant for.
const NODE_CAP: usize = 2_000_000;

/// One clock's slice of a region. `Above` is absorbing: past its ceiling a
/// clock can never influence a guard again.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Comp {
    At { int: i64, frac_zero: bool },
    Above,
}

/// An Alur-Dill region. `order` lists the clocks with nonzero fractional
/// part, grouped by equal fraction, in increasing order of fraction; clocks
/// that are `Above` or on an integer do not appear.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Region {
    comp: Vec<Comp>,
    order: Vec<Vec<usize>>,
}

impl Region {
    fn from_ints(ints: &[i64], ceilings: &[i64]) -> Region {
        let comp = ints
            .iter()
            .zip(ceilings)
            .map(|(&v, &m)| {
                if v > m {
                    Comp::Above
                } else {
                    Comp::At { int: v, frac_zero: true }
                }
            })
            .collect();
        Region { comp, order: Vec::new() }
    }

    /// The immediate time successor, or None once every clock is above its
    /// ceiling (that region is closed under delay).
    fn delay_succ(&self, ceilings: &[i64]) -> Option<Region> {
        let on_integer: Vec<usize> = (0..self.comp.len())
            .filter(|&c| matches!(self.comp[c], Comp::At { frac_zero: true, .. }))
            .collect();
        if !on_integer.is_empty() {
            // Integer-valued clocks pick up a fraction smaller than every
            // existing one; those at their ceiling leave the grid for good.
            let mut r = self.clone();
            let mut fresh = Vec::new();
            for &c in &on_integer {
                let Comp::At { int, .. } = r.comp[c] else { unreachable!() };
                if int >= ceilings[c] {
                    r.comp[c] = Comp::Above;
                } else {
                    r.comp[c] = Comp::At { int, frac_zero: false };
                    fresh.push(c);
                }
            }
            if !fresh.is_empty() {
                r.order.insert(0, fresh);
            }
            return Some(r);
        }
        // No clock on an integer: the largest fraction reaches the next
        // integer first. An empty order means every clock is Above.
        let group = self.order.last()?.clone();
        let mut r = self.clone();
        r.order.pop();
        for c in group {
            let Comp::At { int, .. } = r.comp[c] else { unreachable!() };
            r.comp[c] = Comp::At { int: int + 1, frac_zero: true };
        }
        Some(r)
    }

    fn reset(&self, clocks: &[usize]) -> Region {
        let mut r = self.clone();
        for &c in clocks {
            r.comp[c] = Comp::At { int: 0, frac_zero: true };
        }
        for g in &mut r.order {
            g.retain(|c| !clocks.contains(c));
        }
        r.order.retain(|g| !g.is_empty());
        r
    }

    /// Guard truth is uniform across a region, so one component check
    /// decides each atom. Constants never exceed the ceiling of their
    /// clock, which is what makes `Above` decidable locally.
    fn satisfies(&self, clock: usize, rel: Rel, n: i64) -> bool {
        match self.comp[clock] {
            Comp::Above => matches!(rel, Rel::Gt | Rel::Ge),
            Comp::At { int, frac_zero } => match rel {
                Rel::Lt => int < n,
                Rel::Le => int < n || (int == n && frac_zero),
                Rel::Eq => int == n && frac_zero,
                Rel::Ge => int >= n,
                Rel::Gt => int > n || (int == n && !frac_zero),
            },
        }
    }
}

struct ScaledEdge {
    to: usize,
    atoms: Vec<(usize, Rel, i64)>,
    resets: Vec<usize>,
}

/// Guard view of an automaton with all constants rescaled to integers and
/// a trailing credit clock (ceiling 1) threaded through accepting visits.
struct Scaled {
    accepting: Vec<bool>,
    edges_from: Vec<Vec<ScaledEdge>>,
    ceilings: Vec<i64>,
    credit: usize,
    /// Internal units per original time unit.
    unit: i64,
}

impl Scaled {
    fn build(b: &Tba, extra_denominator: i64) -> Scaled {
        let mut unit = extra_denominator.max(1);
        for e in &b.edges {
            for a in &e.guard.atoms {
                unit = unit.lcm(a.constant.denom());
            }
        }
        let credit = b.clocks.len();
        let mut ceilings = vec![0i64; credit + 1];
        ceilings[credit] = 1;
        let mut edges_from: Vec<Vec<ScaledEdge>> =
            (0..b.locations.len()).map(|_| Vec::new()).collect();
        for e in &b.edges {
            let atoms: Vec<(usize, Rel, i64)> = e
                .guard
                .atoms
                .iter()
                .map(|a| (a.clock, a.rel, scaled_int(a.constant, unit)))
                .collect();
            for &(c, _, n) in &atoms {
                ceilings[c] = ceilings[c].max(n);
            }
            edges_from[e.from].push(ScaledEdge { to: e.to, atoms, resets: e.resets.clone() });
        }
        Scaled {
            accepting: b.locations.iter().map(|l| l.accepting).collect(),
            edges_from,
            ceilings,
            credit,
            unit,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct Node {
    loc: usize,
    credited: bool,
    region: Region,
}

/// Explores the credit-region graph from one concrete start state and
/// scans its SCCs. An SCC witnesses a divergent accepting lasso iff it
/// contains a discrete edge (the cycle emits letters) and a credited node
/// (accepting, and at least one credit unit apart from its predecessor).
fn search(s: &Scaled, loc: usize, start: Region) -> bool {
    let mut index: HashMap<Node, usize> = HashMap::new();
    let mut nodes: Vec<Node> = Vec::new();
    let mut succs: Vec<Vec<usize>> = Vec::new();
    let mut edges: Vec<(usize, usize, bool)> = Vec::new();
    let root = Node { loc, credited: false, region: start };
    index.insert(root.clone(), 0);
    nodes.push(root);
    succs.push(Vec::new());
    let mut queue: VecDeque<usize> = VecDeque::from([0]);
    while let Some(i) = queue.pop_front() {
        let node = nodes[i].clone();
        let mut out: Vec<(Node, bool)> = Vec::new();
        if let Some(r) = node.region.delay_succ(&s.ceilings) {
            out.push((Node { region: r, ..node.clone() }, false));
        }
        for e in &s.edges_from[node.loc] {
            if !e.atoms.iter().all(|&(c, rel, n)| node.region.satisfies(c, rel, n)) {
                continue;
            }
            let plain = Node { loc: e.to, credited: false, region: node.region.reset(&e.resets) };
            out.push((plain, true));
            if s.accepting[e.to] && node.region.satisfies(s.credit, Rel::Ge, 1) {
                let mut resets = e.resets.clone();
                resets.push(s.credit);
                let credited =
                    Node { loc: e.to, credited: true, region: node.region.reset(&resets) };
                out.push((credited, true));
            }
        }
        for (n, discrete) in out {
            let j = *index.entry(n.clone()).or_insert_with(|| {
                nodes.push(n);
                succs.push(Vec::new());
                queue.push_back(nodes.len() - 1);
                nodes.len() - 1
            });
            succs[i].push(j);
            edges.push((i, j, discrete));
        }
        assert!(nodes.len() <= NODE_CAP, "region graph exceeded {NODE_CAP} nodes");
    }
    let (scc, nscc) = tarjan(&succs);
    let mut has_credited = vec![false; nscc];
    let mut has_discrete = vec![false; nscc];
    for (i, n) in nodes.iter().enumerate() {
        if n.credited {
            has_credited[scc[i]] = true;
        }
    }
    for &(u, v, discrete) in &edges {
        if discrete && scc[u] == scc[v] {
            has_discrete[scc[u]] = true;
        }
    }
    (0..nscc).any(|k| has_credited[k] && has_discrete[k])
}

/// Iterative Tarjan; returns (scc id per node, number of SCCs).
fn tarjan(succs: &[Vec<usize>]) -> (Vec<usize>, usize) {
    let n = succs.len();
    let unvisited = usize::MAX;
    let mut ids = vec![unvisited; n];
    let mut disc = vec![unvisited; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut frames: Vec<(usize, usize)> = Vec::new();
    let mut counter = 0usize;
    let mut nscc = 0usize;
    for start in 0..n {
        if disc[start] != unvisited {
            continue;
        }
        disc[start] = counter;
        low[start] = counter;
        counter += 1;
        stack.push(start);
        on_stack[start] = true;
        frames.push((start, 0));
        while let Some(frame) = frames.last_mut() {
            let (v, child) = *frame;
            if child < succs[v].len() {
                frame.1 += 1;
                let w = succs[v][child];
                if disc[w] == unvisited {
                    disc[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                frames.pop();
                if let Some(&(p, _)) = frames.last() {
                    low[p] = low[p].min(low[v]);
                }
                if low[v] == disc[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        ids[w] = nscc;
                        if w == v {
                            break;
                        }
                    }
                    nscc += 1;
                }
            }
        }
    }
    (ids, nscc)
}

/// Region-graph emptiness with a fixed internal grid, memoized per start
/// region. Reuse one instance when querying many states of one automaton.
pub struct RegionOracle {
    scaled: Scaled,
    nclocks: usize,
    memo: HashMap<(usize, Region), bool>,
}

impl RegionOracle {
    /// `extra_denominator` widens the internal grid so that valuations on
    /// that grid stay exact; guard denominators are always included.
    pub fn new(b: &Tba, extra_denominator: i64) -> RegionOracle {
        RegionOracle {
            scaled: Scaled::build(b, extra_denominator),
            nclocks: b.clocks.len(),
            memo: HashMap::new(),
        }
    }

    /// Whether some divergent accepting run starts at `loc` under
    /// `valuation`. The valuation must lie on the oracle's grid.
    pub fn nonempty(&mut self, loc: usize, valuation: &[Rational]) -> bool {
        assert_eq!(valuation.len(), self.nclocks, "valuation arity mismatch");
        let mut ints: Vec<i64> = valuation
            .iter()
            .map(|&v| {
                let n = scaled_int(v, self.scaled.unit);
                assert!(n >= 0, "negative clock value");
                n
            })
            .collect();
        ints.push(0);
        let region = Region::from_ints(&ints, &self.scaled.ceilings);
        if let Some(&hit) = self.memo.get(&(loc, region.clone())) {
            return hit;
        }
        let good = search(&self.scaled, loc, region.clone());
        self.memo.insert((loc, region), good);
        good
    }
}

/// One-shot emptiness check; the grid is inferred from the valuation.
pub fn region_nonempty(b: &Tba, loc: usize, valuation: &[Rational]) -> bool {
    let extra = valuation.iter().fold(1i64, |acc, v| acc.lcm(v.denom()));
    RegionOracle::new(b, extra).nonempty(loc, valuation)
}

#[cfg(test)]
mod tests {
    use super::super::testutil::{int, tba};
    use super::*;

    fn rationals(vs: &[i64]) -> Vec<Rational> {
        vs.iter().map(|&v| int(v)).collect()
    }

    #[test]
    fn delay_chain_visits_the_canonical_regions() {
        // Two clocks with ceilings 1 and 2, both starting at zero.
        let ceilings = [1, 2];
        let r0 = Region::from_ints(&[0, 0], &ceilings);
        assert!(r0.order.is_empty());

        let r1 = r0.delay_succ(&ceilings).unwrap();
        assert_eq!(r1.comp[0], Comp::At { int: 0, frac_zero: false });
        assert_eq!(r1.order, vec![vec![0, 1]]);

        let r2 = r1.delay_succ(&ceilings).unwrap();
        assert_eq!(r2.comp[0], Comp::At { int: 1, frac_zero: true });
        assert_eq!(r2.comp[1], Comp::At { int: 1, frac_zero: true });

        let r3 = r2.delay_succ(&ceilings).unwrap();
        assert_eq!(r3.comp[0], Comp::Above);
        assert_eq!(r3.comp[1], Comp::At { int: 1, frac_zero: false });

        let r4 = r3.delay_succ(&ceilings).unwrap();
        assert_eq!(r4.comp[1], Comp::At { int: 2, frac_zero: true });

        let r5 = r4.delay_succ(&ceilings).unwrap();
        assert_eq!(r5.comp, vec![Comp::Above, Comp::Above]);
        assert!(r5.delay_succ(&ceilings).is_none());
    }

    #[test]
    fn guard_truth_on_a_strictly_fractional_clock() {
        let ceilings = [2];
        let r = Region::from_ints(&[0], &ceilings).delay_succ(&ceilings).unwrap();
        // 0 < x < 1.
        assert!(r.satisfies(0, Rel::Gt, 0));
        assert!(r.satisfies(0, Rel::Lt, 1));
        assert!(!r.satisfies(0, Rel::Ge, 1));
        assert!(!r.satisfies(0, Rel::Le, 0));
        assert!(!r.satisfies(0, Rel::Eq, 0));
        assert!(!r.satisfies(0, Rel::Eq, 1));
    }

    #[test]
    fn resets_split_fraction_groups() {
        let ceilings = [3, 3];
        let both = Region::from_ints(&[0, 0], &ceilings).delay_succ(&ceilings).unwrap();
        let split = both.reset(&[0]);
        assert_eq!(split.comp[0], Comp::At { int: 0, frac_zero: true });
        assert_eq!(split.order, vec![vec![1]]);

        // After a further delay the reset clock trails the other one.
        let trailing = split.delay_succ(&ceilings).unwrap();
        assert_eq!(trailing.order, vec![vec![0], vec![1]]);
        let promoted = trailing.delay_succ(&ceilings).unwrap();
        assert_eq!(promoted.comp[1], Comp::At { int: 1, frac_zero: true });
        assert_eq!(promoted.order, vec![vec![0]]);
    }

    #[test]
    fn accepting_self_loop_is_nonempty_and_non_accepting_is_not() {
        let live = tba(
            "live",
            &["a"],
            &[],
            &[("q0", true, true)],
            &[(0, 0, 0, vec![], vec![])],
        );
        assert!(region_nonempty(&live, 0, &[]));

        let dead = tba(
            "dead",
            &["a"],
            &[],
            &[("q0", true, false)],
            &[(0, 0, 0, vec![], vec![])],
        );
        assert!(!region_nonempty(&dead, 0, &[]));
    }

    #[test]
    fn zero_time_cycles_are_rejected() {
        // The only run repeating the accepting location fires every step at
        // x = 0, so time never diverges.
        let frozen = tba(
            "frozen",
            &["a"],
            &["x"],
            &[("q0", true, true)],
            &[(0, 0, 0, vec![(0, Rel::Eq, int(0))], vec![0])],
        );
        assert!(!region_nonempty(&frozen, 0, &rationals(&[0])));

        // Relaxing the guard to x <= 1 admits one firing per time unit.
        let relaxed = tba(
            "relaxed",
            &["a"],
            &["x"],
            &[("q0", true, true)],
            &[(0, 0, 0, vec![(0, Rel::Le, int(1))], vec![0])],
        );
        assert!(region_nonempty(&relaxed, 0, &rationals(&[0])));
    }

    #[test]
    fn unreset_equality_guard_cannot_recur_divergently() {
        let pinned = tba(
            "pinned",
            &["a"],
            &["x"],
            &[("q0", true, true)],
            &[(0, 0, 0, vec![(0, Rel::Eq, int(0))], vec![])],
        );
        assert!(!region_nonempty(&pinned, 0, &rationals(&[0])));
    }

    #[test]
    fn loops_above_every_ceiling_diverge() {
        let high = tba(
            "high",
            &["a"],
            &["x"],
            &[("q0", true, true)],
            &[(0, 0, 0, vec![(0, Rel::Ge, int(5))], vec![])],
        );
        assert!(region_nonempty(&high, 0, &rationals(&[0])));
        assert!(region_nonempty(&high, 0, &rationals(&[7])));
    }

    #[test]
    fn rational_guards_rescale_internally() {
        let fine = tba(
            "fine",
            &["a"],
            &["x"],
            &[("q0", true, true)],
            &[(0, 0, 0, vec![(0, Rel::Le, Rational::new(1, 2))], vec![0])],
        );
        assert!(region_nonempty(&fine, 0, &[Rational::new(1, 3)]));
        assert!(!region_nonempty(&fine, 0, &[int(1)]));
    }

    #[test]
    fn trap_locations_are_empty_and_guarded_loops_are_not() {
        let b = super::super::testutil::guarded_b_assumption();
        let q0 = 0;
        let q2 = 2;
        for v in [[0, 0], [2, 0], [2, 15]] {
            assert!(!region_nonempty(&b, q2, &rationals(&v)), "trap must be empty at {v:?}");
            assert!(region_nonempty(&b, q0, &rationals(&v)), "q0 must be live at {v:?}");
        }
        assert!(region_nonempty(&b, 1, &rationals(&[0, 0])));
    }

    #[test]
    fn oracle_memoizes_by_region() {
        let b = super::super::testutil::guarded_b_assumption();
        let mut oracle = RegionOracle::new(&b, 2);
        assert!(oracle.nonempty(0, &[Rational::new(1, 2), Rational::new(1, 2)]));
        assert!(oracle.nonempty(0, &[Rational::new(1, 2), Rational::new(1, 2)]));
        assert_eq!(oracle.memo.len(), 1);
    }

    #[test]
    fn agrees_with_the_symbolic_liveness_table_on_the_sample_assumption() {
        let b = super::super::testutil::guarded_b_assumption();
        let table = crate::liveness::compute_nonempty(&b);
        for loc in 0..b.locations.len() {
            for v in [[0, 0], [1, 1], [2, 0], [2, 11], [5, 3], [0, 12]] {
                let val = rationals(&v);
                assert_eq!(
                    region_nonempty(&b, loc, &val),
                    table.contains(loc, &val),
                    "divergence at location {loc}, valuation {v:?}"
                );
            }
        }
    }
}
