//! Difference bound matrices over integer-scaled clocks.
//!
//! A zone is a conjunction of constraints `x - y <= n` or `x - y < n` over the
//! automaton clocks plus the implicit reference clock 0 (always exactly zero).
//! We store the full (n+1) x (n+1) bound matrix row-major, with matrix index 0
//! reserved for the reference clock, and keep zones in canonical (shortest
//! path closed) form between operations. The encoding and the core algorithms
//! follow Bengtsson & Yi, "Timed Automata: Semantics, Algorithms and Tools".
//!
//! Callers that track total elapsed time by convention place the `time` clock
//! at matrix index 1; nothing in this module depends on that.

use std::fmt;
use std::sync::Arc;

use num_traits::Signed;

use crate::rat::Rational;

/// One entry of the matrix: an upper bound on a clock difference, either
/// `(n, <=)`, `(n, <)`, or unbounded. Encoded in an i64 as `n << 1 | b` with
/// `b = 1` for non-strict, so that the derived integer order is exactly the
/// bound order and `i64::MAX` (odd, largest) can serve as infinity.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bound(i64);

impl Bound {
    pub const INFINITY: Bound = Bound(i64::MAX);
    /// `(0, <=)`, the diagonal entry of every nonempty canonical zone.
    pub const LE_ZERO: Bound = Bound(1);

    pub fn non_strict(n: i64) -> Bound {
        Bound((n << 1) | 1)
    }

    pub fn strict(n: i64) -> Bound {
        Bound(n << 1)
    }

    pub fn is_infinite(self) -> bool {
        self.0 == i64::MAX
    }

    pub fn is_strict(self) -> bool {
        self.0 & 1 == 0
    }

    /// The finite bound value; must not be called on INFINITY.
    pub fn value(self) -> i64 {
        debug_assert!(!self.is_infinite());
        self.0 >> 1
    }

    /// Bound addition: path concatenation. Infinity absorbs, strictness is
    /// inherited if either summand is strict.
    pub fn add(self, rhs: Bound) -> Bound {
        if self.is_infinite() || rhs.is_infinite() {
            return Bound::INFINITY;
        }
        Bound((((self.0 >> 1) + (rhs.0 >> 1)) << 1) | (self.0 & rhs.0 & 1))
    }

    /// Whether a concrete difference value satisfies this bound.
    pub fn admits(self, diff: Rational) -> bool {
        if self.is_infinite() {
            return true;
        }
        let b = Rational::from_integer(self.value());
        if self.is_strict() {
            diff < b
        } else {
            diff <= b
        }
    }

    fn raw(self) -> i64 {
        self.0
    }
}

impl fmt::Debug for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else if self.is_strict() {
            write!(f, "<{}", self.value())
        } else {
            write!(f, "<={}", self.value())
        }
    }
}

/// Relation symbols usable in single-clock constraints.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rel {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl Rel {
    pub fn negated(self) -> Vec<Rel> {
        match self {
            Rel::Lt => vec![Rel::Ge],
            Rel::Le => vec![Rel::Gt],
            Rel::Ge => vec![Rel::Lt],
            Rel::Gt => vec![Rel::Le],
            // not(x = n) splits into a disjunction; callers branch on it
            Rel::Eq => vec![Rel::Lt, Rel::Gt],
        }
    }

    pub fn holds(self, lhs: Rational, rhs: Rational) -> bool {
        match self {
            Rel::Lt => lhs < rhs,
            Rel::Le => lhs <= rhs,
            Rel::Eq => lhs == rhs,
            Rel::Ge => lhs >= rhs,
            Rel::Gt => lhs > rhs,
        }
    }
}

/// Sentinel in extrapolation ceilings marking a clock that must never be
/// abstracted (the monitor's `time` clock).
pub const NO_CEILING: i64 = i64::MAX;

/// A convex clock zone in canonical form.
///
/// `clocks` names the real clocks; matrix index c+1 corresponds to
/// `clocks[c]`. The `empty` flag is authoritative: an empty zone's matrix
/// contents are unspecified and all operations propagate emptiness.
#[derive(Clone)]
pub struct Zone {
    clocks: Arc<Vec<String>>,
    m: Box<[Bound]>,
    empty: bool,
}

impl Zone {
    /// Zone with every clock equal to zero.
    pub fn zero(clocks: Arc<Vec<String>>) -> Zone {
        let dim = clocks.len() + 1;
        Zone {
            clocks,
            m: vec![Bound::LE_ZERO; dim * dim].into_boxed_slice(),
            empty: false,
        }
    }

    /// Zone with every clock unconstrained (but nonnegative).
    pub fn universal(clocks: Arc<Vec<String>>) -> Zone {
        let dim = clocks.len() + 1;
        let mut m = vec![Bound::INFINITY; dim * dim].into_boxed_slice();
        for j in 0..dim {
            m[j] = Bound::LE_ZERO; // row 0: 0 - x_j <= 0
            m[j * dim + j] = Bound::LE_ZERO;
        }
        Zone {
            clocks,
            m,
            empty: false,
        }
    }

    /// Builds a zone from an explicit bound matrix and closes it. Intended
    /// for tests and the oracle-independent fixtures.
    pub fn from_bounds(clocks: Arc<Vec<String>>, entries: &[Bound]) -> Zone {
        let dim = clocks.len() + 1;
        assert_eq!(entries.len(), dim * dim);
        let mut z = Zone {
            clocks,
            m: entries.to_vec().into_boxed_slice(),
            empty: false,
        };
        z.close();
        z
    }

    pub fn clocks(&self) -> &Arc<Vec<String>> {
        &self.clocks
    }

    pub fn dim(&self) -> usize {
        self.clocks.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        self.empty
    }

    pub fn bound(&self, i: usize, j: usize) -> Bound {
        self.m[i * self.dim() + j]
    }

    fn set(&mut self, i: usize, j: usize, b: Bound) {
        let dim = self.dim();
        self.m[i * dim + j] = b;
    }

    fn tighten(&mut self, i: usize, j: usize, b: Bound) {
        if b < self.bound(i, j) {
            self.set(i, j, b);
        }
    }

    /// Floyd-Warshall closure; detects emptiness via a negative diagonal.
    fn close(&mut self) {
        if self.empty {
            return;
        }
        let dim = self.dim();
        for k in 0..dim {
            for i in 0..dim {
                let ik = self.bound(i, k);
                if ik.is_infinite() {
                    continue;
                }
                for j in 0..dim {
                    let through = ik.add(self.bound(k, j));
                    self.tighten(i, j, through);
                }
            }
        }
        for i in 0..dim {
            if self.bound(i, i) < Bound::LE_ZERO {
                self.empty = true;
                return;
            }
        }
    }

    /// Returns the canonical form. Zones produced by this module are already
    /// canonical; this is the public entry point for externally built
    /// matrices and for the idempotence tests.
    pub fn canonicalize(&self) -> Zone {
        let mut z = self.clone();
        z.close();
        z
    }

    /// Delay closure: lets arbitrary time pass, removing all upper bounds.
    /// Preserves canonical form.
    pub fn up(&self) -> Zone {
        let mut z = self.clone();
        if z.empty {
            return z;
        }
        for i in 1..z.dim() {
            z.set(i, 0, Bound::INFINITY);
        }
        z
    }

    /// Past closure: the set of valuations from which some delay reaches
    /// this zone.
    pub fn down(&self) -> Zone {
        let mut z = self.clone();
        if z.empty {
            return z;
        }
        for j in 1..z.dim() {
            z.set(0, j, Bound::LE_ZERO);
        }
        z.close();
        z
    }

    /// Forgets the listed clocks (matrix indices): their values become
    /// arbitrary nonnegative reals.
    pub fn free(&self, idxs: &[usize]) -> Zone {
        let mut z = self.clone();
        if z.empty {
            return z;
        }
        let dim = z.dim();
        for &c in idxs {
            debug_assert!(c >= 1 && c < dim);
            for j in 0..dim {
                if j != c {
                    z.set(c, j, Bound::INFINITY);
                    z.set(j, c, Bound::INFINITY);
                }
            }
            z.set(0, c, Bound::LE_ZERO);
        }
        z.close();
        z
    }

    /// Resets the listed clocks (matrix indices) to zero. Preserves
    /// canonical form.
    pub fn reset(&self, idxs: &[usize]) -> Zone {
        let mut z = self.clone();
        if z.empty {
            return z;
        }
        let dim = z.dim();
        for &c in idxs {
            debug_assert!(c >= 1 && c < dim);
            for j in 0..dim {
                let b0 = z.bound(0, j);
                z.set(c, j, b0);
                let b1 = z.bound(j, 0);
                z.set(j, c, b1);
            }
            z.set(c, c, Bound::LE_ZERO);
        }
        z
    }

    /// Conjoins a single-clock constraint `clock(idx) rel k`.
    pub fn and_atom(&self, idx: usize, rel: Rel, k: i64) -> Zone {
        let mut z = self.clone();
        if z.empty {
            return z;
        }
        debug_assert!(idx >= 1 && idx < z.dim());
        match rel {
            Rel::Lt => z.tighten(idx, 0, Bound::strict(k)),
            Rel::Le => z.tighten(idx, 0, Bound::non_strict(k)),
            Rel::Ge => z.tighten(0, idx, Bound::non_strict(-k)),
            Rel::Gt => z.tighten(0, idx, Bound::strict(-k)),
            Rel::Eq => {
                z.tighten(idx, 0, Bound::non_strict(k));
                z.tighten(0, idx, Bound::non_strict(-k));
            }
        }
        z.close();
        z
    }

    /// Conjoins a difference constraint `clock(i) - clock(j) <= / < k`.
    pub fn and_diff(&self, i: usize, j: usize, b: Bound) -> Zone {
        let mut z = self.clone();
        if z.empty {
            return z;
        }
        z.tighten(i, j, b);
        z.close();
        z
    }

    /// Intersection: entrywise minimum, then closure.
    pub fn intersect(&self, other: &Zone) -> Zone {
        debug_assert_eq!(self.clocks.as_slice(), other.clocks.as_slice());
        if self.empty {
            return self.clone();
        }
        if other.empty {
            return other.clone();
        }
        let mut z = self.clone();
        for (a, b) in z.m.iter_mut().zip(other.m.iter()) {
            if *b < *a {
                *a = *b;
            }
        }
        z.close();
        z
    }

    /// Set inclusion `other subset-of self`; both must be canonical.
    pub fn includes(&self, other: &Zone) -> bool {
        debug_assert_eq!(self.clocks.as_slice(), other.clocks.as_slice());
        if other.empty {
            return true;
        }
        if self.empty {
            return false;
        }
        self.m.iter().zip(other.m.iter()).all(|(a, b)| a >= b)
    }

    /// Classic maximal-bound extrapolation. `ceilings[c]` is the largest
    /// constant compared against `clocks[c]`, or NO_CEILING to exempt the
    /// clock entirely. Bounds above a ceiling are widened to infinity and
    /// lower bounds below `-ceiling` are relaxed, coarsening the zone to a
    /// finite abstract domain.
    pub fn extrapolate(&self, ceilings: &[i64]) -> Zone {
        assert_eq!(ceilings.len(), self.clocks.len());
        let mut z = self.clone();
        if z.empty {
            return z;
        }
        let dim = z.dim();
        for i in 0..dim {
            for j in 0..dim {
                if i == j {
                    continue;
                }
                let b = z.bound(i, j);
                if b.is_infinite() {
                    continue;
                }
                if i >= 1 && ceilings[i - 1] != NO_CEILING && b > Bound::non_strict(ceilings[i - 1])
                {
                    z.set(i, j, Bound::INFINITY);
                } else if j >= 1
                    && ceilings[j - 1] != NO_CEILING
                    && b < Bound::strict(-ceilings[j - 1])
                {
                    z.set(i, j, Bound::strict(-ceilings[j - 1]));
                }
            }
        }
        z.close();
        z
    }

    /// Existentially projects away the clock at matrix index `idx`. The
    /// closed submatrix of a closed matrix is closed, so the result is
    /// canonical.
    pub fn project(&self, idx: usize) -> Zone {
        debug_assert!(idx >= 1 && idx < self.dim());
        let mut names = self.clocks.as_ref().clone();
        names.remove(idx - 1);
        let new_clocks = Arc::new(names);
        if self.empty {
            return Zone {
                clocks: new_clocks,
                m: vec![Bound::LE_ZERO; (self.dim() - 1) * (self.dim() - 1)].into_boxed_slice(),
                empty: true,
            };
        }
        let dim = self.dim();
        let nd = dim - 1;
        let mut m = Vec::with_capacity(nd * nd);
        for i in (0..dim).filter(|&i| i != idx) {
            for j in (0..dim).filter(|&j| j != idx) {
                m.push(self.bound(i, j));
            }
        }
        Zone {
            clocks: new_clocks,
            m: m.into_boxed_slice(),
            empty: false,
        }
    }

    /// Membership test for a concrete valuation (one rational per clock, the
    /// reference clock is implicit). Exact; used by tests and the oracle.
    pub fn satisfies(&self, v: &[Rational]) -> bool {
        assert_eq!(v.len(), self.clocks.len());
        if self.empty {
            return false;
        }
        if v.iter().any(|x| x.is_negative()) {
            return false;
        }
        let dim = self.dim();
        let val = |i: usize| {
            if i == 0 {
                Rational::from_integer(0)
            } else {
                v[i - 1]
            }
        };
        for i in 0..dim {
            for j in 0..dim {
                if !self.bound(i, j).admits(val(i) - val(j)) {
                    return false;
                }
            }
        }
        true
    }

    /// Stable total order on canonical zones of the same clock set; used to
    /// produce deterministic table listings and detect fixed points.
    pub fn cmp_key(&self) -> (bool, Vec<i64>) {
        (self.empty, self.m.iter().map(|b| b.raw()).collect())
    }
}

impl PartialEq for Zone {
    fn eq(&self, other: &Self) -> bool {
        if self.clocks.as_slice() != other.clocks.as_slice() {
            return false;
        }
        if self.empty || other.empty {
            return self.empty == other.empty;
        }
        self.m == other.m
    }
}

impl Eq for Zone {}

impl fmt::Debug for Zone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.empty {
            return write!(f, "Zone(empty)");
        }
        writeln!(f, "Zone over {:?}:", self.clocks)?;
        let dim = self.dim();
        for i in 0..dim {
            let row: Vec<String> = (0..dim).map(|j| format!("{:?}", self.bound(i, j))).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}
