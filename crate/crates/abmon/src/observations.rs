//! Uncertain observations and the symbolic reach-set transformers.
//!
//! An observation element `@[lo,hi] mult : formula` states that some number
//! of events (fixed, bounded, or unbounded, per `mult`) occurred inside the
//! time window `[lo,hi]`, each satisfying `formula`. Formulas constrain the
//! event letter and, through `loc:` and `clk:` atoms, the assumption
//! automaton's state right after the event. Queries `? t` ask for a verdict
//! at time t.
//!
//! Reach sets are finite unions of (location, zone) pairs, where zones range
//! over an extra `time` clock (total elapsed time, never reset) followed by
//! the automaton clocks. Subsumed entries are dropped eagerly.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::automata::{ClockConstraintAtom, Edge, Product, Tba};
use crate::rat::{parse_rational, Rational, RationalError};
use crate::zones::{Rel, Zone};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ObsFormula {
    /// The event letter is this alphabet symbol.
    Letter(usize),
    /// The assumption automaton is at this location right after the event.
    AtLocation(usize),
    /// An assumption clock satisfies a comparison right after the event.
    Clock(ClockConstraintAtom),
    Not(Box<ObsFormula>),
    And(Box<ObsFormula>, Box<ObsFormula>),
    Or(Box<ObsFormula>, Box<ObsFormula>),
}

impl ObsFormula {
    /// Truth against a concrete post-event configuration of the assumption.
    pub fn eval(&self, letter: usize, loc: usize, valuation: &[Rational]) -> bool {
        match self {
            ObsFormula::Letter(a) => *a == letter,
            ObsFormula::AtLocation(q) => *q == loc,
            ObsFormula::Clock(atom) => atom.holds(valuation[atom.clock]),
            ObsFormula::Not(f) => !f.eval(letter, loc, valuation),
            ObsFormula::And(l, r) => {
                l.eval(letter, loc, valuation) && r.eval(letter, loc, valuation)
            }
            ObsFormula::Or(l, r) => l.eval(letter, loc, valuation) || r.eval(letter, loc, valuation),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Multiplicity {
    Exactly(u32),
    AtMost(u32),
    AtLeast(u32),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObservationElement {
    pub formula: ObsFormula,
    pub lo: Rational,
    pub hi: Rational,
    pub mult: Multiplicity,
}

/// Rewrites an element into the equivalent list the engine iterates on:
/// zero-count elements vanish, and `>= k` with k > 0 splits into `= k`
/// followed by `>= 0`. The language of consistent words is unchanged.
pub fn normalize(e: &ObservationElement) -> Vec<ObservationElement> {
    match e.mult {
        Multiplicity::Exactly(0) | Multiplicity::AtMost(0) => Vec::new(),
        Multiplicity::AtLeast(k) if k > 0 => vec![
            ObservationElement {
                mult: Multiplicity::Exactly(k),
                ..e.clone()
            },
            ObservationElement {
                mult: Multiplicity::AtLeast(0),
                ..e.clone()
            },
        ],
        _ => vec![e.clone()],
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ObsError {
    #[error("unexpected character `{0}` in formula")]
    BadChar(char),
    #[error("unexpected end of formula")]
    UnexpectedEnd,
    #[error("expected {expected}, found `{found}`")]
    Expected { expected: String, found: String },
    #[error("`{0}` is not a declared alphabet symbol")]
    UnknownSymbol(String),
    #[error("`{0}` is not a declared assumption location")]
    UnknownLocation(String),
    #[error("`{0}` is not a declared assumption clock")]
    UnknownClock(String),
    #[error(transparent)]
    Rational(#[from] RationalError),
    #[error("malformed element: {0}")]
    Element(String),
    #[error("interval [{0}, {1}] is empty or negative")]
    BadInterval(String, String),
}

#[derive(Debug, PartialEq)]
enum Tok {
    Ident(String),
    Number(Rational),
    Not,
    And,
    Or,
    LParen,
    RParen,
    Colon,
    Rel(Rel),
}

fn lex(text: &str) -> Result<Vec<Tok>, ObsError> {
    let mut out = Vec::new();
    let mut it = text.chars().peekable();
    while let Some(&c) = it.peek() {
        match c {
            ' ' | '\t' => {
                it.next();
            }
            '!' => {
                it.next();
                out.push(Tok::Not);
            }
            '&' => {
                it.next();
                out.push(Tok::And);
            }
            '|' => {
                it.next();
                out.push(Tok::Or);
            }
            '(' => {
                it.next();
                out.push(Tok::LParen);
            }
            ')' => {
                it.next();
                out.push(Tok::RParen);
            }
            ':' => {
                it.next();
                out.push(Tok::Colon);
            }
            '<' | '>' | '=' => {
                it.next();
                let two = it.peek() == Some(&'=');
                let rel = match (c, two) {
                    ('<', true) => Rel::Le,
                    ('<', false) => Rel::Lt,
                    ('>', true) => Rel::Ge,
                    ('>', false) => Rel::Gt,
                    ('=', true) => Rel::Eq,
                    ('=', false) => {
                        return Err(ObsError::Expected {
                            expected: "`==`".to_string(),
                            found: "=".to_string(),
                        })
                    }
                    _ => unreachable!(),
                };
                if two {
                    it.next();
                }
                out.push(Tok::Rel(rel));
            }
            c if c.is_ascii_digit() => {
                let mut s = String::new();
                while let Some(&d) = it.peek() {
                    if d.is_ascii_digit() || d == '/' {
                        s.push(d);
                        it.next();
                    } else {
                        break;
                    }
                }
                out.push(Tok::Number(parse_rational(&s)?));
            }
            c if c.is_ascii_alphabetic() || c == '_' || c == '$' => {
                let mut s = String::new();
                while let Some(&d) = it.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' || d == '$' || d == '\'' {
                        s.push(d);
                        it.next();
                    } else {
                        break;
                    }
                }
                out.push(Tok::Ident(s));
            }
            other => return Err(ObsError::BadChar(other)),
        }
    }
    Ok(out)
}

struct FormulaParser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    assumption: &'a Tba,
}

impl<'a> FormulaParser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Result<&Tok, ObsError> {
        let t = self.toks.get(self.pos).ok_or(ObsError::UnexpectedEnd)?;
        self.pos += 1;
        Ok(t)
    }

    // or := and ( '|' and )*
    fn or(&mut self) -> Result<ObsFormula, ObsError> {
        let mut f = self.and()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            let r = self.and()?;
            f = ObsFormula::Or(Box::new(f), Box::new(r));
        }
        Ok(f)
    }

    // and := unary ( '&' unary )*
    fn and(&mut self) -> Result<ObsFormula, ObsError> {
        let mut f = self.unary()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            let r = self.unary()?;
            f = ObsFormula::And(Box::new(f), Box::new(r));
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<ObsFormula, ObsError> {
        if self.peek() == Some(&Tok::Not) {
            self.pos += 1;
            let f = self.unary()?;
            return Ok(ObsFormula::Not(Box::new(f)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<ObsFormula, ObsError> {
        match self.next()? {
            Tok::LParen => {
                let f = self.or()?;
                match self.next()? {
                    Tok::RParen => Ok(f),
                    t => Err(ObsError::Expected {
                        expected: "`)`".to_string(),
                        found: format!("{t:?}"),
                    }),
                }
            }
            Tok::Ident(name) => {
                let name = name.clone();
                // `loc:` and `clk:` prefixes; a bare ident is a letter atom.
                if self.peek() == Some(&Tok::Colon) && (name == "loc" || name == "clk") {
                    self.pos += 1;
                    let target = match self.next()? {
                        Tok::Ident(t) => t.clone(),
                        t => {
                            return Err(ObsError::Expected {
                                expected: "a name".to_string(),
                                found: format!("{t:?}"),
                            })
                        }
                    };
                    if name == "loc" {
                        let q = self
                            .assumption
                            .loc_idx(&target)
                            .ok_or(ObsError::UnknownLocation(target))?;
                        return Ok(ObsFormula::AtLocation(q));
                    }
                    let clock = self
                        .assumption
                        .clock_idx(&target)
                        .ok_or(ObsError::UnknownClock(target))?;
                    let rel = match self.next()? {
                        Tok::Rel(r) => *r,
                        t => {
                            return Err(ObsError::Expected {
                                expected: "a comparison".to_string(),
                                found: format!("{t:?}"),
                            })
                        }
                    };
                    let constant = match self.next()? {
                        Tok::Number(n) => *n,
                        t => {
                            return Err(ObsError::Expected {
                                expected: "a constant".to_string(),
                                found: format!("{t:?}"),
                            })
                        }
                    };
                    return Ok(ObsFormula::Clock(ClockConstraintAtom {
                        clock,
                        rel,
                        constant,
                    }));
                }
                let a = self
                    .assumption
                    .symbol_idx(&name)
                    .ok_or(ObsError::UnknownSymbol(name))?;
                Ok(ObsFormula::Letter(a))
            }
            t => Err(ObsError::Expected {
                expected: "an atom".to_string(),
                found: format!("{t:?}"),
            }),
        }
    }
}

/// Parses an event formula. Atoms are alphabet symbols, `loc:<id>`, and
/// `clk:<clock> <rel> <rational>`; `!` binds tighter than `&`, which binds
/// tighter than `|`.
pub fn parse_formula(text: &str, assumption: &Tba) -> Result<ObsFormula, ObsError> {
    let mut p = FormulaParser {
        toks: lex(text)?,
        pos: 0,
        assumption,
    };
    let f = p.or()?;
    if p.pos != p.toks.len() {
        return Err(ObsError::Expected {
            expected: "end of formula".to_string(),
            found: format!("{:?}", p.toks[p.pos]),
        });
    }
    Ok(f)
}

/// One line of an observation stream.
#[derive(Clone, Debug, PartialEq)]
pub enum StreamItem {
    Element(ObservationElement),
    Query(Rational),
}

/// Parses one stream line: `@[lo,hi] =k|<=k|>=k : formula`, `? t`, or a
/// blank / `#` comment line (None).
pub fn parse_stream_line(line: &str, assumption: &Tba) -> Result<Option<StreamItem>, ObsError> {
    let line = line.trim();
    if line.is_empty() || line.starts_with('#') {
        return Ok(None);
    }
    if let Some(rest) = line.strip_prefix('?') {
        let t = parse_rational(rest)?;
        return Ok(Some(StreamItem::Query(t)));
    }
    let rest = line
        .strip_prefix('@')
        .ok_or_else(|| ObsError::Element("expected `@[lo,hi] ...` or `? t`".to_string()))?;
    let rest = rest.trim_start();
    let rest = rest
        .strip_prefix('[')
        .ok_or_else(|| ObsError::Element("expected `[` after `@`".to_string()))?;
    let (interval, rest) = rest
        .split_once(']')
        .ok_or_else(|| ObsError::Element("unterminated interval".to_string()))?;
    let (lo_text, hi_text) = interval
        .split_once(',')
        .ok_or_else(|| ObsError::Element("interval needs `lo,hi`".to_string()))?;
    let lo = parse_rational(lo_text)?;
    let hi = parse_rational(hi_text)?;
    if lo < Rational::from_integer(0) || hi < lo {
        return Err(ObsError::BadInterval(
            lo_text.trim().to_string(),
            hi_text.trim().to_string(),
        ));
    }
    let (mult_text, formula_text) = rest
        .split_once(':')
        .ok_or_else(|| ObsError::Element("expected `:` before the formula".to_string()))?;
    let mult_text = mult_text.trim();
    let parse_count = |t: &str| {
        t.trim()
            .parse::<u32>()
            .map_err(|_| ObsError::Element(format!("bad multiplicity count `{t}`")))
    };
    let mult = if let Some(k) = mult_text.strip_prefix("<=") {
        Multiplicity::AtMost(parse_count(k)?)
    } else if let Some(k) = mult_text.strip_prefix(">=") {
        Multiplicity::AtLeast(parse_count(k)?)
    } else if let Some(k) = mult_text.strip_prefix('=') {
        Multiplicity::Exactly(parse_count(k)?)
    } else {
        return Err(ObsError::Element(format!(
            "bad multiplicity `{mult_text}`, expected =k, <=k or >=k"
        )));
    };
    let formula = parse_formula(formula_text, assumption)?;
    Ok(Some(StreamItem::Element(ObservationElement {
        formula,
        lo,
        hi,
        mult,
    })))
}

/// A guard-free description of one way an event can satisfy a formula: a
/// concrete letter, a concrete assumption location right after the event,
/// and a conjunction of clock comparisons.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Disjunct {
    pub letter: usize,
    pub loc: usize,
    pub atoms: Vec<ClockConstraintAtom>,
}

#[derive(Clone)]
enum Lit {
    Letter(usize, bool),
    Loc(usize, bool),
    Clk(ClockConstraintAtom),
}

fn dnf(f: &ObsFormula, polarity: bool) -> Vec<Vec<Lit>> {
    match f {
        ObsFormula::Letter(a) => vec![vec![Lit::Letter(*a, polarity)]],
        ObsFormula::AtLocation(q) => vec![vec![Lit::Loc(*q, polarity)]],
        ObsFormula::Clock(atom) => {
            if polarity {
                vec![vec![Lit::Clk(atom.clone())]]
            } else {
                // Negated comparisons flip; != splits into two branches.
                atom.rel
                    .negated()
                    .into_iter()
                    .map(|rel| {
                        vec![Lit::Clk(ClockConstraintAtom {
                            clock: atom.clock,
                            rel,
                            constant: atom.constant,
                        })]
                    })
                    .collect()
            }
        }
        ObsFormula::Not(g) => dnf(g, !polarity),
        ObsFormula::And(l, r) if polarity => cross(dnf(l, true), dnf(r, true)),
        ObsFormula::And(l, r) => {
            let mut v = dnf(l, false);
            v.extend(dnf(r, false));
            v
        }
        ObsFormula::Or(l, r) if polarity => {
            let mut v = dnf(l, true);
            v.extend(dnf(r, true));
            v
        }
        ObsFormula::Or(l, r) => cross(dnf(l, false), dnf(r, false)),
    }
}

fn cross(a: Vec<Vec<Lit>>, b: Vec<Vec<Lit>>) -> Vec<Vec<Lit>> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for ca in &a {
        for cb in &b {
            let mut c = ca.clone();
            c.extend(cb.iter().cloned());
            out.push(c);
        }
    }
    out
}

fn rel_rank(rel: Rel) -> u8 {
    match rel {
        Rel::Lt => 0,
        Rel::Le => 1,
        Rel::Eq => 2,
        Rel::Ge => 3,
        Rel::Gt => 4,
    }
}

/// Checks a conjunction of single-clock comparisons for satisfiability over
/// nonnegative reals, clock by clock.
fn atoms_consistent(atoms: &[ClockConstraintAtom], n_clocks: usize) -> bool {
    let zero = Rational::from_integer(0);
    for c in 0..n_clocks {
        // (bound, strict)
        let mut lower = (zero, false);
        let mut upper: Option<(Rational, bool)> = None;
        for a in atoms.iter().filter(|a| a.clock == c) {
            match a.rel {
                Rel::Ge => {
                    if a.constant > lower.0 {
                        lower = (a.constant, false);
                    }
                }
                Rel::Gt => {
                    if a.constant > lower.0 || (a.constant == lower.0 && !lower.1) {
                        lower = (a.constant, true);
                    }
                }
                Rel::Le | Rel::Eq => {
                    let cand = (a.constant, false);
                    if upper.map_or(true, |u| cand.0 < u.0) {
                        upper = Some(cand);
                    }
                    if a.rel == Rel::Eq && (a.constant > lower.0 || (a.constant == lower.0 && !lower.1))
                    {
                        lower = (a.constant, false);
                    }
                }
                Rel::Lt => {
                    let cand = (a.constant, true);
                    if upper.map_or(true, |u| cand.0 < u.0 || (cand.0 == u.0 && !u.1)) {
                        upper = Some(cand);
                    }
                }
            }
        }
        if let Some(u) = upper {
            if lower.0 > u.0 || (lower.0 == u.0 && (lower.1 || u.1)) {
                return false;
            }
        }
    }
    true
}

/// Expands a formula into its satisfying (letter, location, clock guard)
/// combinations over the assumption automaton. Contradictory combinations
/// are dropped; the result is deduplicated and deterministic.
pub fn to_simple_disjuncts(f: &ObsFormula, assumption: &Tba) -> Vec<Disjunct> {
    let n_sym = assumption.alphabet.len();
    let n_loc = assumption.locations.len();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for conj in dnf(f, true) {
        let mut letters: Vec<bool> = vec![true; n_sym];
        let mut locs: Vec<bool> = vec![true; n_loc];
        let mut atoms: Vec<ClockConstraintAtom> = Vec::new();
        let mut feasible = true;
        for lit in &conj {
            match lit {
                Lit::Letter(a, true) => {
                    if !letters[*a] {
                        feasible = false;
                        break;
                    }
                    letters.iter_mut().enumerate().for_each(|(i, v)| *v = i == *a);
                }
                Lit::Letter(a, false) => letters[*a] = false,
                Lit::Loc(q, true) => {
                    if !locs[*q] {
                        feasible = false;
                        break;
                    }
                    locs.iter_mut().enumerate().for_each(|(i, v)| *v = i == *q);
                }
                Lit::Loc(q, false) => locs[*q] = false,
                Lit::Clk(atom) => atoms.push(atom.clone()),
            }
        }
        if !feasible || !atoms_consistent(&atoms, assumption.clocks.len()) {
            continue;
        }
        atoms.sort_by_key(|a| (a.clock, rel_rank(a.rel), a.constant));
        atoms.dedup();
        for a in letters.iter().enumerate().filter(|(_, v)| **v).map(|(i, _)| i) {
            for q in locs.iter().enumerate().filter(|(_, v)| **v).map(|(i, _)| i) {
                if seen.insert((a, q, atoms.clone())) {
                    out.push(Disjunct {
                        letter: a,
                        loc: q,
                        atoms: atoms.clone(),
                    });
                }
            }
        }
    }
    out
}

/// A finite union of symbolic states of one automaton: (location index, zone
/// over time + clocks). Insertion maintains the non-subsumption invariant.
#[derive(Clone)]
pub struct SymbolicStateSet {
    pub automaton: String,
    entries: Vec<(usize, Zone)>,
}

impl SymbolicStateSet {
    pub fn new(automaton: impl Into<String>) -> Self {
        SymbolicStateSet {
            automaton: automaton.into(),
            entries: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> impl Iterator<Item = &(usize, Zone)> {
        self.entries.iter()
    }

    pub fn locations(&self) -> BTreeSet<usize> {
        self.entries.iter().map(|(q, _)| *q).collect()
    }

    /// Adds a state unless an existing zone at the same location already
    /// covers it; drops existing entries the new zone covers. Returns
    /// whether the set changed.
    pub fn insert(&mut self, loc: usize, zone: Zone) -> bool {
        if zone.is_empty() {
            return false;
        }
        if self
            .entries
            .iter()
            .any(|(q, z)| *q == loc && z.includes(&zone))
        {
            return false;
        }
        self.entries
            .retain(|(q, z)| !(*q == loc && zone.includes(z)));
        self.entries.push((loc, zone));
        true
    }

    pub fn extend_from(&mut self, other: &SymbolicStateSet) -> bool {
        let mut changed = false;
        for (q, z) in &other.entries {
            changed |= self.insert(*q, z.clone());
        }
        changed
    }

    /// Lets time advance to exactly `t` (scaled units): the states reachable
    /// by pure delay whose total elapsed time equals t. Non-destructive.
    pub fn at_time(&self, t: i64) -> SymbolicStateSet {
        let mut out = SymbolicStateSet::new(self.automaton.clone());
        for (q, z) in &self.entries {
            let adv = z.up().and_atom(TIME_COL, Rel::Eq, t);
            out.insert(*q, adv);
        }
        out
    }

    /// Whether some member state at `loc` contains the concrete point
    /// (elapsed time followed by clock values).
    pub fn admits(&self, loc: usize, point: &[Rational]) -> bool {
        self.entries
            .iter()
            .any(|(q, z)| *q == loc && z.satisfies(point))
    }
}

impl fmt::Debug for SymbolicStateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SymbolicStateSet[{}] {} entries", self.automaton, self.len())?;
        for (q, z) in &self.entries {
            writeln!(f, " loc {q}: {z:?}")?;
        }
        Ok(())
    }
}

/// Matrix column of the `time` clock in reach zones.
pub const TIME_COL: usize = 1;

/// An automaton prepared for reach-set computation: zone context with the
/// `time` clock, per-location assumption components, and the columns of the
/// assumption clocks inside reach zones.
#[derive(Clone)]
pub struct Monitored {
    pub tba: Arc<Tba>,
    /// The assumption automaton; formulas resolve against it.
    pub assumption: Arc<Tba>,
    pub ctx: Arc<Vec<String>>,
    /// Per location: the assumption-automaton component (identity when the
    /// monitored automaton is the assumption itself).
    pub assumption_loc: Vec<usize>,
    /// Assumption clock index -> matrix column in reach zones.
    pub assumption_clock_col: Vec<usize>,
    /// Edge indices grouped by source location.
    adjacency: Vec<Vec<usize>>,
}

impl Monitored {
    fn build(
        tba: Arc<Tba>,
        assumption: Arc<Tba>,
        assumption_loc: Vec<usize>,
        assumption_clock_col: Vec<usize>,
    ) -> Self {
        let mut ctx = Vec::with_capacity(tba.clocks.len() + 1);
        ctx.push("time".to_string());
        ctx.extend(tba.clocks.iter().cloned());
        let mut adjacency = vec![Vec::new(); tba.locations.len()];
        for (i, e) in tba.edges.iter().enumerate() {
            adjacency[e.from].push(i);
        }
        Monitored {
            tba,
            assumption,
            ctx: Arc::new(ctx),
            assumption_loc,
            assumption_clock_col,
            adjacency,
        }
    }

    /// Monitors the assumption automaton itself.
    pub fn from_assumption(tba: Arc<Tba>) -> Self {
        let n = tba.locations.len();
        let cols = (0..tba.clocks.len()).map(clock_col).collect();
        Monitored::build(tba.clone(), tba, (0..n).collect(), cols)
    }

    /// Monitors a property (x) assumption product; the right factor must be
    /// the assumption.
    pub fn from_product(p: Product, assumption: Arc<Tba>) -> Self {
        let assumption_loc = p.components.iter().map(|&(_, r, _)| r).collect();
        let cols = p.right_clock_map.iter().map(|&c| clock_col(c)).collect();
        Monitored::build(Arc::new(p.tba), assumption, assumption_loc, cols)
    }

    /// All initial locations with every clock (and time) at zero.
    pub fn initial_set(&self) -> SymbolicStateSet {
        let mut s = SymbolicStateSet::new(self.tba.name.clone());
        for q in self.tba.initial_locations() {
            s.insert(q, Zone::zero(self.ctx.clone()));
        }
        s
    }
}

/// Matrix column of automaton clock `c` in reach zones (after the reference
/// row and the time clock).
pub fn clock_col(c: usize) -> usize {
    c + 2
}

/// Discrete-step successors of one symbolic state under one edge: delay,
/// check the guard, then reset. Exact, no extrapolation.
fn edge_post(zone: &Zone, edge: &Edge) -> Zone {
    let mut z = zone.up();
    for a in &edge.guard.atoms {
        z = z.and_atom(clock_col(a.clock), a.rel, a.int_const());
    }
    if z.is_empty() {
        return z;
    }
    let cols: Vec<usize> = edge.resets.iter().map(|&c| clock_col(c)).collect();
    z.reset(&cols)
}

/// All successors of `state` under edges labeled `symbol` into `target`.
pub fn post(
    state: &(usize, Zone),
    symbol: usize,
    target: usize,
    m: &Monitored,
) -> Vec<Zone> {
    m.adjacency[state.0]
        .iter()
        .map(|&i| &m.tba.edges[i])
        .filter(|e| e.symbol == symbol && e.to == target)
        .map(|e| edge_post(&state.1, e))
        .filter(|z| !z.is_empty())
        .collect()
}

/// One observed event satisfying `d` inside the scaled window [lo, hi]:
/// union over member states and matching edges of delay, guard, reset, then
/// the event-time window and the disjunct's clock constraints (evaluated on
/// the post-reset state).
pub fn succ(
    s: &SymbolicStateSet,
    d: &Disjunct,
    lo: i64,
    hi: i64,
    m: &Monitored,
    scale: i64,
) -> SymbolicStateSet {
    let mut out = SymbolicStateSet::new(s.automaton.clone());
    for (q, zone) in s.entries() {
        for &i in &m.adjacency[*q] {
            let e = &m.tba.edges[i];
            if e.symbol != d.letter || m.assumption_loc[e.to] != d.loc {
                continue;
            }
            let mut z = edge_post(zone, e);
            if z.is_empty() {
                continue;
            }
            z = z.and_atom(TIME_COL, Rel::Ge, lo).and_atom(TIME_COL, Rel::Le, hi);
            for a in &d.atoms {
                let k = crate::rat::scaled_int(a.constant, scale);
                z = z.and_atom(m.assumption_clock_col[a.clock], a.rel, k);
            }
            out.insert(e.to, z);
        }
    }
    out
}

fn succ_all(
    s: &SymbolicStateSet,
    ds: &[Disjunct],
    lo: i64,
    hi: i64,
    m: &Monitored,
    scale: i64,
) -> SymbolicStateSet {
    let mut out = SymbolicStateSet::new(s.automaton.clone());
    for d in ds {
        out.extend_from(&succ(s, d, lo, hi, m, scale));
    }
    out
}

/// Applies one normalized observation element to a reach set. `= k` steps k
/// times, `<= k` accumulates 0..k steps, `>= 0` closes under arbitrarily
/// many steps (a least fixed point; termination holds because clocks only
/// grow up to the window bound between resets, keeping the zone universe
/// finite without extrapolation).
pub fn apply_element(
    s: &SymbolicStateSet,
    e: &ObservationElement,
    m: &Monitored,
    scale: i64,
) -> SymbolicStateSet {
    let ds = to_simple_disjuncts(&e.formula, &m.assumption);
    let lo = crate::rat::scaled_int(e.lo, scale);
    let hi = crate::rat::scaled_int(e.hi, scale);
    match e.mult {
        Multiplicity::Exactly(k) => {
            let mut cur = s.clone();
            for _ in 0..k {
                cur = succ_all(&cur, &ds, lo, hi, m, scale);
            }
            cur
        }
        Multiplicity::AtMost(k) => {
            let mut acc = s.clone();
            let mut cur = s.clone();
            for _ in 0..k {
                cur = succ_all(&cur, &ds, lo, hi, m, scale);
                if cur.is_empty() {
                    break;
                }
                acc.extend_from(&cur);
            }
            acc
        }
        Multiplicity::AtLeast(k) => {
            let mut acc = s.clone();
            for _ in 0..k {
                acc = succ_all(&acc, &ds, lo, hi, m, scale);
            }
            // Least fixed point, explored frontier-first. Monotonicity of
            // succ lets subsumed candidates be skipped outright.
            let mut frontier = acc.clone();
            let mut rounds = 0usize;
            while !frontier.is_empty() {
                rounds += 1;
                assert!(rounds < 1_000_000, "event fixed point diverged");
                let layer = succ_all(&frontier, &ds, lo, hi, m, scale);
                frontier = SymbolicStateSet::new(s.automaton.clone());
                for (q, z) in layer.entries() {
                    if !acc.entries().any(|(aq, az)| aq == q && az.includes(z)) {
                        frontier.insert(*q, z.clone());
                    }
                }
                let fresh: Vec<(usize, Zone)> = frontier.entries().cloned().collect();
                for (q, z) in fresh {
                    acc.insert(q, z);
                }
            }
            acc
        }
    }
}
