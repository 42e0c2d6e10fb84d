//! Timed Büchi automata: model, JSON (de)serialization, constant scaling,
//! Büchi product, and the strong non-Zenoness transformation.
//!
//! Guards are conjunctions of comparisons of a single clock against a
//! nonnegative rational constant; difference constraints only ever arise
//! internally in zones. Acceptance is Büchi: a run is accepting iff it visits
//! accepting locations infinitely often while total time diverges.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::rat::{common_scale, format_rational, parse_rational, Rational, RationalError};
pub use crate::zones::Rel;

/// One guard conjunct `clock rel constant` (clock by index into
/// `Tba::clocks`).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ClockConstraintAtom {
    pub clock: usize,
    pub rel: Rel,
    pub constant: Rational,
}

impl ClockConstraintAtom {
    /// The constant as an integer; valid on scaled automata.
    pub fn int_const(&self) -> i64 {
        assert!(self.constant.is_integer(), "unscaled constant in guard");
        *self.constant.numer()
    }

    pub fn holds(&self, value: Rational) -> bool {
        self.rel.holds(value, self.constant)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Guard {
    pub atoms: Vec<ClockConstraintAtom>,
}

impl Guard {
    pub fn satisfied_by(&self, valuation: &[Rational]) -> bool {
        self.atoms.iter().all(|a| a.holds(valuation[a.clock]))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub symbol: usize,
    pub guard: Guard,
    /// Sorted clock indices reset to zero when the edge fires.
    pub resets: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Location {
    pub id: String,
    pub initial: bool,
    pub accepting: bool,
}

/// A timed Büchi automaton. `scale` is 1 for freshly parsed automata and
/// records the factor applied by `scale_constants`.
#[derive(Clone, Debug)]
pub struct Tba {
    pub name: String,
    pub alphabet: Vec<String>,
    pub clocks: Vec<String>,
    pub locations: Vec<Location>,
    pub edges: Vec<Edge>,
    pub scale: i64,
}

impl Tba {
    pub fn loc_idx(&self, id: &str) -> Option<usize> {
        self.locations.iter().position(|l| l.id == id)
    }

    pub fn symbol_idx(&self, s: &str) -> Option<usize> {
        self.alphabet.iter().position(|a| a == s)
    }

    pub fn clock_idx(&self, c: &str) -> Option<usize> {
        self.clocks.iter().position(|x| x == c)
    }

    pub fn initial_locations(&self) -> Vec<usize> {
        (0..self.locations.len())
            .filter(|&i| self.locations[i].initial)
            .collect()
    }

    pub fn accepting_locations(&self) -> Vec<usize> {
        (0..self.locations.len())
            .filter(|&i| self.locations[i].accepting)
            .collect()
    }

    pub fn edges_from(&self, loc: usize) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.from == loc)
    }

    /// Largest constant each clock is compared against (scaled units), 0 for
    /// clocks that appear in no guard. These drive extrapolation and the
    /// region granularity of the reference oracle.
    pub fn clock_ceilings(&self) -> Vec<i64> {
        let mut out = vec![0i64; self.clocks.len()];
        for e in &self.edges {
            for a in &e.guard.atoms {
                out[a.clock] = out[a.clock].max(a.int_const());
            }
        }
        out
    }

    /// The automaton accepting every timed word over `alphabet`: one
    /// accepting initial location with an unguarded self-loop per symbol.
    pub fn universal(alphabet: &[String]) -> Tba {
        let edges = (0..alphabet.len())
            .map(|symbol| Edge {
                from: 0,
                to: 0,
                symbol,
                guard: Guard::default(),
                resets: Vec::new(),
            })
            .collect();
        Tba {
            name: "universal".to_string(),
            alphabet: alphabet.to_vec(),
            clocks: Vec::new(),
            locations: vec![Location {
                id: "u".to_string(),
                initial: true,
                accepting: true,
            }],
            edges,
            scale: 1,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum TbaError {
    #[error("invalid JSON at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("duplicate location id `{0}`")]
    DuplicateLocation(String),
    #[error("duplicate alphabet symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("duplicate clock `{0}`")]
    DuplicateClock(String),
    #[error("edge refers to undeclared location `{0}`")]
    UnknownLocation(String),
    #[error("edge refers to undeclared symbol `{0}`")]
    UnknownSymbol(String),
    #[error("edge refers to undeclared clock `{0}`")]
    UnknownClock(String),
    #[error("negative guard constant {value} on clock `{clock}`")]
    NegativeConstant { clock: String, value: String },
    #[error(transparent)]
    Rational(#[from] RationalError),
}

#[derive(Serialize, Deserialize)]
struct RawLocation {
    id: String,
    #[serde(default, skip_serializing_if = "is_false")]
    initial: bool,
    #[serde(default, skip_serializing_if = "is_false")]
    accepting: bool,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Serialize, Deserialize)]
struct RawAtom {
    clock: String,
    rel: String,
    #[serde(rename = "const")]
    constant: serde_json::Value,
}

#[derive(Serialize, Deserialize)]
struct RawEdge {
    from: String,
    to: String,
    symbol: String,
    #[serde(default)]
    guard: Vec<RawAtom>,
    #[serde(default)]
    resets: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct RawTba {
    name: String,
    alphabet: Vec<String>,
    clocks: Vec<String>,
    locations: Vec<RawLocation>,
    edges: Vec<RawEdge>,
}

fn parse_rel(text: &str) -> Option<Rel> {
    match text {
        "<" => Some(Rel::Lt),
        "<=" => Some(Rel::Le),
        "==" => Some(Rel::Eq),
        ">=" => Some(Rel::Ge),
        ">" => Some(Rel::Gt),
        _ => None,
    }
}

fn rel_text(rel: Rel) -> &'static str {
    match rel {
        Rel::Lt => "<",
        Rel::Le => "<=",
        Rel::Eq => "==",
        Rel::Ge => ">=",
        Rel::Gt => ">",
    }
}

/// Parses the JSON automaton format. Constants may be written as JSON
/// integers or as strings `"n"` / `"p/q"`.
pub fn parse_tba(document: &str) -> Result<Tba, TbaError> {
    let raw: RawTba = serde_json::from_str(document).map_err(|e| TbaError::Json {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;

    let mut seen = BTreeSet::new();
    for l in &raw.locations {
        if !seen.insert(l.id.clone()) {
            return Err(TbaError::DuplicateLocation(l.id.clone()));
        }
    }
    let mut seen = BTreeSet::new();
    for s in &raw.alphabet {
        if !seen.insert(s.clone()) {
            return Err(TbaError::DuplicateSymbol(s.clone()));
        }
    }
    let mut seen = BTreeSet::new();
    for c in &raw.clocks {
        if !seen.insert(c.clone()) {
            return Err(TbaError::DuplicateClock(c.clone()));
        }
    }

    let loc_of: HashMap<&str, usize> = raw
        .locations
        .iter()
        .enumerate()
        .map(|(i, l)| (l.id.as_str(), i))
        .collect();
    let sym_of: HashMap<&str, usize> = raw
        .alphabet
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let clk_of: HashMap<&str, usize> = raw
        .clocks
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i))
        .collect();

    let mut edges = Vec::with_capacity(raw.edges.len());
    for e in &raw.edges {
        let from = *loc_of
            .get(e.from.as_str())
            .ok_or_else(|| TbaError::UnknownLocation(e.from.clone()))?;
        let to = *loc_of
            .get(e.to.as_str())
            .ok_or_else(|| TbaError::UnknownLocation(e.to.clone()))?;
        let symbol = *sym_of
            .get(e.symbol.as_str())
            .ok_or_else(|| TbaError::UnknownSymbol(e.symbol.clone()))?;
        let mut atoms = Vec::with_capacity(e.guard.len());
        for a in &e.guard {
            let clock = *clk_of
                .get(a.clock.as_str())
                .ok_or_else(|| TbaError::UnknownClock(a.clock.clone()))?;
            let rel = parse_rel(&a.rel).ok_or_else(|| TbaError::Json {
                line: 0,
                column: 0,
                message: format!("unknown relation `{}`", a.rel),
            })?;
            let constant = match &a.constant {
                serde_json::Value::String(s) => parse_rational(s)?,
                serde_json::Value::Number(n) => match n.as_i64() {
                    Some(v) => Rational::from_integer(v),
                    None => return Err(RationalError::Malformed(n.to_string()).into()),
                },
                other => return Err(RationalError::Malformed(other.to_string()).into()),
            };
            if constant < Rational::from_integer(0) {
                return Err(TbaError::NegativeConstant {
                    clock: a.clock.clone(),
                    value: format_rational(constant),
                });
            }
            atoms.push(ClockConstraintAtom {
                clock,
                rel,
                constant,
            });
        }
        let mut resets = Vec::with_capacity(e.resets.len());
        for r in &e.resets {
            let c = *clk_of
                .get(r.as_str())
                .ok_or_else(|| TbaError::UnknownClock(r.clone()))?;
            resets.push(c);
        }
        resets.sort_unstable();
        resets.dedup();
        edges.push(Edge {
            from,
            to,
            symbol,
            guard: Guard { atoms },
            resets,
        });
    }

    Ok(Tba {
        name: raw.name,
        alphabet: raw.alphabet,
        clocks: raw.clocks,
        locations: raw
            .locations
            .into_iter()
            .map(|l| Location {
                id: l.id,
                initial: l.initial,
                accepting: l.accepting,
            })
            .collect(),
        edges,
        scale: 1,
    })
}

/// Serializes back to the JSON format `parse_tba` accepts. Constants are
/// divided by the recorded scale, so scaled automata round-trip to their
/// original units.
pub fn serialize_tba(tba: &Tba) -> String {
    let raw = RawTba {
        name: tba.name.clone(),
        alphabet: tba.alphabet.clone(),
        clocks: tba.clocks.clone(),
        locations: tba
            .locations
            .iter()
            .map(|l| RawLocation {
                id: l.id.clone(),
                initial: l.initial,
                accepting: l.accepting,
            })
            .collect(),
        edges: tba
            .edges
            .iter()
            .map(|e| RawEdge {
                from: tba.locations[e.from].id.clone(),
                to: tba.locations[e.to].id.clone(),
                symbol: tba.alphabet[e.symbol].clone(),
                guard: e
                    .guard
                    .atoms
                    .iter()
                    .map(|a| RawAtom {
                        clock: tba.clocks[a.clock].clone(),
                        rel: rel_text(a.rel).to_string(),
                        constant: serde_json::Value::String(format_rational(
                            a.constant / Rational::from_integer(tba.scale),
                        )),
                    })
                    .collect(),
                resets: e.resets.iter().map(|&c| tba.clocks[c].clone()).collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&raw).expect("automaton serialization cannot fail")
}

/// Rescales a family of automata (plus any loose constants that must stay
/// representable, e.g. observation endpoints) to integer guard constants.
/// Returns the scaled copies and the common factor.
pub fn scale_constants(automata: &[&Tba], extra: &[Rational]) -> (Vec<Tba>, i64) {
    let mut denoms: Vec<Rational> = extra.to_vec();
    for t in automata {
        assert_eq!(t.scale, 1, "automaton already scaled");
        for e in &t.edges {
            for a in &e.guard.atoms {
                denoms.push(a.constant);
            }
        }
    }
    let scale = common_scale(denoms.iter());
    let factor = Rational::from_integer(scale);
    let scaled = automata
        .iter()
        .map(|t| {
            let mut c = (*t).clone();
            for e in &mut c.edges {
                for a in &mut e.guard.atoms {
                    a.constant *= factor;
                }
            }
            c.scale = scale;
            c
        })
        .collect();
    (scaled, scale)
}

#[derive(Debug, thiserror::Error)]
pub enum ProductError {
    #[error("alphabet mismatch: {0:?} vs {1:?}")]
    AlphabetMismatch(Vec<String>, Vec<String>),
    #[error("scale mismatch: {0} vs {1}")]
    ScaleMismatch(i64, i64),
    #[error("cannot disambiguate clock `{0}`")]
    ClockCollision(String),
}

/// Büchi product of two automata over the same alphabet, with the standard
/// waiting-flag construction and structural reachability pruning.
pub struct Product {
    pub tba: Tba,
    /// Per product location: (left location, right location, flag).
    pub components: Vec<(usize, usize, u8)>,
    /// Left clock index -> product clock index.
    pub left_clock_map: Vec<usize>,
    /// Right clock index -> product clock index.
    pub right_clock_map: Vec<usize>,
}

/// Builds the product recognizing the intersection language. Product
/// locations carry a flag: 0 while waiting for a left accepting visit, 1
/// while waiting for a right one; accepting locations are exactly flag 1
/// with a right accepting component, so product acceptance holds iff both
/// factors accept infinitely often.
///
/// When both automata declare a clock of the same name, the left copy is
/// qualified as `{left.name}.{clock}`; right clocks always keep their names
/// (observation formulas resolve against the right factor).
pub fn product(left: &Tba, right: &Tba) -> Result<Product, ProductError> {
    if left.alphabet != right.alphabet {
        return Err(ProductError::AlphabetMismatch(
            left.alphabet.clone(),
            right.alphabet.clone(),
        ));
    }
    if left.scale != right.scale {
        return Err(ProductError::ScaleMismatch(left.scale, right.scale));
    }

    let mut clocks: Vec<String> = Vec::with_capacity(left.clocks.len() + right.clocks.len());
    for c in &left.clocks {
        let name = if right.clocks.contains(c) {
            format!("{}.{}", left.name, c)
        } else {
            c.clone()
        };
        if clocks.contains(&name) || right.clocks.contains(&name) {
            return Err(ProductError::ClockCollision(name));
        }
        clocks.push(name);
    }
    let left_clock_map: Vec<usize> = (0..left.clocks.len()).collect();
    let right_clock_map: Vec<usize> = (0..right.clocks.len())
        .map(|j| left.clocks.len() + j)
        .collect();
    clocks.extend(right.clocks.iter().cloned());

    // Structural reachability: explore (l, r, flag) triples ignoring guards.
    let mut index: HashMap<(usize, usize, u8), usize> = HashMap::new();
    let mut components: Vec<(usize, usize, u8)> = Vec::new();
    let mut locations: Vec<Location> = Vec::new();
    let mut queue: VecDeque<usize> = VecDeque::new();

    let mut intern = |l: usize,
                      r: usize,
                      f: u8,
                      initial: bool,
                      components: &mut Vec<(usize, usize, u8)>,
                      locations: &mut Vec<Location>,
                      queue: &mut VecDeque<usize>|
     -> usize {
        if let Some(&i) = index.get(&(l, r, f)) {
            return i;
        }
        let i = components.len();
        index.insert((l, r, f), i);
        components.push((l, r, f));
        locations.push(Location {
            id: format!("({},{},{})", left.locations[l].id, right.locations[r].id, f),
            initial,
            accepting: f == 1 && right.locations[r].accepting,
        });
        queue.push_back(i);
        i
    };

    for &l in &left.initial_locations() {
        for &r in &right.initial_locations() {
            intern(l, r, 0, true, &mut components, &mut locations, &mut queue);
        }
    }

    let mut edges: Vec<Edge> = Vec::new();
    while let Some(src) = queue.pop_front() {
        let (l, r, f) = components[src];
        let next_flag = if f == 0 {
            if left.locations[l].accepting {
                1
            } else {
                0
            }
        } else if right.locations[r].accepting {
            0
        } else {
            1
        };
        for el in left.edges_from(l) {
            for er in right.edges.iter().filter(|er| er.from == r) {
                if el.symbol != er.symbol {
                    continue;
                }
                let dst = intern(
                    el.to,
                    er.to,
                    next_flag,
                    false,
                    &mut components,
                    &mut locations,
                    &mut queue,
                );
                let mut atoms: Vec<ClockConstraintAtom> = el
                    .guard
                    .atoms
                    .iter()
                    .map(|a| ClockConstraintAtom {
                        clock: left_clock_map[a.clock],
                        rel: a.rel,
                        constant: a.constant,
                    })
                    .collect();
                atoms.extend(er.guard.atoms.iter().map(|a| ClockConstraintAtom {
                    clock: right_clock_map[a.clock],
                    rel: a.rel,
                    constant: a.constant,
                }));
                let mut resets: Vec<usize> = el
                    .resets
                    .iter()
                    .map(|&c| left_clock_map[c])
                    .chain(er.resets.iter().map(|&c| right_clock_map[c]))
                    .collect();
                resets.sort_unstable();
                resets.dedup();
                edges.push(Edge {
                    from: src,
                    to: dst,
                    symbol: el.symbol,
                    guard: Guard { atoms },
                    resets,
                });
            }
        }
    }

    Ok(Product {
        tba: Tba {
            name: format!("({}x{})", left.name, right.name),
            alphabet: left.alphabet.clone(),
            clocks,
            locations,
            edges,
            scale: left.scale,
        },
        components,
        left_clock_map,
        right_clock_map,
    })
}

/// Result of the strong non-Zenoness transformation. Original locations keep
/// their indices 0..n_original; accepting duplicates follow.
pub struct NonZeno {
    pub tba: Tba,
    /// Index of the added witness clock in `tba.clocks`.
    pub z_idx: usize,
    pub n_original: usize,
}

/// Rebuilds the automaton so that every accepting cycle is forced to take at
/// least one time unit per accepting visit, without changing the accepted
/// language. Acceptance moves to duplicated locations entered only by edges
/// that check `z >= 1` and reset z, where z is a fresh clock.
pub fn strongly_non_zeno(b: &Tba) -> NonZeno {
    let mut z_name = "_nz".to_string();
    let mut n = 0u32;
    while b.clocks.contains(&z_name) {
        n += 1;
        z_name = format!("_nz{n}");
    }
    let mut clocks = b.clocks.clone();
    clocks.push(z_name);
    let z_idx = clocks.len() - 1;

    let mut suffix = "@nz".to_string();
    let mut k = 0u32;
    loop {
        let clash = b
            .locations
            .iter()
            .filter(|l| l.accepting)
            .any(|l| b.loc_idx(&format!("{}{}", l.id, suffix)).is_some());
        if !clash {
            break;
        }
        k += 1;
        suffix = format!("@nz{k}");
    }

    let n_original = b.locations.len();
    let mut locations: Vec<Location> = b
        .locations
        .iter()
        .map(|l| Location {
            id: l.id.clone(),
            initial: l.initial,
            accepting: false,
        })
        .collect();
    // copy_of[q] = index of q's accepting duplicate, for q accepting.
    let mut copy_of: HashMap<usize, usize> = HashMap::new();
    for (q, l) in b.locations.iter().enumerate() {
        if l.accepting {
            copy_of.insert(q, locations.len());
            locations.push(Location {
                id: format!("{}{}", l.id, suffix),
                initial: false,
                accepting: true,
            });
        }
    }

    let one_unit = ClockConstraintAtom {
        clock: z_idx,
        rel: Rel::Ge,
        constant: Rational::from_integer(b.scale),
    };

    let mut edges: Vec<Edge> = Vec::new();
    let push_variants = |from: usize, e: &Edge, edges: &mut Vec<Edge>| {
        edges.push(Edge {
            from,
            to: e.to,
            symbol: e.symbol,
            guard: e.guard.clone(),
            resets: e.resets.clone(),
        });
        if let Some(&hat) = copy_of.get(&e.to) {
            let mut atoms = e.guard.atoms.clone();
            atoms.push(one_unit.clone());
            let mut resets = e.resets.clone();
            resets.push(z_idx);
            resets.sort_unstable();
            resets.dedup();
            edges.push(Edge {
                from,
                to: hat,
                symbol: e.symbol,
                guard: Guard { atoms },
                resets,
            });
        }
    };
    for e in &b.edges {
        push_variants(e.from, e, &mut edges);
        if let Some(&hat_from) = copy_of.get(&e.from) {
            push_variants(hat_from, e, &mut edges);
        }
    }

    NonZeno {
        tba: Tba {
            name: format!("{}+nz", b.name),
            alphabet: b.alphabet.clone(),
            clocks,
            locations,
            edges,
            scale: b.scale,
        },
        z_idx,
        n_original,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn two_loc_fixture() -> Tba {
        parse_tba(
            r#"{
              "name": "demo",
              "alphabet": ["a", "b"],
              "clocks": ["x", "y"],
              "locations": [
                {"id": "q0", "initial": true},
                {"id": "q1", "accepting": true}
              ],
              "edges": [
                {"from": "q0", "to": "q1", "symbol": "a",
                 "guard": [{"clock": "x", "rel": "<=", "const": "10"}],
                 "resets": ["y"]},
                {"from": "q1", "to": "q0", "symbol": "b",
                 "guard": [{"clock": "y", "rel": ">", "const": "1/2"}],
                 "resets": []}
              ]
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn parses_and_round_trips() {
        let t = two_loc_fixture();
        assert_eq!(t.alphabet, ["a", "b"]);
        assert_eq!(t.clocks, ["x", "y"]);
        assert_eq!(t.initial_locations(), [0]);
        assert_eq!(t.accepting_locations(), [1]);
        assert_eq!(t.edges[0].resets, [1]);
        assert_eq!(t.edges[1].guard.atoms[0].constant, Rational::new(1, 2));

        let again = parse_tba(&serialize_tba(&t)).unwrap();
        assert_eq!(serialize_tba(&again), serialize_tba(&t));
    }

    #[test]
    fn scaled_automata_serialize_back_in_original_units() {
        let t = two_loc_fixture();
        let (scaled, s) = scale_constants(&[&t], &[]);
        assert_eq!(s, 2);
        assert_eq!(scaled[0].edges[1].guard.atoms[0].int_const(), 1);
        assert_eq!(scaled[0].edges[0].guard.atoms[0].int_const(), 20);
        assert_eq!(serialize_tba(&scaled[0]), serialize_tba(&t));
    }

    #[test]
    fn scale_accounts_for_loose_constants() {
        let t = Tba::universal(&["a".to_string()]);
        let (_, s) = scale_constants(&[&t], &[Rational::new(1, 3), Rational::new(1, 2)]);
        assert_eq!(s, 6);
    }

    #[test]
    fn rejects_malformed_documents() {
        assert!(matches!(parse_tba("{"), Err(TbaError::Json { .. })));
        let dup = r#"{"name":"d","alphabet":["a"],"clocks":[],
            "locations":[{"id":"q"},{"id":"q"}],"edges":[]}"#;
        assert!(matches!(parse_tba(dup), Err(TbaError::DuplicateLocation(_))));
        let unk = r#"{"name":"d","alphabet":["a"],"clocks":[],
            "locations":[{"id":"q","initial":true}],
            "edges":[{"from":"q","to":"r","symbol":"a"}]}"#;
        assert!(matches!(parse_tba(unk), Err(TbaError::UnknownLocation(_))));
        let neg = r#"{"name":"d","alphabet":["a"],"clocks":["x"],
            "locations":[{"id":"q","initial":true}],
            "edges":[{"from":"q","to":"q","symbol":"a",
                      "guard":[{"clock":"x","rel":"<","const":"-1"}]}]}"#;
        assert!(matches!(parse_tba(neg), Err(TbaError::NegativeConstant { .. })));
        let badclk = r#"{"name":"d","alphabet":["a"],"clocks":[],
            "locations":[{"id":"q","initial":true}],
            "edges":[{"from":"q","to":"q","symbol":"a","resets":["x"]}]}"#;
        assert!(matches!(parse_tba(badclk), Err(TbaError::UnknownClock(_))));
    }

    #[test]
    fn product_flag_discipline() {
        // Left: accepts on every `a` (single accepting location).
        let left = parse_tba(
            r#"{"name":"L","alphabet":["a"],"clocks":[],
                "locations":[{"id":"p","initial":true,"accepting":true}],
                "edges":[{"from":"p","to":"p","symbol":"a"}]}"#,
        )
        .unwrap();
        // Right: alternates between two locations, accepting only in r1.
        let right = parse_tba(
            r#"{"name":"R","alphabet":["a"],"clocks":[],
                "locations":[{"id":"r0","initial":true},
                             {"id":"r1","accepting":true}],
                "edges":[{"from":"r0","to":"r1","symbol":"a"},
                         {"from":"r1","to":"r0","symbol":"a"}]}"#,
        )
        .unwrap();
        let p = product(&left, &right).unwrap();
        // (p,r0,0) -a-> (p,r1,1) -a-> (p,r0,0): flag set by the left visit,
        // cleared when the right acceptance is observed.
        assert_eq!(p.tba.locations.len(), 2);
        let acc = p.tba.accepting_locations();
        assert_eq!(acc.len(), 1);
        let (l, r, f) = p.components[acc[0]];
        assert_eq!((l, r, f), (0, 1, 1));
        assert!(p.tba.locations[acc[0]].id.contains("r1"));
    }

    #[test]
    fn product_prunes_structurally_unreachable_pairs() {
        let left = parse_tba(
            r#"{"name":"L","alphabet":["a","b"],"clocks":[],
                "locations":[{"id":"p0","initial":true},{"id":"p1","accepting":true}],
                "edges":[{"from":"p0","to":"p1","symbol":"a"},
                         {"from":"p1","to":"p1","symbol":"a"}]}"#,
        )
        .unwrap();
        let right = parse_tba(
            r#"{"name":"R","alphabet":["a","b"],"clocks":[],
                "locations":[{"id":"r0","initial":true},{"id":"rb","accepting":true}],
                "edges":[{"from":"r0","to":"r0","symbol":"a"},
                         {"from":"r0","to":"rb","symbol":"b"},
                         {"from":"rb","to":"rb","symbol":"b"}]}"#,
        )
        .unwrap();
        let p = product(&left, &right).unwrap();
        // No joint edge ever reaches rb (left lacks b-edges), so only pairs
        // with right component r0 materialize.
        assert!(p.components.iter().all(|&(_, r, _)| r == 0));
    }

    #[test]
    fn product_qualifies_colliding_left_clocks() {
        let mk = |name: &str| {
            parse_tba(&format!(
                r#"{{"name":"{name}","alphabet":["a"],"clocks":["x"],
                    "locations":[{{"id":"q","initial":true,"accepting":true}}],
                    "edges":[{{"from":"q","to":"q","symbol":"a",
                              "guard":[{{"clock":"x","rel":"<","const":"5"}}],
                              "resets":["x"]}}]}}"#
            ))
            .unwrap()
        };
        let p = product(&mk("A"), &mk("B")).unwrap();
        assert_eq!(p.tba.clocks, ["A.x", "x"]);
        assert_eq!(p.left_clock_map, [0]);
        assert_eq!(p.right_clock_map, [1]);
        // Two flag phases of the single pair; each joint edge carries both
        // guards and both resets.
        assert_eq!(p.tba.edges.len(), 2);
        for e in &p.tba.edges {
            assert_eq!(e.guard.atoms.len(), 2);
            assert_eq!(e.resets, [0, 1]);
        }
    }

    #[test]
    fn product_alphabets_must_match() {
        let a = Tba::universal(&["a".to_string()]);
        let b = Tba::universal(&["a".to_string(), "b".to_string()]);
        assert!(matches!(
            product(&a, &b),
            Err(ProductError::AlphabetMismatch(..))
        ));
    }

    #[test]
    fn non_zeno_transform_shape() {
        let t = two_loc_fixture();
        let nz = strongly_non_zeno(&t);
        // One location copy per accepting location.
        assert_eq!(nz.tba.locations.len(), 2 + 1);
        assert_eq!(nz.n_original, 2);
        assert_eq!(nz.tba.clocks, ["x", "y", "_nz"]);
        // Originals lose acceptance, copies carry it.
        assert!(!nz.tba.locations[1].accepting);
        assert!(nz.tba.locations[2].accepting);
        assert!(!nz.tba.locations[2].initial);
        // q0 -a-> q1 spawns a checked variant into the copy.
        let hat_edges: Vec<&Edge> = nz.tba.edges.iter().filter(|e| e.to == 2).collect();
        assert_eq!(hat_edges.len(), 1);
        let he = hat_edges[0];
        assert_eq!(he.from, 0);
        assert!(he.guard.atoms.iter().any(|a| a.clock == nz.z_idx
            && a.rel == Rel::Ge
            && a.constant == Rational::from_integer(1)));
        assert!(he.resets.contains(&nz.z_idx));
        // The copy mirrors q1's outgoing edges.
        assert!(nz.tba.edges.iter().any(|e| e.from == 2 && e.to == 0));
    }

    #[test]
    fn non_zeno_unit_check_uses_scaled_units() {
        let t = two_loc_fixture();
        let (scaled, s) = scale_constants(&[&t], &[]);
        assert_eq!(s, 2);
        let nz = strongly_non_zeno(&scaled[0]);
        let he = nz.tba.edges.iter().find(|e| e.to == 2).unwrap();
        let atom = he.guard.atoms.iter().find(|a| a.clock == nz.z_idx).unwrap();
        assert_eq!(atom.int_const(), 2);
    }

    #[test]
    fn universal_automaton_accepts_structure() {
        let u = Tba::universal(&["a".to_string(), "b".to_string()]);
        assert_eq!(u.locations.len(), 1);
        assert_eq!(u.edges.len(), 2);
        assert!(u.locations[0].initial && u.locations[0].accepting);
        let again = parse_tba(&serialize_tba(&u)).unwrap();
        assert_eq!(again.edges.len(), 2);
    }
}
