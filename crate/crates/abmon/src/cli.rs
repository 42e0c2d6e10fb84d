//! Command-line front end: monitoring sessions over observation streams, and
//! generators for the three benchmark families (task sequence, conveyor
//! belt, jobshop scheduling).
//!
//! A session reads three automaton files (assumption, property, negated
//! property), then consumes an observation stream either from a file or from
//! standard input. Elements advance the monitor; `? t` lines print a
//! verdict. In per-element mode a verdict is also printed after every
//! element, at the earliest queryable instant.

use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};

use crate::automata::{
    parse_tba, scale_constants, serialize_tba, ClockConstraintAtom, Edge, Guard, Location, Rel,
    Tba,
};
use crate::monitor::{self, MonitorState, QueryError};
use crate::observations::{parse_stream_line, ObsFormula, StreamItem};
use crate::rat::Rational;

/// Clean end of stream.
pub const EXIT_OK: i32 = 0;
/// Unreadable or malformed input (automaton files, stream lines, generator
/// parameters).
pub const EXIT_PARSE: i32 = 1;
/// A structurally valid query the monitor rejects (before the observation
/// horizon). clap itself exits with 2 on usage errors, so 3 keeps the codes
/// distinct.
pub const EXIT_REJECTED_QUERY: i32 = 3;

#[derive(Clone, Debug)]
pub enum ObsSource {
    File(PathBuf),
    Stdin,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputMode {
    /// Print a verdict only for `? t` lines.
    PerQuery,
    /// Additionally print a verdict after every element, at the element
    /// horizon.
    PerElement,
}

/// Everything a monitoring session needs. All three automaton paths are
/// mandatory; the observation source defaults to standard input.
#[derive(Clone, Debug)]
pub struct SessionConfig {
    pub assumption: PathBuf,
    pub property: PathBuf,
    pub neg_property: PathBuf,
    pub obs: ObsSource,
    pub mode: OutputMode,
    /// Append one `element,micros` row per element to this file.
    pub latency_csv: Option<PathBuf>,
}

#[derive(Parser)]
#[command(
    name = "abmon",
    about = "Online monitor for timed Büchi properties under assumptions",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Monitor an observation stream against a property pair under an
    /// assumption.
    Run {
        /// Assumption automaton (JSON).
        #[arg(long)]
        assumption: PathBuf,
        /// Property automaton (JSON).
        #[arg(long)]
        property: PathBuf,
        /// Negated-property automaton (JSON).
        #[arg(long)]
        neg_property: PathBuf,
        /// Observation stream file; standard input when omitted.
        #[arg(long)]
        obs: Option<PathBuf>,
        /// Print a verdict after every element, not only on `? t` lines.
        #[arg(long)]
        per_element: bool,
        /// Write per-element processing latency rows to this CSV file.
        #[arg(long)]
        latency_csv: Option<PathBuf>,
    },
    /// Generate a benchmark instance (assumption + property pair files).
    #[command(subcommand)]
    Gen(GenCommand),
}

#[derive(Subcommand)]
pub enum GenCommand {
    /// Chain of k tasks with delay windows; property: every a1 is answered
    /// by ak within the bound.
    TaskSeq {
        /// Number of tasks (at least 2).
        #[arg(long)]
        k: usize,
        /// Lower delay bounds: one value for all steps, or k-1 comma-separated.
        #[arg(long)]
        l: String,
        /// Upper delay bounds: one value for all steps, or k-1 comma-separated.
        #[arg(long)]
        u: String,
        /// Response deadline for the property pair.
        #[arg(long)]
        bound: i64,
        /// Output directory for assumption.json, prop.json, negprop.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Two-mode conveyor belt; property: no fault ever occurs.
    Conveyor {
        #[arg(long)]
        out: PathBuf,
    },
    /// n+1 processes sharing two resources; property: all done within n.
    Jobshop {
        /// Number of short processes (process 0 takes n time units).
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Parses argv and dispatches; returns the process exit code.
pub fn cli_main() -> i32 {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            assumption,
            property,
            neg_property,
            obs,
            per_element,
            latency_csv,
        } => run(&SessionConfig {
            assumption,
            property,
            neg_property,
            obs: obs.map(ObsSource::File).unwrap_or(ObsSource::Stdin),
            mode: if per_element {
                OutputMode::PerElement
            } else {
                OutputMode::PerQuery
            },
            latency_csv,
        }),
        Command::Gen(g) => {
            let (out, triple) = match g {
                GenCommand::TaskSeq { k, l, u, bound, out } => {
                    let bounds = parse_csv_bounds(&l, k).and_then(|l| {
                        parse_csv_bounds(&u, k).map(|u| (l, u))
                    });
                    match bounds.and_then(|(l, u)| gen_task_seq(k, &l, &u, bound)) {
                        Ok(t) => (out, t),
                        Err(e) => {
                            eprintln!("gen task-seq: {e}");
                            return EXIT_PARSE;
                        }
                    }
                }
                GenCommand::Conveyor { out } => (out, gen_conveyor()),
                GenCommand::Jobshop { n, out } => match gen_jobshop(n) {
                    Ok(t) => (out, t),
                    Err(e) => {
                        eprintln!("gen jobshop: {e}");
                        return EXIT_PARSE;
                    }
                },
            };
            match write_instance(&out, &triple) {
                Ok(()) => EXIT_OK,
                Err(e) => {
                    eprintln!("gen: {e}");
                    EXIT_PARSE
                }
            }
        }
    }
}

fn write_instance(dir: &Path, (a, p, n): &(Tba, Tba, Tba)) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    for (file, tba) in [("assumption.json", a), ("prop.json", p), ("negprop.json", n)] {
        let path = dir.join(file);
        fs::write(&path, serialize_tba(tba))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn load_tba(path: &Path) -> Result<Tba, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_tba(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn formula_constants(f: &ObsFormula, out: &mut Vec<Rational>) {
    match f {
        ObsFormula::Clock(a) => out.push(a.constant),
        ObsFormula::Not(g) => formula_constants(g, out),
        ObsFormula::And(l, r) | ObsFormula::Or(l, r) => {
            formula_constants(l, out);
            formula_constants(r, out);
        }
        ObsFormula::Letter(_) | ObsFormula::AtLocation(_) => {}
    }
}

struct LatencyLog {
    writer: std::io::BufWriter<fs::File>,
    element: usize,
}

impl LatencyLog {
    fn open(path: &Path) -> Result<LatencyLog, String> {
        let file = fs::File::create(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let mut writer = std::io::BufWriter::new(file);
        writeln!(writer, "element,micros").map_err(|e| format!("{}: {e}", path.display()))?;
        Ok(LatencyLog { writer, element: 0 })
    }

    fn record(&mut self, spent: std::time::Duration) {
        self.element += 1;
        // Best effort: latency logging must not abort a session.
        let _ = writeln!(self.writer, "{},{}", self.element, spent.as_micros());
    }
}

/// Runs one monitoring session; returns the process exit code. Verdicts go
/// to standard output, diagnostics (with line numbers for stream errors) to
/// standard error.
pub fn run(config: &SessionConfig) -> i32 {
    let parsed: Result<Vec<Tba>, String> = [
        &config.assumption,
        &config.property,
        &config.neg_property,
    ]
    .into_iter()
    .map(|p| load_tba(p))
    .collect();
    let parsed = match parsed {
        Ok(v) => v,
        Err(e) => {
            eprintln!("{e}");
            return EXIT_PARSE;
        }
    };

    let mut latency = match &config.latency_csv {
        Some(path) => match LatencyLog::open(path) {
            Ok(l) => Some(l),
            Err(e) => {
                eprintln!("{e}");
                return EXIT_PARSE;
            }
        },
        None => None,
    };

    match &config.obs {
        ObsSource::File(path) => {
            let text = match fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("{}: {e}", path.display());
                    return EXIT_PARSE;
                }
            };
            let source = path.display().to_string();
            // Parse the whole stream first so the common scale can cover
            // every endpoint, formula constant and query time in the file.
            let mut items = Vec::new();
            for (idx, line) in text.lines().enumerate() {
                match parse_stream_line(line, &parsed[0]) {
                    Ok(None) => {}
                    Ok(Some(item)) => items.push((idx + 1, item)),
                    Err(e) => {
                        eprintln!("{source}:{}: {e}", idx + 1);
                        return EXIT_PARSE;
                    }
                }
            }
            let mut extra = Vec::new();
            for (_, item) in &items {
                match item {
                    StreamItem::Element(el) => {
                        extra.push(el.lo);
                        extra.push(el.hi);
                        formula_constants(&el.formula, &mut extra);
                    }
                    StreamItem::Query(t) => extra.push(*t),
                }
            }
            let mut m = match init_session(&parsed, &extra) {
                Ok(m) => m,
                Err(e) => {
                    eprintln!("{e}");
                    return EXIT_PARSE;
                }
            };
            for (line_no, item) in &items {
                if let Some(code) =
                    step(&mut m, item, &source, *line_no, config.mode, &mut latency)
                {
                    return code;
                }
            }
            EXIT_OK
        }
        ObsSource::Stdin => {
            // Streaming: the scale is fixed by the automata alone, and a
            // stream constant it cannot represent is a parse error on its
            // line.
            let mut m = match init_session(&parsed, &[]) {
                Ok(m) => m,
                Err(e) => {
                    eprintln!("{e}");
                    return EXIT_PARSE;
                }
            };
            let stdin = std::io::stdin();
            for (idx, line) in stdin.lock().lines().enumerate() {
                let line_no = idx + 1;
                let line = match line {
                    Ok(l) => l,
                    Err(e) => {
                        eprintln!("<stdin>:{line_no}: {e}");
                        return EXIT_PARSE;
                    }
                };
                let item = match parse_stream_line(&line, &parsed[0]) {
                    Ok(None) => continue,
                    Ok(Some(item)) => item,
                    Err(e) => {
                        eprintln!("<stdin>:{line_no}: {e}");
                        return EXIT_PARSE;
                    }
                };
                if let Some(code) =
                    step(&mut m, &item, "<stdin>", line_no, config.mode, &mut latency)
                {
                    return code;
                }
            }
            EXIT_OK
        }
    }
}

fn init_session(parsed: &[Tba], extra: &[Rational]) -> Result<MonitorState, String> {
    let (scaled, _) = scale_constants(&[&parsed[0], &parsed[1], &parsed[2]], extra);
    monitor::init(&scaled[0], &scaled[1], &scaled[2]).map_err(|e| e.to_string())
}

/// Applies one stream item. Returns Some(exit code) when the session must
/// stop.
fn step(
    m: &mut MonitorState,
    item: &StreamItem,
    source: &str,
    line_no: usize,
    mode: OutputMode,
    latency: &mut Option<LatencyLog>,
) -> Option<i32> {
    match item {
        StreamItem::Element(el) => {
            let started = Instant::now();
            if let Err(e) = m.observe(el) {
                eprintln!("{source}:{line_no}: {e}");
                return Some(EXIT_PARSE);
            }
            if mode == OutputMode::PerElement {
                let t = Rational::new(m.horizon(), m.scale());
                // Impartiality keeps later output consistent, so a
                // definitive verdict here does not end the session.
                match m.issue_verdict(t) {
                    Ok(v) => println!("{v}"),
                    Err(e) => {
                        eprintln!("{source}:{line_no}: {e}");
                        return Some(EXIT_REJECTED_QUERY);
                    }
                }
            }
            if let Some(log) = latency {
                log.record(started.elapsed());
            }
            None
        }
        StreamItem::Query(t) => match m.issue_verdict(*t) {
            Ok(v) => {
                println!("{v}");
                None
            }
            Err(e @ QueryError::BeforeHorizon { .. }) => {
                eprintln!("{source}:{line_no}: {e}");
                Some(EXIT_REJECTED_QUERY)
            }
            Err(e @ QueryError::Scale(..)) => {
                eprintln!("{source}:{line_no}: {e}");
                Some(EXIT_PARSE)
            }
        },
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GenError {
    #[error("k must be at least 2")]
    SmallK,
    #[error("need 1 or k-1 delay bounds, got {0}")]
    WindowCount(usize),
    #[error("delay bounds must be nonnegative")]
    NegativeWindow,
    #[error("l must not exceed u at step {step} ({l} > {u})")]
    WindowOrder { step: usize, l: i64, u: i64 },
    #[error("bad delay bound `{0}`")]
    BadBound(String),
    #[error("n must be at least 1")]
    SmallN,
    #[error("n too large for the configured location cap")]
    TooLarge,
}

/// Expands `--l` / `--u` text: a single value is replicated to k-1 steps, a
/// comma-separated list must have exactly k-1 entries.
pub fn parse_csv_bounds(text: &str, k: usize) -> Result<Vec<i64>, GenError> {
    let values: Result<Vec<i64>, GenError> = text
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<i64>()
                .map_err(|_| GenError::BadBound(p.trim().to_string()))
        })
        .collect();
    let values = values?;
    if k >= 2 && values.len() == 1 {
        return Ok(vec![values[0]; k - 1]);
    }
    if k >= 2 && values.len() != k - 1 {
        return Err(GenError::WindowCount(values.len()));
    }
    Ok(values)
}

/// Incremental TBA assembly for the generators.
struct Build {
    t: Tba,
}

impl Build {
    fn new(name: &str, alphabet: Vec<String>, clocks: Vec<String>) -> Build {
        Build {
            t: Tba {
                name: name.to_string(),
                alphabet,
                clocks,
                locations: Vec::new(),
                edges: Vec::new(),
                scale: 1,
            },
        }
    }

    fn loc(&mut self, id: String, initial: bool, accepting: bool) -> usize {
        self.t.locations.push(Location {
            id,
            initial,
            accepting,
        });
        self.t.locations.len() - 1
    }

    fn edge(
        &mut self,
        from: usize,
        to: usize,
        symbol: usize,
        atoms: Vec<(usize, Rel, i64)>,
        mut resets: Vec<usize>,
    ) {
        resets.sort_unstable();
        self.t.edges.push(Edge {
            from,
            to,
            symbol,
            guard: Guard {
                atoms: atoms
                    .into_iter()
                    .map(|(clock, rel, n)| ClockConstraintAtom {
                        clock,
                        rel,
                        constant: Rational::from_integer(n),
                    })
                    .collect(),
            },
            resets,
        });
    }
}

/// The task-sequence family: a chain automaton emitting a1 .. ak with delay
/// windows [l_i, u_i] between consecutive events, then `$` forever, and the
/// property pair for "every a1 is followed by ak within `bound`".
pub fn gen_task_seq(
    k: usize,
    l: &[i64],
    u: &[i64],
    bound: i64,
) -> Result<(Tba, Tba, Tba), GenError> {
    if k < 2 {
        return Err(GenError::SmallK);
    }
    if l.len() != k - 1 {
        return Err(GenError::WindowCount(l.len()));
    }
    if u.len() != k - 1 {
        return Err(GenError::WindowCount(u.len()));
    }
    if bound < 0 || l.iter().chain(u).any(|&v| v < 0) {
        return Err(GenError::NegativeWindow);
    }
    for (i, (&lo, &hi)) in l.iter().zip(u).enumerate() {
        if lo > hi {
            return Err(GenError::WindowOrder {
                step: i + 1,
                l: lo,
                u: hi,
            });
        }
    }

    let mut alphabet: Vec<String> = (1..=k).map(|i| format!("a{i}")).collect();
    alphabet.push("$".to_string());
    let end = k; // symbol index of `$`; a_i is index i - 1

    let mut a = Build::new("task_seq", alphabet.clone(), vec!["x".to_string()]);
    for i in 0..=k {
        a.loc(format!("q{i}"), i == 0, i == k);
    }
    a.edge(0, 1, 0, vec![], vec![0]);
    for i in 1..k {
        a.edge(
            i,
            i + 1,
            i,
            vec![(0, Rel::Ge, l[i - 1]), (0, Rel::Le, u[i - 1])],
            vec![0],
        );
    }
    a.edge(k, k, end, vec![], vec![]);

    // Property: location `idle` is accepting; `pending` holds an unanswered
    // a1, timed from the oldest one, and only an in-time ak releases it.
    let mut p = Build::new("bounded_response", alphabet.clone(), vec!["y".to_string()]);
    let idle = p.loc("idle".to_string(), true, true);
    let pending = p.loc("pending".to_string(), false, false);
    for s in 0..=k {
        if s != 0 {
            p.edge(idle, idle, s, vec![], vec![]);
        }
        if s != k - 1 {
            p.edge(pending, pending, s, vec![], vec![]);
        }
    }
    p.edge(idle, pending, 0, vec![], vec![0]);
    p.edge(pending, idle, k - 1, vec![(0, Rel::Le, bound)], vec![]);

    // Negation: nondeterministically pick an a1 and accept once no in-time
    // ak can answer it.
    let mut np = Build::new("unanswered_start", alphabet, vec!["y".to_string()]);
    let watch = np.loc("watch".to_string(), true, false);
    let late = np.loc("late".to_string(), false, true);
    for s in 0..=k {
        np.edge(watch, watch, s, vec![], vec![]);
        if s != k - 1 {
            np.edge(late, late, s, vec![], vec![]);
        }
    }
    np.edge(watch, late, 0, vec![], vec![0]);
    np.edge(late, late, k - 1, vec![(0, Rel::Gt, bound)], vec![]);

    Ok((a.t, p.t, np.t))
}

/// The conveyor-belt family: a nominal and a faulty copy of a three-step
/// cycle (start after 1, stop within a mode-dependent window, move after 1),
/// with unguarded fault switches, and the property pair for "no fault".
pub fn gen_conveyor() -> (Tba, Tba, Tba) {
    let alphabet: Vec<String> = ["start", "stop", "move", "fault"]
        .map(str::to_string)
        .to_vec();
    let (start, stop, mov, fault) = (0, 1, 2, 3);

    let mut a = Build::new("conveyor", alphabet.clone(), vec!["x".to_string()]);
    let qn: Vec<usize> = (0..3)
        .map(|i| a.loc(format!("qn{i}"), i == 0, i == 0))
        .collect();
    let qf: Vec<usize> = (0..3).map(|i| a.loc(format!("qf{i}"), false, i == 0)).collect();
    for (locs, stop_lo, stop_hi) in [(&qn, 8, 10), (&qf, 7, 9)] {
        a.edge(locs[0], locs[1], start, vec![(0, Rel::Eq, 1)], vec![0]);
        a.edge(
            locs[1],
            locs[2],
            stop,
            vec![(0, Rel::Ge, stop_lo), (0, Rel::Le, stop_hi)],
            vec![0],
        );
        a.edge(locs[2], locs[0], mov, vec![(0, Rel::Eq, 1)], vec![0]);
    }
    for i in 0..3 {
        a.edge(qn[i], qf[i], fault, vec![], vec![]);
    }

    let mut p = Build::new("never_fault", alphabet.clone(), vec![]);
    let ok = p.loc("ok".to_string(), true, true);
    for s in [start, stop, mov] {
        p.edge(ok, ok, s, vec![], vec![]);
    }

    let mut np = Build::new("eventually_fault", alphabet, vec![]);
    let w = np.loc("watch".to_string(), true, false);
    let f = np.loc("faulted".to_string(), false, true);
    for s in [start, stop, mov] {
        np.edge(w, w, s, vec![], vec![]);
    }
    np.edge(w, f, fault, vec![], vec![]);
    for s in [start, stop, mov, fault] {
        np.edge(f, f, s, vec![], vec![]);
    }

    (a.t, p.t, np.t)
}

/// Largest jobshop flattening the generator will produce, measured in
/// assumption locations.
pub const JOBSHOP_LOCATION_CAP: usize = 20_000;

const IDLE: u8 = 0;
const RES_A: u8 = 1;
const RES_B: u8 = 2;
const DONE: u8 = 3;

fn jobshop_name(s: &[u8]) -> String {
    s.iter()
        .map(|&v| match v {
            IDLE => 'I',
            RES_A => 'A',
            RES_B => 'B',
            _ => 'D',
        })
        .collect()
}

/// The jobshop family: n+1 processes each grab one of two exclusive
/// resources within n time units (process 0 then works for n units, the
/// others for 1) and signal completion. Flattened to a single automaton over
/// state tuples, restricted to the reachable ones; starts are `tau`,
/// completions `d0 .. dn`. Property pair for "all done within n".
pub fn gen_jobshop(n: usize) -> Result<(Tba, Tba, Tba), GenError> {
    if n == 0 {
        return Err(GenError::SmallN);
    }
    let m = n + 1;
    // Reachable tuples have at most one process per resource; counting the
    // placements gives 2^(m-2) * (m^2 + 3m + 4), checked against the cap
    // before any allocation.
    if m >= 16 || (1usize << (m - 2)) * (m * m + 3 * m + 4) > JOBSHOP_LOCATION_CAP {
        return Err(GenError::TooLarge);
    }

    let mut alphabet = vec!["tau".to_string()];
    alphabet.extend((0..m).map(|i| format!("d{i}")));
    let tau = 0;
    let d = |i: usize| i + 1;

    let clocks: Vec<String> = (0..m).map(|i| format!("x{i}")).collect();

    // Tuple successors under the four schemes; guards are attached when the
    // edges are materialized below.
    let moves = |s: &[u8]| {
        let mut out: Vec<(usize, Vec<u8>)> = Vec::new();
        let has_a = s.contains(&RES_A);
        let has_b = s.contains(&RES_B);
        for i in 0..m {
            match s[i] {
                IDLE => {
                    if !has_a {
                        let mut t = s.to_vec();
                        t[i] = RES_A;
                        out.push((tau, t));
                    }
                    if !has_b {
                        let mut t = s.to_vec();
                        t[i] = RES_B;
                        out.push((tau, t));
                    }
                }
                RES_A | RES_B => {
                    let mut t = s.to_vec();
                    t[i] = DONE;
                    out.push((d(i), t));
                }
                _ => {}
            }
        }
        out
    };

    let initial = vec![IDLE; m];
    let all_done = vec![DONE; m];
    let mut index = std::collections::HashMap::new();
    let mut tuples = vec![initial.clone()];
    index.insert(initial, 0usize);
    let mut frontier = 0;
    while frontier < tuples.len() {
        let s = tuples[frontier].clone();
        frontier += 1;
        for (_, t) in moves(&s) {
            if !index.contains_key(&t) {
                index.insert(t.clone(), tuples.len());
                tuples.push(t);
            }
        }
    }

    let mut a = Build::new("jobshop", alphabet.clone(), clocks);
    for s in &tuples {
        a.loc(jobshop_name(s), *s == vec![IDLE; m], *s == all_done);
    }
    for (from, s) in tuples.iter().enumerate() {
        for (symbol, t) in moves(s) {
            let to = index[&t];
            // The changed slot identifies the acting process.
            let i = (0..m).find(|&i| s[i] != t[i]).expect("tuples differ");
            if symbol == tau {
                a.edge(from, to, tau, vec![(i, Rel::Le, n as i64)], vec![i]);
            } else {
                let work = if i == 0 { n as i64 } else { 1 };
                a.edge(from, to, symbol, vec![(i, Rel::Ge, work)], vec![]);
            }
        }
    }
    // The done state has no outgoing scheme; an unguarded self-loop keeps
    // its (accepting) language nonempty.
    let done_idx = index[&all_done];
    a.edge(done_idx, done_idx, tau, vec![], vec![]);

    // Property: track the set of completions seen by time n; accept once
    // complete.
    let mut p = Build::new("all_done_in_time", alphabet.clone(), vec!["t".to_string()]);
    let full = (1usize << m) - 1;
    for mask in 0..=full {
        let mut id = "s".to_string();
        for i in 0..m {
            if mask & (1 << i) != 0 {
                id.push(char::from_digit(i as u32, 10).expect("cap keeps m below 10"));
            }
        }
        p.loc(id, mask == 0, mask == full);
    }
    for mask in 0..=full {
        if mask == full {
            for s in 0..alphabet.len() {
                p.edge(full, full, s, vec![], vec![]);
            }
            continue;
        }
        p.edge(mask, mask, tau, vec![], vec![]);
        for i in 0..m {
            if mask & (1 << i) == 0 {
                p.edge(mask, mask | (1 << i), d(i), vec![(0, Rel::Le, n as i64)], vec![]);
            }
        }
    }

    // Negation: guess a process whose completion misses the window.
    let mut np = Build::new("some_task_late", alphabet.clone(), vec!["t".to_string()]);
    for i in 0..m {
        np.loc(format!("w{i}"), true, true);
    }
    for i in 0..m {
        for s in 0..alphabet.len() {
            if s == d(i) {
                np.edge(i, i, s, vec![(0, Rel::Gt, n as i64)], vec![]);
            } else {
                np.edge(i, i, s, vec![], vec![]);
            }
        }
    }

    Ok((a.t, p.t, np.t))
}
