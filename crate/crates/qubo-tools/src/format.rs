//! Line-oriented text formats. All writers emit a canonical form (sorted,
//! single-space separated, trailing newline) so identical values produce
//! byte-identical files; the parsers accept exactly what the writers emit
//! plus comments and blank lines where noted.

use qubo_core::hc::Graph;
use qubo_core::qubo::{Label, QuboAccumulator, VarId, VariableRegistry};
use qubo_core::sat::{Clause, Formula, Literal};
use std::fmt::Write as _;
use thiserror::Error;

/// Parse failure, pointing at the offending line (1-based).
#[derive(Clone, PartialEq, Eq, Debug, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, message: message.into() }
}

/// Whitespace-separated fields of one line, tracking the field position for
/// error messages.
struct LineFields<'a> {
    line: usize,
    field: usize,
    rest: std::str::SplitWhitespace<'a>,
}

impl<'a> LineFields<'a> {
    fn new(line: usize, text: &'a str) -> Self {
        LineFields { line, field: 0, rest: text.split_whitespace() }
    }

    fn next(&mut self, what: &str) -> Result<&'a str, ParseError> {
        self.field += 1;
        self.rest
            .next()
            .ok_or_else(|| err(self.line, format!("field {}: missing {what}", self.field)))
    }

    fn parsed<T: std::str::FromStr>(&mut self, what: &str) -> Result<T, ParseError> {
        let s = self.next(what)?;
        s.parse()
            .map_err(|_| err(self.line, format!("field {}: expected {what}, got `{s}`", self.field)))
    }

    fn literal(&mut self, want: &str) -> Result<(), ParseError> {
        let got = self.next(want)?;
        if got == want {
            Ok(())
        } else {
            Err(err(self.line, format!("field {}: expected `{want}`, got `{got}`", self.field)))
        }
    }

    fn end(mut self) -> Result<(), ParseError> {
        match self.rest.next() {
            None => Ok(()),
            Some(s) => Err(err(self.line, format!("unexpected trailing field `{s}`"))),
        }
    }
}

/// Numbered lines with a control-character guard (tabs pass, they are field
/// separators like spaces).
struct Cursor<'a> {
    lines: std::str::Lines<'a>,
    num: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor { lines: text.lines(), num: 0 }
    }

    fn next(&mut self) -> Result<Option<(usize, &'a str)>, ParseError> {
        match self.lines.next() {
            None => Ok(None),
            Some(l) => {
                self.num += 1;
                if l.chars().any(|c| c.is_control() && c != '\t') {
                    return Err(err(self.num, "control character"));
                }
                Ok(Some((self.num, l)))
            }
        }
    }

    fn expect(&mut self, what: &str) -> Result<(usize, &'a str), ParseError> {
        self.next()?
            .ok_or_else(|| err(self.num + 1, format!("unexpected end of file: missing {what}")))
    }
}

/// A matrix file: coefficients, one label per variable, and the
/// clause-to-ancilla map lines the SAT compiler adds (empty otherwise).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QuboFile {
    pub accumulator: QuboAccumulator,
    pub registry: VariableRegistry,
    /// `(clause, level, ancilla ids)`, sorted by clause then level.
    pub maps: Vec<(u32, u32, Vec<VarId>)>,
}

/// Canonical text form: header `qubo <n> <offset> <entries>`, entries sorted
/// by (i, j), then `var <index> <label>` for every variable, then any
/// `map <clause> <level> <ids...>` lines.
pub fn render_qubo(file: &QuboFile) -> String {
    let acc = &file.accumulator;
    assert_eq!(acc.n(), file.registry.len(), "every variable needs a label");
    let mut out = String::new();
    let _ = writeln!(out, "qubo {} {} {}", acc.n(), acc.offset(), acc.num_entries());
    for (i, j, c) in acc.entries() {
        let _ = writeln!(out, "{i} {j} {c}");
    }
    for (i, label) in file.registry.labels().iter().enumerate() {
        let _ = writeln!(out, "var {i} {}", label.to_token());
    }
    for (clause, level, ids) in &file.maps {
        let _ = write!(out, "map {clause} {level}");
        for id in ids {
            let _ = write!(out, " {id}");
        }
        out.push('\n');
    }
    out
}

pub fn parse_qubo(text: &str) -> Result<QuboFile, ParseError> {
    let mut cur = Cursor::new(text);
    let (hline, header) = cur.expect("the `qubo` header")?;
    let mut f = LineFields::new(hline, header);
    f.literal("qubo")?;
    let n: u32 = f.parsed("variable count")?;
    let offset: i64 = f.parsed("offset")?;
    let count: usize = f.parsed("entry count")?;
    f.end()?;

    let mut acc = QuboAccumulator::new(n);
    acc.add_offset(offset);
    let mut prev: Option<(u32, u32)> = None;
    for _ in 0..count {
        let (lnum, line) = cur.expect("a matrix entry")?;
        let mut f = LineFields::new(lnum, line);
        let i: u32 = f.parsed("row index")?;
        let j: u32 = f.parsed("column index")?;
        let coeff: i64 = f.parsed("coefficient")?;
        f.end()?;
        if j < i {
            return Err(err(lnum, format!("entry ({i}, {j}) has j < i")));
        }
        if j >= n {
            return Err(err(lnum, format!("column index {j} out of range (n = {n})")));
        }
        if coeff == 0 {
            return Err(err(lnum, "zero coefficient"));
        }
        if prev.is_some_and(|p| (i, j) <= p) {
            return Err(err(lnum, format!("entry ({i}, {j}) out of order")));
        }
        prev = Some((i, j));
        acc.add_entry(VarId(i), VarId(j), coeff);
    }

    let mut registry = VariableRegistry::new();
    let mut seen_ancilla = false;
    for want in 0..n {
        let (lnum, line) = cur.expect("a variable label")?;
        let mut f = LineFields::new(lnum, line);
        f.literal("var")?;
        let index: u32 = f.parsed("variable index")?;
        let token = f.next("label")?;
        f.end()?;
        if index != want {
            return Err(err(lnum, format!("variable index {index} out of order (expected {want})")));
        }
        let label = Label::parse_token(token).map_err(|e| err(lnum, e.to_string()))?;
        match &label {
            Label::Problem(_) if seen_ancilla => {
                return Err(err(lnum, "problem variable after an ancilla"));
            }
            Label::Problem(_) => {}
            _ => seen_ancilla = true,
        }
        registry.push(label);
    }

    let mut maps: Vec<(u32, u32, Vec<VarId>)> = Vec::new();
    let mut prev_map: Option<(u32, u32)> = None;
    while let Some((lnum, line)) = cur.next()? {
        let mut f = LineFields::new(lnum, line);
        f.literal("map")?;
        let clause: u32 = f.parsed("clause index")?;
        let level: u32 = f.parsed("level")?;
        let mut ids = Vec::new();
        while let Some(s) = f.rest.next() {
            f.field += 1;
            let id: u32 = s
                .parse()
                .map_err(|_| err(lnum, format!("field {}: expected ancilla id, got `{s}`", f.field)))?;
            if id >= n {
                return Err(err(lnum, format!("ancilla id {id} out of range (n = {n})")));
            }
            ids.push(VarId(id));
        }
        if ids.is_empty() {
            return Err(err(lnum, "map line lists no ancillas"));
        }
        if prev_map.is_some_and(|p| (clause, level) <= p) {
            return Err(err(lnum, format!("map ({clause}, {level}) out of order")));
        }
        prev_map = Some((clause, level));
        maps.push((clause, level, ids));
    }

    Ok(QuboFile { accumulator: acc, registry, maps })
}

/// DIMACS CNF: `p cnf <vars> <clauses>` and 0-terminated signed literals,
/// one clause per line. Variables are 1-based in the file.
pub fn render_cnf(f: &Formula) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "p cnf {} {}", f.var_count(), f.clauses().len());
    for c in f.clauses() {
        for l in c.literals() {
            let v = i64::from(l.var.0) + 1;
            let _ = write!(out, "{} ", if l.negated { -v } else { v });
        }
        out.push_str("0\n");
    }
    out
}

/// Accepts comment (`c`) and blank lines anywhere and clauses spanning
/// lines; the clause count must match the header exactly.
pub fn parse_cnf(text: &str) -> Result<Formula, ParseError> {
    let mut cur = Cursor::new(text);
    let mut header: Option<(u32, usize, usize)> = None;
    let mut clauses: Vec<Clause> = Vec::new();
    let mut open: Vec<Literal> = Vec::new();
    while let Some((lnum, raw)) = cur.next()? {
        let line = raw.trim_start();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(err(lnum, "duplicate header"));
            }
            let mut f = LineFields::new(lnum, line);
            f.literal("p")?;
            f.literal("cnf")?;
            let vars: u32 = f.parsed("variable count")?;
            let want: usize = f.parsed("clause count")?;
            f.end()?;
            header = Some((vars, want, lnum));
            continue;
        }
        let Some((vars, want, _)) = header else {
            return Err(err(lnum, "clause data before the `p cnf` header"));
        };
        for tok in line.split_whitespace() {
            let v: i64 = tok
                .parse()
                .map_err(|_| err(lnum, format!("expected a literal, got `{tok}`")))?;
            if v == 0 {
                let c = Clause::new(std::mem::take(&mut open))
                    .map_err(|_| err(lnum, "empty clause"))?;
                clauses.push(c);
                if clauses.len() > want {
                    return Err(err(lnum, format!("more than {want} clauses")));
                }
            } else {
                if v.unsigned_abs() > u64::from(vars) {
                    return Err(err(lnum, format!("literal {v} out of range (vars = {vars})")));
                }
                let id = VarId(v.unsigned_abs() as u32 - 1);
                open.push(if v < 0 { Literal::neg(id) } else { Literal::pos(id) });
            }
        }
    }
    let last = cur.num.max(1);
    let Some((vars, want, hline)) = header else {
        return Err(err(last, "missing `p cnf` header"));
    };
    if !open.is_empty() {
        return Err(err(last, "unterminated clause (missing 0)"));
    }
    if clauses.len() != want {
        return Err(err(last, format!("header declares {want} clauses, found {}", clauses.len())));
    }
    Formula::new(vars, clauses).map_err(|e| err(hline, e.to_string()))
}

/// Edge list: `p hc <vertices> <edges> <directed|undirected>`, then one
/// 1-based `tail head` pair per line. Undirected files list each pair once.
pub fn render_graph(g: &Graph) -> String {
    let kind = if g.is_directed() { "directed" } else { "undirected" };
    let mut out = String::new();
    let _ = writeln!(out, "p hc {} {} {}", g.vertex_count(), g.listed_edges().len(), kind);
    for &(a, b) in g.listed_edges() {
        let _ = writeln!(out, "{} {}", a + 1, b + 1);
    }
    out
}

/// Accepts comment (`c`) and blank lines anywhere.
pub fn parse_graph(text: &str) -> Result<Graph, ParseError> {
    let mut cur = Cursor::new(text);
    let mut header: Option<(u32, usize, bool, usize)> = None;
    let mut edges: Vec<(u32, u32)> = Vec::new();
    let mut seen: std::collections::BTreeSet<(u32, u32)> = std::collections::BTreeSet::new();
    while let Some((lnum, raw)) = cur.next()? {
        let line = raw.trim_start();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let Some((vertices, want, directed, _)) = header else {
            let mut f = LineFields::new(lnum, line);
            f.literal("p")?;
            f.literal("hc")?;
            let vertices: u32 = f.parsed("vertex count")?;
            let want: usize = f.parsed("edge count")?;
            let directed = match f.next("`directed` or `undirected`")? {
                "directed" => true,
                "undirected" => false,
                other => {
                    return Err(err(
                        lnum,
                        format!("expected `directed` or `undirected`, got `{other}`"),
                    ));
                }
            };
            f.end()?;
            header = Some((vertices, want, directed, lnum));
            continue;
        };
        if edges.len() == want {
            return Err(err(lnum, "unexpected data after the edge list"));
        }
        let mut f = LineFields::new(lnum, line);
        let a: u32 = f.parsed("tail vertex")?;
        let b: u32 = f.parsed("head vertex")?;
        f.end()?;
        for v in [a, b] {
            if v == 0 || v > vertices {
                return Err(err(lnum, format!("vertex {v} out of range (1..={vertices})")));
            }
        }
        if a == b {
            return Err(err(lnum, format!("self-loop at vertex {a}")));
        }
        let (a, b) = (a - 1, b - 1);
        let key = if directed || a < b { (a, b) } else { (b, a) };
        if !seen.insert(key) {
            return Err(err(lnum, "duplicate edge"));
        }
        edges.push((a, b));
    }
    let last = cur.num.max(1);
    let Some((vertices, want, directed, hline)) = header else {
        return Err(err(last, "missing `p hc` header"));
    };
    if edges.len() != want {
        return Err(err(last, format!("header declares {want} edges, found {}", edges.len())));
    }
    let build = if directed { Graph::directed } else { Graph::undirected };
    build(vertices, edges).map_err(|e| err(hline, e.to_string()))
}

/// One line of `0`/`1` characters, leftmost bit first.
pub fn render_solution(bits: &[bool]) -> String {
    let mut out: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
    out.push('\n');
    out
}

pub fn parse_solution(text: &str) -> Result<Vec<bool>, ParseError> {
    let mut cur = Cursor::new(text);
    let mut bits: Option<Vec<bool>> = None;
    while let Some((lnum, raw)) = cur.next()? {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if bits.is_some() {
            return Err(err(lnum, "more than one solution line"));
        }
        let mut v = Vec::with_capacity(line.len());
        for c in line.chars() {
            match c {
                '0' => v.push(false),
                '1' => v.push(true),
                _ => return Err(err(lnum, format!("expected 0 or 1, got `{c}`"))),
            }
        }
        bits = Some(v);
    }
    bits.ok_or_else(|| err(cur.num.max(1), "empty solution file"))
}
