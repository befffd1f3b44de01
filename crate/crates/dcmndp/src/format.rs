//! The DCMNDP-v1 text format.
//!
//! ```text
//! dcmndp 1
//! n 3 m 3 k 1
//! e 0 0 1 2
//! f 5 10
//! f 10 18
//! ...
//! c 0 0 2 7
//! ```
//!
//! Lines are whitespace separated, `#` starts a comment, blank lines are
//! ignored. Each `e <id> <u> <v> <L>` line is followed by exactly `L` facility
//! lines `f <capacity> <cost>`.

use std::fmt;
use std::fmt::Write as _;

use dcmndp_core::{Commodity, Edge, FacilityOption, Instance, Violation};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SyntaxError {
    MissingHeader,
    BadHeader,
    MissingCounts,
    BadCounts,
    UnknownDirective(String),
    FieldCount { directive: &'static str, expected: usize, found: usize },
    NotAnInteger(String),
    StrayFacility,
    MissingFacilities { edge: usize, expected: usize, found: usize },
    CountMismatch { what: &'static str, declared: usize, found: usize },
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SyntaxError::MissingHeader => f.write_str("missing `dcmndp 1` header"),
            SyntaxError::BadHeader => f.write_str("expected `dcmndp 1`"),
            SyntaxError::MissingCounts => f.write_str("missing `n <nodes> m <edges> k <commodities>` line"),
            SyntaxError::BadCounts => f.write_str("expected `n <nodes> m <edges> k <commodities>`"),
            SyntaxError::UnknownDirective(d) => write!(f, "unknown directive `{d}`"),
            SyntaxError::FieldCount { directive, expected, found } => {
                write!(f, "`{directive}` takes {expected} fields, found {found}")
            }
            SyntaxError::NotAnInteger(tok) => write!(f, "`{tok}` is not a nonnegative integer"),
            SyntaxError::StrayFacility => f.write_str("facility line outside an edge block"),
            SyntaxError::MissingFacilities { edge, expected, found } => {
                write!(f, "edge {edge} declares {expected} facilities but {found} follow")
            }
            SyntaxError::CountMismatch { what, declared, found } => {
                write!(f, "declared {declared} {what}, found {found}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// 1-based line number; the last line for errors found at end of input.
    pub line: usize,
    pub error: SyntaxError,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.error)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FormatError {
    Syntax(ParseError),
    Invalid(Vec<Violation>),
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormatError::Syntax(e) => e.fmt(f),
            FormatError::Invalid(v) => {
                for (i, violation) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str("; ")?;
                    }
                    violation.fmt(f)?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for FormatError {}

impl From<ParseError> for FormatError {
    fn from(e: ParseError) -> Self {
        FormatError::Syntax(e)
    }
}

fn int<T: std::str::FromStr>(tok: &str) -> Result<T, SyntaxError> {
    tok.parse().map_err(|_| SyntaxError::NotAnInteger(tok.to_string()))
}

fn fields<'a>(tokens: &'a [&'a str], directive: &'static str, expected: usize) -> Result<&'a [&'a str], SyntaxError> {
    if tokens.len() != expected + 1 {
        return Err(SyntaxError::FieldCount { directive, expected, found: tokens.len() - 1 });
    }
    Ok(&tokens[1..])
}

struct OpenEdge {
    index: usize,
    expected: usize,
}

/// Parses without checking instance invariants.
pub fn parse_unchecked(text: &str, name: &str) -> Result<Instance, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("")))
        .map(|(i, l)| (i, l.split_whitespace().collect::<Vec<_>>()))
        .filter(|(_, t)| !t.is_empty());
    let mut last_line = text.lines().count().max(1);
    let at = |line| move |error| ParseError { line, error };

    let (line, header) = lines.next().ok_or(ParseError { line: last_line, error: SyntaxError::MissingHeader })?;
    if header != ["dcmndp", "1"] {
        return Err(at(line)(SyntaxError::BadHeader));
    }
    let (line, counts) = lines.next().ok_or(ParseError { line: last_line, error: SyntaxError::MissingCounts })?;
    if counts.len() != 6 || counts[0] != "n" || counts[2] != "m" || counts[4] != "k" {
        return Err(at(line)(SyntaxError::BadCounts));
    }
    let node_count: usize = int(counts[1]).map_err(at(line))?;
    let m: usize = int(counts[3]).map_err(at(line))?;
    let k: usize = int(counts[5]).map_err(at(line))?;

    let mut edges: Vec<Edge> = Vec::new();
    let mut commodities: Vec<Commodity> = Vec::new();
    let mut open: Option<OpenEdge> = None;
    let close = |open: &mut Option<OpenEdge>, edges: &[Edge], line: usize| -> Result<(), ParseError> {
        if let Some(o) = open.take() {
            let found = edges[o.index].facilities.len();
            if found != o.expected {
                let id = edges[o.index].id;
                return Err(at(line)(SyntaxError::MissingFacilities { edge: id, expected: o.expected, found }));
            }
        }
        Ok(())
    };

    for (line, tokens) in lines {
        last_line = line;
        match tokens[0] {
            "f" => {
                let f = fields(&tokens, "f", 2).map_err(at(line))?;
                let o = open.as_ref().ok_or(at(line)(SyntaxError::StrayFacility))?;
                let edge = &mut edges[o.index];
                if edge.facilities.len() == o.expected {
                    return Err(at(line)(SyntaxError::StrayFacility));
                }
                edge.facilities.push(FacilityOption::new(
                    int(f[0]).map_err(at(line))?,
                    int(f[1]).map_err(at(line))?,
                ));
            }
            "e" => {
                close(&mut open, &edges, line)?;
                let f = fields(&tokens, "e", 4).map_err(at(line))?;
                let edge = Edge {
                    id: int(f[0]).map_err(at(line))?,
                    u: int(f[1]).map_err(at(line))?,
                    v: int(f[2]).map_err(at(line))?,
                    facilities: Vec::new(),
                };
                let expected = int(f[3]).map_err(at(line))?;
                open = Some(OpenEdge { index: edges.len(), expected });
                edges.push(edge);
            }
            "c" => {
                close(&mut open, &edges, line)?;
                let f = fields(&tokens, "c", 4).map_err(at(line))?;
                commodities.push(Commodity {
                    id: int(f[0]).map_err(at(line))?,
                    source: int(f[1]).map_err(at(line))?,
                    sink: int(f[2]).map_err(at(line))?,
                    demand: int(f[3]).map_err(at(line))?,
                });
            }
            other => return Err(at(line)(SyntaxError::UnknownDirective(other.to_string()))),
        }
    }
    close(&mut open, &edges, last_line)?;
    if edges.len() != m {
        return Err(at(last_line)(SyntaxError::CountMismatch { what: "edges", declared: m, found: edges.len() }));
    }
    if commodities.len() != k {
        return Err(at(last_line)(SyntaxError::CountMismatch {
            what: "commodities",
            declared: k,
            found: commodities.len(),
        }));
    }
    Ok(Instance { name: name.to_string(), node_count, edges, commodities })
}

/// Parses and validates.
pub fn parse_instance(text: &str, name: &str) -> Result<Instance, FormatError> {
    let inst = parse_unchecked(text, name)?;
    let violations = inst.validate();
    if violations.is_empty() {
        Ok(inst)
    } else {
        Err(FormatError::Invalid(violations))
    }
}

/// Canonical text: edges by id, facilities by capacity, commodities by id.
pub fn serialize_instance(inst: &Instance) -> String {
    let mut out = String::new();
    out.push_str("dcmndp 1\n");
    let _ = writeln!(out, "n {} m {} k {}", inst.node_count, inst.edge_count(), inst.commodity_count());
    let mut edges: Vec<&Edge> = inst.edges.iter().collect();
    edges.sort_by_key(|e| e.id);
    for e in edges {
        let _ = writeln!(out, "e {} {} {} {}", e.id, e.u, e.v, e.facilities.len());
        let mut menu = e.facilities.clone();
        menu.sort_by_key(|f| (f.capacity, f.cost));
        for f in menu {
            let _ = writeln!(out, "f {} {}", f.capacity, f.cost);
        }
    }
    let mut commodities: Vec<&Commodity> = inst.commodities.iter().collect();
    commodities.sort_by_key(|c| c.id);
    for c in commodities {
        let _ = writeln!(out, "c {} {} {} {}", c.id, c.source, c.sink, c.demand);
    }
    out
}
