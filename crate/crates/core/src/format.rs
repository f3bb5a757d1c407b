//! Line-oriented text formats for instances and solutions.
//!
//! ```text
//! # set-packing mode
//! p setpack <k> <universe_size> <m>
//! s <weight> <e1> ... <ej>
//!
//! # graph mode
//! p mwis <n> <m>
//! v <id> <weight>
//! e <u> <v>
//! ```
//!
//! Weights are plain decimals (`12`, `0.75`); exponent notation is rejected.
//! Lines whose first non-blank character is `#` are comments.

use thiserror::Error;

use crate::instance::{ConflictGraph, InstanceError, SetPackInstance, VertexSet, WeightedSet};

#[derive(Debug, Clone, PartialEq)]
pub enum ParsedInstance {
    SetPack(SetPackInstance),
    Graph(ConflictGraph),
}

impl ParsedInstance {
    /// The conflict graph, building it for set-packing inputs.
    pub fn to_graph(&self) -> ConflictGraph {
        match self {
            ParsedInstance::SetPack(inst) => inst.conflict_graph(),
            ParsedInstance::Graph(g) => g.clone(),
        }
    }

    pub fn k(&self) -> usize {
        match self {
            ParsedInstance::SetPack(inst) => inst.k(),
            ParsedInstance::Graph(g) => g.k(),
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            ParsedInstance::SetPack(inst) => inst.to_text(),
            ParsedInstance::Graph(g) => g.to_text(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("missing header line")]
    MissingHeader,
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("unknown line tag `{0}`")]
    UnknownTag(String),
    #[error("expected {expected} `{tag}` lines, found more")]
    TooManyLines { tag: char, expected: usize },
    #[error("expected {expected} `{tag}` lines, found {found}")]
    TooFewLines {
        tag: char,
        expected: usize,
        found: usize,
    },
    #[error("`{tag}` line out of order")]
    OutOfOrder { tag: char },
    #[error("malformed weight `{0}`")]
    MalformedWeight(String),
    #[error("negative weight `{0}`")]
    NegativeWeight(String),
    #[error("malformed integer `{0}`")]
    MalformedInteger(String),
    #[error("wrong number of fields")]
    FieldCount,
    #[error("set has {size} elements but k = {k}")]
    SetTooLarge { size: usize, k: usize },
    #[error("set has no elements")]
    EmptySet,
    #[error("element {element} is outside the universe [0, {universe_size})")]
    ElementOutOfRange { element: u64, universe_size: usize },
    #[error("element {0} appears twice in one set")]
    DuplicateElement(u64),
    #[error("vertex id {found} where {expected} was expected")]
    VertexOrder { expected: usize, found: usize },
    #[error("edge ({u}, {v}) needs u < v < n = {n}")]
    BadEdge { u: usize, v: usize, n: usize },
    #[error("edge ({0}, {1}) listed twice")]
    DuplicateEdge(usize, usize),
    #[error("k must be positive")]
    ZeroK,
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    /// 1-based; 0 when the problem is the end of input.
    pub line: usize,
    pub kind: ParseErrorKind,
}

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

/// Parses a non-negative decimal literal: digits with an optional fraction.
pub fn parse_weight(token: &str) -> Result<f64, ParseErrorKind> {
    let (negative, body) = match token.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, token),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (body, None),
    };
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    if !digits(int_part) || frac_part.is_some_and(|f| !digits(f)) {
        return Err(ParseErrorKind::MalformedWeight(token.to_string()));
    }
    let value: f64 = body
        .parse()
        .map_err(|_| ParseErrorKind::MalformedWeight(token.to_string()))?;
    if negative && value != 0.0 {
        return Err(ParseErrorKind::NegativeWeight(token.to_string()));
    }
    Ok(value)
}

fn parse_uint(token: &str) -> Result<u64, ParseErrorKind> {
    if token.is_empty() || !token.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseErrorKind::MalformedInteger(token.to_string()));
    }
    token
        .parse()
        .map_err(|_| ParseErrorKind::MalformedInteger(token.to_string()))
}

fn parse_usize(token: &str) -> Result<usize, ParseErrorKind> {
    let v = parse_uint(token)?;
    usize::try_from(v).map_err(|_| ParseErrorKind::MalformedInteger(token.to_string()))
}

/// Non-comment, non-blank lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            None
        } else {
            Some((i + 1, line.split_whitespace().collect()))
        }
    })
}

pub fn parse_instance(text: &str) -> Result<ParsedInstance, ParseError> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or(err(0, ParseErrorKind::MissingHeader))?;
    if header.first() != Some(&"p") {
        return Err(err(
            hline,
            ParseErrorKind::MalformedHeader(header.join(" ")),
        ));
    }
    let at = |kind| err(hline, kind);
    match header.get(1).copied() {
        Some("setpack") if header.len() == 5 => {
            let k = parse_usize(header[2]).map_err(at)?;
            let universe = parse_usize(header[3]).map_err(at)?;
            let m = parse_usize(header[4]).map_err(at)?;
            if k == 0 {
                return Err(at(ParseErrorKind::ZeroK));
            }
            parse_setpack_body(lines, k, universe, m).map(ParsedInstance::SetPack)
        }
        Some("mwis") if header.len() == 4 => {
            let n = parse_usize(header[2]).map_err(at)?;
            let m = parse_usize(header[3]).map_err(at)?;
            parse_graph_body(lines, n, m).map(ParsedInstance::Graph)
        }
        _ => Err(at(ParseErrorKind::MalformedHeader(header.join(" ")))),
    }
}

fn parse_setpack_body<'a>(
    lines: impl Iterator<Item = (usize, Vec<&'a str>)>,
    k: usize,
    universe_size: usize,
    m: usize,
) -> Result<SetPackInstance, ParseError> {
    let mut sets = Vec::with_capacity(m);
    for (line, tokens) in lines {
        let at = |kind| err(line, kind);
        match tokens[0] {
            "s" => {}
            tag => return Err(at(ParseErrorKind::UnknownTag(tag.to_string()))),
        }
        if sets.len() == m {
            return Err(at(ParseErrorKind::TooManyLines { tag: 's', expected: m }));
        }
        if tokens.len() < 2 {
            return Err(at(ParseErrorKind::FieldCount));
        }
        let weight = parse_weight(tokens[1]).map_err(at)?;
        let elements = &tokens[2..];
        if elements.is_empty() {
            return Err(at(ParseErrorKind::EmptySet));
        }
        if elements.len() > k {
            return Err(at(ParseErrorKind::SetTooLarge {
                size: elements.len(),
                k,
            }));
        }
        let mut ids = Vec::with_capacity(elements.len());
        for tok in elements {
            let e = parse_uint(tok).map_err(at)?;
            if e >= universe_size as u64 {
                return Err(at(ParseErrorKind::ElementOutOfRange {
                    element: e,
                    universe_size,
                }));
            }
            if ids.contains(&(e as u32)) {
                return Err(at(ParseErrorKind::DuplicateElement(e)));
            }
            ids.push(e as u32);
        }
        sets.push(WeightedSet {
            weight,
            elements: ids,
        });
    }
    if sets.len() < m {
        return Err(err(
            0,
            ParseErrorKind::TooFewLines {
                tag: 's',
                expected: m,
                found: sets.len(),
            },
        ));
    }
    SetPackInstance::new(k, universe_size, sets).map_err(|e| err(0, e.into()))
}

fn parse_graph_body<'a>(
    lines: impl Iterator<Item = (usize, Vec<&'a str>)>,
    n: usize,
    m: usize,
) -> Result<ConflictGraph, ParseError> {
    let mut weights = Vec::with_capacity(n);
    let mut edges = Vec::with_capacity(m);
    let mut seen = std::collections::HashSet::with_capacity(m);
    for (line, tokens) in lines {
        let at = |kind| err(line, kind);
        match tokens[0] {
            "v" => {
                if !edges.is_empty() {
                    return Err(at(ParseErrorKind::OutOfOrder { tag: 'v' }));
                }
                if weights.len() == n {
                    return Err(at(ParseErrorKind::TooManyLines { tag: 'v', expected: n }));
                }
                if tokens.len() != 3 {
                    return Err(at(ParseErrorKind::FieldCount));
                }
                let id = parse_usize(tokens[1]).map_err(at)?;
                if id != weights.len() {
                    return Err(at(ParseErrorKind::VertexOrder {
                        expected: weights.len(),
                        found: id,
                    }));
                }
                weights.push(parse_weight(tokens[2]).map_err(at)?);
            }
            "e" => {
                if weights.len() < n {
                    return Err(at(ParseErrorKind::OutOfOrder { tag: 'e' }));
                }
                if edges.len() == m {
                    return Err(at(ParseErrorKind::TooManyLines { tag: 'e', expected: m }));
                }
                if tokens.len() != 3 {
                    return Err(at(ParseErrorKind::FieldCount));
                }
                let u = parse_usize(tokens[1]).map_err(at)?;
                let v = parse_usize(tokens[2]).map_err(at)?;
                if !(u < v && v < n) {
                    return Err(at(ParseErrorKind::BadEdge { u, v, n }));
                }
                if !seen.insert((u, v)) {
                    return Err(at(ParseErrorKind::DuplicateEdge(u, v)));
                }
                edges.push((u, v));
            }
            tag => return Err(at(ParseErrorKind::UnknownTag(tag.to_string()))),
        }
    }
    if weights.len() < n {
        return Err(err(
            0,
            ParseErrorKind::TooFewLines {
                tag: 'v',
                expected: n,
                found: weights.len(),
            },
        ));
    }
    if edges.len() < m {
        return Err(err(
            0,
            ParseErrorKind::TooFewLines {
                tag: 'e',
                expected: m,
                found: edges.len(),
            },
        ));
    }
    // the header carries no claw parameter; the maximum degree is a safe claim
    let k = graph_k_claim(n, &edges);
    ConflictGraph::new(k, weights, edges).map_err(|e| err(0, e.into()))
}

/// Graph-mode headers carry no `k`. A vertex of degree d has at most d
/// independent neighbors, so the maximum degree (at least 1) is a valid claim.
fn graph_k_claim(n: usize, edges: &[(usize, usize)]) -> usize {
    let mut degree = vec![0usize; n];
    for &(u, v) in edges {
        degree[u] += 1;
        degree[v] += 1;
    }
    degree.into_iter().max().unwrap_or(0).max(1)
}

/// Solution files: whitespace-separated vertex ids, `#` comment lines.
pub fn parse_solution(text: &str) -> Result<VertexSet, ParseError> {
    let mut out = VertexSet::new();
    for (line, tokens) in content_lines(text) {
        for tok in tokens {
            out.insert(parse_usize(tok).map_err(|kind| err(line, kind))?);
        }
    }
    Ok(out)
}
