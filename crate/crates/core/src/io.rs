//! METIS, DIMACS and edge-list readers and canonical writers.
//!
//! Internally vertices are `0..n`. METIS and DIMACS are 1-based on disk;
//! edge lists are 0- or 1-based depending on their smallest label.

use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::graph::{Graph, NormalizeStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Format {
    Metis,
    Dimacs,
    EdgeList,
    Auto,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "metis" | "graph" => Ok(Format::Metis),
            "dimacs" | "col" => Ok(Format::Dimacs),
            "edges" | "edge_list" | "edgelist" => Ok(Format::EdgeList),
            "auto" => Ok(Format::Auto),
            other => Err(format!("unknown graph format `{other}`")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: malformed header: {reason}")]
    Header { line: usize, reason: String },
    #[error("line {line}: vertex {index} out of range 1..={n}")]
    OutOfRange { line: usize, index: i64, n: usize },
    #[error("line {line}: expected an integer, found `{token}`")]
    NotNumeric { line: usize, token: String },
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("input is not valid in any supported format")]
    Unrecognized,
}

/// A parsed graph plus what normalization discarded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parsed {
    pub graph: Graph,
    /// Label of internal vertex 0 in the file (1 for METIS/DIMACS).
    pub base: usize,
    pub format: Format,
    pub stats: NormalizeStats,
}

impl Parsed {
    pub fn label(&self, v: usize) -> usize {
        v + self.base
    }

    /// Inverse of [`Parsed::label`]; `None` if the label names no vertex.
    pub fn vertex(&self, label: usize) -> Option<usize> {
        label
            .checked_sub(self.base)
            .filter(|&v| v < self.graph.n())
    }
}

pub fn parse(text: &str, format: Format) -> Result<Parsed, ParseError> {
    match format {
        Format::Metis => parse_metis(text, false),
        Format::Dimacs => parse_dimacs(text),
        Format::EdgeList => parse_edge_list(text),
        Format::Auto => parse_auto(text),
    }
}

fn parse_auto(text: &str) -> Result<Parsed, ParseError> {
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('%') && !l.starts_with('#') && !l.starts_with('c'));
    if let Some(l) = first {
        if l.starts_with('p') {
            return parse_dimacs(text);
        }
    }
    if let Ok(p) = parse_metis(text, true) {
        return Ok(p);
    }
    parse_edge_list(text).map_err(|_| ParseError::Unrecognized)
}

fn int(token: &str, line: usize) -> Result<i64, ParseError> {
    token.parse().map_err(|_| ParseError::NotNumeric {
        line,
        token: token.to_string(),
    })
}

fn one_based(token: &str, line: usize, n: usize) -> Result<usize, ParseError> {
    let i = int(token, line)?;
    if i < 1 || i as u64 > n as u64 {
        return Err(ParseError::OutOfRange { line, index: i, n });
    }
    Ok(i as usize - 1)
}

/// `strict` additionally requires the header edge count to match, which
/// is how auto-detection tells METIS apart from an edge list.
fn parse_metis(text: &str, strict: bool) -> Result<Parsed, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.starts_with('%'));
    let (hline, header) = lines
        .by_ref()
        .find(|(_, l)| !l.is_empty())
        .ok_or(ParseError::Header {
            line: 1,
            reason: "missing header".into(),
        })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if !(2..=4).contains(&fields.len()) {
        return Err(ParseError::Header {
            line: hline,
            reason: format!("expected `n m [fmt [ncon]]`, found {} fields", fields.len()),
        });
    }
    let n = int(fields[0], hline)?;
    let m = int(fields[1], hline)?;
    if n < 0 || m < 0 {
        return Err(ParseError::Header {
            line: hline,
            reason: "negative size".into(),
        });
    }
    let n = n as usize;
    let fmt = fields.get(2).copied().unwrap_or("0");
    if fmt.len() > 3 || !fmt.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(ParseError::Header {
            line: hline,
            reason: format!("bad fmt `{fmt}`"),
        });
    }
    let fmt = format!("{fmt:0>3}");
    let has_size = fmt.as_bytes()[0] == b'1';
    let has_vwgt = fmt.as_bytes()[1] == b'1';
    let has_ewgt = fmt.as_bytes()[2] == b'1';
    let ncon = match fields.get(3) {
        Some(tok) => int(tok, hline)?.max(0) as usize,
        None => usize::from(has_vwgt),
    };

    let mut edges = Vec::new();
    let mut v = 0;
    for (ln, l) in lines {
        if v == n {
            if l.is_empty() {
                continue;
            }
            return Err(ParseError::Malformed {
                line: ln,
                reason: format!("more than {n} vertex lines"),
            });
        }
        let mut tokens = l.split_whitespace();
        for _ in 0..usize::from(has_size) + if has_vwgt { ncon } else { 0 } {
            match tokens.next() {
                Some(t) => {
                    int(t, ln)?;
                }
                None => {
                    return Err(ParseError::Malformed {
                        line: ln,
                        reason: "missing vertex size or weight".into(),
                    })
                }
            }
        }
        while let Some(t) = tokens.next() {
            let w = one_based(t, ln, n)?;
            if has_ewgt {
                let wt = tokens.next().ok_or(ParseError::Malformed {
                    line: ln,
                    reason: "missing edge weight".into(),
                })?;
                int(wt, ln)?;
            }
            edges.push((v, w));
        }
        v += 1;
    }
    if strict && v < n {
        return Err(ParseError::Malformed {
            line: hline,
            reason: format!("expected {n} vertex lines, found {v}"),
        });
    }
    // every edge is listed from both ends, so count directed duplicates
    let mut directed = edges.clone();
    directed.sort_unstable();
    let arcs = directed.len();
    directed.dedup();
    let duplicate_arcs = arcs - directed.len();
    let (graph, mut stats) = Graph::from_edges(n, directed).expect("indices checked");
    stats.duplicate_edges = duplicate_arcs;
    if strict && graph.m() != m as usize {
        return Err(ParseError::Header {
            line: hline,
            reason: format!("header says {m} edges, adjacency has {}", graph.m()),
        });
    }
    Ok(Parsed {
        graph,
        base: 1,
        format: Format::Metis,
        stats,
    })
}

fn parse_dimacs(text: &str) -> Result<Parsed, ParseError> {
    let mut n = None;
    let mut edges = Vec::new();
    for (i, l) in text.lines().enumerate() {
        let ln = i + 1;
        let l = l.trim();
        if l.is_empty() || l.starts_with('c') || l.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = l.split_whitespace().collect();
        match fields[0] {
            "p" => {
                if n.is_some() {
                    return Err(ParseError::Header {
                        line: ln,
                        reason: "duplicate problem line".into(),
                    });
                }
                if fields.len() != 4 || !matches!(fields[1], "edge" | "edges" | "col") {
                    return Err(ParseError::Header {
                        line: ln,
                        reason: "expected `p edge n m`".into(),
                    });
                }
                let nv = int(fields[2], ln)?;
                int(fields[3], ln)?;
                if nv < 0 {
                    return Err(ParseError::Header {
                        line: ln,
                        reason: "negative vertex count".into(),
                    });
                }
                n = Some(nv as usize);
            }
            "e" => {
                let nv = n.ok_or(ParseError::Header {
                    line: ln,
                    reason: "edge before problem line".into(),
                })?;
                if fields.len() < 3 {
                    return Err(ParseError::Malformed {
                        line: ln,
                        reason: "expected `e u v`".into(),
                    });
                }
                edges.push((one_based(fields[1], ln, nv)?, one_based(fields[2], ln, nv)?));
            }
            other => {
                return Err(ParseError::Malformed {
                    line: ln,
                    reason: format!("unknown line type `{other}`"),
                })
            }
        }
    }
    let n = n.ok_or(ParseError::Header {
        line: 1,
        reason: "missing `p edge` line".into(),
    })?;
    let (graph, stats) = Graph::from_edges(n, edges).expect("indices checked");
    Ok(Parsed {
        graph,
        base: 1,
        format: Format::Dimacs,
        stats,
    })
}

fn parse_edge_list(text: &str) -> Result<Parsed, ParseError> {
    let mut raw = Vec::new();
    for (i, l) in text.lines().enumerate() {
        let ln = i + 1;
        let l = l.trim();
        if l.is_empty() || l.starts_with('#') || l.starts_with('%') {
            continue;
        }
        let mut tokens = l.split_whitespace();
        let (a, b) = match (tokens.next(), tokens.next()) {
            (Some(a), Some(b)) => (int(a, ln)?, int(b, ln)?),
            _ => {
                return Err(ParseError::Malformed {
                    line: ln,
                    reason: "expected two vertex labels".into(),
                })
            }
        };
        for x in [a, b] {
            if x < 0 {
                return Err(ParseError::OutOfRange {
                    line: ln,
                    index: x,
                    n: 0,
                });
            }
        }
        raw.push((a as usize, b as usize));
    }
    let base = match raw.iter().map(|&(a, b)| a.min(b)).min() {
        Some(0) | None => 0,
        Some(_) => 1,
    };
    let n = raw
        .iter()
        .map(|&(a, b)| a.max(b) + 1 - base)
        .max()
        .unwrap_or(0);
    let (graph, stats) =
        Graph::from_edges(n, raw.into_iter().map(|(a, b)| (a - base, b - base))).expect("n covers labels");
    Ok(Parsed {
        graph,
        base,
        format: Format::EdgeList,
        stats,
    })
}

/// Canonical text for `g`. `Format::Auto` writes METIS.
pub fn emit(g: &Graph, format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Metis | Format::Auto => {
            writeln!(out, "{} {}", g.n(), g.m()).unwrap();
            for v in 0..g.n() {
                let line: Vec<String> = g.neighbors(v).iter().map(|w| (w + 1).to_string()).collect();
                writeln!(out, "{}", line.join(" ")).unwrap();
            }
        }
        Format::Dimacs => {
            writeln!(out, "p edge {} {}", g.n(), g.m()).unwrap();
            for (u, v) in g.edges() {
                writeln!(out, "e {} {}", u + 1, v + 1).unwrap();
            }
        }
        Format::EdgeList => {
            for (u, v) in g.edges() {
                writeln!(out, "{u} {v}").unwrap();
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families::*;
    use proptest::prelude::*;

    #[test]
    fn metis_path() {
        let p = parse("3 2\n2\n1 3\n2\n", Format::Metis).unwrap();
        assert_eq!(p.graph, path(3));
        assert_eq!(p.graph.m(), 2);
    }

    #[test]
    fn metis_comments_weights_and_isolated() {
        let text = "% comment\n4 1 1\n2 7\n1 7\n\n\n";
        let p = parse(text, Format::Metis).unwrap();
        assert_eq!(p.graph.n(), 4);
        assert_eq!(p.graph.m(), 1);
        assert_eq!(p.graph.non_isolated_count(), 2);
    }

    #[test]
    fn dimacs_triangle() {
        let p = parse("c hi\np edge 3 3\ne 1 2\ne 2 3\ne 1 3\n", Format::Dimacs).unwrap();
        assert_eq!(p.graph, complete(3));
    }

    #[test]
    fn edge_list_normalization() {
        let p = parse("0 1\n0 1\n1 1\n", Format::EdgeList).unwrap();
        assert_eq!(p.graph.n(), 2);
        assert_eq!(p.graph.m(), 1);
        assert_eq!(p.stats.duplicate_edges, 1);
        assert_eq!(p.stats.self_loops, 1);
        assert_eq!(p.base, 0);
    }

    #[test]
    fn edge_list_one_based() {
        let p = parse("# x\n1 2\n2 3\n", Format::EdgeList).unwrap();
        assert_eq!(p.base, 1);
        assert_eq!(p.graph, path(3));
        assert_eq!(p.label(0), 1);
        assert_eq!(p.vertex(3), Some(2));
        assert_eq!(p.vertex(0), None);
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert!(matches!(
            parse("p edge 3 1\ne 1 4\n", Format::Dimacs),
            Err(ParseError::OutOfRange { line: 2, index: 4, .. })
        ));
        assert!(matches!(
            parse("3 2\n2\n1 x\n2\n", Format::Metis),
            Err(ParseError::NotNumeric { line: 3, .. })
        ));
        assert!(matches!(
            parse("p foo 3\n", Format::Dimacs),
            Err(ParseError::Header { line: 1, .. })
        ));
        assert!(matches!(
            parse("x y z w v\n", Format::Metis),
            Err(ParseError::Header { line: 1, .. })
        ));
        assert!(matches!(
            parse("0 1\n2\n", Format::EdgeList),
            Err(ParseError::Malformed { line: 2, .. })
        ));
    }

    #[test]
    fn auto_detection() {
        assert_eq!(parse("p edge 3 3\ne 1 2\ne 2 3\ne 1 3\n", Format::Auto).unwrap().format, Format::Dimacs);
        assert_eq!(parse("3 2\n2\n1 3\n2\n", Format::Auto).unwrap().format, Format::Metis);
        let p = parse("0 1\n0 1\n1 1\n", Format::Auto).unwrap();
        assert_eq!(p.format, Format::EdgeList);
        assert_eq!(p.graph.m(), 1);
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (1usize..=12).prop_flat_map(|n| {
            proptest::collection::vec((0..n, 0..n), 0..=2 * n)
                .prop_map(move |e| Graph::from_edges(n, e).unwrap().0)
        })
    }

    proptest! {
        #[test]
        fn round_trip(g in arb_graph()) {
            for f in [Format::Metis, Format::Dimacs] {
                prop_assert_eq!(&parse(&emit(&g, f), f).unwrap().graph, &g);
                prop_assert_eq!(&parse(&emit(&g, f), Format::Auto).unwrap().graph, &g);
            }
            // edge lists carry no vertex count, so isolated vertices are lost
            let p = parse(&emit(&g, Format::EdgeList), Format::EdgeList).unwrap();
            prop_assert_eq!(p.graph.m(), g.m());
            if g.non_isolated_count() == g.n() {
                prop_assert_eq!(&p.graph, &g);
            }
        }
    }
}
