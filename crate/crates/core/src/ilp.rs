//! Integer program for maximum t-hereditary 2-clubs in LP file format.
//!
//! One binary `x{v}` per vertex, maximize their sum, and for every
//! nonadjacent pair `{u, w}`:
//! `(t+1) x_u + (t+1) x_w - sum of x_v over common neighbors v <= t+1`.
//! Choosing both endpoints then forces at least `t+1` common neighbors.

use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::Graph;

/// Largest graph [`evaluate_small`] accepts.
pub const EVALUATE_MAX_N: usize = 16;

const TERMS_PER_LINE: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IlpError {
    #[error("exhaustive evaluation is limited to {EVALUATE_MAX_N} variables, got {0}")]
    TooLarge(usize),
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
}

/// `sum coef * x{var} <= rhs`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(i64, usize)>,
    pub rhs: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IlpModel {
    pub variables: usize,
    pub constraints: Vec<Constraint>,
}

impl IlpModel {
    pub fn hereditary(g: &Graph, t: u32) -> Self {
        let c = i64::from(t) + 1;
        let mut constraints = Vec::new();
        for u in 0..g.n() {
            for w in u + 1..g.n() {
                if g.has_edge(u, w) {
                    continue;
                }
                let mut terms = vec![(c, u), (c, w)];
                terms.extend(common(g, u, w).map(|v| (-1, v)));
                constraints.push(Constraint {
                    name: format!("c{}", constraints.len()),
                    terms,
                    rhs: c,
                });
            }
        }
        IlpModel {
            variables: g.n(),
            constraints,
        }
    }

    pub fn to_lp(&self) -> String {
        let mut out = String::from("Maximize\n obj:");
        let obj: Vec<(i64, usize)> = (0..self.variables).map(|v| (1, v)).collect();
        write_terms(&mut out, &obj);
        out.push_str("\nSubject To\n");
        for c in &self.constraints {
            let _ = write!(out, " {}:", c.name);
            write_terms(&mut out, &c.terms);
            let _ = writeln!(out, " <= {}", c.rhs);
        }
        out.push_str("Binary\n");
        for chunk in (0..self.variables).collect::<Vec<_>>().chunks(TERMS_PER_LINE) {
            let names: Vec<String> = chunk.iter().map(|v| format!("x{v}")).collect();
            let _ = writeln!(out, " {}", names.join(" "));
        }
        out.push_str("End\n");
        out
    }

    /// Reads back the subset of the LP format written by [`IlpModel::to_lp`].
    pub fn parse_lp(text: &str) -> Result<Self, IlpError> {
        #[derive(PartialEq)]
        enum Section {
            None,
            Objective,
            Constraints,
            Binary,
            End,
        }
        let mut section = Section::None;
        let mut variables = 0usize;
        let mut constraints: Vec<Constraint> = Vec::new();
        // tokens of the constraint being read and the line it started on
        let mut pending: Option<(usize, String, Vec<String>)> = None;

        let finish = |p: Option<(usize, String, Vec<String>)>, out: &mut Vec<Constraint>| -> Result<(), IlpError> {
            if let Some((line, name, tokens)) = p {
                out.push(parse_constraint(line, name, &tokens)?);
            }
            Ok(())
        };

        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let s = raw.trim();
            if s.is_empty() || s.starts_with('\\') {
                continue;
            }
            let header = match s.to_ascii_lowercase().as_str() {
                "maximize" => Some(Section::Objective),
                "subject to" => Some(Section::Constraints),
                "binary" => Some(Section::Binary),
                "end" => Some(Section::End),
                _ => None,
            };
            if let Some(h) = header {
                finish(pending.take(), &mut constraints)?;
                section = h;
                continue;
            }
            let mut tokens: Vec<String> = s.split_whitespace().map(str::to_owned).collect();
            match section {
                Section::Objective => {}
                Section::Constraints => {
                    if let Some(name) = tokens.first().and_then(|t| t.strip_suffix(':')) {
                        let name = name.to_owned();
                        tokens.remove(0);
                        finish(pending.take(), &mut constraints)?;
                        pending = Some((line, name, tokens));
                    } else if let Some((_, _, acc)) = pending.as_mut() {
                        acc.extend(tokens);
                    } else {
                        return Err(syntax(line, "expression without a constraint name"));
                    }
                }
                Section::Binary => {
                    for tok in tokens {
                        variables = variables.max(variable(line, &tok)? + 1);
                    }
                }
                Section::None | Section::End => return Err(syntax(line, "text outside a section")),
            }
        }
        if section != Section::End {
            return Err(syntax(text.lines().count(), "missing End"));
        }
        if let Some(v) = constraints.iter().flat_map(|c| c.terms.iter().map(|t| t.1)).find(|&v| v >= variables) {
            return Err(syntax(0, &format!("x{v} is not declared binary")));
        }
        Ok(IlpModel { variables, constraints })
    }

    /// Optimum by trying every 0/1 assignment.
    pub fn evaluate(&self) -> Result<usize, IlpError> {
        if self.variables > EVALUATE_MAX_N {
            return Err(IlpError::TooLarge(self.variables));
        }
        let mut best = 0;
        for x in 0u32..1 << self.variables {
            let size = x.count_ones() as usize;
            if size <= best {
                continue;
            }
            let feasible = self.constraints.iter().all(|c| {
                let lhs: i64 = c.terms.iter().map(|&(a, v)| if x >> v & 1 == 1 { a } else { 0 }).sum();
                lhs <= c.rhs
            });
            if feasible {
                best = size;
            }
        }
        Ok(best)
    }
}

fn common(g: &Graph, u: usize, w: usize) -> impl Iterator<Item = usize> + '_ {
    g.neighbors(u).iter().copied().filter(move |&v| g.has_edge(v, w))
}

fn write_terms(out: &mut String, terms: &[(i64, usize)]) {
    for (i, &(a, v)) in terms.iter().enumerate() {
        if i > 0 && i % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let sign = if a < 0 { '-' } else { '+' };
        if i > 0 || a < 0 {
            out.push(' ');
            out.push(sign);
        }
        match a.abs() {
            1 => {
                let _ = write!(out, " x{v}");
            }
            m => {
                let _ = write!(out, " {m} x{v}");
            }
        }
    }
}

fn syntax(line: usize, reason: &str) -> IlpError {
    IlpError::Syntax {
        line,
        reason: reason.to_owned(),
    }
}

fn variable(line: usize, tok: &str) -> Result<usize, IlpError> {
    tok.strip_prefix('x')
        .and_then(|d| d.parse().ok())
        .ok_or_else(|| syntax(line, &format!("bad variable `{tok}`")))
}

fn parse_constraint(line: usize, name: String, tokens: &[String]) -> Result<Constraint, IlpError> {
    let le = tokens
        .iter()
        .position(|t| t == "<=")
        .ok_or_else(|| syntax(line, "expected `<=`"))?;
    let rhs = match &tokens[le + 1..] {
        [r] => r.parse().map_err(|_| syntax(line, "bad right-hand side"))?,
        _ => return Err(syntax(line, "expected one right-hand side")),
    };
    let mut terms = Vec::new();
    let mut sign = 1i64;
    let mut coef: Option<i64> = None;
    for tok in &tokens[..le] {
        match tok.as_str() {
            "+" => sign = 1,
            "-" => sign = -1,
            t if t.starts_with('x') => {
                terms.push((sign * coef.take().unwrap_or(1), variable(line, t)?));
                sign = 1;
            }
            t => coef = Some(t.parse().map_err(|_| syntax(line, &format!("bad token `{t}`")))?),
        }
    }
    Ok(Constraint { name, terms, rhs })
}

/// The hereditary program for `g` in LP format; byte-identical for equal
/// inputs.
pub fn emit_hereditary_lp(g: &Graph, t: u32) -> String {
    IlpModel::hereditary(g, t).to_lp()
}

/// Exact optimum of the emitted program, obtained by parsing the LP text
/// back and enumerating assignments.
pub fn evaluate_small(g: &Graph, t: u32) -> Result<usize, IlpError> {
    if g.n() > EVALUATE_MAX_N {
        return Err(IlpError::TooLarge(g.n()));
    }
    IlpModel::parse_lp(&emit_hereditary_lp(g, t))?.evaluate()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families::*;

    #[test]
    fn p3_text() {
        // u - w - v as 0 - 1 - 2
        let lp = emit_hereditary_lp(&path(3), 1);
        assert_eq!(
            lp,
            "Maximize\n obj: x0 + x1 + x2\nSubject To\n c0: 2 x0 + 2 x2 - x1 <= 2\nBinary\n x0 x1 x2\nEnd\n"
        );
        assert!(emit_hereditary_lp(&path(3), 0).contains(" c0: x0 + x2 - x1 <= 1\n"));
    }

    #[test]
    fn examples() {
        assert_eq!(IlpModel::hereditary(&complete(3), 4).constraints.len(), 0);
        assert_eq!(evaluate_small(&complete(3), 5).unwrap(), 3);
        assert_eq!(evaluate_small(&path(3), 0).unwrap(), 3);
        assert_eq!(evaluate_small(&path(3), 1).unwrap(), 2);
        assert_eq!(evaluate_small(&cycle(5), 1).unwrap(), 2);
        assert_eq!(evaluate_small(&cycle(4), 1).unwrap(), 4);
        assert!(evaluate_small(&Graph::empty(17), 1).is_err());
    }

    #[test]
    fn round_trip_with_wrapped_lines() {
        let g = star(30);
        let m = IlpModel::hereditary(&g, 2);
        let text = m.to_lp();
        assert!(text.lines().all(|l| l.len() < 255));
        assert_eq!(IlpModel::parse_lp(&text).unwrap(), m);
        assert_eq!(m.constraints.len(), 30 * 29 / 2);
    }

    #[test]
    fn rejects_malformed() {
        assert!(IlpModel::parse_lp("Maximize\n obj: x0\nSubject To\n c0: x0 x1\nBinary\n x0 x1\nEnd\n").is_err());
        assert!(IlpModel::parse_lp("Maximize\n obj: x0\nBinary\n x0\n").is_err());
        assert!(IlpModel::parse_lp("Maximize\nSubject To\n c0: x3 <= 1\nBinary\n x0\nEnd\n").is_err());
    }
}
