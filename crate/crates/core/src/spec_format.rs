//! The map-spec text format.
//!
//! ```text
//! backend = exact
//! partition = [1/2]
//! branch {
//!   kind = affine
//!   slope = 1/2
//!   intercept = 1/8
//! }
//! side = right
//! branch {
//!   kind = affine
//!   slope = 1/2
//!   intercept = 3/8
//! }
//! ```
//!
//! The partition line lists interior points only. Branch blocks appear in
//! piece order; an optional `side = left|right` line between two blocks fixes
//! the lateral limit used at the breakpoint separating them (default right).
//! Values are decimal or "p/q" literals. Lines starting with `#` are ignored.

use crate::branch::Branch;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::map::{PiecewiseMap, Side};
use crate::scalar::{Backend, Scalar};
use std::fmt::Write as _;

/// Parses and validates a map-spec document.
pub fn parse_map_spec(text: &str) -> Result<PiecewiseMap> {
    let map = parse_map_spec_unvalidated(text)?;
    let report = map.validate();
    if !report.is_valid() {
        return Err(Error::InvalidMap(report.violations.join("; ")));
    }
    Ok(map)
}

/// Parses without the admissibility check (used to report violations).
pub fn parse_map_spec_unvalidated(text: &str) -> Result<PiecewiseMap> {
    Parser {
        lines: text.lines().collect(),
        line_no: 0,
    }
    .parse()
}

/// Serializes a map back to the spec format, deterministically.
pub fn serialize_map_spec(map: &PiecewiseMap) -> String {
    let mut out = String::new();
    writeln!(out, "backend = {}", map.backend()).unwrap();
    let interior = &map.partition()[1..=map.interior_count()];
    let points: Vec<String> = interior.iter().map(|p| p.to_string()).collect();
    writeln!(out, "partition = [{}]", points.join(", ")).unwrap();
    for (i, branch) in map.branches().iter().enumerate() {
        if i > 0 {
            writeln!(out, "side = {}", map.sides()[i - 1]).unwrap();
        }
        out.push_str("branch {\n");
        match branch {
            Branch::Affine { slope, intercept } => {
                writeln!(out, "  kind = affine").unwrap();
                writeln!(out, "  slope = {slope}").unwrap();
                writeln!(out, "  intercept = {intercept}").unwrap();
            }
            Branch::Poly { coeffs } => {
                writeln!(out, "  kind = poly").unwrap();
                let cs: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
                writeln!(out, "  coeffs = [{}]", cs.join(", ")).unwrap();
            }
            Branch::Expr(e) => {
                writeln!(out, "  kind = expr").unwrap();
                writeln!(out, "  expr = \"{}\"", e.source()).unwrap();
            }
        }
        out.push_str("}\n");
    }
    out
}

struct Parser<'a> {
    lines: Vec<&'a str>,
    line_no: usize,
}

struct RawBranch {
    kind: Option<String>,
    slope: Option<String>,
    intercept: Option<String>,
    coeffs: Option<String>,
    expr: Option<String>,
    line: usize,
}

impl<'a> Parser<'a> {
    fn parse(mut self) -> Result<PiecewiseMap> {
        let backend = self.parse_backend()?;
        let interior = self.parse_partition(backend)?;
        let mut branches = Vec::new();
        let mut sides: Vec<Option<Side>> = Vec::new();
        loop {
            match self.next_content_line() {
                None => break,
                Some((line_no, line)) => {
                    if let Some(rest) = line.strip_prefix("side") {
                        let value = self.expect_assignment(rest, line_no, "side")?;
                        let side = match value {
                            "left" => Side::Left,
                            "right" => Side::Right,
                            other => {
                                return Err(Error::parse(
                                    line_no,
                                    col_of(line, other),
                                    format!("expected left or right, got '{other}'"),
                                ))
                            }
                        };
                        if branches.is_empty() {
                            return Err(Error::parse(
                                line_no,
                                1,
                                "side declared before any branch block",
                            ));
                        }
                        if sides.len() >= branches.len() {
                            return Err(Error::parse(
                                line_no,
                                1,
                                "duplicate side declaration for this breakpoint",
                            ));
                        }
                        while sides.len() < branches.len() - 1 {
                            sides.push(None);
                        }
                        sides.push(Some(side));
                    } else if let Some(rest) = line.strip_prefix("branch") {
                        let after = rest.trim();
                        if after != "{" {
                            return Err(Error::parse(
                                line_no,
                                col_of(line, after.split_whitespace().next().unwrap_or("")),
                                "expected '{' after branch",
                            ));
                        }
                        let raw = self.parse_branch_block(line_no)?;
                        branches.push(self.realize_branch(raw, backend)?);
                    } else {
                        return Err(Error::parse(
                            line_no,
                            1,
                            format!("expected 'branch {{' or 'side = ...', got '{line}'"),
                        ));
                    }
                }
            }
        }
        if branches.len() != interior.len() + 1 {
            return Err(Error::parse(
                self.line_no,
                1,
                format!(
                    "{} interior partition points require {} branch blocks, found {}",
                    interior.len(),
                    interior.len() + 1,
                    branches.len()
                ),
            ));
        }
        while sides.len() < interior.len() {
            sides.push(None);
        }
        let sides: Vec<Side> = sides
            .into_iter()
            .map(|s| s.unwrap_or(Side::Right))
            .collect();
        PiecewiseMap::new(backend, interior, branches, sides)
    }

    fn next_content_line(&mut self) -> Option<(usize, &'a str)> {
        while self.line_no < self.lines.len() {
            let raw = self.lines[self.line_no];
            self.line_no += 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            return Some((self.line_no, trimmed));
        }
        None
    }

    fn expect_assignment(&self, rest: &'a str, line_no: usize, key: &str) -> Result<&'a str> {
        let rest = rest.trim_start();
        let Some(value) = rest.strip_prefix('=') else {
            return Err(Error::parse(
                line_no,
                1,
                format!("expected '=' after {key}"),
            ));
        };
        let value = value.trim();
        if value.is_empty() || value == ";" {
            return Err(Error::parse(line_no, 1, format!("missing value for {key}")));
        }
        Ok(value)
    }

    fn parse_backend(&mut self) -> Result<Backend> {
        let (line_no, line) = self
            .next_content_line()
            .ok_or_else(|| Error::parse(1, 1, "empty map spec"))?;
        let Some(rest) = line.strip_prefix("backend") else {
            return Err(Error::parse(line_no, 1, "first line must set backend"));
        };
        match self.expect_assignment(rest, line_no, "backend")? {
            "exact" => Ok(Backend::Exact),
            "float" => Ok(Backend::Float),
            other => Err(Error::parse(
                line_no,
                col_of(line, other),
                format!("unknown backend '{other}'"),
            )),
        }
    }

    fn parse_partition(&mut self, backend: Backend) -> Result<Vec<Scalar>> {
        let (line_no, line) = self
            .next_content_line()
            .ok_or_else(|| Error::parse(self.line_no, 1, "missing partition line"))?;
        let Some(rest) = line.strip_prefix("partition") else {
            return Err(Error::parse(line_no, 1, "expected partition line"));
        };
        let value = self.expect_assignment(rest, line_no, "partition")?;
        parse_scalar_list(value, backend, line_no, line)
    }

    fn parse_branch_block(&mut self, open_line: usize) -> Result<RawBranch> {
        let mut raw = RawBranch {
            kind: None,
            slope: None,
            intercept: None,
            coeffs: None,
            expr: None,
            line: open_line,
        };
        loop {
            let Some((line_no, line)) = self.next_content_line() else {
                return Err(Error::parse(open_line, 1, "unterminated branch block"));
            };
            if line == "}" {
                return Ok(raw);
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::parse(
                    line_no,
                    1,
                    format!("expected 'key = value', got '{line}'"),
                ));
            };
            let key = key.trim();
            let value = value.trim();
            if value.is_empty() || value == ";" {
                return Err(Error::parse(
                    line_no,
                    col_of(line, "=") + 1,
                    format!("missing value for {key}"),
                ));
            }
            let slot = match key {
                "kind" => &mut raw.kind,
                "slope" => &mut raw.slope,
                "intercept" => &mut raw.intercept,
                "coeffs" => &mut raw.coeffs,
                "expr" => &mut raw.expr,
                other => {
                    return Err(Error::parse(
                        line_no,
                        1,
                        format!("unknown branch field '{other}'"),
                    ))
                }
            };
            if slot.is_some() {
                return Err(Error::parse(line_no, 1, format!("duplicate field '{key}'")));
            }
            *slot = Some(value.to_string());
            raw.line = line_no;
        }
    }

    fn realize_branch(&self, raw: RawBranch, backend: Backend) -> Result<Branch> {
        let kind = raw
            .kind
            .ok_or_else(|| Error::parse(raw.line, 1, "branch block missing kind"))?;
        match kind.as_str() {
            "affine" => {
                let slope = raw
                    .slope
                    .ok_or_else(|| Error::parse(raw.line, 1, "affine branch missing slope"))?;
                let intercept = raw
                    .intercept
                    .ok_or_else(|| Error::parse(raw.line, 1, "affine branch missing intercept"))?;
                let slope = parse_scalar(&slope, backend, raw.line)?;
                let intercept = parse_scalar(&intercept, backend, raw.line)?;
                Ok(Branch::Affine { slope, intercept })
            }
            "poly" => {
                let coeffs = raw
                    .coeffs
                    .ok_or_else(|| Error::parse(raw.line, 1, "poly branch missing coeffs"))?;
                let coeffs = parse_scalar_list(&coeffs, backend, raw.line, &coeffs)?;
                Ok(Branch::Poly { coeffs })
            }
            "expr" => {
                let body = raw
                    .expr
                    .ok_or_else(|| Error::parse(raw.line, 1, "expr branch missing expr"))?;
                let body = body
                    .strip_prefix('"')
                    .and_then(|b| b.strip_suffix('"'))
                    .ok_or_else(|| Error::parse(raw.line, 1, "expr value must be double-quoted"))?;
                let expr = Expr::parse(body).map_err(|e| match e {
                    Error::Parse { col, msg, .. } => Error::parse(raw.line, col, msg),
                    other => other,
                })?;
                Ok(Branch::Expr(expr))
            }
            other => Err(Error::parse(
                raw.line,
                1,
                format!("unknown branch kind '{other}'"),
            )),
        }
    }
}

fn col_of(line: &str, token: &str) -> usize {
    if token.is_empty() {
        return 1;
    }
    line.find(token).map(|i| i + 1).unwrap_or(1)
}

fn parse_scalar(text: &str, backend: Backend, line: usize) -> Result<Scalar> {
    Scalar::parse(text, backend)
        .ok_or_else(|| Error::parse(line, 1, format!("bad numeric literal '{text}'")))
}

fn parse_scalar_list(
    value: &str,
    backend: Backend,
    line_no: usize,
    line: &str,
) -> Result<Vec<Scalar>> {
    let inner = value
        .strip_prefix('[')
        .and_then(|v| v.strip_suffix(']'))
        .ok_or_else(|| Error::parse(line_no, col_of(line, value), "expected [v, v, ...]"))?;
    let inner = inner.trim();
    if inner.is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(',')
        .map(|item| {
            let item = item.trim();
            Scalar::parse(item, backend).ok_or_else(|| {
                Error::parse(
                    line_no,
                    col_of(line, item),
                    format!("bad numeric literal '{item}'"),
                )
            })
        })
        .collect()
}
