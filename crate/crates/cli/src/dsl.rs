//! Line-oriented connection files.
//!
//! ```text
//! # first family with f = (x1, 2*x3, -2*x2)
//! dim 3
//! vars x1 x2 x3
//! family family-1
//! G[1,1,1] = x1; G[1,2,1] = 2*x3; G[1,3,1] = -2*x2
//! ```
//!
//! `G[i,j,k]` is `Γ^k_{ij}`, 1-based. Statements end at a newline or `;`,
//! `#` starts a comment. `func name(x1, ...)` declares an opaque function.
//! With `torsion_free true` (the default) every entry is mirrored to
//! `G[j,i,k]`; giving both halves with different values is an error.

use std::fmt::Write as _;

use szabo_core::{Chart, Connection, Expr, Family, ParseContext, Tensor};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DslError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}, column {column}: unknown variable or function `{name}`")]
    UnknownVariable { line: usize, column: usize, name: String },
    #[error("line {line}: index {index} out of range 1..={dim}")]
    IndexOutOfRange { line: usize, index: usize, dim: usize },
    #[error("line {line}: G[{i},{j},{k}] contradicts G[{j},{i},{k}] of a torsion-free connection")]
    InconsistentSymmetry { line: usize, i: usize, j: usize, k: usize },
    #[error("{0}")]
    Invalid(String),
}

pub type DslResult<T> = std::result::Result<T, DslError>;

/// A parsed connection file. Christoffel indices are 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectionSpec {
    pub dim: usize,
    pub variables: Vec<String>,
    /// Opaque functions and the variables they depend on.
    pub functions: Vec<(String, Vec<usize>)>,
    pub christoffels: Vec<(usize, usize, usize, Expr)>,
    pub declared_family: Option<Family>,
    pub torsion_free: bool,
}

impl ConnectionSpec {
    pub fn to_connection(&self) -> szabo_core::Result<Connection> {
        let chart = Chart::with_names(self.variables.clone())?;
        let mut gamma = Tensor::zeros(self.dim, 3);
        for (i, j, k, e) in &self.christoffels {
            gamma.set(&[*i, *j, *k], e.clone());
        }
        let c = Connection::new(chart, gamma)?;
        Ok(match self.declared_family {
            Some(f) => c.with_family(f),
            None => c,
        })
    }

    /// Canonical text form; parsing it gives back an equal spec.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "dim {}", self.dim);
        let _ = writeln!(out, "vars {}", self.variables.join(" "));
        for (name, args) in &self.functions {
            let names: Vec<&str> = args.iter().map(|&a| self.variables[a].as_str()).collect();
            let _ = writeln!(out, "func {name}({})", names.join(", "));
        }
        if let Some(f) = self.declared_family {
            let _ = writeln!(out, "family {f}");
        }
        let _ = writeln!(out, "torsion_free {}", self.torsion_free);
        for (i, j, k, e) in &self.christoffels {
            if self.torsion_free && i > j {
                continue;
            }
            let _ = writeln!(out, "G[{},{},{}] = {}", i + 1, j + 1, k + 1, e.to_string_with(&self.variables));
        }
        out
    }
}

struct Statement<'a> {
    line: usize,
    /// 1-based column of the statement's first character.
    column: usize,
    text: &'a str,
}

fn statements(text: &str) -> Vec<Statement<'_>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        let mut offset = 0;
        for part in body.split(';') {
            let lead = part.len() - part.trim_start().len();
            let trimmed = part.trim();
            if !trimmed.is_empty() {
                out.push(Statement {
                    line: n + 1,
                    column: offset + lead + 1,
                    text: trimmed,
                });
            }
            offset += part.len() + 1;
        }
    }
    out
}

fn syntax(st: &Statement<'_>, offset: usize, message: impl Into<String>) -> DslError {
    DslError::Syntax {
        line: st.line,
        column: st.column + offset,
        message: message.into(),
    }
}

/// Parses a connection file.
pub fn parse_connection_file(text: &str) -> DslResult<ConnectionSpec> {
    let mut dim = None;
    let mut variables: Option<Vec<String>> = None;
    let mut ctx: Option<ParseContext> = None;
    let mut functions = Vec::new();
    let mut family = None;
    let mut torsion_free = true;
    // (line, i, j, k, expr) as written.
    let mut entries: Vec<(usize, usize, usize, usize, Expr)> = Vec::new();

    for st in statements(text) {
        let (word, rest) = match st.text.find(|c: char| c.is_whitespace() || c == '[') {
            Some(p) => (&st.text[..p], st.text[p..].trim_start()),
            None => (st.text, ""),
        };
        let rest_offset = st.text.len() - rest.len();
        match word {
            "dim" => {
                if dim.is_some() {
                    return Err(syntax(&st, 0, "dimension given twice"));
                }
                let n: usize = rest
                    .parse()
                    .map_err(|_| syntax(&st, rest_offset, format!("expected a dimension, found `{rest}`")))?;
                if n == 0 {
                    return Err(syntax(&st, rest_offset, "dimension must be positive"));
                }
                dim = Some(n);
            }
            "vars" => {
                let n = dim.ok_or_else(|| syntax(&st, 0, "`vars` before `dim`"))?;
                if ctx.is_some() {
                    return Err(syntax(&st, 0, "`vars` must precede functions and symbols"));
                }
                let names: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
                if names.len() != n {
                    return Err(syntax(&st, rest_offset, format!("expected {n} variable names, found {}", names.len())));
                }
                Chart::with_names(names.clone()).map_err(|e| syntax(&st, rest_offset, e.to_string()))?;
                variables = Some(names);
            }
            "family" => {
                family = Some(
                    Family::parse(rest)
                        .ok_or_else(|| syntax(&st, rest_offset, format!("unknown family `{rest}`")))?,
                );
            }
            "torsion_free" => {
                torsion_free = match rest {
                    "true" => true,
                    "false" => false,
                    _ => return Err(syntax(&st, rest_offset, "expected `true` or `false`")),
                };
            }
            "func" => {
                let ctx = context(&mut ctx, dim, &variables, &st)?;
                let (name, args) = parse_func_decl(&st, rest, rest_offset, ctx)?;
                if ctx.function(&name).is_some() {
                    return Err(syntax(&st, rest_offset, format!("function `{name}` declared twice")));
                }
                ctx.declare(&name, &args).map_err(|e| syntax(&st, rest_offset, e.to_string()))?;
                functions.push((name, args));
            }
            "G" => {
                let ctx = context(&mut ctx, dim, &variables, &st)?;
                let n = ctx.vars().len();
                let (idx, expr_text, expr_offset) = parse_symbol_lhs(&st, rest, rest_offset)?;
                for &v in &idx {
                    if v == 0 || v > n {
                        return Err(DslError::IndexOutOfRange {
                            line: st.line,
                            index: v,
                            dim: n,
                        });
                    }
                }
                let e = ctx.parse(expr_text).map_err(|e| match e {
                    szabo_core::Error::UnknownSymbol { column, name } => DslError::UnknownVariable {
                        line: st.line,
                        column: st.column + expr_offset + column - 1,
                        name,
                    },
                    szabo_core::Error::Parse { column, message } => {
                        syntax(&st, expr_offset + column - 1, message)
                    }
                    other => syntax(&st, expr_offset, other.to_string()),
                })?;
                entries.push((st.line, idx[0] - 1, idx[1] - 1, idx[2] - 1, e));
            }
            _ => return Err(syntax(&st, 0, format!("unknown statement `{word}`"))),
        }
    }

    let dim = dim.ok_or_else(|| DslError::Invalid("missing `dim` statement".into()))?;
    let variables = variables.unwrap_or_else(|| (1..=dim).map(|i| format!("x{i}")).collect());
    let christoffels = assemble(dim, entries, torsion_free)?;
    Ok(ConnectionSpec {
        dim,
        variables,
        functions,
        christoffels,
        declared_family: family,
        torsion_free,
    })
}

fn context<'a>(
    ctx: &'a mut Option<ParseContext>,
    dim: Option<usize>,
    variables: &Option<Vec<String>>,
    st: &Statement<'_>,
) -> DslResult<&'a mut ParseContext> {
    let n = dim.ok_or_else(|| syntax(st, 0, "`dim` must come first"))?;
    Ok(ctx.get_or_insert_with(|| match variables {
        Some(v) => ParseContext::with_vars(v.clone()),
        None => ParseContext::standard(n),
    }))
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic()) && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// `name(x1, x3)`.
fn parse_func_decl(st: &Statement<'_>, rest: &str, offset: usize, ctx: &ParseContext) -> DslResult<(String, Vec<usize>)> {
    let open = rest.find('(').ok_or_else(|| syntax(st, offset, "expected `name(variables)`"))?;
    if !rest.ends_with(')') {
        return Err(syntax(st, offset + rest.len(), "expected `)`"));
    }
    let name = rest[..open].trim();
    if !is_ident(name) {
        return Err(syntax(st, offset, format!("invalid function name `{name}`")));
    }
    let mut args = Vec::new();
    let inner = &rest[open + 1..rest.len() - 1];
    let mut pos = open + 1;
    for part in inner.split(',') {
        let v = part.trim();
        let col = offset + pos + (part.len() - part.trim_start().len());
        let idx = ctx.var_index(v).ok_or_else(|| DslError::UnknownVariable {
            line: st.line,
            column: st.column + col,
            name: v.to_string(),
        })?;
        args.push(idx);
        pos += part.len() + 1;
    }
    let mut sorted = args.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != args.len() {
        return Err(syntax(st, offset + open, "repeated argument"));
    }
    // Stored in chart order so printing and parsing agree.
    Ok((name.to_string(), sorted))
}

/// `[i,j,k] = expr`; returns the indices, the expression text and its offset.
fn parse_symbol_lhs<'a>(st: &Statement<'_>, rest: &'a str, offset: usize) -> DslResult<([usize; 3], &'a str, usize)> {
    if !rest.starts_with('[') {
        return Err(syntax(st, offset, "expected `[i,j,k]` after `G`"));
    }
    let close = rest.find(']').ok_or_else(|| syntax(st, offset, "missing `]`"))?;
    let parts: Vec<&str> = rest[1..close].split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(syntax(st, offset + 1, "expected three indices"));
    }
    let mut idx = [0usize; 3];
    for (slot, p) in idx.iter_mut().zip(&parts) {
        *slot = p
            .parse()
            .map_err(|_| syntax(st, offset + 1, format!("index `{p}` is not a number")))?;
    }
    let after = &rest[close + 1..];
    let eq = after
        .find('=')
        .filter(|&p| after[..p].trim().is_empty())
        .ok_or_else(|| syntax(st, offset + close + 1, "expected `=`"))?;
    let expr = &after[eq + 1..];
    let expr_offset = offset + close + 1 + eq + 1;
    if expr.trim().is_empty() {
        return Err(syntax(st, expr_offset, "missing expression"));
    }
    Ok((idx, expr, expr_offset))
}

fn assemble(
    dim: usize,
    entries: Vec<(usize, usize, usize, usize, Expr)>,
    torsion_free: bool,
) -> DslResult<Vec<(usize, usize, usize, Expr)>> {
    // Slot value and whether it was written directly (not mirrored).
    let mut table: Vec<Option<(Expr, bool)>> = vec![None; dim * dim * dim];
    let at = |i: usize, j: usize, k: usize| (i * dim + j) * dim + k;
    for (line, i, j, k, e) in entries {
        let mut targets = vec![(i, j, true)];
        if torsion_free && i != j {
            targets.push((j, i, false));
        }
        for (a, b, direct) in targets {
            let slot = &mut table[at(a, b, k)];
            match slot {
                Some((prev, prev_direct)) if *prev != e => {
                    return Err(if direct && *prev_direct {
                        DslError::Syntax {
                            line,
                            column: 1,
                            message: format!("G[{},{},{}] given twice", i + 1, j + 1, k + 1),
                        }
                    } else {
                        DslError::InconsistentSymmetry {
                            line,
                            i: i + 1,
                            j: j + 1,
                            k: k + 1,
                        }
                    });
                }
                Some((_, prev_direct)) => *prev_direct |= direct,
                None => *slot = Some((e.clone(), direct)),
            }
        }
    }
    let mut out = Vec::new();
    for i in 0..dim {
        for j in 0..dim {
            for k in 0..dim {
                if let Some((e, _)) = &table[at(i, j, k)] {
                    if !e.is_zero() {
                        out.push((i, j, k, e.clone()));
                    }
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const LINEAR: &str = "dim 3\nG[1,1,1] = x1; G[1,2,1] = 2*x3; G[1,3,1] = -2*x2\n";

    #[test]
    fn symmetrizes_torsion_free_input() {
        let spec = parse_connection_file(LINEAR).unwrap();
        assert_eq!(spec.christoffels.len(), 5);
        let c = spec.to_connection().unwrap();
        assert_eq!(c.gamma(2, 0, 0), &Expr::var(1).scale_int(-2));
        assert!(c.is_torsion_free());
    }

    #[test]
    fn empty_symbol_list_is_flat() {
        let spec = parse_connection_file("dim 3\n").unwrap();
        assert!(spec.to_connection().unwrap().symbols().is_zero());
    }

    #[test]
    fn opaque_functions_round_trip() {
        let text = "dim 3\nfunc f(x1)\nfunc g(x3)\nG[1,1,2] = f(x1) + g(x3)\n";
        let spec = parse_connection_file(text).unwrap();
        let again = parse_connection_file(&spec.to_text()).unwrap();
        assert_eq!(spec, again);
        assert_eq!(spec.christoffels[0].3.to_string(), "f(x1) + g(x3)");
    }

    #[test]
    fn reports_errors_with_positions() {
        assert_eq!(
            parse_connection_file("dim 3\nG[1,1,1] = x1 + y\n"),
            Err(DslError::UnknownVariable {
                line: 2,
                column: 17,
                name: "y".into()
            })
        );
        assert!(matches!(
            parse_connection_file("dim 2\nG[1,3,1] = 1\n"),
            Err(DslError::IndexOutOfRange { line: 2, index: 3, dim: 2 })
        ));
        assert!(matches!(
            parse_connection_file("dim 2\nG[1,2,1] = x1\nG[2,1,1] = x2\n"),
            Err(DslError::InconsistentSymmetry { line: 3, .. })
        ));
        assert!(matches!(
            parse_connection_file("dim 2\nG[1,2,1] = x1 +\n"),
            Err(DslError::Syntax { line: 2, .. })
        ));
        assert!(matches!(parse_connection_file("G[1,1,1] = 1\n"), Err(DslError::Syntax { line: 1, .. })));
    }

    #[test]
    fn torsion_is_kept_when_not_declared_free() {
        let spec = parse_connection_file("dim 2\ntorsion_free false\nG[1,2,1] = x1\n").unwrap();
        assert_eq!(spec.christoffels.len(), 1);
        assert!(!spec.to_connection().unwrap().is_torsion_free());
        assert_eq!(parse_connection_file(&spec.to_text()).unwrap(), spec);
    }
}
