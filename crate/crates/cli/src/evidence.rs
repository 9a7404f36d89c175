//! Evidence files: one constraint per line (or per `;`), `#` comments.
//!
//! ```text
//! P(B) = 0.33                      # marginal
//! D = false                        # certain evidence
//! P(C | A, !B) = 0.9               # conditional, `!` negates a condition
//! P(A, B) = [0.1, 0.2, 0.3, 0.4]   # joint marginal over several variables
//! linear(A, C) [0, 1, 1, 2] = 0.9 & [0, 0, 1, 1] = 0.3
//! P(E) = 0.1 threshold 0.0001      # per-constraint threshold
//! ```

use rcndl_core::model::{ConstraintKind, ConstraintSet, LinearRow, Scope, VariableId};
use rcndl_core::{Error, Position, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(f64),
    Punct(char),
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    pos: Position,
}

fn syntax(pos: Position, msg: impl Into<String>) -> Error {
    Error::Syntax {
        pos,
        msg: msg.into(),
    }
}

fn lex(line: &str, line_no: usize, col0: usize) -> Result<Vec<Spanned>> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = Position {
            line: line_no,
            column: col0 + i + 1,
        };
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Spanned {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                pos,
            });
        } else if c.is_ascii_digit() || c == '.' || c == '-' || c == '+' {
            let start = i;
            i += 1;
            while i < chars.len() {
                let d = chars[i];
                let exp_sign = (d == '-' || d == '+') && matches!(chars[i - 1], 'e' | 'E');
                if d.is_ascii_digit() || d == '.' || d == 'e' || d == 'E' || exp_sign {
                    i += 1;
                } else {
                    break;
                }
            }
            let text: String = chars[start..i].iter().collect();
            let value = text
                .parse::<f64>()
                .map_err(|_| syntax(pos, format!("malformed number `{text}`")))?;
            out.push(Spanned {
                tok: Tok::Num(value),
                pos,
            });
        } else if "()|,!=[]&".contains(c) {
            out.push(Spanned {
                tok: Tok::Punct(c),
                pos,
            });
            i += 1;
        } else {
            return Err(syntax(pos, format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

struct Cursor {
    toks: Vec<Spanned>,
    at: usize,
    end: Position,
}

impl Cursor {
    fn pos(&self) -> Position {
        self.toks.get(self.at).map_or(self.end, |t| t.pos)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.tok)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.at + 1).map(|t| &t.tok)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|t| t.tok.clone());
        self.at += 1;
        t
    }

    fn punct(&mut self, c: char) -> Result<()> {
        let pos = self.pos();
        match self.next() {
            Some(Tok::Punct(p)) if p == c => Ok(()),
            other => Err(syntax(
                pos,
                format!("expected `{c}`, found {}", describe(other.as_ref())),
            )),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Punct(c)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<String> {
        let pos = self.pos();
        match self.next() {
            Some(Tok::Ident(s)) => Ok(s),
            other => Err(syntax(
                pos,
                format!("expected a variable, found {}", describe(other.as_ref())),
            )),
        }
    }

    fn number(&mut self) -> Result<f64> {
        let pos = self.pos();
        match self.next() {
            Some(Tok::Num(v)) => Ok(v),
            other => Err(syntax(
                pos,
                format!("expected a number, found {}", describe(other.as_ref())),
            )),
        }
    }

    fn list(&mut self) -> Result<Vec<f64>> {
        self.punct('[')?;
        let mut values = vec![self.number()?];
        while self.eat(',') {
            values.push(self.number()?);
        }
        self.punct(']')?;
        Ok(values)
    }

    fn done(&self) -> bool {
        self.at >= self.toks.len()
    }
}

fn describe(t: Option<&Tok>) -> String {
    match t {
        None => "end of line".into(),
        Some(Tok::Ident(s)) => format!("`{s}`"),
        Some(Tok::Num(v)) => format!("`{v}`"),
        Some(Tok::Punct(c)) => format!("`{c}`"),
    }
}

fn scope_of(names: &[String]) -> Result<Scope> {
    Scope::new(names.iter().map(VariableId::new).collect::<Result<_>>()?)
}

/// Parses an evidence file; constraints without a `threshold` suffix get
/// `default_threshold`.
pub fn parse_evidence(text: &str, default_threshold: f64) -> Result<Vec<ConstraintSet>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let mut col0 = 0;
        for stmt in line.split(';') {
            if !stmt.trim().is_empty() {
                out.push(parse_statement(stmt, idx + 1, col0, default_threshold)?);
            }
            col0 += stmt.chars().count() + 1;
        }
    }
    Ok(out)
}

fn parse_statement(
    stmt: &str,
    line: usize,
    col0: usize,
    default_threshold: f64,
) -> Result<ConstraintSet> {
    let toks = lex(stmt, line, col0)?;
    let start = toks[0].pos;
    let mut cur = Cursor {
        toks,
        at: 0,
        end: Position {
            line,
            column: col0 + stmt.chars().count() + 1,
        },
    };
    let (label, kind) = match (cur.peek(), cur.peek2()) {
        (Some(Tok::Ident(p)), Some(Tok::Punct('('))) if p == "P" => probability(&mut cur)?,
        (Some(Tok::Ident(l)), Some(Tok::Punct('('))) if l == "linear" => linear(&mut cur)?,
        (Some(Tok::Ident(_)), Some(Tok::Punct('='))) => certain(&mut cur)?,
        _ => {
            return Err(syntax(
                start,
                "expected `P(..) = ..`, `X = true|false` or `linear(..) ..`",
            ))
        }
    };
    let threshold = if cur.done() {
        default_threshold
    } else {
        let pos = cur.pos();
        match cur.next() {
            Some(Tok::Ident(k)) if k == "threshold" => cur.number()?,
            other => {
                return Err(syntax(
                    pos,
                    format!("unexpected {}", describe(other.as_ref())),
                ))
            }
        }
    };
    if !cur.done() {
        return Err(syntax(cur.pos(), "trailing input"));
    }
    ConstraintSet::new(label, kind, threshold).map_err(|e| syntax(start, e.to_string()))
}

fn probability(cur: &mut Cursor) -> Result<(String, ConstraintKind)> {
    cur.next();
    cur.punct('(')?;
    let mut vars = vec![cur.ident()?];
    while cur.eat(',') {
        vars.push(cur.ident()?);
    }
    let mut condition = Vec::new();
    if cur.eat('|') {
        loop {
            let negated = cur.eat('!');
            condition.push((cur.ident()?, !negated));
            if !cur.eat(',') {
                break;
            }
        }
    }
    cur.punct(')')?;
    cur.punct('=')?;
    let pos = cur.pos();

    if !condition.is_empty() {
        if vars.len() != 1 {
            return Err(syntax(pos, "a conditional constrains a single variable"));
        }
        let prob = cur.number()?;
        let conds: Vec<String> = condition
            .iter()
            .map(|(v, b)| if *b { v.clone() } else { format!("!{v}") })
            .collect();
        let label = format!("P({} | {})", vars[0], conds.join(", "));
        let condition = condition
            .into_iter()
            .map(|(v, b)| Ok((VariableId::new(v)?, b)))
            .collect::<Result<_>>()?;
        let kind = ConstraintKind::Conditional {
            target: VariableId::new(vars.remove(0))?,
            condition,
            prob,
        };
        return Ok((label, kind));
    }

    let label = format!("P({})", vars.join(", "));
    let scope = scope_of(&vars)?;
    let targets = match cur.peek() {
        Some(Tok::Punct('[')) => cur.list()?,
        _ if vars.len() == 1 => {
            let p = cur.number()?;
            vec![1.0 - p, p]
        }
        _ => return Err(syntax(pos, "a joint marginal needs a `[..]` list")),
    };
    Ok((label, ConstraintKind::Marginal { scope, targets }))
}

fn certain(cur: &mut Cursor) -> Result<(String, ConstraintKind)> {
    let var = cur.ident()?;
    cur.punct('=')?;
    let pos = cur.pos();
    let value = match cur.next() {
        Some(Tok::Ident(v)) if v == "true" => true,
        Some(Tok::Ident(v)) if v == "false" => false,
        other => {
            return Err(syntax(
                pos,
                format!(
                    "expected `true` or `false`, found {}",
                    describe(other.as_ref())
                ),
            ))
        }
    };
    let targets = if value {
        vec![0.0, 1.0]
    } else {
        vec![1.0, 0.0]
    };
    Ok((
        format!("P({var})"),
        ConstraintKind::Marginal {
            scope: scope_of(&[var])?,
            targets,
        },
    ))
}

fn linear(cur: &mut Cursor) -> Result<(String, ConstraintKind)> {
    cur.next();
    cur.punct('(')?;
    let mut vars = vec![cur.ident()?];
    while cur.eat(',') {
        vars.push(cur.ident()?);
    }
    cur.punct(')')?;
    let mut rows = Vec::new();
    loop {
        let coeffs = cur.list()?;
        cur.punct('=')?;
        rows.push(LinearRow {
            coeffs,
            rhs: cur.number()?,
        });
        if !cur.eat('&') {
            break;
        }
    }
    Ok((
        format!("linear({})", vars.join(", ")),
        ConstraintKind::Linear {
            scope: scope_of(&vars)?,
            rows,
        },
    ))
}
