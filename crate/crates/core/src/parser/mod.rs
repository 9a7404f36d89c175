//! RCNDL source text to clause list, and back.
//!
//! ```text
//! program  ::= { clause }
//! clause   ::= "?-" clique { ";" clique } "."
//!            | props "->" ident ":" prlist "."
//!            | props "."
//! clique   ::= props ":" prlist
//! props    ::= ident { "," ident }
//! prlist   ::= "[" number { "," number } "]"
//! ```
//!
//! `%` starts a comment that runs to the end of the line. A probability of
//! `-1.0` marks an unknown entry.

mod lexer;
mod render;

use serde::Serialize;

pub use render::render_program;

use crate::error::{Error, Position, Result};
use crate::model::{Clause, CliquePrior, Pr, Scope, VariableId};
use lexer::{syntax, tokenize, Spanned, Token};

#[derive(Debug, Clone, Serialize)]
pub struct SourceClause {
    pub clause: Clause,
    pub pos: Position,
}

/// A parsed program. Equality compares clauses only, not positions.
#[derive(Debug, Clone, Default, Serialize)]
pub struct SourceProgram {
    pub clauses: Vec<SourceClause>,
}

impl PartialEq for SourceProgram {
    fn eq(&self, other: &Self) -> bool {
        self.clauses.len() == other.clauses.len()
            && self
                .clauses
                .iter()
                .zip(&other.clauses)
                .all(|(a, b)| a.clause == b.clause)
    }
}

impl SourceProgram {
    pub fn iter(&self) -> impl Iterator<Item = &Clause> {
        self.clauses.iter().map(|c| &c.clause)
    }

    pub fn query(&self) -> Option<&SourceClause> {
        self.clauses.iter().find(|c| c.clause.is_query())
    }
}

pub fn parse_program(text: &str) -> Result<SourceProgram> {
    let tokens = tokenize(text)?;
    let mut p = Parser {
        tokens,
        next: 0,
        end: end_position(text),
    };
    let mut clauses = Vec::new();
    let mut seen_query = false;
    while !p.at_end() {
        let sc = p.clause()?;
        if sc.clause.is_query() {
            if seen_query {
                return Err(Error::DuplicateQuery { pos: sc.pos });
            }
            seen_query = true;
        }
        clauses.push(sc);
    }
    Ok(SourceProgram { clauses })
}

fn end_position(text: &str) -> Position {
    let line = text.matches('\n').count() + 1;
    let column = text.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    Position { line, column }
}

struct Parser {
    tokens: Vec<Spanned>,
    next: usize,
    end: Position,
}

impl Parser {
    fn at_end(&self) -> bool {
        self.next >= self.tokens.len()
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.next).map(|s| &s.token)
    }

    fn pos(&self) -> Position {
        self.tokens.get(self.next).map_or(self.end, |s| s.pos)
    }

    fn advance(&mut self) -> Option<Spanned> {
        let t = self.tokens.get(self.next).cloned();
        self.next += 1;
        t
    }

    fn expect(&mut self, want: Token) -> Result<Position> {
        let pos = self.pos();
        match self.advance() {
            Some(s) if s.token == want => Ok(s.pos),
            Some(s) => Err(syntax(
                s.pos,
                &format!("expected {}, found {}", want.describe(), s.token.describe()),
            )),
            None => Err(syntax(
                pos,
                &format!("expected {}, found end of input", want.describe()),
            )),
        }
    }

    fn ident(&mut self) -> Result<(VariableId, Position)> {
        let pos = self.pos();
        match self.advance() {
            Some(Spanned {
                token: Token::Ident(name),
                pos,
            }) => Ok((VariableId::new(name)?, pos)),
            Some(s) => Err(syntax(
                s.pos,
                &format!("expected a proposition, found {}", s.token.describe()),
            )),
            None => Err(syntax(pos, "expected a proposition, found end of input")),
        }
    }

    fn props(&mut self) -> Result<(Vec<VariableId>, Position)> {
        let (first, pos) = self.ident()?;
        let mut vars = vec![first];
        while self.peek() == Some(&Token::Comma) {
            self.advance();
            vars.push(self.ident()?.0);
        }
        Ok((vars, pos))
    }

    fn scope(&mut self) -> Result<(Scope, Position)> {
        let (vars, pos) = self.props()?;
        let scope = Scope::new(vars).map_err(|e| syntax(pos, &e.to_string()))?;
        Ok((scope, pos))
    }

    fn pr_list(&mut self, expected: usize) -> Result<Vec<Pr>> {
        let open = self.expect(Token::LBracket)?;
        let mut out = Vec::new();
        loop {
            let pos = self.pos();
            let value = match self.advance() {
                Some(Spanned {
                    token: Token::Number(x),
                    ..
                }) => x,
                Some(s) => {
                    return Err(syntax(
                        s.pos,
                        &format!("expected a probability, found {}", s.token.describe()),
                    ))
                }
                None => return Err(syntax(pos, "unterminated probability list")),
            };
            out.push(if value == -1.0 {
                None
            } else if (0.0..=1.0).contains(&value) {
                Some(value)
            } else {
                return Err(Error::Range { pos, value });
            });
            match self.peek() {
                Some(Token::Comma) => {
                    self.advance();
                }
                _ => break,
            }
        }
        self.expect(Token::RBracket)?;
        if out.len() != expected {
            return Err(Error::ListArity {
                pos: open,
                expected,
                found: out.len(),
            });
        }
        Ok(out)
    }

    fn clique(&mut self) -> Result<CliquePrior> {
        let (scope, _) = self.scope()?;
        self.expect(Token::Colon)?;
        let prior = self.pr_list(scope.num_states())?;
        Ok(CliquePrior { scope, prior })
    }

    fn clause(&mut self) -> Result<SourceClause> {
        let pos = self.pos();
        if self.peek() == Some(&Token::Query) {
            self.advance();
            let mut cliques = vec![self.clique()?];
            while self.peek() == Some(&Token::Semicolon) {
                self.advance();
                // a trailing `;` before the terminator is tolerated
                if self.peek() == Some(&Token::Dot) {
                    break;
                }
                cliques.push(self.clique()?);
            }
            self.expect(Token::Dot)?;
            return Ok(SourceClause {
                clause: Clause::RootClique { cliques },
                pos,
            });
        }

        let (vars, _) = self.props()?;
        match self.peek() {
            Some(Token::Arrow) => {
                self.advance();
                let head = Scope::new(vars).map_err(|e| syntax(pos, &e.to_string()))?;
                let (body, body_pos) = self.ident()?;
                if self.peek() == Some(&Token::Comma) {
                    return Err(syntax(body_pos, "a rule body is a single proposition"));
                }
                if head.contains(&body) {
                    return Err(syntax(
                        body_pos,
                        &format!("`{body}` appears in its own head"),
                    ));
                }
                self.expect(Token::Colon)?;
                let cond = self.pr_list(head.num_states())?;
                self.expect(Token::Dot)?;
                Ok(SourceClause {
                    clause: Clause::Rule { head, body, cond },
                    pos,
                })
            }
            _ => {
                self.expect(Token::Dot)?;
                let scope = Scope::new(vars).map_err(|e| syntax(pos, &e.to_string()))?;
                Ok(SourceClause {
                    clause: Clause::Observation {
                        vars: scope.vars().to_vec(),
                    },
                    pos,
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const SIMPLE: &str = "?- A : [0.300000, 0.700000].
A -> B : [0.200000, 0.400000].
A -> C : [0.800000, 0.100000].
B.
C.
";

    pub(crate) const CANCER: &str = "?- A : [0.800000, 0.200000].
A -> B : [0.200000, 0.800000].
A -> C : [0.050000, 0.200000].
B, C -> D : [0.050000, 0.800000, 0.800000, 0.800000].
C -> E : [0.600000, 0.800000].
D.
E.
";

    #[test]
    fn simple_program() {
        let p = parse_program(SIMPLE).unwrap();
        assert_eq!(p.clauses.len(), 5);
        assert_eq!(
            p.clauses[0].clause,
            Clause::RootClique {
                cliques: vec![CliquePrior {
                    scope: Scope::of(&["A"]),
                    prior: vec![Some(0.3), Some(0.7)],
                }]
            }
        );
        assert_eq!(
            p.clauses[2].clause,
            Clause::Rule {
                head: Scope::of(&["A"]),
                body: "C".into(),
                cond: vec![Some(0.8), Some(0.1)],
            }
        );
        assert_eq!(
            p.clauses[4].clause,
            Clause::Observation {
                vars: vec!["C".into()]
            }
        );
        assert_eq!(p.clauses[3].pos, Position { line: 4, column: 1 });
    }

    #[test]
    fn empty_input() {
        assert!(parse_program("").unwrap().clauses.is_empty());
        assert!(parse_program("  % nothing\n").unwrap().clauses.is_empty());
    }

    #[test]
    fn cancer_program_with_two_variable_head() {
        let p = parse_program(CANCER).unwrap();
        assert_eq!(p.clauses.len(), 7);
        match &p.clauses[3].clause {
            Clause::Rule { head, body, cond } => {
                assert_eq!(head, &Scope::of(&["B", "C"]));
                assert_eq!(body.as_str(), "D");
                assert_eq!(cond, &vec![Some(0.05), Some(0.8), Some(0.8), Some(0.8)]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn typeset_cancer_listing_parses() {
        let text = "? - A : [0.8, 0.2].\nA → B : [0.2, 0.8].\n";
        assert_eq!(parse_program(text).unwrap().clauses.len(), 2);
    }

    #[test]
    fn unknown_sentinel_and_range() {
        let p = parse_program("?- A, B : [0.25, -1.0, -1, 0.25].").unwrap();
        match &p.clauses[0].clause {
            Clause::RootClique { cliques } => {
                assert_eq!(cliques[0].prior, vec![Some(0.25), None, None, Some(0.25)])
            }
            _ => unreachable!(),
        }
        match parse_program("?- A : [0.3, 1.7].") {
            Err(Error::Range { pos, value }) => {
                assert_eq!(value, 1.7);
                assert_eq!(
                    pos,
                    Position {
                        line: 1,
                        column: 14
                    }
                );
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_program("?- A : [-0.5, 1.0]."),
            Err(Error::Range { .. })
        ));
    }

    #[test]
    fn arity_errors() {
        assert!(matches!(
            parse_program("?- A : [1.0]."),
            Err(Error::ListArity {
                expected: 2,
                found: 1,
                ..
            })
        ));
        assert!(matches!(
            parse_program("?- A : [0.5, 0.5].\nA, B -> C : [0.1, 0.2]."),
            Err(Error::ListArity {
                expected: 4,
                found: 2,
                ..
            })
        ));
    }

    #[test]
    fn second_query_rejected_with_position() {
        match parse_program("?- A : [0.5, 0.5].\n?- B : [0.5, 0.5].") {
            Err(Error::DuplicateQuery { pos }) => assert_eq!(pos.line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn multiple_cliques_in_one_query() {
        let p = parse_program("?- A : [0.5, 0.5]; B, C : [0.1, 0.2, 0.3, 0.4].").unwrap();
        match &p.clauses[0].clause {
            Clause::RootClique { cliques } => {
                assert_eq!(cliques.len(), 2);
                assert_eq!(cliques[1].scope, Scope::of(&["B", "C"]));
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn syntax_errors_are_total_and_positioned() {
        for (src, line) in [
            ("A -> B : [0.1, 0.2]", 1),     // missing terminator
            ("A.\nB C.", 2),                // missing comma
            ("?- A [0.5, 0.5].", 1),        // missing colon
            ("A -> B, C : [0.1, 0.2].", 1), // multi-variable body
            ("A.\n\nA, A.", 3),             // duplicate in list
            ("A -> A : [0.1, 0.2].", 1),    // self loop
            ("?- A : [].", 1),              // empty list
        ] {
            match parse_program(src) {
                Err(Error::Syntax { pos, .. }) => assert_eq!(pos.line, line, "{src}"),
                other => panic!("{src}: unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn comments_are_ignored() {
        let p = parse_program("% model\n?- A : [0.5, 0.5]. % root\nA. % obs\n").unwrap();
        assert_eq!(p.clauses.len(), 2);
    }
}
