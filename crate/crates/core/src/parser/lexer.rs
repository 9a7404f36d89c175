use crate::error::{Error, Position, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Token {
    Query,
    Arrow,
    Colon,
    Semicolon,
    Comma,
    Dot,
    LBracket,
    RBracket,
    Ident(String),
    Number(f64),
}

impl Token {
    pub fn describe(&self) -> String {
        match self {
            Token::Query => "`?-`".into(),
            Token::Arrow => "`->`".into(),
            Token::Colon => "`:`".into(),
            Token::Semicolon => "`;`".into(),
            Token::Comma => "`,`".into(),
            Token::Dot => "`.`".into(),
            Token::LBracket => "`[`".into(),
            Token::RBracket => "`]`".into(),
            Token::Ident(s) => format!("identifier `{s}`"),
            Token::Number(x) => format!("number {x}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Spanned {
    pub token: Token,
    pub pos: Position,
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    src: &'a str,
    line: usize,
    column: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.chars.clone();
        it.next();
        it.next().map(|(_, c)| c)
    }

    fn offset(&mut self) -> usize {
        self.chars.peek().map_or(self.src.len(), |&(i, _)| i)
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn pos(&self) -> Position {
        Position {
            line: self.line,
            column: self.column,
        }
    }
}

pub fn tokenize(src: &str) -> Result<Vec<Spanned>> {
    let mut cur = Cursor {
        chars: src.char_indices().peekable(),
        src,
        line: 1,
        column: 1,
    };
    let mut out = Vec::new();
    while let Some(c) = cur.peek() {
        let pos = cur.pos();
        let token = match c {
            c if c.is_whitespace() => {
                cur.bump();
                continue;
            }
            '%' => {
                while cur.peek().is_some_and(|c| c != '\n') {
                    cur.bump();
                }
                continue;
            }
            '?' => {
                cur.bump();
                // typeset listings sometimes separate the two characters
                while cur.peek().is_some_and(|c| c == ' ' || c == '\t') {
                    cur.bump();
                }
                if cur.peek() != Some('-') {
                    return Err(syntax(pos, "expected `?-`"));
                }
                cur.bump();
                Token::Query
            }
            '-' if cur.peek2() == Some('>') => {
                cur.bump();
                cur.bump();
                Token::Arrow
            }
            '→' => {
                cur.bump();
                Token::Arrow
            }
            ':' => single(&mut cur, Token::Colon),
            ';' => single(&mut cur, Token::Semicolon),
            ',' => single(&mut cur, Token::Comma),
            '.' => single(&mut cur, Token::Dot),
            '[' => single(&mut cur, Token::LBracket),
            ']' => single(&mut cur, Token::RBracket),
            c if c.is_ascii_digit()
                || (c == '-' && cur.peek2().is_some_and(|d| d.is_ascii_digit())) =>
            {
                number(&mut cur, pos)?
            }
            c if c.is_ascii_alphabetic() => {
                let start = cur.offset();
                while cur
                    .peek()
                    .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_')
                {
                    cur.bump();
                }
                let end = cur.offset();
                Token::Ident(src[start..end].to_string())
            }
            other => return Err(syntax(pos, &format!("unexpected character `{other}`"))),
        };
        out.push(Spanned { token, pos });
    }
    Ok(out)
}

fn single(cur: &mut Cursor<'_>, t: Token) -> Token {
    cur.bump();
    t
}

fn number(cur: &mut Cursor<'_>, pos: Position) -> Result<Token> {
    let start = cur.offset();
    if cur.peek() == Some('-') {
        cur.bump();
    }
    let digits = |cur: &mut Cursor<'_>| {
        while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
            cur.bump();
        }
    };
    digits(cur);
    if cur.peek() == Some('.') && cur.peek2().is_some_and(|c| c.is_ascii_digit()) {
        cur.bump();
        digits(cur);
    }
    if matches!(cur.peek(), Some('e' | 'E')) {
        let next = cur.peek2();
        if next.is_some_and(|c| c.is_ascii_digit() || c == '-' || c == '+') {
            cur.bump();
            if matches!(cur.peek(), Some('-' | '+')) {
                cur.bump();
            }
            if !cur.peek().is_some_and(|c| c.is_ascii_digit()) {
                return Err(syntax(pos, "malformed exponent"));
            }
            digits(cur);
        }
    }
    let end = cur.offset();
    let text = &cur.src[start..end];
    text.parse::<f64>()
        .map(Token::Number)
        .map_err(|_| syntax(pos, &format!("malformed number `{text}`")))
}

pub fn syntax(pos: Position, msg: &str) -> Error {
    Error::Syntax {
        pos,
        msg: msg.to_string(),
    }
}
