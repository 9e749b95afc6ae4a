//! Tokenizer shared by the model-file and formula grammars.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Semi,
    Comma,
    Dot,
    Colon,
    Bang,
    Star,
    Plus,
    Arrow,
    Implies,
    Iff,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(name) => return write!(f, "`{name}`"),
            Tok::LBrace => "`{`",
            Tok::RBrace => "`}`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBracket => "`[`",
            Tok::RBracket => "`]`",
            Tok::Semi => "`;`",
            Tok::Comma => "`,`",
            Tok::Dot => "`.`",
            Tok::Colon => "`:`",
            Tok::Bang => "`!`",
            Tok::Star => "`*`",
            Tok::Plus => "`+`",
            Tok::Arrow => "`->`",
            Tok::Implies => "`=>`",
            Tok::Iff => "`<=>`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexError {
    pub pos: Pos,
    pub found: char,
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, LexError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let mut pos = Pos { line: 1, column: 1 };

    while let Some(&c) = chars.peek() {
        let start = pos;
        let bump = |chars: &mut std::iter::Peekable<std::str::Chars<'_>>, pos: &mut Pos| {
            let c = chars.next();
            if c == Some('\n') {
                pos.line += 1;
                pos.column = 1;
            } else {
                pos.column += 1;
            }
            c
        };

        if c.is_whitespace() {
            bump(&mut chars, &mut pos);
            continue;
        }
        if c == '#' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                bump(&mut chars, &mut pos);
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut ident = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    ident.push(c);
                    bump(&mut chars, &mut pos);
                } else {
                    break;
                }
            }
            out.push(Token { tok: Tok::Ident(ident), pos: start });
            continue;
        }

        bump(&mut chars, &mut pos);
        let tok = match c {
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            ';' => Tok::Semi,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            ':' => Tok::Colon,
            '!' => Tok::Bang,
            '*' => Tok::Star,
            '+' => Tok::Plus,
            '-' if chars.peek() == Some(&'>') => {
                bump(&mut chars, &mut pos);
                Tok::Arrow
            }
            '=' if chars.peek() == Some(&'>') => {
                bump(&mut chars, &mut pos);
                Tok::Implies
            }
            '<' => {
                let mut ahead = chars.clone();
                if ahead.next() == Some('=') && ahead.next() == Some('>') {
                    bump(&mut chars, &mut pos);
                    bump(&mut chars, &mut pos);
                    Tok::Iff
                } else {
                    return Err(LexError { pos: start, found: c });
                }
            }
            other => return Err(LexError { pos: start, found: other }),
        };
        out.push(Token { tok, pos: start });
    }

    out.push(Token { tok: Tok::Eof, pos });
    Ok(out)
}

/// Cursor over a token vector; both grammars are LL(2) at most.
pub struct Cursor {
    tokens: Vec<Token>,
    at: usize,
}

impl Cursor {
    pub fn new(tokens: Vec<Token>) -> Self {
        Cursor { tokens, at: 0 }
    }

    pub fn peek(&self) -> &Token {
        &self.tokens[self.at.min(self.tokens.len() - 1)]
    }

    pub fn peek_nth(&self, n: usize) -> &Token {
        &self.tokens[(self.at + n).min(self.tokens.len() - 1)]
    }

    #[allow(clippy::should_implement_trait)]
    pub fn next(&mut self) -> Token {
        let t = self.peek().clone();
        if self.at < self.tokens.len() - 1 {
            self.at += 1;
        }
        t
    }

    pub fn eat(&mut self, tok: &Tok) -> bool {
        if &self.peek().tok == tok {
            self.next();
            true
        } else {
            false
        }
    }

    pub fn peek_ident(&self) -> Option<&str> {
        match &self.peek().tok {
            Tok::Ident(s) => Some(s),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(text: &str) -> Vec<Tok> {
        tokenize(text).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn multi_char_operators() {
        assert_eq!(
            toks("a -> b => c <=> d"),
            vec![
                Tok::Ident("a".into()),
                Tok::Arrow,
                Tok::Ident("b".into()),
                Tok::Implies,
                Tok::Ident("c".into()),
                Tok::Iff,
                Tok::Ident("d".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn comments_and_positions() {
        let t = tokenize("# header\n  foo # trailing\nbar").unwrap();
        assert_eq!(t[0].pos, Pos { line: 2, column: 3 });
        assert_eq!(t[1].pos, Pos { line: 3, column: 1 });
    }

    #[test]
    fn stray_character() {
        let err = tokenize("a\n  $").unwrap_err();
        assert_eq!(err.pos, Pos { line: 2, column: 3 });
        assert_eq!(err.found, '$');
        assert!(tokenize("a < b").is_err());
    }
}
