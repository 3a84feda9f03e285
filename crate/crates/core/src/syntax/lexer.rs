use std::fmt;

use serde::Serialize;

/// Location of a token or error in the source text. Lines and columns are 1-based,
/// byte offsets are 0-based and half-open.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub start: usize,
    pub end: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Number(usize),
    Forall,
    Exists,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Dot,
    Semi,
    Colon,
    Slash,
    Tilde,
    Amp,
    Pipe,
    Arrow,
    DoubleArrow,
    Equals,
    NotEquals,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Number(n) => format!("number `{n}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.symbol()),
        }
    }

    pub fn symbol(&self) -> &'static str {
        match self {
            Tok::Ident(_) => "identifier",
            Tok::Number(_) => "number",
            Tok::Forall => "forall",
            Tok::Exists => "exists",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Comma => ",",
            Tok::Dot => ".",
            Tok::Semi => ";",
            Tok::Colon => ":",
            Tok::Slash => "/",
            Tok::Tilde => "~",
            Tok::Amp => "&",
            Tok::Pipe => "|",
            Tok::Arrow => "->",
            Tok::DoubleArrow => "<->",
            Tok::Equals => "=",
            Tok::NotEquals => "!=",
            Tok::Eof => "end of input",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

/// Splits the input into tokens. On an unexpected character, returns its span.
pub fn tokenize(text: &str) -> Result<Vec<Token>, SourceSpan> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut pos = 0;
    let mut line = 1;
    let mut line_start = 0;

    while pos < bytes.len() {
        let c = bytes[pos];
        if c == b'\n' {
            pos += 1;
            line += 1;
            line_start = pos;
            continue;
        }
        if c.is_ascii_whitespace() {
            pos += 1;
            continue;
        }
        if c == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
            continue;
        }
        let start = pos;
        let column = text[line_start..start].chars().count() + 1;
        let span = |end: usize| SourceSpan {
            line,
            column,
            start,
            end,
        };
        let next = bytes.get(pos + 1).copied();
        let (tok, len) = match c {
            b'(' => (Tok::LParen, 1),
            b')' => (Tok::RParen, 1),
            b'{' => (Tok::LBrace, 1),
            b'}' => (Tok::RBrace, 1),
            b',' => (Tok::Comma, 1),
            b'.' => (Tok::Dot, 1),
            b';' => (Tok::Semi, 1),
            b':' => (Tok::Colon, 1),
            b'/' => (Tok::Slash, 1),
            b'~' => (Tok::Tilde, 1),
            b'&' => (Tok::Amp, 1),
            b'|' => (Tok::Pipe, 1),
            b'=' => (Tok::Equals, 1),
            b'-' if next == Some(b'>') => (Tok::Arrow, 2),
            b'!' if next == Some(b'=') => (Tok::NotEquals, 2),
            b'<' if next == Some(b'-') && bytes.get(pos + 2) == Some(&b'>') => (Tok::DoubleArrow, 3),
            b'0'..=b'9' => {
                let mut end = pos;
                while end < bytes.len() && bytes[end].is_ascii_digit() {
                    end += 1;
                }
                let n = text[pos..end].parse().map_err(|_| span(end))?;
                (Tok::Number(n), end - pos)
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let mut end = pos;
                while end < bytes.len()
                    && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_' || bytes[end] == b'\'')
                {
                    end += 1;
                }
                let word = &text[pos..end];
                let tok = match word {
                    "forall" => Tok::Forall,
                    "exists" => Tok::Exists,
                    _ => Tok::Ident(word.to_string()),
                };
                (tok, end - pos)
            }
            _ => {
                let width = text[pos..].chars().next().map_or(1, char::len_utf8);
                return Err(span(pos + width));
            }
        };
        out.push(Token {
            tok,
            span: span(pos + len),
        });
        pos += len;
    }

    let column = text[line_start..].chars().count() + 1;
    out.push(Token {
        tok: Tok::Eof,
        span: SourceSpan {
            line,
            column,
            start: text.len(),
            end: text.len(),
        },
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operators_and_comments() {
        let toks: Vec<Tok> = tokenize("a <-> b -> ~c != d # trailing\n")
            .unwrap()
            .into_iter()
            .map(|t| t.tok)
            .collect();
        assert_eq!(
            toks,
            vec![
                Tok::Ident("a".into()),
                Tok::DoubleArrow,
                Tok::Ident("b".into()),
                Tok::Arrow,
                Tok::Tilde,
                Tok::Ident("c".into()),
                Tok::NotEquals,
                Tok::Ident("d".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn bad_character_span() {
        let err = tokenize("E(x,\n  y) $").unwrap_err();
        assert_eq!((err.line, err.column, err.start), (2, 6, 10));
    }
}
