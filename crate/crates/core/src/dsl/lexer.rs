use super::{ParseError, SourceSpan};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Tok {
    Ident(String),
    Nat(u64),
    At,
    Bang,
    Question,
    Dot,
    Comma,
    Semi,
    Colon,
    Arrow,
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Nat(n) => format!("`{n}`"),
            Tok::At => "`@`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Question => "`?`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

pub fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let start = (line, col);
        let span = |len: usize| SourceSpan::new(start.0, start.1, len);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let text: String = chars[i..j].iter().collect();
            let n = text.parse::<u64>().map_err(|_| {
                ParseError::new(span(j - i), format!("number `{text}` is too large"))
            })?;
            out.push(Token {
                tok: Tok::Nat(n),
                span: span(j - i),
            });
            col += j - i;
            i = j;
            continue;
        }
        if is_ident_start(c) {
            let mut j = i;
            while j < chars.len() && is_ident_char(chars[j]) {
                j += 1;
            }
            out.push(Token {
                tok: Tok::Ident(chars[i..j].iter().collect()),
                span: span(j - i),
            });
            col += j - i;
            i = j;
            continue;
        }
        let (tok, len) = match c {
            '-' if chars.get(i + 1) == Some(&'>') => (Tok::Arrow, 2),
            '@' => (Tok::At, 1),
            '!' => (Tok::Bang, 1),
            '?' => (Tok::Question, 1),
            '.' => (Tok::Dot, 1),
            ',' => (Tok::Comma, 1),
            ';' => (Tok::Semi, 1),
            ':' => (Tok::Colon, 1),
            '{' => (Tok::LBrace, 1),
            '}' => (Tok::RBrace, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '[' => (Tok::LBracket, 1),
            ']' => (Tok::RBracket, 1),
            other => {
                return Err(ParseError::new(
                    span(1),
                    format!("unexpected character `{other}`"),
                ))
            }
        };
        out.push(Token {
            tok,
            span: span(len),
        });
        i += len;
        col += len;
    }
    out.push(Token {
        tok: Tok::Eof,
        span: SourceSpan::new(line, col, 0),
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_and_positions() {
        let toks = lex("node p {\n  !@c (item). 0 # hi\n}").unwrap();
        let kinds: Vec<_> = toks.iter().map(|t| t.tok.clone()).collect();
        assert_eq!(kinds[0], Tok::Ident("node".into()));
        assert_eq!(kinds[3], Tok::Bang);
        assert_eq!(toks[3].span.line, 2);
        assert_eq!(toks[3].span.column, 3);
        assert_eq!(kinds.last(), Some(&Tok::Eof));
        assert!(lex("a -> b").unwrap().iter().any(|t| t.tok == Tok::Arrow));
    }

    #[test]
    fn bad_character() {
        let e = lex("node $").unwrap_err();
        assert_eq!(e.span.column, 6);
    }
}
