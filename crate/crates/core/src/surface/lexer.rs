use std::fmt;

use thiserror::Error;

use crate::span::Span;

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Int(i64),
    Float(f64),
    Ident(String),
    // keywords
    Fun,
    Let,
    Rec,
    In,
    If,
    Then,
    Else,
    Loop,
    To,
    Do,
    Done,
    Ref,
    Vector,
    Match,
    With,
    Type,
    Of,
    True,
    False,
    // punctuation
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Colon,
    ColonColon,
    Arrow,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    FPlus,
    FMinus,
    FStar,
    FSlash,
    FEq,
    FLt,
    FLe,
    FGt,
    FGe,
    AndAnd,
    OrOr,
    Bang,
    Assign,
    Semi,
    DotBracket,
    LArrow,
    Hash,
    Bar,
    Question,
    Underscore,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Int(n) => return write!(f, "INT {n}"),
            Tok::Float(x) => return write!(f, "FLOAT {x:?}"),
            Tok::Ident(s) => return write!(f, "IDENT {s}"),
            Tok::Fun => "fun",
            Tok::Let => "let",
            Tok::Rec => "rec",
            Tok::In => "in",
            Tok::If => "if",
            Tok::Then => "then",
            Tok::Else => "else",
            Tok::Loop => "loop",
            Tok::To => "to",
            Tok::Do => "do",
            Tok::Done => "done",
            Tok::Ref => "ref",
            Tok::Vector => "vector",
            Tok::Match => "match",
            Tok::With => "with",
            Tok::Type => "type",
            Tok::Of => "of",
            Tok::True => "true",
            Tok::False => "false",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::ColonColon => "::",
            Tok::Arrow => "->",
            Tok::Eq => "=",
            Tok::Ne => "<>",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Percent => "%",
            Tok::FPlus => "+.",
            Tok::FMinus => "-.",
            Tok::FStar => "*.",
            Tok::FSlash => "/.",
            Tok::FEq => "=.",
            Tok::FLt => "<.",
            Tok::FLe => "<=.",
            Tok::FGt => ">.",
            Tok::FGe => ">=.",
            Tok::AndAnd => "&&",
            Tok::OrOr => "||",
            Tok::Bang => "!",
            Tok::Assign => ":=",
            Tok::Semi => ";",
            Tok::DotBracket => ".[",
            Tok::LArrow => "<-",
            Tok::Hash => "#",
            Tok::Bar => "|",
            Tok::Question => "?",
            Tok::Underscore => "_",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

#[derive(Debug, Clone, Error, PartialEq)]
#[error("lexical error: {message}")]
pub struct LexError {
    pub span: Span,
    pub message: String,
}

/// Largest integer literal representable in 63 bits.
pub const MAX_INT63: i64 = (1 << 62) - 1;
/// Magnitude of the smallest 63-bit integer.
pub const MIN_INT63: i64 = -(1 << 62);

fn keyword(s: &str) -> Option<Tok> {
    Some(match s {
        "fun" => Tok::Fun,
        "let" => Tok::Let,
        "rec" => Tok::Rec,
        "in" => Tok::In,
        "if" => Tok::If,
        "then" => Tok::Then,
        "else" => Tok::Else,
        "loop" => Tok::Loop,
        "to" => Tok::To,
        "do" => Tok::Do,
        "done" => Tok::Done,
        "ref" => Tok::Ref,
        "vector" => Tok::Vector,
        "match" => Tok::Match,
        "with" => Tok::With,
        "type" => Tok::Type,
        "of" => Tok::Of,
        "true" => Tok::True,
        "false" => Tok::False,
        "_" => Tok::Underscore,
        _ => return None,
    })
}

/// Splits source text into tokens. Whitespace and `(* ... *)` comments
/// (which nest) are dropped. The returned list always ends with `Eof`.
pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    let bytes = source.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b'(' && bytes.get(i + 1) == Some(&b'*') {
            let start = i;
            let mut depth = 1;
            i += 2;
            while depth > 0 {
                if i + 1 >= bytes.len() {
                    return Err(LexError {
                        span: Span::new(start, bytes.len()),
                        message: "unterminated comment".into(),
                    });
                }
                if bytes[i] == b'(' && bytes[i + 1] == b'*' {
                    depth += 1;
                    i += 2;
                } else if bytes[i] == b'*' && bytes[i + 1] == b')' {
                    depth -= 1;
                    i += 2;
                } else {
                    i += 1;
                }
            }
            continue;
        }
        let start = i;
        if c.is_ascii_digit() {
            let (tok, end) = lex_number(source, start)?;
            out.push(Token { tok, span: Span::new(start, end) });
            i = end;
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'\'') {
                i += 1;
            }
            let word = &source[start..i];
            let tok = keyword(word).unwrap_or_else(|| Tok::Ident(word.to_string()));
            out.push(Token { tok, span: Span::new(start, i) });
            continue;
        }
        let rest = &source[i..];
        const PUNCT: &[(&str, Tok)] = &[
            ("<=.", Tok::FLe),
            (">=.", Tok::FGe),
            ("::", Tok::ColonColon),
            (":=", Tok::Assign),
            ("->", Tok::Arrow),
            ("<-", Tok::LArrow),
            ("<>", Tok::Ne),
            ("<=", Tok::Le),
            (">=", Tok::Ge),
            ("+.", Tok::FPlus),
            ("-.", Tok::FMinus),
            ("*.", Tok::FStar),
            ("/.", Tok::FSlash),
            ("=.", Tok::FEq),
            ("<.", Tok::FLt),
            (">.", Tok::FGt),
            ("&&", Tok::AndAnd),
            ("||", Tok::OrOr),
            (".[", Tok::DotBracket),
            ("(", Tok::LParen),
            (")", Tok::RParen),
            ("[", Tok::LBracket),
            ("]", Tok::RBracket),
            (",", Tok::Comma),
            (":", Tok::Colon),
            ("=", Tok::Eq),
            ("<", Tok::Lt),
            (">", Tok::Gt),
            ("+", Tok::Plus),
            ("-", Tok::Minus),
            ("*", Tok::Star),
            ("/", Tok::Slash),
            ("%", Tok::Percent),
            ("!", Tok::Bang),
            (";", Tok::Semi),
            ("#", Tok::Hash),
            ("|", Tok::Bar),
            ("?", Tok::Question),
        ];
        match PUNCT.iter().find(|(p, _)| rest.starts_with(p)) {
            Some((p, tok)) => {
                i += p.len();
                out.push(Token { tok: tok.clone(), span: Span::new(start, i) });
            }
            None => {
                let ch = rest.chars().next().unwrap();
                return Err(LexError {
                    span: Span::new(start, start + ch.len_utf8()),
                    message: format!("illegal character {ch:?}"),
                });
            }
        }
    }
    out.push(Token { tok: Tok::Eof, span: Span::new(source.len(), source.len()) });
    Ok(out)
}

fn lex_number(source: &str, start: usize) -> Result<(Tok, usize), LexError> {
    let bytes = source.as_bytes();
    let mut i = start;
    let digits = |i: &mut usize| {
        while *i < bytes.len() && bytes[*i].is_ascii_digit() {
            *i += 1;
        }
    };
    digits(&mut i);
    let mut is_float = false;
    // `1.[` is never a float; a `.` must be followed by a digit or a non-operator
    if i < bytes.len() && bytes[i] == b'.' && bytes.get(i + 1) != Some(&b'[') {
        is_float = true;
        i += 1;
        digits(&mut i);
    }
    if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        let mut j = i + 1;
        if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
            j += 1;
        }
        if j < bytes.len() && bytes[j].is_ascii_digit() {
            is_float = true;
            i = j;
            digits(&mut i);
        }
    }
    let malformed = |end: usize| LexError {
        span: Span::new(start, end),
        message: format!("malformed numeric literal {:?}", &source[start..end]),
    };
    if i < bytes.len() {
        let next = bytes[i];
        if next.is_ascii_alphanumeric() || next == b'_' || (next == b'.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            let mut end = i;
            while end < bytes.len() && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'.' || bytes[end] == b'_') {
                end += 1;
            }
            return Err(malformed(end));
        }
    }
    let text = &source[start..i];
    if is_float {
        let x: f64 = text.parse().map_err(|_| malformed(i))?;
        Ok((Tok::Float(x), i))
    } else {
        // one extra unit is allowed so that `-4611686018427387904` parses
        let n: i64 = text.parse().map_err(|_| malformed(i))?;
        if n > MAX_INT63 + 1 {
            return Err(LexError {
                span: Span::new(start, i),
                message: format!("integer literal {text} does not fit in 63 bits"),
            });
        }
        Ok((Tok::Int(n), i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn keywords_and_idents() {
        assert_eq!(
            toks("let x = 1 in x"),
            vec![
                Tok::Let,
                Tok::Ident("x".into()),
                Tok::Eq,
                Tok::Int(1),
                Tok::In,
                Tok::Ident("x".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn float_operators_are_distinct() {
        let t = toks("fun (x:?) -> x +. 2.0");
        assert!(t.contains(&Tok::FPlus));
        assert!(!t.contains(&Tok::Plus));
        assert!(t.contains(&Tok::Float(2.0)));
    }

    #[test]
    fn malformed_literals() {
        assert!(tokenize("1.2.3").is_err());
        assert!(tokenize("12abc").is_err());
        assert!(tokenize("99999999999999999999").is_err());
        assert!(tokenize("let x = $").is_err());
    }

    #[test]
    fn comments_nest_and_spans_cover() {
        let src = "(* a (* b *) *) x.[1] <- 2.5e3";
        let ts = tokenize(src).unwrap();
        assert_eq!(ts[0].tok, Tok::Ident("x".into()));
        assert_eq!(ts[1].tok, Tok::DotBracket);
        assert_eq!(ts[5].tok, Tok::Float(2500.0));
        for t in &ts {
            assert!(t.span.start <= t.span.end);
        }
        assert!(tokenize("(* open").is_err());
    }

    #[test]
    fn compound_operators() {
        assert_eq!(
            toks("a <=. b :: ? := !c"),
            vec![
                Tok::Ident("a".into()),
                Tok::FLe,
                Tok::Ident("b".into()),
                Tok::ColonColon,
                Tok::Question,
                Tok::Assign,
                Tok::Bang,
                Tok::Ident("c".into()),
                Tok::Eof
            ]
        );
        assert_eq!(toks("?->int")[..2], [Tok::Question, Tok::Arrow]);
    }
}
