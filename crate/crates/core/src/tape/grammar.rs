//! Textual term grammar.
//!
//! ```text
//! term := 'id' NAT | 'var' NAT | IDENT | 'copy' | 'discard' | 'swap'
//!       | term ';' term | term '*' term | '(' term ')'
//! ```
//!
//! `;` is diagrammatic composition (left operand applied first) and binds
//! looser than the parallel product `*`. Both associate to the left.
//! `id2` and `id 2` are the same token sequence.

use std::fmt;

use crate::error::{Error, Result};

/// Parsed but unresolved term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Syntax {
    Ident(String),
    Id(usize),
    Var(usize),
    Copy,
    Discard,
    Swap,
    Seq(Box<Syntax>, Box<Syntax>),
    Par(Box<Syntax>, Box<Syntax>),
}

/// Names that cannot be used as generator or machine identifiers.
pub fn is_reserved_name(name: &str) -> bool {
    matches!(name, "id" | "var" | "copy" | "discard" | "swap")
        || split_indexed(name, "id").is_some()
        || split_indexed(name, "var").is_some()
}

pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn split_indexed(word: &str, prefix: &str) -> Option<usize> {
    let digits = word.strip_prefix(prefix)?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Word(String),
    Nat(usize),
    Semi,
    Star,
    Open,
    Close,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b';' => Token::Semi,
            b'*' => Token::Star,
            b'(' => Token::Open,
            b')' => Token::Close,
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n = text[start..i].parse().map_err(|_| parse_error(start, "number too large"))?;
                out.push((start, Token::Nat(n)));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Token::Word(text[start..i].to_string())));
                continue;
            }
            _ => return Err(parse_error(start, &format!("unexpected character {:?}", text[start..].chars().next().unwrap()))),
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

fn parse_error(position: usize, message: &str) -> Error {
    Error::TermSyntax { position, message: message.to_string() }
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn seq(&mut self) -> Result<Syntax> {
        let mut lhs = self.par()?;
        while self.peek() == Some(&Token::Semi) {
            self.pos += 1;
            let rhs = self.par()?;
            lhs = Syntax::Seq(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn par(&mut self) -> Result<Syntax> {
        let mut lhs = self.atom()?;
        while self.peek() == Some(&Token::Star) {
            self.pos += 1;
            let rhs = self.atom()?;
            lhs = Syntax::Par(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn atom(&mut self) -> Result<Syntax> {
        let offset = self.offset();
        let tok = self.tokens.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        match tok {
            Some(Token::Open) => {
                let inner = self.seq()?;
                if self.peek() != Some(&Token::Close) {
                    return Err(parse_error(self.offset(), "expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(Token::Word(w)) => Ok(match w.as_str() {
                "copy" => Syntax::Copy,
                "discard" => Syntax::Discard,
                "swap" => Syntax::Swap,
                "id" if matches!(self.peek(), Some(Token::Nat(_))) => Syntax::Id(self.nat()?),
                "id" => Syntax::Id(1),
                "var" => Syntax::Var(self.nat()?),
                _ => {
                    if let Some(n) = split_indexed(&w, "id") {
                        Syntax::Id(n)
                    } else if let Some(n) = split_indexed(&w, "var") {
                        Syntax::Var(n)
                    } else {
                        Syntax::Ident(w)
                    }
                }
            }),
            Some(t) => Err(parse_error(offset, &format!("unexpected token {t:?}"))),
            None => Err(parse_error(offset, "unexpected end of term")),
        }
    }

    fn nat(&mut self) -> Result<usize> {
        match self.tokens.get(self.pos) {
            Some((_, Token::Nat(n))) => {
                let n = *n;
                self.pos += 1;
                Ok(n)
            }
            _ => Err(parse_error(self.offset(), "expected a number")),
        }
    }
}

pub fn parse(text: &str) -> Result<Syntax> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens, pos: 0, end: text.len() };
    let term = p.seq()?;
    if p.pos < p.tokens.len() {
        return Err(parse_error(p.offset(), "trailing input"));
    }
    Ok(term)
}

/// Shape of a term node as seen by the printer.
pub enum View<'a, T> {
    Seq(&'a T, &'a T),
    Par(&'a T, &'a T),
    Leaf(String),
}

pub trait TermView: Sized {
    fn view(&self) -> View<'_, Self>;
}

#[derive(Clone, Copy, PartialEq)]
enum Slot {
    Top,
    SeqRight,
    ParLeft,
    ParRight,
}

fn write_term<T: TermView>(t: &T, slot: Slot, out: &mut String) {
    crate::deep(|| match t.view() {
        View::Leaf(s) => out.push_str(&s),
        View::Seq(l, r) => {
            let parens = slot != Slot::Top;
            if parens {
                out.push('(');
            }
            write_term(l, Slot::Top, out);
            out.push_str(" ; ");
            write_term(r, Slot::SeqRight, out);
            if parens {
                out.push(')');
            }
        }
        View::Par(l, r) => {
            let parens = slot == Slot::ParRight;
            if parens {
                out.push('(');
            }
            write_term(l, Slot::ParLeft, out);
            out.push_str(" * ");
            write_term(r, Slot::ParRight, out);
            if parens {
                out.push(')');
            }
        }
    })
}

/// Renders a term in the grammar with the minimal parenthesization that
/// parses back to the same tree.
pub fn render<T: TermView>(t: &T) -> String {
    let mut out = String::new();
    write_term(t, Slot::Top, &mut out);
    out
}

impl TermView for Syntax {
    fn view(&self) -> View<'_, Self> {
        match self {
            Syntax::Seq(l, r) => View::Seq(l, r),
            Syntax::Par(l, r) => View::Par(l, r),
            Syntax::Ident(s) => View::Leaf(s.clone()),
            Syntax::Id(1) => View::Leaf("id".into()),
            Syntax::Id(n) => View::Leaf(format!("id{n}")),
            Syntax::Var(n) => View::Leaf(format!("var{n}")),
            Syntax::Copy => View::Leaf("copy".into()),
            Syntax::Discard => View::Leaf("discard".into()),
            Syntax::Swap => View::Leaf("swap".into()),
        }
    }
}

impl fmt::Display for Syntax {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(s: &str) -> Box<Syntax> {
        Box::new(Syntax::Ident(s.into()))
    }

    #[test]
    fn precedence_and_associativity() {
        let t = parse("a ; b * c ; d").unwrap();
        let expected = Syntax::Seq(
            Box::new(Syntax::Seq(id("a"), Box::new(Syntax::Par(id("b"), id("c"))))),
            id("d"),
        );
        assert_eq!(t, expected);
        assert_eq!(t.to_string(), "a ; b * c ; d");
    }

    #[test]
    fn keywords_and_indices() {
        assert_eq!(parse("id1").unwrap(), Syntax::Id(1));
        assert_eq!(parse("id").unwrap(), Syntax::Id(1));
        assert_eq!(parse("id 3").unwrap(), Syntax::Id(3));
        assert_eq!(parse("var0 ; a").unwrap(), Syntax::Seq(Box::new(Syntax::Var(0)), id("a")));
        assert_eq!(parse("copy;discard*swap").unwrap().to_string(), "copy ; discard * swap");
        assert_eq!(parse("idx").unwrap(), Syntax::Ident("idx".into()));
    }

    #[test]
    fn right_nested_groups_keep_parentheses() {
        for text in ["a ; (b ; c)", "a * (b * c)", "(a ; b) * c", "a * (b ; c) ; d"] {
            assert_eq!(parse(text).unwrap().to_string(), text);
        }
        assert_eq!(parse("((a)) ; (b)").unwrap().to_string(), "a ; b");
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        match parse("a ; ; b") {
            Err(Error::TermSyntax { position, .. }) => assert_eq!(position, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse("(a ; b").is_err());
        assert!(parse("a b").is_err());
        assert!(parse("").is_err());
        assert!(parse("a # b").is_err());
        assert!(parse("id id").is_err());
    }

    #[test]
    fn reserved_names() {
        assert!(is_reserved_name("id4"));
        assert!(is_reserved_name("copy"));
        assert!(!is_reserved_name("idx"));
        assert!(!is_reserved_name("a"));
    }
}
