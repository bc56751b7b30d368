//! Parser for the surface grammar.
//!
//! ```text
//! formula  := or
//! or       := and ('|' and)*
//! and      := unit ('&' unit)*
//! unit     := 'bot' | 'top' | atom
//!           | 'all' var+ '(' formula '->' formula ')'
//!           | 'ex' var unit
//!           | '(' formula ')'                 -- grouping
//!           | '(' formula '->' formula ')'    -- empty universal block
//! atom     := pred | pred '(' term (',' term)* ')'
//! term     := var | natural
//! sequent  := formula '=>' formula
//! ```
//!
//! `&` binds tighter than `|`; `->` exists only inside the quantified or
//! parenthesized implication form; `ex` takes a quantifier-level operand, so
//! `ex x P(x) & Q` parses as `(ex x P(x)) & Q`. Identifiers are an ASCII
//! letter followed by ASCII alphanumerics. Predicate symbols must be declared
//! in the signature; an undeclared or wrong-arity atom is a parse error.

use super::{Formula, LTerm, PredName, Signature, VarName};
use crate::numbering::Nat;
use std::fmt;

/// Parse failure with position and the tokens that would have been accepted.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub expected: Vec<String>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "parse error at {}:{}: found {}, expected {}",
            self.line,
            self.col,
            self.found,
            self.expected.join(" or ")
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Number(Nat),
    LParen,
    RParen,
    Comma,
    Amp,
    Bar,
    Arrow,
    DArrow,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier '{s}'"),
            Tok::Number(n) => write!(f, "number {n}"),
            Tok::LParen => write!(f, "'('"),
            Tok::RParen => write!(f, "')'"),
            Tok::Comma => write!(f, "','"),
            Tok::Amp => write!(f, "'&'"),
            Tok::Bar => write!(f, "'|'"),
            Tok::Arrow => write!(f, "'->'"),
            Tok::DArrow => write!(f, "'=>'"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

struct Scanner {
    chars: Vec<char>,
    i: usize,
    line: usize,
    col: usize,
}

impl Scanner {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.i).copied()
    }

    fn bump(&mut self) -> char {
        let c = self.chars[self.i];
        self.i += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        c
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize, usize)>, ParseError> {
    let mut sc = Scanner {
        chars: text.chars().collect(),
        i: 0,
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();
    while let Some(c) = sc.peek() {
        let (tline, tcol) = (sc.line, sc.col);
        if c.is_whitespace() {
            sc.bump();
            continue;
        }
        if c == '#' {
            while let Some(c) = sc.peek() {
                sc.bump();
                if c == '\n' {
                    break;
                }
            }
            continue;
        }
        if c.is_ascii_alphabetic() {
            let mut s = String::new();
            while sc.peek().is_some_and(|c| c.is_ascii_alphanumeric()) {
                s.push(sc.bump());
            }
            out.push((Tok::Ident(s), tline, tcol));
            continue;
        }
        if c.is_ascii_digit() {
            let mut s = String::new();
            while sc.peek().is_some_and(|c| c.is_ascii_digit()) {
                s.push(sc.bump());
            }
            out.push((Tok::Number(s.parse::<Nat>().unwrap()), tline, tcol));
            continue;
        }
        sc.bump();
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '&' => Tok::Amp,
            '|' => Tok::Bar,
            '-' if sc.peek() == Some('>') => {
                sc.bump();
                Tok::Arrow
            }
            '=' if sc.peek() == Some('>') => {
                sc.bump();
                Tok::DArrow
            }
            other => {
                return Err(ParseError {
                    line: tline,
                    col: tcol,
                    expected: vec!["a token".into()],
                    found: format!("'{other}'"),
                })
            }
        };
        out.push((tok, tline, tcol));
    }
    out.push((Tok::Eof, sc.line, sc.col));
    Ok(out)
}

impl Lexer {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn here(&self) -> (usize, usize) {
        let (_, l, c) = &self.toks[self.pos];
        (*l, *c)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, expected: &[&str]) -> ParseError {
        let (line, col) = self.here();
        ParseError {
            line,
            col,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().to_string(),
        }
    }

    fn expect(&mut self, tok: Tok, name: &str) -> Result<(), ParseError> {
        if self.peek() == &tok {
            self.bump();
            Ok(())
        } else {
            Err(self.err(&[name]))
        }
    }
}

struct Parser<'a> {
    lex: Lexer,
    sig: &'a Signature,
}

impl<'a> Parser<'a> {
    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.and_level()?;
        while self.lex.peek() == &Tok::Bar {
            self.lex.bump();
            let rhs = self.and_level()?;
            acc = Formula::or(acc, rhs);
        }
        Ok(acc)
    }

    fn and_level(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.unit()?;
        while self.lex.peek() == &Tok::Amp {
            self.lex.bump();
            let rhs = self.unit()?;
            acc = Formula::and(acc, rhs);
        }
        Ok(acc)
    }

    fn unit(&mut self) -> Result<Formula, ParseError> {
        match self.lex.peek().clone() {
            Tok::Ident(word) => match word.as_str() {
                "bot" => {
                    self.lex.bump();
                    Ok(Formula::Bot)
                }
                "top" => {
                    self.lex.bump();
                    Ok(Formula::Top)
                }
                "all" => {
                    self.lex.bump();
                    let mut vars = Vec::new();
                    while let Tok::Ident(v) = self.lex.peek().clone() {
                        self.lex.bump();
                        vars.push(VarName::new(v));
                    }
                    if vars.is_empty() {
                        return Err(self.lex.err(&["a variable"]));
                    }
                    self.implication_body(vars)
                }
                "ex" => {
                    self.lex.bump();
                    let v = match self.lex.peek().clone() {
                        Tok::Ident(v) => {
                            self.lex.bump();
                            VarName::new(v)
                        }
                        _ => return Err(self.lex.err(&["a variable"])),
                    };
                    let body = self.unit()?;
                    Ok(Formula::exists(v, body))
                }
                _ => self.atom(word),
            },
            Tok::LParen => {
                self.lex.bump();
                let f = self.formula()?;
                match self.lex.peek() {
                    Tok::RParen => {
                        self.lex.bump();
                        Ok(f)
                    }
                    Tok::Arrow => {
                        self.lex.bump();
                        let cons = self.formula()?;
                        self.lex.expect(Tok::RParen, "')'")?;
                        Ok(Formula::all_imp(Vec::new(), f, cons))
                    }
                    _ => Err(self.lex.err(&["')'", "'->'"])),
                }
            }
            _ => Err(self.lex.err(&["'bot'", "'top'", "'all'", "'ex'", "a predicate", "'('"])),
        }
    }

    /// Parses `( A -> B )` after the variable list of an `all`.
    fn implication_body(&mut self, vars: Vec<VarName>) -> Result<Formula, ParseError> {
        self.lex.expect(Tok::LParen, "'('")?;
        let ant = self.formula()?;
        self.lex.expect(Tok::Arrow, "'->'")?;
        let cons = self.formula()?;
        self.lex.expect(Tok::RParen, "')'")?;
        Ok(Formula::all_imp(vars, ant, cons))
    }

    fn atom(&mut self, name: String) -> Result<Formula, ParseError> {
        let (line, col) = self.lex.here();
        self.lex.bump();
        let pred = PredName::new(name.clone());
        let Some(arity) = self.sig.arity(&pred) else {
            return Err(ParseError {
                line,
                col,
                expected: vec!["a declared predicate symbol".into()],
                found: format!("undeclared '{name}'"),
            });
        };
        let mut args = Vec::new();
        if self.lex.peek() == &Tok::LParen {
            self.lex.bump();
            if self.lex.peek() != &Tok::RParen {
                loop {
                    args.push(self.term()?);
                    if self.lex.peek() == &Tok::Comma {
                        self.lex.bump();
                    } else {
                        break;
                    }
                }
            }
            self.lex.expect(Tok::RParen, "')'")?;
        }
        if args.len() != arity {
            return Err(ParseError {
                line,
                col,
                expected: vec![format!("{arity} argument(s) for '{name}'")],
                found: format!("{} argument(s)", args.len()),
            });
        }
        Ok(Formula::Atom(pred, args))
    }

    fn term(&mut self) -> Result<LTerm, ParseError> {
        match self.lex.peek().clone() {
            Tok::Ident(v) => {
                self.lex.bump();
                Ok(LTerm::Var(VarName::new(v)))
            }
            Tok::Number(n) => {
                self.lex.bump();
                Ok(LTerm::Num(n))
            }
            _ => Err(self.lex.err(&["a variable", "a number"])),
        }
    }
}

fn parser<'a>(text: &str, sig: &'a Signature) -> Result<Parser<'a>, ParseError> {
    Ok(Parser {
        lex: Lexer {
            toks: lex(text)?,
            pos: 0,
        },
        sig,
    })
}

/// Parses a formula; the whole input must be consumed.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, ParseError> {
    let mut p = parser(text, sig)?;
    let f = p.formula()?;
    p.lex.expect(Tok::Eof, "end of input")?;
    Ok(f)
}

/// Parses `A => B`.
pub fn parse_sequent(text: &str, sig: &Signature) -> Result<super::Sequent, ParseError> {
    let mut p = parser(text, sig)?;
    let lhs = p.formula()?;
    p.lex.expect(Tok::DArrow, "'=>'")?;
    let rhs = p.formula()?;
    p.lex.expect(Tok::Eof, "end of input")?;
    Ok(super::Sequent::new(lhs, rhs))
}

/// Parses a signature declaration list: `P/1, Q/2, R/0`.
pub fn parse_signature(text: &str) -> Result<Signature, ParseError> {
    let mut sig = Signature::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        for part in line.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let err = || ParseError {
                line: lineno + 1,
                col: 1,
                expected: vec!["'Name/arity'".into()],
                found: format!("'{part}'"),
            };
            let (name, arity) = part.split_once('/').ok_or_else(err)?;
            let name = name.trim();
            if name.is_empty()
                || !name.chars().next().unwrap().is_ascii_alphabetic()
                || !name.chars().all(|c| c.is_ascii_alphanumeric())
            {
                return Err(err());
            }
            let arity: usize = arity.trim().parse().map_err(|_| err())?;
            sig.declare(name, arity);
        }
    }
    Ok(sig)
}
