//! Concrete-syntax parser.
//!
//! Grammar (EBNF):
//! ```text
//! formula  = iff ;
//! iff      = implies , { "<->" , implies } ;              (* right-assoc *)
//! implies  = or , [ "->" , implies ] ;
//! or       = and , { "\/" , and } ;
//! and      = unary , { "/\" , unary } ;
//! unary    = "!" , unary
//!          | ("forall" | "exists") , ident , "." , formula
//!          | "true" | "false"
//!          | comparison
//!          | "(" , formula , ")" ;
//! comparison = term , ( "=" | "!=" | "<" | "<=" | ">" | ">=" ) , term ;
//! term     = factor , { ("+" | "-") , factor } ;
//! factor   = signed , { "*" , signed } ;
//! signed   = "-" , signed | power ;
//! power    = primary , [ "^" , nat ] ;
//! primary  = ident | nat , [ "/" , nat ] | "(" , term , ")" ;
//! ident    = letter | "_" , { letter | digit | "_" | "'" } ;
//! ```
//! Comparisons are normalized on the spot: `s < t` becomes `t - s > 0`,
//! `s <= t` becomes `t - s > 0 \/ s - t = 0`, `s != t` becomes
//! `s - t > 0 \/ t - s > 0`. Quantifier bodies extend as far right as
//! possible. After parsing, bound variables are renamed apart.

use std::fmt;

use crate::poly::Polynomial;
use crate::rational::Rational;

use super::{freshen, Formula};

/// Syntax error with a byte position into the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at byte {}: {}", self.pos, self.msg)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Nat(Rational),
    LParen,
    RParen,
    Dot,
    Bang,
    AndOp,
    OrOp,
    Arrow,
    DArrow,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
}

struct Lexer<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut i = 0;
    let mut toks = Vec::new();
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let two = if i + 1 < bytes.len() {
            &src[i..i + 2]
        } else {
            ""
        };
        let three = if i + 2 < bytes.len() {
            &src[i..i + 3]
        } else {
            ""
        };
        let tok = if three == "<->" {
            i += 3;
            Tok::DArrow
        } else if two == "->" {
            i += 2;
            Tok::Arrow
        } else if two == "/\\" {
            i += 2;
            Tok::AndOp
        } else if two == "\\/" {
            i += 2;
            Tok::OrOp
        } else if two == "<=" {
            i += 2;
            Tok::Le
        } else if two == ">=" {
            i += 2;
            Tok::Ge
        } else if two == "!=" {
            i += 2;
            Tok::Ne
        } else {
            match c {
                '(' => {
                    i += 1;
                    Tok::LParen
                }
                ')' => {
                    i += 1;
                    Tok::RParen
                }
                '.' => {
                    i += 1;
                    Tok::Dot
                }
                '!' => {
                    i += 1;
                    Tok::Bang
                }
                '=' => {
                    i += 1;
                    Tok::Eq
                }
                '<' => {
                    i += 1;
                    Tok::Lt
                }
                '>' => {
                    i += 1;
                    Tok::Gt
                }
                '+' => {
                    i += 1;
                    Tok::Plus
                }
                '-' => {
                    i += 1;
                    Tok::Minus
                }
                '*' => {
                    i += 1;
                    Tok::Star
                }
                '^' => {
                    i += 1;
                    Tok::Caret
                }
                '/' => {
                    i += 1;
                    Tok::Slash
                }
                _ if c.is_ascii_digit() => {
                    let mut j = i;
                    while j < bytes.len() && (bytes[j] as char).is_ascii_digit() {
                        j += 1;
                    }
                    let n: num::BigInt = src[i..j].parse().map_err(|_| ParseError {
                        pos: i,
                        msg: "bad integer literal".to_string(),
                    })?;
                    i = j;
                    Tok::Nat(Rational::from_integer(n))
                }
                _ if c.is_ascii_alphabetic() || c == '_' => {
                    let mut j = i;
                    while j < bytes.len() {
                        let d = bytes[j] as char;
                        if d.is_ascii_alphanumeric() || d == '_' || d == '\'' {
                            j += 1;
                        } else {
                            break;
                        }
                    }
                    let name = src[i..j].to_string();
                    i = j;
                    Tok::Ident(name)
                }
                _ => {
                    return Err(ParseError {
                        pos: i,
                        msg: format!("unexpected character `{c}`"),
                    })
                }
            }
        };
        toks.push((tok, start));
    }
    Ok(toks)
}

struct Parser<'a> {
    lx: Lexer<'a>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.lx.toks.get(self.pos).map(|(t, _)| t)
    }

    fn peek_at(&self, off: usize) -> Option<&Tok> {
        self.lx.toks.get(self.pos + off).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.lx
            .toks
            .get(self.pos)
            .map(|(_, p)| *p)
            .unwrap_or(self.lx.src.len())
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.lx.toks.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(what))
        }
    }

    fn err(&self, msg: &str) -> ParseError {
        ParseError {
            pos: self.here(),
            msg: format!("expected {msg}"),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.implies()?;
        if self.peek() == Some(&Tok::DArrow) {
            self.bump();
            let rhs = self.formula()?;
            Ok(Formula::iff(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn implies(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disj()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.bump();
            let rhs = self.implies()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disj(&mut self) -> Result<Formula, ParseError> {
        let mut parts = vec![self.conj()?];
        while self.peek() == Some(&Tok::OrOp) {
            self.bump();
            parts.push(self.conj()?);
        }
        if parts.len() == 1 {
            Ok(parts.pop().unwrap())
        } else {
            Ok(Formula::or(parts))
        }
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut parts = vec![self.unary()?];
        while self.peek() == Some(&Tok::AndOp) {
            self.bump();
            parts.push(self.unary()?);
        }
        if parts.len() == 1 {
            Ok(parts.pop().unwrap())
        } else {
            Ok(Formula::and(parts))
        }
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Bang) => {
                self.bump();
                let inner = self.unary()?;
                Ok(Formula::not(inner))
            }
            Some(Tok::Ident(name)) if name == "forall" || name == "exists" => {
                let is_forall = name == "forall";
                self.bump();
                let var = match self.peek() {
                    Some(Tok::Ident(v)) if !is_keyword(v) => {
                        let v = v.clone();
                        self.bump();
                        v
                    }
                    _ => return Err(self.err("a variable after the quantifier")),
                };
                self.expect(Tok::Dot, "`.` after the quantified variable")?;
                let body = self.formula()?;
                Ok(if is_forall {
                    Formula::forall(&var, body)
                } else {
                    Formula::exists(&var, body)
                })
            }
            Some(Tok::Ident(name)) if name == "true" => {
                self.bump();
                Ok(Formula::True)
            }
            Some(Tok::Ident(name)) if name == "false" => {
                self.bump();
                Ok(Formula::False)
            }
            Some(Tok::LParen) => {
                // Either a parenthesized formula or a parenthesized term;
                // try the formula reading first and fall back.
                let save = self.pos;
                match self.paren_formula_attempt() {
                    Ok(f) => Ok(f),
                    Err(_) => {
                        self.pos = save;
                        self.comparison()
                    }
                }
            }
            _ => self.comparison(),
        }
    }

    fn paren_formula_attempt(&mut self) -> Result<Formula, ParseError> {
        self.expect(Tok::LParen, "`(`")?;
        let f = self.formula()?;
        self.expect(Tok::RParen, "`)`")?;
        // a comparison or arithmetic operator after `)` means the
        // parentheses belonged to a term
        match self.peek() {
            Some(Tok::Eq | Tok::Ne | Tok::Lt | Tok::Le | Tok::Gt | Tok::Ge) => {
                Err(self.err("formula context"))
            }
            Some(Tok::Plus | Tok::Minus | Tok::Star | Tok::Caret | Tok::Slash) => {
                Err(self.err("formula context"))
            }
            _ => Ok(f),
        }
    }

    fn comparison(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.term()?;
        let op = match self.peek() {
            Some(Tok::Eq) => Tok::Eq,
            Some(Tok::Ne) => Tok::Ne,
            Some(Tok::Lt) => Tok::Lt,
            Some(Tok::Le) => Tok::Le,
            Some(Tok::Gt) => Tok::Gt,
            Some(Tok::Ge) => Tok::Ge,
            _ => return Err(self.err("a comparison operator")),
        };
        self.bump();
        let rhs = self.term()?;
        Ok(comparison_formula(op, lhs, rhs))
    }

    fn term(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = acc.add(&self.factor()?);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = acc.sub(&self.factor()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.signed()?;
        while self.peek() == Some(&Tok::Star) {
            self.bump();
            acc = acc.mul(&self.signed()?);
        }
        Ok(acc)
    }

    fn signed(&mut self) -> Result<Polynomial, ParseError> {
        if self.peek() == Some(&Tok::Minus) {
            self.bump();
            Ok(self.signed()?.neg())
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Polynomial, ParseError> {
        let base = self.primary()?;
        if self.peek() == Some(&Tok::Caret) {
            self.bump();
            match self.bump() {
                Some(Tok::Nat(n)) => {
                    let k = exponent_value(&n).ok_or_else(|| ParseError {
                        pos: self.here(),
                        msg: "exponent out of range".to_string(),
                    })?;
                    Ok(base.pow(k))
                }
                _ => Err(self.err("a natural-number exponent after `^`")),
            }
        } else {
            Ok(base)
        }
    }

    fn primary(&mut self) -> Result<Polynomial, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Ident(name)) if !is_keyword(&name) => {
                self.bump();
                Ok(Polynomial::var(&name))
            }
            Some(Tok::Nat(n)) => {
                self.bump();
                // fraction literal p/q
                if self.peek() == Some(&Tok::Slash) {
                    if let Some(Tok::Nat(_)) = self.peek_at(1) {
                        self.bump();
                        if let Some(Tok::Nat(d)) = self.bump() {
                            if num::Zero::is_zero(&d) {
                                return Err(ParseError {
                                    pos: self.here(),
                                    msg: "zero denominator".to_string(),
                                });
                            }
                            return Ok(Polynomial::constant(n / d));
                        }
                        unreachable!();
                    }
                }
                Ok(Polynomial::constant(n))
            }
            Some(Tok::LParen) => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            _ => Err(self.err("a variable, literal, or `(`")),
        }
    }
}

fn exponent_value(n: &Rational) -> Option<u32> {
    use num::ToPrimitive;
    if !num::One::is_one(n.denom()) {
        return None;
    }
    n.numer().to_u32()
}

fn is_keyword(s: &str) -> bool {
    matches!(s, "forall" | "exists" | "true" | "false")
}

fn comparison_formula(op: Tok, lhs: Polynomial, rhs: Polynomial) -> Formula {
    match op {
        Tok::Eq => Formula::eq_zero(lhs.sub(&rhs)),
        Tok::Lt => Formula::gt_zero(rhs.sub(&lhs)),
        Tok::Gt => Formula::gt_zero(lhs.sub(&rhs)),
        Tok::Le => Formula::or(vec![
            Formula::gt_zero(rhs.sub(&lhs)),
            Formula::eq_zero(lhs.sub(&rhs)),
        ]),
        Tok::Ge => Formula::or(vec![
            Formula::gt_zero(lhs.sub(&rhs)),
            Formula::eq_zero(lhs.sub(&rhs)),
        ]),
        Tok::Ne => Formula::or(vec![
            Formula::gt_zero(lhs.sub(&rhs)),
            Formula::gt_zero(rhs.sub(&lhs)),
        ]),
        _ => unreachable!(),
    }
}

/// Parses a formula, normalizing atoms and renaming bound variables apart.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        lx: Lexer { src: text, toks },
        pos: 0,
    };
    let f = p.formula()?;
    if p.pos != p.lx.toks.len() {
        return Err(ParseError {
            pos: p.here(),
            msg: "trailing input after formula".to_string(),
        });
    }
    Ok(freshen(&f))
}

/// Parses a bare polynomial term (used by the CLI for `scheme ivt`).
pub fn parse_term(text: &str) -> Result<Polynomial, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        lx: Lexer { src: text, toks },
        pos: 0,
    };
    let t = p.term()?;
    if p.pos != p.lx.toks.len() {
        return Err(ParseError {
            pos: p.here(),
            msg: "trailing input after term".to_string(),
        });
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::super::{Atom, AtomKind};
    use super::*;
    use crate::rational::rat;

    #[test]
    fn direct_translation() {
        let f = parse("exists y. y*y = 2").unwrap();
        let expected = Formula::exists(
            "y",
            Formula::Atom(Atom {
                kind: AtomKind::EqZero,
                poly: Polynomial::var("y")
                    .mul(&Polynomial::var("y"))
                    .sub(&Polynomial::constant(rat(2))),
            }),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn strict_comparisons_move_sides() {
        let f = parse("x < 0 \\/ x*x < 2").unwrap();
        let neg_x = Polynomial::var("x").neg();
        let two_minus_sq = Polynomial::constant(rat(2))
            .sub(&Polynomial::var("x").mul(&Polynomial::var("x")));
        assert_eq!(
            f,
            Formula::or(vec![
                Formula::gt_zero(neg_x),
                Formula::gt_zero(two_minus_sq)
            ])
        );
    }

    #[test]
    fn negated_atom_is_rewritten() {
        let f = parse("!(x > 0)").unwrap();
        let x = Polynomial::var("x");
        assert_eq!(
            f,
            Formula::or(vec![
                Formula::eq_zero(x.clone()),
                Formula::gt_zero(x.neg())
            ])
        );
    }

    #[test]
    fn no_not_over_atoms_anywhere() {
        let f = parse("!(x > 0 /\\ !(y = 1)) -> !(x != 2)").unwrap();
        fn check(f: &Formula) {
            match f {
                Formula::Not(inner) => {
                    assert!(!matches!(**inner, Formula::Atom(_)));
                    check(inner);
                }
                Formula::And(xs) | Formula::Or(xs) => xs.iter().for_each(check),
                Formula::Implies(a, b) | Formula::Iff(a, b) => {
                    check(a);
                    check(b);
                }
                Formula::Exists(_, b) | Formula::Forall(_, b) => check(b),
                _ => {}
            }
        }
        check(&f);
    }

    #[test]
    fn shadowed_binders_are_renamed() {
        let f = parse("exists x. x > 0 /\\ exists x. x < 0").unwrap();
        match &f {
            Formula::Exists(v1, body) => {
                assert_eq!(v1, "x");
                match &**body {
                    Formula::And(parts) => match &parts[1] {
                        Formula::Exists(v2, _) => assert_eq!(v2, "x'"),
                        other => panic!("unexpected {other:?}"),
                    },
                    other => panic!("unexpected {other:?}"),
                }
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn fraction_literals() {
        let f = parse("x = 3/4").unwrap();
        assert_eq!(
            f,
            Formula::eq_zero(
                Polynomial::var("x").sub(&Polynomial::constant(crate::rational::ratio(3, 4)))
            )
        );
        assert!(parse("x / 2 = 1").is_err());
    }

    #[test]
    fn syntax_error_carries_position() {
        let err = parse("exists . x = 0").unwrap_err();
        assert_eq!(err.pos, 7);
    }

    #[test]
    fn parenthesized_terms_and_formulas() {
        assert!(parse("(x + 1)*(x - 1) = 0").is_ok());
        assert!(parse("(x = 0 /\\ y > 1) \\/ x > 2").is_ok());
        assert!(parse("(x + 1) > 0").is_ok());
    }
}
