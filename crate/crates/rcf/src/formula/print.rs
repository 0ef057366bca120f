//! Canonical text form. `parse(print(f))` returns a structurally equal
//! formula; parenthesization is chosen for correctness, not minimality.

use std::fmt;

use super::{AtomKind, Formula};

// Binding strength, loosest first. Quantifiers and negation are handled
// structurally.
#[derive(PartialEq, PartialOrd, Clone, Copy)]
enum Prec {
    Iff,
    Implies,
    Or,
    And,
    Unary,
}

fn write_at(f: &Formula, prec: Prec, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    match f {
        Formula::True => write!(out, "true"),
        Formula::False => write!(out, "false"),
        Formula::Atom(a) => {
            let rel = match a.kind {
                AtomKind::EqZero => "=",
                AtomKind::GtZero => ">",
            };
            write!(out, "{} {} 0", a.poly, rel)
        }
        Formula::Not(x) => {
            write!(out, "!")?;
            paren_unary(x, out)
        }
        Formula::And(xs) => {
            let need = prec > Prec::And;
            if need {
                write!(out, "(")?;
            }
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    write!(out, " /\\ ")?;
                }
                write_at(x, Prec::Unary, out)?;
            }
            if need {
                write!(out, ")")?;
            }
            Ok(())
        }
        Formula::Or(xs) => {
            let need = prec > Prec::Or;
            if need {
                write!(out, "(")?;
            }
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    write!(out, " \\/ ")?;
                }
                write_at(x, Prec::And, out)?;
            }
            if need {
                write!(out, ")")?;
            }
            Ok(())
        }
        Formula::Implies(a, b) => {
            let need = prec > Prec::Implies;
            if need {
                write!(out, "(")?;
            }
            write_at(a, Prec::Or, out)?;
            write!(out, " -> ")?;
            write_at(b, Prec::Implies, out)?;
            if need {
                write!(out, ")")?;
            }
            Ok(())
        }
        Formula::Iff(a, b) => {
            let need = prec > Prec::Iff;
            if need {
                write!(out, "(")?;
            }
            write_at(a, Prec::Implies, out)?;
            write!(out, " <-> ")?;
            write_at(b, Prec::Iff, out)?;
            if need {
                write!(out, ")")?;
            }
            Ok(())
        }
        Formula::Exists(v, body) | Formula::Forall(v, body) => {
            let q = if matches!(f, Formula::Exists(..)) {
                "exists"
            } else {
                "forall"
            };
            // the body extends maximally to the right, so a quantifier in
            // any operand position needs parentheses
            let need = prec > Prec::Iff;
            if need {
                write!(out, "(")?;
            }
            write!(out, "{q} {v}. ")?;
            write_at(body, Prec::Iff, out)?;
            if need {
                write!(out, ")")?;
            }
            Ok(())
        }
    }
}

fn paren_unary(f: &Formula, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    match f {
        Formula::True | Formula::False | Formula::Not(_) => write_at(f, Prec::Unary, out),
        _ => {
            write!(out, "(")?;
            write_at(f, Prec::Iff, out)?;
            write!(out, ")")
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_at(self, Prec::Iff, out)
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use crate::formula::Formula;
    use crate::poly::Polynomial;
    use crate::rational::rat;

    fn round_trip(text: &str) {
        let f = parse(text).unwrap();
        let printed = f.to_string();
        let g = parse(&printed).unwrap_or_else(|e| panic!("reparse of `{printed}`: {e}"));
        assert_eq!(f, g, "round trip failed for `{text}` -> `{printed}`");
    }

    #[test]
    fn canonical_surface_forms() {
        assert_eq!(Formula::True.to_string(), "true");
        let atom = Formula::gt_zero(
            Polynomial::constant(rat(2)).sub(&Polynomial::var("x").pow(2)),
        );
        assert_eq!(atom.to_string(), "2 - x^2 > 0");
    }

    #[test]
    fn round_trips() {
        round_trip("exists y. y*y = 2");
        round_trip("x < 0 \\/ x*x < 2");
        round_trip("!(x > 0 /\\ y = 1) -> (x != 2 <-> y <= 0)");
        round_trip("forall x. (exists y. y*y = x) \\/ x < 0");
        round_trip("x*x*y - 1/2*y + 3 > 0");
    }
}
