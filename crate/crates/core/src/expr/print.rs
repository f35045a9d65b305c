//! Infix printing. The output parses back to the same expression.

use super::poly::{Monomial, Poly};
use super::{Apply, Atom, Expr, Rational};
use num::{One, Signed};
use std::fmt::{self, Write};

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fr = self.frac();
        if fr.den.is_one() {
            return write_poly(f, &fr.num);
        }
        if fr.num.len() > 1 {
            f.write_char('(')?;
            write_poly(f, &fr.num)?;
            f.write_char(')')?;
        } else {
            write_poly(f, &fr.num)?;
        }
        f.write_char('/')?;
        let bare = fr.den.is_monomial() && {
            let (m, c) = fr.den.lead().unwrap();
            c.is_one() && m.factors().len() == 1
        };
        if bare {
            write_poly(f, &fr.den)
        } else {
            f.write_char('(')?;
            write_poly(f, &fr.den)?;
            f.write_char(')')
        }
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

fn write_rational(f: &mut fmt::Formatter<'_>, q: &Rational) -> fmt::Result {
    if q.is_integer() {
        write!(f, "{}", q.numer())
    } else {
        write!(f, "{}/{}", q.numer(), q.denom())
    }
}

fn write_poly(f: &mut fmt::Formatter<'_>, p: &Poly) -> fmt::Result {
    if p.is_zero() {
        return f.write_char('0');
    }
    for (i, (m, c)) in p.terms().rev().enumerate() {
        let neg = c.is_negative();
        match (i, neg) {
            (0, true) => f.write_char('-')?,
            (0, false) => {}
            (_, true) => f.write_str(" - ")?,
            (_, false) => f.write_str(" + ")?,
        }
        let a = c.abs();
        if m.is_one() {
            write_rational(f, &a)?;
        } else {
            if !a.is_one() {
                write_rational(f, &a)?;
                f.write_char('*')?;
            }
            write_monomial(f, m)?;
        }
    }
    Ok(())
}

fn write_monomial(f: &mut fmt::Formatter<'_>, m: &Monomial) -> fmt::Result {
    for (i, (a, e)) in m.factors().iter().enumerate() {
        if i > 0 {
            f.write_char('*')?;
        }
        write_atom(f, a)?;
        if *e > 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(())
}

fn write_atom(f: &mut fmt::Formatter<'_>, a: &Atom) -> fmt::Result {
    match a {
        Atom::Symbol(s) => f.write_str(s.as_str()),
        Atom::Elementary(k, arg) => write!(f, "{}({arg})", k.name()),
        Atom::Apply(ap) => {
            if ap.derivs.is_empty() {
                write_call(f, ap)
            } else {
                f.write_str("diff(")?;
                write_call(f, ap)?;
                for &k in &ap.derivs {
                    f.write_str(", ")?;
                    write_slot(f, ap, k)?;
                }
                f.write_char(')')
            }
        }
    }
}

fn write_call(f: &mut fmt::Formatter<'_>, ap: &Apply) -> fmt::Result {
    write!(f, "{}(", ap.name)?;
    for (i, arg) in ap.args.iter().enumerate() {
        if i > 0 {
            f.write_char(',')?;
        }
        write!(f, "{arg}")?;
    }
    f.write_char(')')
}

/// A slot prints as its coordinate name when differentiating by that name
/// reaches exactly this slot; otherwise as a 1-based slot number.
fn write_slot(f: &mut fmt::Formatter<'_>, ap: &Apply, k: usize) -> fmt::Result {
    if let Some(s) = ap.args[k].as_symbol() {
        let unique = ap.args.iter().enumerate().all(|(j, a)| j == k || !a.has_symbol(s));
        if unique {
            return f.write_str(s.as_str());
        }
    }
    write!(f, "{}", k + 1)
}
