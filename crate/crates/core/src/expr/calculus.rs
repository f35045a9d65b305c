//! Partial differentiation.

use super::poly::{Monomial, Poly};
use super::{Atom, Elementary, Expr, Rational, Symbol};
use num::BigInt;
use std::collections::HashMap;

impl Expr {
    /// Partial derivative with respect to a symbol, by the chain rule through
    /// function arguments and elementary functions.
    pub fn diff(&self, v: &Symbol) -> Expr {
        if !self.has_symbol(v) {
            return Expr::zero();
        }
        let mut cache = HashMap::new();
        let fr = self.frac();
        let dn = diff_poly(&fr.num, v, &mut cache);
        if fr.den.is_one() {
            return dn;
        }
        let dd = diff_poly(&fr.den, v, &mut cache);
        let num = Expr::from_poly(fr.num.clone());
        let den = Expr::from_poly(fr.den.clone());
        (dn * &den - num * dd) / (&den * &den)
    }

    /// Repeated partial derivative, applied left to right.
    pub fn diff_many(&self, vars: &[Symbol]) -> Expr {
        vars.iter().fold(self.clone(), |e, v| e.diff(v))
    }

    /// Differentiate an undefined-function atom by argument slot `k`.
    /// Fails when `self` is not a single function application.
    pub fn diff_slot(&self, k: usize) -> Option<Expr> {
        match self.as_atom()? {
            Atom::Apply(ap) if k < ap.args.len() => {
                let mut derivs = ap.derivs.clone();
                derivs.push(k);
                Some(Expr::derivative(&ap.name, ap.args.clone(), derivs))
            }
            _ => None,
        }
    }
}

/// `∂p/∂a` for a polynomial variable `a`.
pub(crate) fn partial_poly(p: &Poly, a: &Atom) -> Poly {
    let mut out = Poly::zero();
    for (m, c) in p.terms() {
        let (e, rest) = m.split(a);
        if e == 0 {
            continue;
        }
        let m2 = rest.mul(&Monomial::atom(a.clone(), e - 1));
        out.add_term(m2, c * Rational::from_integer(BigInt::from(e)));
    }
    out
}

fn diff_poly(p: &Poly, v: &Symbol, cache: &mut HashMap<Atom, Expr>) -> Expr {
    let mut acc = Expr::zero();
    for a in p.atoms() {
        let da = match cache.get(&a) {
            Some(d) => d.clone(),
            None => {
                let d = diff_atom(&a, v);
                cache.insert(a.clone(), d.clone());
                d
            }
        };
        if da.is_zero() {
            continue;
        }
        acc = acc + Expr::from_poly(partial_poly(p, &a)) * da;
    }
    acc
}

fn diff_atom(a: &Atom, v: &Symbol) -> Expr {
    match a {
        Atom::Symbol(s) => {
            if s == v {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Atom::Apply(ap) => {
            let mut acc = Expr::zero();
            for (k, arg) in ap.args.iter().enumerate() {
                let da = arg.diff(v);
                if da.is_zero() {
                    continue;
                }
                let mut derivs = ap.derivs.clone();
                derivs.push(k);
                acc = acc + Expr::derivative(&ap.name, ap.args.clone(), derivs) * da;
            }
            acc
        }
        Atom::Elementary(kind, arg) => {
            let da = arg.diff(v);
            if da.is_zero() {
                return da;
            }
            let el = |k| Expr::elementary(k, arg.clone());
            let outer = match kind {
                Elementary::Sin => el(Elementary::Cos),
                Elementary::Cos => -el(Elementary::Sin),
                Elementary::Tan => Expr::one() + el(Elementary::Tan).pow(2),
                Elementary::Exp => el(Elementary::Exp),
                Elementary::Ln => arg.recip(),
                Elementary::Tanh => el(Elementary::Sech).pow(2),
                Elementary::Sech => -(el(Elementary::Sech) * el(Elementary::Tanh)),
            };
            outer * da
        }
    }
}
