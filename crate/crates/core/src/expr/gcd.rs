//! Multivariate polynomial gcd over the rationals.
//!
//! Recursive primitive PRS: pick a shared atom as main variable, split off
//! contents (gcds of the coefficient polynomials, computed recursively) and run
//! pseudo-remainder sequences on the primitive parts.

use super::poly::Poly;
use super::{Atom, Rational};
use num::{One, Zero};
use std::collections::HashMap;

/// A greatest common divisor of `a` and `b`, determined up to a rational unit.
pub(crate) fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a == b {
        return a.clone();
    }
    let ma = a.monomial_content();
    let mb = b.monomial_content();
    let gm = ma.gcd(&mb);
    let a = if ma.is_one() { a.clone() } else { a.div_monomial(&ma) };
    let b = if mb.is_one() { b.clone() } else { b.div_monomial(&mb) };
    let core = gcd_no_monomial_content(&a, &b);
    core.mul_term(&gm, &Rational::one())
}

fn gcd_no_monomial_content(a: &Poly, b: &Poly) -> Poly {
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a.is_monomial() || b.is_monomial() {
        // a monomial whose content was removed is a constant
        return Poly::one();
    }
    if a == b {
        return a.clone();
    }
    let atoms_a = a.atoms();
    let atoms_b = b.atoms();
    let main = atoms_a
        .intersection(&atoms_b)
        .min_by_key(|v| a.degree_in(v).max(b.degree_in(v)));
    let Some(main) = main.cloned() else {
        return Poly::one();
    };
    if coprime_by_evaluation(a, b, &atoms_a.intersection(&atoms_b).cloned().collect::<Vec<_>>()) {
        return Poly::one();
    }
    // Any factor must contain only atoms common to both; atoms private to one side
    // enter only through the contents.
    let ua = a.to_univariate(&main);
    let ub = b.to_univariate(&main);
    let ca = content(&ua);
    let cb = content(&ub);
    let pa = divide_coeffs(&ua, &ca);
    let pb = divide_coeffs(&ub, &cb);
    let c = gcd(&ca, &cb);
    let g = primitive_prs(pa, pb);
    c.mul(&Poly::from_univariate(&main, &g))
}

/// Sound coprimality test: if, for every shared atom `x`, the images of `a`
/// and `b` at a point in the other atoms keep their `x`-degrees and have a
/// constant gcd, no common factor can involve `x`. `false` means unknown.
fn coprime_by_evaluation(a: &Poly, b: &Poly, shared: &[Atom]) -> bool {
    const VALUES: [i64; 12] = [3, -5, 7, 11, -13, 17, 19, -23, 29, 31, -37, 41];
    let atoms: Vec<Atom> = a.atoms().union(&b.atoms()).cloned().collect();
    for (k, main) in shared.iter().enumerate() {
        let point: HashMap<&Atom, Rational> = atoms
            .iter()
            .enumerate()
            .filter(|(_, v)| *v != main)
            .map(|(i, v)| (v, Rational::from_integer(VALUES[(i + k) % VALUES.len()].into())))
            .collect();
        let ia: Vec<Rational> = a.to_univariate(main).iter().map(|c| eval(c, &point)).collect();
        let ib: Vec<Rational> = b.to_univariate(main).iter().map(|c| eval(c, &point)).collect();
        if ia.last().is_none_or(Zero::is_zero) || ib.last().is_none_or(Zero::is_zero) {
            return false;
        }
        if univariate_gcd_degree(ia, ib) > 0 {
            return false;
        }
    }
    true
}

fn eval(p: &Poly, point: &HashMap<&Atom, Rational>) -> Rational {
    let mut acc = Rational::zero();
    for (m, c) in p.terms() {
        let mut t = c.clone();
        for (atom, e) in m.factors() {
            t *= num::pow(point[atom].clone(), *e as usize);
        }
        acc += t;
    }
    acc
}

fn univariate_gcd_degree(mut a: Vec<Rational>, mut b: Vec<Rational>) -> usize {
    let strip = |v: &mut Vec<Rational>| {
        while v.last().is_some_and(Zero::is_zero) {
            v.pop();
        }
    };
    strip(&mut a);
    strip(&mut b);
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        // a <- a mod b
        let lb = b.last().unwrap().clone();
        while a.len() >= b.len() {
            let q = a.last().unwrap().clone() / &lb;
            let shift = a.len() - b.len();
            for (j, bj) in b.iter().enumerate() {
                a[j + shift] -= &q * bj;
            }
            a.pop();
            strip(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

fn content(u: &[Poly]) -> Poly {
    let mut nonzero = u.iter().filter(|c| !c.is_zero());
    let Some(first) = nonzero.next() else {
        return Poly::zero();
    };
    let mut g = first.clone();
    for c in nonzero {
        if g.is_constant() {
            return Poly::one();
        }
        g = gcd(&g, c);
    }
    if g.is_constant() {
        Poly::one()
    } else {
        g
    }
}

fn divide_coeffs(u: &[Poly], c: &Poly) -> Vec<Poly> {
    if c.is_one() {
        return u.to_vec();
    }
    u.iter()
        .map(|p| p.exact_div(c).expect("content divides every coefficient"))
        .collect()
}

fn trim(u: &mut Vec<Poly>) {
    while u.len() > 1 && u.last().is_some_and(Poly::is_zero) {
        u.pop();
    }
}

fn degree(u: &[Poly]) -> Option<usize> {
    u.iter().rposition(|c| !c.is_zero())
}

/// Primitive part with a normalized leading rational, to keep coefficients small.
fn primitive(u: &[Poly]) -> Vec<Poly> {
    let c = content(u);
    let mut p = divide_coeffs(u, &c);
    trim(&mut p);
    if let Some(d) = degree(&p) {
        let lc = p[d].lead().map(|(_, k)| k.clone()).unwrap_or_else(Rational::one);
        if !lc.is_one() {
            let inv = Rational::one() / lc;
            p = p.iter().map(|q| q.scale(&inv)).collect();
        }
    }
    p
}

fn pseudo_remainder(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    let db = degree(b).expect("nonzero divisor");
    let lcb = &b[db];
    let mut r = a.to_vec();
    trim(&mut r);
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let lcr = r[dr].clone();
        let shift = dr - db;
        for c in r.iter_mut() {
            *c = c.mul(lcb);
        }
        for (j, bj) in b.iter().enumerate().take(db + 1) {
            r[j + shift] = r[j + shift].sub(&lcr.mul(bj));
        }
        debug_assert!(r[dr].is_zero());
        r.truncate(dr);
        if r.is_empty() {
            r.push(Poly::zero());
        }
        trim(&mut r);
    }
    r
}

fn primitive_prs(a: Vec<Poly>, b: Vec<Poly>) -> Vec<Poly> {
    let (mut a, mut b) = if degree(&a) >= degree(&b) { (a, b) } else { (b, a) };
    a = primitive(&a);
    b = primitive(&b);
    loop {
        match degree(&b) {
            None => return a,
            Some(0) => return vec![Poly::one()],
            Some(_) => {}
        }
        let r = pseudo_remainder(&a, &b);
        if degree(&r).is_none() {
            return b;
        }
        a = b;
        b = primitive(&r);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;

    fn poly(src: &str) -> Poly {
        let e: Expr = src.parse().unwrap();
        assert!(e.denominator().is_one());
        e.frac().num.clone()
    }

    fn assert_assoc(g: &Poly, expected: &Poly) {
        let ratio_num = g.exact_div(expected);
        let ratio_den = expected.exact_div(g);
        assert!(
            ratio_num.as_ref().is_some_and(Poly::is_constant) && ratio_den.is_some(),
            "gcd {g:?} is not associate to {expected:?}"
        );
    }

    #[test]
    fn univariate_common_factor() {
        let g = gcd(&poly("x^2 - 1"), &poly("x^2 + 2*x + 1"));
        assert_assoc(&g, &poly("x + 1"));
    }

    #[test]
    fn multivariate_common_factor() {
        let a = poly("(x + y)*(x - 2*z)*(p + 1)");
        let b = poly("(x + y)*(p + 1)^2*(y - z)");
        assert_assoc(&gcd(&a, &b), &poly("(x + y)*(p + 1)"));
    }

    #[test]
    fn coprime_gives_unit() {
        assert!(gcd(&poly("x^2 + y"), &poly("x + y^2")).is_constant());
    }

    #[test]
    fn evaluation_test_is_conservative() {
        let shared = |a: &Poly, b: &Poly| a.atoms().intersection(&b.atoms()).cloned().collect::<Vec<_>>();
        let (a, b) = (poly("x^2*y + z"), poly("x*y - z^2 + 1"));
        assert!(coprime_by_evaluation(&a, &b, &shared(&a, &b)));
        let (a, b) = (poly("(x + y)*(x - z)"), poly("(x + y)*(y + 2)"));
        assert!(!coprime_by_evaluation(&a, &b, &shared(&a, &b)));
        let ints = |v: &[i64]| v.iter().map(|&k| Rational::from_integer(k.into())).collect::<Vec<_>>();
        assert_eq!(univariate_gcd_degree(ints(&[-1, 0, 1]), ints(&[1, 1])), 1);
        assert_eq!(univariate_gcd_degree(ints(&[1, 0, 1]), ints(&[1, 1])), 0);
    }

    #[test]
    fn monomial_contents() {
        let g = gcd(&poly("p^2*q + p^3"), &poly("p*q^2 + p^2*q"));
        assert_assoc(&g, &poly("p*q + p^2"));
    }
}
