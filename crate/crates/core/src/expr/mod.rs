//! Symbolic expression kernel.
//!
//! An [`Expr`] is stored in canonical form: a quotient of two sparse polynomials
//! with rational coefficients over *atoms* (symbols, applied undefined functions
//! and their partial derivatives, elementary function applications). Numerator
//! and denominator are coprime and the denominator is monic, so structural
//! equality decides equality on the rational-function fragment. Elementary
//! functions are only simplified through a fixed rewrite list
//! (`sin² + cos² = 1`, `tanh² = 1 - sech²`, evaluation at `0`, `ln(1) = 0`).

mod calculus;
mod collect;
mod eval;
mod gcd;
mod parse;
mod poly;
mod print;
mod subst;
mod zero;

pub use collect::{coefficient, collect, CollectError, VarMonomial};
pub use eval::{eval_numeric, EvalError, FunctionTable, NumericFn, NumericPoint};
pub use parse::{parse, parse_with_genericity, ParseError};
pub use poly::{Monomial, Poly};
pub use subst::{substitute, Bindings, FunctionBinding, SubstError};
pub use zero::{default_probe_config, set_default_probe_config, zero_status, zero_status_with, ProbeConfig, ZeroStatus};

use num::{BigInt, One, Signed, Zero};
use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

pub type Rational = num::BigRational;

/// Interned-by-`Arc` identifier for coordinates, parameters and function names.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Elementary {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Tanh,
    Sech,
}

impl Elementary {
    pub const ALL: [Elementary; 7] = [
        Elementary::Sin,
        Elementary::Cos,
        Elementary::Tan,
        Elementary::Exp,
        Elementary::Ln,
        Elementary::Tanh,
        Elementary::Sech,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Elementary::Sin => "sin",
            Elementary::Cos => "cos",
            Elementary::Tan => "tan",
            Elementary::Exp => "exp",
            Elementary::Ln => "ln",
            Elementary::Tanh => "tanh",
            Elementary::Sech => "sech",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    pub fn apply_f64(self, x: f64) -> f64 {
        match self {
            Elementary::Sin => x.sin(),
            Elementary::Cos => x.cos(),
            Elementary::Tan => x.tan(),
            Elementary::Exp => x.exp(),
            Elementary::Ln => x.ln(),
            Elementary::Tanh => x.tanh(),
            Elementary::Sech => 1.0 / x.cosh(),
        }
    }
}

/// Names that look like elementary functions but are outside the supported set.
/// The parser rejects them rather than treating them as undefined functions.
pub(crate) const UNSUPPORTED_ELEMENTARY: &[&str] = &[
    "sqrt", "log", "log2", "log10", "sinh", "cosh", "coth", "csch", "sec", "csc", "cot", "asin",
    "acos", "atan", "arcsin", "arccos", "arctan", "asinh", "acosh", "atanh", "abs", "erf", "gamma",
];

/// Application of an undefined function, possibly differentiated.
///
/// `derivs` is the sorted multi-index of argument slots the function is
/// differentiated by, so mixed partials commute structurally.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Apply {
    pub name: Symbol,
    pub args: Vec<Expr>,
    pub derivs: Vec<usize>,
}

impl Apply {
    pub fn order(&self) -> usize {
        self.derivs.len()
    }
}

/// Indivisible polynomial variable. The variant order is the canonical kind order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Atom {
    Symbol(Symbol),
    Apply(Apply),
    Elementary(Elementary, Expr),
}

impl Atom {
    fn visit_symbols(&self, out: &mut BTreeSet<Symbol>) {
        match self {
            Atom::Symbol(s) => {
                out.insert(s.clone());
            }
            Atom::Apply(ap) => ap.args.iter().for_each(|a| a.visit_symbols(out)),
            Atom::Elementary(_, arg) => arg.visit_symbols(out),
        }
    }

    fn has_symbol(&self, v: &Symbol) -> bool {
        match self {
            Atom::Symbol(s) => s == v,
            Atom::Apply(ap) => ap.args.iter().any(|a| a.has_symbol(v)),
            Atom::Elementary(_, arg) => arg.has_symbol(v),
        }
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub(crate) struct Frac {
    pub(crate) num: Poly,
    pub(crate) den: Poly,
}

impl Frac {
    fn zero() -> Frac {
        Frac { num: Poly::zero(), den: Poly::one() }
    }

    fn from_poly(num: Poly) -> Frac {
        let num = num.reduce_elementary().unwrap_or(num);
        Frac { num, den: Poly::one() }
    }

    /// Canonicalize an arbitrary quotient.
    fn new(num: Poly, den: Poly) -> Frac {
        assert!(!den.is_zero(), "zero denominator");
        let mut num = num.reduce_elementary().unwrap_or(num);
        let mut den = den.reduce_elementary().unwrap_or(den);
        // Denominators are kept free of cos and tanh by multiplying with the
        // conjugate, which makes the representation unique.
        while let Some(a) = den.quadratic_atom() {
            let conj = den.conjugate(&a);
            num = num.mul(&conj);
            num = num.reduce_elementary().unwrap_or(num);
            den = den.mul(&conj);
            den = den.reduce_elementary().unwrap_or(den);
            assert!(!den.is_zero(), "denominator vanishes identically");
        }
        assert!(!den.is_zero(), "denominator vanishes identically");
        if num.is_zero() {
            return Frac::zero();
        }
        if let Some(k) = den.constant_value() {
            return Frac { num: num.scale(&(Rational::one() / k)), den: Poly::one() };
        }
        let g = gcd::gcd(&num, &den);
        if !g.is_constant() {
            num = num.exact_div(&g).expect("gcd divides numerator");
            den = den.exact_div(&g).expect("gcd divides denominator");
        }
        Frac::monic(num, den)
    }

    fn monic(num: Poly, den: Poly) -> Frac {
        if let Some(k) = den.constant_value() {
            return Frac { num: num.scale(&(Rational::one() / k)), den: Poly::one() };
        }
        let lc = den.lead().map(|(_, c)| c.clone()).unwrap();
        if lc.is_one() {
            Frac { num, den }
        } else {
            let inv = Rational::one() / lc;
            Frac { num: num.scale(&inv), den: den.scale(&inv) }
        }
    }

    fn add(&self, other: &Frac) -> Frac {
        if self.num.is_zero() {
            return other.clone();
        }
        if other.num.is_zero() {
            return self.clone();
        }
        if self.den.is_one() && other.den.is_one() {
            return Frac { num: self.num.add(&other.num), den: Poly::one() };
        }
        if self.den == other.den {
            return Frac::new(self.num.add(&other.num), self.den.clone());
        }
        if self.den.is_one() || other.den.is_one() {
            let (p, q) = if self.den.is_one() { (self, other) } else { (other, self) };
            // gcd(p·d + n, d) = gcd(n, d) = 1, so only the leading coefficient needs fixing.
            let num = p.num.mul(&q.den).add(&q.num);
            return match num.reduce_elementary() {
                Some(r) => Frac::new(r, q.den.clone()),
                None => Frac::monic(num, q.den.clone()),
            };
        }
        let g = gcd::gcd(&self.den, &other.den);
        let (ad, bd) = if g.is_constant() {
            (self.den.clone(), other.den.clone())
        } else {
            (self.den.exact_div(&g).unwrap(), other.den.exact_div(&g).unwrap())
        };
        let num = self.num.mul(&bd).add(&other.num.mul(&ad));
        let den = self.den.mul(&bd);
        if num.is_zero() {
            return Frac::zero();
        }
        if num.reduce_elementary().is_some() {
            return Frac::new(num, den);
        }
        // Both inputs are reduced, so a common factor of num and den divides g.
        if g.is_constant() {
            return Frac::monic(num, den);
        }
        let h = gcd::gcd(&num, &g);
        if h.is_constant() {
            Frac::monic(num, den)
        } else {
            Frac::monic(num.exact_div(&h).unwrap(), den.exact_div(&h).unwrap())
        }
    }

    fn neg(&self) -> Frac {
        Frac { num: self.num.neg(), den: self.den.clone() }
    }

    fn mul(&self, other: &Frac) -> Frac {
        if self.num.is_zero() || other.num.is_zero() {
            return Frac::zero();
        }
        if self.den.is_one() && other.den.is_one() {
            return Frac::from_poly(self.num.mul(&other.num));
        }
        let cancel = |n: &Poly, d: &Poly| -> (Poly, Poly) {
            if d.is_one() || n.is_constant() {
                return (n.clone(), d.clone());
            }
            let g = gcd::gcd(n, d);
            if g.is_constant() {
                (n.clone(), d.clone())
            } else {
                (n.exact_div(&g).unwrap(), d.exact_div(&g).unwrap())
            }
        };
        let (n1, d2) = cancel(&self.num, &other.den);
        let (n2, d1) = cancel(&other.num, &self.den);
        let num = n1.mul(&n2);
        let den = d1.mul(&d2);
        if num.reduce_elementary().is_some() || den.reduce_elementary().is_some() {
            return Frac::new(num, den);
        }
        Frac::monic(num, den)
    }

    fn recip(&self) -> Frac {
        assert!(!self.num.is_zero(), "division by zero expression");
        if self.num.quadratic_atom().is_some() {
            return Frac::new(self.den.clone(), self.num.clone());
        }
        Frac::monic(self.den.clone(), self.num.clone())
    }
}

/// Immutable symbolic expression in canonical rational-function form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Expr(Arc<Frac>);

/// Read-only tree view of an [`Expr`], in canonical child order.
#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Number(Rational),
    Symbol(Symbol),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Power(Expr, i64),
    Quotient(Expr, Expr),
    Apply(Symbol, Vec<Expr>),
    Derivative(Symbol, Vec<Expr>, Vec<usize>),
    Elementary(Elementary, Expr),
}

impl Expr {
    pub(crate) fn from_frac(f: Frac) -> Expr {
        Expr(Arc::new(f))
    }

    pub(crate) fn frac(&self) -> &Frac {
        &self.0
    }

    pub fn from_poly(p: Poly) -> Expr {
        Expr::from_frac(Frac::from_poly(p))
    }

    pub fn zero() -> Expr {
        Expr::from_frac(Frac::zero())
    }

    pub fn one() -> Expr {
        Expr::integer(1)
    }

    pub fn integer(n: i64) -> Expr {
        Expr::rational(Rational::from_integer(BigInt::from(n)))
    }

    pub fn rational(q: Rational) -> Expr {
        Expr::from_poly(Poly::constant(q))
    }

    pub fn ratio(n: i64, d: i64) -> Expr {
        Expr::rational(Rational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn symbol(name: &str) -> Expr {
        Expr::atom(Atom::Symbol(Symbol::new(name)))
    }

    pub fn sym(s: &Symbol) -> Expr {
        Expr::atom(Atom::Symbol(s.clone()))
    }

    pub fn atom(a: Atom) -> Expr {
        Expr::from_poly(Poly::from_atom(a))
    }

    /// `name(args)`, an undefined function application.
    pub fn apply(name: &str, args: Vec<Expr>) -> Expr {
        Expr::derivative(&Symbol::new(name), args, Vec::new())
    }

    /// Partial derivative of `name(args)` by the given argument slots.
    pub fn derivative(name: &Symbol, args: Vec<Expr>, mut derivs: Vec<usize>) -> Expr {
        assert!(derivs.iter().all(|&k| k < args.len()), "derivative slot out of range");
        derivs.sort_unstable();
        Expr::atom(Atom::Apply(Apply { name: name.clone(), args, derivs }))
    }

    /// Apply an undefined function to coordinate symbols.
    pub fn apply_symbols(name: &str, args: &[&str]) -> Expr {
        Expr::apply(name, args.iter().map(|a| Expr::symbol(a)).collect())
    }

    pub fn elementary(kind: Elementary, arg: Expr) -> Expr {
        if arg.is_zero() {
            return match kind {
                Elementary::Sin | Elementary::Tan | Elementary::Tanh => Expr::zero(),
                Elementary::Cos | Elementary::Exp | Elementary::Sech => Expr::one(),
                Elementary::Ln => panic!("ln(0) is undefined"),
            };
        }
        if kind == Elementary::Ln && arg.is_one() {
            return Expr::zero();
        }
        Expr::atom(Atom::Elementary(kind, arg))
    }

    pub fn is_zero(&self) -> bool {
        self.0.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.den.is_one() && self.0.num.is_one()
    }

    /// The value of a rational constant.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.0.den.is_one() {
            self.0.num.constant_value()
        } else {
            None
        }
    }

    pub fn as_integer(&self) -> Option<i64> {
        use num::ToPrimitive;
        let q = self.as_rational()?;
        if q.is_integer() {
            q.to_integer().to_i64()
        } else {
            None
        }
    }

    /// The atom if `self` is exactly one atom with coefficient and exponent 1.
    pub fn as_atom(&self) -> Option<&Atom> {
        if !self.0.den.is_one() || !self.0.num.is_monomial() {
            return None;
        }
        let (m, c) = self.0.num.lead()?;
        match m.factors() {
            [(a, 1)] if c.is_one() => Some(a),
            _ => None,
        }
    }

    pub fn as_symbol(&self) -> Option<&Symbol> {
        match self.as_atom()? {
            Atom::Symbol(s) => Some(s),
            _ => None,
        }
    }

    pub fn numerator(&self) -> Expr {
        Expr::from_frac(Frac { num: self.0.num.clone(), den: Poly::one() })
    }

    pub fn denominator(&self) -> Expr {
        Expr::from_frac(Frac { num: self.0.den.clone(), den: Poly::one() })
    }

    pub fn is_polynomial(&self) -> bool {
        self.0.den.is_one()
    }

    /// Number of polynomial terms in numerator plus denominator.
    pub fn size(&self) -> usize {
        self.0.num.len() + if self.0.den.is_one() { 0 } else { self.0.den.len() }
    }

    pub fn pow(&self, e: i64) -> Expr {
        if e == 0 {
            return Expr::one();
        }
        let f = if e < 0 { self.0.recip() } else { (*self.0).clone() };
        let n = e.unsigned_abs() as u32;
        if f.den.is_one() {
            return Expr::from_poly(f.num.pow(n));
        }
        // numerator and denominator stay coprime under powers
        let num = f.num.pow(n);
        let den = f.den.pow(n);
        if num.reduce_elementary().is_some() || den.reduce_elementary().is_some() {
            Expr::from_frac(Frac::new(num, den))
        } else {
            Expr::from_frac(Frac::monic(num, den))
        }
    }

    pub fn recip(&self) -> Expr {
        Expr::from_frac(self.0.recip())
    }

    /// Division that fails instead of panicking on a zero divisor.
    pub fn checked_div(&self, rhs: &Expr) -> Option<Expr> {
        if rhs.is_zero() {
            None
        } else {
            Some(self * &rhs.recip())
        }
    }

    /// Atoms occurring at the top level of numerator or denominator.
    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut s = self.0.num.atoms();
        s.extend(self.0.den.atoms());
        s
    }

    fn for_each_atom(&self, f: &mut impl FnMut(&Atom)) {
        for p in [&self.0.num, &self.0.den] {
            for (m, _) in p.terms() {
                for (a, _) in m.factors() {
                    f(a);
                }
            }
        }
    }

    fn visit_symbols(&self, out: &mut BTreeSet<Symbol>) {
        self.for_each_atom(&mut |a| a.visit_symbols(out));
    }

    /// Every symbol occurring anywhere, including inside function arguments.
    pub fn free_symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.visit_symbols(&mut out);
        out
    }

    pub fn has_symbol(&self, v: &Symbol) -> bool {
        let mut found = false;
        self.for_each_atom(&mut |a| found = found || a.has_symbol(v));
        found
    }

    /// Every undefined-function application (and derivative) at any depth.
    pub fn applications(&self) -> Vec<Apply> {
        fn walk(e: &Expr, out: &mut BTreeSet<Apply>) {
            e.for_each_atom(&mut |a| match a {
                Atom::Symbol(_) => {}
                Atom::Apply(ap) => {
                    if out.insert(ap.clone()) {
                        ap.args.iter().for_each(|x| walk(x, out));
                    }
                }
                Atom::Elementary(_, arg) => walk(arg, out),
            });
        }
        let mut out = BTreeSet::new();
        walk(self, &mut out);
        out.into_iter().collect()
    }

    /// Names of undefined functions applied anywhere in the expression.
    pub fn function_names(&self) -> BTreeSet<Symbol> {
        self.applications().into_iter().map(|a| a.name).collect()
    }

    pub fn has_elementary(&self) -> bool {
        let mut found = false;
        self.for_each_atom(&mut |a| match a {
            Atom::Elementary(..) => found = true,
            Atom::Apply(ap) => found = found || ap.args.iter().any(Expr::has_elementary),
            Atom::Symbol(_) => {}
        });
        found
    }

    /// True when only symbols occur (the exactly decidable rational fragment).
    pub fn is_rational_function(&self) -> bool {
        let mut ok = true;
        self.for_each_atom(&mut |a| ok = ok && matches!(a, Atom::Symbol(_)));
        ok
    }

    /// Identity on canonical expressions; kept for the explicit normalization step
    /// callers rely on when comparing results.
    pub fn normalize(&self) -> Expr {
        self.clone()
    }

    pub fn node(&self) -> Node {
        let f = &self.0;
        if !f.den.is_one() {
            return Node::Quotient(self.numerator(), self.denominator());
        }
        if f.num.is_zero() {
            return Node::Number(Rational::zero());
        }
        if f.num.len() > 1 {
            return Node::Sum(
                f.num.terms().rev().map(|(m, c)| Expr::from_poly(Poly::term(m.clone(), c.clone()))).collect(),
            );
        }
        let (m, c) = f.num.lead().unwrap();
        if m.is_one() {
            return Node::Number(c.clone());
        }
        let mut factors = Vec::new();
        if !c.is_one() {
            factors.push(Expr::rational(c.clone()));
        }
        for (a, e) in m.factors() {
            factors.push(if *e == 1 {
                Expr::atom(a.clone())
            } else {
                Expr::atom(a.clone()).pow(*e as i64)
            });
        }
        if factors.len() > 1 {
            return Node::Product(factors);
        }
        let (a, e) = &m.factors()[0];
        if *e > 1 {
            return Node::Power(Expr::atom(a.clone()), *e as i64);
        }
        match a {
            Atom::Symbol(s) => Node::Symbol(s.clone()),
            Atom::Apply(ap) if ap.derivs.is_empty() => Node::Apply(ap.name.clone(), ap.args.clone()),
            Atom::Apply(ap) => Node::Derivative(ap.name.clone(), ap.args.clone(), ap.derivs.clone()),
            Atom::Elementary(k, arg) => Node::Elementary(*k, arg.clone()),
        }
    }

    /// Sign of the leading coefficient, used to pick representatives up to sign.
    pub fn leading_sign(&self) -> i32 {
        match self.0.num.lead() {
            None => 0,
            Some((_, c)) if c.is_negative() => -1,
            Some(_) => 1,
        }
    }

    /// Scale so that the leading numerator coefficient is 1 (zero stays zero).
    pub fn monic(&self) -> Expr {
        match self.0.num.lead() {
            None => self.clone(),
            Some((_, c)) => self * &Expr::rational(Rational::one() / c),
        }
    }
}

impl Default for Expr {
    fn default() -> Self {
        Expr::zero()
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::integer(n)
    }
}

impl From<Rational> for Expr {
    fn from(q: Rational) -> Self {
        Expr::rational(q)
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl $tr<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(self, rhs)
            }
        }
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                (&self).$method(rhs)
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| Expr::from_frac(a.0.add(&b.0)));
binop!(Sub, sub, |a, b| Expr::from_frac(a.0.add(&b.0.neg())));
binop!(Mul, mul, |a, b| Expr::from_frac(a.0.mul(&b.0)));
binop!(Div, div, |a, b| Expr::from_frac(a.0.mul(&b.0.recip())));

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::from_frac(self.0.neg())
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        iter.fold(Expr::zero(), |a, b| a + b)
    }
}

impl std::iter::Product for Expr {
    fn product<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        iter.fold(Expr::one(), |a, b| a * b)
    }
}

/// Expressions assumed nonzero while cancelling or pivoting.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Genericity(BTreeSet<Expr>);

impl Genericity {
    pub fn new() -> Self {
        Genericity::default()
    }

    /// Record `e ≠ 0`. Constants are dropped and conditions are kept monic.
    pub fn assume_nonzero(&mut self, e: &Expr) {
        for part in [e.numerator(), e.denominator()] {
            if part.as_rational().is_none() {
                self.0.insert(part.monic());
            }
        }
    }

    pub fn extend(&mut self, other: &Genericity) {
        self.0.extend(other.0.iter().cloned());
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Expr> {
        self.0.iter()
    }

    pub fn contains(&self, e: &Expr) -> bool {
        self.0.contains(&e.monic())
    }
}
