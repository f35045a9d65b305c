//! Sparse multivariate polynomials with rational coefficients over [`Atom`]s.

use super::{Atom, Elementary, Rational};
use num::{One, Zero};
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

/// Power product of atoms, kept sorted by atom with strictly positive exponents.
///
/// The ordering is lexicographic with the *smallest* atom most significant,
/// which makes it a monomial order (compatible with multiplication). The
/// leading term of a [`Poly`] is therefore its last map entry.
#[derive(Clone, PartialEq, Eq, Hash, Default, Debug)]
pub struct Monomial(Vec<(Atom, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn atom(atom: Atom, exp: u32) -> Self {
        if exp == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(atom, exp)])
        }
    }

    pub(crate) fn from_sorted(factors: Vec<(Atom, u32)>) -> Self {
        debug_assert!(factors.windows(2).all(|w| w[0].0 < w[1].0));
        Monomial(factors)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Atom, u32)] {
        &self.0
    }

    pub fn degree_of(&self, atom: &Atom) -> u32 {
        match self.0.binary_search_by(|(a, _)| a.cmp(atom)) {
            Ok(i) => self.0[i].1,
            Err(_) => 0,
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0.clone(), a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for (atom, e) in &self.0 {
            if j < other.0.len() && other.0[j].0 < *atom {
                return None;
            }
            if j < other.0.len() && other.0[j].0 == *atom {
                let f = other.0[j].1;
                j += 1;
                match e.cmp(&f) {
                    Ordering::Less => return None,
                    Ordering::Equal => {}
                    Ordering::Greater => out.push((atom.clone(), e - f)),
                }
            } else {
                out.push((atom.clone(), *e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::new();
        for (atom, e) in &self.0 {
            let f = other.degree_of(atom);
            if f > 0 {
                out.push((atom.clone(), (*e).min(f)));
            }
        }
        Monomial(out)
    }

    /// Split off the exponent of `atom`.
    pub fn split(&self, atom: &Atom) -> (u32, Monomial) {
        match self.0.binary_search_by(|(a, _)| a.cmp(atom)) {
            Ok(i) => {
                let mut rest = self.0.clone();
                let (_, e) = rest.remove(i);
                (e, Monomial(rest))
            }
            Err(_) => (0, self.clone()),
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        loop {
            match (a.get(i), b.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((x, ex)), Some((y, ey))) => match x.cmp(y) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => match ex.cmp(ey) {
                        Ordering::Equal => {
                            i += 1;
                            j += 1;
                        }
                        ord => return ord,
                    },
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Debug)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Poly::term(Monomial::one(), c)
    }

    pub fn term(m: Monomial, c: Rational) -> Self {
        let mut p = Poly::zero();
        p.add_term(m, c);
        p
    }

    pub fn from_atom(atom: Atom) -> Self {
        Poly::term(Monomial::atom(atom, 1), Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .is_some_and(|(m, c)| m.is_one() && c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.keys().next().unwrap().is_one())
    }

    /// Value of a constant polynomial (zero for the empty polynomial).
    pub fn constant_value(&self) -> Option<Rational> {
        if self.terms.is_empty() {
            return Some(Rational::zero());
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn lead(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.last_key_value()
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let (big, small) = if self.len() >= other.len() { (self, other) } else { (other, self) };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub fn scale(&self, k: &Rational) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, k: &Rational) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        // Multiplying by a monomial preserves the order, so the map can be rebuilt directly.
        Poly {
            terms: self.terms.iter().map(|(n, c)| (n.mul(m), c * k)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if other.is_monomial() {
            let (m, c) = other.terms.iter().next().unwrap();
            return self.mul_term(m, c);
        }
        if self.is_monomial() {
            let (m, c) = self.terms.iter().next().unwrap();
            return other.mul_term(m, c);
        }
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        for m in self.terms.keys() {
            for (a, _) in m.factors() {
                out.insert(a.clone());
            }
        }
        out
    }

    pub fn degree_in(&self, atom: &Atom) -> u32 {
        self.terms.keys().map(|m| m.degree_of(atom)).max().unwrap_or(0)
    }

    /// Greatest monomial dividing every term.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return Monomial::one();
        };
        let mut g = first.clone();
        for m in it {
            if g.is_one() {
                break;
            }
            g = g.gcd(m);
        }
        g
    }

    pub fn div_monomial(&self, m: &Monomial) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(n, c)| (n.div(m).expect("monomial divides every term"), c.clone()))
                .collect(),
        }
    }

    /// Exact quotient `self / divisor`, or `None` if the division leaves a remainder.
    pub fn exact_div(&self, divisor: &Poly) -> Option<Poly> {
        let (lm, lc) = divisor.lead()?;
        if let Some(k) = divisor.constant_value() {
            return Some(self.scale(&(Rational::one() / k)));
        }
        if divisor.is_monomial() {
            let mut out = Poly::zero();
            for (m, c) in &self.terms {
                out.terms.insert(m.div(lm)?, c / lc);
            }
            return Some(out);
        }
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((m, c)) = rem.lead() {
            let qm = m.div(lm)?;
            let qc = c / lc;
            rem = rem.sub(&divisor.mul_term(&qm, &qc));
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    /// Coefficients of `self` viewed as a univariate polynomial in `atom`.
    pub fn to_univariate(&self, atom: &Atom) -> Vec<Poly> {
        let mut out: Vec<Poly> = vec![Poly::zero(); self.degree_in(atom) as usize + 1];
        for (m, c) in &self.terms {
            let (e, rest) = m.split(atom);
            out[e as usize].add_term(rest, c.clone());
        }
        out
    }

    pub fn from_univariate(atom: &Atom, coeffs: &[Poly]) -> Poly {
        let mut out = Poly::zero();
        for (e, c) in coeffs.iter().enumerate() {
            let m = Monomial::atom(atom.clone(), e as u32);
            for (n, k) in c.terms() {
                out.add_term(n.mul(&m), k.clone());
            }
        }
        out
    }

    /// First `cos` or `tanh` atom, the ones with a quadratic relation.
    pub fn quadratic_atom(&self) -> Option<Atom> {
        self.atoms()
            .into_iter()
            .find(|a| matches!(a, Atom::Elementary(Elementary::Cos | Elementary::Tanh, _)))
    }

    /// Image under `a -> -a`.
    pub fn conjugate(&self, a: &Atom) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let (k, _) = m.split(a);
            out.add_term(m.clone(), if k % 2 == 1 { -c.clone() } else { c.clone() });
        }
        out
    }

    /// Rewrite `cos(a)^k` and `tanh(a)^k` with `k >= 2` through `cos² = 1 - sin²`
    /// and `tanh² = 1 - sech²`. Returns `None` when nothing needs rewriting.
    pub fn reduce_elementary(&self) -> Option<Poly> {
        let reducible = |m: &Monomial| {
            m.factors().iter().any(|(a, e)| {
                *e >= 2 && matches!(a, Atom::Elementary(Elementary::Cos | Elementary::Tanh, _))
            })
        };
        if !self.terms.keys().any(reducible) {
            return None;
        }
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            if !reducible(m) {
                out.add_term(m.clone(), c.clone());
                continue;
            }
            let mut kept = Vec::new();
            let mut factor = Poly::one();
            for (a, e) in m.factors() {
                let partner = match a {
                    Atom::Elementary(Elementary::Cos, arg) if *e >= 2 => {
                        Some(Atom::Elementary(Elementary::Sin, arg.clone()))
                    }
                    Atom::Elementary(Elementary::Tanh, arg) if *e >= 2 => {
                        Some(Atom::Elementary(Elementary::Sech, arg.clone()))
                    }
                    _ => None,
                };
                match partner {
                    Some(p) => {
                        if e % 2 == 1 {
                            kept.push((a.clone(), 1));
                        }
                        let mut one_minus = Poly::one();
                        one_minus.add_term(Monomial::atom(p, 2), -Rational::one());
                        factor = factor.mul(&one_minus.pow(e / 2));
                    }
                    None => kept.push((a.clone(), *e)),
                }
            }
            let base = Monomial::from_sorted(kept);
            out = out.add(&factor.mul_term(&base, c));
        }
        Some(out)
    }
}
