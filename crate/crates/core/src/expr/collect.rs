//! Coefficient extraction with respect to polynomial variables.

use super::poly::Poly;
use super::{Atom, Expr, Symbol};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CollectError {
    #[error("`{0}` occurs in a denominator")]
    InDenominator(String),
    #[error("`{0}` occurs inside a function argument")]
    InsideFunction(String),
}

/// Power product in the collection variables, as an exponent vector.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarMonomial {
    pub vars: Vec<Symbol>,
    pub exps: Vec<u32>,
}

impl VarMonomial {
    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn to_expr(&self) -> Expr {
        self.vars.iter().zip(&self.exps).map(|(v, &e)| Expr::sym(v).pow(e as i64)).product()
    }
}

impl fmt::Display for VarMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        let mut first = true;
        for (v, &e) in self.vars.iter().zip(&self.exps) {
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Write `e = Σ coeff · monomial` with monomials in `vars` and coefficients free
/// of `vars`. Zero coefficients are omitted; results are ordered by degree,
/// then by exponent vector.
pub fn collect(e: &Expr, vars: &[Symbol]) -> Result<Vec<(VarMonomial, Expr)>, CollectError> {
    let fr = e.frac();
    let var_atoms: Vec<Atom> = vars.iter().map(|v| Atom::Symbol(v.clone())).collect();
    for v in vars {
        let in_den = fr.den.atoms().iter().any(|a| match a {
            Atom::Symbol(s) => s == v,
            other => Expr::atom(other.clone()).has_symbol(v),
        });
        if in_den {
            return Err(CollectError::InDenominator(v.to_string()));
        }
        let inside = fr.num.atoms().iter().any(|a| !matches!(a, Atom::Symbol(_)) && Expr::atom(a.clone()).has_symbol(v));
        if inside {
            return Err(CollectError::InsideFunction(v.to_string()));
        }
    }
    let mut groups: BTreeMap<(u32, Vec<u32>), Poly> = BTreeMap::new();
    for (m, c) in fr.num.terms() {
        let mut rest = m.clone();
        let mut exps = Vec::with_capacity(vars.len());
        for a in &var_atoms {
            let (k, r) = rest.split(a);
            exps.push(k);
            rest = r;
        }
        let deg = exps.iter().sum();
        groups.entry((deg, exps)).or_default().add_term(rest, c.clone());
    }
    let den = Expr::from_poly(fr.den.clone());
    Ok(groups
        .into_iter()
        .filter(|(_, p)| !p.is_zero())
        .map(|((_, exps), p)| (VarMonomial { vars: vars.to_vec(), exps }, Expr::from_poly(p) / &den))
        .collect())
}

/// Coefficient of one monomial, zero if absent.
pub fn coefficient(e: &Expr, vars: &[Symbol], exps: &[u32]) -> Result<Expr, CollectError> {
    Ok(collect(e, vars)?
        .into_iter()
        .find(|(m, _)| m.exps == exps)
        .map(|(_, c)| c)
        .unwrap_or_default())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: &str) -> Expr {
        s.parse().unwrap()
    }

    #[test]
    fn collects_by_monomial() {
        let vars = [Symbol::new("r"), Symbol::new("t")];
        let got = collect(&e("a*r*t + b*r + c/x + 2*r*t"), &vars).unwrap();
        let shown: Vec<String> = got.iter().map(|(m, c)| format!("{m}: {c}")).collect();
        assert_eq!(shown, vec!["1: c/x", "r: b", "r*t: a + 2"]);
    }

    #[test]
    fn rejects_non_polynomial_occurrences() {
        let vars = [Symbol::new("r")];
        assert!(matches!(collect(&e("1/r"), &vars), Err(CollectError::InDenominator(_))));
        assert!(matches!(collect(&e("F(r)"), &vars), Err(CollectError::InsideFunction(_))));
    }
}
