//! Simultaneous substitution of symbols and undefined functions.

use super::poly::Poly;
use super::{Atom, Elementary, Expr, Symbol};
use std::collections::{BTreeMap, HashMap};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SubstError {
    #[error("function `{name}` bound with {expected} parameters but applied to {found} arguments")]
    Arity { name: String, expected: usize, found: usize },
    #[error("substitution makes a denominator vanish")]
    ZeroDenominator,
    #[error("substitution gives {0}, which is undefined")]
    Domain(String),
}

/// `name(params) = body`. Derivatives of the function are derivatives of the body.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionBinding {
    pub params: Vec<Symbol>,
    pub body: Expr,
}

impl FunctionBinding {
    pub fn new(params: &[&str], body: Expr) -> Self {
        FunctionBinding { params: params.iter().map(|p| Symbol::new(p)).collect(), body }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Bindings {
    pub symbols: BTreeMap<Symbol, Expr>,
    pub functions: BTreeMap<Symbol, FunctionBinding>,
}

impl Bindings {
    pub fn new() -> Self {
        Bindings::default()
    }

    pub fn symbol(mut self, name: &str, value: Expr) -> Self {
        self.symbols.insert(Symbol::new(name), value);
        self
    }

    pub fn function(mut self, name: &str, binding: FunctionBinding) -> Self {
        self.functions.insert(Symbol::new(name), binding);
        self
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty() && self.functions.is_empty()
    }
}

/// Replace bound symbols and functions everywhere, simultaneously. Function
/// bodies are instantiated once and not substituted again.
pub fn substitute(e: &Expr, b: &Bindings) -> Result<Expr, SubstError> {
    if b.is_empty() {
        return Ok(e.clone());
    }
    Subst { b, cache: HashMap::new() }.expr(e)
}

struct Subst<'a> {
    b: &'a Bindings,
    cache: HashMap<Atom, Expr>,
}

impl Subst<'_> {
    fn expr(&mut self, e: &Expr) -> Result<Expr, SubstError> {
        let fr = e.frac();
        let num = self.poly(&fr.num)?;
        if fr.den.is_one() {
            return Ok(num);
        }
        let den = self.poly(&fr.den)?;
        num.checked_div(&den).ok_or(SubstError::ZeroDenominator)
    }

    fn poly(&mut self, p: &Poly) -> Result<Expr, SubstError> {
        let mut acc = Expr::zero();
        for (m, c) in p.terms() {
            let mut t = Expr::rational(c.clone());
            for (a, k) in m.factors() {
                let v = self.atom(a)?;
                t = t * v.pow(*k as i64);
            }
            acc = acc + t;
        }
        Ok(acc)
    }

    fn atom(&mut self, a: &Atom) -> Result<Expr, SubstError> {
        if let Some(v) = self.cache.get(a) {
            return Ok(v.clone());
        }
        let v = match a {
            Atom::Symbol(s) => self.b.symbols.get(s).cloned().unwrap_or_else(|| Expr::sym(s)),
            Atom::Elementary(kind, arg) => {
                let arg = self.expr(arg)?;
                if *kind == Elementary::Ln && arg.is_zero() {
                    return Err(SubstError::Domain("ln(0)".into()));
                }
                Expr::elementary(*kind, arg)
            }
            Atom::Apply(ap) => {
                let args = ap.args.iter().map(|x| self.expr(x)).collect::<Result<Vec<_>, _>>()?;
                match self.b.functions.get(&ap.name) {
                    None => Expr::derivative(&ap.name, args, ap.derivs.clone()),
                    Some(fb) => {
                        if fb.params.len() != args.len() {
                            return Err(SubstError::Arity {
                                name: ap.name.to_string(),
                                expected: fb.params.len(),
                                found: args.len(),
                            });
                        }
                        let body = ap.derivs.iter().fold(fb.body.clone(), |e, &k| e.diff(&fb.params[k]));
                        let inner = Bindings {
                            symbols: fb.params.iter().cloned().zip(args).collect(),
                            functions: BTreeMap::new(),
                        };
                        Subst { b: &inner, cache: HashMap::new() }.expr(&body)?
                    }
                }
            }
        };
        self.cache.insert(a.clone(), v.clone());
        Ok(v)
    }
}
