//! Floating-point evaluation.

use super::poly::Poly;
use super::{Atom, Elementary, Expr, Symbol};
use num::ToPrimitive;
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

/// Numeric implementation of an undefined function: `(args, derivative slots)`.
/// Returns `None` when the requested derivative is not available.
pub type NumericFn = Arc<dyn Fn(&[f64], &[usize]) -> Option<f64> + Send + Sync>;

pub type NumericPoint = BTreeMap<Symbol, f64>;

#[derive(Clone, Default)]
pub struct FunctionTable {
    fns: BTreeMap<Symbol, NumericFn>,
}

impl FunctionTable {
    pub fn new() -> Self {
        FunctionTable::default()
    }

    pub fn insert(&mut self, name: &str, f: NumericFn) {
        self.fns.insert(Symbol::new(name), f);
    }

    pub fn with(mut self, name: &str, f: impl Fn(&[f64], &[usize]) -> Option<f64> + Send + Sync + 'static) -> Self {
        self.insert(name, Arc::new(f));
        self
    }

    pub fn get(&self, name: &Symbol) -> Option<&NumericFn> {
        self.fns.get(name)
    }
}

impl std::fmt::Debug for FunctionTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.fns.keys()).finish()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("symbol `{0}` has no value")]
    UnboundSymbol(String),
    #[error("function `{0}` (derivative slots {1:?}) has no numeric implementation")]
    UnboundFunction(String, Vec<usize>),
    #[error("{0} is outside its domain")]
    Domain(String),
    #[error("division by zero")]
    DivisionByZero,
}

pub fn eval_numeric(e: &Expr, point: &NumericPoint, table: &FunctionTable) -> Result<f64, EvalError> {
    Evaluator { point, table, cache: HashMap::new() }.expr(e)
}

struct Evaluator<'a> {
    point: &'a NumericPoint,
    table: &'a FunctionTable,
    cache: HashMap<Atom, f64>,
}

impl Evaluator<'_> {
    fn expr(&mut self, e: &Expr) -> Result<f64, EvalError> {
        let fr = e.frac();
        let n = self.poly(&fr.num)?;
        if fr.den.is_one() {
            return Ok(n);
        }
        let d = self.poly(&fr.den)?;
        if d == 0.0 {
            return Err(EvalError::DivisionByZero);
        }
        Ok(n / d)
    }

    fn poly(&mut self, p: &Poly) -> Result<f64, EvalError> {
        let mut acc = 0.0;
        for (m, c) in p.terms() {
            let mut t = c.to_f64().unwrap_or(f64::NAN);
            for (a, k) in m.factors() {
                t *= self.atom(a)?.powi(*k as i32);
            }
            acc += t;
        }
        Ok(acc)
    }

    fn atom(&mut self, a: &Atom) -> Result<f64, EvalError> {
        if let Some(v) = self.cache.get(a) {
            return Ok(*v);
        }
        let v = match a {
            Atom::Symbol(s) => *self.point.get(s).ok_or_else(|| EvalError::UnboundSymbol(s.to_string()))?,
            Atom::Elementary(kind, arg) => {
                let x = self.expr(arg)?;
                if *kind == Elementary::Ln && x <= 0.0 {
                    return Err(EvalError::Domain(format!("ln({x})")));
                }
                let y = kind.apply_f64(x);
                if !y.is_finite() {
                    return Err(EvalError::Domain(format!("{}({x})", kind.name())));
                }
                y
            }
            Atom::Apply(ap) => {
                let args = ap.args.iter().map(|x| self.expr(x)).collect::<Result<Vec<_>, _>>()?;
                let unbound = || EvalError::UnboundFunction(ap.name.to_string(), ap.derivs.clone());
                let f = self.table.get(&ap.name).ok_or_else(unbound)?;
                f(&args, &ap.derivs).ok_or_else(unbound)?
            }
        };
        self.cache.insert(a.clone(), v);
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluates_with_functions() {
        let e: Expr = "x^2*F(x, y) + diff(F(x, y), y) + exp(0*x) + sin(y)".parse().unwrap();
        let table = FunctionTable::new().with("F", |a, d| match d {
            [] => Some(a[0] * a[1]),
            [1] => Some(a[0]),
            _ => None,
        });
        let pt: NumericPoint = [(Symbol::new("x"), 2.0), (Symbol::new("y"), 3.0)].into_iter().collect();
        let v = eval_numeric(&e, &pt, &table).unwrap();
        assert!((v - (24.0 + 2.0 + 1.0 + 3f64.sin())).abs() < 1e-12);
    }

    #[test]
    fn reports_errors() {
        let pt: NumericPoint = [(Symbol::new("x"), 0.0)].into_iter().collect();
        let t = FunctionTable::new();
        assert_eq!(eval_numeric(&"y".parse().unwrap(), &pt, &t), Err(EvalError::UnboundSymbol("y".into())));
        assert!(matches!(eval_numeric(&"ln(x)".parse().unwrap(), &pt, &t), Err(EvalError::Domain(_))));
        assert_eq!(eval_numeric(&"1/x".parse().unwrap(), &pt, &t), Err(EvalError::DivisionByZero));
        assert!(matches!(eval_numeric(&"G(x)".parse().unwrap(), &pt, &t), Err(EvalError::UnboundFunction(..))));
    }
}
