//! Zero testing.
//!
//! Canonical form decides zero exactly on the rational-function fragment. When
//! undefined or elementary functions survive canonicalization, a nonzero
//! numerator is probed at random rational points with every undefined function
//! replaced by a random dense polynomial. A nonvanishing probe proves the
//! expression nonzero; if every probe vanishes the result stays unresolved.

use super::poly::Poly;
use super::{Atom, Expr, Rational, Symbol};
use num::{BigInt, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, HashMap};
use std::sync::RwLock;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ZeroStatus {
    Zero,
    NonZero,
    /// Not provably zero, but every one of `probes` random evaluations vanished.
    UnresolvedZero { probes: usize },
}

impl ZeroStatus {
    pub fn is_zero(&self) -> bool {
        matches!(self, ZeroStatus::Zero)
    }

    pub fn is_nonzero(&self) -> bool {
        matches!(self, ZeroStatus::NonZero)
    }
}

#[derive(Debug, Clone)]
pub struct ProbeConfig {
    pub probes: usize,
    pub seed: u64,
    /// Bound on numerator and denominator of random rationals.
    pub height: i64,
    /// Relative tolerance for probes that go through floating point.
    pub tolerance: f64,
    /// Extra attempts allowed when a probe hits a pole or a domain error.
    pub max_retries: usize,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig { probes: 8, seed: 0x5eed_1e55, height: 1000, tolerance: 1e-9, max_retries: 64 }
    }
}

static DEFAULT_CONFIG: RwLock<Option<ProbeConfig>> = RwLock::new(None);

/// Replace the configuration used by [`zero_status`] for the whole process.
pub fn set_default_probe_config(cfg: ProbeConfig) {
    *DEFAULT_CONFIG.write().unwrap_or_else(|e| e.into_inner()) = Some(cfg);
}

pub fn default_probe_config() -> ProbeConfig {
    DEFAULT_CONFIG.read().unwrap_or_else(|e| e.into_inner()).clone().unwrap_or_default()
}

pub fn zero_status(e: &Expr) -> ZeroStatus {
    zero_status_with(e, &default_probe_config())
}

pub fn zero_status_with(e: &Expr, cfg: &ProbeConfig) -> ZeroStatus {
    if e.is_zero() {
        return ZeroStatus::Zero;
    }
    if e.is_rational_function() {
        return ZeroStatus::NonZero;
    }
    let num = e.numerator();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let functions = random_functions(&num, &mut rng);
    let symbols = num.free_symbols();
    let mut done = 0;
    let mut attempts = 0;
    while done < cfg.probes && attempts < cfg.probes + cfg.max_retries {
        attempts += 1;
        let point: HashMap<Symbol, Rational> =
            symbols.iter().map(|s| (s.clone(), random_rational(&mut rng, cfg.height))).collect();
        let mut p = Probe { point: &point, functions: &functions, cache: HashMap::new() };
        match p.poly_with_scale(&num.frac().num) {
            Some((Value::Exact(v), _)) => {
                if !v.is_zero() {
                    return ZeroStatus::NonZero;
                }
            }
            Some((Value::Float(v), scale)) => {
                if v.abs() > cfg.tolerance * (1.0 + scale) {
                    return ZeroStatus::NonZero;
                }
            }
            None => continue,
        }
        done += 1;
    }
    ZeroStatus::UnresolvedZero { probes: done }
}

fn random_rational(rng: &mut ChaCha8Rng, height: i64) -> Rational {
    let mut n = 0;
    while n == 0 {
        n = rng.gen_range(-height..=height);
    }
    let d = rng.gen_range(1..=height);
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Per function name, a random polynomial body in placeholder parameters.
struct RandomFn {
    params: Vec<Symbol>,
    body: Expr,
}

fn random_functions(e: &Expr, rng: &mut ChaCha8Rng) -> BTreeMap<Symbol, RandomFn> {
    let mut arity: BTreeMap<Symbol, (usize, usize)> = BTreeMap::new();
    for ap in e.applications() {
        let entry = arity.entry(ap.name.clone()).or_insert((ap.args.len(), 0));
        entry.0 = entry.0.max(ap.args.len());
        entry.1 = entry.1.max(ap.order());
    }
    arity
        .into_iter()
        .map(|(name, (n, order))| {
            let params: Vec<Symbol> = (0..n).map(|i| Symbol::new(&format!("_{name}_{i}"))).collect();
            let degree = order + 1;
            let mut body = Expr::zero();
            for exps in monomials(n, degree) {
                let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
                let c = Rational::new(BigInt::from(sign * rng.gen_range(1i64..=9)), BigInt::from(rng.gen_range(1i64..=9)));
                let mut t = Expr::rational(c);
                for (i, k) in exps.into_iter().enumerate() {
                    if k > 0 {
                        t = t * Expr::sym(&params[i]).pow(k as i64);
                    }
                }
                body = body + t;
            }
            (name, RandomFn { params, body })
        })
        .collect()
}

/// All exponent vectors of length `n` with total degree at most `d`.
fn monomials(n: usize, d: usize) -> Vec<Vec<usize>> {
    fn go(i: usize, n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for k in 0..=left {
            cur.push(k);
            go(i + 1, n, left - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, d, &mut Vec::new(), &mut out);
    out
}

#[derive(Clone, Debug)]
enum Value {
    Exact(Rational),
    Float(f64),
}

impl Value {
    fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(q) => q.to_f64().unwrap_or(f64::NAN),
            Value::Float(x) => *x,
        }
    }

    fn mul(&self, o: &Value) -> Value {
        match (self, o) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a * b),
            _ => Value::Float(self.to_f64() * o.to_f64()),
        }
    }

    fn add(&self, o: &Value) -> Value {
        match (self, o) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a + b),
            _ => Value::Float(self.to_f64() + o.to_f64()),
        }
    }

    fn pow(&self, k: u32) -> Value {
        match self {
            Value::Exact(a) => Value::Exact(num::pow(a.clone(), k as usize)),
            Value::Float(x) => Value::Float(x.powi(k as i32)),
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            Value::Exact(a) => a.is_zero(),
            Value::Float(x) => *x == 0.0,
        }
    }
}

struct Probe<'a> {
    point: &'a HashMap<Symbol, Rational>,
    functions: &'a BTreeMap<Symbol, RandomFn>,
    cache: HashMap<Atom, Value>,
}

impl Probe<'_> {
    fn expr(&mut self, e: &Expr) -> Option<Value> {
        let fr = e.frac();
        let (n, _) = self.poly_with_scale(&fr.num)?;
        if fr.den.is_one() {
            return Some(n);
        }
        let (d, _) = self.poly_with_scale(&fr.den)?;
        if d.is_zero() {
            return None;
        }
        Some(match (n, d) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a / b),
            (a, b) => Value::Float(a.to_f64() / b.to_f64()),
        })
    }

    /// Value of `p` and the sum of absolute term values (for relative tolerance).
    fn poly_with_scale(&mut self, p: &Poly) -> Option<(Value, f64)> {
        let mut acc = Value::Exact(Rational::zero());
        let mut scale = 0.0;
        for (m, c) in p.terms() {
            let mut t = Value::Exact(c.clone());
            for (a, k) in m.factors() {
                t = t.mul(&self.atom(a)?.pow(*k));
            }
            scale += match &t {
                Value::Exact(q) => q.abs().to_f64().unwrap_or(f64::INFINITY),
                Value::Float(x) => x.abs(),
            };
            acc = acc.add(&t);
        }
        if let Value::Float(x) = acc {
            if !x.is_finite() {
                return None;
            }
        }
        Some((acc, scale))
    }

    fn atom(&mut self, a: &Atom) -> Option<Value> {
        if let Some(v) = self.cache.get(a) {
            return Some(v.clone());
        }
        let v = match a {
            Atom::Symbol(s) => Value::Exact(self.point.get(s)?.clone()),
            Atom::Elementary(kind, arg) => {
                let x = self.expr(arg)?.to_f64();
                if *kind == super::Elementary::Ln && x <= 0.0 {
                    return None;
                }
                let y = kind.apply_f64(x);
                if !y.is_finite() {
                    return None;
                }
                Value::Float(y)
            }
            Atom::Apply(ap) => {
                let f = self.functions.get(&ap.name)?;
                let body = ap.derivs.iter().fold(f.body.clone(), |e, &k| e.diff(&f.params[k]));
                let args = ap.args.iter().map(|x| self.expr(x)).collect::<Option<Vec<_>>>()?;
                let mut inner: HashMap<Symbol, Rational> = HashMap::new();
                let mut float_args = Vec::new();
                for (param, v) in f.params.iter().zip(&args) {
                    match v {
                        Value::Exact(q) => {
                            inner.insert(param.clone(), q.clone());
                        }
                        Value::Float(x) => float_args.push((param.clone(), *x)),
                    }
                }
                if float_args.is_empty() {
                    let mut p = Probe { point: &inner, functions: self.functions, cache: HashMap::new() };
                    p.expr(&body)?
                } else {
                    let mut pt: super::NumericPoint = float_args.into_iter().collect();
                    for (s, q) in inner {
                        pt.insert(s, q.to_f64()?);
                    }
                    Value::Float(super::eval_numeric(&body, &pt, &super::FunctionTable::new()).ok()?)
                }
            }
        };
        self.cache.insert(a.clone(), v.clone());
        Some(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn status(s: &str) -> ZeroStatus {
        zero_status(&s.parse().unwrap())
    }

    #[test]
    fn exact_fragment() {
        assert_eq!(status("x - x"), ZeroStatus::Zero);
        assert_eq!(status("x/y - 1"), ZeroStatus::NonZero);
    }

    #[test]
    fn functions_are_probed() {
        assert_eq!(status("F(x) - F(y)"), ZeroStatus::NonZero);
        assert_eq!(status("diff(F(x, y), x, y)"), ZeroStatus::NonZero);
        assert_eq!(status("exp(x) - 1"), ZeroStatus::NonZero);
    }

    #[test]
    fn hidden_identities_stay_unresolved() {
        assert_eq!(status("exp(x)*exp(y) - exp(x + y)"), ZeroStatus::UnresolvedZero { probes: 8 });
        assert_eq!(status("sin(2*x) - 2*sin(x)*cos(x)"), ZeroStatus::UnresolvedZero { probes: 8 });
    }
}
