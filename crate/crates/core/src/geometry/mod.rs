//! Charts, vector fields, differential forms and smooth maps in coordinates.

use crate::expr::{substitute, Bindings, Expr, SubstError, Symbol};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("operands live on different charts")]
    ChartMismatch,
    #[error("coordinate `{0}` appears twice in the chart")]
    DuplicateCoordinate(String),
    #[error("unknown coordinate `{0}`")]
    UnknownCoordinate(String),
    #[error("expected {expected} components, got {found}")]
    Length { expected: usize, found: usize },
    #[error("{0}")]
    Degree(String),
    #[error(transparent)]
    Subst(#[from] SubstError),
}

/// Ordered coordinate system.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Chart(Arc<[Symbol]>);

impl Chart {
    pub fn new(names: &[&str]) -> Result<Self, GeometryError> {
        Chart::from_symbols(names.iter().map(|n| Symbol::new(n)).collect())
    }

    pub fn from_symbols(coords: Vec<Symbol>) -> Result<Self, GeometryError> {
        for (i, c) in coords.iter().enumerate() {
            if coords[..i].contains(c) {
                return Err(GeometryError::DuplicateCoordinate(c.to_string()));
            }
        }
        Ok(Chart(coords.into()))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Symbol] {
        &self.0
    }

    pub fn coord(&self, i: usize) -> &Symbol {
        &self.0[i]
    }

    pub fn coord_expr(&self, i: usize) -> Expr {
        Expr::sym(&self.0[i])
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|c| c.as_str() == name)
    }

    fn require(&self, name: &str) -> Result<usize, GeometryError> {
        self.index_of(name).ok_or_else(|| GeometryError::UnknownCoordinate(name.to_string()))
    }
}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

fn same_chart(a: &Chart, b: &Chart) -> Result<(), GeometryError> {
    if a == b {
        Ok(())
    } else {
        Err(GeometryError::ChartMismatch)
    }
}

/// `Σ X^i ∂/∂x^i`.
#[derive(Clone, PartialEq)]
pub struct VectorField {
    chart: Chart,
    coeffs: Vec<Expr>,
}

impl VectorField {
    pub fn new(chart: &Chart, coeffs: Vec<Expr>) -> Result<Self, GeometryError> {
        if coeffs.len() != chart.dim() {
            return Err(GeometryError::Length { expected: chart.dim(), found: coeffs.len() });
        }
        Ok(VectorField { chart: chart.clone(), coeffs })
    }

    pub fn zero(chart: &Chart) -> Self {
        VectorField { chart: chart.clone(), coeffs: vec![Expr::zero(); chart.dim()] }
    }

    /// The coordinate field `∂/∂x^i`.
    pub fn coordinate(chart: &Chart, i: usize) -> Self {
        let mut v = VectorField::zero(chart);
        v.coeffs[i] = Expr::one();
        v
    }

    /// Field from `(coordinate name, coefficient)` pairs; other components vanish.
    pub fn from_pairs(chart: &Chart, pairs: &[(&str, Expr)]) -> Result<Self, GeometryError> {
        let mut v = VectorField::zero(chart);
        for (name, c) in pairs {
            let i = chart.require(name)?;
            v.coeffs[i] = &v.coeffs[i] + c;
        }
        Ok(v)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn coeffs(&self) -> &[Expr] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &Expr {
        &self.coeffs[i]
    }

    pub fn component(&self, name: &str) -> Option<&Expr> {
        self.chart.index_of(name).map(|i| &self.coeffs[i])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Expr::is_zero)
    }

    /// The derivation `f ↦ X(f)`.
    pub fn apply(&self, f: &Expr) -> Expr {
        self.coeffs
            .iter()
            .zip(self.chart.coords())
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, x)| {
                let d = f.diff(x);
                if d.is_zero() {
                    d
                } else {
                    c * d
                }
            })
            .sum()
    }

    pub fn add(&self, other: &VectorField) -> Result<VectorField, GeometryError> {
        same_chart(&self.chart, &other.chart)?;
        Ok(self.zip(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &VectorField) -> Result<VectorField, GeometryError> {
        same_chart(&self.chart, &other.chart)?;
        Ok(self.zip(other, |a, b| a - b))
    }

    pub fn scale(&self, f: &Expr) -> VectorField {
        self.map(|c| c * f)
    }

    pub fn neg(&self) -> VectorField {
        self.map(|c| -c)
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> VectorField {
        VectorField { chart: self.chart.clone(), coeffs: self.coeffs.iter().map(f).collect() }
    }

    pub fn try_map<E>(&self, f: impl Fn(&Expr) -> Result<Expr, E>) -> Result<VectorField, E> {
        Ok(VectorField { chart: self.chart.clone(), coeffs: self.coeffs.iter().map(f).collect::<Result<_, _>>()? })
    }

    fn zip(&self, other: &VectorField, f: impl Fn(&Expr, &Expr) -> Expr) -> VectorField {
        VectorField {
            chart: self.chart.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn substitute(&self, b: &Bindings) -> Result<VectorField, SubstError> {
        self.try_map(|c| substitute(c, b))
    }
}

/// Writes a linear combination `c_1*B_1 + c_2*B_2 ...` of named basis elements.
fn write_combination(f: &mut fmt::Formatter<'_>, terms: &[(&Expr, String)]) -> fmt::Result {
    let mut first = true;
    for (c, basis) in terms {
        if c.is_zero() {
            continue;
        }
        let simple = c.size() == 1;
        let negative = c.leading_sign() < 0;
        let shown = if negative { -*c } else { (*c).clone() };
        match (first, negative) {
            (true, true) => f.write_str("-")?,
            (true, false) => {}
            (false, true) => f.write_str(" - ")?,
            (false, false) => f.write_str(" + ")?,
        }
        first = false;
        if shown.is_one() {
            f.write_str(basis)?;
        } else if simple {
            write!(f, "{shown}*{basis}")?;
        } else {
            write!(f, "({shown})*{basis}")?;
        }
    }
    if first {
        f.write_str("0")?;
    }
    Ok(())
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(&Expr, String)> =
            self.coeffs.iter().zip(self.chart.coords()).map(|(c, x)| (c, format!("D{x}"))).collect();
        write_combination(f, &terms)
    }
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VectorField({self})")
    }
}

/// Differential k-form `Σ_I ω_I dx^I` over strictly increasing index tuples.
#[derive(Clone, PartialEq)]
pub struct KForm {
    chart: Chart,
    degree: usize,
    coeffs: BTreeMap<Vec<usize>, Expr>,
}

/// Sort `idx` in place and return the permutation sign, or `None` on a repeat.
fn sort_with_sign(idx: &mut [usize]) -> Option<i64> {
    let mut sign = 1;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

impl KForm {
    pub fn zero(chart: &Chart, degree: usize) -> Self {
        KForm { chart: chart.clone(), degree, coeffs: BTreeMap::new() }
    }

    /// Form from arbitrary-order index tuples, antisymmetrizing as needed.
    pub fn new(chart: &Chart, degree: usize, entries: Vec<(Vec<usize>, Expr)>) -> Result<Self, GeometryError> {
        if degree > chart.dim() {
            return Err(GeometryError::Degree(format!("degree {degree} exceeds dimension {}", chart.dim())));
        }
        let mut form = KForm::zero(chart, degree);
        for (mut idx, c) in entries {
            if idx.len() != degree || idx.iter().any(|&i| i >= chart.dim()) {
                return Err(GeometryError::Degree(format!("index tuple {idx:?} does not fit a {degree}-form")));
            }
            if let Some(sign) = sort_with_sign(&mut idx) {
                form.add_term(idx, if sign < 0 { -c } else { c });
            }
        }
        Ok(form)
    }

    pub fn function(chart: &Chart, f: Expr) -> Self {
        let mut form = KForm::zero(chart, 0);
        form.add_term(Vec::new(), f);
        form
    }

    pub fn one_form(chart: &Chart, coeffs: Vec<Expr>) -> Result<Self, GeometryError> {
        if coeffs.len() != chart.dim() {
            return Err(GeometryError::Length { expected: chart.dim(), found: coeffs.len() });
        }
        let mut form = KForm::zero(chart, 1);
        for (i, c) in coeffs.into_iter().enumerate() {
            form.add_term(vec![i], c);
        }
        Ok(form)
    }

    /// One-form from `(coordinate name, coefficient)` pairs.
    pub fn from_pairs(chart: &Chart, pairs: &[(&str, Expr)]) -> Result<Self, GeometryError> {
        let mut form = KForm::zero(chart, 1);
        for (name, c) in pairs {
            form.add_term(vec![chart.require(name)?], c.clone());
        }
        Ok(form)
    }

    /// The differential `dx^i`.
    pub fn differential(chart: &Chart, i: usize) -> Self {
        let mut form = KForm::zero(chart, 1);
        form.add_term(vec![i], Expr::one());
        form
    }

    fn add_term(&mut self, idx: Vec<usize>, c: Expr) {
        if c.is_zero() {
            return;
        }
        let sum = match self.coeffs.remove(&idx) {
            Some(old) => old + c,
            None => c,
        };
        if !sum.is_zero() {
            self.coeffs.insert(idx, sum);
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &Expr)> {
        self.coeffs.iter()
    }

    pub fn coefficient(&self, idx: &[usize]) -> Expr {
        self.coeffs.get(idx).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Components of a 1-form, indexed by coordinate.
    pub fn covector(&self) -> Option<Vec<Expr>> {
        (self.degree == 1).then(|| (0..self.chart.dim()).map(|i| self.coefficient(&[i])).collect())
    }

    pub fn add(&self, other: &KForm) -> Result<KForm, GeometryError> {
        same_chart(&self.chart, &other.chart)?;
        if self.degree != other.degree {
            return Err(GeometryError::Degree("cannot add forms of different degree".into()));
        }
        let mut out = self.clone();
        for (idx, c) in &other.coeffs {
            out.add_term(idx.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &KForm) -> Result<KForm, GeometryError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> KForm {
        self.scale(&Expr::integer(-1))
    }

    pub fn scale(&self, f: &Expr) -> KForm {
        let mut out = KForm::zero(&self.chart, self.degree);
        for (idx, c) in &self.coeffs {
            out.add_term(idx.clone(), c * f);
        }
        out
    }

    pub fn substitute(&self, b: &Bindings) -> Result<KForm, SubstError> {
        let mut out = KForm::zero(&self.chart, self.degree);
        for (idx, c) in &self.coeffs {
            out.add_term(idx.clone(), substitute(c, b)?);
        }
        Ok(out)
    }
}

impl fmt::Display for KForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree == 0 {
            return write!(f, "{}", self.coefficient(&[]));
        }
        let terms: Vec<(&Expr, String)> = self
            .coeffs
            .iter()
            .map(|(idx, c)| {
                let names: Vec<String> = idx.iter().map(|&i| format!("d{}", self.chart.coord(i))).collect();
                (c, names.join("^"))
            })
            .collect();
        write_combination(f, &terms)
    }
}

impl fmt::Debug for KForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "KForm[{}]({self})", self.degree)
    }
}

/// `ω(X)` for a 1-form.
pub fn pair(omega: &KForm, x: &VectorField) -> Result<Expr, GeometryError> {
    same_chart(&omega.chart, &x.chart)?;
    if omega.degree != 1 {
        return Err(GeometryError::Degree("pairing needs a 1-form".into()));
    }
    Ok(omega.coeffs.iter().map(|(idx, c)| c * x.coeff(idx[0])).sum())
}

pub fn bracket(x: &VectorField, y: &VectorField) -> Result<VectorField, GeometryError> {
    same_chart(&x.chart, &y.chart)?;
    let coeffs = x.coeffs.iter().zip(&y.coeffs).map(|(xi, yi)| x.apply(yi) - y.apply(xi)).collect();
    Ok(VectorField { chart: x.chart.clone(), coeffs })
}

pub fn exterior_derivative(omega: &KForm) -> Result<KForm, GeometryError> {
    let n = omega.chart.dim();
    if omega.degree >= n {
        return Err(GeometryError::Degree("exterior derivative of a top-degree form".into()));
    }
    let mut out = KForm::zero(&omega.chart, omega.degree + 1);
    for (idx, c) in &omega.coeffs {
        for j in 0..n {
            if idx.contains(&j) {
                continue;
            }
            let d = c.diff(omega.chart.coord(j));
            if d.is_zero() {
                continue;
            }
            let before = idx.iter().filter(|&&i| i < j).count();
            let mut new_idx = idx.clone();
            new_idx.insert(before, j);
            out.add_term(new_idx, if before % 2 == 1 { -d } else { d });
        }
    }
    Ok(out)
}

/// Contraction `ι_X ω` in the first slot.
pub fn interior_product(x: &VectorField, omega: &KForm) -> Result<KForm, GeometryError> {
    same_chart(&x.chart, &omega.chart)?;
    if omega.degree == 0 {
        return Err(GeometryError::Degree("interior product of a 0-form".into()));
    }
    let mut out = KForm::zero(&omega.chart, omega.degree - 1);
    for (idx, c) in &omega.coeffs {
        for (m, &i) in idx.iter().enumerate() {
            let xi = x.coeff(i);
            if xi.is_zero() {
                continue;
            }
            let mut rest = idx.clone();
            rest.remove(m);
            let t = c * xi;
            out.add_term(rest, if m % 2 == 1 { -t } else { t });
        }
    }
    Ok(out)
}

/// Cartan formula `L_X ω = ι_X dω + d(ι_X ω)`.
pub fn lie_derivative(x: &VectorField, omega: &KForm) -> Result<KForm, GeometryError> {
    same_chart(&x.chart, &omega.chart)?;
    if omega.degree == 0 {
        return Ok(KForm::function(&omega.chart, x.apply(&omega.coefficient(&[]))));
    }
    let first = if omega.degree < omega.chart.dim() {
        interior_product(x, &exterior_derivative(omega)?)?
    } else {
        KForm::zero(&omega.chart, omega.degree)
    };
    let second = exterior_derivative(&interior_product(x, omega)?)?;
    first.add(&second)
}

/// Exterior product; the zero form of degree `k + l` when that exceeds the dimension.
pub fn wedge(a: &KForm, b: &KForm) -> Result<KForm, GeometryError> {
    same_chart(&a.chart, &b.chart)?;
    let degree = a.degree + b.degree;
    let mut out = KForm { chart: a.chart.clone(), degree, coeffs: BTreeMap::new() };
    if degree > a.chart.dim() {
        return Ok(out);
    }
    for (i, ca) in &a.coeffs {
        for (j, cb) in &b.coeffs {
            let mut idx: Vec<usize> = i.iter().chain(j).copied().collect();
            if let Some(sign) = sort_with_sign(&mut idx) {
                let t = ca * cb;
                out.add_term(idx, if sign < 0 { -t } else { t });
            }
        }
    }
    Ok(out)
}

/// Smooth map given by one component per target coordinate, in source coordinates.
#[derive(Clone, PartialEq)]
pub struct SmoothMap {
    source: Chart,
    target: Chart,
    components: Vec<Expr>,
}

impl SmoothMap {
    pub fn new(source: &Chart, target: &Chart, components: Vec<Expr>) -> Result<Self, GeometryError> {
        if components.len() != target.dim() {
            return Err(GeometryError::Length { expected: target.dim(), found: components.len() });
        }
        Ok(SmoothMap { source: source.clone(), target: target.clone(), components })
    }

    pub fn identity(chart: &Chart) -> Self {
        SmoothMap { source: chart.clone(), target: chart.clone(), components: (0..chart.dim()).map(|i| chart.coord_expr(i)).collect() }
    }

    pub fn source(&self) -> &Chart {
        &self.source
    }

    pub fn target(&self) -> &Chart {
        &self.target
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    fn bindings(&self) -> Bindings {
        Bindings {
            symbols: self.target.coords().iter().cloned().zip(self.components.iter().cloned()).collect(),
            functions: BTreeMap::new(),
        }
    }

    /// `f ∘ F` for a function `f` on the target.
    pub fn pull_function(&self, f: &Expr) -> Result<Expr, GeometryError> {
        Ok(substitute(f, &self.bindings())?)
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &SmoothMap) -> Result<SmoothMap, GeometryError> {
        same_chart(&inner.target, &self.source)?;
        let b = inner.bindings();
        let components = self.components.iter().map(|c| substitute(c, &b)).collect::<Result<_, _>>()?;
        Ok(SmoothMap { source: inner.source.clone(), target: self.target.clone(), components })
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target && self.components.iter().enumerate().all(|(i, c)| *c == self.source.coord_expr(i))
    }
}

impl fmt::Debug for SmoothMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.target.coords().iter().zip(&self.components).map(|(t, c)| format!("{t} -> {c}")).collect();
        write!(f, "SmoothMap({})", parts.join(", "))
    }
}

/// `F^* ω`: substitute the components and expand the differentials.
pub fn pullback(map: &SmoothMap, omega: &KForm) -> Result<KForm, GeometryError> {
    same_chart(&map.target, &omega.chart)?;
    let src = &map.source;
    let b = map.bindings();
    let dfs: Vec<KForm> = map
        .components
        .iter()
        .map(|c| KForm::one_form(src, src.coords().iter().map(|x| c.diff(x)).collect()))
        .collect::<Result<_, _>>()?;
    let mut out = KForm::zero(src, omega.degree);
    for (idx, c) in &omega.coeffs {
        let mut term = KForm::function(src, substitute(c, &b)?);
        for &i in idx {
            term = wedge(&term, &dfs[i])?;
        }
        if term.degree == omega.degree {
            out = out.add(&term)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: &str) -> Expr {
        s.parse().unwrap()
    }

    fn xup() -> Chart {
        Chart::new(&["x", "u", "p"]).unwrap()
    }

    #[test]
    fn pairing_and_brackets() {
        let c = xup();
        let w = KForm::from_pairs(&c, &[("u", e("1")), ("x", e("-p"))]).unwrap();
        let x = VectorField::from_pairs(&c, &[("x", e("1")), ("u", e("p"))]).unwrap();
        assert!(pair(&w, &x).unwrap().is_zero());
        let dp = VectorField::coordinate(&c, 2);
        assert_eq!(bracket(&x, &dp).unwrap(), VectorField::coordinate(&c, 1).neg());
        assert!(Chart::new(&["x", "x"]).is_err());
    }

    #[test]
    fn exterior_calculus() {
        let c = xup();
        let w = KForm::from_pairs(&c, &[("u", e("1")), ("x", e("-p"))]).unwrap();
        let dw = exterior_derivative(&w).unwrap();
        assert_eq!(dw, KForm::new(&c, 2, vec![(vec![0, 2], e("1"))]).unwrap());
        assert_eq!(dw.to_string(), "dx^dp");
        let x = VectorField::from_pairs(&c, &[("x", e("1")), ("u", e("p"))]).unwrap();
        assert_eq!(lie_derivative(&x, &w).unwrap(), KForm::differential(&c, 2));
        assert!(lie_derivative(&VectorField::coordinate(&c, 0), &w).unwrap().is_zero());
        assert_eq!(interior_product(&VectorField::coordinate(&c, 0), &dw).unwrap(), KForm::differential(&c, 2));
        assert!(interior_product(&VectorField::coordinate(&c, 1), &dw).unwrap().is_zero());
    }

    #[test]
    fn wedge_products() {
        let c = xup();
        let dx = KForm::differential(&c, 0);
        let du = KForm::differential(&c, 1);
        assert!(wedge(&dx, &dx).unwrap().is_zero());
        assert_eq!(wedge(&dx, &du).unwrap(), wedge(&du, &dx).unwrap().neg());
        let w = KForm::from_pairs(&c, &[("u", e("1")), ("x", e("-p"))]).unwrap();
        assert_eq!(wedge(&w, &dx).unwrap(), wedge(&du, &dx).unwrap());
    }

    #[test]
    fn pullbacks() {
        let c = xup();
        let w = KForm::from_pairs(&c, &[("u", e("1")), ("x", e("-p"))]).unwrap();
        assert_eq!(pullback(&SmoothMap::identity(&c), &w).unwrap(), w);
        let shift = SmoothMap::new(&c, &c, vec![e("x + c"), e("u"), e("p")]).unwrap();
        assert_eq!(pullback(&shift, &w).unwrap(), w);
        let line = Chart::new(&["x"]).unwrap();
        let sq = SmoothMap::new(&line, &line, vec![e("x^2")]).unwrap();
        let got = pullback(&sq, &KForm::differential(&line, 0)).unwrap();
        assert_eq!(got, KForm::one_form(&line, vec![e("2*x")]).unwrap());
    }

    #[test]
    fn display_fields() {
        let c = Chart::new(&["u", "p", "q"]).unwrap();
        let v = VectorField::new(&c, vec![e("-p"), e("-r"), e("-a*u - b*u^3")]).unwrap();
        assert_eq!(v.to_string(), "-p*Du - r*Dp - (a*u + b*u^3)*Dq");
    }
}
