//! Symmetry ansätze, determining equations, candidate verification and
//! Lie-series flows.

use crate::distribution::{Distribution, DistributionError};
use crate::expr::{
    collect, substitute, zero_status, Bindings, CollectError, Expr, FunctionBinding, SubstError, Symbol, VarMonomial,
    ZeroStatus,
};
use crate::geometry::{lie_derivative, pair, Chart, GeometryError, SmoothMap, VectorField};
use num::BigInt;
use rayon::prelude::*;
use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SymmetryError {
    #[error(transparent)]
    Distribution(#[from] DistributionError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Subst(#[from] SubstError),
    #[error("pairing ({form},{generator}) is not polynomial in the collection variables: {source}; expression {expr}")]
    Collect { form: usize, generator: usize, expr: Expr, source: CollectError },
    #[error("no binding for undetermined function `{0}`")]
    Unbound(String),
    #[error("invalid ansatz: {0}")]
    Ansatz(String),
    #[error("flow parameter `{0}` clashes with a chart coordinate")]
    ParameterClash(String),
}

type Result<T> = std::result::Result<T, SymmetryError>;

/// One coefficient of an ansatz.
#[derive(Debug, Clone, PartialEq)]
pub enum Component {
    Given(Expr),
    /// Undetermined function of the listed coordinates.
    Unknown { name: Symbol, args: Vec<Symbol> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryAnsatz {
    chart: Chart,
    components: Vec<Component>,
}

impl SymmetryAnsatz {
    pub fn new(chart: &Chart, components: Vec<Component>) -> Result<Self> {
        if components.len() != chart.dim() {
            return Err(SymmetryError::Ansatz(format!("{} components for dimension {}", components.len(), chart.dim())));
        }
        let mut names = BTreeSet::new();
        for c in &components {
            if let Component::Unknown { name, args } = c {
                if !names.insert(name.clone()) {
                    return Err(SymmetryError::Ansatz(format!("function `{name}` used twice")));
                }
                if let Some(a) = args.iter().find(|a| !chart.coords().contains(a)) {
                    return Err(SymmetryError::Ansatz(format!("argument `{a}` of `{name}` is not a coordinate")));
                }
            }
        }
        Ok(SymmetryAnsatz { chart: chart.clone(), components })
    }

    /// Every coefficient an undetermined function of all coordinates, named by `names`.
    pub fn general(chart: &Chart, names: &[&str]) -> Result<Self> {
        let comps = names
            .iter()
            .map(|n| Component::Unknown { name: Symbol::new(n), args: chart.coords().to_vec() })
            .collect();
        SymmetryAnsatz::new(chart, comps)
    }

    /// Ansatz with no undetermined parts.
    pub fn concrete(field: &VectorField) -> Self {
        SymmetryAnsatz {
            chart: field.chart().clone(),
            components: field.coeffs().iter().cloned().map(Component::Given).collect(),
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn unknowns(&self) -> Vec<(Symbol, Vec<Symbol>)> {
        self.components
            .iter()
            .filter_map(|c| match c {
                Component::Unknown { name, args } => Some((name.clone(), args.clone())),
                Component::Given(_) => None,
            })
            .collect()
    }

    /// The vector field with undetermined slots as applied functions.
    pub fn realize(&self) -> VectorField {
        let coeffs = self
            .components
            .iter()
            .map(|c| match c {
                Component::Given(e) => e.clone(),
                Component::Unknown { name, args } => Expr::apply(name.as_str(), args.iter().map(Expr::sym).collect()),
            })
            .collect();
        VectorField::new(&self.chart, coeffs).expect("length checked at construction")
    }

    /// Coordinates no undetermined function depends on.
    pub fn collection_vars(&self) -> Vec<Symbol> {
        let used: BTreeSet<&Symbol> = self
            .components
            .iter()
            .flat_map(|c| match c {
                Component::Unknown { args, .. } => args.iter().collect::<Vec<_>>(),
                Component::Given(_) => Vec::new(),
            })
            .collect();
        self.chart.coords().iter().filter(|c| !used.contains(c)).cloned().collect()
    }

    /// Bindings that turn this ansatz into `field`. Fails when `field` uses a
    /// coordinate outside an unknown's argument list or disagrees on a given slot.
    pub fn bindings_for(&self, field: &VectorField) -> Result<Bindings> {
        if field.chart() != &self.chart {
            return Err(GeometryError::ChartMismatch.into());
        }
        let mut b = Bindings::new();
        for (k, c) in self.components.iter().enumerate() {
            let value = field.coeff(k);
            match c {
                Component::Given(e) => {
                    if !(e - value).is_zero() {
                        return Err(SymmetryError::Ansatz(format!(
                            "component {} is fixed to {e}, candidate has {value}",
                            self.chart.coord(k)
                        )));
                    }
                }
                Component::Unknown { name, args } => {
                    let stray = value
                        .free_symbols()
                        .into_iter()
                        .find(|s| self.chart.coords().contains(s) && !args.contains(s));
                    if let Some(s) = stray {
                        return Err(SymmetryError::Ansatz(format!("candidate for `{name}` depends on `{s}`")));
                    }
                    b.functions.insert(name.clone(), FunctionBinding { params: args.clone(), body: value.clone() });
                }
            }
        }
        Ok(b)
    }
}

/// One determining equation with its origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Equation {
    /// 0-based coform index.
    pub form: usize,
    /// 0-based generator index.
    pub generator: usize,
    pub monomial: VarMonomial,
    pub expr: Expr,
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{}): {}", self.form + 1, self.generator + 1, self.monomial, self.expr)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeterminingSystem {
    pub equations: Vec<Equation>,
    pub unknowns: Vec<(Symbol, Vec<Symbol>)>,
}

impl DeterminingSystem {
    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.equations.len()
    }
}

impl fmt::Display for DeterminingSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for eq in &self.equations {
            writeln!(f, "{eq}")?;
        }
        Ok(())
    }
}

/// `(L_Z ω^i)(X_j)` for every coform and generator, split by monomials in the
/// collection variables.
pub fn determining_equations(d: &Distribution, z: &SymmetryAnsatz) -> Result<DeterminingSystem> {
    if z.chart() != d.chart() {
        return Err(GeometryError::ChartMismatch.into());
    }
    let forms = d.coforms()?;
    let gens = d.tangent();
    let field = z.realize();
    let vars = z.collection_vars();
    let jobs: Vec<(usize, usize)> = (0..forms.len()).flat_map(|i| (0..gens.len()).map(move |j| (i, j))).collect();
    let chunks = jobs
        .par_iter()
        .map(|&(i, j)| {
            let l = lie_derivative(&field, &forms[i])?;
            let v = pair(&l, &gens[j])?;
            let parts = collect(&v, &vars)
                .map_err(|source| SymmetryError::Collect { form: i, generator: j, expr: v.clone(), source })?;
            Ok(parts
                .into_iter()
                .map(|(monomial, expr)| Equation { form: i, generator: j, monomial, expr })
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DeterminingSystem { equations: chunks.into_iter().flatten().collect(), unknowns: z.unknowns() })
}

/// Substitute a candidate into every equation and report each residual.
pub fn verify_candidate(sys: &DeterminingSystem, bindings: &Bindings) -> Result<Vec<ZeroStatus>> {
    for (name, _) in &sys.unknowns {
        if !bindings.functions.contains_key(name) {
            return Err(SymmetryError::Unbound(name.to_string()));
        }
    }
    sys.equations
        .par_iter()
        .map(|eq| Ok(zero_status(&substitute(&eq.expr, bindings)?)))
        .collect()
}

/// Residual expressions after substitution, in equation order.
pub fn residuals(sys: &DeterminingSystem, bindings: &Bindings) -> Result<Vec<Expr>> {
    sys.equations.par_iter().map(|eq| Ok(substitute(&eq.expr, bindings)?)).collect()
}

pub const DEFAULT_FLOW_ORDER: usize = 12;

/// `Σ_k s^k/k! X^k(c)` per coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowMap {
    pub param: Symbol,
    pub chart: Chart,
    pub components: Vec<Expr>,
    /// The series terminated for every coordinate.
    pub exact: bool,
    /// Highest power of the parameter present when exact, else the truncation order.
    pub degree: usize,
}

impl FlowMap {
    /// Coefficient of `param^k` in coordinate `i`.
    pub fn coefficient(&self, i: usize, k: u32) -> Expr {
        crate::expr::coefficient(&self.components[i], std::slice::from_ref(&self.param), &[k])
            .expect("flow components are polynomial in the parameter")
    }

    /// Flow fixes every coordinate in `coords`.
    pub fn fixes(&self, coords: &[usize]) -> bool {
        coords.iter().all(|&i| self.components[i] == self.chart.coord_expr(i))
    }
}

impl fmt::Display for FlowMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (c, e) in self.chart.coords().iter().zip(&self.components) {
            writeln!(f, "{c} -> {e}")?;
        }
        Ok(())
    }
}

pub fn lie_series_flow(x: &VectorField, max_order: usize) -> Result<FlowMap> {
    lie_series_flow_with(x, max_order, "s")
}

pub fn lie_series_flow_with(x: &VectorField, max_order: usize, param: &str) -> Result<FlowMap> {
    let chart = x.chart();
    let s = Symbol::new(param);
    if chart.coords().contains(&s) {
        return Err(SymmetryError::ParameterClash(param.to_string()));
    }
    let max_order = max_order.max(1);
    let sx = Expr::sym(&s);
    let results: Vec<(Expr, Option<usize>)> = (0..chart.dim())
        .into_par_iter()
        .map(|i| {
            let mut term = chart.coord_expr(i);
            let mut sum = term.clone();
            let mut factorial = BigInt::from(1);
            let mut last = 0;
            for k in 1..=max_order {
                term = x.apply(&term);
                if term.is_zero() {
                    return (sum, Some(last));
                }
                factorial *= k;
                let c = Expr::rational(crate::expr::Rational::new(BigInt::from(1), factorial.clone()));
                sum = sum + &term * c * sx.pow(k as i64);
                last = k;
            }
            let terminated = x.apply(&term).is_zero();
            (sum, terminated.then_some(last))
        })
        .collect();
    let exact = results.iter().all(|(_, t)| t.is_some());
    let degree = if exact { results.iter().map(|(_, t)| t.unwrap()).max().unwrap_or(0) } else { max_order };
    Ok(FlowMap { param: s, chart: chart.clone(), components: results.into_iter().map(|(e, _)| e).collect(), exact, degree })
}

/// The flow at a fixed parameter value, as a self-map of the chart.
pub fn flow_as_map(fl: &FlowMap, s_value: &Expr) -> Result<SmoothMap> {
    let b = Bindings::new().symbol(fl.param.as_str(), s_value.clone());
    let comps = fl.components.iter().map(|c| substitute(c, &b)).collect::<std::result::Result<_, _>>()?;
    Ok(SmoothMap::new(&fl.chart, &fl.chart, comps)?)
}
