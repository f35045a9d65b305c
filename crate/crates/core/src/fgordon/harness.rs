//! Grid sampling, finite differences and flows evaluated on solution graphs.
//!
//! Derivatives use five-point central stencils (fourth order), so the valid
//! region shrinks by two points per differentiation and side. Invalid entries
//! are NaN and residual maxima skip them.

use super::{FGordonError, Result};
use crate::expr::{eval_numeric, Expr, FunctionTable, NumericPoint, Symbol};
use crate::geometry::VectorField;
use crate::symmetry::FlowMap;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64, nx: usize, ny: usize) -> Result<Self> {
        if nx < 5 || ny < 5 {
            return Err(FGordonError::GridTooSmall(nx, ny));
        }
        if !(xmax > xmin && ymax > ymin) {
            return Err(FGordonError::Invalid("grid bounds must be increasing".into()));
        }
        Ok(GridSpec { xmin, xmax, ymin, ymax, nx, ny })
    }

    /// `[-1, 1]^2` with 101 points per side.
    pub fn unit_square() -> Self {
        GridSpec { xmin: -1.0, xmax: 1.0, ymin: -1.0, ymax: 1.0, nx: 101, ny: 101 }
    }

    pub fn hx(&self) -> f64 {
        (self.xmax - self.xmin) / (self.nx - 1) as f64
    }

    pub fn hy(&self) -> f64 {
        (self.ymax - self.ymin) / (self.ny - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.xmin + i as f64 * self.hx()
    }

    pub fn y(&self, j: usize) -> f64 {
        self.ymin + j as f64 * self.hy()
    }

    fn len(&self) -> usize {
        self.nx * self.ny
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.ny + j
    }

    /// Evaluate `f(i, j)` at every node in parallel.
    fn sample<F>(&self, f: F) -> Result<Vec<f64>>
    where
        F: Fn(usize, usize) -> Result<f64> + Sync,
    {
        (0..self.len()).into_par_iter().map(|k| f(k / self.ny, k % self.ny)).collect()
    }
}

/// `u, u_x, u_y, u_xx, u_yy` sampled on a grid.
#[derive(Debug, Clone)]
pub struct Prolongation {
    pub u: Vec<f64>,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub r: Vec<f64>,
    pub t: Vec<f64>,
}

impl Prolongation {
    /// Named jet values at node `k`, together with the base point.
    fn point(&self, spec: &GridSpec, k: usize) -> NumericPoint {
        let (i, j) = (k / spec.ny, k % spec.ny);
        [
            ("x", spec.x(i)),
            ("y", spec.y(j)),
            ("u", self.u[k]),
            ("p", self.p[k]),
            ("q", self.q[k]),
            ("r", self.r[k]),
            ("t", self.t[k]),
        ]
        .into_iter()
        .map(|(n, v)| (Symbol::new(n), v))
        .collect()
    }
}

#[derive(Debug, Clone)]
pub struct SolutionGrid {
    pub spec: GridSpec,
    pub values: Vec<f64>,
    /// Exact partials when the solution is known in closed form.
    pub exact: Option<Prolongation>,
}

fn eval_at(e: &Expr, point: &NumericPoint) -> Result<f64> {
    Ok(eval_numeric(e, point, &FunctionTable::new())?)
}

fn xy_point(spec: &GridSpec, i: usize, j: usize) -> NumericPoint {
    [(Symbol::new("x"), spec.x(i)), (Symbol::new("y"), spec.y(j))].into_iter().collect()
}

impl SolutionGrid {
    /// Sample `h(x, y)` and its partials, differentiated symbolically.
    pub fn from_expr(h: &Expr, spec: GridSpec) -> Result<Self> {
        let (x, y) = (Symbol::new("x"), Symbol::new("y"));
        let stray = h.free_symbols().into_iter().find(|s| *s != x && *s != y);
        if let Some(s) = stray {
            return Err(FGordonError::StraySymbol(s.to_string()));
        }
        let hx = h.diff(&x);
        let hy = h.diff(&y);
        let exprs = [h.clone(), hx.diff(&x), hy.diff(&y), hx, hy];
        let cols = exprs
            .iter()
            .map(|e| spec.sample(|i, j| eval_at(e, &xy_point(&spec, i, j))))
            .collect::<Result<Vec<_>>>()?;
        let [u, r, t, p, q]: [Vec<f64>; 5] = cols.try_into().expect("five columns");
        Ok(SolutionGrid { spec, values: u.clone(), exact: Some(Prolongation { u, p, q, r, t }) })
    }

    pub fn from_samples(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(FGordonError::Invalid(format!("{} samples for a {}x{} grid", values.len(), spec.nx, spec.ny)));
        }
        Ok(SolutionGrid { spec, values, exact: None })
    }

    /// Exact partials if known, finite differences otherwise.
    pub fn prolongation(&self) -> Prolongation {
        if let Some(p) = &self.exact {
            return p.clone();
        }
        let s = &self.spec;
        Prolongation {
            u: self.values.clone(),
            p: d_x(s, &self.values),
            q: d_y(s, &self.values),
            r: d_xx(s, &self.values),
            t: d_yy(s, &self.values),
        }
    }

    /// `max |u_xy - F(x, y, u, u_x, u_y)|` with every derivative by finite differences.
    pub fn pde_residual(&self, f: &Expr) -> Result<f64> {
        pde_residual_of(f, &self.spec, &self.values)
    }
}

/// A closed-form solution with the grid it is sampled on.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: String,
    pub solution: Expr,
    pub spec: GridSpec,
}

impl Fixture {
    pub fn grid(&self) -> Result<SolutionGrid> {
        SolutionGrid::from_expr(&self.solution, self.spec)
    }

    /// `max |h_xy - F(x, y, h, h_x, h_y)|` at the nodes with symbolic partials.
    pub fn exact_residual(&self, f: &Expr) -> Result<f64> {
        let (x, y) = (Symbol::new("x"), Symbol::new("y"));
        let h = &self.solution;
        let b = crate::expr::Bindings::new()
            .symbol("u", h.clone())
            .symbol("p", h.diff(&x))
            .symbol("q", h.diff(&y));
        let defect = h.diff(&x).diff(&y) - crate::expr::substitute(f, &b)?;
        let spec = self.spec;
        let vals = spec.sample(|i, j| eval_at(&defect, &xy_point(&spec, i, j)))?;
        Ok(max_finite(&vals).unwrap_or(0.0))
    }
}

fn stencil_1(h: f64, a: f64, b: f64, d: f64, e: f64) -> f64 {
    (a - 8.0 * b + 8.0 * d - e) / (12.0 * h)
}

fn stencil_2(h: f64, a: f64, b: f64, c: f64, d: f64, e: f64) -> f64 {
    (-a + 16.0 * b - 30.0 * c + 16.0 * d - e) / (12.0 * h * h)
}

fn diff_along(spec: &GridSpec, v: &[f64], along_x: bool, second: bool) -> Vec<f64> {
    let (n, h) = if along_x { (spec.nx, spec.hx()) } else { (spec.ny, spec.hy()) };
    (0..spec.len())
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / spec.ny, k % spec.ny);
            let pos = if along_x { i } else { j };
            if pos < 2 || pos + 2 >= n {
                return f64::NAN;
            }
            let at = |off: isize| {
                let m = (pos as isize + off) as usize;
                if along_x {
                    v[spec.idx(m, j)]
                } else {
                    v[spec.idx(i, m)]
                }
            };
            if second {
                stencil_2(h, at(-2), at(-1), at(0), at(1), at(2))
            } else {
                stencil_1(h, at(-2), at(-1), at(1), at(2))
            }
        })
        .collect()
}

fn d_x(spec: &GridSpec, v: &[f64]) -> Vec<f64> {
    diff_along(spec, v, true, false)
}

fn d_y(spec: &GridSpec, v: &[f64]) -> Vec<f64> {
    diff_along(spec, v, false, false)
}

fn d_xx(spec: &GridSpec, v: &[f64]) -> Vec<f64> {
    diff_along(spec, v, true, true)
}

fn d_yy(spec: &GridSpec, v: &[f64]) -> Vec<f64> {
    diff_along(spec, v, false, true)
}

fn max_finite(v: &[f64]) -> Option<f64> {
    v.iter().copied().filter(|x| x.is_finite()).fold(None, |m, x| Some(m.map_or(x.abs(), |m: f64| m.max(x.abs()))))
}

fn max_residual(v: &[f64], spec: &GridSpec) -> Result<f64> {
    max_finite(v).ok_or(FGordonError::GridTooSmall(spec.nx, spec.ny))
}

fn pde_residual_of(f: &Expr, spec: &GridSpec, u: &[f64]) -> Result<f64> {
    let ux = d_x(spec, u);
    let uy = d_y(spec, u);
    let uxy = d_y(spec, &ux);
    let res = spec.sample(|i, j| {
        let k = spec.idx(i, j);
        if !uxy[k].is_finite() {
            return Ok(f64::NAN);
        }
        let mut pt = xy_point(spec, i, j);
        pt.insert(Symbol::new("u"), u[k]);
        pt.insert(Symbol::new("p"), ux[k]);
        pt.insert(Symbol::new("q"), uy[k]);
        Ok(uxy[k] - eval_at(f, &pt)?)
    })?;
    max_residual(&res, spec)
}

/// `max |D_x D_y phi - F_u phi - F_p D_x phi - F_q D_y phi|` on the graph of the
/// grid's solution, with `phi` evaluated through the prolongation.
pub fn linearized_residual(f: &Expr, grid: &SolutionGrid, phi: &Expr) -> Result<f64> {
    let spec = &grid.spec;
    let jet = grid.prolongation();
    let [fu, fp, fq] = ["u", "p", "q"].map(|v| f.diff(&Symbol::new(v)));
    let eval_all = |e: &Expr| {
        spec.sample(|i, j| {
            let k = spec.idx(i, j);
            let pt = jet.point(spec, k);
            if pt.values().any(|v| !v.is_finite()) {
                return Ok(f64::NAN);
            }
            eval_at(e, &pt)
        })
    };
    let ph = eval_all(phi)?;
    let phx = d_x(spec, &ph);
    let phy = d_y(spec, &ph);
    let phxy = d_y(spec, &phx);
    let (fu, fp, fq) = (eval_all(&fu)?, eval_all(&fp)?, eval_all(&fq)?);
    let res: Vec<f64> = (0..ph.len()).map(|k| phxy[k] - fu[k] * ph[k] - fp[k] * phx[k] - fq[k] * phy[k]).collect();
    max_residual(&res, spec)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransportRow {
    pub s: f64,
    pub max_residual: f64,
    /// Log-log slope against the previous row.
    pub empirical_order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransportReport {
    pub rows: Vec<TransportRow>,
}

impl TransportReport {
    pub fn min_order(&self) -> Option<f64> {
        self.rows.iter().filter_map(|r| r.empirical_order).reduce(f64::min)
    }

    pub fn max_residual(&self) -> f64 {
        self.rows.iter().map(|r| r.max_residual).fold(0.0, f64::max)
    }
}

/// Push the graph of the grid's solution along a vertical flow and measure how
/// well the new `u` solves `u_xy = F` for each parameter value.
pub fn transport_solution(f: &Expr, fl: &FlowMap, grid: &SolutionGrid, s_values: &[f64]) -> Result<TransportReport> {
    let chart = &fl.chart;
    let index = |n: &str| chart.index_of(n);
    for base in ["x", "y"] {
        if let Some(i) = index(base) {
            if fl.components[i] != chart.coord_expr(i) {
                return Err(FGordonError::NotVertical);
            }
        }
    }
    let ui = index("u").ok_or_else(|| FGordonError::Invalid("flow chart has no `u` coordinate".into()))?;
    let spec = &grid.spec;
    let jet = grid.prolongation();
    let mut rows: Vec<TransportRow> = Vec::with_capacity(s_values.len());
    for &s in s_values {
        let moved = spec.sample(|i, j| {
            let k = spec.idx(i, j);
            let mut pt = jet.point(spec, k);
            pt.insert(fl.param.clone(), s);
            if pt.values().any(|v| !v.is_finite()) {
                return Ok(f64::NAN);
            }
            eval_at(&fl.components[ui], &pt)
        })?;
        let max_residual = pde_residual_of(f, spec, &moved)?;
        let empirical_order = rows.last().and_then(|prev| {
            let ok = prev.s != 0.0 && s != 0.0 && prev.s != s && prev.max_residual > 0.0 && max_residual > 0.0;
            ok.then(|| (max_residual / prev.max_residual).ln() / (s.abs() / prev.s.abs()).ln())
        });
        rows.push(TransportRow { s, max_residual, empirical_order });
    }
    Ok(TransportReport { rows })
}

/// Classical Runge-Kutta integral curve of `x` from `start` over `[0, t_final]`.
pub fn integrate_flow_numeric(x: &VectorField, start: &[f64], t_final: f64, steps: usize) -> Result<Vec<f64>> {
    let chart = x.chart();
    if start.len() != chart.dim() {
        return Err(FGordonError::Invalid(format!("start point has {} entries for dimension {}", start.len(), chart.dim())));
    }
    if steps == 0 || t_final == 0.0 {
        return Ok(start.to_vec());
    }
    let table = FunctionTable::new();
    let rhs = |z: &[f64]| -> Result<Vec<f64>> {
        let pt: NumericPoint = chart.coords().iter().cloned().zip(z.iter().copied()).collect();
        x.coeffs().iter().map(|c| Ok(eval_numeric(c, &pt, &table)?)).collect()
    };
    let h = t_final / steps as f64;
    let axpy = |z: &[f64], k: &[f64], a: f64| z.iter().zip(k).map(|(z, k)| z + a * k).collect::<Vec<_>>();
    let mut z = start.to_vec();
    for _ in 0..steps {
        let k1 = rhs(&z)?;
        let k2 = rhs(&axpy(&z, &k1, h / 2.0))?;
        let k3 = rhs(&axpy(&z, &k2, h / 2.0))?;
        let k4 = rhs(&axpy(&z, &k3, h))?;
        for i in 0..z.len() {
            z[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    Ok(z)
}
