//! Cartan ODE models, the jet model of `u_xy = F(x,y,u,u_x,u_y)`, the
//! Klein-Gordon instance `F = a*u + b*u^3`, and their symmetry formulas.
//!
//! The jet chart is `(x, y, u, p, q, r, t)` with `p = u_x`, `q = u_y`,
//! `r = u_xx`, `t = u_yy`; the mixed second derivative is eliminated by the
//! equation itself.

mod harness;

pub use harness::{
    integrate_flow_numeric, linearized_residual, transport_solution, Fixture, GridSpec, Prolongation, SolutionGrid,
    TransportReport, TransportRow,
};

use crate::distribution::{Distribution, DistributionError};
use crate::expr::{EvalError, Expr, SubstError, Symbol, ZeroStatus};
use crate::geometry::{lie_derivative, pair, Chart, GeometryError, KForm, SmoothMap, VectorField};
use crate::symmetry::{determining_equations, verify_candidate, DeterminingSystem, SymmetryAnsatz, SymmetryError};
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FGordonError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Distribution(#[from] DistributionError),
    #[error(transparent)]
    Symmetry(#[from] SymmetryError),
    #[error(transparent)]
    Subst(#[from] SubstError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("symbol `{0}` is neither an allowed coordinate nor a declared parameter")]
    StraySymbol(String),
    #[error("alpha must be nonzero")]
    ZeroAlpha,
    #[error("grid needs at least 5 points per direction, got {0}x{1}")]
    GridTooSmall(usize, usize),
    #[error("flow moves the base coordinates; only vertical flows can transport solutions")]
    NotVertical,
    #[error("cannot solve for {0}: {1}")]
    Unsolvable(String, String),
    #[error("{0}")]
    Invalid(String),
}

type Result<T> = std::result::Result<T, FGordonError>;

pub const JET_COORDS: [&str; 7] = ["x", "y", "u", "p", "q", "r", "t"];
const X: usize = 0;
const Y: usize = 1;
const U: usize = 2;
const P: usize = 3;
const Q: usize = 4;
const R: usize = 5;
const T: usize = 6;

fn sym(s: &str) -> Symbol {
    Symbol::new(s)
}

fn ex(s: &str) -> Expr {
    Expr::symbol(s)
}

fn check_symbols(e: &Expr, allowed: &[&str], params: &[&str]) -> Result<()> {
    let ok: BTreeSet<&str> = allowed.iter().chain(params).copied().collect();
    match e.free_symbols().into_iter().find(|s| !ok.contains(s.as_str())) {
        Some(s) => Err(FGordonError::StraySymbol(s.to_string())),
        None => Ok(()),
    }
}

/// The order-`k` ODE `h^(k) = f(x, h, ..., h^(k-1))` as a line field.
#[derive(Debug, Clone)]
pub struct CartanModel {
    pub k: usize,
    pub f: Expr,
    pub field: VectorField,
    pub distribution: Distribution,
}

impl CartanModel {
    pub fn chart(&self) -> &Chart {
        self.distribution.chart()
    }
}

pub fn cartan_coords(k: usize) -> Vec<String> {
    std::iter::once("x".to_string()).chain((0..k).map(|i| format!("p{i}"))).collect()
}

/// Coordinates `x, p0, ..., p{k-1}`; generator `Dx + p1*Dp0 + ... + f*Dp{k-1}`.
pub fn cartan_model(k: usize, f: &Expr, params: &[&str]) -> Result<CartanModel> {
    if k == 0 {
        return Err(FGordonError::Invalid("order must be at least 1".into()));
    }
    let names = cartan_coords(k);
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    check_symbols(f, &refs, params)?;
    let chart = Chart::new(&refs)?;
    let next = |i: usize| if i + 1 < k { chart.coord_expr(i + 2) } else { f.clone() };
    let mut coeffs = vec![Expr::one()];
    coeffs.extend((0..k).map(next));
    let field = VectorField::new(&chart, coeffs)?;
    let coforms = (0..k)
        .map(|i| KForm::differential(&chart, i + 1).sub(&KForm::differential(&chart, 0).scale(&next(i))))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let distribution = Distribution::with_coforms(&chart, vec![field.clone()], coforms)?
        .with_names(vec!["X1".into()])
        .with_vertical((1..=k).collect());
    Ok(CartanModel { k, f: f.clone(), field, distribution })
}

/// Jet model of `u_xy = F` on `(x, y, u, p, q, r, t)`.
#[derive(Debug, Clone)]
pub struct FGordonModel {
    pub f: Expr,
    pub distribution: Distribution,
}

impl FGordonModel {
    pub fn chart(&self) -> &Chart {
        self.distribution.chart()
    }

    /// Total x-derivative restricted to the equation.
    pub fn x1(&self) -> &VectorField {
        &self.distribution.tangent()[0]
    }

    /// Total y-derivative restricted to the equation.
    pub fn x2(&self) -> &VectorField {
        &self.distribution.tangent()[1]
    }

    /// `du - p dx - q dy`, `dp - r dx - F dy`, `dq - F dx - t dy`.
    pub fn omegas(&self) -> Vec<KForm> {
        let c = self.chart();
        let d = |i| KForm::differential(c, i);
        let form = |lead: usize, a: Expr, b: Expr| {
            d(lead).sub(&d(X).scale(&a)).and_then(|w| w.sub(&d(Y).scale(&b))).expect("same chart")
        };
        vec![form(U, ex("p"), ex("q")), form(P, ex("r"), self.f.clone()), form(Q, self.f.clone(), ex("t"))]
    }

    /// Determining system of the general ansatz: seven undetermined functions
    /// `X, Y, U, P, Q, R, T` of all coordinates.
    pub fn raw_system(&self) -> Result<DeterminingSystem> {
        let ansatz = SymmetryAnsatz::general(self.chart(), &["X", "Y", "U", "P", "Q", "R", "T"])?;
        Ok(determining_equations(&self.distribution, &ansatz)?)
    }

    /// Residual status of a concrete field on the raw system.
    pub fn verify(&self, sys: &DeterminingSystem, z: &VectorField) -> Result<Vec<ZeroStatus>> {
        let ansatz = SymmetryAnsatz::general(self.chart(), &["X", "Y", "U", "P", "Q", "R", "T"])?;
        let b = ansatz.bindings_for(z)?;
        Ok(verify_candidate(sys, &b)?)
    }

    /// Graph of a function `h(x, y)` and its derivatives as a map from `(x, y)`.
    pub fn graph_map(&self, h: &Expr) -> Result<SmoothMap> {
        check_symbols(h, &["x", "y"], &[])?;
        let (x, y) = (sym("x"), sym("y"));
        let hx = h.diff(&x);
        let hy = h.diff(&y);
        let (hxx, hyy) = (hx.diff(&x), hy.diff(&y));
        let comps = vec![ex("x"), ex("y"), h.clone(), hx, hy, hxx, hyy];
        let base = Chart::new(&["x", "y"])?;
        Ok(SmoothMap::new(&base, self.chart(), comps)?)
    }
}

pub fn fgordon_model(f: &Expr, params: &[&str]) -> Result<FGordonModel> {
    check_symbols(f, &JET_COORDS[..5], params)?;
    let chart = Chart::new(&JET_COORDS)?;
    let x1 = VectorField::from_pairs(&chart, &[("x", Expr::one()), ("u", ex("p")), ("p", ex("r")), ("q", f.clone())])?;
    let x2 = VectorField::from_pairs(&chart, &[("y", Expr::one()), ("u", ex("q")), ("p", f.clone()), ("q", ex("t"))])?;
    let tangent = vec![x1, x2, VectorField::coordinate(&chart, R), VectorField::coordinate(&chart, T)];
    let mut model = FGordonModel { f: f.clone(), distribution: Distribution::from_tangent(&chart, tangent.clone())? };
    let coforms = model.omegas();
    model.distribution = Distribution::with_coforms(&chart, tangent, coforms)?
        .with_names(vec!["X1".into(), "X2".into(), "Dr".into(), "Dt".into()])
        .with_vertical(vec![U, P, Q]);
    Ok(model)
}

/// `u_xy = a*u + b*u^3` with the three shuffling generators in their printed form.
#[derive(Debug, Clone)]
pub struct KleinGordonInstance {
    pub a: Expr,
    pub b: Expr,
    pub model: FGordonModel,
    /// `X1, X2, X3`.
    pub generators: Vec<VectorField>,
}

/// The coefficient `u^2*(a + b*u)` used by the printed generators.
pub fn printed_coefficient(a: &Expr, b: &Expr) -> Expr {
    ex("u").pow(2) * (a + b * ex("u"))
}

pub fn klein_gordon(a: &Expr, b: &Expr) -> Result<KleinGordonInstance> {
    let params: Vec<String> = a.free_symbols().union(&b.free_symbols()).map(|s| s.to_string()).collect();
    let params: Vec<&str> = params.iter().map(String::as_str).collect();
    let u = ex("u");
    let f = a * &u + b * u.pow(3);
    let model = fgordon_model(&f, &params)?;
    let g = printed_coefficient(a, b);
    let generators = vec![
        x1_variant(&model, -1, 1, &g)?,
        VectorField::from_pairs(model.chart(), &[("u", ex("q")), ("p", g.clone()), ("q", ex("t"))])?,
        VectorField::from_pairs(model.chart(), &[("u", ex("p")), ("p", ex("r")), ("q", g)])?,
    ];
    Ok(KleinGordonInstance { a: a.clone(), b: b.clone(), model, generators })
}

/// `(px - qy)Du + (sp*p - y*g + r*x)Dp + (sq*q + x*g - t*y)Dq`; the printed form
/// has `sp = -1`, `sq = 1`.
pub fn x1_variant(model: &FGordonModel, sp: i64, sq: i64, g: &Expr) -> Result<VectorField> {
    let (x, y, p, q) = (ex("x"), ex("y"), ex("p"), ex("q"));
    Ok(VectorField::from_pairs(
        model.chart(),
        &[
            ("u", &p * &x - &q * &y),
            ("p", Expr::integer(sp) * &p - &y * g + ex("r") * &x),
            ("q", Expr::integer(sq) * &q + &x * g - ex("t") * &y),
        ],
    )?)
}

/// `(a, b) = (-(gamma/alpha)^2, beta/alpha^2)`.
pub fn kg_from_physical(alpha: &Expr, beta: &Expr, gamma: &Expr) -> Result<(Expr, Expr)> {
    if alpha.is_zero() {
        return Err(FGordonError::ZeroAlpha);
    }
    let a2 = alpha.pow(2);
    Ok((-(gamma.pow(2) / &a2), beta / &a2))
}

fn check_point_functions(parts: &[&Expr]) -> Result<()> {
    for e in parts {
        if let Some(s) = ["p", "q", "r", "t"].into_iter().find(|v| e.has_symbol(&sym(v))) {
            return Err(FGordonError::Invalid(format!("point functions may not depend on the jet coordinate `{s}`")));
        }
    }
    Ok(())
}

/// Left side minus right side of the compatibility equation for a point
/// transformation `(X, Y, U)` of `u_xy = F`.
pub fn eq21_residual(f: &Expr, xf: &Expr, yf: &Expr, uf: &Expr) -> Result<Expr> {
    check_point_functions(&[xf, yf, uf])?;
    let [x, y, u, p, q] = ["x", "y", "u", "p", "q"].map(sym);
    let (pe, qe) = (Expr::sym(&p), Expr::sym(&q));
    let d = |e: &Expr, v: &Symbol| e.diff(v);
    let (fp, fq) = (d(f, &p), d(f, &q));
    let lhs = (&pe * &fp - f) * d(xf, &x)
        + &pe * (&pe * &fp - Expr::integer(2) * f) * d(xf, &u)
        + (&qe * &fq - f) * d(yf, &y)
        + &qe * (&qe * &fq - Expr::integer(2) * f) * d(yf, &u)
        - &fp * d(uf, &x)
        - &fq * d(uf, &y)
        + (f - &pe * &fp - &qe * &fq) * d(uf, &u)
        + d(&d(uf, &x), &y)
        + &qe * d(&d(uf, &x), &u)
        + &pe * d(&d(uf, &y), &u)
        + &pe * &qe * d(&d(uf, &u), &u);
    let rhs = xf * d(f, &x) + yf * d(f, &y) + uf * d(f, &u);
    Ok(lhs - rhs)
}

/// Vertical representative `(U - pX - qY)Du + (P - rX - FY)Dp + (Q - FX - tY)Dq`
/// of the point transformation `(X, Y, U)`. The `Q` formula divides by `p`.
pub fn shuffle_representative(f: &Expr, xf: &Expr, yf: &Expr, uf: &Expr) -> Result<VectorField> {
    check_point_functions(&[xf, yf, uf])?;
    let [x, y, u] = ["x", "y", "u"].map(sym);
    let [pe, qe, re, te] = ["p", "q", "r", "t"].map(ex);
    let d = |e: &Expr, v: &Symbol| e.diff(v);
    let pp = -(&pe * d(xf, &x)) - pe.pow(2) * d(xf, &u) - &qe * d(yf, &x) - &pe * &qe * d(yf, &u)
        + d(uf, &x)
        + &pe * d(uf, &u);
    let qq = (&pe * &qe * d(xf, &x) - pe.pow(2) * d(xf, &y) + qe.pow(2) * d(yf, &x) - &pe * &qe * d(yf, &y)
        - &qe * d(uf, &x)
        + &pe * d(uf, &y)
        + &qe * &pp)
        / &pe;
    let chart = Chart::new(&JET_COORDS)?;
    Ok(VectorField::from_pairs(
        &chart,
        &[
            ("u", uf - &pe * xf - &qe * yf),
            ("p", pp - &re * xf - f * yf),
            ("q", qq - f * xf - &te * yf),
        ],
    )?)
}

/// `W + xi*X1 + eta*X2 + R*Dr + T*Dt` with `R`, `T` solved from the `(w2, X1)` and
/// `(w3, X2)` pairings, where each enters linearly.
pub fn lift_vertical(model: &FGordonModel, w: &VectorField, xi: &Expr, eta: &Expr) -> Result<VectorField> {
    let chart = model.chart();
    if w.chart() != chart {
        return Err(GeometryError::ChartMismatch.into());
    }
    check_point_functions(&[xi, eta])?;
    let base = w.add(&model.x1().scale(xi))?.add(&model.x2().scale(eta))?;
    let (rs, ts) = (sym("R#"), sym("T#"));
    let probe = base.add(&VectorField::from_pairs(chart, &[("r", Expr::sym(&rs)), ("t", Expr::sym(&ts))])?)?;
    let omegas = model.omegas();
    let solve = |form: &KForm, gen: &VectorField, v: &Symbol, other: &Symbol| -> Result<Expr> {
        let e = pair(&lie_derivative(&probe, form)?, gen)?;
        let c = e.diff(v);
        let unsolvable = |why: &str| FGordonError::Unsolvable(v.as_str().trim_end_matches('#').into(), why.into());
        if c.is_zero() {
            return Err(unsolvable("it does not occur"));
        }
        if c.has_symbol(v) || c.has_symbol(other) || e.has_symbol(other) {
            return Err(unsolvable("the equation is not linear in it alone"));
        }
        let e0 = crate::expr::substitute(&e, &crate::expr::Bindings::new().symbol(v.as_str(), Expr::zero()))?;
        Ok(-(e0 / c))
    };
    let rv = solve(&omegas[1], model.x1(), &rs, &ts)?;
    let tv = solve(&omegas[2], model.x2(), &ts, &rs)?;
    Ok(base.add(&VectorField::from_pairs(chart, &[("r", rv), ("t", tv)])?)?)
}

/// The full prolonged point symmetry `(X, Y, U)` on the jet chart.
pub fn complete_point_candidate(model: &FGordonModel, xf: &Expr, yf: &Expr, uf: &Expr) -> Result<VectorField> {
    let w = shuffle_representative(&model.f, xf, yf, uf)?;
    lift_vertical(model, &w, xf, yf)
}

/// Outcome of checking one `X1` variant against the raw system.
#[derive(Debug, Clone)]
pub struct VariantReport {
    pub sign_p: i64,
    pub sign_q: i64,
    /// Coefficient uses `F` itself instead of the printed `u^2*(a + b*u)`.
    pub uses_f: bool,
    pub passes: bool,
}

impl VariantReport {
    pub fn label(&self) -> String {
        let s = |k: i64| if k < 0 { '-' } else { '+' };
        format!("{}p {}q {}", s(self.sign_p), s(self.sign_q), if self.uses_f { "g=F" } else { "g=printed" })
    }
}

/// Every sign choice for the bare `p` and `q` terms of `X1`, with both the
/// printed coefficient and `F`, lifted with `xi = -x`, `eta = y`.
pub fn x1_sign_variants(kg: &KleinGordonInstance, sys: &DeterminingSystem) -> Result<Vec<VariantReport>> {
    let printed = printed_coefficient(&kg.a, &kg.b);
    let mut out = Vec::new();
    for uses_f in [false, true] {
        let g = if uses_f { &kg.model.f } else { &printed };
        for (sign_p, sign_q) in [(-1, 1), (1, -1), (1, 1), (-1, -1)] {
            let w = x1_variant(&kg.model, sign_p, sign_q, g)?;
            let z = lift_vertical(&kg.model, &w, &-ex("x"), &ex("y"))?;
            let passes = kg.model.verify(sys, &z)?.iter().all(ZeroStatus::is_zero);
            out.push(VariantReport { sign_p, sign_q, uses_f, passes });
        }
    }
    Ok(out)
}

/// The printed generator paired with its point-transformation lift parameters.
pub fn kg_lift_parameters(index: usize) -> Option<(Expr, Expr)> {
    match index {
        0 => Some((-ex("x"), ex("y"))),
        1 => Some((Expr::zero(), -Expr::one())),
        2 => Some((-Expr::one(), Expr::zero())),
        _ => None,
    }
}

#[cfg(test)]
pub(crate) fn p(s: &str) -> Expr {
    crate::expr::parse(s).expect("test formula parses")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::Check;

    fn generic() -> FGordonModel {
        fgordon_model(&p("F(x,y,u,p,q)"), &[]).unwrap()
    }

    #[test]
    fn cartan_shapes() {
        let m = cartan_model(2, &p("-p0"), &[]).unwrap();
        assert_eq!(m.field.to_string(), "Dx + p1*Dp0 - p0*Dp1");
        let m1 = cartan_model(1, &p("p0"), &[]).unwrap();
        assert_eq!(m1.field.to_string(), "Dx + p0*Dp0");
        assert!(m.distribution.is_involutive().unwrap().holds());
        assert!(matches!(cartan_model(2, &p("p2"), &[]), Err(FGordonError::StraySymbol(_))));
        assert!(cartan_model(2, &p("c*p1"), &["c"]).is_ok());
    }

    #[test]
    fn fgordon_invariants() {
        let m = generic();
        for w in m.omegas() {
            for g in m.distribution.tangent() {
                assert!(pair(&w, g).unwrap().is_zero());
            }
        }
        match m.distribution.is_involutive().unwrap() {
            Check::Fails(w) => assert_eq!((w.left, w.right), (Some(0), 2)),
            Check::Holds => panic!("not involutive"),
        }
        assert!(matches!(fgordon_model(&p("r"), &[]), Err(FGordonError::StraySymbol(_))));
    }

    #[test]
    fn physical_parameters() {
        let (a, b) = kg_from_physical(&p("1"), &p("2"), &p("1")).unwrap();
        assert_eq!((a, b), (p("-1"), p("2")));
        let (a, b) = kg_from_physical(&p("al"), &p("be"), &p("ga")).unwrap();
        assert_eq!((a, b), (p("-ga^2/al^2"), p("be/al^2")));
        assert_eq!(kg_from_physical(&p("0"), &p("1"), &p("1")), Err(FGordonError::ZeroAlpha));
    }

    #[test]
    fn translations_solve_compatibility_equation() {
        let f = p("a*u + b*u^3");
        assert!(eq21_residual(&f, &p("-1"), &p("0"), &p("0")).unwrap().is_zero());
        assert!(eq21_residual(&f, &p("0"), &p("-1"), &p("0")).unwrap().is_zero());
        assert!(eq21_residual(&f, &p("x"), &p("-y"), &p("0")).unwrap().is_zero());
        assert!(eq21_residual(&p("F(x,y,u,p,q)"), &p("0"), &p("0"), &p("0")).unwrap().is_zero());
        assert!(eq21_residual(&f, &p("p"), &p("0"), &p("0")).is_err());
    }

    #[test]
    fn representatives_of_translations() {
        let f = p("a*u + b*u^3");
        let w = shuffle_representative(&f, &p("-1"), &p("0"), &p("0")).unwrap();
        assert_eq!(w.to_string(), "p*Du + r*Dp + (a*u + b*u^3)*Dq");
        assert!(shuffle_representative(&f, &p("0"), &p("0"), &p("0")).unwrap().is_zero());
    }

    #[test]
    fn point_candidates_pass_raw_system() {
        let kg = klein_gordon(&p("a"), &p("b")).unwrap();
        let sys = kg.model.raw_system().unwrap();
        assert_eq!(sys.len(), 12);
        for (xf, yf) in [("-1", "0"), ("0", "-1"), ("x", "-y")] {
            let z = complete_point_candidate(&kg.model, &p(xf), &p(yf), &p("0")).unwrap();
            assert!(kg.model.verify(&sys, &z).unwrap().iter().all(ZeroStatus::is_zero), "{xf},{yf}");
        }
        let bad = complete_point_candidate(&kg.model, &p("-1"), &p("0"), &p("u")).unwrap();
        assert!(kg.model.verify(&sys, &bad).unwrap().iter().any(ZeroStatus::is_nonzero));
    }

    #[test]
    fn graph_is_integral_exactly_on_solutions() {
        let m = generic();
        let h = p("h(x,y)");
        let g = m.graph_map(&h).unwrap();
        let om = m.omegas();
        assert!(crate::geometry::pullback(&g, &om[0]).unwrap().is_zero());
        let defect = p("diff(h(x,y), x, y)") - g.pull_function(&m.f).unwrap();
        let w3 = crate::geometry::pullback(&g, &om[2]).unwrap();
        assert_eq!(w3.coefficient(&[0]), defect);
    }
}
