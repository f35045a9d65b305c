//! Seeded random polynomials, fields and distributions for property checks
//! and benchmarks.

use crate::distribution::Distribution;
use crate::expr::{Expr, Symbol};
use crate::geometry::{Chart, KForm, VectorField};
use rand::Rng;

/// Up to `terms` monomials of total degree at most `degree` with small nonzero
/// integer coefficients.
pub fn polynomial<R: Rng>(rng: &mut R, vars: &[Symbol], degree: u32, terms: usize) -> Expr {
    let mut out = Expr::zero();
    for _ in 0..rng.gen_range(1..=terms.max(1)) {
        let mut c = Expr::integer(*[-3, -2, -1, 1, 2, 3].get(rng.gen_range(0..6)).unwrap());
        let mut left = if vars.is_empty() { 0 } else { rng.gen_range(0..=degree) };
        while left > 0 {
            c = c * Expr::sym(&vars[rng.gen_range(0..vars.len())]);
            left -= 1;
        }
        out = out + c;
    }
    out
}

pub fn field<R: Rng>(rng: &mut R, chart: &Chart, vars: &[Symbol], degree: u32) -> VectorField {
    let coeffs = (0..chart.dim()).map(|_| polynomial(rng, vars, degree, 2)).collect();
    VectorField::new(chart, coeffs).expect("dimension matches")
}

pub fn one_form<R: Rng>(rng: &mut R, chart: &Chart, vars: &[Symbol], degree: u32) -> KForm {
    let coeffs = (0..chart.dim()).map(|_| polynomial(rng, vars, degree, 2)).collect();
    KForm::one_form(chart, coeffs).expect("dimension matches")
}

/// Chart `x0, ..., x{n-1}`.
pub fn chart(n: usize) -> Chart {
    let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    Chart::new(&names.iter().map(String::as_str).collect::<Vec<_>>()).expect("distinct names")
}

/// Rank-`m` distribution in graph form `D_i + Σ_{k ≥ m} c_ik D_k`, so the
/// generators are independent everywhere. Coefficients use only `vars`.
pub fn distribution<R: Rng>(rng: &mut R, chart: &Chart, m: usize, vars: &[Symbol], degree: u32) -> Distribution {
    let n = chart.dim();
    let gens = (0..m)
        .map(|i| {
            let coeffs = (0..n)
                .map(|k| match k {
                    k if k == i => Expr::one(),
                    k if k < m => Expr::zero(),
                    _ if rng.gen_bool(0.7) => polynomial(rng, vars, degree, 2),
                    _ => Expr::zero(),
                })
                .collect();
            VectorField::new(chart, coeffs).expect("dimension matches")
        })
        .collect();
    Distribution::from_tangent(chart, gens).expect("graph form is independent")
}

/// Random element of the module spanned by `gens`.
pub fn combination<R: Rng>(rng: &mut R, gens: &[VectorField], vars: &[Symbol], degree: u32) -> VectorField {
    let mut out = VectorField::zero(gens[0].chart());
    for g in gens {
        out = out.add(&g.scale(&polynomial(rng, vars, degree, 2))).expect("same chart");
    }
    out
}

/// Random combination of 1-forms.
pub fn form_combination<R: Rng>(rng: &mut R, forms: &[KForm], vars: &[Symbol], degree: u32) -> KForm {
    let mut out = KForm::zero(forms[0].chart(), 1);
    for f in forms {
        out = out.add(&f.scale(&polynomial(rng, vars, degree, 2))).expect("same chart");
    }
    out
}

/// Field `Σ c_i(x0..x{i-1}) D_i`, nilpotent as a derivation on coordinates.
pub fn triangular_field<R: Rng>(rng: &mut R, chart: &Chart, degree: u32) -> VectorField {
    let coords = chart.coords();
    let coeffs = (0..chart.dim()).map(|i| polynomial(rng, &coords[..i], degree, 2)).collect();
    VectorField::new(chart, coeffs).expect("dimension matches")
}
