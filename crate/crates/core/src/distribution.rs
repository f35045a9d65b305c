//! Distributions given by tangent generators and their annihilating coforms.
//!
//! Symmetry and involutivity checks only look at generators. This suffices:
//! for `Y = Σ f_j X_j` with smooth `f_j`,
//! `[X, Y] = Σ f_j [X, X_j] + Σ X(f_j) X_j`, and the second sum always lies
//! in `D`, so `[X, Y] ∈ D` for every `Y ∈ D` iff `[X, X_j] ∈ D` for every
//! generator. Likewise `(L_X ω)(Y) = Σ f_j (L_X ω)(X_j)` is function-linear
//! in `Y` and `L_X(Σ g_i ω^i) = Σ g_i L_X ω^i + Σ X(g_i) ω^i` vanishes on `D`
//! iff each `L_X ω^i` does.

use crate::expr::{zero_status, Expr, Genericity, ZeroStatus};
use crate::geometry::{
    bracket, lie_derivative, pair, pullback, wedge, Chart, GeometryError, KForm, SmoothMap, VectorField,
};
use crate::linalg::{nullspace, rank, rref, solve_membership, ExprMatrix, LinalgError, Membership};
use rayon::prelude::*;
use std::sync::OnceLock;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DistributionError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("tangent generators are dependent: rank {rank} < {count}")]
    Dependent { rank: usize, count: usize },
    #[error("coform {form} does not annihilate generator {generator}: pairing is {value}")]
    NotAnnihilating { form: usize, generator: usize, value: Expr },
    #[error("{forms} coforms and {generators} generators do not add up to dimension {dim}")]
    Dimension { forms: usize, generators: usize, dim: usize },
    #[error("complement {0:?} is incompatible with the distribution")]
    Complement(Vec<usize>),
    #[error("cannot decide whether {0} vanishes")]
    Undecided(Expr),
    #[error("pullback membership and wedge criterion disagree for form {0}")]
    Inconsistent(usize),
}

type Result<T> = std::result::Result<T, DistributionError>;

/// Outcome of a check that may fail with a witness.
#[derive(Debug, Clone, PartialEq)]
pub enum Check<W> {
    Holds,
    Fails(W),
}

impl<W> Check<W> {
    pub fn holds(&self) -> bool {
        matches!(self, Check::Holds)
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            Check::Holds => None,
            Check::Fails(w) => Some(w),
        }
    }
}

/// A bracket `[left, right]` outside the distribution. `left` is `None` when
/// it is the field under test rather than a generator.
#[derive(Debug, Clone, PartialEq)]
pub struct BracketWitness {
    pub left: Option<usize>,
    pub right: usize,
    pub bracket: VectorField,
    /// Functional vanishing on the generators but not on the bracket.
    pub certificate: Vec<Expr>,
}

/// `(L_X ω^form)(X_generator) ≠ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct FormWitness {
    pub form: usize,
    pub generator: usize,
    pub value: Expr,
}

/// A pulled-back coform outside the coform span.
#[derive(Debug, Clone, PartialEq)]
pub struct PullbackWitness {
    pub form: usize,
    pub pullback: KForm,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SymmetryClass {
    /// The symmetry lies in the distribution, with these generator coefficients.
    Characteristic(Vec<Expr>),
    /// A symmetry outside the distribution, with its representative on the complement.
    ShufflingOnly(VectorField),
    NotASymmetry(BracketWitness),
}

#[derive(Debug)]
pub struct Distribution {
    chart: Chart,
    tangent: Vec<VectorField>,
    names: Vec<String>,
    coforms: OnceLock<(Vec<KForm>, Genericity)>,
    vertical: Option<Vec<usize>>,
    genericity: Genericity,
}

impl Clone for Distribution {
    fn clone(&self) -> Self {
        let coforms = OnceLock::new();
        if let Some(v) = self.coforms.get() {
            let _ = coforms.set(v.clone());
        }
        Distribution {
            chart: self.chart.clone(),
            tangent: self.tangent.clone(),
            names: self.names.clone(),
            coforms,
            vertical: self.vertical.clone(),
            genericity: self.genericity.clone(),
        }
    }
}

fn generator_matrix(gens: &[VectorField]) -> Result<ExprMatrix> {
    Ok(ExprMatrix::from_rows(gens.iter().map(|g| g.coeffs().to_vec()).collect())?)
}

/// Multiply by denominators until every entry is polynomial.
fn clear_denominators(mut v: Vec<Expr>) -> Vec<Expr> {
    while let Some(d) = v.iter().map(Expr::denominator).find(|d| d.as_rational().is_none()) {
        v = v.iter().map(|x| x * &d).collect();
    }
    v
}

fn vf_size(v: &VectorField) -> usize {
    v.coeffs().iter().map(Expr::size).sum()
}

/// Generic-point annihilator of a set of tangent fields.
fn annihilator_of(chart: &Chart, gens: &[VectorField]) -> Result<(Vec<KForm>, Genericity)> {
    if gens.is_empty() {
        return Ok(((0..chart.dim()).map(|i| KForm::differential(chart, i)).collect(), Genericity::new()));
    }
    let (basis, g) = nullspace(&generator_matrix(gens)?)?;
    let forms = basis
        .into_iter()
        .map(|v| KForm::one_form(chart, clear_denominators(v)))
        .collect::<std::result::Result<_, _>>()?;
    Ok((forms, g))
}

/// Vector fields spanning the common kernel of independent 1-forms.
pub fn coform_kernel(chart: &Chart, forms: &[KForm]) -> Result<Vec<VectorField>> {
    if forms.is_empty() {
        return Ok((0..chart.dim()).map(|i| VectorField::coordinate(chart, i)).collect());
    }
    let rows = forms
        .iter()
        .map(|f| f.covector().ok_or_else(|| GeometryError::Degree("coform kernel needs 1-forms".into())))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let (basis, _) = nullspace(&ExprMatrix::from_rows(rows)?)?;
    Ok(basis
        .into_iter()
        .map(|v| VectorField::new(chart, clear_denominators(v)))
        .collect::<std::result::Result<_, _>>()?)
}

fn require_zero(e: &Expr) -> Result<bool> {
    match zero_status(e) {
        ZeroStatus::Zero => Ok(true),
        ZeroStatus::NonZero => Ok(false),
        ZeroStatus::UnresolvedZero { .. } => Err(DistributionError::Undecided(e.clone())),
    }
}

impl Distribution {
    /// Distribution spanned by independent tangent generators.
    pub fn from_tangent(chart: &Chart, tangent: Vec<VectorField>) -> Result<Self> {
        if tangent.iter().any(|t| t.chart() != chart) {
            return Err(GeometryError::ChartMismatch.into());
        }
        let (r, genericity) = if tangent.is_empty() { (0, Genericity::new()) } else { rank(&generator_matrix(&tangent)?)? };
        if r < tangent.len() {
            return Err(DistributionError::Dependent { rank: r, count: tangent.len() });
        }
        let names = (1..=tangent.len()).map(|i| format!("X{i}")).collect();
        Ok(Distribution {
            chart: chart.clone(),
            tangent,
            names,
            coforms: OnceLock::new(),
            vertical: None,
            genericity,
        })
    }

    /// Distribution with both presentations given; the pairings are checked.
    pub fn with_coforms(chart: &Chart, tangent: Vec<VectorField>, coforms: Vec<KForm>) -> Result<Self> {
        let d = Distribution::from_tangent(chart, tangent)?;
        if coforms.len() + d.tangent.len() != chart.dim() {
            return Err(DistributionError::Dimension { forms: coforms.len(), generators: d.tangent.len(), dim: chart.dim() });
        }
        for (i, w) in coforms.iter().enumerate() {
            for (j, x) in d.tangent.iter().enumerate() {
                let v = pair(w, x)?;
                if !require_zero(&v)? {
                    return Err(DistributionError::NotAnnihilating { form: i, generator: j, value: v });
                }
            }
        }
        let rows: Vec<Vec<Expr>> = coforms.iter().map(|w| w.covector().unwrap()).collect();
        if !rows.is_empty() {
            let (r, _) = rank(&ExprMatrix::from_rows(rows)?)?;
            if r < coforms.len() {
                return Err(DistributionError::Dependent { rank: r, count: coforms.len() });
            }
        }
        let _ = d.coforms.set((coforms, Genericity::new()));
        Ok(d)
    }

    /// Distribution given by independent annihilating 1-forms.
    pub fn from_coforms(chart: &Chart, coforms: Vec<KForm>) -> Result<Self> {
        let tangent = coform_kernel(chart, &coforms)?;
        Distribution::with_coforms(chart, tangent, coforms)
    }

    pub fn with_names(mut self, names: Vec<String>) -> Self {
        assert_eq!(names.len(), self.tangent.len(), "one name per generator");
        self.names = names;
        self
    }

    /// Declare the coordinates used as complement in [`Distribution::reduce_mod`].
    pub fn with_vertical(mut self, vertical: Vec<usize>) -> Self {
        self.vertical = Some(vertical);
        self
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn tangent(&self) -> &[VectorField] {
        &self.tangent
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn rank(&self) -> usize {
        self.tangent.len()
    }

    pub fn vertical(&self) -> Option<&[usize]> {
        self.vertical.as_deref()
    }

    /// Assumptions made while establishing the rank and the coforms.
    pub fn genericity(&self) -> Genericity {
        let mut g = self.genericity.clone();
        if let Some((_, cg)) = self.coforms.get() {
            g.extend(cg);
        }
        g
    }

    /// Declared coforms, or the annihilator computed once on first use.
    pub fn coforms(&self) -> Result<&[KForm]> {
        if self.coforms.get().is_none() {
            let computed = annihilator_of(&self.chart, &self.tangent)?;
            let _ = self.coforms.set(computed);
        }
        Ok(&self.coforms.get().expect("initialized above").0)
    }

    /// Freshly computed annihilator of the tangent generators.
    pub fn annihilator(&self) -> Result<Vec<KForm>> {
        Ok(annihilator_of(&self.chart, &self.tangent)?.0)
    }

    pub fn contains_vf(&self, x: &VectorField) -> Result<(Membership, Genericity)> {
        if x.chart() != &self.chart {
            return Err(GeometryError::ChartMismatch.into());
        }
        let basis: Vec<Vec<Expr>> = self.tangent.iter().map(|g| g.coeffs().to_vec()).collect();
        Ok(solve_membership(&basis, x.coeffs())?)
    }

    fn bracket_failure(&self, left: Option<usize>, right: usize, b: VectorField) -> Result<Option<BracketWitness>> {
        if b.is_zero() {
            return Ok(None);
        }
        match self.contains_vf(&b)?.0 {
            Membership::InSpan(_) => Ok(None),
            Membership::NotInSpan(certificate) => Ok(Some(BracketWitness { left, right, bracket: b, certificate })),
        }
    }

    /// Among failures, report the one with the smallest bracket, then the first.
    fn simplest(failures: Vec<Option<BracketWitness>>) -> Check<BracketWitness> {
        failures
            .into_iter()
            .flatten()
            .enumerate()
            .min_by_key(|(k, w)| (vf_size(&w.bracket), *k))
            .map_or(Check::Holds, |(_, w)| Check::Fails(w))
    }

    /// Frobenius test: all generator brackets stay in the distribution.
    pub fn is_involutive(&self) -> Result<Check<BracketWitness>> {
        let m = self.tangent.len();
        let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
        let failures = pairs
            .par_iter()
            .map(|&(i, j)| {
                let b = bracket(&self.tangent[i], &self.tangent[j])?;
                self.bracket_failure(Some(i), j, b)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::simplest(failures))
    }

    /// `[X, X_j] ∈ D` for every generator.
    pub fn is_symmetry_brackets(&self, x: &VectorField) -> Result<Check<BracketWitness>> {
        let failures = (0..self.tangent.len())
            .into_par_iter()
            .map(|j| {
                let b = bracket(x, &self.tangent[j])?;
                self.bracket_failure(None, j, b)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::simplest(failures))
    }

    /// `(L_X ω^i)(X_j) ≡ 0` for every coform and generator.
    pub fn is_symmetry_forms(&self, x: &VectorField) -> Result<Check<FormWitness>> {
        let forms = self.coforms()?;
        let jobs: Vec<(usize, usize)> =
            (0..forms.len()).flat_map(|i| (0..self.tangent.len()).map(move |j| (i, j))).collect();
        let values = jobs
            .par_iter()
            .map(|&(i, j)| {
                let l = lie_derivative(x, &forms[i])?;
                let v = pair(&l, &self.tangent[j])?;
                Ok(if require_zero(&v)? { None } else { Some(FormWitness { form: i, generator: j, value: v }) })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(values
            .into_iter()
            .flatten()
            .enumerate()
            .min_by_key(|(k, w)| (w.value.size(), *k))
            .map_or(Check::Holds, |(_, w)| Check::Fails(w)))
    }

    /// `F^* ω^i ∈ span{ω^j}` for every coform; cross-checked against
    /// `F^* ω^i ∧ ω^1 ∧ … ∧ ω^n = 0` in dimension at most 7.
    pub fn is_finite_symmetry(&self, map: &SmoothMap) -> Result<Check<PullbackWitness>> {
        if map.source() != &self.chart || map.target() != &self.chart {
            return Err(GeometryError::ChartMismatch.into());
        }
        let forms = self.coforms()?;
        let basis: Vec<Vec<Expr>> = forms.iter().map(|w| w.covector().unwrap()).collect();
        let omega = forms
            .iter()
            .try_fold(KForm::function(&self.chart, Expr::one()), |acc, w| wedge(&acc, w))?;
        let results = forms
            .par_iter()
            .enumerate()
            .map(|(i, w)| {
                let pb = pullback(map, w)?;
                let member = solve_membership(&basis, &pb.covector().unwrap())?.0.is_member();
                if self.chart.dim() <= 7 {
                    let top = wedge(&pb, &omega)?;
                    let mut vanishes = true;
                    for (_, c) in top.terms() {
                        vanishes &= require_zero(c)?;
                    }
                    if vanishes != member {
                        return Err(DistributionError::Inconsistent(i));
                    }
                }
                Ok((!member).then_some(PullbackWitness { form: i, pullback: pb }))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(results.into_iter().flatten().next().map_or(Check::Holds, Check::Fails))
    }

    /// Complement used when none is passed: the declared vertical coordinates,
    /// else the non-pivot columns of the generator matrix.
    pub fn default_complement(&self) -> Result<Vec<usize>> {
        if let Some(v) = &self.vertical {
            return Ok(v.clone());
        }
        if self.tangent.is_empty() {
            return Ok((0..self.chart.dim()).collect());
        }
        let r = rref(&generator_matrix(&self.tangent)?)?;
        Ok((0..self.chart.dim()).filter(|c| !r.pivots.contains(c)).collect())
    }

    /// The representative of `X mod D` supported on the complement coordinates.
    pub fn reduce_mod(&self, x: &VectorField, complement: &[usize]) -> Result<VectorField> {
        let rest: Vec<usize> = (0..self.chart.dim()).filter(|c| !complement.contains(c)).collect();
        let bad = || DistributionError::Complement(complement.to_vec());
        if rest.len() != self.tangent.len() {
            return Err(bad());
        }
        let basis: Vec<Vec<Expr>> =
            self.tangent.iter().map(|g| rest.iter().map(|&k| g.coeff(k).clone()).collect()).collect();
        if !basis.is_empty() {
            let (r, _) = rank(&ExprMatrix::from_rows(basis.clone())?)?;
            if r < basis.len() {
                return Err(bad());
            }
        }
        let target: Vec<Expr> = rest.iter().map(|&k| x.coeff(k).clone()).collect();
        let coeffs = match solve_membership(&basis, &target)?.0 {
            Membership::InSpan(c) => c,
            Membership::NotInSpan(_) => return Err(bad()),
        };
        let mut rep = x.clone();
        for (c, g) in coeffs.iter().zip(&self.tangent) {
            if !c.is_zero() {
                rep = rep.sub(&g.scale(c))?;
            }
        }
        Ok(rep)
    }

    /// Characteristic, shuffling-only, or not a symmetry.
    pub fn classify(&self, x: &VectorField) -> Result<SymmetryClass> {
        if let Check::Fails(w) = self.is_symmetry_brackets(x)? {
            return Ok(SymmetryClass::NotASymmetry(w));
        }
        match self.contains_vf(x)?.0 {
            Membership::InSpan(c) => Ok(SymmetryClass::Characteristic(c)),
            Membership::NotInSpan(_) => {
                let complement = self.default_complement()?;
                Ok(SymmetryClass::ShufflingOnly(self.reduce_mod(x, &complement)?))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: &str) -> Expr {
        s.parse().unwrap()
    }

    fn contact() -> Distribution {
        let c = Chart::new(&["x", "u", "p"]).unwrap();
        let x = VectorField::from_pairs(&c, &[("x", e("1")), ("u", e("p"))]).unwrap();
        let dp = VectorField::coordinate(&c, 2);
        Distribution::from_tangent(&c, vec![x, dp]).unwrap()
    }

    #[test]
    fn annihilators() {
        let d = contact();
        let ann = d.annihilator().unwrap();
        assert_eq!(ann.len(), 1);
        let expected = KForm::from_pairs(d.chart(), &[("u", e("1")), ("x", e("-p"))]).unwrap();
        assert_eq!(ann[0], expected);
        let c = Chart::new(&["x", "y", "u"]).unwrap();
        let flat = Distribution::from_tangent(&c, vec![VectorField::coordinate(&c, 0), VectorField::coordinate(&c, 1)]).unwrap();
        assert_eq!(flat.annihilator().unwrap(), vec![KForm::differential(&c, 2)]);
        let ker = coform_kernel(&c, &[KForm::differential(&c, 0), KForm::differential(&c, 1)]).unwrap();
        assert_eq!(ker, vec![VectorField::coordinate(&c, 2)]);
    }

    #[test]
    fn contact_plane_is_not_involutive() {
        let d = contact();
        let w = d.is_involutive().unwrap();
        let w = w.witness().unwrap();
        assert_eq!((w.left, w.right), (Some(0), 1));
        assert_eq!(w.bracket, VectorField::coordinate(d.chart(), 1).neg());
    }

    #[test]
    fn form_criterion_witness() {
        let d = contact();
        let dp = VectorField::coordinate(d.chart(), 2);
        let got = d.is_symmetry_forms(&dp).unwrap();
        assert_eq!(got.witness().unwrap().value, e("-1"));
        assert!(!d.is_symmetry_brackets(&dp).unwrap().holds());
    }

    #[test]
    fn finite_symmetries() {
        let c = Chart::new(&["x", "u", "p"]).unwrap();
        let d = Distribution::from_coforms(&c, vec![KForm::from_pairs(&c, &[("u", e("1")), ("x", e("-p"))]).unwrap()]).unwrap();
        assert!(d.is_finite_symmetry(&SmoothMap::identity(&c)).unwrap().holds());
        let scale_u = SmoothMap::new(&c, &c, vec![e("x"), e("2*u"), e("p")]).unwrap();
        assert!(!d.is_finite_symmetry(&scale_u).unwrap().holds());
        let scale_both = SmoothMap::new(&c, &c, vec![e("x"), e("2*u"), e("2*p")]).unwrap();
        assert!(d.is_finite_symmetry(&scale_both).unwrap().holds());
    }

    #[test]
    fn dependent_generators_rejected() {
        let c = Chart::new(&["x", "y"]).unwrap();
        let x = VectorField::coordinate(&c, 0);
        assert!(matches!(
            Distribution::from_tangent(&c, vec![x.clone(), x.scale(&e("y"))]),
            Err(DistributionError::Dependent { .. })
        ));
    }
}
