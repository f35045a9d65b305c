use crate::model::Model;
use crate::report::{Bracket, Component, Item, Report, Residual, TransportRow};
use involute_core::distribution::{BracketWitness, Distribution, SymmetryClass};
use involute_core::expr::{substitute, Bindings, Expr, Genericity, ZeroStatus};
use involute_core::fgordon::{linearized_residual, transport_solution, SolutionGrid, JET_COORDS};
use involute_core::geometry::{KForm, VectorField};
use involute_core::linalg::solve_membership;
use involute_core::symmetry::{determining_equations, lie_series_flow, verify_candidate, SymmetryAnsatz};

/// Failure of a command: bad input (exit 1) or a failed check whose report
/// is still printed (exit 2).
#[derive(Debug)]
pub enum Failure {
    Input(String),
    Check(Report),
}

pub type Outcome = Result<Report, Failure>;

fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Input(e.to_string())
}

pub struct Context<'a> {
    pub model: &'a Model,
    pub command: &'static str,
    pub max_order: usize,
    pub tolerance: f64,
    genericity: Genericity,
}

impl<'a> Context<'a> {
    pub fn new(model: &'a Model, command: &'static str, max_order: usize, tolerance: f64) -> Self {
        Context { model, command, max_order, tolerance, genericity: Genericity::new() }
    }

    fn distribution(&mut self) -> Result<&'a Distribution, Failure> {
        let d = self.model.distribution.as_ref().ok_or_else(|| input("model declares no distribution"))?;
        self.genericity.extend(&d.genericity());
        Ok(d)
    }

    fn finish(self, results: Vec<Item>) -> Report {
        Report {
            command: self.command.into(),
            model: self.model.name.clone(),
            results,
            genericity: self.genericity.iter().map(|e| format!("{} != 0", self.model.show(e))).collect(),
        }
    }
}

impl Model {
    /// Replace `±F` by its abbreviation.
    fn abbreviate(&self, e: &Expr) -> Expr {
        for (name, value) in &self.abbreviations {
            if value.as_symbol().is_some() {
                continue;
            }
            if e == value {
                return Expr::symbol(name);
            }
            if *e == -value.clone() {
                return -Expr::symbol(name);
            }
        }
        e.clone()
    }

    pub fn show(&self, e: &Expr) -> String {
        self.abbreviate(e).to_string()
    }

    pub fn show_field(&self, x: &VectorField) -> String {
        x.map(|c| self.abbreviate(c)).to_string()
    }

    pub fn show_form(&self, w: &KForm) -> String {
        let entries = w.terms().map(|(i, c)| (i.clone(), self.abbreviate(c))).collect();
        KForm::new(w.chart(), w.degree(), entries).map(|f| f.to_string()).unwrap_or_else(|_| w.to_string())
    }
}

fn witness(model: &Model, d: &Distribution, w: &BracketWitness, subject: &str) -> Bracket {
    Bracket {
        left: w.left.map_or(subject.to_string(), |i| d.names()[i].clone()),
        right: d.names()[w.right].clone(),
        value: model.show_field(&w.bracket),
    }
}

fn same_span(a: &[KForm], b: &[KForm]) -> Result<bool, Failure> {
    if a.len() != b.len() {
        return Ok(false);
    }
    let rows = |v: &[KForm]| v.iter().map(|w| w.covector().ok_or_else(|| input("expected 1-forms"))).collect::<Result<Vec<_>, _>>();
    let (ra, rb) = (rows(a)?, rows(b)?);
    for (basis, targets) in [(&ra, &rb), (&rb, &ra)] {
        for t in targets.iter() {
            if !solve_membership(basis, t).map_err(input)?.0.is_member() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn check(mut cx: Context, require_involutive: bool) -> Outcome {
    let d = cx.distribution()?;
    let model = cx.model;
    let mut results = vec![Item::Summary { dimension: d.chart().dim(), rank: d.rank(), generators: d.names().to_vec() }];
    let ann = d.annihilator().map_err(input)?;
    let coforms_match = if model.coform_names.is_empty() {
        None
    } else {
        let declared: Vec<KForm> = model.coform_names.iter().map(|n| model.forms[n].clone()).collect();
        Some(same_span(&ann, &declared)?)
    };
    results.push(Item::Annihilator { forms: ann.iter().map(|w| model.show_form(w)).collect(), coforms_match });
    let inv = d.is_involutive().map_err(input)?;
    let involutive = inv.holds();
    results.push(Item::Involutivity { involutive, witness: inv.witness().map(|w| witness(model, d, w, "?")) });
    let report = cx.finish(results);
    if (require_involutive && !involutive) || coforms_match == Some(false) {
        Err(Failure::Check(report))
    } else {
        Ok(report)
    }
}

pub fn symmetry(mut cx: Context, names: &[String]) -> Outcome {
    let d = cx.distribution()?;
    let model = cx.model;
    let names = if names.is_empty() { model.candidate_names() } else { names.to_vec() };
    if names.is_empty() {
        return Err(input("no candidates given and none declared"));
    }
    let mut results = Vec::new();
    for name in &names {
        let x = model.candidate(name).map_err(Failure::Input)?;
        let item = match d.classify(&x) {
            Ok(SymmetryClass::Characteristic(_)) => Item::Classification {
                candidate: name.clone(),
                class: "characteristic".into(),
                representative: None,
                witness: None,
                detail: None,
            },
            Ok(SymmetryClass::ShufflingOnly(rep)) => Item::Classification {
                candidate: name.clone(),
                class: "shuffling".into(),
                representative: Some(model.show_field(&rep)),
                witness: None,
                detail: None,
            },
            Ok(SymmetryClass::NotASymmetry(w)) => Item::Classification {
                candidate: name.clone(),
                class: "not a symmetry".into(),
                representative: None,
                witness: Some(witness(model, d, &w, name)),
                detail: None,
            },
            Err(e) => Item::Classification {
                candidate: name.clone(),
                class: "inconclusive".into(),
                representative: None,
                witness: None,
                detail: Some(e.to_string()),
            },
        };
        results.push(item);
    }
    Ok(cx.finish(results))
}

pub fn default_ansatz(model: &Model) -> Result<SymmetryAnsatz, Failure> {
    let chart = &model.chart;
    let jet: Vec<&str> = chart.coords().iter().map(|c| c.as_str()).collect();
    let names: Vec<String> = if jet == JET_COORDS {
        ["X", "Y", "U", "P", "Q", "R", "T"].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=chart.dim()).map(|i| format!("Z{i}")).collect()
    };
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    SymmetryAnsatz::general(chart, &refs).map_err(input)
}

pub fn determining(mut cx: Context, ansatz: Option<&str>, verify: Option<&str>) -> Outcome {
    let d = cx.distribution()?;
    let model = cx.model;
    let z = match ansatz {
        Some(n) => model.ansatze.get(n).cloned().ok_or_else(|| input(format!("unknown ansatz `{n}`")))?,
        None => default_ansatz(model)?,
    };
    let sys = determining_equations(d, &z).map_err(input)?;
    let tag = |i: usize| {
        let e = &sys.equations[i];
        format!("({},{},{})", e.form + 1, e.generator + 1, e.monomial)
    };
    let mut results: Vec<Item> =
        (0..sys.len()).map(|i| Item::Equation { tag: tag(i), expr: model.show(&sys.equations[i].expr) }).collect();
    let mut failed = false;
    if let Some(name) = verify {
        let x = model.candidate(name).map_err(Failure::Input)?;
        let b = z.bindings_for(&x).map_err(input)?;
        let statuses = verify_candidate(&sys, &b).map_err(input)?;
        let mut nonzero = Vec::new();
        let mut unresolved = Vec::new();
        for (i, st) in statuses.iter().enumerate() {
            let value = substitute(&sys.equations[i].expr, &b).map(|e| model.show(&e)).unwrap_or_default();
            match st {
                ZeroStatus::Zero => {}
                ZeroStatus::NonZero => nonzero.push(Residual { tag: tag(i), status: "nonzero".into(), value }),
                ZeroStatus::UnresolvedZero { probes } => {
                    unresolved.push(Residual { tag: tag(i), status: format!("unresolved after {probes} probes"), value })
                }
            }
        }
        failed = !nonzero.is_empty() || !unresolved.is_empty();
        let zero = statuses.len() - nonzero.len() - unresolved.len();
        results.push(Item::Verification { candidate: name.into(), total: statuses.len(), zero, unresolved, nonzero });
    }
    let report = cx.finish(results);
    if failed {
        Err(Failure::Check(report))
    } else {
        Ok(report)
    }
}


pub fn flow(cx: Context, field: &str, order: Option<usize>, at: Option<&str>) -> Outcome {
    let model = cx.model;
    let x = model.field(field).ok_or_else(|| input(format!("unknown field `{field}`")))?;
    let order = order.unwrap_or(cx.max_order);
    let fl = lie_series_flow(&x, order).map_err(input)?;
    let comps = |v: &[Expr]| {
        model.chart.coords().iter().zip(v).map(|(c, e)| Component { coordinate: c.to_string(), value: model.show(e) }).collect()
    };
    let mut results = vec![Item::Flow {
        field: field.into(),
        parameter: fl.param.to_string(),
        exact: fl.exact,
        degree: fl.degree,
        components: comps(&fl.components),
    }];
    if let Some(at) = at {
        let s: Expr = at.parse().map_err(|e| input(format!("--at: {e}")))?;
        let b = Bindings::new().symbol(fl.param.as_str(), s);
        let v = fl.components.iter().map(|e| substitute(e, &b)).collect::<Result<Vec<_>, _>>().map_err(input)?;
        results.push(Item::FlowAt { field: field.into(), at: at.into(), components: comps(&v) });
    }
    Ok(cx.finish(results))
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

pub fn transport(cx: Context, fixture: &str, field: &str, s_values: &[f64]) -> Outcome {
    let model = cx.model;
    let jet = model.fgordon.as_ref().ok_or_else(|| input("transport needs an [fgordon] model"))?;
    let fx = model.fixtures.get(fixture).ok_or_else(|| input(format!("unknown fixture `{fixture}`")))?;
    let x = model.field(field).ok_or_else(|| input(format!("unknown field `{field}`")))?;
    let f = &jet.f;
    let grid = fx.grid().map_err(input)?;
    let exact = fx.exact_residual(f).map_err(input)?;
    let sampled = SolutionGrid::from_samples(fx.spec, grid.values.clone()).map_err(input)?;
    let fd = sampled.pde_residual(f).map_err(input)?;
    let mut results = vec![Item::Fixture { name: fixture.into(), exact_residual: finite(exact), grid_residual: finite(fd) }];
    let fl = lie_series_flow(&x, cx.max_order).map_err(input)?;
    let rep = transport_solution(f, &fl, &grid, s_values).map_err(input)?;
    results.push(Item::Transport {
        field: field.into(),
        fixture: fixture.into(),
        rows: rep
            .rows
            .iter()
            .map(|r| TransportRow { s: r.s, max_residual: finite(r.max_residual), empirical_order: r.empirical_order.and_then(finite) })
            .collect(),
        min_order: rep.min_order().and_then(finite),
    });
    let phi = x.component("u").cloned().unwrap_or_else(Expr::zero);
    let lin = finite(linearized_residual(f, &grid, &phi).map_err(input)?);
    results.push(Item::Linearized {
        phi: model.show(&phi),
        residual: lin,
        tolerance: cx.tolerance,
        within: lin.is_some_and(|r| r <= cx.tolerance),
    });
    Ok(cx.finish(results))
}
