//! Report documents and their text rendering. The JSON form is the serde
//! encoding of [`Report`]; the text form is derived from the same value.

use serde::{Deserialize, Serialize};
use std::fmt::Write;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub model: String,
    pub results: Vec<Item>,
    /// Nonvanishing assumptions used by pivots and divisions, as `e != 0`.
    pub genericity: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub left: String,
    pub right: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub coordinate: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub tag: String,
    pub status: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportRow {
    pub s: f64,
    pub max_residual: Option<f64>,
    pub empirical_order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Item {
    Summary {
        dimension: usize,
        rank: usize,
        generators: Vec<String>,
    },
    Annihilator {
        forms: Vec<String>,
        /// Whether the declared coforms span the same space; `None` without coforms.
        coforms_match: Option<bool>,
    },
    Involutivity {
        involutive: bool,
        witness: Option<Bracket>,
    },
    Classification {
        candidate: String,
        class: String,
        representative: Option<String>,
        witness: Option<Bracket>,
        detail: Option<String>,
    },
    Equation {
        tag: String,
        expr: String,
    },
    Verification {
        candidate: String,
        total: usize,
        zero: usize,
        unresolved: Vec<Residual>,
        nonzero: Vec<Residual>,
    },
    Flow {
        field: String,
        parameter: String,
        exact: bool,
        degree: usize,
        components: Vec<Component>,
    },
    FlowAt {
        field: String,
        at: String,
        components: Vec<Component>,
    },
    Fixture {
        name: String,
        exact_residual: Option<f64>,
        grid_residual: Option<f64>,
    },
    Transport {
        field: String,
        fixture: String,
        rows: Vec<TransportRow>,
        min_order: Option<f64>,
    },
    Linearized {
        phi: String,
        residual: Option<f64>,
        tolerance: f64,
        within: bool,
    },
}

fn num(x: Option<f64>) -> String {
    match x {
        Some(v) => format!("{v:.3e}"),
        None => "n/a".into(),
    }
}

fn bracket(b: &Bracket) -> String {
    format!("[{}, {}]", b.left, b.right)
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is serializable");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if self.command == "determining" && !self.results.iter().any(|i| matches!(i, Item::Equation { .. })) {
            out.push_str("system empty\n");
        }
        for item in &self.results {
            render(&mut out, item);
        }
        if !self.genericity.is_empty() {
            let _ = writeln!(out, "assuming: {}", self.genericity.join(", "));
        }
        out
    }
}

fn render(out: &mut String, item: &Item) {
    let _ = match item {
        Item::Summary { dimension, rank, generators } => {
            writeln!(out, "dimension: {dimension}; rank: {rank}; generators: {}", generators.join(", "))
        }
        Item::Annihilator { forms, coforms_match } => {
            let _ = writeln!(out, "annihilator:");
            for f in forms {
                let _ = writeln!(out, "  {f}");
            }
            match coforms_match {
                Some(true) => writeln!(out, "coforms match annihilator"),
                Some(false) => writeln!(out, "coforms do not match annihilator"),
                None => Ok(()),
            }
        }
        Item::Involutivity { involutive, witness } => match witness {
            Some(w) => writeln!(out, "involutive: {involutive}; witness: {} = {}", bracket(w), w.value),
            None => writeln!(out, "involutive: {involutive}"),
        },
        Item::Classification { candidate, class, representative, witness, detail } => {
            let mut line = format!("{candidate}: {class}");
            if let Some(r) = representative {
                let _ = write!(line, "; representative: {r}");
            }
            if let Some(w) = witness {
                let _ = write!(line, "; witness {} = {}", bracket(w), w.value);
            }
            if let Some(d) = detail {
                let _ = write!(line, " ({d})");
            }
            writeln!(out, "{line}")
        }
        Item::Equation { tag, expr } => writeln!(out, "{tag}: {expr}"),
        Item::Verification { candidate, total, zero, unresolved, nonzero } => {
            if nonzero.is_empty() && unresolved.is_empty() {
                writeln!(out, "{candidate}: all {total} residuals: zero")
            } else {
                let _ = writeln!(
                    out,
                    "{candidate}: {zero} of {total} residuals zero, {} nonzero, {} unresolved",
                    nonzero.len(),
                    unresolved.len()
                );
                for r in nonzero.iter().chain(unresolved) {
                    let _ = writeln!(out, "  {} {}: {}", r.tag, r.status, r.value);
                }
                Ok(())
            }
        }
        Item::Flow { field, parameter, exact, degree, components } => {
            let _ = writeln!(out, "flow of {field} in {parameter}:");
            for c in components {
                let _ = writeln!(out, "  {} -> {}", c.coordinate, c.value);
            }
            if *exact {
                writeln!(out, "exact, degree {degree}")
            } else {
                writeln!(out, "truncated at {degree}")
            }
        }
        Item::FlowAt { field, at, components } => {
            let _ = writeln!(out, "flow of {field} at {at}:");
            for c in components {
                let _ = writeln!(out, "  {} -> {}", c.coordinate, c.value);
            }
            Ok(())
        }
        Item::Fixture { name, exact_residual, grid_residual } => writeln!(
            out,
            "fixture {name}: residual {} (symbolic partials), {} (finite differences)",
            num(*exact_residual),
            num(*grid_residual)
        ),
        Item::Transport { field, fixture, rows, min_order } => {
            let _ = writeln!(out, "transport of {fixture} along {field}:");
            let _ = writeln!(out, "  {:>10}  {:>10}  {:>6}", "s", "residual", "order");
            for r in rows {
                let order = r.empirical_order.map_or("-".to_string(), |o| format!("{o:.2}"));
                let _ = writeln!(out, "  {:>10}  {:>10}  {:>6}", r.s, num(r.max_residual), order);
            }
            match min_order {
                Some(o) => writeln!(out, "min order: {o:.2}"),
                None => Ok(()),
            }
        }
        Item::Linearized { phi, residual, tolerance, within } => writeln!(
            out,
            "linearized residual of {phi}: {} ({} tolerance {tolerance:e})",
            num(*residual),
            if *within { "within" } else { "exceeds" }
        ),
    };
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        Report {
            command: "transport".into(),
            model: "m".into(),
            results: vec![
                Item::Transport {
                    field: "X".into(),
                    fixture: "h".into(),
                    rows: vec![
                        TransportRow { s: 0.1, max_residual: Some(2e-3), empirical_order: None },
                        TransportRow { s: 0.05, max_residual: None, empirical_order: Some(3.0) },
                    ],
                    min_order: Some(3.0),
                },
                Item::Involutivity { involutive: true, witness: None },
            ],
            genericity: vec!["p != 0".into()],
        }
    }

    #[test]
    fn json_round_trip() {
        let r = sample();
        let back: Report = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert!(r.to_json().contains("\"kind\": \"transport\""));
    }

    #[test]
    fn text_lines() {
        let t = sample().to_text();
        assert!(t.contains("involutive: true\n"));
        assert!(t.contains("n/a"));
        assert!(t.ends_with("assuming: p != 0\n"));
    }
}
