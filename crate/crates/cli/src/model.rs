//! Model files: line-oriented `[section]` blocks of `name = value` entries with
//! expressions in the kernel grammar. `#` starts a comment.

use involute_core::distribution::Distribution;
use involute_core::expr::{parse, substitute, Bindings, Expr, ParseError, Symbol};
use involute_core::fgordon::{
    cartan_coords, cartan_model, complete_point_candidate, fgordon_model, lift_vertical, Fixture, FGordonModel,
    GridSpec, JET_COORDS,
};
use involute_core::geometry::{Chart, KForm, VectorField};
use involute_core::symmetry::{Component, SymmetryAnsatz};
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub struct ModelError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ModelError {}

type Result<T> = std::result::Result<T, ModelError>;

/// How a candidate vector field is obtained.
#[derive(Debug, Clone, PartialEq)]
pub enum CandidateSpec {
    Field(String),
    /// Point transformation `(X, Y, U)` of the jet model.
    Point(Expr, Expr, Expr),
    /// Vertical field lifted with `xi * X1 + eta * X2` plus solved `Dr`, `Dt` parts.
    Lift(String, Expr, Expr),
}

#[derive(Debug, Clone)]
pub struct Model {
    pub name: String,
    pub chart: Chart,
    pub parameters: Vec<(Symbol, Option<Expr>)>,
    pub functions: Vec<(Symbol, Vec<Symbol>)>,
    pub fields: BTreeMap<String, VectorField>,
    pub forms: BTreeMap<String, KForm>,
    /// Declared coforms of the distribution, by name.
    pub coform_names: Vec<String>,
    pub distribution: Option<Distribution>,
    pub fgordon: Option<FGordonModel>,
    pub candidates: BTreeMap<String, (usize, CandidateSpec)>,
    pub ansatze: BTreeMap<String, SymmetryAnsatz>,
    pub fixtures: BTreeMap<String, Fixture>,
    /// Display abbreviations: a coefficient equal to `±expr` prints as `±name`.
    pub abbreviations: Vec<(String, Expr)>,
}

/// One logical line with its position.
#[derive(Debug, Clone)]
struct Line<'a> {
    number: usize,
    /// Byte offset of `text` in the physical line.
    start: usize,
    raw: &'a str,
    text: &'a str,
}

impl Line<'_> {
    fn err(&self, byte: usize, message: impl Into<String>) -> ModelError {
        let col = self.raw[..(self.start + byte).min(self.raw.len())].chars().count() + 1;
        ModelError { line: self.number, column: col, message: message.into() }
    }

    fn sub(&self, from: usize, to: usize) -> Self {
        let slice = &self.text[from..to];
        let lead = slice.len() - slice.trim_start().len();
        Line { number: self.number, start: self.start + from + lead, raw: self.raw, text: slice.trim() }
    }

    /// Split at the first `=`.
    fn assignment(&self) -> Result<(Self, Self)> {
        let eq = self.text.find('=').ok_or_else(|| self.err(0, "expected `name = value`"))?;
        Ok((self.sub(0, eq), self.sub(eq + 1, self.text.len())))
    }

    /// Split at top-level occurrences of `sep` (outside parentheses).
    fn split(&self, sep: char) -> Vec<Self> {
        let mut out = Vec::new();
        let mut depth = 0i32;
        let mut last = 0;
        for (i, c) in self.text.char_indices() {
            match c {
                '(' | '[' => depth += 1,
                ')' | ']' => depth -= 1,
                c if c == sep && depth == 0 => {
                    out.push(self.sub(last, i));
                    last = i + c.len_utf8();
                }
                _ => {}
            }
        }
        out.push(self.sub(last, self.text.len()));
        out
    }

    fn list(&self) -> Vec<Self> {
        if self.text.is_empty() {
            Vec::new()
        } else {
            self.split(',')
        }
    }

    fn ident(&self) -> Result<String> {
        let ok = !self.text.is_empty()
            && self.text.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
            && self.text.chars().all(|c| c.is_alphanumeric() || c == '_');
        if ok {
            Ok(self.text.to_string())
        } else {
            Err(self.err(0, format!("expected a name, found `{}`", self.text)))
        }
    }
}

struct Section<'a> {
    header: Line<'a>,
    name: String,
    arg: Option<String>,
    lines: Vec<Line<'a>>,
}

fn split_sections(src: &str) -> Result<Vec<Section<'_>>> {
    let mut sections: Vec<Section> = Vec::new();
    for (k, raw) in src.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        let lead = content.len() - content.trim_start().len();
        let line = Line { number: k + 1, start: lead, raw, text: content.trim() };
        if line.text.is_empty() {
            continue;
        }
        if let Some(inner) = line.text.strip_prefix('[') {
            let inner = inner.strip_suffix(']').ok_or_else(|| line.err(line.text.len(), "missing `]`"))?;
            let mut parts = inner.split_whitespace();
            let name = parts.next().ok_or_else(|| line.err(1, "empty section name"))?.to_string();
            let arg = parts.next().map(str::to_string);
            if parts.next().is_some() {
                return Err(line.err(1, "section header takes at most one argument"));
            }
            sections.push(Section { header: line, name, arg, lines: Vec::new() });
        } else {
            match sections.last_mut() {
                Some(s) => s.lines.push(line),
                None => return Err(line.err(0, "entry outside of any section")),
            }
        }
    }
    Ok(sections)
}

struct Builder {
    chart: Option<Chart>,
    parameters: Vec<(Symbol, Option<Expr>)>,
    functions: Vec<(Symbol, Vec<Symbol>)>,
}

impl Builder {
    fn values(&self) -> Bindings {
        let mut b = Bindings::new();
        for (p, v) in &self.parameters {
            if let Some(v) = v {
                b = b.symbol(p.as_str(), v.clone());
            }
        }
        b
    }

    fn chart(&self, at: &Line) -> Result<&Chart> {
        self.chart.as_ref().ok_or_else(|| at.err(0, "coordinates must be declared first"))
    }

    /// Parse, check names and substitute parameter values.
    fn expr(&self, at: &Line, extra: &[Symbol]) -> Result<Expr> {
        let e = parse(at.text).map_err(|e: ParseError| at.err(e.offset(), strip_offset(&e)))?;
        self.check_names(at, &e, extra, &[])?;
        substitute(&e, &self.values()).map_err(|e| at.err(0, e.to_string()))
    }

    fn check_names(&self, at: &Line, e: &Expr, extra: &[Symbol], free_functions: &[Symbol]) -> Result<()> {
        let coords = self.chart.as_ref().map(|c| c.coords().to_vec()).unwrap_or_default();
        for s in e.free_symbols() {
            let known = coords.contains(&s) || extra.contains(&s) || self.parameters.iter().any(|(p, _)| *p == s);
            if !known {
                return Err(at.err(0, format!("undeclared symbol `{s}`")));
            }
        }
        for ap in e.applications() {
            if free_functions.contains(&ap.name) {
                continue;
            }
            match self.functions.iter().find(|(f, _)| *f == ap.name) {
                None => return Err(at.err(0, format!("undeclared function `{}`", ap.name))),
                Some((_, args)) if args.len() != ap.args.len() => {
                    return Err(at.err(0, format!("`{}` takes {} arguments", ap.name, args.len())))
                }
                _ => {}
            }
        }
        Ok(())
    }

    fn field(&self, at: &Line) -> Result<Vec<Expr>> {
        let chart = self.chart(at)?.clone();
        let items = at.list();
        let sparse = items.iter().any(|i| sparse_key(i.text).is_some());
        let mut coeffs = vec![Expr::zero(); chart.dim()];
        if sparse {
            for item in items {
                let colon = sparse_key(item.text).ok_or_else(|| item.err(0, "mix of sparse and positional entries"))?;
                let key = item.sub(0, colon);
                let k = chart.index_of(key.text).ok_or_else(|| key.err(0, format!("unknown coordinate `{}`", key.text)))?;
                coeffs[k] = self.expr(&item.sub(colon + 1, item.text.len()), &[])?;
            }
        } else {
            if items.len() != chart.dim() {
                return Err(at.err(0, format!("expected {} coefficients, found {}", chart.dim(), items.len())));
            }
            for (k, item) in items.iter().enumerate() {
                coeffs[k] = self.expr(item, &[])?;
            }
        }
        Ok(coeffs)
    }
}

fn sparse_key(text: &str) -> Option<usize> {
    let colon = text.find(':')?;
    let key = text[..colon].trim();
    (!key.is_empty() && key.chars().all(|c| c.is_alphanumeric() || c == '_')).then_some(colon)
}

fn strip_offset(e: &ParseError) -> String {
    let s = e.to_string();
    match s.split_once(": ") {
        Some((head, rest)) if head.starts_with("at offset") => rest.to_string(),
        _ => s,
    }
}

fn grid_spec(at: &Line) -> Result<GridSpec> {
    let items = at.list();
    if items.len() != 6 {
        return Err(at.err(0, "grid needs xmin, xmax, ymin, ymax, nx, ny"));
    }
    let num = |i: &Line| i.text.parse::<f64>().map_err(|_| i.err(0, format!("expected a number, found `{}`", i.text)));
    let count = |i: &Line| i.text.parse::<usize>().map_err(|_| i.err(0, format!("expected a count, found `{}`", i.text)));
    GridSpec::new(num(&items[0])?, num(&items[1])?, num(&items[2])?, num(&items[3])?, count(&items[4])?, count(&items[5])?)
        .map_err(|e| at.err(0, e.to_string()))
}

const ORDER: [&str; 11] = [
    "coordinates",
    "parameters",
    "functions",
    "fgordon",
    "cartan",
    "vectorfields",
    "forms",
    "distribution",
    "candidates",
    "ansatz",
    "fixtures",
];

impl Model {
    pub fn load(path: &Path) -> std::result::Result<Model, String> {
        let src = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        Model::parse(&name, &src).map_err(|e| format!("{}:{e}", path.display()))
    }

    pub fn parse(name: &str, src: &str) -> Result<Model> {
        let mut sections = split_sections(src)?;
        for s in &sections {
            if !ORDER.contains(&s.name.as_str()) {
                return Err(s.header.err(1, format!("unknown section `{}`", s.name)));
            }
        }
        // process in dependency order, keeping file order within a kind
        sections.sort_by_key(|s| ORDER.iter().position(|o| *o == s.name).unwrap());
        let mut b = Builder { chart: None, parameters: Vec::new(), functions: Vec::new() };
        let mut model = Model {
            name: name.to_string(),
            chart: Chart::new(&[]).expect("empty chart"),
            parameters: Vec::new(),
            functions: Vec::new(),
            fields: BTreeMap::new(),
            forms: BTreeMap::new(),
            coform_names: Vec::new(),
            distribution: None,
            fgordon: None,
            candidates: BTreeMap::new(),
            ansatze: BTreeMap::new(),
            fixtures: BTreeMap::new(),
            abbreviations: Vec::new(),
        };
        let mut dist_lines: Vec<Line> = Vec::new();
        for sec in &sections {
            match sec.name.as_str() {
                "coordinates" => {
                    let mut names = Vec::new();
                    for line in &sec.lines {
                        let list = match line.assignment() {
                            Ok((k, v)) if k.text == "chart" => v,
                            _ => line.clone(),
                        };
                        for item in list.list() {
                            names.push(item.ident()?);
                        }
                    }
                    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
                    b.chart = Some(Chart::new(&refs).map_err(|e| sec.header.err(0, e.to_string()))?);
                }
                "parameters" => {
                    for line in &sec.lines {
                        for item in line.list() {
                            let (n, v) = match item.assignment() {
                                Ok((n, v)) => (n.ident()?, Some(b.expr(&v, &[])?)),
                                Err(_) => (item.ident()?, None),
                            };
                            let s = Symbol::new(&n);
                            if b.chart.as_ref().is_some_and(|c| c.coords().contains(&s)) {
                                return Err(item.err(0, format!("parameter `{n}` is also a coordinate")));
                            }
                            b.parameters.push((s, v));
                        }
                    }
                }
                "functions" => {
                    for line in &sec.lines {
                        let open = line.text.find('(').ok_or_else(|| line.err(0, "expected `name(arg, ...)`"))?;
                        let close = line.text.rfind(')').ok_or_else(|| line.err(line.text.len(), "missing `)`"))?;
                        let fname = line.sub(0, open).ident()?;
                        let args = line.sub(open + 1, close).list().iter().map(|a| a.ident().map(|s| Symbol::new(&s))).collect::<Result<Vec<_>>>()?;
                        b.functions.push((Symbol::new(&fname), args));
                    }
                }
                "fgordon" => {
                    let mut f = None;
                    for line in &sec.lines {
                        let (k, v) = line.assignment()?;
                        match k.text {
                            "F" => {
                                if b.chart.is_none() {
                                    b.chart = Some(Chart::new(&JET_COORDS).expect("jet chart"));
                                }
                                f = Some((b.expr(&v, &[])?, v.clone()));
                            }
                            other => return Err(k.err(0, format!("unknown key `{other}`"))),
                        }
                    }
                    let (f, at) = f.ok_or_else(|| sec.header.err(0, "missing `F = ...`"))?;
                    let jet = b.chart.as_ref().is_some_and(|c| c.coords().iter().map(Symbol::as_str).eq(JET_COORDS));
                    if !jet {
                        return Err(sec.header.err(0, "the jet model needs coordinates x, y, u, p, q, r, t"));
                    }
                    let params: Vec<String> = b.parameters.iter().map(|(p, _)| p.to_string()).collect();
                    let refs: Vec<&str> = params.iter().map(String::as_str).collect();
                    let m = fgordon_model(&f, &refs).map_err(|e| at.err(0, e.to_string()))?;
                    model.abbreviations.push(("F".into(), f));
                    for (i, w) in m.omegas().into_iter().enumerate() {
                        model.forms.insert(format!("w{}", i + 1), w);
                    }
                    model.coform_names = (1..=3).map(|i| format!("w{i}")).collect();
                    model.distribution = Some(m.distribution.clone());
                    model.fgordon = Some(m);
                }
                "cartan" => {
                    let (mut order, mut f) = (None, None);
                    for line in &sec.lines {
                        let (k, v) = line.assignment()?;
                        match k.text {
                            "order" => {
                                let k: usize = v.text.parse().map_err(|_| v.err(0, "order must be a positive integer"))?;
                                if k == 0 {
                                    return Err(v.err(0, "order must be a positive integer"));
                                }
                                let names = cartan_coords(k);
                                let refs: Vec<&str> = names.iter().map(String::as_str).collect();
                                b.chart = Some(Chart::new(&refs).expect("distinct names"));
                                order = Some(k);
                            }
                            "f" => f = Some(v.clone()),
                            other => return Err(k.err(0, format!("unknown key `{other}`"))),
                        }
                    }
                    let k = order.ok_or_else(|| sec.header.err(0, "missing `order = ...`"))?;
                    let at = f.ok_or_else(|| sec.header.err(0, "missing `f = ...`"))?;
                    let f = b.expr(&at, &[])?;
                    let params: Vec<String> = b.parameters.iter().map(|(p, _)| p.to_string()).collect();
                    let refs: Vec<&str> = params.iter().map(String::as_str).collect();
                    let m = cartan_model(k, &f, &refs).map_err(|e| at.err(0, e.to_string()))?;
                    let coforms = m.distribution.coforms().map_err(|e| at.err(0, e.to_string()))?;
                    for (i, w) in coforms.iter().enumerate() {
                        model.forms.insert(format!("w{i}"), w.clone());
                    }
                    model.coform_names = (0..k).map(|i| format!("w{i}")).collect();
                    model.fields.insert("X".into(), m.field.clone());
                    model.distribution = Some(m.distribution.clone());
                }
                "vectorfields" => {
                    for line in &sec.lines {
                        let (k, v) = line.assignment()?;
                        let name = k.ident()?;
                        let coeffs = b.field(&v)?;
                        let vf = VectorField::new(b.chart(&v)?, coeffs).expect("length checked");
                        if model.fields.insert(name.clone(), vf).is_some() {
                            return Err(k.err(0, format!("vector field `{name}` declared twice")));
                        }
                    }
                }
                "forms" => {
                    for line in &sec.lines {
                        let (k, v) = line.assignment()?;
                        let name = k.ident()?;
                        let coeffs = b.field(&v)?;
                        let w = KForm::one_form(b.chart(&v)?, coeffs).expect("length checked");
                        model.forms.insert(name, w);
                    }
                }
                "distribution" => dist_lines.extend(sec.lines.iter().cloned()),
                "candidates" => {
                    for line in &sec.lines {
                        let (k, v) = line.assignment()?;
                        let name = k.ident()?;
                        let (kind, rest) = match v.text.find(char::is_whitespace) {
                            Some(i) => (&v.text[..i], v.sub(i, v.text.len())),
                            None => (v.text, v.sub(v.text.len(), v.text.len())),
                        };
                        let spec = match kind {
                            "field" => CandidateSpec::Field(rest.ident()?),
                            "point" => {
                                let parts = rest.list();
                                if parts.len() != 3 {
                                    return Err(rest.err(0, "a point candidate needs X, Y, U"));
                                }
                                CandidateSpec::Point(b.expr(&parts[0], &[])?, b.expr(&parts[1], &[])?, b.expr(&parts[2], &[])?)
                            }
                            "lift" => {
                                let halves = rest.split(';');
                                let params = halves.get(1).map(Line::list).unwrap_or_default();
                                if halves.len() != 2 || params.len() != 2 {
                                    return Err(rest.err(0, "expected `lift FIELD; XI, ETA`"));
                                }
                                CandidateSpec::Lift(halves[0].ident()?, b.expr(&params[0], &[])?, b.expr(&params[1], &[])?)
                            }
                            other => return Err(v.err(0, format!("unknown candidate kind `{other}` (field, point, lift)"))),
                        };
                        let order = model.candidates.len();
                        model.candidates.insert(name, (order, spec));
                    }
                }
                "ansatz" => {
                    let name = sec.arg.clone().ok_or_else(|| sec.header.err(1, "ansatz section needs a name"))?;
                    let chart = b.chart(&sec.header)?.clone();
                    let mut comps = vec![Component::Given(Expr::zero()); chart.dim()];
                    for line in &sec.lines {
                        let (k, v) = line.assignment()?;
                        let idx = chart.index_of(k.text).ok_or_else(|| k.err(0, format!("unknown coordinate `{}`", k.text)))?;
                        comps[idx] = ansatz_component(&b, &v)?;
                    }
                    let a = SymmetryAnsatz::new(&chart, comps).map_err(|e| sec.header.err(0, e.to_string()))?;
                    model.ansatze.insert(name, a);
                }
                "fixtures" => {
                    for line in &sec.lines {
                        let (k, v) = line.assignment()?;
                        let name = k.ident()?;
                        let halves = v.split(';');
                        if halves.len() != 2 {
                            return Err(v.err(0, "expected `SOLUTION; xmin, xmax, ymin, ymax, nx, ny`"));
                        }
                        let xy = [Symbol::new("x"), Symbol::new("y")];
                        let solution = parse(halves[0].text).map_err(|e| halves[0].err(e.offset(), strip_offset(&e)))?;
                        b.check_names(&halves[0], &solution, &xy, &[])?;
                        let solution = substitute(&solution, &b.values()).map_err(|e| halves[0].err(0, e.to_string()))?;
                        let spec = grid_spec(&halves[1])?;
                        model.fixtures.insert(name.clone(), Fixture { name, solution, spec });
                    }
                }
                _ => unreachable!("validated above"),
            }
        }
        if let Some(c) = &b.chart {
            model.chart = c.clone();
        } else {
            return Err(ModelError { line: 1, column: 1, message: "no coordinates declared".into() });
        }
        if !dist_lines.is_empty() {
            model.distribution = Some(build_distribution(&model, &dist_lines)?);
        }
        model.parameters = b.parameters;
        model.functions = b.functions;
        for (name, (_, spec)) in &model.candidates {
            let missing = match spec {
                CandidateSpec::Field(f) | CandidateSpec::Lift(f, _, _) => model.field(f).is_none().then_some(f),
                CandidateSpec::Point(..) => None,
            };
            if let Some(f) = missing {
                return Err(ModelError { line: 1, column: 1, message: format!("candidate `{name}` refers to unknown field `{f}`") });
            }
        }
        Ok(model)
    }

    /// Named field: declared fields, then distribution generators, then `D<coord>`.
    pub fn field(&self, name: &str) -> Option<VectorField> {
        if let Some(f) = self.fields.get(name) {
            return Some(f.clone());
        }
        if let Some(d) = &self.distribution {
            if let Some(i) = d.names().iter().position(|n| n == name) {
                return Some(d.tangent()[i].clone());
            }
        }
        let coord = name.strip_prefix('D')?;
        self.chart.index_of(coord).map(|i| VectorField::coordinate(&self.chart, i))
    }

    /// Candidate by name (declared candidates first, then fields).
    pub fn candidate(&self, name: &str) -> std::result::Result<VectorField, String> {
        let Some((_, spec)) = self.candidates.get(name) else {
            return self.field(name).ok_or_else(|| format!("unknown candidate `{name}`"));
        };
        let jet = || self.fgordon.as_ref().ok_or_else(|| format!("candidate `{name}` needs an [fgordon] model"));
        match spec {
            CandidateSpec::Field(f) => self.field(f).ok_or_else(|| format!("unknown field `{f}`")),
            CandidateSpec::Point(x, y, u) => complete_point_candidate(jet()?, x, y, u).map_err(|e| e.to_string()),
            CandidateSpec::Lift(f, xi, eta) => {
                let w = self.field(f).ok_or_else(|| format!("unknown field `{f}`"))?;
                lift_vertical(jet()?, &w, xi, eta).map_err(|e| e.to_string())
            }
        }
    }

    /// Candidate names in declaration order.
    pub fn candidate_names(&self) -> Vec<String> {
        let mut v: Vec<(usize, &String)> = self.candidates.iter().map(|(n, (i, _))| (*i, n)).collect();
        v.sort();
        v.into_iter().map(|(_, n)| n.clone()).collect()
    }
}

fn ansatz_component(b: &Builder, at: &Line) -> Result<Component> {
    let e = parse(at.text).map_err(|e| at.err(e.offset(), strip_offset(&e)))?;
    if let Some(involute_core::expr::Atom::Apply(ap)) = e.as_atom() {
        let declared = b.functions.iter().any(|(f, _)| *f == ap.name);
        if !declared && ap.derivs.is_empty() {
            let args = ap
                .args
                .iter()
                .map(|a| a.as_symbol().cloned().ok_or_else(|| at.err(0, "undetermined function arguments must be coordinates")))
                .collect::<Result<Vec<_>>>()?;
            return Ok(Component::Unknown { name: ap.name.clone(), args });
        }
    }
    b.check_names(at, &e, &[], &[])?;
    Ok(Component::Given(substitute(&e, &b.values()).map_err(|e| at.err(0, e.to_string()))?))
}

fn build_distribution(model: &Model, lines: &[Line]) -> Result<Distribution> {
    let chart = &model.chart;
    let (mut tangent, mut names, mut coforms, mut vertical) = (None, Vec::new(), None, None);
    for line in lines {
        let (k, v) = line.assignment()?;
        match k.text {
            "tangent" => {
                let mut gens = Vec::new();
                for item in v.list() {
                    let n = item.ident()?;
                    gens.push(model.field(&n).ok_or_else(|| item.err(0, format!("unknown vector field `{n}`")))?);
                    names.push(n);
                }
                tangent = Some(gens);
            }
            "coforms" => {
                let mut forms = Vec::new();
                for item in v.list() {
                    let n = item.ident()?;
                    forms.push((n.clone(), model.forms.get(&n).cloned().ok_or_else(|| item.err(0, format!("unknown form `{n}`")))?));
                }
                coforms = Some(forms);
            }
            "vertical" => {
                let idx = v
                    .list()
                    .iter()
                    .map(|i| chart.index_of(i.text).ok_or_else(|| i.err(0, format!("unknown coordinate `{}`", i.text))))
                    .collect::<Result<Vec<_>>>()?;
                vertical = Some(idx);
            }
            other => return Err(k.err(0, format!("unknown key `{other}`"))),
        }
    }
    let at = &lines[0];
    let d = match (tangent, coforms) {
        (Some(t), Some(c)) => {
            Distribution::with_coforms(chart, t, c.into_iter().map(|(_, f)| f).collect()).map(|d| d.with_names(names))
        }
        (Some(t), None) => Distribution::from_tangent(chart, t).map(|d| d.with_names(names)),
        (None, Some(c)) => Distribution::from_coforms(chart, c.into_iter().map(|(_, f)| f).collect()),
        (None, None) => return Err(at.err(0, "distribution needs `tangent` or `coforms`")),
    }
    .map_err(|e| at.err(0, e.to_string()))?;
    Ok(match vertical {
        Some(v) => d.with_vertical(v),
        None => d,
    })
}
