//! JSON problem files.
//!
//! ```json
//! {
//!   "dimension": 2,
//!   "sets": [
//!     { "type": "ball", "parameters": { "center": [2, 3], "radius": 1 } },
//!     { "type": "segment", "parameters": { "p": [5, 0], "q": [6, 2] } }
//!   ],
//!   "start": [[1, 3], [5, 1]],
//!   "solver": { "step_rule": "constant", "alpha": 0.5, "tolerance": 1e-12 },
//!   "outputs": { "trace_csv": "trace.csv", "summary_json": "summary.json" }
//! }
//! ```
//!
//! Set types and their parameters: `ball` (center, radius), `axis_box` (lo,
//! hi), `segment` (p, q), `line` (base, direction), `halfspace` (normal,
//! offset), `polygon` (vertices, counterclockwise).

use serde_json::{json, Map, Value};
use waist_core::solver::{Method, Refresh, StepRule};
use waist_core::{Configuration, ConvexSet, Point, Problem, SolverConfig};

use crate::CliError;

type Result<T> = std::result::Result<T, CliError>;

const ROOT_KEYS: &[&str] = &["dimension", "sets", "start", "solver", "outputs"];
const SET_KEYS: &[&str] = &["type", "parameters"];
const SOLVER_KEYS: &[&str] =
    &["step_rule", "alpha", "c", "refresh", "tolerance", "max_iterations", "aitken", "method"];
const OUTPUT_KEYS: &[&str] = &["trace_csv", "summary_json", "figure_svg"];

fn parameter_keys(kind: &str) -> Option<&'static [&'static str]> {
    Some(match kind {
        "ball" => &["center", "radius"],
        "axis_box" => &["lo", "hi"],
        "segment" => &["p", "q"],
        "line" => &["base", "direction"],
        "halfspace" => &["normal", "offset"],
        "polygon" => &["vertices"],
        _ => return None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleKind {
    Constant,
    Diminishing,
    ExactLineSearch,
}

impl RuleKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "constant" => Some(RuleKind::Constant),
            "diminishing" => Some(RuleKind::Diminishing),
            "exact-line-search" | "exact_line_search" => Some(RuleKind::ExactLineSearch),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RuleKind::Constant => "constant",
            RuleKind::Diminishing => "diminishing",
            RuleKind::ExactLineSearch => "exact_line_search",
        }
    }
}

pub fn parse_method(s: &str) -> Option<Method> {
    match s {
        "psd" => Some(Method::Psd),
        "nag" => Some(Method::Nag),
        _ => None,
    }
}

pub fn method_name(m: Method) -> &'static str {
    match m {
        Method::Psd => "psd",
        Method::Nag => "nag",
    }
}

/// Solver section as written in the file, before it is turned into a
/// [`SolverConfig`]. `alpha` is the constant step or the line-search
/// bracket; `c` the diminishing-rule numerator.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverSpec {
    pub step_rule: RuleKind,
    pub alpha: Option<f64>,
    pub c: Option<f64>,
    pub refresh: Refresh,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub aitken: bool,
    pub method: Method,
}

impl Default for SolverSpec {
    fn default() -> Self {
        SolverSpec {
            step_rule: RuleKind::Constant,
            alpha: None,
            c: None,
            refresh: Refresh::Once,
            tolerance: 1e-10,
            max_iterations: 100_000,
            aitken: false,
            method: Method::Psd,
        }
    }
}

impl SolverSpec {
    pub fn step(&self) -> Result<StepRule> {
        Ok(match self.step_rule {
            RuleKind::Constant => StepRule::Constant {
                alpha: self
                    .alpha
                    .ok_or_else(|| CliError::schema("solver.alpha", "required for step_rule constant"))?,
            },
            RuleKind::Diminishing => StepRule::Diminishing { c: self.c.unwrap_or(1.0) },
            RuleKind::ExactLineSearch => {
                StepRule::ExactLineSearch { alpha_max: self.alpha.unwrap_or(1.0), refresh: self.refresh }
            }
        })
    }

    pub fn config(&self) -> Result<SolverConfig> {
        let cfg = SolverConfig::constant(1.0, self.tolerance)
            .with_step_rule(self.step()?)
            .with_max_iterations(self.max_iterations)
            .with_aitken(self.aitken);
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Output file names; `None` means "not written".
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Outputs {
    pub trace_csv: Option<String>,
    pub summary_json: Option<String>,
    pub figure_svg: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemFile {
    pub problem: Problem,
    pub start: Configuration,
    /// False when the start was filled in by [`default_start`].
    pub start_given: bool,
    pub solver: SolverSpec,
    /// `None` when the file has no `outputs` section.
    pub outputs: Option<Outputs>,
}

pub fn parse_problem(text: &str) -> Result<ProblemFile> {
    let root: Value = serde_json::from_str(text)?;
    let unknown = unknown_keys(&root);
    if !unknown.is_empty() {
        return Err(CliError::UnknownKeys(unknown));
    }
    let map = object(&root, "document")?;
    let dimension = match map.get("dimension") {
        Some(v) => v
            .as_u64()
            .filter(|d| *d >= 1)
            .ok_or_else(|| CliError::schema("dimension", "must be a positive integer"))? as usize,
        None => return Err(CliError::schema("dimension", "missing")),
    };
    let sets = map
        .get("sets")
        .ok_or_else(|| CliError::schema("sets", "missing"))?
        .as_array()
        .ok_or_else(|| CliError::schema("sets", "must be a list"))?
        .iter()
        .enumerate()
        .map(|(i, v)| parse_set(v, &format!("sets[{i}]"), dimension))
        .collect::<Result<Vec<_>>>()?;
    let problem = Problem::new(sets).map_err(|e| CliError::schema("sets", e.to_string()))?;

    let (start, start_given) = match map.get("start") {
        None | Some(Value::Null) => (default_start(&problem)?, false),
        Some(v) => {
            let list = v.as_array().ok_or_else(|| CliError::schema("start", "must be a list of points"))?;
            if list.len() != problem.len() {
                return Err(CliError::schema(
                    "start",
                    format!("expected {} points, found {}", problem.len(), list.len()),
                ));
            }
            let points = list
                .iter()
                .enumerate()
                .map(|(i, p)| point(p, &format!("start[{i}]"), dimension))
                .collect::<Result<Vec<_>>>()?;
            (Configuration::new(points), true)
        }
    };

    let solver = match map.get("solver") {
        None => SolverSpec::default(),
        Some(v) => parse_solver(v)?,
    };
    let outputs = match map.get("outputs") {
        None => None,
        Some(v) => Some(parse_outputs(v)?),
    };
    Ok(ProblemFile { problem, start, start_given, solver, outputs })
}

/// Each start point is the projection onto its set of the centroid of the
/// other sets' representative points.
pub fn default_start(problem: &Problem) -> waist_core::Result<Configuration> {
    let reps: Vec<Point> = problem.sets().iter().map(ConvexSet::representative_point).collect();
    let n = problem.dimension();
    let points = (0..problem.len())
        .map(|i| {
            let sum = reps
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .fold(Point::zeros(n), |acc, (_, r)| &acc + r);
            problem.set(i).project(&sum.scaled(1.0 / (reps.len() - 1) as f64))
        })
        .collect::<waist_core::Result<Vec<_>>>()?;
    Ok(Configuration::new(points))
}

/// Inverse of [`parse_problem`].
pub fn to_value(file: &ProblemFile) -> Value {
    let sets: Vec<Value> = file.problem.sets().iter().map(set_value).collect();
    let s = &file.solver;
    let mut solver = Map::new();
    solver.insert("step_rule".into(), json!(s.step_rule.name()));
    if let Some(a) = s.alpha {
        solver.insert("alpha".into(), json!(a));
    }
    if let Some(c) = s.c {
        solver.insert("c".into(), json!(c));
    }
    solver.insert(
        "refresh".into(),
        json!(match s.refresh {
            Refresh::Once => "once",
            Refresh::EveryIteration => "every_iteration",
        }),
    );
    solver.insert("tolerance".into(), json!(s.tolerance));
    solver.insert("max_iterations".into(), json!(s.max_iterations));
    solver.insert("aitken".into(), json!(s.aitken));
    solver.insert("method".into(), json!(method_name(s.method)));

    let mut root = Map::new();
    root.insert("dimension".into(), json!(file.problem.dimension()));
    root.insert("sets".into(), Value::Array(sets));
    if file.start_given {
        root.insert("start".into(), json!(file.start.points.iter().map(Point::coords).collect::<Vec<_>>()));
    }
    root.insert("solver".into(), Value::Object(solver));
    if let Some(o) = &file.outputs {
        let mut out = Map::new();
        for (k, v) in [("trace_csv", &o.trace_csv), ("summary_json", &o.summary_json), ("figure_svg", &o.figure_svg)] {
            if let Some(v) = v {
                out.insert(k.into(), json!(v));
            }
        }
        root.insert("outputs".into(), Value::Object(out));
    }
    Value::Object(root)
}

fn set_value(set: &ConvexSet) -> Value {
    let (kind, parameters) = match set {
        ConvexSet::Ball { center, radius } => ("ball", json!({ "center": center, "radius": radius })),
        ConvexSet::AxisBox { lo, hi } => ("axis_box", json!({ "lo": lo, "hi": hi })),
        ConvexSet::Segment { p, q } => ("segment", json!({ "p": p, "q": q })),
        ConvexSet::Line { base, direction } => ("line", json!({ "base": base, "direction": direction })),
        ConvexSet::Halfspace { normal, offset } => ("halfspace", json!({ "normal": normal, "offset": offset })),
        ConvexSet::Polygon2D { vertices } => ("polygon", json!({ "vertices": vertices })),
    };
    json!({ "type": kind, "parameters": parameters })
}

fn unknown_keys(root: &Value) -> Vec<String> {
    let mut out = Vec::new();
    let mut check = |v: &Value, path: &str, allowed: &[&str]| {
        if let Value::Object(m) = v {
            for k in m.keys().filter(|k| !allowed.contains(&k.as_str())) {
                out.push(if path.is_empty() { k.clone() } else { format!("{path}.{k}") });
            }
        }
    };
    check(root, "", ROOT_KEYS);
    if let Some(Value::Array(sets)) = root.get("sets") {
        for (i, s) in sets.iter().enumerate() {
            let path = format!("sets[{i}]");
            check(s, &path, SET_KEYS);
            let keys = s.get("type").and_then(Value::as_str).and_then(parameter_keys);
            if let (Some(keys), Some(params)) = (keys, s.get("parameters")) {
                check(params, &format!("{path}.parameters"), keys);
            }
        }
    }
    if let Some(s) = root.get("solver") {
        check(s, "solver", SOLVER_KEYS);
    }
    if let Some(o) = root.get("outputs") {
        check(o, "outputs", OUTPUT_KEYS);
    }
    out
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| CliError::schema(path, "must be an object"))
}

fn field<'a>(map: &'a Map<String, Value>, path: &str, key: &str) -> Result<&'a Value> {
    map.get(key).ok_or_else(|| CliError::schema(format!("{path}.{key}"), "missing"))
}

fn number(v: &Value, path: &str) -> Result<f64> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| CliError::schema(path, "must be a finite number"))
}

fn point(v: &Value, path: &str, dimension: usize) -> Result<Point> {
    let coords = v
        .as_array()
        .ok_or_else(|| CliError::schema(path, "must be a list of coordinates"))?
        .iter()
        .enumerate()
        .map(|(i, c)| number(c, &format!("{path}[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    if coords.len() != dimension {
        return Err(CliError::schema(
            path,
            format!("expected {dimension} coordinates, found {}", coords.len()),
        ));
    }
    Ok(Point::from(coords))
}

fn parse_set(v: &Value, path: &str, dimension: usize) -> Result<ConvexSet> {
    let map = object(v, path)?;
    let kind = field(map, path, "type")?
        .as_str()
        .ok_or_else(|| CliError::schema(format!("{path}.type"), "must be a string"))?;
    if parameter_keys(kind).is_none() {
        return Err(CliError::schema(
            format!("{path}.type"),
            format!("unknown set type {kind:?} (expected ball, axis_box, segment, line, halfspace or polygon)"),
        ));
    }
    let ppath = format!("{path}.parameters");
    let params = object(field(map, path, "parameters")?, &ppath)?;
    let pt = |key: &str| point(field(params, &ppath, key)?, &format!("{ppath}.{key}"), dimension);
    let num = |key: &str| number(field(params, &ppath, key)?, &format!("{ppath}.{key}"));
    let set = match kind {
        "ball" => {
            let radius = num("radius")?;
            if radius <= 0.0 {
                return Err(CliError::schema(format!("{ppath}.radius"), "must be > 0"));
            }
            ConvexSet::ball(pt("center")?, radius)
        }
        "axis_box" => ConvexSet::axis_box(pt("lo")?, pt("hi")?),
        "segment" => ConvexSet::segment(pt("p")?, pt("q")?),
        "line" => ConvexSet::line(pt("base")?, pt("direction")?),
        "halfspace" => ConvexSet::halfspace(pt("normal")?, num("offset")?),
        "polygon" => {
            if dimension != 2 {
                return Err(CliError::schema(path, format!("polygons need dimension 2, file has {dimension}")));
            }
            let vpath = format!("{ppath}.vertices");
            let vertices = field(params, &ppath, "vertices")?
                .as_array()
                .ok_or_else(|| CliError::schema(&vpath, "must be a list of points"))?
                .iter()
                .enumerate()
                .map(|(i, p)| point(p, &format!("{vpath}[{i}]"), 2))
                .collect::<Result<Vec<_>>>()?;
            ConvexSet::polygon(vertices)
        }
        _ => unreachable!(),
    };
    set.map_err(|e| CliError::schema(path, e.to_string()))
}

fn parse_solver(v: &Value) -> Result<SolverSpec> {
    let map = object(v, "solver")?;
    let mut spec = SolverSpec::default();
    let get = |key: &str| map.get(key).filter(|v| !v.is_null());
    if let Some(v) = get("step_rule") {
        spec.step_rule = v.as_str().and_then(RuleKind::parse).ok_or_else(|| {
            CliError::schema("solver.step_rule", "expected constant, diminishing or exact_line_search")
        })?;
    }
    if let Some(v) = get("alpha") {
        spec.alpha = Some(positive(v, "solver.alpha")?);
    }
    if let Some(v) = get("c") {
        spec.c = Some(positive(v, "solver.c")?);
    }
    if let Some(v) = get("refresh") {
        spec.refresh = match v.as_str() {
            Some("once") => Refresh::Once,
            Some("every_iteration") => Refresh::EveryIteration,
            _ => return Err(CliError::schema("solver.refresh", "expected once or every_iteration")),
        };
    }
    if let Some(v) = get("tolerance") {
        spec.tolerance = positive(v, "solver.tolerance")?;
    }
    if let Some(v) = get("max_iterations") {
        spec.max_iterations = v
            .as_u64()
            .filter(|n| *n >= 1)
            .ok_or_else(|| CliError::schema("solver.max_iterations", "must be a positive integer"))?
            as usize;
    }
    if let Some(v) = get("aitken") {
        spec.aitken = v.as_bool().ok_or_else(|| CliError::schema("solver.aitken", "must be true or false"))?;
    }
    if let Some(v) = get("method") {
        spec.method = v
            .as_str()
            .and_then(parse_method)
            .ok_or_else(|| CliError::schema("solver.method", "expected psd or nag"))?;
    }
    if spec.c.is_some() && spec.step_rule != RuleKind::Diminishing {
        return Err(CliError::schema("solver.c", "only used with step_rule diminishing"));
    }
    if spec.alpha.is_some() && spec.step_rule == RuleKind::Diminishing {
        return Err(CliError::schema("solver.alpha", "step_rule diminishing takes c"));
    }
    Ok(spec)
}

fn positive(v: &Value, path: &str) -> Result<f64> {
    let x = number(v, path)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(CliError::schema(path, "must be > 0"))
    }
}

fn parse_outputs(v: &Value) -> Result<Outputs> {
    let map = object(v, "outputs")?;
    let name = |key: &str| -> Result<Option<String>> {
        match map.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(_) => Err(CliError::schema(format!("outputs.{key}"), "must be a file name")),
        }
    };
    Ok(Outputs {
        trace_csv: name("trace_csv")?,
        summary_json: name("summary_json")?,
        figure_svg: name("figure_svg")?,
    })
}
