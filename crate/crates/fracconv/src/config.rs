//! Experiment configuration: a TOML document with fixed sections.
//!
//! ```toml
//! [model]
//! alpha = 1.5
//! q = 1.2
//! mass = 1.0
//! relaxed = false          # allow q >= alpha
//!
//! [grid]
//! half_width = 200.0       # domain [-L, L)
//! points = 8192            # power of two
//!
//! [solver]
//! scheme = "splitting"     # or "duhamel"
//! delta = 1e-3
//! end_time = 100.0
//! record_times = [1.0, 3.0, 10.0, 30.0, 100.0]
//! cfl = 0.5
//! flux = "godunov"         # or "rusanov"
//! reconstruction = "muscl" # or "first_order"
//! picard_tol = 1e-12
//! picard_max_iters = 50
//!
//! [initial]
//! kind = "box"             # box | bump | nwave | file
//! half_width = 1.0         # box: support [-a, a]
//! # width = 2.0            # bump
//! # t0 = 1.0               # nwave
//! # path = "u0.snap"       # file (relative to the config file)
//!
//! [diagnostics]
//! r_local = 10.0
//! r_tail = 100.0
//! slack = 0.02
//!
//! [output]
//! directory = "out"
//! formats = ["csv", "json", "snapshot"]
//! ```
//!
//! Only `[model]`, `[grid]` and `[solver]` are required; every other key has
//! the default shown. Parsing reports every violation at once, each with a
//! `line:column` location.

use std::fmt;
use std::ops::Range;
use std::path::{Path, PathBuf};

use fracconv_core::operators::FluxScheme;
use fracconv_core::solver::{Reconstruction, Scheme, SolverConfig};
use fracconv_core::{GridSpec, ModelParams, Regime};
use toml_edit::{Document, Item, Table, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum InitialSpec {
    Box { half_width: f64 },
    Bump { width: f64 },
    NWaveAt { t0: f64 },
    File { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsSpec {
    pub r_local: f64,
    pub r_tail: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OutputFormat {
    Csv,
    Json,
    Snapshot,
}

impl OutputFormat {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(Self::Csv),
            "json" => Some(Self::Json),
            "snapshot" => Some(Self::Snapshot),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub directory: PathBuf,
    pub formats: Vec<OutputFormat>,
}

impl OutputSpec {
    pub fn wants(&self, f: OutputFormat) -> bool {
        self.formats.contains(&f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: ModelParams,
    pub grid: GridSpec,
    pub solver: SolverConfig,
    pub initial_data: InitialSpec,
    pub diagnostics: DiagnosticsSpec,
    pub outputs: OutputSpec,
}

/// One problem in a config file. `line`/`column` are 1-based; both are 0
/// when the problem has no single location (e.g. a missing section).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}:{}: {}", self.line, self.column, self.message)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigErrors(pub Vec<Violation>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} configuration error(s)", self.0.len())?;
        for v in &self.0 {
            write!(f, "\n  {v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

/// Overrides applied after parsing, before cross-field validation.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub relaxed: bool,
    pub output_dir: Option<PathBuf>,
    /// Directory that relative `initial.path` values resolve against.
    pub base_dir: Option<PathBuf>,
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigErrors> {
    parse_config_with(text, &Overrides::default())
}

pub fn parse_config_with(text: &str, overrides: &Overrides) -> Result<ExperimentConfig, ConfigErrors> {
    let doc = match Document::parse(text) {
        Ok(d) => d,
        Err(e) => {
            let (line, column) = e.span().map(|s| locate(text, s.start)).unwrap_or((0, 0));
            let message = e.message().to_string();
            return Err(ConfigErrors(vec![Violation { line, column, message }]));
        }
    };
    let mut cx = Cx { text, errors: Vec::new() };
    let root = doc.as_table();
    cx.unknown_keys(root, "", &["model", "grid", "solver", "initial", "diagnostics", "output"]);

    let model = cx.section(root, "model", true).map(|t| {
        cx.unknown_keys(t, "model", &["alpha", "q", "mass", "relaxed"]);
        let alpha = cx.float(t, "model", "alpha", None);
        let q = cx.float(t, "model", "q", None);
        let mass = cx.float(t, "model", "mass", Some(1.0));
        let relaxed = cx.boolean(t, "model", "relaxed", false) || overrides.relaxed;
        (alpha, q, mass, relaxed, t.get("q").and_then(Item::span))
    });
    let grid = cx.section(root, "grid", true).map(|t| {
        cx.unknown_keys(t, "grid", &["half_width", "points"]);
        let l = cx.float(t, "grid", "half_width", None);
        let n = cx.integer(t, "grid", "points", None);
        (l, n, t.span())
    });
    let solver = cx.section(root, "solver", true).map(|t| cx.solver(t));
    let initial = cx.initial(root.get("initial").and_then(Item::as_table), overrides.base_dir.as_deref());
    let diagnostics = {
        let t = cx.section(root, "diagnostics", false);
        if let Some(t) = t {
            cx.unknown_keys(t, "diagnostics", &["r_local", "r_tail", "slack"]);
        }
        let empty = Table::new();
        let t = t.unwrap_or(&empty);
        let r_local = cx.float(t, "diagnostics", "r_local", Some(10.0));
        let r_tail = cx.float(t, "diagnostics", "r_tail", Some(f64::NAN));
        let slack = cx.float(t, "diagnostics", "slack", Some(0.02));
        for (k, v) in [("r_local", r_local), ("slack", slack)] {
            if let Some(v) = v {
                if !(v.is_finite() && v >= 0.0) {
                    cx.at(t.get(k).and_then(Item::span), format!("diagnostics.{k} must be finite and >= 0"));
                }
            }
        }
        (r_local, r_tail, slack, t.get("r_tail").and_then(Item::span))
    };
    let outputs = {
        let t = cx.section(root, "output", false);
        if let Some(t) = t {
            cx.unknown_keys(t, "output", &["directory", "formats"]);
        }
        let empty = Table::new();
        let t = t.unwrap_or(&empty);
        let directory = cx.string(t, "output", "directory", Some("out")).map(PathBuf::from);
        let formats = cx.formats(t);
        (directory, formats)
    };

    // cross-field validation
    let mut params = None;
    if let Some((Some(alpha), Some(q), Some(mass), relaxed, q_span)) = model {
        let regime = if relaxed { Regime::Relaxed } else { Regime::Subcritical };
        if !relaxed && !(q < alpha) {
            cx.at(q_span, format!("subcritical requires q < alpha (got q = {q}, alpha = {alpha}); set model.relaxed or pass --relaxed"));
        } else {
            match ModelParams::new(alpha, q, mass, regime) {
                Ok(p) => params = Some(p),
                Err(e) => cx.at(root.get("model").and_then(Item::span), e.to_string()),
            }
        }
    }
    let mut grid_spec = None;
    if let Some((Some(l), Some(n), span)) = grid {
        match usize::try_from(n).ok().map(|n| GridSpec::new(l, n)) {
            Some(Ok(g)) => grid_spec = Some(g),
            Some(Err(e)) => cx.at(span, e.to_string()),
            None => cx.at(span, format!("grid.points must be positive, got {n}")),
        }
    }
    let solver_cfg = solver.flatten();
    let (r_local, r_tail, slack, r_tail_span) = diagnostics;
    let mut diag = None;
    if let (Some(r_local), Some(r_tail), Some(slack)) = (r_local, r_tail, slack) {
        let r_tail = match (r_tail.is_nan(), grid_spec) {
            (true, Some(g)) => 0.5 * g.half_width(),
            (true, None) => f64::NAN,
            (false, _) => r_tail,
        };
        if let Some(g) = grid_spec {
            if !(r_tail > 0.0 && r_tail < g.half_width()) {
                cx.at(r_tail_span, format!("diagnostics.r_tail must lie in (0, {}), got {r_tail}", g.half_width()));
            }
        }
        diag = Some(DiagnosticsSpec { r_local, r_tail, slack });
    }
    if let (Some(InitialSpec::Box { half_width }), Some(g)) = (&initial, grid_spec) {
        if *half_width >= g.half_width() {
            cx.at(None, format!("initial.half_width {half_width} does not fit in the domain half-width {}", g.half_width()));
        }
    }
    let mut outputs_spec = None;
    if let (Some(directory), Some(formats)) = outputs {
        outputs_spec = Some(OutputSpec {
            directory: overrides.output_dir.clone().unwrap_or(directory),
            formats,
        });
    }

    if !cx.errors.is_empty() {
        cx.errors.sort_by_key(|v| (v.line, v.column));
        return Err(ConfigErrors(cx.errors));
    }
    match (params, grid_spec, solver_cfg, initial, diag, outputs_spec) {
        (Some(model), Some(grid), Some(solver), Some(initial_data), Some(diagnostics), Some(outputs)) => Ok(ExperimentConfig {
            model,
            grid,
            solver,
            initial_data,
            diagnostics,
            outputs,
        }),
        _ => Err(ConfigErrors(vec![Violation {
            line: 0,
            column: 0,
            message: "incomplete configuration".into(),
        }])),
    }
}

pub fn load_config(path: &Path, overrides: &Overrides) -> Result<ExperimentConfig, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|e| LoadError::Io(path.to_path_buf(), e))?;
    let mut ov = overrides.clone();
    if ov.base_dir.is_none() {
        ov.base_dir = path.parent().map(Path::to_path_buf);
    }
    parse_config_with(&text, &ov).map_err(|e| LoadError::Invalid(path.to_path_buf(), e))
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {0}: {1}")]
    Io(PathBuf, #[source] std::io::Error),
    #[error("{0}: {1}")]
    Invalid(PathBuf, ConfigErrors),
}

fn locate(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.len(), |i| before.len() - i - 1) + 1;
    (line, column)
}

struct Cx<'a> {
    text: &'a str,
    errors: Vec<Violation>,
}

impl Cx<'_> {
    fn at(&mut self, span: Option<Range<usize>>, message: String) {
        let (line, column) = span.map(|s| locate(self.text, s.start)).unwrap_or((0, 0));
        self.errors.push(Violation { line, column, message });
    }

    fn unknown_keys(&mut self, t: &Table, section: &str, allowed: &[&str]) {
        for (k, _) in t.iter() {
            if !allowed.contains(&k) {
                let span = t.get_key_value(k).and_then(|(key, _)| key.span());
                let name = if section.is_empty() { format!("[{k}]") } else { format!("{section}.{k}") };
                self.at(span, format!("unknown key {name}"));
            }
        }
    }

    fn section<'t>(&mut self, root: &'t Table, name: &str, required: bool) -> Option<&'t Table> {
        match root.get(name) {
            None if required => {
                self.at(None, format!("missing section [{name}]"));
                None
            }
            None => None,
            Some(item) => match item.as_table() {
                Some(t) => Some(t),
                None => {
                    self.at(item.span(), format!("[{name}] must be a table"));
                    None
                }
            },
        }
    }

    fn value<'t>(&mut self, t: &'t Table, section: &str, key: &str, required: bool) -> Option<&'t Value> {
        match t.get(key) {
            None => {
                if required {
                    self.at(t.span(), format!("missing key {section}.{key}"));
                }
                None
            }
            Some(item) => match item.as_value() {
                Some(v) => Some(v),
                None => {
                    self.at(item.span(), format!("{section}.{key} must be a value, not a table"));
                    None
                }
            },
        }
    }

    /// `None` means "reported"; a default of `None` makes the key required.
    fn float(&mut self, t: &Table, section: &str, key: &str, default: Option<f64>) -> Option<f64> {
        let v = match self.value(t, section, key, default.is_none()) {
            None => return default,
            Some(v) => v,
        };
        let x = match v {
            Value::Float(f) => *f.value(),
            Value::Integer(i) => *i.value() as f64,
            other => {
                self.at(other.span(), format!("{section}.{key} must be a number, found {}", other.type_name()));
                return None;
            }
        };
        if !x.is_finite() {
            self.at(v.span(), format!("{section}.{key} must be finite"));
            return None;
        }
        Some(x)
    }

    fn integer(&mut self, t: &Table, section: &str, key: &str, default: Option<i64>) -> Option<i64> {
        match self.value(t, section, key, default.is_none()) {
            None => default,
            Some(Value::Integer(i)) => Some(*i.value()),
            Some(other) => {
                self.at(other.span(), format!("{section}.{key} must be an integer, found {}", other.type_name()));
                None
            }
        }
    }

    fn boolean(&mut self, t: &Table, section: &str, key: &str, default: bool) -> bool {
        match self.value(t, section, key, false) {
            None => default,
            Some(Value::Boolean(b)) => *b.value(),
            Some(other) => {
                self.at(other.span(), format!("{section}.{key} must be true or false, found {}", other.type_name()));
                default
            }
        }
    }

    fn string(&mut self, t: &Table, section: &str, key: &str, default: Option<&str>) -> Option<String> {
        match self.value(t, section, key, default.is_none()) {
            None => default.map(str::to_owned),
            Some(Value::String(s)) => Some(s.value().clone()),
            Some(other) => {
                self.at(other.span(), format!("{section}.{key} must be a string, found {}", other.type_name()));
                None
            }
        }
    }

    fn choice<T: Copy>(&mut self, t: &Table, key: &str, default: T, options: &[(&str, T)]) -> Option<T> {
        let s = self.string(t, "solver", key, Some(""))?;
        if s.is_empty() && t.get(key).is_none() {
            return Some(default);
        }
        match options.iter().find(|(name, _)| *name == s) {
            Some((_, v)) => Some(*v),
            None => {
                let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
                self.at(t.get(key).and_then(Item::span), format!("solver.{key} must be one of {names:?}, got {s:?}"));
                None
            }
        }
    }

    fn solver(&mut self, t: &Table) -> Option<SolverConfig> {
        self.unknown_keys(
            t,
            "solver",
            &[
                "scheme",
                "delta",
                "end_time",
                "record_times",
                "cfl",
                "flux",
                "reconstruction",
                "picard_tol",
                "picard_max_iters",
            ],
        );
        let scheme = self.choice(t, "scheme", Scheme::Splitting, &[("splitting", Scheme::Splitting), ("duhamel", Scheme::Duhamel)]);
        let flux = self.choice(t, "flux", FluxScheme::Godunov, &[("godunov", FluxScheme::Godunov), ("rusanov", FluxScheme::Rusanov)]);
        let recon = self.choice(
            t,
            "reconstruction",
            Reconstruction::Muscl,
            &[("muscl", Reconstruction::Muscl), ("first_order", Reconstruction::FirstOrder)],
        );
        let delta = self.float(t, "solver", "delta", None);
        let end_time = self.float(t, "solver", "end_time", None);
        let cfl = self.float(t, "solver", "cfl", Some(0.5));
        let picard_tol = self.float(t, "solver", "picard_tol", Some(1e-12));
        let picard_max = self.integer(t, "solver", "picard_max_iters", Some(50));
        let record_times = self.record_times(t, end_time);

        let before = self.errors.len();
        let check = |cx: &mut Self, key: &str, ok: bool, what: &str| {
            if !ok {
                cx.at(t.get(key).and_then(Item::span), format!("solver.{key} {what}"));
            }
        };
        if let Some(d) = delta {
            check(self, "delta", d > 0.0, "must be positive");
        }
        if let Some(e) = end_time {
            check(self, "end_time", e > 0.0, "must be positive");
        }
        if let Some(c) = cfl {
            check(self, "cfl", c > 0.0 && c <= 1.0, "must lie in (0, 1]");
        }
        if let Some(p) = picard_tol {
            check(self, "picard_tol", p > 0.0, "must be positive");
        }
        if let Some(m) = picard_max {
            check(self, "picard_max_iters", m >= 1, "must be at least 1");
        }
        if self.errors.len() > before {
            return None;
        }
        let cfg = SolverConfig {
            scheme: scheme?,
            delta: delta?,
            cfl: cfl?,
            end_time: end_time?,
            record_times: record_times?,
            flux_scheme: flux?,
            reconstruction: recon?,
            picard_tol: picard_tol?,
            picard_max_iters: usize::try_from(picard_max?).ok()?,
        };
        match cfg.validate() {
            Ok(()) => Some(cfg),
            Err(e) => {
                self.at(t.span(), e.to_string());
                None
            }
        }
    }

    fn record_times(&mut self, t: &Table, end_time: Option<f64>) -> Option<Vec<f64>> {
        let Some(v) = self.value(t, "solver", "record_times", false) else {
            return Some(Vec::new());
        };
        let Some(arr) = v.as_array() else {
            self.at(v.span(), format!("solver.record_times must be an array, found {}", v.type_name()));
            return None;
        };
        let mut out = Vec::with_capacity(arr.len());
        let mut ok = true;
        let mut prev = 0.0;
        for item in arr.iter() {
            let x = match item {
                Value::Float(f) => *f.value(),
                Value::Integer(i) => *i.value() as f64,
                other => {
                    self.at(other.span(), format!("record time must be a number, found {}", other.type_name()));
                    ok = false;
                    continue;
                }
            };
            if !(x > prev) {
                self.at(item.span(), format!("record times must be positive and strictly increasing, got {x} after {prev}"));
                ok = false;
            }
            if let Some(end) = end_time {
                if x > end {
                    self.at(item.span(), format!("record time {x} lies beyond the horizon end_time = {end}"));
                    ok = false;
                }
            }
            prev = prev.max(x);
            out.push(x);
        }
        ok.then_some(out)
    }

    fn initial(&mut self, t: Option<&Table>, base: Option<&Path>) -> Option<InitialSpec> {
        let Some(t) = t else {
            return Some(InitialSpec::Box { half_width: 1.0 });
        };
        let kind = self.string(t, "initial", "kind", Some("box"))?;
        let (key, spec) = match kind.as_str() {
            "box" => ("half_width", self.float(t, "initial", "half_width", Some(1.0)).map(|a| InitialSpec::Box { half_width: a })),
            "bump" => ("width", self.float(t, "initial", "width", None).map(|w| InitialSpec::Bump { width: w })),
            "nwave" => ("t0", self.float(t, "initial", "t0", None).map(|t0| InitialSpec::NWaveAt { t0 })),
            "file" => (
                "path",
                self.string(t, "initial", "path", None).map(|p| {
                    let p = PathBuf::from(p);
                    let path = match base {
                        Some(b) if p.is_relative() => b.join(p),
                        _ => p,
                    };
                    InitialSpec::File { path }
                }),
            ),
            other => {
                self.at(
                    t.get("kind").and_then(Item::span),
                    format!("initial.kind must be one of \"box\", \"bump\", \"nwave\", \"file\", got {other:?}"),
                );
                return None;
            }
        };
        self.unknown_keys(t, "initial", &["kind", key]);
        let positive = match &spec {
            Some(InitialSpec::Box { half_width: v } | InitialSpec::Bump { width: v } | InitialSpec::NWaveAt { t0: v }) => *v > 0.0,
            _ => true,
        };
        if !positive {
            self.at(t.get(key).and_then(Item::span), format!("initial.{key} must be positive"));
            return None;
        }
        spec
    }

    fn formats(&mut self, t: &Table) -> Option<Vec<OutputFormat>> {
        let Some(v) = self.value(t, "output", "formats", false) else {
            return Some(vec![OutputFormat::Csv, OutputFormat::Json, OutputFormat::Snapshot]);
        };
        let Some(arr) = v.as_array() else {
            self.at(v.span(), "output.formats must be an array of strings".into());
            return None;
        };
        let mut out = Vec::new();
        let mut ok = true;
        for item in arr.iter() {
            match item.as_str().and_then(OutputFormat::parse) {
                Some(f) => {
                    if !out.contains(&f) {
                        out.push(f);
                    }
                }
                None => {
                    let found = item.as_str().map_or_else(|| item.type_name().to_string(), |s| format!("{s:?}"));
                    self.at(item.span(), format!("unknown output format {found}; expected \"csv\", \"json\" or \"snapshot\""));
                    ok = false;
                }
            }
        }
        out.sort();
        ok.then_some(out)
    }
}
