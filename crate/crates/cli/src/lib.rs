//! Front end shared by the `tailsheaf` binary and the acceptance suite.

use std::fmt;
use std::path::PathBuf;

use serde_json::{json, Map, Value};
use tailsheaf::classify::{classify_tail, rank_bound_check, singular_locus};
use tailsheaf::cohomology::{cohomology_table, default_window, Engine};
use tailsheaf::construct::{fixture, random_presentation, scramble};
use tailsheaf::presentation::HyperplaneChoice;
use tailsheaf::structure::{decompose, peel, recognize_tangent_power, split_level};
use tailsheaf::{SheafError, SheafPresentation};
use tailsheaf_core::Field;

pub const SCHEMA: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_PRECONDITION: i32 = 4;
pub const EXIT_INCONSISTENT: i32 = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Validate,
    Cohomology,
    Classify,
    Sing,
    Restrict,
    Peel,
    Decompose,
    SplitLevel,
    Construct,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Validate => "validate",
            Command::Cohomology => "cohomology",
            Command::Classify => "classify",
            Command::Sing => "sing",
            Command::Restrict => "restrict",
            Command::Peel => "peel",
            Command::Decompose => "decompose",
            Command::SplitLevel => "split-level",
            Command::Construct => "construct",
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub fixture: Option<String>,
    pub input: Option<PathBuf>,
    /// Coefficient field to read the input in; `None` keeps the field of the input.
    pub field: Option<Field>,
    pub t_min: Option<i64>,
    pub t_max: Option<i64>,
    pub engine: Engine,
    pub seed: u64,
    pub format: Format,
    pub threads: usize,
    /// `construct` only: scramble the result with `seed`.
    pub scramble: bool,
}

impl RunConfig {
    pub fn new(command: Command) -> RunConfig {
        RunConfig {
            command,
            fixture: None,
            input: None,
            field: None,
            t_min: None,
            t_max: None,
            engine: Engine::Dense,
            seed: 0,
            format: Format::Text,
            threads: 1,
            scramble: false,
        }
    }

    pub fn fixture(command: Command, name: &str) -> RunConfig {
        RunConfig { fixture: Some(name.to_string()), ..RunConfig::new(command) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Failure {
    status: i32,
    message: String,
}

impl From<SheafError> for Failure {
    fn from(e: SheafError) -> Failure {
        Failure { status: exit_code(&e), message: e.to_string() }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure { status: EXIT_INPUT, message: message.into() }
}

pub fn exit_code(e: &SheafError) -> i32 {
    use SheafError::*;
    match e {
        Algebra(_)
        | Syntax { .. }
        | Degree { .. }
        | Minimality { .. }
        | NotInjective { .. }
        | RankTooSmall(_)
        | Shape(_)
        | FieldReduction(_)
        | UnknownFixture(_) => EXIT_INPUT,
        EngineMismatch { .. } => EXIT_INCONSISTENT,
        DimensionTooSmall(_)
        | NotTail(_)
        | NotMinimal
        | NotLevel(_)
        | HyperplaneMeetsSing(_)
        | NoRationalPoint
        | IrrationalPoints
        | RowSpan { .. }
        | Unsolvable { .. }
        | ColumnRank { .. }
        | NotSplit { .. }
        | OutOfRange(_) => EXIT_PRECONDITION,
    }
}

/// `QQ`, `qq`, `rationals` or `fp:<p>`.
pub fn parse_field(s: &str) -> Result<Field, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "qq" | "q" | "rationals" => Ok(Field::Rationals),
        other => other.parse::<Field>().map_err(|e| e.to_string()),
    }
}

fn load_fixture(name: &str, seed: u64) -> Result<SheafPresentation, Failure> {
    if let Some(n) = name.strip_prefix("random_") {
        let n: usize = n.parse().map_err(|_| input_error(format!("bad random fixture `{name}`")))?;
        if !(2..=4).contains(&n) {
            return Err(input_error("random fixtures exist for n = 2, 3, 4"));
        }
        return Ok(random_presentation(seed, n));
    }
    fixture(name).map_err(|e| input_error(e.to_string()))
}

fn load(config: &RunConfig) -> Result<SheafPresentation, Failure> {
    let p = match (&config.fixture, &config.input) {
        (Some(_), Some(_)) => {
            return Err(Failure { status: EXIT_USAGE, message: "give either --fixture or --input".into() })
        }
        (None, None) => {
            return Err(Failure { status: EXIT_USAGE, message: "no presentation: use --fixture or --input".into() })
        }
        (Some(name), None) => load_fixture(name, config.seed)?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))?;
            if text.trim_start().starts_with('{') {
                SheafPresentation::from_json(&text)?
            } else {
                SheafPresentation::parse(&text)?
            }
        }
    };
    match config.field {
        Some(f) if f != p.field() => Ok(p.change_field(f)?),
        _ => Ok(p),
    }
}

/// Runs one command. Identical configurations give byte-identical reports.
pub fn run(config: &RunConfig) -> Report {
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(config.threads.max(1)).build() {
        Ok(pool) => pool,
        Err(e) => return failure(Failure { status: EXIT_USAGE, message: e.to_string() }),
    };
    match pool.install(|| execute(config)) {
        Ok((status, body, p)) => Report { status, stdout: render(config, &body, &p), stderr: String::new() },
        Err(f) => failure(f),
    }
}

fn failure(f: Failure) -> Report {
    Report { status: f.status, stdout: String::new(), stderr: format!("error: {}\n", f.message) }
}

enum Body {
    Fields(Value),
    Table(tailsheaf::cohomology::CohomologyTable),
}

fn execute(config: &RunConfig) -> Result<(i32, Body, SheafPresentation), Failure> {
    if config.format == Format::Csv && config.command != Command::Cohomology {
        return Err(Failure { status: EXIT_USAGE, message: "CSV output is only available for `cohomology`".into() });
    }
    let p = load(config)?;
    let mut status = EXIT_OK;
    let body = match config.command {
        Command::Validate => Body::Fields(json!({
            "valid": true,
            "n": p.n(),
            "field": p.field().to_string(),
            "s": p.s(),
            "q": p.q(),
            "rank": p.rank(),
            "sources": p.sources(),
            "targets": p.targets(),
        })),
        Command::Cohomology => {
            let (lo, hi) = default_window(&p);
            let t_min = config.t_min.unwrap_or(lo);
            let t_max = config.t_max.unwrap_or(hi);
            Body::Table(cohomology_table(&p, t_min, t_max, config.engine)?)
        }
        Command::Classify => {
            let c = classify_tail(&p)?;
            let bound = rank_bound_check(&p)?;
            let mut v = serde_json::to_value(&c).expect("serializable");
            v["rank_bound"] = serde_json::to_value(&bound).expect("serializable");
            Body::Fields(v)
        }
        Command::Sing => Body::Fields(singular_locus(&p)?.to_json()),
        Command::Restrict => {
            let r = p.restrict_hyperplane(&HyperplaneChoice::Seeded(config.seed))?;
            let tangent = match recognize_tangent_power(&r.presentation) {
                Ok(v) => v.to_json(),
                Err(e) => json!({ "m": null, "reason": e.to_string() }),
            };
            Body::Fields(json!({
                "restricted": r.presentation.to_text(),
                "certificate": r.certificate,
                "tangent_power": tangent,
            }))
        }
        Command::Peel => Body::Fields(peel(&p)?.to_json()),
        Command::Decompose => Body::Fields(decompose(&p)?.to_json()),
        Command::SplitLevel => {
            let split = split_level(&p)?;
            if !split.verified() {
                status = EXIT_INCONSISTENT;
            }
            Body::Fields(split.to_json())
        }
        Command::Construct => {
            let (q, record) = if config.scramble {
                let (q, r) = scramble(&p, config.seed)?;
                (q, Some(r.to_json()))
            } else {
                (p.clone(), None)
            };
            Body::Fields(json!({ "presentation": q.to_text(), "json": q.to_json(), "record": record }))
        }
    };
    Ok((status, body, p))
}

fn caveat(p: &SheafPresentation) -> Option<String> {
    match p.field() {
        Field::Prime(q) => {
            Some(format!("ranks over fp:{q} are probabilistic certificates only; rerun over QQ for exact results"))
        }
        Field::Rationals => None,
    }
}

fn render(config: &RunConfig, body: &Body, p: &SheafPresentation) -> String {
    let caveat = caveat(p);
    match config.format {
        Format::Json => {
            let mut root = Map::new();
            root.insert("schema".into(), json!(SCHEMA));
            root.insert("command".into(), json!(config.command.to_string()));
            if let Some(c) = &caveat {
                root.insert("caveat".into(), json!(c));
            }
            let payload = match body {
                Body::Fields(v) => v.clone(),
                Body::Table(t) => t.to_json(),
            };
            if config.command == Command::Construct {
                return format!("{}\n", serde_json::to_string_pretty(&payload["json"]).expect("serializable"));
            }
            root.insert("result".into(), payload);
            format!("{}\n", serde_json::to_string_pretty(&Value::Object(root)).expect("serializable"))
        }
        Format::Csv => {
            let Body::Table(t) = body else { unreachable!("checked before running") };
            let mut out = format!("# schema: {SCHEMA}\n# engine: {}\n", t.engine);
            if let Some(c) = &caveat {
                out.push_str(&format!("# caveat: {c}\n"));
            }
            out.push_str(&t.to_csv());
            out
        }
        Format::Text => {
            if config.command == Command::Construct {
                if let Body::Fields(v) = body {
                    return v["presentation"].as_str().unwrap_or_default().to_string();
                }
            }
            let mut out = format!("schema: {SCHEMA}\ncommand: {}\n", config.command);
            if let Some(c) = &caveat {
                out.push_str(&format!("caveat: {c}\n"));
            }
            match body {
                Body::Table(t) => out.push_str(&t.to_text()),
                Body::Fields(v) => render_fields(&mut out, v),
            }
            out
        }
    }
}

/// One `key: value` line per top-level field; multi-line strings become indented blocks.
fn render_fields(out: &mut String, v: &Value) {
    let Value::Object(map) = v else {
        out.push_str(&format!("{v}\n"));
        return;
    };
    for (k, val) in map {
        match val {
            Value::String(s) if s.contains('\n') => {
                out.push_str(&format!("{k}:\n"));
                for line in s.lines() {
                    out.push_str(&format!("  {line}\n"));
                }
            }
            Value::String(s) => out.push_str(&format!("{k}: {s}\n")),
            Value::Object(_) | Value::Array(_) => {
                let nested_text = match val {
                    Value::Object(m) => m.values().any(|x| matches!(x, Value::String(s) if s.contains('\n'))),
                    _ => false,
                };
                if nested_text {
                    out.push_str(&format!("{k}:\n"));
                    let mut inner = String::new();
                    render_fields(&mut inner, val);
                    for line in inner.lines() {
                        out.push_str(&format!("  {line}\n"));
                    }
                } else {
                    out.push_str(&format!("{k}: {val}\n"));
                }
            }
            _ => out.push_str(&format!("{k}: {val}\n")),
        }
    }
}
