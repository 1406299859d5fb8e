//! Command-line front end: fan documents, reports and exit codes.
//!
//! Exit codes: 0 success, 1 validation failure, 2 parse failure, 3 internal
//! consistency failure.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Read as _;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::charts::{
    boundary_divisors, is_kummer_etale_chart, local_chart, stabilizer, stabilizer_label,
    ChartError, LocalChart,
};
use crate::linalg::{FiniteAbelianGroup, IntVector, RationalVector};
use crate::monoids::irreducible_ray_correspondence;
use crate::monoids::{minimal_free_resolution, resolution_cokernel};
use crate::stackyfan::{
    cycle_ideal_classical, is_complete, validate_fan, ConeId, StackyFan, Violation,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

/// Environment variable bounding the degree of the invariant-ring check.
pub const DEGREE_BOUND_VAR: &str = "TORISTACK_DEGREE_BOUND";
pub const DEFAULT_DEGREE_BOUND: u64 = 6;

/// Input format of a stacky fan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanDocument {
    pub rank: usize,
    pub rays: Vec<Vec<i64>>,
    pub max_cones: Vec<Vec<usize>>,
    /// Ray index (as a decimal string) to level; missing rays have level 1.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub levels: BTreeMap<String, i64>,
    /// Residue characteristics to test tameness against; 0 for `Q`.
    #[serde(default = "default_characteristics")]
    pub characteristics: Vec<i64>,
}

fn default_characteristics() -> Vec<i64> {
    vec![0]
}

/// A problem with a document, in report form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Issue {
    pub kind: String,
    pub message: String,
    pub cones: Vec<ConeId>,
}

impl Issue {
    fn new(kind: &str, message: String) -> Self {
        Issue {
            kind: kind.to_string(),
            message,
            cones: Vec::new(),
        }
    }

    fn to_json(&self) -> Value {
        json!({ "kind": self.kind, "message": self.message, "cones": self.cones })
    }
}

impl From<&Violation> for Issue {
    fn from(v: &Violation) -> Self {
        Issue {
            kind: v.kind().to_string(),
            message: v.to_string(),
            cones: v.cones(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

pub fn parse_document(text: &str) -> Result<FanDocument, ParseError> {
    serde_json::from_str(text).map_err(|e| ParseError {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn emit_document(doc: &FanDocument) -> String {
    serde_json::to_string_pretty(doc).expect("documents serialize")
}

fn is_prime(p: i64) -> bool {
    p >= 2 && (2..).take_while(|k| k * k <= p).all(|k| p % k != 0)
}

/// A validated document.
#[derive(Clone, Debug)]
pub struct LoadedFan {
    pub stacky_fan: StackyFan,
    pub characteristics: Vec<u64>,
}

/// Checks a document and builds the stacky fan, or lists every problem.
pub fn build_stacky_fan(doc: &FanDocument) -> Result<LoadedFan, Vec<Issue>> {
    let mut issues = Vec::new();
    for &p in &doc.characteristics {
        if p != 0 && !is_prime(p) {
            issues.push(Issue::new(
                "InvalidCharacteristic",
                format!("characteristic {p} is neither 0 nor prime"),
            ));
        }
    }
    let mut levels = vec![1u64; doc.rays.len()];
    for (key, &n) in &doc.levels {
        match key.parse::<usize>() {
            Ok(i) if i < doc.rays.len() && key == &i.to_string() => {
                if n < 1 {
                    issues.push(Issue::new(
                        "InvalidLevel",
                        format!("level {n} on ray {i} is not positive"),
                    ));
                } else {
                    levels[i] = n as u64;
                }
            }
            _ => issues.push(Issue::new(
                "InvalidLevelKey",
                format!("level key {key:?} is not a ray index"),
            )),
        }
    }
    let rays: Vec<IntVector> = doc.rays.iter().map(|r| IntVector::from_i64s(r)).collect();
    let fan = match validate_fan(doc.rank, &rays, &doc.max_cones) {
        Ok(fan) => Some(fan),
        Err(e) => {
            issues.extend(e.violations.iter().map(Issue::from));
            None
        }
    };
    match fan {
        Some(fan) if issues.is_empty() => Ok(LoadedFan {
            stacky_fan: StackyFan::new(fan, levels).expect("levels checked"),
            characteristics: doc.characteristics.iter().map(|&p| p as u64).collect(),
        }),
        _ => Err(issues),
    }
}

// ---------------------------------------------------------------------------
// JSON helpers

const MAX_SAFE: i64 = (1 << 53) - 1;

/// Integers beyond the exactly representable range are written as strings.
pub fn int_json(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(x) if x.abs() <= MAX_SAFE => json!(x),
        _ => json!(n.to_string()),
    }
}

fn vector_json(v: &IntVector) -> Value {
    Value::Array(v.0.iter().map(int_json).collect())
}

fn vectors_json(vs: &[IntVector]) -> Value {
    Value::Array(vs.iter().map(vector_json).collect())
}

fn rational_json(q: &BigRational) -> Value {
    if q.denom().is_one() {
        int_json(q.numer())
    } else {
        json!(q.to_string())
    }
}

fn rational_vector_json(v: &RationalVector) -> Value {
    Value::Array(v.0.iter().map(rational_json).collect())
}

fn group_json(g: &FiniteAbelianGroup) -> Value {
    json!({
        "invariant_factors": g.invariant_factors.iter().map(int_json).collect::<Vec<_>>(),
        "order": g.order().map(|n| int_json(&n)).unwrap_or(Value::Null),
        "label": stabilizer_label(g),
    })
}

// ---------------------------------------------------------------------------
// reports

pub fn validation_report(issues: &[Issue]) -> Value {
    json!({
        "valid": issues.is_empty(),
        "errors": issues.iter().map(Issue::to_json).collect::<Vec<_>>(),
    })
}

fn chart_json(
    sf: &StackyFan,
    chart: &LocalChart,
    chars: &[u64],
    bound: u64,
) -> Result<Value, ChartError> {
    let fan = sf.fan();
    let generators = chart.resolution.realized_generators();
    let coordinates: Vec<Value> = chart
        .coordinates
        .iter()
        .zip(&generators)
        .enumerate()
        .map(|(i, (c, g))| {
            json!({
                "index": i,
                "fan_ray": c.fan_ray,
                "level": c.level,
                "dual_ray": vector_json(&c.dual_ray),
                "generator": rational_vector_json(g),
                "weight": vector_json(&c.weight),
            })
        })
        .collect();
    let mut faces: Vec<ConeId> = fan
        .cones()
        .iter()
        .filter(|t| t.iter().all(|i| chart.cone.contains(i)))
        .cloned()
        .collect();
    faces.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let cycle_ideals = faces
        .iter()
        .map(|tau| {
            Ok(json!({
                "face": tau,
                "coordinates": chart.cycle_ideal(tau)?,
                "classical_generators": vectors_json(&cycle_ideal_classical(fan, tau, &chart.cone)?),
            }))
        })
        .collect::<Result<Vec<_>, ChartError>>()?;
    let mismatches = chart.invariant_ring_mismatches(bound);
    Ok(json!({
        "cone": chart.cone,
        "rank": chart.rank(),
        "torus_rank": chart.torus_rank,
        "n_prime": vectors_json(&chart.splitting.n_prime),
        "n_double_prime": vectors_json(&chart.splitting.n_double_prime),
        "group": group_json(&chart.group),
        "kummer_etale": is_kummer_etale_chart(chart, chars),
        "weights_generate": chart.weights_generate(),
        "invariant_ring_check": {
            "degree_bound": bound,
            "passed": mismatches.is_empty(),
            "mismatches": mismatches,
        },
        "coordinates": coordinates,
        "coarse_generators": vectors_json(&chart.coarse_generators),
        "cycle_ideals": cycle_ideals,
    }))
}

/// The full report. Fails with [`ChartError::Internal`] when a chart does
/// not pass its consistency checks.
pub fn full_report(loaded: &LoadedFan, degree_bound: u64) -> Result<Value, ChartError> {
    let sf = &loaded.stacky_fan;
    let chars = &loaded.characteristics;
    let fan = sf.fan();
    let cones = fan
        .cones()
        .iter()
        .map(|c| {
            Ok(json!({
                "rays": c,
                "dim": c.len(),
                "multiplicity": int_json(&fan.multiplicity(c)?),
                "stacky_multiplicity": int_json(&sf.stacky_multiplicity(c)?),
                "stabilizer": group_json(&stabilizer(sf, c)?),
            }))
        })
        .collect::<Result<Vec<_>, ChartError>>()?;
    let mut charts = Vec::new();
    for c in fan.maximal_cones() {
        let chart = local_chart(sf, c)?;
        let value = chart_json(sf, &chart, chars, degree_bound)?;
        if value["invariant_ring_check"]["passed"] != json!(true)
            || value["weights_generate"] != json!(true)
        {
            return Err(ChartError::Internal(format!(
                "chart over cone {c:?} failed its invariant-ring check"
            )));
        }
        charts.push(value);
    }
    let divisors: Vec<Value> = boundary_divisors(sf)?
        .iter()
        .map(|d| {
            json!({
                "ray": d.ray,
                "level": d.level,
                "stabilizer": stabilizer_label(&d.stabilizer),
                "local_equations": d.local_equations.iter()
                    .map(|(cone, k)| json!({ "cone": cone, "coordinate": k }))
                    .collect::<Vec<_>>(),
            })
        })
        .collect();
    let tame = sf.is_tame(chars);
    Ok(json!({
        "ambient_rank": fan.ambient_rank(),
        "rays": vectors_json(fan.rays()),
        "levels": sf.levels(),
        "free_net": vectors_json(&sf.free_net_points()),
        "characteristics": chars,
        "maximal_cones": fan.maximal_cones(),
        "smooth": fan.is_smooth(),
        "complete": is_complete(fan),
        "tame": tame,
        "deligne_mumford": tame,
        "coincides_with_toric_variety": fan.is_smooth() && sf.levels().iter().all(|&n| n == 1),
        "cones": cones,
        "charts": charts,
        "boundary_divisors": divisors,
    }))
}

/// Minimal free resolution of the monoid of a cone, in `M'` coordinates.
pub fn mfr_report(loaded: &LoadedFan, cone: &[usize]) -> Result<Value, ChartError> {
    let sf = &loaded.stacky_fan;
    let chart = local_chart(sf, cone)?;
    let res = minimal_free_resolution(&chart.monoid)?;
    let owner = |ray: &IntVector| {
        chart
            .coordinates
            .iter()
            .find(|c| &c.dual_ray == ray)
            .map(|c| c.fan_ray)
    };
    let correspondence: Vec<Value> = irreducible_ray_correspondence(&res)
        .iter()
        .map(|rc| {
            json!({
                "index": rc.index,
                "generator": rational_vector_json(&rc.generator),
                "ray": vector_json(&rc.ray),
                "fan_ray": owner(&rc.ray),
                "prime_normal": vector_json(&rc.prime.normal),
                "complement_face": vectors_json(&rc.prime.complement_face),
            })
        })
        .collect();
    Ok(json!({
        "cone": cone,
        "rank": chart.rank(),
        "n_prime": vectors_json(&chart.splitting.n_prime),
        "hilbert_basis": vectors_json(chart.monoid.hilbert_basis()),
        "rays": vectors_json(res.rays()),
        "denominators": res.denominators().iter().map(int_json).collect::<Vec<_>>(),
        "generators": res.generators().iter().map(rational_vector_json).collect::<Vec<_>>(),
        "cokernel": group_json(&resolution_cokernel(&res)?),
        "correspondence": correspondence,
        "levels": chart.resolution.levels(),
        "leveled_generators": chart.resolution.realized_generators().iter().map(rational_vector_json).collect::<Vec<_>>(),
        "leveled_cokernel": group_json(&chart.group),
    }))
}

pub fn stabilizer_report(loaded: &LoadedFan, cone: &[usize]) -> Result<Value, ChartError> {
    let sf = &loaded.stacky_fan;
    let group = stabilizer(sf, cone)?;
    Ok(json!({
        "cone": cone,
        "stacky_multiplicity": int_json(&sf.stacky_multiplicity(cone)?),
        "stabilizer": group_json(&group),
    }))
}

pub fn complete_report(loaded: &LoadedFan) -> Value {
    json!({ "complete": is_complete(loaded.stacky_fan.fan()) })
}

/// Indented plain-text rendering of a report.
pub fn render_text(value: &Value) -> String {
    fn scalar(v: &Value) -> Option<String> {
        match v {
            Value::Null => Some("-".into()),
            Value::Bool(b) => Some(b.to_string()),
            Value::Number(n) => Some(n.to_string()),
            Value::String(s) => Some(s.clone()),
            Value::Array(xs) if xs.iter().all(|x| !x.is_object()) => {
                let inner: Vec<String> = xs.iter().map(|x| scalar(x).unwrap_or_default()).collect();
                Some(format!("[{}]", inner.join(", ")))
            }
            _ => None,
        }
    }
    fn walk(v: &Value, indent: usize, out: &mut String) {
        let pad = "  ".repeat(indent);
        match v {
            Value::Object(map) => {
                for (k, x) in map {
                    match scalar(x) {
                        Some(s) => writeln!(out, "{pad}{k}: {s}").unwrap(),
                        None => {
                            writeln!(out, "{pad}{k}:").unwrap();
                            walk(x, indent + 1, out);
                        }
                    }
                }
            }
            Value::Array(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    match scalar(x) {
                        Some(s) => writeln!(out, "{pad}- {s}").unwrap(),
                        None => {
                            writeln!(out, "{pad}[{i}]").unwrap();
                            walk(x, indent + 1, out);
                        }
                    }
                }
            }
            other => writeln!(out, "{pad}{}", scalar(other).unwrap_or_default()).unwrap(),
        }
    }
    let mut out = String::new();
    walk(value, 0, &mut out);
    out
}

// ---------------------------------------------------------------------------
// argument handling

#[derive(Parser, Debug)]
#[command(
    name = "toristack",
    version,
    about = "Local charts and invariants of toric stacks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the fan axioms and list every violation.
    Validate { file: String },
    /// Full report: cones, stabilizers, charts, divisors.
    Report { file: String },
    /// Minimal free resolution of the monoid of one cone.
    Mfr {
        file: String,
        /// Comma-separated ray indices of the cone.
        #[arg(long, value_parser = parse_cone)]
        cone: ConeId,
    },
    /// Stabilizer group of one cone.
    Stabilizer {
        file: String,
        #[arg(long, value_parser = parse_cone)]
        cone: ConeId,
    },
    /// Whether the fan is complete.
    Complete { file: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

fn parse_cone(s: &str) -> Result<ConeId, String> {
    let mut cone: ConeId = if s.trim().is_empty() {
        Vec::new()
    } else {
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|e| format!("bad ray index {t:?}: {e}"))
            })
            .collect::<Result<_, _>>()?
    };
    cone.sort_unstable();
    cone.dedup();
    Ok(cone)
}

/// What the process should print and return.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

fn read_input(path: &str) -> std::io::Result<String> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path)
    }
}

fn degree_bound() -> Result<u64, String> {
    match std::env::var(DEGREE_BOUND_VAR) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| format!("{DEGREE_BOUND_VAR} must be a non-negative integer, got {s:?}")),
        Err(_) => Ok(DEFAULT_DEGREE_BOUND),
    }
}

fn render(value: &Value, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(value).expect("values serialize") + "\n",
        Format::Text => render_text(value),
    }
}

fn failure(code: i32, message: String) -> Outcome {
    Outcome {
        stdout: String::new(),
        stderr: message + "\n",
        code,
    }
}

fn chart_failure(e: ChartError) -> Outcome {
    match e {
        ChartError::Internal(_) => failure(EXIT_INTERNAL, format!("error: {e}")),
        other => failure(EXIT_VALIDATION, format!("error: {other}")),
    }
}

/// Runs the program on the given arguments (including the program name).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome {
                    stdout: text,
                    stderr: String::new(),
                    code,
                }
            } else {
                failure(code, text.trim_end().to_string())
            };
        }
    };
    let file = match &cli.command {
        Command::Validate { file }
        | Command::Report { file }
        | Command::Mfr { file, .. }
        | Command::Stabilizer { file, .. }
        | Command::Complete { file } => file.clone(),
    };
    let text = match read_input(&file) {
        Ok(t) => t,
        Err(e) => return failure(EXIT_PARSE, format!("error: cannot read {file}: {e}")),
    };
    let doc = match parse_document(&text) {
        Ok(d) => d,
        Err(e) => {
            return failure(
                EXIT_PARSE,
                format!("error: {file}:{}:{}: {}", e.line, e.column, e.message),
            )
        }
    };
    let loaded = build_stacky_fan(&doc);
    if let Command::Validate { .. } = cli.command {
        let issues = loaded.as_ref().err().cloned().unwrap_or_default();
        let code = if issues.is_empty() {
            EXIT_OK
        } else {
            EXIT_VALIDATION
        };
        return Outcome {
            stdout: render(&validation_report(&issues), cli.format),
            stderr: String::new(),
            code,
        };
    }
    let loaded = match loaded {
        Ok(l) => l,
        Err(issues) => {
            return Outcome {
                stdout: render(&validation_report(&issues), cli.format),
                stderr: "error: invalid fan\n".into(),
                code: EXIT_VALIDATION,
            }
        }
    };
    let value = match &cli.command {
        Command::Validate { .. } => unreachable!(),
        Command::Report { .. } => match degree_bound() {
            Ok(b) => full_report(&loaded, b),
            Err(msg) => return failure(EXIT_PARSE, format!("error: {msg}")),
        },
        Command::Mfr { cone, .. } => mfr_report(&loaded, cone),
        Command::Stabilizer { cone, .. } => stabilizer_report(&loaded, cone),
        Command::Complete { .. } => Ok(complete_report(&loaded)),
    };
    match value {
        Ok(v) => Outcome {
            stdout: render(&v, cli.format),
            stderr: String::new(),
            code: EXIT_OK,
        },
        Err(e) => chart_failure(e),
    }
}
