//! Command-line driver. Each subcommand is a [`Command`] trait object held in
//! a [`CommandRegistry`] and looked up by name; global flags select the output
//! format, sink and thread count.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use clap::{value_parser, Arg, ArgMatches};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::classical::{level_limit_scan, weight_limit_scan, ClassicalParams, MethodRegistry};
use crate::error::{Error, Result};
use crate::fund_domain::{
    det_alpha_polynomial, gottschling_set, in_fundamental_domain, min_det_over_box, search_y0,
    top_degree,
};
use crate::hecke::{cusp_dimension, estimate_weights, petersson_target, spectral_scan};
use crate::modgroup::random_symplectic;
use crate::numerics::{IntMatrix2, QuadratureGrid};
use crate::quadform::{aut_group, generators, reduce, HalfIntegralForm, UnimodularMatrix};
use crate::report::{fmt_number, ScanReport};
use crate::siegel::{siegel_weight_scan, SiegelPoint, SiegelParams};
use crate::verify::{run_all, CRITERIA};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Rows of heterogeneous cells.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    fn cell(v: &Value) -> String {
        match v {
            Value::Number(n) => n.as_f64().map(fmt_number).unwrap_or_else(|| n.to_string()),
            Value::String(s) => s.clone(),
            other => other.to_string(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let write = || -> std::result::Result<Vec<u8>, Box<dyn std::error::Error>> {
            w.write_record(&self.header)?;
            for row in &self.rows {
                w.write_record(row.iter().map(Self::cell))?;
            }
            Ok(w.into_inner()?)
        };
        String::from_utf8(write().unwrap_or_default()).unwrap_or_default()
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| Value::Object(self.header.iter().cloned().zip(row.iter().cloned()).collect()))
                .collect(),
        )
    }
}

pub enum Output {
    Report(ScanReport),
    Table(Table),
    /// Structured record; always written as JSON.
    Document(Value),
}

pub struct Outcome {
    pub output: Output,
    /// False makes the process exit with [`EXIT_FAILURE`] after writing.
    pub ok: bool,
}

impl From<Output> for Outcome {
    fn from(output: Output) -> Self {
        Outcome { output, ok: true }
    }
}

pub trait Command: Send + Sync {
    fn name(&self) -> &'static str;
    fn about(&self) -> &'static str;
    fn args(&self) -> Vec<Arg>;
    fn execute(&self, m: &ArgMatches) -> Result<Outcome>;
}

pub struct CommandRegistry {
    commands: BTreeMap<&'static str, Box<dyn Command>>,
}

impl CommandRegistry {
    pub fn empty() -> Self {
        CommandRegistry { commands: BTreeMap::new() }
    }

    pub fn register(&mut self, c: Box<dyn Command>) {
        self.commands.insert(c.name(), c);
    }

    pub fn get(&self, name: &str) -> Option<&dyn Command> {
        self.commands.get(name).map(|c| c.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.commands.keys().copied().collect()
    }

    pub fn clap_command(&self) -> clap::Command {
        let mut root = clap::Command::new("poincare")
            .about("Fourier coefficients of Poincare series and their orthogonality limits")
            .subcommand_required(true)
            .arg(
                Arg::new("format")
                    .long("format")
                    .global(true)
                    .value_parser(["csv", "json"])
                    .default_value("csv")
                    .help("Output format for tables; records are always JSON"),
            )
            .arg(Arg::new("output").long("output").global(true).value_parser(value_parser!(PathBuf)).help("Write to this file instead of stdout"))
            .arg(
                Arg::new("threads")
                    .long("threads")
                    .global(true)
                    .value_parser(value_parser!(usize))
                    .help("Worker threads (default: available cores)"),
            );
        for c in self.commands.values() {
            root = root.subcommand(clap::Command::new(c.name()).about(c.about()).args(c.args()));
        }
        root
    }
}

impl Default for CommandRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(ClassicalCoeff));
        r.register(Box::new(WeightScan));
        r.register(Box::new(LevelScan));
        r.register(Box::new(SiegelCoeff));
        r.register(Box::new(SiegelScan));
        r.register(Box::new(ReduceForm));
        r.register(Box::new(Aut));
        r.register(Box::new(FdMembership));
        r.register(Box::new(Gottschling));
        r.register(Box::new(Y0Search));
        r.register(Box::new(AlphaPolyCheck));
        r.register(Box::new(HeckeEigen));
        r.register(Box::new(Weights));
        r.register(Box::new(WeylScan));
        r.register(Box::new(SelfTest));
        r
    }
}

/// Result of one invocation before anything is written.
pub struct Rendered {
    pub text: String,
    pub code: i32,
    pub output_path: Option<PathBuf>,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidInput(_) => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

/// Parses `argv` (including the program name) and runs the subcommand.
/// Errors are rendered as text with the matching exit code.
pub fn render(argv: &[String]) -> Rendered {
    let registry = CommandRegistry::default();
    let matches = match registry.clap_command().try_get_matches_from(argv) {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            return Rendered { text: e.render().to_string(), code, output_path: None };
        }
    };
    let format = match matches.get_one::<String>("format").map(String::as_str) {
        Some("json") => Format::Json,
        _ => Format::Csv,
    };
    let output_path = matches.get_one::<PathBuf>("output").cloned();
    let threads = matches.get_one::<usize>("threads").copied().unwrap_or(0);
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let command = registry.get(name).expect("registered subcommand");
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => return Rendered { text: format!("error: thread pool: {e}\n"), code: EXIT_FAILURE, output_path: None },
    };
    match pool.install(|| command.execute(sub)) {
        Ok(outcome) => Rendered {
            text: encode(&outcome.output, format),
            code: if outcome.ok { EXIT_OK } else { EXIT_FAILURE },
            output_path,
        },
        Err(e) => Rendered { text: format!("error: {e}\n"), code: exit_code(&e), output_path: None },
    }
}

pub fn encode(output: &Output, format: Format) -> String {
    let pretty = |v: &Value| serde_json::to_string_pretty(v).unwrap_or_default() + "\n";
    match (output, format) {
        (Output::Report(r), Format::Csv) => r.to_csv(),
        (Output::Report(r), Format::Json) => pretty(&r.to_json()),
        (Output::Table(t), Format::Csv) => t.to_csv(),
        (Output::Table(t), Format::Json) => pretty(&t.to_json()),
        (Output::Document(v), _) => pretty(v),
    }
}

/// Entry point for the binary: renders, then writes to the sink.
pub fn run(argv: Vec<String>) -> i32 {
    let r = render(&argv);
    if r.code != EXIT_OK && r.text.starts_with("error") {
        eprint!("{}", r.text);
        return r.code;
    }
    match &r.output_path {
        Some(path) => {
            if let Err(source) = fs::write(path, &r.text) {
                eprintln!("{}", Error::Io { path: path.clone(), source });
                return EXIT_FAILURE;
            }
        }
        None if r.code == EXIT_USAGE => eprint!("{}", r.text),
        None => print!("{}", r.text),
    }
    r.code
}

/// Drops the `seconds` column of CSV output; other text is returned unchanged.
pub fn strip_seconds(text: &str) -> String {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(text.as_bytes());
    let records: Vec<csv::StringRecord> = match reader.records().collect() {
        Ok(r) => r,
        Err(_) => return text.to_string(),
    };
    let Some(col) = records.first().and_then(|h| h.iter().position(|c| c == "seconds")) else {
        return text.to_string();
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    for rec in &records {
        let kept: Vec<&str> = rec.iter().enumerate().filter(|(i, _)| *i != col).map(|(_, c)| c).collect();
        if w.write_record(kept).is_err() {
            return text.to_string();
        }
    }
    w.into_inner().ok().and_then(|b| String::from_utf8(b).ok()).unwrap_or_else(|| text.to_string())
}

/// One cheap invocation per subcommand, used by the determinism check.
pub fn determinism_cases() -> Vec<Vec<String>> {
    [
        "classical-coeff --m 1 --n 2 --k 12",
        "weight-scan --m 1 --n 2 --k 12:60:4",
        "level-scan --m 1 --n 1 --k 12 --q 1:40:3",
        "siegel-coeff --s 1,0,1 --t 1,0,1 --k 20 --bound 1 --points 4",
        "siegel-scan --s 1,0,1 --t 1,0,2 --k 20:28:4 --bound 1 --points 4",
        "reduce-form --form 5,4,1",
        "aut --form 1,1,1",
        "fd-membership --x 0.1,0.2,-0.3 --y 1.2,0.3,1.5",
        "gottschling --y0 1.05 --points 16",
        "y0-search --tol 0.05 --points 8",
        "alpha-poly-check --samples 20",
        "hecke-eigen --k 24 --p-max 13",
        "weights --k 12:24:2",
        "weyl-scan --k 12:30:2 --exponents 2:1",
        "selftest --only 5,8",
    ]
    .iter()
    .map(|s| s.split_whitespace().map(String::from).collect())
    .collect()
}

// ---- argument parsing helpers ----

/// `a`, `a:b` or `a:b:step`, inclusive.
pub fn parse_range<T>(s: &str) -> std::result::Result<Vec<T>, String>
where
    T: FromStr + Copy + PartialOrd + std::ops::Add<Output = T> + From<u8>,
{
    let parts: Vec<&str> = s.split(':').collect();
    let num = |p: &str| p.trim().parse::<T>().map_err(|_| format!("bad number '{p}' in range '{s}'"));
    let (a, b, step) = match parts.as_slice() {
        [a] => (num(a)?, num(a)?, T::from(1)),
        [a, b] => (num(a)?, num(b)?, T::from(1)),
        [a, b, c] => (num(a)?, num(b)?, num(c)?),
        _ => return Err(format!("range '{s}' is not of the form a:b:step")),
    };
    if step <= T::from(0) {
        return Err(format!("range step must be positive in '{s}'"));
    }
    if b < a {
        return Err(format!("empty range '{s}'"));
    }
    let mut out = Vec::new();
    let mut x = a;
    while x <= b {
        out.push(x);
        x = x + step;
    }
    Ok(out)
}

fn parse_triple(s: &str) -> std::result::Result<[f64; 3], String> {
    let v: Vec<f64> = s.split(',').map(|p| p.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|e| format!("'{s}': {e}"))?;
    v.try_into().map_err(|_| format!("'{s}' must have three comma-separated entries"))
}

fn parse_exponents(s: &str) -> std::result::Result<Vec<(u64, u32)>, String> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|item| {
            let (p, n) = item.split_once(':').ok_or_else(|| format!("exponent '{item}' is not p:n"))?;
            Ok((p.trim().parse().map_err(|_| format!("bad prime '{p}'"))?, n.trim().parse().map_err(|_| format!("bad exponent '{n}'"))?))
        })
        .collect()
}

fn parse_ids(s: &str) -> std::result::Result<Vec<u8>, String> {
    s.split(',').map(|p| p.trim().parse::<u8>().map_err(|_| format!("bad criterion id '{p}'"))).collect()
}

fn arg_u64(name: &'static str, default: Option<&'static str>, help: &'static str) -> Arg {
    let a = Arg::new(name).long(name).value_parser(value_parser!(u64)).help(help);
    match default {
        Some(d) => a.default_value(d),
        None => a.required(true),
    }
}

fn arg_u32(name: &'static str, default: Option<&'static str>, help: &'static str) -> Arg {
    let a = Arg::new(name).long(name).value_parser(value_parser!(u32)).help(help);
    match default {
        Some(d) => a.default_value(d),
        None => a.required(true),
    }
}

fn arg_f64(name: &'static str, default: &'static str, help: &'static str) -> Arg {
    Arg::new(name).long(name).value_parser(value_parser!(f64)).default_value(default).help(help)
}

fn arg_usize(name: &'static str, default: &'static str, help: &'static str) -> Arg {
    Arg::new(name).long(name).value_parser(value_parser!(usize)).default_value(default).help(help)
}

fn arg_form(name: &'static str, default: Option<&'static str>, help: &'static str) -> Arg {
    let a = Arg::new(name).long(name).value_parser(HalfIntegralForm::from_str).help(help);
    match default {
        Some(d) => a.default_value(d),
        None => a.required(true),
    }
}

fn arg_range_u32(name: &'static str, help: &'static str) -> Arg {
    Arg::new(name).long(name).required(true).value_parser(parse_range::<u32>).help(help)
}

fn get<T: Clone + Send + Sync + 'static>(m: &ArgMatches, name: &str) -> T {
    m.get_one::<T>(name).cloned().expect("clap enforces required and defaulted arguments")
}

fn method_arg() -> Arg {
    Arg::new("method")
        .long("method")
        .value_parser(MethodRegistry::default().names())
        .default_value("kloosterman")
        .help("Coefficient method")
}

fn classical_base(m: &ArgMatches, k: u32, q: u64) -> ClassicalParams {
    ClassicalParams::new(get(m, "m"), get(m, "n"), k).with_level(q)
}

fn form_json(s: &HalfIntegralForm) -> Value {
    json!([s.s11, s.s12x2, s.s22])
}

fn matrix_json(u: &IntMatrix2) -> Value {
    json!([[u.get(0, 0), u.get(0, 1)], [u.get(1, 0), u.get(1, 1)]])
}

fn matrix_cell(u: &IntMatrix2) -> String {
    format!("{} {};{} {}", u.get(0, 0), u.get(0, 1), u.get(1, 0), u.get(1, 1))
}

// ---- subcommands ----

struct ClassicalCoeff;

impl Command for ClassicalCoeff {
    fn name(&self) -> &'static str {
        "classical-coeff"
    }
    fn about(&self) -> &'static str {
        "Fourier coefficient p_{m,k}(n) of the level-q Poincare series"
    }
    fn args(&self) -> Vec<Arg> {
        vec![
            arg_u64("m", None, "Index m of the series"),
            arg_u64("n", None, "Coefficient index n"),
            arg_u32("k", None, "Even weight"),
            arg_u64("q", Some("1"), "Level"),
            method_arg(),
            arg_f64("tol", "1e-8", "Target accuracy"),
        ]
    }
    fn execute(&self, m: &ArgMatches) -> Result<Outcome> {
        let method = MethodRegistry::default();
        let method = method.get(&get::<String>(m, "method")).expect("validated by clap");
        let p = classical_base(m, get(m, "k"), get(m, "q"));
        let start = Instant::now();
        let est = method.coefficient(&p, get(m, "tol"))?;
        let mut r = ScanReport::new(["m", "n", "k", "q"]);
        r.push(vec![p.m as f64, p.n as f64, p.k as f64, p.q as f64], est.value, p.delta(), est.error, start.elapsed().as_secs_f64());
        Ok(Output::Report(r).into())
    }
}

struct WeightScan;

impl Command for WeightScan {
    fn name(&self) -> &'static str {
        "weight-scan"
    }
    fn about(&self) -> &'static str {
        "p_{m,k}(n) over a range of weights, target delta(m,n)"
    }
    fn args(&self) -> Vec<Arg> {
        vec![
            arg_u64("m", None, "Index m of the series"),
            arg_u64("n", None, "Coefficient index n"),
            arg_range_u32("k", "Weights as a:b:step"),
            arg_u64("q", Some("1"), "Level"),
            method_arg(),
            arg_f64("tol", "1e-8", "Target accuracy"),
        ]
    }
    fn execute(&self, m: &ArgMatches) -> Result<Outcome> {
        let methods = MethodRegistry::default();
        let method = methods.get(&get::<String>(m, "method")).expect("validated by clap");
        let ks: Vec<u32> = get(m, "k");
        let base = classical_base(m, ks[0], get(m, "q"));
        Ok(Output::Report(weight_limit_scan(method, &base, &ks, get(m, "tol"))?).into())
    }
}

struct LevelScan;

impl Command for LevelScan {
    fn name(&self) -> &'static str {
        "level-scan"
    }
    fn about(&self) -> &'static str {
        "p_{m,k}(n) over a range of levels q, target delta(m,n)"
    }
    fn args(&self) -> Vec<Arg> {
        vec![
            arg_u64("m", None, "Index m of the series"),
            arg_u64("n", None, "Coefficient index n"),
            arg_u32("k", Some("12"), "Even weight"),
            Arg::new("q").long("q").required(true).value_parser(parse_range::<u64>).help("Levels as a:b:step"),
            method_arg(),
            arg_f64("tol", "1e-8", "Target accuracy"),
        ]
    }
    fn execute(&self, m: &ArgMatches) -> Result<Outcome> {
        let methods = MethodRegistry::default();
        let method = methods.get(&get::<String>(m, "method")).expect("validated by clap");
        let qs: Vec<u64> = get(m, "q");
        let base = classical_base(m, get(m, "k"), 1);
        Ok(Output::Report(level_limit_scan(method, &base, &qs, get(m, "tol"))?).into())
    }
}

fn siegel_args(k_range: bool) -> Vec<Arg> {
    vec![
        arg_form("s", Some("1,0,1"), "Index form s as s11,2s12,s22"),
        arg_form("t", Some("1,0,1"), "Coefficient form t as t11,2t12,t22"),
        if k_range { arg_range_u32("k", "Weights as a:b:step") } else { arg_u32("k", None, "Even weight") },
        arg_f64("y0", "1.05", "Height of the integration box"),
        arg_u32("bound", Some("2"), "Coset entry bound B"),
        arg_usize("points", "16", "Quadrature points per axis"),
    ]
}

fn siegel_scan(m: &ArgMatches, ks: &[u32]) -> Result<Outcome> {
    let (s, t): (HalfIntegralForm, HalfIntegralForm) = (get(m, "s"), get(m, "t"));
    let (y0, bound, points) = (get(m, "y0"), get(m, "bound"), get(m, "points"));
    for &k in ks {
        SiegelParams { s, t, k, y0, bound, points }.validate()?;
    }
    Ok(Output::Report(siegel_weight_scan(&s, &t, ks, y0, bound, points)?).into())
}

struct SiegelCoeff;

impl Command for SiegelCoeff {
    fn name(&self) -> &'static str {
        "siegel-coeff"
    }
    fn about(&self) -> &'static str {
        "Genus-2 coefficient p_{s,k}(t) with error estimate, target the orbit count"
    }
    fn args(&self) -> Vec<Arg> {
        siegel_args(false)
    }
    fn execute(&self, m: &ArgMatches) -> Result<Outcome> {
        siegel_scan(m, &[get(m, "k")])
    }
}

struct SiegelScan;

impl Command for SiegelScan {
    fn name(&self) -> &'static str {
        "siegel-scan"
    }
    fn about(&self) -> &'static str {
        "Genus-2 coefficients over a range of weights"
    }
    fn args(&self) -> Vec<Arg> {
        siegel_args(true)
    }
    fn execute(&self, m: &ArgMatches) -> Result<Outcome> {
        siegel_scan(m, &get::<Vec<u32>>(m, "k"))
    }
}

struct ReduceForm;

impl Command for ReduceForm {
    fn name(&self) -> &'static str {
        "reduce-form"
    }
    fn about(&self) -> &'static str {
        "Gauss reduction of a binary form"
    }
    fn args(&self) -> Vec<Arg> {
        vec![arg_form("form", None, "Form as s11,2s12,s22")]
    }
    fn execute(&self, m: &ArgMatches) -> Result<Outcome> {
        let s: HalfIntegralForm = get(m, "form");
        let (r, u) = reduce(&s);
        Ok(Output::Document(json!({"form": form_json(&s), "reduced": form_json(&r), "u": matrix_json(&u.matrix())})).into())
    }
}

struct Aut;

impl Command for Aut {
    fn name(&self) -> &'static str {
        "aut"
    }
    fn about(&self) -> &'static str {
        "Automorphism group of a binary form in GL(2,Z)"
    }
    fn args(&self) -> Vec<Arg> {
        vec![arg_form("form", None, "Form as s11,2s12,s22")]
    }
    fn execute(&self, m: &ArgMatches) -> Result<Outcome> {
        let s: HalfIntegralForm = get(m, "form");
        let group = aut_group(&s);
        let gens: Vec<Value> = generators(&group).iter().map(|g: &UnimodularMatrix| matrix_json(&g.matrix())).collect();
        Ok(Output::Document(json!({"form": form_json(&s), "order": group.len(), "generators": gens})).into())
    }
}

struct FdMembership;

impl Command for FdMembership {
    fn name(&self) -> &'static str {
        "fd-membership"
    }
    fn about(&self) -> &'static str {
        "Test whether z = x + iy lies in the genus-2 fundamental domain"
    }
    fn args(&self) -> Vec<Arg> {
        vec![
            Arg::new("x").long("x").required(true).allow_hyphen_values(true).value_parser(parse_triple).help("Re z as x11,x12,x22"),
            Arg::new("y").long("y").required(true).allow_hyphen_values(true).value_parser(parse_triple).help("Im z as y11,y12,y22"),
        ]
    }
    fn execute(&self, m: &ArgMatches) -> Result<Outcome> {
        let (x, y): ([f64; 3], [f64; 3]) = (get(m, "x"), get(m, "y"));
        let z = SiegelPoint::new([[x[0], x[1]], [x[1], x[2]]], [[y[0], y[1]], [y[1], y[2]]])?;
        Ok(Output::Document(serde_json::to_value(in_fundamental_domain(&z))?).into())
    }
}

struct Gottschling;

impl Command for Gottschling {
    fn name(&self) -> &'static str {
        "gottschling"
    }
    fn about(&self) -> &'static str {
        "List the Gottschling pairs, optionally with min |det(cz+d)| over the box at --y0"
    }
    fn args(&self) -> Vec<Arg> {
        vec![
            Arg::new("y0").long("y0").value_parser(value_parser!(f64)).help("Height of the box to minimize over"),
            arg_usize("points", "64", "Grid points per axis"),
        ]
    }
    fn execute(&self, m: &ArgMatches) -> Result<Outcome> {
        let y0 = m.get_one::<f64>("y0").copied();
        let grid = QuadratureGrid::new(3, get(m, "points"))?;
        let mut header = vec!["index", "rank_c", "c", "d"];
        if y0.is_some() {
            header.extend(["min", "lower_bound"]);
        }
        let mut t = Table::new(&header);
        for (i, p) in gottschling_set().iter().enumerate() {
            let mut row = vec![json!(i), json!(p.rank_c), json!(matrix_cell(&p.c)), json!(matrix_cell(&p.d))];
            if let Some(y0) = y0 {
                let b = min_det_over_box(&p.c, &p.d, y0, &grid)?;
                row.extend([json!(b.min), json!(b.lower_bound)]);
            }
            t.rows.push(row);
        }
        Ok(Output::Table(t).into())
    }
}

struct Y0Search;

impl Command for Y0Search {
    fn name(&self) -> &'static str {
        "y0-search"
    }
    fn about(&self) -> &'static str {
        "Bisection for the smallest certified y0 in (1, 2]"
    }
    fn args(&self) -> Vec<Arg> {
        vec![arg_f64("tol", "1e-3", "Bracket width (at least 1e-3)"), arg_usize("points", "64", "Grid points per axis")]
    }
    fn execute(&self, m: &ArgMatches) -> Result<Outcome> {
        let grid = QuadratureGrid::new(3, get(m, "points"))?;
        Ok(Output::Document(serde_json::to_value(search_y0(get(m, "tol"), &grid)?)?).into())
    }
}

struct AlphaPolyCheck;

impl Command for AlphaPolyCheck {
    fn name(&self) -> &'static str {
        "alpha-poly-check"
    }
    fn about(&self) -> &'static str {
        "|det(c(x+ia)+d)|^2 as a polynomial in a^2 for random symplectic bottom rows"
    }
    fn args(&self) -> Vec<Arg> {
        vec![
            arg_usize("samples", "100", "Number of random bottom rows"),
            arg_u64("seed", Some("7"), "RNG seed"),
            arg_usize("word-length", "6", "Generators per random symplectic word"),
        ]
    }
    fn execute(&self, m: &ArgMatches) -> Result<Outcome> {
        let mut rng = ChaCha8Rng::seed_from_u64(get(m, "seed"));
        let len: usize = get(m, "word-length");
        let mut t = Table::new(&["sample", "rank_c", "top_degree", "p0", "p1", "p2", "c", "d"]);
        for i in 0..get::<usize>(m, "samples") {
            let g = random_symplectic(&mut rng, len);
            let x11: f64 = rng.gen_range(-0.5..=0.5);
            let x12: f64 = rng.gen_range(-0.5..=0.5);
            let x22: f64 = rng.gen_range(-0.5..=0.5);
            let p = det_alpha_polynomial(&g.c, &g.d, [[x11, x12], [x12, x22]]);
            t.rows.push(vec![
                json!(i),
                json!(g.c.rank()),
                json!(top_degree(&p)),
                json!(p[0]),
                json!(p[1]),
                json!(p[2]),
                json!(matrix_cell(&g.c)),
                json!(matrix_cell(&g.d)),
            ]);
        }
        Ok(Output::Table(t).into())
    }
}

struct HeckeEigen;

impl Command for HeckeEigen {
    fn name(&self) -> &'static str {
        "hecke-eigen"
    }
    fn about(&self) -> &'static str {
        "Normalized Hecke eigenvalues and Petersson weights at level one"
    }
    fn args(&self) -> Vec<Arg> {
        vec![arg_range_u32("k", "Weights as a:b:step"), arg_u64("p-max", Some("50"), "Largest prime")]
    }
    fn execute(&self, m: &ArgMatches) -> Result<Outcome> {
        let ks: Vec<u32> = get(m, "k");
        let data = spectral_scan(&ks, 4, get(m, "p-max"))?;
        let mut t = Table::new(&["k", "form", "p", "lambda", "omega"]);
        for sd in &data {
            for (i, (f, w)) in sd.forms.iter().zip(&sd.weights).enumerate() {
                for (p, l) in &f.lambda {
                    t.rows.push(vec![json!(sd.k), json!(i), json!(p), json!(l), json!(w)]);
                }
            }
        }
        Ok(Output::Table(t).into())
    }
}

struct Weights;

impl Command for Weights {
    fn name(&self) -> &'static str {
        "weights"
    }
    fn about(&self) -> &'static str {
        "Sum of fitted Petersson weights per weight k, target 1"
    }
    fn args(&self) -> Vec<Arg> {
        vec![arg_range_u32("k", "Weights as a:b:step"), arg_usize("m-max", "0", "Equations m = 1..M (0: twice the dimension)")]
    }
    fn execute(&self, m: &ArgMatches) -> Result<Outcome> {
        let ks: Vec<u32> = get(m, "k");
        let m_max: usize = get(m, "m-max");
        let start = Instant::now();
        let data = spectral_scan(&ks, if m_max == 0 { 4 } else { m_max }, 7)?;
        let secs = start.elapsed().as_secs_f64() / ks.len() as f64;
        let mut r = ScanReport::new(["k", "dim"]);
        for sd in data.iter().filter(|sd| !sd.forms.is_empty()) {
            r.push(vec![sd.k as f64, cusp_dimension(sd.k) as f64], sd.weight_sum(), 1.0, sd.residual, secs);
        }
        Ok(Output::Report(r).into())
    }
}

struct WeylScan;

impl Command for WeylScan {
    fn name(&self) -> &'static str {
        "weyl-scan"
    }
    fn about(&self) -> &'static str {
        "Weyl sums sum_f w_f prod U_n(p)(lambda_f(p)) against the Kloosterman-side Delta(m,1)"
    }
    fn args(&self) -> Vec<Arg> {
        vec![
            arg_range_u32("k", "Weights as a:b:step"),
            Arg::new("exponents").long("exponents").default_value("").value_parser(parse_exponents).help("Exponents as p:n,p:n"),
        ]
    }
    fn execute(&self, m: &ArgMatches) -> Result<Outcome> {
        let ks: Vec<u32> = get(m, "k");
        let exps: Vec<(u64, u32)> = get(m, "exponents");
        let p_max = exps.iter().map(|e| e.0).max().unwrap_or(2).max(2);
        let mm: u64 = exps.iter().map(|&(p, n)| p.pow(n)).product();
        let start = Instant::now();
        let data = spectral_scan(&ks, (mm as usize).max(4), p_max)?;
        let secs = start.elapsed().as_secs_f64() / ks.len() as f64;
        let mut r = ScanReport::new(["k", "m"]);
        for sd in data.iter().filter(|sd| !sd.forms.is_empty()) {
            let _ = estimate_weights;
            r.push(vec![sd.k as f64, mm as f64], sd.weyl_sum(&exps)?, petersson_target(mm, sd.k)?, sd.residual, secs);
        }
        Ok(Output::Report(r).into())
    }
}

struct SelfTest;

impl Command for SelfTest {
    fn name(&self) -> &'static str {
        "selftest"
    }
    fn about(&self) -> &'static str {
        "Run the acceptance checks; exits nonzero if any fails"
    }
    fn args(&self) -> Vec<Arg> {
        vec![Arg::new("only").long("only").value_parser(parse_ids).help("Comma-separated criterion ids (default: all)")]
    }
    fn execute(&self, m: &ArgMatches) -> Result<Outcome> {
        let ids = m.get_one::<Vec<u8>>("only").cloned().unwrap_or_else(|| CRITERIA.iter().map(|c| c.0).collect());
        let results = run_all(&ids);
        let mut t = Table::new(&["id", "criterion", "passed", "detail", "seconds"]);
        for r in &results {
            t.rows.push(vec![json!(r.id), json!(r.name), json!(r.passed), json!(r.detail), json!(r.seconds)]);
        }
        Ok(Outcome { output: Output::Table(t), ok: results.iter().all(|r| r.passed) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn argv(s: &str) -> Vec<String> {
        std::iter::once("poincare").chain(s.split_whitespace()).map(String::from).collect()
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range::<u32>("12:20:4").unwrap(), vec![12, 16, 20]);
        assert_eq!(parse_range::<u32>("7").unwrap(), vec![7]);
        assert_eq!(parse_range::<u64>("1:3").unwrap(), vec![1, 2, 3]);
        assert!(parse_range::<u32>("5:1").is_err());
        assert!(parse_range::<u32>("1:5:0").is_err());
        assert!(parse_range::<u32>("a:b").is_err());
    }

    #[test]
    fn exponents() {
        assert_eq!(parse_exponents("2:1,3:2").unwrap(), vec![(2, 1), (3, 2)]);
        assert!(parse_exponents("2").is_err());
    }

    #[test]
    fn weight_scan_header() {
        let r = render(&argv("weight-scan --m 1 --n 2 --k 12:60:4"));
        assert_eq!(r.code, EXIT_OK);
        assert_eq!(r.text.lines().next().unwrap(), "m,n,q,k,value,target,abs_err,err_estimate,seconds");
        assert_eq!(r.text.lines().count(), 1 + 13);
    }

    #[test]
    fn aut_document() {
        let r = render(&argv("aut --form 1,1,1"));
        let v: Value = serde_json::from_str(&r.text).unwrap();
        assert_eq!(v["order"], 12);
        assert!(!v["generators"].as_array().unwrap().is_empty());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(render(&argv("aut --form 1,1")).code, EXIT_USAGE);
        assert_eq!(render(&argv("aut --form 1,1,1 --bogus")).code, EXIT_USAGE);
        assert_eq!(render(&argv("nonsense")).code, EXIT_USAGE);
        assert_eq!(render(&argv("classical-coeff --m 1 --n 1 --k 13")).code, EXIT_USAGE);
        assert_eq!(render(&argv("siegel-coeff --k 20 --bound 9")).code, EXIT_FAILURE);
        assert_eq!(render(&argv("classical-coeff --m 1 --n 1 --k 12 --method quadrature")).code, EXIT_OK);
    }

    #[test]
    fn json_mirrors_csv_columns() {
        let r = render(&argv("--format json weights --k 12:16:2"));
        let v: Value = serde_json::from_str(&r.text).unwrap();
        let row = &v.as_array().unwrap()[0];
        for key in ["k", "dim", "value", "target", "abs_err", "err_estimate", "seconds"] {
            assert!(row.get(key).is_some(), "{key}");
        }
    }

    #[test]
    fn seconds_column_is_stripped() {
        let text = "a,seconds,b\n1,0.5,\"x,y\"\n";
        assert_eq!(strip_seconds(text), "a,b\n1,\"x,y\"\n");
        assert_eq!(strip_seconds("{\"a\": 1}\n"), "{\"a\": 1}\n");
    }

    #[test]
    fn every_command_has_a_determinism_case() {
        let names: Vec<String> = determinism_cases().iter().map(|c| c[0].clone()).collect();
        for n in CommandRegistry::default().names() {
            assert!(names.iter().any(|x| x == n), "{n}");
        }
        assert_eq!(CommandRegistry::default().names().len(), 15);
    }
}
