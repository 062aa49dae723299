use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context as _};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use semifeq::codec::scalar_from_json;
use semifeq::feq::classify::{to_complex_vec, Classifier};
use semifeq::feq::dalembert::Descriptor;
use semifeq::feq::{gen_e1_family, sine_identities, nullspace_basis, residual_e1, residual_e2};
use semifeq::ideal::chi_structure;
use semifeq::morphism::{enumerate_involutive_automorphisms, enumerate_mu, enumerate_multiplicative};
use semifeq::oracle::{all_contexts, contexts_of, sweep_contexts};
use semifeq::scalar::parse_rational;
use semifeq::window::{self, WindowPayload};
use semifeq::{
    is_compatible, Canonical, CFun, Context, ContextFile, FiniteSemigroup, OracleConfig, Rational, Scalar,
};

mod output;

use output::{Envelope, RunManifest};

#[derive(Parser, Debug)]
#[command(name = "semifeq", version, about = "Functional equations on finite and windowed semigroups")]
struct Cli {
    /// Residual / classification tolerance.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, global = true, default_value_t = 0x5eed)]
    seed: u64,
    /// Also write the report here (atomically).
    #[arg(long, global = true)]
    json_out: Option<PathBuf>,
    /// Do not print the report on stdout.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Automorphisms, characters, μ candidates, ideal structures and compatibility.
    Analyze { semigroup: PathBuf },
    /// Build a solution from a family descriptor.
    Generate { context: PathBuf, descriptor: PathBuf },
    /// Residual and classification of a solution file.
    Verify { context: PathBuf, solution: PathBuf },
    /// Exact basis of the homogeneous solutions.
    SolveNull { context: PathBuf },
    /// Numeric completeness sweep over all small contexts, or over one carrier.
    Oracle {
        #[arg(long, default_value_t = 3)]
        order: usize,
        #[arg(long, default_value_t = 200)]
        attempts: usize,
        /// Required for order 4.
        #[arg(long)]
        allow_slow: bool,
        /// Sweep every σ and μ of this semigroup file instead.
        #[arg(long)]
        semigroup: Option<PathBuf>,
        /// Run on this single context file instead.
        #[arg(long, conflicts_with = "semigroup")]
        context: Option<PathBuf>,
    },
    /// All semigroups of a given order.
    Enumerate {
        #[arg(long)]
        order: usize,
        #[arg(long, value_enum, default_value_t = UpTo::Isomorphism)]
        up_to: UpTo,
        #[arg(long)]
        counts_only: bool,
    },
    /// Check a closed-form family on a window of an infinite carrier.
    Window {
        #[arg(long, value_enum)]
        builtin: BuiltinName,
        #[arg(long, default_value_t = 3)]
        radius: i64,
        /// λ/π for the line carrier.
        #[arg(long, default_value = "2/3")]
        lambda: String,
        #[arg(long, value_enum)]
        family: WindowFamily,
        #[arg(long, default_value = "0")]
        c: String,
        #[arg(long, default_value = "1")]
        alpha: String,
        #[arg(long, default_value = "0")]
        beta: String,
        /// Constant θ.
        #[arg(long, default_value = "0")]
        theta: String,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum UpTo {
    Raw,
    Isomorphism,
    Anti,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum BuiltinName {
    Lattice2d,
    Line,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
enum WindowFamily {
    F3,
    G3,
    G4,
}

/// Non-success outcomes, each with its exit code.
#[derive(Debug)]
enum Failure {
    Residual(String),
    BadInput(anyhow::Error),
    Descriptor(String),
    RedFlag(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Residual(_) => 1,
            Failure::BadInput(_) => 2,
            Failure::Descriptor(_) => 3,
            Failure::RedFlag(_) => 4,
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::BadInput(e)
    }
}

/// A report plus an optional failure that still gets the report written.
struct Outcome {
    result: Value,
    inputs: Vec<PathBuf>,
    failure: Option<Failure>,
}

impl Outcome {
    fn ok(result: Value, inputs: Vec<PathBuf>) -> Self {
        Outcome { result, inputs, failure: None }
    }
}

fn read_json(path: &Path) -> anyhow::Result<Value> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Accepts a bare document or a report envelope around it.
fn unwrap_result(v: Value) -> Value {
    match v {
        Value::Object(mut m) if m.contains_key("result") && m.contains_key("manifest") => m.remove("result").unwrap(),
        other => other,
    }
}

fn load_semigroup(path: &Path) -> anyhow::Result<FiniteSemigroup> {
    let v = read_json(path)?;
    let s = FiniteSemigroup::from_file(serde_json::from_value(v).context("semigroup file")?)?;
    Ok(s)
}

fn load_context(path: &Path) -> anyhow::Result<Context> {
    let v = unwrap_result(read_json(path)?);
    let file: ContextFile = serde_json::from_value(v).context("context file")?;
    Ok(Context::from_file(file)?)
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn parse_scalar(s: &str) -> anyhow::Result<Scalar> {
    match serde_json::from_str::<Value>(s) {
        Ok(v @ (Value::Object(_) | Value::Number(_))) => scalar_from_json(&v).map_err(|e| anyhow!(e)),
        _ => parse_rational(s).map(Scalar::from_rational).ok_or_else(|| anyhow!("bad scalar {s:?}")),
    }
}

/// A value in a solution file: any scalar encoding, or a float pair `[re, im]`.
fn parse_value(v: &Value) -> anyhow::Result<Scalar> {
    if let Some([re, im]) = v.as_array().map(Vec::as_slice) {
        let (re, im) = (re.as_f64(), im.as_f64());
        let (Some(re), Some(im)) = (re, im) else { bail!("bad complex pair {v}") };
        let lift = |x: f64| Rational::from_float(x).ok_or_else(|| anyhow!("non-finite value {x}"));
        return Ok(Scalar::gaussian(lift(re)?, lift(im)?));
    }
    scalar_from_json(v).map_err(|e| anyhow!(e))
}

fn parse_function(v: Option<&Value>, name: &str, n: usize) -> anyhow::Result<CFun> {
    let arr = v.and_then(Value::as_array).ok_or_else(|| anyhow!("solution needs an array {name:?}"))?;
    if arr.len() != n {
        bail!("{name} has {} values, the carrier has {n} elements", arr.len());
    }
    arr.iter().map(parse_value).collect()
}

fn cmd_analyze(path: &Path) -> Result<Outcome, Failure> {
    let s = load_semigroup(path)?;
    let autos = enumerate_involutive_automorphisms(&s);
    let chars = enumerate_multiplicative(&s);
    let mu: Vec<Value> = autos
        .iter()
        .map(|sigma| json!({"sigma": sigma, "mu": enumerate_mu(&s, sigma).iter().map(|m| m.scalars()).collect::<Vec<_>>()}))
        .collect();
    let structures: Vec<Value> = chars
        .iter()
        .filter_map(|c| chi_structure(&s, c).ok())
        .map(|st| json!({"chi": st.chi.scalars(), "structure": st}))
        .collect();
    let result = json!({
        "semigroup": s.to_file(),
        "commutative": s.is_commutative(),
        "involutive_automorphisms": autos,
        "characters": chars.iter().map(|c| c.scalars()).collect::<Vec<_>>(),
        "mu_candidates": mu,
        "chi_structures": structures,
        "compatibility": is_compatible(&s),
    });
    Ok(Outcome::ok(result, vec![path.to_path_buf()]))
}

fn cmd_generate(ctx_path: &Path, desc_path: &Path) -> Result<Outcome, Failure> {
    let ctx = load_context(ctx_path)?;
    let d: Descriptor = serde_json::from_value(read_json(desc_path)?).context("descriptor file")?;
    let inputs = vec![ctx_path.to_path_buf(), desc_path.to_path_buf()];
    let result = match &d {
        Descriptor::E2(e) => {
            let (k, l) = e.generate(&ctx).map_err(|e| Failure::Descriptor(e.to_string()))?;
            let r = residual_e2(&ctx, &k, &l);
            json!({"equation": "sine", "descriptor": d, "values": {"k": k, "l": l}, "certificate": r})
        }
        Descriptor::E1(e) => {
            let (f, g, h) = gen_e1_family(&ctx, e).map_err(|e| Failure::Descriptor(e.to_string()))?;
            let r = residual_e1(&ctx, &f, &g, &h);
            json!({"equation": "dalembert", "descriptor": d, "values": {"f": f, "g": g, "h": h}, "certificate": r})
        }
    };
    Ok(Outcome::ok(result, inputs))
}

fn cmd_verify(ctx_path: &Path, sol_path: &Path, tol: f64) -> Result<Outcome, Failure> {
    let ctx = load_context(ctx_path)?;
    let sol = unwrap_result(read_json(sol_path)?);
    let values = sol.get("values").unwrap_or(&sol);
    let n = ctx.order();
    let cl = Classifier::new(&ctx);
    let sine = values.get("k").is_some();
    let (result, residual) = if sine {
        let k = parse_function(values.get("k"), "k", n)?;
        let l = parse_function(values.get("l"), "l", n)?;
        let r = residual_e2(&ctx, &k, &l);
        let class = cl.classify_e2(&to_complex_vec(&k), &to_complex_vec(&l), tol);
        let identities = sine_identities(&ctx, &k, &l);
        let v = json!({"equation": "sine", "residual": r, "within_tol": r.within(tol), "classification": class,
                       "family": class.tag(), "identities": identities});
        (v, r)
    } else {
        let f = parse_function(values.get("f"), "f", n)?;
        let g = parse_function(values.get("g"), "g", n)?;
        let h = parse_function(values.get("h"), "h", n)?;
        let r = residual_e1(&ctx, &f, &g, &h);
        let class = cl.classify_e1(&to_complex_vec(&f), &to_complex_vec(&g), &to_complex_vec(&h), tol);
        let v = json!({"equation": "dalembert", "residual": r, "within_tol": r.within(tol), "classification": class,
                       "family": class.tag()});
        (v, r)
    };
    let failure = (!residual.within(tol)).then(|| {
        let (x, y) = residual.worst.unwrap_or_default();
        Failure::Residual(format!("residual {:.3e} exceeds {tol:e} at pair ({x}, {y})", residual.max_abs))
    });
    Ok(Outcome { result, inputs: vec![ctx_path.to_path_buf(), sol_path.to_path_buf()], failure })
}

fn cmd_solve_null(path: &Path) -> Result<Outcome, Failure> {
    let ctx = load_context(path)?;
    let basis = nullspace_basis(&ctx);
    Ok(Outcome::ok(json!({"dimension": basis.len(), "basis": basis}), vec![path.to_path_buf()]))
}

fn cmd_oracle(
    cli: &Cli,
    order: usize,
    attempts: usize,
    allow_slow: bool,
    semigroup: Option<&Path>,
    context: Option<&Path>,
) -> Result<Outcome, Failure> {
    let cfg = OracleConfig { attempts, seed: cli.seed, tol_classify: cli.tol, ..Default::default() };
    cfg.validate().map_err(|e| Failure::BadInput(e.into()))?;
    let (report, inputs) = if let Some(path) = context {
        let ctx = load_context(path)?;
        let n = ctx.order();
        (sweep_contexts(&[ctx], n, &cfg), vec![path.to_path_buf()])
    } else if let Some(path) = semigroup {
        let s = load_semigroup(path)?;
        let n = s.order();
        (sweep_contexts(&contexts_of(&s), n, &cfg), vec![path.to_path_buf()])
    } else {
        if order > 4 {
            return Err(Failure::BadInput(anyhow!("order {order} is not supported (at most 4)")));
        }
        if order == 4 && !allow_slow {
            return Err(Failure::BadInput(anyhow!("order 4 needs --allow-slow")));
        }
        (sweep_contexts(&all_contexts(order), order, &cfg), Vec::new())
    };
    let failure = report.red_flag().then(|| {
        Failure::RedFlag(format!(
            "{} unclassified solution(s) on compatible carriers, {} generator residual failure(s)",
            report.totals.unclassified_on_compatible, report.totals.generated_nonzero_residuals
        ))
    });
    let summary: Vec<Value> = report
        .contexts
        .iter()
        .map(|c| {
            json!({
                "id": c.id,
                "order": c.order,
                "compatible": c.compatible,
                "sine": c.sine.solutions.iter().map(|s| (s.class.tag(), s.hits)).collect::<Vec<_>>(),
                "dalembert": c.dalembert.solutions.iter().map(|s| (s.class.tag(), s.hits)).collect::<Vec<_>>(),
                "unclassified_sine": c.unclassified_e2(),
                "unclassified_dalembert": c.unclassified_e1(),
            })
        })
        .collect();
    let mut result = to_json(&report);
    result["summary"] = Value::Array(summary);
    Ok(Outcome { result, inputs, failure })
}

fn cmd_enumerate(order: usize, up_to: UpTo, counts_only: bool) -> Result<Outcome, Failure> {
    let canonical = match up_to {
        UpTo::Raw => Canonical::Raw,
        UpTo::Isomorphism => Canonical::Isomorphism,
        UpTo::Anti => Canonical::IsomorphismOrAnti,
    };
    let all = semifeq::semigroup::enumerate_small(order, canonical).map_err(|e| Failure::BadInput(e.into()))?;
    let mut result = json!({"order": order, "up_to": up_to, "count": all.len()});
    if !counts_only {
        result["semigroups"] = to_json(&all.iter().map(FiniteSemigroup::to_file).collect::<Vec<_>>());
    }
    Ok(Outcome::ok(result, Vec::new()))
}

#[allow(clippy::too_many_arguments)]
fn cmd_window(
    builtin: BuiltinName,
    radius: i64,
    lambda: &str,
    family: WindowFamily,
    c: &str,
    alpha: &str,
    beta: &str,
    theta: &str,
    tol: f64,
) -> Result<Outcome, Failure> {
    let carrier = match builtin {
        BuiltinName::Lattice2d => window::builtin_lattice2d(radius),
        BuiltinName::Line => {
            let l = parse_rational(lambda).ok_or_else(|| anyhow!("bad λ/π {lambda:?}"))?;
            window::builtin_line_with_inversion(radius, l)
        }
    }
    .map_err(|e| Failure::BadInput(e.into()))?;
    let (c, alpha, beta, theta) = (parse_scalar(c)?, parse_scalar(alpha)?, parse_scalar(beta)?, parse_scalar(theta)?);
    let payload: WindowPayload = match family {
        WindowFamily::F3 => window::window_sine_additive(&carrier, c),
        WindowFamily::G3 => window::window_dalembert_character(&carrier, theta, alpha, beta),
        WindowFamily::G4 => window::window_dalembert_additive(&carrier, theta, alpha, beta),
    }
    .map_err(|e| Failure::Descriptor(e.to_string()))?;
    let report = window::verify_window(&carrier, &payload).map_err(|e| Failure::BadInput(e.into()))?;
    let failure = (!report.residual.within(tol)).then(|| {
        Failure::Residual(format!("window residual {:.3e} at {:?}", report.residual.max_abs, report.residual.worst))
    });
    if !report.audit.all_hold() {
        return Err(Failure::BadInput(anyhow!("declared structure failed its audit: {:?}", report.audit)));
    }
    Ok(Outcome { result: to_json(&report), inputs: Vec::new(), failure })
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    if !(cli.tol > 0.0) {
        return Err(Failure::BadInput(anyhow!("--tol must be positive")));
    }
    match &cli.cmd {
        Cmd::Analyze { semigroup } => cmd_analyze(semigroup),
        Cmd::Generate { context, descriptor } => cmd_generate(context, descriptor),
        Cmd::Verify { context, solution } => cmd_verify(context, solution, cli.tol),
        Cmd::SolveNull { context } => cmd_solve_null(context),
        Cmd::Oracle { order, attempts, allow_slow, semigroup, context } => {
            cmd_oracle(cli, *order, *attempts, *allow_slow, semigroup.as_deref(), context.as_deref())
        }
        Cmd::Enumerate { order, up_to, counts_only } => cmd_enumerate(*order, *up_to, *counts_only),
        Cmd::Window { builtin, radius, lambda, family, c, alpha, beta, theta } => {
            cmd_window(*builtin, *radius, lambda, *family, c, alpha, beta, theta, cli.tol)
        }
    }
}

fn command_name(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::Analyze { .. } => "analyze",
        Cmd::Generate { .. } => "generate",
        Cmd::Verify { .. } => "verify",
        Cmd::SolveNull { .. } => "solve-null",
        Cmd::Oracle { .. } => "oracle",
        Cmd::Enumerate { .. } => "enumerate",
        Cmd::Window { .. } => "window",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let outcome = run(&cli);
    let (outcome, failure) = match outcome {
        Ok(mut o) => {
            let f = o.failure.take();
            (Some(o), f)
        }
        Err(f) => (None, Some(f)),
    };
    if let Some(o) = outcome {
        let manifest = RunManifest::new(command_name(&cli.cmd), &o.inputs, format!("{:?}", cli.cmd), cli.tol, cli.seed, started);
        let env = Envelope::new(manifest, o.result);
        let text = serde_json::to_string_pretty(&env).expect("report serializes");
        if let Some(path) = &cli.json_out {
            if let Err(e) = output::write_atomic(path, &text) {
                eprintln!("error: writing {}: {e:#}", path.display());
                return ExitCode::from(2);
            }
        }
        if !cli.quiet {
            use std::io::Write;
            // a closed pipe downstream is not an error worth reporting
            let _ = writeln!(std::io::stdout(), "{text}");
        }
    }
    match failure {
        None => ExitCode::SUCCESS,
        Some(f) => {
            match &f {
                Failure::BadInput(e) => eprintln!("error: {e:#}"),
                Failure::Residual(m) | Failure::Descriptor(m) | Failure::RedFlag(m) => eprintln!("error: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
