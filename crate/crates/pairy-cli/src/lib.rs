//! Command line driver for `pairy`: kernel and determinant evaluation,
//! symbolic derivations, PDE residuals and the acceptance suite.

pub mod acceptance;
pub mod output;

use std::io::Write;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use pairy::fredholm::{gap_logdet, Endpoints};
use pairy::hirota::{
    derive_gap_pde, hirota_equation, schur_of_symbols, target, target_for, GapEquation, GapPde, HirotaKind,
    printed_logtau_row, printed_operator_row, TableRow,
};
use pairy::kernel::{airy_preset, evaluate, pearcey_preset, KernelSpec, Representation};
use pairy::pderes::{pearcey_airy_limit, residual_with, FredholmSource, StepSizes, WindowOrientation};
use pairy::potential::{solve_theta, theta_name, topological_tau_log};
use pairy::special::{Phi, PhiSpec};
use pairy::{contours::Sign, potential::NumericPotential};

use output::to_json;

#[derive(Parser, Debug, Serialize)]
#[command(name = "pairy", about = "Gap probabilities of p-Airy kernels and their PDEs", version)]
pub struct Cli {
    /// Worker threads for determinant grids; defaults to available parallelism.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Evaluate K^(p)(lambda, lambda') in one representation.
    EvalKernel(EvalKernelArgs),
    /// Q(E) = log det(I - K chi_E) for a preset.
    Fredholm(FredholmArgs),
    /// Finite-difference residual of a gap PDE on computed Q.
    PdeResidual(ResidualArgs),
    /// Derive a gap PDE and compare it with the stored form.
    Derive(DeriveArgs),
    /// Hirota operators and their check on Schur tau functions.
    Hirota(HirotaArgs),
    /// The coefficients theta_i(t) of the deformed potential.
    Theta(PArgs),
    /// log tau_0^(p) on the locus t_{>=p} = 0.
    TauTopological(PArgs),
    /// The special function Phi at a complex point.
    Phi(PhiArgs),
    /// Pearcey gap probabilities far out on the cusp against Airy.
    Asymptotics(AsymptoticsArgs),
    /// Run the acceptance suite.
    Accept(AcceptArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Airy,
    Pearcey,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Rep {
    Double,
    Iiks,
}

#[derive(Args, Debug, Serialize)]
pub struct PresetArgs {
    #[arg(long, value_enum, default_value = "airy")]
    pub preset: Preset,
    /// Number of outliers (Airy) or inliers (Pearcey).
    #[arg(long, default_value_t = 0)]
    pub n: u32,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub w: f64,
    /// Pearcey time.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub tau: f64,
}

impl PresetArgs {
    fn spec(&self) -> KernelSpec {
        match self.preset {
            Preset::Airy => airy_preset(self.n, self.w),
            Preset::Pearcey => pearcey_preset(self.tau, self.n, self.w),
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct EvalKernelArgs {
    #[arg(long)]
    pub p: usize,
    #[arg(long, default_value_t = 0)]
    pub n: u32,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub w: f64,
    /// Times t_1..t_{p-1}, comma separated; missing ones are 0.
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    pub times: String,
    #[arg(long, allow_negative_numbers = true)]
    pub t1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub t2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub t3: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub t4: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda_prime: f64,
    #[arg(long, value_enum, default_value = "iiks")]
    pub rep: Rep,
    /// Evaluate at (-lambda, -lambda') with w -> -w.
    #[arg(long)]
    pub reflect: bool,
    /// Gauss-Legendre nodes per contour panel.
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Shift of every contour apex along the real axis.
    #[arg(long, allow_negative_numbers = true)]
    pub offset: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
pub struct FredholmArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub preset: PresetArgs,
    /// Endpoints a1 < a2 < ..., an even number.
    #[arg(long = "E", allow_hyphen_values = true)]
    #[serde(rename = "E")]
    pub e: String,
    /// Gauss-Legendre nodes per interval.
    #[arg(long, default_value_t = 48)]
    pub m: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct ResidualArgs {
    /// Stored target name, or an equation (Y3, Y4, combo, Y5-combo, Boussinesq) to derive.
    #[arg(long)]
    pub equation: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub preset: PresetArgs,
    #[arg(long = "E", allow_hyphen_values = true)]
    #[serde(rename = "E")]
    pub e: String,
    #[arg(long, default_value_t = 48)]
    pub m: usize,
    #[arg(long, default_value_t = 0.05)]
    pub h_shift: f64,
    #[arg(long, default_value_t = 0.02)]
    pub h_dilation: f64,
    #[arg(long, default_value_t = 0.05)]
    pub h_time: f64,
    #[arg(long, default_value_t = 0.05)]
    pub h_w: f64,
    /// Write the coarse Q grid as CSV.
    #[arg(long)]
    pub dump_grid: Option<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct DeriveArgs {
    #[arg(long)]
    pub equation: String,
    #[arg(long)]
    pub p: usize,
    #[arg(long, default_value_t = 0)]
    pub n: usize,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct HirotaArgs {
    /// Check Y3, Y4, Y5 on s_lambda o s_lambda.
    #[arg(long)]
    pub check_schur: bool,
    #[arg(long, default_value_t = 5)]
    pub max_weight: usize,
    /// Compare the operator and log-tau tables.
    #[arg(long)]
    pub tables: bool,
    /// Print the level-l operator of each kind.
    #[arg(long)]
    pub level: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
pub struct PArgs {
    #[arg(long)]
    pub p: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct PhiArgs {
    #[arg(long)]
    pub p: usize,
    /// + or -.
    #[arg(long, default_value = "+", allow_hyphen_values = true)]
    pub sign: String,
    #[arg(long, default_value_t = 0)]
    pub n: u32,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub w: f64,
    /// Complex argument "re" or "re,im".
    #[arg(long, allow_hyphen_values = true)]
    pub u: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Mirrored,
    Literal,
}

#[derive(Args, Debug, Serialize)]
pub struct AsymptoticsArgs {
    #[arg(long, default_value = "4,8,16")]
    pub tau: String,
    #[arg(long = "E", default_value = "0,1", allow_hyphen_values = true)]
    #[serde(rename = "E")]
    pub e: String,
    #[arg(long, default_value_t = 48)]
    pub m: usize,
    #[arg(long, value_enum, default_value = "mirrored")]
    pub orientation: Orientation,
}

#[derive(Args, Debug, Serialize)]
pub struct AcceptArgs {
    /// Comma separated criterion numbers; all by default.
    #[arg(long)]
    pub only: Option<String>,
    /// Print every checked item.
    #[arg(long)]
    pub verbose: bool,
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

fn usage_error(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

fn run_error(e: impl std::fmt::Display) -> Failure {
    Failure { code: 1, message: e.to_string() }
}

fn parse_list(s: &str) -> Result<Vec<f64>, Failure> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|x| f64::from_str(x.trim()).map_err(|_| usage_error(format!("not a number: {x:?}")))).collect()
}

fn endpoints(s: &str) -> Result<Endpoints, Failure> {
    Endpoints::new(parse_list(s)?).map_err(|e| usage_error(e.to_string()))
}

/// Output with the invocation's configuration attached.
fn with_config(config: &impl Serialize, result: Value) -> Result<String, Failure> {
    let config = serde_json::to_value(config).map_err(run_error)?;
    Ok(to_json(&json!({ "config": config, "result": result })))
}

fn to_value(x: &impl Serialize) -> Result<Value, Failure> {
    serde_json::to_value(x).map_err(run_error)
}

fn eval_kernel(a: &EvalKernelArgs) -> Result<String, Failure> {
    if a.p < 2 {
        return Err(usage_error("--p must be at least 2"));
    }
    let mut times = parse_list(&a.times)?;
    times.resize(a.p - 1, 0.0);
    for (i, v) in [a.t1, a.t2, a.t3, a.t4].iter().enumerate() {
        if let Some(v) = v {
            if i + 1 >= a.p {
                return Err(usage_error(format!("--t{} does not exist for p = {}", i + 1, a.p)));
            }
            times[i] = *v;
        }
    }
    let mut spec = KernelSpec::new(a.p, a.n, a.w, times).map_err(|e| usage_error(e.to_string()))?;
    spec.reflect = a.reflect;
    if let Some(n) = a.nodes {
        spec = spec.with_nodes(n);
    }
    if let Some(o) = a.offset {
        spec = spec.with_offset(o);
    }
    let rep = match a.rep {
        Rep::Double => Representation::Double,
        Rep::Iiks => Representation::Iiks,
    };
    let v = evaluate(&spec, a.lambda, a.lambda_prime, rep).map_err(run_error)?;
    with_config(a, to_value(&v)?)
}

fn fredholm(a: &FredholmArgs) -> Result<String, Failure> {
    let e = endpoints(&a.e)?;
    let g = gap_logdet(&a.preset.spec(), &e, a.m).map_err(run_error)?;
    with_config(a, to_value(&g)?)
}

/// A stored target by name, or the derived equation for the preset's `p`.
fn resolve_equation(name: &str, p: usize, n: usize) -> Result<GapPde, Failure> {
    if let Ok(t) = target(name) {
        if t.p != p {
            return Err(usage_error(format!("{name} is an equation for p = {}, the preset has p = {p}", t.p)));
        }
        return Ok(GapPde::new(t.name, t.p, t.n, t.expr));
    }
    let eq = GapEquation::from_str(name).map_err(|e| usage_error(e.to_string()))?;
    derive_gap_pde(eq, p, n).map_err(|e| usage_error(e.to_string()))
}

fn pde_residual(a: &ResidualArgs) -> Result<String, Failure> {
    let spec = a.preset.spec();
    let pde = resolve_equation(&a.equation, spec.p, a.preset.n as usize)?;
    let e = endpoints(&a.e)?;
    let steps = StepSizes { shift: a.h_shift, dilation: a.h_dilation, time: a.h_time, w: a.h_w };
    let source = FredholmSource::new(spec.clone(), a.m, FredholmSource::bound_for(&e));
    let (report, csv) = residual_with(&pde, &source, &spec, &e, steps, a.m).map_err(run_error)?;
    if let Some(path) = &a.dump_grid {
        std::fs::write(path, csv).map_err(run_error)?;
    }
    let mut v = to_value(&report)?;
    v["equation"] = json!(format!("{} = 0", pde.canonical_text()));
    with_config(a, v)
}

fn derive(a: &DeriveArgs) -> Result<String, Failure> {
    let eq = GapEquation::from_str(&a.equation).map_err(|e| usage_error(e.to_string()))?;
    let pde = derive_gap_pde(eq, a.p, a.n).map_err(|e| usage_error(e.to_string()))?;
    let stored = target_for(eq, a.p, a.n).map_err(run_error)?;
    let verdict = match &stored {
        Some(t) if pde.matches(&t.expr) => format!("MATCH: target {}", t.name),
        Some(t) => format!("MISMATCH: target {}\nstored: {} = 0", t.name, t.expr.normalized().to_text()),
        None => "NO TARGET".to_string(),
    };
    if a.json {
        let result = json!({
            "pde": to_value(&pde)?,
            "canonical": pde.canonical_text(),
            "target": stored.as_ref().map(|t| t.name.clone()),
            "match": stored.as_ref().map(|t| pde.matches(&t.expr)),
        });
        return with_config(a, result);
    }
    Ok(format!("{pde}\n{verdict}"))
}

fn hirota(a: &HirotaArgs) -> Result<(String, bool), Failure> {
    let mut lines = Vec::new();
    let mut ok = true;
    if let Some(l) = a.level {
        for (name, kind) in [("Y", HirotaKind::Y), ("Y1", HirotaKind::Y1), ("second", HirotaKind::Second)] {
            let op = hirota_equation(l, kind).map_err(|e| usage_error(e.to_string()))?;
            lines.push(format!("{name}_{l} = {}", op.reduced().to_text()));
        }
        lines.push(format!("p_{l}(d~) = {}", schur_of_symbols(l).to_text()));
    }
    if a.tables {
        for row in TableRow::ALL {
            let op = row.operator().map_err(run_error)?;
            let lt = row.logtau().map_err(run_error)?;
            let ok_op = op == printed_operator_row(row);
            let ok_lt = lt == printed_logtau_row(row);
            ok &= ok_op && ok_lt;
            lines.push(format!("{row} operator {}: {}", if ok_op { "MATCH" } else { "MISMATCH" }, op.to_text()));
            lines.push(format!("{row} log tau {}: {} = 0", if ok_lt { "MATCH" } else { "MISMATCH" }, lt.to_text()));
        }
    }
    if a.check_schur {
        let items = acceptance::schur_items(a.max_weight);
        let bad: Vec<_> = items.iter().filter(|i| !i.ok).collect();
        ok &= bad.is_empty();
        for i in &bad {
            lines.push(format!("FAIL {}: {}", i.name, i.detail));
        }
        lines.push(format!(
            "{}: Y3, Y4, Y5 on s o s for |lambda| <= {}: {} of {} vanish",
            if bad.is_empty() { "PASS" } else { "FAIL" },
            a.max_weight,
            items.len() - bad.len(),
            items.len()
        ));
    }
    if lines.is_empty() {
        return Err(usage_error("nothing to do: pass --level, --tables or --check-schur"));
    }
    Ok((lines.join("\n"), ok))
}

fn theta(a: &PArgs) -> Result<String, Failure> {
    let pot = solve_theta(a.p).map_err(|e| usage_error(e.to_string()))?;
    Ok(pot.theta().iter().enumerate().map(|(i, th)| format!("{} = {}", theta_name(i), th.to_text())).collect::<Vec<_>>().join("\n"))
}

fn tau_topological(a: &PArgs) -> Result<String, Failure> {
    topological_tau_log(a.p).map(|g| g.to_text()).map_err(|e| usage_error(e.to_string()))
}

fn phi(a: &PhiArgs) -> Result<String, Failure> {
    let sign = Sign::from_str(&a.sign).map_err(usage_error)?;
    let parts = parse_list(&a.u)?;
    let u = match parts.as_slice() {
        [re] => Complex64::new(*re, 0.0),
        [re, im] => Complex64::new(*re, *im),
        _ => return Err(usage_error("--u takes re or re,im")),
    };
    let spec = PhiSpec::standard(a.p, sign, a.n, a.w).map_err(|e| usage_error(e.to_string()))?;
    let value = |s: &PhiSpec| -> Result<Complex64, Failure> {
        Ok(Phi::new(s, NumericPotential::pure(s.p), u.norm() + 1.0).map_err(run_error)?.eval(u))
    };
    let v = value(&spec)?;
    let mut fine = spec.clone();
    fine.quad.nodes_per_panel *= 2;
    let err = (value(&fine)? - v).norm();
    with_config(a, json!({ "value": [v.re, v.im], "error_estimate": err }))
}

fn asymptotics(a: &AsymptoticsArgs) -> Result<String, Failure> {
    let taus = parse_list(&a.tau)?;
    let e = endpoints(&a.e)?;
    let o = match a.orientation {
        Orientation::Mirrored => WindowOrientation::Mirrored,
        Orientation::Literal => WindowOrientation::Literal,
    };
    let r = pearcey_airy_limit(&taus, &e, a.m, o).map_err(run_error)?;
    with_config(a, to_value(&r)?)
}

fn accept(a: &AcceptArgs) -> Result<(String, bool), Failure> {
    let numbers: Vec<usize> = match &a.only {
        None => (1..=10).collect(),
        Some(s) => s
            .split(',')
            .map(|x| match x.trim().parse::<usize>() {
                Ok(n) if (1..=10).contains(&n) => Ok(n),
                _ => Err(usage_error(format!("criteria are numbered 1 to 10, got {x:?}"))),
            })
            .collect::<Result<_, _>>()?,
    };
    let mut lines = Vec::new();
    let mut ok = true;
    for n in numbers {
        let c = acceptance::run(n);
        ok &= c.status != acceptance::Status::Fail;
        lines.push(if a.verbose || c.status != acceptance::Status::Pass { c.report() } else { c.line() });
    }
    Ok((lines.join("\n"), ok))
}

/// Run with `args` (including the program name), writing to `out` and `err`;
/// returns the exit code.
pub fn run<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 2 { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    if let Some(j) = cli.jobs {
        if j == 0 {
            let _ = writeln!(err, "--jobs must be positive");
            return 2;
        }
        // Fails only if a pool already exists, in which case it is reused.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j).build_global();
    }
    let text_config = || serde_json::to_string(&cli).unwrap_or_default();
    let result: Result<(String, bool), Failure> = match &cli.command {
        Command::EvalKernel(a) => eval_kernel(a).map(|s| (s, true)),
        Command::Fredholm(a) => fredholm(a).map(|s| (s, true)),
        Command::PdeResidual(a) => pde_residual(a).map(|s| (s, true)),
        Command::Derive(a) => {
            if !a.json {
                let _ = writeln!(err, "config: {}", text_config());
            }
            derive(a).map(|s| (s, true))
        }
        Command::Hirota(a) => {
            let _ = writeln!(err, "config: {}", text_config());
            hirota(a)
        }
        Command::Theta(a) => {
            let _ = writeln!(err, "config: {}", text_config());
            theta(a).map(|s| (s, true))
        }
        Command::TauTopological(a) => {
            let _ = writeln!(err, "config: {}", text_config());
            tau_topological(a).map(|s| (s, true))
        }
        Command::Phi(a) => phi(a).map(|s| (s, true)),
        Command::Asymptotics(a) => asymptotics(a).map(|s| (s, true)),
        Command::Accept(a) => {
            let _ = writeln!(err, "config: {}", text_config());
            accept(a)
        }
    };
    match result {
        Ok((s, ok)) => {
            let _ = writeln!(out, "{s}");
            if ok {
                0
            } else {
                1
            }
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
