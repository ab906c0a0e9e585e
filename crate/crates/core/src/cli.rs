//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 for invalid input, 3 for numerical failure.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::ansatz::{Ansatz, AnsatzParams, Mode};
use crate::diagnostics::{
    expansion, expansion_sample, reduced_lambda, residual_bound_report, spread, stationary_eps, ExpansionSample,
    Residual, DEFAULT_EPS0,
};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::geometry::{chart_radius, SpherePoint};
use crate::newton::{
    continue_branch, initial_lambda, kernel_projections, nonlinear_remainder_l1, solve_tetrahedral, BranchOptions,
    NewtonOptions, NewtonState,
};
use crate::optimizer::{classify_configuration, distance_multiset_gap, minimize_config};
use crate::quadrature::build_rule;
use crate::symmetry::{config_energy, td_group, Configuration};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "sphere-blowup", version, about = "Tetrahedral blow-up solutions of the mean field equation on S²")]
pub struct Cli {
    /// Worker threads for parallel loops.
    #[arg(long, global = true, env = "SPHERE_BLOWUP_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Minimize the configuration energy over m points.
    ConfigOpt(ConfigOptArgs),
    /// Tabulate the ansatz on a latitude–longitude grid.
    AnsatzEval(AnsatzEvalArgs),
    /// Compare ansatz quantities with their λ-expansions.
    EnergyCheck(EnergyCheckArgs),
    /// Tabulate S_ρ(w_λ) and its ratio to the expected bound shape.
    ResidualCheck(ResidualCheckArgs),
    /// Critical scale of the reduced energy for a given ε.
    Reduce(ReduceArgs),
    /// Newton-refine the ansatz at one ρ.
    Solve(SolveArgs),
    /// Continue the solution branch toward ρ = 32π.
    Branch(BranchArgs),
    /// Name the configuration stored in a JSON file.
    Classify(ClassifyArgs),
}

/// `ρ` given directly or as `ε = ρ − 32π`.
#[derive(Args, Debug, Serialize, Clone, Copy)]
#[group(required = true, multiple = false)]
pub struct RhoArg {
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
}

impl RhoArg {
    fn eps(&self) -> f64 {
        match (self.rho, self.eps) {
            (Some(r), _) => r - 32.0 * PI,
            (_, Some(e)) => e,
            _ => unreachable!("clap enforces one of --rho/--eps"),
        }
    }
}

#[derive(Args, Debug, Serialize)]
#[group(required = false, multiple = false)]
pub struct OptionalRhoArg {
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
pub struct ConfigOptArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value_t = 20)]
    pub starts: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Glued,
    Exact,
}

#[derive(Args, Debug, Serialize)]
pub struct AnsatzEvalArgs {
    #[arg(long)]
    pub lambda: f64,
    #[command(flatten)]
    pub rho: RhoArg,
    /// Number of latitude rows; longitudes use twice as many.
    #[arg(long, default_value_t = 64)]
    pub grid: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    pub mode: ModeArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct EnergyCheckArgs {
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.05,0.025")]
    pub lambda_list: Vec<f64>,
    #[command(flatten)]
    pub rho: RhoArg,
    /// Base order of the quadrature rule.
    #[arg(long, default_value_t = 64)]
    pub order: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct ResidualCheckArgs {
    #[arg(long)]
    pub lambda: f64,
    /// When neither --rho nor --eps is given, ε = 384πλ² ln(1/λ) − 192πλ².
    #[command(flatten)]
    pub rho: OptionalRhoArg,
    #[arg(long, default_value_t = 64)]
    pub grid: usize,
    #[arg(long, default_value_t = 64)]
    pub order: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct ReduceArgs {
    #[arg(long)]
    pub eps: f64,
    /// Upper limit of the admissible ε range.
    #[arg(long, default_value_t = DEFAULT_EPS0)]
    pub eps0: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct SolveArgs {
    #[command(flatten)]
    pub rho: RhoArg,
    /// Harmonic degree cap of the correction.
    #[arg(long = "L", default_value_t = 40)]
    pub degree_cap: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 30)]
    pub max_iter: usize,
    /// Initial scale; defaults to the reduced-energy critical point.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct BranchArgs {
    #[arg(long, required_unless_present = "eps_start", conflicts_with = "eps_start")]
    pub rho_start: Option<f64>,
    #[arg(long, required_unless_present = "eps_end", conflicts_with = "eps_end")]
    pub rho_end: Option<f64>,
    #[arg(long)]
    pub eps_start: Option<f64>,
    #[arg(long)]
    pub eps_end: Option<f64>,
    #[arg(long, default_value_t = 8)]
    pub steps: usize,
    #[arg(long = "L", default_value_t = 40)]
    pub degree_cap: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 30)]
    pub max_iter: usize,
    /// Stop once the top eight degrees carry more than this share of the correction.
    #[arg(long, default_value_t = 0.02)]
    pub max_tail: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct ClassifyArgs {
    /// JSON file `{"m": n, "points": [[x,y,z], ...]}`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Provenance record written next to every output file.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: serde_json::Value,
    pub tool_version: String,
    pub timestamp: String,
    pub input_hash: Option<String>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Path of the manifest that accompanies `out`.
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn write_manifest<P: Serialize>(out: &Path, command: &str, params: &P, input_hash: Option<String>) -> Result<()> {
    let m = RunManifest {
        command: command.into(),
        parameters: serde_json::to_value(params).map_err(|e| Error::Io(e.to_string()))?,
        tool_version: env!("CARGO_PKG_VERSION").into(),
        timestamp: chrono::Utc::now().to_rfc3339(),
        input_hash,
    };
    let text = serde_json::to_string_pretty(&m).map_err(|e| Error::Io(e.to_string()))?;
    std::fs::write(manifest_path(out), text + "\n")?;
    Ok(())
}

/// Opens the output up front so a bad path fails before any work.
fn open_out(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn write_json<T: Serialize>(w: &mut dyn Write, v: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(v).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(w, "{text}")?;
    w.flush()?;
    Ok(())
}

/// Shortest round-trip decimal, in exponent form outside `[1e-4, 1e15)`.
pub fn fmt_num(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-4..1e15).contains(&a) || !v.is_finite() {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

fn csv_row(w: &mut dyn Write, values: &[f64]) -> Result<()> {
    let line: Vec<String> = values.iter().map(|v| fmt_num(*v)).collect();
    writeln!(w, "{}", line.join(","))?;
    Ok(())
}

fn require(cond: bool, msg: impl Into<String>) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg.into()))
    }
}

fn check_eps(eps: f64) -> Result<()> {
    require(eps > 0.0 && eps.is_finite(), format!("rho must exceed 32π (got eps = {eps}); use --eps for ε = ρ − 32π"))
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                eprintln!("hint: run with --help for the accepted ranges");
                EXIT_INVALID
            } else {
                EXIT_NUMERICAL
            }
        }
    }
}

/// Runs a parsed command.
pub fn dispatch(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        require(n >= 1, "--threads must be at least 1")?;
        // a pool may already exist when called repeatedly in one process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match cli.command {
        Command::ConfigOpt(a) => config_opt(a),
        Command::AnsatzEval(a) => ansatz_eval(a),
        Command::EnergyCheck(a) => energy_check(a),
        Command::ResidualCheck(a) => residual_check(a),
        Command::Reduce(a) => reduce(a),
        Command::Solve(a) => solve(a),
        Command::Branch(a) => branch(a),
        Command::Classify(a) => classify(a),
    }
}

#[derive(Serialize)]
struct ConfigOptOutput<'a> {
    m: usize,
    energy: f64,
    gradient_norm: f64,
    converged: bool,
    classification: String,
    best: &'a Configuration,
    start_energies: Vec<f64>,
    start_converged: Vec<bool>,
    /// Starts whose distance multiset matches the best configuration within 1e-6.
    matching_starts: usize,
}

fn config_opt(a: ConfigOptArgs) -> Result<()> {
    require(a.m >= 2, "--m must be at least 2")?;
    require(a.starts >= 1, "--starts must be at least 1")?;
    require(a.tol > 0.0, "--tol must be positive")?;
    let mut w = open_out(&a.out)?;
    let report = minimize_config(a.m, a.starts, a.tol, a.seed)?;
    let matching = report
        .runs
        .iter()
        .filter(|r| distance_multiset_gap(&r.config, &report.best).is_some_and(|g| g <= 1e-6))
        .count();
    let out = ConfigOptOutput {
        m: a.m,
        energy: report.energy,
        gradient_norm: report.gradient_norm,
        converged: report.converged,
        classification: classify_configuration(&report.best, 1e-5),
        best: &report.best,
        start_energies: report.runs.iter().map(|r| r.energy).collect(),
        start_converged: report.runs.iter().map(|r| r.converged).collect(),
        matching_starts: matching,
    };
    write_json(&mut *w, &out)?;
    if let Some(p) = &a.out {
        eprintln!("m = {}: F = {} ({}), {matching}/{} starts match", a.m, out.energy, out.classification, a.starts);
        write_manifest(p, "config-opt", &a, None)?;
    }
    report.require_converged()
}

fn ansatz_eval(a: AnsatzEvalArgs) -> Result<()> {
    let eps = a.rho.eps();
    check_eps(eps)?;
    require(a.grid >= 2, "--grid must be at least 2")?;
    let params = AnsatzParams::tetrahedral(eps, a.lambda)?;
    let mode = match a.mode {
        ModeArg::Glued => Mode::Glued,
        ModeArg::Exact => Mode::Exact,
    };
    let mut w = open_out(&a.out)?;
    let ansatz = Ansatz::new(params, mode);
    writeln!(w, "theta,phi,w")?;
    let n = a.grid;
    for i in 0..n {
        let theta = PI * (i as f64 + 0.5) / n as f64;
        for j in 0..2 * n {
            let phi = PI * j as f64 / n as f64;
            csv_row(&mut *w, &[theta, phi, ansatz.value(&SpherePoint::from_angles(theta, phi))])?;
        }
    }
    w.flush()?;
    if let Some(p) = &a.out {
        write_manifest(p, "ansatz-eval", &a, None)?;
    }
    Ok(())
}

/// Column names of the `energy-check` CSV.
pub const ENERGY_CHECK_COLUMNS: &str = "lambda,eps,m0,m0_ratio,\
component_center,component_center_pred,component_center_ratio,\
component_outer,component_outer_pred,component_outer_ratio,\
ansatz_peak,ansatz_peak_pred,ansatz_peak_ratio,\
ansatz_outer,ansatz_outer_pred,ansatz_outer_ratio,\
integral_exp,integral_exp_pred,integral_exp_ratio,\
energy,energy_pred,energy_ratio,energy_printed,energy_printed_ratio";

fn energy_row(s: &ExpansionSample) -> Vec<f64> {
    let l2 = s.lambda * s.lambda;
    let r = |m: f64, p: f64| (m - p) / l2;
    vec![
        s.lambda,
        s.eps,
        s.m0,
        (s.m0 - 2.0) / l2,
        s.component_center,
        s.component_center_pred,
        r(s.component_center, s.component_center_pred),
        s.component_outer,
        s.component_outer_pred,
        r(s.component_outer, s.component_outer_pred),
        s.ansatz_peak,
        s.ansatz_peak_pred,
        r(s.ansatz_peak, s.ansatz_peak_pred),
        s.ansatz_outer,
        s.ansatz_outer_pred,
        r(s.ansatz_outer, s.ansatz_outer_pred),
        s.integral_exp,
        s.integral_exp_pred,
        r(s.integral_exp, s.integral_exp_pred),
        s.energy,
        s.energy_pred,
        r(s.energy, s.energy_pred),
        s.energy_printed,
        r(s.energy, s.energy_printed),
    ]
}

fn energy_check(a: EnergyCheckArgs) -> Result<()> {
    let eps = a.rho.eps();
    check_eps(eps)?;
    require(!a.lambda_list.is_empty(), "--lambda-list must not be empty")?;
    for l in &a.lambda_list {
        require(*l > 0.0 && *l < 0.5, format!("lambda = {l} must lie in (0, 0.5)"))?;
    }
    require(a.order >= 8, "--order must be at least 8")?;
    let mut w = open_out(&a.out)?;
    writeln!(w, "{ENERGY_CHECK_COLUMNS}")?;
    let mut rows = Vec::new();
    for l in &a.lambda_list {
        let row = energy_row(&expansion_sample(eps, *l, a.order)?);
        csv_row(&mut *w, &row)?;
        w.flush()?;
        rows.push(row);
    }
    if rows.len() > 1 {
        let names: Vec<&str> = ENERGY_CHECK_COLUMNS.split(',').collect();
        for (k, name) in names.iter().enumerate().filter(|(_, n)| n.ends_with("_ratio")) {
            let col: Vec<f64> = rows.iter().map(|r| r[k].abs()).collect();
            eprintln!("{name}: max/min = {:.3}", spread(&col));
        }
    }
    if let Some(p) = &a.out {
        write_manifest(p, "energy-check", &a, None)?;
    }
    Ok(())
}

fn residual_check(a: ResidualCheckArgs) -> Result<()> {
    require(a.lambda > 0.0 && a.lambda < 0.5, format!("lambda = {} must lie in (0, 0.5)", a.lambda))?;
    let eps = match (a.rho.rho, a.rho.eps) {
        (Some(r), _) => r - 32.0 * PI,
        (_, Some(e)) => e,
        _ => stationary_eps(a.lambda),
    };
    check_eps(eps)?;
    require(a.grid >= 2, "--grid must be at least 2")?;
    require(a.order >= 8, "--order must be at least 8")?;
    let params = AnsatzParams::tetrahedral(eps, a.lambda)?;
    let mut w = open_out(&a.out)?;
    let rule = build_rule(a.order, &params.config, a.lambda)?;
    let ansatz = Ansatz::new(params.clone(), Mode::Exact);
    let res = Residual::new(params.rho, &ansatz, &rule)?;
    let group = td_group();
    writeln!(w, "theta,phi,residual,chart_radius,bound,ratio,symmetry_defect")?;
    let n = a.grid;
    for i in 0..n {
        let theta = PI * (i as f64 + 0.5) / n as f64;
        for j in 0..2 * n {
            let phi = PI * j as f64 / n as f64;
            let y = SpherePoint::from_angles(theta, phi);
            let s = res.at(&y)?;
            let r = params.config.points().iter().map(|c| chart_radius(c, &y)).fold(f64::INFINITY, f64::min);
            let bound = if r <= params.r0 {
                expansion::residual_inner_bound(a.lambda, r / a.lambda)
            } else {
                expansion::residual_outer_bound(a.lambda)
            };
            let mut defect = 0.0f64;
            for t in &group.elements {
                defect = defect.max((res.at(&SpherePoint::new(t * y.v()))? - s).abs());
            }
            csv_row(&mut *w, &[theta, phi, s, r, bound, s.abs() / bound, defect])?;
        }
    }
    w.flush()?;
    let report = residual_bound_report(eps, a.lambda, a.order, a.grid)?;
    eprintln!(
        "rho = {}: max inner ratio {:.4e}, max outer ratio {:.4e}, symmetry defect {:.3e}",
        report.rho, report.inner_ratio_max, report.outer_ratio_max, report.symmetry_defect
    );
    if let Some(p) = &a.out {
        write_manifest(p, "residual-check", &a, None)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ReduceOutput {
    eps: f64,
    lambda_star: f64,
    eps_ratio: f64,
    lambda_1: f64,
    lambda_2: f64,
    /// `(384πλ_*² ln(1/λ_*) − 192πλ_*²)/ε − 1`.
    relation_defect: f64,
    /// Leading constant `384π` of `ε ~ C λ² ln(1/λ)`.
    asymptotic_ratio: f64,
}

fn reduce(a: ReduceArgs) -> Result<()> {
    require(a.eps0 > 0.0, "--eps0 must be positive")?;
    let mut w = open_out(&a.out)?;
    let c = reduced_lambda(a.eps, a.eps0)?;
    let out = ReduceOutput {
        eps: a.eps,
        lambda_star: c.lambda_star,
        eps_ratio: c.eps_ratio,
        lambda_1: c.bracket.0,
        lambda_2: c.bracket.1,
        relation_defect: stationary_eps(c.lambda_star) / a.eps - 1.0,
        asymptotic_ratio: 384.0 * PI,
    };
    if let Some(p) = &a.out {
        write_json(&mut *w, &out)?;
        write_manifest(p, "reduce", &a, None)?;
    } else {
        writeln!(w, "lambda_star = {}", out.lambda_star)?;
        writeln!(w, "eps_ratio = {} (384π = {})", out.eps_ratio, out.asymptotic_ratio)?;
        writeln!(w, "bracket = [{}, {}]", out.lambda_1, out.lambda_2)?;
        w.flush()?;
    }
    Ok(())
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    eps: f64,
    degree_cap: usize,
    basis_size: usize,
    nodes: usize,
    state: &'a NewtonState,
    /// `⟨S_ρ(u), χ_{R₁}φ_{i,j}⟩`, rows `i = 0, 1, 2`, columns `j` over the centers.
    kernel_projections: Vec<Vec<f64>>,
    nonlinear_remainder_l1: f64,
    /// `ε/(λ_est² ln(1/λ_est))`.
    eps_ratio: f64,
}

fn solve(a: SolveArgs) -> Result<()> {
    let eps = a.rho.eps();
    check_eps(eps)?;
    require(a.degree_cap >= 4, "--L must be at least 4")?;
    require(a.tol > 0.0, "--tol must be positive")?;
    let lambda0 = match a.lambda {
        Some(l) => l,
        None => initial_lambda(32.0 * PI + eps)?,
    };
    require(lambda0 > 0.0 && lambda0 < 0.5, format!("lambda = {lambda0} must lie in (0, 0.5)"))?;
    let mut w = open_out(&a.out)?;
    let opts = NewtonOptions { tol: a.tol, max_iter: a.max_iter, free_scale: true };
    let (state, family, disc) = solve_tetrahedral(eps, lambda0, None, a.degree_cap, opts)?;
    let le = state.lambda_est;
    let out = SolveOutput {
        eps,
        degree_cap: a.degree_cap,
        basis_size: disc.n(),
        nodes: disc.rule.len(),
        kernel_projections: kernel_projections(&family, &disc, &state)?,
        nonlinear_remainder_l1: nonlinear_remainder_l1(&family, &disc, &state),
        eps_ratio: eps / (le * le * (1.0 / le).ln()),
        state: &state,
    };
    write_json(&mut *w, &out)?;
    if let Some(p) = &a.out {
        eprintln!(
            "converged in {} iterations: u(ξ₁) = {}, λ = {}, residual {:e}",
            state.iterations, state.u_peak, state.lambda, state.residual_norm
        );
        write_manifest(p, "solve", &a, None)?;
    }
    Ok(())
}

/// Column names of the `branch` CSV.
pub const BRANCH_COLUMNS: &str = "rho,u_peak,u_offpeak,lambda_est,eps_ratio,residual";

fn branch(a: BranchArgs) -> Result<()> {
    let floor = 32.0 * PI;
    let start = a.rho_start.or(a.eps_start.map(|e| floor + e)).unwrap();
    let end = a.rho_end.or(a.eps_end.map(|e| floor + e)).unwrap();
    require(
        start > end && end > floor,
        format!(
            "need rho_start > rho_end > 32π ≈ {floor:.6} (got {start}, {end}); --eps-start/--eps-end take ε = ρ − 32π"
        ),
    )?;
    require(a.steps >= 1, "--steps must be at least 1")?;
    require(a.degree_cap >= 4, "--L must be at least 4")?;
    require(a.tol > 0.0, "--tol must be positive")?;
    require(a.max_tail > 0.0, "--max-tail must be positive")?;
    // fail fast on a scale outside the reduced-energy window
    initial_lambda(start)?;
    let mut w = open_out(&a.out)?;
    writeln!(w, "{BRANCH_COLUMNS}")?;
    w.flush()?;
    let opts =
        BranchOptions { degree_cap: a.degree_cap, tol: a.tol, max_iter: a.max_iter, max_tail_fraction: a.max_tail };
    let mut write_err = None;
    let result = continue_branch(start, end, a.steps, &opts, |r| {
        let row = [r.rho, r.u_peak, r.u_offpeak, r.lambda_est, r.eps_ratio, r.residual];
        if let Err(e) = csv_row(&mut *w, &row).and_then(|_| w.flush().map_err(Error::from)) {
            write_err.get_or_insert(e);
        }
    })?;
    if let Some(e) = write_err {
        return Err(e);
    }
    if let Some(p) = &a.out {
        write_manifest(p, "branch", &a, None)?;
    }
    if let Some(reason) = &result.stop_reason {
        eprintln!("branch stopped after {} points: {reason}", result.records.len());
    }
    match result.error {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn classify(a: ClassifyArgs) -> Result<()> {
    require(a.tol > 0.0, "--tol must be positive")?;
    let bytes = std::fs::read(&a.input)?;
    let config: Configuration =
        serde_json::from_slice(&bytes).map_err(|e| Error::InvalidParameter(format!("{}: {e}", a.input.display())))?;
    let label = classify_configuration(&config, a.tol);
    match &a.out {
        Some(p) => {
            let mut w = open_out(&a.out)?;
            let out = serde_json::json!({
                "m": config.m(),
                "energy": config_energy(&config),
                "classification": label,
            });
            write_json(&mut *w, &out)?;
            write_manifest(p, "classify", &a, Some(sha256_hex(&bytes)))?;
        }
        None => println!("{label}"),
    }
    Ok(())
}
