//! Command-line front end. Human-readable text goes to the output stream;
//! the machine report goes to `--json-out`.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 checks ran and failed,
//! 3 inconclusive.

mod problem;
mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::expr::{Expr, Point, ZeroTestConfig};
use crate::forms::{Lagrangian, SemiBasicOneForm};
use crate::geometry::{classify, structure_identities, Semispray};
use crate::helmholtz::{semispray_from_lagrangian, variationality_verdict, verify_lagrangian, HelmholtzError, Verdict};
use crate::numeric::{euler_lagrange_residual, integrate_geodesic};
use crate::spencer::symbol_dims;

pub use problem::{ConfigSpec, ProblemError, ProblemFile, ResolvedConfig, ThetaSpec, DEFAULT_STEP, DEFAULT_STEPS};
pub use report::{Analysis, Classification, EulerLagrange, Geodesic, Helmholtz, Identity, Report, Status, Timings};

/// Number of seeded trajectories used by `check-lagrangian`.
pub const EL_TRAJECTORIES: usize = 10;
/// Bound on the Euler–Lagrange residual along those trajectories.
pub const EL_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(name = "semispray", version, about = "Inverse problem toolkit for time-dependent second-order ODE systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Connection, curvature, Jacobi endomorphism, structure identities and classification.
    Analyze(FileArgs),
    /// Checks a candidate semi-basic 1-form θ against P θ = 0 and the obstruction d_R θ = 0.
    CheckTheta(FileArgs),
    /// Verifies a Lagrangian against the file's semispray (or the one it induces).
    CheckLagrangian(FileArgs),
    /// Exact symbol dimensions for n = 1..=n-max.
    SymbolDims(SymbolArgs),
    /// Integrates a geodesic with RK4 and prints the trajectory.
    Geodesic(GeodesicArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Path for the machine-readable JSON report.
    #[arg(long)]
    pub json_out: Option<PathBuf>,
    /// Seed for sample points.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of sample points for zero tests.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Relative tolerance for zero tests.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Include wall-clock timings in the report.
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Args)]
pub struct FileArgs {
    /// Problem file (JSON).
    #[arg(long)]
    pub file: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SymbolArgs {
    /// Largest n in the table.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..=64))]
    pub n_max: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct GeodesicArgs {
    /// Problem file (JSON).
    #[arg(long)]
    pub file: PathBuf,
    /// Initial state `t,x1,..,xn,y1,..,yn`.
    #[arg(long, allow_hyphen_values = true)]
    pub start: String,
    /// RK4 step.
    #[arg(long)]
    pub step: Option<f64>,
    /// Number of steps.
    #[arg(long)]
    pub steps: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

/// Runs the command line `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
            } else {
                let _ = write!(out, "{}", e.render());
            }
            return code;
        }
    };
    execute(&cli.command, out, err)
}

fn resolve(common: &Common, file: Option<&ConfigSpec>) -> ResolvedConfig {
    let mut c = ResolvedConfig::default();
    if let Some(f) = file {
        c.merge(f);
    }
    c.merge(&ConfigSpec {
        seed: common.seed,
        samples: common.samples,
        tolerance: common.tol,
        ..ConfigSpec::default()
    });
    c
}

fn common(cmd: &Command) -> &Common {
    match cmd {
        Command::Analyze(a) | Command::CheckTheta(a) | Command::CheckLagrangian(a) => &a.common,
        Command::SymbolDims(a) => &a.common,
        Command::Geodesic(a) => &a.common,
    }
}

fn name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Analyze(_) => "analyze",
        Command::CheckTheta(_) => "check-theta",
        Command::CheckLagrangian(_) => "check-lagrangian",
        Command::SymbolDims(_) => "symbol-dims",
        Command::Geodesic(_) => "geodesic",
    }
}

fn execute(cmd: &Command, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let started = Instant::now();
    let common = common(cmd);
    let report = match cmd {
        Command::SymbolDims(a) => Ok(symbol_table(a, resolve(common, None), out)),
        Command::Analyze(a) | Command::CheckTheta(a) | Command::CheckLagrangian(a) => {
            load(&a.file, common).and_then(|(p, cfg)| match cmd {
                Command::Analyze(_) => analyze(&p, cfg, out),
                Command::CheckTheta(_) => check_theta(&p, cfg, out),
                _ => check_lagrangian(&p, cfg, out),
            })
        }
        Command::Geodesic(a) => load(&a.file, common).and_then(|(p, mut cfg)| {
            cfg.step = a.step.unwrap_or(cfg.step);
            cfg.steps = a.steps.unwrap_or(cfg.steps);
            geodesic(&p, &a.start, cfg, out)
        }),
    };
    let mut report = report.unwrap_or_else(|(cfg, e)| {
        let _ = writeln!(err, "error: {e}");
        let mut r = Report::new(name(cmd), cfg);
        r.error = Some(e);
        r.set_status(Status::Error);
        r
    });
    if common.timings {
        report.timings = Some(Timings {
            total_ms: started.elapsed().as_secs_f64() * 1e3,
        });
    }
    if let Some(path) = &common.json_out {
        if let Err(e) = write_report(path, &report) {
            let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
            return 1;
        }
    }
    report.exit_code
}

fn write_report(path: &Path, report: &Report) -> std::io::Result<()> {
    std::fs::write(path, report.to_json())
}

type Outcome = Result<Report, (ResolvedConfig, String)>;

fn load(path: &Path, common: &Common) -> Result<(ProblemFile, ResolvedConfig), (ResolvedConfig, String)> {
    let p = ProblemFile::read(path).map_err(|e| (resolve(common, None), e.to_string()))?;
    let cfg = resolve(common, p.config.as_ref());
    if !(cfg.tolerance > 0.0 && cfg.samples > 0 && cfg.step > 0.0) {
        return Err((cfg, "tolerance, samples and step must be positive".into()));
    }
    Ok((p, cfg))
}

fn fail<T: ToString>(cfg: &ResolvedConfig) -> impl Fn(T) -> (ResolvedConfig, String) + '_ {
    move |e| (cfg.clone(), e.to_string())
}

fn print_matrix(out: &mut dyn Write, title: &str, m: &[Vec<String>]) {
    let _ = writeln!(out, "{title}:");
    for row in m {
        let _ = writeln!(out, "  [{}]", row.join(", "));
    }
}

fn print_classification(out: &mut dyn Write, c: &Classification) {
    let _ = writeln!(out, "flat: {}", c.is_flat);
    let _ = writeln!(out, "isotropic: {}", c.is_isotropic);
    if let Some(l) = &c.lambda {
        let _ = writeln!(out, "lambda: {l}");
    }
    for note in &c.notes {
        let _ = writeln!(out, "note: {note}");
    }
}

fn analyze(p: &ProblemFile, cfg: ResolvedConfig, out: &mut dyn Write) -> Outcome {
    let s = p.semispray().map_err(fail(&cfg))?;
    let z = cfg.zero_test();
    let mut report = Report::new("analyze", cfg.clone());
    report.n = Some(p.n);
    let (structure, class) = match (structure_identities(&s, &z), classify(&s, &z)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => {
            let _ = writeln!(out, "inconclusive: {e}");
            report.error = Some(e.to_string());
            report.set_status(Status::Inconclusive);
            return Ok(report);
        }
    };
    let a = Analysis::new(&s, &structure, &class);
    let _ = writeln!(out, "n = {}", p.n);
    let _ = writeln!(out, "G = [{}]", a.g.join(", "));
    print_matrix(out, "N (N^i_j)", &a.connection);
    let _ = writeln!(out, "N^i_0 = [{}]", a.connection_time.join(", "));
    print_matrix(out, "Phi (R^i_j)", &a.jacobi);
    for id in &a.structure {
        let _ = writeln!(out, "identity {}: {}", id.name, if id.passed { "pass" } else { "FAIL" });
    }
    print_classification(out, &a.classification);
    if !structure.all_passed() {
        report.set_status(Status::Failed);
    }
    report.analysis = Some(a);
    Ok(report)
}

fn verdict_status(v: Verdict) -> Status {
    match v {
        Verdict::LagrangianConfirmed | Verdict::FormallyIntegrableClass => Status::Ok,
        Verdict::HelmholtzFails | Verdict::ObstructionFails => Status::Failed,
        Verdict::Inconclusive => Status::Inconclusive,
    }
}

fn print_helmholtz(out: &mut dyn Write, h: &Helmholtz) {
    let show = |b: Option<bool>| b.map_or("-".to_string(), |b| b.to_string());
    let _ = writeln!(out, "d_J theta = 0: {}", show(h.dj_zero));
    let _ = writeln!(out, "d_h theta = 0: {}", show(h.dh_zero));
    let _ = writeln!(out, "d_R theta = 0: {}", show(h.dr_zero));
    if let Some(r) = h.rank_dtheta {
        let _ = writeln!(out, "rank d theta: {r}");
    }
    for d in &h.details {
        let _ = writeln!(out, "detail: {d}");
    }
    let _ = writeln!(out, "verdict: {:?}", h.verdict);
}

fn check_theta(p: &ProblemFile, cfg: ResolvedConfig, out: &mut dyn Write) -> Outcome {
    let s = p.semispray().map_err(fail(&cfg))?;
    let theta: SemiBasicOneForm = p.theta_form().map_err(fail(&cfg))?;
    let z = cfg.zero_test();
    let mut report = Report::new("check-theta", cfg.clone());
    report.n = Some(p.n);
    let mut r = variationality_verdict(&s, Some(&theta), &z).map_err(fail(&cfg))?;
    if p.n == 1 {
        r.details.insert(0, "n = 1: semi-basic 3-forms vanish, so d_R θ = 0 automatically".into());
    }
    let h = Helmholtz::from(&r);
    print_helmholtz(out, &h);
    if r.verdict == Verdict::LagrangianConfirmed {
        if let Some(l) = &h.lagrangian {
            let _ = writeln!(out, "L = {l}");
        }
    }
    report.set_status(verdict_status(r.verdict));
    report.helmholtz = Some(h);
    Ok(report)
}

/// Seeded starting points shared by the Euler–Lagrange check.
fn starts(s: &Semispray, z: &ZeroTestConfig) -> Vec<Option<Point>> {
    let exprs: Vec<&Expr> = s.coefficients().iter().collect();
    (0..EL_TRAJECTORIES as u64)
        .map(|k| z.usable_point(&exprs, s.n(), k).ok())
        .collect()
}

fn check_lagrangian(p: &ProblemFile, cfg: ResolvedConfig, out: &mut dyn Write) -> Outcome {
    let l: Lagrangian = p.lagrangian().map_err(fail(&cfg))?;
    let z = cfg.zero_test();
    let mut report = Report::new("check-lagrangian", cfg.clone());
    report.n = Some(p.n);
    let s = match &p.g {
        Some(_) => p.semispray().map_err(fail(&cfg))?,
        None => match semispray_from_lagrangian(&l, &z) {
            Ok(s) => {
                let g: Vec<String> = s.coefficients().iter().map(ToString::to_string).collect();
                let _ = writeln!(out, "derived G = [{}]", g.join(", "));
                s
            }
            Err(HelmholtzError::ZeroTest(e)) => {
                let _ = writeln!(out, "inconclusive: {e}");
                report.error = Some(e.to_string());
                report.set_status(Status::Inconclusive);
                return Ok(report);
            }
            Err(e @ HelmholtzError::SingularMetric) => {
                let _ = writeln!(out, "failed: {e}");
                report.error = Some(e.to_string());
                report.set_status(Status::Failed);
                return Ok(report);
            }
            Err(e) => return Err(fail(&cfg)(e)),
        },
    };
    let r = verify_lagrangian(&l, &s, &z).map_err(fail(&cfg))?;
    let h = Helmholtz::from(&r);
    print_helmholtz(out, &h);

    let residuals: Vec<Option<f64>> = starts(&s, &z)
        .into_iter()
        .map(|start| {
            let start = start?;
            let tr = integrate_geodesic(&s, &start, cfg.step, cfg.steps);
            let r = euler_lagrange_residual(&l.l, &tr);
            (tr.truncated.is_none() && r.is_finite()).then_some(r)
        })
        .collect();
    let max_residual = residuals
        .iter()
        .try_fold(0.0f64, |m, r| r.map(|r| m.max(r)));
    let passed = max_residual.is_some_and(|m| m <= EL_TOLERANCE);
    let _ = match max_residual {
        Some(m) => writeln!(out, "Euler-Lagrange residual: {m:.3e} over {EL_TRAJECTORIES} trajectories"),
        None => writeln!(out, "Euler-Lagrange residual: unavailable (trajectory left the domain)"),
    };
    report.euler_lagrange = Some(EulerLagrange {
        trajectories: EL_TRAJECTORIES,
        residuals,
        max_residual,
        tolerance: EL_TOLERANCE,
        passed,
    });
    let mut status = verdict_status(r.verdict);
    if status == Status::Ok && !passed {
        status = if max_residual.is_none() { Status::Inconclusive } else { Status::Failed };
    }
    report.set_status(status);
    report.helmholtz = Some(h);
    Ok(report)
}

fn symbol_table(a: &SymbolArgs, cfg: ResolvedConfig, out: &mut dyn Write) -> Report {
    let mut report = Report::new("symbol-dims", cfg);
    let _ = writeln!(out, "n\tdim g1\tdim g2\tchain\tdim K\texact\tall-pass");
    let rows: Vec<_> = (1..=a.n_max as usize).map(|n| symbol_dims(n, 1)).collect();
    for d in &rows {
        let chain: Vec<String> = d.chain[1..].iter().map(ToString::to_string).collect();
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t({})\t{}\t{}\t{}",
            d.n,
            d.dim_g1,
            d.dim_g2,
            chain.join(","),
            d.dim_k,
            d.exactness.holds(),
            d.all_match()
        );
    }
    if !rows.iter().all(|d| d.all_match()) {
        report.set_status(Status::Failed);
    }
    report.symbol = Some(rows);
    report
}

fn parse_start(text: &str, n: usize) -> Result<Point, String> {
    let v: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| format!("--start: `{}`: {e}", s.trim())))
        .collect::<Result<_, _>>()?;
    if v.len() != 2 * n + 1 {
        return Err(format!("--start needs {} values (t, x, y), got {}", 2 * n + 1, v.len()));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err("--start values must be finite".into());
    }
    Ok(Point::new(v[0], v[1..=n].to_vec(), v[n + 1..].to_vec()))
}

fn geodesic(p: &ProblemFile, start: &str, cfg: ResolvedConfig, out: &mut dyn Write) -> Outcome {
    let s = p.semispray().map_err(fail(&cfg))?;
    let start = parse_start(start, p.n).map_err(fail(&cfg))?;
    if !(cfg.step.is_finite() && cfg.step > 0.0) {
        return Err(fail(&cfg)("step must be positive"));
    }
    let mut report = Report::new("geodesic", cfg.clone());
    report.n = Some(p.n);
    let tr = integrate_geodesic(&s, &start, cfg.step, cfg.steps);
    let _ = write!(out, "{}", tr.export());
    let end = tr.samples.last().map(Point::to_coords).unwrap_or_default();
    let residual = tr.consistency_residual();
    report.geodesic = Some(Geodesic {
        start: start.to_coords(),
        step: cfg.step,
        steps: cfg.steps,
        samples: tr.samples.len(),
        truncated: tr.truncated.clone(),
        end,
        consistency_residual: residual.is_finite().then_some(residual),
    });
    if tr.truncated.is_some() {
        report.set_status(Status::Failed);
    }
    Ok(report)
}

#[cfg(test)]
mod tests;
