//! `rznk`: command-line front end for Reznick-type certificates, designs and de Finetti tables.

mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context as _};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use report::{emit_csv, emit_json, Context, Mode};
use rznk::certify::{
    bound_n_complex, bound_n_real, build_certificate, build_certificate_real, eps_grid, motzkin_figure, CertBundle,
    CertOptions, RealCertBundle, DEFAULT_N_MAX, EIG_CLIP, POSITIVITY_TOL, RESIDUAL_TOL,
};
use rznk::chiribella::{coeff_c_real, coeff_q_real, CoeffTable};
use rznk::combinat::real_dim_const;
use rznk::definetti::{definetti_report, definetti_report_real, definetti_sweep, DeFinettiGrid};
use rznk::designs::{
    cached_design, default_cache_dir, verify_design, verify_hilbert_complex, verify_hilbert_complex_mc,
    verify_hilbert_real, wick_check, SphericalDesign,
};
use rznk::io::{decimal, CoeffTableJson, Poly, PolyJson};
use rznk::sampling::DEFAULT_SEED;
use rznk::scalar::fmt_ratio;
use rznk::symspace::ExtremaOptions;

#[derive(Parser, Debug)]
#[command(name = "rznk", version, about = "Reznick-type sum-of-squares certificates, spherical designs and de Finetti bounds")]
struct Cli {
    /// Seed for every randomized check.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Arithmetic for complex certificates; every other computation is exact where the quantity is rational.
    #[arg(long, global = true, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build and check a certificate for a strictly positive polynomial.
    Certify(CertifyArgs),
    /// Sufficient degrees n from the closed-form and numeric bounds.
    Bounds(BoundsArgs),
    /// Write the Laguerre spherical design for (d, degree).
    Design(DesignArgs),
    /// Check the defining identity of a design file.
    VerifyDesign(VerifyDesignArgs),
    /// Exact coefficient families c, q, q̂ (or c_R, q_R).
    Coeffs(CoeffsArgs),
    /// de Finetti truncation error for one parameter tuple.
    Definetti(DefinettiArgs),
    /// de Finetti truncation errors over a grid, as CSV.
    DefinettiSweep(SweepArgs),
    /// Bound curves for the shifted Motzkin family, as CSV.
    Motzkin(MotzkinArgs),
    /// Monte Carlo check of the Gaussian moment formulas.
    Wick(WickArgs),
    /// Check the Hilbert identity ‖x‖^{2n} = c ∫ |⟨x,v⟩|^{2n} dv.
    Hilbert(HilbertArgs),
}

#[derive(Args, Debug)]
struct CertifyArgs {
    #[arg(long)]
    input: PathBuf,
    /// `auto` or an explicit degree.
    #[arg(long, default_value = "auto")]
    n: String,
    /// Minimum of the form on the unit sphere(s); estimated when omitted.
    #[arg(long, allow_negative_numbers = true)]
    m: Option<f64>,
    /// Maximum of the form on the unit sphere(s); estimated when omitted.
    #[arg(long = "M", allow_negative_numbers = true)]
    big_m: Option<f64>,
    /// Design of degree at least n + k; otherwise the cached or freshly built Laguerre design.
    #[arg(long)]
    design: Option<PathBuf>,
    /// Fail when the design is neither given nor present in RZNK_CACHE_DIR.
    #[arg(long)]
    require_cached_design: bool,
    #[arg(long, default_value_t = 10_000)]
    extrema_samples: usize,
    #[arg(long, default_value_t = DEFAULT_N_MAX)]
    n_max: usize,
    #[arg(long, default_value_t = 100)]
    check_points: usize,
    #[arg(long, default_value_t = 2000)]
    extra_samples: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, allow_negative_numbers = true)]
    m: f64,
    #[arg(long = "M", allow_negative_numbers = true)]
    big_m: f64,
    #[arg(long)]
    real: bool,
    #[arg(long, default_value_t = DEFAULT_N_MAX)]
    n_max: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DesignArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    degree: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyDesignArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CoeffsArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    real: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DefinettiArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    r: usize,
    #[arg(long)]
    real: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    grid: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MotzkinArgs {
    #[arg(long, default_value_t = 0.01)]
    eps_min: f64,
    #[arg(long, default_value_t = 0.5)]
    eps_max: f64,
    #[arg(long, default_value_t = 50)]
    eps_steps: usize,
    /// Largest n for the coefficient thresholds ε_n.
    #[arg(long, default_value_t = 40)]
    n_max: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct WickArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct HilbertArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    real: bool,
    /// Monte Carlo samples; 0 selects the design (complex) or exact moment (real) route.
    #[arg(long, default_value_t = 0)]
    samples: usize,
    #[arg(long, default_value_t = 20)]
    points: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Certificate for either field, tagged by `field`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "field", rename_all = "lowercase")]
enum CertResult {
    Complex(CertBundle),
    Real(RealCertBundle),
}

/// Real coefficient families with the dimension ratios `d_R[n+k]/d_R[n+t]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct RealCoeffTableJson {
    d: usize,
    k: usize,
    n: usize,
    c_real: Vec<String>,
    q_real: Vec<String>,
    dim_ratio: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct CsvSummary {
    rows: usize,
    columns: Vec<String>,
    out: Option<PathBuf>,
}

enum Outcome {
    Pass,
    Fail,
}

fn outcome(pass: bool) -> Outcome {
    if pass {
        Outcome::Pass
    } else {
        Outcome::Fail
    }
}

fn read_bytes(path: &Path) -> anyhow::Result<Vec<u8>> {
    std::fs::read(path).with_context(|| format!("reading {}", path.display()))
}

fn certify(cli: &Cli, a: &CertifyArgs) -> anyhow::Result<Outcome> {
    let bytes = read_bytes(&a.input)?;
    let poly_json: PolyJson = serde_json::from_slice(&bytes).with_context(|| format!("parsing {}", a.input.display()))?;
    let poly = poly_json.to_poly()?;
    let n = match a.n.as_str() {
        "auto" => None,
        s => Some(s.parse::<usize>().with_context(|| format!("--n must be `auto` or an integer, got {s:?}"))?),
    };
    let opts = CertOptions {
        n,
        m: a.m,
        big_m: a.big_m,
        extrema: ExtremaOptions { samples: a.extrema_samples, seed: cli.seed, ..Default::default() },
        n_max: a.n_max,
        check_points: a.check_points,
        extra_samples: a.extra_samples,
        require_cached_design: a.require_cached_design,
        seed: cli.seed,
    };
    let design = a.design.as_deref().map(SphericalDesign::read).transpose()?;
    let result = match poly {
        Poly::Complex(form) => CertResult::Complex(match cli.mode {
            Mode::Exact => build_certificate(&form, &opts, design.as_ref())?,
            Mode::Float => build_certificate(&form.to_c64(), &opts, design.as_ref())?,
        }),
        Poly::Real(p) => {
            if cli.mode == Mode::Float {
                bail!("real certificates are computed in exact arithmetic only; drop --mode float");
            }
            if design.is_some() {
                bail!("--design applies to complex inputs only");
            }
            CertResult::Real(build_certificate_real(&p, &opts)?)
        }
    };
    let pass = match &result {
        CertResult::Complex(c) => c.pass,
        CertResult::Real(c) => c.pass,
    };
    let params = json!({
        "input": a.input, "n": a.n, "m": a.m, "M": a.big_m, "design": a.design,
        "require_cached_design": a.require_cached_design, "extrema_samples": a.extrema_samples,
        "n_max": a.n_max, "check_points": a.check_points, "extra_samples": a.extra_samples,
    });
    let ctx = Context::new("certify", cli.seed, cli.mode, params, Some(&bytes));
    let tol = [("eig_clip", EIG_CLIP), ("positivity", POSITIVITY_TOL), ("residual", RESIDUAL_TOL)];
    emit_json(&ctx.report(&tol, result), a.out.as_deref())?;
    Ok(outcome(pass))
}

fn bounds(cli: &Cli, a: &BoundsArgs) -> anyhow::Result<Outcome> {
    let report = if a.real {
        bound_n_real(a.d, a.k, a.m, a.big_m, a.n_max)?
    } else {
        bound_n_complex(a.d, a.k, a.m, a.big_m, a.n_max)?
    };
    let params = json!({"d": a.d, "k": a.k, "m": a.m, "M": a.big_m, "real": a.real, "n_max": a.n_max});
    let ctx = Context::new("bounds", cli.seed, cli.mode, params, None);
    emit_json(&ctx.report(&[], report), a.out.as_deref())?;
    Ok(Outcome::Pass)
}

fn design(a: &DesignArgs) -> anyhow::Result<Outcome> {
    let design = cached_design(default_cache_dir().as_deref(), a.d, a.degree)?;
    emit_json(&design, a.out.as_deref())?;
    Ok(Outcome::Pass)
}

fn verify_design_cmd(cli: &Cli, a: &VerifyDesignArgs) -> anyhow::Result<Outcome> {
    let bytes = read_bytes(&a.input)?;
    let design: SphericalDesign = serde_json::from_slice(&bytes).with_context(|| format!("parsing {}", a.input.display()))?;
    let report = verify_design(&design, a.tol, cli.seed)?;
    let pass = report.pass;
    let ctx = Context::new("verify-design", cli.seed, cli.mode, json!({"in": a.input, "tol": a.tol}), Some(&bytes));
    emit_json(&ctx.report(&[("frobenius", a.tol)], report), a.out.as_deref())?;
    Ok(outcome(pass))
}

fn coeffs(cli: &Cli, a: &CoeffsArgs) -> anyhow::Result<Outcome> {
    let params = json!({"d": a.d, "k": a.k, "n": a.n, "real": a.real});
    let ctx = Context::new("coeffs", cli.seed, cli.mode, params, None);
    if a.real {
        if a.d == 0 || a.k > a.n {
            bail!("coefficient table needs d >= 1 and n >= k, got d = {}, k = {}, n = {}", a.d, a.k, a.n);
        }
        let fracs = |f: &dyn Fn(usize) -> rznk::Result<rznk::Rational>| -> anyhow::Result<Vec<String>> {
            (0..=a.k).map(|t| Ok(fmt_ratio(&f(t)?))).collect()
        };
        let table = RealCoeffTableJson {
            d: a.d,
            k: a.k,
            n: a.n,
            c_real: fracs(&|s| coeff_c_real(a.n, a.k, s))?,
            q_real: fracs(&|t| coeff_q_real(a.n, a.k, t, a.d))?,
            dim_ratio: fracs(&|t| Ok(real_dim_const(a.d, a.n + a.k) / real_dim_const(a.d, a.n + t)))?,
        };
        emit_json(&ctx.report(&[], table), a.out.as_deref())?;
    } else {
        let table = CoeffTable::new(a.d, a.k, a.n)?;
        emit_json(&ctx.report(&[], CoeffTableJson::from(&table)), a.out.as_deref())?;
    }
    Ok(Outcome::Pass)
}

fn definetti(cli: &Cli, a: &DefinettiArgs) -> anyhow::Result<Outcome> {
    let report = if a.real {
        definetti_report_real(a.d, a.k, a.n, a.r)?
    } else {
        definetti_report(a.d, a.k, a.n, a.r)?
    };
    let pass = report.bound_holds();
    let params = json!({"d": a.d, "k": a.k, "n": a.n, "r": a.r, "real": a.real});
    let ctx = Context::new("definetti", cli.seed, cli.mode, params, None);
    emit_json(&ctx.report(&[], report), a.out.as_deref())?;
    Ok(outcome(pass))
}

fn emit_summary(ctx: &Context, header: &[&str], rows: usize, out: Option<&Path>) -> anyhow::Result<()> {
    if let Some(path) = out {
        let summary = CsvSummary { rows, columns: header.iter().map(|s| s.to_string()).collect(), out: Some(path.to_path_buf()) };
        emit_json(&ctx.report(&[], summary), None)?;
    }
    Ok(())
}

fn definetti_sweep_cmd(cli: &Cli, a: &SweepArgs) -> anyhow::Result<Outcome> {
    let bytes = read_bytes(&a.grid)?;
    let grid: DeFinettiGrid = serde_json::from_slice(&bytes).with_context(|| format!("parsing {}", a.grid.display()))?;
    let reports = definetti_sweep(&grid)?;
    let header = ["d", "k", "n", "r", "delta", "eps_exact", "eps_bound", "feasible"];
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            vec![
                r.d.to_string(),
                r.k.to_string(),
                r.n.to_string(),
                r.r.to_string(),
                fmt_ratio(&r.delta),
                fmt_ratio(&r.eps_exact),
                r.eps_bound.as_ref().map(fmt_ratio).unwrap_or_default(),
                r.feasible.to_string(),
            ]
        })
        .collect();
    emit_csv(&header, &rows, a.out.as_deref())?;
    let ctx = Context::new("definetti-sweep", cli.seed, cli.mode, json!({"grid": a.grid}), Some(&bytes));
    emit_summary(&ctx, &header, rows.len(), a.out.as_deref())?;
    Ok(outcome(reports.iter().all(|r| r.bound_holds())))
}

fn motzkin(cli: &Cli, a: &MotzkinArgs) -> anyhow::Result<Outcome> {
    if !(a.eps_min > 0.0 && a.eps_max >= a.eps_min) {
        bail!("need 0 < eps-min <= eps-max, got {} and {}", a.eps_min, a.eps_max);
    }
    let rows = motzkin_figure(&eps_grid(a.eps_min, a.eps_max, a.eps_steps), a.n_max)?;
    let header = ["eps", "m", "M", "bound_general", "bound_improved", "bound_reznick", "numeric", "coefficient_n"];
    let opt = |v: Option<usize>| v.map(|v| v.to_string()).unwrap_or_default();
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                decimal::format(r.eps),
                decimal::format(r.m),
                decimal::format(r.big_m),
                r.bound_general.to_string(),
                r.bound_improved.to_string(),
                r.bound_reznick.to_string(),
                opt(r.numeric),
                opt(r.coefficient_n),
            ]
        })
        .collect();
    emit_csv(&header, &table, a.out.as_deref())?;
    let params = json!({"eps_min": a.eps_min, "eps_max": a.eps_max, "eps_steps": a.eps_steps, "n_max": a.n_max});
    let ctx = Context::new("motzkin", cli.seed, cli.mode, params, None);
    emit_summary(&ctx, &header, table.len(), a.out.as_deref())?;
    Ok(Outcome::Pass)
}

fn wick(cli: &Cli, a: &WickArgs) -> anyhow::Result<Outcome> {
    let report = wick_check(a.d, a.n, a.samples, cli.seed)?;
    let pass = report.pass;
    let ctx = Context::new("wick", cli.seed, cli.mode, json!({"d": a.d, "n": a.n, "samples": a.samples}), None);
    emit_json(&ctx.report(&[("sigma", 4.0)], report), a.out.as_deref())?;
    Ok(outcome(pass))
}

fn hilbert(cli: &Cli, a: &HilbertArgs) -> anyhow::Result<Outcome> {
    let (report, tol) = match (a.real, a.samples) {
        (true, 0) => (verify_hilbert_real(a.d, a.n, 0, a.points, cli.seed)?, ("residual", 1e-10)),
        (true, s) => (verify_hilbert_real(a.d, a.n, s, a.points, cli.seed)?, ("sigma", 4.0)),
        (false, 0) => {
            let design = cached_design(default_cache_dir().as_deref(), a.d, a.n)?;
            (verify_hilbert_complex(a.d, a.n, &design, a.points, cli.seed)?, ("residual", 1e-9))
        }
        (false, s) => (verify_hilbert_complex_mc(a.d, a.n, s, a.points, cli.seed)?, ("sigma", 4.0)),
    };
    let pass = report.pass;
    let params = json!({"d": a.d, "n": a.n, "real": a.real, "samples": a.samples, "points": a.points});
    let ctx = Context::new("hilbert", cli.seed, cli.mode, params, None);
    emit_json(&ctx.report(&[tol], report), a.out.as_deref())?;
    Ok(outcome(pass))
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    match &cli.command {
        Command::Certify(a) => certify(cli, a),
        Command::Bounds(a) => bounds(cli, a),
        Command::Design(a) => design(a),
        Command::VerifyDesign(a) => verify_design_cmd(cli, a),
        Command::Coeffs(a) => coeffs(cli, a),
        Command::Definetti(a) => definetti(cli, a),
        Command::DefinettiSweep(a) => definetti_sweep_cmd(cli, a),
        Command::Motzkin(a) => motzkin(cli, a),
        Command::Wick(a) => wick(cli, a),
        Command::Hilbert(a) => hilbert(cli, a),
    }
}

fn configure_threads() -> anyhow::Result<()> {
    if let Some(v) = std::env::var_os("RZNK_THREADS") {
        let text = v.to_string_lossy();
        let threads: usize = text.parse().with_context(|| format!("RZNK_THREADS must be a positive integer, got {text:?}"))?;
        if threads == 0 {
            bail!("RZNK_THREADS must be a positive integer, got 0");
        }
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(1);
    }
    match run(&cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => {
            eprintln!("verification FAILED");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
