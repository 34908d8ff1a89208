//! Command-line front end: one subcommand per reproducible curve, writing
//! sweep tables as CSV or JSON with optional SVG plots.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use strauss_core::check::{run_checks, CheckConfig, DEFAULT_DRAWS, DEFAULT_SEED};
use strauss_core::optimizer::SweepRange;
use strauss_core::phase::small_e::SMALL_E_MAX;
use strauss_core::phase::{
    boundary_curve, classify_point, e0, f_dominance_crossover, fm_curve, oe_branch, scaling_fit,
    theta1_branch, theta1_crossing, trace_vs_delta, DMode, BOUNDARY_COLUMNS,
};
use strauss_core::{NewtonOptions, SweepTable};

pub mod svg;

use svg::{emit_svg, PlotSpec, Series};

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;
pub const EXIT_IO: u8 = 4;

/// Environment variable capping the worker count; 0 means one per core.
pub const THREADS_ENV: &str = "STRAUSS_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "strauss",
    version,
    about = "Entropy-maximizing graphons below the Erdős–Rényi curve"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// F_m(e) = max F(A, B) and its gap over H''(e) along e.
    FmCurve(FmCurveArgs),
    /// Log-log slopes of A, B and the gap against e0 - e.
    Scaling(ScalingArgs),
    /// The tripodal phase boundary δ_m(e).
    Boundary(BoundaryArgs),
    /// Optimal tripodal parameters as functions of δ at fixed e.
    Trace(TraceArgs),
    /// Θ(1) against O(e) branch competition for e < 0.01.
    SmallE(SmallEArgs),
    /// The entropy-maximizing family at points (e, t) with t <= e³.
    Classify(ClassifyArgs),
    /// Identity suite: closed forms against generic functionals.
    Check(CheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Ansatz,
    Free,
}

impl From<Mode> for DMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Ansatz => DMode::Ansatz,
            Mode::Free => DMode::FreeD,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundaryMode {
    Ansatz,
    Free,
    Both,
}

#[derive(Debug, Clone, Args)]
pub struct Output {
    /// Table destination; `-` is standard output.
    #[arg(long, default_value = "-")]
    pub out: String,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Also write an SVG plot here.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct Tolerances {
    /// Newton step tolerance.
    #[arg(long)]
    pub step_tol: Option<f64>,
    /// Newton gradient tolerance.
    #[arg(long)]
    pub grad_tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Relative finite-difference step.
    #[arg(long)]
    pub fd_step: Option<f64>,
}

impl Tolerances {
    pub fn newton(&self) -> Result<NewtonOptions> {
        let mut o = NewtonOptions::default();
        o.step_tol = self.step_tol.unwrap_or(o.step_tol);
        o.grad_tol = self.grad_tol.unwrap_or(o.grad_tol);
        o.max_iter = self.max_iter.unwrap_or(o.max_iter);
        o.fd_step = self.fd_step.unwrap_or(o.fd_step);
        o.validate().map_err(|e| usage(e.to_string()))?;
        Ok(o)
    }
}

#[derive(Debug, Clone, Args)]
pub struct FmCurveArgs {
    #[arg(long, default_value_t = 0.033)]
    pub e_min: f64,
    #[arg(long, default_value_t = 0.206)]
    pub e_max: f64,
    #[arg(long, default_value_t = 0.001)]
    pub e_step: f64,
    #[command(flatten)]
    pub output: Output,
    #[command(flatten)]
    pub tol: Tolerances,
}

#[derive(Debug, Clone, Args)]
pub struct ScalingArgs {
    /// Window lower end in e0 - e.
    #[arg(long, default_value_t = 0.005)]
    pub de_min: f64,
    /// Window upper end in e0 - e.
    #[arg(long, default_value_t = 0.05)]
    pub de_max: f64,
    #[arg(long, default_value_t = 0.001)]
    pub e_step: f64,
    #[command(flatten)]
    pub output: Output,
    #[command(flatten)]
    pub tol: Tolerances,
}

#[derive(Debug, Clone, Args)]
pub struct BoundaryArgs {
    #[arg(long, value_enum, default_value_t = BoundaryMode::Free)]
    pub d_mode: BoundaryMode,
    #[arg(long, default_value_t = 0.01)]
    pub e_min: f64,
    /// Defaults to e0 = (3 - √3)/6.
    #[arg(long)]
    pub e_max: Option<f64>,
    #[arg(long, default_value_t = 0.001)]
    pub e_step: f64,
    #[command(flatten)]
    pub output: Output,
    #[command(flatten)]
    pub tol: Tolerances,
}

#[derive(Debug, Clone, Args)]
pub struct TraceArgs {
    #[arg(long, default_value_t = 0.1)]
    pub e: f64,
    #[arg(long, value_enum, default_value_t = Mode::Free)]
    pub d_mode: Mode,
    #[arg(long, default_value_t = 1e-4)]
    pub delta_step: f64,
    /// Defaults to 1.25 δ_m(e).
    #[arg(long)]
    pub delta_stop: Option<f64>,
    #[command(flatten)]
    pub output: Output,
    #[command(flatten)]
    pub tol: Tolerances,
}

#[derive(Debug, Clone, Args)]
pub struct SmallEArgs {
    #[arg(long, default_value_t = 0.0005)]
    pub e_min: f64,
    #[arg(long, default_value_t = 0.0095)]
    pub e_max: f64,
    #[arg(long, default_value_t = 0.0005)]
    pub e_step: f64,
    #[command(flatten)]
    pub output: Output,
    #[command(flatten)]
    pub tol: Tolerances,
}

#[derive(Debug, Clone, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub e: f64,
    /// Triangle densities to classify.
    #[arg(long, num_args = 1.., required_unless_present = "delta", conflicts_with = "delta")]
    pub t: Vec<f64>,
    /// Deficits δ, classified at t = e³ - δ³.
    #[arg(long, num_args = 1..)]
    pub delta: Vec<f64>,
    #[arg(long, value_enum, default_value_t = Mode::Ansatz)]
    pub d_mode: Mode,
    #[command(flatten)]
    pub output: Output,
    #[command(flatten)]
    pub tol: Tolerances,
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    /// Grid size for the Riemann oracle checks.
    #[arg(long, default_value_t = 2000)]
    pub n_grid: usize,
    #[arg(long, default_value_t = DEFAULT_DRAWS)]
    pub draws: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

/// A usage problem found after parsing.
#[derive(Debug)]
pub struct Usage(pub String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "usage error: {}", self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

/// Exit status for a failed run: usage 2, I/O 4, anything else numerical 3.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Usage>().is_some() {
        EXIT_USAGE
    } else if err.chain().any(|c| c.is::<io::Error>()) {
        EXIT_IO
    } else {
        EXIT_NUMERICAL
    }
}

/// How a run that produced output ended.
#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    Complete,
    /// Output was written but is partial; exit 3.
    Partial(String),
}

fn check_range(lo_flag: &str, lo: f64, hi_flag: &str, hi: f64, bounds: (f64, f64)) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(usage(format!("{lo_flag} and {hi_flag} must be finite")));
    }
    if lo > hi {
        return Err(usage(format!("{lo_flag} {lo} exceeds {hi_flag} {hi}")));
    }
    if !(lo > bounds.0 && hi < bounds.1) {
        return Err(usage(format!(
            "{lo_flag}..{hi_flag} must lie in ({}, {})",
            bounds.0, bounds.1
        )));
    }
    Ok(())
}

fn check_step(flag: &str, step: f64) -> Result<()> {
    if step > 0.0 && step.is_finite() {
        Ok(())
    } else {
        Err(usage(format!("{flag} must be positive, got {step}")))
    }
}

fn check_edge(flag: &str, e: f64) -> Result<()> {
    if e > 0.0 && e < 0.5 {
        Ok(())
    } else {
        Err(usage(format!("{flag} {e} outside (0, 0.5)")))
    }
}

/// Sizes the global rayon pool from `STRAUSS_THREADS`.
pub fn init_threads() -> Result<()> {
    let n = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| usage(format!("{THREADS_ENV}={v:?} is not a count")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .or_else(|e| if n == 0 { Ok(()) } else { Err(e) })
        .context("configuring worker threads")?;
    Ok(())
}

fn write_out(dest: &str, bytes: &[u8]) -> Result<()> {
    if dest == "-" {
        let mut stdout = io::stdout().lock();
        stdout
            .write_all(bytes)
            .context("writing to standard output")?;
        stdout.flush().context("writing to standard output")?;
    } else {
        fs::write(dest, bytes).with_context(|| format!("writing {dest}"))?;
    }
    Ok(())
}

fn render(table: &SweepTable, format: Format) -> Result<String> {
    Ok(match format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json()? + "\n",
    })
}

/// Writes the table, then the plot if requested; partial when `diagnostic` is set.
fn finish(
    table: &SweepTable,
    output: &Output,
    plot: impl FnOnce() -> Result<String>,
) -> Result<Status> {
    write_out(&output.out, render(table, output.format)?.as_bytes())?;
    if let Some(path) = &output.svg {
        let doc = plot()?;
        fs::write(path, doc).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(match table.metadata.get("diagnostic") {
        Some(d) => Status::Partial(d.clone()),
        None => Status::Complete,
    })
}

fn fitted(table: &SweepTable, columns: &[&str]) -> Result<Vec<Series>> {
    Ok(columns
        .iter()
        .map(|c| Series::new(0, c).fitted(table))
        .collect::<strauss_core::Result<_>>()?)
}

pub fn run(cli: Cli) -> Result<Status> {
    match cli.command {
        Command::FmCurve(a) => run_fm_curve(a),
        Command::Scaling(a) => run_scaling(a),
        Command::Boundary(a) => run_boundary(a),
        Command::Trace(a) => run_trace(a),
        Command::SmallE(a) => run_small_e(a),
        Command::Classify(a) => run_classify(a),
        Command::Check(a) => run_check(a),
    }
}

fn run_fm_curve(a: FmCurveArgs) -> Result<Status> {
    check_range("--e-min", a.e_min, "--e-max", a.e_max, (0.0, 0.5))?;
    check_step("--e-step", a.e_step)?;
    let opts = a.tol.newton()?;
    let table = fm_curve(SweepRange::new(a.e_min, a.e_max, a.e_step)?, &opts)?;
    finish(&table, &a.output, || {
        let spec = PlotSpec {
            title: "F_m(e) - H''(e) and the maximizing (A, B)".into(),
            x: "e".into(),
            series: fitted(&table, &["A", "B", "gap"])?,
            marker: (a.e_max > e0()).then(|| (e0(), "e0".to_string())),
        };
        Ok(emit_svg(&[&table], &spec)?)
    })
}

pub const SCALING_COLUMNS: [&str; 5] = ["e", "ln_de", "ln_A", "ln_B", "ln_gap"];

fn run_scaling(a: ScalingArgs) -> Result<Status> {
    if !(a.de_min > 0.0) {
        return Err(usage(format!(
            "--de-min must be positive, got {}",
            a.de_min
        )));
    }
    if a.de_min > a.de_max {
        return Err(usage(format!(
            "--de-min {} exceeds --de-max {}",
            a.de_min, a.de_max
        )));
    }
    if !(a.de_max < e0()) {
        return Err(usage(format!(
            "--de-max {} must be below e0 = {}",
            a.de_max,
            e0()
        )));
    }
    check_step("--e-step", a.e_step)?;
    let opts = a.tol.newton()?;
    let window = (e0() - a.de_max, e0() - a.de_min);
    let fm = fm_curve(SweepRange::new(window.0, window.1, a.e_step)?, &opts)?;
    let fit = scaling_fit(&fm, window)?;
    let config =
        serde_json::json!({ "window": [a.de_min, a.de_max], "e_step": a.e_step, "newton": opts })
            .to_string();
    let mut table = SweepTable::new("scaling", &SCALING_COLUMNS, &config);
    let idx: Vec<usize> = ["e", "A", "B", "gap"]
        .iter()
        .map(|c| fm.column_index(c))
        .collect::<strauss_core::Result<_>>()?;
    for r in &fm.rows {
        let e = r[idx[0]];
        table.push(vec![
            e,
            (e0() - e).ln(),
            r[idx[1]].ln(),
            r[idx[2]].ln(),
            r[idx[3]].ln(),
        ])?;
    }
    table.set_meta("slope_A", format!("{:.16e}", fit.slope_a));
    table.set_meta("slope_B", format!("{:.16e}", fit.slope_b));
    table.set_meta("slope_gap", format!("{:.16e}", fit.slope_gap));
    table.set_meta("fit_rows", fit.rows);
    if let Some(d) = fm.metadata.get("diagnostic") {
        table.set_meta("diagnostic", d);
    }
    eprintln!(
        "slopes: A {:.4}, B {:.4}, gap {:.4} over {} rows",
        fit.slope_a, fit.slope_b, fit.slope_gap, fit.rows
    );
    finish(&table, &a.output, || {
        let spec = PlotSpec {
            title: "ln A, ln B, ln(F_m - H'') against ln(e0 - e)".into(),
            x: "ln_de".into(),
            series: ["ln_A", "ln_B", "ln_gap"]
                .iter()
                .map(|c| Series::new(0, c))
                .collect(),
            marker: None,
        };
        Ok(emit_svg(&[&table], &spec)?)
    })
}

/// Both boundary tables in one, tagged by a trailing `d_mode` column (0 ANSATZ, 1 FREE_D).
fn merge_boundaries(ansatz: &SweepTable, free: &SweepTable) -> Result<SweepTable> {
    let mut columns = BOUNDARY_COLUMNS.to_vec();
    columns.push("d_mode");
    let config = serde_json::json!({ "ANSATZ": ansatz.metadata["config"], "FREE_D": free.metadata["config"] }).to_string();
    let mut merged = SweepTable::new("boundary", &columns, &config);
    merged.set_meta("d_mode", "both");
    for (code, t) in [(0.0, ansatz), (1.0, free)] {
        for r in &t.rows {
            let mut row = r.clone();
            row.push(code);
            merged.push(row)?;
        }
        for key in ["ends", "diagnostic"] {
            if let Some(v) = t.metadata.get(key) {
                let prev = merged
                    .metadata
                    .get(key)
                    .map(|p| format!("{p}; "))
                    .unwrap_or_default();
                merged.set_meta(key, format!("{prev}{}: {v}", t.metadata["d_mode"]));
            }
        }
    }
    Ok(merged)
}

fn run_boundary(a: BoundaryArgs) -> Result<Status> {
    let e_max = a.e_max.unwrap_or_else(e0);
    check_range("--e-min", a.e_min, "--e-max", e_max, (0.0, 0.5))?;
    check_step("--e-step", a.e_step)?;
    let opts = a.tol.newton()?;
    let sweep = |mode: DMode| boundary_curve((a.e_min, e_max), a.e_step, mode, &opts);
    let (table, plotted) = match a.d_mode {
        BoundaryMode::Ansatz => {
            let t = sweep(DMode::Ansatz)?;
            (t.clone(), vec![(t, "δm ANSATZ")])
        }
        BoundaryMode::Free => {
            let t = sweep(DMode::FreeD)?;
            (t.clone(), vec![(t, "δm FREE_D")])
        }
        BoundaryMode::Both => {
            let (an, fr) = rayon::join(|| sweep(DMode::Ansatz), || sweep(DMode::FreeD));
            let (an, fr) = (an?, fr?);
            (
                merge_boundaries(&an, &fr)?,
                vec![(fr, "δm FREE_D"), (an, "δm ANSATZ")],
            )
        }
    };
    finish(&table, &a.output, || {
        let tables: Vec<&SweepTable> = plotted.iter().map(|(t, _)| t).collect();
        let spec = PlotSpec {
            title: "Tripodal phase boundary δm(e)".into(),
            x: "e".into(),
            series: plotted
                .iter()
                .enumerate()
                .map(|(k, (_, l))| Series::new(k, "delta_m").labelled(l))
                .collect(),
            marker: None,
        };
        Ok(emit_svg(&tables, &spec)?)
    })
}

fn run_trace(a: TraceArgs) -> Result<Status> {
    check_edge("--e", a.e)?;
    check_step("--delta-step", a.delta_step)?;
    if let Some(stop) = a.delta_stop {
        if stop < a.delta_step {
            return Err(usage(format!(
                "--delta-stop {stop} is below --delta-step {}",
                a.delta_step
            )));
        }
    }
    let opts = a.tol.newton()?;
    let table = trace_vs_delta(a.e, a.d_mode.into(), a.delta_step, a.delta_stop, &opts)?;
    finish(&table, &a.output, || {
        let marker = table
            .metadata
            .get("boundary_delta")
            .and_then(|v| v.parse().ok())
            .map(|d| (d, "δm".to_string()));
        let spec = PlotSpec {
            title: format!("Optimal (A, B, c, D) against δ at e = {}", a.e),
            x: "delta".into(),
            series: fitted(&table, &["A", "B", "c", "D"])?,
            marker,
        };
        Ok(emit_svg(&[&table], &spec)?)
    })
}

pub const SMALL_E_COLUMNS: [&str; 5] =
    ["e", "delta_cross", "delta_cross_over_e", "F_theta1", "F_oe"];

fn run_small_e(a: SmallEArgs) -> Result<Status> {
    check_range("--e-min", a.e_min, "--e-max", a.e_max, (0.0, SMALL_E_MAX))?;
    check_step("--e-step", a.e_step)?;
    let opts = a.tol.newton()?;
    let grid = SweepRange::new(a.e_min, a.e_max, a.e_step)?.values();
    let rows: Vec<std::result::Result<Vec<f64>, String>> = grid
        .par_iter()
        .map(|&e| {
            let cross = theta1_crossing(e, &opts).map_err(|err| format!("e = {e}: {err}"))?;
            let th = theta1_branch(e, None, &opts).map_err(|err| format!("e = {e}: {err}"))?;
            let oe = oe_branch(e, None, &opts).map_err(|err| format!("e = {e}: {err}"))?;
            let d = cross.unwrap_or(f64::NAN);
            Ok(vec![e, d, d / e, th.f, oe.f])
        })
        .collect();
    let config =
        serde_json::json!({ "e_range": [a.e_min, a.e_max], "e_step": a.e_step, "newton": opts })
            .to_string();
    let mut table = SweepTable::new("small-e", &SMALL_E_COLUMNS, &config);
    let mut failures = Vec::new();
    for (e, r) in grid.iter().zip(rows) {
        match r {
            Ok(row) => table.push(row)?,
            Err(msg) => {
                failures.push(msg);
                table.push_gap(*e);
            }
        }
    }
    if let Ok(x) = f_dominance_crossover((a.e_min, a.e_max), &opts) {
        table.set_meta("f_dominance_crossover", format!("{x:.16e}"));
    }
    if !failures.is_empty() {
        table.set_meta("diagnostic", failures.join("; "));
    }
    finish(&table, &a.output, || {
        let marker = table
            .metadata
            .get("f_dominance_crossover")
            .and_then(|v| v.parse().ok())
            .map(|x| (x, "F crossover".to_string()));
        let spec = PlotSpec {
            title: "Θ(1) to O(e) crossing δ/e".into(),
            x: "e".into(),
            series: vec![Series::new(0, "delta_cross_over_e").labelled("δ/e")],
            marker,
        };
        Ok(emit_svg(&[&table], &spec)?)
    })
}

pub const CLASSIFY_COLUMNS: [&str; 13] = [
    "e",
    "t",
    "delta",
    "label",
    "entropy",
    "A",
    "B",
    "c",
    "D",
    "S_bipodal",
    "S_oe",
    "S_theta1",
    "tie",
];

fn run_classify(a: ClassifyArgs) -> Result<Status> {
    check_edge("--e", a.e)?;
    let er = a.e.powi(3);
    let ts: Vec<f64> = if a.t.is_empty() {
        a.delta
            .iter()
            .map(|&d| {
                if d >= 0.0 && d.is_finite() {
                    Ok(er - d.powi(3))
                } else {
                    Err(usage(format!("--delta {d} must be nonnegative")))
                }
            })
            .collect::<Result<_>>()?
    } else {
        a.t.clone()
    };
    if let Some(t) = ts.iter().find(|t| !(**t > 0.0 && **t <= er)) {
        return Err(usage(format!("t = {t} outside (0, e³ = {er}]")));
    }
    let opts = a.tol.newton()?;
    let mode: DMode = a.d_mode.into();
    let results: Vec<_> = ts
        .par_iter()
        .map(|&t| classify_point(a.e, t, mode, &opts))
        .collect();
    let config =
        serde_json::json!({ "e": a.e, "t": ts, "d_mode": mode, "newton": opts }).to_string();
    let mut table = SweepTable::new("classify", &CLASSIFY_COLUMNS, &config);
    table.set_meta("label_codes", "0 BIPODAL, 1 O_E, 2 THETA_1");
    for r in results {
        let c = r?;
        let p = c.params.map_or([f64::NAN; 4], |p| [p.a, p.b, p.c, p.d]);
        eprintln!(
            "e = {}, t = {:.16e}: {}{}",
            c.e,
            c.t,
            c.label,
            if c.tie { " (tie)" } else { "" }
        );
        table.push(vec![
            c.e,
            c.t,
            c.delta,
            c.label.code(),
            c.entropy,
            p[0],
            p[1],
            p[2],
            p[3],
            c.s_bipodal,
            c.s_oe,
            c.s_theta1,
            f64::from(u8::from(c.tie)),
        ])?;
    }
    finish(&table, &a.output, || {
        let spec = PlotSpec {
            title: format!("Entropy against δ at e = {}", a.e),
            x: "delta".into(),
            series: ["S_bipodal", "S_oe", "S_theta1"]
                .iter()
                .map(|c| Series::new(0, c))
                .collect(),
            marker: None,
        };
        Ok(emit_svg(&[&table], &spec)?)
    })
}

pub const CHECK_COLUMNS: [&str; 5] = ["index", "passed", "max_error", "tolerance", "cases"];

fn run_check(a: CheckArgs) -> Result<Status> {
    if a.n_grid == 0 || a.draws == 0 {
        return Err(usage("--n-grid and --draws must be positive"));
    }
    let cfg = CheckConfig {
        draws: a.draws,
        seed: a.seed,
        n_grid: a.n_grid,
    };
    let results = run_checks(&cfg);
    let config = serde_json::to_string(&cfg)?;
    let mut table = SweepTable::new("check", &CHECK_COLUMNS, &config);
    let mut failed = Vec::new();
    for (i, r) in results.iter().enumerate() {
        eprintln!(
            "{} {}: max error {:e} (tolerance {:e}, {} cases)",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.max_error,
            r.tolerance,
            r.cases
        );
        table.set_meta(&format!("check_{i:02}"), &r.name);
        table.push(vec![
            i as f64,
            f64::from(u8::from(r.passed)),
            r.max_error,
            r.tolerance,
            r.cases as f64,
        ])?;
        if !r.passed {
            failed.push(r.name.clone());
        }
    }
    if !failed.is_empty() {
        table.set_meta(
            "diagnostic",
            format!("failed checks: {}", failed.join(", ")),
        );
    }
    finish(&table, &a.output, || {
        let spec = PlotSpec {
            title: "Identity suite: error over tolerance".into(),
            x: "index".into(),
            series: vec![Series::new(0, "max_error").labelled("max error")],
            marker: None,
        };
        Ok(emit_svg(&[&table], &spec)?)
    })
}
