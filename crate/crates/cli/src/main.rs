//! `magnon` command-line front end.
//!
//! Flags take display units (Gauss, μm, GHz); everything is converted to
//! CGS once, here.

// `!(x > 0)` is deliberate: NaN must fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use magnon_core::dispersion::{dispersion_curve, width_ordering_report, CurvePoint, Engine};
use magnon_core::io::{self, ConfigDocument, RunManifest, Table};
use magnon_core::materials::{resonance_bounds, BiasField};
use magnon_core::response::sweep::DEFAULT_POINTS;
use magnon_core::response::{
    compare_shapes, field_sweep, frequency_grid, optimize_apodization, solve_modes, synthesize_response, DeviceConfig,
    GridRange,
};
use magnon_core::transducer::Shape;
use magnon_core::{Error, ErrorClass, Result};

const UM: f64 = 1e-4;
const GHZ: f64 = 1e9;

#[derive(Parser, Debug)]
#[command(name = "magnon", version, about = "YIG surface-wave cavity filter design toolkit")]
struct Cli {
    /// Worker threads for parallel evaluation (overrides MAGNON_JOBS).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dispersion curves f(k_x) for one or more width orders.
    Dispersion(DispersionArgs),
    /// Cavity mode table.
    Modes(ModesArgs),
    /// S-parameter response (CSV, optionally Touchstone).
    Response(ResponseArgs),
    /// Filter metrics across bias fields.
    Sweep(SweepArgs),
    /// Grid search over cone extents.
    Optimize(OptimizeArgs),
    /// Metrics for several transducer shapes at identical settings.
    Compare(CompareArgs),
}

#[derive(Args, Debug)]
struct DeviceArgs {
    /// Device configuration (JSON). Defaults to the fabricated device.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DispersionArgs {
    #[command(flatten)]
    device: DeviceArgs,
    /// Bias field, Gauss.
    #[arg(long)]
    h0: f64,
    /// Width orders: comma list and/or ranges, e.g. "0" or "1-5" or "1,3,5".
    #[arg(long, default_value = "0")]
    m: String,
    /// Smallest k_x, rad/cm.
    #[arg(long, default_value_t = 10.0)]
    k_min: f64,
    /// Largest k_x, rad/cm.
    #[arg(long, default_value_t = 1000.0)]
    k_max: f64,
    #[arg(long, default_value_t = 100)]
    k_steps: usize,
    /// Dispersion engine: "paper" or "de".
    #[arg(long, default_value = "de")]
    engine: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ModesArgs {
    #[command(flatten)]
    device: DeviceArgs,
    #[arg(long)]
    h0: f64,
    #[arg(long)]
    n_max: Option<u32>,
    #[arg(long)]
    m_max: Option<u32>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ResponseArgs {
    #[command(flatten)]
    device: DeviceArgs,
    #[arg(long)]
    h0: f64,
    /// Grid start, GHz. Defaults to f_min − 1.5 GHz.
    #[arg(long)]
    f_start: Option<f64>,
    /// Grid stop, GHz. Defaults to f_max + 1.5 GHz.
    #[arg(long)]
    f_stop: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_POINTS)]
    points: usize,
    #[arg(long)]
    out: PathBuf,
    /// Also write a two-port Touchstone file.
    #[arg(long)]
    touchstone: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    device: DeviceArgs,
    /// Comma-separated bias fields, Gauss.
    #[arg(long)]
    h0_list: String,
    #[arg(long, default_value_t = DEFAULT_POINTS)]
    points: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct OptimizeArgs {
    #[command(flatten)]
    device: DeviceArgs,
    #[arg(long)]
    h0: f64,
    /// Cone x-extent range start:stop:step, μm.
    #[arg(long, default_value = "40:70:5")]
    hcx: String,
    /// Cone y-extent range start:stop:step, μm.
    #[arg(long, default_value = "60:140:20")]
    hcy: String,
    #[arg(long, default_value_t = DEFAULT_POINTS)]
    points: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[command(flatten)]
    device: DeviceArgs,
    #[arg(long)]
    h0: f64,
    #[arg(long, default_value = "straight,half_cone,full_cone,extended_cone")]
    shapes: String,
    #[arg(long, default_value_t = DEFAULT_POINTS)]
    points: usize,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads(cli.jobs) {
        return fail(&e);
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(exit_code(e.class()))
}

fn exit_code(class: ErrorClass) -> u8 {
    match class {
        ErrorClass::Validation => 3,
        ErrorClass::Numerical => 4,
        ErrorClass::Io => 5,
    }
}

fn configure_threads(flag: Option<usize>) -> Result<()> {
    let jobs = match flag {
        Some(j) => Some(j),
        None => match std::env::var("MAGNON_JOBS") {
            Ok(v) => Some(
                v.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Validation(format!("MAGNON_JOBS must be a positive integer, got '{v}'")))?,
            ),
            Err(_) => None,
        },
    };
    if let Some(j) = jobs {
        if j == 0 {
            return Err(Error::Validation("jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| Error::Validation(e.to_string()))?;
    }
    Ok(())
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Dispersion(a) => dispersion(a),
        Command::Modes(a) => modes(a),
        Command::Response(a) => response(a),
        Command::Sweep(a) => sweep(a),
        Command::Optimize(a) => optimize(a),
        Command::Compare(a) => compare(a),
    }
}

fn load(device: &DeviceArgs) -> Result<DeviceConfig<f64>> {
    match &device.config {
        Some(path) => io::parse_device_config(path),
        None => Ok(DeviceConfig::default()),
    }
}

fn config_value(cfg: &DeviceConfig<f64>) -> Value {
    serde_json::to_value(ConfigDocument::from_config(cfg)).expect("config serializes")
}

fn finish(command: &str, cfg: &DeviceConfig<f64>, display: Value, internal: Value, table: &Table, out: &Path) -> Result<()> {
    io::export_csv(table, out)?;
    RunManifest::new(command, config_value(cfg), display, internal).write_for(out)?;
    println!("wrote {} ({} rows)", out.display(), table.rows.len());
    Ok(())
}

/// "1-5", "1,3,5" or mixtures such as "0,2-4".
fn parse_orders(text: &str) -> Result<Vec<u32>> {
    let bad = || Error::Validation(format!("invalid width-order list '{text}'"));
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim) {
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (u32, u32) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
                if b < a {
                    return Err(bad());
                }
                out.extend(a..=b);
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Validation(format!("invalid number '{}' in list", t.trim())))
        })
        .collect()
}

/// "start:stop:step" in μm, returned in cm.
fn parse_range_um(text: &str) -> Result<GridRange<f64>> {
    let parts = parse_list(&text.replace(':', ","))?;
    match parts.as_slice() {
        [start, stop, step] => Ok(GridRange {
            start: start * UM,
            stop: stop * UM,
            step: step * UM,
        }),
        [value] => Ok(GridRange::single(value * UM)),
        _ => Err(Error::Validation(format!("range '{text}' must be start:stop:step"))),
    }
}

fn dispersion(a: DispersionArgs) -> Result<()> {
    let cfg = load(&a.device)?;
    let bias = BiasField::new(a.h0)?;
    let engine: Engine = a.engine.parse()?;
    let orders = parse_orders(&a.m)?;
    if a.k_steps < 2 || !(a.k_max > a.k_min) || !(a.k_min >= 0.0) {
        return Err(Error::Validation("need 0 <= k_min < k_max and k_steps >= 2".into()));
    }
    let k_grid: Vec<f64> = (0..a.k_steps)
        .map(|i| a.k_min + (a.k_max - a.k_min) * i as f64 / (a.k_steps - 1) as f64)
        .collect();
    let mut points: Vec<CurvePoint<f64>> = Vec::new();
    for &m in &orders {
        points.extend(dispersion_curve(&cfg.film, &bias, m, &k_grid, engine)?);
    }
    let gaps = points.iter().filter(|p| p.point().is_none()).count();
    if gaps > 0 {
        eprintln!("note: {gaps} grid points have no solution and are written with an empty f_hz");
    }
    let width_orders: Vec<u32> = orders.iter().copied().filter(|&m| m >= 1).collect();
    if engine == Engine::Paper && width_orders.len() >= 2 {
        let report = width_ordering_report(&cfg.film, &bias, &[100.0, 300.0, 600.0], *width_orders.last().unwrap());
        eprintln!("{}", report.render());
    }
    let display = json!({"h0_gauss": a.h0, "m": a.m, "k_min_rad_per_cm": a.k_min, "k_max_rad_per_cm": a.k_max,
        "k_steps": a.k_steps, "engine": engine.as_str()});
    let internal = json!({"h0": a.h0, "m": orders, "k_grid_len": k_grid.len(), "k_min": a.k_min, "k_max": a.k_max,
        "engine": engine.as_str()});
    finish("dispersion", &cfg, display, internal, &io::tables::dispersion_table(&points), &a.out)
}

fn modes(a: ModesArgs) -> Result<()> {
    let mut cfg = load(&a.device)?;
    if let Some(n) = a.n_max {
        cfg.solver.n_max = n;
    }
    if let Some(m) = a.m_max {
        cfg.solver.m_max = m;
    }
    let bias = BiasField::new(a.h0)?;
    let modes = solve_modes(&cfg, &bias)?;
    let failed = modes.iter().filter(|m| !m.is_solved()).count();
    if failed > 0 {
        eprintln!("note: {failed} modes have no in-band solution");
    }
    let display = json!({"h0_gauss": a.h0, "n_max": cfg.solver.n_max, "m_max": cfg.solver.m_max});
    finish("modes", &cfg, display.clone(), display, &io::tables::modes_table(&modes), &a.out)
}

fn response(a: ResponseArgs) -> Result<()> {
    let cfg = load(&a.device)?;
    let bias = BiasField::new(a.h0)?;
    let edges = resonance_bounds(&cfg.film, &bias)?;
    let default_grid = frequency_grid(edges, a.points)?;
    let start = a.f_start.map(|f| f * GHZ).unwrap_or(default_grid[0]);
    let stop = a.f_stop.map(|f| f * GHZ).unwrap_or(*default_grid.last().unwrap());
    if a.points < 2 || !(stop > start) || !(start > 0.0) {
        return Err(Error::Validation("need 0 < f_start < f_stop and points >= 2".into()));
    }
    let grid: Vec<f64> = (0..a.points)
        .map(|i| start + (stop - start) * i as f64 / (a.points - 1) as f64)
        .collect();
    let r = synthesize_response(&cfg, &bias, &grid)?;
    let display = json!({"h0_gauss": a.h0, "f_start_ghz": a.f_start, "f_stop_ghz": a.f_stop, "points": a.points});
    let internal = json!({"h0": a.h0, "f_start_hz": start, "f_stop_hz": stop, "points": a.points});
    if let Some(ts) = &a.touchstone {
        io::export_touchstone(&r, cfg.port_impedance, ts)?;
        RunManifest::new("response", config_value(&cfg), display.clone(), internal.clone()).write_for(ts)?;
        println!("wrote {}", ts.display());
    }
    finish("response", &cfg, display, internal, &io::tables::response_table(&r), &a.out)
}

fn sweep(a: SweepArgs) -> Result<()> {
    let cfg = load(&a.device)?;
    let fields = parse_list(&a.h0_list)?;
    let rows = field_sweep(&cfg, &fields, a.points)?;
    for row in &rows {
        if let Err(e) = &row.outcome {
            eprintln!("note: h0 = {} G failed: {e}", row.h0);
        }
    }
    let display = json!({"h0_list_gauss": a.h0_list, "points": a.points});
    let internal = json!({"h0_list": fields, "points": a.points});
    finish("sweep", &cfg, display, internal, &io::tables::sweep_table(&rows), &a.out)
}

fn optimize(a: OptimizeArgs) -> Result<()> {
    let cfg = load(&a.device)?;
    let bias = BiasField::new(a.h0)?;
    let (rx, ry) = (parse_range_um(&a.hcx)?, parse_range_um(&a.hcy)?);
    let (xs, ys) = (rx.values()?, ry.values()?);
    let result = optimize_apodization(&cfg, &bias, &xs, &ys, a.points)?;
    println!(
        "best: hc_x = {:.3} um, hc_y = {:.3} um, score = {:.3} dB",
        result.best.hc_x / UM,
        result.best.hc_y / UM,
        result.best_score
    );
    let display = json!({"h0_gauss": a.h0, "hcx_um": a.hcx, "hcy_um": a.hcy, "points": a.points});
    let internal = json!({"h0": a.h0, "hc_x_cm": xs, "hc_y_cm": ys, "points": a.points});
    finish("optimize", &cfg, display, internal, &io::tables::score_table(&result.table), &a.out)
}

fn compare(a: CompareArgs) -> Result<()> {
    let cfg = load(&a.device)?;
    let bias = BiasField::new(a.h0)?;
    let shapes = a
        .shapes
        .split(',')
        .map(|s| s.trim().parse::<Shape>())
        .collect::<Result<Vec<_>>>()?;
    let rows = compare_shapes(&cfg, &bias, &shapes, a.points)?;
    let display = json!({"h0_gauss": a.h0, "shapes": a.shapes, "points": a.points});
    let internal = json!({"h0": a.h0, "shapes": shapes.iter().map(|s| s.as_str()).collect::<Vec<_>>(), "points": a.points});
    finish("compare", &cfg, display, internal, &io::tables::compare_table(&rows), &a.out)
}
