//! Command-line interface: `estimate`, `isotropic`, `simulate` and `bench`.
//!
//! Exit codes: 0 on success, 2 for input, parse and configuration errors,
//! 3 for numerical failures.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::bench::{run_study, StudyConfig};
use crate::error::{Error, Result};
use crate::estimate::{radial_nodes, SpectralEstimate};
use crate::grid::WavenumberGrid;
use crate::io;
use crate::isotropic::{debiased_isotropic, diggle_estimator, PairTaper};
use crate::models::{window_for_n, Model};
use crate::pattern::PointPattern;
use crate::smoothing::{
    bandwidth_radius, bandwidth_select, curvature_estimate, kernel_smooth, multitaper_with, rotational_average,
    SmoothingKernel,
};
use crate::spectral::{subtracted_periodogram, DftPlan};
use crate::tapers::Taper;
use crate::window::CuboidWindow;

#[derive(Debug, Parser)]
#[command(name = "pointspec", version, about = "Spectral estimation for spatial point patterns")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spectral estimate of a pattern on a wavenumber grid.
    Estimate(EstimateArgs),
    /// Isotropic (radial) spectral estimate.
    Isotropic(IsotropicArgs),
    /// Simulate a point pattern from a model.
    Simulate(SimulateArgs),
    /// Run a Monte-Carlo study from a config file.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Point CSV with header `x1,...,xd`.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Window bounds `a1,b1,a2,b2[,a3,b3]`.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "window_file")]
    pub window: Option<String>,
    /// Window sidecar file with `lower` and `upper` rows.
    #[arg(long)]
    pub window_file: Option<PathBuf>,
}

impl InputArgs {
    fn load(&self) -> Result<PointPattern> {
        let window = match (&self.window, &self.window_file) {
            (Some(w), _) => CuboidWindow::parse(w)?,
            (None, Some(p)) => io::read_window_file(p)?,
            (None, None) => return Err(Error::Parse("a window is required (--window or --window-file)".into())),
        };
        let (pattern, dropped) = io::read_pattern_file(&self.input, &window)?;
        if dropped > 0 {
            eprintln!("dropped {dropped} points outside the window");
        }
        if pattern.is_empty() {
            return Err(Error::NoPoints);
        }
        Ok(pattern)
    }
}

/// Pipeline settings of the `estimate` subcommand.
#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// `periodogram`, `debiased`, `subtracted` or `multitaper`.
    #[arg(long, default_value = "debiased")]
    pub estimator: String,
    /// `box`, `sine:p1,p2[,p3]` or `hermite:a`.
    #[arg(long, default_value = "box")]
    pub taper: String,
    /// `regular:step,extent` or `fourier:M`.
    #[arg(long, default_value = "regular:0.006,0.3")]
    pub grid: String,
    /// Multitaper with `P^d` sine tapers.
    #[arg(long = "mt-P")]
    pub mt_p: Option<u32>,
    /// Smooth with an `m^d` Gaussian template.
    #[arg(long = "smooth-m", conflicts_with = "auto_bandwidth")]
    pub smooth_m: Option<usize>,
    /// Smooth with a box kernel whose radius is chosen from the estimated curvature.
    #[arg(long)]
    pub auto_bandwidth: bool,
    /// Also write a rotational average with this kernel radius on t = 0.003..0.300.
    #[arg(long = "rot-avg")]
    pub rot_avg: Option<f64>,
    /// Output grid CSV.
    #[arg(long)]
    pub out: PathBuf,
    /// Radial CSV path (default: `<out stem>_radial.csv`).
    #[arg(long)]
    pub radial_out: Option<PathBuf>,
    /// Optional heatmap PNG of a 2D estimate.
    #[arg(long)]
    pub png: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct IsotropicArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Pair taper: `none` or `hermite[:a]`.
    #[arg(long, default_value = "none")]
    pub taper: String,
    /// Rotation-averaged periodogram truncated at its first local minimum.
    #[arg(long)]
    pub diggle: bool,
    /// Radial nodes `start,step,count`.
    #[arg(long, default_value = "0.003,0.003,100")]
    pub t: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Variant (`poisson`, `thomas:ms`, `thomas:fl`, `matern:r2`, `matern:r5`) or
    /// `thomas:kappa,sigma,mu`, `matern:lambda_p,radius`.
    #[arg(long)]
    pub model: String,
    /// Intensity of a Poisson model.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Expected number of points; sets a centered square window.
    #[arg(long, conflicts_with = "window")]
    pub n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub window: Option<String>,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Study config (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Override the number of replications.
    #[arg(long)]
    pub reps: Option<usize>,
    /// Output directory.
    #[arg(long, default_value = "bench-out")]
    pub out: PathBuf,
    /// Write heatmaps of per-cell mean estimates.
    #[arg(long)]
    pub heatmaps: bool,
}

/// Parse arguments, run, and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        3
    } else {
        2
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Estimate(a) => cmd_estimate(&a),
        Command::Isotropic(a) => cmd_isotropic(&a),
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Bench(a) => cmd_bench(&a),
    }
}

/// `regular:step,extent` or `fourier:M` (zero excluded).
pub fn parse_grid(spec: &str, window: &CuboidWindow) -> Result<WavenumberGrid> {
    let d = window.dim();
    let nums = |s: &str| -> Result<Vec<f64>> {
        s.split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad grid spec `{spec}`"))))
            .collect()
    };
    if let Some(rest) = spec.strip_prefix("regular:") {
        let v = nums(rest)?;
        if v.len() == 2 {
            return WavenumberGrid::regular_square(d, v[0], v[1], true);
        }
    } else if let Some(rest) = spec.strip_prefix("fourier:") {
        let m: usize = rest.trim().parse().map_err(|_| Error::Parse(format!("bad grid spec `{spec}`")))?;
        return WavenumberGrid::fourier(window, &vec![m; d], true);
    }
    Err(Error::Parse(format!("unknown grid spec `{spec}`")))
}

fn default_sibling(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}{suffix}"))
}

/// Run the estimation pipeline of `estimate` without touching the file system.
pub fn estimate_pipeline(pattern: &PointPattern, args: &EstimateArgs) -> Result<SpectralEstimate> {
    let window = pattern.window();
    let grid = Arc::new(parse_grid(&args.grid, window)?);
    let estimator = if args.mt_p.is_some() { "multitaper" } else { args.estimator.as_str() };
    let mut est = match estimator {
        "multitaper" => {
            let p = args.mt_p.unwrap_or(3);
            let plan = DftPlan::new(pattern, &grid)?;
            multitaper_with(&plan, &Taper::sine_family(window, p)?)?
        }
        "periodogram" | "debiased" | "subtracted" => {
            let taper = Taper::parse(&args.taper, window)?;
            match estimator {
                "periodogram" => DftPlan::new(pattern, &grid)?.periodogram(&taper)?,
                "debiased" => DftPlan::new(pattern, &grid)?.debiased_periodogram(&taper)?,
                _ => subtracted_periodogram(pattern, &taper, &grid)?,
            }
        }
        other => return Err(Error::Parse(format!("unknown estimator `{other}`"))),
    };
    if let Some(m) = args.smooth_m {
        est = kernel_smooth(&est, &SmoothingKernel::gaussian_template(m)?)?;
    } else if args.auto_bandwidth {
        let lam = pattern.intensity_hat();
        let c = curvature_estimate(&est, lam)?;
        let sigma = bandwidth_select(lam, c, pattern.dim())?;
        let radius = bandwidth_radius(sigma, window.min_side());
        log::info!("auto bandwidth: sigma = {sigma}, radius = {radius}");
        est = kernel_smooth(&est, &SmoothingKernel::boxcar(vec![radius; pattern.dim()])?)?;
    }
    Ok(est)
}

fn cmd_estimate(args: &EstimateArgs) -> Result<()> {
    let pattern = args.input.load()?;
    let est = estimate_pipeline(&pattern, args)?;
    io::write_grid_file(&args.out, &est)?;
    let mut meta = json!({
        "estimate": est.meta,
        "grid": est.grid.provenance(),
        "window": pattern.window(),
        "points": pattern.len(),
        "nodes": est.len(),
    });
    if let Some(radius) = args.rot_avg {
        let radial = rotational_average(&est, &radial_nodes(0.003, 0.003, 100), radius)?;
        let path = args.radial_out.clone().unwrap_or_else(|| default_sibling(&args.out, "_radial.csv"));
        io::write_radial_file(&path, &radial)?;
        meta["radial"] = json!({ "path": path, "kernel_radius": radius });
    }
    if let Some(png) = &args.png {
        let range = io::write_heatmap_file(png, &est)?;
        meta["png"] = json!({ "path": png, "min": range.min, "max": range.max });
    }
    io::write_json(&default_sibling(&args.out, ".json"), &meta)
}

fn parse_t_nodes(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(',').collect();
    let bad = || Error::Parse(format!("bad radial node spec `{spec}`"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let step: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if !(start > 0.0 && step > 0.0 && count > 0) {
        return Err(bad());
    }
    Ok(radial_nodes(start, step, count))
}

fn cmd_isotropic(args: &IsotropicArgs) -> Result<()> {
    let pattern = args.input.load()?;
    let t = parse_t_nodes(&args.t)?;
    let radial = if args.diggle {
        diggle_estimator(&pattern, &t)?
    } else {
        let taper = PairTaper::parse(&args.taper, pattern.window())?;
        debiased_isotropic(&pattern, &taper, &t)?
    };
    let mut plain = radial.clone();
    plain.counts = None;
    io::write_radial_file(&args.out, &plain)?;
    io::write_json(
        &default_sibling(&args.out, ".json"),
        &json!({ "radial": radial.meta, "window": pattern.window(), "points": pattern.len() }),
    )
}

fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let mut model = Model::parse(&args.model)?;
    if let Some(lam) = args.lambda {
        if model.name != "poisson" {
            return Err(Error::Parse("--lambda applies to the poisson model only".into()));
        }
        model = Model::poisson(lam)?;
    }
    let window = match (&args.window, args.n) {
        (Some(w), _) => CuboidWindow::parse(w)?,
        (None, Some(n)) => window_for_n(n, model.intensity(), model.dim)?,
        (None, None) => return Err(Error::Parse("either --n or --window is required".into())),
    };
    let pattern = model.simulate(&window, args.seed)?;
    io::write_pattern_file(&args.out, &pattern)?;
    let mut sidecar = Vec::new();
    io::write_window(&mut sidecar, &window)?;
    std::fs::write(default_sibling(&args.out, ".window.csv"), sidecar)?;
    Ok(())
}

fn cmd_bench(args: &BenchArgs) -> Result<()> {
    let mut config = StudyConfig::load(&args.config)?;
    if let Some(r) = args.reps {
        config.replications = r;
    }
    if args.heatmaps {
        config.per_node = true;
    }
    config.validate()?;
    let report = run_study(&config)?;
    let grid = Arc::new(WavenumberGrid::regular_square(2, config.grid_step, config.grid_extent, true)?);
    report.write(&args.out, &grid)?;
    if args.heatmaps {
        for c in &report.cells {
            if let Some(mean) = &c.mean {
                let est = SpectralEstimate::new(grid.clone(), mean.clone(), crate::EstimateMeta::new(crate::EstimatorKind::Synthetic));
                let name = format!("mean_{}_{}_{}.png", c.model.replace(':', "-"), c.n, c.estimator.replace(':', "-"));
                io::write_heatmap_file(&args.out.join(name), &est)?;
            }
        }
    }
    print!("{}", report.summary_csv());
    Ok(())
}
