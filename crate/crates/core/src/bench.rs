//! Monte-Carlo study harness: integrated variance, squared bias and MSE of
//! spectral estimators against the theoretical spectra of the built-in models.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::radial_nodes;
use crate::grid::WavenumberGrid;
use crate::isotropic::{debiased_from_pairs, IsotropicBias, PairSet, PairTaper};
use crate::models::{stream_rng, window_for_n, Model};
use crate::numerics::RunningStats;
use crate::pattern::PointPattern;
use crate::smoothing::{kernel_smooth, multitaper_with, RadialBins, SmoothingKernel};
use crate::spectral::DftPlan;
use crate::tapers::{Taper, HERMITE_DEFAULT_A};

/// Spectral estimators compared by the study.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum EstimatorSpec {
    /// Box-taper periodogram, debiased or raw.
    Bartlett { debiased: bool },
    /// Average of `P^d` sine-tapered periodograms, debiased or raw.
    Multitaper { p: u32, debiased: bool },
    /// Debiased box periodogram smoothed by an `m^d` Gaussian template.
    Smoothed { m: usize },
}

impl EstimatorSpec {
    /// `periodogram`, `debiased`, `mt:P`, `mt-raw:P` or `smoothed:m`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let num = |v: &str| v.parse::<u32>().map_err(|_| Error::Parse(format!("bad estimator `{s}`")));
        match s {
            "periodogram" => Ok(Self::Bartlett { debiased: false }),
            "debiased" => Ok(Self::Bartlett { debiased: true }),
            _ => {
                if let Some(p) = s.strip_prefix("mt-raw:") {
                    Ok(Self::Multitaper { p: num(p)?, debiased: false })
                } else if let Some(p) = s.strip_prefix("mt:") {
                    Ok(Self::Multitaper { p: num(p)?, debiased: true })
                } else if let Some(m) = s.strip_prefix("smoothed:") {
                    Ok(Self::Smoothed { m: num(m)? as usize })
                } else {
                    Err(Error::Parse(format!("unknown estimator `{s}`")))
                }
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            Self::Bartlett { debiased: false } => "periodogram".into(),
            Self::Bartlett { debiased: true } => "debiased".into(),
            Self::Multitaper { p, debiased: true } => format!("mt:{p}"),
            Self::Multitaper { p, debiased: false } => format!("mt-raw:{p}"),
            Self::Smoothed { m } => format!("smoothed:{m}"),
        }
    }

    /// The same estimator with debiasing toggled, if it has a raw counterpart.
    pub fn raw_counterpart(&self) -> Option<Self> {
        match *self {
            Self::Bartlett { debiased: true } => Some(Self::Bartlett { debiased: false }),
            Self::Multitaper { p, debiased: true } => Some(Self::Multitaper { p, debiased: false }),
            _ => None,
        }
    }

    fn evaluate(&self, plan: &DftPlan, window_tapers: &TaperCache) -> Result<Vec<f64>> {
        Ok(match self {
            Self::Bartlett { debiased: true } => plan.debiased_periodogram(&window_tapers.boxcar)?.values,
            Self::Bartlett { debiased: false } => plan.periodogram(&window_tapers.boxcar)?.values,
            Self::Multitaper { p, debiased: true } => multitaper_with(plan, window_tapers.family(*p)?)?.values,
            Self::Multitaper { p, debiased: false } => {
                let tapers = window_tapers.family(*p)?;
                let mut acc = vec![0.0; plan.grid().len()];
                for t in tapers {
                    for (a, v) in acc.iter_mut().zip(plan.periodogram(t)?.values) {
                        *a += v;
                    }
                }
                acc.iter_mut().for_each(|a| *a /= tapers.len() as f64);
                acc
            }
            Self::Smoothed { m } => {
                let base = plan.debiased_periodogram(&window_tapers.boxcar)?;
                kernel_smooth(&base, &SmoothingKernel::gaussian_template(*m)?)?.values
            }
        })
    }
}

impl TryFrom<String> for EstimatorSpec {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        Self::parse(&s)
    }
}

impl From<EstimatorSpec> for String {
    fn from(e: EstimatorSpec) -> String {
        e.name()
    }
}

struct TaperCache {
    boxcar: Taper,
    families: HashMap<u32, Vec<Taper>>,
}

impl TaperCache {
    fn new(window: &crate::window::CuboidWindow, estimators: &[EstimatorSpec]) -> Result<Self> {
        let mut families = HashMap::new();
        for e in estimators {
            if let EstimatorSpec::Multitaper { p, .. } = e {
                if !families.contains_key(p) {
                    families.insert(*p, Taper::sine_family(window, *p)?);
                }
            }
        }
        Ok(Self {
            boxcar: Taper::boxcar(window),
            families,
        })
    }

    fn family(&self, p: u32) -> Result<&[Taper]> {
        self.families
            .get(&p)
            .map(|v| v.as_slice())
            .ok_or_else(|| Error::InvalidParameter(format!("taper family P={p} not prepared")))
    }
}

fn default_step() -> f64 {
    0.006
}
fn default_extent() -> f64 {
    0.3
}
fn default_integration_extent() -> f64 {
    0.2
}
fn default_true() -> bool {
    true
}
fn default_reference_reps() -> usize {
    2000
}

/// Study definition, usually read from a TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    /// Model variant names or parameter strings accepted by [`Model::parse`].
    pub models: Vec<String>,
    pub sample_sizes: Vec<usize>,
    pub replications: usize,
    pub estimators: Vec<EstimatorSpec>,
    #[serde(default = "default_step")]
    pub grid_step: f64,
    #[serde(default = "default_extent")]
    pub grid_extent: f64,
    /// Half-width of the square sub-grid the metrics are summed over.
    #[serde(default = "default_integration_extent")]
    pub integration_extent: f64,
    #[serde(default)]
    pub seed_base: u64,
    /// Install the literature Matérn II pair correlation for the reference spectrum.
    #[serde(default = "default_true")]
    pub literature_pcf: bool,
    /// Without a pair correlation, fall back to a simulated reference spectrum.
    #[serde(default)]
    pub allow_simulation_reference: bool,
    #[serde(default = "default_reference_reps")]
    pub reference_reps: usize,
    /// Keep per-node mean and variance arrays in the report.
    #[serde(default)]
    pub per_node: bool,
}

impl StudyConfig {
    pub fn new(models: &[&str], sample_sizes: &[usize], replications: usize, estimators: &[EstimatorSpec]) -> Self {
        Self {
            models: models.iter().map(|s| s.to_string()).collect(),
            sample_sizes: sample_sizes.to_vec(),
            replications,
            estimators: estimators.to_vec(),
            grid_step: default_step(),
            grid_extent: default_extent(),
            integration_extent: default_integration_extent(),
            seed_base: 0,
            literature_pcf: true,
            allow_simulation_reference: false,
            reference_reps: default_reference_reps(),
            per_node: false,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.replications < 2 {
            return bad("replications must be at least 2");
        }
        if self.models.is_empty() || self.sample_sizes.is_empty() || self.estimators.is_empty() {
            return bad("models, sample_sizes and estimators must be non-empty");
        }
        if self.sample_sizes.contains(&0) {
            return bad("sample sizes must be positive");
        }
        if !(self.grid_step > 0.0 && self.grid_extent > 0.0 && self.integration_extent > 0.0) {
            return bad("grid step and extents must be positive");
        }
        for m in &self.models {
            Model::parse(m).map_err(|e| Error::Config(e.to_string()))?;
        }
        Ok(())
    }

    fn model(&self, name: &str) -> Result<Model> {
        let m = Model::parse(name)?;
        Ok(if self.literature_pcf { m.with_literature_pcf() } else { m })
    }

    fn grid(&self) -> Result<Arc<WavenumberGrid>> {
        Ok(Arc::new(WavenumberGrid::regular_square(2, self.grid_step, self.grid_extent, true)?))
    }
}

/// Integrated quality metrics of one (model, n, estimator) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub model: String,
    pub n: usize,
    pub estimator: String,
    pub reps: usize,
    pub ivar: f64,
    pub ibias2: f64,
    pub imse: f64,
    /// Expected `iBias²` contribution of Monte-Carlo noise, `iVar / reps`.
    pub ibias2_noise: f64,
    /// Standard error of `iBias²` when the true bias is zero.
    pub ibias2_se: f64,
    pub simulation_referenced: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variance: Option<Vec<f64>>,
}

/// `1 - iBias²(debiased) / iBias²(raw)` for a model, size and estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DebiasFraction {
    pub model: String,
    pub n: usize,
    pub estimator: String,
    pub fraction: f64,
    /// Set when the raw squared bias is below its Monte-Carlo noise level.
    pub undefined: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub cells: Vec<CellReport>,
    pub debias_fractions: Vec<DebiasFraction>,
}

impl QualityReport {
    pub fn cell(&self, model: &str, n: usize, estimator: &str) -> Option<&CellReport> {
        self.cells
            .iter()
            .find(|c| c.model == model && c.n == n && c.estimator == estimator)
    }

    pub fn fraction(&self, model: &str, n: usize, estimator: &str) -> Option<&DebiasFraction> {
        self.debias_fractions
            .iter()
            .find(|c| c.model == model && c.n == n && c.estimator == estimator)
    }

    pub fn summary_csv(&self) -> String {
        let mut s = String::from("model,n,estimator,reps,ivar,ibias2,imse,ibias2_noise,ibias2_se,simulation_referenced\n");
        for c in &self.cells {
            writeln!(
                s,
                "{},{},{},{},{:e},{:e},{:e},{:e},{:e},{}",
                c.model, c.n, c.estimator, c.reps, c.ivar, c.ibias2, c.imse, c.ibias2_noise, c.ibias2_se, c.simulation_referenced
            )
            .unwrap();
        }
        s
    }

    pub fn fractions_csv(&self) -> String {
        let mut s = String::from("model,n,estimator,fraction,undefined\n");
        for f in &self.debias_fractions {
            writeln!(s, "{},{},{},{},{}", f.model, f.n, f.estimator, f.fraction, f.undefined).unwrap();
        }
        s
    }

    /// Write `summary.csv`, `debias_fractions.csv` and, when per-node arrays were kept,
    /// one `cell_<model>_<n>_<estimator>.csv` per cell.
    pub fn write(&self, dir: &Path, grid: &WavenumberGrid) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("summary.csv"), self.summary_csv())?;
        std::fs::write(dir.join("debias_fractions.csv"), self.fractions_csv())?;
        for c in &self.cells {
            if let (Some(mean), Some(var)) = (&c.mean, &c.variance) {
                let mut s = String::from("k1,k2,mean,variance\n");
                for i in 0..grid.len() {
                    let k = grid.node(i);
                    writeln!(s, "{},{},{:e},{:e}", k[0], k[1], mean[i], var[i]).unwrap();
                }
                let name = format!("cell_{}_{}_{}.csv", sanitize(&c.model), c.n, sanitize(&c.estimator));
                std::fs::write(dir.join(name), s)?;
            }
        }
        Ok(())
    }
}

fn sanitize(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '-' }).collect()
}

/// Stable stream key for a (model, n, replicate) triple.
///
/// Built-in variants have fixed model ids, so a cell reproduces regardless of
/// which other models share the study.
pub fn stream_key(model: &str, config_index: usize, n: usize, rep: usize) -> u64 {
    let id = match model {
        "poisson" => 0,
        "ms" | "thomas:ms" => 1,
        "fl" | "thomas:fl" => 2,
        "r2" | "matern:r2" => 3,
        "r5" | "matern:r5" => 4,
        _ => 16 + config_index as u64,
    };
    assert!(n < 1 << 24 && rep < 1 << 24, "sample size and replicate index must fit 24 bits");
    (id << 48) | ((n as u64) << 24) | rep as u64
}

const REFERENCE_STREAM: u64 = 1 << 63;

/// Simulate replicate `rep` of a cell.
pub fn simulate_replicate(model: &Model, model_key: &str, config_index: usize, n: usize, rep: usize, seed_base: u64) -> Result<PointPattern> {
    let window = window_for_n(n, model.intensity(), model.dim)?;
    let mut rng = stream_rng(seed_base, stream_key(model_key, config_index, n, rep));
    model.simulate_with(&window, &mut rng)
}

/// Theoretical spectrum on grid nodes, evaluating each distinct magnitude once.
fn reference_on_grid(model: &Model, grid: &WavenumberGrid) -> Result<Vec<f64>> {
    let mut cache: HashMap<u64, f64> = HashMap::new();
    let mut out = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let t = grid.norm(i);
        let v = match cache.get(&t.to_bits()) {
            Some(v) => *v,
            None => {
                let v = model.theoretical_sdf_radial(t)?;
                cache.insert(t.to_bits(), v);
                v
            }
        };
        out.push(v);
    }
    Ok(out)
}

/// Mean of debiased multitaper (P = 3) estimates at n = 800, used when a model has no pair correlation.
pub fn simulation_reference(model: &Model, grid: &Arc<WavenumberGrid>, reps: usize, seed_base: u64) -> Result<Vec<f64>> {
    let window = window_for_n(800, model.intensity(), model.dim)?;
    let tapers = Taper::sine_family(&window, 3)?;
    let mut acc = vec![RunningStats::new(); grid.len()];
    for rep in 0..reps {
        let mut rng = stream_rng(seed_base, REFERENCE_STREAM | rep as u64);
        let pattern = model.simulate_with(&window, &mut rng)?;
        let plan = DftPlan::new(&pattern, grid)?;
        let est = multitaper_with(&plan, &tapers)?;
        for (s, v) in acc.iter_mut().zip(&est.values) {
            s.push(*v);
        }
    }
    Ok(acc.iter().map(|s| s.mean()).collect())
}

/// Accumulated per-node statistics turned into integrated metrics over `mask`.
pub fn integrate_metrics(stats: &[RunningStats], reference: &[f64], mask: &[bool]) -> (f64, f64, f64, f64) {
    let mut ivar = 0.0;
    let mut ibias2 = 0.0;
    let mut null_var = 0.0;
    let mut reps = 0;
    for ((s, f), m) in stats.iter().zip(reference).zip(mask) {
        if !*m {
            continue;
        }
        let v = s.variance();
        ivar += v;
        ibias2 += (s.mean() - f).powi(2);
        reps = s.count();
        let mean_var = v / s.count() as f64;
        null_var += 2.0 * mean_var * mean_var;
    }
    let noise = if reps > 0 { ivar / reps as f64 } else { f64::NAN };
    (ivar, ibias2, noise, null_var.sqrt())
}

/// Run every (model, n, estimator) cell of a study.
pub fn run_study(config: &StudyConfig) -> Result<QualityReport> {
    config.validate()?;
    let grid = config.grid()?;
    let mask = grid.within(config.integration_extent);
    let mut cells = Vec::new();
    for (mi, name) in config.models.iter().enumerate() {
        let model = config.model(name)?;
        let (reference, simulated) = if model.has_pcf() {
            (reference_on_grid(&model, &grid)?, false)
        } else if config.allow_simulation_reference {
            (simulation_reference(&model, &grid, config.reference_reps, config.seed_base)?, true)
        } else {
            return Err(Error::MissingPcf(model.name.clone()));
        };
        for &n in &config.sample_sizes {
            let window = window_for_n(n, model.intensity(), model.dim)?;
            let tapers = TaperCache::new(&window, &config.estimators)?;
            let mut stats = vec![vec![RunningStats::new(); grid.len()]; config.estimators.len()];
            for rep in 0..config.replications {
                let pattern = simulate_replicate(&model, name, mi, n, rep, config.seed_base)?;
                let plan = DftPlan::new(&pattern, &grid)?;
                for (e, acc) in config.estimators.iter().zip(stats.iter_mut()) {
                    let values = e.evaluate(&plan, &tapers)?;
                    for (s, v) in acc.iter_mut().zip(values) {
                        s.push(v);
                    }
                }
                log::debug!("{name} n={n} rep {rep} done");
            }
            for (e, acc) in config.estimators.iter().zip(&stats) {
                let (ivar, ibias2, noise, se) = integrate_metrics(acc, &reference, &mask);
                cells.push(CellReport {
                    model: name.clone(),
                    n,
                    estimator: e.name(),
                    reps: config.replications,
                    ivar,
                    ibias2,
                    imse: ivar + ibias2,
                    ibias2_noise: noise,
                    ibias2_se: se,
                    simulation_referenced: simulated,
                    mean: config.per_node.then(|| acc.iter().map(|s| s.mean()).collect()),
                    variance: config.per_node.then(|| acc.iter().map(|s| s.variance()).collect()),
                });
            }
            log::info!("{name} n={n}: {} cells", config.estimators.len());
        }
    }
    let mut fractions = Vec::new();
    for c in &cells {
        let spec = EstimatorSpec::parse(&c.estimator)?;
        if let Some(raw) = spec.raw_counterpart() {
            let raw_name = raw.name();
            if let Some(r) = cells.iter().find(|r| r.model == c.model && r.n == c.n && r.estimator == raw_name) {
                fractions.push(debias_fraction_from(c, r));
            }
        }
    }
    Ok(QualityReport {
        cells,
        debias_fractions: fractions,
    })
}

fn debias_fraction_from(debiased: &CellReport, raw: &CellReport) -> DebiasFraction {
    let undefined = !(raw.ibias2 > raw.ibias2_noise + 3.0 * raw.ibias2_se);
    DebiasFraction {
        model: debiased.model.clone(),
        n: debiased.n,
        estimator: debiased.estimator.clone(),
        fraction: 1.0 - debiased.ibias2 / raw.ibias2,
        undefined,
    }
}

/// Fraction of integrated squared bias removed by debiasing, with raw and debiased
/// estimators computed on the same simulated patterns.
pub fn debias_fraction(model: &str, n: usize, estimator: &EstimatorSpec, reps: usize, seed_base: u64) -> Result<DebiasFraction> {
    let raw = estimator.raw_counterpart().unwrap_or_else(|| estimator.clone());
    let mut cfg = StudyConfig::new(&[model], &[n], reps, &[raw.clone(), estimator.clone()]);
    cfg.seed_base = seed_base;
    let report = run_study(&cfg)?;
    let c = report.cell(model, n, &estimator.name()).expect("cell present");
    let r = report.cell(model, n, &raw.name()).expect("cell present");
    Ok(debias_fraction_from(c, r))
}

/// One row of a rotational-averaging bandwidth sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub factor: f64,
    pub ivar: f64,
    pub ibias2: f64,
    pub imse: f64,
}

/// Radial magnitudes of the study: 0.003, 0.006, ..., 0.300.
pub fn study_radial_nodes() -> Vec<f64> {
    radial_nodes(0.003, 0.003, 100)
}

/// Rotationally averaged debiased Bartlett periodogram with radius `factor * 0.006`,
/// scored against the isotropic spectrum over `t <= 0.2`.
pub fn bandwidth_sweep(model: &str, n: usize, factors: &[f64], reps: usize, seed_base: u64) -> Result<Vec<SweepRow>> {
    if reps < 2 {
        return Err(Error::InvalidParameter("replications must be at least 2".into()));
    }
    let m = Model::parse(model)?.with_literature_pcf();
    let grid = Arc::new(WavenumberGrid::regular_square(2, 0.006, 0.3, true)?);
    let t = study_radial_nodes();
    let keep: Vec<bool> = t.iter().map(|t| *t <= 0.2 + 1e-12).collect();
    let reference: Vec<f64> = t.iter().map(|t| m.theoretical_sdf_radial(*t)).collect::<Result<_>>()?;
    let bins: Vec<RadialBins> = factors
        .iter()
        .map(|f| RadialBins::new(&grid, &t, f * 0.006))
        .collect::<Result<_>>()?;
    let window = window_for_n(n, m.intensity(), 2)?;
    let taper = Taper::boxcar(&window);
    let mut stats = vec![vec![RunningStats::new(); t.len()]; factors.len()];
    for rep in 0..reps {
        let pattern = simulate_replicate(&m, model, 0, n, rep, seed_base)?;
        let est = DftPlan::new(&pattern, &grid)?.debiased_periodogram(&taper)?;
        for (b, acc) in bins.iter().zip(stats.iter_mut()) {
            let r = b.average(&est.values);
            for (s, v) in acc.iter_mut().zip(&r.values) {
                s.push(*v);
            }
        }
    }
    Ok(factors
        .iter()
        .zip(&stats)
        .map(|(f, acc)| {
            let (ivar, ibias2, _, _) = integrate_metrics(acc, &reference, &keep);
            SweepRow {
                factor: *f,
                ivar,
                ibias2,
                imse: ivar + ibias2,
            }
        })
        .collect())
}

/// Log10 quality of the isotropic estimators relative to the best-bandwidth
/// rotational average (chosen per sample size by smallest iMSE), median over sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsotropicComparison {
    pub model: String,
    pub estimator: String,
    pub log10_ivar: f64,
    pub log10_ibias2: f64,
    pub log10_imse: f64,
}

pub fn isotropic_comparison(model: &str, sizes: &[usize], factors: &[f64], reps: usize, seed_base: u64) -> Result<Vec<IsotropicComparison>> {
    let m = Model::parse(model)?.with_literature_pcf();
    let t = study_radial_nodes();
    let keep: Vec<bool> = t.iter().map(|t| *t <= 0.2 + 1e-12).collect();
    let reference: Vec<f64> = t.iter().map(|t| m.theoretical_sdf_radial(*t)).collect::<Result<_>>()?;
    let names = ["isotropic", "isotropic-hermite"];
    let mut rel: Vec<Vec<[f64; 3]>> = vec![Vec::new(); names.len()];
    for &n in sizes {
        let sweep = bandwidth_sweep(model, n, factors, reps, seed_base)?;
        let best = sweep
            .iter()
            .min_by(|a, b| a.imse.total_cmp(&b.imse))
            .expect("non-empty factor list");
        let window = window_for_n(n, m.intensity(), 2)?;
        let tapers = [PairTaper::None, PairTaper::hermite(&window, HERMITE_DEFAULT_A)?];
        let biases: Vec<IsotropicBias> = tapers
            .iter()
            .map(|tp| IsotropicBias::new(&window, tp, *t.last().unwrap()))
            .collect::<Result<_>>()?;
        let mut stats = vec![vec![RunningStats::new(); t.len()]; tapers.len()];
        for rep in 0..reps {
            let pattern = simulate_replicate(&m, model, 0, n, rep, seed_base)?;
            for ((tp, b), acc) in tapers.iter().zip(&biases).zip(stats.iter_mut()) {
                let r = debiased_from_pairs(&PairSet::new(&pattern, tp), b, &t);
                for (s, v) in acc.iter_mut().zip(&r.values) {
                    s.push(*v);
                }
            }
        }
        for (i, acc) in stats.iter().enumerate() {
            let (ivar, ibias2, _, _) = integrate_metrics(acc, &reference, &keep);
            rel[i].push([
                (ivar / best.ivar).log10(),
                (ibias2 / best.ibias2).log10(),
                ((ivar + ibias2) / best.imse).log10(),
            ]);
        }
    }
    Ok(names
        .iter()
        .zip(&rel)
        .map(|(name, rows)| IsotropicComparison {
            model: model.to_string(),
            estimator: name.to_string(),
            log10_ivar: median(rows.iter().map(|r| r[0]).collect()),
            log10_ibias2: median(rows.iter().map(|r| r[1]).collect()),
            log10_imse: median(rows.iter().map(|r| r[2]).collect()),
        })
        .collect())
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn estimator_names_round_trip() {
        for s in ["periodogram", "debiased", "mt:3", "mt-raw:2", "smoothed:5"] {
            assert_eq!(EstimatorSpec::parse(s).unwrap().name(), s);
        }
        assert!(EstimatorSpec::parse("mt:x").is_err());
    }

    #[test]
    fn config_from_toml() {
        let text = r#"
models = ["poisson", "ms"]
sample_sizes = [25, 50]
replications = 4
estimators = ["periodogram", "debiased", "mt:3"]
seed_base = 9
"#;
        let cfg = StudyConfig::from_toml(text).unwrap();
        assert_eq!(cfg.grid_step, 0.006);
        assert_eq!(cfg.estimators[2], EstimatorSpec::Multitaper { p: 3, debiased: true });
        assert_eq!(StudyConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
        assert!(StudyConfig::from_toml("models = []").is_err());
        let one_rep = text.replace("replications = 4", "replications = 1");
        assert!(matches!(StudyConfig::from_toml(&one_rep), Err(Error::Config(_))));
    }

    #[test]
    fn stream_keys_are_distinct() {
        let mut seen = std::collections::HashSet::new();
        for m in ["poisson", "ms", "fl", "r2", "r5"] {
            for n in [25, 50, 100, 200, 400, 800] {
                for rep in 0..50 {
                    assert!(seen.insert(stream_key(m, 0, n, rep)));
                }
            }
        }
    }

    #[test]
    fn small_study_identity_and_reproducibility() {
        let cfg = StudyConfig::new(
            &["poisson"],
            &[25],
            5,
            &[EstimatorSpec::Bartlett { debiased: false }, EstimatorSpec::Bartlett { debiased: true }],
        );
        let a = run_study(&cfg).unwrap();
        let b = run_study(&cfg).unwrap();
        assert_eq!(a, b);
        for c in &a.cells {
            assert!((c.imse - (c.ivar + c.ibias2)).abs() <= 1e-10 * c.imse);
        }
        assert_eq!(a.debias_fractions.len(), 1);
    }

    #[test]
    fn identical_estimators_have_zero_fraction() {
        let est = EstimatorSpec::Smoothed { m: 3 };
        let f = debias_fraction("poisson", 25, &est, 3, 1).unwrap();
        assert_eq!(f.fraction, 0.0);
    }

    #[test]
    fn single_factor_sweep() {
        let rows = bandwidth_sweep("poisson", 25, &[1.25], 3, 0).unwrap();
        assert_eq!(rows.len(), 1);
    }

    #[test]
    fn median_values() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
