//! Multitapering, kernel smoothing, radial and angular summaries, and
//! plug-in rules for bandwidth, taper count and maximum wavenumber.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::estimate::{EstimateMeta, EstimatorKind, RadialEstimate, RadialMeta, SpectralEstimate};
use crate::grid::WavenumberGrid;
use crate::pattern::PointPattern;
use crate::spectral::DftPlan;
use crate::tapers::Taper;

/// Average of the debiased periodograms of the `P^d` sine tapers with orders in `{1..P}^d`.
pub fn multitaper(pattern: &PointPattern, p: u32, grid: &Arc<WavenumberGrid>) -> Result<SpectralEstimate> {
    let tapers = Taper::sine_family(pattern.window(), p)?;
    let plan = DftPlan::new(pattern, grid)?;
    multitaper_with(&plan, &tapers)
}

/// Multitaper estimate reusing a DFT plan and a precomputed taper family.
pub fn multitaper_with(plan: &DftPlan, tapers: &[Taper]) -> Result<SpectralEstimate> {
    if tapers.is_empty() {
        return Err(Error::EmptyTaperList);
    }
    let mut sum = vec![0.0; plan.grid().len()];
    for t in tapers {
        let est = plan.debiased_periodogram(t)?;
        for (s, v) in sum.iter_mut().zip(&est.values) {
            *s += v;
        }
    }
    let n = tapers.len() as f64;
    sum.iter_mut().for_each(|s| *s /= n);
    let mut meta = EstimateMeta::new(EstimatorKind::Multitaper);
    meta.tapers = tapers.iter().map(|t| t.id()).collect();
    meta.debiased = true;
    meta.translation = tapers[0].window().center();
    Ok(SpectralEstimate::new(plan.grid().clone(), sum, meta))
}

/// Smoothing weights on the wavenumber grid.
#[derive(Debug, Clone, PartialEq)]
pub enum SmoothingKernel {
    /// Equal weights on nodes with `|k'_j - k_j| <= half_width_j` for all `j`.
    Box { half_width: Vec<f64> },
    /// Outer product of binomial weights over an `m^d` block of neighboring nodes
    /// (`m` odd), approximately Gaussian.
    GaussianTemplate { m: usize },
}

impl SmoothingKernel {
    pub fn boxcar(half_width: Vec<f64>) -> Result<Self> {
        if half_width.iter().any(|h| !(*h >= 0.0 && h.is_finite())) {
            return Err(Error::InvalidParameter("box half-width must be non-negative".into()));
        }
        Ok(Self::Box { half_width })
    }

    pub fn gaussian_template(m: usize) -> Result<Self> {
        if m % 2 == 0 {
            return Err(Error::InvalidParameter(format!("template size must be odd, got {m}")));
        }
        Ok(Self::GaussianTemplate { m })
    }

    pub fn describe(&self) -> String {
        match self {
            Self::Box { half_width } => format!(
                "box:{}",
                half_width.iter().map(|h| h.to_string()).collect::<Vec<_>>().join(",")
            ),
            Self::GaussianTemplate { m } => format!("gaussian:{m}"),
        }
    }
}

fn binomial_row(m: usize) -> Vec<f64> {
    let mut row = vec![1.0];
    for _ in 1..m {
        let mut next = vec![1.0; row.len() + 1];
        for i in 1..row.len() {
            next[i] = row[i - 1] + row[i];
        }
        row = next;
    }
    row
}

/// Dense lookup from multi-index to node index on product grids.
struct ProductIndex {
    shape: Vec<usize>,
    lookup: Vec<usize>,
}

impl ProductIndex {
    fn new(grid: &WavenumberGrid) -> Option<Self> {
        let axes = grid.axes()?;
        let shape: Vec<usize> = axes.iter().map(|a| a.len()).collect();
        let mut lookup = vec![usize::MAX; shape.iter().product()];
        for i in 0..grid.len() {
            let mi = grid.multi_index(i)?;
            lookup[Self::flat(&shape, mi)] = i;
        }
        Some(Self { shape, lookup })
    }

    fn flat(shape: &[usize], mi: &[usize]) -> usize {
        mi.iter().zip(shape).fold(0, |acc, (i, n)| acc * n + i)
    }

    fn get(&self, mi: &[usize], offset: &[i64]) -> Option<usize> {
        let mut flat = 0usize;
        for ((i, o), n) in mi.iter().zip(offset).zip(&self.shape) {
            let v = *i as i64 + o;
            if v < 0 || v >= *n as i64 {
                return None;
            }
            flat = flat * n + v as usize;
        }
        let idx = self.lookup[flat];
        (idx != usize::MAX).then_some(idx)
    }
}

/// All offsets in `prod_j [-r_j, r_j]`.
fn offsets(reach: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for r in reach {
        out = out
            .into_iter()
            .flat_map(|o| {
                (-r..=*r).map(move |v| {
                    let mut o = o.clone();
                    o.push(v);
                    o
                })
            })
            .collect();
    }
    out
}

/// Discrete convolution with weights renormalized over the in-grid neighbors of each node.
///
/// A box half-width below the grid spacing leaves only the center node; the
/// estimate is returned unchanged with a warning.
pub fn kernel_smooth(estimate: &SpectralEstimate, kernel: &SmoothingKernel) -> Result<SpectralEstimate> {
    let grid = &estimate.grid;
    let d = grid.dim();
    let mut out = estimate.clone();
    out.meta.smoothing = Some(kernel.describe());
    match (kernel, ProductIndex::new(grid)) {
        (SmoothingKernel::Box { half_width }, Some(index)) => {
            if half_width.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: half_width.len(),
                });
            }
            let steps = grid.steps().expect("product grid");
            let reach: Vec<i64> = half_width
                .iter()
                .zip(&steps)
                .map(|(h, s)| (h / s * (1.0 + 1e-9)).floor() as i64)
                .collect();
            if reach.iter().all(|r| *r == 0) {
                log::warn!("smoothing bandwidth is below the grid spacing; estimate left unchanged");
                return Ok(out);
            }
            let offs = offsets(&reach);
            smooth_product(estimate, &index, &offs, &vec![1.0; offs.len()], &mut out.values);
        }
        (SmoothingKernel::GaussianTemplate { m }, Some(index)) => {
            let row = binomial_row(*m);
            let r = (*m / 2) as i64;
            let offs = offsets(&vec![r; d]);
            let weights: Vec<f64> = offs
                .iter()
                .map(|o| o.iter().map(|v| row[(v + r) as usize]).product())
                .collect();
            if *m == 1 {
                log::warn!("template of size 1 is the identity");
            }
            smooth_product(estimate, &index, &offs, &weights, &mut out.values);
        }
        (SmoothingKernel::Box { half_width }, None) => {
            if half_width.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: half_width.len(),
                });
            }
            for (i, k) in grid.nodes().enumerate() {
                let mut acc = 0.0;
                let mut count = 0usize;
                for (j, q) in grid.nodes().enumerate() {
                    if k.iter().zip(q).zip(half_width).all(|((a, b), h)| (a - b).abs() <= h * (1.0 + 1e-9)) {
                        acc += estimate.values[j];
                        count += 1;
                    }
                }
                out.values[i] = acc / count as f64;
            }
        }
        (SmoothingKernel::GaussianTemplate { .. }, None) => return Err(Error::NotAProductGrid),
    }
    Ok(out)
}

fn smooth_product(
    estimate: &SpectralEstimate,
    index: &ProductIndex,
    offs: &[Vec<i64>],
    weights: &[f64],
    out: &mut [f64],
) {
    for (i, o) in out.iter_mut().enumerate() {
        let mi = estimate.grid.multi_index(i).expect("product grid");
        let mut acc = 0.0;
        let mut total = 0.0;
        for (off, w) in offs.iter().zip(weights) {
            if let Some(j) = index.get(mi, off) {
                acc += w * estimate.values[j];
                total += w;
            }
        }
        *o = acc / total;
    }
}

/// Membership of grid nodes in annular bins `| ||k|| - t | <= radius`.
#[derive(Debug, Clone)]
pub struct RadialBins {
    t: Vec<f64>,
    radius: f64,
    members: Vec<Vec<usize>>,
}

impl RadialBins {
    pub fn new(grid: &WavenumberGrid, t_nodes: &[f64], radius: f64) -> Result<Self> {
        if t_nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("radial nodes must be strictly increasing".into()));
        }
        let norms: Vec<f64> = (0..grid.len()).map(|i| grid.norm(i)).collect();
        let members: Vec<Vec<usize>> = t_nodes
            .iter()
            .map(|t| {
                norms
                    .iter()
                    .enumerate()
                    .filter(|(_, r)| (*r - t).abs() <= radius)
                    .map(|(i, _)| i)
                    .collect()
            })
            .collect();
        if members.iter().all(|m| m.is_empty()) {
            return Err(Error::AllBinsEmpty);
        }
        Ok(Self {
            t: t_nodes.to_vec(),
            radius,
            members,
        })
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    /// Per-bin mean; empty bins are `NaN` with count zero.
    pub fn average(&self, values: &[f64]) -> RadialEstimate {
        let mut out = Vec::with_capacity(self.t.len());
        let mut counts = Vec::with_capacity(self.t.len());
        for m in &self.members {
            if m.is_empty() {
                out.push(f64::NAN);
            } else {
                let mut acc = 0.0;
                for &i in m {
                    acc += values[i];
                }
                out.push(acc / m.len() as f64);
            }
            counts.push(m.len());
        }
        let mut meta = RadialMeta::new("rotational_average");
        meta.kernel_radius = Some(self.radius);
        let mut r = RadialEstimate::new(self.t.clone(), out, meta);
        r.counts = Some(counts);
        r
    }
}

/// Box-kernel average over `| ||k|| - t | <= radius` for each `t`.
pub fn rotational_average(estimate: &SpectralEstimate, t_nodes: &[f64], radius: f64) -> Result<RadialEstimate> {
    let bins = RadialBins::new(&estimate.grid, t_nodes, radius)?;
    let mut r = bins.average(&estimate.values);
    r.meta.sign_safe = estimate.meta.sign_safe;
    Ok(r)
}

/// Angular summary in 2D: mean of values with `||k||` in `band` per polar-angle bin.
///
/// Angles are taken modulo `pi` (an estimate at `k` and `-k` carries the same
/// information) and the `n_bins` bins partition `[0, pi)`; `t` holds bin centers.
pub fn theta_spectrum(estimate: &SpectralEstimate, n_bins: usize, band: (f64, f64)) -> Result<RadialEstimate> {
    let grid = &estimate.grid;
    if grid.dim() != 2 {
        return Err(Error::UnsupportedDimension(grid.dim()));
    }
    if n_bins == 0 {
        return Err(Error::InvalidParameter("need at least one angular bin".into()));
    }
    let mut sums = vec![0.0; n_bins];
    let mut counts = vec![0usize; n_bins];
    let mut any = false;
    for (i, k) in grid.nodes().enumerate() {
        let r = grid.norm(i);
        if r < band.0 || r > band.1 || r == 0.0 {
            continue;
        }
        any = true;
        let theta = theta_mod_pi(k[0], k[1]);
        let b = ((theta / PI * n_bins as f64) as usize).min(n_bins - 1);
        sums[b] += estimate.values[i];
        counts[b] += 1;
    }
    if !any {
        return Err(Error::EmptyBand);
    }
    let values = sums
        .iter()
        .zip(&counts)
        .map(|(s, c)| if *c == 0 { f64::NAN } else { s / *c as f64 })
        .collect();
    let centers = (0..n_bins).map(|b| (b as f64 + 0.5) * PI / n_bins as f64).collect();
    let mut r = RadialEstimate::new(centers, values, RadialMeta::new("theta_spectrum"));
    r.counts = Some(counts);
    Ok(r)
}

fn theta_mod_pi(x: f64, y: f64) -> f64 {
    let a = y.atan2(x);
    let a = if a < 0.0 { a + PI } else { a };
    if a >= PI {
        0.0
    } else {
        a
    }
}

/// Optimal box-car bandwidth `(144 lambda^2 / (d^2 lambda^4 c^2))^{1/5}` in units of the window length.
pub fn bandwidth_select(lambda_hat: f64, curvature: f64, d: usize) -> Result<f64> {
    if !(curvature > 0.0) {
        return Err(Error::NonPositiveCurvature(curvature));
    }
    if !(lambda_hat > 0.0) {
        return Err(Error::InvalidParameter("intensity must be positive".into()));
    }
    let d = d as f64;
    let l2 = lambda_hat * lambda_hat;
    Ok((144.0 * l2 / (d * d * l2 * l2 * curvature * curvature)).powf(0.2))
}

/// Kernel half-width in wavenumber units for a bandwidth measured in window lengths.
pub fn bandwidth_radius(sigma: f64, ell: f64) -> f64 {
    sigma / ell
}

/// Optimal taper count `P = round((16 lambda^2 (1 + f~) l^4 / (lambda^4 d^2 c^2))^{1/(d+4)})`, at least 1.
pub fn taper_count_select(lambda_hat: f64, f2_tilde: f64, curvature: f64, ell: f64, d: usize) -> Result<u32> {
    if !(curvature > 0.0) {
        return Err(Error::NonPositiveCurvature(curvature));
    }
    if !(lambda_hat > 0.0 && ell > 0.0) {
        return Err(Error::InvalidParameter("intensity and length must be positive".into()));
    }
    let df = d as f64;
    let l2 = lambda_hat * lambda_hat;
    let rhs = 16.0 * l2 * (1.0 + f2_tilde) * ell.powi(4) / (l2 * l2 * df * df * curvature * curvature);
    let p = rhs.powf(1.0 / (df + 4.0)).round();
    Ok(p.max(1.0) as u32)
}

/// Shannon number `2 l sigma` of a taper family with bandwidth `sigma`.
pub fn shannon_number(ell: f64, sigma: f64) -> f64 {
    2.0 * ell * sigma
}

/// Maximum absolute second difference of `(estimate - lambda_hat) / lambda_hat^2`,
/// divided by the squared step, after a 3-point binomial pilot smoothing.
pub fn curvature_estimate(estimate: &SpectralEstimate, lambda_hat: f64) -> Result<f64> {
    curvature_estimate_with(estimate, lambda_hat, true)
}

/// As [`curvature_estimate`], optionally without the pilot smoothing.
///
/// With the pilot on, differences are only taken where every node involved had
/// a complete smoothing neighborhood.
pub fn curvature_estimate_with(estimate: &SpectralEstimate, lambda_hat: f64, pilot: bool) -> Result<f64> {
    let grid = &estimate.grid;
    let index = ProductIndex::new(grid).ok_or(Error::NotAProductGrid)?;
    let steps = grid.steps().expect("product grid");
    let d = grid.dim();
    let min_nodes = if pilot { 5 } else { 3 };
    if index.shape.iter().any(|n| *n < min_nodes) {
        return Err(Error::GridTooSmall(format!(
            "curvature needs at least {min_nodes} nodes per axis"
        )));
    }
    let values = if pilot {
        kernel_smooth(estimate, &SmoothingKernel::gaussian_template(3)?)?.values
    } else {
        estimate.values.clone()
    };
    let complete: Vec<bool> = if pilot {
        let offs = offsets(&vec![1; d]);
        (0..grid.len())
            .map(|i| {
                let mi = grid.multi_index(i).expect("product grid");
                offs.iter().all(|o| index.get(mi, o).is_some())
            })
            .collect()
    } else {
        vec![true; grid.len()]
    };
    let l2 = lambda_hat * lambda_hat;
    let g = |i: usize| (values[i] - lambda_hat) / l2;
    let mut best: f64 = 0.0;
    let mut any = false;
    for i in 0..grid.len() {
        let mi = grid.multi_index(i).expect("product grid");
        for j in 0..d {
            let mut lo = vec![0i64; d];
            let mut hi = vec![0i64; d];
            lo[j] = -1;
            hi[j] = 1;
            let (Some(a), Some(b)) = (index.get(mi, &lo), index.get(mi, &hi)) else {
                continue;
            };
            if !(complete[a] && complete[i] && complete[b]) {
                continue;
            }
            let second = (g(a) - 2.0 * g(i) + g(b)) / (steps[j] * steps[j]);
            best = best.max(second.abs());
            any = true;
        }
    }
    if !any {
        return Err(Error::GridTooSmall("no interior node for second differences".into()));
    }
    Ok(best)
}

/// Result of the power-law fit used to pick the highest useful wavenumber.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxWavenumber {
    pub w_h: f64,
    pub c0: f64,
    pub alpha: f64,
    /// Indices `[start, end]` (inclusive) of the radial nodes used in the fit.
    pub fit_range: (usize, usize),
    /// Set when the fitted decay exponent is not positive; `w_h` is then the largest node.
    pub no_decay: bool,
}

/// Fit `log|value - lambda_hat| = 2 log lambda_hat + log C0 - alpha log t` and solve
/// `C0 w^{-alpha} = lambda_hat`.
///
/// The fit range starts at the first node whose value is at most half the first
/// value and ends before the first later node whose value drops below `2 lambda_hat`.
pub fn max_wavenumber(radial: &RadialEstimate, lambda_hat: f64) -> Result<MaxWavenumber> {
    let v = &radial.values;
    let n = v.len();
    let first = (0..n).find(|&i| v[i].is_finite()).ok_or(Error::EmptyFitRange)?;
    let start = (first..n)
        .find(|&i| v[i] <= 0.5 * v[first])
        .ok_or(Error::EmptyFitRange)?;
    let end = match (start..n).find(|&i| v[i] < 2.0 * lambda_hat) {
        Some(start_stop) if start_stop == start => return Err(Error::EmptyFitRange),
        Some(stop) => stop - 1,
        None => n - 1,
    };
    let pts: Vec<(f64, f64)> = (start..=end)
        .filter(|&i| radial.t[i] > 0.0 && v[i].is_finite() && v[i] != lambda_hat)
        .map(|i| (radial.t[i].ln(), (v[i] - lambda_hat).abs().ln()))
        .collect();
    if pts.len() < 5 {
        return Err(Error::EmptyFitRange);
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let alpha = -slope;
    let c0 = (intercept - 2.0 * lambda_hat.ln()).exp();
    if alpha <= 0.0 {
        return Ok(MaxWavenumber {
            w_h: *radial.t.last().expect("non-empty"),
            c0,
            alpha,
            fit_range: (start, end),
            no_decay: true,
        });
    }
    Ok(MaxWavenumber {
        w_h: (c0 / lambda_hat).powf(1.0 / alpha),
        c0,
        alpha,
        fit_range: (start, end),
        no_decay: false,
    })
}
