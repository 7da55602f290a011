//! Tapered DFTs of point patterns, periodograms, debiasing and moment oracles.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::estimate::{EstimateMeta, EstimatorKind, SpectralEstimate};
use crate::grid::WavenumberGrid;
use crate::numerics::{phase, sin_ratio, simpson, CompensatedComplex, CompensatedSum};
use crate::pattern::PointPattern;
use crate::tapers::{Taper, TaperKind};
use crate::window::CuboidWindow;

/// Complex tapered DFT values on a wavenumber grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexDft {
    pub grid: Arc<WavenumberGrid>,
    pub values: Vec<Complex64>,
    pub taper: String,
    pub debiased: bool,
    pub translation: Vec<f64>,
    /// Number of points that entered the sum.
    pub count: usize,
    /// Window volume, needed to snap the box-taper cancellation at `k = 0`.
    volume: f64,
    is_box: bool,
}

/// Precomputed phase factors for evaluating DFTs of one pattern with several tapers.
///
/// On product grids the phases are stored per axis, so each node costs `d`
/// complex multiplications per point instead of a fresh exponential.
pub struct DftPlan {
    grid: Arc<WavenumberGrid>,
    window: CuboidWindow,
    coords: Vec<f64>,
    n: usize,
    translation: Vec<f64>,
    tables: Option<Vec<Vec<Complex64>>>,
}

impl DftPlan {
    pub fn new(pattern: &PointPattern, grid: &Arc<WavenumberGrid>) -> Result<Self> {
        if grid.dim() != pattern.dim() {
            return Err(Error::DimensionMismatch {
                expected: pattern.dim(),
                got: grid.dim(),
            });
        }
        let coords = pattern.centered_coords();
        let n = pattern.len();
        let d = pattern.dim();
        let tables = grid.axes().map(|axes| {
            axes.iter()
                .enumerate()
                .map(|(j, ax)| {
                    let mut t = Vec::with_capacity(ax.len() * n);
                    for &kj in ax {
                        for i in 0..n {
                            t.push(phase(kj * coords[i * d + j]));
                        }
                    }
                    t
                })
                .collect()
        });
        Ok(Self {
            grid: grid.clone(),
            window: pattern.window().clone(),
            coords,
            n,
            translation: pattern.translation(),
            tables,
        })
    }

    pub fn grid(&self) -> &Arc<WavenumberGrid> {
        &self.grid
    }

    /// `J_h(k) = sum_x h(x) exp(-2 pi i k·x)` over the centered pattern.
    pub fn dft(&self, taper: &Taper) -> Result<ComplexDft> {
        if taper.window() != &self.window {
            return Err(Error::WindowMismatch);
        }
        if !taper.is_unit_energy() {
            return Err(Error::UnsupportedTaper {
                op: "dft",
                taper: taper.id(),
            });
        }
        let d = self.window.dim();
        let n = self.n;
        let weights: Vec<f64> = self
            .coords
            .chunks_exact(d)
            .map(|u| taper.eval_centered(u))
            .collect();
        let m = self.grid.len();
        let mut values = Vec::with_capacity(m);
        match &self.tables {
            Some(tables) => {
                let mut prefix = vec![Complex64::new(0.0, 0.0); n];
                let mut key: Option<Vec<usize>> = None;
                for node in 0..m {
                    let mi = self.grid.multi_index(node).expect("product grid");
                    if key.as_deref() != Some(&mi[..d - 1]) {
                        for (i, p) in prefix.iter_mut().enumerate() {
                            let mut z = Complex64::new(weights[i], 0.0);
                            for (j, t) in tables.iter().take(d - 1).enumerate() {
                                z *= t[mi[j] * n + i];
                            }
                            *p = z;
                        }
                        key = Some(mi[..d - 1].to_vec());
                    }
                    let last = &tables[d - 1][mi[d - 1] * n..(mi[d - 1] + 1) * n];
                    let mut acc = CompensatedComplex::new();
                    for (p, e) in prefix.iter().zip(last) {
                        acc.add(p * e);
                    }
                    values.push(acc.value());
                }
            }
            None => {
                for k in self.grid.nodes() {
                    let mut acc = CompensatedComplex::new();
                    for (u, w) in self.coords.chunks_exact(d).zip(&weights) {
                        let s: f64 = k.iter().zip(u).map(|(a, b)| a * b).sum();
                        acc.add(phase(s) * *w);
                    }
                    values.push(acc.value());
                }
            }
        }
        Ok(ComplexDft {
            grid: self.grid.clone(),
            values,
            taper: taper.id(),
            debiased: false,
            translation: self.translation.clone(),
            count: n,
            volume: self.window.volume(),
            is_box: matches!(taper.kind(), TaperKind::Box),
        })
    }

    fn intensity_hat(&self) -> f64 {
        self.n as f64 / self.window.volume()
    }

    /// `|J_h - lambda_hat H|^2` using this plan.
    pub fn debiased_periodogram(&self, taper: &Taper) -> Result<SpectralEstimate> {
        let j = debias_dft(&self.dft(taper)?, taper, self.intensity_hat())?;
        Ok(modulus_square(&j, EstimatorKind::DebiasedPeriodogram))
    }

    pub fn periodogram(&self, taper: &Taper) -> Result<SpectralEstimate> {
        Ok(modulus_square(&self.dft(taper)?, EstimatorKind::Periodogram))
    }
}

/// Tapered DFT of `pattern` on `grid`; the pattern is centered first.
pub fn dft(pattern: &PointPattern, taper: &Taper, grid: &Arc<WavenumberGrid>) -> Result<ComplexDft> {
    DftPlan::new(pattern, grid)?.dft(taper)
}

/// `J_h(k) - lambda_hat H(k)` at every node.
///
/// For the box taper at `k = 0` the two terms cancel analytically when
/// `lambda_hat = N/|B|`; a residue at rounding level is snapped to zero.
pub fn debias_dft(dft: &ComplexDft, taper: &Taper, lambda_hat: f64) -> Result<ComplexDft> {
    if dft.debiased {
        return Err(Error::AlreadyDebiased);
    }
    if taper.id() != dft.taper {
        return Err(Error::InvalidParameter(format!(
            "taper `{}` does not match DFT taper `{}`",
            taper.id(),
            dft.taper
        )));
    }
    let mut values = Vec::with_capacity(dft.values.len());
    for (k, j) in dft.grid.nodes().zip(&dft.values) {
        if dft.is_box && k.iter().all(|v| *v == 0.0) {
            let excess = dft.count as f64 - lambda_hat * dft.volume;
            let excess = if excess.abs() <= 8.0 * f64::EPSILON * (dft.count as f64).max(1.0) {
                0.0
            } else {
                excess
            };
            values.push(Complex64::new(excess / dft.volume.sqrt(), 0.0));
            continue;
        }
        values.push(j - taper.transform(k)? * lambda_hat);
    }
    Ok(ComplexDft {
        values,
        debiased: true,
        ..dft.clone()
    })
}

fn modulus_square(dft: &ComplexDft, kind: EstimatorKind) -> SpectralEstimate {
    let mut meta = EstimateMeta::new(kind);
    meta.tapers = vec![dft.taper.clone()];
    meta.debiased = dft.debiased;
    meta.translation = dft.translation.clone();
    SpectralEstimate::new(
        dft.grid.clone(),
        dft.values.iter().map(|z| z.norm_sqr()).collect(),
        meta,
    )
}

/// `I_h(k) = |J_h(k)|^2`; with the box taper this is Bartlett's periodogram.
pub fn periodogram(pattern: &PointPattern, taper: &Taper, grid: &Arc<WavenumberGrid>) -> Result<SpectralEstimate> {
    Ok(modulus_square(&dft(pattern, taper, grid)?, EstimatorKind::Periodogram))
}

/// `|J_h(k) - lambda_hat H(k)|^2` with `lambda_hat = N/|B|`.
pub fn debiased_periodogram(
    pattern: &PointPattern,
    taper: &Taper,
    grid: &Arc<WavenumberGrid>,
) -> Result<SpectralEstimate> {
    DftPlan::new(pattern, grid)?.debiased_periodogram(taper)
}

/// `I_h(k) - lambda_sq_hat |H(k)|^2` with `lambda_sq_hat = N(N-1)/|B|^2`; may be negative.
pub fn subtracted_periodogram(
    pattern: &PointPattern,
    taper: &Taper,
    grid: &Arc<WavenumberGrid>,
) -> Result<SpectralEstimate> {
    let j = dft(pattern, taper, grid)?;
    let l2 = pattern.lambda_sq_hat();
    let mut values = Vec::with_capacity(j.values.len());
    for (k, z) in grid.nodes().zip(&j.values) {
        values.push(z.norm_sqr() - l2 * taper.transform(k)?.norm_sqr());
    }
    let mut meta = EstimateMeta::new(EstimatorKind::SubtractedPeriodogram);
    meta.tapers = vec![taper.id()];
    meta.debiased = true;
    meta.sign_safe = false;
    meta.translation = j.translation;
    Ok(SpectralEstimate::new(grid.clone(), values, meta))
}

/// Bilinear estimator `sum_{x,y} g(x, y) exp(-2 pi i k·(x - y))` with a pair kernel `g`.
///
/// `g` receives points in the pattern's own coordinates. The real part is returned;
/// an imaginary residual above `1e-9` of the absolute kernel mass is an error.
pub fn quadratic_estimator<G>(pattern: &PointPattern, g: G, grid: &Arc<WavenumberGrid>) -> Result<SpectralEstimate>
where
    G: Fn(&[f64], &[f64]) -> f64,
{
    let n = pattern.len();
    let mut weights = Vec::with_capacity(n * n);
    let mut mass = CompensatedSum::new();
    for x in pattern.points() {
        for y in pattern.points() {
            let w = g(x, y);
            mass.add(w.abs());
            weights.push(w);
        }
    }
    let mut values = Vec::with_capacity(grid.len());
    let mut worst: f64 = 0.0;
    let scale = mass.value().max(f64::MIN_POSITIVE);
    let coords = pattern.centered_coords();
    let d = pattern.dim();
    for k in grid.nodes() {
        let proj: Vec<f64> = coords
            .chunks_exact(d)
            .map(|u| k.iter().zip(u).map(|(a, b)| a * b).sum())
            .collect();
        let mut acc = CompensatedComplex::new();
        for a in 0..n {
            for b in 0..n {
                acc.add(phase(proj[a] - proj[b]) * weights[a * n + b]);
            }
        }
        let z = acc.value();
        worst = worst.max(z.im.abs() / scale);
        values.push(z.re);
    }
    if worst > 1e-9 {
        return Err(Error::AsymmetricKernel { residual: worst });
    }
    let mut meta = EstimateMeta::new(EstimatorKind::Quadratic);
    meta.sign_safe = false;
    meta.translation = pattern.translation();
    Ok(SpectralEstimate::new(grid.clone(), values, meta))
}

/// Centering bias kernel `T(B, k) = prod_j sin^2(pi k_j l_j) / (pi k_j)^2`.
pub fn bias_term_t(window: &CuboidWindow, k: &[f64]) -> f64 {
    window
        .sides()
        .iter()
        .zip(k)
        .map(|(l, kj)| sin_ratio(*kj, *l).powi(2))
        .product()
}

/// Convolution `∫ |H(k' - k)|^2 f(k') dk'` at every grid node, for a unit-energy taper.
///
/// Uses `∫|H|^2 = 1` to split off the constant `lambda`, then integrates
/// `|H(δ)|^2 (f(k + δ) - lambda)` with the trapezoid rule at spacing `1/(4 l_j)`.
/// The extent starts at `±20/l_j` and doubles until the integral settles.
pub fn smoothed_spectrum_oracle<F>(f: F, taper: &Taper, grid: &Arc<WavenumberGrid>, lambda: f64) -> Result<SpectralEstimate>
where
    F: Fn(&[f64]) -> f64,
{
    if !taper.is_unit_energy() {
        return Err(Error::UnsupportedTaper {
            op: "expected_periodogram_oracle",
            taper: taper.id(),
        });
    }
    let sides = taper.window().sides();
    let d = sides.len();
    let steps: Vec<f64> = sides.iter().map(|l| 1.0 / (4.0 * l)).collect();
    let cell: f64 = steps.iter().product();
    let mut values = Vec::with_capacity(grid.len());
    let mut kq = vec![0.0; d];
    for k in grid.nodes() {
        let mut half_counts: Vec<i64> = vec![80; d];
        let mut prev: Option<f64> = None;
        let mut done = None;
        for _ in 0..9 {
            let mut acc = CompensatedSum::new();
            let mut idx: Vec<i64> = half_counts.iter().map(|m| -m).collect();
            'outer: loop {
                let mut delta = [0.0f64; 3];
                for j in 0..d {
                    delta[j] = idx[j] as f64 * steps[j];
                    kq[j] = k[j] + delta[j];
                }
                let dev = f(&kq) - lambda;
                if dev != 0.0 {
                    acc.add(taper.transform(&delta[..d])?.norm_sqr() * dev);
                }
                for j in (0..d).rev() {
                    idx[j] += 1;
                    if idx[j] <= half_counts[j] {
                        continue 'outer;
                    }
                    idx[j] = -half_counts[j];
                }
                break;
            }
            let v = acc.value() * cell;
            if let Some(p) = prev {
                if (v - p).abs() <= 1e-7 * lambda.abs().max(v.abs()) {
                    done = Some(v);
                    break;
                }
            }
            prev = Some(v);
            half_counts.iter_mut().for_each(|m| *m *= 2);
        }
        match done {
            Some(v) => values.push(lambda + v),
            None => {
                return Err(Error::InsufficientExtent {
                    op: "expected_periodogram_oracle",
                })
            }
        }
    }
    let mut meta = EstimateMeta::new(EstimatorKind::Oracle);
    meta.tapers = vec![taper.id()];
    meta.debiased = true;
    Ok(SpectralEstimate::new(grid.clone(), values, meta))
}

/// `E I_h(k) = ∫ |H(k' - k)|^2 f(k') dk' + lambda^2 |H(k)|^2`.
pub fn expected_periodogram_oracle<F>(
    f: F,
    taper: &Taper,
    grid: &Arc<WavenumberGrid>,
    lambda: f64,
) -> Result<SpectralEstimate>
where
    F: Fn(&[f64]) -> f64,
{
    let mut est = smoothed_spectrum_oracle(f, taper, grid, lambda)?;
    for (v, k) in est.values.iter_mut().zip(grid.nodes()) {
        *v += lambda * lambda * taper.transform(k)?.norm_sqr();
    }
    est.meta.debiased = false;
    Ok(est)
}

/// Relation (complementary covariance) `E[(J - EJ)^2]` of the box-tapered DFT at `k`.
///
/// `pcf` is the isotropic pair correlation `rho(r) / lambda^2`, assumed to equal 1
/// beyond `range`.
pub fn dft_relation_oracle<P>(taper: &Taper, pcf: P, lambda: f64, k: &[f64], range: f64) -> Result<Complex64>
where
    P: Fn(f64) -> f64,
{
    if !matches!(taper.kind(), TaperKind::Box) {
        return Err(Error::UnsupportedTaper {
            op: "dft_relation_oracle",
            taper: taper.id(),
        });
    }
    let window = taper.window();
    let sides = window.sides();
    let d = sides.len();
    let vol = window.volume();
    // lambda ∫ h^2 exp(-2 pi i (2k)·x) dx
    let direct: f64 = sides
        .iter()
        .zip(k)
        .map(|(l, kj)| sin_ratio(2.0 * kj, *l) / l)
        .product();
    let mut total = Complex64::new(lambda * direct, 0.0);

    // ∫ U(k, z) exp(-2 pi i k·z) (rho(z) - lambda^2) dz over the box |z_j| <= r
    let reach: Vec<f64> = sides.iter().map(|l| l.min(range)).collect();
    let integrand = |z: &[f64]| -> Complex64 {
        let r = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        let dev = lambda * lambda * (pcf(r) - 1.0);
        if dev == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let mut u = Complex64::new(1.0 / vol, 0.0);
        let mut s = 0.0;
        for j in 0..d {
            let half = sides[j] / 2.0;
            let a = (-half).max(-half - z[j]);
            let b = half.min(half - z[j]);
            if b <= a {
                return Complex64::new(0.0, 0.0);
            }
            let gamma = 4.0 * std::f64::consts::PI * k[j];
            // ∫_a^b exp(-i gamma x) dx
            u *= Complex64::from_polar((b - a) * crate::numerics::sinc(0.5 * gamma * (b - a)), -0.5 * gamma * (a + b));
            s += k[j] * z[j];
        }
        u * phase(s) * dev
    };
    let mut prev: Option<Complex64> = None;
    let mut panels = 32usize;
    for _ in 0..7 {
        let v = product_simpson(&integrand, &reach, panels);
        if let Some(p) = prev {
            if (v - p).norm() <= 1e-8 * (lambda + v.norm()) {
                total += v;
                return Ok(total);
            }
        }
        prev = Some(v);
        panels *= 2;
    }
    Err(Error::QuadratureNonConvergent {
        op: "dft_relation_oracle",
        error: 0.0,
    })
}

/// Tensor-product composite Simpson over `prod_j [-reach_j, reach_j]`.
fn product_simpson<F: Fn(&[f64]) -> Complex64>(f: &F, reach: &[f64], panels: usize) -> Complex64 {
    let d = reach.len();
    let n = 2 * panels;
    let w = |i: usize| -> f64 {
        if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        }
    };
    let mut acc = CompensatedComplex::new();
    let mut idx = vec![0usize; d];
    let mut z = vec![0.0; d];
    'outer: loop {
        let mut weight = 1.0;
        for j in 0..d {
            let h = 2.0 * reach[j] / n as f64;
            z[j] = -reach[j] + h * idx[j] as f64;
            weight *= w(idx[j]) * h / 3.0;
        }
        acc.add(f(&z) * weight);
        for j in (0..d).rev() {
            idx[j] += 1;
            if idx[j] <= n {
                continue 'outer;
            }
            idx[j] = 0;
        }
        break;
    }
    acc.value()
}

/// Variance of `J_h(0)` for the box taper via the radial set covariance:
/// `lambda + |B|^{-1} ∫ nu_B(z) (rho(z) - lambda^2) dz`.
pub fn box_dft_variance_at_zero<P>(window: &CuboidWindow, pcf: P, lambda: f64, range: f64) -> f64
where
    P: Fn(f64) -> f64,
{
    let d = window.dim();
    let sphere = if d == 2 {
        2.0 * std::f64::consts::PI
    } else {
        4.0 * std::f64::consts::PI
    };
    let r_max = range.min(window.diameter());
    let integral = simpson(
        |r| {
            lambda * lambda * (pcf(r) - 1.0) * window.radial_set_covariance(r) * sphere * r.powi(d as i32 - 1)
        },
        0.0,
        r_max,
        512,
    );
    lambda + integral / window.volume()
}

/// Leading covariance of two tapered periodograms of a Poisson process away from
/// the origin: `lambda ∫ h_p^2 h_q^2 + lambda^2 [p = q]`.
pub fn poisson_cov_oracle(p: &Taper, q: &Taper, lambda: f64) -> Result<f64> {
    let same = if p == q { 1.0 } else { 0.0 };
    Ok(lambda * p.cross_norm4(q)? + lambda * lambda * same)
}

/// Leading-order periodogram variance from the spectral deviations:
/// `lambda^4 (f4 - f2 (1 + 2 f2)) + lambda^2 f2 + lambda^2 + lambda ||h||_4^4`.
pub fn variance_oracle(f2_tilde: f64, f4_tilde: f64, lambda: f64, norm4: f64) -> f64 {
    let l2 = lambda * lambda;
    l2 * l2 * (f4_tilde - f2_tilde * (1.0 + 2.0 * f2_tilde)) + l2 * f2_tilde + l2 + lambda * norm4
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn w10() -> CuboidWindow {
        CuboidWindow::square(2, 10.0).unwrap()
    }

    fn custom(nodes: &[[f64; 2]]) -> Arc<WavenumberGrid> {
        let v: Vec<Vec<f64>> = nodes.iter().map(|k| k.to_vec()).collect();
        Arc::new(WavenumberGrid::custom(2, &v).unwrap())
    }

    #[test]
    fn empty_pattern_gives_zero() {
        let w = w10();
        let g = Arc::new(WavenumberGrid::fourier(&w, &[2, 2], false).unwrap());
        let p = PointPattern::empty(w.clone());
        let j = dft(&p, &Taper::boxcar(&w), &g).unwrap();
        assert!(j.values.iter().all(|z| z.norm() == 0.0));
        let s = subtracted_periodogram(&p, &Taper::boxcar(&w), &g).unwrap();
        assert!(s.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn single_center_point() {
        let w = CuboidWindow::new(vec![0.0, 0.0], vec![10.0, 10.0]).unwrap();
        let p = PointPattern::new(&[vec![5.0, 5.0]], w.clone()).unwrap();
        let g = custom(&[[0.0, 0.0], [0.037, -0.2], [1.3, 2.9]]);
        let j = dft(&p, &Taper::boxcar(&w), &g).unwrap();
        for z in &j.values {
            assert!((z.re - 0.1).abs() < 1e-15 && z.im == 0.0);
        }
        assert_eq!(j.translation, vec![5.0, 5.0]);
        let i = periodogram(&p, &Taper::boxcar(&w), &g).unwrap();
        assert!(i.values.iter().all(|v| (v - 0.01).abs() < 1e-15));
    }

    #[test]
    fn destructive_interference() {
        let w = w10();
        let p = PointPattern::new(&[vec![0.0, 0.0], vec![1.0, 0.0]], w.clone()).unwrap();
        let g = custom(&[[0.5, 0.0]]);
        let i = periodogram(&p, &Taper::boxcar(&w), &g).unwrap();
        assert!(i.values[0].abs() < 1e-30);
    }

    #[test]
    fn debias_examples() {
        let w = w10();
        let b = Taper::boxcar(&w);
        let p = PointPattern::new(&[vec![0.0, 0.0]], w.clone()).unwrap();
        let g = custom(&[[0.0, 0.0], [0.1, 0.0], [0.03, 0.02]]);
        let j = dft(&p, &b, &g).unwrap();
        let lam = p.intensity_hat();
        let jt = debias_dft(&j, &b, lam).unwrap();
        assert_eq!(jt.values[0], Complex64::new(0.0, 0.0));
        assert_eq!(jt.values[1], j.values[1]);
        let h = b.transform(&[0.03, 0.02]).unwrap();
        let expected = Complex64::new(0.1, 0.0) - h * lam;
        assert!((jt.values[2] - expected).norm() < 1e-15);
        assert!(matches!(debias_dft(&jt, &b, lam), Err(Error::AlreadyDebiased)));
    }

    #[test]
    fn mismatched_window_is_rejected() {
        let w = w10();
        let other = CuboidWindow::square(2, 12.0).unwrap();
        let g = custom(&[[0.1, 0.0]]);
        let p = PointPattern::empty(w);
        assert!(matches!(dft(&p, &Taper::boxcar(&other), &g), Err(Error::WindowMismatch)));
    }

    #[test]
    fn bias_term_examples() {
        let w = w10();
        assert_eq!(bias_term_t(&w, &[0.1, 0.0]), 0.0);
        assert_eq!(bias_term_t(&w, &[0.0, 0.0]), 1e4);
        let direct = (PI * 0.5).sin().powi(2) / (PI * 0.05).powi(2) * 100.0;
        assert!((bias_term_t(&w, &[0.05, 0.0]) - direct).abs() < 1e-10);
    }

    #[test]
    fn poisson_oracles() {
        let w = CuboidWindow::square(2, 100.0).unwrap();
        let b = Taper::boxcar(&w);
        let v = poisson_cov_oracle(&b, &b, 0.01).unwrap();
        assert!((v - (0.01 / 1e4 + 1e-4)).abs() < 1e-18);
        let vo = variance_oracle(0.0, 0.0, 0.01, b.norm4().unwrap());
        assert!((vo - 1.01e-4).abs() < 1e-18);
        assert!(variance_oracle(1.0, 2.0, 0.01, 1e-4) > variance_oracle(1.0, 1.0, 0.01, 1e-4));
        let s1 = Taper::sine(&w, &[1, 2]).unwrap();
        let s2 = Taper::sine(&w, &[2, 2]).unwrap();
        let c = poisson_cov_oracle(&s1, &s2, 0.01).unwrap();
        assert!((c - 0.01 * (1.0 / 100.0) * (1.5 / 100.0)).abs() < 1e-18);
    }

    #[test]
    fn poisson_expected_periodogram_is_exact() {
        let w = w10();
        let b = Taper::boxcar(&w);
        let g = custom(&[[0.03, 0.01], [0.0, 0.0], [0.25, -0.07]]);
        let lam = 0.5;
        let e = expected_periodogram_oracle(|_| lam, &b, &g, lam).unwrap();
        for (v, k) in e.values.iter().zip(g.nodes()) {
            let exact = lam + lam * lam * bias_term_t(&w, k) / w.volume();
            assert!((v - exact).abs() < 1e-14 * exact);
        }
    }

    #[test]
    fn relation_at_zero_is_variance_for_poisson() {
        let w = w10();
        let b = Taper::boxcar(&w);
        let rel = dft_relation_oracle(&b, |_| 1.0, 0.3, &[0.0, 0.0], 1.0).unwrap();
        assert!((rel.re - 0.3).abs() < 1e-14 && rel.im == 0.0);
        let far = dft_relation_oracle(&b, |_| 1.0, 0.3, &[0.7, 0.0], 1.0).unwrap();
        assert!(far.norm() < 0.05 * 0.3);
    }
}
