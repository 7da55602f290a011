//! Isotropic (radial) spectral estimators.
//!
//! Pair sums use the rotational kernel
//! `K(t, r) = Gamma(d/2) (pi t r)^{-nu} J_nu(2 pi t r)`, `nu = d/2 - 1`, which is the
//! average of `exp(-2 pi i t u·z)` over unit directions `u` for `||z|| = r`.

use std::f64::consts::PI;

use crate::bessel::{adaptive_simpson, gamma_order_plus_one, hankel_transform_with, BesselOrder};
use crate::error::{Error, Result};
use crate::estimate::{RadialEstimate, RadialMeta};
use crate::numerics::CompensatedSum;
use crate::pattern::PointPattern;
use crate::tapers::{Taper, TaperKind};
use crate::window::CuboidWindow;

/// Weight applied to point pairs by the isotropic estimators.
#[derive(Debug, Clone, PartialEq)]
pub enum PairTaper {
    /// `h_I ≡ 1`; needs no tuning.
    None,
    /// Squared-exponential weight on difference vectors.
    Hermite(Taper),
}

impl PairTaper {
    pub fn hermite(window: &CuboidWindow, a: f64) -> Result<Self> {
        Ok(Self::Hermite(Taper::hermite(window, a)?))
    }

    /// Parse `none` or `hermite[:a]`.
    pub fn parse(spec: &str, window: &CuboidWindow) -> Result<Self> {
        if spec.trim() == "none" {
            return Ok(Self::None);
        }
        let t = Taper::parse(spec, window)?;
        match t.kind() {
            TaperKind::HermiteRadial(_) => Ok(Self::Hermite(t)),
            _ => Err(Error::UnsupportedTaper {
                op: "isotropic",
                taper: t.id(),
            }),
        }
    }

    #[inline]
    pub fn eval(&self, z: &[f64]) -> f64 {
        match self {
            Self::None => 1.0,
            Self::Hermite(t) => t.eval(z),
        }
    }

    pub fn id(&self) -> String {
        match self {
            Self::None => "none".into(),
            Self::Hermite(t) => t.id(),
        }
    }
}

/// Surface area of the unit sphere `S^{d-1}`.
pub fn sphere_area(d: usize) -> f64 {
    match d {
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => panic!("supported dimensions are 2 and 3"),
    }
}

/// Rotational kernel `K(t, r)`, with `K(t, 0) = 1`.
#[inline]
pub fn rotational_kernel(order: BesselOrder, t: f64, r: f64) -> f64 {
    let x = 2.0 * PI * t * r;
    match order {
        BesselOrder::Zero => libm::j0(x),
        BesselOrder::Half => {
            if x == 0.0 {
                1.0
            } else {
                x.sin() / x
            }
        }
        o => {
            if x == 0.0 {
                1.0
            } else {
                gamma_order_plus_one(o) * (x / 2.0).powf(-o.value()) * o.eval(x)
            }
        }
    }
}

/// Unordered pair distances (and optional taper weights) of a pattern.
#[derive(Debug, Clone)]
pub struct PairSet {
    dim: usize,
    volume: f64,
    n: usize,
    dist: Vec<f64>,
    weight: Vec<f64>,
}

impl PairSet {
    pub fn new(pattern: &PointPattern, taper: &PairTaper) -> Self {
        let n = pattern.len();
        let d = pattern.dim();
        let mut dist = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        let mut weight = Vec::with_capacity(dist.capacity());
        let mut z = vec![0.0; d];
        for i in 0..n {
            let x = pattern.point(i);
            for j in 0..i {
                let y = pattern.point(j);
                let mut r2 = 0.0;
                for k in 0..d {
                    z[k] = x[k] - y[k];
                    r2 += z[k] * z[k];
                }
                dist.push(r2.sqrt());
                weight.push(taper.eval(&z));
            }
        }
        Self {
            dim: d,
            volume: pattern.window().volume(),
            n,
            dist,
            weight,
        }
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    /// `|B|^{-1} sum_{x != y} h_I(x - y) K(t, ||x - y||)` over ordered pairs.
    pub fn kernel_sum(&self, t: f64) -> f64 {
        let order = BesselOrder::for_dimension(self.dim).expect("d in {2, 3}");
        let mut acc = CompensatedSum::new();
        for (r, w) in self.dist.iter().zip(&self.weight) {
            acc.add(w * rotational_kernel(order, t, *r));
        }
        2.0 * acc.value() / self.volume
    }

    fn intensity_hat(&self) -> f64 {
        self.n as f64 / self.volume
    }

    fn lambda_sq_hat(&self) -> f64 {
        let n = self.n as f64;
        if n <= 1.0 {
            0.0
        } else {
            n * (n - 1.0) / (self.volume * self.volume)
        }
    }
}

/// Rotation-averaged Bartlett periodogram
/// `lambda_hat + (2 pi / (|B| |S^{d-1}| t^nu)) sum_{x != y} J_nu(2 pi t r) r^{-nu}`.
pub fn rotavg_bartlett(pattern: &PointPattern, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("radial wavenumber must be positive, got {t}")));
    }
    let pairs = PairSet::new(pattern, &PairTaper::None);
    Ok(pairs.intensity_hat() + pairs.kernel_sum(t))
}

/// [`rotavg_bartlett`] at several magnitudes, sharing the pair distances.
pub fn rotavg_bartlett_curve(pattern: &PointPattern, t_nodes: &[f64]) -> Result<RadialEstimate> {
    check_nodes(t_nodes)?;
    let pairs = PairSet::new(pattern, &PairTaper::None);
    Ok(rotavg_from_pairs(&pairs, t_nodes))
}

pub fn rotavg_from_pairs(pairs: &PairSet, t_nodes: &[f64]) -> RadialEstimate {
    let lam = pairs.intensity_hat();
    let values = t_nodes.iter().map(|t| lam + pairs.kernel_sum(*t)).collect();
    RadialEstimate::new(t_nodes.to_vec(), values, RadialMeta::new("rotavg_bartlett"))
}

fn check_nodes(t_nodes: &[f64]) -> Result<()> {
    if t_nodes.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::InvalidParameter("radial wavenumbers must be positive".into()));
    }
    if t_nodes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("radial nodes must be strictly increasing".into()));
    }
    Ok(())
}

/// Index of the first strict local minimum; a flat run counts from its first node.
pub fn first_local_minimum(values: &[f64]) -> Option<usize> {
    let n = values.len();
    let mut i = 1;
    while i + 1 < n {
        if values[i] < values[i - 1] {
            let mut j = i;
            while j + 1 < n && values[j + 1] == values[i] {
                j += 1;
            }
            if j + 1 < n && values[j + 1] > values[i] {
                return Some(i);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    None
}

/// Clamp every value before the first local minimum to the minimum value.
///
/// Without a local minimum the curve is returned unchanged and flagged `no_local_minimum`.
pub fn truncate_at_first_minimum(mut radial: RadialEstimate) -> RadialEstimate {
    match first_local_minimum(&radial.values) {
        Some(i0) => {
            let v0 = radial.values[i0];
            radial.values[..i0].iter_mut().for_each(|v| *v = v0);
            radial.meta.flags.push(format!("t0={}", radial.t[i0]));
        }
        None => radial.meta.flags.push("no_local_minimum".into()),
    }
    radial
}

/// Diggle's estimator: the rotation-averaged periodogram, truncated below its first local minimum.
pub fn diggle_estimator(pattern: &PointPattern, t_nodes: &[f64]) -> Result<RadialEstimate> {
    if t_nodes.len() < 3 {
        return Err(Error::InvalidParameter("need at least three radial nodes".into()));
    }
    let mut r = truncate_at_first_minimum(rotavg_bartlett_curve(pattern, t_nodes)?);
    r.meta.source = "diggle".into();
    Ok(r)
}

/// Samples of the rotation average `p(r)` of `nu_B(r u) h_I(r u)` on a Simpson grid
/// with breakpoints at the kinks of the set covariance.
#[derive(Debug, Clone)]
struct RadialProfile {
    /// (nodes, Simpson weight times Jacobian, values) per segment; odd node counts.
    segments: Vec<(Vec<f64>, Vec<f64>, Vec<f64>)>,
}

impl RadialProfile {
    /// Segments start at the window's kink radii. Past a side length the profile
    /// behaves like `sqrt(r - l)`, so those segments use `r = a + (b - a) u^2`.
    fn new<F: Fn(f64) -> f64>(window: &CuboidWindow, f: F, max_step: f64) -> Self {
        let mut breaks = vec![0.0, window.diameter()];
        let sides = window.sides();
        breaks.extend(sides.iter().copied());
        for i in 0..sides.len() {
            for j in 0..i {
                breaks.push(sides[i].hypot(sides[j]));
            }
        }
        breaks.sort_by(f64::total_cmp);
        breaks.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
        let segments = breaks
            .windows(2)
            .map(|w| {
                let (a, b) = (w[0], w[1]);
                let graded = a > 0.0;
                let stretch = if graded { 2.0 } else { 1.0 };
                let n = ((stretch * (b - a) / max_step).ceil() as usize).max(4);
                let n = n.div_ceil(4) * 4;
                let h = 1.0 / n as f64;
                let mut nodes = Vec::with_capacity(n + 1);
                let mut weights = Vec::with_capacity(n + 1);
                for i in 0..=n {
                    let u = h * i as f64;
                    let (r, jac) = if graded {
                        (a + (b - a) * u * u, 2.0 * (b - a) * u)
                    } else {
                        (a + (b - a) * u, b - a)
                    };
                    nodes.push(r);
                    weights.push(jac * h / 3.0);
                }
                let values = nodes.iter().map(|r| f(*r)).collect();
                (nodes, weights, values)
            })
            .collect();
        Self { segments }
    }

    /// Simpson integral of `p(r) g(r)` on the fine nodes and on every other node.
    fn integrate<G: Fn(f64) -> f64>(&self, g: G) -> (f64, f64) {
        let mut fine = CompensatedSum::new();
        let mut coarse = CompensatedSum::new();
        for (nodes, weights, values) in &self.segments {
            let n = nodes.len() - 1;
            for i in 0..=n {
                let v = values[i] * g(nodes[i]) * weights[i];
                let w = if i == 0 || i == n {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                fine.add(w * v);
                if i % 2 == 0 {
                    let m = i / 2;
                    let wc = if i == 0 || i == n {
                        1.0
                    } else if m % 2 == 1 {
                        4.0
                    } else {
                        2.0
                    };
                    coarse.add(2.0 * wc * v);
                }
            }
        }
        (fine.value(), coarse.value())
    }
}

/// Precomputed bias term `Bias_I(t)` for a window and pair taper, reusable across patterns.
///
/// `Bias_I(t) = (2 pi / |B|) ∫ p(r) (r/t)^nu J_nu(2 pi t r) r dr`, where `p(r)` is the
/// rotation average of `nu_B(z) h_I(z)` at `||z|| = r`.
#[derive(Debug, Clone)]
pub struct IsotropicBias {
    window: CuboidWindow,
    taper: PairTaper,
    profile: RadialProfile,
    order: BesselOrder,
}

impl IsotropicBias {
    /// Profile resolved for magnitudes up to `t_max`.
    pub fn new(window: &CuboidWindow, taper: &PairTaper, t_max: f64) -> Result<Self> {
        let order = BesselOrder::for_dimension(window.dim())?;
        let step = (1.0 / (16.0 * t_max.max(1e-12))).min(window.diameter() / 256.0);
        let w = window.clone();
        let tp = taper.clone();
        let profile = RadialProfile::new(window, |r| w.radial_average(r, |z| tp.eval(z)), step);
        Ok(Self {
            window: window.clone(),
            taper: taper.clone(),
            profile,
            order,
        })
    }

    pub fn window(&self) -> &CuboidWindow {
        &self.window
    }

    pub fn taper(&self) -> &PairTaper {
        &self.taper
    }

    /// `Bias_I(t)` with its quadrature error estimate.
    pub fn eval_with_error(&self, t: f64) -> (f64, f64) {
        let d = self.window.dim();
        let scale = sphere_area(d) / self.window.volume();
        let order = self.order;
        let (fine, coarse) = self
            .profile
            .integrate(|r| rotational_kernel(order, t, r) * r.powi(d as i32 - 1));
        (scale * fine, scale * (fine - coarse).abs() / 15.0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.eval_with_error(t).0
    }

    /// `(2 pi / |B|) ∫ p(r) (rho(r) - lambda^2) (r/t)^nu J_nu(2 pi t r) r dr` for a pcf.
    pub fn deviation_term<P: Fn(f64) -> f64>(&self, pcf: P, lambda: f64, t: f64) -> f64 {
        let d = self.window.dim();
        let scale = sphere_area(d) / self.window.volume();
        let order = self.order;
        let (fine, _) = self.profile.integrate(|r| {
            lambda * lambda * (pcf(r) - 1.0) * rotational_kernel(order, t, r) * r.powi(d as i32 - 1)
        });
        scale * fine
    }
}

/// `Bias_I(t)` for one magnitude; see [`IsotropicBias`].
pub fn isotropic_bias(window: &CuboidWindow, taper: &PairTaper, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("radial wavenumber must be positive, got {t}")));
    }
    let bias = IsotropicBias::new(window, taper, t)?;
    let (v, err) = bias.eval_with_error(t);
    if err > 1e-6 * window.volume() {
        return Err(Error::QuadratureNonConvergent {
            op: "isotropic_bias",
            error: err,
        });
    }
    Ok(v)
}

/// Debiased isotropic estimator
/// `lambda_hat + |B|^{-1} sum_{x != y} h_I K(t, r) - lambda_sq_hat Bias_I(t)`.
///
/// Values may be negative.
pub fn debiased_isotropic(pattern: &PointPattern, taper: &PairTaper, t_nodes: &[f64]) -> Result<RadialEstimate> {
    check_nodes(t_nodes)?;
    let t_max = t_nodes.last().copied().unwrap_or(1.0);
    let bias = IsotropicBias::new(pattern.window(), taper, t_max)?;
    debiased_isotropic_with(pattern, &bias, t_nodes)
}

/// [`debiased_isotropic`] with a precomputed bias term.
pub fn debiased_isotropic_with(pattern: &PointPattern, bias: &IsotropicBias, t_nodes: &[f64]) -> Result<RadialEstimate> {
    check_nodes(t_nodes)?;
    if bias.window() != pattern.window() {
        return Err(Error::WindowMismatch);
    }
    let pairs = PairSet::new(pattern, bias.taper());
    Ok(debiased_from_pairs(&pairs, bias, t_nodes))
}

pub fn debiased_from_pairs(pairs: &PairSet, bias: &IsotropicBias, t_nodes: &[f64]) -> RadialEstimate {
    let lam = pairs.intensity_hat();
    let l2 = pairs.lambda_sq_hat();
    let values = t_nodes
        .iter()
        .map(|t| lam + pairs.kernel_sum(*t) - l2 * bias.eval(*t))
        .collect();
    let mut meta = RadialMeta::new(format!("debiased_isotropic:{}", bias.taper().id()));
    meta.sign_safe = false;
    RadialEstimate::new(t_nodes.to_vec(), values, meta)
}

/// Isotropic spectral density from a pair correlation function:
/// `f(t) = lambda + 2 pi ∫ (rho(r) - lambda^2) (r/t)^nu J_nu(2 pi t r) r dr`.
///
/// `pcf - 1` must be negligible beyond `r_max`. At `t = 0` the small-argument
/// limit of the kernel is used.
pub fn isotropic_sdf_from_pcf<P: Fn(f64) -> f64>(pcf: P, lambda: f64, d: usize, t: f64, r_max: f64) -> Result<f64> {
    isotropic_sdf_from_pcf_with(pcf, lambda, d, t, r_max, &[])
}

/// As [`isotropic_sdf_from_pcf`] with known kinks of the pcf.
pub fn isotropic_sdf_from_pcf_with<P: Fn(f64) -> f64>(
    pcf: P,
    lambda: f64,
    d: usize,
    t: f64,
    r_max: f64,
    kinks: &[f64],
) -> Result<f64> {
    let order = BesselOrder::for_dimension(d)?;
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("radial wavenumber must be non-negative, got {t}")));
    }
    let l2 = lambda * lambda;
    let nu = order.value();
    if t == 0.0 {
        let mut breaks = vec![0.0];
        breaks.extend(kinks.iter().copied().filter(|k| *k > 0.0 && *k < r_max));
        breaks.push(r_max);
        let integrand = |r: f64| (pcf(r) - 1.0) * r.powf(2.0 * nu + 1.0);
        let scale = adaptive_simpson(|r| integrand(r).abs(), &breaks, r_max / 64.0, f64::INFINITY, "isotropic_sdf_from_pcf")?;
        let q = adaptive_simpson(integrand, &breaks, r_max / 64.0, 1e-10 * scale.value, "isotropic_sdf_from_pcf")?;
        return Ok(lambda + 2.0 * PI * l2 * PI.powf(nu) / gamma_order_plus_one(order) * q.value);
    }
    let q = hankel_transform_with(
        |r| (pcf(r) - 1.0) * (r / t).powf(nu),
        nu,
        2.0 * PI * t,
        r_max,
        kinks,
        1e-10,
    )?;
    Ok(lambda + 2.0 * PI * l2 * q.value)
}

/// Expected rotation-averaged periodogram:
/// `lambda + 2 pi H[(rho - lambda^2)(r/t)^nu nu_B/|B|] + lambda^2 Bias_I(t)`.
pub fn isotropic_expectation_oracle<P: Fn(f64) -> f64>(pcf: P, lambda: f64, window: &CuboidWindow, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("radial wavenumber must be positive, got {t}")));
    }
    let bias = IsotropicBias::new(window, &PairTaper::None, t)?;
    Ok(lambda + bias.deviation_term(pcf, lambda, t) + lambda * lambda * bias.eval(t))
}
