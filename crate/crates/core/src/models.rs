//! Point-process models: simulators and second-order theory.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};

use crate::error::{Error, Result};
use crate::isotropic::isotropic_sdf_from_pcf_with;
use crate::pattern::PointPattern;
use crate::window::CuboidWindow;

/// Intensity shared by the built-in study variants.
pub const STUDY_INTENSITY: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelSpec {
    Poisson { lambda: f64 },
    /// Poisson parents (`kappa`), Poisson(`mu`) offspring displaced by `N(0, sigma^2 I)`.
    Thomas { kappa: f64, sigma: f64, mu: f64 },
    /// Dependent thinning of a Poisson(`lambda_p`) proposal with hard-core radius `radius`.
    Matern2 { lambda_p: f64, radius: f64 },
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            ModelSpec::Poisson { lambda } => lambda >= 0.0 && lambda.is_finite(),
            ModelSpec::Thomas { kappa, sigma, mu } => {
                kappa >= 0.0 && sigma > 0.0 && mu >= 0.0 && kappa.is_finite() && sigma.is_finite() && mu.is_finite()
            }
            ModelSpec::Matern2 { lambda_p, radius } => lambda_p >= 0.0 && radius > 0.0 && lambda_p.is_finite() && radius.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("invalid model parameters {self:?}")))
        }
    }
}

/// Volume of the `d`-ball of radius `r`.
pub fn ball_volume(d: usize, r: f64) -> f64 {
    match d {
        2 => PI * r * r,
        3 => 4.0 / 3.0 * PI * r * r * r,
        _ => panic!("supported dimensions are 2 and 3"),
    }
}

/// Volume of the intersection of two `d`-balls of radius `big_r` at distance `r`.
pub fn ball_overlap(d: usize, big_r: f64, r: f64) -> f64 {
    if r >= 2.0 * big_r {
        return 0.0;
    }
    match d {
        2 => 2.0 * big_r * big_r * (r / (2.0 * big_r)).acos() - 0.5 * r * (4.0 * big_r * big_r - r * r).sqrt(),
        3 => PI / 12.0 * (4.0 * big_r + r) * (2.0 * big_r - r).powi(2),
        _ => panic!("supported dimensions are 2 and 3"),
    }
}

/// Proposal intensity giving retained intensity `lambda` in Matérn II thinning,
/// from `lambda = (1 - exp(-lambda_p v)) / v` with `v` the hard-core ball volume.
pub fn matern2_proposal_intensity(lambda: f64, radius: f64, d: usize) -> Result<f64> {
    let v = ball_volume(d, radius);
    if lambda * v >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "intensity {lambda} is not attainable with hard-core radius {radius}"
        )));
    }
    Ok(-(1.0 - lambda * v).ln() / v)
}

/// Second-order product density of the Matérn II process (Stoyan's form).
///
/// Zero below the hard-core radius and equal to `lambda^2` beyond twice the radius.
pub fn matern2_product_density(lambda_p: f64, radius: f64, d: usize, r: f64) -> f64 {
    if r < radius {
        return 0.0;
    }
    let v = ball_volume(d, radius);
    let q = (-lambda_p * v).exp();
    if r >= 2.0 * radius {
        return ((1.0 - q) / v).powi(2);
    }
    let u = 2.0 * v - ball_overlap(d, radius, r);
    (2.0 * u * (1.0 - q) - 2.0 * v * (1.0 - (-lambda_p * u).exp())) / (v * u * (u - v))
}

pub type PcfFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A model with a name and, optionally, an externally supplied pair correlation.
#[derive(Clone)]
pub struct Model {
    pub name: String,
    pub spec: ModelSpec,
    pub dim: usize,
    pcf_extension: Option<PcfFn>,
}

impl fmt::Debug for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Model")
            .field("name", &self.name)
            .field("spec", &self.spec)
            .field("dim", &self.dim)
            .field("pcf_extension", &self.pcf_extension.is_some())
            .finish()
    }
}

impl PartialEq for Model {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.spec == other.spec && self.dim == other.dim
    }
}

impl Model {
    pub fn new(name: impl Into<String>, spec: ModelSpec, dim: usize) -> Result<Self> {
        spec.validate()?;
        if !(2..=3).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        Ok(Self {
            name: name.into(),
            spec,
            dim,
            pcf_extension: None,
        })
    }

    pub fn poisson(lambda: f64) -> Result<Self> {
        Self::new("poisson", ModelSpec::Poisson { lambda }, 2)
    }

    /// Thomas process with `mu = lambda / kappa`.
    pub fn thomas(name: &str, lambda: f64, kappa: f64, sigma: f64) -> Result<Self> {
        Self::new(name, ModelSpec::Thomas { kappa, sigma, mu: lambda / kappa }, 2)
    }

    /// Matérn II process tuned to retain intensity `lambda`.
    pub fn matern2(name: &str, lambda: f64, radius: f64) -> Result<Self> {
        let lambda_p = matern2_proposal_intensity(lambda, radius, 2)?;
        Self::new(name, ModelSpec::Matern2 { lambda_p, radius }, 2)
    }

    /// Built-in variants: `poisson`, `ms`, `fl` (Thomas), `r2`, `r5` (Matérn II), all at intensity 0.01.
    pub fn variant(name: &str) -> Result<Self> {
        let lam = STUDY_INTENSITY;
        match name {
            "poisson" => Self::poisson(lam),
            "ms" | "thomas:ms" => Self::thomas("ms", lam, 0.6 * lam, 2.0),
            "fl" | "thomas:fl" => Self::thomas("fl", lam, 0.3 * lam, 6.0),
            "r2" | "matern:r2" => Self::matern2("r2", lam, 2.0),
            "r5" | "matern:r5" => Self::matern2("r5", lam, 5.0),
            _ => Err(Error::Parse(format!("unknown model variant `{name}`"))),
        }
    }

    /// Parse a variant name or `poisson[:lambda]`, `thomas:kappa,sigma,mu`, `matern:lambda_p,radius`.
    pub fn parse(spec: &str) -> Result<Self> {
        if let Ok(m) = Self::variant(spec) {
            return Ok(m);
        }
        let nums = |s: &str| -> Result<Vec<f64>> {
            s.split(',')
                .map(|v| v.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad model parameter `{v}`"))))
                .collect()
        };
        if let Some(rest) = spec.strip_prefix("poisson:") {
            let v = nums(rest)?;
            if v.len() == 1 {
                return Self::poisson(v[0]);
            }
        } else if let Some(rest) = spec.strip_prefix("thomas:") {
            let v = nums(rest)?;
            if v.len() == 3 {
                return Self::new(spec, ModelSpec::Thomas { kappa: v[0], sigma: v[1], mu: v[2] }, 2);
            }
        } else if let Some(rest) = spec.strip_prefix("matern:") {
            let v = nums(rest)?;
            if v.len() == 2 {
                return Self::new(spec, ModelSpec::Matern2 { lambda_p: v[0], radius: v[1] }, 2);
            }
        }
        Err(Error::Parse(format!("unknown model `{spec}`")))
    }

    pub fn with_dim(mut self, dim: usize) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        self.dim = dim;
        Ok(self)
    }

    /// Install a pair correlation function for models without a built-in one.
    pub fn with_pcf(mut self, pcf: PcfFn) -> Self {
        self.pcf_extension = Some(pcf);
        self
    }

    /// Install Stoyan's Matérn II pair correlation (no effect for other models).
    pub fn with_literature_pcf(self) -> Self {
        match self.spec {
            ModelSpec::Matern2 { lambda_p, radius } => {
                let d = self.dim;
                let lam = (1.0 - (-lambda_p * ball_volume(d, radius)).exp()) / ball_volume(d, radius);
                self.with_pcf(Arc::new(move |r| matern2_product_density(lambda_p, radius, d, r) / (lam * lam)))
            }
            _ => self,
        }
    }

    pub fn has_pcf(&self) -> bool {
        !matches!(self.spec, ModelSpec::Matern2 { .. }) || self.pcf_extension.is_some()
    }

    /// First-order intensity.
    pub fn intensity(&self) -> f64 {
        match self.spec {
            ModelSpec::Poisson { lambda } => lambda,
            ModelSpec::Thomas { kappa, mu, .. } => kappa * mu,
            ModelSpec::Matern2 { lambda_p, radius } => {
                let v = ball_volume(self.dim, radius);
                (1.0 - (-lambda_p * v).exp()) / v
            }
        }
    }

    /// Pair correlation `rho(r) / lambda^2`.
    pub fn theoretical_pcf(&self, r: f64) -> Result<f64> {
        if let Some(f) = &self.pcf_extension {
            return Ok(f(r));
        }
        match self.spec {
            ModelSpec::Poisson { .. } => Ok(1.0),
            ModelSpec::Thomas { kappa, sigma, .. } => {
                let s2 = sigma * sigma;
                Ok(1.0 + (-r * r / (4.0 * s2)).exp() / (kappa * (4.0 * PI * s2).powf(self.dim as f64 / 2.0)))
            }
            ModelSpec::Matern2 { .. } => Err(Error::MissingPcf(self.name.clone())),
        }
    }

    /// Distance beyond which `pcf - 1` is negligible, with known kinks.
    fn pcf_support(&self) -> (f64, Vec<f64>) {
        match self.spec {
            ModelSpec::Poisson { .. } => (1.0, Vec::new()),
            ModelSpec::Thomas { sigma, .. } => (24.0 * sigma, Vec::new()),
            ModelSpec::Matern2 { radius, .. } => (2.0 * radius, vec![radius]),
        }
    }

    /// Spectral density at wavenumber `k`.
    pub fn theoretical_sdf(&self, k: &[f64]) -> Result<f64> {
        let t = k.iter().map(|v| v * v).sum::<f64>().sqrt();
        self.theoretical_sdf_radial(t)
    }

    /// Spectral density at magnitude `t` (all models are isotropic).
    pub fn theoretical_sdf_radial(&self, t: f64) -> Result<f64> {
        match self.spec {
            ModelSpec::Poisson { lambda } => Ok(lambda),
            ModelSpec::Thomas { kappa, sigma, mu } if self.pcf_extension.is_none() => {
                Ok(kappa * mu * (1.0 + mu * (-4.0 * PI * PI * sigma * sigma * t * t).exp()))
            }
            _ => {
                let (r_max, kinks) = self.pcf_support();
                let pcf = |r: f64| self.theoretical_pcf(r).unwrap_or(f64::NAN);
                self.theoretical_pcf(0.0)?;
                isotropic_sdf_from_pcf_with(pcf, self.intensity(), self.dim, t, r_max, &kinks)
            }
        }
    }

    /// `(f(k) - lambda) / lambda^2`.
    pub fn deviation_f_tilde(&self, k: &[f64]) -> Result<f64> {
        let lam = self.intensity();
        Ok((self.theoretical_sdf(k)? - lam) / (lam * lam))
    }

    /// Simulate in `window` from a seed.
    pub fn simulate(&self, window: &CuboidWindow, seed: u64) -> Result<PointPattern> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.simulate_with(window, &mut rng)
    }

    pub fn simulate_with<R: Rng + ?Sized>(&self, window: &CuboidWindow, rng: &mut R) -> Result<PointPattern> {
        if window.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: window.dim(),
            });
        }
        let coords = match self.spec {
            ModelSpec::Poisson { lambda } => uniform_points(window, lambda, rng)?,
            ModelSpec::Thomas { kappa, sigma, mu } => thomas_points(window, kappa, sigma, mu, rng)?,
            ModelSpec::Matern2 { lambda_p, radius } => matern2_points(window, lambda_p, radius, rng)?,
        };
        PointPattern::from_flat(coords, window.clone())
    }
}

/// RNG for an independent stream derived from a base seed.
pub fn stream_rng(seed_base: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed_base);
    rng.set_stream(stream);
    rng
}

/// Centered square (or cube) window with `lambda l^d = n`.
pub fn window_for_n(n: usize, lambda: f64, d: usize) -> Result<CuboidWindow> {
    let l = (n as f64 / lambda).powf(1.0 / d as f64);
    CuboidWindow::square(d, l)
}

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> Result<u64> {
    if mean <= 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(mean).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    Ok(dist.sample(rng) as u64)
}

fn uniform_in<R: Rng + ?Sized>(window: &CuboidWindow, rng: &mut R, out: &mut Vec<f64>) {
    for (a, b) in window.lower().iter().zip(window.upper()) {
        out.push(a + (b - a) * rng.random::<f64>());
    }
}

fn uniform_points<R: Rng + ?Sized>(window: &CuboidWindow, lambda: f64, rng: &mut R) -> Result<Vec<f64>> {
    let n = poisson_count(lambda * window.volume(), rng)?;
    let mut out = Vec::with_capacity(n as usize * window.dim());
    for _ in 0..n {
        uniform_in(window, rng, &mut out);
    }
    Ok(out)
}

fn thomas_points<R: Rng + ?Sized>(window: &CuboidWindow, kappa: f64, sigma: f64, mu: f64, rng: &mut R) -> Result<Vec<f64>> {
    let d = window.dim();
    let parents = uniform_points(&window.dilate(6.0 * sigma), kappa, rng)?;
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut out = Vec::new();
    let mut x = vec![0.0; d];
    for p in parents.chunks_exact(d) {
        let k = poisson_count(mu, rng)?;
        for _ in 0..k {
            for j in 0..d {
                x[j] = p[j] + normal.sample(rng);
            }
            if window.contains(&x) {
                out.extend_from_slice(&x);
            }
        }
    }
    Ok(out)
}

fn matern2_points<R: Rng + ?Sized>(window: &CuboidWindow, lambda_p: f64, radius: f64, rng: &mut R) -> Result<Vec<f64>> {
    let d = window.dim();
    let region = window.dilate(radius);
    let proposals = uniform_points(&region, lambda_p, rng)?;
    let n = proposals.len() / d;
    let marks: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();

    // cell grid with cell side >= radius
    let shape: Vec<usize> = region
        .sides()
        .iter()
        .map(|l| ((l / radius).floor() as usize).max(1))
        .collect();
    let cell_of = |x: &[f64]| -> Vec<usize> {
        (0..d)
            .map(|j| {
                let rel = (x[j] - region.lower()[j]) / region.side(j);
                ((rel * shape[j] as f64) as usize).min(shape[j] - 1)
            })
            .collect()
    };
    let flat = |c: &[usize]| c.iter().zip(&shape).fold(0, |acc, (i, n)| acc * n + i);
    let mut cells: Vec<Vec<usize>> = vec![Vec::new(); shape.iter().product()];
    for i in 0..n {
        cells[flat(&cell_of(&proposals[i * d..(i + 1) * d]))].push(i);
    }
    let r2 = radius * radius;
    let mut out = Vec::new();
    let mut neighbor = vec![0usize; d];
    for i in 0..n {
        let x = &proposals[i * d..(i + 1) * d];
        if !window.contains(x) {
            continue;
        }
        let c = cell_of(x);
        let mut survives = true;
        let offsets = 3usize.pow(d as u32);
        'search: for o in 0..offsets {
            let mut rem = o;
            for j in 0..d {
                let delta = (rem % 3) as i64 - 1;
                rem /= 3;
                let v = c[j] as i64 + delta;
                if v < 0 || v >= shape[j] as i64 {
                    continue 'search;
                }
                neighbor[j] = v as usize;
            }
            for &k in &cells[flat(&neighbor)] {
                if k == i || marks[k] >= marks[i] {
                    continue;
                }
                let y = &proposals[k * d..(k + 1) * d];
                let dist2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
                if dist2 < r2 {
                    survives = false;
                    break 'search;
                }
            }
        }
        if survives {
            out.extend_from_slice(x);
        }
    }
    Ok(out)
}
