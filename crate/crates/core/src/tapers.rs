//! Taper families and their Fourier transforms.
//!
//! Box and sine tapers are unit-energy weights on the observation window. The
//! squared-exponential "hermite" taper is a weight on difference vectors used by
//! the isotropic estimators and is not normalized.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::{sin_ratio, sinc, CompensatedSum};
use crate::window::CuboidWindow;

/// Default scale of the squared-exponential radial taper.
pub const HERMITE_DEFAULT_A: f64 = 25.0;

#[derive(Debug, Clone, PartialEq)]
pub enum TaperKind {
    Box,
    /// Separable sine taper with one positive order per dimension.
    Sine(Vec<u32>),
    /// `prod_j exp(-a z_j^2 / (2 l_j)^2)` on difference vectors `z`.
    HermiteRadial(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Taper {
    kind: TaperKind,
    window: CuboidWindow,
    center: Vec<f64>,
    sides: Vec<f64>,
    normalization: f64,
}

impl Taper {
    /// Constant taper `1 / sqrt(|B|)`.
    pub fn boxcar(window: &CuboidWindow) -> Self {
        let normalization = window.volume().sqrt().recip();
        Self::build(TaperKind::Box, window, normalization)
    }

    /// Sine taper `prod_j sqrt(2/l_j) sin(pi p_j (u_j + l_j/2) / l_j)` in centered coordinates `u`.
    pub fn sine(window: &CuboidWindow, orders: &[u32]) -> Result<Self> {
        if orders.len() != window.dim() {
            return Err(Error::DimensionMismatch {
                expected: window.dim(),
                got: orders.len(),
            });
        }
        if orders.contains(&0) {
            return Err(Error::InvalidParameter("sine taper orders must be positive".into()));
        }
        let normalization = window.sides().iter().map(|l| (2.0 / l).sqrt()).product();
        Ok(Self::build(TaperKind::Sine(orders.to_vec()), window, normalization))
    }

    pub fn hermite(window: &CuboidWindow, a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidParameter(format!("hermite scale must be positive, got {a}")));
        }
        Ok(Self::build(TaperKind::HermiteRadial(a), window, 1.0))
    }

    /// All sine tapers with orders in `{1..P}^d`, in lexicographic order.
    pub fn sine_family(window: &CuboidWindow, p: u32) -> Result<Vec<Self>> {
        if p == 0 {
            return Err(Error::InvalidParameter("taper count P must be at least 1".into()));
        }
        let d = window.dim();
        let mut out = Vec::with_capacity((p as usize).pow(d as u32));
        let mut orders = vec![1u32; d];
        loop {
            out.push(Self::sine(window, &orders)?);
            let mut j = d;
            loop {
                if j == 0 {
                    return Ok(out);
                }
                j -= 1;
                if orders[j] < p {
                    orders[j] += 1;
                    break;
                }
                orders[j] = 1;
            }
        }
    }

    /// Parse `box`, `sine:p1,p2[,p3]` or `hermite:a`.
    pub fn parse(spec: &str, window: &CuboidWindow) -> Result<Self> {
        let spec = spec.trim();
        if spec == "box" {
            return Ok(Self::boxcar(window));
        }
        if let Some(rest) = spec.strip_prefix("sine:") {
            let orders = rest
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<u32>()
                        .map_err(|_| Error::Parse(format!("bad sine order `{s}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            return Self::sine(window, &orders);
        }
        if let Some(rest) = spec.strip_prefix("hermite") {
            let a = match rest.strip_prefix(':') {
                Some(v) => v
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad hermite scale `{v}`")))?,
                None if rest.is_empty() => HERMITE_DEFAULT_A,
                None => return Err(Error::Parse(format!("unknown taper `{spec}`"))),
            };
            return Self::hermite(window, a);
        }
        Err(Error::Parse(format!("unknown taper `{spec}`")))
    }

    fn build(kind: TaperKind, window: &CuboidWindow, normalization: f64) -> Self {
        Self {
            kind,
            center: window.center(),
            sides: window.sides(),
            window: window.clone(),
            normalization,
        }
    }

    pub fn kind(&self) -> &TaperKind {
        &self.kind
    }

    pub fn window(&self) -> &CuboidWindow {
        &self.window
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn is_unit_energy(&self) -> bool {
        !matches!(self.kind, TaperKind::HermiteRadial(_))
    }

    /// Short identifier matching the parse syntax.
    pub fn id(&self) -> String {
        match &self.kind {
            TaperKind::Box => "box".into(),
            TaperKind::Sine(p) => format!(
                "sine:{}",
                p.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
            ),
            TaperKind::HermiteRadial(a) => format!("hermite:{a}"),
        }
    }

    /// Evaluate at `x` given in window coordinates; for the hermite taper `x` is a difference vector.
    pub fn eval(&self, x: &[f64]) -> f64 {
        match &self.kind {
            TaperKind::HermiteRadial(a) => x
                .iter()
                .zip(&self.sides)
                .map(|(z, l)| (-a * z * z / (4.0 * l * l)).exp())
                .product(),
            _ => {
                if !self.window.contains(x) {
                    return 0.0;
                }
                let u: Vec<f64> = x.iter().zip(&self.center).map(|(a, c)| a - c).collect();
                self.eval_centered(&u)
            }
        }
    }

    /// Evaluate a box or sine taper at centered coordinates `u` known to lie in the window.
    #[inline]
    pub fn eval_centered(&self, u: &[f64]) -> f64 {
        match &self.kind {
            TaperKind::Box => self.normalization,
            TaperKind::Sine(p) => {
                let mut v = self.normalization;
                for ((uj, lj), pj) in u.iter().zip(&self.sides).zip(p) {
                    v *= (PI * *pj as f64 * (uj + lj / 2.0) / lj).sin();
                }
                v
            }
            TaperKind::HermiteRadial(_) => self.eval(u),
        }
    }

    /// Closed-form Fourier transform `H(k) = ∫ h(u) exp(-2 pi i k·u) du` of the centered taper.
    pub fn transform(&self, k: &[f64]) -> Result<Complex64> {
        match &self.kind {
            TaperKind::Box => {
                let v: f64 = k
                    .iter()
                    .zip(&self.sides)
                    .map(|(kj, lj)| sin_ratio(*kj, *lj))
                    .product();
                Ok(Complex64::new(v * self.normalization, 0.0))
            }
            TaperKind::Sine(p) => {
                let mut acc = Complex64::new(1.0, 0.0);
                for ((kj, lj), pj) in k.iter().zip(&self.sides).zip(p) {
                    acc *= sine_factor(*pj, *lj, *kj);
                }
                Ok(acc)
            }
            TaperKind::HermiteRadial(_) => Err(Error::UnsupportedTaper {
                op: "taper_transform",
                taper: self.id(),
            }),
        }
    }

    /// Per-axis transform factors; their product is `H(k)`.
    pub(crate) fn axis_transform(&self, j: usize, kj: f64) -> Complex64 {
        match &self.kind {
            TaperKind::Box => Complex64::new(sin_ratio(kj, self.sides[j]) / self.sides[j].sqrt(), 0.0),
            TaperKind::Sine(p) => sine_factor(p[j], self.sides[j], kj),
            TaperKind::HermiteRadial(_) => Complex64::new(f64::NAN, f64::NAN),
        }
    }

    /// `∫ h^4`.
    pub fn norm4(&self) -> Result<f64> {
        match &self.kind {
            TaperKind::Box => Ok(1.0 / self.window.volume()),
            TaperKind::Sine(_) => Ok(self.sides.iter().map(|l| 1.5 / l).product()),
            TaperKind::HermiteRadial(_) => Err(Error::UnsupportedTaper {
                op: "taper_norm4",
                taper: self.id(),
            }),
        }
    }

    /// `∫ h_p^2 h_q^2` for two box/sine tapers on the same window.
    pub fn cross_norm4(&self, other: &Taper) -> Result<f64> {
        if self.window != other.window {
            return Err(Error::WindowMismatch);
        }
        match (&self.kind, &other.kind) {
            (TaperKind::Box, TaperKind::Box | TaperKind::Sine(_))
            | (TaperKind::Sine(_), TaperKind::Box) => Ok(1.0 / self.window.volume()),
            (TaperKind::Sine(p), TaperKind::Sine(q)) => Ok(self
                .sides
                .iter()
                .zip(p.iter().zip(q))
                .map(|(l, (a, b))| if a == b { 1.5 / l } else { 1.0 / l })
                .product()),
            _ => Err(Error::UnsupportedTaper {
                op: "cross_norm4",
                taper: if self.is_unit_energy() { other.id() } else { self.id() },
            }),
        }
    }

    /// Per-axis exponential expansion: factor_j(v) = sum_c coef * exp(i omega v), v in [0, l_j].
    fn axis_exponentials(&self, j: usize) -> Vec<(Complex64, f64)> {
        let l = self.sides[j];
        match &self.kind {
            TaperKind::Box => vec![(Complex64::new(l.sqrt().recip(), 0.0), 0.0)],
            TaperKind::Sine(p) => {
                let a = PI * p[j] as f64 / l;
                // sqrt(2/l) sin(a v) = sqrt(2/l) (e^{iav} - e^{-iav}) / (2i)
                let c = Complex64::new(0.0, -0.5 * (2.0 / l).sqrt());
                vec![(c, a), (-c, -a)]
            }
            TaperKind::HermiteRadial(_) => Vec::new(),
        }
    }
}

/// One-dimensional transform of `sqrt(2/l) sin(pi p (u + l/2) / l)` on `[-l/2, l/2]`.
///
/// Evaluated at `|k|` and conjugated for negative `k`, so Hermitian symmetry is exact.
fn sine_factor(p: u32, l: f64, k: f64) -> Complex64 {
    let half = 0.5 * l;
    let alpha = PI * p as f64 / l;
    let beta = 2.0 * PI * k.abs();
    let s_minus = sinc((alpha - beta) * half);
    let s_plus = sinc((alpha + beta) * half);
    let scale = (2.0 / l).sqrt() * half;
    let g = if p % 2 == 1 {
        let sign = if (p / 2) % 2 == 0 { 1.0 } else { -1.0 };
        Complex64::new(sign * scale * (s_minus + s_plus), 0.0)
    } else {
        let sign = if (p / 2) % 2 == 0 { 1.0 } else { -1.0 };
        Complex64::new(0.0, -sign * scale * (s_minus - s_plus))
    };
    if k < 0.0 {
        g.conj()
    } else {
        g
    }
}

/// `∫_0^l exp(i omega v) dv`.
fn exp_integral(omega: f64, l: f64) -> Complex64 {
    let half = 0.5 * omega * l;
    Complex64::from_polar(l * sinc(half), half)
}

/// Spectral window `P^{-d} sum_p |H_p(k)|^2` of a taper family.
pub fn spectral_window(tapers: &[Taper], k: &[f64]) -> Result<f64> {
    if tapers.is_empty() {
        return Err(Error::EmptyTaperList);
    }
    let w = tapers[0].window();
    let mut acc = CompensatedSum::new();
    for t in tapers {
        if t.window() != w {
            return Err(Error::WindowMismatch);
        }
        acc.add(t.transform(k)?.norm_sqr());
    }
    Ok(acc.value() / tapers.len() as f64)
}

/// Spectral bandwidth of a taper together with its numerical provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralBandwidth {
    pub value: f64,
    /// Estimated contribution of the truncated tail to `b_h^2`.
    pub truncation_error: f64,
    /// Set when the integral diverges and `value` is a truncated figure.
    pub divergent: bool,
    /// Radius of the truncation ball in wavenumber units.
    pub truncation_radius: f64,
}

/// `b_h = (∫ ||k||^2 |H(k)|^2 dk)^{1/2}`.
///
/// The box taper has a divergent integral; its value is truncated at
/// `||k|| <= 10 / min_j l_j` and flagged.
pub fn spectral_bandwidth(taper: &Taper) -> Result<SpectralBandwidth> {
    spectral_bandwidth_with(taper, 8)
}

/// As [`spectral_bandwidth`] with `per_lobe` quadrature nodes per `1/l_j`.
pub fn spectral_bandwidth_with(taper: &Taper, per_lobe: usize) -> Result<SpectralBandwidth> {
    let sides = taper.window().sides();
    match taper.kind() {
        TaperKind::Box => {
            let radius = 10.0 / taper.window().min_side();
            let axes: Vec<(Vec<f64>, Vec<f64>)> = sides
                .iter()
                .enumerate()
                .map(|(j, l)| {
                    let h = 1.0 / (per_lobe as f64 * l);
                    let m = (radius / h).ceil() as i64;
                    let ks: Vec<f64> = (-m..=m).map(|i| (i as f64 + 0.5) * h).collect();
                    let w: Vec<f64> = ks.iter().map(|k| taper.axis_transform(j, *k).norm_sqr() * h).collect();
                    (ks, w)
                })
                .collect();
            let mut acc = CompensatedSum::new();
            let d = sides.len();
            let mut idx = vec![0usize; d];
            'outer: loop {
                let mut r2 = 0.0;
                let mut w = 1.0;
                for j in 0..d {
                    let k = axes[j].0[idx[j]];
                    r2 += k * k;
                    w *= axes[j].1[idx[j]];
                }
                if r2 <= radius * radius {
                    acc.add(r2 * w);
                }
                for j in (0..d).rev() {
                    idx[j] += 1;
                    if idx[j] < axes[j].0.len() {
                        continue 'outer;
                    }
                    idx[j] = 0;
                }
                break;
            }
            Ok(SpectralBandwidth {
                value: acc.value().sqrt(),
                truncation_error: f64::INFINITY,
                divergent: true,
                truncation_radius: radius,
            })
        }
        TaperKind::Sine(p) => {
            // |H|^2 is a product of unit-mass factors, so b_h^2 = sum_j ∫ k_j^2 |G_j(k_j)|^2 dk_j.
            let mut total = 0.0;
            let mut tail_total = 0.0;
            let mut radius: f64 = 0.0;
            for (j, l) in sides.iter().enumerate() {
                let cutoff = 64.0 * (p[j] as f64 + 1.0) / l;
                radius = radius.max(cutoff);
                let h = 1.0 / (per_lobe as f64 * l);
                let m = (cutoff / h).round() as i64;
                let mut acc = CompensatedSum::new();
                let mut env = CompensatedSum::new();
                let env_start = m - (m / 8).max(1);
                for i in 0..m {
                    let k = (i as f64 + 0.5) * h;
                    let g2 = taper.axis_transform(j, k).norm_sqr();
                    acc.add(2.0 * k * k * g2 * h);
                    if i >= env_start {
                        env.add(k.powi(4) * g2 * h);
                    }
                }
                // k^2 |G|^2 ~ C / k^2 beyond the cutoff; C from the mean envelope over the last lobes.
                let c = env.value() / ((m - env_start) as f64 * h);
                let k_max = m as f64 * h;
                let tail = 2.0 * c / k_max;
                total += acc.value() + tail;
                tail_total += tail;
            }
            Ok(SpectralBandwidth {
                value: total.sqrt(),
                truncation_error: tail_total,
                divergent: false,
                truncation_radius: radius,
            })
        }
        TaperKind::HermiteRadial(_) => Err(Error::UnsupportedTaper {
            op: "spectral_bandwidth",
            taper: taper.id(),
        }),
    }
}

/// `|∫ h_p h_q exp(-2 pi i tau·x) dx|` with `tau` along axis `axis`.
pub fn taper_correlation(p: &Taper, q: &Taper, axis: usize, tau: f64) -> Result<f64> {
    if p.window() != q.window() {
        return Err(Error::WindowMismatch);
    }
    for t in [p, q] {
        if !t.is_unit_energy() {
            return Err(Error::UnsupportedTaper {
                op: "taper_correlation",
                taper: t.id(),
            });
        }
    }
    let sides = p.window().sides();
    let mut mag = 1.0;
    for (j, l) in sides.iter().enumerate() {
        let beta = if j == axis { 2.0 * PI * tau } else { 0.0 };
        let mut acc = Complex64::new(0.0, 0.0);
        for (ca, wa) in p.axis_exponentials(j) {
            for (cb, wb) in q.axis_exponentials(j) {
                acc += ca * cb * exp_integral(wa + wb - beta, *l);
            }
        }
        mag *= acc.norm();
    }
    Ok(mag)
}

/// Smallest offset `tau` (wavenumber units) on the search grid `0, 1/(8 l), 2/(8 l), ...`
/// at which the correlation of the two tapers' transforms drops below `epsilon`
/// in every axis direction.
///
/// Multiplying by `min_j l_j` gives the spacing multiplier for
/// [`crate::WavenumberGrid::tapered_fourier`].
pub fn tapered_fourier_spacing(p: &Taper, q: &Taper, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    let l = p.window().min_side();
    let order = |t: &Taper| match t.kind() {
        TaperKind::Sine(o) => *o.iter().max().unwrap_or(&1),
        _ => 1,
    };
    let big_p = order(p).max(order(q)) as f64;
    let step = 1.0 / (8.0 * l);
    let limit = 4.0 * big_p / l;
    let d = p.window().dim();
    let mut i = 0u32;
    loop {
        let tau = step * i as f64;
        if tau > limit * (1.0 + 1e-12) {
            return Err(Error::SearchExhausted { epsilon });
        }
        let mut worst: f64 = 0.0;
        for axis in 0..d {
            worst = worst.max(taper_correlation(p, q, axis, tau)?);
        }
        if worst < epsilon {
            return Ok(tau);
        }
        i += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w10() -> CuboidWindow {
        CuboidWindow::square(2, 10.0).unwrap()
    }

    #[test]
    fn eval_examples() {
        let w = w10();
        assert!((Taper::boxcar(&w).eval(&[1.0, -2.0]) - 0.1).abs() < 1e-15);
        assert_eq!(Taper::boxcar(&w).eval(&[6.0, 0.0]), 0.0);
        let s = Taper::sine(&w, &[1, 1]).unwrap();
        assert!((s.eval(&[0.0, 0.0]) - 0.2).abs() < 1e-15);
        let h = Taper::hermite(&w, 25.0).unwrap();
        assert_eq!(h.eval(&[0.0, 0.0]), 1.0);
    }

    #[test]
    fn eval_uses_window_frame() {
        let w = CuboidWindow::new(vec![0.0, 0.0], vec![10.0, 10.0]).unwrap();
        let s = Taper::sine(&w, &[1, 1]).unwrap();
        assert!((s.eval(&[5.0, 5.0]) - 0.2).abs() < 1e-15);
        assert_eq!(s.eval(&[-1.0, 5.0]), 0.0);
    }

    #[test]
    fn box_transform_values() {
        let w = w10();
        let b = Taper::boxcar(&w);
        assert!((b.transform(&[0.0, 0.0]).unwrap().re - 10.0).abs() < 1e-12);
        assert_eq!(b.transform(&[0.3, 0.0]).unwrap().re, 0.0);
        assert_eq!(b.transform(&[0.1, -0.2]).unwrap().norm(), 0.0);
    }

    #[test]
    fn norm4_values() {
        let w = w10();
        assert!((Taper::boxcar(&w).norm4().unwrap() - 0.01).abs() < 1e-16);
        for p in [[1, 1], [2, 3], [5, 8]] {
            let v = Taper::sine(&w, &p).unwrap().norm4().unwrap();
            assert!((v - 2.25 / 100.0).abs() < 1e-16);
            assert!(v >= 1.0 / w.volume());
        }
    }

    #[test]
    fn parse_specs() {
        let w = w10();
        assert_eq!(Taper::parse("box", &w).unwrap().id(), "box");
        assert_eq!(Taper::parse("sine:2,3", &w).unwrap().id(), "sine:2,3");
        assert_eq!(Taper::parse("hermite:25", &w).unwrap().id(), "hermite:25");
        assert!(Taper::parse("sine:2", &w).is_err());
        assert!(Taper::parse("gauss", &w).is_err());
    }

    #[test]
    fn hermite_has_no_pointwise_transform() {
        let w = w10();
        let h = Taper::hermite(&w, 25.0).unwrap();
        assert!(matches!(h.transform(&[0.0, 0.0]), Err(Error::UnsupportedTaper { .. })));
    }

    #[test]
    fn sine_family_orders() {
        let w = w10();
        let fam = Taper::sine_family(&w, 3).unwrap();
        assert_eq!(fam.len(), 9);
        assert_eq!(fam[0].id(), "sine:1,1");
        assert_eq!(fam[8].id(), "sine:3,3");
        assert!(Taper::sine_family(&w, 0).is_err());
    }

    #[test]
    fn spectral_window_of_box_is_bias_kernel() {
        let w = w10();
        let b = Taper::boxcar(&w);
        let k = [0.05, 0.0];
        let t = (PI * 0.5).sin().powi(2) / (PI * 0.05).powi(2) * 100.0;
        let sw = spectral_window(&[b], &k).unwrap();
        assert!((sw - t / 100.0).abs() < 1e-12);
        assert!(matches!(spectral_window(&[], &k), Err(Error::EmptyTaperList)));
    }

    #[test]
    fn tapered_spacing_examples() {
        let w = w10();
        let b = Taper::boxcar(&w);
        let tau = tapered_fourier_spacing(&b, &b, 0.01).unwrap();
        assert!(tau <= 2.0 / 10.0 + 1e-12 && tau > 0.0);
        let first = tapered_fourier_spacing(&b, &b, 1.0 - 1e-9).unwrap();
        assert!((first - 1.0 / 80.0).abs() < 1e-15);
        let s1 = Taper::sine(&w, &[1, 2]).unwrap();
        let s2 = Taper::sine(&w, &[2, 2]).unwrap();
        assert_eq!(tapered_fourier_spacing(&s1, &s2, 1e-8).unwrap(), 0.0);
        let s3 = Taper::sine(&w, &[3, 3]).unwrap();
        let tau3 = tapered_fourier_spacing(&s3, &s3, 0.01).unwrap();
        // squared sine tapers are orthogonal to the first Fourier harmonic
        assert!((tau3 - 0.1).abs() < 1e-12 && (tau - 0.1).abs() < 1e-12);
    }
}
