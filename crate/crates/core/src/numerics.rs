//! Small numerical building blocks shared by the estimators.

use num_complex::Complex64;
use std::f64::consts::PI;

/// `sin(pi * x)` with exact zeros at integers.
///
/// Arguments within a few ulps of an integer are snapped to it, so that
/// products such as `(p / l) * l` land on an exact zero.
pub fn sin_pi(x: f64) -> f64 {
    let n = x.round();
    if (x - n).abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
        return 0.0;
    }
    // reduce to [-1, 1]
    let r = x - 2.0 * (x / 2.0).round();
    (PI * r).sin()
}

/// `sin(pi k l) / (pi k)` with the limit `l` at `k = 0`.
pub fn sin_ratio(k: f64, l: f64) -> f64 {
    if k == 0.0 {
        return l;
    }
    let x = k * l;
    if x.abs() < 1e-8 {
        // sin(pi x)/(pi k) = l * (1 - (pi x)^2 / 6 + ...)
        let px = PI * x;
        return l * (1.0 - px * px / 6.0);
    }
    sin_pi(x) / (PI * k)
}

/// `sin(x) / x` with the limit 1 at 0.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-6 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// `exp(-2 pi i s)` with `s` reduced modulo 1 before evaluating the trig functions.
#[inline]
pub fn phase(s: f64) -> Complex64 {
    let r = s - s.round();
    let a = 2.0 * PI * r;
    let (sn, cs) = a.sin_cos();
    Complex64::new(cs, -sn)
}

/// Neumaier-compensated sum of real terms.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated complex accumulator (componentwise Neumaier).
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedComplex {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl CompensatedComplex {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Composite Simpson rule on `[a, b]` with `panels` panels (2 subintervals each).
pub fn simpson<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, panels: usize) -> f64 {
    let n = 2 * panels.max(1);
    let h = (b - a) / n as f64;
    let mut acc = CompensatedSum::new();
    acc.add(f(a));
    acc.add(f(b));
    for i in 1..n {
        let x = a + h * i as f64;
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc.add(w * f(x));
    }
    acc.value() * h / 3.0
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / dp;
            if (z - z1).abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Welford running mean and variance.
#[derive(Debug, Clone, Default)]
pub struct RunningStats {
    n: u64,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance (0 for fewer than two samples).
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        if self.n < 2 {
            return f64::INFINITY;
        }
        (self.variance() / self.n as f64).sqrt()
    }
}

/// Unit directions used for angular averaging on the sphere `S^{d-1}`, with weights summing to 1.
///
/// In 2D: 512 equally spaced angles. In 3D: a product rule with 24 Gauss–Legendre
/// nodes in `cos(theta)` and 48 equally spaced azimuths.
pub fn sphere_rule(d: usize) -> Vec<(Vec<f64>, f64)> {
    match d {
        2 => {
            let n = 512;
            (0..n)
                .map(|i| {
                    let a = 2.0 * PI * i as f64 / n as f64;
                    (vec![a.cos(), a.sin()], 1.0 / n as f64)
                })
                .collect()
        }
        3 => {
            let (z, w) = gauss_legendre(24);
            let na = 48;
            let mut out = Vec::with_capacity(z.len() * na);
            for (zi, wi) in z.iter().zip(&w) {
                let s = (1.0 - zi * zi).max(0.0).sqrt();
                for j in 0..na {
                    let a = 2.0 * PI * j as f64 / na as f64;
                    out.push((vec![s * a.cos(), s * a.sin(), *zi], wi / 2.0 / na as f64));
                }
            }
            out
        }
        _ => panic!("sphere_rule supports d = 2 or 3"),
    }
}
