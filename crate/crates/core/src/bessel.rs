//! Bessel functions of the first kind and Hankel transforms.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::CompensatedSum;

/// `J_nu(x)` for `nu` in {0, 1/2, 1, 3/2} and `x >= 0`.
///
/// Integer orders use the `libm` implementations; half-integer orders use their
/// closed trigonometric forms.
pub fn bessel_j(order: f64, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::InvalidParameter(format!("Bessel argument must be non-negative, got {x}")));
    }
    if order == 0.0 {
        Ok(libm::j0(x))
    } else if order == 1.0 {
        Ok(libm::j1(x))
    } else if order == 0.5 {
        Ok(j_half(x))
    } else if order == 1.5 {
        Ok(j_three_halves(x))
    } else {
        Err(Error::UnsupportedBesselOrder(order))
    }
}

/// Bessel function of a fixed supported order, resolved once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BesselOrder {
    Zero,
    Half,
    One,
    ThreeHalves,
}

impl BesselOrder {
    pub fn new(order: f64) -> Result<Self> {
        match order {
            o if o == 0.0 => Ok(Self::Zero),
            o if o == 0.5 => Ok(Self::Half),
            o if o == 1.0 => Ok(Self::One),
            o if o == 1.5 => Ok(Self::ThreeHalves),
            o => Err(Error::UnsupportedBesselOrder(o)),
        }
    }

    /// Order `d/2 - 1` used by radial transforms in `d` dimensions.
    pub fn for_dimension(d: usize) -> Result<Self> {
        Self::new(d as f64 / 2.0 - 1.0)
    }

    pub fn value(self) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Half => 0.5,
            Self::One => 1.0,
            Self::ThreeHalves => 1.5,
        }
    }

    #[inline]
    pub fn eval(self, x: f64) -> f64 {
        match self {
            Self::Zero => libm::j0(x),
            Self::One => libm::j1(x),
            Self::Half => j_half(x),
            Self::ThreeHalves => j_three_halves(x),
        }
    }
}

fn j_half(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    (2.0 / (PI * x)).sqrt() * x.sin()
}

fn j_three_halves(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let core = if x < 0.1 {
        // sin(x)/x - cos(x) by its Taylor series
        let x2 = x * x;
        x2 / 3.0 * (1.0 - x2 / 10.0 * (1.0 - x2 / 28.0 * (1.0 - x2 / 54.0)))
    } else {
        x.sin() / x - x.cos()
    };
    (2.0 / (PI * x)).sqrt() * core
}

/// `Gamma(nu + 1)` for the supported orders.
pub fn gamma_order_plus_one(order: BesselOrder) -> f64 {
    match order {
        BesselOrder::Zero | BesselOrder::One => 1.0,
        BesselOrder::Half => 0.5 * PI.sqrt(),
        BesselOrder::ThreeHalves => 0.75 * PI.sqrt(),
    }
}

/// Value of a quadrature together with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
}

/// Composite Simpson on `[breaks[0], breaks[last]]`, panels split at the breakpoints,
/// doubling the resolution until `|S_2n - S_n| / 15 <= tol`.
///
/// `max_panel` caps the initial panel width. `f` may jump at the breakpoints.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    max_panel: f64,
    tol: f64,
    op: &'static str,
) -> Result<Quadrature> {
    let segments: Vec<(f64, f64)> = breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| (w[0], w[1]))
        .collect();
    if segments.is_empty() {
        return Ok(Quadrature { value: 0.0, error: 0.0 });
    }
    let mut counts: Vec<usize> = segments
        .iter()
        .map(|(a, b)| (((b - a) / max_panel).ceil() as usize).max(2))
        .collect();
    let rule = |counts: &[usize]| -> f64 {
        let mut acc = CompensatedSum::new();
        for ((a, b), n) in segments.iter().zip(counts) {
            let m = 2 * n;
            let h = (b - a) / m as f64;
            // left limit at the right end, so jumps at breakpoints are handled
            acc.add(f(*a) * h / 3.0);
            acc.add(f(b - b.abs() * f64::EPSILON) * h / 3.0);
            for i in 1..m {
                let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                acc.add(w * f(a + h * i as f64) * h / 3.0);
            }
        }
        acc.value()
    };
    let mut prev = rule(&counts);
    let mut error = f64::INFINITY;
    for _ in 0..10 {
        counts.iter_mut().for_each(|n| *n *= 2);
        let next = rule(&counts);
        error = (next - prev).abs() / 15.0;
        if error <= tol {
            return Ok(Quadrature { value: next, error });
        }
        prev = next;
    }
    Err(Error::QuadratureNonConvergent { op, error })
}

/// Hankel transform `∫_0^{r_max} g(r) J_nu(l r) r dr` of a function negligible beyond `r_max`.
///
/// Panels are at most `pi / (4 l)` wide to resolve the Bessel oscillation.
pub fn hankel_transform<G: Fn(f64) -> f64>(g: G, order: f64, l: f64, r_max: f64) -> Result<Quadrature> {
    hankel_transform_with(g, order, l, r_max, &[], 1e-12)
}

/// As [`hankel_transform`] with extra panel breakpoints (kinks of `g`) and an
/// absolute tolerance relative to the integral of `|g(r)| r`.
pub fn hankel_transform_with<G: Fn(f64) -> f64>(
    g: G,
    order: f64,
    l: f64,
    r_max: f64,
    kinks: &[f64],
    rel_tol: f64,
) -> Result<Quadrature> {
    let order = BesselOrder::new(order)?;
    if !(l >= 0.0) {
        return Err(Error::InvalidParameter(format!("transform argument must be non-negative, got {l}")));
    }
    let mut breaks = vec![0.0];
    breaks.extend(kinks.iter().copied().filter(|k| *k > 0.0 && *k < r_max));
    breaks.push(r_max);
    breaks.sort_by(f64::total_cmp);
    let mut max_panel = r_max / 64.0;
    if l > 0.0 {
        max_panel = max_panel.min(PI / (4.0 * l));
    }
    let scale = adaptive_simpson(|r| g(r).abs() * r, &breaks, max_panel, f64::INFINITY, "hankel_transform")?.value;
    if scale == 0.0 {
        return Ok(Quadrature { value: 0.0, error: 0.0 });
    }
    adaptive_simpson(
        |r| g(r) * order.eval(l * r) * r,
        &breaks,
        max_panel,
        rel_tol * scale,
        "hankel_transform",
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j0_at_zero_and_first_root() {
        assert_eq!(bessel_j(0.0, 0.0).unwrap(), 1.0);
        // bisection for the first zero
        let (mut a, mut b) = (2.0, 3.0);
        for _ in 0..80 {
            let m = 0.5 * (a + b);
            if bessel_j(0.0, a).unwrap() * bessel_j(0.0, m).unwrap() <= 0.0 {
                b = m;
            } else {
                a = m;
            }
        }
        assert!((a - 2.404826).abs() < 1e-6);
    }

    fn series(nu: f64, x: f64, g: f64) -> f64 {
        // sum_m (-1)^m (x/2)^{2m+nu} / (m! Gamma(m+nu+1)), g = Gamma(nu+1)
        let mut term = (x / 2.0).powf(nu) / g;
        let mut acc = term;
        for m in 1..40 {
            let m = m as f64;
            term *= -(x * x / 4.0) / (m * (m + nu));
            acc += term;
        }
        acc
    }

    #[test]
    fn orders_match_power_series() {
        let g_half = 0.5 * PI.sqrt();
        for x in [1e-3, 0.05, 0.3, 1.0, 2.5, 7.0] {
            assert!((bessel_j(0.5, x).unwrap() - series(0.5, x, g_half)).abs() < 1e-10);
            assert!((bessel_j(1.5, x).unwrap() - series(1.5, x, 1.5 * g_half)).abs() < 1e-10);
            assert!((bessel_j(0.0, x).unwrap() - series(0.0, x, 1.0)).abs() < 1e-10);
            assert!((bessel_j(1.0, x).unwrap() - series(1.0, x, 1.0)).abs() < 1e-10);
        }
    }

    #[test]
    fn unsupported_order() {
        assert!(matches!(bessel_j(2.0, 1.0), Err(Error::UnsupportedBesselOrder(_))));
    }

    #[test]
    fn gaussian_hankel_pair() {
        let sigma: f64 = 1.0;
        let q = hankel_transform(|r| (-r * r / (4.0 * sigma * sigma)).exp(), 0.0, 1.0, 12.0 * sigma).unwrap();
        let exact = 2.0 * sigma * sigma * (-sigma * sigma).exp();
        assert!((q.value - exact).abs() < 1e-6, "{} vs {}", q.value, exact);
    }

    #[test]
    fn hankel_trivial_cases() {
        assert_eq!(hankel_transform(|_| 0.0, 0.0, 2.0, 5.0).unwrap().value, 0.0);
        // l = 0: plain moment ∫ r e^{-r} dr on [0, 40]
        let q = hankel_transform(|r| (-r).exp(), 0.0, 0.0, 40.0).unwrap();
        assert!((q.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn hankel_linearity() {
        let g1 = |r: f64| (-r * r).exp();
        let g2 = |r: f64| 1.0 / (1.0 + r.powi(4));
        let a = 2.5;
        let lhs = hankel_transform(|r| a * g1(r) + g2(r), 0.0, 0.7, 30.0).unwrap().value;
        let rhs = a * hankel_transform(g1, 0.0, 0.7, 30.0).unwrap().value
            + hankel_transform(g2, 0.0, 0.7, 30.0).unwrap().value;
        assert!((lhs - rhs).abs() < 1e-9);
    }
}
