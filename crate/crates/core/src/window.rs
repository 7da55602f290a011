//! Cuboid observation windows and their set covariance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::numerics::gauss_legendre;

/// An axis-aligned box `[lower_1, upper_1] x ... x [lower_d, upper_d]`, `d` in {2, 3}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CuboidWindow {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl CuboidWindow {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        if !(2..=3).contains(&lower.len()) {
            return Err(Error::UnsupportedDimension(lower.len()));
        }
        for (j, (a, b)) in lower.iter().zip(&upper).enumerate() {
            if !a.is_finite() || !b.is_finite() || b <= a {
                return Err(Error::InvalidWindow(format!(
                    "side {j} has non-positive length ({a}, {b})"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// Window `[-l_1/2, l_1/2] x ...` with the given side lengths.
    pub fn centered(sides: &[f64]) -> Result<Self> {
        Self::new(
            sides.iter().map(|l| -l / 2.0).collect(),
            sides.iter().map(|l| l / 2.0).collect(),
        )
    }

    /// Square (or cube) of side `l` centered at the origin.
    pub fn square(d: usize, l: f64) -> Result<Self> {
        Self::centered(&vec![l; d])
    }

    /// Parse `a1,b1,a2,b2[,a3,b3]`.
    pub fn parse(spec: &str) -> Result<Self> {
        let vals = spec
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad window bound `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        if vals.len() % 2 != 0 {
            return Err(Error::Parse(format!("window `{spec}` needs pairs of bounds")));
        }
        let lower = vals.iter().step_by(2).copied().collect();
        let upper = vals.iter().skip(1).step_by(2).copied().collect();
        Self::new(lower, upper)
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn side(&self, j: usize) -> f64 {
        self.upper[j] - self.lower[j]
    }

    pub fn sides(&self) -> Vec<f64> {
        (0..self.dim()).map(|j| self.side(j)).collect()
    }

    pub fn min_side(&self) -> f64 {
        self.sides().into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn volume(&self) -> f64 {
        self.sides().iter().product()
    }

    pub fn diameter(&self) -> f64 {
        self.sides().iter().map(|l| l * l).sum::<f64>().sqrt()
    }

    pub fn center(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(a, b)| 0.5 * (a + b))
            .collect()
    }

    pub fn is_centered(&self) -> bool {
        self.lower.iter().zip(&self.upper).all(|(a, b)| *a == -*b)
    }

    /// The same box translated so that its centroid is the origin.
    pub fn to_centered(&self) -> CuboidWindow {
        Self {
            lower: self.sides().iter().map(|l| -l / 2.0).collect(),
            upper: self.sides().iter().map(|l| l / 2.0).collect(),
        }
    }

    /// Closed-box membership.
    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (a, b))| *v >= *a && *v <= *b)
    }

    /// Window enlarged by `margin` on every side.
    pub fn dilate(&self, margin: f64) -> CuboidWindow {
        Self {
            lower: self.lower.iter().map(|a| a - margin).collect(),
            upper: self.upper.iter().map(|b| b + margin).collect(),
        }
    }

    /// Set covariance `|B ∩ (B + z)| = prod_j max(l_j - |z_j|, 0)`.
    pub fn set_covariance(&self, z: &[f64]) -> f64 {
        self.sides()
            .iter()
            .zip(z)
            .map(|(l, zj)| (l - zj.abs()).max(0.0))
            .product()
    }

    /// Angular average of the set covariance over the sphere of radius `r`.
    pub fn radial_set_covariance(&self, r: f64) -> f64 {
        self.radial_average(r, |_| 1.0)
    }

    /// Angular average of `set_covariance(r u) * weight(r u)` over unit directions `u`.
    ///
    /// `weight` must be even in every coordinate; the average is taken over one
    /// orthant, on the arcs where the set covariance is positive.
    pub fn radial_average<F: Fn(&[f64]) -> f64>(&self, r: f64, weight: F) -> f64 {
        if r == 0.0 {
            let z = vec![0.0; self.dim()];
            return self.volume() * weight(&z);
        }
        if r >= self.diameter() {
            return 0.0;
        }
        let l = self.sides();
        let (gz, gw) = gl_rule();
        // integral over the quarter circle of radius s in the (x1, x2) plane,
        // with optional third coordinate fixed
        let arc = |s: f64, tail: Option<(f64, f64)>| -> f64 {
            let lo = if s <= l[0] { 0.0 } else { (l[0] / s).acos() };
            let hi = if s <= l[1] { FRAC_PI_2 } else { (l[1] / s).asin() };
            if hi <= lo {
                return 0.0;
            }
            let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
            let mut z = [0.0; 3];
            let mut acc = 0.0;
            for (x, w) in gz.iter().zip(gw) {
                let a = mid + half * x;
                z[0] = s * a.cos();
                z[1] = s * a.sin();
                let mut cov = (l[0] - z[0]).max(0.0) * (l[1] - z[1]).max(0.0);
                let zs = match tail {
                    Some((z3, c3)) => {
                        z[2] = z3;
                        cov *= c3;
                        &z[..3]
                    }
                    None => &z[..2],
                };
                acc += w * cov * weight(zs);
            }
            acc * half
        };
        match self.dim() {
            2 => 4.0 * arc(r, None) / (2.0 * PI),
            _ => {
                // c = cos(polar angle) in [0, min(1, l3 / r)]; kinks where r sqrt(1 - c^2)
                // crosses l1, l2 or hypot(l1, l2)
                let c_max = (l[2] / r).min(1.0);
                let mut breaks = vec![0.0, c_max];
                for s in [l[0], l[1], l[0].hypot(l[1])] {
                    if s < r {
                        let c = (1.0 - (s / r).powi(2)).sqrt();
                        if c > 0.0 && c < c_max {
                            breaks.push(c);
                        }
                    }
                }
                breaks.sort_by(f64::total_cmp);
                let mut acc = 0.0;
                for seg in breaks.windows(2) {
                    let (mid, half) = (0.5 * (seg[0] + seg[1]), 0.5 * (seg[1] - seg[0]));
                    for (x, w) in gz.iter().zip(gw) {
                        let c = mid + half * x;
                        let s = r * (1.0 - c * c).max(0.0).sqrt();
                        let z3 = r * c;
                        acc += w * half * arc(s, Some((z3, (l[2] - z3).max(0.0))));
                    }
                }
                8.0 * acc / (4.0 * PI)
            }
        }
    }
}

fn gl_rule() -> (&'static [f64], &'static [f64]) {
    use std::sync::OnceLock;
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    let (z, w) = RULE.get_or_init(|| gauss_legendre(48));
    (z, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn square10() -> CuboidWindow {
        CuboidWindow::centered(&[10.0, 10.0]).unwrap()
    }

    #[test]
    fn rejects_degenerate_sides() {
        assert!(CuboidWindow::new(vec![0.0, 0.0], vec![1.0, 0.0]).is_err());
        assert!(CuboidWindow::new(vec![0.0], vec![1.0]).is_err());
        assert!(CuboidWindow::new(vec![0.0, 0.0], vec![1.0]).is_err());
    }

    #[test]
    fn parse_window_flag() {
        let w = CuboidWindow::parse("-50,50,-25,25").unwrap();
        assert_eq!(w.sides(), vec![100.0, 50.0]);
        assert!(w.is_centered());
        assert_eq!(w.volume(), 5000.0);
        assert!(CuboidWindow::parse("0,1,2").is_err());
    }

    #[test]
    fn set_covariance_examples() {
        let w = square10();
        assert_eq!(w.set_covariance(&[0.0, 0.0]), 100.0);
        assert_eq!(w.set_covariance(&[10.0, 0.0]), 0.0);
        assert_eq!(w.set_covariance(&[5.0, 5.0]), 25.0);
        assert_eq!(w.set_covariance(&[-3.0, 2.0]), w.set_covariance(&[3.0, -2.0]));
    }

    #[test]
    fn radial_set_covariance_limits() {
        let w = square10();
        assert_eq!(w.radial_set_covariance(0.0), 100.0);
        assert_eq!(w.radial_set_covariance(w.diameter()), 0.0);
        assert_eq!(w.radial_set_covariance(20.0), 0.0);
    }

    #[test]
    fn radial_set_covariance_closed_form_2d() {
        // for r <= min side: ab - 2r(a+b)/pi + r^2/pi
        let w = CuboidWindow::centered(&[10.0, 14.0]).unwrap();
        for r in [0.5, 2.0, 5.0, 9.5] {
            let exact = 140.0 - 2.0 * r * 24.0 / PI + r * r / PI;
            let got = w.radial_set_covariance(r);
            assert!((got - exact).abs() / exact < 1e-5, "r={r}: {got} vs {exact}");
        }
    }

    #[test]
    fn radial_set_covariance_matches_monte_carlo() {
        let w = square10();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let n = 1_000_000;
        let mut acc = 0.0;
        for _ in 0..n {
            let a: f64 = rng.random::<f64>() * 2.0 * PI;
            acc += w.set_covariance(&[5.0 * a.cos(), 5.0 * a.sin()]);
        }
        let mc = acc / n as f64;
        let q = w.radial_set_covariance(5.0);
        assert!((q - mc).abs() / mc < 5e-4, "{q} vs {mc}");
    }

    #[test]
    fn radial_set_covariance_non_increasing() {
        for w in [
            square10(),
            CuboidWindow::centered(&[4.0, 9.0]).unwrap(),
            CuboidWindow::centered(&[3.0, 4.0, 5.0]).unwrap(),
        ] {
            let mut prev = f64::INFINITY;
            for i in 0..200 {
                let r = w.diameter() * i as f64 / 200.0;
                let v = w.radial_set_covariance(r);
                assert!(v <= prev + 1e-9, "r={r}");
                prev = v;
            }
        }
    }

    #[test]
    fn radial_set_covariance_3d_small_r() {
        // d/dr at 0 of the angular average: -(sum_k prod_{j!=k} l_j) * E|u_k|, E|u_k| = 1/2 in 3D
        let w = CuboidWindow::centered(&[3.0, 4.0, 5.0]).unwrap();
        let r = 1e-3;
        let slope = (w.radial_set_covariance(r) - 60.0) / r;
        let expected = -(20.0 + 15.0 + 12.0) * 0.5;
        assert!((slope - expected).abs() < 0.05, "{slope}");
    }
}
