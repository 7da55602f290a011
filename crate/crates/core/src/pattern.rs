//! Point patterns observed in a cuboid window.

use crate::error::{Error, Result};
use crate::window::CuboidWindow;

/// A finite, simple set of points inside a [`CuboidWindow`].
///
/// Coordinates are stored flat (`d` values per point) in the caller's frame.
#[derive(Debug, Clone, PartialEq)]
pub struct PointPattern {
    coords: Vec<f64>,
    window: CuboidWindow,
}

impl PointPattern {
    /// Build a pattern from flat coordinates, rejecting points outside the window
    /// and bit-identical duplicates.
    pub fn from_flat(coords: Vec<f64>, window: CuboidWindow) -> Result<Self> {
        let d = window.dim();
        if coords.len() % d != 0 {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: coords.len() % d,
            });
        }
        for (i, x) in coords.chunks_exact(d).enumerate() {
            if !window.contains(x) {
                return Err(Error::PointOutsideWindow { index: i });
            }
        }
        if let Some(index) = first_duplicate(&coords, d) {
            return Err(Error::DuplicatePoint { index });
        }
        Ok(Self { coords, window })
    }

    pub fn new(points: &[Vec<f64>], window: CuboidWindow) -> Result<Self> {
        let d = window.dim();
        let mut coords = Vec::with_capacity(points.len() * d);
        for p in points {
            if p.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: p.len(),
                });
            }
            coords.extend_from_slice(p);
        }
        Self::from_flat(coords, window)
    }

    /// Like [`PointPattern::from_flat`] but silently drops out-of-window points,
    /// returning how many were dropped.
    pub fn from_flat_clipped(coords: Vec<f64>, window: CuboidWindow) -> Result<(Self, usize)> {
        let d = window.dim();
        if coords.len() % d != 0 {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: coords.len() % d,
            });
        }
        let total = coords.len() / d;
        let kept: Vec<f64> = coords
            .chunks_exact(d)
            .filter(|x| window.contains(x))
            .flatten()
            .copied()
            .collect();
        let dropped = total - kept.len() / d;
        Ok((Self::from_flat(kept, window)?, dropped))
    }

    pub fn empty(window: CuboidWindow) -> Self {
        Self {
            coords: Vec::new(),
            window,
        }
    }

    pub fn window(&self) -> &CuboidWindow {
        &self.window
    }

    pub fn dim(&self) -> usize {
        self.window.dim()
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        let d = self.dim();
        &self.coords[i * d..(i + 1) * d]
    }

    pub fn points(&self) -> std::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.dim())
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Offset subtracted from every point to center the window at the origin.
    pub fn translation(&self) -> Vec<f64> {
        self.window.center()
    }

    /// Flat coordinates in the centered frame.
    pub fn centered_coords(&self) -> Vec<f64> {
        let c = self.translation();
        let d = self.dim();
        self.coords
            .iter()
            .enumerate()
            .map(|(i, x)| x - c[i % d])
            .collect()
    }

    /// The pattern translated so its window is centered at the origin.
    pub fn centered(&self) -> PointPattern {
        Self {
            coords: self.centered_coords(),
            window: self.window.to_centered(),
        }
    }

    /// `N(B) / |B|`.
    pub fn intensity_hat(&self) -> f64 {
        self.len() as f64 / self.window.volume()
    }

    /// `N(N-1) / |B|^2`, unbiased for the squared intensity under Poisson sampling.
    pub fn lambda_sq_hat(&self) -> f64 {
        let n = self.len() as f64;
        if n <= 1.0 {
            return 0.0;
        }
        n * (n - 1.0) / self.window.volume().powi(2)
    }

    /// Minimum distance between distinct points (`inf` for fewer than two points).
    pub fn min_pair_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.len() {
            for j in 0..i {
                let d2: f64 = self
                    .point(i)
                    .iter()
                    .zip(self.point(j))
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                best = best.min(d2);
            }
        }
        best.sqrt()
    }
}

fn first_duplicate(coords: &[f64], d: usize) -> Option<usize> {
    let n = coords.len() / d;
    let mut order: Vec<usize> = (0..n).collect();
    let key = |i: usize| -> Vec<u64> { coords[i * d..(i + 1) * d].iter().map(|v| v.to_bits()).collect() };
    order.sort_by_key(|&i| key(i));
    order
        .windows(2)
        .find(|w| key(w[0]) == key(w[1]))
        .map(|w| w[0].max(w[1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn win() -> CuboidWindow {
        CuboidWindow::new(vec![0.0, 0.0], vec![100.0, 100.0]).unwrap()
    }

    #[test]
    fn rejects_outside_and_duplicates() {
        let w = win();
        assert!(matches!(
            PointPattern::new(&[vec![1.0, 1.0], vec![101.0, 3.0]], w.clone()),
            Err(Error::PointOutsideWindow { index: 1 })
        ));
        assert!(matches!(
            PointPattern::new(&[vec![1.0, 1.0], vec![2.0, 2.0], vec![1.0, 1.0]], w.clone()),
            Err(Error::DuplicatePoint { index: 2 })
        ));
        // near-duplicates are fine
        assert!(PointPattern::new(&[vec![1.0, 1.0], vec![1.0, 1.0 + 1e-15]], w.clone()).is_ok());
        // boundary is inside
        assert!(PointPattern::new(&[vec![0.0, 100.0]], w).is_ok());
    }

    #[test]
    fn clipped_ingestion_counts_drops() {
        let (p, dropped) =
            PointPattern::from_flat_clipped(vec![1.0, 1.0, -1.0, 5.0, 50.0, 50.0], win()).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(dropped, 1);
    }

    #[test]
    fn intensity_estimators() {
        let pts: Vec<Vec<f64>> = (0..100).map(|i| vec![i as f64, 0.5 * i as f64]).collect();
        let p = PointPattern::new(&pts, win()).unwrap();
        assert_eq!(p.intensity_hat(), 0.01);
        assert!((p.lambda_sq_hat() - 9.9e-5).abs() < 1e-18);
        let e = PointPattern::empty(win());
        assert_eq!(e.intensity_hat(), 0.0);
        assert_eq!(e.lambda_sq_hat(), 0.0);
        let one = PointPattern::new(&[vec![3.0, 3.0]], win()).unwrap();
        assert_eq!(one.lambda_sq_hat(), 0.0);
    }

    #[test]
    fn centering_translates_points() {
        let p = PointPattern::new(&[vec![50.0, 50.0], vec![0.0, 100.0]], win()).unwrap();
        assert_eq!(p.translation(), vec![50.0, 50.0]);
        let c = p.centered();
        assert_eq!(c.point(0), &[0.0, 0.0]);
        assert_eq!(c.point(1), &[-50.0, 50.0]);
        assert!(c.window().is_centered());
    }
}
