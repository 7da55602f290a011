//! Wavenumber grids.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::window::CuboidWindow;

/// How a grid was constructed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum GridProvenance {
    /// Nodes `p_j / l_j` for integer `|p_j| <= max_order_j`.
    Fourier { sides: Vec<f64>, max_order: Vec<usize> },
    /// Nodes `i * step_j` for `|i * step_j| <= extent_j`.
    Regular { step: Vec<f64>, extent: Vec<f64> },
    /// Nodes `p_j * multiplier / l_j`, a Fourier grid coarsened for tapers
    /// whose transforms decorrelate more slowly than the box.
    TaperedFourier {
        sides: Vec<f64>,
        multiplier: f64,
        max_order: Vec<usize>,
    },
    Custom,
}

/// An ordered set of `d`-dimensional wavenumbers.
///
/// Grids built from per-axis node lists (Fourier, regular, tapered Fourier) keep
/// those axes together with each node's multi-index, which lets the DFT use
/// separable phase factors.
#[derive(Debug, Clone, PartialEq)]
pub struct WavenumberGrid {
    dim: usize,
    nodes: Vec<f64>,
    provenance: GridProvenance,
    zero_excluded: bool,
    axes: Option<Vec<Vec<f64>>>,
    multi_index: Vec<usize>,
}

impl WavenumberGrid {
    /// Fourier grid of the window: `{(p_1/l_1, ..., p_d/l_d) : |p_j| <= max_order_j}`.
    pub fn fourier(window: &CuboidWindow, max_order: &[usize], exclude_zero: bool) -> Result<Self> {
        check_orders(window, max_order)?;
        let sides = window.sides();
        let axes = sides
            .iter()
            .zip(max_order)
            .map(|(l, &m)| {
                let m = m as i64;
                (-m..=m).map(|p| p as f64 / l).collect()
            })
            .collect();
        Ok(Self::product(
            axes,
            GridProvenance::Fourier {
                sides,
                max_order: max_order.to_vec(),
            },
            exclude_zero,
        ))
    }

    /// Fourier grid coarsened by `multiplier`: nodes `p_j * multiplier / l_j`.
    pub fn tapered_fourier(
        window: &CuboidWindow,
        multiplier: f64,
        max_order: &[usize],
        exclude_zero: bool,
    ) -> Result<Self> {
        check_orders(window, max_order)?;
        if !(multiplier > 0.0 && multiplier.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "grid multiplier must be positive, got {multiplier}"
            )));
        }
        let sides = window.sides();
        let axes = sides
            .iter()
            .zip(max_order)
            .map(|(l, &m)| {
                let m = m as i64;
                (-m..=m).map(|p| p as f64 * multiplier / l).collect()
            })
            .collect();
        Ok(Self::product(
            axes,
            GridProvenance::TaperedFourier {
                sides,
                multiplier,
                max_order: max_order.to_vec(),
            },
            exclude_zero,
        ))
    }

    /// Regular grid with nodes `i * step_j`, `|i| <= round(extent_j / step_j)`.
    pub fn regular(step: &[f64], extent: &[f64], exclude_zero: bool) -> Result<Self> {
        if step.len() != extent.len() {
            return Err(Error::DimensionMismatch {
                expected: step.len(),
                got: extent.len(),
            });
        }
        if !(2..=3).contains(&step.len()) {
            return Err(Error::UnsupportedDimension(step.len()));
        }
        let mut axes = Vec::with_capacity(step.len());
        for (&h, &e) in step.iter().zip(extent) {
            if !(h > 0.0 && h.is_finite() && e >= 0.0 && e.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "regular grid needs positive step and non-negative extent, got ({h}, {e})"
                )));
            }
            let m = (e / h + 1e-9).floor() as i64;
            axes.push((-m..=m).map(|i| i as f64 * h).collect());
        }
        Ok(Self::product(
            axes,
            GridProvenance::Regular {
                step: step.to_vec(),
                extent: extent.to_vec(),
            },
            exclude_zero,
        ))
    }

    /// Square regular grid in `d` dimensions.
    pub fn regular_square(d: usize, step: f64, extent: f64, exclude_zero: bool) -> Result<Self> {
        Self::regular(&vec![step; d], &vec![extent; d], exclude_zero)
    }

    /// Arbitrary list of nodes (each of length `dim`).
    pub fn custom(dim: usize, nodes: &[Vec<f64>]) -> Result<Self> {
        let mut flat = Vec::with_capacity(nodes.len() * dim);
        for k in nodes {
            if k.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: k.len(),
                });
            }
            if k.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter("non-finite wavenumber".into()));
            }
            flat.extend_from_slice(k);
        }
        let mut keys: Vec<Vec<u64>> = nodes
            .iter()
            .map(|k| k.iter().map(|v| (v + 0.0).to_bits()).collect())
            .collect();
        keys.sort();
        if keys.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("duplicate grid node".into()));
        }
        let zero_excluded = false;
        Ok(Self {
            dim,
            nodes: flat,
            provenance: GridProvenance::Custom,
            zero_excluded,
            axes: None,
            multi_index: Vec::new(),
        })
    }

    fn product(axes: Vec<Vec<f64>>, provenance: GridProvenance, exclude_zero: bool) -> Self {
        let dim = axes.len();
        let mut nodes = Vec::new();
        let mut multi_index = Vec::new();
        let mut idx = vec![0usize; dim];
        'outer: loop {
            let k: Vec<f64> = idx.iter().enumerate().map(|(j, &i)| axes[j][i]).collect();
            if !(exclude_zero && k.iter().all(|v| *v == 0.0)) {
                nodes.extend_from_slice(&k);
                multi_index.extend_from_slice(&idx);
            }
            // row-major: last axis fastest
            for j in (0..dim).rev() {
                idx[j] += 1;
                if idx[j] < axes[j].len() {
                    continue 'outer;
                }
                idx[j] = 0;
            }
            break;
        }
        Self {
            dim,
            nodes,
            provenance,
            zero_excluded: exclude_zero,
            axes: Some(axes),
            multi_index,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.nodes.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.dim..(i + 1) * self.dim]
    }

    pub fn nodes(&self) -> std::slice::ChunksExact<'_, f64> {
        self.nodes.chunks_exact(self.dim)
    }

    pub fn norm(&self, i: usize) -> f64 {
        self.node(i).iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn provenance(&self) -> &GridProvenance {
        &self.provenance
    }

    pub fn zero_excluded(&self) -> bool {
        self.zero_excluded
    }

    /// Per-axis node lists, for grids built as a Cartesian product.
    pub fn axes(&self) -> Option<&[Vec<f64>]> {
        self.axes.as_deref()
    }

    /// Position of node `i` along each axis (product grids only).
    pub fn multi_index(&self, i: usize) -> Option<&[usize]> {
        self.axes
            .as_ref()
            .map(|_| &self.multi_index[i * self.dim..(i + 1) * self.dim])
    }

    /// Grid spacing per axis for regular and Fourier-type grids.
    pub fn steps(&self) -> Option<Vec<f64>> {
        self.axes.as_ref().map(|axes| {
            axes.iter()
                .map(|a| if a.len() > 1 { a[1] - a[0] } else { f64::INFINITY })
                .collect()
        })
    }

    /// Index of the node bitwise equal to `k` (treating `-0.0 == 0.0`).
    pub fn index_of(&self, k: &[f64]) -> Option<usize> {
        if k.len() != self.dim {
            return None;
        }
        (0..self.len()).find(|&i| self.node(i).iter().zip(k).all(|(a, b)| a == b))
    }

    /// Index of `-k` for node `i`, if present.
    pub fn mirror_index(&self, i: usize) -> Option<usize> {
        let neg: Vec<f64> = self.node(i).iter().map(|v| -v).collect();
        self.index_of(&neg)
    }

    /// Mask of nodes with every component inside `[-extent, extent]`.
    pub fn within(&self, extent: f64) -> Vec<bool> {
        let tol = extent * 1e-9;
        self.nodes()
            .map(|k| k.iter().all(|v| v.abs() <= extent + tol))
            .collect()
    }
}

fn check_orders(window: &CuboidWindow, max_order: &[usize]) -> Result<()> {
    if max_order.len() != window.dim() {
        return Err(Error::DimensionMismatch {
            expected: window.dim(),
            got: max_order.len(),
        });
    }
    if max_order.iter().any(|&m| m == 0) {
        return Err(Error::InvalidParameter("max_order must be at least 1".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourier_grid_counts() {
        let w = CuboidWindow::square(2, 10.0).unwrap();
        let g = WavenumberGrid::fourier(&w, &[1, 1], false).unwrap();
        assert_eq!(g.len(), 9);
        assert_eq!(g.steps().unwrap(), vec![0.1, 0.1]);
        let g0 = WavenumberGrid::fourier(&w, &[1, 1], true).unwrap();
        assert_eq!(g0.len(), 8);
        assert!(g0.index_of(&[0.0, 0.0]).is_none());
    }

    #[test]
    fn fourier_grid_rectangular_nodes() {
        let w = CuboidWindow::centered(&[10.0, 20.0]).unwrap();
        let g = WavenumberGrid::fourier(&w, &[1, 1], false).unwrap();
        assert!(g.index_of(&[0.1, 0.05]).is_some());
    }

    #[test]
    fn fourier_nodes_are_integer_multiples() {
        let w = CuboidWindow::centered(&[141.42135623730951, 77.7]).unwrap();
        let g = WavenumberGrid::fourier(&w, &[7, 5], true).unwrap();
        for k in g.nodes() {
            for (kj, lj) in k.iter().zip(w.sides()) {
                let p = kj * lj;
                assert!((p - p.round()).abs() <= 4.0 * f64::EPSILON * p.abs().max(1.0));
            }
        }
    }

    #[test]
    fn regular_grid_matches_study_layout() {
        let g = WavenumberGrid::regular_square(2, 0.006, 0.3, true).unwrap();
        assert_eq!(g.len(), 101 * 101 - 1);
        let inner = g.within(0.2).iter().filter(|b| **b).count();
        assert_eq!(inner, 67 * 67 - 1);
        let i = g.index_of(&[0.006 * 3.0, -0.006 * 10.0]).unwrap();
        assert_eq!(g.mirror_index(i).map(|j| g.node(j).to_vec()), Some(vec![-3.0 * 0.006, 10.0 * 0.006]));
    }

    #[test]
    fn custom_grid_rejects_duplicates() {
        assert!(WavenumberGrid::custom(2, &[vec![0.1, 0.0], vec![0.1, 0.0]]).is_err());
        let g = WavenumberGrid::custom(2, &[vec![0.1, 0.0], vec![0.0, 0.1]]).unwrap();
        assert!(g.axes().is_none());
    }

    #[test]
    fn rejects_bad_orders() {
        let w = CuboidWindow::square(2, 10.0).unwrap();
        assert!(WavenumberGrid::fourier(&w, &[0, 1], false).is_err());
        assert!(WavenumberGrid::fourier(&w, &[1], false).is_err());
    }
}
