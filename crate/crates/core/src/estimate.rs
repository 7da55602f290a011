//! Containers for spectral estimates on wavenumber grids and radial summaries.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::grid::WavenumberGrid;

/// What produced a [`SpectralEstimate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    Periodogram,
    DebiasedPeriodogram,
    SubtractedPeriodogram,
    Quadratic,
    Multitaper,
    Oracle,
    Synthetic,
}

/// Provenance recorded alongside estimate values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateMeta {
    pub kind: EstimatorKind,
    pub tapers: Vec<String>,
    pub debiased: bool,
    /// False when the estimator may legitimately return negative values.
    pub sign_safe: bool,
    /// Offset subtracted from the input coordinates before the DFT.
    pub translation: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub smoothing: Option<String>,
}

impl EstimateMeta {
    pub fn new(kind: EstimatorKind) -> Self {
        Self {
            kind,
            tapers: Vec::new(),
            debiased: false,
            sign_safe: true,
            translation: Vec::new(),
            smoothing: None,
        }
    }
}

/// Real estimator values, one per node of a wavenumber grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEstimate {
    pub grid: Arc<WavenumberGrid>,
    pub values: Vec<f64>,
    pub meta: EstimateMeta,
}

impl SpectralEstimate {
    pub fn new(grid: Arc<WavenumberGrid>, values: Vec<f64>, meta: EstimateMeta) -> Self {
        assert_eq!(grid.len(), values.len(), "one value per grid node");
        Self { grid, values, meta }
    }

    /// Estimate filled with a function of the wavenumber.
    pub fn from_fn<F: Fn(&[f64]) -> f64>(grid: Arc<WavenumberGrid>, f: F) -> Self {
        let values = grid.nodes().map(f).collect();
        Self::new(grid, values, EstimateMeta::new(EstimatorKind::Synthetic))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value_at(&self, k: &[f64]) -> Option<f64> {
        self.grid.index_of(k).map(|i| self.values[i])
    }
}

/// Radial summary of a spectrum, indexed by wavenumber magnitude `t`.
///
/// Missing bins (no contributing grid node) carry `NaN` and a zero count.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialEstimate {
    pub t: Vec<f64>,
    pub values: Vec<f64>,
    /// Number of contributing nodes per bin, for binned summaries.
    pub counts: Option<Vec<usize>>,
    pub meta: RadialMeta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialMeta {
    pub source: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel_radius: Option<f64>,
    pub sign_safe: bool,
    /// Set when a procedure could not complete as intended (e.g. no local minimum).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

impl RadialMeta {
    pub fn new(source: impl Into<String>) -> Self {
        Self {
            source: source.into(),
            kernel_radius: None,
            sign_safe: true,
            flags: Vec::new(),
        }
    }
}

impl RadialEstimate {
    pub fn new(t: Vec<f64>, values: Vec<f64>, meta: RadialMeta) -> Self {
        assert_eq!(t.len(), values.len());
        Self {
            t,
            values,
            counts: None,
            meta,
        }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn is_missing(&self, i: usize) -> bool {
        self.counts.as_ref().is_some_and(|c| c[i] == 0)
    }

    pub fn has_flag(&self, flag: &str) -> bool {
        self.meta.flags.iter().any(|f| f == flag)
    }
}

/// `n` equally spaced magnitudes `start, start + step, ...`.
pub fn radial_nodes(start: f64, step: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| start + step * i as f64).collect()
}
