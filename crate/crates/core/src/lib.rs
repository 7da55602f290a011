//! Spectral estimation for stationary spatial point processes.
//!
//! The crate covers tapered and debiased periodograms of point patterns in two
//! and three dimensions, multitaper and kernel smoothing, isotropic (radial)
//! estimators built on Bessel/Hankel transforms, simulators for Poisson, Thomas
//! and Matérn II processes, and a Monte-Carlo harness for comparing estimators.
//!
//! ```
//! use pointspec::{CuboidWindow, PointPattern, Taper, WavenumberGrid};
//! use pointspec::spectral::debiased_periodogram;
//!
//! let window = CuboidWindow::square(2, 10.0).unwrap();
//! let pattern = PointPattern::new(&[vec![1.0, 2.0], vec![-3.0, 0.5]], window.clone()).unwrap();
//! let grid = WavenumberGrid::fourier(&window, &[4, 4], true).unwrap();
//! let est = debiased_periodogram(&pattern, &Taper::boxcar(&window), &grid.into()).unwrap();
//! assert!(est.values.iter().all(|v| *v >= 0.0));
//! ```

pub mod bench;
pub mod bessel;
pub mod cli;
pub mod error;
pub mod estimate;
pub mod grid;
pub mod io;
pub mod isotropic;
pub mod models;
pub mod numerics;
pub mod pattern;
pub mod smoothing;
pub mod spectral;
pub mod tapers;
pub mod window;

pub use error::{Error, Result};
pub use estimate::{EstimateMeta, EstimatorKind, RadialEstimate, RadialMeta, SpectralEstimate};
pub use grid::{GridProvenance, WavenumberGrid};
pub use pattern::PointPattern;
pub use tapers::Taper;
pub use window::CuboidWindow;
