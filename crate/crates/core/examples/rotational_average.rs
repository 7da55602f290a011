// Radial and angular summaries of a 2D spectral estimate.

use pointspec::estimate::radial_nodes;
use pointspec::models::{window_for_n, Model};
use pointspec::smoothing::{rotational_average, theta_spectrum};
use pointspec::spectral::debiased_periodogram;
use pointspec::{Taper, WavenumberGrid};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let model = Model::variant("fl")?;
    let window = window_for_n(400, model.intensity(), 2)?;
    let pattern = model.simulate(&window, 3)?;
    let grid = WavenumberGrid::regular_square(2, 0.006, 0.3, true)?.into();
    let est = debiased_periodogram(&pattern, &Taper::boxcar(&window), &grid)?;

    let t = radial_nodes(0.015, 0.015, 20);
    let radial = rotational_average(&est, &t, 0.012)?;
    println!("   t     estimate   theory");
    for (i, t) in radial.t.iter().enumerate().step_by(4) {
        println!("{t:.3}  {:9.5}  {:8.5}", radial.values[i], model.theoretical_sdf_radial(*t)?);
    }

    let angular = theta_spectrum(&est, 8, (0.05, 0.25))?;
    println!("angular spectrum over 0.05 < |k| < 0.25:");
    for (theta, v) in angular.t.iter().zip(&angular.values) {
        println!("  theta {theta:.3}: {v:.5}");
    }
    assert_eq!(angular.values.len(), 8);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
