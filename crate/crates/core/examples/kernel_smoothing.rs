// Kernel smoothing of the debiased periodogram with a data-driven bandwidth.

use pointspec::models::{window_for_n, Model};
use pointspec::smoothing::{bandwidth_radius, bandwidth_select, curvature_estimate, kernel_smooth, SmoothingKernel};
use pointspec::spectral::debiased_periodogram;
use pointspec::{Taper, WavenumberGrid};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let model = Model::variant("ms")?;
    let window = window_for_n(400, model.intensity(), 2)?;
    let pattern = model.simulate(&window, 11)?;
    let grid = WavenumberGrid::regular_square(2, 0.006, 0.15, true)?.into();
    let est = debiased_periodogram(&pattern, &Taper::boxcar(&window), &grid)?;

    let lambda_hat = pattern.intensity_hat();
    let curvature = curvature_estimate(&est, lambda_hat)?;
    let sigma = bandwidth_select(lambda_hat, curvature, 2)?;
    let radius = bandwidth_radius(sigma, window.min_side());
    println!("curvature {curvature:.4e}, sigma~ {sigma:.4}, radius {radius:.5}");

    let template = kernel_smooth(&est, &SmoothingKernel::gaussian_template(3)?)?;
    let boxed = kernel_smooth(&est, &SmoothingKernel::boxcar(vec![radius.max(0.006); 2])?)?;
    let spread = |v: &[f64]| {
        let m = v.iter().sum::<f64>() / v.len() as f64;
        (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64).sqrt()
    };
    println!("node-to-node spread: raw {:.4e}, template {:.4e}, box {:.4e}",
        spread(&est.values), spread(&template.values), spread(&boxed.values));
    assert!(spread(&template.values) < spread(&est.values));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
