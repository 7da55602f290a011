// Highest useful wavenumber from a power-law fit to a radial spectrum.

use pointspec::estimate::{radial_nodes, RadialMeta};
use pointspec::models::{window_for_n, Model};
use pointspec::smoothing::{max_wavenumber, rotational_average};
use pointspec::spectral::debiased_periodogram;
use pointspec::{RadialEstimate, Taper, WavenumberGrid};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // A spectrum decaying like t^-3 onto lambda: the fit recovers the exponent
    // and the crossing point C0 w^-alpha = lambda.
    let lambda = 0.01;
    let (c0, alpha) = (2e-4, 3.0);
    let t = radial_nodes(0.002, 0.002, 150);
    let values = t.iter().map(|t| lambda + lambda * lambda * c0 * t.powf(-alpha)).collect();
    let synthetic = RadialEstimate::new(t, values, RadialMeta::new("synthetic"));
    let fit = max_wavenumber(&synthetic, lambda)?;
    let w_exact = (c0 / lambda).powf(1.0 / alpha);
    println!("synthetic: alpha {:.4}, w_h {:.5} (exact {:.5})", fit.alpha, fit.w_h, w_exact);
    assert!((fit.alpha - alpha).abs() < 1e-6);
    assert!((fit.w_h - w_exact).abs() < 1e-6 * w_exact);

    let model = Model::variant("fl")?;
    let window = window_for_n(800, model.intensity(), 2)?;
    let pattern = model.simulate(&window, 21)?;
    let grid = WavenumberGrid::regular_square(2, 0.006, 0.3, true)?.into();
    let est = debiased_periodogram(&pattern, &Taper::boxcar(&window), &grid)?;
    let radial = rotational_average(&est, &radial_nodes(0.006, 0.006, 50), 0.012)?;
    match max_wavenumber(&radial, pattern.intensity_hat()) {
        Ok(fit) => println!(
            "thomas fl: nodes {:?}, alpha {:.3}, w_h {:.4}{}",
            fit.fit_range,
            fit.alpha,
            fit.w_h,
            if fit.no_decay { " (no decay)" } else { "" }
        ),
        Err(e) => println!("thomas fl: no fit ({e})"),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
