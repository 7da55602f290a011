// Sine multitapers on a clustered Thomas pattern.

use pointspec::models::{window_for_n, Model};
use pointspec::smoothing::multitaper;
use pointspec::spectral::debiased_periodogram;
use pointspec::tapers::{spectral_bandwidth, tapered_fourier_spacing};
use pointspec::{Taper, WavenumberGrid};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let model = Model::variant("ms")?;
    let window = window_for_n(400, model.intensity(), 2)?;
    let pattern = model.simulate(&window, 7)?;
    let grid = WavenumberGrid::regular_square(2, 0.006, 0.12, true)?.into();

    let bartlett = debiased_periodogram(&pattern, &Taper::boxcar(&window), &grid)?;
    let mt = multitaper(&pattern, 3, &grid)?;

    let mut err_b = 0.0;
    let mut err_mt = 0.0;
    for (i, k) in grid.nodes().enumerate() {
        let f = model.theoretical_sdf(k)?;
        err_b += (bartlett.values[i] - f).powi(2);
        err_mt += (mt.values[i] - f).powi(2);
    }
    println!("{} points, {} tapers", pattern.len(), mt.meta.tapers.len());
    println!("squared error: bartlett {err_b:.3e}, multitaper {err_mt:.3e}");
    assert!(err_mt < err_b);

    let sine = Taper::sine(&window, &[1, 1])?;
    let bw = spectral_bandwidth(&sine)?;
    println!("sine(1,1) bandwidth b_h = {:.5}", bw.value);
    let tau = tapered_fourier_spacing(&sine, &Taper::sine(&window, &[2, 1])?, 0.05)?;
    println!("decorrelation spacing between sine(1,1) and sine(2,1): {tau:.5}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
