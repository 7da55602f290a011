// Exact expectation of the periodogram at off-grid wavenumbers, checked by simulation.

use pointspec::models::{window_for_n, Model};
use pointspec::spectral::{expected_periodogram_oracle, periodogram};
use pointspec::{Taper, WavenumberGrid};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let model = Model::variant("ms")?;
    let lambda = model.intensity();
    let window = window_for_n(200, lambda, 2)?;
    let l = window.side(0);
    let taper = Taper::boxcar(&window);
    let nodes = vec![vec![1.5 / l, 0.0], vec![3.0 / l, 1.0 / l], vec![0.08, 0.02]];
    let grid = WavenumberGrid::custom(2, &nodes)?.into();

    let oracle = expected_periodogram_oracle(|k| model.theoretical_sdf(k).unwrap(), &taper, &grid, lambda)?;

    let reps = 300;
    let mut mean = vec![0.0; nodes.len()];
    for seed in 0..reps {
        let p = model.simulate(&window, 1000 + seed)?;
        for (m, v) in mean.iter_mut().zip(periodogram(&p, &taper, &grid)?.values) {
            *m += v / reps as f64;
        }
    }
    println!("k                    oracle    monte carlo");
    for (i, k) in nodes.iter().enumerate() {
        println!("({:.4}, {:.4})     {:.5}   {:.5}", k[0], k[1], oracle.values[i], mean[i]);
        assert!((mean[i] - oracle.values[i]).abs() < 0.3 * oracle.values[i]);
    }

    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
