// Isotropic spectral estimators computed directly from pair distances.

use pointspec::estimate::radial_nodes;
use pointspec::isotropic::{debiased_isotropic, diggle_estimator, first_local_minimum, rotavg_bartlett_curve, PairTaper};
use pointspec::models::{window_for_n, Model};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let model = Model::variant("ms")?;
    let window = window_for_n(200, model.intensity(), 2)?;
    let pattern = model.simulate(&window, 5)?;
    let t = radial_nodes(0.01, 0.02, 10);

    let rotavg = rotavg_bartlett_curve(&pattern, &t)?;
    let diggle = diggle_estimator(&pattern, &t)?;
    let plain = debiased_isotropic(&pattern, &PairTaper::None, &t)?;
    let hermite = debiased_isotropic(&pattern, &PairTaper::hermite(&window, 1.0)?, &t)?;

    println!("   t    rotavg   diggle   debiased  hermite   theory");
    for i in 0..t.len() {
        println!(
            "{:.2}  {:7.4}  {:7.4}  {:8.4}  {:7.4}  {:7.4}",
            t[i],
            rotavg.values[i],
            diggle.values[i],
            plain.values[i],
            hermite.values[i],
            model.theoretical_sdf_radial(t[i])?
        );
    }
    // Diggle's estimator is the rotation average clamped below its first local minimum.
    let i0 = first_local_minimum(&rotavg.values).unwrap_or(0);
    assert_eq!(&rotavg.values[i0..], &diggle.values[i0..]);
    println!("diggle clamp starts at t = {:.2} ({:?})", t[i0], diggle.meta.flags);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
