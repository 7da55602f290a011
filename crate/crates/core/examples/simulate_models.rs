// The built-in point process models: simulation and second-order summaries.

use pointspec::models::{window_for_n, Model};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    println!("model    lambda    mean count (n=400)  g(1)     f(0.05)");
    for name in ["poisson", "ms", "fl", "r2", "r5"] {
        let model = Model::variant(name)?.with_literature_pcf();
        let window = window_for_n(400, model.intensity(), 2)?;
        let reps = 20;
        let mut count = 0usize;
        for seed in 0..reps {
            let p = model.simulate(&window, seed)?;
            count += p.len();
            if name == "r5" {
                assert!(p.min_pair_distance() >= 5.0);
            }
        }
        println!(
            "{name:7}  {:.4}    {:8.1}            {:.4}   {:.5}",
            model.intensity(),
            count as f64 / reps as f64,
            model.theoretical_pcf(1.0)?,
            model.theoretical_sdf_radial(0.05)?
        );
    }

    let custom = Model::parse("thomas:0.002,1.5,5")?;
    let window = window_for_n(500, custom.intensity(), 2)?;
    let p = custom.simulate(&window, 99)?;
    println!("custom {}: {} points in {:?}", custom.name, p.len(), window.sides());

    let three = Model::variant("poisson")?.with_dim(3)?;
    let cube = window_for_n(300, three.intensity(), 3)?;
    println!("3D poisson: {} points", three.simulate(&cube, 1)?.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
