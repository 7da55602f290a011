// Reading a pattern from CSV, estimating, and writing grid, radial and heatmap outputs.

use std::fs;

use pointspec::estimate::radial_nodes;
use pointspec::io::{read_grid, read_pattern_file, write_grid_file, write_heatmap_file, write_pattern_file, write_radial_file};
use pointspec::models::{window_for_n, Model};
use pointspec::smoothing::{multitaper, rotational_average};
use pointspec::WavenumberGrid;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let model = Model::variant("ms")?;
    let window = window_for_n(150, model.intensity(), 2)?;
    let simulated = model.simulate(&window, 8)?;

    let pattern_path = dir.path().join("pattern.csv");
    write_pattern_file(&pattern_path, &simulated)?;
    let (pattern, dropped) = read_pattern_file(&pattern_path, &window)?;
    assert_eq!(dropped, 0);
    assert_eq!(pattern.len(), simulated.len());

    let grid = WavenumberGrid::regular_square(2, 0.006, 0.12, true)?.into();
    let est = multitaper(&pattern, 2, &grid)?;
    let grid_path = dir.path().join("spectrum.csv");
    write_grid_file(&grid_path, &est)?;
    let (nodes, values) = read_grid(fs::File::open(&grid_path)?)?;
    assert_eq!(nodes.len(), est.len());
    assert!(values.iter().zip(&est.values).all(|(a, b)| (a - b).abs() <= 1e-12 * b.abs()));

    let radial = rotational_average(&est, &radial_nodes(0.006, 0.006, 20), 0.012)?;
    write_radial_file(&dir.path().join("radial.csv"), &radial)?;
    let range = write_heatmap_file(&dir.path().join("spectrum.png"), &est)?;

    println!("{} points -> {} grid values, heatmap range [{:.4}, {:.4}]", pattern.len(), values.len(), range.min, range.max);
    for entry in fs::read_dir(dir.path())? {
        let entry = entry?;
        println!("  {} ({} bytes)", entry.file_name().to_string_lossy(), entry.metadata()?.len());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
