//! Open-system bound for the dephasing qubit, with the relative-purity and
//! purification-length bounds on the same endpoints.

use qsl_lab::scenario::{markovian_curve, CurveOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let taus: Vec<f64> = (1..=10).map(|k| 0.5 * k as f64).collect();
    let table = markovian_curve(-0.9, &taus, CurveOptions::default())?;
    let cols = ["tau", "markovian", "campo_style", "purification"];
    println!("{}", table.select(&cols).expect("columns exist").to_csv()?);
    println!(
        "crossover at tau = {}",
        table.metadata.extra["crossover_tau"]
    );
    Ok(())
}
