//! Estimating the bound from simulated SWAP tests at increasing shot counts.

use qsl_lab::bounds::tl_bound;
use qsl_lab::dynamics::evolve_unitary;
use qsl_lab::interferometry::{
    eigs_from_power_sums, estimate_tl_from_protocol, power_sums, MeasurementMode,
};
use qsl_lab::operator::{bloch_to_state, BlochVector, Observable};

fn main() -> qsl_lab::Result<()> {
    let s = f64::sqrt;
    let rho1 = bloch_to_state(&BlochVector([0.0, 0.0, 0.5]))?;
    let h = Observable::bloch([1.0 / s(2.0), 1.0 / s(3.0), -1.0 / s(6.0)], 1.0, 0.0, 1.0)?;
    let t = 2f64.atan();

    let spectrum = eigs_from_power_sums(&power_sums(&rho1, 2)?)?;
    println!("spectrum from power sums {spectrum:?}");
    println!(
        "library bound {:.6}",
        tl_bound(&rho1, &h, &evolve_unitary(&rho1, &h, t)?)?
    );
    let exact = estimate_tl_from_protocol(&rho1, &h, t, MeasurementMode::Exact, 0)?;
    println!("noiseless protocol {:.6}", exact.tl);
    for shots in [1_000, 10_000, 100_000, 1_000_000] {
        let e = estimate_tl_from_protocol(&rho1, &h, t, MeasurementMode::Shots(shots), 7)?;
        println!("{shots:>9} shots: {:.4} +- {:.4}", e.tl, e.error_bar);
    }
    Ok(())
}
