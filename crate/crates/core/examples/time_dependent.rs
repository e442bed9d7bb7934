//! Bound with a time-averaged coherence for a Hamiltonian switched halfway.

use qsl_lab::bounds::{tl_bound_time_avg, PiecewiseHamiltonian};
use qsl_lab::dynamics::evolve_unitary;
use qsl_lab::operator::{bloch_to_state, BlochVector, Observable};
use qsl_lab::quadrature::SimpsonOptions;

fn main() -> qsl_lab::Result<()> {
    let hx = Observable::bloch([1.0, 0.0, 0.0], 1.0, 0.0, 1.0)?;
    let hy = Observable::bloch([0.0, 1.0, 0.0], 1.0, 0.0, 1.0)?;
    let rho1 = bloch_to_state(&BlochVector([0.0, 0.0, 0.9]))?;
    let mid = evolve_unitary(&rho1, &hx, 0.5)?;
    let rho2 = evolve_unitary(&mid, &hy, 0.5)?;

    let path = PiecewiseHamiltonian {
        pieces: vec![(0.0, hx), (0.5, hy)],
    };
    let t = tl_bound_time_avg(&rho1, &path, &rho2, 1.0, SimpsonOptions::default())?;
    println!("elapsed 1.0, bound {t:.6}");
    Ok(())
}
