//! Coherence-time bound for three single-qubit rotations, checked against
//! the time the rotation actually takes.

use std::f64::consts::PI;

use qsl_lab::bounds::{bound_report, default_alpha_grid};
use qsl_lab::dynamics::evolve_unitary;
use qsl_lab::operator::{bloch_to_state, BlochVector, Observable};

fn main() -> qsl_lab::Result<()> {
    let s = f64::sqrt;
    let cases = [
        (
            "pure, equatorial",
            [0.0, 0.0, 1.0],
            [1.0, 0.0, 0.0],
            PI / 2.0,
        ),
        (
            "pure, 45 degrees",
            [s(0.5), 0.0, s(0.5)],
            [0.0, 0.0, 1.0],
            3.0 * PI / 4.0,
        ),
        (
            "mixed, |r| = 1/2",
            [0.0, 0.0, 0.5],
            [1.0 / s(2.0), 1.0 / s(3.0), -1.0 / s(6.0)],
            2f64.atan(),
        ),
    ];
    println!(
        "{:<18} {:>8} {:>8} {:>8} {:>8} {:>8}",
        "case", "t", "tl", "mt", "qfi", "campo"
    );
    for (label, r, axis, t) in cases {
        let rho1 = bloch_to_state(&BlochVector(r))?;
        let h = Observable::bloch(axis, 1.0, 0.0, 1.0)?;
        let rho2 = evolve_unitary(&rho1, &h, t)?;
        let rep = bound_report(&rho1, &h, &rho2, &default_alpha_grid(), Some(t))?;
        println!(
            "{label:<18} {t:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>8.4}",
            rep.tl, rep.mt_fidelity, rep.qfi, rep.campo
        );
    }
    Ok(())
}
