//! Squeezed-vacuum qubit: damping-basis propagation against the
//! superoperator exponential.

use qsl_lab::dynamics::{damping_basis_evolution, evolve_lindblad, SqueezedVacuum};
use qsl_lab::operator::{bloch_to_state, state_to_bloch, BlochVector};

fn main() -> qsl_lab::Result<()> {
    let params = SqueezedVacuum::new(0.4, 0.7, 0.2, 0.3)?;
    let model = params.model()?;
    let basis = params.damping_basis();
    println!("eigenvalues {:?}", params.eigenvalues());
    println!(
        "biorthogonality deviation {:.2e}",
        basis.biorthogonality_deviation()
    );

    let rho0 = bloch_to_state(&BlochVector([0.5, -0.3, 0.6]))?;
    for t in [0.0, 0.5, 1.0, 2.0, 5.0] {
        let a = evolve_lindblad(&rho0, &model, t)?;
        let b = damping_basis_evolution(&rho0, &basis, t)?;
        let r = state_to_bloch(&a)?;
        println!(
            "t = {t:<4} r = ({:+.4}, {:+.4}, {:+.4})  |difference| = {:.2e}",
            r.0[0],
            r.0[1],
            r.0[2],
            (a.matrix() - b.matrix()).norm()
        );
    }
    Ok(())
}
