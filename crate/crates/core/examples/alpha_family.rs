//! The alpha-parameterised family of bounds and its maximiser.

use qsl_lab::bounds::{alpha_bound, alpha_bound_max, default_alpha_grid, tl_bound};
use qsl_lab::dynamics::evolve_unitary;
use qsl_lab::operator::{random_hamiltonian_with, random_state};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> qsl_lab::Result<()> {
    let rho1 = random_state(3, 3, 5)?;
    let h = random_hamiltonian_with(3, &mut ChaCha8Rng::seed_from_u64(6));
    let rho2 = evolve_unitary(&rho1, &h, 0.8)?;

    for alpha in [0.5, 1.0, 1.5, 2.0, 3.0] {
        println!(
            "alpha = {alpha:<4} bound = {:.6}",
            alpha_bound(&rho1, &h, &rho2, alpha)?
        );
    }
    let (best, value) = alpha_bound_max(&rho1, &h, &rho2, &default_alpha_grid())?;
    println!(
        "max over grid at alpha = {best}: {value:.6} (alpha = 1 gives tl = {:.6})",
        tl_bound(&rho1, &h, &rho2)?
    );
    Ok(())
}
