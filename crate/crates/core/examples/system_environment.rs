//! Bound for a qubit coupled to a qubit environment by a joint Hamiltonian.

use qsl_lab::bounds::system_environment_bound;
use qsl_lab::dynamics::evolve_unitary;
use qsl_lab::operator::{partial_trace, random_hamiltonian_with, random_state, Subsystem};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> qsl_lab::Result<()> {
    let rho_s = random_state(2, 2, 1)?;
    let gamma = random_state(2, 2, 2)?;
    let h_se = random_hamiltonian_with(4, &mut ChaCha8Rng::seed_from_u64(3));
    let t = 0.6;
    let joint = evolve_unitary(&rho_s.tensor(&gamma)?, &h_se, t)?;
    let rho_t = partial_trace(&joint, (2, 2), Subsystem::A)?;

    let b = system_environment_bound(&rho_s, &gamma, &h_se, &rho_t)?;
    println!("elapsed {t}, bound {:.6}", b.value);
    println!(
        "2Q joint {:.6}, 2Q with the reduced Hamiltonian {:.6}",
        b.two_q_se, b.two_q_effective
    );
    Ok(())
}
