//! Behaviour of the coherence-time product under classical mixing and
//! partial trace.

use qsl_lab::bounds::{elimination_inequality_check, mixing_inequality_check};
use qsl_lab::operator::{random_hamiltonian_with, random_state};
use qsl_lab::scenario::mixing_example;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> qsl_lab::Result<()> {
    let mx = mixing_example();
    for a in [0.5, 1.0, 2.0, 3.0] {
        let c = mixing_inequality_check(&mx.rho1, &mx.sigma1, mx.p, &mx.h, a)?;
        println!(
            "a = {a}: U_gamma = {:.4} <= {:.4} ({})",
            c.lhs, c.rhs, c.holds
        );
    }

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let rho_ab = random_state(4, 4, 4)?;
    let (ha, hb) = (
        random_hamiltonian_with(2, &mut rng),
        random_hamiltonian_with(2, &mut rng),
    );
    let c = elimination_inequality_check(&rho_ab, &ha, &hb, 0.7)?;
    println!("reduced {:.4} <= joint {:.4} ({})", c.lhs, c.rhs, c.holds);
    Ok(())
}
