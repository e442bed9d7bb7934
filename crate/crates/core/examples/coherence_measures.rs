//! Skew information, affinity, fidelity and the variance/QFI chain for a
//! random qutrit.

use qsl_lab::coherence::{
    affinity, coherence_chain, uhlmann_fidelity, wy_coherence, wy_lower_bound,
};
use qsl_lab::operator::{random_hamiltonian_with, random_state};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> qsl_lab::Result<()> {
    let rho = random_state(3, 3, 11)?;
    let sigma = random_state(3, 2, 12)?;
    let h = random_hamiltonian_with(3, &mut ChaCha8Rng::seed_from_u64(13));

    println!("Q(rho, H)          = {:.6}", wy_coherence(&rho, &h)?);
    println!("-1/2 Tr[rho, H]^2  = {:.6}", wy_lower_bound(&rho, &h)?);
    println!("A(rho, sigma)      = {:.6}", affinity(&rho, &sigma)?);
    println!(
        "F(rho, sigma)      = {:.6}",
        uhlmann_fidelity(&rho, &sigma)?
    );

    let c = coherence_chain(&rho, &h)?;
    println!(
        "Var = {:.6} >= F_Q/4 = {:.6} >= Q = {:.6}: {}",
        c.variance, c.qfi_quarter, c.q, c.holds_with_q
    );
    println!("F_Q/4 >= 2Q: {}", c.holds_with_two_q);
    Ok(())
}
