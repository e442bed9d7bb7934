//! Scalar information measures on states: Wigner–Yanase coherence, affinity,
//! fidelity, variance and the SLD Fisher information.

use crate::dynamics::LindbladModel;
use crate::error::Result;
use crate::operator::{
    check_same_dim, commutator, real_trace, trace_product, CMatrix, Observable, QuantumState,
};
use crate::tol;

fn clip_nonneg(x: f64) -> f64 {
    if x < 0.0 {
        0.0
    } else {
        x
    }
}

/// `-1/2 Tr([X, H]^2)` for Hermitian `X`.
fn half_neg_commutator_square(x: &CMatrix, h: &Observable) -> Result<f64> {
    let c = commutator(x, h.matrix())?;
    Ok(clip_nonneg(-0.5 * real_trace(&(&c * &c))?))
}

/// Wigner–Yanase coherence `Q(ρ, H) = -1/2 Tr([√ρ, H]^2)`.
pub fn wy_coherence(rho: &QuantumState, h: &Observable) -> Result<f64> {
    check_same_dim(rho.dim(), h.dim(), "wy_coherence")?;
    half_neg_commutator_square(&rho.sqrt(), h)
}

/// `-1/2 Tr([ρ, H]^2)`, a measurable lower bound of `2Q(ρ, H)`.
pub fn wy_lower_bound(rho: &QuantumState, h: &Observable) -> Result<f64> {
    check_same_dim(rho.dim(), h.dim(), "wy_lower_bound")?;
    half_neg_commutator_square(rho.matrix(), h)
}

/// Affinity `A(ρ₁, ρ₂) = Tr(√ρ₁ √ρ₂)`, clamped to `[0, 1]`.
pub fn affinity(rho1: &QuantumState, rho2: &QuantumState) -> Result<f64> {
    check_same_dim(rho1.dim(), rho2.dim(), "affinity")?;
    let a = real_trace(&(rho1.sqrt() * rho2.sqrt()))?;
    Ok(a.clamp(0.0, 1.0))
}

/// Uhlmann fidelity `Tr √(√ρ₁ ρ₂ √ρ₁)`.
pub fn uhlmann_fidelity(rho1: &QuantumState, rho2: &QuantumState) -> Result<f64> {
    check_same_dim(rho1.dim(), rho2.dim(), "uhlmann_fidelity")?;
    let s = rho1.sqrt();
    let inner = &s * rho2.matrix() * &s;
    let spec = crate::operator::hermitian_eig(&crate::operator::hermitize(&inner))?;
    let f: f64 = spec.values.iter().map(|&l| clip_nonneg(l).sqrt()).sum();
    Ok(f.clamp(0.0, 1.0))
}

/// `Tr(ρ₁ρ_t) / Tr(ρ₁²)`.
pub fn relative_purity(rho1: &QuantumState, rho_t: &QuantumState) -> Result<f64> {
    check_same_dim(rho1.dim(), rho_t.dim(), "relative_purity")?;
    let overlap = trace_product(rho1.matrix(), rho_t.matrix()).re;
    Ok(overlap / rho1.purity())
}

/// `Tr(ρH²) - Tr(ρH)²`.
pub fn variance(rho: &QuantumState, h: &Observable) -> Result<f64> {
    check_same_dim(rho.dim(), h.dim(), "variance")?;
    let rh = rho.matrix() * h.matrix();
    let mean = real_trace(&rh)?;
    let second = real_trace(&(&rh * h.matrix()))?;
    Ok(clip_nonneg(second - mean * mean))
}

/// Symmetric-logarithmic-derivative Fisher information,
/// `2 Σ (λ_j - λ_k)² / (λ_j + λ_k) |<j|H|k>|²`.
pub fn sld_qfi(rho: &QuantumState, h: &Observable) -> Result<f64> {
    check_same_dim(rho.dim(), h.dim(), "sld_qfi")?;
    let v = &rho.spectrum().vectors;
    let hk = v.adjoint() * h.matrix() * v;
    let lam = rho.eigenvalues();
    let mut f = 0.0;
    for j in 0..lam.len() {
        for k in 0..lam.len() {
            let s = lam[j] + lam[k];
            if s > tol::QFI_SUPPORT {
                let d = lam[j] - lam[k];
                f += 2.0 * d * d / s * hk[(j, k)].norm_sqr();
            }
        }
    }
    Ok(f)
}

/// Coherence of a state with respect to a Lindblad generator:
/// `Q(ρ, 𝓛)` with `2Q = Tr((𝓛√ρ)(𝓛√ρ)^H) - |Tr(√ρ 𝓛√ρ)|²`.
pub fn lindblad_coherence(rho: &QuantumState, model: &LindbladModel) -> Result<f64> {
    check_same_dim(rho.dim(), model.dim(), "lindblad_coherence")?;
    let s = rho.sqrt();
    let ls = model.apply(&s);
    let norm = ls.norm_squared();
    let overlap = trace_product(&s, &ls).norm_sqr();
    Ok(clip_nonneg(0.5 * (norm - overlap)))
}

/// The two candidate orderings linking variance, Fisher information and
/// Wigner–Yanase coherence, evaluated side by side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceChain {
    pub variance: f64,
    pub qfi_quarter: f64,
    pub q: f64,
    /// `Var >= F_Q/4 >= Q`.
    pub holds_with_q: bool,
    /// `Var >= F_Q/4 >= 2Q`.
    pub holds_with_two_q: bool,
}

pub fn coherence_chain(rho: &QuantumState, h: &Observable) -> Result<CoherenceChain> {
    let variance = variance(rho, h)?;
    let qfi_quarter = sld_qfi(rho, h)? / 4.0;
    let q = wy_coherence(rho, h)?;
    let slack = 1e-10;
    let top = variance + slack >= qfi_quarter;
    Ok(CoherenceChain {
        variance,
        qfi_quarter,
        q,
        holds_with_q: top && qfi_quarter + slack >= q,
        holds_with_two_q: top && qfi_quarter + slack >= 2.0 * q,
    })
}
