//! Speed-limit bounds and the inequalities built on them.
//!
//! All bounds are lower bounds on the time needed to drive `ρ₁` into `ρ₂`.
//! Angles are `acos` of an overlap clamped to `[-1, 1]`; a vanishing angle
//! gives a zero bound, while a vanishing denominator with a finite angle is
//! reported as [`QslError::FrozenState`].

use sha2::{Digest, Sha256};

use crate::coherence::{
    lindblad_coherence, relative_purity, sld_qfi, uhlmann_fidelity, variance, wy_coherence,
};
use crate::dynamics::{evolve_lindblad, evolve_unitary, LindbladModel};
use crate::error::{QslError, Result};
use crate::operator::{
    check_same_dim, commutator, identity, kron, partial_trace, partial_trace_matrix, real_trace,
    CMatrix, Observable, QuantumState, Subsystem,
};
use crate::quadrature::{integrate, Integral, SimpsonOptions};
use crate::tol;

fn clamped_acos(x: f64) -> f64 {
    if x >= 1.0 - tol::OVERLAP_ONE {
        return 0.0;
    }
    x.clamp(-1.0, 1.0).acos()
}

/// `angle / √denominator_sq` with the zero-angle and frozen conventions.
fn ratio(angle: f64, denominator_sq: f64) -> Result<f64> {
    if angle <= tol::ANGLE_ZERO {
        return Ok(0.0);
    }
    if denominator_sq <= tol::COHERENCE_ZERO {
        return Err(QslError::FrozenState { angle });
    }
    Ok(angle / denominator_sq.sqrt())
}

/// Half the Bargmann angle, `acos A(ρ₁, ρ₂)`.
///
/// Evaluated as `2 asin(‖√ρ₁ - √ρ₂‖_F / 2)`, which equals `acos A` because
/// `‖√ρ₁ - √ρ₂‖² = 2 - 2A`, and stays accurate for nearby states.
pub fn bargmann_angle(rho1: &QuantumState, rho2: &QuantumState) -> Result<f64> {
    check_same_dim(rho1.dim(), rho2.dim(), "bargmann_angle")?;
    let d = (rho1.sqrt() - rho2.sqrt()).norm();
    Ok(2.0 * (0.5 * d).min(1.0).asin())
}

/// `(ħ/√2) acos A(ρ₁, ρ₂) / √Q(ρ₁, H)`.
pub fn tl_bound(rho1: &QuantumState, h: &Observable, rho2: &QuantumState) -> Result<f64> {
    check_same_dim(rho1.dim(), h.dim(), "tl_bound")?;
    let angle = bargmann_angle(rho1, rho2)?;
    if angle <= tol::ANGLE_ZERO {
        return Ok(0.0);
    }
    let q = wy_coherence(rho1, h)?;
    Ok(h.hbar() / 2f64.sqrt() * ratio(angle, q)?)
}

/// A Hamiltonian that may change with time. Breakpoints split the
/// quadrature so piecewise schedules integrate exactly.
pub trait HamiltonianPath {
    fn at(&self, t: f64) -> Observable;
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl<F: Fn(f64) -> Observable> HamiltonianPath for F {
    fn at(&self, t: f64) -> Observable {
        self(t)
    }
}

/// `H_k` on `[t_k, t_{k+1})`.
#[derive(Debug, Clone)]
pub struct PiecewiseHamiltonian {
    /// `(start time, Hamiltonian)`, ascending starts.
    pub pieces: Vec<(f64, Observable)>,
}

impl HamiltonianPath for PiecewiseHamiltonian {
    fn at(&self, t: f64) -> Observable {
        self.pieces
            .iter()
            .rev()
            .find(|(s, _)| *s <= t)
            .unwrap_or(&self.pieces[0])
            .1
            .clone()
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.pieces.iter().skip(1).map(|(s, _)| *s).collect()
    }
}

/// `(ħ/√2) acos A / ((1/τ)∫₀^τ √Q(ρ₁, H(t)) dt)`.
pub fn tl_bound_time_avg(
    rho1: &QuantumState,
    path: &dyn HamiltonianPath,
    rho2: &QuantumState,
    tau: f64,
    opts: SimpsonOptions,
) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(QslError::BadGrid(format!(
            "time-average needs tau > 0, got {tau}"
        )));
    }
    let angle = bargmann_angle(rho1, rho2)?;
    let h0 = path.at(0.0);
    let mut cuts: Vec<f64> = path
        .breakpoints()
        .into_iter()
        .filter(|&b| b > 0.0 && b < tau)
        .collect();
    cuts.insert(0, 0.0);
    cuts.push(tau);
    let mut integral = 0.0;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        // sample inside each piece so the left-closed convention does not leak
        let eps = 1e-12 * (b - a);
        let piece = integrate(
            |t| {
                let t = t.clamp(a + eps, b - eps);
                Ok(wy_coherence(rho1, &path.at(t))?.sqrt())
            },
            a,
            b,
            SimpsonOptions {
                max_doublings: 0,
                ..opts
            },
        )?;
        integral += piece.value;
    }
    let mean = integral / tau;
    if angle <= tol::ANGLE_ZERO {
        return Ok(0.0);
    }
    Ok(h0.hbar() / 2f64.sqrt() * ratio(angle, mean * mean)?)
}

/// `ħ √(Tr ρ₁^α) acos|Tr(ρ₁^{α/2} ρ₂^{α/2}) / Tr ρ₁^α| / √(-Tr[ρ₁^{α/2}, H]²)`.
pub fn alpha_bound(
    rho1: &QuantumState,
    h: &Observable,
    rho2: &QuantumState,
    alpha: f64,
) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(QslError::BadAlpha(alpha));
    }
    check_same_dim(rho1.dim(), h.dim(), "alpha_bound")?;
    check_same_dim(rho1.dim(), rho2.dim(), "alpha_bound")?;
    let p1 = rho1.power(alpha / 2.0);
    let p2 = rho2.power(alpha / 2.0);
    let tr_a = rho1.trace_power(alpha);
    let overlap = (p1.clone() * p2).trace().norm() / tr_a;
    let angle = clamped_acos(overlap);
    if angle <= tol::ANGLE_ZERO {
        return Ok(0.0);
    }
    let c = commutator(&p1, h.matrix())?;
    let denom_sq = -real_trace(&(&c * &c))?;
    Ok(h.hbar() * tr_a.sqrt() * ratio(angle, denom_sq)?)
}

/// `0.25, 0.30, …, 4.00`.
pub fn default_alpha_grid() -> Vec<f64> {
    (0..=75).map(|k| (25 + 5 * k) as f64 / 100.0).collect()
}

/// Largest [`alpha_bound`] over a grid; near-ties keep the smaller alpha.
pub fn alpha_bound_max(
    rho1: &QuantumState,
    h: &Observable,
    rho2: &QuantumState,
    grid: &[f64],
) -> Result<(f64, f64)> {
    if grid.is_empty() {
        return Err(QslError::InvalidArgument("empty alpha grid".into()));
    }
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut best: Option<(f64, f64)> = None;
    for &alpha in &sorted {
        let v = alpha_bound(rho1, h, rho2, alpha)?;
        match best {
            Some((_, b)) if v <= b * (1.0 + 1e-12) + 1e-15 => {}
            _ => best = Some((alpha, v)),
        }
    }
    Ok(best.expect("grid is non-empty"))
}

/// `ħ acos F / ΔH`.
pub fn mt_fidelity_bound(rho1: &QuantumState, h: &Observable, rho2: &QuantumState) -> Result<f64> {
    let angle = clamped_acos(uhlmann_fidelity(rho1, rho2)?);
    if angle <= tol::ANGLE_ZERO {
        return Ok(0.0);
    }
    Ok(h.hbar() * ratio(angle, variance(rho1, h)?)?)
}

/// `2ħ acos F / √F_Q`, the Bures-angle bound with SLD Fisher information.
pub fn qfi_bound(rho1: &QuantumState, h: &Observable, rho2: &QuantumState) -> Result<f64> {
    let angle = clamped_acos(uhlmann_fidelity(rho1, rho2)?);
    if angle <= tol::ANGLE_ZERO {
        return Ok(0.0);
    }
    Ok(2.0 * h.hbar() * ratio(angle, sld_qfi(rho1, h)?)?)
}

/// Relative-purity bound and its intermediate forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CampoBound {
    /// `[acos f]² Tr ρ₁²`.
    pub n: f64,
    /// `√(-Tr[ρ₁, H]²)`.
    pub d: f64,
    /// `ħ√N/D`.
    pub sqrt_n_over_d: f64,
    /// `2ħ√N/(πD)`.
    pub two_sqrt_n_over_pi_d: f64,
    /// `4ħN/(π²D)`.
    pub value: f64,
}

pub fn campo_bound(rho1: &QuantumState, h: &Observable, rho2: &QuantumState) -> Result<CampoBound> {
    use std::f64::consts::PI;
    let theta = clamped_acos(relative_purity(rho1, rho2)?);
    let n = theta * theta * rho1.purity();
    let c = commutator(rho1.matrix(), h.matrix())?;
    let d = (-real_trace(&(&c * &c))?).max(0.0).sqrt();
    if theta <= tol::ANGLE_ZERO {
        return Ok(CampoBound {
            n,
            d,
            sqrt_n_over_d: 0.0,
            two_sqrt_n_over_pi_d: 0.0,
            value: 0.0,
        });
    }
    if d * d <= tol::COHERENCE_ZERO {
        return Err(QslError::FrozenState { angle: theta });
    }
    let hbar = h.hbar();
    Ok(CampoBound {
        n,
        d,
        sqrt_n_over_d: hbar * n.sqrt() / d,
        two_sqrt_n_over_pi_d: 2.0 * hbar * n.sqrt() / (PI * d),
        value: 4.0 * hbar * n / (PI * PI * d),
    })
}

/// `T_l(ρ₁, H, ρ₂) √Q(ρ₁, H)`.
pub fn u_quantity(rho1: &QuantumState, h: &Observable, rho2: &QuantumState) -> Result<f64> {
    let tl = tl_bound(rho1, h, rho2)?;
    if tl == 0.0 {
        return Ok(0.0);
    }
    Ok(tl * wy_coherence(rho1, h)?.sqrt())
}

/// `lhs ≤ rhs` with slack.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InequalityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl InequalityCheck {
    fn new(lhs: f64, rhs: f64) -> Self {
        InequalityCheck {
            lhs,
            rhs,
            holds: lhs <= rhs + tol::INEQUALITY,
        }
    }

    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }
}

/// The three U-quantities entering the mixing inequality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingTerms {
    pub u_rho: f64,
    pub u_sigma: f64,
    pub u_gamma: f64,
}

pub fn mixing_terms(
    rho1: &QuantumState,
    sigma1: &QuantumState,
    p: f64,
    h: &Observable,
    t: f64,
) -> Result<MixingTerms> {
    let gamma1 = rho1.mix(sigma1, p)?;
    let u = |s: &QuantumState| -> Result<f64> { u_quantity(s, h, &evolve_unitary(s, h, t)?) };
    Ok(MixingTerms {
        u_rho: u(rho1)?,
        u_sigma: u(sigma1)?,
        u_gamma: u(&gamma1)?,
    })
}

/// `U_γ ≤ √p U_ρ + √(1-p) U_σ` for `γ = pρ + (1-p)σ` evolved under `U(t)`.
pub fn mixing_inequality_check(
    rho1: &QuantumState,
    sigma1: &QuantumState,
    p: f64,
    h: &Observable,
    t: f64,
) -> Result<InequalityCheck> {
    let m = mixing_terms(rho1, sigma1, p, h, t)?;
    Ok(InequalityCheck::new(
        m.u_gamma,
        p.sqrt() * m.u_rho + (1.0 - p).sqrt() * m.u_sigma,
    ))
}

/// `U^{H_a}(ρ_a, σ_a) ≤ U^{H_ab}(ρ_ab, σ_ab)` with `H_ab = H_a⊗I + I⊗H_b`.
pub fn elimination_inequality_check(
    rho_ab: &QuantumState,
    h_a: &Observable,
    h_b: &Observable,
    t: f64,
) -> Result<InequalityCheck> {
    let dims = (h_a.dim(), h_b.dim());
    check_same_dim(
        rho_ab.dim(),
        dims.0 * dims.1,
        "elimination_inequality_check",
    )?;
    if (h_a.hbar() - h_b.hbar()).abs() > 0.0 {
        return Err(QslError::InvalidArgument(
            "H_a and H_b use different hbar".into(),
        ));
    }
    let h_ab = Observable::with_units(
        kron(h_a.matrix(), &identity(dims.1)) + kron(&identity(dims.0), h_b.matrix()),
        h_a.hbar(),
        h_a.omega(),
    )?;
    let sigma_ab = evolve_unitary(rho_ab, &h_ab, t)?;
    let rho_a = partial_trace(rho_ab, dims, Subsystem::A)?;
    let sigma_a = partial_trace(&sigma_ab, dims, Subsystem::A)?;
    let lhs = u_quantity(&rho_a, h_a, &sigma_a)?;
    let rhs = u_quantity(rho_ab, &h_ab, &sigma_ab)?;
    Ok(InequalityCheck::new(lhs, rhs))
}

/// `acos(px + (1-p)y) ≤ √p acos x + √(1-p) acos y`.
pub fn acos_mixing_lemma(x: f64, y: f64, p: f64) -> Result<InequalityCheck> {
    for (name, v) in [("x", x), ("y", y), ("p", p)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(QslError::InvalidArgument(format!(
                "{name} = {v} outside [0, 1]"
            )));
        }
    }
    let lhs = clamped_acos(p * x + (1.0 - p) * y);
    let rhs = p.sqrt() * x.acos() + (1.0 - p).sqrt() * y.acos();
    Ok(InequalityCheck::new(lhs, rhs))
}

/// Bound for a system coupled to an environment through a joint unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemEnvironmentBound {
    pub value: f64,
    /// `-Tr[√ρ₀ ⊗ √γ, H_SE]²`.
    pub two_q_se: f64,
    /// `Tr_E(H_SE (I ⊗ γ))`.
    pub h_tilde: CMatrix,
    /// `2Q(ρ₀, H̃_S)`, compared against `two_q_se` as a diagnostic.
    pub two_q_effective: f64,
}

pub fn system_environment_bound(
    rho0_s: &QuantumState,
    gamma_e: &QuantumState,
    h_se: &Observable,
    rho_tau_s: &QuantumState,
) -> Result<SystemEnvironmentBound> {
    let dims = (rho0_s.dim(), gamma_e.dim());
    check_same_dim(h_se.dim(), dims.0 * dims.1, "system_environment_bound")?;
    check_same_dim(rho0_s.dim(), rho_tau_s.dim(), "system_environment_bound")?;
    let joint_root = kron(&rho0_s.sqrt(), &gamma_e.sqrt());
    let c = commutator(&joint_root, h_se.matrix())?;
    let two_q_se = (-real_trace(&(&c * &c))?).max(0.0);
    let weighted = h_se.matrix() * kron(&identity(dims.0), gamma_e.matrix());
    let h_tilde = crate::operator::hermitize(&partial_trace_matrix(&weighted, dims, Subsystem::A)?);
    let h_eff = Observable::with_units(h_tilde.clone(), h_se.hbar(), h_se.omega())?;
    let two_q_effective = 2.0 * wy_coherence(rho0_s, &h_eff)?;
    let angle = bargmann_angle(rho0_s, rho_tau_s)?;
    let value = h_se.hbar() * ratio(angle, two_q_se)?;
    Ok(SystemEnvironmentBound {
        value,
        two_q_se,
        h_tilde,
        two_q_effective,
    })
}

/// `acos A(ρ₀, ρ_τ) / ((1/τ)∫√(2Q(ρ_t, 𝓛)) dt)` along a Lindblad path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkovianBound {
    pub value: f64,
    pub angle: f64,
    /// Time average of `√(2Q(ρ_t, 𝓛))`.
    pub mean_speed: f64,
    pub integral: Integral,
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(QslError::BadGrid(format!(
            "tau must be positive, got {tau}"
        )));
    }
    Ok(())
}

pub fn markovian_bound(
    rho0: &QuantumState,
    model: &LindbladModel,
    tau: f64,
    opts: SimpsonOptions,
) -> Result<MarkovianBound> {
    check_tau(tau)?;
    let rho_tau = evolve_lindblad(rho0, model, tau)?;
    let angle = bargmann_angle(rho0, &rho_tau)?;
    let integral = integrate(
        |t| Ok((2.0 * lindblad_coherence(&evolve_lindblad(rho0, model, t)?, model)?).sqrt()),
        0.0,
        tau,
        opts,
    )?;
    let mean_speed = integral.value / tau;
    let value = ratio(angle, mean_speed * mean_speed)?;
    Ok(MarkovianBound {
        value,
        angle,
        mean_speed,
        integral,
    })
}

/// Relative-purity bound along a Lindblad path,
/// `4θ² Tr ρ₀² / (π² (1/τ)∫‖𝓛ρ_t‖_F dt)` with `θ = acos f(ρ₀, ρ_τ)`.
pub fn campo_lindblad_bound(
    rho0: &QuantumState,
    model: &LindbladModel,
    tau: f64,
    opts: SimpsonOptions,
) -> Result<f64> {
    use std::f64::consts::PI;
    check_tau(tau)?;
    let rho_tau = evolve_lindblad(rho0, model, tau)?;
    let theta = clamped_acos(relative_purity(rho0, &rho_tau)?);
    if theta <= tol::ANGLE_ZERO {
        return Ok(0.0);
    }
    let integral = integrate(
        |t| {
            Ok(model
                .apply(evolve_lindblad(rho0, model, t)?.matrix())
                .norm())
        },
        0.0,
        tau,
        opts,
    )?;
    let mean = integral.value / tau;
    if mean <= tol::COHERENCE_ZERO {
        return Err(QslError::FrozenState { angle: theta });
    }
    Ok(4.0 * theta * theta * rho0.purity() / (PI * PI * mean))
}

/// `τ acos A(ρ₀, ρ_τ) / Σ_k acos A(ρ_k, ρ_{k+1})` on a uniform grid.
///
/// The denominator is a polygonal length of the purification path
/// `t ↦ √ρ_t`, so the triangle inequality keeps the value at or below `τ`
/// for any grid; it converges to the purification-speed bound as the grid
/// is refined.
pub fn purification_bound(
    rho0: &QuantumState,
    model: &LindbladModel,
    tau: f64,
    segments: usize,
) -> Result<f64> {
    check_tau(tau)?;
    if segments == 0 {
        return Err(QslError::BadGrid("need at least one segment".into()));
    }
    let h = tau / segments as f64;
    let states = (0..=segments)
        .map(|k| evolve_lindblad(rho0, model, k as f64 * h))
        .collect::<Result<Vec<_>>>()?;
    let angle = bargmann_angle(rho0, &states[segments])?;
    if angle <= tol::ANGLE_ZERO {
        return Ok(0.0);
    }
    let mut length = 0.0;
    for w in states.windows(2) {
        length += bargmann_angle(&w[0], &w[1])?;
    }
    Ok(tau * angle / length)
}

/// Every unitary bound for one `(ρ₁, H, ρ₂)` triple.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub tl: f64,
    pub tl_alpha2: f64,
    pub tl_alpha_max: (f64, f64),
    pub mt_fidelity: f64,
    pub qfi: f64,
    pub campo: f64,
    pub actual_time: Option<f64>,
    pub inputs_digest: String,
}

impl BoundReport {
    /// Named bound values in a fixed order.
    pub fn bounds(&self) -> [(&'static str, f64); 6] {
        [
            ("tl", self.tl),
            ("tl_alpha2", self.tl_alpha2),
            ("tl_alpha_max", self.tl_alpha_max.1),
            ("mt_fidelity", self.mt_fidelity),
            ("qfi", self.qfi),
            ("campo", self.campo),
        ]
    }

    /// Each bound is at most the actual time (plus slack); `None` without one.
    pub fn valid(&self, slack: f64) -> Option<bool> {
        self.actual_time
            .map(|t| self.bounds().iter().all(|(_, b)| *b <= t + slack))
    }

    /// `tl ≥ mt_fidelity ≥ qfi` up to `slack`.
    pub fn ordered(&self, slack: f64) -> bool {
        self.tl + slack >= self.mt_fidelity && self.mt_fidelity + slack >= self.qfi
    }
}

pub fn bound_report(
    rho1: &QuantumState,
    h: &Observable,
    rho2: &QuantumState,
    alpha_grid: &[f64],
    actual_time: Option<f64>,
) -> Result<BoundReport> {
    Ok(BoundReport {
        tl: tl_bound(rho1, h, rho2)?,
        tl_alpha2: alpha_bound(rho1, h, rho2, 2.0)?,
        tl_alpha_max: alpha_bound_max(rho1, h, rho2, alpha_grid)?,
        mt_fidelity: mt_fidelity_bound(rho1, h, rho2)?,
        qfi: qfi_bound(rho1, h, rho2)?,
        campo: campo_bound(rho1, h, rho2)?.value,
        actual_time,
        inputs_digest: digest_matrices(&[rho1.matrix(), h.matrix(), rho2.matrix()], &[h.hbar()]),
    })
}

/// Short SHA-256 digest over matrix entries and scalars.
pub fn digest_matrices(mats: &[&CMatrix], scalars: &[f64]) -> String {
    let mut hasher = Sha256::new();
    for m in mats {
        hasher.update((m.nrows() as u64).to_le_bytes());
        for z in m.iter() {
            hasher.update(z.re.to_le_bytes());
            hasher.update(z.im.to_le_bytes());
        }
    }
    for s in scalars {
        hasher.update(s.to_le_bytes());
    }
    hasher
        .finalize()
        .iter()
        .take(8)
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::SqueezedVacuum;
    use crate::operator::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

    fn bloch(r: [f64; 3]) -> QuantumState {
        bloch_to_state(&BlochVector(r)).unwrap()
    }

    fn case3() -> (QuantumState, Observable, QuantumState) {
        let s = |x: f64| x.sqrt();
        let h =
            Observable::bloch([1.0 / s(2.0), 1.0 / s(3.0), -1.0 / s(6.0)], 1.0, 0.0, 1.0).unwrap();
        (
            bloch([0.0, 0.0, 0.5]),
            h,
            bloch([-4.0 * s(3.0) / 15.0, s(2.0) / 15.0, -1.0 / 6.0]),
        )
    }

    #[test]
    fn bargmann_examples() {
        let r = random_state(2, 2, 1).unwrap();
        assert_eq!(bargmann_angle(&r, &r).unwrap(), 0.0);
        assert_abs_diff_eq!(
            bargmann_angle(&bloch([0.0, 0.0, 1.0]), &bloch([0.0, 0.0, -1.0])).unwrap(),
            FRAC_PI_2,
            epsilon = 1e-12
        );
        let (r1, _, r2) = case3();
        assert_abs_diff_eq!(
            bargmann_angle(&r1, &r2).unwrap(),
            0.9107f64.acos(),
            epsilon = 2e-4
        );
    }

    #[test]
    fn case_values() {
        let h = Observable::bloch([1.0, 0.0, 0.0], 1.0, 0.0, 1.0).unwrap();
        let up = bloch([0.0, 0.0, 1.0]);
        let tl1 = tl_bound(&up, &h, &evolve_unitary(&up, &h, FRAC_PI_2).unwrap()).unwrap();
        assert_abs_diff_eq!(tl1, PI / (2.0 * 2f64.sqrt()), epsilon = 1e-12);

        // n̂·r̂ = 1/√2 with a = 3π/4 on a pure state
        let r = [FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2];
        let z = Observable::bloch([0.0, 0.0, 1.0], 1.0, 0.0, 1.0).unwrap();
        let rho = bloch(r);
        let tl2 = tl_bound(&rho, &z, &evolve_unitary(&rho, &z, 0.75 * PI).unwrap()).unwrap();
        assert_abs_diff_eq!(tl2, 0.75f64.acos(), epsilon = 1e-12);

        let (r1, h3, r2) = case3();
        let tl3 = tl_bound(&r1, &h3, &r2).unwrap();
        let q = (1.0 - 0.75f64.sqrt()) * 5.0 / 6.0;
        assert_abs_diff_eq!(
            tl3,
            bargmann_angle(&r1, &r2).unwrap() / (2.0 * q).sqrt(),
            epsilon = 1e-12
        );
        assert!((tl3 - 0.90).abs() < 0.01);
    }

    #[test]
    fn frozen_state_is_an_error() {
        let x = Observable::new(sigma_x()).unwrap();
        let plus = bloch([1.0, 0.0, 0.0]);
        let other = bloch([0.0, 1.0, 0.0]);
        assert!(matches!(
            tl_bound(&plus, &x, &other),
            Err(QslError::FrozenState { .. })
        ));
        assert_eq!(tl_bound(&plus, &x, &plus).unwrap(), 0.0);
    }

    #[test]
    fn time_average_reductions() {
        let (r1, h, r2) = case3();
        let opts = SimpsonOptions::default();
        let h_const = h.clone();
        let avg = tl_bound_time_avg(&r1, &move |_t: f64| h_const.clone(), &r2, 1.3, opts).unwrap();
        assert_abs_diff_eq!(avg, tl_bound(&r1, &h, &r2).unwrap(), epsilon = 1e-10);

        // g(t) = 1 + t² scales √Q linearly; mean of g on [0, 2] is 7/3
        let h_scaled = h.clone();
        let scaled = tl_bound_time_avg(
            &r1,
            &move |t: f64| h_scaled.scaled(1.0 + t * t),
            &r2,
            2.0,
            opts,
        )
        .unwrap();
        assert_abs_diff_eq!(
            scaled,
            tl_bound(&r1, &h, &r2).unwrap() * 3.0 / 7.0,
            epsilon = 1e-10
        );

        let plus = bloch([1.0, 0.0, 0.0]);
        let target = bloch([0.0, 1.0, 0.0]);
        let tau = 2.0;
        let piecewise = PiecewiseHamiltonian {
            pieces: vec![
                (0.0, Observable::new(sigma_z()).unwrap()),
                (tau / 2.0, Observable::new(sigma_x()).unwrap()),
            ],
        };
        let v = tl_bound_time_avg(&plus, &piecewise, &target, tau, opts).unwrap();
        let direct = FRAC_1_SQRT_2 * bargmann_angle(&plus, &target).unwrap() / 0.5;
        assert_abs_diff_eq!(v, direct, epsilon = 1e-10);
        assert!(tl_bound_time_avg(&plus, &piecewise, &target, 0.0, opts).is_err());
    }

    #[test]
    fn alpha_one_is_tl() {
        for seed in 0..10 {
            let r1 = random_state(3, 3, seed).unwrap();
            let h = random_hamiltonian_with(
                3,
                &mut <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed),
            );
            let r2 = evolve_unitary(&r1, &h, 0.8).unwrap();
            assert_abs_diff_eq!(
                alpha_bound(&r1, &h, &r2, 1.0).unwrap(),
                tl_bound(&r1, &h, &r2).unwrap(),
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn alpha_examples() {
        let h = Observable::new(sigma_x()).unwrap();
        let psi = random_state(2, 1, 4).unwrap();
        let psi_t = evolve_unitary(&psi, &h, 0.6).unwrap();
        assert_abs_diff_eq!(
            alpha_bound(&psi, &h, &psi_t, 2.0).unwrap(),
            alpha_bound(&psi, &h, &psi_t, 1.0).unwrap(),
            epsilon = 1e-10
        );
        assert!(matches!(
            alpha_bound(&psi, &h, &psi_t, 0.0),
            Err(QslError::BadAlpha(_))
        ));

        // α = 2: ħ √Trρ² acos(Tr ρ₁ρ₂/Tr ρ₁²) / ‖[ρ₁, H]‖
        let (r1, h3, r2) = case3();
        let tr2 = r1.purity();
        let ov = trace_product(r1.matrix(), r2.matrix()).re / tr2;
        let c = commutator(r1.matrix(), h3.matrix()).unwrap();
        let oracle = tr2.sqrt() * ov.acos() / c.norm();
        assert_abs_diff_eq!(
            alpha_bound(&r1, &h3, &r2, 2.0).unwrap(),
            oracle,
            epsilon = 1e-12
        );
    }

    #[test]
    fn alpha_max_examples() {
        let grid = default_alpha_grid();
        assert_eq!(grid.len(), 76);
        assert_eq!(grid[15], 1.0);
        assert_eq!(grid[35], 2.0);
        let h = Observable::new(sigma_x()).unwrap();
        let psi = random_state(2, 1, 4).unwrap();
        let psi_t = evolve_unitary(&psi, &h, 0.6).unwrap();
        assert_eq!(alpha_bound_max(&psi, &h, &psi_t, &grid).unwrap().0, 0.25);

        let (r1, h3, r2) = case3();
        let (_, best) = alpha_bound_max(&r1, &h3, &r2, &grid).unwrap();
        assert!(best >= alpha_bound(&r1, &h3, &r2, 1.0).unwrap() - 1e-12);

        let r1 = random_state(2, 2, 8).unwrap();
        let r2 = evolve_unitary(&r1, &h3, 1.1).unwrap();
        let mut scan = (0.0, f64::NEG_INFINITY);
        for &a in &grid {
            let v = alpha_bound(&r1, &h3, &r2, a).unwrap();
            if v > scan.1 {
                scan = (a, v);
            }
        }
        let got = alpha_bound_max(&r1, &h3, &r2, &grid).unwrap();
        assert_abs_diff_eq!(got.1, scan.1, epsilon = 1e-12);
    }

    #[test]
    fn fidelity_bounds_examples() {
        let r = random_state(2, 2, 9).unwrap();
        let h = Observable::new(sigma_y()).unwrap();
        assert_eq!(mt_fidelity_bound(&r, &h, &r).unwrap(), 0.0);
        assert_eq!(qfi_bound(&r, &h, &r).unwrap(), 0.0);
        let psi = random_state(2, 1, 9).unwrap();
        let psi_t = evolve_unitary(&psi, &h, 0.5).unwrap();
        assert_abs_diff_eq!(
            mt_fidelity_bound(&psi, &h, &psi_t).unwrap(),
            qfi_bound(&psi, &h, &psi_t).unwrap(),
            epsilon = 1e-6
        );
    }

    #[test]
    fn campo_chain_is_algebraic() {
        for seed in 0..20 {
            let r1 = random_state(2, 2, seed).unwrap();
            let h = random_hamiltonian_with(
                2,
                &mut <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed + 100),
            );
            let r2 = evolve_unitary(&r1, &h, 1.0).unwrap();
            let c = campo_bound(&r1, &h, &r2).unwrap();
            assert!(c.sqrt_n_over_d >= c.two_sqrt_n_over_pi_d - 1e-12);
            assert!(c.two_sqrt_n_over_pi_d >= c.value - 1e-12);
        }
        let r = random_state(2, 2, 1).unwrap();
        assert_eq!(
            campo_bound(&r, &Observable::new(sigma_x()).unwrap(), &r)
                .unwrap()
                .value,
            0.0
        );
    }

    #[test]
    fn u_quantity_collapses() {
        let r = random_state(3, 2, 2).unwrap();
        let h = random_hamiltonian_with(
            3,
            &mut <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(5),
        );
        assert_eq!(u_quantity(&r, &h, &r).unwrap(), 0.0);
        let r2 = evolve_unitary(&r, &h, 0.9).unwrap();
        assert_abs_diff_eq!(
            u_quantity(&r, &h, &r2).unwrap(),
            FRAC_1_SQRT_2 * bargmann_angle(&r, &r2).unwrap(),
            epsilon = 1e-10
        );
        let x = Observable::new(sigma_x()).unwrap();
        let up = bloch([0.0, 0.0, 1.0]);
        let down = bloch([0.0, 0.0, -1.0]);
        assert_abs_diff_eq!(
            u_quantity(&up, &x, &down).unwrap(),
            FRAC_1_SQRT_2 * FRAC_PI_2,
            epsilon = 1e-12
        );
    }

    #[test]
    fn mixing_examples() {
        let h = Observable::new(sigma_z()).unwrap();
        let rho = random_state(2, 2, 3).unwrap();
        let sigma = random_state(2, 1, 4).unwrap();
        for p in [0.0, 1.0] {
            let c = mixing_inequality_check(&rho, &sigma, p, &h, 0.7).unwrap();
            assert_abs_diff_eq!(c.lhs, c.rhs, epsilon = 1e-12);
        }
        assert!(
            mixing_inequality_check(&rho, &sigma, 0.3, &h, 0.7)
                .unwrap()
                .holds
        );
    }

    #[test]
    fn elimination_examples() {
        let a = random_state(2, 2, 1).unwrap();
        let b = random_state(2, 2, 2).unwrap();
        let h_a = Observable::new(sigma_x() + sigma_z().scale(0.3)).unwrap();
        let c =
            elimination_inequality_check(&a.tensor(&b).unwrap(), &h_a, &Observable::zero(2), 0.8)
                .unwrap();
        assert_abs_diff_eq!(c.lhs, c.rhs, epsilon = 1e-12);

        let h = FRAC_1_SQRT_2;
        let bell = QuantumState::pure(&[
            C64::new(h, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(h, 0.0),
        ])
        .unwrap();
        let c =
            elimination_inequality_check(&bell, &h_a, &Observable::new(sigma_y()).unwrap(), 0.7)
                .unwrap();
        assert!(c.holds);
        assert_eq!(c.lhs, 0.0);
    }

    #[test]
    fn acos_lemma_examples() {
        let c = acos_mixing_lemma(0.4, 0.4, 0.3).unwrap();
        assert_abs_diff_eq!(c.lhs, 0.4f64.acos(), epsilon = 1e-15);
        assert!(c.holds);
        let c = acos_mixing_lemma(0.2, 0.9, 1.0).unwrap();
        assert_abs_diff_eq!(c.lhs, c.rhs, epsilon = 1e-15);
        assert!(acos_mixing_lemma(1.2, 0.0, 0.5).is_err());
    }

    #[test]
    fn system_environment_examples() {
        let rho0 = random_state(2, 2, 5).unwrap();
        let gamma = random_state(2, 2, 6).unwrap();
        let h_s = Observable::new(sigma_x() + sigma_z().scale(0.4)).unwrap();
        let h_se = Observable::new(kron(h_s.matrix(), &identity(2))).unwrap();
        let rho_tau = evolve_unitary(&rho0, &h_s, 0.9).unwrap();
        let b = system_environment_bound(&rho0, &gamma, &h_se, &rho_tau).unwrap();
        assert_abs_diff_eq!(
            b.value,
            tl_bound(&rho0, &h_s, &rho_tau).unwrap(),
            epsilon = 1e-10
        );

        let down = bloch([0.0, 0.0, -1.0]);
        let h_env = Observable::new(kron(&identity(2), &sigma_z())).unwrap();
        let frozen = system_environment_bound(&rho0, &down, &h_env, &rho0).unwrap();
        assert_abs_diff_eq!(frozen.two_q_se, 0.0, epsilon = 1e-14);
        assert_eq!(frozen.value, 0.0);
    }

    #[test]
    fn markovian_reduces_to_tl_for_hamiltonian_generator() {
        let rho = random_state(2, 2, 12).unwrap();
        let h = Observable::new(sigma_x() + sigma_y().scale(0.5)).unwrap();
        let model = LindbladModel::unitary(h.clone());
        let tau = 0.9;
        let b = markovian_bound(&rho, &model, tau, SimpsonOptions::default()).unwrap();
        let tl = tl_bound(&rho, &h, &evolve_unitary(&rho, &h, tau).unwrap()).unwrap();
        assert_abs_diff_eq!(b.value, tl, epsilon = 1e-6);
        let campo_unitary = campo_bound(&rho, &h, &evolve_unitary(&rho, &h, tau).unwrap())
            .unwrap()
            .value;
        let campo_path =
            campo_lindblad_bound(&rho, &model, tau, SimpsonOptions::default()).unwrap();
        assert_abs_diff_eq!(campo_path, campo_unitary, epsilon = 1e-6);
    }

    #[test]
    fn markovian_fixed_point_gives_zero() {
        let model = SqueezedVacuum::simple_case(-0.9).unwrap().model().unwrap();
        let diag = bloch([0.0, 0.0, 0.4]);
        let b = markovian_bound(&diag, &model, 1.0, SimpsonOptions::default()).unwrap();
        assert_eq!(b.value, 0.0);
    }

    #[test]
    fn purification_bound_never_exceeds_tau() {
        let model = SqueezedVacuum::simple_case(-0.9).unwrap().model().unwrap();
        let rho0 = bloch([1.0, 0.0, 0.0]);
        for &tau in &[0.1, 1.0, 5.0] {
            let v = purification_bound(&rho0, &model, tau, 400).unwrap();
            assert!(v <= tau + 1e-12 && v > 0.0);
        }
    }

    #[test]
    fn digest_is_stable_and_sensitive() {
        let a = sigma_x();
        let b = sigma_z();
        assert_eq!(
            digest_matrices(&[&a], &[1.0]),
            digest_matrices(&[&a], &[1.0])
        );
        assert_ne!(
            digest_matrices(&[&a], &[1.0]),
            digest_matrices(&[&b], &[1.0])
        );
        assert_eq!(digest_matrices(&[&a], &[]).len(), 16);
    }
}
