//! State propagation: unitary conjugation, closed-form qubit rotation,
//! Lindblad semigroups and the squeezed-vacuum damping basis.
//!
//! Vectorization is column-stacking, matching nalgebra's storage order, so
//! `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.

use rayon::prelude::*;

use crate::error::{QslError, Result};
use crate::operator::{
    check_same_dim, frobenius_distance, hermitian_deviation, identity, kron, sigma_minus, sigma_z,
    trace_product, unitary_of, BlochVector, CMatrix, Observable, QuantumState, C64, I,
};

/// `U(t) ρ₀ U(t)^H` with `U(t) = exp(iHt/ħ)`.
pub fn evolve_unitary(rho0: &QuantumState, h: &Observable, t: f64) -> Result<QuantumState> {
    check_same_dim(rho0.dim(), h.dim(), "evolve_unitary")?;
    rho0.conjugate(&unitary_of(h, t))
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Bloch vector after `exp(i a n̂·σ/ħ)` acts on `r`.
///
/// `r' = r cos(2a/ħ) + 2n̂(n̂·r) sin²(a/ħ) + sin(2a/ħ) (r × n̂)`.
pub fn qubit_evolution_closed_form(
    r: &BlochVector,
    n_hat: [f64; 3],
    a: f64,
    hbar: f64,
) -> Result<BlochVector> {
    let norm = n_hat.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(QslError::BadUnitVector { norm });
    }
    let phase = a / hbar;
    let (c2, s2, sin_sq) = (
        (2.0 * phase).cos(),
        (2.0 * phase).sin(),
        phase.sin().powi(2),
    );
    let nr: f64 = (0..3).map(|i| n_hat[i] * r.0[i]).sum();
    let rxn = cross(r.0, n_hat);
    let mut out = [0.0; 3];
    for i in 0..3 {
        out[i] = r.0[i] * c2 + 2.0 * n_hat[i] * nr * sin_sq + s2 * rxn[i];
    }
    Ok(BlochVector(out))
}

/// Markovian generator
/// `𝓛X = (i/ħ)[H, X] + ½ Σ c_ij ([A_i, X A_j^H] + [A_i X, A_j^H])`.
#[derive(Debug, Clone)]
pub struct LindbladModel {
    hamiltonian: Observable,
    jump_ops: Vec<CMatrix>,
    coeffs: CMatrix,
    superop: CMatrix,
    completely_positive: bool,
}

impl LindbladModel {
    pub fn new(hamiltonian: Observable, jump_ops: Vec<CMatrix>, coeffs: CMatrix) -> Result<Self> {
        let d = hamiltonian.dim();
        for (k, a) in jump_ops.iter().enumerate() {
            if a.shape() != (d, d) {
                return Err(QslError::DimMismatch(format!(
                    "jump operator {k} is {:?}, expected {d}x{d}",
                    a.shape()
                )));
            }
        }
        let n = jump_ops.len();
        if coeffs.shape() != (n, n) {
            return Err(QslError::DimMismatch(format!(
                "coefficient matrix is {:?} for {n} jump operators",
                coeffs.shape()
            )));
        }
        let dev = hermitian_deviation(&coeffs);
        if dev > 1e-12 {
            return Err(QslError::NonHermitian { deviation: dev });
        }
        let completely_positive = n == 0
            || crate::operator::hermitian_eig(&coeffs)?
                .values
                .last()
                .is_some_and(|&v| v >= -1e-12);
        if !completely_positive {
            log::warn!("Lindblad coefficient matrix is not positive semidefinite; dynamics may not be completely positive");
        }
        let mut model = LindbladModel {
            hamiltonian,
            jump_ops,
            coeffs,
            superop: CMatrix::zeros(0, 0),
            completely_positive,
        };
        model.superop = model.assemble();
        Ok(model)
    }

    /// Closed system: no dissipator.
    pub fn unitary(hamiltonian: Observable) -> Self {
        Self::new(hamiltonian, Vec::new(), CMatrix::zeros(0, 0)).expect("empty dissipator is valid")
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn hamiltonian(&self) -> &Observable {
        &self.hamiltonian
    }

    pub fn jump_ops(&self) -> &[CMatrix] {
        &self.jump_ops
    }

    pub fn coeffs(&self) -> &CMatrix {
        &self.coeffs
    }

    pub fn hbar(&self) -> f64 {
        self.hamiltonian.hbar()
    }

    pub fn is_completely_positive(&self) -> bool {
        self.completely_positive
    }

    /// `𝓛X` from the defining formula (no vectorization).
    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        let h = self.hamiltonian.matrix();
        let mut out = (h * x - x * h) * (I / self.hbar());
        for (i, ai) in self.jump_ops.iter().enumerate() {
            for (j, aj) in self.jump_ops.iter().enumerate() {
                let c = self.coeffs[(i, j)];
                if c == C64::new(0.0, 0.0) {
                    continue;
                }
                let ajd = aj.adjoint();
                let ajd_ai = &ajd * ai;
                let term = (ai * x * &ajd).scale(2.0) - x * &ajd_ai - &ajd_ai * x;
                out += term * (c * 0.5);
            }
        }
        out
    }

    /// `d² × d²` matrix of `𝓛` on column-stacked operators.
    pub fn superoperator(&self) -> &CMatrix {
        &self.superop
    }

    fn assemble(&self) -> CMatrix {
        let d = self.dim();
        let id = identity(d);
        let h = self.hamiltonian.matrix();
        let mut s = (kron(&id, h) - kron(&h.transpose(), &id)) * (I / self.hbar());
        for (i, ai) in self.jump_ops.iter().enumerate() {
            for (j, aj) in self.jump_ops.iter().enumerate() {
                let c = self.coeffs[(i, j)];
                if c == C64::new(0.0, 0.0) {
                    continue;
                }
                let ajd_ai = aj.adjoint() * ai;
                let term = kron(&aj.conjugate(), ai).scale(2.0)
                    - kron(&ajd_ai.transpose(), &id)
                    - kron(&id, &ajd_ai);
                s += term * (c * 0.5);
            }
        }
        s
    }

    /// Largest `|Σ_k S_{kk,·}|`: how far the trace row is from a left null vector.
    pub fn trace_annihilation_residual(&self) -> f64 {
        let d = self.dim();
        let s = &self.superop;
        (0..d * d)
            .map(|col| (0..d).map(|k| s[(k * d + k, col)]).sum::<C64>().norm())
            .fold(0.0, f64::max)
    }
}

fn vectorize(m: &CMatrix) -> nalgebra::DVector<C64> {
    nalgebra::DVector::from_column_slice(m.as_slice())
}

fn unvectorize(v: &nalgebra::DVector<C64>, d: usize) -> CMatrix {
    CMatrix::from_column_slice(d, d, v.as_slice())
}

/// `exp(t 𝓛) ρ₀`, re-Hermitized and validated.
pub fn evolve_lindblad(rho0: &QuantumState, model: &LindbladModel, t: f64) -> Result<QuantumState> {
    check_same_dim(rho0.dim(), model.dim(), "evolve_lindblad")?;
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    let out = propagate_operator(rho0.matrix(), model, t);
    QuantumState::from_propagated(out)
}

/// `exp(t 𝓛) X` for an arbitrary operator.
pub fn propagate_operator(x: &CMatrix, model: &LindbladModel, t: f64) -> CMatrix {
    if t == 0.0 {
        return x.clone();
    }
    let p = (model.superoperator() * C64::new(t, 0.0)).exp();
    unvectorize(&(p * vectorize(x)), model.dim())
}

/// Unitary or Markovian time-independent generator.
#[derive(Debug, Clone)]
pub enum Generator {
    Unitary(Observable),
    Lindblad(LindbladModel),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorTag {
    Unitary,
    Lindblad,
}

impl Generator {
    pub fn dim(&self) -> usize {
        match self {
            Generator::Unitary(h) => h.dim(),
            Generator::Lindblad(l) => l.dim(),
        }
    }

    pub fn tag(&self) -> GeneratorTag {
        match self {
            Generator::Unitary(_) => GeneratorTag::Unitary,
            Generator::Lindblad(_) => GeneratorTag::Lindblad,
        }
    }

    pub fn evolve(&self, rho0: &QuantumState, t: f64) -> Result<QuantumState> {
        match self {
            Generator::Unitary(h) => evolve_unitary(rho0, h, t),
            Generator::Lindblad(l) => evolve_lindblad(rho0, l, t),
        }
    }
}

/// States along a time grid.
#[derive(Debug, Clone)]
pub struct EvolutionPath {
    pub times: Vec<f64>,
    pub states: Vec<QuantumState>,
    pub generator_tag: GeneratorTag,
}

pub fn evolution_path(
    rho0: &QuantumState,
    generator: &Generator,
    times: &[f64],
) -> Result<EvolutionPath> {
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(QslError::BadGrid("times must be strictly ascending".into()));
    }
    let states = times
        .par_iter()
        .map(|&t| generator.evolve(rho0, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(EvolutionPath {
        times: times.to_vec(),
        states,
        generator_tag: generator.tag(),
    })
}

/// Smallest `t ∈ [0, t_max]` with `‖ρ(t) - target‖_F ≤ tol`.
///
/// A 1000-node scan finds the first node inside the tolerance or the first
/// local minimum of the distance that dips inside it after golden-section
/// refinement; bisection then locates the entry point to 1e-10 in `t`.
pub fn first_passage_time(
    rho0: &QuantumState,
    generator: &Generator,
    target: &QuantumState,
    tol: f64,
    t_max: f64,
) -> Result<f64> {
    if !(tol > 0.0) || !(t_max > 0.0) {
        return Err(QslError::InvalidArgument(format!(
            "need tol > 0 and t_max > 0 (got {tol}, {t_max})"
        )));
    }
    check_same_dim(rho0.dim(), target.dim(), "first_passage_time")?;
    let dist = |t: f64| -> Result<f64> {
        Ok(frobenius_distance(
            generator.evolve(rho0, t)?.matrix(),
            target.matrix(),
        ))
    };
    if dist(0.0)? <= tol {
        return Ok(0.0);
    }
    const NODES: usize = 1000;
    let h = t_max / NODES as f64;
    let vals = (0..=NODES)
        .map(|i| dist(i as f64 * h))
        .collect::<Result<Vec<_>>>()?;
    for i in 1..=NODES {
        let t = i as f64 * h;
        if vals[i] <= tol {
            return bisect_entry(&dist, t - h, t, tol);
        }
        let is_min = vals[i] <= vals[i - 1] && (i == NODES || vals[i] <= vals[i + 1]);
        if is_min {
            let hi = (t + h).min(t_max);
            let (tm, dm) = golden_min(&dist, t - h, hi)?;
            if dm <= tol {
                return bisect_entry(&dist, t - h, tm, tol);
            }
        }
    }
    Err(QslError::NotReached { t_max })
}

/// Bisection for the crossing of `tol`, given `f(lo) > tol >= f(hi)`.
fn bisect_entry(
    f: &impl Fn(f64) -> Result<f64>,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> Result<f64> {
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? <= tol {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

fn golden_min(f: &impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64) -> Result<(f64, f64)> {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > 1e-13 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    let t = 0.5 * (a + b);
    Ok((t, f(t)?))
}

/// Finite-difference `d√ρ_t/dt` against `𝓛√ρ_t` along a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SqrtEvolutionReport {
    /// `(t, ‖d√ρ_t/dt - 𝓛√ρ_t‖_F)` per grid node.
    pub deviations: Vec<(f64, f64)>,
    pub max_deviation: f64,
    pub at_time: f64,
}

pub fn sqrt_evolution_diagnostic(
    rho0: &QuantumState,
    model: &LindbladModel,
    grid: &[f64],
) -> Result<SqrtEvolutionReport> {
    const STEP: f64 = 1e-5;
    let root = |t: f64| -> Result<CMatrix> { Ok(evolve_lindblad(rho0, model, t)?.sqrt()) };
    let mut deviations = Vec::with_capacity(grid.len());
    for &t in grid {
        if t < 0.0 {
            return Err(QslError::BadGrid(format!("negative time {t}")));
        }
        let here = root(t)?;
        let derivative = if t >= STEP {
            (root(t + STEP)? - root(t - STEP)?) / C64::new(2.0 * STEP, 0.0)
        } else {
            (root(t + STEP)? * C64::new(4.0, 0.0)
                - &here * C64::new(3.0, 0.0)
                - root(t + 2.0 * STEP)?)
                / C64::new(2.0 * STEP, 0.0)
        };
        deviations.push((t, (derivative - model.apply(&here)).norm()));
    }
    let (at_time, max_deviation) = deviations.iter().copied().fold(
        (f64::NAN, 0.0),
        |acc, (t, d)| {
            if d >= acc.1 {
                (t, d)
            } else {
                acc
            }
        },
    );
    Ok(SqrtEvolutionReport {
        deviations,
        max_deviation,
        at_time,
    })
}

/// Qubit in a squeezed vacuum with optional drive.
///
/// Rates are `1/T₁`, `1/T₂`, `1/T₃`; jump operators are `σ`, `σ^H` and
/// `σ_z/√2` with `σ = |1><0|` and `|0>` the `σ_z = +1` level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezedVacuum {
    pub rate1: f64,
    pub rate2: f64,
    pub rate3: f64,
    pub w_eq: f64,
    pub rabi: f64,
    pub hbar: f64,
}

impl SqueezedVacuum {
    pub fn new(rate1: f64, rate2: f64, rate3: f64, w_eq: f64) -> Result<Self> {
        if [rate1, rate2, rate3]
            .iter()
            .any(|r| !r.is_finite() || *r < 0.0)
        {
            return Err(QslError::InvalidArgument(format!(
                "rates must be finite and >= 0 (got {rate1}, {rate2}, {rate3})"
            )));
        }
        if !(-1.0..=1.0).contains(&w_eq) {
            return Err(QslError::InvalidArgument(format!(
                "w_eq = {w_eq} outside [-1, 1]"
            )));
        }
        Ok(SqueezedVacuum {
            rate1,
            rate2,
            rate3,
            w_eq,
            rabi: 0.0,
            hbar: 1.0,
        })
    }

    /// Pure dephasing with `λ₁ = λ₂ = lambda1`, `λ₃ = 0`, `w_eq = 0`.
    pub fn simple_case(lambda1: f64) -> Result<Self> {
        Self::new(0.0, -lambda1, 0.0, 0.0)
    }

    pub fn with_rabi(mut self, rabi: f64) -> Self {
        self.rabi = rabi;
        self
    }

    pub fn coeffs(&self) -> CMatrix {
        let c = |x: f64| C64::new(x, 0.0);
        let (g1, w) = (self.rate1, self.w_eq);
        CMatrix::from_row_slice(
            3,
            3,
            &[
                c(0.5 * g1 * (1.0 - w)),
                c(-self.rate3),
                c(0.0),
                c(-self.rate3),
                c(0.5 * g1 * (1.0 + w)),
                c(0.0),
                c(0.0),
                c(0.0),
                c(self.rate2 - 0.5 * g1),
            ],
        )
    }

    pub fn model(&self) -> Result<LindbladModel> {
        let s = sigma_minus();
        let h = Observable::with_units(
            (&s + s.adjoint()).scale(0.5 * self.hbar * self.rabi),
            self.hbar,
            1.0,
        )?;
        let jumps = vec![s.clone(), s.adjoint(), sigma_z().unscale(2f64.sqrt())];
        LindbladModel::new(h, jumps, self.coeffs())
    }

    /// `(λ₀, λ₁, λ₂, λ₃) = (0, -(1/T₂ + 1/T₃), -(1/T₂ - 1/T₃), -1/T₁)`.
    pub fn eigenvalues(&self) -> [f64; 4] {
        [
            0.0,
            -(self.rate2 + self.rate3),
            -(self.rate2 - self.rate3),
            -self.rate1,
        ]
    }

    /// Left/right eigen-operators; exact only without drive.
    pub fn damping_basis(&self) -> DampingBasis {
        let r2 = 1.0 / 2f64.sqrt();
        let s = sigma_minus();
        let sd = s.adjoint();
        let id = identity(2);
        let z = sigma_z();
        let w = self.w_eq;
        let left = vec![
            id.scale(r2),
            (&sd + &s).scale(r2),
            (&sd - &s).scale(r2),
            (&z - id.scale(w)).scale(r2),
        ];
        let right = vec![
            (&id + z.scale(w)).scale(r2),
            (&sd + &s).scale(r2),
            (&s - &sd).scale(r2),
            z.scale(r2),
        ];
        DampingBasis {
            left,
            right,
            eigenvalues: self.eigenvalues().to_vec(),
        }
    }
}

/// Biorthogonal eigen-operators `{L_i, R_i}` of a Lindblad generator.
#[derive(Debug, Clone, PartialEq)]
pub struct DampingBasis {
    pub left: Vec<CMatrix>,
    pub right: Vec<CMatrix>,
    pub eigenvalues: Vec<f64>,
}

impl DampingBasis {
    /// Largest `|Tr(L_i R_j) - δ_ij|`.
    pub fn biorthogonality_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for (i, l) in self.left.iter().enumerate() {
            for (j, r) in self.right.iter().enumerate() {
                let delta = if i == j { 1.0 } else { 0.0 };
                dev = dev.max((trace_product(l, r) - C64::new(delta, 0.0)).norm());
            }
        }
        dev
    }

    /// Largest `‖𝓛R_i - λ_i R_i‖_F`.
    pub fn eigen_deviation(&self, model: &LindbladModel) -> f64 {
        self.right
            .iter()
            .zip(&self.eigenvalues)
            .map(|(r, &lam)| (model.apply(r) - r.scale(lam)).norm())
            .fold(0.0, f64::max)
    }
}

/// `ρ_t = Σ Tr(L_i ρ₀) e^{λ_i t} R_i`.
pub fn damping_basis_evolution(
    rho0: &QuantumState,
    basis: &DampingBasis,
    t: f64,
) -> Result<QuantumState> {
    let n = basis.left.len();
    if basis.right.len() != n || basis.eigenvalues.len() != n {
        return Err(QslError::DimMismatch(
            "damping basis lists differ in length".into(),
        ));
    }
    let dev = basis.biorthogonality_deviation();
    if dev > 1e-10 {
        return Err(QslError::BasisMismatch { deviation: dev });
    }
    let mut out = CMatrix::zeros(rho0.dim(), rho0.dim());
    for ((l, r), &lam) in basis.left.iter().zip(&basis.right).zip(&basis.eigenvalues) {
        check_same_dim(l.nrows(), rho0.dim(), "damping_basis_evolution")?;
        out += r * (trace_product(l, rho0.matrix()) * (lam * t).exp());
    }
    QuantumState::from_propagated(out)
}

/// `ℓ₋/|r|²`, written as `1/(1+√m)` so that `r = 0` is regular.
fn ell_minus_over_r2(m: f64) -> f64 {
    1.0 / (1.0 + m.max(0.0).sqrt())
}

/// Closed-form `A(ρ₀, ρ_t)` for the undriven squeezed-vacuum qubit:
/// `½[ℓ₊ - r₃w(Λ₃-1) + (ℓ₋/|r|²)(r₁²Λ₁ + r₂²Λ₂ + r₃²Λ₃)]`.
///
/// Equals `Tr(√ρ₀ e^{𝓛t}√ρ₀)`, which is the affinity only when the
/// square root commutes with the flow.
pub fn affinity_closed_form_markovian(r: &BlochVector, params: &SqueezedVacuum, t: f64) -> f64 {
    let m = r.mixedness();
    let lp = 1.0 + m.max(0.0).sqrt();
    let k = ell_minus_over_r2(m);
    let [_, l1, l2, l3] = params.eigenvalues().map(|l| (l * t).exp());
    let [r1, r2, r3] = r.0;
    0.5 * (lp - r3 * params.w_eq * (l3 - 1.0) + k * (r1 * r1 * l1 + r2 * r2 * l2 + l3 * r3 * r3))
}

/// The documented closed form of `2Q(ρ_t, 𝓛)` for the undriven model,
/// transcribed term by term. Kept for discrepancy reports only.
pub fn coherence_closed_form_markovian(r: &BlochVector, params: &SqueezedVacuum, t: f64) -> f64 {
    let m = r.mixedness();
    let sm = m.max(0.0).sqrt();
    let (lp, lm) = (1.0 + sm, 1.0 - sm);
    let k = ell_minus_over_r2(m);
    let rn = r.norm();
    let [_, g1, g2, g3] = params.eigenvalues();
    let [_, l1, l2, l3] = params.eigenvalues().map(|l| (l * t).exp());
    let [r1, r2, r3] = r.0;
    let w = params.w_eq;
    let first = 0.5
        * (k * (r1 * r1 * g1 * g1 * l1 * l1 + r2 * r2 * g2 * g2 * l2 * l2)
            + ((lm.sqrt() * r3 - w * rn * lp.sqrt()) / rn.max(f64::MIN_POSITIVE)).powi(2)
                * g3
                * g3
                * l3
                * l3);
    let inner_a = r3 * l3 * k.sqrt() + lp.sqrt() * w * (1.0 - l3);
    let inner = k * (g1 * r1 * r1 * l1 * l1 + g2 * r2 * r2 * l2 * l2)
        + g3 * (inner_a * inner_a - (r3 * l3 * w + lp * w * w * (1.0 - l3)));
    first - 0.25 * inner * inner
}

/// Time-averaged coherence as printed for the simple case
/// `|(1/2τ)[Λ√(1/4 - (Λ/2) sinh(λ₁τ)) + asin(Λ/√2) - (1/2 + 3π/4)]|`.
pub fn markovian_denominator_closed_form(lambda1: f64, tau: f64) -> f64 {
    let big = (lambda1 * tau).exp();
    let root = (0.25 - 0.5 * big * (lambda1 * tau).sinh()).max(0.0).sqrt();
    let bracket = big * root + (big / 2f64.sqrt()).clamp(-1.0, 1.0).asin()
        - (0.5 + 0.75 * std::f64::consts::PI);
    (bracket / (2.0 * tau)).abs()
}
