//! Simulated SWAP-test protocol for measuring affinity and coherence.
//!
//! Outcome probabilities are exact; only the detector counts are sampled
//! (binomially, from seeded ChaCha streams).

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{QslError, Result};
use crate::operator::{
    check_same_dim, hermitian_eig, identity, trace_product, unitary_of, CMatrix, Observable,
    QuantumState, C64, I,
};
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::tol;

/// Estimate of an overlap from `shots` SWAP-test runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShotEstimate {
    pub value: f64,
    pub shots: u64,
    pub std_error: f64,
}

/// How expectation values are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasurementMode {
    Exact,
    Shots(u64),
}

impl MeasurementMode {
    fn validate(self) -> Result<Self> {
        match self {
            MeasurementMode::Shots(0) => Err(QslError::ZeroShots),
            m => Ok(m),
        }
    }
}

/// Acceptance probability `(1 + Tr σ₁σ₂)/2`.
pub fn swap_test_probability(sigma1: &QuantumState, sigma2: &QuantumState) -> Result<f64> {
    check_same_dim(sigma1.dim(), sigma2.dim(), "swap_test_probability")?;
    let overlap = trace_product(sigma1.matrix(), sigma2.matrix()).re;
    Ok((0.5 * (1.0 + overlap)).clamp(0.0, 1.0))
}

fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Samples a detector with acceptance probability `(1 + overlap)/2`.
fn sample_overlap(overlap: f64, shots: u64, rng: &mut ChaCha8Rng) -> Result<ShotEstimate> {
    if shots == 0 {
        return Err(QslError::ZeroShots);
    }
    let p = (0.5 * (1.0 + overlap)).clamp(0.0, 1.0);
    let hits = Binomial::new(shots, p)
        .map_err(|e| QslError::InvalidArgument(e.to_string()))?
        .sample(rng);
    let p_hat = hits as f64 / shots as f64;
    Ok(ShotEstimate {
        value: 2.0 * p_hat - 1.0,
        shots,
        std_error: 2.0 * (p_hat * (1.0 - p_hat) / shots as f64).sqrt(),
    })
}

/// `Tr σ₁σ₂` from `shots` simulated SWAP tests.
pub fn sample_swap_test(
    sigma1: &QuantumState,
    sigma2: &QuantumState,
    shots: u64,
    seed: u64,
) -> Result<ShotEstimate> {
    check_same_dim(sigma1.dim(), sigma2.dim(), "sample_swap_test")?;
    let overlap = trace_product(sigma1.matrix(), sigma2.matrix()).re;
    sample_overlap(overlap, shots, &mut stream(seed, 0))
}

/// `Tr ρⁿ` for `n = 1..=max_n`, the expectation of the cyclic shift on `ρ^⊗n`.
pub fn power_sums(rho: &QuantumState, max_n: usize) -> Result<Vec<f64>> {
    if max_n == 0 || max_n > rho.dim() {
        return Err(QslError::BadN {
            n: max_n,
            dim: rho.dim(),
        });
    }
    let mut out = vec![1.0];
    let mut power = rho.matrix().clone();
    for _ in 1..max_n {
        out.push(trace_product(&power, rho.matrix()).re);
        power = &power * rho.matrix();
    }
    Ok(out)
}

/// Spectrum from power sums via Newton's identities and the companion matrix.
pub fn eigs_from_power_sums(moments: &[f64]) -> Result<Vec<f64>> {
    let d = moments.len();
    if d == 0 {
        return Err(QslError::BadN { n: 0, dim: 0 });
    }
    if (moments[0] - 1.0).abs() > 1e-9 {
        return Err(QslError::NotUnitTrace { trace: moments[0] });
    }
    // k e_k = Σ_{i=1..k} (-1)^{i-1} e_{k-i} p_i
    let mut e = vec![1.0; d + 1];
    for k in 1..=d {
        let mut acc = 0.0;
        for i in 1..=k {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            acc += sign * e[k - i] * moments[i - 1];
        }
        e[k] = acc / k as f64;
    }
    // x^d - e₁x^{d-1} + e₂x^{d-2} - …; companion matrix with a_k the coefficient of x^{d-k}
    let mut companion = DMatrix::<f64>::zeros(d, d);
    for k in 1..=d {
        let a_k = if k % 2 == 1 { -e[k] } else { e[k] };
        companion[(0, k - 1)] = -a_k;
    }
    for i in 1..d {
        companion[(i, i - 1)] = 1.0;
    }
    let roots = companion.complex_eigenvalues();
    let mut values = Vec::with_capacity(d);
    for z in roots.iter() {
        if z.im.abs() > 1e-8 {
            return Err(QslError::IllConditioned(format!("complex root {z}")));
        }
        if z.re < -1e-8 {
            return Err(QslError::IllConditioned(format!("negative root {}", z.re)));
        }
        values.push(z.re.max(0.0));
    }
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// Weights `√λ_i / Σ√λ_j`.
fn root_weights(eigenvalues: &[f64]) -> Vec<f64> {
    let roots: Vec<f64> = eigenvalues.iter().map(|l| l.max(0.0).sqrt()).collect();
    let total: f64 = roots.iter().sum();
    roots.iter().map(|r| r / total).collect()
}

/// `Ũ diag(√λ_i / Σ√λ_j) Ũ^H`.
pub fn prepare_sigma(eigenvalues: &[f64], u_tilde: &CMatrix) -> Result<QuantumState> {
    QuantumState::from_eigen(&root_weights(eigenvalues), u_tilde)
}

/// Outcome of the basis-alignment search.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedState {
    pub sigma1: QuantumState,
    pub unitary: CMatrix,
    /// Eigenvalues recovered from the power sums, descending.
    pub eigenvalues: Vec<f64>,
    /// `Σ_k |target_k - measured_k|` at the returned state.
    pub alignment_residual: f64,
    /// Standard error of the residual in shot mode, zero when exact.
    pub residual_std_error: f64,
    pub iterations: u64,
}

/// Hermitian generator from `d²` real parameters: the diagonal, then
/// `(re, im)` pairs of the strict upper triangle.
fn hermitian_from_params(theta: &[f64], d: usize) -> CMatrix {
    let mut k = CMatrix::zeros(d, d);
    let mut idx = d;
    for i in 0..d {
        k[(i, i)] = C64::new(theta[i], 0.0);
        for j in i + 1..d {
            let z = C64::new(theta[idx], theta[idx + 1]);
            k[(i, j)] = z;
            k[(j, i)] = z.conj();
            idx += 2;
        }
    }
    k
}

fn unitary_from_params(theta: &[f64], d: usize) -> CMatrix {
    let spec = hermitian_eig(&hermitian_from_params(theta, d))
        .expect("generator is Hermitian by construction");
    spec.map(|l| (I * l).exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignmentOptions {
    pub max_iters: u64,
    /// Residual at which the search stops early.
    pub target: f64,
    /// Residual above which exact mode reports non-convergence.
    pub accept: f64,
}

impl Default for AlignmentOptions {
    fn default() -> Self {
        AlignmentOptions {
            max_iters: 2000,
            target: 1e-14,
            accept: 1e-6,
        }
    }
}

/// Rotates `σ₁` until the overlaps `Tr(ρ₁ᵏσ₁)`, `k = 1..max(1, d-1)`, match
/// the values implied by the recovered spectrum.
pub fn basis_alignment_search(
    rho1: &QuantumState,
    mode: MeasurementMode,
    seed: u64,
    opts: AlignmentOptions,
) -> Result<PreparedState> {
    let mode = mode.validate()?;
    let d = rho1.dim();
    let eigenvalues = eigs_from_power_sums(&power_sums(rho1, d)?)?;
    let weights = root_weights(&eigenvalues);
    let degenerate = eigenvalues[0] - eigenvalues[d - 1] < tol::DEGENERATE_GAP;
    if degenerate {
        return Ok(PreparedState {
            sigma1: QuantumState::maximally_mixed(d),
            unitary: identity(d),
            eigenvalues,
            alignment_residual: 0.0,
            residual_std_error: 0.0,
            iterations: 0,
        });
    }
    let orders: Vec<i32> = (1..=(d.saturating_sub(1)).max(1) as i32).collect();
    let targets: Vec<f64> = orders
        .iter()
        .map(|&k| {
            eigenvalues
                .iter()
                .zip(&weights)
                .map(|(l, w)| l.powi(k) * w)
                .sum()
        })
        .collect();
    let rho_powers: Vec<CMatrix> = orders
        .iter()
        .map(|&k| rho1.matrix().pow(k as u32))
        .collect();
    let diag = CMatrix::from_diagonal(&DVector::from_iterator(
        d,
        weights.iter().map(|&w| C64::new(w, 0.0)),
    ));

    let exact_overlaps = |theta: &[f64]| -> Vec<f64> {
        let u = unitary_from_params(theta, d);
        let sigma = &u * &diag * u.adjoint();
        rho_powers
            .iter()
            .map(|p| trace_product(p, &sigma).re)
            .collect()
    };
    let mut evaluations = 0u64;
    let mut measure = |theta: &[f64]| -> (f64, f64) {
        let exact = exact_overlaps(theta);
        match mode {
            MeasurementMode::Exact => (
                exact.iter().zip(&targets).map(|(m, t)| (t - m).abs()).sum(),
                0.0,
            ),
            MeasurementMode::Shots(n) => {
                evaluations += 1;
                let mut rng = stream(seed, evaluations);
                let mut residual = 0.0;
                let mut var = 0.0;
                for (m, t) in exact.iter().zip(&targets) {
                    let est = sample_overlap(*m, n, &mut rng).expect("shots checked");
                    residual += (t - est.value).abs();
                    var += est.std_error * est.std_error;
                }
                (residual, var.sqrt())
            }
        }
    };

    let x0 = vec![0.0; d * d];
    let start = measure(&x0);
    let (theta, iterations) = if start.0 <= opts.target {
        (x0, 0)
    } else {
        let nm = NelderMeadOptions {
            max_iters: opts.max_iters,
            target: opts.target,
            ..Default::default()
        };
        let found = nelder_mead(|x| measure(x).0, &x0, nm);
        (found.x, found.iterations)
    };
    let (alignment_residual, residual_std_error) = match mode {
        MeasurementMode::Exact => (
            exact_overlaps(&theta)
                .iter()
                .zip(&targets)
                .map(|(m, t)| (t - m).abs())
                .sum(),
            0.0,
        ),
        MeasurementMode::Shots(_) => measure(&theta),
    };
    if mode == MeasurementMode::Exact && alignment_residual > opts.accept {
        return Err(QslError::NoConvergence {
            iterations,
            residual: alignment_residual,
        });
    }
    let unitary = unitary_from_params(&theta, d);
    Ok(PreparedState {
        sigma1: prepare_sigma(&eigenvalues, &unitary)?,
        unitary,
        eigenvalues,
        alignment_residual,
        residual_std_error,
        iterations,
    })
}

/// End-to-end estimate of the coherence time bound.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolEstimate {
    pub tl: f64,
    pub error_bar: f64,
    /// `Q(ρ₁, H)`.
    pub q: f64,
    pub q_std_error: f64,
    /// `A(ρ₁, ρ₂)`.
    pub affinity: f64,
    pub affinity_std_error: f64,
    pub overlap: ShotEstimate,
    /// `-Tr[σ₁, H]²` from the probe measurements.
    pub commutator: f64,
    pub commutator_std_error: f64,
    pub prepared: PreparedState,
}

/// Distinct positive Bohr gaps of `H`, ascending.
fn bohr_gaps(h: &Observable) -> Vec<f64> {
    let e = &h.spectrum().values;
    let scale = e.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
    let mut gaps: Vec<f64> = Vec::new();
    for i in 0..e.len() {
        for j in i + 1..e.len() {
            let g = e[i] - e[j];
            if g > 1e-9 * scale {
                gaps.push(g);
            }
        }
    }
    gaps.sort_by(f64::total_cmp);
    gaps.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * scale);
    gaps
}

/// Runs the protocol for `ρ₂ = U(t)ρ₁U(t)^H`:
/// power sums, spectrum, basis alignment (exact), then SWAP tests for
/// `Tr σ₁σ₂` and for `Tr σ₁σ₁(ε)` at one probe time per Bohr gap of `H`.
/// The probes give `-Tr[σ₁, H]²` exactly in the noiseless limit, and
/// `(Tr√ρ₁)²` rescales both to `2Q(ρ₁, H)` and `A(ρ₁, ρ₂)`.
pub fn estimate_tl_from_protocol(
    rho1: &QuantumState,
    h: &Observable,
    t: f64,
    mode: MeasurementMode,
    seed: u64,
) -> Result<ProtocolEstimate> {
    let mode = mode.validate()?;
    check_same_dim(rho1.dim(), h.dim(), "estimate_tl_from_protocol")?;
    let hbar = h.hbar();
    let align = AlignmentOptions {
        max_iters: 20_000,
        ..Default::default()
    };
    let prepared = basis_alignment_search(rho1, MeasurementMode::Exact, seed, align)?;
    let sigma1 = &prepared.sigma1;
    let s: f64 = prepared.eigenvalues.iter().map(|l| l.max(0.0).sqrt()).sum();
    let purity_sigma: f64 = root_weights(&prepared.eigenvalues)
        .iter()
        .map(|w| w * w)
        .sum();

    let measure = |other: &QuantumState, index: u64| -> Result<ShotEstimate> {
        let exact = trace_product(sigma1.matrix(), other.matrix()).re;
        match mode {
            MeasurementMode::Exact => Ok(ShotEstimate {
                value: exact,
                shots: 0,
                std_error: 0.0,
            }),
            MeasurementMode::Shots(n) => sample_overlap(exact, n, &mut stream(seed, index)),
        }
    };

    let sigma2 = sigma1.conjugate(&unitary_of(h, t))?;
    let overlap = measure(&sigma2, 1)?;

    // f(ε) = Tr σ² - Σ_g W_g (1 - cos(gε/ħ)),  -Tr[σ, H]² = Σ_g W_g g²
    let gaps = bohr_gaps(h);
    let (commutator, commutator_var) = if gaps.is_empty() {
        (0.0, 0.0)
    } else {
        let probes: Vec<f64> = gaps
            .iter()
            .map(|g| std::f64::consts::PI * hbar / g)
            .collect();
        let m = DMatrix::from_fn(gaps.len(), gaps.len(), |r, c| {
            1.0 - (gaps[c] * probes[r] / hbar).cos()
        });
        let lu = m.clone().lu();
        let g2 = DVector::from_iterator(gaps.len(), gaps.iter().map(|g| g * g));
        // c = g²ᵀ M⁻¹ (Tr σ² - f) = wᵀ (Tr σ² - f) with Mᵀ w = g²
        let w =
            m.transpose().lu().solve(&g2).ok_or_else(|| {
                QslError::IllConditioned("Bohr-gap probe matrix is singular".into())
            })?;
        if lu.determinant().abs() < 1e-12 {
            return Err(QslError::IllConditioned(
                "Bohr-gap probe matrix is singular".into(),
            ));
        }
        let mut c = 0.0;
        let mut var = 0.0;
        for (k, &eps) in probes.iter().enumerate() {
            let probe_state = sigma1.conjugate(&unitary_of(h, eps))?;
            let f = measure(&probe_state, 2 + k as u64)?;
            c += w[k] * (purity_sigma - f.value);
            var += (w[k] * f.std_error).powi(2);
        }
        (c, var)
    };

    let s2 = s * s;
    let affinity = (overlap.value * s2).clamp(0.0, 1.0);
    let affinity_std_error = overlap.std_error * s2;
    let two_q = commutator * s2;
    let q = 0.5 * two_q;
    let q_std_error = 0.5 * commutator_var.sqrt() * s2;
    let angle = if affinity >= 1.0 - tol::OVERLAP_ONE {
        0.0
    } else {
        affinity.acos()
    };
    if angle > tol::ANGLE_ZERO && two_q <= tol::COHERENCE_ZERO {
        return Err(QslError::FrozenState { angle });
    }
    let tl = if angle <= tol::ANGLE_ZERO {
        0.0
    } else {
        hbar * angle / two_q.sqrt()
    };
    let error_bar = if affinity_std_error == 0.0 && q_std_error == 0.0 {
        0.0
    } else if two_q <= tol::COHERENCE_ZERO {
        f64::INFINITY
    } else if 1.0 - affinity <= affinity_std_error {
        // acos is not differentiable at 1: use the width of the reachable interval
        hbar * (1.0 - affinity_std_error).max(-1.0).acos() / two_q.sqrt()
    } else {
        // first-order propagation through ħ acos(A)/√(2Q)
        let d_a = hbar / ((1.0 - affinity * affinity).sqrt() * two_q.sqrt());
        let d_two_q = tl / (2.0 * two_q);
        ((d_a * affinity_std_error).powi(2) + (d_two_q * 2.0 * q_std_error).powi(2)).sqrt()
    };
    Ok(ProtocolEstimate {
        tl,
        error_bar,
        q,
        q_std_error,
        affinity,
        affinity_std_error,
        overlap,
        commutator,
        commutator_std_error: commutator_var.sqrt(),
        prepared,
    })
}
