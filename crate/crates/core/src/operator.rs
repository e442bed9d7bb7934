//! Dense complex-matrix substrate: states, observables, spectral calculus.
//!
//! Everything here works on `DMatrix<Complex64>`; the dimensions we care
//! about are small (d <= 16 for states, d^2 <= 64 for superoperators), so
//! no sparse path exists.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{QslError, Result};
use crate::tol;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Eigen-decomposition of a Hermitian matrix, eigenvalues sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub values: Vec<f64>,
    /// Columns are the eigenvectors, in the same order as `values`.
    pub vectors: CMatrix,
}

impl Spectrum {
    /// Rebuilds `V f(diag) V^H` for a scalar function of the eigenvalues.
    pub fn map(&self, f: impl Fn(f64) -> C64) -> CMatrix {
        let v = &self.vectors;
        let n = v.nrows();
        let mut scaled = v.clone();
        for (j, &lam) in self.values.iter().enumerate() {
            let fl = f(lam);
            for i in 0..n {
                scaled[(i, j)] *= fl;
            }
        }
        scaled * v.adjoint()
    }
}

/// Largest elementwise `|M - M^H|`.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

pub(crate) fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

fn check_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(QslError::DimMismatch(format!(
            "expected a non-empty square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m.nrows())
}

pub(crate) fn check_same_dim(a: usize, b: usize, what: &str) -> Result<()> {
    if a != b {
        return Err(QslError::DimMismatch(format!("{what}: {a} vs {b}")));
    }
    Ok(())
}

/// Hermitian eigen-decomposition with eigenvalues in descending order.
pub fn hermitian_eig(m: &CMatrix) -> Result<Spectrum> {
    check_square(m)?;
    let dev = hermitian_deviation(m);
    if dev > tol::HERMITIAN {
        return Err(QslError::NonHermitian { deviation: dev });
    }
    let eig = hermitize(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), m.nrows(), |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(Spectrum { values, vectors })
}

/// `AB - BA`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if a.shape() != b.shape() || a.nrows() != a.ncols() {
        return Err(QslError::DimMismatch(format!(
            "commutator of {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    Ok(a * b - b * a)
}

/// Tensor product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Trace that must be real; returns the real part.
pub(crate) fn real_trace(m: &CMatrix) -> Result<f64> {
    let t = m.trace();
    if t.im.abs() > tol::IMAG_RESIDUE * (1.0 + t.re.abs()) {
        return Err(QslError::ImaginaryResidue { value: t.im });
    }
    Ok(t.re)
}

/// `Tr(AB)` without forming the product.
pub(crate) fn trace_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub fn frobenius_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).norm()
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn sigma_x() -> CMatrix {
    CMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
        ],
    )
}

pub fn sigma_y() -> CMatrix {
    CMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(0.0, 0.0),
            C64::new(0.0, -1.0),
            C64::new(0.0, 1.0),
            C64::new(0.0, 0.0),
        ],
    )
}

pub fn sigma_z() -> CMatrix {
    CMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(-1.0, 0.0),
        ],
    )
}

/// Qubit lowering operator `|1><0|`, where `|0>` is the `sigma_z = +1` state.
pub fn sigma_minus() -> CMatrix {
    CMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
        ],
    )
}

pub fn paulis() -> [CMatrix; 3] {
    [sigma_x(), sigma_y(), sigma_z()]
}

/// Density matrix: Hermitian, positive semidefinite, unit trace.
///
/// The spectral decomposition is computed once at construction and every
/// spectral function (square root, powers) reads from it.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    matrix: CMatrix,
    spectrum: Spectrum,
}

impl QuantumState {
    /// Validates and normalizes a candidate density matrix.
    ///
    /// Eigenvalues in `[-1e-10, 0)` are clipped to zero and the spectrum is
    /// renormalized; anything more negative is rejected.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let dim = check_square(&matrix)?;
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > tol::TRACE || trace.im.abs() > tol::TRACE {
            return Err(QslError::NotUnitTrace { trace: trace.re });
        }
        let spectrum = hermitian_eig(&matrix)?;
        let min = spectrum.values[dim - 1];
        if min < -tol::NEG_EIGENVALUE {
            return Err(QslError::NegativeEigenvalue { value: min });
        }
        Ok(Self::from_spectrum_unchecked(spectrum))
    }

    /// Accepts the output of a propagator. Anti-Hermitian parts up to
    /// `tol::PROPAGATION` are dropped and eigenvalues down to
    /// `-tol::PROPAGATION` are clipped; anything worse is reported.
    pub(crate) fn from_propagated(matrix: CMatrix) -> Result<Self> {
        let dim = check_square(&matrix)?;
        let dev = hermitian_deviation(&matrix);
        if dev > tol::PROPAGATION {
            return Err(QslError::NonHermitian { deviation: dev });
        }
        let spectrum = hermitian_eig(&hermitize(&matrix))?;
        let min = spectrum.values[dim - 1];
        if min < -tol::PROPAGATION {
            return Err(QslError::InvalidStateProduced {
                min_eigenvalue: min,
            });
        }
        Ok(Self::from_spectrum_unchecked(spectrum))
    }

    fn from_spectrum_unchecked(mut spectrum: Spectrum) -> Self {
        for v in spectrum.values.iter_mut() {
            if *v <= tol::SPECTRAL_FLOOR {
                *v = 0.0;
            }
        }
        let total: f64 = spectrum.values.iter().sum();
        for v in spectrum.values.iter_mut() {
            *v /= total;
        }
        let matrix = hermitize(&spectrum.map(|l| C64::new(l, 0.0)));
        QuantumState { matrix, spectrum }
    }

    /// `V diag(p) V^H` for a probability vector `p` and unitary `V`.
    pub fn from_eigen(values: &[f64], vectors: &CMatrix) -> Result<Self> {
        if values.len() != vectors.nrows() || !vectors.is_square() {
            return Err(QslError::DimMismatch(format!(
                "{} eigenvalues for a {}x{} basis",
                values.len(),
                vectors.nrows(),
                vectors.ncols()
            )));
        }
        let spec = Spectrum {
            values: values.to_vec(),
            vectors: vectors.clone(),
        };
        Self::new(spec.map(|l| C64::new(l, 0.0)))
    }

    pub fn pure(psi: &[C64]) -> Result<Self> {
        let v = nalgebra::DVector::from_column_slice(psi);
        let n = v.norm();
        if n == 0.0 {
            return Err(QslError::InvalidArgument("zero state vector".into()));
        }
        let v = v.unscale(n);
        Self::new(&v * v.adjoint())
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_spectrum_unchecked(Spectrum {
            values: vec![1.0 / dim as f64; dim],
            vectors: identity(dim),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    /// Eigenvalues, descending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.spectrum.values
    }

    /// `Tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        self.spectrum.values.iter().map(|l| l * l).sum()
    }

    pub fn rank(&self, cutoff: f64) -> usize {
        self.spectrum.values.iter().filter(|&&l| l > cutoff).count()
    }

    /// Unique positive semidefinite square root.
    pub fn sqrt(&self) -> CMatrix {
        self.power(0.5)
    }

    /// `ρ^p` by spectral calculus; zero eigenvalues stay zero for `p > 0`.
    pub fn power(&self, p: f64) -> CMatrix {
        hermitize(
            &self
                .spectrum
                .map(|l| C64::new(if l > 0.0 { l.powf(p) } else { 0.0 }, 0.0)),
        )
    }

    /// `Tr(ρ^p)`.
    pub fn trace_power(&self, p: f64) -> f64 {
        self.spectrum
            .values
            .iter()
            .filter(|&&l| l > 0.0)
            .map(|l| l.powf(p))
            .sum()
    }

    /// `U ρ U^H`.
    pub fn conjugate(&self, u: &CMatrix) -> Result<Self> {
        check_same_dim(self.dim(), u.nrows(), "conjugation")?;
        let vectors = u * &self.spectrum.vectors;
        let spectrum = Spectrum {
            values: self.spectrum.values.clone(),
            vectors,
        };
        let matrix = hermitize(&spectrum.map(|l| C64::new(l, 0.0)));
        Ok(QuantumState { matrix, spectrum })
    }

    /// Convex combination `p·self + (1-p)·other`.
    pub fn mix(&self, other: &Self, p: f64) -> Result<Self> {
        check_same_dim(self.dim(), other.dim(), "mixture")?;
        if !(0.0..=1.0).contains(&p) {
            return Err(QslError::InvalidArgument(format!(
                "mixing weight {p} outside [0,1]"
            )));
        }
        Self::new(self.matrix.scale(p) + other.matrix.scale(1.0 - p))
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        Self::new(kron(&self.matrix, &other.matrix))
    }
}

/// Hermitian generator with its unit conventions.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    matrix: CMatrix,
    hbar: f64,
    omega: f64,
    spectrum: Spectrum,
}

impl Observable {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        Self::with_units(matrix, 1.0, 1.0)
    }

    pub fn with_units(matrix: CMatrix, hbar: f64, omega: f64) -> Result<Self> {
        if !(hbar > 0.0) || !(omega > 0.0) {
            return Err(QslError::InvalidArgument(format!(
                "hbar and omega must be positive (got {hbar}, {omega})"
            )));
        }
        let spectrum = hermitian_eig(&matrix)?;
        Ok(Observable {
            matrix: hermitize(&matrix),
            hbar,
            omega,
            spectrum,
        })
    }

    /// `ω (n̂·σ + α I)` on a qubit.
    pub fn bloch(axis: [f64; 3], omega: f64, alpha_phase: f64, hbar: f64) -> Result<Self> {
        let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(QslError::BadUnitVector { norm });
        }
        let [sx, sy, sz] = paulis();
        let m = (sx.scale(axis[0])
            + sy.scale(axis[1])
            + sz.scale(axis[2])
            + identity(2).scale(alpha_phase))
        .scale(omega);
        Self::with_units(m, hbar, omega)
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(CMatrix::zeros(dim, dim)).expect("zero matrix is Hermitian")
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut spectrum = self.spectrum.clone();
        for v in spectrum.values.iter_mut() {
            *v *= factor;
        }
        if factor < 0.0 {
            spectrum.values.reverse();
            let n = spectrum.vectors.ncols();
            spectrum.vectors = CMatrix::from_fn(n, n, |i, j| self.spectrum.vectors[(i, n - 1 - j)]);
        }
        Observable {
            matrix: self.matrix.scale(factor),
            hbar: self.hbar,
            omega: self.omega,
            spectrum,
        }
    }
}

/// `U(t) = exp(+i H t / ħ)`.
pub fn unitary_of(h: &Observable, t: f64) -> CMatrix {
    let hbar = h.hbar();
    h.spectrum().map(|l| (I * (l * t / hbar)).exp())
}

/// Which factor of a bipartite system to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Partial trace over the complementary factor of a `d_a ⊗ d_b` operator.
pub fn partial_trace_matrix(m: &CMatrix, dims: (usize, usize), keep: Subsystem) -> Result<CMatrix> {
    let (da, db) = dims;
    if da * db != m.nrows() || !m.is_square() {
        return Err(QslError::DimMismatch(format!(
            "{}x{} is not {da}⊗{db}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(match keep {
        Subsystem::A => CMatrix::from_fn(da, da, |i, j| {
            (0..db).map(|k| m[(i * db + k, j * db + k)]).sum()
        }),
        Subsystem::B => CMatrix::from_fn(db, db, |i, j| {
            (0..da).map(|k| m[(k * db + i, k * db + j)]).sum()
        }),
    })
}

pub fn partial_trace(
    rho: &QuantumState,
    dims: (usize, usize),
    keep: Subsystem,
) -> Result<QuantumState> {
    QuantumState::new(partial_trace_matrix(rho.matrix(), dims, keep)?)
}

fn complex_normal<R: rand::Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

/// Ginibre state `G G^H / Tr(G G^H)` with `G` of shape `dim × rank`.
pub fn random_state_with<R: rand::Rng + ?Sized>(
    dim: usize,
    rank: usize,
    rng: &mut R,
) -> Result<QuantumState> {
    if rank == 0 || rank > dim {
        return Err(QslError::BadRank { rank, dim });
    }
    let g = CMatrix::from_fn(dim, rank, |_, _| complex_normal(rng));
    let gg = &g * g.adjoint();
    let tr = gg.trace().re;
    QuantumState::new(gg.unscale(tr))
}

/// Deterministic Ginibre state for a seed.
pub fn random_state(dim: usize, rank: usize, seed: u64) -> Result<QuantumState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_state_with(dim, rank, &mut rng)
}

/// GUE-distributed Hamiltonian `(G + G^H)/2`.
pub fn random_hamiltonian_with<R: rand::Rng + ?Sized>(dim: usize, rng: &mut R) -> Observable {
    let g = CMatrix::from_fn(dim, dim, |_, _| complex_normal(rng));
    Observable::new(hermitize(&g)).expect("hermitized matrix")
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix.
pub fn random_unitary_with<R: rand::Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| complex_normal(rng));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = CMatrix::from_diagonal(&nalgebra::DVector::from_fn(dim, |i, _| {
        let d = r[(i, i)];
        if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        }
    }));
    q * phases
}

/// Qubit Bloch vector, `|r| <= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector(pub [f64; 3]);

impl BlochVector {
    pub fn new(r: [f64; 3]) -> Result<Self> {
        let b = BlochVector(r);
        if b.norm() > 1.0 + tol::BLOCH_NORM {
            return Err(QslError::BlochNormExceeded { norm: b.norm() });
        }
        Ok(b)
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    /// Mixedness `1 - |r|²`.
    pub fn mixedness(&self) -> f64 {
        1.0 - self.dot(self)
    }
}

pub fn bloch_to_state(r: &BlochVector) -> Result<QuantumState> {
    let r = BlochVector::new(r.0)?;
    let [sx, sy, sz] = paulis();
    let m = (identity(2) + sx.scale(r.0[0]) + sy.scale(r.0[1]) + sz.scale(r.0[2])).scale(0.5);
    QuantumState::new(m)
}

pub fn state_to_bloch(rho: &QuantumState) -> Result<BlochVector> {
    if rho.dim() != 2 {
        return Err(QslError::DimMismatch(format!(
            "Bloch vector needs a qubit, got dimension {}",
            rho.dim()
        )));
    }
    let comps = paulis().map(|p| trace_product(rho.matrix(), &p).re);
    Ok(BlochVector(comps))
}
