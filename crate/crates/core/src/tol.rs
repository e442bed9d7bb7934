//! Numerical thresholds shared across the crate.
//!
//! Every cutoff that decides between "roundoff" and "invalid input" lives
//! here so tests and library code agree on the same numbers.

/// Largest elementwise anti-Hermitian part tolerated before rejecting a matrix.
pub const HERMITIAN: f64 = 1e-9;

/// Eigenvalues in `[-NEG_EIGENVALUE, 0)` are roundoff and clipped to zero.
pub const NEG_EIGENVALUE: f64 = 1e-10;

/// Accepted deviation of a state's trace from one before renormalization.
pub const TRACE: f64 = 1e-9;

/// Imaginary residue allowed on quantities that are real by construction.
pub const IMAG_RESIDUE: f64 = 1e-9;

/// Below this a Bargmann angle counts as zero.
pub const ANGLE_ZERO: f64 = 1e-12;

/// Below this a coherence (or bound denominator) counts as zero.
pub const COHERENCE_ZERO: f64 = 1e-14;

/// Pair-skip threshold in the SLD Fisher information sum.
pub const QFI_SUPPORT: f64 = 1e-12;

/// Slack used when checking inequalities derived from the bounds.
pub const INEQUALITY: f64 = 1e-9;

/// Bloch vectors may exceed unit length by this much.
pub const BLOCH_NORM: f64 = 1e-12;

/// Re-Hermitization threshold after Lindblad propagation.
pub const PROPAGATION: f64 = 1e-8;

/// Eigenvalue gap below which a spectrum is treated as degenerate.
pub const DEGENERATE_GAP: f64 = 1e-8;

/// Eigenvalues of a state at or below this are exact zeros; keeps square
/// roots from amplifying eigensolver noise on rank-deficient states.
pub const SPECTRAL_FLOOR: f64 = 1e-14;

/// Overlaps within this of one give a zero angle (`acos` near 1 would turn
/// 1e-16 roundoff into 1e-8 angles).
pub const OVERLAP_ONE: f64 = 1e-14;
