//! Numerical tolerances shared by the library checks and the test suites.

/// Absolute tolerance for unitarity and elementwise equality of amplitudes.
pub const UNITARY: f64 = 1e-12;

/// Hermiticity of Θ and related small matrices.
pub const HERMITIAN: f64 = 1e-12;

/// Eigenvalues of Θ in `[-PSD, 0)` are treated as numerical zeros.
pub const PSD: f64 = 1e-10;

/// Frobenius tolerance for `Θ = w·diag(γ)·w†`.
pub const RECONSTRUCTION: f64 = 1e-10;

/// Vectors entries below this modulus are ignored when fixing eigenvector phases.
pub const PHASE_PIVOT: f64 = 1e-12;

/// Residual `|ξ_k|` accepted for a pruned order.
pub const PRUNED: f64 = 1e-10;

/// Density matrix trace deviation.
pub const TRACE: f64 = 1e-9;

/// Density matrix Hermiticity deviation.
pub const STATE_HERMITIAN: f64 = 1e-10;

/// Most negative eigenvalue a propagated density matrix may have.
pub const POSITIVITY: f64 = 1e-8;

/// Trace preservation of a superoperator (column sums against vec(I)).
pub const TRACE_PRESERVATION: f64 = 1e-10;
