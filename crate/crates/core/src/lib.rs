//! Cascade-network open-system toolkit.
//!
//! A set of `M` quantum sites `S_1..S_M` is coupled through chiral bosonic
//! channels that interfere on a triangular lattice of beam splitters. This
//! crate computes:
//!
//! * the propagation amplitudes of the network and the coupling constants
//!   `ζ_{m,m'}` they induce ([`amplitudes`]),
//! * the cascade master-equation generator and its GKSL form: rates,
//!   collective jump operators and the chiral effective Hamiltonian ([`gksl`]),
//! * closed forms for translation-invariant ("regular") networks: transfer
//!   matrices, the `ξ_k` coupling profile and the interaction-pruning designer
//!   ([`regular`]),
//! * truncated-Fock-space dynamics used to cross-validate the two generator
//!   forms ([`dynamics`]).
//!
//! Channel and site indices are 1-based in every public signature.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod amplitudes;
pub mod dynamics;
mod error;
pub mod gksl;
pub(crate) mod linalg;
pub mod network;
pub mod regular;
pub mod tol;

pub use error::{Error, ErrorKind, Result, SplitterError};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;

/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;

pub use amplitudes::{
    coupling_matrix, coupling_matrix_oracle, level_unitary, propagate, AmplitudeVector,
    CouplingMatrix,
};
pub use dynamics::{
    cascade_generator, evolve, first_moment_drift, gksl_generator, lowering_operator,
    DimensionCap, Superoperator, Trajectory, TruncatedState,
};
pub use gksl::{build_theta, gksl_decompose, lindblad_closed_form_evenodd, GkslForm, ThetaMatrix};
pub use network::{bs_unitary, expand_regular, BeamSplitter, NetworkSpec, RegularSpec};
pub use regular::{
    design_pruned, threshold_scan, transfer_matrix, xi_k2_analytic, xi_profile,
    xi_profile_closed, DesignSchedule, TransferMatrix, XiProfile,
};
