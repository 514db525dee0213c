//! Dense complex linear algebra shared by the measurement and information layers.

mod eigen;
mod matrix;
mod state;

pub use eigen::{herm_eig, inv_sqrt_psd, matrix_sqrt_psd, numerical_rank, unitary_exp, Spectrum};
pub use matrix::{ComplexMatrix, ONE, ZERO};
pub use state::{
    binary_entropy, entropy_of_spectrum, partial_trace, partial_trace_matrix, von_neumann_entropy,
    DensityMatrix,
};

/// Hermiticity tolerance (max entry of `|H − H†|`).
pub const TAU_HERM: f64 = 1e-10;
/// Most negative eigenvalue accepted as PSD.
pub const TAU_PSD: f64 = 1e-10;
/// Trace tolerance for density matrices.
pub const TAU_TRACE: f64 = 1e-9;
/// Reconstruction tolerance for spectral identities.
pub const TAU_RECON: f64 = 1e-9;
/// Negative eigenvalues in `[−ENTROPY_CLAMP, 0)` count as zero in entropies.
pub const ENTROPY_CLAMP: f64 = 1e-10;
/// Default relative rank cut for pseudo-inverses.
pub const RANK_TOL: f64 = 1e-10;
