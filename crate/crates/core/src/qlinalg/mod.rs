//! Dense complex linear algebra for the small matrices this crate needs.
//!
//! Everything here is exact-size and allocation-light: 2×2 single-qubit
//! operators, 4×4 two-qubit operators, and mixing matrices of at most 8×8.

mod eig;
mod expm;
mod matrix;
mod svd;
mod takagi;

pub use eig::{clamp_psd, herm_eig, herm_eig_with, psd_sqrt, psd_sqrt_with, HermEig};
pub use expm::expm;
pub use matrix::{inner, kron, norm, ComplexMatrix, C64};
pub(crate) use matrix::{I, ONE, ZERO};
pub use svd::{svd2, Svd2};
pub use takagi::{takagi, takagi_with, Takagi};

/// `σy ⊗ σy` in the standard basis.
pub fn sigma_yy() -> ComplexMatrix {
    kron(&ComplexMatrix::pauli_y(), &ComplexMatrix::pauli_y())
}

/// `exp(A)` for a skew-Hermitian `A`; the result is unitary.
pub fn expm_skew_hermitian(a: &ComplexMatrix) -> ComplexMatrix {
    debug_assert!((a + &a.adjoint()).frobenius_norm() <= 1e-9 * (1.0 + a.frobenius_norm()));
    expm(a)
}
