use super::eig::herm_eig;
use super::matrix::{inner, norm, ComplexMatrix, C64};

/// Singular value decomposition of a 2×2 matrix, `M = U·diag(s)·V†`.
#[derive(Debug, Clone)]
pub struct Svd2 {
    pub u: ComplexMatrix,
    /// `s[0] ≥ s[1] ≥ 0`.
    pub s: [f64; 2],
    pub v: ComplexMatrix,
}

impl Svd2 {
    pub fn reconstruct(&self) -> ComplexMatrix {
        &(&self.u * &ComplexMatrix::from_real_diag(&self.s)) * &self.v.adjoint()
    }
}

/// Unit vector orthogonal to a unit vector in C².
fn complement(u: &[C64]) -> Vec<C64> {
    vec![-u[1].conj(), u[0].conj()]
}

/// 2×2 SVD.
///
/// The right vectors come from the spectrum of `M†M`; the small singular value
/// is then recomputed as `|u₂† M v₂|` rather than taken as a square root, which
/// keeps it accurate when it is tiny relative to `s₁`.
pub fn svd2(m: &ComplexMatrix) -> Svd2 {
    assert!(m.rows() == 2 && m.cols() == 2, "svd2 expects a 2x2 matrix");
    let gram = &m.adjoint() * m;
    // M†M is Hermitian by construction, so this cannot fail.
    let eig = herm_eig(&gram).expect("Gram matrix is Hermitian");
    let v1 = eig.eigenvectors.column(0);
    let mut v2 = eig.eigenvectors.column(1);

    let mv1 = m.mul_vec(&v1);
    let s1 = norm(&mv1);
    let u1: Vec<C64> = if s1 > 0.0 {
        mv1.iter().map(|x| x / s1).collect()
    } else {
        vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]
    };
    let u2 = complement(&u1);
    let proj = inner(&u2, &m.mul_vec(&v2));
    let s2 = proj.norm();
    if s2 > 0.0 {
        // absorb the phase into v₂ so the singular value is real nonnegative
        let phase = proj / s2;
        v2 = v2.iter().map(|x| x * phase.conj()).collect();
    }
    // s₁ ≥ s₂ up to rounding
    let (mut s, mut v_cols, mut u_cols) = ([s1, s2], [v1, v2], [u1, u2]);
    if s[1] > s[0] {
        s.swap(0, 1);
        v_cols.swap(0, 1);
        u_cols.swap(0, 1);
    }
    Svd2 {
        u: ComplexMatrix::from_columns(&u_cols),
        s,
        v: ComplexMatrix::from_columns(&v_cols),
    }
}
