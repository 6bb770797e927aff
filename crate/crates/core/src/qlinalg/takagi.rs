use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

use super::eig::herm_eig;
use super::matrix::{inner, norm, ComplexMatrix, C64};

/// Takagi factorization `S = U·diag(v)·Uᵀ` of a complex symmetric matrix.
#[derive(Debug, Clone)]
pub struct Takagi {
    pub u: ComplexMatrix,
    /// Nonnegative, descending.
    pub values: Vec<f64>,
}

impl Takagi {
    pub fn reconstruct(&self) -> ComplexMatrix {
        &(&self.u * &ComplexMatrix::from_real_diag(&self.values)) * &self.u.transpose()
    }
}

/// Takagi factorization of a complex symmetric `n×n` matrix.
///
/// Writing `S = A + iB`, the real symmetric matrix `[[A, B], [B, −A]]` has
/// eigenvalues `±vₖ`; an eigenvector `(x; y)` for `+vₖ` gives a Takagi vector
/// `u = x + iy` with `S·ū = vₖ·u`. Working with the embedding avoids squaring
/// the singular values, so small ones keep absolute accuracy.
///
/// The factor is not unique when values are degenerate; any valid `U` is
/// returned and callers must not rely on a particular one. Columns are
/// re-orthonormalized and each phase is fixed so that `u†·S·ū` is real and
/// nonnegative.
pub fn takagi(s: &ComplexMatrix) -> Result<Takagi> {
    takagi_with(s, &Tolerances::DEFAULT)
}

pub fn takagi_with(s: &ComplexMatrix, tol: &Tolerances) -> Result<Takagi> {
    if !s.is_square() {
        return Err(Error::Dimension {
            expected: "square matrix".into(),
            got: format!("{}x{}", s.rows(), s.cols()),
        });
    }
    let residual = s.symmetric_residual();
    if residual > tol.symmetric * s.frobenius_norm().max(1.0) {
        return Err(Error::NotSymmetric { residual });
    }
    let n = s.rows();
    let sym = (s + &s.transpose()).scale_real(0.5);

    let mut embed = ComplexMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = sym[(i, j)];
            embed[(i, j)] = C64::new(z.re, 0.0);
            embed[(i, n + j)] = C64::new(z.im, 0.0);
            embed[(n + i, j)] = C64::new(z.im, 0.0);
            embed[(n + i, n + j)] = C64::new(-z.re, 0.0);
        }
    }
    let eig = herm_eig(&embed)?;

    // Candidates: the upper half of the spectrum, then standard basis vectors
    // to complete the null space if needed.
    let mut candidates: Vec<Vec<C64>> = (0..n)
        .map(|k| {
            let col = eig.eigenvectors.column(k);
            (0..n)
                .map(|i| C64::new(col[i].re, 0.0) + C64::new(0.0, col[n + i].re))
                .collect()
        })
        .collect();
    candidates.extend((0..n).map(|k| {
        let mut e = vec![C64::new(0.0, 0.0); n];
        e[k] = C64::new(1.0, 0.0);
        e
    }));

    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(n);
    for mut c in candidates {
        if basis.len() == n {
            break;
        }
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for b in &basis {
                let proj = inner(b, &c);
                for (ci, bi) in c.iter_mut().zip(b) {
                    *ci -= proj * bi;
                }
            }
        }
        let len = norm(&c);
        if len > 0.5 {
            basis.push(c.into_iter().map(|x| x / len).collect());
        }
    }
    debug_assert_eq!(basis.len(), n);

    let mut pairs: Vec<(f64, Vec<C64>)> = basis
        .into_iter()
        .map(|u| {
            let ubar: Vec<C64> = u.iter().map(C64::conj).collect();
            let d = inner(&u, &sym.mul_vec(&ubar));
            let v = d.norm();
            if v > 0.0 {
                // u → u·e^{iα} multiplies u†Sū by e^{-2iα}
                let half = (d / v).sqrt();
                (v, u.into_iter().map(|x| x * half).collect())
            } else {
                (0.0, u)
            }
        })
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));

    let values = pairs.iter().map(|p| p.0).collect();
    let cols: Vec<Vec<C64>> = pairs.into_iter().map(|p| p.1).collect();
    Ok(Takagi {
        u: ComplexMatrix::from_columns(&cols),
        values,
    })
}
