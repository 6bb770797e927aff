use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

use super::matrix::{ComplexMatrix, C64};

/// Spectrum of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermEig {
    /// Sorted in descending order.
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector for `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
}

impl HermEig {
    /// `V · diag(w) · V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = ComplexMatrix::from_real_diag(&self.eigenvalues);
        d.conjugate_by(&self.eigenvectors)
    }

    /// Reassembles `V · diag(f(w)) · V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let w: Vec<f64> = self.eigenvalues.iter().map(|&x| f(x)).collect();
        ComplexMatrix::from_real_diag(&w).conjugate_by(&self.eigenvectors)
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// The input is symmetrized before iterating; a residual `‖H − H†‖_F` beyond
/// the Hermitian tolerance is rejected.
pub fn herm_eig(h: &ComplexMatrix) -> Result<HermEig> {
    herm_eig_with(h, &Tolerances::DEFAULT)
}

pub fn herm_eig_with(h: &ComplexMatrix, tol: &Tolerances) -> Result<HermEig> {
    if !h.is_square() {
        return Err(Error::Dimension {
            expected: "square matrix".into(),
            got: format!("{}x{}", h.rows(), h.cols()),
        });
    }
    let residual = h.hermitian_residual();
    if residual > tol.hermitian * h.frobenius_norm().max(1.0) {
        return Err(Error::NonHermitian { residual });
    }
    let n = h.rows();
    let mut a = h.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let threshold = tol.jacobi_off * a.frobenius_norm().max(1.0);

    for _ in 0..tol.jacobi_max_sweeps {
        if off_diagonal_norm(&a) < threshold {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        eigenvectors.set_column(k, &v.column(i));
    }
    Ok(HermEig {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One Jacobi step annihilating `a[p][q]`.
///
/// A diagonal phase first makes the pivot real, then a real plane rotation
/// diagonalizes the 2×2 block.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let b = a[(p, q)];
    let mag = b.norm();
    if mag < f64::MIN_POSITIVE {
        return;
    }
    let phase = b / mag;
    let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * mag);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let g_pp = C64::new(c, 0.0);
    let g_pq = C64::new(s, 0.0);
    let g_qp = -phase.conj() * s;
    let g_qq = phase.conj() * c;

    let n = a.rows();
    for k in 0..n {
        let (hp, hq) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = hp * g_pp + hq * g_qp;
        a[(k, q)] = hp * g_pq + hq * g_qq;
        let (vp, vq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vp * g_pp + vq * g_qp;
        v[(k, q)] = vp * g_pq + vq * g_qq;
    }
    for k in 0..n {
        let (rp, rq) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = g_pp.conj() * rp + g_qp.conj() * rq;
        a[(q, k)] = g_pq.conj() * rp + g_qq.conj() * rq;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;
}

/// Hermitian PSD square root.
///
/// Eigenvalues at or below the clamp threshold (relative to the largest
/// magnitude) are set to zero so that exact rank deficiency survives; anything
/// more negative than the error threshold is rejected.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    psd_sqrt_with(m, &Tolerances::DEFAULT)
}

pub fn psd_sqrt_with(m: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    let eig = herm_eig_with(m, tol)?;
    let w = clamp_psd(&eig.eigenvalues, tol)?;
    Ok(
        ComplexMatrix::from_real_diag(&w.iter().map(|x| x.sqrt()).collect::<Vec<_>>())
            .conjugate_by(&eig.eigenvectors),
    )
}

/// Applies the PSD clamp to a spectrum.
pub fn clamp_psd(eigenvalues: &[f64], tol: &Tolerances) -> Result<Vec<f64>> {
    let scale = eigenvalues.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
    let min = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -tol.psd_error * scale {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
        });
    }
    Ok(eigenvalues
        .iter()
        .map(|&x| if x <= tol.psd_clamp * scale { 0.0 } else { x })
        .collect())
}
