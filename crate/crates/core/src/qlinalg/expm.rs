use super::matrix::{ComplexMatrix, C64};

const TAYLOR_DEGREE: usize = 12;
/// Scaled norm bound; the degree-12 Taylor remainder is then below 1e-17.
const SCALED_NORM: f64 = 0.5;

fn matmul(n: usize, a: &[C64], b: &[C64], out: &mut [C64]) {
    for i in 0..n {
        for j in 0..n {
            let mut s = C64::new(0.0, 0.0);
            for k in 0..n {
                s += a[i * n + k] * b[k * n + j];
            }
            out[i * n + j] = s;
        }
    }
}

/// `exp(A)` by scaling and squaring with a truncated Taylor series.
pub fn expm(a: &ComplexMatrix) -> ComplexMatrix {
    assert!(a.is_square(), "expm needs a square matrix");
    let n = a.rows();
    let norm = a.frobenius_norm();
    let squarings = if norm > SCALED_NORM {
        (norm / SCALED_NORM).log2().ceil() as i32
    } else {
        0
    };
    let scale = 0.5f64.powi(squarings);
    let x: Vec<C64> = a.as_slice().iter().map(|z| z * scale).collect();

    // Horner: I + X(I + X/2(I + X/3(...)))
    let mut acc = vec![C64::new(0.0, 0.0); n * n];
    let mut tmp = acc.clone();
    for i in 0..n {
        acc[i * n + i] = C64::new(1.0, 0.0);
    }
    for k in (1..=TAYLOR_DEGREE).rev() {
        matmul(n, &x, &acc, &mut tmp);
        let inv = 1.0 / k as f64;
        for (i, t) in tmp.iter().enumerate() {
            acc[i] = t * inv;
        }
        for i in 0..n {
            acc[i * n + i] += 1.0;
        }
    }
    for _ in 0..squarings {
        matmul(n, &acc, &acc, &mut tmp);
        std::mem::swap(&mut acc, &mut tmp);
    }
    ComplexMatrix::from_vec(n, n, acc).expect("n×n entries")
}
