//! Seeded sampling of states, unitaries and test matrices.
//!
//! All samplers draw from [`ChaCha8Rng`] seeded with `seed_from_u64`, so a
//! seed fully determines the output on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::qlinalg::{inner, norm, ComplexMatrix, C64};
use crate::states::{DensityMatrix, PureState};

pub type StateRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> StateRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian (independent N(0,1) real and imaginary parts).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    let data = (0..rows * cols).map(|_| complex_gaussian(rng)).collect();
    ComplexMatrix::from_vec(rows, cols, data).expect("sized correctly")
}

/// Haar-random pure state: four complex Gaussians, normalized.
pub fn haar_pure<R: Rng + ?Sized>(rng: &mut R) -> PureState {
    let amps: Vec<C64> = (0..4).map(|_| complex_gaussian(rng)).collect();
    let n = norm(&amps);
    let amps: [C64; 4] = std::array::from_fn(|i| amps[i] / n);
    PureState::new(amps).expect("normalized by construction")
}

/// Rank-`rank` density matrix `G·G†/tr` with `G` a 4×rank Ginibre matrix.
pub fn ginibre_density<R: Rng + ?Sized>(rng: &mut R, rank: usize) -> DensityMatrix {
    assert!((1..=4).contains(&rank), "rank must be 1..=4");
    let g = random_ginibre(rng, 4, rank);
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(m.scale_real(1.0 / tr)).expect("Ginibre construction is a valid state")
}

/// Haar unitary from Gram-Schmidt on a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = random_ginibre(rng, n, n);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut c = g.column(j);
        for _ in 0..2 {
            for b in &cols {
                let p = inner(b, &c);
                for (ci, bi) in c.iter_mut().zip(b) {
                    *ci -= p * bi;
                }
            }
        }
        let len = norm(&c);
        cols.push(c.into_iter().map(|x| x / len).collect());
    }
    ComplexMatrix::from_columns(&cols)
}

/// Random Hermitian matrix `(G + G†)/2`.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    random_ginibre(rng, n, n).hermitian_part()
}
