//! Concurrence of two-qubit mixed states and the monotones derived from it.

use crate::qlinalg::{herm_eig, psd_sqrt, sigma_yy};
use crate::states::{binary_entropy, DensityMatrix};

/// Spin-flip spectrum of a state and the quantities derived from it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcurrenceReport {
    /// Square roots of the eigenvalues of `ρρ̃`, descending.
    pub v: [f64; 4],
    /// `max{v₁ − v₂ − v₃ − v₄, 0}`.
    pub concurrence: f64,
    /// `(1 − √(1 − C²))/2`.
    pub e2: f64,
    /// Entanglement of formation in bits.
    pub eof: f64,
}

/// `ρ̃ = (σy⊗σy) ρ̄ (σy⊗σy)`, conjugation taken in the standard basis.
pub fn spin_flip(rho: &DensityMatrix) -> DensityMatrix {
    let yy = sigma_yy();
    let flipped = &(&yy * &rho.matrix().conj()) * &yy;
    DensityMatrix::from_trusted(flipped)
}

const MAX_CONCURRENCE_ROUNDING: f64 = 2e-15;

/// Concurrence and friends from the Hermitian matrix `R = √(√ρ ρ̃ √ρ)`.
///
/// The eigenvalues of `R` equal the square roots of the eigenvalues of the
/// non-Hermitian `ρρ̃`; working with `R` keeps every step inside the
/// Hermitian eigensolver.
pub fn concurrence_mixed(rho: &DensityMatrix) -> ConcurrenceReport {
    let sqrt_rho = psd_sqrt(rho.matrix()).expect("density matrices are PSD");
    let flipped = spin_flip(rho);
    let inner = (&(&sqrt_rho * flipped.matrix()) * &sqrt_rho).hermitian_part();
    let r = psd_sqrt(&inner).expect("congruence of a PSD matrix is PSD");
    let spectrum = herm_eig(&r).expect("Hermitian");
    let v: [f64; 4] = std::array::from_fn(|i| spectrum.eigenvalues[i].max(0.0));
    let mut concurrence = (v[0] - v[1] - v[2] - v[3]).clamp(0.0, 1.0);
    // E₂ has infinite slope at C = 1, so rounding residue there would cost
    // about 1e-8 in E₂.
    if concurrence > 1.0 - MAX_CONCURRENCE_ROUNDING {
        concurrence = 1.0;
    }
    ConcurrenceReport {
        v,
        concurrence,
        e2: e2_from_concurrence(concurrence),
        eof: eof_from_concurrence(concurrence),
    }
}

pub fn concurrence(rho: &DensityMatrix) -> f64 {
    concurrence_mixed(rho).concurrence
}

/// Convex-roof extension of the smaller Schmidt weight.
pub fn e2_mixed(rho: &DensityMatrix) -> f64 {
    concurrence_mixed(rho).e2
}

pub fn entanglement_of_formation(rho: &DensityMatrix) -> f64 {
    concurrence_mixed(rho).eof
}

/// `(1 − √(1 − C²))/2`; the same map sends pure-state concurrence to `λ₂`.
pub fn e2_from_concurrence(c: f64) -> f64 {
    let c = c.clamp(0.0, 1.0);
    // c²/(2(1 + √(1 − c²))) avoids cancellation for small c
    c * c / (2.0 * (1.0 + (1.0 - c * c).sqrt()))
}

/// `h((1 + √(1 − C²))/2)`.
pub fn eof_from_concurrence(c: f64) -> f64 {
    binary_entropy(e2_from_concurrence(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::C64;
    use crate::random::{ginibre_density, haar_pure, random_unitary, seeded_rng};
    use crate::states::{concurrence_pure, entropy_of_entanglement, PureState};

    fn phi_minus() -> PureState {
        PureState::from_real([1.0, 0.0, 0.0, -1.0]).unwrap()
    }

    #[test]
    fn spin_flip_examples() {
        let r = spin_flip(&PureState::basis(1).projector());
        assert!(r.distance(&PureState::basis(2).projector()) < 1e-15);
        let bell = PureState::bell().projector();
        assert!(spin_flip(&bell).distance(&bell) < 1e-15);
        let mixed = DensityMatrix::maximally_mixed();
        assert!(spin_flip(&mixed).distance(&mixed) < 1e-15);
    }

    #[test]
    fn bell_and_maximally_mixed() {
        let rep = concurrence_mixed(&PureState::bell().projector());
        assert!((rep.v[0] - 1.0).abs() < 1e-12);
        assert!(rep.v[1..].iter().all(|&x| x.abs() < 1e-12));
        assert!((rep.concurrence - 1.0).abs() < 1e-12);
        assert!((rep.e2 - 0.5).abs() < 1e-12);
        assert!((rep.eof - 1.0).abs() < 1e-12);

        let rep = concurrence_mixed(&DensityMatrix::maximally_mixed());
        for v in rep.v {
            assert!((v - 0.25).abs() < 1e-12);
        }
        assert_eq!(rep.concurrence, 0.0);
        assert_eq!(rep.e2, 0.0);
        assert_eq!(rep.eof, 0.0);
    }

    #[test]
    fn bell_diagonal_mixture() {
        let a = PureState::bell().projector();
        let b = phi_minus().projector();
        let rho = DensityMatrix::mixture(&[(0.7, &a), (0.3, &b)]).unwrap();
        let rep = concurrence_mixed(&rho);
        for (x, y) in rep.v.iter().zip([0.7, 0.3, 0.0, 0.0]) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!((rep.concurrence - 0.4).abs() < 1e-12);
    }

    #[test]
    fn e2_and_eof_values() {
        assert_eq!(e2_from_concurrence(0.0), 0.0);
        assert!((e2_from_concurrence(1.0) - 0.5).abs() < 1e-15);
        assert!((e2_from_concurrence(0.6) - 0.1).abs() < 1e-15);
        let psi = PureState::schmidt_canonical(0.1);
        let eof = entanglement_of_formation(&psi.projector());
        assert!((eof - entropy_of_entanglement(&psi)).abs() < 1e-9);
        assert!((eof - 0.468_995_593_589_281_2).abs() < 1e-9);
    }

    #[test]
    fn pure_state_consistency() {
        let mut rng = seeded_rng(51);
        for _ in 0..1000 {
            let psi = haar_pure(&mut rng);
            let c = concurrence(&psi.projector());
            assert!((c - concurrence_pure(&psi)).abs() <= 1e-9);
        }
    }

    #[test]
    fn local_unitary_invariance() {
        let mut rng = seeded_rng(52);
        for rank in 1..=4 {
            for _ in 0..50 {
                let rho = ginibre_density(&mut rng, rank);
                let (u, v) = (random_unitary(&mut rng, 2), random_unitary(&mut rng, 2));
                let moved = rho.apply_local_unitary(&u, &v);
                assert!((concurrence(&rho) - concurrence(&moved)).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn convexity_and_range() {
        use rand::Rng;
        let mut rng = seeded_rng(53);
        for _ in 0..300 {
            let (k1, k2) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
            let r1 = ginibre_density(&mut rng, k1);
            let r2 = ginibre_density(&mut rng, k2);
            let t: f64 = rng.gen();
            let mix = DensityMatrix::mixture(&[(t, &r1), (1.0 - t, &r2)]).unwrap();
            let (a, b, m) = (
                concurrence_mixed(&r1),
                concurrence_mixed(&r2),
                concurrence_mixed(&mix),
            );
            assert!(m.concurrence <= t * a.concurrence + (1.0 - t) * b.concurrence + 1e-9);
            assert!(m.e2 <= t * a.e2 + (1.0 - t) * b.e2 + 1e-9);
            for rep in [a, b, m] {
                assert!((0.0..=1.0).contains(&rep.concurrence));
                assert!((0.0..=0.5).contains(&rep.e2));
                assert!((0.0..=1.0).contains(&rep.eof));
                assert!(rep.v.windows(2).all(|w| w[0] >= w[1]));
            }
        }
    }

    #[test]
    fn off_diagonal_phase_matters() {
        // |01⟩ ± i|10⟩ are maximally entangled
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = PureState::new([
            C64::new(0.0, 0.0),
            C64::new(s, 0.0),
            C64::new(0.0, s),
            C64::new(0.0, 0.0),
        ])
        .unwrap();
        assert!((concurrence(&psi.projector()) - 1.0).abs() < 1e-12);
    }
}
