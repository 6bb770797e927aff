//! Which transformations of a pure state are reachable by LOCC, and with what
//! probability.
//!
//! For two qubits every condition reduces to comparing the smaller Schmidt
//! weight `λ₂(ψ)` with `E₂` of the target (or its average over a target
//! list); the other monotone `λ₁ + λ₂` is identically one.

use crate::concurrence::e2_mixed;
use crate::error::{Error, Result};
use crate::states::{e2_pure, DensityMatrix, PureState};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub feasible: bool,
    /// The `E₂` value (or average) the source must dominate.
    pub limiting_value: f64,
    /// `λ₂(ψ) − limiting_value`; callers may apply a stricter policy.
    pub margin: f64,
    /// Largest achievable success probability (or scale of the target
    /// weights); exactly one when feasible.
    pub max_probability: f64,
    pub detail: String,
}

/// Targets with a-priori probabilities; the probabilities may sum to less
/// than one.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetList<T> {
    targets: Vec<(f64, T)>,
}

impl<T> TargetList<T> {
    pub fn new(targets: Vec<(f64, T)>) -> Result<Self> {
        if targets.is_empty() {
            return Err(Error::InvalidArgument("empty target list".into()));
        }
        if let Some((p, _)) = targets.iter().find(|(p, _)| p.is_nan() || *p <= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "non-positive probability {p}"
            )));
        }
        let sum: f64 = targets.iter().map(|(p, _)| p).sum();
        if sum > 1.0 + 1e-12 {
            return Err(Error::TargetWeightsExceedOne { sum });
        }
        Ok(Self { targets })
    }

    pub fn targets(&self) -> &[(f64, T)] {
        &self.targets
    }

    pub fn total_probability(&self) -> f64 {
        self.targets.iter().map(|(p, _)| p).sum()
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }
}

/// `min{1, available/required}` with the division guard.
fn ratio(available: f64, required: f64, tol: &Tolerances) -> f64 {
    if required < tol.division_guard {
        1.0
    } else {
        (available / required).min(1.0)
    }
}

fn report(available: f64, required: f64, tol: &Tolerances, detail: String) -> FeasibilityReport {
    let margin = available - required;
    let feasible = margin >= -tol.boundary;
    FeasibilityReport {
        feasible,
        limiting_value: required,
        margin,
        max_probability: if feasible {
            1.0
        } else {
            ratio(available, required, tol)
        },
        detail,
    }
}

/// Deterministic pure-to-pure conversion: `λ₂(ψ) ≥ λ₂(φ)`.
pub fn nielsen_feasible(psi: &PureState, phi: &PureState) -> FeasibilityReport {
    nielsen_feasible_with(psi, phi, &Tolerances::DEFAULT)
}

pub fn nielsen_feasible_with(
    psi: &PureState,
    phi: &PureState,
    tol: &Tolerances,
) -> FeasibilityReport {
    let (a, b) = (e2_pure(psi), e2_pure(phi));
    report(
        a,
        b,
        tol,
        format!("λ₂(source) = {a:.12} vs λ₂(target) = {b:.12}"),
    )
}

/// Optimal success probability of a conclusive pure-to-pure conversion,
/// `min{1, λ₂(ψ)/λ₂(φ)}`.
pub fn conclusive_max_prob(psi: &PureState, phi: &PureState) -> f64 {
    conclusive_max_prob_with(psi, phi, &Tolerances::DEFAULT)
}

pub fn conclusive_max_prob_with(psi: &PureState, phi: &PureState, tol: &Tolerances) -> f64 {
    ratio(e2_pure(psi), e2_pure(phi), tol)
}

/// Probabilistic conversion to an ensemble of pure states: the average
/// `Σ pᵢ λ₂(φᵢ)` must not exceed `λ₂(ψ)`.
pub fn jp_feasible(psi: &PureState, targets: &TargetList<PureState>) -> FeasibilityReport {
    jp_feasible_with(psi, targets, &Tolerances::DEFAULT)
}

pub fn jp_feasible_with(
    psi: &PureState,
    targets: &TargetList<PureState>,
    tol: &Tolerances,
) -> FeasibilityReport {
    let a = e2_pure(psi);
    let avg: f64 = targets.targets().iter().map(|(p, t)| p * e2_pure(t)).sum();
    report(
        a,
        avg,
        tol,
        format!("λ₂(source) = {a:.12} vs Σ pᵢ λ₂(φᵢ) = {avg:.12}"),
    )
}

/// Deterministic preparation of a mixed state: `λ₂(ψ) ≥ E₂(ρ)`.
pub fn mixed_feasible(psi: &PureState, rho: &DensityMatrix) -> FeasibilityReport {
    mixed_feasible_with(psi, rho, &Tolerances::DEFAULT)
}

pub fn mixed_feasible_with(
    psi: &PureState,
    rho: &DensityMatrix,
    tol: &Tolerances,
) -> FeasibilityReport {
    let (a, b) = (e2_pure(psi), e2_mixed(rho));
    report(
        a,
        b,
        tol,
        format!("λ₂(source) = {a:.12} vs E₂(target) = {b:.12}"),
    )
}

/// Probabilistic preparation of mixed states: `λ₂(ψ) ≥ Σ pᵢ E₂(ρᵢ)`.
pub fn mixed_ensemble_feasible(
    psi: &PureState,
    targets: &TargetList<DensityMatrix>,
) -> FeasibilityReport {
    mixed_ensemble_feasible_with(psi, targets, &Tolerances::DEFAULT)
}

pub fn mixed_ensemble_feasible_with(
    psi: &PureState,
    targets: &TargetList<DensityMatrix>,
    tol: &Tolerances,
) -> FeasibilityReport {
    let a = e2_pure(psi);
    let avg: f64 = targets.targets().iter().map(|(p, r)| p * e2_mixed(r)).sum();
    report(
        a,
        avg,
        tol,
        format!("λ₂(source) = {a:.12} vs Σ pᵢ E₂(ρᵢ) = {avg:.12}"),
    )
}

/// Largest probability of preparing `ρ` from `ψ`: `min{1, λ₂(ψ)/E₂(ρ)}`.
pub fn max_prob_mixed(psi: &PureState, rho: &DensityMatrix) -> f64 {
    max_prob_mixed_with(psi, rho, &Tolerances::DEFAULT)
}

pub fn max_prob_mixed_with(psi: &PureState, rho: &DensityMatrix, tol: &Tolerances) -> f64 {
    let r = mixed_feasible_with(psi, rho, tol);
    if r.feasible {
        1.0
    } else {
        r.max_probability
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{ginibre_density, haar_pure, seeded_rng};

    fn with_l2(l2: f64) -> PureState {
        PureState::schmidt_canonical(l2)
    }

    /// Bell-diagonal state `p|Φ⁺⟩⟨Φ⁺| + (1 − p)|Φ⁻⟩⟨Φ⁻|` has `C = |2p − 1|`.
    fn with_concurrence(c: f64) -> DensityMatrix {
        let p = (1.0 + c) / 2.0;
        let plus = PureState::bell().projector();
        let minus = PureState::from_real([1.0, 0.0, 0.0, -1.0])
            .unwrap()
            .projector();
        DensityMatrix::mixture(&[(p, &plus), (1.0 - p, &minus)]).unwrap()
    }

    #[test]
    fn nielsen_examples() {
        assert!(nielsen_feasible(&with_l2(0.4), &with_l2(0.3)).feasible);
        let r = nielsen_feasible(&with_l2(0.1), &with_l2(0.5));
        assert!(!r.feasible);
        assert!((r.max_probability - 0.2).abs() < 1e-12);
        let psi = with_l2(0.37);
        assert!(nielsen_feasible(&psi, &psi).feasible);
    }

    #[test]
    fn conclusive_examples() {
        assert!((conclusive_max_prob(&with_l2(0.25), &with_l2(0.5)) - 0.5).abs() < 1e-12);
        assert_eq!(conclusive_max_prob(&with_l2(0.5), &with_l2(0.5)), 1.0);
        assert_eq!(conclusive_max_prob(&with_l2(0.3), &with_l2(0.0)), 1.0);
    }

    #[test]
    fn jp_examples() {
        let targets = TargetList::new(vec![(0.5, with_l2(0.5)), (0.5, with_l2(0.1))]).unwrap();
        assert!(jp_feasible(&with_l2(0.3), &targets).feasible);
        assert!(!jp_feasible(&with_l2(0.2), &targets).feasible);

        let single = TargetList::new(vec![(1.0, with_l2(0.3))]).unwrap();
        for l in [0.1, 0.3, 0.45] {
            assert_eq!(
                jp_feasible(&with_l2(l), &single).feasible,
                nielsen_feasible(&with_l2(l), &with_l2(0.3)).feasible
            );
        }
        assert!(matches!(
            TargetList::new(vec![(0.7, with_l2(0.1)), (0.7, with_l2(0.1))]),
            Err(Error::TargetWeightsExceedOne { .. })
        ));
    }

    #[test]
    fn mixed_examples() {
        let mut rng = seeded_rng(81);
        for rank in 1..=4 {
            let rho = ginibre_density(&mut rng, rank);
            assert!(mixed_feasible(&PureState::bell(), &rho).feasible);
        }
        let rho = with_concurrence(0.6);
        assert!((e2_mixed(&rho) - 0.1).abs() < 1e-12);
        assert!(!mixed_feasible(&with_l2(0.05), &rho).feasible);
        assert!(mixed_feasible(&PureState::basis(0), &DensityMatrix::maximally_mixed()).feasible);
    }

    #[test]
    fn mixed_ensemble_examples() {
        let rho = with_concurrence(0.6);
        let single = TargetList::new(vec![(1.0, rho.clone())]).unwrap();
        for l in [0.05, 0.1, 0.2] {
            assert_eq!(
                mixed_ensemble_feasible(&with_l2(l), &single).feasible,
                mixed_feasible(&with_l2(l), &rho).feasible
            );
        }
        let two = TargetList::new(vec![(0.5, rho.clone()), (0.5, rho)]).unwrap();
        assert!(mixed_ensemble_feasible(&with_l2(0.1), &two).feasible);
    }

    #[test]
    fn projector_targets_agree_with_pure_predicates() {
        let mut rng = seeded_rng(82);
        for _ in 0..200 {
            let psi = haar_pure(&mut rng);
            let phis: Vec<PureState> = (0..3).map(|_| haar_pure(&mut rng)).collect();
            let ps = [0.2, 0.3, 0.4];
            let pure =
                TargetList::new(ps.iter().copied().zip(phis.iter().cloned()).collect()).unwrap();
            let mixed = TargetList::new(
                ps.iter()
                    .copied()
                    .zip(phis.iter().map(|p| p.projector()))
                    .collect(),
            )
            .unwrap();
            let a = jp_feasible(&psi, &pure);
            let b = mixed_ensemble_feasible(&psi, &mixed);
            assert!((a.limiting_value - b.limiting_value).abs() <= 1e-9);
            if a.margin.abs() > 1e-9 {
                assert_eq!(a.feasible, b.feasible);
            }
            let phi = &phis[0];
            let p1 = max_prob_mixed(&psi, &phi.projector());
            let p2 = conclusive_max_prob(&psi, phi);
            assert!((p1 - p2).abs() <= 1e-9);
        }
    }

    #[test]
    fn max_prob_examples() {
        let rho = with_concurrence(0.6);
        assert!((max_prob_mixed(&with_l2(0.05), &rho) - 0.5).abs() < 1e-12);
        assert_eq!(max_prob_mixed(&with_l2(0.2), &rho), 1.0);
        assert_eq!(
            max_prob_mixed(&PureState::basis(3), &DensityMatrix::maximally_mixed()),
            1.0
        );
    }

    #[test]
    fn feasible_means_probability_one_and_transitivity() {
        let mut rng = seeded_rng(83);
        for _ in 0..300 {
            let (a, b, c) = (
                haar_pure(&mut rng),
                haar_pure(&mut rng),
                haar_pure(&mut rng),
            );
            let rho = ginibre_density(&mut rng, 2);
            let r = mixed_feasible(&a, &rho);
            assert_eq!(r.feasible, r.max_probability >= 1.0 - 1e-12);
            if r.feasible {
                assert_eq!(max_prob_mixed(&a, &rho), 1.0);
            }
            if nielsen_feasible(&a, &b).feasible && nielsen_feasible(&b, &c).feasible {
                assert!(nielsen_feasible(&a, &c).feasible);
            }
        }
    }
}
