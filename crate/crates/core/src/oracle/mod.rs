//! Brute-force convex roof: minimize an ensemble average over all
//! decompositions of a density matrix.
//!
//! Candidate ensembles are parameterized through the spectral ensemble: an
//! `m×m` unitary `exp(A)`, `A` skew-Hermitian with `m²` real parameters,
//! supplies the isometry `T` (its first `r` columns) and `|x̃ₖ⟩ = Σᵢ Tₖᵢ √λᵢ|vᵢ⟩`.
//! Every candidate is therefore an exact decomposition and the search needs no
//! constraints. Member values come from the product of each member's Schmidt
//! coefficients (a 2×2 determinant) and never touch the spin-flip machinery,
//! so this module is an independent check of the closed forms.
//!
//! Seeds: restart `k` draws its start point from ChaCha8 seeded with `seed`
//! on stream `k`. Restarts run in parallel and the best result is chosen by
//! `(value, k)`, so the outcome does not depend on thread scheduling.

mod nelder_mead;

pub use nelder_mead::{minimize, Minimum, NelderMeadOptions};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::concurrence::concurrence_mixed;
use crate::decomposition::{ensemble_average, mix, subnormalized_eigenvectors, Ensemble, Monotone};
use crate::error::{Error, Result};
use crate::qlinalg::{expm_skew_hermitian, norm, ComplexMatrix, C64};
use crate::states::{DensityMatrix, PureState};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone)]
pub struct OracleResult {
    /// Smallest ensemble average found.
    pub value: f64,
    /// The ensemble attaining `value`.
    pub ensemble: Ensemble,
    pub restarts_used: usize,
    /// Whether the winning restart met the simplex-diameter criterion.
    pub converged: bool,
}

pub const DEFAULT_RESTARTS: usize = 200;
pub const DEFAULT_MEMBERS: usize = 4;

/// Minimizes `Σₖ pₖ μ(ψₖ)` over `m`-member decompositions of `ρ`.
pub fn convex_roof_min(
    rho: &DensityMatrix,
    monotone: Monotone,
    m: usize,
    restarts: usize,
    seed: u64,
) -> Result<OracleResult> {
    convex_roof_min_with(
        rho,
        monotone,
        m,
        restarts,
        seed,
        &NelderMeadOptions::default(),
    )
}

/// [`convex_roof_min`] with explicit simplex settings.
pub fn convex_roof_min_with(
    rho: &DensityMatrix,
    monotone: Monotone,
    m: usize,
    restarts: usize,
    seed: u64,
    opts: &NelderMeadOptions,
) -> Result<OracleResult> {
    if monotone == Monotone::Entropy {
        return Err(Error::InvalidArgument(
            "the oracle minimizes E2 or concurrence only".into(),
        ));
    }
    let xs = subnormalized_eigenvectors(rho);
    let rank = xs.len();
    if m < rank || m > 8 {
        return Err(Error::RankExceedsM { rank, m });
    }
    if restarts == 0 {
        return Err(Error::InvalidArgument(
            "at least one restart is needed".into(),
        ));
    }
    let objective = |p: &[f64]| average(&members(p, m, &xs), monotone);

    let runs: Vec<(usize, Minimum)> = (0..restarts)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let x0: Vec<f64> = (0..m * m)
                .map(|_| StandardNormal.sample(&mut rng))
                .collect();
            (k, minimize(objective, &x0, opts))
        })
        .collect();
    let (_, best) = runs
        .into_iter()
        .min_by(|a, b| a.1.value.total_cmp(&b.1.value).then(a.0.cmp(&b.0)))
        .expect("restarts > 0");

    let vectors = members(&best.x, m, &xs);
    let mut weights: Vec<(f64, PureState)> = Vec::with_capacity(vectors.len());
    for x in &vectors {
        let w = norm(x).powi(2);
        if w >= Tolerances::DEFAULT.weight_floor {
            if let Ok(psi) = PureState::normalized(x) {
                weights.push((w, psi));
            }
        }
    }
    let total: f64 = weights.iter().map(|(w, _)| w).sum();
    let ensemble = Ensemble::new(weights.into_iter().map(|(w, p)| (w / total, p)).collect())?;
    let value = ensemble_average(&ensemble, monotone);
    Ok(OracleResult {
        value,
        ensemble,
        restarts_used: restarts,
        converged: best.converged,
    })
}

/// Skew-Hermitian matrix from `m²` reals: diagonal `i·p[k]`, then the real and
/// imaginary parts of each upper-triangular entry.
pub fn skew_hermitian(params: &[f64], m: usize) -> ComplexMatrix {
    assert_eq!(params.len(), m * m);
    let mut a = ComplexMatrix::zeros(m, m);
    let mut it = params.iter().copied();
    for k in 0..m {
        a[(k, k)] = C64::new(0.0, it.next().unwrap());
    }
    for k in 0..m {
        for l in k + 1..m {
            let z = C64::new(it.next().unwrap(), it.next().unwrap());
            a[(k, l)] = z;
            a[(l, k)] = -z.conj();
        }
    }
    a
}

fn members(params: &[f64], m: usize, xs: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let u = expm_skew_hermitian(&skew_hermitian(params, m));
    let r = xs.len();
    let cols: Vec<Vec<C64>> = (0..r).map(|j| u.column(j)).collect();
    mix(&ComplexMatrix::from_columns(&cols), xs)
}

/// Weighted member values from `|det X|` of each subnormalized coefficient
/// matrix: for `x = √w·ψ`, `|det X|² = w²·λ₁λ₂`.
fn average(vectors: &[Vec<C64>], monotone: Monotone) -> f64 {
    vectors
        .iter()
        .map(|x| {
            let d = (x[0] * x[3] - x[1] * x[2]).norm();
            match monotone {
                Monotone::Concurrence => 2.0 * d,
                _ => {
                    let w = x.iter().map(|z| z.norm_sqr()).sum::<f64>();
                    let disc = (w * w - 4.0 * d * d).max(0.0).sqrt();
                    if w + disc > 0.0 {
                        2.0 * d * d / (w + disc)
                    } else {
                        0.0
                    }
                }
            }
        })
        .sum()
}

/// One closed-form versus oracle comparison.
#[derive(Debug, Clone)]
pub struct ClosedFormCheck {
    pub monotone: Monotone,
    pub closed_form: f64,
    pub oracle: f64,
    /// `closed − 1e-9 ≤ oracle ≤ closed + tol`.
    pub passed: bool,
    /// The oracle undercut the closed form, which would falsify it.
    pub undercut: bool,
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub checks: Vec<ClosedFormCheck>,
    pub passed: bool,
}

/// Compares the closed forms of `C` and `E₂` against the oracle.
pub fn verify_closed_forms(rho: &DensityMatrix, tol: f64, seed: u64) -> VerificationReport {
    verify_closed_forms_with(rho, tol, DEFAULT_RESTARTS, seed)
}

pub fn verify_closed_forms_with(
    rho: &DensityMatrix,
    tol: f64,
    restarts: usize,
    seed: u64,
) -> VerificationReport {
    let report = concurrence_mixed(rho);
    let checks: Vec<ClosedFormCheck> = [
        (Monotone::Concurrence, report.concurrence),
        (Monotone::E2, report.e2),
    ]
    .into_iter()
    .map(|(monotone, closed_form)| {
        let oracle = convex_roof_min(rho, monotone, DEFAULT_MEMBERS, restarts, seed)
            .map(|r| r.value)
            .unwrap_or(f64::NAN);
        compare(monotone, closed_form, oracle, tol)
    })
    .collect();
    let passed = checks.iter().all(|c| c.passed);
    VerificationReport { checks, passed }
}

pub fn compare(monotone: Monotone, closed_form: f64, oracle: f64, tol: f64) -> ClosedFormCheck {
    let lower = Tolerances::DEFAULT.oracle_lower;
    let undercut = oracle < closed_form - lower;
    ClosedFormCheck {
        monotone,
        closed_form,
        oracle,
        passed: !undercut && oracle <= closed_form + tol,
        undercut,
    }
}
