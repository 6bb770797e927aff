//! Pure-state ensembles realizing a density matrix, including the optimal
//! equal-concurrence ensemble with at most four members.

use crate::concurrence::concurrence_mixed;
use crate::error::{Error, Result};
use crate::oracle;
use crate::qlinalg::{inner, norm, sigma_yy, takagi, ComplexMatrix, C64, I, ZERO};
use crate::states::{concurrence_pure, e2_pure, entropy_of_entanglement, DensityMatrix, PureState};
use crate::tolerance::Tolerances;

/// Weighted list of pure states `{pₖ, ψₖ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    members: Vec<(f64, PureState)>,
}

/// Pure-state functions whose ensemble averages can be evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Monotone {
    E2,
    Concurrence,
    Entropy,
}

impl Monotone {
    pub fn of_pure(self, psi: &PureState) -> f64 {
        match self {
            Monotone::E2 => e2_pure(psi),
            Monotone::Concurrence => concurrence_pure(psi),
            Monotone::Entropy => entropy_of_entanglement(psi),
        }
    }
}

impl Ensemble {
    /// Checks positivity of the weights and that they sum to one.
    pub fn new(members: Vec<(f64, PureState)>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidArgument("empty ensemble".into()));
        }
        if let Some((w, _)) = members.iter().find(|(w, _)| w.is_nan() || *w <= 0.0) {
            return Err(Error::InvalidArgument(format!("non-positive weight {w}")));
        }
        let sum: f64 = members.iter().map(|(w, _)| w).sum();
        if (sum - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!("weights sum to {sum:.12}")));
        }
        Ok(Self { members })
    }

    /// Builds an ensemble from subnormalized vectors `|x̃ₖ⟩`, dropping members
    /// lighter than the weight floor.
    fn from_subnormalized(vectors: &[Vec<C64>]) -> Self {
        let floor = Tolerances::DEFAULT.weight_floor;
        let members = vectors
            .iter()
            .filter_map(|x| {
                let w = norm(x).powi(2);
                (w >= floor).then(|| (w, PureState::normalized(x).expect("nonzero vector")))
            })
            .collect();
        Self { members }
    }

    pub fn members(&self) -> &[(f64, PureState)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `Σₖ pₖ |ψₖ⟩⟨ψₖ|` (not renormalized).
    pub fn density(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(4, 4);
        for (w, psi) in &self.members {
            m = &m + &psi.projector().matrix().scale_real(*w);
        }
        m
    }

    pub fn reconstruction_residual(&self, rho: &DensityMatrix) -> f64 {
        self.density().distance(rho.matrix())
    }
}

/// `Σₖ pₖ·μ(ψₖ)`, the objective the convex roof minimizes.
pub fn ensemble_average(ensemble: &Ensemble, monotone: Monotone) -> f64 {
    ensemble
        .members
        .iter()
        .map(|(w, psi)| w * monotone.of_pure(psi))
        .sum()
}

/// Eigenvectors scaled by the square roots of their eigenvalues; tiny
/// eigenvalues are dropped, so the count is the numerical rank.
pub(crate) fn subnormalized_eigenvectors(rho: &DensityMatrix) -> Vec<Vec<C64>> {
    let eig = rho.eigen();
    let floor = Tolerances::DEFAULT.weight_floor;
    eig.eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &w)| w > floor)
        .map(|(k, &w)| {
            let s = w.sqrt();
            eig.eigenvectors
                .column(k)
                .into_iter()
                .map(|x| x * s)
                .collect()
        })
        .collect()
}

/// The spectral ensemble: eigenvectors weighted by eigenvalues.
pub fn eigen_ensemble(rho: &DensityMatrix) -> Ensemble {
    Ensemble::from_subnormalized(&subnormalized_eigenvectors(rho))
}

/// Ensemble `|x̃ₖ⟩ = Σᵢ Tₖᵢ √λᵢ |vᵢ⟩` for an `m×r` isometry `T`.
///
/// Every ensemble realizing `ρ` arises this way for some isometry, with `r`
/// the rank of `ρ` and `m` the number of members.
pub fn hjw_ensemble(rho: &DensityMatrix, t: &ComplexMatrix) -> Result<Ensemble> {
    let xs = subnormalized_eigenvectors(rho);
    let r = xs.len();
    let m = t.rows();
    if t.cols() != r {
        return Err(Error::Dimension {
            expected: format!("{m}x{r} isometry (rank {r})"),
            got: format!("{}x{}", t.rows(), t.cols()),
        });
    }
    if m > 8 {
        return Err(Error::RankExceedsM { rank: r, m });
    }
    let residual = t.isometry_residual();
    if residual > Tolerances::DEFAULT.isometry {
        return Err(Error::NotIsometry { residual });
    }
    Ok(Ensemble::from_subnormalized(&mix(t, &xs)))
}

/// `wₖ = Σⱼ Tₖⱼ xⱼ`.
pub(crate) fn mix(t: &ComplexMatrix, xs: &[Vec<C64>]) -> Vec<Vec<C64>> {
    (0..t.rows())
        .map(|k| {
            let mut w = vec![ZERO; 4];
            for (j, x) in xs.iter().enumerate() {
                let c = t[(k, j)];
                for (wi, xi) in w.iter_mut().zip(x) {
                    *wi += c * xi;
                }
            }
            w
        })
        .collect()
}

/// Bilinear preconcurrence `xᵀ (σy⊗σy) y`; for a normalized state,
/// `|pre(ψ, ψ)|` is its concurrence.
pub(crate) fn preconcurrence(x: &[C64], y: &[C64], yy: &ComplexMatrix) -> C64 {
    x.iter().zip(yy.mul_vec(y)).map(|(a, b)| a * b).sum()
}

/// Optimal ensemble: at most four members, each with concurrence `C(ρ)`.
///
/// Construction:
/// 1. `xᵢ = √λᵢ vᵢ` from the spectrum of `ρ` (rank `r`);
/// 2. Takagi-factorize `τᵢⱼ = xᵢᵀ(σy⊗σy)xⱼ` and rotate to `yᵢ` with diagonal
///    preconcurrences `v₁ ≥ … ≥ v_r`;
/// 3. if `v₁ > v₂ + … + v_r`, multiply `y₂…` by `i` so the preconcurrences
///    read `(v₁, −v₂, …)` and sum to `C`, then apply real Givens rotations that
///    set every member's preconcurrence to `C·pₖ`;
/// 4. otherwise choose phases that close the polygon `Σ e^{iφⱼ} vⱼ = 0` and mix
///    with a Hadamard matrix, so that every member has zero preconcurrence.
///
/// The result is checked against every post-condition; if the construction
/// misses, the convex-roof minimizer is tried before giving up.
pub fn wootters_decomposition(rho: &DensityMatrix) -> Result<Ensemble> {
    let constructed = construct_optimal(rho);
    let diagnostics = match check_optimal(rho, &constructed) {
        Ok(()) => return Ok(constructed),
        Err(d) => d,
    };
    let fallback = oracle::convex_roof_min(rho, Monotone::Concurrence, 4, 50, 0x5eed)?;
    match check_optimal(rho, &fallback.ensemble) {
        Ok(()) => Ok(fallback.ensemble),
        Err(second) => Err(Error::ConstructionFailed(format!(
            "constructive: {diagnostics}; minimizer: {second}"
        ))),
    }
}

/// Post-conditions of an optimal ensemble; the message lists each failure.
pub fn check_optimal(rho: &DensityMatrix, ensemble: &Ensemble) -> std::result::Result<(), String> {
    let report = concurrence_mixed(rho);
    let mut failures = Vec::new();
    if ensemble.is_empty() || ensemble.len() > 4 {
        failures.push(format!("{} members", ensemble.len()));
    }
    let residual = ensemble.reconstruction_residual(rho);
    if residual > 1e-9 {
        failures.push(format!("reconstruction residual {residual:.3e}"));
    }
    for (k, (_, psi)) in ensemble.members().iter().enumerate() {
        let c = concurrence_pure(psi);
        if (c - report.concurrence).abs() > 1e-7 {
            failures.push(format!(
                "member {k} concurrence {c:.12} vs {:.12}",
                report.concurrence
            ));
        }
    }
    let avg = ensemble_average(ensemble, Monotone::E2);
    if (avg - report.e2).abs() > 1e-9 {
        failures.push(format!("average E2 {avg:.12} vs {:.12}", report.e2));
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(failures.join(", "))
    }
}

fn construct_optimal(rho: &DensityMatrix) -> Ensemble {
    let yy = sigma_yy();
    let xs = subnormalized_eigenvectors(rho);
    let r = xs.len();
    let mut tau = ComplexMatrix::zeros(r, r);
    for i in 0..r {
        for j in 0..r {
            tau[(i, j)] = preconcurrence(&xs[i], &xs[j], &yy);
        }
    }
    let tk = takagi(&tau).expect("τ is symmetric by construction");
    // yᵢ = Σⱼ conj(Uⱼᵢ) xⱼ
    let ys = mix(&tk.u.adjoint(), &xs);
    let v = &tk.values;
    let excess = v[0] - v[1..].iter().sum::<f64>();

    let members = if excess > 0.0 {
        let zs: Vec<Vec<C64>> = ys
            .iter()
            .enumerate()
            .map(|(j, y)| {
                if j == 0 {
                    y.clone()
                } else {
                    y.iter().map(|x| x * I).collect()
                }
            })
            .collect();
        let signed: Vec<f64> = v
            .iter()
            .enumerate()
            .map(|(j, &x)| if j == 0 { x } else { -x })
            .collect();
        let o = equalizing_rotation(&zs, &signed, excess);
        mix(&o, &zs)
    } else {
        let phases = closing_phases(v);
        let mut zs: Vec<Vec<C64>> = ys
            .iter()
            .zip(&phases)
            .map(|(y, &phi)| {
                let p = C64::from_polar(1.0, phi / 2.0);
                y.iter().map(|x| x * p).collect()
            })
            .collect();
        match r {
            1 => zs,
            2 => mix(&hadamard(2), &zs),
            _ => {
                zs.resize(4, vec![ZERO; 4]);
                mix(&hadamard(4), &zs)
            }
        }
    };
    Ensemble::from_subnormalized(&members)
}

/// Real orthogonal `O` (as a complex matrix) such that every `wₖ = Σⱼ Oₖⱼ zⱼ`
/// has preconcurrence `target·‖wₖ‖²`.
///
/// `F = diag(signed) − target·Re⟨zᵢ|zⱼ⟩` is real symmetric and traceless; each
/// Givens rotation pairs a positive and a negative diagonal entry and zeroes
/// the positive one by solving `fᵢ + 2Fᵢⱼ t + fⱼ t² = 0` for `t = tan θ`,
/// taking the root of smaller magnitude. At most `n − 1` rotations are needed.
fn equalizing_rotation(zs: &[Vec<C64>], signed: &[f64], target: f64) -> ComplexMatrix {
    let n = zs.len();
    let mut f = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            f[i][j] = -target * inner(&zs[i], &zs[j]).re;
        }
        f[i][i] += signed[i];
    }
    let mut o = vec![vec![0.0; n]; n];
    for (i, row) in o.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let mut active = vec![true; n];
    let eps = 1e-15;
    for _ in 0..n {
        let pos = (0..n)
            .filter(|&k| active[k] && f[k][k] > eps)
            .max_by(|&a, &b| f[a][a].total_cmp(&f[b][b]));
        let neg = (0..n)
            .filter(|&k| active[k] && f[k][k] < -eps)
            .min_by(|&a, &b| f[a][a].total_cmp(&f[b][b]));
        let (Some(i), Some(j)) = (pos, neg) else {
            break;
        };
        let (fi, fj, fij) = (f[i][i], f[j][j], f[i][j]);
        let disc = (fij * fij - fi * fj).sqrt();
        let roots = [(-fij + disc) / fj, (-fij - disc) / fj];
        let t = if roots[0].abs() <= roots[1].abs() {
            roots[0]
        } else {
            roots[1]
        };
        let c = 1.0 / (1.0 + t * t).sqrt();
        let s = t * c;
        rotate_rows(&mut o, i, j, c, s);
        rotate_rows(&mut f, i, j, c, s);
        rotate_cols(&mut f, i, j, c, s);
        f[i][i] = 0.0;
        active[i] = false;
    }
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = C64::new(o[i][j], 0.0);
        }
    }
    out
}

fn rotate_rows(m: &mut [Vec<f64>], i: usize, j: usize, c: f64, s: f64) {
    for k in 0..m[i].len() {
        let (a, b) = (m[i][k], m[j][k]);
        m[i][k] = c * a + s * b;
        m[j][k] = -s * a + c * b;
    }
}

fn rotate_cols(m: &mut [Vec<f64>], i: usize, j: usize, c: f64, s: f64) {
    for row in m.iter_mut() {
        let (a, b) = (row[i], row[j]);
        row[i] = c * a + s * b;
        row[j] = -s * a + c * b;
    }
}

/// Sylvester-Hadamard matrix scaled to be orthogonal (`n` = 2 or 4).
fn hadamard(n: usize) -> ComplexMatrix {
    let h2 = [[1.0, 1.0], [1.0, -1.0]];
    let mut m = ComplexMatrix::zeros(n, n);
    let scale = 1.0 / (n as f64).sqrt();
    for i in 0..n {
        for j in 0..n {
            let sign: f64 = match n {
                2 => h2[i][j],
                4 => h2[i / 2][j / 2] * h2[i % 2][j % 2],
                _ => unreachable!("hadamard is only used for n = 2, 4"),
            };
            m[(i, j)] = C64::new(sign * scale, 0.0);
        }
    }
    m
}

/// Angles `φⱼ` with `Σ vⱼ e^{iφⱼ} ≈ 0`, for descending `v` with
/// `v₁ ≤ v₂ + v₃ + v₄`.
///
/// `v₃` and `v₄` are first combined into a segment whose length `L` lies in
/// the range allowed by both `|v₃ − v₄| ≤ L ≤ v₃ + v₄` and the triangle with
/// `v₁`, `v₂`; the triangle then fixes the remaining angles.
pub(crate) fn closing_phases(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let mut full = [0.0; 4];
    full[..n].copy_from_slice(v);
    let [v1, v2, v3, v4] = full;
    let mut phases = [0.0; 4];
    if v1 <= 0.0 {
        return vec![0.0; n];
    }
    if v3 <= 0.0 {
        // two sides: v₁ = v₂
        phases[1] = std::f64::consts::PI;
        return phases[..n].to_vec();
    }
    let lo = (v1 - v2).max(v3 - v4).max(0.0);
    let hi = (v1 + v2).min(v3 + v4);
    let l = 0.5 * (lo + hi.max(lo));
    // combined segment v₃ + v₄ e^{iα}
    let alpha = if v4 > 0.0 {
        ((l * l - v3 * v3 - v4 * v4) / (2.0 * v3 * v4))
            .clamp(-1.0, 1.0)
            .acos()
    } else {
        0.0
    };
    let seg = C64::new(v3, 0.0) + C64::from_polar(v4, alpha);
    // triangle v₁ + v₂ e^{iβ} + L e^{iγ} = 0
    let beta = if v2 > 0.0 {
        ((l * l - v1 * v1 - v2 * v2) / (2.0 * v1 * v2))
            .clamp(-1.0, 1.0)
            .acos()
    } else {
        std::f64::consts::PI
    };
    let partial = C64::new(v1, 0.0) + C64::from_polar(v2, beta);
    let gamma = (-partial).arg();
    let delta = seg.arg();
    phases[1] = beta;
    phases[2] = gamma - delta;
    phases[3] = gamma - delta + alpha;
    phases[..n].to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concurrence::{concurrence, e2_mixed};
    use crate::random::{ginibre_density, random_unitary, seeded_rng};

    #[test]
    fn eigen_ensemble_examples() {
        let e = eigen_ensemble(&PureState::bell().projector());
        assert_eq!(e.len(), 1);
        assert!((e.members()[0].0 - 1.0).abs() < 1e-12);

        let e = eigen_ensemble(&DensityMatrix::maximally_mixed());
        assert_eq!(e.len(), 4);
        for (w, _) in e.members() {
            assert!((w - 0.25).abs() < 1e-15);
        }
        assert_eq!(ensemble_average(&e, Monotone::Concurrence), 0.0);

        let bell = PureState::bell().projector();
        let zero = PureState::basis(0).projector();
        let rho = DensityMatrix::mixture(&[(0.7, &bell), (0.3, &zero)]).unwrap();
        let e = eigen_ensemble(&rho);
        assert_eq!(e.len(), 2);
        // eigenvalues of [[0.65,0.35],[0.35,0.35]] in the {|00⟩,|11⟩} block
        let expected = [
            0.5 + (0.15f64 * 0.15 + 0.35 * 0.35).sqrt(),
            0.5 - (0.15f64 * 0.15 + 0.35 * 0.35).sqrt(),
        ];
        for ((w, _), x) in e.members().iter().zip(expected) {
            assert!((w - x).abs() < 1e-12);
        }
        assert!(e.reconstruction_residual(&rho) < 1e-12);
    }

    #[test]
    fn hjw_examples() {
        let mut rng = seeded_rng(61);
        let rho = ginibre_density(&mut rng, 4);
        let a = hjw_ensemble(&rho, &ComplexMatrix::identity(4)).unwrap();
        assert_eq!(a, eigen_ensemble(&rho));

        let psi = PureState::bell();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let t = ComplexMatrix::from_vec(2, 1, vec![C64::new(h, 0.0), C64::new(h, 0.0)]).unwrap();
        let e = hjw_ensemble(&psi.projector(), &t).unwrap();
        assert_eq!(e.len(), 2);
        for (w, m) in e.members() {
            assert!((w - 0.5).abs() < 1e-12);
            assert!((m.overlap(&psi) - 1.0).abs() < 1e-12);
        }

        let bad = ComplexMatrix::from_real_diag(&[1.0, 0.5, 1.0, 1.0]);
        assert!(matches!(
            hjw_ensemble(&rho, &bad),
            Err(Error::NotIsometry { .. })
        ));
    }

    #[test]
    fn hjw_reconstructs_and_is_never_below_the_roof() {
        let mut rng = seeded_rng(62);
        for k in 0..100 {
            let rank = 1 + k % 4;
            let rho = ginibre_density(&mut rng, rank);
            let m = rank + (k % 5);
            let u = random_unitary(&mut rng, m);
            let cols: Vec<Vec<C64>> = (0..rank).map(|j| u.column(j)).collect();
            let t = ComplexMatrix::from_columns(&cols);
            let e = hjw_ensemble(&rho, &t).unwrap();
            assert!(e.reconstruction_residual(&rho) <= 1e-9);
            assert!(ensemble_average(&e, Monotone::E2) >= e2_mixed(&rho) - 1e-9);
            assert!(ensemble_average(&e, Monotone::Concurrence) >= concurrence(&rho) - 1e-9);
        }
    }

    #[test]
    fn wootters_bell_and_separable() {
        let bell = PureState::bell();
        let e = wootters_decomposition(&bell.projector()).unwrap();
        assert_eq!(e.len(), 1);
        assert!((e.members()[0].1.overlap(&bell) - 1.0).abs() < 1e-12);

        let e = wootters_decomposition(&DensityMatrix::maximally_mixed()).unwrap();
        assert!(e.len() <= 4);
        for (_, m) in e.members() {
            assert!(concurrence_pure(m) < 1e-7);
        }
    }

    #[test]
    fn wootters_post_conditions_all_ranks() {
        let mut rng = seeded_rng(63);
        let (mut entangled, mut separable) = (0, 0);
        for k in 0..400 {
            let mut rho = ginibre_density(&mut rng, 1 + k % 4);
            if k % 2 == 1 {
                let t = 0.25 + 0.5 * (k as f64 / 400.0);
                rho = DensityMatrix::mixture(&[
                    (t, &rho),
                    (1.0 - t, &DensityMatrix::maximally_mixed()),
                ])
                .unwrap();
            }
            if concurrence(&rho) > 0.0 {
                entangled += 1;
            } else {
                separable += 1;
            }
            let e = construct_optimal(&rho);
            if let Err(msg) = check_optimal(&rho, &e) {
                panic!("sample {k}: {msg}");
            }
        }
        assert!(entangled > 50 && separable > 50, "{entangled} {separable}");
    }

    #[test]
    fn closing_phases_close() {
        for v in [
            vec![0.4, 0.3, 0.2, 0.1],
            vec![0.25, 0.25, 0.25, 0.25],
            vec![0.5, 0.3, 0.2],
            vec![0.3, 0.3],
            vec![0.6, 0.3, 0.2, 0.1],
        ] {
            let phi = closing_phases(&v);
            let s: C64 = v
                .iter()
                .zip(&phi)
                .map(|(&x, &p)| C64::from_polar(x, p))
                .sum();
            assert!(s.norm() < 1e-14, "{v:?} -> {s}");
        }
    }

    #[test]
    fn ensemble_new_validates() {
        assert!(Ensemble::new(vec![]).is_err());
        assert!(Ensemble::new(vec![(0.5, PureState::bell())]).is_err());
        assert!(
            Ensemble::new(vec![(-0.5, PureState::bell()), (1.5, PureState::basis(0))]).is_err()
        );
        let e = Ensemble::new(vec![(1.0, PureState::bell())]).unwrap();
        assert!((ensemble_average(&e, Monotone::E2) - 0.5).abs() < 1e-15);
    }
}
