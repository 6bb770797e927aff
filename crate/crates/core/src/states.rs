//! Pure and mixed two-qubit states and the pure-state monotones.

use crate::error::{Error, Result};
use crate::qlinalg::{herm_eig, inner, kron, norm, svd2, ComplexMatrix, HermEig, C64, ONE, ZERO};
use crate::tolerance::Tolerances;

/// Normalized vector in C²⊗C², basis order `|00⟩, |01⟩, |10⟩, |11⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: [C64; 4],
}

impl PureState {
    /// Wraps amplitudes that are already normalized to within 1e-10.
    pub fn new(amps: [C64; 4]) -> Result<Self> {
        let n = norm(&amps);
        if (n - 1.0).abs() > Tolerances::DEFAULT.normalization {
            return Err(Error::NotNormalized { norm: n });
        }
        Ok(Self { amps })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(amps: &[C64]) -> Result<Self> {
        if amps.len() != 4 {
            return Err(Error::Dimension {
                expected: "4 amplitudes".into(),
                got: format!("{}", amps.len()),
            });
        }
        let n = norm(amps);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized { norm: n });
        }
        Ok(Self {
            amps: std::array::from_fn(|i| amps[i] / n),
        })
    }

    pub fn from_real(amps: [f64; 4]) -> Result<Self> {
        Self::normalized(&amps.map(|x| C64::new(x, 0.0)))
    }

    /// Computational basis state `|ab⟩` for `index = 2a + b`.
    pub fn basis(index: usize) -> Self {
        let mut amps = [ZERO; 4];
        amps[index] = ONE;
        Self { amps }
    }

    /// `(|00⟩ + |11⟩)/√2`.
    pub fn bell() -> Self {
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self {
            amps: [h, ZERO, ZERO, h],
        }
    }

    /// `√λ₁|00⟩ + √λ₂|11⟩` with `λ₁ = 1 − λ₂`.
    pub fn schmidt_canonical(lambda2: f64) -> Self {
        let l2 = lambda2.clamp(0.0, 1.0);
        Self {
            amps: [
                C64::new((1.0 - l2).sqrt(), 0.0),
                ZERO,
                ZERO,
                C64::new(l2.sqrt(), 0.0),
            ],
        }
    }

    pub fn amplitudes(&self) -> &[C64; 4] {
        &self.amps
    }

    /// `Mᵢⱼ = ⟨ij|ψ⟩`.
    pub fn coefficient_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_vec(2, 2, self.amps.to_vec()).expect("4 entries")
    }

    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix {
            matrix: ComplexMatrix::outer(&self.amps, &self.amps),
        }
    }

    /// `|⟨self|other⟩|`, the phase-insensitive comparison.
    pub fn overlap(&self, other: &PureState) -> f64 {
        inner(&self.amps, &other.amps).norm()
    }

    /// `(A ⊗ B)|ψ⟩`, renormalized.
    pub fn apply_local(&self, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<PureState> {
        PureState::normalized(&kron(a, b).mul_vec(&self.amps))
    }

    /// Multiplies by a global phase making the largest-magnitude amplitude real positive.
    pub fn canonical_phase(&self) -> PureState {
        let mut best = 0;
        for i in 1..4 {
            if self.amps[i].norm() > self.amps[best].norm() + 1e-12 {
                best = i;
            }
        }
        let a = self.amps[best];
        if a.norm() == 0.0 {
            return self.clone();
        }
        let phase = a.conj() / a.norm();
        PureState {
            amps: self.amps.map(|x| x * phase),
        }
    }
}

/// Schmidt data of a pure state: `ψ = (uA ⊗ uB)(√λ₁|00⟩ + √λ₂|11⟩)`.
#[derive(Debug, Clone)]
pub struct SchmidtForm {
    pub lambda1: f64,
    pub lambda2: f64,
    pub ua: ComplexMatrix,
    pub ub: ComplexMatrix,
}

impl SchmidtForm {
    pub fn reconstruct(&self) -> PureState {
        let canonical = PureState::schmidt_canonical(self.lambda2);
        let amps = kron(&self.ua, &self.ub).mul_vec(canonical.amplitudes());
        PureState {
            amps: std::array::from_fn(|i| amps[i]),
        }
    }
}

/// Schmidt decomposition through the SVD of the coefficient matrix.
///
/// With `M = U·diag(s)·V†`, `ψ = Σₖ sₖ |uₖ⟩ ⊗ |v̄ₖ⟩`, so `uA = U` and
/// `uB = V̄`. In the degenerate case `λ₁ = λ₂` the bases are whatever the
/// SVD returned.
pub fn schmidt(psi: &PureState) -> SchmidtForm {
    let d = svd2(&psi.coefficient_matrix());
    let (s1, s2) = (d.s[0], d.s[1]);
    let total = s1 * s1 + s2 * s2;
    let lambda2 = s2 * s2 / total;
    SchmidtForm {
        lambda1: 1.0 - lambda2,
        lambda2,
        ua: d.u,
        ub: d.v.conj(),
    }
}

/// `E₁(ψ) = λ₁ + λ₂`.
pub fn e1_pure(psi: &PureState) -> f64 {
    let s = schmidt(psi);
    s.lambda1 + s.lambda2
}

/// `E₂(ψ) = λ₂`, the smaller Schmidt weight.
pub fn e2_pure(psi: &PureState) -> f64 {
    schmidt(psi).lambda2
}

/// Entropy of entanglement in bits.
pub fn entropy_of_entanglement(psi: &PureState) -> f64 {
    let s = schmidt(psi);
    binary_entropy(s.lambda2)
}

/// `C(ψ) = 2√(λ₁λ₂)`.
pub fn concurrence_pure(psi: &PureState) -> f64 {
    let s = schmidt(psi);
    (2.0 * (s.lambda1 * s.lambda2).sqrt()).min(1.0)
}

/// `h(x) = −x log₂ x − (1−x) log₂(1−x)` with `0·log 0 = 0`.
pub fn binary_entropy(x: f64) -> f64 {
    let term = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
    term(x) + term(1.0 - x)
}

/// Validated two-qubit density matrix (Hermitian, unit trace, PSD).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        validate_density(&m)
    }

    pub fn maximally_mixed() -> Self {
        Self {
            matrix: ComplexMatrix::identity(4).scale_real(0.25),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn eigen(&self) -> HermEig {
        herm_eig(&self.matrix).expect("validated density matrices are Hermitian")
    }

    /// Number of eigenvalues above the weight floor.
    pub fn rank(&self) -> usize {
        self.eigen()
            .eigenvalues
            .iter()
            .filter(|&&w| w > Tolerances::DEFAULT.weight_floor)
            .count()
    }

    /// `Σ wₖ ρₖ`; the weights must sum to one.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let mut m = ComplexMatrix::zeros(4, 4);
        for (w, rho) in parts {
            m = &m + &rho.matrix.scale_real(*w);
        }
        Self::new(m)
    }

    /// `(A ⊗ B) ρ (A ⊗ B)†` for unitary `A`, `B`.
    pub fn apply_local_unitary(&self, a: &ComplexMatrix, b: &ComplexMatrix) -> Self {
        Self {
            matrix: self.matrix.conjugate_by(&kron(a, b)).hermitian_part(),
        }
    }

    /// Trusted constructor for matrices that are density matrices by construction.
    pub(crate) fn from_trusted(m: ComplexMatrix) -> Self {
        Self {
            matrix: m.hermitian_part(),
        }
    }

    pub fn distance(&self, other: &DensityMatrix) -> f64 {
        self.matrix.distance(&other.matrix)
    }
}

/// Checks the density-matrix invariants, reporting every violated one.
pub fn validate_density(m: &ComplexMatrix) -> Result<DensityMatrix> {
    let tol = Tolerances::DEFAULT;
    if m.rows() != 4 || m.cols() != 4 {
        return Err(Error::Dimension {
            expected: "4x4".into(),
            got: format!("{}x{}", m.rows(), m.cols()),
        });
    }
    if m.as_slice()
        .iter()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(Error::InvalidArgument(
            "matrix has non-finite entries".into(),
        ));
    }
    let mut errors = Vec::new();
    let residual = m.hermitian_residual();
    if residual > tol.density {
        errors.push(Error::NonHermitian { residual });
    }
    let h = m.hermitian_part();
    let trace = h.trace().re;
    if (trace - 1.0).abs() > tol.density {
        errors.push(Error::BadTrace { trace });
    }
    let eig = herm_eig(&h).expect("symmetrized");
    let min = eig.eigenvalues[3];
    if min < -tol.density {
        errors.push(Error::NotPsd {
            min_eigenvalue: min,
        });
    }
    if errors.is_empty() {
        Ok(DensityMatrix { matrix: h })
    } else {
        Err(Error::InvalidDensity(errors))
    }
}
