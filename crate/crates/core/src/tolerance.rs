//! Numerical thresholds shared across modules.

/// Every tolerance used by the library, with its default.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Allowed ‖H − H†‖_F before a matrix is rejected as non-Hermitian.
    pub hermitian: f64,
    /// Allowed ‖S − Sᵀ‖_F for Takagi input.
    pub symmetric: f64,
    /// Eigenvalues at or below this (times the spectral scale) are treated as zero.
    pub psd_clamp: f64,
    /// Eigenvalues below `-psd_error` are an error rather than rounding noise.
    pub psd_error: f64,
    /// Normalization slack for pure states.
    pub normalization: f64,
    /// Density matrices: Hermiticity, trace and eigenvalue slack.
    pub density: f64,
    /// Jacobi stops once the off-diagonal Frobenius norm drops below this.
    pub jacobi_off: f64,
    pub jacobi_max_sweeps: usize,
    /// Slack on every `≥` comparison in the feasibility predicates.
    pub boundary: f64,
    /// E₂ denominators below this count as zero.
    pub division_guard: f64,
    /// Kraus completeness and unitarity.
    pub protocol: f64,
    /// Eigen-ensemble members lighter than this are dropped.
    pub weight_floor: f64,
    /// Isometry check for ensemble mixing matrices.
    pub isometry: f64,
    /// Upper slack allowed for the convex-roof oracle over a closed form.
    pub oracle_upper: f64,
    /// The oracle may undercut a closed form by at most this much.
    pub oracle_lower: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        hermitian: 1e-9,
        symmetric: 1e-9,
        psd_clamp: 1e-12,
        psd_error: 1e-8,
        normalization: 1e-10,
        density: 1e-9,
        jacobi_off: 1e-14,
        jacobi_max_sweeps: 50,
        boundary: 1e-12,
        division_guard: 1e-14,
        protocol: 1e-10,
        weight_floor: 1e-12,
        isometry: 1e-8,
        oracle_upper: 1e-3,
        oracle_lower: 1e-9,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
