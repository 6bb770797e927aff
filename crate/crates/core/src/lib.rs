//! Single-copy entanglement of two-qubit states.
//!
//! The crate covers three related jobs:
//!
//! * closed-form monotones: concurrence, the mixed-state extension of the
//!   smallest Schmidt coefficient (`E₂`) and the entanglement of formation;
//! * feasibility of LOCC transformations starting from a pure state, together
//!   with explicit protocols (Kraus measurements, conditional local unitaries,
//!   classical mixing) that realize them;
//! * a brute-force convex-roof minimizer used to cross-check the closed forms.
//!
//! Basis order everywhere is `|00⟩, |01⟩, |10⟩, |11⟩` with Alice as the left
//! factor.

pub mod concurrence;
pub mod decomposition;
pub mod error;
pub mod feasibility;
pub mod oracle;
pub mod protocol;
pub mod qlinalg;
pub mod random;
pub mod states;
pub mod tolerance;

pub use error::{Error, Result};
pub use qlinalg::{ComplexMatrix, C64};
pub use states::{DensityMatrix, PureState, SchmidtForm};
pub use tolerance::Tolerances;
