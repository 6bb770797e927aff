use std::collections::HashSet;

use crate::qlinalg::ComplexMatrix;
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Party {
    Alice,
    Bob,
}

/// A product unitary `A ⊗ B`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalUnitary {
    pub alice: ComplexMatrix,
    pub bob: ComplexMatrix,
}

impl LocalUnitary {
    pub fn identity() -> Self {
        Self {
            alice: ComplexMatrix::identity(2),
            bob: ComplexMatrix::identity(2),
        }
    }
}

/// One outcome of a local measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub label: String,
    /// Coarse label that survives when the stage's outcome is discarded.
    /// `None` forgets the outcome entirely.
    pub class: Option<String>,
    /// 2×2 Kraus operator on the measuring party.
    pub kraus: ComplexMatrix,
    /// Local unitaries applied after this outcome is announced.
    pub correction: Option<LocalUnitary>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryChoice {
    pub label: String,
    pub weight: f64,
    pub unitary: LocalUnitary,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stage {
    Measurement {
        label: String,
        actor: Party,
        outcomes: Vec<Outcome>,
    },
    /// Shared classical randomness selecting a product unitary.
    RandomUnitary {
        label: String,
        choices: Vec<UnitaryChoice>,
    },
    /// Forget the outcomes of the named stages. Pure bookkeeping: only the
    /// grouping of simulation branches changes.
    Discard { which: Vec<String> },
}

impl Stage {
    pub fn label(&self) -> Option<&str> {
        match self {
            Stage::Measurement { label, .. } | Stage::RandomUnitary { label, .. } => Some(label),
            Stage::Discard { .. } => None,
        }
    }
}

/// A staged LOCC protocol: every stage acts on the state left by the
/// previous one, whatever the earlier outcomes were.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LoccProtocol {
    pub stages: Vec<Stage>,
}

impl LoccProtocol {
    pub fn new(stages: Vec<Stage>) -> Self {
        Self { stages }
    }

    /// Stage labels in order, skipping discards.
    pub fn labels(&self) -> Vec<&str> {
        self.stages.iter().filter_map(Stage::label).collect()
    }

    /// Appends `other`, prefixing its stage labels (and discard references)
    /// with `prefix`.
    pub fn then(mut self, other: LoccProtocol, prefix: &str) -> Self {
        let rename = |l: &str| format!("{prefix}{l}");
        for stage in other.stages {
            self.stages.push(match stage {
                Stage::Measurement {
                    label,
                    actor,
                    outcomes,
                } => Stage::Measurement {
                    label: rename(&label),
                    actor,
                    outcomes,
                },
                Stage::RandomUnitary { label, choices } => Stage::RandomUnitary {
                    label: rename(&label),
                    choices,
                },
                Stage::Discard { which } => Stage::Discard {
                    which: which.iter().map(|w| rename(w)).collect(),
                },
            });
        }
        self
    }
}

/// Problems found by [`validate_protocol`]; empty means valid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

fn is_2x2(m: &ComplexMatrix) -> bool {
    m.rows() == 2 && m.cols() == 2
}

fn check_unitary(u: &LocalUnitary, ctx: &str, tol: f64, out: &mut Vec<String>) {
    for (name, m) in [("Alice", &u.alice), ("Bob", &u.bob)] {
        if !is_2x2(m) {
            out.push(format!(
                "{ctx}: {name} unitary is {}x{}",
                m.rows(),
                m.cols()
            ));
        } else {
            let r = m.isometry_residual();
            if r > tol {
                out.push(format!("{ctx}: {name} unitary defect {r:.3e}"));
            }
        }
    }
}

/// Checks Kraus completeness, unitarity, weight normalization and label
/// uniqueness.
pub fn validate_protocol(protocol: &LoccProtocol) -> ValidationReport {
    let tol = Tolerances::DEFAULT.protocol;
    let mut v = Vec::new();
    let mut seen: HashSet<&str> = HashSet::new();
    for (idx, stage) in protocol.stages.iter().enumerate() {
        match stage {
            Stage::Measurement {
                label, outcomes, ..
            } => {
                if !seen.insert(label) {
                    v.push(format!("stage {idx}: duplicate stage label {label:?}"));
                }
                if outcomes.is_empty() {
                    v.push(format!("{label}: no outcomes"));
                }
                let mut names = HashSet::new();
                let mut sum = ComplexMatrix::zeros(2, 2);
                for o in outcomes {
                    if !names.insert(o.label.as_str()) {
                        v.push(format!("{label}: duplicate outcome label {:?}", o.label));
                    }
                    if !is_2x2(&o.kraus) {
                        v.push(format!("{label}/{}: Kraus operator is not 2x2", o.label));
                        continue;
                    }
                    sum = &sum + &(&o.kraus.adjoint() * &o.kraus);
                    if let Some(c) = &o.correction {
                        check_unitary(c, &format!("{label}/{}", o.label), tol, &mut v);
                    }
                }
                let defect = sum.distance(&ComplexMatrix::identity(2));
                if defect > tol {
                    v.push(format!("{label}: Kraus completeness defect {defect:.3e}"));
                }
            }
            Stage::RandomUnitary { label, choices } => {
                if !seen.insert(label) {
                    v.push(format!("stage {idx}: duplicate stage label {label:?}"));
                }
                if choices.is_empty() {
                    v.push(format!("{label}: no choices"));
                }
                let mut names = HashSet::new();
                for c in choices {
                    if !names.insert(c.label.as_str()) {
                        v.push(format!("{label}: duplicate choice label {:?}", c.label));
                    }
                    if c.weight.is_nan() || c.weight < 0.0 {
                        v.push(format!("{label}/{}: negative weight {}", c.label, c.weight));
                    }
                    check_unitary(&c.unitary, &format!("{label}/{}", c.label), tol, &mut v);
                }
                let total: f64 = choices.iter().map(|c| c.weight).sum();
                if (total - 1.0).abs() > tol {
                    v.push(format!("{label}: weights sum to {total:.12}"));
                }
            }
            Stage::Discard { which } => {
                for w in which {
                    if !seen.contains(w.as_str()) {
                        v.push(format!("discard refers to unknown or later stage {w:?}"));
                    }
                }
            }
        }
    }
    ValidationReport { violations: v }
}
