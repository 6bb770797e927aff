//! JSON state files. Every file holds one document tagged by `kind`;
//! complex numbers are `[re, im]` pairs in the basis `|00⟩, |01⟩, |10⟩, |11⟩`.

use std::fs;
use std::path::Path;

use locc_core::decomposition::Ensemble;
use locc_core::protocol::{LocalUnitary, LoccProtocol, Outcome, Party, Stage, UnitaryChoice};
use locc_core::{ComplexMatrix, DensityMatrix, PureState, C64};
use serde::{Deserialize, Serialize};

pub type Pair = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Document {
    Pure { amplitudes: Vec<Pair> },
    Density { matrix: Vec<Vec<Pair>> },
    Ensemble { members: Vec<MemberDoc> },
    Protocol { stages: Vec<StageDoc> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemberDoc {
    pub weight: f64,
    pub amplitudes: Vec<Pair>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum StageDoc {
    Measurement {
        label: String,
        actor: PartyDoc,
        outcomes: Vec<OutcomeDoc>,
    },
    RandomUnitary {
        label: String,
        choices: Vec<ChoiceDoc>,
    },
    Discard {
        which: Vec<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PartyDoc {
    Alice,
    Bob,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutcomeDoc {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
    pub kraus: Vec<Vec<Pair>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correction: Option<LocalDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalDoc {
    pub alice: Vec<Vec<Pair>>,
    pub bob: Vec<Vec<Pair>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChoiceDoc {
    pub label: String,
    pub weight: f64,
    pub alice: Vec<Vec<Pair>>,
    pub bob: Vec<Vec<Pair>>,
}

/// A parsed and validated document.
#[derive(Debug, Clone)]
pub enum Loaded {
    Pure(PureState),
    Density(DensityMatrix),
    Ensemble(Ensemble),
    Protocol(LoccProtocol),
}

fn pair(z: C64) -> Pair {
    [z.re, z.im]
}

fn complex(p: &Pair) -> C64 {
    C64::new(p[0], p[1])
}

fn vector(v: &[C64]) -> Vec<Pair> {
    v.iter().copied().map(pair).collect()
}

fn matrix_doc(m: &ComplexMatrix) -> Vec<Vec<Pair>> {
    (0..m.rows())
        .map(|r| (0..m.cols()).map(|c| pair(m[(r, c)])).collect())
        .collect()
}

fn matrix(rows: &[Vec<Pair>], n: usize, what: &str) -> Result<ComplexMatrix, String> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(format!("{what} must be {n}x{n}"));
    }
    let data = rows.iter().flat_map(|r| r.iter().map(complex)).collect();
    ComplexMatrix::from_vec(n, n, data).map_err(|e| e.to_string())
}

fn amplitudes(v: &[Pair]) -> Result<PureState, String> {
    if v.len() != 4 {
        return Err(format!("expected 4 amplitudes, got {}", v.len()));
    }
    let amps: [C64; 4] = std::array::from_fn(|i| complex(&v[i]));
    PureState::new(amps).map_err(|e| e.to_string())
}

pub fn pure_doc(psi: &PureState) -> Document {
    Document::Pure {
        amplitudes: vector(psi.amplitudes()),
    }
}

pub fn density_doc(rho: &DensityMatrix) -> Document {
    Document::Density {
        matrix: matrix_doc(rho.matrix()),
    }
}

pub fn ensemble_doc(e: &Ensemble) -> Document {
    Document::Ensemble {
        members: e
            .members()
            .iter()
            .map(|(w, psi)| MemberDoc {
                weight: *w,
                amplitudes: vector(psi.amplitudes()),
            })
            .collect(),
    }
}

fn local_doc(u: &LocalUnitary) -> LocalDoc {
    LocalDoc {
        alice: matrix_doc(&u.alice),
        bob: matrix_doc(&u.bob),
    }
}

pub fn protocol_doc(p: &LoccProtocol) -> Document {
    let stages = p
        .stages
        .iter()
        .map(|s| match s {
            Stage::Measurement {
                label,
                actor,
                outcomes,
            } => StageDoc::Measurement {
                label: label.clone(),
                actor: match actor {
                    Party::Alice => PartyDoc::Alice,
                    Party::Bob => PartyDoc::Bob,
                },
                outcomes: outcomes
                    .iter()
                    .map(|o| OutcomeDoc {
                        label: o.label.clone(),
                        class: o.class.clone(),
                        kraus: matrix_doc(&o.kraus),
                        correction: o.correction.as_ref().map(local_doc),
                    })
                    .collect(),
            },
            Stage::RandomUnitary { label, choices } => StageDoc::RandomUnitary {
                label: label.clone(),
                choices: choices
                    .iter()
                    .map(|c| ChoiceDoc {
                        label: c.label.clone(),
                        weight: c.weight,
                        alice: matrix_doc(&c.unitary.alice),
                        bob: matrix_doc(&c.unitary.bob),
                    })
                    .collect(),
            },
            Stage::Discard { which } => StageDoc::Discard {
                which: which.clone(),
            },
        })
        .collect();
    Document::Protocol { stages }
}

fn local(l: &LocalDoc) -> Result<LocalUnitary, String> {
    Ok(LocalUnitary {
        alice: matrix(&l.alice, 2, "Alice's unitary")?,
        bob: matrix(&l.bob, 2, "Bob's unitary")?,
    })
}

impl Document {
    /// Converts to library types, validating states and ensembles. Protocols
    /// are only checked for shape here.
    pub fn load(&self) -> Result<Loaded, String> {
        Ok(match self {
            Document::Pure { amplitudes: a } => Loaded::Pure(amplitudes(a)?),
            Document::Density { matrix: m } => Loaded::Density(
                DensityMatrix::new(matrix(m, 4, "density matrix")?).map_err(|e| e.to_string())?,
            ),
            Document::Ensemble { members } => {
                let members = members
                    .iter()
                    .map(|m| Ok((m.weight, amplitudes(&m.amplitudes)?)))
                    .collect::<Result<Vec<_>, String>>()?;
                Loaded::Ensemble(Ensemble::new(members).map_err(|e| e.to_string())?)
            }
            Document::Protocol { stages } => {
                let mut out = Vec::with_capacity(stages.len());
                for s in stages {
                    out.push(match s {
                        StageDoc::Measurement {
                            label,
                            actor,
                            outcomes,
                        } => Stage::Measurement {
                            label: label.clone(),
                            actor: match actor {
                                PartyDoc::Alice => Party::Alice,
                                PartyDoc::Bob => Party::Bob,
                            },
                            outcomes: outcomes
                                .iter()
                                .map(|o| {
                                    Ok(Outcome {
                                        label: o.label.clone(),
                                        class: o.class.clone(),
                                        kraus: matrix(&o.kraus, 2, "Kraus operator")?,
                                        correction: o.correction.as_ref().map(local).transpose()?,
                                    })
                                })
                                .collect::<Result<_, String>>()?,
                        },
                        StageDoc::RandomUnitary { label, choices } => Stage::RandomUnitary {
                            label: label.clone(),
                            choices: choices
                                .iter()
                                .map(|c| {
                                    Ok(UnitaryChoice {
                                        label: c.label.clone(),
                                        weight: c.weight,
                                        unitary: LocalUnitary {
                                            alice: matrix(&c.alice, 2, "Alice's unitary")?,
                                            bob: matrix(&c.bob, 2, "Bob's unitary")?,
                                        },
                                    })
                                })
                                .collect::<Result<_, String>>()?,
                        },
                        StageDoc::Discard { which } => Stage::Discard {
                            which: which.clone(),
                        },
                    });
                }
                Loaded::Protocol(LoccProtocol::new(out))
            }
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }
}

pub fn read(path: &Path) -> Result<Loaded, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let doc: Document =
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    doc.load().map_err(|e| format!("{}: {e}", path.display()))
}

pub fn write(path: &Path, doc: &Document) -> Result<(), String> {
    let mut text = doc.to_json();
    text.push('\n');
    fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}
