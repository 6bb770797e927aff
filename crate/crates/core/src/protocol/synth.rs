use crate::decomposition::{wootters_decomposition, Ensemble};
use crate::error::{Error, Result};
use crate::feasibility::{
    conclusive_max_prob, jp_feasible, max_prob_mixed, mixed_ensemble_feasible, mixed_feasible,
    nielsen_feasible, TargetList,
};
use crate::qlinalg::{kron, ComplexMatrix, C64};
use crate::states::{schmidt, DensityMatrix, PureState, SchmidtForm};
use crate::tolerance::Tolerances;

use super::ir::{LocalUnitary, LoccProtocol, Outcome, Party, Stage, UnitaryChoice};

/// Weights below this are treated as an absent Schmidt component.
const EMPTY_COMPONENT: f64 = 1e-15;

/// `uA·diag(d)·uA†` for a Kraus operator diagonal in Alice's Schmidt basis.
fn in_basis(ua: &ComplexMatrix, d: [f64; 2]) -> ComplexMatrix {
    ComplexMatrix::from_real_diag(&d).conjugate_by(ua)
}

/// `√(c·μ/λ)` per Schmidt component, or `√c` on a component the state does
/// not occupy (keeps completeness there).
fn ratio_diag(c: f64, mu: [f64; 2], lambda: [f64; 2]) -> [f64; 2] {
    std::array::from_fn(|i| {
        if lambda[i] > EMPTY_COMPONENT {
            (c * mu[i] / lambda[i]).max(0.0).sqrt()
        } else {
            c.max(0.0).sqrt()
        }
    })
}

/// Correction taking `(uA_from ⊗ uB_from)(√μ₁|00⟩ + √μ₂|11⟩)` (optionally
/// with the Schmidt components swapped) to `to`, with the global phase fixed
/// so the corrected state's largest amplitude is real positive.
fn correction(from: &SchmidtForm, to: &SchmidtForm, swap: bool) -> LocalUnitary {
    let x = ComplexMatrix::pauli_x();
    let (mut alice, bob) = if swap {
        (
            &(&to.ua * &x) * &from.ua.adjoint(),
            &(&to.ub * &x) * &from.ub.adjoint(),
        )
    } else {
        (&to.ua * &from.ua.adjoint(), &to.ub * &from.ub.adjoint())
    };
    let out = kron(&to.ua, &to.ub).mul_vec(PureState::schmidt_canonical(to.lambda2).amplitudes());
    let big = out.iter().copied().fold(C64::new(0.0, 0.0), |a, z| {
        if z.norm() > a.norm() + 1e-12 {
            z
        } else {
            a
        }
    });
    if big.norm() > 0.0 {
        alice = alice.scale(big.conj() / big.norm());
    }
    LocalUnitary { alice, bob }
}

fn lambdas(s: &SchmidtForm) -> [f64; 2] {
    [s.lambda1, s.lambda2]
}

/// Two-outcome Nielsen measurement from `from` to `to`. Assumes
/// `λ₂(from) ≥ λ₂(to)` up to the boundary tolerance.
fn nielsen_stage(label: &str, from: &SchmidtForm, to: &SchmidtForm) -> Stage {
    let lambda = lambdas(from);
    let mu2 = to.lambda2.min(from.lambda2);
    let mu = [1.0 - mu2, mu2];
    let q = if mu[0] - mu[1] < 1e-15 {
        1.0
    } else {
        ((lambda[0] - mu[1]) / (mu[0] - mu[1])).clamp(0.0, 1.0)
    };
    let mut outcomes = Vec::new();
    if q > 1e-15 {
        outcomes.push(Outcome {
            label: "k1".into(),
            class: None,
            kraus: in_basis(&from.ua, ratio_diag(q, mu, lambda)),
            correction: Some(correction(from, to, false)),
        });
    }
    if 1.0 - q > 1e-15 {
        outcomes.push(Outcome {
            label: "k2".into(),
            class: None,
            kraus: in_basis(&from.ua, ratio_diag(1.0 - q, [mu[1], mu[0]], lambda)),
            correction: Some(correction(from, to, true)),
        });
    }
    Stage::Measurement {
        label: label.into(),
        actor: Party::Alice,
        outcomes,
    }
}

fn infeasible(detail: String) -> Error {
    Error::Infeasible(detail)
}

/// Deterministic conversion `ψ → φ` by a two-outcome measurement on Alice.
pub fn synth_deterministic(psi: &PureState, phi: &PureState) -> Result<LoccProtocol> {
    let r = nielsen_feasible(psi, phi);
    if !r.feasible {
        return Err(infeasible(r.detail));
    }
    Ok(LoccProtocol::new(vec![nielsen_stage(
        "nielsen",
        &schmidt(psi),
        &schmidt(phi),
    )]))
}

/// Conversion `ψ → φ` succeeding with probability `p`, heralded by the
/// outcome class `"success"`.
pub fn synth_conclusive(psi: &PureState, phi: &PureState, p: f64) -> Result<LoccProtocol> {
    if p.is_nan() || p <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "success probability {p} must be positive"
        )));
    }
    let maximum = conclusive_max_prob(psi, phi);
    if p > maximum + Tolerances::DEFAULT.boundary {
        return Err(Error::ProbabilityTooHigh {
            requested: p,
            maximum,
        });
    }
    let p = p.min(maximum).min(1.0);
    let (from, to) = (schmidt(psi), schmidt(phi));
    let lambda = lambdas(&from);
    let mut outcomes = Vec::new();

    if nielsen_feasible(psi, phi).feasible {
        let Stage::Measurement {
            outcomes: nielsen, ..
        } = nielsen_stage("", &from, &to)
        else {
            unreachable!()
        };
        for o in nielsen {
            outcomes.push(Outcome {
                label: format!("success-{}", o.label),
                class: Some("success".into()),
                kraus: o.kraus.scale_real(p.sqrt()),
                correction: o.correction,
            });
        }
        if 1.0 - p > 1e-15 {
            outcomes.push(Outcome {
                label: "fail".into(),
                class: Some("fail".into()),
                kraus: ComplexMatrix::identity(2).scale_real((1.0 - p).sqrt()),
                correction: None,
            });
        }
    } else {
        let s = ratio_diag(p, lambdas(&to), lambda);
        let f = s.map(|x| (1.0 - x * x).max(0.0).sqrt());
        outcomes.push(Outcome {
            label: "success".into(),
            class: Some("success".into()),
            kraus: in_basis(&from.ua, s),
            correction: Some(correction(&from, &to, false)),
        });
        if f.iter().any(|x| *x > 1e-15) {
            outcomes.push(Outcome {
                label: "fail".into(),
                class: Some("fail".into()),
                kraus: in_basis(&from.ua, f),
                correction: None,
            });
        }
    }
    Ok(LoccProtocol::new(vec![Stage::Measurement {
        label: "conclusive".into(),
        actor: Party::Alice,
        outcomes,
    }]))
}

/// A flattened target: probability, state, outcome label, surviving class.
struct Flat {
    p: f64,
    state: PureState,
    label: String,
    class: Option<String>,
}

/// Equalizing Nielsen step followed by one measurement whose outcome `i`
/// yields `targets[i]` with probability `pᵢ`.
fn two_stage(psi: &PureState, mut targets: Vec<Flat>, fail_class: Option<String>) -> LoccProtocol {
    let total: f64 = targets.iter().map(|t| t.p).sum();
    if 1.0 - total > 1e-15 {
        targets.push(Flat {
            p: 1.0 - total,
            state: PureState::basis(0),
            label: "fail".into(),
            class: fail_class,
        });
    }
    let total: f64 = targets.iter().map(|t| t.p).sum();
    let forms: Vec<SchmidtForm> = targets.iter().map(|t| schmidt(&t.state)).collect();
    let from = schmidt(psi);
    let avg: f64 = targets
        .iter()
        .zip(&forms)
        .map(|(t, f)| t.p * f.lambda2)
        .sum::<f64>()
        / total;
    let mid = SchmidtForm {
        lambda1: 1.0 - avg.min(from.lambda2),
        lambda2: avg.min(from.lambda2),
        ua: from.ua.clone(),
        ub: from.ub.clone(),
    };
    let lambda = lambdas(&mid);
    let outcomes = targets
        .iter()
        .zip(&forms)
        .map(|(t, f)| Outcome {
            label: t.label.clone(),
            class: t.class.clone(),
            kraus: in_basis(&mid.ua, ratio_diag(t.p / total, lambdas(f), lambda)),
            correction: Some(correction(&mid, f, false)),
        })
        .collect();
    LoccProtocol::new(vec![
        nielsen_stage("equalize", &from, &mid),
        Stage::Measurement {
            label: "select".into(),
            actor: Party::Alice,
            outcomes,
        },
    ])
}

fn single_certain<T>(targets: &TargetList<T>) -> Option<&T> {
    match targets.targets() {
        [(p, t)] if (p - 1.0).abs() <= 1e-12 => Some(t),
        _ => None,
    }
}

/// Conversion to the ensemble `{pᵢ, φᵢ}`; outcome `tᵢ` of stage `"select"`
/// heralds `φᵢ`, and a `"fail"` outcome ending in `|00⟩` absorbs `1 − Σpᵢ`.
pub fn synth_probabilistic(
    psi: &PureState,
    targets: &TargetList<PureState>,
) -> Result<LoccProtocol> {
    let r = jp_feasible(psi, targets);
    if !r.feasible {
        return Err(infeasible(r.detail));
    }
    if let Some(phi) = single_certain(targets) {
        return synth_deterministic(psi, phi);
    }
    let flat = targets
        .targets()
        .iter()
        .enumerate()
        .map(|(i, (p, phi))| Flat {
            p: *p,
            state: phi.clone(),
            label: format!("t{i}"),
            class: None,
        })
        .collect();
    Ok(two_stage(psi, flat, None))
}

/// Deterministic preparation of `ρ`: convert to the first member of its
/// optimal decomposition, then apply a random local unitary and forget which.
pub fn synth_prepare_mixed(psi: &PureState, rho: &DensityMatrix) -> Result<LoccProtocol> {
    let r = mixed_feasible(psi, rho);
    if !r.feasible {
        return Err(infeasible(r.detail));
    }
    let ensemble = wootters_decomposition(rho)?;
    let first = &ensemble.members()[0].1;
    let mut protocol = synth_deterministic_unchecked(psi, first);
    append_mix(&mut protocol, &ensemble)?;
    Ok(protocol)
}

/// Random local unitary taking the first member to each member, then forget
/// which one was applied. Nothing is added for a single-member ensemble.
fn append_mix(protocol: &mut LoccProtocol, ensemble: &Ensemble) -> Result<()> {
    let members = ensemble.members();
    if members.len() < 2 {
        return Ok(());
    }
    let first = &members[0].1;
    let mut choices = Vec::with_capacity(members.len());
    for (k, (w, phi)) in members.iter().enumerate() {
        let (alice, bob) = find_local_unitaries(first, phi)?;
        choices.push(UnitaryChoice {
            label: format!("u{k}"),
            weight: *w,
            unitary: LocalUnitary { alice, bob },
        });
    }
    protocol.stages.push(Stage::RandomUnitary {
        label: "mix".into(),
        choices,
    });
    protocol.stages.push(Stage::Discard {
        which: vec!["mix".into()],
    });
    Ok(())
}

/// Skips the feasibility test when the caller has already applied it to a
/// state with the same (or larger) λ₂.
fn synth_deterministic_unchecked(psi: &PureState, phi: &PureState) -> LoccProtocol {
    LoccProtocol::new(vec![nielsen_stage("nielsen", &schmidt(psi), &schmidt(phi))])
}

/// Preparation of `ρᵢ` with probability `pᵢ`. The member index is discarded
/// and the target index survives as the outcome class `tᵢ` of stage
/// `"select"`.
pub fn synth_prepare_mixed_probabilistic(
    psi: &PureState,
    targets: &TargetList<DensityMatrix>,
) -> Result<LoccProtocol> {
    let r = mixed_ensemble_feasible(psi, targets);
    if !r.feasible {
        return Err(infeasible(r.detail));
    }
    if let Some(rho) = single_certain(targets) {
        return synth_prepare_mixed(psi, rho);
    }
    let mut flat = Vec::new();
    for (i, (p, rho)) in targets.targets().iter().enumerate() {
        let ensemble = wootters_decomposition(rho)?;
        for (k, (q, phi)) in ensemble.members().iter().enumerate() {
            flat.push(Flat {
                p: p * q,
                state: phi.clone(),
                label: format!("t{i}.m{k}"),
                class: Some(format!("t{i}")),
            });
        }
    }
    let mut protocol = two_stage(psi, flat, Some("fail".into()));
    protocol.stages.push(Stage::Discard {
        which: vec!["select".into()],
    });
    Ok(protocol)
}

/// Preparation of `ρ` with the largest possible probability, which is
/// returned alongside. When the target is too entangled, a heralded step
/// first reaches the least entangled member of the optimal decomposition.
pub fn synth_conclusive_mixed(psi: &PureState, rho: &DensityMatrix) -> Result<(LoccProtocol, f64)> {
    if mixed_feasible(psi, rho).feasible {
        return Ok((synth_prepare_mixed(psi, rho)?, 1.0));
    }
    let probability = max_prob_mixed(psi, rho);
    let ensemble = wootters_decomposition(rho)?;
    let first = ensemble.members()[0].1.clone();
    let p = probability.min(conclusive_max_prob(psi, &first));
    let herald = synth_conclusive(psi, &first, p)?;
    let mut rest = synth_deterministic_unchecked(&first, &first);
    append_mix(&mut rest, &ensemble)?;
    Ok((herald.then(rest, ""), probability))
}

/// Product unitary mapping `a` to `b` up to a global phase, built from the
/// two Schmidt forms.
pub fn find_local_unitaries(
    a: &PureState,
    b: &PureState,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let (sa, sb) = (schmidt(a), schmidt(b));
    if (sa.lambda2 - sb.lambda2).abs() > 1e-9 {
        return Err(Error::SchmidtMismatch {
            a: sa.lambda2,
            b: sb.lambda2,
        });
    }
    Ok((&sb.ua * &sa.ua.adjoint(), &sb.ub * &sa.ub.adjoint()))
}
