//! Explicit LOCC protocols: synthesis for every feasible conversion, exact
//! and sampled simulation, and structural validation.
//!
//! All measurements are performed by Alice; Bob only applies the corrections
//! announced with each outcome.

mod ir;
mod simulate;
mod synth;

pub use ir::{
    validate_protocol, LocalUnitary, LoccProtocol, Outcome, Party, Stage, UnitaryChoice,
    ValidationReport,
};
pub use simulate::{
    sample_branches, simulate_exact, simulate_exact_density, simulate_sampled, Branch, Group,
    SampledResult, SimulationResult, Step,
};
pub use synth::{
    find_local_unitaries, synth_conclusive, synth_conclusive_mixed, synth_deterministic,
    synth_prepare_mixed, synth_prepare_mixed_probabilistic, synth_probabilistic,
};

use rand::Rng;

use crate::qlinalg::ComplexMatrix;
use crate::random::random_unitary;

/// A valid protocol of `stages` random measurements and random-unitary
/// stages. Kraus operators are the 2×2 blocks of a Haar isometry.
pub fn random_protocol<R: Rng + ?Sized>(rng: &mut R, stages: usize) -> LoccProtocol {
    let mut out = Vec::with_capacity(stages);
    for s in 0..stages {
        let n = rng.gen_range(1..=4);
        let random_local = |rng: &mut R| LocalUnitary {
            alice: random_unitary(rng, 2),
            bob: random_unitary(rng, 2),
        };
        if rng.gen_bool(0.7) {
            let v = random_unitary(rng, 2 * n);
            let actor = if rng.gen_bool(0.5) {
                Party::Alice
            } else {
                Party::Bob
            };
            let outcomes = (0..n)
                .map(|i| {
                    let mut k = ComplexMatrix::zeros(2, 2);
                    for r in 0..2 {
                        for c in 0..2 {
                            k[(r, c)] = v[(2 * i + r, c)];
                        }
                    }
                    Outcome {
                        label: format!("o{i}"),
                        class: None,
                        kraus: k,
                        correction: rng.gen_bool(0.5).then(|| random_local(rng)),
                    }
                })
                .collect();
            out.push(Stage::Measurement {
                label: format!("s{s}"),
                actor,
                outcomes,
            });
        } else {
            let raw: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() + 1e-3).collect();
            let sum: f64 = raw.iter().sum();
            let choices = raw
                .iter()
                .enumerate()
                .map(|(i, w)| UnitaryChoice {
                    label: format!("u{i}"),
                    weight: w / sum,
                    unitary: random_local(rng),
                })
                .collect();
            out.push(Stage::RandomUnitary {
                label: format!("s{s}"),
                choices,
            });
        }
    }
    LoccProtocol::new(out)
}
