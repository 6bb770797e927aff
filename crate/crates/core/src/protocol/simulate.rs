use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::qlinalg::{kron, ComplexMatrix};
use crate::states::{DensityMatrix, PureState};

use super::ir::{validate_protocol, LocalUnitary, LoccProtocol, Party, Stage};

/// Branches whose probability falls to this level are dropped.
const PRUNE: f64 = 1e-14;

/// One step of an outcome chain.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Step {
    pub stage: String,
    pub outcome: String,
    pub class: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Branch {
    pub path: Vec<Step>,
    pub probability: f64,
    pub output: DensityMatrix,
}

impl Branch {
    /// `stage:outcome` pairs joined by `/`; `"(start)"` for the empty chain.
    pub fn label(&self) -> String {
        join(
            self.path
                .iter()
                .map(|s| (s.stage.as_str(), s.outcome.as_str())),
        )
    }
}

/// Branches that agree on every outcome that was not discarded.
#[derive(Debug, Clone)]
pub struct Group {
    pub key: Vec<(String, String)>,
    pub probability: f64,
    pub state: DensityMatrix,
}

impl Group {
    pub fn label(&self) -> String {
        join(self.key.iter().map(|(a, b)| (a.as_str(), b.as_str())))
    }
}

fn join<'a>(parts: impl Iterator<Item = (&'a str, &'a str)>) -> String {
    let s: Vec<String> = parts.map(|(a, b)| format!("{a}:{b}")).collect();
    if s.is_empty() {
        "(start)".into()
    } else {
        s.join("/")
    }
}

#[derive(Debug, Clone)]
pub struct SimulationResult {
    pub branches: Vec<Branch>,
    pub groups: Vec<Group>,
    /// Probability-weighted average over all branches.
    pub grouped_output: DensityMatrix,
}

impl SimulationResult {
    pub fn total_probability(&self) -> f64 {
        self.branches.iter().map(|b| b.probability).sum()
    }

    pub fn group(&self, label: &str) -> Option<&Group> {
        self.groups.iter().find(|g| g.label() == label)
    }
}

struct Partial {
    path: Vec<Step>,
    /// Unnormalized; its trace is the branch probability.
    sigma: ComplexMatrix,
}

fn local(u: &LocalUnitary) -> ComplexMatrix {
    kron(&u.alice, &u.bob)
}

fn on(actor: Party, k: &ComplexMatrix) -> ComplexMatrix {
    let id = ComplexMatrix::identity(2);
    match actor {
        Party::Alice => kron(k, &id),
        Party::Bob => kron(&id, k),
    }
}

/// Exact branch enumeration starting from `ψ`.
pub fn simulate_exact(protocol: &LoccProtocol, psi: &PureState) -> Result<SimulationResult> {
    simulate_exact_density(protocol, &psi.projector())
}

/// Exact branch enumeration starting from a density matrix.
pub fn simulate_exact_density(
    protocol: &LoccProtocol,
    rho: &DensityMatrix,
) -> Result<SimulationResult> {
    let report = validate_protocol(protocol);
    if !report.is_valid() {
        return Err(Error::InvalidProtocol(report.violations.join("; ")));
    }
    let mut live = vec![Partial {
        path: Vec::new(),
        sigma: rho.matrix().clone(),
    }];
    let mut discarded: HashSet<&str> = HashSet::new();
    for stage in &protocol.stages {
        match stage {
            Stage::Measurement {
                label,
                actor,
                outcomes,
            } => {
                let mut next = Vec::with_capacity(live.len() * outcomes.len());
                for b in &live {
                    for o in outcomes {
                        let mut op = on(*actor, &o.kraus);
                        if let Some(c) = &o.correction {
                            op = &local(c) * &op;
                        }
                        let sigma = b.sigma.conjugate_by(&op);
                        if sigma.trace().re <= PRUNE {
                            continue;
                        }
                        let mut path = b.path.clone();
                        path.push(Step {
                            stage: label.clone(),
                            outcome: o.label.clone(),
                            class: o.class.clone(),
                        });
                        next.push(Partial { path, sigma });
                    }
                }
                live = next;
            }
            Stage::RandomUnitary { label, choices } => {
                let mut next = Vec::with_capacity(live.len() * choices.len());
                for b in &live {
                    for c in choices {
                        let sigma = b
                            .sigma
                            .conjugate_by(&local(&c.unitary))
                            .scale_real(c.weight);
                        if sigma.trace().re <= PRUNE {
                            continue;
                        }
                        let mut path = b.path.clone();
                        path.push(Step {
                            stage: label.clone(),
                            outcome: c.label.clone(),
                            class: None,
                        });
                        next.push(Partial { path, sigma });
                    }
                }
                live = next;
            }
            Stage::Discard { which } => discarded.extend(which.iter().map(String::as_str)),
        }
    }

    let mut branches = Vec::with_capacity(live.len());
    let mut groups: Vec<(Vec<(String, String)>, ComplexMatrix)> = Vec::new();
    let mut total = ComplexMatrix::zeros(4, 4);
    for b in live {
        let p = b.sigma.trace().re;
        let key: Vec<(String, String)> = b
            .path
            .iter()
            .filter_map(|s| {
                if discarded.contains(s.stage.as_str()) {
                    s.class.as_ref().map(|c| (s.stage.clone(), c.clone()))
                } else {
                    Some((s.stage.clone(), s.outcome.clone()))
                }
            })
            .collect();
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, m)) => *m = &*m + &b.sigma,
            None => groups.push((key, b.sigma.clone())),
        }
        total = &total + &b.sigma;
        branches.push(Branch {
            path: b.path,
            probability: p,
            output: normalized(&b.sigma, p),
        });
    }
    let groups = groups
        .into_iter()
        .map(|(key, m)| {
            let p = m.trace().re;
            Group {
                key,
                probability: p,
                state: normalized(&m, p),
            }
        })
        .collect();
    let t = total.trace().re;
    Ok(SimulationResult {
        branches,
        groups,
        grouped_output: normalized(&total, t),
    })
}

fn normalized(sigma: &ComplexMatrix, p: f64) -> DensityMatrix {
    DensityMatrix::from_trusted(sigma.scale_real(1.0 / p).hermitian_part())
}

/// Empirical branch frequencies from `n` draws.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledResult {
    /// `(branch label, exact probability, count)` in branch order.
    pub counts: Vec<(String, f64, u64)>,
    pub samples: u64,
}

impl SampledResult {
    pub fn frequency(&self, i: usize) -> f64 {
        self.counts[i].2 as f64 / self.samples as f64
    }

    /// Largest `|count − n·p| / √(n·p·(1−p))` over branches with `0 < p < 1`.
    pub fn max_sigma(&self) -> f64 {
        let n = self.samples as f64;
        self.counts
            .iter()
            .filter(|(_, p, _)| *p > 0.0 && *p < 1.0)
            .map(|(_, p, c)| (*c as f64 - n * p).abs() / (n * p * (1.0 - p)).sqrt())
            .fold(0.0, f64::max)
    }
}

/// Draws `n` branches by inverse CDF over the exact branch probabilities,
/// using ChaCha8 seeded with `seed` and one uniform `f64` per draw.
pub fn simulate_sampled(
    protocol: &LoccProtocol,
    psi: &PureState,
    n: u64,
    seed: u64,
) -> Result<SampledResult> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "at least one sample is needed".into(),
        ));
    }
    Ok(sample_branches(&simulate_exact(protocol, psi)?, n, seed))
}

/// Sampling step of [`simulate_sampled`] for an existing exact result.
/// `n` must be positive.
pub fn sample_branches(exact: &SimulationResult, n: u64, seed: u64) -> SampledResult {
    let total = exact.total_probability();
    let mut cdf = Vec::with_capacity(exact.branches.len());
    let mut acc = 0.0;
    for b in &exact.branches {
        acc += b.probability / total;
        cdf.push(acc);
    }
    let mut counts = vec![0u64; cdf.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..n {
        let u: f64 = rng.gen();
        let i = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
        counts[i] += 1;
    }
    SampledResult {
        counts: exact
            .branches
            .iter()
            .zip(counts)
            .map(|(b, c)| (b.label(), b.probability, c))
            .collect(),
        samples: n,
    }
}
