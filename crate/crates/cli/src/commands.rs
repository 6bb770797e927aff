use std::fs;
use std::path::{Path, PathBuf};

use locc_core::concurrence::{concurrence_mixed, e2_mixed};
use locc_core::decomposition::{wootters_decomposition, Monotone};
use locc_core::feasibility::{
    conclusive_max_prob_with, jp_feasible_with, max_prob_mixed_with, mixed_ensemble_feasible_with,
    mixed_feasible_with, nielsen_feasible_with, FeasibilityReport, TargetList,
};
use locc_core::oracle::{
    compare, convex_roof_min, verify_closed_forms_with, ClosedFormCheck, DEFAULT_MEMBERS,
};
use locc_core::protocol::{
    sample_branches, simulate_exact_density, synth_conclusive, synth_conclusive_mixed,
    synth_deterministic, synth_prepare_mixed, synth_prepare_mixed_probabilistic,
    synth_probabilistic, validate_protocol, LoccProtocol,
};
use locc_core::random::{ginibre_density, haar_pure, seeded_rng};
use locc_core::states::{concurrence_pure, entropy_of_entanglement, schmidt};
use locc_core::{ComplexMatrix, DensityMatrix, Error, PureState, Tolerances};
use serde_json::{json, Map, Value};

use crate::{Cli, Command, Kind, Mode, MonotoneArg};
use locc_cli::format::{self, Document, Loaded};

pub struct Output {
    pub text: String,
    pub code: u8,
}

pub struct Failure {
    pub message: String,
    pub code: u8,
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure {
        message: message.into(),
        code: 2,
    }
}

fn failed(message: impl Into<String>) -> Failure {
    Failure {
        message: message.into(),
        code: 1,
    }
}

/// Infeasibility and probability bounds exit with 1, everything else with 2.
fn from_core(e: Error) -> Failure {
    match e {
        Error::Infeasible(_) | Error::ProbabilityTooHigh { .. } | Error::ConstructionFailed(_) => {
            failed(e.to_string())
        }
        other => invalid(other.to_string()),
    }
}

type Outcome = Result<Output, Failure>;

pub fn run(cli: &Cli) -> Outcome {
    let tol = cli.tol;
    if let Some(t) = tol {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(invalid(format!(
                "--tol must be a non-negative number, got {t}"
            )));
        }
    }
    let (report, code) = match &cli.command {
        Command::Analyze { input } => (analyze(input)?, 0),
        Command::Check { from, to, weights } => check(from, to, weights.as_deref(), tol)?,
        Command::Maxprob { from, to } => return maxprob(from, to, tol, cli.json),
        Command::Decompose { input, output } => (decompose(input, output)?, 0),
        Command::Synth {
            from,
            to,
            weights,
            mode,
            p,
            output,
        } => (synth(from, to, weights.as_deref(), *mode, *p, output)?, 0),
        Command::Simulate {
            protocol,
            input,
            samples,
            seed,
        } => (simulate(protocol, input, *samples, *seed)?, 0),
        Command::Oracle {
            input,
            monotone,
            restarts,
            seed,
        } => oracle(input, *monotone, *restarts, *seed, tol)?,
        Command::Random {
            kind,
            rank,
            seed,
            count,
            output,
        } => return random(*kind, *rank, *seed, *count, output.as_deref(), cli.json),
    };
    Ok(Output {
        text: if cli.json {
            format!(
                "{}\n",
                serde_json::to_string_pretty(&report).expect("reports serialize")
            )
        } else {
            render(&report)
        },
        code,
    })
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(items) if items.iter().all(|x| !x.is_object()) => {
            let parts: Vec<String> = items
                .iter()
                .map(|x| scalar(x).unwrap_or_default())
                .collect();
            Some(format!("[{}]", parts.join(", ")))
        }
        _ => None,
    }
}

fn render_into(out: &mut String, v: &Value, indent: usize) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                match scalar(x) {
                    Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_into(out, x, indent + 2);
                    }
                }
            }
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                out.push_str(&format!("{pad}[{i}]\n"));
                render_into(out, x, indent + 2);
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other).unwrap_or_default())),
    }
}

/// Text form of a report; numbers are printed exactly as in `--json`.
fn render(v: &Value) -> String {
    let mut s = String::new();
    render_into(&mut s, v, 0);
    s
}

fn matrix_value(m: &ComplexMatrix) -> Value {
    let rows: Vec<Value> = (0..m.rows())
        .map(|r| {
            Value::Array(
                (0..m.cols())
                    .map(|c| json!([m[(r, c)].re, m[(r, c)].im]))
                    .collect(),
            )
        })
        .collect();
    Value::Array(rows)
}

fn read(path: &Path) -> Result<Loaded, Failure> {
    format::read(path).map_err(invalid)
}

fn read_source(path: &Path) -> Result<PureState, Failure> {
    match read(path)? {
        Loaded::Pure(psi) => Ok(psi),
        _ => Err(invalid(
            "source must be pure (only pure initial states are supported)",
        )),
    }
}

/// Pure states stay pure; ensembles become their density matrix.
enum Target {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl Target {
    fn density(&self) -> DensityMatrix {
        match self {
            Target::Pure(psi) => psi.projector(),
            Target::Mixed(rho) => rho.clone(),
        }
    }
}

fn read_target(path: &Path) -> Result<Target, Failure> {
    match read(path)? {
        Loaded::Pure(psi) => Ok(Target::Pure(psi)),
        Loaded::Density(rho) => Ok(Target::Mixed(rho)),
        Loaded::Ensemble(e) => Ok(Target::Mixed(
            DensityMatrix::new(e.density()).map_err(|e| invalid(e.to_string()))?,
        )),
        Loaded::Protocol(_) => Err(invalid(format!(
            "{}: expected a state, found a protocol",
            path.display()
        ))),
    }
}

fn read_density(path: &Path) -> Result<DensityMatrix, Failure> {
    read_target(path).map(|t| t.density())
}

fn read_weights(path: &Path, n: usize) -> Result<Vec<f64>, Failure> {
    let text = fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    let w: Vec<f64> = serde_json::from_str(&text).map_err(|e| {
        invalid(format!(
            "{}: expected a JSON array of numbers: {e}",
            path.display()
        ))
    })?;
    if w.len() != n {
        return Err(invalid(format!("{} weights for {n} targets", w.len())));
    }
    Ok(w)
}

enum Targets {
    Single(Target),
    Pure(TargetList<PureState>),
    Mixed(TargetList<DensityMatrix>),
}

fn read_targets(to: &[PathBuf], weights: Option<&Path>) -> Result<Targets, Failure> {
    let targets = to
        .iter()
        .map(|p| read_target(p))
        .collect::<Result<Vec<_>, _>>()?;
    let Some(wpath) = weights else {
        if targets.len() > 1 {
            return Err(invalid("several --to targets need --weights"));
        }
        return Ok(Targets::Single(
            targets.into_iter().next().expect("clap requires --to"),
        ));
    };
    let w = read_weights(wpath, targets.len())?;
    if targets.iter().all(|t| matches!(t, Target::Pure(_))) {
        let list = w
            .into_iter()
            .zip(targets)
            .map(|(p, t)| match t {
                Target::Pure(psi) => (p, psi),
                Target::Mixed(_) => unreachable!(),
            })
            .collect();
        Ok(Targets::Pure(
            TargetList::new(list).map_err(|e| invalid(e.to_string()))?,
        ))
    } else {
        let list = w
            .into_iter()
            .zip(targets.iter().map(Target::density))
            .collect();
        Ok(Targets::Mixed(
            TargetList::new(list).map_err(|e| invalid(e.to_string()))?,
        ))
    }
}

fn tolerances(tol: Option<f64>) -> Tolerances {
    let mut t = Tolerances::DEFAULT;
    if let Some(b) = tol {
        t.boundary = b;
    }
    t
}

fn analyze(input: &Path) -> Result<Value, Failure> {
    Ok(match read_target(input)? {
        Target::Pure(psi) => {
            let s = schmidt(&psi);
            json!({
                "kind": "pure",
                "lambda": [s.lambda1, s.lambda2],
                "e2": s.lambda2,
                "entropy": entropy_of_entanglement(&psi),
                "concurrence": concurrence_pure(&psi),
            })
        }
        Target::Mixed(rho) => {
            let r = concurrence_mixed(&rho);
            json!({
                "kind": "density",
                "v": r.v,
                "concurrence": r.concurrence,
                "e2": r.e2,
                "eof": r.eof,
            })
        }
    })
}

fn feasibility_value(mode: &str, r: &FeasibilityReport) -> Value {
    json!({
        "mode": mode,
        "feasible": r.feasible,
        "limiting_value": r.limiting_value,
        "margin": r.margin,
        "max_probability": r.max_probability,
        "detail": r.detail,
    })
}

fn check(
    from: &Path,
    to: &[PathBuf],
    weights: Option<&Path>,
    tol: Option<f64>,
) -> Result<(Value, u8), Failure> {
    let psi = read_source(from)?;
    let t = tolerances(tol);
    let (mode, r) = match read_targets(to, weights)? {
        Targets::Single(Target::Pure(phi)) => ("pure", nielsen_feasible_with(&psi, &phi, &t)),
        Targets::Single(Target::Mixed(rho)) => ("mixed", mixed_feasible_with(&psi, &rho, &t)),
        Targets::Pure(list) => ("pure-ensemble", jp_feasible_with(&psi, &list, &t)),
        Targets::Mixed(list) => (
            "mixed-ensemble",
            mixed_ensemble_feasible_with(&psi, &list, &t),
        ),
    };
    Ok((feasibility_value(mode, &r), if r.feasible { 0 } else { 1 }))
}

/// `x` with twelve significant digits.
fn significant12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x:.11}");
    }
    let digits = 11 - x.abs().log10().floor() as i32;
    format!("{x:.*}", digits.max(0) as usize)
}

fn maxprob(from: &Path, to: &Path, tol: Option<f64>, as_json: bool) -> Outcome {
    let psi = read_source(from)?;
    let t = tolerances(tol);
    let p = match read_target(to)? {
        Target::Pure(phi) => conclusive_max_prob_with(&psi, &phi, &t),
        Target::Mixed(rho) => max_prob_mixed_with(&psi, &rho, &t),
    };
    let text = if as_json {
        format!(
            "{}\n",
            serde_json::to_string_pretty(&json!({"probability": p, "display": significant12(p)}))
                .unwrap()
        )
    } else {
        format!("{}\n", significant12(p))
    };
    Ok(Output { text, code: 0 })
}

fn decompose(input: &Path, output: &Path) -> Result<Value, Failure> {
    let rho = read_density(input)?;
    let e = wootters_decomposition(&rho).map_err(from_core)?;
    format::write(output, &format::ensemble_doc(&e)).map_err(invalid)?;
    let members: Vec<Value> = e
        .members()
        .iter()
        .map(|(w, psi)| json!({"weight": w, "concurrence": concurrence_pure(psi)}))
        .collect();
    Ok(json!({
        "concurrence": concurrence_mixed(&rho).concurrence,
        "members": members,
        "residual": e.reconstruction_residual(&rho),
        "output": output.display().to_string(),
    }))
}

fn synth(
    from: &Path,
    to: &[PathBuf],
    weights: Option<&Path>,
    mode: Option<Mode>,
    p: Option<f64>,
    output: &Path,
) -> Result<Value, Failure> {
    let psi = read_source(from)?;
    let targets = read_targets(to, weights)?;
    if p.is_some() && mode != Some(Mode::Conclusive) {
        return Err(invalid("--p applies to --mode conclusive only"));
    }
    let mut extra = Map::new();
    let protocol: LoccProtocol = match targets {
        Targets::Single(target) => match (mode, target) {
            (None | Some(Mode::Det), Target::Pure(phi)) => {
                synth_deterministic(&psi, &phi).map_err(from_core)?
            }
            (Some(Mode::Det), Target::Mixed(_)) => {
                return Err(invalid(
                    "--mode det needs a pure target; use --mode prepare",
                ))
            }
            (None | Some(Mode::Prepare), t) => {
                synth_prepare_mixed(&psi, &t.density()).map_err(from_core)?
            }
            (Some(Mode::Conclusive), Target::Pure(phi)) => {
                let bound = conclusive_max_prob_with(&psi, &phi, &Tolerances::DEFAULT);
                let p = p.unwrap_or(bound);
                let proto = synth_conclusive(&psi, &phi, p).map_err(|e| match e {
                    Error::ProbabilityTooHigh { requested, maximum } => failed(format!(
                        "requested success probability {requested} exceeds the bound {}",
                        significant12(maximum)
                    )),
                    other => from_core(other),
                })?;
                extra.insert("success_probability".into(), json!(p));
                extra.insert("bound".into(), json!(bound));
                proto
            }
            (Some(Mode::Conclusive), Target::Mixed(rho)) => {
                if p.is_some() {
                    return Err(invalid(
                        "--p applies to pure targets; mixed targets use the maximum",
                    ));
                }
                let (proto, prob) = synth_conclusive_mixed(&psi, &rho).map_err(from_core)?;
                extra.insert("success_probability".into(), json!(prob));
                proto
            }
        },
        Targets::Pure(list) => match mode {
            None | Some(Mode::Det) => synth_probabilistic(&psi, &list).map_err(from_core)?,
            Some(Mode::Prepare) => {
                let mixed = TargetList::new(
                    list.targets()
                        .iter()
                        .map(|(p, s)| (*p, s.projector()))
                        .collect(),
                )
                .map_err(from_core)?;
                synth_prepare_mixed_probabilistic(&psi, &mixed).map_err(from_core)?
            }
            Some(Mode::Conclusive) => {
                return Err(invalid("--mode conclusive takes a single target"))
            }
        },
        Targets::Mixed(list) => match mode {
            None | Some(Mode::Prepare) => {
                synth_prepare_mixed_probabilistic(&psi, &list).map_err(from_core)?
            }
            Some(Mode::Det) => {
                return Err(invalid("--mode det needs pure targets; use --mode prepare"))
            }
            Some(Mode::Conclusive) => {
                return Err(invalid("--mode conclusive takes a single target"))
            }
        },
    };
    let report = validate_protocol(&protocol);
    if !report.is_valid() {
        return Err(failed(format!(
            "synthesized protocol failed validation: {}",
            report.violations.join("; ")
        )));
    }
    format::write(output, &format::protocol_doc(&protocol)).map_err(invalid)?;
    let mut v = Map::new();
    v.insert("stages".into(), json!(protocol.stages.len()));
    v.insert("labels".into(), json!(protocol.labels()));
    v.insert("output".into(), json!(output.display().to_string()));
    v.extend(extra);
    Ok(Value::Object(v))
}

fn simulate(
    protocol: &Path,
    input: &Path,
    samples: Option<u64>,
    seed: u64,
) -> Result<Value, Failure> {
    let Loaded::Protocol(proto) = read(protocol)? else {
        return Err(invalid(format!(
            "{}: expected a protocol",
            protocol.display()
        )));
    };
    let rho = read_density(input)?;
    let exact = simulate_exact_density(&proto, &rho).map_err(from_core)?;
    let branches: Vec<Value> = exact
        .branches
        .iter()
        .map(|b| {
            json!({
                "label": b.label(),
                "probability": b.probability,
                "e2": e2_mixed(&b.output),
                "output": matrix_value(b.output.matrix()),
            })
        })
        .collect();
    let groups: Vec<Value> = exact
        .groups
        .iter()
        .map(|g| {
            json!({
                "label": g.label(),
                "probability": g.probability,
                "state": matrix_value(g.state.matrix()),
            })
        })
        .collect();
    let mut v = Map::new();
    v.insert("total_probability".into(), json!(exact.total_probability()));
    v.insert("branches".into(), Value::Array(branches));
    v.insert("groups".into(), Value::Array(groups));
    v.insert(
        "grouped_output".into(),
        matrix_value(exact.grouped_output.matrix()),
    );
    if let Some(n) = samples {
        if n == 0 {
            return Err(invalid("--samples must be positive"));
        }
        let s = sample_branches(&exact, n, seed);
        let rows: Vec<Value> = s
            .counts
            .iter()
            .enumerate()
            .map(|(i, (label, p, c))| {
                json!({"label": label, "exact": p, "count": c, "frequency": s.frequency(i)})
            })
            .collect();
        let max_dev = (0..s.counts.len())
            .map(|i| (s.frequency(i) - s.counts[i].1).abs())
            .fold(0.0, f64::max);
        v.insert(
            "sampled".into(),
            json!({
                "samples": n,
                "seed": seed,
                "branches": rows,
                "max_deviation": max_dev,
                "max_sigma": s.max_sigma(),
            }),
        );
    }
    Ok(Value::Object(v))
}

fn check_value(c: &ClosedFormCheck) -> Value {
    json!({
        "monotone": match c.monotone {
            Monotone::E2 => "e2",
            Monotone::Concurrence => "concurrence",
            Monotone::Entropy => "entropy",
        },
        "closed_form": c.closed_form,
        "oracle": c.oracle,
        "difference": c.oracle - c.closed_form,
        "passed": c.passed,
        "undercut": c.undercut,
    })
}

fn oracle(
    input: &Path,
    monotone: Option<MonotoneArg>,
    restarts: usize,
    seed: u64,
    tol: Option<f64>,
) -> Result<(Value, u8), Failure> {
    let rho = read_density(input)?;
    if restarts == 0 {
        return Err(invalid("--restarts must be positive"));
    }
    let tol = tol.unwrap_or(Tolerances::DEFAULT.oracle_upper);
    let checks = match monotone {
        None => verify_closed_forms_with(&rho, tol, restarts, seed).checks,
        Some(m) => {
            let (mono, closed) = match m {
                MonotoneArg::E2 => (Monotone::E2, e2_mixed(&rho)),
                MonotoneArg::Concurrence => {
                    (Monotone::Concurrence, concurrence_mixed(&rho).concurrence)
                }
            };
            let r =
                convex_roof_min(&rho, mono, DEFAULT_MEMBERS, restarts, seed).map_err(from_core)?;
            vec![compare(mono, closed, r.value, tol)]
        }
    };
    let passed = checks.iter().all(|c| c.passed);
    let critical = checks.iter().any(|c| c.undercut);
    let v = json!({
        "tolerance": tol,
        "restarts": restarts,
        "seed": seed,
        "checks": checks.iter().map(check_value).collect::<Vec<_>>(),
        "passed": passed,
        "critical": critical,
    });
    Ok((v, if passed { 0 } else { 1 }))
}

fn random(
    kind: Kind,
    rank: usize,
    seed: u64,
    count: usize,
    output: Option<&Path>,
    as_json: bool,
) -> Outcome {
    if kind == Kind::Density && !(1..=4).contains(&rank) {
        return Err(invalid(format!(
            "--rank must be between 1 and 4, got {rank}"
        )));
    }
    if count == 0 {
        return Err(invalid("--count must be positive"));
    }
    let mut rng = seeded_rng(seed);
    let docs: Vec<Document> = (0..count)
        .map(|_| match kind {
            Kind::Pure => format::pure_doc(&haar_pure(&mut rng)),
            Kind::Density => format::density_doc(&ginibre_density(&mut rng, rank)),
        })
        .collect();
    let Some(dir) = output else {
        let text = if docs.len() == 1 {
            docs[0].to_json()
        } else {
            serde_json::to_string_pretty(&docs).expect("documents serialize")
        };
        return Ok(Output {
            text: format!("{text}\n"),
            code: 0,
        });
    };
    fs::create_dir_all(dir).map_err(|e| invalid(format!("{}: {e}", dir.display())))?;
    let prefix = match kind {
        Kind::Pure => "pure",
        Kind::Density => "density",
    };
    let mut files = Vec::with_capacity(count);
    for (i, doc) in docs.iter().enumerate() {
        let path = dir.join(format!("{prefix}-{i:04}.json"));
        format::write(&path, doc).map_err(invalid)?;
        files.push(path.display().to_string());
    }
    let v = json!({ "files": files });
    Ok(Output {
        text: if as_json {
            format!("{}\n", serde_json::to_string_pretty(&v).unwrap())
        } else {
            render(&v)
        },
        code: 0,
    })
}
