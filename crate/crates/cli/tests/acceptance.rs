//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use locc_cli::format::{self, Document};
use locc_core::concurrence::{concurrence_mixed, e2_from_concurrence, e2_mixed};
use locc_core::decomposition::{ensemble_average, wootters_decomposition, Monotone};
use locc_core::feasibility::{jp_feasible, max_prob_mixed, mixed_feasible, TargetList};
use locc_core::oracle::verify_closed_forms;
use locc_core::protocol::{
    random_protocol, sample_branches, simulate_exact, simulate_exact_density,
    synth_conclusive_mixed, synth_prepare_mixed, synth_probabilistic, validate_protocol, Stage,
};
use locc_core::random::{ginibre_density, haar_pure, seeded_rng};
use locc_core::states::{concurrence_pure, e2_pure, entropy_of_entanglement, schmidt};
use locc_core::{DensityMatrix, PureState};
use rand::Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome);

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

/// `⟨φ|ρ|φ⟩`.
fn fidelity(rho: &DensityMatrix, phi: &PureState) -> f64 {
    let a = phi.amplitudes();
    let m = rho.matrix();
    let mut acc = 0.0;
    for r in 0..4 {
        for c in 0..4 {
            acc += (a[r].conj() * m[(r, c)] * a[c]).re;
        }
    }
    acc
}

fn closed_forms() -> Outcome {
    let start = Instant::now();
    let (mut failures, mut worst) = (0, 0.0f64);
    for i in 0..100u64 {
        let rank = 1 + (i / 25) as usize;
        let rho = ginibre_density(&mut seeded_rng(1000 + i), rank);
        let report = verify_closed_forms(&rho, 1e-3, i);
        if !report.passed {
            failures += 1;
        }
        for c in &report.checks {
            worst = worst.max((c.oracle - c.closed_form).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        failures == 0 && secs < 300.0,
        format!("{failures} failures, max |oracle - closed| = {worst:.2e}, {secs:.1}s"),
    )
}

fn decomposition() -> Outcome {
    let mut rng = seeded_rng(2000);
    let mut failures = Vec::new();
    for i in 0..200 {
        let rho = ginibre_density(&mut rng, 1 + i % 4);
        let c = concurrence_mixed(&rho).concurrence;
        let e = match wootters_decomposition(&rho) {
            Ok(e) => e,
            Err(err) => {
                failures.push(format!("#{i}: {err}"));
                continue;
            }
        };
        let residual = e.reconstruction_residual(&rho);
        let spread = e
            .members()
            .iter()
            .map(|(_, psi)| (concurrence_pure(psi) - c).abs())
            .fold(0.0, f64::max);
        let e2 = (ensemble_average(&e, Monotone::E2) - e2_mixed(&rho)).abs();
        if e.len() > 4 || residual > 1e-9 || spread > 1e-7 || e2 > 1e-9 {
            failures.push(format!(
                "#{i}: {} members, residual {residual:.1e}, spread {spread:.1e}, e2 {e2:.1e}",
                e.len()
            ));
        }
    }
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            "200 decompositions".into()
        } else {
            failures.join("; ")
        },
    )
}

fn prepare_mixed() -> Outcome {
    let mut rng = seeded_rng(3000);
    let (mut done, mut worst, mut failures) = (0, 0.0f64, 0);
    while done < 100 {
        let psi = haar_pure(&mut rng);
        let rho = ginibre_density(&mut rng, 1 + done % 4);
        if !mixed_feasible(&psi, &rho).feasible {
            continue;
        }
        done += 1;
        let ok = synth_prepare_mixed(&psi, &rho).ok().and_then(|proto| {
            validate_protocol(&proto).is_valid().then_some(())?;
            simulate_exact(&proto, &psi).ok()
        });
        match ok {
            Some(sim) => {
                let d = sim.grouped_output.distance(&rho);
                worst = worst.max(d);
                if d > 1e-8 {
                    failures += 1;
                }
            }
            None => failures += 1,
        }
    }
    outcome(
        failures == 0,
        format!("{failures} failures, max distance {worst:.2e}"),
    )
}

fn conclusive_mixed() -> Outcome {
    let mut rng = seeded_rng(4000);
    let n = 100_000u64;
    let (mut done, mut failures) = (0u64, Vec::new());
    let (mut worst_p, mut worst_d, mut worst_sigma) = (0.0f64, 0.0f64, 0.0f64);
    while done < 100 {
        let psi = haar_pure(&mut rng);
        let rho = ginibre_density(&mut rng, 1 + (done % 4) as usize);
        if max_prob_mixed(&psi, &rho) >= 1.0 {
            continue;
        }
        done += 1;
        let want = (schmidt(&psi).lambda2 / e2_mixed(&rho)).min(1.0);
        let Ok((proto, p)) = synth_conclusive_mixed(&psi, &rho) else {
            failures.push(format!("#{done}: synthesis failed"));
            continue;
        };
        let sim = simulate_exact(&proto, &psi).unwrap();
        let success = |class: &Option<String>| class.as_deref() == Some("success");
        let exact: f64 = sim
            .branches
            .iter()
            .filter(|b| success(&b.path[0].class))
            .map(|b| b.probability)
            .sum();
        let dp = (p - want).abs().max((exact - want).abs());
        let dist = sim
            .groups
            .iter()
            .filter(|g| g.key[0].1 == "success")
            .map(|g| g.state.distance(&rho))
            .fold(0.0, f64::max);
        let sampled = sample_branches(&sim, n, done);
        let hits: u64 = sampled
            .counts
            .iter()
            .zip(&sim.branches)
            .filter(|(_, b)| success(&b.path[0].class))
            .map(|(c, _)| c.2)
            .sum();
        let nf = n as f64;
        let sigma = (hits as f64 - nf * exact).abs() / (nf * exact * (1.0 - exact)).sqrt();
        worst_p = worst_p.max(dp);
        worst_d = worst_d.max(dist);
        worst_sigma = worst_sigma.max(sigma);
        if dp > 1e-12 || dist > 1e-8 || sigma > 3.0 {
            failures.push(format!(
                "#{done}: dp {dp:.1e}, distance {dist:.1e}, {sigma:.2} sigma"
            ));
        }
    }
    let summary = format!(
        "max |P - bound| {worst_p:.1e}, max distance {worst_d:.1e}, max deviation {worst_sigma:.2} sigma"
    );
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            summary
        } else {
            format!("{summary}; {}", failures.join("; "))
        },
    )
}

fn probabilistic() -> Outcome {
    let mut rng = seeded_rng(5000);
    let (mut done, mut failures) = (0, 0);
    let (mut worst_p, mut worst_o) = (0.0f64, 0.0f64);
    while done < 100 {
        let psi = haar_pure(&mut rng);
        let n = rng.gen_range(2..=4);
        let scale = if done % 2 == 0 { 1.0 } else { 0.8 };
        let raw: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() + 0.05).collect();
        let sum: f64 = raw.iter().sum();
        let phis: Vec<PureState> = (0..n).map(|_| haar_pure(&mut rng)).collect();
        let weights: Vec<f64> = raw.iter().map(|w| scale * w / sum).collect();
        let list = TargetList::new(weights.iter().copied().zip(phis.clone()).collect()).unwrap();
        if !jp_feasible(&psi, &list).feasible {
            continue;
        }
        done += 1;
        let Ok(proto) = synth_probabilistic(&psi, &list) else {
            failures += 1;
            continue;
        };
        let sim = simulate_exact(&proto, &psi).unwrap();
        let mut bad = false;
        for (i, (w, phi)) in weights.iter().zip(&phis).enumerate() {
            let label = format!("t{i}");
            let hits: Vec<_> = sim
                .branches
                .iter()
                .filter(|b| b.path.last().is_some_and(|s| s.outcome == label))
                .collect();
            let p: f64 = hits.iter().map(|b| b.probability).sum();
            worst_p = worst_p.max((p - w).abs());
            bad |= (p - w).abs() > 1e-10;
            for b in hits {
                let o = (1.0 - fidelity(&b.output, phi).sqrt()).abs();
                worst_o = worst_o.max(o);
                bad |= o > 1e-9;
            }
        }
        if bad {
            failures += 1;
        }
    }
    outcome(
        failures == 0,
        format!(
            "{failures} failures, max |p - p_i| {worst_p:.1e}, max |1 - overlap| {worst_o:.1e}"
        ),
    )
}

fn monotonicity() -> Outcome {
    let mut rng = seeded_rng(6000);
    let (mut done, mut violations, mut worst) = (0, 0, f64::NEG_INFINITY);
    while done < 500 {
        let proto = random_protocol(&mut rng, 1);
        if !matches!(proto.stages[0], Stage::Measurement { .. }) {
            continue;
        }
        let rho = ginibre_density(&mut rng, 1 + done % 4);
        done += 1;
        let sim = simulate_exact_density(&proto, &rho).unwrap();
        let after: f64 = sim
            .branches
            .iter()
            .map(|b| b.probability * e2_mixed(&b.output))
            .sum();
        let excess = after - e2_mixed(&rho);
        worst = worst.max(excess);
        if excess > 1e-7 {
            violations += 1;
        }
    }
    outcome(
        violations == 0,
        format!("{violations} violations, max excess {worst:.2e}"),
    )
}

fn pure_identities() -> Outcome {
    let mut rng = seeded_rng(7000);
    let (mut a, mut b, mut c) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..1000 {
        let psi = haar_pure(&mut rng);
        let cp = concurrence_pure(&psi);
        a = a.max((e2_pure(&psi) - e2_from_concurrence(cp)).abs());
        let report = concurrence_mixed(&psi.projector());
        b = b.max((report.concurrence - cp).abs());
        c = c.max((report.eof - entropy_of_entanglement(&psi)).abs());
    }
    outcome(
        a <= 1e-12 && b <= 1e-9 && c <= 1e-9,
        format!("E2 {a:.1e}, concurrence {b:.1e}, EoF {c:.1e}"),
    )
}

fn run(args: &[&str]) -> (Vec<u8>, Option<i32>) {
    let out = Command::new(env!("CARGO_BIN_EXE_locc"))
        .args(args)
        .output()
        .expect("locc runs");
    (out.stdout, out.status.code())
}

fn round_trips(doc: &Document) -> bool {
    let text = doc.to_json();
    let Ok(parsed) = serde_json::from_str::<Document>(&text) else {
        return false;
    };
    let again = match parsed.load() {
        Ok(format::Loaded::Pure(p)) => format::pure_doc(&p),
        Ok(format::Loaded::Density(r)) => format::density_doc(&r),
        Ok(format::Loaded::Ensemble(e)) => format::ensemble_doc(&e),
        Ok(format::Loaded::Protocol(p)) => format::protocol_doc(&p),
        Err(_) => return false,
    };
    again.to_json() == text && parsed == *doc
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let p = |name: &str| d.join(name).to_str().unwrap().to_owned();
    let mut problems = Vec::new();

    let setup: [&[&str]; 3] = [
        &[
            "random",
            "--kind",
            "pure",
            "--seed",
            "11",
            "--output",
            d.to_str().unwrap(),
        ],
        &[
            "random",
            "--kind",
            "density",
            "--rank",
            "3",
            "--seed",
            "12",
            "--count",
            "2",
            "--output",
            d.to_str().unwrap(),
        ],
        &[
            "synth",
            "--from",
            &p("pure-0000.json"),
            "--to",
            &p("density-0000.json"),
            "--output",
            &p("proto.json"),
        ],
    ];
    for args in setup {
        run(args);
    }
    let commands: Vec<Vec<String>> = [
        vec!["random", "--kind", "pure", "--seed", "3", "--count", "4"],
        vec!["random", "--kind", "density", "--rank", "2", "--seed", "4"],
        vec!["--json", "analyze", "--input", &p("density-0001.json")],
        vec![
            "--json",
            "oracle",
            "--input",
            &p("density-0001.json"),
            "--restarts",
            "20",
            "--seed",
            "9",
        ],
        vec![
            "--json",
            "simulate",
            "--protocol",
            &p("proto.json"),
            "--input",
            &p("pure-0000.json"),
            "--samples",
            "5000",
            "--seed",
            "2",
        ],
        vec![
            "--json",
            "maxprob",
            "--from",
            &p("pure-0000.json"),
            "--to",
            &p("density-0001.json"),
        ],
    ]
    .into_iter()
    .map(|v| v.into_iter().map(String::from).collect())
    .collect();
    for args in &commands {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let first = run(&args);
        let second = run(&args);
        if first != second || first.0.is_empty() {
            problems.push(format!("{} differs between runs", args.join(" ")));
        }
    }
    for (name, args) in [
        (
            "d1.json",
            [
                "decompose",
                "--input",
                &p("density-0001.json"),
                "--output",
                &p("d1.json"),
            ],
        ),
        (
            "d2.json",
            [
                "decompose",
                "--input",
                &p("density-0001.json"),
                "--output",
                &p("d2.json"),
            ],
        ),
    ] {
        if run(&args).1 != Some(0) {
            problems.push(format!("decompose into {name} failed"));
        }
    }
    if std::fs::read(d.join("d1.json")).ok() != std::fs::read(d.join("d2.json")).ok() {
        problems.push("decompose output differs between runs".into());
    }

    let mut rng = seeded_rng(8000);
    let mut docs = Vec::new();
    for i in 0..50 {
        docs.push(format::pure_doc(&haar_pure(&mut rng)));
        let rho = ginibre_density(&mut rng, 1 + i % 4);
        docs.push(format::density_doc(&rho));
        docs.push(format::ensemble_doc(&wootters_decomposition(&rho).unwrap()));
        docs.push(format::protocol_doc(&random_protocol(&mut rng, 3)));
    }
    if let Ok(format::Loaded::Protocol(proto)) = format::read(Path::new(&p("proto.json"))) {
        docs.push(format::protocol_doc(&proto));
    } else {
        problems.push("synthesized protocol did not load".into());
    }
    let broken = docs.iter().filter(|doc| !round_trips(doc)).count();
    if broken > 0 {
        problems.push(format!("{broken} documents do not round-trip"));
    }
    outcome(
        problems.is_empty(),
        if problems.is_empty() {
            format!(
                "{} commands repeated, {} documents round-tripped",
                commands.len() + 1,
                docs.len()
            )
        } else {
            problems.join("; ")
        },
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (
            "closed forms agree with the convex-roof oracle",
            closed_forms,
        ),
        ("optimal decomposition", decomposition),
        ("feasible mixed-state preparation", prepare_mixed),
        ("conclusive mixed-state preparation", conclusive_mixed),
        ("probabilistic pure-target protocols", probabilistic),
        ("E2 monotone under single measurements", monotonicity),
        ("pure-state identities", pure_identities),
        ("determinism and round trips", determinism),
    ];
    // Optional criterion numbers on the command line restrict the run.
    let only: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut all = true;
    for (i, (name, check)) in criteria.iter().enumerate() {
        if !only.is_empty() && !only.contains(&(i + 1)) {
            continue;
        }
        let r = check();
        all &= r.passed;
        println!(
            "{} criterion {}: {name} ({})",
            if r.passed { "PASS" } else { "FAIL" },
            i + 1,
            r.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
