//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//! Everything runs at desk scale (n <= 6, m <= 4) with fixed seeds.

mod common;

use std::path::PathBuf;

use common::*;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use speclift::cli::{self, Command, Options};
use speclift::criterion::{check_global, check_local, BlockReading, LocalProblem};
use speclift::files::ToleranceOverrides;
use speclift::jet::Jet;
use speclift::jordan::{d_oracle, d_sequence, jordan_structure};
use speclift::lift::{connect_similar, global_cyclic_lift, spray, spray_derivative, verify_lift};
use speclift::matrix::{commutator, ComplexMatrix};
use speclift::projection::{companion, in_spectral_ball, in_symmetrized_polydisc, project, sigma};
use speclift::{LiftInstance, ToleranceConfig};

fn criterion<F>(id: u32, label: &str, body: F)
where
    F: FnOnce() -> Result<(), String>,
{
    match body() {
        Ok(()) => println!("ACCEPTANCE {id}: PASS - {label}"),
        Err(msg) => {
            println!("ACCEPTANCE {id}: FAIL - {label}: {msg}");
            panic!("acceptance criterion {id} failed: {msg}");
        }
    }
}

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        if $cond {
        } else {
            return Err(format!($($arg)+));
        }
    };
}

fn cfg() -> ToleranceConfig {
    ToleranceConfig::default()
}

#[test]
fn acceptance_01_projection_section_identity() {
    criterion(1, "project(companion(y)) = y to 1e-10, 1000 points, n in 2..=6", || {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for case in 0..1000 {
            let n = 2 + case % 5;
            let values: Vec<Complex64> = (0..n).map(|_| random_disc(&mut rng, 0.95)).collect();
            let y = sigma(&values);
            let back = project(&companion(&y));
            let err = back.max_abs_diff(&y);
            ensure!(err <= 1e-10, "case {case} (n={n}): residual {err:.3e}");
        }
        Ok(())
    });
}

#[test]
fn acceptance_02_conjugation_invariance() {
    criterion(2, "projection conjugation-invariant to 1e-6, 500 pairs, cond <= 1e3", || {
        let mut rng = ChaCha8Rng::seed_from_u64(102);
        for case in 0..500 {
            let n = rng.gen_range(2..=6);
            let a = random_matrix(n, &mut rng, 0.35);
            let t = conditioned_matrix(n, &mut rng, 1e3);
            let lhs = project(&conjugate(&a, &t));
            let rhs = project(&a);
            let err = lhs.max_abs_diff(&rhs);
            ensure!(err <= 1e-6, "case {case} (n={n}): residual {err:.3e}");
        }
        Ok(())
    });
}

#[test]
fn acceptance_03_membership_consistency() {
    criterion(3, "ball membership == polydisc membership of projection, 500 matrices", || {
        let mut rng = ChaCha8Rng::seed_from_u64(103);
        let mut inside = 0usize;
        let mut outside = 0usize;
        for case in 0..500 {
            let n = rng.gen_range(2..=6);
            let scale = rng.gen_range(0.1..1.2);
            let a = random_matrix(n, &mut rng, scale);
            let ball = in_spectral_ball(&a).map_err(|e| e.to_string())?;
            let poly = in_symmetrized_polydisc(&project(&a)).map_err(|e| e.to_string())?;
            ensure!(
                ball.inside == poly.inside,
                "case {case}: booleans differ ({} vs {})",
                ball.inside,
                poly.inside
            );
            let gap = (ball.margin - poly.margin).abs();
            ensure!(gap <= 1e-9, "case {case}: margins differ by {gap:.3e}");
            if ball.inside {
                inside += 1;
            } else {
                outside += 1;
            }
        }
        ensure!(inside >= 50 && outside >= 50, "sweep too one-sided: {inside} in / {outside} out");
        Ok(())
    });
}

#[test]
fn acceptance_04_jordan_recovery() {
    criterion(4, "exact partition recovery for all structures n <= 5, cond <= 1e2", || {
        let mut rng = ChaCha8Rng::seed_from_u64(104);
        let l1 = c(0.3, 0.1);
        let l2 = c(-0.45, -0.2);
        let mut cases = 0usize;
        for n in 1..=5usize {
            // Single eigenvalue.
            let mut layouts: Vec<Vec<(Complex64, Vec<usize>)>> = partitions(n)
                .into_iter()
                .map(|p| vec![(l1, p)])
                .collect();
            // Two distinct eigenvalues.
            for n1 in 1..n {
                let n2 = n - n1;
                for p1 in partitions(n1) {
                    for p2 in partitions(n2) {
                        layouts.push(vec![(l1, p1.clone()), (l2, p2)]);
                    }
                }
            }
            for layout in layouts {
                let wanted = speclift::JordanStructure::from_parts(&layout).unwrap();
                let model = wanted.model_matrix();
                for draw in 0..2 {
                    let t = conditioned_matrix(n, &mut rng, 1e2);
                    let a = conjugate(&model, &t);
                    let got = jordan_structure(&a, &cfg()).map_err(|e| {
                        format!("n={n} layout {layout:?} draw {draw}: {e}")
                    })?;
                    ensure!(
                        got.matches(&wanted, 1e-5),
                        "n={n} layout {layout:?} draw {draw}: recovered {got:?}"
                    );
                    cases += 1;
                }
            }
        }
        ensure!(cases > 100, "enumeration unexpectedly small: {cases}");
        Ok(())
    });
}

#[test]
fn acceptance_05_d_sequence_matches_oracle() {
    criterion(5, "d_sequence == randomized Krylov oracle on all structures n <= 5", || {
        let eigenvalues = [
            c(0.3, 0.0),
            c(-0.45, 0.1),
            c(0.1, 0.5),
            c(-0.2, -0.4),
            c(0.0, -0.55),
        ];
        for n in 1..=5usize {
            for structure in all_structures(n, &eigenvalues) {
                let d = d_sequence(&structure);
                let m = structure.model_matrix();
                for l in 1..=n {
                    let got = d_oracle(&m, l, 32, 105).map_err(|e| e.to_string())?;
                    ensure!(
                        got == d.at(l),
                        "n={n} structure {structure:?} l={l}: oracle {got}, formula {}",
                        d.at(l)
                    );
                }
            }
        }
        Ok(())
    });
}

#[test]
fn acceptance_06_zero_matrix_ground_truth() {
    criterion(6, "zero-matrix criterion == componentwise order condition, exhaustive", || {
        for n in 2..=3usize {
            let order = 2 * n + 2;
            let zero = ComplexMatrix::zeros(n);
            let mut exponents = vec![0usize; n];
            loop {
                let fjets: Vec<Jet> = exponents
                    .iter()
                    .map(|&e| {
                        let mut coeffs = vec![c(0.0, 0.0); order];
                        coeffs[e] = c(1.0, 0.0);
                        Jet::new(c(0.0, 0.0), coeffs).unwrap()
                    })
                    .collect();
                let problem = LocalProblem::new(c(0.0, 0.0), zero.clone(), fjets).unwrap();
                let report = check_local(&problem, BlockReading::Grouped, &cfg())
                    .map_err(|e| e.to_string())?;
                let expected = exponents.iter().enumerate().all(|(idx, &e)| e > idx);
                ensure!(
                    report.pass == expected,
                    "n={n} exponents {exponents:?}: got {}, expected {expected}",
                    report.pass
                );
                // Next exponent vector in {0..4}^n.
                let mut carry = true;
                for e in exponents.iter_mut() {
                    if carry {
                        *e += 1;
                        if *e == 5 {
                            *e = 0;
                        } else {
                            carry = false;
                        }
                    }
                }
                if carry {
                    break;
                }
            }
        }
        Ok(())
    });
}

/// All-cyclic instance from eigenvalue curves: the map is the elementary
/// symmetric package of n polynomial curves into the disc, targets are
/// mildly conjugated companions of its node values.
fn generate_cyclic_instance(rng: &mut ChaCha8Rng) -> LiftInstance {
    'outer: loop {
        let n = rng.gen_range(2..=4);
        let m = rng.gen_range(1..=4);
        let mut nodes: Vec<Complex64> = Vec::new();
        let mut attempts = 0;
        while nodes.len() < m {
            attempts += 1;
            if attempts > 200 {
                continue 'outer;
            }
            let cand = random_disc(rng, 0.6);
            if nodes.iter().all(|a| (a - cand).norm() >= 0.3) {
                nodes.push(cand);
            }
        }
        let curves: Vec<Vec<Complex64>> = (0..n)
            .map(|_| {
                vec![
                    random_disc(rng, 0.5),
                    random_disc(rng, 0.15),
                    random_disc(rng, 0.1),
                ]
            })
            .collect();
        // Eigenvalues must stay well separated at the nodes so structure
        // recovery is unambiguous.
        for &a in &nodes {
            let values: Vec<Complex64> = curves.iter().map(|r| poly_eval(r, a)).collect();
            for i in 0..n {
                for k in (i + 1)..n {
                    if (values[i] - values[k]).norm() < 0.08 {
                        continue 'outer;
                    }
                }
            }
        }
        let f = symmetric_of_curves(&curves);
        let matrices: Vec<ComplexMatrix> = nodes
            .iter()
            .map(|&a| {
                let y: Vec<Complex64> = f.iter().map(|comp| poly_eval(comp, a)).collect();
                let cm = companion_of(&y);
                let s = random_matrix(n, rng, 0.1);
                let e = speclift::mat_exp(&s);
                let e_inv = speclift::mat_exp(&s.scale(c(-1.0, 0.0)));
                e.mul(&cm).unwrap().mul(&e_inv).unwrap()
            })
            .collect();
        return LiftInstance::new(nodes, matrices, f).unwrap();
    }
}

#[test]
fn acceptance_07_witness_soundness() {
    criterion(7, "50 all-cyclic instances: solvable and lift verifies at 1e-7", || {
        let mut rng = ChaCha8Rng::seed_from_u64(107);
        for case in 0..50 {
            let instance = generate_cyclic_instance(&mut rng);
            let verdict = check_global(&instance, BlockReading::Grouped, &cfg())
                .map_err(|e| format!("case {case}: check failed: {e}"))?;
            ensure!(verdict.solvable, "case {case}: reported not solvable");
            let lift = global_cyclic_lift(&instance, &cfg(), 1000 + case as u64)
                .map_err(|e| format!("case {case}: lift failed: {e}"))?;
            let verification = verify_lift(&lift.map, &instance, 200, 1e-7)
                .map_err(|e| format!("case {case}: verify failed: {e}"))?;
            ensure!(
                verification.pass,
                "case {case}: residuals node {:.3e} projection {:.3e} inside {}",
                verification.node_residual,
                verification.projection_residual,
                verification.all_inside
            );
        }
        Ok(())
    });
}

#[test]
fn acceptance_08_negative_control() {
    criterion(8, "(v, v) through the 2x2 zero matrix fails with the expected triple", || {
        let input: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "data", "zero_vv.json"]
            .iter()
            .collect();
        let outcome = cli::execute(&Options {
            command: Command::CheckGlobal,
            input,
            output: None,
            seed: 0,
            tolerances: ToleranceOverrides::default(),
            reading: None,
            samples: 64,
        });
        ensure!(outcome.exit_code == 0, "exit code {}", outcome.exit_code);
        let report = outcome.report.ok_or("missing report")?;
        let payload = &report.payload;
        ensure!(
            payload["solvable"] == serde_json::Value::Bool(false),
            "expected not solvable, payload {payload}"
        );
        let failing = payload["failing"].as_array().ok_or("missing failing triples")?;
        ensure!(!failing.is_empty(), "no failing triple reported");
        let f0 = &failing[0];
        ensure!(f0["node_index"] == 0, "node index {}", f0["node_index"]);
        let ev = f0["eigenvalue"].as_array().ok_or("eigenvalue shape")?;
        let ev_norm = (ev[0].as_f64().unwrap_or(1.0).powi(2)
            + ev[1].as_f64().unwrap_or(1.0).powi(2))
        .sqrt();
        ensure!(ev_norm < 1e-9, "eigenvalue {ev:?} not zero");
        ensure!(f0["k"] == 0, "k = {}", f0["k"]);
        ensure!(f0["required"] == 2, "required = {}", f0["required"]);
        ensure!(f0["observed"] == 1, "observed = {}", f0["observed"]);
        Ok(())
    });
}

#[test]
fn acceptance_09_spray_contract() {
    criterion(9, "spray preserves fibers to 1e-8; derivative matches FD to 1e-6", || {
        let mut rng = ChaCha8Rng::seed_from_u64(109);
        for case in 0..200 {
            let n = rng.gen_range(2..=5);
            let a = random_matrix(n, &mut rng, 0.6);
            let b = random_matrix(n, &mut rng, 0.6);
            let cm = random_matrix(n, &mut rng, 0.6);

            let sprayed = spray(&b, &a).map_err(|e| e.to_string())?;
            let fiber = project(&sprayed).max_abs_diff(&project(&a));
            ensure!(fiber <= 1e-8, "case {case} (n={n}): fiber residual {fiber:.3e}");

            let exact = spray_derivative(&a, &cm).map_err(|e| e.to_string())?;
            let h = 1e-5;
            let plus = spray(&cm.scale(c(h, 0.0)), &a).map_err(|e| e.to_string())?;
            let minus = spray(&cm.scale(c(-h, 0.0)), &a).map_err(|e| e.to_string())?;
            let fd = plus
                .sub(&minus)
                .unwrap()
                .scale(c(1.0 / (2.0 * h), 0.0));
            let denom = exact.norm_inf().max(1e-6);
            let rel = fd.sub(&exact).unwrap().norm_inf() / denom;
            ensure!(rel <= 1e-6, "case {case} (n={n}): derivative error {rel:.3e}");
            let comm = commutator(&cm, &a).unwrap();
            ensure!(
                exact.sub(&comm).unwrap().norm_inf() == 0.0,
                "case {case}: derivative is not the commutator"
            );
        }
        Ok(())
    });
}

#[test]
fn acceptance_10_connectedness_construction() {
    criterion(10, "shear paths connect 100 similar pairs within fiber tolerances", || {
        let mut rng = ChaCha8Rng::seed_from_u64(110);
        for case in 0..100 {
            let n = rng.gen_range(2..=4);
            // Random structure with one or two eigenvalues.
            let distinct = rng.gen_range(1..=2.min(n));
            let first = c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
            let mut layout = Vec::new();
            if distinct == 1 {
                let parts = partitions(n);
                layout.push((first, parts[rng.gen_range(0..parts.len())].clone()));
            } else {
                let n1 = rng.gen_range(1..n);
                let p1 = partitions(n1);
                let p2 = partitions(n - n1);
                let second = loop {
                    let e = c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
                    if (e - first).norm() > 0.3 {
                        break e;
                    }
                };
                layout.push((first, p1[rng.gen_range(0..p1.len())].clone()));
                layout.push((second, p2[rng.gen_range(0..p2.len())].clone()));
            }
            let model = speclift::JordanStructure::from_parts(&layout)
                .unwrap()
                .model_matrix();
            let b = conjugate(&model, &conditioned_matrix(n, &mut rng, 10.0));
            let target = conjugate(&model, &conditioned_matrix(n, &mut rng, 10.0));

            let path = connect_similar(&b, &target, &cfg(), 2000 + case as u64)
                .map_err(|e| format!("case {case} layout {layout:?}: {e}"))?;
            let endpoint = path.endpoint(&b).map_err(|e| e.to_string())?;
            let res = endpoint.sub(&target).unwrap().norm_inf();
            ensure!(res <= 1e-8, "case {case}: endpoint residual {res:.3e}");
            ensure!(
                path.len() <= n * n + 4 * n,
                "case {case}: {} factors exceeds bound",
                path.len()
            );

            for factor in path.factors() {
                let mut power = factor.clone();
                for _ in 1..n {
                    power = power.mul(factor).unwrap();
                }
                ensure!(
                    power.entries().iter().all(|z| z.norm() == 0.0),
                    "case {case}: factor not exactly nilpotent"
                );
            }

            let y0 = project(&b);
            for sample in 0..5 {
                let ts: Vec<f64> = (0..path.len())
                    .map(|i| (((case + sample) * 13 + i * 7) % 11) as f64 / 10.0)
                    .collect();
                let point = path.conjugate_at(&b, &ts).map_err(|e| e.to_string())?;
                let fiber = project(&point).max_abs_diff(&y0);
                ensure!(
                    fiber <= 1e-7,
                    "case {case} sample {sample}: fiber residual {fiber:.3e}"
                );
            }
        }
        Ok(())
    });
}

#[test]
fn acceptance_11_cli_determinism() {
    criterion(11, "every command is byte-identical across reruns at fixed seed", || {
        let data_dir: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "data"].iter().collect();
        let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;

        // Produce a lifting payload for the verify command.
        let lift_opts = Options {
            command: Command::Lift,
            input: data_dir.join("two_node_cyclic.json"),
            output: None,
            seed: 7,
            tolerances: ToleranceOverrides::default(),
            reading: None,
            samples: 100,
        };
        let lift_outcome = cli::execute(&lift_opts);
        ensure!(lift_outcome.exit_code == 0, "lift exit {}", lift_outcome.exit_code);
        let lift_path = tmp.path().join("lift.json");
        cli::write_output(
            &lift_path,
            &cli::report_json(&lift_outcome.report.ok_or("missing lift report")?),
        )
        .map_err(|e| e.to_string())?;

        let runs: Vec<(&str, Options)> = vec![
            (
                "project",
                Options {
                    command: Command::Project,
                    input: data_dir.join("jordan_mix.json"),
                    output: None,
                    seed: 7,
                    tolerances: ToleranceOverrides::default(),
                    reading: None,
                    samples: 100,
                },
            ),
            (
                "membership",
                Options {
                    command: Command::Membership,
                    input: data_dir.join("jordan_mix.json"),
                    output: None,
                    seed: 7,
                    tolerances: ToleranceOverrides::default(),
                    reading: None,
                    samples: 100,
                },
            ),
            (
                "jordan",
                Options {
                    command: Command::Jordan { matrix: 0 },
                    input: data_dir.join("jordan_mix.json"),
                    output: None,
                    seed: 7,
                    tolerances: ToleranceOverrides::default(),
                    reading: None,
                    samples: 100,
                },
            ),
            (
                "dseq",
                Options {
                    command: Command::Dseq { matrix: 0 },
                    input: data_dir.join("jordan_mix.json"),
                    output: None,
                    seed: 7,
                    tolerances: ToleranceOverrides::default(),
                    reading: None,
                    samples: 100,
                },
            ),
            (
                "check-local",
                Options {
                    command: Command::CheckLocal { node: 0 },
                    input: data_dir.join("two_node_cyclic.json"),
                    output: None,
                    seed: 7,
                    tolerances: ToleranceOverrides::default(),
                    reading: None,
                    samples: 100,
                },
            ),
            (
                "check-global",
                Options {
                    command: Command::CheckGlobal,
                    input: data_dir.join("two_node_cyclic.json"),
                    output: None,
                    seed: 7,
                    tolerances: ToleranceOverrides::default(),
                    reading: None,
                    samples: 100,
                },
            ),
            (
                "check-global-negative",
                Options {
                    command: Command::CheckGlobal,
                    input: data_dir.join("zero_vv.json"),
                    output: None,
                    seed: 7,
                    tolerances: ToleranceOverrides::default(),
                    reading: None,
                    samples: 100,
                },
            ),
            ("lift", lift_opts.clone()),
            (
                "connect",
                Options {
                    command: Command::Connect { i: 0, j: 1 },
                    input: data_dir.join("connect_pair.json"),
                    output: None,
                    seed: 7,
                    tolerances: ToleranceOverrides::default(),
                    reading: None,
                    samples: 100,
                },
            ),
            (
                "verify",
                Options {
                    command: Command::Verify {
                        lifting: lift_path.clone(),
                    },
                    input: data_dir.join("two_node_cyclic.json"),
                    output: None,
                    seed: 7,
                    tolerances: ToleranceOverrides::default(),
                    reading: None,
                    samples: 100,
                },
            ),
        ];

        for (name, opts) in runs {
            let a = cli::execute(&opts);
            let b = cli::execute(&opts);
            ensure!(
                a.exit_code == 0 && b.exit_code == 0,
                "{name}: exit codes {} / {}",
                a.exit_code,
                b.exit_code
            );
            let pa = serde_json::to_string(&a.report.ok_or("missing report")?.payload)
                .map_err(|e| e.to_string())?;
            let pb = serde_json::to_string(&b.report.ok_or("missing report")?.payload)
                .map_err(|e| e.to_string())?;
            ensure!(pa == pb, "{name}: payloads differ");
        }
        Ok(())
    });
}
