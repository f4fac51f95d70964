//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

mod common;

use std::f64::consts::FRAC_1_SQRT_2;
use std::time::{Duration, Instant};

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pqpcp::cli::{main_with_args, EXIT_OK};
use pqpcp::encoding::{encode_state, mixed_answer_pass_probability, EncodingLayout, QUDIT_DIM};
use pqpcp::game::{
    accept_probability, game_value, injective_tuples, outcome_stats, AcceptMode, CrespGame, CrespStrategy,
};
use pqpcp::hamiltonian::Verdict;
use pqpcp::io::{slh_to_doc, to_json};
use pqpcp::linalg::{partial_trace, random, reduced_state, trace_of_product, HilbertShape, QState};
use pqpcp::slh::{Assignment, SlhInstance};
use pqpcp::Limits;

use common::*;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:?}, limit {limit:?}"))
}

fn limits() -> Limits {
    Limits::default()
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `E_q|b⟩` written out from the layout definition: GHZ-like on `S_q`, `|0⟩`
/// on every other prover's qudit.
fn isometry_column(layout: &EncodingLayout, q: usize, bit: usize) -> DVector<Complex64> {
    let p = layout.provers();
    let dim = QUDIT_DIM.pow(p as u32);
    let members: Vec<usize> = (0..p).filter(|&x| (q + 1) >> x & 1 == 1).collect();
    let mut v = DVector::zeros(dim);
    for level in [2 * bit, 2 * bit + 1] {
        let idx = (0..p).fold(0, |acc, x| {
            acc * QUDIT_DIM + if members.contains(&x) { level } else { 0 }
        });
        v[idx] = c(FRAC_1_SQRT_2);
    }
    v
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let tol = 1e-10;
    let mut checked = 0;
    for n in [1, 2, 3, 7] {
        let layout = EncodingLayout::new(n).map_err(|e| e.to_string())?;
        for q in 0..n {
            let iso = layout.isometry(q).map_err(|e| e.to_string())?;
            let e = iso.matrix();
            for bit in 0..2 {
                let dev = (e.column(bit) - isometry_column(&layout, q, bit)).norm();
                ensure(dev < tol, || format!("n={n} q={q}: column {bit} off by {dev:e}"))?;
            }
            let gram = e.adjoint() * e - nalgebra::DMatrix::identity(2, 2);
            ensure(gram.norm() < tol, || {
                format!("n={n} q={q}: E†E - I = {:e}", gram.norm())
            })?;

            let pi = layout.projector(q).map_err(|e| e.to_string())?;
            let pm = pi.matrix();
            let idem = (pm * pm - pm).norm();
            let herm = (pm.adjoint() - pm).norm();
            let rank = pm.trace().re;
            ensure(idem < tol && herm < tol && (rank - 2.0).abs() < tol, || {
                format!("n={n} q={q}: projector idempotence {idem:e}, hermiticity {herm:e}, trace {rank}")
            })?;
            let k = layout.block_check(q).map_err(|e| e.to_string())?;
            let fixed = (k.matrix() * e - e).norm();
            ensure(fixed < tol, || {
                format!("n={n} q={q}: Π does not fix the code ({fixed:e})")
            })?;
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!(
        "{checked} blocks over n in {{1,2,3,7}}, tol 1e-10, {elapsed:.2?}"
    ))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let layout = EncodingLayout::new(3).map_err(|e| e.to_string())?;
    let shape = HilbertShape::qubits(3, &limits()).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    let mut cases = 0;
    for _ in 0..25 {
        let phi = random::state(&shape, &mut rng);
        let (enc, map) = encode_state(&layout, &phi, &[0, 1, 2], &limits()).map_err(|e| e.to_string())?;
        for req in 0..3 {
            for (ans, block_map) in map.iter().enumerate() {
                if req == ans {
                    continue;
                }
                let block = reduced_state(&enc, block_map).map_err(|e| e.to_string())?;
                let check = layout.block_check(req).map_err(|e| e.to_string())?;
                let dense = trace_of_product(check.matrix(), block.matrix()).re;

                let shared: Vec<usize> = layout
                    .subset(req)
                    .unwrap()
                    .iter()
                    .filter(|p| layout.subset(ans).unwrap().contains(p))
                    .copied()
                    .collect();
                let overlap = if shared.is_empty() {
                    1.0
                } else {
                    let sigma = partial_trace(&block, &shared).map_err(|e| e.to_string())?;
                    sigma.matrix()[(0, 0)].re
                };
                let closed = mixed_answer_pass_probability(&layout, req, ans, overlap).map_err(|e| e.to_string())?;
                let dev = (closed - dense).abs();
                worst = worst.max(dev);
                ensure(dev <= 1e-10, || {
                    format!("(req {req}, ans {ans}): closed {closed} vs dense {dense}")
                })?;
                ensure(closed <= 0.5 + 1e-12, || {
                    format!("(req {req}, ans {ans}): {closed} > 1/2")
                })?;
                if layout.is_proper_subset(req, ans) {
                    ensure(closed == 0.5, || {
                        format!("(req {req}, ans {ans}): subset case gave {closed}")
                    })?;
                }
                cases += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(5))?;
    Ok(format!(
        "{cases} cases, worst deviation {worst:.1e} (tol 1e-10), {elapsed:.2?}"
    ))
}

fn criterion_3(dense_cases: &mut Vec<(CrespGame, CrespStrategy)>) -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for seed in 0..10 {
        let slh = corpus_instance(100 + seed, 3, 3, 2, 2);
        let game = CrespGame::new(slh.clone()).map_err(|e| e.to_string())?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = Assignment((0..slh.m()).map(|_| rng.random_range(0..slh.l())).collect());
        let h = hamiltonian_oracle(&slh, &f);
        let eig = h.clone().symmetric_eigen();
        let j = eig.eigenvalues.imin();
        let psi = eig.eigenvectors.column(j).into_owned();
        let shape = HilbertShape::qubits(slh.n(), &limits()).map_err(|e| e.to_string())?;
        let phi = QState::normalized(shape, psi.clone()).map_err(|e| e.to_string())?;
        let s = CrespStrategy::honest(&game, f, phi).map_err(|e| e.to_string())?;
        let got = accept_probability(&game, &s).map_err(|e| e.to_string())?;
        let want = 1.0 - expectation(&h, &psi) / (2.0 * slh.m() as f64);
        let dev = (got - want).abs();
        worst = worst.max(dev);
        ensure(dev <= 1e-9, || format!("seed {seed}: {got} vs {want}"))?;
        dense_cases.push((game, s));
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(10))?;
    Ok(format!(
        "10 instances, worst deviation {worst:.1e} (tol 1e-9), {elapsed:.2?}"
    ))
}

fn value_corpus() -> Vec<SlhInstance> {
    (0..10).map(|seed| corpus_instance(200 + seed, 3, 2, 2, 2)).collect()
}

fn criterion_4(corpus: &[SlhInstance]) -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let (mut yes, mut no) = (0, 0);
    for (t, slh) in corpus.iter().enumerate() {
        let game = CrespGame::new(slh.clone()).map_err(|e| e.to_string())?;
        let (value, best) = game_value(&game, &limits()).map_err(|e| e.to_string())?;
        let emin = emin_oracle(slh);
        let m = slh.m() as f64;
        let want = 1.0 - emin / (2.0 * m);
        let dev = (value - want).abs();
        worst = worst.max(dev);
        ensure(dev <= 1e-9, || {
            format!("instance {t}: value {value} vs 1 - E_min/(2m) = {want}")
        })?;
        let replay = accept_probability(&game, &best).map_err(|e| e.to_string())?;
        ensure((replay - value).abs() <= 1e-9, || {
            format!("instance {t}: best strategy replays to {replay}")
        })?;

        let (a, b) = slh.thresholds();
        let (alpha, beta) = game.thresholds();
        match Verdict::from_low(emin, a * m, b * m, 1e-9) {
            Verdict::Yes => {
                yes += 1;
                ensure(value >= alpha - 1e-9, || {
                    format!("instance {t}: YES but value {value} < {alpha}")
                })?;
            }
            Verdict::No => {
                no += 1;
                ensure(value <= beta + 1e-9, || {
                    format!("instance {t}: NO but value {value} > {beta}")
                })?;
            }
            _ => {}
        }
    }
    ensure(yes > 0 && no > 0, || {
        format!("corpus has {yes} YES and {no} NO instances")
    })?;
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(120))?;
    Ok(format!(
        "10 instances ({yes} YES, {no} NO), worst deviation {worst:.1e} (tol 1e-9), {elapsed:.2?}"
    ))
}

fn criterion_5(corpus: &[SlhInstance], dense_cases: &mut Vec<(CrespGame, CrespStrategy)>) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let mut substitutions = 0;
    let mut closest = f64::INFINITY;
    for (t, slh) in corpus.iter().enumerate() {
        let game = CrespGame::new(slh.clone()).map_err(|e| e.to_string())?;
        let shape = HilbertShape::qubits(slh.n(), &limits()).map_err(|e| e.to_string())?;
        let tuples = injective_tuples(game.n(), game.k());
        let count = (slh.l() as u128).pow(slh.m() as u32);
        for idx in 0..count {
            let f = Assignment::from_index(idx, slh.m(), slh.l());
            let h = hamiltonian_oracle(slh, &f);
            let eig = h.symmetric_eigen();
            let ground = eig.eigenvectors.column(eig.eigenvalues.imin()).into_owned();
            let states = [
                QState::normalized(shape.clone(), ground).map_err(|e| e.to_string())?,
                random::state(&shape, &mut rng),
            ];
            for phi in states {
                let honest = CrespStrategy::honest(&game, f.clone(), phi).map_err(|e| e.to_string())?;
                let base = accept_probability(&game, &honest).map_err(|e| e.to_string())?;
                for i in 0..slh.m() {
                    for tuple in &tuples {
                        if *tuple == honest.answers[i] {
                            continue;
                        }
                        let mut cheat = honest.clone();
                        cheat.answers[i] = tuple.clone();
                        let p = accept_probability(&game, &cheat).map_err(|e| e.to_string())?;
                        closest = closest.min(base - p);
                        ensure(p <= base + 1e-12, || {
                            format!(
                                "instance {t}, f={:?}, question {i}, answer {tuple:?}: {p} > {base}",
                                f.0
                            )
                        })?;
                        if substitutions % 7 == 0 {
                            dense_cases.push((game.clone(), cheat));
                        }
                        substitutions += 1;
                    }
                }
            }
        }
    }
    Ok(format!(
        "{substitutions} substitutions, smallest margin {closest:.1e} (slack 1e-12)"
    ))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for seed in 0..20u64 {
        let slh = corpus_instance(300 + seed, 3, 2, 2, 2);
        let input = dir.path().join(format!("slh{seed}.json"));
        let report = dir.path().join(format!("report{seed}.json"));
        std::fs::write(&input, to_json(&slh_to_doc(&slh)).unwrap()).map_err(|e| e.to_string())?;
        let argv: Vec<String> = [
            "qpcp",
            "check",
            input.to_str().unwrap(),
            "--seed",
            &seed.to_string(),
            "--out",
            report.to_str().unwrap(),
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        let code = main_with_args(argv);
        let text = std::fs::read_to_string(&report).unwrap_or_default();
        ensure(code == EXIT_OK, || format!("seed {seed}: exit {code}\n{text}"))?;
        let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
        let checks = v["checks"].as_array().cloned().unwrap_or_default();
        for name in [
            "acceptance = 1 - energy/m",
            "translated proof acceptance = game acceptance",
            "verdicts agree",
        ] {
            ensure(
                checks.iter().any(|c| c["name"] == name && c["status"] == "pass"),
                || format!("seed {seed}: check '{name}' missing or not passing"),
            )?;
        }
        let tol = |name: &str| {
            checks
                .iter()
                .find(|c| c["name"] == name)
                .and_then(|c| c["tolerance"].as_f64())
        };
        ensure(tol("acceptance = 1 - energy/m") == Some(1e-12), || {
            "bijection tolerance is not 1e-12".into()
        })?;
        ensure(
            tol("translated proof acceptance = game acceptance") == Some(1e-9),
            || "translation tolerance is not 1e-9".into(),
        )?;
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(300))?;
    Ok(format!(
        "20 instances, every identity and verdict agreed, {elapsed:.2?}"
    ))
}

fn criterion_7(cases: &[(CrespGame, CrespStrategy)]) -> Outcome {
    ensure(!cases.is_empty(), || "no configurations recorded".into())?;
    let mut worst = 0.0f64;
    for (t, (game, s)) in cases.iter().enumerate() {
        let x = outcome_stats(game, s, AcceptMode::Structured, &limits()).map_err(|e| e.to_string())?;
        let y = outcome_stats(game, s, AcceptMode::DenseOracle, &limits()).map_err(|e| e.to_string())?;
        for (qx, qy) in x.questions.iter().zip(&y.questions) {
            worst = worst
                .max((qx.pass_t1 - qy.pass_t1).abs())
                .max((qx.accept - qy.accept).abs());
        }
        worst = worst.max((x.value - y.value).abs());
        ensure(worst <= 1e-9, || {
            format!("case {t}: structured {} vs dense {}", x.value, y.value)
        })?;
        if s.is_honest(game) {
            ensure(y.questions.iter().all(|q| (q.pass_t1 - 1.0).abs() < 1e-10), || {
                format!("case {t}: honest strategy failed the codespace test")
            })?;
        }
    }
    Ok(format!(
        "{} strategies, worst deviation {worst:.1e} (tol 1e-9)",
        cases.len()
    ))
}

fn criterion_8() -> Outcome {
    let mut worst = 0.0f64;
    for seed in 0..10 {
        let slh = corpus_instance(400 + seed, 3, 3, 1, 2);
        if slh.l() != 1 {
            return Err(format!("seed {seed}: corpus produced l={}", slh.l()));
        }
        let f = Assignment(vec![0; slh.m()]);
        let direct = min_eigenvalue(&hamiltonian_oracle(&slh, &f));
        let sol = slh.solve_exact(&limits()).map_err(|e| e.to_string())?;
        let lh = slh.select(&f).map_err(|e| e.to_string())?;
        let (lh_energy, _) = lh.groundstate_energy(&limits()).map_err(|e| e.to_string())?;
        let dev = (sol.energy - direct).abs().max((lh_energy - direct).abs());
        worst = worst.max(dev);
        ensure(dev <= 1e-10, || {
            format!("seed {seed}: {} / {lh_energy} vs {direct}", sol.energy)
        })?;
    }
    Ok(format!("10 instances, worst deviation {worst:.1e} (tol 1e-10)"))
}

fn main() {
    let mut dense_cases = Vec::new();
    let corpus = value_corpus();
    let results: Vec<(&str, Outcome)> = vec![
        ("1 encoding algebra", criterion_1()),
        ("2 mixed-answer projection exactness", criterion_2()),
        ("3 completeness formula", criterion_3(&mut dense_cases)),
        ("4 value identity and soundness", criterion_4(&corpus)),
        ("5 hybrid monotonicity", criterion_5(&corpus, &mut dense_cases)),
        ("6 reduction chain", criterion_6()),
        ("7 dense oracle cross-check", criterion_7(&dense_cases)),
        ("8 degeneration to local Hamiltonian", criterion_8()),
    ];
    let mut failed = 0;
    for (name, r) in &results {
        match r {
            Ok(msg) => println!("PASS criterion {name}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name}: {msg}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
