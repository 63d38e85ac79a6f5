//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with the measured margins (visible with `--nocapture`).
//!
//! Run with `cargo test --test acceptance` (add `--release` or rely on the
//! optimized test profile for the optimizer-heavy criteria).

use std::process::Command;
use std::time::Instant;

use entcost::channels::{eb_certify, trace_out_map, EbMethod, EbVerdict, ProductTerm};
use entcost::ef::{additivity_gap, ef_upper_bound, OptimizerConfig};
use entcost::measures::{constant_entanglement_check, ec_bell_mix, ef_two_qubit, ssa_check};
use entcost::qmat::{CMat, DimSplit, Subsystem};
use entcost::states::{
    bell_mix, random_density, random_pure, subspace_basis, BellMixParam, DensityMatrix,
};
use num_complex::Complex64;
use serde_json::Value;

fn cli(args: &[&str]) -> (String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_entcost"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        String::from_utf8(out.stdout).expect("utf-8 output"),
        out.status.code().unwrap_or(-1),
    )
}

fn h2(x: f64) -> f64 {
    let term = |t: f64| if t > 0.0 { -t * t.log2() } else { 0.0 };
    term(x) + term(1.0 - x)
}

type BellRow = (f64, f64, f64, f64, f64);

fn bell_table(grid: usize) -> (Vec<BellRow>, f64) {
    let started = Instant::now();
    let (stdout, code) = cli(&["bell-mix", "--grid", &grid.to_string()]);
    let elapsed = started.elapsed().as_secs_f64();
    assert_eq!(code, 0);
    let doc: Value = serde_json::from_str(&stdout).expect("valid report JSON");
    let rows = doc["outputs"]["table"].as_array().expect("table");
    assert_eq!(rows.len(), grid);
    let table = rows
        .iter()
        .map(|row| {
            (
                row["p"].as_f64().unwrap(),
                row["ec"].as_f64().unwrap(),
                row["ed"].as_f64().unwrap(),
                row["ef"].as_f64().unwrap(),
                row["gap"].as_f64().unwrap(),
            )
        })
        .collect();
    (table, elapsed)
}

#[test]
fn acceptance_1_cost_formula_on_grid() {
    let (table, elapsed) = bell_table(101);
    let mut worst_formula: f64 = 0.0;
    let mut worst_wootters: f64 = 0.0;
    for &(p, ec, _, ef, _) in &table {
        let formula = h2(0.5 + (p * (1.0 - p)).sqrt());
        worst_formula = worst_formula.max((ec - formula).abs());
        worst_wootters = worst_wootters.max((ec - ef).abs());
    }
    assert!(
        worst_formula <= 1e-9,
        "cost column deviates from the closed formula by {worst_formula:.3e}"
    );
    assert!(
        worst_wootters <= 1e-9,
        "cost and two-qubit formation disagree by {worst_wootters:.3e}"
    );
    assert!(elapsed < 1.0, "run took {elapsed:.2} s");
    println!(
        "acceptance 1 (cost formula on 101-point grid): PASS \
         (formula dev {worst_formula:.2e}, closed-form dev {worst_wootters:.2e}, {elapsed:.2} s)"
    );
}

#[test]
fn acceptance_2_irreversibility_gap() {
    let started = Instant::now();
    let mut min_interior = f64::INFINITY;
    let mut min_margin = f64::INFINITY;
    for i in 0..=100 {
        let p = 0.5 * i as f64 / 100.0;
        let param = BellMixParam::new(p).unwrap();
        let gap = ec_bell_mix(param).value() - entcost::measures::ed_hashing(param).value();
        if i > 0 && i < 100 {
            min_interior = min_interior.min(gap);
        }
        if (0.01..=0.49).contains(&p) {
            min_margin = min_margin.min(gap);
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    assert!(
        min_interior > 0.0,
        "gap must be positive at every interior point, min {min_interior:.3e}"
    );
    assert!(
        min_margin > 1e-6,
        "gap margin on [0.01, 0.49] is only {min_margin:.3e}"
    );
    assert!(elapsed < 1.0, "run took {elapsed:.2} s");
    println!(
        "acceptance 2 (distillation strictly below cost): PASS \
         (min interior gap {min_interior:.2e}, min margin {min_margin:.2e}, {elapsed:.2} s)"
    );
}

fn spectrum_matches(got: &[f64], want: &[f64], tol: f64) -> f64 {
    assert_eq!(got.len(), want.len(), "spectrum sizes differ");
    let dev = got
        .iter()
        .zip(want)
        .map(|(g, w)| (g - w).abs())
        .fold(0.0, f64::max);
    assert!(dev <= tol, "spectrum {got:?} vs {want:?} (dev {dev:.3e})");
    dev
}

#[test]
fn acceptance_3_antisymmetric_subspace() {
    let started = Instant::now();
    let basis = subspace_basis(2).unwrap();
    let check = constant_entanglement_check(&basis, 64, 0).unwrap();
    assert!(check.is_constant);
    let dev = spectrum_matches(&check.spectrum, &[0.0, 0.5, 0.5], 1e-9);
    assert!((check.value.value() - 1.0).abs() <= 1e-9);

    let cert = eb_certify(&trace_out_map(&basis).unwrap()).unwrap();
    assert_eq!(cert.verdict, EbVerdict::NotBreaking);
    assert!(
        cert.min_pt_eig < -1e-3,
        "refuting eigenvalue {:.3e} is not negative enough",
        cert.min_pt_eig
    );
    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 1.0, "run took {elapsed:.2} s");
    println!(
        "acceptance 3 (antisymmetric subspace): PASS \
         (spectrum dev {dev:.2e}, PT eigenvalue {:.3}, {elapsed:.2} s)",
        cert.min_pt_eig
    );
}

#[test]
fn acceptance_4_qubit_qutrit_subspace() {
    let started = Instant::now();
    let basis = subspace_basis(3).unwrap();
    let check = constant_entanglement_check(&basis, 64, 0).unwrap();
    assert!(check.is_constant);
    let dev = spectrum_matches(&check.spectrum, &[1.0 / 3.0, 2.0 / 3.0], 1e-9);
    assert!((check.value.value() - 0.918296).abs() <= 1e-5);

    let channel = trace_out_map(&basis).unwrap();
    let cert = eb_certify(&channel).unwrap();
    assert_eq!(cert.verdict, EbVerdict::Breaking);
    assert_eq!(cert.method, Some(EbMethod::Ppt2x2));

    let choi = channel.choi().unwrap();
    let pt = choi
        .mat()
        .partial_transpose(choi.split(), Subsystem::B)
        .unwrap();
    let pt_spectrum = pt.eig_hermitian().unwrap().values;
    let pt_dev = spectrum_matches(&pt_spectrum, &[1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0, 0.5], 1e-9);
    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 1.0, "run took {elapsed:.2} s");
    println!(
        "acceptance 4 (qubit-qutrit subspace): PASS \
         (spectrum dev {dev:.2e}, PT spectrum dev {pt_dev:.2e}, {elapsed:.2} s)"
    );
}

#[test]
fn acceptance_5_three_by_six_subspace() {
    let started = Instant::now();
    let basis = subspace_basis(4).unwrap();
    let check = constant_entanglement_check(&basis, 64, 0).unwrap();
    assert!(check.is_constant);
    let dev = spectrum_matches(&check.spectrum, &[0.25, 0.25, 0.5], 1e-9);
    assert!((check.value.value() - 1.5).abs() <= 1e-9);

    let channel = trace_out_map(&basis).unwrap();
    let choi = channel.choi().unwrap();
    let target = entcost::channels::symmetric_projector(3).scale(Complex64::new(1.0 / 6.0, 0.0));
    let choi_dev = choi.mat().max_abs_diff(&target);
    assert!(
        choi_dev <= 1e-8,
        "Choi deviates from P+/6 by {choi_dev:.3e}"
    );

    let cert = eb_certify(&channel).unwrap();
    assert_eq!(cert.verdict, EbVerdict::Breaking);
    assert_eq!(cert.method, Some(EbMethod::DesignDecomposition));
    let ensemble = cert.ensemble.as_ref().expect("constructive ensemble");
    assert_eq!(ensemble.len(), 12);
    let rebuilt_dev = ProductTerm::assemble(ensemble).max_abs_diff(choi.mat());
    assert!(
        rebuilt_dev <= 1e-10,
        "design ensemble misses the Choi by {rebuilt_dev:.3e}"
    );
    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 1.0, "run took {elapsed:.2} s");
    println!(
        "acceptance 5 (3x6 subspace): PASS \
         (spectrum dev {dev:.2e}, Choi dev {choi_dev:.2e}, ensemble dev {rebuilt_dev:.2e}, {elapsed:.2} s)"
    );
}

#[test]
fn acceptance_6_variational_oracle_equivalence() {
    let started = Instant::now();
    let split = DimSplit::new(2, 2).unwrap();
    let total = 50;
    let mut within = 0;
    let mut sound = 0;
    let mut worst = f64::NEG_INFINITY;
    for idx in 0..total {
        let rank = 2 + (idx % 3);
        let rho = random_density(split, rank, 10_000 + idx as u64).unwrap();
        let cfg = OptimizerConfig {
            restarts: 20,
            seed: idx as u64,
            ..OptimizerConfig::default()
        };
        let found = ef_upper_bound(&rho, &cfg).unwrap().value.value();
        let exact = ef_two_qubit(&rho).unwrap().value();
        let diff = found - exact;
        worst = worst.max(diff);
        if diff >= -1e-6 {
            sound += 1;
        }
        if (-1e-6..=5e-3).contains(&diff) {
            within += 1;
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    assert_eq!(sound, total, "upper bound dipped below the closed form");
    assert!(within >= 48, "only {within}/{total} runs within 5e-3");
    assert!(elapsed < 300.0, "run took {elapsed:.1} s");
    println!(
        "acceptance 6 (variational bound vs closed form, {total} states): PASS \
         (within tolerance {within}/{total}, sound {sound}/{total}, worst diff {worst:.2e}, {elapsed:.1} s)"
    );
}

#[test]
fn acceptance_7_additivity_at_desk_scale() {
    let started = Instant::now();
    let weights = [0.1, 0.25, 0.4];
    let mut worst_abs: f64 = 0.0;
    for &p in &weights {
        for &q in &weights {
            let rho = bell_mix(BellMixParam::new(p).unwrap());
            let sigma = bell_mix(BellMixParam::new(q).unwrap());
            let cfg = OptimizerConfig {
                seed: 1,
                ..OptimizerConfig::default()
            };
            let (gap, _) = additivity_gap(&rho, &sigma, &cfg).unwrap();
            assert!(
                (-1e-6..=1e-2).contains(&gap),
                "(p, q) = ({p}, {q}): gap {gap:.3e} outside [-1e-6, 1e-2]"
            );
            worst_abs = worst_abs.max(gap.abs());
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 900.0, "run took {elapsed:.1} s");
    println!(
        "acceptance 7 (pairwise additivity, 9 Bell-mixture pairs): PASS \
         (worst |gap| {worst_abs:.2e}, {elapsed:.1} s)"
    );
}

#[test]
fn acceptance_8_strong_subadditivity_sweep() {
    let started = Instant::now();
    let mut min_value = f64::INFINITY;
    for seed in 0..200u64 {
        let psi = random_pure(DimSplit::new(2, 4).unwrap(), 50_000 + seed);
        let v = ssa_check(psi.vec(), (2, 2, 2)).unwrap();
        min_value = min_value.min(v);
    }
    for seed in 0..100u64 {
        let psi = random_pure(DimSplit::new(3, 9).unwrap(), 60_000 + seed);
        let v = ssa_check(psi.vec(), (3, 3, 3)).unwrap();
        min_value = min_value.min(v);
    }
    let elapsed = started.elapsed().as_secs_f64();
    assert!(
        min_value >= -1e-9,
        "strong subadditivity violated: {min_value:.3e}"
    );
    assert!(elapsed < 10.0, "run took {elapsed:.1} s");
    println!(
        "acceptance 8 (strong subadditivity, 300 random states): PASS \
         (min value {min_value:.2e}, {elapsed:.1} s)"
    );
}

#[test]
fn acceptance_9_cli_determinism() {
    let started = Instant::now();
    let dir = std::env::temp_dir().join("entcost-acceptance");
    std::fs::create_dir_all(&dir).unwrap();
    let state_path = dir.join("bell-mix-0.25.json");
    let rho = bell_mix(BellMixParam::new(0.25).unwrap());
    std::fs::write(&state_path, serde_json::to_string(&rho.to_json()).unwrap()).unwrap();
    let state_arg = state_path.to_str().unwrap();

    let invocations: Vec<Vec<&str>> = vec![
        vec!["bell-mix", "--grid", "11", "--seed", "3"],
        vec!["example", "--id", "3", "--seed", "3"],
        vec![
            "ef",
            "--input",
            state_arg,
            "--restarts",
            "2",
            "--max-iters",
            "60",
            "--seed",
            "3",
        ],
        vec![
            "additivity",
            "--p",
            "0.1",
            "--q",
            "0.25",
            "--restarts",
            "2",
            "--max-iters",
            "60",
            "--seed",
            "3",
        ],
        vec!["eb-check", "--example", "4", "--seed", "3"],
    ];
    for args in &invocations {
        let (first, code_a) = cli(args);
        let (second, code_b) = cli(args);
        assert_eq!(code_a, code_b, "{args:?}: exit codes differ");
        assert_eq!(first, second, "{args:?}: reruns differ");
        assert!(!first.is_empty());
    }
    let elapsed = started.elapsed().as_secs_f64();
    println!(
        "acceptance 9 (byte-identical CLI reruns, {} commands): PASS ({elapsed:.1} s)",
        invocations.len()
    );
}

/// Every tested pair keeps the additivity gap above the feasibility floor.
#[test]
fn acceptance_7b_gap_soundness_floor() {
    let rho = bell_mix(BellMixParam::new(0.25).unwrap());
    let phi = DensityMatrix::new(
        entcost::states::bell_state(entcost::states::BellKind::PhiPlus).projector(),
        DimSplit::new(2, 2).unwrap(),
    )
    .unwrap();
    let cfg = OptimizerConfig {
        restarts: 4,
        max_iters: 150,
        seed: 11,
        ..OptimizerConfig::default()
    };
    let (gap, _) = additivity_gap(&rho, &phi, &cfg).unwrap();
    assert!(gap >= -1e-6, "gap {gap:.3e} below the feasibility floor");
    println!("acceptance 7b (mixed x pure pair soundness): PASS (gap {gap:.2e})");
}

/// The reference subspaces load bit-identically and stay orthonormal at
/// the strictest tolerance; background check for the other criteria.
#[test]
fn acceptance_0_reference_bases_sanity() {
    for id in 1..=4u8 {
        let basis = subspace_basis(id).unwrap();
        for i in 0..basis.len() {
            for j in 0..basis.len() {
                let overlap = basis.vector(i).inner(basis.vector(j));
                let want = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (overlap - Complex64::new(want, 0.0)).norm() < 1e-12,
                    "basis {id}: <{i}|{j}> = {overlap}"
                );
            }
        }
    }
    // The trace-out channels stay trace preserving after a round trip
    // through their Choi states.
    for id in 1..=4u8 {
        let ch = trace_out_map(&subspace_basis(id).unwrap()).unwrap();
        let re = entcost::channels::QuantumChannel::from_choi(&ch.choi().unwrap()).unwrap();
        let x = CMat::identity(ch.din());
        let dev = ch.apply(&x).unwrap().max_abs_diff(&re.apply(&x).unwrap());
        assert!(
            dev < 1e-9,
            "subspace {id}: round trip deviates by {dev:.3e}"
        );
    }
    println!("acceptance 0 (reference bases and channels sanity): PASS");
}
