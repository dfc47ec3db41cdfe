//! Acceptance gate: ten numbered criteria covering estimator correctness,
//! variational bounds, failure-mode reproduction, forecast calibration, and
//! artifact determinism. Each test prints exactly one pass line on success;
//! a failure panics with the criterion number and the offending values.

use std::collections::BTreeMap;
use std::process::Command;
use std::time::Instant;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

use uvqnhe_core::analysis::{
    coupon_collector_expected_shots, coupon_collector_mean_draws, divergence_witnesses,
    empirical_error_variance, variance_model,
};
use uvqnhe_core::ansatz::{build_hea, initial_parameters, AnsatzSpec};
use uvqnhe_core::estimator::{exact_transformed_energy, interaction_table, Transform};
use uvqnhe_core::gate::Circuit;
use uvqnhe_core::hamiltonian::{Boundary, Hamiltonian, HamiltonianTerm};
use uvqnhe_core::measurement::{collect_exact, collect_shots, measurement_plan};
use uvqnhe_core::neural::{Activation, Head, MlpNetwork};
use uvqnhe_core::pauli::{PauliOp, PauliString};
use uvqnhe_core::sampler::stage_seed;
use uvqnhe_core::training::{
    train_network, train_vqe, vqe_gradient_param_shift, EnergyMode, NetworkTrainOptions,
    VqeOptions,
};

fn tfim5() -> Hamiltonian<f64> {
    Hamiltonian::tfim(5, 1.0, 1.0, Boundary::Open).unwrap()
}

/// Converged circuit for the 5-site chain under the run conventions the
/// binary uses (exact objective, derived stage seeds, default budget).
fn converged_five_site(master_seed: u64) -> (Hamiltonian<f64>, Circuit<f64>, f64, f64) {
    let h = tfim5();
    let spec = AnsatzSpec::new(5, 1);
    let theta0 = initial_parameters(&spec, stage_seed(master_seed, "vqe-init", 0));
    let vqe = train_vqe(
        &h,
        &spec,
        &theta0,
        EnergyMode::Exact,
        stage_seed(master_seed, "vqe", 0),
        &VqeOptions::default(),
    )
    .unwrap();
    let circuit = build_hea(&spec, &vqe.theta).unwrap();
    let e_vqe = h.energy_oracle(&circuit.run()).unwrap();
    let e_exact = h.exact_ground_energy().unwrap();
    (h, circuit, e_exact, e_vqe)
}

/// Criterion 1: for 50 random (state, single Pauli string with at least one
/// X or Y, positive values) triples, the measurement-circuit pipeline in
/// exact mode matches direct transformed-state arithmetic within 1e-8 for
/// the multiplicative transform, and likewise for the phase transform with
/// random angles. Runtime under 30 seconds.
#[test]
fn criterion_01_pipeline_matches_transformed_state_oracle() {
    let started = Instant::now();
    let ops = [PauliOp::I, PauliOp::X, PauliOp::Y, PauliOp::Z];
    for seed in 0..50u64 {
        let mut rng = ChaCha12Rng::seed_from_u64(0xACCE_0001 ^ seed);
        let n = rng.gen_range(2..=6usize);
        let string: Vec<PauliOp> = loop {
            let candidate: Vec<PauliOp> =
                (0..n).map(|_| ops[rng.gen_range(0..4usize)]).collect();
            if candidate.iter().any(|op| matches!(op, PauliOp::X | PauliOp::Y)) {
                break candidate;
            }
        };
        let h = Hamiltonian::new(
            n,
            vec![HamiltonianTerm {
                coefficient: rng.gen_range(-1.5..1.5),
                string: PauliString::new(string),
            }],
        )
        .unwrap();
        let spec = AnsatzSpec::new(n, rng.gen_range(1..=2usize));
        let theta: Vec<f64> =
            (0..spec.parameter_count()).map(|_| rng.gen_range(-1.5..1.5)).collect();
        let circuit = build_hea(&spec, &theta).unwrap();
        let state = circuit.run();
        let dim = 1usize << n;
        let f: Vec<f64> = (0..dim).map(|_| rng.gen_range(-0.8..0.8f64).exp()).collect();
        let g: Vec<f64> = (0..dim)
            .map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
            .collect();

        let plan = measurement_plan(&h);
        let data = collect_exact(&circuit, &plan, true).unwrap();
        let table = interaction_table(&h, &plan, &data, false).unwrap();

        let m = table.multiplicative_loss(&f);
        let m_oracle = exact_transformed_energy(&h, &state, Transform::Multiplicative(&f)).unwrap();
        assert!(
            (m - m_oracle).abs() < 1e-8,
            "criterion 01 FAIL seed {seed}: multiplicative {m} vs oracle {m_oracle}"
        );
        let p = table.phase_energy(&g);
        let p_oracle = exact_transformed_energy(&h, &state, Transform::Phase(&g)).unwrap();
        assert!(
            (p - p_oracle).abs() < 1e-8,
            "criterion 01 FAIL seed {seed}: phase {p} vs oracle {p_oracle}"
        );
    }
    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 30.0, "criterion 01 FAIL: runtime {elapsed:.1} s exceeds 30 s");
    println!("criterion 01 (pipeline vs transformed-state oracle, 50 triples, 1e-8): PASS ({elapsed:.1} s)");
}

/// Criterion 2: the identity transforms reproduce the bare circuit energy.
/// On the 5-site chain, for 20 random angle vectors, evaluating the
/// pipeline with all-ones multiplicative values and with all-zero phases
/// matches the statevector energy within 1e-10.
#[test]
fn criterion_02_identity_transforms_reduce_to_circuit_energy() {
    let h = tfim5();
    let plan = measurement_plan(&h);
    let spec = AnsatzSpec::new(5, 1);
    let dim = 1usize << 5;
    let ones = vec![1.0f64; dim];
    let zeros = vec![0.0f64; dim];
    let mut rng = ChaCha12Rng::seed_from_u64(0xACCE_0002);
    for case in 0..20 {
        let theta: Vec<f64> =
            (0..spec.parameter_count()).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let circuit = build_hea(&spec, &theta).unwrap();
        let bare = h.energy_oracle(&circuit.run()).unwrap();
        let data = collect_exact(&circuit, &plan, true).unwrap();
        let table = interaction_table(&h, &plan, &data, false).unwrap();
        let m = table.multiplicative_loss(&ones);
        let p = table.phase_energy(&zeros);
        assert!(
            (m - bare).abs() < 1e-10,
            "criterion 02 FAIL case {case}: all-ones loss {m} vs circuit energy {bare}"
        );
        assert!(
            (p - bare).abs() < 1e-10,
            "criterion 02 FAIL case {case}: zero-phase energy {p} vs circuit energy {bare}"
        );
    }
    println!("criterion 02 (identity transforms reproduce circuit energy, 1e-10): PASS");
}

/// Criterion 3: ground-energy oracles. The 2-site chain at unit couplings
/// has ground energy -sqrt(5), matched within 1e-9; at 9 sites the dense
/// and iterative eigensolvers agree within 1e-8.
#[test]
fn criterion_03_ground_energy_oracles_agree() {
    let h2 = Hamiltonian::<f64>::tfim(2, 1.0, 1.0, Boundary::Open).unwrap();
    let e2 = h2.exact_ground_energy().unwrap();
    let expected = -5.0f64.sqrt();
    assert!(
        (e2 - expected).abs() < 1e-9,
        "criterion 03 FAIL: 2-site ground energy {e2} vs {expected}"
    );
    let h9 = Hamiltonian::<f64>::tfim(9, 1.0, 1.0, Boundary::Open).unwrap();
    let dense = h9.ground_energy_dense().unwrap();
    let iterative = h9.ground_energy_lanczos().unwrap();
    assert!(
        (dense - iterative).abs() < 1e-8,
        "criterion 03 FAIL: dense {dense} vs iterative {iterative} at 9 sites"
    );
    println!("criterion 03 (2-site ground energy -sqrt(5) at 1e-9; dense vs iterative at 1e-8): PASS");
}

/// Criterion 4: variational floors in exact mode. Across 100 random
/// networks on the converged 5-site circuit, both estimator families stay
/// at or above the exact ground energy minus 1e-9; exact-mode training
/// trajectories end inside [exact ground energy, circuit energy].
#[test]
fn criterion_04_exact_mode_respects_variational_floor() {
    let (h, circuit, e_exact, e_vqe) = converged_five_site(0);
    let plan = measurement_plan(&h);
    let data = collect_exact(&circuit, &plan, true).unwrap();
    let table = interaction_table(&h, &plan, &data, false).unwrap();
    let mut rng = ChaCha12Rng::seed_from_u64(0xACCE_0004);
    for case in 0..100 {
        let mut amp = MlpNetwork::<f64>::new(5, 8, Activation::Tanh, Head::Amplitude, case).unwrap();
        let params: Vec<f64> =
            (0..amp.parameter_count()).map(|_| rng.gen_range(-0.7..0.7)).collect();
        amp.set_parameters(&params).unwrap();
        let f: Vec<f64> = (0..32).map(|s| amp.forward(s)).collect();
        let loss = table.multiplicative_loss(&f);
        assert!(
            loss >= e_exact - 1e-9,
            "criterion 04 FAIL case {case}: multiplicative loss {loss} under exact {e_exact}"
        );

        let mut ph = MlpNetwork::<f64>::new(5, 8, Activation::Tanh, Head::Phase, case).unwrap();
        let params: Vec<f64> =
            (0..ph.parameter_count()).map(|_| rng.gen_range(-0.7..0.7)).collect();
        ph.set_parameters(&params).unwrap();
        let g: Vec<f64> = (0..32).map(|s| ph.forward(s)).collect();
        let energy = table.phase_energy(&g);
        assert!(
            energy >= e_exact - 1e-9,
            "criterion 04 FAIL case {case}: phase energy {energy} under exact {e_exact}"
        );
    }

    for (head, label) in [(Head::Amplitude, "multiplicative"), (Head::Phase, "phase")] {
        for seed in 0..5u64 {
            let net = MlpNetwork::<f64>::new(5, 16, Activation::Tanh, head, seed).unwrap();
            let out = train_network(&h, &plan, &data, net, &NetworkTrainOptions::default()).unwrap();
            assert!(!out.diverged, "criterion 04 FAIL: exact-mode {label} training diverged");
            assert!(
                out.final_loss >= e_exact - 1e-9 && out.final_loss <= e_vqe + 1e-9,
                "criterion 04 FAIL: {label} trajectory end {} outside [{e_exact}, {e_vqe}]",
                out.final_loss
            );
        }
    }
    println!("criterion 04 (100 random networks above exact floor; exact-mode trajectories end in [E_exact, E_VQE]): PASS");
}

/// Criterion 5: divergence reproduction. On the 7-site chain with 500
/// shots per circuit and 200 epochs of amplitude-head training, at least
/// 8 of 10 seeds whose collections leave witness strings unobserved drive
/// the loss below -1e3 with the divergence flag set, each seed finishing
/// inside 2 minutes.
#[test]
fn criterion_05_unobserved_strings_drive_divergence() {
    let h = Hamiltonian::<f64>::tfim(7, 1.0, 1.0, Boundary::Open).unwrap();
    let spec = AnsatzSpec::new(7, 1);
    let theta0 = initial_parameters(&spec, stage_seed(0, "vqe-init", 0));
    let vqe = train_vqe(
        &h,
        &spec,
        &theta0,
        EnergyMode::Exact,
        stage_seed(0, "vqe", 0),
        &VqeOptions::default(),
    )
    .unwrap();
    let circuit = build_hea(&spec, &vqe.theta).unwrap();
    let plan = measurement_plan(&h);
    let ones = vec![1.0f64; 1 << 7];

    let mut witnessed = 0usize;
    let mut diverged = 0usize;
    let mut seed = 0u64;
    while witnessed < 10 {
        assert!(seed < 200, "criterion 05 FAIL: no witness-bearing collections found");
        let collect_seed = stage_seed(seed, "stage-two", 0);
        let data = collect_shots(&circuit, &plan, 500, collect_seed, false).unwrap();
        seed += 1;
        let report = divergence_witnesses(&h, &plan, &data, &ones).unwrap();
        if report.witnesses.is_empty() {
            continue;
        }
        witnessed += 1;
        let per_seed = Instant::now();
        let net = MlpNetwork::<f64>::new(
            7,
            16,
            Activation::Tanh,
            Head::Amplitude,
            stage_seed(seed - 1, "network-init", 0),
        )
        .unwrap();
        let options = NetworkTrainOptions { epochs: 200, ..Default::default() };
        let out = train_network(&h, &plan, &data, net, &options).unwrap();
        let elapsed = per_seed.elapsed().as_secs_f64();
        assert!(elapsed < 120.0, "criterion 05 FAIL: seed took {elapsed:.1} s");
        if out.diverged && out.final_loss < -1e3 {
            diverged += 1;
        }
    }
    assert!(
        diverged >= 8,
        "criterion 05 FAIL: only {diverged} of 10 witness-bearing seeds diverged below -1e3"
    );
    println!("criterion 05 (divergence in {diverged}/10 witness-bearing 500-shot collections): PASS");
}

/// Criterion 6: phase-transform stability under shot noise. Sweeping the
/// 5-site chain over {500, 1000, 5000, 20000} shots with 20 trials each,
/// every final energy stays above exact - 2% |exact|, none approaches the
/// global spectral bound -2 sum |h_P|, and at least 90% end at or below
/// the circuit energy + 1% |exact|.
#[test]
fn criterion_06_phase_transform_is_stable_at_low_shots() {
    let (h, circuit, e_exact, e_vqe) = converged_five_site(0);
    let plan = measurement_plan(&h);
    let floor = e_exact - 0.02 * e_exact.abs();
    let global_bound = -2.0 * h.one_norm();
    let target = e_vqe + 0.01 * e_exact.abs();
    let mut finals = Vec::new();
    for (si, &shots) in [500u64, 1000, 5000, 20000].iter().enumerate() {
        for trial in 0..20u64 {
            let seed = stage_seed(0, "sweep", (si as u64) * 20 + trial);
            let data = collect_shots(&circuit, &plan, shots, seed, true).unwrap();
            let net = MlpNetwork::<f64>::new(
                5,
                16,
                Activation::Tanh,
                Head::Phase,
                stage_seed(seed, "network-init", 0),
            )
            .unwrap();
            let out = train_network(&h, &plan, &data, net, &NetworkTrainOptions::default()).unwrap();
            assert!(
                out.final_loss >= floor,
                "criterion 06 FAIL: shots {shots} trial {trial} final {} under floor {floor}",
                out.final_loss
            );
            assert!(
                out.final_loss > global_bound + 1e-6,
                "criterion 06 FAIL: shots {shots} trial {trial} final {} binds the global bound {global_bound}",
                out.final_loss
            );
            finals.push(out.final_loss);
        }
    }
    let good = finals.iter().filter(|&&e| e <= target).count();
    assert!(
        good * 10 >= finals.len() * 9,
        "criterion 06 FAIL: only {good}/{} trials ended at or below circuit energy + 1%",
        finals.len()
    );
    println!(
        "criterion 06 (80/80 phase-transform finals above exact - 2%; {good}/80 at or below circuit energy + 1%): PASS"
    );
}

/// Criterion 7: variance forecast calibration at the operating point.
/// With the converged 5-site circuit and a trained amplitude network held
/// fixed, 200 Monte-Carlo repetitions at 1000 shots give an empirical
/// error variance bracketed by the forecast within [1x, 10x]; the forecast
/// ratio between 1000 and 4000 shots lies in [3, 5] whenever the 1/N^2
/// piece is under 10% of the 1/N piece. Runtime under 5 minutes.
#[test]
fn criterion_07_variance_forecast_brackets_observation() {
    let started = Instant::now();
    let (h, circuit, _, _) = converged_five_site(0);
    let plan = measurement_plan(&h);
    let data = collect_exact(&circuit, &plan, false).unwrap();
    let net = MlpNetwork::<f64>::new(
        5,
        16,
        Activation::Tanh,
        Head::Amplitude,
        stage_seed(0, "network-init", 0),
    )
    .unwrap();
    let out = train_network(&h, &plan, &data, net, &NetworkTrainOptions::default()).unwrap();
    let f: Vec<f64> = (0..32).map(|s| out.network.forward(s)).collect();

    let shots = 1000u64;
    let report = variance_model(&h, &plan, &data, &f, shots).unwrap();
    let empirical = empirical_error_variance(
        &h,
        &circuit,
        Transform::Multiplicative(&f),
        shots,
        200,
        stage_seed(0, "audit", 0),
        false,
    )
    .unwrap();
    assert!(
        empirical.variance <= report.predicted_variance,
        "criterion 07 FAIL: forecast {} under empirical {}",
        report.predicted_variance,
        empirical.variance
    );
    assert!(
        report.predicted_variance <= 10.0 * empirical.variance,
        "criterion 07 FAIL: forecast {} above 10x empirical {}",
        report.predicted_variance,
        empirical.variance
    );

    let n = shots as f64;
    let quadratic_share = (report.delta / (n * n)) / (report.gamma / n);
    if quadratic_share < 0.10 {
        let ratio = report.predicted_variance_at(shots) / report.predicted_variance_at(4 * shots);
        assert!(
            (3.0..=5.0).contains(&ratio),
            "criterion 07 FAIL: forecast ratio {ratio} between N and 4N outside [3, 5]"
        );
    }
    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 300.0, "criterion 07 FAIL: runtime {elapsed:.1} s exceeds 5 min");
    println!(
        "criterion 07 (empirical {:.3e} <= forecast {:.3e} <= 10x empirical; N to 4N ratio in [3, 5]): PASS ({elapsed:.1} s)",
        empirical.variance, report.predicted_variance
    );
}

/// Criterion 8: full-coverage draw count. For the uniform 3-qubit state,
/// the mean number of draws until all 8 outcomes appear, over 10,000
/// seeded trials, lands within 2% of the closed form 8*H_8 = 21.7429.
#[test]
fn criterion_08_coverage_draw_count_matches_closed_form() {
    let expected: f64 = coupon_collector_expected_shots(3, 8).unwrap();
    assert!((expected - 21.742857142857144).abs() < 1e-12);
    let observed: f64 = coupon_collector_mean_draws(3, 8, 10_000, 0xACCE_0008).unwrap();
    let rel = (observed - expected).abs() / expected;
    assert!(
        rel < 0.02,
        "criterion 08 FAIL: mean draws {observed} vs closed form {expected} (rel {rel:.4})"
    );
    println!("criterion 08 (mean draws to full coverage {observed:.3} within 2% of {expected:.4}): PASS");
}

/// Criterion 9: gradient checks. Network parameter gradients of both
/// estimator losses match central finite differences within 1e-5 relative
/// error; the parameter-shift circuit gradient matches finite differences
/// within 1e-6.
#[test]
fn criterion_09_gradients_match_finite_differences() {
    let (h, circuit, _, _) = converged_five_site(0);
    let plan = measurement_plan(&h);
    let data = collect_exact(&circuit, &plan, true).unwrap();
    let table = interaction_table(&h, &plan, &data, false).unwrap();

    for (head, label) in [(Head::Amplitude, "multiplicative"), (Head::Phase, "phase")] {
        let mut net = MlpNetwork::<f64>::new(5, 6, Activation::Tanh, head, 11).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(0xACCE_0009);
        let params: Vec<f64> =
            (0..net.parameter_count()).map(|_| rng.gen_range(-0.5..0.5)).collect();
        net.set_parameters(&params).unwrap();

        let loss_of = |network: &MlpNetwork<f64>| -> f64 {
            let values: Vec<f64> = (0..32).map(|s| network.forward(s)).collect();
            match head {
                Head::Phase => table.phase_energy(&values),
                _ => table.multiplicative_loss(&values),
            }
        };

        let mut values = vec![0.0f64; 32];
        let mut sens = vec![0.0f64; 32];
        for &s in table.needed() {
            values[s] = net.forward(s);
        }
        let _ = match head {
            Head::Phase => table.phase_energy_with_sensitivity(&values, &mut sens),
            _ => table.multiplicative_loss_with_sensitivity(&values, &mut sens),
        };
        let mut analytic = vec![0.0f64; net.parameter_count()];
        for &s in table.needed() {
            if sens[s] != 0.0 {
                net.accumulate_gradient(s, sens[s], &mut analytic);
            }
        }

        let step = 1e-6;
        let scale = analytic.iter().fold(0.0f64, |m, g| m.max(g.abs())).max(1e-12);
        for k in 0..net.parameter_count() {
            let mut probe = params.clone();
            probe[k] += step;
            net.set_parameters(&probe).unwrap();
            let plus = loss_of(&net);
            probe[k] -= 2.0 * step;
            net.set_parameters(&probe).unwrap();
            let minus = loss_of(&net);
            let fd = (plus - minus) / (2.0 * step);
            let rel = (analytic[k] - fd).abs() / scale;
            assert!(
                rel < 1e-5,
                "criterion 09 FAIL: {label} parameter {k} analytic {} vs fd {fd} (rel {rel:.2e})",
                analytic[k]
            );
        }
        net.set_parameters(&params).unwrap();
    }

    let spec = AnsatzSpec::new(5, 1);
    let theta: Vec<f64> = initial_parameters::<f64>(&spec, 17)
        .iter()
        .map(|t| t * 8.0)
        .collect();
    let shift = vqe_gradient_param_shift(&h, &spec, &theta).unwrap();
    let energy_at = |angles: &[f64]| -> f64 {
        h.energy_oracle(&build_hea(&spec, angles).unwrap().run()).unwrap()
    };
    let step = 1e-5;
    for k in 0..theta.len() {
        let mut probe = theta.clone();
        probe[k] += step;
        let plus = energy_at(&probe);
        probe[k] -= 2.0 * step;
        let minus = energy_at(&probe);
        let fd = (plus - minus) / (2.0 * step);
        assert!(
            (shift[k] - fd).abs() < 1e-6,
            "criterion 09 FAIL: circuit parameter {k} shift {} vs fd {fd}",
            shift[k]
        );
    }
    println!("criterion 09 (network gradients within 1e-5 of finite differences; parameter-shift within 1e-6): PASS");
}

/// Criterion 10: determinism. Rerunning a preset with the same seed
/// produces byte-identical CSV artifacts.
#[test]
fn criterion_10_preset_reruns_are_byte_identical() {
    let binary = env!("CARGO_BIN_EXE_uvqnhe");
    let presets = [
        ("divergence-demo", concat!(env!("CARGO_MANIFEST_DIR"), "/presets/fig2.cfg")),
        ("uvqnhe", concat!(env!("CARGO_MANIFEST_DIR"), "/presets/fig4a.cfg")),
    ];
    let stamp = std::process::id();
    for (kind, preset) in presets {
        let mut outputs: Vec<BTreeMap<String, Vec<u8>>> = Vec::new();
        for round in 0..2 {
            let out_dir = std::env::temp_dir().join(format!("acc10-{stamp}-{kind}-{round}"));
            let status = Command::new(binary)
                .args([kind, "--config", preset, "--seed", "0", "--out"])
                .arg(&out_dir)
                .output()
                .unwrap();
            assert!(
                status.status.success(),
                "criterion 10 FAIL: {kind} run exited with {:?}",
                status.status
            );
            let mut files = BTreeMap::new();
            for entry in std::fs::read_dir(&out_dir).unwrap() {
                let path = entry.unwrap().path();
                let name = path.file_name().unwrap().to_string_lossy().to_string();
                if name.ends_with(".csv") {
                    files.insert(name, std::fs::read(&path).unwrap());
                }
            }
            assert!(!files.is_empty(), "criterion 10 FAIL: {kind} produced no CSV files");
            outputs.push(files);
            std::fs::remove_dir_all(&out_dir).ok();
        }
        assert_eq!(
            outputs[0].keys().collect::<Vec<_>>(),
            outputs[1].keys().collect::<Vec<_>>(),
            "criterion 10 FAIL: {kind} reruns produced different artifact sets"
        );
        for (name, bytes) in &outputs[0] {
            assert_eq!(
                bytes, &outputs[1][name],
                "criterion 10 FAIL: {kind} rerun changed bytes of {name}"
            );
        }
    }
    println!("criterion 10 (preset reruns byte-identical across two runs of two presets): PASS");
}
