//! Staged experiment pipelines: exact diagonalization, circuit training,
//! data collection, network training, and the failure-mode analyses,
//! with artifacts written per run.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use uvqnhe_core::analysis::{
    divergence_witnesses, empirical_error_variance, full_support, variance_model,
};
use uvqnhe_core::ansatz::{build_hea, initial_parameters, AnsatzSpec};
use uvqnhe_core::estimator::{dense_values, exact_transformed_energy, Transform};
use uvqnhe_core::gate::Circuit;
use uvqnhe_core::hamiltonian::Hamiltonian;
use uvqnhe_core::measurement::{
    collect_exact, collect_shots, measurement_plan, CollectedData, MeasurementPlan,
};
use uvqnhe_core::neural::{Head, MlpNetwork};
use uvqnhe_core::sampler::stage_seed;
use uvqnhe_core::training::{
    train_network, train_vqe, EnergyMode, NetworkOutcome, NetworkTrainOptions, VqeOptions,
    VqeOutcome,
};

use crate::config::ExperimentConfig;
use crate::output::{OutputDir, SweepRow, VarianceRow};
use crate::{CliError, Kind};

/// Everything a finished run reports; serialized as `manifest.json`.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub kind: String,
    pub config: ExperimentConfig,
    pub seeds: BTreeMap<String, u64>,
    pub e_exact: f64,
    pub e_vqe: Option<f64>,
    pub final_estimate: Option<f64>,
    pub diverged: bool,
    pub divergence_possible: bool,
    pub coverage_redraws: usize,
    pub wall_clock_seconds: f64,
    pub artifacts: Vec<String>,
}

pub fn run(kind: Kind, config: &ExperimentConfig, out_root: &Path) -> Result<RunManifest, CliError> {
    let started = Instant::now();
    let mut out = OutputDir::create(out_root)?;
    let h = Hamiltonian::<f64>::tfim(
        config.n_sites,
        config.j,
        config.h,
        config.boundary.into(),
    )?;
    let e_exact = h.exact_ground_energy()?;
    let mut seeds = BTreeMap::new();
    seeds.insert("master".to_string(), config.seed);

    let mut manifest = match kind {
        Kind::TfimExact => RunManifest {
            kind: kind.name().to_string(),
            config: config.clone(),
            seeds,
            e_exact,
            e_vqe: None,
            final_estimate: Some(e_exact),
            diverged: false,
            divergence_possible: false,
            coverage_redraws: 0,
            wall_clock_seconds: 0.0,
            artifacts: Vec::new(),
        },
        Kind::Vqe => run_vqe(kind, config, &h, e_exact, seeds, &mut out)?,
        Kind::Vqnhe | Kind::Uvqnhe | Kind::DivergenceDemo => {
            run_staged(kind, config, &h, e_exact, seeds, &mut out)?
        }
        Kind::ShotSweep => run_sweep(kind, config, &h, e_exact, seeds, &mut out)?,
        Kind::VarianceAudit => run_variance_audit(kind, config, &h, e_exact, seeds, &mut out)?,
    };
    manifest.wall_clock_seconds = started.elapsed().as_secs_f64();
    manifest.artifacts = out.artifacts().to_vec();
    manifest.artifacts.push("manifest.json".to_string());
    out.write_manifest(&manifest)?;
    Ok(manifest)
}

/// Stage one: train the circuit and report the exact energy at the angles
/// it settled on, which is what later stages and the manifest use.
fn vqe_stage(
    config: &ExperimentConfig,
    h: &Hamiltonian<f64>,
    mode: EnergyMode,
    seeds: &mut BTreeMap<String, u64>,
) -> Result<(VqeOutcome<f64>, Circuit<f64>, f64), CliError> {
    let spec = AnsatzSpec::new(config.n_sites, config.layers);
    let init_seed = stage_seed(config.seed, "vqe-init", 0);
    let objective_seed = stage_seed(config.seed, "vqe", 0);
    seeds.insert("vqe-init".to_string(), init_seed);
    seeds.insert("vqe".to_string(), objective_seed);
    let theta0 = initial_parameters::<f64>(&spec, init_seed);
    let options = VqeOptions { budget: config.budget, ..Default::default() };
    let outcome = train_vqe(h, &spec, &theta0, mode, objective_seed, &options)?;
    let circuit = build_hea(&spec, &outcome.theta)?;
    let e_vqe = h.energy_oracle(&circuit.run())?;
    Ok((outcome, circuit, e_vqe))
}

fn run_vqe(
    kind: Kind,
    config: &ExperimentConfig,
    h: &Hamiltonian<f64>,
    e_exact: f64,
    mut seeds: BTreeMap<String, u64>,
    out: &mut OutputDir,
) -> Result<RunManifest, CliError> {
    let mode = config.vqe_energy_mode();
    let (outcome, _, e_vqe) = vqe_stage(config, h, mode, &mut seeds)?;
    out.write_trajectory(&outcome.trajectory)?;
    Ok(RunManifest {
        kind: kind.name().to_string(),
        config: config.clone(),
        seeds,
        e_exact,
        e_vqe: Some(e_vqe),
        final_estimate: Some(e_vqe),
        diverged: false,
        divergence_possible: false,
        coverage_redraws: 0,
        wall_clock_seconds: 0.0,
        artifacts: Vec::new(),
    })
}

/// Collect stage-two data under the configured coverage policy. Attempts
/// advance the derived seed, so enforcing coverage changes which draw is
/// used but never desynchronizes reruns.
fn collect_with_policy(
    ansatz: &Circuit<f64>,
    plan: &MeasurementPlan,
    mode: EnergyMode,
    seed: u64,
    with_imag: bool,
    enforce_coverage: bool,
) -> Result<(CollectedData<f64>, usize), CliError> {
    match mode {
        EnergyMode::Exact => Ok((collect_exact(ansatz, plan, with_imag)?, 0)),
        EnergyMode::Shots { shots } => {
            let mut redraws = 0usize;
            loop {
                if redraws > 1000 {
                    return Err(CliError::Fault(format!(
                        "coverage enforcement rejected {redraws} collections in a row"
                    )));
                }
                let data = collect_shots(
                    ansatz,
                    plan,
                    shots,
                    stage_seed(seed, "stage-two", redraws as u64),
                    with_imag,
                )?;
                if !enforce_coverage || full_support(&data) {
                    return Ok((data, redraws));
                }
                redraws += 1;
            }
        }
    }
}

fn network_options(config: &ExperimentConfig) -> NetworkTrainOptions<f64> {
    NetworkTrainOptions {
        epochs: config.epochs,
        learning_rate: config.learning_rate,
        regularize_denominator: config.regularize_denominator,
        ..Default::default()
    }
}

fn head_for(kind: Kind, config: &ExperimentConfig) -> Result<Head, CliError> {
    match kind {
        Kind::Uvqnhe => Ok(Head::Phase),
        _ => config.multiplicative_head(),
    }
}

/// Network outputs over the whole space, for landscapes and witnesses.
fn dense_outputs(network: &MlpNetwork<f64>, n: usize) -> Vec<f64> {
    dense_values(n, |s| network.forward(s))
}

fn run_staged(
    kind: Kind,
    config: &ExperimentConfig,
    h: &Hamiltonian<f64>,
    e_exact: f64,
    mut seeds: BTreeMap<String, u64>,
    out: &mut OutputDir,
) -> Result<RunManifest, CliError> {
    let (_, circuit, e_vqe) = vqe_stage(config, h, config.vqe_energy_mode(), &mut seeds)?;
    let head = head_for(kind, config)?;
    let with_imag = matches!(head, Head::Phase);
    let network_seed = stage_seed(config.seed, "network", 0);
    seeds.insert("network".to_string(), network_seed);

    let plan = measurement_plan(h);
    let (data, redraws) = collect_with_policy(
        &circuit,
        &plan,
        config.energy_mode(config.mode),
        network_seed,
        with_imag,
        config.enforce_coverage,
    )?;
    let network = MlpNetwork::new(
        config.n_sites,
        config.hidden,
        config.parsed_activation()?,
        head,
        stage_seed(network_seed, "network-init", 0),
    )?;
    let outcome: NetworkOutcome<f64> = train_network(h, &plan, &data, network, &network_options(config))?;

    out.write_trajectory(&outcome.trajectory)?;
    let outputs = dense_outputs(&outcome.network, config.n_sites);
    let dim = 1usize << config.n_sites;
    let mut observed = vec![false; dim];
    for &s in data.ansatz.support() {
        observed[s] = true;
    }
    out.write_landscape(config.n_sites, &outputs, &observed)?;

    let divergence_possible = if with_imag {
        false
    } else {
        divergence_witnesses(h, &plan, &data, &outputs)?.divergence_possible
    };

    Ok(RunManifest {
        kind: kind.name().to_string(),
        config: config.clone(),
        seeds,
        e_exact,
        e_vqe: Some(e_vqe),
        final_estimate: Some(outcome.final_loss),
        diverged: outcome.diverged,
        divergence_possible,
        coverage_redraws: redraws,
        wall_clock_seconds: 0.0,
        artifacts: Vec::new(),
    })
}

fn run_sweep(
    kind: Kind,
    config: &ExperimentConfig,
    h: &Hamiltonian<f64>,
    e_exact: f64,
    mut seeds: BTreeMap<String, u64>,
    out: &mut OutputDir,
) -> Result<RunManifest, CliError> {
    if config.shot_list.is_empty() {
        return Err(CliError::Usage("shot_list must not be empty".into()));
    }
    if config.trials == 0 {
        return Err(CliError::Usage("trials must be at least 1".into()));
    }
    let head = match config.variant.as_str() {
        "vqnhe" => config.multiplicative_head()?,
        "uvqnhe" => Head::Phase,
        other => {
            return Err(CliError::Usage(format!(
                "variant '{other}' is not one of vqnhe, uvqnhe"
            )))
        }
    };
    let with_imag = matches!(head, Head::Phase);
    let with_model = !with_imag;

    let (_, circuit, e_vqe) = vqe_stage(config, h, config.vqe_energy_mode(), &mut seeds)?;
    seeds.insert("sweep-base".to_string(), stage_seed(config.seed, "sweep", 0));
    let plan = measurement_plan(h);
    // Exact tables drive the closed-form error forecast per trial.
    let exact_data = collect_exact(&circuit, &plan, false)?;

    let mut rows = Vec::new();
    let mut total_redraws = 0usize;
    let mut diverged_any = false;
    let mut witnessed_any = false;
    for (si, &shots) in config.shot_list.iter().enumerate() {
        for trial in 0..config.trials {
            let index = (si * config.trials + trial) as u64;
            let trial_seed = stage_seed(config.seed, "sweep", index);
            let (data, redraws) = collect_with_policy(
                &circuit,
                &plan,
                EnergyMode::Shots { shots },
                trial_seed,
                with_imag,
                config.enforce_coverage,
            )?;
            total_redraws += redraws;
            let network = MlpNetwork::new(
                config.n_sites,
                config.hidden,
                config.parsed_activation()?,
                head,
                stage_seed(trial_seed, "network-init", 0),
            )?;
            let outcome = train_network(h, &plan, &data, network, &network_options(config))?;
            diverged_any |= outcome.diverged;

            let model_sigma = if with_model {
                let f = dense_outputs(&outcome.network, config.n_sites);
                witnessed_any |= divergence_witnesses(h, &plan, &data, &f)?.divergence_possible;
                if f.iter().all(|v| v.is_finite()) {
                    variance_model(h, &plan, &exact_data, &f, shots)
                        .ok()
                        .map(|m| m.predicted_sigma)
                } else {
                    None
                }
            } else {
                None
            };
            rows.push(SweepRow {
                shots,
                trial,
                final_energy: outcome.final_loss,
                model_sigma,
                coverage_ok: full_support(&data),
            });
        }
    }
    out.write_sweep(&rows)?;

    let largest = *config.shot_list.iter().max().unwrap();
    let at_largest: Vec<f64> =
        rows.iter().filter(|r| r.shots == largest).map(|r| r.final_energy).collect();
    let final_estimate = at_largest.iter().sum::<f64>() / at_largest.len() as f64;

    Ok(RunManifest {
        kind: kind.name().to_string(),
        config: config.clone(),
        seeds,
        e_exact,
        e_vqe: Some(e_vqe),
        final_estimate: Some(final_estimate),
        diverged: diverged_any,
        divergence_possible: witnessed_any,
        coverage_redraws: total_redraws,
        wall_clock_seconds: 0.0,
        artifacts: Vec::new(),
    })
}

fn run_variance_audit(
    kind: Kind,
    config: &ExperimentConfig,
    h: &Hamiltonian<f64>,
    e_exact: f64,
    mut seeds: BTreeMap<String, u64>,
    out: &mut OutputDir,
) -> Result<RunManifest, CliError> {
    if config.shot_list.is_empty() {
        return Err(CliError::Usage("shot_list must not be empty".into()));
    }
    if config.trials < 2 {
        return Err(CliError::Usage("variance audit needs trials >= 2".into()));
    }
    if config.head != "amplitude" {
        return Err(CliError::Usage(
            "variance audit needs the positive amplitude head".into(),
        ));
    }
    let (_, circuit, e_vqe) = vqe_stage(config, h, config.vqe_energy_mode(), &mut seeds)?;
    let network_seed = stage_seed(config.seed, "network", 0);
    seeds.insert("network".to_string(), network_seed);
    seeds.insert("audit-base".to_string(), stage_seed(config.seed, "audit", 0));

    // The audited network is trained once in exact mode, so the forecast
    // and every empirical repetition share one fixed transform.
    let plan = measurement_plan(h);
    let exact_data = collect_exact(&circuit, &plan, false)?;
    let network = MlpNetwork::new(
        config.n_sites,
        config.hidden,
        config.parsed_activation()?,
        Head::Amplitude,
        stage_seed(network_seed, "network-init", 0),
    )?;
    let outcome = train_network(h, &plan, &exact_data, network, &network_options(config))?;
    out.write_trajectory(&outcome.trajectory)?;
    let f = dense_outputs(&outcome.network, config.n_sites);

    let mut rows = Vec::new();
    let mut total_redraws = 0usize;
    for (i, &shots) in config.shot_list.iter().enumerate() {
        let model = variance_model(h, &plan, &exact_data, &f, shots)?;
        let empirical = empirical_error_variance(
            h,
            &circuit,
            Transform::Multiplicative(&f),
            shots,
            config.trials,
            stage_seed(config.seed, "audit", i as u64),
            config.enforce_coverage,
        )?;
        total_redraws += empirical.redraws;
        rows.push(VarianceRow {
            shots,
            model_var: model.predicted_variance,
            empirical_var: empirical.variance,
            gamma: model.gamma,
            delta: model.delta,
        });
    }
    out.write_variance(&rows)?;

    let exact_at_f = exact_transformed_energy(h, &circuit.run(), Transform::Multiplicative(&f))?;
    Ok(RunManifest {
        kind: kind.name().to_string(),
        config: config.clone(),
        seeds,
        e_exact,
        e_vqe: Some(e_vqe),
        final_estimate: Some(exact_at_f),
        diverged: outcome.diverged,
        divergence_possible: false,
        coverage_redraws: total_redraws,
        wall_clock_seconds: 0.0,
        artifacts: Vec::new(),
    })
}
