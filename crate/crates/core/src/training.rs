//! Two-stage training: circuit angles first, network second.
//!
//! Stage one minimizes the ansatz energy over rotation angles with
//! Nelder-Mead, either on exact expectation values or on freshly sampled
//! shot estimates per evaluation. Stage two freezes the angles, samples
//! every measurement circuit exactly once, and trains the network by
//! Adam on the resulting interaction table; the quantum side is never
//! touched again. A non-finite or collapsing loss stops stage two and is
//! reported as a divergence, not an error.

use crate::ansatz::{build_hea, AnsatzSpec};
use crate::error::{Error, Result};
use crate::estimator::{ansatz_energy, interaction_table, InteractionTable};
use crate::gate::Circuit;
use crate::hamiltonian::Hamiltonian;
use crate::measurement::{collect_exact, collect_shots, measurement_plan, CollectedData, MeasurementPlan};
use crate::neural::{Head, MlpNetwork};
use crate::optim::{nelder_mead_noisy, Adam};
use crate::sampler::stage_seed;
use crate::scalar::Real;

/// How stage one evaluates energies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyMode {
    Exact,
    Shots { shots: u64 },
}

#[derive(Debug, Clone)]
pub struct VqeOptions<T: Real> {
    /// Hard cap on objective evaluations.
    pub budget: usize,
    /// Initial simplex edge, in radians.
    pub initial_step: T,
    /// Simplex value spread that triggers a restart.
    pub tolerance: T,
}

impl<T: Real> Default for VqeOptions<T> {
    fn default() -> Self {
        Self { budget: 4000, initial_step: T::of(0.4), tolerance: T::of(1e-10) }
    }
}

#[derive(Debug, Clone)]
pub struct VqeOutcome<T: Real> {
    pub theta: Vec<T>,
    pub energy: T,
    pub evaluations: usize,
    /// Best energy seen after each evaluation, monotone non-increasing.
    pub trajectory: Vec<T>,
}

/// Minimize the ansatz energy over rotation angles.
///
/// In shot mode every objective evaluation samples all measurement
/// circuits afresh with `shots` shots under an evaluation-indexed seed,
/// so repeated calls are reproducible and no two evaluations share
/// randomness.
pub fn train_vqe<T: Real>(
    h: &Hamiltonian<T>,
    spec: &AnsatzSpec,
    theta0: &[T],
    mode: EnergyMode,
    seed: u64,
    options: &VqeOptions<T>,
) -> Result<VqeOutcome<T>> {
    if theta0.len() != spec.parameter_count() {
        return Err(Error::ParameterCount { expected: spec.parameter_count(), got: theta0.len() });
    }
    let plan = measurement_plan(h);
    let mut evaluation: u64 = 0;
    let mut failure: Option<Error> = None;
    let objective = |theta: &[T]| -> T {
        let result = (|| -> Result<T> {
            let circuit = build_hea(spec, theta)?;
            let data = match mode {
                EnergyMode::Exact => collect_exact(&circuit, &plan, false)?,
                EnergyMode::Shots { shots } => {
                    let eval_seed = stage_seed(seed, "vqe-eval", evaluation);
                    collect_shots(&circuit, &plan, shots, eval_seed, false)?
                }
            };
            ansatz_energy(h, &plan, &data)
        })();
        evaluation += 1;
        match result {
            Ok(value) => value,
            Err(e) => {
                if failure.is_none() {
                    failure = Some(e);
                }
                T::infinity()
            }
        }
    };
    let noisy = matches!(mode, EnergyMode::Shots { .. });
    let result = nelder_mead_noisy(
        objective,
        theta0,
        options.initial_step,
        options.budget,
        options.tolerance,
        noisy,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(VqeOutcome {
        theta: result.x,
        energy: result.value,
        evaluations: result.evaluations,
        trajectory: result.history,
    })
}

/// Exact energy gradient by the parameter-shift rule: every angle enters
/// through a rotation generator with eigenvalues +/-1/2, so
/// `dE/dt_k = (E(t + pi/2 e_k) - E(t - pi/2 e_k)) / 2`.
pub fn vqe_gradient_param_shift<T: Real>(
    h: &Hamiltonian<T>,
    spec: &AnsatzSpec,
    theta: &[T],
) -> Result<Vec<T>> {
    if theta.len() != spec.parameter_count() {
        return Err(Error::ParameterCount { expected: spec.parameter_count(), got: theta.len() });
    }
    let half_pi = T::of(std::f64::consts::FRAC_PI_2);
    let energy = |theta: &[T]| -> Result<T> {
        let circuit = build_hea(spec, theta)?;
        h.energy_oracle(&circuit.run())
    };
    let mut grad = Vec::with_capacity(theta.len());
    let mut probe = theta.to_vec();
    for k in 0..theta.len() {
        probe[k] = theta[k] + half_pi;
        let plus = energy(&probe)?;
        probe[k] = theta[k] - half_pi;
        let minus = energy(&probe)?;
        probe[k] = theta[k];
        grad.push((plus - minus) / T::of(2.0));
    }
    Ok(grad)
}

#[derive(Debug, Clone)]
pub struct NetworkTrainOptions<T: Real> {
    pub epochs: usize,
    pub learning_rate: T,
    /// Loss below this value counts as diverged.
    pub divergence_threshold: T,
    pub regularize_denominator: bool,
}

impl<T: Real> Default for NetworkTrainOptions<T> {
    fn default() -> Self {
        Self {
            epochs: 300,
            learning_rate: T::of(1e-2),
            divergence_threshold: T::of(-1e3),
            regularize_denominator: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NetworkOutcome<T: Real> {
    pub network: MlpNetwork<T>,
    /// Loss per epoch, starting at epoch zero (the untrained network).
    pub trajectory: Vec<T>,
    pub final_loss: T,
    pub diverged: bool,
    pub epochs_run: usize,
}

/// Train a network on frozen measurement data.
///
/// Epoch zero evaluates the fresh network (the identity transform, so the
/// first trajectory entry is the ansatz energy estimate); each later epoch
/// applies one Adam update and re-evaluates. Stops early, with the
/// `diverged` flag set, when the loss leaves the finite range above the
/// divergence threshold or the gradient stops being finite.
pub fn train_network<T: Real>(
    h: &Hamiltonian<T>,
    plan: &MeasurementPlan,
    data: &CollectedData<T>,
    network: MlpNetwork<T>,
    options: &NetworkTrainOptions<T>,
) -> Result<NetworkOutcome<T>> {
    if network.n_inputs() != plan.n {
        return Err(Error::DimensionMismatch { expected: plan.n, got: network.n_inputs() });
    }
    let phase = matches!(network.head(), Head::Phase);
    if phase && !data.imag.iter().any(|t| t.is_some()) && plan.groups.iter().any(|g| g.star.is_some()) {
        return Err(Error::Training(
            "phase-head training needs imaginary-part measurement data".into(),
        ));
    }
    let table = interaction_table(h, plan, data, options.regularize_denominator)?;
    train_network_on_table(&table, network, options)
}

/// Train a network on a prebuilt interaction table.
pub fn train_network_on_table<T: Real>(
    table: &InteractionTable<T>,
    mut network: MlpNetwork<T>,
    options: &NetworkTrainOptions<T>,
) -> Result<NetworkOutcome<T>> {
    let n = table.n_qubits();
    if network.n_inputs() != n {
        return Err(Error::DimensionMismatch { expected: n, got: network.n_inputs() });
    }
    let phase = matches!(network.head(), Head::Phase);
    let dim = 1usize << n;
    let mut adam = Adam::new(options.learning_rate, network.parameter_count());
    let mut params = network.parameters();
    let mut trajectory = Vec::with_capacity(options.epochs + 1);
    let mut diverged = false;
    let mut values = vec![T::zero(); dim];
    let mut sens = vec![T::zero(); dim];
    let mut grad = vec![T::zero(); network.parameter_count()];
    for epoch in 0..=options.epochs {
        for v in values.iter_mut() {
            *v = T::zero();
        }
        for &s in table.needed() {
            values[s] = network.forward(s);
        }
        for v in sens.iter_mut() {
            *v = T::zero();
        }
        let loss = if phase {
            table.phase_energy_with_sensitivity(&values, &mut sens)
        } else {
            table.multiplicative_loss_with_sensitivity(&values, &mut sens)
        };
        trajectory.push(loss);
        if !loss.is_finite() || loss < options.divergence_threshold {
            diverged = true;
            break;
        }
        if epoch == options.epochs {
            break;
        }
        for g in grad.iter_mut() {
            *g = T::zero();
        }
        for &s in table.needed() {
            if sens[s] != T::zero() {
                network.accumulate_gradient(s, sens[s], &mut grad);
            }
        }
        if grad.iter().any(|g| !g.is_finite()) {
            diverged = true;
            break;
        }
        adam.step(&mut params, &grad)?;
        network.set_parameters(&params)?;
    }
    let final_loss = *trajectory.last().expect("at least one epoch evaluated");
    let epochs_run = trajectory.len() - 1;
    Ok(NetworkOutcome { network, trajectory, final_loss, diverged, epochs_run })
}

/// Convenience wrapper for stage two: freeze the circuit, collect data
/// once, and train a fresh network of the given head on it.
pub struct StageTwoSetup<'a, T: Real> {
    pub h: &'a Hamiltonian<T>,
    pub ansatz: &'a Circuit<T>,
    pub head: Head,
    pub hidden: usize,
    pub activation: crate::neural::Activation,
}

pub struct StageTwoResult<T: Real> {
    pub plan: MeasurementPlan,
    pub data: CollectedData<T>,
    pub outcome: NetworkOutcome<T>,
}

pub fn run_stage_two<T: Real>(
    setup: &StageTwoSetup<T>,
    mode: EnergyMode,
    seed: u64,
    options: &NetworkTrainOptions<T>,
) -> Result<StageTwoResult<T>> {
    let plan = measurement_plan(setup.h);
    let with_imag = matches!(setup.head, Head::Phase);
    let data = match mode {
        EnergyMode::Exact => collect_exact(setup.ansatz, &plan, with_imag)?,
        EnergyMode::Shots { shots } => {
            collect_shots(setup.ansatz, &plan, shots, stage_seed(seed, "stage-two", 0), with_imag)?
        }
    };
    let network = MlpNetwork::new(
        setup.ansatz.n_qubits(),
        setup.hidden,
        setup.activation,
        setup.head,
        stage_seed(seed, "network-init", 0),
    )?;
    let outcome = train_network(setup.h, &plan, &data, network, options)?;
    Ok(StageTwoResult { plan, data, outcome })
}
