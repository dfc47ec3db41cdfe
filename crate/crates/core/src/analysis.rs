//! Failure-mode analyses for the sampled estimator.
//!
//! Three questions about a frozen data collection:
//!
//! * Can the multiplicative loss diverge? Divergence needs a string whose
//!   network value enters the numerator but not the normalization, plus a
//!   sign pathway that rewards growing it ([`divergence_witnesses`]).
//! * How many shots until the ansatz histogram covers a given number of
//!   strings? Coupon-collector arithmetic and a Monte-Carlo cross-check
//!   ([`coupon_collector_expected_shots`], [`coupon_collector_mean_draws`]).
//! * How far does the sampled energy stray from the exact one? A binomial
//!   closed-form variance model with shared-denominator covariances
//!   ([`variance_model`]) audited against rerunning the shot pipeline
//!   ([`empirical_error_variance`]).

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::estimator::{exact_transformed_energy, interaction_table, Transform};
use crate::gate::{Circuit, Gate};
use crate::hamiltonian::Hamiltonian;
use crate::measurement::{
    collect_shots, measurement_plan, star_reset, term_sign, tilde_transform, CollectedData,
    MeasurementPlan,
};
use crate::sampler::{stage_seed, BitstringSampler};
use crate::scalar::Real;

/// A numerator-only string: the loss reads the network there, the
/// normalization never sees it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceWitness<T: Real> {
    /// The unobserved string, as a basis index.
    pub bitstring: usize,
    /// Slope of the loss numerator in the network value at this string,
    /// evaluated at the supplied values.
    pub coefficient: T,
    /// True when some pair weight touching this string is negative, so
    /// growing the value here can push the numerator toward minus infinity
    /// even for a positive-valued network.
    pub sign_pathway: bool,
}

/// Coverage verdict for one frozen data collection.
#[derive(Debug, Clone)]
pub struct DivergenceReport<T: Real> {
    /// Numerator strings missing from the ansatz histogram, ascending.
    pub witnesses: Vec<DivergenceWitness<T>>,
    /// Total count of distinct strings the numerator reads.
    pub numerator_strings: usize,
    /// True iff the witness set is nonempty.
    pub divergence_possible: bool,
}

/// Find every string the loss numerator reads that the normalization
/// denominator cannot see, with the sign information that decides whether
/// an unbounded positive network can exploit it.
///
/// `f` holds the current network values over the whole space and only
/// scales the reported coefficients; the witness set itself depends on the
/// data alone.
pub fn divergence_witnesses<T: Real>(
    h: &Hamiltonian<T>,
    plan: &MeasurementPlan,
    data: &CollectedData<T>,
    f: &[T],
) -> Result<DivergenceReport<T>> {
    let dim = 1usize << plan.n;
    if f.len() != dim {
        return Err(Error::LengthMismatch { expected: dim, got: f.len() });
    }
    let table = interaction_table(h, plan, data, false)?;
    let observed: BTreeSet<usize> = data.ansatz.support().iter().copied().collect();
    let mut numerator: BTreeSet<usize> = BTreeSet::new();
    for pair in table.pairs() {
        numerator.insert(pair.s_prime);
        numerator.insert(pair.s_tilde);
    }
    let witnesses = numerator
        .iter()
        .filter(|s| !observed.contains(s))
        .map(|&s| {
            let mut coefficient = T::zero();
            let mut sign_pathway = false;
            for pair in table.pairs() {
                if pair.s_prime == s {
                    coefficient += pair.w_real * f[pair.s_tilde];
                }
                if pair.s_tilde == s {
                    coefficient += pair.w_real * f[pair.s_prime];
                }
                if (pair.s_prime == s || pair.s_tilde == s) && pair.w_real < T::zero() {
                    sign_pathway = true;
                }
            }
            DivergenceWitness { bitstring: s, coefficient, sign_pathway }
        })
        .collect::<Vec<_>>();
    Ok(DivergenceReport {
        divergence_possible: !witnesses.is_empty(),
        numerator_strings: numerator.len(),
        witnesses,
    })
}

/// Expected number of uniform draws from `2^n` strings until `targets`
/// distinct ones have appeared: `2^n * (1 + 1/2 + ... + 1/targets)`.
pub fn coupon_collector_expected_shots<T: Real>(n: usize, targets: usize) -> Result<T> {
    let dim = 1usize << n;
    if targets == 0 || targets > dim {
        return Err(Error::InvalidArgument(format!(
            "target count {targets} out of range 1..={dim}"
        )));
    }
    let harmonic: T = (1..=targets).map(|i| T::one() / T::of(i as f64)).sum();
    Ok(T::of(dim as f64) * harmonic)
}

/// Monte-Carlo counterpart of [`coupon_collector_expected_shots`]: sample a
/// uniform state (Hadamard on every qubit) one shot at a time and average
/// the draws needed to see `targets` distinct strings.
pub fn coupon_collector_mean_draws<T: Real>(
    n: usize,
    targets: usize,
    trials: usize,
    seed: u64,
) -> Result<T> {
    let dim = 1usize << n;
    if targets == 0 || targets > dim {
        return Err(Error::InvalidArgument(format!(
            "target count {targets} out of range 1..={dim}"
        )));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    let mut circuit = Circuit::<T>::new(n);
    for q in 0..n {
        circuit.push(Gate::H(q))?;
    }
    let state = circuit.run();
    let mut total = 0u64;
    for trial in 0..trials {
        let mut sampler =
            BitstringSampler::from_state(&state, stage_seed(seed, "coupon", trial as u64));
        let mut seen = vec![false; dim];
        let mut distinct = 0usize;
        let mut draws = 0u64;
        while distinct < targets {
            let s = sampler.draw();
            draws += 1;
            if !seen[s] {
                seen[s] = true;
                distinct += 1;
            }
        }
        total += draws;
    }
    Ok(T::of(total as f64) / T::of(trials as f64))
}

/// Shot-noise forecast for one Pauli term under the multiplicative
/// estimator.
#[derive(Debug, Clone, Copy)]
pub struct TermVariance<T: Real> {
    /// Index into the Hamiltonian's term list.
    pub term: usize,
    /// Exact weighted expectation of the bare term (coefficient excluded).
    pub estimate: T,
    /// Fluctuation weight: the summed binomial variances of this term's
    /// circuit, plus the normalization feedback.
    pub xi: T,
    /// Forecast variance of the term's estimation error at the report's
    /// shot count.
    pub variance: T,
}

/// Shot-noise coupling between two Pauli terms.
#[derive(Debug, Clone, Copy)]
pub struct PairCovariance<T: Real> {
    /// Term indices, ascending.
    pub terms: (usize, usize),
    /// Forecast covariance of the two estimates at the report's shot count.
    /// Every pair shares the normalization denominator; pairs measured on
    /// the same circuit additionally share their numerator counts.
    pub covariance: T,
}

/// Closed-form forecast of `Var[exact energy - sampled energy]` for the
/// multiplicative estimator, decomposed as `gamma/N + delta/N^2`.
#[derive(Debug, Clone)]
pub struct VarianceReport<T: Real> {
    /// Shot count per circuit the forecast is evaluated at.
    pub n_shots: u64,
    /// Normalization `sum f^2 p_a` of the supplied values, before the
    /// internal rescaling to the unit gauge.
    pub denominator: T,
    /// Binomial fluctuation of the normalization in the unit gauge,
    /// `sum f^2 p_a (1 - p_a)` with rescaled values.
    pub denominator_fluctuation: T,
    pub per_term: Vec<TermVariance<T>>,
    pub covariances: Vec<PairCovariance<T>>,
    /// Coefficient of `1/N` in the forecast variance.
    pub gamma: T,
    /// Coefficient of `1/N^2` in the forecast variance.
    pub delta: T,
    /// `gamma/N + delta/N^2` at `n_shots`.
    pub predicted_variance: T,
    /// Square root of the forecast variance.
    pub predicted_sigma: T,
}

impl<T: Real> VarianceReport<T> {
    /// Forecast variance at a different shot count.
    pub fn predicted_variance_at(&self, shots: u64) -> T {
        let n = T::of(shots as f64);
        self.gamma / n + self.delta / (n * n)
    }
}

/// Forecast the estimation-error variance of the multiplicative estimator
/// from probability tables, assuming independent binomial counts per
/// string.
///
/// Per term, each of the `N` shots of its circuit fluctuates binomially;
/// the fluctuation weight also carries the term's normalization feedback.
/// Covariances couple every pair through the shared denominator, and pairs
/// measured on the same circuit through their common counts as well.
///
/// The energy estimate is unchanged by rescaling the network, but the
/// truncated expansion behind this forecast is not, so the model is
/// evaluated at the canonical representative of the network's equivalence
/// class: values are rescaled so the normalization `sum f^2 p_a` equals
/// one before any fluctuation is accumulated. In that gauge the forecast
/// deliberately overestimates: it keeps every fluctuation weight at first
/// power where the strict leading order would square quantities smaller
/// than one, which buys slack against the higher-order error the expansion
/// drops. Pass exact tables for the forward forecast (the usual mode) or
/// shot-reconstructed tables for a hardware-style estimate.
pub fn variance_model<T: Real>(
    h: &Hamiltonian<T>,
    plan: &MeasurementPlan,
    data: &CollectedData<T>,
    f: &[T],
    shots: u64,
) -> Result<VarianceReport<T>> {
    let n = plan.n;
    let dim = 1usize << n;
    if f.len() != dim {
        return Err(Error::LengthMismatch { expected: dim, got: f.len() });
    }
    if f.iter().any(|v| !(*v > T::zero())) {
        return Err(Error::InvalidArgument("variance model needs positive network values".into()));
    }
    if data.real.len() != plan.groups.len() {
        return Err(Error::LengthMismatch { expected: plan.groups.len(), got: data.real.len() });
    }
    if shots == 0 {
        return Err(Error::InvalidArgument("shot count must be positive".into()));
    }

    let denominator: T = data.ansatz.iter().map(|(s, p)| f[s] * f[s] * p).sum();
    if !(denominator > T::zero()) {
        return Err(Error::Estimator("variance model has a non-positive normalization".into()));
    }
    // Gauge fix: work with rescaled values whose normalization is one.
    let scale = denominator.sqrt().recip();
    let f: Vec<T> = f.iter().map(|&v| v * scale).collect();

    // Binomial fluctuation of the sampled (unit) normalization.
    let fluctuation: T =
        data.ansatz.iter().map(|(s, p)| f[s] * f[s] * p * (T::one() - p)).sum();
    let shots_t = T::of(shots as f64);

    // Per-group quantities shared by every member term: the binomial
    // fluctuation of the circuit's counts weighted by the network pair
    // values, and the (s', s~') map itself.
    let pair_of = |group: &crate::measurement::CircuitGroup, s: usize| match group.star {
        None => (s, s),
        Some(star) => {
            let s_prime = star_reset(s, star.qubit, n);
            (s_prime, tilde_transform(s_prime, &group.representative))
        }
    };
    let group_fluctuation: Vec<T> = plan
        .groups
        .iter()
        .zip(&data.real)
        .map(|(group, table)| {
            table
                .iter()
                .map(|(s, p)| {
                    let (s_prime, s_tilde) = pair_of(group, s);
                    f[s_prime] * f[s_tilde] * p * (T::one() - p)
                })
                .sum()
        })
        .collect();

    let terms = h.terms();
    let mut group_of = vec![0usize; terms.len()];
    for (g, group) in plan.groups.iter().enumerate() {
        for &index in &group.members {
            group_of[index] = g;
        }
    }

    // Signed numerators per term, coefficient excluded. In the unit gauge
    // the numerator is the term estimate itself.
    let numerators: Vec<T> = (0..terms.len())
        .map(|i| {
            let g = group_of[i];
            let group = &plan.groups[g];
            data.real[g]
                .iter()
                .map(|(s, p)| {
                    let (s_prime, s_tilde) = pair_of(group, s);
                    let sign = term_sign(s, &terms[i].string, group.star.as_ref(), n);
                    T::of(f64::from(sign)) * f[s_prime] * f[s_tilde] * p
                })
                .sum()
        })
        .collect();

    let mut gamma = T::zero();
    let mut delta = T::zero();
    let per_term: Vec<TermVariance<T>> = (0..terms.len())
        .map(|i| {
            let estimate = numerators[i];
            let xi = group_fluctuation[group_of[i]] + estimate.abs() * fluctuation;
            let coeff2 = terms[i].coefficient * terms[i].coefficient;
            gamma += coeff2 * xi;
            delta += coeff2 * fluctuation * xi;
            let variance = xi / shots_t + fluctuation * xi / (shots_t * shots_t);
            TermVariance { term: i, estimate, xi, variance }
        })
        .collect();

    let mut covariances = Vec::new();
    for i in 0..terms.len() {
        for j in i + 1..terms.len() {
            let mut coupling = numerators[i] * numerators[j] * fluctuation;
            if group_of[i] == group_of[j] {
                let g = group_of[i];
                let group = &plan.groups[g];
                let shared: T = data.real[g]
                    .iter()
                    .map(|(s, p)| {
                        let sign_i = term_sign(s, &terms[i].string, group.star.as_ref(), n);
                        let sign_j = term_sign(s, &terms[j].string, group.star.as_ref(), n);
                        let (s_prime, s_tilde) = pair_of(group, s);
                        T::of(f64::from(sign_i * sign_j))
                            * f[s_prime]
                            * f[s_tilde]
                            * p
                            * (T::one() - p)
                    })
                    .sum();
                coupling += shared;
            }
            gamma += T::of(2.0) * terms[i].coefficient * terms[j].coefficient * coupling;
            covariances.push(PairCovariance { terms: (i, j), covariance: coupling / shots_t });
        }
    }

    let predicted_variance = gamma / shots_t + delta / (shots_t * shots_t);
    Ok(VarianceReport {
        n_shots: shots,
        denominator,
        denominator_fluctuation: fluctuation,
        per_term,
        covariances,
        gamma,
        delta,
        predicted_variance,
        predicted_sigma: predicted_variance.sqrt(),
    })
}

/// Observed statistics of the estimation error over repeated collections.
#[derive(Debug, Clone, Copy)]
pub struct EmpiricalVariance<T: Real> {
    /// Collections that entered the statistics.
    pub trials: usize,
    /// Mean of `exact energy - sampled energy`.
    pub mean_error: T,
    /// Unbiased sample variance of the error.
    pub variance: T,
    /// Collections discarded for incomplete histograms before `trials`
    /// accepted ones were reached.
    pub redraws: usize,
}

/// Rerun the whole shot pipeline `trials` times with derived seeds and
/// measure the spread of the sampled energy around the exact one.
///
/// With `require_full_support`, any collection in which some circuit
/// histogram misses a string is discarded and redrawn under the next seed;
/// the rejection count is reported.
pub fn empirical_error_variance<T: Real>(
    h: &Hamiltonian<T>,
    ansatz: &Circuit<T>,
    transform: Transform<'_, T>,
    shots: u64,
    trials: usize,
    seed: u64,
    require_full_support: bool,
) -> Result<EmpiricalVariance<T>> {
    if trials < 2 {
        return Err(Error::InvalidArgument("variance needs at least two trials".into()));
    }
    let plan = measurement_plan(h);
    let with_imag = matches!(transform, Transform::Phase(_));
    let exact = exact_transformed_energy(h, &ansatz.run(), transform)?;

    let mut errors = Vec::with_capacity(trials);
    let mut redraws = 0usize;
    let mut attempt = 0u64;
    let attempt_cap = (trials as u64) * 100;
    while errors.len() < trials {
        if attempt >= attempt_cap {
            return Err(Error::Estimator(format!(
                "coverage rejection rate too high: {redraws} redraws over {attempt} attempts"
            )));
        }
        let data =
            collect_shots(ansatz, &plan, shots, stage_seed(seed, "trial", attempt), with_imag)?;
        attempt += 1;
        if require_full_support && !full_support(&data) {
            redraws += 1;
            continue;
        }
        let table = interaction_table(h, &plan, &data, false)?;
        let sampled = match transform {
            Transform::Multiplicative(f) => table.multiplicative_loss(f),
            Transform::Phase(g) => table.phase_energy(g),
        };
        errors.push(exact - sampled);
    }

    let count = T::of(trials as f64);
    let mean: T = errors.iter().copied().sum::<T>() / count;
    let variance: T = errors.iter().map(|&e| (e - mean) * (e - mean)).sum::<T>()
        / T::of((trials - 1) as f64);
    Ok(EmpiricalVariance { trials, mean_error: mean, variance, redraws })
}

/// True when every histogram in the collection covers the full space.
pub fn full_support<T: Real>(data: &CollectedData<T>) -> bool {
    let dim = 1usize << data.n;
    data.ansatz.support().len() == dim
        && data.real.iter().all(|t| t.support().len() == dim)
        && data.imag.iter().flatten().all(|t| t.support().len() == dim)
}
