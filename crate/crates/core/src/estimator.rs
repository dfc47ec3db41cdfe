//! Energy estimators over collected measurement data.
//!
//! The measured histograms are reduced once into an interaction table:
//! per circuit group, every sample `s` is folded onto its string pair
//! `(s', s~')` with the aggregated weight `sum_P h_P sign_P(s) p(s)`,
//! accumulated separately for real- and imaginary-part circuits. Energies
//! and their sensitivities to the network outputs are then sums over
//! table entries, so a training epoch never touches the raw histograms.
//!
//! With unit weights the table reproduces the plain ansatz energy; with a
//! multiplicative weight `f` it evaluates `sum w f(s')f(s~') / sum f^2 p_a`;
//! with a phase weight `g` it evaluates
//! `sum [w_re cos(dg) + w_im sin(dg)]`, `dg = g(s~') - g(s')`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::measurement::{
    star_reset, term_sign, tilde_transform, CollectedData, MeasurementPlan, ProbTable,
};
use crate::pauli::PauliString;
use crate::scalar::Real;
use crate::state::Statevector;

/// Relative pseudo-count mass spread over all strings when denominator
/// regularization is on.
pub const DENOMINATOR_EPSILON: f64 = 1e-12;

/// One aggregated `(s', s~')` interaction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairEntry<T: Real> {
    pub s_prime: usize,
    pub s_tilde: usize,
    pub w_real: T,
    pub w_imag: T,
}

/// Measurement data folded into pair weights and denominator entries.
#[derive(Debug, Clone)]
pub struct InteractionTable<T: Real> {
    n: usize,
    pairs: Vec<PairEntry<T>>,
    den: Vec<(usize, T)>,
    needed: Vec<usize>,
    has_imag: bool,
}

/// Fold collected data into an interaction table.
///
/// With `regularize_denominator` the ansatz histogram gets a uniform
/// pseudo-count mass of `DENOMINATOR_EPSILON` relative weight, keeping the
/// denominator bounded away from zero on any support.
pub fn interaction_table<T: Real>(
    h: &Hamiltonian<T>,
    plan: &MeasurementPlan,
    data: &CollectedData<T>,
    regularize_denominator: bool,
) -> Result<InteractionTable<T>> {
    if plan.n != data.n || h.n_qubits() != plan.n {
        return Err(Error::DimensionMismatch { expected: plan.n, got: data.n });
    }
    if data.real.len() != plan.groups.len() || data.imag.len() != plan.groups.len() {
        return Err(Error::LengthMismatch { expected: plan.groups.len(), got: data.real.len() });
    }
    let n = plan.n;
    let mut weights: BTreeMap<(usize, usize), (T, T)> = BTreeMap::new();
    let mut has_imag = false;
    for (g, group) in plan.groups.iter().enumerate() {
        let members: Vec<(T, &PauliString)> =
            group.members.iter().map(|&i| (h.terms()[i].coefficient, &h.terms()[i].string)).collect();
        let fold = |table: &ProbTable<T>, slot: usize, weights: &mut BTreeMap<(usize, usize), (T, T)>| {
            for (s, p) in table.iter() {
                let (s_prime, s_tilde) = match group.star {
                    None => (s, s),
                    Some(star) => {
                        let s_prime = star_reset(s, star.qubit, n);
                        (s_prime, tilde_transform(s_prime, &group.representative))
                    }
                };
                let mut w = T::zero();
                for (coeff, string) in &members {
                    let sign = term_sign(s, string, group.star.as_ref(), n);
                    w += *coeff * T::of(f64::from(sign)) * p;
                }
                let entry = weights.entry((s_prime, s_tilde)).or_insert((T::zero(), T::zero()));
                if slot == 0 {
                    entry.0 += w;
                } else {
                    entry.1 += w;
                }
            }
        };
        fold(&data.real[g], 0, &mut weights);
        if let Some(imag) = &data.imag[g] {
            fold(imag, 1, &mut weights);
            has_imag = true;
        }
    }
    let pairs: Vec<PairEntry<T>> = weights
        .into_iter()
        .map(|((s_prime, s_tilde), (w_real, w_imag))| PairEntry { s_prime, s_tilde, w_real, w_imag })
        .collect();

    let den: Vec<(usize, T)> = if regularize_denominator {
        let dim = 1usize << n;
        let eps = T::of(DENOMINATOR_EPSILON);
        let fill = eps / T::of(dim as f64);
        let norm = T::one() + eps;
        (0..dim).map(|s| (s, (data.ansatz.prob(s) + fill) / norm)).collect()
    } else {
        data.ansatz.iter().collect()
    };

    let mut needed: Vec<usize> = pairs
        .iter()
        .flat_map(|p| [p.s_prime, p.s_tilde])
        .chain(den.iter().map(|&(s, _)| s))
        .collect();
    needed.sort_unstable();
    needed.dedup();

    Ok(InteractionTable { n, pairs, den, needed, has_imag })
}

impl<T: Real> InteractionTable<T> {
    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn pairs(&self) -> &[PairEntry<T>] {
        &self.pairs
    }

    pub fn denominator_entries(&self) -> &[(usize, T)] {
        &self.den
    }

    /// Sorted distinct strings the losses read network values at.
    pub fn needed(&self) -> &[usize] {
        &self.needed
    }

    pub fn has_imag(&self) -> bool {
        self.has_imag
    }

    /// Energy of the bare ansatz: unit weights, unit denominator.
    pub fn unit_energy(&self) -> T {
        self.pairs.iter().map(|p| p.w_real).sum()
    }

    /// `sum w_re f(s')f(s~') / sum f^2 p_a` for a dense weight vector `f`.
    ///
    /// A vanishing denominator is not an error here: the quotient is left
    /// to float semantics and surfaces through the divergence check.
    pub fn multiplicative_loss(&self, f: &[T]) -> T {
        debug_assert_eq!(f.len(), 1 << self.n);
        let num: T = self.pairs.iter().map(|p| p.w_real * f[p.s_prime] * f[p.s_tilde]).sum();
        let den: T = self.den.iter().map(|&(s, p)| f[s] * f[s] * p).sum();
        num / den
    }

    /// Loss plus `dL/df(s)` accumulated into the dense `sens` buffer.
    pub fn multiplicative_loss_with_sensitivity(&self, f: &[T], sens: &mut [T]) -> T {
        debug_assert_eq!(f.len(), 1 << self.n);
        debug_assert_eq!(sens.len(), f.len());
        let num: T = self.pairs.iter().map(|p| p.w_real * f[p.s_prime] * f[p.s_tilde]).sum();
        let den: T = self.den.iter().map(|&(s, p)| f[s] * f[s] * p).sum();
        let loss = num / den;
        for p in &self.pairs {
            sens[p.s_prime] += p.w_real * f[p.s_tilde] / den;
            sens[p.s_tilde] += p.w_real * f[p.s_prime] / den;
        }
        let two = T::of(2.0);
        for &(s, prob) in &self.den {
            sens[s] -= loss * two * f[s] * prob / den;
        }
        loss
    }

    /// `sum [w_re cos(dg) + w_im sin(dg)]` for a dense phase vector `g`.
    pub fn phase_energy(&self, g: &[T]) -> T {
        debug_assert_eq!(g.len(), 1 << self.n);
        self.pairs
            .iter()
            .map(|p| {
                let delta = g[p.s_tilde] - g[p.s_prime];
                p.w_real * delta.cos() + p.w_imag * delta.sin()
            })
            .sum()
    }

    /// Phase energy plus `dE/dg(s)` accumulated into `sens`.
    pub fn phase_energy_with_sensitivity(&self, g: &[T], sens: &mut [T]) -> T {
        debug_assert_eq!(g.len(), 1 << self.n);
        debug_assert_eq!(sens.len(), g.len());
        let mut energy = T::zero();
        for p in &self.pairs {
            let delta = g[p.s_tilde] - g[p.s_prime];
            energy += p.w_real * delta.cos() + p.w_imag * delta.sin();
            let slope = -p.w_real * delta.sin() + p.w_imag * delta.cos();
            sens[p.s_tilde] += slope;
            sens[p.s_prime] -= slope;
        }
        energy
    }
}

/// Per-term expectation estimates with unit weights, in term order.
pub fn pauli_estimates_unit<T: Real>(
    h: &Hamiltonian<T>,
    plan: &MeasurementPlan,
    data: &CollectedData<T>,
) -> Result<Vec<T>> {
    if data.real.len() != plan.groups.len() {
        return Err(Error::LengthMismatch { expected: plan.groups.len(), got: data.real.len() });
    }
    let n = plan.n;
    let mut out = vec![T::zero(); h.terms().len()];
    for (g, group) in plan.groups.iter().enumerate() {
        for &index in &group.members {
            let string = &h.terms()[index].string;
            out[index] = data.real[g]
                .iter()
                .map(|(s, p)| T::of(f64::from(term_sign(s, string, group.star.as_ref(), n))) * p)
                .sum();
        }
    }
    Ok(out)
}

/// Ansatz energy from collected data: coefficient-weighted unit estimates.
pub fn ansatz_energy<T: Real>(
    h: &Hamiltonian<T>,
    plan: &MeasurementPlan,
    data: &CollectedData<T>,
) -> Result<T> {
    let estimates = pauli_estimates_unit(h, plan, data)?;
    Ok(h.terms().iter().zip(&estimates).map(|(t, &e)| t.coefficient * e).sum())
}

/// Single-term multiplicative-weight estimate:
/// `sum_s sign(s) f(s')f(s~') p_m(s) / sum_s f(s)^2 p_a(s)`.
///
/// For diagonal strings pass the ansatz table as `p_m`.
pub fn pauli_estimate_multiplicative<T: Real>(
    p: &PauliString,
    f: &[T],
    p_m: &ProbTable<T>,
    p_a: &ProbTable<T>,
) -> Result<T> {
    let n = p.len();
    if f.len() != 1 << n {
        return Err(Error::LengthMismatch { expected: 1 << n, got: f.len() });
    }
    let star = crate::measurement::star_qubit(p);
    let num: T = p_m
        .iter()
        .map(|(s, prob)| {
            let (s_prime, s_tilde) = match star {
                None => (s, s),
                Some(info) => {
                    let s_prime = star_reset(s, info.qubit, n);
                    (s_prime, tilde_transform(s_prime, p))
                }
            };
            T::of(f64::from(term_sign(s, p, star.as_ref(), n))) * f[s_prime] * f[s_tilde] * prob
        })
        .sum();
    let den: T = p_a.iter().map(|(s, prob)| f[s] * f[s] * prob).sum();
    if den <= T::zero() {
        return Err(Error::Estimator("multiplicative estimate has a non-positive denominator".into()));
    }
    Ok(num / den)
}

/// Single-term phase-weight estimate:
/// `sum_s sign(s) [cos(dg) p_re(s) + sin(dg) p_im(s)]`.
///
/// Diagonal strings take the ansatz table as `p_real` and no `p_imag`.
pub fn pauli_estimate_phase<T: Real>(
    p: &PauliString,
    g: &[T],
    p_real: &ProbTable<T>,
    p_imag: Option<&ProbTable<T>>,
) -> Result<T> {
    let n = p.len();
    if g.len() != 1 << n {
        return Err(Error::LengthMismatch { expected: 1 << n, got: g.len() });
    }
    let star = crate::measurement::star_qubit(p);
    if star.is_some() && p_imag.is_none() {
        return Err(Error::Estimator("off-diagonal phase estimate needs an imaginary-part table".into()));
    }
    let mut energy = T::zero();
    for (table, slot) in [(Some(p_real), 0usize), (p_imag, 1)] {
        let Some(table) = table else { continue };
        for (s, prob) in table.iter() {
            let sign = T::of(f64::from(term_sign(s, p, star.as_ref(), n)));
            let delta = match star {
                None => T::zero(),
                Some(info) => {
                    let s_prime = star_reset(s, info.qubit, n);
                    g[tilde_transform(s_prime, p)] - g[s_prime]
                }
            };
            let quad = if slot == 0 { delta.cos() } else { delta.sin() };
            energy += sign * quad * prob;
        }
        if star.is_none() {
            break;
        }
    }
    Ok(energy)
}

/// Classical post-processing applied to a statevector.
#[derive(Debug, Clone, Copy)]
pub enum Transform<'a, T: Real> {
    /// Rescale each amplitude by `f(s)` and renormalize.
    Multiplicative(&'a [T]),
    /// Rotate each amplitude by `exp(i g(s))`.
    Phase(&'a [T]),
}

/// Apply a transform exactly, by direct statevector arithmetic.
pub fn transformed_state<T: Real>(state: &Statevector<T>, transform: Transform<T>) -> Result<Statevector<T>> {
    let dim = state.dim();
    let amps = match transform {
        Transform::Multiplicative(f) => {
            if f.len() != dim {
                return Err(Error::LengthMismatch { expected: dim, got: f.len() });
            }
            let amps: Vec<_> = (0..dim).map(|s| state.amplitude(s).scale(f[s])).collect();
            return Statevector::from_unnormalized(amps);
        }
        Transform::Phase(g) => {
            if g.len() != dim {
                return Err(Error::LengthMismatch { expected: dim, got: g.len() });
            }
            (0..dim)
                .map(|s| state.amplitude(s) * crate::scalar::C::new(g[s].cos(), g[s].sin()))
                .collect()
        }
    };
    Statevector::from_amplitudes(amps)
}

/// Exact energy of the transformed state, by brute-force arithmetic.
///
/// This is the reference the sampled estimators are tested against.
pub fn exact_transformed_energy<T: Real>(
    h: &Hamiltonian<T>,
    state: &Statevector<T>,
    transform: Transform<T>,
) -> Result<T> {
    let transformed = transformed_state(state, transform)?;
    h.energy_oracle(&transformed)
}

/// Strings of the full space in index order; convenience for dense tables.
pub fn all_strings(n: usize) -> Vec<usize> {
    (0..1usize << n).collect()
}

/// Dense vector of network outputs over the whole space.
pub fn dense_values<T: Real, F: FnMut(usize) -> T>(n: usize, mut value: F) -> Vec<T> {
    (0..1usize << n).map(&mut value).collect()
}

pub use crate::bits::to_bitstring as bitstring_of;
