//! Measurement-circuit construction for transformed-state estimators.
//!
//! A Pauli string with at least one X or Y letter is measured through its
//! star qubit: the first X/Y position. The circuit appends, after the
//! ansatz, a controlled X or Y from the star onto every other X/Y position
//! and a basis rotation on the star, after which a computational-basis
//! sample `s` contributes through the pair of strings
//! `s' = star_reset(s)` and `s~' = tilde_transform(s')`, weighted by the
//! sign `(-1)^{s_star} * (-1)^{Z-parity(s)}`.
//!
//! Real-part circuits rotate the star with `H` (star letter X) or
//! `Sdg, H` (star letter Y); imaginary-part circuits, needed only by the
//! phase-transformed estimator, use `Rx(-pi/2)` (X) or `H` (Y). These
//! four choices are pinned by the expectation oracle, not by convention:
//! see the diagonalization tests at the bottom of this file and in
//! `tests/transform_oracles.rs`.
//!
//! Diagonal strings need no extra gates; their "measurement circuit" is
//! the ansatz itself and both pair strings equal the sample.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::FRAC_PI_2;

use crate::bits;
use crate::error::{Error, Result};
use crate::gate::{Circuit, Gate};
use crate::hamiltonian::Hamiltonian;
use crate::pauli::{PauliOp, PauliString};
use crate::sampler::{sample_counts, stage_seed, ShotCounts};
use crate::scalar::Real;
use crate::state::Statevector;

/// X or Y role of a qubit inside a measured string.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StarLetter {
    X,
    Y,
}

/// The first X/Y position of a Pauli string.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StarInfo {
    pub qubit: usize,
    pub letter: StarLetter,
}

/// First X/Y position, or `None` for diagonal strings.
pub fn star_qubit(p: &PauliString) -> Option<StarInfo> {
    for (q, &op) in p.ops().iter().enumerate() {
        match op {
            PauliOp::X => return Some(StarInfo { qubit: q, letter: StarLetter::X }),
            PauliOp::Y => return Some(StarInfo { qubit: q, letter: StarLetter::Y }),
            _ => {}
        }
    }
    None
}

/// Force the star bit of a measured string to 0.
pub fn star_reset(s: usize, star: usize, n: usize) -> usize {
    bits::clear(s, star, n)
}

/// Flip every X/Y position of the string.
pub fn tilde_transform(s: usize, p: &PauliString) -> usize {
    s ^ p.flip_mask()
}

/// Sign a measured string contributes with:
/// `(-1)^{star bit}` (when a star exists) times the Z-letter parity.
pub fn term_sign(s: usize, p: &PauliString, star: Option<&StarInfo>, n: usize) -> i32 {
    let star_sign = match star {
        Some(info) if bits::bit(s, info.qubit, n) == 1 => -1,
        _ => 1,
    };
    star_sign * bits::parity_sign(s, p.z_mask())
}

/// Which quadrature of the pair weight a circuit estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasurementPart {
    Real,
    Imag,
}

/// Ansatz plus the entangling and basis-rotation stage for one string.
pub fn build_measurement_circuit<T: Real>(
    ansatz: &Circuit<T>,
    p: &PauliString,
    part: MeasurementPart,
) -> Result<Circuit<T>> {
    if p.len() != ansatz.n_qubits() {
        return Err(Error::LengthMismatch { expected: ansatz.n_qubits(), got: p.len() });
    }
    let mut circuit = ansatz.clone();
    let Some(star) = star_qubit(p) else {
        return Ok(circuit);
    };
    for (q, &op) in p.ops().iter().enumerate() {
        if q == star.qubit {
            continue;
        }
        match op {
            PauliOp::X => circuit.push(Gate::Cx { control: star.qubit, target: q })?,
            PauliOp::Y => circuit.push(Gate::Cy { control: star.qubit, target: q })?,
            _ => {}
        }
    }
    match (part, star.letter) {
        (MeasurementPart::Real, StarLetter::X) => circuit.push(Gate::H(star.qubit))?,
        (MeasurementPart::Real, StarLetter::Y) => {
            circuit.push(Gate::Sdg(star.qubit))?;
            circuit.push(Gate::H(star.qubit))?;
        }
        (MeasurementPart::Imag, StarLetter::X) => {
            circuit.push(Gate::Rx(star.qubit, T::of(-FRAC_PI_2)))?
        }
        (MeasurementPart::Imag, StarLetter::Y) => circuit.push(Gate::H(star.qubit))?,
    }
    Ok(circuit)
}

/// Terms sharing one measurement circuit: identical X/Y placement.
#[derive(Debug, Clone)]
pub struct CircuitGroup {
    /// Representative string carrying the shared X/Y placement.
    pub representative: PauliString,
    pub star: Option<StarInfo>,
    pub flip_mask: usize,
    /// Indices into the Hamiltonian's term list, in order.
    pub members: Vec<usize>,
}

/// Grouping of a Hamiltonian's terms by measurement circuit.
#[derive(Debug, Clone)]
pub struct MeasurementPlan {
    pub n: usize,
    pub groups: Vec<CircuitGroup>,
}

impl MeasurementPlan {
    /// Number of distinct circuits to sample, counting the ansatz once.
    pub fn circuit_count(&self, with_imag: bool) -> usize {
        let star_groups = self.groups.iter().filter(|g| g.star.is_some()).count();
        1 + star_groups * if with_imag { 2 } else { 1 }
    }
}

/// Group the Hamiltonian's terms by X/Y placement, preserving first-seen order.
pub fn measurement_plan<T: Real>(h: &Hamiltonian<T>) -> MeasurementPlan {
    let n = h.n_qubits();
    let mut order: Vec<(usize, usize)> = Vec::new();
    let mut groups: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (index, term) in h.terms().iter().enumerate() {
        let key = (term.string.x_mask(), term.string.y_mask());
        groups
            .entry(key)
            .or_insert_with(|| {
                order.push(key);
                Vec::new()
            })
            .push(index);
    }
    let groups = order
        .into_iter()
        .map(|key| {
            let members = groups[&key].clone();
            let representative = h.terms()[members[0]].string.clone();
            let star = star_qubit(&representative);
            let flip_mask = representative.flip_mask();
            CircuitGroup { representative, star, flip_mask, members }
        })
        .collect();
    MeasurementPlan { n, groups }
}

/// Probabilities of one circuit, exact or reconstructed from counts.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbTable<T: Real> {
    probs: Vec<T>,
    support: Vec<usize>,
}

impl<T: Real> ProbTable<T> {
    pub fn from_state(state: &Statevector<T>) -> Self {
        Self::from_probs(state.probabilities())
    }

    pub fn from_counts(counts: &ShotCounts) -> Self {
        Self::from_probs(counts.frequencies())
    }

    pub fn from_probs(probs: Vec<T>) -> Self {
        let support = probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > T::zero())
            .map(|(i, _)| i)
            .collect();
        Self { probs, support }
    }

    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    pub fn prob(&self, index: usize) -> T {
        self.probs[index]
    }

    /// Ascending indices with nonzero probability.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, T)> + '_ {
        self.support.iter().map(move |&i| (i, self.probs[i]))
    }
}

/// How a data set was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollectionMode {
    Exact,
    Shots { shots: u64 },
}

/// Everything one training run measures: the ansatz distribution plus one
/// (or two) distributions per circuit group, all frozen before epoch 0.
#[derive(Debug, Clone)]
pub struct CollectedData<T: Real> {
    pub n: usize,
    pub mode: CollectionMode,
    pub ansatz: ProbTable<T>,
    /// Real-part table per plan group; the diagonal group shares the
    /// ansatz data rather than being sampled again.
    pub real: Vec<ProbTable<T>>,
    /// Imaginary-part table per plan group; `None` for diagonal groups or
    /// when imaginary parts were not requested.
    pub imag: Vec<Option<ProbTable<T>>>,
}

/// Exact probability tables for every circuit in the plan.
pub fn collect_exact<T: Real>(
    ansatz: &Circuit<T>,
    plan: &MeasurementPlan,
    with_imag: bool,
) -> Result<CollectedData<T>> {
    let ansatz_table = ProbTable::from_state(&ansatz.run());
    let mut real = Vec::with_capacity(plan.groups.len());
    let mut imag = Vec::with_capacity(plan.groups.len());
    for group in &plan.groups {
        if group.star.is_none() {
            real.push(ansatz_table.clone());
            imag.push(None);
            continue;
        }
        let rc = build_measurement_circuit(ansatz, &group.representative, MeasurementPart::Real)?;
        real.push(ProbTable::from_state(&rc.run()));
        if with_imag {
            let ic = build_measurement_circuit(ansatz, &group.representative, MeasurementPart::Imag)?;
            imag.push(Some(ProbTable::from_state(&ic.run())));
        } else {
            imag.push(None);
        }
    }
    Ok(CollectedData { n: plan.n, mode: CollectionMode::Exact, ansatz: ansatz_table, real, imag })
}

/// Sample every circuit in the plan exactly once with `shots` shots.
///
/// Per-circuit seeds are derived from `seed`, so the whole collection is
/// reproducible and no two circuits share a random stream.
pub fn collect_shots<T: Real>(
    ansatz: &Circuit<T>,
    plan: &MeasurementPlan,
    shots: u64,
    seed: u64,
    with_imag: bool,
) -> Result<CollectedData<T>> {
    let ansatz_state = ansatz.run();
    let ansatz_table =
        ProbTable::from_counts(&sample_counts(&ansatz_state, shots, stage_seed(seed, "ansatz", 0)));
    let mut real = Vec::with_capacity(plan.groups.len());
    let mut imag = Vec::with_capacity(plan.groups.len());
    for (g, group) in plan.groups.iter().enumerate() {
        if group.star.is_none() {
            real.push(ansatz_table.clone());
            imag.push(None);
            continue;
        }
        let rc = build_measurement_circuit(ansatz, &group.representative, MeasurementPart::Real)?;
        let counts = sample_counts(&rc.run(), shots, stage_seed(seed, "real", g as u64));
        real.push(ProbTable::from_counts(&counts));
        if with_imag {
            let ic = build_measurement_circuit(ansatz, &group.representative, MeasurementPart::Imag)?;
            let counts = sample_counts(&ic.run(), shots, stage_seed(seed, "imag", g as u64));
            imag.push(Some(ProbTable::from_counts(&counts)));
        } else {
            imag.push(None);
        }
    }
    Ok(CollectedData { n: plan.n, mode: CollectionMode::Shots { shots }, ansatz: ansatz_table, real, imag })
}

/// Observed ansatz support, per-group real-circuit supports, and the set of
/// strings the transformed numerator needs network values for.
#[derive(Debug, Clone)]
pub struct CoverageSets {
    pub ansatz_support: BTreeSet<usize>,
    pub group_supports: Vec<BTreeSet<usize>>,
    pub needed: BTreeSet<usize>,
}

impl CoverageSets {
    /// Needed strings never observed in the ansatz data.
    pub fn missing(&self) -> Vec<usize> {
        self.needed.difference(&self.ansatz_support).copied().collect()
    }
}

/// Build the coverage sets of a data collection.
pub fn collect_coverage<T: Real>(plan: &MeasurementPlan, data: &CollectedData<T>) -> CoverageSets {
    let ansatz_support: BTreeSet<usize> = data.ansatz.support().iter().copied().collect();
    let mut needed = BTreeSet::new();
    let mut group_supports = Vec::with_capacity(plan.groups.len());
    for (group, table) in plan.groups.iter().zip(&data.real) {
        let support: BTreeSet<usize> = table.support().iter().copied().collect();
        match group.star {
            None => needed.extend(support.iter().copied()),
            Some(star) => {
                for &s in &support {
                    let s_prime = star_reset(s, star.qubit, plan.n);
                    needed.insert(s_prime);
                    needed.insert(tilde_transform(s_prime, &group.representative));
                }
            }
        }
        group_supports.push(support);
    }
    CoverageSets { ansatz_support, group_supports, needed }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{build_hea, initial_parameters, AnsatzSpec};
    use crate::hamiltonian::Boundary;
    use crate::pauli::pauli_expectation_oracle;

    fn parse(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn star_is_first_x_or_y() {
        assert_eq!(star_qubit(&parse("IXY")).unwrap(), StarInfo { qubit: 1, letter: StarLetter::X });
        assert_eq!(star_qubit(&parse("ZYX")).unwrap(), StarInfo { qubit: 1, letter: StarLetter::Y });
        assert!(star_qubit(&parse("ZIZ")).is_none());
    }

    #[test]
    fn tilde_flips_x_and_y_positions() {
        // 110 with IXY flips the last two qubits.
        let (s, n) = bits::from_bitstring("110").unwrap();
        let p = parse("IXY");
        assert_eq!(bits::to_bitstring(tilde_transform(s, &p), n), "101");
    }

    #[test]
    fn pair_strings_fix_the_star_bit() {
        let p = parse("IXY");
        let star = star_qubit(&p).unwrap();
        for s in 0..8 {
            let s_prime = star_reset(s, star.qubit, 3);
            let s_tilde = tilde_transform(s_prime, &p);
            assert_eq!(bits::bit(s_prime, star.qubit, 3), 0);
            assert_eq!(bits::bit(s_tilde, star.qubit, 3), 1);
            assert_eq!(star_reset(s_prime, star.qubit, 3), s_prime);
        }
    }

    #[test]
    fn diagonal_strings_reuse_the_ansatz_circuit() {
        let spec = AnsatzSpec::new(2, 1);
        let ansatz = build_hea::<f64>(&spec, &[0.3, -0.2, 0.7]).unwrap();
        let c = build_measurement_circuit(&ansatz, &parse("ZZ"), MeasurementPart::Real).unwrap();
        assert_eq!(c, ansatz);
    }

    #[test]
    fn single_x_gets_only_the_star_rotation() {
        let spec = AnsatzSpec::new(2, 1);
        let ansatz = build_hea::<f64>(&spec, &[0.3, -0.2, 0.7]).unwrap();
        let c = build_measurement_circuit(&ansatz, &parse("IX"), MeasurementPart::Real).unwrap();
        assert_eq!(c.gates().len(), ansatz.gates().len() + 1);
        assert!(matches!(c.gates().last(), Some(Gate::H(1))));
    }

    #[test]
    fn two_x_string_gets_controlled_x_then_star_rotation() {
        let spec = AnsatzSpec::new(2, 1);
        let ansatz = build_hea::<f64>(&spec, &[0.3, -0.2, 0.7]).unwrap();
        let c = build_measurement_circuit(&ansatz, &parse("XX"), MeasurementPart::Real).unwrap();
        let extra = &c.gates()[ansatz.gates().len()..];
        assert!(matches!(extra[0], Gate::Cx { control: 0, target: 1 }));
        assert!(matches!(extra[1], Gate::H(0)));
    }

    #[test]
    fn plan_groups_by_xy_placement() {
        let h = Hamiltonian::<f64>::from_text("-1.0 ZZI\n-1.0 IZZ\n0.5 XZI\n0.25 XII\n0.1 YII\n").unwrap();
        let plan = measurement_plan(&h);
        // Diagonal group {ZZI, IZZ}, X-placement group {XZI, XII}, Y group {YII}.
        assert_eq!(plan.groups.len(), 3);
        assert_eq!(plan.groups[0].members, vec![0, 1]);
        assert!(plan.groups[0].star.is_none());
        assert_eq!(plan.groups[1].members, vec![2, 3]);
        assert_eq!(plan.groups[2].members, vec![4]);
        assert_eq!(plan.circuit_count(false), 3);
        assert_eq!(plan.circuit_count(true), 5);
    }

    /// The load-bearing identity: summing signed probabilities of the
    /// measurement circuit reproduces the exact expectation value.
    #[test]
    fn signed_probabilities_reproduce_expectations() {
        let strings = ["XII", "IYI", "XYZ", "ZYX", "YXY", "XXX", "ZZX", "YZI", "XIY", "YYI"];
        let spec = AnsatzSpec::new(3, 2);
        for (k, text) in strings.iter().enumerate() {
            let p = parse(text);
            let theta: Vec<f64> =
                initial_parameters::<f64>(&spec, 40 + k as u64).iter().map(|t| t * 25.0).collect();
            let ansatz = build_hea(&spec, &theta).unwrap();
            let state = ansatz.run();
            let exact = pauli_expectation_oracle(&p, &state).unwrap();
            let circuit = build_measurement_circuit(&ansatz, &p, MeasurementPart::Real).unwrap();
            let probs = circuit.run().probabilities();
            let star = star_qubit(&p);
            let estimate: f64 = probs
                .iter()
                .enumerate()
                .map(|(s, &prob)| f64::from(term_sign(s, &p, star.as_ref(), 3)) * prob)
                .sum();
            assert!((estimate - exact).abs() < 1e-10, "{text}: {estimate} vs {exact}");
        }
    }

    #[test]
    fn coverage_needed_set_pairs_every_observed_string() {
        let h = Hamiltonian::<f64>::tfim(3, 1.0, 1.0, Boundary::Open).unwrap();
        let plan = measurement_plan(&h);
        let spec = AnsatzSpec::new(3, 1);
        let ansatz = build_hea::<f64>(&spec, &initial_parameters(&spec, 3)).unwrap();
        let data = collect_shots(&ansatz, &plan, 40, 9, false).unwrap();
        let coverage = collect_coverage(&plan, &data);
        for (group, support) in plan.groups.iter().zip(&coverage.group_supports) {
            let Some(star) = group.star else { continue };
            for &s in support {
                let s_prime = star_reset(s, star.qubit, 3);
                assert!(coverage.needed.contains(&s_prime));
                assert!(coverage.needed.contains(&tilde_transform(s_prime, &group.representative)));
            }
        }
        // Shot data reuses one histogram for ansatz and diagonal group.
        assert_eq!(data.real[0], data.ansatz);
    }

    #[test]
    fn exact_collection_covers_everything() {
        let h = Hamiltonian::<f64>::tfim(3, 1.0, 1.0, Boundary::Open).unwrap();
        let plan = measurement_plan(&h);
        let spec = AnsatzSpec::new(3, 1);
        let ansatz = build_hea::<f64>(&spec, &initial_parameters(&spec, 5)).unwrap();
        let data = collect_exact(&ansatz, &plan, true).unwrap();
        let coverage = collect_coverage(&plan, &data);
        assert!(coverage.missing().is_empty());
        for (group, table) in plan.groups.iter().zip(&data.imag) {
            assert_eq!(group.star.is_some(), table.is_some());
        }
    }
}
