//! Hardware-efficient ansatz.
//!
//! One layer is a full row of `Rx` rotations followed by an `Rzz` rotation
//! on every nearest-neighbour pair of the open chain, each gate with its own
//! angle. Parameters are consumed layer by layer, rotations first.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::gate::{Circuit, Gate};
use crate::scalar::Real;

/// Shape of the hardware-efficient ansatz.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnsatzSpec {
    pub n: usize,
    pub layers: usize,
}

impl AnsatzSpec {
    pub fn new(n: usize, layers: usize) -> Self {
        Self { n, layers }
    }

    /// Number of angles the circuit consumes: `layers * (2n - 1)`.
    pub fn parameter_count(&self) -> usize {
        if self.n == 0 {
            0
        } else {
            self.layers * (2 * self.n - 1)
        }
    }
}

/// Build the ansatz circuit for the given parameter vector.
pub fn build_hea<T: Real>(spec: &AnsatzSpec, theta: &[T]) -> Result<Circuit<T>> {
    if spec.n == 0 {
        return Err(Error::InvalidArgument("ansatz needs at least one qubit".into()));
    }
    let expected = spec.parameter_count();
    if theta.len() != expected {
        return Err(Error::ParameterCount { expected, got: theta.len() });
    }
    let mut circuit = Circuit::new(spec.n);
    let mut next = theta.iter().copied();
    for _ in 0..spec.layers {
        for q in 0..spec.n {
            circuit.push(Gate::Rx(q, next.next().unwrap()))?;
        }
        for q in 0..spec.n - 1 {
            circuit.push(Gate::Rzz(q, q + 1, next.next().unwrap()))?;
        }
    }
    Ok(circuit)
}

/// Seeded initial angles, uniform in `[-0.1, 0.1]`.
pub fn initial_parameters<T: Real>(spec: &AnsatzSpec, seed: u64) -> Vec<T> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    (0..spec.parameter_count()).map(|_| T::of(rng.gen_range(-0.1..0.1))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_counts() {
        assert_eq!(AnsatzSpec::new(3, 1).parameter_count(), 5);
        assert_eq!(AnsatzSpec::new(12, 2).parameter_count(), 46);
        assert_eq!(AnsatzSpec::new(1, 3).parameter_count(), 3);
    }

    #[test]
    fn layer_structure_is_rotations_then_couplers() {
        let spec = AnsatzSpec::new(3, 1);
        let theta: Vec<f64> = (0..5).map(|k| 0.1 * k as f64).collect();
        let c = build_hea(&spec, &theta).unwrap();
        let gates = c.gates();
        assert_eq!(gates.len(), 5);
        assert!(matches!(gates[0], Gate::Rx(0, _)));
        assert!(matches!(gates[1], Gate::Rx(1, _)));
        assert!(matches!(gates[2], Gate::Rx(2, _)));
        assert!(matches!(gates[3], Gate::Rzz(0, 1, _)));
        assert!(matches!(gates[4], Gate::Rzz(1, 2, _)));
    }

    #[test]
    fn zero_layers_is_the_reference_state() {
        let spec = AnsatzSpec::new(4, 0);
        let c = build_hea::<f64>(&spec, &[]).unwrap();
        let s = c.run();
        assert!((s.amplitude(0).re - 1.0).abs() < 1e-12);
        assert!(s.probabilities()[1..].iter().all(|&p| p < 1e-24));
    }

    #[test]
    fn wrong_parameter_count_is_reported() {
        let spec = AnsatzSpec::new(3, 2);
        let theta = vec![0.0f64; 9];
        match build_hea(&spec, &theta) {
            Err(Error::ParameterCount { expected: 10, got: 9 }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn initial_parameters_are_seeded_and_bounded() {
        let spec = AnsatzSpec::new(5, 2);
        let a: Vec<f64> = initial_parameters(&spec, 9);
        let b: Vec<f64> = initial_parameters(&spec, 9);
        let c: Vec<f64> = initial_parameters(&spec, 10);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.iter().all(|x| x.abs() <= 0.1));
    }
}
