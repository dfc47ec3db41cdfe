//! Gate set and circuit evaluation.
//!
//! Rotations follow the `exp(-i theta G / 2)` convention, so
//! `Rx(pi) = -i X` and `Rzz` puts phase `exp(-/+ i theta/2)` on even/odd
//! `Z x Z` parity.

use crate::bits;
use crate::error::{Error, Result};
use crate::scalar::{Real, C};
use crate::state::Statevector;

/// One gate from the fixed gate set of the simulator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate<T: Real> {
    H(usize),
    X(usize),
    /// S-dagger, `diag(1, -i)`.
    Sdg(usize),
    Rx(usize, T),
    Rz(usize, T),
    /// Two-qubit `ZZ` rotation; symmetric in its qubits.
    Rzz(usize, usize, T),
    Cx { control: usize, target: usize },
    Cy { control: usize, target: usize },
}

impl<T: Real> Gate<T> {
    /// Qubits the gate acts on.
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q) | Gate::X(q) | Gate::Sdg(q) | Gate::Rx(q, _) | Gate::Rz(q, _) => vec![q],
            Gate::Rzz(a, b, _) => vec![a, b],
            Gate::Cx { control, target } | Gate::Cy { control, target } => vec![control, target],
        }
    }
}

/// Ordered list of gates on a fixed number of qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit<T: Real> {
    n: usize,
    gates: Vec<Gate<T>>,
}

impl<T: Real> Circuit<T> {
    pub fn new(n: usize) -> Self {
        Self { n, gates: Vec::new() }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate<T>] {
        &self.gates
    }

    /// Append a gate after validating its qubit indices.
    pub fn push(&mut self, gate: Gate<T>) -> Result<()> {
        let qs = gate.qubits();
        for &q in &qs {
            if q >= self.n {
                return Err(Error::QubitOutOfRange { qubit: q, n: self.n });
            }
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(Error::DuplicateQubit { qubit: qs[0] });
        }
        self.gates.push(gate);
        Ok(())
    }

    /// Run the circuit on `|00..0>`.
    pub fn run(&self) -> Statevector<T> {
        let mut state = Statevector::zero_state(self.n);
        for gate in &self.gates {
            apply_gate(&mut state, gate);
        }
        state
    }
}

/// Apply one gate to a state in place.
pub fn apply_gate<T: Real>(state: &mut Statevector<T>, gate: &Gate<T>) {
    let n = state.n_qubits();
    match *gate {
        Gate::H(q) => {
            let h = T::FRAC_1_SQRT_2();
            let r = C::new(h, T::zero());
            single_qubit(state, q, [r, r, r, -r]);
        }
        Gate::X(q) => {
            let zero = C::new(T::zero(), T::zero());
            let one = C::new(T::one(), T::zero());
            single_qubit(state, q, [zero, one, one, zero]);
        }
        Gate::Sdg(q) => {
            let zero = C::new(T::zero(), T::zero());
            let one = C::new(T::one(), T::zero());
            let mi = C::new(T::zero(), -T::one());
            single_qubit(state, q, [one, zero, zero, mi]);
        }
        Gate::Rx(q, theta) => {
            let half = theta * T::of(0.5);
            let c = C::new(half.cos(), T::zero());
            let ms = C::new(T::zero(), -half.sin());
            single_qubit(state, q, [c, ms, ms, c]);
        }
        Gate::Rz(q, theta) => {
            let half = theta * T::of(0.5);
            let zero = C::new(T::zero(), T::zero());
            let minus = C::from_polar(T::one(), -half);
            let plus = C::from_polar(T::one(), half);
            single_qubit(state, q, [minus, zero, zero, plus]);
        }
        Gate::Rzz(a, b, theta) => {
            let half = theta * T::of(0.5);
            let even = C::from_polar(T::one(), -half);
            let odd = C::from_polar(T::one(), half);
            let ma = bits::qubit_mask(a, n);
            let mb = bits::qubit_mask(b, n);
            for (i, amp) in state.amplitudes_mut().iter_mut().enumerate() {
                let parity = ((i & ma) != 0) ^ ((i & mb) != 0);
                *amp = *amp * if parity { odd } else { even };
            }
        }
        Gate::Cx { control, target } => {
            let mc = bits::qubit_mask(control, n);
            let mt = bits::qubit_mask(target, n);
            let amps = state.amplitudes_mut();
            for i in 0..amps.len() {
                if (i & mc) != 0 && (i & mt) == 0 {
                    amps.swap(i, i | mt);
                }
            }
        }
        Gate::Cy { control, target } => {
            let mc = bits::qubit_mask(control, n);
            let mt = bits::qubit_mask(target, n);
            let pi = C::new(T::zero(), T::one());
            let mi = C::new(T::zero(), -T::one());
            let amps = state.amplitudes_mut();
            for i in 0..amps.len() {
                if (i & mc) != 0 && (i & mt) == 0 {
                    let j = i | mt;
                    let a = amps[i];
                    let b = amps[j];
                    amps[i] = mi * b;
                    amps[j] = pi * a;
                }
            }
        }
    }
}

/// Apply a 2x2 unitary `[u00 u01; u10 u11]` to `qubit`.
fn single_qubit<T: Real>(state: &mut Statevector<T>, qubit: usize, u: [C<T>; 4]) {
    let n = state.n_qubits();
    let m = bits::qubit_mask(qubit, n);
    let amps = state.amplitudes_mut();
    for i in 0..amps.len() {
        if (i & m) == 0 {
            let j = i | m;
            let a = amps[i];
            let b = amps[j];
            amps[i] = u[0] * a + u[1] * b;
            amps[j] = u[2] * a + u[3] * b;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn norm_sqr(state: &Statevector<f64>) -> f64 {
        state.norm_sqr()
    }

    #[test]
    fn x_on_first_qubit_reaches_index_two() {
        let mut c = Circuit::<f64>::new(2);
        c.push(Gate::X(0)).unwrap();
        let s = c.run();
        assert_eq!(s.amplitude(2), C::new(1.0, 0.0));
        assert_eq!(s.probabilities()[2], 1.0);
    }

    #[test]
    fn rx_pi_is_minus_i_x() {
        let mut c = Circuit::<f64>::new(1);
        c.push(Gate::Rx(0, std::f64::consts::PI)).unwrap();
        let s = c.run();
        assert!((s.amplitude(1) - C::new(0.0, -1.0)).norm() < 1e-12);
        assert!(s.amplitude(0).norm() < 1e-12);
    }

    #[test]
    fn hadamard_then_cx_makes_bell_state() {
        let mut c = Circuit::<f64>::new(2);
        c.push(Gate::H(0)).unwrap();
        c.push(Gate::Cx { control: 0, target: 1 }).unwrap();
        let s = c.run();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amplitude(0) - C::new(r, 0.0)).norm() < 1e-12);
        assert!(s.amplitude(1).norm() < 1e-12);
        assert!(s.amplitude(2).norm() < 1e-12);
        assert!((s.amplitude(3) - C::new(r, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn cy_phases_match_pauli_y() {
        // CY on |11> (control 0 set, target 1 set): Y|1> = -i|0>.
        let mut c = Circuit::<f64>::new(2);
        c.push(Gate::X(0)).unwrap();
        c.push(Gate::X(1)).unwrap();
        c.push(Gate::Cy { control: 0, target: 1 }).unwrap();
        let s = c.run();
        assert!((s.amplitude(2) - C::new(0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn rzz_phases_by_parity() {
        let theta = 0.7;
        let mut c = Circuit::<f64>::new(2);
        c.push(Gate::H(0)).unwrap();
        c.push(Gate::H(1)).unwrap();
        c.push(Gate::Rzz(0, 1, theta)).unwrap();
        let s = c.run();
        let even = C::from_polar(0.5, -theta / 2.0);
        let odd = C::from_polar(0.5, theta / 2.0);
        assert!((s.amplitude(0) - even).norm() < 1e-12);
        assert!((s.amplitude(1) - odd).norm() < 1e-12);
        assert!((s.amplitude(2) - odd).norm() < 1e-12);
        assert!((s.amplitude(3) - even).norm() < 1e-12);
    }

    #[test]
    fn push_rejects_out_of_range_and_duplicate_qubits() {
        let mut c = Circuit::<f64>::new(2);
        assert!(matches!(c.push(Gate::H(2)), Err(Error::QubitOutOfRange { qubit: 2, n: 2 })));
        assert!(matches!(
            c.push(Gate::Rzz(1, 1, 0.1)),
            Err(Error::DuplicateQubit { qubit: 1 })
        ));
    }

    #[test]
    fn every_gate_preserves_the_norm() {
        let gates: Vec<Gate<f64>> = vec![
            Gate::H(0),
            Gate::X(1),
            Gate::Sdg(2),
            Gate::Rx(0, 0.3),
            Gate::Rz(1, -1.1),
            Gate::Rzz(0, 2, 2.4),
            Gate::Cx { control: 0, target: 1 },
            Gate::Cy { control: 2, target: 0 },
        ];
        let mut c = Circuit::<f64>::new(3);
        c.push(Gate::H(0)).unwrap();
        c.push(Gate::Rx(1, 0.9)).unwrap();
        c.push(Gate::Rzz(1, 2, 0.5)).unwrap();
        let mut s = c.run();
        for g in gates {
            apply_gate(&mut s, &g);
            assert!((norm_sqr(&s) - 1.0).abs() < 1e-12, "norm broken by {g:?}");
        }
    }
}
