//! Pauli strings and the brute-force expectation oracle.

use std::fmt;
use std::str::FromStr;

use crate::bits;
use crate::error::{Error, Result};
use crate::scalar::{Real, C};
use crate::state::Statevector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PauliOp {
    I,
    X,
    Y,
    Z,
}

impl PauliOp {
    pub fn as_char(self) -> char {
        match self {
            PauliOp::I => 'I',
            PauliOp::X => 'X',
            PauliOp::Y => 'Y',
            PauliOp::Z => 'Z',
        }
    }
}

/// Tensor product of single-qubit Pauli operators, e.g. `IXY`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    ops: Vec<PauliOp>,
}

impl PauliString {
    pub fn new(ops: Vec<PauliOp>) -> Self {
        Self { ops }
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn op(&self, qubit: usize) -> PauliOp {
        self.ops[qubit]
    }

    pub fn ops(&self) -> &[PauliOp] {
        &self.ops
    }

    /// True when the string contains no X or Y letter.
    pub fn is_diagonal(&self) -> bool {
        self.ops.iter().all(|&op| op == PauliOp::I || op == PauliOp::Z)
    }

    /// True when the string is all identities.
    pub fn is_identity(&self) -> bool {
        self.ops.iter().all(|&op| op == PauliOp::I)
    }

    fn mask_where(&self, keep: impl Fn(PauliOp) -> bool) -> usize {
        let n = self.len();
        bits::mask_of(
            self.ops.iter().enumerate().filter(|(_, &op)| keep(op)).map(|(q, _)| q),
            n,
        )
    }

    /// Index mask of qubits carrying X.
    pub fn x_mask(&self) -> usize {
        self.mask_where(|op| op == PauliOp::X)
    }

    /// Index mask of qubits carrying Y.
    pub fn y_mask(&self) -> usize {
        self.mask_where(|op| op == PauliOp::Y)
    }

    /// Index mask of qubits carrying Z.
    pub fn z_mask(&self) -> usize {
        self.mask_where(|op| op == PauliOp::Z)
    }

    /// Index mask of qubits the string flips (X or Y).
    pub fn flip_mask(&self) -> usize {
        self.x_mask() | self.y_mask()
    }

    /// Number of Y letters.
    pub fn y_count(&self) -> usize {
        self.ops.iter().filter(|&&op| op == PauliOp::Y).count()
    }

    /// Matrix element phase: `P|t> = phase(t) |t XOR flip_mask>`.
    pub fn phase<T: Real>(&self, t: usize) -> C<T> {
        let sign = bits::parity_sign(t, self.z_mask()) * bits::parity_sign(t, self.y_mask());
        let s = if sign < 0 { -T::one() } else { T::one() };
        match self.y_count() % 4 {
            0 => C::new(s, T::zero()),
            1 => C::new(T::zero(), s),
            2 => C::new(-s, T::zero()),
            _ => C::new(T::zero(), -s),
        }
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut ops = Vec::with_capacity(s.len());
        for (position, found) in s.chars().enumerate() {
            ops.push(match found {
                'I' => PauliOp::I,
                'X' => PauliOp::X,
                'Y' => PauliOp::Y,
                'Z' => PauliOp::Z,
                _ => return Err(Error::PauliParse { position, found }),
            });
        }
        Ok(Self { ops })
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for op in &self.ops {
            write!(f, "{}", op.as_char())?;
        }
        Ok(())
    }
}

/// Apply the Pauli string to a state, returning `P|psi>`.
pub fn apply_pauli<T: Real>(p: &PauliString, state: &Statevector<T>) -> Result<Statevector<T>> {
    if p.len() != state.n_qubits() {
        return Err(Error::LengthMismatch { expected: state.n_qubits(), got: p.len() });
    }
    let mut out = state.clone();
    apply_pauli_amps(p, state.amplitudes(), out.amplitudes_mut());
    Ok(out)
}

/// `out[t XOR flip] = phase(t) * amps[t]`; `out` is fully overwritten.
pub(crate) fn apply_pauli_amps<T: Real>(p: &PauliString, amps: &[C<T>], out: &mut [C<T>]) {
    let flip = p.flip_mask();
    for (t, &a) in amps.iter().enumerate() {
        out[t ^ flip] = p.phase::<T>(t) * a;
    }
}

/// Brute-force `<psi|P|psi>`; the ground truth every estimator is checked against.
pub fn pauli_expectation_oracle<T: Real>(p: &PauliString, state: &Statevector<T>) -> Result<T> {
    let transformed = apply_pauli(p, state)?;
    let value = state.inner(&transformed);
    debug_assert!(
        value.im.abs() < T::of(1e-9),
        "Hermitian expectation came out complex: {value:?}"
    );
    Ok(value.re)
}
