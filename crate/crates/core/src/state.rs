use crate::bits;
use crate::error::{Error, Result};
use crate::scalar::{Real, C};

/// Pure state of `n` qubits as a dense vector of 2^n complex amplitudes.
///
/// Indexing follows [`crate::bits`]: qubit 0 is the most significant bit.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector<T: Real> {
    n: usize,
    amps: Vec<C<T>>,
}

impl<T: Real> Statevector<T> {
    /// The computational basis state `|00..0>`.
    pub fn zero_state(n: usize) -> Self {
        let mut amps = vec![C::new(T::zero(), T::zero()); 1 << n];
        amps[0] = C::new(T::one(), T::zero());
        Self { n, amps }
    }

    /// Build from explicit amplitudes; the squared magnitudes must sum to 1.
    pub fn from_amplitudes(amps: Vec<C<T>>) -> Result<Self> {
        let dim = amps.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::DimensionMismatch { expected: dim.next_power_of_two().max(1), got: dim });
        }
        let n = dim.trailing_zeros() as usize;
        let norm: T = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - T::one()).abs() > T::norm_tolerance() {
            return Err(Error::NotNormalized { norm: norm.to_f64_lossy() });
        }
        Ok(Self { n, amps })
    }

    /// Build from unnormalized amplitudes by rescaling to unit norm.
    pub fn from_unnormalized(amps: Vec<C<T>>) -> Result<Self> {
        let dim = amps.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::DimensionMismatch { expected: dim.next_power_of_two().max(1), got: dim });
        }
        let norm_sqr: T = amps.iter().map(|a| a.norm_sqr()).sum();
        if norm_sqr <= T::zero() || !norm_sqr.is_finite() {
            return Err(Error::NotNormalized { norm: norm_sqr.to_f64_lossy() });
        }
        let scale = norm_sqr.sqrt().recip();
        let n = dim.trailing_zeros() as usize;
        let amps = amps.into_iter().map(|a| a * scale).collect();
        Ok(Self { n, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C<T>] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [C<T>] {
        &mut self.amps
    }

    pub fn amplitude(&self, index: usize) -> C<T> {
        self.amps[index]
    }

    /// Measurement probabilities `|<s|psi>|^2` for every basis index.
    pub fn probabilities(&self) -> Vec<T> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Inner product `<self|other>`.
    pub fn inner(&self, other: &Self) -> C<T> {
        debug_assert_eq!(self.n, other.n);
        self.amps
            .iter()
            .zip(&other.amps)
            .fold(C::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * *b)
    }

    /// Squared norm (1 up to rounding for any state built through the public API).
    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Render a basis index using this state's qubit count.
    pub fn bitstring(&self, index: usize) -> String {
        bits::to_bitstring(index, self.n)
    }
}
