//! Pauli-sum Hamiltonians, the transverse-field Ising chain, and exact
//! ground energies via dense or iterative diagonalization.

use std::fmt;

use crate::eigen;
use crate::error::{Error, Result};
use crate::pauli::{pauli_expectation_oracle, PauliString};
use crate::scalar::{Real, C};
use crate::state::Statevector;

/// Largest system the exact solvers accept at all.
pub const MAX_QUBITS: usize = 16;
/// Largest system solved densely; above this the Lanczos path is used.
pub const DENSE_MAX_QUBITS: usize = 10;

/// One weighted Pauli string.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianTerm<T: Real> {
    pub coefficient: T,
    pub string: PauliString,
}

/// Chain boundary condition for the Ising constructor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Open,
    Periodic,
}

/// Hermitian operator `H = sum_P h_P P` on a fixed number of qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian<T: Real> {
    n: usize,
    terms: Vec<HamiltonianTerm<T>>,
}

impl<T: Real> Hamiltonian<T> {
    pub fn new(n: usize, terms: Vec<HamiltonianTerm<T>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("Hamiltonian needs at least one qubit".into()));
        }
        for term in &terms {
            if term.string.len() != n {
                return Err(Error::LengthMismatch { expected: n, got: term.string.len() });
            }
        }
        Ok(Self { n, terms })
    }

    /// Transverse-field Ising chain `-J sum Z_i Z_{i+1} - h sum X_i`.
    ///
    /// Terms are ordered bonds first, then fields, which fixes the layout
    /// of every downstream report.
    pub fn tfim(n: usize, j: T, h: T, boundary: Boundary) -> Result<Self> {
        use crate::pauli::PauliOp;
        if n == 0 {
            return Err(Error::InvalidArgument("Ising chain needs at least one site".into()));
        }
        let mut terms = Vec::new();
        let bonds = match boundary {
            Boundary::Open => n.saturating_sub(1),
            Boundary::Periodic => {
                if n > 2 {
                    n
                } else {
                    n.saturating_sub(1)
                }
            }
        };
        for b in 0..bonds {
            let mut ops = vec![PauliOp::I; n];
            ops[b] = PauliOp::Z;
            ops[(b + 1) % n] = PauliOp::Z;
            terms.push(HamiltonianTerm { coefficient: -j, string: PauliString::new(ops) });
        }
        for q in 0..n {
            let mut ops = vec![PauliOp::I; n];
            ops[q] = PauliOp::X;
            terms.push(HamiltonianTerm { coefficient: -h, string: PauliString::new(ops) });
        }
        Self::new(n, terms)
    }

    /// Parse the plain-text format: one `<coefficient> <letters>` per line,
    /// `#` starts a comment, blank lines are skipped.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut terms: Vec<HamiltonianTerm<T>> = Vec::new();
        let mut n: Option<usize> = None;
        for (line_index, raw) in text.lines().enumerate() {
            let line = line_index + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut parts = content.split_whitespace();
            let coeff_text = parts.next().expect("nonempty line has a first token");
            let letters = parts.next().ok_or_else(|| Error::HamiltonianParse {
                line,
                message: "missing Pauli string after coefficient".into(),
            })?;
            if parts.next().is_some() {
                return Err(Error::HamiltonianParse { line, message: "trailing tokens after term".into() });
            }
            let coefficient = coeff_text.parse::<f64>().map_err(|_| Error::HamiltonianParse {
                line,
                message: format!("invalid coefficient '{coeff_text}'"),
            })?;
            let string: PauliString = letters.parse().map_err(|e| Error::HamiltonianParse {
                line,
                message: format!("{e}"),
            })?;
            match n {
                None => n = Some(string.len()),
                Some(expected) if expected != string.len() => {
                    return Err(Error::HamiltonianParse {
                        line,
                        message: format!("term length {} does not match {}", string.len(), expected),
                    })
                }
                _ => {}
            }
            terms.push(HamiltonianTerm { coefficient: T::of(coefficient), string });
        }
        let n = n.ok_or_else(|| Error::HamiltonianParse { line: 0, message: "no terms found".into() })?;
        Self::new(n, terms)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[HamiltonianTerm<T>] {
        &self.terms
    }

    /// `sum_P |h_P|`; `-2 * one_norm` lower-bounds every phase-transformed energy.
    pub fn one_norm(&self) -> T {
        self.terms.iter().map(|t| t.coefficient.abs()).sum()
    }

    /// True when the matrix has no imaginary entries (every term has an
    /// even number of Y letters).
    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|t| t.string.y_count() % 2 == 0)
    }

    /// Matrix-free `y = H x` on raw amplitude slices.
    pub fn apply(&self, x: &[C<T>], y: &mut [C<T>]) {
        for value in y.iter_mut() {
            *value = C::new(T::zero(), T::zero());
        }
        for term in &self.terms {
            let flip = term.string.flip_mask();
            let h = term.coefficient;
            for (t, &amp) in x.iter().enumerate() {
                y[t ^ flip] = y[t ^ flip] + term.string.phase::<T>(t) * amp * h;
            }
        }
    }

    /// `<psi|H|psi>` evaluated exactly from the state amplitudes.
    pub fn energy_oracle(&self, state: &Statevector<T>) -> Result<T> {
        if state.n_qubits() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: state.n_qubits() });
        }
        let mut out = vec![C::new(T::zero(), T::zero()); state.dim()];
        self.apply(state.amplitudes(), &mut out);
        let value = state
            .amplitudes()
            .iter()
            .zip(&out)
            .fold(C::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * *b);
        Ok(value.re)
    }

    /// Per-term expectation values against the oracle, in term order.
    pub fn term_expectations(&self, state: &Statevector<T>) -> Result<Vec<T>> {
        self.terms.iter().map(|t| pauli_expectation_oracle(&t.string, state)).collect()
    }

    /// Minimum eigenvalue, dense for small systems and Lanczos above.
    pub fn exact_ground_energy(&self) -> Result<T> {
        if self.n <= DENSE_MAX_QUBITS {
            self.ground_energy_dense()
        } else if self.n <= MAX_QUBITS {
            self.ground_energy_lanczos()
        } else {
            Err(Error::TooManyQubits { n: self.n, max: MAX_QUBITS })
        }
    }

    /// Minimum eigenvalue through full dense diagonalization.
    pub fn ground_energy_dense(&self) -> Result<T> {
        if self.n > DENSE_MAX_QUBITS {
            return Err(Error::TooManyQubits { n: self.n, max: DENSE_MAX_QUBITS });
        }
        let dim = 1usize << self.n;
        if self.is_real() {
            let mut a = vec![T::zero(); dim * dim];
            for term in &self.terms {
                let flip = term.string.flip_mask();
                for t in 0..dim {
                    a[(t ^ flip) * dim + t] += term.coefficient * term.string.phase::<T>(t).re;
                }
            }
            let values = eigen::symmetric_eigenvalues(a, dim)?;
            Ok(values[0])
        } else {
            // Real symmetric embedding [[A, -B], [B, A]] of A + iB.
            let big = 2 * dim;
            let mut a = vec![T::zero(); big * big];
            for term in &self.terms {
                let flip = term.string.flip_mask();
                for t in 0..dim {
                    let phase = term.string.phase::<T>(t) * term.coefficient;
                    let row = t ^ flip;
                    a[row * big + t] += phase.re;
                    a[(row + dim) * big + (t + dim)] += phase.re;
                    a[row * big + (t + dim)] -= phase.im;
                    a[(row + dim) * big + t] += phase.im;
                }
            }
            let values = eigen::symmetric_eigenvalues(a, big)?;
            Ok(values[0])
        }
    }

    /// Minimum eigenvalue through matrix-free Lanczos.
    pub fn ground_energy_lanczos(&self) -> Result<T> {
        if self.n > MAX_QUBITS {
            return Err(Error::TooManyQubits { n: self.n, max: MAX_QUBITS });
        }
        let dim = 1usize << self.n;
        eigen::lanczos_min_eigenvalue(dim, 300, 0x1a_c0_5, |x, y| self.apply(x, y))
    }
}

impl<T: Real> fmt::Display for Hamiltonian<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for term in &self.terms {
            writeln!(f, "{} {}", term.coefficient, term.string)?;
        }
        Ok(())
    }
}
