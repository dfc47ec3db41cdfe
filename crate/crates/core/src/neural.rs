//! Single-hidden-layer network mapping bitstrings to a scalar.
//!
//! Inputs are the bits of a basis-state index encoded as +/-1. The head
//! decides how the raw output `z` is read: `Amplitude` exponentiates it
//! (a strictly positive multiplicative weight), `Phase` and `Linear`
//! return it unchanged. Fresh networks start as the identity transform:
//! only the input weights are randomized, the output layer is zero, so
//! the amplitude head gives `f = 1` and the phase head `g = 0` everywhere.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Tanh,
    Relu,
    Sigmoid,
}

impl Activation {
    fn apply<T: Real>(self, z: T) -> T {
        match self {
            Activation::Tanh => z.tanh(),
            Activation::Relu => {
                if z > T::zero() {
                    z
                } else {
                    T::zero()
                }
            }
            Activation::Sigmoid => T::one() / (T::one() + (-z).exp()),
        }
    }

    fn derivative<T: Real>(self, z: T) -> T {
        match self {
            Activation::Tanh => {
                let t = z.tanh();
                T::one() - t * t
            }
            Activation::Relu => {
                if z > T::zero() {
                    T::one()
                } else {
                    T::zero()
                }
            }
            Activation::Sigmoid => {
                let s = T::one() / (T::one() + (-z).exp());
                s * (T::one() - s)
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Tanh => "tanh",
            Activation::Relu => "relu",
            Activation::Sigmoid => "sigmoid",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "tanh" => Some(Activation::Tanh),
            "relu" => Some(Activation::Relu),
            "sigmoid" => Some(Activation::Sigmoid),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Head {
    /// `exp(z)`: positive multiplicative weight.
    Amplitude,
    /// Raw `z`, consumed as a phase angle.
    Phase,
    /// Raw `z`, consumed as a signed multiplicative weight.
    Linear,
}

impl Head {
    pub fn name(self) -> &'static str {
        match self {
            Head::Amplitude => "amplitude",
            Head::Phase => "phase",
            Head::Linear => "linear",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "amplitude" => Some(Head::Amplitude),
            "phase" => Some(Head::Phase),
            "linear" => Some(Head::Linear),
            _ => None,
        }
    }
}

/// n -> hidden -> 1 perceptron over +/-1 encoded bitstrings.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpNetwork<T: Real> {
    n_in: usize,
    hidden: usize,
    activation: Activation,
    head: Head,
    /// Row-major `hidden x n_in`.
    w1: Vec<T>,
    b1: Vec<T>,
    w2: Vec<T>,
    b2: T,
}

impl<T: Real> MlpNetwork<T> {
    /// Seeded init: `w1` uniform in `[-1/sqrt(n_in), 1/sqrt(n_in)]`,
    /// everything else zero, so the network starts as the identity
    /// transform regardless of seed.
    pub fn new(n_in: usize, hidden: usize, activation: Activation, head: Head, seed: u64) -> Result<Self> {
        if n_in == 0 || hidden == 0 {
            return Err(Error::InvalidArgument("network needs at least one input and one hidden unit".into()));
        }
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let bound = 1.0 / (n_in as f64).sqrt();
        let w1 = (0..hidden * n_in).map(|_| T::of(rng.gen_range(-bound..=bound))).collect();
        Ok(Self {
            n_in,
            hidden,
            activation,
            head,
            w1,
            b1: vec![T::zero(); hidden],
            w2: vec![T::zero(); hidden],
            b2: T::zero(),
        })
    }

    pub fn n_inputs(&self) -> usize {
        self.n_in
    }

    pub fn hidden_units(&self) -> usize {
        self.hidden
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn head(&self) -> Head {
        self.head
    }

    pub fn parameter_count(&self) -> usize {
        self.hidden * (self.n_in + 2) + 1
    }

    /// Flat layout: `w1` row-major, then `b1`, `w2`, `b2`.
    pub fn parameters(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.parameter_count());
        out.extend_from_slice(&self.w1);
        out.extend_from_slice(&self.b1);
        out.extend_from_slice(&self.w2);
        out.push(self.b2);
        out
    }

    pub fn set_parameters(&mut self, params: &[T]) -> Result<()> {
        if params.len() != self.parameter_count() {
            return Err(Error::ParameterCount { expected: self.parameter_count(), got: params.len() });
        }
        let (w1, rest) = params.split_at(self.hidden * self.n_in);
        let (b1, rest) = rest.split_at(self.hidden);
        let (w2, b2) = rest.split_at(self.hidden);
        self.w1.copy_from_slice(w1);
        self.b1.copy_from_slice(b1);
        self.w2.copy_from_slice(w2);
        self.b2 = b2[0];
        Ok(())
    }

    fn input_bit(&self, s: usize, j: usize) -> T {
        // Qubit j is bit n_in-1-j of the index; encode 0 -> -1, 1 -> +1.
        if (s >> (self.n_in - 1 - j)) & 1 == 1 {
            T::one()
        } else {
            -T::one()
        }
    }

    fn pre_activations(&self, s: usize) -> Vec<T> {
        let mut z1 = self.b1.clone();
        for (k, z) in z1.iter_mut().enumerate() {
            let row = &self.w1[k * self.n_in..(k + 1) * self.n_in];
            for (j, &w) in row.iter().enumerate() {
                *z += w * self.input_bit(s, j);
            }
        }
        z1
    }

    /// Network output for the basis state with index `s`.
    pub fn forward(&self, s: usize) -> T {
        let z1 = self.pre_activations(s);
        let mut z = self.b2;
        for (k, &zk) in z1.iter().enumerate() {
            z += self.w2[k] * self.activation.apply(zk);
        }
        match self.head {
            Head::Amplitude => z.exp(),
            Head::Phase | Head::Linear => z,
        }
    }

    /// Outputs for every index in order.
    pub fn forward_all(&self, indices: &[usize]) -> Vec<T> {
        indices.iter().map(|&s| self.forward(s)).collect()
    }

    /// Add `upstream * d(output)/d(parameter)` for input `s` into `grad`,
    /// laid out like `parameters()`.
    pub fn accumulate_gradient(&self, s: usize, upstream: T, grad: &mut [T]) {
        debug_assert_eq!(grad.len(), self.parameter_count());
        let z1 = self.pre_activations(s);
        let dz = match self.head {
            Head::Amplitude => {
                let mut z = self.b2;
                for (k, &zk) in z1.iter().enumerate() {
                    z += self.w2[k] * self.activation.apply(zk);
                }
                upstream * z.exp()
            }
            Head::Phase | Head::Linear => upstream,
        };
        let (gw1, rest) = grad.split_at_mut(self.hidden * self.n_in);
        let (gb1, rest) = rest.split_at_mut(self.hidden);
        let (gw2, gb2) = rest.split_at_mut(self.hidden);
        gb2[0] += dz;
        for k in 0..self.hidden {
            let a = self.activation.apply(z1[k]);
            gw2[k] += dz * a;
            let dz1 = dz * self.w2[k] * self.activation.derivative(z1[k]);
            gb1[k] += dz1;
            let row = &mut gw1[k * self.n_in..(k + 1) * self.n_in];
            for (j, g) in row.iter_mut().enumerate() {
                *g += dz1 * self.input_bit(s, j);
            }
        }
    }

    /// Plain-text checkpoint: a shape header, then one parameter per line.
    pub fn save_text(&self) -> String {
        let mut out = format!(
            "mlp {} {} {} {}\n",
            self.n_in,
            self.hidden,
            self.activation.name(),
            self.head.name()
        );
        for p in self.parameters() {
            out.push_str(&format!("{p}\n"));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Checkpoint("empty checkpoint".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 5 || fields[0] != "mlp" {
            return Err(Error::Checkpoint(format!("bad header: {header:?}")));
        }
        let n_in: usize =
            fields[1].parse().map_err(|_| Error::Checkpoint(format!("bad input count: {}", fields[1])))?;
        let hidden: usize =
            fields[2].parse().map_err(|_| Error::Checkpoint(format!("bad hidden count: {}", fields[2])))?;
        let activation = Activation::parse(fields[3])
            .ok_or_else(|| Error::Checkpoint(format!("unknown activation: {}", fields[3])))?;
        let head =
            Head::parse(fields[4]).ok_or_else(|| Error::Checkpoint(format!("unknown head: {}", fields[4])))?;
        let mut net = Self::new(n_in, hidden, activation, head, 0)?;
        let mut params = Vec::with_capacity(net.parameter_count());
        for line in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let value = line
                .parse::<f64>()
                .map_err(|_| Error::Checkpoint(format!("bad parameter value: {line:?}")))?;
            params.push(T::of(value));
        }
        net.set_parameters(&params).map_err(|_| {
            Error::Checkpoint(format!("expected {} parameters, found {}", net.parameter_count(), params.len()))
        })?;
        Ok(net)
    }
}
