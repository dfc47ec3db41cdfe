//! Optimizers: Adam for network parameters, Nelder-Mead for circuit angles.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Adam with bias correction.
#[derive(Debug, Clone)]
pub struct Adam<T: Real> {
    learning_rate: T,
    beta1: T,
    beta2: T,
    epsilon: T,
    step: i32,
    m: Vec<T>,
    v: Vec<T>,
}

impl<T: Real> Adam<T> {
    pub fn new(learning_rate: T, dim: usize) -> Self {
        Self {
            learning_rate,
            beta1: T::of(0.9),
            beta2: T::of(0.999),
            epsilon: T::of(1e-8),
            step: 0,
            m: vec![T::zero(); dim],
            v: vec![T::zero(); dim],
        }
    }

    pub fn step_count(&self) -> i32 {
        self.step
    }

    /// One descent update of `params` along `grad`.
    pub fn step(&mut self, params: &mut [T], grad: &[T]) -> Result<()> {
        if params.len() != self.m.len() || grad.len() != self.m.len() {
            return Err(Error::LengthMismatch { expected: self.m.len(), got: params.len().max(grad.len()) });
        }
        self.step += 1;
        let bc1 = T::one() - self.beta1.powi(self.step);
        let bc2 = T::one() - self.beta2.powi(self.step);
        for i in 0..params.len() {
            self.m[i] = self.beta1 * self.m[i] + (T::one() - self.beta1) * grad[i];
            self.v[i] = self.beta2 * self.v[i] + (T::one() - self.beta2) * grad[i] * grad[i];
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            params[i] -= self.learning_rate * m_hat / (v_hat.sqrt() + self.epsilon);
        }
        Ok(())
    }
}

/// Result of a Nelder-Mead run.
#[derive(Debug, Clone)]
pub struct NelderMeadResult<T: Real> {
    pub x: Vec<T>,
    pub value: T,
    pub evaluations: usize,
    /// Best value seen after each objective evaluation; monotone
    /// non-increasing by construction, length equals `evaluations`.
    pub history: Vec<T>,
}

struct Tracker<'a, T: Real, F: FnMut(&[T]) -> T> {
    f: F,
    budget: usize,
    evaluations: usize,
    history: Vec<T>,
    best_x: &'a mut Vec<T>,
    best_value: T,
}

impl<'a, T: Real, F: FnMut(&[T]) -> T> Tracker<'a, T, F> {
    fn eval(&mut self, x: &[T]) -> Option<T> {
        if self.evaluations >= self.budget {
            return None;
        }
        let value = (self.f)(x);
        self.evaluations += 1;
        if value < self.best_value {
            self.best_value = value;
            self.best_x.clear();
            self.best_x.extend_from_slice(x);
        }
        self.history.push(self.best_value);
        Some(value)
    }
}

/// Derivative-free simplex minimization with a hard evaluation budget.
///
/// Standard reflect/expand/contract/shrink coefficients (1, 2, 0.5, 0.5).
/// When the simplex collapses below `tolerance` (value spread) with budget
/// to spare, it restarts around the incumbent best point with the original
/// step to escape degenerate geometry. Returns the best point ever
/// evaluated together with the per-evaluation best-so-far history.
pub fn nelder_mead<T: Real, F: FnMut(&[T]) -> T>(
    f: F,
    x0: &[T],
    initial_step: T,
    budget: usize,
    tolerance: T,
) -> Result<NelderMeadResult<T>> {
    nelder_mead_noisy(f, x0, initial_step, budget, tolerance, false)
}

/// `nelder_mead` with an optional defense against stochastic objectives.
///
/// With `reevaluate_best` the incumbent vertex is re-measured every
/// iteration, so a lucky draw cannot pin the simplex: fresh candidate
/// values then compete against an unbiased incumbent instead of a
/// selection-biased one, which is what stalls the plain method on
/// shot-sampled energies. Costs about one extra evaluation per iteration
/// and changes nothing on deterministic objectives except that cost.
pub fn nelder_mead_noisy<T: Real, F: FnMut(&[T]) -> T>(
    f: F,
    x0: &[T],
    initial_step: T,
    budget: usize,
    tolerance: T,
    reevaluate_best: bool,
) -> Result<NelderMeadResult<T>> {
    if x0.is_empty() {
        return Err(Error::InvalidArgument("nelder_mead needs at least one coordinate".into()));
    }
    if budget == 0 {
        return Err(Error::InvalidArgument("nelder_mead needs a nonzero evaluation budget".into()));
    }
    let dim = x0.len();
    let mut best_x = x0.to_vec();
    let mut tracker = Tracker {
        f,
        budget,
        evaluations: 0,
        history: Vec::with_capacity(budget),
        best_x: &mut best_x,
        best_value: T::infinity(),
    };

    let half = T::of(0.5);
    let two = T::of(2.0);
    let mut center = x0.to_vec();
    'runs: loop {
        // Fresh axis-aligned simplex around the current center.
        let mut simplex: Vec<(Vec<T>, T)> = Vec::with_capacity(dim + 1);
        {
            let Some(v) = tracker.eval(&center) else { break 'runs };
            simplex.push((center.clone(), v));
        }
        for i in 0..dim {
            let mut x = center.clone();
            x[i] += initial_step;
            let Some(v) = tracker.eval(&x) else { break 'runs };
            simplex.push((x, v));
        }
        loop {
            simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
            if reevaluate_best {
                let Some(v) = tracker.eval(&simplex[0].0) else { break 'runs };
                simplex[0].1 = v;
                simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
            }
            let spread = simplex[dim].1 - simplex[0].1;
            if spread < tolerance {
                if tracker.evaluations >= budget {
                    break 'runs;
                }
                // Converged with budget left: restart around the best point.
                center.copy_from_slice(tracker.best_x);
                continue 'runs;
            }
            let mut centroid = vec![T::zero(); dim];
            for (x, _) in &simplex[..dim] {
                for (c, &xi) in centroid.iter_mut().zip(x) {
                    *c += xi;
                }
            }
            let scale = T::one() / T::of(dim as f64);
            for c in centroid.iter_mut() {
                *c *= scale;
            }
            let worst = simplex[dim].clone();
            let reflected: Vec<T> =
                centroid.iter().zip(&worst.0).map(|(&c, &w)| c + (c - w)).collect();
            let Some(fr) = tracker.eval(&reflected) else { break 'runs };
            if fr < simplex[0].1 {
                let expanded: Vec<T> =
                    centroid.iter().zip(&worst.0).map(|(&c, &w)| c + two * (c - w)).collect();
                let Some(fe) = tracker.eval(&expanded) else { break 'runs };
                simplex[dim] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
                continue;
            }
            if fr < simplex[dim - 1].1 {
                simplex[dim] = (reflected, fr);
                continue;
            }
            let (base, fbase) = if fr < worst.1 { (&reflected, fr) } else { (&worst.0, worst.1) };
            let contracted: Vec<T> =
                centroid.iter().zip(base).map(|(&c, &b)| c + half * (b - c)).collect();
            let Some(fc) = tracker.eval(&contracted) else { break 'runs };
            if fc < fbase {
                simplex[dim] = (contracted, fc);
                continue;
            }
            // Shrink toward the best vertex.
            let best = simplex[0].0.clone();
            for entry in simplex.iter_mut().skip(1) {
                let x: Vec<T> = best.iter().zip(&entry.0).map(|(&b, &x)| b + half * (x - b)).collect();
                let Some(v) = tracker.eval(&x) else { break 'runs };
                *entry = (x, v);
            }
        }
    }

    let Tracker { evaluations, history, best_value, .. } = tracker;
    Ok(NelderMeadResult { x: best_x, value: best_value, evaluations, history })
}
