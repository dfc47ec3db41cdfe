//! Self-contained eigensolvers: Householder + implicit-shift QL for dense
//! real symmetric matrices, and matrix-free Lanczos with full
//! reorthogonalization for Hermitian operators.
//!
//! Complex Hermitian `A + iB` is handled by its callers through the real
//! symmetric embedding `[[A, -B], [B, A]]`, which carries the same spectrum
//! with doubled multiplicity.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::scalar::{Real, C};

/// All eigenvalues of a dense symmetric matrix (row-major), ascending.
pub fn symmetric_eigenvalues<T: Real>(mut a: Vec<T>, dim: usize) -> Result<Vec<T>> {
    if a.len() != dim * dim {
        return Err(Error::DimensionMismatch { expected: dim * dim, got: a.len() });
    }
    if dim == 0 {
        return Ok(Vec::new());
    }
    let (mut d, mut e) = tridiagonalize(&mut a, dim);
    tridiagonal_eigenvalues(&mut d, &mut e)?;
    d.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    Ok(d)
}

/// Householder reduction to tridiagonal form; returns (diagonal, subdiagonal).
fn tridiagonalize<T: Real>(a: &mut [T], dim: usize) -> (Vec<T>, Vec<T>) {
    let idx = |i: usize, j: usize| i * dim + j;
    let mut e = vec![T::zero(); dim.saturating_sub(1)];
    let mut v = vec![T::zero(); dim];
    let mut w = vec![T::zero(); dim];

    for k in 0..dim.saturating_sub(2) {
        let mut xnorm2 = T::zero();
        for i in k + 1..dim {
            xnorm2 += a[idx(i, k)] * a[idx(i, k)];
        }
        let x0 = a[idx(k + 1, k)];
        let tail2 = xnorm2 - x0 * x0;
        if tail2 <= T::zero() || xnorm2 == T::zero() {
            e[k] = x0;
            continue;
        }
        let alpha = -xnorm2.sqrt().copysign(x0);
        // Householder vector v = x - alpha * e1 over rows k+1..dim.
        v[k + 1] = x0 - alpha;
        for i in k + 2..dim {
            v[i] = a[idx(i, k)];
        }
        let vnorm2 = xnorm2 - T::of(2.0) * alpha * x0 + alpha * alpha;
        let beta = T::of(2.0) / vnorm2;

        // w = beta * S v - (beta^2/2) (v' S v) v  applied to the trailing block S.
        let mut vdotp = T::zero();
        for i in k + 1..dim {
            let mut acc = T::zero();
            for j in k + 1..dim {
                acc += a[idx(i, j)] * v[j];
            }
            w[i] = beta * acc;
            vdotp += v[i] * w[i];
        }
        let half_beta_vp = beta * vdotp * T::of(0.5);
        for i in k + 1..dim {
            w[i] -= half_beta_vp * v[i];
        }
        for i in k + 1..dim {
            for j in k + 1..dim {
                a[idx(i, j)] = a[idx(i, j)] - v[i] * w[j] - w[i] * v[j];
            }
        }
        e[k] = alpha;
    }
    if dim >= 2 {
        e[dim - 2] = a[idx(dim - 1, dim - 2)];
    }
    let d = (0..dim).map(|i| a[idx(i, i)]).collect();
    (d, e)
}

/// Implicit-shift QL on a tridiagonal matrix; `d` becomes the eigenvalues.
pub fn tridiagonal_eigenvalues<T: Real>(d: &mut [T], e_sub: &mut [T]) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    if e_sub.len() + 1 != n {
        return Err(Error::DimensionMismatch { expected: n - 1, got: e_sub.len() });
    }
    let mut e = vec![T::zero(); n];
    e[..n - 1].copy_from_slice(e_sub);

    for l in 0..n {
        let mut iter = 0;
        'outer: loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= T::epsilon() * dd + T::min_positive_value() {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 64 {
                return Err(Error::Estimator("QL iteration did not converge".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (e[l] + e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = T::one();
            let mut c = T::one();
            let mut p = T::zero();
            let mut i = m;
            while i > l {
                let f = s * e[i - 1];
                let b = c * e[i - 1];
                r = f.hypot(g);
                e[i] = r;
                if r == T::zero() {
                    d[i] -= p;
                    e[m] = T::zero();
                    continue 'outer;
                }
                s = f / r;
                c = g / r;
                g = d[i] - p;
                let t = (d[i - 1] - g) * s + T::of(2.0) * c * b;
                p = s * t;
                d[i] = g + p;
                g = c * t - b;
                i -= 1;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    for (dst, src) in e_sub.iter_mut().zip(&e) {
        *dst = *src;
    }
    Ok(())
}

/// Smallest eigenvalue of a Hermitian operator given only its action.
///
/// Lanczos with full reorthogonalization; restarts on Krylov breakdown and
/// stops once the Ritz minimum stagnates at machine precision.
pub fn lanczos_min_eigenvalue<T: Real, F>(dim: usize, max_iter: usize, seed: u64, mut matvec: F) -> Result<T>
where
    F: FnMut(&[C<T>], &mut [C<T>]),
{
    if dim == 0 {
        return Err(Error::InvalidArgument("empty operator".into()));
    }
    let m_cap = max_iter.min(dim).max(1);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let random_unit = |rng: &mut ChaCha12Rng| -> Vec<C<T>> {
        let v: Vec<C<T>> = (0..dim)
            .map(|_| C::new(T::of(rng.gen_range(-1.0..1.0)), T::of(rng.gen_range(-1.0..1.0))))
            .collect();
        normalize(v)
    };

    let mut basis: Vec<Vec<C<T>>> = vec![random_unit(&mut rng)];
    let mut alphas: Vec<T> = Vec::new();
    let mut betas: Vec<T> = Vec::new();
    let mut work = vec![C::new(T::zero(), T::zero()); dim];
    let mut previous_min: Option<T> = None;
    let mut stable = 0;

    while basis.len() <= m_cap {
        let v = basis.last().expect("nonempty basis").clone();
        matvec(&v, &mut work);
        let alpha = dot(&v, &work).re;
        alphas.push(alpha);

        // w = A v - alpha v - beta v_prev, then reorthogonalize twice.
        for (wi, vi) in work.iter_mut().zip(&v) {
            *wi = *wi - *vi * alpha;
        }
        if let Some(&beta) = betas.last() {
            let prev = &basis[basis.len() - 2];
            for (wi, pi) in work.iter_mut().zip(prev) {
                *wi = *wi - *pi * beta;
            }
        }
        for _ in 0..2 {
            for b in &basis {
                let overlap = dot(b, &work);
                for (wi, bi) in work.iter_mut().zip(b) {
                    *wi = *wi - *bi * overlap;
                }
            }
        }

        let mut d = alphas.clone();
        let mut e = betas.clone();
        tridiagonal_eigenvalues(&mut d, &mut e)?;
        let theta = d.iter().copied().fold(T::infinity(), T::min);
        if let Some(prev) = previous_min {
            let tol = T::epsilon() * T::of(64.0) * (T::one() + theta.abs());
            if (theta - prev).abs() <= tol {
                stable += 1;
                if stable >= 3 {
                    return Ok(theta);
                }
            } else {
                stable = 0;
            }
        }
        previous_min = Some(theta);

        let beta = dot(&work, &work).re.sqrt();
        if basis.len() == dim {
            // Krylov space is the full space; the Ritz value is exact.
            return Ok(theta);
        }
        if beta <= T::epsilon() * T::of(16.0) * (T::one() + alpha.abs()) {
            // Breakdown: restart with a fresh direction orthogonal to the basis.
            let mut fresh = random_unit(&mut rng);
            for b in &basis {
                let overlap = dot(b, &fresh);
                for (fi, bi) in fresh.iter_mut().zip(b) {
                    *fi = *fi - *bi * overlap;
                }
            }
            let fresh = normalize(fresh);
            betas.push(T::zero());
            basis.push(fresh);
            continue;
        }
        let inv = beta.recip();
        basis.push(work.iter().map(|&x| x * inv).collect());
        betas.push(beta);
    }
    previous_min.ok_or_else(|| Error::Estimator("Lanczos produced no Ritz value".into()))
}

fn dot<T: Real>(a: &[C<T>], b: &[C<T>]) -> C<T> {
    a.iter()
        .zip(b)
        .fold(C::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * *y)
}

fn normalize<T: Real>(mut v: Vec<C<T>>) -> Vec<C<T>> {
    let norm: T = v.iter().map(|x| x.norm_sqr()).sum::<T>().sqrt();
    let inv = norm.recip();
    for x in &mut v {
        *x = *x * inv;
    }
    v
}
