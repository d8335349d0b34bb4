//! Product-state screening `min ⟨e⊗f|K|e⊗f⟩`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::family::{angles_to_vector, PhiAngles};
use crate::matcore::{hermitian_eigs, kron_vec, nelder_mead, normalize, ComplexMatrix, C64, NELDER_MEAD_MAX_DIM};
use crate::{Error, Result};

const SEESAW_ROUNDS: usize = 50;

fn haar_vector(d: usize, rng: &mut ChaCha8Rng) -> Vec<C64> {
    let mut v: Vec<C64> =
        (0..d).map(|_| C64::new(StandardNormal.sample(&mut *rng), StandardNormal.sample(&mut *rng))).collect();
    normalize(&mut v);
    v
}

fn local_dim(k: &ComplexMatrix) -> Result<usize> {
    let n = k.rows();
    let d = (n as f64).sqrt().round() as usize;
    if !k.is_square() || d * d != n || d < 2 {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} is not a bipartite d^2 x d^2 operator",
            k.rows(),
            k.cols()
        )));
    }
    Ok(d)
}

fn product_value(k: &ComplexMatrix, e: &[C64], f: &[C64]) -> f64 {
    k.expectation(&kron_vec(e, f))
}

/// `(1 ⊗ ⟨f|) K (1 ⊗ |f⟩)` when `first` is true, `(⟨e| ⊗ 1) K (|e⟩ ⊗ 1)` otherwise.
fn contract(k: &ComplexMatrix, d: usize, v: &[C64], first: bool) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |i, j| {
        let mut s = C64::new(0.0, 0.0);
        for t in 0..d {
            for u in 0..d {
                let entry = if first { k[(i * d + t, j * d + u)] } else { k[(t * d + i, u * d + j)] };
                s += v[t].conj() * entry * v[u];
            }
        }
        s
    })
}

/// Alternating exact minimisation over one factor with the other fixed.
fn seesaw(k: &ComplexMatrix, d: usize, mut e: Vec<C64>, mut f: Vec<C64>) -> Result<f64> {
    let mut value = product_value(k, &e, &f);
    for _ in 0..SEESAW_ROUNDS {
        let se = hermitian_eigs(&contract(k, d, &f, true))?;
        e = se.min_vector().expect("eigenvectors").to_vec();
        let sf = hermitian_eigs(&contract(k, d, &e, false))?;
        f = sf.min_vector().expect("eigenvectors").to_vec();
        let next = sf.min();
        if value - next < 1e-15 {
            value = value.min(next);
            break;
        }
        value = next;
    }
    Ok(value)
}

/// Minimum of `⟨e⊗f|K|e⊗f⟩` over `samples` Haar-random product vectors, refined
/// locally from the best sample.
pub fn product_state_min(k: &ComplexMatrix, samples: usize, seed: u64) -> Result<f64> {
    let d = local_dim(k)?;
    if !k.is_hermitian(1e-12) {
        return Err(Error::NotHermitian(k.hermiticity_error()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = (f64::INFINITY, Vec::new(), Vec::new());
    for _ in 0..samples.max(1) {
        let e = haar_vector(d, &mut rng);
        let f = haar_vector(d, &mut rng);
        let v = product_value(k, &e, &f);
        if v < best.0 {
            best = (v, e, f);
        }
    }
    let (mut value, mut e, mut f) = best;
    let na = PhiAngles::num_angles(d);
    if 2 * na <= NELDER_MEAD_MAX_DIM {
        let start: Vec<f64> =
            PhiAngles::from_vector(&e).angles.into_iter().chain(PhiAngles::from_vector(&f).angles).collect();
        let r = nelder_mead(
            |x| product_value(k, &angles_to_vector(&x[..na]), &angles_to_vector(&x[na..])),
            &start,
            0.2,
            1e-10,
            4000,
        )?;
        if r.value < value {
            value = r.value;
            e = angles_to_vector(&r.argmin[..na]);
            f = angles_to_vector(&r.argmin[na..]);
        }
    }
    Ok(value.min(seesaw(k, d, e, f)?))
}
