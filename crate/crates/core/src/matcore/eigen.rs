//! Cyclic Jacobi eigensolver for small dense Hermitian matrices.

use super::matrix::{ComplexMatrix, C64, ONE, ZERO};
use crate::tolerances::{HERMITIAN_TOL, JACOBI_MAX_SWEEPS, JACOBI_OFFDIAG_TOL};
use crate::{Error, Result};

/// Eigenvalues in ascending order, optionally with matching unit eigenvectors.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Option<Vec<Vec<C64>>>,
}

impl Spectrum {
    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    /// Eigenvector belonging to the smallest eigenvalue.
    pub fn min_vector(&self) -> Option<&[C64]> {
        self.eigenvectors.as_ref().map(|v| v[0].as_slice())
    }
}

/// Full spectrum with eigenvectors.
pub fn hermitian_eigs(m: &ComplexMatrix) -> Result<Spectrum> {
    jacobi(m, true)
}

/// Eigenvalues only; skips eigenvector accumulation.
pub fn hermitian_eigvals(m: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(jacobi(m, false)?.eigenvalues)
}

pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigvals(m)?[0])
}

fn jacobi(m: &ComplexMatrix, want_vectors: bool) -> Result<Spectrum> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!("eigensolve of a {}x{} matrix", m.rows(), m.cols())));
    }
    let n = m.rows();
    let herm_err = m.hermiticity_error();
    if herm_err > HERMITIAN_TOL * m.max_abs().max(1.0) {
        return Err(Error::NotHermitian(herm_err));
    }

    // Work on the symmetrised copy so tiny rounding asymmetries do not leak in.
    let mut a: Vec<C64> = vec![ZERO; n * n];
    for i in 0..n {
        a[i * n + i] = C64::new(m[(i, i)].re, 0.0);
        for j in i + 1..n {
            let v = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            a[i * n + j] = v;
            a[j * n + i] = v.conj();
        }
    }
    let mut v: Vec<C64> = if want_vectors {
        let mut v = vec![ZERO; n * n];
        for i in 0..n {
            v[i * n + i] = ONE;
        }
        v
    } else {
        Vec::new()
    };

    let scale = m.frobenius_norm().max(f64::MIN_POSITIVE);
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= JACOBI_OFFDIAG_TOL * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, n, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].re.total_cmp(&a[j * n + j].re));
    let eigenvalues = order.iter().map(|&i| a[i * n + i].re).collect();
    let eigenvectors = want_vectors.then(|| order.iter().map(|&c| (0..n).map(|r| v[r * n + c]).collect()).collect());
    Ok(Spectrum { eigenvalues, eigenvectors })
}

/// One complex Jacobi rotation annihilating `a[p][q]`.
///
/// With `a[p][q] = |b| e^{iφ}` the unitary is
/// `V = [[c, s], [-s e^{-iφ}, c e^{-iφ}]]` acting on columns `p, q`,
/// and `A <- V† A V`.
fn rotate(a: &mut [C64], v: &mut [C64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let b = apq.norm();
    if b < f64::MIN_POSITIVE {
        return;
    }
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    let theta = 0.5 * (2.0 * b).atan2(aqq - app);
    let (s, c) = theta.sin_cos();
    let ph = (apq / b).conj();
    let v00 = C64::new(c, 0.0);
    let v01 = C64::new(s, 0.0);
    let v10 = -ph * s;
    let v11 = ph * c;

    for k in 0..n {
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        a[k * n + p] = akp * v00 + akq * v10;
        a[k * n + q] = akp * v01 + akq * v11;
    }
    for k in 0..n {
        let apk = a[p * n + k];
        let aqk = a[q * n + k];
        a[p * n + k] = v00.conj() * apk + v10.conj() * aqk;
        a[q * n + k] = v01.conj() * apk + v11.conj() * aqk;
    }
    a[p * n + q] = ZERO;
    a[q * n + p] = ZERO;
    a[p * n + p] = C64::new(a[p * n + p].re, 0.0);
    a[q * n + q] = C64::new(a[q * n + q].re, 0.0);

    if !v.is_empty() {
        for k in 0..n {
            let vkp = v[k * n + p];
            let vkq = v[k * n + q];
            v[k * n + p] = vkp * v00 + vkq * v10;
            v[k * n + q] = vkp * v01 + vkq * v11;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::matrix::{inner, partial_transpose};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_hermitian(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
        let g = ComplexMatrix::from_fn(n, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        (&g + &g.adjoint()).scale_real(0.5)
    }

    fn residual(m: &ComplexMatrix, s: &Spectrum) -> f64 {
        let vecs = s.eigenvectors.as_ref().unwrap();
        s.eigenvalues
            .iter()
            .zip(vecs)
            .map(|(&l, v)| {
                let mv = m.matvec(v);
                mv.iter().zip(v).map(|(a, b)| (a - b * l).norm_sqr()).sum::<f64>().sqrt()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn diagonal_sorted() {
        let s = hermitian_eigs(&ComplexMatrix::from_real_diag(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn maximally_mixed_partial_transpose() {
        let rho = ComplexMatrix::identity(9).scale_real(1.0 / 9.0);
        let pt = partial_transpose(&rho, 3, 3).unwrap();
        for l in hermitian_eigvals(&pt).unwrap() {
            assert!((l - 1.0 / 9.0).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = ComplexMatrix::identity(3);
        m[(0, 1)] = C64::new(1.0, 0.0);
        assert!(matches!(hermitian_eigs(&m), Err(Error::NotHermitian(_))));
        assert!(hermitian_eigs(&ComplexMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn random_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &n in &[3usize, 4, 9] {
            for _ in 0..1000 {
                let m = random_hermitian(&mut rng, n);
                let s = hermitian_eigs(&m).unwrap();
                assert!(residual(&m, &s) <= 1e-10);
                let tr: f64 = s.eigenvalues.iter().sum();
                assert!((tr - m.trace().re).abs() <= 1e-10);
                assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
                let vecs = s.eigenvectors.as_ref().unwrap();
                for i in 0..n {
                    for j in 0..n {
                        let want = if i == j { 1.0 } else { 0.0 };
                        assert!((inner(&vecs[i], &vecs[j]) - want).norm() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_hermitian(&mut rng, 9);
        let a = hermitian_eigs(&m).unwrap();
        let b = hermitian_eigs(&m).unwrap();
        assert_eq!(a.eigenvalues, b.eigenvalues);
        assert_eq!(a.eigenvectors, b.eigenvectors);
    }

    #[test]
    fn degenerate_spectrum() {
        // P = |u><u| with u spread over all components: eigenvalues 0 (x8) and 1.
        let u: Vec<C64> = (0..9).map(|i| C64::from_polar(1.0 / 3.0, i as f64)).collect();
        let p = ComplexMatrix::outer(&u, &u);
        let s = hermitian_eigs(&p).unwrap();
        assert!((s.max() - 1.0).abs() < 1e-13);
        assert!(s.eigenvalues[..8].iter().all(|l| l.abs() < 1e-13));
        assert!(residual(&p, &s) < 1e-12);
    }
}
