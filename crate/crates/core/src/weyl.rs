//! Weyl operators, Bell vectors and Bell projectors for local dimension `d`.
//!
//! `W_{k,l}|s⟩ = w^{k(s-l)} |s-l⟩` with `w = e^{2πi/d}` and all index arithmetic
//! in `Z_d`. Bell vectors are `(W_{k,l} ⊗ 1) Ω_{0,0}` where
//! `Ω_{0,0} = d^{-1/2} Σ_s |s⟩⊗|s⟩`, and `|s⟩⊗|t⟩` sits at index `s·d + t`.

use std::f64::consts::PI;

use crate::matcore::{inner, ComplexMatrix, C64};
use crate::{Error, Result};

const BASIS_TOL: f64 = 1e-12;

/// Primitive `d`-th root of unity raised to `power`.
pub fn root_of_unity(d: usize, power: i64) -> C64 {
    let p = power.rem_euclid(d as i64) as f64;
    C64::from_polar(1.0, 2.0 * PI * p / d as f64)
}

fn check_index(d: usize, k: usize, l: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    if k >= d || l >= d {
        return Err(Error::IndexOutOfRange(format!("(k, l) = ({k}, {l}) for d = {d}")));
    }
    Ok(())
}

pub fn weyl_operator(d: usize, k: usize, l: usize) -> Result<ComplexMatrix> {
    check_index(d, k, l)?;
    let mut m = ComplexMatrix::zeros(d, d);
    for s in 0..d {
        let target = (s + d - l) % d;
        m[(target, s)] = root_of_unity(d, (k * target) as i64);
    }
    Ok(m)
}

/// The canonical maximally entangled vector `Ω_{0,0}`.
pub fn omega00(d: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); d * d];
    let amp = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    for s in 0..d {
        v[s * d + s] = amp;
    }
    v
}

pub fn bell_vector(d: usize, k: usize, l: usize) -> Result<Vec<C64>> {
    check_index(d, k, l)?;
    let amp = 1.0 / (d as f64).sqrt();
    let mut v = vec![C64::new(0.0, 0.0); d * d];
    for s in 0..d {
        let t = (s + d - l) % d;
        v[t * d + s] = root_of_unity(d, (k * t) as i64) * amp;
    }
    Ok(v)
}

/// All Weyl operators and Bell data for one local dimension, indexed by `k·d + l`.
#[derive(Debug, Clone)]
pub struct WeylBasis {
    d: usize,
    weyl: Vec<ComplexMatrix>,
    bell_vec: Vec<Vec<C64>>,
    bell_proj: Vec<ComplexMatrix>,
}

/// Residuals of the basis invariants, as reported by `basis` on the CLI.
#[derive(Debug, Clone, Copy, Default, PartialEq, serde::Serialize)]
pub struct BasisReport {
    pub d: usize,
    pub projectors: usize,
    pub unitarity: f64,
    pub orthonormality: f64,
    pub completeness: f64,
    pub idempotence: f64,
    pub hermiticity: f64,
    pub reduced_states: f64,
}

impl BasisReport {
    pub fn max_residual(&self) -> f64 {
        [
            self.unitarity,
            self.orthonormality,
            self.completeness,
            self.idempotence,
            self.hermiticity,
            self.reduced_states,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

impl WeylBasis {
    /// Builds the basis and checks every invariant, failing loudly on a violation.
    pub fn build(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        let mut weyl = Vec::with_capacity(d * d);
        let mut bell_vec = Vec::with_capacity(d * d);
        let mut bell_proj = Vec::with_capacity(d * d);
        for k in 0..d {
            for l in 0..d {
                weyl.push(weyl_operator(d, k, l)?);
                let v = bell_vector(d, k, l)?;
                bell_proj.push(ComplexMatrix::outer(&v, &v));
                bell_vec.push(v);
            }
        }
        let basis = Self { d, weyl, bell_vec, bell_proj };
        let report = basis.check();
        if report.max_residual() > BASIS_TOL {
            return Err(Error::InvariantViolation(format!("Weyl basis for d = {d}: {report:?}")));
        }
        Ok(basis)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn weyl(&self, k: usize, l: usize) -> &ComplexMatrix {
        &self.weyl[k * self.d + l]
    }

    pub fn bell_vector(&self, k: usize, l: usize) -> &[C64] {
        &self.bell_vec[k * self.d + l]
    }

    pub fn projector(&self, k: usize, l: usize) -> &ComplexMatrix {
        &self.bell_proj[k * self.d + l]
    }

    /// Recomputes every invariant residual.
    pub fn check(&self) -> BasisReport {
        let d = self.d;
        let n = d * d;
        let mut r = BasisReport { d, projectors: self.bell_proj.len(), ..Default::default() };
        let id_d = ComplexMatrix::identity(d);
        let id_n = ComplexMatrix::identity(n);

        r.unitarity = self.weyl[0].max_abs_diff(&id_d);
        for w in &self.weyl {
            r.unitarity = r.unitarity.max((w * &w.adjoint()).max_abs_diff(&id_d));
        }
        for (i, a) in self.bell_vec.iter().enumerate() {
            for (j, b) in self.bell_vec.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                r.orthonormality = r.orthonormality.max((inner(a, b) - want).norm());
            }
        }
        let mut sum = ComplexMatrix::zeros(n, n);
        for p in &self.bell_proj {
            sum.add_scaled(1.0, p);
            r.idempotence = r.idempotence.max((p * p).max_abs_diff(p));
            r.hermiticity = r.hermiticity.max(p.hermiticity_error());
            let target = id_d.scale_real(1.0 / d as f64);
            let (ra, rb) = reduced_states(p, d);
            r.reduced_states = r.reduced_states.max(ra.max_abs_diff(&target)).max(rb.max_abs_diff(&target));
        }
        r.completeness = sum.max_abs_diff(&id_n);
        r
    }
}

/// Partial traces `(Tr_B M, Tr_A M)` of a `d² x d²` matrix.
pub fn reduced_states(m: &ComplexMatrix, d: usize) -> (ComplexMatrix, ComplexMatrix) {
    let a = ComplexMatrix::from_fn(d, d, |i, j| (0..d).map(|t| m[(i * d + t, j * d + t)]).sum());
    let b = ComplexMatrix::from_fn(d, d, |i, j| (0..d).map(|s| m[(s * d + i, s * d + j)]).sum());
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::tensor_product;

    fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
        a.max_abs_diff(b) <= tol
    }

    #[test]
    fn identity_and_clock() {
        assert_eq!(weyl_operator(3, 0, 0).unwrap(), ComplexMatrix::identity(3));
        let w = root_of_unity(3, 1);
        let clock = ComplexMatrix::from_diag(&[C64::new(1.0, 0.0), w, w * w]);
        assert!(close(&weyl_operator(3, 1, 0).unwrap(), &clock, 1e-15));
    }

    #[test]
    fn qubit_weyl_operators_are_paulis_up_to_phase() {
        let c = |re, im| C64::new(re, im);
        let paulis = [
            ComplexMatrix::identity(2),
            ComplexMatrix::from_rows(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap(),
            ComplexMatrix::from_rows(2, 2, vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]).unwrap(),
            ComplexMatrix::from_real_diag(&[1.0, -1.0]),
        ];
        for k in 0..2 {
            for l in 0..2 {
                let w = weyl_operator(2, k, l).unwrap();
                let matched = paulis.iter().any(|p| {
                    [c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0)]
                        .iter()
                        .any(|&ph| close(&w, &p.scale(ph), 1e-15))
                });
                assert!(matched, "W_({k},{l}) is not a Pauli up to phase");
            }
        }
        // W_{1,1} = -i sigma_y up to a global phase; here exactly i sigma_y.
        let w11 = weyl_operator(2, 1, 1).unwrap();
        assert!(close(&w11, &paulis[2].scale(c(0.0, 1.0)), 1e-15));
    }

    #[test]
    fn bell_vectors_match_closed_forms() {
        let h = 1.0 / 2f64.sqrt();
        let phi_plus = bell_vector(2, 0, 0).unwrap();
        let want = [h, 0.0, 0.0, h];
        assert!(phi_plus.iter().zip(want).all(|(a, b)| (a - C64::new(b, 0.0)).norm() < 1e-15));

        let t = 1.0 / 3f64.sqrt();
        let w = root_of_unity(3, 1);
        let v = bell_vector(3, 1, 0).unwrap();
        let mut want = vec![C64::new(0.0, 0.0); 9];
        want[0] = C64::new(t, 0.0);
        want[4] = w * t;
        want[8] = w * w * t;
        assert!(v.iter().zip(&want).all(|(a, b)| (a - b).norm() < 1e-15));
        assert_eq!(bell_vector(3, 0, 0).unwrap(), omega00(3));
    }

    #[test]
    fn bell_vectors_equal_weyl_tensor_identity_on_omega() {
        for d in 2..=5 {
            let om = omega00(d);
            for k in 0..d {
                for l in 0..d {
                    let big = tensor_product(&weyl_operator(d, k, l).unwrap(), &ComplexMatrix::identity(d));
                    let via_kron = big.matvec(&om);
                    let direct = bell_vector(d, k, l).unwrap();
                    assert!(via_kron.iter().zip(&direct).all(|(a, b)| (a - b).norm() < 1e-14));
                    assert!((crate::matcore::norm(&direct) - 1.0).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn weyl_composition_up_to_phase() {
        for d in 2..=5 {
            for (k, l, k2, l2) in (0..d)
                .flat_map(|k| (0..d).flat_map(move |l| (0..d).flat_map(move |k2| (0..d).map(move |l2| (k, l, k2, l2)))))
            {
                let prod = weyl_operator(d, k, l).unwrap().matmul(&weyl_operator(d, k2, l2).unwrap()).unwrap();
                let comp = weyl_operator(d, (k + k2) % d, (l + l2) % d).unwrap();
                // prod = z * comp with |z| = 1
                let z = (comp.adjoint().matmul(&prod).unwrap()).trace() / d as f64;
                assert!((z.norm() - 1.0).abs() < 1e-12);
                assert!(prod.max_abs_diff(&comp.scale(z)) < 1e-12);
            }
        }
    }

    #[test]
    fn basis_invariants_d2_to_d5() {
        for d in 2..=5 {
            let b = WeylBasis::build(d).unwrap();
            let r = b.check();
            assert_eq!(r.projectors, d * d);
            assert!(r.max_residual() <= 1e-12, "{r:?}");
        }
    }

    #[test]
    fn bad_arguments() {
        assert!(matches!(WeylBasis::build(1), Err(Error::InvalidDimension(1))));
        assert!(weyl_operator(3, 3, 0).is_err());
        assert!(bell_vector(3, 0, 5).is_err());
    }
}
