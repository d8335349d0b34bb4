//! The line-witness family `K = (λ/d)·1 + Σ_k κ_k P_{k,0}` and its `M_Φ` test.
//!
//! For product vectors `e ⊗ f` one has
//! `⟨e⊗f|K|e⊗f⟩ = (1/d)·⟨e|M_Φ|e⟩` with `Φ = conj(f)`, so `K` is a witness
//! exactly when `M_Φ ⪰ 0` for every unit `Φ`.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::matcore::{hermitian_eigs, hermitian_eigvals, inner, nelder_mead, ComplexMatrix, C64};
use crate::weyl::{root_of_unity, WeylBasis};
use crate::{Error, Result};

/// Witness parameters; `kappa[k]` multiplies `P_{k,0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineWitness {
    pub lambda: f64,
    pub kappa: Vec<f64>,
}

impl LineWitness {
    pub fn new(lambda: f64, kappa: Vec<f64>) -> Self {
        Self { lambda, kappa }
    }

    pub fn d(&self) -> usize {
        self.kappa.len()
    }

    /// `(λ, κ_0, ..., κ_{d-1})`
    pub fn to_vec(&self) -> Vec<f64> {
        std::iter::once(self.lambda).chain(self.kappa.iter().copied()).collect()
    }

    pub fn from_slice(x: &[f64]) -> Self {
        Self { lambda: x[0], kappa: x[1..].to_vec() }
    }

    pub fn in_box(&self) -> bool {
        self.to_vec().iter().all(|v| (-1.0..=1.0).contains(v))
    }

    /// `Tr K = d·λ + Σ κ_k`.
    pub fn trace(&self) -> f64 {
        self.d() as f64 * self.lambda + self.kappa.iter().sum::<f64>()
    }

    /// `Tr(K ρ)` for a point with Bell coefficients `c`: `λ/d + Σ κ_k c_{k,0}`.
    pub fn expectation(&self, p: &crate::simplex::SimplexPoint) -> f64 {
        let d = self.d();
        self.lambda / d as f64 + (0..d).map(|k| self.kappa[k] * p.coeff(k, 0)).sum::<f64>()
    }
}

/// Gauge-fixed angles of a unit vector in `C^d`: `d-1` polar angles followed by
/// `d-1` relative phases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiAngles {
    pub angles: Vec<f64>,
}

impl PhiAngles {
    pub fn new(angles: Vec<f64>) -> Self {
        Self { angles }
    }

    pub fn num_angles(d: usize) -> usize {
        2 * (d - 1)
    }

    pub fn dim(&self) -> usize {
        self.angles.len() / 2 + 1
    }

    /// Hyperspherical magnitudes with phases on components `1..d`, then
    /// rotated so that the first non-zero component is real and positive.
    pub fn to_vector(&self) -> Vec<C64> {
        angles_to_vector(&self.angles)
    }

    pub fn from_vector(v: &[C64]) -> Self {
        let mut v = v.to_vec();
        gauge_fix(&mut v);
        let d = v.len();
        let mags: Vec<f64> = v.iter().map(|z| z.norm()).collect();
        let mut angles = Vec::with_capacity(2 * (d - 1));
        for i in 0..d - 1 {
            let tail: f64 = mags[i + 1..].iter().map(|m| m * m).sum::<f64>().sqrt();
            angles.push(tail.atan2(mags[i]));
        }
        for z in &v[1..] {
            angles.push(z.arg());
        }
        Self { angles }
    }
}

pub(crate) fn angles_to_vector(angles: &[f64]) -> Vec<C64> {
    let d = angles.len() / 2 + 1;
    let (polar, phases) = angles.split_at(d - 1);
    let mut v = Vec::with_capacity(d);
    let mut s = 1.0;
    for (i, &th) in polar.iter().enumerate() {
        let mag = s * th.cos();
        let ph = if i == 0 { 0.0 } else { phases[i - 1] };
        v.push(C64::from_polar(mag, ph));
        s *= th.sin();
    }
    v.push(C64::from_polar(s, phases[d - 2]));
    gauge_fix(&mut v);
    v
}

fn gauge_fix(v: &mut [C64]) {
    if let Some(z) = v.iter().find(|z| z.norm() > 1e-300).copied() {
        let ph = z.conj() / z.norm();
        for x in v.iter_mut() {
            *x *= ph;
        }
    }
}

fn check_dims(kw: &LineWitness, basis: &WeylBasis) -> Result<()> {
    if kw.d() != basis.d() {
        return Err(Error::DimensionMismatch(format!("witness has {} kappas, basis has d = {}", kw.d(), basis.d())));
    }
    Ok(())
}

/// `(λ/d)·1_{d²} + Σ_k κ_k P_{k,0}`.
pub fn witness_matrix(kw: &LineWitness, basis: &WeylBasis) -> Result<ComplexMatrix> {
    check_dims(kw, basis)?;
    let d = basis.d();
    let mut k = ComplexMatrix::identity(d * d).scale_real(kw.lambda / d as f64);
    for (i, &kappa) in kw.kappa.iter().enumerate() {
        k.add_scaled(kappa, basis.projector(i, 0));
    }
    Ok(k)
}

/// Clock phases `w^{k s}`: `W_{k,0}` is `diag(clock[k])`.
fn clock_table(d: usize) -> Vec<Vec<C64>> {
    (0..d).map(|k| (0..d).map(|s| root_of_unity(d, (k * s) as i64)).collect()).collect()
}

fn m_phi_from_vector(kw: &LineWitness, clock: &[Vec<C64>], phi: &[C64]) -> ComplexMatrix {
    let d = phi.len();
    // Σ_k κ_k (W_kΦ)(W_kΦ)† has entries Φ_s conj(Φ_t) Σ_k κ_k w^{k(s-t)}.
    let circ: Vec<C64> = (0..d).map(|r| (0..d).map(|k| clock[k][r] * kw.kappa[k]).sum()).collect();
    ComplexMatrix::from_fn(d, d, |s, t| {
        let diag = if s == t { kw.lambda } else { 0.0 };
        phi[s] * phi[t].conj() * circ[(s + d - t) % d] + diag
    })
}

/// `λ·1_d + Σ_k κ_k W_{k,0}|Φ⟩⟨Φ|W_{k,0}†`.
pub fn m_phi(kw: &LineWitness, phi: &PhiAngles, basis: &WeylBasis) -> Result<ComplexMatrix> {
    check_dims(kw, basis)?;
    if phi.angles.len() != PhiAngles::num_angles(basis.d()) {
        return Err(Error::DimensionMismatch(format!("{} angles for d = {}", phi.angles.len(), basis.d())));
    }
    let d = basis.d();
    let v = phi.to_vector();
    let mut m = ComplexMatrix::identity(d).scale_real(kw.lambda);
    for (k, &kappa) in kw.kappa.iter().enumerate() {
        let u = basis.weyl(k, 0).matvec(&v);
        m.add_scaled(kappa, &ComplexMatrix::outer(&u, &u));
    }
    Ok(m)
}

/// Coefficients of the cut `⟨v|M_Φ|v⟩ >= 0` in the variables `(λ, κ_0, ...)`.
pub fn cut_coefficients(phi: &[C64], v: &[C64]) -> Vec<f64> {
    let d = phi.len();
    let clock = clock_table(d);
    let vv = inner(v, v).re;
    std::iter::once(vv)
        .chain((0..d).map(|k| {
            let wphi: Vec<C64> = (0..d).map(|s| clock[k][s] * phi[s]).collect();
            inner(v, &wphi).norm_sqr()
        }))
        .collect()
}

/// One local minimum of `λ_min(M_Φ)`.
#[derive(Debug, Clone)]
pub struct MphiMinimum {
    pub value: f64,
    pub phi: PhiAngles,
    /// Unit eigenvector of `M_Φ` for the smallest eigenvalue.
    pub eigvec: Vec<C64>,
}

/// Multistart Nelder–Mead over the `Φ` angles.
pub struct MphiMinimizer {
    d: usize,
    clock: Vec<Vec<C64>>,
    pub nm_scale: f64,
    pub nm_tol: f64,
    pub nm_max_iter: usize,
}

impl MphiMinimizer {
    pub fn new(d: usize) -> Self {
        Self { d, clock: clock_table(d), nm_scale: 0.35, nm_tol: 1e-9, nm_max_iter: 4000 }
    }

    pub fn value_at(&self, kw: &LineWitness, angles: &[f64]) -> f64 {
        let phi = angles_to_vector(angles);
        let m = m_phi_from_vector(kw, &self.clock, &phi);
        hermitian_eigvals(&m).map(|e| e[0]).unwrap_or(f64::INFINITY)
    }

    /// Quasi-random start angles: a Halton sequence shifted by a seeded offset.
    pub fn starts(&self, starts: usize, seed: u64) -> Vec<Vec<f64>> {
        let dim = PhiAngles::num_angles(self.d);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shift: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>()).collect();
        (1..=starts)
            .map(|i| {
                (0..dim)
                    .map(|j| {
                        let u = (halton(i, PRIMES[j]) + shift[j]).fract();
                        if j < self.d - 1 {
                            u * FRAC_PI_2
                        } else {
                            u * 2.0 * PI
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// Local minima from every start plus `extra` warm starts, best first.
    pub fn local_minima(
        &self,
        kw: &LineWitness,
        starts: usize,
        seed: u64,
        extra: &[Vec<f64>],
    ) -> Result<Vec<MphiMinimum>> {
        if kw.d() != self.d {
            return Err(Error::DimensionMismatch("witness and minimizer dimensions differ".into()));
        }
        let mut out = Vec::new();
        for x0 in extra.iter().cloned().chain(self.starts(starts, seed)) {
            let r = nelder_mead(|x| self.value_at(kw, x), &x0, self.nm_scale, self.nm_tol, self.nm_max_iter)?;
            let phi = angles_to_vector(&r.argmin);
            let m = m_phi_from_vector(kw, &self.clock, &phi);
            let spec = hermitian_eigs(&m)?;
            let eigvec = spec.min_vector().expect("eigenvectors requested").to_vec();
            out.push(MphiMinimum { value: spec.min(), phi: PhiAngles::new(r.argmin), eigvec });
        }
        out.sort_by(|a, b| a.value.total_cmp(&b.value));
        Ok(out)
    }
}

const PRIMES: [usize; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

fn halton(mut i: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// `min_Φ λ_min(M_Φ)` by multistart Nelder–Mead; deterministic for a fixed seed.
pub fn min_mphi_eig(kw: &LineWitness, basis: &WeylBasis, starts: usize, seed: u64) -> Result<(f64, PhiAngles)> {
    check_dims(kw, basis)?;
    if starts == 0 {
        return Err(Error::InvalidInput("min_mphi_eig needs at least one start".into()));
    }
    let best = MphiMinimizer::new(basis.d()).local_minima(kw, starts, seed, &[])?.remove(0);
    Ok((best.value, best.phi))
}
