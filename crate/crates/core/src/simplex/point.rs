use serde::{Deserialize, Serialize};

use crate::matcore::{min_eigenvalue, partial_transpose, ComplexMatrix};
use crate::tolerances::SIMPLEX_SUM_TOL;
use crate::weyl::WeylBasis;
use crate::{Error, Result};

/// Real weights over the `d²` Bell projectors, indexed `k·d + l`.
///
/// Coefficients may be negative; such a point is a candidate, not a state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexPoint {
    d: usize,
    coeffs: Vec<f64>,
}

impl SimplexPoint {
    pub fn new(d: usize, coeffs: Vec<f64>) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        if coeffs.len() != d * d {
            return Err(Error::DimensionMismatch(format!("{} coefficients for d = {d}", coeffs.len())));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("non-finite simplex coefficient".into()));
        }
        let sum: f64 = coeffs.iter().sum();
        let scale = coeffs.iter().map(|c| c.abs()).fold(1.0, f64::max);
        if (sum - 1.0).abs() > SIMPLEX_SUM_TOL * scale {
            return Err(Error::InvalidInput(format!("coefficients sum to {sum}, expected 1")));
        }
        Ok(Self { d, coeffs })
    }

    pub fn uniform(d: usize) -> Self {
        Self { d, coeffs: vec![1.0 / (d * d) as f64; d * d] }
    }

    /// The pure Bell state `P_{k,l}`.
    pub fn vertex(d: usize, k: usize, l: usize) -> Self {
        let mut coeffs = vec![0.0; d * d];
        coeffs[k * d + l] = 1.0;
        Self { d, coeffs }
    }

    /// Uniform background plus extra weight on the listed Bell indices:
    /// `c = (1 - Σw)/d² + w` on each listed `(k, l)`.
    pub fn background_plus(d: usize, weights: &[((usize, usize), f64)]) -> Self {
        let total: f64 = weights.iter().map(|(_, w)| w).sum();
        let bg = (1.0 - total) / (d * d) as f64;
        let mut coeffs = vec![bg; d * d];
        for &((k, l), w) in weights {
            coeffs[k * d + l] += w;
        }
        Self { d, coeffs }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize, l: usize) -> f64 {
        self.coeffs[k * self.d + l]
    }

    pub fn is_state(&self) -> bool {
        self.positivity_margin() >= 0.0
    }

    /// `min c`; the point is a state iff this is non-negative.
    pub fn positivity_margin(&self) -> f64 {
        self.coeffs.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Convex combination `(1-t)·self + t·other`.
    pub fn mix(&self, other: &Self, t: f64) -> Result<Self> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch("mixing points of different dimension".into()));
        }
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (1.0 - t) * a + t * b).collect();
        Ok(Self { d: self.d, coeffs })
    }

    pub(crate) fn from_raw(d: usize, coeffs: Vec<f64>) -> Self {
        debug_assert_eq!(coeffs.len(), d * d);
        Self { d, coeffs }
    }
}

/// Weights of `P_{0,0}, P_{1,0}, P_{2,0}` over the uniform qutrit background.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineSliceCoords {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

/// Weights of `P_{1,0}, P_{2,0}, P_{1,1}` over the uniform qutrit background.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OffLineSliceCoords {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl LineSliceCoords {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self { alpha, beta, gamma }
    }

    /// The two-parameter family `α P_{0,0} + (β/2)(P_{1,0} + P_{2,0})`.
    pub fn symmetric(alpha: f64, beta: f64) -> Self {
        Self { alpha, beta: beta / 2.0, gamma: beta / 2.0 }
    }
}

impl OffLineSliceCoords {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self { alpha, beta, gamma }
    }
}

pub fn from_line_coords(s: LineSliceCoords) -> SimplexPoint {
    SimplexPoint::background_plus(3, &[((0, 0), s.alpha), ((1, 0), s.beta), ((2, 0), s.gamma)])
}

pub fn from_offline_coords(s: OffLineSliceCoords) -> SimplexPoint {
    SimplexPoint::background_plus(3, &[((1, 0), s.alpha), ((2, 0), s.beta), ((1, 1), s.gamma)])
}

/// Qubit analogue: `(1-α-β)/4 · 1 + α P_{0,0} + β P_{1,0}`.
pub fn from_qubit_line_coords(alpha: f64, beta: f64) -> SimplexPoint {
    SimplexPoint::background_plus(2, &[((0, 0), alpha), ((1, 0), beta)])
}

fn check_dims(p: &SimplexPoint, basis: &WeylBasis) -> Result<()> {
    if p.d != basis.d() {
        return Err(Error::DimensionMismatch(format!("point has d = {}, basis has d = {}", p.d, basis.d())));
    }
    Ok(())
}

/// `Σ c_{k,l} P_{k,l}`.
pub fn density_matrix(p: &SimplexPoint, basis: &WeylBasis) -> Result<ComplexMatrix> {
    check_dims(p, basis)?;
    let d = p.d;
    let mut rho = ComplexMatrix::zeros(d * d, d * d);
    for k in 0..d {
        for l in 0..d {
            let c = p.coeff(k, l);
            if c != 0.0 {
                rho.add_scaled(c, basis.projector(k, l));
            }
        }
    }
    Ok(rho)
}

pub fn positivity_margin(p: &SimplexPoint) -> f64 {
    p.positivity_margin()
}

/// Smallest eigenvalue of the partial transpose of the density matrix.
pub fn ppt_margin(p: &SimplexPoint, basis: &WeylBasis) -> Result<f64> {
    let rho = density_matrix(p, basis)?;
    let pt = partial_transpose(&rho, p.d, p.d)?;
    min_eigenvalue(&pt)
}
