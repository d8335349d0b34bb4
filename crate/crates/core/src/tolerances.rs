//! Numeric tolerances shared by every module.

use serde::{Deserialize, Serialize};

/// Entry-wise Hermiticity tolerance for matrices handed to the eigensolver.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Jacobi stops once the off-diagonal Frobenius mass drops below this.
pub const JACOBI_OFFDIAG_TOL: f64 = 1e-14;
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Feasibility slack accepted on LP constraints.
pub const LP_FEAS_TOL: f64 = 1e-9;
/// Tolerance for `sum c = 1` on simplex points.
pub const SIMPLEX_SUM_TOL: f64 = 1e-12;
/// Bisection tolerance on boundary margins.
pub const BISECTION_TOL: f64 = 1e-6;
/// Default perpendicular tolerance for straight-run detection.
pub const COLLINEAR_TOL: f64 = 1e-5;

/// Verdict thresholds used by the classifier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// A point with `min c < -pos` is not a state.
    pub pos: f64,
    /// A state with `min eig PT(rho) < -ppt` is NPT.
    pub ppt: f64,
    /// A witness with `min_Phi lambda_min(M_Phi) >= -feas` is feasible.
    pub feas: f64,
    /// A feasible witness with `Tr(K rho) < -witness` certifies entanglement.
    pub witness: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { pos: 1e-9, ppt: 1e-9, feas: 1e-9, witness: 1e-6 }
    }
}

impl Tolerances {
    pub fn validate(&self) -> crate::Result<()> {
        for (name, v) in [("pos", self.pos), ("ppt", self.ppt), ("feas", self.feas), ("witness", self.witness)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(crate::Error::InvalidInput(format!("tolerance {name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}
