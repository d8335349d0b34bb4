//! Cutting-plane search for the optimal line witness of a state.
//!
//! Variables are `x = (λ, κ_0, ..., κ_{d-1})`. The LP minimises
//! `Tr(Kρ) = λ/d + Σ κ_k c_{k,0}` over the box `[-1,1]^{d+1}` intersected with
//! `Tr K = dλ + Σκ = 1` and the accumulated cuts `⟨v|M_Φ|v⟩ >= 0`. Each round
//! the LP optimum is tested with the multistart `M_Φ` minimiser; violated
//! `(Φ, v)` pairs become new cuts.
//!
//! An infeasible LP point with `min λ_min(M_Φ) = m < 0` is repaired to the
//! feasible witness `(x + |m| e_λ) / (1 + d|m|)`, which keeps `Tr K = 1`.

use serde::{Deserialize, Serialize};

use super::family::{angles_to_vector, cut_coefficients, LineWitness, MphiMinimizer, MphiMinimum};
use crate::matcore::{solve_lp, Constraint, LinearProgram, C64};
use crate::seed::derive_seed;
use crate::simplex::SimplexPoint;
use crate::tolerances::Tolerances;
use crate::weyl::WeylBasis;
use crate::{Error, Result};

/// Optimizer settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WitnessConfig {
    /// Nelder–Mead starts for a full feasibility check.
    pub starts: usize,
    /// Cold starts per round while cuts are still being found (plus warm starts).
    pub round_starts: usize,
    pub max_rounds: usize,
    pub max_cuts: usize,
    pub cuts_per_round: usize,
    /// Stop once the best feasible objective is within this of the LP bound.
    pub gap_tol: f64,
    /// Stop as soon as the sign of the optimum relative to `-ε_w` is settled.
    pub early_exit: bool,
    pub product_samples: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
}

impl Default for WitnessConfig {
    fn default() -> Self {
        Self {
            starts: 32,
            round_starts: 8,
            max_rounds: 100,
            max_cuts: 200,
            cuts_per_round: 4,
            gap_tol: 1e-8,
            early_exit: false,
            product_samples: 2000,
            seed: 0,
            tolerances: Tolerances::default(),
        }
    }
}

impl WitnessConfig {
    pub fn validate(&self) -> Result<()> {
        if self.starts == 0 || self.round_starts == 0 {
            return Err(Error::InvalidInput("optimizer needs at least one Nelder-Mead start".into()));
        }
        if self.max_rounds == 0 || self.cuts_per_round == 0 || self.max_cuts == 0 {
            return Err(Error::InvalidInput("round, cut and cut-cap limits must be positive".into()));
        }
        if self.gap_tol.is_nan() || self.gap_tol <= 0.0 {
            return Err(Error::InvalidInput("gap_tol must be positive".into()));
        }
        self.tolerances.validate()
    }
}

/// JSON form of an optimized witness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub lambda: f64,
    pub kappa: Vec<f64>,
    pub violation: f64,
    pub feasibility: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub struct WitnessOutcome {
    /// Best feasible witness found.
    pub witness: LineWitness,
    /// `Tr(Kρ)` for `witness`.
    pub violation: f64,
    /// `min_Φ λ_min(M_Φ)` for `witness` from the final full multistart check.
    pub feasibility: f64,
    /// Last LP value: a lower bound on every normalised feasible witness.
    pub lp_bound: f64,
    /// LP optimum of each round, in order.
    pub lp_history: Vec<f64>,
    pub iterations: usize,
    /// False when the round cap was hit before the stopping rule fired.
    pub converged: bool,
}

impl WitnessOutcome {
    pub fn record(&self) -> WitnessRecord {
        WitnessRecord {
            lambda: self.witness.lambda,
            kappa: self.witness.kappa.clone(),
            violation: self.violation,
            feasibility: self.feasibility,
            iterations: self.iterations,
        }
    }
}

/// Line coefficients `c_{k,0}` of a point on the reference line plus background.
pub fn reference_line_coeffs(p: &SimplexPoint) -> Result<Vec<f64>> {
    let d = p.d();
    let bg = p.coeff(0, 1);
    let off_line = (0..d).flat_map(|k| (1..d).map(move |l| (k, l)));
    for (k, l) in off_line {
        if (p.coeff(k, l) - bg).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "point is not on the reference line plus background: c[{k},{l}] = {} vs {bg}",
                p.coeff(k, l)
            )));
        }
    }
    Ok((0..d).map(|k| p.coeff(k, 0)).collect())
}

/// Optimal normalised witness for a point on the reference line plus background.
pub fn optimize_witness(p: &SimplexPoint, basis: &WeylBasis, cfg: &WitnessConfig) -> Result<WitnessOutcome> {
    if p.d() != basis.d() {
        return Err(Error::DimensionMismatch(format!("point has d = {}, basis has d = {}", p.d(), basis.d())));
    }
    let c = reference_line_coeffs(p)?;
    optimize_line_witness(&c, cfg)
}

/// Same as [`optimize_witness`] but takes the line coefficients directly.
pub fn optimize_line_witness(c: &[f64], cfg: &WitnessConfig) -> Result<WitnessOutcome> {
    cfg.validate()?;
    let d = c.len();
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    CuttingPlane::new(c, cfg).run()
}

struct CuttingPlane<'a> {
    d: usize,
    cfg: &'a WitnessConfig,
    objective: Vec<f64>,
    base: Vec<Constraint>,
    cuts: Vec<Constraint>,
    minimizer: MphiMinimizer,
}

impl<'a> CuttingPlane<'a> {
    fn new(c: &[f64], cfg: &'a WitnessConfig) -> Self {
        let d = c.len();
        let objective: Vec<f64> = std::iter::once(1.0 / d as f64).chain(c.iter().copied()).collect();
        let trace: Vec<f64> = std::iter::once(d as f64).chain(std::iter::repeat_n(1.0, d)).collect();
        let base = vec![Constraint::new(trace.clone(), 1.0), Constraint::new(trace.iter().map(|v| -v).collect(), -1.0)];
        Self { d, cfg, objective, base, cuts: seed_cuts(d), minimizer: MphiMinimizer::new(d) }
    }

    fn objective_at(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    fn solve(&self) -> Result<Vec<f64>> {
        let mut lp = LinearProgram::with_box(self.objective.clone(), -1.0, 1.0);
        for c in self.base.iter().chain(&self.cuts) {
            lp.push(c.clone());
        }
        solve_lp(&lp)
    }

    fn minima(&self, x: &[f64], starts: usize, seed: u64, warm: &[Vec<f64>]) -> Result<Vec<MphiMinimum>> {
        self.minimizer.local_minima(&LineWitness::from_slice(x), starts, seed, warm)
    }

    fn full_check(&self, x: &[f64], salt: u64, mult: usize) -> Result<Vec<MphiMinimum>> {
        let seed = derive_seed(self.cfg.seed, 0xF00D_0000 + salt);
        self.minima(x, self.cfg.starts * mult, seed, &[])
    }

    fn repair(&self, x: &[f64], m: f64) -> Vec<f64> {
        if m >= 0.0 {
            return x.to_vec();
        }
        let delta = -m;
        let scale = 1.0 + self.d as f64 * delta;
        let mut y: Vec<f64> = x.iter().map(|v| v / scale).collect();
        y[0] = (x[0] + delta) / scale;
        y
    }

    fn add_cuts(&mut self, x: &[f64], minima: &[MphiMinimum]) -> Vec<Vec<f64>> {
        let feas = self.cfg.tolerances.feas;
        let mut added: Vec<Vec<f64>> = Vec::new();
        let mut warm = Vec::new();
        for m in minima.iter().filter(|m| m.value < -feas) {
            if added.len() >= self.cfg.cuts_per_round {
                break;
            }
            let phi = angles_to_vector(&m.phi.angles);
            let coeffs = cut_coefficients(&phi, &m.eigvec);
            let dup = added.iter().any(|a| a.iter().zip(&coeffs).all(|(p, q)| (p - q).abs() < 1e-7));
            if dup {
                continue;
            }
            added.push(coeffs.clone());
            warm.push(m.phi.angles.clone());
            self.cuts.push(Constraint::new(coeffs, 0.0));
        }
        if self.cuts.len() > self.cfg.max_cuts {
            // Drop the oldest cuts that are slack at the current LP optimum.
            let excess = self.cuts.len() - self.cfg.max_cuts;
            let mut dropped = 0;
            self.cuts.retain(|c| {
                if dropped < excess && c.slack(x) > 1e-7 {
                    dropped += 1;
                    false
                } else {
                    true
                }
            });
        }
        warm
    }

    fn run(mut self) -> Result<WitnessOutcome> {
        let cfg = self.cfg;
        let tol = cfg.tolerances;
        let d = self.d;
        // λ = 1/d, κ = 0 is K = 1/d², always feasible.
        let mut best_x: Vec<f64> = std::iter::once(1.0 / d as f64).chain(std::iter::repeat_n(0.0, d)).collect();
        let mut best_obj = self.objective_at(&best_x);
        let mut best_feas = 1.0 / d as f64;
        let mut best_checked = true;
        let mut history = Vec::new();
        let mut warm: Vec<Vec<f64>> = Vec::new();
        let mut converged = false;
        let mut rounds = 0;

        while rounds < cfg.max_rounds {
            rounds += 1;
            let x = self.solve()?;
            let lp_obj = self.objective_at(&x);
            history.push(lp_obj);
            if cfg.early_exit && lp_obj >= -tol.witness {
                converged = true;
                break;
            }
            if best_obj - lp_obj <= cfg.gap_tol {
                converged = true;
                break;
            }

            let seed = derive_seed(cfg.seed, rounds as u64);
            let mut minima = self.minima(&x, cfg.round_starts, seed, &warm)?;
            if minima[0].value >= -tol.feas {
                minima = self.full_check(&x, rounds as u64, 1)?;
                if minima[0].value >= -tol.feas {
                    best_x = x;
                    best_obj = lp_obj;
                    best_feas = minima[0].value;
                    best_checked = true;
                    converged = true;
                    break;
                }
            }
            let repaired = self.repair(&x, minima[0].value);
            let repaired_obj = self.objective_at(&repaired);
            if repaired_obj < best_obj {
                best_x = repaired;
                best_obj = repaired_obj;
                best_feas = 0.0;
                best_checked = false;
            }
            if cfg.early_exit && best_obj < -tol.witness {
                let check = self.full_check(&best_x, 1000 + rounds as u64, 4)?;
                if check[0].value >= -tol.feas {
                    best_feas = check[0].value;
                    best_checked = true;
                    converged = true;
                    break;
                }
                best_x = self.repair(&best_x, check[0].value);
                best_obj = self.objective_at(&best_x);
                self.add_cuts(&x, &check);
            }
            warm = self.add_cuts(&x, &minima);
        }

        // The repaired point is only as feasible as the inner minimum it was built from.
        let mut salt = 5000;
        while !best_checked {
            let check = self.full_check(&best_x, salt, 2)?;
            salt += 1;
            best_feas = check[0].value;
            if best_feas >= -tol.feas || salt > 5010 {
                best_checked = true;
            } else {
                best_x = self.repair(&best_x, best_feas);
                best_obj = self.objective_at(&best_x);
            }
        }

        Ok(WitnessOutcome {
            witness: LineWitness::from_slice(&best_x),
            violation: best_obj,
            feasibility: best_feas,
            lp_bound: history.last().copied().unwrap_or(f64::NEG_INFINITY),
            lp_history: history,
            iterations: rounds,
            converged,
        })
    }
}

/// Initial cuts from product pairs with `conj(v_s)·Φ_s = r_s e^{iψ_s}` on a coarse
/// grid of the ℓ¹ sphere: `r` on the simplex with step 1/2 and `ψ` in multiples of π/3.
fn seed_cuts(d: usize) -> Vec<Constraint> {
    let mut cuts: Vec<Constraint> = Vec::new();
    let mut push = |coeffs: Vec<f64>| {
        if !cuts.iter().any(|c| c.coeffs.iter().zip(&coeffs).all(|(a, b)| (a - b).abs() < 1e-12)) {
            cuts.push(Constraint::new(coeffs, 0.0));
        }
    };
    // λ >= 0 from any pair with v ⟂ W_k Φ for all k (e.g. Φ = e_0, v = e_1).
    let mut lam = vec![0.0; d + 1];
    lam[0] = 1.0;
    push(lam);
    let steps = 2usize;
    for r in compositions(d, steps) {
        let support: Vec<usize> = (0..d).filter(|&s| r[s] > 0).collect();
        let free = support.len().saturating_sub(1);
        let phase_count = 6usize.pow(free as u32);
        for code in 0..phase_count {
            let mut psi = vec![0.0; d];
            let mut c = code;
            for &s in support.iter().skip(1) {
                psi[s] = (c % 6) as f64 * std::f64::consts::PI / 3.0;
                c /= 6;
            }
            let phi: Vec<C64> = (0..d).map(|s| C64::new((r[s] as f64 / steps as f64).sqrt(), 0.0)).collect();
            let v: Vec<C64> = (0..d).map(|s| C64::from_polar((r[s] as f64 / steps as f64).sqrt(), -psi[s])).collect();
            push(cut_coefficients(&phi, &v));
        }
    }
    cuts
}

/// All `d`-tuples of non-negative integers summing to `n`.
fn compositions(d: usize, n: usize) -> Vec<Vec<usize>> {
    if d == 1 {
        return vec![vec![n]];
    }
    (0..=n)
        .flat_map(|first| {
            compositions(d - 1, n - first).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplex::{from_line_coords, ppt_margin, LineSliceCoords};
    use crate::witness::family::min_mphi_eig;

    fn basis3() -> WeylBasis {
        WeylBasis::build(3).unwrap()
    }

    fn line(a: f64, b: f64, g: f64) -> SimplexPoint {
        from_line_coords(LineSliceCoords::new(a, b, g))
    }

    #[test]
    fn seed_cuts_are_valid() {
        // Every seed cut is a real product-state constraint, so feasible witnesses satisfy it.
        for d in [2, 3] {
            for c in seed_cuts(d) {
                assert!(c.coeffs[0] > 0.0);
                let w: Vec<f64> = std::iter::once(1.0 / d as f64).chain(std::iter::repeat_n(0.0, d)).collect();
                assert!(c.slack(&w) >= 0.0);
            }
        }
        assert_eq!(compositions(3, 2).len(), 6);
    }

    #[test]
    fn uniform_point_is_not_separated() {
        let b = basis3();
        let out = optimize_witness(&SimplexPoint::uniform(3), &b, &WitnessConfig::default()).unwrap();
        assert!(out.violation >= -1e-9, "{out:?}");
        assert!(out.feasibility >= -1e-9);
    }

    #[test]
    fn npt_point_is_separated() {
        let b = basis3();
        let p = line(0.5, 0.25, 0.25);
        assert!(ppt_margin(&p, &b).unwrap() < 0.0);
        let out = optimize_witness(&p, &b, &WitnessConfig::default()).unwrap();
        assert!(out.violation < -1e-3, "{out:?}");
        let (m, _) = min_mphi_eig(&out.witness, &b, 64, 11).unwrap();
        assert!(m >= -1e-9, "returned witness infeasible: {m}");
        assert!((out.witness.trace() - 1.0).abs() < 1e-9);
        assert!(out.witness.in_box());
    }

    #[test]
    fn lp_history_is_monotone() {
        let p = line(0.0, -0.06, 0.2);
        let out = optimize_witness(&p, &basis3(), &WitnessConfig::default()).unwrap();
        for w in out.lp_history.windows(2) {
            assert!(w[1] >= w[0] - 1e-9, "{:?}", out.lp_history);
        }
        assert!(out.lp_bound <= out.violation + 1e-12);
    }

    #[test]
    fn rejects_off_line_points() {
        let p = crate::simplex::from_offline_coords(crate::simplex::OffLineSliceCoords::new(0.2, 0.1, 0.1));
        assert!(optimize_witness(&p, &basis3(), &WitnessConfig::default()).is_err());
    }

    #[test]
    fn config_validation() {
        let cfg = WitnessConfig { starts: 0, ..Default::default() };
        assert!(cfg.validate().is_err());
        assert!(WitnessConfig::default().validate().is_ok());
    }
}
