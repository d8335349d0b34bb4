//! Dual active-set simplex for small box-bounded linear programs.
//!
//! Solves `min c·x` subject to `a_i·x >= b_i` and `lo <= x <= hi` for a handful
//! of variables and any number of rows. The box vertex minimising `c·x` is dual
//! feasible, so no phase 1 is needed. Every iteration re-solves the `n x n`
//! active system from the original rows, so round-off does not accumulate.
//! The path is a deterministic function of the input.

use crate::tolerances::LP_FEAS_TOL;
use crate::{Error, Result};

const PIVOT_EPS: f64 = 1e-12;
const SINGULAR_EPS: f64 = 1e-13;

/// One inequality row `coeffs · x >= rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub rhs: f64,
}

impl Constraint {
    pub fn new(coeffs: Vec<f64>, rhs: f64) -> Self {
        Self { coeffs, rhs }
    }

    pub fn slack(&self, x: &[f64]) -> f64 {
        dot(&self.coeffs, x) - self.rhs
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>, lower: Vec<f64>, upper: Vec<f64>) -> Self {
        Self { objective, constraints: Vec::new(), lower, upper }
    }

    pub fn with_box(objective: Vec<f64>, lo: f64, hi: f64) -> Self {
        let n = objective.len();
        Self::new(objective, vec![lo; n], vec![hi; n])
    }

    pub fn push(&mut self, c: Constraint) {
        self.constraints.push(c);
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        dot(&self.objective, x)
    }

    /// Largest violation over all rows and bounds (0 when feasible).
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut v: f64 = 0.0;
        for c in &self.constraints {
            v = v.max(-c.slack(x));
        }
        for ((xj, lo), hi) in x.iter().zip(&self.lower).zip(&self.upper) {
            v = v.max(lo - xj).max(xj - hi);
        }
        v
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if n == 0 || self.lower.len() != n || self.upper.len() != n {
            return Err(Error::DimensionMismatch("LP bounds do not match objective length".into()));
        }
        for j in 0..n {
            if !(self.lower[j].is_finite() && self.upper[j].is_finite()) || self.lower[j] > self.upper[j] {
                return Err(Error::InvalidInput(format!("LP box for variable {j} is not a finite interval")));
            }
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(Error::DimensionMismatch(format!("LP row {i} has {} coefficients", c.coeffs.len())));
            }
            if !c.rhs.is_finite() || c.coeffs.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!("LP row {i} is not finite")));
            }
        }
        Ok(())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// All rows in the form `g·x >= h`: cuts first, then lower and upper bounds.
fn all_rows(p: &LinearProgram) -> Vec<(Vec<f64>, f64)> {
    let n = p.num_vars();
    let mut rows: Vec<(Vec<f64>, f64)> = p.constraints.iter().map(|c| (c.coeffs.clone(), c.rhs)).collect();
    for j in 0..n {
        rows.push((unit(n, j), p.lower[j]));
    }
    for j in 0..n {
        rows.push((unit(n, j).into_iter().map(|v| -v).collect(), -p.upper[j]));
    }
    rows
}

fn unit(n: usize, j: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[j] = 1.0;
    e
}

/// LU factorisation with partial pivoting of a square matrix given by rows.
struct Lu {
    n: usize,
    a: Vec<f64>,
    perm: Vec<usize>,
}

impl Lu {
    fn new(rows: &[&[f64]]) -> Option<Self> {
        let n = rows.len();
        let mut a: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        for col in 0..n {
            let piv = (col..n).max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))?;
            if a[piv * n + col].abs() <= SINGULAR_EPS * scale {
                return None;
            }
            if piv != col {
                for c in 0..n {
                    a.swap(piv * n + c, col * n + c);
                }
                perm.swap(piv, col);
            }
            for r in col + 1..n {
                let f = a[r * n + col] / a[col * n + col];
                a[r * n + col] = f;
                for c in col + 1..n {
                    a[r * n + c] -= f * a[col * n + c];
                }
            }
        }
        Some(Self { n, a, perm })
    }

    /// Solves `M z = b` where `M` has the given rows.
    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut z: Vec<f64> = self.perm.iter().map(|&i| b[i]).collect();
        for r in 0..n {
            for c in 0..r {
                z[r] -= self.a[r * n + c] * z[c];
            }
        }
        for r in (0..n).rev() {
            for c in r + 1..n {
                z[r] -= self.a[r * n + c] * z[c];
            }
            z[r] /= self.a[r * n + r];
        }
        z
    }

    /// Solves `Mᵀ y = b`.
    fn solve_transposed(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        // Mᵀ = Uᵀ Lᵀ P, so solve Uᵀ w = b, Lᵀ v = w, then y = Pᵀ v.
        let mut w = b.to_vec();
        for r in 0..n {
            for c in 0..r {
                w[r] -= self.a[c * n + r] * w[c];
            }
            w[r] /= self.a[r * n + r];
        }
        for r in (0..n).rev() {
            for c in r + 1..n {
                w[r] -= self.a[c * n + r] * w[c];
            }
        }
        let mut y = vec![0.0; n];
        for (i, &pi) in self.perm.iter().enumerate() {
            y[pi] = w[i];
        }
        y
    }
}

/// Solves the program and returns an optimal vertex.
pub fn solve_lp(p: &LinearProgram) -> Result<Vec<f64>> {
    p.validate()?;
    let n = p.num_vars();
    let rows = all_rows(p);
    let k = p.constraints.len();
    let m = rows.len();

    // Start at the box vertex minimising c·x: optimal for the box alone.
    let mut active: Vec<usize> = (0..n).map(|j| if p.objective[j] >= 0.0 { k + j } else { k + n + j }).collect();
    let max_iter = 50 * (m + n);
    let bland_after = 5 * (m + n);

    for iter in 0..max_iter {
        let refs: Vec<&[f64]> = active.iter().map(|&i| rows[i].0.as_slice()).collect();
        let lu = Lu::new(&refs).ok_or_else(|| Error::LpInternal("singular active set".into()))?;
        let h: Vec<f64> = active.iter().map(|&i| rows[i].1).collect();
        let x = lu.solve(&h);
        let y = lu.solve_transposed(&p.objective);

        let violation = |i: usize| {
            let (g, rhs) = &rows[i];
            let scale = 1.0 + rhs.abs() + g.iter().fold(0.0f64, |s, v| s.max(v.abs()));
            (rhs - dot(g, &x)) / scale
        };
        let entering = if iter < bland_after {
            (0..m)
                .filter(|i| !active.contains(i))
                .map(|i| (i, violation(i)))
                .filter(|&(_, v)| v > 1e-13)
                .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
                .map(|(i, _)| i)
        } else {
            (0..m).filter(|i| !active.contains(i)).find(|&i| violation(i) > 1e-13)
        };
        let Some(r) = entering else {
            let mut x = x;
            for ((xj, lo), hi) in x.iter_mut().zip(&p.lower).zip(&p.upper) {
                *xj = xj.clamp(*lo, *hi);
            }
            let viol = p.max_violation(&x);
            if viol > LP_FEAS_TOL {
                return Err(Error::LpInternal(format!("returned point violates constraints by {viol:e}")));
            }
            return Ok(x);
        };

        // g_r = Σ u_i g_i over the active rows; a row may leave only if u_i > 0.
        let u = lu.solve_transposed(&rows[r].0);
        let mut leave: Option<(f64, usize, usize)> = None;
        for (pos, (&ui, &yi)) in u.iter().zip(&y).enumerate() {
            if ui > PIVOT_EPS {
                let ratio = yi.max(0.0) / ui;
                let cand = (ratio, active[pos], pos);
                leave = match leave {
                    None => Some(cand),
                    Some(b) if ratio < b.0 - 1e-15 || (ratio <= b.0 + 1e-15 && cand.1 < b.1) => Some(cand),
                    keep => keep,
                };
            }
        }
        let Some((_, _, pos)) = leave else {
            return Err(Error::Infeasible);
        };
        active[pos] = r;
    }
    Err(Error::LpInternal("iteration limit reached".into()))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Brute-force oracle: enumerate every choice of `n` active rows among the
    /// cuts and the `2n` bound faces, solve, keep feasible points.
    pub(crate) fn vertex_enumeration(p: &LinearProgram) -> Option<(f64, Vec<f64>)> {
        let n = p.num_vars();
        let mut faces: Vec<(Vec<f64>, f64)> = p.constraints.iter().map(|c| (c.coeffs.clone(), c.rhs)).collect();
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            faces.push((e.clone(), p.lower[j]));
            faces.push((e, p.upper[j]));
        }
        let mut best: Option<(f64, Vec<f64>)> = None;
        let mut idx: Vec<usize> = (0..n).collect();
        loop {
            let a: Vec<Vec<f64>> = idx.iter().map(|&i| faces[i].0.clone()).collect();
            let b: Vec<f64> = idx.iter().map(|&i| faces[i].1).collect();
            if let Some(x) = gauss_solve(a, b) {
                if p.max_violation(&x) <= 1e-9 {
                    let v = p.objective_value(&x);
                    if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
                        best = Some((v, x));
                    }
                }
            }
            // next combination
            let mut i = n;
            loop {
                if i == 0 {
                    return best;
                }
                i -= 1;
                if idx[i] < faces.len() - n + i {
                    idx[i] += 1;
                    for j in i + 1..n {
                        idx[j] = idx[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
        let n = b.len();
        for col in 0..n {
            let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
            if a[piv][col].abs() < 1e-12 {
                return None;
            }
            a.swap(col, piv);
            b.swap(col, piv);
            for r in 0..n {
                if r != col {
                    let f = a[r][col] / a[col][col];
                    let pivot_row = a[col].clone();
                    for (x, y) in a[r][col..].iter_mut().zip(&pivot_row[col..]) {
                        *x -= f * y;
                    }
                    b[r] -= f * b[col];
                }
            }
        }
        Some((0..n).map(|i| b[i] / a[i][i]).collect())
    }

    #[test]
    fn single_cut() {
        let mut p = LinearProgram::with_box(vec![1.0], 0.0, 1.0);
        p.push(Constraint::new(vec![1.0], 0.5));
        let x = solve_lp(&p).unwrap();
        assert!((x[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn box_vertex() {
        let p = LinearProgram::with_box(vec![1.0, 1.0], -1.0, 1.0);
        assert_eq!(solve_lp(&p).unwrap(), vec![-1.0, -1.0]);
    }

    #[test]
    fn infeasible_is_reported() {
        let mut p = LinearProgram::with_box(vec![1.0, 0.0], -1.0, 1.0);
        p.push(Constraint::new(vec![1.0, 1.0], 2.5));
        assert!(matches!(solve_lp(&p), Err(Error::Infeasible)));
    }

    #[test]
    fn rejects_malformed() {
        let mut p = LinearProgram::with_box(vec![1.0, 0.0], -1.0, 1.0);
        p.push(Constraint::new(vec![1.0], 0.0));
        assert!(solve_lp(&p).is_err());
        let q = LinearProgram::new(vec![1.0], vec![0.0], vec![f64::INFINITY]);
        assert!(solve_lp(&q).is_err());
    }

    #[test]
    fn equality_pair_is_honoured() {
        // x + y = 1 written as two opposite inequalities, minimise x - y.
        let mut p = LinearProgram::with_box(vec![1.0, -1.0], -1.0, 1.0);
        p.push(Constraint::new(vec![1.0, 1.0], 1.0));
        p.push(Constraint::new(vec![-1.0, -1.0], -1.0));
        let x = solve_lp(&p).unwrap();
        assert!((x[0] - 0.0).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn four_variables_six_random_cuts_match_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut checked = 0;
        while checked < 200 {
            let obj: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut p = LinearProgram::with_box(obj, -1.0, 1.0);
            for _ in 0..6 {
                let a: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
                p.push(Constraint::new(a, rng.gen_range(-1.0..0.5)));
            }
            let oracle = vertex_enumeration(&p);
            match (solve_lp(&p), oracle) {
                (Ok(x), Some((v, _))) => {
                    assert!(p.max_violation(&x) <= 1e-9);
                    assert!((p.objective_value(&x) - v).abs() <= 1e-9, "{} vs {v}", p.objective_value(&x));
                }
                (Err(Error::Infeasible), None) => {}
                (got, want) => panic!("solver {got:?} disagrees with oracle {want:?}"),
            }
            checked += 1;
        }
    }

    fn lp_instance() -> impl Strategy<Value = LinearProgram> {
        (1usize..=4).prop_flat_map(|n| {
            let row = prop::collection::vec(-1.0f64..1.0, n);
            (row.clone(), prop::collection::vec((row, -1.0f64..0.5), 0..=8)).prop_map(|(obj, cuts)| {
                let mut p = LinearProgram::with_box(obj, -1.0, 1.0);
                for (a, b) in cuts {
                    p.push(Constraint::new(a, b));
                }
                p
            })
        })
    }

    proptest! {
        #[test]
        fn small_instances_match_enumeration(p in lp_instance()) {
            match (solve_lp(&p), vertex_enumeration(&p)) {
                (Ok(x), Some((v, _))) => {
                    prop_assert!(p.max_violation(&x) <= 1e-9);
                    prop_assert!((p.objective_value(&x) - v).abs() <= 1e-9);
                }
                (Err(Error::Infeasible), None) => {}
                (got, want) => prop_assert!(false, "solver {:?} disagrees with oracle {:?}", got, want),
            }
        }
    }
}
