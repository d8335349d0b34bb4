//! Nelder–Mead downhill simplex.

use crate::{Error, Result};

/// Largest dimension the minimizer accepts.
pub const MAX_DIM: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadResult {
    pub argmin: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    /// False when `max_iter` was hit before the simplex shrank below `tol`.
    pub converged: bool,
}

/// Minimises `f` starting from a right-angled simplex of edge `scale` at `start`.
///
/// Stops once every vertex lies within `tol` of the best one.
pub fn nelder_mead<F>(mut f: F, start: &[f64], scale: f64, tol: f64, max_iter: usize) -> Result<NelderMeadResult>
where
    F: FnMut(&[f64]) -> f64,
{
    let n = start.len();
    if n == 0 || n > MAX_DIM {
        return Err(Error::InvalidInput(format!("nelder_mead supports 1..={MAX_DIM} dimensions, got {n}")));
    }
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(start.to_vec());
    for i in 0..n {
        let mut v = start.to_vec();
        v[i] += scale;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
    let mut order: Vec<usize> = (0..=n).collect();

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut iterations = 0;
    let mut converged = false;
    let mut centroid = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut trial2 = vec![0.0; n];

    loop {
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
        let best = order[0];
        let diameter = simplex
            .iter()
            .map(|v| v.iter().zip(&simplex[best]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if diameter <= tol {
            converged = true;
            break;
        }
        if iterations >= max_iter {
            break;
        }
        iterations += 1;

        let worst = order[n];
        let second = order[n - 1];
        centroid.iter_mut().for_each(|c| *c = 0.0);
        for &i in &order[..n] {
            for (c, x) in centroid.iter_mut().zip(&simplex[i]) {
                *c += x / n as f64;
            }
        }
        for j in 0..n {
            trial[j] = centroid[j] + alpha * (centroid[j] - simplex[worst][j]);
        }
        let fr = f(&trial);
        if fr < values[best] {
            for j in 0..n {
                trial2[j] = centroid[j] + gamma * (trial[j] - centroid[j]);
            }
            let fe = f(&trial2);
            if fe < fr {
                simplex[worst].copy_from_slice(&trial2);
                values[worst] = fe;
            } else {
                simplex[worst].copy_from_slice(&trial);
                values[worst] = fr;
            }
            continue;
        }
        if fr < values[second] {
            simplex[worst].copy_from_slice(&trial);
            values[worst] = fr;
            continue;
        }
        // Contraction: outside if the reflection beat the worst point, inside otherwise.
        let outside = fr < values[worst];
        for j in 0..n {
            trial2[j] = if outside {
                centroid[j] + rho * (trial[j] - centroid[j])
            } else {
                centroid[j] + rho * (simplex[worst][j] - centroid[j])
            };
        }
        let fc = f(&trial2);
        if (outside && fc <= fr) || (!outside && fc < values[worst]) {
            simplex[worst].copy_from_slice(&trial2);
            values[worst] = fc;
            continue;
        }
        // Shrink towards the best vertex.
        let anchor = simplex[best].clone();
        for &i in &order[1..] {
            for j in 0..n {
                simplex[i][j] = anchor[j] + sigma * (simplex[i][j] - anchor[j]);
            }
            values[i] = f(&simplex[i]);
        }
    }

    let best = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b))).unwrap();
    Ok(NelderMeadResult { argmin: simplex[best].clone(), value: values[best], iterations, converged })
}
