//! Points of the magic simplex, its parameterised slices, positivity / PPT
//! margins and the phase-space symmetry structure.

mod phase_space;
mod point;

pub use phase_space::{
    all_symmetries, apply_symmetry, canonicalize_line, directions, enumerate_lines, generated_group, is_prime,
    orbit_of_point, parse_points, PhaseLine, PhasePoint, SymmetryMap,
};
pub use point::{
    density_matrix, from_line_coords, from_offline_coords, from_qubit_line_coords, positivity_margin, ppt_margin,
    LineSliceCoords, OffLineSliceCoords, SimplexPoint,
};

/// Tolerance for "all coefficients off the line are equal".
const BACKGROUND_TOL: f64 = 1e-12;

/// Finds the first line (in [`enumerate_lines`] order) such that every
/// coefficient off the line takes one common background value.
///
/// Returns `None` for non-prime `d` or when no such line exists.
pub fn supporting_line(p: &SimplexPoint) -> Option<PhaseLine> {
    let d = p.d();
    let lines = enumerate_lines(d).ok()?;
    lines.into_iter().find(|line| {
        let off: Vec<f64> = (0..d)
            .flat_map(|k| (0..d).map(move |l| PhasePoint::new(k, l)))
            .filter(|q| !line.contains(*q))
            .map(|q| p.coeff(q.k, q.l))
            .collect();
        let lo = off.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = off.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        hi - lo <= BACKGROUND_TOL
    })
}
