//! Boundary tracing by bisection and straight-run detection on traced curves.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{Coords, GridSpec, SliceKind};
use crate::seed::derive_seed;
use crate::simplex::{positivity_margin, ppt_margin};
use crate::tolerances::{BISECTION_TOL, COLLINEAR_TOL};
use crate::weyl::WeylBasis;
use crate::witness::{optimize_line_witness, reference_line_coeffs, WitnessConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Predicate {
    Positivity,
    Ppt,
    /// Optimal normalised line-witness value; negative means entangled.
    Separability,
}

impl Predicate {
    pub fn name(&self) -> &'static str {
        match self {
            Predicate::Positivity => "positivity",
            Predicate::Ppt => "ppt",
            Predicate::Separability => "separability",
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Predicate {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "positivity" => Ok(Predicate::Positivity),
            "ppt" => Ok(Predicate::Ppt),
            "separability" => Ok(Predicate::Separability),
            _ => Err(Error::InvalidInput(format!("unknown predicate '{s}'"))),
        }
    }
}

/// Margin of a predicate at slice coordinates `(x, y)` of a grid plane.
pub struct SliceMargin<'a> {
    pub grid: &'a GridSpec,
    pub basis: &'a WeylBasis,
    pub witness: WitnessConfig,
}

impl<'a> SliceMargin<'a> {
    pub fn new(grid: &'a GridSpec, basis: &'a WeylBasis, witness: WitnessConfig) -> Self {
        Self { grid, basis, witness }
    }

    pub fn coords(&self, x: f64, y: f64) -> Coords {
        self.grid.at(x, y)
    }

    pub fn eval(&self, pred: Predicate, x: f64, y: f64) -> Result<f64> {
        let p = self.grid.slice.point(self.coords(x, y));
        match pred {
            Predicate::Positivity => Ok(positivity_margin(&p)),
            Predicate::Ppt => ppt_margin(&p, self.basis),
            Predicate::Separability => {
                if !self.grid.slice.on_line() {
                    return Err(Error::InvalidInput(format!(
                        "separability margin needs a line slice, got {}",
                        self.grid.slice
                    )));
                }
                let c = reference_line_coeffs(&p)?;
                let cfg = WitnessConfig { early_exit: false, ..self.witness.clone() };
                Ok(optimize_line_witness(&c, &cfg)?.violation)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start: [f64; 2],
    pub end: [f64; 2],
}

impl Segment {
    pub fn new(start: [f64; 2], end: [f64; 2]) -> Self {
        Self { start, end }
    }

    pub fn at(&self, t: f64) -> [f64; 2] {
        [self.start[0] + t * (self.end[0] - self.start[0]), self.start[1] + t * (self.end[1] - self.start[1])]
    }
}

/// `count` segments from `center` to the circle of `radius`, counter-clockwise from angle 0.
pub fn rays(center: [f64; 2], radius: f64, count: usize) -> Vec<Segment> {
    (0..count)
        .map(|i| {
            let th = 2.0 * PI * i as f64 / count as f64;
            Segment::new(center, [center[0] + radius * th.cos(), center[1] + radius * th.sin()])
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub x: f64,
    pub y: f64,
    /// Predicate margin at the returned point.
    pub residual: f64,
    /// Index of the segment that produced this point.
    pub segment: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCurve {
    pub predicate: Predicate,
    pub points: Vec<BoundaryPoint>,
    /// Segments whose endpoints had the same margin sign.
    pub skipped: Vec<usize>,
}

impl BoundaryCurve {
    pub fn xy(&self) -> Vec<[f64; 2]> {
        self.points.iter().map(|p| [p.x, p.y]).collect()
    }
}

/// Bisection on one segment to `|margin| <= tol`; `None` without a sign change.
pub fn bisect<F>(mut margin: F, seg: &Segment, tol: f64) -> Result<Option<([f64; 2], f64)>>
where
    F: FnMut(f64, f64) -> Result<f64>,
{
    let mut eval = |t: f64| {
        let q = seg.at(t);
        margin(q[0], q[1])
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    let f0 = eval(lo)?;
    let f1 = eval(hi)?;
    if f0.abs() <= tol {
        return Ok(Some((seg.at(lo), f0)));
    }
    if f1.abs() <= tol {
        return Ok(Some((seg.at(hi), f1)));
    }
    if (f0 > 0.0) == (f1 > 0.0) {
        return Ok(None);
    }
    let positive_at_lo = f0 > 0.0;
    let mut best = if f0.abs() < f1.abs() { (lo, f0) } else { (hi, f1) };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = eval(mid)?;
        if fm.abs() < best.1.abs() {
            best = (mid, fm);
        }
        if fm.abs() <= tol || hi - lo < 1e-15 {
            break;
        }
        if (fm > 0.0) == positive_at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some((seg.at(best.0), best.1)))
}

/// Traces `pred` along every segment; segments without a sign change are
/// recorded in `skipped`.
pub fn trace_boundary(m: &SliceMargin<'_>, pred: Predicate, segments: &[Segment], tol: f64) -> Result<BoundaryCurve> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidInput("bisection tolerance must be positive".into()));
    }
    let found: Vec<Option<BoundaryPoint>> = segments
        .par_iter()
        .enumerate()
        .map(|(i, seg)| {
            let mut local = m.witness.clone();
            if pred == Predicate::Separability {
                local.seed = derive_seed(m.witness.seed, i as u64);
            }
            let sm = SliceMargin { grid: m.grid, basis: m.basis, witness: local };
            Ok(bisect(|x, y| sm.eval(pred, x, y), seg, tol)?.map(|(q, r)| BoundaryPoint {
                x: q[0],
                y: q[1],
                residual: r,
                segment: i,
            }))
        })
        .collect::<Result<_>>()?;
    let mut points = Vec::new();
    let mut skipped = Vec::new();
    for (i, f) in found.into_iter().enumerate() {
        match f {
            Some(p) => points.push(p),
            None => skipped.push(i),
        }
    }
    Ok(BoundaryCurve { predicate: pred, points, skipped })
}

/// Point of a coarse grid with the largest PPT margin, if that margin is positive.
pub fn ppt_center(m: &SliceMargin<'_>, steps: usize) -> Result<Option<[f64; 2]>> {
    let g = m.grid;
    let mut best: Option<([f64; 2], f64)> = None;
    for iy in 0..steps {
        for ix in 0..steps {
            let x = g.x.min + (g.x.max - g.x.min) * ix as f64 / (steps - 1) as f64;
            let y = g.y.min + (g.y.max - g.y.min) * iy as f64 / (steps - 1) as f64;
            let v = m.eval(Predicate::Ppt, x, y)?;
            if best.is_none_or(|(_, b)| v > b) {
                best = Some(([x, y], v));
            }
        }
    }
    Ok(best.filter(|(_, v)| *v > 0.0).map(|(c, _)| c))
}

/// Closed PPT boundary of a slice traced along `count` rays from the PPT center.
pub fn trace_ppt_boundary(m: &SliceMargin<'_>, count: usize) -> Result<Option<BoundaryCurve>> {
    let Some(center) = ppt_center(m, 61)? else { return Ok(None) };
    let g = m.grid;
    let radius = 2.0 * ((g.x.max - g.x.min).hypot(g.y.max - g.y.min));
    Ok(Some(trace_boundary(m, Predicate::Ppt, &rays(center, radius, count), BISECTION_TOL)?))
}

/// Longest run of collinear consecutive curve points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StraightSegment {
    pub found: bool,
    /// Index of the first point of the longest run.
    pub start: usize,
    /// Number of points in the run (0 when none).
    pub len: usize,
    pub from: Option<[f64; 2]>,
    pub to: Option<[f64; 2]>,
}

const MIN_CURVE_POINTS: usize = 8;
const WINDOW: usize = 5;

fn perpendicular(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len = dx.hypot(dy);
    ((p[0] - a[0]) * dy - (p[1] - a[1]) * dx).abs() / len
}

/// True iff at least five consecutive points (wrapping around when `closed`)
/// deviate from the chord of their run by at most `tol`.
pub fn detect_straight_segment(points: &[[f64; 2]], closed: bool, tol: f64) -> Result<StraightSegment> {
    let n = points.len();
    if n < MIN_CURVE_POINTS {
        return Err(Error::InsufficientPoints { needed: MIN_CURVE_POINTS, got: n });
    }
    let at = |i: usize| points[i % n];
    let collinear = |start: usize, len: usize| {
        let (a, b) = (at(start), at(start + len - 1));
        if (b[0] - a[0]).hypot(b[1] - a[1]) <= 10.0 * tol {
            return false;
        }
        (1..len - 1).all(|j| perpendicular(at(start + j), a, b) <= tol)
    };
    let starts = if closed { n } else { n - WINDOW + 1 };
    let mut best = StraightSegment { found: false, start: 0, len: 0, from: None, to: None };
    for s in 0..starts {
        if !collinear(s, WINDOW) {
            continue;
        }
        let max_len = if closed { n } else { n - s };
        let mut len = WINDOW;
        while len < max_len && collinear(s, len + 1) {
            len += 1;
        }
        if len > best.len {
            best = StraightSegment { found: true, start: s, len, from: Some(at(s)), to: Some(at(s + len - 1)) };
        }
    }
    Ok(best)
}

/// [`detect_straight_segment`] on a traced closed curve with the default tolerance.
pub fn curve_has_straight_segment(c: &BoundaryCurve) -> Result<StraightSegment> {
    detect_straight_segment(&c.xy(), true, COLLINEAR_TOL)
}

/// Slice planes at fixed α used for the PPT shape diagnostics.
pub fn line_slice_at(alpha: f64, steps: usize) -> GridSpec {
    GridSpec::default_for(SliceKind::Line, Coords::new(alpha, 0.0, 0.0), steps)
}

/// Straight-run diagnostic for the PPT boundary of the line slice at `alpha`,
/// traced along `count` rays. A PPT set without interior (a single point at
/// `α = 1/3`, empty beyond) has no straight run.
pub fn ppt_straight_segment(alpha: f64, count: usize) -> Result<StraightSegment> {
    let g = line_slice_at(alpha, 61);
    let basis = WeylBasis::build(3)?;
    let m = SliceMargin::new(&g, &basis, WitnessConfig::default());
    match trace_ppt_boundary(&m, count)? {
        Some(c) => curve_has_straight_segment(&c),
        None => Ok(StraightSegment { found: false, start: 0, len: 0, from: None, to: None }),
    }
}
