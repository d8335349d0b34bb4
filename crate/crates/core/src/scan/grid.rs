//! Slices, grid specifications and grid sweeps.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::seed::derive_seed;
use crate::simplex::{
    from_line_coords, from_offline_coords, from_qubit_line_coords, LineSliceCoords, OffLineSliceCoords, SimplexPoint,
};
use crate::weyl::WeylBasis;
use crate::witness::{classify_with_margins, margins, Verdict, WitnessConfig};
use crate::{Error, Result};

/// Three-parameter families of the simplex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SliceKind {
    /// `α P00 + β P10 + γ P20` plus background (d = 3).
    Line,
    /// `α P10 + β P20 + γ P11` plus background (d = 3).
    Offline,
    /// `α P00 + (β/2)(P10 + P20)` plus background (d = 3).
    SymmetricLine,
    /// `α P10 + (β/2)(P20 + P11)` plus background (d = 3).
    SymmetricOffline,
    /// `α P00 + β P10` plus background (d = 2).
    QubitLine,
}

impl SliceKind {
    pub const ALL: [SliceKind; 5] = [
        SliceKind::Line,
        SliceKind::Offline,
        SliceKind::SymmetricLine,
        SliceKind::SymmetricOffline,
        SliceKind::QubitLine,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SliceKind::Line => "line",
            SliceKind::Offline => "offline",
            SliceKind::SymmetricLine => "symmetric-line",
            SliceKind::SymmetricOffline => "symmetric-offline",
            SliceKind::QubitLine => "qubit-line",
        }
    }

    pub fn d(&self) -> usize {
        if *self == SliceKind::QubitLine {
            2
        } else {
            3
        }
    }

    /// Whether every point of the slice is a line-plus-background state.
    pub fn on_line(&self) -> bool {
        matches!(self, SliceKind::Line | SliceKind::SymmetricLine | SliceKind::QubitLine)
    }

    /// Parameters the slice actually uses.
    pub fn params(&self) -> &'static [Param] {
        match self {
            SliceKind::Line | SliceKind::Offline => &[Param::Alpha, Param::Beta, Param::Gamma],
            _ => &[Param::Alpha, Param::Beta],
        }
    }

    pub fn point(&self, c: Coords) -> SimplexPoint {
        match self {
            SliceKind::Line => from_line_coords(LineSliceCoords::new(c.alpha, c.beta, c.gamma)),
            SliceKind::Offline => from_offline_coords(OffLineSliceCoords::new(c.alpha, c.beta, c.gamma)),
            SliceKind::SymmetricLine => from_line_coords(LineSliceCoords::symmetric(c.alpha, c.beta)),
            SliceKind::SymmetricOffline => {
                from_offline_coords(OffLineSliceCoords::new(c.alpha, c.beta / 2.0, c.beta / 2.0))
            }
            SliceKind::QubitLine => from_qubit_line_coords(c.alpha, c.beta),
        }
    }
}

impl fmt::Display for SliceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SliceKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidGrid(format!("unknown slice kind '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Param {
    Alpha,
    Beta,
    Gamma,
}

impl Param {
    pub fn name(&self) -> &'static str {
        match self {
            Param::Alpha => "alpha",
            Param::Beta => "beta",
            Param::Gamma => "gamma",
        }
    }
}

impl FromStr for Param {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alpha" => Ok(Param::Alpha),
            "beta" => Ok(Param::Beta),
            "gamma" => Ok(Param::Gamma),
            _ => Err(Error::InvalidGrid(format!("unknown parameter '{s}'"))),
        }
    }
}

/// Raw slice parameters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Coords {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Coords {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self { alpha, beta, gamma }
    }

    pub fn get(&self, p: Param) -> f64 {
        match p {
            Param::Alpha => self.alpha,
            Param::Beta => self.beta,
            Param::Gamma => self.gamma,
        }
    }

    pub fn with(mut self, p: Param, v: f64) -> Self {
        match p {
            Param::Alpha => self.alpha = v,
            Param::Beta => self.beta = v,
            Param::Gamma => self.gamma = v,
        }
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub param: Param,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Axis {
    pub fn new(param: Param, min: f64, max: f64, steps: usize) -> Self {
        Self { param, min, max, steps }
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.steps {
            self.max
        } else {
            self.min + (self.max - self.min) * i as f64 / (self.steps - 1) as f64
        }
    }
}

/// Which PPT states get a witness optimization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum WitnessPolicy {
    /// Every positive PPT point.
    All,
    /// Points with `|ppt_margin| <= width` or any negative slice parameter.
    Band { width: f64 },
    /// Margins only; PPT points stay `PPT_UNDECIDED`.
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub slice: SliceKind,
    /// Values of the parameters not swept by an axis.
    pub fixed: Coords,
    pub x: Axis,
    pub y: Axis,
    pub seed: u64,
    pub policy: WitnessPolicy,
}

impl GridSpec {
    /// Square grid over `[-0.4, 1.1]²` with the slice's default axes and policy.
    pub fn default_for(slice: SliceKind, fixed: Coords, steps: usize) -> Self {
        let (xp, yp) = match slice {
            SliceKind::Line | SliceKind::Offline => (Param::Beta, Param::Gamma),
            _ => (Param::Beta, Param::Alpha),
        };
        let policy = if slice.on_line() { WitnessPolicy::All } else { WitnessPolicy::None };
        Self { slice, fixed, x: Axis::new(xp, -0.4, 1.1, steps), y: Axis::new(yp, -0.4, 1.1, steps), seed: 0, policy }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, a) in [("x", &self.x), ("y", &self.y)] {
            if a.steps < 2 {
                return Err(Error::InvalidGrid(format!("{name} axis needs at least 2 steps, got {}", a.steps)));
            }
            if !(a.min.is_finite() && a.max.is_finite()) || a.min >= a.max {
                return Err(Error::InvalidGrid(format!("{name} axis range [{}, {}] is not valid", a.min, a.max)));
            }
            if !self.slice.params().contains(&a.param) {
                return Err(Error::InvalidGrid(format!("slice {} has no parameter {}", self.slice, a.param.name())));
            }
        }
        if self.x.param == self.y.param {
            return Err(Error::InvalidGrid("x and y sweep the same parameter".into()));
        }
        if ![self.fixed.alpha, self.fixed.beta, self.fixed.gamma].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidGrid("fixed parameters must be finite".into()));
        }
        if let WitnessPolicy::Band { width } = self.policy {
            if !(width >= 0.0 && width.is_finite()) {
                return Err(Error::InvalidGrid(format!("band width {width} is not valid")));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.x.steps * self.y.steps
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Raw parameters of grid index `idx` (row-major: `y` outer, `x` inner).
    pub fn coords(&self, idx: usize) -> (f64, f64, Coords) {
        let (iy, ix) = (idx / self.x.steps, idx % self.x.steps);
        let (x, y) = (self.x.value(ix), self.y.value(iy));
        (x, y, self.at(x, y))
    }

    pub fn at(&self, x: f64, y: f64) -> Coords {
        self.fixed.with(self.x.param, x).with(self.y.param, y)
    }

    /// Hilbert–Schmidt isometric coordinates of `(x, y)` within the slice plane,
    /// with origin at `x = y = 0`, first axis along `e_x - e_y` and second
    /// along `e_x + e_y`, where `e_x`, `e_y` are the coefficient directions of
    /// the two axes. Swapping two equally weighted Bell projectors is then a
    /// mirror `X -> -X`.
    pub fn display(&self, x: f64, y: f64) -> (f64, f64) {
        let c = |x: f64, y: f64| self.slice.point(self.at(x, y)).coeffs().to_vec();
        let o = c(0.0, 0.0);
        let diff = |v: Vec<f64>| -> Vec<f64> { v.iter().zip(&o).map(|(a, b)| a - b).collect() };
        let ex = diff(c(1.0, 0.0));
        let ey = diff(c(0.0, 1.0));
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
        let u1: Vec<f64> = ex.iter().zip(&ey).map(|(a, b)| a - b).collect();
        let u1n = dot(&u1, &u1).sqrt();
        let u1: Vec<f64> = u1.iter().map(|v| v / u1n).collect();
        let s: Vec<f64> = ex.iter().zip(&ey).map(|(a, b)| a + b).collect();
        let proj = dot(&s, &u1);
        let u2: Vec<f64> = s.iter().zip(&u1).map(|(a, b)| a - proj * b).collect();
        let u2n = dot(&u2, &u2).sqrt();
        let v = diff(c(x, y));
        (dot(&v, &u1), dot(&v, &u2) / u2n)
    }
}

/// Description of [`GridSpec::display`] for manifests.
pub const DISPLAY_AXES: &str =
    "Hilbert-Schmidt isometric embedding of the slice plane; origin at x = y = 0; X along e_x - e_y; Y along e_x + e_y";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceRow {
    pub x: f64,
    pub y: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub display_x: f64,
    pub display_y: f64,
    pub positivity_margin: f64,
    pub ppt_margin: f64,
    pub verdict: Verdict,
    pub violation: Option<f64>,
}

fn wants_witness(policy: WitnessPolicy, slice: SliceKind, c: Coords, ppt: f64) -> bool {
    match policy {
        WitnessPolicy::All => true,
        WitnessPolicy::None => false,
        WitnessPolicy::Band { width } => ppt.abs() <= width || slice.params().iter().any(|&p| c.get(p) < 0.0),
    }
}

/// Evaluates one grid point.
pub fn scan_point(g: &GridSpec, basis: &WeylBasis, cfg: &WitnessConfig, idx: usize) -> Result<SliceRow> {
    let (x, y, c) = g.coords(idx);
    let p = g.slice.point(c);
    let m = margins(&p, basis)?;
    let run = wants_witness(g.policy, g.slice, c, m.1);
    let cfg = WitnessConfig { seed: derive_seed(g.seed, idx as u64), ..cfg.clone() };
    let cls = classify_with_margins(&p, basis, &cfg, m, run)?;
    let (dx, dy) = g.display(x, y);
    Ok(SliceRow {
        x,
        y,
        alpha: c.alpha,
        beta: c.beta,
        gamma: c.gamma,
        display_x: dx,
        display_y: dy,
        positivity_margin: m.0,
        ppt_margin: m.1,
        verdict: cls.verdict,
        violation: cls.violation(),
    })
}

/// One row per grid point in row-major order. Points are evaluated on the
/// current rayon pool; the output does not depend on its size.
pub fn scan_slice(g: &GridSpec, basis: &WeylBasis, cfg: &WitnessConfig) -> Result<Vec<SliceRow>> {
    g.validate()?;
    cfg.validate()?;
    if basis.d() != g.slice.d() {
        return Err(Error::DimensionMismatch(format!("slice {} needs d = {}", g.slice, g.slice.d())));
    }
    (0..g.len()).into_par_iter().map(|i| scan_point(g, basis, cfg, i)).collect()
}
