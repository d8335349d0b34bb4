//! Regeneration of the figure datasets.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::boundary::{
    bisect, ppt_center, rays, trace_boundary, BoundaryCurve, BoundaryPoint, Predicate, Segment, SliceMargin,
};
use super::emit::{emit_curve, emit_rows, DatasetEntry, Format, Manifest};
use super::grid::{scan_slice, Axis, Coords, GridSpec, Param, SliceKind, WitnessPolicy};
use crate::seed::derive_seed;
use crate::tolerances::BISECTION_TOL;
use crate::weyl::WeylBasis;
use crate::witness::WitnessConfig;
use crate::{Error, Result};

/// `α` values of the line-slice family, as `(numerator, denominator)` of twelfths.
pub const FIG4_ALPHAS: [(u32, u32); 6] = [(0, 1), (1, 12), (1, 6), (1, 4), (1, 3), (5, 12)];
pub const FIG6_ALPHAS: [(u32, u32); 5] = [(0, 1), (1, 12), (1, 6), (1, 4), (1, 3)];
/// Fixed `β` of the `(α, γ)` plane.
pub const FIG5_BETA: f64 = -0.06;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Figure {
    #[serde(rename = "3a")]
    Fig3a,
    #[serde(rename = "3b")]
    Fig3b,
    #[serde(rename = "4")]
    Fig4,
    #[serde(rename = "5")]
    Fig5,
    #[serde(rename = "6")]
    Fig6,
}

impl Figure {
    pub const ALL: [Figure; 5] = [Figure::Fig3a, Figure::Fig3b, Figure::Fig4, Figure::Fig5, Figure::Fig6];

    pub fn name(&self) -> &'static str {
        match self {
            Figure::Fig3a => "3a",
            Figure::Fig3b => "3b",
            Figure::Fig4 => "4",
            Figure::Fig5 => "5",
            Figure::Fig6 => "6",
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Figure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown figure '{s}' (expected 3a, 3b, 4, 5 or 6)")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureOptions {
    /// Grid steps per axis; `None` uses each figure's default.
    pub steps: Option<usize>,
    /// Rays for positivity / PPT boundary curves.
    pub rays: usize,
    /// Rays (a subset of the PPT rays) for the separability curve.
    pub separability_rays: usize,
    /// How far inside the PPT boundary the separability search starts.
    pub separability_depth: f64,
    pub seed: u64,
    pub witness: WitnessConfig,
    pub format: Format,
}

impl Default for FigureOptions {
    fn default() -> Self {
        Self {
            steps: None,
            rays: 128,
            separability_rays: 32,
            separability_depth: 0.02,
            seed: 0,
            witness: WitnessConfig::default(),
            format: Format::Csv,
        }
    }
}

pub fn fraction_tag((n, d): (u32, u32)) -> String {
    format!("{n}_{d}")
}

pub fn fraction_value((n, d): (u32, u32)) -> f64 {
    n as f64 / d as f64
}

struct Campaign<'a> {
    dir: &'a Path,
    opts: &'a FigureOptions,
    manifest: Manifest,
}

impl<'a> Campaign<'a> {
    fn file(&self, stem: &str) -> String {
        format!("{stem}.{}", self.opts.format.extension())
    }

    fn grid(&mut self, stem: &str, g: &GridSpec, note: Option<&str>) -> Result<()> {
        let basis = WeylBasis::build(g.slice.d())?;
        let rows = scan_slice(g, &basis, &self.opts.witness)?;
        let file = self.file(stem);
        emit_rows(&rows, self.opts.format, &self.dir.join(&file))?;
        self.manifest.datasets.push(DatasetEntry {
            file,
            kind: "grid".into(),
            grid: Some(g.clone()),
            predicate: None,
            rows: rows.len(),
            x_label: g.x.param.name().into(),
            y_label: g.y.param.name().into(),
            note: note.map(str::to_string),
        });
        Ok(())
    }

    fn curve(&mut self, stem: &str, g: &GridSpec, c: &BoundaryCurve, note: &str) -> Result<()> {
        let file = self.file(stem);
        emit_curve(c, self.opts.format, &self.dir.join(&file))?;
        self.manifest.datasets.push(DatasetEntry {
            file,
            kind: "curve".into(),
            grid: Some(g.clone()),
            predicate: Some(c.predicate.name().into()),
            rows: c.points.len(),
            x_label: g.x.param.name().into(),
            y_label: g.y.param.name().into(),
            note: Some(note.into()),
        });
        Ok(())
    }

    /// Positivity and PPT curves along rays from the PPT center; returns the PPT curve and its center.
    fn region_curves(&mut self, stem: &str, g: &GridSpec) -> Result<Option<(BoundaryCurve, [f64; 2])>> {
        let basis = WeylBasis::build(g.slice.d())?;
        let m = SliceMargin::new(g, &basis, self.opts.witness.clone());
        let Some(center) = ppt_center(&m, 61)? else { return Ok(None) };
        let radius = 2.0 * (g.x.max - g.x.min).hypot(g.y.max - g.y.min);
        let segs = rays(center, radius, self.opts.rays);
        let pos = trace_boundary(&m, Predicate::Positivity, &segs, BISECTION_TOL)?;
        self.curve(&format!("{stem}_positivity"), g, &pos, "rays from the PPT center")?;
        let ppt = trace_boundary(&m, Predicate::Ppt, &segs, BISECTION_TOL)?;
        self.curve(&format!("{stem}_ppt"), g, &ppt, "rays from the PPT center")?;
        Ok(Some((ppt, center)))
    }

    fn separability_curve(&mut self, stem: &str, g: &GridSpec, ppt: &BoundaryCurve, center: [f64; 2]) -> Result<()> {
        let basis = WeylBasis::build(g.slice.d())?;
        let curve = separability_near(g, &basis, ppt, center, self.opts)?;
        self.curve(&format!("{stem}_separability"), g, &curve, "witness bisection from inside the PPT boundary")
    }
}

/// Separability border along a subset of the PPT rays, searched between
/// `depth` inside the PPT boundary and slightly outside it.
pub fn separability_near(
    g: &GridSpec,
    basis: &WeylBasis,
    ppt: &BoundaryCurve,
    center: [f64; 2],
    opts: &FigureOptions,
) -> Result<BoundaryCurve> {
    let stride = (ppt.points.len() / opts.separability_rays.max(1)).max(1);
    let picked: Vec<&BoundaryPoint> = ppt.points.iter().step_by(stride).collect();
    let found: Vec<Option<BoundaryPoint>> =
        picked
            .par_iter()
            .map(|q| {
                let (dx, dy) = (q.x - center[0], q.y - center[1]);
                let len = dx.hypot(dy);
                if len == 0.0 {
                    return Ok(None);
                }
                let (ux, uy) = (dx / len, dy / len);
                let depth = opts.separability_depth.min(0.9 * len);
                let seg = Segment::new(
                    [q.x - depth * ux, q.y - depth * uy],
                    [q.x + 0.1 * depth * ux, q.y + 0.1 * depth * uy],
                );
                let cfg = WitnessConfig { seed: derive_seed(opts.seed, q.segment as u64), ..opts.witness.clone() };
                let m = SliceMargin::new(g, basis, cfg);
                Ok(bisect(|x, y| m.eval(Predicate::Separability, x, y), &seg, BISECTION_TOL)?
                    .map(|(p, r)| BoundaryPoint { x: p[0], y: p[1], residual: r, segment: q.segment }))
            })
            .collect::<Result<_>>()?;
    let mut curve = BoundaryCurve { predicate: Predicate::Separability, points: Vec::new(), skipped: Vec::new() };
    for (q, f) in picked.iter().zip(found) {
        match f {
            Some(p) => curve.points.push(p),
            None => curve.skipped.push(q.segment),
        }
    }
    Ok(curve)
}

/// Writes the datasets of `fig` into `dir` and returns the manifest (also written there).
pub fn generate_figure(fig: Figure, dir: &Path, opts: &FigureOptions) -> Result<Manifest> {
    opts.witness.validate()?;
    if opts.rays < 8 {
        return Err(Error::InvalidInput("at least 8 rays are needed".into()));
    }
    let witness = WitnessConfig { seed: opts.seed, ..opts.witness.clone() };
    let opts = FigureOptions { witness, ..opts.clone() };
    let mut c =
        Campaign { dir, opts: &opts, manifest: Manifest::new(&format!("fig{}", fig.name()), opts.seed, &opts.witness) };
    let steps = |default: usize| opts.steps.unwrap_or(default);
    match fig {
        Figure::Fig3a => {
            let g = GridSpec {
                seed: opts.seed,
                ..GridSpec::default_for(SliceKind::QubitLine, Coords::default(), steps(121))
            };
            c.grid("fig3a", &g, Some("d = 2: alpha P00 + beta P10 + background"))?;
            c.region_curves("fig3a", &g)?;
        }
        Figure::Fig3b => {
            let g = GridSpec {
                seed: opts.seed,
                ..GridSpec::default_for(SliceKind::SymmetricLine, Coords::default(), steps(121))
            };
            c.grid("fig3b", &g, Some("alpha P00 + (beta/2)(P10 + P20) + background"))?;
            c.region_curves("fig3b", &g)?;
        }
        Figure::Fig4 => {
            for a in FIG4_ALPHAS {
                let stem = format!("fig4_alpha_{}", fraction_tag(a));
                let fixed = Coords::new(fraction_value(a), 0.0, 0.0);
                let g = GridSpec { seed: opts.seed, ..GridSpec::default_for(SliceKind::Line, fixed, steps(241)) };
                c.grid(&stem, &g, Some("alpha P00 + beta P10 + gamma P20 + background"))?;
                if let Some((ppt, center)) = c.region_curves(&stem, &g)? {
                    if a == (0, 1) {
                        c.separability_curve(&stem, &g, &ppt, center)?;
                    }
                }
            }
        }
        Figure::Fig5 => {
            let n = steps(121);
            let g = GridSpec {
                slice: SliceKind::Line,
                fixed: Coords::new(0.0, FIG5_BETA, 0.0),
                x: Axis::new(Param::Alpha, -0.2, 0.4, n),
                y: Axis::new(Param::Gamma, -0.2, 0.4, n),
                seed: opts.seed,
                policy: WitnessPolicy::All,
            };
            c.grid("fig5", &g, Some("beta = -0.06; alpha horizontal, gamma vertical"))?;
            if let Some((ppt, center)) = c.region_curves("fig5", &g)? {
                c.separability_curve("fig5", &g, &ppt, center)?;
            }
        }
        Figure::Fig6 => {
            let g = GridSpec {
                seed: opts.seed,
                ..GridSpec::default_for(SliceKind::SymmetricOffline, Coords::default(), steps(241))
            };
            c.grid("fig6a", &g, Some("alpha P10 + (beta/2)(P20 + P11) + background"))?;
            for a in FIG6_ALPHAS {
                let fixed = Coords::new(fraction_value(a), 0.0, 0.0);
                let g = GridSpec { seed: opts.seed, ..GridSpec::default_for(SliceKind::Offline, fixed, steps(241)) };
                c.grid(
                    &format!("fig6b_alpha_{}", fraction_tag(a)),
                    &g,
                    Some("alpha P10 + beta P20 + gamma P11 + background"),
                )?;
            }
        }
    }
    let manifest = c.manifest;
    manifest.write(&dir.join(format!("fig{}_manifest.json", fig.name())))?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names() {
        assert_eq!("3a".parse::<Figure>().unwrap(), Figure::Fig3a);
        assert!("7".parse::<Figure>().is_err());
        let tags: Vec<String> = FIG4_ALPHAS.iter().map(|&a| fraction_tag(a)).collect();
        assert_eq!(tags, ["0_1", "1_12", "1_6", "1_4", "1_3", "5_12"]);
    }

    #[test]
    fn small_fig3a_is_deterministic() {
        let opts = FigureOptions { steps: Some(15), rays: 16, ..Default::default() };
        let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let m = generate_figure(Figure::Fig3a, d1.path(), &opts).unwrap();
        generate_figure(Figure::Fig3a, d2.path(), &opts).unwrap();
        assert_eq!(m.datasets.len(), 3);
        for e in &m.datasets {
            let a = std::fs::read(d1.path().join(&e.file)).unwrap();
            let b = std::fs::read(d2.path().join(&e.file)).unwrap();
            assert_eq!(a, b, "{}", e.file);
        }
    }
}
