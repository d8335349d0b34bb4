//! State classification: positivity, PPT, then the line witness.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::family::{witness_matrix, LineWitness};
use super::optimize::{optimize_line_witness, optimize_witness, WitnessConfig, WitnessOutcome, WitnessRecord};
use super::product::product_state_min;
use crate::simplex::{
    apply_symmetry, canonicalize_line, enumerate_lines, positivity_margin, ppt_margin, supporting_line, PhasePoint,
    SimplexPoint, SymmetryMap,
};
use crate::weyl::WeylBasis;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    NotAState,
    NptEntangled,
    BoundEntangled,
    SeparableNumerical,
    PptUndecided,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::NotAState => "NOT_A_STATE",
            Verdict::NptEntangled => "NPT_ENTANGLED",
            Verdict::BoundEntangled => "BOUND_ENTANGLED",
            Verdict::SeparableNumerical => "SEPARABLE_NUMERICAL",
            Verdict::PptUndecided => "PPT_UNDECIDED",
        }
    }

    pub fn is_entangled(&self) -> bool {
        matches!(self, Verdict::NptEntangled | Verdict::BoundEntangled)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Screening report for PPT points that are not line-plus-background states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductScreen {
    pub lines_tried: usize,
    /// Line whose witness family came closest to separating the state.
    pub best_line: Option<Vec<PhasePoint>>,
    /// Most negative `Tr(Kρ)` over normalised line witnesses of every line.
    pub line_witness_violation: Option<f64>,
    /// Sampled product minimum of that witness (should be >= 0 up to noise).
    pub product_state_min: Option<f64>,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub positivity_margin: f64,
    pub ppt_margin: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<Vec<PhasePoint>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub canonical_map: Option<SymmetryMap>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lp_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub product_screen: Option<ProductScreen>,
}

impl Classification {
    fn margins_only(verdict: Verdict, pos: f64, ppt: f64) -> Self {
        Self {
            verdict,
            positivity_margin: pos,
            ppt_margin: ppt,
            line: None,
            canonical_map: None,
            witness: None,
            lp_bound: None,
            product_screen: None,
        }
    }

    pub fn violation(&self) -> Option<f64> {
        self.witness.as_ref().map(|w| w.violation)
    }
}

/// Classifies `p`, running the line witness with early exit.
pub fn classify(p: &SimplexPoint, basis: &WeylBasis, cfg: &WitnessConfig) -> Result<Classification> {
    let margins = margins(p, basis)?;
    classify_with_margins(p, basis, cfg, margins, true)
}

/// Positivity and PPT margins.
pub fn margins(p: &SimplexPoint, basis: &WeylBasis) -> Result<(f64, f64)> {
    if p.d() != basis.d() {
        return Err(Error::DimensionMismatch(format!("point has d = {}, basis has d = {}", p.d(), basis.d())));
    }
    Ok((positivity_margin(p), ppt_margin(p, basis)?))
}

/// Classification given precomputed margins. With `run_witness = false` a PPT
/// state stops at `PPT_UNDECIDED` without any witness work.
pub fn classify_with_margins(
    p: &SimplexPoint,
    basis: &WeylBasis,
    cfg: &WitnessConfig,
    (pos, ppt): (f64, f64),
    run_witness: bool,
) -> Result<Classification> {
    let tol = cfg.tolerances;
    if pos < -tol.pos {
        return Ok(Classification::margins_only(Verdict::NotAState, pos, ppt));
    }
    if ppt < -tol.ppt {
        return Ok(Classification::margins_only(Verdict::NptEntangled, pos, ppt));
    }
    if !run_witness {
        return Ok(Classification::margins_only(Verdict::PptUndecided, pos, ppt));
    }
    let early = WitnessConfig { early_exit: true, ..cfg.clone() };
    if let Some(line) = supporting_line(p) {
        let map = canonicalize_line(&line, p.d())?;
        let q = apply_symmetry(&map, p)?;
        let out = optimize_witness(&q, basis, &early)?;
        let verdict = if out.violation < -tol.witness { Verdict::BoundEntangled } else { Verdict::SeparableNumerical };
        return Ok(Classification {
            verdict,
            positivity_margin: pos,
            ppt_margin: ppt,
            line: Some(line.points.clone()),
            canonical_map: Some(map),
            witness: Some(out.record()),
            lp_bound: Some(out.lp_bound),
            product_screen: None,
        });
    }
    let mut c = Classification::margins_only(Verdict::PptUndecided, pos, ppt);
    c.product_screen = Some(product_screen(p, basis, cfg)?);
    Ok(c)
}

/// Optimises the line witness of every line against `p` and samples product
/// states on the best one.
pub fn product_screen(p: &SimplexPoint, basis: &WeylBasis, cfg: &WitnessConfig) -> Result<ProductScreen> {
    let d = p.d();
    let lines = enumerate_lines(d).unwrap_or_default();
    let mut best: Option<(Vec<PhasePoint>, WitnessOutcome)> = None;
    for line in &lines {
        let map = canonicalize_line(line, d)?;
        let q = apply_symmetry(&map, p)?;
        let c: Vec<f64> = (0..d).map(|k| q.coeff(k, 0)).collect();
        let out = optimize_line_witness(&c, cfg)?;
        if best.as_ref().is_none_or(|(_, b)| out.violation < b.violation) {
            best = Some((line.points.clone(), out));
        }
    }
    let Some((line, out)) = best else {
        return Ok(ProductScreen {
            lines_tried: 0,
            best_line: None,
            line_witness_violation: None,
            product_state_min: None,
            samples: 0,
        });
    };
    let k = witness_matrix(&LineWitness::from_slice(&out.witness.to_vec()), basis)?;
    let pmin = product_state_min(&k, cfg.product_samples, cfg.seed)?;
    Ok(ProductScreen {
        lines_tried: lines.len(),
        best_line: Some(line),
        line_witness_violation: Some(out.violation),
        product_state_min: Some(pmin),
        samples: cfg.product_samples,
    })
}
