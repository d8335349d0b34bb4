//! Flat JSON run configuration. Every key is optional; command-line flags win.

use std::path::{Path, PathBuf};

use magic_simplex::scan::Format;
use magic_simplex::{Tolerances, WitnessConfig};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub d: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub format: Format,
    pub pos_tol: f64,
    pub ppt_tol: f64,
    pub feas_tol: f64,
    pub witness_tol: f64,
    pub starts: usize,
    pub round_starts: usize,
    pub max_rounds: usize,
    pub max_cuts: usize,
    pub cuts_per_round: usize,
    pub gap_tol: f64,
    pub product_samples: usize,
    pub rays: usize,
    pub separability_rays: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let w = WitnessConfig::default();
        let t = w.tolerances;
        Self {
            d: 3,
            seed: 0,
            out: PathBuf::from("out"),
            format: Format::Csv,
            pos_tol: t.pos,
            ppt_tol: t.ppt,
            feas_tol: t.feas,
            witness_tol: t.witness,
            starts: w.starts,
            round_starts: w.round_starts,
            max_rounds: w.max_rounds,
            max_cuts: w.max_cuts,
            cuts_per_round: w.cuts_per_round,
            gap_tol: w.gap_tol,
            product_samples: w.product_samples,
            rays: 128,
            separability_rays: 32,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> std::io::Result<Result<Self, serde_json::Error>> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text))
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.d < 2 {
            return Err(format!("d must be at least 2, got {}", self.d));
        }
        self.witness_config().validate().map_err(|e| e.to_string())
    }

    pub fn witness_config(&self) -> WitnessConfig {
        WitnessConfig {
            starts: self.starts,
            round_starts: self.round_starts,
            max_rounds: self.max_rounds,
            max_cuts: self.max_cuts,
            cuts_per_round: self.cuts_per_round,
            gap_tol: self.gap_tol,
            product_samples: self.product_samples,
            seed: self.seed,
            tolerances: Tolerances {
                pos: self.pos_tol,
                ppt: self.ppt_tol,
                feas: self.feas_tol,
                witness: self.witness_tol,
            },
            ..WitnessConfig::default()
        }
    }
}

/// Parses a real number, accepting exact fractions such as `1/3` or `-5/12`.
pub fn parse_real(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let v = match s.split_once('/') {
        Some((n, d)) => {
            let n: f64 = n.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
            let d: f64 = d.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
            if d == 0.0 {
                return Err(format!("zero denominator in {s:?}"));
            }
            n / d
        }
        None => s.parse().map_err(|_| format!("not a number: {s:?}"))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("not a finite number: {s:?}"))
    }
}

/// `min,max` with either bound in [`parse_real`] syntax.
pub fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected MIN,MAX, got {s:?}"))?;
    Ok((parse_real(a)?, parse_real(b)?))
}
