//! CSV / JSON emission and campaign manifests.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::boundary::BoundaryCurve;
use super::grid::{GridSpec, SliceRow, DISPLAY_AXES};
use crate::tolerances::Tolerances;
use crate::witness::WitnessConfig;
use crate::Result;

pub const CSV_HEADER: &str = "x,y,pos_margin,ppt_margin,verdict,violation";
pub const CURVE_HEADER: &str = "x,y,residual";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl std::str::FromStr for Format {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(crate::Error::InvalidInput(format!("unknown format '{s}'"))),
        }
    }
}

/// Plain decimal with `digits` significant digits.
pub fn fmt_sig(v: f64, digits: usize) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return "0".to_string();
    }
    let exp = v.abs().log10().floor() as i32;
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    let s = format!("{v:.decimals$}");
    // Rounding can carry into a new leading digit (9.99.. -> 10.0..); drop the extra digit.
    let rounded: f64 = s.parse().unwrap_or(v);
    if rounded != 0.0 && rounded.abs().log10().floor() as i32 > exp && decimals > 0 {
        let d = decimals - 1;
        return format!("{v:.d$}");
    }
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        return s[1..].to_string();
    }
    s
}

fn num(v: f64) -> String {
    fmt_sig(v, 12)
}

pub fn rows_to_csv(rows: &[SliceRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let viol = r.violation.map(num).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            num(r.x),
            num(r.y),
            num(r.positivity_margin),
            num(r.ppt_margin),
            r.verdict,
            viol
        ));
    }
    out
}

pub fn rows_to_json(rows: &[SliceRow]) -> Result<String> {
    Ok(serde_json::to_string_pretty(rows)? + "\n")
}

pub fn curve_to_csv(c: &BoundaryCurve) -> String {
    let mut out = String::from(CURVE_HEADER);
    out.push('\n');
    for p in &c.points {
        out.push_str(&format!("{},{},{}\n", num(p.x), num(p.y), num(p.residual)));
    }
    out
}

pub fn curve_to_json(c: &BoundaryCurve) -> Result<String> {
    Ok(serde_json::to_string_pretty(c)? + "\n")
}

fn write_file(path: &Path, body: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    let mut f = fs::File::create(path)?;
    f.write_all(body.as_bytes())?;
    Ok(())
}

pub fn emit_rows(rows: &[SliceRow], format: Format, path: &Path) -> Result<()> {
    let body = match format {
        Format::Csv => rows_to_csv(rows),
        Format::Json => rows_to_json(rows)?,
    };
    write_file(path, &body)
}

pub fn emit_curve(c: &BoundaryCurve, format: Format, path: &Path) -> Result<()> {
    let body = match format {
        Format::Csv => curve_to_csv(c),
        Format::Json => curve_to_json(c)?,
    };
    write_file(path, &body)
}

/// One emitted file of a campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetEntry {
    pub file: String,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predicate: Option<String>,
    pub rows: usize,
    pub x_label: String,
    pub y_label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Self-describing record of a campaign; contains no timestamps so reruns are byte-identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub campaign: String,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub witness: WitnessConfig,
    pub display_axes: String,
    pub datasets: Vec<DatasetEntry>,
}

impl Manifest {
    pub fn new(campaign: &str, seed: u64, witness: &WitnessConfig) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            campaign: campaign.to_string(),
            seed,
            tolerances: witness.tolerances,
            witness: witness.clone(),
            display_axes: DISPLAY_AXES.to_string(),
            datasets: Vec::new(),
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_file(path, &(serde_json::to_string_pretty(self)? + "\n"))
    }
}
