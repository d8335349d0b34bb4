mod config;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use magic_simplex::scan::{
    emit_rows, generate_figure, Axis, Coords, DatasetEntry, Figure, FigureOptions, Format, GridSpec, Manifest,
    SliceKind, WitnessPolicy,
};
use magic_simplex::simplex::{
    canonicalize_line, directions, enumerate_lines, orbit_of_point, parse_points, PhaseLine, SimplexPoint, SymmetryMap,
};
use magic_simplex::witness::{classify, optimize_witness};
use magic_simplex::{Error, WeylBasis};
use serde_json::json;

use config::{parse_range, parse_real, RunConfig};

/// Residual threshold for `basis`.
const BASIS_TOL: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(name = "magic-simplex", version, about = "Magic simplex geometry, PPT slices and line witnesses")]
struct Cli {
    /// Flat JSON configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for grid evaluation (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    cmd: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the Weyl/Bell basis and report invariant residuals.
    Basis {
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Classify one state and print the result as JSON.
    Classify(PointArgs),
    /// Optimize the line witness for a point on the reference line.
    Witness(PointArgs),
    /// Scan a 2-D slice and write rows plus a manifest.
    Scan(ScanArgs),
    /// Regenerate the datasets of one figure: 3a, 3b, 4, 5 or 6.
    Figures(FigureArgs),
    /// Phase-space lines and their symmetry group.
    Symmetry {
        #[command(subcommand)]
        cmd: SymmetryCmd,
    },
}

#[derive(Debug, Args)]
struct PointArgs {
    #[arg(long, default_value = "line")]
    slice: SliceKind,
    #[arg(long, value_parser = parse_real, default_value = "0", allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, value_parser = parse_real, default_value = "0", allow_hyphen_values = true)]
    beta: f64,
    #[arg(long, value_parser = parse_real, default_value = "0", allow_hyphen_values = true)]
    gamma: f64,
    /// All d² coefficients `c_{k,l}` in row-major order; replaces the slice flags.
    #[arg(long, allow_hyphen_values = true)]
    coeffs: Option<String>,
}

#[derive(Debug, Args)]
struct ScanArgs {
    #[arg(long, default_value = "line")]
    slice: SliceKind,
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    beta: Option<f64>,
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    gamma: Option<f64>,
    /// Steps per axis.
    #[arg(long, default_value_t = 241)]
    grid: usize,
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    x_range: Option<(f64, f64)>,
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    y_range: Option<(f64, f64)>,
    /// `all`, `none` or `band:WIDTH`.
    #[arg(long, value_parser = parse_policy)]
    policy: Option<WitnessPolicy>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<Format>,
    /// File stem (default: `scan_<slice>`).
    #[arg(long)]
    name: Option<String>,
}

#[derive(Debug, Args)]
struct FigureArgs {
    which: Figure,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<Format>,
    /// Override the figure's grid steps per axis.
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    rays: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum SymmetryCmd {
    /// List every line of Z_d², bundle by bundle.
    Lines {
        #[arg(long)]
        d: Option<usize>,
    },
    /// The group element carrying a line onto the reference line.
    Canonicalize {
        #[arg(long)]
        line: String,
        #[arg(long)]
        d: Option<usize>,
    },
    /// Orbit of a phase-space point, e.g. `(1,0)`.
    Orbit {
        #[arg(long)]
        point: String,
        #[arg(long)]
        d: Option<usize>,
    },
}

#[derive(Debug)]
enum Failure {
    Invariant(String),
    Usage(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invariant(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Invariant(m) | Failure::Usage(m) | Failure::Io(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Io(_) => Failure::Io(msg),
            Error::InvariantViolation(_)
            | Error::NotHermitian(_)
            | Error::Infeasible
            | Error::LpInternal(_)
            | Error::InsufficientPoints { .. }
            | Error::Json(_) => Failure::Invariant(msg),
            _ => Failure::Usage(msg),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Invariant(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn parse_policy(s: &str) -> Result<WitnessPolicy, String> {
    match s {
        "all" => Ok(WitnessPolicy::All),
        "none" => Ok(WitnessPolicy::None),
        _ => match s.strip_prefix("band:") {
            Some(w) => Ok(WitnessPolicy::Band { width: parse_real(w)? }),
            None => Err(format!("expected all, none or band:WIDTH, got {s:?}")),
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: Cli) -> CmdResult {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)
            .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?
            .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.validate().map_err(Failure::Usage)?;
    if let Some(n) = cli.jobs {
        if n == 0 {
            return Err(Failure::Usage("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Invariant(e.to_string()))?;
    }
    match cli.cmd {
        Command::Basis { d, json } => cmd_basis(d.unwrap_or(cfg.d), json),
        Command::Classify(p) => cmd_classify(&p, &cfg),
        Command::Witness(p) => cmd_witness(&p, &cfg),
        Command::Scan(s) => cmd_scan(&s, &cfg),
        Command::Figures(f) => cmd_figures(&f, &cfg),
        Command::Symmetry { cmd } => match cmd {
            SymmetryCmd::Lines { d } => cmd_lines(d.unwrap_or(cfg.d)),
            SymmetryCmd::Canonicalize { line, d } => cmd_canonicalize(&line, d.unwrap_or(cfg.d)),
            SymmetryCmd::Orbit { point, d } => cmd_orbit(&point, d.unwrap_or(cfg.d)),
        },
    }
}

fn print_json(v: &impl serde::Serialize) -> CmdResult {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn cmd_basis(d: usize, as_json: bool) -> CmdResult {
    let basis = WeylBasis::build(d)?;
    let r = basis.check();
    let ok = r.projectors == d * d && r.max_residual() <= BASIS_TOL;
    if as_json {
        print_json(&json!({ "report": r, "max_residual": r.max_residual(), "ok": ok }))?;
    } else {
        println!("d = {d}");
        println!("projectors: {}", r.projectors);
        for (name, v) in [
            ("unitarity", r.unitarity),
            ("orthonormality", r.orthonormality),
            ("completeness", r.completeness),
            ("idempotence", r.idempotence),
            ("hermiticity", r.hermiticity),
            ("reduced states", r.reduced_states),
        ] {
            println!("{name} residual: {v:.3e}");
        }
        println!("status: {}", if ok { "ok" } else { "FAILED" });
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Invariant(format!("basis residual {:.3e} exceeds {BASIS_TOL:e}", r.max_residual())))
    }
}

fn point_from_args(p: &PointArgs) -> Result<SimplexPoint, Failure> {
    match &p.coeffs {
        Some(list) => {
            let coeffs =
                list.split(',').map(parse_real).collect::<Result<Vec<f64>, String>>().map_err(Failure::Usage)?;
            let d = (coeffs.len() as f64).sqrt().round() as usize;
            Ok(SimplexPoint::new(d, coeffs)?)
        }
        None => Ok(p.slice.point(Coords::new(p.alpha, p.beta, p.gamma))),
    }
}

fn cmd_classify(p: &PointArgs, cfg: &RunConfig) -> CmdResult {
    let point = point_from_args(p)?;
    let basis = WeylBasis::build(point.d())?;
    let c = classify(&point, &basis, &cfg.witness_config())?;
    print_json(&c)
}

fn cmd_witness(p: &PointArgs, cfg: &RunConfig) -> CmdResult {
    let point = point_from_args(p)?;
    let basis = WeylBasis::build(point.d())?;
    let out = optimize_witness(&point, &basis, &cfg.witness_config())?;
    print_json(&json!({
        "witness": out.record(),
        "lp_bound": out.lp_bound,
        "converged": out.converged,
        "rounds": out.lp_history.len(),
    }))
}

fn cmd_scan(s: &ScanArgs, cfg: &RunConfig) -> CmdResult {
    let fixed = Coords::new(s.alpha.unwrap_or(0.0), s.beta.unwrap_or(0.0), s.gamma.unwrap_or(0.0));
    let mut g = GridSpec::default_for(s.slice, fixed, s.grid);
    g.seed = cfg.seed;
    if let Some((lo, hi)) = s.x_range {
        g.x = Axis::new(g.x.param, lo, hi, s.grid);
    }
    if let Some((lo, hi)) = s.y_range {
        g.y = Axis::new(g.y.param, lo, hi, s.grid);
    }
    if let Some(policy) = s.policy {
        g.policy = policy;
    }
    g.validate()?;

    let format = s.format.unwrap_or(cfg.format);
    let out = s.out.clone().unwrap_or_else(|| cfg.out.clone());
    let stem = s.name.clone().unwrap_or_else(|| format!("scan_{}", s.slice.name().replace('-', "_")));
    let witness = cfg.witness_config();
    let basis = WeylBasis::build(s.slice.d())?;
    let rows = magic_simplex::scan::scan_slice(&g, &basis, &witness)?;

    let file = format!("{stem}.{}", format.extension());
    emit_rows(&rows, format, &out.join(&file))?;
    let mut manifest = Manifest::new(&stem, cfg.seed, &witness);
    manifest.datasets.push(DatasetEntry {
        file: file.clone(),
        kind: "grid".into(),
        grid: Some(g.clone()),
        predicate: None,
        rows: rows.len(),
        x_label: g.x.param.name().into(),
        y_label: g.y.param.name().into(),
        note: None,
    });
    manifest.write(&out.join(format!("{stem}_manifest.json")))?;

    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for r in &rows {
        *counts.entry(r.verdict.as_str()).or_default() += 1;
    }
    println!("wrote {} ({} rows)", out.join(&file).display(), rows.len());
    for (v, n) in counts {
        println!("{v}: {n}");
    }
    Ok(())
}

fn cmd_figures(f: &FigureArgs, cfg: &RunConfig) -> CmdResult {
    let opts = FigureOptions {
        steps: f.steps,
        rays: f.rays.unwrap_or(cfg.rays),
        separability_rays: cfg.separability_rays,
        seed: cfg.seed,
        witness: cfg.witness_config(),
        format: f.format.unwrap_or(cfg.format),
        ..FigureOptions::default()
    };
    let out = f.out.clone().unwrap_or_else(|| cfg.out.clone());
    let manifest = generate_figure(f.which, &out, &opts)?;
    for d in &manifest.datasets {
        println!("{} ({} rows)", out.join(&d.file).display(), d.rows);
    }
    Ok(())
}

fn cmd_lines(d: usize) -> CmdResult {
    let lines = enumerate_lines(d)?;
    let dirs = directions(d);
    println!("d = {d}: {} lines in {} bundles", lines.len(), dirs.len());
    for dir in dirs {
        let bundle: Vec<String> = lines.iter().filter(|l| l.direction == dir).map(|l| l.to_string()).collect();
        println!("direction ({},{}): {}", dir.0, dir.1, bundle.join(" | "));
    }
    Ok(())
}

fn map_kind(m: &SymmetryMap) -> &'static str {
    if (m.a, m.b, m.c, m.e) == (1, 0, 0, 1) {
        "translation"
    } else if m.det() == 1 {
        "rotation"
    } else {
        "reflection"
    }
}

fn cmd_canonicalize(line: &str, d: usize) -> CmdResult {
    let line = PhaseLine::from_points(d, &parse_points(line)?)?;
    let m = canonicalize_line(&line, d)?;
    let image: Vec<String> = m.image_of_line(&line).iter().map(|p| p.to_string()).collect();
    println!("line: {line}");
    println!("map: {m}");
    println!("type: {}", map_kind(&m));
    println!("det: {}", m.det());
    println!("image: {}", image.join(","));
    Ok(())
}

fn cmd_orbit(point: &str, d: usize) -> CmdResult {
    let pts = parse_points(point)?;
    let [p] = pts.as_slice() else {
        return Err(Failure::Usage(format!("expected one point, got {}", pts.len())));
    };
    if p.k >= d || p.l >= d {
        return Err(Failure::Usage(format!("point {p} is outside Z_{d}^2")));
    }
    enumerate_lines(d)?;
    let orbit: Vec<String> = orbit_of_point(d, *p).iter().map(|q| q.to_string()).collect();
    println!("orbit of {p} ({} points): {}", orbit.len(), orbit.join(","));
    Ok(())
}
