//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use magic_simplex::matcore::{hermitian_eigvals, partial_transpose, ComplexMatrix, C64};
use magic_simplex::scan::{
    generate_figure, ppt_straight_segment, rays, scan_slice, trace_boundary, Coords, Figure, FigureOptions, GridSpec,
    Predicate, SliceKind, SliceMargin, WitnessPolicy,
};
use magic_simplex::simplex::{
    all_symmetries, apply_symmetry, density_matrix, enumerate_lines, from_line_coords, generated_group,
    positivity_margin, ppt_margin, LineSliceCoords, SimplexPoint, SymmetryMap,
};
use magic_simplex::witness::{
    classify, min_mphi_eig, optimize_witness, product_state_min, witness_matrix, LineWitness, Verdict, WitnessConfig,
};
use magic_simplex::WeylBasis;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BASIS_TOL: f64 = 1e-12;
const PT_SPECTRUM_TOL: f64 = 1e-12;
const WITNESS_PRECISION: f64 = 1e-6;
const TANGENT_TRACE_TOL: f64 = 1e-4;
const TANGENT_FEAS_LO: f64 = -1e-9;
const TANGENT_FEAS_HI: f64 = 1e-6;
const BOUND_WIDTH_MAX: f64 = 5e-2;
const GAMMA_STEP: f64 = 1e-3;
const TOUCH_PPT_TOL: f64 = 1e-9;
const PPT_INVARIANCE_TOL: f64 = 1e-10;
const SIGN_THRESHOLD: f64 = 1e-6;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn run(id: usize, name: &str, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let t0 = Instant::now();
    let o = f();
    let elapsed = t0.elapsed();
    let in_time = elapsed <= limit;
    let pass = o.pass && in_time;
    let timing = if in_time { String::new() } else { format!(" (over the {:.0?} limit)", limit) };
    println!("criterion {id:>2} {} {name}: {} [{:.1?}]{timing}", if pass { "PASS" } else { "FAIL" }, o.detail, elapsed);
    pass
}

fn basis_validity() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for d in 2..=5 {
        let b = WeylBasis::build(d).expect("basis");
        let r = b.check();
        worst = worst.max(r.max_residual());
        for k in 0..d {
            for l in 0..d {
                let tr = b.projector(k, l).trace();
                ok &= (tr.re - 1.0).abs() <= BASIS_TOL && tr.im.abs() <= BASIS_TOL;
            }
        }
        ok &= r.projectors == d * d;
    }
    ok &= worst <= BASIS_TOL;
    outcome(ok, format!("d = 2..5, max residual {worst:.2e}"))
}

fn swap(d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d * d, d * d, |r, c| {
        let (i, j) = (r / d, r % d);
        if c == j * d + i {
            C64::new(1.0 / d as f64, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

fn pt_spectrum() -> Outcome {
    let mut dev: f64 = 0.0;
    let mut ok = true;
    for d in [2usize, 3] {
        let b = WeylBasis::build(d).unwrap();
        let pt = partial_transpose(b.projector(0, 0), d, d).unwrap();
        // PT of the maximally entangled projector is the swap divided by d.
        dev = dev.max(pt.max_abs_diff(&swap(d)));
        let mut got = hermitian_eigvals(&pt).unwrap();
        got.sort_by(f64::total_cmp);
        let neg = d * (d - 1) / 2;
        let expect: Vec<f64> = (0..d * d).map(|i| if i < neg { -1.0 / d as f64 } else { 1.0 / d as f64 }).collect();
        for (g, e) in got.iter().zip(&expect) {
            dev = dev.max((g - e).abs());
        }
        ok &= got.len() == expect.len();
    }
    ok &= dev <= PT_SPECTRUM_TOL;
    outcome(ok, format!("d = 3: {{-1/3 x3, +1/3 x6}}, d = 2: {{-1/2, +1/2 x3}}, max deviation {dev:.2e}"))
}

/// Positive PPT rows of a full scan must all be separable with no violating witness.
fn ppt_equals_separable(slice: SliceKind, steps: usize) -> (bool, String) {
    let b = WeylBasis::build(slice.d()).unwrap();
    let g = GridSpec { policy: WitnessPolicy::All, ..GridSpec::default_for(slice, Coords::default(), steps) };
    let rows = scan_slice(&g, &b, &WitnessConfig::default()).unwrap();
    let ppt: Vec<_> = rows.iter().filter(|r| r.positivity_margin >= 0.0 && r.ppt_margin >= 0.0).collect();
    let bad = ppt
        .iter()
        .filter(|r| r.verdict != Verdict::SeparableNumerical || r.violation.is_none_or(|v| v < -WITNESS_PRECISION))
        .count();
    let bound = rows.iter().filter(|r| r.verdict == Verdict::BoundEntangled).count();
    let ok = !ppt.is_empty() && bad == 0 && bound == 0;
    (ok, format!("{}x{} grid, {} positive PPT points, {bad} not separable", steps, steps, ppt.len()))
}

fn qubit_slice() -> Outcome {
    let (ok, detail) = ppt_equals_separable(SliceKind::QubitLine, 121);
    outcome(ok, detail)
}

fn symmetric_slice() -> Outcome {
    let (grid_ok, grid_detail) = ppt_equals_separable(SliceKind::SymmetricLine, 121);

    // Witnesses optimized at PPT boundary points inside positivity.
    let b = WeylBasis::build(3).unwrap();
    let cfg = WitnessConfig::default();
    let g = GridSpec::default_for(SliceKind::SymmetricLine, Coords::default(), 61);
    let m = SliceMargin::new(&g, &b, cfg.clone());
    let curve = trace_boundary(&m, Predicate::Ppt, &rays([0.2, 0.2], 4.0, 24), 1e-12).unwrap();
    let mut checked = 0;
    let mut worst_trace: f64 = 0.0;
    let (mut feas_lo, mut feas_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (i, q) in curve.points.iter().enumerate() {
        let p = g.slice.point(g.at(q.x, q.y));
        if positivity_margin(&p) < 0.0 {
            continue;
        }
        let out = optimize_witness(&p, &b, &WitnessConfig { seed: i as u64, ..cfg.clone() }).unwrap();
        let k = witness_matrix(&out.witness, &b).unwrap();
        let rho = density_matrix(&p, &b).unwrap();
        let tr = k.matmul(&rho).unwrap().trace().re;
        let (feas, _) = min_mphi_eig(&out.witness, &b, 128, 1000 + i as u64).unwrap();
        worst_trace = worst_trace.max(tr.abs());
        feas_lo = feas_lo.min(feas);
        feas_hi = feas_hi.max(feas);
        checked += 1;
    }
    let tangent_ok =
        checked >= 8 && worst_trace <= TANGENT_TRACE_TOL && feas_lo >= TANGENT_FEAS_LO && feas_hi <= TANGENT_FEAS_HI;
    outcome(
        grid_ok && tangent_ok,
        format!(
            "{grid_detail}; {checked} boundary witnesses, max |Tr(K rho)| {worst_trace:.2e}, \
             min eig M_Phi in [{feas_lo:.2e}, {feas_hi:.2e}]"
        ),
    )
}

fn bound_entanglement() -> Outcome {
    let b = WeylBasis::build(3).unwrap();
    let cfg = WitnessConfig::default();
    let n = (0.6 / GAMMA_STEP).round() as usize;
    let mut bound = Vec::new();
    let mut ppt_points = 0;
    for i in 0..=n {
        let gamma = -0.2 + i as f64 * GAMMA_STEP;
        let p = from_line_coords(LineSliceCoords::new(0.0, -0.06, gamma));
        let c = classify(&p, &b, &WitnessConfig { seed: i as u64, ..cfg.clone() }).unwrap();
        if c.positivity_margin >= 0.0 && c.ppt_margin >= 0.0 {
            ppt_points += 1;
        }
        if c.verdict == Verdict::BoundEntangled {
            let v = c.violation().unwrap_or(0.0);
            assert!(c.positivity_margin >= -1e-9 && c.ppt_margin >= -1e-9);
            if v < -WITNESS_PRECISION {
                bound.push(gamma);
            }
        }
    }
    let width = match (bound.first(), bound.last()) {
        (Some(lo), Some(hi)) => hi - lo,
        _ => f64::NAN,
    };
    let ok = !bound.is_empty() && width <= BOUND_WIDTH_MAX;
    let range =
        bound.first().map(|lo| format!(" at gamma in [{lo:.3}, {:.3}]", bound.last().unwrap())).unwrap_or_default();
    outcome(ok, format!("{} of {ppt_points} PPT points bound entangled{range}, width {width:.3e}", bound.len()))
}

fn symmetric_diagonal() -> Outcome {
    let b = WeylBasis::build(3).unwrap();
    let cfg = WitnessConfig::default();
    let mut verdicts = Vec::new();
    let mut ok = true;
    for alpha in [-0.1, 0.0, 1.0 / 12.0, 0.2] {
        let p = from_line_coords(LineSliceCoords::new(alpha, -0.06, -0.06));
        let c = classify(&p, &b, &cfg).unwrap();
        ok &= c.verdict != Verdict::BoundEntangled;
        ok &= c.violation().is_none_or(|v| v >= -WITNESS_PRECISION);
        verdicts.push(format!("{alpha:.3}: {}", c.verdict));
    }
    outcome(ok, format!("beta = gamma = -0.06, {}", verdicts.join(", ")))
}

fn touching_point() -> Outcome {
    let b = WeylBasis::build(3).unwrap();
    let p = from_line_coords(LineSliceCoords::new(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0));
    let c = classify(&p, &b, &WitnessConfig::default()).unwrap();
    let touch_ok = c.verdict == Verdict::SeparableNumerical && c.ppt_margin.abs() <= TOUCH_PPT_TOL;

    let g = GridSpec::default_for(SliceKind::Line, Coords::new(0.35, 0.0, 0.0), 61);
    let rows = scan_slice(&g, &b, &WitnessConfig::default()).unwrap();
    let both = rows.iter().filter(|r| r.positivity_margin >= 0.0 && r.ppt_margin >= 0.0).count();
    outcome(
        touch_ok && both == 0,
        format!(
            "(1/3,1/3,1/3): {} ppt margin {:.1e}; alpha = 0.35: {both} of {} points positive and PPT",
            c.verdict,
            c.ppt_margin,
            rows.len()
        ),
    )
}

fn shape_transition() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (alpha, tag, expect) in
        [(0.0, "0", true), (1.0 / 12.0, "1/12", true), (0.25, "1/4", false), (1.0 / 3.0, "1/3", false)]
    {
        let s = ppt_straight_segment(alpha, 128).unwrap();
        ok &= s.found == expect;
        parts.push(format!("alpha {tag}: {} ({} pts)", s.found, s.len));
    }
    outcome(ok, parts.join(", "))
}

fn random_point(rng: &mut ChaCha8Rng, d: usize) -> SimplexPoint {
    let mut c: Vec<f64> = (0..d * d).map(|_| rng.gen_range(-0.1..1.0)).collect();
    let s: f64 = c.iter().sum();
    c.iter_mut().for_each(|x| *x /= s);
    let sum: f64 = c.iter().sum();
    c[0] += 1.0 - sum;
    SimplexPoint::new(d, c).unwrap()
}

fn symmetry_suite() -> Outcome {
    let d = 3;
    let b = WeylBasis::build(d).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut pos_ok = true;
    let mut ppt_dev: f64 = 0.0;
    for _ in 0..100 {
        let p = random_point(&mut rng, d);
        let (pos, ppt) = (positivity_margin(&p), ppt_margin(&p, &b).unwrap());
        for g in SymmetryMap::generators(d) {
            let q = apply_symmetry(&g, &p).unwrap();
            pos_ok &= positivity_margin(&q) == pos;
            ppt_dev = ppt_dev.max((ppt_margin(&q, &b).unwrap() - ppt).abs());
        }
    }
    let lines = enumerate_lines(d).unwrap();
    let group = all_symmetries(d);
    let mut connected = 0;
    for a in &lines {
        for t in &lines {
            let target: BTreeSet<_> = t.point_set();
            if group.iter().any(|g| g.image_of_line(a) == target) {
                connected += 1;
            }
        }
    }
    let generated = generated_group(d).len();
    let ok =
        pos_ok && ppt_dev <= PPT_INVARIANCE_TOL && connected == lines.len() * lines.len() && generated == group.len();
    outcome(
        ok,
        format!(
            "{} generators x 100 points, ppt deviation {ppt_dev:.1e}; {connected}/{} line pairs connected; group order {generated}",
            SymmetryMap::generators(d).len(),
            lines.len() * lines.len()
        ),
    )
}

fn witness_product_consistency() -> Outcome {
    let d = 3;
    let b = WeylBasis::build(d).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut agree = 0;
    let mut witnesses = 0;
    for i in 0..50u64 {
        let lambda = rng.gen_range(0.0..1.0);
        let kappa: Vec<f64> = (0..d).map(|_| rng.gen_range(-0.6..1.0)).collect();
        let kw = LineWitness::new(lambda, kappa);
        let (m, _) = min_mphi_eig(&kw, &b, 32, i).unwrap();
        let k = witness_matrix(&kw, &b).unwrap();
        let p = product_state_min(&k, 2000, 100 + i).unwrap();
        if (m >= -SIGN_THRESHOLD) == (p >= -SIGN_THRESHOLD) {
            agree += 1;
        }
        if m >= -SIGN_THRESHOLD {
            witnesses += 1;
        }
    }
    outcome(agree == 50, format!("{agree}/50 signs agree ({witnesses} witnesses, {} non-witnesses)", 50 - witnesses))
}

fn offline_slice() -> Outcome {
    let b = WeylBasis::build(3).unwrap();
    let mut counts = Vec::new();
    let mut last_inside = usize::MAX;
    for alpha in [0.0, 1.0 / 12.0, 1.0 / 6.0, 0.25, 1.0 / 3.0] {
        let g = GridSpec {
            policy: WitnessPolicy::None,
            ..GridSpec::default_for(SliceKind::Offline, Coords::new(alpha, 0.0, 0.0), 121)
        };
        let rows = scan_slice(&g, &b, &WitnessConfig::default()).unwrap();
        counts.push(rows.iter().filter(|r| r.positivity_margin >= 0.0 && r.ppt_margin >= 0.0).count());
        last_inside = rows.iter().filter(|r| r.positivity_margin >= 0.0 && r.ppt_margin >= -1e-9).count();
    }
    let decreasing = counts.windows(2).all(|w| w[0] > w[1]);
    outcome(
        decreasing && last_inside == 0,
        format!("positive PPT counts {counts:?}; at alpha = 1/3 {last_inside} positive points within PPT tolerance"),
    )
}

fn determinism() -> Outcome {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let opts = FigureOptions { steps: Some(13), rays: 16, separability_rays: 4, seed: 3, ..FigureOptions::default() };
    let mut files = 0;
    let mut mismatched = Vec::new();
    for fig in Figure::ALL {
        let ma = generate_figure(fig, a.path(), &opts).unwrap();
        generate_figure(fig, b.path(), &opts).unwrap();
        let mut names: Vec<String> = ma.datasets.iter().map(|d| d.file.clone()).collect();
        names.push(format!("fig{}_manifest.json", fig.name()));
        for n in names {
            files += 1;
            let x = std::fs::read(a.path().join(&n)).unwrap();
            let y = std::fs::read(b.path().join(&n)).unwrap();
            if x != y {
                mismatched.push(n);
            }
        }
    }
    outcome(mismatched.is_empty(), format!("{files} files across figures 3a, 3b, 4, 5, 6; mismatched {mismatched:?}"))
}

fn main() {
    let min = |m: u64| Duration::from_secs(60 * m);
    let results = [
        run(1, "basis validity", Duration::from_secs(1), basis_validity),
        run(2, "PT spectrum", Duration::from_secs(1), pt_spectrum),
        run(3, "qubit slice PPT = separable", min(5), qubit_slice),
        run(4, "symmetric slice PPT = separable, tangential witnesses", min(15), symmetric_slice),
        run(5, "bound entanglement at alpha = 0, beta = -0.06", min(10), bound_entanglement),
        run(6, "no bound entanglement on beta = gamma = -0.06", min(10), symmetric_diagonal),
        run(7, "touching point and emptiness beyond alpha = 1/3", min(2), touching_point),
        run(8, "PPT shape transition", min(5), shape_transition),
        run(9, "symmetry suite", min(1), symmetry_suite),
        run(10, "witness / product-state sign agreement", min(5), witness_product_consistency),
        run(11, "off-line slice", min(5), offline_slice),
        run(12, "figure determinism", min(10), determinism),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
