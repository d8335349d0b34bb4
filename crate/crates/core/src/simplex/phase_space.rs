//! Discrete phase space `Z_d²` of Bell indices: lines and affine symmetries.
//!
//! A Bell index `(k, l)` is a point; an affine map `(k,l) ↦ A(k,l) + t` with
//! `det A ≡ ±1 (mod d)` permutes Bell projectors and is realised on states by a
//! local (anti)unitary, so it preserves positivity, the PPT spectrum and
//! separability.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::point::SimplexPoint;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PhasePoint {
    pub k: usize,
    pub l: usize,
}

impl PhasePoint {
    pub fn new(k: usize, l: usize) -> Self {
        Self { k, l }
    }
}

impl fmt::Display for PhasePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.k, self.l)
    }
}

/// `d` points `{base + t·direction}`; the direction is normalised so its first
/// non-zero component is 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseLine {
    pub d: usize,
    pub direction: (usize, usize),
    pub points: Vec<PhasePoint>,
}

impl PhaseLine {
    /// Validates `points` as a full line of `Z_d²` (any order).
    pub fn from_points(d: usize, points: &[PhasePoint]) -> Result<Self> {
        require_prime(d)?;
        if points.len() != d {
            return Err(Error::InvalidLine(format!("expected {d} points, got {}", points.len())));
        }
        if points.iter().any(|p| p.k >= d || p.l >= d) {
            return Err(Error::InvalidLine("point outside Z_d^2".into()));
        }
        let set: BTreeSet<PhasePoint> = points.iter().copied().collect();
        if set.len() != d {
            return Err(Error::InvalidLine("repeated points".into()));
        }
        let base = *set.iter().next().unwrap();
        let other = *set.iter().nth(1).unwrap();
        let dir = normalize_direction(d, ((other.k + d - base.k) % d, (other.l + d - base.l) % d));
        let line = Self::through(d, base, dir);
        let got: BTreeSet<PhasePoint> = line.points.iter().copied().collect();
        if got != set {
            return Err(Error::InvalidLine(format!("points {} are not collinear", fmt_points(points))));
        }
        Ok(line)
    }

    fn through(d: usize, base: PhasePoint, direction: (usize, usize)) -> Self {
        let points =
            (0..d).map(|t| PhasePoint::new((base.k + t * direction.0) % d, (base.l + t * direction.1) % d)).collect();
        Self { d, direction, points }
    }

    /// `{(0,0), (1,0), ..., (d-1,0)}`, the line the witness family is written for.
    pub fn reference(d: usize) -> Self {
        Self::through(d, PhasePoint::new(0, 0), (1, 0))
    }

    pub fn contains(&self, p: PhasePoint) -> bool {
        self.points.contains(&p)
    }

    pub fn point_set(&self) -> BTreeSet<PhasePoint> {
        self.points.iter().copied().collect()
    }
}

impl fmt::Display for PhaseLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_points(&self.points))
    }
}

fn fmt_points(points: &[PhasePoint]) -> String {
    points.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
}

pub fn is_prime(d: usize) -> bool {
    d >= 2 && (2..d).take_while(|i| i * i <= d).all(|i| !d.is_multiple_of(i))
}

fn require_prime(d: usize) -> Result<()> {
    if is_prime(d) {
        Ok(())
    } else {
        Err(Error::NotPrime(d))
    }
}

fn mod_inverse(a: usize, d: usize) -> Option<usize> {
    (1..d).find(|&x| (a * x) % d == 1)
}

fn normalize_direction(d: usize, (a, b): (usize, usize)) -> (usize, usize) {
    let lead = if a != 0 { a } else { b };
    let inv = mod_inverse(lead, d).expect("prime modulus");
    ((a * inv) % d, (b * inv) % d)
}

/// Line directions in bundle order: `(1,0), (1,1), ..., (1,d-1), (0,1)`.
pub fn directions(d: usize) -> Vec<(usize, usize)> {
    (0..d).map(|m| (1, m)).chain(std::iter::once((0, 1))).collect()
}

/// All `d(d+1)` lines, grouped bundle by bundle; each line starts at its
/// lexicographically smallest point.
pub fn enumerate_lines(d: usize) -> Result<Vec<PhaseLine>> {
    require_prime(d)?;
    let mut out = Vec::with_capacity(d * (d + 1));
    for dir in directions(d) {
        let mut seen = BTreeSet::new();
        for k in 0..d {
            for l in 0..d {
                let p = PhasePoint::new(k, l);
                if seen.contains(&p) {
                    continue;
                }
                let line = PhaseLine::through(d, p, dir);
                seen.extend(line.points.iter().copied());
                out.push(line);
            }
        }
    }
    Ok(out)
}

/// Affine map `(k,l) ↦ (a·k + b·l + t.0, c·k + e·l + t.1) mod d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SymmetryMap {
    pub d: usize,
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub e: usize,
    pub t: (usize, usize),
}

impl SymmetryMap {
    pub fn new(d: usize, [a, b, c, e]: [i64; 4], t: (i64, i64)) -> Self {
        let m = |x: i64| x.rem_euclid(d as i64) as usize;
        Self { d, a: m(a), b: m(b), c: m(c), e: m(e), t: (m(t.0), m(t.1)) }
    }

    pub fn identity(d: usize) -> Self {
        Self::new(d, [1, 0, 0, 1], (0, 0))
    }

    pub fn translation(d: usize, t: (i64, i64)) -> Self {
        Self::new(d, [1, 0, 0, 1], t)
    }

    /// `(k,l) ↦ (-k, l)`
    pub fn reflection(d: usize) -> Self {
        Self::new(d, [-1, 0, 0, 1], (0, 0))
    }

    /// `(k,l) ↦ (l, -k)`
    pub fn rotation(d: usize) -> Self {
        Self::new(d, [0, 1, -1, 0], (0, 0))
    }

    /// `(k,l) ↦ (k, l + k)`
    pub fn shear(d: usize) -> Self {
        Self::new(d, [1, 0, 1, 1], (0, 0))
    }

    /// The generators admitted by the invariance suite.
    pub fn generators(d: usize) -> Vec<Self> {
        vec![
            Self::translation(d, (1, 0)),
            Self::translation(d, (0, 1)),
            Self::reflection(d),
            Self::rotation(d),
            Self::shear(d),
        ]
    }

    pub fn det(&self) -> usize {
        let d = self.d;
        (self.a * self.e + d * d - (self.b * self.c) % (d * d)) % d
    }

    pub fn is_bijective(&self) -> bool {
        let det = self.det();
        det != 0 && (2..self.d).all(|p| !(self.d.is_multiple_of(p) && det.is_multiple_of(p)))
    }

    /// Whether `det A ≡ ±1`, the condition for the implemented symmetry group.
    pub fn in_group(&self) -> bool {
        let det = self.det();
        det == 1 % self.d || det == self.d - 1
    }

    pub fn apply(&self, p: PhasePoint) -> PhasePoint {
        let d = self.d;
        PhasePoint::new((self.a * p.k + self.b * p.l + self.t.0) % d, (self.c * p.k + self.e * p.l + self.t.1) % d)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.d, other.d);
        let d = self.d as i64;
        let (a, b, c, e) = (self.a as i64, self.b as i64, self.c as i64, self.e as i64);
        let (a2, b2, c2, e2) = (other.a as i64, other.b as i64, other.c as i64, other.e as i64);
        let (t0, t1) = (other.t.0 as i64, other.t.1 as i64);
        Self::new(
            self.d,
            [a * a2 + b * c2, a * b2 + b * e2, c * a2 + e * c2, c * b2 + e * e2],
            ((a * t0 + b * t1 + self.t.0 as i64) % d, (c * t0 + e * t1 + self.t.1 as i64) % d),
        )
    }

    pub fn inverse(&self) -> Result<Self> {
        let d = self.d;
        let det = self.det();
        let inv = mod_inverse(det, d).filter(|_| self.is_bijective()).ok_or(Error::NonBijective(det as i64))?;
        let di = inv as i64;
        let (a, b, c, e) = (self.a as i64, self.b as i64, self.c as i64, self.e as i64);
        let lin = Self::new(d, [e * di, -b * di, -c * di, a * di], (0, 0));
        let shifted = lin.apply(PhasePoint::new(self.t.0, self.t.1));
        Ok(Self { t: ((d - shifted.k) % d, (d - shifted.l) % d), ..lin })
    }

    pub fn image_of_line(&self, line: &PhaseLine) -> BTreeSet<PhasePoint> {
        line.points.iter().map(|&p| self.apply(p)).collect()
    }
}

impl fmt::Display for SymmetryMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(k,l) -> ({}k+{}l+{}, {}k+{}l+{}) mod {}",
            self.a, self.b, self.t.0, self.c, self.e, self.t.1, self.d
        )
    }
}

/// Every group element, proper maps (`det ≡ 1`) first, then by `(a,b,c,e)`
/// and translation, lexicographically.
pub fn all_symmetries(d: usize) -> Vec<SymmetryMap> {
    let mut out = Vec::new();
    let mut improper = Vec::new();
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                for e in 0..d {
                    for t0 in 0..d {
                        for t1 in 0..d {
                            let m = SymmetryMap { d, a, b, c, e, t: (t0, t1) };
                            if !m.in_group() {
                                continue;
                            }
                            if m.det() == 1 % d {
                                out.push(m);
                            } else {
                                improper.push(m);
                            }
                        }
                    }
                }
            }
        }
    }
    out.extend(improper);
    out
}

/// `c'[m(k,l)] = c[k,l]`.
pub fn apply_symmetry(m: &SymmetryMap, p: &SimplexPoint) -> Result<SimplexPoint> {
    if m.d != p.d() {
        return Err(Error::DimensionMismatch(format!("map has d = {}, point has d = {}", m.d, p.d())));
    }
    if !m.is_bijective() {
        return Err(Error::NonBijective(m.det() as i64));
    }
    let d = p.d();
    let mut out = vec![0.0; d * d];
    for k in 0..d {
        for l in 0..d {
            let q = m.apply(PhasePoint::new(k, l));
            out[q.k * d + q.l] = p.coeff(k, l);
        }
    }
    Ok(SimplexPoint::from_raw(d, out))
}

/// The first group element (in [`all_symmetries`] order) carrying `line` onto
/// the reference line.
pub fn canonicalize_line(line: &PhaseLine, d: usize) -> Result<SymmetryMap> {
    if line.d != d {
        return Err(Error::InvalidLine(format!("line lives in Z_{} but d = {d}", line.d)));
    }
    let line = PhaseLine::from_points(d, &line.points)?;
    let target = PhaseLine::reference(d).point_set();
    all_symmetries(d)
        .into_iter()
        .find(|m| m.image_of_line(&line) == target)
        .ok_or_else(|| Error::InvalidLine(format!("no symmetry maps {line} to the reference line")))
}

/// Images of a Bell index under the whole group.
pub fn orbit_of_point(d: usize, p: PhasePoint) -> BTreeSet<PhasePoint> {
    all_symmetries(d).iter().map(|m| m.apply(p)).collect()
}

/// Closure of [`SymmetryMap::generators`] under composition.
pub fn generated_group(d: usize) -> BTreeSet<SymmetryMap> {
    let gens = SymmetryMap::generators(d);
    let mut group = BTreeSet::from([SymmetryMap::identity(d)]);
    let mut frontier = vec![SymmetryMap::identity(d)];
    while let Some(g) = frontier.pop() {
        for h in &gens {
            let n = h.compose(&g);
            if group.insert(n) {
                frontier.push(n);
            }
        }
    }
    group
}

/// Parses `"(0,0),(1,0),(2,0)"`.
pub fn parse_points(s: &str) -> Result<Vec<PhasePoint>> {
    let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let nums: Vec<&str> = cleaned.split(['(', ')', ',']).filter(|t| !t.is_empty()).collect();
    if nums.is_empty() || !nums.len().is_multiple_of(2) {
        return Err(Error::InvalidLine(format!("cannot parse points from {s:?}")));
    }
    nums.chunks(2)
        .map(|c| {
            let k = c[0].parse().map_err(|_| Error::InvalidLine(format!("bad coordinate {:?}", c[0])))?;
            let l = c[1].parse().map_err(|_| Error::InvalidLine(format!("bad coordinate {:?}", c[1])))?;
            Ok(PhasePoint::new(k, l))
        })
        .collect()
}
