//! Substitution systems, curve approximations and identification classes.

mod carpet;
mod octagasket;
mod pentagasket;
pub mod registry;
mod triangles;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::ExactPoint;

pub use carpet::{EdgeAddress, Side};
pub use registry::{registry, Fractal, Registry};

/// The six supported spaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FractalId {
    #[serde(rename = "sg")]
    Sg,
    #[serde(rename = "pg")]
    Pg,
    #[serde(rename = "og")]
    Og,
    #[serde(rename = "mc")]
    Mc,
    #[serde(rename = "torus")]
    Torus,
    #[serde(rename = "triangle")]
    Triangle,
}

impl FractalId {
    pub const ALL: [FractalId; 6] = [
        FractalId::Sg,
        FractalId::Pg,
        FractalId::Og,
        FractalId::Mc,
        FractalId::Torus,
        FractalId::Triangle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FractalId::Sg => "sg",
            FractalId::Pg => "pg",
            FractalId::Og => "og",
            FractalId::Mc => "mc",
            FractalId::Torus => "torus",
            FractalId::Triangle => "triangle",
        }
    }

    /// Parameter denominator D(m): level-m points are `k / D(m)`.
    pub fn denominator(self, level: u32) -> u64 {
        match self {
            FractalId::Sg => 3u64.pow(level + 1),
            FractalId::Pg => 5u64.pow(level + 1),
            FractalId::Og => 2 * 8u64.pow(level + 1),
            FractalId::Mc => 2 * 8u64.pow(level),
            FractalId::Torus => 2 * 9u64.pow(level),
            FractalId::Triangle => 3 * 4u64.pow(level),
        }
    }

    /// Number of segments of γ_m.
    pub fn segment_count(self, level: u32) -> u64 {
        match self {
            FractalId::Pg => 3 * 5u64.pow(level),
            other => other.denominator(level),
        }
    }
}

impl fmt::Display for FractalId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FractalId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        FractalId::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownFractal(s.to_string()))
    }
}

/// A symbolic piece of γ_m: the cell it lives in (a word over the cell
/// alphabet, outermost digit first) and a type tag selecting its rule.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Piece {
    pub word: Vec<u8>,
    pub tag: u16,
}

/// Geometry of one segment before canonicalization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Shape {
    pub start: ExactPoint,
    pub end: ExactPoint,
    pub width: u64,
}

/// A closed substitution system: base pieces plus one rule per tag.
#[derive(Clone, Debug)]
pub struct SubstitutionSystem {
    pub fractal: FractalId,
    /// Bumped whenever a transcribed table changes.
    pub version: u32,
    pub base_level: u32,
    pub base: Vec<Piece>,
    /// tag -> ordered children as (cell digit, child tag).
    pub rules: BTreeMap<u16, Vec<(u8, u16)>>,
    /// tag -> parameter widths of the segments a piece expands into.
    pub widths: BTreeMap<u16, Vec<u64>>,
}

impl SubstitutionSystem {
    /// Tags produced by some rule (or the base) that have no rule of their own.
    pub fn missing_rules(&self) -> Vec<u16> {
        let mut missing: Vec<u16> = self
            .base
            .iter()
            .map(|p| p.tag)
            .chain(self.rules.values().flatten().map(|&(_, t)| t))
            .filter(|t| !self.rules.contains_key(t) || !self.widths.contains_key(t))
            .collect();
        missing.sort_unstable();
        missing.dedup();
        missing
    }

    pub fn apply(&self, pieces: &[Piece]) -> Vec<Piece> {
        let mut out = Vec::with_capacity(pieces.len() * 9);
        for p in pieces {
            for &(digit, tag) in &self.rules[&p.tag] {
                let mut word = p.word.clone();
                word.push(digit);
                out.push(Piece { word, tag });
            }
        }
        out
    }

    /// Symbolic pieces of γ_level.
    pub fn pieces(&self, level: u32) -> Vec<Piece> {
        let mut pieces = self.base.clone();
        for _ in self.base_level..level {
            pieces = self.apply(&pieces);
        }
        pieces
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub param_start: u64,
    pub param_end: u64,
    pub geo_start: ExactPoint,
    pub geo_end: ExactPoint,
    pub tag: u16,
    pub cell: Vec<u8>,
    pub is_jump: bool,
}

/// γ_m: segments tiling `[0, 1)` in units of `1 / denominator`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveApprox {
    pub fractal: FractalId,
    pub level: u32,
    pub denominator: u64,
    pub segments: Vec<Segment>,
}

impl CurveApprox {
    /// Parameter numerators of the segment start points, ascending.
    pub fn points(&self) -> Vec<u64> {
        self.segments.iter().map(|s| s.param_start).collect()
    }

    fn segment_at(&self, k: u64) -> Option<&Segment> {
        self.segments
            .binary_search_by_key(&k, |s| s.param_start)
            .ok()
            .map(|i| &self.segments[i])
    }
}

pub fn build_system(fractal: FractalId) -> SubstitutionSystem {
    registry().get(fractal).system()
}

pub fn generate(fractal: FractalId, level: u32) -> Result<CurveApprox> {
    let f = registry().get(fractal);
    generate_capped(fractal, level, f.level_cap())
}

/// Like [`generate`] with an explicit level cap.
pub fn generate_capped(fractal: FractalId, level: u32, cap: u32) -> Result<CurveApprox> {
    let f = registry().get(fractal);
    let base = f.base_level();
    if level < base {
        return Err(Error::BelowBase { fractal: fractal.name(), level, base });
    }
    if level > cap {
        return Err(Error::LevelCap { fractal: fractal.name(), level, cap });
    }
    let system = f.system();
    let mut segments = Vec::with_capacity(fractal.segment_count(level) as usize);
    let mut raw_ends = Vec::with_capacity(segments.capacity());
    let mut raw_starts = Vec::with_capacity(segments.capacity());
    let mut t = 0u64;
    for piece in system.pieces(level) {
        for shape in f.shapes(&piece, level) {
            raw_starts.push(shape.start);
            raw_ends.push(shape.end);
            segments.push(Segment {
                param_start: t,
                param_end: t + shape.width,
                geo_start: f.canonical(shape.start, level),
                geo_end: f.canonical(shape.end, level),
                tag: piece.tag,
                cell: piece.word.clone(),
                is_jump: false,
            });
            t += shape.width;
        }
    }
    let denominator = fractal.denominator(level);
    if t != denominator {
        return Err(Error::Structure(format!(
            "{fractal} level {level}: widths sum to {t}, expected {denominator}"
        )));
    }
    let n = segments.len();
    for i in 0..n {
        let next = (i + 1) % n;
        if segments[i].geo_end != segments[next].geo_start {
            return Err(Error::Structure(format!(
                "{fractal} level {level}: segment {i} does not end where segment {next} starts"
            )));
        }
        segments[i].is_jump = !f.unsewn_equal(raw_ends[i], raw_starts[next], level);
    }
    Ok(CurveApprox { fractal, level, denominator, segments })
}

/// Partition of the parameter points into classes of coinciding points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentificationMap {
    pub fractal: FractalId,
    pub level: u32,
    pub denominator: u64,
    /// Parameter numerators that are points of γ_m, ascending.
    pub points: Vec<u64>,
    /// Class index of each entry of `points`.
    pub class_of: Vec<usize>,
    /// Members of each class, ascending; classes ordered by smallest member.
    pub classes: Vec<Vec<u64>>,
}

impl IdentificationMap {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn point_index(&self, k: u64) -> Option<usize> {
        self.points.binary_search(&k).ok()
    }

    /// Class index of parameter numerator `k` (taken mod D).
    pub fn class_of_k(&self, k: u64) -> Option<usize> {
        self.point_index(k % self.denominator).map(|i| self.class_of[i])
    }

    /// Class id = smallest member.
    pub fn class_id(&self, class: usize) -> u64 {
        self.classes[class][0]
    }
}

pub fn identify(curve: &CurveApprox) -> IdentificationMap {
    let mut by_point: HashMap<ExactPoint, Vec<u64>> = HashMap::new();
    for s in &curve.segments {
        by_point.entry(s.geo_start).or_default().push(s.param_start);
    }
    let mut classes: Vec<Vec<u64>> = by_point.into_values().collect();
    for c in classes.iter_mut() {
        c.sort_unstable();
    }
    classes.sort_unstable_by_key(|c| c[0]);
    let points = curve.points();
    let mut class_of = vec![0usize; points.len()];
    for (ci, c) in classes.iter().enumerate() {
        for &k in c {
            let i = points.binary_search(&k).expect("class member is a point");
            class_of[i] = ci;
        }
    }
    IdentificationMap {
        fractal: curve.fractal,
        level: curve.level,
        denominator: curve.denominator,
        points,
        class_of,
        classes,
    }
}

/// Class size -> number of classes of that size.
pub fn class_histogram(idmap: &IdentificationMap) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for c in &idmap.classes {
        *h.entry(c.len()).or_insert(0) += 1;
    }
    h
}

/// Exact image γ_m(k / D(m)).
pub fn point_at(curve: &CurveApprox, k: u64) -> Result<ExactPoint> {
    if k >= curve.denominator {
        return Err(Error::Invalid(format!(
            "point index {k} out of range 0..{}",
            curve.denominator
        )));
    }
    curve
        .segment_at(k)
        .map(|s| s.geo_start)
        .ok_or_else(|| Error::Invalid(format!("{k}/{} is not a vertex of γ_{}", curve.denominator, curve.level)))
}
