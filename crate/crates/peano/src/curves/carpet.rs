//! Magic carpet and flat torus on the 3^m square grid.
//!
//! A piece is a visit to one grid cell: it enters at a corner, runs along
//! two consecutive sides and leaves at the opposite corner. The tag is the
//! cell orientation (bit 0 flips x, bit 1 flips y); orientations compose by
//! xor. Points are Gaussian rationals, reduced mod 1 (torus sewing of the
//! outer square) and, for the carpet, with every removed square sewn up the
//! same way: its right side glued to its left, its top to its bottom.

use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use super::registry::{Fractal, OperatorRule, RowCase};
use super::{FractalId, Piece, Segment, Shape, SubstitutionSystem};
use crate::analysis::CircleSymmetry;
use crate::exact::ExactPoint;

/// Child cells of an identity-oriented visit: (position, orientation).
const MC_TEMPLATE: [((i64, i64), u16); 8] = [
    ((0, 0), 0),
    ((1, 0), 2),
    ((2, 0), 0),
    ((2, 1), 1),
    ((0, 1), 1),
    ((0, 2), 0),
    ((1, 2), 2),
    ((2, 2), 0),
];

const TORUS_TEMPLATE: [((i64, i64), u16); 9] = [
    ((0, 0), 0),
    ((1, 0), 2),
    ((2, 0), 0),
    ((2, 1), 1),
    ((1, 1), 3),
    ((0, 1), 1),
    ((0, 2), 0),
    ((1, 2), 2),
    ((2, 2), 0),
];

static MC_CASES: [RowCase; 3] = [
    RowCase { name: "2 identifications", class_size: 2, distinct: 4, self_slots: 0, diag: 12.0, per_traversal: 3.0 },
    RowCase {
        name: "6 identifications, 12 distinct neighbors",
        class_size: 6,
        distinct: 12,
        self_slots: 0,
        diag: 12.0,
        per_traversal: 1.0,
    },
    RowCase {
        name: "6 identifications, 8 distinct neighbors",
        class_size: 6,
        distinct: 8,
        self_slots: 4,
        diag: 8.0,
        per_traversal: 1.0,
    },
];

static TORUS_CASES: [RowCase; 1] =
    [RowCase { name: "lattice", class_size: 2, distinct: 4, self_slots: 0, diag: 4.0, per_traversal: 1.0 }];

/// Default eigenvalue renormalization for the carpet.
pub const MC_RENORM: f64 = 6.4;

fn orient(g: u16, x: i64, y: i64, len: i64) -> (i64, i64) {
    let x = if g & 1 == 1 { len - x } else { x };
    let y = if g & 2 == 2 { len - y } else { y };
    (x, y)
}

/// Cell side of a segment, in the unrotated grid frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    N,
    E,
    S,
    W,
}

/// Symbolic address of an m-cell side. Two addresses are equal when the
/// sewing maps send them to the same edge.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EdgeAddress {
    pub cell_path: Vec<u8>,
    pub side: Side,
    canonical: ExactPoint,
}

impl EdgeAddress {
    /// Canonical edge midpoint; canonicalizing again returns the same value.
    pub fn canonical_midpoint(&self) -> ExactPoint {
        self.canonical
    }
}

impl PartialEq for EdgeAddress {
    fn eq(&self, o: &Self) -> bool {
        self.canonical == o.canonical
    }
}

impl Eq for EdgeAddress {}

impl Hash for EdgeAddress {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.canonical.hash(h)
    }
}

pub struct Carpet {
    id: FractalId,
    template: &'static [((i64, i64), u16)],
    cases: &'static [RowCase],
}

impl Carpet {
    pub fn magic() -> Self {
        Carpet { id: FractalId::Mc, template: &MC_TEMPLATE, cases: &MC_CASES }
    }

    pub fn torus() -> Self {
        Carpet { id: FractalId::Torus, template: &TORUS_TEMPLATE, cases: &TORUS_CASES }
    }

    fn sewn(&self) -> bool {
        self.id == FractalId::Mc
    }

    fn children(&self, g: u16) -> Vec<(u8, u16)> {
        self.template
            .iter()
            .map(|&((cx, cy), cg)| {
                let (lx, ly) = orient(g, cx, cy, 2);
                ((3 * ly + lx) as u8, g ^ cg)
            })
            .collect()
    }

    /// Integer coordinates of `p` on the grid of spacing 1/scale.
    fn grid(p: ExactPoint, scale: i64) -> (i64, i64) {
        let c = p.coefficients();
        let d = p.denominator();
        assert!(scale % d == 0, "point {p:?} is off the 1/{scale} grid");
        (c[0] * (scale / d), c[1] * (scale / d))
    }

    /// Reduces half-grid coordinates (scale 2·3^m) to the canonical representative.
    fn reduce(&self, x: i64, y: i64, level: u32) -> (i64, i64) {
        let s = 2 * 3i64.pow(level);
        let (mut x, mut y) = (x.rem_euclid(s), y.rem_euclid(s));
        if !self.sewn() {
            return (x, y);
        }
        let mut parent = s;
        for _ in 0..level {
            let t = parent / 3;
            let (lx, ly) = (x % parent, y % parent);
            if (t..=2 * t).contains(&lx) && (t..=2 * t).contains(&ly) {
                if lx == 2 * t {
                    x -= t;
                }
                if ly == 2 * t {
                    y -= t;
                }
                break;
            }
            parent = t;
        }
        (x, y)
    }

    fn origin(word: &[u8], level: u32) -> (i64, i64, i64) {
        let mut x = 0;
        let mut y = 0;
        let mut size = 3i64.pow(level);
        for &d in word {
            size /= 3;
            x += (d % 3) as i64 * size;
            y += (d / 3) as i64 * size;
        }
        (x, y, size)
    }
}

impl Fractal for Carpet {
    fn id(&self) -> FractalId {
        self.id
    }

    fn base_level(&self) -> u32 {
        1
    }

    fn level_cap(&self) -> u32 {
        if self.sewn() {
            4
        } else {
            3
        }
    }

    fn system(&self) -> SubstitutionSystem {
        let base = self.children(0).into_iter().map(|(d, tag)| Piece { word: vec![d], tag }).collect();
        let mut rules = BTreeMap::new();
        let mut widths = BTreeMap::new();
        for g in 0..4u16 {
            rules.insert(g, self.children(g));
            widths.insert(g, vec![1, 1]);
        }
        SubstitutionSystem { fractal: self.id, version: 1, base_level: 1, base, rules, widths }
    }

    fn shapes(&self, piece: &Piece, level: u32) -> Vec<Shape> {
        let (x0, y0, s) = Carpet::origin(&piece.word, level);
        let n = 3i64.pow(level);
        let pts: Vec<ExactPoint> = [(0, 0), (1, 0), (1, 1)]
            .iter()
            .map(|&(a, b)| {
                let (x, y) = orient(piece.tag, a * s, b * s, s);
                ExactPoint::gaussian(x0 + x, y0 + y, n)
            })
            .collect();
        vec![
            Shape { start: pts[0], end: pts[1], width: 1 },
            Shape { start: pts[1], end: pts[2], width: 1 },
        ]
    }

    fn canonical(&self, p: ExactPoint, level: u32) -> ExactPoint {
        let s = 2 * 3i64.pow(level);
        let (x, y) = Carpet::grid(p, s);
        let (x, y) = self.reduce(x, y, level);
        ExactPoint::gaussian(x, y, s)
    }

    fn unsewn_equal(&self, a: ExactPoint, b: ExactPoint, level: u32) -> bool {
        let s = 2 * 3i64.pow(level);
        let (ax, ay) = Carpet::grid(a, s);
        let (bx, by) = Carpet::grid(b, s);
        (ax - bx).rem_euclid(s) == 0 && (ay - by).rem_euclid(s) == 0
    }

    fn operator(&self) -> OperatorRule {
        OperatorRule::Stencil { cases: self.cases }
    }

    fn renorm_factor(&self, level: u32) -> f64 {
        if self.sewn() {
            MC_RENORM.powi(level as i32)
        } else {
            9f64.powi(level as i32) / (4.0 * std::f64::consts::PI * std::f64::consts::PI)
        }
    }

    fn weyl_beta(&self) -> f64 {
        if self.sewn() {
            1.2
        } else {
            1.0
        }
    }

    /// The parameterization respects no circle transformation here.
    fn circle_symmetries(&self) -> Vec<CircleSymmetry> {
        Vec::new()
    }

    fn dihedral_order(&self) -> u32 {
        4
    }

    fn edge_address(&self, seg: &Segment, level: u32) -> Option<EdgeAddress> {
        let piece = Piece { word: seg.cell.clone(), tag: seg.tag };
        let shape = self.shapes(&piece, level)[(seg.param_start % 2) as usize];
        let s = 2 * 3i64.pow(level);
        let (ax, ay) = Carpet::grid(shape.start, s);
        let (bx, by) = Carpet::grid(shape.end, s);
        let (mx, my) = ((ax + bx) / 2, (ay + by) / 2);
        let (x0, y0, size) = Carpet::origin(&seg.cell, level);
        let (x0, y0, size) = (2 * x0, 2 * y0, 2 * size);
        let side = if my == y0 {
            Side::S
        } else if my == y0 + size {
            Side::N
        } else if mx == x0 {
            Side::W
        } else {
            debug_assert_eq!(mx, x0 + size);
            Side::E
        };
        let (cx, cy) = self.reduce(mx, my, level);
        Some(EdgeAddress { cell_path: seg.cell.clone(), side, canonical: ExactPoint::gaussian(cx, cy, s) })
    }
}
