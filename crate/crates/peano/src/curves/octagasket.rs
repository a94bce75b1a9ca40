//! Octagasket: γ_0 runs around the octagon clockwise and then
//! counterclockwise; points live in `Z[ζ8][1/2]`.
//!
//! A piece is a directed octagon side `a → a ± 1` of its cell. It becomes
//! two sides of the cell at `a` followed by six sides of the neighbouring
//! cell, traversed the other way round.

use std::collections::BTreeMap;

use super::registry::{Fractal, OperatorRule, RowCase};
use super::{FractalId, Piece, Shape, SubstitutionSystem};
use crate::analysis::CircleSymmetry;
use crate::exact::ExactPoint;

fn corner(a: i64) -> ExactPoint {
    ExactPoint::zeta(8, a)
}

/// Contraction ratio 1/(2 + √2) = (2 - √2)/2 with √2 = ζ - ζ³.
fn ratio() -> ExactPoint {
    let sqrt2 = ExactPoint::zeta(8, 1) - ExactPoint::zeta(8, 3);
    (ExactPoint::from_int(8, 2) - sqrt2).div_int(2)
}

fn word_map(word: &[u8], z: ExactPoint) -> ExactPoint {
    let rho = ratio();
    word.iter().rev().fold(z, |z, &d| {
        let p = corner(d as i64);
        p + rho * (z - p)
    })
}

/// tag = 2a for a → a+1, 2a+1 for a → a-1.
fn tag(a: i64, up: bool) -> u16 {
    (2 * a.rem_euclid(8) + if up { 0 } else { 1 }) as u16
}

fn decode(tag: u16) -> (i64, i64) {
    let a = (tag / 2) as i64;
    (a, if tag % 2 == 0 { 1 } else { -1 })
}

fn digit(a: i64) -> u8 {
    a.rem_euclid(8) as u8
}

fn children(t: u16) -> Vec<(u8, u16)> {
    let (a, dir) = decode(t);
    let mut out = Vec::with_capacity(8);
    if dir == 1 {
        out.push((digit(a), tag(a, true)));
        out.push((digit(a), tag(a + 1, true)));
        out.extend((0..6).map(|i| (digit(a + 1), tag(a - 1 - i, false))));
    } else {
        let c = a - 1;
        out.push((digit(a), tag(a, false)));
        out.push((digit(a), tag(a - 1, false)));
        out.extend((0..6).map(|i| (digit(c), tag(c + 2 + i, true))));
    }
    out
}

static OG_CASES: [RowCase; 2] = [
    RowCase { name: "outer", class_size: 2, distinct: 2, self_slots: 0, diag: 4.0, per_traversal: 1.0 },
    RowCase { name: "inner", class_size: 4, distinct: 4, self_slots: 0, diag: 4.0, per_traversal: 0.5 },
];

/// Default 8/r. Level ratios suggest about 14.885 (see
/// `spectra::estimate_renorm`); the renormalized tables use 14.9.
pub const OG_RENORM: f64 = 14.9;

pub struct Octagasket;

impl Fractal for Octagasket {
    fn id(&self) -> FractalId {
        FractalId::Og
    }

    fn base_level(&self) -> u32 {
        0
    }

    fn level_cap(&self) -> u32 {
        3
    }

    fn system(&self) -> SubstitutionSystem {
        let base = (0..8)
            .map(|k| Piece { word: vec![], tag: tag(-k, false) })
            .chain((0..8).map(|k| Piece { word: vec![], tag: tag(k, true) }))
            .collect();
        let mut rules = BTreeMap::new();
        let mut widths = BTreeMap::new();
        for t in 0..16u16 {
            rules.insert(t, children(t));
            widths.insert(t, vec![1]);
        }
        SubstitutionSystem { fractal: FractalId::Og, version: 1, base_level: 0, base, rules, widths }
    }

    fn shapes(&self, piece: &Piece, _level: u32) -> Vec<Shape> {
        let (a, dir) = decode(piece.tag);
        vec![Shape {
            start: word_map(&piece.word, corner(a)),
            end: word_map(&piece.word, corner(a + dir)),
            width: 1,
        }]
    }

    fn operator(&self) -> OperatorRule {
        OperatorRule::Stencil { cases: &OG_CASES }
    }

    fn renorm_factor(&self, level: u32) -> f64 {
        OG_RENORM.powi(level as i32)
    }

    fn weyl_beta(&self) -> f64 {
        0.7213
    }

    fn circle_symmetries(&self) -> Vec<CircleSymmetry> {
        vec![CircleSymmetry::translation(1, 2)]
    }

    fn dihedral_order(&self) -> u32 {
        8
    }
}
