//! Pentagasket: five-pointed star curves in `Z[ζ5]`.
//!
//! A piece is a star line from corner `a` to corner `a ± 2` of its cell.
//! It expands into three segments whose parameter widths are 1, 3, 1: the
//! curve moves faster on the two short end pieces.

use std::collections::BTreeMap;

use super::registry::{Fractal, OperatorRule};
use super::{FractalId, Piece, Shape, SubstitutionSystem};
use crate::analysis::CircleSymmetry;
use crate::exact::ExactPoint;
use crate::graphs::{pg_b, pg_r};

fn corner(a: i64) -> ExactPoint {
    ExactPoint::zeta(5, a)
}

/// Contraction ratio (3 - √5)/2 = 1 - ζ - ζ⁴.
fn ratio() -> ExactPoint {
    ExactPoint::from_int(5, 1) - ExactPoint::zeta(5, 1) - ExactPoint::zeta(5, 4)
}

fn word_map(word: &[u8], z: ExactPoint) -> ExactPoint {
    let rho = ratio();
    word.iter().rev().fold(z, |z, &d| {
        let p = corner(d as i64);
        p + rho * (z - p)
    })
}

/// tag = 2a for a → a+2, 2a+1 for a → a-2.
fn tag(a: i64, up: bool) -> u16 {
    (2 * a.rem_euclid(5) + if up { 0 } else { 1 }) as u16
}

fn decode(tag: u16) -> (i64, i64) {
    let a = (tag / 2) as i64;
    let b = if tag % 2 == 0 { a + 2 } else { a - 2 };
    (a, b.rem_euclid(5))
}

fn digit(a: i64) -> u8 {
    a.rem_euclid(5) as u8
}

fn children(t: u16) -> Vec<(u8, u16)> {
    let (a, _) = decode(t);
    if t % 2 == 0 {
        vec![
            (digit(a), tag(a, true)),
            (digit(a + 1), tag(a - 1, false)),
            (digit(a + 1), tag(a - 3, false)),
            (digit(a + 1), tag(a, false)),
            (digit(a + 2), tag(a, true)),
        ]
    } else {
        vec![
            (digit(a), tag(a, false)),
            (digit(a - 1), tag(a + 1, true)),
            (digit(a - 1), tag(a + 3, true)),
            (digit(a - 1), tag(a, true)),
            (digit(a - 2), tag(a, false)),
        ]
    }
}

pub struct Pentagasket;

impl Fractal for Pentagasket {
    fn id(&self) -> FractalId {
        FractalId::Pg
    }

    fn base_level(&self) -> u32 {
        1
    }

    fn level_cap(&self) -> u32 {
        5
    }

    fn system(&self) -> SubstitutionSystem {
        let base = [0, 2, 4, 1, 3].into_iter().map(|a| Piece { word: vec![], tag: tag(a, true) }).collect();
        let mut rules = BTreeMap::new();
        let mut widths = BTreeMap::new();
        for t in 0..10u16 {
            rules.insert(t, children(t));
            widths.insert(t, vec![1, 3, 1]);
        }
        SubstitutionSystem { fractal: FractalId::Pg, version: 1, base_level: 1, base, rules, widths }
    }

    fn shapes(&self, piece: &Piece, _level: u32) -> Vec<Shape> {
        let (a, b) = decode(piece.tag);
        let rho = ratio();
        let pa = word_map(&piece.word, corner(a));
        let pb = word_map(&piece.word, corner(b));
        let x = pa + rho * (pb - pa);
        let y = pb + rho * (pa - pb);
        vec![
            Shape { start: pa, end: x, width: 1 },
            Shape { start: x, end: y, width: 3 },
            Shape { start: y, end: pb, width: 1 },
        ]
    }

    /// Turning points (k ≡ 0 mod 5) weigh 1, the others 2.
    fn point_weight(&self, k: u64) -> u64 {
        if k % 5 == 0 {
            1
        } else {
            2
        }
    }

    fn conductance(&self, width: u64) -> f64 {
        if width == 3 {
            pg_b()
        } else {
            1.0
        }
    }

    fn operator(&self) -> OperatorRule {
        OperatorRule::Conductance { scale: |m| pg_r().powi(-(m as i32)) }
    }

    /// Renormalization is already inside the operator.
    fn renorm_factor(&self, _level: u32) -> f64 {
        1.0
    }

    fn weyl_beta(&self) -> f64 {
        5f64.ln() / (5f64.ln() - pg_r().ln())
    }

    fn circle_symmetries(&self) -> Vec<CircleSymmetry> {
        vec![CircleSymmetry::translation(1, 5), CircleSymmetry::reflection(0, 1)]
    }

    fn dihedral_order(&self) -> u32 {
        5
    }
}
