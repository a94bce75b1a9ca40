//! Sierpinski gasket and the solid triangle.
//!
//! Both live in `Z[ζ3][1/2]` with corners `1, ζ, ζ²` (centred at the
//! origin). A piece tag encodes the ordered corner triple (P, Q, R) of its
//! cell: the segment runs from P to Q and R is the remaining corner.

use std::collections::BTreeMap;

use super::registry::{Fractal, OperatorRule, RowCase};
use super::{FractalId, Piece, Shape, SubstitutionSystem};
use crate::analysis::CircleSymmetry;
use crate::exact::ExactPoint;

const TRIPLES: [[u8; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

fn tag_of(t: [u8; 3]) -> u16 {
    TRIPLES.iter().position(|&x| x == t).expect("corner permutation") as u16
}

fn corner(i: u8) -> ExactPoint {
    ExactPoint::zeta(3, i as i64)
}

/// Cell maps: digits 0..3 contract towards a corner, digit 3 is the
/// inverted central triangle.
fn cell_map(digit: u8, z: ExactPoint) -> ExactPoint {
    match digit {
        0..=2 => (z + corner(digit)).div_int(2),
        3 => (-z).div_int(2),
        _ => unreachable!("triangle cell digit {digit}"),
    }
}

fn word_map(word: &[u8], z: ExactPoint) -> ExactPoint {
    word.iter().rev().fold(z, |z, &d| cell_map(d, z))
}

fn base_pieces() -> Vec<Piece> {
    [[0, 1, 2], [1, 2, 0], [2, 0, 1]]
        .into_iter()
        .map(|t| Piece { word: vec![], tag: tag_of(t) })
        .collect()
}

fn segment_shape(piece: &Piece) -> Shape {
    let [p, q, _] = TRIPLES[piece.tag as usize];
    Shape {
        start: word_map(&piece.word, corner(p)),
        end: word_map(&piece.word, corner(q)),
        width: 1,
    }
}

fn build(fractal: FractalId, children: fn([u8; 3]) -> Vec<(u8, [u8; 3])>) -> SubstitutionSystem {
    let mut rules = BTreeMap::new();
    let mut widths = BTreeMap::new();
    for t in TRIPLES {
        let tag = tag_of(t);
        rules.insert(tag, children(t).into_iter().map(|(d, c)| (d, tag_of(c))).collect());
        widths.insert(tag, vec![1]);
    }
    SubstitutionSystem { fractal, version: 1, base_level: 0, base: base_pieces(), rules, widths }
}

fn rotation_symmetry() -> Vec<CircleSymmetry> {
    vec![CircleSymmetry::translation(1, 3)]
}

/// SG: P→Q with apex R becomes P→(P+R)/2, (P+R)/2→(Q+R)/2, (Q+R)/2→Q.
pub struct Gasket;

impl Fractal for Gasket {
    fn id(&self) -> FractalId {
        FractalId::Sg
    }

    fn base_level(&self) -> u32 {
        0
    }

    fn level_cap(&self) -> u32 {
        5
    }

    fn system(&self) -> SubstitutionSystem {
        build(FractalId::Sg, |[p, q, r]| vec![(p, [p, r, q]), (r, [p, q, r]), (q, [r, q, p])])
    }

    fn shapes(&self, piece: &Piece, _level: u32) -> Vec<Shape> {
        vec![segment_shape(piece)]
    }

    fn operator(&self) -> OperatorRule {
        OperatorRule::Conductance { scale: |_| 1.0 }
    }

    /// Energy renormalization (5/3)^m of the standard gasket.
    fn renorm_factor(&self, level: u32) -> f64 {
        (5.0f64 / 3.0).powi(level as i32)
    }

    fn weyl_beta(&self) -> f64 {
        3f64.ln() / 5f64.ln()
    }

    fn circle_symmetries(&self) -> Vec<CircleSymmetry> {
        rotation_symmetry()
    }

    fn dihedral_order(&self) -> u32 {
        3
    }
}

static TRIANGLE_CASES: [RowCase; 3] = [
    RowCase { name: "interior", class_size: 6, distinct: 6, self_slots: 0, diag: 6.0, per_traversal: 0.5 },
    RowCase { name: "boundary", class_size: 3, distinct: 4, self_slots: 0, diag: 6.0, per_traversal: 1.0 },
    RowCase { name: "corner", class_size: 1, distinct: 2, self_slots: 0, diag: 6.0, per_traversal: 3.0 },
];

/// The solid triangle; the central subcell is traversed second.
pub struct Triangle;

impl Triangle {
    /// Continuum normalization `4^m (2/3) (3/4π)^2` at curve level `m`.
    pub fn continuum_factor(level: u32) -> f64 {
        let k = 3.0 / (4.0 * std::f64::consts::PI);
        4f64.powi(level as i32) * (2.0 / 3.0) * k * k
    }
}

impl Fractal for Triangle {
    fn id(&self) -> FractalId {
        FractalId::Triangle
    }

    fn base_level(&self) -> u32 {
        0
    }

    fn level_cap(&self) -> u32 {
        5
    }

    fn system(&self) -> SubstitutionSystem {
        build(FractalId::Triangle, |[p, q, r]| {
            vec![(p, [p, r, q]), (3, [q, r, p]), (q, [p, r, q]), (q, [r, q, p])]
        })
    }

    fn shapes(&self, piece: &Piece, _level: u32) -> Vec<Shape> {
        vec![segment_shape(piece)]
    }

    fn operator(&self) -> OperatorRule {
        OperatorRule::Stencil { cases: &TRIANGLE_CASES }
    }

    fn renorm_factor(&self, level: u32) -> f64 {
        Triangle::continuum_factor(level)
    }

    fn weyl_beta(&self) -> f64 {
        1.0
    }

    fn circle_symmetries(&self) -> Vec<CircleSymmetry> {
        rotation_symmetry()
    }

    fn dihedral_order(&self) -> u32 {
        3
    }
}
