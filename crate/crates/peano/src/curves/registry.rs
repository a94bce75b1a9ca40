//! Fractal strategies behind one trait, looked up by name at runtime.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use super::carpet::{Carpet, EdgeAddress};
use super::octagasket::Octagasket;
use super::pentagasket::Pentagasket;
use super::triangles::{Gasket, Triangle};
use super::{FractalId, Piece, Segment, Shape, SubstitutionSystem};
use crate::analysis::{CircleSymmetry, PlaneElement};
use crate::error::{Error, Result};
use crate::exact::ExactPoint;

/// One admissible row shape of a stencil Laplacian.
///
/// A vertex matches when its class size and number of loop slots agree and
/// it has at most `distinct` distinct neighbors (fewer happen on coarse
/// levels, where two traversals can reach the same vertex). Its row is
/// `diag * u(x) - per_traversal * Σ_traversals u(y)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RowCase {
    pub name: &'static str,
    pub class_size: usize,
    pub distinct: usize,
    pub self_slots: usize,
    pub diag: f64,
    pub per_traversal: f64,
}

#[derive(Clone, Copy, Debug)]
pub enum OperatorRule {
    /// `-Δu(x) = scale(m) / μ(x) · Σ c(x,y) (u(x) - u(y))`.
    Conductance { scale: fn(u32) -> f64 },
    /// Explicit per-vertex cases; a vertex matching none is an error.
    Stencil { cases: &'static [RowCase] },
}

pub trait Fractal: Send + Sync {
    fn id(&self) -> FractalId;

    fn name(&self) -> &'static str {
        self.id().name()
    }

    /// Lowest level the substitution system starts from.
    fn base_level(&self) -> u32;

    /// Default resource cap on the level.
    fn level_cap(&self) -> u32;

    fn system(&self) -> SubstitutionSystem;

    /// Raw geometry of the segments a piece expands into at `level`.
    fn shapes(&self, piece: &Piece, level: u32) -> Vec<Shape>;

    /// Representative of `p` after all identifications of the space.
    fn canonical(&self, p: ExactPoint, _level: u32) -> ExactPoint {
        p
    }

    /// Equality in the picture before sewing; differs from canonical
    /// equality only where γ_m jumps.
    fn unsewn_equal(&self, a: ExactPoint, b: ExactPoint, _level: u32) -> bool {
        a == b
    }

    /// Measure weight of parameter point `k`; weights sum to D(m).
    fn point_weight(&self, _k: u64) -> u64 {
        1
    }

    /// Unrenormalized conductance of an edge spanning `width` parameter units.
    fn conductance(&self, _width: u64) -> f64 {
        1.0
    }

    fn operator(&self) -> OperatorRule;

    /// Per-level eigenvalue factor for the `renorm` scheme.
    fn renorm_factor(&self, level: u32) -> f64;

    /// Exponent β in the Weyl ratio ρ(x) / x^β.
    fn weyl_beta(&self) -> f64;

    /// Circle transformations that act on every generated level.
    fn circle_symmetries(&self) -> Vec<CircleSymmetry>;

    /// Order n of the dihedral group D_n acting on the space.
    fn dihedral_order(&self) -> u32;

    /// Action of a dihedral element on a canonical point.
    fn act(&self, g: PlaneElement, p: ExactPoint, level: u32) -> ExactPoint {
        let z = if g.reflect { p.conj() } else { p };
        self.canonical(ExactPoint::zeta(p.order(), g.rot as i64) * z, level)
    }

    /// Symbolic edge address (carpets only).
    fn edge_address(&self, _seg: &Segment, _level: u32) -> Option<EdgeAddress> {
        None
    }
}

/// Name-keyed collection of fractal strategies.
pub struct Registry {
    entries: BTreeMap<&'static str, Box<dyn Fractal>>,
}

impl Registry {
    pub fn empty() -> Self {
        Registry { entries: BTreeMap::new() }
    }

    pub fn with_builtins() -> Self {
        let mut r = Registry::empty();
        r.register(Box::new(Gasket));
        r.register(Box::new(Pentagasket));
        r.register(Box::new(Octagasket));
        r.register(Box::new(Carpet::magic()));
        r.register(Box::new(Carpet::torus()));
        r.register(Box::new(Triangle));
        r
    }

    /// Adds a strategy, replacing any previous one of the same name.
    pub fn register(&mut self, f: Box<dyn Fractal>) {
        self.entries.insert(f.name(), f);
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.keys().copied()
    }

    pub fn lookup(&self, name: &str) -> Result<&dyn Fractal> {
        self.entries
            .get(name.to_ascii_lowercase().as_str())
            .map(|b| b.as_ref())
            .ok_or_else(|| Error::UnknownFractal(name.to_string()))
    }

    pub fn get(&self, id: FractalId) -> &dyn Fractal {
        self.lookup(id.name()).expect("builtin fractal registered")
    }
}

pub fn registry() -> &'static Registry {
    static REGISTRY: OnceLock<Registry> = OnceLock::new();
    REGISTRY.get_or_init(Registry::with_builtins)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_are_registered_by_name() {
        let names: Vec<_> = registry().names().collect();
        assert_eq!(names, ["mc", "og", "pg", "sg", "torus", "triangle"]);
        for f in FractalId::ALL {
            assert_eq!(registry().get(f).id(), f);
        }
        assert!(registry().lookup("TORUS").is_ok());
        assert!(matches!(registry().lookup("julia"), Err(Error::UnknownFractal(_))));
    }
}
