//! Symmetry, miniaturization, primitivity, closed-form oracles and pullbacks.

use std::collections::HashMap;
use std::f64::consts::PI;

use faer::{Mat, Side};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::curves::{generate, identify, registry, CurveApprox, FractalId, IdentificationMap};
use crate::error::{Error, Result};
use crate::exact::ExactPoint;
use crate::graphs::{build_graph, WeightedGraph};
use crate::spectra::{assemble, cluster_multiplicities, Cluster, LaplacianOperator, Scheme, SpectralResult, Tolerances};

/// Tolerance for characters, periods and eigenspace invariance.
pub const SYMMETRY_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryKind {
    Translation,
    Reflection,
}

/// t ↦ t + a or t ↦ a - t on the circle R/Z.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CircleSymmetry {
    pub kind: SymmetryKind,
    pub a: Ratio<i64>,
}

impl CircleSymmetry {
    pub fn translation(num: i64, den: i64) -> Self {
        CircleSymmetry { kind: SymmetryKind::Translation, a: Ratio::new(num, den) }
    }

    pub fn reflection(num: i64, den: i64) -> Self {
        CircleSymmetry { kind: SymmetryKind::Reflection, a: Ratio::new(num, den) }
    }

    pub fn name(&self) -> String {
        match self.kind {
            SymmetryKind::Translation => format!("t+{}", self.a),
            SymmetryKind::Reflection => format!("{}-t", self.a),
        }
    }

    /// Image of the parameter numerator `k` at denominator `d`.
    fn apply(&self, k: u64, d: u64) -> Result<u64> {
        let shift = self.a * Ratio::from_integer(d as i64);
        if !shift.is_integer() {
            return Err(Error::Invalid(format!("{} does not act on points k/{d}", self.name())));
        }
        let (s, k, d) = (shift.to_integer(), k as i64, d as i64);
        let image = match self.kind {
            SymmetryKind::Translation => k + s,
            SymmetryKind::Reflection => s - k,
        };
        Ok(image.rem_euclid(d) as u64)
    }
}

/// z ↦ ζ^rot · z, preceded by complex conjugation when `reflect`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlaneElement {
    pub rot: u32,
    pub reflect: bool,
}

impl PlaneElement {
    pub fn all(n: u32) -> Vec<PlaneElement> {
        [false, true].into_iter().flat_map(|reflect| (0..n).map(move |rot| PlaneElement { rot, reflect })).collect()
    }
}

/// Everything derived from one fractal at one level.
#[derive(Clone, Debug)]
pub struct Level {
    pub curve: CurveApprox,
    pub idmap: IdentificationMap,
    pub graph: WeightedGraph,
    pub op: LaplacianOperator,
}

impl Level {
    pub fn build(fractal: FractalId, level: u32) -> Result<Self> {
        let curve = generate(fractal, level)?;
        let idmap = identify(&curve);
        let graph = build_graph(&curve, &idmap)?;
        let op = assemble(&graph, Scheme::Raw)?;
        Ok(Level { curve, idmap, graph, op })
    }

    pub fn fractal(&self) -> FractalId {
        self.curve.fractal
    }

    /// Geometric point of each class.
    fn class_points(&self) -> Vec<ExactPoint> {
        let mut pts = Vec::with_capacity(self.idmap.class_count());
        for class in &self.idmap.classes {
            let seg = self
                .curve
                .segments
                .binary_search_by_key(&class[0], |s| s.param_start)
                .expect("class members are segment starts");
            pts.push(self.curve.segments[seg].geo_start);
        }
        pts
    }
}

fn checked_permutation(perm: Vec<Option<usize>>, what: &str) -> Result<Vec<usize>> {
    let n = perm.len();
    let mut hit = vec![false; n];
    let mut out = Vec::with_capacity(n);
    for (i, p) in perm.into_iter().enumerate() {
        let p = p.ok_or_else(|| Error::Structure(format!("{what} sends class {i} outside the vertex set")))?;
        if std::mem::replace(&mut hit[p], true) {
            return Err(Error::Structure(format!("{what} is not injective on classes")));
        }
        out.push(p);
    }
    Ok(out)
}

/// Class permutation induced by a circle transformation; fails if the
/// transformation does not preserve the identification partition.
pub fn symmetry_permutation(idmap: &IdentificationMap, sym: CircleSymmetry) -> Result<Vec<usize>> {
    let d = idmap.denominator;
    let mut perm: Vec<Option<usize>> = vec![None; idmap.class_count()];
    for (c, members) in idmap.classes.iter().enumerate() {
        for &k in members {
            let image = idmap.class_of_k(sym.apply(k, d)?).ok_or_else(|| {
                Error::Structure(format!("{} sends point {k}/{d} to a non-vertex", sym.name()))
            })?;
            match perm[c] {
                None => perm[c] = Some(image),
                Some(p) if p == image => {}
                Some(_) => {
                    return Err(Error::Structure(format!(
                        "{} splits the class of {}/{d}",
                        sym.name(),
                        members[0]
                    )))
                }
            }
        }
    }
    checked_permutation(perm, &sym.name())
}

/// Class permutation induced by a dihedral motion of the space.
pub fn plane_permutation(level: &Level, g: PlaneElement) -> Result<Vec<usize>> {
    let f = registry().get(level.fractal());
    let pts = level.class_points();
    let index: HashMap<ExactPoint, usize> = pts.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    let perm = pts.iter().map(|p| index.get(&f.act(g, *p, level.curve.level)).copied()).collect();
    checked_permutation(perm, &format!("plane element {g:?}"))
}

/// Relative size of the commutator of L with (P u)(x) = u(perm[x]).
pub fn commutator_residual(op: &LaplacianOperator, perm: &[usize]) -> f64 {
    let l = op.to_dense();
    let n = op.dim();
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for x in 0..n {
        for y in 0..n {
            // P L P^T against L, entrywise
            worst = worst.max((l[(perm[x], perm[y])] - l[(x, y)]).abs());
            scale = scale.max(l[(x, y)].abs());
        }
    }
    if scale == 0.0 {
        0.0
    } else {
        worst / scale
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Character {
    Symmetric,
    Skew,
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorCharacter {
    pub generator: String,
    pub character: Character,
    /// Trace of the action on the eigenspace.
    pub trace: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub cluster_start: usize,
    pub multiplicity: usize,
    pub eigenvalue: f64,
    /// Irreducible dihedral representations and their multiplicities.
    pub irreps: Vec<(String, usize)>,
    pub label: String,
    pub characters: Vec<GeneratorCharacter>,
    /// Largest n such that some eigenfunction has u(t + 1/n) = u(t).
    pub period: Option<Period>,
    /// Largest n such that some eigenfunction has u(t + 1/n) = −u(t).
    pub antiperiod: Option<Period>,
    pub primitive: Option<bool>,
}

/// Columns of the cluster's eigenvectors, one Vec per vector.
fn cluster_vectors<'a>(res: &'a SpectralResult, cluster: &Cluster) -> Result<&'a [Vec<f64>]> {
    let vecs = res
        .eigenvectors
        .as_ref()
        .ok_or_else(|| Error::Invalid("classification needs eigenvectors".into()))?;
    vecs.get(cluster.start..cluster.start + cluster.multiplicity)
        .ok_or_else(|| Error::Invalid("cluster lies outside the computed eigenvectors".into()))
}

/// Matrix of u ↦ u∘perm on the span of μ-orthonormal `vecs`, and the
/// relative invariance residual.
fn action(vecs: &[Vec<f64>], measure: &[f64], perm: &[usize]) -> (Mat<f64>, f64) {
    let d = vecs.len();
    let moved: Vec<Vec<f64>> = vecs.iter().map(|v| perm.iter().map(|&p| v[p]).collect()).collect();
    let a = Mat::from_fn(d, d, |i, j| vecs[i].iter().zip(&moved[j]).zip(measure).map(|((x, y), m)| x * y * m).sum());
    let mut res: f64 = 0.0;
    for j in 0..d {
        let mut r = 0.0;
        for (x, m) in measure.iter().enumerate() {
            let proj: f64 = (0..d).map(|i| vecs[i][x] * a[(i, j)]).sum();
            r += (moved[j][x] - proj).powi(2) * m;
        }
        res = res.max(r.sqrt());
    }
    (a, res)
}

fn character_of(a: &Mat<f64>) -> Character {
    let d = a.nrows();
    let dev = |s: f64| {
        (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .map(|(i, j)| (a[(i, j)] - if i == j { s } else { 0.0 }).abs())
            .fold(0.0, f64::max)
    };
    if dev(1.0) <= SYMMETRY_TOL {
        Character::Symmetric
    } else if dev(-1.0) <= SYMMETRY_TOL {
        Character::Skew
    } else {
        Character::Mixed
    }
}

struct Irrep {
    label: String,
    chi: Box<dyn Fn(PlaneElement) -> f64>,
}

/// Character table of D_n. One-dimensional labels carry the sign on the
/// odd reflections ζ^{odd}·z̄ first and on the even ones ζ^{even}·z̄ second
/// (for odd n the two classes coincide and only one sign is written).
fn dihedral_irreps(n: u32) -> Vec<Irrep> {
    let mut out = Vec::new();
    let sign = |s: f64| if s > 0.0 { '+' } else { '-' };
    if n % 2 == 0 {
        for odd in [1.0, -1.0] {
            for even in [1.0, -1.0] {
                out.push(Irrep {
                    label: format!("1{}{}", sign(odd), sign(even)),
                    chi: Box::new(move |g: PlaneElement| {
                        let r = (odd * even).powi(g.rot as i32);
                        if g.reflect {
                            r * even
                        } else {
                            r
                        }
                    }),
                });
            }
        }
    } else {
        for s in [1.0, -1.0] {
            out.push(Irrep {
                label: format!("1{}", sign(s)),
                chi: Box::new(move |g: PlaneElement| if g.reflect { s } else { 1.0 }),
            });
        }
    }
    let two_dim = (n - 1) / 2;
    for j in 1..=two_dim {
        let label = if two_dim == 1 { "2".to_string() } else { format!("2_{j}") };
        out.push(Irrep {
            label,
            chi: Box::new(move |g: PlaneElement| {
                if g.reflect {
                    0.0
                } else {
                    2.0 * (2.0 * PI * (j * g.rot) as f64 / n as f64).cos()
                }
            }),
        });
    }
    out
}

/// Decomposes the span of `vecs` into dihedral irreps.
fn decompose(level: &Level, vecs: &[Vec<f64>], measure: &[f64]) -> Result<Vec<(String, usize)>> {
    let n = registry().get(level.fractal()).dihedral_order();
    let group = PlaneElement::all(n);
    let mut traces = Vec::with_capacity(group.len());
    for &g in &group {
        let perm = plane_permutation(level, g)?;
        let (a, res) = action(vecs, measure, &perm);
        if res > SYMMETRY_TOL * (vecs.len() as f64).sqrt() {
            return Err(Error::Numerical(format!("plane element {g:?} does not preserve the eigenspace (residual {res:e})")));
        }
        traces.push((0..a.nrows()).map(|i| a[(i, i)]).sum::<f64>());
    }
    let mut out = Vec::new();
    for irrep in dihedral_irreps(n) {
        let m: f64 = group.iter().zip(&traces).map(|(&g, t)| (irrep.chi)(g) * t).sum::<f64>() / group.len() as f64;
        if (m - m.round()).abs() > 1e-3 {
            return Err(Error::Numerical(format!("non-integral multiplicity {m} of {}", irrep.label)));
        }
        if m.round() >= 1.0 {
            out.push((irrep.label, m.round() as usize));
        }
    }
    Ok(out)
}

fn irrep_label(irreps: &[(String, usize)]) -> String {
    irreps
        .iter()
        .map(|(l, m)| if *m == 1 { l.clone() } else { format!("{m}x{l}") })
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Dimension of the subspace of span(vecs) with u(t + s/D) = sign · u(t) at
/// every parameter point; `None` when the shift leaves the point set.
pub fn shift_invariant_dim(idmap: &IdentificationMap, vecs: &[Vec<f64>], s: u64, sign: f64) -> Option<usize> {
    let d = idmap.denominator;
    let pairs: Option<Vec<(usize, usize)>> =
        idmap.points.iter().map(|&k| Some((idmap.class_of_k(k)?, idmap.class_of_k((k + s) % d)?))).collect();
    let pairs = pairs?;
    let dim = vecs.len();
    let g = Mat::from_fn(dim, dim, |i, j| pairs.iter().map(|&(c, _)| vecs[i][c] * vecs[j][c]).sum::<f64>());
    let h = Mat::from_fn(dim, dim, |i, j| {
        pairs.iter().map(|&(c, e)| (vecs[i][e] - sign * vecs[i][c]) * (vecs[j][e] - sign * vecs[j][c])).sum::<f64>()
    });
    // generalized eigenvalues of (h, g) through g^{-1/2}
    let evd = g.self_adjoint_eigen(Side::Lower).ok()?;
    let gmax = (0..dim).map(|i| evd.S()[i]).fold(0.0, f64::max);
    let keep: Vec<usize> = (0..dim).filter(|&i| evd.S()[i] > 1e-12 * gmax).collect();
    let w = Mat::from_fn(dim, keep.len(), |i, j| evd.U()[(i, keep[j])] / evd.S()[keep[j]].sqrt());
    let reduced = w.transpose() * &h * &w;
    let vals = reduced.self_adjoint_eigenvalues(Side::Lower).ok()?;
    Some(vals.iter().filter(|&&v| v <= SYMMETRY_TOL * SYMMETRY_TOL * 4.0).count())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Period {
    pub n: u64,
    /// Dimension of the subspace with this period.
    pub dim: usize,
}

/// Largest n dividing D such that some nonzero u in span(vecs) has
/// u(t + 1/n) = sign · u(t).
pub fn detect_period(idmap: &IdentificationMap, vecs: &[Vec<f64>], sign: f64) -> Option<Period> {
    let d = idmap.denominator;
    (2..=d).rev().filter(|n| d % n == 0).find_map(|n| match shift_invariant_dim(idmap, vecs, d / n, sign) {
        Some(dim) if dim > 0 => Some(Period { n, dim }),
        _ => None,
    })
}

pub fn classify_eigenspace(level: &Level, res: &SpectralResult, cluster: &Cluster) -> Result<SymmetryReport> {
    let vecs = cluster_vectors(res, cluster)?;
    let f = registry().get(level.fractal());
    let mut characters = Vec::new();
    for sym in f.circle_symmetries() {
        let perm = symmetry_permutation(&level.idmap, sym)?;
        let (a, r) = action(vecs, &res.measure, &perm);
        if r > SYMMETRY_TOL * (vecs.len() as f64).sqrt() {
            return Err(Error::Numerical(format!("{} does not preserve the eigenspace (residual {r:e})", sym.name())));
        }
        characters.push(GeneratorCharacter {
            generator: sym.name(),
            character: character_of(&a),
            trace: (0..a.nrows()).map(|i| a[(i, i)]).sum(),
        });
    }
    let irreps = decompose(level, vecs, &res.measure)?;
    Ok(SymmetryReport {
        cluster_start: cluster.start,
        multiplicity: cluster.multiplicity,
        eigenvalue: cluster.value,
        label: irrep_label(&irreps),
        irreps,
        characters,
        period: detect_period(&level.idmap, vecs, 1.0),
        antiperiod: detect_period(&level.idmap, vecs, -1.0),
        primitive: None,
    })
}

/// u*(k) = (−1)^k u(k) on the octagasket, and its eigenvalue 8 − λ.
pub fn bipartite_partner(level: &Level, u: &[f64], lambda: f64) -> Result<(Vec<f64>, f64)> {
    if level.fractal() != FractalId::Og {
        return Err(Error::Unsupported { fractal: level.fractal().name(), what: "bipartite pairing".into() });
    }
    let mut out = Vec::with_capacity(u.len());
    for (c, members) in level.idmap.classes.iter().enumerate() {
        let parity = members[0] % 2;
        if members.iter().any(|k| k % 2 != parity) {
            return Err(Error::Structure(format!("class of {} mixes parities", members[0])));
        }
        out.push(if parity == 0 { u[c] } else { -u[c] });
    }
    let partner = 8.0 - lambda;
    let lu = level.op.apply(&out);
    let norm = out.iter().map(|x| x * x).sum::<f64>().sqrt();
    let res = lu.iter().zip(&out).map(|(a, b)| (a - partner * b).powi(2)).sum::<f64>().sqrt();
    if res > 1e-8 * norm.max(1e-300) {
        return Err(Error::Numerical(format!("partner residual {res:e} for eigenvalue {partner}")));
    }
    Ok((out, partner))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Miniature {
    pub values: Vec<f64>,
    /// Rayleigh quotient of the miniaturized function on the fine level.
    pub rayleigh: f64,
    /// Relative residual ‖L v − ρ v‖ / (|ρ| ‖v‖), μ-weighted.
    pub residual: f64,
}

/// v(t) = u(factor · t mod 1) on the fine level, with its eigen-relation
/// diagnostics.
pub fn miniaturize(coarse: &Level, u: &[f64], fine: &Level, factor: u64) -> Result<Miniature> {
    let (dc, df) = (coarse.idmap.denominator, fine.idmap.denominator);
    if coarse.fractal() != fine.fractal() || u.len() != coarse.idmap.class_count() {
        return Err(Error::Invalid("miniaturize needs a function on the coarse level of the same fractal".into()));
    }
    let mut values: Vec<Option<f64>> = vec![None; fine.idmap.class_count()];
    for (c, members) in fine.idmap.classes.iter().enumerate() {
        for &k in members {
            let num = (factor * k * dc) % (df * dc);
            if num % df != 0 {
                return Err(Error::Invalid(format!("factor {factor} sends {k}/{df} off the coarse grid")));
            }
            let kc = num / df;
            let cc = coarse.idmap.class_of_k(kc).ok_or_else(|| {
                Error::Structure(format!("{k}/{df} maps to {kc}/{dc}, which is not a coarse vertex"))
            })?;
            let v = u[cc];
            match values[c] {
                None => values[c] = Some(v),
                Some(w) if (w - v).abs() <= SYMMETRY_TOL * (1.0 + v.abs()) => {}
                Some(_) => {
                    return Err(Error::Structure(format!(
                        "miniaturized function disagrees on the fine class of {}",
                        members[0]
                    )))
                }
            }
        }
    }
    let values: Vec<f64> = values.into_iter().map(|v| v.expect("every class has members")).collect();
    let mu = &fine.op.measure;
    let lv = fine.op.apply(&values);
    let vv: f64 = values.iter().zip(mu).map(|(v, m)| v * v * m).sum();
    let rayleigh = values.iter().zip(&lv).zip(mu).map(|((v, l), m)| v * l * m).sum::<f64>() / vv;
    let residual = lv.iter().zip(&values).zip(mu).map(|((l, v), m)| (l - rayleigh * v).powi(2) * m).sum::<f64>().sqrt()
        / (rayleigh.abs().max(1e-300) * vv.sqrt());
    Ok(Miniature { values, rayleigh, residual })
}

/// Image of a one-dimensional octagasket label under miniaturization: the
/// miniature is always symmetric about the edge-centre reflections.
pub fn og_miniature_label(label: &str) -> Option<String> {
    match label {
        "1++" | "1-+" => Some("1++".into()),
        "1+-" | "1--" => Some("1+-".into()),
        _ => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Primitivity {
    pub cluster: Cluster,
    pub primitive: bool,
}

/// A cluster is derived when some previous-level eigenvalue matches it
/// within `tol` (relative, floored at 1).
pub fn primitivity(prev: &[f64], cur: &[f64], tol: f64) -> Vec<Primitivity> {
    cluster_multiplicities(cur, Tolerances::default())
        .into_iter()
        .map(|c| {
            let derived = prev.iter().any(|&p| (p - c.value).abs() <= tol * c.value.abs().max(1.0));
            Primitivity { cluster: c, primitive: !derived }
        })
        .collect()
}

/// Primitive nonconstant clusters whose decomposition contains 1++ or 1+−.
pub fn theorem_violations(level: &Level, res: &SpectralResult, prev: &[f64]) -> Result<Vec<SymmetryReport>> {
    let mut bad = Vec::new();
    for p in primitivity(prev, &res.eigenvalues, 1e-8) {
        if !p.primitive || p.cluster.start == 0 {
            continue;
        }
        let mut report = classify_eigenspace(level, res, &p.cluster)?;
        report.primitive = Some(true);
        if report.irreps.iter().any(|(l, _)| l == "1++" || l == "1+-") {
            bad.push(report);
        }
    }
    Ok(bad)
}

/// Spectrum of the lattice Laplacian 4u − Σ u(neighbors) on the 3^m torus.
pub fn torus_oracle(level: u32) -> Vec<f64> {
    let n = 3usize.pow(level);
    let c = |p: usize| (2.0 * PI * p as f64 / n as f64).cos();
    let mut vals: Vec<f64> =
        (0..n).flat_map(|p| (0..n).map(move |q| (p, q))).map(|(p, q)| 4.0 - 2.0 * c(p) - 2.0 * c(q)).collect();
    vals.sort_by(f64::total_cmp);
    vals
}

/// Neumann mode u(p, q) of the unit equilateral triangle sampled at the
/// vertex classes. u(q, p) is the complex conjugate, so `re` and `im` span
/// the same eigenspace; `im` vanishes when p = q.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangleMode {
    pub p: i64,
    pub q: i64,
    pub eigenvalue: f64,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

pub fn triangle_oracle(p: i64, q: i64, level: &Level) -> Result<TriangleMode> {
    if level.fractal() != FractalId::Triangle {
        return Err(Error::Invalid("the triangle oracle samples triangle levels only".into()));
    }
    if p < 0 || q < 0 {
        return Err(Error::Invalid(format!("(p, q) = ({p}, {q}) must be non-negative")));
    }
    let eigenvalue = (4.0 * PI / 3.0).powi(2) * (p * p + q * q + p * q) as f64;
    let s3 = 3f64.sqrt();
    let corners = [(0.0, 0.0), (s3 / 2.0, 0.5), (s3 / 2.0, -0.5)];
    let v = (1.0 / s3, 1.0 / 3.0);
    let w = (0.0, 2.0 / 3.0);
    // orbit of (p, q) under the symmetries fixing the corner at the origin
    let terms = [(p, q), (-q, -p), (-p, p + q), (q, -p - q), (-p - q, p), (p + q, -q)];
    let (mut re, mut im) = (Vec::new(), Vec::new());
    for pt in level.class_points() {
        let (x, y) = pt.to_xy();
        // barycentric weights of our corners 1, ζ, ζ² carried to the reference corners
        let (mut rx, mut ry) = (0.0, 0.0);
        for (i, c) in corners.iter().enumerate() {
            let a = 2.0 * PI * i as f64 / 3.0;
            let b = (1.0 + 2.0 * (x * a.cos() + y * a.sin())) / 3.0;
            rx += b * c.0;
            ry += b * c.1;
        }
        let (mut sr, mut si) = (0.0, 0.0);
        for &(a, b) in &terms {
            let (kx, ky) = (a as f64 * v.0 + b as f64 * w.0, a as f64 * v.1 + b as f64 * w.1);
            let phase = 2.0 * PI * (kx * rx + ky * ry);
            sr += phase.cos();
            si += phase.sin();
        }
        re.push(sr);
        im.push(si);
    }
    Ok(TriangleMode { p, q, eigenvalue, re, im })
}

/// Dihedral label of a single sampled function: "1+", "1-", or "2".
pub fn function_label(level: &Level, u: &[f64]) -> Result<String> {
    let n = registry().get(level.fractal()).dihedral_order();
    let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
    let mut signs = Vec::new();
    for g in PlaneElement::all(n).into_iter().skip(1) {
        let perm = plane_permutation(level, g)?;
        let plus = perm.iter().enumerate().map(|(x, &p)| (u[p] - u[x]).powi(2)).sum::<f64>().sqrt() / norm;
        let minus = perm.iter().enumerate().map(|(x, &p)| (u[p] + u[x]).powi(2)).sum::<f64>().sqrt() / norm;
        signs.push((g, plus <= 1e-9, minus <= 1e-9));
    }
    let rotations_fix = signs.iter().filter(|(g, ..)| !g.reflect).all(|&(_, plus, _)| plus);
    let reflections_fix = signs.iter().filter(|(g, ..)| g.reflect).all(|&(_, plus, _)| plus);
    let reflections_flip = signs.iter().filter(|(g, ..)| g.reflect).all(|&(_, _, minus)| minus);
    Ok(match (rotations_fix, reflections_fix, reflections_flip) {
        (true, true, _) => "1+".into(),
        (true, _, true) => "1-".into(),
        _ => "2".into(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PullbackSample {
    pub k: u64,
    pub t: f64,
    pub class_id: u64,
    pub value: f64,
}

/// u pulled back to the circle: one sample per parameter point.
pub fn pullback(u: &[f64], idmap: &IdentificationMap) -> Result<Vec<PullbackSample>> {
    if u.len() != idmap.class_count() {
        return Err(Error::Invalid(format!("function has {} values, map has {} classes", u.len(), idmap.class_count())));
    }
    Ok(idmap
        .points
        .iter()
        .zip(&idmap.class_of)
        .map(|(&k, &c)| PullbackSample {
            k,
            t: k as f64 / idmap.denominator as f64,
            class_id: idmap.class_id(c),
            value: u[c],
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn character_tables_are_orthonormal() {
        for n in [3, 4, 5, 8] {
            let group = PlaneElement::all(n);
            let irreps = dihedral_irreps(n);
            let dims: u32 = irreps.iter().map(|i| (i.chi)(PlaneElement { rot: 0, reflect: false }) as u32).map(|d| d * d).sum();
            assert_eq!(dims, 2 * n, "sum of squared dimensions for D{n}");
            for a in &irreps {
                for b in &irreps {
                    let ip: f64 = group.iter().map(|&g| (a.chi)(g) * (b.chi)(g)).sum::<f64>() / group.len() as f64;
                    let expected = if a.label == b.label { 1.0 } else { 0.0 };
                    assert!((ip - expected).abs() < 1e-12, "D{n}: <{}, {}> = {ip}", a.label, b.label);
                }
            }
        }
    }

    #[test]
    fn circle_maps_on_points() {
        let t = CircleSymmetry::translation(1, 5);
        assert_eq!(t.apply(24, 25).unwrap(), 4);
        let r = CircleSymmetry::reflection(0, 1);
        assert_eq!(r.apply(1, 25).unwrap(), 24);
        assert!(CircleSymmetry::translation(1, 3).apply(0, 25).is_err());
    }

    #[test]
    fn torus_oracle_level_one() {
        let v = torus_oracle(1);
        let c = cluster_multiplicities(&v, Tolerances::default());
        let m: Vec<(usize, f64)> = c.iter().map(|c| (c.multiplicity, (c.value * 1e9).round() / 1e9)).collect();
        assert_eq!(m, [(1, 0.0), (4, 3.0), (4, 6.0)]);
    }
}
