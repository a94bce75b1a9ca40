//! Weighted graphs Γ_m, energy forms, harmonic extension and network traces.

use std::collections::BTreeMap;

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::curves::{generate, identify, registry, CurveApprox, FractalId, IdentificationMap};
use crate::error::{Error, Result};

/// Long-edge conductance b = (1 + √161) / 10 of the pentagasket.
pub fn pg_b() -> f64 {
    (1.0 + 161f64.sqrt()) / 10.0
}

/// Pentagasket energy renormalization r = (√161 - 9) / 8.
pub fn pg_r() -> f64 {
    (161f64.sqrt() - 9.0) / 8.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    /// Smallest parameter numerator in the class.
    pub class_id: u64,
    pub measure: Ratio<u64>,
    pub members: Vec<u64>,
}

/// Parallel segments between the same pair of vertices with the same
/// parameter length are merged into one edge with a multiplicity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub conductance: f64,
    /// Parameter length in units of 1/D(m).
    pub param_length: u64,
    pub multiplicity: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedGraph {
    pub fractal: FractalId,
    pub level: u32,
    pub denominator: u64,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    /// Loops; kept for bookkeeping, never part of an operator.
    pub self_edges: Vec<Edge>,
}

impl WeightedGraph {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Same graph with conductances recomputed from parameter lengths.
    pub fn reweighted(&self, conductance: impl Fn(u64) -> f64) -> WeightedGraph {
        let mut g = self.clone();
        for e in g.edges.iter_mut().chain(g.self_edges.iter_mut()) {
            e.conductance = conductance(e.param_length);
        }
        g
    }

    /// Vertex index of the class containing parameter numerator `k`.
    pub fn vertex_of(&self, k: u64) -> Option<usize> {
        self.vertices.iter().position(|v| v.members.binary_search(&k).is_ok())
    }

    /// Dense Kirchhoff matrix Σ c (δ_x - δ_y)(δ_x - δ_y)^T, loops excluded.
    pub fn kirchhoff(&self) -> Mat<f64> {
        let n = self.len();
        let mut k = Mat::<f64>::zeros(n, n);
        for e in &self.edges {
            let c = e.conductance * e.multiplicity as f64;
            k[(e.u, e.u)] += c;
            k[(e.v, e.v)] += c;
            k[(e.u, e.v)] -= c;
            k[(e.v, e.u)] -= c;
        }
        k
    }
}

pub fn build_graph(curve: &CurveApprox, idmap: &IdentificationMap) -> Result<WeightedGraph> {
    if curve.fractal != idmap.fractal || curve.level != idmap.level {
        return Err(Error::Invalid(format!(
            "identification map is for {} level {}, curve is {} level {}",
            idmap.fractal, idmap.level, curve.fractal, curve.level
        )));
    }
    let f = registry().get(curve.fractal);
    let d = curve.denominator;
    let vertices = idmap
        .classes
        .iter()
        .map(|members| Vertex {
            class_id: members[0],
            measure: Ratio::new(members.iter().map(|&k| f.point_weight(k)).sum(), d),
            members: members.clone(),
        })
        .collect();
    let class = |k: u64| {
        idmap
            .class_of_k(k)
            .ok_or_else(|| Error::Invalid(format!("{k}/{d} is not a point of the identification map")))
    };
    let mut merged: BTreeMap<(usize, usize, u64), u32> = BTreeMap::new();
    for s in &curve.segments {
        let (a, b) = (class(s.param_start)?, class(s.param_end)?);
        *merged.entry((a.min(b), a.max(b), s.param_end - s.param_start)).or_insert(0) += 1;
    }
    let mut edges = Vec::new();
    let mut self_edges = Vec::new();
    for ((u, v, len), multiplicity) in merged {
        let e = Edge { u, v, conductance: f.conductance(len), param_length: len, multiplicity };
        if u == v {
            self_edges.push(e);
        } else {
            edges.push(e);
        }
    }
    Ok(WeightedGraph { fractal: curve.fractal, level: curve.level, denominator: d, vertices, edges, self_edges })
}

/// Convenience: generate, identify and build in one go.
pub fn graph_at(fractal: FractalId, level: u32) -> Result<WeightedGraph> {
    let curve = generate(fractal, level)?;
    build_graph(&curve, &identify(&curve))
}

/// Energy form of a graph together with the renormalization bookkeeping.
#[derive(Clone, Copy, Debug)]
pub struct EnergyForm<'a> {
    pub graph: &'a WeightedGraph,
    pub b: f64,
    pub r: f64,
}

impl<'a> EnergyForm<'a> {
    pub fn pentagasket(graph: &'a WeightedGraph) -> Self {
        EnergyForm { graph, b: pg_b(), r: pg_r() }
    }

    /// r^{-m} E_m(u).
    pub fn renormalized(&self, u: &[f64]) -> Result<f64> {
        Ok(energy(self.graph, u)? * self.r.powi(-(self.graph.level as i32)))
    }
}

/// E(u) = Σ c(x,y) (u(x) - u(y))² over edges, counted with multiplicity.
pub fn energy(graph: &WeightedGraph, u: &[f64]) -> Result<f64> {
    if u.len() != graph.len() {
        return Err(Error::Invalid(format!("function has {} values, graph has {} vertices", u.len(), graph.len())));
    }
    Ok(graph
        .edges
        .iter()
        .map(|e| e.conductance * e.multiplicity as f64 * (u[e.u] - u[e.v]).powi(2))
        .sum())
}

/// Fine vertex index of every coarse vertex, via k ↦ k·D(m+1)/D(m).
pub fn embedding(coarse: &WeightedGraph, fine: &WeightedGraph) -> Result<Vec<usize>> {
    if coarse.fractal != fine.fractal || fine.level != coarse.level + 1 {
        return Err(Error::Invalid(format!(
            "cannot embed {} level {} into {} level {}",
            coarse.fractal, coarse.level, fine.fractal, fine.level
        )));
    }
    if matches!(coarse.fractal, FractalId::Mc | FractalId::Torus) {
        return Err(Error::Unsupported {
            fractal: coarse.fractal.name(),
            what: "harmonic extension (identifications do not persist between levels)".into(),
        });
    }
    let ratio = fine.denominator / coarse.denominator;
    let mut seen = vec![false; fine.len()];
    coarse
        .vertices
        .iter()
        .map(|v| {
            let mut targets = v.members.iter().map(|&k| fine.vertex_of(k * ratio));
            let first = targets.next().flatten();
            let idx = match first {
                Some(i) if targets.all(|t| t == Some(i)) => i,
                _ => {
                    return Err(Error::Structure(format!(
                        "coarse class {} does not map into a single fine class",
                        v.class_id
                    )))
                }
            };
            if std::mem::replace(&mut seen[idx], true) {
                return Err(Error::Structure(format!("two coarse classes meet fine class {}", fine.vertices[idx].class_id)));
            }
            Ok(idx)
        })
        .collect()
}

/// Solves K_ff x = rhs by Cholesky; a non-positive pivot means some free
/// vertex is cut off from every anchor.
fn solve_free(kff: &Mat<f64>, rhs: &Mat<f64>) -> Result<Mat<f64>> {
    let llt = kff
        .llt(Side::Lower)
        .map_err(|_| Error::Structure("interior block is singular: a free component touches no anchor".into()))?;
    Ok(llt.solve(rhs))
}

fn split(n: usize, anchors: &[usize]) -> (Vec<usize>, Vec<Option<usize>>) {
    let mut slot = vec![None; n];
    for (i, &a) in anchors.iter().enumerate() {
        slot[a] = Some(i);
    }
    let free = (0..n).filter(|&i| slot[i].is_none()).collect();
    (free, slot)
}

/// Energy-minimizing extension of `u` from the coarse vertices to the fine graph.
pub fn harmonic_extension(coarse: &WeightedGraph, fine: &WeightedGraph, u: &[f64]) -> Result<Vec<f64>> {
    if u.len() != coarse.len() {
        return Err(Error::Invalid(format!("function has {} values, graph has {} vertices", u.len(), coarse.len())));
    }
    let anchors = embedding(coarse, fine)?;
    let k = fine.kirchhoff();
    let (free, _) = split(fine.len(), &anchors);
    let kff = Mat::from_fn(free.len(), free.len(), |i, j| k[(free[i], free[j])]);
    let rhs = Mat::from_fn(free.len(), 1, |i, _| -anchors.iter().zip(u).map(|(&a, &ua)| k[(free[i], a)] * ua).sum::<f64>());
    let mut out = vec![0.0; fine.len()];
    for (&a, &ua) in anchors.iter().zip(u) {
        out[a] = ua;
    }
    if !free.is_empty() {
        let x = solve_free(&kff, &rhs)?;
        for (i, &f) in free.iter().enumerate() {
            out[f] = x[(i, 0)];
        }
    }
    Ok(out)
}

/// Effective network on an anchor set (Schur complement of the Kirchhoff matrix).
#[derive(Clone, Debug, PartialEq)]
pub struct TracedNetwork {
    /// Fine vertex indices, in the order given.
    pub anchors: Vec<usize>,
    pub form: Mat<f64>,
}

impl TracedNetwork {
    /// Effective conductance between anchors `i` and `j` (positions in `anchors`).
    pub fn conductance(&self, i: usize, j: usize) -> f64 {
        -self.form[(i, j)]
    }

    pub fn energy(&self, u: &[f64]) -> f64 {
        let n = self.anchors.len();
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| u[i] * self.form[(i, j)] * u[j]).sum()
    }
}

pub fn trace_form(fine: &WeightedGraph, anchors: &[usize]) -> Result<TracedNetwork> {
    if anchors.is_empty() {
        return Err(Error::Invalid("anchor set is empty".into()));
    }
    if let Some(&a) = anchors.iter().find(|&&a| a >= fine.len()) {
        return Err(Error::Invalid(format!("anchor {a} is not a vertex")));
    }
    let k = fine.kirchhoff();
    let (free, slot) = split(fine.len(), anchors);
    if slot.iter().flatten().count() != anchors.len() {
        return Err(Error::Invalid("anchor set has duplicates".into()));
    }
    let na = anchors.len();
    let mut form = Mat::from_fn(na, na, |i, j| k[(anchors[i], anchors[j])]);
    if !free.is_empty() {
        let kff = Mat::from_fn(free.len(), free.len(), |i, j| k[(free[i], free[j])]);
        let kfa = Mat::from_fn(free.len(), na, |i, j| k[(free[i], anchors[j])]);
        let x = solve_free(&kff, &kfa)?;
        form -= kfa.transpose() * &x;
    }
    Ok(TracedNetwork { anchors: anchors.to_vec(), form })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PgRenormalization {
    pub b: f64,
    pub r: f64,
    pub iterations: u32,
}

/// Traced level-2 network on the level-1 anchors: (short, long) effective
/// conductances, averaged over the edges of each length.
fn traced_pair(coarse: &WeightedGraph, fine: &WeightedGraph, anchors: &[usize], b: f64) -> Result<(f64, f64)> {
    let fine = fine.reweighted(|len| if len == 3 { b } else { 1.0 });
    let net = trace_form(&fine, anchors)?;
    let (mut short, mut long) = ((0.0, 0u32), (0.0, 0u32));
    for e in &coarse.edges {
        let acc = if e.param_length == 3 { &mut long } else { &mut short };
        acc.0 += net.conductance(e.u, e.v) / e.multiplicity as f64;
        acc.1 += 1;
    }
    Ok((short.0 / short.1 as f64, long.0 / long.1 as f64))
}

/// Finds b with traced long/short ratio equal to b; r is the traced short
/// conductance. Bisection on a bracket that contains the unique root.
pub fn solve_pg_renormalization() -> Result<PgRenormalization> {
    let coarse = graph_at(FractalId::Pg, 1)?;
    let fine = graph_at(FractalId::Pg, 2)?;
    let anchors = embedding(&coarse, &fine)?;
    let g = |b: f64| -> Result<f64> {
        let (s, l) = traced_pair(&coarse, &fine, &anchors, b)?;
        Ok(l / s - b)
    };
    let (mut lo, mut hi) = (0.5, 4.0);
    let (glo, ghi) = (g(lo)?, g(hi)?);
    if glo.signum() == ghi.signum() {
        return Err(Error::Numerical(format!(
            "no sign change on bracket [{lo}, {hi}]: g = ({glo:e}, {ghi:e})"
        )));
    }
    let mut iterations = 0;
    while hi - lo > 1e-15 * hi && iterations < 200 {
        let mid = 0.5 * (lo + hi);
        if g(mid)?.signum() == glo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let b = 0.5 * (lo + hi);
    if g(b)?.abs() > 1e-10 {
        return Err(Error::Numerical(format!("bisection stalled at b = {b} on [{lo}, {hi}]")));
    }
    let (r, _) = traced_pair(&coarse, &fine, &anchors, b)?;
    Ok(PgRenormalization { b, r, iterations })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(conductances: &[f64]) -> WeightedGraph {
        let n = conductances.len() + 1;
        WeightedGraph {
            fractal: FractalId::Sg,
            level: 0,
            denominator: n as u64,
            vertices: (0..n as u64).map(|k| Vertex { class_id: k, measure: Ratio::new(1, n as u64), members: vec![k] }).collect(),
            edges: conductances
                .iter()
                .enumerate()
                .map(|(i, &c)| Edge { u: i, v: i + 1, conductance: c, param_length: 1, multiplicity: 1 })
                .collect(),
            self_edges: vec![],
        }
    }

    #[test]
    fn series_law() {
        let net = trace_form(&path(&[1.0, 1.0]), &[0, 2]).unwrap();
        assert!((net.conductance(0, 1) - 0.5).abs() < 1e-15);
        let net = trace_form(&path(&[2.0, 3.0]), &[0, 2]).unwrap();
        assert!((net.conductance(0, 1) - 1.2).abs() < 1e-15);
    }

    #[test]
    fn tracing_onto_everything_changes_nothing() {
        let g = path(&[1.0, 2.0, 5.0]);
        let net = trace_form(&g, &[0, 1, 2, 3]).unwrap();
        assert_eq!(net.form, g.kirchhoff());
    }

    #[test]
    fn isolated_free_vertex_is_a_structure_error() {
        let mut g = path(&[1.0]);
        g.vertices.push(Vertex { class_id: 9, measure: Ratio::new(0, 1), members: vec![9] });
        assert!(matches!(trace_form(&g, &[0, 1]), Err(Error::Structure(_))));
    }

    #[test]
    fn energy_of_simple_functions() {
        let g = path(&[3.0]);
        assert_eq!(energy(&g, &[0.0, 1.0]).unwrap(), 3.0);
        assert_eq!(energy(&g, &[2.0, 2.0]).unwrap(), 0.0);
        assert!(energy(&g, &[1.0]).is_err());
    }

    #[test]
    fn pg_level_one_measure_is_a_probability() {
        let g = graph_at(FractalId::Pg, 1).unwrap();
        assert_eq!(g.len(), 10);
        let total: Ratio<u64> = g.vertices.iter().map(|v| v.measure).sum();
        assert_eq!(total, Ratio::new(1, 1));
        for v in &g.vertices {
            let expected = if v.class_id % 5 == 0 { Ratio::new(1, 25) } else { Ratio::new(4, 25) };
            assert_eq!(v.measure, expected, "class {}", v.class_id);
        }
    }

    #[test]
    fn mismatched_inputs_are_rejected() {
        let a = generate(FractalId::Pg, 1).unwrap();
        let b = generate(FractalId::Pg, 2).unwrap();
        assert!(build_graph(&a, &identify(&b)).is_err());
        let mc1 = graph_at(FractalId::Mc, 1).unwrap();
        let mc2 = graph_at(FractalId::Mc, 2).unwrap();
        assert!(matches!(harmonic_extension(&mc1, &mc2, &[0.0; 6]), Err(Error::Unsupported { .. })));
    }
}
