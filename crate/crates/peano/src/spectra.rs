//! Laplacian assembly, eigensolves and spectral bookkeeping.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use faer::dyn_stack::{MemBuffer, MemStack, StackReq};
use faer::linalg::solvers::Solve;
use faer::matrix_free::LinOp;
use faer::sparse::linalg::solvers::Llt as SparseLlt;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Col, Mat, MatMut, MatRef, Par, Side};
use serde::{Deserialize, Serialize};

use crate::curves::registry::OperatorRule;
use crate::curves::{registry, FractalId};
use crate::error::{Error, Result};
use crate::graphs::WeightedGraph;

/// Largest matrix the dense path will factor.
pub const DENSE_LIMIT: usize = 6000;
/// Largest matrix any path will accept.
pub const DIMENSION_LIMIT: usize = 40_000;

/// How eigenvalues are reported.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scheme {
    Raw,
    /// Multiply by `factor^m`, or by the fractal's own factor when `None`.
    Renorm { factor: Option<f64> },
    /// Divide by λ₂.
    Ratio,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::Raw => f.write_str("raw"),
            Scheme::Renorm { factor: None } => f.write_str("renorm"),
            Scheme::Renorm { factor: Some(x) } => write!(f, "renorm({x})"),
            Scheme::Ratio => f.write_str("ratio"),
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "raw" => Ok(Scheme::Raw),
            "renorm" => Ok(Scheme::Renorm { factor: None }),
            "ratio" => Ok(Scheme::Ratio),
            other => Err(Error::Invalid(format!("unknown scheme '{other}' (raw, renorm, ratio)"))),
        }
    }
}

/// Clustering tolerances: relative, and absolute as a fraction of λ_max.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { rel: 1e-6, abs: 1e-9 }
    }
}

/// Threads for dense factorizations; `0` or `1` runs sequentially. faer
/// otherwise uses every core, and reduction order can then vary between
/// thread counts in the last bits.
pub fn set_threads(n: usize) {
    let par = if n <= 1 { Par::Seq } else { Par::rayon(n) };
    faer::set_global_parallelism(par);
}

/// −Δ_m as a sparse row list together with the measure that makes it
/// self-adjoint.
#[derive(Clone, Debug, PartialEq)]
pub struct LaplacianOperator {
    pub fractal: FractalId,
    pub level: u32,
    pub scheme: Scheme,
    pub class_ids: Vec<u64>,
    pub measure: Vec<f64>,
    /// Row x: (column, entry), diagonal included, columns ascending.
    pub rows: Vec<Vec<(usize, f64)>>,
}

impl LaplacianOperator {
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|row| row.iter().map(|&(j, a)| a * u[j]).sum()).collect()
    }

    pub fn to_dense(&self) -> Mat<f64> {
        let n = self.dim();
        let mut m = Mat::zeros(n, n);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, a) in row {
                m[(i, j)] += a;
            }
        }
        m
    }

    fn sym_entry(&self, i: usize, j: usize, a: f64) -> f64 {
        a * (self.measure[i] / self.measure[j]).sqrt()
    }

    /// M^{1/2} L M^{-1/2}, symmetric when L is μ-self-adjoint.
    pub fn symmetrized(&self) -> Mat<f64> {
        let n = self.dim();
        let mut m = Mat::zeros(n, n);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, a) in row {
                m[(i, j)] += self.sym_entry(i, j, a);
            }
        }
        m
    }

    /// max |μ_x L_xy − μ_y L_yx|, relative to max |μ_x L_xy|.
    pub fn symmetrization_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, a) in row {
                let back = self.rows[j].binary_search_by_key(&i, |&(c, _)| c).map(|p| self.rows[j][p].1).unwrap_or(0.0);
                worst = worst.max((self.measure[i] * a - self.measure[j] * back).abs());
                scale = scale.max((self.measure[i] * a).abs());
            }
        }
        if scale == 0.0 {
            0.0
        } else {
            worst / scale
        }
    }

    /// max |Σ_y L_xy| relative to the largest diagonal entry.
    pub fn row_sum_residual(&self) -> f64 {
        let diag = self.rows.iter().flatten().map(|&(_, a)| a.abs()).fold(0.0, f64::max);
        let worst = self.rows.iter().map(|r| r.iter().map(|&(_, a)| a).sum::<f64>().abs()).fold(0.0, f64::max);
        if diag == 0.0 {
            0.0
        } else {
            worst / diag
        }
    }

    /// Gershgorin bound on the spectrum.
    fn spectral_bound(&self) -> f64 {
        self.rows.iter().map(|r| r.iter().map(|&(_, a)| a.abs()).sum::<f64>()).fold(0.0, f64::max)
    }
}

fn neighbors(graph: &WeightedGraph) -> (Vec<Vec<(usize, f64, u32)>>, Vec<usize>) {
    let mut adj = vec![Vec::new(); graph.len()];
    for e in &graph.edges {
        adj[e.u].push((e.v, e.conductance, e.multiplicity));
        adj[e.v].push((e.u, e.conductance, e.multiplicity));
    }
    let mut self_slots = vec![0usize; graph.len()];
    for e in &graph.self_edges {
        self_slots[e.u] += 2 * e.multiplicity as usize;
    }
    (adj, self_slots)
}

fn finish_row(mut row: Vec<(usize, f64)>) -> Vec<(usize, f64)> {
    row.sort_by_key(|&(j, _)| j);
    let mut out: Vec<(usize, f64)> = Vec::with_capacity(row.len());
    for (j, a) in row {
        match out.last_mut() {
            Some(last) if last.0 == j => last.1 += a,
            _ => out.push((j, a)),
        }
    }
    out
}

pub fn assemble(graph: &WeightedGraph, scheme: Scheme) -> Result<LaplacianOperator> {
    let f = registry().get(graph.fractal);
    let (adj, self_slots) = neighbors(graph);
    let measure: Vec<f64> = graph.vertices.iter().map(|v| *v.measure.numer() as f64 / *v.measure.denom() as f64).collect();
    let mut rows = Vec::with_capacity(graph.len());
    match f.operator() {
        OperatorRule::Conductance { scale } => {
            let s = scale(graph.level);
            for (x, nb) in adj.iter().enumerate() {
                let w = s / measure[x];
                let mut row = vec![(x, 0.0)];
                for &(y, c, mult) in nb {
                    let a = w * c * mult as f64;
                    row[0].1 += a;
                    row.push((y, -a));
                }
                rows.push(finish_row(row));
            }
        }
        OperatorRule::Stencil { cases } => {
            for (x, nb) in adj.iter().enumerate() {
                let v = &graph.vertices[x];
                let distinct = nb.iter().map(|&(y, _, _)| y).collect::<BTreeSet<_>>().len();
                let case = cases
                    .iter()
                    .find(|c| c.class_size == v.members.len() && distinct <= c.distinct && c.self_slots == self_slots[x])
                    .ok_or_else(|| {
                        Error::Structure(format!(
                            "{} level {}: vertex {} (class size {}, {} distinct neighbors, {} loop slots) matches no operator case",
                            graph.fractal,
                            graph.level,
                            v.class_id,
                            v.members.len(),
                            distinct,
                            self_slots[x]
                        ))
                    })?;
                let traversals: u32 = nb.iter().map(|&(_, _, m)| m).sum();
                if (case.per_traversal * traversals as f64 - case.diag).abs() > 1e-12 {
                    return Err(Error::Structure(format!(
                        "{} level {}: vertex {} is a '{}' vertex with {} traversals; row would not annihilate constants",
                        graph.fractal, graph.level, v.class_id, case.name, traversals
                    )));
                }
                let mut row = vec![(x, case.diag)];
                row.extend(nb.iter().map(|&(y, _, m)| (y, -case.per_traversal * m as f64)));
                rows.push(finish_row(row));
            }
        }
    }
    let op = LaplacianOperator {
        fractal: graph.fractal,
        level: graph.level,
        scheme,
        class_ids: graph.vertices.iter().map(|v| v.class_id).collect(),
        measure,
        rows,
    };
    let residual = op.symmetrization_residual();
    if residual > 1e-12 {
        return Err(Error::Numerical(format!("operator is not self-adjoint for μ: residual {residual:e}")));
    }
    Ok(op)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverPath {
    Dense,
    ShiftInvertKrylov,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralResult {
    pub fractal: FractalId,
    pub level: u32,
    pub scheme: Scheme,
    pub tolerances: Tolerances,
    pub dimension: usize,
    pub solver: SolverPath,
    /// Raw eigenvalues of −Δ_m, ascending.
    pub eigenvalues: Vec<f64>,
    /// Vertex-space eigenvectors, μ-orthonormal, one per eigenvalue.
    pub eigenvectors: Option<Vec<Vec<f64>>>,
    pub class_ids: Vec<u64>,
    pub measure: Vec<f64>,
}

impl SpectralResult {
    pub fn clusters(&self) -> Vec<Cluster> {
        cluster_multiplicities(&self.eigenvalues, self.tolerances)
    }

    pub fn normalized(&self) -> Result<Vec<f64>> {
        normalize(self, self.scheme)
    }
}

fn fix_sign(v: &mut [f64]) {
    let mut best = 0usize;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() * (1.0 + 1e-12) {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Ascending eigenpairs of −Δ_m. `count` keeps the lowest `count`; it is
/// required above the dense limit.
pub fn eigensolve(op: &LaplacianOperator, count: Option<usize>, vectors: bool) -> Result<SpectralResult> {
    let n = op.dim();
    if n > DIMENSION_LIMIT {
        return Err(Error::DimensionCap { dim: n, limit: DIMENSION_LIMIT });
    }
    let keep = count.unwrap_or(n).min(n);
    let (values, vecs, solver) = if n <= DENSE_LIMIT {
        let s = op.symmetrized();
        if vectors {
            let evd = s
                .self_adjoint_eigen(Side::Lower)
                .map_err(|e| Error::Numerical(format!("dense eigensolver failed: {e:?}")))?;
            let vals: Vec<f64> = (0..keep).map(|i| evd.S()[i]).collect();
            let u = evd.U();
            let vecs: Vec<Vec<f64>> = (0..keep).map(|k| (0..n).map(|i| u[(i, k)]).collect()).collect();
            (vals, Some(vecs), SolverPath::Dense)
        } else {
            let mut vals = s
                .self_adjoint_eigenvalues(Side::Lower)
                .map_err(|e| Error::Numerical(format!("dense eigensolver failed: {e:?}")))?;
            vals.truncate(keep);
            (vals, None, SolverPath::Dense)
        }
    } else {
        let Some(k) = count else {
            return Err(Error::Invalid(format!(
                "dimension {n} exceeds the dense limit {DENSE_LIMIT}; pass a count"
            )));
        };
        let (vals, vecs) = krylov_lowest(op, k.min(n))?;
        (vals, Some(vecs), SolverPath::ShiftInvertKrylov)
    };
    let eigenvectors = match (vectors, vecs) {
        (true, Some(vecs)) => Some(
            vecs.into_iter()
                .map(|u| {
                    let mut v: Vec<f64> = u.iter().zip(&op.measure).map(|(x, m)| x / m.sqrt()).collect();
                    fix_sign(&mut v);
                    v
                })
                .collect(),
        ),
        _ => None,
    };
    Ok(SpectralResult {
        fractal: op.fractal,
        level: op.level,
        scheme: op.scheme,
        tolerances: Tolerances::default(),
        dimension: n,
        solver,
        eigenvalues: values,
        eigenvectors,
        class_ids: op.class_ids.clone(),
        measure: op.measure.clone(),
    })
}

/// (S + τI)^{-1} through a sparse Cholesky factor.
struct ShiftInvert {
    llt: SparseLlt<usize, f64>,
    n: usize,
}

impl fmt::Debug for ShiftInvert {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ShiftInvert({})", self.n)
    }
}

impl LinOp<f64> for ShiftInvert {
    fn apply_scratch(&self, _rhs_ncols: usize, _par: Par) -> StackReq {
        StackReq::EMPTY
    }

    fn nrows(&self) -> usize {
        self.n
    }

    fn ncols(&self) -> usize {
        self.n
    }

    fn apply(&self, out: MatMut<'_, f64>, rhs: MatRef<'_, f64>, _par: Par, _stack: &mut MemStack) {
        let mut out = out;
        out.copy_from(rhs);
        self.llt.solve_in_place(out);
    }

    fn conj_apply(&self, out: MatMut<'_, f64>, rhs: MatRef<'_, f64>, par: Par, stack: &mut MemStack) {
        self.apply(out, rhs, par, stack)
    }
}

/// Lowest `k` eigenpairs of the symmetrized operator by Krylov–Schur on
/// the shift-inverted matrix, with a residual check on every pair.
fn krylov_lowest(op: &LaplacianOperator, k: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = op.dim();
    let tau = 1e-6 * op.spectral_bound().max(1.0);
    let mut triplets = Vec::new();
    for (i, row) in op.rows.iter().enumerate() {
        for &(j, a) in row {
            let s = op.sym_entry(i, j, a) + if i == j { tau } else { 0.0 };
            triplets.push(Triplet::new(i, j, s));
        }
    }
    let shifted = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| Error::Numerical(format!("sparse assembly failed: {e:?}")))?;
    let llt = shifted
        .sp_cholesky(Side::Lower)
        .map_err(|e| Error::Numerical(format!("shifted operator is not positive definite: {e:?}")))?;
    let a = ShiftInvert { llt, n };
    let params = faer::matrix_free::eigen::PartialEigenParams {
        min_dim: (2 * k).max(64).min(n),
        max_dim: (4 * k).max(128).min(n),
        max_restarts: 2000,
        ..Default::default()
    };
    let par = Par::Seq;
    let mut mem = MemBuffer::new(faer::matrix_free::eigen::partial_eigen_scratch(&a, k, par, params));
    let mut vecs = Mat::<faer::c64>::zeros(n, k);
    let mut vals = vec![faer::c64::new(0.0, 0.0); k];
    let v0 = Col::from_fn(n, |i| 1.0 + ((i * 7919) % 104_729) as f64 / 104_729.0);
    let v0 = &v0 / v0.norm_l2();
    let info = faer::matrix_free::eigen::partial_eigen(
        vecs.as_mut(),
        &mut vals,
        &a,
        v0.as_ref(),
        f64::EPSILON * 128.0,
        par,
        MemStack::new(&mut mem),
        params,
    );
    if info.n_converged_eigen < k {
        return Err(Error::Numerical(format!(
            "Krylov-Schur converged {} of {k} eigenpairs",
            info.n_converged_eigen
        )));
    }
    let mut pairs: Vec<(f64, Vec<f64>)> = (0..k)
        .map(|j| {
            let lambda = 1.0 / vals[j].re - tau;
            let mut u: Vec<f64> = (0..n).map(|i| vecs[(i, j)].re).collect();
            let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
            u.iter_mut().for_each(|x| *x /= norm);
            (lambda, u)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let bound = op.spectral_bound().max(1.0);
    for (lambda, u) in &pairs {
        let su: Vec<f64> = op
            .rows
            .iter()
            .enumerate()
            .map(|(i, row)| row.iter().map(|&(j, a)| op.sym_entry(i, j, a) * u[j]).sum())
            .collect();
        let res = su.iter().zip(u).map(|(s, x)| (s - lambda * x).powi(2)).sum::<f64>().sqrt();
        if res > 1e-8 * bound {
            return Err(Error::Numerical(format!("eigenpair λ = {lambda} has residual {res:e}")));
        }
    }
    Ok(pairs.into_iter().unzip())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    /// 0-based index of the first eigenvalue in the cluster.
    pub start: usize,
    pub multiplicity: usize,
    /// Mean of the members.
    pub value: f64,
}

/// Greedy clustering: λ_{i+1} joins when λ_{i+1} − λ_i ≤ max(abs·λ_max, rel·|λ_{i+1}|).
pub fn cluster_multiplicities(values: &[f64], tol: Tolerances) -> Vec<Cluster> {
    let lmax = values.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let abs = tol.abs * lmax;
    let mut out: Vec<Cluster> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        match out.last_mut() {
            Some(c) if i > 0 && v - values[i - 1] <= abs.max(tol.rel * v.abs()) => {
                c.value = (c.value * c.multiplicity as f64 + v) / (c.multiplicity + 1) as f64;
                c.multiplicity += 1;
            }
            _ => out.push(Cluster { start: i, multiplicity: 1, value: v }),
        }
    }
    out
}

/// Eigenvalues under a reporting scheme.
pub fn normalize(res: &SpectralResult, scheme: Scheme) -> Result<Vec<f64>> {
    match scheme {
        Scheme::Raw => Ok(res.eigenvalues.clone()),
        Scheme::Renorm { factor } => {
            let k = match factor {
                Some(x) => x.powi(res.level as i32),
                None => registry().get(res.fractal).renorm_factor(res.level),
            };
            Ok(res.eigenvalues.iter().map(|l| l * k).collect())
        }
        Scheme::Ratio => match res.eigenvalues.get(1) {
            Some(&l2) if l2 > 0.0 => Ok(res.eigenvalues.iter().map(|l| l / l2).collect()),
            _ => Err(Error::Invalid("ratio scheme needs a positive second eigenvalue".into())),
        },
    }
}

/// λ_k^{(m)} / λ_k^{(m+1)} as (k, ratio), 1-based, over indices where the
/// fine eigenvalue is positive.
pub fn level_ratios(coarse: &[f64], fine: &[f64]) -> Vec<(usize, f64)> {
    let lmax = fine.iter().fold(0.0f64, |a, &b| a.max(b));
    coarse
        .iter()
        .zip(fine)
        .enumerate()
        .filter(|&(_, (_, &f))| f > 1e-9 * lmax)
        .map(|(i, (&c, &f))| (i + 1, c / f))
        .collect()
}

/// Median of the first `n` level ratios: an estimate of the eigenvalue
/// renormalization factor.
pub fn estimate_renorm(coarse: &[f64], fine: &[f64], n: usize) -> Option<f64> {
    let mut r: Vec<f64> = level_ratios(coarse, fine).into_iter().take(n).map(|(_, r)| r).collect();
    if r.is_empty() {
        return None;
    }
    r.sort_by(f64::total_cmp);
    let m = r.len() / 2;
    Some(if r.len() % 2 == 1 { r[m] } else { 0.5 * (r[m - 1] + r[m]) })
}

/// ρ(x) = #{λ_j ≤ x}, with a tolerance so that tabulated eigenvalues count
/// themselves.
#[derive(Clone, Debug, PartialEq)]
pub struct CountingFunction {
    values: Vec<f64>,
}

impl CountingFunction {
    pub fn eval(&self, x: f64) -> usize {
        let x = x + 1e-9 * x.abs().max(1.0);
        self.values.partition_point(|&l| l <= x)
    }
}

pub fn counting(values: &[f64]) -> CountingFunction {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    CountingFunction { values: v }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeylSeries {
    pub beta: f64,
    pub x: Vec<f64>,
    pub rho: Vec<usize>,
    pub ratio: Vec<f64>,
}

/// ρ and ρ(x)/x^β at every distinct positive eigenvalue.
pub fn weyl(values: &[f64], beta: f64) -> Result<WeylSeries> {
    if beta <= 0.0 {
        return Err(Error::Invalid(format!("weyl exponent must be positive, got {beta}")));
    }
    let rho = counting(values);
    let lmax = values.iter().fold(0.0f64, |a, &b| a.max(b));
    let mut xs: Vec<f64> = rho.values.iter().copied().filter(|&l| l > 1e-9 * lmax).collect();
    xs.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * a.abs().max(1.0));
    let counts: Vec<usize> = xs.iter().map(|&x| rho.eval(x)).collect();
    let ratio = xs.iter().zip(&counts).map(|(&x, &c)| c as f64 / x.powf(beta)).collect();
    Ok(WeylSeries { beta, x: xs, rho: counts, ratio })
}

/// (k, λ_{k+1}/λ_k) for positive λ_k with ratio ≥ threshold; k is 1-based.
pub fn gaps(values: &[f64], threshold: f64) -> Vec<(usize, f64)> {
    let lmax = values.iter().fold(0.0f64, |a, &b| a.max(b));
    values
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0] > 1e-9 * lmax)
        .map(|(i, w)| (i + 1, w[1] / w[0]))
        .filter(|&(_, r)| r >= threshold)
        .collect()
}

/// Generate, identify, build, assemble and solve.
pub fn spectrum(fractal: FractalId, level: u32, vectors: bool) -> Result<SpectralResult> {
    let graph = crate::graphs::graph_at(fractal, level)?;
    let op = assemble(&graph, Scheme::Raw)?;
    eigensolve(&op, None, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clustering() {
        let c = cluster_multiplicities(&[0.0, 1.0, 1.0 + 1e-9, 2.0, 3.0, 3.0, 3.0], Tolerances::default());
        let m: Vec<usize> = c.iter().map(|c| c.multiplicity).collect();
        assert_eq!(m, [1, 2, 1, 3]);
        assert_eq!(c[3].start, 4);
        let distinct = cluster_multiplicities(&[1.0, 2.0, 3.0], Tolerances::default());
        assert!(distinct.iter().all(|c| c.multiplicity == 1));
    }

    #[test]
    fn uniform_spectrum_has_one_gap() {
        let v: Vec<f64> = (1..20).map(|k| k as f64).collect();
        assert_eq!(gaps(&v, 1.9), vec![(1, 2.0)]);
    }

    #[test]
    fn counting_is_right_continuous() {
        let rho = counting(&[0.0, 3.0, 3.0, 3.0, 3.0, 6.0, 6.0, 6.0, 6.0]);
        assert_eq!(rho.eval(3.0), 5);
        assert_eq!(rho.eval(6.0), 9);
        assert_eq!(rho.eval(2.999), 1);
    }

    #[test]
    fn weyl_needs_positive_beta() {
        assert!(weyl(&[0.0, 1.0], 0.0).is_err());
        let w = weyl(&[0.0, 1.0, 4.0], 0.5).unwrap();
        assert_eq!(w.x, [1.0, 4.0]);
        assert_eq!(w.rho, [2, 3]);
        assert_eq!(w.ratio, [2.0, 1.5]);
    }

    #[test]
    fn krylov_agrees_with_dense() {
        let op = assemble(&crate::graphs::graph_at(FractalId::Mc, 3).unwrap(), Scheme::Raw).unwrap();
        let dense = eigensolve(&op, None, false).unwrap().eigenvalues;
        let (vals, vecs) = krylov_lowest(&op, 30).unwrap();
        assert_eq!(vecs.len(), 30);
        for (a, b) in vals.iter().zip(&dense) {
            assert!((a - b).abs() < 1e-8 * dense.last().unwrap(), "{a} vs {b}");
        }
    }

    #[test]
    fn schemes_parse() {
        assert_eq!("RAW".parse::<Scheme>().unwrap(), Scheme::Raw);
        assert!("log".parse::<Scheme>().is_err());
    }
}
