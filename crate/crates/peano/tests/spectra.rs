use peano::analysis::torus_oracle;
use peano::curves::FractalId;
use peano::graphs::graph_at;
use peano::spectra::*;

fn solved(f: FractalId, level: u32, vectors: bool) -> (LaplacianOperator, SpectralResult) {
    let op = assemble(&graph_at(f, level).unwrap(), Scheme::Raw).unwrap();
    let res = eigensolve(&op, None, vectors).unwrap();
    (op, res)
}

#[test]
fn operators_are_laplacians() {
    for f in FractalId::ALL {
        for level in 1..=2 {
            let (op, res) = solved(f, level, false);
            assert!(op.row_sum_residual() <= 1e-12, "{f} {level}: row sums {:e}", op.row_sum_residual());
            assert!(op.symmetrization_residual() <= 1e-12, "{f} {level}");
            assert!(res.eigenvalues[0].abs() <= 1e-10, "{f} {level}: λ1 = {:e}", res.eigenvalues[0]);
            assert!(res.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}

#[test]
fn eigenvectors_are_mu_orthonormal() {
    for (f, level) in [(FractalId::Pg, 2), (FractalId::Og, 2), (FractalId::Mc, 2), (FractalId::Triangle, 3)] {
        let (op, res) = solved(f, level, true);
        let vecs = res.eigenvectors.as_ref().unwrap();
        let ip = |a: &[f64], b: &[f64]| a.iter().zip(b).zip(&op.measure).map(|((x, y), m)| x * y * m).sum::<f64>();
        for i in 0..vecs.len() {
            for j in i..vecs.len().min(i + 8) {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ip(&vecs[i], &vecs[j]) - want).abs() <= 1e-8, "{f} ({i}, {j})");
            }
            let lv = op.apply(&vecs[i]);
            let resid = lv.iter().zip(&vecs[i]).map(|(a, v)| (a - res.eigenvalues[i] * v).powi(2)).sum::<f64>().sqrt();
            let norm = vecs[i].iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(resid <= 1e-8 * norm.max(1.0), "{f} #{}: residual {resid:e}", i + 1);
        }
    }
}

#[test]
fn torus_matches_the_lattice_spectrum() {
    for level in 1..=2 {
        let (_, res) = solved(FractalId::Torus, level, false);
        let oracle = torus_oracle(level);
        assert_eq!(oracle.len(), res.eigenvalues.len());
        for (a, b) in res.eigenvalues.iter().zip(&oracle) {
            assert!((a - b).abs() <= 1e-9);
        }
    }
    let (_, res) = solved(FractalId::Torus, 1, false);
    let m: Vec<usize> = res.clusters().iter().map(|c| c.multiplicity).collect();
    assert_eq!(m, [1, 4, 4]);
    let rho = counting(&res.eigenvalues);
    assert_eq!((rho.eval(3.0), rho.eval(6.0)), (5, 9));
}

#[test]
fn magic_carpet_multiplicity_laws() {
    for level in 1..=3u32 {
        let (_, res) = solved(FractalId::Mc, level, false);
        let count = |x: f64| res.eigenvalues.iter().filter(|l| (*l - x).abs() < 1e-8).count();
        let p = 8usize.pow(level - 1);
        assert_eq!(count(9.0), (2 * p + 5) / 7, "level {level}");
        assert_eq!(count(15.0), (9 * p + 5) / 7, "level {level}");
    }
    let (_, res) = solved(FractalId::Mc, 1, false);
    let s = 73f64.sqrt();
    let exact = [0.0, 9.0, (29.0 - s) / 2.0, 15.0, 15.0, (29.0 + s) / 2.0];
    for (a, b) in res.eigenvalues.iter().zip(exact) {
        assert!((a - b).abs() <= 1e-9, "{a} vs {b}");
    }
}

#[test]
fn octagasket_pairs_and_exceptional_values() {
    for level in 1..=2 {
        let (_, res) = solved(FractalId::Og, level, false);
        let v = &res.eigenvalues;
        for (a, b) in v.iter().zip(v.iter().rev()) {
            assert!((a - (8.0 - b)).abs() <= 1e-9);
        }
        let count = |x: f64| v.iter().filter(|l| (*l - x).abs() < 1e-8).count();
        let r = 2.0 * 2f64.sqrt();
        assert_eq!(count(4.0 - r), 3);
        assert_eq!(count(4.0 + r), 3);
        assert_eq!(count(4.0), [4, 20][level as usize - 1]);
    }
}

#[test]
fn octagasket_level_ratios_settle_near_the_renormalization() {
    let (_, r2) = solved(FractalId::Og, 2, false);
    let (_, r3) = solved(FractalId::Og, 3, false);
    let ratios = level_ratios(&r2.eigenvalues, &r3.eigenvalues);
    assert_eq!(ratios[0].0, 2);
    assert!((ratios[0].1 - 14.938).abs() < 0.01, "{}", ratios[0].1);
    let est = estimate_renorm(&r2.eigenvalues, &r3.eigenvalues, 10).unwrap();
    assert!((est - 14.9).abs() < 0.01, "{est}");
}

#[test]
fn renormalized_and_ratio_schemes() {
    let (_, res) = solved(FractalId::Mc, 1, false);
    let renorm = normalize(&res, Scheme::Renorm { factor: None }).unwrap();
    assert!((renorm[1] - 57.6).abs() < 1e-9);
    let custom = normalize(&res, Scheme::Renorm { factor: Some(2.0) }).unwrap();
    assert!((custom[1] - 18.0).abs() < 1e-9);
    let ratio = normalize(&res, Scheme::Ratio).unwrap();
    assert_eq!(ratio[1], 1.0);
    assert!(ratio[0].abs() < 1e-12);
}

#[test]
fn octagasket_gap_ratios_at_multiples_of_sixteen() {
    let (_, res) = solved(FractalId::Og, 3, false);
    let g = gaps(&res.eigenvalues, 1.15);
    let at = |k: usize| g.iter().find(|&&(j, _)| j == k).map(|&(_, r)| r);
    assert!((at(16).unwrap() - 1.8350).abs() < 1e-3);
    assert!((at(32).unwrap() - 1.3236).abs() < 1e-3);
    assert!((at(112).unwrap() - 1.554).abs() < 1e-3);
}

#[test]
fn weyl_series_counts_distinct_values() {
    let (_, res) = solved(FractalId::Torus, 1, false);
    let w = weyl(&res.eigenvalues, 1.0).unwrap();
    assert_eq!(w.rho, [5, 9]);
    for (got, want) in w.x.iter().zip([3.0, 6.0]).chain(w.ratio.iter().zip([5.0 / 3.0, 1.5])) {
        assert!((got - want).abs() < 1e-12);
    }
}

#[test]
fn count_truncates_dense_solves() {
    let op = assemble(&graph_at(FractalId::Pg, 2).unwrap(), Scheme::Raw).unwrap();
    let some = eigensolve(&op, Some(5), false).unwrap();
    assert_eq!(some.eigenvalues.len(), 5);
    assert_eq!(some.solver, SolverPath::Dense);
}
