use std::f64::consts::PI;

use peano::analysis::*;
use peano::curves::{registry, FractalId};
use peano::spectra::{eigensolve, Cluster, SpectralResult};

fn solved(f: FractalId, level: u32) -> (Level, SpectralResult) {
    let lv = Level::build(f, level).unwrap();
    let res = eigensolve(&lv.op, None, true).unwrap();
    (lv, res)
}

fn cluster_at(res: &SpectralResult, index: usize) -> Cluster {
    res.clusters().into_iter().find(|c| c.start == index - 1).expect("cluster starts at index")
}

fn report(lv: &Level, res: &SpectralResult, index: usize) -> SymmetryReport {
    classify_eigenspace(lv, res, &cluster_at(res, index)).unwrap()
}

fn order(perm: &[usize]) -> usize {
    let mut p: Vec<usize> = (0..perm.len()).collect();
    for k in 1..=perm.len() {
        p = p.iter().map(|&i| perm[i]).collect();
        if p.iter().enumerate().all(|(i, &j)| i == j) {
            return k;
        }
    }
    unreachable!()
}

#[test]
fn circle_symmetries_permute_classes() {
    for level in 1..=3 {
        let lv = Level::build(FractalId::Pg, level).unwrap();
        let p = symmetry_permutation(&lv.idmap, CircleSymmetry::translation(1, 5)).unwrap();
        assert_eq!(order(&p), 5);
        let id = symmetry_permutation(&lv.idmap, CircleSymmetry::translation(0, 1)).unwrap();
        assert!(id.iter().enumerate().all(|(i, &j)| i == j));
    }
    for level in 1..=2 {
        let lv = Level::build(FractalId::Og, level).unwrap();
        let p = symmetry_permutation(&lv.idmap, CircleSymmetry::translation(1, 2)).unwrap();
        assert_eq!(order(&p), 2);
    }
    let lv = Level::build(FractalId::Pg, 1).unwrap();
    assert!(symmetry_permutation(&lv.idmap, CircleSymmetry::translation(1, 7)).is_err());
    // a shift by one step moves a singleton onto an identified point
    assert!(symmetry_permutation(&lv.idmap, CircleSymmetry::translation(1, 25)).is_err());
}

#[test]
fn symmetries_commute_with_the_laplacian() {
    for f in FractalId::ALL {
        let base = registry().get(f).base_level();
        for level in base..base + 2 {
            let lv = Level::build(f, level).unwrap();
            for sym in registry().get(f).circle_symmetries() {
                let p = symmetry_permutation(&lv.idmap, sym).unwrap();
                assert!(commutator_residual(&lv.op, &p) <= 1e-10, "{f} {level} {}", sym.name());
            }
            for g in PlaneElement::all(registry().get(f).dihedral_order()) {
                let p = plane_permutation(&lv, g).unwrap();
                assert!(commutator_residual(&lv.op, &p) <= 1e-10, "{f} {level} {g:?}");
            }
        }
    }
}

#[test]
fn constant_is_symmetric_everywhere() {
    let (lv, res) = solved(FractalId::Pg, 2);
    let r = report(&lv, &res, 1);
    assert_eq!(r.label, "1+");
    assert!(r.characters.iter().all(|c| c.character == Character::Symmetric));
}

#[test]
fn pentagasket_simple_eigenfunctions_are_periodic_and_skew() {
    let (lv, res) = solved(FractalId::Pg, 2);
    let r = report(&lv, &res, 11);
    assert_eq!(r.multiplicity, 1);
    assert_eq!(r.period.map(|p| p.n), Some(5));
    let chars: Vec<Character> = r.characters.iter().map(|c| c.character).collect();
    assert_eq!(chars, [Character::Symmetric, Character::Skew]);
    // the multiplicity-five space holds a periodic eigenfunction
    let r = report(&lv, &res, 6);
    assert_eq!(r.multiplicity, 5);
    assert_eq!(r.period.map(|p| p.n), Some(5));
}

#[test]
fn octagasket_periods_follow_representations() {
    let (lv, res) = solved(FractalId::Og, 2);
    let cases = [(2, "2_1", None, Some(4)), (4, "2_2", Some(4), Some(8)), (8, "1-+", Some(8), Some(16)), (9, "1++ + 1+-", Some(16), Some(32))];
    for (index, label, period, antiperiod) in cases {
        let r = report(&lv, &res, index);
        assert_eq!(r.label, label, "#{index}");
        assert_eq!(r.antiperiod.map(|p| p.n), antiperiod, "#{index}");
        if let Some(n) = period {
            assert_eq!(r.period.map(|p| p.n), Some(n), "#{index}");
        }
    }
    // the reflection t -> t + 1/2 splits every two-dimensional space
    for c in res.clusters().iter().filter(|c| c.multiplicity == 2).take(10) {
        let r = classify_eigenspace(&lv, &res, c).unwrap();
        assert!((r.characters[0].trace).abs() < 1e-6, "{}", r.eigenvalue);
    }
}

#[test]
fn magic_carpet_representations() {
    let (lv, res) = solved(FractalId::Mc, 1);
    let labels: Vec<String> = res.clusters().iter().map(|c| classify_eigenspace(&lv, &res, c).unwrap().label).collect();
    assert_eq!(labels, ["1++", "1-+", "1++", "2", "1++"]);

    let (lv, res) = solved(FractalId::Mc, 2);
    let find = |x: f64| res.clusters().into_iter().find(|c| (c.value - x).abs() < 1e-8).unwrap();
    let nine = classify_eigenspace(&lv, &res, &find(9.0)).unwrap();
    assert_eq!(nine.irreps, [("1-+".to_string(), 2), ("1--".to_string(), 1)]);
    for x in [5.0, 12.0] {
        let r = classify_eigenspace(&lv, &res, &find(x)).unwrap();
        assert_eq!((r.multiplicity, r.label.as_str()), (1, "1+-"), "{x}");
    }
    assert!(nine.characters.is_empty());
}

#[test]
fn bipartite_pairs() {
    let (lv, res) = solved(FractalId::Og, 1);
    let vecs = res.eigenvectors.as_ref().unwrap();
    let (alt, partner) = bipartite_partner(&lv, &vecs[0], res.eigenvalues[0]).unwrap();
    assert!((partner - 8.0).abs() < 1e-9);
    assert!(alt.iter().all(|v| (v.abs() - alt[0].abs()).abs() < 1e-9));
    let (_, partner) = bipartite_partner(&lv, &vecs[1], res.eigenvalues[1]).unwrap();
    assert!((partner - 7.889).abs() < 5e-4);
    assert!(res.eigenvalues.iter().any(|&x| (x - partner).abs() < 1e-9));
    let four = res.eigenvalues.iter().position(|&x| (x - 4.0).abs() < 1e-9).unwrap();
    let (_, partner) = bipartite_partner(&lv, &vecs[four], 4.0).unwrap();
    assert_eq!(partner, 4.0);

    let (pg, pres) = solved(FractalId::Pg, 1);
    assert!(bipartite_partner(&pg, &pres.eigenvectors.unwrap()[0], 0.0).is_err());
}

/// Reflection-symmetric member of a two-dimensional eigenspace.
fn symmetric_member(lv: &Level, res: &SpectralResult, index: usize) -> Vec<f64> {
    let p = symmetry_permutation(&lv.idmap, CircleSymmetry::reflection(0, 1)).unwrap();
    let vecs = res.eigenvectors.as_ref().unwrap();
    let pick = |v: &Vec<f64>| -> Vec<f64> { v.iter().enumerate().map(|(i, x)| x + v[p[i]]).collect() };
    let (a, b) = (pick(&vecs[index - 1]), pick(&vecs[index]));
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
    if norm(&a) >= norm(&b) {
        a
    } else {
        b
    }
}

#[test]
fn pentagasket_miniaturization() {
    let coarse = Level::build(FractalId::Pg, 3).unwrap();
    let cres = eigensolve(&coarse.op, None, true).unwrap();
    let fine = Level::build(FractalId::Pg, 4).unwrap();
    let u = symmetric_member(&coarse, &cres, 2);
    let m = miniaturize(&coarse, &u, &fine, 5).unwrap();
    let f = registry().get(FractalId::Pg);
    let r = peano::graphs::pg_r();
    let predicted = 5.0 / r * cres.eigenvalues[1] * f.renorm_factor(3);
    let observed = m.rayleigh * f.renorm_factor(4);
    assert!(((observed - predicted) / predicted).abs() < 1e-3, "{observed} vs {predicted}");
    assert!(m.residual < 1e-2);

    let c0 = Level::build(FractalId::Pg, 1).unwrap();
    let m = miniaturize(&c0, &vec![1.0; c0.idmap.class_count()], &Level::build(FractalId::Pg, 2).unwrap(), 5).unwrap();
    assert!(m.values.iter().all(|&v| v == 1.0));
    assert!(m.rayleigh.abs() < 1e-12);
}

#[test]
fn triangle_miniaturization_multiplies_by_four() {
    let (coarse, cres) = solved(FractalId::Triangle, 2);
    let fine = Level::build(FractalId::Triangle, 3).unwrap();
    for index in [2, 3] {
        let u = &cres.eigenvectors.as_ref().unwrap()[index - 1];
        let m = miniaturize(&coarse, u, &fine, 4).unwrap();
        assert!(m.residual < 1e-9, "{}", m.residual);
        let f = registry().get(FractalId::Triangle);
        let (before, after) = (cres.eigenvalues[index - 1] * f.renorm_factor(2), m.rayleigh * f.renorm_factor(3));
        assert!((after - 4.0 * before).abs() < 1e-9 * after, "{after} vs 4 x {before}");
    }
}

#[test]
fn miniaturization_rejects_incompatible_functions() {
    let (coarse, cres) = solved(FractalId::Pg, 1);
    let fine = Level::build(FractalId::Pg, 2).unwrap();
    // a generic eigenvector does not respect the fine identifications under t -> 2t
    assert!(miniaturize(&coarse, &cres.eigenvectors.unwrap()[1], &fine, 2).is_err());
}

#[test]
fn octagasket_miniaturization_rule_and_theorem() {
    let (l1, r1) = solved(FractalId::Og, 1);
    let (l2, r2) = solved(FractalId::Og, 2);
    let prim = primitivity(&r1.eigenvalues, &r2.eigenvalues, 1e-8);
    let find = |x: f64| prim.iter().find(|p| (p.cluster.value - x).abs() < 1e-8).unwrap();
    let s2 = 2f64.sqrt();
    for x in [4.0 - 2.0 * s2, 4.0 + 2.0 * s2] {
        let p = find(x);
        assert!(!p.primitive);
        assert_eq!(p.cluster.multiplicity, 3);
    }
    assert!(!find(0.0).primitive);
    let low = prim.iter().find(|p| (p.cluster.value - 0.0074).abs() < 1e-4).unwrap();
    assert!(low.primitive);

    // one-dimensional labels of derived spaces follow the rule image
    for c in r1.clusters() {
        let coarse = classify_eigenspace(&l1, &r1, &c).unwrap();
        let fine = r2.clusters().into_iter().find(|d| (d.value - c.value).abs() < 1e-8).unwrap();
        let fine = classify_eigenspace(&l2, &r2, &fine).unwrap();
        if coarse.irreps.iter().all(|(l, _)| l.starts_with('1')) && coarse.multiplicity == fine.multiplicity {
            let mut expected: Vec<(String, usize)> = Vec::new();
            for (l, m) in &coarse.irreps {
                let image = og_miniature_label(l).unwrap();
                match expected.iter_mut().find(|(e, _)| *e == image) {
                    Some(e) => e.1 += m,
                    None => expected.push((image, *m)),
                }
            }
            expected.sort();
            let mut got = fine.irreps.clone();
            got.sort();
            assert_eq!(got, expected, "{}", c.value);
        }
    }

    let (_, r0) = solved(FractalId::Og, 0);
    assert!(theorem_violations(&l1, &r1, &r0.eigenvalues).unwrap().is_empty());
    assert!(theorem_violations(&l2, &r2, &r1.eigenvalues).unwrap().is_empty());
}

#[test]
fn torus_oracle_matches_solver() {
    for level in 1..=2 {
        let (_, res) = solved(FractalId::Torus, level);
        let oracle = torus_oracle(level);
        assert_eq!(oracle.len(), res.eigenvalues.len());
        for (a, b) in oracle.iter().zip(&res.eigenvalues) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}

#[test]
fn triangle_oracle_samples() {
    let lv = Level::build(FractalId::Triangle, 3).unwrap();
    let zero = triangle_oracle(0, 0, &lv).unwrap();
    assert_eq!(zero.eigenvalue, 0.0);
    assert!(zero.re.iter().all(|&v| (v - 6.0).abs() < 1e-12));
    let diag = triangle_oracle(1, 1, &lv).unwrap();
    assert!((diag.eigenvalue - 3.0 * (4.0 * PI / 3.0).powi(2)).abs() < 1e-12);
    assert_eq!(function_label(&lv, &diag.re).unwrap(), "1+");
    assert!(diag.im.iter().all(|v| v.abs() < 1e-9));
    // q = p + 3 splits into 1+ and 1-
    let split = triangle_oracle(0, 3, &lv).unwrap();
    assert_eq!(function_label(&lv, &split.re).unwrap(), "1+");
    assert_eq!(function_label(&lv, &split.im).unwrap(), "1-");
    let two = triangle_oracle(2, 1, &lv).unwrap();
    assert_eq!(function_label(&lv, &two.re).unwrap(), "2");
    let swapped = triangle_oracle(1, 2, &lv).unwrap();
    for (a, b) in two.im.iter().zip(&swapped.im) {
        assert!((a + b).abs() < 1e-9);
    }
    assert!(triangle_oracle(1, 0, &Level::build(FractalId::Sg, 1).unwrap()).is_err());
}

#[test]
fn triangle_oracle_lies_near_the_computed_eigenspace() {
    let (lv, res) = solved(FractalId::Triangle, 4);
    let mode = triangle_oracle(1, 0, &lv).unwrap();
    let mu = &res.measure;
    let vecs = res.eigenvectors.as_ref().unwrap();
    for u in [&mode.re, &mode.im] {
        let total: f64 = u.iter().zip(mu).map(|(x, m)| x * x * m).sum();
        let captured: f64 = vecs[1..3]
            .iter()
            .map(|v| u.iter().zip(v).zip(mu).map(|((a, b), m)| a * b * m).sum::<f64>().powi(2))
            .sum();
        assert!(captured / total > 0.99, "{}", captured / total);
    }
}

#[test]
fn pullback_series() {
    let lv = Level::build(FractalId::Pg, 2).unwrap();
    let flat = pullback(&vec![2.5; lv.idmap.class_count()], &lv.idmap).unwrap();
    assert!(flat.iter().all(|s| s.value == 2.5));
    assert_eq!(flat.len(), lv.idmap.points.len());
    assert!(flat.windows(2).all(|w| w[0].k < w[1].k));

    let (lv, res) = solved(FractalId::Pg, 3);
    let s = pullback(&res.eigenvectors.as_ref().unwrap()[10], &lv.idmap).unwrap();
    for class in &lv.idmap.classes {
        let vals: Vec<f64> = class.iter().map(|&k| s[lv.idmap.point_index(k).unwrap()].value).collect();
        assert!(vals.iter().all(|&v| v == vals[0]));
    }
    assert_eq!(report(&lv, &res, 11).period.map(|p| p.n), Some(5));
    let d = lv.idmap.denominator;
    for sample in &s {
        let shifted = &s[lv.idmap.point_index((sample.k + d / 5) % d).unwrap()];
        assert!((shifted.value - sample.value).abs() < 1e-8);
    }
    assert!(pullback(&[1.0], &lv.idmap).is_err());
}
