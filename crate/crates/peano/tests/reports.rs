use std::path::Path;

use peano::analysis::pullback;
use peano::curves::{generate, identify, FractalId};
use peano::graphs::graph_at;
use peano::reports::*;
use peano::spectra::{assemble, eigensolve, Scheme, SpectralResult, Tolerances};

fn mc1(vectors: bool) -> SpectralResult {
    let op = assemble(&graph_at(FractalId::Mc, 1).unwrap(), Scheme::Raw).unwrap();
    eigensolve(&op, None, vectors).unwrap()
}

fn render(f: impl FnOnce(&mut dyn std::io::Write) -> peano::Result<()>) -> String {
    let mut buf = Vec::new();
    f(&mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

fn data_rows(text: &str) -> Vec<Vec<String>> {
    let body: String = text.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n");
    csv::Reader::from_reader(body.as_bytes())
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect()
}

#[test]
fn magic_carpet_spectrum_csv() {
    let text = render(|w| write_spectrum_csv(w, &mc1(false), Precision::Full));
    assert_eq!(text.lines().next().unwrap(), "# eigenvectors omitted");
    assert!(text.lines().nth(1).unwrap().starts_with("index,multiplicity,eigenvalue,renormalized,ratio_to_first"));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[1][0], "2");
    assert!((rows[1][2].parse::<f64>().unwrap() - 9.0).abs() < 1e-12);
    assert_eq!(rows[3][1], "2");
    assert_eq!(rows[4][1], "2");
}

#[test]
fn eigenvector_columns_follow_the_class_ids() {
    let res = mc1(true);
    let text = render(|w| write_spectrum_csv(w, &res, Precision::Full));
    assert!(text.lines().next().unwrap().contains("u_<class_id>"));
    let header = text.lines().nth(1).unwrap();
    let ids: Vec<String> = res.class_ids.iter().map(|c| format!("u_{c}")).collect();
    assert!(header.ends_with(&ids.join(",")), "{header}");
    assert_eq!(data_rows(&text)[0].len(), 5 + res.class_ids.len());
}

#[test]
fn display_precision_rounds_to_four_places() {
    let op = assemble(&graph_at(FractalId::Pg, 1).unwrap(), Scheme::Raw).unwrap();
    let res = eigensolve(&op, None, false).unwrap();
    let rows = data_rows(&render(|w| write_spectrum_csv(w, &res, Precision::Display)));
    assert_eq!((rows[1][1].as_str(), rows[1][2].as_str()), ("2", "28.6410"));
}

#[test]
fn spectrum_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mc.json");
    let res = mc1(true);
    write_spectrum(&path, &res, Format::Json, Precision::Full).unwrap();
    assert_eq!(read_spectrum_json(&path).unwrap(), res);
}

#[test]
fn output_is_deterministic() {
    let a = render(|w| write_spectrum_csv(w, &mc1(true), Precision::Full));
    let b = render(|w| write_spectrum_csv(w, &mc1(true), Precision::Full));
    assert_eq!(a, b);
    let g = graph_at(FractalId::Og, 1).unwrap();
    let m1 = RunManifest::new(&g, Scheme::Raw, Tolerances::default(), None, false).unwrap();
    let m2 = RunManifest::new(&graph_at(FractalId::Og, 1).unwrap(), Scheme::Raw, Tolerances::default(), None, false).unwrap();
    assert_eq!(m1.hash(), m2.hash());
}

#[test]
fn io_errors_name_the_path() {
    let err = write_spectrum(Path::new("/nonexistent/dir/x.csv"), &mc1(false), Format::Csv, Precision::Full).unwrap_err();
    assert!(err.to_string().contains("/nonexistent/dir/x.csv"), "{err}");
    assert_eq!(err.exit_code(), 1);
}

fn manifest(level: u32, tol: Tolerances) -> (RunManifest, SpectralResult) {
    let g = graph_at(FractalId::Pg, level).unwrap();
    let m = RunManifest::new(&g, Scheme::Raw, tol, None, false).unwrap();
    let res = eigensolve(&assemble(&g, Scheme::Raw).unwrap(), None, false).unwrap();
    (m, res)
}

#[test]
fn cache_hits_only_on_equal_manifests() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::new(dir.path().join("cache"));
    let (m, res) = manifest(1, Tolerances::default());
    assert!(cache.lookup(&m).is_none());
    cache.store(&m, &res).unwrap();
    assert_eq!(cache.lookup(&m), Some(res));

    let (other_tol, _) = manifest(1, Tolerances { rel: 1e-5, abs: 1e-9 });
    assert!(cache.lookup(&other_tol).is_none());
    let (other_level, _) = manifest(2, Tolerances::default());
    assert!(cache.lookup(&other_level).is_none());
    let mut old = m.clone();
    old.tool_version = "0.0.0".into();
    assert!(cache.lookup(&old).is_none());
    assert_eq!(std::fs::read_dir(cache.dir()).unwrap().count(), 1, "no temporary files left behind");
}

#[test]
fn corrupt_cache_entries_are_misses() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::new(dir.path());
    let (m, res) = manifest(1, Tolerances::default());
    let path = cache.store(&m, &res).unwrap();
    std::fs::write(&path, br#"{"manifest": tru"#).unwrap();
    assert!(cache.lookup(&m).is_none());
    cache.store(&m, &res).unwrap();
    assert!(cache.lookup(&m).is_some());
}

#[test]
fn curve_csv_layouts() {
    let rows = |f: FractalId, level: u32| {
        let c = generate(f, level).unwrap();
        data_rows(&render(|w| write_curve(w, &c, &identify(&c))))
    };
    let mc = rows(FractalId::Mc, 1);
    assert_eq!(mc.len(), 16);
    let class = |k: usize| mc[k][5].clone();
    for k in [3, 7, 8, 11, 14] {
        assert_eq!(class(k), class(2));
    }
    for (a, b) in [(0, 5), (1, 12), (4, 13), (6, 9), (10, 15)] {
        assert_eq!(class(a), class(b));
    }
    assert_eq!(mc.iter().filter(|r| r[6] == "true").map(|r| r[0].as_str()).collect::<Vec<_>>(), ["8"]);
    assert_eq!((mc[8][1].as_str(), mc[8][2].as_str()), ("1", "2"));
    assert_eq!(rows(FractalId::Sg, 0).len(), 3);
    assert_eq!(rows(FractalId::Og, 2).len(), 1024);
    let x: f64 = mc[1][3].parse().unwrap();
    assert!(x.is_finite());
}

#[test]
fn graph_tables() {
    let g = graph_at(FractalId::Pg, 1).unwrap();
    let edges = data_rows(&render(|w| write_edges(w, &g)));
    assert_eq!(edges.len(), g.edges.len() + g.self_edges.len());
    let verts = data_rows(&render(|w| write_vertices(w, &g)));
    assert_eq!(verts.len(), g.len());
    assert!(verts.iter().any(|v| v[2].contains(' ')), "some class has two members");
}

#[test]
fn pullback_and_weyl_tables() {
    let c = generate(FractalId::Pg, 2).unwrap();
    let idmap = identify(&c);
    let res = peano::spectra::spectrum(FractalId::Pg, 2, true).unwrap();
    let samples = pullback(&res.eigenvectors.as_ref().unwrap()[0], &idmap).unwrap();
    let rows = data_rows(&render(|w| write_pullback(w, &samples)));
    assert_eq!(rows.len(), c.segments.len());
    let w = peano::spectra::weyl(&res.eigenvalues, 0.675).unwrap();
    assert_eq!(data_rows(&render(|out| write_weyl(out, &w))).len(), w.x.len());
}

#[test]
fn fixtures_cite_tables_descriptively() {
    let set = FixtureSet::embedded().unwrap();
    assert!(set.fixtures.len() > 400);
    for f in &set.fixtures {
        assert!(!f.citation.is_empty(), "{}", f.id);
        assert!(f.tolerance >= 0.0);
    }
    let mut ids: Vec<&str> = set.fixtures.iter().map(|f| f.id.as_str()).collect();
    ids.sort_unstable();
    ids.dedup();
    assert_eq!(ids.len(), set.fixtures.len(), "fixture ids are unique");
}

#[test]
fn exact_selections_pass() {
    for sel in ["MC-level-1", "pg-renorm", "torus-oracle", "mc-classes", "og-structure"] {
        let report = run_fixtures(&[sel.to_string()]).unwrap();
        assert!(!report.outcomes.is_empty());
        for o in &report.outcomes {
            assert!(o.pass, "{}: expected {} got {:?} ({})", o.fixture_id, o.expected, o.actual, o.note);
        }
    }
    let report = run_fixtures(&["mc-level-1".to_string()]).unwrap();
    assert_eq!(report.outcomes.len(), 6);
    assert!(report.outcomes.iter().all(|o| o.tolerance == 1e-9));
}

#[test]
fn unknown_selection_is_a_usage_error() {
    let err = run_fixtures(&["nope".to_string()]).unwrap_err();
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn report_json_has_the_documented_fields() {
    let report = run_fixtures(&["pg-renorm".to_string()]).unwrap();
    let v = serde_json::to_value(&report.outcomes[0]).unwrap();
    for key in ["fixture_id", "citation", "expected", "actual", "tolerance", "pass"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}
