//! File formats for curves, graphs, spectra and analysis output, the
//! spectrum cache and the embedded table fixtures.

pub mod cache;
pub mod fixtures;

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::{PullbackSample, SymmetryReport};
use crate::curves::{CurveApprox, FractalId, IdentificationMap};
use crate::error::{Error, Result};
use crate::graphs::WeightedGraph;
use crate::spectra::{normalize, Scheme, SpectralResult, Tolerances, WeylSeries};

pub use cache::Cache;
pub use fixtures::{run_fixtures, Fixture, FixtureOutcome, FixtureReport, FixtureSet};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Invalid(format!("unknown format '{other}' (csv, json)"))),
        }
    }
}

/// Number formatting. Display rounds to the 4 decimals the printed tables
/// use; stored values are always full precision.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Precision {
    #[default]
    Full,
    Display,
}

impl Precision {
    fn fmt(self, x: f64) -> String {
        match self {
            // Shortest representation that parses back to the same f64.
            Precision::Full => format!("{x:?}"),
            Precision::Display => format!("{x:.4}"),
        }
    }
}

/// Everything that determines a spectrum run. Equal manifests give
/// byte-identical output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub fractal: FractalId,
    pub level: u32,
    pub scheme: Scheme,
    pub tolerances: Tolerances,
    pub dimension: usize,
    pub count: Option<usize>,
    pub vectors: bool,
    pub tool_version: String,
    /// sha256 of each input, by name.
    pub input_hashes: BTreeMap<String, String>,
    /// Effective configuration after merging file and flags.
    pub config: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(graph: &WeightedGraph, scheme: Scheme, tolerances: Tolerances, count: Option<usize>, vectors: bool) -> Result<Self> {
        let mut input_hashes = BTreeMap::new();
        input_hashes.insert("graph".to_string(), sha256_hex(&serde_json::to_vec(graph)?));
        Ok(RunManifest {
            fractal: graph.fractal,
            level: graph.level,
            scheme,
            tolerances,
            dimension: graph.len(),
            count,
            vectors,
            tool_version: TOOL_VERSION.to_string(),
            input_hashes,
            config: BTreeMap::new(),
        })
    }

    /// Content hash of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        sha256_hex(&serde_json::to_vec(self).expect("manifest serializes"))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Create `path` and hand a buffered writer to `body`; `-` is stdout.
pub fn with_output<F>(path: &Path, body: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    if path.as_os_str() == "-" {
        let stdout = std::io::stdout();
        let mut lock = stdout.lock();
        body(&mut lock)?;
        return lock.flush().map_err(|e| Error::io(path, e));
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    body(&mut w).map_err(|e| with_path(e, path))?;
    w.flush().map_err(|e| Error::io(path, e))
}

fn with_path(e: Error, path: &Path) -> Error {
    match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::io("<stream>", e)
}

fn csv_writer(w: &mut dyn Write) -> csv::Writer<&mut dyn Write> {
    csv::WriterBuilder::new().has_headers(false).from_writer(w)
}

/// One row per parameter point: `k, t_num, t_den, x, y, class_id, is_jump`.
/// `is_jump` marks a point the curve reaches by jumping.
pub fn write_curve(w: &mut dyn Write, curve: &CurveApprox, idmap: &IdentificationMap) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(["k", "t_num", "t_den", "x", "y", "class_id", "is_jump"])?;
    let n = curve.segments.len();
    for (i, s) in curve.segments.iter().enumerate() {
        let k = s.param_start;
        let g = gcd(k, curve.denominator);
        let (x, y) = s.geo_start.to_xy();
        let class = idmap
            .class_of_k(k)
            .ok_or_else(|| Error::Structure(format!("point {k} has no class")))?;
        let jump = curve.segments[(i + n - 1) % n].is_jump;
        out.write_record([
            k.to_string(),
            (k / g).to_string(),
            (curve.denominator / g).to_string(),
            format!("{x:.16e}"),
            format!("{y:.16e}"),
            idmap.class_id(class).to_string(),
            jump.to_string(),
        ])?;
    }
    out.flush().map_err(io_err)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

/// Edge table `u, v, conductance, param_length, multiplicity` with vertex
/// ids given as class ids.
pub fn write_edges(w: &mut dyn Write, graph: &WeightedGraph) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(["u", "v", "conductance", "param_length", "multiplicity"])?;
    for e in graph.edges.iter().chain(&graph.self_edges) {
        out.write_record([
            graph.vertices[e.u].class_id.to_string(),
            graph.vertices[e.v].class_id.to_string(),
            format!("{:?}", e.conductance),
            e.param_length.to_string(),
            e.multiplicity.to_string(),
        ])?;
    }
    out.flush().map_err(io_err)
}

/// Vertex table `class_id, measure, member_ks`; members are space separated
/// and the measure is the exact fraction.
pub fn write_vertices(w: &mut dyn Write, graph: &WeightedGraph) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(["class_id", "measure", "member_ks"])?;
    for v in &graph.vertices {
        let members: Vec<String> = v.members.iter().map(u64::to_string).collect();
        out.write_record([v.class_id.to_string(), v.measure.to_string(), members.join(" ")])?;
    }
    out.flush().map_err(io_err)
}

/// `index, multiplicity, eigenvalue, renormalized, ratio_to_first`, then one
/// `u_<class_id>` column per vertex when eigenvectors are present. A leading
/// comment line says which.
pub fn write_spectrum_csv(w: &mut dyn Write, res: &SpectralResult, precision: Precision) -> Result<()> {
    let factor = match res.scheme {
        Scheme::Renorm { factor } => factor,
        _ => None,
    };
    let renorm = normalize(res, Scheme::Renorm { factor })?;
    let ratio = normalize(res, Scheme::Ratio).ok();
    let mut mult = vec![0usize; res.eigenvalues.len()];
    for c in res.clusters() {
        mult[c.start..c.start + c.multiplicity].fill(c.multiplicity);
    }
    match &res.eigenvectors {
        Some(_) => writeln!(w, "# eigenvectors: u_<class_id> columns, mu-orthonormal"),
        None => writeln!(w, "# eigenvectors omitted"),
    }
    .map_err(io_err)?;
    let mut out = csv_writer(w);
    let mut header: Vec<String> =
        ["index", "multiplicity", "eigenvalue", "renormalized", "ratio_to_first"].map(String::from).to_vec();
    if res.eigenvectors.is_some() {
        header.extend(res.class_ids.iter().map(|c| format!("u_{c}")));
    }
    out.write_record(&header)?;
    for (i, &l) in res.eigenvalues.iter().enumerate() {
        let mut row = vec![
            (i + 1).to_string(),
            mult[i].to_string(),
            precision.fmt(l),
            precision.fmt(renorm[i]),
            ratio.as_ref().map(|r| precision.fmt(r[i])).unwrap_or_default(),
        ];
        if let Some(vecs) = &res.eigenvectors {
            row.extend(vecs[i].iter().map(|&x| format!("{x:?}")));
        }
        out.write_record(&row)?;
    }
    out.flush().map_err(io_err)
}

pub fn write_spectrum_json(w: &mut dyn Write, res: &SpectralResult) -> Result<()> {
    serde_json::to_writer_pretty(&mut *w, res)?;
    writeln!(w).map_err(io_err)
}

pub fn write_spectrum(path: &Path, res: &SpectralResult, format: Format, precision: Precision) -> Result<()> {
    with_output(path, |w| match format {
        Format::Csv => write_spectrum_csv(w, res, precision),
        Format::Json => write_spectrum_json(w, res),
    })
}

pub fn read_spectrum_json(path: &Path) -> Result<SpectralResult> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_slice(&bytes)?)
}

/// `x, rho, weyl_ratio`.
pub fn write_weyl(w: &mut dyn Write, series: &WeylSeries) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(["x", "rho", "weyl_ratio"])?;
    for ((x, rho), r) in series.x.iter().zip(&series.rho).zip(&series.ratio) {
        out.write_record([format!("{x:?}"), rho.to_string(), format!("{r:?}")])?;
    }
    out.flush().map_err(io_err)
}

/// `k, t, class_id, value`.
pub fn write_pullback(w: &mut dyn Write, samples: &[PullbackSample]) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(["k", "t", "class_id", "value"])?;
    for s in samples {
        out.write_record([s.k.to_string(), format!("{:?}", s.t), s.class_id.to_string(), format!("{:?}", s.value)])?;
    }
    out.flush().map_err(io_err)
}

pub fn write_symmetry(w: &mut dyn Write, reports: &[SymmetryReport]) -> Result<()> {
    serde_json::to_writer_pretty(&mut *w, reports)?;
    writeln!(w).map_err(io_err)
}

pub fn write_manifest(path: &Path, manifest: &RunManifest) -> Result<()> {
    with_output(path, |w| {
        serde_json::to_writer_pretty(&mut *w, manifest)?;
        writeln!(w).map_err(io_err)
    })
}

/// `out.csv` -> `out.manifest.json`.
pub fn manifest_path(out: &Path) -> std::path::PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into());
    out.with_file_name(format!("{stem}.manifest.json"))
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}
