//! Expected values transcribed by hand from the printed tables, and the
//! runner that checks them.
//!
//! Scales: `one` is the raw spectrum; `r` multiplies by the pentagasket
//! energy factor (the printed pentagasket table at levels 2 and up is the
//! operator spectrum times r); `renorm` and `ratio` are the spectra
//! schemes; `third` divides by 3, which is how the triangle table is
//! printed.

use std::collections::HashMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analysis::torus_oracle;
use crate::curves::{generate, identify, FractalId};
use crate::error::{Error, Result};
use crate::graphs::{graph_at, pg_r, solve_pg_renormalization, PgRenormalization};
use crate::spectra::{assemble, cluster_multiplicities, eigensolve, gaps, normalize, Scheme, SpectralResult, Tolerances, DENSE_LIMIT};

const TABLES: &str = include_str!("../../fixtures/tables.csv");

/// Eigenvalues kept when a level is too large for the dense path.
const PARTIAL_COUNT: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// λ_index under `scale`.
    Eig,
    /// Multiplicity of the cluster that starts at `index`.
    Mult,
    /// λ_index at `level` over λ_index at `level + 1`.
    LevelRatio,
    /// λ_{index+1} / λ_index.
    Gap,
    PgB,
    PgR,
    /// max_i |λ_i − (8 − λ_{n−1−i})|.
    Bipartite,
    /// Number of eigenvalues within 1e-8 of `at`.
    MultAt,
    /// max_i |λ_i − closed form_i|.
    TorusOracle,
    /// Size of the class containing parameter point `index`.
    ClassSize,
    /// 1 when points `index` and `at` are identified, else 0.
    SameClass,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    One,
    R,
    Renorm,
    Ratio,
    Third,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// |actual − expected| ≤ tol
    Abs,
    /// |actual − expected| ≤ tol·|expected|
    Rel,
    /// |actual − expected| ≤ tol·max(1, |expected|)
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fixture {
    pub id: String,
    pub group: String,
    pub citation: String,
    pub fractal: FractalId,
    pub level: u32,
    pub quantity: Quantity,
    pub index: Option<usize>,
    pub at: Option<f64>,
    pub scale: Scale,
    pub expected: f64,
    pub tolerance: f64,
    pub mode: Mode,
}

#[derive(Deserialize)]
struct Row {
    id: String,
    group: String,
    citation: String,
    fractal: String,
    level: u32,
    quantity: Quantity,
    index: Option<usize>,
    at: Option<f64>,
    mult: Option<usize>,
    scale: Scale,
    expected: f64,
    tolerance: f64,
    mode: Mode,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FixtureSet {
    pub fixtures: Vec<Fixture>,
}

impl FixtureSet {
    /// The embedded tables. A row with a multiplicity becomes two fixtures:
    /// the value and `<id>:mult`.
    pub fn embedded() -> Result<Self> {
        let mut reader = csv::Reader::from_reader(TABLES.as_bytes());
        let mut fixtures = Vec::new();
        for row in reader.deserialize::<Row>() {
            let row = row?;
            let fractal = FractalId::from_str(&row.fractal)?;
            let base = Fixture {
                id: row.id.clone(),
                group: row.group.clone(),
                citation: row.citation.clone(),
                fractal,
                level: row.level,
                quantity: row.quantity,
                index: row.index,
                at: row.at,
                scale: row.scale,
                expected: row.expected,
                tolerance: row.tolerance,
                mode: row.mode,
            };
            fixtures.push(base.clone());
            if let Some(m) = row.mult {
                fixtures.push(Fixture {
                    id: format!("{}:mult", row.id),
                    quantity: Quantity::Mult,
                    expected: m as f64,
                    tolerance: 0.0,
                    mode: Mode::Abs,
                    ..base
                });
            }
        }
        Ok(FixtureSet { fixtures })
    }

    pub fn groups(&self) -> Vec<&str> {
        let mut g: Vec<&str> = Vec::new();
        for f in &self.fixtures {
            if !g.contains(&f.group.as_str()) {
                g.push(&f.group);
            }
        }
        g
    }

    /// Fixtures whose group, fractal name or id prefix matches one of
    /// `selection` (case-insensitive). Empty or `all` selects everything.
    pub fn select(&self, selection: &[String]) -> Result<Vec<&Fixture>> {
        let keys: Vec<String> = selection.iter().map(|s| s.to_ascii_lowercase()).collect();
        if keys.is_empty() || keys.iter().any(|k| k == "all") {
            return Ok(self.fixtures.iter().collect());
        }
        let matches = |f: &Fixture, k: &str| f.group == k || f.fractal.name() == k || f.id.starts_with(&format!("{k}:"));
        for k in &keys {
            if !self.fixtures.iter().any(|f| matches(f, k)) {
                return Err(Error::Invalid(format!(
                    "unknown fixture selection '{k}' (groups: {})",
                    self.groups().join(", ")
                )));
            }
        }
        Ok(self.fixtures.iter().filter(|f| keys.iter().any(|k| matches(f, k))).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixtureOutcome {
    pub fixture_id: String,
    pub citation: String,
    pub expected: f64,
    /// `None` when the quantity could not be computed; see `note`.
    pub actual: Option<f64>,
    pub tolerance: f64,
    /// The bound actually applied after the mode is taken into account.
    pub bound: f64,
    pub deviation: Option<f64>,
    pub pass: bool,
    #[serde(skip_serializing_if = "String::is_empty", default)]
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixtureReport {
    pub outcomes: Vec<FixtureOutcome>,
}

impl FixtureReport {
    pub fn passed(&self) -> usize {
        self.outcomes.iter().filter(|o| o.pass).count()
    }

    pub fn failed(&self) -> Vec<&FixtureOutcome> {
        self.outcomes.iter().filter(|o| !o.pass).collect()
    }

    pub fn all_pass(&self) -> bool {
        self.outcomes.iter().all(|o| o.pass)
    }
}

/// Spectra and curves computed once per (fractal, level).
#[derive(Default)]
pub struct Workspace {
    spectra: HashMap<(FractalId, u32), std::result::Result<SpectralResult, String>>,
    pg: Option<std::result::Result<PgRenormalization, String>>,
}

impl Workspace {
    pub fn spectrum(&mut self, fractal: FractalId, level: u32) -> std::result::Result<&SpectralResult, String> {
        self.spectra
            .entry((fractal, level))
            .or_insert_with(|| solve(fractal, level).map_err(|e| e.to_string()))
            .as_ref()
            .map_err(Clone::clone)
    }

    fn pg(&mut self) -> std::result::Result<PgRenormalization, String> {
        self.pg.get_or_insert_with(|| solve_pg_renormalization().map_err(|e| e.to_string())).clone()
    }
}

/// Raw spectrum; partial above the dense limit.
pub fn solve(fractal: FractalId, level: u32) -> Result<SpectralResult> {
    let graph = graph_at(fractal, level)?;
    let op = assemble(&graph, Scheme::Raw)?;
    let count = (op.dim() > DENSE_LIMIT).then_some(PARTIAL_COUNT);
    eigensolve(&op, count, false)
}

fn scaled(res: &SpectralResult, scale: Scale) -> Result<Vec<f64>> {
    Ok(match scale {
        Scale::One => res.eigenvalues.clone(),
        Scale::R => res.eigenvalues.iter().map(|l| l * pg_r()).collect(),
        Scale::Renorm => normalize(res, Scheme::Renorm { factor: None })?,
        Scale::Ratio => normalize(res, Scheme::Ratio)?,
        Scale::Third => res.eigenvalues.iter().map(|l| l / 3.0).collect(),
    })
}

fn nth(values: &[f64], index: Option<usize>) -> std::result::Result<f64, String> {
    let i = index.ok_or("fixture needs an index")?;
    values
        .get(i.wrapping_sub(1))
        .copied()
        .ok_or_else(|| format!("#{i} beyond the {} computed eigenvalues", values.len()))
}

/// The measured value, a remark, and whether the value is consistent with
/// the fixture's indexing (false forces a failure).
fn measure(f: &Fixture, ws: &mut Workspace) -> std::result::Result<(f64, String, bool), String> {
    let none = String::new();
    match f.quantity {
        Quantity::PgB => Ok((ws.pg()?.b, none, true)),
        Quantity::PgR => Ok((ws.pg()?.r, none, true)),
        Quantity::ClassSize | Quantity::SameClass => {
            let curve = generate(f.fractal, f.level).map_err(|e| e.to_string())?;
            let idmap = identify(&curve);
            let k = f.index.ok_or("fixture needs an index")? as u64;
            let ck = idmap.class_of_k(k).ok_or_else(|| format!("{k} is not a curve point"))?;
            if f.quantity == Quantity::ClassSize {
                return Ok((idmap.classes[ck].len() as f64, none, true));
            }
            let j = f.at.ok_or("fixture needs a partner point")? as u64;
            let cj = idmap.class_of_k(j).ok_or_else(|| format!("{j} is not a curve point"))?;
            Ok((if ck == cj { 1.0 } else { 0.0 }, none, true))
        }
        Quantity::LevelRatio => {
            let coarse = nth(&ws.spectrum(f.fractal, f.level)?.eigenvalues.clone(), f.index)?;
            let fine = nth(&ws.spectrum(f.fractal, f.level + 1)?.eigenvalues, f.index)?;
            Ok((coarse / fine, none, true))
        }
        _ => {
            let res = ws.spectrum(f.fractal, f.level)?;
            let v = &res.eigenvalues;
            match f.quantity {
                Quantity::Eig => Ok((nth(&scaled(res, f.scale).map_err(|e| e.to_string())?, f.index)?, none, true)),
                Quantity::Mult => {
                    let i = f.index.ok_or("fixture needs an index")? - 1;
                    let c = cluster_multiplicities(v, Tolerances::default())
                        .into_iter()
                        .find(|c| c.start <= i && i < c.start + c.multiplicity)
                        .ok_or_else(|| format!("#{} beyond the {} computed eigenvalues", i + 1, v.len()))?;
                    if c.start == i {
                        Ok((c.multiplicity as f64, none, true))
                    } else {
                        let note = format!("#{} lies inside a cluster starting at #{}", i + 1, c.start + 1);
                        Ok((c.multiplicity as f64, note, false))
                    }
                }
                Quantity::Gap => {
                    let k = f.index.ok_or("fixture needs an index")?;
                    gaps(v, 0.0)
                        .into_iter()
                        .find(|&(j, _)| j == k)
                        .map(|(_, r)| (r, none, true))
                        .ok_or_else(|| format!("no ratio at k = {k}"))
                }
                Quantity::Bipartite => {
                    let n = v.len();
                    Ok((v.iter().zip(v.iter().rev()).map(|(a, b)| (a - (8.0 - b)).abs()).fold(0.0, f64::max), format!("{n} eigenvalues"), true))
                }
                Quantity::MultAt => {
                    let at = f.at.ok_or("fixture needs a target eigenvalue")?;
                    Ok((v.iter().filter(|l| (*l - at).abs() <= 1e-8).count() as f64, none, true))
                }
                Quantity::TorusOracle => {
                    let oracle = torus_oracle(f.level);
                    if oracle.len() != v.len() {
                        return Err(format!("oracle has {} values, solver {}", oracle.len(), v.len()));
                    }
                    Ok((v.iter().zip(&oracle).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max), none, true))
                }
                _ => unreachable!("handled above"),
            }
        }
    }
}

pub fn check(f: &Fixture, ws: &mut Workspace) -> FixtureOutcome {
    let bound = match f.mode {
        Mode::Abs => f.tolerance,
        Mode::Rel => f.tolerance * f.expected.abs(),
        Mode::Mixed => f.tolerance * f.expected.abs().max(1.0),
    };
    let (actual, note, consistent) = match measure(f, ws) {
        Ok((a, n, c)) => (Some(a), n, c),
        Err(n) => (None, n, false),
    };
    let deviation = actual.map(|a| (a - f.expected).abs());
    FixtureOutcome {
        fixture_id: f.id.clone(),
        citation: f.citation.clone(),
        expected: f.expected,
        actual,
        tolerance: f.tolerance,
        bound,
        deviation,
        pass: consistent && deviation.is_some_and(|d| d <= bound),
        note,
    }
}

/// Run the selected fixtures. Failures are report entries, not errors; an
/// unknown selection is an error.
pub fn run_fixtures(selection: &[String]) -> Result<FixtureReport> {
    let set = FixtureSet::embedded()?;
    let mut ws = Workspace::default();
    let outcomes = set.select(selection)?.into_iter().map(|f| check(f, &mut ws)).collect();
    Ok(FixtureReport { outcomes })
}
