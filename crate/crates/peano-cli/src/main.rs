mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use peano::analysis::{classify_eigenspace, pullback, Level};
use peano::curves::{generate, identify, registry, FractalId};
use peano::graphs::{graph_at, solve_pg_renormalization};
use peano::reports::{self, Cache, Format, Precision, RunManifest};
use peano::spectra::{assemble, eigensolve, gaps, set_threads, weyl, Scheme, SpectralResult, Tolerances, DENSE_LIMIT};
use peano::{Error, Result};

use config::Config;

/// Peano-curve graph approximations of self-similar spaces and their
/// Laplacian spectra.
///
/// For the triangle, `--level m` is the level of the published tables,
/// which is curve level m+1. Use `--curve-level` to address curve levels
/// directly (for any fractal).
#[derive(Parser, Debug)]
#[command(name = "peano", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// key = value file; explicit flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Threads for dense eigensolves (default 1, bit-reproducible).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Spectrum cache directory (default: <tmp>/peano-cache).
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    #[arg(long, global = true)]
    no_cache: bool,
    /// -v info, -vv debug. RUST_LOG also works.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Args, Debug)]
struct Target {
    /// sg, pg, og, mc, torus or triangle.
    #[arg(long)]
    fractal: Option<String>,
    /// Table level (curve level, except for the triangle).
    #[arg(long)]
    level: Option<u32>,
    /// Curve level, bypassing the triangle's table indexing.
    #[arg(long)]
    curve_level: Option<u32>,
}

#[derive(Args, Debug)]
struct Solve {
    /// Keep the lowest K eigenvalues; required above the dense limit.
    #[arg(long)]
    count: Option<usize>,
    /// Relative clustering tolerance for multiplicities.
    #[arg(long)]
    tol_rel: Option<f64>,
    /// Absolute clustering tolerance, as a fraction of the largest eigenvalue.
    #[arg(long)]
    tol_abs: Option<f64>,
}

#[derive(Args, Debug)]
struct Output {
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Output file; `-` or absent is stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// full (round-trip) or display (4 decimals).
    #[arg(long)]
    precision: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Export γ_m with identification classes.
    Curve {
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        output: Output,
    },
    /// Eigenvalues with multiplicities, renormalized values and ratios.
    Spectrum {
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        solve: Solve,
        /// raw, renorm or ratio.
        #[arg(long)]
        scheme: Option<String>,
        /// Per-level factor for the renorm scheme (default: the fractal's).
        #[arg(long)]
        factor: Option<f64>,
        /// Include eigenvector columns.
        #[arg(long)]
        vectors: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Pull an eigenfunction back to the circle; writes a symmetry report
    /// next to `--out`.
    Eigenfunction {
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        solve: Solve,
        /// 1-based eigenvalue index.
        #[arg(long)]
        index: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Solve for the pentagasket conductance ratio b and renormalization r.
    Renorm {
        #[command(flatten)]
        output: Output,
    },
    /// Indices k with λ_{k+1}/λ_k at or above a threshold.
    Gaps {
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        solve: Solve,
        /// Default 1.15.
        #[arg(long)]
        threshold: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Eigenvalue counting function and Weyl ratio ρ(x)/x^β.
    Weyl {
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        solve: Solve,
        /// Default: the fractal's own exponent.
        #[arg(long)]
        beta: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Check the embedded table fixtures. Exits 1 if any fail.
    Verify {
        /// Groups, fractal names or fixture id prefixes.
        selection: Vec<String>,
        #[arg(long)]
        all: bool,
        #[command(flatten)]
        output: Output,
    },
}

struct Ctx {
    config: Config,
    cache: Option<Cache>,
    threads: usize,
}

struct Resolved {
    fractal: FractalId,
    level: u32,
}

struct Sink {
    out: PathBuf,
    format: Format,
    precision: Precision,
}

impl Sink {
    fn to_stdout(&self) -> bool {
        self.out.as_os_str() == "-"
    }

    /// `out.csv` -> `out.<suffix>`, next to the main output.
    fn sidecar(&self, suffix: &str) -> Option<PathBuf> {
        if self.to_stdout() {
            return None;
        }
        let stem = self.out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        Some(self.out.with_file_name(format!("{stem}.{suffix}")))
    }
}

fn resolve(ctx: &mut Ctx, t: Target) -> Result<Resolved> {
    let name: String = ctx.config.require("fractal", t.fractal)?;
    let fractal = registry().lookup(&name)?.id();
    let curve_level = ctx.config.get("curve_level", t.curve_level)?;
    let level = match curve_level {
        Some(c) => c,
        None => {
            let table: u32 = ctx.config.require("level", t.level)?;
            if fractal == FractalId::Triangle {
                log::info!("triangle table level {table} is curve level {}", table + 1);
                table + 1
            } else {
                table
            }
        }
    };
    Ok(Resolved { fractal, level })
}

fn sink(ctx: &mut Ctx, o: Output) -> Result<Sink> {
    let format: Format = ctx.config.get_or("format", o.format.map(|f| f.parse()).transpose()?, Format::Csv)?;
    let out = ctx.config.get("out", o.out.map(|p| p.display().to_string()))?;
    let precision = match ctx.config.get_or("precision", o.precision, "full".to_string())?.as_str() {
        "full" => Precision::Full,
        "display" => Precision::Display,
        other => return Err(Error::Invalid(format!("unknown precision '{other}' (full, display)"))),
    };
    // The output path is not part of what was computed.
    ctx.config.effective.remove("out");
    Ok(Sink { out: PathBuf::from(out.unwrap_or_else(|| "-".into())), format, precision })
}

fn tolerances(ctx: &mut Ctx, s: &Solve) -> Result<Tolerances> {
    let d = Tolerances::default();
    let rel = ctx.config.get_or("tol_rel", s.tol_rel, d.rel)?;
    let abs = ctx.config.get_or("tol_abs", s.tol_abs, d.abs)?;
    if !(rel >= 0.0 && abs >= 0.0) {
        return Err(Error::Invalid("tolerances must be non-negative".into()));
    }
    Ok(Tolerances { rel, abs })
}

/// Full pipeline through the cache. The cache key carries the thread
/// count but not output settings.
fn solve(
    ctx: &mut Ctx,
    r: &Resolved,
    count: Option<usize>,
    scheme: Scheme,
    tol: Tolerances,
    vectors: bool,
) -> Result<(SpectralResult, RunManifest)> {
    let graph = graph_at(r.fractal, r.level)?;
    let mut key = RunManifest::new(&graph, scheme, tol, count, vectors)?;
    key.config.insert("threads".into(), ctx.threads.to_string());
    let mut manifest = key.clone();
    manifest.config = ctx.config.effective.clone();
    if let Some(hit) = ctx.cache.as_ref().and_then(|c| c.lookup(&key)) {
        log::info!("cache hit {}", key.hash());
        return Ok((hit, manifest));
    }
    let op = assemble(&graph, Scheme::Raw)?;
    log::info!("{} level {}: dimension {}", r.fractal, r.level, op.dim());
    let mut res = eigensolve(&op, count, vectors)?;
    res.scheme = scheme;
    res.tolerances = tol;
    if let Some(cache) = &ctx.cache {
        if let Err(e) = cache.store(&key, &res) {
            log::warn!("could not cache result: {e}");
        }
    }
    Ok((res, manifest))
}

fn write_json<T: serde::Serialize>(sink: &Sink, value: &T) -> Result<()> {
    reports::with_output(&sink.out, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        w.write_all(b"\n").map_err(|e| Error::Io { path: sink.out.clone(), source: e })
    })
}

fn finish_manifest(sink: &Sink, manifest: &RunManifest) -> Result<()> {
    if !sink.to_stdout() {
        reports::write_manifest(&reports::manifest_path(&sink.out), manifest)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    let mut config = Config::load(cli.config.as_deref())?;
    let threads = config.get_or("threads", cli.threads, 1usize)?;
    set_threads(threads);
    let cache_dir = config.get("cache", cli.cache.map(|p| p.display().to_string()))?;
    config.effective.remove("cache");
    let cache = (!cli.no_cache).then(|| Cache::new(cache_dir.map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("peano-cache"))));
    let mut ctx = Ctx { config, cache, threads };

    match cli.cmd {
        Cmd::Curve { target, output } => {
            let r = resolve(&mut ctx, target)?;
            let sink = sink(&mut ctx, output)?;
            if sink.format != Format::Csv {
                return Err(Error::Invalid("curve export is CSV only".into()));
            }
            let curve = generate(r.fractal, r.level)?;
            let idmap = identify(&curve);
            reports::with_output(&sink.out, |w| reports::write_curve(w, &curve, &idmap))?;
        }
        Cmd::Spectrum { target, solve: s, scheme, factor, vectors, output } => {
            let r = resolve(&mut ctx, target)?;
            let count = ctx.config.get("count", s.count)?;
            let mut scheme: Scheme = ctx.config.get_or("scheme", scheme.map(|x| x.parse()).transpose()?, Scheme::Raw)?;
            if let Some(f) = ctx.config.get("factor", factor)? {
                match scheme {
                    Scheme::Renorm { .. } if f > 0.0 => scheme = Scheme::Renorm { factor: Some(f) },
                    Scheme::Renorm { .. } => return Err(Error::Invalid(format!("factor must be positive, got {f}"))),
                    _ => return Err(Error::Invalid("--factor needs --scheme renorm".into())),
                }
            }
            let vectors = ctx.config.switch("vectors", vectors)?;
            let tol = tolerances(&mut ctx, &s)?;
            let sink = sink(&mut ctx, output)?;
            let (res, manifest) = solve(&mut ctx, &r, count, scheme, tol, vectors)?;
            reports::write_spectrum(&sink.out, &res, sink.format, sink.precision)?;
            finish_manifest(&sink, &manifest)?;
        }
        Cmd::Eigenfunction { target, solve: s, index, output } => {
            let r = resolve(&mut ctx, target)?;
            let index: usize = ctx.config.require("index", index)?;
            let tol = tolerances(&mut ctx, &s)?;
            let sink = sink(&mut ctx, output)?;
            let level = Level::build(r.fractal, r.level)?;
            let dim = level.op.dim();
            if index == 0 || index > dim {
                return Err(Error::Invalid(format!("index {index} outside 1..={dim}")));
            }
            // Enough eigenpairs to cover the whole cluster around `index`.
            let count = ctx.config.get("count", s.count)?.or((dim > DENSE_LIMIT).then_some(index + 32));
            if let Some(c) = count.filter(|&c| c < index) {
                return Err(Error::Invalid(format!("index {index} beyond the {c} computed eigenvalues")));
            }
            let (res, manifest) = solve(&mut ctx, &r, count, Scheme::Raw, tol, true)?;
            let vecs = res.eigenvectors.as_ref().ok_or_else(|| Error::Numerical("solver returned no eigenvectors".into()))?;
            let samples = pullback(&vecs[index - 1], &level.idmap)?;
            match sink.format {
                Format::Csv => reports::with_output(&sink.out, |w| reports::write_pullback(w, &samples))?,
                Format::Json => write_json(&sink, &samples)?,
            }
            let clusters = res.clusters();
            let cluster = clusters.iter().find(|c| (c.start..c.start + c.multiplicity).contains(&(index - 1)));
            match cluster.map(|c| classify_eigenspace(&level, &res, c)) {
                Some(Ok(report)) => {
                    let period = report.period.map(|p| format!("1/{}", p.n)).unwrap_or_else(|| "none".into());
                    log::info!(
                        "λ = {:.6}, multiplicity {}, label {}, period {period}",
                        report.eigenvalue,
                        report.multiplicity,
                        report.label
                    );
                    match sink.sidecar("symmetry.json") {
                        Some(path) => reports::with_output(&path, |w| reports::write_symmetry(w, &[report]))?,
                        None => {
                            let mut err = std::io::stderr();
                            let _ = writeln!(err, "# λ = {:.6}, multiplicity {}, label {}, period {period}", report.eigenvalue, report.multiplicity, report.label);
                        }
                    }
                }
                Some(Err(e)) => log::warn!("no symmetry report: {e}"),
                None => log::warn!("no symmetry report: eigenvalue cluster truncated by --count"),
            }
            finish_manifest(&sink, &manifest)?;
        }
        Cmd::Renorm { output } => {
            let sink = sink(&mut ctx, output)?;
            let sol = solve_pg_renormalization()?;
            match sink.format {
                Format::Json => write_json(&sink, &sol)?,
                Format::Csv => reports::with_output(&sink.out, |w| {
                    let line = match sink.precision {
                        Precision::Full => format!("b = {:?}\nr = {:?}\n", sol.b, sol.r),
                        Precision::Display => format!("b = {:.6}\nr = {:.6}\n", sol.b, sol.r),
                    };
                    w.write_all(line.as_bytes()).map_err(|e| Error::Io { path: sink.out.clone(), source: e })
                })?,
            }
        }
        Cmd::Gaps { target, solve: s, threshold, output } => {
            let r = resolve(&mut ctx, target)?;
            let count = ctx.config.get("count", s.count)?;
            let threshold = ctx.config.get_or("threshold", threshold, 1.15)?;
            let tol = tolerances(&mut ctx, &s)?;
            let sink = sink(&mut ctx, output)?;
            let (res, manifest) = solve(&mut ctx, &r, count, Scheme::Raw, tol, false)?;
            let found = gaps(&res.eigenvalues, threshold);
            match sink.format {
                Format::Json => write_json(&sink, &found)?,
                Format::Csv => reports::with_output(&sink.out, |w| {
                    let mut out = csv::Writer::from_writer(w);
                    out.write_record(["k", "lambda_k", "lambda_next", "ratio"])?;
                    for &(k, ratio) in &found {
                        let (a, b) = (res.eigenvalues[k - 1], res.eigenvalues[k]);
                        out.write_record([k.to_string(), fmt(a, sink.precision), fmt(b, sink.precision), fmt(ratio, sink.precision)])?;
                    }
                    out.flush().map_err(|e| Error::Io { path: sink.out.clone(), source: e })
                })?,
            }
            finish_manifest(&sink, &manifest)?;
        }
        Cmd::Weyl { target, solve: s, beta, output } => {
            let r = resolve(&mut ctx, target)?;
            let count = ctx.config.get("count", s.count)?;
            let beta = ctx.config.get_or("beta", beta, registry().get(r.fractal).weyl_beta())?;
            let tol = tolerances(&mut ctx, &s)?;
            let sink = sink(&mut ctx, output)?;
            let (res, manifest) = solve(&mut ctx, &r, count, Scheme::Raw, tol, false)?;
            let series = weyl(&res.eigenvalues, beta)?;
            match sink.format {
                Format::Json => write_json(&sink, &series)?,
                Format::Csv => reports::with_output(&sink.out, |w| reports::write_weyl(w, &series))?,
            }
            finish_manifest(&sink, &manifest)?;
        }
        Cmd::Verify { selection, all, output } => {
            let sink = sink(&mut ctx, output)?;
            let selection = if all { Vec::new() } else { selection };
            let report = reports::run_fixtures(&selection)?;
            match sink.format {
                Format::Json => write_json(&sink, &report.outcomes)?,
                Format::Csv => reports::with_output(&sink.out, |w| {
                    let mut out = csv::Writer::from_writer(w);
                    for o in &report.outcomes {
                        out.serialize(o)?;
                    }
                    out.flush().map_err(|e| Error::Io { path: sink.out.clone(), source: e })
                })?,
            }
            let failed = report.failed().len();
            eprintln!("{} passed, {failed} failed", report.passed());
            for o in report.failed() {
                let got = o.actual.map(|a| a.to_string()).unwrap_or_else(|| "-".into());
                eprintln!("FAIL {} ({}): expected {}, got {got} {}", o.fixture_id, o.citation, o.expected, o.note);
            }
            if failed > 0 {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn fmt(x: f64, p: Precision) -> String {
    match p {
        Precision::Full => format!("{x:?}"),
        Precision::Display => format!("{x:.4}"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("peano: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
