//! Command-line front end: descriptor parsing, subcommand dispatch,
//! parameter sweeps, and bit-stable CSV/JSON artifacts with a checksummed
//! run manifest.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::bounds::{applicable_bounds, BRUTE_FORCE_MAX_SITES};
use crate::correlations::{classify, report_from_summary, one_jump_rates, nnn_region, nnn_region_finite};
use crate::dynamics::{
    detect_burst, lindblad_evolve, InitialState, BURST_RELATIVE_THRESHOLD,
};
use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;
use crate::meanfield::cumulant_evolve;
use crate::models::{build_coherent_coupling, build_decoherence, CoherentCoupling, InteractionModel};
use crate::ode::OdeOptions;
use crate::spectral::{analyze, closed_form_spectrum, eigen_decompose, PSD_RELATIVE_TOLERANCE};

/// Largest array for which the dense decoherence matrix is materialized by
/// the scalar-report commands.
const DENSE_MAX_SITES: usize = 4096;

/// A swept parameter: `NAME=START:STOP[:STEPS][:log|linear]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    pub log: bool,
}

impl SweepSpec {
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        (0..self.steps)
            .map(|i| {
                let f = i as f64 / (self.steps - 1) as f64;
                if self.log {
                    self.start * (self.stop / self.start).powf(f)
                } else {
                    self.start + (self.stop - self.start) * f
                }
            })
            .collect()
    }
}

impl FromStr for SweepSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad sweep `{s}`, want NAME=START:STOP[:STEPS][:log|linear]"));
        let (name, rest) = s.split_once('=').ok_or_else(bad)?;
        if name.is_empty() {
            return Err(bad());
        }
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() < 2 || parts.len() > 4 {
            return Err(bad());
        }
        let start: f64 = parts[0].parse().map_err(|_| bad())?;
        let stop: f64 = parts[1].parse().map_err(|_| bad())?;
        let mut steps = 20usize;
        let mut log = false;
        for part in &parts[2..] {
            match *part {
                "log" => log = true,
                "linear" => log = false,
                other => steps = other.parse().map_err(|_| bad())?,
            }
        }
        if steps < 1 {
            return Err(Error::Parse(format!("sweep `{s}` needs at least 1 step")));
        }
        if !start.is_finite() || !stop.is_finite() {
            return Err(bad());
        }
        if log && (start <= 0.0 || stop <= 0.0) {
            return Err(Error::Parse(format!(
                "log sweep `{s}` needs positive endpoints"
            )));
        }
        Ok(SweepSpec { name: name.to_string(), start, stop, steps, log })
    }
}

impl fmt::Display for SweepSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}={}:{}:{}:{}",
            self.name,
            self.start,
            self.stop,
            self.steps,
            if self.log { "log" } else { "linear" }
        )
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ManifestEntry {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Tolerances {
    psd_relative: f64,
    burst_relative: f64,
    ode_relative: f64,
    ode_absolute: f64,
}

/// Reproducibility record written beside every set of output files.
#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct RunManifest {
    command: Vec<String>,
    model: Option<String>,
    lattice: Option<String>,
    version: String,
    tolerances: Tolerances,
    outputs: Vec<ManifestEntry>,
}

/// Collects output files and pairs each with a checksum manifest entry.
struct Artifacts {
    dir: PathBuf,
    model: Option<String>,
    lattice: Option<String>,
    entries: Vec<ManifestEntry>,
}

impl Artifacts {
    fn new(dir: &Path) -> Self {
        Artifacts { dir: dir.to_path_buf(), model: None, lattice: None, entries: Vec::new() }
    }

    fn write(&mut self, name: &str, content: &str) -> Result<()> {
        fs::create_dir_all(&self.dir)?;
        let path = self.dir.join(name);
        fs::write(&path, content)?;
        let digest = Sha256::digest(content.as_bytes());
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.entries.push(ManifestEntry { path: name.to_string(), sha256: hex });
        Ok(())
    }

    fn finish(self) -> Result<()> {
        if self.entries.is_empty() {
            return Ok(());
        }
        let ode = OdeOptions::default();
        let manifest = RunManifest {
            command: std::env::args().collect(),
            model: self.model,
            lattice: self.lattice,
            version: env!("CARGO_PKG_VERSION").to_string(),
            tolerances: Tolerances {
                psd_relative: PSD_RELATIVE_TOLERANCE,
                burst_relative: BURST_RELATIVE_THRESHOLD,
                ode_relative: ode.rtol,
                ode_absolute: ode.atol,
            },
            outputs: self.entries,
        };
        fs::create_dir_all(&self.dir)?;
        fs::write(
            self.dir.join("manifest.json"),
            serde_json::to_string_pretty(&manifest)? + "\n",
        )?;
        Ok(())
    }
}

/// 17 significant digits, locale-independent.
fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv(header: &str, rows: &[String]) -> String {
    let mut out = String::with_capacity(rows.len() * 48 + header.len() + 1);
    out.push_str(header);
    out.push('\n');
    for row in rows {
        out.push_str(row);
        out.push('\n');
    }
    out
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    use std::io::Write;
    let text = serde_json::to_string_pretty(value)?;
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{text}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

#[derive(Parser)]
#[command(
    name = "superburst",
    version,
    about = "Superradiance analysis for dissipatively coupled emitter arrays"
)]
struct Cli {
    /// Directory for CSV outputs and the run manifest.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Worker threads for sweeps (env SUPERBURST_THREADS overrides).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Override the relative positivity tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for the randomized self-checks of `validate`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Eigenvalues, trace powers, and physicality of the coupling matrix.
    Spectrum {
        #[arg(long)]
        model: String,
        #[arg(long)]
        lattice: String,
        /// Also dump eigenvectors to this CSV file (mode,site,re,im).
        #[arg(long)]
        eigvecs: Option<String>,
    },
    /// Photon statistics of the fully excited state and region verdict.
    G2 {
        #[arg(long)]
        model: String,
        #[arg(long)]
        lattice: String,
    },
    /// Superradiance threshold swept over system size or dimension.
    Critical {
        #[arg(long)]
        model: String,
        /// Lattice dimension for N sweeps.
        #[arg(long, default_value_t = 1)]
        dimension: usize,
        /// N=START:STOP[:STEPS][:log|linear] or D=START:STOP[:STEPS].
        #[arg(long)]
        sweep: String,
        /// Target sites per lattice for D sweeps.
        #[arg(long, default_value_t = 1_000_000)]
        size: usize,
    },
    /// Region map over coupling strengths for a model family.
    #[command(name = "phase-diagram")]
    PhaseDiagram {
        /// Model family; `nnn` is the supported map.
        family: String,
        #[arg(long, default_value_t = 1e-3)]
        res: f64,
        /// Odd ring size for the finite-size cross-check.
        #[arg(long = "n-check", default_value_t = 101)]
        n_check: usize,
    },
    /// Exact emission trace and burst verdict.
    Dynamics {
        #[arg(long)]
        model: String,
        #[arg(long)]
        lattice: String,
        #[arg(long, default_value_t = 5.0)]
        tmax: f64,
        #[arg(long, default_value_t = 400)]
        points: usize,
        /// Coherent coupling, e.g. `all:0.5`.
        #[arg(long = "J")]
        coherent: Option<String>,
        /// `excited` or `product:theta=1.57,phi=0`.
        #[arg(long, default_value = "excited")]
        state: String,
    },
    /// Certified upper bounds on the emission rate.
    Bounds {
        #[arg(long)]
        model: String,
        #[arg(long)]
        lattice: String,
        /// Also diagonalize the rate operator exactly (small arrays).
        #[arg(long = "brute-force")]
        brute_force: bool,
    },
    /// Cumulant dynamics on a ring, optionally checked against the exact
    /// solver.
    Meanfield {
        #[arg(long)]
        model: String,
        /// Ring size.
        #[arg(long = "N")]
        n: usize,
        #[arg(long, default_value_t = 3.0)]
        tmax: f64,
        #[arg(long, default_value_t = 400)]
        points: usize,
        /// `excited` or `product:theta=...,phi=...`.
        #[arg(long, default_value = "excited")]
        state: String,
        /// Run the exact solver on a small ring and report the deviation.
        #[arg(long = "compare-exact")]
        compare_exact: bool,
    },
    /// Seeded randomized self-checks of the numerical identities.
    Validate {
        /// Fewer draws per check.
        #[arg(long)]
        quick: bool,
    },
}

/// Entry point used by the binary; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    configure_threads(cli.threads);
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Parse(_) => 2,
                _ => 3,
            }
        }
    }
}

fn configure_threads(flag: Option<usize>) {
    let n = std::env::var("SUPERBURST_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .or(flag);
    if let Some(n) = n {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn parse_pair(model: &str, lattice: &str) -> Result<(InteractionModel, LatticeSpec)> {
    let model: InteractionModel = model.parse()?;
    let lattice: LatticeSpec = lattice.parse()?;
    model.check_lattice(&lattice)?;
    Ok((model, lattice))
}

fn parse_state(s: &str) -> Result<InitialState> {
    if s == "excited" {
        return Ok(InitialState::FullyExcited);
    }
    let body = s.strip_prefix("product:").ok_or_else(|| {
        Error::Parse(format!("bad state `{s}`, want `excited` or `product:theta=T[,phi=P]`"))
    })?;
    let mut theta = None;
    let mut phi = 0.0;
    for part in body.split(',') {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("bad state token `{part}`")))?;
        let value: f64 = value
            .parse()
            .map_err(|_| Error::Parse(format!("bad state value `{part}`")))?;
        match key {
            "theta" => theta = Some(value),
            "phi" => phi = value,
            other => return Err(Error::Parse(format!("unknown state key `{other}`"))),
        }
    }
    let theta = theta.ok_or_else(|| Error::Parse(format!("state `{s}` is missing theta")))?;
    Ok(InitialState::Product { theta, phi })
}

fn parse_coherent(s: &str, n: usize) -> Result<CoherentCoupling> {
    let body = s
        .strip_prefix("all:")
        .ok_or_else(|| Error::Parse(format!("bad coherent coupling `{s}`, want `all:J`")))?;
    let j: f64 = body
        .parse()
        .map_err(|_| Error::Parse(format!("bad coherent strength `{body}`")))?;
    let _ = n;
    Ok(CoherentCoupling::AllToAll { j })
}

fn dense_guard(n: usize) -> Result<()> {
    if n > DENSE_MAX_SITES {
        return Err(Error::TooLarge(format!(
            "{n} sites exceeds the {DENSE_MAX_SITES}-site dense-matrix cap; use `critical` \
             for large-N threshold scans"
        )));
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<i32> {
    match &cli.cmd {
        Cmd::Spectrum { model, lattice, eigvecs } => {
            cmd_spectrum(cli, model, lattice, eigvecs.as_deref())
        }
        Cmd::G2 { model, lattice } => cmd_g2(cli, model, lattice),
        Cmd::Critical { model, dimension, sweep, size } => {
            cmd_critical(cli, model, *dimension, sweep, *size)
        }
        Cmd::PhaseDiagram { family, res, n_check } => {
            cmd_phase_diagram(cli, family, *res, *n_check)
        }
        Cmd::Dynamics { model, lattice, tmax, points, coherent, state } => {
            cmd_dynamics(cli, model, lattice, *tmax, *points, coherent.as_deref(), state)
        }
        Cmd::Bounds { model, lattice, brute_force } => {
            cmd_bounds(cli, model, lattice, *brute_force)
        }
        Cmd::Meanfield { model, n, tmax, points, state, compare_exact } => {
            cmd_meanfield(cli, model, *n, *tmax, *points, state, *compare_exact)
        }
        Cmd::Validate { quick } => cmd_validate(cli, *quick),
    }
}

fn cmd_spectrum(cli: &Cli, model: &str, lattice: &str, eigvecs: Option<&str>) -> Result<i32> {
    let (model, lattice) = parse_pair(model, lattice)?;
    dense_guard(lattice.n_sites())?;
    let gamma = build_decoherence(&model, &lattice)?;
    let mut summary = analyze(&gamma)?;
    if let Some(tol) = cli.tol {
        summary.tolerance = tol * summary.n as f64;
        summary.is_physical = summary.min_eigenvalue >= -summary.tolerance;
    }
    if let Some(name) = eigvecs {
        let (_, vectors) = eigen_decompose(&gamma)?;
        let mut rows = Vec::with_capacity(summary.n * summary.n);
        for mode in 0..summary.n {
            for site in 0..summary.n {
                let v = vectors[(site, mode)];
                rows.push(format!("{mode},{site},{},{}", sci(v.re), sci(v.im)));
            }
        }
        let mut artifacts = Artifacts::new(&cli.out);
        artifacts.model = Some(model.descriptor());
        artifacts.lattice = Some(lattice.to_string());
        artifacts.write(name, &csv("mode,site,re,im", &rows))?;
        artifacts.finish()?;
    }
    print_json(&summary)?;
    Ok(0)
}

fn cmd_g2(cli: &Cli, model: &str, lattice: &str) -> Result<i32> {
    let (model, lattice) = parse_pair(model, lattice)?;
    dense_guard(lattice.n_sites())?;
    let gamma = build_decoherence(&model, &lattice)?;
    let mut summary = analyze(&gamma)?;
    if let Some(tol) = cli.tol {
        summary.tolerance = tol * summary.n as f64;
        summary.is_physical = summary.min_eigenvalue >= -summary.tolerance;
    }
    let report = report_from_summary(&summary);
    let mut value = serde_json::to_value(&report)?;
    value["region"] = serde_json::to_value(classify(&summary))?;
    print_json(&value)?;
    Ok(0)
}

/// Near-isotropic lattice with roughly `n` sites in `dimension` dimensions.
fn balanced_lattice(dimension: usize, n: usize) -> Result<LatticeSpec> {
    if dimension == 1 {
        return LatticeSpec::chain(n.max(2));
    }
    let extent = (n as f64).powf(1.0 / dimension as f64).round().max(2.0) as usize;
    LatticeSpec::hyperrectangle(vec![extent; dimension])
}

fn threshold_for(model: &InteractionModel, lattice: &LatticeSpec) -> Result<Option<f64>> {
    if let Some(value) = crate::correlations::gamma_s(model, lattice)? {
        return Ok(Some(value));
    }
    crate::correlations::gamma_s_numeric(model, lattice)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct CriticalSummary {
    parameter: String,
    model: String,
    rows: usize,
    failed_rows: Vec<f64>,
    plateau_mean: Option<f64>,
    plateau_max_deviation: Option<f64>,
    fit_exponent: Option<f64>,
}

fn cmd_critical(cli: &Cli, model: &str, dimension: usize, sweep: &str, size: usize) -> Result<i32> {
    use rayon::prelude::*;
    let model: InteractionModel = model.parse()?;
    model.validate()?;
    let sweep: SweepSpec = sweep.parse()?;
    let (header, points): (&str, Vec<(f64, LatticeSpec)>) = match sweep.name.as_str() {
        "N" => {
            let mut sizes: Vec<usize> =
                sweep.values().iter().map(|v| v.round().max(2.0) as usize).collect();
            sizes.dedup();
            let points = sizes
                .into_iter()
                .map(|n| {
                    let lat = balanced_lattice(dimension, n)?;
                    Ok((lat.n_sites() as f64, lat))
                })
                .collect::<Result<_>>()?;
            ("n,gamma_s", points)
        }
        "D" => {
            let mut dims: Vec<usize> =
                sweep.values().iter().map(|v| v.round().max(1.0) as usize).collect();
            dims.dedup();
            let points = dims
                .into_iter()
                .map(|d| Ok((d as f64, balanced_lattice(d, size)?)))
                .collect::<Result<_>>()?;
            ("dimension,gamma_s", points)
        }
        other => {
            return Err(Error::Parse(format!(
                "critical sweeps run over `N` or `D`, got `{other}`"
            )))
        }
    };
    // Dimension sweeps prefer the converged bulk threshold; families without
    // a convergent bulk sum fall back to the finite lattice of ~`size` sites.
    let bulk_mode = sweep.name == "D";
    let results: Vec<(f64, Result<Option<f64>>)> = points
        .par_iter()
        .map(|(x, lattice)| {
            if bulk_mode {
                match crate::correlations::gamma_s_bulk(&model, lattice.dimension) {
                    Ok(value) => return (*x, Ok(Some(value))),
                    Err(Error::Unsupported(_)) => {}
                    Err(e) => return (*x, Err(e)),
                }
            }
            (*x, threshold_for(&model, lattice))
        })
        .collect();
    let mut rows = Vec::new();
    let mut fitted = Vec::new();
    let mut failed = Vec::new();
    for (x, res) in results {
        match res? {
            Some(gs) => {
                rows.push(format!("{},{}", sci(x), sci(gs)));
                fitted.push((x, gs));
            }
            None => failed.push(x),
        }
    }
    let half = fitted.len() / 2;
    let plateau = &fitted[half..];
    let plateau_mean = (!plateau.is_empty())
        .then(|| plateau.iter().map(|(_, g)| g).sum::<f64>() / plateau.len() as f64);
    let plateau_max_deviation = plateau_mean.map(|mean| {
        plateau.iter().map(|(_, g)| (g - mean).abs()).fold(0.0, f64::max)
    });
    let fit_exponent = (fitted.len() >= 2).then(|| log_log_slope(&fitted));
    let mut artifacts = Artifacts::new(&cli.out);
    artifacts.model = Some(model.descriptor());
    artifacts.write("critical.csv", &csv(header, &rows))?;
    artifacts.finish()?;
    print_json(&CriticalSummary {
        parameter: sweep.name.clone(),
        model: model.descriptor(),
        rows: rows.len(),
        failed_rows: failed,
        plateau_mean,
        plateau_max_deviation,
        fit_exponent,
    })?;
    Ok(0)
}

/// Least-squares slope of ln(y) against ln(x).
fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (lx, ly) = (x.ln(), y.ln());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct PhaseDiagramSummary {
    resolution: f64,
    n_check: usize,
    cells: usize,
    unphysical: usize,
    physical_no_burst: usize,
    superradiant: usize,
    min_gamma2_superradiant: Option<f64>,
    finite_disagreements: usize,
}

fn cmd_phase_diagram(cli: &Cli, family: &str, res: f64, n_check: usize) -> Result<i32> {
    use rayon::prelude::*;
    if family != "nnn" {
        return Err(Error::Parse(format!(
            "unsupported phase-diagram family `{family}`; only `nnn` is mapped"
        )));
    }
    if !(1e-4..=1e-1).contains(&res) {
        return Err(Error::Parse(format!(
            "resolution {res} outside [1e-4, 1e-1]"
        )));
    }
    if n_check < 5 || n_check % 2 == 0 {
        return Err(Error::Parse(format!(
            "finite-size check needs an odd ring of at least 5 sites, got {n_check}"
        )));
    }
    let steps1 = (1.0 / res).round() as usize;
    let steps2 = (0.5 / res).round() as usize;
    let columns: Vec<(Vec<String>, Option<f64>, usize, [usize; 3])> = (0..=steps1)
        .into_par_iter()
        .map(|i1| {
            let g1 = i1 as f64 * res;
            let mut rows = Vec::with_capacity(steps2 + 1);
            let mut min_g2 = None;
            let mut disagreements = 0;
            let mut counts = [0usize; 3];
            for i2 in 0..=steps2 {
                let g2 = i2 as f64 * res;
                let analytic = nnn_region(g1, g2);
                let finite = nnn_region_finite(n_check, g1, g2).expect("odd ring checked");
                if analytic != finite {
                    disagreements += 1;
                }
                counts[analytic as usize] += 1;
                if analytic == crate::correlations::RegionVerdict::Superradiant
                    && min_g2.map_or(true, |m| g2 < m)
                {
                    min_g2 = Some(g2);
                }
                rows.push(format!("{},{},{analytic},{finite}", sci(g1), sci(g2)));
            }
            (rows, min_g2, disagreements, counts)
        })
        .collect();
    let mut rows = Vec::with_capacity((steps1 + 1) * (steps2 + 1));
    let mut min_gamma2: Option<f64> = None;
    let mut finite_disagreements = 0;
    let mut counts = [0usize; 3];
    for (mut column, min_g2, disagreements, col_counts) in columns {
        rows.append(&mut column);
        if let Some(g2) = min_g2 {
            if min_gamma2.map_or(true, |m| g2 < m) {
                min_gamma2 = Some(g2);
            }
        }
        finite_disagreements += disagreements;
        for k in 0..3 {
            counts[k] += col_counts[k];
        }
    }
    let mut artifacts = Artifacts::new(&cli.out);
    artifacts.write("phase_diagram_nnn.csv", &csv("gamma1,gamma2,region,region_finite", &rows))?;
    artifacts.finish()?;
    print_json(&PhaseDiagramSummary {
        resolution: res,
        n_check,
        cells: rows.len(),
        unphysical: counts[0],
        physical_no_burst: counts[1],
        superradiant: counts[2],
        min_gamma2_superradiant: min_gamma2,
        finite_disagreements,
    })?;
    Ok(0)
}

/// Time grid for burst hunting with a caller-chosen point budget: geometric
/// coverage of the early decades, then uniform to `t_max`.
fn dynamics_grid(t_max: f64, points: usize) -> Result<Vec<f64>> {
    if !(t_max > 1e-3) {
        return Err(Error::Parse(format!("tmax must exceed 1e-3, got {t_max}")));
    }
    if points < 40 {
        return Err(Error::Parse(format!("need at least 40 points, got {points}")));
    }
    let mut grid = vec![0.0];
    let geo_end = t_max.min(0.1);
    let geo_points = 30;
    let ratio = (geo_end / 1e-4).powf(1.0 / (geo_points - 1) as f64);
    let mut t = 1e-4;
    for _ in 0..geo_points {
        grid.push(t);
        t *= ratio;
    }
    let last = *grid.last().unwrap();
    if t_max > last {
        let steps = points - grid.len();
        let dt = (t_max - last) / steps as f64;
        for i in 1..=steps {
            grid.push(last + i as f64 * dt);
        }
    }
    Ok(grid)
}

fn cmd_dynamics(
    cli: &Cli,
    model: &str,
    lattice: &str,
    tmax: f64,
    points: usize,
    coherent: Option<&str>,
    state: &str,
) -> Result<i32> {
    let (model, lattice) = parse_pair(model, lattice)?;
    let initial = parse_state(state)?;
    let n = lattice.n_sites();
    let coupling = match coherent {
        Some(s) => build_coherent_coupling(&parse_coherent(s, n)?, n)?,
        None => None,
    };
    let gamma = build_decoherence(&model, &lattice)?;
    let grid = dynamics_grid(tmax, points)?;
    let trace = lindblad_evolve(&gamma, coupling.as_ref(), initial, &grid)?;
    let report = detect_burst(&trace, BURST_RELATIVE_THRESHOLD)?;
    let rows: Vec<String> = trace
        .times
        .iter()
        .zip(&trace.rates)
        .map(|(t, r)| format!("{},{}", sci(*t), sci(*r)))
        .collect();
    let mut artifacts = Artifacts::new(&cli.out);
    artifacts.model = Some(model.descriptor());
    artifacts.lattice = Some(lattice.to_string());
    artifacts.write("dynamics.csv", &csv("t,rate", &rows))?;
    artifacts.finish()?;
    print_json(&report)?;
    Ok(0)
}

fn cmd_bounds(cli: &Cli, model: &str, lattice: &str, brute_force: bool) -> Result<i32> {
    let (model, lattice) = parse_pair(model, lattice)?;
    let gamma = if brute_force {
        let n = lattice.n_sites();
        if n > BRUTE_FORCE_MAX_SITES {
            return Err(Error::TooLarge(format!(
                "brute force is capped at {BRUTE_FORCE_MAX_SITES} sites, got {n}"
            )));
        }
        Some(build_decoherence(&model, &lattice)?)
    } else {
        None
    };
    let bounds = applicable_bounds(&model, &lattice, gamma.as_ref())?;
    if bounds.is_empty() {
        return Err(Error::Unsupported(format!(
            "no closed-form bound covers `{}` on `{lattice}`; rerun with --brute-force on a \
             small array",
            model.descriptor()
        )));
    }
    print_json(&bounds)?;
    let _ = cli;
    Ok(0)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct MeanfieldSummary {
    n: usize,
    classes: usize,
    initial_rate: f64,
    final_rate: f64,
    max_rate: f64,
    compare_exact: Option<CompareExact>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct CompareExact {
    n: usize,
    max_relative_deviation: f64,
}

fn cmd_meanfield(
    cli: &Cli,
    model: &str,
    n: usize,
    tmax: f64,
    points: usize,
    state: &str,
    compare_exact: bool,
) -> Result<i32> {
    let model: InteractionModel = model.parse()?;
    let initial = parse_state(state)?;
    let lattice = LatticeSpec::ring(n)?;
    if points < 2 || !(tmax > 0.0) {
        return Err(Error::Parse(format!(
            "need tmax > 0 and at least 2 points, got tmax={tmax}, points={points}"
        )));
    }
    let times: Vec<f64> =
        (0..=points).map(|i| tmax * i as f64 / points as f64).collect();
    let run = cumulant_evolve(&model, &lattice, initial, &times)?;
    let rows: Vec<String> = run
        .trace
        .times
        .iter()
        .zip(run.trace.rates.iter().zip(&run.states))
        .map(|(t, (r, s))| {
            format!("{},{},{},{},{}", sci(*t), sci(*r), sci(s.p), sci(s.c[0]), sci(s.z[0]))
        })
        .collect();
    let compare = if compare_exact {
        let n_cmp = if n <= 10 {
            n
        } else {
            match model {
                InteractionModel::NextNearestRing { .. } => 9,
                _ => 10,
            }
        };
        let small = LatticeSpec::ring(n_cmp)?;
        let approx_run = cumulant_evolve(&model, &small, initial, &times)?;
        let gamma = build_decoherence(&model, &small)?;
        let exact = lindblad_evolve(&gamma, None, initial, &times)?;
        let max_rel = approx_run
            .trace
            .rates
            .iter()
            .zip(&exact.rates)
            .map(|(a, b)| (a - b).abs() / b.abs().max(1e-12))
            .fold(0.0, f64::max);
        Some(CompareExact { n: n_cmp, max_relative_deviation: max_rel })
    } else {
        None
    };
    let max_rate = run.trace.rates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut artifacts = Artifacts::new(&cli.out);
    artifacts.model = Some(model.descriptor());
    artifacts.lattice = Some(lattice.to_string());
    artifacts.write("meanfield.csv", &csv("t,rate,p,c1,z1", &rows))?;
    artifacts.finish()?;
    print_json(&MeanfieldSummary {
        n,
        classes: n / 2,
        initial_rate: run.trace.initial_rate,
        final_rate: *run.trace.rates.last().unwrap(),
        max_rate,
        compare_exact: compare,
    })?;
    Ok(0)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct CheckResult {
    name: String,
    passed: bool,
    detail: String,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ValidateReport {
    seed: u64,
    checks: Vec<CheckResult>,
    all_passed: bool,
}

fn cmd_validate(cli: &Cli, quick: bool) -> Result<i32> {
    let seed = cli.seed.unwrap_or(42);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws = if quick { 4 } else { 12 };
    let mut checks = Vec::new();

    let record = |name: &str, outcome: Result<String>, checks: &mut Vec<CheckResult>| {
        match outcome {
            Ok(detail) => checks.push(CheckResult { name: name.into(), passed: true, detail }),
            Err(e) => checks.push(CheckResult {
                name: name.into(),
                passed: false,
                detail: e.to_string(),
            }),
        }
    };

    let outcome = check_spectral_identities(&mut rng, draws);
    record("spectral_trace_identities", outcome, &mut checks);
    let outcome = check_closed_spectra(&mut rng, draws);
    record("closed_form_vs_dense_spectrum", outcome, &mut checks);
    let outcome = check_single_excitation_average(&mut rng, draws);
    record("single_excitation_rate_average", outcome, &mut checks);
    let outcome = check_initial_slope(&mut rng, if quick { 2 } else { 4 });
    record("initial_slope_vs_dynamics", outcome, &mut checks);
    let outcome = check_bounds_dominate(&mut rng, draws);
    record("closed_bounds_dominate_exact_maximum", outcome, &mut checks);

    let all_passed = checks.iter().all(|c| c.passed);
    print_json(&ValidateReport { seed, checks, all_passed })?;
    Ok(if all_passed { 0 } else { 3 })
}

fn random_model_lattice(rng: &mut ChaCha8Rng, max_sites: usize) -> (InteractionModel, LatticeSpec) {
    loop {
        let (model, lattice) = match rng.gen_range(0..5) {
            0 => (
                InteractionModel::NearestNeighbor { gamma: rng.gen_range(0.0..0.45) },
                LatticeSpec::chain(rng.gen_range(2..=max_sites)).unwrap(),
            ),
            1 => (
                InteractionModel::Exponential { gamma: rng.gen_range(0.0..1.0) },
                LatticeSpec::chain(rng.gen_range(2..=max_sites)).unwrap(),
            ),
            2 => (
                InteractionModel::AllToAll { gamma: rng.gen_range(0.0..1.0) },
                LatticeSpec::chain(rng.gen_range(2..=max_sites)).unwrap(),
            ),
            3 => (
                InteractionModel::ChiralInfiniteRange {
                    kd: rng.gen_range(0.2..3.0),
                    chi: rng.gen_range(-1.0..1.0),
                },
                LatticeSpec::chain(rng.gen_range(2..=max_sites)).unwrap(),
            ),
            _ => (
                InteractionModel::Exponential { gamma: rng.gen_range(0.0..1.0) },
                LatticeSpec::ring(rng.gen_range(3..=max_sites.max(3))).unwrap(),
            ),
        };
        if model.check_lattice(&lattice).is_ok() {
            return (model, lattice);
        }
    }
}

fn check_spectral_identities(rng: &mut ChaCha8Rng, draws: usize) -> Result<String> {
    for _ in 0..draws {
        let (model, lattice) = random_model_lattice(rng, 10);
        let gamma = build_decoherence(&model, &lattice)?;
        let s = analyze(&gamma)?;
        let n = s.n as f64;
        let sum: f64 = s.eigenvalues.iter().sum();
        let sum2: f64 = s.eigenvalues.iter().map(|v| v * v).sum();
        if (sum - n).abs() > 1e-9 * n {
            return Err(Error::Inconsistency(format!(
                "eigenvalue sum {sum} != {n} for {}",
                model.descriptor()
            )));
        }
        if (sum2 - s.trace_gamma2).abs() > 1e-9 * s.trace_gamma2.max(1.0) {
            return Err(Error::Inconsistency(format!(
                "squared spectrum {sum2} != Frobenius value {} for {}",
                s.trace_gamma2,
                model.descriptor()
            )));
        }
    }
    Ok(format!("{draws} random models consistent"))
}

fn check_closed_spectra(rng: &mut ChaCha8Rng, draws: usize) -> Result<String> {
    let mut hits = 0;
    for _ in 0..draws * 2 {
        let (model, lattice) = random_model_lattice(rng, 24);
        let Some(closed) = closed_form_spectrum(&model, &lattice)? else {
            continue;
        };
        hits += 1;
        let gamma = build_decoherence(&model, &lattice)?;
        let dense = analyze(&gamma)?.eigenvalues;
        for (a, b) in closed.iter().zip(&dense) {
            if (a - b).abs() > 1e-9 * lattice.n_sites() as f64 {
                return Err(Error::Inconsistency(format!(
                    "closed {a} vs dense {b} for {}",
                    model.descriptor()
                )));
            }
        }
    }
    Ok(format!("{hits} closed-form spectra matched"))
}

fn check_single_excitation_average(rng: &mut ChaCha8Rng, draws: usize) -> Result<String> {
    for _ in 0..draws {
        let (model, lattice) = random_model_lattice(rng, 9);
        let gamma = build_decoherence(&model, &lattice)?;
        let s = analyze(&gamma)?;
        let report = report_from_summary(&s);
        let (_, average) = one_jump_rates(&gamma)?;
        let want = s.n as f64 * report.g2;
        if (average - want).abs() > 1e-9 * want.abs().max(1.0) {
            return Err(Error::Inconsistency(format!(
                "single-excitation average {average} != N g2 {want} for {}",
                model.descriptor()
            )));
        }
    }
    Ok(format!("{draws} random models consistent"))
}

fn check_initial_slope(rng: &mut ChaCha8Rng, draws: usize) -> Result<String> {
    let mut done = 0;
    while done < draws {
        let (model, lattice) = random_model_lattice(rng, 6);
        let gamma = build_decoherence(&model, &lattice)?;
        let s = analyze(&gamma)?;
        if !s.is_physical {
            continue;
        }
        done += 1;
        let n = s.n as f64;
        let h = 1e-6;
        let times = [0.0, h, 2.0 * h];
        let trace = lindblad_evolve(&gamma, None, InitialState::FullyExcited, &times)?;
        let slope = (-3.0 * trace.rates[0] + 4.0 * trace.rates[1] - trace.rates[2]) / (2.0 * h);
        let expect = s.trace_gamma2 - 2.0 * n;
        if (slope - expect).abs() > 1e-4 * expect.abs().max(1.0) {
            return Err(Error::Inconsistency(format!(
                "dynamics slope {slope} != moment value {expect} for {}",
                model.descriptor()
            )));
        }
    }
    Ok(format!("{draws} physical models consistent"))
}

fn check_bounds_dominate(rng: &mut ChaCha8Rng, draws: usize) -> Result<String> {
    let mut hits = 0;
    for _ in 0..draws {
        let (model, lattice) = random_model_lattice(rng, 8);
        let gamma = build_decoherence(&model, &lattice)?;
        let bounds = applicable_bounds(&model, &lattice, Some(&gamma))?;
        let exact = bounds
            .iter()
            .find(|b| b.method == crate::bounds::BoundMethod::BruteForce)
            .expect("brute force requested")
            .bound_value;
        for bound in &bounds {
            hits += 1;
            if bound.bound_value < exact - 1e-9 * exact.abs().max(1.0) {
                return Err(Error::Inconsistency(format!(
                    "{:?} bound {} below exact maximum {exact} for {}",
                    bound.method,
                    bound.bound_value,
                    model.descriptor()
                )));
            }
        }
    }
    Ok(format!("{hits} bounds dominated the exact maximum"))
}
