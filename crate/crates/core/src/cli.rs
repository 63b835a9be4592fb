//! Command-line front end: the four subcommands and the files they write.
//!
//! Every output file `X` gets a sibling `X.meta.json` recording the config
//! hash and the run parameters. Nothing time-dependent is written, so reruns are
//! byte-identical.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::contour::{AnnulusDomain, ContourGrid, Region};
use crate::flow::{check_spectrum, symbol_of_q, toda_trajectory, FlowError, FlowSpec, Trajectory};
use crate::jacobi::{m_from_q, validate_m, JacobiCoefficients, JacobiError, MCertificate};
use crate::oracle::{integrate_to_times, isospectral_drift, LatticeState, OracleError};
use crate::symbol::{GroupElement, SymbolError};
use crate::tau::{tau_det_with, PhiPair, TauError};
use crate::toeplitz::{SymbolSolver, ToeplitzError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Verification(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Verification(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Io(_) => "io",
            CliError::Numerical(_) => "numerical",
            CliError::Verification(_) => "verification",
        }
    }

    /// One JSON object on one line.
    pub fn to_line(&self) -> String {
        serde_json::json!({ "error": self.kind(), "exit_code": self.exit_code(), "message": self.to_string() }).to_string()
    }
}

impl From<FlowError> for CliError {
    fn from(e: FlowError) -> Self {
        match e {
            FlowError::Spec(_) => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<TauError> for CliError {
    fn from(e: TauError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<ToeplitzError> for CliError {
    fn from(e: ToeplitzError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<SymbolError> for CliError {
    fn from(e: SymbolError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<JacobiError> for CliError {
    fn from(e: JacobiError) -> Self {
        match e {
            JacobiError::Invalid(_) => CliError::Config(e.to_string()),
            JacobiError::ValidationFail { .. } => CliError::Verification(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Invalid(_) => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "toda-tau", version, about = "Tau functions and the Toda flow on an annular contour")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; overrides `output_dir` in the config.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Evaluate tau for the configured group elements.
    Tau,
    /// Run the flow and write a `t,n,a_n,b_n` trajectory.
    Evolve,
    /// Compare the flow against the lattice integrator.
    Verify,
    /// Build and check the m-function of the configured q.
    Weyl,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Tau => "tau",
            Command::Evolve => "evolve",
            Command::Verify => "verify",
            Command::Weyl => "weyl",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowConfig {
    #[serde(default = "default_p")]
    pub p: Vec<f64>,
    #[serde(default = "default_times")]
    pub times: Vec<f64>,
    #[serde(default = "default_window")]
    pub window: [i64; 2],
}

fn default_p() -> Vec<f64> {
    vec![0.0, 1.0]
}

fn default_times() -> Vec<f64> {
    (0..=10).map(|k| k as f64 * 0.05).collect()
}

fn default_window() -> [i64; 2] {
    [-8, 8]
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self { p: default_p(), times: default_times(), window: default_window() }
    }
}

impl FlowConfig {
    pub fn spec(&self) -> FlowSpec {
        FlowSpec { p: self.p.clone(), times: self.times.clone(), window: self.window }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub tau: f64,
    pub flow: f64,
    pub isospectral: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { tau: 1e-8, flow: 1e-6, isospectral: 1e-4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleConfig {
    pub lattice: i64,
    pub dt: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { lattice: 200, dt: 1e-3 }
    }
}

/// Test hook: add `delta` to the flow's `a_n` at time `t` before comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaultInjection {
    pub t: f64,
    pub n: i64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_lambda0")]
    pub lambda0: f64,
    #[serde(default = "default_radius")]
    pub radius: f64,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    #[serde(default = "default_truncation")]
    pub truncation: usize,
    #[serde(default)]
    pub q: Option<JacobiCoefficients>,
    #[serde(default)]
    pub q_path: Option<PathBuf>,
    #[serde(default)]
    pub flow: FlowConfig,
    #[serde(default)]
    pub group_elements: Vec<GroupElement>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub oracle: OracleConfig,
    /// Points `[re, im]` where the m-function is reported.
    #[serde(default)]
    pub weyl_points: Vec<[f64; 2]>,
    #[serde(default = "default_weyl_samples")]
    pub weyl_samples: usize,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub fault_injection: Option<FaultInjection>,
}

fn default_lambda0() -> f64 {
    AnnulusDomain::DEFAULT_LAMBDA0
}

fn default_radius() -> f64 {
    AnnulusDomain::DEFAULT_RADIUS
}

fn default_grid_points() -> usize {
    AnnulusDomain::DEFAULT_M
}

fn default_truncation() -> usize {
    AnnulusDomain::DEFAULT_N
}

fn default_weyl_samples() -> usize {
    200
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("empty config has defaults")
    }
}

/// A validated configuration with everything it refers to loaded.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub config: RunConfig,
    pub hash: String,
    pub domain: AnnulusDomain,
    pub q: JacobiCoefficients,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
    }

    /// Loads a config file; relative `q_path` is taken from the config's directory.
    pub fn load(path: &Path) -> Result<Prepared, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let config = Self::parse(&text)?;
        config.prepare(&text, path.parent())
    }

    pub fn prepare(self, raw: &str, base: Option<&Path>) -> Result<Prepared, CliError> {
        let domain = AnnulusDomain::new(self.lambda0, self.radius, self.grid_points, self.truncation)
            .map_err(|e| CliError::Config(e.to_string()))?;
        let q = match (&self.q, &self.q_path) {
            (Some(_), Some(_)) => return Err(CliError::Config("give q or q_path, not both".into())),
            (Some(q), None) => q.clone(),
            (None, Some(p)) => {
                let p = match base {
                    Some(b) if p.is_relative() => b.join(p),
                    _ => p.clone(),
                };
                let text = fs::read_to_string(&p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
                serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
            }
            (None, None) => JacobiCoefficients::free(),
        };
        q.validate()?;
        check_spectrum(&q.window(q.n_min - 8, q.n_max + 8), self.lambda0)
            .map_err(|e| CliError::Config(format!("q: {e}")))?;
        self.flow.spec().validate()?;
        let [lo, hi] = self.flow.window;
        let support = self.truncation as i64;
        if lo.abs().max(hi.abs()) > support {
            return Err(CliError::Config(format!(
                "window [{lo}, {hi}] exceeds the truncation support |n| <= {support}"
            )));
        }
        if self.oracle.lattice < 100 || hi.abs().max(lo.abs()) + 10 > self.oracle.lattice / 2 {
            return Err(CliError::Config(format!(
                "oracle lattice {} too small for window [{lo}, {hi}]",
                self.oracle.lattice
            )));
        }
        if !(self.oracle.dt > 0.0 && self.oracle.dt <= 1e-2) {
            return Err(CliError::Config(format!("oracle dt = {} outside (0, 0.01]", self.oracle.dt)));
        }
        let t = &self.tolerances;
        if [t.tau, t.flow, t.isospectral].iter().any(|v| !(*v > 0.0)) {
            return Err(CliError::Config("tolerances must be positive".into()));
        }
        for (i, g) in self.group_elements.iter().enumerate() {
            g.validate(&domain).map_err(|e| CliError::Config(format!("group_elements[{i}]: {e}")))?;
        }
        let hash = hex::encode(Sha256::digest(raw.as_bytes()));
        Ok(Prepared { config: self, hash, domain, q })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Meta {
    pub command: &'static str,
    pub config_sha256: String,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub lambda0: f64,
    pub radius: f64,
    pub grid_points: usize,
    pub truncation: usize,
    pub version: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TauEntry {
    pub index: usize,
    pub g: GroupElement,
    pub det: [f64; 2],
    pub closed: Option<[f64; 2]>,
    pub discrepancy: Option<f64>,
    pub condition: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TauReport {
    pub entries: Vec<TauEntry>,
    pub max_discrepancy: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvolveReport {
    pub rows: usize,
    pub min_tau: f64,
    pub max_condition: f64,
    pub csv: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeDiscrepancy {
    pub t: f64,
    pub max_error: f64,
    pub worst_n: i64,
    pub min_tau: f64,
    pub tau_positive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Localized {
    pub t: f64,
    pub n: i64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub per_time: Vec<TimeDiscrepancy>,
    pub max_error: f64,
    pub isospectral_drift: f64,
    pub first_failure: Option<Localized>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeylPoint {
    pub z: [f64; 2],
    pub m_weyl: [f64; 2],
    /// Absent inside the annulus, where the symbol route has no value.
    pub m_symbol: Option<[f64; 2]>,
    pub discrepancy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeylReport {
    pub certificate: MCertificate,
    pub points: Vec<WeylPoint>,
    pub max_discrepancy: f64,
    pub pass: bool,
}

fn pair(c: C64) -> [f64; 2] {
    [c.re, c.im]
}

/// Closed form when `g` is `q_ζ` or `q_ζ₁ q_ζ₂`.
fn closed_form(pair: &PhiPair<'_>, g: &GroupElement) -> Result<Option<C64>, TauError> {
    if !g.zeros.is_empty() || !g.exponent.is_empty() {
        return Ok(None);
    }
    let one = C64::new(1.0, 0.0);
    let q_scale = |z: C64| if z == C64::new(0.0, 0.0) { one } else { -z };
    match g.poles.as_slice() {
        [z] if (g.scale - q_scale(*z)).norm() < 1e-14 * g.scale.norm().max(1.0) => pair.tau_qzeta(*z).map(Some),
        [z1, z2] if (g.scale - q_scale(*z1) * q_scale(*z2)).norm() < 1e-14 * g.scale.norm().max(1.0) => {
            pair.tau_q2(*z1, *z2).map(Some)
        }
        _ => Ok(None),
    }
}

pub fn cmd_tau(p: &Prepared) -> Result<TauReport, CliError> {
    if p.config.group_elements.is_empty() {
        return Err(CliError::Config("tau needs a non-empty group_elements list".into()));
    }
    let grid = ContourGrid::new(p.domain);
    let base = symbol_of_q(&grid, &p.q)?;
    let solver = SymbolSolver::new(&grid, &base)?;
    let phis = PhiPair::new(&grid, &base)?;
    let mut entries = Vec::new();
    let mut worst: f64 = 0.0;
    for (index, g) in p.config.group_elements.iter().enumerate() {
        let det = tau_det_with(&solver, g)?;
        let closed = closed_form(&phis, g)?;
        let discrepancy = closed.map(|c| (det.value - c).norm() / det.value.norm().max(1e-300));
        if let Some(d) = discrepancy {
            worst = worst.max(d);
        }
        entries.push(TauEntry {
            index,
            g: g.clone(),
            det: pair(det.value),
            closed: closed.map(pair),
            discrepancy,
            condition: det.condition,
        });
    }
    let tolerance = p.config.tolerances.tau;
    Ok(TauReport { entries, max_discrepancy: worst, tolerance, pass: worst <= tolerance })
}

/// Rows `t,n,a_n,b_n` with 17 significant digits.
pub fn trajectory_csv(traj: &Trajectory, window: [i64; 2]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(["t", "n", "a_n", "b_n"]).map_err(io)?;
    for pt in &traj.points {
        for n in window[0]..=window[1] {
            w.write_record([
                format!("{:.16e}", pt.t),
                n.to_string(),
                format!("{:.16e}", pt.q.a(n)),
                format!("{:.16e}", pt.q.b(n)),
            ])
            .map_err(io)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
}

pub fn cmd_evolve(p: &Prepared, out: &Path) -> Result<(EvolveReport, String), CliError> {
    let grid = ContourGrid::new(p.domain);
    let spec = p.config.flow.spec();
    let traj = toda_trajectory(&grid, &p.q, &spec)?;
    let csv = trajectory_csv(&traj, spec.window)?;
    let rows = traj.points.len() * (spec.window[1] - spec.window[0] + 1) as usize;
    let report =
        EvolveReport { rows, min_tau: traj.min_tau(), max_condition: traj.max_condition(), csv: out.join("trajectory.csv") };
    Ok((report, csv))
}

pub fn cmd_verify(p: &Prepared) -> Result<VerifyReport, CliError> {
    let grid = ContourGrid::new(p.domain);
    let spec = p.config.flow.spec();
    let mut traj = toda_trajectory(&grid, &p.q, &spec)?;
    if let Some(f) = p.config.fault_injection {
        let pt = traj
            .points
            .iter_mut()
            .find(|pt| (pt.t - f.t).abs() < 1e-12)
            .ok_or_else(|| CliError::Config(format!("fault_injection time {} is not a flow time", f.t)))?;
        if f.n < pt.q.n_min || f.n > pt.q.n_max {
            return Err(CliError::Config(format!("fault_injection site {} is outside the window", f.n)));
        }
        pt.q.a[(f.n - pt.q.n_min) as usize] += f.delta;
    }
    let s0 = LatticeState::from_coefficients(&p.q, p.config.oracle.lattice);
    let mut order: Vec<f64> = spec.times.clone();
    order.sort_by(|a, b| a.total_cmp(b));
    let snaps = integrate_to_times(&s0, &order, p.config.oracle.dt)?;
    let tol = p.config.tolerances;
    let mut per_time = Vec::new();
    let mut first_failure = None;
    let mut max_error: f64 = 0.0;
    for pt in &traj.points {
        let k = order.iter().position(|&t| t == pt.t).expect("time present");
        let o = &snaps[k];
        let (mut err, mut worst_n) = (0.0, spec.window[0]);
        for n in spec.window[0]..=spec.window[1] {
            let e = (pt.q.a(n) - o.a(n)).abs() + (pt.q.b(n) - o.b(n)).abs();
            if e > err {
                err = e;
                worst_n = n;
            }
        }
        if err > tol.flow && first_failure.is_none() {
            first_failure = Some(Localized { t: pt.t, n: worst_n, error: err });
        }
        max_error = max_error.max(err);
        let min_tau = pt.diagnostics.min_tau;
        per_time.push(TimeDiscrepancy { t: pt.t, max_error: err, worst_n, min_tau, tau_positive: min_tau > 0.0 });
    }
    let drift = isospectral_drift(&snaps);
    let pass = first_failure.is_none() && drift <= tol.isospectral && per_time.iter().all(|d| d.tau_positive);
    Ok(VerifyReport { per_time, max_error, isospectral_drift: drift, first_failure, pass })
}

pub fn cmd_weyl(p: &Prepared, seed: u64) -> Result<WeylReport, CliError> {
    let m = m_from_q(&p.q)?;
    let certificate = validate_m(&m, p.config.weyl_samples, seed)?;
    let grid = ContourGrid::new(p.domain);
    let base = symbol_of_q(&grid, &p.q)?;
    let phis = PhiPair::new(&grid, &base)?;
    let mut points = Vec::new();
    let mut worst: f64 = 0.0;
    for &[re, im] in &p.config.weyl_points {
        let z = C64::new(re, im);
        if p.domain.on_sigma(z, 1e-9) {
            return Err(CliError::Config(format!("weyl point {z} lies on the contour")));
        }
        let mw = m.eval(z)?;
        let ms = match p.domain.region(z) {
            Region::Plus | Region::NearContour => None,
            _ => Some(phis.mfun(z)?),
        };
        let d = ms.map(|ms| (mw - ms).norm());
        worst = worst.max(d.unwrap_or(0.0));
        points.push(WeylPoint { z: [re, im], m_weyl: pair(mw), m_symbol: ms.map(pair), discrepancy: d });
    }
    let pass = worst <= p.config.tolerances.tau.max(1e-8);
    Ok(WeylReport { certificate, points, max_discrepancy: worst, pass })
}

fn write_with_meta(out: &Path, name: &str, body: &str, meta: &Meta) -> Result<PathBuf, CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", out.display()));
    fs::create_dir_all(out).map_err(io)?;
    let path = out.join(name);
    fs::write(&path, body).map_err(io)?;
    let meta_text = serde_json::to_string_pretty(meta).map_err(|e| CliError::Io(e.to_string()))?;
    fs::write(out.join(format!("{name}.meta.json")), meta_text + "\n").map_err(io)?;
    Ok(path)
}

fn to_json<T: Serialize>(v: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(v).map(|s| s + "\n").map_err(|e| CliError::Io(e.to_string()))
}

/// Runs one subcommand and returns the report text printed on success.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    let path = cli.config.as_deref().ok_or_else(|| CliError::Config("--config PATH is required".into()))?;
    let prepared = RunConfig::load(path)?;
    let out = cli
        .out
        .clone()
        .or_else(|| prepared.config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    let c = &prepared.config;
    let meta = Meta {
        command: cli.command.name(),
        config_sha256: prepared.hash.clone(),
        seed: cli.seed,
        tolerances: c.tolerances,
        lambda0: c.lambda0,
        radius: c.radius,
        grid_points: c.grid_points,
        truncation: c.truncation,
        version: env!("CARGO_PKG_VERSION"),
    };
    match cli.command {
        Command::Tau => {
            let r = cmd_tau(&prepared)?;
            let text = to_json(&r)?;
            write_with_meta(&out, "tau.json", &text, &meta)?;
            if !r.pass {
                return Err(CliError::Verification(format!(
                    "tau discrepancy {:.3e} exceeds {:.1e}",
                    r.max_discrepancy, r.tolerance
                )));
            }
            Ok(text)
        }
        Command::Evolve => {
            let (r, csv) = cmd_evolve(&prepared, &out)?;
            write_with_meta(&out, "trajectory.csv", &csv, &meta)?;
            let text = to_json(&r)?;
            write_with_meta(&out, "evolve.json", &text, &meta)?;
            Ok(text)
        }
        Command::Verify => {
            let r = cmd_verify(&prepared)?;
            let text = to_json(&r)?;
            write_with_meta(&out, "verify.json", &text, &meta)?;
            if !r.pass {
                let msg = match &r.first_failure {
                    Some(f) => format!("flow and oracle differ by {:.3e} at t = {}, n = {}", f.error, f.t, f.n),
                    None => format!("isospectral drift {:.3e} or tau positivity failed", r.isospectral_drift),
                };
                return Err(CliError::Verification(msg));
            }
            Ok(text)
        }
        Command::Weyl => {
            let r = cmd_weyl(&prepared, cli.seed)?;
            let text = to_json(&r)?;
            write_with_meta(&out, "weyl.json", &text, &meta)?;
            if !r.pass {
                return Err(CliError::Verification(format!("m-function routes differ by {:.3e}", r.max_discrepancy)));
            }
            Ok(text)
        }
    }
}

/// Runs the command line in `args` and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            print!("{e}");
            return 0;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            eprintln!("{}", CliError::Config(first.trim_start_matches("error: ").to_string()).to_line());
            return 2;
        }
    };
    match run(&cli) {
        Ok(text) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("{}", e.to_line());
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_unknown_keys() {
        let c = RunConfig::default();
        assert_eq!(c.grid_points, 256);
        assert_eq!(c.flow.window, [-8, 8]);
        assert_eq!(c.flow.times.len(), 11);
        assert!(matches!(RunConfig::parse(r#"{"lamda0": 2.5}"#), Err(CliError::Config(_))));
    }

    #[test]
    fn validation_errors_are_config_errors() {
        let bad = [
            r#"{"lambda0": 1.5}"#,
            r#"{"flow": {"window": [-70, 8]}}"#,
            r#"{"q": {"n_min": 0, "n_max": 1, "a": [1.0], "b": [0.0, 0.0]}}"#,
            r#"{"q": {"n_min": 0, "n_max": 0, "a": [1.0], "b": [3.0]}}"#,
            r#"{"tolerances": {"flow": 0.0}}"#,
            r#"{"group_elements": [{"poles": [[3.0, 0.0]]}]}"#,
        ];
        for text in bad {
            let c = RunConfig::parse(text).unwrap();
            let e = c.prepare(text, None).unwrap_err();
            assert_eq!(e.exit_code(), 2, "{text}: {e}");
        }
    }

    #[test]
    fn hash_tracks_raw_text() {
        let a = RunConfig::parse("{}").unwrap().prepare("{}", None).unwrap();
        let b = RunConfig::parse("{ }").unwrap().prepare("{ }", None).unwrap();
        assert_eq!(a.hash.len(), 64);
        assert_ne!(a.hash, b.hash);
    }

    #[test]
    fn error_line_is_json() {
        let e = CliError::Numerical("T is singular\nsecond".replace('\n', " "));
        let v: serde_json::Value = serde_json::from_str(&e.to_line()).unwrap();
        assert_eq!(v["exit_code"], 3);
        assert!(!e.to_line().contains('\n'));
    }
}
