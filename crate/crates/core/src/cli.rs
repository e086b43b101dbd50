//! Experiment runner behind the `umm-edge` binary.
//!
//! A run reads a JSON config, executes one command and writes `summary.json` plus
//! CSV tables into its output directory. Exit codes: 0 success, 1 invalid input,
//! 2 numerical failure.

use crate::airy::AiryConstants;
use crate::cmv;
use crate::edgelab::{self, EdgeModel};
use crate::equilibrium::{self, Potential, PotentialFamily};
use crate::fredholm;
use crate::opuc::{self, cache};
use crate::sampler::{self, ChainConfig};
use crate::{Complex64, Error, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Equilibrium,
    Verblunsky,
    Kernel,
    EdgeStudy,
    Fredholm,
    Sample,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Equilibrium => "equilibrium",
            Command::Verblunsky => "verblunsky",
            Command::Kernel => "kernel",
            Command::EdgeStudy => "edge-study",
            Command::Fredholm => "fredholm",
            Command::Sample => "sample",
        }
    }
}

/// A real number given either as a JSON number or as a decimal string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Decimal {
    Number(f64),
    Text(String),
}

impl Decimal {
    pub fn value(&self, field: &str) -> Result<f64> {
        match self {
            Decimal::Number(x) => Ok(*x),
            Decimal::Text(s) => f64::from_str(s.trim())
                .map_err(|_| Error::validation(field, format!("'{s}' is not a decimal number"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    pub family: PotentialFamily,
    /// `c_0, c_1, …` of `V(x) = Σ c_k x^k`.
    pub coeffs: Vec<Decimal>,
}

impl PotentialSpec {
    pub fn build(&self) -> Result<Potential> {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.value(&format!("potential.coeffs[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        Potential::new(self.family, coeffs)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

/// Parsed experiment configuration.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Option<Command>,
    pub potential: Option<PotentialSpec>,
    pub n: Option<usize>,
    pub n_list: Option<Vec<usize>>,
    pub precision_bits: Option<u32>,
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
    pub grid: Option<GridSpec>,
    /// Intervals of `Δ` for `fredholm`.
    pub delta: Option<Vec<[f64; 2]>>,
    pub order: Option<usize>,
    /// `[Re ζ, Im ζ]` for the resolvent diagnostics in `verblunsky`.
    pub zeta: Option<[f64; 2]>,
    pub sweeps: Option<usize>,
    pub burn_in: Option<usize>,
    pub bins: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    fn potential(&self) -> Result<Potential> {
        self.potential
            .as_ref()
            .ok_or_else(|| Error::validation("potential", "required field is missing"))?
            .build()
    }

    fn n(&self) -> Result<usize> {
        let n = self.n.ok_or_else(|| Error::validation("n", "required field is missing"))?;
        if n < 4 {
            return Err(Error::validation("n", "must be at least 4"));
        }
        Ok(n)
    }

    fn n_list(&self) -> Result<Vec<usize>> {
        let ns = self
            .n_list
            .clone()
            .ok_or_else(|| Error::validation("n_list", "required field is missing"))?;
        if ns.is_empty() || ns.iter().any(|&n| n < 4) {
            return Err(Error::validation("n_list", "entries must be at least 4"));
        }
        Ok(ns)
    }

    /// Checks the fields each command requires.
    pub fn validate(&self, command: Command) -> Result<()> {
        if let Some(c) = self.command {
            if c != command {
                return Err(Error::validation(
                    "command",
                    format!("config is for '{}', invoked as '{}'", c.name(), command.name()),
                ));
            }
        }
        self.potential()?;
        match command {
            Command::Equilibrium => {}
            Command::Verblunsky | Command::Kernel => {
                self.n()?;
            }
            Command::EdgeStudy => {
                self.n_list()?;
            }
            Command::Fredholm => {
                if self.delta.is_none() {
                    return Err(Error::validation("delta", "required field is missing"));
                }
                if let Some(n) = self.n {
                    if n < 4 {
                        return Err(Error::validation("n", "must be at least 4"));
                    }
                }
            }
            Command::Sample => {
                self.n()?;
                if self.seed.is_none() {
                    return Err(Error::validation("seed", "required field is missing"));
                }
            }
        }
        if let Some(p) = self.precision_bits {
            if p < 128 {
                return Err(Error::validation("precision_bits", "must be at least 128"));
            }
        }
        Ok(())
    }
}

/// Command-line overrides.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub precision_bits: Option<u32>,
    pub seed: Option<u64>,
}

/// Writes `bytes` to a temporary sibling and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// CSV text from a header and rows of already formatted fields.
pub fn csv_text(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(r).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Numerical(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Numerical(e.to_string()))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Numerical(format!("csv: {e}"))
}

fn f(x: f64) -> String {
    format!("{x:e}")
}

struct Output {
    dir: PathBuf,
}

impl Output {
    fn csv(&self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        write_atomic(&self.dir.join(name), csv_text(header, rows)?.as_bytes())
    }

    fn summary(&self, v: &Value) -> Result<()> {
        let mut s = serde_json::to_string_pretty(v)?;
        s.push('\n');
        write_atomic(&self.dir.join("summary.json"), s.as_bytes())
    }
}

fn cache_dir() -> Option<PathBuf> {
    std::env::var_os(cache::CACHE_ENV).map(PathBuf::from)
}

/// Executes one command; returns the summary that was written.
pub fn execute(command: Command, cfg: &ExperimentConfig, ov: &Overrides) -> Result<Value> {
    let mut cfg = cfg.clone();
    if ov.precision_bits.is_some() {
        cfg.precision_bits = ov.precision_bits;
    }
    if ov.seed.is_some() {
        cfg.seed = ov.seed;
    }
    cfg.validate(command)?;
    let dir = ov
        .out
        .clone()
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from("umm-edge-out").join(command.name()));
    std::fs::create_dir_all(&dir)?;
    let out = Output { dir };
    let pot = cfg.potential()?;
    let cache = cache_dir();
    let summary = match command {
        Command::Equilibrium => run_equilibrium(&pot, &out)?,
        Command::Verblunsky => run_verblunsky(&pot, &cfg, cache.as_deref(), &out)?,
        Command::Kernel => run_kernel(&pot, &cfg, cache.as_deref(), &out)?,
        Command::EdgeStudy => run_edge_study(&pot, &cfg, cache.as_deref(), &out)?,
        Command::Fredholm => run_fredholm(&pot, &cfg, cache.as_deref(), &out)?,
        Command::Sample => run_sample(&pot, &cfg, &out)?,
    };
    out.summary(&summary)?;
    Ok(summary)
}

fn run_equilibrium(pot: &Potential, out: &Output) -> Result<Value> {
    let eq = equilibrium::solve_support(pot, edgelab::SUPPORT_TOL)?;
    let ec = equilibrium::edge_constants(&eq)?;
    let m = 201;
    let rows: Vec<Vec<String>> = (0..m)
        .map(|i| {
            let l = -eq.theta + 2.0 * eq.theta * i as f64 / (m - 1) as f64;
            vec![f(l), f(eq.density(l))]
        })
        .collect();
    out.csv("density.csv", &["lambda", "rho"], &rows)?;
    Ok(json!({
        "command": "equilibrium",
        "theta": ec.theta,
        "p_at_edge": ec.p_at_edge,
        "p_theta": ec.p_theta,
        "gamma": ec.gamma,
        "a": ec.a,
        "b": ec.b,
        "a_operator": ec.a_operator,
        "edge_scale": ec.edge_scale,
        "gamma_a_b2_defect": ec.consistency_defect(),
        "normalization_residual": eq.normalization_residual,
    }))
}

fn run_verblunsky(pot: &Potential, cfg: &ExperimentConfig, cache: Option<&Path>, out: &Output) -> Result<Value> {
    let n = cfg.n()?;
    let eq = equilibrium::solve_support(pot, edgelab::SUPPORT_TOL)?;
    let ec = equilibrium::edge_constants(&eq)?;
    let m = opuc::cmv_truncation(n);
    let (w, vseq) = opuc::build_sequence(pot, n, m, cfg.precision_bits, cache)?;
    let rows: Vec<Vec<String>> = (1..=vseq.len())
        .map(|j| vec![j.to_string(), f(vseq.cmv_alpha(j).to_f64()), f(vseq.cmv_rho(j).to_f64())])
        .collect();
    out.csv("verblunsky.csv", &["j", "alpha", "rho"], &rows)?;
    let report = opuc::verblunsky_asymptotic_report(&vseq, &ec, n)?;
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| vec![r.k.to_string(), f(r.alpha), f(r.predicted), f(r.deviation)])
        .collect();
    out.csv("edge_window.csv", &["k", "alpha", "predicted", "deviation"], &rows)?;
    let c = cmv::assemble(&vseq, vseq.len())?;
    let interior = 2..vseq.len().saturating_sub(2);
    let unitarity = cmv::unitarity_residual(&c, interior);
    let zeta = cfg.zeta.map(|z| Complex64::new(z[0], z[1])).unwrap_or(Complex64::new(0.0, 1.0));
    let kmax = (n as f64).cbrt().floor() as i64;
    let rot = cmv::rotated_minus(&vseq, &ec, n, zeta, kmax as usize + 1)?;
    let constants = AiryConstants::new(ec.a_operator, ec.b)?;
    let d = cmv::approx_resolvent_residual(&rot, constants, kmax)?;
    Ok(json!({
        "command": "verblunsky",
        "n": n,
        "precision_bits": w.prec(),
        "coefficients": vseq.len(),
        "global_sign": report.sign,
        "edge_max_deviation": report.max_deviation,
        "unitarity_residual": unitarity,
        "zeta": [zeta.re, zeta.im],
        "d_residual_max_norm": d.max_norm,
    }))
}

fn run_kernel(pot: &Potential, cfg: &ExperimentConfig, cache: Option<&Path>, out: &Output) -> Result<Value> {
    let n = cfg.n()?;
    let model = EdgeModel::build(pot, n, cfg.precision_bits, cache)?;
    let g = cfg.grid.clone().unwrap_or(GridSpec { lo: -2.0, hi: 2.0, count: 9 });
    let grid = edgelab::uniform_grid(g.lo, g.hi, g.count);
    let k = model.rescaled_matrix(&grid)?;
    let mut rows = Vec::new();
    for i in 0..grid.len() {
        for j in 0..grid.len() {
            let lim = edgelab::limit_kernel(&model.ec, grid[i], grid[j])?;
            rows.push(vec![f(grid[i]), f(grid[j]), f(k[(i, j)]), f(lim)]);
        }
    }
    out.csv("kernel.csv", &["x", "y", "kn_value", "limit_value"], &rows)?;
    let trace = kernel_trace(&model.ke)?;
    Ok(json!({
        "command": "kernel",
        "n": n,
        "precision_bits": model.ke.weight.prec(),
        "theta": model.ec.theta,
        "edge_scale": model.ec.edge_scale,
        "window": model.window(),
        "normalized_trace": trace,
    }))
}

/// `n⁻¹ ∫ K_n(λ, λ) dλ` by the trapezoid rule, exact for the trigonometric polynomial part.
pub fn kernel_trace(ke: &opuc::KernelEvaluator) -> Result<f64> {
    let mut prev = f64::NAN;
    let mut count = 8 * ke.m + 64;
    for _ in 0..6 {
        let h = 2.0 * std::f64::consts::PI / count as f64;
        let s: f64 = (0..count)
            .map(|i| ke.kernel(-std::f64::consts::PI + h * i as f64, -std::f64::consts::PI + h * i as f64).re)
            .sum();
        let v = s * h / ke.m as f64;
        if (v - prev).abs() < 1e-14 {
            return Ok(v);
        }
        prev = v;
        count *= 2;
    }
    Err(Error::Numerical("kernel trace did not converge".into()))
}

fn run_edge_study(pot: &Potential, cfg: &ExperimentConfig, cache: Option<&Path>, out: &Output) -> Result<Value> {
    let ns = cfg.n_list()?;
    let g = cfg.grid.clone().unwrap_or(GridSpec { lo: -2.0, hi: 2.0, count: 9 });
    let grid = edgelab::uniform_grid(g.lo, g.hi, g.count);
    let table = edgelab::convergence_study(pot, &ns, &grid, cfg.precision_bits, cache)?;
    let rows: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|r| vec![r.n.to_string(), f(r.x), f(r.y), f(r.kn_value), f(r.limit_value), f(r.abs_err)])
        .collect();
    out.csv("convergence.csv", &["n", "x", "y", "kn_value", "limit_value", "abs_err"], &rows)?;
    Ok(json!({
        "command": "edge-study",
        "n_list": ns,
        "sup_errors": table.sup_errors,
        "origin_relative_errors": table.origin_errors,
        "fitted_exponent": table.exponent,
        "sup_strictly_decreasing": table.sup_strictly_decreasing(),
    }))
}

fn run_fredholm(pot: &Potential, cfg: &ExperimentConfig, cache: Option<&Path>, out: &Output) -> Result<Value> {
    let delta: Vec<(f64, f64)> = cfg.delta.clone().unwrap_or_default().iter().map(|d| (d[0], d[1])).collect();
    let order = cfg.order.unwrap_or(40);
    if order < 8 {
        return Err(Error::validation("order", "must be at least 8"));
    }
    let limit = fredholm::airy_gap_refined(&delta, order)?;
    let mut summary = json!({
        "command": "fredholm",
        "delta": cfg.delta,
        "order": limit.order,
        "value": limit.value,
        "refinement_delta": limit.refinement_delta,
    });
    let mut rows = vec![vec!["limit".to_string(), limit.order.to_string(), f(limit.value), f(limit.refinement_delta)]];
    if let Some(n) = cfg.n {
        let model = EdgeModel::build(pot, n, cfg.precision_bits, cache)?;
        let e = fredholm::finite_n_hole(&model.ke, &model.eq, &model.ec, &delta, n, order)?;
        rows.push(vec![format!("n={n}"), e.order.to_string(), f(e.value), f(e.refinement_delta)]);
        summary["finite_n"] = json!({
            "n": n,
            "order": e.order,
            "value": e.value,
            "refinement_delta": e.refinement_delta,
            "difference_from_limit": (e.value - limit.value).abs(),
        });
    }
    out.csv("gap.csv", &["kernel", "order", "value", "refinement_delta"], &rows)?;
    Ok(summary)
}

fn run_sample(pot: &Potential, cfg: &ExperimentConfig, out: &Output) -> Result<Value> {
    let n = cfg.n()?;
    let sweeps = cfg.sweeps.unwrap_or(100_000);
    let burn_in = cfg.burn_in.unwrap_or(2_000);
    let chain = ChainConfig {
        n,
        pot: pot.clone(),
        steps: burn_in + sweeps,
        burn_in,
        proposal_width: 0.5,
        seed: cfg.seed.unwrap_or(0),
    };
    let sample = sampler::metropolis_run(&chain)?;
    let mut text = String::new();
    let header: Vec<String> = std::iter::once("sweep".to_string())
        .chain((1..=n).map(|j| format!("lambda_{j}")))
        .collect();
    let _ = writeln!(text, "{}", header.join(","));
    for (s, c) in sample.configurations.iter().enumerate() {
        let fields: Vec<String> = c.iter().map(|&x| f(x)).collect();
        let _ = writeln!(text, "{},{}", s, fields.join(","));
    }
    write_atomic(&out.dir.join("samples.csv"), text.as_bytes())?;
    let eq = equilibrium::solve_support(pot, edgelab::SUPPORT_TOL)?;
    let ec = equilibrium::edge_constants(&eq)?;
    let bins = cfg.bins.unwrap_or(sampler::DEFAULT_BINS);
    let ncm = sampler::ncm_compare(&sample, &eq, bins)?;
    let cdf = sampler::edge_fluctuation(&sample, &eq, &ec)?;
    let grid = edgelab::uniform_grid(-6.0, 4.0, 101);
    let limit = sampler::limit_cdf(&grid, 48)?;
    let emp: Vec<f64> = grid.iter().map(|&s| cdf.eval(s)).collect();
    Ok(json!({
        "command": "sample",
        "n": n,
        "seed": chain.seed,
        "retained": sample.configurations.len(),
        "acceptance_rate": sample.acceptance_rate,
        "proposal_width": sample.proposal_width,
        "histogram": {
            "edges": ncm.edges,
            "empirical": ncm.empirical,
            "predicted": ncm.predicted,
            "inside": ncm.inside,
            "sup_deviation": ncm.sup_deviation,
            "outside_max_mass": ncm.outside_max_mass,
        },
        "edge_cdf": {
            "grid": grid,
            "empirical": emp,
            "limit": limit,
            "kolmogorov_distance": cdf.kolmogorov_distance(&grid, &limit),
            "median": cdf.median(),
        },
    }))
}

/// Maps an error to its exit code and machine-readable description.
pub fn error_report(e: &Error) -> (i32, Value) {
    let code = if e.is_validation() { 1 } else { 2 };
    let mut v = json!({
        "error": if code == 1 { "validation" } else { "numerical" },
        "message": e.to_string(),
    });
    if let Error::Validation { field, .. } = e {
        v["field"] = json!(field);
    }
    (code, v)
}

/// Reads the config at `path`, runs `command` and returns the exit code.
pub fn run(command: Command, path: &Path, ov: &Overrides) -> i32 {
    let result = std::fs::read_to_string(path)
        .map_err(|e| Error::validation("config", format!("{}: {e}", path.display())))
        .and_then(|t| ExperimentConfig::from_json(&t))
        .and_then(|cfg| execute(command, &cfg, ov));
    match result {
        Ok(_) => 0,
        Err(e) => {
            let (code, v) = error_report(&e);
            eprintln!("{v}");
            code
        }
    }
}
