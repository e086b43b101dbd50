//! Metropolis sampling of the eigenvalue angles with joint density
//! `∝ ∏_{j<k} |e^{iλ_j} − e^{iλ_k}|² exp(−n Σ V(cos λ_j))`.

use crate::equilibrium::{EdgeConstants, EquilibriumData, Potential};
use crate::fredholm;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;

/// Minimum number of retained configurations for the statistics below.
pub const MIN_CONFIGURATIONS: usize = 1000;

/// Default number of histogram bins on `[−π, π)`.
pub const DEFAULT_BINS: usize = 16;

/// Chain parameters. `steps` and `burn_in` count sweeps of `n` single-site updates;
/// one configuration is kept per sweep after burn-in.
#[derive(Clone, Debug)]
pub struct ChainConfig {
    pub n: usize,
    pub pot: Potential,
    pub steps: usize,
    pub burn_in: usize,
    pub proposal_width: f64,
    pub seed: u64,
}

impl ChainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::validation("n", "must be at least 2"));
        }
        if self.steps <= self.burn_in {
            return Err(Error::validation("steps", "must exceed burn_in"));
        }
        if !(self.proposal_width > 0.0 && self.proposal_width < PI) {
            return Err(Error::validation("proposal_width", "must lie in (0, π)"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenvalueSample {
    pub n: usize,
    /// Sorted angles of each retained configuration.
    pub configurations: Vec<Vec<f64>>,
    pub acceptance_rate: f64,
    pub proposal_width: f64,
}

/// Maps an angle to `[−π, π)`.
pub fn wrap(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y >= PI {
        -PI
    } else {
        y
    }
}

/// `log |e^{ia} − e^{ib}|`.
fn log_chord(a: f64, b: f64) -> f64 {
    (2.0 * (0.5 * (a - b)).sin().abs()).ln()
}

/// Log of the unnormalized joint density; `−∞` on collisions.
pub fn log_density(pot: &Potential, n: usize, lambda: &[f64]) -> f64 {
    let mut s = 0.0;
    for j in 0..lambda.len() {
        for k in j + 1..lambda.len() {
            s += 2.0 * log_chord(lambda[j], lambda[k]);
        }
    }
    let v: f64 = lambda.iter().map(|l| pot.value(l.cos())).sum();
    s - n as f64 * v
}

fn site_log_density(pot: &Potential, n: usize, lambda: &[f64], j: usize, x: f64) -> f64 {
    let mut s = 0.0;
    for (k, &l) in lambda.iter().enumerate() {
        if k != j {
            s += 2.0 * log_chord(x, l);
        }
    }
    s - n as f64 * pot.value(x.cos())
}

const TUNE_EVERY: usize = 20;

/// Single-site random-walk Metropolis on the circle.
pub fn metropolis_run(cfg: &ChainConfig) -> Result<EigenvalueSample> {
    cfg.validate()?;
    let n = cfg.n;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut lambda: Vec<f64> = (0..n).map(|j| -PI + 2.0 * PI * (j as f64 + 0.5) / n as f64).collect();
    let mut width = cfg.proposal_width;
    let mut configurations = Vec::with_capacity(cfg.steps - cfg.burn_in);
    let (mut acc_window, mut tot_window) = (0usize, 0usize);
    let (mut accepted, mut total) = (0usize, 0usize);
    for sweep in 0..cfg.steps {
        for _ in 0..n {
            let j = rng.gen_range(0..n);
            let x = wrap(lambda[j] + width * rng.gen_range(-1.0..1.0));
            let delta = site_log_density(&cfg.pot, n, &lambda, j, x)
                - site_log_density(&cfg.pot, n, &lambda, j, lambda[j]);
            let u: f64 = rng.gen();
            let ok = delta >= 0.0 || u.ln() < delta;
            if ok {
                lambda[j] = x;
            }
            if sweep < cfg.burn_in {
                acc_window += ok as usize;
                tot_window += 1;
            } else {
                accepted += ok as usize;
                total += 1;
            }
        }
        if sweep < cfg.burn_in && (sweep + 1) % TUNE_EVERY == 0 {
            let rate = acc_window as f64 / tot_window as f64;
            if rate < 0.2 {
                width *= 0.8;
            } else if rate > 0.5 {
                width = (width * 1.25).min(PI - 1e-9);
            }
            acc_window = 0;
            tot_window = 0;
        }
        if sweep >= cfg.burn_in {
            let mut c = lambda.clone();
            c.sort_by(f64::total_cmp);
            configurations.push(c);
        }
    }
    Ok(EigenvalueSample {
        n,
        configurations,
        acceptance_rate: accepted as f64 / total.max(1) as f64,
        proposal_width: width,
    })
}

/// Histogram of all angles against the equilibrium bin masses.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NcmReport {
    pub edges: Vec<f64>,
    pub empirical: Vec<f64>,
    pub predicted: Vec<f64>,
    /// Bins contained in `[−θ, θ]`.
    pub inside: Vec<bool>,
    pub sup_deviation: f64,
    pub outside_max_mass: f64,
}

/// Empirical bin masses of all angles over `bins` equal bins on `[−π, π)`.
pub fn ncm_histogram(sample: &EigenvalueSample, bins: usize) -> Vec<f64> {
    let mut counts = vec![0usize; bins];
    let mut total = 0usize;
    for c in &sample.configurations {
        for &l in c {
            let b = (((l + PI) / (2.0 * PI)) * bins as f64).floor() as usize;
            counts[b.min(bins - 1)] += 1;
            total += 1;
        }
    }
    counts.iter().map(|&c| c as f64 / total as f64).collect()
}

/// Compares the normalized counting measure with `ρ`; returns the sup relative deviation inside `σ`.
pub fn ncm_compare(sample: &EigenvalueSample, eq: &EquilibriumData, bins: usize) -> Result<NcmReport> {
    if sample.configurations.len() < MIN_CONFIGURATIONS {
        return Err(Error::validation(
            "sample",
            format!("needs at least {MIN_CONFIGURATIONS} configurations"),
        ));
    }
    if bins < 2 {
        return Err(Error::validation("bins", "must be at least 2"));
    }
    let empirical = ncm_histogram(sample, bins);
    let edges: Vec<f64> = (0..=bins).map(|i| -PI + 2.0 * PI * i as f64 / bins as f64).collect();
    let mut predicted = Vec::with_capacity(bins);
    let mut inside = Vec::with_capacity(bins);
    for w in edges.windows(2) {
        let (a, b) = (w[0].max(-eq.theta), w[1].min(eq.theta));
        let mass = if a < b {
            crate::quad::gauss_kronrod(|l| eq.density(l), a, b, 1e-14, 1e-12)?.0
        } else {
            0.0
        };
        predicted.push(mass);
        inside.push(w[0] >= -eq.theta - 1e-12 && w[1] <= eq.theta + 1e-12);
    }
    let mut sup: f64 = 0.0;
    let mut outside: f64 = 0.0;
    for i in 0..bins {
        if inside[i] {
            sup = sup.max((empirical[i] - predicted[i]).abs() / predicted[i]);
        } else if predicted[i] == 0.0 {
            outside = outside.max(empirical[i]);
        }
    }
    Ok(NcmReport {
        edges,
        empirical,
        predicted,
        inside,
        sup_deviation: sup,
        outside_max_mass: outside,
    })
}

/// Empirical law of `γ n^{2/3} (λ_max − θ)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmpiricalCdf {
    /// Sorted observations.
    pub values: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(mut values: Vec<f64>) -> Self {
        values.sort_by(f64::total_cmp);
        EmpiricalCdf { values }
    }

    /// `#{x_i ≤ s} / N`.
    pub fn eval(&self, s: f64) -> f64 {
        self.values.partition_point(|&x| x <= s) as f64 / self.values.len() as f64
    }

    /// `#{x_i < s} / N`.
    pub fn eval_left(&self, s: f64) -> f64 {
        self.values.partition_point(|&x| x < s) as f64 / self.values.len() as f64
    }

    pub fn median(&self) -> f64 {
        let m = self.values.len();
        if m % 2 == 1 {
            self.values[m / 2]
        } else {
            0.5 * (self.values[m / 2 - 1] + self.values[m / 2])
        }
    }

    /// `sup_s |F_emp(s) − F(s)|` over a grid, using both one-sided limits of `F_emp`.
    pub fn kolmogorov_distance(&self, grid: &[f64], cdf: &[f64]) -> f64 {
        grid.iter()
            .zip(cdf)
            .map(|(&s, &f)| (self.eval(s) - f).abs().max((self.eval_left(s) - f).abs()))
            .fold(0.0, f64::max)
    }
}

/// `γ n^{2/3} (λ_max − θ)` over all retained configurations.
pub fn edge_fluctuation(sample: &EigenvalueSample, eq: &EquilibriumData, ec: &EdgeConstants) -> Result<EmpiricalCdf> {
    if sample.configurations.len() < MIN_CONFIGURATIONS {
        return Err(Error::validation(
            "sample",
            format!("needs at least {MIN_CONFIGURATIONS} configurations"),
        ));
    }
    let scale = ec.edge_scale * (sample.n as f64).powf(2.0 / 3.0);
    let vals = sample
        .configurations
        .iter()
        .map(|c| scale * (c[c.len() - 1] - eq.theta))
        .collect();
    Ok(EmpiricalCdf::new(vals))
}

/// `F₂` on a grid, for comparison with [`edge_fluctuation`].
pub fn limit_cdf(grid: &[f64], order: usize) -> Result<Vec<f64>> {
    use rayon::prelude::*;
    grid.par_iter()
        .map(|&s| fredholm::tracy_widom(s, fredholm::DEFAULT_TAIL, order))
        .collect()
}
