//! Edge-scaling experiments: the rescaled finite-`n` kernel against its Airy limit.

use crate::airy;
use crate::equilibrium::{edge_constants, solve_support, EdgeConstants, EquilibriumData, Potential};
use crate::opuc::{build_sequence, KernelEvaluator};
use crate::{Complex64, Error, Result};
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::path::Path;

/// Default half-width `c_θ / θ` of the rescaling window.
pub const DEFAULT_WINDOW_FACTOR: f64 = 0.25;

/// Tolerance used when solving for the support.
pub const SUPPORT_TOL: f64 = 1e-13;

/// Everything needed to evaluate `K_n` near the edge of one model.
#[derive(Clone, Debug)]
pub struct EdgeModel {
    pub n: usize,
    pub eq: EquilibriumData,
    pub ec: EdgeConstants,
    pub ke: KernelEvaluator,
    pub c_theta: f64,
}

impl EdgeModel {
    pub fn build(pot: &Potential, n: usize, precision_bits: Option<u32>, cache_dir: Option<&Path>) -> Result<Self> {
        if n < 4 {
            return Err(Error::validation("n", "must be at least 4"));
        }
        let eq = solve_support(pot, SUPPORT_TOL)?;
        let ec = edge_constants(&eq)?;
        let (w, vseq) = build_sequence(pot, n, n, precision_bits, cache_dir)?;
        let ke = KernelEvaluator::new(w, vseq, n)?;
        let c_theta = default_window(eq.theta);
        Ok(EdgeModel { n, eq, ec, ke, c_theta })
    }

    /// `|x| ≤ c_θ n^{2/3}`.
    pub fn window(&self) -> f64 {
        self.c_theta * (self.n as f64).powf(2.0 / 3.0)
    }

    pub fn rescaled_kernel(&self, x: f64, y: f64) -> Result<f64> {
        rescaled_kernel(&self.ke, &self.eq, x, y, self.n, self.c_theta)
    }

    /// Rescaled kernel on the product grid `points × points`.
    pub fn rescaled_matrix(&self, points: &[f64]) -> Result<DMatrix<f64>> {
        let w = self.window();
        if points.iter().any(|x| x.abs() > w) {
            return Err(Error::validation("grid", format!("points must satisfy |x| ≤ {w}")));
        }
        let scale = (self.n as f64).powf(-2.0 / 3.0);
        let lambdas: Vec<f64> = points.iter().map(|x| self.eq.theta + x * scale).collect();
        let k = self.ke.kernel_matrix(&lambdas);
        let phase = gauge_frequency(self.ke.m);
        Ok(DMatrix::from_fn(points.len(), points.len(), |i, j| {
            let g = Complex64::from_polar(1.0, -phase * (lambdas[i] - lambdas[j]));
            (g * k[(i, j)]).re * scale
        }))
    }
}

/// `c_θ = 0.25 θ`, kept inside `(0, π − θ)`.
pub fn default_window(theta: f64) -> f64 {
    (DEFAULT_WINDOW_FACTOR * theta).min(0.9 * (PI - theta))
}

/// Frequency of the phase that makes `K_m` real: `(m − 1)/2 − ⌊(m − 1)/2⌋`.
pub fn gauge_frequency(m: usize) -> f64 {
    let p = ((m - 1) / 2) as f64;
    0.5 * (m as f64 - 1.0) - p
}

/// `K_m(λ, μ)` with the unimodular factor `e^{iν(λ−μ)}` removed, so the value is real.
pub fn real_kernel(ke: &KernelEvaluator, lambda: f64, mu: f64) -> (f64, f64) {
    let k = ke.kernel(lambda, mu);
    let g = Complex64::from_polar(1.0, -gauge_frequency(ke.m) * (lambda - mu));
    let v = g * k;
    (v.re, v.im)
}

/// `𝒦_n(x, y) = n^{−2/3} K_n(θ + x n^{−2/3}, θ + y n^{−2/3})` in the real gauge.
pub fn rescaled_kernel(ke: &KernelEvaluator, eq: &EquilibriumData, x: f64, y: f64, n: usize, c_theta: f64) -> Result<f64> {
    let s = (n as f64).powf(-2.0 / 3.0);
    let w = c_theta / s;
    if x.abs() > w || y.abs() > w {
        return Err(Error::validation("x, y", format!("outside the window |x| ≤ {w}")));
    }
    let (re, _) = real_kernel(ke, eq.theta + x * s, eq.theta + y * s);
    Ok(re * s)
}

fn check_constants(ec: &EdgeConstants) -> Result<()> {
    let d = ec.consistency_defect().max(ec.operator_defect());
    if d > 1e-12 {
        return Err(Error::validation("edge constants", format!("scale defect {d:e}")));
    }
    Ok(())
}

/// Limit of the rescaled kernel: `g Q_Ai(gx, gy)` with `g = a⁻¹ b⁻²` the edge scale.
pub fn limit_kernel(ec: &EdgeConstants, x: f64, y: f64) -> Result<f64> {
    check_constants(ec)?;
    let g = 1.0 / (ec.a_operator * ec.b * ec.b);
    Ok(g * airy::airy_kernel(g * x, g * y)?)
}

/// `det{K_n(λ_j, λ_k) / (γ n^{2/3})}` with `λ_j = θ + t_j / (γ n^{2/3})`, `γ` the edge scale.
pub fn correlation_determinants(ke: &KernelEvaluator, eq: &EquilibriumData, ec: &EdgeConstants, t: &[f64], n: usize) -> Result<f64> {
    check_constants(ec)?;
    if t.is_empty() || t.len() > 4 {
        return Err(Error::validation("points", "between 1 and 4 points"));
    }
    let scale = ec.edge_scale * (n as f64).powf(2.0 / 3.0);
    let lambdas: Vec<f64> = t.iter().map(|x| eq.theta + x / scale).collect();
    let k = ke.kernel_matrix(&lambdas) / Complex64::new(scale, 0.0);
    let d = k.lu().determinant();
    Ok(d.re)
}

/// `det{Q_Ai(t_j, t_k)}`.
pub fn limit_correlation_determinant(t: &[f64]) -> Result<f64> {
    let l = t.len();
    let mut m = DMatrix::<f64>::zeros(l, l);
    for i in 0..l {
        for j in 0..l {
            m[(i, j)] = airy::airy_kernel(t[i], t[j])?;
        }
    }
    Ok(m.lu().determinant())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub x: f64,
    pub y: f64,
    pub kn_value: f64,
    pub limit_value: f64,
    pub abs_err: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    /// `(n, sup-grid error)` for each `n`.
    pub sup_errors: Vec<(usize, f64)>,
    /// `(n, relative error at the origin)` when the origin is on the grid.
    pub origin_errors: Vec<(usize, f64)>,
    /// `p` in `sup error ≈ C n^{−p}`.
    pub exponent: f64,
}

impl ConvergenceTable {
    pub fn sup_strictly_decreasing(&self) -> bool {
        self.sup_errors.windows(2).all(|w| w[1].1 < w[0].1)
    }
}

/// Least-squares slope of `log y` against `log x`, negated.
pub fn fit_decay(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    -sxy / sxx
}

/// Uniform grid with `count` points on `[lo, hi]`.
pub fn uniform_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect()
}

/// Compares `𝒦_n` with the limit on `grid × grid` for every `n`.
pub fn convergence_study(
    pot: &Potential,
    ns: &[usize],
    grid: &[f64],
    precision_bits: Option<u32>,
    cache_dir: Option<&Path>,
) -> Result<ConvergenceTable> {
    if ns.is_empty() || ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::validation("n_list", "must be nonempty and strictly increasing"));
    }
    let models: Vec<Result<EdgeModel>> = ns
        .par_iter()
        .map(|&n| EdgeModel::build(pot, n, precision_bits, cache_dir))
        .collect();
    let mut rows = Vec::new();
    let mut sup_errors = Vec::new();
    let mut origin_errors = Vec::new();
    let mut limit = DMatrix::<f64>::zeros(grid.len(), grid.len());
    let mut limit_ready = false;
    for model in models {
        let model = model?;
        if !limit_ready {
            for i in 0..grid.len() {
                for j in 0..grid.len() {
                    limit[(i, j)] = limit_kernel(&model.ec, grid[i], grid[j])?;
                }
            }
            limit_ready = true;
        }
        let k = model.rescaled_matrix(grid)?;
        let mut sup: f64 = 0.0;
        for i in 0..grid.len() {
            for j in 0..grid.len() {
                let err = (k[(i, j)] - limit[(i, j)]).abs();
                sup = sup.max(err);
                if grid[i] == 0.0 && grid[j] == 0.0 {
                    origin_errors.push((model.n, err / limit[(i, j)].abs()));
                }
                rows.push(ConvergenceRow {
                    n: model.n,
                    x: grid[i],
                    y: grid[j],
                    kn_value: k[(i, j)],
                    limit_value: limit[(i, j)],
                    abs_err: err,
                });
            }
        }
        sup_errors.push((model.n, sup));
    }
    let exponent = if sup_errors.len() >= 2 {
        fit_decay(&sup_errors.iter().map(|&(n, e)| (n as f64, e)).collect::<Vec<_>>())
    } else {
        f64::NAN
    };
    Ok(ConvergenceTable {
        rows,
        sup_errors,
        origin_errors,
        exponent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauge_frequency_parity() {
        assert_eq!(gauge_frequency(1), 0.0);
        assert_eq!(gauge_frequency(2), 0.5);
        assert_eq!(gauge_frequency(7), 0.0);
        assert_eq!(gauge_frequency(8), 0.5);
    }

    #[test]
    fn fit_recovers_power() {
        let pts: Vec<(f64, f64)> = [10.0, 20.0, 40.0].iter().map(|&n: &f64| (n, 3.0 * n.powf(-0.7))).collect();
        assert!((fit_decay(&pts) - 0.7).abs() < 1e-12);
    }
}
