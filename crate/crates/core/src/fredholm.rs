//! Fredholm determinants `det(I − K)` on finite unions of intervals by Gauss–Legendre
//! Nyström discretization.

use crate::airy;
use crate::equilibrium::{EdgeConstants, EquilibriumData};
use crate::opuc::KernelEvaluator;
use crate::quad;
use crate::{Complex64, Error, Result};
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Default truncation length of `(s, ∞)`.
pub const DEFAULT_TAIL: f64 = 12.0;

/// Gauss–Legendre nodes on a finite union of disjoint bounded intervals.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub intervals: Vec<(f64, f64)>,
    pub order: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// `order` nodes on every interval. Intervals are sorted and must not overlap.
    pub fn new(intervals: &[(f64, f64)], order: usize) -> Result<Self> {
        let mut iv: Vec<(f64, f64)> = intervals.to_vec();
        for &(a, b) in &iv {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(Error::validation("delta", format!("[{a}, {b}] is not a bounded interval")));
            }
        }
        iv.sort_by(|x, y| x.0.total_cmp(&y.0));
        if iv.windows(2).any(|w| w[1].0 < w[0].1) {
            return Err(Error::validation("delta", "intervals overlap"));
        }
        let mut nodes = Vec::with_capacity(order * iv.len());
        let mut weights = Vec::with_capacity(order * iv.len());
        if !iv.is_empty() {
            if order < 1 {
                return Err(Error::validation("order", "must be positive"));
            }
            for &(a, b) in &iv {
                let (x, w) = quad::gauss_legendre_on(a, b, order);
                nodes.extend(x);
                weights.extend(w);
            }
        }
        Ok(QuadratureRule {
            intervals: iv,
            order,
            nodes,
            weights,
        })
    }

    /// Total length `|Δ|`.
    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Result of a gap-probability computation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapProbability {
    pub value: f64,
    pub order: usize,
    pub refinement_delta: f64,
}

/// `det(I − W^{1/2} K W^{1/2})` for a sampled kernel matrix.
pub fn det_from_matrix(k: &DMatrix<Complex64>, weights: &[f64]) -> Result<f64> {
    let n = weights.len();
    if k.nrows() != n || k.ncols() != n {
        return Err(Error::validation("kernel", "matrix size does not match the rule"));
    }
    if n == 0 {
        return Ok(1.0);
    }
    let sw: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let mut a = DMatrix::<Complex64>::identity(n, n);
    for i in 0..n {
        for j in 0..n {
            let v = k[(i, j)];
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::Numerical(format!("non-finite kernel sample at ({i}, {j})")));
            }
            a[(i, j)] -= v * (sw[i] * sw[j]);
        }
    }
    let det = a.lu().determinant();
    if det.im.abs() > 1e-8 * det.norm().max(1e-300) + 1e-14 {
        return Err(Error::Numerical(format!("determinant has imaginary part {:e}", det.im)));
    }
    Ok(det.re)
}

/// Nyström determinant for a real symmetric kernel.
pub fn nystrom_det<K>(kernel: K, rule: &QuadratureRule) -> Result<f64>
where
    K: Fn(f64, f64) -> Result<f64> + Sync,
{
    let n = rule.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let vals: Vec<Result<f64>> = pairs
        .par_iter()
        .map(|&(i, j)| kernel(rule.nodes[i], rule.nodes[j]))
        .collect();
    let mut k = DMatrix::<Complex64>::zeros(n, n);
    for (&(i, j), v) in pairs.iter().zip(vals) {
        let v = Complex64::new(v?, 0.0);
        k[(i, j)] = v;
        k[(j, i)] = v;
    }
    det_from_matrix(&k, &rule.weights)
}

/// `Q_Ai` sampled on a point set, with `Ai`, `Ai'` evaluated once per point.
pub fn airy_kernel_matrix(points: &[f64]) -> Result<DMatrix<Complex64>> {
    let vals: Vec<Result<(f64, f64)>> = points.par_iter().map(|&x| airy::ai_real(x)).collect();
    let vals: Vec<(f64, f64)> = vals.into_iter().collect::<Result<_>>()?;
    let n = points.len();
    let mut k = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let (x, y) = (points[i], points[j]);
            let v = if (x - y).abs() < 1e-3 {
                airy::airy_kernel(x, y)?
            } else {
                (vals[i].0 * vals[j].1 - vals[i].1 * vals[j].0) / (x - y)
            };
            k[(i, j)] = Complex64::new(v, 0.0);
            k[(j, i)] = Complex64::new(v, 0.0);
        }
    }
    Ok(k)
}

/// `det(I − Q_Ai)` on `Δ`.
pub fn airy_gap(intervals: &[(f64, f64)], order: usize) -> Result<f64> {
    let rule = QuadratureRule::new(intervals, order)?;
    det_from_matrix(&airy_kernel_matrix(&rule.nodes)?, &rule.weights)
}

/// `det(I − Q_Ai)` on `Δ` at orders `m` and `2m`.
pub fn airy_gap_refined(intervals: &[(f64, f64)], order: usize) -> Result<GapProbability> {
    let coarse = airy_gap(intervals, order)?;
    let fine = airy_gap(intervals, 2 * order)?;
    Ok(GapProbability {
        value: fine,
        order: 2 * order,
        refinement_delta: (fine - coarse).abs(),
    })
}

/// `F₂(s) = det(I − Q_Ai)` on `[s, s + L]`.
pub fn tracy_widom(s: f64, tail: f64, order: usize) -> Result<f64> {
    if tail < 8.0 {
        return Err(Error::validation("tail", "must be at least 8"));
    }
    if order < 32 {
        return Err(Error::validation("order", "must be at least 32"));
    }
    airy_gap(&[(s, s + tail)], order)
}

/// `F₂(s)` with the change under doubling both the order and the tail length.
pub fn tracy_widom_refined(s: f64, tail: f64, order: usize) -> Result<GapProbability> {
    let coarse = tracy_widom(s, tail, order)?;
    let fine = tracy_widom(s, 2.0 * tail, 2 * order)?;
    Ok(GapProbability {
        value: fine,
        order: 2 * order,
        refinement_delta: (fine - coarse).abs(),
    })
}

/// Largest eigenvalue of the symmetrized discretization `W^{1/2} K W^{1/2}`.
pub fn largest_eigenvalue(k: &DMatrix<Complex64>, weights: &[f64]) -> f64 {
    let n = weights.len();
    let sw: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let a = DMatrix::<f64>::from_fn(n, n, |i, j| k[(i, j)].re * sw[i] * sw[j]);
    let a = (&a + a.transpose()) * 0.5;
    a.symmetric_eigenvalues().iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}

fn finite_n_value(
    ke: &KernelEvaluator,
    ec: &EdgeConstants,
    intervals: &[(f64, f64)],
    n: usize,
    order: usize,
) -> Result<f64> {
    let rule = QuadratureRule::new(intervals, order)?;
    if rule.is_empty() {
        return Ok(1.0);
    }
    let scale = ec.edge_scale * (n as f64).powf(2.0 / 3.0);
    let lambdas: Vec<f64> = rule.nodes.iter().map(|t| ec.theta + t / scale).collect();
    let k = ke.kernel_matrix(&lambdas) / Complex64::new(scale, 0.0);
    det_from_matrix(&k, &rule.weights)
}

/// `E_n(Δ_n)` with `Δ_n = θ + Δ / (γ n^{2/3})`, kernel `K_n / (γ n^{2/3})` at orders `m` and `2m`,
/// `γ` the edge scale.
pub fn finite_n_hole(
    ke: &KernelEvaluator,
    eq: &EquilibriumData,
    ec: &EdgeConstants,
    intervals: &[(f64, f64)],
    n: usize,
    order: usize,
) -> Result<GapProbability> {
    if (eq.theta - ec.theta).abs() > 1e-12 {
        return Err(Error::validation("edge constants", "θ does not match the equilibrium data"));
    }
    let scale = ec.edge_scale * (n as f64).powf(2.0 / 3.0);
    for &(a, b) in intervals {
        let (la, lb) = (ec.theta + a / scale, ec.theta + b / scale);
        if !(la > -PI && lb < PI) {
            return Err(Error::validation("delta", "image of Δ leaves (−π, π)"));
        }
    }
    if intervals.is_empty() {
        return Ok(GapProbability {
            value: 1.0,
            order,
            refinement_delta: 0.0,
        });
    }
    let coarse = finite_n_value(ke, ec, intervals, n, order)?;
    let fine = finite_n_value(ke, ec, intervals, n, 2 * order)?;
    Ok(GapProbability {
        value: fine,
        order: 2 * order,
        refinement_delta: (fine - coarse).abs(),
    })
}
