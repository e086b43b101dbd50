//! Potentials, the equilibrium density on a single arc `[-θ, θ]` and the edge constants.
//!
//! The density is `ρ(λ) = (4π²)⁻¹ χ(λ) P(λ)` on the support with
//! `χ(λ) = √(cos λ − cos θ)` and
//!
//! ```text
//! P(λ) = ∫_{-θ}^{θ} [(V(cos μ))' − (V(cos λ))'] / sin((μ−λ)/2) dμ / χ(μ).
//! ```
//!
//! The edge `θ` is fixed by unit mass.

use crate::quad;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};

/// Family tag of a potential `V(x)`, `x = cos λ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PotentialFamily {
    Linear,
    Quadratic,
    Quartic,
    Polynomial,
}

impl PotentialFamily {
    fn max_degree(self) -> Option<usize> {
        match self {
            PotentialFamily::Linear => Some(1),
            PotentialFamily::Quadratic => Some(2),
            PotentialFamily::Quartic => Some(4),
            PotentialFamily::Polynomial => None,
        }
    }
}

/// Smoothness order recorded for polynomial potentials (they are C^∞).
pub const POLYNOMIAL_SMOOTHNESS: u32 = u32::MAX;

/// A polynomial potential `V(x) = Σ c_k x^k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Potential {
    pub family: PotentialFamily,
    pub coeffs: Vec<f64>,
    pub smoothness: u32,
}

/// `V(cos λ)` and its derivative in `λ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AngularValue {
    pub value: f64,
    pub derivative: f64,
}

impl Potential {
    pub fn new(family: PotentialFamily, coeffs: Vec<f64>) -> Result<Self> {
        if let Some((i, _)) = coeffs.iter().enumerate().find(|(_, c)| !c.is_finite()) {
            return Err(Error::validation(
                format!("potential.coeffs[{i}]"),
                "coefficient is not finite",
            ));
        }
        let mut coeffs = coeffs;
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if let Some(max) = family.max_degree() {
            if coeffs.len() > max + 1 {
                return Err(Error::validation(
                    "potential.coeffs",
                    format!("{family:?} potential has degree at most {max}"),
                ));
            }
        }
        Ok(Potential {
            family,
            coeffs,
            smoothness: POLYNOMIAL_SMOOTHNESS,
        })
    }

    pub fn polynomial(coeffs: Vec<f64>) -> Result<Self> {
        Self::new(PotentialFamily::Polynomial, coeffs)
    }

    /// `V(x) = 2 g x`.
    pub fn linear(g: f64) -> Self {
        Self::new(PotentialFamily::Linear, vec![0.0, 2.0 * g]).unwrap()
    }

    /// The Gross–Witten–Wadia potential `V(x) = −2x`.
    pub fn gww() -> Self {
        Self::linear(-1.0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == 0.0)
    }

    pub fn value(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (k, c) in self.coeffs.iter().enumerate().skip(1).rev() {
            acc = acc * x + k as f64 * c;
        }
        acc
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (k, c) in self.coeffs.iter().enumerate().skip(2).rev() {
            acc = acc * x + (k * (k - 1)) as f64 * c;
        }
        acc
    }

    /// `(V'(x) − V'(y)) / (x − y)`, evaluated without cancellation.
    pub fn derivative_divided_difference(&self, x: f64, y: f64) -> f64 {
        // Σ_k k c_k h_{k-2}(x, y) with h_m the complete homogeneous polynomial
        let mut h = 1.0;
        let mut ypow = 1.0;
        let mut acc = 0.0;
        for (k, c) in self.coeffs.iter().enumerate().skip(2) {
            if k > 2 {
                ypow *= y;
                h = x * h + ypow;
            }
            acc += k as f64 * c * h;
        }
        acc
    }

    /// `V(cos λ)` and `d/dλ V(cos λ) = −sin λ · V'(cos λ)`.
    pub fn angular(&self, lambda: f64) -> AngularValue {
        let (s, c) = lambda.sin_cos();
        AngularValue {
            value: self.value(c),
            derivative: -s * self.derivative(c),
        }
    }

    /// `d²/dλ² V(cos λ)`.
    pub fn angular_second(&self, lambda: f64) -> f64 {
        let (s, c) = lambda.sin_cos();
        -c * self.derivative(c) + s * s * self.second_derivative(c)
    }

    /// `max V − min V` over `[-1, 1]`.
    pub fn oscillation(&self) -> f64 {
        let m = 4096;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..=m {
            let v = self.value(-1.0 + 2.0 * i as f64 / m as f64);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        hi - lo
    }

    /// Stable textual key used for cache file names.
    pub fn canonical(&self) -> String {
        let parts: Vec<String> = self.coeffs.iter().map(|c| format!("{c:e}")).collect();
        format!("poly[{}]", parts.join(","))
    }
}

/// `V(cos λ)` and its `λ`-derivative.
pub fn eval_potential(pot: &Potential, lambda: f64) -> AngularValue {
    pot.angular(lambda)
}

/// Smooth integrand of `P`: `[(V(cos μ))' − (V(cos λ))'] / sin((μ−λ)/2)`.
fn p_integrand(pot: &Potential, mu: f64, lambda: f64) -> f64 {
    let m = 0.5 * (mu + lambda);
    let (sm, cm) = m.sin_cos();
    -2.0 * cm * pot.derivative(mu.cos())
        + 2.0 * lambda.sin() * sm * pot.derivative_divided_difference(mu.cos(), lambda.cos())
}

fn p_with_nodes(pot: &Potential, theta: f64, lambda: f64, nodes: &[f64]) -> f64 {
    let st = (0.5 * theta).sin();
    let sum: f64 = nodes
        .iter()
        .map(|&s| {
            let mu = 2.0 * (st * s).asin();
            let cos_half = (1.0 - st * st * s * s).sqrt();
            p_integrand(pot, mu, lambda) / cos_half
        })
        .sum();
    SQRT_2 * PI * sum / nodes.len() as f64
}

/// `P(λ)` with a fixed number of Chebyshev nodes.
pub fn p_function_order(pot: &Potential, theta: f64, lambda: f64, order: usize) -> f64 {
    p_with_nodes(pot, theta, lambda, &quad::chebyshev_first(order))
}

/// `P(λ)` by Gauss–Chebyshev quadrature after `sin(μ/2) = sin(θ/2) s`.
///
/// The order is doubled from 64 until two successive values agree to 1e-13
/// relative to the integrand scale.
pub fn p_function(pot: &Potential, theta: f64, lambda: f64) -> Result<f64> {
    check_theta(theta)?;
    if lambda.abs() > theta * (1.0 + 1e-12) {
        return Err(Error::Domain(format!("|λ| = {} exceeds θ = {theta}", lambda.abs())));
    }
    let scale = 1.0 + pot.coeffs.iter().enumerate().map(|(k, c)| k as f64 * c.abs()).sum::<f64>();
    let mut order = 64;
    let mut prev = p_function_order(pot, theta, lambda, order);
    while order <= 4096 {
        order *= 2;
        let cur = p_function_order(pot, theta, lambda, order);
        if (cur - prev).abs() <= 1e-13 * scale * 8.0 * PI {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Numerical(format!(
        "P(λ) quadrature did not converge at λ = {lambda}"
    )))
}

fn check_theta(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::Domain(format!("θ = {theta} is not in (0, π)")));
    }
    Ok(())
}

/// `χ(λ)² = cos λ − cos θ` from the distances to the two edges.
fn chi_squared(theta: f64, lambda: f64) -> f64 {
    let d_minus = theta + lambda;
    let d_plus = theta - lambda;
    2.0 * (0.5 * d_minus).sin() * (0.5 * d_plus).sin()
}

/// Equilibrium density for a given edge `θ`.
pub fn density(pot: &Potential, theta: f64, lambda: f64) -> Result<f64> {
    check_theta(theta)?;
    if lambda.abs() >= theta {
        return Ok(0.0);
    }
    let chi = chi_squared(theta, lambda).max(0.0).sqrt();
    Ok(chi * p_function(pot, theta, lambda)? / (4.0 * PI * PI))
}

/// Total mass `∫ρ` for a trial edge, using `sin(λ/2) = sin(θ/2) s` in the outer integral.
pub fn mass(pot: &Potential, theta: f64, order: usize) -> f64 {
    let st = (0.5 * theta).sin();
    let inner = quad::chebyshev_first(order);
    let (s, w) = quad::chebyshev_second(order);
    let sum: f64 = s
        .iter()
        .zip(&w)
        .map(|(&s, &w)| {
            let lambda = 2.0 * (st * s).asin();
            let cos_half = (1.0 - st * st * s * s).sqrt();
            w * p_with_nodes(pot, theta, lambda, &inner) / cos_half
        })
        .sum();
    2.0 * SQRT_2 * st * st * sum / (4.0 * PI * PI)
}

/// Solved one-cut equilibrium problem.
#[derive(Clone, Debug)]
pub struct EquilibriumData {
    pub theta: f64,
    pub potential: Potential,
    pub normalization_residual: f64,
}

impl EquilibriumData {
    pub fn density(&self, lambda: f64) -> f64 {
        density(&self.potential, self.theta, lambda).unwrap_or(0.0)
    }

    pub fn p(&self, lambda: f64) -> f64 {
        p_function(&self.potential, self.theta, lambda).unwrap_or(f64::NAN)
    }

    /// Density written through the distances to both edges (accurate near `±θ`).
    fn density_near_edges(&self, lambda: f64, d_minus: f64, d_plus: f64) -> f64 {
        let chi2 = 2.0 * (0.5 * d_minus).sin() * (0.5 * d_plus).sin();
        let lambda = lambda.clamp(-self.theta, self.theta);
        chi2.max(0.0).sqrt() * self.p(lambda) / (4.0 * PI * PI)
    }
}

const MASS_ORDER: usize = 96;

/// Finds `θ` with unit mass, then checks positivity of `P` on the support.
pub fn solve_support(pot: &Potential, tol: f64) -> Result<EquilibriumData> {
    if !(tol > 0.0) {
        return Err(Error::validation("tol", "must be positive"));
    }
    let f = |t: f64| mass(pot, t, MASS_ORDER) - 1.0;
    let mut grid = Vec::new();
    let mut t = 0.05;
    while t < PI - 0.05 + 1e-12 {
        grid.push(t);
        t += 0.05;
    }
    let mut bracket = None;
    let mut prev = (grid[0], f(grid[0]));
    for &t in &grid[1..] {
        let v = f(t);
        if prev.1 == 0.0 {
            bracket = Some((prev.0, prev.0, prev.1, prev.1));
            break;
        }
        if prev.1.signum() != v.signum() {
            bracket = Some((prev.0, t, prev.1, v));
            break;
        }
        prev = (t, v);
    }
    let (mut a, mut b, mut fa, mut fb) = bracket.ok_or_else(|| {
        Error::Numerical("no θ in (0, π) gives unit mass; the one-cut condition fails".into())
    })?;
    // bisection with secant refinement
    for _ in 0..200 {
        if (b - a).abs() <= tol * 1e-3 || fa == 0.0 {
            break;
        }
        let secant = b - fb * (b - a) / (fb - fa);
        let mid = 0.5 * (a + b);
        let lo = a.min(b);
        let hi = a.max(b);
        let c = if secant > lo && secant < hi { secant } else { mid };
        let fc = f(c);
        if fc == 0.0 {
            a = c;
            fa = 0.0;
            break;
        }
        if fc.signum() == fa.signum() {
            a = c;
            fa = fc;
        } else {
            b = c;
            fb = fc;
        }
        // force bisection when the secant stalls on one side
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
    }
    let theta = if fa.abs() <= fb.abs() { a } else { b };
    let residual = mass(pot, theta, 2 * MASS_ORDER) - 1.0;
    if residual.abs() > 10.0 * tol.max(1e-13) {
        return Err(Error::Numerical(format!(
            "normalization residual {residual:e} exceeds tolerance"
        )));
    }
    let eq = EquilibriumData {
        theta,
        potential: pot.clone(),
        normalization_residual: residual,
    };
    check_positivity(&eq)?;
    Ok(eq)
}

/// Checks `P > 0` on 257 interior points and at the edge.
pub fn check_positivity(eq: &EquilibriumData) -> Result<()> {
    let m = 257;
    for i in 0..m {
        let lambda = -eq.theta + 2.0 * eq.theta * (i as f64 + 0.5) / m as f64;
        let p = eq.p(lambda);
        if !(p > 0.0) {
            return Err(Error::Numerical(format!(
                "density is not positive at λ = {lambda} (P = {p:e})"
            )));
        }
    }
    let pe = eq.p(eq.theta);
    if !(pe > 0.0) {
        return Err(Error::Numerical(format!("P(θ) = {pe:e} is not positive")));
    }
    Ok(())
}

/// `(V(cos λ))' − v.p.∫ cot((λ−μ)/2) ρ(μ) dμ` for `|λ| < θ`.
pub fn integral_equation_residual(eq: &EquilibriumData, lambda: f64) -> Result<f64> {
    let theta = eq.theta;
    if lambda.abs() >= theta {
        return Err(Error::Domain(format!("λ = {lambda} is not interior to the support")));
    }
    let tol = 1e-13;
    let reach = (theta - lambda.abs()).min(theta + lambda.abs());
    // paired part: ∫_0^reach cot(t/2) [ρ(λ−t) − ρ(λ+t)] dt
    let floor = tol * (1.0 + eq.potential.angular(lambda).derivative.abs());
    let (paired, _) = quad::tanh_sinh_floor(0.0, reach, tol, floor, |t, _, _| {
        let left = eq.density_near_edges(lambda - t, theta + lambda - t, theta - lambda + t);
        let right = eq.density_near_edges(lambda + t, theta + lambda + t, theta - lambda - t);
        (left - right) / (0.5 * t).tan()
    })?;
    // unpaired remainder on the longer side
    let (rest, _) = if lambda >= 0.0 {
        quad::tanh_sinh(-theta, lambda - reach, tol, |mu, da, _| {
            eq.density_near_edges(mu, da, theta - mu) / (0.5 * (lambda - mu)).tan()
        })?
    } else {
        quad::tanh_sinh(lambda + reach, theta, tol, |mu, _, db| {
            eq.density_near_edges(mu, theta + mu, db) / (0.5 * (lambda - mu)).tan()
        })?
    };
    Ok(eq.potential.angular(lambda).derivative - (paired + rest))
}

/// Density given through `(μ, distance to −θ, distance to θ)`.
pub type DensityFn<'a> = dyn Fn(f64, f64, f64) -> f64 + Sync + 'a;

/// `u(λ) = V(cos λ) − 2∫ log|e^{iλ} − e^{iμ}| ρ(μ) dμ` for an arbitrary density on `[-θ, θ]`.
pub fn effective_potential_with(
    pot: &Potential,
    theta: f64,
    rho: &DensityFn<'_>,
    lambda: f64,
) -> Result<f64> {
    let tol = 1e-13;
    let log_kernel = |d: f64| (2.0 * (0.5 * d).sin().abs()).ln();
    let integral = if lambda > -theta && lambda < theta {
        let (left, _) = quad::tanh_sinh(-theta, lambda, tol, |mu, da, db| {
            rho(mu, da, theta - mu) * log_kernel(db)
        })?;
        let (right, _) = quad::tanh_sinh(lambda, theta, tol, |mu, da, db| {
            rho(mu, theta + mu, db) * log_kernel(da)
        })?;
        left + right
    } else if lambda >= theta {
        let (v, _) = quad::tanh_sinh(-theta, theta, tol, |mu, da, db| {
            rho(mu, da, db) * log_kernel(lambda - theta + db)
        })?;
        v
    } else {
        let (v, _) = quad::tanh_sinh(-theta, theta, tol, |mu, da, db| {
            rho(mu, da, db) * log_kernel(-theta - lambda + da)
        })?;
        v
    };
    Ok(pot.angular(lambda).value - 2.0 * integral)
}

/// Effective potential of the equilibrium density.
pub fn effective_potential(eq: &EquilibriumData, lambda: f64) -> Result<f64> {
    let rho = |mu: f64, da: f64, db: f64| eq.density_near_edges(mu, da, db);
    effective_potential_with(&eq.potential, eq.theta, &rho, lambda)
}

/// Spread `max u − min u` over the given support points.
pub fn flatness_defect(
    pot: &Potential,
    theta: f64,
    rho: &DensityFn<'_>,
    points: &[f64],
) -> Result<f64> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &p in points {
        let u = effective_potential_with(pot, theta, rho, p)?;
        lo = lo.min(u);
        hi = hi.max(u);
    }
    Ok(hi - lo)
}

/// Minimum of `u(λ) − u(0)` over exterior points `θ < |λ| ≤ π`; positive when the
/// effective potential grows strictly off the support.
pub fn exterior_margin(eq: &EquilibriumData, points: usize, gap: f64) -> Result<f64> {
    let u0 = effective_potential(eq, 0.0)?;
    let mut margin = f64::INFINITY;
    for i in 0..points {
        let t = (i as f64 + 1.0) / points as f64;
        let lambda = eq.theta + gap + t * (PI - eq.theta - gap);
        margin = margin.min(effective_potential(eq, lambda)? - u0);
        margin = margin.min(effective_potential(eq, -lambda)? - u0);
    }
    Ok(margin)
}

/// Edge scales of the model.
///
/// `gamma`, `a`, `b` follow `γ = tan^{1/3}(θ/2) (P(θ)/4π)^{2/3}`, `a³ = sin θ`,
/// `b³ = 2p_θ / sin(θ/2)`. The continuum limit of the rotated CMV operator has second-order
/// coefficient `tan(θ/2)` instead (`a_operator`), and the scale at which the density matches
/// the Airy density is `edge_scale = a_operator⁻¹ b⁻² = sin^{1/3}θ (P(θ)/4π)^{2/3}`.
/// The two systems agree when `θ = π/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeConstants {
    pub theta: f64,
    pub p_at_edge: f64,
    pub p_theta: f64,
    pub gamma: f64,
    pub a: f64,
    pub b: f64,
    pub a_operator: f64,
    pub edge_scale: f64,
}

impl EdgeConstants {
    /// Builds the constants from `θ` and `P(θ)`.
    pub fn from_edge(theta: f64, p_at_edge: f64) -> Result<Self> {
        check_theta(theta)?;
        if !(p_at_edge > 0.0) {
            return Err(Error::Numerical(format!("P(θ) = {p_at_edge:e} is not positive")));
        }
        let p_theta = PI * SQRT_2 / p_at_edge;
        let a = theta.sin().cbrt();
        let b = (2.0 * p_theta / (0.5 * theta).sin()).cbrt();
        let gamma = (0.5 * theta).tan().cbrt() * (p_at_edge / (4.0 * PI)).powf(2.0 / 3.0);
        let edge_scale = theta.sin().cbrt() * (p_at_edge / (4.0 * PI)).powf(2.0 / 3.0);
        let ec = EdgeConstants {
            theta,
            p_at_edge,
            p_theta,
            gamma,
            a,
            b,
            a_operator: (0.5 * theta).tan().cbrt(),
            edge_scale,
        };
        let defect = ec.consistency_defect();
        if defect > 1e-12 {
            return Err(Error::Numerical(format!("γ·a·b² − 1 = {defect:e}")));
        }
        let defect = ec.operator_defect();
        if defect > 1e-12 {
            return Err(Error::Numerical(format!("edge scale · a_operator · b² − 1 = {defect:e}")));
        }
        Ok(ec)
    }

    /// `|γ a b² − 1|`.
    pub fn consistency_defect(&self) -> f64 {
        (self.gamma * self.a * self.b * self.b - 1.0).abs()
    }

    /// `|edge_scale · a_operator · b² − 1|`.
    pub fn operator_defect(&self) -> f64 {
        (self.edge_scale * self.a_operator * self.b * self.b - 1.0).abs()
    }
}

/// Edge constants of a solved model.
pub fn edge_constants(eq: &EquilibriumData) -> Result<EdgeConstants> {
    let p = p_function(&eq.potential, eq.theta, eq.theta)?;
    EdgeConstants::from_edge(eq.theta, p)
}
