//! One-dimensional quadrature rules shared by the numerical modules.

use crate::{Error, Result};
use gauss_quad::legendre::GaussLegendre;
use std::f64::consts::PI;
use std::num::NonZeroUsize;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let order = NonZeroUsize::new(order.max(1)).unwrap();
    let rule = GaussLegendre::new(order);
    let mut pairs: Vec<(f64, f64)> = rule.as_node_weight_pairs().to_vec();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(a: f64, b: f64, order: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(order);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    (
        x.iter().map(|t| mid + half * t).collect(),
        w.iter().map(|t| half * t).collect(),
    )
}

/// Gauss–Chebyshev nodes of the first kind: `∫ f(s)/√(1−s²) ds ≈ (π/m) Σ f(s_i)`.
pub fn chebyshev_first(m: usize) -> Vec<f64> {
    (1..=m)
        .map(|i| ((2 * i - 1) as f64 * PI / (2 * m) as f64).cos())
        .collect()
}

/// Gauss–Chebyshev rule of the second kind: `∫ √(1−s²) f(s) ds ≈ Σ w_i f(s_i)`.
pub fn chebyshev_second(m: usize) -> (Vec<f64>, Vec<f64>) {
    let h = PI / (m + 1) as f64;
    (1..=m)
        .map(|i| {
            let t = i as f64 * h;
            (t.cos(), h * t.sin().powi(2))
        })
        .unzip()
}

/// Tanh-sinh quadrature on `[a, b]`.
///
/// The integrand receives `(x, x − a, b − x)` so that it can evaluate endpoint
/// singular factors without cancellation. Returns the value and the last
/// level-to-level change as an error estimate.
pub fn tanh_sinh<F>(a: f64, b: f64, tol: f64, f: F) -> Result<(f64, f64)>
where
    F: FnMut(f64, f64, f64) -> f64,
{
    tanh_sinh_floor(a, b, tol, 0.0, f)
}

/// As [`tanh_sinh`], also accepting once the change between levels is at most `floor`.
pub fn tanh_sinh_floor<F>(a: f64, b: f64, tol: f64, floor: f64, mut f: F) -> Result<(f64, f64)>
where
    F: FnMut(f64, f64, f64) -> f64,
{
    if b <= a {
        return Ok((0.0, 0.0));
    }
    let half = 0.5 * (b - a);
    let tmax = 4.0;
    let mut h = 1.0;
    let mut eval = |t: f64| -> f64 {
        let u = 0.5 * PI * t.sinh();
        let ch = u.cosh();
        let w = 0.5 * PI * t.cosh() / (ch * ch);
        // distance to each endpoint in units of half, computed without cancellation
        let e = (-2.0 * u.abs()).exp();
        let d_small = 2.0 * e / (1.0 + e);
        let (da, db) = if u < 0.0 {
            (half * d_small, half * (2.0 - d_small))
        } else {
            (half * (2.0 - d_small), half * d_small)
        };
        if da <= 0.0 || db <= 0.0 {
            return 0.0;
        }
        let x = if da < db { a + da } else { b - db };
        let v = f(x, da, db) * w;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let mut sum = eval(0.0);
    let mut k = 1;
    while (k as f64) * h <= tmax {
        let t = k as f64 * h;
        sum += eval(t) + eval(-t);
        k += 1;
    }
    let mut prev = sum * h * half;
    for _level in 0..10 {
        h *= 0.5;
        let mut k = 1;
        while (k as f64) * h <= tmax {
            let t = k as f64 * h;
            sum += eval(t) + eval(-t);
            k += 2;
        }
        let cur = sum * h * half;
        let err = (cur - prev).abs();
        if err <= tol * cur.abs().max(1e-300) || err <= floor {
            return Ok((cur, err));
        }
        prev = cur;
    }
    Err(Error::Numerical(format!(
        "tanh-sinh did not reach tolerance {tol:e} on [{a}, {b}]"
    )))
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Globally adaptive Gauss–Kronrod (7, 15) quadrature with bisection.
pub fn gauss_kronrod<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<(f64, f64)> {
    let (v, e) = gk15(&mut f, a, b);
    let mut pieces = vec![(a, b, v, e)];
    for _ in 0..2000 {
        let total: f64 = pieces.iter().map(|p| p.2).sum();
        let err: f64 = pieces.iter().map(|p| p.3).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok((total, err));
        }
        let (idx, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .unwrap();
        let (lo, hi, _, _) = pieces.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&mut f, lo, mid);
        let (v2, e2) = gk15(&mut f, mid, hi);
        pieces.push((lo, mid, v1, e1));
        pieces.push((mid, hi, v2, e2));
    }
    Err(Error::Numerical(format!(
        "adaptive Gauss-Kronrod exhausted subdivisions on [{a}, {b}]"
    )))
}
