//! The five-diagonal CMV matrix `C = M L`, its Carathéodory-type resolvent and the
//! rotated tridiagonal operator `C_r−` near the edge row `n`.
//!
//! Rows are indexed from 0 by the CMV basis `χ_0, χ_1, …`. The block
//! `Θ_j = [[−α_j, ρ_j], [ρ_j, α_j]]` (one-based `α_j`, see
//! [`VerblunskySequence::cmv_alpha`]) occupies rows `{j−1, j}`;
//! `L = Θ_1 ⊕ Θ_3 ⊕ …` and `M = 1 ⊕ Θ_2 ⊕ Θ_4 ⊕ …`. With this layout
//! `e^{iλ} χ(λ) = C χ(λ)` row by row.

use crate::airy::{AiryConstants, AiryResolvent};
use crate::equilibrium::EdgeConstants;
use crate::mp;
use crate::opuc::{chi_eval, VerblunskySequence};
use crate::{Complex64, Error, Result};
use nalgebra::DMatrix;
use rug::{Complex, Float};
use serde::Serialize;

/// Number of diagonals on each side of `C`.
pub const BANDWIDTH: usize = 2;

/// Finite section of the CMV matrix. The last block is closed with a unimodular
/// coefficient so that the section is exactly unitary.
#[derive(Clone, Debug)]
pub struct CMVBand {
    pub size: usize,
    /// `rows[r][d]` holds `C_{r, r + d − 2}`.
    rows: Vec<[Float; 5]>,
    /// Tridiagonal factors: `m[r][d]`, `l[r][d]` hold entries at column `r + d − 1`.
    m: Vec<[Float; 3]>,
    l: Vec<[Float; 3]>,
}

fn place_block(target: &mut [[Float; 3]], j: usize, alpha: &Float, rho: &Float) {
    let top = j - 1;
    let p = alpha.prec();
    target[top][1] = Float::with_val(p, -alpha);
    if j < target.len() {
        target[top][2] = rho.clone();
        target[j][0] = rho.clone();
        target[j][1] = alpha.clone();
    }
}

impl CMVBand {
    pub fn get(&self, r: usize, c: usize) -> Float {
        let p = self.rows[0][2].prec();
        if c + BANDWIDTH < r || c > r + BANDWIDTH || c >= self.size {
            return Float::with_val(p, 0);
        }
        self.rows[r][c + 2 - r].clone()
    }

    pub fn factor_m(&self, r: usize, c: usize) -> Float {
        tri_get(&self.m, r, c)
    }

    pub fn factor_l(&self, r: usize, c: usize) -> Float {
        tri_get(&self.l, r, c)
    }

    /// Double-precision dense copy (for tests and small oracles).
    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.size, self.size, |r, c| self.get(r, c).to_f64())
    }

    /// Number of nonzero entries outside the band `|r − c| ≤ 2` (always 0) and the
    /// widest nonzero offset actually present.
    pub fn observed_bandwidth(&self) -> usize {
        let mut w = 0;
        for r in 0..self.size {
            for d in 0..5 {
                let c = r as i64 + d as i64 - 2;
                if c >= 0 && (c as usize) < self.size && !self.rows[r][d].is_zero() {
                    w = w.max((c - r as i64).unsigned_abs() as usize);
                }
            }
        }
        w
    }
}

fn tri_get(t: &[[Float; 3]], r: usize, c: usize) -> Float {
    let p = t[0][1].prec();
    if c + 1 < r || c > r + 1 || c >= t.len() {
        return Float::with_val(p, 0);
    }
    t[r][c + 1 - r].clone()
}

/// Assembles the `N × N` section from `α_1..α_N` (one-based).
pub fn assemble(vseq: &VerblunskySequence, size: usize) -> Result<CMVBand> {
    if size < 2 || size > vseq.len() {
        return Err(Error::validation(
            "N",
            format!("section size must lie in 2..={}", vseq.len()),
        ));
    }
    let p = vseq.prec();
    let zero = Float::with_val(p, 0);
    let mut m: Vec<[Float; 3]> = (0..size).map(|_| [zero.clone(), zero.clone(), zero.clone()]).collect();
    let mut l = m.clone();
    m[0][1] = Float::with_val(p, 1);
    for j in 1..=size {
        let (alpha, rho) = if j == size {
            // closing block: unimodular coefficient, ρ = 0
            let a = vseq.cmv_alpha(j);
            let s = if a.is_sign_negative() { -1 } else { 1 };
            (Float::with_val(p, s), Float::with_val(p, 0))
        } else {
            (vseq.cmv_alpha(j), vseq.cmv_rho(j))
        };
        if j % 2 == 1 {
            place_block(&mut l, j, &alpha, &rho);
        } else {
            place_block(&mut m, j, &alpha, &rho);
        }
    }
    let mut rows = Vec::with_capacity(size);
    for r in 0..size {
        let mut row: [Float; 5] = std::array::from_fn(|_| zero.clone());
        for (d, slot) in row.iter_mut().enumerate() {
            let c = r as i64 + d as i64 - 2;
            if c < 0 || c as usize >= size {
                continue;
            }
            let c = c as usize;
            let lo = r.saturating_sub(1).max(c.saturating_sub(1));
            let hi = (r + 1).min(c + 1).min(size - 1);
            let mut acc = Float::with_val(p, 0);
            for t in lo..=hi {
                acc += tri_get(&m, r, t) * tri_get(&l, t, c);
            }
            *slot = acc;
        }
        rows.push(row);
    }
    Ok(CMVBand { size, rows, m, l })
}

/// Largest `|(CᵀC − I)_{rc}|` over rows `r` in `rows` at working precision.
pub fn unitarity_residual(c: &CMVBand, rows: std::ops::Range<usize>) -> f64 {
    let p = c.rows[0][2].prec();
    let mut worst = Float::with_val(p, 0);
    for r in rows {
        for col in r.saturating_sub(4)..(r + 5).min(c.size) {
            let mut acc = Float::with_val(p, if r == col { -1 } else { 0 });
            let lo = r.max(col).saturating_sub(2);
            let hi = (r.min(col) + 2).min(c.size - 1);
            for t in lo..=hi {
                acc += c.get(t, r) * c.get(t, col);
            }
            let a = acc.abs();
            if a > worst {
                worst = a;
            }
        }
    }
    worst.to_f64()
}

/// `max_r |e^{iλ} χ_r(λ) − Σ_c C_{rc} χ_c(λ)|` over the given rows.
pub fn multiplication_residual(
    c: &CMVBand,
    vseq: &VerblunskySequence,
    lambda: f64,
    rows: std::ops::Range<usize>,
) -> Result<f64> {
    if rows.end > c.size {
        return Err(Error::validation("rows", "outside the section"));
    }
    let upto = (rows.end + 2).min(c.size).min(vseq.len());
    let chi = chi_eval(vseq, lambda, upto)?;
    let p = vseq.prec();
    let z = mp::cis(p, &Float::with_val(p, lambda));
    let mut worst = Float::with_val(p, 0);
    for r in rows {
        let mut acc = Complex::with_val(p, &z * &chi[r]);
        for col in r.saturating_sub(2)..=(r + 2).min(upto) {
            if col >= c.size {
                continue;
            }
            acc -= Complex::with_val(p, &chi[col] * &c.get(r, col));
        }
        let a = Float::with_val(p, acc.abs_ref());
        if a > worst {
            worst = a;
        }
    }
    Ok(worst.to_f64())
}

/// LU factorization with partial pivoting of a complex banded matrix.
#[derive(Clone, Debug)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    /// Row `i` stores columns `i − kl ..= i + ku + kl`.
    a: Vec<Vec<Complex64>>,
    piv: Vec<usize>,
    mult: Vec<Vec<Complex64>>,
    pub min_pivot: f64,
    pub max_pivot: f64,
}

impl BandedLu {
    /// Factors the matrix given entry-wise by `entry(r, c)` for `|r − c|` within the band.
    pub fn factor(n: usize, kl: usize, ku: usize, entry: impl Fn(usize, usize) -> Complex64) -> Result<Self> {
        let width = 2 * kl + ku + 1;
        let mut a = vec![vec![Complex64::new(0.0, 0.0); width]; n];
        for (i, row) in a.iter_mut().enumerate() {
            for c in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                row[c + kl - i] = entry(i, c);
            }
        }
        let mut piv = vec![0; n];
        let mut mult = vec![Vec::new(); n];
        let (mut min_pivot, mut max_pivot) = (f64::INFINITY, 0.0f64);
        let slot = |i: usize, c: usize| c + kl - i;
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            for i in k + 1..=last {
                if a[i][slot(i, k)].norm() > a[p][slot(p, k)].norm() {
                    p = i;
                }
            }
            piv[k] = p;
            let right = (k + ku + kl).min(n - 1);
            if p != k {
                for c in k..=right {
                    let (sk, sp) = (slot(k, c), slot(p, c));
                    let tmp = a[k][sk];
                    a[k][sk] = a[p][sp];
                    a[p][sp] = tmp;
                }
            }
            let pivot = a[k][slot(k, k)];
            let mag = pivot.norm();
            min_pivot = min_pivot.min(mag);
            max_pivot = max_pivot.max(mag);
            if mag == 0.0 || !mag.is_finite() {
                return Err(Error::Numerical(format!("singular banded system at column {k}")));
            }
            for i in k + 1..=last {
                let f = a[i][slot(i, k)] / pivot;
                mult[k].push(f);
                for c in k + 1..=right {
                    let v = a[k][slot(k, c)];
                    a[i][slot(i, c)] -= f * v;
                }
            }
        }
        Ok(BandedLu {
            n,
            kl,
            ku,
            a,
            piv,
            mult,
            min_pivot,
            max_pivot,
        })
    }

    /// Ratio of extreme pivots, a cheap conditioning indicator.
    pub fn pivot_ratio(&self) -> f64 {
        self.max_pivot / self.min_pivot
    }

    pub fn solve(&self, rhs: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let kl = self.kl;
        let mut x = rhs.to_vec();
        for k in 0..n {
            let p = self.piv[k];
            if p != k {
                x.swap(k, p);
            }
            for (off, f) in self.mult[k].iter().enumerate() {
                let v = x[k];
                x[k + 1 + off] -= f * v;
            }
        }
        for k in (0..n).rev() {
            let right = (k + self.ku + kl).min(n - 1);
            let mut s = x[k];
            for c in k + 1..=right {
                s -= self.a[k][c + kl - k] * x[c];
            }
            x[k] = s / self.a[k][kl];
        }
        x
    }
}

/// Window of `g(z) = (C + e^{iz})(C − e^{iz})^{−1}` and `G(z) = ½(g(z) − g(z̄))`.
#[derive(Clone, Debug)]
pub struct ResolventSlab {
    pub z: Complex64,
    pub lo: usize,
    pub hi: usize,
    /// `g(z)` restricted to rows and columns `lo..=hi`.
    pub g: DMatrix<Complex64>,
    /// `g(z̄)` on the same window.
    pub g_conj: DMatrix<Complex64>,
    pub big_g: DMatrix<Complex64>,
    /// Full rows of `g(z)` for the window rows (length `N` each).
    pub rows: Vec<Vec<Complex64>>,
    pub pivot_ratio: f64,
}

fn double_band(c: &CMVBand) -> Vec<[f64; 5]> {
    c.rows
        .iter()
        .map(|r| std::array::from_fn(|d| r[d].to_f64()))
        .collect()
}

fn shifted_lu(band: &[[f64; 5]], u: Complex64, transpose: bool) -> Result<BandedLu> {
    let n = band.len();
    BandedLu::factor(n, 2, 2, |r, c| {
        let (rr, cc) = if transpose { (c, r) } else { (r, c) };
        let v = band[rr][cc + 2 - rr];
        if r == c {
            Complex64::new(v, 0.0) - u
        } else {
            Complex64::new(v, 0.0)
        }
    })
}

/// Resolvent window for rows and columns `lo..=hi`.
pub fn resolvent(c: &CMVBand, z: Complex64, lo: usize, hi: usize) -> Result<ResolventSlab> {
    if !(z.im > 0.0) {
        return Err(Error::Domain("resolvent needs Im z > 0".into()));
    }
    if hi >= c.size || lo > hi {
        return Err(Error::validation("window", "outside the section"));
    }
    let band = double_band(c);
    let n = c.size;
    let i = Complex64::new(0.0, 1.0);
    let columns = |u: Complex64| -> Result<(DMatrix<Complex64>, f64)> {
        let lu = shifted_lu(&band, u, false)?;
        let w = hi - lo + 1;
        let mut out = DMatrix::zeros(w, w);
        for (jj, col) in (lo..=hi).enumerate() {
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            e[col] = Complex64::new(1.0, 0.0);
            let x = lu.solve(&e);
            for (ii, row) in (lo..=hi).enumerate() {
                let delta = if row == col { 1.0 } else { 0.0 };
                out[(ii, jj)] = 2.0 * u * x[row] + delta;
            }
        }
        Ok((out, lu.pivot_ratio()))
    };
    let u = (i * z).exp();
    let u_bar = (i * z.conj()).exp();
    let (g, ratio) = columns(u)?;
    let (g_conj, _) = columns(u_bar)?;
    let lu_t = shifted_lu(&band, u, true)?;
    let rows = (lo..=hi)
        .map(|r| {
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            e[r] = Complex64::new(1.0, 0.0);
            let y = lu_t.solve(&e);
            y.iter()
                .enumerate()
                .map(|(k, v)| 2.0 * u * v + if k == r { 1.0 } else { 0.0 })
                .collect()
        })
        .collect();
    let big_g = (&g - &g_conj) * Complex64::new(0.5, 0.0);
    Ok(ResolventSlab {
        z,
        lo,
        hi,
        g,
        g_conj,
        big_g,
        rows,
        pivot_ratio: ratio,
    })
}

impl ResolventSlab {
    /// `max |g g† + I − 2 coth(Im z) G|` over the window.
    pub fn herglotz_residual(&self) -> f64 {
        let w = self.hi - self.lo + 1;
        let coth = 1.0 / self.z.im.tanh();
        let mut worst: f64 = 0.0;
        for a in 0..w {
            for b in 0..w {
                let prod: Complex64 = self.rows[a]
                    .iter()
                    .zip(&self.rows[b])
                    .map(|(x, y)| x * y.conj())
                    .sum();
                let id = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((prod + id - 2.0 * coth * self.big_g[(a, b)]).norm());
            }
        }
        worst
    }

    /// `max |g(z)† + g(z̄)|` over the window.
    pub fn pairing_residual(&self) -> f64 {
        let w = self.hi - self.lo + 1;
        let mut worst: f64 = 0.0;
        for a in 0..w {
            for b in 0..w {
                worst = worst.max((self.g[(b, a)].conj() + self.g_conj[(a, b)]).norm());
            }
        }
        worst
    }

    /// Window rows as CSV records `(row, col, re, im)` for `G`.
    pub fn csv_records(&self) -> Vec<(usize, usize, f64, f64)> {
        let w = self.hi - self.lo + 1;
        let mut out = Vec::with_capacity(w * w);
        for a in 0..w {
            for b in 0..w {
                let v = self.big_g[(a, b)];
                out.push((self.lo + a, self.lo + b, v.re, v.im));
            }
        }
        out
    }
}

/// `(−1)^k`.
pub fn alt_sign(k: i64) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `e_k(z) = cos(z/2) − i s_k sin(z/2)`.
pub fn e_k(k: i64, z: Complex64) -> Complex64 {
    let half = z * 0.5;
    half.cos() - Complex64::new(0.0, alt_sign(k)) * half.sin()
}

/// Tridiagonal window of the rotated operator around row `n`, indexed by the offset
/// `k` in row `n − k`, `k = −W..=W+1`.
#[derive(Clone, Debug)]
pub struct RotatedEdgeOperator {
    pub n: usize,
    pub window: usize,
    pub zeta: Complex64,
    pub z: Complex64,
    pub sign: f64,
    pub h: f64,
    pub delta: f64,
    pub theta: f64,
    /// `diag[k + W + 1]` is the entry `(n−k, n−k)`.
    pub diag: Vec<Complex64>,
    /// `lower[k + W + 1]` is the entry `(n−k, n−k−1)`, equal to `(n−k−1, n−k)`.
    pub lower: Vec<Complex64>,
    /// Differences to the truncated expansions, same layout as the entries.
    pub diag_expansion_error: Vec<f64>,
    pub lower_expansion_error: Vec<f64>,
}

/// Detects the global sign `s^(n)` from `(−1)^k α_{n+k}` over `|k| ≤ n^{1/3}`.
pub fn detect_sign(vseq: &VerblunskySequence, n: usize) -> Result<f64> {
    let kmax = (n as f64).cbrt().floor() as i64;
    let mut vote = 0i64;
    let mut total = 0i64;
    for k in -kmax..=kmax {
        let j = n as i64 + k;
        if j < 1 || j as usize > vseq.len() {
            continue;
        }
        let v = alt_sign(k) * vseq.cmv_alpha(j as usize).to_f64();
        vote += if v > 0.0 { 1 } else { -1 };
        total += 1;
    }
    if (vote.abs() as f64) < 0.1 * total as f64 {
        return Err(Error::Numerical("ambiguous global sign s^(n)".into()));
    }
    Ok(if vote > 0 { 1.0 } else { -1.0 })
}

impl RotatedEdgeOperator {
    fn idx(&self, k: i64) -> usize {
        (k + self.window as i64 + 1) as usize
    }

    pub fn offsets(&self) -> std::ops::RangeInclusive<i64> {
        -(self.window as i64)..=(self.window as i64)
    }

    /// Entry `(n−k, n−k)`.
    pub fn diag_at(&self, k: i64) -> Complex64 {
        self.diag[self.idx(k)]
    }

    /// Entry `(n−k, n−k−1)`.
    pub fn lower_at(&self, k: i64) -> Complex64 {
        self.lower[self.idx(k)]
    }

    /// `y_k = (k − ½) h`.
    pub fn y(&self, k: i64) -> f64 {
        (k as f64 - 0.5) * self.h
    }

    /// `δ_k = i s_{n+k+1} δ`.
    pub fn shift(&self, k: i64) -> Complex64 {
        Complex64::new(0.0, alt_sign(self.n as i64 + k + 1) * self.delta)
    }

    /// Largest deviation from the truncated entry expansions over `|k| ≤ kmax`.
    pub fn max_expansion_error(&self, kmax: i64) -> f64 {
        (-kmax..=kmax)
            .map(|k| self.diag_expansion_error[self.idx(k)].max(self.lower_expansion_error[self.idx(k)]))
            .fold(0.0, f64::max)
    }
}

/// Builds `C_r−(θ + ζ n^{−2/3})` on rows `n−k`, `|k| ≤ W`, plus one extra row on each side.
pub fn rotated_minus(
    vseq: &VerblunskySequence,
    ec: &EdgeConstants,
    n: usize,
    zeta: Complex64,
    window: usize,
) -> Result<RotatedEdgeOperator> {
    if window > n / 2 {
        return Err(Error::validation("window", "must satisfy W ≤ n/2"));
    }
    if n + window + 3 > vseq.len() {
        return Err(Error::validation("window", "exceeds the available coefficients"));
    }
    let sign = detect_sign(vseq, n)?;
    let nf = n as f64;
    let h = nf.powf(-1.0 / 3.0);
    let theta = ec.theta;
    let z = Complex64::new(theta, 0.0) + zeta * nf.powf(-2.0 / 3.0);
    let sn = alt_sign(n as i64);
    let i = Complex64::new(0.0, 1.0);
    let alpha = |j: i64| vseq.cmv_alpha(j as usize).to_f64();
    let rho = |j: i64| vseq.cmv_rho(j as usize).to_f64();
    let (sh, ch) = (0.5 * theta).sin_cos();
    let cot = ch / sh;
    let p = ec.p_theta;
    let n23 = nf.powf(-2.0 / 3.0);
    let w = window as i64;
    let mut diag = Vec::new();
    let mut lower = Vec::new();
    let mut diag_err = Vec::new();
    let mut lower_err = Vec::new();
    for k in -(w + 1)..=(w + 1) {
        let r = n as i64 - k;
        let d = -i * sign * sn * (alpha(r) * e_k(r, z) + alpha(r + 1) * e_k(r + 1, z));
        let lo = rho(r) * e_k(r, z);
        let y = (k as f64 - 0.5) * h;
        let s = alt_sign(r);
        let e_theta = e_k(r, Complex64::new(theta, 0.0));
        // expansions to order n^{-1}; the ζ terms use de_k/dz = −(i s_k / 2) e_k
        let lo_exp = sh * e_theta - cot * e_theta * p * y * n23 - 0.5 * i * s * sh * e_theta * zeta * n23
            - 0.5 * cot * e_theta * p / nf;
        let d_exp = -theta.sin() - 2.0 * sh * p * y * n23 - ch * ch * zeta * n23 - i * s * p * ch / nf;
        diag.push(d);
        lower.push(lo);
        diag_err.push((d - d_exp).norm());
        lower_err.push((lo - lo_exp).norm());
    }
    Ok(RotatedEdgeOperator {
        n,
        window,
        zeta,
        z,
        sign,
        h,
        delta: 0.5 * (0.5 * theta).tan(),
        theta,
        diag,
        lower,
        diag_expansion_error: diag_err,
        lower_expansion_error: lower_err,
    })
}

/// Summary of `D = C_r− R★ − I` on the window.
#[derive(Clone, Debug, Serialize)]
pub struct DResidual {
    pub n: usize,
    pub max_norm: f64,
    /// Largest entry per row offset `k` (ascending `k`).
    pub row_profile: Vec<(i64, f64)>,
    /// Largest entry with `|y_k − y_j| ≥ 3`.
    pub far_max: f64,
}

/// `R★_{n−k, n−j} = h^{−1} 𝓡_ζ(y_k + δ_k h, y_j + δ_j h)`.
pub fn r_star(rot: &RotatedEdgeOperator, airy: &AiryResolvent, k: i64, j: i64) -> Result<Complex64> {
    let h = rot.h;
    let zk = rot.y(k) + rot.shift(k) * h;
    let zj = rot.y(j) + rot.shift(j) * h;
    Ok(airy.eval_complex(zk, zj)? / h)
}

/// Computes `C_r− R★ − I` for `|k|, |j| ≤ kmax`.
pub fn approx_resolvent_residual(
    rot: &RotatedEdgeOperator,
    constants: AiryConstants,
    kmax: i64,
) -> Result<DResidual> {
    if kmax > rot.window as i64 {
        return Err(Error::validation("kmax", "exceeds the operator window"));
    }
    let airy = AiryResolvent::new(constants, rot.zeta)?;
    let mut max_norm: f64 = 0.0;
    let mut far_max: f64 = 0.0;
    let mut profile = Vec::new();
    for k in -kmax..=kmax {
        let mut row_max: f64 = 0.0;
        for j in -kmax..=kmax {
            let v = rot.lower_at(k) * r_star(rot, &airy, k + 1, j)?
                + rot.diag_at(k) * r_star(rot, &airy, k, j)?
                + rot.lower_at(k - 1) * r_star(rot, &airy, k - 1, j)?
                - if k == j { 1.0 } else { 0.0 };
            let a = v.norm();
            row_max = row_max.max(a);
            if (rot.y(k) - rot.y(j)).abs() >= 3.0 {
                far_max = far_max.max(a);
            }
        }
        max_norm = max_norm.max(row_max);
        profile.push((k, row_max));
    }
    Ok(DResidual {
        n: rot.n,
        max_norm,
        row_profile: profile,
        far_max,
    })
}
