//! Airy functions, the solutions `ψ±` of `a³ψ'' = (b³x + ζ)ψ`, the resolvent kernel
//! `𝓡_ζ` of `𝓛 = a³ d²/dx² − b³x` and the Airy kernel `Q_Ai`.
//!
//! Small arguments use the Maclaurin series at a precision raised by the expected
//! cancellation; large ones use the Poincaré expansions together with the
//! connection formulas `Bi(z) = e^{iπ/6} Ai(ωz) + e^{−iπ/6} Ai(ω̄z)`.

use crate::quad;
use crate::{Complex64, Error, Result};
use rug::{Complex, Float};
use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, PI};
use std::sync::OnceLock;

/// Radius beyond which the asymptotic expansions are used.
pub const SERIES_RADIUS: f64 = 12.0;

/// Largest accepted `|x|` outside the oscillatory sector `|arg x| ≥ 2π/3`.
pub const DOMAIN_RADIUS: f64 = 50.0;

/// Largest accepted `|x|` inside the oscillatory sector.
pub const OSCILLATORY_RADIUS: f64 = 1.0e4;

/// `Ai`, `Bi`, their derivatives and `Ci = i Ai − Bi` at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AiryValues {
    pub ai: Complex64,
    pub aip: Complex64,
    pub bi: Complex64,
    pub bip: Complex64,
    pub ci: Complex64,
    pub cip: Complex64,
    /// Estimated absolute error of the largest of the four values.
    pub error_estimate: f64,
}

impl AiryValues {
    fn new(ai: Complex64, aip: Complex64, bi: Complex64, bip: Complex64, err: f64) -> Self {
        let i = Complex64::new(0.0, 1.0);
        AiryValues {
            ai,
            aip,
            bi,
            bip,
            ci: i * ai - bi,
            cip: i * aip - bip,
            error_estimate: err,
        }
    }

    /// `Ci_σ = σ i Ai − Bi` and its derivative by direct combination; see [`ci_values`] where `Ci_σ` is small.
    pub fn ci_sigma(&self, sigma: f64) -> (Complex64, Complex64) {
        let i = Complex64::new(0.0, sigma);
        (i * self.ai - self.bi, i * self.aip - self.bip)
    }
}

/// Airy values at a complex point.
pub fn airy_values(x: Complex64) -> Result<AiryValues> {
    let r = x.norm();
    if !r.is_finite() {
        return Err(Error::Domain("non-finite Airy argument".into()));
    }
    let oscillatory = x.arg().abs() >= 2.0 * FRAC_PI_3;
    if r > DOMAIN_RADIUS && !(oscillatory && r <= OSCILLATORY_RADIUS) {
        return Err(Error::Domain(format!("Airy argument |x| = {r} beyond the supported domain")));
    }
    if r <= SERIES_RADIUS {
        if x.im == 0.0 {
            return Ok(series_real(x.re));
        }
        Ok(series(x))
    } else {
        Ok(asymptotic(x))
    }
}

/// `Ai` and `Ai'` alone, for `|x| ≤` [`OSCILLATORY_RADIUS`] in any direction.
pub fn ai_values(x: Complex64) -> Result<(Complex64, Complex64)> {
    let r = x.norm();
    if !(r.is_finite() && r <= OSCILLATORY_RADIUS) {
        return Err(Error::Domain(format!("Airy argument |x| = {r} beyond the supported domain")));
    }
    let (ai, aip) = if r <= SERIES_RADIUS {
        let v = if x.im == 0.0 { series_real(x.re) } else { series(x) };
        (v.ai, v.aip)
    } else {
        let (ai, aip, _) = ai_large(x);
        (ai, aip)
    };
    if !(ai.re.is_finite() && ai.im.is_finite() && aip.re.is_finite() && aip.im.is_finite()) {
        return Err(Error::Domain(format!("Ai overflows at {x}")));
    }
    Ok((ai, aip))
}

/// `Ci_σ(x) = σ i Ai(x) − Bi(x)` and its derivative through the single rotated value
/// `Ci_σ(x) = 2 e^{5σπi/6} Ai(x e^{−2σπi/3})`, which stays accurate where `Ci_σ` is recessive.
pub fn ci_values(x: Complex64, sigma: f64) -> Result<(Complex64, Complex64)> {
    let s = if sigma < 0.0 { -1.0 } else { 1.0 };
    let w = x * Complex64::from_polar(1.0, -s * 2.0 * FRAC_PI_3);
    let (a, ap) = ai_values(w)?;
    let c = Complex64::from_polar(2.0, s * 5.0 * PI / 6.0);
    let cp = Complex64::from_polar(2.0, s * PI / 6.0);
    Ok((c * a, cp * ap))
}

/// Real-axis `Ai` and `Ai'`.
pub fn ai_real(x: f64) -> Result<(f64, f64)> {
    let v = airy_values(Complex64::new(x, 0.0))?;
    Ok((v.ai.re, v.aip.re))
}

fn series_precision(r: f64) -> u32 {
    let cancel = 2.0 * (2.0 / 3.0) * r.powf(1.5) * std::f64::consts::LOG2_E;
    53 + 64 + cancel.ceil() as u32
}

const ORIGIN_PREC: u32 = 320;

/// `Ai(0)` and `−Ai'(0)` at up to 320 bits, computed once.
fn origin_values(prec: u32) -> (Float, Float) {
    static CELL: OnceLock<(Float, Float)> = OnceLock::new();
    let (a, b) = CELL.get_or_init(|| {
        let p = ORIGIN_PREC;
        let third = Float::with_val(p, 1) / 3u32;
        let two_thirds = Float::with_val(p, 2) / 3u32;
        let ln3 = Float::with_val(p, 3).ln();
        let c1 = (-Float::with_val(p, &ln3 * &two_thirds)).exp() / two_thirds.clone().gamma();
        let c2 = (-Float::with_val(p, &ln3 * &third)).exp() / third.gamma();
        (c1, c2)
    });
    (Float::with_val(prec.min(ORIGIN_PREC), a), Float::with_val(prec.min(ORIGIN_PREC), b))
}

/// Maclaurin series evaluated in multiprecision.
pub fn series(x: Complex64) -> AiryValues {
    let prec = series_precision(x.norm());
    let z = Complex::with_val(prec, (x.re, x.im));
    let z2 = Complex::with_val(prec, z.square_ref());
    let z3 = Complex::with_val(prec, &z2 * &z);
    let (c1, c2) = origin_values(prec);

    let mut f = Complex::with_val(prec, 1);
    let mut g = z.clone();
    let mut fp = Complex::with_val(prec, 0);
    let mut gp = Complex::with_val(prec, 1);
    let mut tf = Complex::with_val(prec, 1);
    let mut tg = z.clone();
    let mut tfp = Complex::with_val(prec, &z2 / 2u32);
    let mut tgp = Complex::with_val(prec, 1);
    let tiny = Float::with_val(prec, Float::i_exp(1, -(prec as i32) - 8));
    let mut k: u32 = 1;
    loop {
        if k > 1 {
            tfp *= &z3;
            tfp /= (3 * k - 1) * 3 * (k - 1);
        }
        fp += &tfp;
        tf *= &z3;
        tf /= (3 * k - 1) * (3 * k);
        f += &tf;
        tg *= &z3;
        tg /= (3 * k) * (3 * k + 1);
        g += &tg;
        tgp *= &z3;
        tgp /= (3 * k - 2) * (3 * k);
        gp += &tgp;
        let mag = Float::with_val(prec, tf.abs_ref()) + Float::with_val(prec, tg.abs_ref())
            + Float::with_val(prec, tfp.abs_ref())
            + Float::with_val(prec, tgp.abs_ref());
        if k > 2 && mag < tiny {
            break;
        }
        k += 1;
    }
    let sqrt3 = Float::with_val(prec, 3).sqrt();
    let ai = Complex::with_val(prec, &f * &c1) - Complex::with_val(prec, &g * &c2);
    let aip = Complex::with_val(prec, &fp * &c1) - Complex::with_val(prec, &gp * &c2);
    let bi = (Complex::with_val(prec, &f * &c1) + Complex::with_val(prec, &g * &c2)) * &sqrt3;
    let bip = (Complex::with_val(prec, &fp * &c1) + Complex::with_val(prec, &gp * &c2)) * &sqrt3;
    let c = |v: &Complex| Complex64::new(v.real().to_f64(), v.imag().to_f64());
    let (ai, aip, bi, bip) = (c(&ai), c(&aip), c(&bi), c(&bip));
    let scale = ai.norm().max(aip.norm()).max(bi.norm()).max(bip.norm());
    AiryValues::new(ai, aip, bi, bip, scale * f64::EPSILON)
}

/// Maclaurin series on the real axis.
pub fn series_real(x: f64) -> AiryValues {
    let prec = series_precision(x.abs());
    let z = Float::with_val(prec, x);
    let z2 = Float::with_val(prec, z.square_ref());
    let z3 = Float::with_val(prec, &z2 * &z);
    let (c1, c2) = origin_values(prec);

    let mut f = Float::with_val(prec, 1);
    let mut g = z.clone();
    let mut fp = Float::with_val(prec, 0);
    let mut gp = Float::with_val(prec, 1);
    let mut tf = Float::with_val(prec, 1);
    let mut tg = z.clone();
    let mut tfp = Float::with_val(prec, &z2 / 2u32);
    let mut tgp = Float::with_val(prec, 1);
    let tiny = Float::with_val(prec, Float::i_exp(1, -(prec as i32) - 8));
    let mut k: u32 = 1;
    loop {
        if k > 1 {
            tfp *= &z3;
            tfp /= (3 * k - 1) * 3 * (k - 1);
        }
        fp += &tfp;
        tf *= &z3;
        tf /= (3 * k - 1) * (3 * k);
        f += &tf;
        tg *= &z3;
        tg /= (3 * k) * (3 * k + 1);
        g += &tg;
        tgp *= &z3;
        tgp /= (3 * k - 2) * (3 * k);
        gp += &tgp;
        let mag = Float::with_val(prec, tf.abs_ref()) + Float::with_val(prec, tg.abs_ref())
            + Float::with_val(prec, tfp.abs_ref())
            + Float::with_val(prec, tgp.abs_ref());
        if k > 2 && mag < tiny {
            break;
        }
        k += 1;
    }
    let sqrt3 = Float::with_val(prec, 3).sqrt();
    let (fc, gc) = (Float::with_val(prec, &f * &c1), Float::with_val(prec, &g * &c2));
    let (fpc, gpc) = (Float::with_val(prec, &fp * &c1), Float::with_val(prec, &gp * &c2));
    let ai = Float::with_val(prec, &fc - &gc).to_f64();
    let aip = Float::with_val(prec, &fpc - &gpc).to_f64();
    let bi = (Float::with_val(prec, &fc + &gc) * &sqrt3).to_f64();
    let bip = (Float::with_val(prec, &fpc + &gpc) * &sqrt3).to_f64();
    let r = |v: f64| Complex64::new(v, 0.0);
    let scale = ai.abs().max(aip.abs()).max(bi.abs()).max(bip.abs());
    AiryValues::new(r(ai), r(aip), r(bi), r(bip), scale * f64::EPSILON)
}

/// Coefficients `u_k`, `v_k` of the Poincaré expansions.
fn uv_coefficients(count: usize) -> (Vec<f64>, Vec<f64>) {
    let mut u = vec![1.0];
    let mut v = vec![1.0];
    for k in 1..count {
        let kf = k as f64;
        let uk = u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
            / ((2.0 * kf - 1.0) * 216.0 * kf);
        u.push(uk);
        v.push(-(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * uk);
    }
    (u, v)
}

const UV_TERMS: usize = 40;

/// Sums `Σ_{k ∈ start, start+step, …} sign_k c_k ξ^{−k}`, stopping once terms stop shrinking.
fn asym_sum(coef: &[f64], xi_inv: Complex64, start: usize, step: usize, alternate: bool) -> (Complex64, f64) {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut prev = f64::INFINITY;
    let mut last = 0.0;
    let mut k = start;
    let mut idx = 0;
    let base = xi_inv.powu(start as u32);
    let stride = xi_inv.powu(step as u32);
    let mut pw = base;
    while k < coef.len() {
        let sign = if alternate && idx % 2 == 1 { -1.0 } else { 1.0 };
        let term = pw * coef[k] * sign;
        let mag = term.norm();
        if mag > prev {
            break;
        }
        sum += term;
        last = mag;
        if mag < 1e-18 * sum.norm() {
            break;
        }
        prev = mag;
        k += step;
        idx += 1;
        pw *= stride;
    }
    (sum, last)
}

/// `(Ai(w), Ai'(w))` for `|arg w| ≤ 2π/3`, `|w|` large.
fn ai_principal(w: Complex64) -> (Complex64, Complex64, f64) {
    let (u, v) = uv_coefficients(UV_TERMS);
    let lw = w.ln();
    let xi = (lw * 1.5).exp() * (2.0 / 3.0);
    let q = (lw * 0.25).exp();
    let xi_inv = xi.inv();
    let alt: Vec<f64> = (0..UV_TERMS).map(|k| if k % 2 == 0 { u[k] } else { -u[k] }).collect();
    let altv: Vec<f64> = (0..UV_TERMS).map(|k| if k % 2 == 0 { v[k] } else { -v[k] }).collect();
    let (su, eu) = asym_sum(&alt, xi_inv, 0, 1, false);
    let (sv, ev) = asym_sum(&altv, xi_inv, 0, 1, false);
    let pre = (-xi).exp() / (2.0 * PI.sqrt());
    let ai = pre / q * su;
    let aip = -pre * q * sv;
    (ai, aip, (eu * (pre / q).norm()).max(ev * (pre * q).norm()))
}

/// `(Ai(−w), Ai'(−w))` for `|arg w| ≤ π/3`, `|w|` large.
fn ai_negative(w: Complex64) -> (Complex64, Complex64, f64) {
    let (u, v) = uv_coefficients(UV_TERMS);
    let lw = w.ln();
    let xi = (lw * 1.5).exp() * (2.0 / 3.0);
    let q = (lw * 0.25).exp();
    let xi_inv = xi.inv();
    let (ue, e1) = asym_sum(&u, xi_inv, 0, 2, true);
    let (uo, e2) = asym_sum(&u, xi_inv, 1, 2, true);
    let (ve, e3) = asym_sum(&v, xi_inv, 0, 2, true);
    let (vo, e4) = asym_sum(&v, xi_inv, 1, 2, true);
    let phase = xi - FRAC_PI_4;
    let (c, s) = (phase.cos(), phase.sin());
    let sp = PI.sqrt();
    let ai = (c * ue + s * uo) / (sp * q);
    let aip = q / sp * (s * ve - c * vo);
    let env = c.norm() + s.norm();
    (ai, aip, env * (e1 + e2 + e3 + e4) * (q.norm() + 1.0 / q.norm()) / sp)
}

/// `(Ai(z), Ai'(z))` for large `|z|`, any argument.
fn ai_large(z: Complex64) -> (Complex64, Complex64, f64) {
    if z.arg().abs() <= 2.0 * FRAC_PI_3 {
        ai_principal(z)
    } else {
        ai_negative(-z)
    }
}

/// Asymptotic evaluation for `|x| > 12`.
pub fn asymptotic(x: Complex64) -> AiryValues {
    let omega = Complex64::from_polar(1.0, 2.0 * FRAC_PI_3);
    let (ai, aip, e0) = ai_large(x);
    let (a1, a1p, e1) = ai_large(omega * x);
    let (a2, a2p, e2) = ai_large(omega.conj() * x);
    let p = Complex64::from_polar(1.0, PI / 6.0);
    let bi = p * a1 + p.conj() * a2;
    let bip = p * omega * a1p + p.conj() * omega.conj() * a2p;
    let scale = ai.norm().max(aip.norm()).max(bi.norm()).max(bip.norm());
    AiryValues::new(ai, aip, bi, bip, (e0 + e1 + e2).max(scale * f64::EPSILON))
}

/// Operator constants `a`, `b` of `𝓛 = a³ d²/dx² − b³ x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AiryConstants {
    pub a: f64,
    pub b: f64,
}

impl AiryConstants {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::validation("airy constants", "a and b must be positive"));
        }
        Ok(AiryConstants { a, b })
    }

    pub fn unit() -> Self {
        AiryConstants { a: 1.0, b: 1.0 }
    }

    /// `X_{x,ζ} = a⁻¹ b x + a⁻¹ b⁻² ζ`.
    pub fn argument(&self, x: Complex64, zeta: Complex64) -> Complex64 {
        x * (self.b / self.a) + zeta / (self.a * self.b * self.b)
    }

    /// Normalization `π a⁻² b⁻¹` of the resolvent kernel.
    pub fn green_factor(&self) -> f64 {
        PI / (self.a * self.a * self.b)
    }
}

/// Which of the two solutions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

fn sigma(zeta: Complex64) -> Result<f64> {
    if zeta.im == 0.0 {
        return Err(Error::Domain("ζ must have nonzero imaginary part".into()));
    }
    Ok(zeta.im.signum())
}

/// `ψ±(x, ζ)` and its `x`-derivative at a complex point.
pub fn psi_complex(x: Complex64, zeta: Complex64, c: AiryConstants, side: Side) -> Result<(Complex64, Complex64)> {
    let s = sigma(zeta)?;
    let arg = c.argument(x, zeta);
    let dx = c.b / c.a;
    let (f, fp) = match side {
        Side::Plus => ai_values(arg)?,
        Side::Minus => ci_values(arg, s)?,
    };
    Ok((f, fp * dx))
}

/// `ψ+(x, ζ) = Ai(X)`, `ψ−(x, ζ) = Ci_σ(X)` with `σ = sign Im ζ`.
pub fn psi(x: f64, zeta: Complex64, c: AiryConstants, side: Side) -> Result<Complex64> {
    Ok(psi_complex(Complex64::new(x, 0.0), zeta, c, side)?.0)
}

/// Resolvent kernel of `𝓛 − ζ` in product form.
#[derive(Clone, Copy, Debug)]
pub struct AiryResolvent {
    pub constants: AiryConstants,
    pub zeta: Complex64,
}

impl AiryResolvent {
    pub fn new(constants: AiryConstants, zeta: Complex64) -> Result<Self> {
        sigma(zeta)?;
        Ok(AiryResolvent { constants, zeta })
    }

    /// `𝓡_ζ(z, w)`, branch chosen by comparing real parts.
    pub fn eval_complex(&self, z: Complex64, w: Complex64) -> Result<Complex64> {
        let (lo, hi) = if z.re <= w.re { (z, w) } else { (w, z) };
        let m = psi_complex(lo, self.zeta, self.constants, Side::Minus)?.0;
        let p = psi_complex(hi, self.zeta, self.constants, Side::Plus)?.0;
        Ok(self.constants.green_factor() * m * p)
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<Complex64> {
        self.eval_complex(Complex64::new(x, 0.0), Complex64::new(y, 0.0))
    }
}

/// `𝓡_ζ(x, y)` from the product of `ψ−` and `ψ+`.
pub fn resolvent_product(x: f64, y: f64, zeta: Complex64, c: AiryConstants) -> Result<Complex64> {
    AiryResolvent::new(c, zeta)?.eval(x, y)
}

/// `𝓡_ζ(x, y)` from its spectral representation over the Airy functions.
///
/// The `t`-integral is rewritten through the Fourier transform of `Ai(X+t) Ai(Y+t)`,
/// `𝓡 = i e^{iπ/4} / (2√π) ∫_0^∞ s^{−1/2} exp(i[ζs + s³/12 + s(X+Y)/2 − (X−Y)²/(4s)]) ds`
/// (unit constants), and the ray is rotated to `arg s = π/6` where every term decays.
pub fn resolvent_integral(x: f64, y: f64, zeta: Complex64, c: AiryConstants) -> Result<Complex64> {
    if zeta.im.abs() < 0.5 {
        return Err(Error::Domain("integral representation needs |Im ζ| ≥ 0.5".into()));
    }
    if zeta.im < 0.0 {
        return Ok(resolvent_integral(x, y, zeta.conj(), c)?.conj());
    }
    let xs = x * c.b / c.a;
    let ys = y * c.b / c.a;
    let zs = zeta / (c.a * c.b * c.b);
    let ray = Complex64::from_polar(1.0, PI / 6.0);
    let i = Complex64::new(0.0, 1.0);
    let integrand = |u: f64| -> Complex64 {
        let r = u * u;
        if r == 0.0 {
            return if xs == ys { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
        }
        let s = ray * r;
        let phase = zs * s + s * s * s / 12.0 + s * (xs + ys) * 0.5 - (xs - ys) * (xs - ys) / (s * 4.0);
        (i * phase).exp()
    };
    // beyond r* the cubic term bounds the integrand by e^{−80}
    let growth = zs.norm() + 0.5 * (xs + ys).abs() + 1.0;
    let mut r_star: f64 = 1.0;
    while r_star.powi(3) / 12.0 - growth * r_star < 80.0 {
        r_star += 0.25;
    }
    let u_max = r_star.sqrt();
    let run = |width: f64, order: usize| -> Complex64 {
        let (nodes, weights) = quad::gauss_legendre(order);
        let mut total = Complex64::new(0.0, 0.0);
        let mut a = 0.0;
        while a < u_max {
            let b = a + width;
            for (t, w) in nodes.iter().zip(&weights) {
                let u = 0.5 * (a + b) + 0.5 * width * t;
                total += integrand(u) * (0.5 * width * w);
            }
            a = b;
        }
        total
    };
    let mut width = 0.25;
    let mut prev = run(width, 24);
    let mut converged = None;
    for _ in 0..5 {
        width *= 0.5;
        let next = run(width, 24);
        if (next - prev).norm() <= 1e-13 * (1.0 + next.norm()) {
            converged = Some(next);
            break;
        }
        prev = next;
    }
    let fine = converged.ok_or_else(|| Error::Numerical("resolvent integral not converged".into()))?;
    let pre = i * Complex64::from_polar(1.0, PI / 3.0) / PI.sqrt();
    Ok(pre * fine / (c.a * c.a * c.b))
}

/// `Q_Ai(x, y) = (Ai(x) Ai'(y) − Ai'(x) Ai(y)) / (x − y)` with the confluent limit on the diagonal.
pub fn airy_kernel(x: f64, y: f64) -> Result<f64> {
    let d = x - y;
    if d.abs() < 1e-3 {
        // expansion about the midpoint in ε = (x − y)/2
        let m = 0.5 * (x + y);
        let (a0, a1) = ai_real(m)?;
        let a2 = m * a0;
        let a3 = a0 + m * a1;
        let a4 = 2.0 * a1 + m * m * a0;
        let e2 = 0.25 * d * d;
        return Ok((a1 * a1 - a0 * a2) + e2 * (-a0 * a4 / 6.0 + 2.0 * a1 * a3 / 3.0 - a2 * a2 / 2.0));
    }
    let (ax, axp) = ai_real(x)?;
    let (ay, ayp) = ai_real(y)?;
    Ok((ax * ayp - axp * ay) / d)
}

/// `Q_Ai(x, y) = ∫_0^∞ Ai(x+t) Ai(y+t) dt` by unit-width Gauss–Legendre panels.
pub fn airy_kernel_integral(x: f64, y: f64) -> Result<f64> {
    let (nodes, weights) = quad::gauss_legendre(24);
    let mut total = 0.0;
    let mut a = 0.0;
    loop {
        let b = a + 1.0;
        let mut panel = 0.0;
        for (t, w) in nodes.iter().zip(&weights) {
            let s = a + 0.5 + 0.5 * t;
            panel += 0.5 * w * ai_real(x + s)?.0 * ai_real(y + s)?.0;
        }
        total += panel;
        let tail = (ai_real(x + b)?.0 * ai_real(y + b)?.0).abs();
        if tail < 1e-30 && a + x.min(y) > 0.0 {
            return Ok(total);
        }
        a = b;
        if x.min(y) + a > DOMAIN_RADIUS - 1.0 {
            return Ok(total);
        }
    }
}

/// `Ai(0)` in closed form.
pub fn ai_zero() -> f64 {
    let p = 128;
    let v = Float::with_val(p, 3).ln() * Float::with_val(p, -2) / 3u32;
    (v.exp() / (Float::with_val(p, 2) / 3u32).gamma()).to_f64()
}

/// `Ai'(0)` in closed form.
pub fn aip_zero() -> f64 {
    let p = 128;
    let v = Float::with_val(p, 3).ln() * Float::with_val(p, -1) / 3u32;
    (-(v.exp() / (Float::with_val(p, 1) / 3u32).gamma())).to_f64()
}
