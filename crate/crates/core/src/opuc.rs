//! Orthogonal polynomials on the unit circle for the weight `w_n(λ) = exp(−n V(cos λ))`.
//!
//! Conventions: `⟨f, g⟩ = ∫_{-π}^{π} f ḡ w dλ`, moments `c_j = ∫ e^{−ijλ} w dλ`, and the
//! Szegő recurrence `Φ_{k+1}(z) = z Φ_k(z) − ᾱ_k Φ*_k(z)`. The CMV Laurent basis is
//! `χ_{2k}(λ) = e^{ikλ} φ_{2k}(e^{−iλ})`, `χ_{2k+1}(λ) = e^{−ikλ} φ_{2k+1}(e^{iλ})`.

use crate::equilibrium::{EdgeConstants, Potential};
use crate::mp;
use crate::{Complex64, Error, Result};
use rayon::prelude::*;
use rug::{Complex, Float};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Default working precision in bits.
pub const DEFAULT_PRECISION: u32 = 256;

/// The varying weight `exp(−n V(cos λ))` together with its working precision.
#[derive(Clone, Debug)]
pub struct WeightSpec {
    pub n: usize,
    pub potential: Potential,
    pub precision_bits: u32,
}

impl WeightSpec {
    /// Smallest precision allowed by the dynamic-range rule.
    pub fn required_bits(n: usize, pot: &Potential) -> u32 {
        mp::bits_for_range(n as f64 * pot.oscillation(), 128).max(128)
    }

    /// Builds a weight with `max(requested or 256, dynamic-range bits)` of precision.
    pub fn new(n: usize, pot: &Potential, precision_bits: Option<u32>) -> Result<Self> {
        if n == 0 {
            return Err(Error::validation("n", "must be positive"));
        }
        let floor = Self::required_bits(n, pot);
        let requested = precision_bits.unwrap_or(DEFAULT_PRECISION);
        if requested < 128 {
            return Err(Error::validation("precision_bits", "must be at least 128"));
        }
        Ok(WeightSpec {
            n,
            potential: pot.clone(),
            precision_bits: requested.max(floor),
        })
    }

    pub fn prec(&self) -> u32 {
        self.precision_bits
    }

    /// `−n V(cos λ)` from an already computed `cos λ`.
    fn log_weight_from_cos(&self, c: &Float) -> Float {
        let p = self.prec();
        let mut v = Float::with_val(p, 0);
        for coef in self.potential.coeffs.iter().rev() {
            v *= c;
            v += coef;
        }
        v * -(self.n as f64)
    }

    pub fn log_weight(&self, lambda: f64) -> Float {
        self.log_weight_mp(&Float::with_val(self.prec(), lambda))
    }

    /// `−n V(cos λ)` for `λ` given at working precision.
    pub fn log_weight_mp(&self, lambda: &Float) -> Float {
        let c = Float::with_val(self.prec(), lambda.cos_ref());
        self.log_weight_from_cos(&c)
    }
}

/// `w_n(λ)` at working precision.
pub fn weight_eval(w: &WeightSpec, lambda: f64) -> Float {
    w.log_weight(lambda).exp()
}

/// Trigonometric moments `c_0..c_K` of an even weight.
#[derive(Clone, Debug)]
pub struct MomentTable {
    pub c: Vec<Float>,
    pub k: usize,
    pub nodes: usize,
    pub error_estimate: f64,
}

fn trapezoid_moments(w: &WeightSpec, k: usize, nodes: usize) -> Vec<Float> {
    let p = w.prec();
    let two_pi = mp::pi(p) * 2u32;
    // cos(2π m / N) for m = 0..N, weight samples on the symmetric half
    let cos_table: Vec<Float> = (0..nodes)
        .into_par_iter()
        .map(|m| {
            let t = Float::with_val(p, &two_pi * m as u32) / nodes as u32;
            t.cos()
        })
        .collect();
    let half = nodes / 2;
    let weights: Vec<Float> = (0..=half)
        .into_par_iter()
        .map(|m| w.log_weight_from_cos(&cos_table[m]).exp())
        .collect();
    let scale = Float::with_val(p, &two_pi / nodes as u32);
    (0..=k)
        .into_par_iter()
        .map(|j| {
            let mut acc = Float::with_val(p, &weights[0]);
            for m in 1..half {
                let idx = (j * m) % nodes;
                acc += Float::with_val(p, &weights[m] * &cos_table[idx]) * 2u32;
            }
            let idx = (j * half) % nodes;
            acc += Float::with_val(p, &weights[half] * &cos_table[idx]);
            acc * &scale
        })
        .collect()
}

/// Moments by the uniform trapezoid rule, doubling the grid until all `c_j` settle.
pub fn moments(w: &WeightSpec, k: usize) -> Result<MomentTable> {
    if k < 1 {
        return Err(Error::validation("K", "must be at least 1"));
    }
    let p = w.prec();
    let mut nodes = (2 * k + 2).next_power_of_two().max(64);
    let mut prev = trapezoid_moments(w, k, nodes);
    let target = Float::with_val(p, Float::i_exp(1, -(p as i32 - 16)));
    for _ in 0..12 {
        nodes *= 2;
        let cur = trapezoid_moments(w, k, nodes);
        let c0 = Float::with_val(p, cur[0].abs_ref());
        let mut worst = Float::with_val(p, 0);
        for (a, b) in cur.iter().zip(&prev) {
            let d = Float::with_val(p, a - b).abs();
            if d > worst {
                worst = d;
            }
        }
        let rel = Float::with_val(p, &worst / &c0);
        if rel <= target {
            return Ok(MomentTable {
                c: cur,
                k,
                nodes,
                error_estimate: rel.to_f64(),
            });
        }
        prev = cur;
    }
    Err(Error::Numerical(format!(
        "moments did not converge after 12 doublings ({nodes} nodes)"
    )))
}

/// Verblunsky coefficients `α_0..α_{m−1}` (real, even weights) with `ρ_k = √(1 − α_k²)`.
#[derive(Clone, Debug)]
pub struct VerblunskySequence {
    pub alpha: Vec<Float>,
    pub rho: Vec<Float>,
    pub c0: Float,
}

impl VerblunskySequence {
    pub fn from_alphas(c0: Float, alpha: Vec<Float>) -> Result<Self> {
        let mut rho = Vec::with_capacity(alpha.len());
        for (k, a) in alpha.iter().enumerate() {
            let r2 = Float::with_val(a.prec(), 1 - Float::with_val(a.prec(), a * a));
            if r2 <= 0 {
                return Err(Error::Numerical(format!(
                    "|α_{k}| ≥ 1 at {} bits; raise precision_bits",
                    a.prec()
                )));
            }
            rho.push(r2.sqrt());
        }
        Ok(VerblunskySequence { alpha, rho, c0 })
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn prec(&self) -> u32 {
        self.c0.prec()
    }

    /// Coefficient entering the CMV blocks `Θ_j` (one-based): `−α_{j−1}`.
    pub fn cmv_alpha(&self, j: usize) -> Float {
        assert!(j >= 1, "CMV coefficients are indexed from 1");
        Float::with_val(self.prec(), -&self.alpha[j - 1])
    }

    /// `ρ` paired with [`cmv_alpha`](Self::cmv_alpha).
    pub fn cmv_rho(&self, j: usize) -> Float {
        self.rho[j - 1].clone()
    }
}

/// Levinson recursion on the moment table.
pub fn levinson(mom: &MomentTable, m: usize) -> Result<VerblunskySequence> {
    if m > mom.k {
        return Err(Error::validation("m", format!("needs m ≤ K = {}", mom.k)));
    }
    let c = &mom.c;
    let p = c[0].prec();
    let mut energy = c[0].clone();
    let mut phi: Vec<Float> = vec![Float::with_val(p, 1)];
    let mut alpha = Vec::with_capacity(m);
    for k in 0..m {
        let mut num = Float::with_val(p, 0);
        for (i, f) in phi.iter().enumerate() {
            num += Float::with_val(p, f * &c[i + 1]);
        }
        let a = Float::with_val(p, &num / &energy);
        let one_minus = Float::with_val(p, 1 - Float::with_val(p, &a * &a));
        if one_minus <= 0 {
            return Err(Error::Numerical(format!(
                "precision exhausted at k = {k}: 1 − α² ≤ 0 at {p} bits; raise precision_bits"
            )));
        }
        let mut next = Vec::with_capacity(k + 2);
        for i in 0..=k + 1 {
            let shifted = if i >= 1 { phi[i - 1].clone() } else { Float::with_val(p, 0) };
            let reversed = if i <= k {
                Float::with_val(p, &a * &phi[k - i])
            } else {
                Float::with_val(p, 0)
            };
            next.push(shifted - reversed);
        }
        phi = next;
        energy *= one_minus;
        alpha.push(a);
    }
    VerblunskySequence::from_alphas(c[0].clone(), alpha)
}

/// Orthonormal values `(φ_k(e^{iλ}), φ*_k(e^{iλ}))` for `k = 0..=upto`.
pub fn szego_eval(vseq: &VerblunskySequence, lambda: f64, upto: usize) -> Result<Vec<(Complex, Complex)>> {
    let p = vseq.prec();
    szego_eval_at(vseq, &mp::cis(p, &Float::with_val(p, lambda)), upto)
}

/// [`szego_eval`] at an arbitrary point `z` given at working precision.
pub fn szego_eval_at(vseq: &VerblunskySequence, z: &Complex, upto: usize) -> Result<Vec<(Complex, Complex)>> {
    if upto > vseq.len() {
        return Err(Error::validation("upto", format!("exceeds sequence length {}", vseq.len())));
    }
    let p = vseq.prec();
    let start = Float::with_val(p, vseq.c0.sqrt_ref()).recip();
    let mut phi = Complex::with_val(p, (&start, 0));
    let mut star = phi.clone();
    let mut out = Vec::with_capacity(upto + 1);
    out.push((phi.clone(), star.clone()));
    for k in 0..upto {
        let zphi = Complex::with_val(p, z * &phi);
        let a = &vseq.alpha[k];
        let r = &vseq.rho[k];
        let next = (Complex::with_val(p, &zphi - Complex::with_val(p, &star * a))) / r;
        let next_star = (Complex::with_val(p, &star - Complex::with_val(p, &zphi * a))) / r;
        phi = next;
        star = next_star;
        out.push((phi.clone(), star.clone()));
    }
    Ok(out)
}

/// CMV basis values `χ_0..χ_upto` at `λ`.
pub fn chi_eval(vseq: &VerblunskySequence, lambda: f64, upto: usize) -> Result<Vec<Complex>> {
    let vals = szego_eval(vseq, lambda, upto)?;
    let p = vseq.prec();
    let lam = Float::with_val(p, lambda);
    Ok(vals
        .into_iter()
        .enumerate()
        .map(|(j, (phi, _))| {
            let k = (j / 2) as i64;
            if j % 2 == 0 {
                let phase = mp::cis(p, &Float::with_val(p, &lam * k));
                phase * phi.conj()
            } else {
                let phase = mp::cis(p, &Float::with_val(p, &lam * -k));
                phase * phi
            }
        })
        .collect())
}

/// Reproducing kernel `K_m(λ, μ) = Σ_{k<m} χ_k(λ) conj χ_k(μ) √(w(λ) w(μ))`.
#[derive(Clone, Debug)]
pub struct KernelEvaluator {
    pub weight: WeightSpec,
    pub vseq: VerblunskySequence,
    pub m: usize,
}

impl KernelEvaluator {
    pub fn new(weight: WeightSpec, vseq: VerblunskySequence, m: usize) -> Result<Self> {
        if m == 0 || m > vseq.len() + 1 {
            return Err(Error::validation(
                "m",
                format!("kernel truncation must lie in 1..={}", vseq.len() + 1),
            ));
        }
        Ok(KernelEvaluator { weight, vseq, m })
    }

    /// `χ_k(λ) w(λ)^{1/2}` for `k < m` at working precision.
    pub fn basis_mp(&self, lambda: f64) -> Vec<Complex> {
        let chi = chi_eval(&self.vseq, lambda, self.m - 1).expect("m checked at construction");
        let half = (self.weight.log_weight(lambda) / 2u32).exp();
        chi.into_iter().map(|c| c * &half).collect()
    }

    /// `χ_k(λ) w(λ)^{1/2}` rounded to double precision.
    pub fn basis(&self, lambda: f64) -> Vec<Complex64> {
        self.basis_mp(lambda).iter().map(mp::to_c64).collect()
    }

    /// Kernel value by direct summation at working precision.
    pub fn kernel(&self, lambda: f64, mu: f64) -> Complex64 {
        let a = self.basis_mp(lambda);
        let b = if lambda == mu { a.clone() } else { self.basis_mp(mu) };
        let p = self.weight.prec();
        let mut acc = Complex::with_val(p, 0);
        for (x, y) in a.iter().zip(&b) {
            acc += Complex::with_val(p, x * Complex::with_val(p, y.conj_ref()));
        }
        mp::to_c64(&acc)
    }

    /// Kernel matrix on a point set. Basis vectors are computed at working precision
    /// and the Gram sums in double precision.
    pub fn kernel_matrix(&self, points: &[f64]) -> nalgebra::DMatrix<Complex64> {
        let basis: Vec<Vec<Complex64>> = points.par_iter().map(|&l| self.basis(l)).collect();
        let n = points.len();
        nalgebra::DMatrix::from_fn(n, n, |i, j| {
            basis[i]
                .iter()
                .zip(&basis[j])
                .map(|(x, y)| x * y.conj())
                .sum()
        })
    }
}

/// Number of coefficients needed for a CMV truncation around row `n`.
pub fn cmv_truncation(n: usize) -> usize {
    let nf = n as f64;
    n + (4.0 * nf.cbrt() * nf.ln()).ceil() as usize + 16
}

/// Moments, Verblunsky coefficients and weight for one model, optionally cached on disk.
pub fn build_sequence(
    pot: &Potential,
    n: usize,
    m: usize,
    precision_bits: Option<u32>,
    cache_dir: Option<&Path>,
) -> Result<(WeightSpec, VerblunskySequence)> {
    let w = WeightSpec::new(n, pot, precision_bits)?;
    if let Some(dir) = cache_dir {
        if let Some(seq) = cache::load(dir, pot, n, w.prec())? {
            if seq.len() >= m {
                let alpha = seq.alpha[..m].to_vec();
                return Ok((w, VerblunskySequence::from_alphas(seq.c0, alpha)?));
            }
        }
    }
    let mom = moments(&w, m)?;
    let seq = levinson(&mom, m)?;
    if let Some(dir) = cache_dir {
        cache::store(dir, pot, n, w.prec(), &seq)?;
    }
    Ok((w, seq))
}

/// One row of the comparison with the edge asymptotics of the coefficients.
#[derive(Clone, Debug, Serialize)]
pub struct AsymptoticRow {
    pub k: i64,
    pub alpha: f64,
    pub predicted: f64,
    pub deviation: f64,
    pub rho: f64,
    pub rho_predicted: f64,
    pub rho_deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AsymptoticReport {
    pub n: usize,
    pub sign: i32,
    pub rows: Vec<AsymptoticRow>,
    pub max_deviation: f64,
}

/// Compares `α_{n+k}` (one-based CMV indexing) with `(−1)^k s (cos(θ/2) − p_θ k/n)`
/// for `|k| ≤ n^{1/3}`.
pub fn verblunsky_asymptotic_report(
    vseq: &VerblunskySequence,
    ec: &EdgeConstants,
    n: usize,
) -> Result<AsymptoticReport> {
    let kmax = (n as f64).cbrt().floor() as i64;
    if vseq.len() < n + kmax as usize + 2 {
        return Err(Error::validation("vseq", "too short for the edge window"));
    }
    let ks: Vec<i64> = (-kmax..=kmax).collect();
    let signed: Vec<f64> = ks
        .iter()
        .map(|&k| {
            let a = vseq.cmv_alpha((n as i64 + k) as usize).to_f64();
            if k.rem_euclid(2) == 0 {
                a
            } else {
                -a
            }
        })
        .collect();
    let pos = signed.iter().filter(|v| **v > 0.0).count() as f64;
    let neg = signed.iter().filter(|v| **v < 0.0).count() as f64;
    if (pos - neg).abs() < 0.1 * ks.len() as f64 {
        return Err(Error::Numerical("ambiguous global sign s^(n)".into()));
    }
    let s = if pos > neg { 1.0 } else { -1.0 };
    let half = 0.5 * ec.theta;
    let nf = n as f64;
    let mut rows = Vec::with_capacity(ks.len());
    let mut max_dev: f64 = 0.0;
    for (&k, &sa) in ks.iter().zip(&signed) {
        let j = (n as i64 + k) as usize;
        let pred = half.cos() - ec.p_theta * k as f64 / nf;
        let rho = vseq.cmv_rho(j).to_f64();
        let rho_pred = half.sin() + ec.p_theta * k as f64 / nf / half.tan();
        let dev = (s * sa - pred).abs();
        max_dev = max_dev.max(dev);
        let parity = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        rows.push(AsymptoticRow {
            k,
            alpha: parity * sa,
            predicted: parity * s * pred,
            deviation: dev,
            rho,
            rho_predicted: rho_pred,
            rho_deviation: (rho - rho_pred).abs(),
        });
    }
    Ok(AsymptoticReport {
        n,
        sign: s as i32,
        rows,
        max_deviation: max_dev,
    })
}

/// JSON cache of Verblunsky sequences keyed by potential, `n` and precision.
pub mod cache {
    use super::*;
    use sha2::{Digest, Sha256};

    pub const SCHEMA_VERSION: u32 = 1;

    /// Environment variable overriding the cache directory.
    pub const CACHE_ENV: &str = "UMM_EDGE_CACHE_DIR";

    #[derive(Serialize, Deserialize)]
    struct CacheFile {
        schema_version: u32,
        potential: String,
        n: usize,
        precision_bits: u32,
        c0: String,
        alphas: Vec<String>,
    }

    pub fn key(pot: &Potential, n: usize, bits: u32) -> String {
        let digest = Sha256::digest(pot.canonical().as_bytes());
        format!("{}-n{n}-p{bits}", &hex::encode(digest)[..16])
    }

    pub fn path(dir: &Path, pot: &Potential, n: usize, bits: u32) -> PathBuf {
        dir.join(format!("vseq-{}.json", key(pot, n, bits)))
    }

    fn decimal(x: &Float) -> String {
        x.to_string_radix(10, None)
    }

    pub fn load(dir: &Path, pot: &Potential, n: usize, bits: u32) -> Result<Option<VerblunskySequence>> {
        let file = path(dir, pot, n, bits);
        let text = match std::fs::read_to_string(&file) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let parsed: CacheFile = serde_json::from_str(&text)?;
        if parsed.schema_version != SCHEMA_VERSION
            || parsed.potential != pot.canonical()
            || parsed.n != n
            || parsed.precision_bits != bits
        {
            return Ok(None);
        }
        let parse = |s: &str| -> Result<Float> {
            Float::parse(s)
                .map(|v| Float::with_val(bits, v))
                .map_err(|e| Error::Numerical(format!("corrupt cache entry: {e}")))
        };
        let c0 = parse(&parsed.c0)?;
        let alphas = parsed.alphas.iter().map(|s| parse(s)).collect::<Result<Vec<_>>>()?;
        Ok(Some(VerblunskySequence::from_alphas(c0, alphas)?))
    }

    pub fn store(dir: &Path, pot: &Potential, n: usize, bits: u32, seq: &VerblunskySequence) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let body = CacheFile {
            schema_version: SCHEMA_VERSION,
            potential: pot.canonical(),
            n,
            precision_bits: bits,
            c0: decimal(&seq.c0),
            alphas: seq.alpha.iter().map(decimal).collect(),
        };
        let json = serde_json::to_string_pretty(&body)?;
        crate::cli::write_atomic(&path(dir, pot, n, bits), json.as_bytes())
    }
}
