//! Small helpers around `rug` multiprecision floats and complexes.

use num_complex::Complex64;
use rug::float::Constant;
use rug::{Complex, Float};

pub fn float(prec: u32, x: f64) -> Float {
    Float::with_val(prec, x)
}

pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

pub fn to_c64(z: &Complex) -> Complex64 {
    Complex64::new(z.real().to_f64(), z.imag().to_f64())
}

pub fn from_c64(prec: u32, z: Complex64) -> Complex {
    Complex::with_val(prec, (z.re, z.im))
}

/// `exp(i x)` at the requested precision.
pub fn cis(prec: u32, x: &Float) -> Complex {
    let (s, c) = x.clone().sin_cos(Float::new(prec));
    Complex::with_val(prec, (c, s))
}

/// Precision for a weight whose logarithm spans `span` nats: enough bits to keep
/// `target` bits of relative accuracy after the dynamic range is consumed.
pub fn bits_for_range(span: f64, target: u32) -> u32 {
    let extra = (span.max(0.0) * std::f64::consts::LOG2_E).ceil() as u32;
    target.saturating_add(extra)
}
