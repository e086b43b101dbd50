use proptest::prelude::*;
use std::f64::consts::PI;
use umm_edge::airy::*;
use umm_edge::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Fourth-order five-point second difference.
fn d2<T, F>(f: F, x: f64, h: f64) -> T
where
    F: Fn(f64) -> T,
    T: std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T>,
{
    (f(x - 2.0 * h) * -1.0 + f(x - h) * 16.0 - f(x) * 30.0 + f(x + h) * 16.0 - f(x + 2.0 * h)) * (1.0 / (12.0 * h * h))
}

#[test]
fn reference_values() {
    // classical tabulated values
    let table = [
        (1.0, 0.135_292_416_312_881_4, -0.159_147_441_296_793_2),
        (-1.0, 0.535_560_883_292_352_1, -0.010_160_567_116_645_2),
        (2.5, 0.015_725_923_380_470_49, -0.026_250_881_035_903_23),
        (-5.0, 0.350_761_009_024_114_3, 0.327_192_818_554_443_1),
    ];
    for (x, ai, aip) in table {
        let (a, ap) = ai_real(x).unwrap();
        assert!((a - ai).abs() < 1e-14, "Ai({x}) = {a}");
        assert!((ap - aip).abs() < 1e-14, "Ai'({x}) = {ap}");
    }
    let v = airy_values(c(0.0, 0.0)).unwrap();
    assert!((v.bi.re - 0.614_926_627_446_000_7).abs() < 1e-15);
}

#[test]
fn wronskian_on_real_points() {
    for x in [-5.0, 0.0, 5.0] {
        let v = airy_values(c(x, 0.0)).unwrap();
        let w = v.ai * v.bip - v.aip * v.bi;
        assert!((w - 1.0 / PI).norm() < 1e-15);
    }
}

#[test]
fn ode_by_second_differences() {
    let h = 1e-3;
    for x in [-4.0, -1.5, 0.0, 2.0, 3.5] {
        let f = |t: f64| ai_real(t).unwrap().0;
        assert!((d2(f, x, h) - x * f(x)).abs() < 1e-8);
    }
}

#[test]
fn series_and_asymptotic_overlap() {
    for r in [11.5, 12.0, 12.5] {
        for arg in [0.0, 0.6, 1.2, 2.2, 2.9] {
            let z = Complex64::from_polar(r, arg);
            let s = series(z);
            let a = asymptotic(z);
            let scale = s.ai.norm().max(s.bi.norm());
            assert!((s.ai - a.ai).norm() <= 1e-12 * scale.max(s.ai.norm()));
            assert!((s.bi - a.bi).norm() <= 1e-12 * scale);
        }
    }
}

#[test]
fn domain_limits() {
    assert!(airy_values(c(60.0, 0.0)).is_err());
    assert!(airy_values(c(-500.0, 0.0)).is_ok());
    assert!(airy_values(c(f64::NAN, 0.0)).is_err());
}

#[test]
fn psi_wronskian_at_box_corners() {
    for (a, b) in [(1.0, 1.0), (0.8, 1.3)] {
        let k = AiryConstants::new(a, b).unwrap();
        for zeta in [c(-3.0, 1.0), c(3.0, 1.0), c(-3.0, 3.0), c(3.0, 3.0), c(0.0, -1.0)] {
            for i in 0..=20 {
                let x = -10.0 + i as f64;
                let (pm, dpm) = psi_complex(c(x, 0.0), zeta, k, Side::Minus).unwrap();
                let (pp, dpp) = psi_complex(c(x, 0.0), zeta, k, Side::Plus).unwrap();
                let w = pm * dpp - pp * dpm;
                let expected = b / (a * PI);
                assert!((w - expected).norm() < 1e-10 * (1.0 + pm.norm() * pp.norm()), "{w} at {x}, {zeta}");
            }
        }
    }
}

#[test]
fn psi_solves_the_operator_equation() {
    let k = AiryConstants::unit();
    let zeta = c(0.0, 1.0);
    let h = 1e-3;
    for i in 0..=10 {
        let x = -5.0 + i as f64;
        for side in [Side::Plus, Side::Minus] {
            let f = |t: f64| psi(t, zeta, k, side).unwrap();
            let r = d2(f, x, h) - (x + zeta) * f(x);
            assert!(r.norm() < 1e-7 * (1.0 + f(x).norm()), "{r} at {x}");
        }
    }
}

#[test]
fn psi_plus_decays() {
    let k = AiryConstants::unit();
    let zeta = c(0.0, 1.0);
    let mut prev = f64::INFINITY;
    for i in 0..20 {
        let x = 2.0 + 0.5 * i as f64;
        let v = psi(x, zeta, k, Side::Plus).unwrap().norm();
        assert!(v < prev);
        let env = (-2.0 / 3.0 * k.argument(c(x, 0.0), zeta).re.powf(1.5)).exp();
        assert!(v / env < 1.0 && v / env > 0.01);
        prev = v;
    }
}

#[test]
fn resolvent_symmetric_and_decaying() {
    let k = AiryConstants::unit();
    let zeta = c(0.0, 1.0);
    let r1 = resolvent_product(1.2, -0.7, zeta, k).unwrap();
    let r2 = resolvent_product(-0.7, 1.2, zeta, k).unwrap();
    assert_eq!(r1, r2);
    let a = resolvent_integral(0.5, -0.5, c(0.0, 1.0), k).unwrap().norm();
    let b = resolvent_integral(0.5, -0.5, c(0.0, 3.0), k).unwrap().norm();
    assert!(b < a);
    for x in [0.0, 5.0, 10.0, 20.0, 30.0] {
        let d = resolvent_product(x, x, zeta, k).unwrap();
        assert!(d.norm() <= 2.0 * (1.0 + x).powf(-0.5));
        assert!(d.im.abs() <= 2.0 * (1.0 + x).powf(-1.5));
    }
}

#[test]
fn resolvent_inverts_the_operator() {
    let k = AiryConstants::new(0.9, 1.1).unwrap();
    let zeta = c(0.5, 1.0);
    let x = 0.4;
    let h = 1e-3;
    for y in [-3.0, -1.0, 2.0, 3.5] {
        let f = |t: f64| resolvent_product(x, t, zeta, k).unwrap();
        let r = d2(f, y, h) * k.a.powi(3) - (y * k.b.powi(3) + zeta) * f(y);
        assert!(r.norm() < 1e-5, "{r} at {y}");
    }
}

#[test]
fn two_resolvent_representations() {
    let zeta = c(0.0, 1.0);
    for (a, b) in [(1.0, 1.0), (0.85, 1.2)] {
        let k = AiryConstants::new(a, b).unwrap();
        for i in 0..=8 {
            for j in 0..=8 {
                let (x, y) = (-4.0 + i as f64, -4.0 + j as f64);
                let p = resolvent_product(x, y, zeta, k).unwrap();
                let q = resolvent_integral(x, y, zeta, k).unwrap();
                assert!((p - q).norm() < 1e-8, "{p} vs {q} at ({x}, {y})");
            }
        }
    }
}

/// `∫ |𝓡(x, y)|² dy` by Gauss–Legendre panels on `[−L, R]`.
fn resolvent_square_norm(x: f64, zeta: Complex64, k: AiryConstants) -> f64 {
    let (nodes, weights) = umm_edge::quad::gauss_legendre(32);
    let mut total = 0.0;
    let (lo, hi, w) = (-600.0, 30.0, 0.5);
    let mut a = lo;
    while a < hi {
        let mid = a + 0.5 * w;
        for (t, wt) in nodes.iter().zip(&weights) {
            let y = mid + 0.5 * w * t;
            total += 0.5 * w * wt * resolvent_product(x, y, zeta, k).unwrap().norm_sqr();
        }
        a += w;
    }
    total
}

#[test]
fn second_resolvent_identity() {
    let k = AiryConstants::unit();
    let zeta = c(0.0, 2.0);
    for x in [-1.0, 0.0, 1.5] {
        let lhs = resolvent_square_norm(x, zeta, k);
        let rhs = resolvent_product(x, x, zeta, k).unwrap().im / zeta.im;
        assert!((lhs - rhs).abs() < 1e-8, "{lhs} vs {rhs}");
    }
}

#[test]
fn airy_kernel_forms() {
    for i in 0..=8 {
        for j in 0..=8 {
            let (x, y) = (-4.0 + i as f64, -4.0 + j as f64);
            let q = airy_kernel(x, y).unwrap();
            assert_eq!(q, airy_kernel(y, x).unwrap());
            let qi = airy_kernel_integral(x, y).unwrap();
            assert!((q - qi).abs() < 1e-10, "{q} vs {qi}");
        }
    }
    let d0 = airy_kernel(0.0, 0.0).unwrap();
    assert!((d0 - aip_zero().powi(2)).abs() < 1e-16);
    let mut prev = f64::INFINITY;
    for x in [0.0, 2.0, 4.0, 6.0, 8.0] {
        let d = airy_kernel(x, x).unwrap();
        assert!(d >= 0.0 && d < prev);
        let a = ai_real(x).unwrap().0;
        assert!(d < 10.0 * a * a + 1e-300 || x < 1.0);
        prev = d;
    }
}

#[test]
fn kernel_diagonal_closed_form() {
    for x in [-3.0, -0.5, 0.7, 2.0] {
        let (a, ap) = ai_real(x).unwrap();
        assert!((airy_kernel(x, x).unwrap() - (ap * ap - x * a * a)).abs() < 1e-15);
        let near = airy_kernel(x, x + 2e-3).unwrap();
        let quotient = {
            let (b, bp) = ai_real(x + 2e-3).unwrap();
            (a * bp - ap * b) / (-2e-3)
        };
        assert!((near - quotient).abs() < 1e-11);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn complex_wronskian(re in -11.0f64..11.0, im in -3.0f64..3.0) {
        let v = airy_values(c(re, im)).unwrap();
        let w = v.ai * v.bip - v.aip * v.bi;
        let scale = (v.ai.norm() * v.bip.norm()).max(1.0);
        prop_assert!((w - 1.0 / PI).norm() < 1e-12 * scale);
    }

    #[test]
    fn large_argument_wronskian(r in 12.5f64..45.0, arg in -3.1f64..3.1) {
        let v = airy_values(Complex64::from_polar(r, arg)).unwrap();
        let w = v.ai * v.bip - v.aip * v.bi;
        let scale = (v.ai.norm() * v.bip.norm()).max(v.aip.norm() * v.bi.norm()).max(1.0);
        prop_assert!((w - 1.0 / PI).norm() < 1e-11 * scale);
    }

    #[test]
    fn kernel_symmetric(x in -6.0f64..6.0, y in -6.0f64..6.0) {
        prop_assert_eq!(airy_kernel(x, y).unwrap(), airy_kernel(y, x).unwrap());
    }
}
