//! Exit criteria. Each test prints one `criterion N: PASS|FAIL` line to stderr,
//! bypassing the harness capture, then asserts its verdict.

use rug::{Complex, Float};
use std::f64::consts::PI;
use std::io::Write;
use std::time::{Duration, Instant};
use umm_edge::airy::{self, AiryConstants, Side};
use umm_edge::cmv;
use umm_edge::edgelab::{self, EdgeModel};
use umm_edge::equilibrium::{edge_constants, solve_support, EdgeConstants, Potential};
use umm_edge::fredholm;
use umm_edge::mp;
use umm_edge::opuc;
use umm_edge::sampler::{self, ChainConfig};
use umm_edge::Complex64;

fn verdict(id: u32, pass: bool, elapsed: Duration, detail: String) {
    let tag = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(
        std::io::stderr(),
        "criterion {id}: {tag} ({:.1} s) {detail}",
        elapsed.as_secs_f64()
    );
    assert!(pass, "criterion {id} failed: {detail}");
}

fn sci(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.3e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn five_potentials() -> Vec<Potential> {
    vec![
        Potential::gww(),
        Potential::linear(-2.0),
        Potential::polynomial(vec![0.0, -2.0, -1.0, 0.0, 1.0]).unwrap(),
        Potential::polynomial(vec![0.0, -1.5, -0.5]).unwrap(),
        Potential::polynomial(vec![0.0, -3.0, 0.0, 0.0, 0.5]).unwrap(),
    ]
}

fn constants(pot: &Potential) -> EdgeConstants {
    edge_constants(&solve_support(pot, edgelab::SUPPORT_TOL).unwrap()).unwrap()
}

#[test]
fn criterion_1_gww_anchor() {
    let t = Instant::now();
    let eq = solve_support(&Potential::gww(), edgelab::SUPPORT_TOL).unwrap();
    let ec = edge_constants(&eq).unwrap();
    let errs = [
        (eq.theta - PI / 2.0).abs(),
        (ec.gamma - 1.0).abs(),
        (ec.a - 1.0).abs(),
        (ec.b - 1.0).abs(),
    ];
    let p_err = (ec.p_at_edge - 4.0 * PI).abs();
    let elapsed = t.elapsed();
    let pass = errs.iter().all(|e| *e <= 1e-8) && p_err <= 1e-6 && elapsed.as_secs_f64() < 10.0;
    verdict(
        1,
        pass,
        elapsed,
        format!("|θ−π/2|, |γ−1|, |a−1|, |b−1| = {}; |P(θ)−4π| = {p_err:.1e}", sci(&errs)),
    );
}

fn resolvent_square_norm(x: f64, zeta: Complex64, k: AiryConstants) -> f64 {
    let (nodes, weights) = umm_edge::quad::gauss_legendre(32);
    let (lo, hi, w) = (-600.0, 30.0, 0.5);
    let mut total = 0.0;
    let mut a = lo;
    while a < hi {
        let mid = a + 0.5 * w;
        for (t, wt) in nodes.iter().zip(&weights) {
            total += 0.5 * w * wt * airy::resolvent_product(x, mid + 0.5 * w * t, zeta, k).unwrap().norm_sqr();
        }
        a += w;
    }
    total
}

#[test]
fn criterion_2_identity_suite() {
    let t = Instant::now();
    let defect = five_potentials()
        .iter()
        .map(|p| constants(p).consistency_defect())
        .fold(0.0f64, f64::max);

    let mut wronskian: f64 = 0.0;
    for pot in [Potential::gww(), Potential::linear(-2.0)] {
        let ec = constants(&pot);
        let k = AiryConstants::new(ec.a_operator, ec.b).unwrap();
        for zeta in [c(-3.0, 1.0), c(3.0, 1.0), c(-3.0, 3.0), c(3.0, 3.0), c(0.0, 1.0)] {
            for i in 0..=20 {
                let x = c(-10.0 + i as f64, 0.0);
                let (pm, dpm) = airy::psi_complex(x, zeta, k, Side::Minus).unwrap();
                let (pp, dpp) = airy::psi_complex(x, zeta, k, Side::Plus).unwrap();
                let w = pm * dpp - pp * dpm;
                let rel = (w - ec.b / (ec.a_operator * PI)).norm() / (1.0 + pm.norm() * pp.norm());
                wronskian = wronskian.max(rel);
            }
        }
    }

    let unit = AiryConstants::unit();
    let zeta = c(0.0, 2.0);
    let identity = [-1.0, 0.0, 1.5]
        .iter()
        .map(|&x| {
            let rhs = airy::resolvent_product(x, x, zeta, unit).unwrap().im / zeta.im;
            (resolvent_square_norm(x, zeta, unit) - rhs).abs()
        })
        .fold(0.0f64, f64::max);

    let n = 30;
    let m = opuc::cmv_truncation(n);
    let (_, v) = opuc::build_sequence(&Potential::gww(), n, m, None, None).unwrap();
    let band = cmv::assemble(&v, m).unwrap();
    let mut herglotz: f64 = 0.0;
    for im in [(n as f64).powf(-2.0 / 3.0), 1.0] {
        let slab = cmv::resolvent(&band, c(PI / 2.0, im), n - 3, n + 3).unwrap();
        herglotz = herglotz.max(slab.herglotz_residual());
    }
    let unitarity = cmv::unitarity_residual(&band, 2..m - 2);
    let bits = v.prec();

    let pass = defect <= 1e-12
        && wronskian <= 1e-10
        && identity <= 1e-8
        && herglotz <= 1e-10
        && unitarity <= 1e-25
        && bits >= 256;
    verdict(
        2,
        pass,
        t.elapsed(),
        format!(
            "γab² {defect:.1e}, Wronskian {wronskian:.1e}, resolvent identity {identity:.1e}, \
             Herglotz {herglotz:.1e}, unitarity {unitarity:.1e} at {bits} bits"
        ),
    );
}

#[test]
fn criterion_3_dual_representations() {
    let t = Instant::now();
    let zeta = c(0.0, 1.0);
    let grid = edgelab::uniform_grid(-4.0, 4.0, 9);
    let mut resolvent: f64 = 0.0;
    for pot in [Potential::gww(), Potential::linear(-2.0)] {
        let ec = constants(&pot);
        let k = AiryConstants::new(ec.a_operator, ec.b).unwrap();
        for &x in &grid {
            for &y in &grid {
                let p = airy::resolvent_product(x, y, zeta, k).unwrap();
                let q = airy::resolvent_integral(x, y, zeta, k).unwrap();
                resolvent = resolvent.max((p - q).norm());
            }
        }
    }
    let mut kernel: f64 = 0.0;
    for &x in &grid {
        for &y in &grid {
            let q = airy::airy_kernel(x, y).unwrap();
            kernel = kernel.max((q - airy::airy_kernel_integral(x, y).unwrap()).abs());
        }
    }
    let elapsed = t.elapsed();
    let pass = resolvent <= 1e-8 && kernel <= 1e-10 && elapsed.as_secs_f64() < 120.0;
    verdict(
        3,
        pass,
        elapsed,
        format!("resolvent forms {resolvent:.1e}, Airy kernel forms {kernel:.1e}"),
    );
}

#[test]
fn criterion_4_orthogonality() {
    let t = Instant::now();
    let n = 16;
    let top = 2 * n;
    let (w, v) = opuc::build_sequence(&Potential::gww(), n, top, None, None).unwrap();
    let p = w.prec();
    let nodes = 512u32;
    let two_pi = mp::pi(p) * 2u32;
    let samples: Vec<(Vec<Complex>, Float)> = (0..nodes)
        .map(|i| {
            let lam = Float::with_val(p, &two_pi * i) / nodes;
            let z = mp::cis(p, &lam);
            let phis = opuc::szego_eval_at(&v, &z, top).unwrap().into_iter().map(|(f, _)| f).collect();
            (phis, w.log_weight_mp(&lam).exp())
        })
        .collect();
    let step = Float::with_val(p, &two_pi / nodes);
    let mut gram: f64 = 0.0;
    for j in 0..=top {
        for k in j..=top {
            let mut acc = Complex::with_val(p, 0);
            for (phis, wt) in &samples {
                acc += Complex::with_val(p, &phis[j] * Complex::with_val(p, phis[k].conj_ref())) * wt;
            }
            acc *= &step;
            if j == k {
                acc -= 1;
            }
            gram = gram.max(mp::to_c64(&acc).norm());
        }
    }

    let model = EdgeModel::build(&Potential::gww(), n, None, None).unwrap();
    let count = 256;
    let h = 2.0 * PI / count as f64;
    let trace: f64 = (0..count)
        .map(|i| {
            let l = -PI + i as f64 * h;
            model.ke.kernel(l, l).re * h
        })
        .sum();
    let trace_err = (trace / n as f64 - 1.0).abs();
    let pass = gram <= 1e-20 && trace_err <= 1e-10 && p >= 256;
    verdict(
        4,
        pass,
        t.elapsed(),
        format!("Gram residual {gram:.1e} at {p} bits, kernel trace {trace_err:.1e}"),
    );
}

#[test]
fn criterion_5_verblunsky_asymptotics() {
    let t = Instant::now();
    let ec = constants(&Potential::gww());
    let mut devs = Vec::new();
    for n in [30usize, 60, 120] {
        let kmax = (n as f64).cbrt().floor() as usize;
        let (_, v) = opuc::build_sequence(&Potential::gww(), n, n + kmax + 2, None, None).unwrap();
        let rep = opuc::verblunsky_asymptotic_report(&v, &ec, n).unwrap();
        devs.push((n as f64, rep.max_deviation));
    }
    let decreasing = devs.windows(2).all(|w| w[1].1 < w[0].1);
    let exponent = edgelab::fit_decay(&devs);
    let elapsed = t.elapsed();
    let pass = decreasing && (0.55..=0.80).contains(&exponent) && elapsed.as_secs_f64() < 600.0;
    let shown: Vec<String> = devs.iter().map(|(n, d)| format!("{n}: {d:.2e}")).collect();
    verdict(
        5,
        pass,
        elapsed,
        format!("max deviation [{}], decreasing {decreasing}, fitted exponent {exponent:.3} (band [0.55, 0.80])", shown.join(", ")),
    );
}

#[test]
fn criterion_6_edge_kernel_convergence() {
    let t = Instant::now();
    let grid = edgelab::uniform_grid(-2.0, 2.0, 9);
    let tab = edgelab::convergence_study(&Potential::gww(), &[20, 40, 80], &grid, None, None).unwrap();
    let origin = *tab.origin_errors.last().unwrap();
    let pass = tab.sup_strictly_decreasing() && origin.0 == 80 && origin.1 <= 0.25;
    verdict(
        6,
        pass,
        t.elapsed(),
        format!(
            "sup errors {}, origin relative error {:.3e} at n = 80, fitted exponent {:.3}",
            sci(&tab.sup_errors.iter().map(|e| e.1).collect::<Vec<_>>()), origin.1, tab.exponent
        ),
    );
}

#[test]
fn criterion_7_hole_probability() {
    let t = Instant::now();
    let window = [(0.0, 2.0)];
    let limit = fredholm::airy_gap_refined(&window, 40).unwrap();
    let n = 80;
    let model = EdgeModel::build(&Potential::gww(), n, None, None).unwrap();
    let finite = fredholm::finite_n_hole(&model.ke, &model.eq, &model.ec, &window, n, 20).unwrap();
    let diff = (finite.value - limit.value).abs();
    let pass = diff <= 0.05 && limit.refinement_delta <= 1e-8 && limit.order == 80;
    verdict(
        7,
        pass,
        t.elapsed(),
        format!(
            "E_80 = {:.6}, limit = {:.6}, difference {diff:.3e}, refinement 40→80 {:.1e}",
            finite.value, limit.value, limit.refinement_delta
        ),
    );
}

#[test]
fn criterion_8_d_residual() {
    let t = Instant::now();
    let ec = constants(&Potential::gww());
    let zeta = c(0.0, 1.0);
    let consts = AiryConstants::new(ec.a_operator, ec.b).unwrap();
    let mut norms = Vec::new();
    for n in [30usize, 60, 120] {
        let (_, v) = opuc::build_sequence(&Potential::gww(), n, opuc::cmv_truncation(n), None, None).unwrap();
        let kmax = (n as f64).cbrt().floor() as i64;
        let rot = cmv::rotated_minus(&v, &ec, n, zeta, kmax as usize + 2).unwrap();
        norms.push(cmv::approx_resolvent_residual(&rot, consts, kmax).unwrap().max_norm);
    }
    let pass = norms.windows(2).all(|w| w[1] < w[0]);
    verdict(8, pass, t.elapsed(), format!("max-norm at n = 30, 60, 120: {}", sci(&norms)));
}

#[test]
fn criterion_9_monte_carlo() {
    let t = Instant::now();
    let pot = Potential::gww();
    let eq = solve_support(&pot, edgelab::SUPPORT_TOL).unwrap();
    let ec = edge_constants(&eq).unwrap();
    let chain = |n: usize, seed: u64| ChainConfig {
        n,
        pot: pot.clone(),
        steps: 100_000 + 2_000,
        burn_in: 2_000,
        proposal_width: 0.5,
        seed,
    };
    let s16 = sampler::metropolis_run(&chain(16, 16)).unwrap();
    let ncm = sampler::ncm_compare(&s16, &eq, sampler::DEFAULT_BINS).unwrap();
    let s32 = sampler::metropolis_run(&chain(32, 32)).unwrap();
    let cdf = sampler::edge_fluctuation(&s32, &eq, &ec).unwrap();
    let grid = edgelab::uniform_grid(-6.0, 4.0, 101);
    let limit = sampler::limit_cdf(&grid, 48).unwrap();
    let ks = cdf.kolmogorov_distance(&grid, &limit);
    let elapsed = t.elapsed();
    let pass = s16.configurations.len() == 100_000
        && ncm.sup_deviation <= 0.05
        && ks <= 0.15
        && elapsed.as_secs_f64() < 900.0;
    verdict(
        9,
        pass,
        elapsed,
        format!("NCM sup deviation {:.4} (n = 16), Kolmogorov distance {ks:.4} (n = 32)", ncm.sup_deviation),
    );
}
