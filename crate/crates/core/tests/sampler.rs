use proptest::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use std::f64::consts::PI;
use umm_edge::equilibrium::{edge_constants, solve_support, Potential};
use umm_edge::sampler::*;

fn flat() -> Potential {
    Potential::polynomial(vec![]).unwrap()
}

fn chain(n: usize, pot: Potential, sweeps: usize, seed: u64) -> ChainConfig {
    ChainConfig {
        n,
        pot,
        steps: sweeps + 1000,
        burn_in: 1000,
        proposal_width: 0.5,
        seed,
    }
}

fn thin(s: &EigenvalueSample, k: usize) -> EigenvalueSample {
    EigenvalueSample {
        configurations: s.configurations.iter().step_by(k).cloned().collect(),
        ..s.clone()
    }
}

/// `E cos(λ₁ − λ₂)` under `|e^{iλ₁} − e^{iλ₂}|²` on the torus, by the product midpoint rule.
fn two_point_oracle() -> f64 {
    let m = 400;
    let h = 2.0 * PI / m as f64;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..m {
        for j in 0..m {
            let d = (i as f64 - j as f64) * h;
            let w = 2.0 - 2.0 * d.cos();
            num += d.cos() * w;
            den += w;
        }
    }
    num / den
}

#[test]
fn log_density_values() {
    assert!((log_density(&flat(), 2, &[0.0, -PI]) - 2.0 * 2f64.ln()).abs() < 1e-14);
    assert_eq!(log_density(&flat(), 2, &[1.0, 1.0]), f64::NEG_INFINITY);
    let pot = Potential::gww();
    let a = log_density(&pot, 4, &[0.1, -1.2, 2.0, 0.7]);
    let b = log_density(&pot, 4, &[2.0, 0.7, 0.1, -1.2]);
    assert!((a - b).abs() < 1e-13);
}

#[test]
fn two_point_mean_matches_quadrature() {
    let s = metropolis_run(&chain(2, flat(), 40_000, 3)).unwrap();
    let v: Vec<f64> = s.configurations.iter().map(|c| (c[0] - c[1]).cos()).collect();
    let batches = 40;
    let size = v.len() / batches;
    let means: Vec<f64> = v.chunks(size).take(batches).map(|b| b.iter().sum::<f64>() / size as f64).collect();
    let mean = means.iter().sum::<f64>() / batches as f64;
    let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (batches - 1) as f64;
    let se = (var / batches as f64).sqrt();
    let oracle = two_point_oracle();
    assert!((oracle + 0.5).abs() < 1e-12);
    assert!((mean - oracle).abs() <= 3.0 * se, "{mean} ± {se} vs {oracle}");
}

#[test]
fn acceptance_after_tuning() {
    for width in [0.05, 0.5, 2.5] {
        let mut cfg = chain(16, Potential::gww(), 2000, 5);
        cfg.proposal_width = width;
        let s = metropolis_run(&cfg).unwrap();
        assert!((0.15..=0.6).contains(&s.acceptance_rate), "rate {} from width {width}", s.acceptance_rate);
    }
}

#[test]
fn reproducible_stream() {
    let a = metropolis_run(&chain(6, Potential::gww(), 3000, 17)).unwrap();
    let b = metropolis_run(&chain(6, Potential::gww(), 3000, 17)).unwrap();
    let c = metropolis_run(&chain(6, Potential::gww(), 3000, 18)).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.configurations, c.configurations);
    assert_eq!(a.configurations.len(), 3000);
    for conf in &a.configurations {
        assert!(conf.windows(2).all(|w| w[0] <= w[1]));
        assert!(conf.iter().all(|l| (-PI..PI).contains(l)));
    }
}

#[test]
fn seeds_agree_in_distribution() {
    let bins = 16;
    let a = thin(&metropolis_run(&chain(8, Potential::gww(), 20_000, 10)).unwrap(), 10);
    let b = thin(&metropolis_run(&chain(8, Potential::gww(), 20_000, 11)).unwrap(), 10);
    let total = |s: &EigenvalueSample| (s.configurations.len() * s.n) as f64;
    let (ta, tb) = (total(&a), total(&b));
    let (ha, hb) = (ncm_histogram(&a, bins), ncm_histogram(&b, bins));
    let mut stat = 0.0;
    let mut used = 0;
    for (x, y) in ha.iter().zip(&hb) {
        let (c1, c2) = (x * ta, y * tb);
        if c1 + c2 > 0.0 {
            stat += (c1 - c2).powi(2) / (c1 + c2);
            used += 1;
        }
    }
    let p = 1.0 - ChiSquared::new((used - 1) as f64).unwrap().cdf(stat);
    assert!(p > 0.01, "chi-square {stat} on {} dof", used - 1);
}

#[test]
fn ncm_against_equilibrium() {
    let eq = solve_support(&Potential::gww(), 1e-13).unwrap();
    let s = metropolis_run(&chain(16, Potential::gww(), 20_000, 1)).unwrap();
    let rep = ncm_compare(&s, &eq, DEFAULT_BINS).unwrap();
    assert!((rep.empirical.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert!((rep.predicted.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    assert!(rep.sup_deviation < 0.1);
    assert!(rep.outside_max_mass <= 0.01);
    assert_eq!(rep.inside.iter().filter(|b| **b).count(), 8);
}

#[test]
fn flat_weight_is_uniform() {
    let s = thin(&metropolis_run(&chain(6, flat(), 20_000, 4)).unwrap(), 5);
    let h = ncm_histogram(&s, 8);
    let total = (s.configurations.len() * s.n) as f64;
    for v in h {
        let se = (0.125 * 0.875 / total).sqrt();
        assert!((v - 0.125).abs() < 5.0 * se, "{v}");
    }
}

#[test]
fn edge_fluctuation_median_negative() {
    let pot = Potential::gww();
    let eq = solve_support(&pot, 1e-13).unwrap();
    let ec = edge_constants(&eq).unwrap();
    let s = metropolis_run(&chain(16, pot, 20_000, 2)).unwrap();
    let cdf = edge_fluctuation(&s, &eq, &ec).unwrap();
    assert!(cdf.median() < 0.0);
    let grid: Vec<f64> = (0..=12).map(|i| -5.0 + 0.5 * i as f64).collect();
    let limit = limit_cdf(&grid, 48).unwrap();
    assert!(limit[10] > 0.5);
    assert!(limit.windows(2).all(|w| w[0] <= w[1]));
    let d = cdf.kolmogorov_distance(&grid, &limit);
    assert!(d.is_finite() && d < 0.3);
}

#[test]
fn too_few_configurations() {
    let eq = solve_support(&Potential::gww(), 1e-13).unwrap();
    let ec = edge_constants(&eq).unwrap();
    let s = metropolis_run(&chain(4, Potential::gww(), 500, 1)).unwrap();
    assert!(ncm_compare(&s, &eq, 16).unwrap_err().is_validation());
    assert!(edge_fluctuation(&s, &eq, &ec).is_err());
}

#[test]
fn config_validation() {
    let mut cfg = chain(1, flat(), 10, 0);
    assert!(metropolis_run(&cfg).is_err());
    cfg.n = 4;
    cfg.steps = cfg.burn_in;
    assert!(metropolis_run(&cfg).is_err());
    cfg.steps = cfg.burn_in + 10;
    cfg.proposal_width = PI;
    assert!(metropolis_run(&cfg).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn empirical_cdf_is_monotone_and_right_continuous(mut xs in proptest::collection::vec(-5.0f64..5.0, 1..60), s in -6.0f64..6.0) {
        let cdf = EmpiricalCdf::new(xs.clone());
        xs.sort_by(f64::total_cmp);
        prop_assert!(cdf.eval(s) <= cdf.eval(s + 0.1));
        prop_assert!(cdf.eval_left(s) <= cdf.eval(s));
        for x in &xs {
            prop_assert!(cdf.eval(*x) > cdf.eval_left(*x));
        }
        prop_assert_eq!(cdf.eval(6.0), 1.0);
    }

    #[test]
    fn wrap_is_periodic(x in -50.0f64..50.0) {
        let y = wrap(x);
        prop_assert!((-PI..PI).contains(&y));
        prop_assert!((wrap(x + 2.0 * PI) - y).abs() < 1e-9 || (wrap(x + 2.0 * PI) - y).abs() > 2.0 * PI - 1e-9);
    }
}
