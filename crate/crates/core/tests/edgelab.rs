use proptest::prelude::*;
use umm_edge::airy;
use umm_edge::edgelab::*;
use umm_edge::equilibrium::{edge_constants, solve_support, Potential};

const AIP_ZERO_SQ: f64 = 0.066_987_483_779_663_974;

fn potentials() -> Vec<Potential> {
    vec![
        Potential::gww(),
        Potential::linear(-2.0),
        Potential::polynomial(vec![0.0, -2.0, -1.0, 0.0, 1.0]).unwrap(),
        Potential::polynomial(vec![0.0, -1.5, -0.5]).unwrap(),
        Potential::polynomial(vec![0.0, -3.0, 0.0, 0.0, 0.5]).unwrap(),
    ]
}

#[test]
fn gww_convergence_table() {
    let grid = uniform_grid(-2.0, 2.0, 9);
    let tab = convergence_study(&Potential::gww(), &[20, 40, 80], &grid, None, None).unwrap();
    assert_eq!(tab.rows.len(), 3 * 81);
    assert!(tab.sup_strictly_decreasing(), "{:?}", tab.sup_errors);
    assert!(tab.rows.iter().all(|r| r.abs_err.is_finite() && r.abs_err >= 0.0));
    let origin = tab.origin_errors.last().unwrap();
    assert_eq!(origin.0, 80);
    assert!(origin.1 <= 0.25);
    assert!((0.2..=0.6).contains(&tab.exponent), "exponent {}", tab.exponent);
}

#[test]
fn kernel_decays_away_from_the_edge() {
    let m = EdgeModel::build(&Potential::gww(), 80, None, None).unwrap();
    let err = |x: f64| (m.rescaled_kernel(x, x).unwrap() - limit_kernel(&m.ec, x, x).unwrap()).abs();
    assert!(err(4.0) < err(0.0));
    assert!(m.rescaled_kernel(4.0, 4.0).unwrap() < m.rescaled_kernel(0.0, 0.0).unwrap());
}

#[test]
fn limit_kernel_values() {
    let ec = edge_constants(&solve_support(&Potential::gww(), 1e-13).unwrap()).unwrap();
    assert!((limit_kernel(&ec, 0.0, 0.0).unwrap() - AIP_ZERO_SQ).abs() < 1e-8);
    for pot in potentials() {
        let ec = edge_constants(&solve_support(&pot, 1e-13).unwrap()).unwrap();
        let g = 1.0 / (ec.a_operator * ec.b * ec.b);
        assert!((g - ec.edge_scale).abs() < 1e-12);
        for (x, y) in [(0.3, -0.4), (1.0, 1.0), (-1.5, 0.2)] {
            let v = limit_kernel(&ec, x, y).unwrap();
            assert!((v - g * airy::airy_kernel(g * x, g * y).unwrap()).abs() < 1e-15);
            assert_eq!(v, limit_kernel(&ec, y, x).unwrap());
        }
    }
}

#[test]
fn mismatched_constants_refused() {
    let mut ec = edge_constants(&solve_support(&Potential::linear(-2.0), 1e-13).unwrap()).unwrap();
    ec.edge_scale *= 1.01;
    assert!(limit_kernel(&ec, 0.0, 0.0).is_err());
}

#[test]
fn non_gww_scale_selects_the_limit() {
    // V = −4x, θ = π/3: the scale g = a⁻¹b⁻² ≈ 1.73 separates g Q(gx, gy) from g² Q(gx, gy)
    let pot = Potential::linear(-2.0);
    let mut errs = Vec::new();
    for n in [20usize, 40, 80] {
        let m = EdgeModel::build(&pot, n, None, None).unwrap();
        let g = m.ec.edge_scale;
        let k = m.rescaled_kernel(0.0, 0.0).unwrap();
        let one = g * airy::airy_kernel(0.0, 0.0).unwrap();
        assert!((k - g * one).abs() > 0.5 * one);
        errs.push((k - one).abs() / one);
    }
    assert!(errs[2] < errs[1] && errs[1] < errs[0] && errs[2] < 0.01, "{errs:?}");
}

#[test]
fn origin_error_nonincreasing_for_all_potentials() {
    for pot in potentials() {
        let mut prev = f64::INFINITY;
        for n in [20usize, 40] {
            let m = EdgeModel::build(&pot, n, None, None).unwrap();
            let e = (m.rescaled_kernel(0.0, 0.0).unwrap() - limit_kernel(&m.ec, 0.0, 0.0).unwrap()).abs();
            assert!(e <= prev, "{} at n = {n}: {e} after {prev}", pot.canonical());
            prev = e;
        }
    }
}

#[test]
fn rescaled_matrix_is_psd_and_symmetric() {
    let m = EdgeModel::build(&Potential::gww(), 40, None, None).unwrap();
    let grid = uniform_grid(-3.0, 3.0, 13);
    let k = m.rescaled_matrix(&grid).unwrap();
    assert!((&k - k.transpose()).amax() < 1e-12);
    let min = k.clone().symmetric_eigenvalues().min();
    assert!(min >= -1e-10);
    for i in 0..grid.len() {
        assert!(k[(i, i)] > 0.0);
    }
    assert!(m.rescaled_matrix(&[m.window() + 0.1]).is_err());
    assert!(m.rescaled_kernel(m.window() + 0.1, 0.0).is_err());
}

#[test]
fn correlation_determinants_consistent() {
    let m = EdgeModel::build(&Potential::linear(-2.0), 40, None, None).unwrap();
    let g = m.ec.edge_scale;
    let t = 0.7;
    let one = correlation_determinants(&m.ke, &m.eq, &m.ec, &[t], 40).unwrap();
    let diag = m.rescaled_kernel(t / g, t / g).unwrap() / g;
    assert!((one - diag).abs() < 1e-12);
    let close = correlation_determinants(&m.ke, &m.eq, &m.ec, &[0.3, 0.3 + 1e-7], 40).unwrap();
    assert!(close.abs() < 1e-10);
    let pts = [-2.0, 0.0, 2.0];
    let lim = limit_correlation_determinant(&pts).unwrap();
    let coarse = EdgeModel::build(&Potential::linear(-2.0), 20, None, None).unwrap();
    let d20 = correlation_determinants(&coarse.ke, &coarse.eq, &coarse.ec, &pts, 20).unwrap();
    let d40 = correlation_determinants(&m.ke, &m.eq, &m.ec, &pts, 40).unwrap();
    assert!(d20 > 0.0 && d40 > 0.0);
    assert!((d40 - lim).abs() < (d20 - lim).abs(), "{d20} {d40} vs {lim}");
    assert!(correlation_determinants(&m.ke, &m.eq, &m.ec, &[], 40).is_err());
    assert!(correlation_determinants(&m.ke, &m.eq, &m.ec, &[0.0; 5], 40).is_err());
}

#[test]
fn study_validation() {
    let grid = [0.0];
    assert!(convergence_study(&Potential::gww(), &[], &grid, None, None).is_err());
    assert!(convergence_study(&Potential::gww(), &[40, 20], &grid, None, None).is_err());
    assert!(EdgeModel::build(&Potential::gww(), 3, None, None).is_err());
    assert!((fit_decay(&[(1.0, 1.0), (2.0, 0.25), (4.0, 0.0625)]) - 2.0).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn determinants_nonnegative(a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0) {
        let d = limit_correlation_determinant(&[a, b, c]).unwrap();
        prop_assert!(d >= -1e-12);
    }
}
