use std::f64::consts::PI;

use bsq_core::asymptotics::moments::multi_indices;
use bsq_core::asymptotics::{
    compose_expansion, gaussian_moment, predict, remainder_bound, szego_remainder_bound, MomentTable, Poly, Predictor,
};
use bsq_core::geometry::TangentVector;
use bsq_core::hardy::ProjectorKernel;
use bsq_core::legendrian::{find_branches, find_branches_to_order, presets, quantize, BranchSet, Legendrian};
use bsq_core::model::ModelSpace;
use bsq_core::quadrature::{gauss_legendre_interval, QuadratureSpec};
use bsq_core::{Error, C64};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Composite Gauss–Legendre over `[q_j − 14, q_j + 14]` per axis.
fn moment_by_quadrature(beta: &[u32], p: &[f64], qj: &[f64]) -> C64 {
    let axis = |i: usize| -> C64 {
        let mut acc = c(0.0, 0.0);
        for panel in 0..56 {
            let a = qj[i] - 14.0 + panel as f64 * 0.5;
            let (xs, ws) = gauss_legendre_interval(20, a, a + 0.5);
            for (x, w) in xs.iter().zip(&ws) {
                let f = x.powi(beta[i] as i32) * c(-0.5 * (x - qj[i]).powi(2), -p[i] * x).exp();
                acc += w * f;
            }
        }
        acc
    };
    (0..beta.len()).map(axis).product()
}

#[test]
fn moment_examples() {
    let root = (2.0 * PI).sqrt();
    assert!((gaussian_moment(&[0], &[0.0], &[0.0]).unwrap() - root).norm() < 1e-14);
    assert!((gaussian_moment(&[0], &[1.0], &[0.0]).unwrap() - root * (-0.5f64).exp()).norm() < 1e-14);
    assert!((gaussian_moment(&[2], &[0.0], &[0.0]).unwrap() - root).norm() < 1e-14);
    assert!(matches!(gaussian_moment(&[9], &[0.0], &[0.0]), Err(Error::MomentDegree { degree: 9, max: 8 })));
}

#[test]
fn moment_table_structure() {
    let t = MomentTable::new(2, 4);
    assert!((t.entry(&[0, 0]).unwrap().constant_term() - c(2.0 * PI, 0.0)).norm() < 1e-13);
    // Coefficients of p^γ carry (−i)^{|γ|}: real for even, imaginary for odd.
    for (_, poly) in t.entries() {
        for (e, coef) in poly.terms() {
            let p_degree = e[0] + e[1];
            if p_degree % 2 == 0 {
                assert!(coef.im.abs() <= 1e-12 * coef.norm());
            } else {
                assert!(coef.re.abs() <= 1e-12 * coef.norm());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]
    #[test]
    fn moments_match_quadrature(
        d in 1usize..=2,
        which in 0usize..15,
        p in prop::array::uniform2(-2.0f64..2.0),
        q in prop::array::uniform2(-2.0f64..2.0),
    ) {
        let betas = multi_indices(d, 4);
        let beta = &betas[which % betas.len()];
        let exact = gaussian_moment(beta, &p[..d], &q[..d]).unwrap();
        let oracle = moment_by_quadrature(beta, &p[..d], &q[..d]);
        let scale = oracle.norm().max(1e-3);
        prop_assert!((exact - oracle).norm() <= 1e-10 * scale, "{beta:?}: {exact} vs {oracle}");
    }
}

fn bf_plane_set(poly: Poly, sigma: f64) -> (Legendrian, BranchSet) {
    let m = ModelSpace::bargmann_fock(1).unwrap();
    let plane = presets::bf_plane(&m, vec![c(0.0, 0.0)], poly, vec![0.2], sigma).unwrap();
    let x = plane.point(&[0.1]);
    let lam: Legendrian = plane.into();
    let set = find_branches(&lam, &x, 0.5).unwrap();
    (lam, set)
}

#[test]
fn flat_constant_data_has_no_corrections() {
    let m = ModelSpace::bargmann_fock(2).unwrap();
    // A huge width makes the weight constant to the retained order.
    let plane = presets::bf_plane(&m, vec![c(0.0, 0.0); 2], Poly::one(2), vec![0.0; 2], 1e9).unwrap();
    let set = find_branches(&plane.clone().into(), &plane.point(&[0.0, 0.0]), 0.5).unwrap();
    for a in compose_expansion(&set.branches[0], 2).unwrap() {
        assert!(a.max_coefficient() < 1e-15, "{a}");
    }
}

#[test]
fn first_correction_vanishes_at_the_origin() {
    let (_, set) = bf_plane_set(Poly::univariate(&[1.0, 0.5, 0.0, 0.3]), 1.0);
    let a = compose_expansion(&set.branches[0], 2).unwrap();
    assert!(a[0].is_odd());
    assert_eq!(a[0].eval_real(&[0.0, 0.0]), c(0.0, 0.0));

    let m = ModelSpace::projective_line(4).unwrap();
    let lat = presets::cp1_latitude(&m, 0.25).unwrap();
    let set = find_branches(&lat.clone().into(), &lat.point(1.3), 0.5).unwrap();
    let a = compose_expansion(&set.branches[0], 1).unwrap();
    assert!(a[0].is_odd());
    assert_eq!(a[0].eval_real(&[0.0, 0.0]), c(0.0, 0.0));
}

#[test]
fn first_correction_matches_brute_force_at_the_origin_plane() {
    // At w = 0 the k^{-1/2} term of the exact pairing is F'(x_j)/F(x_j)·∫q·e^{-q²/2}/√(2π) = 0.
    let (lam, set) = bf_plane_set(Poly::univariate(&[1.0, 0.5, 0.0, 0.3]), 1.0);
    let m = *lam.model();
    let w = TangentVector::zeros(1);
    let mut scaled = Vec::new();
    for k in [256u32, 1024, 4096] {
        let kern = ProjectorKernel::new(m, k).unwrap();
        let u = quantize(&kern, &lam, &set.displaced(&w, k).unwrap(), &QuadratureSpec::default()).unwrap();
        let lead = predict(&set, &w, k, 0).unwrap().value;
        scaled.push(((u - lead) / lead).norm() * k as f64);
    }
    // Relative error is O(1/k), so no k^{-1/2} term survives.
    assert!(scaled.windows(2).all(|p| (p[1] / p[0] - 1.0).abs() < 0.05), "{scaled:?}");
}

#[test]
fn insufficient_taylor_order_is_refused() {
    let m = ModelSpace::projective_line(2).unwrap();
    let eq = presets::cp1_equator(&m).unwrap();
    let set = find_branches_to_order(&eq.clone().into(), &eq.point(0.0), 0.5, 3).unwrap();
    assert_eq!(compose_expansion(&set.branches[0], 2).unwrap_err(), Error::TaylorOrder { have: 3, need: 4 });
    assert!(compose_expansion(&set.branches[0], 1).is_ok());
}

fn fit_slope(ks: &[u32], errs: &[f64]) -> f64 {
    let xs: Vec<f64> = ks.iter().map(|k| (*k as f64).ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[test]
fn bargmann_fock_expansion_is_exact_to_second_order() {
    let (lam, set) = bf_plane_set(Poly::univariate(&[1.0, 0.5, 0.0, 0.3]), 1.0);
    let m = *lam.model();
    let predictor = Predictor::new(set.clone(), 2).unwrap();
    let ks = [64u32, 128, 256, 512, 1024];
    for w in [TangentVector::scalar(0.0, 0.0), TangentVector::scalar(0.7, -0.4), TangentVector::scalar(-0.3, 1.1)] {
        let errs: Vec<f64> = ks
            .iter()
            .map(|&k| {
                let kern = ProjectorKernel::new(m, k).unwrap();
                let u = quantize(&kern, &lam, &set.displaced(&w, k).unwrap(), &QuadratureSpec::default()).unwrap();
                (u - predictor.eval(&w, k).unwrap().value).norm() / u.norm()
            })
            .collect();
        let slope = fit_slope(&ks, &errs);
        assert!(slope <= -1.35, "w = {:?}: slope {slope}, errors {errs:?}", w.components());
    }
}

#[test]
fn truncation_orders_differ_at_the_next_half_power() {
    let (_, set) = bf_plane_set(Poly::univariate(&[1.0, 0.5, 0.0, 0.3]), 1.0);
    let w = TangentVector::scalar(0.7, -0.4);
    let ks = [64u32, 128, 256, 512, 1024];
    for ell in 0..2 {
        let gaps: Vec<f64> = ks
            .iter()
            .map(|&k| {
                let a = predict(&set, &w, k, ell).unwrap();
                let b = predict(&set, &w, k, ell + 1).unwrap();
                (a.value - b.value).norm() / a.leading().norm()
            })
            .collect();
        let slope = fit_slope(&ks, &gaps);
        let expect = -(ell as f64 + 1.0) / 2.0;
        assert!((slope - expect).abs() <= 0.15, "ell {ell}: slope {slope}");
    }
}

fn unit_branch_set() -> BranchSet {
    let m = ModelSpace::bargmann_fock(1).unwrap();
    let plane = presets::bf_plane(&m, vec![c(0.0, 0.0)], Poly::one(1), vec![0.0], 1e9).unwrap();
    find_branches(&plane.clone().into(), &plane.point(&[0.0]), 0.5).unwrap()
}

#[test]
fn predict_examples() {
    let set = unit_branch_set();
    let lead = predict(&set, &TangentVector::zeros(1), 50, 0).unwrap();
    assert!((lead.value - c((100.0 / PI).sqrt(), 0.0)).norm() < 1e-12);
    assert!(lead.in_window);

    let perp = predict(&set, &TangentVector::scalar(1.0, 0.0), 50, 0).unwrap();
    assert!((perp.value - lead.value * (-1.0f64).exp()).norm() < 1e-12);

    let mixed = predict(&set, &TangentVector::scalar(1.0, 1.0), 50, 0).unwrap();
    let factor = mixed.value / lead.value;
    assert!((factor.norm() - (-1.0f64).exp()).abs() < 1e-12);
    assert!((factor.arg() + 1.0).abs() < 1e-12);

    // Outside ‖w‖ ≤ k^{1/6} the value is still produced, flagged.
    let far = predict(&set, &TangentVector::scalar(3.0, 0.0), 50, 0).unwrap();
    assert!(!far.in_window);
    assert!(far.value.norm() > 0.0);
}

#[test]
fn leading_term_agrees_with_the_exact_pairing() {
    // Exact Bargmann–Fock pairing at w = 1 + i for a flat weight: the
    // Gaussian integral gives e^{-p²}·e^{-ipq}.
    let set = unit_branch_set();
    let m = ModelSpace::bargmann_fock(1).unwrap();
    let plane = presets::bf_plane(&m, vec![c(0.0, 0.0)], Poly::one(1), vec![0.0], 1e9).unwrap();
    let w = TangentVector::scalar(1.0, 1.0);
    let k = 64;
    let kern = ProjectorKernel::new(m, k).unwrap();
    let u = quantize(&kern, &plane.into(), &set.displaced(&w, k).unwrap(), &QuadratureSpec::default()).unwrap();
    let p = predict(&set, &w, k, 0).unwrap();
    assert!((u - p.value).norm() < 1e-10 * u.norm(), "{u} vs {}", p.value);
}

#[test]
fn remainder_bound_examples() {
    let set = unit_branch_set();
    let zero = TangentVector::zeros(1);
    assert!((remainder_bound(100, 0, &set, &zero, 1.0, 0.1).unwrap() - 1.0).abs() < 1e-15);
    assert!((remainder_bound(100, 1, &set, &zero, 1.0, 0.1).unwrap() - 0.1).abs() < 1e-15);

    let m = ModelSpace::projective_line(2).unwrap();
    let eq = presets::cp1_equator(&m).unwrap();
    let twice: Legendrian = eq.clone().into();
    let twice = twice.union(&eq.clone().into());
    let set = find_branches(&twice, &eq.point(0.0), 0.5).unwrap();
    let w = TangentVector::scalar(1.0, 0.0);
    let k = 64;
    let got = remainder_bound(k, 0, &set, &w, 3.0, 0.1).unwrap();
    assert!((got - 2.0 * (-0.45f64).exp() * 3.0).abs() < 1e-8, "{got}");
}

#[test]
fn szego_bound_examples() {
    assert!((szego_remainder_bound(7, 0, &[0.0], &[0.3], &[0.3], 2.5, 0.1) - 2.5).abs() < 1e-15);
    let a = szego_remainder_bound(7, 0, &[1.0], &[0.0], &[2.0], 1.0, 1.0);
    let b = szego_remainder_bound(7, 0, &[-3.0], &[1.0], &[0.0], 1.0, 1.0);
    assert_eq!(a, b);
    assert!((szego_remainder_bound(16, 2, &[0.0; 2], &[0.0; 2], &[0.0; 2], 1.0, 0.1) - 1.0 / 16.0).abs() < 1e-15);
}

#[test]
fn equator_leading_term_and_first_correction() {
    // On the equator the leading law holds with relative error O(k^{-1}),
    // consistent with a first correction that vanishes on the diagonal.
    let m = ModelSpace::projective_line(2).unwrap();
    let eq = presets::cp1_equator(&m).unwrap();
    let lam: Legendrian = eq.clone().into();
    let set = find_branches(&lam, &eq.point(0.0), 0.5).unwrap();
    let a1 = &compose_expansion(&set.branches[0], 1).unwrap()[0];
    let ks = [64u32, 128, 256, 512];
    let w = TangentVector::scalar(0.5, 0.8);
    let resid: Vec<f64> = ks
        .iter()
        .map(|&k| {
            let kern = ProjectorKernel::new(m, k).unwrap();
            let u = quantize(&kern, &lam, &set.displaced(&w, k).unwrap(), &QuadratureSpec::default()).unwrap();
            let lead = predict(&set, &w, k, 0).unwrap().value;
            let fitted = (u - lead) / lead;
            (fitted - a1.eval_real(&[0.5, 0.8]) / (k as f64).sqrt()).norm()
        })
        .collect();
    let slope = fit_slope(&ks, &resid);
    assert!(slope <= -0.85, "residual slope {slope}: {resid:?}");
}
