//! Randomized invariants across the library: round trips, norm
//! inequalities, and convolution bounds. Case counts are kept low for the
//! properties that run solvers or fine grids.

use std::f64::consts::PI;

use proptest::prelude::*;

use psibound::norms;
use psibound::psi_core::PsiSpec;
use psibound::trig_poly::{self, TrigPoly};

fn poly_from_parts(a0_half: f64, cos: Vec<f64>, sin: Vec<f64>) -> TrigPoly {
    let n = cos.len().max(sin.len());
    let mut c = cos;
    let mut s = sin;
    c.resize(n, 0.0);
    s.resize(n, 0.0);
    TrigPoly::new(a0_half, c, s).unwrap()
}

fn coeff_vec(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 1..=len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inverse_undoes_eval(alpha in 0.1f64..2.0, r in 0.3f64..1.0, t in 1.0f64..100.0) {
        let spec = PsiSpec::exponential(alpha, r).unwrap();
        let y = spec.eval(t).unwrap();
        let back = spec.inverse(y).unwrap();
        prop_assert!((back - t).abs() <= 1e-9 * t, "t = {t}, back = {back}");
    }

    #[test]
    fn half_value_point_is_consistent(alpha in 0.1f64..2.0, r in 0.3f64..1.0, t in 1.0f64..100.0) {
        let spec = PsiSpec::exponential(alpha, r).unwrap();
        let ch = spec.characteristics(t).unwrap();
        let half = spec.eval(ch.eta).unwrap();
        let want = 0.5 * spec.eval(t).unwrap();
        prop_assert!((half - want).abs() <= 1e-10 * want);
        prop_assert!(ch.eta > t);
        prop_assert!((ch.mu - t / ch.eta_minus_t).abs() <= 1e-12 * ch.mu.abs());
    }

    #[test]
    fn wrapped_angles_land_in_the_period(t in -1e6f64..1e6) {
        let w = trig_poly::wrap_angle(t);
        prop_assert!((-PI..PI).contains(&w));
        let k = (t - w) / (2.0 * PI);
        prop_assert!((k - k.round()).abs() < 1e-6, "t = {t}, w = {w}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn integral_undoes_derivative(
        cos in coeff_vec(12),
        sin in coeff_vec(12),
        beta in 0.0f64..4.0,
    ) {
        // zero mean: the weighted derivative has no constant component
        let p = poly_from_parts(0.0, cos, sin);
        let spec = PsiSpec::exponential(std::f64::consts::LN_2, 0.5).unwrap();
        let d = trig_poly::psi_beta_derivative(&p, &spec, beta).unwrap();
        let back = trig_poly::psi_beta_integral(&d, &spec, beta).unwrap();
        let scale = 1.0f64.max(p.eval(0.37));
        prop_assert!(p.max_coeff_distance(&back) <= 1e-10 * scale.abs().max(1.0));
    }

    #[test]
    fn pairing_respects_hoelder(
        f_cos in coeff_vec(8),
        f_sin in coeff_vec(8),
        g_cos in coeff_vec(8),
        g_sin in coeff_vec(8),
        f0 in -1.0f64..1.0,
        g0 in -1.0f64..1.0,
        idx in 0usize..4,
    ) {
        let f = poly_from_parts(f0, f_cos, f_sin);
        let g = poly_from_parts(g0, g_cos, g_sin);
        let p = [1.0, 4.0 / 3.0, 2.0, f64::INFINITY][idx];
        let q = match p {
            1.0 => f64::INFINITY,
            x if x.is_infinite() => 1.0,
            x => x / (x - 1.0),
        };
        let lhs = norms::pairing(&f, &g).abs();
        let rhs = norms::poly_lp_norm(&f, p).unwrap() * norms::poly_lp_norm(&g, q).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-6) + 1e-12, "lhs = {lhs}, rhs = {rhs}");
    }

    #[test]
    fn convolution_sup_is_youngs_bound(
        h_cos in coeff_vec(6),
        h_sin in coeff_vec(6),
        g_cos in coeff_vec(6),
        g_sin in coeff_vec(6),
    ) {
        let h = poly_from_parts(0.2, h_cos, h_sin);
        let g = poly_from_parts(-0.3, g_cos, g_sin);
        let conv = trig_poly::convolve(&h, &g);
        let lhs = norms::poly_sup_norm(&conv);
        let rhs = norms::poly_lp_norm(&h, 1.0).unwrap() / PI * norms::poly_sup_norm(&g);
        prop_assert!(lhs <= rhs * (1.0 + 1e-6) + 1e-12, "lhs = {lhs}, rhs = {rhs}");
    }
}
