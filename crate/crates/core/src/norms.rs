//! Integral and sup norms over a period, grid sampling, and duality
//! pairings.

use std::f64::consts::PI;

use crate::psi_core::{self, PsiSpec};
use crate::tol;
use crate::trig_poly::{KernelSpec, TrigPoly};
use crate::{Error, Kahan, Result};

/// Where a grid's samples came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridSource {
    SampledPoly,
    SampledKernel,
    Raw,
}

/// Uniform samples of a 2π-periodic function at t_j = −π + 2πj/m,
/// j = 0..m. The size must be a power of two, at least 256.
#[derive(Debug, Clone)]
pub struct GridFunction {
    values: Vec<f64>,
    source: GridSource,
}

/// j-th node of the size-m uniform grid on [−π, π).
pub fn grid_point(m: usize, j: usize) -> f64 {
    -PI + 2.0 * PI * j as f64 / m as f64
}

impl GridFunction {
    pub fn from_fn(f: impl Fn(f64) -> f64, m: usize) -> Result<Self> {
        Self::build(f, m, GridSource::Raw)
    }

    pub fn from_poly(p: &TrigPoly, m: usize) -> Result<Self> {
        Self::build(|t| p.eval(t), m, GridSource::SampledPoly)
    }

    /// Sample a kernel; each point is evaluated to absolute accuracy tol_abs.
    pub fn from_kernel(kernel: &KernelSpec, m: usize, tol_abs: f64) -> Result<Self> {
        let mut values = Vec::with_capacity(m);
        for j in 0..m {
            values.push(kernel.eval(grid_point(m, j), tol_abs)?);
        }
        Ok(Self {
            values,
            source: GridSource::SampledKernel,
        })
    }

    fn build(f: impl Fn(f64) -> f64, m: usize, source: GridSource) -> Result<Self> {
        if m < 256 || !m.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "grid size must be a power of two >= 256, got {m}"
            )));
        }
        let values = (0..m).map(|j| f(grid_point(m, j))).collect();
        Ok(Self { values, source })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn source(&self) -> GridSource {
        self.source
    }
}

fn validate_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidArgument(format!(
            "norm exponent must lie in [1, inf], got {p}"
        )));
    }
    Ok(())
}

/// Power-of-two grid size comfortably resolving a polynomial of the given
/// degree: at least 8 samples per top harmonic, floor 256.
pub(crate) fn resolving_grid(degree: usize) -> usize {
    let need = 8 * (degree + 1);
    let mut m = 256;
    while m < need {
        m *= 2;
    }
    m
}

fn trapezoid_lp(values: &[f64], p: f64) -> f64 {
    let h = 2.0 * PI / values.len() as f64;
    let mut acc = Kahan::default();
    for &v in values {
        acc.add(v.abs().powf(p));
    }
    (acc.value() * h).powf(1.0 / p)
}

/// L_p norm of a sampled function: trapezoid rule (exact spacing, periodic
/// wrap) for finite p, plain maximum for p = ∞. Accuracy is limited by the
/// grid resolution; prefer [`poly_lp_norm`] when coefficients are available.
pub fn grid_lp_norm(g: &GridFunction, p: f64) -> Result<f64> {
    validate_exponent(p)?;
    if p.is_infinite() {
        return Ok(g.values.iter().fold(0.0f64, |m, &v| m.max(v.abs())));
    }
    Ok(trapezoid_lp(&g.values, p))
}

/// L_p norm of a polynomial over a period.
///
/// * p = 1: exact segment integration between sign changes.
/// * p = 2: exact from coefficients (Parseval).
/// * p = ∞: refined grid maximum, see [`poly_sup_norm`].
/// * other p: trapezoid sums on doubling grids until two successive levels
///   agree to [`tol::TOL_NORM`] relative; errors out past the grid cap.
pub fn poly_lp_norm(p: &TrigPoly, exponent: f64) -> Result<f64> {
    validate_exponent(exponent)?;
    if exponent.is_infinite() {
        return Ok(poly_sup_norm(p));
    }
    if exponent == 1.0 {
        return Ok(poly_l1_norm(p));
    }
    if exponent == 2.0 {
        let mut acc = Kahan::default();
        acc.add(2.0 * p.a0_half() * p.a0_half());
        for k in 1..=p.degree() {
            let (a, b) = p.coeff(k);
            acc.add(a * a + b * b);
        }
        return Ok((PI * acc.value()).sqrt());
    }

    let mut m = resolving_grid(p.degree());
    let mut values: Vec<f64> = (0..m).map(|j| p.eval(grid_point(m, j))).collect();
    let mut prev = trapezoid_lp(&values, exponent);
    loop {
        if 2 * m > tol::NORM_GRID_CAP {
            return Err(Error::Convergence(format!(
                "L_{exponent} norm did not settle within {} grid points",
                tol::NORM_GRID_CAP
            )));
        }
        m *= 2;
        let mut next = Vec::with_capacity(m);
        for (j, &v) in values.iter().enumerate() {
            next.push(v);
            next.push(p.eval(grid_point(m, 2 * j + 1)));
        }
        values = next;
        let cur = trapezoid_lp(&values, exponent);
        if (cur - prev).abs() <= tol::TOL_NORM * cur.max(f64::MIN_POSITIVE) {
            return Ok(cur);
        }
        prev = cur;
    }
}

/// Exact L_1 norm: |p| integrates in closed form between consecutive sign
/// changes, so the norm is a sum of antiderivative differences. Sign changes
/// are bracketed on a grid dense enough to separate the zeros of a
/// polynomial of this degree and then bisected to machine precision.
fn poly_l1_norm(p: &TrigPoly) -> f64 {
    let d = p.degree();
    if d == 0 {
        return 2.0 * PI * p.a0_half().abs();
    }
    // a0/2·t plus the termwise antiderivative of the oscillating part
    let anti = |t: f64| -> f64 {
        let mut acc = Kahan::default();
        acc.add(p.a0_half() * t);
        for k in 1..=d {
            let (a, b) = p.coeff(k);
            let (s, c) = (k as f64 * t).sin_cos();
            acc.add((a * s - b * c) / k as f64);
        }
        acc.value()
    };

    let m = (128 * d).max(4096);
    let mut zeros: Vec<f64> = Vec::new();
    let mut prev_t = -PI;
    let mut prev_v = p.eval(prev_t);
    for j in 1..=m {
        let t = -PI + 2.0 * PI * j as f64 / m as f64;
        let v = p.eval(t);
        if prev_v == 0.0 {
            zeros.push(prev_t);
        } else if prev_v * v < 0.0 {
            let (mut lo, mut hi, mut flo) = (prev_t, t, prev_v);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let fm = p.eval(mid);
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if flo * fm < 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            zeros.push(0.5 * (lo + hi));
        }
        prev_t = t;
        prev_v = v;
    }

    if zeros.is_empty() {
        // constant sign over the whole period
        return (anti(PI) - anti(-PI)).abs();
    }
    let mut acc = Kahan::default();
    for w in zeros.windows(2) {
        acc.add((anti(w[1]) - anti(w[0])).abs());
    }
    // close the loop: last zero around the period back to the first
    acc.add((anti(zeros[0] + 2.0 * PI) - anti(zeros[zeros.len() - 1])).abs());
    acc.value()
}

/// Sup norm of a polynomial: scan a resolving grid, then refine the top
/// local maxima of |p| by parabolic steps.
pub fn poly_sup_norm(p: &TrigPoly) -> f64 {
    if p.degree() == 0 {
        return p.a0_half().abs();
    }
    let m = resolving_grid(p.degree());
    let values: Vec<f64> = (0..m).map(|j| p.eval(grid_point(m, j))).collect();
    let mut peaks: Vec<(f64, usize)> = (0..m)
        .filter(|&j| {
            let prev = values[(j + m - 1) % m].abs();
            let here = values[j].abs();
            let next = values[(j + 1) % m].abs();
            here >= prev && here >= next
        })
        .map(|j| (values[j].abs(), j))
        .collect();
    peaks.sort_by(|x, y| y.0.total_cmp(&x.0));
    let h = 2.0 * PI / m as f64;
    let mut best = peaks.first().map_or(0.0, |&(v, _)| v);
    for &(_, j) in peaks.iter().take(6) {
        best = best.max(refine_abs_peak(p, grid_point(m, j), h));
    }
    best
}

fn refine_abs_peak(p: &TrigPoly, t0: f64, h0: f64) -> f64 {
    let sign = if p.eval(t0) >= 0.0 { 1.0 } else { -1.0 };
    let g = |t: f64| sign * p.eval(t);
    let mut t = t0;
    let mut h = 0.5 * h0;
    let mut best = g(t0);
    for _ in 0..48 {
        let y0 = g(t - h);
        let y1 = g(t);
        let y2 = g(t + h);
        best = best.max(y0).max(y1).max(y2);
        let denom = y0 - 2.0 * y1 + y2;
        if denom < 0.0 {
            let step = ((y0 - y2) / (2.0 * denom)).clamp(-1.0, 1.0);
            t = (t + step * h).clamp(t0 - h0, t0 + h0);
        }
        h *= 0.5;
        if h < 1e-14 {
            break;
        }
    }
    best.abs()
}

/// Exact period integral ∫ f·g dt from coefficients:
/// π·Σ (a_k a'_k + b_k b'_k) + 2π·a0_half·a0'_half.
pub fn pairing(f: &TrigPoly, g: &TrigPoly) -> f64 {
    let d = f.degree().min(g.degree());
    let mut acc = Kahan::default();
    for k in 1..=d {
        let (af, bf) = f.coeff(k);
        let (ag, bg) = g.coeff(k);
        acc.add(af * ag + bf * bg);
    }
    PI * acc.value() + 2.0 * PI * f.a0_half() * g.a0_half()
}

/// Trapezoid pairing of a sampled function against a polynomial. Exact (to
/// rounding) whenever the grid resolves the combined spectrum, i.e.
/// m > deg(sampled) + deg(g) for band-limited samples.
pub fn pairing_quadrature(f: &GridFunction, g: &TrigPoly) -> f64 {
    let m = f.len();
    let h = 2.0 * PI / m as f64;
    let mut acc = Kahan::default();
    for (j, &v) in f.values().iter().enumerate() {
        acc.add(v * g.eval(grid_point(m, j)));
    }
    acc.value() * h
}

/// Closed-form period integral of (staged ψ-difference)·(unit difference)
/// at order n:
/// π/g₁²·Σ_{k=n+1}^{n1−1} ψ(k)(k − n)² + π·ψ(n1)
/// + π/g₂²·Σ_{k=n1+1}^{n2−1} ψ(k)(n2 − k)²,
/// where n1 = [η(n)], n2 = [η(η(n))], g₁ = n1 − n, g₂ = n2 − n1.
pub fn pairing_analytic(spec: &PsiSpec, n: u32) -> Result<f64> {
    let st = psi_core::stage_points(spec, n)?;
    if st.n1 - st.n < 2 || st.n2 - st.n1 < 2 {
        return Err(Error::Precondition(format!(
            "analytic pairing needs gaps of at least 2: n = {}, [eta(n)] = {}, [eta(eta(n))] = {}",
            st.n, st.n1, st.n2
        )));
    }
    let g1 = (st.n1 - st.n) as f64;
    let g2 = (st.n2 - st.n1) as f64;
    let mut s1 = Kahan::default();
    for k in (st.n + 1)..st.n1 {
        let d = (k - st.n) as f64;
        s1.add(spec.eval(k as f64)? * d * d);
    }
    let mut s2 = Kahan::default();
    for k in (st.n1 + 1)..st.n2 {
        let d = (st.n2 - k) as f64;
        s2.add(spec.eval(k as f64)? * d * d);
    }
    Ok(PI / (g1 * g1) * s1.value() + PI * spec.eval(st.n1 as f64)? + PI / (g2 * g2) * s2.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trig_poly;
    use std::f64::consts::LN_2;

    fn half_sqrt() -> PsiSpec {
        PsiSpec::exponential(LN_2, 0.5).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(GridFunction::from_fn(|t| t, 100).is_err());
        assert!(GridFunction::from_fn(|t| t, 300).is_err());
        let g = GridFunction::from_fn(|t| t.sin(), 256).unwrap();
        assert_eq!(g.len(), 256);
        assert_eq!(g.source(), GridSource::Raw);
    }

    #[test]
    fn exponent_validation() {
        let p = TrigPoly::new(0.0, vec![1.0], vec![0.0]).unwrap();
        assert!(poly_lp_norm(&p, 0.5).is_err());
        assert!(poly_lp_norm(&p, f64::NAN).is_err());
        assert!(poly_lp_norm(&p, 1.0).is_ok());
        assert!(poly_lp_norm(&p, f64::INFINITY).is_ok());
    }

    #[test]
    fn norms_of_cosine_match_closed_forms() {
        let p = TrigPoly::new(0.0, vec![1.0], vec![0.0]).unwrap();
        // ||cos||_1 = 4, ||cos||_2 = sqrt(pi), ||cos||_4 = (3pi/4)^(1/4), sup = 1
        assert!((poly_lp_norm(&p, 1.0).unwrap() - 4.0).abs() < 1e-14);
        assert!((poly_lp_norm(&p, 2.0).unwrap() - PI.sqrt()).abs() < 1e-14);
        assert!((poly_lp_norm(&p, 4.0).unwrap() - (3.0 * PI / 4.0).powf(0.25)).abs() < 1e-8);
        assert!((poly_lp_norm(&p, f64::INFINITY).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_l1_matches_fine_quadrature() {
        let p = TrigPoly::new(0.21, vec![0.4, -0.3, 0.55], vec![-0.62, 0.11, 0.0]).unwrap();
        let exact = poly_lp_norm(&p, 1.0).unwrap();
        let g = GridFunction::from_poly(&p, 1 << 18).unwrap();
        let quad = grid_lp_norm(&g, 1.0).unwrap();
        assert!((exact - quad).abs() < 1e-8 * exact, "{exact} vs {quad}");

        // sign-definite case: the norm collapses to the mean term
        let q = TrigPoly::new(2.0, vec![1.0], vec![0.3]).unwrap();
        let want = 4.0 * PI;
        assert!((poly_lp_norm(&q, 1.0).unwrap() - want).abs() < 1e-12);

        // high-degree oscillatory case that defeats plain grid refinement
        let spec = half_sqrt();
        let d1 = trig_poly::unit_difference(&spec, 49).unwrap();
        let exact = poly_lp_norm(&d1, 1.0).unwrap();
        let g = GridFunction::from_poly(&d1, 1 << 19).unwrap();
        let quad = grid_lp_norm(&g, 1.0).unwrap();
        assert!((exact - quad).abs() < 1e-7 * exact, "{exact} vs {quad}");
    }

    #[test]
    fn parseval_matches_quadrature() {
        let p =
            TrigPoly::new(0.17, vec![0.3, -0.5, 0.0, 0.25], vec![-0.1, 0.0, 0.7, 0.05]).unwrap();
        let exact = poly_lp_norm(&p, 2.0).unwrap();
        let g = GridFunction::from_poly(&p, 256).unwrap();
        let quad = grid_lp_norm(&g, 2.0).unwrap();
        // trapezoid is exact for band-limited squares once m > 2·deg
        assert!((exact - quad).abs() < 1e-13 * exact);
    }

    #[test]
    fn sup_norm_refines_between_grid_nodes() {
        // cos(32 t) shifted so peaks fall off any power-of-two grid
        let mut cos = vec![0.0; 32];
        let mut sin = vec![0.0; 32];
        cos[31] = (0.37f64).cos();
        sin[31] = (0.37f64).sin();
        let p = TrigPoly::new(0.0, cos, sin).unwrap();
        assert!((poly_sup_norm(&p) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn kernel_sup_norms_match_reference() {
        let spec = half_sqrt();
        for &(beta, want) in &[(0.0, 0.59673323811075918), (1.0, 0.45973902038421333)] {
            let kernel = trig_poly::KernelSpec::new(spec.clone(), beta, 25).unwrap();
            let (kpoly, _) = kernel.truncate_to_poly(1e-13).unwrap();
            let got = poly_sup_norm(&kpoly);
            assert!((got - want).abs() < 1e-8, "beta = {beta}: {got} vs {want}");
        }
    }

    #[test]
    fn kernel_fractional_norm_matches_reference() {
        let spec = half_sqrt();
        let kernel = trig_poly::KernelSpec::new(spec, 0.0, 25).unwrap();
        let (kpoly, _) = kernel.truncate_to_poly(1e-13).unwrap();
        let got = poly_lp_norm(&kpoly, 1.25).unwrap();
        assert!((got - 0.1661987).abs() < 5e-6, "got {got}");
    }

    #[test]
    fn kernel_l2_norm_has_parseval_form() {
        let spec = half_sqrt();
        let kernel = trig_poly::KernelSpec::new(spec.clone(), 0.0, 25).unwrap();
        let (kpoly, cut) = kernel.truncate_to_poly(1e-14).unwrap();
        let via_norm = poly_lp_norm(&kpoly, 2.0).unwrap();
        let mut sum = 0.0;
        for k in 25..cut {
            let w = spec.eval(k as f64).unwrap();
            sum += w * w;
        }
        let direct = (PI * sum).sqrt();
        assert!((via_norm - direct).abs() < 1e-14);
        assert!((via_norm - 0.163990399411).abs() < 1e-9);
    }

    #[test]
    fn pairing_matches_quadrature_exactly() {
        let f = TrigPoly::new(0.4, vec![0.3, -0.2, 0.9], vec![0.0, 0.1, -0.6]).unwrap();
        let g = TrigPoly::new(-0.1, vec![1.0, 0.0, 0.5], vec![0.2, 0.0, 0.3]).unwrap();
        let exact = pairing(&f, &g);
        let sampled = GridFunction::from_poly(&f, 256).unwrap();
        let quad = pairing_quadrature(&sampled, &g);
        assert!((exact - quad).abs() < 1e-14);
        // orthogonality: disjoint spectra pair to zero
        let lo = TrigPoly::new(0.0, vec![1.0], vec![0.0]).unwrap();
        let hi = TrigPoly::new(0.0, vec![0.0, 1.0], vec![0.0, 0.0]).unwrap();
        assert_eq!(pairing(&lo, &hi), 0.0);
    }

    #[test]
    fn analytic_pairing_matches_coefficient_pairing() {
        let spec = half_sqrt();
        let dpsi = trig_poly::extremal_difference(&spec, 25).unwrap();
        let d1 = trig_poly::unit_difference(&spec, 25).unwrap();
        let exact = pairing(&dpsi, &d1);
        let formula = pairing_analytic(&spec, 25).unwrap();
        assert!((formula - exact).abs() < 1e-14 * formula.abs());
        assert!((formula - 0.39436683747743723).abs() < 1e-13);
    }

    #[test]
    fn analytic_pairing_handles_degenerate_plateaus() {
        // r = 1 with a 2.5-wide half-value gap: stages collapse to gaps of 2..3
        let spec = PsiSpec::exponential(LN_2 / 2.5, 1.0).unwrap();
        let formula = pairing_analytic(&spec, 10).unwrap();
        assert!((formula - 0.19515621209616874).abs() < 1e-14);
        let dpsi = trig_poly::extremal_difference(&spec, 10).unwrap();
        let d1 = trig_poly::unit_difference(&spec, 10).unwrap();
        assert!((pairing(&dpsi, &d1) - formula).abs() < 1e-15);
    }
}
