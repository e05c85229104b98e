//! Trigonometric polynomials, staged cosine sums, truncated kernels, and the
//! weighted derivative/integral pair.

use std::f64::consts::PI;

use crate::psi_core::{self, PsiSpec};
use crate::tol;
use crate::{Error, Kahan, Result};

/// p(t) = a0_half + Σ_{k=1}^{D} (a_k cos kt + b_k sin kt), stored in
/// canonical form: the top harmonic pair is nonzero unless the degree is 0.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    a0_half: f64,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl TrigPoly {
    /// Build from coefficients; validates finiteness and equal lengths, then
    /// trims trailing zero pairs.
    pub fn new(a0_half: f64, cos: Vec<f64>, sin: Vec<f64>) -> Result<Self> {
        if cos.len() != sin.len() {
            return Err(Error::InvalidArgument(format!(
                "coefficient arrays differ in length: {} vs {}",
                cos.len(),
                sin.len()
            )));
        }
        if !a0_half.is_finite()
            || cos.iter().any(|v| !v.is_finite())
            || sin.iter().any(|v| !v.is_finite())
        {
            return Err(Error::InvalidArgument(
                "coefficients must all be finite".into(),
            ));
        }
        Ok(Self::canonical(a0_half, cos, sin))
    }

    pub(crate) fn canonical(a0_half: f64, mut cos: Vec<f64>, mut sin: Vec<f64>) -> Self {
        while let (Some(&ca), Some(&sa)) = (cos.last(), sin.last()) {
            if ca == 0.0 && sa == 0.0 {
                cos.pop();
                sin.pop();
            } else {
                break;
            }
        }
        TrigPoly { a0_half, cos, sin }
    }

    pub fn zero() -> Self {
        TrigPoly {
            a0_half: 0.0,
            cos: Vec::new(),
            sin: Vec::new(),
        }
    }

    pub fn constant(c: f64) -> Self {
        TrigPoly {
            a0_half: c,
            cos: Vec::new(),
            sin: Vec::new(),
        }
    }

    /// Degree of the top retained harmonic (0 for constants).
    pub fn degree(&self) -> usize {
        self.cos.len()
    }

    pub fn a0_half(&self) -> f64 {
        self.a0_half
    }

    pub fn cos_coeffs(&self) -> &[f64] {
        &self.cos
    }

    pub fn sin_coeffs(&self) -> &[f64] {
        &self.sin
    }

    /// (a_k, b_k) for k ≥ 1; zero beyond the degree.
    pub fn coeff(&self, k: usize) -> (f64, f64) {
        if k == 0 || k > self.cos.len() {
            (0.0, 0.0)
        } else {
            (self.cos[k - 1], self.sin[k - 1])
        }
    }

    /// Evaluate by a rotating phasor, reseeded from `sin_cos` every 64 steps
    /// to keep the recurrence error near machine precision.
    pub fn eval(&self, t: f64) -> f64 {
        let (st, ct) = t.sin_cos();
        let mut acc = self.a0_half;
        let mut ck = 1.0f64;
        let mut sk = 0.0f64;
        for k in 0..self.cos.len() {
            if k % 64 == 0 {
                let (s, c) = (((k + 1) as f64) * t).sin_cos();
                ck = c;
                sk = s;
            } else {
                let c = ck * ct - sk * st;
                let s = sk * ct + ck * st;
                ck = c;
                sk = s;
            }
            acc += self.cos[k] * ck + self.sin[k] * sk;
        }
        acc
    }

    pub fn add(&self, other: &TrigPoly) -> TrigPoly {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &TrigPoly) -> TrigPoly {
        self.combine(other, -1.0)
    }

    fn combine(&self, other: &TrigPoly, sign: f64) -> TrigPoly {
        let d = self.degree().max(other.degree());
        let mut cos = vec![0.0; d];
        let mut sin = vec![0.0; d];
        for k in 1..=d {
            let (a1, b1) = self.coeff(k);
            let (a2, b2) = other.coeff(k);
            cos[k - 1] = a1 + sign * a2;
            sin[k - 1] = b1 + sign * b2;
        }
        TrigPoly::canonical(self.a0_half + sign * other.a0_half, cos, sin)
    }

    pub fn scale(&self, factor: f64) -> TrigPoly {
        TrigPoly::canonical(
            self.a0_half * factor,
            self.cos.iter().map(|v| v * factor).collect(),
            self.sin.iter().map(|v| v * factor).collect(),
        )
    }

    /// Largest absolute coefficient deviation against another polynomial.
    pub fn max_coeff_distance(&self, other: &TrigPoly) -> f64 {
        let d = self.degree().max(other.degree());
        let mut worst = (self.a0_half - other.a0_half).abs();
        for k in 1..=d {
            let (a1, b1) = self.coeff(k);
            let (a2, b2) = other.coeff(k);
            worst = worst.max((a1 - a2).abs()).max((b1 - b2).abs());
        }
        worst
    }

    /// Single-line record, `{:.16e}` per coefficient (round-trip exact).
    pub fn to_record(&self) -> String {
        let join = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{x:.16e}"))
                .collect::<Vec<_>>()
                .join(",")
        };
        format!(
            "deg={};a0_half={:.16e};cos={};sin={}",
            self.degree(),
            self.a0_half,
            join(&self.cos),
            join(&self.sin)
        )
    }

    /// Parse a record produced by [`TrigPoly::to_record`].
    pub fn from_record(s: &str) -> Result<Self> {
        let mut deg = None;
        let mut a0 = None;
        let mut cos = None;
        let mut sin = None;
        for part in s.split(';') {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("bad record part {part:?}")))?;
            let parse_list = |v: &str| -> Result<Vec<f64>> {
                if v.is_empty() {
                    return Ok(Vec::new());
                }
                v.split(',')
                    .map(|x| {
                        x.parse::<f64>().map_err(|e| {
                            Error::InvalidArgument(format!("bad coefficient {x:?}: {e}"))
                        })
                    })
                    .collect()
            };
            match k {
                "deg" => {
                    deg =
                        Some(v.parse::<usize>().map_err(|e| {
                            Error::InvalidArgument(format!("bad degree {v:?}: {e}"))
                        })?)
                }
                "a0_half" => {
                    a0 =
                        Some(v.parse::<f64>().map_err(|e| {
                            Error::InvalidArgument(format!("bad constant {v:?}: {e}"))
                        })?)
                }
                "cos" => cos = Some(parse_list(v)?),
                "sin" => sin = Some(parse_list(v)?),
                _ => return Err(Error::InvalidArgument(format!("unknown record key {k:?}"))),
            }
        }
        let (deg, a0, cos, sin) = match (deg, a0, cos, sin) {
            (Some(d), Some(a), Some(c), Some(s)) => (d, a, c, s),
            _ => return Err(Error::InvalidArgument("record missing fields".into())),
        };
        if cos.len() != deg || sin.len() != deg {
            return Err(Error::InvalidArgument(format!(
                "record length mismatch: deg = {deg}, cos = {}, sin = {}",
                cos.len(),
                sin.len()
            )));
        }
        TrigPoly::new(a0, cos, sin)
    }
}

/// Map an angle to (−π, π].
pub fn wrap_angle(t: f64) -> f64 {
    let mut x = t.rem_euclid(2.0 * PI);
    if x > PI {
        x -= 2.0 * PI;
    }
    x
}

/// Staged cosine sum D_{k,β}(t) = cos(βπ/2)/2 + Σ_{j=1}^{k} cos(jt − βπ/2),
/// as a coefficient-form polynomial.
pub fn dirichlet(k: usize, beta: f64) -> TrigPoly {
    let (s, c) = (beta * PI / 2.0).sin_cos();
    TrigPoly::canonical(0.5 * c, vec![c; k], vec![s; k])
}

/// Closed-form evaluation of the staged cosine sum:
/// [sin((k + 1/2)t − βπ/2) + sin(βπ/2)·cos(t/2)] / (2 sin(t/2)),
/// with the removable point near t ≡ 0 handled by direct summation.
pub fn dirichlet_closed(k: usize, beta: f64, t: f64) -> f64 {
    let theta = beta * PI / 2.0;
    let tw = wrap_angle(t);
    let s_half = (0.5 * tw).sin();
    if s_half.abs() < 1e-7 {
        let mut acc = 0.5 * theta.cos();
        for j in 1..=k {
            acc += ((j as f64) * tw - theta).cos();
        }
        return acc;
    }
    (((k as f64 + 0.5) * tw - theta).sin() + theta.sin() * (0.5 * tw).cos()) / (2.0 * s_half)
}

/// Averaged staged mean
/// W_{N,M}(t) = (M − N)⁻¹ Σ_{k=N}^{M−1} Σ_{j=1}^{k} λ(j) cos(jt + γ),
/// accumulated literally over both indices (compensated summation).
pub fn w_nm(lambda: &dyn Fn(usize) -> f64, gamma: f64, n: usize, m: usize) -> Result<TrigPoly> {
    validate_nm(n, m)?;
    let deg = m - 1;
    let mut acc = vec![Kahan::default(); deg + 1];
    for k in n..m {
        for j in 1..=k {
            acc[j].add(lambda(j));
        }
    }
    assemble_mean(&acc, gamma, n, m)
}

/// The same mean via the closed re-grouping: harmonics up to N at full
/// weight, then a linear taper with factor (M − j)/(M − N) on (N, M).
pub fn w_nm_rearranged(
    lambda: &dyn Fn(usize) -> f64,
    gamma: f64,
    n: usize,
    m: usize,
) -> Result<TrigPoly> {
    validate_nm(n, m)?;
    let deg = m - 1;
    let mut acc = vec![Kahan::default(); deg + 1];
    for (j, slot) in acc.iter_mut().enumerate().take(deg + 1).skip(1) {
        let w = if j <= n {
            (m - n) as f64 * lambda(j)
        } else {
            (m - j) as f64 * lambda(j)
        };
        slot.add(w);
    }
    assemble_mean(&acc, gamma, n, m)
}

fn validate_nm(n: usize, m: usize) -> Result<()> {
    if n < 1 || m <= n {
        return Err(Error::InvalidArgument(format!(
            "staged mean needs 1 <= N < M, got N = {n}, M = {m}"
        )));
    }
    Ok(())
}

fn assemble_mean(acc: &[Kahan], gamma: f64, n: usize, m: usize) -> Result<TrigPoly> {
    let deg = m - 1;
    let scale = 1.0 / (m - n) as f64;
    let (sg, cg) = gamma.sin_cos();
    let mut cos = vec![0.0; deg];
    let mut sin = vec![0.0; deg];
    for j in 1..=deg {
        let w = acc[j].value() * scale;
        cos[j - 1] = w * cg;
        sin[j - 1] = -w * sg;
    }
    TrigPoly::new(0.0, cos, sin)
}

fn staged_profile(st: psi_core::StagePoints, weight: &dyn Fn(usize) -> f64) -> Result<TrigPoly> {
    let n = st.n as usize;
    let n1 = st.n1 as usize;
    let n2 = st.n2 as usize;
    if st.n1 - st.n < 2 || st.n2 - st.n1 < 2 {
        return Err(Error::Precondition(format!(
            "staged profile needs gaps of at least 2: n = {}, [eta(n)] = {}, [eta(eta(n))] = {}",
            st.n, st.n1, st.n2
        )));
    }
    let g1 = (n1 - n) as f64;
    let g2 = (n2 - n1) as f64;
    let mut cos = vec![0.0; n2 - 1];
    for (k, c) in cos.iter_mut().enumerate().map(|(i, c)| (i + 1, c)) {
        if k > n && k < n1 {
            *c = (k - n) as f64 / g1 * weight(k);
        } else if k == n1 {
            *c = weight(k);
        } else if k > n1 && k < n2 {
            *c = (n2 - k) as f64 / g2 * weight(k);
        }
    }
    let sin = vec![0.0; n2 - 1];
    TrigPoly::new(0.0, cos, sin)
}

/// Difference of two staged means with weights ψ(k): the cosine profile ramps
/// up over (n, [η(n)]), holds ψ([η(n)]) at the plateau index, and ramps down
/// over ([η(n)], [η(η(n))]). Equals
/// W_{[η(n)],[η(η(n))]} − W_{n,[η(n)]} with λ = ψ, γ = 0.
pub fn extremal_difference(spec: &PsiSpec, n: u32) -> Result<TrigPoly> {
    let st = psi_core::stage_points(spec, n)?;
    // integer arguments are >= 1, so eval can only yield non-finite values for
    // a misbehaving generic weight; TrigPoly::new rejects those
    staged_profile(st, &|k| spec.eval(k as f64).unwrap_or(f64::NAN))
}

/// Unit-weight counterpart of [`extremal_difference`]: the same ramp profile
/// with weight 1, which is the exact image of the weighted profile under the
/// derivative map at β = 0.
pub fn unit_difference(spec: &PsiSpec, n: u32) -> Result<TrigPoly> {
    let st = psi_core::stage_points(spec, n)?;
    staged_profile(st, &|_| 1.0)
}

/// Derivative in the weighted sense: harmonic k is divided by ψ(k) and its
/// phase advanced by βπ/2, i.e. with θ = βπ/2
/// (a_k, b_k) ↦ ((a_k cos θ + b_k sin θ)/ψ(k), (b_k cos θ − a_k sin θ)/ψ(k)).
/// The constant term is annihilated (classes are defined modulo constants).
pub fn psi_beta_derivative(p: &TrigPoly, spec: &PsiSpec, beta: f64) -> Result<TrigPoly> {
    let (s, c) = (beta * PI / 2.0).sin_cos();
    let deg = p.degree();
    let mut cos = vec![0.0; deg];
    let mut sin = vec![0.0; deg];
    for k in 1..=deg {
        let (a, b) = p.coeff(k);
        let w = spec.eval(k as f64)?;
        if !(w > 0.0) {
            return Err(Error::Domain(format!(
                "psi({k}) = {w}; derivative needs a positive weight"
            )));
        }
        cos[k - 1] = (a * c + b * s) / w;
        sin[k - 1] = (b * c - a * s) / w;
    }
    TrigPoly::new(0.0, cos, sin)
}

/// Inverse of [`psi_beta_derivative`] on constant-free polynomials: harmonic
/// k is multiplied by ψ(k) and its phase retarded by βπ/2. For spectra
/// supported on k ≥ n it coincides with kernel convolution, see
/// [`convolve`] and [`KernelSpec`].
pub fn psi_beta_integral(p: &TrigPoly, spec: &PsiSpec, beta: f64) -> Result<TrigPoly> {
    let (s, c) = (beta * PI / 2.0).sin_cos();
    let deg = p.degree();
    let mut cos = vec![0.0; deg];
    let mut sin = vec![0.0; deg];
    for k in 1..=deg {
        let (a, b) = p.coeff(k);
        let w = spec.eval(k as f64)?;
        cos[k - 1] = w * (a * c - b * s);
        sin[k - 1] = w * (b * c + a * s);
    }
    TrigPoly::new(0.0, cos, sin)
}

/// Truncation to the harmonics 0..=order.
pub fn fourier_partial_sum(p: &TrigPoly, order: usize) -> TrigPoly {
    let d = p.degree().min(order);
    TrigPoly::canonical(
        p.a0_half(),
        p.cos_coeffs()[..d].to_vec(),
        p.sin_coeffs()[..d].to_vec(),
    )
}

/// Mean convolution (1/π) ∫ h(x − t) g(t) dt in coefficient form: harmonic k
/// maps to (a_h a_g − b_h b_g, a_h b_g + b_h a_g); constants compose as
/// 2·a0h_half·a0g_half.
pub fn convolve(h: &TrigPoly, g: &TrigPoly) -> TrigPoly {
    let d = h.degree().min(g.degree());
    let mut cos = vec![0.0; d];
    let mut sin = vec![0.0; d];
    for k in 1..=d {
        let (ah, bh) = h.coeff(k);
        let (ag, bg) = g.coeff(k);
        cos[k - 1] = ah * ag - bh * bg;
        sin[k - 1] = ah * bg + bh * ag;
    }
    TrigPoly::canonical(2.0 * h.a0_half() * g.a0_half(), cos, sin)
}

/// Truncated weighted series Ψ_{β,n}(t) = Σ_{k=n}^{∞} ψ(k) cos(kt − βπ/2).
///
/// Construction fails unless the series admits a certified truncation within
/// the term cap at the default tolerance.
#[derive(Clone, Debug)]
pub struct KernelSpec {
    psi: PsiSpec,
    beta: f64,
    n: u32,
}

impl KernelSpec {
    pub fn new(psi: PsiSpec, beta: f64, n: u32) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidArgument("kernel order n must be >= 1".into()));
        }
        if !beta.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "kernel phase beta must be finite, got {beta}"
            )));
        }
        let kernel = Self { psi, beta, n };
        kernel.truncation_index(kernel.default_tol()?)?;
        Ok(kernel)
    }

    pub fn psi(&self) -> &PsiSpec {
        &self.psi
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Default absolute truncation tolerance: [`tol::KERNEL_TOL_REL`] scaled
    /// by ψ(n)·(η(n) − n).
    pub fn default_tol(&self) -> Result<f64> {
        let ch = self.psi.characteristics(self.n as f64)?;
        Ok(tol::KERNEL_TOL_REL * self.psi.eval(self.n as f64)? * ch.eta_minus_t)
    }

    /// Smallest cut K ≥ n whose remainder Σ_{k≥K} ψ(k) is certified ≤ tol by
    /// the half-value tail bound ψ(K)·(1 + 2/(1 − 2/μ(K))·(η(K) − K)).
    fn truncation_index(&self, tol_abs: f64) -> Result<usize> {
        if !(tol_abs > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "truncation tolerance must be positive, got {tol_abs}"
            )));
        }
        let cert = |k: usize| -> Result<Option<f64>> {
            let v = self.psi.eval(k as f64)?;
            if v == 0.0 {
                return Ok(Some(0.0));
            }
            let ch = match self.psi.characteristics(k as f64) {
                Ok(c) => c,
                Err(_) => return Ok(None),
            };
            if ch.mu <= 2.0 {
                return Ok(None);
            }
            Ok(Some(v * (1.0 + 2.0 / (1.0 - 2.0 / ch.mu) * ch.eta_minus_t)))
        };
        let n = self.n as usize;
        let mut k = n.max(2);
        loop {
            if let Some(c) = cert(k)? {
                if c <= tol_abs {
                    break;
                }
            }
            k *= 2;
            if k > tol::KERNEL_TERM_CAP {
                return Err(Error::Convergence(format!(
                    "kernel tail not certified below {tol_abs} within {} terms",
                    tol::KERNEL_TERM_CAP
                )));
            }
        }
        let mut lo = n;
        let mut hi = k;
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            match cert(mid)? {
                Some(c) if c <= tol_abs => hi = mid,
                _ => lo = mid,
            }
        }
        Ok(hi.max(n))
    }

    /// Smallest K with ψ(K) ≤ target (used by the staged-sum path).
    fn weight_cut(&self, target: f64) -> Result<usize> {
        let n = self.n as usize;
        if self.psi.eval(n as f64)? <= target {
            return Ok(n);
        }
        let mut k = n.max(2);
        while self.psi.eval(k as f64)? > target {
            k *= 2;
            if k > tol::KERNEL_TERM_CAP {
                return Err(Error::Convergence(format!(
                    "weight does not fall below {target} within {} terms",
                    tol::KERNEL_TERM_CAP
                )));
            }
        }
        let mut lo = n;
        let mut hi = k;
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.psi.eval(mid as f64)? <= target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }

    /// Evaluate Ψ_{β,n}(t) to absolute accuracy `tol_abs`. Direct summation
    /// near t ≡ 0, the staged-sum rearrangement for |t| ≥ 1/(η(n) − n) where
    /// its tail bound ψ(K)·π/|t| is effective.
    pub fn eval(&self, t: f64, tol_abs: f64) -> Result<f64> {
        if !(tol_abs > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "evaluation tolerance must be positive, got {tol_abs}"
            )));
        }
        let tw = wrap_angle(t);
        let ch = self.psi.characteristics(self.n as f64)?;
        let switch = 1.0 / ch.eta_minus_t;
        if tw.abs() >= switch.min(0.5) && tw.abs() > 1e-8 {
            self.eval_staged(tw, tol_abs)
        } else {
            self.eval_direct(tw, tol_abs)
        }
    }

    fn eval_direct(&self, tw: f64, tol_abs: f64) -> Result<f64> {
        let cut = self.truncation_index(tol_abs)?;
        let theta = self.beta * PI / 2.0;
        let (st, ct) = tw.sin_cos();
        let n = self.n as usize;
        let mut acc = Kahan::default();
        let mut ck = 0.0f64;
        let mut sk = 0.0f64;
        for k in n..cut {
            if (k - n) % 64 == 0 {
                let (s, c) = ((k as f64) * tw - theta).sin_cos();
                ck = c;
                sk = s;
            } else {
                let c = ck * ct - sk * st;
                let s = sk * ct + ck * st;
                ck = c;
                sk = s;
            }
            acc.add(self.psi.eval(k as f64)? * ck);
        }
        Ok(acc.value())
    }

    /// Staged-sum path. The series telescopes to
    /// Σ_{k=n}^{∞} (ψ(k) − ψ(k+1)) D_{k,β}(t) − ψ(n) D_{n−1,β}(t):
    /// partial sums Σ ψ(k)(D_k − D_{k−1}) leave −ψ(n)D_{n−1} behind, so the
    /// lead term enters with a minus sign (cross-checked against the direct
    /// series in `kernel_paths_agree`).
    fn eval_staged(&self, tw: f64, tol_abs: f64) -> Result<f64> {
        let target = tol_abs * tw.abs() / PI;
        let cut = self.weight_cut(target)?;
        let n = self.n as usize;
        let mut acc = Kahan::default();
        for k in n..cut {
            let dk = self.psi.eval(k as f64)? - self.psi.eval((k + 1) as f64)?;
            acc.add(dk * dirichlet_closed(k, self.beta, tw));
        }
        acc.add(-self.psi.eval(n as f64)? * dirichlet_closed(n - 1, self.beta, tw));
        Ok(acc.value())
    }

    /// Coefficient truncation: the polynomial Σ_{k=n}^{K−1} ψ(k) cos(kt − βπ/2)
    /// with Σ_{k≥K} ψ(k) certified ≤ tol_abs. Returns the polynomial and K.
    pub fn truncate_to_poly(&self, tol_abs: f64) -> Result<(TrigPoly, usize)> {
        let cut = self.truncation_index(tol_abs)?;
        let theta = self.beta * PI / 2.0;
        let (s, c) = theta.sin_cos();
        let n = self.n as usize;
        let mut cos = vec![0.0; cut.saturating_sub(1)];
        let mut sin = vec![0.0; cut.saturating_sub(1)];
        for k in n..cut {
            let w = self.psi.eval(k as f64)?;
            cos[k - 1] = w * c;
            sin[k - 1] = w * s;
        }
        Ok((TrigPoly::new(0.0, cos, sin)?, cut))
    }
}

/// Pointwise bound data for the β-derivative of the staged difference at
/// order n, given uniform parameters a ≤ η(n) − n, b ≤ μ(n), a > 2:
///
/// * everywhere: |g(t)| ≤ (1 + 1/(2a) + 1/(2b))·(η(n) − n) on [−π, π];
/// * window: |g(t)| ≤ (a/(a−1) + 2a/(a−2))·π²/t² · 1/(η(n) − n) for
///   1/(η(n) − n) ≤ |t| ≤ π.
///
/// `window_worst_ratio` is the sampled maximum of |g(t)|·t²·(η(n) − n)
/// divided by the window constant times π²; both checks pass when the
/// respective measured value stays at or below its bound.
#[derive(Debug, Clone, Copy)]
pub struct DerivativePointwiseCheck {
    pub everywhere_bound: f64,
    pub everywhere_max: f64,
    pub window_worst_ratio: f64,
    pub samples: usize,
}

pub fn derivative_pointwise_bounds(
    spec: &PsiSpec,
    n: u32,
    beta: f64,
    a: f64,
    b: f64,
) -> Result<DerivativePointwiseCheck> {
    if !(a > 2.0) || !(b > 0.0) {
        return Err(Error::Precondition(format!(
            "pointwise derivative bounds need a > 2 and b > 0, got a = {a}, b = {b}"
        )));
    }
    let diff = extremal_difference(spec, n)?;
    let deriv = psi_beta_derivative(&diff, spec, beta)?;
    let gap = spec.characteristics(n as f64)?.eta_minus_t;

    let everywhere_bound = (1.0 + 0.5 / a + 0.5 / b) * gap;
    let everywhere_max = crate::norms::poly_sup_norm(&deriv);

    let window_const = (a / (a - 1.0) + 2.0 * a / (a - 2.0)) * PI * PI / gap;
    let lo = 1.0 / gap;
    let m = 8192usize;
    let mut worst = 0.0f64;
    for side in [-1.0, 1.0] {
        for i in 0..=m {
            let t = side * (lo + (PI - lo) * i as f64 / m as f64);
            let ratio = deriv.eval(t).abs() * t * t / window_const;
            worst = worst.max(ratio);
        }
    }
    Ok(DerivativePointwiseCheck {
        everywhere_bound,
        everywhere_max,
        window_worst_ratio: worst,
        samples: 2 * (m + 1),
    })
}
