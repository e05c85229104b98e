//! Weight sequences and their characteristics.
//!
//! A weight ψ is a positive, decreasing, convex-down function on `[1, ∞)`
//! decaying to zero. Two derived quantities drive everything downstream: the
//! half-value point η(t) = ψ⁻¹(ψ(t)/2) and the ratio μ(t) = t/(η(t) − t).

use std::f64::consts::LN_2;
use std::sync::Arc;

use crate::tol;
use crate::{Error, Kahan, Result};

/// Left end of the weight domain.
pub const DOMAIN_MIN: f64 = 1.0;

/// Functional form of a weight.
#[derive(Clone)]
pub enum PsiKind {
    /// ψ(t) = exp(−α t^r) with α > 0 and r ∈ (0, 1].
    Exponential { alpha: f64, r: f64 },
    /// Arbitrary positive callable on `[1, ∞)`; inverted by bisection.
    Generic(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for PsiKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PsiKind::Exponential { alpha, r } => f
                .debug_struct("Exponential")
                .field("alpha", alpha)
                .field("r", r)
                .finish(),
            PsiKind::Generic(_) => f.write_str("Generic(..)"),
        }
    }
}

/// Weight specification on `[1, ∞)`.
#[derive(Clone, Debug)]
pub struct PsiSpec {
    kind: PsiKind,
}

/// Characteristics of a weight at a point of its domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Characteristics {
    pub t: f64,
    /// Half-value point: ψ(eta) = ψ(t)/2.
    pub eta: f64,
    /// eta − t, the half-value gap.
    pub eta_minus_t: f64,
    /// t / (eta − t).
    pub mu: f64,
}

/// Outcome of sampled classification. Flags are heuristic (finite samples,
/// finite differences), independent of one another, and each failure leaves
/// a human-readable witness.
#[derive(Debug, Clone)]
pub struct ClassReport {
    /// Positive, non-increasing, convex-down, decaying on the sampled grid.
    pub in_m: bool,
    /// μ non-decreasing along the grid with visible growth (≥ 1.5× overall).
    pub mu_increasing: bool,
    /// η(t) − t stays bounded: the second-half maximum does not exceed the
    /// first-half maximum.
    pub gap_bounded_above: bool,
    /// η(t) − t stays away from zero: the second-half minimum does not drop
    /// below half the first-half minimum.
    pub gap_bounded_below: bool,
    pub witnesses: Vec<String>,
}

/// Closed-form admissibility thresholds for ψ(t) = exp(−α t^r), r ∈ (0, 1).
///
/// For every integer n ≥ n_min the weight satisfies η(n) − n ≥ a and
/// μ(n) ≥ b with a > 2 and b > 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpThresholds {
    pub a: f64,
    pub b: f64,
    pub n_min: u64,
}

/// Floor with a fixed fudge: values within [`tol::FLOOR_FUDGE`] below an
/// integer land on it.
pub fn floor_int(x: f64) -> i64 {
    (x + tol::FLOOR_FUDGE).floor() as i64
}

/// Staging indices n ≤ [η(n)] ≤ [η(η(n))] used by the extremal construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StagePoints {
    pub n: i64,
    pub n1: i64,
    pub n2: i64,
}

impl PsiSpec {
    /// Exponential-family weight ψ(t) = exp(−α t^r).
    pub fn exponential(alpha: f64, r: f64) -> Result<Self> {
        if !alpha.is_finite() || !(alpha > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "alpha must be a positive finite number, got {alpha}"
            )));
        }
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "r must lie in (0, 1], got {r}"
            )));
        }
        Ok(Self {
            kind: PsiKind::Exponential { alpha, r },
        })
    }

    /// Weight given by an arbitrary callable. The callable is trusted to be
    /// positive and decreasing; `classify` can probe whether it actually is.
    pub fn generic<F>(f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            kind: PsiKind::Generic(Arc::new(f)),
        }
    }

    pub fn kind(&self) -> &PsiKind {
        &self.kind
    }

    /// ψ(t) for t ≥ 1.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= DOMAIN_MIN) {
            return Err(Error::Domain(format!(
                "weight is defined on t >= 1, got t = {t}"
            )));
        }
        Ok(match &self.kind {
            PsiKind::Exponential { alpha, r } => (-alpha * t.powf(*r)).exp(),
            PsiKind::Generic(f) => f(t),
        })
    }

    /// ψ⁻¹(y) for 0 < y ≤ ψ(1). Closed form for the exponential family,
    /// bracketing bisection otherwise.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        if !(y > 0.0) || !y.is_finite() {
            return Err(Error::Range(format!(
                "inverse needs a positive finite value, got {y}"
            )));
        }
        let top = self.eval(DOMAIN_MIN)?;
        if y > top {
            return Err(Error::Range(format!(
                "inverse needs y <= psi(1) = {top}, got {y}"
            )));
        }
        match &self.kind {
            PsiKind::Exponential { alpha, r } => Ok(((-y.ln()) / alpha).powf(1.0 / r)),
            PsiKind::Generic(_) => self.inverse_bisect(y),
        }
    }

    fn inverse_bisect(&self, y: f64) -> Result<f64> {
        let mut lo = DOMAIN_MIN;
        let mut hi = 2.0;
        let mut guard = 0usize;
        while self.eval(hi)? > y {
            lo = hi;
            hi *= 2.0;
            guard += 1;
            if guard > 200 || !hi.is_finite() {
                return Err(Error::Convergence(format!(
                    "no bracket found for inverse at y = {y}; weight may not decay"
                )));
            }
        }
        // invariant: psi(lo) >= y >= psi(hi)
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let v = self.eval(mid)?;
            if (v - y).abs() <= tol::TOL_ROOT * y {
                return Ok(mid);
            }
            if v > y {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= f64::EPSILON * hi {
                break;
            }
        }
        let mid = 0.5 * (lo + hi);
        if (self.eval(mid)? - y).abs() <= 1e3 * tol::TOL_ROOT * y {
            Ok(mid)
        } else {
            Err(Error::Convergence(format!(
                "inverse bisection stalled at width {} for y = {y}",
                hi - lo
            )))
        }
    }

    /// η(t), μ(t) and the gap η(t) − t.
    pub fn characteristics(&self, t: f64) -> Result<Characteristics> {
        let v = self.eval(t)?;
        if !(v > 0.0) {
            return Err(Error::Domain(format!(
                "characteristics need psi(t) > 0, got psi({t}) = {v}"
            )));
        }
        let eta = self.inverse(0.5 * v)?;
        let gap = eta - t;
        if !(gap > 0.0) {
            return Err(Error::Domain(format!(
                "half-value gap at t = {t} is {gap}; weight must strictly decrease"
            )));
        }
        Ok(Characteristics {
            t,
            eta,
            eta_minus_t: gap,
            mu: t / gap,
        })
    }

    /// Sampled classification over a strictly increasing grid (≥ 8 points,
    /// all ≥ 1). See [`ClassReport`] for the meaning of each flag.
    pub fn classify(&self, grid: &[f64]) -> Result<ClassReport> {
        if grid.len() < 8 {
            return Err(Error::InvalidArgument(format!(
                "classification grid needs at least 8 points, got {}",
                grid.len()
            )));
        }
        if grid[0] < DOMAIN_MIN {
            return Err(Error::Domain(format!(
                "classification grid must start at t >= 1, got {}",
                grid[0]
            )));
        }
        for w in grid.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidArgument(
                    "classification grid must be strictly increasing".into(),
                ));
            }
        }

        let mut witnesses = Vec::new();
        let vals: Vec<f64> = grid
            .iter()
            .map(|&t| self.eval(t))
            .collect::<Result<Vec<_>>>()?;

        let mut in_m = true;
        for (&t, &v) in grid.iter().zip(&vals) {
            if !(v > 0.0) || !v.is_finite() {
                in_m = false;
                witnesses.push(format!("psi({t}) = {v} is not positive"));
                break;
            }
        }
        if in_m {
            for i in 0..grid.len() - 1 {
                if vals[i + 1] > vals[i] * (1.0 + 1e-12) {
                    in_m = false;
                    witnesses.push(format!(
                        "psi increases from {} at t = {} to {} at t = {}",
                        vals[i],
                        grid[i],
                        vals[i + 1],
                        grid[i + 1]
                    ));
                    break;
                }
            }
        }
        if in_m {
            for i in 0..grid.len() - 1 {
                let t = grid[i];
                let h = grid[i + 1] - grid[i];
                let second = self.eval(t)? - 2.0 * self.eval(t + h)? + self.eval(t + 2.0 * h)?;
                if second < -tol::TOL_CONVEX_REL * vals[i] {
                    in_m = false;
                    witnesses.push(format!(
                        "second difference {second} at t = {t} (step {h}) breaks convexity"
                    ));
                    break;
                }
            }
        }
        if in_m {
            let base = self.eval(DOMAIN_MIN)?;
            let last = *vals.last().unwrap();
            if !(last < tol::TOL_DECAY * base) {
                in_m = false;
                witnesses.push(format!(
                    "decay not visible: psi({}) = {last} vs psi(1) = {base}",
                    grid.last().unwrap()
                ));
            }
        }

        let mut chars = Vec::with_capacity(grid.len());
        let mut char_fail = None;
        for &t in grid {
            match self.characteristics(t) {
                Ok(c) => chars.push(c),
                Err(e) => {
                    char_fail = Some(format!("characteristics failed at t = {t}: {e}"));
                    break;
                }
            }
        }

        let (mu_increasing, gap_bounded_above, gap_bounded_below) = match char_fail {
            Some(msg) => {
                witnesses.push(msg);
                (false, false, false)
            }
            None => {
                let mus: Vec<f64> = chars.iter().map(|c| c.mu).collect();
                let gaps: Vec<f64> = chars.iter().map(|c| c.eta_minus_t).collect();

                let mut inc = true;
                for i in 0..mus.len() - 1 {
                    if mus[i + 1] < mus[i] * (1.0 - tol::SLACK) {
                        inc = false;
                        witnesses.push(format!(
                            "mu decreases from {} at t = {} to {} at t = {}",
                            mus[i],
                            grid[i],
                            mus[i + 1],
                            grid[i + 1]
                        ));
                        break;
                    }
                }
                let growth = *mus.last().unwrap() >= 1.5 * mus[0];
                if inc && !growth {
                    witnesses.push(format!(
                        "mu growth not visible: mu = {} at t = {} vs {} at t = {}",
                        mus[0],
                        grid[0],
                        mus.last().unwrap(),
                        grid.last().unwrap()
                    ));
                }

                let mid = gaps.len() / 2;
                let max1 = gaps[..mid].iter().cloned().fold(f64::MIN, f64::max);
                let max2 = gaps[mid..].iter().cloned().fold(f64::MIN, f64::max);
                let above = max2 <= max1 * (1.0 + 1e-6);
                if !above {
                    witnesses.push(format!(
                        "half-value gap keeps growing: max {max1} over the first half, {max2} over the second"
                    ));
                }

                let min1 = gaps[..mid].iter().cloned().fold(f64::MAX, f64::min);
                let min2 = gaps[mid..].iter().cloned().fold(f64::MAX, f64::min);
                let below = min2 > 0.0 && min2 >= 0.5 * min1;
                if !below {
                    witnesses.push(format!(
                        "half-value gap trends to zero: min {min1} over the first half, {min2} over the second"
                    ));
                }

                (inc && growth, above, below)
            }
        };

        Ok(ClassReport {
            in_m,
            mu_increasing,
            gap_bounded_above,
            gap_bounded_below,
            witnesses,
        })
    }

    /// ∫_m^∞ ψ(t) dt by adaptive quadrature over doubling segments. The
    /// truncation point is certified by the half-value tail bound
    /// 2/(1 − 2/μ(T))·ψ(T)(η(T) − T), so no quadrature happens past it.
    pub fn tail_integral(&self, m: f64) -> Result<f64> {
        let v0 = self.eval(m)?;
        if v0 == 0.0 {
            return Ok(0.0);
        }
        let f = |t: f64| self.eval(t).unwrap_or(f64::NAN);
        let mut total = Kahan::default();
        let mut left = m;
        let mut width = m.max(1.0);
        for _ in 0..120 {
            let right = left + width;
            let scale = if total.value() > 0.0 {
                total.value()
            } else {
                (v0 * width).max(f64::MIN_POSITIVE)
            };
            let seg = adaptive_simpson(&f, left, right, 0.125 * tol::TOL_QUAD * scale);
            if !seg.is_finite() {
                return Err(Error::Domain(format!(
                    "weight produced a non-finite value on [{left}, {right}]"
                )));
            }
            total.add(seg);

            let tail_v = self.eval(right)?;
            if tail_v == 0.0 {
                return Ok(total.value());
            }
            if let Ok(ch) = self.characteristics(right) {
                if ch.mu > 2.0 {
                    let remainder = 2.0 / (1.0 - 2.0 / ch.mu) * tail_v * ch.eta_minus_t;
                    if remainder <= 0.25 * tol::TOL_QUAD * total.value() {
                        return Ok(total.value());
                    }
                }
            }
            left = right;
            width *= 2.0;
        }
        Err(Error::Convergence(format!(
            "tail integral from {m}: no certified truncation point below t = {left}"
        )))
    }
}

/// Adaptive Simpson quadrature with absolute tolerance.
fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol_abs: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol_abs.max(1e-308), 48)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol_abs: f64,
    depth: usize,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = f(0.5 * (a + m));
    let rm = f(0.5 * (m + b));
    let left = (m - a) / 6.0 * (fa + 4.0 * lm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * rm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol_abs {
        left + right + delta / 15.0
    } else {
        simpson_step(f, a, m, fa, lm, fm, left, 0.5 * tol_abs, depth - 1)
            + simpson_step(f, m, b, fm, rm, fb, right, 0.5 * tol_abs, depth - 1)
    }
}

/// Closed-form thresholds for ψ(t) = exp(−α t^r) with r ∈ (0, 1): uniform
/// lower bounds a ≤ η(n) − n and b ≤ μ(n) valid for every n ≥ n_min.
/// Evaluated in log space so r → 1⁻ stays finite; n_min saturates at
/// `u64::MAX` when the crossover exceeds the representable range.
pub fn exp_family_thresholds(alpha: f64, r: f64) -> Result<ExpThresholds> {
    if !alpha.is_finite() || !(alpha > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "alpha must be a positive finite number, got {alpha}"
        )));
    }
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "thresholds are defined for r in (0, 1), got {r}"
        )));
    }
    let c = LN_2 / alpha;
    // a = (c/r)·(1 + X)^(1−r) with X = (2r/c)^(1/(1−r))
    let ln_x = (2.0 * r / c).ln() / (1.0 - r);
    let ln_one_plus_x = if ln_x > 700.0 {
        ln_x
    } else {
        ln_x.exp().ln_1p()
    };
    let a = c / r * ((1.0 - r) * ln_one_plus_x).exp();
    // b = 1/((c·(1 + 2Y)^(−r) + 1)^(1/r) − 1) with Y = (c/(3^r − 2^r))^(1/r)
    let y = (c / (3f64.powf(r) - 2f64.powf(r))).powf(1.0 / r);
    let b = 1.0 / ((c * (1.0 + 2.0 * y).powf(-r) + 1.0).powf(1.0 / r) - 1.0);
    let x = if ln_x > 700.0 {
        f64::INFINITY
    } else {
        ln_x.exp()
    };
    let crossover = 1.0 + x.max(2.0 * y);
    let n_min = if crossover >= u64::MAX as f64 {
        u64::MAX
    } else {
        (crossover - tol::FLOOR_FUDGE).ceil() as u64
    };
    Ok(ExpThresholds { a, b, n_min })
}

/// Staging indices for the extremal construction at integer order n.
pub fn stage_points(spec: &PsiSpec, n: u32) -> Result<StagePoints> {
    if n < 1 {
        return Err(Error::InvalidArgument("order n must be >= 1".into()));
    }
    let c1 = spec.characteristics(n as f64)?;
    let c2 = spec.characteristics(c1.eta)?;
    Ok(StagePoints {
        n: n as i64,
        n1: floor_int(c1.eta),
        n2: floor_int(c2.eta),
    })
}

/// Both sides of the tail-integral bound
/// ∫_m^∞ ψ ≤ 2/(1 − 2/μ(m)) · ψ(m)(η(m) − m), stated for μ(m) > 2.
pub fn tail_bound_sides(spec: &PsiSpec, m: f64) -> Result<(f64, f64)> {
    let ch = spec.characteristics(m)?;
    if !(ch.mu > 2.0) {
        return Err(Error::Precondition(format!(
            "mu({m}) = {} <= 2, hypothesis violated",
            ch.mu
        )));
    }
    let lhs = spec.tail_integral(m)?;
    let rhs = 2.0 / (1.0 - 2.0 / ch.mu) * spec.eval(m)? * ch.eta_minus_t;
    Ok((lhs, rhs))
}

/// Two-sided floor-gap data at order n, given uniform parameters
/// a ≤ η(n) − n and b ≤ μ(n) with a > 2:
///
/// (1 − 1/a)(η(n) − n) < [η(n)] − n ≤ η(n) − n
/// (1/2 − 1/a)(η(n) − n) < [η(η(n))] − [η(n)] < (1 + 1/a + 1/b)(η(n) − n)
#[derive(Debug, Clone, Copy)]
pub struct FloorGapBounds {
    pub stage: StagePoints,
    pub first_gap: f64,
    pub first_lower: f64,
    pub first_upper: f64,
    pub second_gap: f64,
    pub second_lower: f64,
    pub second_upper: f64,
}

pub fn floor_gap_bounds(spec: &PsiSpec, n: u32, a: f64, b: f64) -> Result<FloorGapBounds> {
    if !(a > 2.0) {
        return Err(Error::Precondition(format!(
            "floor-gap bounds need a > 2, got a = {a}"
        )));
    }
    if !(b > 0.0) {
        return Err(Error::Precondition(format!(
            "floor-gap bounds need b > 0, got b = {b}"
        )));
    }
    let stage = stage_points(spec, n)?;
    let gap = spec.characteristics(n as f64)?.eta_minus_t;
    Ok(FloorGapBounds {
        stage,
        first_gap: (stage.n1 - stage.n) as f64,
        first_lower: (1.0 - 1.0 / a) * gap,
        first_upper: gap,
        second_gap: (stage.n2 - stage.n1) as f64,
        second_lower: (0.5 - 1.0 / a) * gap,
        second_upper: (1.0 + 1.0 / a + 1.0 / b) * gap,
    })
}

/// Successive half-value gaps at a real point t ≥ 1 with μ(t) ≥ b:
/// (1/2)(η(t) − t) ≤ η(η(t)) − η(t) < (1 + 1/b)(η(t) − t).
/// Returns (lower, value, upper).
pub fn successive_gap_sides(spec: &PsiSpec, t: f64, b: f64) -> Result<(f64, f64, f64)> {
    if !(b > 0.0) {
        return Err(Error::Precondition(format!(
            "successive-gap bound needs b > 0, got b = {b}"
        )));
    }
    let c1 = spec.characteristics(t)?;
    let c2 = spec.characteristics(c1.eta)?;
    Ok((
        0.5 * c1.eta_minus_t,
        c2.eta_minus_t,
        (1.0 + 1.0 / b) * c1.eta_minus_t,
    ))
}

/// Serialize a weight spec to a single-line record. Only the exponential
/// family round-trips; generic callables record their form only.
pub fn spec_to_record(spec: &PsiSpec) -> String {
    match spec.kind() {
        PsiKind::Exponential { alpha, r } => {
            format!("kind=exponential alpha={alpha:.16e} r={r:.16e}")
        }
        PsiKind::Generic(_) => "kind=generic".to_string(),
    }
}

/// Parse a record produced by [`spec_to_record`].
pub fn spec_from_record(s: &str) -> Result<PsiSpec> {
    let mut kind = None;
    let mut alpha = None;
    let mut r = None;
    for tok in s.split_whitespace() {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| Error::InvalidArgument(format!("bad record token {tok:?}")))?;
        match k {
            "kind" => kind = Some(v.to_string()),
            "alpha" => {
                alpha = Some(
                    v.parse::<f64>()
                        .map_err(|e| Error::InvalidArgument(format!("bad alpha {v:?}: {e}")))?,
                )
            }
            "r" => {
                r = Some(
                    v.parse::<f64>()
                        .map_err(|e| Error::InvalidArgument(format!("bad r {v:?}: {e}")))?,
                )
            }
            _ => return Err(Error::InvalidArgument(format!("unknown record key {k:?}"))),
        }
    }
    match kind.as_deref() {
        Some("exponential") => {
            let (alpha, r) = (
                alpha.ok_or_else(|| Error::InvalidArgument("record missing alpha".into()))?,
                r.ok_or_else(|| Error::InvalidArgument("record missing r".into()))?,
            );
            PsiSpec::exponential(alpha, r)
        }
        Some(other) => Err(Error::InvalidArgument(format!(
            "cannot reconstruct weight of kind {other:?}"
        ))),
        None => Err(Error::InvalidArgument("record missing kind".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn half_sqrt() -> PsiSpec {
        PsiSpec::exponential(LN_2, 0.5).unwrap()
    }

    #[test]
    fn eval_matches_closed_form() {
        let s = half_sqrt();
        assert!((s.eval(25.0).unwrap() - 2f64.powi(-5)).abs() < 1e-16);
        assert!((s.eval(26.0).unwrap() - 0.029177103632504919).abs() < 1e-15);
        assert!(s.eval(0.5).is_err());
        assert!(s.eval(f64::NAN).is_err());
    }

    #[test]
    fn constructor_rejects_bad_parameters() {
        assert!(PsiSpec::exponential(0.0, 0.5).is_err());
        assert!(PsiSpec::exponential(-1.0, 0.5).is_err());
        assert!(PsiSpec::exponential(1.0, 0.0).is_err());
        assert!(PsiSpec::exponential(1.0, 1.5).is_err());
        assert!(PsiSpec::exponential(f64::INFINITY, 0.5).is_err());
        assert!(PsiSpec::exponential(1.0, 1.0).is_ok());
    }

    #[test]
    fn inverse_closed_form_and_bisection_agree() {
        let s = half_sqrt();
        let g = PsiSpec::generic(|t: f64| (-LN_2 * t.sqrt()).exp());
        for &t in &[1.0, 4.0, 25.0, 144.0, 2000.0] {
            let y = s.eval(t).unwrap();
            let closed = s.inverse(y).unwrap();
            let bisected = g.inverse(y).unwrap();
            assert!((closed - t).abs() <= 1e-9 * t, "closed {closed} vs {t}");
            assert!(
                (bisected - t).abs() <= 1e-6 * t,
                "bisected {bisected} vs {t}"
            );
        }
        assert!(s.inverse(0.0).is_err());
        assert!(s.inverse(1.0).is_err()); // above psi(1) = 1/2
        assert!(s.inverse(s.eval(1.0).unwrap()).is_ok());
    }

    #[test]
    fn characteristics_match_halving_relation() {
        let s = half_sqrt();
        // eta(n) solves sqrt(eta) = sqrt(n) + 1, so eta(25) = 36, mu(25) = 25/11
        let c = s.characteristics(25.0).unwrap();
        assert!((c.eta - 36.0).abs() < 1e-10);
        assert!((c.eta_minus_t - 11.0).abs() < 1e-10);
        assert!((c.mu - 2.2727272727272729).abs() < 1e-12);
        let c21 = s.characteristics(21.0).unwrap();
        assert!((c21.eta - 31.165151389911678).abs() < 1e-9);
        assert!((c21.mu - 2.0658816769656063).abs() < 1e-10);
        let c4 = s.characteristics(4.0).unwrap();
        assert!((c4.mu - 0.8).abs() < 1e-12);
    }

    #[test]
    fn characteristics_reject_flat_weights() {
        let flat = PsiSpec::generic(|_| 0.25);
        assert!(flat.characteristics(4.0).is_err());
        let zero = PsiSpec::generic(|_| 0.0);
        assert!(zero.characteristics(4.0).is_err());
    }

    #[test]
    fn stage_points_land_on_expected_integers() {
        let s = half_sqrt();
        let st = stage_points(&s, 25).unwrap();
        assert_eq!((st.n, st.n1, st.n2), (25, 36, 49));
        let st49 = stage_points(&s, 49).unwrap();
        assert_eq!((st49.n1, st49.n2), (64, 81));
    }

    #[test]
    fn floor_fudge_snaps_near_integers() {
        assert_eq!(floor_int(36.0 - 1e-12), 36);
        assert_eq!(floor_int(36.0 + 1e-12), 36);
        assert_eq!(floor_int(35.5), 35);
        assert_eq!(floor_int(36.0 - 1e-6), 35);
    }

    #[test]
    fn classify_accepts_the_exponential_family() {
        let s = half_sqrt();
        let grid: Vec<f64> = (0..64)
            .map(|i| 4.0 * (1e4f64 / 4.0).powf(i as f64 / 63.0))
            .collect();
        let rep = s.classify(&grid).unwrap();
        assert!(rep.in_m, "witnesses: {:?}", rep.witnesses);
        assert!(rep.mu_increasing, "witnesses: {:?}", rep.witnesses);
        assert!(!rep.gap_bounded_above);
        assert!(rep.gap_bounded_below);
    }

    #[test]
    fn classify_flags_constant_and_slow_weights() {
        let grid: Vec<f64> = (0..64)
            .map(|i| 4.0 * (1e4f64 / 4.0).powf(i as f64 / 63.0))
            .collect();

        let flat = PsiSpec::generic(|_| 0.25);
        let rep = flat.classify(&grid).unwrap();
        assert!(!rep.in_m);
        assert!(!rep.mu_increasing);
        assert!(!rep.witnesses.is_empty());

        // 1/t: mu is identically 1, so growth must be rejected with a witness
        let slow = PsiSpec::generic(|t: f64| 1.0 / t);
        let rep = slow.classify(&grid).unwrap();
        assert!(!rep.mu_increasing);
        assert!(rep
            .witnesses
            .iter()
            .any(|w| w.contains("mu growth not visible")));
        // but its half-value gap grows without bound
        assert!(!rep.gap_bounded_above);
    }

    #[test]
    fn classify_validates_the_grid() {
        let s = half_sqrt();
        assert!(s.classify(&[1.0, 2.0, 3.0]).is_err());
        let bad = [1.0, 2.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0];
        assert!(s.classify(&bad).is_err());
        let below = [0.5, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0];
        assert!(s.classify(&below).is_err());
    }

    #[test]
    fn tail_integral_matches_antiderivative() {
        // for psi = exp(-c sqrt(t)): integral = 2 e^{-c sqrt(m)} (sqrt(m)/c + 1/c^2)
        let s = half_sqrt();
        let c = LN_2;
        for &m in &[21.0f64, 25.0, 100.0] {
            let exact = 2.0 * (-c * m.sqrt()).exp() * (m.sqrt() / c + 1.0 / (c * c));
            let got = s.tail_integral(m).unwrap();
            assert!(
                (got - exact).abs() <= 1e-9 * exact,
                "m = {m}: got {got}, exact {exact}"
            );
        }
        assert!((s.tail_integral(25.0).unwrap() - 0.58092776159065163).abs() < 1e-9 * 0.58);
    }

    #[test]
    fn tail_integral_of_vanished_weight_is_zero() {
        let s = PsiSpec::generic(|t: f64| if t < 10.0 { 1.0 / t - 0.1 } else { 0.0 });
        assert_eq!(s.tail_integral(20.0).unwrap(), 0.0);
    }

    #[test]
    fn thresholds_match_closed_form_at_half() {
        let th = exp_family_thresholds(LN_2, 0.5).unwrap();
        assert!((th.a - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        assert!((th.b - 2.0549401903643987).abs() < 1e-12);
        assert_eq!(th.n_min, 21);
    }

    #[test]
    fn thresholds_stay_finite_near_r_one() {
        let a_limit = 2.0 * LN_2 / LN_2; // c/r·2r at alpha = ln2, r -> 1
        let th = exp_family_thresholds(LN_2, 1.0 - 1e-9).unwrap();
        assert!((th.a - a_limit).abs() < 1e-6, "a = {}", th.a);
        assert!(th.b.is_finite() && th.b > 0.0);
        assert_eq!(th.n_min, u64::MAX);
        assert!(exp_family_thresholds(LN_2, 1.0).is_err());
        assert!(exp_family_thresholds(0.0, 0.5).is_err());
    }

    #[test]
    fn tail_bound_demands_mu_above_two() {
        let s = half_sqrt();
        let err = tail_bound_sides(&s, 4.0).unwrap_err();
        assert!(err.to_string().contains("hypothesis violated"));
        let (lhs, rhs) = tail_bound_sides(&s, 25.0).unwrap();
        assert!(lhs <= rhs);
        assert!((rhs - 5.7291666666666625).abs() < 1e-10);
    }

    #[test]
    fn record_round_trip() {
        let s = half_sqrt();
        let rec = spec_to_record(&s);
        let back = spec_from_record(&rec).unwrap();
        for &t in &[1.0, 7.0, 123.0] {
            assert_eq!(s.eval(t).unwrap(), back.eval(t).unwrap());
        }
        assert!(spec_from_record("kind=generic").is_err());
        assert!(spec_from_record("alpha=1.0").is_err());
    }
}
