//! Best-approximation solvers on the trigonometric system.
//!
//! * [`best_uniform`]: sup-norm minimization by discrete Chebyshev exchange
//!   on doubling grids with off-grid reference polish. Even targets reduce to
//!   a cosine-basis problem on [0, π] (a Haar system, multiple-exchange);
//!   general targets run a dual simplex over the full period.
//! * [`best_ls`]: exact Fourier projection for s = 2, smoothed descent with
//!   Barzilai–Borwein steps and Armijo backtracking for other s ∈ (1, ∞).
//! * [`fourier_error`]: L_p distance to the Fourier partial sum.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::norms::{self, grid_point};
use crate::tol;
use crate::trig_poly::{fourier_partial_sum, TrigPoly};
use crate::{Error, Kahan, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Exchange on a discrete grid plus continuous reference polish.
    DiscreteMinimax,
    /// Exact orthogonal projection (s = 2 or target already representable).
    Projection,
    /// Smoothed gradient descent on a fixed quadrature grid.
    SmoothDescent,
}

#[derive(Debug, Clone)]
pub struct Diagnostics {
    /// Size of the finest grid used, counted over a full period.
    pub grid_size: usize,
    /// Exchange or descent iterations, summed over grid levels.
    pub iterations: usize,
    /// Solver-specific optimality defect: relative equioscillation gap for
    /// the minimax path, relative gradient norm for descent, 0 for
    /// projections.
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct ApproxResult {
    pub error: f64,
    pub best_poly: TrigPoly,
    pub method: Method,
    pub diagnostics: Diagnostics,
}

/// Approximation basis: harmonics 0..=order, either cosine-only (for even
/// targets, on the half period) or the full trigonometric system.
#[derive(Debug, Clone, Copy)]
enum Basis {
    Even { order: usize },
    Full { order: usize },
}

impl Basis {
    fn len(self) -> usize {
        match self {
            Basis::Even { order } => order + 1,
            Basis::Full { order } => 2 * order + 1,
        }
    }

    fn fill_row(self, t: f64, out: &mut [f64]) {
        let (st, ct) = t.sin_cos();
        let mut ck = 1.0f64;
        let mut sk = 0.0f64;
        match self {
            Basis::Even { order } => {
                out[0] = 1.0;
                for k in 1..=order {
                    if k % 64 == 1 {
                        let (s, c) = ((k as f64) * t).sin_cos();
                        ck = c;
                        sk = s;
                    } else {
                        let c = ck * ct - sk * st;
                        let s = sk * ct + ck * st;
                        ck = c;
                        sk = s;
                    }
                    out[k] = ck;
                }
            }
            Basis::Full { order } => {
                out[0] = 1.0;
                for k in 1..=order {
                    if k % 64 == 1 {
                        let (s, c) = ((k as f64) * t).sin_cos();
                        ck = c;
                        sk = s;
                    } else {
                        let c = ck * ct - sk * st;
                        let s = sk * ct + ck * st;
                        ck = c;
                        sk = s;
                    }
                    out[2 * k - 1] = ck;
                    out[2 * k] = sk;
                }
            }
        }
    }

    fn to_poly(self, c: &[f64]) -> TrigPoly {
        match self {
            Basis::Even { order } => {
                let cos = c[1..=order].to_vec();
                TrigPoly::canonical(c[0], cos, vec![0.0; order])
            }
            Basis::Full { order } => {
                let mut cos = vec![0.0; order];
                let mut sin = vec![0.0; order];
                for k in 1..=order {
                    cos[k - 1] = c[2 * k - 1];
                    sin[k - 1] = c[2 * k];
                }
                TrigPoly::canonical(c[0], cos, sin)
            }
        }
    }

    fn from_poly(self, p: &TrigPoly) -> Vec<f64> {
        let mut c = vec![0.0; self.len()];
        c[0] = p.a0_half();
        match self {
            Basis::Even { order } => {
                for k in 1..=order {
                    c[k] = p.coeff(k).0;
                }
            }
            Basis::Full { order } => {
                for k in 1..=order {
                    let (a, b) = p.coeff(k);
                    c[2 * k - 1] = a;
                    c[2 * k] = b;
                }
            }
        }
        c
    }
}

/// Solve the levelled interpolation system
/// p(t_i) + σ_i·e = f(t_i), i = 0..=len(basis),
/// returning the basis coefficients and the level e.
fn levelled_solve(fv: &[f64], ts: &[f64], sigma: &[f64], basis: Basis) -> Result<(Vec<f64>, f64)> {
    let nb = basis.len();
    let nr = ts.len();
    debug_assert_eq!(nr, nb + 1);
    let mut a = DMatrix::<f64>::zeros(nr, nr);
    let mut row = vec![0.0; nb];
    for i in 0..nr {
        basis.fill_row(ts[i], &mut row);
        for (b, &v) in row.iter().enumerate() {
            a[(i, b)] = v;
        }
        a[(i, nb)] = sigma[i];
    }
    let rhs = DVector::from_column_slice(fv);
    let sol = a
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Convergence("levelled reference system is singular".into()))?;
    Ok((sol.as_slice()[..nb].to_vec(), sol[nb]))
}

/// Move t towards a local maximum of g near t0 by shrinking parabolic steps,
/// staying within [t0 − h0, t0 + h0].
fn refine_extremum(g: &dyn Fn(f64) -> f64, t0: f64, h0: f64) -> f64 {
    let mut t = t0;
    let mut h = 0.5 * h0;
    let mut best_t = t0;
    let mut best_v = g(t0);
    for _ in 0..40 {
        let y0 = g(t - h);
        let y1 = g(t);
        let y2 = g(t + h);
        for (tt, vv) in [(t - h, y0), (t, y1), (t + h, y2)] {
            if vv > best_v {
                best_v = vv;
                best_t = tt;
            }
        }
        let denom = y0 - 2.0 * y1 + y2;
        if denom < 0.0 {
            let step = ((y0 - y2) / (2.0 * denom)).clamp(-1.0, 1.0);
            t = (t + step * h).clamp(t0 - h0, t0 + h0);
        }
        h *= 0.6;
        if h < 1e-13 {
            break;
        }
    }
    best_t
}

/// Continuous refinement of a reference set: alternately re-solve the
/// levelled system and move each reference to the nearby extremum of
/// σ_i·(f − p). References keep their ordering; endpoint references can be
/// pinned (half-period problems own t = 0 and t = π as genuine endpoints).
fn polish_reference(
    f: &TrigPoly,
    basis: Basis,
    ts: &mut Vec<f64>,
    sigma: &[f64],
    h0: f64,
    pin_ends: bool,
) -> Result<(Vec<f64>, f64)> {
    let mut current: Option<(Vec<f64>, f64)> = None;
    for _ in 0..40 {
        let fv: Vec<f64> = ts.iter().map(|&t| f.eval(t)).collect();
        let (coeffs, level) = levelled_solve(&fv, ts, sigma, basis)?;
        let level_abs = level.abs();
        if let Some((_, prev)) = &current {
            if (level_abs - prev).abs() <= 1e-14 * level_abs.max(1e-300) {
                current = Some((coeffs, level_abs));
                break;
            }
            if level_abs < 0.5 * prev {
                // reference degenerated; keep the previous solution
                break;
            }
        }
        let p = basis.to_poly(&coeffs);
        let sgn = if level >= 0.0 { 1.0 } else { -1.0 };
        let old = ts.clone();
        for i in 0..ts.len() {
            if pin_ends && (i == 0 || i == ts.len() - 1) {
                continue;
            }
            let s = sigma[i] * sgn;
            let g = |t: f64| s * (f.eval(t) - p.eval(t));
            ts[i] = refine_extremum(&g, ts[i], h0);
        }
        let ordered = ts.windows(2).all(|w| w[1] > w[0] + 1e-13);
        if !ordered {
            *ts = old;
            current = Some((coeffs, level_abs));
            break;
        }
        current = Some((coeffs, level_abs));
    }
    current.ok_or_else(|| Error::Convergence("reference polish produced no solution".into()))
}

/// Pick an alternating set of exactly `want` residual extrema (returns None
/// when the residual does not alternate often enough, which signals grid
/// optimality). Runs of equal sign keep their largest entry; trimming drops
/// the weakest adjacent pair, so the global extremum always survives.
fn select_alternating(res: &[f64], want: usize) -> Option<Vec<usize>> {
    let last = res.len() - 1;
    let mut alt: Vec<usize> = Vec::new();
    for j in 0..=last {
        let is_ext = if j == 0 || j == last {
            true
        } else {
            (res[j] >= res[j - 1] && res[j] >= res[j + 1])
                || (res[j] <= res[j - 1] && res[j] <= res[j + 1])
        };
        if !is_ext || res[j] == 0.0 {
            continue;
        }
        match alt.last() {
            Some(&prev) if (res[prev] > 0.0) == (res[j] > 0.0) => {
                if res[j].abs() > res[prev].abs() {
                    *alt.last_mut().unwrap() = j;
                }
            }
            _ => alt.push(j),
        }
    }
    if alt.len() < want {
        return None;
    }
    while alt.len() > want {
        if alt.len() - want == 1 {
            let (first, last) = (alt[0], *alt.last().unwrap());
            if res[first].abs() <= res[last].abs() {
                alt.remove(0);
            } else {
                alt.pop();
            }
        } else {
            let mut at = 0;
            let mut weakest = f64::INFINITY;
            for i in 0..alt.len() - 1 {
                let strength = res[alt[i]].abs().max(res[alt[i + 1]].abs());
                if strength < weakest {
                    weakest = strength;
                    at = i;
                }
            }
            alt.drain(at..at + 2);
        }
    }
    Some(alt)
}

struct LevelSolution {
    ref_ts: Vec<f64>,
    sigma: Vec<f64>,
    iterations: usize,
}

/// Multiple-exchange solve of the discrete problem on the half-period grid
/// t_i = iπ/m, i = 0..=m (cosine basis is a Haar system there).
fn even_exchange(
    f: &TrigPoly,
    order: usize,
    m: usize,
    warm: Option<&[f64]>,
) -> Result<LevelSolution> {
    let basis = Basis::Even { order };
    let nb = basis.len();
    let nref = nb + 1;
    let ts: Vec<f64> = (0..=m).map(|i| PI * i as f64 / m as f64).collect();
    let fv: Vec<f64> = ts.iter().map(|&t| f.eval(t)).collect();

    let mut refs: Vec<usize> = match warm {
        Some(w) if w.len() == nref => {
            let mut idx: Vec<usize> = w
                .iter()
                .map(|&t| ((t / PI * m as f64).round() as isize).clamp(0, m as isize) as usize)
                .collect();
            for i in 1..idx.len() {
                if idx[i] <= idx[i - 1] {
                    idx[i] = idx[i - 1] + 1;
                }
            }
            if *idx.last().unwrap() > m {
                (0..nref).map(|k| (k * m) / (nref - 1)).collect()
            } else {
                idx
            }
        }
        _ => (0..nref).map(|k| (k * m) / (nref - 1)).collect(),
    };
    let sigma_template: Vec<f64> = (0..nref)
        .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 })
        .collect();

    let mut best: Option<(f64, Vec<usize>, f64)> = None; // level, refs, sign
    let mut iterations = 0;
    for _ in 0..200 {
        iterations += 1;
        let rts: Vec<f64> = refs.iter().map(|&j| ts[j]).collect();
        let rfv: Vec<f64> = refs.iter().map(|&j| fv[j]).collect();
        let (coeffs, level) = levelled_solve(&rfv, &rts, &sigma_template, basis)?;
        let sgn = if level >= 0.0 { 1.0 } else { -1.0 };
        let level_abs = level.abs();
        if best.as_ref().map_or(true, |(l, ..)| level_abs > *l) {
            best = Some((level_abs, refs.clone(), sgn));
        }

        let p = basis.to_poly(&coeffs);
        let res: Vec<f64> = (0..=m).map(|j| fv[j] - p.eval(ts[j])).collect();
        let rmax = res.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()));
        if rmax <= level_abs * (1.0 + 1e-12) + 1e-300 {
            break;
        }
        match select_alternating(&res, nref) {
            Some(new_refs) if new_refs != refs => refs = new_refs,
            _ => break,
        }
    }

    let (_, refs, sgn) = best.expect("exchange ran at least once");
    Ok(LevelSolution {
        ref_ts: refs.iter().map(|&j| ts[j]).collect(),
        sigma: sigma_template.iter().map(|s| s * sgn).collect(),
        iterations,
    })
}

fn finalize_minimax(
    f: &TrigPoly,
    basis: Basis,
    coeffs: &[f64],
    level: f64,
    grid_size: usize,
    iterations: usize,
) -> ApproxResult {
    let p = basis.to_poly(coeffs);
    let residual_poly = f.sub(&p);
    let error = norms::poly_sup_norm(&residual_poly).max(level);
    let defect = if error > 0.0 {
        ((error - level) / error).max(0.0)
    } else {
        0.0
    };
    ApproxResult {
        error,
        best_poly: p,
        method: Method::DiscreteMinimax,
        diagnostics: Diagnostics {
            grid_size,
            iterations,
            residual: defect,
        },
    }
}

fn best_uniform_even(f: &TrigPoly, order: usize) -> Result<ApproxResult> {
    let basis = Basis::Even { order };
    let dmax = f.degree().max(order + 1);
    let mut m = (norms::resolving_grid(dmax) / 2).max(128);
    let mut warm: Option<Vec<f64>> = None;
    let mut prev: Option<(f64, ApproxResult)> = None;
    let mut total_iterations = 0;
    loop {
        if 2 * m > tol::MINIMAX_GRID_CAP {
            return Err(Error::Convergence(format!(
                "minimax grid exceeded {} points before levels agreed",
                tol::MINIMAX_GRID_CAP
            )));
        }
        let sol = even_exchange(f, order, m, warm.as_deref())?;
        total_iterations += sol.iterations;
        let mut ts = sol.ref_ts;
        let (coeffs, level) = polish_reference(f, basis, &mut ts, &sol.sigma, PI / m as f64, true)?;
        let result = finalize_minimax(f, basis, &coeffs, level, 2 * m, total_iterations);
        if let Some((prev_err, _)) = &prev {
            if (result.error - prev_err).abs()
                <= tol::TOL_MINIMAX * result.error.max(f64::MIN_POSITIVE)
            {
                return Ok(result);
            }
        }
        warm = Some(ts);
        prev = Some((result.error, result));
        m *= 2;
    }
}

/// One dual-simplex solve of the discrete sup-norm problem over the full
/// period on m grid points (m a multiple of the reference size). Returns the
/// reference (indices, signs), coefficients, level, and pivot count.
#[allow(clippy::type_complexity)]
fn circle_simplex(
    f: &TrigPoly,
    order: usize,
    m: usize,
    warm: Option<(&[usize], &[f64])>,
) -> Result<(Vec<usize>, Vec<f64>, Vec<f64>, f64, usize)> {
    let basis = Basis::Full { order };
    let nb = basis.len();
    let nref = nb + 1;
    debug_assert_eq!(m % nref, 0);

    let ts: Vec<f64> = (0..m).map(|j| grid_point(m, j)).collect();
    let fv: Vec<f64> = ts.iter().map(|&t| f.eval(t)).collect();
    let fscale = fv.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()));

    let (mut idx, mut sigma): (Vec<usize>, Vec<f64>) = match warm {
        Some((i, s)) if i.len() == nref => (i.to_vec(), s.to_vec()),
        _ => (
            (0..nref).map(|j| j * (m / nref)).collect(),
            (0..nref)
                .map(|j| if j % 2 == 0 { 1.0 } else { -1.0 })
                .collect(),
        ),
    };

    let build_m = |idx: &[usize], sigma: &[f64]| -> DMatrix<f64> {
        let mut mm = DMatrix::<f64>::zeros(nref, nref);
        let mut row = vec![0.0; nb];
        for (j, (&jj, &sj)) in idx.iter().zip(sigma.iter()).enumerate() {
            basis.fill_row(ts[jj], &mut row);
            for (b, &v) in row.iter().enumerate() {
                mm[(b, j)] = sj * v;
            }
            mm[(nb, j)] = 1.0;
        }
        mm
    };
    let refactor = |idx: &[usize], sigma: &[f64]| -> Result<DMatrix<f64>> {
        build_m(idx, sigma)
            .lu()
            .try_inverse()
            .ok_or_else(|| Error::Convergence("simplex basis matrix is singular".into()))
    };

    let mut minv = match refactor(&idx, &sigma) {
        Ok(v) => v,
        Err(_) if warm.is_some() => {
            idx = (0..nref).map(|j| j * (m / nref)).collect();
            sigma = (0..nref)
                .map(|j| if j % 2 == 0 { 1.0 } else { -1.0 })
                .collect();
            refactor(&idx, &sigma)?
        }
        Err(e) => return Err(e),
    };
    let mut rhs = DVector::<f64>::zeros(nref);
    rhs[nb] = 1.0;
    let mut nu = &minv * &rhs;

    let mut coeffs = vec![0.0; nb];
    let mut level;
    let mut iterations = 0;
    let mut stall = 0usize;
    let mut row_buf = vec![0.0; nb];

    loop {
        if iterations > tol::ITER_CAP {
            return Err(Error::Convergence(
                "discrete minimax exchange hit the iteration cap".into(),
            ));
        }
        iterations += 1;
        if iterations % 64 == 0 {
            minv = refactor(&idx, &sigma)?;
            nu = &minv * &rhs;
            for v in nu.iter_mut() {
                if *v < 0.0 {
                    *v = 0.0;
                }
            }
        }

        let cost =
            DVector::from_iterator(nref, idx.iter().zip(sigma.iter()).map(|(&j, &s)| s * fv[j]));
        // multipliers of the basis: the leading block is the approximant,
        // the last entry the level, so reduced costs read σ·r(t_j) − level
        let pi = minv.transpose() * &cost;
        for (b, c) in coeffs.iter_mut().enumerate() {
            *c = pi[b];
        }
        level = pi[nb];

        let p = basis.to_poly(&coeffs);
        let mut jstar = 0usize;
        let mut rstar = 0.0f64;
        for (j, (&t, &v)) in ts.iter().zip(fv.iter()).enumerate() {
            let r = v - p.eval(t);
            if r.abs() > rstar.abs() {
                rstar = r;
                jstar = j;
            }
        }
        let viol = rstar.abs() - level;
        if viol <= 1e-12 * fscale.max(level.abs()).max(1e-300) {
            break;
        }

        let sstar = if rstar >= 0.0 { 1.0 } else { -1.0 };
        basis.fill_row(ts[jstar], &mut row_buf);
        let mut g = DVector::<f64>::zeros(nref);
        for (b, &v) in row_buf.iter().enumerate() {
            g[b] = sstar * v;
        }
        g[nb] = 1.0;
        let d = &minv * &g;

        let mut istar = None;
        let mut theta = f64::INFINITY;
        for i in 0..nref {
            if d[i] > 1e-13 {
                let ratio = nu[i] / d[i];
                if ratio < theta - 1e-15
                    || (ratio < theta + 1e-15 && {
                        match istar {
                            Some(prev) => d[i] > d[prev],
                            None => true,
                        }
                    })
                {
                    theta = ratio;
                    istar = Some(i);
                }
            }
        }
        let istar = match istar {
            Some(i) => i,
            None => break, // direction unbounded on a bounded problem: stalled
        };
        if theta <= 1e-300 {
            stall += 1;
            if stall > 4 * nref {
                break;
            }
        } else {
            stall = 0;
        }

        // eta update of the basis inverse for the column replacement
        let pivot = d[istar];
        if pivot.abs() < 1e-11 {
            minv = refactor(&idx, &sigma)?;
            nu = &minv * &rhs;
            continue;
        }
        let prow = minv.row(istar) / pivot;
        for r in 0..nref {
            if r == istar {
                continue;
            }
            let dr = d[r];
            if dr != 0.0 {
                for c in 0..nref {
                    minv[(r, c)] -= dr * prow[c];
                }
            }
        }
        minv.set_row(istar, &prow);
        for r in 0..nref {
            if r != istar {
                nu[r] -= theta * d[r];
                if nu[r] < 0.0 {
                    nu[r] = 0.0;
                }
            }
        }
        nu[istar] = theta;
        idx[istar] = jstar;
        sigma[istar] = sstar;
    }

    Ok((idx, sigma, coeffs, level, iterations))
}

fn best_uniform_circle(f: &TrigPoly, order: usize) -> Result<ApproxResult> {
    let basis = Basis::Full { order };
    let nref = basis.len() + 1;
    let dmax = f.degree().max(order + 1);
    let base = norms::resolving_grid(dmax).max(512);
    let mut unit = base.div_ceil(nref);
    let mut warm: Option<(Vec<usize>, Vec<f64>)> = None;
    let mut prev_err: Option<f64> = None;
    let mut total_iterations = 0;

    loop {
        let m = unit * nref;
        if m > tol::MINIMAX_GRID_CAP {
            return Err(Error::Convergence(format!(
                "minimax grid exceeded {} points before levels agreed",
                tol::MINIMAX_GRID_CAP
            )));
        }
        let warm_ref = warm.as_ref().map(|(i, s)| (i.as_slice(), s.as_slice()));
        let (idx, sigma, _, level0, iters) = circle_simplex(f, order, m, warm_ref)?;
        total_iterations += iters;

        let mut pairs: Vec<(usize, f64)> = idx.iter().cloned().zip(sigma.iter().cloned()).collect();
        pairs.sort_by_key(|&(j, _)| j);
        let mut ts: Vec<f64> = pairs.iter().map(|&(j, _)| grid_point(m, j)).collect();
        let sig: Vec<f64> = pairs.iter().map(|&(_, s)| s).collect();

        let polished = polish_reference(f, basis, &mut ts, &sig, 2.0 * PI / m as f64, false);
        let (coeffs, level) = match polished {
            Ok(v) => v,
            // polish is best-effort; the simplex solution stands on its own
            Err(_) => {
                let rfv: Vec<f64> = ts.iter().map(|&t| f.eval(t)).collect();
                levelled_solve(&rfv, &ts, &sig, basis).map(|(c, l)| (c, l.abs()))?
            }
        };
        let _ = level0;
        let result = finalize_minimax(f, basis, &coeffs, level, m, total_iterations);

        if let Some(pe) = prev_err {
            if (result.error - pe).abs() <= tol::TOL_MINIMAX * result.error.max(f64::MIN_POSITIVE) {
                return Ok(result);
            }
        }
        prev_err = Some(result.error);
        warm = Some((
            pairs.iter().map(|&(j, _)| 2 * j).collect(),
            pairs.iter().map(|&(_, s)| s).collect(),
        ));
        unit *= 2;
    }
}

/// Best uniform (sup-norm) approximation of f by trigonometric polynomials
/// of the given order. Returns zero error when f is already representable.
pub fn best_uniform(f: &TrigPoly, order: usize) -> Result<ApproxResult> {
    if f.degree() <= order {
        return Ok(ApproxResult {
            error: 0.0,
            best_poly: f.clone(),
            method: Method::Projection,
            diagnostics: Diagnostics {
                grid_size: 0,
                iterations: 0,
                residual: 0.0,
            },
        });
    }
    let even = f.sin_coeffs().iter().all(|&b| b == 0.0);
    if even {
        best_uniform_even(f, order)
    } else {
        best_uniform_circle(f, order)
    }
}

/// Best L_s approximation of f by trigonometric polynomials of the given
/// order, s ∈ (1, ∞). s = 2 is the exact Fourier projection; other s run
/// smoothed descent from the projection warm start.
pub fn best_ls(f: &TrigPoly, s: f64, order: usize) -> Result<ApproxResult> {
    if s.is_nan() || s <= 1.0 || s.is_infinite() {
        return Err(Error::InvalidArgument(format!(
            "integral exponent must lie in (1, inf), got {s} (use best_uniform for sup)"
        )));
    }
    let projection = fourier_partial_sum(f, order);
    if f.degree() <= order {
        return Ok(ApproxResult {
            error: 0.0,
            best_poly: projection,
            method: Method::Projection,
            diagnostics: Diagnostics {
                grid_size: 0,
                iterations: 0,
                residual: 0.0,
            },
        });
    }
    if s == 2.0 {
        let mut acc = Kahan::default();
        for k in (order + 1)..=f.degree() {
            let (a, b) = f.coeff(k);
            acc.add(a * a + b * b);
        }
        return Ok(ApproxResult {
            error: (PI * acc.value()).sqrt(),
            best_poly: projection,
            method: Method::Projection,
            diagnostics: Diagnostics {
                grid_size: 0,
                iterations: 0,
                residual: 0.0,
            },
        });
    }

    let basis = Basis::Full { order };
    let nb = basis.len();
    let m = norms::resolving_grid(f.degree().max(order + 1));
    let h = 2.0 * PI / m as f64;
    let fv: Vec<f64> = (0..m).map(|j| f.eval(grid_point(m, j))).collect();
    let mut phi = vec![0.0; m * nb];
    for j in 0..m {
        basis.fill_row(grid_point(m, j), &mut phi[j * nb..(j + 1) * nb]);
    }

    let objective = |c: &[f64], grad: &mut [f64], eps2: f64| -> (f64, f64) {
        let mut obj = Kahan::default();
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut rmax = 0.0f64;
        for j in 0..m {
            let row = &phi[j * nb..(j + 1) * nb];
            let mut r = fv[j];
            for (b, &v) in row.iter().enumerate() {
                r -= v * c[b];
            }
            rmax = rmax.max(r.abs());
            let q = r * r + eps2;
            obj.add(q.powf(0.5 * s));
            let w = if q > 0.0 {
                s * r * q.powf(0.5 * s - 1.0)
            } else {
                0.0
            };
            for (b, &v) in row.iter().enumerate() {
                grad[b] -= w * v;
            }
        }
        grad.iter_mut().for_each(|g| *g *= h);
        (obj.value() * h, rmax)
    };
    // second derivative weight s·q^{s/2−2}·((s−1)r² + ε²) is positive for
    // s > 1, so the Hessian is positive definite wherever the rows span
    let hessian = |c: &[f64], eps2: f64| -> DMatrix<f64> {
        let mut hm = DMatrix::<f64>::zeros(nb, nb);
        for j in 0..m {
            let row = &phi[j * nb..(j + 1) * nb];
            let mut r = fv[j];
            for (b, &v) in row.iter().enumerate() {
                r -= v * c[b];
            }
            let q = r * r + eps2;
            let w = if q > 0.0 {
                s * q.powf(0.5 * s - 2.0) * ((s - 1.0) * r * r + eps2)
            } else {
                0.0
            };
            for a in 0..nb {
                let wa = w * row[a];
                for b in a..nb {
                    hm[(a, b)] += wa * row[b];
                }
            }
        }
        for a in 0..nb {
            for b in 0..a {
                hm[(a, b)] = hm[(b, a)];
            }
        }
        hm * h
    };
    let l2 = |g: &[f64]| g.iter().map(|x| x * x).sum::<f64>().sqrt();
    let converged = |gn: f64, ob: f64| gn <= tol::TOL_LS * ob.max(f64::MIN_POSITIVE);

    let mut c = basis.from_poly(&projection);
    let mut grad = vec![0.0; nb];
    let mut c_new = vec![0.0; nb];
    let mut grad_new = vec![0.0; nb];
    let mut iterations = 0;

    // smoothing ladder: below exponent 2 the curvature blows up like
    // |r|^(s−2) at small residuals and the discrete optimum parks a few
    // residuals many orders under the bulk, so the smoothing steps down in
    // stages from the scale of the starting residual to the pinned floor,
    // each stage warm-starting the next; at 2 and above no smoothing is
    // needed and the ladder is the single exact stage
    let eps_pinned = if s < 2.0 { tol::LS_SMOOTHING } else { 0.0 };
    let (_, rmax) = objective(&c, &mut grad, eps_pinned * eps_pinned);
    let mut ladder = Vec::new();
    if s < 2.0 {
        let mut e = 1e-2 * rmax;
        while e > eps_pinned {
            ladder.push(e);
            e *= 1e-2;
        }
    }
    ladder.push(eps_pinned);

    // phase 1: Barzilai–Borwein steps with backtracking settle the top
    // stage from the projection start; stops early once backtracking can
    // no longer certify a decrease
    let eps2_top = ladder[0] * ladder[0];
    let mut obj;
    let mut gnorm;
    {
        let (o, rm) = objective(&c, &mut grad, eps2_top);
        obj = o;
        gnorm = l2(&grad);
        let curvature = s * (s - 1.0) * PI * (rm * rm + eps2_top).powf(0.5 * s - 1.0);
        let mut alpha = if curvature.is_finite() && curvature > 0.0 {
            1.0 / curvature
        } else {
            1.0
        };
        while !converged(gnorm, obj) && iterations < 500 {
            iterations += 1;
            let mut step = alpha.clamp(1e-18, 1e18);
            let mut accepted = false;
            for _ in 0..60 {
                for b in 0..nb {
                    c_new[b] = c[b] - step * grad[b];
                }
                let (obj_new, _) = objective(&c_new, &mut grad_new, eps2_top);
                if obj_new <= obj - 1e-4 * step * gnorm * gnorm {
                    let mut sy = 0.0;
                    let mut ss = 0.0;
                    for b in 0..nb {
                        let dc = c_new[b] - c[b];
                        let dg = grad_new[b] - grad[b];
                        sy += dc * dg;
                        ss += dc * dc;
                    }
                    alpha = if sy > 0.0 && ss > 0.0 {
                        ss / sy
                    } else {
                        2.0 * step
                    };
                    c.copy_from_slice(&c_new);
                    grad.copy_from_slice(&grad_new);
                    obj = obj_new;
                    gnorm = l2(&grad);
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
        }
    }

    // phase 2: damped Newton per stage, down to the gradient test at the
    // pinned smoothing; the quadratic endgame reaches the tolerance before
    // objective rounding noise bites
    for (si, &eps) in ladder.iter().enumerate() {
        let eps2 = eps * eps;
        let final_stage = si + 1 == ladder.len();
        let (o, _) = objective(&c, &mut grad, eps2);
        obj = o;
        gnorm = l2(&grad);
        // intermediate stages only have to hand over a warm start
        let stage_done = |gn: f64, ob: f64| {
            if final_stage {
                converged(gn, ob)
            } else {
                gn <= 1e-5 * ob.max(f64::MIN_POSITIVE)
            }
        };
        let stage_start = iterations;
        let mut lambda = 0.0f64;
        while !stage_done(gnorm, obj) {
            if iterations >= tol::ITER_CAP {
                return Err(Error::Convergence(format!(
                    "L_{s} descent hit the iteration cap with gradient {gnorm:.3e} vs objective {obj:.3e}"
                )));
            }
            if !final_stage && iterations - stage_start >= 300 {
                break;
            }
            if s < 2.0 {
                // IRLS majorizer step
                iterations += 1;
                let mut aw = DMatrix::<f64>::zeros(nb, nb);
                let mut bw = DVector::<f64>::zeros(nb);
                for j in 0..m {
                    let row = &phi[j * nb..(j + 1) * nb];
                    let mut r = fv[j];
                    for (b, &v) in row.iter().enumerate() {
                        r -= v * c[b];
                    }
                    let w = (r * r + eps2).powf(0.5 * s - 1.0);
                    for a in 0..nb {
                        let wa = w * row[a];
                        for b in a..nb {
                            aw[(a, b)] += wa * row[b];
                        }
                        bw[a] += wa * fv[j];
                    }
                }
                for a in 0..nb {
                    for b in 0..a {
                        aw[(a, b)] = aw[(b, a)];
                    }
                }
                if let Some(ch) = aw.cholesky() {
                    let sol = ch.solve(&bw);
                    for b in 0..nb {
                        c_new[b] = sol[b];
                    }
                    let (obj_new, _) = objective(&c_new, &mut grad_new, eps2);
                    let gnorm_new = l2(&grad_new);
                    if obj_new < obj || gnorm_new < gnorm {
                        c.copy_from_slice(&c_new);
                        grad.copy_from_slice(&grad_new);
                        obj = obj_new;
                        gnorm = gnorm_new;
                        continue;
                    }
                }
            }
            iterations += 1;
            let hm = hessian(&c, eps2);
            let scale = (hm.trace() / nb as f64).max(f64::MIN_POSITIVE);
            let mut accepted = false;
            for _ in 0..80 {
                let mut hl = hm.clone();
                for a in 0..nb {
                    hl[(a, a)] += lambda;
                }
                let dir = match hl.cholesky() {
                    Some(ch) => ch.solve(&DVector::from_column_slice(&grad)),
                    None => {
                        lambda = (10.0 * lambda).max(1e-12 * scale);
                        continue;
                    }
                };
                for b in 0..nb {
                    c_new[b] = c[b] - dir[b];
                }
                let (obj_new, _) = objective(&c_new, &mut grad_new, eps2);
                // the objective is convex, so driving the gradient to zero
                // is safe even when objective decreases sink below rounding
                // noise; accept on either certificate
                let gnorm_new = l2(&grad_new);
                if obj_new < obj || gnorm_new < gnorm {
                    c.copy_from_slice(&c_new);
                    grad.copy_from_slice(&grad_new);
                    obj = obj_new;
                    gnorm = gnorm_new;
                    lambda = if lambda > 1e-300 { 0.1 * lambda } else { 0.0 };
                    accepted = true;
                    break;
                }
                lambda = (10.0 * lambda).max(1e-12 * scale);
            }
            if !accepted {
                if !final_stage {
                    break;
                }
                return Err(Error::Convergence(format!(
                    "L_{s} descent stalled with gradient {gnorm:.3e} vs objective {obj:.3e}"
                )));
            }
        }
    }

    let p = basis.to_poly(&c);
    let error = norms::poly_lp_norm(&f.sub(&p), s)?;
    Ok(ApproxResult {
        error,
        best_poly: p,
        method: Method::SmoothDescent,
        diagnostics: Diagnostics {
            grid_size: m,
            iterations,
            residual: gnorm / obj.max(f64::MIN_POSITIVE),
        },
    })
}

/// L_p distance from f to its own Fourier partial sum of the given order.
pub fn fourier_error(f: &TrigPoly, order: usize, p: f64) -> Result<f64> {
    norms::poly_lp_norm(&f.sub(&fourier_partial_sum(f, order)), p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psi_core::PsiSpec;
    use crate::trig_poly;
    use std::f64::consts::LN_2;

    fn single_harmonic(k: usize, a: f64, b: f64) -> TrigPoly {
        let mut cos = vec![0.0; k];
        let mut sin = vec![0.0; k];
        cos[k - 1] = a;
        sin[k - 1] = b;
        TrigPoly::new(0.0, cos, sin).unwrap()
    }

    #[test]
    fn representable_targets_have_zero_error() {
        let f = single_harmonic(5, 1.0, 0.0);
        let r = best_uniform(&f, 5).unwrap();
        assert_eq!(r.error, 0.0);
        assert_eq!(r.method, Method::Projection);
        let r = best_ls(&f, 1.5, 7).unwrap();
        assert_eq!(r.error, 0.0);
    }

    #[test]
    fn minimax_of_pure_harmonic_is_one_even_path() {
        let f = single_harmonic(8, 1.0, 0.0);
        let r = best_uniform(&f, 7).unwrap();
        assert!((r.error - 1.0).abs() < 1e-8, "error = {}", r.error);
        assert!(norms::poly_sup_norm(&r.best_poly) < 1e-7);
        assert!(r.diagnostics.residual < 1e-6);
    }

    #[test]
    fn minimax_of_rotated_harmonic_is_its_amplitude_circle_path() {
        // 0.6 cos 3t − 0.8 sin 3t plus an exactly representable part
        let mut f = single_harmonic(3, 0.6, -0.8);
        let low = TrigPoly::new(0.3, vec![-0.2, 0.0], vec![0.0, 0.7]).unwrap();
        f = f.add(&low);
        let r = best_uniform(&f, 2).unwrap();
        assert!((r.error - 1.0).abs() < 1e-7, "error = {}", r.error);
        // the representable part must be reproduced
        assert!((r.best_poly.a0_half() - 0.3).abs() < 1e-7);
        assert!((r.best_poly.coeff(2).1 - 0.7).abs() < 1e-7);
        assert_eq!(r.method, Method::DiscreteMinimax);
    }

    #[test]
    fn minimax_against_projection_bound() {
        // minimax error never exceeds the Fourier-tail sup bound
        let spec = PsiSpec::exponential(LN_2, 0.5).unwrap();
        let f = trig_poly::extremal_difference(&spec, 25).unwrap();
        let e = best_uniform(&f, 24).unwrap().error;
        let tail_sup = fourier_error(&f, 24, f64::INFINITY).unwrap();
        assert!(e <= tail_sup * (1.0 + 1e-9));
        assert!(e > 0.0);
    }

    #[test]
    fn l2_path_matches_parseval() {
        let f = TrigPoly::new(
            0.1,
            vec![0.5, -0.25, 0.125, 0.3],
            vec![-0.4, 0.2, 0.0, -0.1],
        )
        .unwrap();
        let r = best_ls(&f, 2.0, 2).unwrap();
        let want = (PI * (0.125f64 * 0.125 + 0.3 * 0.3 + 0.1 * 0.1)).sqrt();
        assert!((r.error - want).abs() < 1e-14);
        assert_eq!(r.method, Method::Projection);
        assert_eq!(r.best_poly.degree(), 2);
    }

    #[test]
    fn smooth_descent_reproduces_symmetric_case() {
        // E(cos 3t) in L4 over order <= 2 equals ||cos 3t||_4 = (3π/4)^(1/4)
        let f = single_harmonic(3, 1.0, 0.0);
        let r = best_ls(&f, 4.0, 2).unwrap();
        assert!(
            (r.error - (3.0 * PI / 4.0).powf(0.25)).abs() < 1e-7,
            "error = {}",
            r.error
        );
        assert_eq!(r.method, Method::SmoothDescent);
        // the symmetric optimum is the zero polynomial
        assert!(norms::poly_sup_norm(&r.best_poly) < 1e-6);
    }

    #[test]
    fn smooth_descent_handles_subquadratic_exponents() {
        let f = single_harmonic(3, 1.0, 0.0);
        let r = best_ls(&f, 4.0 / 3.0, 2).unwrap();
        let want = norms::poly_lp_norm(&f, 4.0 / 3.0).unwrap();
        assert!((r.error - want).abs() < 1e-5 * want, "error = {}", r.error);
    }

    #[test]
    fn subquadratic_descent_survives_near_interpolation_profiles() {
        // staged ramp difference: its subquadratic optimum parks a few
        // residuals orders of magnitude below the bulk, the regime the
        // smoothing ladder and majorizer steps exist for
        let spec = PsiSpec::exponential(LN_2, 0.5).unwrap();
        let params = crate::bounds::BoundParams::theorem2(spec, 25, 0.0, 4.0 / 3.0).unwrap();
        let mut unit = params.clone();
        unit.exponent = 1.0;
        let f = crate::bounds::build_extremal(&unit).unwrap();
        let r = best_ls(&f, 4.0 / 3.0, 24).unwrap();
        assert!(
            r.diagnostics.residual <= tol::TOL_LS,
            "residual = {:e}",
            r.diagnostics.residual
        );
        // frozen regression value
        assert!(
            (r.error - 8.9919266763e-4).abs() < 1e-9,
            "error = {:e}",
            r.error
        );
        // the optimum must beat both natural competitors in the same norm
        let proj = fourier_partial_sum(&f, 24);
        let proj_err = norms::poly_lp_norm(&f.sub(&proj), 4.0 / 3.0).unwrap();
        let mm = best_uniform(&f, 24).unwrap();
        let mm_err = norms::poly_lp_norm(&f.sub(&mm.best_poly), 4.0 / 3.0).unwrap();
        assert!(r.error <= proj_err && r.error <= mm_err);
    }

    #[test]
    fn ls_rejects_bad_exponents() {
        let f = single_harmonic(3, 1.0, 0.0);
        assert!(best_ls(&f, 1.0, 2).is_err());
        assert!(best_ls(&f, 0.5, 2).is_err());
        assert!(best_ls(&f, f64::INFINITY, 2).is_err());
        assert!(best_ls(&f, f64::NAN, 2).is_err());
    }

    #[test]
    fn fourier_error_matches_norm_of_tail() {
        let f = TrigPoly::new(0.0, vec![1.0, 0.0, 2.0], vec![0.0, 0.0, 0.0]).unwrap();
        let e2 = fourier_error(&f, 2, 2.0).unwrap();
        assert!((e2 - (PI * 4.0).sqrt()).abs() < 1e-14);
        let einf = fourier_error(&f, 2, f64::INFINITY).unwrap();
        assert!((einf - 2.0).abs() < 1e-10);
    }

    #[test]
    fn minimax_beats_or_matches_fourier_in_sup() {
        let spec = PsiSpec::exponential(LN_2, 0.5).unwrap();
        let f = trig_poly::extremal_difference(&spec, 21).unwrap();
        let mini = best_uniform(&f, 20).unwrap().error;
        let four = fourier_error(&f, 20, f64::INFINITY).unwrap();
        assert!(mini <= four * (1.0 + 1e-9), "{mini} vs {four}");
    }
}
