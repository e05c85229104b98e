//! Pinned numeric tolerances and iteration budgets.
//!
//! These are part of the library contract: verifiers and solvers quote them
//! in their documentation and tests rely on them, so they are constants
//! rather than knobs. The only runtime-adjustable quantities live in
//! [`crate::bounds::VerifyOptions`].

/// Relative tolerance for root finding (weight inversion).
pub const TOL_ROOT: f64 = 1e-12;

/// Convexity slack for sampled classification, relative to ψ(t).
pub const TOL_CONVEX_REL: f64 = 1e-10;

/// Decay requirement for sampled classification: ψ(T_max) < TOL_DECAY · ψ(1).
pub const TOL_DECAY: f64 = 1e-6;

/// Relative tolerance for adaptive quadrature (tail integrals).
pub const TOL_QUAD: f64 = 1e-10;

/// Relative tolerance for grid-refined integral norms.
pub const TOL_NORM: f64 = 1e-9;

/// Hard cap on the norm-refinement grid size (inclusive).
pub const NORM_GRID_CAP: usize = 1 << 20;

/// Relative tolerance between successive grid levels of the minimax solver.
pub const TOL_MINIMAX: f64 = 1e-8;

/// Hard cap on the minimax grid size, counted over a full period (inclusive).
pub const MINIMAX_GRID_CAP: usize = 1 << 18;

/// Relative gradient tolerance for the smoothed-descent L_s solver.
pub const TOL_LS: f64 = 1e-8;

/// Smoothing parameter for |r|^s integrands when s < 2.
pub const LS_SMOOTHING: f64 = 1e-12;

/// Iteration budget for exchange and descent loops.
pub const ITER_CAP: usize = 10_000;

/// Relative slack granted when comparing a measured value against a bound.
pub const SLACK: f64 = 1e-9;

/// Fudge added before flooring so values within it of an integer land on it.
pub const FLOOR_FUDGE: f64 = 1e-9;

/// Default kernel-truncation tolerance, relative to ψ(n)·(η(n) − n).
pub const KERNEL_TOL_REL: f64 = 1e-12;

/// Hard cap on kernel truncation length.
pub const KERNEL_TERM_CAP: usize = 1 << 24;
