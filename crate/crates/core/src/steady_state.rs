//! Classical operating point of the driven cavity–mirror system.
//!
//! Eliminating the static displacement gives a cubic in the effective
//! detuning,
//!
//! ```text
//! (Δ − Δ₀)(γ_c² + Δ²) + G₀²(1 + 2γ₂χβL) 𝓔² / ω_m = 0,
//! ```
//!
//! which has one or three real roots (the bistable branches).

use crate::error::{Error, Result};
use crate::params::{derive_couplings, DerivedParams, Detuning, SystemParams};

/// Relative fixed-point residual every returned point satisfies, in units of ω_m.
pub const FIXED_POINT_TOL: f64 = 1e-10;

/// Relative discriminant threshold below which two roots are treated as a fold.
pub const FOLD_TOL: f64 = 1e-12;

/// Classical steady state on one branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    /// Real, non-negative intracavity amplitude α_s.
    pub alpha_s: f64,
    /// Static mechanical displacement in zero-point units.
    pub q_s: f64,
    /// Effective detuning Δ (rad/s).
    pub delta_eff: f64,
    /// Effective coupling G = √2 α_s G₀ (rad/s).
    pub coupling_g: f64,
    /// Position of this branch in the Δ-sorted list.
    pub branch_index: usize,
    /// Set when this root is a double root at the bistability fold.
    pub degenerate: bool,
}

/// G = √2 α_s G₀.
pub fn effective_coupling(op: &OperatingPoint, derived: &DerivedParams) -> f64 {
    std::f64::consts::SQRT_2 * op.alpha_s * derived.g0
}

fn static_feedback(sys: &SystemParams, derived: &DerivedParams) -> f64 {
    1.0 + 2.0 * sys.decay_mirror * derived.kappa_pt
}

/// Build the operating point at a known effective detuning.
pub fn operating_point_at(
    sys: &SystemParams,
    derived: &DerivedParams,
    delta: f64,
) -> OperatingPoint {
    let alpha_s = derived.drive / (derived.gamma_c.powi(2) + delta * delta).sqrt();
    let q_s = alpha_s * alpha_s * derived.g0 * static_feedback(sys, derived) / sys.mech_freq;
    let mut op = OperatingPoint {
        alpha_s,
        q_s,
        delta_eff: delta,
        coupling_g: 0.0,
        branch_index: 0,
        degenerate: false,
    };
    op.coupling_g = effective_coupling(&op, derived);
    op
}

/// Real roots of a monic cubic x³ + b x² + c x + d, ascending, together with
/// the discriminant. Roots are polished by Newton steps.
fn monic_cubic_real_roots(b: f64, c: f64, d: f64) -> (Vec<f64>, f64) {
    let disc = 18.0 * b * c * d - 4.0 * b.powi(3) * d + b * b * c * c - 4.0 * c.powi(3) - 27.0 * d * d;
    // Depressed cubic t³ + p t + q with x = t − b/3.
    let shift = b / 3.0;
    let p = c - b * b / 3.0;
    let q = 2.0 * b.powi(3) / 27.0 - b * c / 3.0 + d;
    let mut roots = Vec::with_capacity(3);
    let (cube, square) = (4.0 * p.powi(3), 27.0 * q * q);
    if p < 0.0 && cube + square <= 1e-12 * (cube.abs() + square) {
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        for k in 0..3 {
            let t = m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos();
            roots.push(t - shift);
        }
    } else {
        let s = (q * q / 4.0 + p.powi(3) / 27.0).max(0.0).sqrt();
        let t = (-q / 2.0 + s).cbrt() + (-q / 2.0 - s).cbrt();
        roots.push(t - shift);
    }
    for r in roots.iter_mut() {
        for _ in 0..4 {
            let f = ((*r + b) * *r + c) * *r + d;
            let df = (3.0 * *r + 2.0 * b) * *r + c;
            if df == 0.0 {
                break;
            }
            let step = f / df;
            if !step.is_finite() {
                break;
            }
            *r -= step;
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    (roots, disc)
}

/// All classical operating points, sorted by effective detuning.
///
/// With an effective detuning given directly there is exactly one point.
pub fn solve_operating_points(
    sys: &SystemParams,
    derived: &DerivedParams,
) -> Result<Vec<OperatingPoint>> {
    let delta0 = match sys.detuning {
        Detuning::Effective(delta) => return Ok(vec![operating_point_at(sys, derived, delta)]),
        Detuning::Raw(d0) => d0,
    };
    // Work in units of ω_m.
    let wm = sys.mech_freq;
    let x0 = delta0 / wm;
    let g = derived.gamma_c / wm;
    let k = derived.g0.powi(2) * static_feedback(sys, derived) * derived.drive.powi(2)
        / wm.powi(4);
    // x³ − x0 x² + g² x + (k − x0 g²) = 0
    let (b, c, d) = (-x0, g * g, k - x0 * g * g);
    let (roots, disc) = monic_cubic_real_roots(b, c, d);
    if roots.is_empty() {
        return Err(Error::numeric("cubic has no real root", f64::NAN));
    }
    let scale = x0.abs().max(g).max(k.abs().cbrt()).max(1e-300);
    let degenerate = disc.abs() < FOLD_TOL * scale.powi(6);

    let mut distinct: Vec<(f64, bool)> = Vec::new();
    if roots.len() == 3 && degenerate {
        // Two of the three coincide at the fold; report the pair once.
        let gaps = [roots[1] - roots[0], roots[2] - roots[1]];
        if gaps[0] <= gaps[1] {
            distinct.push((0.5 * (roots[0] + roots[1]), true));
            distinct.push((roots[2], false));
        } else {
            distinct.push((roots[0], false));
            distinct.push((0.5 * (roots[1] + roots[2]), true));
        }
    } else {
        distinct.extend(roots.iter().map(|&r| (r, false)));
    }

    let mut points = Vec::with_capacity(distinct.len());
    for (i, (x, flagged)) in distinct.into_iter().enumerate() {
        let mut op = operating_point_at(sys, derived, x * wm);
        op.branch_index = i;
        op.degenerate = flagged;
        let residual = (op.delta_eff - delta0 + derived.g0 * op.q_s).abs() / wm;
        let tol = if flagged { 1e-6 * scale.max(1.0) } else { FIXED_POINT_TOL };
        if !(residual < tol) {
            return Err(Error::numeric(
                "operating point failed the fixed-point check",
                residual,
            ));
        }
        points.push(op);
    }
    Ok(points)
}

/// Resolve a single operating point, picking `branch` when the system is
/// bistable.
pub fn resolve_operating_point(
    sys: &SystemParams,
    branch: Option<usize>,
) -> Result<(DerivedParams, OperatingPoint)> {
    let derived = derive_couplings(sys)?;
    let points = solve_operating_points(sys, &derived)?;
    let idx = branch.unwrap_or(0);
    let op = points.get(idx).copied().ok_or_else(|| {
        Error::Config(format!(
            "branch {idx} requested but only {} operating point(s) exist",
            points.len()
        ))
    })?;
    Ok((derived, op))
}
