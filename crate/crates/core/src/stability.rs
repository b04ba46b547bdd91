//! Fifth-order characteristic polynomial and its Routh–Hurwitz test.
//!
//! The polynomial is written in the Laplace variable s (with s = −iω in the
//! frequency-domain convention), so stability means every root has a
//! negative real part.

use nalgebra::{Complex, SMatrix};

use crate::error::{Error, Result};
use crate::model::LinearizedSystem;
use crate::params::{DerivedParams, SystemParams};

/// Normalized determinants or real parts inside this band are "marginal".
pub const MARGINAL_BAND: f64 = 1e-9;

/// Monic quintic s⁵ + p₁s⁴ + p₂s³ + p₃s² + p₄s + p₅, SI coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharPoly {
    pub coefficients: [f64; 5],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Stable,
    Marginal,
    Unstable,
}

impl Verdict {
    /// CSV encoding: 1 stable, 0 unstable, −1 marginal.
    pub fn code(self) -> i8 {
        match self {
            Verdict::Stable => 1,
            Verdict::Unstable => 0,
            Verdict::Marginal => -1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    pub verdict: Verdict,
    /// Smallest ratio Δ_k/Δ_{k−1} of consecutive Hurwitz determinants of
    /// the root-scaled polynomial.
    pub margin: f64,
    /// Leading principal minors Δ₁…Δ₅ of the root-scaled polynomial.
    pub hurwitz: [f64; 5],
}

impl StabilityReport {
    pub fn is_stable(&self) -> bool {
        self.verdict == Verdict::Stable
    }
}

/// Coefficients p₁…p₅ of the effective susceptibility denominator.
pub fn characteristic_coefficients(lin: &LinearizedSystem) -> CharPoly {
    let LinearizedSystem {
        omega_m: wm,
        gamma_m: gm,
        gamma_c: gc,
        delta: d,
        coupling: g,
        tau: t,
        ..
    } = *lin;
    let d2 = d * d;
    let gc2 = gc * gc;
    let wm2 = wm * wm;
    let p1 = gm + 2.0 * gc + 1.0 / t;
    let p2 = d2 + wm2 + gc2 + 2.0 * gc * gm + (gm + 2.0 * gc) / t;
    let p3 = (d2 * (1.0 + gm * t) + wm2 + gc * (gc + gm * (2.0 + gc * t) + 2.0 * t * wm2)) / t;
    let p4 = ((gm + t * wm2) * (d2 + gc2) + wm * (2.0 * gc * wm - g * g * d * t)) / t;
    let p5 = (wm2 * (d2 + gc2) - g * g * d * wm * lin.static_feedback()) / t;
    CharPoly {
        coefficients: [p1, p2, p3, p4, p5],
    }
}

impl CharPoly {
    /// Root scale ρ = max |p_k|^{1/k}; the rescaled polynomial has roots of order one.
    pub fn root_scale(&self) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(k, c)| c.abs().powf(1.0 / (k as f64 + 1.0)))
            .fold(0.0, f64::max)
    }

    /// Coefficients of the polynomial in s/ρ.
    pub fn rescaled(&self) -> [f64; 5] {
        let rho = self.root_scale();
        let mut out = self.coefficients;
        if rho > 0.0 {
            for (k, c) in out.iter_mut().enumerate() {
                *c /= rho.powi(k as i32 + 1);
            }
        }
        out
    }

    /// Roots via eigenvalues of the companion matrix, in SI units.
    pub fn roots(&self) -> [Complex<f64>; 5] {
        let rho = self.root_scale().max(f64::MIN_POSITIVE);
        let a = self.rescaled();
        let mut m = SMatrix::<f64, 5, 5>::zeros();
        for i in 1..5 {
            m[(i, i - 1)] = 1.0;
        }
        for k in 0..5 {
            m[(k, 4)] = -a[4 - k];
        }
        let ev = m.complex_eigenvalues();
        std::array::from_fn(|i| ev[i] * rho)
    }
}

/// Routh–Hurwitz test on the normalized polynomial.
pub fn is_stable(cp: &CharPoly) -> Result<StabilityReport> {
    if cp.coefficients.iter().any(|c| !c.is_finite()) {
        return Err(Error::Domain("characteristic coefficients must be finite".into()));
    }
    let a = cp.rescaled();
    let coef = |k: i32| -> f64 {
        match k {
            0 => 1.0,
            1..=5 => a[(k - 1) as usize],
            _ => 0.0,
        }
    };
    // Hurwitz matrix H[i][j] = a_{2j − i} (1-based).
    let mut h = SMatrix::<f64, 5, 5>::zeros();
    for i in 0..5 {
        for j in 0..5 {
            h[(i, j)] = coef(2 * (j as i32 + 1) - (i as i32 + 1));
        }
    }
    let mut hurwitz = [0.0; 5];
    for k in 1..=5 {
        hurwitz[k - 1] = h.view((0, 0), (k, k)).clone_owned().determinant();
    }
    // Routh first column Δ_k/Δ_{k−1}; of the order of the root real parts
    // in units of the root scale.
    let mut margin = f64::INFINITY;
    let mut prev = 1.0;
    for &d in &hurwitz {
        let r = if prev == 0.0 { 0.0 } else { d / prev };
        margin = margin.min(r);
        prev = d;
    }
    let verdict = if margin.abs() < MARGINAL_BAND {
        Verdict::Marginal
    } else if margin > 0.0 {
        Verdict::Stable
    } else {
        Verdict::Unstable
    };
    Ok(StabilityReport {
        verdict,
        margin,
        hurwitz,
    })
}

/// Diagnostic verdict from the companion-matrix roots.
pub fn eigenvalue_verdict(cp: &CharPoly) -> Verdict {
    let rho = cp.root_scale().max(f64::MIN_POSITIVE);
    let max_re = cp
        .roots()
        .iter()
        .map(|z| z.re / rho)
        .fold(f64::NEG_INFINITY, f64::max);
    if max_re.abs() < MARGINAL_BAND {
        Verdict::Marginal
    } else if max_re < 0.0 {
        Verdict::Stable
    } else {
        Verdict::Unstable
    }
}

/// Convenience: Routh–Hurwitz report for a linearized system.
pub fn stability_of(lin: &LinearizedSystem) -> StabilityReport {
    is_stable(&characteristic_coefficients(lin)).unwrap_or(StabilityReport {
        verdict: Verdict::Marginal,
        margin: f64::NAN,
        hurwitz: [f64::NAN; 5],
    })
}

/// ω_m(γ_c² + Δ²) − ΔG²(1 + 2γ₂βχL); positive means the red-detuned
/// system is stable.
pub fn red_detuned_condition(lin: &LinearizedSystem) -> f64 {
    lin.omega_m * (lin.gamma_c.powi(2) + lin.delta.powi(2))
        - lin.delta * lin.coupling.powi(2) * lin.static_feedback()
}

/// Coupling at which the red-detuned condition saturates.
pub fn red_detuned_threshold(sys: &SystemParams, derived: &DerivedParams, delta: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::Domain(format!(
            "the threshold applies to red detuning (Δ > 0), got Δ = {delta}"
        )));
    }
    let feedback = 1.0 + 2.0 * sys.decay_mirror * derived.kappa_pt;
    Ok((sys.mech_freq * (derived.gamma_c.powi(2) + delta * delta) / (delta * feedback)).sqrt())
}
