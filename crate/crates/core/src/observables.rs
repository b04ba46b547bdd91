//! Cooling and entanglement figures of merit.

use serde::Serialize;

use crate::covariance::{steady_covariance, CovarianceMatrix, Method};
use crate::error::{Error, Result};
use crate::model::LinearizedSystem;
use crate::params::constants::{HBAR, K_B};
use crate::response::effective_damping;

/// Slack below zero tolerated for n_eff before it counts as an uncertainty violation.
pub const NEGATIVE_PHONON_SLACK: f64 = 1e-8;

/// n_eff = (V₁₁ + V₂₂ − 1)/2.
pub fn phonon_number_exact(v: &CovarianceMatrix) -> Result<f64> {
    let n = 0.5 * (v.v[(0, 0)] + v.v[(1, 1)] - 1.0);
    if n < -NEGATIVE_PHONON_SLACK {
        return Err(Error::numeric("negative phonon number", n));
    }
    Ok(n.max(0.0))
}

/// Anti-Stokes (`plus`) and Stokes (`minus`) scattering rates, ordered
/// (radiation pressure, photothermal, cross term).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScatteringRates {
    pub plus: [f64; 3],
    pub minus: [f64; 3],
}

impl ScatteringRates {
    pub fn total_plus(&self) -> f64 {
        self.plus.iter().sum()
    }

    pub fn total_minus(&self) -> f64 {
        self.minus.iter().sum()
    }
}

pub fn scattering_rates(lin: &LinearizedSystem) -> ScatteringRates {
    let wm = lin.omega_m;
    let gc = lin.gamma_c;
    let g2 = lin.coupling.powi(2);
    let d = lin.delta;
    let memory = 1.0 + (lin.tau * wm).powi(2);
    let lor = |x: f64| gc * gc + x * x;
    let pt = lin.gamma_2 * lin.kappa.powi(2) * g2 / (2.0 * memory);
    let cc_plus = lin.gamma_2 * lin.kappa * g2 * (gc - lin.tau * wm * (d + wm)) / (memory * lor(wm + d));
    ScatteringRates {
        plus: [g2 * gc / (2.0 * lor(wm + d)), pt, cc_plus],
        minus: [g2 * gc / (2.0 * lor(wm - d)), pt, cross_minus(lin)],
    }
}

/// Cross-term Stokes rate, the ω_m → −ω_m reflection of the anti-Stokes one.
fn cross_minus(lin: &LinearizedSystem) -> f64 {
    let wm = lin.omega_m;
    let gc = lin.gamma_c;
    lin.gamma_2 * lin.kappa * lin.coupling.powi(2) * (gc - lin.tau * wm * (wm - lin.delta))
        / ((1.0 + (lin.tau * wm).powi(2)) * (gc * gc + (wm - lin.delta).powi(2)))
}

/// (n̄γ_m + ΣA⁺)/(γ_m + Γ_rp + Γ_pt).
pub fn phonon_number_weak_coupling(lin: &LinearizedSystem) -> Result<f64> {
    let (rp, pt) = effective_damping(lin);
    let den = lin.gamma_m + rp + pt;
    if !(den > 0.0) {
        return Err(Error::Domain(format!("effective damping {den:e} is not positive")));
    }
    Ok((lin.nbar * lin.gamma_m + scattering_rates(lin).total_plus()) / den)
}

/// ΣA⁺/(ΣA⁻ − ΣA⁺).
pub fn n_min_asymmetric(lin: &LinearizedSystem) -> Result<f64> {
    let r = scattering_rates(lin);
    let (p, m) = (r.total_plus(), r.total_minus());
    if !(m > p) {
        return Err(Error::Domain("no cooling limit: Stokes rate does not exceed anti-Stokes rate".into()));
    }
    Ok(p / (m - p))
}

/// Bose inversion of n_eff at frequency ω_m (rad/s).
pub fn effective_temperature(n_eff: f64, omega_m: f64) -> Result<f64> {
    if n_eff < 0.0 || !n_eff.is_finite() {
        return Err(Error::Domain(format!("phonon number {n_eff} out of range")));
    }
    if n_eff == 0.0 {
        return Ok(0.0);
    }
    Ok(HBAR * omega_m / (K_B * (1.0 / n_eff).ln_1p()))
}

/// ⟨δq²⟩/⟨δp²⟩.
pub fn equipartition_check(v: &CovarianceMatrix) -> f64 {
    v.v[(0, 0)] / v.v[(1, 1)]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntanglementReport {
    pub eta_min: f64,
    pub log_neg: f64,
    pub entangled: bool,
    /// Near-threshold estimate; absent when Δ ≤ 0.
    pub eta_min_approx: Option<f64>,
}

/// η⁻ and E_N of the mechanics–cavity partition.
pub fn log_negativity(v: &CovarianceMatrix) -> Result<EntanglementReport> {
    let (a, b, c) = v.blocks();
    let sigma = a.determinant() + b.determinant() - 2.0 * c.determinant();
    let det = v.v.determinant();
    let disc = sigma * sigma - 4.0 * det;
    if disc < -1e-10 * sigma * sigma {
        return Err(Error::numeric("invalid covariance: Σ² < 4 det V", disc));
    }
    // η⁻²η⁺² = det V; dividing by the larger root avoids cancellation.
    let eta = (2.0 * det / (sigma + disc.max(0.0).sqrt())).max(0.0).sqrt();
    let log_neg = (-(2.0 * eta).ln()).max(0.0);
    Ok(EntanglementReport {
        eta_min: eta,
        log_neg,
        entangled: eta < 0.5,
        eta_min_approx: None,
    })
}

/// Coefficients of the near-threshold η⁻ estimate, in units of ω_m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaCoefficients {
    pub a_eta: f64,
    pub b0: f64,
    pub b2: f64,
    pub b4: f64,
    pub b6: f64,
    pub c2: f64,
    pub c4: f64,
}

impl EtaCoefficients {
    pub fn new(lin: &LinearizedSystem) -> Self {
        let s = lin.scaled();
        let (d, gc, t) = (s.delta, s.gamma_c, s.tau);
        let (d2, t2) = (d * d, t * t);
        let a_eta = 1.0 + t * (d2 * t + gc * (2.0 + gc * t) + t * (1.0 + 2.0 * gc * t));
        let b0 = 40.0 * d2 * gc * (d2 + gc * gc) * (1.0 + 2.0 * gc * t + d2 * t2 + gc * gc * t2);
        let b2 = 8.0
            * d2
            * (6.0 * gc.powi(4) * t.powi(3) - d2 * t
                + gc.powi(5) * t.powi(4)
                + gc.powi(3) * t2 * (3.0 + 2.0 * d2 * t2)
                + gc * gc * t * (7.0 + 6.0 * d2 * t2)
                + gc * (5.0 + 7.0 * d2 * t2 + d2 * d2 * t2 * t2));
        let b4 = 2.0
            * (gc.powi(3) * t2 * (3.0 + 4.0 * d2 * t2)
                + 8.0 * gc * gc * (t + 3.0 * d2 * t.powi(3))
                + gc * (5.0 + 7.0 * d2 * t2 + 4.0 * d2 * d2 * t2 * t2)
                - 6.0 * d2 * t);
        let b6 = 2.0 * t * (6.0 * gc * gc * t2 + gc.powi(3) * t.powi(3) + gc * t * (d2 * t2 - 1.0) - 2.0);
        let c2 = 16.0
            * d2
            * (10.0 * gc.powi(4) * t.powi(3)
                + gc.powi(5) * t.powi(4)
                + gc.powi(3) * t2 * (27.0 + 2.0 * d2 * t2)
                + d2 * t * (3.0 + 4.0 * d2 * t2)
                + gc * gc * t * (43.0 + 14.0 * d2 * t2)
                + gc * (21.0 + 31.0 * d2 * t2 + d2 * d2 * t2 * t2));
        let c4 = 16.0
            * d2
            * t
            * (2.0 * d2 * t2 + 24.0 * gc * gc * t2 + 5.0 * gc.powi(3) * t.powi(3) + gc * t * (5.0 * d2 * t2 - 3.0)
                - 7.0);
        Self {
            a_eta,
            b0,
            b2,
            b4,
            b6,
            c2,
            c4,
        }
    }

    /// B_η and C_η with ω_m = 1.
    pub fn b_and_c(&self) -> (f64, f64) {
        (
            self.b0 + self.b2 + self.b4 + self.b6,
            2.0 * self.b0 + self.c2 + self.c4,
        )
    }
}

/// Near-threshold η⁻ estimate (coupling pinned at the stability threshold,
/// thermal noise neglected). The coupling stored in `lin` is ignored.
pub fn eta_min_threshold_approx(lin: &LinearizedSystem) -> Result<f64> {
    if !(lin.delta > 0.0) {
        return Err(Error::Domain(format!("needs red detuning, got Δ = {}", lin.delta)));
    }
    let s = lin.scaled();
    let (d, gc) = (s.delta, s.gamma_c);
    let d2 = d * d;
    let co = EtaCoefficients::new(lin);
    let (b, c) = co.b_and_c();
    let lever = s.kappa * s.gamma_2;
    let num = gc * (1.0 + 4.0 * d2 * (d2 + gc * gc + 1.0)) * co.a_eta + lever * b;
    let den = 2.0 * (8.0 * gc * d2 * (d2 + gc * gc + 5.0) * co.a_eta + lever * c);
    Ok((num / den).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoolingReport {
    pub n_eff: f64,
    pub n_eff_weak: Option<f64>,
    pub n_min: Option<f64>,
    pub t_eff: f64,
    pub equipartition_ratio: f64,
}

pub fn cooling_report(lin: &LinearizedSystem) -> Result<CoolingReport> {
    let v = steady_covariance(lin, Method::Lyapunov)?;
    let n_eff = phonon_number_exact(&v)?;
    Ok(CoolingReport {
        n_eff,
        n_eff_weak: phonon_number_weak_coupling(lin).ok(),
        n_min: n_min_asymmetric(lin).ok(),
        t_eff: effective_temperature(n_eff, lin.omega_m)?,
        equipartition_ratio: equipartition_check(&v),
    })
}

pub fn entanglement_report(lin: &LinearizedSystem) -> Result<EntanglementReport> {
    let v = steady_covariance(lin, Method::Lyapunov)?;
    let mut r = log_negativity(&v)?;
    r.eta_min_approx = eta_min_threshold_approx(lin).ok();
    Ok(r)
}
