//! Force-noise spectra, the effective mechanical susceptibility and the
//! resonance-evaluated damping and optical-spring shifts.
//!
//! Frequency convention: f(t) = ∫dω e^{−iωt} f̃(ω)/2π, so d/dt ↔ −iω and the
//! photothermal kernel is h̃(ω) = τ_th/(1 − iωτ_th).
//!
//! All spectra are symmetrized and carry units of a rate; S_qq carries units
//! of an inverse rate so that ∫dω/2π S_qq = ⟨δq²⟩.

use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::model::LinearizedSystem;
use crate::stability::stability_of;

type C64 = Complex<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThermalModel {
    /// (γ_m ω/ω_m) coth(ħω/2k_BT).
    Exact,
    /// γ_m(2n̄ + 1).
    #[default]
    Markov,
}

/// Brownian force spectrum.
pub fn thermal_spectrum(lin: &LinearizedSystem, omega: f64, model: ThermalModel) -> f64 {
    match model {
        ThermalModel::Markov => lin.brownian_strength(),
        ThermalModel::Exact => {
            let x = lin.hbar_omega_over_kt;
            let w = omega.abs() / lin.omega_m;
            if w == 0.0 {
                return if x.is_infinite() { 0.0 } else { 2.0 * lin.gamma_m / x };
            }
            let arg = 0.5 * w * x;
            let coth = if arg > 20.0 { 1.0 } else { 1.0 / arg.tanh() };
            lin.gamma_m * w * coth
        }
    }
}

fn lorentz_pair(lin: &LinearizedSystem, omega: f64) -> f64 {
    let gc2 = lin.gamma_c * lin.gamma_c;
    (gc2 + (omega - lin.delta).powi(2)) * (gc2 + (omega + lin.delta).powi(2))
}

pub fn radiation_pressure_spectrum(lin: &LinearizedSystem, omega: f64) -> f64 {
    let gc = lin.gamma_c;
    gc * lin.coupling.powi(2) * (gc * gc + lin.delta.powi(2) + omega * omega) / lorentz_pair(lin, omega)
}

pub fn photothermal_spectrum(lin: &LinearizedSystem, omega: f64) -> f64 {
    lin.gamma_2 * (lin.coupling * lin.kappa).powi(2) / (1.0 + (lin.tau * omega).powi(2))
}

pub fn cross_spectrum(lin: &LinearizedSystem, omega: f64) -> f64 {
    let gc = lin.gamma_c;
    let (d2, w2) = (lin.delta.powi(2), omega * omega);
    let num = gc * (gc * gc + d2 + w2) - lin.tau * w2 * (gc * gc - d2 + w2);
    2.0 * lin.gamma_2 * lin.coupling.powi(2) * lin.kappa * num
        / ((1.0 + (lin.tau * omega).powi(2)) * lorentz_pair(lin, omega))
}

/// S_rp + S_pt + S_cc.
pub fn optical_force_spectrum(lin: &LinearizedSystem, omega: f64) -> f64 {
    radiation_pressure_spectrum(lin, omega) + photothermal_spectrum(lin, omega) + cross_spectrum(lin, omega)
}

/// Optical self-energy Σ(ω) = G²Δ(1 + 2γ₂χβL h̃(ω)/τ_th) / ((γ_c − iω)² + Δ²),
/// obtained by eliminating the cavity quadratures and the memory.
pub fn optical_self_energy(lin: &LinearizedSystem, omega: f64) -> C64 {
    let iw = C64::new(0.0, omega);
    let kernel = C64::new(1.0, 0.0) / (C64::new(1.0, 0.0) - iw * lin.tau);
    let cav = (C64::from(lin.gamma_c) - iw).powi(2) + lin.delta * lin.delta;
    (C64::from(1.0) + kernel * (2.0 * lin.gamma_2 * lin.kappa)) * (lin.coupling.powi(2) * lin.delta) / cav
}

/// Exact X_eff(ω) = ω_m / (ω_m² − ω² − iωγ_m − ω_m Σ(ω)).
///
/// Returns non-finite values only exactly on a pole.
pub fn effective_susceptibility(lin: &LinearizedSystem, omega: f64) -> C64 {
    let wm = lin.omega_m;
    let den = C64::new(wm * wm - omega * omega, -omega * lin.gamma_m) - optical_self_energy(lin, omega) * wm;
    C64::from(wm) / den
}

/// Damping and spring shift evaluated at the bare resonance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveMechanics {
    pub gamma_rp: f64,
    pub gamma_pt: f64,
    pub gamma_eff: f64,
    /// Ω_eff², which can be negative near a static instability.
    pub omega_eff_sq: f64,
    /// Ω_eff when the radicand is non-negative.
    pub omega_eff: Option<f64>,
}

/// (Γ_rp, Γ_pt) at ω = ω_m.
pub fn effective_damping(lin: &LinearizedSystem) -> (f64, f64) {
    let wm = lin.omega_m;
    let gc = lin.gamma_c;
    let d = lin.delta;
    let g2 = lin.coupling.powi(2);
    let pair = lorentz_pair(lin, wm);
    let rp = 2.0 * gc * d * g2 * wm / pair;
    let pt = 2.0 * lin.gamma_2 * lin.kappa * d * g2 * wm * (2.0 * gc + lin.tau * (d * d + gc * gc - wm * wm))
        / ((1.0 + (lin.tau * wm).powi(2)) * pair);
    (rp, pt)
}

/// Optical-spring radicand Ω_eff² with the interior ω set to ω_m.
pub fn effective_frequency_sq(lin: &LinearizedSystem) -> f64 {
    let wm = lin.omega_m;
    let gc2 = lin.gamma_c.powi(2);
    let d = lin.delta;
    let g2 = lin.coupling.powi(2);
    let pair = lorentz_pair(lin, wm);
    let rp = d * g2 * wm * (gc2 + d * d - wm * wm) / pair;
    let pt = 2.0 * lin.gamma_2 * lin.kappa * d * g2 * wm
        * (gc2 + d * d - wm * wm * (1.0 + 2.0 * lin.gamma_c * lin.tau))
        / ((1.0 + (lin.tau * wm).powi(2)) * pair);
    wm * wm - rp - pt
}

pub fn effective_mechanics(lin: &LinearizedSystem) -> EffectiveMechanics {
    let (gamma_rp, gamma_pt) = effective_damping(lin);
    let omega_eff_sq = effective_frequency_sq(lin);
    EffectiveMechanics {
        gamma_rp,
        gamma_pt,
        gamma_eff: lin.gamma_m + gamma_rp + gamma_pt,
        omega_eff_sq,
        omega_eff: (omega_eff_sq >= 0.0).then(|| omega_eff_sq.sqrt()),
    }
}

fn require_stable(lin: &LinearizedSystem) -> Result<()> {
    let report = stability_of(lin);
    if report.is_stable() {
        Ok(())
    } else {
        Err(Error::Unstable(format!(
            "{:?} (margin {:e}); spectrum undefined",
            report.verdict, report.margin
        )))
    }
}

/// S_qq without the stability check.
pub(crate) fn position_spectrum_unchecked(lin: &LinearizedSystem, omega: f64, model: ThermalModel) -> f64 {
    effective_susceptibility(lin, omega).norm_sqr()
        * (thermal_spectrum(lin, omega, model) + optical_force_spectrum(lin, omega))
}

/// S_qq(ω) = |X_eff|²(S_th + S_rp + S_pt + S_cc).
pub fn position_spectrum(lin: &LinearizedSystem, omega: f64, model: ThermalModel) -> Result<f64> {
    require_stable(lin)?;
    Ok(position_spectrum_unchecked(lin, omega, model))
}

/// Dense linear grid on [0, 3ω_m] followed by a logarithmic tail up to
/// `cut_factor`·(fastest rate).
pub fn hybrid_grid(lin: &LinearizedSystem, n_dense: usize, n_tail: usize, cut_factor: f64) -> Vec<f64> {
    let top = 3.0 * lin.omega_m;
    let mut grid: Vec<f64> = (0..n_dense.max(2))
        .map(|i| top * i as f64 / (n_dense.max(2) - 1) as f64)
        .collect();
    let cut = cut_factor * lin.fastest_rate();
    if n_tail > 0 && cut > top {
        let (a, b) = (top.ln(), cut.ln());
        grid.extend((1..=n_tail).map(|i| (a + (b - a) * i as f64 / n_tail as f64).exp()));
    }
    grid
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTable {
    pub grid: Vec<f64>,
    pub s_th: Vec<f64>,
    pub s_rp: Vec<f64>,
    pub s_pt: Vec<f64>,
    pub s_cc: Vec<f64>,
    pub s_qq: Vec<f64>,
}

impl SpectrumTable {
    pub fn compute(lin: &LinearizedSystem, grid: Vec<f64>, model: ThermalModel) -> Result<Self> {
        require_stable(lin)?;
        let n = grid.len();
        let mut t = SpectrumTable {
            grid: Vec::with_capacity(n),
            s_th: Vec::with_capacity(n),
            s_rp: Vec::with_capacity(n),
            s_pt: Vec::with_capacity(n),
            s_cc: Vec::with_capacity(n),
            s_qq: Vec::with_capacity(n),
        };
        for w in grid {
            let th = thermal_spectrum(lin, w, model);
            let rp = radiation_pressure_spectrum(lin, w);
            let pt = photothermal_spectrum(lin, w);
            let cc = cross_spectrum(lin, w);
            let x2 = effective_susceptibility(lin, w).norm_sqr();
            t.grid.push(w);
            t.s_th.push(th);
            t.s_rp.push(rp);
            t.s_pt.push(pt);
            t.s_cc.push(cc);
            t.s_qq.push(x2 * (th + rp + pt + cc));
        }
        Ok(t)
    }
}
