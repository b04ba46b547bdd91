//! Linearized fluctuation dynamics around an operating point.
//!
//! The photothermal memory kernel h(t) = Θ(t) e^{−t/τ_th} is represented by
//! an auxiliary state w with
//!
//! ```text
//! ẇ = −w/τ_th + (2γ₂ δx − √(2γ₂) x₂ⁱⁿ)/τ_th,
//! ```
//!
//! which enters the momentum equation as χβL·G·w. The augmented state is
//! (δq, δp, δx, δy, w) and the noise vector is (ξ, x₁ⁱⁿ, y₁ⁱⁿ, x₂ⁱⁿ, y₂ⁱⁿ).

use nalgebra::{SMatrix, SVector};

use crate::error::Result;
use crate::params::{constants, DerivedParams, SystemParams};
use crate::steady_state::{resolve_operating_point, OperatingPoint};

pub type Mat5 = SMatrix<f64, 5, 5>;
pub type Vec5 = SVector<f64, 5>;

/// Symmetrized white-noise strengths of the five input channels:
/// ⟨{nᵢ(t), nⱼ(t′)}⟩/2 = Nᵢⱼ δ(t − t′).
///
/// Vacuum optical inputs contribute 1/2 per quadrature. The Brownian force
/// in the Markov limit contributes γ_m(2n̄ + 1), so that an uncoupled
/// oscillator relaxes to ⟨δq²⟩ = ⟨δp²⟩ = n̄ + 1/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub diffusion: Mat5,
}

/// All rates needed by the linearized equations, in SI or, after
/// [`LinearizedSystem::scaled`], in units of ω_m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearizedSystem {
    pub omega_m: f64,
    pub gamma_m: f64,
    pub gamma_1: f64,
    pub gamma_2: f64,
    pub gamma_c: f64,
    /// Effective detuning Δ.
    pub delta: f64,
    /// Effective coupling G.
    pub coupling: f64,
    /// Photothermal lever χβL (a time).
    pub kappa: f64,
    /// Thermal diffusion time τ_th.
    pub tau: f64,
    /// Thermal phonon number n̄.
    pub nbar: f64,
    /// ħω_m/(k_B T); infinite at zero temperature.
    pub hbar_omega_over_kt: f64,
}

impl LinearizedSystem {
    pub fn new(sys: &SystemParams, derived: &DerivedParams, op: &OperatingPoint) -> Self {
        let hbar_omega_over_kt = if sys.bath_temp > 0.0 {
            constants::HBAR * sys.mech_freq / (constants::K_B * sys.bath_temp)
        } else {
            f64::INFINITY
        };
        Self {
            omega_m: sys.mech_freq,
            gamma_m: derived.gamma_m,
            gamma_1: sys.decay_input,
            gamma_2: sys.decay_mirror,
            gamma_c: derived.gamma_c,
            delta: op.delta_eff,
            coupling: op.coupling_g,
            kappa: derived.kappa_pt,
            tau: sys.thermal_time,
            nbar: derived.nbar,
            hbar_omega_over_kt,
        }
    }

    /// Derive couplings and the operating point (branch 0 unless given) in one go.
    pub fn from_params(sys: &SystemParams, branch: Option<usize>) -> Result<Self> {
        let (derived, op) = resolve_operating_point(sys, branch)?;
        Ok(Self::new(sys, &derived, &op))
    }

    /// Same system with every frequency divided by ω_m and every time
    /// multiplied by it.
    pub fn scaled(&self) -> Self {
        let w = self.omega_m;
        Self {
            omega_m: 1.0,
            gamma_m: self.gamma_m / w,
            gamma_1: self.gamma_1 / w,
            gamma_2: self.gamma_2 / w,
            gamma_c: self.gamma_c / w,
            delta: self.delta / w,
            coupling: self.coupling / w,
            kappa: self.kappa * w,
            tau: self.tau * w,
            nbar: self.nbar,
            hbar_omega_over_kt: self.hbar_omega_over_kt,
        }
    }

    /// Static photothermal enhancement 1 + 2γ₂χβL.
    pub fn static_feedback(&self) -> f64 {
        1.0 + 2.0 * self.gamma_2 * self.kappa
    }

    /// Drift matrix of the augmented five-state system.
    pub fn drift(&self) -> Mat5 {
        let g = self.coupling;
        #[rustfmt::skip]
        let a = Mat5::new(
            0.0,           self.omega_m,  0.0,                          0.0,           0.0,
            -self.omega_m, -self.gamma_m, g,                            0.0,           self.kappa * g,
            0.0,           0.0,           -self.gamma_c,                self.delta,    0.0,
            g,             0.0,           -self.delta,                  -self.gamma_c, 0.0,
            0.0,           0.0,           2.0 * self.gamma_2 / self.tau, 0.0,          -1.0 / self.tau,
        );
        a
    }

    /// Input matrix mapping (ξ, x₁ⁱⁿ, y₁ⁱⁿ, x₂ⁱⁿ, y₂ⁱⁿ) onto the augmented state.
    /// x₂ⁱⁿ feeds both the cavity amplitude quadrature and the memory.
    pub fn input_matrix(&self) -> Mat5 {
        let s1 = (2.0 * self.gamma_1).sqrt();
        let s2 = (2.0 * self.gamma_2).sqrt();
        #[rustfmt::skip]
        let b = Mat5::new(
            0.0, 0.0, 0.0, 0.0,             0.0,
            1.0, 0.0, 0.0, 0.0,             0.0,
            0.0, s1,  0.0, s2,              0.0,
            0.0, 0.0, s1,  0.0,             s2,
            0.0, 0.0, 0.0, -s2 / self.tau,  0.0,
        );
        b
    }

    /// Markov-limit Brownian strength γ_m(2n̄ + 1).
    pub fn brownian_strength(&self) -> f64 {
        self.gamma_m * (2.0 * self.nbar + 1.0)
    }

    pub fn noise_model(&self) -> NoiseModel {
        NoiseModel {
            diffusion: Mat5::from_diagonal(&Vec5::new(
                self.brownian_strength(),
                0.5,
                0.5,
                0.5,
                0.5,
            )),
        }
    }

    /// State diffusion B N Bᵀ of the augmented system.
    pub fn state_diffusion(&self) -> Mat5 {
        let b = self.input_matrix();
        b * self.noise_model().diffusion * b.transpose()
    }

    /// Largest rate in the problem, used for grid and step sizing.
    pub fn fastest_rate(&self) -> f64 {
        [
            self.omega_m,
            self.gamma_c,
            self.delta.abs(),
            1.0 / self.tau,
            self.coupling,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}
