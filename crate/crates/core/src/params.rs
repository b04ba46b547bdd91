//! Input parameters, physical constants and derived couplings.
//!
//! All public quantities are SI. Angular frequencies and rates are in rad/s.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// CODATA 2018 exact and recommended values.
pub mod constants {
    /// Reduced Planck constant (J·s).
    pub const HBAR: f64 = 1.054_571_817e-34;
    /// Boltzmann constant (J/K).
    pub const K_B: f64 = 1.380_649e-23;
    /// Speed of light in vacuum (m/s).
    pub const C: f64 = 299_792_458.0;
    /// Vacuum permeability (N/A²).
    pub const MU_0: f64 = 1.256_637_062_12e-6;
    /// Vacuum permittivity (F/m).
    pub const EPS_0: f64 = 8.854_187_812_8e-12;
}

use constants::{C, HBAR, K_B, MU_0};

/// Thermoelastic constants of the mirror material.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialParams {
    /// Young modulus (Pa).
    pub young_modulus: f64,
    /// Poisson ratio, strictly inside (0, 0.5).
    pub poisson_ratio: f64,
    /// Linear thermal expansion coefficient (1/K).
    pub thermal_expansion: f64,
    /// Mass density (kg/m³).
    pub density: f64,
    /// Specific heat capacity (J/(kg·K)).
    pub specific_heat: f64,
    /// Thermal conductivity (W/(m·K)).
    pub thermal_conductivity: f64,
    /// Electrical conductivity of the absorbing surface (S/m).
    pub electrical_conductivity: f64,
    /// Refraction index.
    pub refraction_index: f64,
}

impl MaterialParams {
    /// Silicon cantilever with a thin gold coating.
    ///
    /// Elastic and thermal constants are those of bulk silicon, which carries
    /// the thermal expansion; the electrical conductivity is that of gold,
    /// since the coating is where the light is absorbed.
    pub fn silicon_gold_coated() -> Self {
        Self {
            young_modulus: 130.0e9,
            poisson_ratio: 0.28,
            thermal_expansion: 2.6e-6,
            density: 2329.0,
            specific_heat: 700.0,
            thermal_conductivity: 148.0,
            electrical_conductivity: 4.1e7,
            refraction_index: 3.7,
        }
    }

    /// Bulk gold.
    pub fn gold() -> Self {
        Self {
            young_modulus: 79.0e9,
            poisson_ratio: 0.42,
            thermal_expansion: 14.2e-6,
            density: 19_300.0,
            specific_heat: 129.0,
            thermal_conductivity: 318.0,
            electrical_conductivity: 4.1e7,
            refraction_index: 0.19,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("young_modulus", self.young_modulus),
            ("poisson_ratio", self.poisson_ratio),
            ("thermal_expansion", self.thermal_expansion),
            ("density", self.density),
            ("specific_heat", self.specific_heat),
            ("thermal_conductivity", self.thermal_conductivity),
            ("electrical_conductivity", self.electrical_conductivity),
            ("refraction_index", self.refraction_index),
        ];
        for (name, v) in positive {
            // thermal_expansion = 0 is allowed: it simply switches the force off.
            let ok = if name == "thermal_expansion" {
                v.is_finite() && v >= 0.0
            } else {
                v.is_finite() && v > 0.0
            };
            if !ok {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        if self.poisson_ratio >= 0.5 {
            return Err(Error::Domain(format!(
                "poisson_ratio must be below 0.5 (1-2σ vanishes), got {}",
                self.poisson_ratio
            )));
        }
        Ok(())
    }
}

/// Laser angular frequency for a vacuum wavelength.
pub fn laser_angular_frequency(wavelength: f64) -> f64 {
    2.0 * PI * C / wavelength
}

/// Electromagnetic skin depth δ = (2/(μ₀σω))^½.
pub fn skin_depth(electrical_conductivity: f64, omega: f64) -> Result<f64> {
    if !(electrical_conductivity > 0.0) || !(omega > 0.0) {
        return Err(Error::Domain(format!(
            "skin depth needs positive conductivity and frequency, got σ={electrical_conductivity}, ω={omega}"
        )));
    }
    Ok((2.0 / (MU_0 * electrical_conductivity * omega)).sqrt())
}

/// Thermal diffusion length l = (2πK/(ϱCω))^½ at angular frequency `omega`.
pub fn thermal_diffusion_length(mat: &MaterialParams, omega: f64) -> Result<f64> {
    mat.validate()?;
    if !(omega > 0.0) {
        return Err(Error::Domain(format!("frequency must be positive, got {omega}")));
    }
    Ok((2.0 * PI * mat.thermal_conductivity / (mat.density * mat.specific_heat * omega)).sqrt())
}

/// Longitudinal and transverse elastic wave speeds (m/s).
pub fn wave_speeds(mat: &MaterialParams) -> Result<(f64, f64)> {
    mat.validate()?;
    let e = mat.young_modulus;
    let s = mat.poisson_ratio;
    let rho = mat.density;
    let c_l = (e * (1.0 - s) / (rho * (1.0 + s) * (1.0 - 2.0 * s))).sqrt();
    let c_t = (e / (2.0 * rho * (1.0 + s))).sqrt();
    Ok((c_l, c_t))
}

/// Deformation constant χ (s/m) linking absorbed power to the
/// instantaneous deformation force.
pub fn derive_deformation_constant(mat: &MaterialParams, laser_wavelength: f64) -> Result<f64> {
    mat.validate()?;
    if !(laser_wavelength > 0.0) {
        return Err(Error::Domain(format!(
            "laser wavelength must be positive, got {laser_wavelength}"
        )));
    }
    let delta_sd = skin_depth(
        mat.electrical_conductivity,
        laser_angular_frequency(laser_wavelength),
    )?;
    Ok(mat.young_modulus * mat.thermal_expansion * delta_sd
        / (3.0 * mat.thermal_conductivity * (1.0 - 2.0 * mat.poisson_ratio)))
}

/// Bose–Einstein occupation of a mode at angular frequency `omega`.
pub fn bose_occupation(omega: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        return 0.0;
    }
    1.0 / (HBAR * omega / (K_B * temperature)).exp_m1()
}

/// How the laser-cavity detuning is specified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Detuning {
    /// Bare detuning Δ₀ = ω_c − ω_L; the operating point is solved
    /// self-consistently.
    Raw(f64),
    /// Effective detuning Δ, already including the static mirror shift.
    Effective(f64),
}

impl Detuning {
    pub fn value(self) -> f64 {
        match self {
            Detuning::Raw(v) | Detuning::Effective(v) => v,
        }
    }
}

/// Full experimental parameter record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SystemParamsRecord", into = "SystemParamsRecord")]
pub struct SystemParams {
    /// Mechanical angular frequency ω_m (rad/s).
    pub mech_freq: f64,
    /// Mechanical quality factor Q_m.
    pub mech_quality: f64,
    /// Effective mass (kg).
    pub mass: f64,
    /// Mechanical bath temperature (K).
    pub bath_temp: f64,
    /// Cavity length (m).
    pub cavity_length: f64,
    /// Laser wavelength (m).
    pub laser_wavelength: f64,
    /// Input laser power (W).
    pub laser_power: f64,
    pub detuning: Detuning,
    /// Cavity decay rate through the input mirror γ₁ (rad/s).
    pub decay_input: f64,
    /// Cavity decay rate through the absorbing mechanical mirror γ₂ (rad/s).
    pub decay_mirror: f64,
    /// Deformation constant χ (s/m).
    pub deformation_const: f64,
    /// Absorption quantum efficiency β.
    pub absorption_eff: f64,
    /// Thermal diffusion time τ_th (s).
    pub thermal_time: f64,
}

/// Flat on-disk form of [`SystemParams`]; exactly one detuning key is set.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemParamsRecord {
    mech_freq: f64,
    mech_quality: f64,
    mass: f64,
    bath_temp: f64,
    cavity_length: f64,
    laser_wavelength: f64,
    laser_power: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    detuning_raw: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    detuning_eff: Option<f64>,
    decay_input: f64,
    decay_mirror: f64,
    deformation_const: f64,
    absorption_eff: f64,
    thermal_time: f64,
}

impl TryFrom<SystemParamsRecord> for SystemParams {
    type Error = Error;

    fn try_from(r: SystemParamsRecord) -> Result<Self> {
        let detuning = match (r.detuning_raw, r.detuning_eff) {
            (Some(v), None) => Detuning::Raw(v),
            (None, Some(v)) => Detuning::Effective(v),
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "set only one of detuning_raw and detuning_eff".into(),
                ))
            }
            (None, None) => {
                return Err(Error::Config(
                    "one of detuning_raw or detuning_eff is required".into(),
                ))
            }
        };
        let p = SystemParams {
            mech_freq: r.mech_freq,
            mech_quality: r.mech_quality,
            mass: r.mass,
            bath_temp: r.bath_temp,
            cavity_length: r.cavity_length,
            laser_wavelength: r.laser_wavelength,
            laser_power: r.laser_power,
            detuning,
            decay_input: r.decay_input,
            decay_mirror: r.decay_mirror,
            deformation_const: r.deformation_const,
            absorption_eff: r.absorption_eff,
            thermal_time: r.thermal_time,
        };
        p.validate()?;
        Ok(p)
    }
}

impl From<SystemParams> for SystemParamsRecord {
    fn from(p: SystemParams) -> Self {
        let (detuning_raw, detuning_eff) = match p.detuning {
            Detuning::Raw(v) => (Some(v), None),
            Detuning::Effective(v) => (None, Some(v)),
        };
        SystemParamsRecord {
            mech_freq: p.mech_freq,
            mech_quality: p.mech_quality,
            mass: p.mass,
            bath_temp: p.bath_temp,
            cavity_length: p.cavity_length,
            laser_wavelength: p.laser_wavelength,
            laser_power: p.laser_power,
            detuning_raw,
            detuning_eff,
            decay_input: p.decay_input,
            decay_mirror: p.decay_mirror,
            deformation_const: p.deformation_const,
            absorption_eff: p.absorption_eff,
            thermal_time: p.thermal_time,
        }
    }
}

/// Names accepted by [`SystemParams::set`].
pub const SETTABLE_FIELDS: &[&str] = &[
    "mech_freq",
    "mech_quality",
    "mass",
    "bath_temp",
    "cavity_length",
    "laser_wavelength",
    "laser_power",
    "detuning_raw",
    "detuning_eff",
    "decay_input",
    "decay_mirror",
    "deformation_const",
    "absorption_eff",
    "thermal_time",
];

/// Dimensionless aliases: detuning and input decay in units of ω_m, mirror
/// decay as a fraction of the input decay, thermal time times ω_m. They are
/// resolved against the current record when applied.
pub const NORMALIZED_FIELDS: &[&str] = &[
    "detuning_norm",
    "decay_input_norm",
    "decay_mirror_ratio",
    "thermal_time_norm",
];

impl SystemParams {
    /// Parameter set of the spectrum-composition figure: a 10 MHz, 5 ng
    /// resonator at 0.4 K in a 1 mm cavity pumped with 1 mW at 810 nm.
    pub fn baseline_fig2() -> Self {
        let wm = 2.0 * PI * 10.0e6;
        Self {
            mech_freq: wm,
            mech_quality: 1.0e5,
            mass: 5.0e-12,
            bath_temp: 0.4,
            cavity_length: 1.0e-3,
            laser_wavelength: 810.0e-9,
            laser_power: 1.0e-3,
            detuning: Detuning::Effective(wm),
            decay_input: 0.5 * wm,
            decay_mirror: 0.5 * wm,
            deformation_const: 1.0e-5,
            absorption_eff: 1.0,
            thermal_time: 1.0 / wm,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("parameter record serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let all_finite = [
            self.mech_freq,
            self.mech_quality,
            self.mass,
            self.bath_temp,
            self.cavity_length,
            self.laser_wavelength,
            self.laser_power,
            self.detuning.value(),
            self.decay_input,
            self.decay_mirror,
            self.deformation_const,
            self.absorption_eff,
            self.thermal_time,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::Domain("all parameters must be finite".into()));
        }
        for (name, v) in [
            ("mech_freq", self.mech_freq),
            ("mech_quality", self.mech_quality),
            ("mass", self.mass),
            ("cavity_length", self.cavity_length),
            ("laser_wavelength", self.laser_wavelength),
            ("decay_input", self.decay_input),
            ("thermal_time", self.thermal_time),
        ] {
            if v <= 0.0 {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [
            ("decay_mirror", self.decay_mirror),
            ("bath_temp", self.bath_temp),
            ("laser_power", self.laser_power),
            ("deformation_const", self.deformation_const),
        ] {
            if v < 0.0 {
                return Err(Error::Domain(format!(
                    "{name} must be non-negative, got {v}"
                )));
            }
        }
        if !(0.0..=1.0).contains(&self.absorption_eff) {
            return Err(Error::Domain(format!(
                "absorption_eff must lie in [0, 1], got {}",
                self.absorption_eff
            )));
        }
        Ok(())
    }

    /// Set a field by its record name or a normalized alias.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        match name {
            "mech_freq" => self.mech_freq = value,
            "mech_quality" => self.mech_quality = value,
            "mass" => self.mass = value,
            "bath_temp" => self.bath_temp = value,
            "cavity_length" => self.cavity_length = value,
            "laser_wavelength" => self.laser_wavelength = value,
            "laser_power" => self.laser_power = value,
            "detuning_raw" => self.detuning = Detuning::Raw(value),
            "detuning_eff" => self.detuning = Detuning::Effective(value),
            "decay_input" => self.decay_input = value,
            "decay_mirror" => self.decay_mirror = value,
            "deformation_const" => self.deformation_const = value,
            "absorption_eff" => self.absorption_eff = value,
            "thermal_time" => self.thermal_time = value,
            "detuning_norm" => self.detuning = Detuning::Effective(value * self.mech_freq),
            "decay_input_norm" => self.decay_input = value * self.mech_freq,
            "decay_mirror_ratio" => self.decay_mirror = value * self.decay_input,
            "thermal_time_norm" => self.thermal_time = value / self.mech_freq,
            other => return Err(Error::Config(format!("unknown parameter `{other}`"))),
        }
        Ok(())
    }

    /// Read a field by its record name. The detuning keys return the
    /// detuning value only when that representation is active.
    pub fn get(&self, name: &str) -> Result<f64> {
        Ok(match name {
            "mech_freq" => self.mech_freq,
            "mech_quality" => self.mech_quality,
            "mass" => self.mass,
            "bath_temp" => self.bath_temp,
            "cavity_length" => self.cavity_length,
            "laser_wavelength" => self.laser_wavelength,
            "laser_power" => self.laser_power,
            "detuning_raw" | "detuning_eff" => match (name, self.detuning) {
                ("detuning_raw", Detuning::Raw(v)) | ("detuning_eff", Detuning::Effective(v)) => v,
                _ => {
                    return Err(Error::Config(format!(
                        "`{name}` is not the active detuning representation"
                    )))
                }
            },
            "decay_input" => self.decay_input,
            "decay_mirror" => self.decay_mirror,
            "deformation_const" => self.deformation_const,
            "absorption_eff" => self.absorption_eff,
            "thermal_time" => self.thermal_time,
            "detuning_norm" => match self.detuning {
                Detuning::Effective(v) => v / self.mech_freq,
                Detuning::Raw(_) => {
                    return Err(Error::Config("`detuning_norm` needs an effective detuning".into()))
                }
            },
            "decay_input_norm" => self.decay_input / self.mech_freq,
            "decay_mirror_ratio" => self.decay_mirror / self.decay_input,
            "thermal_time_norm" => self.thermal_time * self.mech_freq,
            other => return Err(Error::Config(format!("unknown parameter `{other}`"))),
        })
    }
}

/// Couplings and rates that follow from [`SystemParams`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    /// Mechanical damping γ_m = ω_m/Q_m (rad/s).
    pub gamma_m: f64,
    /// Total cavity decay γ_c = γ₁ + γ₂ (rad/s).
    pub gamma_c: f64,
    /// Single-photon radiation-pressure coupling G₀ (rad/s).
    pub g0: f64,
    /// Photothermal coupling λ = χβL·G₀/τ_th (rad/s).
    pub lambda_pt: f64,
    /// Drive amplitude 𝓔 (rad/s).
    pub drive: f64,
    /// Thermal phonon number of the mechanical bath.
    pub nbar: f64,
    /// Cavity (≈ laser) angular frequency (rad/s).
    pub omega_c: f64,
    /// Photothermal lever χβL (s).
    pub kappa_pt: f64,
}

pub fn derive_couplings(sys: &SystemParams) -> Result<DerivedParams> {
    sys.validate()?;
    let omega_c = laser_angular_frequency(sys.laser_wavelength);
    let zpf = (HBAR / (sys.mass * sys.mech_freq)).sqrt();
    let g0 = omega_c / sys.cavity_length * zpf;
    let kappa_pt = sys.deformation_const * sys.absorption_eff * sys.cavity_length;
    Ok(DerivedParams {
        gamma_m: sys.mech_freq / sys.mech_quality,
        gamma_c: sys.decay_input + sys.decay_mirror,
        g0,
        lambda_pt: kappa_pt * g0 / sys.thermal_time,
        drive: (2.0 * sys.decay_input * sys.laser_power / (HBAR * omega_c)).sqrt(),
        nbar: bose_occupation(sys.mech_freq, sys.bath_temp),
        omega_c,
        kappa_pt,
    })
}
