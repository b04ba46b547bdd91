//! Named sweeps that regenerate each plot.

use photomech_core::response::{SpectrumTable, ThermalModel};
use photomech_core::{LinearizedSystem, SystemParams};

use crate::error::{CliError, Result};
use crate::sweep::{apply_point, run_sweep, Axis, Observable, SweepSpec};
use crate::table::Table;

pub const FIGURES: &[&str] = &["fig2", "fig3a", "fig3b", "fig3c", "fig4", "fig5a", "fig5b", "fig5c"];

/// Baseline with the listed overrides applied in order.
fn settings(overrides: &[(&str, f64)]) -> SystemParams {
    let mut sys = SystemParams::baseline_fig2();
    for (k, v) in overrides {
        sys.set(k, *v).expect("recipe parameter names are valid");
    }
    sys
}

const COOLING: &[(&str, f64)] = &[("laser_power", 15e-3)];

fn cooling(gamma_1: f64) -> SystemParams {
    let mut sys = settings(COOLING);
    sys.set("decay_input_norm", gamma_1).unwrap();
    sys.set("decay_mirror_ratio", 1.0).unwrap();
    sys
}

fn entangling(power: f64) -> SystemParams {
    settings(&[
        ("laser_power", power),
        ("detuning_norm", 0.85),
        ("decay_input_norm", 0.1),
        ("decay_mirror_ratio", 1.0),
    ])
}

/// Base parameters and sweep for a grid figure; `None` for fig2.
pub fn recipe(name: &str) -> Result<Option<(SystemParams, SweepSpec)>> {
    let ratios = |v: &[f64]| Some(Axis::list("decay_mirror_ratio", v));
    let spec = |axis1: Axis, axis2: Option<Axis>, observables: Vec<Observable>| SweepSpec {
        axis1,
        axis2,
        observables,
        branch: None,
    };
    Ok(Some(match name {
        "fig2" => return Ok(None),
        "fig3a" => (
            cooling(10.0),
            spec(Axis::log("detuning_norm", 0.5, 60.0, 120), ratios(&[0.0, 0.1, 0.5, 1.0]), vec![Observable::NEff]),
        ),
        "fig3b" => (
            cooling(0.1),
            spec(Axis::linear("detuning_norm", 0.1, 2.0, 96), ratios(&[0.0, 0.1, 0.5, 1.0]), vec![Observable::NEff]),
        ),
        "fig3c" => {
            let mut base = cooling(0.1);
            base.set("detuning_norm", 1.0).unwrap();
            (
                base,
                spec(
                    Axis::log("thermal_time_norm", 0.1, 10.0, 41),
                    Some(Axis::linear("decay_mirror_ratio", 0.0, 2.0, 41)),
                    vec![Observable::NEff],
                ),
            )
        }
        "fig4" => {
            let mut base = cooling(0.1);
            base.set("detuning_norm", 1.0).unwrap();
            (
                base,
                spec(
                    Axis::log("laser_power", 1e-4, 5e-2, 60),
                    ratios(&[0.0, 1.0]),
                    vec![Observable::NEff, Observable::NEffWeak],
                ),
            )
        }
        "fig5a" => (
            entangling(50e-3),
            spec(
                Axis::log("thermal_time_norm", 0.1, 10.0, 41),
                Some(Axis::linear("decay_mirror_ratio", 0.0, 2.0, 41)),
                vec![Observable::LogNeg],
            ),
        ),
        "fig5b" => (
            entangling(20e-3),
            spec(
                Axis::log("decay_input_norm", 0.01, 2.0, 120),
                ratios(&[0.0, 0.2, 0.9]),
                vec![Observable::LogNeg, Observable::Stability],
            ),
        ),
        "fig5c" => (
            entangling(50e-3),
            spec(Axis::linear("bath_temp", 0.0, 6.0, 121), ratios(&[0.0, 0.2, 0.9]), vec![Observable::LogNeg]),
        ),
        other => {
            return Err(CliError::Config(format!(
                "unknown figure `{other}`; expected one of {}",
                FIGURES.join(", ")
            )))
        }
    }))
}

/// Spectrum composition on ω/ω_m ∈ [0, 3], in ω_m-scaled units.
pub fn spectrum_table(sys: &SystemParams, branch: Option<usize>, points: usize, top: f64, model: ThermalModel) -> Result<Table> {
    let lin = LinearizedSystem::from_params(sys, branch)?.scaled();
    let grid: Vec<f64> = (0..points).map(|i| top * i as f64 / (points - 1).max(1) as f64).collect();
    let t = SpectrumTable::compute(&lin, grid, model)?;
    let rows = (0..t.grid.len())
        .map(|i| vec![t.grid[i], t.s_th[i], t.s_rp[i], t.s_pt[i], t.s_cc[i], t.s_qq[i]].into_iter().map(Some).collect())
        .collect();
    Ok(Table {
        comments: vec!["frequencies in units of omega_m; spectral densities in omega_m-scaled units".into()],
        columns: ["omega_norm", "s_th", "s_rp", "s_pt", "s_cc", "s_qq"].map(String::from).to_vec(),
        rows,
    })
}

/// Input power giving G = γ_c at the base detuning (G² ∝ P at fixed Δ).
pub fn strong_coupling_power(sys: &SystemParams) -> Result<f64> {
    let lin = LinearizedSystem::from_params(sys, None)?;
    Ok(sys.laser_power * (lin.gamma_c / lin.coupling).powi(2))
}

pub fn figure(name: &str) -> Result<Table> {
    let Some((base, spec)) = recipe(name)? else {
        return spectrum_table(&settings(&[]), None, 301, 3.0, ThermalModel::Markov);
    };
    let mut table = run_sweep(&spec, &base)?;
    if name == "fig4" {
        for r in [0.0, 1.0] {
            let sys = apply_point(&base, &[("decay_mirror_ratio", r)])?;
            table.comments.push(format!(
                "G = gamma_c at laser_power = {:.4e} W for decay_mirror_ratio = {r}",
                strong_coupling_power(&sys)?
            ));
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_recipe_resolves() {
        for name in FIGURES {
            let r = recipe(name).unwrap();
            assert_eq!(r.is_none(), *name == "fig2");
            if let Some((base, spec)) = r {
                base.validate().unwrap();
                spec.validate().unwrap();
            }
        }
        assert!(matches!(recipe("fig6"), Err(CliError::Config(_))));
    }

    #[test]
    fn strong_coupling_power_gives_g_equal_gamma_c() {
        let mut sys = cooling(0.1);
        sys.set("decay_mirror_ratio", 0.0).unwrap();
        sys.set("detuning_norm", 1.0).unwrap();
        let p = strong_coupling_power(&sys).unwrap();
        sys.laser_power = p;
        let lin = LinearizedSystem::from_params(&sys, None).unwrap();
        assert!((lin.coupling / lin.gamma_c - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fig3b_minimum_near_mechanical_frequency() {
        let (base, mut spec) = recipe("fig3b").unwrap().unwrap();
        spec.axis2 = Some(Axis::list("decay_mirror_ratio", &[1.0]));
        let t = run_sweep(&spec, &base).unwrap();
        let (x, n) = (t.column("detuning_norm").unwrap(), t.column("n_eff").unwrap());
        let (i, _) = n
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|v| (i, v)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        assert!((x[i].unwrap() - 1.0).abs() < 0.1, "minimum at {:?}", x[i]);
    }
}
