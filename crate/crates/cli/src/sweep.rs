//! Grid sweeps over parameter axes.

use rayon::prelude::*;

use photomech_core::covariance::{steady_covariance, Method};
use photomech_core::observables::{log_negativity, phonon_number_exact, phonon_number_weak_coupling};
use photomech_core::params::{NORMALIZED_FIELDS, SETTABLE_FIELDS};
use photomech_core::response::{position_spectrum, ThermalModel};
use photomech_core::stability::stability_of;
use photomech_core::{Error, LinearizedSystem, SystemParams};

use crate::error::{CliError, Result};
use crate::table::Table;

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn linear(name: &str, start: f64, stop: f64, n: usize) -> Self {
        let values = (0..n).map(|i| start + (stop - start) * i as f64 / (n - 1).max(1) as f64).collect();
        Self { name: name.into(), values }
    }

    pub fn log(name: &str, start: f64, stop: f64, n: usize) -> Self {
        let (a, b) = (start.ln(), stop.ln());
        let mut values: Vec<f64> = (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1).max(1) as f64).exp()).collect();
        if n >= 2 {
            (values[0], values[n - 1]) = (start, stop);
        }
        Self { name: name.into(), values }
    }

    pub fn list(name: &str, values: &[f64]) -> Self {
        Self { name: name.into(), values: values.to_vec() }
    }

    /// `name=start:stop:n`, `name=start:stop:n:log` or `name=v1,v2,...`.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = |why: &str| CliError::Config(format!("axis `{text}`: {why}"));
        let (name, range) = text.split_once('=').ok_or_else(|| bad("expected name=range"))?;
        let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(&format!("`{s}` is not a number")));
        let axis = if range.contains(':') {
            let parts: Vec<&str> = range.split(':').collect();
            if !(3..=4).contains(&parts.len()) {
                return Err(bad("expected start:stop:n[:log]"));
            }
            let (a, b) = (num(parts[0])?, num(parts[1])?);
            let n: usize = parts[2].trim().parse().map_err(|_| bad("point count must be an integer"))?;
            match parts.get(3).map(|s| s.trim()) {
                None | Some("lin") => Axis::linear(name, a, b, n),
                Some("log") if a > 0.0 && b > 0.0 => Axis::log(name, a, b, n),
                Some("log") => return Err(bad("log axis needs positive bounds")),
                Some(other) => return Err(bad(&format!("unknown spacing `{other}`"))),
            }
        } else {
            Axis::list(name, &range.split(',').map(num).collect::<Result<Vec<_>>>()?)
        };
        axis.check()?;
        Ok(axis)
    }

    fn check(&self) -> Result<()> {
        check_name(&self.name)?;
        if self.values.is_empty() || self.values.iter().any(|v| !v.is_finite()) {
            return Err(CliError::Config(format!("axis `{}` needs finite values", self.name)));
        }
        Ok(())
    }
}

pub fn check_name(name: &str) -> Result<()> {
    if SETTABLE_FIELDS.contains(&name) || NORMALIZED_FIELDS.contains(&name) {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "unknown parameter `{name}`; expected one of {} or {}",
            SETTABLE_FIELDS.join(", "),
            NORMALIZED_FIELDS.join(", ")
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Observable {
    NEff,
    NEffWeak,
    LogNeg,
    EtaMin,
    /// Routh–Hurwitz verdict code: 1 stable, 0 unstable, −1 marginal.
    Stability,
    /// S_qq at ω = factor·ω_m, ω_m-scaled units.
    Sqq(f64),
}

impl Observable {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(match text.trim() {
            "n_eff" => Observable::NEff,
            "n_eff_weak" => Observable::NEffWeak,
            "E_N" | "log_neg" => Observable::LogNeg,
            "eta_min" => Observable::EtaMin,
            "stability" => Observable::Stability,
            s => match s.strip_prefix("S_qq@") {
                Some(w) => Observable::Sqq(
                    w.parse()
                        .map_err(|_| CliError::Config(format!("bad frequency in `{s}`")))?,
                ),
                None => {
                    return Err(CliError::Config(format!(
                        "unknown observable `{s}`; expected n_eff, n_eff_weak, E_N, eta_min, stability or S_qq@<ω/ω_m>"
                    )))
                }
            },
        })
    }

    pub fn column(&self) -> String {
        match self {
            Observable::NEff => "n_eff".into(),
            Observable::NEffWeak => "n_eff_weak".into(),
            Observable::LogNeg => "E_N".into(),
            Observable::EtaMin => "eta_min".into(),
            Observable::Stability => "stability".into(),
            Observable::Sqq(w) => format!("S_qq@{w}"),
        }
    }

    fn needs_covariance(&self) -> bool {
        matches!(self, Observable::NEff | Observable::LogNeg | Observable::EtaMin)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis1: Axis,
    pub axis2: Option<Axis>,
    pub observables: Vec<Observable>,
    pub branch: Option<usize>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.axis1.check()?;
        if let Some(a) = &self.axis2 {
            a.check()?;
        }
        if self.observables.is_empty() {
            return Err(CliError::Config("at least one observable is required".into()));
        }
        Ok(())
    }
}

/// Apply a grid point to `base`.
///
/// The mirror decay is kept as a fixed fraction of the input decay unless an
/// axis sets it, and a `decay_mirror_ratio` axis is applied after the input
/// decay so the ratio refers to the new value.
pub fn apply_point(base: &SystemParams, assignments: &[(&str, f64)]) -> Result<SystemParams> {
    let ratio = base.decay_mirror / base.decay_input;
    let mut sys = *base;
    let mut ordered: Vec<(&str, f64)> = assignments.to_vec();
    ordered.sort_by_key(|(name, _)| *name == "decay_mirror_ratio");
    for (name, value) in &ordered {
        sys.set(name, *value)?;
    }
    let sets_mirror = ordered.iter().any(|(n, _)| n.starts_with("decay_mirror"));
    if !sets_mirror {
        sys.decay_mirror = ratio * sys.decay_input;
    }
    sys.validate()?;
    Ok(sys)
}

/// Observables at one parameter point. `None` marks an undefined value.
pub fn evaluate(sys: &SystemParams, observables: &[Observable], branch: Option<usize>) -> Result<(bool, Vec<Option<f64>>)> {
    let lin = LinearizedSystem::from_params(sys, branch)?;
    let report = stability_of(&lin);
    let stable = report.is_stable();
    let cov = if stable && observables.iter().any(Observable::needs_covariance) {
        Some(steady_covariance(&lin, Method::Lyapunov)?)
    } else {
        None
    };
    let mut out = Vec::with_capacity(observables.len());
    for obs in observables {
        let value = match (obs, &cov) {
            (Observable::Stability, _) => Some(report.verdict.code() as f64),
            _ if !stable => None,
            (Observable::NEff, Some(v)) => Some(phonon_number_exact(v)?),
            (Observable::LogNeg, Some(v)) => Some(log_negativity(v)?.log_neg),
            (Observable::EtaMin, Some(v)) => Some(log_negativity(v)?.eta_min),
            (Observable::NEffWeak, _) => undefined_on_domain(phonon_number_weak_coupling(&lin))?,
            (Observable::Sqq(w), _) => {
                let s = lin.scaled();
                Some(position_spectrum(&s, *w, ThermalModel::Markov)?)
            }
            _ => unreachable!("covariance computed for stable points"),
        };
        out.push(value);
    }
    Ok((stable, out))
}

fn undefined_on_domain(r: photomech_core::Result<f64>) -> Result<Option<f64>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Domain(_) | Error::Unstable(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// One row per grid point, axis2-major; points run on the global rayon pool.
pub fn run_sweep(spec: &SweepSpec, base: &SystemParams) -> Result<Table> {
    spec.validate()?;
    let mut columns = vec![spec.axis1.name.clone()];
    if let Some(a) = &spec.axis2 {
        columns.push(a.name.clone());
    }
    columns.extend(spec.observables.iter().map(Observable::column));
    columns.push("stable".into());

    let outer: Vec<Option<f64>> = match &spec.axis2 {
        Some(a) => a.values.iter().copied().map(Some).collect(),
        None => vec![None],
    };
    let points: Vec<(f64, Option<f64>)> = outer
        .iter()
        .flat_map(|&y| spec.axis1.values.iter().map(move |&x| (x, y)))
        .collect();
    // Reject bad names or values before any computation.
    for &(x, y) in &points {
        point_params(spec, base, x, y)?;
    }
    let rows = points
        .par_iter()
        .map(|&(x, y)| {
            let sys = point_params(spec, base, x, y)?;
            let (stable, values) = evaluate(&sys, &spec.observables, spec.branch)?;
            let mut row = vec![Some(x)];
            if let Some(y) = y {
                row.push(Some(y));
            }
            row.extend(values);
            row.push(Some(if stable { 1.0 } else { 0.0 }));
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table {
        comments: Vec::new(),
        columns,
        rows,
    })
}

fn point_params(spec: &SweepSpec, base: &SystemParams, x: f64, y: Option<f64>) -> Result<SystemParams> {
    let mut assignments = vec![(spec.axis1.name.as_str(), x)];
    if let (Some(a), Some(y)) = (&spec.axis2, y) {
        assignments.push((a.name.as_str(), y));
    }
    apply_point(base, &assignments)
}
