use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use photomech_cli::figures::{figure, spectrum_table};
use photomech_cli::sweep::{run_sweep, Axis, Observable, SweepSpec};
use photomech_cli::{load_params, record, CliError, Result, Table};
use photomech_core::covariance::{steady_covariance, Method};
use photomech_core::observables::{cooling_report, entanglement_report};
use photomech_core::oracle::{simulate_covariance, SimConfig};
use photomech_core::params::{
    derive_deformation_constant, laser_angular_frequency, skin_depth, thermal_diffusion_length, wave_speeds,
    MaterialParams,
};
use photomech_core::response::ThermalModel;
use photomech_core::stability::stability_of;
use photomech_core::steady_state::solve_operating_points;
use photomech_core::{params::derive_couplings, LinearizedSystem, SystemParams};

#[derive(Parser)]
#[command(name = "photomech", version, about = "Radiation-pressure and photothermal optomechanics")]
struct Cli {
    /// JSON parameter record; defaults to the built-in baseline.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override a parameter, e.g. --set detuning_norm=0.85. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    sets: Vec<String>,
    /// Write output here instead of stdout; metadata goes to <out>.meta.json.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Bistability branch, counted from the lowest effective detuning.
    #[arg(long, global = true)]
    branch: Option<usize>,
    /// Worker threads for sweeps.
    #[arg(long, global = true, env = "PHOTOMECH_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Material {
    Silicon,
    Gold,
}

#[derive(Clone, Copy, ValueEnum)]
enum CovMethod {
    Lyapunov,
    Quadrature,
}

#[derive(Clone, Copy, ValueEnum)]
enum Thermal {
    Markov,
    Exact,
}

#[derive(Subcommand)]
enum Command {
    /// Deformation constant and material length scales.
    Chi {
        #[arg(long, value_enum, default_value = "silicon")]
        material: Material,
        /// JSON material record, overrides --material.
        #[arg(long)]
        material_file: Option<PathBuf>,
    },
    /// Classical operating points on every branch.
    Steady,
    /// Stability verdict over a 1-D or 2-D grid.
    StabilityMap {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: Option<String>,
    },
    /// Spectral composition of the mirror motion.
    Spectrum {
        #[arg(long, default_value_t = 301)]
        points: usize,
        /// Upper frequency in units of ω_m.
        #[arg(long, default_value_t = 3.0)]
        max: f64,
        #[arg(long, value_enum, default_value = "markov")]
        thermal: Thermal,
    },
    /// Steady-state covariance of (δq, δp, δx, δy).
    Covariance {
        #[arg(long, value_enum, default_value = "lyapunov")]
        method: CovMethod,
    },
    /// Phonon number, temperature and equipartition.
    Cool,
    /// Logarithmic negativity.
    Entangle,
    /// Observables over a grid; axes are name=start:stop:n[:log] or name=v1,v2,...
    Sweep {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: Option<String>,
        /// Comma list of n_eff, n_eff_weak, E_N, eta_min, stability, S_qq@<ω/ω_m>.
        #[arg(long, default_value = "n_eff")]
        observable: String,
    },
    /// Named sweep regenerating one plot.
    Figure { name: String },
    /// Monte-Carlo check of the covariance.
    OracleCheck {
        #[arg(long, default_value_t = 8)]
        trajectories: usize,
        /// Averaging window in slowest decay times.
        #[arg(long, default_value_t = 200.0)]
        windows: f64,
    },
}

enum Output {
    Table(Table),
    Report(Value),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    let sys = load_params(cli.config.as_deref(), &cli.sets)?;
    let mut code = ExitCode::SUCCESS;
    let output = match &cli.command {
        Command::Chi { material, material_file } => Output::Report(chi(&sys, *material, material_file.as_deref())?),
        Command::Steady => Output::Table(steady(&sys)?),
        Command::StabilityMap { x, y } => Output::Table(sweep(&sys, cli.branch, x, y.as_deref(), "stability")?),
        Command::Spectrum { points, max, thermal } => {
            if *points < 2 || !(*max > 0.0) {
                return Err(CliError::Config("spectrum needs points ≥ 2 and max > 0".into()));
            }
            let model = match thermal {
                Thermal::Markov => ThermalModel::Markov,
                Thermal::Exact => ThermalModel::Exact,
            };
            Output::Table(spectrum_table(&sys, cli.branch, *points, *max, model)?)
        }
        Command::Covariance { method } => {
            let lin = LinearizedSystem::from_params(&sys, cli.branch)?;
            let method = match method {
                CovMethod::Lyapunov => Method::Lyapunov,
                CovMethod::Quadrature => Method::Quadrature,
            };
            let v = steady_covariance(&lin, method)?;
            let (nu_minus, nu_plus) = v.symplectic_eigenvalues();
            match cli.format {
                Some(Format::Csv) => Output::Table(Table {
                    comments: vec!["rows and columns ordered dq, dp, dx, dy".into()],
                    columns: ["v_dq", "v_dp", "v_dx", "v_dy"].map(String::from).to_vec(),
                    rows: (0..4).map(|i| (0..4).map(|j| Some(v.v[(i, j)])).collect()).collect(),
                }),
                _ => Output::Report(json!({
                    "v": (0..4).map(|i| (0..4).map(|j| v.v[(i, j)]).collect::<Vec<_>>()).collect::<Vec<_>>(),
                    "symplectic_eigenvalues": [nu_minus, nu_plus],
                    "physical": v.is_physical(),
                })),
            }
        }
        Command::Cool => {
            let r = cooling_report(&LinearizedSystem::from_params(&sys, cli.branch)?)?;
            Output::Report(serde_json::to_value(r).expect("report serializes"))
        }
        Command::Entangle => {
            let r = entanglement_report(&LinearizedSystem::from_params(&sys, cli.branch)?)?;
            Output::Report(serde_json::to_value(r).expect("report serializes"))
        }
        Command::Sweep { x, y, observable } => Output::Table(sweep(&sys, cli.branch, x, y.as_deref(), observable)?),
        Command::Figure { name } => {
            if !cli.sets.is_empty() || cli.config.is_some() {
                eprintln!("note: figure recipes use their own parameters; --config and --set are ignored");
            }
            Output::Table(figure(name)?)
        }
        Command::OracleCheck { trajectories, windows } => {
            let lin = LinearizedSystem::from_params(&sys, cli.branch)?;
            let cfg = SimConfig::for_system(&lin, *windows, *trajectories, cli.seed)?;
            let est = simulate_covariance(&lin, &cfg)?;
            let exact = steady_covariance(&lin, Method::Lyapunov)?;
            let z = est.max_abs_z(&exact);
            if !(z <= 3.0) {
                code = ExitCode::from(3);
            }
            Output::Report(json!({
                "max_abs_z": z,
                "samples": est.samples,
                "config": cfg,
                "pass": z <= 3.0,
            }))
        }
    };
    emit(cli, &sys, output)?;
    Ok(code)
}

fn chi(sys: &SystemParams, material: Material, file: Option<&Path>) -> Result<Value> {
    let mat = match file {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            })?;
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        }
        None => match material {
            Material::Silicon => MaterialParams::silicon_gold_coated(),
            Material::Gold => MaterialParams::gold(),
        },
    };
    let w_l = laser_angular_frequency(sys.laser_wavelength);
    let (c_l, c_t) = wave_speeds(&mat)?;
    Ok(json!({
        "chi": derive_deformation_constant(&mat, sys.laser_wavelength)?,
        "skin_depth": skin_depth(mat.electrical_conductivity, w_l)?,
        "thermal_length_at_laser": thermal_diffusion_length(&mat, w_l)?,
        "thermal_length_at_mech": thermal_diffusion_length(&mat, sys.mech_freq)?,
        "wave_speed_longitudinal": c_l,
        "wave_speed_transverse": c_t,
    }))
}

fn steady(sys: &SystemParams) -> Result<Table> {
    let derived = derive_couplings(sys)?;
    let points = solve_operating_points(sys, &derived)?;
    let wm = sys.mech_freq;
    let rows = points
        .iter()
        .map(|op| {
            let lin = LinearizedSystem::new(sys, &derived, op);
            vec![
                Some(op.branch_index as f64),
                Some(op.alpha_s),
                Some(op.q_s),
                Some(op.delta_eff / wm),
                Some(op.coupling_g / wm),
                Some(op.degenerate as u8 as f64),
                Some(stability_of(&lin).verdict.code() as f64),
            ]
        })
        .collect();
    Ok(Table {
        comments: vec!["delta and G in units of omega_m; stability 1 stable, 0 unstable, -1 marginal".into()],
        columns: ["branch", "alpha_s", "q_s", "delta_norm", "coupling_norm", "degenerate", "stability"]
            .map(String::from)
            .to_vec(),
        rows,
    })
}

fn sweep(sys: &SystemParams, branch: Option<usize>, x: &str, y: Option<&str>, observables: &str) -> Result<Table> {
    let spec = SweepSpec {
        axis1: Axis::parse(x)?,
        axis2: y.map(Axis::parse).transpose()?,
        observables: observables.split(',').map(Observable::parse).collect::<Result<_>>()?,
        branch,
    };
    run_sweep(&spec, sys)
}

fn emit(cli: &Cli, sys: &SystemParams, output: Output) -> Result<()> {
    let format = cli.format.unwrap_or(match output {
        Output::Table(_) => Format::Csv,
        Output::Report(_) => Format::Json,
    });
    let text = match (&output, format) {
        (Output::Table(t), Format::Csv) => t.to_csv(),
        (Output::Table(t), Format::Json) => pretty(&t.to_json()),
        (Output::Report(v), Format::Json) => pretty(v),
        (Output::Report(v), Format::Csv) => report_csv(v),
    };
    let Some(path) = &cli.out else {
        print!("{text}");
        return Ok(());
    };
    write(path, &text)?;
    let meta = json!({
        "program": "photomech",
        "version": env!("CARGO_PKG_VERSION"),
        "arguments": std::env::args().skip(1).collect::<Vec<_>>(),
        "parameters": serde_json::to_value(sys).expect("parameters serialize"),
        "seed": cli.seed,
        "branch": cli.branch,
    });
    let mut meta_path = path.clone().into_os_string();
    meta_path.push(".meta.json");
    write(Path::new(&meta_path), &pretty(&meta))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serializes");
    s.push('\n');
    s
}

/// Flat numeric/boolean report as a one-row table; other fields are dropped.
fn report_csv(v: &Value) -> String {
    let Value::Object(map) = v else {
        return pretty(v);
    };
    let fields: Vec<(&str, Option<f64>)> = map
        .iter()
        .filter_map(|(k, v)| match v {
            Value::Number(n) => Some((k.as_str(), n.as_f64())),
            Value::Bool(b) => Some((k.as_str(), Some(*b as u8 as f64))),
            Value::Null => Some((k.as_str(), None)),
            _ => None,
        })
        .collect();
    record(&fields).to_csv()
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}
