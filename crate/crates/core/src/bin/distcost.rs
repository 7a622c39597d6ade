use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use disturbance_cost::experiments::{
    bound_accuracy, energy_summary, metrics_sweep, stabilize, write_bound_accuracy, write_metrics_sweep,
    write_stabilize, write_summary,
};
use disturbance_cost::models::{self, ModelSpec};
use disturbance_cost::{build_bundle_with, DisturbanceClass, Error, NumericSettings, Result, RunConfig};

#[derive(Parser)]
#[command(
    name = "distcost",
    version,
    about = "Energy cost of stabilising a linear system under bounded disturbances"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the nominal and disturbed minimum-energy controls.
    Stabilize(RunArgs),
    /// Tightness of the worst-case energy bound across horizons.
    BoundAccuracy(RunArgs),
    /// Additive and multiplicative metric bounds over the (R, t_f) grid.
    MetricsSweep(RunArgs),
    /// Print the closed-form energies for one task.
    Energy(RunArgs),
    /// Inspect, validate or export model files.
    #[command(subcommand)]
    Model(ModelCommand),
}

#[derive(Subcommand)]
enum ModelCommand {
    /// Print a model as JSON with its Gramian condition at a horizon.
    Inspect {
        model: String,
        #[arg(long, default_value_t = 1.0)]
        tf: f64,
    },
    /// Check a model file parses and is controllable.
    Validate { path: PathBuf },
    /// Write a builtin model to a file.
    Save { name: String, path: PathBuf },
}

#[derive(Args, Clone)]
struct RunArgs {
    /// JSON config file; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Builtin model name or path to a model file.
    #[arg(long)]
    model: Option<String>,
    /// Initial state, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x0: Option<Vec<f64>>,
    #[arg(long)]
    tf: Option<f64>,
    /// Disturbance bound w̄.
    #[arg(long)]
    wbar: Option<f64>,
    #[arg(long = "R-grid", value_delimiter = ',')]
    r_grid: Option<Vec<f64>>,
    #[arg(long = "tf-grid", value_delimiter = ',')]
    tf_grid: Option<Vec<f64>>,
    /// Disturbance classes, comma separated: zero, constant, sinusoid, random.
    #[arg(long)]
    disturbances: Option<String>,
    #[arg(long)]
    steps: Option<usize>,
    /// Sampled initial states and disturbances per grid point.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
}

impl RunArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(v) = &self.model {
            cfg.model = v.clone();
        }
        if let Some(v) = &self.x0 {
            cfg.x0 = v.clone();
        }
        if let Some(v) = self.tf {
            cfg.t_f = v;
        }
        if let Some(v) = self.wbar {
            cfg.w_bar = v;
        }
        if let Some(v) = &self.r_grid {
            cfg.r_grid = v.clone();
        }
        if let Some(v) = &self.tf_grid {
            cfg.tf_grid = v.clone();
        }
        if let Some(v) = &self.disturbances {
            cfg.disturbances = v.split(',').map(DisturbanceClass::parse_label).collect::<Result<_>>()?;
        }
        if let Some(v) = self.steps {
            cfg.steps = v;
        }
        if let Some(v) = self.samples {
            cfg.samples = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = &self.out {
            cfg.out = v.clone();
        }
        if let Some(v) = self.workers {
            cfg.workers = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Stabilize(args) => {
            let cfg = args.resolve()?;
            let out = stabilize(&cfg.load_system()?, &cfg)?;
            for run in &out.runs {
                println!(
                    "{:<10} residual {:.3e}  energy {:.6} (closed form {:.6})",
                    run.label, run.terminal_residual, run.simulated_energy, run.closed_form_energy
                );
            }
            println!("E_N {:.6}  E_D_bound {:.6}", out.bound.e_n, out.bound.e_d_bound);
            for p in write_stabilize(&out, &cfg.out)? {
                println!("wrote {}", p.display());
            }
        }
        Command::BoundAccuracy(args) => {
            let cfg = args.resolve()?;
            let rows = bound_accuracy(&cfg.load_system()?, &cfg)?;
            std::fs::create_dir_all(&cfg.out)?;
            let csv = cfg.out.join("bound_accuracy.csv");
            write_bound_accuracy(&rows, &csv)?;
            write_summary(&rows, &cfg.out.join("summary.json"))?;
            println!("wrote {}", csv.display());
        }
        Command::MetricsSweep(args) => {
            let cfg = args.resolve()?;
            let rows = metrics_sweep(&cfg.load_system()?, &cfg)?;
            std::fs::create_dir_all(&cfg.out)?;
            let csv = cfg.out.join("metrics_sweep.csv");
            write_metrics_sweep(&rows, &csv)?;
            write_summary(&rows, &cfg.out.join("summary.json"))?;
            println!("wrote {}", csv.display());
        }
        Command::Energy(args) => {
            let cfg = args.resolve()?;
            let summary = energy_summary(&cfg.load_system()?, &cfg)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&summary).expect("summary serialises")
            );
        }
        Command::Model(cmd) => match cmd {
            ModelCommand::Inspect { model, tf } => {
                let is_builtin = models::builtin(&model).is_some();
                let cfg = RunConfig {
                    model,
                    ..Default::default()
                };
                let sys = cfg.load_system()?;
                let bundle = build_bundle_with(&sys, tf, &NumericSettings::default())?;
                let spec = if is_builtin {
                    models::admire_spec()
                } else {
                    ModelSpec::from_system(&sys)
                };
                println!("{}", serde_json::to_string_pretty(&spec).expect("spec serialises"));
                println!(
                    "gramian condition at t_f = {tf}: {:.4e}",
                    bundle.spec.max_eigenvalue() / bundle.spec.min_eigenvalue()
                );
            }
            ModelCommand::Validate { path } => {
                let sys = models::load_model(&path)?;
                println!(
                    "{}: {} states, {} inputs, controllable",
                    path.display(),
                    sys.state_dim(),
                    sys.input_dim()
                );
            }
            ModelCommand::Save { name, path } => {
                let spec = match name.to_ascii_lowercase().as_str() {
                    "admire" => models::admire_spec(),
                    _ => return Err(Error::Config(format!("no builtin model named {name:?}"))),
                };
                models::write_spec(&spec, &path)?;
                println!("wrote {}", path.display());
            }
        },
    }
    Ok(())
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Parse { .. } => 3,
        Error::Io(_) => 5,
        e if e.is_numerical() => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
