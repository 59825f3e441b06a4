//! Command-line front end.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure (a
//! `diagnostics.json` with the last valid state is written to the output
//! directory).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use shallow_junctions::config::{parse_config, ScenarioConfig, StrategyName};
use shallow_junctions::presets::{default_patch_size, preset, PRESETS};
use shallow_junctions::simulation::{run, write_gauges_csv, RunFailure};
use shallow_junctions::studies::{convergence_order, grid_independence, SmoothProblem};
use shallow_junctions::Error;

#[derive(Parser)]
#[command(name = "swnet", version, about = "Shallow-water channel networks with 2D junction treatments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write gauges and a report.
    Run(RunArgs),
    /// List the built-in scenarios.
    PresetList {
        /// Also write every preset as JSON into this directory.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Grid-independence table of a gauge integral on the 2D reference solver.
    GridStudy(GridArgs),
    /// Observed order of accuracy of the 1D scheme on a smooth problem.
    Convergence(ConvArgs),
    /// Parse and validate a scenario file.
    Validate { config: PathBuf },
}

#[derive(Args)]
struct Source {
    /// Scenario file.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in scenario name.
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, short, default_value = "out")]
    out: PathBuf,
    /// Scheme order, 1 or 2.
    #[arg(long)]
    order: Option<u8>,
    /// Use this strategy at every junction: method_a, method_b or psfp.
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long)]
    cfl: Option<f64>,
    /// Method B patch element size when the strategy override needs one.
    #[arg(long)]
    patch_size: Option<f64>,
    /// Run the 2D reference solver with this element size instead.
    #[arg(long)]
    reference: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
}

#[derive(Args)]
struct GridArgs {
    #[command(flatten)]
    source: Source,
    /// Element sizes, coarsest first.
    #[arg(long, value_delimiter = ',', default_value = "0.16,0.08,0.04,0.02")]
    sizes: Vec<f64>,
    #[arg(long)]
    gauge: Option<String>,
    #[arg(long, short, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct ConvArgs {
    #[arg(long, default_value_t = 4)]
    levels: usize,
    #[arg(long, default_value_t = 2)]
    order: u8,
    /// Cells on the coarsest level.
    #[arg(long, default_value_t = 50)]
    cells: usize,
    #[arg(long, short, default_value = "out")]
    out: PathBuf,
}

enum Failure {
    Config(Error),
    Numerical(Box<RunFailure>, PathBuf),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Config(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

fn load(source: &Source) -> Result<ScenarioConfig, Error> {
    match (&source.config, &source.preset) {
        (Some(path), _) => parse_config(path),
        (None, Some(name)) => preset(name),
        (None, None) => Err(Error::ConfigInvalid(vec!["give --config <file> or --preset <name>".into()])),
    }
}

fn run_failure(f: Box<RunFailure>, out: &Path) -> Failure {
    if f.error.is_config() {
        Failure::Config(f.error)
    } else {
        Failure::Numerical(f, out.to_path_buf())
    }
}

fn cmd_run(a: RunArgs) -> Result<(), Failure> {
    let mut cfg = load(&a.source)?;
    if let Some(o) = a.order {
        cfg.numerics.order = o;
    }
    if let Some(c) = a.cfl {
        cfg.numerics.cfl_1d = c;
    }
    if let Some(t) = a.t_end {
        cfg.outputs.t_end = t;
    }
    if let Some(s) = &a.strategy {
        let strategy = StrategyName::parse(s).ok_or_else(|| Error::ConfigInvalid(vec![format!("unknown strategy '{s}'")]))?;
        let es = a.patch_size.unwrap_or_else(|| default_patch_size(&cfg));
        cfg = cfg.with_strategy(strategy, es);
    }
    if let Some(h) = a.reference {
        cfg = cfg.as_reference(h);
    }
    cfg.validate()?;
    fs::create_dir_all(&a.out)?;
    fs::write(a.out.join("scenario.json"), cfg.to_json())?;
    let rep = run(&cfg).map_err(|f| run_failure(f, &a.out))?;
    write_gauges_csv(&rep.gauges, fs::File::create(a.out.join("gauges.csv"))?)?;
    let mut meta = serde_json::to_value(&rep).expect("report serializes");
    if let Some(m) = meta.as_object_mut() {
        m.remove("gauges");
        m.insert("assumed".into(), json!(cfg.metadata.assumed));
    }
    fs::write(a.out.join("report.json"), serde_json::to_string_pretty(&meta).expect("json"))?;
    println!(
        "{}: {} steps to t = {} s, {} 1D + {} 2D cells, {:.3} s wall clock, volume error {:.2e}",
        rep.name, rep.steps, rep.t_final, rep.cells_1d, rep.cells_2d, rep.timings.total, rep.volume_error
    );
    Ok(())
}

fn cmd_grid(a: GridArgs) -> Result<(), Failure> {
    let cfg = match (&a.source.config, &a.source.preset) {
        (None, None) => preset("appB_gridstudy")?,
        _ => load(&a.source)?,
    };
    let gauge = match a.gauge.clone().or_else(|| cfg.outputs.gauges.first().map(|g| g.id.clone())) {
        Some(g) => g,
        None => return Err(Error::ConfigInvalid(vec!["grid study needs a gauge".into()]).into()),
    };
    let study = grid_independence(&cfg, &a.sizes, &gauge).map_err(|f| run_failure(f, &a.out))?;
    fs::create_dir_all(&a.out)?;
    let table = study.to_csv();
    fs::write(a.out.join("grid_study.csv"), &table)?;
    print!("{table}");
    Ok(())
}

fn cmd_convergence(a: ConvArgs) -> Result<(), Failure> {
    let problem = SmoothProblem { cells: a.cells, ..SmoothProblem::default() };
    let r = convergence_order(&problem, a.levels, a.order)?;
    fs::create_dir_all(&a.out)?;
    let table = r.to_csv();
    fs::write(a.out.join(format!("convergence_order{}.csv", a.order)), &table)?;
    print!("{table}");
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::PresetList { emit } => (|| {
            for (name, desc) in PRESETS {
                println!("{name:<22} {desc}");
                if let Some(dir) = &emit {
                    fs::create_dir_all(dir)?;
                    fs::write(dir.join(format!("{name}.json")), preset(name)?.to_json())?;
                }
            }
            Ok(())
        })(),
        Command::GridStudy(a) => cmd_grid(a),
        Command::Convergence(a) => cmd_convergence(a),
        Command::Validate { config } => parse_config(&config).map(|c| println!("{}: valid", c.name)).map_err(Failure::from),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(f, out)) => {
            eprintln!("error: {f}");
            let path = out.join("diagnostics.json");
            let diag = json!({
                "error": f.error.to_string(),
                "snapshot": f.snapshot,
                "report": f.report,
            });
            match fs::create_dir_all(&out).and_then(|_| fs::write(&path, serde_json::to_string_pretty(&diag).expect("json"))) {
                Ok(()) => eprintln!("diagnostics written to {}", path.display()),
                Err(e) => eprintln!("could not write diagnostics: {e}"),
            }
            ExitCode::from(3)
        }
    }
}
