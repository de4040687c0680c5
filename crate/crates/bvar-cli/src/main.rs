//! `bvar` command-line tool: estimate classical and Minnesota-prior
//! Bayesian VARs, select lag orders, test stability, compute impulse
//! responses and write the full report bundle.

mod config;
mod pipeline;

use std::path::PathBuf;
use std::process::ExitCode;

use bvar_core::{
    build_design, fit_bvar, fit_ols, select_lag, stability, Criterion, MinnesotaHyper, VarSpec,
};
use clap::{Parser, Subcommand};

use config::{parse_config, RunConfig};
use pipeline::{PipelineError, Stage};

#[derive(Parser)]
#[command(name = "bvar", version, about = "Small-sample VAR/BVAR estimation and diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print per-variable summary statistics of the input panel
    Describe(CommonArgs),
    /// Print the lag-order selection table
    SelectLag(CommonArgs),
    /// Print OLS and BVAR coefficient tables
    Fit(CommonArgs),
    /// Print companion roots and the stability verdict per estimator
    Stability(CommonArgs),
    /// Print impulse responses of the BVAR estimate in long format
    Irf(CommonArgs),
    /// Run the full pipeline and write all artifacts to the output directory
    Report(CommonArgs),
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Path to the JSON run configuration
    #[arg(long)]
    config: PathBuf,
    /// Override the output directory from the config
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

fn load_config(args: &CommonArgs) -> Result<RunConfig, PipelineError> {
    let text = std::fs::read_to_string(&args.config).map_err(|e| {
        PipelineError::new(Stage::Io, format!("reading {}: {e}", args.config.display()))
    })?;
    let mut config = parse_config(&text)?;
    if let Some(dir) = &args.output_dir {
        config.output = dir.clone();
    }
    Ok(config)
}

fn chosen_spec(config: &RunConfig, panel: &bvar_core::SeriesPanel) -> Result<VarSpec, PipelineError> {
    let wrap = |e: bvar_core::Error| PipelineError::new(Stage::Estimation, e.to_string());
    let base = VarSpec::new(1, config.constant, panel.names().to_vec()).map_err(wrap)?;
    let d = match config.d {
        Some(d) => d,
        None => {
            let table = select_lag(panel, &base, config.d_max).map_err(wrap)?;
            table.winner(Criterion::Aic).max(1)
        }
    };
    VarSpec::new(d, config.constant, panel.names().to_vec()).map_err(wrap)
}

fn execute(command: &Command) -> Result<(), PipelineError> {
    let est_err = |e: bvar_core::Error| PipelineError::new(Stage::Estimation, e.to_string());
    let diag_err = |e: bvar_core::Error| PipelineError::new(Stage::Diagnostics, e.to_string());
    match command {
        Command::Describe(args) => {
            let config = load_config(args)?;
            let panel = pipeline::ingest(&config)?;
            print!("{}", pipeline::describe_csv(&panel));
        }
        Command::SelectLag(args) => {
            let config = load_config(args)?;
            let panel = pipeline::ingest(&config)?;
            let base =
                VarSpec::new(1, config.constant, panel.names().to_vec()).map_err(est_err)?;
            let table = select_lag(&panel, &base, config.d_max).map_err(est_err)?;
            print!("{}", pipeline::selection_csv(&table));
        }
        Command::Fit(args) => {
            let config = load_config(args)?;
            let panel = pipeline::ingest(&config)?;
            let spec = chosen_spec(&config, &panel)?;
            let design =
                build_design(&panel, spec.d, spec.constant, None).map_err(est_err)?;
            match fit_ols(&design, &spec) {
                Ok(est) => {
                    println!("# ols");
                    print!("{}", pipeline::coefficients_csv(&est));
                }
                Err(e) => println!("# ols unavailable: {e}"),
            }
            let hyper = MinnesotaHyper::from(&config.hyper);
            let (bvar, _) = fit_bvar(&panel, &spec, &hyper).map_err(est_err)?;
            println!("# bvar");
            print!("{}", pipeline::coefficients_csv(&bvar));
        }
        Command::Stability(args) => {
            let config = load_config(args)?;
            let panel = pipeline::ingest(&config)?;
            let spec = chosen_spec(&config, &panel)?;
            let design =
                build_design(&panel, spec.d, spec.constant, None).map_err(est_err)?;
            if let Ok(est) = fit_ols(&design, &spec) {
                let rep = stability(&est).map_err(diag_err)?;
                println!("# ols stable={}", rep.stable);
                print!("{}", pipeline::roots_csv(&rep));
            }
            let hyper = MinnesotaHyper::from(&config.hyper);
            let (bvar, _) = fit_bvar(&panel, &spec, &hyper).map_err(est_err)?;
            let rep = stability(&bvar).map_err(diag_err)?;
            println!("# bvar stable={}", rep.stable);
            print!("{}", pipeline::roots_csv(&rep));
        }
        Command::Irf(args) => {
            let config = load_config(args)?;
            let panel = pipeline::ingest(&config)?;
            let spec = chosen_spec(&config, &panel)?;
            let hyper = MinnesotaHyper::from(&config.hyper);
            let (bvar, _) = fit_bvar(&panel, &spec, &hyper).map_err(est_err)?;
            let ir = bvar_core::irf(&bvar, config.horizon, config.orthogonalized)
                .map_err(diag_err)?;
            print!("{}", pipeline::irf_csv(&ir, panel.names()));
        }
        Command::Report(args) => {
            let config = load_config(args)?;
            let written = pipeline::run_pipeline(&config)?;
            for path in written {
                println!("{}", path.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.stage.exit_code() as u8)
        }
    }
}
