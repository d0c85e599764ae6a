use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use persistack::compare::{compare_command, compare_dataset, format_table};
use persistack::config::ConfigLayer;
use persistack::error::{CliError, Stage};
use persistack::pipeline::run_pipeline;

#[derive(Parser)]
#[command(
    name = "persistack",
    version,
    about = "Persistent structure extraction from microscopy z-stacks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract the persistent structure of a stack and write its artifacts.
    Run(RunArgs),
    /// Compare automatic tracings with manual reference masks.
    Compare(CompareArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Multi-page TIFF, a single image, a directory of slices or a glob.
    #[arg(long)]
    input: Option<String>,
    /// TOML file with any of the run options; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Median filter radius in pixels.
    #[arg(long, allow_negative_numbers = true)]
    radius: Option<i64>,
    /// square or disc.
    #[arg(long)]
    shape: Option<String>,
    /// 4 or 8.
    #[arg(long)]
    connectivity: Option<u32>,
    /// acquisition or reversed.
    #[arg(long)]
    slice_order: Option<String>,
    /// huang or fixed:<level>.
    #[arg(long)]
    threshold: Option<String>,
    /// Comma-separated artifacts: mask, barcode, barcode-plot, colors,
    /// report, projection, filtered, thresholded, levels.
    #[arg(long)]
    emit: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long, required_unless_present = "dataset", requires = "manual")]
    auto: Option<PathBuf>,
    #[arg(long, required_unless_present = "dataset", requires = "auto")]
    manual: Option<PathBuf>,
    /// Directory with `auto/` and `manual/` subdirectories of equally named masks.
    #[arg(long, conflicts_with_all = ["auto", "manual"])]
    dataset: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn run(args: RunArgs) -> Result<ExitCode, CliError> {
    let flags = ConfigLayer {
        input: args.input,
        radius: args.radius,
        shape: args.shape,
        connectivity: args.connectivity,
        slice_order: args.slice_order,
        threshold: args.threshold,
        emit: args.emit.map(|e| vec![e]),
        out: args.out,
    };
    let file = match &args.config {
        Some(path) => ConfigLayer::from_toml_file(path).map_err(|e| e.in_stage(Stage::Config))?,
        None => ConfigLayer::default(),
    };
    let config = flags.over(file).resolve().map_err(|e| e.in_stage(Stage::Config))?;
    let report = run_pipeline(&config)?;
    info!(
        "{} components, {} persistent, births {:?}",
        report.component_count, report.persistent_components, report.births_histogram
    );
    for path in &report.artifacts {
        println!("{}", path.display());
    }
    for w in &report.warnings {
        warn!("{w}");
    }
    Ok(if report.has_warnings() {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

fn compare(args: CompareArgs) -> Result<ExitCode, CliError> {
    let report = match (&args.dataset, &args.auto, &args.manual) {
        (Some(dir), _, _) => compare_dataset(dir, &args.out)?,
        (None, Some(auto), Some(manual)) => compare_command(auto, manual, &args.out)?,
        _ => unreachable!("clap enforces the argument groups"),
    };
    print!("{}", format_table(&report));
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Compare(args) => compare(args),
    };
    result.unwrap_or_else(|e| {
        let mut msg = e.to_string();
        let mut source = std::error::Error::source(&e);
        while let Some(s) = source {
            if !msg.contains(&s.to_string()) {
                msg.push_str(&format!(": {s}"));
            }
            source = s.source();
        }
        eprintln!("error: {msg}");
        ExitCode::FAILURE
    })
}
