use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use inspection_cli::{run, CliError, Command, Overrides, VariantChoice};

#[derive(Parser)]
#[command(name = "inspection", version, about = "Plan, simulate and analyze facility inspection timing")]
struct Cli {
    /// Run configuration (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory; overrides output.directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Simulation seed; overrides simulation.seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of simulation runs; overrides simulation.runs.
    #[arg(long, global = true)]
    runs: Option<u64>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Optimal inspection period, score trace and assumption report.
    Plan {
        #[arg(long, value_enum, default_value_t = VariantArg::Auto)]
        variant: VariantArg,
    },
    /// Monte-Carlo comparison of inspection rules.
    Simulate,
    /// Failure-penalty ranges for which each period is optimal.
    Sensitivity,
    /// Expected periods until failure or closure.
    HittingTime,
    /// Model, assumption and hitting-time checks.
    Validate,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    /// Both variants when c_tilde > 0, otherwise base only.
    Auto,
    Base,
    InspectionOutcome,
    Both,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match cli.command {
        Cmd::Plan { variant } => Command::Plan(match variant {
            VariantArg::Auto => VariantChoice::Auto,
            VariantArg::Base => VariantChoice::Base,
            VariantArg::InspectionOutcome => VariantChoice::InspectionOutcome,
            VariantArg::Both => VariantChoice::Both,
        }),
        Cmd::Simulate => Command::Simulate,
        Cmd::Sensitivity => Command::Sensitivity,
        Cmd::HittingTime => Command::HittingTime,
        Cmd::Validate => Command::Validate,
    };
    let Some(path) = cli.config else {
        eprintln!("error: --config <PATH> is required");
        return ExitCode::from(2);
    };
    let text = match std::fs::read_to_string(&path) {
        Ok(t) => t,
        Err(source) => return fail(CliError::Io { context: format!("reading {}", path.display()), source }),
    };
    let overrides = Overrides { out: cli.out, seed: cli.seed, runs: cli.runs };
    match run(command, &text, &overrides) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(e),
    }
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code())
}
