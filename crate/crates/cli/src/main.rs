use std::process::ExitCode;

use gfista_cli::args::{parse_cli, Command, VerifyArgs};
use gfista_cli::experiment::{reference_only, run_experiment, ExperimentConfig, ExperimentError};
use gfista_cli::trace_csv::{first_violation, read_csv};

/// Exit status for a gap above its certificate bound (2 is taken by usage
/// errors).
const EXIT_CERTIFICATE: u8 = 3;

fn verify(args: &VerifyArgs) -> anyhow::Result<ExitCode> {
    let mut status = ExitCode::SUCCESS;
    for path in &args.csv {
        let records = read_csv(path)?;
        match first_violation(&records, args.slack) {
            Some(r) => {
                println!(
                    "{}: certificate violated at iteration {} (gap {:e} > bound {:e})",
                    path.display(),
                    r.k,
                    r.gap.unwrap_or(f64::NAN),
                    r.certificate_bound.unwrap_or(f64::NAN)
                );
                status = ExitCode::from(EXIT_CERTIFICATE);
            }
            None => println!("{}: ok ({} rows)", path.display(), records.len()),
        }
    }
    Ok(status)
}

fn run(config: ExperimentConfig) -> anyhow::Result<ExitCode> {
    match run_experiment(&config) {
        Ok(summary) => {
            println!("reference objective {:.12e}", summary.reference_objective);
            for v in &summary.variants {
                let gap = v.final_gap.map_or_else(|| "-".into(), |g| format!("{g:.3e}"));
                println!(
                    "{:<13} k={:<5} F={:.12e} gap={gap} -> {}",
                    v.variant.name(),
                    v.iterations,
                    v.final_objective,
                    v.csv.display()
                );
            }
            println!("summary -> {}", summary.summary_csv.display());
            Ok(ExitCode::SUCCESS)
        }
        Err(e @ ExperimentError::CertificateViolation { .. }) => {
            eprintln!("error: {e}");
            Ok(ExitCode::from(EXIT_CERTIFICATE))
        }
        Err(e) => Err(e.into()),
    }
}

fn main() -> ExitCode {
    let cli = match parse_cli(std::env::args_os()) {
        Ok(cli) => cli,
        Err(e) => match e.downcast::<clap::Error>() {
            Ok(clap_error) => clap_error.exit(),
            Err(other) => {
                eprintln!("error: {other}");
                return ExitCode::FAILURE;
            }
        },
    };
    let outcome = match cli.command {
        Command::Run(args) => run(args.into()),
        Command::Verify(args) => verify(&args),
        Command::Reference(args) => reference_only(&args.into()).map(|(objective, path)| {
            println!("reference objective {objective:.17e}");
            if let Some(path) = path {
                println!("cached at {}", path.display());
            }
            ExitCode::SUCCESS
        }).map_err(Into::into),
    };
    outcome.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::FAILURE
    })
}
