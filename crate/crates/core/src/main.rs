use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use contextual_wv::harness::{
    builtin, builtin_descriptions, chsh_demo, emit_report, load_scenario, render_table, run_identity_suite_with_tolerance,
    seed_override, BasisSpec, Report, ReportFormat, Scenario, BUILTIN_NAMES,
};
use contextual_wv::steering::total_variance_decomposition;
use contextual_wv::Error;

/// Weak values as contextual values: identity checks, steering tables and the
/// CHSH demonstration.
#[derive(Parser)]
#[command(name = "cwv", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the identity suite on a scenario file or built-in.
    ///
    /// Exit status: 0 when every check passes or is skipped, 1 when any check
    /// fails or errors, 2 when the scenario cannot be loaded.
    Verify {
        /// Path to a scenario JSON file, or a built-in name.
        scenario: String,
        #[arg(long, default_value = "text")]
        format: ReportFormat,
        /// Override the identity tolerance.
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Print the context table of a scenario for a reference basis.
    Steer {
        scenario: String,
        /// Basis name (computational, fourier, diagonal, circular, random) or
        /// inline JSON such as '{"random": 7}'.
        #[arg(long)]
        nu_basis: String,
        #[arg(long, default_value = "text")]
        format: ReportFormat,
    },
    /// CHSH correlations of the singlet from steered projector weak values.
    ///
    /// Angles a0,a1 belong to the system analyzers and b0,b1 to the
    /// reference, with sigma(t) = cos 2t sigma_z + sin 2t sigma_x. For the
    /// pair (a_i, b_j) the reference is measured in the eigenbasis of
    /// sigma(b_j) and the system is post-selected in the eigenbasis of the
    /// other system analyzer sigma(a_{1-i}). Default: 0, pi/4, pi/8, 3pi/8.
    Chsh {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        angles: Option<Vec<f64>>,
        #[arg(long, default_value = "text")]
        format: ReportFormat,
    },
    /// List the built-in scenarios.
    ListBuiltins,
    /// Print a scenario as JSON after validation.
    Echo { scenario: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn resolve(target: &str) -> Result<Scenario, Error> {
    let scenario = if BUILTIN_NAMES.contains(&target) && !Path::new(target).exists() {
        builtin(target)?
    } else {
        load_scenario(target)?
    };
    match seed_override() {
        Some(seed) => scenario.with_seed(seed),
        None => Ok(scenario),
    }
}

fn emit(report: &Report, format: ReportFormat) -> Result<ExitCode, Error> {
    let mut out = std::io::stdout().lock();
    emit_report(report, format, &mut out)?;
    Ok(if report.all_passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn run(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Verify { scenario, format, tolerance } => {
            let s = resolve(&scenario)?;
            if let Some(t) = tolerance {
                if !(t.is_finite() && t >= 0.0) {
                    return Err(Error::Validation { field: "--tolerance".into(), reason: "must be non-negative".into() });
                }
            }
            let report = run_identity_suite_with_tolerance(&s, tolerance.unwrap_or_else(|| s.tolerance()));
            emit(&report, format)
        }
        Command::Steer { scenario, nu_basis, format } => {
            let s = resolve(&scenario)?.with_nu_basis(nu_basis.parse::<BasisSpec>()?)?;
            let nu = s.nu_basis().expect("nu basis was just set");
            let (table, total) = total_variance_decomposition(&s.bipartite(), s.m_basis(), nu, s.observable())?;
            let mut out = std::io::stdout().lock();
            out.write_all(render_table(&table, total, format).as_bytes())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Chsh { angles, format } => {
            let angles = match angles.as_deref() {
                None => None,
                Some(&[a0, a1, b0, b1]) => Some([a0, a1, b0, b1]),
                Some(v) => {
                    let reason = format!("expected 4 comma-separated angles, found {}", v.len());
                    return Err(Error::Validation { field: "--angles".into(), reason });
                }
            };
            emit(&chsh_demo(angles)?, format)
        }
        Command::ListBuiltins => {
            let mut out = std::io::stdout().lock();
            for (name, description) in builtin_descriptions() {
                writeln!(out, "{name:<22} {description}")?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Echo { scenario } => {
            let s = resolve(&scenario)?;
            std::io::stdout().lock().write_all(s.to_json().as_bytes())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}
