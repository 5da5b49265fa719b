use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use landau_lab::{run_study, RunOptions, StudyConfig, StudyKind};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    EulerLimit,
    AcousticLimit,
    VerifyOperators,
    BurnettTable,
    FluidRun,
}

impl Command {
    fn kind(self) -> StudyKind {
        match self {
            Command::EulerLimit => StudyKind::EulerLimit,
            Command::AcousticLimit => StudyKind::AcousticLimit,
            Command::VerifyOperators => StudyKind::VerifyOperators,
            Command::BurnettTable => StudyKind::BurnettTable,
            Command::FluidRun => StudyKind::FluidRun,
        }
    }
}

/// Run a Landau hydrodynamic-limit study and write its report.
#[derive(Debug, Parser)]
#[command(name = "landau-lab", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Study configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output root; the study writes to `<out>/<name>/`.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Worker threads (defaults to LANDAU_LAB_THREADS, then all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Skip points whose reports were written by the same configuration.
    #[arg(long)]
    resume: bool,
}

fn threads(cli: &Cli) -> Result<Option<usize>, String> {
    if let Some(n) = cli.threads {
        return Ok(Some(n));
    }
    match std::env::var("LANDAU_LAB_THREADS") {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| format!("LANDAU_LAB_THREADS must be a positive integer, got {s:?}")),
        Err(_) => Ok(None),
    }
}

fn run(cli: &Cli) -> Result<bool, String> {
    if let Some(n) = threads(cli)? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    let cfg = StudyConfig::load(&cli.config).map_err(|e| e.to_string())?;
    if cfg.study != cli.command.kind() {
        return Err(format!(
            "{} describes a {} study, not {}",
            cli.config.display(),
            cfg.study,
            cli.command.kind()
        ));
    }
    let opts = RunOptions {
        out: cli.out.clone(),
        resume: cli.resume,
    };
    let report = run_study(&cfg, &opts).map_err(|e| e.to_string())?;
    for p in &report.points {
        for c in &p.checks {
            println!("[{}] {}", p.id, c.describe());
        }
    }
    if let Some(f) = &report.fit {
        println!("fitted slope {:.4} (bracket [{}, {}])", f.slope, f.lower, f.upper);
    }
    for c in &report.checks {
        println!("{}", c.describe());
    }
    println!(
        "{}: {} ({})",
        report.study,
        if report.pass { "PASS" } else { "FAIL" },
        opts.out.join(&report.study).display()
    );
    Ok(report.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
