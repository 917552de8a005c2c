mod args;
mod eval;
mod output;

use std::process::ExitCode;

use clap::Parser;
use pibgc::verify::{run_suite, VerifyOptions};
use pibgc::Config;

use args::{Cli, Command, QueryArgs, VerifyArgs};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or parameter values; exit code 2.
    Usage(String),
    /// Anything that went wrong after the input was accepted; exit code 1.
    Failure(String),
}

fn load_config(cli: &Cli) -> Result<Config, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            Config::from_toml(&text).map_err(|e| CliError::Usage(e.to_string()))?
        }
        None => Config::default(),
    };
    if cli.threads.is_some() {
        cfg.threads = cli.threads;
    }
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cfg)
}

fn query(q: &QueryArgs, sweep: bool, cfg: &Config) -> Result<ExitCode, CliError> {
    let points = eval::points(q, sweep)?;
    let methods = eval::methods(q)?;
    if methods.is_empty() {
        return Err(CliError::Usage("no applicable method".into()));
    }
    if !sweep && points.iter().any(|p| p.channel.is_entanglement_breaking()) {
        eprintln!("note: channel is entanglement-breaking; every two-way capacity is zero");
    }
    let rows = eval::run(&points, &methods, q.ns, cfg)?;
    let text = output::render(&rows, q.format);
    match &q.out {
        Some(path) => output::write_atomic(path, &text)
            .map_err(|e| CliError::Failure(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(v: &VerifyArgs) -> Result<ExitCode, CliError> {
    let report = run_suite(&VerifyOptions {
        f_scale: 1.0 + v.perturb_f,
    });
    if v.json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        for c in &report.checks {
            let status = if c.passed { "ok  " } else { "FAIL" };
            println!("{status} {:<26} max error {:.3e} (tol {:.0e})", c.name, c.max_error, c.tolerance);
            for f in &c.failures {
                println!("     {f}");
            }
        }
    }
    Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let cfg = load_config(&cli)?;
    if cli.print_config {
        print!("{}", cfg.to_toml());
        return Ok(ExitCode::SUCCESS);
    }
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Failure(e.to_string()))?;
    }
    match &cli.command {
        Some(Command::Bound(q)) => query(q, false, &cfg),
        Some(Command::Sweep(q)) => query(q, true, &cfg),
        Some(Command::Verify(v)) => verify(v),
        None => Err(CliError::Usage("a subcommand is required (bound, sweep or verify)".into())),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
