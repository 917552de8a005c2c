use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "pibgc", version, about = "Capacity bounds for phase-insensitive bosonic Gaussian channels")]
pub struct Cli {
    /// TOML file with optimizer budgets and truncation settings.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Worker threads (defaults to the config value, then to all cores).
    #[arg(long, global = true, env = "PIBGC_THREADS")]
    pub threads: Option<usize>,

    /// Print the effective configuration as TOML and exit.
    #[arg(long)]
    pub print_config: bool,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Bounds at a single channel point.
    Bound(QueryArgs),
    /// Bounds along a range of one channel parameter, given as `start:stop:step`.
    Sweep(QueryArgs),
    /// Run the fast invariant suite.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ChannelArg {
    Attenuator,
    Amplifier,
    Additive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum MethodArg {
    New,
    Multirail,
    Plob,
    Ci,
    Rci,
    Npj,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A fixed value or an inclusive `start:stop:step` range.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Param {
    Value(f64),
    Range { start: f64, stop: f64, step: f64 },
}

impl FromStr for Param {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("'{t}': {e}"));
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [v] => Ok(Param::Value(num(v)?)),
            [a, b, c] => {
                let (start, stop, step) = (num(a)?, num(b)?, num(c)?);
                if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
                    return Err("range needs start <= stop and step > 0".into());
                }
                Ok(Param::Range { start, stop, step })
            }
            _ => Err("expected a number or start:stop:step".into()),
        }
    }
}

impl Param {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            Param::Value(v) => vec![v],
            Param::Range { start, stop, step } => {
                let n = ((stop - start) / step + 1e-9).floor() as usize;
                (0..=n).map(|i| (start + step * i as f64).min(stop)).collect()
            }
        }
    }

    pub fn is_range(&self) -> bool {
        matches!(self, Param::Range { .. })
    }
}

#[derive(Args, Debug)]
pub struct QueryArgs {
    #[arg(value_enum)]
    pub channel: ChannelArg,

    /// Transmissivity of the attenuator.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<Param>,

    /// Mean thermal photon number of the environment.
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<Param>,

    /// Gain of the amplifier.
    #[arg(long, allow_hyphen_values = true)]
    pub g: Option<Param>,

    /// Added noise variance.
    #[arg(long, allow_hyphen_values = true)]
    pub xi: Option<Param>,

    /// Mean photon number budget per channel use.
    #[arg(long, allow_hyphen_values = true)]
    pub ns: Option<f64>,

    #[arg(long, value_enum, value_delimiter = ',', default_value = "all")]
    pub method: Vec<MethodArg>,

    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,

    /// Output file; written atomically. Defaults to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Emit the report as JSON.
    #[arg(long)]
    pub json: bool,

    /// Relative perturbation applied to every Kraus coefficient.
    #[arg(long, hide = true, default_value_t = 0.0, allow_hyphen_values = true)]
    pub perturb_f: f64,
}
