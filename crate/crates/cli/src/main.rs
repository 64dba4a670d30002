#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::Outcome;
use crate::config::{Command, RawConfig, RunConfig};
use crate::output::OutputDir;

const EXIT_VALIDATION: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "foldwave", version, about = "Semiclassical fields and Wigner functions near a fold caustic")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Ray fans, Jacobians and caustic locations.
    Rays(Flags),
    /// WKB, KL and fundamental-solution fields on an x-grid.
    Field(Flags),
    /// Exact, numeric and recombined Wigner grids with difference maps.
    Wigner(Flags),
    /// Run the acceptance suite and write report.json.
    Validate(Flags),
}

macro_rules! key_flags {
    ($($name:ident),* $(,)?) => {
        /// Every `--key value` flag overrides the same key from `--config`.
        #[derive(Args, Debug)]
        struct Flags {
            /// key=value configuration file.
            #[arg(long)]
            config: Option<PathBuf>,
            $(
                #[arg(long, value_name = "VALUE", allow_hyphen_values = true)]
                $name: Option<String>,
            )*
        }

        impl Flags {
            fn pairs(&self) -> Vec<(&'static str, Option<String>)> {
                vec![$((stringify!($name), self.$name.clone())),*]
            }
        }
    };
}

key_flags!(
    scenario,
    epsilon,
    x0,
    xmin,
    xmax,
    nx,
    kmin,
    kmax,
    nk,
    sigma_samples,
    taper,
    truncation,
    support_margin,
    nrays,
    mu1,
    h,
    eta0,
    psi,
    kappa0,
    random_points,
    out,
    format,
    seed,
);

fn load(flags: &Flags) -> Result<RawConfig, String> {
    let mut raw = match &flags.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            RawConfig::parse_file(path, &text).map_err(|e| e.to_string())?
        }
        None => RawConfig::default(),
    };
    for (key, value) in flags.pairs() {
        if let Some(v) = value {
            raw.set_flag(key, v);
        }
    }
    Ok(raw)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, flags) = match &cli.command {
        Cmd::Rays(f) => (Command::Rays, f),
        Cmd::Field(f) => (Command::Field, f),
        Cmd::Wigner(f) => (Command::Wigner, f),
        Cmd::Validate(f) => (Command::Validate, f),
    };
    let (raw, cfg) = match load(flags).and_then(|raw| {
        let cfg = RunConfig::from_raw(command, &raw).map_err(|e| e.to_string())?;
        Ok((raw, cfg))
    }) {
        Ok(v) => v,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
    };

    let run = || -> anyhow::Result<Outcome> {
        let mut out = OutputDir::create(&cfg.out)?;
        let outcome = match command {
            Command::Rays => commands::rays(&cfg, &mut out)?,
            Command::Field => commands::field(&cfg, &mut out)?,
            Command::Wigner => commands::wigner(&cfg, &mut out)?,
            Command::Validate => commands::validate(&cfg, &mut out)?,
        };
        let manifest = out.finish(&cfg, &raw)?;
        eprintln!("wrote {}", manifest.display());
        Ok(outcome)
    };
    match run() {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::ValidationFailed(n)) => {
            eprintln!("{n} acceptance criteria failed");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_VALIDATION)
        }
    }
}
