//! Command-line front end for rotational Weingarten surfaces.

pub mod commands;
pub mod config;

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use commands::{CliError, Outcome};
use config::{parse_config, ConfigError, Layer, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "weingarten", version, about = "Rotational elliptic Weingarten surfaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Type of the surface generated by one phase orbit.
    Classify,
    /// Every surface type the class admits.
    Atlas,
    /// Generating curve through a phase point (CSV, OBJ mesh or JSON summary).
    Profile,
    /// Orbit as a graph x(lambda) together with the boundary 1/|lambda|.
    Phase,
    /// Halfspace property of the class.
    Halfspace,
    /// The non-elliptic compact example with k2 = k1^3 / c^3.
    Yau,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Configuration file with [class], [start], [integrator], [mesh], [output], [yau] sections.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Preset relation, e.g. `cgc:1`, `linear:-1/2`, `minimal`.
    #[arg(long, global = true)]
    pub preset: Option<String>,
    /// Relation k2 = g(k1) as an expression in x.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub g: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub b_hint: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub tail_exponent: Option<String>,
    #[arg(long, global = true)]
    pub lambda_max: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub domain_min: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub blowup: Option<String>,
    #[arg(long, global = true)]
    pub x0: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lambda0: Option<String>,
    /// Orientation sign, +1 or -1.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub eps: Option<String>,
    /// Relative tolerance of the profile integrator.
    #[arg(long, global = true)]
    pub tol_rk: Option<String>,
    #[arg(long, global = true)]
    pub s_max: Option<String>,
    #[arg(long, global = true)]
    pub n_angular: Option<String>,
    #[arg(long, global = true)]
    pub n_profile: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<String>,
    /// csv, json or obj.
    #[arg(long, global = true)]
    pub format: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub c: Option<String>,
}

impl Flags {
    fn layer(&self) -> Layer {
        let mut l = Layer::default();
        let pairs = [
            ("preset", &self.preset),
            ("g", &self.g),
            ("b_hint", &self.b_hint),
            ("tail_exponent", &self.tail_exponent),
            ("lambda_max", &self.lambda_max),
            ("domain_min", &self.domain_min),
            ("blowup", &self.blowup),
            ("x0", &self.x0),
            ("lambda0", &self.lambda0),
            ("eps", &self.eps),
            ("tol_rk", &self.tol_rk),
            ("s_max", &self.s_max),
            ("n_angular", &self.n_angular),
            ("n_profile", &self.n_profile),
            ("out", &self.out),
            ("format", &self.format),
            ("c", &self.c),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                l.set(k, v.clone());
            }
        }
        l
    }

    /// Config file values overridden by flags.
    pub fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let file = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| ConfigError::Io {
                    path: path.display().to_string(),
                    msg: e.to_string(),
                })?;
                parse_config(&text)?
            }
            None => Layer::default(),
        };
        RunConfig::from_layer(&file.merged(&self.layer()))
    }
}

/// Runs one command, writing to `--out` or to `stdout`.
pub fn run(command: Command, cfg: &RunConfig, stdout: &mut dyn Write) -> Result<Outcome, CliError> {
    let mut buf = Vec::new();
    let outcome = match command {
        Command::Classify => commands::classify(cfg, &mut buf),
        Command::Atlas => commands::atlas_cmd(cfg, &mut buf),
        Command::Profile => commands::profile(cfg, &mut buf),
        Command::Phase => commands::phase(cfg, &mut buf),
        Command::Halfspace => commands::halfspace(cfg, &mut buf),
        Command::Yau => commands::yau_cmd(cfg, &mut buf),
    }?;
    match &cfg.out {
        Some(path) => fs::write(path, &buf)?,
        None => stdout.write_all(&buf)?,
    }
    Ok(outcome)
}
