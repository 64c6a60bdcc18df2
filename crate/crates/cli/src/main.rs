//! `permutherm`: batch thermodynamics of permutation-invariant ensembles.
//!
//! Every run resolves a configuration (JSON file overlaid by flags, flags
//! winning field by field), computes one table or report, and writes a
//! single self-describing output file.  Exit codes: 0 success, 2
//! configuration error, 3 numerical non-convergence; failures also print
//! a machine-readable JSON record on stderr.

mod commands;
mod config;
mod output;

use anyhow::{anyhow, Result};
use clap::{Args, Parser, Subcommand};
use config::{parse_grid, Settings};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "permutherm",
    version,
    about = "Exact and asymptotic thermodynamics of permutation-invariant ensembles"
)]
struct Cli {
    /// JSON configuration file; explicit flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (default: permutherm-<command>.<ext> in $PERMUTHERM_OUT_DIR).
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Output format: csv or json.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Seed for the stochastic commands.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Option<Command>,
}

/// Ensemble selection shared by most commands.
#[derive(Args, Clone, Debug, Default)]
struct EnsembleArgs {
    /// Number of subsystems.
    #[arg(long)]
    n: Option<u32>,
    /// Symmetry treatment: sud (shape-labelled blocks) or spin.
    #[arg(long)]
    kind: Option<String>,
    /// Local dimension (sud ensembles).
    #[arg(long)]
    d: Option<u32>,
    /// Spin size (spin ensembles): 1/2, 1, 3/2, ...
    #[arg(long)]
    s: Option<String>,
    /// Spectrum family: ladder (default), two-level, h-delta, explicit.
    #[arg(long)]
    spectrum: Option<String>,
    /// Comma-separated single-particle levels for the explicit family.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    levels: Option<Vec<f64>>,
    /// Middle-level parameter in [0, 2] for the h-delta family.
    #[arg(long)]
    delta: Option<f64>,
}

impl EnsembleArgs {
    fn apply(&self, s: &mut Settings) {
        s.n = self.n;
        s.kind = self.kind.clone();
        s.d = self.d;
        s.s = self.s.clone();
        s.spectrum = self.spectrum.clone();
        s.levels = self.levels.clone();
        s.delta = self.delta;
    }
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate blocks: dimension, multiplicity, preparation weight.
    Irreps {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        /// Preparation inverse temperature (default 0: maximally mixed).
        #[arg(long)]
        beta0: Option<f64>,
    },
    /// Sweep the bath temperature: energy and reduced entropy/free-energy changes.
    Thermo {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        /// Preparation inverse temperature.
        #[arg(long)]
        beta0: Option<f64>,
        /// Bath grid: comma list, lin:start:stop:count, or log:start:stop:count.
        #[arg(long)]
        beta: Option<String>,
        /// Add per-block probability/energy/entropy/free-energy columns.
        #[arg(long)]
        per_block: bool,
    },
    /// Otto-cycle work outputs over a hot-bath grid.
    Otto {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        /// Preparation inverse temperature.
        #[arg(long)]
        beta0: Option<f64>,
        /// Hot-bath grid: comma list, lin:start:stop:count, or log:start:stop:count.
        #[arg(long)]
        beta_h: Option<String>,
        /// Cold-bath inverse temperature.
        #[arg(long)]
        beta_c: Option<f64>,
        /// Compression ratio in [beta_h/beta_c, 1].
        #[arg(long)]
        kappa: Option<f64>,
    },
    /// Otto-cycle work advantage across the three-level middle-level sweep.
    OttoScan {
        /// Number of subsystems.
        #[arg(long)]
        n: Option<u32>,
        /// Preparation inverse temperature.
        #[arg(long)]
        beta0: Option<f64>,
        /// Hot-bath inverse temperature (single value).
        #[arg(long)]
        beta_h: Option<String>,
        /// Cold-bath inverse temperature.
        #[arg(long)]
        beta_c: Option<f64>,
        /// Compression ratio in [beta_h/beta_c, 1].
        #[arg(long)]
        kappa: Option<f64>,
        /// Number of middle-level positions across [0, 2].
        #[arg(long)]
        delta_points: Option<usize>,
    },
    /// Verify the steady-state structure by direct dissipative evolution.
    LindbladVerify {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        /// Preparation inverse temperature of the initial state.
        #[arg(long)]
        beta0: Option<f64>,
        /// Bath inverse temperature (single value).
        #[arg(long)]
        beta: Option<String>,
        /// Collective coupling rate (default 1).
        #[arg(long)]
        gamma: Option<f64>,
        /// Keep the zero-frequency jump channels.
        #[arg(long)]
        include_zero_frequency: bool,
        /// Extra random initial states to verify (default 3).
        #[arg(long)]
        random_states: Option<usize>,
        /// Integration step cap.
        #[arg(long)]
        max_steps: Option<usize>,
    },
    /// Limiting energy coefficients E_d by quadrature and Monte Carlo.
    AsymptoticsEnergy {
        /// Largest local dimension (2..=7, default 7).
        #[arg(long)]
        d_max: Option<u32>,
        /// Monte Carlo samples per dimension (default 1000000).
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Exact degeneracy entropy against its leading-order growth law.
    AsymptoticsEntropy {
        /// Symmetry treatment: sud or spin.
        #[arg(long)]
        kind: Option<String>,
        /// Local dimension (sud; exact sums cover d in {2, 3}).
        #[arg(long)]
        d: Option<u32>,
        /// Spin size (spin ensembles).
        #[arg(long)]
        s: Option<String>,
        /// Comma-separated ensemble sizes, strictly increasing.
        #[arg(long)]
        n_grid: Option<String>,
    },
    /// Per-block contributions to the steady-state changes at one temperature.
    IrrepTerms {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        /// Preparation inverse temperature.
        #[arg(long)]
        beta0: Option<f64>,
        /// Bath inverse temperature (single value).
        #[arg(long)]
        beta: Option<String>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Irreps { .. } => "irreps",
            Command::Thermo { .. } => "thermo",
            Command::Otto { .. } => "otto",
            Command::OttoScan { .. } => "otto-scan",
            Command::LindbladVerify { .. } => "lindblad-verify",
            Command::AsymptoticsEnergy { .. } => "asymptotics-energy",
            Command::AsymptoticsEntropy { .. } => "asymptotics-entropy",
            Command::IrrepTerms { .. } => "irrep-terms",
        }
    }

    /// Converts the parsed flags into the overlay settings.  Switch-style
    /// flags map to `Some(true)` only when given, so configuration-file
    /// values survive when the switch is absent.
    fn flag_settings(&self) -> Result<Settings> {
        let grid = |text: &Option<String>| -> Result<Option<Vec<f64>>> {
            text.as_deref().map(parse_grid).transpose()
        };
        let mut s = Settings::default();
        match self {
            Command::Irreps { ensemble, beta0 } => {
                ensemble.apply(&mut s);
                s.beta0 = *beta0;
            }
            Command::Thermo {
                ensemble,
                beta0,
                beta,
                per_block,
            } => {
                ensemble.apply(&mut s);
                s.beta0 = *beta0;
                s.beta = grid(beta)?;
                s.per_block = per_block.then_some(true);
            }
            Command::Otto {
                ensemble,
                beta0,
                beta_h,
                beta_c,
                kappa,
            } => {
                ensemble.apply(&mut s);
                s.beta0 = *beta0;
                s.beta_h = grid(beta_h)?;
                s.beta_c = *beta_c;
                s.kappa = *kappa;
            }
            Command::OttoScan {
                n,
                beta0,
                beta_h,
                beta_c,
                kappa,
                delta_points,
            } => {
                s.n = *n;
                s.beta0 = *beta0;
                s.beta_h = grid(beta_h)?;
                s.beta_c = *beta_c;
                s.kappa = *kappa;
                s.delta_points = *delta_points;
            }
            Command::LindbladVerify {
                ensemble,
                beta0,
                beta,
                gamma,
                include_zero_frequency,
                random_states,
                max_steps,
            } => {
                ensemble.apply(&mut s);
                s.beta0 = *beta0;
                s.beta = grid(beta)?;
                s.gamma = *gamma;
                s.include_zero_frequency = include_zero_frequency.then_some(true);
                s.random_states = *random_states;
                s.max_steps = *max_steps;
            }
            Command::AsymptoticsEnergy { d_max, samples } => {
                s.d_max = *d_max;
                s.samples = *samples;
            }
            Command::AsymptoticsEntropy {
                kind,
                d,
                s: spin,
                n_grid,
            } => {
                s.kind = kind.clone();
                s.d = *d;
                s.s = spin.clone();
                s.n_grid = n_grid
                    .as_deref()
                    .map(|text| {
                        text.split(',')
                            .map(|v| {
                                v.trim().parse::<u32>().map_err(|_| {
                                    anyhow!("cannot parse ensemble size {v:?} in n_grid")
                                })
                            })
                            .collect::<Result<Vec<u32>>>()
                    })
                    .transpose()?;
            }
            Command::IrrepTerms {
                ensemble,
                beta0,
                beta,
            } => {
                ensemble.apply(&mut s);
                s.beta0 = *beta0;
                s.beta = grid(beta)?;
            }
        }
        Ok(s)
    }
}

fn resolve_and_run(cli: &Cli) -> Result<String> {
    let mut settings = match &cli.config {
        Some(path) => Settings::from_file(path)?,
        None => Settings::default(),
    };
    settings = settings.overlaid_with(Settings {
        output: cli.output.clone(),
        format: cli.format.clone(),
        seed: cli.seed,
        ..Settings::default()
    });
    let command = match &cli.command {
        Some(command) => {
            settings = settings.overlaid_with(command.flag_settings()?);
            command.name().to_string()
        }
        None => settings.command.clone().ok_or_else(|| {
            anyhow!("no command given (pass a subcommand or a config file with a \"command\" key)")
        })?,
    };
    commands::run(&command, &settings)
}

/// Numerical non-convergence maps to 3; every other failure is a
/// configuration or input problem and maps to 2.
fn exit_code_for(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(core) = cause.downcast_ref::<permutherm_core::Error>() {
            if matches!(core, permutherm_core::Error::NonConvergence { .. }) {
                return 3;
            }
        }
    }
    2
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match resolve_and_run(&cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            let code = exit_code_for(&err);
            let record = serde_json::json!({
                "error": format!("{err:#}"),
                "exit_code": code,
            });
            eprintln!("{record}");
            ExitCode::from(code)
        }
    }
}
