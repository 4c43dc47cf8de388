//! `wvlab`: tabulate measurement scenarios as CSV or JSON.

mod parse;
mod scenarios;
mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use wvlab::verify;

use parse::{parse_angle_list, parse_real_list, Param, ParamList};
use scenarios::{OracleOpts, UsageError};
use table::{write_table, Format, Table};

const USAGE_EXIT: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "wvlab", version, about = "Pointer-measurement scenarios for a spin-1/2 system")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Output {
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv", global = true)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Args, Debug, Clone)]
struct OracleArgs {
    /// Cross-check every row against the dense grid oracle.
    #[arg(long, value_enum, default_value = "off")]
    oracle: Switch,
    /// Grid size for the oracle.
    #[arg(long, default_value_t = 512, value_parser = clap::value_parser!(u64).range(2..))]
    oracle_points: u64,
}

impl OracleArgs {
    fn opts(&self) -> OracleOpts {
        OracleOpts {
            points: (self.oracle == Switch::On).then_some(self.oracle_points as usize),
        }
    }
}

fn one_angle(s: &str) -> Result<Param, String> {
    let l = parse_angle_list(s)?;
    match <[Param; 1]>::try_from(l.0) {
        Ok([p]) => Ok(p),
        Err(_) => Err(format!("'{s}' must be a single angle")),
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Conditional <sigma_z> against the preparation angle.
    Fig1 {
        #[arg(long, default_value = "0:2pi:721", value_parser = parse_angle_list, allow_hyphen_values = true)]
        alpha: ParamList,
        #[arg(long = "g-over-delta", default_value = "0.1,0.5,1,2,5", value_parser = parse_real_list, allow_hyphen_values = true)]
        g_over_delta: ParamList,
        /// Post-selected direction.
        #[arg(long, default_value = "0", value_parser = one_angle, allow_hyphen_values = true)]
        beta: Param,
        /// Post-selected direction for the projective (ABL) curve.
        #[arg(long, default_value = "0.3pi", value_parser = one_angle, allow_hyphen_values = true)]
        abl_beta: Param,
        #[command(flatten)]
        oracle: OracleArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Coherence preserved by a finite coupling.
    Fig2a {
        #[arg(long, default_value = "0:2pi:721", value_parser = parse_angle_list, allow_hyphen_values = true)]
        alpha: ParamList,
        #[arg(long = "g-over-delta", default_value = "0.1,0.5,1,2,5", value_parser = parse_real_list, allow_hyphen_values = true)]
        g_over_delta: ParamList,
        #[command(flatten)]
        oracle: OracleArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Distance between two preparations before and after measurement.
    Fig2b {
        #[arg(long, default_value = "0:2pi:721", value_parser = parse_angle_list, allow_hyphen_values = true)]
        alpha: ParamList,
        #[arg(long, default_value = "0", value_parser = one_angle, allow_hyphen_values = true)]
        alpha_prime: Param,
        #[arg(long = "g-over-delta", default_value = "0.1,0.5,1,2,5", value_parser = parse_real_list, allow_hyphen_values = true)]
        g_over_delta: ParamList,
        #[command(flatten)]
        oracle: OracleArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Distance from the preparation to post-selected and re-mixed states.
    Fig3 {
        #[arg(long, default_value = "0:2pi:721", value_parser = parse_angle_list, allow_hyphen_values = true)]
        alpha: ParamList,
        #[arg(long, default_value = "0", value_parser = one_angle, allow_hyphen_values = true)]
        beta: Param,
        #[arg(long = "g-over-delta", default_value = "0.1,0.5,1,2,5", value_parser = parse_real_list, allow_hyphen_values = true)]
        g_over_delta: ParamList,
        #[command(flatten)]
        oracle: OracleArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Pointer fidelities against coupling strength.
    Fig4 {
        #[arg(long = "g-over-delta", default_value = "0:4:401", value_parser = parse_real_list, allow_hyphen_values = true)]
        g_over_delta: ParamList,
        #[arg(long, default_value = "0.3pi,0.9pi", value_parser = parse_angle_list, allow_hyphen_values = true)]
        alpha: ParamList,
        #[command(flatten)]
        oracle: OracleArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Minimal disturbance against the pointer fidelity bound.
    Fig5 {
        #[arg(long, default_value = "0.01:0.99:99", value_parser = parse_real_list, allow_hyphen_values = true)]
        fb: ParamList,
        #[arg(long, default_value = "0.3pi,0.6pi,0.9pi", value_parser = parse_angle_list, allow_hyphen_values = true)]
        alpha: ParamList,
        #[command(flatten)]
        oracle: OracleArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Minimal couplings, disturbances and success probabilities.
    Tradeoff {
        #[arg(long, default_value = "170deg", value_parser = parse_angle_list, allow_hyphen_values = true)]
        alpha: ParamList,
        #[arg(long, default_value = "0.1", value_parser = parse_real_list, allow_hyphen_values = true)]
        fb: ParamList,
        #[command(flatten)]
        oracle: OracleArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Engine quantities over a product grid of angles and couplings.
    Sweep {
        #[arg(long, default_value = "0:2pi:37", value_parser = parse_angle_list, allow_hyphen_values = true)]
        alpha: ParamList,
        #[arg(long, default_value = "0", value_parser = parse_angle_list, allow_hyphen_values = true)]
        beta: ParamList,
        #[arg(long = "g-over-delta", default_value = "0.1,0.5,1,2,5", value_parser = parse_real_list, allow_hyphen_values = true)]
        g_over_delta: ParamList,
        #[command(flatten)]
        oracle: OracleArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Compare engine, closed forms and grid oracle; exit 1 on any breach.
    Verify {
        #[arg(long, value_parser = parse_angle_list, allow_hyphen_values = true)]
        alpha: Option<ParamList>,
        #[arg(long = "g-over-delta", value_parser = parse_real_list, allow_hyphen_values = true)]
        g_over_delta: Option<ParamList>,
        #[arg(long, value_parser = parse_angle_list, allow_hyphen_values = true)]
        beta: Option<ParamList>,
        /// Oracle grid size.
        #[arg(long, default_value_t = 2048, value_parser = clap::value_parser!(u64).range(2..))]
        points: u64,
        #[command(flatten)]
        output: Output,
    },
}

fn lattice(values: &[f64]) -> ParamList {
    ParamList(
        values
            .iter()
            .map(|&value| Param {
                value,
                label: format!("{value}"),
            })
            .collect(),
    )
}

fn emit(table: &Table, output: &Output) -> Result<()> {
    match &output.out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
            let mut w = BufWriter::new(file);
            write_table(table, output.format, &mut w)?;
            w.flush()?;
        }
        None => {
            let mut w = io::stdout().lock();
            write_table(table, output.format, &mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("WVLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = match v.trim().parse() {
        Ok(n) if n > 0 => n,
        _ => return Err(UsageError(format!("WVLAB_THREADS must be a positive integer, got '{v}'")).into()),
    };
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    configure_threads()?;
    let (table, output) = match cli.command {
        Command::Fig1 {
            alpha,
            g_over_delta,
            beta,
            abl_beta,
            oracle,
            output,
        } => (
            scenarios::fig1(&alpha, &g_over_delta, &beta, &abl_beta, oracle.opts())?,
            output,
        ),
        Command::Fig2a {
            alpha,
            g_over_delta,
            oracle,
            output,
        } => (scenarios::fig2a(&alpha, &g_over_delta, oracle.opts())?, output),
        Command::Fig2b {
            alpha,
            alpha_prime,
            g_over_delta,
            oracle,
            output,
        } => (
            scenarios::fig2b(&alpha, &alpha_prime, &g_over_delta, oracle.opts())?,
            output,
        ),
        Command::Fig3 {
            alpha,
            beta,
            g_over_delta,
            oracle,
            output,
        } => (scenarios::fig3(&alpha, &beta, &g_over_delta, oracle.opts())?, output),
        Command::Fig4 {
            g_over_delta,
            alpha,
            oracle,
            output,
        } => (scenarios::fig4(&g_over_delta, &alpha, oracle.opts())?, output),
        Command::Fig5 {
            fb,
            alpha,
            oracle,
            output,
        } => (scenarios::fig5(&fb, &alpha, oracle.opts())?, output),
        Command::Tradeoff {
            alpha,
            fb,
            oracle,
            output,
        } => (scenarios::tradeoff(&alpha, &fb, oracle.opts())?, output),
        Command::Sweep {
            alpha,
            beta,
            g_over_delta,
            oracle,
            output,
        } => (scenarios::sweep(&alpha, &beta, &g_over_delta, oracle.opts())?, output),
        Command::Verify {
            alpha,
            g_over_delta,
            beta,
            points,
            output,
        } => {
            let alpha = alpha.unwrap_or_else(|| lattice(&verify::LATTICE_ALPHAS));
            let gs = g_over_delta.unwrap_or_else(|| lattice(&verify::LATTICE_G_OVER_DELTA));
            let beta = beta.unwrap_or_else(|| lattice(&verify::LATTICE_BETAS));
            let (table, failures) = scenarios::verify(&alpha, &gs, &beta, points as usize)?;
            emit(&table, &output)?;
            if failures.is_empty() {
                return Ok(ExitCode::SUCCESS);
            }
            eprintln!("{} of {} comparisons out of tolerance:", failures.len(), table.rows.len());
            for c in &failures {
                eprintln!(
                    "  alpha={} g={} beta={} {}: engine={:e} closed={} oracle={:e} (closed dev {}, oracle dev {:e})",
                    c.alpha,
                    c.g_over_delta,
                    c.beta.map_or("-".to_string(), |b| b.to_string()),
                    c.quantity,
                    c.engine,
                    c.closed.map_or("-".to_string(), |x| format!("{x:e}")),
                    c.oracle,
                    c.closed_deviation().map_or("-".to_string(), |d| format!("{d:e}")),
                    c.oracle_deviation(),
                );
            }
            return Ok(ExitCode::from(1));
        }
    };
    emit(&table, &output)?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(USAGE_EXIT)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
