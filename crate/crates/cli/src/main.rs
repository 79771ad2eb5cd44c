use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use duality_cli::commands::{self, Figure};
use duality_cli::sweep::SweepConfig;
use duality_core::sampling::{classes_from_tokens, ClassToken};

/// Wave-particle duality measures for two-way interferometers with a quantum which-way marker.
///
/// Exit codes: 0 success, 1 inequality violation, 2 input or I/O error,
/// 3 degenerate branch (a way probability too small for a conditional state).
#[derive(Debug, Parser)]
#[command(name = "duality", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the duality report of an instance JSON file (or an SQDS config file).
    Analyze {
        /// Instance file `{s, phi, n, rho_d0, blocks}` or SQDS config `{p_d, v_d0, p_q, phi_ent}`.
        file: PathBuf,
    },
    /// Check the visibility inequalities on randomly generated instances.
    Verify {
        /// Base seed; every instance is drawn from its own stream derived from it.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Instances per (class, dimension) combination.
        #[arg(long, default_value_t = 1000)]
        count: usize,
        /// Marker dimensions, each in 2..=8.
        #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
        dims: Vec<usize>,
        /// Classes to combine: marker {pure, mixed}, quanton {s_pure, s_mixed},
        /// blocks {unitary_pair, general_unitary}. A group left out means all of it.
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "pure,mixed,s_pure,s_mixed,unitary_pair,general_unitary"
        )]
        classes: Vec<ClassToken>,
        /// Output directory for summary.json and instances.csv.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Write figure data as CSV.
    Figures {
        /// Which figures to write.
        #[arg(long, value_enum, value_delimiter = ',', default_value = "fig3,fig4")]
        which: Vec<FigureArg>,
        /// Output directory for fig3.csv and fig4.csv.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Grid points per axis for fig3.
        #[arg(long, default_value_t = 101)]
        resolution: usize,
        /// Curve samples for fig4.
        #[arg(long, default_value_t = 201)]
        samples: usize,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FigureArg {
    Fig3,
    Fig4,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = io::stdout().lock();
    let code = match cli.command {
        Command::Analyze { file } => commands::run_analyze(&file, &mut stdout),
        Command::Verify {
            seed,
            count,
            dims,
            classes,
            out,
        } => {
            let cfg = SweepConfig {
                seed,
                count,
                dims,
                classes: classes_from_tokens(&classes),
            };
            commands::run_verify(&cfg, &out, &mut stdout)
        }
        Command::Figures {
            which,
            out,
            resolution,
            samples,
        } => {
            let figs: Vec<Figure> = which
                .iter()
                .map(|w| match w {
                    FigureArg::Fig3 => Figure::Fig3,
                    FigureArg::Fig4 => Figure::Fig4,
                })
                .collect();
            commands::run_figures(&figs, &out, resolution, samples, &mut stdout)
        }
    };
    ExitCode::from(code as u8)
}
