use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use catswap::acceptance;
use catswap::report::{emit_report, Format};
use catswap::scenario::{run_scenario, ScenarioConfig};
use catswap::timing::{sweep, write_csv, SweepGrid};

#[derive(Parser)]
#[command(name = "catswap", version, about = "Multiparticle entanglement swapping simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and print its report.
    Run {
        file: PathBuf,
        /// Overrides the seed in the file.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "json")]
        format: Format,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in acceptance suite.
    Verify,
    /// Tabulate direct versus relayed distribution times as CSV.
    Sweep {
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
        length: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        speed: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        classical_speed: f64,
        #[arg(long, value_delimiter = ',', default_value = "0,0.25,0.5,1")]
        measurement_time: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        levels: Vec<u32>,
        /// Add the worst-case classical broadcast time L/2c.
        #[arg(long)]
        include_classical: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn write_out(out: Option<&PathBuf>, text: &str) -> catswap::Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run(cli: Cli) -> catswap::Result<bool> {
    match cli.command {
        Command::Run { file, seed, format, out } => {
            let text = fs::read_to_string(&file)?;
            let mut config = ScenarioConfig::from_toml(&text)?;
            if let Some(seed) = seed {
                config.seed = seed;
            }
            let report = run_scenario(&config)?;
            write_out(out.as_ref(), &emit_report(&report, format))?;
            eprintln!("{}: {:.3} s", config.name, report.wall_clock.as_secs_f64());
            Ok(report.passed())
        }
        Command::Verify => {
            let mut all = true;
            for c in acceptance::run_all() {
                println!("{c}");
                all &= c.passed;
            }
            println!("{}", if all { "all criteria passed" } else { "some criteria failed" });
            Ok(all)
        }
        Command::Sweep {
            length,
            speed,
            classical_speed,
            measurement_time,
            levels,
            include_classical,
            out,
        } => {
            let grid = SweepGrid {
                length,
                speed,
                classical_speed,
                measurement_time,
                levels,
                include_classical,
            };
            let rows = sweep(&grid)?;
            let mut buf = Vec::new();
            write_csv(&rows, &mut buf)?;
            write_out(out.as_ref(), &String::from_utf8(buf).expect("csv is utf-8"))?;
            Ok(true)
        }
    }
}
