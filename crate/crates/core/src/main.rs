use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use subspace_action::bounds::{alpha_bound, SupOptions};
use subspace_action::distribution::SubspaceDistribution;
use subspace_action::experiment::{curves_to_csv, mc_moment_curves, reproduce_figure, ExperimentConfig, MomentOrder, VectorSpec};
use subspace_action::solver::{parse_measurement_stream, run_from_stream};
use subspace_action::text::fmt_row;
use subspace_action::Error;

mod checks;

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(name = "subspace-action", version, about = "Subspace-action recovery, Kaczmarz bounds and error-moment experiments")]
struct Cli {
    /// Worker threads for Monte Carlo trials (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recover a vector from a measurement-stream file.
    Solve {
        /// Stream of subspace serializations, each followed by its measurement.
        #[arg(long)]
        stream: PathBuf,
        /// Initial estimate: comma-separated entries, `zero` or `ones`.
        #[arg(long, default_value = "zero")]
        x0: String,
    },
    /// Kaczmarz bounds of a distribution, as `s,value,method,stderr`.
    Bounds {
        /// Builtin (`invariant:K:D`, `ronb:D`, `block_onb:D:K`, `roots:K`, `icosa`,
        /// `random:N:K:D:SEED`) or a distribution file.
        #[arg(long)]
        dist: String,
        /// Comma-separated orders; `log` or `0` for the logarithmic bound.
        #[arg(long, default_value = "0.5,1,2,log")]
        s: String,
        /// Random starts of the sphere optimizer.
        #[arg(long, default_value_t = 64)]
        probes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a Monte Carlo experiment described by a config file.
    Experiment {
        #[arg(long)]
        config: PathBuf,
    },
    /// Regenerate one of the four built-in experiment figures as CSV files.
    Figure {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        which: u8,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a built-in verification suite.
    Check {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Identities,
    Tightness,
    Noise,
    Lyapunov,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(EXIT_CONFIG);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    }
    match dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_CHECK_FAILED),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}

/// `Ok(false)` means a check ran and failed.
fn dispatch(command: Command) -> Result<bool, Error> {
    match command {
        Command::Solve { stream, x0 } => {
            let pairs = parse_measurement_stream(&std::fs::read_to_string(&stream)?)?;
            let Some((first, _)) = pairs.first() else {
                return Err(Error::Config("measurement stream is empty".into()));
            };
            let x0 = VectorSpec::parse(&x0)?.resolve(first.ambient_dim(), 0)?;
            println!("{}", fmt_row(&run_from_stream(&x0, &pairs)?));
            Ok(true)
        }
        Command::Bounds { dist, s, probes, seed } => {
            let dist = SubspaceDistribution::from_spec(&dist)?;
            let orders = MomentOrder::parse_list(&s)?;
            let opts = SupOptions {
                restarts: probes,
                seed,
                ..SupOptions::default()
            };
            println!("s,value,method,stderr");
            for order in orders {
                let est = alpha_bound(&dist, order.s(), &opts)?;
                let stderr = est.stderr.map(|v| v.to_string()).unwrap_or_default();
                println!("{order},{},{},{stderr}", fmt_row(&[est.value]), est.method);
            }
            Ok(true)
        }
        Command::Experiment { config } => {
            let cfg = ExperimentConfig::from_file(&config)?;
            let csv = curves_to_csv(&mc_moment_curves(&cfg)?);
            match &cfg.output {
                Some(path) => std::fs::write(path, csv)?,
                None => print!("{csv}"),
            }
            Ok(true)
        }
        Command::Figure { which, seed, out } => {
            for path in reproduce_figure(which, seed, &out)? {
                println!("{}", path.display());
            }
            Ok(true)
        }
        Command::Check { suite, seed } => {
            let results = match suite {
                Suite::Identities => checks::identities(seed)?,
                Suite::Tightness => checks::tightness(seed)?,
                Suite::Noise => checks::noise(seed)?,
                Suite::Lyapunov => checks::lyapunov(seed)?,
            };
            let mut all = true;
            for (name, ok) in &results {
                println!("{} {name}", if *ok { "PASS" } else { "FAIL" });
                all &= ok;
            }
            Ok(all)
        }
    }
}
