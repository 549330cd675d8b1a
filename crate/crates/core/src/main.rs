use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use modunfold::harness::{run_sweep, run_trial, write_csv, FilterChoice, SweepSpec, UniformNoise};
use modunfold::recovery::{FilterKind, RecoveryConfig};
use modunfold::signal::{gen_signal, SignalSpec};
use modunfold::{json, Result};

#[derive(Parser)]
#[command(name = "modunfold", version, about = "Recover bandlimited signals from modulo-folded samples")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random test signal.
    Gen {
        #[command(flatten)]
        gen: GenArgs,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
    /// Sample, fold and unfold one signal, then compare against the true samples.
    Pipeline {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value = "chebyshev")]
        kind: KindArg,
        /// Filter order (K for chebyshev, L for difference; required for difference).
        #[arg(long)]
        order: Option<u32>,
        /// Report file.
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
        /// Also write the recovered samples.
        #[arg(long)]
        recovered: Option<PathBuf>,
    },
    /// Run a grid of trials and write one CSV row per trial.
    Sweep {
        /// Normalized rates W*Ts.
        #[arg(long, value_delimiter = ',', num_args = 0.., default_values_t = [0.1, 0.25, 0.4, 0.45])]
        wts: Vec<f64>,
        #[arg(long, value_delimiter = ',', num_args = 0.., default_values_t = [1.0, 0.1])]
        delta: Vec<f64>,
        #[arg(long, value_enum, value_delimiter = ',', num_args = 1.., default_values_t = [KindArg::Chebyshev, KindArg::Difference])]
        kind: Vec<KindArg>,
        /// Difference orders to try.
        #[arg(long, value_delimiter = ',', num_args = 1.., default_values_t = [1, 2, 3, 4, 5, 6, 7, 8])]
        order: Vec<u32>,
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u32).range(1..))]
        trials: u32,
        #[arg(long, default_value_t = 1.0)]
        w: f64,
        #[arg(long, default_value_t = 1.0)]
        energy: f64,
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
        terms: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
    /// Add uniform noise before folding and run the chebyshev decoder.
    NoiseDemo {
        #[command(flatten)]
        run: RunArgs,
        /// Noise amplitude: samples get i.i.d. uniform noise on [-noise, noise].
        #[arg(long)]
        noise: f64,
        /// Seed of the noise generator.
        #[arg(long = "noise-seed", default_value_t = 0)]
        noise_seed: u64,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
}

#[derive(Args)]
struct GenArgs {
    /// Class bandwidth in Hz; the signal occupies 0.95 of it.
    #[arg(long, default_value_t = 1.0)]
    w: f64,
    /// Energy budget.
    #[arg(long, default_value_t = 1.0)]
    energy: f64,
    /// Number of sinc terms.
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
    terms: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct RunArgs {
    /// Signal file written by `gen`.
    #[arg(long)]
    signal: PathBuf,
    /// Sampling period in seconds.
    #[arg(long)]
    ts: f64,
    /// Folding modulus.
    #[arg(long)]
    delta: f64,
    /// Class bandwidth used for filter sizing (default: the signal's).
    #[arg(long)]
    w: Option<f64>,
    /// Class energy used for filter sizing (default: the signal's).
    #[arg(long)]
    energy: Option<f64>,
}

impl RunArgs {
    fn load(&self) -> Result<(SignalSpec, RecoveryConfig)> {
        let spec: SignalSpec = json::read_file(&self.signal)?;
        let config = RecoveryConfig::new(
            self.w.unwrap_or(spec.w()),
            self.energy.unwrap_or(spec.energy_e()),
            spec.tail_t0(),
            spec.tail_rho(),
            self.delta,
            self.ts,
        )?;
        Ok((spec, config))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
enum KindArg {
    Chebyshev,
    Difference,
}

impl From<KindArg> for FilterKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Chebyshev => FilterKind::Chebyshev,
            KindArg::Difference => FilterKind::Difference,
        }
    }
}

impl std::fmt::Display for KindArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        FilterKind::from(*self).fmt(f)
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Command::Gen { gen, output } => {
            let spec = gen_signal(gen.w, gen.energy, gen.terms as usize, gen.seed)?;
            json::write_file(&output, &spec)
        }
        Command::Pipeline { run, kind, order, output, recovered } => {
            let (spec, config) = run.load()?;
            let trial = run_trial(&spec, &config, kind.into(), order, None)?;
            json::write_file(&output, &trial.report)?;
            if let Some(path) = recovered {
                json::write_file(&path, &trial.recovered)?;
            }
            Ok(())
        }
        Command::Sweep { wts, delta, kind, order, trials, w, energy, terms, seed, output } => {
            let mut filters = Vec::new();
            for k in kind {
                match k {
                    KindArg::Chebyshev => filters.push(FilterChoice { kind: FilterKind::Chebyshev, order: None }),
                    KindArg::Difference => filters
                        .extend(order.iter().map(|&o| FilterChoice { kind: FilterKind::Difference, order: Some(o) })),
                }
            }
            let sweep = SweepSpec { wts, deltas: delta, filters, trials, seed, w, energy, terms: terms as usize };
            let rows = run_sweep(&sweep)?;
            write_csv(BufWriter::new(File::create(&output)?), &rows)
        }
        Command::NoiseDemo { run, noise, noise_seed, output } => {
            let (spec, config) = run.load()?;
            let noise = UniformNoise { amplitude: noise, seed: noise_seed };
            let trial = run_trial(&spec, &config, FilterKind::Chebyshev, None, Some(noise))?;
            json::write_file(&output, &trial.report)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
