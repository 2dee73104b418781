use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rrgivens::build_circle_schedule;
use rrgivens_cli::bench::{run_bench, write_csv, Precision};
use rrgivens_cli::verify::{run_verify, VerifyMode};

/// Round-robin Givens tools: schedules, verification, benchmarks.
#[derive(Parser)]
#[command(name = "rrgivens", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Real,
    Unitary,
    Restricted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum PrecisionArg {
    F32,
    F64,
}

#[derive(Subcommand)]
enum Command {
    /// Print the round-robin schedule, one block per line, pairs as "i-j"
    /// (inactive pairs marked with a trailing '*').
    Schedule {
        /// Matrix dimension.
        #[arg(long)]
        n: usize,
        /// Restriction bound: keep only pairs with i < m.
        #[arg(long)]
        m: Option<usize>,
        /// Shuffle the initial permutation with this seed (default: identity).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the randomized correctness suites; exit 0 iff every check passes.
    Verify {
        /// Matrix dimension.
        #[arg(long)]
        n: usize,
        /// Restriction bound (restricted mode defaults to n/2).
        #[arg(long)]
        m: Option<usize>,
        /// Random draws per check.
        #[arg(long, default_value_t = 10)]
        trials: usize,
        /// Base RNG seed; echoed in the output.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Which pipeline to verify.
        #[arg(long, value_enum, default_value_t = ModeArg::Real)]
        mode: ModeArg,
    },
    /// Time sequential vs parallel forward/backward over a grid; write CSV.
    Bench {
        /// Dimensions, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        /// Worker counts, comma separated; 1 selects the sequential variants.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        workers: Vec<usize>,
        /// Repetitions per configuration (at least 3).
        #[arg(long, default_value_t = 10)]
        reps: usize,
        /// Scalar precision.
        #[arg(long, value_enum, default_value_t = PrecisionArg::F64)]
        precision: PrecisionArg,
        /// Output CSV path.
        #[arg(long, default_value = "bench.csv")]
        out: PathBuf,
        /// RNG seed for the angle and gradient draws.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<ExitCode, String> {
    match command {
        Command::Schedule { n, m, seed } => {
            let perm: Option<Vec<usize>> = seed.map(|sd| {
                let ne = n + n % 2;
                let mut p: Vec<usize> = (0..ne).collect();
                p.shuffle(&mut ChaCha8Rng::seed_from_u64(sd));
                p
            });
            let s = build_circle_schedule(n, perm.as_deref(), m.unwrap_or(n))
                .map_err(|e| e.to_string())?;
            print!("{}", s.to_text());
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            n,
            m,
            trials,
            seed,
            mode,
        } => {
            if trials < 1 {
                return Err("--trials must be at least 1".to_string());
            }
            let mode = match mode {
                ModeArg::Real => VerifyMode::Real,
                ModeArg::Unitary => VerifyMode::Unitary,
                ModeArg::Restricted => VerifyMode::Restricted,
            };
            let outcomes =
                run_verify(n, m, trials, seed, mode).map_err(|e| e.to_string())?;
            println!("verify: n={n} trials={trials} seed={seed} mode={mode:?}");
            let mut all_passed = true;
            for o in &outcomes {
                let status = if o.passed { "PASS" } else { "FAIL" };
                println!(
                    "  {:<34} max_err={:<12.3e} tol={:<9.1e} {status}",
                    o.name, o.max_err, o.tol
                );
                all_passed &= o.passed;
            }
            if all_passed {
                println!("all checks passed");
                Ok(ExitCode::SUCCESS)
            } else {
                let failed: Vec<&str> = outcomes
                    .iter()
                    .filter(|o| !o.passed)
                    .map(|o| o.name)
                    .collect();
                println!("FAILED checks: {}", failed.join(", "));
                Ok(ExitCode::from(1))
            }
        }
        Command::Bench {
            n,
            workers,
            reps,
            precision,
            out,
            seed,
        } => {
            if reps < 3 {
                return Err("--reps must be at least 3".to_string());
            }
            if n.iter().any(|&d| d < 2) {
                return Err("every --n must be at least 2".to_string());
            }
            if workers.iter().any(|&w| w < 1) {
                return Err("every --workers count must be at least 1".to_string());
            }
            let precision = match precision {
                PrecisionArg::F32 => Precision::F32,
                PrecisionArg::F64 => Precision::F64,
            };
            let records =
                run_bench(&n, &workers, reps, precision, seed).map_err(|e| e.to_string())?;
            println!("bench: seed={seed} reps={reps} precision={precision}");
            println!(
                "{:>6} {:<20} {:>7} {:>10} {:>12} {:>10}",
                "n", "variant", "workers", "precision", "mean_ms", "std_ms"
            );
            for r in &records {
                println!(
                    "{:>6} {:<20} {:>7} {:>10} {:>12.3} {:>10.3}",
                    r.n,
                    r.variant.to_string(),
                    r.workers,
                    r.precision.to_string(),
                    r.mean_ms,
                    r.std_ms
                );
            }
            write_csv(&records, &out)
                .map_err(|e| format!("cannot write {}: {e}", out.display()))?;
            println!("wrote {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}
