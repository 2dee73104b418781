//! Timing harness behind `rrgivens bench`.
//!
//! Compares the single-threaded sequential implementations against the
//! block-parallel ones for both the forward construction and the backward
//! gradient, over a grid of dimensions and worker counts. Workers equal to 1
//! time the sequential variants; higher counts run the parallel variants
//! inside a pinned pool.
//!
//! Timing covers only the forward or backward call itself: schedule
//! construction, parameter draws, the forward matrix feeding the backward
//! pass, and workspace allocation all happen outside the timed region.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rrgivens::backward::{jvp_with_workspace, BackwardWorkspace};
use rrgivens::oracles::forward_sequential;
use rrgivens::{
    build_circle_schedule, forward_parallel, AngleSet, DenseMatrix, GivensError,
    OrthogonalConfig, RealScalar,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Precision {
    F32,
    F64,
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Precision::F32 => write!(f, "f32"),
            Precision::F64 => write!(f, "f64"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    ForwardSequential,
    ForwardParallel,
    BackwardSequential,
    BackwardParallel,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Variant::ForwardSequential => "forward_sequential",
            Variant::ForwardParallel => "forward_parallel",
            Variant::BackwardSequential => "backward_sequential",
            Variant::BackwardParallel => "backward_parallel",
        };
        write!(f, "{s}")
    }
}

/// One timing row: mean and sample standard deviation over `reps` runs.
#[derive(Clone, Debug)]
pub struct BenchRecord {
    pub n: usize,
    pub variant: Variant,
    pub workers: usize,
    pub precision: Precision,
    pub mean_ms: f64,
    pub std_ms: f64,
    pub reps: usize,
}

fn time_reps(reps: usize, mut f: impl FnMut()) -> (f64, f64) {
    let mut samples = Vec::with_capacity(reps);
    for _ in 0..reps {
        let start = Instant::now();
        f();
        samples.push(start.elapsed().as_secs_f64() * 1e3);
    }
    let mean = samples.iter().sum::<f64>() / reps as f64;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (reps - 1) as f64;
    (mean, var.sqrt())
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("failed to build worker pool")
        .install(f)
}

fn bench_dimension<F: RealScalar>(
    n: usize,
    theta: &[F],
    gamma: &DenseMatrix<F>,
    workers: &[usize],
    reps: usize,
    precision: Precision,
    records: &mut Vec<BenchRecord>,
) -> Result<(), GivensError> {
    let s = build_circle_schedule(n, None, n)?;
    let cfg = OrthogonalConfig::rotation();
    let u = forward_parallel(&s, theta, &cfg)?;
    let mut ws = BackwardWorkspace::<F>::new(&s);

    for &w in workers {
        let (fwd_variant, bwd_variant) = if w == 1 {
            (Variant::ForwardSequential, Variant::BackwardSequential)
        } else {
            (Variant::ForwardParallel, Variant::BackwardParallel)
        };

        let (mean_ms, std_ms) = if w == 1 {
            time_reps(reps, || {
                std::hint::black_box(forward_sequential(&s, theta).unwrap());
            })
        } else {
            in_pool(w, || {
                time_reps(reps, || {
                    std::hint::black_box(forward_parallel(&s, theta, &cfg).unwrap());
                })
            })
        };
        records.push(BenchRecord {
            n,
            variant: fwd_variant,
            workers: w,
            precision,
            mean_ms,
            std_ms,
            reps,
        });

        let (mean_ms, std_ms) = in_pool(w, || {
            time_reps(reps, || {
                std::hint::black_box(
                    jvp_with_workspace(&s, theta, &u, gamma, &mut ws).unwrap(),
                );
            })
        });
        records.push(BenchRecord {
            n,
            variant: bwd_variant,
            workers: w,
            precision,
            mean_ms,
            std_ms,
            reps,
        });
    }
    Ok(())
}

/// Run the timing grid. Random angles are uniform on `(-pi, pi)` from the
/// given seed, reported in the CSV path for reproducibility.
pub fn run_bench(
    ns: &[usize],
    workers: &[usize],
    reps: usize,
    precision: Precision,
    seed: u64,
) -> Result<Vec<BenchRecord>, GivensError> {
    assert!(reps >= 3, "need at least 3 repetitions");
    assert!(!ns.is_empty() && !workers.is_empty());
    let mut records = Vec::new();
    for &n in ns {
        let s = build_circle_schedule(n, None, n)?;
        let theta = AngleSet::random_uniform(&s, seed);
        match precision {
            Precision::F64 => {
                let gamma = DenseMatrix::<f64>::random_uniform(n, n, -1.0, 1.0, seed ^ 0xBEEF);
                bench_dimension::<f64>(n, &theta, &gamma, workers, reps, precision, &mut records)?;
            }
            Precision::F32 => {
                let theta32: Vec<f32> = theta.iter().map(|&t| t as f32).collect();
                let gamma =
                    DenseMatrix::<f32>::random_uniform_f32(n, n, -1.0, 1.0, seed ^ 0xBEEF);
                bench_dimension::<f32>(
                    n, &theta32, &gamma, workers, reps, precision, &mut records,
                )?;
            }
        }
    }
    Ok(records)
}

/// Write records as CSV. Everything except the two timing columns is
/// byte-stable for fixed inputs.
pub fn write_csv(records: &[BenchRecord], path: &Path) -> std::io::Result<()> {
    let mut file = std::fs::File::create(path)?;
    writeln!(file, "n,variant,workers,precision,mean_ms,std_ms,reps")?;
    for r in records {
        writeln!(
            file,
            "{},{},{},{},{:.6},{:.6},{}",
            r.n, r.variant, r.workers, r.precision, r.mean_ms, r.std_ms, r.reps
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_shape_matches_inputs() {
        let records = run_bench(&[4, 8], &[1, 2], 3, Precision::F64, 0).unwrap();
        // per n: sequential fwd+bwd at w=1, parallel fwd+bwd at w=2
        assert_eq!(records.len(), 8);
        assert!(records.iter().all(|r| r.mean_ms > 0.0 && r.reps == 3));
        assert!(records
            .iter()
            .any(|r| r.variant == Variant::ForwardSequential && r.workers == 1));
        assert!(records
            .iter()
            .any(|r| r.variant == Variant::BackwardParallel && r.workers == 2));
    }

    #[test]
    fn f32_grid_runs() {
        let records = run_bench(&[6], &[2], 3, Precision::F32, 1).unwrap();
        assert_eq!(records.len(), 2);
        assert!(records.iter().all(|r| r.precision == Precision::F32));
    }

    #[test]
    fn csv_round_trip_format() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bench.csv");
        let records = run_bench(&[4], &[1], 3, Precision::F64, 0).unwrap();
        write_csv(&records, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "n,variant,workers,precision,mean_ms,std_ms,reps"
        );
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), 2);
        assert!(rows[0].starts_with("4,forward_sequential,1,f64,"));
        assert!(rows[1].starts_with("4,backward_sequential,1,f64,"));
        assert!(rows.iter().all(|r| r.ends_with(",3")));
    }
}
