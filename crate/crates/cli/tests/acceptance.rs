//! Acceptance suite: one test per release criterion, each printing a
//! `[PASS]`/`[FAIL]` line (run with `-- --nocapture` to see them).
//!
//! Several criteria assert wall-clock budgets, so every test serializes on a
//! global gate; without it the harness would run them concurrently and the
//! timings would measure contention instead of work.

use std::sync::Mutex;
use std::time::Instant;

use rrgivens::oracles::{
    det_lu, finite_diff_gradient, finite_diff_gradient_unitary, forward_sequential,
    jacobian_column, linear_loss, linear_loss_complex, max_relative_error, numerical_rank,
    singular_values,
};
use rrgivens::{
    build_circle_schedule, forward_parallel, forward_unitary, jvp_parallel, jvp_unitary,
    pair_index_map, validate_schedule, AngleSet, Complex64, DenseMatrix, OrthogonalConfig,
    PhaseSet,
};
use rrgivens_cli::bench::{run_bench, write_csv, Precision};
use rrgivens_cli::verify::{
    orthogonality_residual, slices_bitwise_eq, unitarity_residual, FD_STEP,
    GRADIENT_COMPONENT_FLOOR, TOL_DETERMINANT, TOL_GRADIENT_REL, TOL_JACOBIAN_ORACLE,
    TOL_ORTHOGONALITY, TOL_PHASE_ZERO, TOL_UNITARITY,
};

static GATE: Mutex<()> = Mutex::new(());

fn serialized() -> std::sync::MutexGuard<'static, ()> {
    GATE.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

fn report(criterion: &str, pass: bool, detail: &str) {
    let status = if pass { "PASS" } else { "FAIL" };
    println!("[{status}] {criterion}: {detail}");
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

#[test]
fn acceptance_schedule_optimality() {
    let _gate = serialized();
    let start = Instant::now();

    let mut all_valid = true;
    for n in (2..=128).step_by(2) {
        let s = build_circle_schedule(n, None, n).unwrap();
        let valid = validate_schedule(&s).all_passed()
            && s.num_blocks() == n - 1
            && s.blocks().iter().all(|b| b.len() == n / 2)
            && s.active_pair_count() == n * (n - 1) / 2;
        all_valid &= valid;
        assert!(valid, "schedule invariants failed at n = {n}");
    }

    let s6 = build_circle_schedule(6, None, 6).unwrap();
    let got: Vec<Vec<(usize, usize)>> = s6
        .blocks()
        .iter()
        .map(|b| b.iter().map(|e| (e.i, e.j)).collect())
        .collect();
    let known = vec![
        vec![(0, 5), (1, 4), (2, 3)],
        vec![(0, 4), (3, 5), (1, 2)],
        vec![(0, 3), (2, 4), (1, 5)],
        vec![(0, 2), (1, 3), (4, 5)],
        vec![(0, 1), (2, 5), (3, 4)],
    ];
    let n6_exact = got == known;

    let elapsed = start.elapsed().as_secs_f64();
    let pass = all_valid && n6_exact && elapsed < 1.0;
    report(
        "schedule-optimality",
        pass,
        &format!("even n in 2..=128 valid, n=6 blocks verbatim={n6_exact}, {elapsed:.3}s < 1s"),
    );
    assert!(pass);
}

#[test]
fn acceptance_orthogonality() {
    let _gate = serialized();
    use rayon::prelude::*;
    let start = Instant::now();

    let mut worst_ortho = 0.0f64;
    let mut worst_det = 0.0f64;
    for &n in &[4usize, 16, 64, 256, 512] {
        let s = build_circle_schedule(n, None, n).unwrap();
        let (ortho, det) = (0..100u64)
            .into_par_iter()
            .map(|t| {
                let theta = AngleSet::random_uniform(&s, 0xA0 + t);
                let u = forward_parallel(&s, &theta, &OrthogonalConfig::rotation()).unwrap();
                let ortho = orthogonality_residual(&u);
                let det_rot = (det_lu(&u) - 1.0).abs();
                let u_refl =
                    forward_parallel(&s, &theta, &OrthogonalConfig::reflection(0)).unwrap();
                let det_refl = (det_lu(&u_refl) + 1.0).abs();
                (ortho, det_rot.max(det_refl))
            })
            .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
        worst_ortho = worst_ortho.max(ortho);
        worst_det = worst_det.max(det);
    }

    let elapsed = start.elapsed().as_secs_f64();
    let pass = worst_ortho <= TOL_ORTHOGONALITY && worst_det <= TOL_DETERMINANT && elapsed < 60.0;
    report(
        "orthogonality",
        pass,
        &format!(
            "max |U^T U - I| = {worst_ortho:.3e} (tol {TOL_ORTHOGONALITY:.0e}), \
             max |det -/+ 1| = {worst_det:.3e} (tol {TOL_DETERMINANT:.0e}), {elapsed:.1}s < 60s"
        ),
    );
    assert!(pass);
}

#[test]
fn acceptance_sequential_parallel_equivalence() {
    let _gate = serialized();
    let mut all_equal = true;
    for &n in &[6usize, 32, 128] {
        let s = build_circle_schedule(n, None, n).unwrap();
        for t in 0..50u64 {
            let theta = AngleSet::random_uniform(&s, 0xB0 + t);
            let cfg = OrthogonalConfig::rotation();
            let seq = forward_sequential(&s, &theta).unwrap();
            let par = forward_parallel(&s, &theta, &cfg).unwrap();
            let par1 = in_pool(1, || forward_parallel(&s, &theta, &cfg).unwrap());
            let par_max = in_pool(rayon::current_num_threads().max(2), || {
                forward_parallel(&s, &theta, &cfg).unwrap()
            });
            let same = seq.bitwise_eq(&par) && par.bitwise_eq(&par1) && par.bitwise_eq(&par_max);
            all_equal &= same;
            assert!(same, "bitwise mismatch at n = {n}, draw {t}");
        }
    }
    report(
        "sequential-parallel-equivalence",
        all_equal,
        "50 draws at n in {6,32,128}, sequential vs parallel vs 1 and max workers all bitwise equal",
    );
    assert!(all_equal);
}

#[test]
fn acceptance_jacobian_oracle_equivalence() {
    let _gate = serialized();
    use rayon::prelude::*;

    let mut worst_err = 0.0f64;
    let mut max_rank = 0usize;
    for n in 2..=8usize {
        let s = build_circle_schedule(n, None, n).unwrap();
        let map = pair_index_map(&s);
        let (err, rank) = (0..100u64)
            .into_par_iter()
            .map(|t| {
                let theta = AngleSet::random_uniform(&s, 0xC0 + t);
                let gamma = DenseMatrix::<f64>::random_uniform(n, n, -1.0, 1.0, 0xD0 + t);
                let u = forward_parallel(&s, &theta, &OrthogonalConfig::rotation()).unwrap();
                let grad = jvp_parallel(&s, &theta, &u, &gamma).unwrap();
                let mut err = 0.0f64;
                let mut rank = 0usize;
                for (flat, e) in map.iter() {
                    let col = jacobian_column(&s, &theta, e).unwrap();
                    err = err.max((grad[flat] - linear_loss(&gamma, &col.matrix)).abs());
                    rank = rank.max(numerical_rank(&singular_values(&col.matrix), 1e-10));
                }
                (err, rank)
            })
            .reduce(|| (0.0, 0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
        worst_err = worst_err.max(err);
        max_rank = max_rank.max(rank);
    }

    let pass = worst_err <= TOL_JACOBIAN_ORACLE && max_rank <= 2;
    report(
        "jacobian-oracle-equivalence",
        pass,
        &format!(
            "n <= 8, 100 draws each: max |jvp - explicit contraction| = {worst_err:.3e} \
             (tol {TOL_JACOBIAN_ORACLE:.0e}), max column rank = {max_rank} (<= 2)"
        ),
    );
    assert!(pass);
}

#[test]
fn acceptance_gradient_check() {
    let _gate = serialized();
    let start = Instant::now();
    let draws = 3u64;
    let mut legs: Vec<(String, f64)> = Vec::new();

    for &n in &[6usize, 16, 64] {
        let s = build_circle_schedule(n, None, n).unwrap();
        let mut worst = 0.0f64;
        for t in 0..draws {
            let theta = AngleSet::random_uniform(&s, 0xE0 + t);
            let gamma = DenseMatrix::<f64>::random_uniform(n, n, -1.0, 1.0, 0xF0 + t);
            let u = forward_parallel(&s, &theta, &OrthogonalConfig::rotation()).unwrap();
            let grad = jvp_parallel(&s, &theta, &u, &gamma).unwrap();
            let fd = finite_diff_gradient(&s, &theta, |m| linear_loss(&gamma, m), FD_STEP).unwrap();
            worst = worst.max(max_relative_error(&grad, &fd, GRADIENT_COMPONENT_FLOOR));
        }
        legs.push((format!("n={n}"), worst));
    }

    // restricted case: n = 8, m = 4, exactly 22 free parameters
    let mut restricted_count_ok = true;
    {
        let s = build_circle_schedule(8, None, 4).unwrap();
        let mut worst = 0.0f64;
        for t in 0..draws {
            let theta = AngleSet::random_uniform(&s, 0x1E0 + t);
            restricted_count_ok &= theta.len() == 22;
            let gamma = DenseMatrix::<f64>::random_uniform(8, 8, -1.0, 1.0, 0x1F0 + t);
            let u = forward_parallel(&s, &theta, &OrthogonalConfig::rotation()).unwrap();
            let grad = jvp_parallel(&s, &theta, &u, &gamma).unwrap();
            restricted_count_ok &= grad.len() == 22;
            let fd = finite_diff_gradient(&s, &theta, |m| linear_loss(&gamma, m), FD_STEP).unwrap();
            worst = worst.max(max_relative_error(&grad, &fd, GRADIENT_COMPONENT_FLOOR));
        }
        legs.push(("restricted n=8 m=4".to_string(), worst));
    }

    // unitary case: both angle families
    {
        let s = build_circle_schedule(6, None, 6).unwrap();
        let mut worst = 0.0f64;
        for t in 0..draws {
            let theta = AngleSet::random_uniform(&s, 0x2E0 + t);
            let phi = PhaseSet::random_uniform(&s, 0x2F0 + t);
            let gamma = DenseMatrix::<Complex64>::random_complex(6, 6, 0x3F0 + t);
            let u = forward_unitary(&s, &theta, &phi).unwrap();
            let grad = jvp_unitary(&s, &theta, &phi, &u, &gamma).unwrap();
            let (fd_t, fd_p) = finite_diff_gradient_unitary(
                &s,
                &theta,
                &phi,
                |m| linear_loss_complex(&gamma, m),
                FD_STEP,
            )
            .unwrap();
            worst = worst.max(max_relative_error(&grad.d_theta, &fd_t, GRADIENT_COMPONENT_FLOOR));
            worst = worst.max(max_relative_error(&grad.d_phi, &fd_p, GRADIENT_COMPONENT_FLOOR));
        }
        legs.push(("unitary n=6".to_string(), worst));
    }

    let elapsed = start.elapsed().as_secs_f64();
    let worst_rel = legs.iter().map(|(_, e)| *e).fold(0.0, f64::max);
    let breakdown: Vec<String> = legs
        .iter()
        .map(|(name, e)| format!("{name}: {e:.3e}"))
        .collect();
    let pass = worst_rel <= TOL_GRADIENT_REL && restricted_count_ok && elapsed < 300.0;
    report(
        "gradient-check",
        pass,
        &format!(
            "central differences (h = {FD_STEP:.0e}) vs jvp, max rel err on components >= \
             {GRADIENT_COMPONENT_FLOOR:.0e} (tol {TOL_GRADIENT_REL:.0e}): [{}]; restricted \
             has 22 params: {restricted_count_ok}; {elapsed:.1}s < 300s",
            breakdown.join(", ")
        ),
    );
    assert!(pass);
}

#[test]
fn acceptance_unitarity() {
    let _gate = serialized();
    let mut worst_unitarity = 0.0f64;
    for &(n, draws) in &[(4usize, 10u64), (16, 10), (64, 5), (256, 2)] {
        let s = build_circle_schedule(n, None, n).unwrap();
        for t in 0..draws {
            let theta = AngleSet::random_uniform(&s, 0x4E0 + t);
            let phi = PhaseSet::random_uniform(&s, 0x4F0 + t);
            let u = forward_unitary(&s, &theta, &phi).unwrap();
            worst_unitarity = worst_unitarity.max(unitarity_residual(&u));
        }
    }

    // zero phases must reproduce the real pipeline
    let mut worst_reduction = 0.0f64;
    {
        let n = 64;
        let s = build_circle_schedule(n, None, n).unwrap();
        let theta = AngleSet::random_uniform(&s, 0x5E0);
        let phi = PhaseSet::zeros(&s);
        let uc = forward_unitary(&s, &theta, &phi).unwrap();
        let ur = forward_parallel(&s, &theta, &OrthogonalConfig::rotation()).unwrap();
        worst_reduction = worst_reduction.max(uc.max_abs_diff(&DenseMatrix::from_real(&ur)));

        let gamma_r = DenseMatrix::<f64>::random_uniform(n, n, -1.0, 1.0, 0x5F0);
        let gamma_c = DenseMatrix::<Complex64>::from_real(&gamma_r);
        let grad_c = jvp_unitary(&s, &theta, &phi, &uc, &gamma_c).unwrap();
        let grad_r = jvp_parallel(&s, &theta, &ur, &gamma_r).unwrap();
        for k in 0..grad_r.len() {
            worst_reduction = worst_reduction.max((grad_c.d_theta[k] - grad_r[k]).abs());
        }
    }

    let pass = worst_unitarity <= TOL_UNITARITY && worst_reduction <= TOL_PHASE_ZERO;
    report(
        "unitarity",
        pass,
        &format!(
            "max |U^H U - I| = {worst_unitarity:.3e} for n up to 256 (tol {TOL_UNITARITY:.0e}); \
             phase-zero reduction to the real pipeline within {worst_reduction:.3e} \
             (tol {TOL_PHASE_ZERO:.0e})"
        ),
    );
    assert!(pass);
}

#[test]
fn acceptance_benchmark_scaling() {
    let _gate = serialized();

    // (a) sequential forward wall time between n = 512 and n = 1024,
    // asserted to sit in the n^2 bracket [3, 5]
    let reps = 10;
    let mut means = Vec::new();
    for &n in &[512usize, 1024] {
        let s = build_circle_schedule(n, None, n).unwrap();
        let theta = AngleSet::random_uniform(&s, 0x6E0);
        let _warmup = forward_sequential(&s, &theta).unwrap();
        let start = Instant::now();
        for _ in 0..reps {
            std::hint::black_box(forward_sequential(&s, &theta).unwrap());
        }
        means.push(start.elapsed().as_secs_f64() * 1e3 / reps as f64);
    }
    let ratio = means[1] / means[0];
    let ratio_in_bracket = (3.0..=5.0).contains(&ratio);

    // (b) multi-worker parallel forward at n = 2048: reported, not asserted
    let n = 2048;
    let s = build_circle_schedule(n, None, n).unwrap();
    let theta = AngleSet::random_uniform(&s, 0x6F0);
    let cfg = OrthogonalConfig::rotation();
    let max_workers = rayon::current_num_threads().max(2);
    let mut par_means = Vec::new();
    for &w in &[1usize, max_workers] {
        in_pool(w, || {
            let _warmup = forward_parallel(&s, &theta, &cfg).unwrap();
            let start = Instant::now();
            for _ in 0..3 {
                std::hint::black_box(forward_parallel(&s, &theta, &cfg).unwrap());
            }
            par_means.push(start.elapsed().as_secs_f64() * 1e3 / 3.0);
        });
    }
    println!(
        "[REPORT] parallel forward at n = 2048: 1 worker {:.1} ms, {max_workers} workers {:.1} ms \
         (speedup {:.2}x; machine-dependent, reported not asserted)",
        par_means[0],
        par_means[1],
        par_means[0] / par_means[1]
    );

    // CSV emission through the bench harness
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bench.csv");
    let records = run_bench(&[8, 16], &[1, 2], 3, Precision::F64, 0).unwrap();
    write_csv(&records, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    let csv_ok = lines[0] == "n,variant,workers,precision,mean_ms,std_ms,reps" && lines.len() == 9;

    let pass = ratio_in_bracket && csv_ok;
    report(
        "benchmark-scaling",
        pass,
        &format!(
            "sequential forward mean over {reps} reps: {:.1} ms at n=512, {:.1} ms at n=1024, \
             ratio {ratio:.2} (required bracket [3, 5]); CSV grid ok = {csv_ok}",
            means[0], means[1]
        ),
    );
    assert!(pass);
}

#[test]
fn acceptance_determinism() {
    let _gate = serialized();
    let mut all_ok = true;

    // real pipeline, n = 32
    {
        let n = 32;
        let s = build_circle_schedule(n, None, n).unwrap();
        let theta = AngleSet::random_uniform(&s, 0x7E0);
        let gamma = DenseMatrix::<f64>::random_uniform(n, n, -1.0, 1.0, 0x7F0);
        let cfg = OrthogonalConfig::rotation();

        let u_ref = forward_parallel(&s, &theta, &cfg).unwrap();
        let g_ref = jvp_parallel(&s, &theta, &u_ref, &gamma).unwrap();
        for w in [1usize, 2, rayon::current_num_threads().max(2)] {
            let (u, g) = in_pool(w, || {
                let u = forward_parallel(&s, &theta, &cfg).unwrap();
                let g = jvp_parallel(&s, &theta, &u, &gamma).unwrap();
                (u, g)
            });
            all_ok &= u.bitwise_eq(&u_ref) && slices_bitwise_eq(&g, &g_ref);
        }
        // repeated runs in the same pool
        let u2 = forward_parallel(&s, &theta, &cfg).unwrap();
        let g2 = jvp_parallel(&s, &theta, &u2, &gamma).unwrap();
        all_ok &= u2.bitwise_eq(&u_ref) && slices_bitwise_eq(&g2, &g_ref);
    }

    // unitary pipeline, n = 16
    {
        let n = 16;
        let s = build_circle_schedule(n, None, n).unwrap();
        let theta = AngleSet::random_uniform(&s, 0x8E0);
        let phi = PhaseSet::random_uniform(&s, 0x8F0);
        let gamma = DenseMatrix::<Complex64>::random_complex(n, n, 0x9F0);
        let u_ref = forward_unitary(&s, &theta, &phi).unwrap();
        let g_ref = jvp_unitary(&s, &theta, &phi, &u_ref, &gamma).unwrap();
        for w in [1usize, 2] {
            let (u, g) = in_pool(w, || {
                let u = forward_unitary(&s, &theta, &phi).unwrap();
                let g = jvp_unitary(&s, &theta, &phi, &u, &gamma).unwrap();
                (u, g)
            });
            all_ok &= u.bitwise_eq(&u_ref)
                && slices_bitwise_eq(&g.d_theta, &g_ref.d_theta)
                && slices_bitwise_eq(&g.d_phi, &g_ref.d_phi);
        }
    }

    report(
        "determinism",
        all_ok,
        "U and gradients bitwise identical across reruns and worker counts (real and unitary)",
    );
    assert!(all_ok);
}
