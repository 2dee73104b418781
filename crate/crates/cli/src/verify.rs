//! Randomized correctness suites behind `rrgivens verify`.
//!
//! Each check draws seeded random inputs, computes a worst-case error, and
//! compares it against a pinned tolerance. Bitwise checks report 0 or 1.
//! Cheap checks run for the full trial count; the finite-difference and
//! Jacobian-oracle checks are capped at a handful of draws since their cost
//! per trial is quadratic in the parameter count.

use rrgivens::oracles::{
    det_lu, finite_diff_gradient, finite_diff_gradient_unitary, forward_sequential,
    forward_sequential_unitary, jacobian_column, linear_loss, linear_loss_complex,
    max_relative_error,
};
use rrgivens::{
    build_circle_schedule, forward_parallel, forward_unitary, jvp_parallel, jvp_unitary,
    pair_index_map, validate_schedule, AngleSet, Complex64, DenseMatrix, GivensError,
    OrthogonalConfig, PhaseSet, RotationSchedule,
};

pub const TOL_ORTHOGONALITY: f64 = 1e-12;
pub const TOL_UNITARITY: f64 = 1e-12;
pub const TOL_DETERMINANT: f64 = 1e-9;
pub const TOL_JACOBIAN_ORACLE: f64 = 1e-10;
pub const TOL_GRADIENT_REL: f64 = 1e-6;
pub const GRADIENT_COMPONENT_FLOOR: f64 = 1e-8;
pub const FD_STEP: f64 = 1e-6;
pub const TOL_PHASE_ZERO: f64 = 1e-12;
pub const TOL_LINEARITY: f64 = 1e-12;

/// Draw cap for the expensive finite-difference style checks.
const MAX_EXPENSIVE_TRIALS: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyMode {
    Real,
    Unitary,
    Restricted,
}

#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub max_err: f64,
    pub tol: f64,
    pub passed: bool,
}

impl CheckOutcome {
    fn new(name: &'static str, max_err: f64, tol: f64) -> Self {
        Self {
            name,
            max_err,
            tol,
            passed: max_err <= tol,
        }
    }

    /// For yes/no checks: error 1.0 on failure, tolerance 0.
    fn boolean(name: &'static str, ok: bool) -> Self {
        Self::new(name, if ok { 0.0 } else { 1.0 }, 0.0)
    }
}

/// `max |U^T U - I|` over all entries.
pub fn orthogonality_residual(u: &DenseMatrix<f64>) -> f64 {
    use rayon::prelude::*;
    let n = u.n_rows();
    // column dots become contiguous row dots of the transpose
    let ut = u.transpose();
    (0..n)
        .into_par_iter()
        .map(|r| {
            let row_r = ut.row(r);
            let mut worst = 0.0f64;
            for c in r..n {
                let dot: f64 = row_r.iter().zip(ut.row(c)).map(|(a, b)| a * b).sum();
                let target = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
            worst
        })
        .reduce(|| 0.0, f64::max)
}

/// `max |U^dagger U - I|` over all entries.
pub fn unitarity_residual(u: &DenseMatrix<Complex64>) -> f64 {
    use rayon::prelude::*;
    let n = u.n_rows();
    let ut = u.transpose();
    (0..n)
        .into_par_iter()
        .map(|r| {
            let row_r = ut.row(r);
            let mut worst = 0.0f64;
            for c in r..n {
                let dot: Complex64 = row_r
                    .iter()
                    .zip(ut.row(c))
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                let target = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).norm());
            }
            worst
        })
        .reduce(|| 0.0, f64::max)
}

pub fn slices_bitwise_eq(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("failed to build worker pool")
        .install(f)
}

/// Run the mode's checks on `trials` seeded draws. The returned outcomes
/// carry worst-case errors; the process exit code is derived from them.
pub fn run_verify(
    n: usize,
    m: Option<usize>,
    trials: usize,
    seed: u64,
    mode: VerifyMode,
) -> Result<Vec<CheckOutcome>, GivensError> {
    let m_active = m.unwrap_or(match mode {
        VerifyMode::Restricted => (n / 2).max(1),
        _ => n,
    });
    let s = build_circle_schedule(n, None, m_active)?;
    let mut outcomes = Vec::new();

    outcomes.push(CheckOutcome::boolean(
        "schedule-validity",
        validate_schedule(&s).all_passed(),
    ));
    let expected_params = m_active * n - m_active * (m_active + 1) / 2;
    outcomes.push(CheckOutcome::boolean(
        "active-parameter-count",
        s.active_pair_count() == expected_params,
    ));

    match mode {
        VerifyMode::Real | VerifyMode::Restricted => {
            run_real_checks(&s, trials, seed, &mut outcomes)?;
        }
        VerifyMode::Unitary => {
            run_unitary_checks(&s, trials, seed, &mut outcomes)?;
        }
    }
    Ok(outcomes)
}

fn run_real_checks(
    s: &RotationSchedule,
    trials: usize,
    seed: u64,
    outcomes: &mut Vec<CheckOutcome>,
) -> Result<(), GivensError> {
    let n = s.n();
    let rotation = OrthogonalConfig::rotation();
    let reflection = OrthogonalConfig::reflection(0);

    let mut worst_ortho = 0.0f64;
    let mut worst_det_rot = 0.0f64;
    let mut worst_det_refl = 0.0f64;
    let mut seq_par_ok = true;
    let mut workers_ok = true;
    let mut rerun_ok = true;

    for t in 0..trials {
        let draw_seed = seed.wrapping_add(1000 * t as u64);
        let theta = AngleSet::random_uniform(s, draw_seed);
        let u = forward_parallel(s, &theta, &rotation)?;

        worst_ortho = worst_ortho.max(orthogonality_residual(&u));
        worst_det_rot = worst_det_rot.max((det_lu(&u) - 1.0).abs());
        let u_refl = forward_parallel(s, &theta, &reflection)?;
        worst_det_refl = worst_det_refl.max((det_lu(&u_refl) + 1.0).abs());

        let seq = forward_sequential(s, &theta)?;
        seq_par_ok &= u.bitwise_eq(&seq);

        let gamma = DenseMatrix::<f64>::random_uniform(n, n, -1.0, 1.0, draw_seed ^ 0xABCD);
        let grad = jvp_parallel(s, &theta, &u, &gamma)?;

        let u1 = in_pool(1, || forward_parallel(s, &theta, &rotation))?;
        let grad1 = in_pool(1, || jvp_parallel(s, &theta, &u1, &gamma))?;
        workers_ok &= u.bitwise_eq(&u1) && slices_bitwise_eq(&grad, &grad1);

        let u_again = forward_parallel(s, &theta, &rotation)?;
        let grad_again = jvp_parallel(s, &theta, &u_again, &gamma)?;
        rerun_ok &= u.bitwise_eq(&u_again) && slices_bitwise_eq(&grad, &grad_again);
    }

    outcomes.push(CheckOutcome::new(
        "forward-orthogonality",
        worst_ortho,
        TOL_ORTHOGONALITY,
    ));
    outcomes.push(CheckOutcome::new(
        "determinant-rotation",
        worst_det_rot,
        TOL_DETERMINANT,
    ));
    outcomes.push(CheckOutcome::new(
        "determinant-reflection",
        worst_det_refl,
        TOL_DETERMINANT,
    ));
    outcomes.push(CheckOutcome::boolean("sequential-parallel-bitwise", seq_par_ok));
    outcomes.push(CheckOutcome::boolean("worker-count-bitwise", workers_ok));
    outcomes.push(CheckOutcome::boolean("determinism-rerun", rerun_ok));

    // explicit-Jacobian oracle agreement; dense products, so small n only
    if n <= 8 {
        let mut worst = 0.0f64;
        let map = pair_index_map(s);
        for t in 0..trials {
            let draw_seed = seed.wrapping_add(1000 * t as u64);
            let theta = AngleSet::random_uniform(s, draw_seed);
            let gamma = DenseMatrix::<f64>::random_uniform(n, n, -1.0, 1.0, draw_seed ^ 0xABCD);
            let u = forward_parallel(s, &theta, &rotation)?;
            let grad = jvp_parallel(s, &theta, &u, &gamma)?;
            for (flat, e) in map.iter() {
                let col = jacobian_column(s, &theta, e)?;
                let want = linear_loss(&gamma, &col.matrix);
                worst = worst.max((grad[flat] - want).abs());
            }
        }
        outcomes.push(CheckOutcome::new(
            "jacobian-oracle",
            worst,
            TOL_JACOBIAN_ORACLE,
        ));
    }

    let mut worst_fd = 0.0f64;
    let mut worst_lin = 0.0f64;
    for t in 0..trials.min(MAX_EXPENSIVE_TRIALS) {
        let draw_seed = seed.wrapping_add(1000 * t as u64);
        let theta = AngleSet::random_uniform(s, draw_seed);
        let gamma = DenseMatrix::<f64>::random_uniform(n, n, -1.0, 1.0, draw_seed ^ 0xABCD);
        let u = forward_parallel(s, &theta, &rotation)?;
        let grad = jvp_parallel(s, &theta, &u, &gamma)?;

        let fd = finite_diff_gradient(s, &theta, |m| linear_loss(&gamma, m), FD_STEP)?;
        worst_fd = worst_fd.max(max_relative_error(
            &grad,
            &fd,
            GRADIENT_COMPONENT_FLOOR,
        ));

        // linearity in the upstream gradient
        let g2 = DenseMatrix::<f64>::random_uniform(n, n, -1.0, 1.0, draw_seed ^ 0x1234);
        let (alpha, beta) = (0.63, -1.7);
        let mut combo = DenseMatrix::<f64>::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                combo[(r, c)] = alpha * gamma[(r, c)] + beta * g2[(r, c)];
            }
        }
        let grad2 = jvp_parallel(s, &theta, &u, &g2)?;
        let grad_combo = jvp_parallel(s, &theta, &u, &combo)?;
        for k in 0..grad.len() {
            let lin = alpha * grad[k] + beta * grad2[k];
            worst_lin = worst_lin.max((grad_combo[k] - lin).abs());
        }
    }
    outcomes.push(CheckOutcome::new(
        "gradient-finite-difference",
        worst_fd,
        TOL_GRADIENT_REL,
    ));
    outcomes.push(CheckOutcome::new(
        "gradient-linearity",
        worst_lin,
        TOL_LINEARITY,
    ));
    Ok(())
}

fn run_unitary_checks(
    s: &RotationSchedule,
    trials: usize,
    seed: u64,
    outcomes: &mut Vec<CheckOutcome>,
) -> Result<(), GivensError> {
    let n = s.n();
    let mut worst_unitarity = 0.0f64;
    let mut seq_par_ok = true;
    let mut rerun_ok = true;

    for t in 0..trials {
        let draw_seed = seed.wrapping_add(1000 * t as u64);
        let theta = AngleSet::random_uniform(s, draw_seed);
        let phi = PhaseSet::random_uniform(s, draw_seed ^ 0x77);
        let u = forward_unitary(s, &theta, &phi)?;
        worst_unitarity = worst_unitarity.max(unitarity_residual(&u));

        let seq = forward_sequential_unitary(s, &theta, &phi)?;
        seq_par_ok &= u.bitwise_eq(&seq);

        let u_again = forward_unitary(s, &theta, &phi)?;
        rerun_ok &= u.bitwise_eq(&u_again);
    }
    outcomes.push(CheckOutcome::new(
        "forward-unitarity",
        worst_unitarity,
        TOL_UNITARITY,
    ));
    outcomes.push(CheckOutcome::boolean("sequential-parallel-bitwise", seq_par_ok));
    outcomes.push(CheckOutcome::boolean("determinism-rerun", rerun_ok));

    let mut worst_fd_theta = 0.0f64;
    let mut worst_fd_phi = 0.0f64;
    let mut worst_phase_zero = 0.0f64;
    for t in 0..trials.min(MAX_EXPENSIVE_TRIALS) {
        let draw_seed = seed.wrapping_add(1000 * t as u64);
        let theta = AngleSet::random_uniform(s, draw_seed);
        let phi = PhaseSet::random_uniform(s, draw_seed ^ 0x77);
        let gamma = DenseMatrix::<Complex64>::random_complex(n, n, draw_seed ^ 0xABCD);
        let u = forward_unitary(s, &theta, &phi)?;
        let grad = jvp_unitary(s, &theta, &phi, &u, &gamma)?;
        let (fd_t, fd_p) = finite_diff_gradient_unitary(
            s,
            &theta,
            &phi,
            |m| linear_loss_complex(&gamma, m),
            FD_STEP,
        )?;
        worst_fd_theta = worst_fd_theta.max(max_relative_error(
            &grad.d_theta,
            &fd_t,
            GRADIENT_COMPONENT_FLOOR,
        ));
        worst_fd_phi = worst_fd_phi.max(max_relative_error(
            &grad.d_phi,
            &fd_p,
            GRADIENT_COMPONENT_FLOOR,
        ));

        // zero phases must reproduce the real pipeline
        let zero_phi = PhaseSet::zeros(s);
        let uc = forward_unitary(s, &theta, &zero_phi)?;
        let gamma_r = DenseMatrix::<f64>::random_uniform(n, n, -1.0, 1.0, draw_seed ^ 0x9999);
        let gamma_c = DenseMatrix::<Complex64>::from_real(&gamma_r);
        let grad_c = jvp_unitary(s, &theta, &zero_phi, &uc, &gamma_c)?;
        let ur = forward_parallel(s, &theta, &OrthogonalConfig::rotation())?;
        let grad_r = jvp_parallel(s, &theta, &ur, &gamma_r)?;
        worst_phase_zero = worst_phase_zero.max(uc.max_abs_diff(&DenseMatrix::from_real(&ur)));
        for k in 0..grad_r.len() {
            worst_phase_zero = worst_phase_zero.max((grad_c.d_theta[k] - grad_r[k]).abs());
        }
    }
    outcomes.push(CheckOutcome::new(
        "gradient-finite-difference-theta",
        worst_fd_theta,
        TOL_GRADIENT_REL,
    ));
    outcomes.push(CheckOutcome::new(
        "gradient-finite-difference-phi",
        worst_fd_phi,
        TOL_GRADIENT_REL,
    ));
    outcomes.push(CheckOutcome::new(
        "phase-zero-reduction",
        worst_phase_zero,
        TOL_PHASE_ZERO,
    ));
    Ok(())
}
