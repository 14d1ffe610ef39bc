//! Non-negative coding of one query with ADMM, checked against the exact
//! support-enumeration solver and the KKT conditions.
//!
//! ```text
//! cargo run --example nnls_admm
//! ```

use std::error::Error;

use nrc::linalg::{max_abs_diff, DenseMatrix};
use nrc::preprocess::l2_normalize_columns;
use nrc::solvers::{nnls_admm, nnls_kkt, nnls_oracle, residual_norm, SolverConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (d, n) = (10, 6);
    let raw: Vec<f64> = (0..d * n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let x = l2_normalize_columns(&DenseMatrix::new(d, n, raw)?)?;
    // a query that is a non-negative mix of columns 1 and 4 plus noise
    let y: Vec<f64> = (0..d)
        .map(|i| 0.7 * x.get(i, 1) + 0.3 * x.get(i, 4) + 0.01 * rng.random_range(-1.0..1.0))
        .collect();

    // The classifier runs only T = 5 iterations; here we solve to accuracy.
    let cfg = SolverConfig::accurate().with_rho(1.0).with_tol(1e-10);
    let admm = nnls_admm(&x, &y, &cfg)?;
    let exact = nnls_oracle(&x, &y)?;

    println!("iterations   {} (converged: {})", admm.iterations, admm.converged);
    for (k, rec) in admm.history.iter().enumerate().take(5) {
        println!(
            "  iter {:>2}: |c-z| {:.2e}  |dc| {:.2e}  |dz| {:.2e}",
            k + 1,
            rec.primal_gap,
            rec.c_change,
            rec.z_change
        );
    }
    println!("admm   z = {:.4?}", admm.coefficients.as_slice());
    println!("oracle c = {:.4?}", exact.as_slice());
    let gap = max_abs_diff(&admm.coefficients, &exact);
    println!("max coefficient gap {gap:.2e}");
    println!(
        "residuals {:.6} vs {:.6}",
        residual_norm(&x, &y, &admm.coefficients)?,
        residual_norm(&x, &y, &exact)?
    );
    let kkt = nnls_kkt(&x, &y, &admm.coefficients)?;
    println!("KKT: {kkt:?}");
    assert!(admm.coefficients.iter().all(|&v| v >= 0.0));
    assert!(gap < 1e-4 && kkt.holds(1e-4));

    let fast = nnls_admm(&x, &y, &SolverConfig::default())?;
    println!(
        "with T = 5: {:.4?} (residual {:.6})",
        fast.coefficients.as_slice(),
        residual_norm(&x, &y, &fast.coefficients)?
    );
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
