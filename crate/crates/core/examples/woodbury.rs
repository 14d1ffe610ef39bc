//! The shifted Gram inverse `(XᵀX + sI)⁻¹` applied two ways: a direct N×N
//! Cholesky factor and the Woodbury form, which only factors a D×D matrix.
//! With more atoms than features (N > D) the Woodbury form is the cheap one.

use std::error::Error;
use std::time::Instant;

use nrc::linalg::DenseMatrix;
use nrc::solvers::DictionaryFactorization;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let (d, n, shift) = (40, 400, 0.5);
    let x = DenseMatrix::new(d, n, (0..d * n).map(|_| rng.random_range(-1.0..1.0)).collect())?;
    let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();

    let t = Instant::now();
    let direct = DictionaryFactorization::direct(&x, shift)?;
    let t_direct = t.elapsed();
    let t = Instant::now();
    let wood = DictionaryFactorization::woodbury(&x, shift)?;
    let t_wood = t.elapsed();
    let auto = DictionaryFactorization::with_shift(&x, shift)?;

    let a = direct.apply(&v)?;
    let b = wood.apply(&v)?;
    let rel = a.iter().zip(b.iter()).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max) / a.norm_inf();
    println!("D = {d}, N = {n}, shift = {shift}");
    println!("factor time: direct {t_direct:?}, woodbury {t_wood:?}");
    println!("automatic choice uses woodbury: {}", auto.is_woodbury());
    println!("relative deviation of applied vectors: {rel:.2e}");
    assert!(rel <= 1e-8 && auto.is_woodbury());
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
