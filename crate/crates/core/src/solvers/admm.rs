//! ADMM for `min ‖y − Xc‖² + g(z)  s.t.  c = z`, with the Lagrangian
//! `‖y − Xc‖² + ⟨δ, z − c⟩ + (ρ/2)‖z − c‖²`.
//!
//! For NNLS `g` is the indicator of the non-negative orthant and the z-step is
//! a clamp; for the lasso `g = λ‖·‖₁` and the z-step is soft thresholding at
//! `λ/ρ`. Both share the c-step, which applies the pre-stored
//! `(XᵀX + (ρ/2)I)⁻¹`.

use super::{AdmmState, CodingResult, ConvergenceRecord, DictionaryFactorization, SolverConfig};
use crate::error::{Error, Result};
use crate::linalg::{max_abs_diff, DenseMatrix, Vector};

fn check_len(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch {
            context,
            expected,
            found,
        });
    }
    Ok(())
}

/// `c = (XᵀX + (ρ/2)I)⁻¹ (Xᵀy + (ρ/2)z + δ/2)`
pub fn admm_c_update(
    fact: &DictionaryFactorization,
    xty: &[f64],
    z: &[f64],
    delta: &[f64],
    rho: f64,
) -> Result<Vector> {
    let n = fact.dimension();
    check_len("c-update Xᵀy", n, xty.len())?;
    check_len("c-update z", n, z.len())?;
    check_len("c-update delta", n, delta.len())?;
    let half_rho = 0.5 * rho;
    let rhs: Vec<f64> = xty
        .iter()
        .zip(z)
        .zip(delta)
        .map(|((a, zi), di)| a + half_rho * zi + 0.5 * di)
        .collect();
    fact.apply(&rhs)
}

/// `z = max(0, c − δ/ρ)` elementwise.
pub fn admm_z_update(c: &[f64], delta: &[f64], rho: f64) -> Result<Vector> {
    check_len("z-update", c.len(), delta.len())?;
    Ok(c.iter()
        .zip(delta)
        .map(|(ci, di)| (ci - di / rho).max(0.0))
        .collect())
}

/// `δ' = δ + ρ(z − c)`
pub fn admm_dual_update(delta: &[f64], z: &[f64], c: &[f64], rho: f64) -> Result<Vector> {
    check_len("dual update z", delta.len(), z.len())?;
    check_len("dual update c", delta.len(), c.len())?;
    Ok(delta
        .iter()
        .zip(z.iter().zip(c))
        .map(|(di, (zi, ci))| di + rho * (zi - ci))
        .collect())
}

/// `sign(v)·max(|v| − κ, 0)` elementwise.
pub fn soft_threshold(v: &[f64], kappa: f64) -> Vector {
    v.iter()
        .map(|&x| {
            if x > kappa {
                x - kappa
            } else if x < -kappa {
                x + kappa
            } else {
                0.0
            }
        })
        .collect()
}

/// Non-negative least squares `min ‖y − Xc‖² s.t. c ≥ 0` by ADMM.
///
/// Builds the factorization for `cfg.rho` and runs [`nnls_admm_with`].
pub fn nnls_admm(x: &DenseMatrix, y: &[f64], cfg: &SolverConfig) -> Result<CodingResult> {
    cfg.validate()?;
    let fact = super::build_factorization(x, cfg.rho)?;
    nnls_admm_with(x, &fact, y, cfg)
}

/// NNLS by ADMM against a pre-stored factorization of `XᵀX + (ρ/2)I`.
///
/// Starts from `c = z = δ = 0` and stops once the primal gap and the changes
/// in `c` and `z` are all within `cfg.tol` (∞-norm) in the same iteration, or
/// after `cfg.max_iters` iterations. The reported coefficients are `z`.
pub fn nnls_admm_with(
    x: &DenseMatrix,
    fact: &DictionaryFactorization,
    y: &[f64],
    cfg: &SolverConfig,
) -> Result<CodingResult> {
    run_admm(x, fact, y, cfg, |c, delta| admm_z_update(c, delta, cfg.rho))
}

/// ℓ1-regularised coding `min ‖y − Xc‖² + λ‖c‖₁` by ADMM.
pub fn lasso_admm(x: &DenseMatrix, y: &[f64], cfg: &SolverConfig) -> Result<CodingResult> {
    check_lasso(cfg)?;
    let fact = super::build_factorization(x, cfg.rho)?;
    lasso_admm_with(x, &fact, y, cfg)
}

/// Lasso ADMM against a pre-stored factorization; the z-step soft-thresholds
/// `c − δ/ρ` at `λ/ρ`.
pub fn lasso_admm_with(
    x: &DenseMatrix,
    fact: &DictionaryFactorization,
    y: &[f64],
    cfg: &SolverConfig,
) -> Result<CodingResult> {
    check_lasso(cfg)?;
    let kappa = cfg.lambda / cfg.rho;
    let inv_rho = 1.0 / cfg.rho;
    run_admm(x, fact, y, cfg, |c, delta| {
        check_len("lasso z-step", c.len(), delta.len())?;
        let v: Vec<f64> = c.iter().zip(delta).map(|(ci, di)| ci - inv_rho * di).collect();
        Ok(soft_threshold(&v, kappa))
    })
}

fn check_lasso(cfg: &SolverConfig) -> Result<()> {
    cfg.validate()?;
    if cfg.lambda <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "lasso needs lambda > 0, got {}",
            cfg.lambda
        )));
    }
    Ok(())
}

fn run_admm<Z>(
    x: &DenseMatrix,
    fact: &DictionaryFactorization,
    y: &[f64],
    cfg: &SolverConfig,
    z_step: Z,
) -> Result<CodingResult>
where
    Z: Fn(&[f64], &[f64]) -> Result<Vector>,
{
    cfg.validate()?;
    check_len("query length", x.rows(), y.len())?;
    check_len("factorization size", x.cols(), fact.dimension())?;
    let half_rho = cfg.rho / 2.0;
    if (fact.shift() - half_rho).abs() > 1e-12 * half_rho {
        return Err(Error::InvalidConfig(format!(
            "factorization was built for rho = {}, config has rho = {}",
            2.0 * fact.shift(),
            cfg.rho
        )));
    }
    let n = x.cols();
    let mut state = AdmmState::zeros(n);
    if y.iter().all(|v| *v == 0.0) {
        return Ok(CodingResult {
            coefficients: Vector::zeros(n),
            iterations: 0,
            converged: true,
            history: Vec::new(),
            state: Some(state),
        });
    }

    let xty = x.matvec(y, true)?;
    let mut history = Vec::with_capacity(cfg.max_iters.min(1024));
    let mut converged = false;
    for _ in 0..cfg.max_iters {
        let c = admm_c_update(fact, &xty, &state.z, &state.delta, cfg.rho)?;
        let z = z_step(&c, &state.delta)?;
        let delta = admm_dual_update(&state.delta, &z, &c, cfg.rho)?;
        let record = ConvergenceRecord {
            primal_gap: max_abs_diff(&c, &z),
            c_change: max_abs_diff(&c, &state.c),
            z_change: max_abs_diff(&z, &state.z),
        };
        history.push(record);
        state = AdmmState {
            c,
            z,
            delta,
            iter: state.iter + 1,
        };
        if record.within(cfg.tol) {
            converged = true;
            break;
        }
    }
    if let Some(index) = state.z.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            context: "ADMM iterate",
            index,
        });
    }
    Ok(CodingResult {
        coefficients: state.z.clone(),
        iterations: state.iter,
        converged,
        history,
        state: Some(state),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::{build_factorization, nnls_kkt, nnls_oracle};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn approx(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        let d = max_abs_diff(a, b);
        assert!(d <= tol, "{a:?} vs {b:?} (deviation {d:e})");
    }

    fn skewed_pair() -> DenseMatrix {
        DenseMatrix::from_columns(&[[0.8, 0.6], [0.6, 0.8]]).unwrap()
    }

    #[test]
    fn c_update_examples() {
        let id = DenseMatrix::identity(2);
        let f = build_factorization(&id, 2.0).unwrap();
        let y = [1.0, 1.0];
        let xty = id.matvec(&y, true).unwrap();
        let c = admm_c_update(&f, &xty, &[1.0, 1.0], &[0.0, 0.0], 2.0).unwrap();
        approx(&c, &[1.0, 1.0], 1e-15);
        let c = admm_c_update(&f, &xty, &[0.0, 0.0], &[0.0, 0.0], 2.0).unwrap();
        approx(&c, &[0.5, 0.5], 1e-15);

        // XᵀX + I/2 = [[1.5, 0.96], [0.96, 1.5]], Xᵀy = [0.8, 0.6]; hand inverse
        let x = skewed_pair();
        let f = build_factorization(&x, 1.0).unwrap();
        let xty = x.matvec(&[1.0, 0.0], true).unwrap();
        let c = admm_c_update(&f, &xty, &[0.0, 0.0], &[0.0, 0.0], 1.0).unwrap();
        let det = 1.5 * 1.5 - 0.96 * 0.96;
        let expected = [
            (1.5 * 0.8 - 0.96 * 0.6) / det,
            (-0.96 * 0.8 + 1.5 * 0.6) / det,
        ];
        approx(&c, &expected, 1e-12);

        assert!(admm_c_update(&f, &xty, &[0.0], &[0.0, 0.0], 1.0).is_err());
    }

    #[test]
    fn z_update_examples() {
        approx(&admm_z_update(&[0.5, -0.2], &[0.0, 0.0], 1.0).unwrap(), &[0.5, 0.0], 0.0);
        approx(&admm_z_update(&[1.0, 1.0], &[2.0, 0.0], 2.0).unwrap(), &[0.0, 1.0], 0.0);
        approx(&admm_z_update(&[0.0, 0.0], &[0.0, 0.0], 1.0).unwrap(), &[0.0, 0.0], 0.0);
        assert!(admm_z_update(&[0.0], &[0.0, 0.0], 1.0).is_err());
    }

    #[test]
    fn dual_update_examples() {
        approx(
            &admm_dual_update(&[0.0, 0.0], &[1.0, 0.0], &[1.0, 1.0], 2.0).unwrap(),
            &[0.0, -2.0],
            0.0,
        );
        approx(
            &admm_dual_update(&[0.3, -0.7], &[1.0, 2.0], &[1.0, 2.0], 5.0).unwrap(),
            &[0.3, -0.7],
            0.0,
        );
        approx(&admm_dual_update(&[1.0], &[0.0], &[2.0], 1.0).unwrap(), &[-1.0], 0.0);
        assert!(admm_dual_update(&[1.0], &[0.0, 1.0], &[2.0], 1.0).is_err());
    }

    #[test]
    fn soft_threshold_examples() {
        approx(&soft_threshold(&[1.2, -0.3, -0.9], 0.5), &[0.7, 0.0, -0.4], 1e-15);
        let v = [0.4, -2.0, 0.0];
        approx(&soft_threshold(&v, 0.0), &v, 0.0);
        approx(&soft_threshold(&v, 2.0), &[0.0, 0.0, 0.0], 0.0);
    }

    #[test]
    fn nnls_examples() {
        let cfg = SolverConfig::accurate().with_tol(1e-10);
        let id = DenseMatrix::identity(2);
        let r = nnls_admm(&id, &[0.6, 0.8], &cfg).unwrap();
        assert!(r.converged);
        approx(&r.coefficients, &[0.6, 0.8], 1e-8);

        let r = nnls_admm(&id, &[1.0, -1.0], &cfg).unwrap();
        approx(&r.coefficients, &[1.0, 0.0], 1e-8);

        let r = nnls_admm(&skewed_pair(), &[1.0, 0.0], &cfg).unwrap();
        approx(&r.coefficients, &[0.8, 0.0], 1e-8);
        assert_eq!(
            nnls_oracle(&skewed_pair(), &[1.0, 0.0]).unwrap().as_slice(),
            &[0.8, 0.0]
        );
    }

    #[test]
    fn nnls_zero_query_returns_immediately() {
        let r = nnls_admm(&skewed_pair(), &[0.0, 0.0], &SolverConfig::default()).unwrap();
        assert!(r.converged);
        assert_eq!(r.iterations, 0);
        assert_eq!(r.coefficients.as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn nnls_rejects_mismatched_inputs() {
        let x = skewed_pair();
        assert!(matches!(
            nnls_admm(&x, &[1.0], &SolverConfig::default()),
            Err(Error::DimensionMismatch { .. })
        ));
        let bad = SolverConfig::default().with_rho(0.0);
        assert!(matches!(nnls_admm(&x, &[1.0, 0.0], &bad), Err(Error::InvalidConfig(_))));
        let f = build_factorization(&x, 2.0).unwrap();
        assert!(nnls_admm_with(&x, &f, &[1.0, 0.0], &SolverConfig::default()).is_err());
    }

    #[test]
    fn nnls_history_and_convergence_flag_are_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let x = DenseMatrix::new(
            12,
            6,
            (0..72).map(|_| StandardNormal.sample(&mut rng)).collect(),
        )
        .unwrap();
        let y: Vec<f64> = (0..12).map(|_| StandardNormal.sample(&mut rng)).collect();
        let cfg = SolverConfig::accurate().with_tol(1e-9);
        let r = nnls_admm(&x, &y, &cfg).unwrap();
        assert!(r.converged);
        assert_eq!(r.history.len(), r.iterations);
        assert!(r.history.last().unwrap().within(cfg.tol));
        assert!(r.coefficients.iter().all(|v| *v >= 0.0));
        let kkt = nnls_kkt(&x, &y, &r.coefficients).unwrap();
        assert!(kkt.holds(1e-4), "{kkt:?}");

        let short = nnls_admm(&x, &y, &SolverConfig::default()).unwrap();
        assert_eq!(short.iterations, 5);
        assert!(!short.converged);
        assert!(short.coefficients.iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn lasso_examples() {
        let id = DenseMatrix::identity(2);
        let cfg = SolverConfig::accurate().with_tol(1e-10).with_lambda(1e4);
        let r = lasso_admm(&id, &[1.0, 0.5], &cfg).unwrap();
        approx(&r.coefficients, &[0.0, 0.0], 1e-8);

        let lambda = 0.1;
        let cfg = SolverConfig::accurate().with_tol(1e-10).with_lambda(lambda);
        let r = lasso_admm(&id, &[1.0, 0.0], &cfg).unwrap();
        let expected = soft_threshold(&[1.0, 0.0], lambda / 2.0);
        approx(&r.coefficients, &expected, 1e-8);
        approx(&r.coefficients, &[1.0 - lambda / 2.0, 0.0], 1e-8);

        let zero = SolverConfig::accurate();
        assert!(matches!(
            lasso_admm(&id, &[1.0, 0.0], &zero),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn lasso_satisfies_subgradient_optimality() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..10 {
            let x = DenseMatrix::new(
                8,
                5,
                (0..40).map(|_| StandardNormal.sample(&mut rng)).collect(),
            )
            .unwrap();
            let y: Vec<f64> = (0..8).map(|_| StandardNormal.sample(&mut rng)).collect();
            let lambda = 0.5;
            let cfg = SolverConfig::accurate().with_tol(1e-10).with_lambda(lambda);
            let r = lasso_admm(&x, &y, &cfg).unwrap();
            assert!(r.converged);
            let c = &r.coefficients;
            let mut resid = x.matvec(c, false).unwrap();
            for (ri, yi) in resid.iter_mut().zip(&y) {
                *ri -= yi;
            }
            let g = x.matvec(&resid, true).unwrap().scaled(2.0);
            for i in 0..c.len() {
                if c[i] != 0.0 {
                    assert!((g[i] + lambda * c[i].signum()).abs() <= 1e-4, "g={g:?} c={c:?}");
                } else {
                    assert!(g[i].abs() <= lambda + 1e-4, "g={g:?} c={c:?}");
                }
            }
        }
    }
}
