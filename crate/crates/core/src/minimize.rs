//! Derivative-free scalar minimization.

use argmin::core::{CostFunction, Executor, State};
use argmin::solver::brent::BrentOpt;

use crate::error::{Error, Result};

struct Scalar<'a>(&'a dyn Fn(f64) -> f64);

impl CostFunction for Scalar<'_> {
    type Param = f64;
    type Output = f64;

    fn cost(&self, x: &f64) -> std::result::Result<f64, argmin::core::Error> {
        Ok((self.0)(*x))
    }
}

/// Brent minimization of `f` on `[lo, hi]` to absolute parameter tolerance
/// `tol` (plus the unavoidable relative term `sqrt(eps)·|x|`).
pub fn brent(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)> {
    let solver = BrentOpt::new(lo, hi).set_tolerance(f64::EPSILON.sqrt(), tol);
    let res = Executor::new(Scalar(f), solver)
        .configure(|s| s.max_iters(500))
        .run()
        .map_err(|e| Error::domain("brent", e.to_string()))?;
    let state = res.state();
    let x = *state.get_best_param().ok_or_else(|| Error::domain("brent", "no iterate"))?;
    Ok((x, state.get_best_cost()))
}

/// Cyclic coordinate minimization with Brent line searches inside `bounds`,
/// stopping when no coordinate moves by more than `tol` in a sweep.
pub fn coordinate_descent(
    f: &dyn Fn(&[f64]) -> f64,
    start: &[f64],
    bounds: &[(f64, f64)],
    tol: f64,
) -> Result<(Vec<f64>, f64)> {
    let mut x = start.to_vec();
    let mut fx = f(&x);
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for k in 0..x.len() {
            let line = |t: f64| {
                let mut y = x.clone();
                y[k] = t;
                f(&y)
            };
            let (t, ft) = brent(&line, bounds[k].0, bounds[k].1, tol)?;
            if ft <= fx {
                moved = moved.max((t - x[k]).abs());
                x[k] = t;
                fx = ft;
            }
        }
        if moved <= tol {
            return Ok((x, fx));
        }
    }
    Err(Error::domain("coordinate_descent", "no convergence in 500 sweeps"))
}
