use crate::linalg::{norm2, CMatrix, Lu};
use crate::prelude::*;

/// Contraction a second Newton step must show before it is trusted.
const CONTRACTION: f64 = 0.25;
/// Below this relative step size, non-contracting steps count as roundoff.
const ROUNDOFF_ZONE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Failure {
    Singular,
    NotContracting,
    MaxIterations(f64),
    NonFinite,
}

#[derive(Clone, Debug)]
pub(crate) struct Corrected {
    pub x: Vec<C64>,
}

/// Newton iteration with a contraction guard against path jumping.
///
/// `eval` returns the function value and Jacobian. Convergence means a
/// step, or a residual, below `tol·(1 + ‖x‖)`.
pub(crate) fn correct<E>(mut eval: E, x0: &[C64], tol: f64, maxit: usize, guard: bool) -> Result<Corrected, Failure>
where
    E: FnMut(&[C64]) -> (Vec<C64>, CMatrix),
{
    let mut x = x0.to_vec();
    let mut prev_step = f64::INFINITY;
    let mut residual = f64::INFINITY;
    for k in 0..maxit {
        let (f, jac) = eval(&x);
        residual = norm2(&f);
        let scale = 1.0 + norm2(&x);
        if !residual.is_finite() || !scale.is_finite() {
            return Err(Failure::NonFinite);
        }
        if residual <= tol * scale {
            return Ok(Corrected { x });
        }
        let lu = Lu::new(&jac).map_err(|_| Failure::Singular)?;
        let rhs: Vec<C64> = f.iter().map(|v| -v).collect();
        let dx = lu.solve_vec(&rhs);
        let step = norm2(&dx);
        if !step.is_finite() {
            return Err(Failure::NonFinite);
        }
        for (xi, di) in x.iter_mut().zip(&dx) {
            *xi += di;
        }
        if step <= tol * scale {
            return Ok(Corrected { x });
        }
        if k > 0 && step > CONTRACTION * prev_step {
            if step <= ROUNDOFF_ZONE * scale {
                return Ok(Corrected { x });
            }
            if guard {
                return Err(Failure::NotContracting);
            }
        }
        prev_step = step;
    }
    Err(Failure::MaxIterations(residual))
}
