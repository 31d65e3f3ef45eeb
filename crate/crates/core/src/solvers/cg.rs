//! Matrix-free conjugate gradients for the SPD systems of the lab.
//! Single-threaded and strictly sequential, so solves are deterministic.

use crate::error::{CzError, Result};

pub struct CgOutcome {
    pub iters: usize,
    /// Max-norm of the true residual `b - A x` at exit.
    pub residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Solve `A x = b` with `A` SPD, to `max|b - Ax| <= atol`. `x` carries the
/// initial guess on entry and the solution on exit.
pub fn solve(
    apply: impl Fn(&[f64], &mut [f64]),
    b: &[f64],
    x: &mut [f64],
    atol: f64,
    max_iters: usize,
    context: &str,
) -> Result<CgOutcome> {
    let n = b.len();
    let mut r = vec![0.0; n];
    let mut ap = vec![0.0; n];
    apply(x, &mut ap);
    for i in 0..n {
        r[i] = b[i] - ap[i];
    }
    let mut p = r.clone();
    let mut rs = dot(&r, &r);
    let mut iters = 0;
    loop {
        if max_abs(&r) <= atol {
            // guard against recurrence drift: confirm on the true residual
            apply(x, &mut ap);
            for i in 0..n {
                r[i] = b[i] - ap[i];
            }
            let true_res = max_abs(&r);
            if true_res <= atol * 2.0 {
                return Ok(CgOutcome {
                    iters,
                    residual: true_res,
                });
            }
            p.copy_from_slice(&r);
            rs = dot(&r, &r);
        }
        if iters >= max_iters {
            return Err(CzError::NonConvergence {
                context: context.into(),
                residual: max_abs(&r),
                iters,
            });
        }
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(CzError::NonConvergence {
                context: format!("{context}: operator lost positive-definiteness"),
                residual: max_abs(&r),
                iters,
            });
        }
        let alpha = rs / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rs_new = dot(&r, &r);
        let beta = rs_new / rs;
        rs = rs_new;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        iters += 1;
    }
}
