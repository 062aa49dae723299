//! Levenberg–Marquardt on small holomorphic systems.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

/// Residuals and Jacobian of a polynomial system in `n` complex unknowns.
pub trait System {
    fn unknowns(&self) -> usize;
    fn eval(&self, z: &[C64]) -> (Vec<C64>, DMatrix<C64>);
}

#[derive(Clone, Copy, Debug)]
pub struct LmOptions {
    pub max_iter: usize,
    pub tol: f64,
}

#[derive(Clone, Debug)]
pub struct LmResult {
    pub z: Vec<C64>,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn sup(r: &[C64]) -> f64 {
    r.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

fn sq(r: &[C64]) -> f64 {
    r.iter().map(|v| v.norm_sqr()).sum()
}

/// Extra steps taken once the tolerance is met.
const MAX_POLISH: usize = 8;

/// Minimizes `‖r(z)‖²` from `z0`; converged means `‖r‖∞ ≤ tol`.
pub fn levenberg_marquardt<S: System>(sys: &S, z0: Vec<C64>, opts: LmOptions) -> LmResult {
    let n = sys.unknowns();
    let mut z = z0;
    let (mut r, mut j) = sys.eval(&z);
    let mut cost = sq(&r);
    let mut lambda = 1e-3;
    let mut iterations = 0;
    let mut polish_steps = 0;
    for it in 0..opts.max_iter {
        iterations = it;
        if !cost.is_finite() {
            break;
        }
        let polishing = sup(&r) <= opts.tol;
        if polishing {
            if polish_steps >= MAX_POLISH || cost == 0.0 {
                break;
            }
            polish_steps += 1;
        }
        let jh = j.adjoint();
        let jhj = &jh * &j;
        let g = &jh * DVector::from_column_slice(&r);
        let mut improved = false;
        for _ in 0..12 {
            let mut a = jhj.clone();
            for d in 0..n {
                a[(d, d)] += C64::new(lambda * (1.0 + jhj[(d, d)].re), 0.0);
            }
            let Some(step) = a.lu().solve(&(-&g)) else {
                lambda *= 10.0;
                continue;
            };
            let trial: Vec<C64> = z.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            let (rt, jt) = sys.eval(&trial);
            let ct = sq(&rt);
            if ct.is_finite() && ct < cost {
                z = trial;
                r = rt;
                j = jt;
                cost = ct;
                lambda = (lambda / 10.0).max(1e-15);
                improved = true;
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
        if polishing {
            // keep taking steps past the tolerance while they help
            lambda = 1e-15;
        }
    }
    let residual = sup(&r);
    LmResult { converged: residual <= opts.tol, residual, z, iterations }
}
