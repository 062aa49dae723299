//! `N_μ(σ, S) = {θ : θ(xy) − μ(y)θ(σ(y)x) = 0}`.

use super::{residual_e1, Carrier, Context, Residual};
use crate::linalg;
use crate::morphism::CFun;
use crate::scalar::Scalar;

/// Exact basis of the nullspace, one homogeneous equation per pair `(x, y)`.
pub fn nullspace_basis(ctx: &Context) -> Vec<CFun> {
    let n = ctx.order();
    let mut rows: Vec<Vec<Scalar>> = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            let mut row = vec![Scalar::zero(); n];
            row[ctx.op(&x, &y)] += &Scalar::one();
            let j = ctx.op(&ctx.sigma(&y), &x);
            row[j] = &row[j] - ctx.mu_scalar(y);
            if row.iter().any(|v| !v.is_zero()) && !rows.contains(&row) {
                rows.push(row);
            }
        }
    }
    linalg::nullspace(rows, n)
}

/// Residual of the homogeneous equation for `theta`.
pub fn is_in_nullspace(ctx: &Context, theta: &[Scalar]) -> Residual<usize> {
    let zero = |_: &usize| Scalar::zero();
    residual_e1(ctx, theta, &zero, &zero)
}
