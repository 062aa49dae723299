//! Fixtures shared by the benchmarks.

use semifeq::semigroup::catalog;
use semifeq::{Context, Scalar};

/// `ℤ₃` with `σ(x) = −x` and `μ ≡ 1`.
pub fn z3_inversion() -> Context {
    Context::from_parts(catalog::cyclic_group(3), vec![0, 2, 1], &[Scalar::one(), Scalar::one(), Scalar::one()])
        .expect("valid context")
}

/// `{1, p, q, 0}` with `σ` swapping `p` and `q`.
pub fn monoid_1pq0_swap() -> Context {
    Context::from_parts(catalog::monoid_1pq0(), vec![0, 2, 1, 3], &vec![Scalar::one(); 4]).expect("valid context")
}
