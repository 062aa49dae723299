//! Residual checkers, solution generators and classifiers for the μ-sine
//! subtraction law
//!
//! ```text
//! μ(y) k(x σ(y)) = k(x) l(y) − k(y) l(x)                       (sine)
//! ```
//!
//! and the d'Alembert-type equation
//!
//! ```text
//! f(xy) − μ(y) f(σ(y) x) = g(x) h(y)                          (d'Alembert)
//! ```

use std::fmt::Debug;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::morphism::{CFun, InvolutiveAutomorphism, MorphismError, MultiplicativeFunction, MuFunction};
use crate::scalar::Scalar;
use crate::semigroup::{FiniteSemigroup, SemigroupError, SemigroupFile};

pub mod classify;
pub mod dalembert;
pub mod families;
pub mod nullspace;
pub mod sine;

pub use classify::{classify_e2, classify_solution, Classifier, E1Class, E2Class};
pub use dalembert::{gen_e1_family, SolutionDescriptorE1};
pub use nullspace::{is_in_nullspace, nullspace_basis};
pub use sine::{
    check_condition_i, check_condition_ii, gen_e2_family1, gen_e2_family2, gen_e2_family3, sine_identities,
    SineIdentities, SolutionDescriptorE2,
};

/// A semigroup-like carrier with σ and μ, plus the finite set of elements
/// over which identities are quantified.
pub trait Carrier: Sync {
    type Elem: Clone + Debug + PartialEq + Send + Sync + Serialize;

    /// Quantifier range: every element for finite carriers, the window otherwise.
    fn range(&self) -> Vec<Self::Elem>;
    fn op(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn sigma(&self, x: &Self::Elem) -> Self::Elem;
    fn mu(&self, x: &Self::Elem) -> Scalar;
}

/// A function that can be evaluated pointwise on a carrier.
pub trait Eval<E> {
    fn eval(&self, x: &E) -> Scalar;
}

impl Eval<usize> for [Scalar] {
    fn eval(&self, x: &usize) -> Scalar {
        self[*x].clone()
    }
}

impl Eval<usize> for Vec<Scalar> {
    fn eval(&self, x: &usize) -> Scalar {
        self[*x].clone()
    }
}

impl<E, F: Fn(&E) -> Scalar> Eval<E> for F {
    fn eval(&self, x: &E) -> Scalar {
        self(x)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ContextError {
    #[error(transparent)]
    Semigroup(#[from] SemigroupError),
    #[error("σ: {0}")]
    Sigma(MorphismError),
    #[error("μ: {0}")]
    Mu(MorphismError),
    #[error("unsupported schema version {0}")]
    Schema(u32),
}

/// A finite semigroup together with an involutive automorphism `σ` and an
/// admissible `μ`.
#[derive(Clone, Debug)]
pub struct Context {
    pub semigroup: FiniteSemigroup,
    pub sigma: InvolutiveAutomorphism,
    pub mu: MuFunction,
    mu_values: CFun,
}

/// On-disk form of a [`Context`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ContextFile {
    #[serde(default = "schema_one")]
    pub schema: u32,
    pub semigroup: SemigroupFile,
    pub sigma: Vec<usize>,
    pub mu: CFun,
}

fn schema_one() -> u32 {
    1
}

impl Context {
    pub fn new(semigroup: FiniteSemigroup, sigma: InvolutiveAutomorphism, mu: MuFunction) -> Self {
        let mu_values = mu.scalars();
        Context { semigroup, sigma, mu, mu_values }
    }

    /// `σ = id`, `μ ≡ 1`.
    pub fn plain(semigroup: FiniteSemigroup) -> Self {
        let n = semigroup.order();
        Self::new(semigroup, InvolutiveAutomorphism::identity(n), MuFunction::one(n))
    }

    pub fn from_parts(semigroup: FiniteSemigroup, sigma: Vec<usize>, mu: &[Scalar]) -> Result<Self, ContextError> {
        let sigma = InvolutiveAutomorphism::new(&semigroup, sigma).map_err(ContextError::Sigma)?;
        let chi = MultiplicativeFunction::from_scalars(&semigroup, mu).map_err(ContextError::Mu)?;
        let mu = MuFunction::new(&semigroup, &sigma, chi).map_err(ContextError::Mu)?;
        Ok(Self::new(semigroup, sigma, mu))
    }

    pub fn from_file(file: ContextFile) -> Result<Self, ContextError> {
        if file.schema != 1 {
            return Err(ContextError::Schema(file.schema));
        }
        let s = FiniteSemigroup::from_file(file.semigroup)?;
        Self::from_parts(s, file.sigma, &file.mu)
    }

    pub fn to_file(&self) -> ContextFile {
        ContextFile {
            schema: 1,
            semigroup: self.semigroup.to_file(),
            sigma: self.sigma.perm().to_vec(),
            mu: self.mu_values.clone(),
        }
    }

    pub fn order(&self) -> usize {
        self.semigroup.order()
    }

    pub fn mu_scalar(&self, x: usize) -> &Scalar {
        &self.mu_values[x]
    }

    /// `f*` on this context.
    pub fn star(&self, f: &[Scalar]) -> CFun {
        crate::morphism::star(f, &self.mu, &self.sigma)
    }
}

impl Carrier for Context {
    type Elem = usize;

    fn range(&self) -> Vec<usize> {
        self.semigroup.elements().collect()
    }
    fn op(&self, x: &usize, y: &usize) -> usize {
        self.semigroup.mul(*x, *y)
    }
    fn sigma(&self, x: &usize) -> usize {
        self.sigma.apply(*x)
    }
    fn mu(&self, x: &usize) -> Scalar {
        self.mu_values[*x].clone()
    }
}

/// Worst-case residual of an identity quantified over pairs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Residual<E> {
    pub max_abs: f64,
    pub worst: Option<(E, E)>,
    pub exact_zero: bool,
    pub pairs: usize,
}

impl<E> Residual<E> {
    pub fn within(&self, tol: f64) -> bool {
        self.exact_zero || self.max_abs <= tol
    }
}

fn pair_residual<C: Carrier>(c: &C, term: impl Fn(&C::Elem, &C::Elem) -> Scalar) -> Residual<C::Elem> {
    let range = c.range();
    let mut out = Residual { max_abs: 0.0, worst: None, exact_zero: true, pairs: 0 };
    for x in &range {
        for y in &range {
            out.pairs += 1;
            let r = term(x, y);
            if r.is_zero() {
                continue;
            }
            out.exact_zero = false;
            let a = r.abs_f64();
            if out.worst.is_none() || a > out.max_abs {
                out.max_abs = a;
                out.worst = Some((x.clone(), y.clone()));
            }
        }
    }
    out
}

/// `max |μ(y)k(xσ(y)) − k(x)l(y) + k(y)l(x)|`.
pub fn residual_e2<C, K, L>(c: &C, k: &K, l: &L) -> Residual<C::Elem>
where
    C: Carrier,
    K: Eval<C::Elem> + ?Sized,
    L: Eval<C::Elem> + ?Sized,
{
    pair_residual(c, |x, y| {
        let lhs = &c.mu(y) * &k.eval(&c.op(x, &c.sigma(y)));
        let rhs = &k.eval(x) * &l.eval(y) - &k.eval(y) * &l.eval(x);
        lhs - rhs
    })
}

/// `max |f(xy) − μ(y)f(σ(y)x) − g(x)h(y)|`.
pub fn residual_e1<C, F, G, H>(c: &C, f: &F, g: &G, h: &H) -> Residual<C::Elem>
where
    C: Carrier,
    F: Eval<C::Elem> + ?Sized,
    G: Eval<C::Elem> + ?Sized,
    H: Eval<C::Elem> + ?Sized,
{
    pair_residual(c, |x, y| {
        let lhs = f.eval(&c.op(x, y)) - &c.mu(y) * &f.eval(&c.op(&c.sigma(y), x));
        lhs - &g.eval(x) * &h.eval(y)
    })
}

/// `max |k(xy) − k(x)m(y) − k(y)m(x)|`.
pub fn sine_addition_residual<C, K, M>(c: &C, k: &K, m: &M) -> Residual<C::Elem>
where
    C: Carrier,
    K: Eval<C::Elem> + ?Sized,
    M: Eval<C::Elem> + ?Sized,
{
    pair_residual(c, |x, y| k.eval(&c.op(x, y)) - &k.eval(x) * &m.eval(y) - &k.eval(y) * &m.eval(x))
}

/// Violated precondition of a solution descriptor.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DescriptorError {
    #[error("expected {expected} values for {what}, got {got}")]
    LengthMismatch { what: &'static str, expected: usize, got: usize },
    #[error("k must vanish on S² (k({x}) ≠ 0)")]
    KNotVanishingOnS2 { x: usize },
    #[error("k must not be identically zero")]
    KIdenticallyZero,
    #[error("χ is not multiplicative: {0}")]
    NotMultiplicative(MorphismError),
    #[error("χ must be nonzero")]
    ChiIsZero,
    #[error("family requires χ* ≠ χ")]
    ChiEqualsChiStar,
    #[error("family requires χ* = χ")]
    ChiNotStarInvariant,
    #[error("constant {name} must be nonzero")]
    ZeroConstant { name: &'static str },
    #[error("(α, β) must not be (0, 0)")]
    AlphaBetaZero,
    #[error("A is not additive at ({x}, {y})")]
    NotAdditive { x: String, y: String },
    #[error("A must be a nonzero additive function on S \\ I_χ")]
    AdditiveIsZero,
    #[error("A must be defined exactly on S \\ I_χ (mismatch at {x})")]
    AdditiveDomain { x: usize },
    #[error("A ∘ σ ≠ −A at {x}")]
    ANotOdd { x: String },
    #[error("ρ must be defined exactly on P_χ (mismatch at {x})")]
    RhoDomain { x: usize },
    #[error("ρ* ≠ −ρ at {x}")]
    RhoNotOdd { x: usize },
    #[error("condition (I) fails: {0}")]
    ConditionIViolated(String),
    #[error("condition (II) fails: k({x}·{y}) or k({y}·{x}) is nonzero")]
    ConditionIIViolated { x: usize, y: usize },
    #[error("k is not abelian")]
    KNotAbelian,
    #[error("θ is not in the nullspace (worst pair {x}, {y})")]
    ThetaNotInNullspace { x: usize, y: usize },
}

pub(crate) fn check_len(what: &'static str, v: &[Scalar], n: usize) -> Result<(), DescriptorError> {
    if v.len() != n {
        return Err(DescriptorError::LengthMismatch { what, expected: n, got: v.len() });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::catalog::*;

    fn z3_neg() -> Context {
        Context::from_parts(cyclic_group(3), vec![0, 2, 1], &vec![Scalar::one(); 3]).unwrap()
    }

    #[test]
    fn zero_k_has_zero_residual() {
        let ctx = z3_neg();
        let k = vec![Scalar::zero(); 3];
        let l = vec![Scalar::from_int(7), Scalar::i(), Scalar::ratio(1, 5)];
        assert!(residual_e2(&ctx, &k, &l).exact_zero);
    }

    #[test]
    fn z3_sine_spot_value() {
        // k = (χ−χ*)/2, l = (χ+χ*)/2 with χ(x) = ω^x
        let ctx = z3_neg();
        let chi: Vec<Scalar> = (0..3).map(|x| Scalar::root_of_unity(x, 3)).collect();
        let cs = ctx.star(&chi);
        let k: CFun = chi.iter().zip(&cs).map(|(a, b)| (a - b).half()).collect();
        let l: CFun = chi.iter().zip(&cs).map(|(a, b)| (a + b).half()).collect();
        // LHS at (1,2): k(1+σ(2)) = k(2) = −i√3/2
        let lhs = k[ctx.op(&1, &ctx.sigma(&2))].to_complex();
        assert!((lhs.im + 3f64.sqrt() / 2.0).abs() < 1e-15 && lhs.re.abs() < 1e-15);
        let rhs = (&k[1] * &l[2] - &k[2] * &l[1]).to_complex();
        assert!((lhs - rhs).norm() < 1e-15);
        assert!(residual_e2(&ctx, &k, &l).exact_zero);
    }

    #[test]
    fn random_pair_on_z2_is_not_a_solution() {
        let ctx = Context::plain(cyclic_group(2));
        let k = vec![Scalar::from_int(1), Scalar::from_int(2)];
        let l = vec![Scalar::from_int(3), Scalar::from_int(-1)];
        let r = residual_e2(&ctx, &k, &l);
        assert!(!r.exact_zero && r.max_abs > 0.0);
        assert!(r.worst.is_some());
    }

    #[test]
    fn context_file_round_trip() {
        let ctx = z3_neg();
        let text = serde_json::to_string(&ctx.to_file()).unwrap();
        let back = Context::from_file(serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back.sigma, ctx.sigma);
        assert_eq!(back.mu, ctx.mu);
        let bad = ContextFile { sigma: vec![1, 0, 2], ..ctx.to_file() };
        assert!(matches!(Context::from_file(bad), Err(ContextError::Sigma(_))));
    }
}
