//! Infinite carriers given by closed forms, checked on finite windows.
//!
//! Products are always evaluated by formula; the window only bounds the
//! quantifier range.

use std::collections::HashMap;
use std::sync::Arc;

use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::feq::families::{self, Piece};
use crate::feq::{residual_e1, residual_e2, Carrier, DescriptorError, Residual};
use crate::scalar::{Rational, Scalar};

pub type Elem = Vec<i64>;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "builtin", rename_all = "snake_case")]
pub enum Builtin {
    /// `(ℤ², +)`, `σ(x, y) = (y, x)`, `μ ≡ 1`, `χ ≡ 1`, `A(x, y) = x − y`.
    Lattice2d,
    /// `(ℤ, +)`, `σ(x) = −x`, `μ ≡ 1`, `χ(x) = e^{iλx}` with `λ/π` rational.
    LineWithInversion {
        #[serde(serialize_with = "ser_rational")]
        lambda_over_pi: Rational,
    },
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&crate::scalar::format_rational(r))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Compatibility {
    Yes,
    Unknown,
}

#[derive(Clone, Debug, Serialize)]
pub struct WindowCarrier {
    pub builtin: Builtin,
    pub radius: i64,
    pub compatible: Compatibility,
    #[serde(skip)]
    window: Vec<Elem>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WindowError {
    #[error("radius must be at least 1")]
    BadRadius,
    #[error("payload cannot be evaluated at {0:?}")]
    NonEvaluableProduct(Elem),
    #[error(transparent)]
    Descriptor(#[from] DescriptorError),
}

/// `[−r, r]^d`.
fn cube(dim: usize, r: i64) -> Vec<Elem> {
    let mut out: Vec<Elem> = vec![Vec::new()];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|p| {
                (-r..=r).map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}

pub fn builtin_lattice2d(radius: i64) -> Result<WindowCarrier, WindowError> {
    if radius < 1 {
        return Err(WindowError::BadRadius);
    }
    Ok(WindowCarrier { builtin: Builtin::Lattice2d, radius, compatible: Compatibility::Yes, window: cube(2, radius) })
}

pub fn builtin_line_with_inversion(radius: i64, lambda_over_pi: Rational) -> Result<WindowCarrier, WindowError> {
    if radius < 1 {
        return Err(WindowError::BadRadius);
    }
    Ok(WindowCarrier {
        builtin: Builtin::LineWithInversion { lambda_over_pi },
        radius,
        compatible: Compatibility::Yes,
        window: cube(1, radius),
    })
}

impl WindowCarrier {
    /// The same carrier with a different quantifier range.
    pub fn with_window(&self, window: Vec<Elem>) -> Self {
        WindowCarrier { window, ..self.clone() }
    }

    pub fn window(&self) -> &[Elem] {
        &self.window
    }

    pub fn chi(&self, x: &Elem) -> Scalar {
        match &self.builtin {
            Builtin::Lattice2d => Scalar::one(),
            Builtin::LineWithInversion { lambda_over_pi } => {
                // e^{iπ(p/q)x} = e^{2πi·px/(2q)}
                let p = lambda_over_pi.numer().to_i64().expect("small λ");
                let q = lambda_over_pi.denom().to_u32().expect("small λ");
                Scalar::root_of_unity(p * x[0], 2 * q)
            }
        }
    }

    pub fn chi_star(&self, x: &Elem) -> Scalar {
        &self.mu(x) * &self.chi(&self.sigma(x))
    }

    /// Declared nonzero additive function, odd under `σ`.
    pub fn additive(&self, x: &Elem) -> Scalar {
        match &self.builtin {
            Builtin::Lattice2d => Scalar::from_int(x[0] - x[1]),
            Builtin::LineWithInversion { .. } => Scalar::from_int(x[0]),
        }
    }

    /// Audit of every declared identity on the current window.
    pub fn audit(&self) -> AuditReport {
        let w = &self.window;
        let pairs = || w.iter().flat_map(|x| w.iter().map(move |y| (x, y)));
        let associative = w
            .iter()
            .all(|x| pairs().all(|(y, z)| self.op(&self.op(x, y), z) == self.op(x, &self.op(y, z))));
        let sigma_involutive = w.iter().all(|x| self.sigma(&self.sigma(x)) == *x);
        let sigma_multiplicative =
            pairs().all(|(x, y)| self.sigma(&self.op(x, y)) == self.op(&self.sigma(x), &self.sigma(y)));
        let mu_multiplicative = pairs().all(|(x, y)| self.mu(&self.op(x, y)) == &self.mu(x) * &self.mu(y));
        let mu_admissible = w.iter().all(|x| self.mu(&self.op(x, &self.sigma(x))).is_one());
        let chi_multiplicative = pairs().all(|(x, y)| self.chi(&self.op(x, y)) == &self.chi(x) * &self.chi(y));
        let additive = pairs().all(|(x, y)| self.additive(&self.op(x, y)) == self.additive(x) + self.additive(y));
        let additive_odd = w.iter().all(|x| self.additive(&self.sigma(x)) == -self.additive(x));
        let additive_nonzero = w.iter().any(|x| !self.additive(x).is_zero());
        let chi_star_equals_chi = w.iter().all(|x| self.chi_star(x) == self.chi(x));
        AuditReport {
            associative,
            sigma_involutive,
            sigma_multiplicative,
            mu_multiplicative,
            mu_admissible,
            chi_multiplicative,
            additive,
            additive_odd,
            additive_nonzero,
            chi_star_equals_chi,
        }
    }
}

impl Carrier for WindowCarrier {
    type Elem = Elem;

    fn range(&self) -> Vec<Elem> {
        self.window.clone()
    }
    fn op(&self, x: &Elem, y: &Elem) -> Elem {
        x.iter().zip(y).map(|(a, b)| a + b).collect()
    }
    fn sigma(&self, x: &Elem) -> Elem {
        match self.builtin {
            Builtin::Lattice2d => vec![x[1], x[0]],
            Builtin::LineWithInversion { .. } => vec![-x[0]],
        }
    }
    fn mu(&self, _: &Elem) -> Scalar {
        Scalar::one()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub associative: bool,
    pub sigma_involutive: bool,
    pub sigma_multiplicative: bool,
    pub mu_multiplicative: bool,
    pub mu_admissible: bool,
    pub chi_multiplicative: bool,
    pub additive: bool,
    pub additive_odd: bool,
    pub additive_nonzero: bool,
    pub chi_star_equals_chi: bool,
}

impl AuditReport {
    /// Everything except the χ* = χ flag, which is a property rather than an invariant.
    pub fn all_hold(&self) -> bool {
        self.associative
            && self.sigma_involutive
            && self.sigma_multiplicative
            && self.mu_multiplicative
            && self.mu_admissible
            && self.chi_multiplicative
            && self.additive
            && self.additive_odd
            && self.additive_nonzero
    }
}

/// A closed-form function on a window carrier; `None` means not evaluable.
#[derive(Clone)]
pub struct WindowFn(Arc<dyn Fn(&Elem) -> Option<Scalar> + Send + Sync>);

impl WindowFn {
    pub fn new(f: impl Fn(&Elem) -> Option<Scalar> + Send + Sync + 'static) -> Self {
        WindowFn(Arc::new(f))
    }

    pub fn eval(&self, x: &Elem) -> Option<Scalar> {
        (self.0)(x)
    }

    /// The same function with one value replaced.
    pub fn perturbed(&self, at: Elem, by: Scalar) -> Self {
        let inner = self.clone();
        WindowFn::new(move |x| {
            let v = inner.eval(x)?;
            Some(if *x == at { v + by.clone() } else { v })
        })
    }
}

#[derive(Clone)]
pub enum WindowPayload {
    Sine { k: WindowFn, l: WindowFn },
    Dalembert { f: WindowFn, g: WindowFn, h: WindowFn },
}

#[derive(Clone, Debug, Serialize)]
pub struct WindowReport {
    pub carrier: WindowCarrier,
    pub equation: &'static str,
    pub window_size: usize,
    pub audit: AuditReport,
    pub residual: Residual<Elem>,
}

/// Runs the payload's residual over `W × W`.
pub fn verify_window(c: &WindowCarrier, payload: &WindowPayload) -> Result<WindowReport, WindowError> {
    let w = &c.window;
    let mut points: Vec<Elem> = Vec::new();
    for x in w {
        points.push(x.clone());
        for y in w {
            let sy = c.sigma(y);
            points.push(c.op(x, y));
            points.push(c.op(x, &sy));
            points.push(c.op(&sy, x));
        }
    }
    let table = |f: &WindowFn| -> Result<HashMap<Elem, Scalar>, WindowError> {
        let mut m = HashMap::new();
        for p in &points {
            if !m.contains_key(p) {
                let v = f.eval(p).ok_or_else(|| WindowError::NonEvaluableProduct(p.clone()))?;
                m.insert(p.clone(), v);
            }
        }
        Ok(m)
    };
    let lookup = |m: HashMap<Elem, Scalar>| move |x: &Elem| m[x].clone();
    let (equation, residual) = match payload {
        WindowPayload::Sine { k, l } => {
            let (k, l) = (lookup(table(k)?), lookup(table(l)?));
            ("sine", residual_e2(c, &k, &l))
        }
        WindowPayload::Dalembert { f, g, h } => {
            let (f, g, h) = (lookup(table(f)?), lookup(table(g)?), lookup(table(h)?));
            ("dalembert", residual_e1(c, &f, &g, &h))
        }
    };
    Ok(WindowReport { carrier: c.clone(), equation, window_size: w.len(), audit: c.audit(), residual })
}

fn require_additive_family(c: &WindowCarrier) -> Result<(), DescriptorError> {
    let audit = c.audit();
    if !audit.chi_star_equals_chi {
        return Err(DescriptorError::ChiNotStarInvariant);
    }
    if !audit.additive_nonzero {
        return Err(DescriptorError::AdditiveIsZero);
    }
    if let Some(x) = c.window.iter().find(|x| c.additive(&c.sigma(x)) != -c.additive(x)) {
        return Err(DescriptorError::ANotOdd { x: format!("{x:?}") });
    }
    Ok(())
}

/// Sine family with `χ* = χ` and the declared `A`: `k = χA`, `l = χ(1 + cA)`.
/// The builtins have `I_χ = ∅`, so there is no `ρ` piece.
pub fn window_sine_additive(c: &WindowCarrier, cc: Scalar) -> Result<WindowPayload, WindowError> {
    require_additive_family(c)?;
    let pieces = {
        let c = c.clone();
        move |x: &Elem| Piece::Outside { chi: c.chi(x), additive: c.additive(x) }
    };
    let p2 = pieces.clone();
    let c2 = cc.clone();
    Ok(WindowPayload::Sine {
        k: WindowFn::new(move |x| Some(families::sine_additive(&pieces(x), &cc).0)),
        l: WindowFn::new(move |x| Some(families::sine_additive(&p2(x), &c2).1)),
    })
}

fn split3(
    g: impl Fn(&Elem) -> (Scalar, Scalar, Scalar) + Send + Sync + Clone + 'static,
) -> (WindowFn, WindowFn, WindowFn) {
    let (g1, g2) = (g.clone(), g.clone());
    (WindowFn::new(move |x| Some(g(x).0)), WindowFn::new(move |x| Some(g1(x).1)), WindowFn::new(move |x| Some(g2(x).2)))
}

/// d'Alembert family with `χ ≠ χ*` and constant `θ`.
pub fn window_dalembert_character(
    c: &WindowCarrier,
    theta: Scalar,
    alpha: Scalar,
    beta: Scalar,
) -> Result<WindowPayload, WindowError> {
    if c.audit().chi_star_equals_chi {
        return Err(DescriptorError::ChiEqualsChiStar.into());
    }
    if alpha.is_zero() && beta.is_zero() {
        return Err(DescriptorError::AlphaBetaZero.into());
    }
    let c = c.clone();
    let (f, g, h) = split3(move |x: &Elem| {
        families::dalembert_character(&theta, &c.chi(x), &c.chi_star(x), &alpha, &beta)
    });
    Ok(WindowPayload::Dalembert { f, g, h })
}

/// d'Alembert family with `χ = χ*`, the declared `A` and constant `θ`.
pub fn window_dalembert_additive(
    c: &WindowCarrier,
    theta: Scalar,
    alpha: Scalar,
    beta: Scalar,
) -> Result<WindowPayload, WindowError> {
    require_additive_family(c)?;
    if alpha.is_zero() && beta.is_zero() {
        return Err(DescriptorError::AlphaBetaZero.into());
    }
    let c = c.clone();
    let (f, g, h) = split3(move |x: &Elem| {
        let (chi, a) = (c.chi(x), c.additive(x));
        families::dalembert_additive(&theta, Some((&chi, &a)), &alpha, &beta)
    });
    Ok(WindowPayload::Dalembert { f, g, h })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn third() -> Rational {
        Rational::new(2.into(), 3.into())
    }

    #[test]
    fn lattice_closed_forms() {
        let c = builtin_lattice2d(1).unwrap();
        assert_eq!(c.window().len(), 9);
        assert!(c.audit().all_hold());
        assert_eq!(c.additive(&vec![2, -1]), Scalar::from_int(3));
        assert_eq!(c.additive(&c.sigma(&vec![2, -1])), Scalar::from_int(-3));
        assert!(matches!(builtin_lattice2d(0), Err(WindowError::BadRadius)));
    }

    #[test]
    fn line_matches_z3_characters() {
        let c = builtin_line_with_inversion(5, third()).unwrap();
        for x in -5..=5i64 {
            assert_eq!(c.chi(&vec![x]), Scalar::root_of_unity(x.rem_euclid(3), 3));
        }
        assert!(!c.audit().chi_star_equals_chi);
        let zero = builtin_line_with_inversion(2, Rational::from_integer(0.into())).unwrap();
        assert!(matches!(
            window_dalembert_character(&zero, Scalar::zero(), Scalar::one(), Scalar::zero()),
            Err(WindowError::Descriptor(DescriptorError::ChiEqualsChiStar))
        ));
    }

    #[test]
    fn sine_additive_on_lattice() {
        let c = builtin_lattice2d(2).unwrap();
        for cc in [0, 3] {
            let p = window_sine_additive(&c, Scalar::from_int(cc)).unwrap();
            assert!(verify_window(&c, &p).unwrap().residual.exact_zero);
        }
        let WindowPayload::Sine { k, l } = window_sine_additive(&c, Scalar::zero()).unwrap() else { unreachable!() };
        let bad = WindowPayload::Sine { k, l: l.perturbed(vec![1, 0], Scalar::one()) };
        let r = verify_window(&c, &bad).unwrap();
        assert!(!r.residual.exact_zero && r.residual.worst.is_some());
    }

    #[test]
    fn dalembert_examples() {
        let c = builtin_lattice2d(2).unwrap();
        let p = window_dalembert_additive(&c, Scalar::zero(), Scalar::one(), Scalar::from_int(2)).unwrap();
        let WindowPayload::Dalembert { f, g, h } = &p else { unreachable!() };
        // f = A/2 + A²/2, g = 1 + 2A, h = A at (2, −1) where A = 3
        assert_eq!(f.eval(&vec![2, -1]), Some(Scalar::from_int(6)));
        assert_eq!(g.eval(&vec![2, -1]), Some(Scalar::from_int(7)));
        assert_eq!(h.eval(&vec![2, -1]), Some(Scalar::from_int(3)));
        assert!(verify_window(&c, &p).unwrap().residual.exact_zero);
        let bad = WindowPayload::Dalembert { f: f.clone(), g: g.clone(), h: h.perturbed(vec![0, 1], Scalar::one()) };
        assert!(!verify_window(&c, &bad).unwrap().residual.exact_zero);

        let line = builtin_line_with_inversion(3, third()).unwrap();
        let p = window_dalembert_character(&line, Scalar::from_int(5), Scalar::from_int(-1), Scalar::from_int(3)).unwrap();
        assert!(verify_window(&line, &p).unwrap().residual.exact_zero);
    }

    #[test]
    fn missing_values_and_empty_window() {
        let c = builtin_lattice2d(1).unwrap();
        let partial = WindowFn::new(|x: &Elem| (x[0].abs() <= 1).then(Scalar::one));
        let p = WindowPayload::Sine { k: partial.clone(), l: partial };
        assert!(matches!(verify_window(&c, &p), Err(WindowError::NonEvaluableProduct(_))));

        let empty = c.with_window(Vec::new());
        let junk = WindowFn::new(|_: &Elem| Some(Scalar::one()));
        let r = verify_window(&empty, &WindowPayload::Sine { k: junk.clone(), l: junk }).unwrap();
        assert!(r.residual.exact_zero && r.residual.pairs == 0);
    }
}
