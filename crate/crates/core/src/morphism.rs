//! Involutive automorphisms, multiplicative and additive functions, and the
//! star calculus `f*(x) = μ(x) f(σ(x))`.

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg;
use crate::scalar::{Rational, Scalar};
use crate::semigroup::{ElementSet, FiniteSemigroup};

/// A complex-valued function on a finite carrier, one value per element.
pub type CFun = Vec<Scalar>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MorphismError {
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("σ is not a permutation of the carrier")]
    NotPermutation,
    #[error("σ is not involutive at {x}")]
    NotInvolutive { x: usize },
    #[error("σ does not respect the product at ({x}, {y})")]
    NotAutomorphism { x: usize, y: usize },
    #[error("function is not multiplicative at ({x}, {y})")]
    NotMultiplicative { x: usize, y: usize },
    #[error("value at {x} is neither zero nor a root of unity of the admissible order")]
    NotRootOfUnity { x: usize },
    #[error("μ(x·σ(x)) ≠ 1 at x = {x}")]
    NotAdmissible { x: usize },
}

/// A permutation `σ` with `σ(xy) = σ(x)σ(y)` and `σ∘σ = id`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InvolutiveAutomorphism {
    perm: Vec<usize>,
}

impl InvolutiveAutomorphism {
    pub fn identity(n: usize) -> Self {
        InvolutiveAutomorphism { perm: (0..n).collect() }
    }

    pub fn new(s: &FiniteSemigroup, perm: Vec<usize>) -> Result<Self, MorphismError> {
        let n = s.order();
        if perm.len() != n {
            return Err(MorphismError::LengthMismatch { expected: n, got: perm.len() });
        }
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || seen[p] {
                return Err(MorphismError::NotPermutation);
            }
            seen[p] = true;
        }
        if let Some(x) = (0..n).find(|&x| perm[perm[x]] != x) {
            return Err(MorphismError::NotInvolutive { x });
        }
        for x in 0..n {
            for y in 0..n {
                if perm[s.mul(x, y)] != s.mul(perm[x], perm[y]) {
                    return Err(MorphismError::NotAutomorphism { x, y });
                }
            }
        }
        Ok(InvolutiveAutomorphism { perm })
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.perm[x]
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }
}

/// Every involutive automorphism of `s`, identity first.
pub fn enumerate_involutive_automorphisms(s: &FiniteSemigroup) -> Vec<InvolutiveAutomorphism> {
    const UNSET: usize = usize::MAX;
    let n = s.order();
    let mut out = Vec::new();

    fn ok(s: &FiniteSemigroup, p: &[usize]) -> bool {
        let n = s.order();
        for x in 0..n {
            if p[x] == UNSET {
                continue;
            }
            for y in 0..n {
                if p[y] == UNSET {
                    continue;
                }
                let img = p[s.mul(x, y)];
                if img != UNSET && img != s.mul(p[x], p[y]) {
                    return false;
                }
            }
        }
        true
    }

    fn go(s: &FiniteSemigroup, x: usize, p: &mut Vec<usize>, out: &mut Vec<InvolutiveAutomorphism>) {
        let n = s.order();
        if x == n {
            out.push(InvolutiveAutomorphism { perm: p.clone() });
            return;
        }
        if p[x] != UNSET {
            go(s, x + 1, p, out);
            return;
        }
        // σ(x) = x, or σ swaps x with a later unassigned y
        for y in x..n {
            if p[y] != UNSET {
                continue;
            }
            p[x] = y;
            p[y] = x;
            if ok(s, p) {
                go(s, x + 1, p, out);
            }
            p[x] = UNSET;
            p[y] = UNSET;
        }
    }

    go(s, 0, &mut vec![UNSET; n], &mut out);
    out
}

/// A value that is either zero or `e^{2πi·num/den}` in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CharValue {
    Zero,
    Root { num: u32, den: u32 },
}

impl CharValue {
    pub const ONE: CharValue = CharValue::Root { num: 0, den: 1 };

    pub fn root(num: i64, den: u32) -> Self {
        let (num, den) = crate::scalar::reduced_exponent(num, den);
        CharValue::Root { num, den }
    }

    pub fn is_zero(self) -> bool {
        self == CharValue::Zero
    }

    pub fn mul(self, other: CharValue) -> CharValue {
        match (self, other) {
            (CharValue::Root { num: a, den: b }, CharValue::Root { num: c, den: d }) => {
                let l = b.lcm(&d);
                CharValue::root((a * (l / b) + c * (l / d)) as i64, l)
            }
            _ => CharValue::Zero,
        }
    }

    pub fn to_scalar(self) -> Scalar {
        match self {
            CharValue::Zero => Scalar::zero(),
            CharValue::Root { num, den } => Scalar::root_of_unity(num as i64, den),
        }
    }

    pub fn to_complex(self) -> num_complex::Complex64 {
        match self {
            CharValue::Zero => num_complex::Complex64::new(0.0, 0.0),
            CharValue::Root { num, den } => {
                num_complex::Complex64::from_polar(1.0, std::f64::consts::TAU * num as f64 / den as f64)
            }
        }
    }
}

/// `χ(xy) = χ(x)χ(y)` on a finite carrier; values are zero or roots of unity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiplicativeFunction {
    values: Vec<CharValue>,
}

impl MultiplicativeFunction {
    pub fn from_values(s: &FiniteSemigroup, values: Vec<CharValue>) -> Result<Self, MorphismError> {
        if values.len() != s.order() {
            return Err(MorphismError::LengthMismatch { expected: s.order(), got: values.len() });
        }
        for x in s.elements() {
            for y in s.elements() {
                if values[s.mul(x, y)] != values[x].mul(values[y]) {
                    return Err(MorphismError::NotMultiplicative { x, y });
                }
            }
        }
        Ok(MultiplicativeFunction { values })
    }

    /// Accepts exact scalars, matching each against zero and the roots of
    /// unity allowed by the element's period.
    pub fn from_scalars(s: &FiniteSemigroup, f: &[Scalar]) -> Result<Self, MorphismError> {
        if f.len() != s.order() {
            return Err(MorphismError::LengthMismatch { expected: s.order(), got: f.len() });
        }
        let mut values = Vec::with_capacity(f.len());
        for (x, v) in f.iter().enumerate() {
            if v.is_zero() {
                values.push(CharValue::Zero);
                continue;
            }
            let (_, m) = s.index_period(x);
            let found = (0..m as i64).find(|&j| Scalar::root_of_unity(j, m as u32) == *v);
            match found {
                Some(j) => values.push(CharValue::root(j, m as u32)),
                None => return Err(MorphismError::NotRootOfUnity { x }),
            }
        }
        Self::from_values(s, values)
    }

    pub fn constant_one(n: usize) -> Self {
        MultiplicativeFunction { values: vec![CharValue::ONE; n] }
    }

    pub fn values(&self) -> &[CharValue] {
        &self.values
    }

    pub fn at(&self, x: usize) -> CharValue {
        self.values[x]
    }

    pub fn scalars(&self) -> CFun {
        self.values.iter().map(|v| v.to_scalar()).collect()
    }

    pub fn is_identically_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    /// `I_χ = {x : χ(x) = 0}`.
    pub fn zero_set(&self) -> ElementSet {
        self.values.iter().enumerate().filter(|(_, v)| v.is_zero()).map(|(x, _)| x).collect()
    }

    /// `χ*(x) = μ(x)χ(σ(x))`, again multiplicative.
    pub fn star(&self, mu: &MuFunction, sigma: &InvolutiveAutomorphism) -> MultiplicativeFunction {
        let values = (0..self.values.len())
            .map(|x| mu.chi.values[x].mul(self.values[sigma.apply(x)]))
            .collect();
        MultiplicativeFunction { values }
    }

    pub fn is_star_invariant(&self, mu: &MuFunction, sigma: &InvolutiveAutomorphism) -> bool {
        self.star(mu, sigma) == *self
    }
}

/// Complete list of multiplicative functions (including `χ ≡ 0`), by
/// backtracking over `{0} ∪ {m_x-th roots of unity}` per element.
pub fn enumerate_multiplicative(s: &FiniteSemigroup) -> Vec<MultiplicativeFunction> {
    let n = s.order();
    let candidates: Vec<Vec<CharValue>> = s
        .elements()
        .map(|x| {
            let (_, m) = s.index_period(x);
            std::iter::once(CharValue::Zero)
                .chain((0..m as i64).map(|j| CharValue::root(j, m as u32)))
                .collect()
        })
        .collect();

    fn go(
        s: &FiniteSemigroup,
        x: usize,
        cand: &[Vec<CharValue>],
        cur: &mut Vec<Option<CharValue>>,
        out: &mut Vec<MultiplicativeFunction>,
    ) {
        let n = s.order();
        if x == n {
            out.push(MultiplicativeFunction { values: cur.iter().map(|v| v.unwrap()).collect() });
            return;
        }
        for &v in &cand[x] {
            cur[x] = Some(v);
            let consistent = (0..=x).all(|a| {
                (0..=x).all(|b| {
                    if a != x && b != x {
                        return true;
                    }
                    match (cur[a], cur[b], cur[s.mul(a, b)]) {
                        (Some(va), Some(vb), Some(vab)) => va.mul(vb) == vab,
                        _ => true,
                    }
                })
            }) && (0..n).all(|a| {
                // products landing on x whose factors are already assigned
                (0..n).all(|b| {
                    if s.mul(a, b) != x {
                        return true;
                    }
                    match (cur[a], cur[b]) {
                        (Some(va), Some(vb)) => va.mul(vb) == v,
                        _ => true,
                    }
                })
            });
            if consistent {
                go(s, x + 1, cand, cur, out);
            }
        }
        cur[x] = None;
    }

    let mut out = Vec::new();
    go(s, 0, &candidates, &mut vec![None; n], &mut out);
    out
}

/// A multiplicative `μ` with `μ(x·σ(x)) = 1` for all `x` (hence nowhere zero).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MuFunction {
    chi: MultiplicativeFunction,
}

impl MuFunction {
    pub fn new(
        s: &FiniteSemigroup,
        sigma: &InvolutiveAutomorphism,
        chi: MultiplicativeFunction,
    ) -> Result<Self, MorphismError> {
        if let Some(x) = s.elements().find(|&x| chi.at(s.mul(x, sigma.apply(x))) != CharValue::ONE) {
            return Err(MorphismError::NotAdmissible { x });
        }
        Ok(MuFunction { chi })
    }

    pub fn one(n: usize) -> Self {
        MuFunction { chi: MultiplicativeFunction::constant_one(n) }
    }

    pub fn at(&self, x: usize) -> CharValue {
        self.chi.at(x)
    }

    pub fn scalar(&self, x: usize) -> Scalar {
        self.chi.at(x).to_scalar()
    }

    pub fn as_multiplicative(&self) -> &MultiplicativeFunction {
        &self.chi
    }

    pub fn scalars(&self) -> CFun {
        self.chi.scalars()
    }

    pub fn is_one(&self) -> bool {
        self.chi.values.iter().all(|&v| v == CharValue::ONE)
    }
}

/// Multiplicative functions admissible as `μ` for this `σ`.
pub fn enumerate_mu(s: &FiniteSemigroup, sigma: &InvolutiveAutomorphism) -> Vec<MuFunction> {
    enumerate_multiplicative(s)
        .into_iter()
        .filter_map(|chi| MuFunction::new(s, sigma, chi).ok())
        .collect()
}

/// `f*(x) = μ(x) f(σ(x))`.
pub fn star(f: &[Scalar], mu: &MuFunction, sigma: &InvolutiveAutomorphism) -> CFun {
    (0..f.len()).map(|x| &mu.scalar(x) * &f[sigma.apply(x)]).collect()
}

pub fn even_part(f: &[Scalar], mu: &MuFunction, sigma: &InvolutiveAutomorphism) -> CFun {
    let fs = star(f, mu, sigma);
    f.iter().zip(&fs).map(|(a, b)| (a + b).half()).collect()
}

pub fn odd_part(f: &[Scalar], mu: &MuFunction, sigma: &InvolutiveAutomorphism) -> CFun {
    let fs = star(f, mu, sigma);
    f.iter().zip(&fs).map(|(a, b)| (a - b).half()).collect()
}

/// An additive function on a subsemigroup `domain`; entries off the domain are unused.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdditiveFunction {
    pub domain: ElementSet,
    pub values: Vec<Rational>,
}

impl AdditiveFunction {
    pub fn at(&self, x: usize) -> Option<&Rational> {
        self.domain.contains(x).then(|| &self.values[x])
    }

    pub fn is_zero(&self) -> bool {
        self.domain.iter().all(|x| num_traits::Zero::is_zero(&self.values[x]))
    }

    pub fn is_additive(&self, s: &FiniteSemigroup) -> bool {
        self.domain.iter().all(|x| {
            self.domain.iter().all(|y| {
                let xy = s.mul(x, y);
                !self.domain.contains(xy) || self.values[xy] == &self.values[x] + &self.values[y]
            })
        })
    }
}

/// Basis of `{A : A(xy) = A(x) + A(y)}` on `domain`, by exact linear solve.
///
/// Only pairs whose product stays in the domain contribute equations.
pub fn enumerate_additive(s: &FiniteSemigroup, domain: ElementSet) -> Vec<AdditiveFunction> {
    let idx: Vec<usize> = domain.to_vec();
    let col = |x: usize| idx.iter().position(|&e| e == x);
    let ncols = idx.len();
    let mut rows = Vec::new();
    for &x in &idx {
        for &y in &idx {
            let Some(cxy) = col(s.mul(x, y)) else { continue };
            let mut row = vec![Rational::from_integer(0.into()); ncols];
            row[cxy] += Rational::from_integer(1.into());
            row[col(x).unwrap()] -= Rational::from_integer(1.into());
            row[col(y).unwrap()] -= Rational::from_integer(1.into());
            rows.push(row);
        }
    }
    linalg::nullspace(rows, ncols)
        .into_iter()
        .map(|v| {
            let mut values = vec![Rational::from_integer(0.into()); s.order()];
            for (c, &x) in idx.iter().enumerate() {
                values[x] = v[c].clone();
            }
            AdditiveFunction { domain, values }
        })
        .collect()
}
