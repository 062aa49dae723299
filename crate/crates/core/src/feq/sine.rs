//! Solutions of the μ-sine subtraction law on finite carriers.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::families::{self, Piece};
use super::{check_len, Carrier, Context, DescriptorError, Residual};
use crate::ideal::{chi_structure, ChiIdealStructure};
use crate::morphism::{CFun, MultiplicativeFunction};
use crate::scalar::Scalar;

/// A member of one of the three sine families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum SolutionDescriptorE2 {
    /// `k ≠ 0` vanishing on `S²`, `l = ck`.
    F1 { k: CFun, c: Scalar },
    /// `χ* ≠ χ`, `c₁ ≠ 0`.
    F2 { chi: CFun, c1: Scalar, c2: Scalar },
    /// `χ* = χ`, `A` additive and odd on `S \ I_χ`, `ρ` odd on `P_χ`.
    F3 { chi: CFun, additive: Vec<Option<Scalar>>, rho: Vec<Option<Scalar>>, c: Scalar },
}

impl SolutionDescriptorE2 {
    pub fn tag(&self) -> &'static str {
        match self {
            SolutionDescriptorE2::F1 { .. } => "F1",
            SolutionDescriptorE2::F2 { .. } => "F2",
            SolutionDescriptorE2::F3 { .. } => "F3",
        }
    }

    pub fn generate(&self, ctx: &Context) -> Result<(CFun, CFun), DescriptorError> {
        match self {
            SolutionDescriptorE2::F1 { k, c } => gen_e2_family1(ctx, k, c),
            SolutionDescriptorE2::F2 { chi, c1, c2 } => {
                let chi = to_multiplicative(ctx, chi)?;
                gen_e2_family2(ctx, &chi, c1, c2)
            }
            SolutionDescriptorE2::F3 { chi, additive, rho, c } => {
                let chi = to_multiplicative(ctx, chi)?;
                gen_e2_family3(ctx, &chi, additive, rho, c)
            }
        }
    }
}

pub(crate) fn to_multiplicative(ctx: &Context, chi: &[Scalar]) -> Result<MultiplicativeFunction, DescriptorError> {
    check_len("χ", chi, ctx.order())?;
    MultiplicativeFunction::from_scalars(&ctx.semigroup, chi).map_err(DescriptorError::NotMultiplicative)
}

/// `(k, ck)` for `k ≠ 0` vanishing on `S²`.
pub fn gen_e2_family1(ctx: &Context, k: &[Scalar], c: &Scalar) -> Result<(CFun, CFun), DescriptorError> {
    check_len("k", k, ctx.order())?;
    if k.iter().all(Scalar::is_zero) {
        return Err(DescriptorError::KIdenticallyZero);
    }
    if let Some(x) = ctx.semigroup.square().iter().find(|&x| !k[x].is_zero()) {
        return Err(DescriptorError::KNotVanishingOnS2 { x });
    }
    Ok((k.to_vec(), k.iter().map(|v| c * v).collect()))
}

/// `k = c₁(χ−χ*)/2`, `l = (χ+χ*)/2 + c₂(χ−χ*)/2`.
pub fn gen_e2_family2(
    ctx: &Context,
    chi: &MultiplicativeFunction,
    c1: &Scalar,
    c2: &Scalar,
) -> Result<(CFun, CFun), DescriptorError> {
    let chi_star = chi.star(&ctx.mu, &ctx.sigma);
    if chi_star == *chi {
        return Err(DescriptorError::ChiEqualsChiStar);
    }
    if c1.is_zero() {
        return Err(DescriptorError::ZeroConstant { name: "c1" });
    }
    let (cv, sv) = (chi.scalars(), chi_star.scalars());
    Ok(cv.iter().zip(&sv).map(|(a, b)| families::sine_character(a, b, c1, c2)).unzip())
}

/// Piecewise family over `S \ I_χ`, `I_χ \ P_χ` and `P_χ`.
///
/// Checks every side condition, including conditions (I), (II) and that `k`
/// is abelian, before returning. On finite carriers every additive function
/// vanishes, so this always ends in [`DescriptorError::AdditiveIsZero`].
pub fn gen_e2_family3(
    ctx: &Context,
    chi: &MultiplicativeFunction,
    additive: &[Option<Scalar>],
    rho: &[Option<Scalar>],
    c: &Scalar,
) -> Result<(CFun, CFun), DescriptorError> {
    let s = &ctx.semigroup;
    let n = ctx.order();
    if additive.len() != n {
        return Err(DescriptorError::LengthMismatch { what: "A", expected: n, got: additive.len() });
    }
    if rho.len() != n {
        return Err(DescriptorError::LengthMismatch { what: "ρ", expected: n, got: rho.len() });
    }
    if chi.is_identically_zero() {
        return Err(DescriptorError::ChiIsZero);
    }
    if !chi.is_star_invariant(&ctx.mu, &ctx.sigma) {
        return Err(DescriptorError::ChiNotStarInvariant);
    }
    let st = chi_structure(s, chi).map_err(|_| DescriptorError::ChiIsZero)?;
    let outside = st.units(s);
    check_additive(ctx, &st, additive)?;
    let a = |x: usize| additive[x].as_ref().expect("checked domain");
    if let Some(x) = (0..n).find(|&x| rho[x].is_some() != st.p_chi.contains(x)) {
        return Err(DescriptorError::RhoDomain { x });
    }
    for p in st.p_chi.iter() {
        let sp = ctx.sigma.apply(p);
        let odd = match (&rho[p], &rho[sp]) {
            (Some(rp), Some(rsp)) => &ctx.mu.scalar(p) * rsp == -rp,
            _ => false,
        };
        if !odd {
            return Err(DescriptorError::RhoNotOdd { x: p });
        }
    }
    check_condition_i(ctx, &st, rho).map_err(|v| DescriptorError::ConditionIViolated(v.to_string()))?;

    let chi_values = chi.scalars();
    let (k, l): (CFun, CFun) = (0..n)
        .map(|x| {
            let piece = if outside.contains(x) {
                Piece::Outside { chi: chi_values[x].clone(), additive: a(x).clone() }
            } else if let Some(r) = &rho[x] {
                Piece::Prime { rho: r.clone() }
            } else {
                Piece::Rest
            };
            families::sine_additive(&piece, c)
        })
        .unzip();
    check_condition_ii(ctx, &k, &st).map_err(|(x, y)| DescriptorError::ConditionIIViolated { x, y })?;
    if !s.is_abelian_fn(&k) {
        return Err(DescriptorError::KNotAbelian);
    }
    Ok((k, l))
}

/// `A` defined exactly on `S \ I_χ`, additive there, nonzero and odd under `σ`.
pub(crate) fn check_additive(
    ctx: &Context,
    st: &ChiIdealStructure,
    additive: &[Option<Scalar>],
) -> Result<(), DescriptorError> {
    let s = &ctx.semigroup;
    let outside = st.units(s);
    if let Some(x) = (0..ctx.order()).find(|&x| additive[x].is_some() != outside.contains(x)) {
        return Err(DescriptorError::AdditiveDomain { x });
    }
    let a = |x: usize| additive[x].as_ref().expect("checked domain");
    for x in outside.iter() {
        for y in outside.iter() {
            let xy = s.mul(x, y);
            if outside.contains(xy) && *a(xy) != a(x) + a(y) {
                return Err(DescriptorError::NotAdditive { x: x.to_string(), y: y.to_string() });
            }
        }
    }
    if outside.iter().all(|x| a(x).is_zero()) {
        return Err(DescriptorError::AdditiveIsZero);
    }
    if let Some(x) = outside.iter().find(|&x| *a(ctx.sigma.apply(x)) != -a(x)) {
        return Err(DescriptorError::ANotOdd { x: x.to_string() });
    }
    Ok(())
}

/// First failure of condition (I).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionIViolation {
    pub p: usize,
    pub u: usize,
    pub v: usize,
    pub product: &'static str,
    pub outside_p_chi: bool,
}

impl fmt::Display for ConditionIViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = if self.outside_p_chi { "leaves P_χ" } else { "breaks the ρ scaling" };
        write!(f, "{} {what} for p = {}, u = {}, v = {}", self.product, self.p, self.u, self.v)
    }
}

/// For `p ∈ P_χ` and `u, v ∉ I_χ`: `up, pv, upv ∈ P_χ` with
/// `ρ(up) = ρ(p)χ(u)`, `ρ(pv) = ρ(p)χ(v)`, `ρ(upv) = ρ(p)χ(uv)`.
pub fn check_condition_i(
    ctx: &Context,
    st: &ChiIdealStructure,
    rho: &[Option<Scalar>],
) -> Result<(), ConditionIViolation> {
    let s = &ctx.semigroup;
    let chi = &st.chi;
    let outside = st.units(s);
    for p in st.p_chi.iter() {
        let Some(rp) = &rho[p] else {
            return Err(ConditionIViolation { p, u: p, v: p, product: "p", outside_p_chi: false });
        };
        for u in outside.iter() {
            for v in outside.iter() {
                let checks = [
                    ("up", s.mul(u, p), chi.at(u)),
                    ("pv", s.mul(p, v), chi.at(v)),
                    ("upv", s.mul3(u, p, v), chi.at(s.mul(u, v))),
                ];
                for (product, x, factor) in checks {
                    let violation = ConditionIViolation { p, u, v, product, outside_p_chi: false };
                    if !st.p_chi.contains(x) {
                        return Err(ConditionIViolation { outside_p_chi: true, ..violation });
                    }
                    match &rho[x] {
                        Some(rx) if *rx == rp * &factor.to_scalar() => {}
                        _ => return Err(violation),
                    }
                }
            }
        }
    }
    Ok(())
}

/// `k(xy) = k(yx) = 0` for `x ∉ I_χ`, `y ∈ I_χ \ P_χ`; returns the first failing `(x, y)`.
pub fn check_condition_ii(ctx: &Context, k: &[Scalar], st: &ChiIdealStructure) -> Result<(), (usize, usize)> {
    let s = &ctx.semigroup;
    let rest = st.i_chi.difference(st.p_chi);
    for x in st.units(s).iter() {
        for y in rest.iter() {
            if !k[s.mul(x, y)].is_zero() || !k[s.mul(y, x)].is_zero() {
                return Err((x, y));
            }
        }
    }
    Ok(())
}

/// Outcome of the two structural identities every sine solution obeys.
#[derive(Clone, Debug, Serialize)]
pub struct SineIdentities {
    /// Residual of the pair `(k, l)` itself.
    pub solution: Residual<usize>,
    /// `max |k(xy) + k*(yx)|`.
    pub swap_identity: Residual<usize>,
    pub k_is_even: bool,
    /// `max |k(xyz)|` over all triples, checked when `k = k*`.
    pub triple_max: Option<f64>,
    pub triple_exact_zero: Option<bool>,
}

impl SineIdentities {
    pub fn holds(&self) -> bool {
        self.swap_identity.exact_zero && self.triple_exact_zero.unwrap_or(true)
    }
}

pub fn sine_identities(ctx: &Context, k: &[Scalar], l: &[Scalar]) -> SineIdentities {
    let solution = super::residual_e2(ctx, k, l);
    let ks = ctx.star(k);
    let swap_identity = super::pair_residual(ctx, |x, y| &k[ctx.op(x, y)] + &ks[ctx.op(y, x)]);
    let k_is_even = ks.as_slice() == k;
    let (mut triple_max, mut triple_exact_zero) = (None, None);
    if k_is_even {
        let s = &ctx.semigroup;
        let mut max: f64 = 0.0;
        let mut exact = true;
        for x in s.elements() {
            for y in s.elements() {
                for z in s.elements() {
                    let v = &k[s.mul3(x, y, z)];
                    if !v.is_zero() {
                        exact = false;
                        max = max.max(v.abs_f64());
                    }
                }
            }
        }
        triple_max = Some(max);
        triple_exact_zero = Some(exact);
    }
    SineIdentities { solution, swap_identity, k_is_even, triple_max, triple_exact_zero }
}
