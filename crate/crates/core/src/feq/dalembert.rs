//! Solutions of the d'Alembert-type equation on finite carriers.

use serde::{Deserialize, Serialize};

use super::families;
use super::nullspace::is_in_nullspace;
use super::sine::{check_additive, to_multiplicative, SolutionDescriptorE2};
use super::{check_len, Context, DescriptorError};
use crate::ideal::chi_structure;
use crate::morphism::CFun;
use crate::scalar::Scalar;

/// A member of one of the four d'Alembert families.
///
/// `G3` and `G4` fix the factorization of `g ⊗ h` with `h = (χ−χ*)/2`
/// resp. `h = χA`; `(tg, h/t)` is the same solution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum SolutionDescriptorE1 {
    /// `f = θ`, `g = 0`, `h` arbitrary.
    G1 { theta: CFun, h: CFun },
    /// `f = θ`, `g` arbitrary, `h = 0`.
    G2 { theta: CFun, g: CFun },
    G3 { theta: CFun, chi: CFun, alpha: Scalar, beta: Scalar },
    G4 { theta: CFun, chi: CFun, additive: Vec<Option<Scalar>>, alpha: Scalar, beta: Scalar },
}

impl SolutionDescriptorE1 {
    pub fn tag(&self) -> &'static str {
        match self {
            SolutionDescriptorE1::G1 { .. } => "G1",
            SolutionDescriptorE1::G2 { .. } => "G2",
            SolutionDescriptorE1::G3 { .. } => "G3",
            SolutionDescriptorE1::G4 { .. } => "G4",
        }
    }

    pub fn theta(&self) -> &[Scalar] {
        match self {
            SolutionDescriptorE1::G1 { theta, .. }
            | SolutionDescriptorE1::G2 { theta, .. }
            | SolutionDescriptorE1::G3 { theta, .. }
            | SolutionDescriptorE1::G4 { theta, .. } => theta,
        }
    }
}

/// Either kind of descriptor; the `family` tag tells them apart.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Descriptor {
    E2(SolutionDescriptorE2),
    E1(SolutionDescriptorE1),
}

fn check_theta(ctx: &Context, theta: &[Scalar]) -> Result<(), DescriptorError> {
    check_len("θ", theta, ctx.order())?;
    let r = is_in_nullspace(ctx, theta);
    match r.worst {
        Some((x, y)) => Err(DescriptorError::ThetaNotInNullspace { x, y }),
        None => Ok(()),
    }
}

fn check_alpha_beta(alpha: &Scalar, beta: &Scalar) -> Result<(), DescriptorError> {
    if alpha.is_zero() && beta.is_zero() {
        return Err(DescriptorError::AlphaBetaZero);
    }
    Ok(())
}

/// `(f, g, h)` for a descriptor, after checking every side condition.
pub fn gen_e1_family(ctx: &Context, d: &SolutionDescriptorE1) -> Result<(CFun, CFun, CFun), DescriptorError> {
    let n = ctx.order();
    check_theta(ctx, d.theta())?;
    match d {
        SolutionDescriptorE1::G1 { theta, h } => {
            check_len("h", h, n)?;
            Ok((theta.clone(), vec![Scalar::zero(); n], h.clone()))
        }
        SolutionDescriptorE1::G2 { theta, g } => {
            check_len("g", g, n)?;
            Ok((theta.clone(), g.clone(), vec![Scalar::zero(); n]))
        }
        SolutionDescriptorE1::G3 { theta, chi, alpha, beta } => {
            let chi = to_multiplicative(ctx, chi)?;
            let chi_star = chi.star(&ctx.mu, &ctx.sigma);
            if chi == chi_star {
                return Err(DescriptorError::ChiEqualsChiStar);
            }
            check_alpha_beta(alpha, beta)?;
            let (cv, sv) = (chi.scalars(), chi_star.scalars());
            Ok(unzip3((0..n).map(|x| families::dalembert_character(&theta[x], &cv[x], &sv[x], alpha, beta))))
        }
        SolutionDescriptorE1::G4 { theta, chi, additive, alpha, beta } => {
            let chi = to_multiplicative(ctx, chi)?;
            if additive.len() != n {
                return Err(DescriptorError::LengthMismatch { what: "A", expected: n, got: additive.len() });
            }
            if chi.is_identically_zero() {
                return Err(DescriptorError::ChiIsZero);
            }
            if !chi.is_star_invariant(&ctx.mu, &ctx.sigma) {
                return Err(DescriptorError::ChiNotStarInvariant);
            }
            let st = chi_structure(&ctx.semigroup, &chi).map_err(|_| DescriptorError::ChiIsZero)?;
            check_additive(ctx, &st, additive)?;
            check_alpha_beta(alpha, beta)?;
            let cv = chi.scalars();
            Ok(unzip3((0..n).map(|x| {
                let outside = additive[x].as_ref().map(|a| (&cv[x], a));
                families::dalembert_additive(&theta[x], outside, alpha, beta)
            })))
        }
    }
}

fn unzip3(it: impl Iterator<Item = (Scalar, Scalar, Scalar)>) -> (CFun, CFun, CFun) {
    let (mut f, mut g, mut h) = (Vec::new(), Vec::new(), Vec::new());
    for (a, b, c) in it {
        f.push(a);
        g.push(b);
        h.push(c);
    }
    (f, g, h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feq::{nullspace_basis, residual_e1};
    use crate::semigroup::catalog::*;

    fn z3_neg() -> Context {
        Context::from_parts(cyclic_group(3), vec![0, 2, 1], &vec![Scalar::one(); 3]).unwrap()
    }

    fn omega() -> CFun {
        (0..3).map(|x| Scalar::root_of_unity(x, 3)).collect()
    }

    #[test]
    fn trivial_families() {
        let ctx = z3_neg();
        let theta = nullspace_basis(&ctx).remove(0);
        let h = vec![Scalar::from_int(4), Scalar::i(), Scalar::ratio(-1, 3)];
        let (f, g, h) = gen_e1_family(&ctx, &SolutionDescriptorE1::G1 { theta: theta.clone(), h }).unwrap();
        assert!(residual_e1(&ctx, &f, &g, &h).exact_zero);
        let (f, g, h) = gen_e1_family(&ctx, &SolutionDescriptorE1::G2 { theta, g: h }).unwrap();
        assert!(residual_e1(&ctx, &f, &g, &h).exact_zero);

        let bad = vec![Scalar::one(), Scalar::zero(), Scalar::zero()];
        let d = SolutionDescriptorE1::G1 { theta: bad, h: vec![Scalar::one(); 3] };
        assert!(matches!(gen_e1_family(&ctx, &d), Err(DescriptorError::ThetaNotInNullspace { .. })));
    }

    #[test]
    fn character_family_on_z3() {
        let ctx = z3_neg();
        let d = SolutionDescriptorE1::G3 {
            theta: vec![Scalar::zero(); 3],
            chi: omega(),
            alpha: Scalar::zero(),
            beta: Scalar::one(),
        };
        let (f, g, h) = gen_e1_family(&ctx, &d).unwrap();
        assert_eq!(f, h);
        let cs = ctx.star(&omega());
        for x in 0..3 {
            assert_eq!(g[x], &omega()[x] + &cs[x]);
            assert_eq!(h[x], (&omega()[x] - &cs[x]).half());
        }
        assert!(residual_e1(&ctx, &f, &g, &h).exact_zero);
        // θ shift keeps the residual at zero
        let f2: CFun = f.iter().map(|v| v + &Scalar::from_int(7)).collect();
        assert!(residual_e1(&ctx, &f2, &g, &h).exact_zero);
    }

    #[test]
    fn family_preconditions() {
        let ctx = z3_neg();
        let zero = vec![Scalar::zero(); 3];
        let d = SolutionDescriptorE1::G3 { theta: zero.clone(), chi: omega(), alpha: Scalar::zero(), beta: Scalar::zero() };
        assert_eq!(gen_e1_family(&ctx, &d), Err(DescriptorError::AlphaBetaZero));
        let d = SolutionDescriptorE1::G3 {
            theta: zero.clone(),
            chi: vec![Scalar::one(); 3],
            alpha: Scalar::one(),
            beta: Scalar::zero(),
        };
        assert_eq!(gen_e1_family(&ctx, &d), Err(DescriptorError::ChiEqualsChiStar));
        let d = SolutionDescriptorE1::G4 {
            theta: zero,
            chi: vec![Scalar::one(); 3],
            additive: vec![Some(Scalar::zero()); 3],
            alpha: Scalar::one(),
            beta: Scalar::zero(),
        };
        assert_eq!(gen_e1_family(&ctx, &d), Err(DescriptorError::AdditiveIsZero));
    }

    #[test]
    fn descriptor_json_tags() {
        let d = Descriptor::E1(SolutionDescriptorE1::G2 { theta: vec![Scalar::one()], g: vec![Scalar::i()] });
        let v = serde_json::to_value(&d).unwrap();
        assert_eq!(v["family"], "G2");
        let back: Descriptor = serde_json::from_value(v).unwrap();
        assert_eq!(back, d);
        let e2: Descriptor = serde_json::from_str(r#"{"family":"F1","k":[1,0],"c":"2"}"#).unwrap();
        assert!(matches!(e2, Descriptor::E2(SolutionDescriptorE2::F1 { .. })));
    }
}
