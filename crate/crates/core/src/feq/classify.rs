//! Numeric classification of solutions into the known families.
//!
//! Data arrives as `Complex64` (exact values are converted first). Every
//! comparison uses `tol · max(1, ‖input‖∞)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use num_traits::Zero;
use serde::Serialize;

use super::dalembert::SolutionDescriptorE1;
use super::{Carrier, Context};
use crate::ideal::{chi_structure, ChiIdealStructure};
use crate::morphism::{enumerate_additive, enumerate_multiplicative, CFun, MultiplicativeFunction};
use crate::scalar::Scalar;

pub fn to_complex_vec(v: &[Scalar]) -> Vec<C64> {
    v.iter().map(Scalar::to_complex).collect()
}

fn norm_inf(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn sub(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Least-squares coefficients of `target` in the span of `basis`, with the
/// sup-norm of the remainder.
fn fit(basis: &[&[C64]], target: &[C64]) -> (Vec<C64>, f64) {
    let n = target.len();
    if basis.is_empty() {
        return (Vec::new(), norm_inf(target));
    }
    let a = DMatrix::from_fn(n, basis.len(), |i, j| basis[j][i]);
    let b = DVector::from_column_slice(target);
    let coeffs = match a.clone().svd(true, true).solve(&b, 1e-12) {
        Ok(c) => c,
        Err(_) => return (vec![C64::zero(); basis.len()], norm_inf(target)),
    };
    let rem = &b - &a * &coeffs;
    (coeffs.iter().copied().collect(), rem.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// How far an input is from every family that was tried.
#[derive(Clone, Debug, Serialize)]
pub struct Misfit {
    pub best_family: Option<&'static str>,
    pub misfit: f64,
    /// Nullspace residual of `f` itself.
    pub f_nullspace_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "family")]
pub enum E1Class {
    G1 { theta: Vec<C64> },
    G2 { theta: Vec<C64> },
    /// `h = s·(χ−χ*)/2`, `s·g = 2(β(χ+χ*)/2 + α(χ−χ*)/2)`.
    G3 { theta: Vec<C64>, chi: CFun, alpha: C64, beta: C64, scale: C64 },
    /// `h = χA` with `A` given by its coordinates in the additive basis.
    G4 { theta: Vec<C64>, chi: CFun, additive: Vec<C64>, alpha: C64, beta: C64 },
    Unclassified(Misfit),
}

impl E1Class {
    pub fn tag(&self) -> &'static str {
        match self {
            E1Class::G1 { .. } => "G1",
            E1Class::G2 { .. } => "G2",
            E1Class::G3 { .. } => "G3",
            E1Class::G4 { .. } => "G4",
            E1Class::Unclassified(_) => "unclassified",
        }
    }

    pub fn is_classified(&self) -> bool {
        !matches!(self, E1Class::Unclassified(_))
    }

    fn theta(&self) -> Option<&[C64]> {
        match self {
            E1Class::G1 { theta } | E1Class::G2 { theta } => Some(theta),
            E1Class::G3 { theta, .. } | E1Class::G4 { theta, .. } => Some(theta),
            E1Class::Unclassified(_) => None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "family")]
pub enum E2Class {
    /// `k ≡ 0`, `l` arbitrary.
    KZero,
    F1 { c: C64 },
    F2 { chi: CFun, c1: C64, c2: C64 },
    /// `additive_zero` marks `A ≡ 0` on `S \ I_χ`, which only fits when `ρ` carries `k`.
    F3 { chi: CFun, additive: Vec<C64>, rho: Vec<C64>, c: C64, additive_zero: bool, rho_nonzero: bool },
    Unclassified { misfit: f64 },
}

impl E2Class {
    pub fn tag(&self) -> &'static str {
        match self {
            E2Class::KZero => "k=0",
            E2Class::F1 { .. } => "F1",
            E2Class::F2 { .. } => "F2",
            E2Class::F3 { .. } => "F3",
            E2Class::Unclassified { .. } => "unclassified",
        }
    }

    pub fn is_classified(&self) -> bool {
        !matches!(self, E2Class::Unclassified { .. })
    }
}

struct CharData {
    exact: MultiplicativeFunction,
    star_invariant: bool,
    chi: Vec<C64>,
    even: Vec<C64>,
    odd: Vec<C64>,
    structure: ChiIdealStructure,
    /// `χ·A_j` on `S \ I_χ`, zero on `I_χ`.
    chi_additive: Vec<Vec<C64>>,
}

/// Everything about a context the fits need, computed once.
pub struct Classifier {
    ctx: Context,
    mu: Vec<C64>,
    chars: Vec<CharData>,
    square: Vec<bool>,
}

impl Classifier {
    pub fn new(ctx: &Context) -> Self {
        let s = &ctx.semigroup;
        let mu = to_complex_vec(&ctx.mu.scalars());
        let chars = enumerate_multiplicative(s)
            .into_iter()
            .filter(|c| !c.is_identically_zero())
            .map(|exact| {
                let star = exact.star(&ctx.mu, &ctx.sigma);
                let chi: Vec<C64> = exact.values().iter().map(|v| v.to_complex()).collect();
                let cs: Vec<C64> = star.values().iter().map(|v| v.to_complex()).collect();
                let even = chi.iter().zip(&cs).map(|(a, b)| (a + b) / 2.0).collect();
                let odd = chi.iter().zip(&cs).map(|(a, b)| (a - b) / 2.0).collect();
                let structure = chi_structure(s, &exact).expect("nonzero character");
                let chi_additive = enumerate_additive(s, structure.units(s))
                    .into_iter()
                    .map(|a| {
                        (0..s.order())
                            .map(|x| match a.at(x) {
                                Some(r) => chi[x] * num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN),
                                None => C64::zero(),
                            })
                            .collect()
                    })
                    .collect();
                CharData { star_invariant: star == exact, exact, chi, even, odd, structure, chi_additive }
            })
            .collect();
        let sq = s.square();
        let square = s.elements().map(|x| sq.contains(x)).collect();
        Classifier { ctx: ctx.clone(), mu, chars, square }
    }

    pub fn context(&self) -> &Context {
        &self.ctx
    }

    /// `max |θ(xy) − μ(y)θ(σ(y)x)|`.
    pub fn nullspace_residual(&self, theta: &[C64]) -> f64 {
        let c = &self.ctx;
        let mut worst: f64 = 0.0;
        for x in c.range() {
            for y in c.range() {
                let r = theta[c.op(&x, &y)] - self.mu[y] * theta[c.op(&c.sigma(&y), &x)];
                worst = worst.max(r.norm());
            }
        }
        worst
    }

    pub fn star(&self, f: &[C64]) -> Vec<C64> {
        (0..f.len()).map(|x| self.mu[x] * f[self.ctx.sigma.apply(x)]).collect()
    }

    /// Family of a d'Alembert solution `(f, g, h)`.
    pub fn classify_e1(&self, f: &[C64], g: &[C64], h: &[C64], tol: f64) -> E1Class {
        let (ng, nh) = (norm_inf(g), norm_inf(h));
        let scale = 1f64.max(norm_inf(f)).max(ng * nh);
        let eps = tol * scale;
        let f_null = self.nullspace_residual(f);
        let mut best = Misfit { best_family: None, misfit: f64::INFINITY, f_nullspace_residual: f_null };
        let mut note = |family: &'static str, m: f64| {
            if m < best.misfit {
                best.best_family = Some(family);
                best.misfit = m;
            }
        };

        if ng * nh <= eps {
            let family = if ng <= nh { "G1" } else { "G2" };
            if f_null <= eps {
                let theta = f.to_vec();
                return if family == "G1" { E1Class::G1 { theta } } else { E1Class::G2 { theta } };
            }
            note(family, f_null);
        }

        for cd in self.chars.iter().filter(|c| !c.star_invariant) {
            let (s, m) = fit(&[&cd.odd], h);
            if m > eps || s[0].norm() <= eps {
                note("G3", m);
                continue;
            }
            let s = s[0];
            let gs: Vec<C64> = g.iter().map(|v| v * s).collect();
            let (ab, m) = fit(&[&cd.even, &cd.odd], &gs);
            if m > eps {
                note("G3", m);
                continue;
            }
            let (beta, alpha) = (ab[0] / 2.0, ab[1] / 2.0);
            let theta: Vec<C64> = (0..f.len()).map(|x| f[x] - alpha * cd.even[x] - beta * cd.odd[x]).collect();
            let m = self.nullspace_residual(&theta);
            if m <= eps {
                return E1Class::G3 { theta, chi: cd.exact.scalars(), alpha, beta, scale: s };
            }
            note("G3", m);
        }

        for cd in self.chars.iter().filter(|c| c.star_invariant && !c.chi_additive.is_empty()) {
            let basis: Vec<&[C64]> = cd.chi_additive.iter().map(Vec::as_slice).collect();
            let (coef, m) = fit(&basis, h);
            if m > eps || norm_inf(h) <= eps {
                note("G4", m);
                continue;
            }
            let (ab, m) = fit(&[&cd.chi, h], g);
            let off_ideal = cd.structure.i_chi.iter().map(|x| g[x].norm()).fold(0.0, f64::max);
            if m.max(off_ideal) > eps {
                note("G4", m.max(off_ideal));
                continue;
            }
            let (alpha, beta) = (ab[0], ab[1]);
            let theta: Vec<C64> = (0..f.len())
                .map(|x| {
                    if cd.structure.i_chi.contains(x) {
                        f[x]
                    } else {
                        let a = h[x] / cd.chi[x];
                        f[x] - alpha / 2.0 * h[x] - beta / 4.0 * h[x] * a
                    }
                })
                .collect();
            let m = self.nullspace_residual(&theta);
            if m <= eps {
                return E1Class::G4 { theta, chi: cd.exact.scalars(), additive: coef, alpha, beta };
            }
            note("G4", m);
        }
        E1Class::Unclassified(best)
    }

    /// Family of a sine solution `(k, l)`.
    pub fn classify_e2(&self, k: &[C64], l: &[C64], tol: f64) -> E2Class {
        let eps = tol * 1f64.max(norm_inf(k)).max(norm_inf(l));
        if norm_inf(k) <= eps {
            return E2Class::KZero;
        }
        let mut best = f64::INFINITY;

        let on_square = k.iter().zip(&self.square).filter(|(_, &sq)| sq).map(|(v, _)| v.norm()).fold(0.0, f64::max);
        if on_square <= eps {
            let (c, m) = fit(&[k], l);
            if m <= eps {
                return E2Class::F1 { c: c[0] };
            }
            best = best.min(m);
        } else {
            best = best.min(on_square);
        }

        for cd in self.chars.iter().filter(|c| !c.star_invariant) {
            let (c1, m) = fit(&[&cd.odd], k);
            if m > eps || c1[0].norm() <= eps {
                best = best.min(m);
                continue;
            }
            let (c2, m) = fit(&[&cd.odd], &sub(l, &cd.even));
            if m <= eps {
                return E2Class::F2 { chi: cd.exact.scalars(), c1: c1[0], c2: c2[0] };
            }
            best = best.min(m);
        }

        let n = k.len();
        for cd in self.chars.iter().filter(|c| c.star_invariant) {
            let st = &cd.structure;
            let rest = st.i_chi.difference(st.p_chi);
            let m_rest = rest.iter().map(|x| k[x].norm().max(l[x].norm())).fold(0.0, f64::max);
            if m_rest > eps {
                best = best.min(m_rest);
                continue;
            }
            // k = χA off I_χ
            let k_out: Vec<C64> = (0..n).map(|x| if st.i_chi.contains(x) { C64::zero() } else { k[x] }).collect();
            let basis: Vec<&[C64]> = cd.chi_additive.iter().map(Vec::as_slice).collect();
            let (additive, m) = fit(&basis, &k_out);
            if m > eps {
                best = best.min(m);
                continue;
            }
            // l − χ = c·k on (S \ I_χ) ∪ P_χ
            let support = st.units(&self.ctx.semigroup).union(st.p_chi);
            let ks: Vec<C64> = (0..n).map(|x| if support.contains(x) { k[x] } else { C64::zero() }).collect();
            let target: Vec<C64> = (0..n)
                .map(|x| {
                    if !support.contains(x) {
                        C64::zero()
                    } else if st.i_chi.contains(x) {
                        l[x]
                    } else {
                        l[x] - cd.chi[x]
                    }
                })
                .collect();
            let (c, m) = fit(&[&ks], &target);
            let ks_star = self.star(&ks);
            let parity = st.p_chi.iter().map(|p| (ks_star[p] + ks[p]).norm()).fold(0.0, f64::max);
            if m.max(parity) > eps {
                best = best.min(m.max(parity));
                continue;
            }
            let rho: Vec<C64> = st.p_chi.iter().map(|p| k[p]).collect();
            return E2Class::F3 {
                chi: cd.exact.scalars(),
                additive_zero: norm_inf(&k_out) <= eps,
                rho_nonzero: norm_inf(&rho) > eps,
                additive,
                rho,
                c: c[0],
            };
        }
        E2Class::Unclassified { misfit: best }
    }

    /// Whether a classification names the same solution as a descriptor, up
    /// to `(tg, h/t)`, the swap `χ ↔ χ*` and a nullspace shift of `θ`.
    pub fn agrees_with(&self, class: &E1Class, d: &SolutionDescriptorE1, tol: f64) -> bool {
        let Some(theta) = class.theta() else { return false };
        if class.tag() != d.tag() {
            return false;
        }
        let close = |a: C64, b: &Scalar| (a - b.to_complex()).norm() <= tol * 1f64.max(a.norm());
        let params_ok = match (class, d) {
            (E1Class::G3 { chi, alpha, beta, .. }, SolutionDescriptorE1::G3 { chi: dchi, alpha: da, beta: db, .. }) => {
                if chi == dchi {
                    close(*alpha, da) && close(*beta, db)
                } else {
                    chi.as_slice() == self.ctx.star(dchi).as_slice() && close(*alpha, da) && close(-*beta, db)
                }
            }
            (E1Class::G4 { chi, alpha, beta, .. }, SolutionDescriptorE1::G4 { chi: dchi, alpha: da, beta: db, .. }) => {
                chi == dchi && close(*alpha, da) && close(*beta, db)
            }
            _ => true,
        };
        let diff = sub(theta, &to_complex_vec(d.theta()));
        params_ok && self.nullspace_residual(&diff) <= tol * 1f64.max(norm_inf(theta))
    }
}

pub fn classify_solution(ctx: &Context, f: &[C64], g: &[C64], h: &[C64], tol: f64) -> E1Class {
    Classifier::new(ctx).classify_e1(f, g, h, tol)
}

pub fn classify_e2(ctx: &Context, k: &[C64], l: &[C64], tol: f64) -> E2Class {
    Classifier::new(ctx).classify_e2(k, l, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feq::{gen_e1_family, gen_e2_family2, nullspace_basis};
    use crate::morphism::CharValue;
    use crate::semigroup::catalog::*;

    fn z3_neg() -> Context {
        Context::from_parts(cyclic_group(3), vec![0, 2, 1], &vec![Scalar::one(); 3]).unwrap()
    }

    fn omega() -> CFun {
        (0..3).map(|x| Scalar::root_of_unity(x, 3)).collect()
    }

    #[test]
    fn g3_survives_rescaling() {
        let ctx = z3_neg();
        let d = SolutionDescriptorE1::G3 {
            theta: vec![Scalar::zero(); 3],
            chi: omega(),
            alpha: Scalar::zero(),
            beta: Scalar::one(),
        };
        let (f, g, h) = gen_e1_family(&ctx, &d).unwrap();
        let g2: Vec<C64> = to_complex_vec(&g).iter().map(|v| v * 2.0).collect();
        let h2: Vec<C64> = to_complex_vec(&h).iter().map(|v| v / 2.0).collect();
        let cl = Classifier::new(&ctx);
        let class = cl.classify_e1(&to_complex_vec(&f), &g2, &h2, 1e-8);
        assert_eq!(class.tag(), "G3");
        assert!(cl.agrees_with(&class, &d, 1e-8));
    }

    #[test]
    fn trivial_g1() {
        let ctx = z3_neg();
        let theta = to_complex_vec(&nullspace_basis(&ctx)[0]);
        let h = vec![C64::new(1.0, 2.0), C64::new(0.0, -1.0), C64::new(3.0, 0.0)];
        let class = classify_solution(&ctx, &theta, &[C64::zero(); 3], &h, 1e-8);
        assert_eq!(class.tag(), "G1");
        let class = classify_solution(&ctx, &theta, &h, &[C64::zero(); 3], 1e-8);
        assert_eq!(class.tag(), "G2");
    }

    #[test]
    fn junk_is_unclassified() {
        let ctx = z3_neg();
        let f = vec![C64::new(1.0, 0.0), C64::zero(), C64::zero()];
        let class = classify_solution(&ctx, &f, &f, &f, 1e-8);
        assert!(!class.is_classified());
    }

    #[test]
    fn sine_classes() {
        let ctx = z3_neg();
        let chi = MultiplicativeFunction::from_scalars(&ctx.semigroup, &omega()).unwrap();
        let (k, l) = gen_e2_family2(&ctx, &chi, &Scalar::from_int(3), &Scalar::from_int(-2)).unwrap();
        match classify_e2(&ctx, &to_complex_vec(&k), &to_complex_vec(&l), 1e-8) {
            E2Class::F2 { c1, c2, .. } => {
                // χ or χ*; the pair flips the sign of both constants
                assert!((c1.norm() - 3.0).abs() < 1e-9 && (c2.norm() - 2.0).abs() < 1e-9);
            }
            other => panic!("{other:?}"),
        }

        let null = Context::plain(null_abz());
        let k = vec![C64::new(1.0, 0.0), C64::new(2.0, 0.0), C64::zero()];
        let l: Vec<C64> = k.iter().map(|v| v * 5.0).collect();
        assert!(matches!(classify_e2(&null, &k, &l, 1e-8), E2Class::F1 { .. }));
    }

    #[test]
    fn rho_only_solution_on_pq_monoid() {
        let s = monoid_1pq0();
        let ctx = Context::from_parts(s, vec![0, 2, 1, 3], &vec![Scalar::one(); 4]).unwrap();
        let c = C64::new(0.5, -1.0);
        let k = vec![C64::zero(), C64::new(1.0, 0.0), C64::new(-1.0, 0.0), C64::zero()];
        let l = vec![C64::new(1.0, 0.0), c, -c, C64::zero()];
        let exact_k: CFun = [0, 1, -1, 0].iter().map(|&v| Scalar::from_int(v)).collect();
        let exact_l = vec![Scalar::one(), Scalar::ratio(1, 2) - Scalar::i(), Scalar::i() - Scalar::ratio(1, 2), Scalar::zero()];
        assert!(crate::feq::residual_e2(&ctx, &exact_k, &exact_l).exact_zero);
        match classify_e2(&ctx, &k, &l, 1e-8) {
            E2Class::F3 { chi, additive_zero, rho_nonzero, .. } => {
                assert!(additive_zero && rho_nonzero);
                assert_eq!(chi[0], Scalar::one());
                assert_eq!(chi[1], CharValue::Zero.to_scalar());
            }
            other => panic!("{other:?}"),
        }
    }
}
