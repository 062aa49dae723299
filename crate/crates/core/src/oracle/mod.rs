//! Independent numeric search for solutions on small carriers, and the
//! sweep that checks the families are complete.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::feq::classify::to_complex_vec;
use crate::feq::dalembert::Descriptor;
use crate::feq::{
    gen_e1_family, nullspace_basis, residual_e1, residual_e2, Classifier, Context, DescriptorError, E1Class,
    E2Class, SolutionDescriptorE1, SolutionDescriptorE2,
};
use crate::ideal::is_compatible;
use crate::morphism::{enumerate_additive, enumerate_involutive_automorphisms, enumerate_mu, enumerate_multiplicative, CFun};
use crate::scalar::{Rational, Scalar};
use crate::semigroup::{enumerate_small, Canonical, FiniteSemigroup};

pub mod newton;

use newton::{levenberg_marquardt, LmOptions, System};

/// Which unknown is pinned to 1 to remove the scaling freedom.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AnchorPolicy {
    /// Attempt `a` pins element `a mod n`.
    Cycle,
    Fixed(usize),
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleConfig {
    /// Restarts per context and equation.
    pub attempts: usize,
    pub tol_converge: f64,
    pub tol_dedup: f64,
    pub tol_classify: f64,
    pub seed: u64,
    pub max_iter: usize,
    /// Share of restarts started near a generated family solution.
    pub family_seeded_fraction: f64,
    /// Converged points with a value above this are discarded.
    pub max_value: f64,
    pub anchor: AnchorPolicy,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            attempts: 200,
            tol_converge: 1e-10,
            tol_dedup: 1e-6,
            tol_classify: 1e-8,
            seed: 0x5eed,
            max_iter: 200,
            family_seeded_fraction: 0.25,
            max_value: 1e4,
            anchor: AnchorPolicy::Cycle,
        }
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("attempts must be at least 1")]
    Attempts,
    #[error("tolerances must be positive")]
    Tolerance,
}

impl OracleConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.attempts == 0 {
            return Err(ConfigError::Attempts);
        }
        if !(self.tol_converge > 0.0 && self.tol_dedup > 0.0 && self.tol_classify > 0.0) {
            return Err(ConfigError::Tolerance);
        }
        Ok(())
    }

    fn anchor_for(&self, attempt: usize, n: usize) -> usize {
        match self.anchor {
            AnchorPolicy::Cycle => attempt % n,
            AnchorPolicy::Fixed(x) => x,
        }
    }
}

/// splitmix64, used to derive one independent stream per task.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn task_rng(seed: u64, stream: u64, attempt: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(mix(seed ^ mix(stream)) ^ attempt as u64))
}

fn gaussian(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

struct Tables {
    n: usize,
    mul: Vec<usize>,
    sigma: Vec<usize>,
    mu: Vec<C64>,
}

impl Tables {
    fn new(ctx: &Context) -> Self {
        let n = ctx.order();
        Tables {
            n,
            mul: ctx.semigroup.flat_table().to_vec(),
            sigma: ctx.sigma.perm().to_vec(),
            mu: to_complex_vec(&ctx.mu.scalars()),
        }
    }

    fn m(&self, x: usize, y: usize) -> usize {
        self.mul[x * self.n + y]
    }
}

/// Unknowns `k, l`; one equation per pair plus `k(anchor) = 1`.
struct SineSystem<'a> {
    t: &'a Tables,
    anchor: usize,
}

impl System for SineSystem<'_> {
    fn unknowns(&self) -> usize {
        2 * self.t.n
    }

    fn eval(&self, z: &[C64]) -> (Vec<C64>, DMatrix<C64>) {
        let n = self.t.n;
        let (k, l) = z.split_at(n);
        let mut r = Vec::with_capacity(n * n + 1);
        let mut j = DMatrix::zeros(n * n + 1, 2 * n);
        for x in 0..n {
            for y in 0..n {
                let row = x * n + y;
                let xsy = self.t.m(x, self.t.sigma[y]);
                r.push(self.t.mu[y] * k[xsy] - k[x] * l[y] + k[y] * l[x]);
                j[(row, xsy)] += self.t.mu[y];
                j[(row, x)] -= l[y];
                j[(row, n + y)] -= k[x];
                j[(row, y)] += l[x];
                j[(row, n + x)] += k[y];
            }
        }
        r.push(k[self.anchor] - 1.0);
        j[(n * n, self.anchor)] = C64::new(1.0, 0.0);
        (r, j)
    }
}

/// Unknowns `f, g, h`; one equation per pair plus `h(anchor) = 1`.
struct DalembertSystem<'a> {
    t: &'a Tables,
    anchor: usize,
}

impl System for DalembertSystem<'_> {
    fn unknowns(&self) -> usize {
        3 * self.t.n
    }

    fn eval(&self, z: &[C64]) -> (Vec<C64>, DMatrix<C64>) {
        let n = self.t.n;
        let (f, rest) = z.split_at(n);
        let (g, h) = rest.split_at(n);
        let mut r = Vec::with_capacity(n * n + 1);
        let mut j = DMatrix::zeros(n * n + 1, 3 * n);
        for x in 0..n {
            for y in 0..n {
                let row = x * n + y;
                let (xy, syx) = (self.t.m(x, y), self.t.m(self.t.sigma[y], x));
                r.push(f[xy] - self.t.mu[y] * f[syx] - g[x] * h[y]);
                j[(row, xy)] += 1.0;
                j[(row, syx)] -= self.t.mu[y];
                j[(row, n + x)] -= h[y];
                j[(row, 2 * n + y)] -= g[x];
            }
        }
        r.push(h[self.anchor] - 1.0);
        j[(n * n, 2 * n + self.anchor)] = C64::new(1.0, 0.0);
        (r, j)
    }
}

/// Exact image of a float vector: every `f64` is a dyadic rational.
pub fn exact_from_complex(v: &[C64]) -> Option<CFun> {
    v.iter()
        .map(|z| Some(Scalar::gaussian(Rational::from_float(z.re)?, Rational::from_float(z.im)?)))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct E2Solution {
    pub k: Vec<C64>,
    pub l: Vec<C64>,
    pub class: E2Class,
    /// Float residual at convergence.
    pub residual: f64,
    /// Residual of the same floats recomputed in exact arithmetic.
    pub exact_residual: f64,
    /// `max |k(xy) + k*(yx)|`.
    pub swap_identity: f64,
    /// Number of restarts that landed on this class.
    pub hits: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct E1Solution {
    pub f: Vec<C64>,
    pub g: Vec<C64>,
    pub h: Vec<C64>,
    pub class: E1Class,
    pub residual: f64,
    pub exact_residual: f64,
    pub hits: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveOutcome<T> {
    pub attempts: usize,
    pub converged: usize,
    pub rejected_unbounded: usize,
    pub rejected_unverified: usize,
    /// Strata known in closed form and not sampled.
    pub strata: Vec<&'static str>,
    /// Largest `max |k(xy) + k*(yx)|` over every accepted point, for the sine equation.
    pub max_swap_identity: Option<f64>,
    pub solutions: Vec<T>,
}

impl<T> SolveOutcome<T> {
    fn new(attempts: usize, strata: Vec<&'static str>) -> Self {
        SolveOutcome {
            attempts,
            converged: 0,
            rejected_unbounded: 0,
            rejected_unverified: 0,
            strata,
            max_swap_identity: None,
            solutions: Vec::new(),
        }
    }
}

fn class_key_e2(c: &E2Class) -> Option<(String, Option<CFun>)> {
    match c {
        E2Class::F2 { chi, .. } => Some(("F2".into(), Some(chi.clone()))),
        E2Class::F3 { chi, rho_nonzero, additive_zero, .. } => {
            Some((format!("F3:{rho_nonzero}:{additive_zero}"), Some(chi.clone())))
        }
        E2Class::Unclassified { .. } => None,
        other => Some((other.tag().into(), None)),
    }
}

fn class_key_e1(c: &E1Class) -> Option<(String, Option<CFun>)> {
    match c {
        E1Class::G3 { chi, .. } | E1Class::G4 { chi, .. } => Some((c.tag().into(), Some(chi.clone()))),
        E1Class::Unclassified(_) => None,
        other => Some((other.tag().into(), None)),
    }
}

fn close(a: &[C64], b: &[C64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol * 1f64.max(x.norm()))
}

fn bounded(z: &[C64], max: f64) -> bool {
    z.iter().all(|v| v.re.is_finite() && v.im.is_finite() && v.norm() <= max)
}

/// Starting points near generated sine solutions.
fn sine_family_start(ctx: &Context, rng: &mut ChaCha8Rng) -> Option<Vec<C64>> {
    let chars: Vec<_> = enumerate_multiplicative(&ctx.semigroup)
        .into_iter()
        .filter(|c| !c.is_identically_zero() && !c.is_star_invariant(&ctx.mu, &ctx.sigma))
        .collect();
    if chars.is_empty() {
        return None;
    }
    let chi = &chars[rng.random_range(0..chars.len())];
    let cs = to_complex_vec(&chi.star(&ctx.mu, &ctx.sigma).scalars());
    let cv = to_complex_vec(&chi.scalars());
    let (c1, c2) = (gaussian(rng), gaussian(rng));
    let mut z: Vec<C64> = cv.iter().zip(&cs).map(|(a, b)| c1 * (a - b) / 2.0).collect();
    z.extend(cv.iter().zip(&cs).map(|(a, b)| (a + b) / 2.0 + c2 * (a - b) / 2.0));
    Some(z)
}

/// Starting points near generated d'Alembert solutions.
fn dalembert_family_start(ctx: &Context, basis: &[CFun], rng: &mut ChaCha8Rng) -> Option<Vec<C64>> {
    let chars: Vec<_> = enumerate_multiplicative(&ctx.semigroup)
        .into_iter()
        .filter(|c| !c.is_identically_zero() && !c.is_star_invariant(&ctx.mu, &ctx.sigma))
        .collect();
    if chars.is_empty() {
        return None;
    }
    let chi = &chars[rng.random_range(0..chars.len())];
    let cs = to_complex_vec(&chi.star(&ctx.mu, &ctx.sigma).scalars());
    let cv = to_complex_vec(&chi.scalars());
    let (alpha, beta) = (gaussian(rng), gaussian(rng));
    let n = ctx.order();
    let mut theta = vec![C64::new(0.0, 0.0); n];
    for b in basis {
        let w = gaussian(rng);
        for (t, v) in theta.iter_mut().zip(to_complex_vec(b)) {
            *t += w * v;
        }
    }
    let e: Vec<C64> = cv.iter().zip(&cs).map(|(a, b)| (a + b) / 2.0).collect();
    let o: Vec<C64> = cv.iter().zip(&cs).map(|(a, b)| (a - b) / 2.0).collect();
    let mut z: Vec<C64> = (0..n).map(|x| theta[x] + alpha * e[x] + beta * o[x]).collect();
    z.extend((0..n).map(|x| 2.0 * (beta * e[x] + alpha * o[x])));
    z.extend(o);
    Some(z)
}

fn random_start(len: usize, rng: &mut ChaCha8Rng) -> Vec<C64> {
    (0..len).map(|_| gaussian(rng)).collect()
}

fn perturb(z: Vec<C64>, rng: &mut ChaCha8Rng) -> Vec<C64> {
    z.into_iter().map(|v| v + 0.3 * gaussian(rng)).collect()
}

fn use_family_start(cfg: &OracleConfig, attempt: usize) -> bool {
    let every = if cfg.family_seeded_fraction <= 0.0 { usize::MAX } else { (1.0 / cfg.family_seeded_fraction).round() as usize };
    every != usize::MAX && attempt % every.max(1) == every.max(1) - 1
}

/// Numeric solutions of the sine equation with `k ≠ 0`, deduplicated by family.
pub fn solve_e2_numeric(ctx: &Context, cfg: &OracleConfig) -> SolveOutcome<E2Solution> {
    solve_e2_with(ctx, cfg, &Classifier::new(ctx), 0)
}

fn solve_e2_with(ctx: &Context, cfg: &OracleConfig, cl: &Classifier, stream: u64) -> SolveOutcome<E2Solution> {
    let n = ctx.order();
    let t = Tables::new(ctx);
    let opts = LmOptions { max_iter: cfg.max_iter, tol: cfg.tol_converge };
    let runs: Vec<_> = (0..cfg.attempts)
        .into_par_iter()
        .map(|a| {
            let mut rng = task_rng(cfg.seed, stream.wrapping_mul(2), a);
            let start = if use_family_start(cfg, a) {
                sine_family_start(ctx, &mut rng).map(|z| perturb(z, &mut rng))
            } else {
                None
            }
            .unwrap_or_else(|| random_start(2 * n, &mut rng));
            let sys = SineSystem { t: &t, anchor: cfg.anchor_for(a, n) };
            levenberg_marquardt(&sys, start, opts)
        })
        .collect();

    let mut out: SolveOutcome<E2Solution> = SolveOutcome::new(cfg.attempts, vec!["k = 0, l arbitrary"]);
    for run in runs.into_iter().filter(|r| r.converged) {
        out.converged += 1;
        if !bounded(&run.z, cfg.max_value) {
            out.rejected_unbounded += 1;
            continue;
        }
        let (k, l) = run.z.split_at(n);
        let exact_residual = match (exact_from_complex(k), exact_from_complex(l)) {
            (Some(ek), Some(el)) => residual_e2(ctx, &ek, &el).max_abs,
            _ => f64::INFINITY,
        };
        if exact_residual > cfg.tol_converge {
            out.rejected_unverified += 1;
            continue;
        }
        let ks = cl.star(k);
        let swap = (0..n)
            .flat_map(|x| (0..n).map(move |y| (x, y)))
            .map(|(x, y)| (k[t.m(x, y)] + ks[t.m(y, x)]).norm())
            .fold(0.0, f64::max);
        out.max_swap_identity = Some(out.max_swap_identity.unwrap_or(0.0).max(swap));
        let class = cl.classify_e2(k, l, cfg.tol_classify);
        let key = class_key_e2(&class);
        let existing = out.solutions.iter_mut().find(|s| match &key {
            Some(key) => class_key_e2(&s.class).as_ref() == Some(key),
            None => !s.class.is_classified() && close(&s.k, k, cfg.tol_dedup) && close(&s.l, l, cfg.tol_dedup),
        });
        match existing {
            Some(s) => s.hits += 1,
            None => out.solutions.push(E2Solution {
                k: k.to_vec(),
                l: l.to_vec(),
                class,
                residual: run.residual,
                exact_residual,
                swap_identity: swap,
                hits: 1,
            }),
        }
    }
    out
}

/// Numeric solutions of the d'Alembert equation with `h ≠ 0`, deduplicated by family.
pub fn solve_e1_numeric(ctx: &Context, cfg: &OracleConfig) -> SolveOutcome<E1Solution> {
    solve_e1_with(ctx, cfg, &Classifier::new(ctx), 0)
}

fn solve_e1_with(ctx: &Context, cfg: &OracleConfig, cl: &Classifier, stream: u64) -> SolveOutcome<E1Solution> {
    let n = ctx.order();
    let t = Tables::new(ctx);
    let basis = nullspace_basis(ctx);
    let opts = LmOptions { max_iter: cfg.max_iter, tol: cfg.tol_converge };
    let runs: Vec<_> = (0..cfg.attempts)
        .into_par_iter()
        .map(|a| {
            let mut rng = task_rng(cfg.seed, stream.wrapping_mul(2) + 1, a);
            let start = if use_family_start(cfg, a) {
                dalembert_family_start(ctx, &basis, &mut rng).map(|z| perturb(z, &mut rng))
            } else {
                None
            }
            .unwrap_or_else(|| random_start(3 * n, &mut rng));
            let sys = DalembertSystem { t: &t, anchor: cfg.anchor_for(a, n) };
            levenberg_marquardt(&sys, start, opts)
        })
        .collect();

    let mut out: SolveOutcome<E1Solution> = SolveOutcome::new(cfg.attempts, vec!["f ∈ N, g arbitrary, h = 0"]);
    for run in runs.into_iter().filter(|r| r.converged) {
        out.converged += 1;
        if !bounded(&run.z, cfg.max_value) {
            out.rejected_unbounded += 1;
            continue;
        }
        let (f, rest) = run.z.split_at(n);
        let (g, h) = rest.split_at(n);
        let exact_residual = match (exact_from_complex(f), exact_from_complex(g), exact_from_complex(h)) {
            (Some(ef), Some(eg), Some(eh)) => residual_e1(ctx, &ef, &eg, &eh).max_abs,
            _ => f64::INFINITY,
        };
        if exact_residual > cfg.tol_converge {
            out.rejected_unverified += 1;
            continue;
        }
        let class = cl.classify_e1(f, g, h, cfg.tol_classify);
        let key = class_key_e1(&class);
        let existing = out.solutions.iter_mut().find(|s| match &key {
            Some(key) => class_key_e1(&s.class).as_ref() == Some(key),
            None => {
                !s.class.is_classified()
                    && close(&s.f, f, cfg.tol_dedup)
                    && close(&s.g, g, cfg.tol_dedup)
                    && close(&s.h, h, cfg.tol_dedup)
            }
        });
        match existing {
            Some(s) => s.hits += 1,
            None => out.solutions.push(E1Solution {
                f: f.to_vec(),
                g: g.to_vec(),
                h: h.to_vec(),
                class,
                residual: run.residual,
                exact_residual,
                hits: 1,
            }),
        }
    }
    out
}

/// Output of a generator on one descriptor.
#[derive(Clone, Debug)]
pub enum Generated {
    Sine(CFun, CFun),
    Dalembert(CFun, CFun, CFun),
}

/// Every descriptor built from the parameter grid on this context, with the
/// generator's answer. Descriptors whose preconditions cannot hold (such as a
/// nonzero additive function on a finite carrier) are included and fail.
pub fn family_instances(ctx: &Context, grid: &[i64]) -> Vec<(Descriptor, Result<Generated, DescriptorError>)> {
    let s = &ctx.semigroup;
    let n = ctx.order();
    let sc = |v: i64| Scalar::from_int(v);
    let mut ds: Vec<Descriptor> = Vec::new();

    let outside_sq: Vec<usize> = s.all().difference(s.square()).to_vec();
    for &c in grid {
        for (i, &x) in outside_sq.iter().enumerate() {
            let mut k = vec![Scalar::zero(); n];
            k[x] = sc(grid[i % grid.len()]);
            ds.push(Descriptor::E2(SolutionDescriptorE2::F1 { k, c: sc(c) }));
        }
        if outside_sq.len() > 1 {
            let mut k = vec![Scalar::zero(); n];
            for (i, &x) in outside_sq.iter().enumerate() {
                k[x] = sc(grid[(i + 1) % grid.len()]);
            }
            ds.push(Descriptor::E2(SolutionDescriptorE2::F1 { k, c: sc(c) }));
        }
    }

    let chars: Vec<_> = enumerate_multiplicative(s).into_iter().filter(|c| !c.is_identically_zero()).collect();
    let basis = nullspace_basis(ctx);
    let mut thetas = vec![vec![Scalar::zero(); n]];
    thetas.extend(basis.iter().cloned());
    let arbitrary: Vec<CFun> = (0..grid.len()).map(|i| (0..n).map(|x| sc(grid[(x + i) % grid.len()])).collect()).collect();

    for chi in &chars {
        let cv = chi.scalars();
        if !chi.is_star_invariant(&ctx.mu, &ctx.sigma) {
            for &c1 in grid {
                for &c2 in grid {
                    ds.push(Descriptor::E2(SolutionDescriptorE2::F2 { chi: cv.clone(), c1: sc(c1), c2: sc(c2) }));
                }
            }
            for theta in &thetas {
                for &a in grid {
                    for &b in grid {
                        ds.push(Descriptor::E1(SolutionDescriptorE1::G3 {
                            theta: theta.clone(),
                            chi: cv.clone(),
                            alpha: sc(a),
                            beta: sc(b),
                        }));
                    }
                }
            }
        } else {
            let st = crate::ideal::chi_structure(s, chi).expect("nonzero");
            let outside = st.units(s);
            let mut additive: Vec<Vec<Option<Scalar>>> = enumerate_additive(s, outside)
                .into_iter()
                .map(|a| (0..n).map(|x| a.at(x).map(|r| Scalar::from_rational(r.clone()))).collect())
                .collect();
            // the only additive function on a finite carrier
            additive.push((0..n).map(|x| outside.contains(x).then(Scalar::zero)).collect());
            let rho: Vec<Option<Scalar>> = (0..n).map(|x| st.p_chi.contains(x).then(Scalar::zero)).collect();
            for a in &additive {
                for &c in grid {
                    ds.push(Descriptor::E2(SolutionDescriptorE2::F3 {
                        chi: cv.clone(),
                        additive: a.clone(),
                        rho: rho.clone(),
                        c: sc(c),
                    }));
                }
                ds.push(Descriptor::E1(SolutionDescriptorE1::G4 {
                    theta: thetas[0].clone(),
                    chi: cv.clone(),
                    additive: a.clone(),
                    alpha: sc(grid[0]),
                    beta: sc(grid[grid.len() - 1]),
                }));
            }
        }
    }
    for theta in &thetas {
        for v in &arbitrary {
            ds.push(Descriptor::E1(SolutionDescriptorE1::G1 { theta: theta.clone(), h: v.clone() }));
            ds.push(Descriptor::E1(SolutionDescriptorE1::G2 { theta: theta.clone(), g: v.clone() }));
        }
    }

    ds.into_iter()
        .map(|d| {
            let out = match &d {
                Descriptor::E2(e) => e.generate(ctx).map(|(k, l)| Generated::Sine(k, l)),
                Descriptor::E1(e) => gen_e1_family(ctx, e).map(|(f, g, h)| Generated::Dalembert(f, g, h)),
            };
            (d, out)
        })
        .collect()
}

/// The parameter grid used by the sweep.
pub const GRID: [i64; 4] = [-2, -1, 1, 3];

#[derive(Clone, Debug, Default, Serialize)]
pub struct GeneratedCheck {
    pub descriptors: usize,
    pub accepted: usize,
    pub nonzero_residuals: usize,
    /// Counts of rejected descriptors by error kind.
    pub rejected: std::collections::BTreeMap<String, usize>,
}

pub fn check_generated(ctx: &Context, grid: &[i64]) -> GeneratedCheck {
    let mut out = GeneratedCheck::default();
    for (_, res) in family_instances(ctx, grid) {
        out.descriptors += 1;
        match res {
            Ok(Generated::Sine(k, l)) => {
                out.accepted += 1;
                if !residual_e2(ctx, &k, &l).exact_zero {
                    out.nonzero_residuals += 1;
                }
            }
            Ok(Generated::Dalembert(f, g, h)) => {
                out.accepted += 1;
                if !residual_e1(ctx, &f, &g, &h).exact_zero {
                    out.nonzero_residuals += 1;
                }
            }
            Err(e) => {
                let kind = format!("{e:?}");
                let kind = kind.split([' ', '(', '{']).next().unwrap_or_default().to_string();
                *out.rejected.entry(kind).or_default() += 1;
            }
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct ContextReport {
    pub id: usize,
    pub order: usize,
    pub table: Vec<Vec<usize>>,
    pub sigma: Vec<usize>,
    pub mu: CFun,
    pub compatible: bool,
    pub generated: GeneratedCheck,
    pub sine: SolveOutcome<E2Solution>,
    pub dalembert: SolveOutcome<E1Solution>,
}

impl ContextReport {
    pub fn unclassified_e1(&self) -> usize {
        self.dalembert.solutions.iter().filter(|s| !s.class.is_classified()).count()
    }

    pub fn unclassified_e2(&self) -> usize {
        self.sine.solutions.iter().filter(|s| !s.class.is_classified()).count()
    }

    /// Sine solutions where `k` is carried by a nonzero `ρ` on `P_χ`.
    pub fn rho_solutions(&self) -> impl Iterator<Item = &E2Solution> {
        self.sine.solutions.iter().filter(|s| matches!(s.class, E2Class::F3 { rho_nonzero: true, .. }))
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SweepTotals {
    pub contexts: usize,
    pub compatible_contexts: usize,
    pub generated_descriptors: usize,
    pub generated_accepted: usize,
    pub generated_nonzero_residuals: usize,
    pub sine_classes: usize,
    pub dalembert_classes: usize,
    /// Unclassified solutions on compatible contexts; nonzero is a red flag.
    pub unclassified_on_compatible: usize,
    /// Context ids with unclassified d'Alembert solutions on non-compatible carriers.
    pub noncompatible_evidence: Vec<usize>,
    /// Context ids where a verified sine solution has `ρ ≢ 0`.
    pub rho_evidence: Vec<usize>,
    pub max_swap_identity: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub max_order: usize,
    pub config: OracleConfig,
    pub totals: SweepTotals,
    pub contexts: Vec<ContextReport>,
}

impl SweepReport {
    pub fn red_flag(&self) -> bool {
        self.totals.unclassified_on_compatible > 0 || self.totals.generated_nonzero_residuals > 0
    }
}

/// Every semigroup up to isomorphism with every involutive automorphism and admissible `μ`.
pub fn all_contexts(max_order: usize) -> Vec<Context> {
    let mut out = Vec::new();
    for n in 1..=max_order {
        for s in enumerate_small(n, Canonical::Isomorphism).expect("order within limits") {
            out.extend(contexts_of(&s));
        }
    }
    out
}

pub fn contexts_of(s: &FiniteSemigroup) -> Vec<Context> {
    let mut out = Vec::new();
    for sigma in enumerate_involutive_automorphisms(s) {
        for mu in enumerate_mu(s, &sigma) {
            out.push(Context::new(s.clone(), sigma.clone(), mu));
        }
    }
    out
}

/// Oracle report for one context, using `id` to pick the random streams.
pub fn analyze_context(id: usize, ctx: &Context, cfg: &OracleConfig) -> ContextReport {
    let cl = Classifier::new(ctx);
    ContextReport {
        id,
        order: ctx.order(),
        table: ctx.semigroup.rows(),
        sigma: ctx.sigma.perm().to_vec(),
        mu: ctx.mu.scalars(),
        compatible: is_compatible(&ctx.semigroup).compatible,
        generated: check_generated(ctx, &GRID),
        sine: solve_e2_with(ctx, cfg, &cl, id as u64),
        dalembert: solve_e1_with(ctx, cfg, &cl, id as u64),
    }
}

pub fn sweep_contexts(contexts: &[Context], max_order: usize, cfg: &OracleConfig) -> SweepReport {
    let reports: Vec<ContextReport> =
        contexts.par_iter().enumerate().map(|(id, ctx)| analyze_context(id, ctx, cfg)).collect();
    let mut t = SweepTotals { contexts: reports.len(), ..Default::default() };
    for r in &reports {
        t.compatible_contexts += r.compatible as usize;
        t.generated_descriptors += r.generated.descriptors;
        t.generated_accepted += r.generated.accepted;
        t.generated_nonzero_residuals += r.generated.nonzero_residuals;
        t.sine_classes += r.sine.solutions.len();
        t.dalembert_classes += r.dalembert.solutions.len();
        if r.compatible {
            t.unclassified_on_compatible += r.unclassified_e1() + r.unclassified_e2();
        } else if r.unclassified_e1() > 0 {
            t.noncompatible_evidence.push(r.id);
        }
        if r.rho_solutions().next().is_some() {
            t.rho_evidence.push(r.id);
        }
        t.max_swap_identity = t.max_swap_identity.max(r.sine.max_swap_identity.unwrap_or(0.0));
    }
    SweepReport { max_order, config: cfg.clone(), totals: t, contexts: reports }
}

/// Generator, oracle and classifier over every context of order `≤ max_order`.
pub fn completeness_sweep(max_order: usize, cfg: &OracleConfig) -> SweepReport {
    sweep_contexts(&all_contexts(max_order), max_order, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::catalog::*;

    fn quick() -> OracleConfig {
        OracleConfig { attempts: 40, ..Default::default() }
    }

    #[test]
    fn z2_plain_has_no_sine_solutions() {
        let ctx = Context::plain(cyclic_group(2));
        let out = solve_e2_numeric(&ctx, &quick());
        assert!(out.solutions.is_empty(), "{:?}", out.solutions);
    }

    #[test]
    fn z3_inversion_sine_solutions_are_character_family() {
        let ctx = Context::from_parts(cyclic_group(3), vec![0, 2, 1], &vec![Scalar::one(); 3]).unwrap();
        let out = solve_e2_numeric(&ctx, &quick());
        assert!(!out.solutions.is_empty());
        assert!(out.solutions.iter().all(|s| s.class.tag() == "F2"));
        assert!(out.max_swap_identity.unwrap() <= 1e-10);
    }

    #[test]
    fn null_semigroup_k_stratum() {
        let ctx = Context::plain(null_abz());
        let out = solve_e2_numeric(&ctx, &quick());
        assert_eq!(out.solutions.len(), 1);
        assert_eq!(out.solutions[0].class.tag(), "F1");
        assert!(out.solutions[0].k[2].norm() < 1e-9);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let ctx = Context::from_parts(cyclic_group(3), vec![0, 2, 1], &vec![Scalar::one(); 3]).unwrap();
        let a = serde_json::to_string(&solve_e1_numeric(&ctx, &quick())).unwrap();
        let b = serde_json::to_string(&solve_e1_numeric(&ctx, &quick())).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn config_validation() {
        assert_eq!(OracleConfig { attempts: 0, ..Default::default() }.validate(), Err(ConfigError::Attempts));
        assert_eq!(OracleConfig { tol_dedup: 0.0, ..Default::default() }.validate(), Err(ConfigError::Tolerance));
        assert!(OracleConfig::default().validate().is_ok());
    }

    #[test]
    fn exact_lift_is_lossless() {
        let v = vec![C64::new(0.1, -3.25)];
        let e = exact_from_complex(&v).unwrap();
        assert_eq!(e[0].to_complex(), v[0]);
    }
}
