//! Pointwise closed forms of every solution family.
//!
//! These are shared by finite carriers and window carriers: a generator
//! decides which piece an element belongs to, then evaluates the formula here.

use crate::scalar::Scalar;

/// `((χ+χ*)/2, (χ−χ*)/2)` at one point.
pub fn even_odd(chi: &Scalar, chi_star: &Scalar) -> (Scalar, Scalar) {
    ((chi + chi_star).half(), (chi - chi_star).half())
}

/// Sine family with `χ* ≠ χ`: `k = c₁(χ−χ*)/2`, `l = (χ+χ*)/2 + c₂(χ−χ*)/2`.
pub fn sine_character(chi: &Scalar, chi_star: &Scalar, c1: &Scalar, c2: &Scalar) -> (Scalar, Scalar) {
    let (e, o) = even_odd(chi, chi_star);
    (c1 * &o, e + c2 * &o)
}

/// Where an element sits relative to `I_χ` and `P_χ`.
#[derive(Clone, Debug)]
pub enum Piece {
    /// `x ∉ I_χ`, carrying `χ(x)` and `A(x)`.
    Outside { chi: Scalar, additive: Scalar },
    /// `x ∈ P_χ`, carrying `ρ(x)`.
    Prime { rho: Scalar },
    /// `x ∈ I_χ \ P_χ`.
    Rest,
}

/// Sine family with `χ* = χ`: `k = χA | ρ | 0`, `l = χ(1+cA) | cρ | 0`.
pub fn sine_additive(piece: &Piece, c: &Scalar) -> (Scalar, Scalar) {
    match piece {
        Piece::Outside { chi, additive } => {
            let k = chi * additive;
            let l = chi * &(Scalar::one() + c * additive);
            (k, l)
        }
        Piece::Prime { rho } => (rho.clone(), c * rho),
        Piece::Rest => (Scalar::zero(), Scalar::zero()),
    }
}

/// d'Alembert family with `χ ≠ χ*`:
/// `f = θ + α(χ+χ*)/2 + β(χ−χ*)/2`, `g = 2(β(χ+χ*)/2 + α(χ−χ*)/2)`, `h = (χ−χ*)/2`.
pub fn dalembert_character(
    theta: &Scalar,
    chi: &Scalar,
    chi_star: &Scalar,
    alpha: &Scalar,
    beta: &Scalar,
) -> (Scalar, Scalar, Scalar) {
    let (e, o) = even_odd(chi, chi_star);
    let f = theta + &(alpha * &e) + beta * &o;
    let g = (beta * &e + alpha * &o) * Scalar::from_int(2);
    (f, g, o)
}

/// d'Alembert family with `χ = χ*`: off `I_χ`,
/// `f = θ + (α/2)χA + (β/4)χA²`, `g = αχ + βχA`, `h = χA`; on `I_χ`, `f = θ`, `g = h = 0`.
pub fn dalembert_additive(
    theta: &Scalar,
    outside: Option<(&Scalar, &Scalar)>,
    alpha: &Scalar,
    beta: &Scalar,
) -> (Scalar, Scalar, Scalar) {
    match outside {
        Some((chi, a)) => {
            let chi_a = chi * a;
            let f = theta + &(alpha * &chi_a).half() + (beta * &(&chi_a * a)).half().half();
            let g = alpha * chi + beta * &chi_a;
            (f, g, chi_a)
        }
        None => (theta.clone(), Scalar::zero(), Scalar::zero()),
    }
}
