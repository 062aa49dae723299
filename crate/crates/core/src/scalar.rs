//! Exact complex scalars living in cyclotomic fields.
//!
//! Every value a multiplicative function can take on a finite semigroup is
//! zero or a root of unity, so the natural home for χ, μ and everything built
//! from them is `Q(ζ_N)` for a suitable conductor `N`. A [`Scalar`] stores a
//! conductor together with its coordinates in the power basis
//! `1, ζ_N, …, ζ_N^{φ(N)-1}`, reduced modulo the cyclotomic polynomial `Φ_N`.
//! That representation is canonical for a fixed conductor, so exact equality
//! is decided by lifting both operands to a common conductor and comparing
//! coordinates.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::rc::Rc;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// Largest conductor accepted when building roots of unity.
pub const MAX_CONDUCTOR: u32 = 1 << 12;

thread_local! {
    static CYCLOTOMIC: RefCell<HashMap<u32, Rc<Vec<i64>>>> = RefCell::new(HashMap::new());
}

/// Integer coefficients of `Φ_n`, lowest degree first.
pub fn cyclotomic_poly(n: u32) -> Rc<Vec<i64>> {
    assert!(n >= 1, "conductor must be positive");
    if let Some(p) = CYCLOTOMIC.with(|c| c.borrow().get(&n).cloned()) {
        return p;
    }
    // x^n - 1 divided by Φ_d for every proper divisor d.
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n % d == 0 {
            let phi_d = cyclotomic_poly(d);
            num = exact_int_div(&num, &phi_d);
        }
    }
    let rc = Rc::new(num);
    CYCLOTOMIC.with(|c| c.borrow_mut().insert(n, rc.clone()));
    rc
}

fn exact_int_div(num: &[i64], den: &[i64]) -> Vec<i64> {
    // den is monic
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let nd = rem.len() - 1;
    let mut q = vec![0i64; nd - dd + 1];
    for i in (0..=nd - dd).rev() {
        let coef = rem[i + dd];
        q[i] = coef;
        if coef != 0 {
            for (j, &dj) in den.iter().enumerate() {
                rem[i + j] -= coef * dj;
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    q
}

pub fn totient(n: u32) -> u32 {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

/// An exact element of `Q(ζ_N)`.
#[derive(Clone, Debug)]
pub struct Scalar {
    conductor: u32,
    coeffs: Vec<Rational>,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { conductor: 1, coeffs: vec![Rational::zero()] }
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_rational(r: Rational) -> Self {
        Scalar { conductor: 1, coeffs: vec![r] }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::from_rational(Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// `re + im·i`.
    pub fn gaussian(re: Rational, im: Rational) -> Self {
        if im.is_zero() {
            return Self::from_rational(re);
        }
        Scalar { conductor: 4, coeffs: vec![re, im] }
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Self::gaussian(Rational::zero(), Rational::one())
    }

    /// `e^{2πi·num/den}`.
    pub fn root_of_unity(num: i64, den: u32) -> Self {
        assert!(den >= 1 && den <= MAX_CONDUCTOR, "root of unity order out of range");
        let (num, den) = reduce_fraction(num, den);
        if den == 1 {
            return Self::one();
        }
        let mut poly = vec![Rational::zero(); den as usize];
        poly[num as usize] = Rational::one();
        Self::from_power_poly(den, poly)
    }

    /// Exact conversion of a float pair; every finite `f64` is a dyadic rational.
    pub fn from_complex_exact(z: Complex64) -> Option<Self> {
        let re = Rational::from_float(z.re)?;
        let im = Rational::from_float(z.im)?;
        Some(Self::gaussian(re, im))
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    /// Coordinates in the reduced power basis of `ζ_conductor`.
    pub fn coefficients(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.as_rational().is_some_and(|r| r.is_one())
    }

    /// Some(r) when the value is rational.
    pub fn as_rational(&self) -> Option<&Rational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        let n = self.conductor as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let cf = c.to_f64().unwrap_or(f64::NAN);
            // quarter turns are exact so Gaussian values convert without cross-talk
            let (re, im) = match (4 * j as u32 % self.conductor == 0).then(|| 4 * j as u32 / self.conductor) {
                Some(0) => (cf, 0.0),
                Some(1) => (0.0, cf),
                Some(2) => (-cf, 0.0),
                Some(_) => (0.0, -cf),
                None => {
                    let ang = std::f64::consts::TAU * j as f64 / n;
                    (cf * ang.cos(), cf * ang.sin())
                }
            };
            acc += Complex64::new(re, im);
        }
        acc
    }

    pub fn abs_f64(&self) -> f64 {
        if let Some(r) = self.as_rational() {
            return r.abs().to_f64().unwrap_or(f64::INFINITY);
        }
        self.to_complex().norm()
    }

    /// Complex conjugation (`ζ ↦ ζ^{-1}`).
    pub fn conj(&self) -> Self {
        if self.conductor <= 2 {
            return self.clone();
        }
        let n = self.conductor as usize;
        let mut poly = vec![Rational::zero(); n];
        for (j, c) in self.coeffs.iter().enumerate() {
            poly[(n - j) % n] += c;
        }
        Self::from_power_poly(self.conductor, poly)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        let mut out = Scalar {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        };
        out.normalize();
        out
    }

    pub fn half(&self) -> Self {
        self.scale(&Rational::new(BigInt::from(1), BigInt::from(2)))
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Scalar::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if let Some(r) = self.as_rational() {
            return Some(Self::from_rational(r.recip()));
        }
        let modulus: Vec<Rational> =
            cyclotomic_poly(self.conductor).iter().map(|&c| int_rat(c)).collect();
        let s = poly_inverse_mod(&self.coeffs, &modulus);
        let mut out = Scalar { conductor: self.conductor, coeffs: s };
        out.coeffs.resize(totient(self.conductor) as usize, Rational::zero());
        out.normalize();
        Some(out)
    }

    /// Terms `(coefficient, j)` meaning `coefficient · ζ_N^j` with `N` the conductor.
    pub fn terms(&self) -> impl Iterator<Item = (&Rational, u32)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| (c, j as u32))
    }

    fn from_power_poly(conductor: u32, mut poly: Vec<Rational>) -> Self {
        // poly has exponents < conductor; ζ^N = 1 already applied
        let phi = cyclotomic_poly(conductor);
        let deg = phi.len() - 1;
        for i in (deg..poly.len()).rev() {
            let lead = std::mem::take(&mut poly[i]);
            if lead.is_zero() {
                continue;
            }
            for (j, &pj) in phi.iter().enumerate().take(deg) {
                if pj != 0 {
                    poly[i - deg + j] -= &lead * int_rat(pj);
                }
            }
        }
        poly.truncate(deg);
        poly.resize(deg, Rational::zero());
        let mut out = Scalar { conductor, coeffs: poly };
        out.normalize();
        out
    }

    fn lift(&self, target: u32) -> Vec<Rational> {
        debug_assert_eq!(target % self.conductor, 0);
        if target == self.conductor {
            return self.coeffs.clone();
        }
        let step = (target / self.conductor) as usize;
        let mut poly = vec![Rational::zero(); target as usize];
        for (j, c) in self.coeffs.iter().enumerate() {
            poly[j * step] = c.clone();
        }
        Self::from_power_poly(target, poly).into_coeffs_at(target)
    }

    fn into_coeffs_at(self, conductor: u32) -> Vec<Rational> {
        if self.conductor == conductor {
            return self.coeffs;
        }
        // normalize() collapsed a rational value to conductor 1
        let mut v = vec![Rational::zero(); totient(conductor) as usize];
        v[0] = self.coeffs[0].clone();
        v
    }

    fn normalize(&mut self) {
        if self.conductor != 1 && self.coeffs[1..].iter().all(Zero::is_zero) {
            let c0 = std::mem::take(&mut self.coeffs[0]);
            self.conductor = 1;
            self.coeffs = vec![c0];
        }
    }

    fn binary(&self, other: &Self, f: impl Fn(&Rational, &Rational) -> Rational) -> Self {
        let l = self.conductor.lcm(&other.conductor);
        let a = self.lift(l);
        let b = other.lift(l);
        let mut out = Scalar { conductor: l, coeffs: a.iter().zip(&b).map(|(x, y)| f(x, y)).collect() };
        out.normalize();
        out
    }
}

fn reduce_fraction(num: i64, den: u32) -> (u32, u32) {
    let d = den as i64;
    let a = num.rem_euclid(d);
    let g = a.gcd(&d).max(1);
    ((a / g) as u32, (d / g) as u32)
}

fn int_rat(c: i64) -> Rational {
    Rational::from_integer(BigInt::from(c))
}

fn trim(p: &mut Vec<Rational>) {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn degree(p: &[Rational]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

fn poly_divmod(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let db = degree(b).expect("division by zero polynomial");
    let mut rem = a.to_vec();
    let mut quot = vec![Rational::zero(); a.len().saturating_sub(db).max(1)];
    let lead_inv = b[db].recip();
    while let Some(dr) = degree(&rem) {
        if dr < db {
            break;
        }
        let coef = &rem[dr] * &lead_inv;
        let shift = dr - db;
        for (j, bj) in b.iter().enumerate().take(db + 1) {
            rem[shift + j] -= &coef * bj;
        }
        quot[shift] = coef;
    }
    trim(&mut rem);
    trim(&mut quot);
    (quot, rem)
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

fn poly_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let n = a.len().max(b.len());
    let mut out = vec![Rational::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    trim(&mut out);
    out
}

/// Inverse of `a` modulo the irreducible `m` via the extended Euclidean algorithm.
fn poly_inverse_mod(a: &[Rational], m: &[Rational]) -> Vec<Rational> {
    let (mut r0, mut r1) = (m.to_vec(), a.to_vec());
    trim(&mut r1);
    let (mut s0, mut s1) = (vec![Rational::zero()], vec![Rational::one()]);
    while degree(&r1).is_some_and(|d| d > 0) {
        let (q, r) = poly_divmod(&r0, &r1);
        let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
    }
    // r1 is a nonzero constant because m is irreducible and a ≢ 0
    let c = r1[0].recip();
    let (_, s) = poly_divmod(&s1.iter().map(|x| x * &c).collect::<Vec<_>>(), m);
    s
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        if self.conductor == other.conductor {
            return self.coeffs == other.coeffs;
        }
        (self - other).is_zero()
    }
}

impl Eq for Scalar {}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.binary(rhs, |a, b| a + b)
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.binary(rhs, |a, b| a - b)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if let Some(r) = self.as_rational() {
            return rhs.scale(r);
        }
        if let Some(r) = rhs.as_rational() {
            return self.scale(r);
        }
        let l = self.conductor.lcm(&rhs.conductor);
        let a = self.lift(l);
        let b = rhs.lift(l);
        let mut prod = poly_mul(&a, &b);
        // fold ζ^l = 1 is unnecessary: degree < 2φ(l) ≤ 2l, reduce directly mod Φ_l
        let phi: Vec<Rational> = cyclotomic_poly(l).iter().map(|&c| int_rat(c)).collect();
        let (_, rem) = poly_divmod(&prod, &phi);
        prod = rem;
        prod.resize(totient(l) as usize, Rational::zero());
        let mut out = Scalar { conductor: l, coeffs: prod };
        out.normalize();
        out
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { conductor: self.conductor, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Self {
        iter.fold(Scalar::zero(), |a, b| a + b)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::from_rational(r)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.as_rational() {
            return write!(f, "{r}");
        }
        let mut first = true;
        for (c, j) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if j == 0 {
                write!(f, "{c}")?;
            } else {
                write!(f, "({c})·ζ{}^{j}", self.conductor)?;
            }
        }
        Ok(())
    }
}

/// Parses `"p/q"`, `"p"` or a decimal literal into an exact rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).ok()?;
        let q = BigInt::from_str(q.trim()).ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(Rational::new(p, q));
    }
    if let Ok(n) = BigInt::from_str(s) {
        return Some(Rational::from_integer(n));
    }
    let x: f64 = s.parse().ok()?;
    Rational::from_float(x)
}

pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Exact value of `e^{2πi·num/den}` together with its reduced exponent.
pub fn reduced_exponent(num: i64, den: u32) -> (u32, u32) {
    reduce_fraction(num, den)
}
