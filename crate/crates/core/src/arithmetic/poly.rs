//! Exact integer polynomials, coefficients stored constant term first.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{ArithmeticError, Result};

pub type Coeffs = Vec<BigInt>;

/// Monic polynomial of degree at least one with integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Coeffs,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Coeffs) -> Result<Self> {
        trim(&mut coeffs);
        if coeffs.len() < 2 {
            return Err(ArithmeticError::NotMonic("degree must be at least 1".into()));
        }
        if !coeffs.last().unwrap().is_one() {
            return Err(ArithmeticError::NotMonic(format!("leading coefficient {}", coeffs.last().unwrap())));
        }
        Ok(Self { coeffs })
    }

    pub fn from_i64(c: &[i64]) -> Result<Self> {
        Self::new(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            coeffs: mul(&self.coeffs, &other.coeffs),
        }
    }

    pub fn to_i64(&self) -> Option<Vec<i64>> {
        self.coeffs.iter().map(|c| i64::try_from(c).ok()).collect()
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let coef = if mag.is_one() && k > 0 { String::new() } else { mag.to_string() };
            match k {
                0 => write!(f, "{mag}")?,
                1 => write!(f, "{coef}x")?,
                _ => write!(f, "{coef}x^{k}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for IntPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.coeffs.iter().map(|c| c.to_string()))
    }
}

pub(crate) fn trim(p: &mut Coeffs) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn deg(p: &[BigInt]) -> isize {
    p.len() as isize - 1
}

pub(crate) fn mul(a: &[BigInt], b: &[BigInt]) -> Coeffs {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn sub(a: &[BigInt], b: &[BigInt]) -> Coeffs {
    let mut out: Coeffs = (0..a.len().max(b.len()))
        .map(|i| a.get(i).cloned().unwrap_or_default() - b.get(i).cloned().unwrap_or_default())
        .collect();
    trim(&mut out);
    out
}

pub(crate) fn derivative(p: &[BigInt]) -> Coeffs {
    p.iter().enumerate().skip(1).map(|(k, c)| c * BigInt::from(k)).collect()
}

/// Divides out the content; the leading coefficient becomes positive.
fn primitive(p: &[BigInt]) -> Coeffs {
    let g = p.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    if g.is_zero() {
        return Vec::new();
    }
    let g = if p.last().unwrap().is_negative() { -g } else { g };
    p.iter().map(|c| c / &g).collect()
}

fn pseudo_rem(a: &[BigInt], b: &[BigInt]) -> Coeffs {
    let mut r = a.to_vec();
    let lb = b.last().unwrap().clone();
    while deg(&r) >= deg(b) {
        let shift = r.len() - b.len();
        let lr = r.last().unwrap().clone();
        for c in r.iter_mut() {
            *c *= &lb;
        }
        for (i, c) in b.iter().enumerate() {
            r[i + shift] -= &lr * c;
        }
        trim(&mut r);
    }
    r
}

/// Primitive gcd with positive leading coefficient.
pub(crate) fn gcd(a: &[BigInt], b: &[BigInt]) -> Coeffs {
    let (mut a, mut b) = (primitive(a), primitive(b));
    if deg(&a) < deg(&b) {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let r = primitive(&pseudo_rem(&a, &b));
        a = b;
        b = r;
    }
    if a.is_empty() {
        return vec![BigInt::one()];
    }
    if a.len() == 1 {
        return vec![BigInt::one()];
    }
    a
}

/// Quotient when `b` divides `a` over the integers.
pub(crate) fn div_exact(a: &[BigInt], b: &[BigInt]) -> Option<Coeffs> {
    let mut r = a.to_vec();
    trim(&mut r);
    if deg(&r) < deg(b) {
        return r.is_empty().then(Vec::new);
    }
    let lb = b.last()?;
    let mut q = vec![BigInt::zero(); r.len() - b.len() + 1];
    while deg(&r) >= deg(b) {
        let shift = r.len() - b.len();
        let (c, rem) = r.last().unwrap().div_rem(lb);
        if !rem.is_zero() {
            return None;
        }
        for (i, x) in b.iter().enumerate() {
            r[i + shift] -= &c * x;
        }
        q[shift] = c;
        trim(&mut r);
    }
    r.is_empty().then_some(q)
}

/// Yun's algorithm: `p = prod f_i^i` with each `f_i` squarefree.
pub fn squarefree_factorization(p: &IntPolynomial) -> Vec<(Coeffs, usize)> {
    let f = p.coeffs.clone();
    let df = derivative(&f);
    let a0 = gcd(&f, &df);
    let mut b = div_exact(&f, &a0).expect("gcd divides");
    let c = div_exact(&df, &a0).expect("gcd divides derivative");
    let mut d = sub(&c, &derivative(&b));
    let mut out = Vec::new();
    let mut i = 1;
    while deg(&b) > 0 {
        let a = if d.is_empty() { b.clone() } else { gcd(&b, &d) };
        if deg(&a) > 0 {
            out.push((monic_sign(a.clone()), i));
        }
        let nb = div_exact(&b, &a).expect("factor divides");
        let c = if d.is_empty() { Vec::new() } else { div_exact(&d, &a).expect("factor divides") };
        d = sub(&c, &derivative(&nb));
        b = nb;
        i += 1;
    }
    out
}

fn monic_sign(mut p: Coeffs) -> Coeffs {
    if p.last().is_some_and(|c| c.is_negative()) {
        for c in p.iter_mut() {
            *c = -c.clone();
        }
    }
    p
}

fn mobius(m: usize) -> i32 {
    let (mut m, mut k, mut sign) = (m, 2, 1);
    while k * k <= m {
        if m % k == 0 {
            m /= k;
            if m % k == 0 {
                return 0;
            }
            sign = -sign;
        }
        k += 1;
    }
    if m > 1 {
        sign = -sign;
    }
    sign
}

pub fn euler_phi(m: usize) -> usize {
    let (mut m, mut k, mut out) = (m, 2, m);
    while k * k <= m {
        if m % k == 0 {
            while m % k == 0 {
                m /= k;
            }
            out -= out / k;
        }
        k += 1;
    }
    if m > 1 {
        out -= out / m;
    }
    out
}

/// `Phi_m` as the Mobius product of `x^d - 1` over divisors.
pub fn cyclotomic(m: usize) -> IntPolynomial {
    assert!(m >= 1);
    let xd = |d: usize| -> Coeffs {
        let mut v = vec![BigInt::zero(); d + 1];
        v[0] = -BigInt::one();
        v[d] = BigInt::one();
        v
    };
    let mut num = vec![BigInt::one()];
    let mut den = vec![BigInt::one()];
    for d in (1..=m).filter(|d| m % d == 0) {
        match mobius(m / d) {
            1 => num = mul(&num, &xd(d)),
            -1 => den = mul(&den, &xd(d)),
            _ => {}
        }
    }
    IntPolynomial::new(div_exact(&num, &den).expect("Mobius product is exact")).expect("cyclotomic is monic")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KroneckerFactorization {
    /// Power of `x` dividing the polynomial.
    pub x_power: usize,
    /// `(m, multiplicity)` for each cyclotomic factor `Phi_m`.
    pub factors: Vec<(usize, usize)>,
}

/// Writes `p = x^k prod Phi_m^{e_m}` when possible, i.e. exactly when every
/// root is zero or a root of unity.
pub fn kronecker_factorization(p: &IntPolynomial) -> Option<KroneckerFactorization> {
    let x_power = p.coeffs.iter().take_while(|c| c.is_zero()).count();
    let mut rest: Coeffs = p.coeffs[x_power..].to_vec();
    if !rest[0].abs().is_one() {
        return None;
    }
    let mut factors = Vec::new();
    let mut cache: HashMap<usize, IntPolynomial> = HashMap::new();
    let mut m = 1;
    // phi(m) >= sqrt(m / 2), so larger m cannot fit
    let limit = 2 * (rest.len() - 1).pow(2) + 2;
    while rest.len() > 1 && m <= limit {
        if euler_phi(m) <= rest.len() - 1 {
            let phi = cache.entry(m).or_insert_with(|| cyclotomic(m)).coeffs.clone();
            let mut mult = 0;
            while let Some(q) = div_exact(&rest, &phi) {
                rest = q;
                mult += 1;
            }
            if mult > 0 {
                factors.push((m, mult));
            }
        }
        m += 1;
    }
    (rest.len() == 1 && rest[0].is_one()).then_some(KroneckerFactorization { x_power, factors })
}

/// Product of cyclotomic polynomials (no factor of `x`).
pub fn is_cyclotomic_product(p: &IntPolynomial) -> bool {
    kronecker_factorization(p).is_some_and(|k| k.x_power == 0)
}
