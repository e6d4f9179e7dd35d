//! Polynomial roots by Aberth iteration, Newton polishing in double-double
//! and a posteriori inclusion disks; Mahler measures with error bounds.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::dd::{CDd, Dd};
use super::poly::{squarefree_factorization, IntPolynomial};
use super::{ArithmeticError, Result};

const ABERTH_MAX_ITER: usize = 2000;
const POLISH_STEPS: usize = 4;
/// Unit roundoff of double-double arithmetic.
const DD_EPS: f64 = 2.5e-32;

/// Roots of a polynomial with floating coefficients, constant term first.
pub fn aberth(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let lc = coeffs[n];
    let radius = 1.0 + coeffs[..n].iter().map(|c| (c / lc).abs()).fold(0.0, f64::max);
    // start inside the Cauchy bound, off any symmetry axis
    let r0 = radius.min(2.0).max(0.5);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(r0, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4))
        .collect();
    let eval = |x: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::new(coeffs[n], 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for c in coeffs[..n].iter().rev() {
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp)
    };
    for _ in 0..ABERTH_MAX_ITER {
        let mut moved = 0.0f64;
        for k in 0..n {
            let (p, dp) = eval(z[k]);
            if p == Complex64::new(0.0, 0.0) {
                continue;
            }
            let w = p / dp;
            let s: Complex64 = (0..n).filter(|&j| j != k).map(|j| 1.0 / (z[k] - z[j])).sum();
            let step = w / (1.0 - w * s);
            if step.is_finite() {
                z[k] -= step;
                moved = moved.max(step.norm() / z[k].norm().max(1.0));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

fn eval_dd(c: &[Dd], x: CDd) -> (CDd, CDd) {
    let n = c.len() - 1;
    let mut p = CDd::new(c[n], Dd::ZERO);
    let mut dp = CDd::default();
    for k in (0..n).rev() {
        dp = dp * x + p;
        p = p * x + CDd::new(c[k], Dd::ZERO);
    }
    (p, dp)
}

#[derive(Clone, Debug, Serialize)]
pub struct CertifiedRoot {
    pub re: f64,
    pub im: f64,
    /// Radius of a disk around `re + i im` containing a root.
    pub radius: f64,
    pub multiplicity: usize,
}

impl CertifiedRoot {
    pub fn abs(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

/// Roots of a squarefree integer polynomial with inclusion radii.
///
/// Disk `i` has radius `n |p(z_i)| / |lc prod_{j != i} (z_i - z_j)|`; the
/// union of disks holds all roots and each connected component holds as many
/// roots as disks. Radii are widened to the component diameter.
pub fn certified_roots(coeffs: &[BigInt]) -> Vec<(CDd, f64)> {
    let n = coeffs.len() - 1;
    let cf: Vec<f64> = coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::INFINITY)).collect();
    let cd: Vec<Dd> = coeffs.iter().map(Dd::from_bigint).collect();
    let mut roots: Vec<CDd> = aberth(&cf).into_iter().map(|z| CDd::from_f64(z.re, z.im)).collect();
    for z in roots.iter_mut() {
        for _ in 0..POLISH_STEPS {
            let (p, dp) = eval_dd(&cd, *z);
            if dp.norm_sqr().hi == 0.0 {
                break;
            }
            *z = *z - p / dp;
        }
    }
    let lc = cf[n].abs();
    let mut radii: Vec<f64> = (0..n)
        .map(|i| {
            let z = roots[i];
            let (p, _) = eval_dd(&cd, z);
            let az = z.abs().to_f64();
            // rounding bound of the Horner evaluation
            let scale: f64 = cf.iter().enumerate().map(|(k, c)| c.abs() * az.powi(k as i32)).sum();
            let perr = p.abs().to_f64() + 4.0 * (n as f64 + 1.0) * DD_EPS * scale;
            let mut den = lc;
            for (j, w) in roots.iter().enumerate() {
                if j != i {
                    den *= (z - *w).abs().to_f64();
                }
            }
            if den > 0.0 {
                n as f64 * perr / den * (1.0 + 1e-12)
            } else {
                f64::INFINITY
            }
        })
        .collect();
    // merge overlapping disks into components
    let mut comp: Vec<usize> = (0..n).collect();
    fn find(c: &mut Vec<usize>, i: usize) -> usize {
        let mut r = i;
        while c[r] != r {
            r = c[r];
        }
        c[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (roots[i] - roots[j]).abs().to_f64() <= radii[i] + radii[j] {
                let (a, b) = (find(&mut comp, i), find(&mut comp, j));
                comp[a] = b;
            }
        }
    }
    let mut width = vec![0.0; n];
    for i in 0..n {
        let c = find(&mut comp, i);
        width[c] += 2.0 * radii[i];
    }
    for i in 0..n {
        let c = find(&mut comp, i);
        if (0..n).filter(|&j| find(&mut comp, j) == c).count() > 1 {
            radii[i] = width[c];
        }
    }
    roots.into_iter().zip(radii).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct MahlerResult {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    /// Half-width of the certified enclosure `[lower, upper]`.
    pub precision: f64,
    pub roots: Vec<CertifiedRoot>,
}

/// `prod max(1, |root|)` over the squarefree factorization.
pub fn mahler_measure(p: &IntPolynomial, precision: f64) -> Result<MahlerResult> {
    let mut value = Dd::new(1.0);
    let (mut lo, mut hi) = (1.0f64, 1.0f64);
    let mut roots = Vec::new();
    for (f, mult) in squarefree_factorization(p) {
        for (z, r) in certified_roots(&f) {
            let a = z.abs();
            let af = a.to_f64();
            for _ in 0..mult {
                if af > 1.0 {
                    value = value * a;
                }
                lo *= (af - r).max(1.0);
                hi *= (af + r).max(1.0);
            }
            roots.push(CertifiedRoot {
                re: z.re.to_f64(),
                im: z.im.to_f64(),
                radius: r,
                multiplicity: mult,
            });
        }
    }
    let value = value.to_f64();
    // products above carry relative rounding of order degree * 2^-53
    let slack = value * 4.0 * p.degree() as f64 * f64::EPSILON;
    let (lower, upper) = ((lo - slack).min(value).max(1.0), (hi + slack).max(value));
    let achieved = 0.5 * (upper - lower);
    if !(achieved <= precision) {
        return Err(ArithmeticError::Precision {
            requested: precision,
            achieved,
        });
    }
    roots.sort_by(|a, b| a.abs().total_cmp(&b.abs()).then(a.re.total_cmp(&b.re)).then(a.im.total_cmp(&b.im)));
    Ok(MahlerResult {
        value,
        lower,
        upper,
        precision: achieved,
        roots,
    })
}
