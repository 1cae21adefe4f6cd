//! Dense univariate polynomials over a field, coefficients low to high.

use std::fmt;

use crate::matrix::Matrix;
use crate::scalar::{Field, Gq, Ring, C64};

#[derive(Clone, PartialEq, Debug)]
pub struct UPoly<F> {
    coeffs: Vec<F>,
}

impl<F: Field> UPoly<F> {
    pub fn new(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().is_some_and(Ring::is_zero) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn zero() -> Self {
        UPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        UPoly::new(vec![F::one()])
    }

    /// The monomial `t`.
    pub fn t() -> Self {
        UPoly::new(vec![F::zero(), F::one()])
    }

    /// `t − root`.
    pub fn linear(root: &F) -> Self {
        UPoly::new(vec![-root.clone(), F::one()])
    }

    pub fn from_roots<'a>(roots: impl IntoIterator<Item = &'a F>) -> Self
    where
        F: 'a,
    {
        roots
            .into_iter()
            .fold(UPoly::one(), |acc, r| acc.mul(&UPoly::linear(r)))
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        UPoly::new(coeffs.iter().map(|&c| F::from_i64(c)).collect())
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> F {
        self.coeffs.last().cloned().unwrap_or_else(F::zero)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.leading().inv();
        UPoly::new(self.coeffs.iter().map(|c| c.clone() * inv.clone()).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        UPoly::new(
            (0..n)
                .map(|k| self.coeff(k) + other.coeff(k))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        UPoly::new(
            (0..n)
                .map(|k| self.coeff(k) - other.coeff(k))
                .collect(),
        )
    }

    pub fn coeff(&self, k: usize) -> F {
        self.coeffs.get(k).cloned().unwrap_or_else(F::zero)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return UPoly::zero();
        }
        let mut out = vec![F::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        UPoly::new(out)
    }

    pub fn scale(&self, s: &F) -> Self {
        UPoly::new(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    pub fn derivative(&self) -> Self {
        UPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.clone() * F::from_i64(k as i64))
                .collect(),
        )
    }

    pub fn eval(&self, x: &F) -> F {
        self.coeffs
            .iter()
            .rev()
            .fold(F::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    /// Horner evaluation at a square matrix.
    pub fn eval_matrix(&self, m: &Matrix<F>) -> Matrix<F> {
        let n = m.rows();
        let mut acc = Matrix::zeros(n, n);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * m) + &Matrix::scalar(n, c.clone());
        }
        acc
    }

    /// Euclidean division: `self = q·divisor + r`, `deg r < deg divisor`.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let dd = divisor.coeffs.len() - 1;
        let lead_inv = divisor.leading().inv();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (UPoly::zero(), self.clone());
        }
        let mut quot = vec![F::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd].clone() * lead_inv.clone();
            if !c.is_zero() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] = rem[k + j].clone() - c.clone() * d.clone();
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (UPoly::new(quot), UPoly::new(rem))
    }

    /// Monic greatest common divisor (exact arithmetic expected).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Product of the distinct irreducible factors, monic.
    pub fn squarefree_part(&self) -> Self {
        if self.degree().unwrap_or(0) == 0 {
            return UPoly::one();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).degree() == Some(0)
    }

    pub fn to_c64(&self) -> UPoly<C64> {
        UPoly::new(self.coeffs.iter().map(Field::to_c64).collect())
    }
}

impl UPoly<Gq> {
    /// Multiplicity of `root` as a zero of `self`.
    pub fn multiplicity(&self, root: &Gq) -> usize {
        let lin = UPoly::linear(root);
        let mut p = self.clone();
        let mut m = 0;
        while !p.is_zero() {
            let (q, r) = p.div_rem(&lin);
            if !r.is_zero() {
                break;
            }
            p = q;
            m += 1;
        }
        m
    }
}

impl<F: Field + fmt::Display> fmt::Display for UPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => format!("({c})"),
                1 => format!("({c})t"),
                _ => format!("({c})t^{k}"),
            })
            .collect();
        f.write_str(&terms.join(" + "))
    }
}

/// All complex roots of a polynomial with simple roots (Aberth–Ehrlich
/// iteration, deterministic start, Newton polish).
pub fn numeric_roots(p: &UPoly<C64>) -> Vec<C64> {
    let Some(deg) = p.degree() else {
        return Vec::new();
    };
    if deg == 0 {
        return Vec::new();
    }
    let p = p.monic();
    let c = p.coeffs();
    if deg == 1 {
        return vec![-c[0]];
    }
    if deg == 2 {
        return quadratic_roots(c[1], c[0]);
    }
    let dp = p.derivative();
    // Cauchy bound for the start circle.
    let radius = 1.0 + c[..deg].iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut z: Vec<C64> = (0..deg)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * (k as f64) / (deg as f64) + 0.4;
            C64::from_polar(radius * 0.5, theta)
        })
        .collect();
    for _ in 0..500 {
        let mut max_step: f64 = 0.0;
        for i in 0..deg {
            let pv = p.eval(&z[i]);
            let dv = dp.eval(&z[i]);
            if pv.norm() == 0.0 {
                continue;
            }
            let ratio = pv / dv;
            let sum: C64 = (0..deg)
                .filter(|&j| j != i)
                .map(|j| C64::new(1.0, 0.0) / (z[i] - z[j]))
                .sum();
            let step = ratio / (C64::new(1.0, 0.0) - ratio * sum);
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / 1f64.max(z[i].norm()));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    for r in z.iter_mut() {
        for _ in 0..3 {
            let d = dp.eval(r);
            if d.norm() == 0.0 {
                break;
            }
            let step = p.eval(r) / d;
            if !step.is_finite() {
                break;
            }
            *r -= step;
        }
    }
    z
}

/// Roots of `t² + b t + c`, computed without cancellation.
fn quadratic_roots(b: C64, c: C64) -> Vec<C64> {
    let disc = (b * b - c * 4.0).sqrt();
    let q = if (b.conj() * disc).re >= 0.0 {
        -(b + disc) * 0.5
    } else {
        -(b - disc) * 0.5
    };
    if q.norm() == 0.0 {
        return vec![C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
    }
    vec![q, c / q]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gcd_and_squarefree() {
        // (t-1)^2 (t+2)
        let p = UPoly::<Gq>::from_i64(&[2, -3, 0, 1]);
        assert_eq!(p.squarefree_part(), UPoly::from_i64(&[-2, 1, 1]));
        assert!(!p.is_squarefree());
        assert_eq!(p.multiplicity(&Gq::from_i64(1)), 2);
        assert_eq!(p.multiplicity(&Gq::from_i64(-2)), 1);
    }

    #[test]
    fn division_identity() {
        let a = UPoly::<Gq>::from_i64(&[5, 0, 3, 1, 7]);
        let b = UPoly::<Gq>::from_i64(&[1, 2, 1]);
        let (q, r) = a.div_rem(&b);
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.degree().unwrap_or(0) < 2);
    }

    #[test]
    fn cube_roots_of_two() {
        let p = UPoly::<C64>::from_i64(&[-2, 0, 0, 1]);
        let roots = numeric_roots(&p);
        assert_eq!(roots.len(), 3);
        for r in roots {
            assert!((r * r * r - C64::new(2.0, 0.0)).norm() < 1e-12);
        }
    }
}
