//! Laurent polynomials in `z_1, …, z_l` with integer exponents.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::{Field, Gq, Ring, C64};

/// Sparse Laurent polynomial; exponent vectors carry no trailing zeros.
#[derive(Clone, PartialEq)]
pub struct LaurentPoly<F> {
    terms: BTreeMap<Vec<i64>, F>,
}

fn trim(mut e: Vec<i64>) -> Vec<i64> {
    while e.last() == Some(&0) {
        e.pop();
    }
    e
}

impl<F: Field> LaurentPoly<F> {
    pub fn constant(c: F) -> Self {
        Self::monomial(Vec::new(), c)
    }

    pub fn monomial(exp: Vec<i64>, c: F) -> Self {
        let mut p = LaurentPoly { terms: BTreeMap::new() };
        p.add_term(exp, c);
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &F)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, exp: Vec<i64>, c: F) {
        if c.is_zero() {
            return;
        }
        let exp = trim(exp);
        match self.terms.remove(&exp) {
            Some(old) => {
                let s = old + c;
                if !s.is_zero() {
                    self.terms.insert(exp, s);
                }
            }
            None => {
                self.terms.insert(exp, c);
            }
        }
    }

    /// `z_i ∂/∂z_i`, which multiplies each term by its `i`-th exponent.
    pub fn euler_derivative(&self, i: usize) -> Self {
        let mut out = LaurentPoly { terms: BTreeMap::new() };
        for (e, c) in &self.terms {
            let k = e.get(i).copied().unwrap_or(0);
            out.add_term(e.clone(), c.clone() * F::from_i64(k));
        }
        out
    }

    /// Ordinary partial derivative `∂/∂z_i`.
    pub fn partial(&self, i: usize) -> Self {
        let mut out = LaurentPoly { terms: BTreeMap::new() };
        for (e, c) in &self.terms {
            let k = e.get(i).copied().unwrap_or(0);
            if k == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            out.add_term(e2, c.clone() * F::from_i64(k));
        }
        out
    }

    pub fn eval(&self, z: &[C64]) -> C64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .enumerate()
                    .fold(c.to_c64(), |acc, (i, &k)| acc * z[i].powi(k as i32))
            })
            .sum()
    }

    /// Drops terms whose coefficient is at most `tol` in magnitude.
    pub fn prune(&self, tol: f64) -> Self {
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| !c.negligible(tol))
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Largest coefficient magnitude (zero for the zero polynomial).
    pub fn max_coeff(&self) -> f64 {
        self.terms.values().map(Field::magnitude).fold(0.0, f64::max)
    }

    pub fn map_coeffs<G: Field>(&self, f: impl Fn(&F) -> G) -> LaurentPoly<G> {
        let mut out = LaurentPoly { terms: BTreeMap::new() };
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }
}

impl LaurentPoly<Gq> {
    pub fn eval_exact(&self, z: &[Gq]) -> Gq {
        let mut acc = Gq::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &k) in e.iter().enumerate() {
                t = &t * &z[i].powi(k);
            }
            acc = &acc + &t;
        }
        acc
    }
}

impl<F: fmt::Debug> fmt::Debug for LaurentPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| format!("{:?}·z^{:?}", c, e))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl<F: Field> Ring for LaurentPoly<F> {
    fn zero() -> Self {
        LaurentPoly { terms: BTreeMap::new() }
    }
    fn one() -> Self {
        LaurentPoly::constant(F::one())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn from_gq(q: &Gq) -> Self {
        LaurentPoly::constant(F::from_gq(q))
    }
}

impl<F: Field> Add for LaurentPoly<F> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (e, c) in rhs.terms {
            self.add_term(e, c);
        }
        self
    }
}

impl<F: Field> Sub for LaurentPoly<F> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for (e, c) in rhs.terms {
            self.add_term(e, -c);
        }
        self
    }
}

impl<F: Field> Neg for LaurentPoly<F> {
    type Output = Self;
    fn neg(self) -> Self {
        LaurentPoly {
            terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect(),
        }
    }
}

impl<F: Field> Mul for LaurentPoly<F> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = LaurentPoly { terms: BTreeMap::new() };
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let len = e1.len().max(e2.len());
                let e: Vec<i64> = (0..len)
                    .map(|i| e1.get(i).copied().unwrap_or(0) + e2.get(i).copied().unwrap_or(0))
                    .collect();
                out.add_term(e, c1.clone() * c2.clone());
            }
        }
        out
    }
}
