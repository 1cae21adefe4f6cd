//! Sparse multivariate polynomials.
//!
//! Monomials are exponent vectors with trailing zeros trimmed, so
//! polynomials in different numbers of variables interoperate freely.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::{Field, Gq, Ring};

pub type Monomial = Vec<u32>;

#[derive(Clone, PartialEq)]
pub struct MPoly<F> {
    terms: BTreeMap<Monomial, F>,
}

fn trim(mut m: Monomial) -> Monomial {
    while m.last() == Some(&0) {
        m.pop();
    }
    m
}

fn mono_mul(a: &[u32], b: &[u32]) -> Monomial {
    let n = a.len().max(b.len());
    (0..n)
        .map(|k| a.get(k).copied().unwrap_or(0) + b.get(k).copied().unwrap_or(0))
        .collect()
}

impl<F: Field> MPoly<F> {
    pub fn constant(c: F) -> Self {
        let mut p = MPoly { terms: BTreeMap::new() };
        p.add_term(Vec::new(), c);
        p
    }

    /// The coordinate function of variable `i`.
    pub fn var(i: usize) -> Self {
        let mut m = vec![0; i + 1];
        m[i] = 1;
        MPoly::monomial(m, F::one())
    }

    pub fn monomial(m: Monomial, c: F) -> Self {
        let mut p = MPoly { terms: BTreeMap::new() };
        p.add_term(trim(m), c);
        p
    }

    /// Linear form `Σ coeffs[i]·var(i)`.
    pub fn linear(coeffs: &[F]) -> Self {
        let mut p = MPoly { terms: BTreeMap::new() };
        for (i, c) in coeffs.iter().enumerate() {
            let mut m = vec![0; i + 1];
            m[i] = 1;
            p.add_term(m, c.clone());
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: F) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                let s = v.clone() + c;
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &F)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Number of variables actually occurring (one past the highest index).
    pub fn arity(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.iter().sum()).max()
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms
            .keys()
            .map(|m| m.get(var).copied().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    pub fn constant_term(&self) -> F {
        self.terms.get(&Vec::new()).cloned().unwrap_or_else(F::zero)
    }

    pub fn scale(&self, s: &F) -> Self {
        let mut p = MPoly { terms: BTreeMap::new() };
        for (m, c) in &self.terms {
            p.add_term(m.clone(), c.clone() * s.clone());
        }
        p
    }

    pub fn partial(&self, var: usize) -> Self {
        let mut p = MPoly { terms: BTreeMap::new() };
        for (m, c) in &self.terms {
            let e = m.get(var).copied().unwrap_or(0);
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2[var] -= 1;
            p.add_term(trim(m2), c.clone() * F::from_i64(e as i64));
        }
        p
    }

    /// Coefficient of `var^k` as a polynomial in the remaining variables.
    pub fn coefficient_of(&self, var: usize, k: u32) -> Self {
        let mut p = MPoly { terms: BTreeMap::new() };
        for (m, c) in &self.terms {
            if m.get(var).copied().unwrap_or(0) != k {
                continue;
            }
            let mut m2 = m.clone();
            if var < m2.len() {
                m2[var] = 0;
            }
            p.add_term(trim(m2), c.clone());
        }
        p
    }

    /// Evaluation at a point; missing coordinates count as zero.
    pub fn eval(&self, point: &[F]) -> F {
        let mut acc = F::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (k, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let x = point.get(k).cloned().unwrap_or_else(F::zero);
                for _ in 0..e {
                    t = t * x.clone();
                }
            }
            acc = acc + t;
        }
        acc
    }

    /// Substitutes polynomials for variables (`subs[k]` replaces var `k`;
    /// variables past the end are left alone).
    pub fn compose(&self, subs: &[MPoly<F>]) -> Self {
        let mut out = MPoly::zero();
        for (m, c) in &self.terms {
            let mut t = MPoly::constant(c.clone());
            for (k, &e) in m.iter().enumerate() {
                let base = subs.get(k).cloned().unwrap_or_else(|| MPoly::var(k));
                for _ in 0..e {
                    t = t * base.clone();
                }
            }
            out = out + t;
        }
        out
    }

    pub fn map_coeffs<G: Field>(&self, f: impl Fn(&F) -> G) -> MPoly<G> {
        let mut p = MPoly { terms: BTreeMap::new() };
        for (m, c) in &self.terms {
            p.add_term(m.clone(), f(c));
        }
        p
    }

    /// Rewrites every monomial divisible by `lead` as `tail · (m / lead)`
    /// until no such monomial remains. Reduction modulo `lead − tail` when
    /// `tail` contains no monomial divisible by `lead`.
    pub fn reduce_by(&self, lead: &Monomial, tail: &MPoly<F>) -> Self {
        let divides = |m: &Monomial| {
            lead.iter()
                .enumerate()
                .all(|(k, &e)| m.get(k).copied().unwrap_or(0) >= e)
        };
        let mut cur = self.clone();
        loop {
            let Some(m) = cur.terms.keys().find(|m| divides(m)).cloned() else {
                return cur;
            };
            let c = cur.terms.remove(&m).unwrap();
            let mut quot = m.clone();
            for (k, &e) in lead.iter().enumerate() {
                quot[k] -= e;
            }
            let repl = tail.clone() * MPoly::monomial(quot, c);
            cur = cur + repl;
        }
    }
}

impl<F: Field> Ring for MPoly<F> {
    fn zero() -> Self {
        MPoly { terms: BTreeMap::new() }
    }
    fn one() -> Self {
        MPoly::constant(F::one())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn from_gq(q: &Gq) -> Self {
        MPoly::constant(F::from_gq(q))
    }
}

impl<F: Field> Add for MPoly<F> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl<F: Field> Sub for MPoly<F> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for (m, c) in rhs.terms {
            self.add_term(m, -c);
        }
        self
    }
}

impl<F: Field> Neg for MPoly<F> {
    type Output = Self;
    fn neg(self) -> Self {
        MPoly {
            terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect(),
        }
    }
}

impl<F: Field> Mul for MPoly<F> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut p = MPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                p.add_term(mono_mul(ma, mb), ca.clone() * cb.clone());
            }
        }
        p
    }
}

impl<F: Field> fmt::Debug for MPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let vars: Vec<String> = m
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(k, &e)| if e == 1 { format!("a{k}") } else { format!("a{k}^{e}") })
                    .collect();
                if vars.is_empty() {
                    format!("{c:?}")
                } else {
                    format!("{c:?}*{}", vars.join("*"))
                }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}
