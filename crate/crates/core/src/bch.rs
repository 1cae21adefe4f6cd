//! Baker–Campbell–Hausdorff product on a nilpotent Lie algebra and the
//! left-invariant vector fields it induces in exponential coordinates.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{DmodError, Result};
use crate::lie::LieAlgebra;
use crate::mpoly::MPoly;
use crate::scalar::{Gq, Ring};

/// Highest nilpotency class supported by the precomputed series.
pub const MAX_CLASS: usize = 6;

/// One term `coeff · [w_1, [w_2, … [w_{k−1}, w_k]]]` of the Dynkin series;
/// letters are `false` for the first argument, `true` for the second.
#[derive(Clone, Debug)]
struct Term {
    coeff: Gq,
    word: Vec<bool>,
}

fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::from(1), |acc, x| acc * BigInt::from(x))
}

/// Dynkin's formula up to total degree [`MAX_CLASS`], equal words merged.
fn dynkin_terms() -> &'static [Term] {
    static TERMS: OnceLock<Vec<Term>> = OnceLock::new();
    TERMS.get_or_init(|| {
        let mut acc: BTreeMap<Vec<bool>, BigRational> = BTreeMap::new();
        // Sequences of (r_i, s_i) with r_i + s_i >= 1.
        fn walk(
            pairs: &mut Vec<(usize, usize)>,
            remaining: usize,
            total: usize,
            acc: &mut BTreeMap<Vec<bool>, BigRational>,
        ) {
            if remaining == 0 {
                let n = pairs.len();
                let mut den = BigInt::from(n) * BigInt::from(total);
                for &(r, s) in pairs.iter() {
                    den *= factorial(r) * factorial(s);
                }
                let sign = if n % 2 == 1 { 1 } else { -1 };
                let mut c = BigRational::new(BigInt::from(sign), den);
                let mut word = Vec::with_capacity(total);
                for &(r, s) in pairs.iter() {
                    word.extend(std::iter::repeat(false).take(r));
                    word.extend(std::iter::repeat(true).take(s));
                }
                // [.., [a, a]] vanishes.
                if word.len() >= 2 && word[word.len() - 1] == word[word.len() - 2] {
                    return;
                }
                // [b, a] = −[a, b] on the innermost bracket.
                let k = word.len();
                if k >= 2 && word[k - 2] && !word[k - 1] {
                    word.swap(k - 2, k - 1);
                    c = -c;
                }
                let e = acc.entry(word).or_insert_with(|| BigRational::from_integer(0.into()));
                *e += c;
                return;
            }
            for size in 1..=remaining {
                for r in 0..=size {
                    pairs.push((r, size - r));
                    walk(pairs, remaining - size, total, acc);
                    pairs.pop();
                }
            }
        }
        for total in 1..=MAX_CLASS {
            walk(&mut Vec::new(), total, total, &mut acc);
        }
        acc.into_iter()
            .filter(|(_, c)| *c != BigRational::from_integer(0.into()))
            .map(|(word, c)| Term {
                coeff: Gq::from_rational(c),
                word,
            })
            .collect()
    })
}

/// BCH product `log(exp p · exp q)` for one nilpotent algebra.
#[derive(Clone, Debug)]
pub struct Bch {
    algebra: LieAlgebra,
    class: usize,
}

impl Bch {
    pub fn new(algebra: &LieAlgebra) -> Result<Self> {
        let profile = algebra.nilpotency_profile();
        if !profile.is_nilpotent {
            return Err(DmodError::NotNilpotentAlgebra);
        }
        if profile.class > MAX_CLASS {
            return Err(DmodError::Precondition(format!(
                "nilpotency class {} exceeds the supported {MAX_CLASS}",
                profile.class
            )));
        }
        Ok(Bch {
            algebra: algebra.clone(),
            class: profile.class,
        })
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn class(&self) -> usize {
        self.class
    }

    /// The product in basis coordinates, over any coefficient ring.
    pub fn apply<R: Ring>(&self, p: &[R], q: &[R]) -> Vec<R> {
        let m = self.algebra.dim();
        let mut out = vec![R::zero(); m];
        for term in dynkin_terms() {
            if term.word.len() > self.class.max(1) {
                continue;
            }
            let letter = |b: bool| if b { q } else { p };
            let mut v: Vec<R> = letter(*term.word.last().unwrap()).to_vec();
            for &b in term.word[..term.word.len() - 1].iter().rev() {
                v = self.algebra.bracket(letter(b), &v);
            }
            let c = R::from_gq(&term.coeff);
            for k in 0..m {
                if !v[k].is_zero() {
                    out[k] = out[k].clone() + c.clone() * v[k].clone();
                }
            }
        }
        out
    }

    /// Left-invariant field generated by `v`: the coefficients `c_k(a)` of
    /// `Σ c_k ∂/∂a_k`, where `c_k(a) = d/dt|₀ bch(a, t·v)_k`.
    pub fn invariant_field(&self, v: &[Gq]) -> InvariantField {
        let m = self.algebra.dim();
        let a: Vec<MPoly<Gq>> = (0..m).map(MPoly::var).collect();
        let t = MPoly::var(m);
        let tv: Vec<MPoly<Gq>> = v.iter().map(|c| t.scale(c)).collect();
        let prod = self.apply(&a, &tv);
        InvariantField {
            coeffs: prod.iter().map(|c| c.coefficient_of(m, 1)).collect(),
        }
    }
}

/// A first-order operator `Σ c_k(a) ∂/∂a_k` on polynomials in exponential
/// coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantField {
    pub coeffs: Vec<MPoly<Gq>>,
}

impl InvariantField {
    pub fn apply(&self, phi: &MPoly<Gq>) -> MPoly<Gq> {
        let mut out = MPoly::zero();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let d = phi.partial(k);
            if !d.is_zero() {
                out = out + c.clone() * d;
            }
        }
        out
    }
}

/// `log(exp p · exp q)` on a nilpotent algebra.
pub fn bch<R: Ring>(p: &[R], q: &[R], algebra: &LieAlgebra) -> Result<Vec<R>> {
    Ok(Bch::new(algebra)?.apply(p, q))
}

/// `v(φ)(p) = d/dt|₀ φ(bch(p, t·v))`, computed symbolically.
pub fn invariant_derivative(
    phi: &MPoly<Gq>,
    v: &[Gq],
    p: &[Gq],
    algebra: &LieAlgebra,
) -> Result<Gq> {
    let field = Bch::new(algebra)?.invariant_field(v);
    Ok(field.apply(phi).eval(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(v: &[i64]) -> Vec<Gq> {
        v.iter().map(|&x| Gq::from_i64(x)).collect()
    }

    #[test]
    fn low_order_coefficients() {
        let terms = dynkin_terms();
        let find = |w: &[bool]| terms.iter().find(|t| t.word == w).map(|t| t.coeff.clone());
        assert_eq!(find(&[false]), Some(Gq::from_i64(1)));
        assert_eq!(find(&[true]), Some(Gq::from_i64(1)));
        assert_eq!(find(&[false, true]), Some(Gq::ratio(1, 2)));
        assert_eq!(find(&[true, false]), None);
        // 1/12 [X,[X,Y]] − 1/12 [Y,[X,Y]]
        assert_eq!(find(&[false, false, true]), Some(Gq::ratio(1, 12)));
        assert_eq!(find(&[true, false, true]), Some(Gq::ratio(-1, 12)));
    }

    #[test]
    fn heisenberg_product() {
        let h = LieAlgebra::heisenberg();
        let r = bch(&g(&[1, 0, 0]), &g(&[0, 1, 0]), &h).unwrap();
        assert_eq!(r, vec![Gq::from_i64(1), Gq::from_i64(1), Gq::ratio(1, 2)]);
        let p = g(&[2, -3, 5]);
        assert_eq!(bch(&p, &g(&[0, 0, 0]), &h).unwrap(), p);
        let neg: Vec<Gq> = p.iter().map(|x| -x.clone()).collect();
        assert_eq!(bch(&p, &neg, &h).unwrap(), g(&[0, 0, 0]));
    }

    #[test]
    fn abelian_product_adds() {
        let a = LieAlgebra::abelian(2);
        assert_eq!(bch(&g(&[1, 2]), &g(&[3, 4]), &a).unwrap(), g(&[4, 6]));
    }

    #[test]
    fn rejects_non_nilpotent() {
        assert_eq!(
            bch(&g(&[1, 0, 0]), &g(&[0, 1, 0]), &LieAlgebra::sl2()),
            Err(DmodError::NotNilpotentAlgebra)
        );
    }

    #[test]
    fn derivative_examples() {
        let a = LieAlgebra::abelian(2);
        let phi = MPoly::var(0) * MPoly::var(0);
        assert_eq!(
            invariant_derivative(&phi, &g(&[1, 0]), &g(&[3, 7]), &a).unwrap(),
            Gq::from_i64(6)
        );
        let h = LieAlgebra::heisenberg();
        let z = MPoly::var(2);
        assert_eq!(
            invariant_derivative(&z, &g(&[0, 1, 0]), &g(&[1, 0, 0]), &h).unwrap(),
            Gq::ratio(1, 2)
        );
        let c = MPoly::constant(Gq::from_i64(4));
        assert!(invariant_derivative(&c, &g(&[1, 1, 1]), &g(&[1, 2, 3]), &h).unwrap().is_zero());
    }
}
