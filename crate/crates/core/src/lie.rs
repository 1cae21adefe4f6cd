//! Lie algebras given by structure constants, and their matrix
//! representations.

use std::collections::BTreeMap;

use crate::error::{DmodError, Result};
use crate::matrix::{Matrix, QMatrix};
use crate::scalar::{Gq, Ring};

/// A finite-dimensional Lie algebra: `[x_i, x_j] = Σ_k c_ij^k x_k`, stored
/// for `i < j` only.
#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebra {
    names: Vec<String>,
    structure: BTreeMap<(usize, usize), BTreeMap<usize, Gq>>,
}

/// Bracket data as read from input: `[x_i, x_j] = Σ coeffs[k]·x_k`.
#[derive(Clone, Debug)]
pub struct BracketSpec {
    pub i: usize,
    pub j: usize,
    pub coeffs: Vec<(usize, Gq)>,
}

impl LieAlgebra {
    /// Builds the algebra. Brackets given with `i > j` are stored negated;
    /// `i == j`, repeated pairs and out-of-range indices are rejected.
    /// Antisymmetry is thereby built in; the Jacobi identity is checked
    /// separately by [`LieAlgebra::validate`].
    pub fn new(names: Vec<String>, brackets: Vec<BracketSpec>) -> Result<Self> {
        let m = names.len();
        let mut structure = BTreeMap::new();
        for b in brackets {
            if b.i >= m || b.j >= m {
                return Err(DmodError::InvalidAlgebra(format!(
                    "bracket ({}, {}) out of range for dimension {m}",
                    b.i, b.j
                )));
            }
            if b.i == b.j {
                return Err(DmodError::InvalidAlgebra(format!(
                    "bracket of x_{} with itself must be omitted",
                    b.i
                )));
            }
            let (key, sign) = if b.i < b.j {
                ((b.i, b.j), Gq::from_i64(1))
            } else {
                ((b.j, b.i), Gq::from_i64(-1))
            };
            if structure.contains_key(&key) {
                return Err(DmodError::InvalidAlgebra(format!(
                    "bracket ({}, {}) given twice",
                    key.0, key.1
                )));
            }
            let mut row = BTreeMap::new();
            for (k, c) in b.coeffs {
                if k >= m {
                    return Err(DmodError::InvalidAlgebra(format!(
                        "bracket result index {k} out of range"
                    )));
                }
                let c = &c * &sign;
                if !c.is_zero() {
                    let e: &mut Gq = row.entry(k).or_insert_with(Gq::zero);
                    *e = &*e + &c;
                }
            }
            row.retain(|_, c: &mut Gq| !c.is_zero());
            if !row.is_empty() {
                structure.insert(key, row);
            }
        }
        Ok(LieAlgebra { names, structure })
    }

    /// Convenience constructor from integer triples `(i, j, [(k, c)])`.
    pub fn from_int_brackets(names: &[&str], brackets: &[(usize, usize, &[(usize, i64)])]) -> Self {
        LieAlgebra::new(
            names.iter().map(|s| s.to_string()).collect(),
            brackets
                .iter()
                .map(|&(i, j, cs)| BracketSpec {
                    i,
                    j,
                    coeffs: cs.iter().map(|&(k, c)| (k, Gq::from_i64(c))).collect(),
                })
                .collect(),
        )
        .expect("well-formed literal algebra")
    }

    pub fn abelian(m: usize) -> Self {
        LieAlgebra {
            names: (1..=m).map(|k| format!("x{k}")).collect(),
            structure: BTreeMap::new(),
        }
    }

    /// Heisenberg algebra: `[x, y] = z`.
    pub fn heisenberg() -> Self {
        LieAlgebra::from_int_brackets(&["x", "y", "z"], &[(0, 1, &[(2, 1)])])
    }

    /// Four-dimensional filiform algebra: `[e1, e2] = e3`, `[e1, e3] = e4`.
    pub fn filiform4() -> Self {
        LieAlgebra::from_int_brackets(
            &["e1", "e2", "e3", "e4"],
            &[(0, 1, &[(2, 1)]), (0, 2, &[(3, 1)])],
        )
    }

    /// Free two-step nilpotent algebra on three generators:
    /// `[x1, x2] = y3`, `[x1, x3] = y2`, `[x2, x3] = y1`.
    pub fn free_two_step3() -> Self {
        LieAlgebra::from_int_brackets(
            &["x1", "x2", "x3", "y1", "y2", "y3"],
            &[(0, 1, &[(5, 1)]), (0, 2, &[(4, 1)]), (1, 2, &[(3, 1)])],
        )
    }

    /// `sl2` with basis `X, Y, H`: `[X,Y] = H`, `[H,X] = 2X`, `[H,Y] = −2Y`.
    pub fn sl2() -> Self {
        LieAlgebra::from_int_brackets(
            &["X", "Y", "H"],
            &[(0, 1, &[(2, 1)]), (0, 2, &[(0, -2)]), (1, 2, &[(1, 2)])],
        )
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Stored brackets `(i, j) → {k: c}` with `i < j`.
    pub fn structure(&self) -> &BTreeMap<(usize, usize), BTreeMap<usize, Gq>> {
        &self.structure
    }

    /// `c_ij^k` for any ordered pair.
    pub fn constant(&self, i: usize, j: usize, k: usize) -> Gq {
        if i == j {
            return Gq::zero();
        }
        let (key, neg) = if i < j { ((i, j), false) } else { ((j, i), true) };
        let c = self
            .structure
            .get(&key)
            .and_then(|row| row.get(&k))
            .cloned()
            .unwrap_or_else(Gq::zero);
        if neg {
            -c
        } else {
            c
        }
    }

    /// `[x, y]` in basis coordinates, over any coefficient ring.
    pub fn bracket<R: Ring>(&self, x: &[R], y: &[R]) -> Vec<R> {
        let m = self.dim();
        let mut out = vec![R::zero(); m];
        for (&(i, j), row) in &self.structure {
            // x_i y_j − x_j y_i
            let w = x[i].clone() * y[j].clone() - x[j].clone() * y[i].clone();
            if w.is_zero() {
                continue;
            }
            for (&k, c) in row {
                out[k] = out[k].clone() + w.clone() * R::from_gq(c);
            }
        }
        out
    }

    pub fn basis_vector(&self, i: usize) -> Vec<Gq> {
        let mut v = vec![Gq::zero(); self.dim()];
        v[i] = Gq::one();
        v
    }

    /// Jacobi identity on every basis triple `i < j < k`.
    pub fn validate(&self) -> ValidationReport {
        let m = self.dim();
        let e: Vec<Vec<Gq>> = (0..m).map(|i| self.basis_vector(i)).collect();
        let mut failures = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                for k in j + 1..m {
                    let t1 = self.bracket(&self.bracket(&e[i], &e[j]), &e[k]);
                    let t2 = self.bracket(&self.bracket(&e[j], &e[k]), &e[i]);
                    let t3 = self.bracket(&self.bracket(&e[k], &e[i]), &e[j]);
                    if (0..m).any(|r| !(t1[r].clone() + t2[r].clone() + t3[r].clone()).is_zero()) {
                        failures.push(Violation::Jacobi(i, j, k));
                    }
                }
            }
        }
        ValidationReport { failures }
    }

    /// Lower central series, nilpotency class and an abelianization
    /// complement chosen greedily in basis order.
    pub fn nilpotency_profile(&self) -> NilpotencyProfile {
        let m = self.dim();
        let e: Vec<Vec<Gq>> = (0..m).map(|i| self.basis_vector(i)).collect();
        let mut current = e.clone();
        let mut dims = vec![m];
        let mut derived: Option<Vec<Vec<Gq>>> = None;
        loop {
            let mut next = Vec::new();
            for x in &e {
                for y in &current {
                    next.push(self.bracket(x, y));
                }
            }
            let basis = row_space_basis(&next, m);
            if derived.is_none() {
                derived = Some(basis.clone());
            }
            let d = basis.len();
            let last = *dims.last().unwrap();
            if d == last {
                break;
            }
            dims.push(d);
            current = basis;
            if d == 0 {
                break;
            }
        }
        let derived = derived.unwrap_or_default();
        let is_nilpotent = *dims.last().unwrap() == 0;
        let class = if is_nilpotent { dims.len() - 1 } else { 0 };

        let mut chosen: Vec<usize> = Vec::new();
        let mut span = derived.clone();
        for k in 0..m {
            let mut trial = span.clone();
            trial.push(e[k].clone());
            if row_space_basis(&trial, m).len() > span.len() {
                chosen.push(k);
                span = trial;
            }
        }
        let l = chosen.len();
        // Columns: chosen basis vectors, then a basis of [n,n]. Its inverse
        // splits coordinates into complement and derived parts.
        let mut cols: Vec<Vec<Gq>> = chosen.iter().map(|&k| e[k].clone()).collect();
        cols.extend(derived.iter().cloned());
        let change = Matrix::from_columns(m, &cols);
        let inv = change.inverse(0.0).expect("complement plus derived span everything");
        let projection = Matrix::from_fn(l, m, |r, c| inv.get(r, c).clone());
        NilpotencyProfile {
            is_nilpotent,
            class,
            lower_central_dims: dims,
            abelianization_dim: l,
            complement: chosen,
            derived_projection: projection,
        }
    }

    /// Adjoint representation `x ↦ ad_x`.
    pub fn adjoint(&self) -> Representation {
        let m = self.dim();
        let images = (0..m)
            .map(|i| Matrix::from_fn(m, m, |r, c| self.constant(i, c, r)))
            .collect();
        Representation::new(self.clone(), m, images).expect("adjoint sizes")
    }
}

/// Basis (reduced rows) of the span of the given vectors.
pub(crate) fn row_space_basis(vectors: &[Vec<Gq>], m: usize) -> Vec<Vec<Gq>> {
    let nonzero: Vec<Vec<Gq>> = vectors
        .iter()
        .filter(|v| v.iter().any(|x| !x.is_zero()))
        .cloned()
        .collect();
    if nonzero.is_empty() {
        return Vec::new();
    }
    let mat = Matrix::from_rows(nonzero).expect("equal-length vectors");
    let ech = mat.rref(0.0);
    debug_assert!(ech.pivots.len() <= m);
    (0..ech.pivots.len()).map(|r| ech.reduced.row(r).to_vec()).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// Jacobi fails on the basis triple.
    Jacobi(usize, usize, usize),
    /// `[A_i, A_j] ≠ Σ_k c_ij^k A_k`.
    Bracket(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub failures: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NilpotencyProfile {
    pub is_nilpotent: bool,
    /// Smallest `c` with `L^(c+1) = 0`; zero when not nilpotent.
    pub class: usize,
    /// `dim L^1, dim L^2, …` until the series stabilises.
    pub lower_central_dims: Vec<usize>,
    pub abelianization_dim: usize,
    /// Basis indices spanning a complement of `[n, n]`.
    pub complement: Vec<usize>,
    /// `l × m` map sending coordinates to complement coordinates; kills
    /// exactly `[n, n]`.
    pub derived_projection: QMatrix,
}

/// A Lie algebra representation `x_i ↦ A_i` on `C^rank`.
#[derive(Clone, Debug, PartialEq)]
pub struct Representation {
    pub algebra: LieAlgebra,
    pub rank: usize,
    pub images: Vec<QMatrix>,
}

impl Representation {
    pub fn new(algebra: LieAlgebra, rank: usize, images: Vec<QMatrix>) -> Result<Self> {
        if images.len() != algebra.dim() {
            return Err(DmodError::InvalidRepresentation(format!(
                "{} images for an algebra of dimension {}",
                images.len(),
                algebra.dim()
            )));
        }
        for a in &images {
            if a.rows() != rank || a.cols() != rank {
                return Err(DmodError::RankMismatch(rank, a.rows().max(a.cols())));
            }
        }
        Ok(Representation {
            algebra,
            rank,
            images,
        })
    }

    pub fn zero(algebra: LieAlgebra, rank: usize) -> Self {
        let images = vec![QMatrix::zeros(rank, rank); algebra.dim()];
        Representation {
            algebra,
            rank,
            images,
        }
    }

    /// `ρ(p) = Σ p_i A_i`.
    pub fn image(&self, p: &[Gq]) -> QMatrix {
        Matrix::combination(p, &self.images, self.rank, self.rank)
    }

    /// Homomorphism check `[A_i, A_j] = Σ_k c_ij^k A_k` for `i < j`.
    pub fn validate(&self) -> ValidationReport {
        let m = self.algebra.dim();
        let mut failures = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                let lhs = self.images[i].commutator(&self.images[j]);
                let coeffs: Vec<Gq> = (0..m).map(|k| self.algebra.constant(i, j, k)).collect();
                if lhs != self.image(&coeffs) {
                    failures.push(Violation::Bracket(i, j));
                }
            }
        }
        ValidationReport { failures }
    }

    /// Zero-curvature test for the invariant form `α = Σ A_i ω^i`.
    ///
    /// With `dω^k = −Σ_{i<j} c_ij^k ω^i∧ω^j`, the `ω^j∧ω^k` coefficient of
    /// `dα + α∧α` is `[A_j, A_k] − Σ_i c_jk^i A_i`; flat iff all vanish.
    pub fn is_flat(&self) -> bool {
        let m = self.algebra.dim();
        let n = self.rank;
        for j in 0..m {
            for k in j + 1..m {
                let mut d_alpha = Matrix::zeros(n, n);
                for i in 0..m {
                    let c = self.algebra.constant(j, k, i);
                    if !c.is_zero() {
                        d_alpha = &d_alpha - &self.images[i].scale(&c);
                    }
                }
                let wedge = &(&self.images[j] * &self.images[k]) - &(&self.images[k] * &self.images[j]);
                if !(&d_alpha + &wedge).is_zero() {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: usize, i: usize, j: usize) -> QMatrix {
        QMatrix::unit(n, i, j)
    }

    #[test]
    fn jacobi_validation() {
        assert!(LieAlgebra::abelian(3).validate().is_valid());
        assert!(LieAlgebra::heisenberg().validate().is_valid());
        assert!(LieAlgebra::sl2().validate().is_valid());
        // [H, X] = 3X instead of 2X.
        let bad = LieAlgebra::from_int_brackets(
            &["X", "Y", "H"],
            &[(0, 1, &[(2, 1)]), (0, 2, &[(0, -3)]), (1, 2, &[(1, 2)])],
        );
        assert_eq!(bad.validate().failures, vec![Violation::Jacobi(0, 1, 2)]);
    }

    #[test]
    fn profiles() {
        let p = LieAlgebra::abelian(3).nilpotency_profile();
        assert!(p.is_nilpotent);
        assert_eq!((p.class, p.abelianization_dim), (1, 3));
        let p = LieAlgebra::heisenberg().nilpotency_profile();
        assert!(p.is_nilpotent);
        assert_eq!((p.class, p.abelianization_dim), (2, 2));
        assert_eq!(p.lower_central_dims, vec![3, 1, 0]);
        assert_eq!(p.derived_projection.mul_vec(&[Gq::zero(), Gq::zero(), Gq::one()]), vec![Gq::zero(); 2]);
        let p = LieAlgebra::filiform4().nilpotency_profile();
        assert_eq!((p.class, p.abelianization_dim), (3, 2));
        let p = LieAlgebra::free_two_step3().nilpotency_profile();
        assert_eq!((p.class, p.abelianization_dim), (2, 3));
        let b2 = LieAlgebra::from_int_brackets(
            &["E11", "E12", "E22"],
            &[(0, 1, &[(1, 1)]), (1, 2, &[(1, 1)])],
        );
        assert!(!b2.nilpotency_profile().is_nilpotent);
        let p = LieAlgebra::abelian(0).nilpotency_profile();
        assert!(p.is_nilpotent && p.class == 0);
    }

    #[test]
    fn heisenberg_representations() {
        let h = LieAlgebra::heisenberg();
        let good = Representation::new(h.clone(), 3, vec![e(3, 0, 1), e(3, 1, 2), e(3, 0, 2)]).unwrap();
        assert!(good.validate().is_valid());
        assert!(good.is_flat());
        let bad = Representation::new(h.clone(), 3, vec![e(3, 0, 1), e(3, 1, 2), QMatrix::zeros(3, 3)]).unwrap();
        assert!(!bad.validate().is_valid());
        assert!(!bad.is_flat());
        assert!(Representation::zero(h, 4).validate().is_valid());
    }

    #[test]
    fn adjoint_is_a_representation() {
        for alg in [LieAlgebra::sl2(), LieAlgebra::heisenberg(), LieAlgebra::filiform4()] {
            assert!(alg.adjoint().validate().is_valid());
        }
    }

    #[test]
    fn reversed_bracket_is_negated() {
        let a = LieAlgebra::from_int_brackets(&["x", "y", "z"], &[(1, 0, &[(2, 1)])]);
        assert_eq!(a.constant(0, 1, 2), Gq::from_i64(-1));
    }
}
