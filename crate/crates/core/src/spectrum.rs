//! Eigenvalues and joint eigendecompositions of commuting tuples.

use std::cmp::Ordering;

use num_integer::Integer;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{DmodError, Result};
use crate::linalg::{char_poly, exp_series, jordan_chevalley};
use crate::matrix::{CMatrix, Matrix, QMatrix};
use crate::poly::{numeric_roots, UPoly};
use crate::scalar::{close, Field, Gq, Ring, Scalar, C64};
use crate::tolerance::ToleranceConfig;

/// Groups numeric roots lying within `cluster_eps` (relative) of each other.
/// Returns cluster means with sizes. Two clusters closer than
/// `1e3·cluster_eps` make the grouping ambiguous.
pub fn cluster_roots(roots: &[C64], cfg: &ToleranceConfig) -> Result<Vec<(C64, usize)>> {
    let scale = roots.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let radius = cfg.cluster_eps * scale;
    let mut parent: Vec<usize> = (0..roots.len()).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            if (roots[i] - roots[j]).norm() <= radius {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut label = vec![usize::MAX; roots.len()];
    for i in 0..roots.len() {
        let r = find(&mut parent, i);
        if label[r] == usize::MAX {
            label[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[label[r]].push(i);
    }
    for a in 0..groups.len() {
        for b in a + 1..groups.len() {
            for &i in &groups[a] {
                for &j in &groups[b] {
                    if (roots[i] - roots[j]).norm() < 1e3 * radius {
                        return Err(DmodError::IllConditioned(format!(
                            "eigenvalues {} and {} cannot be separated at cluster_eps={}",
                            roots[i], roots[j], cfg.cluster_eps
                        )));
                    }
                }
            }
        }
    }
    Ok(groups
        .into_iter()
        .map(|g| {
            let sum: C64 = g.iter().map(|&i| roots[i]).sum();
            (sum / g.len() as f64, g.len())
        })
        .collect())
}

/// Polishes each cluster centre as the simple root of `p^(k−1)` near the
/// cluster mean, `k` being the cluster size.
pub fn refine_clusters(p: &UPoly<C64>, clusters: Vec<(C64, usize)>) -> Vec<(C64, usize)> {
    clusters
        .into_iter()
        .map(|(mut z, k)| {
            let mut d = p.clone();
            for _ in 1..k {
                d = d.derivative();
            }
            let dd = d.derivative();
            for _ in 0..4 {
                let den = dd.eval(&z);
                if den.norm() == 0.0 {
                    break;
                }
                let step = d.eval(&z) / den;
                if !step.is_finite() {
                    break;
                }
                z -= step;
            }
            (z, k)
        })
        .collect()
}

/// Yun's squarefree factorisation: `p = lc · Π a_i^i`, returned as
/// `(a_i, i)` for the nonconstant factors.
pub fn squarefree_factors(p: &UPoly<Gq>) -> Vec<(UPoly<Gq>, usize)> {
    let mut out = Vec::new();
    if p.degree().unwrap_or(0) == 0 {
        return out;
    }
    let f = p.monic();
    let df = f.derivative();
    let g = f.gcd(&df);
    let mut c = f.div_rem(&g).0;
    let mut d = df.div_rem(&g).0.sub(&c.derivative());
    let mut i = 1;
    while c.degree().unwrap_or(0) > 0 {
        let a = c.gcd(&d);
        c = c.div_rem(&a).0;
        d = d.div_rem(&a).0.sub(&c.derivative());
        if a.degree().unwrap_or(0) > 0 {
            out.push((a, i));
        }
        i += 1;
    }
    out
}

/// Roots of a squarefree polynomial that are Gaussian rationals, plus the
/// cofactor carrying the remaining roots.
///
/// Any such root of a primitive `Z[i]` polynomial with leading coefficient
/// `c` has the form `g / c` with `g` a Gaussian integer, so rounding
/// `c·z` for each numeric root `z` and checking exactly finds them all.
pub fn gaussian_rational_roots(p: &UPoly<Gq>) -> (Vec<Gq>, UPoly<Gq>) {
    let mut residual = p.clone();
    let mut found = Vec::new();
    if p.degree().unwrap_or(0) == 0 {
        return (found, residual);
    }
    let mut den = BigInt::one();
    for c in p.coeffs() {
        den = den.lcm(c.re.denom()).lcm(c.im.denom());
    }
    let d = Gq::from_rational(BigRational::from_integer(den));
    let lead = p.leading() * d;
    let lead_c = lead.to_c64();
    for z in numeric_roots(&p.to_c64()) {
        let w = lead_c * z;
        let g = Gq::new(round_big(w.re), round_big(w.im));
        let cand = &g / &lead;
        if found.contains(&cand) || !p.eval(&cand).is_zero() {
            continue;
        }
        residual = residual.div_rem(&UPoly::linear(&cand)).0;
        found.push(cand);
    }
    (found, residual)
}

fn round_big(x: f64) -> BigRational {
    BigRational::from_float(x.round()).unwrap_or_default()
}

/// Eigenvalues with multiplicities, canonically sorted. Exact whenever the
/// root is a Gaussian rational; approximate otherwise.
pub fn spectrum(m: &QMatrix) -> Result<Vec<(Scalar, usize)>> {
    let p = char_poly(m)?;
    let mut out = Vec::new();
    for (factor, mult) in squarefree_factors(&p) {
        let (exact, residual) = gaussian_rational_roots(&factor);
        out.extend(exact.into_iter().map(|q| (Scalar::Exact(q), mult)));
        out.extend(
            numeric_roots(&residual.to_c64())
                .into_iter()
                .map(|z| (Scalar::Approx(z), mult)),
        );
    }
    out.sort_by(|a, b| a.0.canonical_cmp(&b.0, 0.0));
    Ok(out)
}

/// The eigenvalue multiset (each value repeated by multiplicity).
pub fn eigenvalues(m: &QMatrix) -> Result<Vec<Scalar>> {
    Ok(spectrum(m)?
        .into_iter()
        .flat_map(|(v, k)| std::iter::repeat(v).take(k))
        .collect())
}

/// Distinct eigenvalues when the characteristic polynomial splits over the
/// Gaussian rationals.
pub fn split_eigenvalues(m: &QMatrix) -> Result<Option<Vec<Gq>>> {
    let q = char_poly(m)?.squarefree_part();
    let (roots, residual) = gaussian_rational_roots(&q);
    if residual.degree().unwrap_or(0) > 0 {
        return Ok(None);
    }
    Ok(Some(roots))
}

/// Distinct eigenvalues of a complex matrix, clustered at `cluster_eps`.
pub fn clustered_eigenvalues(m: &CMatrix, cfg: &ToleranceConfig) -> Result<Vec<(C64, usize)>> {
    let p = char_poly(m)?;
    Ok(refine_clusters(&p, cluster_roots(&numeric_roots(&p), cfg)?))
}

#[derive(Clone, Debug, PartialEq)]
pub struct JointBlock<F> {
    pub eigvec: Vec<F>,
    pub multiplicity: usize,
    /// Columns span the joint eigenspace.
    pub basis: Matrix<F>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct JointSpectrum<F> {
    pub blocks: Vec<JointBlock<F>>,
}

impl<F: Field> JointSpectrum<F> {
    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|b| b.multiplicity).sum()
    }

    /// Block bases side by side; conjugates every tuple member to diagonal.
    pub fn change_of_basis(&self, n: usize) -> Matrix<F> {
        let cols: Vec<Vec<F>> = self.blocks.iter().flat_map(|b| b.basis.columns()).collect();
        Matrix::from_columns(n, &cols)
    }

    /// Joint eigenvalue vectors, each repeated by multiplicity, in block order.
    pub fn points(&self) -> Vec<Vec<Scalar>> {
        self.blocks
            .iter()
            .flat_map(|b| {
                let v: Vec<Scalar> = b.eigvec.iter().map(Field::to_scalar).collect();
                std::iter::repeat(v).take(b.multiplicity)
            })
            .collect()
    }
}

/// A joint spectrum in whichever arithmetic the input allowed.
#[derive(Clone, Debug, PartialEq)]
pub enum AnySpectrum {
    Exact(JointSpectrum<Gq>),
    Approx(JointSpectrum<C64>),
}

impl AnySpectrum {
    pub fn is_exact(&self) -> bool {
        matches!(self, AnySpectrum::Exact(_))
    }

    pub fn points(&self) -> Vec<Vec<Scalar>> {
        match self {
            AnySpectrum::Exact(s) => s.points(),
            AnySpectrum::Approx(s) => s.points(),
        }
    }

    pub fn multiplicities(&self) -> Vec<(Vec<Scalar>, usize)> {
        match self {
            AnySpectrum::Exact(s) => s
                .blocks
                .iter()
                .map(|b| (b.eigvec.iter().map(Field::to_scalar).collect(), b.multiplicity))
                .collect(),
            AnySpectrum::Approx(s) => s
                .blocks
                .iter()
                .map(|b| (b.eigvec.iter().map(Field::to_scalar).collect(), b.multiplicity))
                .collect(),
        }
    }
}

/// Checks square, equal sizes and pairwise commutation.
fn check_commuting<F: Field>(tuple: &[Matrix<F>], tol: f64) -> Result<usize> {
    let n = match tuple.first() {
        Some(a) => a.ensure_square()?,
        None => return Ok(0),
    };
    for a in tuple {
        if a.ensure_square()? != n {
            return Err(DmodError::DimensionMismatch(format!(
                "tuple mixes {}x{} and {n}x{n} matrices",
                a.rows(),
                a.rows()
            )));
        }
    }
    for i in 0..tuple.len() {
        for j in i + 1..tuple.len() {
            if !tuple[i].commutator(&tuple[j]).negligible(tol) {
                return Err(DmodError::NonCommuting(i, j));
            }
        }
    }
    Ok(n)
}

/// Recursive eigenspace splitting: restrict each matrix to the current
/// joint eigenspaces and split them by its eigenvalues.
fn joint_split<F: Field>(
    tuple: &[Matrix<F>],
    n: usize,
    tol: f64,
    distinct: &dyn Fn(&Matrix<F>) -> Result<Option<Vec<F>>>,
) -> Result<Option<JointSpectrum<F>>> {
    let mut blocks: Vec<(Vec<F>, Matrix<F>)> = vec![(Vec::new(), Matrix::identity(n))];
    if n == 0 {
        blocks.clear();
    }
    for (i, a) in tuple.iter().enumerate() {
        let mut next = Vec::new();
        for (ev, v) in blocks {
            let d = v.cols();
            let av = a * &v;
            let r = v
                .solve(&av, tol)
                .ok_or_else(|| DmodError::IllConditioned("eigenspace not invariant".into()))?;
            let Some(eigs) = distinct(&r)? else {
                return Ok(None);
            };
            let mut total = 0;
            for lam in eigs {
                let shifted = &r - &Matrix::scalar(d, lam.clone());
                let ker = shifted.kernel(tol);
                if ker.is_empty() {
                    continue;
                }
                total += ker.len();
                let k = Matrix::from_columns(d, &ker);
                let mut e = ev.clone();
                e.push(lam);
                next.push((e, &v * &k));
            }
            if total != d {
                return Err(DmodError::NotSemisimple(i));
            }
        }
        blocks = next;
    }
    Ok(Some(JointSpectrum {
        blocks: blocks
            .into_iter()
            .map(|(eigvec, basis)| JointBlock {
                multiplicity: basis.cols(),
                eigvec,
                basis,
            })
            .collect(),
    }))
}

fn sort_blocks<F: Field>(spec: &mut JointSpectrum<F>, eps: f64) {
    spec.blocks.sort_by(|a, b| {
        for (x, y) in a.eigvec.iter().zip(&b.eigvec) {
            let o = x.to_scalar().canonical_cmp(&y.to_scalar(), eps);
            if o != Ordering::Equal {
                return o;
            }
        }
        Ordering::Equal
    });
}

/// Joint eigendecomposition of a commuting tuple of semisimple matrices.
/// Exact when every spectrum splits over the Gaussian rationals, otherwise
/// computed in floating point.
pub fn joint_eigen_decomposition(tuple: &[QMatrix], cfg: &ToleranceConfig) -> Result<AnySpectrum> {
    let n = check_commuting(tuple, 0.0)?;
    let exact = joint_split(tuple, n, 0.0, &|r: &QMatrix| split_eigenvalues(r))?;
    if let Some(mut spec) = exact {
        sort_blocks(&mut spec, 0.0);
        return Ok(AnySpectrum::Exact(spec));
    }
    let approx: Vec<CMatrix> = tuple.iter().map(Matrix::to_c64).collect();
    Ok(AnySpectrum::Approx(joint_eigen_decomposition_c64(&approx, cfg)?))
}

/// Floating-point joint eigendecomposition.
pub fn joint_eigen_decomposition_c64(
    tuple: &[CMatrix],
    cfg: &ToleranceConfig,
) -> Result<JointSpectrum<C64>> {
    let n = check_commuting(tuple, cfg.eps)?;
    let spec = joint_split(tuple, n, cfg.cluster_eps, &|r: &CMatrix| {
        Ok(Some(
            clustered_eigenvalues(r, cfg)?.into_iter().map(|(z, _)| z).collect(),
        ))
    })?;
    let mut spec = spec.expect("float splitting always succeeds");
    sort_blocks(&mut spec, cfg.cluster_eps);
    Ok(spec)
}

/// Does `λ − μ` lie in the integers (exactly, or within `tol`)?
pub fn integer_gap(a: &Scalar, b: &Scalar, tol: f64) -> Option<i64> {
    match (a, b) {
        (Scalar::Exact(x), Scalar::Exact(y)) => (x - y).as_integer(),
        _ => {
            let d = a.to_c64() - b.to_c64();
            let k = d.re.round();
            if close(d, C64::new(k, 0.0), tol) && k.abs() < 9.0e15 {
                Some(k as i64)
            } else {
                None
            }
        }
    }
}

/// `exp(c·A)` for an exact matrix and a complex scale: the semisimple
/// part is exponentiated through its eigenbasis, the nilpotent part by its
/// finite series.
pub fn exp_scaled(a: &QMatrix, c: C64, cfg: &ToleranceConfig) -> Result<CMatrix> {
    let n = a.ensure_square()?;
    let jp = jordan_chevalley(a, cfg)?;
    let semisimple = match joint_eigen_decomposition(&[jp.s.clone()], cfg)? {
        AnySpectrum::Exact(spec) => {
            let p = spec.change_of_basis(n);
            let pinv = p.inverse(0.0)?;
            let diag: Vec<C64> = spec
                .blocks
                .iter()
                .flat_map(|b| std::iter::repeat((c * b.eigvec[0].to_c64()).exp()).take(b.multiplicity))
                .collect();
            &(&p.to_c64() * &Matrix::diag(&diag)) * &pinv.to_c64()
        }
        AnySpectrum::Approx(spec) => {
            let p = spec.change_of_basis(n);
            let pinv = p.inverse(cfg.eps)?;
            let diag: Vec<C64> = spec
                .blocks
                .iter()
                .flat_map(|b| std::iter::repeat((c * b.eigvec[0]).exp()).take(b.multiplicity))
                .collect();
            &(&p * &Matrix::diag(&diag)) * &pinv
        }
    };
    let nil = exp_series(&jp.n.to_c64().scale(&c), n);
    Ok(&semisimple * &nil)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(rows: &[&[i64]]) -> QMatrix {
        Matrix::from_i64_rows(rows)
    }

    fn ex(v: i64) -> Scalar {
        Scalar::Exact(Gq::from_i64(v))
    }

    #[test]
    fn eigenvalue_examples() {
        let d = q(&[&[1, 0, 0], &[0, 2, 0], &[0, 0, 2]]);
        assert_eq!(eigenvalues(&d).unwrap(), vec![ex(1), ex(2), ex(2)]);
        let rot = q(&[&[0, 1], &[-1, 0]]);
        assert_eq!(
            eigenvalues(&rot).unwrap(),
            vec![Scalar::Exact(-Gq::i()), Scalar::Exact(Gq::i())]
        );
        let comp = q(&[&[0, 0, 2], &[1, 0, 0], &[0, 1, 0]]);
        let ev = eigenvalues(&comp).unwrap();
        assert_eq!(ev.len(), 3);
        for v in ev {
            assert!(!v.is_exact());
            let z = v.to_c64();
            assert!((z * z * z - C64::new(2.0, 0.0)).norm() < 1e-9);
        }
        assert!(eigenvalues(&QMatrix::zeros(0, 0)).unwrap().is_empty());
    }

    #[test]
    fn rational_roots_found() {
        // (2t - 1)(t + 3i)
        let p = UPoly::from_roots([Gq::ratio(1, 2), -(Gq::i() * Gq::from_i64(3))].iter());
        let (roots, res) = gaussian_rational_roots(&p.scale(&Gq::from_i64(2)));
        assert_eq!(roots.len(), 2);
        assert_eq!(res.degree(), Some(0));
    }

    #[test]
    fn yun_factorisation() {
        // (t-1)^3 (t+1)
        let p = UPoly::from_roots([Gq::from_i64(1), Gq::from_i64(1), Gq::from_i64(1), Gq::from_i64(-1)].iter());
        let f = squarefree_factors(&p);
        assert_eq!(f.len(), 2);
        assert_eq!(f[0], (UPoly::linear(&Gq::from_i64(-1)), 1));
        assert_eq!(f[1], (UPoly::linear(&Gq::from_i64(1)), 3));
    }

    #[test]
    fn joint_examples() {
        let cfg = ToleranceConfig::default();
        let a = q(&[&[1, 0], &[0, 2]]);
        let b = q(&[&[3, 0], &[0, 3]]);
        let AnySpectrum::Exact(s) = joint_eigen_decomposition(&[a, b], &cfg).unwrap() else {
            panic!("expected exact")
        };
        assert_eq!(s.blocks.len(), 2);
        assert_eq!(s.blocks[0].eigvec, vec![Gq::from_i64(1), Gq::from_i64(3)]);

        let z = QMatrix::zeros(3, 3);
        let s = joint_eigen_decomposition(&[z.clone(), z], &cfg).unwrap();
        assert_eq!(s.multiplicities(), vec![(vec![ex(0), ex(0)], 3)]);

        let g = q(&[&[1, 1, 0], &[0, 1, 1], &[1, 0, 2]]);
        let gi = g.inverse(0.0).unwrap();
        let a = &(&g * &Matrix::diag(&[1, 1, 2].map(Gq::from_i64))) * &gi;
        let b = &(&g * &Matrix::diag(&[5, 6, 6].map(Gq::from_i64))) * &gi;
        let spec = joint_eigen_decomposition(&[a.clone(), b.clone()], &cfg).unwrap();
        assert_eq!(
            spec.multiplicities(),
            vec![
                (vec![ex(1), ex(5)], 1),
                (vec![ex(1), ex(6)], 1),
                (vec![ex(2), ex(6)], 1)
            ]
        );
        let AnySpectrum::Exact(s) = spec else { panic!() };
        let p = s.change_of_basis(3);
        let pi = p.inverse(0.0).unwrap();
        for m in [a, b] {
            let d = &(&pi * &m) * &p;
            for r in 0..3 {
                for c in 0..3 {
                    assert!(r == c || d.get(r, c).is_zero());
                }
            }
        }
    }

    #[test]
    fn joint_errors() {
        let cfg = ToleranceConfig::default();
        let a = q(&[&[1, 1], &[0, 1]]);
        assert_eq!(
            joint_eigen_decomposition(&[a.clone()], &cfg),
            Err(DmodError::NotSemisimple(0))
        );
        let b = q(&[&[1, 0], &[0, 2]]);
        assert_eq!(
            joint_eigen_decomposition(&[b, a], &cfg),
            Err(DmodError::NonCommuting(0, 1))
        );
    }

    #[test]
    fn scaled_exponential_matches_expm() {
        let cfg = ToleranceConfig::default();
        let a = q(&[&[1, 1, 0], &[0, 1, 0], &[0, 0, -2]]);
        let c = C64::new(0.3, 0.7);
        let e = exp_scaled(&a, c, &cfg).unwrap();
        let f = crate::linalg::expm(&a.to_c64().scale(&c));
        assert!((&e - &f).max_abs() < 1e-12);
        let half = Matrix::diag(&[Gq::ratio(1, 2)]);
        let m = exp_scaled(&half, C64::new(0.0, 2.0 * std::f64::consts::PI), &cfg).unwrap();
        assert!((m.get(0, 0) - C64::new(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn non_split_falls_back_to_floats() {
        let cfg = ToleranceConfig::default();
        let m = q(&[&[0, 2], &[1, 0]]);
        let spec = joint_eigen_decomposition(&[m], &cfg).unwrap();
        assert!(!spec.is_exact());
        let pts = spec.points();
        assert!((pts[0][0].to_c64().re + 2f64.sqrt()).abs() < 1e-9);
    }
}
