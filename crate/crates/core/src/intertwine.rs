//! Intertwiner spaces `{X : X·A_i = B_i·X}` and the search for an
//! invertible element in a space of matrices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{DmodError, Result};
use crate::linalg::det_laplace;
use crate::matrix::{Matrix, QMatrix};
use crate::mpoly::MPoly;
use crate::scalar::{Field, Gq, Ring};
use crate::tolerance::ToleranceConfig;

/// Basis of the m×n solutions of `X·A_i = B_i·X`, where the `A_i` are n×n
/// and the `B_i` are m×m.
pub fn intertwiner_space<F: Field>(
    a: &[Matrix<F>],
    b: &[Matrix<F>],
    tol: f64,
) -> Result<Vec<Matrix<F>>> {
    let (Some(a0), Some(b0)) = (a.first(), b.first()) else {
        return Err(DmodError::Precondition(
            "empty tuples do not determine the matrix sizes".into(),
        ));
    };
    intertwiner_space_sized(a, b, a0.rows(), b0.rows(), tol)
}

/// As [`intertwiner_space`] with explicit sizes, so empty tuples are allowed.
pub fn intertwiner_space_sized<F: Field>(
    a: &[Matrix<F>],
    b: &[Matrix<F>],
    n: usize,
    m: usize,
    tol: f64,
) -> Result<Vec<Matrix<F>>> {
    if a.len() != b.len() {
        return Err(DmodError::DimensionMismatch(format!(
            "tuples of length {} and {}",
            a.len(),
            b.len()
        )));
    }
    for x in a {
        if x.ensure_square()? != n {
            return Err(DmodError::DimensionMismatch("source tuple sizes".into()));
        }
    }
    for y in b {
        if y.ensure_square()? != m {
            return Err(DmodError::DimensionMismatch("target tuple sizes".into()));
        }
    }
    let unknowns = m * n;
    let var = |r: usize, c: usize| r * n + c;
    let mut rows: Vec<Vec<F>> = Vec::new();
    for (ai, bi) in a.iter().zip(b) {
        for r in 0..m {
            for c in 0..n {
                let mut eq = vec![F::zero(); unknowns];
                for k in 0..n {
                    let v = ai.get(k, c);
                    if !v.is_zero() {
                        eq[var(r, k)] = eq[var(r, k)].clone() + v.clone();
                    }
                }
                for k in 0..m {
                    let v = bi.get(r, k);
                    if !v.is_zero() {
                        eq[var(k, c)] = eq[var(k, c)].clone() - v.clone();
                    }
                }
                if eq.iter().any(|x| !x.is_zero()) {
                    rows.push(eq);
                }
            }
        }
    }
    let sys = if rows.is_empty() {
        Matrix::zeros(0, unknowns)
    } else {
        Matrix::from_rows(rows)?
    };
    Ok(sys
        .kernel(tol)
        .into_iter()
        .map(|v| Matrix::new(m, n, v).expect("kernel vector length"))
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMethod {
    /// Determinant of the generic combination expanded symbolically.
    Symbolic,
    /// Seeded random integer combinations.
    Randomized,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvertibleSearch {
    pub found: bool,
    pub witness: Option<QMatrix>,
    pub method: SearchMethod,
    /// Upper bound on the probability that `found == false` is wrong
    /// (zero for the symbolic method).
    pub failure_bound: f64,
}

/// Largest size for which the generic determinant is expanded symbolically.
pub const SYMBOLIC_LIMIT: usize = 4;

const COEFF_BITS: u32 = 20;

/// Does `span(basis)` contain an invertible matrix?
///
/// For sizes up to [`SYMBOLIC_LIMIT`] the determinant of `Σ t_k B_k` is
/// expanded and tested for being the zero polynomial, so the answer is
/// deterministic. Larger sizes use `pit_trials` random combinations with
/// coefficients in `[−2²⁰, 2²⁰]`; a false answer is wrong with probability at
/// most `(n / 2²¹)^pit_trials`.
pub fn contains_invertible(basis: &[QMatrix], cfg: &ToleranceConfig) -> Result<InvertibleSearch> {
    let Some(first) = basis.first() else {
        return Ok(InvertibleSearch {
            found: false,
            witness: None,
            method: SearchMethod::Symbolic,
            failure_bound: 0.0,
        });
    };
    let n = first.ensure_square()?;
    for b in basis {
        if b.ensure_square()? != n {
            return Err(DmodError::DimensionMismatch("pencil members differ in size".into()));
        }
    }
    if n == 0 {
        return Ok(InvertibleSearch {
            found: true,
            witness: Some(QMatrix::zeros(0, 0)),
            method: SearchMethod::Symbolic,
            failure_bound: 0.0,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    if n <= SYMBOLIC_LIMIT {
        let generic = Matrix::from_fn(n, n, |r, c| {
            let coeffs: Vec<Gq> = basis.iter().map(|b| b.get(r, c).clone()).collect();
            MPoly::linear(&coeffs)
        });
        let det = det_laplace(&generic);
        if det.is_zero() {
            return Ok(InvertibleSearch {
                found: false,
                witness: None,
                method: SearchMethod::Symbolic,
                failure_bound: 0.0,
            });
        }
        let mut point = vec![Gq::one(); basis.len()];
        while det.eval(&point).is_zero() {
            point = random_point(&mut rng, basis.len());
        }
        return Ok(InvertibleSearch {
            found: true,
            witness: Some(Matrix::combination(&point, basis, n, n)),
            method: SearchMethod::Symbolic,
            failure_bound: 0.0,
        });
    }
    for _ in 0..cfg.pit_trials {
        let point = random_point(&mut rng, basis.len());
        let cand = Matrix::combination(&point, basis, n, n);
        if !cand.det()?.is_zero() {
            return Ok(InvertibleSearch {
                found: true,
                witness: Some(cand),
                method: SearchMethod::Randomized,
                failure_bound: 0.0,
            });
        }
    }
    let per_trial = n as f64 / f64::from(1u32 << (COEFF_BITS + 1));
    Ok(InvertibleSearch {
        found: false,
        witness: None,
        method: SearchMethod::Randomized,
        failure_bound: per_trial.powi(cfg.pit_trials as i32),
    })
}

fn random_point(rng: &mut ChaCha8Rng, len: usize) -> Vec<Gq> {
    let bound = 1i64 << COEFF_BITS;
    (0..len)
        .map(|_| Gq::from_i64(rng.gen_range(-bound..=bound)))
        .collect()
}
