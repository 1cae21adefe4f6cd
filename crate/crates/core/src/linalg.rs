//! Matrix kernels: characteristic and minimal polynomials, the
//! Jordan–Chevalley split, exponentials and logarithms.

use crate::error::{DmodError, Result};
use crate::matrix::{CMatrix, Matrix};
use crate::poly::UPoly;
use crate::scalar::{Field, Ring, C64};
use crate::spectrum::{cluster_roots, refine_clusters};
use crate::tolerance::ToleranceConfig;

/// `det(tI − M)` by the Faddeev–LeVerrier recursion.
pub fn char_poly<F: Field>(m: &Matrix<F>) -> Result<UPoly<F>> {
    let n = m.ensure_square()?;
    let mut coeffs = vec![F::zero(); n + 1];
    coeffs[n] = F::one();
    let mut mk = Matrix::zeros(n, n);
    for k in 1..=n {
        mk = &(m * &mk) + &Matrix::scalar(n, coeffs[n - k + 1].clone());
        let tr = (m * &mk).trace();
        coeffs[n - k] = -(tr / F::from_i64(k as i64));
    }
    Ok(UPoly::new(coeffs))
}

/// Monic minimal polynomial: the first power of `M` linearly dependent on
/// the lower ones.
pub fn minimal_poly<F: Field>(m: &Matrix<F>, tol: f64) -> Result<UPoly<F>> {
    let n = m.ensure_square()?;
    let mut powers = vec![Matrix::identity(n)];
    for k in 1..=n {
        let next = m * &powers[k - 1];
        if let Some(c) = span_coefficients(&powers, &next, tol) {
            let mut coeffs: Vec<F> = c.into_iter().map(|x| -x).collect();
            coeffs.push(F::one());
            return Ok(UPoly::new(coeffs));
        }
        powers.push(next);
    }
    unreachable!("Cayley–Hamilton bounds the degree by n")
}

/// Coefficients expressing `target` in the span of `mats`, if any.
pub fn span_coefficients<F: Field>(
    mats: &[Matrix<F>],
    target: &Matrix<F>,
    tol: f64,
) -> Option<Vec<F>> {
    let len = target.rows() * target.cols();
    let cols: Vec<Vec<F>> = mats.iter().map(Matrix::vec).collect();
    let sys = Matrix::from_columns(len, &cols);
    let rhs = Matrix::from_columns(len, &[target.vec()]);
    sys.solve(&rhs, tol).map(|x| x.column(0))
}

/// Is `s` a polynomial in `m`, i.e. in span{I, M, …, M^(n−1)}?
pub fn in_power_span<F: Field>(m: &Matrix<F>, s: &Matrix<F>, tol: f64) -> bool {
    let n = m.rows();
    let mut powers = vec![Matrix::identity(n)];
    for k in 1..n {
        powers.push(m * &powers[k - 1]);
    }
    span_coefficients(&powers, s, tol).is_some()
}

/// Semisimple and nilpotent parts.
#[derive(Clone, Debug, PartialEq)]
pub struct JordanPair<F> {
    pub s: Matrix<F>,
    pub n: Matrix<F>,
}

/// Jordan–Chevalley decomposition by Newton iteration on the squarefree
/// part `q` of the characteristic polynomial: `X ← X − q(X)·q'(X)⁻¹`,
/// starting from `X = M`. Every iterate is a polynomial in `M`.
pub fn jordan_chevalley<F: Field>(m: &Matrix<F>, cfg: &ToleranceConfig) -> Result<JordanPair<F>> {
    let n = m.ensure_square()?;
    if n == 0 {
        return Ok(JordanPair {
            s: Matrix::zeros(0, 0),
            n: Matrix::zeros(0, 0),
        });
    }
    let q = squarefree_annihilator(m, cfg)?;
    let dq = q.derivative();
    let scale = m.scale_hint();
    let target = cfg.eps * scale.powi(q.degree().unwrap_or(0) as i32);
    let mut x = m.clone();
    let mut last = f64::INFINITY;
    for _ in 0..64 {
        let qx = q.eval_matrix(&x);
        if F::EXACT {
            if qx.is_zero() {
                break;
            }
        } else {
            let size = qx.max_abs();
            if size <= target || size >= last {
                break;
            }
            last = size;
        }
        let dinv = dq
            .eval_matrix(&x)
            .inverse(cfg.eps)
            .map_err(|_| DmodError::IllConditioned("Newton step for semisimple part".into()))?;
        x = &x - &(&qx * &dinv);
    }
    let nil = m - &x;
    Ok(JordanPair { s: x, n: nil })
}

/// Squarefree polynomial vanishing on the spectrum: exact gcd in exact
/// mode, clustered numeric roots otherwise.
fn squarefree_annihilator<F: Field>(m: &Matrix<F>, cfg: &ToleranceConfig) -> Result<UPoly<F>> {
    let p = char_poly(m)?;
    if F::EXACT {
        return Ok(p.squarefree_part());
    }
    let pc = p.to_c64();
    let roots = crate::poly::numeric_roots(&pc);
    let clusters = refine_clusters(&pc, cluster_roots(&roots, cfg)?);
    let centers: Vec<F> = clusters
        .iter()
        .map(|(z, _)| F::from_c64_lossy(*z))
        .collect();
    Ok(UPoly::from_roots(centers.iter()))
}

/// Nilpotency under the tolerance policy.
pub fn is_nilpotent_tol<F: Field>(n: &Matrix<F>, tol: f64) -> bool {
    if !n.is_square() {
        return false;
    }
    if F::EXACT {
        return n.is_nilpotent();
    }
    let k = n.rows();
    let scale = n.scale_hint().powi(k as i32);
    n.pow(k as u32).max_abs() <= tol * scale * (k.max(1) as f64)
}

/// Finite exponential series of a nilpotent matrix.
pub fn exp_nilpotent<F: Field>(n: &Matrix<F>) -> Result<Matrix<F>> {
    let k = n.ensure_square()?;
    if !is_nilpotent_tol(n, 1e-9) {
        return Err(DmodError::NotNilpotent);
    }
    Ok(exp_series(n, k))
}

/// `Σ_{j ≤ terms} N^j / j!` without a nilpotency check.
pub(crate) fn exp_series<R: Field>(n: &Matrix<R>, terms: usize) -> Matrix<R> {
    let k = n.rows();
    let mut acc = Matrix::identity(k);
    let mut term = Matrix::identity(k);
    for j in 1..=terms {
        term = (&term * n).scale(&R::from_i64(j as i64).inv());
        if term.is_zero() {
            break;
        }
        acc = &acc + &term;
    }
    acc
}

/// `log U = Σ_{i=1}^{n} (−1)^(i−1) (U − I)^i / i` for unipotent `U`.
pub fn log_unipotent<F: Field>(u: &Matrix<F>) -> Result<Matrix<F>> {
    let k = u.ensure_square()?;
    let x = u - &Matrix::identity(k);
    if !is_nilpotent_tol(&x, 1e-9) {
        return Err(DmodError::NotUnipotent);
    }
    Ok(log_series(&x, k))
}

pub(crate) fn log_series<F: Field>(x: &Matrix<F>, terms: usize) -> Matrix<F> {
    let k = x.rows();
    let mut acc = Matrix::zeros(k, k);
    let mut pw = Matrix::identity(k);
    for i in 1..=terms {
        pw = &pw * x;
        if pw.is_zero() {
            break;
        }
        let c = F::from_i64(if i % 2 == 1 { 1 } else { -1 }) / F::from_i64(i as i64);
        acc = &acc + &pw.scale(&c);
    }
    acc
}

/// Matrix exponential of a complex matrix (scaling and squaring with a
/// Taylor core).
pub fn expm(a: &CMatrix) -> CMatrix {
    let n = a.rows();
    let norm = (0..n)
        .map(|c| (0..n).map(|r| a.get(r, c).norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let scaled = a.scale(&C64::new(0.5f64.powi(s), 0.0));
    let mut acc = Matrix::identity(n);
    let mut term = Matrix::identity(n);
    for j in 1..=24 {
        term = (&term * &scaled).scale(&C64::new(1.0 / j as f64, 0.0));
        acc = &acc + &term;
        if term.max_abs() < 1e-18 {
            break;
        }
    }
    for _ in 0..s {
        acc = &acc * &acc;
    }
    acc
}

/// Determinant by cofactor expansion, valid over any commutative ring.
pub fn det_laplace<R: Ring>(m: &Matrix<R>) -> R {
    let n = m.rows();
    assert!(m.is_square());
    let idx: Vec<usize> = (0..n).collect();
    laplace(m, 0, &idx)
}

fn laplace<R: Ring>(m: &Matrix<R>, row: usize, cols: &[usize]) -> R {
    if cols.is_empty() {
        return R::one();
    }
    if cols.len() == 1 {
        return m.get(row, cols[0]).clone();
    }
    let mut acc = R::zero();
    for (k, &c) in cols.iter().enumerate() {
        let entry = m.get(row, c);
        if entry.is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let minor = entry.clone() * laplace(m, row + 1, &rest);
        acc = if k % 2 == 0 { acc + minor } else { acc - minor };
    }
    acc
}
