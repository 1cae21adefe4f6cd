//! Oracles written independently of the library algorithms: permutation
//! determinants, plain Taylor exponentials, brute-force trace tables and a
//! fully pivoted complex null space.
#![allow(dead_code)]

use std::collections::BTreeMap;

use dmod_core::mpoly::MPoly;
use dmod_core::{CMatrix, Field, Gq, Matrix, QMatrix, Ring, C64};

/// Permutations of `0..n` with their signs.
pub fn permutations(n: usize) -> Vec<(Vec<usize>, i64)> {
    fn go(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<(Vec<usize>, i64)>) {
        let n = used.len();
        if prefix.len() == n {
            let mut inv = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if prefix[i] > prefix[j] {
                        inv += 1;
                    }
                }
            }
            out.push((prefix.clone(), if inv % 2 == 0 { 1 } else { -1 }));
            return;
        }
        for k in 0..n {
            if !used[k] {
                used[k] = true;
                prefix.push(k);
                go(prefix, used, out);
                prefix.pop();
                used[k] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Leibniz formula.
pub fn leibniz_det<R: Ring>(m: &Matrix<R>) -> R {
    let n = m.rows();
    let mut acc = R::zero();
    for (perm, sign) in permutations(n) {
        let mut t = R::from_i64(sign);
        for (r, &c) in perm.iter().enumerate() {
            t = t * m.get(r, c).clone();
        }
        acc = acc + t;
    }
    acc
}

/// `det(t·I − M)` by the Leibniz formula.
pub fn char_poly_at(m: &QMatrix, t: &Gq) -> Gq {
    let n = m.rows();
    leibniz_det(&QMatrix::from_fn(n, n, |r, c| {
        let d = if r == c { t.clone() } else { Gq::zero() };
        &d - m.get(r, c)
    }))
}

fn cmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    CMatrix::from_fn(a.rows(), b.cols(), |r, c| {
        (0..a.cols()).map(|k| *a.get(r, k) * *b.get(k, c)).sum()
    })
}

fn cnorm(a: &CMatrix) -> f64 {
    a.entries().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Taylor series with scaling and squaring.
pub fn taylor_exp(a: &CMatrix) -> CMatrix {
    let n = a.rows();
    let mut squarings = 0;
    let mut scale = 1.0;
    while cnorm(a) * scale > 0.25 {
        scale /= 2.0;
        squarings += 1;
    }
    let x = CMatrix::from_fn(n, n, |r, c| *a.get(r, c) * scale);
    let mut term = CMatrix::from_fn(n, n, |r, c| if r == c { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
    let mut sum = term.clone();
    for k in 1..30 {
        term = cmul(&term, &x);
        term = CMatrix::from_fn(n, n, |r, c| *term.get(r, c) / k as f64);
        sum = CMatrix::from_fn(n, n, |r, c| *sum.get(r, c) + *term.get(r, c));
    }
    for _ in 0..squarings {
        sum = cmul(&sum, &sum);
    }
    sum
}

pub fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.entries().iter().zip(b.entries()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Null space of a dense complex system by Gaussian elimination with full
/// pivoting; entries below `tol` (relative to the largest) count as zero.
pub fn complex_nullspace(mut rows: Vec<Vec<C64>>, ncols: usize, tol: f64) -> Vec<Vec<C64>> {
    let scale = rows.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    let mut col_order: Vec<usize> = (0..ncols).collect();
    let mut rank = 0;
    while rank < rows.len() && rank < ncols {
        let mut best = (0.0, rank, rank);
        for (r, row) in rows.iter().enumerate().skip(rank) {
            for c in rank..ncols {
                let v = row[col_order[c]].norm();
                if v > best.0 {
                    best = (v, r, c);
                }
            }
        }
        if best.0 <= tol * scale {
            break;
        }
        rows.swap(rank, best.1);
        col_order.swap(rank, best.2);
        let pc = col_order[rank];
        let pivot = rows[rank][pc];
        for v in rows[rank].iter_mut() {
            *v /= pivot;
        }
        let prow = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank {
                let f = row[pc];
                if f.norm() > 0.0 {
                    for c in 0..ncols {
                        row[c] -= f * prow[c];
                    }
                }
            }
        }
        rank += 1;
    }
    (rank..ncols)
        .map(|free| {
            let mut v = vec![C64::new(0.0, 0.0); ncols];
            v[col_order[free]] = C64::new(1.0, 0.0);
            for (r, row) in rows.iter().enumerate().take(rank) {
                v[col_order[r]] = -row[col_order[free]];
            }
            v
        })
        .collect()
}

/// Solutions of `X·A_i = B_i·X` by the complex null-space oracle.
pub fn complex_intertwiners(a: &[CMatrix], b: &[CMatrix], tol: f64) -> Vec<CMatrix> {
    let n = a[0].rows();
    let m = b[0].rows();
    let mut rows = Vec::new();
    for (ai, bi) in a.iter().zip(b) {
        for r in 0..m {
            for c in 0..n {
                let mut eq = vec![C64::new(0.0, 0.0); m * n];
                for k in 0..n {
                    eq[r * n + k] += *ai.get(k, c);
                }
                for k in 0..m {
                    eq[k * n + c] -= *bi.get(r, k);
                }
                rows.push(eq);
            }
        }
    }
    complex_nullspace(rows, m * n, tol)
        .into_iter()
        .map(|v| CMatrix::new(m, n, v).unwrap())
        .collect()
}

/// Is `det(Σ t_k B_k)` a nonzero polynomial? Expanded by Leibniz over
/// polynomials in the `t_k`.
pub fn generic_det_nonzero(basis: &[CMatrix], tol: f64) -> bool {
    let Some(first) = basis.first() else { return false };
    let n = first.rows();
    let generic = Matrix::from_fn(n, n, |r, c| {
        basis
            .iter()
            .enumerate()
            .fold(MPoly::<C64>::zero(), |acc, (k, b)| acc + MPoly::var(k) * MPoly::constant(*b.get(r, c)))
    });
    let det = leibniz_det(&generic);
    let nonzero = det.terms().any(|(_, c)| c.norm() > tol);
    nonzero
}

/// Every word of length `1..=max_len`, no cyclic pruning.
pub fn all_words(m: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for i in 0..m {
                let mut w2 = w.clone();
                w2.push(i);
                next.push(w2);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

pub fn word_trace(images: &[QMatrix], w: &[usize]) -> Gq {
    let n = images[0].rows();
    w.iter().fold(QMatrix::identity(n), |acc, &i| &acc * &images[i]).trace()
}

pub fn brute_trace_table(images: &[QMatrix], max_len: usize) -> BTreeMap<Vec<usize>, Gq> {
    all_words(images.len(), max_len)
        .into_iter()
        .map(|w| {
            let t = word_trace(images, &w);
            (w, t)
        })
        .collect()
}

/// `exp(2πi·A)` for every member, by the Taylor oracle.
pub fn oracle_monodromy(tuple: &[QMatrix]) -> Vec<CMatrix> {
    let two_pi_i = C64::new(0.0, 2.0 * std::f64::consts::PI);
    tuple.iter().map(|a| taylor_exp(&a.to_c64().scale(&two_pi_i))).collect()
}

/// Are two commuting tuples simultaneously conjugate after `exp(2πi·)`?
pub fn oracle_torus_conjugate(a: &[QMatrix], b: &[QMatrix]) -> bool {
    let (ma, mb) = (oracle_monodromy(a), oracle_monodromy(b));
    let basis = complex_intertwiners(&mb, &ma, 1e-7);
    generic_det_nonzero(&basis, 1e-6)
}

pub fn gq(s: &str) -> Gq {
    s.parse().unwrap()
}

pub fn qm(rows: &[&[i64]]) -> QMatrix {
    QMatrix::from_i64_rows(rows)
}

pub fn to_scalar_vec(v: &[Gq]) -> Vec<dmod_core::Scalar> {
    v.iter().map(Field::to_scalar).collect()
}
