//! Classification over unipotent groups: semisimplification, the canonical
//! point of `SⁿCˡ`, trace words, equivalence certificates and the
//! polynomial gauge to the semisimple part.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::bch::Bch;
use crate::error::{DmodError, Result};
use crate::lie::{LieAlgebra, Representation};
use crate::linalg::jordan_chevalley;
use crate::matrix::{AnyMatrix, CMatrix, Matrix, QMatrix};
use crate::mpoly::MPoly;
use crate::scalar::{Gq, Ring, Scalar};
use crate::spectrum::{joint_eigen_decomposition, AnySpectrum, JointBlock, JointSpectrum};
use crate::tolerance::ToleranceConfig;

fn require_nilpotent(algebra: &LieAlgebra) -> Result<()> {
    if algebra.nilpotency_profile().is_nilpotent {
        Ok(())
    } else {
        Err(DmodError::NotNilpotentAlgebra)
    }
}

/// `x_i ↦ (A_i)_s`, the basis-wise semisimple part.
pub fn semisimplify(rho: &Representation, cfg: &ToleranceConfig) -> Result<Representation> {
    require_nilpotent(&rho.algebra)?;
    let images = rho
        .images
        .iter()
        .map(|a| Ok(jordan_chevalley(a, cfg)?.s))
        .collect::<Result<Vec<_>>>()?;
    Representation::new(rho.algebra.clone(), rho.rank, images)
}

/// `x_i ↦ (A_i)_n`.
pub fn nilpotent_parts(rho: &Representation, cfg: &ToleranceConfig) -> Result<Vec<QMatrix>> {
    rho.images
        .iter()
        .map(|a| Ok(jordan_chevalley(a, cfg)?.n))
        .collect()
}

/// A point of `SⁿCˡ`: `n` joint eigenvalue vectors in canonical order.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalClass {
    pub l: usize,
    pub n: usize,
    pub points: Vec<Vec<Scalar>>,
}

/// Lexicographic on `(Re a₁, Im a₁, Re a₂, …)`.
pub fn canonical_point_cmp(a: &[Scalar], b: &[Scalar], eps: f64) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.canonical_cmp(y, eps);
        if o != Ordering::Equal {
            return o;
        }
    }
    a.len().cmp(&b.len())
}

impl CanonicalClass {
    pub fn is_exact(&self) -> bool {
        self.points.iter().flatten().all(Scalar::is_exact)
    }

    /// Equality of multisets: exact, or entrywise within `eps` when any
    /// coordinate is approximate.
    pub fn same_as(&self, other: &CanonicalClass, eps: f64) -> bool {
        self.l == other.l
            && self.n == other.n
            && self.points.len() == other.points.len()
            && self
                .points
                .iter()
                .zip(&other.points)
                .all(|(p, q)| p.len() == q.len() && p.iter().zip(q).all(|(a, b)| a.approx_eq(b, eps)))
    }
}

/// Semisimple images of the abelianization complement, and the complement.
fn complement_tuple(rho: &Representation, cfg: &ToleranceConfig) -> Result<(Vec<usize>, Vec<QMatrix>)> {
    let profile = rho.algebra.nilpotency_profile();
    if !profile.is_nilpotent {
        return Err(DmodError::NotNilpotentAlgebra);
    }
    let tuple = profile
        .complement
        .iter()
        .map(|&k| Ok(jordan_chevalley(&rho.images[k], cfg)?.s))
        .collect::<Result<Vec<_>>>()?;
    Ok((profile.complement, tuple))
}

pub(crate) fn complement_spectrum(rho: &Representation, cfg: &ToleranceConfig) -> Result<(usize, AnySpectrum)> {
    let (comp, tuple) = complement_tuple(rho, cfg)?;
    if tuple.is_empty() {
        // No abelian directions: one block carrying the whole space.
        let blocks = if rho.rank == 0 {
            Vec::new()
        } else {
            vec![JointBlock {
                eigvec: Vec::new(),
                multiplicity: rho.rank,
                basis: QMatrix::identity(rho.rank),
            }]
        };
        return Ok((0, AnySpectrum::Exact(JointSpectrum { blocks })));
    }
    Ok((comp.len(), joint_eigen_decomposition(&tuple, cfg)?))
}

/// The joint spectrum of `ρ_s` on a complement of `[n, n]`, sorted.
pub fn canonical_class(rho: &Representation, cfg: &ToleranceConfig) -> Result<CanonicalClass> {
    let (l, spec) = complement_spectrum(rho, cfg)?;
    let eps = if spec.is_exact() { 0.0 } else { cfg.cluster_eps };
    let mut points = spec.points();
    points.sort_by(|a, b| canonical_point_cmp(a, b, eps));
    Ok(CanonicalClass {
        l,
        n: rho.rank,
        points,
    })
}

/// Trace of every word of length `1..=max_len` up to rotation; keys are the
/// lexicographically least rotations.
pub fn trace_word_invariants(rho: &Representation, max_len: usize) -> BTreeMap<Vec<usize>, Gq> {
    let m = rho.images.len();
    let mut out = BTreeMap::new();
    if m == 0 {
        return out;
    }
    let mut word = vec![0usize; max_len + 1];
    let mut prefix: Vec<QMatrix> = vec![QMatrix::identity(rho.rank)];
    necklaces(1, 1, max_len, m, &mut word, &mut prefix, &rho.images, &mut out);
    out
}

/// Fredricksen–Kessler–Maiorana generation of prenecklaces with running
/// prefix products; emits necklaces of every length up to `max_len`.
#[allow(clippy::too_many_arguments)]
fn necklaces(
    t: usize,
    p: usize,
    max_len: usize,
    m: usize,
    word: &mut [usize],
    prefix: &mut Vec<QMatrix>,
    images: &[QMatrix],
    out: &mut BTreeMap<Vec<usize>, Gq>,
) {
    if t > max_len {
        return;
    }
    let lo = word[t - p];
    for a in lo..m {
        word[t] = a;
        let p_next = if a == word[t - p] { p } else { t };
        let prod = &prefix[t - 1] * &images[a];
        // word[1..=t] is a prenecklace with period p_next.
        if t % p_next == 0 {
            out.insert(word[1..=t].to_vec(), prod.trace());
        }
        prefix.push(prod);
        necklaces(t + 1, p_next, max_len, m, word, prefix, images, out);
        prefix.pop();
    }
}

/// Decides whether `Tr A_w = Tr B_w` for all words of length `1..=max_len`.
///
/// The pairs `(A_w, B_w)` for `|w| ≤ k` span a subspace of `M_n ⊕ M_n`
/// obtained by left-multiplying a basis of the previous level; the trace
/// difference is linear, so checking it on a basis decides the whole table.
pub fn trace_tables_equal(a: &[QMatrix], b: &[QMatrix], max_len: usize) -> bool {
    let n1 = a.first().map_or(0, Matrix::rows);
    let n2 = b.first().map_or(0, Matrix::rows);
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    let mut basis = IncrementalBasis::new();
    let start = (QMatrix::identity(n1), QMatrix::identity(n2));
    basis.insert(&pair_vec(&start));
    let mut frontier = vec![start];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (x, y) in &frontier {
            for (ai, bi) in a.iter().zip(b) {
                let cand = (ai * x, bi * y);
                if cand.0.trace() != cand.1.trace() {
                    return false;
                }
                if basis.insert(&pair_vec(&cand)) {
                    next.push(cand);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    true
}

fn pair_vec(p: &(QMatrix, QMatrix)) -> Vec<Gq> {
    let mut v = p.0.vec();
    v.extend(p.1.vec());
    v
}

/// Row-reduced set of vectors supporting incremental independence tests.
struct IncrementalBasis {
    rows: Vec<(usize, Vec<Gq>)>,
}

impl IncrementalBasis {
    fn new() -> Self {
        IncrementalBasis { rows: Vec::new() }
    }

    /// Adds `v` if independent; reports whether it was.
    fn insert(&mut self, v: &[Gq]) -> bool {
        let mut v = v.to_vec();
        for (pivot, row) in &self.rows {
            if v[*pivot].is_zero() {
                continue;
            }
            let f = v[*pivot].clone();
            for (x, r) in v.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x = &*x - &(&f * r);
                }
            }
        }
        let Some(pivot) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[pivot].inv();
        for x in v.iter_mut() {
            *x = &*x * &inv;
        }
        for (_, row) in self.rows.iter_mut() {
            if row[pivot].is_zero() {
                continue;
            }
            let f = row[pivot].clone();
            for (x, r) in row.iter_mut().zip(&v) {
                if !r.is_zero() {
                    *x = &*x - &(&f * r);
                }
            }
        }
        self.rows.push((pivot, v));
        true
    }
}

/// Verdict plus evidence for an equivalence question.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceCertificate {
    pub verdict: bool,
    /// `g` with `ρ₁ = g·ρ₂·g⁻¹` on the relevant (semisimple or monodromy)
    /// data.
    pub conjugator: Option<AnyMatrix>,
    pub trace_crosscheck: Option<bool>,
    /// True when every step ran in exact arithmetic.
    pub exact: bool,
    /// Largest residual of the conjugation identity in approximate mode.
    pub residual: Option<f64>,
    /// Failure probability bound when a randomized search reported `false`.
    pub randomized_failure_bound: Option<f64>,
}

fn check_pair(r1: &Representation, r2: &Representation) -> Result<()> {
    if r1.algebra != r2.algebra {
        return Err(DmodError::AlgebraMismatch);
    }
    if r1.rank != r2.rank {
        return Err(DmodError::RankMismatch(r1.rank, r2.rank));
    }
    require_nilpotent(&r1.algebra)
}

/// Gauge equivalence over the unipotent group: equality of canonical
/// classes, with a conjugator between the semisimple parts.
pub fn gauge_equivalent(
    r1: &Representation,
    r2: &Representation,
    cfg: &ToleranceConfig,
) -> Result<EquivalenceCertificate> {
    check_pair(r1, r2)?;
    let (_, s1) = complement_spectrum(r1, cfg)?;
    let (_, s2) = complement_spectrum(r2, cfg)?;
    let c1 = canonical_class(r1, cfg)?;
    let c2 = canonical_class(r2, cfg)?;
    let exact = c1.is_exact() && c2.is_exact();
    let eps = if exact { 0.0 } else { cfg.cluster_eps };
    let verdict = c1.same_as(&c2, eps);
    let ss1 = semisimplify(r1, cfg)?;
    let ss2 = semisimplify(r2, cfg)?;
    let n = r1.rank;
    let (conjugator, residual) = if !verdict {
        (None, None)
    } else {
        match (&s1, &s2) {
            (AnySpectrum::Exact(a), AnySpectrum::Exact(b)) => {
                let p1 = a.change_of_basis(n);
                let p2 = b.change_of_basis(n);
                let g = &p1 * &p2.inverse(0.0)?;
                let gi = g.inverse(0.0)?;
                for (x, y) in ss1.images.iter().zip(&ss2.images) {
                    if &(&g * y) * &gi != *x {
                        return Err(DmodError::IllConditioned(
                            "conjugator failed exact verification".into(),
                        ));
                    }
                }
                (Some(AnyMatrix::Exact(g)), None)
            }
            _ => {
                let p1 = approx_basis(&s1, n);
                let p2 = approx_basis(&s2, n);
                let g = &p1 * &p2.inverse(cfg.eps)?;
                let gi = g.inverse(cfg.eps)?;
                let mut res: f64 = 0.0;
                for (x, y) in ss1.images.iter().zip(&ss2.images) {
                    let d = &(&(&g * &y.to_c64()) * &gi) - &x.to_c64();
                    res = res.max(d.max_abs() / x.to_c64().scale_hint());
                }
                (Some(AnyMatrix::Approx(g)), Some(res))
            }
        }
    };
    let crosscheck = trace_tables_equal(&r1.images, &r2.images, n * n);
    Ok(EquivalenceCertificate {
        verdict,
        conjugator,
        trace_crosscheck: Some(crosscheck),
        exact,
        residual,
        randomized_failure_bound: None,
    })
}

fn approx_basis(spec: &AnySpectrum, n: usize) -> CMatrix {
    match spec {
        AnySpectrum::Exact(s) => s.change_of_basis(n).to_c64(),
        AnySpectrum::Approx(s) => s.change_of_basis(n),
    }
}

/// A matrix of polynomials in exponential coordinates `a_1, …, a_m`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyGauge {
    pub variables: Vec<String>,
    pub entries: Matrix<MPoly<Gq>>,
}

impl PolyGauge {
    pub fn eval(&self, p: &[Gq]) -> QMatrix {
        self.entries.map(|e| e.eval(p))
    }

    /// Applies a first-order operator entrywise.
    pub fn derivative(&self, field: &crate::bch::InvariantField) -> Matrix<MPoly<Gq>> {
        self.entries.map(|e| field.apply(e))
    }
}

/// `X(a) = exp(Σ a_i (A_i)_n)`, a finite series with polynomial entries.
pub fn gauge_to_semisimple(rho: &Representation, cfg: &ToleranceConfig) -> Result<PolyGauge> {
    require_nilpotent(&rho.algebra)?;
    let nil = nilpotent_parts(rho, cfg)?;
    Ok(PolyGauge {
        variables: rho.algebra.names().to_vec(),
        entries: poly_exp_nilpotent(&nil, rho.rank, &Gq::from_i64(1)),
    })
}

/// `exp(c·Σ a_k N_k)` with entries polynomial in `a`. Every combination of
/// the `N_k` must be nilpotent, so the series stops after `n` terms.
pub(crate) fn poly_exp_nilpotent(nil: &[QMatrix], n: usize, c: &Gq) -> Matrix<MPoly<Gq>> {
    let generic = Matrix::from_fn(n, n, |r, col| {
        let coeffs: Vec<Gq> = nil.iter().map(|a| a.get(r, col) * c).collect();
        MPoly::linear(&coeffs)
    });
    let mut acc: Matrix<MPoly<Gq>> = Matrix::identity(n);
    let mut term: Matrix<MPoly<Gq>> = Matrix::identity(n);
    for k in 1..=n {
        term = (&term * &generic).scale(&MPoly::constant(Gq::ratio(1, k as i64)));
        if term.is_zero() {
            break;
        }
        acc = &acc + &term;
    }
    acc
}

/// Checks `v(X) = X·ρ(v) − ρ'(v)·X` at the given points for every basis
/// vector `v`, with `v(X)` computed exactly through the invariant fields.
/// Returns the first failing `(point index, basis index)`.
pub fn check_poly_intertwining(
    gauge: &PolyGauge,
    rho: &Representation,
    target: &Representation,
    points: &[Vec<Gq>],
) -> Result<Option<(usize, usize)>> {
    let bch = Bch::new(&rho.algebra)?;
    for i in 0..rho.algebra.dim() {
        let field = bch.invariant_field(&rho.algebra.basis_vector(i));
        let dx = gauge.derivative(&field);
        for (k, p) in points.iter().enumerate() {
            let x = gauge.eval(p);
            let lhs = dx.map(|e| e.eval(p));
            let rhs = &(&x * &rho.images[i]) - &(&target.images[i] * &x);
            if lhs != rhs {
                return Ok(Some((k, i)));
            }
        }
    }
    Ok(None)
}
