//! Classification over the torus `(C*)ˡ`: monodromy, simultaneous conjugacy
//! of commuting tuples, Laurent gauges and the multi-logarithm.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{DmodError, Result};
use crate::intertwine::{contains_invertible, intertwiner_space_sized, SearchMethod};
use crate::laurent::LaurentPoly;
use crate::linalg::{det_laplace, jordan_chevalley, log_series, JordanPair};
use crate::matrix::{AnyMatrix, CMatrix, Matrix, QMatrix};
use crate::scalar::{Field, Gq, C64};
use crate::spectrum::{
    clustered_eigenvalues, exp_scaled, integer_gap, joint_eigen_decomposition, split_eigenvalues,
    AnySpectrum, JointSpectrum,
};
use crate::tolerance::ToleranceConfig;
use crate::unipotent::EquivalenceCertificate;

/// A representation of the abelian Lie algebra of `(C*)ˡ`: `l` commuting
/// `rank × rank` matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusRep {
    pub rank: usize,
    pub matrices: Vec<QMatrix>,
}

impl TorusRep {
    pub fn new(rank: usize, matrices: Vec<QMatrix>) -> Result<Self> {
        for a in &matrices {
            if a.ensure_square()? != rank {
                return Err(DmodError::RankMismatch(a.rows(), rank));
            }
        }
        for i in 0..matrices.len() {
            for j in i + 1..matrices.len() {
                if !matrices[i].commutes_with(&matrices[j]) {
                    return Err(DmodError::NonCommuting(i, j));
                }
            }
        }
        Ok(TorusRep { rank, matrices })
    }

    pub fn l(&self) -> usize {
        self.matrices.len()
    }

    /// `g·A_i·g⁻¹` for every member.
    pub fn conjugate(&self, g: &QMatrix) -> Result<TorusRep> {
        let gi = g.inverse(0.0)?;
        Ok(TorusRep {
            rank: self.rank,
            matrices: self.matrices.iter().map(|a| &(g * a) * &gi).collect(),
        })
    }

    fn jordan_pairs(&self, cfg: &ToleranceConfig) -> Result<Vec<JordanPair<Gq>>> {
        self.matrices.iter().map(|a| jordan_chevalley(a, cfg)).collect()
    }
}

/// Commuting invertible matrices `exp(2πi·A_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MonodromyTuple {
    pub matrices: Vec<CMatrix>,
}

pub fn monodromy(rho: &TorusRep, cfg: &ToleranceConfig) -> Result<MonodromyTuple> {
    let two_pi_i = C64::new(0.0, 2.0 * PI);
    Ok(MonodromyTuple {
        matrices: rho
            .matrices
            .iter()
            .map(|a| exp_scaled(a, two_pi_i, cfg))
            .collect::<Result<_>>()?,
    })
}

/// `Π_{μ≠λ} (S − μ)/(λ − μ)` for the distinct eigenvalues of a semisimple `S`.
pub(crate) fn spectral_projector<F: Field>(s: &Matrix<F>, lambda: &F, eigs: &[F]) -> Matrix<F> {
    let n = s.rows();
    let mut p = Matrix::identity(n);
    for mu in eigs {
        if mu == lambda {
            continue;
        }
        let f = (s - &Matrix::scalar(n, mu.clone())).scale(&(lambda.clone() - mu.clone()).inv());
        p = &p * &f;
    }
    p
}

/// `S − Σ_λ k_λ·P_λ`: each eigenvalue moved by an integer `k_λ` into the
/// strip `0 ≤ Re < 1`.
fn reduce_semisimple<F: Field>(s: &Matrix<F>, eigs: &[F], floor: impl Fn(&F) -> i64) -> Matrix<F> {
    let mut out = s.clone();
    for lam in eigs {
        let k = floor(lam);
        if k != 0 {
            out = &out - &spectral_projector(s, lam, eigs).scale(&F::from_i64(k));
        }
    }
    out
}

/// Reduced logarithms `L_i = S̃_i + N_i` of the monodromy, exactly.
///
/// `exp(2πi·L_i)` is the i-th monodromy and `L_i` is a polynomial in it, so
/// two tuples have simultaneously conjugate monodromies exactly when their
/// reduced logarithms are simultaneously conjugate. `None` when some
/// spectrum does not split over the Gaussian rationals.
pub fn reduced_log(rho: &TorusRep, cfg: &ToleranceConfig) -> Result<Option<Vec<QMatrix>>> {
    let mut out = Vec::new();
    for jp in rho.jordan_pairs(cfg)? {
        let Some(eigs) = split_eigenvalues(&jp.s)? else {
            return Ok(None);
        };
        let floor = |x: &Gq| {
            use num_traits::ToPrimitive;
            x.floor_re().to_i64().unwrap_or(0)
        };
        out.push(&reduce_semisimple(&jp.s, &eigs, floor) + &jp.n);
    }
    Ok(Some(out))
}

/// [`reduced_log`] in floating point; real parts within `cluster_eps` of an
/// integer snap up to it.
pub fn reduced_log_c64(rho: &TorusRep, cfg: &ToleranceConfig) -> Result<Vec<CMatrix>> {
    let mut out = Vec::new();
    for jp in rho.jordan_pairs(cfg)? {
        let s = jp.s.to_c64();
        let eigs: Vec<C64> = clustered_eigenvalues(&s, cfg)?.into_iter().map(|(z, _)| z).collect();
        let floor = |z: &C64| (z.re + cfg.cluster_eps).floor() as i64;
        out.push(&reduce_semisimple(&s, &eigs, floor) + &jp.n.to_c64());
    }
    Ok(out)
}

fn check_torus_pair(r1: &TorusRep, r2: &TorusRep) -> Result<()> {
    if r1.l() != r2.l() {
        return Err(DmodError::DimensionMismatch(format!(
            "torus ranks {} and {}",
            r1.l(),
            r2.l()
        )));
    }
    if r1.rank != r2.rank {
        return Err(DmodError::RankMismatch(r1.rank, r2.rank));
    }
    Ok(())
}

/// Are the monodromy tuples simultaneously conjugate? The conjugator `g`
/// satisfies `g·M₂·g⁻¹ = M₁`.
pub fn torus_gauge_equivalent(
    r1: &TorusRep,
    r2: &TorusRep,
    cfg: &ToleranceConfig,
) -> Result<EquivalenceCertificate> {
    check_torus_pair(r1, r2)?;
    let n = r1.rank;
    if let (Some(l1), Some(l2)) = (reduced_log(r1, cfg)?, reduced_log(r2, cfg)?) {
        let space = intertwiner_space_sized(&l2, &l1, n, n, 0.0)?;
        let search = contains_invertible(&space, cfg)?;
        let bound = (!search.found && search.method == SearchMethod::Randomized)
            .then_some(search.failure_bound);
        return Ok(EquivalenceCertificate {
            verdict: search.found,
            conjugator: search.witness.map(AnyMatrix::Exact),
            trace_crosscheck: None,
            exact: true,
            residual: None,
            randomized_failure_bound: bound,
        });
    }
    let l1 = reduced_log_c64(r1, cfg)?;
    let l2 = reduced_log_c64(r2, cfg)?;
    let space = intertwiner_space_sized(&l2, &l1, n, n, cfg.cluster_eps)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    for _ in 0..cfg.pit_trials {
        let coeffs: Vec<C64> = (0..space.len())
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let g = Matrix::combination(&coeffs, &space, n, n);
        if hadamard_ratio(&g)? > cfg.cluster_eps {
            let residual = l1
                .iter()
                .zip(&l2)
                .map(|(a, b)| (&(&g * b) - &(a * &g)).max_abs() / g.max_abs().max(1.0))
                .fold(0.0, f64::max);
            return Ok(EquivalenceCertificate {
                verdict: true,
                conjugator: Some(AnyMatrix::Approx(g)),
                trace_crosscheck: None,
                exact: false,
                residual: Some(residual),
                randomized_failure_bound: None,
            });
        }
    }
    Ok(EquivalenceCertificate {
        verdict: false,
        conjugator: None,
        trace_crosscheck: None,
        exact: false,
        residual: None,
        randomized_failure_bound: None,
    })
}

/// `|det g| / Π ‖row_i‖`, in `[0, 1]`; zero exactly for singular `g`.
fn hadamard_ratio(g: &CMatrix) -> Result<f64> {
    let n = g.rows();
    if n == 0 {
        return Ok(1.0);
    }
    let mut denom = 1.0;
    for r in 0..n {
        let norm = g.row(r).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Ok(0.0);
        }
        denom *= norm;
    }
    Ok(g.det()?.norm() / denom)
}

/// A matrix of Laurent polynomials in `z_1, …, z_l`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentGauge<F> {
    pub l: usize,
    pub entries: Matrix<LaurentPoly<F>>,
}

impl<F: Field> LaurentGauge<F> {
    pub fn eval(&self, z: &[C64]) -> CMatrix {
        self.entries.map(|e| e.eval(z))
    }

    /// Entrywise `z_i ∂/∂z_i`.
    pub fn euler_derivative(&self, i: usize) -> Matrix<LaurentPoly<F>> {
        self.entries.map(|e| e.euler_derivative(i))
    }

    /// Largest coefficient of `z_i∂_i X − (X·A_i − B_i·X)` over all `i`,
    /// computed symbolically.
    pub fn intertwining_defect(&self, source: &TorusRep, target: &TorusRep) -> f64 {
        let lift = |m: &QMatrix| m.map(|x| LaurentPoly::constant(F::from_gq(x)));
        let mut worst: f64 = 0.0;
        for i in 0..self.l {
            let rhs = &(&self.entries * &lift(&source.matrices[i]))
                - &(&lift(&target.matrices[i]) * &self.entries);
            let diff = &self.euler_derivative(i) - &rhs;
            for e in diff.entries() {
                worst = worst.max(e.max_coeff());
            }
        }
        worst
    }

    /// Determinant as a Laurent polynomial; a single term for gauges built
    /// by [`laurent_gauge`].
    pub fn determinant(&self) -> LaurentPoly<F> {
        det_laplace(&self.entries)
    }
}

impl LaurentGauge<Gq> {
    pub fn eval_exact(&self, z: &[Gq]) -> QMatrix {
        self.entries.map(|e| e.eval_exact(z))
    }

    /// Does `z_i∂_i X = X·A_i − B_i·X` hold identically for every `i`?
    pub fn intertwines_exactly(&self, source: &TorusRep, target: &TorusRep) -> bool {
        self.intertwining_defect(source, target) == 0.0
            && (0..self.l).all(|i| {
                let lift = |m: &QMatrix| m.map(|x| LaurentPoly::constant(x.clone()));
                let rhs = &(&self.entries * &lift(&source.matrices[i]))
                    - &(&lift(&target.matrices[i]) * &self.entries);
                self.euler_derivative(i) == rhs
            })
    }
}

/// A Laurent gauge in whichever arithmetic was possible.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyLaurentGauge {
    Exact(LaurentGauge<Gq>),
    Approx(LaurentGauge<C64>),
}

impl AnyLaurentGauge {
    pub fn is_exact(&self) -> bool {
        matches!(self, AnyLaurentGauge::Exact(_))
    }

    pub fn eval(&self, z: &[C64]) -> CMatrix {
        match self {
            AnyLaurentGauge::Exact(g) => g.eval(z),
            AnyLaurentGauge::Approx(g) => g.eval(z),
        }
    }

    pub fn intertwining_defect(&self, source: &TorusRep, target: &TorusRep) -> f64 {
        match self {
            AnyLaurentGauge::Exact(g) => g.intertwining_defect(source, target),
            AnyLaurentGauge::Approx(g) => g.intertwining_defect(source, target),
        }
    }

    pub fn euler_derivative(&self, i: usize) -> Matrix<LaurentPoly<C64>> {
        match self {
            AnyLaurentGauge::Exact(g) => g.euler_derivative(i).map(|e| e.map_coeffs(Gq::to_c64)),
            AnyLaurentGauge::Approx(g) => g.euler_derivative(i),
        }
    }
}

/// Semisimple parts of a tuple and, per column of the diagonalizing basis,
/// the joint eigenvalue vector.
fn column_eigs<F: Field>(spec: &JointSpectrum<F>, n: usize) -> (Matrix<F>, Vec<Vec<F>>) {
    let p = spec.change_of_basis(n);
    let eigs = spec
        .blocks
        .iter()
        .flat_map(|b| std::iter::repeat(b.eigvec.clone()).take(b.multiplicity))
        .collect();
    (p, eigs)
}

/// `X = P₂·(H_jk z^{λ_k − μ_j})·P₁⁻¹` with `H = P₂⁻¹·g⁻¹·P₁`.
fn assemble_laurent<F: Field>(
    l: usize,
    (p1, lam): (Matrix<F>, Vec<Vec<F>>),
    (p2, mu): (Matrix<F>, Vec<Vec<F>>),
    ginv: &Matrix<F>,
    cfg: &ToleranceConfig,
) -> Result<LaurentGauge<F>> {
    let n = p1.rows();
    let tol = if F::EXACT { 0.0 } else { cfg.eps };
    let p1inv = p1.inverse(tol)?;
    let p2inv = p2.inverse(tol)?;
    let h = &(&p2inv * ginv) * &p1;
    let hscale = h.max_abs().max(1.0);
    let mut mid: Matrix<LaurentPoly<F>> = Matrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            let c = h.get(j, k);
            if c.negligible(cfg.cluster_eps * hscale) {
                continue;
            }
            let mut exp = Vec::with_capacity(l);
            for i in 0..l {
                let gap = integer_gap(&lam[k][i].to_scalar(), &mu[j][i].to_scalar(), cfg.cluster_eps)
                    .ok_or_else(|| {
                        DmodError::NotEquivalent(format!(
                            "exponent {:?} − {:?} is not an integer",
                            lam[k][i], mu[j][i]
                        ))
                    })?;
                exp.push(gap);
            }
            mid.set(j, k, LaurentPoly::monomial(exp, c.clone()));
        }
    }
    let lift = |m: &Matrix<F>| m.map(|x| LaurentPoly::constant(x.clone()));
    let mut entries = &(&lift(&p2) * &mid) * &lift(&p1inv);
    if !F::EXACT {
        entries = entries.map(|e| e.prune(cfg.eps));
    }
    Ok(LaurentGauge { l, entries })
}

/// The gauge `X(z) = exp(−ρ₂(log z))·g⁻¹·exp(ρ₁(log z))`, which is a
/// Laurent polynomial matrix whenever `g·M₂·g⁻¹ = M₁`.
///
/// It satisfies `z_i∂_i X = X·ρ₁(e_i) − ρ₂(e_i)·X`.
pub fn laurent_gauge(
    r1: &TorusRep,
    r2: &TorusRep,
    g: &AnyMatrix,
    cfg: &ToleranceConfig,
) -> Result<AnyLaurentGauge> {
    check_torus_pair(r1, r2)?;
    let (n, l) = (r1.rank, r1.l());
    let exact_logs = match g {
        AnyMatrix::Exact(ge) => match (reduced_log(r1, cfg)?, reduced_log(r2, cfg)?) {
            (Some(l1), Some(l2)) => {
                if l1.iter().zip(&l2).any(|(a, b)| ge * b != a * ge) {
                    return Err(DmodError::Precondition(
                        "g does not conjugate the second monodromy to the first".into(),
                    ));
                }
                true
            }
            _ => false,
        },
        AnyMatrix::Approx(_) => false,
    };
    if !exact_logs {
        let gc = g.to_c64();
        let l1 = reduced_log_c64(r1, cfg)?;
        let l2 = reduced_log_c64(r2, cfg)?;
        let scale = gc.max_abs().max(1.0);
        for (a, b) in l1.iter().zip(&l2) {
            let res = (&(&gc * b) - &(a * &gc)).max_abs();
            if res > cfg.cluster_eps * scale * (1.0 + a.max_abs()) {
                return Err(DmodError::Precondition(format!(
                    "g does not conjugate the second monodromy to the first (residual {res:.3e})"
                )));
            }
        }
    }
    let s1: Vec<QMatrix> = r1.jordan_pairs(cfg)?.into_iter().map(|jp| jp.s).collect();
    let s2: Vec<QMatrix> = r2.jordan_pairs(cfg)?.into_iter().map(|jp| jp.s).collect();
    if l == 0 {
        return Ok(match g {
            AnyMatrix::Exact(ge) => AnyLaurentGauge::Exact(LaurentGauge {
                l,
                entries: ge.inverse(0.0)?.map(|x| LaurentPoly::constant(x.clone())),
            }),
            AnyMatrix::Approx(gc) => AnyLaurentGauge::Approx(LaurentGauge {
                l,
                entries: gc.inverse(cfg.eps)?.map(|x| LaurentPoly::constant(*x)),
            }),
        });
    }
    let sp1 = joint_eigen_decomposition(&s1, cfg)?;
    let sp2 = joint_eigen_decomposition(&s2, cfg)?;
    match (exact_logs, g, &sp1, &sp2) {
        (true, AnyMatrix::Exact(ge), AnySpectrum::Exact(a), AnySpectrum::Exact(b)) => {
            let ginv = ge.inverse(0.0)?;
            Ok(AnyLaurentGauge::Exact(assemble_laurent(
                l,
                column_eigs(a, n),
                column_eigs(b, n),
                &ginv,
                cfg,
            )?))
        }
        _ => {
            let ginv = g.to_c64().inverse(cfg.eps)?;
            Ok(AnyLaurentGauge::Approx(assemble_laurent(
                l,
                approx_column_eigs(&sp1, n),
                approx_column_eigs(&sp2, n),
                &ginv,
                cfg,
            )?))
        }
    }
}

fn approx_column_eigs(spec: &AnySpectrum, n: usize) -> (CMatrix, Vec<Vec<C64>>) {
    match spec {
        AnySpectrum::Exact(s) => {
            let (p, e) = column_eigs(s, n);
            (p.to_c64(), e.iter().map(|v| v.iter().map(Gq::to_c64).collect()).collect())
        }
        AnySpectrum::Approx(s) => column_eigs(s, n),
    }
}

/// Principal logarithm, `Im ∈ (−π, π]`.
fn principal_ln(z: C64) -> C64 {
    let im = if z.im == 0.0 { 0.0 } else { z.im };
    C64::new(z.re, im).ln()
}

/// Joint generalized eigenspaces of a commuting tuple.
fn generalized_split<F: Field>(
    tuple: &[Matrix<F>],
    n: usize,
    tol: f64,
    distinct: &dyn Fn(&Matrix<F>) -> Result<Option<Vec<F>>>,
) -> Result<Option<Vec<(Vec<F>, Matrix<F>)>>> {
    let mut blocks: Vec<(Vec<F>, Matrix<F>)> = if n == 0 {
        Vec::new()
    } else {
        vec![(Vec::new(), Matrix::identity(n))]
    };
    for a in tuple {
        let mut next = Vec::new();
        for (ev, v) in blocks {
            let d = v.cols();
            let r = v
                .solve(&(a * &v), tol)
                .ok_or_else(|| DmodError::IllConditioned("eigenspace not invariant".into()))?;
            let Some(eigs) = distinct(&r)? else {
                return Ok(None);
            };
            let mut total = 0;
            for lam in eigs {
                let shifted = (&r - &Matrix::scalar(d, lam.clone())).pow(d as u32);
                let ker = shifted.kernel(tol);
                if ker.is_empty() {
                    continue;
                }
                total += ker.len();
                let mut e = ev.clone();
                e.push(lam);
                next.push((e, &v * &Matrix::from_columns(d, &ker)));
            }
            if total != d {
                return Err(DmodError::IllConditioned(
                    "generalized eigenspaces do not fill the space".into(),
                ));
            }
        }
        blocks = next;
    }
    Ok(Some(blocks))
}

/// Per block: change of basis, eigenvalue vector and the nilpotent logs
/// `log(I + N_i/λ_i)` of the restrictions.
struct LogPieces<F> {
    p: Matrix<F>,
    pinv: Matrix<F>,
    blocks: Vec<(Vec<F>, Vec<Matrix<F>>)>,
}

fn log_pieces<F: Field>(
    tuple: &[Matrix<F>],
    n: usize,
    tol: f64,
    split: Vec<(Vec<F>, Matrix<F>)>,
) -> Result<LogPieces<F>> {
    let mut cols = Vec::new();
    let mut blocks = Vec::new();
    for (eigs, v) in split {
        let d = v.cols();
        let mut nils = Vec::new();
        for (a, lam) in tuple.iter().zip(&eigs) {
            if lam.negligible(tol) {
                return Err(DmodError::Singular);
            }
            let r = v
                .solve(&(a * &v), tol)
                .ok_or_else(|| DmodError::IllConditioned("eigenspace not invariant".into()))?;
            let x = &r.scale(&lam.inv()) - &Matrix::identity(d);
            nils.push(log_series(&x, d));
        }
        cols.extend(v.columns());
        blocks.push((eigs, nils));
    }
    let p = Matrix::from_columns(n, &cols);
    let pinv = p.inverse(tol)?;
    Ok(LogPieces { p, pinv, blocks })
}

impl<F: Field> LogPieces<F> {
    /// `P·blockdiag(log λ_i·I + log(I + N_i/λ_i))·P⁻¹`, split into the
    /// scalar-log part (floating) and the nilpotent part (in `F`).
    fn member(&self, i: usize) -> (CMatrix, Matrix<F>, bool) {
        let mut diag = Vec::new();
        let mut nil_blocks = Vec::new();
        let mut trivial = true;
        for (eigs, nils) in &self.blocks {
            let d = nils[i].rows();
            let lam = &eigs[i];
            if *lam != F::one() {
                trivial = false;
            }
            diag.extend(std::iter::repeat(principal_ln(lam.to_c64())).take(d));
            nil_blocks.push(nils[i].clone());
        }
        let nil = &(&self.p * &Matrix::block_diag(&nil_blocks)) * &self.pinv;
        let scal = &(&self.p.to_c64() * &Matrix::diag(&diag)) * &self.pinv.to_c64();
        (scal, nil, trivial)
    }
}

/// Commuting logarithms `L_i` with `exp(L_i) = B_i`, principal branch on
/// each joint generalized eigenspace. Exact for members whose eigenvalues
/// are all `1`; floating otherwise.
pub fn multi_log(b: &[QMatrix], cfg: &ToleranceConfig) -> Result<Vec<AnyMatrix>> {
    let n = check_invertible_tuple(b, 0.0)?;
    let split = generalized_split(b, n, 0.0, &|r: &QMatrix| split_eigenvalues(r))?;
    let Some(split) = split else {
        let approx: Vec<CMatrix> = b.iter().map(Matrix::to_c64).collect();
        return Ok(multi_log_c64(&approx, cfg)?
            .into_iter()
            .map(AnyMatrix::Approx)
            .collect());
    };
    let pieces = log_pieces(b, n, 0.0, split)?;
    Ok((0..b.len())
        .map(|i| {
            let (scal, nil, trivial) = pieces.member(i);
            if trivial {
                AnyMatrix::Exact(nil)
            } else {
                AnyMatrix::Approx(&scal + &nil.to_c64())
            }
        })
        .collect())
}

/// [`multi_log`] for a floating-point tuple, such as a computed monodromy.
pub fn multi_log_c64(b: &[CMatrix], cfg: &ToleranceConfig) -> Result<Vec<CMatrix>> {
    let n = check_invertible_tuple(b, cfg.eps)?;
    let split = generalized_split(b, n, cfg.cluster_eps, &|r: &CMatrix| {
        Ok(Some(
            clustered_eigenvalues(r, cfg)?.into_iter().map(|(z, _)| z).collect(),
        ))
    })?
    .expect("float splitting always succeeds");
    let pieces = log_pieces(b, n, cfg.cluster_eps, split)?;
    Ok((0..b.len())
        .map(|i| {
            let (scal, nil, _) = pieces.member(i);
            &scal + &nil
        })
        .collect())
}

fn check_invertible_tuple<F: Field>(b: &[Matrix<F>], tol: f64) -> Result<usize> {
    let Some(first) = b.first() else {
        return Ok(0);
    };
    let n = first.ensure_square()?;
    for (i, x) in b.iter().enumerate() {
        if x.ensure_square()? != n {
            return Err(DmodError::DimensionMismatch("tuple sizes differ".into()));
        }
        for (j, y) in b.iter().enumerate().skip(i + 1) {
            if !x.commutator(y).negligible(tol) {
                return Err(DmodError::NonCommuting(i, j));
            }
        }
        if x.det()?.negligible(tol * x.scale_hint().powi(n as i32)) {
            return Err(DmodError::Singular);
        }
    }
    Ok(n)
}
