//! Invariant D-modules over the upper-triangular Borel subgroup of `GL_l`:
//! the algebra of upper-triangular matrices, the reduction to the diagonal,
//! and the ordered-product gauge between them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{DmodError, Result};
use crate::lie::{BracketSpec, LieAlgebra, Representation};
use crate::linalg::{exp_nilpotent, exp_series, expm, jordan_chevalley};
use crate::matrix::{AnyMatrix, CMatrix, Matrix, QMatrix};
use crate::scalar::{Gq, Ring, C64};
use crate::spectrum::{exp_scaled, split_eigenvalues};
use crate::tolerance::ToleranceConfig;
use crate::torus::{spectral_projector, torus_gauge_equivalent, TorusRep};
use crate::unipotent::EquivalenceCertificate;

/// `Lie(B)` with basis `E_ij`, `i ≤ j`, in column order
/// `E_11, E_12, E_22, E_13, …, E_ll`.
#[derive(Clone, Debug, PartialEq)]
pub struct BorelAlgebra {
    pub l: usize,
    pub algebra: LieAlgebra,
    /// 0-based `(i, j)` of each basis element.
    pub index: Vec<(usize, usize)>,
}

impl BorelAlgebra {
    /// Basis position of `E_ij` (0-based, `i ≤ j`).
    pub fn position(&self, i: usize, j: usize) -> Option<usize> {
        self.index.iter().position(|&p| p == (i, j))
    }

    /// The elementary `l × l` matrix of basis element `k`.
    pub fn elementary(&self, k: usize) -> QMatrix {
        let (i, j) = self.index[k];
        QMatrix::unit(self.l, i, j)
    }

    /// The defining representation on `C^l`.
    pub fn defining(&self) -> Representation {
        let images = (0..self.index.len()).map(|k| self.elementary(k)).collect();
        Representation::new(self.algebra.clone(), self.l, images).expect("sizes agree")
    }

    pub fn is_diagonal(&self, k: usize) -> bool {
        let (i, j) = self.index[k];
        i == j
    }
}

/// `[E_ij, E_kl] = δ_jk E_il − δ_li E_kj`.
pub fn borel_algebra(l: usize) -> Result<BorelAlgebra> {
    if l == 0 {
        return Err(DmodError::Precondition("Borel algebra needs l >= 1".into()));
    }
    let index: Vec<(usize, usize)> = (0..l).flat_map(|j| (0..=j).map(move |i| (i, j))).collect();
    let pos = |i: usize, j: usize| index.iter().position(|&p| p == (i, j));
    let names = index.iter().map(|(i, j)| format!("E_{}_{}", i + 1, j + 1)).collect();
    let mut brackets = Vec::new();
    for a in 0..index.len() {
        for b in a + 1..index.len() {
            let ((i, j), (k, m)) = (index[a], index[b]);
            let mut coeffs = Vec::new();
            if j == k {
                coeffs.push((pos(i, m).expect("upper triangular"), Gq::from_i64(1)));
            }
            if m == i {
                coeffs.push((pos(k, j).expect("upper triangular"), Gq::from_i64(-1)));
            }
            if !coeffs.is_empty() {
                brackets.push(BracketSpec { i: a, j: b, coeffs });
            }
        }
    }
    Ok(BorelAlgebra {
        l,
        algebra: LieAlgebra::new(names, brackets)?,
        index,
    })
}

fn check_over(borel: &BorelAlgebra, rho: &Representation) -> Result<()> {
    if rho.algebra != borel.algebra {
        return Err(DmodError::AlgebraMismatch);
    }
    let report = rho.validate();
    if !report.is_valid() {
        return Err(DmodError::InvalidRepresentation(format!(
            "bracket relations fail: {:?}",
            report.failures
        )));
    }
    Ok(())
}

/// `ρ_a`: off-diagonal images replaced by zero, diagonal images kept.
pub fn diagonal_reduction(borel: &BorelAlgebra, rho: &Representation) -> Result<Representation> {
    check_over(borel, rho)?;
    let images: Vec<QMatrix> = rho
        .images
        .iter()
        .enumerate()
        .map(|(k, a)| {
            if borel.is_diagonal(k) {
                a.clone()
            } else {
                QMatrix::zeros(rho.rank, rho.rank)
            }
        })
        .collect();
    let out = Representation::new(rho.algebra.clone(), rho.rank, images)?;
    if !out.validate().is_valid() {
        return Err(DmodError::InvalidRepresentation(
            "diagonal images do not commute".into(),
        ));
    }
    Ok(out)
}

/// The diagonal images `(ρ(E_11), …, ρ(E_ll))` as a torus representation.
pub fn diagonal_tuple(borel: &BorelAlgebra, rho: &Representation) -> Result<TorusRep> {
    let ms = (0..borel.l)
        .map(|i| rho.images[borel.position(i, i).expect("diagonal element")].clone())
        .collect();
    TorusRep::new(rho.rank, ms)
}

/// Equivalence over `B`, decided on the diagonal images through the torus.
pub fn borel_gauge_equivalent(
    borel: &BorelAlgebra,
    r1: &Representation,
    r2: &Representation,
    cfg: &ToleranceConfig,
) -> Result<EquivalenceCertificate> {
    check_over(borel, r1)?;
    check_over(borel, r2)?;
    torus_gauge_equivalent(&diagonal_tuple(borel, r1)?, &diagonal_tuple(borel, r2)?, cfg)
}

/// `x^A = Σ_λ x^λ·P_λ`, exact when `A` is semisimple with integer
/// eigenvalues; `None` otherwise.
pub fn exact_power(a: &QMatrix, x: &Gq, cfg: &ToleranceConfig) -> Result<Option<QMatrix>> {
    let n = a.ensure_square()?;
    let jp = jordan_chevalley(a, cfg)?;
    if !jp.n.is_zero() {
        return Ok(None);
    }
    let Some(eigs) = split_eigenvalues(&jp.s)? else {
        return Ok(None);
    };
    let mut out = QMatrix::zeros(n, n);
    for lam in &eigs {
        let Some(k) = lam.as_integer() else {
            return Ok(None);
        };
        if x.is_zero() && k < 0 {
            return Err(DmodError::Singular);
        }
        out = &out + &spectral_projector(&jp.s, lam, &eigs).scale(&x.powi(k));
    }
    Ok(Some(out))
}

/// Both sides of `exp(X)·exp(Y)·exp(−X) = exp(e^s·Y)` for `[X, Y] = s·Y`
/// with `Y` nilpotent. Exact when `X` is nilpotent (then `s·Y = 0`
/// unless `Y = 0`), floating otherwise.
pub fn conjugate_exp_identity(
    x: &QMatrix,
    y: &QMatrix,
    s: &Gq,
    cfg: &ToleranceConfig,
) -> Result<(AnyMatrix, AnyMatrix)> {
    check_eigen_relation(x, y, s)?;
    if x.is_nilpotent() && s.is_zero() {
        let ex = exp_nilpotent(x)?;
        let exi = exp_nilpotent(&-x)?;
        let ey = exp_nilpotent(y)?;
        let lhs = &(&ex * &ey) * &exi;
        return Ok((AnyMatrix::Exact(lhs), AnyMatrix::Exact(ey)));
    }
    let one = C64::new(1.0, 0.0);
    let ex = exp_scaled(x, one, cfg)?;
    let exi = exp_scaled(x, -one, cfg)?;
    let ey = exp_series(&y.to_c64(), y.rows());
    let lhs = &(&ex * &ey) * &exi;
    let es = s.to_c64().exp();
    let rhs = exp_series(&y.to_c64().scale(&es), y.rows());
    Ok((AnyMatrix::Approx(lhs), AnyMatrix::Approx(rhs)))
}

/// Both sides of the power form `t^{−X}·exp(Y)·t^{X} = exp(t^{−s}·Y)`, the
/// substitution `X ↦ −log(t)·X` of [`conjugate_exp_identity`]. Exact when
/// `X` is semisimple with integer eigenvalues and `s` is an integer.
pub fn conjugate_power_identity(
    x: &QMatrix,
    y: &QMatrix,
    s: i64,
    t: &Gq,
    cfg: &ToleranceConfig,
) -> Result<Option<(QMatrix, QMatrix)>> {
    check_eigen_relation(x, y, &Gq::from_i64(s))?;
    if t.is_zero() {
        return Err(DmodError::Singular);
    }
    let (Some(tx), Some(txi)) = (exact_power(x, t, cfg)?, exact_power(x, &t.inv(), cfg)?) else {
        return Ok(None);
    };
    let lhs = &(&txi * &exp_nilpotent(y)?) * &tx;
    let rhs = exp_nilpotent(&y.scale(&t.powi(-s)))?;
    Ok(Some((lhs, rhs)))
}

fn check_eigen_relation(x: &QMatrix, y: &QMatrix, s: &Gq) -> Result<()> {
    if x.ensure_square()? != y.ensure_square()? {
        return Err(DmodError::DimensionMismatch("X and Y differ in size".into()));
    }
    if x.commutator(y) != y.scale(s) {
        return Err(DmodError::Precondition(format!("[X, Y] != {s}·Y")));
    }
    if !y.is_nilpotent() {
        return Err(DmodError::Precondition("Y is not nilpotent".into()));
    }
    Ok(())
}

/// One factor of the ordered product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Factor {
    /// `exp(−log(x_ii)·A_ii)`.
    DiagonalInverse(usize),
    /// `exp(log(x_ii)·A_ii)`.
    Diagonal(usize),
    /// `exp(x_ik·A_ik)`, `i < k`.
    OffDiagonal(usize, usize),
}

/// `exp(−log(x_jj)A_jj)…exp(x_ik A_ik)…exp(log(x_jj)A_jj)` collapsed to
/// `exp(x_ik·Π_j x_jj^{e_j}·A_ik)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedFactor {
    pub i: usize,
    pub k: usize,
    /// Exponent of each `x_jj`.
    pub diagonal_exponents: Vec<i64>,
}

/// Record of the reduction of every conjugated off-diagonal factor.
#[derive(Clone, Debug, PartialEq)]
pub struct ReductionCertificate {
    /// In product order.
    pub factors: Vec<ReducedFactor>,
    /// Every relation `[A_jj, A_ik] = c·A_ik` used was checked exactly.
    pub relations_verified: bool,
}

/// `X(x) = Π_i exp(−log x_ii A_ii)·[exp(log x_ll A_ll) Π_{i<l} exp(x_il A_il)
/// ⋯ exp(log x_22 A_22) exp(x_12 A_12) exp(log x_11 A_11)]`, evaluated at
/// upper-triangular group points `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductGauge {
    pub l: usize,
    pub rank: usize,
    pub factors: Vec<Factor>,
    /// `A_ij` indexed as `images[i][j]` for `i ≤ j`.
    images: Vec<Vec<QMatrix>>,
    pub certificate: ReductionCertificate,
}

fn check_point<F: Ring>(p: &Matrix<F>, l: usize) -> Result<()> {
    if p.rows() != l || p.cols() != l {
        return Err(DmodError::DimensionMismatch(format!(
            "group point must be {l}x{l}, got {}x{}",
            p.rows(),
            p.cols()
        )));
    }
    for i in 0..l {
        if p.get(i, i).is_zero() {
            return Err(DmodError::Singular);
        }
    }
    Ok(())
}

impl ProductGauge {
    pub fn image(&self, i: usize, k: usize) -> &QMatrix {
        &self.images[i][k]
    }

    /// The reduced product `Π exp(x_ik·Π x_jj^{e_j}·A_ik)`; polynomial in
    /// `x_ik` and `x_jj^{±1}`, so exact at exact points.
    pub fn eval(&self, p: &QMatrix) -> Result<QMatrix> {
        check_point(p, self.l)?;
        let mut acc = QMatrix::identity(self.rank);
        for f in &self.certificate.factors {
            let mut c = p.get(f.i, f.k).clone();
            for (j, &e) in f.diagonal_exponents.iter().enumerate() {
                c = &c * &p.get(j, j).powi(e);
            }
            acc = &acc * &exp_series(&self.images[f.i][f.k].scale(&c), self.rank);
        }
        Ok(acc)
    }

    /// [`ProductGauge::eval`] at a complex point.
    pub fn eval_c64(&self, p: &CMatrix) -> Result<CMatrix> {
        check_point(p, self.l)?;
        let mut acc = CMatrix::identity(self.rank);
        for f in &self.certificate.factors {
            let mut c = *p.get(f.i, f.k);
            for (j, &e) in f.diagonal_exponents.iter().enumerate() {
                c *= p.get(j, j).powi(e as i32);
            }
            acc = &acc * &exp_series(&self.images[f.i][f.k].to_c64().scale(&c), self.rank);
        }
        Ok(acc)
    }

    /// The ordered product factor by factor, diagonal exponentials through
    /// principal logarithms.
    pub fn eval_literal(&self, p: &CMatrix, cfg: &ToleranceConfig) -> Result<CMatrix> {
        check_point(p, self.l)?;
        let mut acc = CMatrix::identity(self.rank);
        for f in &self.factors {
            let m = match *f {
                Factor::DiagonalInverse(i) => exp_scaled(&self.images[i][i], -p.get(i, i).ln(), cfg)?,
                Factor::Diagonal(i) => exp_scaled(&self.images[i][i], p.get(i, i).ln(), cfg)?,
                Factor::OffDiagonal(i, k) => {
                    exp_series(&self.images[i][k].to_c64().scale(p.get(i, k)), self.rank)
                }
            };
            acc = &acc * &m;
        }
        Ok(acc)
    }

    /// The ordered product evaluated exactly, when every diagonal factor is
    /// an exact power (`A_ii` semisimple with integer spectrum).
    pub fn eval_literal_exact(&self, p: &QMatrix, cfg: &ToleranceConfig) -> Result<Option<QMatrix>> {
        check_point(p, self.l)?;
        let mut acc = QMatrix::identity(self.rank);
        for f in &self.factors {
            let m = match *f {
                Factor::DiagonalInverse(i) => exact_power(&self.images[i][i], &p.get(i, i).inv(), cfg)?,
                Factor::Diagonal(i) => exact_power(&self.images[i][i], p.get(i, i), cfg)?,
                Factor::OffDiagonal(i, k) => Some(exp_series(&self.images[i][k].scale(p.get(i, k)), self.rank)),
            };
            let Some(m) = m else { return Ok(None) };
            acc = &acc * &m;
        }
        Ok(Some(acc))
    }

    /// A copy with the factor at `position` removed; a negative control.
    pub fn without_factor(&self, position: usize) -> ProductGauge {
        let mut g = self.clone();
        let removed = g.factors.remove(position);
        if let Factor::OffDiagonal(i, k) = removed {
            g.certificate.factors.retain(|f| (f.i, f.k) != (i, k));
        }
        g
    }
}

/// The ordered-product gauge from `ρ` to its diagonal reduction, with the
/// reduction of every conjugated factor to `exp((x_ik/x_ii)·A_ik)` form.
pub fn borel_gauge(borel: &BorelAlgebra, rho: &Representation) -> Result<ProductGauge> {
    if rho.algebra != borel.algebra {
        return Err(DmodError::AlgebraMismatch);
    }
    let l = borel.l;
    let mut images = vec![vec![QMatrix::zeros(rho.rank, rho.rank); l]; l];
    for (k, &(i, j)) in borel.index.iter().enumerate() {
        images[i][j] = rho.images[k].clone();
        if i < j && !rho.images[k].is_nilpotent() {
            return Err(DmodError::NonNilpotentOffDiagonal(i + 1, j + 1));
        }
    }
    check_over(borel, rho)?;
    let mut factors: Vec<Factor> = (0..l).map(Factor::DiagonalInverse).collect();
    for k in (0..l).rev() {
        factors.push(Factor::Diagonal(k));
        for i in 0..k {
            factors.push(Factor::OffDiagonal(i, k));
        }
    }
    // Moving the diagonal factors to the front conjugates each exp(x_ik A_ik)
    // by exp(Σ_{j<k} log(x_jj) A_jj); with [E_jj, E_ik] = c_j E_ik this
    // rescales x_ik by Π_{j<k} x_jj^{−c_j}.
    let mut reduced = Vec::new();
    let mut verified = true;
    for k in (0..l).rev() {
        for i in 0..k {
            let target = borel.position(i, k).expect("off-diagonal element");
            let mut exps = vec![0i64; l];
            for (j, e) in exps.iter_mut().enumerate().take(k) {
                let jj = borel.position(j, j).expect("diagonal element");
                let mut c = Gq::zero();
                for m in 0..borel.algebra.dim() {
                    let v = borel.algebra.constant(jj, target, m);
                    if m == target {
                        c = v;
                    } else if !v.is_zero() {
                        return Err(DmodError::InvalidAlgebra(
                            "diagonal action is not by scalars".into(),
                        ));
                    }
                }
                let ci = c.as_integer().ok_or_else(|| {
                    DmodError::InvalidAlgebra("non-integral diagonal weight".into())
                })?;
                *e = -ci;
                verified &= images[j][j].commutator(&images[i][k]) == images[i][k].scale(&c);
            }
            reduced.push(ReducedFactor {
                i,
                k,
                diagonal_exponents: exps,
            });
        }
    }
    Ok(ProductGauge {
        l,
        rank: rho.rank,
        factors,
        images,
        certificate: ReductionCertificate {
            factors: reduced,
            relations_verified: verified,
        },
    })
}

/// Residuals of the intertwining identity at sampled group points.
#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub samples: usize,
    /// `residuals[p][v]`, relative.
    pub residuals: Vec<Vec<f64>>,
    pub max_residual: f64,
    pub tolerance: f64,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.max_residual < self.tolerance
    }
}

/// Central-difference step.
pub const FD_STEP: f64 = 1e-5;
/// Relative residual accepted by [`verify_intertwining`].
pub const FD_TOLERANCE: f64 = 1e-6;

/// A random upper-triangular point with `|x_ii| ∈ [0.5, 2]` and
/// off-diagonal entries in the unit square.
pub fn sample_borel_point(l: usize, rng: &mut impl Rng) -> CMatrix {
    let mut p = CMatrix::zeros(l, l);
    for i in 0..l {
        let r = rng.gen_range(0.5..2.0);
        let theta = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        p.set(i, i, C64::from_polar(r, theta));
        for k in i + 1..l {
            p.set(i, k, C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        }
    }
    p
}

/// Checks `d/dt|₀ X(p·exp(tv)) = X(p)·ρ(v) − ρ′(v)·X(p)` by central
/// differences at `samples` seeded random points, for every basis `v`.
pub fn verify_intertwining(
    borel: &BorelAlgebra,
    gauge: &dyn Fn(&CMatrix) -> Result<CMatrix>,
    rho: &Representation,
    rho_target: &Representation,
    samples: usize,
    cfg: &ToleranceConfig,
) -> Result<VerificationReport> {
    if rho.rank != rho_target.rank {
        return Err(DmodError::RankMismatch(rho.rank, rho_target.rank));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let steps: Vec<(CMatrix, CMatrix)> = (0..borel.index.len())
        .map(|k| {
            let e = borel.elementary(k).to_c64();
            let h = C64::new(FD_STEP, 0.0);
            (expm(&e.scale(&h)), expm(&e.scale(&-h)))
        })
        .collect();
    let mut residuals = Vec::with_capacity(samples);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let p = sample_borel_point(borel.l, &mut rng);
        let x = gauge(&p)?;
        let mut row = Vec::with_capacity(steps.len());
        for (k, (fwd, bwd)) in steps.iter().enumerate() {
            let xp = gauge(&(&p * fwd))?;
            let xm = gauge(&(&p * bwd))?;
            let fd = (&xp - &xm).scale(&C64::new(0.5 / FD_STEP, 0.0));
            let rhs = &(&x * &rho.images[k].to_c64()) - &(&rho_target.images[k].to_c64() * &x);
            let scale = 1.0f64.max(rhs.max_abs()).max(fd.max_abs());
            let r = (&fd - &rhs).max_abs() / scale;
            worst = worst.max(r);
            row.push(r);
        }
        residuals.push(row);
    }
    Ok(VerificationReport {
        samples,
        residuals,
        max_residual: worst,
        tolerance: FD_TOLERANCE,
    })
}
