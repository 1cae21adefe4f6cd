//! The D-module layer: Hom spaces between invariant D-modules on unipotent
//! groups, the flow formula for solutions, and the `SL₂` adjoint fixture.

use crate::bch::InvariantField;
use crate::borel::borel_algebra;
use crate::error::{DmodError, Result};
use crate::lie::{LieAlgebra, Representation};
use crate::linalg::exp_series;
use crate::matrix::{AnyMatrix, CMatrix, Matrix, QMatrix};
use crate::mpoly::MPoly;
use crate::scalar::{Field, Gq, Ring, Scalar, C64};
use crate::spectrum::AnySpectrum;
use crate::tolerance::ToleranceConfig;
use crate::unipotent::{complement_spectrum, nilpotent_parts, poly_exp_nilpotent, semisimplify};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupKind {
    Unipotent,
    Torus,
    Borel,
}

/// The invariant D-module attached to a representation of `Lie(G)`.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantDModule {
    pub rep: Representation,
    pub kind: GroupKind,
}

impl InvariantDModule {
    pub fn new(rep: Representation, kind: GroupKind) -> Result<Self> {
        let report = rep.validate();
        if !report.is_valid() {
            return Err(DmodError::InvalidRepresentation(format!(
                "bracket relations fail: {:?}",
                report.failures
            )));
        }
        let ok = match kind {
            GroupKind::Unipotent => rep.algebra.nilpotency_profile().is_nilpotent,
            GroupKind::Torus => rep.algebra.structure().is_empty(),
            GroupKind::Borel => {
                let m = rep.algebra.dim();
                let l = ((((8 * m + 1) as f64).sqrt() as usize).saturating_sub(1)) / 2;
                l >= 1 && borel_algebra(l)?.algebra == rep.algebra
            }
        };
        if !ok {
            return Err(DmodError::InvalidAlgebra(format!(
                "algebra does not match group kind {kind:?}"
            )));
        }
        Ok(InvariantDModule { rep, kind })
    }
}

/// A pair of joint eigenspaces whose eigenvalue functionals agree.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockMatch {
    /// The common functional on the abelianization, as a vector.
    pub functional: Vec<Scalar>,
    pub mult_source: usize,
    pub mult_target: usize,
}

/// `Hom(M₁, M₂)` through initial values `X(0)` of solutions.
#[derive(Clone, Debug, PartialEq)]
pub struct HomSpace {
    pub dimension: usize,
    pub block_matches: Vec<BlockMatch>,
    /// `rank₂ × rank₁` matrices spanning the admissible `X(0)`.
    pub initial_value_basis: Vec<AnyMatrix>,
}

fn check_unipotent_pair(r1: &Representation, r2: &Representation) -> Result<()> {
    if r1.algebra != r2.algebra {
        return Err(DmodError::AlgebraMismatch);
    }
    if !r1.algebra.nilpotency_profile().is_nilpotent {
        return Err(DmodError::NotNilpotentAlgebra);
    }
    Ok(())
}

/// Solutions `X` of `v(X) = X·ρ₁(v) − ρ₂(v)·X` that are polynomial, counted
/// by pairs of joint eigenspaces of the semisimple parts with the same
/// eigenvalue functional.
pub fn hom_dimension(
    m1: &InvariantDModule,
    m2: &InvariantDModule,
    cfg: &ToleranceConfig,
) -> Result<HomSpace> {
    if m1.kind != GroupKind::Unipotent || m2.kind != GroupKind::Unipotent {
        return Err(DmodError::Precondition(
            "Hom spaces are computed for unipotent groups only".into(),
        ));
    }
    let (r1, r2) = (&m1.rep, &m2.rep);
    check_unipotent_pair(r1, r2)?;
    let (_, s1) = complement_spectrum(r1, cfg)?;
    let (_, s2) = complement_spectrum(r2, cfg)?;
    let exact = s1.is_exact() && s2.is_exact();
    let eps = if exact { 0.0 } else { cfg.cluster_eps };
    let (mult1, mult2) = (s1.multiplicities(), s2.multiplicities());
    let offsets = |ms: &[(Vec<Scalar>, usize)]| {
        ms.iter()
            .scan(0, |acc, (_, m)| {
                let start = *acc;
                *acc += m;
                Some(start)
            })
            .collect::<Vec<_>>()
    };
    let (off1, off2) = (offsets(&mult1), offsets(&mult2));
    let mut block_matches = Vec::new();
    let mut pairs = Vec::new();
    for (b1, (f1, k1)) in mult1.iter().enumerate() {
        for (b2, (f2, k2)) in mult2.iter().enumerate() {
            if f1.len() == f2.len() && f1.iter().zip(f2).all(|(x, y)| x.approx_eq(y, eps)) {
                block_matches.push(BlockMatch {
                    functional: f1.clone(),
                    mult_source: *k1,
                    mult_target: *k2,
                });
                pairs.push((b1, b2));
            }
        }
    }
    let dimension = block_matches.iter().map(|m| m.mult_source * m.mult_target).sum();
    let initial_value_basis = match (&s1, &s2) {
        (AnySpectrum::Exact(a), AnySpectrum::Exact(b)) => {
            let p1 = a.change_of_basis(r1.rank);
            let p2 = b.change_of_basis(r2.rank);
            block_units(&p1.inverse(0.0)?, &p2, &pairs, (&off1, &mult1), (&off2, &mult2))
                .into_iter()
                .map(AnyMatrix::Exact)
                .collect()
        }
        _ => {
            let p1 = approx_basis(&s1, r1.rank);
            let p2 = approx_basis(&s2, r2.rank);
            block_units(&p1.inverse(cfg.eps)?, &p2, &pairs, (&off1, &mult1), (&off2, &mult2))
                .into_iter()
                .map(AnyMatrix::Approx)
                .collect()
        }
    };
    Ok(HomSpace {
        dimension,
        block_matches,
        initial_value_basis,
    })
}

type Blocks<'a> = (&'a [usize], &'a [(Vec<Scalar>, usize)]);

/// `P₂·E_ab·P₁⁻¹` for `a` in a target block and `b` in the matched source
/// block.
fn block_units<F: Field>(
    p1inv: &Matrix<F>,
    p2: &Matrix<F>,
    pairs: &[(usize, usize)],
    (off1, mult1): Blocks<'_>,
    (off2, mult2): Blocks<'_>,
) -> Vec<Matrix<F>> {
    let (n1, n2) = (p1inv.rows(), p2.rows());
    let mut out = Vec::new();
    for &(b1, b2) in pairs {
        for a in off2[b2]..off2[b2] + mult2[b2].1 {
            for b in off1[b1]..off1[b1] + mult1[b1].1 {
                out.push(Matrix::from_fn(n2, n1, |r, c| {
                    p2.get(r, a).clone() * p1inv.get(b, c).clone()
                }));
            }
        }
    }
    out
}

fn approx_basis(spec: &AnySpectrum, n: usize) -> CMatrix {
    match spec {
        AnySpectrum::Exact(s) => s.change_of_basis(n).to_c64(),
        AnySpectrum::Approx(s) => s.change_of_basis(n),
    }
}

fn check_initial_value(r1: &Representation, r2: &Representation, x0: &QMatrix) -> Result<()> {
    if x0.rows() != r2.rank || x0.cols() != r1.rank {
        return Err(DmodError::DimensionMismatch(format!(
            "initial value must be {}x{}, got {}x{}",
            r2.rank,
            r1.rank,
            x0.rows(),
            x0.cols()
        )));
    }
    Ok(())
}

/// `X(p) = exp(−ρ₂(p))·X0·exp(ρ₁(p))` in exponential coordinates `p`.
///
/// With `ρ(p) = S(p) + N(p)` split into commuting parts, the result is
/// `exp(−N₂(p))·exp(−S₂(p))·X0·exp(S₁(p))·exp(N₁(p))`. It is exact whenever
/// `X0·S₁(p) = S₂(p)·X0`, when the middle factor collapses to `X0`.
pub fn flow_solution(
    r1: &Representation,
    r2: &Representation,
    x0: &QMatrix,
    p: &[Gq],
    cfg: &ToleranceConfig,
) -> Result<AnyMatrix> {
    check_unipotent_pair(r1, r2)?;
    check_initial_value(r1, r2, x0)?;
    if p.len() != r1.algebra.dim() {
        return Err(DmodError::DimensionMismatch(format!(
            "point has {} coordinates, algebra dimension is {}",
            p.len(),
            r1.algebra.dim()
        )));
    }
    let (ss1, ss2) = (semisimplify(r1, cfg)?, semisimplify(r2, cfg)?);
    let (nil1, nil2) = (nilpotent_parts(r1, cfg)?, nilpotent_parts(r2, cfg)?);
    let s1 = ss1.image(p);
    let s2 = ss2.image(p);
    let n1p = Matrix::combination(p, &nil1, r1.rank, r1.rank);
    let n2p = Matrix::combination(p, &nil2, r2.rank, r2.rank);
    let left = exp_series(&-&n2p, r2.rank);
    let right = exp_series(&n1p, r1.rank);
    if x0 * &s1 == &s2 * x0 {
        return Ok(AnyMatrix::Exact(&(&left * x0) * &right));
    }
    let one = C64::new(1.0, 0.0);
    let middle = &(&crate::spectrum::exp_scaled(&s2, -one, cfg)? * &x0.to_c64())
        * &crate::spectrum::exp_scaled(&s1, one, cfg)?;
    Ok(AnyMatrix::Approx(&(&left.to_c64() * &middle) * &right.to_c64()))
}

/// Is the solution with initial value `X0` polynomial? Exactly when `X0`
/// intertwines the semisimple parts, i.e. when it is supported on pairs of
/// joint eigenspaces with equal functionals.
pub fn is_polynomial_solution(
    r1: &Representation,
    r2: &Representation,
    x0: &QMatrix,
    cfg: &ToleranceConfig,
) -> Result<bool> {
    check_unipotent_pair(r1, r2)?;
    check_initial_value(r1, r2, x0)?;
    let (ss1, ss2) = (semisimplify(r1, cfg)?, semisimplify(r2, cfg)?);
    Ok(ss1.images.iter().zip(&ss2.images).all(|(a, b)| x0 * a == b * x0))
}

/// The polynomial solution `exp(−N₂(a))·X0·exp(N₁(a))` for an admissible
/// `X0`, as a matrix over `Q(i)[a_1, …, a_m]`.
pub fn polynomial_flow(
    r1: &Representation,
    r2: &Representation,
    x0: &QMatrix,
    cfg: &ToleranceConfig,
) -> Result<Matrix<MPoly<Gq>>> {
    if !is_polynomial_solution(r1, r2, x0, cfg)? {
        return Err(DmodError::Precondition(
            "initial value does not intertwine the semisimple parts".into(),
        ));
    }
    let (nil1, nil2) = (nilpotent_parts(r1, cfg)?, nilpotent_parts(r2, cfg)?);
    let left = poly_exp_nilpotent(&nil2, r2.rank, &Gq::from_i64(-1));
    let right = poly_exp_nilpotent(&nil1, r1.rank, &Gq::from_i64(1));
    let lift = x0.map(|c| MPoly::constant(c.clone()));
    Ok(&(&left * &lift) * &right)
}

/// Outcome of the `SL₂` adjoint example.
#[derive(Clone, Debug, PartialEq)]
pub struct FixtureReport {
    pub adjoint: [QMatrix; 3],
    /// The printed matrices equal the adjoint action computed from the
    /// structure constants.
    pub matches_structure_constants: bool,
    pub brackets_hold: bool,
    pub identity_value: bool,
    /// `(field name, v(X̃) = X̃·ρ(v) modulo xw − yz − 1)`.
    pub pde: Vec<(String, bool)>,
    /// `det X̃ = 1` on the group.
    pub unimodular: bool,
}

impl FixtureReport {
    pub fn passed(&self) -> bool {
        self.matches_structure_constants
            && self.brackets_hold
            && self.identity_value
            && self.unimodular
            && self.pde.iter().all(|(_, ok)| *ok)
    }
}

/// Coordinates `x, y, z, w` of `[[x, y], [z, w]] ∈ SL₂`.
const X: usize = 0;
const Y: usize = 1;
const Z: usize = 2;
const W: usize = 3;

fn var(i: usize) -> MPoly<Gq> {
    MPoly::var(i)
}

fn int(c: i64) -> MPoly<Gq> {
    MPoly::constant(Gq::from_i64(c))
}

/// Normal form modulo `xw − yz − 1`, rewriting `xw ↦ yz + 1`.
pub fn reduce_sl2(p: &MPoly<Gq>) -> MPoly<Gq> {
    p.reduce_by(&vec![1, 0, 0, 1], &(var(Y) * var(Z) + int(1)))
}

/// The left-invariant fields of `X, Y, H` on `SL₂` in matrix coordinates.
pub fn sl2_fields() -> Vec<(String, InvariantField)> {
    let field = |c: [MPoly<Gq>; 4]| InvariantField { coeffs: c.to_vec() };
    vec![
        ("X".into(), field([int(0), var(X), int(0), var(Z)])),
        ("Y".into(), field([var(Y), int(0), var(W), int(0)])),
        ("H".into(), field([var(X), -var(Y), var(Z), -var(W)])),
    ]
}

/// `g ↦ Ad(g)` in the basis `X, Y, H`, entries quadratic in `x, y, z, w`.
pub fn sl2_adjoint_gauge() -> Matrix<MPoly<Gq>> {
    let (x, y, z, w) = (var(X), var(Y), var(Z), var(W));
    Matrix::from_rows(vec![
        vec![x.clone() * x.clone(), -(y.clone() * y.clone()), int(-2) * x.clone() * y.clone()],
        vec![-(z.clone() * z.clone()), w.clone() * w.clone(), int(2) * z.clone() * w.clone()],
        vec![-(x.clone() * z.clone()), y.clone() * w.clone(), x * w + y * z],
    ])
    .expect("3x3")
}

/// Checks the adjoint example on `SL₂` exactly.
pub fn sl2_adjoint_fixture() -> FixtureReport {
    let rx = QMatrix::from_i64_rows(&[&[0, 0, -2], &[0, 0, 0], &[0, 1, 0]]);
    let ry = QMatrix::from_i64_rows(&[&[0, 0, 0], &[0, 0, 2], &[-1, 0, 0]]);
    let rh = QMatrix::from_i64_rows(&[&[2, 0, 0], &[0, -2, 0], &[0, 0, 0]]);
    let sl2 = LieAlgebra::sl2();
    let matches_structure_constants = sl2.adjoint().images == vec![rx.clone(), ry.clone(), rh.clone()];
    let brackets_hold = Representation::new(sl2, 3, vec![rx.clone(), ry.clone(), rh.clone()])
        .map(|r| r.validate().is_valid())
        .unwrap_or(false);
    let gauge = sl2_adjoint_gauge();
    let identity = [Gq::from_i64(1), Gq::zero(), Gq::zero(), Gq::from_i64(1)];
    let identity_value = gauge.map(|e| e.eval(&identity)) == QMatrix::identity(3);
    let images = [&rx, &ry, &rh];
    let pde = sl2_fields()
        .into_iter()
        .zip(images)
        .map(|((name, field), rho_v)| {
            let lhs = gauge.map(|e| field.apply(e));
            let rhs = &gauge * &rho_v.map(|c| MPoly::constant(c.clone()));
            let ok = (&lhs - &rhs).entries().iter().all(|e| reduce_sl2(e).is_zero());
            (name, ok)
        })
        .collect();
    let det = crate::linalg::det_laplace(&gauge);
    let unimodular = reduce_sl2(&(det - int(1))).is_zero();
    FixtureReport {
        adjoint: [rx, ry, rh],
        matches_structure_constants,
        brackets_hold,
        identity_value,
        pde,
        unimodular,
    }
}
