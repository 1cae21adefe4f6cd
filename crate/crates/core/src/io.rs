//! JSON encoding of algebras, representations and results (`dmod/v1`).
//!
//! Exact scalars are strings in the canonical `a/b` / `a/b+c/di` form,
//! approximate ones `[re, im]` arrays. Object keys come out sorted, so exact
//! results serialize byte-identically.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::borel::{borel_algebra, BorelAlgebra, ReductionCertificate, VerificationReport};
use crate::dmod::{FixtureReport, HomSpace};
use crate::error::{DmodError, Result};
use crate::laurent::LaurentPoly;
use crate::lie::{BracketSpec, LieAlgebra, Representation, ValidationReport, Violation};
use crate::matrix::{AnyMatrix, Matrix, QMatrix};
use crate::scalar::{Field, Gq, Scalar, C64};
use crate::torus::{AnyLaurentGauge, TorusRep};
use crate::unipotent::{CanonicalClass, EquivalenceCertificate};

pub const SCHEMA: &str = "dmod/v1";

fn perr(msg: impl Into<String>) -> DmodError {
    DmodError::Parse(msg.into())
}

/// Adds the `schema` tag to an object.
pub fn tagged(mut v: Value) -> Value {
    if let Value::Object(m) = &mut v {
        m.insert("schema".into(), Value::String(SCHEMA.into()));
    }
    v
}

fn check_schema(v: &Value) -> Result<()> {
    match v.get("schema") {
        None => Ok(()),
        Some(Value::String(s)) if s == SCHEMA => Ok(()),
        Some(other) => Err(perr(format!("unsupported schema {other}"))),
    }
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| perr(format!("missing field {key:?}")))
}

fn usize_field(v: &Value, key: &str) -> Result<usize> {
    field(v, key)?
        .as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| perr(format!("field {key:?} must be a non-negative integer")))
}

pub fn gq_to_json(q: &Gq) -> Value {
    Value::String(q.to_string())
}

pub fn c64_to_json(z: C64) -> Value {
    json!([z.re, z.im])
}

pub fn scalar_to_json(s: &Scalar) -> Value {
    match s {
        Scalar::Exact(q) => gq_to_json(q),
        Scalar::Approx(z) => c64_to_json(*z),
    }
}

fn field_to_json<F: Field>(x: &F) -> Value {
    scalar_to_json(&x.to_scalar())
}

/// Strings and integers are exact, `[re, im]` arrays approximate.
pub fn scalar_from_json(v: &Value) -> Result<Scalar> {
    match v {
        Value::String(s) => Ok(Scalar::Exact(s.parse()?)),
        Value::Number(n) => n
            .as_i64()
            .map(|k| Scalar::Exact(Gq::from_i64(k)))
            .ok_or_else(|| perr(format!("non-integer number {n}; write exact values as strings"))),
        Value::Array(a) if a.len() == 2 => {
            let re = a[0].as_f64().ok_or_else(|| perr("approximate scalar needs numbers"))?;
            let im = a[1].as_f64().ok_or_else(|| perr("approximate scalar needs numbers"))?;
            Ok(Scalar::Approx(C64::new(re, im)))
        }
        other => Err(perr(format!("not a scalar: {other}"))),
    }
}

pub fn exact_from_json(v: &Value) -> Result<Gq> {
    match scalar_from_json(v)? {
        Scalar::Exact(q) => Ok(q),
        Scalar::Approx(_) => Err(perr("approximate entries are not accepted here; use exact strings")),
    }
}

pub fn matrix_to_json<F: Field>(m: &Matrix<F>) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|r| Value::Array(m.row(r).iter().map(field_to_json).collect()))
            .collect(),
    )
}

pub fn any_matrix_to_json(m: &AnyMatrix) -> Value {
    match m {
        AnyMatrix::Exact(q) => matrix_to_json(q),
        AnyMatrix::Approx(c) => matrix_to_json(c),
    }
}

/// An exact matrix from a list of rows; `expect` fixes the square size.
pub fn matrix_from_json(v: &Value, expect: Option<usize>) -> Result<QMatrix> {
    let rows = v.as_array().ok_or_else(|| perr("matrix must be a list of rows"))?;
    let parsed: Vec<Vec<Gq>> = rows
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| perr("matrix row must be a list"))?
                .iter()
                .map(exact_from_json)
                .collect()
        })
        .collect::<Result<_>>()?;
    let m = if parsed.is_empty() {
        QMatrix::zeros(0, 0)
    } else {
        Matrix::from_rows(parsed)?
    };
    if let Some(n) = expect {
        if m.rows() != n || m.cols() != n {
            return Err(DmodError::RankMismatch(n, m.rows().max(m.cols())));
        }
    }
    Ok(m)
}

fn matrices_from_json(v: &Value, n: usize) -> Result<Vec<QMatrix>> {
    v.as_array()
        .ok_or_else(|| perr("\"matrices\" must be a list"))?
        .iter()
        .map(|m| matrix_from_json(m, Some(n)))
        .collect()
}

pub fn lie_algebra_from_json(v: &Value) -> Result<LieAlgebra> {
    check_schema(v)?;
    let dim = usize_field(v, "dim")?;
    let names: Vec<String> = match v.get("basis") {
        Some(b) => b
            .as_array()
            .ok_or_else(|| perr("\"basis\" must be a list of names"))?
            .iter()
            .map(|s| s.as_str().map(String::from).ok_or_else(|| perr("basis names must be strings")))
            .collect::<Result<_>>()?,
        None => (1..=dim).map(|k| format!("x{k}")).collect(),
    };
    if names.len() != dim {
        return Err(perr(format!("{} basis names for dimension {dim}", names.len())));
    }
    let mut brackets = Vec::new();
    if let Some(bs) = v.get("brackets") {
        for b in bs.as_array().ok_or_else(|| perr("\"brackets\" must be a list"))? {
            let i = usize_field(b, "i")?;
            let j = usize_field(b, "j")?;
            let c = field(b, "c")?
                .as_object()
                .ok_or_else(|| perr("bracket \"c\" must map indices to scalars"))?;
            let coeffs = c
                .iter()
                .map(|(k, val)| {
                    let k: usize = k.parse().map_err(|_| perr(format!("bad basis index {k:?}")))?;
                    Ok((k, exact_from_json(val)?))
                })
                .collect::<Result<_>>()?;
            brackets.push(BracketSpec { i, j, coeffs });
        }
    }
    LieAlgebra::new(names, brackets)
}

pub fn lie_algebra_to_json(alg: &LieAlgebra) -> Value {
    let brackets: Vec<Value> = alg
        .structure()
        .iter()
        .map(|(&(i, j), row)| {
            let c: Map<String, Value> = row.iter().map(|(k, v)| (k.to_string(), gq_to_json(v))).collect();
            json!({"i": i, "j": j, "c": c})
        })
        .collect();
    json!({"dim": alg.dim(), "basis": alg.names(), "brackets": brackets})
}

/// Reads a JSON file.
pub fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| perr(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| perr(format!("{}: {e}", path.display())))
}

/// `"algebra"` is an inline object or a path relative to `base`.
pub fn representation_from_json(v: &Value, base: Option<&Path>) -> Result<Representation> {
    check_schema(v)?;
    let alg = match field(v, "algebra")? {
        Value::String(p) => {
            let path = base.map_or_else(|| PathBuf::from(p), |b| b.join(p));
            lie_algebra_from_json(&read_json(&path)?)?
        }
        obj => lie_algebra_from_json(obj)?,
    };
    let rank = usize_field(v, "rank")?;
    let images = matrices_from_json(field(v, "matrices")?, rank)?;
    Representation::new(alg, rank, images)
}

pub fn representation_to_json(rho: &Representation) -> Value {
    json!({
        "algebra": lie_algebra_to_json(&rho.algebra),
        "rank": rho.rank,
        "matrices": rho.images.iter().map(matrix_to_json).collect::<Vec<_>>(),
    })
}

pub fn torus_rep_from_json(v: &Value) -> Result<TorusRep> {
    check_schema(v)?;
    let l = usize_field(v, "l")?;
    let rank = usize_field(v, "rank")?;
    let ms = matrices_from_json(field(v, "matrices")?, rank)?;
    if ms.len() != l {
        return Err(perr(format!("{} matrices for l = {l}", ms.len())));
    }
    TorusRep::new(rank, ms)
}

pub fn torus_rep_to_json(t: &TorusRep) -> Value {
    json!({
        "l": t.l(),
        "rank": t.rank,
        "matrices": t.matrices.iter().map(matrix_to_json).collect::<Vec<_>>(),
    })
}

/// `{"l", "rank", "images": {"E_i_j": matrix}}`, 1-based, missing images zero.
pub fn borel_rep_from_json(v: &Value) -> Result<(BorelAlgebra, Representation)> {
    check_schema(v)?;
    let l = usize_field(v, "l")?;
    let rank = usize_field(v, "rank")?;
    let borel = borel_algebra(l)?;
    let mut images = vec![QMatrix::zeros(rank, rank); borel.index.len()];
    let given = field(v, "images")?
        .as_object()
        .ok_or_else(|| perr("\"images\" must map E_i_j to matrices"))?;
    for (name, m) in given {
        let k = borel
            .algebra
            .names()
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| perr(format!("{name:?} is not a basis element of the Borel algebra")))?;
        images[k] = matrix_from_json(m, Some(rank))?;
    }
    let rho = Representation::new(borel.algebra.clone(), rank, images)?;
    Ok((borel, rho))
}

pub fn borel_rep_to_json(borel: &BorelAlgebra, rho: &Representation) -> Value {
    let images: Map<String, Value> = borel
        .algebra
        .names()
        .iter()
        .zip(&rho.images)
        .filter(|(_, m)| !m.is_zero())
        .map(|(n, m)| (n.clone(), matrix_to_json(m)))
        .collect();
    json!({"l": borel.l, "rank": rho.rank, "images": images})
}

/// A parsed input file of any supported kind.
#[derive(Clone, Debug)]
pub enum Document {
    LieAlgebra(LieAlgebra),
    Representation(Representation),
    Torus(TorusRep),
    Borel(BorelAlgebra, Representation),
}

/// Recognizes the kind by its fields: `images` (Borel), `algebra`
/// (representation), `l` with `matrices` (torus), `dim` (Lie algebra).
pub fn document_from_json(v: &Value, base: Option<&Path>) -> Result<Document> {
    if v.get("images").is_some() {
        let (b, r) = borel_rep_from_json(v)?;
        Ok(Document::Borel(b, r))
    } else if v.get("algebra").is_some() {
        Ok(Document::Representation(representation_from_json(v, base)?))
    } else if v.get("l").is_some() && v.get("matrices").is_some() {
        Ok(Document::Torus(torus_rep_from_json(v)?))
    } else if v.get("dim").is_some() {
        Ok(Document::LieAlgebra(lie_algebra_from_json(v)?))
    } else {
        Err(perr("unrecognized document: expected a Lie algebra, representation, torus_rep or borel_rep"))
    }
}

pub fn read_document(path: &Path) -> Result<Document> {
    document_from_json(&read_json(path)?, path.parent())
}

fn mode(exact: bool) -> &'static str {
    if exact {
        "exact"
    } else {
        "approx"
    }
}

pub fn validation_to_json(report: &ValidationReport) -> Value {
    let failures: Vec<Value> = report
        .failures
        .iter()
        .map(|f| match *f {
            Violation::Jacobi(i, j, k) => json!({"kind": "jacobi", "indices": [i, j, k]}),
            Violation::Bracket(i, j) => json!({"kind": "bracket", "indices": [i, j]}),
        })
        .collect();
    json!({"valid": report.is_valid(), "failures": failures})
}

fn points_to_json(points: &[Vec<Scalar>]) -> Value {
    Value::Array(
        points
            .iter()
            .map(|p| Value::Array(p.iter().map(scalar_to_json).collect()))
            .collect(),
    )
}

pub fn canonical_class_to_json(c: &CanonicalClass) -> Value {
    json!({
        "l": c.l,
        "n": c.n,
        "points": points_to_json(&c.points),
        "mode": mode(c.is_exact()),
    })
}

pub fn certificate_to_json(c: &EquivalenceCertificate) -> Value {
    let mut m = Map::new();
    m.insert("verdict".into(), json!(c.verdict));
    m.insert("mode".into(), json!(mode(c.exact)));
    m.insert(
        "conjugator".into(),
        c.conjugator.as_ref().map_or(Value::Null, any_matrix_to_json),
    );
    if let Some(t) = c.trace_crosscheck {
        m.insert("trace_crosscheck".into(), json!(t));
    }
    if let Some(r) = c.residual {
        m.insert("residual".into(), json!(r));
    }
    if let Some(b) = c.randomized_failure_bound {
        m.insert("randomized_failure_bound".into(), json!(b));
    }
    Value::Object(m)
}

fn laurent_to_json<F: Field>(p: &LaurentPoly<F>, l: usize) -> Value {
    Value::Array(
        p.terms()
            .map(|(e, c)| {
                let mut exp = e.clone();
                exp.resize(l, 0);
                json!({"exp": exp, "coeff": field_to_json(c)})
            })
            .collect(),
    )
}

pub fn laurent_gauge_to_json(g: &AnyLaurentGauge) -> Value {
    fn entries<F: Field>(m: &Matrix<LaurentPoly<F>>, l: usize) -> Value {
        Value::Array(
            (0..m.rows())
                .map(|r| Value::Array(m.row(r).iter().map(|p| laurent_to_json(p, l)).collect()))
                .collect(),
        )
    }
    match g {
        AnyLaurentGauge::Exact(x) => json!({"l": x.l, "mode": "exact", "entries": entries(&x.entries, x.l)}),
        AnyLaurentGauge::Approx(x) => json!({"l": x.l, "mode": "approx", "entries": entries(&x.entries, x.l)}),
    }
}

pub fn hom_space_to_json(h: &HomSpace) -> Value {
    let matches: Vec<Value> = h
        .block_matches
        .iter()
        .map(|m| {
            json!({
                "functional": m.functional.iter().map(scalar_to_json).collect::<Vec<_>>(),
                "mult_source": m.mult_source,
                "mult_target": m.mult_target,
            })
        })
        .collect();
    let exact = h.initial_value_basis.iter().all(AnyMatrix::is_exact);
    json!({
        "dimension": h.dimension,
        "matches": matches,
        "initial_value_basis": h.initial_value_basis.iter().map(any_matrix_to_json).collect::<Vec<_>>(),
        "mode": mode(exact),
    })
}

pub fn trace_table_to_json(table: &BTreeMap<Vec<usize>, Gq>, max_len: usize) -> Value {
    let rows: Vec<Value> = table
        .iter()
        .map(|(w, t)| json!({"word": w, "trace": gq_to_json(t)}))
        .collect();
    json!({"max_len": max_len, "traces": rows, "mode": "exact"})
}

pub fn verification_to_json(r: &VerificationReport) -> Value {
    json!({
        "samples": r.samples,
        "residuals": r.residuals,
        "max_residual": r.max_residual,
        "tolerance": r.tolerance,
        "passed": r.passed(),
        "mode": "approx",
    })
}

/// 1-based `(i, k)` with the exponent of each diagonal coordinate.
pub fn reduction_certificate_to_json(c: &ReductionCertificate) -> Value {
    let factors: Vec<Value> = c
        .factors
        .iter()
        .map(|f| json!({"i": f.i + 1, "k": f.k + 1, "diagonal_exponents": f.diagonal_exponents}))
        .collect();
    json!({"factors": factors, "relations_verified": c.relations_verified})
}

pub fn fixture_to_json(r: &FixtureReport) -> Value {
    let pde: Map<String, Value> = r.pde.iter().map(|(n, ok)| (n.clone(), json!(ok))).collect();
    json!({
        "adjoint": {
            "X": matrix_to_json(&r.adjoint[0]),
            "Y": matrix_to_json(&r.adjoint[1]),
            "H": matrix_to_json(&r.adjoint[2]),
        },
        "matches_structure_constants": r.matches_structure_constants,
        "brackets_hold": r.brackets_hold,
        "identity_value": r.identity_value,
        "pde": pde,
        "unimodular": r.unimodular,
        "passed": r.passed(),
        "mode": "exact",
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algebra_round_trip() {
        for alg in [LieAlgebra::heisenberg(), LieAlgebra::filiform4(), LieAlgebra::sl2()] {
            let v = lie_algebra_to_json(&alg);
            assert_eq!(lie_algebra_from_json(&v).unwrap(), alg);
        }
    }

    #[test]
    fn representation_round_trip_is_byte_stable() {
        let rho = LieAlgebra::heisenberg().adjoint();
        let v = tagged(representation_to_json(&rho));
        let text = serde_json::to_string(&v).unwrap();
        let back = representation_from_json(&serde_json::from_str(&text).unwrap(), None).unwrap();
        assert_eq!(back, rho);
        assert_eq!(serde_json::to_string(&tagged(representation_to_json(&back))).unwrap(), text);
    }

    #[test]
    fn reversed_brackets_are_negated() {
        let v = json!({"dim": 3, "basis": ["x", "y", "z"], "brackets": [{"i": 1, "j": 0, "c": {"2": "-1"}}]});
        assert_eq!(lie_algebra_from_json(&v).unwrap(), LieAlgebra::heisenberg());
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(scalar_from_json(&json!(0.5)).is_err());
        assert!(exact_from_json(&json!([1.0, 0.0])).is_err());
        assert!(lie_algebra_from_json(&json!({"dim": 2, "schema": "dmod/v2"})).is_err());
        let v = json!({"algebra": {"dim": 1}, "rank": 2, "matrices": [[["1"]]]});
        assert!(representation_from_json(&v, None).is_err());
    }

    #[test]
    fn borel_round_trip() {
        let b = borel_algebra(2).unwrap();
        let rho = b.defining();
        let v = borel_rep_to_json(&b, &rho);
        let (b2, r2) = borel_rep_from_json(&v).unwrap();
        assert_eq!(b2, b);
        assert_eq!(r2, rho);
        assert!(matches!(document_from_json(&v, None).unwrap(), Document::Borel(..)));
    }
}
