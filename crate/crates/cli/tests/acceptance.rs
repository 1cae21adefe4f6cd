//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

#[path = "../../core/tests/common/mod.rs"]
mod oracles;

use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use dmod_core::bch::{invariant_derivative, Bch};
use dmod_core::borel::{
    borel_algebra, borel_gauge, conjugate_exp_identity, conjugate_power_identity, diagonal_reduction,
    verify_intertwining, Factor, FD_TOLERANCE,
};
use dmod_core::dmod::{hom_dimension, sl2_adjoint_fixture, GroupKind, InvariantDModule};
use dmod_core::generate::{Generator, NilpotentFamily};
use dmod_core::intertwine::intertwiner_space;
use dmod_core::laurent::LaurentPoly;
use dmod_core::lie::{LieAlgebra, Representation};
use dmod_core::linalg::{char_poly, in_power_span, jordan_chevalley};
use dmod_core::matrix::AnyMatrix;
use dmod_core::torus::{laurent_gauge, multi_log, torus_gauge_equivalent, AnyLaurentGauge, TorusRep};
use dmod_core::unipotent::{
    canonical_class, gauge_equivalent, gauge_to_semisimple, semisimplify, trace_tables_equal,
};
use dmod_core::{CMatrix, Gq, Matrix, QMatrix, Ring, ToleranceConfig};
use oracles::*;

type Outcome = Result<String, String>;

fn cfg() -> ToleranceConfig {
    ToleranceConfig::default()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn jordan_chevalley_suite() -> Outcome {
    let mut g = Generator::new(101);
    let c = cfg();
    let mut known = 0;
    for case in 0..200 {
        let n = 2 + case % 5;
        let (m, expected) = if case % 2 == 0 {
            let (m, s, nil) = g.known_jordan(n);
            known += 1;
            (m, Some((s, nil)))
        } else {
            (g.jc_matrix(n), None)
        };
        let jp = jordan_chevalley(&m, &c).map_err(|e| format!("case {case}: {e}"))?;
        ensure(&jp.s + &jp.n == m, || format!("case {case}: s + n != M"))?;
        ensure(jp.s.commutes_with(&jp.n), || format!("case {case}: [s, n] != 0"))?;
        ensure(jp.n.pow(n as u32).is_zero(), || format!("case {case}: n^n != 0"))?;
        let sqf = char_poly(&m).map_err(|e| e.to_string())?.squarefree_part();
        ensure(sqf.eval_matrix(&jp.s).is_zero(), || format!("case {case}: minimal polynomial of s not squarefree"))?;
        ensure(in_power_span(&m, &jp.s, 0.0), || format!("case {case}: s not a polynomial in M"))?;
        if let Some((s, nil)) = expected {
            ensure(jp.s == s && jp.n == nil, || format!("case {case}: known answer differs"))?;
        }
    }
    Ok(format!("200 matrices (n = 2..6, {known} known-answer), zero failures"))
}

fn ad_nilpotent_commutes_with_semisimple_part() -> Outcome {
    let mut g = Generator::new(102);
    let c = cfg();
    let mut nontrivial = 0;
    for case in 0..100 {
        let n = 2 + case % 3;
        let (a, b, k) = g.ad_kernel_pair(n);
        let mut ad = b.clone();
        for _ in 0..k {
            ad = a.commutator(&ad);
        }
        ensure(ad.is_zero(), || format!("case {case}: construction violates ad^k(B) = 0"))?;
        if !a.commutes_with(&b) {
            nontrivial += 1;
        }
        let s = jordan_chevalley(&a, &c).map_err(|e| e.to_string())?.s;
        ensure(s.commutes_with(&b), || format!("case {case}: [A_s, B] != 0"))?;
    }
    Ok(format!("100 pairs ({nontrivial} with [A, B] != 0), exact"))
}

const FAMILIES: [NilpotentFamily; 5] = [
    NilpotentFamily::Heisenberg,
    NilpotentFamily::Abelian(1),
    NilpotentFamily::Abelian(2),
    NilpotentFamily::Abelian(3),
    NilpotentFamily::Filiform4,
];

fn h3_faithful() -> Representation {
    Representation::new(
        LieAlgebra::heisenberg(),
        3,
        vec![QMatrix::unit(3, 0, 1), QMatrix::unit(3, 1, 2), QMatrix::unit(3, 0, 2)],
    )
    .expect("valid")
}

fn three_way(r1: &Representation, r2: &Representation) -> Result<bool, String> {
    let c = cfg();
    let verdict = gauge_equivalent(r1, r2, &c).map_err(|e| e.to_string())?.verdict;
    let classes = canonical_class(r1, &c).map_err(|e| e.to_string())?
        == canonical_class(r2, &c).map_err(|e| e.to_string())?;
    let n = r1.rank;
    let traces = trace_tables_equal(&r1.images, &r2.images, n * n);
    ensure(verdict == classes && verdict == traces, || {
        format!("verdict {verdict}, classes {classes}, traces {traces}")
    })?;
    Ok(verdict)
}

fn unipotent_classification() -> Outcome {
    let mut g = Generator::new(103);
    let zero = Representation::zero(LieAlgebra::heisenberg(), 3);
    ensure(three_way(&h3_faithful(), &zero)?, || "h3 faithful vs zero should be equivalent".into())?;
    let (mut pos, mut neg) = (1, 0);
    for case in 0..100 {
        let fam = FAMILIES[case % FAMILIES.len()];
        let rank = 1 + (case / FAMILIES.len()) % 4;
        let eq = case % 3 != 0;
        let (r1, r2) = g.nilpotent_pair(fam, rank, eq);
        let v = three_way(&r1, &r2).map_err(|e| format!("case {case} ({fam:?}, rank {rank}): {e}"))?;
        ensure(v == eq, || format!("case {case}: verdict {v}, constructed as {eq}"))?;
        if v {
            pos += 1;
        } else {
            neg += 1;
        }
    }
    ensure(neg >= 20, || format!("only {neg} negative instances"))?;
    Ok(format!("101 pairs ({pos} equivalent, {neg} inequivalent), three-way agreement at max_len = n^2"))
}

fn polynomial_gauge_verification() -> Outcome {
    let mut g = Generator::new(104);
    let c = cfg();
    let mut checks = 0usize;
    for case in 0..50 {
        let fam = FAMILIES[case % FAMILIES.len()];
        let rank = 1 + case % 4;
        let rho = g.nilpotent_rep(fam, rank);
        let s = semisimplify(&rho, &c).map_err(|e| e.to_string())?;
        let gauge = gauge_to_semisimple(&rho, &c).map_err(|e| e.to_string())?;
        let alg = &rho.algebra;
        let m = alg.dim();
        let bch = Bch::new(alg).map_err(|e| e.to_string())?;
        let fields: Vec<_> = (0..m).map(|v| bch.invariant_field(&alg.basis_vector(v))).collect();
        let derived: Vec<Matrix<_>> = fields.iter().map(|f| gauge.entries.map(|e| f.apply(e))).collect();
        for pt in 0..100 {
            let p: Vec<Gq> = (0..m).map(|_| g.rational(4)).collect();
            let x = gauge.eval(&p);
            for v in 0..m {
                let lhs = if pt == 0 {
                    let basis = alg.basis_vector(v);
                    let mut out = QMatrix::zeros(rank, rank);
                    for r in 0..rank {
                        for col in 0..rank {
                            let d = invariant_derivative(gauge.entries.get(r, col), &basis, &p, alg)
                                .map_err(|e| e.to_string())?;
                            out.set(r, col, d);
                        }
                    }
                    out
                } else {
                    derived[v].map(|e| e.eval(&p))
                };
                let rhs = &(&x * &rho.images[v]) - &(&s.images[v] * &x);
                ensure(lhs == rhs, || format!("case {case} point {pt} basis {v}: identity fails"))?;
                checks += 1;
            }
        }
    }
    Ok(format!("50 reps x 100 points ({checks} matrix identities), exact"))
}

fn rel(a: &CMatrix, b: &CMatrix) -> f64 {
    let scale = b.entries().iter().map(|z| z.norm()).fold(1.0, f64::max);
    max_diff(a, b) / scale
}

fn torus_suite() -> Outcome {
    let c = cfg();
    let mut g = Generator::new(105);
    let mut worst: f64 = 0.0;
    for case in 0..100 {
        let (n, l) = (1 + case % 4, 1 + case % 3);
        let b = g.invertible_tuple(n, l);
        let logs = multi_log(&b, &c).map_err(|e| format!("(a) case {case}: {e}"))?;
        for (bi, li) in b.iter().zip(&logs) {
            worst = worst.max(rel(&taylor_exp(&li.to_c64()), &bi.to_c64()));
        }
    }
    ensure(worst < 1e-9, || format!("(a) round-trip error {worst:e}"))?;
    let (mut instances, mut positive) = (0, 0);
    for n in 1..=3 {
        for l in 1..=2 {
            for case in 0..25 {
                let (a, b) = g.torus_pair(n, l);
                let (r1, r2) = (
                    TorusRep::new(n, a.clone()).map_err(|e| e.to_string())?,
                    TorusRep::new(n, b.clone()).map_err(|e| e.to_string())?,
                );
                let cert = torus_gauge_equivalent(&r1, &r2, &c).map_err(|e| e.to_string())?;
                let oracle = oracle_torus_conjugate(&a, &b);
                ensure(cert.verdict == oracle, || {
                    format!("(b) n={n} l={l} case {case}: verdict {} vs oracle {oracle}", cert.verdict)
                })?;
                instances += 1;
                if !cert.verdict {
                    continue;
                }
                positive += 1;
                let conj = cert.conjugator.ok_or("(c) positive verdict without conjugator")?;
                let gauge = laurent_gauge(&r1, &r2, &conj, &c).map_err(|e| format!("(c) {e}"))?;
                let AnyLaurentGauge::Exact(x) = gauge else {
                    return Err(format!("(c) n={n} l={l} case {case}: gauge not exact"));
                };
                let lift = |m: &QMatrix| m.map(|v| LaurentPoly::constant(v.clone()));
                for i in 0..l {
                    let rhs = &(&x.entries * &lift(&a[i])) - &(&lift(&b[i]) * &x.entries);
                    ensure(x.euler_derivative(i) == rhs, || format!("(c) n={n} l={l} case {case}: z_i d_i X differs"))?;
                }
                ensure(!x.determinant().terms().all(|(_, v)| v.is_zero()), || "(c) singular gauge".into())?;
            }
        }
    }
    Ok(format!(
        "(a) 100 tuples, max error {worst:.1e}; (b) {instances} instances agree with oracle; (c) {positive} Laurent gauges exact"
    ))
}

fn borel_suite() -> Outcome {
    let c = cfg();
    let mut g = Generator::new(106);
    let (mut reps, mut controls, mut worst) = (0, 0, 0.0f64);
    for l in 2..=3 {
        let b = borel_algebra(l).map_err(|e| e.to_string())?;
        for case in 0..20 {
            let rho = g.borel_rep(&b, 3);
            if !rho.validate().is_valid() {
                return Err(format!("l={l} case {case}: generated rep invalid"));
            }
            let target = diagonal_reduction(&b, &rho).map_err(|e| e.to_string())?;
            let gauge = borel_gauge(&b, &rho).map_err(|e| e.to_string())?;
            ensure(gauge.certificate.relations_verified, || format!("l={l} case {case}: relations"))?;
            let run = ToleranceConfig { rng_seed: case as u64, ..c.clone() };
            let report = verify_intertwining(&b, &|p: &CMatrix| gauge.eval_c64(p), &rho, &target, 100, &run)
                .map_err(|e| e.to_string())?;
            worst = worst.max(report.max_residual);
            ensure(report.max_residual < FD_TOLERANCE, || {
                format!("l={l} case {case}: residual {:e}", report.max_residual)
            })?;
            reps += 1;
            for (pos, f) in gauge.factors.iter().enumerate() {
                if let Factor::OffDiagonal(i, k) = *f {
                    if gauge.image(i, k).is_zero() {
                        continue;
                    }
                    let broken = gauge.without_factor(pos);
                    let r = verify_intertwining(&b, &|p: &CMatrix| broken.eval_c64(p), &rho, &target, 20, &run)
                        .map_err(|e| e.to_string())?;
                    ensure(!r.passed(), || format!("l={l} case {case}: corrupted gauge not flagged"))?;
                    controls += 1;
                }
            }
        }
    }
    let mut identities = 0;
    for _ in 0..40 {
        let (a, bb) = (g.int(-3, 3), g.int(-3, 3));
        let x = QMatrix::from_i64_rows(&[&[a, 0], &[0, bb]]);
        let y = QMatrix::unit(2, 0, 1).scale(&g.nonzero_rational(3));
        let t = g.nonzero_rational(3);
        let (lhs, rhs) = conjugate_power_identity(&x, &y, a - bb, &t, &c)
            .map_err(|e| e.to_string())?
            .ok_or("power form not exact")?;
        ensure(lhs == rhs, || "power-form identity fails".into())?;
        identities += 1;
    }
    for _ in 0..10 {
        let x = QMatrix::unit(3, 0, 2).scale(&g.rational(3));
        let y = QMatrix::unit(3, 0, 1).scale(&g.rational(3));
        let (lhs, rhs) = conjugate_exp_identity(&x, &y, &Gq::zero(), &c).map_err(|e| e.to_string())?;
        ensure(matches!((&lhs, &rhs), (AnyMatrix::Exact(_), AnyMatrix::Exact(_))) && lhs == rhs, || {
            "nilpotent identity fails".into()
        })?;
        identities += 1;
    }
    Ok(format!(
        "{reps} reps, max residual {worst:.1e} < {FD_TOLERANCE:e}; {identities} exact conjugation identities; {controls} corrupted gauges flagged"
    ))
}

fn sl2_fixture() -> Outcome {
    let f = sl2_adjoint_fixture();
    ensure(f.brackets_hold && f.matches_structure_constants, || "brackets".into())?;
    for (name, ok) in &f.pde {
        ensure(*ok, || format!("PDE for {name} fails"))?;
    }
    ensure(f.identity_value, || "gauge at identity != I3".into())?;
    ensure(f.passed(), || "fixture".into())?;
    Ok("brackets exact, 3 PDEs hold modulo xw - yz - 1, value I3 at identity".into())
}

fn module(rep: &Representation) -> Result<InvariantDModule, String> {
    InvariantDModule::new(rep.clone(), GroupKind::Unipotent).map_err(|e| e.to_string())
}

fn hom_oracle() -> Outcome {
    let c = cfg();
    let line = |m: QMatrix| Representation::new(LieAlgebra::abelian(1), m.rows(), vec![m]).expect("valid");
    let jordan = line(QMatrix::from_i64_rows(&[&[0, 1], &[0, 0]]));
    let zero = line(QMatrix::from_i64_rows(&[&[0]]));
    let one = line(QMatrix::from_i64_rows(&[&[1]]));
    let d = hom_dimension(&module(&jordan)?, &module(&zero)?, &c).map_err(|e| e.to_string())?.dimension;
    ensure(d == 2, || format!("printed example: dimension {d}, expected 2"))?;
    let d = hom_dimension(&module(&one)?, &module(&zero)?, &c).map_err(|e| e.to_string())?.dimension;
    ensure(d == 0, || format!("printed example: dimension {d}, expected 0"))?;
    let mut g = Generator::new(108);
    let mut instances = 2;
    for l in 1..=2 {
        for n1 in 1..=3 {
            for n2 in 1..=3 {
                for case in 0..10 {
                    let fam = NilpotentFamily::Abelian(l);
                    let (r1, r2) = if case % 2 == 0 {
                        (g.nilpotent_rep(fam, n1), g.nilpotent_rep(fam, n2))
                    } else {
                        let r1 = g.nilpotent_rep(fam, n1);
                        let mut r2 = g.nilpotent_rep(fam, n2);
                        // share a character so the Hom space is often nonzero
                        if n1 <= n2 {
                            let s1 = semisimplify(&r1, &c).map_err(|e| e.to_string())?;
                            let pad = QMatrix::zeros(n2 - n1, n2 - n1);
                            r2.images = s1.images.iter().map(|m| QMatrix::block_diag(&[m.clone(), pad.clone()])).collect();
                        }
                        (r1, r2)
                    };
                    let h = hom_dimension(&module(&r1)?, &module(&r2)?, &c).map_err(|e| e.to_string())?;
                    let (s1, s2) = (semisimplify(&r1, &c).map_err(|e| e.to_string())?, semisimplify(&r2, &c).map_err(|e| e.to_string())?);
                    let brute = intertwiner_space(&s1.images, &s2.images, 0.0).map_err(|e| e.to_string())?.len();
                    let c64 = |ms: &[QMatrix]| ms.iter().map(QMatrix::to_c64).collect::<Vec<_>>();
                    let oracle = complex_intertwiners(&c64(&s1.images), &c64(&s2.images), 1e-9).len();
                    ensure(h.dimension == brute && brute == oracle, || {
                        format!("l={l} n=({n1},{n2}) case {case}: {} vs {brute} vs {oracle}", h.dimension)
                    })?;
                    instances += 1;
                }
            }
        }
    }
    Ok(format!("{instances} abelian instances, including dims 2 and 0 examples"))
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn cli_matrix() -> Vec<Vec<String>> {
    let d = |s: &str| data(s);
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").display().to_string();
    let mut runs: Vec<Vec<String>> = Vec::new();
    for f in [
        "h3.json", "heis.json", "bad_bracket.json", "line.json", "jordan2.json", "torus_half.json",
        "borel_defining2.json", "borel_twisted3.json",
    ] {
        runs.push(vec!["check".into(), d(f)]);
    }
    for f in ["heis.json", "h3_faithful.json", "jordan2.json", "zero_rank3.json"] {
        runs.push(vec!["canonical".into(), d(f)]);
    }
    runs.push(vec!["canonical".into(), dir]);
    for (a, b) in [
        ("h3_faithful.json", "zero_rank3.json"),
        ("h3_shifted.json", "zero_rank3.json"),
        ("heis.json", "zero_rank3.json"),
    ] {
        runs.push(vec!["equiv".into(), d(a), d(b)]);
    }
    for (a, b) in [("torus_diag01.json", "torus_zero2.json"), ("torus_zero1.json", "torus_half.json")] {
        runs.push(vec!["torus-equiv".into(), d(a), d(b)]);
    }
    for f in ["borel_defining2.json", "borel_twisted3.json"] {
        runs.push(vec!["borel-reduce".into(), d(f), "--samples".into(), "100".into()]);
    }
    for (a, b) in [("jordan2.json", "zero_rank1.json"), ("one_rank1.json", "zero_rank1.json")] {
        runs.push(vec!["hom-dim".into(), d(a), d(b)]);
    }
    runs.push(vec!["traces".into(), d("jordan2.json")]);
    runs.push(vec!["--max-word-len".into(), "3".into(), "traces".into(), d("heis.json")]);
    runs.push(vec!["fixture-sl2".into()]);
    runs.push(vec!["--format".into(), "text".into(), "fixture-sl2".into()]);
    runs
}

fn run_matrix(seed: &str) -> Result<Vec<(Option<i32>, Vec<u8>)>, String> {
    cli_matrix()
        .iter()
        .map(|args| {
            let out = Command::new(env!("CARGO_BIN_EXE_dmod"))
                .arg("--seed")
                .arg(seed)
                .args(args)
                .env_remove("DMOD_SEED")
                .output()
                .map_err(|e| format!("{args:?}: {e}"))?;
            Ok((out.status.code(), out.stdout))
        })
        .collect()
}

fn determinism() -> Outcome {
    let (a, b) = (run_matrix("17")?, run_matrix("17")?);
    let names = cli_matrix();
    for ((x, y), args) in a.iter().zip(&b).zip(&names) {
        ensure(x == y, || format!("{args:?}: outputs differ between runs"))?;
        ensure(!x.1.is_empty(), || format!("{args:?}: empty output"))?;
    }
    Ok(format!("{} CLI invocations byte-identical across two runs with --seed 17", a.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("Jordan-Chevalley decomposition", jordan_chevalley_suite),
        ("ad-nilpotent pairs commute with the semisimple part", ad_nilpotent_commutes_with_semisimple_part),
        ("unipotent classification three-way agreement", unipotent_classification),
        ("polynomial gauge intertwines exactly", polynomial_gauge_verification),
        ("torus classification and Laurent gauges", torus_suite),
        ("Borel product gauge", borel_suite),
        ("SL2 adjoint fixture", sl2_fixture),
        ("Hom dimension oracle", hom_oracle),
        ("CLI determinism", determinism),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let result = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    let total = start.elapsed().as_secs_f64();
    println!("acceptance: {} of 9 criteria passed in {total:.1}s", 9 - failed);
    if total > 300.0 {
        println!("FAIL time budget: {total:.1}s exceeds 300s");
        failed += 1;
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
