//! Seeded instance generators for tests and benchmarks.
//!
//! Commuting tuples are built as `g · (block-diagonal tuple) · g⁻¹` with a
//! random integer `g` of determinant one, so every instance stays exact.
//! Representations of nilpotent algebras are direct sums of upper-triangular
//! blocks (character plus nilpotent part), then conjugated.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::borel::BorelAlgebra;
use crate::lie::{LieAlgebra, Representation};
use crate::matrix::{Matrix, QMatrix};
use crate::scalar::{Gq, Ring};

/// Which test algebra a nilpotent representation lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NilpotentFamily {
    Abelian(usize),
    Heisenberg,
    Filiform4,
}

impl NilpotentFamily {
    pub fn algebra(self) -> LieAlgebra {
        match self {
            NilpotentFamily::Abelian(m) => LieAlgebra::abelian(m),
            NilpotentFamily::Heisenberg => LieAlgebra::heisenberg(),
            NilpotentFamily::Filiform4 => LieAlgebra::filiform4(),
        }
    }

    /// Dimension of the abelianization.
    pub fn abelian_rank(self) -> usize {
        match self {
            NilpotentFamily::Abelian(m) => m,
            _ => 2,
        }
    }
}

/// Indecomposable building block: the character on the abelianization
/// plus nilpotent data.
#[derive(Clone, Debug)]
pub struct Block {
    pub character: Vec<Gq>,
    pub size: usize,
    pub nilpotent: Vec<Gq>,
}

pub struct Generator {
    rng: ChaCha8Rng,
}

fn jordan_shift(n: usize) -> QMatrix {
    QMatrix::from_fn(n, n, |r, c| if c == r + 1 { Gq::one() } else { Gq::zero() })
}

fn unit(n: usize, i: usize, j: usize) -> QMatrix {
    QMatrix::unit(n, i, j)
}

impl Generator {
    pub fn new(seed: u64) -> Self {
        Generator { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }

    pub fn coin(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    pub fn pick<T: Clone>(&mut self, items: &[T]) -> T {
        items.choose(&mut self.rng).expect("nonempty choice").clone()
    }

    /// Rational with numerator in `[-k, k]` and denominator in `1..=3`.
    pub fn rational(&mut self, k: i64) -> Gq {
        let den = self.int(1, 3);
        Gq::ratio(self.int(-k, k), den)
    }

    pub fn nonzero_rational(&mut self, k: i64) -> Gq {
        loop {
            let q = self.rational(k);
            if !q.is_zero() {
                return q;
            }
        }
    }

    /// Gaussian integer with both parts in `[-k, k]`.
    pub fn gaussian(&mut self, k: i64) -> Gq {
        Gq::complex(Gq::from_i64(self.int(-k, k)), Gq::from_i64(self.int(-k, k)))
    }

    pub fn int_matrix(&mut self, rows: usize, cols: usize, k: i64) -> QMatrix {
        let entries = (0..rows * cols).map(|_| Gq::from_i64(self.int(-k, k))).collect();
        QMatrix::new(rows, cols, entries).expect("sizes agree")
    }

    /// Random rational matrix, about half the entries zero.
    pub fn sparse_rational_matrix(&mut self, n: usize, k: i64) -> QMatrix {
        let mut m = QMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                if self.coin(0.5) {
                    let q = self.rational(k);
                    m.set(r, c, q);
                }
            }
        }
        m
    }

    /// `L·U` with unit-triangular integer factors, so `det = 1` and the inverse is integral.
    pub fn unimodular(&mut self, n: usize, k: i64) -> QMatrix {
        let mut lo = QMatrix::identity(n);
        let mut up = QMatrix::identity(n);
        for r in 0..n {
            for c in 0..n {
                if r > c {
                    lo.set(r, c, Gq::from_i64(self.int(-k, k)));
                } else if r < c {
                    up.set(r, c, Gq::from_i64(self.int(-k, k)));
                }
            }
        }
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut self.rng);
        let p = QMatrix::from_fn(n, n, |r, c| if perm[r] == c { Gq::one() } else { Gq::zero() });
        &(&p * &lo) * &up
    }

    /// Returns `(g, g⁻¹)`.
    pub fn conjugator(&mut self, n: usize) -> (QMatrix, QMatrix) {
        let g = self.unimodular(n, 2);
        let gi = g.inverse(0.0).expect("unimodular matrices are invertible");
        (g, gi)
    }

    pub fn conjugate_all(&mut self, ms: &[QMatrix]) -> Vec<QMatrix> {
        let Some(first) = ms.first() else { return Vec::new() };
        let (g, gi) = self.conjugator(first.rows());
        ms.iter().map(|m| &(&g * m) * &gi).collect()
    }

    /// `g · (⊕ λ_b I + N_b) · g⁻¹` together with its known semisimple and
    /// nilpotent parts.
    pub fn known_jordan(&mut self, n: usize) -> (QMatrix, QMatrix, QMatrix) {
        let mut s_blocks = Vec::new();
        let mut n_blocks = Vec::new();
        let mut left = n;
        while left > 0 {
            let size = self.int(1, left.min(3) as i64) as usize;
            let lam = if self.coin(0.2) { self.gaussian(2) } else { self.rational(4) };
            s_blocks.push(QMatrix::scalar(size, lam));
            let mut nb = QMatrix::zeros(size, size);
            for r in 0..size {
                for c in r + 1..size {
                    if self.coin(0.6) {
                        nb.set(r, c, Gq::from_i64(self.int(-2, 2)));
                    }
                }
            }
            n_blocks.push(nb);
            left -= size;
        }
        let s = QMatrix::block_diag(&s_blocks);
        let nil = QMatrix::block_diag(&n_blocks);
        let (g, gi) = self.conjugator(n);
        let s = &(&g * &s) * &gi;
        let nil = &(&g * &nil) * &gi;
        (&s + &nil, s, nil)
    }

    /// A matrix for the decomposition suite: random integer or known-answer.
    pub fn jc_matrix(&mut self, n: usize) -> QMatrix {
        if self.coin(0.5) {
            self.known_jordan(n).0
        } else {
            self.int_matrix(n, n, 3)
        }
    }

    /// `(A, B)` with `ad_A^k(B) = 0`: `B` is a random element of `ker ad_A^k`.
    pub fn ad_kernel_pair(&mut self, n: usize) -> (QMatrix, QMatrix, usize) {
        let a = self.known_jordan(n).0;
        let k = self.int(1, 3) as usize;
        // ad_A as an operator on row-major vec(X)
        let ad = QMatrix::from_fn(n * n, n * n, |row, col| {
            let (r, c) = (row / n, row % n);
            let (p, q) = (col / n, col % n);
            let mut v = Gq::zero();
            if q == c {
                v = &v + a.get(r, p);
            }
            if p == r {
                v = &v - a.get(q, c);
            }
            v
        });
        let kernel = ad.pow(k as u32).kernel(0.0);
        let mut b = QMatrix::zeros(n, n);
        for v in &kernel {
            let coeff = Gq::from_i64(self.int(-3, 3));
            let m = Matrix::new(n, n, v.clone()).expect("kernel vectors have n² entries");
            b = &b + &m.scale(&coeff);
        }
        (a, b, k)
    }

    fn character(&mut self, l: usize) -> Vec<Gq> {
        (0..l)
            .map(|_| if self.coin(0.3) { Gq::zero() } else { self.pick(&EIGEN_POOL).parse().expect("pool entries parse") })
            .collect()
    }

    /// Random block for `family` of at most `max_size`.
    pub fn block(&mut self, family: NilpotentFamily, max_size: usize) -> Block {
        let l = family.abelian_rank();
        let limit = match family {
            NilpotentFamily::Abelian(_) => 3,
            NilpotentFamily::Heisenberg => 3,
            NilpotentFamily::Filiform4 => 4,
        };
        let size = self.int(1, max_size.min(limit) as i64) as usize;
        let character = self.character(l);
        let nilpotent = (0..l.max(2)).map(|_| Gq::from_i64(self.int(-2, 2))).collect();
        Block { character, size, nilpotent }
    }

    /// Images of one block; the nilpotent data is used only where the
    /// block size allows it.
    pub fn block_images(family: NilpotentFamily, b: &Block) -> Vec<QMatrix> {
        let s = b.size;
        let id = |c: &Gq| QMatrix::scalar(s, c.clone());
        match family {
            NilpotentFamily::Abelian(m) => {
                // λ_i I + c_i J + c_{i+1} J² keeps the images commuting.
                let j = jordan_shift(s);
                let j2 = &j * &j;
                (0..m)
                    .map(|i| {
                        let c1 = &b.nilpotent[i % b.nilpotent.len()];
                        let c2 = &b.nilpotent[(i + 1) % b.nilpotent.len()];
                        &(&id(&b.character[i]) + &j.scale(c1)) + &j2.scale(c2)
                    })
                    .collect()
            }
            NilpotentFamily::Heisenberg => {
                let (a, bb) = (&b.nilpotent[0], &b.nilpotent[1]);
                match s {
                    3 => {
                        let a = if a.is_zero() { Gq::one() } else { a.clone() };
                        let bb = if bb.is_zero() { Gq::one() } else { bb.clone() };
                        vec![
                            &id(&b.character[0]) + &unit(3, 0, 1).scale(&a),
                            &id(&b.character[1]) + &unit(3, 1, 2).scale(&bb),
                            unit(3, 0, 2).scale(&(&a * &bb)),
                        ]
                    }
                    _ => {
                        let e = if s == 2 { unit(2, 0, 1) } else { QMatrix::zeros(s, s) };
                        vec![
                            &id(&b.character[0]) + &e.scale(a),
                            &id(&b.character[1]) + &e.scale(bb),
                            QMatrix::zeros(s, s),
                        ]
                    }
                }
            }
            NilpotentFamily::Filiform4 => {
                let (a, bb) = (&b.nilpotent[0], &b.nilpotent[1]);
                match s {
                    4 => {
                        let ad = LieAlgebra::filiform4().adjoint();
                        vec![
                            &id(&b.character[0]) + &ad.images[0],
                            &id(&b.character[1]) + &ad.images[1],
                            ad.images[2].clone(),
                            ad.images[3].clone(),
                        ]
                    }
                    3 => {
                        // through the quotient onto the Heisenberg algebra
                        let mut h = Generator::block_images(NilpotentFamily::Heisenberg, b);
                        h.push(QMatrix::zeros(3, 3));
                        h
                    }
                    _ => {
                        let e = if s == 2 { unit(2, 0, 1) } else { QMatrix::zeros(s, s) };
                        vec![
                            &id(&b.character[0]) + &e.scale(a),
                            &id(&b.character[1]) + &e.scale(bb),
                            QMatrix::zeros(s, s),
                            QMatrix::zeros(s, s),
                        ]
                    }
                }
            }
        }
    }

    /// Direct sum of blocks, conjugated by a random unimodular matrix.
    pub fn assemble(&mut self, family: NilpotentFamily, blocks: &[Block]) -> Representation {
        let alg = family.algebra();
        let per_block: Vec<Vec<QMatrix>> = blocks.iter().map(|b| Generator::block_images(family, b)).collect();
        let images: Vec<QMatrix> = (0..alg.dim())
            .map(|i| QMatrix::block_diag(&per_block.iter().map(|im| im[i].clone()).collect::<Vec<_>>()))
            .collect();
        let rank = blocks.iter().map(|b| b.size).sum();
        let images = self.conjugate_all(&images);
        Representation::new(alg, rank, images).expect("generated blocks form a representation")
    }

    pub fn blocks(&mut self, family: NilpotentFamily, rank: usize) -> Vec<Block> {
        let mut out = Vec::new();
        let mut left = rank;
        while left > 0 {
            let b = self.block(family, left);
            left -= b.size;
            out.push(b);
        }
        out
    }

    pub fn nilpotent_rep(&mut self, family: NilpotentFamily, rank: usize) -> Representation {
        let blocks = self.blocks(family, rank);
        self.assemble(family, &blocks)
    }

    /// A pair over `family`. Equivalent pairs share characters but get fresh
    /// nilpotent data, block order and conjugator; inequivalent ones differ
    /// in one character entry.
    pub fn nilpotent_pair(
        &mut self,
        family: NilpotentFamily,
        rank: usize,
        equivalent: bool,
    ) -> (Representation, Representation) {
        let blocks = self.blocks(family, rank);
        let first = self.assemble(family, &blocks);
        let mut other = blocks;
        for b in &mut other {
            for c in &mut b.nilpotent {
                *c = Gq::from_i64(self.int(-2, 2));
            }
        }
        other.shuffle(&mut self.rng);
        if !equivalent {
            let bi = self.int(0, other.len() as i64 - 1) as usize;
            let ci = self.int(0, family.abelian_rank() as i64 - 1) as usize;
            let shift = self.nonzero_rational(2);
            let c = &other[bi].character[ci] + &shift;
            other[bi].character[ci] = c;
        }
        let second = self.assemble(family, &other);
        (first, second)
    }

    /// `l` commuting `n × n` matrices with eigenvalues from `pool`.
    pub fn commuting_tuple(&mut self, n: usize, l: usize, pool: &[&str], nilpotent: bool) -> Vec<QMatrix> {
        let mut blocks: Vec<Vec<QMatrix>> = Vec::new();
        let mut left = n;
        while left > 0 {
            let size = self.int(1, left.min(3) as i64) as usize;
            let j = jordan_shift(size);
            let per: Vec<QMatrix> = (0..l)
                .map(|_| {
                    let lam: Gq = self.pick(pool).parse().expect("pool entries parse");
                    let mut m = QMatrix::scalar(size, lam);
                    if nilpotent && size > 1 && self.coin(0.6) {
                        m = &m + &j.scale(&Gq::from_i64(self.int(-2, 2)));
                    }
                    m
                })
                .collect();
            blocks.push(per);
            left -= size;
        }
        let diag: Vec<QMatrix> =
            (0..l).map(|i| QMatrix::block_diag(&blocks.iter().map(|b| b[i].clone()).collect::<Vec<_>>())).collect();
        self.conjugate_all(&diag)
    }

    /// Commuting invertible tuple (nonzero eigenvalues).
    pub fn invertible_tuple(&mut self, n: usize, l: usize) -> Vec<QMatrix> {
        self.commuting_tuple(n, l, &INVERTIBLE_POOL, true)
    }

    /// A torus pair: the second is an integer shift of the first's blocks
    /// (conjugate monodromy), or a half-integer / Jordan change otherwise.
    pub fn torus_pair(&mut self, n: usize, l: usize) -> (Vec<QMatrix>, Vec<QMatrix>) {
        let mut blocks: Vec<(usize, Vec<Gq>, Vec<Gq>)> = Vec::new();
        let mut left = n;
        while left > 0 {
            let size = self.int(1, left.min(2) as i64) as usize;
            let lam: Vec<Gq> = (0..l).map(|_| self.pick(&TORUS_POOL).parse().expect("pool entries parse")).collect();
            let nil: Vec<Gq> = (0..l)
                .map(|_| if size > 1 && self.coin(0.5) { Gq::from_i64(self.int(-1, 1)) } else { Gq::zero() })
                .collect();
            blocks.push((size, lam, nil));
            left -= size;
        }
        let build = |bs: &[(usize, Vec<Gq>, Vec<Gq>)]| -> Vec<QMatrix> {
            (0..l)
                .map(|i| {
                    QMatrix::block_diag(
                        &bs.iter()
                            .map(|(s, lam, nil)| &QMatrix::scalar(*s, lam[i].clone()) + &jordan_shift(*s).scale(&nil[i]))
                            .collect::<Vec<_>>(),
                    )
                })
                .collect()
        };
        let first = build(&blocks);
        let mut other = blocks.clone();
        match self.int(0, 3) {
            0 | 1 => {
                for (_, lam, _) in &mut other {
                    for x in lam.iter_mut() {
                        *x = x.clone() + Gq::from_i64(self.int(-1, 1));
                    }
                }
            }
            2 => {
                let b = self.int(0, other.len() as i64 - 1) as usize;
                let i = self.int(0, l as i64 - 1) as usize;
                other[b].1[i] = other[b].1[i].clone() + Gq::ratio(1, 2);
            }
            _ => {
                for (s, _, nil) in &mut other {
                    if *s > 1 {
                        for x in nil.iter_mut() {
                            *x = if x.is_zero() { Gq::one() } else { Gq::zero() };
                        }
                    }
                }
            }
        }
        other.shuffle(&mut self.rng);
        let second = build(&other);
        (self.conjugate_all(&first), self.conjugate_all(&second))
    }

    /// A representation of the Borel algebra of rank at most `max_rank`:
    /// direct sum of characters, the defining representation, its dual and
    /// (for `l = 2`) the adjoint, twisted by a diagonal automorphism and
    /// conjugated.
    pub fn borel_rep(&mut self, borel: &BorelAlgebra, max_rank: usize) -> Representation {
        let l = borel.l;
        let dim = borel.index.len();
        let mut parts: Vec<Vec<QMatrix>> = Vec::new();
        let mut left = self.int(1, max_rank as i64) as usize;
        while left > 0 {
            let mut kinds = vec![0usize];
            if l <= left && l > 1 {
                kinds.push(1);
                kinds.push(2);
            }
            if l == 2 && left >= 3 {
                kinds.push(3);
            }
            let kind = self.pick(&kinds);
            let base: Vec<QMatrix> = match kind {
                0 => (0..dim).map(|_| QMatrix::zeros(1, 1)).collect(),
                1 => (0..dim).map(|k| borel.elementary(k)).collect(),
                2 => {
                    // x ↦ −w xᵀ w with w the antidiagonal flip
                    let w = QMatrix::from_fn(l, l, |r, c| if r + c + 1 == l { Gq::one() } else { Gq::zero() });
                    (0..dim).map(|k| -&(&(&w * &borel.elementary(k).transpose()) * &w)).collect()
                }
                _ => borel.algebra.adjoint().images,
            };
            let size = base[0].rows();
            // add a character: scalars on the diagonal basis elements
            let chars: Vec<Gq> = (0..l).map(|_| self.pick(&TORUS_POOL).parse().expect("pool entries parse")).collect();
            let part: Vec<QMatrix> = base
                .iter()
                .enumerate()
                .map(|(k, m)| {
                    let (i, j) = borel.index[k];
                    if i == j {
                        m + &QMatrix::scalar(size, chars[i].clone())
                    } else {
                        m.clone()
                    }
                })
                .collect();
            parts.push(part);
            left -= size;
        }
        // diagonal automorphism E_ik ↦ (d_i / d_k) E_ik
        let d: Vec<Gq> = (0..l).map(|_| self.nonzero_rational(3)).collect();
        let images: Vec<QMatrix> = (0..dim)
            .map(|k| {
                let (i, j) = borel.index[k];
                let m = QMatrix::block_diag(&parts.iter().map(|p| p[k].clone()).collect::<Vec<_>>());
                m.scale(&(&d[i] / &d[j]))
            })
            .collect();
        let rank = images[0].rows();
        let images = self.conjugate_all(&images);
        Representation::new(borel.algebra.clone(), rank, images).expect("generated Borel representation is valid")
    }
}

/// Eigenvalue pools (scalar strings).
pub const EIGEN_POOL: [&str; 8] = ["1", "-1", "2", "1/2", "-3/2", "i", "1+i", "3"];
pub const INVERTIBLE_POOL: [&str; 8] = ["1", "-1", "2", "1/2", "-2", "i", "1+i", "1"];
pub const TORUS_POOL: [&str; 7] = ["0", "1", "-1", "1/2", "1/3", "2", "i"];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::borel::borel_algebra;
    use crate::linalg::jordan_chevalley;
    use crate::tolerance::ToleranceConfig;

    #[test]
    fn generated_instances_are_valid() {
        let mut g = Generator::new(7);
        let cfg = ToleranceConfig::default();
        for n in 1..=4 {
            let (m, s, nil) = g.known_jordan(n);
            let jp = jordan_chevalley(&m, &cfg).unwrap();
            assert_eq!((jp.s, jp.n), (s, nil));
            for fam in [NilpotentFamily::Abelian(2), NilpotentFamily::Heisenberg, NilpotentFamily::Filiform4] {
                let eq = g.coin(0.5);
                let (a, b) = g.nilpotent_pair(fam, n, eq);
                assert!(a.validate().is_valid() && b.validate().is_valid());
            }
            let t = g.invertible_tuple(n, 2);
            assert!(t[0].commutes_with(&t[1]));
        }
        for l in 2..=3 {
            let b = borel_algebra(l).unwrap();
            for _ in 0..10 {
                assert!(g.borel_rep(&b, 3).validate().is_valid());
            }
        }
    }

    #[test]
    fn ad_kernel_pairs_satisfy_the_hypothesis() {
        let mut g = Generator::new(3);
        for n in 2..=4 {
            let (a, b, k) = g.ad_kernel_pair(n);
            let mut x = b.clone();
            for _ in 0..k {
                x = a.commutator(&x);
            }
            assert!(x.is_zero());
        }
    }

    #[test]
    fn same_seed_same_instances() {
        let a = Generator::new(11).nilpotent_rep(NilpotentFamily::Heisenberg, 4);
        let b = Generator::new(11).nilpotent_rep(NilpotentFamily::Heisenberg, 4);
        assert_eq!(a, b);
    }
}
