//! Sheaves given by a one-step free presentation
//! `0 -> (+) O(a_i) -> (+) O(b_j) -> F -> 0`.
//!
//! The matrix has one row per source summand and one column per target summand,
//! so `M[i][j]` is a form of degree `b_j - a_i`.

mod fitting;
mod text;
mod transform;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use tailsheaf_core::{groebner_ideal_in, DenseMatrix, Field, MonomialOrder, Poly, PolyRing, Scalar};

use crate::error::{Result, SheafError};

pub use fitting::{reduce_forms, FittingIdeal};
pub use transform::TransformationRecord;

/// Seed for the random points used by the injectivity test.
const INJECTIVITY_SEED: u64 = 0x5eed_0001;
const MAX_HYPERPLANE_ATTEMPTS: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SheafPresentation {
    ring: PolyRing,
    sources: Vec<i64>,
    targets: Vec<i64>,
    matrix: Vec<Vec<Poly>>,
}

impl SheafPresentation {
    /// Builds and validates a presentation.
    pub fn new(ring: PolyRing, sources: Vec<i64>, targets: Vec<i64>, matrix: Vec<Vec<Poly>>) -> Result<Self> {
        let p = SheafPresentation::from_parts(ring, sources, targets, matrix)?;
        p.check_injective()?;
        Ok(p)
    }

    /// Checks shape, degrees and minimality but not injectivity.
    pub(crate) fn from_parts(
        ring: PolyRing,
        sources: Vec<i64>,
        targets: Vec<i64>,
        matrix: Vec<Vec<Poly>>,
    ) -> Result<Self> {
        let p = SheafPresentation { ring, sources, targets, matrix };
        p.check_shape()?;
        Ok(p)
    }

    /// The zero sheaf: no summands at all. Neutral for [`direct_sum`](Self::direct_sum).
    pub fn zero(ring: PolyRing) -> SheafPresentation {
        SheafPresentation { ring, sources: Vec::new(), targets: Vec::new(), matrix: Vec::new() }
    }

    fn check_shape(&self) -> Result<()> {
        if self.ring.nvars() < 2 {
            return Err(SheafError::Shape("projective dimension must be at least 1".into()));
        }
        if self.matrix.len() != self.sources.len() {
            return Err(SheafError::Shape(format!(
                "{} rows for {} source twists",
                self.matrix.len(),
                self.sources.len()
            )));
        }
        for (i, row) in self.matrix.iter().enumerate() {
            if row.len() != self.targets.len() {
                return Err(SheafError::Shape(format!(
                    "row {i} has {} entries for {} target twists",
                    row.len(),
                    self.targets.len()
                )));
            }
            for (j, f) in row.iter().enumerate() {
                if f.ring() != self.ring {
                    return Err(SheafError::Shape(format!("entry ({i}, {j}) lives in another ring")));
                }
                if f.is_zero() {
                    continue;
                }
                let gap = self.targets[j] - self.sources[i];
                if gap <= 0 {
                    return Err(SheafError::Minimality { row: i, col: j, gap });
                }
                match f.homogeneous_degree() {
                    Some(d) if d as i64 == gap => {}
                    _ => {
                        return Err(SheafError::Degree {
                            row: i,
                            col: j,
                            expected: gap,
                            found: f.degree().unwrap_or(0),
                        })
                    }
                }
            }
        }
        let rank = self.rank();
        if rank < 1 {
            return Err(SheafError::RankTooSmall(rank));
        }
        Ok(())
    }

    fn check_injective(&self) -> Result<()> {
        let r = self.generic_rank();
        if r < self.s() {
            return Err(SheafError::NotInjective { rank: r, rows: self.s() });
        }
        Ok(())
    }

    /// Re-runs every validity check.
    pub fn validate(&self) -> Result<()> {
        self.check_shape()?;
        self.check_injective()
    }

    pub fn ring(&self) -> PolyRing {
        self.ring
    }

    /// Projective dimension.
    pub fn n(&self) -> usize {
        self.ring.n()
    }

    pub fn field(&self) -> Field {
        self.ring.field()
    }

    pub fn sources(&self) -> &[i64] {
        &self.sources
    }

    pub fn targets(&self) -> &[i64] {
        &self.targets
    }

    pub fn matrix(&self) -> &[Vec<Poly>] {
        &self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> &Poly {
        &self.matrix[i][j]
    }

    pub fn s(&self) -> usize {
        self.sources.len()
    }

    pub fn q(&self) -> usize {
        self.targets.len()
    }

    /// Rank `q - s` of the sheaf.
    pub fn rank(&self) -> i64 {
        self.q() as i64 - self.s() as i64
    }

    pub fn max_target(&self) -> i64 {
        self.targets.iter().copied().max().unwrap_or(0)
    }

    /// `F(t)`.
    pub fn twist(&self, t: i64) -> SheafPresentation {
        SheafPresentation {
            ring: self.ring,
            sources: self.sources.iter().map(|a| a + t).collect(),
            targets: self.targets.iter().map(|b| b + t).collect(),
            matrix: self.matrix.clone(),
        }
    }

    /// Row and column orders used by [`direct_sum`](Self::direct_sum): indices into the
    /// concatenated lists, stably sorted by twist.
    pub fn block_order(&self, other: &SheafPresentation) -> (Vec<usize>, Vec<usize>) {
        let sort = |a: &[i64], b: &[i64]| {
            let all: Vec<i64> = a.iter().chain(b).copied().collect();
            let mut idx: Vec<usize> = (0..all.len()).collect();
            idx.sort_by_key(|&k| all[k]);
            idx
        };
        (sort(&self.sources, &other.sources), sort(&self.targets, &other.targets))
    }

    /// Block-diagonal sum with twists re-sorted as in [`block_order`](Self::block_order).
    pub fn direct_sum(&self, other: &SheafPresentation) -> Result<SheafPresentation> {
        if self.ring != other.ring {
            return Err(SheafError::Shape("direct sum of presentations over different rings".into()));
        }
        let (rows, cols) = self.block_order(other);
        let s1 = self.s();
        let q1 = self.q();
        let get = |i: usize, j: usize| -> Poly {
            match (i < s1, j < q1) {
                (true, true) => self.matrix[i][j].clone(),
                (false, false) => other.matrix[i - s1][j - q1].clone(),
                _ => self.ring.zero(),
            }
        };
        let all_a: Vec<i64> = self.sources.iter().chain(&other.sources).copied().collect();
        let all_b: Vec<i64> = self.targets.iter().chain(&other.targets).copied().collect();
        let matrix = rows.iter().map(|&i| cols.iter().map(|&j| get(i, j)).collect()).collect();
        Ok(SheafPresentation {
            ring: self.ring,
            sources: rows.iter().map(|&i| all_a[i]).collect(),
            targets: cols.iter().map(|&j| all_b[j]).collect(),
            matrix,
        })
    }

    /// The presentation given by a subset of rows and columns (in the given order).
    pub fn sub_presentation(&self, rows: &[usize], cols: &[usize]) -> Result<SheafPresentation> {
        for &i in rows {
            if i >= self.s() {
                return Err(SheafError::OutOfRange(format!("row {i} of {}", self.s())));
            }
        }
        for &j in cols {
            if j >= self.q() {
                return Err(SheafError::OutOfRange(format!("column {j} of {}", self.q())));
            }
        }
        SheafPresentation::new(
            self.ring,
            rows.iter().map(|&i| self.sources[i]).collect(),
            cols.iter().map(|&j| self.targets[j]).collect(),
            rows.iter().map(|&i| cols.iter().map(|&j| self.matrix[i][j].clone()).collect()).collect(),
        )
    }

    /// Scalar matrix `M(p)`.
    pub fn evaluate(&self, point: &[Scalar]) -> DenseMatrix {
        let rows = self.matrix.iter().map(|row| row.iter().map(|f| f.eval(point)).collect()).collect();
        DenseMatrix::from_rows(self.field(), rows).with_shape(self.s(), self.q())
    }

    /// Rank of the matrix over the fraction field of the polynomial ring.
    ///
    /// Three seeded random evaluations decide the full-rank case; any deficient
    /// evaluation falls back to exact fraction-free elimination on the polynomials.
    pub fn generic_rank(&self) -> usize {
        let s = self.s();
        if s == 0 {
            return 0;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(INJECTIVITY_SEED);
        let full = (0..3).all(|_| {
            let p: Vec<Scalar> =
                (0..self.ring.nvars()).map(|_| Scalar::from_int(self.field(), rng.gen_range(-97..=97))).collect();
            self.evaluate(&p).rank() == s
        });
        if full {
            s
        } else {
            fraction_field_rank(self.matrix.clone())
        }
    }

    /// Applies `x_i -> images[i]` to every entry.
    pub(crate) fn substitute(&self, images: &[Poly], target: PolyRing) -> SheafPresentation {
        SheafPresentation {
            ring: target,
            sources: self.sources.clone(),
            targets: self.targets.clone(),
            matrix: self.matrix.iter().map(|row| row.iter().map(|f| f.substitute(images, target)).collect()).collect(),
        }
    }

    /// Reads the coefficients in another field; validated again there.
    pub fn change_field(&self, field: Field) -> Result<SheafPresentation> {
        let ring = self.ring.with_field(field);
        let mut matrix = Vec::with_capacity(self.s());
        for row in &self.matrix {
            let mut out = Vec::with_capacity(row.len());
            for f in row {
                out.push(f.to_field(field).ok_or_else(|| SheafError::FieldReduction(f.to_string()))?);
            }
            matrix.push(out);
        }
        SheafPresentation::new(ring, self.sources.clone(), self.targets.clone(), matrix)
    }

    /// Ideal of maximal minors.
    pub fn fitting_ideal(&self) -> FittingIdeal {
        fitting::fitting_ideal(self)
    }

    /// Restricts to the hyperplane `x_n = sum_{i<n} c_i x_i`, which must miss the
    /// zero locus of the Fitting ideal.
    pub fn restrict_hyperplane(&self, choice: &HyperplaneChoice) -> Result<Restriction> {
        let n = self.n();
        let f0 = self.fitting_ideal();
        let target = self.ring.with_nvars(n);
        let images_for = |c: &[Scalar]| -> Vec<Poly> {
            let mut images: Vec<Poly> = (0..n).map(|i| target.var(i)).collect();
            let terms = c.iter().enumerate().map(|(i, v)| &target.var(i) * &Poly::constant(target, v.clone()));
            images.push(terms.fold(target.zero(), |acc, t| &acc + &t));
            images
        };
        let avoids = |images: &[Poly]| -> Result<bool> {
            if f0.is_zero() {
                return Ok(false);
            }
            let gens: Vec<Poly> = f0.generators().iter().map(|g| g.substitute(images, target)).collect();
            let gb = groebner_ideal_in(target, &gens, MonomialOrder::GrevLex)?;
            Ok(gb.krull_dim().is_none_or(|d| d == 0))
        };
        let attempt = |c: Vec<Scalar>, attempts: usize, seed: Option<u64>| -> Result<Option<Restriction>> {
            let images = images_for(&c);
            if !avoids(&images)? {
                return Ok(None);
            }
            let restricted = self.substitute(&images, target);
            restricted.validate()?;
            Ok(Some(Restriction {
                presentation: restricted,
                certificate: HyperplaneCertificate { coefficients: c, attempts, seed, singular_locus_avoided: true },
            }))
        };
        match choice {
            HyperplaneChoice::Coefficients(c) => {
                if c.len() != n {
                    return Err(SheafError::Shape(format!("hyperplane needs {n} coefficients")));
                }
                let c = c
                    .iter()
                    .map(|v| v.to_field(self.field()).ok_or_else(|| SheafError::FieldReduction(v.to_string())))
                    .collect::<Result<Vec<Scalar>>>()?;
                attempt(c, 1, None)?.ok_or(SheafError::HyperplaneMeetsSing(1))
            }
            HyperplaneChoice::Seeded(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                for k in 1..=MAX_HYPERPLANE_ATTEMPTS {
                    let c: Vec<Scalar> =
                        (0..n).map(|_| Scalar::from_int(self.field(), rng.gen_range(-10..=10))).collect();
                    if let Some(r) = attempt(c, k, Some(*seed))? {
                        return Ok(r);
                    }
                }
                Err(SheafError::HyperplaneMeetsSing(MAX_HYPERPLANE_ATTEMPTS))
            }
        }
    }
}

/// How to pick the restriction hyperplane `x_n = sum c_i x_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HyperplaneChoice {
    Coefficients(Vec<Scalar>),
    /// Integer coefficients in `[-10, 10]` drawn from a seeded generator.
    Seeded(u64),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HyperplaneCertificate {
    pub coefficients: Vec<Scalar>,
    pub attempts: usize,
    pub seed: Option<u64>,
    pub singular_locus_avoided: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Restriction {
    pub presentation: SheafPresentation,
    pub certificate: HyperplaneCertificate,
}

/// Fraction-free elimination with full pivoting; every division is exact.
fn fraction_field_rank(mut a: Vec<Vec<Poly>>) -> usize {
    let s = a.len();
    let q = a.first().map_or(0, Vec::len);
    let Some(ring) = a.first().and_then(|r| r.first()).map(Poly::ring) else {
        return 0;
    };
    let mut prev = ring.constant(1);
    let mut rank = 0;
    for k in 0..s.min(q) {
        let pivot = (k..s)
            .flat_map(|i| (k..q).map(move |j| (i, j)))
            .filter(|&(i, j)| !a[i][j].is_zero())
            .min_by_key(|&(i, j)| a[i][j].num_terms());
        let Some((pi, pj)) = pivot else { break };
        a.swap(k, pi);
        for row in a.iter_mut() {
            row.swap(k, pj);
        }
        for i in k + 1..s {
            for j in k + 1..q {
                let num = &(&a[k][k] * &a[i][j]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num.div_exact(&prev).expect("fraction-free elimination divides exactly");
            }
            a[i][k] = ring.zero();
        }
        prev = a[k][k].clone();
        rank += 1;
    }
    rank
}
