//! Graded changes of basis `M' = R * T(M) * C`, where `T` substitutes
//! `x_i -> sum_j T[i][j] x_j` and `R`, `C` are automorphisms of the free modules.

use serde_json::json;
use tailsheaf_core::{linear_images, DenseMatrix, Poly, PolyRing, Scalar};

use super::SheafPresentation;
use crate::error::{Result, SheafError};

pub type PolyMatrix = Vec<Vec<Poly>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformationRecord {
    pub rows: PolyMatrix,
    pub cols: PolyMatrix,
    pub coords: DenseMatrix,
}

fn identity(ring: PolyRing, n: usize) -> PolyMatrix {
    (0..n).map(|i| (0..n).map(|j| ring.constant((i == j) as i64)).collect()).collect()
}

fn matmul(ring: PolyRing, a: &PolyMatrix, b: &PolyMatrix, inner: usize, cols: usize) -> PolyMatrix {
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    (0..inner)
                        .filter(|&k| !row[k].is_zero() && !b[k][j].is_zero())
                        .fold(ring.zero(), |acc, k| &acc + &(&row[k] * &b[k][j]))
                })
                .collect()
        })
        .collect()
}

fn substitute(m: &PolyMatrix, images: &[Poly], ring: PolyRing) -> PolyMatrix {
    m.iter().map(|row| row.iter().map(|f| f.substitute(images, ring)).collect()).collect()
}

fn scalar_matrix(ring: PolyRing, m: &DenseMatrix) -> PolyMatrix {
    m.to_rows().into_iter().map(|row| row.into_iter().map(|c| Poly::constant(ring, c)).collect()).collect()
}

/// Inverse of a graded automorphism: split off the invertible degree-zero part
/// and invert the unipotent remainder by its finite geometric series.
fn invert(ring: PolyRing, m: &PolyMatrix) -> Result<PolyMatrix> {
    let n = m.len();
    let field = ring.field();
    let mut r0 = DenseMatrix::zeros(field, n, n);
    let mut higher = m.clone();
    for i in 0..n {
        for j in 0..n {
            if m[i][j].degree() == Some(0) {
                r0.set(i, j, m[i][j].coefficient(&tailsheaf_core::Monomial::one(ring.nvars())));
                higher[i][j] = ring.zero();
            }
        }
    }
    let r0_inv = r0.inverse().ok_or_else(|| SheafError::Shape("basis change is not invertible".into()))?;
    let r0_inv = scalar_matrix(ring, &r0_inv);
    let nil = matmul(ring, &r0_inv, &higher, n, n);
    let neg: PolyMatrix = nil.iter().map(|row| row.iter().map(|f| -f).collect()).collect();
    let mut sum = identity(ring, n);
    let mut power = identity(ring, n);
    for _ in 0..=n {
        power = matmul(ring, &power, &neg, n, n);
        if power.iter().flatten().all(Poly::is_zero) {
            return Ok(matmul(ring, &sum, &r0_inv, n, n));
        }
        sum = sum.iter().zip(&power).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect()).collect();
    }
    Err(SheafError::Shape("basis change is not a graded automorphism".into()))
}

impl TransformationRecord {
    pub fn identity(ring: PolyRing, s: usize, q: usize) -> TransformationRecord {
        TransformationRecord {
            rows: identity(ring, s),
            cols: identity(ring, q),
            coords: DenseMatrix::identity(ring.field(), ring.nvars()),
        }
    }

    /// Scalar row and column operations with no coordinate change.
    pub fn from_scalars(ring: PolyRing, rows: &DenseMatrix, cols: &DenseMatrix) -> TransformationRecord {
        TransformationRecord {
            rows: scalar_matrix(ring, rows),
            cols: scalar_matrix(ring, cols),
            coords: DenseMatrix::identity(ring.field(), ring.nvars()),
        }
    }

    pub fn coordinate_change(ring: PolyRing, s: usize, q: usize, coords: DenseMatrix) -> TransformationRecord {
        TransformationRecord { coords, ..TransformationRecord::identity(ring, s, q) }
    }

    fn ring(&self) -> Option<PolyRing> {
        self.rows.iter().chain(&self.cols).flatten().next().map(Poly::ring)
    }

    /// Applies the record. The new twists are read off the degrees of `R` and `C`.
    pub fn apply(&self, p: &SheafPresentation) -> Result<SheafPresentation> {
        let ring = p.ring();
        let (s, q) = (p.s(), p.q());
        if self.rows.len() != s || self.rows.iter().any(|r| r.len() != s) {
            return Err(SheafError::Shape(format!("row operation is not {s}x{s}")));
        }
        if self.cols.len() != q || self.cols.iter().any(|r| r.len() != q) {
            return Err(SheafError::Shape(format!("column operation is not {q}x{q}")));
        }
        if self.coords.rows() != ring.nvars() || self.coords.cols() != ring.nvars() || self.coords.rank() < ring.nvars()
        {
            return Err(SheafError::Shape("coordinate change is not an invertible square matrix".into()));
        }
        let mut sources = Vec::with_capacity(s);
        for (i, row) in self.rows.iter().enumerate() {
            sources.push(uniform(
                row.iter().zip(p.sources()).map(|(f, a)| f.degree().map(|d| a - d as i64)),
                "row",
                i,
            )?);
        }
        let mut targets = Vec::with_capacity(q);
        for j in 0..q {
            let col = self.cols.iter().zip(p.targets()).map(|(r, b)| r[j].degree().map(|d| b + d as i64));
            targets.push(uniform(col, "column", j)?);
        }
        let images = linear_images(ring, &self.coords);
        let moved = substitute(&p.matrix().to_vec(), &images, ring);
        let m = matmul(ring, &matmul(ring, &self.rows, &moved, s, q), &self.cols, q, q);
        SheafPresentation::new(ring, sources, targets, m)
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &TransformationRecord) -> TransformationRecord {
        let Some(ring) = self.ring().or(next.ring()) else {
            return next.clone();
        };
        let images = linear_images(ring, &next.coords);
        let (s, q) = (self.rows.len(), self.cols.len());
        TransformationRecord {
            rows: matmul(ring, &next.rows, &substitute(&self.rows, &images, ring), s, s),
            cols: matmul(ring, &substitute(&self.cols, &images, ring), &next.cols, q, q),
            coords: self.coords.mul(&next.coords),
        }
    }

    pub fn inverse(&self) -> Result<TransformationRecord> {
        let t_inv = self.coords.inverse().ok_or_else(|| SheafError::Shape("coordinate change is singular".into()))?;
        let Some(ring) = self.ring() else {
            return Ok(TransformationRecord { rows: Vec::new(), cols: Vec::new(), coords: t_inv });
        };
        let images = linear_images(ring, &t_inv);
        Ok(TransformationRecord {
            rows: substitute(&invert(ring, &self.rows)?, &images, ring),
            cols: substitute(&invert(ring, &self.cols)?, &images, ring),
            coords: t_inv,
        })
    }

    /// Where a point of the original space lands in the transformed coordinates.
    pub fn map_point(&self, p: &[Scalar]) -> Result<Vec<Scalar>> {
        let t_inv = self.coords.inverse().ok_or_else(|| SheafError::Shape("coordinate change is singular".into()))?;
        Ok(t_inv.mul_vec(p))
    }

    /// Inverse of [`map_point`](Self::map_point).
    pub fn pull_point(&self, p: &[Scalar]) -> Vec<Scalar> {
        self.coords.mul_vec(p)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let polys = |m: &PolyMatrix| -> Vec<Vec<String>> {
            m.iter().map(|r| r.iter().map(ToString::to_string).collect()).collect()
        };
        let coords: Vec<Vec<String>> =
            self.coords.to_rows().iter().map(|r| r.iter().map(ToString::to_string).collect()).collect();
        json!({ "rows": polys(&self.rows), "cols": polys(&self.cols), "coords": coords })
    }
}

fn uniform(mut degs: impl Iterator<Item = Option<i64>>, what: &str, k: usize) -> Result<i64> {
    let mut found: Option<i64> = None;
    for d in degs.by_ref().flatten() {
        match found {
            None => found = Some(d),
            Some(e) if e != d => {
                return Err(SheafError::Shape(format!("{what} {k} of the basis change is not homogeneous")))
            }
            _ => {}
        }
    }
    found.ok_or_else(|| SheafError::Shape(format!("{what} {k} of the basis change is zero")))
}
