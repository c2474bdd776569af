//! Exact dense matrices and a sparse elimination engine for ranks.
//!
//! Over the rationals the sparse engine works fraction-free on primitive integer
//! rows: `i128` with checked arithmetic first, restarting with `BigInt` on overflow.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};

use crate::scalar::{mod_inv, Field, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    field: Field,
    data: Vec<Scalar>,
}

impl DenseMatrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> DenseMatrix {
        DenseMatrix { rows, cols, field, data: vec![Scalar::zero(field); rows * cols] }
    }

    pub fn identity(field: Field, n: usize) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one(field));
        }
        m
    }

    /// Builds a matrix from rows; all rows must have the same length.
    pub fn from_rows(field: Field, rows: Vec<Vec<Scalar>>) -> DenseMatrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row);
        }
        DenseMatrix { rows: r, cols: c, field, data }
    }

    pub fn from_ints(field: Field, rows: &[Vec<i64>]) -> DenseMatrix {
        DenseMatrix::from_rows(
            field,
            rows.iter().map(|r| r.iter().map(|&v| Scalar::from_int(field, v)).collect()).collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        debug_assert_eq!(v.field(), self.field);
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut t = DenseMatrix::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = DenseMatrix::zeros(self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let idx = i * out.cols + j;
                        out.data[idx] += &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = Scalar::zero(self.field);
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += &(a * b);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        DenseMatrix { rows: self.rows, cols: self.cols, field: self.field, data }
    }

    pub fn sub(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        DenseMatrix { rows: self.rows, cols: self.cols, field: self.field, data }
    }

    pub fn scale(&self, c: &Scalar) -> DenseMatrix {
        let data = self.data.iter().map(|a| a * c).collect();
        DenseMatrix { rows: self.rows, cols: self.cols, field: self.field, data }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| if i == j { self.get(i, j).is_one() } else { self.get(i, j).is_zero() })
            })
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> DenseMatrix {
        DenseMatrix::from_rows(
            self.field,
            rows.iter().map(|&i| cols.iter().map(|&j| self.get(i, j).clone()).collect()).collect(),
        )
        .with_shape(rows.len(), cols.len())
    }

    /// Sets the shape of a matrix without entries.
    pub fn with_shape(mut self, rows: usize, cols: usize) -> DenseMatrix {
        // from_rows cannot infer the column count of a matrix with no rows
        if self.data.is_empty() {
            self.rows = rows;
            self.cols = cols;
        }
        self
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.rows, other.rows);
        let rows = (0..self.rows).map(|i| self.row(i).iter().chain(other.row(i)).cloned().collect()).collect();
        DenseMatrix::from_rows(self.field, rows).with_shape(self.rows, self.cols + other.cols)
    }

    /// Vertical concatenation.
    pub fn vstack(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        DenseMatrix { rows: self.rows + other.rows, cols: self.cols, field: self.field, data }
    }

    pub fn rank(&self) -> usize {
        self.to_sparse().rank()
    }

    pub fn to_sparse(&self) -> SparseRows {
        let mut s = SparseRows::new(self.field, self.cols);
        for i in 0..self.rows {
            s.push_row(
                self.row(i).iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(j, v)| (j, v.clone())).collect(),
            );
        }
        s
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (DenseMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m.get(r, c).inv().unwrap();
            for j in c..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in c..m.cols {
                    let b = m.get(r, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = m.get(i, j) - &(&f * b);
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Basis of the right null space, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<Scalar>> {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![Scalar::zero(self.field); self.cols];
            v[free] = Scalar::one(self.field);
            for (k, &p) in pivots.iter().enumerate() {
                v[p] = -r.get(k, free);
            }
            basis.push(v);
        }
        basis
    }

    /// Basis of the left null space `{y : yᵀ A = 0}`.
    pub fn left_kernel(&self) -> Vec<Vec<Scalar>> {
        self.transpose().kernel()
    }

    pub fn inverse(&self) -> Option<DenseMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let aug = self.hstack(&DenseMatrix::identity(self.field, n));
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        let cols: Vec<usize> = (n..2 * n).collect();
        let rows: Vec<usize> = (0..n).collect();
        Some(r.submatrix(&rows, &cols))
    }

    /// Some solution of `A x = b`, if one exists.
    pub fn solve(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(b.len(), self.rows);
        let bcol =
            DenseMatrix::from_rows(self.field, b.iter().map(|v| vec![v.clone()]).collect()).with_shape(self.rows, 1);
        let aug = self.hstack(&bcol);
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Scalar::zero(self.field); self.cols];
        for (k, &p) in pivots.iter().enumerate() {
            x[p] = r.get(k, self.cols).clone();
        }
        Some(x)
    }

    pub fn determinant(&self) -> Scalar {
        assert_eq!(self.rows, self.cols);
        let mut m = self.clone();
        let mut det = Scalar::one(self.field);
        for c in 0..m.cols {
            let Some(p) = (c..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                return Scalar::zero(self.field);
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let piv = m.get(c, c).clone();
            det *= &piv;
            let inv = piv.inv().unwrap();
            for i in c + 1..m.rows {
                if m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c) * &inv;
                for j in c..m.cols {
                    let v = m.get(i, j) - &(&f * m.get(c, j));
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    pub fn pow(&self, e: u32) -> DenseMatrix {
        let mut out = DenseMatrix::identity(self.field, self.rows);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }
}

impl fmt::Display for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let cells: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

/// Row-sparse matrix used for large rank computations.
#[derive(Clone, Debug)]
pub struct SparseRows {
    field: Field,
    ncols: usize,
    rows: Vec<Vec<(usize, Scalar)>>,
}

impl SparseRows {
    pub fn new(field: Field, ncols: usize) -> SparseRows {
        SparseRows { field, ncols, rows: Vec::new() }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    /// Adds a row given as (column, value) pairs; zero values are dropped and
    /// repeated columns are summed.
    pub fn push_row(&mut self, mut entries: Vec<(usize, Scalar)>) {
        entries.sort_by_key(|e| e.0);
        let mut row: Vec<(usize, Scalar)> = Vec::with_capacity(entries.len());
        for (c, v) in entries {
            assert!(c < self.ncols, "column {c} out of range");
            match row.last_mut() {
                Some((lc, lv)) if *lc == c => *lv += &v,
                _ => row.push((c, v)),
            }
        }
        row.retain(|(_, v)| !v.is_zero());
        self.rows.push(row);
    }

    pub fn rank(&self) -> usize {
        self.echelon().len()
    }

    /// Rows of an echelon form spanning the same space, each with a distinct
    /// leading column, sorted by leading column.
    pub fn echelon(&self) -> Vec<Vec<(usize, Scalar)>> {
        match self.field {
            Field::Prime(p) => {
                let rows =
                    self.rows.iter().map(|r| r.iter().map(|(c, v)| (*c, v.as_residue().unwrap())).collect()).collect();
                let mut out = modular_echelon(rows, p, self.ncols);
                out.sort_by_key(|r| r[0].0);
                out.into_iter()
                    .map(|r| r.into_iter().map(|(c, v)| (c, Scalar::Modular { value: v, modulus: p })).collect())
                    .collect()
            }
            Field::Rationals => {
                let ints: Vec<Vec<(usize, BigInt)>> = self.rows.iter().map(|r| primitive_integer_row(r)).collect();
                let mut out: Vec<Vec<(usize, BigInt)>> = match small_rows(&ints) {
                    Some(small) => match fraction_free_echelon(small, self.ncols) {
                        Some(rows) => rows
                            .into_iter()
                            .map(|r| r.into_iter().map(|(c, v)| (c, BigInt::from(v))).collect())
                            .collect(),
                        None => fraction_free_echelon(ints, self.ncols).expect("bigint never overflows"),
                    },
                    None => fraction_free_echelon(ints, self.ncols).expect("bigint never overflows"),
                };
                out.sort_by_key(|r| r[0].0);
                out.into_iter()
                    .map(|r| r.into_iter().map(|(c, v)| (c, Scalar::from_bigint(Field::Rationals, &v))).collect())
                    .collect()
            }
        }
    }
}

fn primitive_integer_row(row: &[(usize, Scalar)]) -> Vec<(usize, BigInt)> {
    let mut lcm = BigInt::from(1);
    for (_, v) in row {
        lcm = lcm.lcm(v.as_rational().expect("rational row").denom());
    }
    let mut out: Vec<(usize, BigInt)> = row
        .iter()
        .map(|(c, v)| {
            let q = v.as_rational().unwrap();
            (*c, q.numer() * (&lcm / q.denom()))
        })
        .collect();
    make_primitive(&mut out);
    out
}

fn small_rows(rows: &[Vec<(usize, BigInt)>]) -> Option<Vec<Vec<(usize, i128)>>> {
    rows.iter().map(|r| r.iter().map(|(c, v)| v.to_i128().map(|x| (*c, x))).collect::<Option<Vec<_>>>()).collect()
}

/// Integer coefficient type for fraction-free elimination.
trait IntCoeff: Clone + PartialEq {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn negate(&self) -> Option<Self>;
    /// `a*x - b*y`
    fn mul_sub(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self>;
    fn gcd(&self, other: &Self) -> Self;
    fn div_exact(&self, d: &Self) -> Self;
    fn is_unit(&self) -> bool;
}

impl IntCoeff for i128 {
    fn zero() -> Self {
        0
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_neg(&self) -> bool {
        *self < 0
    }
    fn negate(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn mul_sub(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self> {
        a.checked_mul(*x)?.checked_sub(b.checked_mul(*y)?)
    }
    fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.unsigned_abs(), other.unsigned_abs());
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a as i128
    }
    fn div_exact(&self, d: &Self) -> Self {
        self / d
    }
    fn is_unit(&self) -> bool {
        *self == 1 || *self == -1
    }
}

impl IntCoeff for BigInt {
    fn zero() -> Self {
        BigInt::from(0)
    }
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn is_neg(&self) -> bool {
        self.is_negative()
    }
    fn negate(&self) -> Option<Self> {
        Some(-self)
    }
    fn mul_sub(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self> {
        Some(a * x - b * y)
    }
    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn div_exact(&self, d: &Self) -> Self {
        self / d
    }
    fn is_unit(&self) -> bool {
        self.magnitude() == &num_bigint::BigUint::from(1u32)
    }
}

fn make_primitive<T: IntCoeff>(row: &mut [(usize, T)]) {
    if row.is_empty() {
        return;
    }
    let mut g = row[0].1.gcd(&row[0].1);
    for (_, v) in row.iter().skip(1) {
        if g.is_unit() {
            break;
        }
        g = g.gcd(v);
    }
    if row[0].1.is_neg() {
        g = g.negate().unwrap_or(g);
    }
    if !g.is_unit() || g.is_neg() {
        for (_, v) in row.iter_mut() {
            *v = v.div_exact(&g);
        }
    }
}

/// `None` on overflow of the coefficient type.
fn fraction_free_echelon<T: IntCoeff>(rows: Vec<Vec<(usize, T)>>, ncols: usize) -> Option<Vec<Vec<(usize, T)>>> {
    let mut pivot_at: Vec<Option<usize>> = vec![None; ncols];
    let mut pivots: Vec<Vec<(usize, T)>> = Vec::new();
    let mut rows = rows;
    // Short rows first keeps fill-in down.
    rows.sort_by(|a, b| (a.first().map(|e| e.0), a.len()).cmp(&(b.first().map(|e| e.0), b.len())));
    for mut row in rows {
        loop {
            let Some(&(lead, _)) = row.first() else { break };
            match pivot_at[lead] {
                None => {
                    make_primitive(&mut row);
                    pivot_at[lead] = Some(pivots.len());
                    pivots.push(row);
                    break;
                }
                Some(k) => {
                    row = ff_reduce(&row, &pivots[k])?;
                }
            }
        }
    }
    Some(pivots)
}

/// Eliminates the leading entry of `row` using `piv` (same leading column).
fn ff_reduce<T: IntCoeff>(row: &[(usize, T)], piv: &[(usize, T)]) -> Option<Vec<(usize, T)>> {
    let a = &row[0].1;
    let b = &piv[0].1;
    let g = a.gcd(b);
    let (a, b) = (a.div_exact(&g), b.div_exact(&g));
    // result = b*row - a*piv
    let mut out = Vec::with_capacity(row.len() + piv.len());
    let (mut i, mut j) = (1, 1);
    let zero = T::zero();
    while i < row.len() || j < piv.len() {
        let ci = row.get(i).map_or(usize::MAX, |e| e.0);
        let cj = piv.get(j).map_or(usize::MAX, |e| e.0);
        let (c, v) = if ci < cj {
            let v = T::mul_sub(&b, &row[i].1, &a, &zero)?;
            i += 1;
            (ci, v)
        } else if cj < ci {
            let v = T::mul_sub(&b, &zero, &a, &piv[j].1)?;
            j += 1;
            (cj, v)
        } else {
            let v = T::mul_sub(&b, &row[i].1, &a, &piv[j].1)?;
            i += 1;
            j += 1;
            (ci, v)
        };
        if !v.is_zero() {
            out.push((c, v));
        }
    }
    make_primitive(&mut out);
    Some(out)
}

fn modular_echelon(rows: Vec<Vec<(usize, u64)>>, p: u64, ncols: usize) -> Vec<Vec<(usize, u64)>> {
    let mut pivot_at: Vec<Option<usize>> = vec![None; ncols];
    let mut pivots: Vec<Vec<(usize, u64)>> = Vec::new();
    for mut row in rows {
        row.retain(|e| e.1 % p != 0);
        loop {
            let Some(&(lead, lv)) = row.first() else {
                break;
            };
            match pivot_at[lead] {
                None => {
                    let inv = mod_inv(lv, p);
                    for e in row.iter_mut() {
                        e.1 = e.1 * inv % p;
                    }
                    pivot_at[lead] = Some(pivots.len());
                    pivots.push(row);
                    break;
                }
                Some(k) => {
                    let piv = &pivots[k];
                    let f = lv; // pivot rows are monic
                    let mut out = Vec::with_capacity(row.len() + piv.len());
                    let (mut i, mut j) = (1, 1);
                    while i < row.len() || j < piv.len() {
                        let ci = row.get(i).map_or(usize::MAX, |e| e.0);
                        let cj = piv.get(j).map_or(usize::MAX, |e| e.0);
                        let (c, v) = if ci < cj {
                            i += 1;
                            (ci, row[i - 1].1)
                        } else if cj < ci {
                            j += 1;
                            (cj, (p - f * piv[j - 1].1 % p) % p)
                        } else {
                            i += 1;
                            j += 1;
                            (ci, (row[i - 1].1 + p - f * piv[j - 1].1 % p) % p)
                        };
                        if v != 0 {
                            out.push((c, v));
                        }
                    }
                    row = out;
                }
            }
        }
    }
    pivots
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(rows: &[Vec<i64>]) -> DenseMatrix {
        DenseMatrix::from_ints(Field::Rationals, rows)
    }

    #[test]
    fn rank_and_kernel_agree() {
        let m = q(&[vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1]]);
        assert_eq!(m.rank(), 2);
        let k = m.kernel();
        assert_eq!(k.len(), 1);
        assert!(m.mul_vec(&k[0]).iter().all(Scalar::is_zero));
    }

    #[test]
    fn inverse_round_trip() {
        let m = q(&[vec![2, 1], vec![7, 4]]);
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).is_identity());
        assert!(q(&[vec![1, 2], vec![2, 4]]).inverse().is_none());
    }

    #[test]
    fn determinant_of_permutation_sign() {
        let m = q(&[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 3]]);
        assert_eq!(m.determinant().to_i64(), Some(-3));
    }

    #[test]
    fn solve_finds_solution_or_none() {
        let m = q(&[vec![1, 1], vec![1, -1]]);
        let f = Field::Rationals;
        let x = m.solve(&[Scalar::from_int(f, 3), Scalar::from_int(f, 1)]).unwrap();
        assert_eq!((x[0].to_i64(), x[1].to_i64()), (Some(2), Some(1)));
        let s = q(&[vec![1, 1], vec![2, 2]]);
        assert!(s.solve(&[Scalar::from_int(f, 1), Scalar::from_int(f, 3)]).is_none());
    }

    #[test]
    fn overflowing_entries_fall_back_to_bigint() {
        let big = i64::MAX;
        let m = q(&[vec![big, big - 1, 3], vec![big - 2, big, 5], vec![1, 1, 1]]);
        let dense_rank = {
            let (_, p) = m.rref();
            p.len()
        };
        assert_eq!(m.rank(), dense_rank);
    }

    #[test]
    fn empty_matrices_have_rank_zero() {
        assert_eq!(DenseMatrix::zeros(Field::Rationals, 0, 4).rank(), 0);
        assert_eq!(DenseMatrix::zeros(Field::Rationals, 3, 0).rank(), 0);
    }
}
