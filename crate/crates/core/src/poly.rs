//! Sparse multivariate polynomials over a [`Field`].
//!
//! Terms are kept sorted in descending graded reverse-lexicographic order with
//! `x0 > x1 > ... > xn`, so structural equality is mathematical equality.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::AlgebraError;
use crate::linalg::DenseMatrix;
use crate::scalar::{Field, Scalar};

pub const MAX_VARS: usize = 12;

/// Exponent vector with cached total degree.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: [u16; MAX_VARS],
    nvars: u8,
    deg: u32,
}

impl Monomial {
    pub fn one(nvars: usize) -> Monomial {
        assert!(nvars <= MAX_VARS);
        Monomial { exps: [0; MAX_VARS], nvars: nvars as u8, deg: 0 }
    }

    pub fn var(nvars: usize, i: usize) -> Monomial {
        let mut m = Monomial::one(nvars);
        m.exps[i] = 1;
        m.deg = 1;
        m
    }

    pub fn from_exponents(exps: &[u32]) -> Monomial {
        assert!(exps.len() <= MAX_VARS);
        let mut m = Monomial::one(exps.len());
        for (i, &e) in exps.iter().enumerate() {
            m.exps[i] = u16::try_from(e).expect("exponent too large");
            m.deg += e;
        }
        m
    }

    pub fn nvars(&self) -> usize {
        self.nvars as usize
    }

    pub fn degree(&self) -> u32 {
        self.deg
    }

    pub fn exp(&self, i: usize) -> u32 {
        self.exps[i] as u32
    }

    pub fn exponents(&self) -> Vec<u32> {
        self.exps[..self.nvars()].iter().map(|&e| e as u32).collect()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut m = *self;
        for i in 0..self.nvars() {
            m.exps[i] += other.exps[i];
        }
        m.deg += other.deg;
        m
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.deg <= other.deg && (0..self.nvars()).all(|i| self.exps[i] <= other.exps[i])
    }

    /// `other / self`, assuming divisibility.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        let mut m = *other;
        for i in 0..self.nvars() {
            m.exps[i] -= self.exps[i];
        }
        m.deg -= self.deg;
        m
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let mut m = *self;
        m.deg = 0;
        for i in 0..self.nvars() {
            m.exps[i] = self.exps[i].max(other.exps[i]);
            m.deg += m.exps[i] as u32;
        }
        m
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut m = *self;
        m.deg = 0;
        for i in 0..self.nvars() {
            m.exps[i] = self.exps[i].min(other.exps[i]);
            m.deg += m.exps[i] as u32;
        }
        m
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        (0..self.nvars()).all(|i| self.exps[i] == 0 || other.exps[i] == 0)
    }

    pub fn with_exp(&self, i: usize, e: u32) -> Monomial {
        let mut m = *self;
        m.deg = m.deg - m.exps[i] as u32 + e;
        m.exps[i] = e as u16;
        m
    }

    /// Drops variable `i` from the exponent vector.
    pub fn remove_var(&self, i: usize) -> Monomial {
        let mut out = Monomial::one(self.nvars() - 1);
        let mut k = 0;
        for j in 0..self.nvars() {
            if j != i {
                out.exps[k] = self.exps[j];
                out.deg += self.exps[j] as u32;
                k += 1;
            }
        }
        out
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", MonomialDisplay(self))
    }
}

struct MonomialDisplay<'a>(&'a Monomial);

impl fmt::Display for MonomialDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.0;
        if m.deg == 0 {
            return write!(f, "1");
        }
        let mut first = true;
        for i in 0..m.nvars() {
            let e = m.exps[i];
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "x{i}")?;
            } else {
                write!(f, "x{i}^{e}")?;
            }
        }
        Ok(())
    }
}

/// A term order on monomials.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MonomialOrder {
    /// Graded reverse lexicographic, `x0 > x1 > ...`.
    GrevLex,
    /// Pure lexicographic, `x0 > x1 > ...`.
    Lex,
}

impl MonomialOrder {
    pub fn cmp(self, a: &Monomial, b: &Monomial) -> Ordering {
        match self {
            MonomialOrder::GrevLex => a.deg.cmp(&b.deg).then_with(|| {
                for i in (0..a.nvars()).rev() {
                    if a.exps[i] != b.exps[i] {
                        return b.exps[i].cmp(&a.exps[i]);
                    }
                }
                Ordering::Equal
            }),
            MonomialOrder::Lex => {
                for i in 0..a.nvars() {
                    if a.exps[i] != b.exps[i] {
                        return a.exps[i].cmp(&b.exps[i]);
                    }
                }
                Ordering::Equal
            }
        }
    }
}

/// Polynomial ring `K[x0, ..., x_{nvars-1}]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PolyRing {
    nvars: usize,
    field: Field,
}

impl PolyRing {
    pub fn new(nvars: usize, field: Field) -> Result<PolyRing, AlgebraError> {
        if nvars > MAX_VARS {
            return Err(AlgebraError::TooManyVariables { got: nvars, max: MAX_VARS });
        }
        Ok(PolyRing { nvars, field })
    }

    /// Coordinate ring of projective n-space.
    pub fn projective(n: usize, field: Field) -> PolyRing {
        PolyRing::new(n + 1, field).expect("projective dimension too large")
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Projective dimension `nvars - 1`.
    pub fn n(&self) -> usize {
        self.nvars - 1
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn with_field(&self, field: Field) -> PolyRing {
        PolyRing { nvars: self.nvars, field }
    }

    pub fn with_nvars(&self, nvars: usize) -> PolyRing {
        PolyRing::new(nvars, self.field).expect("too many variables")
    }

    pub fn var(&self, i: usize) -> Poly {
        Poly::monomial(*self, Monomial::var(self.nvars, i), Scalar::one(self.field))
    }

    pub fn vars(&self) -> Vec<Poly> {
        (0..self.nvars).map(|i| self.var(i)).collect()
    }

    pub fn zero(&self) -> Poly {
        Poly::zero(*self)
    }

    pub fn constant(&self, v: i64) -> Poly {
        Poly::constant(*self, Scalar::from_int(self.field, v))
    }

    pub fn parse(&self, s: &str) -> Result<Poly, AlgebraError> {
        Poly::parse(*self, s)
    }

    /// dim S_d.
    pub fn graded_dim(&self, d: i64) -> usize {
        if d < 0 {
            0
        } else {
            binomial(self.nvars as u64 - 1 + d as u64, self.nvars as u64 - 1) as usize
        }
    }
}

/// Binomial coefficient for nonnegative arguments.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}

/// `C(n + d, n)` read as the Hilbert polynomial of `K[x0..xn]`, valid for every integer `d`.
pub fn hilbert_binomial(n: u32, d: i64) -> i128 {
    let mut num: i128 = 1;
    let mut den: i128 = 1;
    for i in 1..=n as i128 {
        num *= d as i128 + i;
        den *= i;
    }
    num / den
}

/// Monomials of degree `d` in `nvars` variables, descending grevlex.
pub fn monomials_of_degree(nvars: usize, d: i64) -> Vec<Monomial> {
    if d < 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur = vec![0u32; nvars];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(Monomial::from_exponents(cur));
            return;
        }
        for e in (0..=left).rev() {
            cur[i] = e;
            rec(i + 1, left - e, cur, out);
        }
    }
    if nvars == 0 {
        if d == 0 {
            out.push(Monomial::one(0));
        }
        return out;
    }
    rec(0, d as u32, &mut cur, &mut out);
    out.sort_by(|a, b| MonomialOrder::GrevLex.cmp(b, a));
    out
}

/// Basis of `S_d` in descending grevlex order; empty for `d < 0`.
pub fn monomial_basis(ring: &PolyRing, d: i64) -> Vec<Monomial> {
    monomials_of_degree(ring.nvars, d)
}

/// Index lookup for a monomial basis.
pub fn basis_index(basis: &[Monomial]) -> HashMap<Monomial, usize> {
    basis.iter().enumerate().map(|(i, m)| (*m, i)).collect()
}

/// Matrix of multiplication by a homogeneous `f` from `S_d` to `S_{d+deg f}`.
/// Column `j` holds the coordinates of `f` times the `j`-th basis monomial.
pub fn mult_map(f: &Poly, d: i64) -> Result<DenseMatrix, AlgebraError> {
    let ring = f.ring();
    let e = if f.is_zero() { 0 } else { f.homogeneous_degree().ok_or(AlgebraError::NotHomogeneous)? as i64 };
    let dom = monomial_basis(&ring, d);
    let cod = monomial_basis(&ring, d + e);
    let idx = basis_index(&cod);
    let mut m = DenseMatrix::zeros(ring.field(), cod.len(), dom.len());
    for (j, mono) in dom.iter().enumerate() {
        for (t, c) in f.terms() {
            let i = idx[&t.mul(mono)];
            m.set(i, j, c.clone());
        }
    }
    Ok(m)
}

/// Substitutes `x_i -> sum_j T[i][j] x_j`.
pub fn change_coordinates(g: &Poly, t: &DenseMatrix) -> Result<Poly, AlgebraError> {
    let ring = g.ring();
    let n = ring.nvars();
    if t.rows() != n || t.cols() != n {
        return Err(AlgebraError::Dimension(format!("expected {n}x{n} coordinate change")));
    }
    if t.rank() < n {
        return Err(AlgebraError::Singular);
    }
    Ok(g.substitute(&linear_images(ring, t), ring))
}

/// The linear forms `sum_j T[i][j] x_j`.
pub fn linear_images(ring: PolyRing, t: &DenseMatrix) -> Vec<Poly> {
    (0..t.rows())
        .map(|i| {
            let terms = (0..t.cols())
                .filter(|&j| !t.get(i, j).is_zero())
                .map(|j| (Monomial::var(ring.nvars(), j), t.get(i, j).clone()))
                .collect();
            Poly::from_terms(ring, terms)
        })
        .collect()
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    ring: PolyRing,
    terms: Vec<(Monomial, Scalar)>,
}

impl Poly {
    pub fn zero(ring: PolyRing) -> Poly {
        Poly { ring, terms: Vec::new() }
    }

    pub fn constant(ring: PolyRing, c: Scalar) -> Poly {
        Poly::monomial(ring, Monomial::one(ring.nvars), c)
    }

    pub fn monomial(ring: PolyRing, m: Monomial, c: Scalar) -> Poly {
        assert_eq!(m.nvars(), ring.nvars);
        if c.is_zero() {
            Poly::zero(ring)
        } else {
            Poly { ring, terms: vec![(m, c)] }
        }
    }

    /// Normalizes an arbitrary term list (sorts, merges, drops zeros).
    pub fn from_terms(ring: PolyRing, mut terms: Vec<(Monomial, Scalar)>) -> Poly {
        terms.sort_by(|a, b| MonomialOrder::GrevLex.cmp(&b.0, &a.0));
        let mut out: Vec<(Monomial, Scalar)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc += &c,
                _ => out.push((m, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        Poly { ring, terms: out }
    }

    /// Trusts that `terms` are sorted descending grevlex, unique and nonzero.
    pub fn from_sorted_terms(ring: PolyRing, terms: Vec<(Monomial, Scalar)>) -> Poly {
        debug_assert!(terms.windows(2).all(|w| MonomialOrder::GrevLex.cmp(&w[0].0, &w[1].0) == Ordering::Greater));
        Poly { ring, terms }
    }

    pub fn ring(&self) -> PolyRing {
        self.ring
    }

    pub fn field(&self) -> Field {
        self.ring.field
    }

    pub fn terms(&self) -> &[(Monomial, Scalar)] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<(Monomial, Scalar)> {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.deg == 0)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Maximal total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.deg).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.terms.windows(2).all(|w| w[0].0.deg == w[1].0.deg)
    }

    /// Degree when homogeneous and nonzero.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        if self.is_zero() || !self.is_homogeneous() {
            None
        } else {
            Some(self.terms[0].0.deg)
        }
    }

    pub fn coefficient(&self, m: &Monomial) -> Scalar {
        self.terms.iter().find(|(t, _)| t == m).map_or_else(|| Scalar::zero(self.field()), |(_, c)| c.clone())
    }

    /// Leading term in grevlex.
    pub fn lead(&self) -> Option<&(Monomial, Scalar)> {
        self.terms.first()
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.ring);
        }
        Poly { ring: self.ring, terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.ring);
        }
        Poly { ring: self.ring, terms: self.terms.iter().map(|(t, v)| (t.mul(m), v * c)).collect() }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut out = Poly::constant(self.ring, Scalar::one(self.field()));
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// `self / d` when `d` divides `self` exactly; `None` otherwise or for `d = 0`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (dm, dc) = d.lead()?.clone();
        let dc_inv = dc.inv()?;
        let mut rem = self.clone();
        let mut quot = Vec::new();
        while let Some((m, c)) = rem.lead().cloned() {
            if !dm.divides(&m) {
                return None;
            }
            let qm = dm.quotient_of(&m);
            let qc = &c * &dc_inv;
            rem = &rem - &d.mul_monomial(&qm, &qc);
            quot.push((qm, qc));
        }
        Some(Poly::from_terms(self.ring, quot))
    }

    pub fn eval(&self, point: &[Scalar]) -> Scalar {
        assert_eq!(point.len(), self.ring.nvars);
        let mut acc = Scalar::zero(self.field());
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (i, x) in point.iter().enumerate() {
                let e = m.exp(i);
                if e > 0 {
                    v *= &x.pow(e);
                }
            }
            acc += &v;
        }
        acc
    }

    /// Ring map `x_i -> images[i]` into `target`.
    pub fn substitute(&self, images: &[Poly], target: PolyRing) -> Poly {
        assert_eq!(images.len(), self.ring.nvars);
        let mut powers: Vec<Vec<Poly>> =
            images.iter().map(|p| vec![Poly::constant(target, Scalar::one(target.field)), p.clone()]).collect();
        let mut acc: Vec<(Monomial, Scalar)> = Vec::new();
        for (m, c) in &self.terms {
            let mut t = Poly::constant(target, c.clone());
            for (i, pw) in powers.iter_mut().enumerate() {
                let e = m.exp(i) as usize;
                if e == 0 {
                    continue;
                }
                while pw.len() <= e {
                    let next = &pw[pw.len() - 1] * &images[i];
                    pw.push(next);
                }
                t = &t * &pw[e];
            }
            acc.extend(t.terms);
        }
        Poly::from_terms(target, acc)
    }

    /// Re-reads the coefficients in another field (reduction modulo p).
    pub fn to_field(&self, field: Field) -> Option<Poly> {
        let ring = self.ring.with_field(field);
        let terms = self.terms.iter().map(|(m, c)| c.to_field(field).map(|v| (*m, v))).collect::<Option<Vec<_>>>()?;
        Some(Poly::from_terms(ring, terms))
    }

    pub fn parse(ring: PolyRing, s: &str) -> Result<Poly, AlgebraError> {
        let mut p = Parser { s: s.as_bytes(), pos: 0, ring };
        let out = p.expr()?;
        p.skip_ws();
        if p.pos < p.s.len() {
            return Err(p.err("unexpected character"));
        }
        Ok(out)
    }

    fn add_impl(&self, other: &Poly, negate: bool) -> Poly {
        assert_eq!(self.ring, other.ring, "polynomials from different rings");
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < other.terms.len() {
            let ord = match (self.terms.get(i), other.terms.get(j)) {
                (Some(a), Some(b)) => MonomialOrder::GrevLex.cmp(&a.0, &b.0),
                (Some(_), None) => Ordering::Greater,
                _ => Ordering::Less,
            };
            match ord {
                Ordering::Greater => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let (m, c) = &other.terms[j];
                    out.push((*m, if negate { -c } else { c.clone() }));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate {
                        &self.terms[i].1 - &other.terms[j].1
                    } else {
                        &self.terms[i].1 + &other.terms[j].1
                    };
                    if !c.is_zero() {
                        out.push((self.terms[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        Poly { ring: self.ring, terms: out }
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = if neg { -c } else { c.clone() };
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            if m.deg == 0 {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{}", MonomialDisplay(m))?;
            } else {
                write!(f, "{abs}*{}", MonomialDisplay(m))?;
            }
        }
        Ok(())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.add_impl(rhs, false)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.add_impl(rhs, true)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { ring: self.ring, terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect() }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.ring, rhs.ring, "polynomials from different rings");
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero(self.ring);
        }
        let mut acc: HashMap<Monomial, Scalar> = HashMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                let v = ca * cb;
                acc.entry(a.mul(b)).and_modify(|x| *x += &v).or_insert(v);
            }
        }
        Poly::from_terms(self.ring, acc.into_iter().collect())
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    ring: PolyRing,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> AlgebraError {
        AlgebraError::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Poly, AlgebraError> {
        let mut acc = Poly::zero(self.ring);
        let mut first = true;
        loop {
            let sign = match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    1
                }
                Some(b'-') => {
                    self.pos += 1;
                    -1
                }
                _ if first => 1,
                _ => break,
            };
            first = false;
            let t = self.term()?;
            acc = if sign < 0 { &acc - &t } else { &acc + &t };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly, AlgebraError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let f = self.factor()?;
                    acc = &acc * &f;
                }
                Some(c) if c == b'x' || c == b'(' || c.is_ascii_digit() => {
                    let f = self.factor()?;
                    acc = &acc * &f;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Poly, AlgebraError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let e = self.uint()?;
            let e = u32::try_from(e).map_err(|_| self.err("exponent too large"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn uint(&mut self) -> Result<u64, AlgebraError> {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| AlgebraError::Parse { pos: start, msg: "number too large".into() })
    }

    fn digits(&mut self) -> Result<&str, AlgebraError> {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        Ok(std::str::from_utf8(&self.s[start..self.pos]).unwrap())
    }

    fn atom(&mut self) -> Result<Poly, AlgebraError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(b'x') => {
                self.pos += 1;
                let start = self.pos;
                let i = self.uint()? as usize;
                if i >= self.ring.nvars {
                    return Err(AlgebraError::Parse {
                        pos: start - 1,
                        msg: format!("variable x{i} outside x0..x{}", self.ring.nvars.saturating_sub(1)),
                    });
                }
                Ok(self.ring.var(i))
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                let mut text = self.digits()?.to_string();
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    self.skip_ws();
                    text.push('/');
                    text.push_str(self.digits()?);
                }
                let v = Scalar::parse(self.ring.field, &text).map_err(|e| match e {
                    AlgebraError::Parse { msg, .. } => AlgebraError::Parse { pos: start, msg },
                    other => other,
                })?;
                Ok(Poly::constant(self.ring, v))
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}
