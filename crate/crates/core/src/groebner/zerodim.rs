//! Zero-dimensional ideals: local algebras of fat points and projective zero loci.

use serde::Serialize;

use crate::error::AlgebraError;
use crate::linalg::DenseMatrix;
use crate::poly::{monomials_of_degree, Monomial, MonomialOrder, Poly, PolyRing};
use crate::scalar::{Field, Scalar};

use super::roots::{rational_roots, UniPoly};
use super::{groebner_ideal_in, IdealGB};

/// An Artinian local algebra supported at the origin, given by the matrices of
/// multiplication by the coordinates on a basis `e_1..e_m` with `e_1 = 1`.
#[derive(Clone, Debug)]
pub struct LocalAlgebra {
    field: Field,
    generators: Vec<Poly>,
    basis: Vec<Monomial>,
    matrices: Vec<DenseMatrix>,
}

impl LocalAlgebra {
    /// Validates that the matrices are square of one size, commute and are nilpotent.
    pub fn from_matrices(field: Field, matrices: Vec<DenseMatrix>) -> Result<LocalAlgebra, AlgebraError> {
        let m = matrices.first().map_or(0, DenseMatrix::rows);
        for c in &matrices {
            if c.rows() != m || c.cols() != m {
                return Err(AlgebraError::Dimension(format!("expected {m}x{m} multiplication matrices")));
            }
        }
        check_commuting_nilpotent(&matrices)?;
        Ok(LocalAlgebra { field, generators: Vec::new(), basis: Vec::new(), matrices })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// Number of chart coordinates.
    pub fn nvars(&self) -> usize {
        self.matrices.len()
    }

    /// Vector-space dimension.
    pub fn length(&self) -> usize {
        self.matrices.first().map_or(0, DenseMatrix::rows)
    }

    pub fn matrices(&self) -> &[DenseMatrix] {
        &self.matrices
    }

    /// Standard monomials (empty when built directly from matrices).
    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn generators(&self) -> &[Poly] {
        &self.generators
    }

    /// Is the first basis vector a generator under the matrix action?
    pub fn is_cyclic(&self) -> bool {
        let m = self.length();
        if m == 0 {
            return true;
        }
        let mut span = DenseMatrix::zeros(self.field, m, 1);
        span.set(0, 0, Scalar::one(self.field));
        let mut rank = 1;
        loop {
            let mut next = span.clone();
            for c in &self.matrices {
                next = next.hstack(&c.mul(&span));
            }
            let r = next.rank();
            if r == rank {
                return r == m;
            }
            rank = r;
            span = next;
        }
    }
}

fn check_commuting_nilpotent(ms: &[DenseMatrix]) -> Result<(), AlgebraError> {
    for (i, a) in ms.iter().enumerate() {
        for b in &ms[i + 1..] {
            if a.mul(b) != b.mul(a) {
                return Err(AlgebraError::NotCommuting);
            }
        }
        if !a.pow(a.rows() as u32).is_zero() {
            return Err(AlgebraError::NotNilpotent);
        }
    }
    Ok(())
}

/// Local algebra of an affine ideal supported at the origin of its chart.
///
/// The basis is the lex standard-monomial basis, listed by ascending degree and
/// then by descending lex order (so `1, x, y, z, ...`).
pub fn local_algebra(gens: &[Poly]) -> Result<LocalAlgebra, AlgebraError> {
    let ring = gens.first().map(|g| g.ring()).ok_or(AlgebraError::PositiveDimensional)?;
    let gb = lex_basis(ring, gens)?;
    if gb.is_unit() {
        return Err(AlgebraError::SupportNotAtOrigin);
    }
    let mut basis = gb.standard_monomials().ok_or(AlgebraError::PositiveDimensional)?;
    basis.sort_by(|a, b| a.degree().cmp(&b.degree()).then_with(|| MonomialOrder::Lex.cmp(b, a)));
    let index: std::collections::HashMap<Monomial, usize> = basis.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let m = basis.len();
    let field = ring.field();
    let mut matrices = Vec::with_capacity(ring.nvars());
    for v in 0..ring.nvars() {
        let mut c = DenseMatrix::zeros(field, m, m);
        for (j, e) in basis.iter().enumerate() {
            let prod = Poly::monomial(ring, e.mul(&Monomial::var(ring.nvars(), v)), Scalar::one(field));
            for (t, coeff) in gb.normal_form(&prod).terms() {
                c.set(index[t], j, coeff.clone());
            }
        }
        matrices.push(c);
    }
    check_commuting_nilpotent(&matrices).map_err(|e| match e {
        AlgebraError::NotNilpotent => AlgebraError::SupportNotAtOrigin,
        other => other,
    })?;
    Ok(LocalAlgebra { field, generators: gens.to_vec(), basis, matrices })
}

/// A rational point of a zero-dimensional projective scheme.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocusPoint {
    /// Projective coordinates, first nonzero coordinate equal to one.
    pub coords: Vec<Scalar>,
    /// Length of the local ring at the point.
    pub local_length: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ZeroLocus {
    Empty,
    /// Finitely many points; `complete` when the rational points carry the whole length.
    Finite {
        length: usize,
        points: Vec<LocusPoint>,
        complete: bool,
    },
    /// Projective dimension of a positive-dimensional locus.
    Positive {
        dim: usize,
    },
}

impl ZeroLocus {
    pub fn is_empty(&self) -> bool {
        matches!(self, ZeroLocus::Empty)
    }
}

/// Zero locus in projective space of a homogeneous ideal.
pub fn projective_zero_locus(ideal: &IdealGB) -> Result<ZeroLocus, AlgebraError> {
    if !ideal.is_homogeneous() {
        return Err(AlgebraError::NotHomogeneous);
    }
    if ideal.order() != MonomialOrder::GrevLex {
        return Err(AlgebraError::Dimension("zero locus expects a grevlex basis".into()));
    }
    let hs = ideal.hilbert_series();
    let Some(krull) = hs.krull_dim() else {
        return Ok(ZeroLocus::Empty);
    };
    match krull {
        0 => return Ok(ZeroLocus::Empty),
        1 => {}
        d => return Ok(ZeroLocus::Positive { dim: d - 1 }),
    }
    let length = hs.multiplicity() as usize;
    let ring = ideal.ring();
    let nvars = ring.nvars();
    let mut points = Vec::new();
    for k in 0..nvars {
        let chart = ring.with_nvars(nvars - k - 1);
        let images: Vec<Poly> = (0..nvars)
            .map(|j| match j.cmp(&k) {
                std::cmp::Ordering::Less => chart.zero(),
                std::cmp::Ordering::Equal => chart.constant(1),
                std::cmp::Ordering::Greater => chart.var(j - k - 1),
            })
            .collect();
        let gens: Vec<Poly> = ideal.basis().iter().map(|g| g.substitute(&images, chart)).collect();
        // lengths are measured in the full affine chart x_k = 1
        let full = ring.with_nvars(nvars - 1);
        let full_images: Vec<Poly> = (0..nvars)
            .map(|j| match j.cmp(&k) {
                std::cmp::Ordering::Less => full.var(j),
                std::cmp::Ordering::Equal => full.constant(1),
                std::cmp::Ordering::Greater => full.var(j - 1),
            })
            .collect();
        let full_gens: Vec<Poly> = ideal.basis().iter().map(|g| g.substitute(&full_images, full)).collect();
        for sol in solve_affine(chart, &gens)? {
            let mut affine = vec![Scalar::zero(ring.field()); k];
            affine.extend(sol.iter().cloned());
            let local_length = local_length_at(full, &full_gens, &affine)?;
            let mut coords = vec![Scalar::zero(ring.field()); k];
            coords.push(Scalar::one(ring.field()));
            coords.extend(sol);
            points.push(LocusPoint { coords, local_length });
        }
    }
    points.sort_by(|a, b| a.coords.cmp(&b.coords));
    let found: usize = points.iter().map(|p| p.local_length).sum();
    Ok(ZeroLocus::Finite { length, complete: found == length, points })
}

/// Lex basis computed from the reduced grevlex basis; lex directly on the
/// input suffers coefficient growth over the rationals.
fn lex_basis(ring: PolyRing, gens: &[Poly]) -> Result<IdealGB, AlgebraError> {
    let grevlex = groebner_ideal_in(ring, gens, MonomialOrder::GrevLex)?;
    groebner_ideal_in(ring, grevlex.basis(), MonomialOrder::Lex)
}

/// All base-field solutions of a zero-dimensional affine system.
pub(crate) fn solve_affine(ring: PolyRing, gens: &[Poly]) -> Result<Vec<Vec<Scalar>>, AlgebraError> {
    let gb = lex_basis(ring, gens)?;
    if gb.is_unit() {
        return Ok(Vec::new());
    }
    let r = ring.nvars();
    if r == 0 {
        return Ok(vec![Vec::new()]);
    }
    let last = r - 1;
    let uni = gb
        .basis()
        .iter()
        .find(|g| g.terms().iter().all(|(m, _)| m.degree() == m.exp(last)))
        .ok_or(AlgebraError::PositiveDimensional)?;
    let mut coeffs = vec![Scalar::zero(ring.field()); uni.degree().unwrap() as usize + 1];
    for (m, c) in uni.terms() {
        coeffs[m.exp(last) as usize] = c.clone();
    }
    let roots = rational_roots(&UniPoly::new(ring.field(), coeffs));
    let sub = ring.with_nvars(last);
    let mut out = Vec::new();
    for root in roots {
        let mut images: Vec<Poly> = (0..last).map(|i| sub.var(i)).collect();
        images.push(Poly::constant(sub, root.clone()));
        let reduced: Vec<Poly> = gb.basis().iter().map(|g| g.substitute(&images, sub)).collect();
        for mut sol in solve_affine(sub, &reduced)? {
            sol.push(root.clone());
            out.push(sol);
        }
    }
    Ok(out)
}

/// Length of the local ring of `V(gens)` at `point`: colength of `I + m^L` once it stabilizes.
pub(crate) fn local_length_at(ring: PolyRing, gens: &[Poly], point: &[Scalar]) -> Result<usize, AlgebraError> {
    let r = ring.nvars();
    if r == 0 {
        return Ok(1);
    }
    let images: Vec<Poly> = (0..r).map(|i| &ring.var(i) + &Poly::constant(ring, point[i].clone())).collect();
    let shifted: Vec<Poly> = gens.iter().map(|g| g.substitute(&images, ring)).collect();
    let mut prev: Option<usize> = None;
    for l in 1.. {
        let mut all = shifted.clone();
        all.extend(monomials_of_degree(r, l).into_iter().map(|m| Poly::monomial(ring, m, Scalar::one(ring.field()))));
        let gb = groebner_ideal_in(ring, &all, MonomialOrder::GrevLex)?;
        let c = gb.colength().expect("adding a power of the maximal ideal makes the quotient finite");
        if prev == Some(c) {
            return Ok(c);
        }
        prev = Some(c);
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groebner::groebner_ideal;

    fn q(nvars: usize) -> PolyRing {
        PolyRing::new(nvars, Field::Rationals).unwrap()
    }

    #[test]
    fn single_variable_point() {
        let r = q(1);
        let la = local_algebra(&[r.var(0)]).unwrap();
        assert_eq!(la.length(), 1);
        assert!(la.matrices()[0].is_zero());
    }

    #[test]
    fn curvilinear_algebra_is_jordan_shift() {
        let r = q(3);
        let la = local_algebra(&[r.parse("x0^4").unwrap(), r.var(1), r.var(2)]).unwrap();
        assert_eq!(la.length(), 4);
        let c0 = &la.matrices()[0];
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(c0.get(i, j).is_one(), i == j + 1);
            }
        }
        assert!(la.matrices()[1].is_zero() && la.matrices()[2].is_zero());
        assert!(la.is_cyclic());
    }

    #[test]
    fn poonen_basis() {
        let r = q(3);
        let gens: Vec<Poly> = ["x0^2 + x2^3", "x0*x1", "x1^2 + x2^3", "x0*x2", "x1*x2", "x2^4"]
            .iter()
            .map(|s| r.parse(s).unwrap())
            .collect();
        let la = local_algebra(&gens).unwrap();
        let shown: Vec<String> = la.basis().iter().map(|m| format!("{m:?}")).collect();
        assert_eq!(shown, ["1", "x0", "x1", "x2", "x2^2", "x2^3"]);
    }

    #[test]
    fn rejects_bad_supports() {
        let r = q(2);
        assert_eq!(local_algebra(&[r.var(0)]).unwrap_err(), AlgebraError::PositiveDimensional);
        let off = [r.parse("x0 - 1").unwrap(), r.var(1)];
        assert_eq!(local_algebra(&off).unwrap_err(), AlgebraError::SupportNotAtOrigin);
    }

    #[test]
    fn zero_locus_of_coordinate_ideal() {
        let r = q(4);
        let gb = groebner_ideal(&[r.var(0), r.var(1), r.var(2)]).unwrap();
        match projective_zero_locus(&gb).unwrap() {
            ZeroLocus::Finite { length, points, complete } => {
                assert_eq!((length, complete, points.len()), (1, true, 1));
                let c: Vec<i64> = points[0].coords.iter().map(|s| s.to_i64().unwrap()).collect();
                assert_eq!(c, [0, 0, 0, 1]);
            }
            other => panic!("{other:?}"),
        }
        let all = groebner_ideal(&r.vars()).unwrap();
        assert!(projective_zero_locus(&all).unwrap().is_empty());
        let line = groebner_ideal(&[r.var(0), r.var(1)]).unwrap();
        assert_eq!(projective_zero_locus(&line).unwrap(), ZeroLocus::Positive { dim: 1 });
    }

    #[test]
    fn irrational_points_are_flagged() {
        // x0^2 - 2 x2^2 = 0 = x1 on P^2: two conjugate points
        let r = q(3);
        let gb = groebner_ideal(&[r.parse("x0^2 - 2*x2^2").unwrap(), r.var(1)]).unwrap();
        match projective_zero_locus(&gb).unwrap() {
            ZeroLocus::Finite { length, points, complete } => {
                assert_eq!((length, points.len(), complete), (2, 0, false));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn double_point_length() {
        let r = q(3);
        let gb = groebner_ideal(&[r.parse("x0^2").unwrap(), r.var(1)]).unwrap();
        match projective_zero_locus(&gb).unwrap() {
            ZeroLocus::Finite { length, points, complete } => {
                assert_eq!((length, complete), (2, true));
                assert_eq!(points[0].local_length, 2);
            }
            other => panic!("{other:?}"),
        }
    }
}
