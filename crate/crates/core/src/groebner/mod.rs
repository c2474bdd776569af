//! Groebner bases of ideals and of graded submodules of free modules.

mod engine;
mod hilbert;
mod roots;
mod zerodim;

use crate::error::AlgebraError;
use crate::linalg::DenseMatrix;
use crate::poly::{monomials_of_degree, Monomial, MonomialOrder, Poly, PolyRing};
use crate::scalar::Scalar;

use engine::{buchberger, ModuleOrder, Reducer, Term, Vector};

pub use hilbert::{module_series, monomial_ideal_numerator, HilbertSeries, ReducedSeries};
pub use roots::{rational_roots, UniPoly};
pub use zerodim::{local_algebra, projective_zero_locus, LocalAlgebra, LocusPoint, ZeroLocus};

fn poly_to_vector(order: ModuleOrder, p: &Poly, comp: u32) -> Vector {
    let mut v: Vector = p.terms().iter().map(|(m, c)| Term { mon: *m, comp, coeff: c.clone() }).collect();
    order.sort(&mut v);
    v
}

fn vector_to_polys(ring: PolyRing, v: &[Term], rank: usize) -> Vec<Poly> {
    let mut parts: Vec<Vec<(Monomial, Scalar)>> = vec![Vec::new(); rank];
    for t in v {
        parts[t.comp as usize].push((t.mon, t.coeff.clone()));
    }
    parts.into_iter().map(|ts| Poly::from_terms(ring, ts)).collect()
}

/// Reduced Groebner basis of an ideal.
#[derive(Clone, Debug)]
pub struct IdealGB {
    ring: PolyRing,
    order: MonomialOrder,
    generators: Vec<Poly>,
    basis: Vec<Poly>,
    internal: Vec<Vector>,
    homogeneous: bool,
}

/// Groebner basis in grevlex.
pub fn groebner_ideal(gens: &[Poly]) -> Result<IdealGB, AlgebraError> {
    let ring = gens.first().map(|g| g.ring()).ok_or(AlgebraError::Dimension("no generators".into()))?;
    groebner_ideal_in(ring, gens, MonomialOrder::GrevLex)
}

/// Groebner basis in `ring` under the given order; an empty list gives the zero ideal.
pub fn groebner_ideal_in(ring: PolyRing, gens: &[Poly], order: MonomialOrder) -> Result<IdealGB, AlgebraError> {
    if gens.iter().any(|g| g.ring() != ring) {
        return Err(AlgebraError::RingMismatch);
    }
    let morder = ModuleOrder { mono: order };
    let vecs: Vec<Vector> = gens.iter().map(|g| poly_to_vector(morder, g, 0)).collect();
    let internal = buchberger(morder, vecs, &[0], true);
    let basis = internal.iter().map(|v| vector_to_polys(ring, v, 1).pop().unwrap()).collect();
    Ok(IdealGB {
        ring,
        order,
        generators: gens.to_vec(),
        homogeneous: gens.iter().all(Poly::is_homogeneous),
        basis,
        internal,
    })
}

impl IdealGB {
    pub fn ring(&self) -> PolyRing {
        self.ring
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn generators(&self) -> &[Poly] {
        &self.generators
    }

    pub fn basis(&self) -> &[Poly] {
        &self.basis
    }

    pub fn is_homogeneous(&self) -> bool {
        self.homogeneous
    }

    /// Leading monomials in the basis order.
    pub fn lead_monomials(&self) -> Vec<Monomial> {
        self.internal.iter().map(|v| v[0].mon).collect()
    }

    pub fn is_unit(&self) -> bool {
        self.internal.iter().any(|v| v[0].mon.degree() == 0)
    }

    pub fn is_zero_ideal(&self) -> bool {
        self.internal.is_empty()
    }

    pub fn normal_form(&self, f: &Poly) -> Poly {
        let order = ModuleOrder { mono: self.order };
        let red = Reducer::new(order, &self.internal);
        let v = red.reduce(poly_to_vector(order, f, 0));
        vector_to_polys(self.ring, &v, 1).pop().unwrap()
    }

    pub fn contains(&self, f: &Poly) -> bool {
        self.normal_form(f).is_zero()
    }

    /// Series of `S/in(I)`, which equals that of `S/I` for homogeneous ideals.
    pub fn hilbert_series(&self) -> HilbertSeries {
        HilbertSeries::new(self.ring.nvars(), 0, monomial_ideal_numerator(&self.lead_monomials()))
    }

    /// Krull dimension of `S/I`; `None` for the unit ideal.
    pub fn krull_dim(&self) -> Option<usize> {
        self.hilbert_series().krull_dim()
    }

    /// Standard monomials when finitely many, in ascending degree.
    pub fn standard_monomials(&self) -> Option<Vec<Monomial>> {
        let nvars = self.ring.nvars();
        let leads = self.lead_monomials();
        // finite iff every variable has a pure power among the leads
        for v in 0..nvars {
            if !leads.iter().any(|m| m.exp(v) > 0 && m.degree() == m.exp(v)) {
                return None;
            }
        }
        let mut out = Vec::new();
        let mut d = 0;
        loop {
            let layer: Vec<Monomial> =
                monomials_of_degree(nvars, d).into_iter().filter(|m| !leads.iter().any(|l| l.divides(m))).collect();
            if layer.is_empty() {
                break;
            }
            out.extend(layer);
            d += 1;
        }
        Some(out)
    }

    /// Vector-space dimension of `S/I` when finite.
    pub fn colength(&self) -> Option<usize> {
        self.standard_monomials().map(|s| s.len())
    }
}

/// Reduced Groebner basis of a graded submodule of `(+)_i S(-degrees[i])`.
#[derive(Clone, Debug)]
pub struct ModuleGB {
    ring: PolyRing,
    degrees: Vec<i64>,
    generators: Vec<Vec<Poly>>,
    basis: Vec<Vec<Poly>>,
    internal: Vec<Vector>,
}

/// `degrees[i]` is the degree of the `i`-th free generator; each generator must be
/// homogeneous: `deg(g_i) + degrees[i]` constant over its nonzero components.
pub fn groebner_module(ring: PolyRing, degrees: &[i64], gens: &[Vec<Poly>]) -> Result<ModuleGB, AlgebraError> {
    let rank = degrees.len();
    let order = ModuleOrder { mono: MonomialOrder::GrevLex };
    let mut vecs = Vec::with_capacity(gens.len());
    for g in gens {
        if g.len() != rank {
            return Err(AlgebraError::Dimension(format!("generator of length {} in rank {rank}", g.len())));
        }
        let mut total: Option<i64> = None;
        let mut v: Vector = Vec::new();
        for (i, p) in g.iter().enumerate() {
            if p.ring() != ring {
                return Err(AlgebraError::RingMismatch);
            }
            if p.is_zero() {
                continue;
            }
            let d = p.homogeneous_degree().ok_or(AlgebraError::Inhomogeneous)? as i64 + degrees[i];
            if total.is_some_and(|t| t != d) {
                return Err(AlgebraError::Inhomogeneous);
            }
            total = Some(d);
            v.extend(p.terms().iter().map(|(m, c)| Term { mon: *m, comp: i as u32, coeff: c.clone() }));
        }
        order.sort(&mut v);
        vecs.push(v);
    }
    let internal = buchberger(order, vecs, degrees, rank == 1);
    let basis = internal.iter().map(|v| vector_to_polys(ring, v, rank)).collect();
    Ok(ModuleGB { ring, degrees: degrees.to_vec(), generators: gens.to_vec(), basis, internal })
}

impl ModuleGB {
    pub fn ring(&self) -> PolyRing {
        self.ring
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    pub fn rank(&self) -> usize {
        self.degrees.len()
    }

    pub fn generators(&self) -> &[Vec<Poly>] {
        &self.generators
    }

    pub fn basis(&self) -> &[Vec<Poly>] {
        &self.basis
    }

    /// Leading monomials per component.
    pub fn lead_monomials(&self) -> Vec<Vec<Monomial>> {
        let mut out = vec![Vec::new(); self.rank()];
        for v in &self.internal {
            out[v[0].comp as usize].push(v[0].mon);
        }
        out
    }

    /// Series of the quotient `(+) S(-degrees[i]) / N`.
    pub fn hilbert_series(&self) -> HilbertSeries {
        module_series(self.ring.nvars(), &self.degrees, &self.lead_monomials())
    }

    pub fn normal_form(&self, f: &[Poly]) -> Vec<Poly> {
        let order = ModuleOrder { mono: MonomialOrder::GrevLex };
        let mut v: Vector = Vec::new();
        for (i, p) in f.iter().enumerate() {
            v.extend(p.terms().iter().map(|(m, c)| Term { mon: *m, comp: i as u32, coeff: c.clone() }));
        }
        order.sort(&mut v);
        let red = Reducer::new(order, &self.internal);
        vector_to_polys(self.ring, &red.reduce(v), self.rank())
    }

    /// Standard basis of the quotient in degree `d`: pairs (component, monomial).
    pub fn standard_basis(&self, d: i64) -> Vec<(usize, Monomial)> {
        let leads = self.lead_monomials();
        let mut out = Vec::new();
        for (i, &deg) in self.degrees.iter().enumerate() {
            for m in monomials_of_degree(self.ring.nvars(), d - deg) {
                if !leads[i].iter().any(|l| l.divides(&m)) {
                    out.push((i, m));
                }
            }
        }
        out
    }

    /// Matrix of multiplication by a homogeneous `f` on the quotient, from degree
    /// `d` to degree `d + deg f`, in the standard bases.
    pub fn multiplication_matrix(&self, f: &Poly, d: i64) -> Result<DenseMatrix, AlgebraError> {
        let e = f.homogeneous_degree().ok_or(AlgebraError::NotHomogeneous)? as i64;
        let dom = self.standard_basis(d);
        let cod = self.standard_basis(d + e);
        let index: std::collections::HashMap<(usize, Monomial), usize> =
            cod.iter().enumerate().map(|(k, x)| (*x, k)).collect();
        let mut m = DenseMatrix::zeros(self.ring.field(), cod.len(), dom.len());
        for (j, (comp, mon)) in dom.iter().enumerate() {
            let mut vec = vec![Poly::zero(self.ring); self.rank()];
            vec[*comp] = f.mul_monomial(mon, &Scalar::one(self.ring.field()));
            let nf = self.normal_form(&vec);
            for (c, p) in nf.iter().enumerate() {
                for (t, v) in p.terms() {
                    let k = index[&(c, *t)];
                    m.set(k, j, v.clone());
                }
            }
        }
        Ok(m)
    }
}
