//! Exact algebra substrate: field elements, dense and sparse linear algebra,
//! multivariate polynomials, and Groebner bases for ideals and graded modules.

pub mod error;
pub mod groebner;
pub mod linalg;
pub mod poly;
pub mod scalar;

pub use error::AlgebraError;
pub use groebner::{
    groebner_ideal, groebner_ideal_in, groebner_module, local_algebra, projective_zero_locus, rational_roots,
    HilbertSeries, IdealGB, LocalAlgebra, LocusPoint, ModuleGB, UniPoly, ZeroLocus,
};
pub use linalg::{DenseMatrix, SparseRows};
pub use poly::{
    basis_index, binomial, change_coordinates, hilbert_binomial, linear_images, monomial_basis, monomials_of_degree,
    mult_map, Monomial, MonomialOrder, Poly, PolyRing, MAX_VARS,
};
pub use scalar::{Field, Scalar};
