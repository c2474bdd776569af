//! Coherent sheaves on projective space given by a one-step free presentation.

pub mod classify;
pub mod cohomology;
pub mod construct;
pub mod error;
pub mod presentation;
pub mod structure;

pub use error::{Result, SheafError};
pub use presentation::{
    FittingIdeal, HyperplaneCertificate, HyperplaneChoice, Restriction, SheafPresentation, TransformationRecord,
};
