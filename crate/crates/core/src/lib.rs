//! Kummer theory of the geometric adele ring of a curve.
//!
//! The crate models ideles over truncated Laurent-series local fields, with constants in a
//! lazily extended finite-field tower, and provides deciders for isomorphism and conjugacy
//! of `p`-cyclic Galois extensions of the adele ring.

pub mod adeles;
pub mod arith;
pub mod coeff_field;
pub mod error;
pub mod global_galois;
pub mod harrison;
pub mod laurent;
pub mod local_algebra;
pub mod p1_ingest;
pub mod perm;
pub mod sample;

pub use adeles::{Adele, Idele, IdeleRepr, Point, RamProfile, ValuationVector};
pub use coeff_field::{FieldCtx, FieldCtxRepr, FieldElem};
pub use error::{Error, Result};
pub use global_galois::{
    AlgebraElement, Character, Conjugation, CyclicSubgroup, GlobalAutomorphism, PrimitiveElement, RamTuple,
};
pub use harrison::{ExtensionClass, ValuationClass};
pub use laurent::{LaurentSeries, LocalField, SeriesRepr, DEFAULT_PREC};
pub use local_algebra::{LocalAlgebra, LocalAutomorphism, LocalElem, LocalIsom, LocalStructure};
pub use p1_ingest::{RationalFunction, RationalFunctionRepr, SuperellipticClass};
pub use perm::Permutation;
