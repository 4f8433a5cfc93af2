//! Exact couples in semiabelian categories, computed.
//!
//! Two computable model categories back the generic constructions: finite
//! dimensional rational vector spaces ([`vect::Vect`], abelian) and finitely
//! filtered ones ([`filt::Filt`], quasiabelian, where strictness is a real
//! constraint). On top of them [`couple`] validates exact couples, builds
//! the left and right derived couples, the two cohomologies of `∂ = βγ`, the
//! comparison morphism between them, and iterated derivation trees.

pub mod category;
pub mod complex;
pub mod couple;
pub mod filt;
pub mod generators;
pub mod linalg;
pub mod oracle;
pub mod vect;
