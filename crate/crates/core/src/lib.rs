//! Exact combinatorics and symbolic Poisson calculus for smoothable cycles of
//! log symplectic structures on projective space times a polydisc.

pub mod biresidue;
pub mod catalog;
pub mod classify;
pub mod deform;
pub mod error;
pub mod exact;
pub mod fo;
pub mod io;
pub mod format;
pub mod poisson;
pub mod render;

pub use biresidue::{BiresidueMatrix, EdgeTheta, SmoothingDiagram};
pub use catalog::FamilyTag;
pub use error::{Error, Result};
pub use exact::{QMatrix, QVector, Rational};
