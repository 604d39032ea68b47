//! Exact computation of Hodge-to-de-Rham spectral sequences for smooth
//! proper supervarieties presented by explicit chart atlases.
//!
//! The pipeline: a chart [`atlas::Atlas`] is turned into a window-truncated
//! Čech–de Rham bicomplex ([`cech`]), whose spectral sequence pages, limit
//! terms, total de Rham cohomology and comparison invariants against the
//! underlying even variety are computed in [`pages`]. Everything runs over
//! exact scalars (ℚ or 𝔽_p, [`scalar`]), so reported dimensions are exact
//! integers, with explicit reliability flags marking the cells a finite
//! window can certify.

pub mod scalar;
pub mod linalg;
pub mod ring;
pub mod forms;
pub mod parse;
pub mod atlas;
pub mod cech;
pub mod pages;
pub mod koszul;
pub mod scenario;
pub mod report;

pub use forms::FormElement;
pub use ring::SuperPolynomial;
pub use scalar::{FieldSpec, Scalar};
