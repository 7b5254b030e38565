//! Conformally invariant modules of quadratic differentials on nested
//! subdomains of the unit disk.
//!
//! ```
//! use qdmod::invariant::module_residue;
//! use qdmod::maps::MapDescriptor;
//!
//! let f: MapDescriptor = "pick m=0.5".parse()?;
//! let m = module_residue(&f, 0.25, 1.0)?;
//! assert!(m.value < 0.0);
//! # Ok::<(), qdmod::QdError>(())
//! ```

pub mod cover;
pub mod error;
pub mod geom;
pub mod inequalities;
pub mod invariant;
pub mod maps;
pub mod qdiff;
pub mod report;
pub mod verify;

pub use error::{QdError, Result};

/// The scalar type used throughout the crate.
pub type ComplexValue = num_complex::Complex64;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/maps.md")]
    mod maps {}
    #[doc = include_str!("../../../book/src/quadratic-differentials.md")]
    mod quadratic_differentials {}
    #[doc = include_str!("../../../book/src/module.md")]
    mod module {}
    #[doc = include_str!("../../../book/src/growth-functionals.md")]
    mod growth_functionals {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
}
