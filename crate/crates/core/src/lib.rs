//! Separability of multipartite quantum states through generalized
//! concurrences and simultaneous hollowisation of their preconcurrence
//! matrices.
//!
//! ```
//! use hollowsep::bundled;
//! use hollowsep::operators::generate_minimal;
//! use hollowsep::separability::{classify, ClassifyOptions, VerdictStatus};
//!
//! let rho = bundled::rank5_example();
//! let catalog = generate_minimal(rho.shape())?;
//! let verdict = classify(&rho, &catalog, &ClassifyOptions::default())?;
//! assert_eq!(verdict.status, VerdictStatus::Separable);
//! # Ok::<(), hollowsep::Error>(())
//! ```
//!
//! Basis order is row-major with the last party fastest. Party and operator
//! indices are zero-based.

pub mod bundled;
pub mod concurrence;
pub mod error;
pub mod hollowizer;
pub mod io;
pub mod linalg;
pub mod operators;
pub mod random;
pub mod separability;
pub mod states;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/states.md")]
    mod states {}
    #[doc = include_str!("../../../book/src/operators.md")]
    mod operators {}
    #[doc = include_str!("../../../book/src/concurrence.md")]
    mod concurrence {}
    #[doc = include_str!("../../../book/src/hollowisation.md")]
    mod hollowisation {}
    #[doc = include_str!("../../../book/src/separability.md")]
    mod separability {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
