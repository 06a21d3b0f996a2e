//! Density-matrix simulation of noisy layered variational circuits, with
//! tools for training them and probing how trainability depends on the
//! measured observable.

pub mod ansatz;
pub mod error;
pub mod experiment;
mod kernel;
pub mod landscape;
pub mod linalg;
pub mod noise;
pub mod observables;
pub mod state;
pub mod trainer;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/states.md")]
    mod states {}
    #[doc = include_str!("../../../book/src/noise.md")]
    mod noise {}
    #[doc = include_str!("../../../book/src/circuits.md")]
    mod circuits {}
    #[doc = include_str!("../../../book/src/observables.md")]
    mod observables {}
    #[doc = include_str!("../../../book/src/training.md")]
    mod training {}
    #[doc = include_str!("../../../book/src/landscapes.md")]
    mod landscapes {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
