//! Exact homotopy-perturbation engine for Koszul complexes and the
//! generalized Todd class of a closed embedding, in a finite constant-coefficient
//! model over ℚ.

pub mod algebra;
pub mod combinatorics;
pub mod connection;
pub mod derivation;
pub mod error;
pub mod hom;
pub mod koszul;
pub mod perturbation;
pub mod rational;
pub mod rng;
pub mod sparse;
pub mod todd;
pub mod verify;

pub use algebra::{GradedElement, Generator, ModelConfig, Monomial};
pub use error::{Error, Result};
pub use rational::Rational;
