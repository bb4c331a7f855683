//! Origin-symmetry tests for convex polytopes and smooth convex bodies.

pub mod cli;
pub mod dual;
pub mod error;
pub mod linalg;
pub mod polytope;
pub mod search;
pub mod sections;
pub mod symmetry;
pub mod zoo;

pub use error::{Error, Result};
pub use linalg::{SquareMatrix, Vector};
pub use polytope::{Face, Facet, Polytope};
