//! Exact computations on the torus curve complex (the Farey graph), subsurface
//! projections, right-angled Artin group normal forms, Bass-Serre trees of free
//! products, and the certificates tying them together.

pub mod bassserre;
pub mod constructions;
pub mod error;
pub mod experiments;
pub mod farey;
pub mod half;
pub mod hypgraph;
pub mod projections;
pub mod raag;
pub mod report;
pub mod rng;
pub(crate) mod serde_big;
pub mod subgroups;

pub use error::{Error, Result};
pub use farey::{MappingClass, Slope};
pub use half::HalfInt;
pub use hypgraph::DistanceOracle;
pub use projections::{Constants, ProjectionSystem, Rational};
pub use raag::{RaagGraph, Syllable, Word};
