//! Angled 2-complexes, orbihedra, sectional curvature and folding.

pub mod cli;
pub mod complex;
pub mod corpus;
pub mod diagrams;
pub mod error;
pub mod folding;
pub mod format;
pub mod group;
pub mod morphism;
pub mod homology;
pub mod orbihedron;
pub mod quotient;
pub mod rational;
pub mod sections;

pub use error::{Error, Result};
pub use rational::Rational;
