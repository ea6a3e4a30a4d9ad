//! Exact calculus of tautological classes on moduli spaces of stable curves,
//! represented as rational combinations of decorated stable graphs.

pub mod boundary;
pub mod canon;
pub mod covers;
pub mod error;
pub mod expr;
mod glue;
pub mod graph;
pub mod json;
pub mod odd;
pub mod strata;
pub mod structures;

pub use boundary::{FactorwiseClass, RewriteOrder};
pub use covers::{CoverGraph, EdgeFiber, LegFiber};
pub use error::{Ambient, Error, Result};
pub use graph::{Leg, Point, StableGraph};
pub use odd::{OddBasisElement, OddTensor};
pub use strata::{DecoratedStratum, Decoration, KappaMonomial, TautClass, Q};
pub use structures::{AStructure, GenericOverlap};
