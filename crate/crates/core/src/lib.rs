//! Partial metric spaces in which distances may be negative.
//!
//! The crate provides:
//!
//! * [`space::PmSpace`], a point domain paired with a total symmetric distance,
//!   and sampled decision procedures for the partial metric axioms ([`axioms`]);
//! * open-ball membership and T1 separation witnesses ([`ball`]);
//! * a catalog of concrete spaces ([`spaces`]), including the strong partial
//!   metric obtained by negating an optimal global-alignment score ([`alignment`]);
//! * orbit iteration, Cauchy and special-limit detection, contraction
//!   certificates and fixed-point solvers ([`orbit`]);
//! * a line-oriented report format and the `pmetric` command line front end
//!   ([`report`], [`cli`]).

pub mod alignment;
pub mod axioms;
pub mod ball;
pub mod cli;
pub mod error;
pub mod orbit;
pub mod point;
pub mod report;
pub mod sampler;
pub mod space;
pub mod spaces;

pub use error::{Error, Result};
pub use point::{PmValue, Point, PointKind, Word};
pub use space::{PartialMetric, PmSpace, SpaceClass};
