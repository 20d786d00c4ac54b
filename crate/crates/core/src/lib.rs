//! Simulation of relativistic measurement scenarios under two reduction
//! rules: the frame-ordered Bloch rule and the relational rule built on a
//! covariant staged order of instrument portions.
//!
//! A [`Scenario`] ties a finite-dimensional initial state to instruments that
//! each occupy an achronal region of Minkowski space. [`engines`] evaluates
//! joint outcome distributions, [`oracle`] recomputes them by explicit
//! sequential collapse, and [`audit`] measures signaling and frame
//! dependence.

pub mod audit;
pub mod distribution;
pub mod engines;
pub mod error;
pub mod field;
pub mod geometry;
pub mod io;
pub mod linalg;
pub mod observables;
pub mod operators;
pub mod oracle;
pub mod outcome_fn;
pub mod scenario;

pub use distribution::OutcomeDistribution;
pub use engines::{bloch_joint, relational_joint, Rule};
pub use error::{Error, Result};
pub use geometry::{build_order, CausalOrder, Event, Region};
pub use linalg::{CMatrix, DensityMatrix, C64};
pub use observables::{CompositeObservable, PortionObservable};
pub use outcome_fn::{parse_f, OutcomeFunction};
pub use scenario::{Factor, Instrument, Scenario};
