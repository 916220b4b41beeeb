//! Wasserstein-based departure from the usual stochastic order, and its
//! behaviour along order-statistic, mixture and record distortions.

pub mod asymptotics;
pub mod crossings;
pub mod dist;
pub mod distortion;
pub mod error;
pub mod exec;
pub mod quadrature;
pub mod roots;
pub mod sim;
pub mod special;
pub mod wasserstein;

pub use crossings::{boundary_quantities, crossing_sets, hypothesis_check, BoundaryQuantities, CrossingSets, IntervalSet};
pub use dist::{Distribution, EmpiricalSample, PiecewiseCdf, Segment};
pub use distortion::{distort, Distortion, FamilyTemplate, IndexSequence};
pub use error::{Error, Result};
pub use exec::Exec;
pub use wasserstein::{departure, departure_l1, usual_order_verdict, w2_distance, Convention, DepartureReport, UsualOrder};
