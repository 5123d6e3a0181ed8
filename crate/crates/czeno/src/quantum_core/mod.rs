//! Dense complex linear algebra over small labeled Hilbert spaces.
//!
//! All values are immutable after construction and every operation is a
//! pure function of its inputs, so independent simulations can run in
//! parallel without coordination. Spaces stay small (composite dimension
//! well below a few hundred), so everything is dense.

mod channel;
mod density;
mod measure;
mod metrics;
mod operator;
mod space;
mod state;

pub use channel::{Branch, Cause, QuantumChannel};
pub use density::{mix, trace_distance, DensityOperator};
pub use measure::{measure_levels, projective_measure, MeasurementOutcome};
pub use metrics::{concurrence, fidelity, fidelity_density};
pub use operator::Operator;
pub(crate) use operator::{EmbeddingMap, SparsePlan};
pub use space::{BasisLabel, Space, Subsystem};
pub use state::PureState;

pub type C64 = num_complex::Complex<f64>;
