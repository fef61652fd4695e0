pub mod baa;
pub mod bipartition;
pub mod circuit;
pub mod cost;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod real;
pub mod schmidt;
pub mod state;
pub mod synthesis;

pub use bipartition::Bipartition;
pub use error::{Error, Result};
pub use real::Real;

/// Concrete f64 aliases; every generic type also works at f32.
pub type StateVector64 = state::StateVector<f64>;
pub type StateVector32 = state::StateVector<f32>;
pub type Mat64 = linalg::Mat<f64>;
pub type Circuit64 = circuit::Circuit<f64>;
pub type SchmidtDecomposition64 = schmidt::SchmidtDecomposition<f64>;
pub type MeasureReport64 = measures::MeasureReport<f64>;
pub type SynthesisReport64 = synthesis::SynthesisReport<f64>;
pub type LrspConfig64 = synthesis::LrspConfig<f64>;
pub type ApproxPlan64 = baa::ApproxPlan<f64>;
pub type FactorState64 = baa::FactorState<f64>;
