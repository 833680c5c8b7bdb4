//! Exact jet arithmetic and the constructive Gevrey-regularity checks for
//! fifth-order dispersive models: time-derivative recursion at a point,
//! growth analysis, majorant sequences and the binomial counting lemmas.

pub mod combinatorics;
pub mod data_factory;
pub mod growth;
pub mod jet;
pub mod majorant;
pub mod pde;
pub mod scalar;
pub mod timejet;

pub use data_factory::{carleman_check, gevrey_jet, CarlemanBoundSpec};
pub use jet::{Jet2, JetError};
pub use pde::{parse_pde, PdeError, PdeModel};
pub use scalar::{factorial_pow, NumericMode, Scalar, ScalarError, Sigma};
pub use timejet::{budget_for, leading_split, time_jet, time_jet_with_primitive, TimeJet};
