//! Instances, beliefs and Bayesian updates.

mod belief;
mod instance;
mod io;
mod separator;

pub use belief::{Belief, Concentration, INPUT_SIMPLEX_TOL, INTERNAL_SIMPLEX_TOL};
pub use instance::Instance;
pub use io::FORMAT_VERSION;
pub use separator::SeparatorReport;
