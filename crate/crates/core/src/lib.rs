//! Planning toolkit for recommendation under aggregated preferences with churn.
//!
//! A user of a hidden type is drawn from a known prior; each recommended category is liked
//! with a type-dependent probability, and the first dislike ends the session. The planner
//! maximizes the expected number of likes by steering its posterior over types.

pub mod analysis;
pub mod error;
pub mod fixtures;
pub mod gen;
pub mod model;
pub mod sim;
pub mod solvers;
pub mod value;

pub use error::{Error, Result};
pub use model::{Belief, Concentration, Instance, SeparatorReport};
pub use solvers::{SolveResult, SolveStats};
pub use value::{ExtendedPolicy, PolicyPrefix, PrefixBounds};
