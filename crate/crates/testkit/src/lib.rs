//! Independent oracles and registered verification grids for the
//! circular-beta-ensemble average engine.  The oracles here deliberately
//! avoid the engine's own symmetric-function machinery so that a
//! disagreement localizes a defect to one side.

pub mod naive;
pub mod oracle;
pub mod suites;

pub use naive::NaivePoly;
pub use oracle::{oracle_average, oracle_jack};
pub use suites::{run_suite, suite_names, Check, SuiteResult};
