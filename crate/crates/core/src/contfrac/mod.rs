//! Exact continued-fraction arithmetic: quadratic surds, coefficient
//! streams, convergent tables, distance ladders, and Ostrowski numeration.

pub mod ostrowski;
pub mod stream;
pub mod surd;
pub mod table;

pub use ostrowski::{ostrowski_expand, ostrowski_value, weighted_log_sums, OstrowskiDigits};
pub use stream::{rational_value, CoefficientStream};
pub use surd::QuadraticSurd;
pub use table::{ConvergentTable, DeltaTable};
