//! Exact q-series arithmetic and canonical bases of weakly holomorphic modular
//! forms on genus-zero `Gamma0(N)`, with the modular-grid duality and trace
//! operators built on top.

pub mod basis;
pub mod error;
pub mod generators;
pub mod leveldata;
pub mod qseries;
pub mod seedsynth;
pub mod selftest;
pub mod traceops;

pub use error::{Error, Result};
pub use qseries::{Coeff, QSeries};
