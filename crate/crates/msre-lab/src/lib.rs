//! Laboratory front end for `msre-core`: run configuration files, report
//! envelopes, CSV/gnuplot emission, the surface binary format, and the
//! replica-parallel experiment drivers behind the `msre` binary.

pub mod config;
pub mod report;
pub mod runner;
pub mod surface_io;

pub use config::RunConfig;
pub use report::{Assertion, ReportEnvelope};
