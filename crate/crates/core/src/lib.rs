//! Capacity of weighted constrained systems.
//!
//! A system is a weighted alphabet together with a regular expression over
//! it. This crate parses such systems, computes their capacity as the
//! abscissa of convergence of the generating function, enumerates weight
//! spectra for finite-horizon estimates, and builds and checks maximum
//! entropy input processes.

pub mod automaton;
pub mod dsl;
pub mod exec;
pub mod genfun;
pub mod maxent;
pub mod runlength;
pub mod spectrum;

pub use dsl::{build_jk_system, parse_system, Regex, SystemDef};
pub use exec::Execution;
pub use genfun::{abscissa, capacity_jk, jk_table, system_gf, CapacityResult};
pub use spectrum::{enumerate_spectrum, WeightSpectrum};
