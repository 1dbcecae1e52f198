//! Spin-dependent optical-lattice Bragg beam splitter and Mach-Zehnder
//! Aharonov-Casher interferometer for spin-1 atoms.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bragg_dynamics;
pub mod constants;
pub mod csv_out;
pub mod interferometer;
pub mod polarizability;
pub mod spin_algebra;
