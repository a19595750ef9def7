//! Coherent-state group averaging for two-mode constrained oscillators.
//!
//! The kinematical space is a truncated two-mode Fock space ([`fock`]).
//! [`models`] builds the three quadratic constraints and their generator
//! algebras, [`coherent`] the SU(2), SU(1,1) and oscillator coherent
//! states, and [`rigging`] the projector onto physical states together with
//! the kinematical/physical equality checks. [`classical`] holds the
//! classical surfaces, gauge flow and label maps. [`suite`] ties everything
//! into named, reproducible check suites driven by a [`config::RunConfig`].

pub mod classical;
pub mod coherent;
pub mod config;
pub mod error;
pub mod fock;
pub mod models;
pub mod numerics;
pub mod report;
pub mod rigging;
pub mod suite;

pub use coherent::{CoherentLabel, IrrepEmbedding, QuadratureSpec};
pub use config::{Format, RunConfig, Suite};
pub use error::{CohqError, Result};
pub use fock::{CutoffScheme, FockSpace, Ket, LinOp, Mode, C64};
pub use models::{GeneratorTriple, ModelKind, ModelSpec, RepIndex, Series, Signature};
pub use report::{CheckRecord, CheckReport, CheckStatus, Table};
pub use rigging::PhysicalProjector;
pub use suite::{emit_report, run_suite};
