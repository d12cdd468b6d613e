//! Left-invariant Hamiltonian flows on matrix Lie groups, symmetries of the
//! exponential map induced by (anti-)automorphisms of the Lie algebra, and
//! Maxwell times located through the fixed points of the induced group map.
//!
//! The crate is organised bottom-up:
//!
//! * [`lie`]: algebra/group arithmetic, coadjoint orbits, momentum maps;
//! * [`flows`]: Hamiltonians, integrators, left/right/vertical flows;
//! * [`symmetry`]: candidate verification, the group map `S`, residuals;
//! * [`maxwell`]: fixed-point residuals, first Maxwell time, strata, sweeps;
//! * [`catalog`]: builtin group bundles and the JSON loader;
//! * [`suites`]: property suites shared by the CLI `check` command and tests.
//!
//! Batch work (sweeps, fixture grids) goes through [`exec`], which uses rayon
//! when the `parallel` feature is enabled and a plain loop otherwise.

pub mod catalog;
pub mod error;
pub mod exec;
pub mod flows;
pub mod lie;
pub mod linalg;
pub mod maxwell;
pub mod sampling;
pub mod suites;
pub mod symmetry;

pub use error::{Error, Result};
