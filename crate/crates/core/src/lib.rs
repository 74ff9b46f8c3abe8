//! Courant-sharp eigenvalues of flat Klein bottles and Dirichlet flat cylinders.
//!
//! The pipeline runs in four stages:
//!
//! 1. [`spectrum`] enumerates eigenvalues with multiplicities and labels;
//! 2. [`pleijel`] combines a Faber-Krahn ratio bound and a Weyl lower bound
//!    into a finite list of candidate labels;
//! 3. [`nodal`] counts nodal domains of eigenfunctions from [`eigenfunctions`]
//!    on a grid with the surface's edge identifications;
//! 4. [`verdict`] decides each remaining candidate.
//!
//! [`report`] reproduces the reference eigenvalue tables.

pub mod eigenfunctions;
pub mod error;
pub mod nodal;
pub mod pleijel;
pub mod report;
pub mod spectrum;
pub mod surfaces;
pub mod verdict;

pub use eigenfunctions::{BasisMode, Eigenfunction, ModeKind};
pub use error::{Error, Result};
pub use nodal::{NodalResult, SignGrid, SweepResult};
pub use pleijel::{PleijelConstants, PleijelReport};
pub use spectrum::{Representation, Spectrum, SpectrumEntry, WeylValue};
pub use surfaces::{Preset, SurfaceDescriptor, SurfaceKind};
pub use verdict::{CourantSharpVerdict, Decision, Reason};
