//! Overcomplete coherent frames over finite groups.
//!
//! Builds projective representations from Cayley tables, analyzes coherent
//! systems `π(Λ)g` as frames, measures Beurling densities and frame measures
//! over window profiles, and removes positive-density subsets from
//! overcomplete frames with a checkable certificate.

pub mod amalgam;
pub mod density;
pub mod error;
pub mod frame;
pub mod geometry;
pub mod group;
pub mod io;
pub mod linalg;
pub mod removal;
pub mod rep;

pub use amalgam::{Envelope, GroupFunction, Side};
pub use density::{DensityReport, DensityTheoremReport, IdentityReport, MeasureReport};
pub use error::{Error, Result};
pub use frame::{CoherentSystem, Frame, FrameAnalysis, FrameBounds};
pub use geometry::{IndexSet, PackingBound, Window, WindowSequence};
pub use group::{FiniteGroup, GroupKind};
pub use linalg::{CMatrix, CVector};
pub use num_complex::Complex64;
pub use removal::{
    CertificateCheck, NecessaryConditionReport, RemovalCertificate, RemovalConfig, RemovalTrace,
    ShrinkStrategy, TruncationSplit,
};
pub use rep::{CocycleTable, ProjectiveRep};
