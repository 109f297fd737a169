//! Finite Dirichlet spaces on weighted graphs.
//!
//! A [`GraphForm`] carries edge conductances `b`, killing weights `c` and a
//! vertex measure `m`. From it we build the self-adjoint generator `L`, the
//! Markovian semigroup `e^{-tL}`, and the machinery for comparing two such
//! spaces through order isomorphisms `Uf = h·(f∘τ)`:
//!
//! | Module | Purpose |
//! |--------|---------|
//! | [`form`] | measure spaces, forms, generators |
//! | [`families`] | path / cycle / complete / Sierpinski generators |
//! | [`spectral`] | semigroup, irreducibility, recurrence, excessive functions |
//! | [`orderiso`] | order isomorphisms, adjoints, intertwining, certification |
//! | [`search`] | enumeration of all intertwiners between two spaces |
//! | [`beurling`] | jump / killing decomposition and its transformation law |
//! | [`metrics`] | resistance metrics and intrinsic metrics |
//! | [`random`] | seeded random forms and intertwined pairs |
//!
//! Tolerances follow one rule throughout: a residual `r` is accepted when
//! `|r| <= tol.rel * scale + tol.abs`, see [`Tol`].

pub mod beurling;
pub mod error;
pub mod families;
pub mod form;
pub mod metrics;
pub mod orderiso;
pub mod random;
pub mod report;
pub mod search;
mod simplex;
pub mod spectral;
pub mod tol;

pub use beurling::JumpKilling;
pub use error::{Error, Result};
pub use families::{Family, FamilyParams};
pub use form::{FormBuilder, Generator, GraphForm, MeasureSpace};
pub use metrics::PseudoMetric;
pub use orderiso::{Certificate, OrderIso};
pub use report::{Check, VerificationReport};
pub use search::{Reason, SearchOptions, Verdict};
pub use spectral::SpectralData;
pub use tol::Tol;

pub use nalgebra::DMatrix;
