//! Exactly solvable hard-core few-body systems on a line whose contact
//! hyperplanes generate the non-crystallographic reflection groups H3
//! (icosahedron, four particles) and H4 (600-cell, five particles).
//!
//! The crate is organized bottom-up:
//!
//! * [`masses`]: mass spectra, the mass-scaled coordinate map and the two
//!   one-parameter mass families with their half-line limits.
//! * [`roots`]: outer normals of the contact hyperplanes, mirror angles and
//!   Coxeter diagram inference.
//! * [`group`]: closure of the generating reflections into the full finite
//!   group, parities and positive roots.
//! * [`states`]: Bethe-ansatz plane-wave superpositions and the zero-energy
//!   anti-invariant polynomial, with their verification helpers.
//! * [`cli`]: spectrum resolution, argument parsers and the verification
//!   report behind the `kaleido` binary.

pub mod cli;
pub mod error;
pub mod group;
pub mod masses;
pub mod numfmt;
pub mod roots;
pub mod states;

pub use error::{Error, Result};
pub use group::{GroupElement, ReflectionGroup};
pub use masses::{Family, JacobiFrame, MassSpectrum, SpectrumLabel, Wall};
pub use roots::{CoxeterDiagram, RootSet};
pub use states::{AntiInvariantState, BetheState, Wavevector};
