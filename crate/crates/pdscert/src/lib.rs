//! Partial difference sets in finite Abelian groups: exact verification,
//! feasibility criteria, and staged nonexistence certificates for the
//! (216,40,4,8) and (216,43,10,8) parameter sets.
//!
//! The crate is organized around the proof pipeline:
//!
//! - [`group`] — exact arithmetic and subgroup enumeration for finite
//!   Abelian groups given as products of cyclic factors.
//! - [`pds`] — difference spectra, PDS verification, exclusion criteria,
//!   multiplier orbits, and a small brute-force search.
//! - [`diophantine`] — nonincreasing integer tuples with prescribed sum
//!   and sum of squares.
//! - [`design`] — the 13-point incidence structure built from the subgroup
//!   lattice, point/block weights, and exhaustive weight-assignment search.
//! - [`cert`] — the staged certificate that ties the above together and
//!   renders a machine-readable evidence trail.

pub mod cert;
pub mod design;
pub mod diophantine;
pub mod group;
pub mod pds;

pub use cert::{certify, Certificate, CertifyOptions, Verdict};
pub use design::{build_plane, IncidenceStructure, WeightAssignment};
pub use diophantine::{enumerate_solutions, CSystem};
pub use group::{GroupElement, GroupSpec, Subgroup};
pub use pds::{difference_spectrum, verify_pds, CandidateSet, PdsParams};
