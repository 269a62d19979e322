//! Ferrand's conformally invariant metric `lambda_D` on plane and space
//! domains, the ring capacities it is built from, and a grid oracle for
//! condenser capacities used to check closed forms and bounds.
//!
//! Planar (`n = 2`) quantities are evaluated exactly through the
//! arithmetic-geometric mean. For `n >= 3` the same interfaces accept a
//! caller-supplied Grötzsch capacity and otherwise refuse to evaluate.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod capacity;
pub mod condenser;
pub mod distortion;
pub mod elliptic;
pub mod error;
pub mod isometry;
pub mod lambda;
mod monotone;
pub mod verify;

pub use capacity::{gamma, gamma_inv, tau, tau_inv, CapacityEvaluator, Mode};
pub use distortion::{phi, psi, DistortionParams, ModulusPair};
pub use elliptic::{agm, ellint_k, mu};
pub use error::{Error, Result};
pub use isometry::PlaneMap;
pub use lambda::{BoundedValue, DomainKind, DomainSpec, PuncturedPair};
