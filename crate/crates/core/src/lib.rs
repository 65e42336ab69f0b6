//! Connected components of E_n(G) = {g : gⁿ = e} for classical matrix groups.
//!
//! Components are enumerated as Weyl orbits of torsion points on a maximal
//! torus, and a set of numerical verifiers checks the structural identities
//! behind that classification: the tangent space of a conjugacy class, the
//! kernel/image identity for the adjoint action, the gcd law for component
//! sets, the SL(2,R)/SO(2) bijection, torsion density, and the tangent cone
//! of the surface (y²+z²)² = 4x⁴z².

pub mod curves;
pub mod error;
pub mod group;
pub mod linalg;
pub mod report;
pub mod subspace;
pub mod surface;
pub mod sweep;
pub mod tol;
pub mod torsion;

pub use error::{Error, Result};
pub use group::{GroupElement, GroupSpec};
pub use report::VerificationReport;
