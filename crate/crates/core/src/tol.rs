//! Default numerical tolerances.

/// Frobenius residual allowed in group membership and gⁿ = e checks.
pub const TOL_MEMBERSHIP: f64 = 1e-9;

/// Relative singular-value threshold for numerical rank.
pub const TOL_RANK: f64 = 1e-9;

/// Largest principal angle (radians) at which two subspaces count as equal.
pub const TOL_SUBSPACE: f64 = 1e-7;

/// Tolerances bundled for the verifiers.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Tolerances {
    pub membership: f64,
    pub rank: f64,
    pub subspace: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            membership: TOL_MEMBERSHIP,
            rank: TOL_RANK,
            subspace: TOL_SUBSPACE,
        }
    }
}
