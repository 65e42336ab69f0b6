//! Matrix realizations of U(m), SU(m), SO(m) and SL(2,R).

pub mod algebra;
pub mod element;
pub mod polar;
pub mod random;
pub mod spec;
pub mod spectral;

pub use algebra::{algebra_basis, AlgebraBasis, AlgebraElement};
pub use element::{adjoint_matrix, element_order, exp_element, rotation2, GroupElement};
pub use polar::{cartan_decompose, CartanDecomposition};
pub use random::{random_element, random_element_with, rng_from_seed};
pub use spec::{Family, GroupSpec};
