//! Torsion points of maximal tori and the conjugacy classes they represent.

pub mod approx;
pub mod canonical;
pub mod catalog;
pub mod census;
pub mod phase;
pub mod point;

pub use approx::{nearest_torsion_approximant, TorsionApproximant};
pub use canonical::{canonicalize, invariant_of_element, sl2_orientation, weyl_orbit, CanonicalInvariant, Parity};
pub use catalog::{
    catalog_components, catalog_components_with, catalog_to_csv, catalog_to_json, count_components, gcd_intersection_check, points_by_component,
    read_catalog_csv, read_catalog_json, CatalogEntry, CatalogRow, ComponentDescriptor, MatrixData,
};
pub use census::{cluster_census, sl2_component_census};
pub use phase::Phase;
pub use point::{enumerate_torsion, random_torsion_point, TorusTorsionPoint};
