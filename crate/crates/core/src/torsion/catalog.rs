use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::canonical::{canonicalize, weyl_orbit, CanonicalInvariant};
use super::point::{enumerate_torsion, TorusTorsionPoint};
use crate::error::{Error, Result};
use crate::group::{adjoint_matrix, algebra_basis, Family, GroupElement, GroupSpec};
use crate::linalg::{CMat, RMat};
use crate::report::{digest_inputs, TrialRecord, VerificationReport};
use crate::subspace::rank;
use crate::tol::Tolerances;

/// One connected component of {g : gⁿ = e}, i.e. one conjugacy class.
#[derive(Debug, Clone)]
pub struct ComponentDescriptor {
    pub spec: GroupSpec,
    pub n: u32,
    pub canonical: CanonicalInvariant,
    pub point: TorusTorsionPoint,
    pub representative: GroupElement,
    /// rank(I − Ad(representative)), the dimension of the class.
    pub dimension: usize,
    pub exact_order: u64,
    /// Number of torus torsion points in this class.
    pub orbit_size: usize,
}

fn class_dimension(g: &GroupElement, tol: f64) -> Result<usize> {
    let basis = algebra_basis(g.spec);
    let ad = adjoint_matrix(&basis, g)?;
    let d = ad.nrows();
    rank(&(RMat::identity(d, d) - ad), tol)
}

fn group_points(spec: GroupSpec, n: u32) -> Result<BTreeMap<CanonicalInvariant, Vec<TorusTorsionPoint>>> {
    let mut groups: BTreeMap<CanonicalInvariant, Vec<TorusTorsionPoint>> = BTreeMap::new();
    for p in enumerate_torsion(spec, n)? {
        groups.entry(canonicalize(&p)).or_default().push(p);
    }
    Ok(groups)
}

/// Torus torsion points of order dividing n grouped by class, in catalog
/// order.
pub fn points_by_component(spec: GroupSpec, n: u32) -> Result<Vec<(CanonicalInvariant, Vec<TorusTorsionPoint>)>> {
    Ok(group_points(spec, n)?.into_iter().collect())
}

/// The conjugacy classes of elements of order dividing n, sorted by
/// canonical invariant.
pub fn catalog_components(spec: GroupSpec, n: u32) -> Result<Vec<ComponentDescriptor>> {
    catalog_components_with(spec, n, &Tolerances::default())
}

pub fn catalog_components_with(spec: GroupSpec, n: u32, tol: &Tolerances) -> Result<Vec<ComponentDescriptor>> {
    group_points(spec, n)?
        .into_iter()
        .map(|(canonical, points)| {
            let point = points[0].clone();
            let representative = point.realize();
            Ok(ComponentDescriptor {
                spec,
                n,
                dimension: class_dimension(&representative, tol.rank)?,
                exact_order: canonical.exact_order(),
                orbit_size: points.len(),
                canonical,
                point,
                representative,
            })
        })
        .collect()
}

/// Number of conjugacy classes of elements of order dividing n.
pub fn count_components(spec: GroupSpec, n: u32) -> Result<usize> {
    Ok(group_points(spec, n)?.len())
}

fn invariant_set(spec: GroupSpec, n: u32) -> Result<BTreeSet<CanonicalInvariant>> {
    Ok(group_points(spec, n)?.into_keys().collect())
}

/// Checks that the classes of order dividing both n and m are exactly the
/// classes of order dividing gcd(n, m).
pub fn gcd_intersection_check(spec: GroupSpec, n: u32, m: u32) -> VerificationReport {
    const CHECK: &str = "gcd-intersection";
    if n == 0 || m == 0 {
        return VerificationReport::rejected(CHECK, "n and m must be positive");
    }
    let g = num_integer::gcd(n, m);
    let sets = (|| Ok::<_, Error>((invariant_set(spec, n)?, invariant_set(spec, m)?, invariant_set(spec, g)?)))();
    let (a, b, c) = match sets {
        Ok(s) => s,
        Err(e) => return VerificationReport::rejected(CHECK, e.to_string()),
    };
    let both: BTreeSet<_> = a.intersection(&b).cloned().collect();
    let extra: Vec<String> = both.difference(&c).map(|i| i.to_string()).collect();
    let missing: Vec<String> = c.difference(&both).map(|i| i.to_string()).collect();
    let mismatches = extra.len() + missing.len();
    let mut trial = TrialRecord::new(0, None, digest_inputs(&[], &[n as f64, m as f64]))
        .metric("count_n", a.len() as f64)
        .metric("count_m", b.len() as f64)
        .metric("count_intersection", both.len() as f64)
        .metric("count_gcd", c.len() as f64)
        .note("gcd", g.to_string())
        .outcome(mismatches == 0, mismatches as f64);
    if !extra.is_empty() {
        trial = trial.note("only_in_intersection", extra.join(" | "));
    }
    if !missing.is_empty() {
        trial = trial.note("only_in_gcd_catalog", missing.join(" | "));
    }
    VerificationReport::single(CHECK, trial)
        .with_config("group", spec)
        .with_config("n", n)
        .with_config("m", m)
}

/// A matrix in row-major order with separate real and imaginary parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixData {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl MatrixData {
    pub fn from_matrix(a: &CMat) -> Self {
        let (rows, cols) = a.shape();
        let mut re = Vec::with_capacity(rows * cols);
        let mut im = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                re.push(a[(i, j)].re);
                im.push(a[(i, j)].im);
            }
        }
        MatrixData { rows, cols, re, im }
    }

    pub fn to_matrix(&self) -> Result<CMat> {
        let len = self.rows.checked_mul(self.cols).unwrap_or(usize::MAX);
        if self.re.len() != len || self.im.len() != len {
            return Err(Error::ShapeMismatch {
                expected: format!("{len} entries"),
                found: format!("{} real and {} imaginary", self.re.len(), self.im.len()),
            });
        }
        Ok(CMat::from_fn(self.rows, self.cols, |i, j| {
            let k = i * self.cols + j;
            num_complex::Complex64::new(self.re[k], self.im[k])
        }))
    }
}

/// One catalog line in the CSV layout.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogRow {
    pub group: Family,
    pub size: usize,
    pub n: u32,
    pub component_index: usize,
    pub canonical: CanonicalInvariant,
    pub dimension: usize,
    pub exact_order: u64,
}

/// One catalog entry in the JSON layout, which adds the representative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub group: Family,
    pub size: usize,
    pub n: u32,
    pub component_index: usize,
    pub canonical: CanonicalInvariant,
    pub dimension: usize,
    pub exact_order: u64,
    pub orbit_size: usize,
    pub representative: MatrixData,
}

impl CatalogRow {
    fn validate(&self) -> Result<()> {
        let spec = GroupSpec::new(self.group, self.size)?;
        if self.n == 0 {
            return Err(Error::InvalidInput("catalog row with n = 0".into()));
        }
        self.canonical.torus_point(spec)?;
        if self.exact_order == 0 || self.n as u64 % self.exact_order != 0 || self.exact_order != self.canonical.exact_order() {
            return Err(Error::InvalidInput(format!(
                "exact order {} is inconsistent with `{}` and n = {}",
                self.exact_order, self.canonical, self.n
            )));
        }
        if self.dimension > spec.algebra_dim() {
            return Err(Error::InvalidInput(format!("dimension {} exceeds dim G", self.dimension)));
        }
        Ok(())
    }
}

impl From<&ComponentDescriptor> for CatalogRow {
    fn from(d: &ComponentDescriptor) -> Self {
        CatalogRow {
            group: d.spec.family(),
            size: d.spec.size(),
            n: d.n,
            component_index: 0,
            canonical: d.canonical.clone(),
            dimension: d.dimension,
            exact_order: d.exact_order,
        }
    }
}

fn rows(catalog: &[ComponentDescriptor]) -> impl Iterator<Item = CatalogRow> + '_ {
    catalog.iter().enumerate().map(|(i, d)| CatalogRow {
        component_index: i,
        ..CatalogRow::from(d)
    })
}

pub fn catalog_to_csv(catalog: &[ComponentDescriptor]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .quote_style(csv::QuoteStyle::Necessary)
        .from_writer(Vec::new());
    // An empty catalog still gets a header.
    if catalog.is_empty() {
        w.write_record(["group", "size", "n", "component_index", "canonical", "dimension", "exact_order"])
            .map_err(|e| Error::Parse(e.to_string()))?;
    }
    for row in rows(catalog) {
        w.serialize(row).map_err(|e| Error::Parse(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

pub fn catalog_entries(catalog: &[ComponentDescriptor]) -> Vec<CatalogEntry> {
    catalog
        .iter()
        .zip(rows(catalog))
        .map(|(d, r)| CatalogEntry {
            group: r.group,
            size: r.size,
            n: r.n,
            component_index: r.component_index,
            canonical: r.canonical,
            dimension: r.dimension,
            exact_order: r.exact_order,
            orbit_size: d.orbit_size,
            representative: MatrixData::from_matrix(&d.representative.matrix),
        })
        .collect()
}

pub fn catalog_to_json(catalog: &[ComponentDescriptor]) -> Result<String> {
    serde_json::to_string_pretty(&catalog_entries(catalog)).map_err(|e| Error::Parse(e.to_string()))
}

/// Parses and validates a catalog CSV.
pub fn read_catalog_csv(text: &str) -> Result<Vec<CatalogRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    for rec in r.deserialize::<CatalogRow>() {
        let row = rec.map_err(|e| Error::Parse(e.to_string()))?;
        row.validate()?;
        out.push(row);
    }
    Ok(out)
}

/// Parses and validates a catalog JSON document.
pub fn read_catalog_json(text: &str) -> Result<Vec<CatalogEntry>> {
    let entries: Vec<CatalogEntry> = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    for e in &entries {
        let row = CatalogRow {
            group: e.group,
            size: e.size,
            n: e.n,
            component_index: e.component_index,
            canonical: e.canonical.clone(),
            dimension: e.dimension,
            exact_order: e.exact_order,
        };
        row.validate()?;
        let m = e.representative.to_matrix()?;
        if m.shape() != (e.size, e.size) {
            return Err(Error::ShapeMismatch {
                expected: format!("{0}x{0}", e.size),
                found: format!("{}x{}", m.nrows(), m.ncols()),
            });
        }
    }
    Ok(entries)
}

/// Size of the Weyl orbit of a descriptor's torus point, by brute force.
pub fn brute_force_orbit_size(d: &ComponentDescriptor) -> usize {
    weyl_orbit(&d.point).len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::random_element;
    use crate::linalg::to_complex;
    use crate::subspace::check_torsion;

    fn binomial(n: u64, k: u64) -> u64 {
        (1..=k).fold(1, |acc, i| acc * (n - k + i) / i)
    }

    /// Number of multisets of size m from n symbols, by explicit enumeration
    /// of non-decreasing tuples.
    fn multisets(n: u32, m: usize) -> usize {
        fn rec(start: u32, n: u32, left: usize) -> usize {
            if left == 0 {
                return 1;
            }
            (start..n).map(|k| rec(k, n, left - 1)).sum()
        }
        rec(0, n, m)
    }

    fn dims(spec: GroupSpec, n: u32) -> Vec<usize> {
        let mut d: Vec<usize> = catalog_components(spec, n).unwrap().iter().map(|c| c.dimension).collect();
        d.sort();
        d
    }

    #[test]
    fn small_catalogs() {
        assert_eq!(dims(GroupSpec::su(2).unwrap(), 2), vec![0, 0]);
        assert_eq!(dims(GroupSpec::so(3).unwrap(), 2), vec![0, 2]);
        assert_eq!(dims(GroupSpec::u(2).unwrap(), 2), vec![0, 0, 2]);
        // Four torus points (k/4, −k/4), but k = 1 and k = 3 are swapped by
        // the Weyl group: eigenvalue pairs {1,1}, {i,−i}, {−1,−1}.
        assert_eq!(enumerate_torsion(GroupSpec::su(2).unwrap(), 4).unwrap().len(), 4);
        assert_eq!(count_components(GroupSpec::su(2).unwrap(), 4).unwrap(), 3);
        let su2 = catalog_components(GroupSpec::su(2).unwrap(), 2).unwrap();
        assert!(crate::linalg::distance_to_identity(&su2[0].representative.matrix) < 1e-15);
        assert!(crate::linalg::distance_to_identity(&(-&su2[1].representative.matrix)) < 1e-15);
    }

    #[test]
    fn so3_pi_rotation_adjoint_oracle() {
        // In the basis (E₁₂−E₂₁, E₁₃−E₃₁, E₂₃−E₃₂)/√2, conjugation by
        // diag(−1,−1,1) fixes the first generator and negates the others.
        let g = GroupElement::from_real(
            GroupSpec::so(3).unwrap(),
            &RMat::from_diagonal(&nalgebra::DVector::from_vec(vec![-1.0, -1.0, 1.0])),
        )
        .unwrap();
        let ad = adjoint_matrix(&algebra_basis(g.spec), &g).unwrap();
        let oracle = RMat::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -1.0, -1.0]));
        assert!(crate::linalg::frobenius_real(&(&ad - &oracle)) < 1e-14);
        assert_eq!(class_dimension(&g, 1e-9).unwrap(), 2);
    }

    #[test]
    fn unitary_counts_match_multiset_oracle() {
        for m in 1..=4 {
            for n in 1..=6 {
                let count = count_components(GroupSpec::u(m).unwrap(), n).unwrap();
                assert_eq!(count, multisets(n, m));
                assert_eq!(count as u64, binomial(n as u64 + m as u64 - 1, m as u64));
            }
        }
    }

    #[test]
    fn unitary_dimension_formula() {
        for m in 1..=4 {
            for n in 1..=6 {
                for d in catalog_components(GroupSpec::u(m).unwrap(), n).unwrap() {
                    let mut mult: BTreeMap<_, usize> = BTreeMap::new();
                    for p in &d.canonical.phases {
                        *mult.entry(*p).or_default() += 1;
                    }
                    let formula = m * m - mult.values().map(|k| k * k).sum::<usize>();
                    assert_eq!(d.dimension, formula, "U({m}) {}", d.canonical);
                }
            }
        }
    }

    #[test]
    fn catalog_is_complete_and_consistent() {
        for spec in [
            GroupSpec::u(3).unwrap(),
            GroupSpec::su(3).unwrap(),
            GroupSpec::so(4).unwrap(),
            GroupSpec::so(5).unwrap(),
            GroupSpec::sl2r(),
        ] {
            for n in 1..=6 {
                let cat = catalog_components(spec, n).unwrap();
                let total: usize = cat.iter().map(|d| d.orbit_size).sum();
                assert_eq!(total, enumerate_torsion(spec, n).unwrap().len());
                for (i, d) in cat.iter().enumerate() {
                    assert_eq!(brute_force_orbit_size(d), d.orbit_size);
                    assert!(check_torsion(&d.representative, n as u64, 1e-9).is_ok());
                    assert_eq!(n as u64 % d.exact_order, 0);
                    if i > 0 {
                        assert!(cat[i - 1].canonical < d.canonical);
                    }
                }
            }
        }
        assert_eq!(count_components(GroupSpec::so(5).unwrap(), 1).unwrap(), 1);
    }

    #[test]
    fn dimension_is_conjugation_invariant() {
        for spec in [GroupSpec::u(3).unwrap(), GroupSpec::so(4).unwrap(), GroupSpec::su(3).unwrap()] {
            for d in catalog_components(spec, 4).unwrap() {
                for seed in 0..10 {
                    let h = random_element(spec, seed).unwrap();
                    let g = d.representative.conjugate_by(&h).unwrap();
                    assert_eq!(class_dimension(&g, 1e-9).unwrap(), d.dimension);
                }
            }
        }
    }

    #[test]
    fn gcd_law_examples() {
        let su2 = GroupSpec::su(2).unwrap();
        let r = gcd_intersection_check(su2, 4, 6);
        assert!(r.passed);
        assert_eq!(r.metric("count_intersection"), Some(2.0));
        let r = gcd_intersection_check(GroupSpec::so(3).unwrap(), 3, 5);
        assert!(r.passed);
        assert_eq!(r.metric("count_gcd"), Some(1.0));
        let r = gcd_intersection_check(GroupSpec::u(2).unwrap(), 2, 4);
        assert!(r.passed);
        assert_eq!(r.metric("count_intersection"), r.metric("count_n"));
        assert!(gcd_intersection_check(su2, 0, 4).is_rejected());
    }

    #[test]
    fn csv_and_json_round_trip() {
        let cat = catalog_components(GroupSpec::so(4).unwrap(), 3).unwrap();
        let csv = catalog_to_csv(&cat).unwrap();
        assert!(csv.starts_with("group,size,n,component_index,canonical,dimension,exact_order\n"));
        let rows = read_catalog_csv(&csv).unwrap();
        assert_eq!(rows.len(), cat.len());
        assert_eq!(rows, rows_of(&cat));
        let json = catalog_to_json(&cat).unwrap();
        let entries = read_catalog_json(&json).unwrap();
        assert_eq!(entries, catalog_entries(&cat));
        for (e, d) in entries.iter().zip(&cat) {
            assert_eq!(e.representative.to_matrix().unwrap(), d.representative.matrix);
        }
    }

    fn rows_of(cat: &[ComponentDescriptor]) -> Vec<CatalogRow> {
        rows(cat).collect()
    }

    #[test]
    fn readers_reject_inconsistent_rows() {
        let bad_order = "group,size,n,component_index,canonical,dimension,exact_order\nU,2,4,0,\"0/1,1/2\",2,4\n";
        assert!(read_catalog_csv(bad_order).is_err());
        let bad_group = "group,size,n,component_index,canonical,dimension,exact_order\nSO,1,2,0,0/1,0,1\n";
        assert!(read_catalog_csv(bad_group).is_err());
        assert!(read_catalog_json("[{\"group\":\"U\"}]").is_err());
        let m = MatrixData { rows: 2, cols: 2, re: vec![1.0; 3], im: vec![0.0; 4] };
        assert!(m.to_matrix().is_err());
        let ok = MatrixData::from_matrix(&to_complex(&RMat::identity(2, 2)));
        assert_eq!(ok.re, vec![1.0, 0.0, 0.0, 1.0]);
    }
}
