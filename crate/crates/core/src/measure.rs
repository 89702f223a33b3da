//! Linear measurement maps `A: R^{N1×N2} → R^m` and their adjoints.
//!
//! Two ensembles are provided:
//!
//! * rank-one projections `A(Z)_i = a_iᵀ Z b_i` with standard Gaussian
//!   `a_i`, `b_i`. Only the vectors are stored, so memory is `O(m (N1 + N2))`.
//! * dense i.i.d. maps `A(Z)_i = Σ_{k,ℓ} A_{i,(k,ℓ)} Z_{k,ℓ}` with entries of
//!   variance `1/m`, Gaussian or Laplace. `vec(Z)` is taken in row-major
//!   order, `(k, ℓ) ↦ k N2 + ℓ`.
//!
//! The adjoint is `A*(u) = Σ_i u_i a_i b_iᵀ` for rank-one maps, which is the
//! orientation fixed by `⟨A*(u), Z⟩_F = ⟨u, A(Z)⟩`.

use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::matana::{fmt_f64, parse_csv_rows, DenseMatrix};
use crate::rng::{self, RngSeed};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Distribution {
    Gaussian,
    /// Density proportional to `exp(-|x| / b)`; the subexponential case.
    Laplace,
}

impl Distribution {
    pub fn label(self) -> &'static str {
        match self {
            Distribution::Gaussian => "gaussian",
            Distribution::Laplace => "laplace",
        }
    }
}

impl FromStr for Distribution {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gaussian" | "normal" => Ok(Distribution::Gaussian),
            "laplace" => Ok(Distribution::Laplace),
            other => Err(Error::param(format!("unknown distribution {other:?}"))),
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MapKind {
    /// Row `i` of `left` is `a_iᵀ`, row `i` of `right` is `b_iᵀ`.
    RankOne { left: DMatrix<f64>, right: DMatrix<f64> },
    /// `m × (N1 N2)` coefficients acting on row-major `vec(Z)`.
    DenseIid { coefficients: DMatrix<f64>, dist: Distribution },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementMap {
    n_rows_domain: usize,
    n_cols_domain: usize,
    seed: RngSeed,
    kind: MapKind,
}

/// Gaussian rank-one projections `A(Z)_i = a_iᵀ Z b_i`.
pub fn make_rank_one_map(n1: usize, n2: usize, m: usize, seed: RngSeed) -> Result<MeasurementMap> {
    check_sizes(n1, n2, m)?;
    let mut rng = seed.rng();
    let mut left = DMatrix::zeros(m, n1);
    let mut right = DMatrix::zeros(m, n2);
    for i in 0..m {
        for k in 0..n1 {
            left[(i, k)] = rng::standard_normal(&mut rng);
        }
        for l in 0..n2 {
            right[(i, l)] = rng::standard_normal(&mut rng);
        }
    }
    Ok(MeasurementMap {
        n_rows_domain: n1,
        n_cols_domain: n2,
        seed,
        kind: MapKind::RankOne { left, right },
    })
}

/// Dense map with i.i.d. entries of mean zero and variance exactly `1/m`.
pub fn make_dense_map(n1: usize, n2: usize, m: usize, dist: Distribution, seed: RngSeed) -> Result<MeasurementMap> {
    check_sizes(n1, n2, m)?;
    let mut rng = seed.rng();
    let n = n1 * n2;
    let std_dev = 1.0 / (m as f64).sqrt();
    // Laplace variance is 2 b^2
    let laplace_scale = 1.0 / (2.0 * m as f64).sqrt();
    let mut coefficients = DMatrix::zeros(m, n);
    for i in 0..m {
        for j in 0..n {
            coefficients[(i, j)] = match dist {
                Distribution::Gaussian => std_dev * rng::standard_normal(&mut rng),
                Distribution::Laplace => rng::laplace(&mut rng, laplace_scale),
            };
        }
    }
    Ok(MeasurementMap {
        n_rows_domain: n1,
        n_cols_domain: n2,
        seed,
        kind: MapKind::DenseIid { coefficients, dist },
    })
}

/// Same as [`make_dense_map`] with the distribution given by name.
pub fn make_dense_map_named(n1: usize, n2: usize, m: usize, dist: &str, seed: RngSeed) -> Result<MeasurementMap> {
    make_dense_map(n1, n2, m, dist.parse()?, seed)
}

fn check_sizes(n1: usize, n2: usize, m: usize) -> Result<()> {
    if n1 == 0 || n2 == 0 || m == 0 {
        return Err(Error::param(format!(
            "map sizes must be positive, got N1={n1} N2={n2} m={m}"
        )));
    }
    Ok(())
}

impl MeasurementMap {
    /// Rank-one map from explicit vectors; `a[i]` has length `N1`, `b[i]` length `N2`.
    pub fn rank_one_from_vectors(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<Self> {
        let m = a.len();
        if b.len() != m {
            return Err(Error::dims(format!("{m} right vectors"), format!("{} right vectors", b.len())));
        }
        let n1 = a.first().map_or(0, Vec::len);
        let n2 = b.first().map_or(0, Vec::len);
        check_sizes(n1, n2, m)?;
        let mut left = DMatrix::zeros(m, n1);
        let mut right = DMatrix::zeros(m, n2);
        for i in 0..m {
            if a[i].len() != n1 || b[i].len() != n2 {
                return Err(Error::dims(format!("vectors of length {n1} and {n2}"), format!("row {i}")));
            }
            for (k, &v) in a[i].iter().enumerate() {
                left[(i, k)] = v;
            }
            for (l, &v) in b[i].iter().enumerate() {
                right[(i, l)] = v;
            }
        }
        Self::checked(n1, n2, RngSeed(0), MapKind::RankOne { left, right })
    }

    /// Dense map from an explicit `m × (N1 N2)` coefficient array.
    pub fn dense_from_coefficients(n1: usize, n2: usize, coefficients: DMatrix<f64>, dist: Distribution) -> Result<Self> {
        check_sizes(n1, n2, coefficients.nrows())?;
        if coefficients.ncols() != n1 * n2 {
            return Err(Error::dims(format!("{} columns", n1 * n2), format!("{} columns", coefficients.ncols())));
        }
        Self::checked(n1, n2, RngSeed(0), MapKind::DenseIid { coefficients, dist })
    }

    fn checked(n1: usize, n2: usize, seed: RngSeed, kind: MapKind) -> Result<Self> {
        let finite = match &kind {
            MapKind::RankOne { left, right } => left.iter().chain(right.iter()).all(|v| v.is_finite()),
            MapKind::DenseIid { coefficients, .. } => coefficients.iter().all(|v| v.is_finite()),
        };
        if !finite {
            return Err(Error::NonFinite("measurement map payload"));
        }
        Ok(MeasurementMap {
            n_rows_domain: n1,
            n_cols_domain: n2,
            seed,
            kind,
        })
    }

    pub fn domain_shape(&self) -> (usize, usize) {
        (self.n_rows_domain, self.n_cols_domain)
    }

    pub fn measurement_count(&self) -> usize {
        match &self.kind {
            MapKind::RankOne { left, .. } => left.nrows(),
            MapKind::DenseIid { coefficients, .. } => coefficients.nrows(),
        }
    }

    pub fn seed(&self) -> RngSeed {
        self.seed
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    pub fn variant_label(&self) -> &'static str {
        match self.kind {
            MapKind::RankOne { .. } => "rank_one",
            MapKind::DenseIid { .. } => "dense_iid",
        }
    }

    pub fn distribution(&self) -> Distribution {
        match self.kind {
            MapKind::RankOne { .. } => Distribution::Gaussian,
            MapKind::DenseIid { dist, .. } => dist,
        }
    }

    fn check_domain(&self, z: &DenseMatrix) -> Result<()> {
        if z.shape() != self.domain_shape() {
            return Err(Error::dims(
                format!("{}x{} matrix", self.n_rows_domain, self.n_cols_domain),
                format!("{}x{} matrix", z.n_rows(), z.n_cols()),
            ));
        }
        Ok(())
    }

    /// `A(Z)`.
    pub fn apply(&self, z: &DenseMatrix) -> Result<Vec<f64>> {
        self.check_domain(z)?;
        Ok(match &self.kind {
            MapKind::RankOne { left, right } => {
                // row i of (left Z) is a_iᵀ Z
                let az = left * z.as_matrix();
                az.row_iter().zip(right.row_iter()).map(|(p, b)| p.dot(&b)).collect()
            }
            MapKind::DenseIid { coefficients, .. } => {
                let v = DVector::from_vec(z.row_major());
                (coefficients * v).iter().copied().collect()
            }
        })
    }

    /// `A*(u)`.
    pub fn adjoint(&self, u: &[f64]) -> Result<DenseMatrix> {
        let m = self.measurement_count();
        if u.len() != m {
            return Err(Error::dims(format!("vector of length {m}"), format!("length {}", u.len())));
        }
        let (n1, n2) = self.domain_shape();
        Ok(match &self.kind {
            MapKind::RankOne { left, right } => {
                let mut weighted = right.clone();
                for (mut row, &ui) in weighted.row_iter_mut().zip(u) {
                    row *= ui;
                }
                DenseMatrix::from_matrix_unchecked(left.transpose() * weighted)
            }
            MapKind::DenseIid { coefficients, .. } => {
                let v = coefficients.tr_mul(&DVector::from_column_slice(u));
                DenseMatrix::from_matrix_unchecked(DMatrix::from_row_slice(n1, n2, v.as_slice()))
            }
        })
    }

    /// `‖A(Z)‖_1`.
    pub fn l1_response(&self, z: &DenseMatrix) -> Result<f64> {
        Ok(self.apply(z)?.iter().map(|v| v.abs()).sum())
    }

    /// Text form: header `variant N1 N2 m seed dist`, then one CSV row per
    /// measurement (`a_i` followed by `b_i` for rank-one maps, the
    /// coefficient row for dense maps).
    pub fn to_text(&self) -> String {
        let (n1, n2) = self.domain_shape();
        let mut out = format!(
            "{} {} {} {} {} {}\n",
            self.variant_label(),
            n1,
            n2,
            self.measurement_count(),
            self.seed,
            self.distribution()
        );
        let mut push_row = |vals: &mut dyn Iterator<Item = f64>| {
            let row: Vec<String> = vals.map(fmt_f64).collect();
            writeln!(out, "{}", row.join(",")).unwrap();
        };
        match &self.kind {
            MapKind::RankOne { left, right } => {
                for i in 0..left.nrows() {
                    push_row(&mut left.row(i).iter().chain(right.row(i).iter()).copied());
                }
            }
            MapKind::DenseIid { coefficients, .. } => {
                for i in 0..coefficients.nrows() {
                    push_row(&mut coefficients.row(i).iter().copied());
                }
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::parse(1, "empty map file"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 6 {
            return Err(Error::parse(1, "header must be `variant N1 N2 m seed dist`"));
        }
        let int = |s: &str, name: &str| -> Result<usize> {
            s.parse().map_err(|_| Error::parse(1, format!("bad {name} {s:?}")))
        };
        let n1 = int(fields[1], "N1")?;
        let n2 = int(fields[2], "N2")?;
        let m = int(fields[3], "m")?;
        let seed = RngSeed(fields[4].parse().map_err(|_| Error::parse(1, format!("bad seed {:?}", fields[4])))?);
        let dist: Distribution = fields[5].parse()?;
        check_sizes(n1, n2, m)?;

        let body: String = lines.collect::<Vec<_>>().join("\n");
        let rows = parse_csv_rows(&body, 1)?;
        if rows.len() != m {
            return Err(Error::parse(1, format!("expected {m} payload rows, found {}", rows.len())));
        }
        let kind = match fields[0] {
            "rank_one" => {
                let mut left = DMatrix::zeros(m, n1);
                let mut right = DMatrix::zeros(m, n2);
                for (i, row) in rows.iter().enumerate() {
                    if row.len() != n1 + n2 {
                        return Err(Error::parse(i + 2, format!("expected {} values", n1 + n2)));
                    }
                    for k in 0..n1 {
                        left[(i, k)] = row[k];
                    }
                    for l in 0..n2 {
                        right[(i, l)] = row[n1 + l];
                    }
                }
                MapKind::RankOne { left, right }
            }
            "dense_iid" => {
                let n = n1 * n2;
                let mut coefficients = DMatrix::zeros(m, n);
                for (i, row) in rows.iter().enumerate() {
                    if row.len() != n {
                        return Err(Error::parse(i + 2, format!("expected {n} values")));
                    }
                    for (j, &v) in row.iter().enumerate() {
                        coefficients[(i, j)] = v;
                    }
                }
                MapKind::DenseIid { coefficients, dist }
            }
            other => return Err(Error::parse(1, format!("unknown map variant {other:?}"))),
        };
        Self::checked(n1, n2, seed, kind)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: usize, k: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        v
    }

    #[test]
    fn rank_one_is_deterministic() {
        let a = make_rank_one_map(2, 2, 3, RngSeed(7)).unwrap();
        let b = make_rank_one_map(2, 2, 3, RngSeed(7)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, make_rank_one_map(2, 2, 3, RngSeed(8)).unwrap());
    }

    #[test]
    fn dense_is_deterministic() {
        let a = make_dense_map(2, 2, 4, Distribution::Gaussian, RngSeed(1)).unwrap();
        let b = make_dense_map(2, 2, 4, Distribution::Gaussian, RngSeed(1)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unknown_distribution() {
        assert!(matches!(
            make_dense_map_named(2, 2, 4, "cauchy", RngSeed(1)),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn zero_sizes_rejected() {
        assert!(make_rank_one_map(0, 2, 3, RngSeed(1)).is_err());
        assert!(make_dense_map(2, 2, 0, Distribution::Laplace, RngSeed(1)).is_err());
    }

    #[test]
    fn coordinate_functional() {
        let map = MeasurementMap::rank_one_from_vectors(&[e(3, 0)], &[e(2, 0)]).unwrap();
        let z = DenseMatrix::new(3, 2, &[5.0, 1.0, 2.0, 3.0, 4.0, 6.0]).unwrap();
        assert_eq!(map.apply(&z).unwrap(), vec![5.0]);
    }

    #[test]
    fn single_dyad_adjoint() {
        let map = MeasurementMap::rank_one_from_vectors(&[e(2, 0)], &[e(2, 1)]).unwrap();
        let adj = map.adjoint(&[1.0]).unwrap();
        assert_eq!(adj, DenseMatrix::new(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap());
    }

    #[test]
    fn zero_in_zero_out() {
        for map in [
            make_rank_one_map(3, 4, 5, RngSeed(2)).unwrap(),
            make_dense_map(3, 4, 5, Distribution::Laplace, RngSeed(2)).unwrap(),
        ] {
            assert!(map.apply(&DenseMatrix::zeros(3, 4)).unwrap().iter().all(|&v| v == 0.0));
            assert!(map.adjoint(&[0.0; 5]).unwrap().is_zero());
        }
    }

    #[test]
    fn dimension_mismatch() {
        let map = make_rank_one_map(3, 4, 5, RngSeed(2)).unwrap();
        assert!(matches!(map.apply(&DenseMatrix::zeros(4, 3)), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(map.adjoint(&[0.0; 4]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn dense_uses_row_major_vec() {
        // single measurement picking Z[0][1] in a 2x2 domain
        let coef = DMatrix::from_row_slice(1, 4, &[0.0, 1.0, 0.0, 0.0]);
        let map = MeasurementMap::dense_from_coefficients(2, 2, coef, Distribution::Gaussian).unwrap();
        let z = DenseMatrix::new(2, 2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(map.apply(&z).unwrap(), vec![2.0]);
        assert_eq!(map.adjoint(&[3.0]).unwrap(), DenseMatrix::new(2, 2, &[0.0, 3.0, 0.0, 0.0]).unwrap());
    }

    #[test]
    fn text_round_trip_is_exact() {
        for map in [
            make_rank_one_map(3, 2, 4, RngSeed(11)).unwrap(),
            make_dense_map(2, 3, 5, Distribution::Laplace, RngSeed(12)).unwrap(),
        ] {
            let text = map.to_text();
            assert!(text.starts_with(&format!("{} ", map.variant_label())));
            let back = MeasurementMap::from_text(&text).unwrap();
            assert_eq!(back, map);
        }
    }

    #[test]
    fn text_rejects_truncated_payload() {
        let map = make_rank_one_map(2, 2, 3, RngSeed(1)).unwrap();
        let text = map.to_text();
        let truncated: String = text.lines().take(3).collect::<Vec<_>>().join("\n");
        assert!(MeasurementMap::from_text(&truncated).is_err());
        assert!(MeasurementMap::from_text("rank_one 2 2").is_err());
    }
}
