//! Dense complex linear-algebra helpers shared across the crate.
//!
//! Everything here wraps nalgebra; the rest of the crate never calls the
//! eigensolver or SVD directly so that thresholds and sorting conventions
//! live in one place. Eigenvalues are always returned in ascending order.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Imaginary unit.
pub const IM: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Largest entrywise deviation of `m` from its conjugate transpose.
pub fn herm_deviation(m: &CMat) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Average `m` with its conjugate transpose.
pub fn hermitize(m: &CMat) -> CMat {
    (m + m.adjoint()) * cr(0.5)
}

/// Largest entry magnitude.
pub fn max_abs_entry(m: &CMat) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermEigen {
    pub values: Vec<f64>,
    /// Columns are the (Euclidean-orthonormal) eigenvectors, in the same
    /// order as `values`.
    pub vectors: CMat,
}

/// Hermitian eigendecomposition. The input is symmetrized first, so a
/// deviation up to the caller's Hermiticity tolerance is harmless.
pub fn herm_eigen(m: &CMat) -> HermEigen {
    let n = m.nrows();
    if n == 0 {
        return HermEigen {
            values: Vec::new(),
            vectors: CMat::zeros(0, 0),
        };
    }
    let se = hermitize(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let cols: Vec<CVec> = order
        .iter()
        .map(|&i| se.eigenvectors.column(i).clone_owned())
        .collect();
    HermEigen {
        values,
        vectors: CMat::from_columns(&cols),
    }
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn herm_eigenvalues(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut ev: Vec<f64> = hermitize(m)
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Spectral norm of a Hermitian matrix (largest |eigenvalue|).
pub fn herm_spectral_norm(m: &CMat) -> f64 {
    herm_eigenvalues(m)
        .iter()
        .fold(0.0f64, |acc, &v| acc.max(v.abs()))
}

/// Largest singular value of a general matrix.
pub fn op_norm(m: &CMat) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    // Singular values of m are the square roots of the eigenvalues of m†m.
    herm_eigenvalues(&(m.adjoint() * m))
        .last()
        .map(|v| v.max(0.0).sqrt())
        .unwrap_or(0.0)
}

/// Apply a real function to a Hermitian matrix through its spectrum.
pub fn herm_spectral_map(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let eig = herm_eigen(m);
    let d = CMat::from_diagonal(&CVec::from_iterator(
        eig.values.len(),
        eig.values.iter().map(|&v| cr(f(v))),
    ));
    &eig.vectors * d * eig.vectors.adjoint()
}

/// Orthonormal basis (columns) of the null space of a Hermitian matrix:
/// eigenvectors with |eigenvalue| <= tol.
pub fn herm_null_space(m: &CMat, tol: f64) -> CMat {
    let eig = herm_eigen(m);
    let cols: Vec<CVec> = eig
        .values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.abs() <= tol)
        .map(|(i, _)| eig.vectors.column(i).clone_owned())
        .collect();
    if cols.is_empty() {
        CMat::zeros(m.nrows(), 0)
    } else {
        CMat::from_columns(&cols)
    }
}

/// Orthonormal basis (columns) of the null space of a general (possibly
/// rectangular) matrix. The rank comes from the singular values (directions
/// with singular value <= tol * max(1, largest singular value) are null);
/// the basis is the orthogonal complement of the row space, extracted from
/// the complement projector whose 0/1 spectrum makes the split robust.
pub fn null_space(m: &CMat, tol: f64) -> CMat {
    let cols = m.ncols();
    if cols == 0 {
        return CMat::zeros(0, 0);
    }
    if m.nrows() == 0 {
        return CMat::identity(cols, cols);
    }
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested v_t");
    let smax = svd
        .singular_values
        .iter()
        .fold(0.0f64, |acc, &s| acc.max(s));
    let thr = tol * smax.max(1.0);
    let row_basis: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > thr)
        .collect();
    let nullity = cols - row_basis.len();
    if nullity == 0 {
        return CMat::zeros(cols, 0);
    }
    // Complement projector Q = 1 - sum v_i v_i†; its eigenvectors with
    // eigenvalue near 1 span the null space.
    let mut q = CMat::identity(cols, cols);
    for &i in &row_basis {
        let v = v_t.row(i).adjoint(); // column vector
        q -= &v * v.adjoint();
    }
    let eig = herm_eigen(&q);
    let kept: Vec<CVec> = (0..cols)
        .rev()
        .take(nullity)
        .map(|i| eig.vectors.column(i).clone_owned())
        .collect();
    CMat::from_columns(&kept)
}

/// Diagonal matrix from real entries.
pub fn real_diag(entries: &[f64]) -> CMat {
    CMat::from_diagonal(&CVec::from_iterator(
        entries.len(),
        entries.iter().map(|&v| cr(v)),
    ))
}

/// Random Hermitian matrix with entries of order `scale`.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize, scale: f64) -> CMat {
    let raw = CMat::from_fn(n, n, |_, _| {
        c64(
            scale * (rng.random::<f64>() * 2.0 - 1.0),
            scale * (rng.random::<f64>() * 2.0 - 1.0),
        )
    });
    hermitize(&raw)
}

/// Random complex matrix with entries of order `scale`.
pub fn random_complex<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, scale: f64) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        c64(
            scale * (rng.random::<f64>() * 2.0 - 1.0),
            scale * (rng.random::<f64>() * 2.0 - 1.0),
        )
    })
}

/// Random complex vector with unit-order entries.
pub fn random_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVec {
    CVec::from_fn(n, |_, _| {
        c64(
            rng.random::<f64>() * 2.0 - 1.0,
            rng.random::<f64>() * 2.0 - 1.0,
        )
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn herm_eigen_sorted_and_reconstructs() {
        let m = CMat::from_row_slice(
            2,
            2,
            &[c64(2.0, 0.0), c64(0.0, 1.0), c64(0.0, -1.0), c64(-1.0, 0.0)],
        );
        let eig = herm_eigen(&m);
        assert!(eig.values[0] <= eig.values[1]);
        let d = real_diag(&eig.values);
        let rec = &eig.vectors * d * eig.vectors.adjoint();
        assert!(max_abs_entry(&(rec - m)) < 1e-12);
    }

    #[test]
    fn null_space_of_wide_matrix() {
        // 1x3 row [1, 1, 0]: null space is 2-dimensional.
        let m = CMat::from_row_slice(1, 3, &[cr(1.0), cr(1.0), cr(0.0)]);
        let ns = null_space(&m, 1e-12);
        assert_eq!(ns.ncols(), 2);
        assert!(op_norm(&(&m * &ns)) < 1e-12);
    }

    #[test]
    fn zero_dim_inputs_are_fine() {
        let m = CMat::zeros(0, 0);
        assert_eq!(herm_eigen(&m).values.len(), 0);
        assert_eq!(op_norm(&m), 0.0);
    }

    #[test]
    fn op_norm_matches_hand_value() {
        let m = real_diag(&[3.0, -5.0]);
        assert!((op_norm(&m) - 5.0).abs() < 1e-12);
    }
}
