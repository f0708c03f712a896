//! Finite-dimensional indefinite inner-product linear algebra.
//!
//! An [`IndefiniteSpace`] carries two products on C^n: the indefinite inner
//! product `<x, y> = x† G y` (Hermitian gram `G`) and an auxiliary
//! positive-definite scalar product `(x, y) = x† A y`. The two are linked by
//! the metric operator `eta = A^{-1} G`, a self-adjoint contraction with
//! respect to the auxiliary product once the auxiliary scale is adjusted.
//!
//! Maximality of the auxiliary topology is represented by its
//! finite-dimensional surrogate, invertibility of `eta` above a tolerance,
//! and the two-step construction (strip the null eigenspace of `eta`, then
//! pass to the |eta|-twisted scalar product) produces a Krein-normalized
//! metric with `eta_1^2 = 1`. These stand in for the infinite-dimensional
//! topology statements; they are surrogates, not the statements themselves.

use crate::borchers::WightmanFunctional;
use crate::error::{Error, Result};
use crate::linalg::{
    self, cr, herm_deviation, herm_eigen, herm_spectral_map, hermitize, max_abs_entry, CMat,
    CVec,
};
use num_complex::Complex64;

/// Tolerances for the krein-layer operations.
///
/// Defaults: Hermiticity and equality checks at 1e-10, the null band at
/// 1e-8, positive-definiteness floor at 1e-12. Dense double-precision
/// eigensolvers resolve ~1e-12 at the dimensions this crate works at.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub herm: f64,
    pub eq: f64,
    pub null: f64,
    pub pd: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm: 1e-10,
            eq: 1e-10,
            null: 1e-8,
            pd: 1e-12,
        }
    }
}

/// Finite-dimensional complex space with an indefinite inner product and an
/// auxiliary positive-definite scalar product.
#[derive(Debug, Clone)]
pub struct IndefiniteSpace {
    dim: usize,
    gram: CMat,
    aux: CMat,
}

impl IndefiniteSpace {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gram(&self) -> &CMat {
        &self.gram
    }

    pub fn aux(&self) -> &CMat {
        &self.aux
    }

    /// Indefinite inner product `<x, y> = x† G y` (conjugate-linear in x).
    pub fn inner(&self, x: &CVec, y: &CVec) -> Complex64 {
        x.dotc(&(&self.gram * y))
    }

    /// Auxiliary scalar product `(x, y) = x† A y`.
    pub fn aux_inner(&self, x: &CVec, y: &CVec) -> Complex64 {
        x.dotc(&(&self.aux * y))
    }

    fn with_parts(gram: CMat, aux: CMat) -> Self {
        let dim = gram.nrows();
        Self { dim, gram, aux }
    }
}

/// Self-adjoint contraction linking the auxiliary product to the inner
/// product: `<x, y> = (x, eta y)` on all basis pairs.
#[derive(Debug, Clone)]
pub struct MetricOperator {
    eta: CMat,
    /// Eigenvalues of eta (real; eta is self-adjoint w.r.t. aux), ascending.
    eigenvalues: Vec<f64>,
    /// Factor by which the auxiliary product was rescaled so eta is a
    /// contraction; 1.0 when no rescale was needed.
    aux_scale: f64,
    /// True when eta^2 = 1 holds to tolerance.
    is_krein: bool,
}

impl MetricOperator {
    pub fn eta(&self) -> &CMat {
        &self.eta
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn aux_scale(&self) -> f64 {
        self.aux_scale
    }

    pub fn is_krein(&self) -> bool {
        self.is_krein
    }

    /// Smallest |eigenvalue| of eta; zero for the empty space.
    pub fn min_abs_eigenvalue(&self) -> f64 {
        if self.eigenvalues.is_empty() {
            0.0
        } else {
            self.eigenvalues
                .iter()
                .map(|v| v.abs())
                .fold(f64::INFINITY, f64::min)
        }
    }
}

/// Eigenvalue counts of a Hermitian gram by sign, with a null band.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Signature {
    pub n_plus: usize,
    pub n_zero: usize,
    pub n_minus: usize,
}

impl Signature {
    pub fn dim(&self) -> usize {
        self.n_plus + self.n_zero + self.n_minus
    }
}

/// Validate and build an [`IndefiniteSpace`].
///
/// The gram is symmetrized by averaging with its conjugate transpose when the
/// deviation is below `tol.herm`, and rejected otherwise. The auxiliary
/// product must be positive definite (smallest eigenvalue > `tol.pd`).
pub fn build_space(gram: CMat, aux: CMat, tol: &Tolerances) -> Result<IndefiniteSpace> {
    assert_eq!(gram.nrows(), gram.ncols(), "gram must be square");
    assert_eq!(aux.nrows(), aux.ncols(), "aux must be square");
    assert_eq!(gram.nrows(), aux.nrows(), "gram and aux dimensions differ");

    let dev = herm_deviation(&gram);
    if dev >= tol.herm {
        return Err(Error::NonHermitian {
            deviation: dev,
            tol: tol.herm,
        });
    }
    let dev_aux = herm_deviation(&aux);
    if dev_aux >= tol.herm {
        return Err(Error::NonHermitian {
            deviation: dev_aux,
            tol: tol.herm,
        });
    }
    let aux = hermitize(&aux);
    if aux.nrows() > 0 {
        let min_eig = linalg::herm_eigenvalues(&aux)[0];
        if min_eig <= tol.pd {
            return Err(Error::AuxNotPositive { min_eig });
        }
    }
    Ok(IndefiniteSpace::with_parts(hermitize(&gram), aux))
}

/// Convenience: build a space with the identity auxiliary product.
pub fn build_space_euclidean(gram: CMat, tol: &Tolerances) -> Result<IndefiniteSpace> {
    let n = gram.nrows();
    build_space(gram, CMat::identity(n, n), tol)
}

/// Whitened metric M = A^{-1/2} G A^{-1/2} together with A^{±1/2}.
struct Whitened {
    m: CMat,
    sqrt: CMat,
    inv_sqrt: CMat,
}

fn whiten(space: &IndefiniteSpace) -> Whitened {
    let sqrt = herm_spectral_map(&space.aux, |v| v.max(0.0).sqrt());
    let inv_sqrt = herm_spectral_map(&space.aux, |v| {
        if v > 0.0 {
            1.0 / v.sqrt()
        } else {
            0.0
        }
    });
    let m = hermitize(&(&inv_sqrt * &space.gram * &inv_sqrt));
    Whitened { m, sqrt, inv_sqrt }
}

/// Solve `(x, eta y) = <x, y>` for the metric operator.
///
/// The naive solution is `eta = A^{-1} G`; when its operator norm with
/// respect to the auxiliary product exceeds 1, the returned space carries the
/// rescaled auxiliary product (by exactly that norm) so that eta is a
/// contraction, and the scale factor is recorded on the result.
pub fn metric_operator(space: &IndefiniteSpace, tol: &Tolerances) -> (IndefiniteSpace, MetricOperator) {
    let wh = whiten(space);
    let eig = herm_eigen(&wh.m);
    let norm = eig.values.iter().fold(0.0f64, |a, &v| a.max(v.abs()));

    let (scale, m_scaled, values) = if norm > 1.0 + tol.eq {
        (
            norm,
            &wh.m * cr(1.0 / norm),
            eig.values.iter().map(|v| v / norm).collect::<Vec<_>>(),
        )
    } else {
        (1.0, wh.m.clone(), eig.values.clone())
    };

    // eta = A^{-1/2} (M / s) A^{1/2} relative to the rescaled aux s*A.
    let eta = &wh.inv_sqrt * &m_scaled * &wh.sqrt;
    let n = m_scaled.nrows();
    let krein_dev = max_abs_entry(&(&m_scaled * &m_scaled - CMat::identity(n, n)));

    let new_space = if scale != 1.0 {
        IndefiniteSpace::with_parts(space.gram.clone(), &space.aux * cr(scale))
    } else {
        space.clone()
    };
    (
        new_space,
        MetricOperator {
            eta,
            eigenvalues: values,
            aux_scale: scale,
            is_krein: krein_dev < tol.eq,
        },
    )
}

/// Result of [`strip_nulls`]: the reduced space, its metric, and the
/// embedding of the reduced basis into the original coordinates (columns).
#[derive(Debug, Clone)]
pub struct StrippedSpace {
    pub space: IndefiniteSpace,
    pub metric: MetricOperator,
    pub embedding: CMat,
}

/// Project out the null eigenspace of eta.
///
/// `P_0` is the aux-orthogonal projector onto eta-eigenvectors with
/// |eigenvalue| <= `tol.null`; the result is the restriction to the range of
/// `1 - P_0`. The indefinite inner product is unchanged on the retained
/// subspace, and the reduced auxiliary product comes out as the identity. An
/// empty kernel returns the input unchanged.
pub fn strip_nulls(
    space: &IndefiniteSpace,
    metric: &MetricOperator,
    tol: &Tolerances,
) -> StrippedSpace {
    let has_nulls = metric.eigenvalues.iter().any(|v| v.abs() <= tol.null);
    if !has_nulls {
        return StrippedSpace {
            space: space.clone(),
            metric: metric.clone(),
            embedding: CMat::identity(space.dim, space.dim),
        };
    }
    let wh = whiten(space);
    let eig = herm_eigen(&wh.m);
    let kept: Vec<usize> = eig
        .values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.abs() > tol.null)
        .map(|(i, _)| i)
        .collect();
    let r = kept.len();
    if r == 0 {
        // Everything is null: the reduced space is zero-dimensional.
        return StrippedSpace {
            space: IndefiniteSpace::with_parts(CMat::zeros(0, 0), CMat::zeros(0, 0)),
            metric: MetricOperator {
                eta: CMat::zeros(0, 0),
                eigenvalues: Vec::new(),
                aux_scale: metric.aux_scale,
                is_krein: true,
            },
            embedding: CMat::zeros(space.dim, 0),
        };
    }
    // Embedding columns S = A^{-1/2} v_i for the retained eigenvectors; then
    // S† A S = 1 and S† G S = diag(retained eigenvalues).
    let cols: Vec<CVec> = kept
        .iter()
        .map(|&i| &wh.inv_sqrt * eig.vectors.column(i).clone_owned())
        .collect();
    let embedding = CMat::from_columns(&cols);
    let gram_red = hermitize(&(embedding.adjoint() * &space.gram * &embedding));
    let values: Vec<f64> = kept.iter().map(|&i| eig.values[i]).collect();
    let eta_red = gram_red.clone(); // aux is the identity on the reduced space
    let is_krein = values.iter().all(|v| (v.abs() - 1.0).abs() < tol.eq);
    StrippedSpace {
        space: IndefiniteSpace::with_parts(gram_red, CMat::identity(r, r)),
        metric: MetricOperator {
            eta: eta_red,
            eigenvalues: values,
            aux_scale: metric.aux_scale,
            is_krein,
        },
        embedding,
    }
}

/// Krein-normalize: replace the auxiliary product by `(x, |eta| y)` and the
/// metric by `sign(eta)`, which squares to the identity.
///
/// Requires eta invertible beyond the null band; run [`strip_nulls`] first
/// otherwise.
pub fn krein_normalize(
    space: &IndefiniteSpace,
    metric: &MetricOperator,
    tol: &Tolerances,
) -> Result<(IndefiniteSpace, MetricOperator)> {
    if let Some(&bad) = metric
        .eigenvalues
        .iter()
        .find(|v| v.abs() <= tol.null)
    {
        return Err(Error::SingularEta {
            eig: bad,
            tol: tol.null,
        });
    }
    if space.dim == 0 {
        return Ok((space.clone(), metric.clone()));
    }
    let wh = whiten(space);
    let eig = herm_eigen(&wh.m);
    let abs_m = {
        let d = linalg::real_diag(&eig.values.iter().map(|v| v.abs()).collect::<Vec<_>>());
        &eig.vectors * d * eig.vectors.adjoint()
    };
    let sign_m = {
        let d = linalg::real_diag(&eig.values.iter().map(|v| v.signum()).collect::<Vec<_>>());
        &eig.vectors * d * eig.vectors.adjoint()
    };
    // New aux A_1 = A^{1/2} |M| A^{1/2}; new eta_1 = A^{-1/2} sign(M) A^{1/2}.
    let aux1 = hermitize(&(&wh.sqrt * &abs_m * &wh.sqrt));
    let eta1 = &wh.inv_sqrt * &sign_m * &wh.sqrt;
    let values: Vec<f64> = eig.values.iter().map(|v| v.signum()).collect();
    Ok((
        IndefiniteSpace::with_parts(space.gram.clone(), aux1),
        MetricOperator {
            eta: eta1,
            eigenvalues: values,
            aux_scale: metric.aux_scale,
            is_krein: true,
        },
    ))
}

/// Finite-dimensional surrogate of "eta has a continuous inverse":
/// min |eigenvalue(eta)| >= tol.
pub fn is_maximal(metric: &MetricOperator, tol: f64) -> bool {
    metric.eigenvalues.iter().all(|v| v.abs() >= tol)
}

/// Smallest constant C with `|<x, y>|^2 <= C (x,x) (y,y)`:
/// the squared largest singular value of A^{-1/2} G A^{-1/2}.
pub fn admissibility_constant(space: &IndefiniteSpace, tol: &Tolerances) -> Result<f64> {
    if space.dim == 0 {
        return Ok(0.0);
    }
    let min_eig = linalg::herm_eigenvalues(&space.aux)[0];
    if min_eig <= tol.pd {
        return Err(Error::AuxNotPositive { min_eig });
    }
    let wh = whiten(space);
    let s = linalg::herm_spectral_norm(&wh.m);
    Ok(s * s)
}

/// Null-quotient of a positive-semidefinite gram.
#[derive(Debug, Clone)]
pub struct Quotient {
    /// Map from original coordinates to quotient coordinates (r x n).
    pub map: CMat,
    /// Positive-definite reduced gram (r x r, diagonal in the eigenbasis).
    pub reduced: CMat,
}

impl Quotient {
    pub fn dim(&self) -> usize {
        self.reduced.nrows()
    }
}

/// Quotient out the null directions of a PSD gram.
///
/// Rejects grams with an eigenvalue below `-tol_null`; eigenvectors with
/// eigenvalue <= `tol_null` are quotiented away and the reduced gram is the
/// diagonal of the retained (all > `tol_null`) eigenvalues.
pub fn quotient_psd(gram: &CMat, tol_null: f64) -> Result<Quotient> {
    let eig = herm_eigen(gram);
    if let Some(&bad) = eig.values.iter().find(|&&v| v < -tol_null) {
        return Err(Error::NotPositiveSemidefinite { eig: bad });
    }
    let kept: Vec<usize> = eig
        .values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > tol_null)
        .map(|(i, _)| i)
        .collect();
    if kept.is_empty() {
        return Ok(Quotient {
            map: CMat::zeros(0, gram.nrows()),
            reduced: CMat::zeros(0, 0),
        });
    }
    let rows: Vec<CVec> = kept
        .iter()
        .map(|&i| eig.vectors.column(i).clone_owned())
        .collect();
    let map = CMat::from_columns(&rows).adjoint();
    let reduced = linalg::real_diag(&kept.iter().map(|&i| eig.values[i]).collect::<Vec<_>>());
    Ok(Quotient { map, reduced })
}

/// Eigenvalue counts of a Hermitian gram by sign, with null band
/// |eigenvalue| <= `tol_null`.
pub fn signature(gram: &CMat, tol_null: f64) -> Signature {
    let mut sig = Signature {
        n_plus: 0,
        n_zero: 0,
        n_minus: 0,
    };
    for v in linalg::herm_eigenvalues(gram) {
        if v.abs() <= tol_null {
            sig.n_zero += 1;
        } else if v > 0.0 {
            sig.n_plus += 1;
        } else {
            sig.n_minus += 1;
        }
    }
    sig
}

/// Per-degree positive weights defining candidate Hilbert seminorms
/// `p_n(f) = |diag(w_n) f|_2` on the degree-n word basis.
#[derive(Debug, Clone)]
pub struct SeminormWeights {
    per_degree: Vec<Vec<f64>>,
}

impl SeminormWeights {
    /// Unit weights for every degree of the given basis.
    pub fn unit(b: usize, d_max: usize) -> Self {
        Self {
            per_degree: (0..=d_max).map(|n| vec![1.0; b.pow(n as u32)]).collect(),
        }
    }

    pub fn from_parts(per_degree: Vec<Vec<f64>>) -> Self {
        assert!(
            per_degree
                .iter()
                .all(|w| w.iter().all(|&x| x > 0.0)),
            "seminorm weights must be positive"
        );
        Self { per_degree }
    }

    pub fn degree(&self, n: usize) -> &[f64] {
        &self.per_degree[n]
    }

    pub fn d_max(&self) -> usize {
        self.per_degree.len() - 1
    }

    /// Multiply every degree-n weight by `factors[n]`.
    pub fn scaled(&self, factors: &[f64]) -> Self {
        let per_degree = self
            .per_degree
            .iter()
            .enumerate()
            .map(|(n, w)| w.iter().map(|x| x * factors[n]).collect())
            .collect();
        Self { per_degree }
    }
}

/// Best constants of the dominance estimate |W_{n+m}(f (x) h)| <= c(n,m) p_n(f) p_m(h).
#[derive(Debug, Clone)]
pub struct DominanceTable {
    /// (n, m, c) for every pair with n + m <= d_max, in lexicographic order.
    pub entries: Vec<(usize, usize, f64)>,
    pub max_constant: f64,
    /// True when every constant is <= 1 (up to a 1e-12 slack for roundoff).
    pub admissible: bool,
}

impl DominanceTable {
    pub fn constant(&self, n: usize, m: usize) -> Option<f64> {
        self.entries
            .iter()
            .find(|(a, b, _)| *a == n && *b == m)
            .map(|&(_, _, c)| c)
    }
}

/// Compute the dominance constants c(n, m) for all n + m <= d_max.
///
/// c(n,m) is the operator norm of the weighted cross-Gram block
/// `diag(w_n)^{-1} K diag(w_m)^{-1}` with `K[f][h] = W_{n+m}(f (x) h)`.
pub fn seminorm_dominance(
    w: &WightmanFunctional,
    weights: &SeminormWeights,
) -> Result<DominanceTable> {
    let b = w.basis().letters();
    let d_max = w.basis().d_max();
    if weights.d_max() < d_max {
        return Err(Error::DegreeOverflow {
            degree: d_max,
            cap: weights.d_max(),
        });
    }
    let mut entries = Vec::new();
    let mut max_constant = 0.0f64;
    for n in 0..=d_max {
        for m in 0..=(d_max - n) {
            let rows = b.pow(n as u32);
            let cols = b.pow(m as u32);
            let block = w.block(n + m);
            // K[f][h] = W_{n+m}[f ++ h]; big-endian word index means the
            // degree-n prefix is the major index.
            let weighted = CMat::from_fn(rows, cols, |i, j| {
                block[i * cols + j] / (weights.degree(n)[i] * weights.degree(m)[j])
            });
            let c = linalg::op_norm(&weighted);
            max_constant = max_constant.max(c);
            entries.push((n, m, c));
        }
    }
    Ok(DominanceTable {
        entries,
        max_constant,
        admissible: max_constant <= 1.0 + 1e-12,
    })
}

/// Per-degree scale factors making the dominance table admissible:
/// `alpha_n = max(1, sqrt(max_m max(c(n,m), c(m,n))))`, which guarantees
/// `alpha_n alpha_m >= c(n,m)` for every pair.
pub fn normalize_weights(table: &DominanceTable, d_max: usize) -> Vec<f64> {
    (0..=d_max)
        .map(|n| {
            let worst = table
                .entries
                .iter()
                .filter(|(a, b, _)| *a == n || *b == n)
                .map(|&(_, _, c)| c)
                .fold(0.0f64, f64::max);
            worst.sqrt().max(1.0)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::borchers::AlgebraBasis;
    use crate::linalg::real_diag;

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn build_space_identity_and_diag() {
        let s = build_space_euclidean(CMat::identity(2, 2), &tols()).unwrap();
        assert_eq!(signature(s.gram(), 1e-8), Signature { n_plus: 2, n_zero: 0, n_minus: 0 });

        let s = build_space_euclidean(real_diag(&[1.0, -1.0]), &tols()).unwrap();
        assert_eq!(signature(s.gram(), 1e-8), Signature { n_plus: 1, n_zero: 0, n_minus: 1 });
    }

    #[test]
    fn build_space_rejects_forced_asymmetry() {
        let mut g = CMat::zeros(2, 2);
        g[(0, 1)] = cr(1.0);
        let err = build_space_euclidean(g, &tols()).unwrap_err();
        assert!(matches!(err, Error::NonHermitian { .. }));
    }

    #[test]
    fn build_space_rejects_indefinite_aux() {
        let err = build_space(real_diag(&[1.0, 1.0]), real_diag(&[1.0, -1.0]), &tols()).unwrap_err();
        assert!(matches!(err, Error::AuxNotPositive { .. }));
    }

    #[test]
    fn metric_operator_is_gram_for_identity_aux() {
        let s = build_space_euclidean(real_diag(&[1.0, -1.0]), &tols()).unwrap();
        let (_, mo) = metric_operator(&s, &tols());
        assert!(max_abs_entry(&(mo.eta() - real_diag(&[1.0, -1.0]))) < 1e-12);
        assert_eq!(mo.aux_scale(), 1.0);
        assert!(mo.is_krein());
    }

    #[test]
    fn metric_operator_rescales_to_contraction() {
        let s = build_space_euclidean(real_diag(&[2.0, -3.0]), &tols()).unwrap();
        let (s2, mo) = metric_operator(&s, &tols());
        assert!((mo.aux_scale() - 3.0).abs() < 1e-12);
        assert!(max_abs_entry(&(mo.eta() - real_diag(&[2.0 / 3.0, -1.0]))) < 1e-12);
        // Rescaled aux reproduces the inner product through eta.
        assert!(max_abs_entry(&(s2.aux() * mo.eta() - s2.gram())) < 1e-12);
    }

    #[test]
    fn metric_operator_of_zero_gram_is_zero() {
        let s = build_space_euclidean(CMat::zeros(3, 3), &tols()).unwrap();
        let (_, mo) = metric_operator(&s, &tols());
        assert_eq!(max_abs_entry(mo.eta()), 0.0);
    }

    #[test]
    fn krein_normalize_diagonal_example() {
        // eta = diag(1/2, -1/4) with identity aux.
        let s = build_space_euclidean(real_diag(&[0.5, -0.25]), &tols()).unwrap();
        let (s, mo) = metric_operator(&s, &tols());
        let (s1, mo1) = krein_normalize(&s, &mo, &tols()).unwrap();
        assert!(max_abs_entry(&(s1.aux() - real_diag(&[0.5, 0.25]))) < 1e-12);
        assert!(max_abs_entry(&(mo1.eta() - real_diag(&[1.0, -1.0]))) < 1e-12);
        assert!(mo1.is_krein());
        assert!(is_maximal(&mo1, 1e-10));
    }

    #[test]
    fn krein_normalize_identity_unchanged() {
        let s = build_space_euclidean(CMat::identity(3, 3), &tols()).unwrap();
        let (s, mo) = metric_operator(&s, &tols());
        let (s1, mo1) = krein_normalize(&s, &mo, &tols()).unwrap();
        assert!(max_abs_entry(&(mo1.eta() - CMat::identity(3, 3))) < 1e-12);
        assert!(max_abs_entry(&(s1.aux() - CMat::identity(3, 3))) < 1e-12);
    }

    #[test]
    fn krein_normalize_rejects_singular_eta() {
        let s = build_space_euclidean(real_diag(&[1.0, 0.0]), &tols()).unwrap();
        let (s, mo) = metric_operator(&s, &tols());
        let err = krein_normalize(&s, &mo, &tols()).unwrap_err();
        assert!(matches!(err, Error::SingularEta { .. }));
    }

    #[test]
    fn strip_nulls_direct_sum_split() {
        let s = build_space_euclidean(real_diag(&[1.0, -1.0, 0.0]), &tols()).unwrap();
        let (s, mo) = metric_operator(&s, &tols());
        let stripped = strip_nulls(&s, &mo, &tols());
        assert_eq!(stripped.space.dim(), 2);
        let evs = stripped.metric.eigenvalues();
        assert!((evs[0] + 1.0).abs() < 1e-12 && (evs[1] - 1.0).abs() < 1e-12);
        // Inner product preserved through the embedding.
        let e = &stripped.embedding;
        assert!(max_abs_entry(&(e.adjoint() * s.gram() * e - stripped.space.gram())) < 1e-12);
    }

    #[test]
    fn strip_nulls_zero_eta_gives_zero_dim() {
        let s = build_space_euclidean(CMat::zeros(4, 4), &tols()).unwrap();
        let (s, mo) = metric_operator(&s, &tols());
        let stripped = strip_nulls(&s, &mo, &tols());
        assert_eq!(stripped.space.dim(), 0);
        // Downstream consumers must cope with dimension zero.
        let (s1, m1) = krein_normalize(&stripped.space, &stripped.metric, &tols()).unwrap();
        assert_eq!(s1.dim(), 0);
        assert!(m1.is_krein());
        assert_eq!(signature(s1.gram(), 1e-8).dim(), 0);
    }

    #[test]
    fn strip_nulls_below_threshold_eigenvalue() {
        let s = build_space_euclidean(real_diag(&[1.0, 1e-14]), &tols()).unwrap();
        let (s, mo) = metric_operator(&s, &tols());
        let stripped = strip_nulls(&s, &mo, &tols());
        assert_eq!(stripped.space.dim(), 1);
    }

    #[test]
    fn strip_nulls_empty_kernel_is_identity() {
        let s = build_space_euclidean(real_diag(&[1.0, -2.0]), &tols()).unwrap();
        let (s, mo) = metric_operator(&s, &tols());
        let stripped = strip_nulls(&s, &mo, &tols());
        assert_eq!(stripped.space.dim(), 2);
        assert!(max_abs_entry(&(&stripped.embedding - CMat::identity(2, 2))) < 1e-15);
    }

    #[test]
    fn maximality_thresholds() {
        let s = build_space_euclidean(real_diag(&[1.0, -1.0]), &tols()).unwrap();
        let (_, mo) = metric_operator(&s, &tols());
        assert!(is_maximal(&mo, 1e-10));

        let s = build_space_euclidean(real_diag(&[1.0, 1e-12]), &tols()).unwrap();
        let (_, mo) = metric_operator(&s, &tols());
        assert!(!is_maximal(&mo, 1e-10));
    }

    #[test]
    fn admissibility_examples() {
        let s = build_space_euclidean(real_diag(&[1.0, -1.0]), &tols()).unwrap();
        assert!((admissibility_constant(&s, &tols()).unwrap() - 1.0).abs() < 1e-12);

        let s = build_space_euclidean(real_diag(&[2.0, -3.0]), &tols()).unwrap();
        assert!((admissibility_constant(&s, &tols()).unwrap() - 9.0).abs() < 1e-12);

        let s = build_space_euclidean(CMat::zeros(2, 2), &tols()).unwrap();
        assert_eq!(admissibility_constant(&s, &tols()).unwrap(), 0.0);
    }

    #[test]
    fn quotient_psd_examples() {
        let q = quotient_psd(&real_diag(&[1.0, 1.0, 0.0]), 1e-8).unwrap();
        assert_eq!(q.dim(), 2);
        assert!(max_abs_entry(&(&q.reduced - CMat::identity(2, 2))) < 1e-12);

        let err = quotient_psd(&real_diag(&[1.0, -1.0]), 1e-8).unwrap_err();
        assert!(matches!(err, Error::NotPositiveSemidefinite { .. }));
    }

    #[test]
    fn signature_examples() {
        assert_eq!(
            signature(&real_diag(&[1.0, -1.0, 0.0]), 1e-8),
            Signature { n_plus: 1, n_zero: 1, n_minus: 1 }
        );
        // -g with signature convention g = diag(+1,-1,-1,-1).
        assert_eq!(
            signature(&real_diag(&[-1.0, 1.0, 1.0, 1.0]), 1e-8),
            Signature { n_plus: 3, n_zero: 0, n_minus: 1 }
        );
    }

    fn degree_two_functional(scale: f64) -> WightmanFunctional {
        let b = 2;
        let basis = AlgebraBasis::new(b, 2, vec![0, 1]).unwrap();
        let mut blocks: Vec<Vec<Complex64>> = vec![vec![cr(1.0)], vec![cr(0.0); 2], vec![cr(0.0); 4]];
        blocks[2][0] = cr(scale);
        blocks[2][3] = cr(scale);
        WightmanFunctional::new(basis, blocks).unwrap()
    }

    #[test]
    fn seminorm_dominance_identity_block() {
        let w = degree_two_functional(1.0);
        let weights = SeminormWeights::unit(2, 2);
        let table = seminorm_dominance(&w, &weights).unwrap();
        assert!((table.constant(1, 1).unwrap() - 1.0).abs() < 1e-12);
        // The degree-0 pairings see the whole W2 block at once:
        // c(0,2) = |(1,0,0,1)| = sqrt(2), so unit weights need the
        // normalization step before the full table is admissible.
        assert!((table.constant(0, 2).unwrap() - 2.0f64.sqrt()).abs() < 1e-12);
        let factors = normalize_weights(&table, 2);
        let table = seminorm_dominance(&w, &weights.scaled(&factors)).unwrap();
        assert!(table.admissible);
    }

    #[test]
    fn seminorm_dominance_scaled_block_and_normalization() {
        let w = degree_two_functional(2.0);
        let weights = SeminormWeights::unit(2, 2);
        let table = seminorm_dominance(&w, &weights).unwrap();
        assert!((table.constant(1, 1).unwrap() - 2.0).abs() < 1e-12);
        assert!(!table.admissible);

        let factors = normalize_weights(&table, 2);
        assert!((factors[1] - 2.0f64.sqrt()).abs() < 1e-12);
        let table2 = seminorm_dominance(&w, &weights.scaled(&factors)).unwrap();
        assert!(table2.admissible);
        assert!((table2.constant(1, 1).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn seminorm_dominance_zero_functional() {
        let b = 2;
        let basis = AlgebraBasis::new(b, 2, vec![0, 1]).unwrap();
        let blocks = vec![vec![cr(1.0)], vec![cr(0.0); 2], vec![cr(0.0); 4]];
        let mut w = WightmanFunctional::new(basis, blocks).unwrap();
        // Zero out W_0 as well to model the all-zero functional.
        w.set_block(0, vec![cr(0.0)]);
        let table = seminorm_dominance(&w, &SeminormWeights::unit(2, 2)).unwrap();
        assert_eq!(table.max_constant, 0.0);
    }
}
