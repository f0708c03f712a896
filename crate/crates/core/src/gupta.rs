//! Gupta-Bleuler subsidiary condition at finite truncation.
//!
//! The physical subspace H' is the joint kernel of the per-mode annihilation
//! combinations `B+(k) = k^mu a_mu(k)` inside the truncated Fock space. The
//! gauge annihilators lower occupation by one, so the kernel is graded and
//! is computed degree by degree. On H' the indefinite inner product is
//! positive semidefinite; quotienting its null vectors H'' yields the
//! physical Hilbert data with two transverse photon states per mode.
//!
//! Truncation-boundary policy, applied uniformly: operator identities are
//! asserted only on inputs with total occupation <= n_max - 1.

use crate::error::{Error, Result};
use crate::fock::{FieldOperator, FockSpace, TestFunction};
use crate::krein::{self, Tolerances};
use crate::linalg::{cr, herm_eigen, hermitize, null_space, op_norm, CMat, CVec};
use num_complex::Complex64;

/// Basis data for H' = joint kernel of the stacked gauge annihilators.
#[derive(Debug)]
pub struct PhysicalSubspace {
    /// Euclidean-orthonormal basis of H' as Fock-coordinate columns, graded
    /// by occupation.
    basis: CMat,
    /// Column blocks per occupation: degree n occupies
    /// `degree_offsets[n]..degree_offsets[n+1]`.
    degree_offsets: Vec<usize>,
    /// Inner product restricted to H' (block diagonal by occupation).
    gram: CMat,
    /// Null vectors of the restricted gram (H''), as Fock-coordinate columns,
    /// graded the same way.
    null_basis: CMat,
    null_degree_offsets: Vec<usize>,
}

impl PhysicalSubspace {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &CMat {
        &self.basis
    }

    pub fn gram(&self) -> &CMat {
        &self.gram
    }

    pub fn null_basis(&self) -> &CMat {
        &self.null_basis
    }

    pub fn null_dim(&self) -> usize {
        self.null_basis.ncols()
    }

    /// Dimension of the occupation-n sector of H'.
    pub fn degree_dim(&self, n: usize) -> usize {
        self.degree_offsets[n + 1] - self.degree_offsets[n]
    }

    pub fn max_degree(&self) -> usize {
        self.degree_offsets.len() - 2
    }

    /// Columns of the basis with occupation <= cap.
    pub fn basis_up_to(&self, cap: usize) -> CMat {
        let end = self.degree_offsets[(cap + 1).min(self.degree_offsets.len() - 1)];
        self.basis.columns(0, end).clone_owned()
    }

    fn null_basis_up_to(&self, cap: usize) -> CMat {
        let end = self.null_degree_offsets[(cap + 1).min(self.null_degree_offsets.len() - 1)];
        self.null_basis.columns(0, end).clone_owned()
    }

    /// Distance of the vacuum from H' (zero when the vacuum is physical).
    pub fn vacuum_defect(&self, fock: &FockSpace) -> f64 {
        let omega = fock.vacuum_vector();
        let coeffs = self.basis.adjoint() * &omega;
        (omega - &self.basis * coeffs).norm()
    }
}

/// Compute H' degree by degree via the stacked per-mode gauge annihilators.
pub fn physical_subspace(fock: &FockSpace, tol: &Tolerances) -> Result<PhysicalSubspace> {
    let n_modes = fock.lattice().n_modes();
    let annihilators: Vec<FieldOperator> =
        (0..n_modes).map(|m| fock.gauge_annihilator(m)).collect();

    let mut columns: Vec<CVec> = Vec::new();
    let mut degree_offsets = vec![0usize];
    for n in 0..=fock.n_max() {
        if n == 0 {
            // No constraint at degree 0: the vacuum is always physical.
            columns.push(fock.vacuum_vector());
            degree_offsets.push(columns.len());
            continue;
        }
        let cols = fock.degree_range(n);
        let rows = fock.degree_range(n - 1);
        let mut stacked = CMat::zeros(n_modes * rows.len(), cols.len());
        for (mi, ann) in annihilators.iter().enumerate() {
            let block = ann
                .matrix
                .view((rows.start, cols.start), (rows.len(), cols.len()));
            stacked
                .view_mut((mi * rows.len(), 0), (rows.len(), cols.len()))
                .copy_from(&block);
        }
        let kernel = null_space(&stacked, tol.null);
        for j in 0..kernel.ncols() {
            let mut full = CVec::zeros(fock.dim());
            for (local, global) in cols.clone().enumerate() {
                full[global] = kernel[(local, j)];
            }
            columns.push(full);
        }
        degree_offsets.push(columns.len());
    }
    if columns.is_empty() {
        return Err(Error::EmptySubspace);
    }
    let basis = CMat::from_columns(&columns);

    // Restricted gram; eta is diagonal and occupation-preserving, so this is
    // block diagonal over the degree grading.
    let eta = fock.eta_matrix();
    let gram = hermitize(&(basis.adjoint() * &eta * &basis));

    // Null vectors per degree block.
    let mut null_cols: Vec<CVec> = Vec::new();
    let mut null_degree_offsets = vec![0usize];
    for n in 0..=fock.n_max() {
        let lo = degree_offsets[n];
        let len = degree_offsets[n + 1] - lo;
        if len > 0 {
            let block = gram.view((lo, lo), (len, len)).clone_owned();
            let eig = herm_eigen(&block);
            for (i, v) in eig.values.iter().enumerate() {
                if v.abs() <= tol.null {
                    let local = eig.vectors.column(i).clone_owned();
                    let full = basis.columns(lo, len) * local;
                    null_cols.push(full);
                }
            }
        }
        null_degree_offsets.push(null_cols.len());
    }
    let null_basis = if null_cols.is_empty() {
        CMat::zeros(fock.dim(), 0)
    } else {
        CMat::from_columns(&null_cols)
    };

    Ok(PhysicalSubspace {
        basis,
        degree_offsets,
        gram,
        null_basis,
        null_degree_offsets,
    })
}

/// Physical Hilbert data after quotienting the null vectors of H'.
#[derive(Debug)]
pub struct PhysicalQuotient {
    /// Quotient dimension per occupation degree.
    pub per_degree: Vec<usize>,
    pub total: usize,
    /// Spectrum of the restricted gram per degree (diagnostic).
    pub gram_spectra: Vec<Vec<f64>>,
}

/// Quotient the restricted gram degree by degree. Fails with
/// [`Error::NotPositiveSemidefinite`] when the subsidiary condition is
/// violated (eigenvalue below -tol.null).
pub fn physical_quotient(ps: &PhysicalSubspace, tol: &Tolerances) -> Result<PhysicalQuotient> {
    let mut per_degree = Vec::new();
    let mut gram_spectra = Vec::new();
    for n in 0..=ps.max_degree() {
        let lo = ps.degree_offsets[n];
        let len = ps.degree_offsets[n + 1] - lo;
        let block = ps.gram.view((lo, lo), (len, len)).clone_owned();
        let quotient = krein::quotient_psd(&block, tol.null)?;
        gram_spectra.push(crate::linalg::herm_eigenvalues(&block));
        per_degree.push(quotient.dim());
    }
    Ok(PhysicalQuotient {
        total: per_degree.iter().sum(),
        per_degree,
        gram_spectra,
    })
}

/// Residuals of the observable-preservation conditions for one operator.
#[derive(Debug, Clone, Copy)]
pub struct PreservationReport {
    /// Component of op H' outside H' (inputs capped at occupation n_max - 1).
    pub subspace_residual: f64,
    /// Component of op H'' outside H'' (same cap).
    pub null_residual: f64,
}

impl PreservationReport {
    pub fn passes(&self, tol_obs: f64) -> bool {
        self.subspace_residual <= tol_obs && self.null_residual <= tol_obs
    }
}

/// Measure how far `op` is from mapping H' to H' and H'' to H''. Residuals
/// are operator norms with respect to the auxiliary (Euclidean) product.
pub fn observable_preservation(
    fock: &FockSpace,
    op: &FieldOperator,
    ps: &PhysicalSubspace,
) -> PreservationReport {
    let cap = fock.n_max().saturating_sub(1);
    let v = ps.basis();
    let v_low = ps.basis_up_to(cap);
    let image = &op.matrix * &v_low;
    let outside = &image - v * (v.adjoint() * &image);
    let subspace_residual = op_norm(&outside);

    let null_residual = if ps.null_dim() == 0 {
        0.0
    } else {
        let n = ps.null_basis();
        let n_low = ps.null_basis_up_to(cap);
        if n_low.ncols() == 0 {
            0.0
        } else {
            let image = &op.matrix * &n_low;
            let outside = &image - n * (n.adjoint() * &image);
            op_norm(&outside)
        }
    };
    PreservationReport {
        subspace_residual,
        null_residual,
    }
}

/// Weak Maxwell residuals on H'.
#[derive(Debug, Clone, Copy)]
pub struct WeakMaxwellReport {
    /// max |<Psi, (d^nu F_{nu mu}(f) - j_mu(f)) Phi>| over physical pairs.
    pub residual: f64,
    /// max |<Psi, B(f) Phi>| over the same pairs, the mechanism behind the
    /// weak Maxwell equations.
    pub mechanism_residual: f64,
}

/// Assemble the smeared Maxwell divergence G_mu(f) = sum_nu d^nu F_{nu mu}(f)
/// through the field-strength route: G_mu(f) = -sum_nu F_{nu mu}(d^nu f).
pub fn maxwell_divergence(fock: &FockSpace, mu: usize, f: &TestFunction) -> Result<FieldOperator> {
    let lattice = fock.lattice();
    let mut total = CMat::zeros(fock.dim(), fock.dim());
    for nu in 0..4 {
        let t = f.derivative_upper(lattice, nu);
        let op = fock.field_f(nu, mu, &t)?;
        total -= &op.matrix;
    }
    Ok(FieldOperator {
        matrix: total,
        label: format!("dF_{mu}(f)"),
    })
}

/// Evaluate the weak Maxwell condition on H'. The optional `current` is the
/// interacting seam; it defaults to zero (free theory).
pub fn weak_maxwell(
    fock: &FockSpace,
    ps: &PhysicalSubspace,
    mu: usize,
    f: &TestFunction,
    current: Option<&FieldOperator>,
) -> Result<WeakMaxwellReport> {
    let cap = fock.n_max().saturating_sub(1);
    let bra = ps.basis();
    let ket = ps.basis_up_to(cap);
    let residual = max_pair_element(fock, bra, &ket, &assemble_weak_operator(fock, mu, f, current)?);
    let (b, _, _) = fock.field_b(f)?;
    let mechanism_residual = max_pair_element(fock, bra, &ket, &b.matrix);
    Ok(WeakMaxwellReport {
        residual,
        mechanism_residual,
    })
}

fn assemble_weak_operator(
    fock: &FockSpace,
    mu: usize,
    f: &TestFunction,
    current: Option<&FieldOperator>,
) -> Result<CMat> {
    let mut g = maxwell_divergence(fock, mu, f)?.matrix;
    if let Some(j) = current {
        g -= &j.matrix;
    }
    Ok(g)
}

/// Weak Maxwell residual over an arbitrary span of vectors (columns);
/// used for the off-H' contrast cases.
pub fn weak_maxwell_on_span(
    fock: &FockSpace,
    span: &CMat,
    mu: usize,
    f: &TestFunction,
    current: Option<&FieldOperator>,
) -> Result<f64> {
    let g = assemble_weak_operator(fock, mu, f, current)?;
    Ok(max_pair_element(fock, span, span, &g))
}

/// max |<bra_i, op ket_j>| with the indefinite inner product.
fn max_pair_element(fock: &FockSpace, bra: &CMat, ket: &CMat, op: &CMat) -> f64 {
    let eta = fock.eta_matrix();
    let reduced = bra.adjoint() * eta * op * ket;
    crate::linalg::max_abs_entry(&reduced)
}

/// Norm of the commutator [x, y] restricted to input columns with occupation
/// <= n_max - 1, where the truncated canonical relations are exact.
pub fn commutator_norm_below_cap(fock: &FockSpace, x: &CMat, y: &CMat) -> f64 {
    let comm = x * y - y * x;
    let low_end = fock.degree_range(fock.n_max().saturating_sub(1)).end;
    op_norm(&comm.columns(0, low_end).clone_owned())
}

/// max over index pairs mu < nu of |[B(f), F_{mu nu}(g)]| below the cap.
pub fn b_f_commutator(fock: &FockSpace, f: &TestFunction, g: &TestFunction) -> Result<f64> {
    let (b, _, _) = fock.field_b(f)?;
    let mut worst = 0.0f64;
    for mu in 0..4 {
        for nu in (mu + 1)..4 {
            let strength = fock.field_f(mu, nu, g)?;
            worst = worst.max(commutator_norm_below_cap(fock, &b.matrix, &strength.matrix));
        }
    }
    Ok(worst)
}

/// Span of repeated applications of the field tensor to the vacuum,
/// orthonormalized. The physical space is generated by the field strength,
/// so this span stays inside H' and its growth saturates at the quotient
/// dimension. Returns the dimension found per application round.
pub fn field_tensor_span_growth(
    fock: &FockSpace,
    f: &TestFunction,
    rounds: usize,
    tol: &Tolerances,
) -> Result<Vec<usize>> {
    let mut strengths = Vec::new();
    for mu in 0..4 {
        for nu in (mu + 1)..4 {
            strengths.push(fock.field_f(mu, nu, f)?.matrix);
        }
    }
    let mut span: Vec<CVec> = vec![fock.vacuum_vector()];
    let mut dims = vec![1usize];
    for _ in 0..rounds {
        let mut frontier: Vec<CVec> = Vec::new();
        for v in &span {
            for m in &strengths {
                frontier.push(m * v);
            }
        }
        for w in frontier {
            let mut r = w;
            for u in &span {
                let coeff = u.dotc(&r);
                r -= u * coeff;
            }
            let norm = r.norm();
            if norm > tol.null.sqrt() {
                span.push(r * cr(1.0 / norm));
            }
        }
        dims.push(span.len());
    }
    Ok(dims)
}

/// Convenience wrapper used by tests and the CLI: a vector `c_mu a‡_mu(k) Omega`.
pub fn one_particle_vector(fock: &FockSpace, mode: usize, coeffs: [Complex64; 4]) -> CVec {
    let mut v = CVec::zeros(fock.dim());
    for mu in 0..4 {
        if coeffs[mu].norm_sqr() > 0.0 {
            let idx = fock
                .state_index(&[fock.slot(mode, mu) as u16])
                .expect("one-particle state in basis");
            // a‡_mu = sign * b†_mu with sign = -1 for mu = 0.
            let sign = if mu == 0 { -1.0 } else { 1.0 };
            v[idx] += coeffs[mu] * cr(sign);
        }
    }
    v
}
