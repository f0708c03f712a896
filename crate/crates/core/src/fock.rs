//! Mode-truncated bosonic Fock space for the four-component vector potential.
//!
//! Each lattice mode `k` carries four slots (Lorentz index mu = 0..3). The
//! auxiliary ladder pair `b, b†` obeys the standard positive commutation
//! relations below the occupation cap; the covariant pair is
//! `a_mu(k) = b_{mu k}` and `a‡_mu(k) = eta b†_{mu k} eta`, which realizes
//! `[a_mu(k), a‡_nu(k')] = -g_{mu nu} delta_{k k'}` on states with total
//! occupation <= n_max - 1. The Krein structure is the diagonal
//! `eta = (-1)^{N_0}` counting occupation of the mu = 0 slots.
//!
//! Smearing convention: a [`TestFunction`] stores the positive-frequency
//! (creation-side) on-shell amplitude `f_hat(k)`; the smeared potential is
//! `A_mu(f) = sum_k [conj(f_hat) a_mu(k) + f_hat a‡_mu(k)] / sqrt(2 omega L^3)`,
//! which is Krein-Hermitian for any amplitudes and reproduces
//! `<Omega, A_mu(f) A_nu(g) Omega> = -g_{mu nu} sum_k conj(f_hat) g_hat / (2 omega L^3)`.
//!
//! All operator identities are asserted only on inputs with total occupation
//! <= n_max - 1; the cap level absorbs truncation artifacts.

use crate::borchers::{AlgebraBasis, WightmanFunctional};
use crate::error::{Error, Result};
use crate::linalg::{c64, cr, CMat, CVec, IM};
use crate::par::{self, Execution};
use num_complex::Complex64;
use std::collections::HashMap;
use std::f64::consts::PI;

/// Number of Lorentz components per mode.
pub const COMPONENTS: usize = 4;

/// Finite momentum lattice: modes k in (2 pi / L) Z^3 with the zero mode
/// excluded and omega(k) = |k| (massless shell).
#[derive(Debug, Clone)]
pub struct MomentumLattice {
    box_length: f64,
    modes: Vec<[i32; 3]>,
}

impl MomentumLattice {
    /// All nonzero integer modes with max |n_i| <= k_max. Closed under
    /// k -> -k by construction.
    pub fn cubic(box_length: f64, k_max: i32) -> Self {
        assert!(box_length > 0.0 && k_max >= 1);
        let mut modes = Vec::new();
        for nx in -k_max..=k_max {
            for ny in -k_max..=k_max {
                for nz in -k_max..=k_max {
                    if (nx, ny, nz) != (0, 0, 0) {
                        modes.push([nx, ny, nz]);
                    }
                }
            }
        }
        Self { box_length, modes }
    }

    /// Explicit mode list; every mode must be nonzero (massless shell keeps
    /// omega > 0). Reflection closure is the caller's choice here; check it
    /// with [`Self::is_reflection_closed`] when commutator functions need it.
    pub fn from_modes(box_length: f64, modes: Vec<[i32; 3]>) -> Result<Self> {
        assert!(box_length > 0.0);
        if modes.iter().any(|m| *m == [0, 0, 0]) {
            return Err(Error::ModeMismatch {
                expected: 1,
                found: 0,
            });
        }
        Ok(Self { box_length, modes })
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    pub fn volume(&self) -> f64 {
        self.box_length.powi(3)
    }

    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn modes(&self) -> &[[i32; 3]] {
        &self.modes
    }

    pub fn k_step(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    pub fn k_vec(&self, m: usize) -> [f64; 3] {
        let s = self.k_step();
        let n = self.modes[m];
        [s * n[0] as f64, s * n[1] as f64, s * n[2] as f64]
    }

    pub fn omega(&self, m: usize) -> f64 {
        let k = self.k_vec(m);
        (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt()
    }

    /// On-shell four-momentum with upper index: (omega, k).
    pub fn k_upper(&self, m: usize) -> [f64; 4] {
        let k = self.k_vec(m);
        [self.omega(m), k[0], k[1], k[2]]
    }

    /// On-shell four-momentum with lower index: (omega, -k).
    pub fn k_lower(&self, m: usize) -> [f64; 4] {
        let k = self.k_vec(m);
        [self.omega(m), -k[0], -k[1], -k[2]]
    }

    pub fn mode_index(&self, n: &[i32; 3]) -> Option<usize> {
        self.modes.iter().position(|m| m == n)
    }

    pub fn is_reflection_closed(&self) -> bool {
        self.modes
            .iter()
            .all(|m| self.mode_index(&[-m[0], -m[1], -m[2]]).is_some())
    }
}

/// Gaussian profile in position space, optionally cosine-modulated with a
/// momentum-ring wave vector so the on-shell amplitude is suppressed near
/// zero momentum.
#[derive(Debug, Clone)]
pub struct GaussianSpec {
    /// Center x in R^4, (t, x, y, z).
    pub center: [f64; 4],
    /// Common width sigma of the four position-space Gaussian factors.
    pub width: f64,
    /// Real per-component coefficients.
    pub components: [f64; 4],
    /// Cosine modulation wave vector; None for a plain Gaussian.
    pub momentum_ring: Option<[f64; 3]>,
}

impl GaussianSpec {
    pub fn plain(center: [f64; 4], width: f64, components: [f64; 4]) -> Self {
        Self {
            center,
            width,
            components,
            momentum_ring: None,
        }
    }

    /// Positive-frequency amplitude f_hat(p) = int f(x) exp(i p.x) d4x
    /// (Minkowski phase p.x = p0 t - p.x), evaluated at arbitrary (p0, p);
    /// off-shell values are needed by the mass-deformed kernels.
    pub fn amplitude(&self, p0: f64, p: [f64; 3]) -> Complex64 {
        let s2 = self.width * self.width;
        let norm = (2.0 * PI * s2).powi(2);
        let phase = p0 * self.center[0] - p[0] * self.center[1] - p[1] * self.center[2]
            - p[2] * self.center[3];
        let osc = c64(phase.cos(), phase.sin());
        let envelope = match self.momentum_ring {
            None => {
                let q2 = p0 * p0 + p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
                (-0.5 * s2 * q2).exp()
            }
            Some(ring) => {
                let d_minus = (p[0] - ring[0]).powi(2)
                    + (p[1] - ring[1]).powi(2)
                    + (p[2] - ring[2]).powi(2);
                let d_plus = (p[0] + ring[0]).powi(2)
                    + (p[1] + ring[1]).powi(2)
                    + (p[2] + ring[2]).powi(2);
                0.5 * ((-0.5 * s2 * (p0 * p0 + d_minus)).exp()
                    + (-0.5 * s2 * (p0 * p0 + d_plus)).exp())
            }
        };
        osc * cr(norm * envelope)
    }
}

/// Momentum-space test function: per-mode scalar profile amplitudes, real
/// per-component coefficients promoted to complex, and the generating
/// Gaussian metadata when there is one.
#[derive(Debug, Clone)]
pub struct TestFunction {
    profile: Vec<Complex64>,
    components: [Complex64; 4],
    real_profile: bool,
    gaussian: Option<GaussianSpec>,
}

impl TestFunction {
    /// Sample a Gaussian profile on the lattice modes.
    pub fn gaussian(lattice: &MomentumLattice, spec: GaussianSpec) -> Self {
        let profile = (0..lattice.n_modes())
            .map(|m| spec.amplitude(lattice.omega(m), lattice.k_vec(m)))
            .collect();
        let components = spec.components.map(cr);
        Self {
            profile,
            components,
            real_profile: true,
            gaussian: Some(spec),
        }
    }

    /// Raw per-mode profile amplitudes. `real_profile` asserts that the
    /// amplitudes came from a real position-space profile; the conjugate
    /// pairing in the field operators is the generator's responsibility.
    pub fn from_profile(
        profile: Vec<Complex64>,
        components: [Complex64; 4],
        real_profile: bool,
    ) -> Self {
        Self {
            profile,
            components,
            real_profile,
            gaussian: None,
        }
    }

    /// Closed-form-only test function: no lattice samples, just the Gaussian
    /// metadata. Usable by the quadrature kernels; Fock smearing reports a
    /// mode mismatch.
    pub fn from_spec_only(spec: GaussianSpec) -> Self {
        let components = spec.components.map(cr);
        Self {
            profile: Vec::new(),
            components,
            real_profile: true,
            gaussian: Some(spec),
        }
    }

    /// Unit amplitude concentrated on a single mode.
    pub fn single_mode(lattice: &MomentumLattice, mode: usize, components: [Complex64; 4]) -> Self {
        let mut profile = vec![c64(0.0, 0.0); lattice.n_modes()];
        profile[mode] = cr(1.0);
        Self {
            profile,
            components,
            real_profile: true,
            gaussian: None,
        }
    }

    pub fn n_modes(&self) -> usize {
        self.profile.len()
    }

    pub fn is_real_profile(&self) -> bool {
        self.real_profile
    }

    pub fn gaussian_spec(&self) -> Option<&GaussianSpec> {
        self.gaussian.as_ref()
    }

    pub fn component(&self, mu: usize) -> Complex64 {
        self.components[mu]
    }

    pub fn profile(&self, mode: usize) -> Complex64 {
        self.profile[mode]
    }

    /// Amplitude of component mu at a mode.
    pub fn amp(&self, mode: usize, mu: usize) -> Complex64 {
        self.components[mu] * self.profile[mode]
    }

    /// Multiply the profile by -i k^nu (upper index, on-shell): the
    /// amplitude of the derivative d^nu f. Drops the Gaussian metadata and
    /// the reality flag.
    pub fn derivative_upper(&self, lattice: &MomentumLattice, nu: usize) -> TestFunction {
        let profile = (0..lattice.n_modes())
            .map(|m| {
                let k_up = lattice.k_upper(m);
                -IM * cr(k_up[nu]) * self.profile[m]
            })
            .collect();
        Self {
            profile,
            components: self.components,
            real_profile: false,
            gaussian: None,
        }
    }

    /// Phase-shift amplitudes by exp(i k.a): the translate f(x - a).
    pub fn translated(&self, lattice: &MomentumLattice, a: [f64; 4]) -> TestFunction {
        let profile = (0..lattice.n_modes())
            .map(|m| {
                let k = lattice.k_upper(m);
                let phase = k[0] * a[0] - k[1] * a[1] - k[2] * a[2] - k[3] * a[3];
                c64(phase.cos(), phase.sin()) * self.profile[m]
            })
            .collect();
        let gaussian = self.gaussian.as_ref().map(|g| {
            let mut spec = g.clone();
            for i in 0..4 {
                spec.center[i] += a[i];
            }
            spec
        });
        Self {
            profile,
            components: self.components,
            real_profile: self.real_profile,
            gaussian,
        }
    }
}

/// Dense operator on the Fock basis together with a symbolic tag.
#[derive(Debug, Clone)]
pub struct FieldOperator {
    pub matrix: CMat,
    pub label: String,
}

impl FieldOperator {
    pub fn apply(&self, v: &CVec) -> CVec {
        &self.matrix * v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderKind {
    Annihilate,
    Create,
}

/// Occupation-number basis over (mode, Lorentz component) slots with total
/// particle number <= n_max, graded by total occupation.
#[derive(Debug)]
pub struct FockSpace {
    lattice: MomentumLattice,
    n_max: usize,
    /// Sorted slot multisets, graded lexicographic.
    basis: Vec<Vec<u16>>,
    index: HashMap<Vec<u16>, usize>,
    /// degree_offsets[n]..degree_offsets[n+1] are the occupation-n states.
    degree_offsets: Vec<usize>,
    eta_diag: Vec<f64>,
    execution: Execution,
}

fn count_multisets(slots: usize, n: usize) -> usize {
    // C(slots + n - 1, n), small arguments only.
    let mut num = 1usize;
    let mut den = 1usize;
    for i in 0..n {
        num *= slots + i;
        den *= i + 1;
    }
    num / den
}

fn enumerate_multisets(slots: usize, n: usize, out: &mut Vec<Vec<u16>>) {
    fn rec(slots: usize, remaining: usize, start: u16, prefix: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if remaining == 0 {
            out.push(prefix.clone());
            return;
        }
        for s in start..slots as u16 {
            prefix.push(s);
            rec(slots, remaining - 1, s, prefix, out);
            prefix.pop();
        }
    }
    let mut prefix = Vec::with_capacity(n);
    rec(slots, n, 0, &mut prefix, out);
}

/// Enumerate the truncated Fock basis. Fails with [`Error::DimensionOverflow`]
/// when the basis would exceed `dim_limit` (default limit used by the CLI is
/// 20 000).
pub fn build_fock(lattice: MomentumLattice, n_max: usize, dim_limit: usize) -> Result<FockSpace> {
    assert!(n_max >= 1, "need at least one particle level");
    let slots = COMPONENTS * lattice.n_modes();
    let dim: usize = (0..=n_max).map(|n| count_multisets(slots, n)).sum();
    if dim > dim_limit {
        return Err(Error::DimensionOverflow {
            dim,
            limit: dim_limit,
        });
    }
    let mut basis = Vec::with_capacity(dim);
    let mut degree_offsets = Vec::with_capacity(n_max + 2);
    for n in 0..=n_max {
        degree_offsets.push(basis.len());
        enumerate_multisets(slots, n, &mut basis);
    }
    degree_offsets.push(basis.len());
    let index: HashMap<Vec<u16>, usize> = basis
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i))
        .collect();
    let eta_diag: Vec<f64> = basis
        .iter()
        .map(|state| {
            let n0 = state.iter().filter(|&&s| s as usize % COMPONENTS == 0).count();
            if n0 % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        })
        .collect();
    Ok(FockSpace {
        lattice,
        n_max,
        basis,
        index,
        degree_offsets,
        eta_diag,
        execution: Execution::default(),
    })
}

impl FockSpace {
    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn lattice(&self) -> &MomentumLattice {
        &self.lattice
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn n_slots(&self) -> usize {
        COMPONENTS * self.lattice.n_modes()
    }

    pub fn slot(&self, mode: usize, mu: usize) -> usize {
        COMPONENTS * mode + mu
    }

    pub fn vacuum_index(&self) -> usize {
        0
    }

    pub fn vacuum_vector(&self) -> CVec {
        let mut v = CVec::zeros(self.dim());
        v[0] = cr(1.0);
        v
    }

    pub fn occupation(&self, idx: usize) -> usize {
        self.basis[idx].len()
    }

    /// Index range of the occupation-n states (contiguous by construction).
    pub fn degree_range(&self, n: usize) -> std::ops::Range<usize> {
        self.degree_offsets[n]..self.degree_offsets[n + 1]
    }

    pub fn state(&self, idx: usize) -> &[u16] {
        &self.basis[idx]
    }

    pub fn state_index(&self, state: &[u16]) -> Option<usize> {
        self.index.get(state).copied()
    }

    pub fn eta_diag(&self) -> &[f64] {
        &self.eta_diag
    }

    pub fn eta_matrix(&self) -> CMat {
        crate::linalg::real_diag(&self.eta_diag)
    }

    /// Indefinite inner product <x, y> = x† eta y.
    pub fn inner(&self, x: &CVec, y: &CVec) -> Complex64 {
        let mut acc = c64(0.0, 0.0);
        for i in 0..self.dim() {
            acc += x[i].conj() * cr(self.eta_diag[i]) * y[i];
        }
        acc
    }

    /// Krein adjoint of a matrix: eta M† eta.
    pub fn krein_adjoint(&self, m: &CMat) -> CMat {
        let mut out = m.adjoint();
        for i in 0..out.nrows() {
            for j in 0..out.ncols() {
                out[(i, j)] *= cr(self.eta_diag[i] * self.eta_diag[j]);
            }
        }
        out
    }

    /// Largest entry of op - op‡; zero for Krein-Hermitian operators.
    pub fn krein_hermiticity_deviation(&self, op: &FieldOperator) -> f64 {
        crate::linalg::max_abs_entry(&(&op.matrix - self.krein_adjoint(&op.matrix)))
    }

    fn multiplicity(state: &[u16], slot: u16) -> usize {
        state.iter().filter(|&&s| s == slot).count()
    }

    fn state_minus(state: &[u16], slot: u16) -> Vec<u16> {
        let mut out = Vec::with_capacity(state.len() - 1);
        let mut removed = false;
        for &s in state {
            if s == slot && !removed {
                removed = true;
            } else {
                out.push(s);
            }
        }
        out
    }

    fn state_plus(state: &[u16], slot: u16) -> Vec<u16> {
        let mut out = Vec::with_capacity(state.len() + 1);
        let pos = state.partition_point(|&s| s <= slot);
        out.extend_from_slice(&state[..pos]);
        out.push(slot);
        out.extend_from_slice(&state[pos..]);
        out
    }

    /// Action of `sum_s alpha[s] a_s + beta[s] a‡_s` on one basis state,
    /// as (row, coefficient) pairs. The covariant creation operator carries
    /// the eta-conjugation sign: a‡ on a mu = 0 slot is -b†.
    fn one_quantum_entries(
        &self,
        col: usize,
        alpha: &[Complex64],
        beta: &[Complex64],
        beta_support: &[usize],
    ) -> Vec<(usize, Complex64)> {
        let state = &self.basis[col];
        let mut entries = Vec::new();
        // Annihilation over distinct occupied slots.
        let mut seen = 0u16;
        let mut first = true;
        for &s in state.iter() {
            if !first && s == seen {
                continue;
            }
            first = false;
            seen = s;
            let a = alpha[s as usize];
            if a.norm_sqr() > 0.0 {
                let mult = Self::multiplicity(state, s);
                let row = self.index[&Self::state_minus(state, s)];
                entries.push((row, a * cr((mult as f64).sqrt())));
            }
        }
        // Creation, capped at n_max.
        if state.len() < self.n_max {
            for &su in beta_support {
                let b = beta[su];
                let slot = su as u16;
                let mult = Self::multiplicity(state, slot);
                let row = self.index[&Self::state_plus(state, slot)];
                let sign = if su % COMPONENTS == 0 { -1.0 } else { 1.0 };
                entries.push((row, b * cr(sign * ((mult + 1) as f64).sqrt())));
            }
        }
        entries
    }

    /// Dense operator `sum_s alpha[s] a_s + beta[s] a‡_s`, assembled column
    /// by column (columns are independent; this is the data-parallel loop).
    fn one_quantum_operator(&self, label: String, alpha: &[Complex64], beta: &[Complex64]) -> FieldOperator {
        let beta_support: Vec<usize> = (0..self.n_slots())
            .filter(|&s| beta[s].norm_sqr() > 0.0)
            .collect();
        let dim = self.dim();
        let cols: Vec<CVec> = par::run(self.execution, dim, |col| {
            let mut column = CVec::zeros(dim);
            for (row, val) in self.one_quantum_entries(col, alpha, beta, &beta_support) {
                column[row] += val;
            }
            column
        });
        FieldOperator {
            matrix: CMat::from_columns(&cols),
            label,
        }
    }

    /// Apply `sum_s alpha[s] a_s + beta[s] a‡_s` to a vector without
    /// materializing the matrix.
    pub fn apply_one_quantum(&self, alpha: &[Complex64], beta: &[Complex64], v: &CVec) -> CVec {
        let beta_support: Vec<usize> = (0..self.n_slots())
            .filter(|&s| beta[s].norm_sqr() > 0.0)
            .collect();
        let mut out = CVec::zeros(self.dim());
        for col in 0..self.dim() {
            if v[col].norm_sqr() == 0.0 {
                continue;
            }
            for (row, val) in self.one_quantum_entries(col, alpha, beta, &beta_support) {
                out[row] += val * v[col];
            }
        }
        out
    }

    /// Covariant ladder operator for one (mode, component) slot.
    pub fn ladder(&self, mode: usize, mu: usize, kind: LadderKind) -> FieldOperator {
        let mut alpha = vec![c64(0.0, 0.0); self.n_slots()];
        let mut beta = vec![c64(0.0, 0.0); self.n_slots()];
        let s = self.slot(mode, mu);
        let label = match kind {
            LadderKind::Annihilate => {
                alpha[s] = cr(1.0);
                format!("a_{mu}(k{mode})")
            }
            LadderKind::Create => {
                beta[s] = cr(1.0);
                format!("a+_{mu}(k{mode})")
            }
        };
        self.one_quantum_operator(label, &alpha, &beta)
    }

    fn mode_norm(&self, m: usize) -> f64 {
        1.0 / (2.0 * self.lattice.omega(m) * self.lattice.volume()).sqrt()
    }

    fn check_modes(&self, f: &TestFunction) -> Result<()> {
        if f.n_modes() != self.lattice.n_modes() {
            return Err(Error::ModeMismatch {
                expected: self.lattice.n_modes(),
                found: f.n_modes(),
            });
        }
        Ok(())
    }

    /// Ladder coefficients of the smeared potential A_mu(f).
    fn field_a_coeffs(&self, mu: usize, f: &TestFunction) -> (Vec<Complex64>, Vec<Complex64>) {
        let mut alpha = vec![c64(0.0, 0.0); self.n_slots()];
        let mut beta = vec![c64(0.0, 0.0); self.n_slots()];
        for m in 0..self.lattice.n_modes() {
            let c = cr(self.mode_norm(m));
            let amp = f.amp(m, mu);
            alpha[self.slot(m, mu)] = amp.conj() * c;
            beta[self.slot(m, mu)] = amp * c;
        }
        (alpha, beta)
    }

    /// Smeared vector potential A_mu(f).
    pub fn field_a(&self, mu: usize, f: &TestFunction) -> Result<FieldOperator> {
        self.check_modes(f)?;
        let (alpha, beta) = self.field_a_coeffs(mu, f);
        Ok(self.one_quantum_operator(format!("A_{mu}(f)"), &alpha, &beta))
    }

    /// Smeared field strength F_{mu nu}(f) = (d_nu A_mu - d_mu A_nu)(f),
    /// derivatives as on-shell momentum multiplications. Uses the scalar
    /// profile of `f` (tensor components come from the indices).
    pub fn field_f(&self, mu: usize, nu: usize, f: &TestFunction) -> Result<FieldOperator> {
        self.check_modes(f)?;
        let mut alpha = vec![c64(0.0, 0.0); self.n_slots()];
        let mut beta = vec![c64(0.0, 0.0); self.n_slots()];
        for m in 0..self.lattice.n_modes() {
            let c = cr(self.mode_norm(m));
            let k_low = self.lattice.k_lower(m);
            let p = f.profile(m);
            // Annihilation part: conj(f_hat) (-i)(k_nu a_mu - k_mu a_nu).
            alpha[self.slot(m, mu)] += p.conj() * (-IM) * cr(k_low[nu]) * c;
            alpha[self.slot(m, nu)] += p.conj() * IM * cr(k_low[mu]) * c;
            // Creation part: f_hat (+i)(k_nu a‡_mu - k_mu a‡_nu).
            beta[self.slot(m, mu)] += p * IM * cr(k_low[nu]) * c;
            beta[self.slot(m, nu)] += p * (-IM) * cr(k_low[mu]) * c;
        }
        Ok(self.one_quantum_operator(format!("F_{mu}{nu}(f)"), &alpha, &beta))
    }

    /// Gauge-fixing field B(f) = (d_mu A^mu)(f) and its frequency parts:
    /// returns (B, B+, B-) with B = B+ + B- and B- = (B+)‡.
    ///
    /// The free wave equation for B holds structurally rather than as a
    /// test: every amplitude lives on the massless shell (omega = |k|), so
    /// off-shell content has no representation on this lattice at all.
    pub fn field_b(&self, f: &TestFunction) -> Result<(FieldOperator, FieldOperator, FieldOperator)> {
        self.check_modes(f)?;
        let mut alpha = vec![c64(0.0, 0.0); self.n_slots()];
        let mut beta = vec![c64(0.0, 0.0); self.n_slots()];
        for m in 0..self.lattice.n_modes() {
            let c = cr(self.mode_norm(m));
            let k_up = self.lattice.k_upper(m);
            let p = f.profile(m);
            for nu in 0..COMPONENTS {
                // B+ annihilation coefficients: conj(f_hat) (-i) k^nu a_nu.
                alpha[self.slot(m, nu)] += p.conj() * (-IM) * cr(k_up[nu]) * c;
                // B- = (B+)‡ creation coefficients: f_hat (+i) k^nu a‡_nu.
                beta[self.slot(m, nu)] += p * IM * cr(k_up[nu]) * c;
            }
        }
        let zeros = vec![c64(0.0, 0.0); self.n_slots()];
        let b_plus = self.one_quantum_operator("B+(f)".into(), &alpha, &zeros);
        let b_minus = self.one_quantum_operator("B-(f)".into(), &zeros, &beta);
        let b = FieldOperator {
            matrix: &b_plus.matrix + &b_minus.matrix,
            label: "B(f)".into(),
        };
        Ok((b, b_plus, b_minus))
    }

    /// Unnormalized single-mode annihilation combination k^mu a_mu(k) whose
    /// joint kernel over all modes is the physical subspace.
    pub fn gauge_annihilator(&self, mode: usize) -> FieldOperator {
        let mut alpha = vec![c64(0.0, 0.0); self.n_slots()];
        let beta = vec![c64(0.0, 0.0); self.n_slots()];
        let k_up = self.lattice.k_upper(mode);
        for nu in 0..COMPONENTS {
            alpha[self.slot(mode, nu)] = cr(k_up[nu]);
        }
        self.one_quantum_operator(format!("B+(k{mode})"), &alpha, &beta)
    }

    /// Four-momentum of a basis state (upper index), k0 = omega.
    pub fn momentum_of_state(&self, idx: usize) -> [f64; 4] {
        let mut p = [0.0f64; 4];
        for &s in &self.basis[idx] {
            let k_up = self.lattice.k_upper(s as usize / COMPONENTS);
            for i in 0..4 {
                p[i] += k_up[i];
            }
        }
        p
    }

    /// Diagonal momentum operator P^mu.
    pub fn momentum_operator(&self, mu: usize) -> FieldOperator {
        let diag: Vec<f64> = (0..self.dim())
            .map(|i| self.momentum_of_state(i)[mu])
            .collect();
        FieldOperator {
            matrix: crate::linalg::real_diag(&diag),
            label: format!("P^{mu}"),
        }
    }

    /// Spectral condition: every basis momentum lies in the closed forward
    /// cone, p.p >= -tol and p0 >= -tol.
    pub fn spectral_check(&self, tol: f64) -> bool {
        (0..self.dim()).all(|i| {
            let p = self.momentum_of_state(i);
            let p2 = p[0] * p[0] - p[1] * p[1] - p[2] * p[2] - p[3] * p[3];
            p2 >= -tol && p[0] >= -tol
        })
    }

    /// Diagonal translation unitary U(a) = exp(i a.P).
    pub fn translation(&self, a: [f64; 4]) -> FieldOperator {
        let dim = self.dim();
        let mut m = CMat::zeros(dim, dim);
        for i in 0..dim {
            let p = self.momentum_of_state(i);
            let phase = a[0] * p[0] - a[1] * p[1] - a[2] * p[2] - a[3] * p[3];
            m[(i, i)] = c64(phase.cos(), phase.sin());
        }
        FieldOperator {
            matrix: m,
            label: "U(a)".into(),
        }
    }

    /// Vacuum two-point value <Omega, A_mu(f) A_nu(g) Omega> computed by
    /// applying the smeared operators to the vacuum vector; equals the dense
    /// matrix route but stays cheap on refined lattices.
    pub fn vacuum_two_point(
        &self,
        mu: usize,
        nu: usize,
        f: &TestFunction,
        g: &TestFunction,
    ) -> Result<Complex64> {
        self.check_modes(f)?;
        self.check_modes(g)?;
        let (af, bf) = self.field_a_coeffs(mu, f);
        let (ag, bg) = self.field_a_coeffs(nu, g);
        let omega = self.vacuum_vector();
        let psi_g = self.apply_one_quantum(&ag, &bg, &omega);
        // <Omega, A_mu(f) psi> = <A_mu(f) Omega, psi> by Krein-Hermiticity.
        let psi_f = self.apply_one_quantum(&af, &bf, &omega);
        Ok(self.inner(&psi_f, &psi_g))
    }
}

/// Wightman data generated from Fock expectation values: letter j is the
/// smeared component operator A_{mu_j}(f_j), and
/// `W_n[i_1..i_n] = <Omega, Op_{i_1} .. Op_{i_n} Omega>`.
///
/// Letters are self-conjugate (the smeared potential is Krein-Hermitian), so
/// the star map is the identity. Truncation is exact for n <= 2 n_max.
pub fn fock_wightman(
    fock: &FockSpace,
    letters: &[(usize, TestFunction)],
    d_max: usize,
) -> Result<WightmanFunctional> {
    let b = letters.len();
    assert!(b >= 1);
    let ops: Vec<FieldOperator> = letters
        .iter()
        .map(|(mu, f)| fock.field_a(*mu, f))
        .collect::<Result<_>>()?;
    let basis = AlgebraBasis::real_letters(b, d_max);
    let mut blocks: Vec<Vec<Complex64>> = (0..=d_max)
        .map(|n| vec![c64(0.0, 0.0); b.pow(n as u32)])
        .collect();
    blocks[0][0] = cr(1.0);

    // Depth-first over prepended letters: the state after path (l_1 .. l_d)
    // is Op_{l_d} .. Op_{l_1} Omega, which is the word (l_d, .., l_1).
    struct Walker<'a> {
        ops: &'a [FieldOperator],
        b: usize,
        d_max: usize,
    }
    impl Walker<'_> {
        fn visit(&self, state: &CVec, path: &mut Vec<usize>, blocks: &mut [Vec<Complex64>]) {
            let depth = path.len();
            if depth > 0 {
                // Word = reversed path, big-endian flat index.
                let mut flat = 0usize;
                for &l in path.iter().rev() {
                    flat = flat * self.b + l;
                }
                blocks[depth][flat] = state[0];
            }
            if depth == self.d_max {
                return;
            }
            for l in 0..self.b {
                let next = self.ops[l].apply(state);
                path.push(l);
                self.visit(&next, path, blocks);
                path.pop();
            }
        }
    }
    let walker = Walker {
        ops: &ops,
        b,
        d_max,
    };
    // Parallel over the first letter, merged in letter order.
    let partials: Vec<Vec<Vec<Complex64>>> = par::run(fock.execution, b, |l| {
        let mut local: Vec<Vec<Complex64>> = (0..=d_max)
            .map(|n| vec![c64(0.0, 0.0); b.pow(n as u32)])
            .collect();
        let omega = fock.vacuum_vector();
        let first = ops[l].apply(&omega);
        let mut path = vec![l];
        walker.visit(&first, &mut path, &mut local);
        local
    });
    for local in partials {
        for (n, block) in local.into_iter().enumerate() {
            for (i, v) in block.into_iter().enumerate() {
                if v.norm_sqr() > 0.0 {
                    blocks[n][i] = v;
                }
            }
        }
    }
    WightmanFunctional::new(basis, blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_entry;
    use crate::METRIC_DIAG;

    fn single_mode_lattice() -> MomentumLattice {
        // One mode along z with omega = 1 (L = 2 pi).
        MomentumLattice::from_modes(2.0 * PI, vec![[0, 0, 1]]).unwrap()
    }

    fn unit_tf(lattice: &MomentumLattice) -> TestFunction {
        TestFunction::from_profile(
            vec![cr(1.0); lattice.n_modes()],
            [cr(1.0); 4],
            true,
        )
    }

    #[test]
    fn cubic_lattice_counts_and_closure() {
        let lat = MomentumLattice::cubic(2.0 * PI, 1);
        assert_eq!(lat.n_modes(), 26);
        assert!(lat.is_reflection_closed());
        assert!((0..lat.n_modes()).all(|m| lat.omega(m) > 0.0));
    }

    #[test]
    fn explicit_lattice_rejects_zero_mode() {
        assert!(MomentumLattice::from_modes(1.0, vec![[0, 0, 0]]).is_err());
        let lat = MomentumLattice::from_modes(1.0, vec![[0, 0, 1], [1, 1, 1]]).unwrap();
        assert!(!lat.is_reflection_closed());
    }

    #[test]
    fn fock_dimension_counting() {
        let lat = single_mode_lattice();
        let f1 = build_fock(lat.clone(), 1, 20_000).unwrap();
        assert_eq!(f1.dim(), 5); // vacuum + 4 polarizations

        let f2 = build_fock(lat.clone(), 2, 20_000).unwrap();
        assert_eq!(f2.dim(), 15); // 1 + 4 + 10 symmetric pairs

        let lat2 = MomentumLattice::from_modes(2.0 * PI, vec![[0, 0, 1], [0, 0, -1]]).unwrap();
        let f3 = build_fock(lat2, 1, 20_000).unwrap();
        assert_eq!(f3.dim(), 9); // 1 + 8

        // Oracle: multiset counting formula per degree.
        assert_eq!(count_multisets(4, 2), 10);
        assert_eq!(count_multisets(8, 1), 8);
    }

    #[test]
    fn fock_dimension_limit() {
        let lat = MomentumLattice::cubic(2.0 * PI, 1);
        assert!(matches!(
            build_fock(lat, 3, 100),
            Err(Error::DimensionOverflow { .. })
        ));
    }

    #[test]
    fn eta_squares_to_identity_and_vacuum_norm() {
        let fock = build_fock(single_mode_lattice(), 2, 20_000).unwrap();
        let eta = fock.eta_matrix();
        assert!(max_abs_entry(&(&eta * &eta - CMat::identity(fock.dim(), fock.dim()))) == 0.0);
        let omega = fock.vacuum_vector();
        assert_eq!(fock.inner(&omega, &omega), cr(1.0));
    }

    #[test]
    fn covariant_commutators_below_cap() {
        let fock = build_fock(single_mode_lattice(), 2, 20_000).unwrap();
        let low = fock.degree_range(0).end.max(fock.degree_range(1).end);
        for mu in 0..4 {
            let a = fock.ladder(0, mu, LadderKind::Annihilate);
            let ad = fock.ladder(0, mu, LadderKind::Create);
            let comm = &a.matrix * &ad.matrix - &ad.matrix * &a.matrix;
            let expected = -METRIC_DIAG[mu];
            // Restrict to columns with occupation <= n_max - 1.
            for col in 0..low {
                for row in 0..fock.dim() {
                    let want = if row == col { cr(expected) } else { c64(0.0, 0.0) };
                    assert!(
                        (comm[(row, col)] - want).norm() < 1e-12,
                        "mu={mu} row={row} col={col}"
                    );
                }
            }
        }
    }

    #[test]
    fn cross_slot_commutators_vanish() {
        let fock = build_fock(single_mode_lattice(), 2, 20_000).unwrap();
        let a1 = fock.ladder(0, 1, LadderKind::Annihilate);
        let ad2 = fock.ladder(0, 2, LadderKind::Create);
        let comm = &a1.matrix * &ad2.matrix - &ad2.matrix * &a1.matrix;
        let low = fock.degree_range(1).end;
        assert!(max_abs_entry(&comm.columns(0, low).clone_owned()) < 1e-12);
    }

    #[test]
    fn annihilators_kill_vacuum() {
        let fock = build_fock(single_mode_lattice(), 1, 20_000).unwrap();
        let omega = fock.vacuum_vector();
        for mu in 0..4 {
            let a = fock.ladder(0, mu, LadderKind::Annihilate);
            assert_eq!(a.apply(&omega).norm(), 0.0);
        }
    }

    #[test]
    fn one_mode_two_point_value() {
        let lat = single_mode_lattice();
        let fock = build_fock(lat.clone(), 1, 20_000).unwrap();
        let f = unit_tf(&lat);
        let norm = 2.0 * lat.omega(0) * lat.volume();
        for mu in 0..4 {
            for nu in 0..4 {
                let val = fock.vacuum_two_point(mu, nu, &f, &f).unwrap();
                let expected = if mu == nu {
                    cr(-METRIC_DIAG[mu] / norm)
                } else {
                    c64(0.0, 0.0)
                };
                assert!((val - expected).norm() < 1e-14, "mu={mu} nu={nu}");
            }
        }
    }

    #[test]
    fn vacuum_two_point_matches_dense_route() {
        let lat = MomentumLattice::from_modes(4.0, vec![[0, 0, 1], [1, 0, -1], [0, 2, 0]]).unwrap();
        let fock = build_fock(lat.clone(), 2, 20_000).unwrap();
        let f = TestFunction::gaussian(
            &lat,
            GaussianSpec::plain([0.1, 0.0, -0.2, 0.3], 0.8, [1.0, 0.5, -0.25, 2.0]),
        );
        let g = TestFunction::gaussian(
            &lat,
            GaussianSpec::plain([-0.4, 0.2, 0.0, 0.1], 1.1, [0.3, 1.0, 1.0, -0.7]),
        );
        for (mu, nu) in [(0, 0), (1, 3), (2, 2), (3, 0)] {
            let direct = fock.vacuum_two_point(mu, nu, &f, &g).unwrap();
            let af = fock.field_a(mu, &f).unwrap();
            let ag = fock.field_a(nu, &g).unwrap();
            let omega = fock.vacuum_vector();
            let dense = fock.inner(&omega, &(&af.matrix * ag.apply(&omega)));
            assert!((direct - dense).norm() < 1e-13);
        }
    }

    #[test]
    fn field_a_single_application_stays_one_particle() {
        let lat = single_mode_lattice();
        let fock = build_fock(lat.clone(), 2, 20_000).unwrap();
        let f = unit_tf(&lat);
        let a = fock.field_a(2, &f).unwrap();
        let psi = a.apply(&fock.vacuum_vector());
        for idx in fock.degree_range(2) {
            assert_eq!(psi[idx], c64(0.0, 0.0));
        }
    }

    #[test]
    fn field_operators_are_krein_hermitian() {
        let lat = MomentumLattice::from_modes(2.0 * PI, vec![[0, 0, 1], [1, -1, 0]]).unwrap();
        let fock = build_fock(lat.clone(), 2, 20_000).unwrap();
        let f = TestFunction::gaussian(
            &lat,
            GaussianSpec::plain([0.3, -0.1, 0.2, 0.0], 0.9, [1.0, -1.0, 0.5, 0.25]),
        );
        for mu in 0..4 {
            let op = fock.field_a(mu, &f).unwrap();
            assert!(fock.krein_hermiticity_deviation(&op) < 1e-12);
        }
        let op = fock.field_f(0, 3, &f).unwrap();
        assert!(fock.krein_hermiticity_deviation(&op) < 1e-12);
        let (b, _, _) = fock.field_b(&f).unwrap();
        assert!(fock.krein_hermiticity_deviation(&b) < 1e-12);
    }

    #[test]
    fn field_f_antisymmetry() {
        let lat = single_mode_lattice();
        let fock = build_fock(lat.clone(), 2, 20_000).unwrap();
        let f = unit_tf(&lat);
        for mu in 0..4 {
            let zero = fock.field_f(mu, mu, &f).unwrap();
            assert_eq!(max_abs_entry(&zero.matrix), 0.0);
        }
        let f01 = fock.field_f(0, 1, &f).unwrap();
        let f10 = fock.field_f(1, 0, &f).unwrap();
        assert!(max_abs_entry(&(&f01.matrix + &f10.matrix)) < 1e-14);
    }

    #[test]
    fn field_strength_two_point_nonzero_on_light_like_mode() {
        let lat = single_mode_lattice();
        let fock = build_fock(lat.clone(), 2, 20_000).unwrap();
        let f = unit_tf(&lat);
        let f01 = fock.field_f(0, 1, &f).unwrap();
        let omega = fock.vacuum_vector();
        let value = fock.inner(&omega, &(&f01.matrix * f01.apply(&omega)));
        assert!(value.norm() > 1e-6, "transverse F correlation vanished");
    }

    #[test]
    fn b_plus_annihilates_transverse_and_sees_scalar() {
        let lat = single_mode_lattice(); // k along z, omega = 1
        let fock = build_fock(lat.clone(), 2, 20_000).unwrap();
        let f = unit_tf(&lat);
        let (_, b_plus, _) = fock.field_b(&f).unwrap();
        let omega_vec = fock.vacuum_vector();
        assert_eq!(b_plus.apply(&omega_vec).norm(), 0.0);

        let omega = lat.omega(0);
        let c = fock.mode_norm(0);
        for mu in 1..3 {
            let ad = fock.ladder(0, mu, LadderKind::Create);
            let transverse = ad.apply(&omega_vec);
            assert!(b_plus.apply(&transverse).norm() < 1e-14, "mu={mu}");
        }
        // B+ a‡_0 Omega = -omega c(k) Omega with c(k) = (-i) conj(f_hat) / sqrt(2 omega L^3).
        let ad0 = fock.ladder(0, 0, LadderKind::Create);
        let scalar = ad0.apply(&omega_vec);
        let image = b_plus.apply(&scalar);
        let expected = cr(-omega) * (-IM) * cr(c);
        assert!((image[0] - expected).norm() < 1e-14);
        // Longitudinal + scalar combination is annihilated.
        let ad3 = fock.ladder(0, 3, LadderKind::Create);
        let physical = ad0.apply(&omega_vec) + ad3.apply(&omega_vec);
        assert!(b_plus.apply(&physical).norm() < 1e-14);
    }

    #[test]
    fn momentum_and_spectral_condition() {
        let lat = MomentumLattice::from_modes(2.0 * PI, vec![[0, 0, 1], [1, 1, 0]]).unwrap();
        let fock = build_fock(lat.clone(), 2, 20_000).unwrap();
        // Vacuum sits on the cone tip.
        assert_eq!(fock.momentum_of_state(0), [0.0; 4]);
        // One photon of mode k: p = (|k|, k), p.p = 0.
        let idx = fock.state_index(&[fock.slot(0, 1) as u16]).unwrap();
        let p = fock.momentum_of_state(idx);
        let p2 = p[0] * p[0] - p[1] * p[1] - p[2] * p[2] - p[3] * p[3];
        assert!(p2.abs() < 1e-12);
        assert!(fock.spectral_check(1e-12));
        // Two-photon Cauchy-Schwarz: p.p = 2(|k1||k2| - k1.k2) >= 0 over all pairs.
        for i in fock.degree_range(2) {
            let p = fock.momentum_of_state(i);
            let p2 = p[0] * p[0] - p[1] * p[1] - p[2] * p[2] - p[3] * p[3];
            assert!(p2 >= -1e-12);
        }
    }

    #[test]
    fn vacuum_unique_at_zero_energy() {
        let fock = build_fock(single_mode_lattice(), 2, 20_000).unwrap();
        let zeros = (0..fock.dim())
            .filter(|&i| fock.momentum_of_state(i)[0].abs() < 1e-12)
            .count();
        assert_eq!(zeros, 1);
    }

    #[test]
    fn translation_commutes_with_eta_and_covariance() {
        let lat = MomentumLattice::from_modes(2.0 * PI, vec![[0, 0, 1], [1, -1, 2]]).unwrap();
        let fock = build_fock(lat.clone(), 2, 20_000).unwrap();
        let a4 = [0.7, -0.3, 1.1, 0.2];
        let u = fock.translation(a4);
        let eta = fock.eta_matrix();
        assert!(max_abs_entry(&(&u.matrix * &eta - &eta * &u.matrix)) < 1e-14);

        let f = TestFunction::gaussian(
            &lat,
            GaussianSpec::plain([0.2, 0.4, -0.6, 0.0], 1.2, [1.0, 0.3, -0.2, 0.9]),
        );
        let f_shifted = f.translated(&lat, a4);
        for mu in 0..4 {
            let lhs = {
                let a = fock.field_a(mu, &f).unwrap();
                &u.matrix * &a.matrix * u.matrix.adjoint()
            };
            let rhs = fock.field_a(mu, &f_shifted).unwrap();
            assert!(max_abs_entry(&(lhs - &rhs.matrix)) < 1e-12, "mu={mu}");
        }
    }

    #[test]
    fn fock_wightman_two_point_block() {
        let lat = single_mode_lattice();
        let fock = build_fock(lat.clone(), 2, 20_000).unwrap();
        let norm = (2.0 * lat.omega(0) * lat.volume()).sqrt();
        let f = TestFunction::from_profile(vec![cr(norm)], [cr(1.0); 4], true);
        let letters: Vec<(usize, TestFunction)> = (0..4).map(|mu| (mu, f.clone())).collect();
        let w = fock_wightman(&fock, &letters, 4).unwrap();
        assert!(w.is_hermitian(1e-12));
        assert!(w.is_normalized(0.0));
        // Normalized amplitudes: W2[mu][nu] = -g_{mu nu}.
        for mu in 0..4 {
            for nu in 0..4 {
                let expected = if mu == nu { cr(-METRIC_DIAG[mu]) } else { c64(0.0, 0.0) };
                assert!((w.block(2)[mu * 4 + nu] - expected).norm() < 1e-12);
            }
        }
        // Odd blocks vanish for the free field.
        assert!(w.block(1).iter().all(|v| v.norm() == 0.0));
        assert!(w.block(3).iter().all(|v| v.norm() == 0.0));
    }
}
