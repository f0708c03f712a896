//! Smeared two-point functions of the covariant free potential for general
//! gauge parameters, and the forward-shell kernels behind them.
//!
//! The general covariant two-point function is, in momentum space,
//! `w_{mu nu}(p) = (-g_{mu nu} - rho p_mu p_nu) delta_+(p^2)
//!  + lambda/(1-lambda) (-p_mu p_nu) delta_+'(p^2)`,
//! smeared here over the forward massless shell with measure
//! `d3p / ((2 pi)^3 2 omega)`. The dipole-ghost kernel (the delta' part) is
//! realized as a mass-parameter derivative of the deformed-shell integral,
//! evaluated by a central finite difference with a Richardson guard.
//! Landau gauge lambda = 1 is excluded.
//!
//! Quadrature: a reflection-closed spherical product grid (Gauss-Legendre in
//! the polar cosine times a uniform even azimuthal grid) and a Gauss-Legendre
//! radial grid on [r_min, r_max]. Test functions must be negligible outside
//! the radial window; this truncation is deliberate and shows up only in the
//! convergence diagnostics.

use crate::error::{Error, Result};
use crate::fock::{GaussianSpec, TestFunction};
use crate::krein::{self, Signature};
use crate::linalg::{c64, cr, hermitize, max_abs_entry, CMat};
use crate::par::{self, Execution};
use crate::METRIC_DIAG;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Gauge parameters (lambda, rho) of the covariant two-point function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugeParameters {
    pub lambda: f64,
    pub rho: f64,
}

impl GaugeParameters {
    pub fn new(lambda: f64, rho: f64) -> Self {
        Self { lambda, rho }
    }

    /// Feynman gauge lambda = rho = 0.
    pub fn feynman() -> Self {
        Self::new(0.0, 0.0)
    }

    /// Reject parameters within `tol_gauge` of the Landau point lambda = 1.
    pub fn validate(&self, tol_gauge: f64) -> Result<()> {
        if (self.lambda - 1.0).abs() < tol_gauge {
            return Err(Error::LandauGauge {
                lambda: self.lambda,
                tol: tol_gauge,
            });
        }
        Ok(())
    }
}

/// Closed-form momentum-space amplitude evaluable anywhere on (and near)
/// the forward shell.
pub trait Amplitude: Sync {
    fn eval(&self, p0: f64, p: [f64; 3]) -> Complex64;
}

impl Amplitude for GaussianSpec {
    fn eval(&self, p0: f64, p: [f64; 3]) -> Complex64 {
        self.amplitude(p0, p)
    }
}

/// Radial shell indicator: 1 on r_lo <= |p| <= r_hi, independent of p0.
#[derive(Debug, Clone, Copy)]
pub struct ShellIndicator {
    pub r_lo: f64,
    pub r_hi: f64,
    pub coef: Complex64,
}

impl Amplitude for ShellIndicator {
    fn eval(&self, _p0: f64, p: [f64; 3]) -> Complex64 {
        let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        if r >= self.r_lo && r <= self.r_hi {
            self.coef
        } else {
            c64(0.0, 0.0)
        }
    }
}

/// Quadrature and mass-derivative configuration.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureParams {
    /// Polar node count; the azimuthal grid has twice as many points.
    pub directions: usize,
    pub radial_points: usize,
    pub r_min: f64,
    pub r_max: f64,
    /// Central-difference step in m^2 for the dipole-ghost kernel.
    pub mass_step: f64,
    /// Richardson guard: relative change allowed when halving the step.
    pub rich_tol: f64,
    /// Landau-gauge exclusion width.
    pub tol_gauge: f64,
}

impl Default for QuadratureParams {
    fn default() -> Self {
        Self {
            directions: 12,
            radial_points: 48,
            r_min: 0.1,
            r_max: 10.0,
            mass_step: 1e-4,
            rich_tol: 1e-4,
            tol_gauge: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Node {
    p: [f64; 3],
    r: f64,
    /// Direction weight times radial weight times r^2.
    w: f64,
}

/// Gauss-Legendre nodes and weights on [-1, 1].
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    fn legendre_and_deriv(n: usize, x: f64) -> (f64, f64) {
        let mut p0 = 1.0f64;
        let mut p1 = x;
        for k in 2..=n {
            let pk = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
            p0 = p1;
            p1 = pk;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        (p1, dp)
    }
    assert!(n >= 1);
    if n == 1 {
        return vec![(0.0, 2.0)];
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..60 {
            let (p, dp) = legendre_and_deriv(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_and_deriv(n, x);
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Evaluation context: the momentum quadrature grid and the mass-derivative
/// configuration for the dipole-ghost kernel.
#[derive(Debug, Clone)]
pub struct SmearedKernel {
    params: QuadratureParams,
    nodes: Vec<Node>,
    execution: Execution,
}

impl SmearedKernel {
    pub fn new(params: QuadratureParams) -> Self {
        Self::with_execution(params, Execution::default())
    }

    pub fn with_execution(params: QuadratureParams, execution: Execution) -> Self {
        assert!(params.directions >= 2 && params.radial_points >= 2);
        assert!(0.0 < params.r_min && params.r_min < params.r_max);
        let polar = gauss_legendre(params.directions);
        let n_phi = 2 * params.directions;
        let radial = gauss_legendre(params.radial_points);
        let half_span = 0.5 * (params.r_max - params.r_min);
        let mid = 0.5 * (params.r_max + params.r_min);
        let mut nodes =
            Vec::with_capacity(params.directions * n_phi * params.radial_points);
        for &(ct, wt) in &polar {
            let st = (1.0 - ct * ct).max(0.0).sqrt();
            for j in 0..n_phi {
                let phi = 2.0 * PI * j as f64 / n_phi as f64;
                let dir = [st * phi.cos(), st * phi.sin(), ct];
                let w_dir = wt * 2.0 * PI / n_phi as f64;
                for &(x, wr) in &radial {
                    let r = mid + half_span * x;
                    let w = w_dir * wr * half_span * r * r;
                    nodes.push(Node {
                        p: [dir[0] * r, dir[1] * r, dir[2] * r],
                        r,
                        w,
                    });
                }
            }
        }
        Self {
            params,
            nodes,
            execution,
        }
    }

    pub fn params(&self) -> &QuadratureParams {
        &self.params
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Same window and steps, resolution multiplied in both factors.
    pub fn refined(&self, factor: usize) -> Self {
        let mut params = self.params;
        params.directions *= factor;
        params.radial_points *= factor;
        Self::with_execution(params, self.execution)
    }

    /// The grid is closed under direction reflection by construction; this
    /// is the checkable form of that invariant.
    pub fn is_reflection_closed(&self, tol: f64) -> bool {
        self.nodes.iter().all(|n| {
            let m = [-n.p[0], -n.p[1], -n.p[2]];
            self.nodes.iter().any(|o| {
                (o.p[0] - m[0]).abs() < tol
                    && (o.p[1] - m[1]).abs() < tol
                    && (o.p[2] - m[2]).abs() < tol
                    && (o.w - n.w).abs() < tol
            })
        })
    }

    /// Per-node weighted pair products conj(fa) ga on the mass-m_sq shell:
    /// `w_node conj(fa(w_m, p)) ga(w_m, p) / ((2 pi)^3 2 w_m)`.
    fn products(&self, fa: &dyn Amplitude, ga: &dyn Amplitude, m_sq: f64) -> Vec<Complex64> {
        let nodes = &self.nodes;
        let chunk = 512usize;
        let n_chunks = nodes.len().div_ceil(chunk);
        let chunks: Vec<Vec<Complex64>> = par::run(self.execution, n_chunks, |ci| {
            let lo = ci * chunk;
            let hi = (lo + chunk).min(nodes.len());
            nodes[lo..hi]
                .iter()
                .map(|node| {
                    let omega_m = (node.r * node.r + m_sq).max(1e-300).sqrt();
                    let fv = fa.eval(omega_m, node.p);
                    let gv = ga.eval(omega_m, node.p);
                    fv.conj() * gv * cr(node.w / ((2.0 * PI).powi(3) * 2.0 * omega_m))
                })
                .collect()
        });
        chunks.into_iter().flatten().collect()
    }

    /// Sum products against a two-part kernel of the lower-index on-shell
    /// momentum (p0 = sqrt(r^2 + m_sq), spatial entries negated). The kernel
    /// returns (value, magnitude bound); the magnitudes bound the roundoff
    /// of cancellation-heavy kernels whose values are pointwise tiny.
    fn kernel_sum_with_abs(
        &self,
        products: &[Complex64],
        m_sq: f64,
        kern: &(dyn Fn([f64; 4]) -> (f64, f64) + Sync),
    ) -> (Complex64, f64) {
        let mut acc = c64(0.0, 0.0);
        let mut abs = 0.0f64;
        for (node, prod) in self.nodes.iter().zip(products.iter()) {
            let omega_m = (node.r * node.r + m_sq).max(1e-300).sqrt();
            let p_lower = [omega_m, -node.p[0], -node.p[1], -node.p[2]];
            let (value, bound) = kern(p_lower);
            acc += prod * cr(value);
            abs += prod.norm() * bound;
        }
        (acc, abs)
    }

    fn kernel_sum(
        &self,
        products: &[Complex64],
        m_sq: f64,
        kern: &(dyn Fn([f64; 4]) -> f64 + Sync),
    ) -> Complex64 {
        self.kernel_sum_with_abs(products, m_sq, &|p| {
            let v = kern(p);
            (v, v.abs())
        })
        .0
    }

    /// Mass-deformed shell integral with a kernel; the building block of the
    /// dipole-ghost derivative and of its closed-form oracle.
    pub fn shell_integral_at_mass(
        &self,
        fa: &dyn Amplitude,
        ga: &dyn Amplitude,
        m_sq: f64,
        kern: &(dyn Fn([f64; 4]) -> f64 + Sync),
    ) -> Complex64 {
        let products = self.products(fa, ga, m_sq);
        self.kernel_sum(&products, m_sq, kern)
    }

    /// Central mass-derivative of the kernelled shell integral at m^2 = 0,
    /// with the Richardson step guard. Cancellation-heavy kernels (the
    /// antisymmetrized field-strength combinations are pointwise zero) leave
    /// only quadrature roundoff behind; the guard ignores deviations below
    /// that floor, which scales like eps * sum|terms| / step.
    fn mass_derivative(
        &self,
        fa: &dyn Amplitude,
        ga: &dyn Amplitude,
        kern: &(dyn Fn([f64; 4]) -> (f64, f64) + Sync),
    ) -> Result<Complex64> {
        let h = self.params.mass_step;
        let mut worst_abs = 0.0f64;
        let mut diff = |step: f64| {
            let (plus, abs_p) = {
                let products = self.products(fa, ga, step);
                self.kernel_sum_with_abs(&products, step, kern)
            };
            let (minus, abs_m) = {
                let products = self.products(fa, ga, -step);
                self.kernel_sum_with_abs(&products, -step, kern)
            };
            worst_abs = worst_abs.max(abs_p).max(abs_m);
            (plus - minus) / cr(2.0 * step)
        };
        let coarse = diff(h);
        let fine = diff(0.5 * h);
        // Worst-case accumulated roundoff of the difference quotients: one
        // ulp per term, amplified by the 2/h step division.
        let noise_floor = 2.0 * self.nodes.len() as f64 * f64::EPSILON * worst_abs / h;
        let difference = (coarse - fine).norm();
        let deviation = difference / fine.norm().max(1e-300);
        if difference > noise_floor && deviation > self.params.rich_tol {
            return Err(Error::StepTooLarge {
                deviation,
                tol: self.params.rich_tol,
            });
        }
        Ok(fine)
    }

    /// D+ smeared with closed-form amplitudes.
    pub fn dplus_amplitudes(&self, fa: &dyn Amplitude, ga: &dyn Amplitude) -> Complex64 {
        self.shell_integral_at_mass(fa, ga, 0.0, &|_| 1.0)
    }

    /// E+ smeared with closed-form amplitudes: mass-parameter derivative of
    /// the deformed-shell integral, evaluated at m^2 = 0 by central finite
    /// difference at half the configured step (the full step feeds the
    /// Richardson guard).
    pub fn eplus_amplitudes(&self, fa: &dyn Amplitude, ga: &dyn Amplitude) -> Result<Complex64> {
        self.mass_derivative(fa, ga, &|_| (1.0, 1.0))
    }

    fn closed_form<'a>(&self, f: &'a TestFunction) -> Result<&'a GaussianSpec> {
        f.gaussian_spec().ok_or(Error::GridMismatch)
    }

    /// D+(f, g) on the scalar profiles of two Gaussian-generated test
    /// functions.
    pub fn dplus(&self, f: &TestFunction, g: &TestFunction) -> Result<Complex64> {
        Ok(self.dplus_amplitudes(self.closed_form(f)?, self.closed_form(g)?))
    }

    /// E+(f, g) on the scalar profiles.
    pub fn eplus(&self, f: &TestFunction, g: &TestFunction) -> Result<Complex64> {
        self.eplus_amplitudes(self.closed_form(f)?, self.closed_form(g)?)
    }

    fn gauge_kernel_value(
        &self,
        fa: &dyn Amplitude,
        ga: &dyn Amplitude,
        comp: Complex64,
        gp: GaugeParameters,
        d_kern: &(dyn Fn([f64; 4]) -> f64 + Sync),
        e_kern: &(dyn Fn([f64; 4]) -> (f64, f64) + Sync),
    ) -> Result<Complex64> {
        gp.validate(self.params.tol_gauge)?;
        let products = self.products(fa, ga, 0.0);
        let mut value = self.kernel_sum(&products, 0.0, d_kern);
        if gp.lambda != 0.0 {
            let ghost = self.mass_derivative(fa, ga, e_kern)?;
            value += cr(gp.lambda / (1.0 - gp.lambda)) * ghost;
        }
        Ok(comp * value)
    }

    /// Smeared `<Omega, A_mu(f) A_nu(g) Omega>` for gauge parameters gp.
    /// Reduces to `-g_{mu nu} D+(f, g)` at the Feynman point.
    pub fn two_point_a(
        &self,
        mu: usize,
        nu: usize,
        f: &TestFunction,
        g: &TestFunction,
        gp: GaugeParameters,
    ) -> Result<Complex64> {
        let fa = self.closed_form(f)?;
        let ga = self.closed_form(g)?;
        let comp = f.component(mu).conj() * g.component(nu);
        let rho = gp.rho;
        let d_kern = move |p: [f64; 4]| -> f64 {
            let mut v = if mu == nu { -METRIC_DIAG[mu] } else { 0.0 };
            v -= rho * p[mu] * p[nu];
            v
        };
        let e_kern = move |p: [f64; 4]| -> (f64, f64) {
            let v = -p[mu] * p[nu];
            (v, v.abs())
        };
        self.gauge_kernel_value(fa, ga, comp, gp, &d_kern, &e_kern)
    }

    /// Smeared `<Omega, F_{mu nu}(f) F_{rho sigma}(g) Omega>`, assembled by
    /// antisymmetrized momentum factors applied to the full gauge-dependent
    /// kernel. The gauge terms cancel pointwise under the antisymmetrization;
    /// they are still assembled numerically so the cancellation is a result,
    /// not an assumption.
    pub fn two_point_f(
        &self,
        first: (usize, usize),
        second: (usize, usize),
        f: &TestFunction,
        g: &TestFunction,
        gp: GaugeParameters,
    ) -> Result<Complex64> {
        let (mu, nu) = first;
        let (rh, sg) = second;
        let fa = self.closed_form(f)?;
        let ga = self.closed_form(g)?;
        // The field strength smears with the scalar profile; the tensor
        // structure comes entirely from the indices.
        let comp = cr(1.0);
        // w_{alpha beta}(p) for the D-part: -g - rho p p.
        let rho_par = gp.rho;
        let w_d = move |a: usize, b: usize, p: &[f64; 4]| -> f64 {
            let g_term = if a == b { -METRIC_DIAG[a] } else { 0.0 };
            g_term - rho_par * p[a] * p[b]
        };
        let w_e = move |a: usize, b: usize, p: &[f64; 4]| -> f64 { -p[a] * p[b] };
        let anti = move |w: &dyn Fn(usize, usize, &[f64; 4]) -> f64, p: [f64; 4]| -> (f64, f64) {
            let terms = [
                p[nu] * p[sg] * w(mu, rh, &p),
                -(p[mu] * p[sg] * w(nu, rh, &p)),
                -(p[nu] * p[rh] * w(mu, sg, &p)),
                p[mu] * p[rh] * w(nu, sg, &p),
            ];
            let value = terms.iter().sum();
            let bound = terms.iter().map(|t| t.abs()).sum();
            (value, bound)
        };
        let d_kern = move |p: [f64; 4]| anti(&w_d, p).0;
        let e_kern = move |p: [f64; 4]| anti(&w_e, p);
        self.gauge_kernel_value(fa, ga, comp, gp, &d_kern, &e_kern)
    }

    /// Max deviation of the F-sector two-point values from their Feynman
    /// values, over all 36 independent index pairs and the given gauge list.
    pub fn gauge_independence(
        &self,
        f: &TestFunction,
        g: &TestFunction,
        gauges: &[GaugeParameters],
    ) -> Result<f64> {
        let pairs: Vec<(usize, usize)> = (0..4)
            .flat_map(|a| ((a + 1)..4).map(move |b| (a, b)))
            .collect();
        let mut spread = 0.0f64;
        for &first in &pairs {
            for &second in &pairs {
                let reference = self.two_point_f(first, second, f, g, GaugeParameters::feynman())?;
                for gp in gauges {
                    let value = self.two_point_f(first, second, f, g, *gp)?;
                    spread = spread.max((value - reference).norm());
                }
            }
        }
        Ok(spread)
    }

    /// Gram of the smeared potential over (component, profile) pairs at the
    /// Feynman point, fed to the signature counter. The gram is normalized
    /// by its largest entry so the null band is scale-free. The witness
    /// passes when at least one negative direction shows up.
    pub fn indefiniteness_witness(
        &self,
        family: &[&TestFunction],
        tol_null: f64,
    ) -> Result<Signature> {
        assert!(!family.is_empty());
        let n = family.len();
        let dim = 4 * n;
        let mut gram = CMat::zeros(dim, dim);
        for i in 0..n {
            for j in 0..n {
                for mu in 0..4 {
                    for nu in 0..4 {
                        let v = self.two_point_a(mu, nu, family[i], family[j], GaugeParameters::feynman())?;
                        gram[(4 * i + mu, 4 * j + nu)] = v;
                    }
                }
            }
        }
        let gram = hermitize(&gram);
        let scale = max_abs_entry(&gram);
        let normalized = if scale > 0.0 {
            &gram * cr(1.0 / scale)
        } else {
            gram
        };
        Ok(krein::signature(&normalized, tol_null))
    }

    /// Smeared commutator value `-D(f, g) = dplus(g, f) - dplus(f, g)` scalar
    /// part (the -g_{mu nu} tensor factor is common to all components).
    pub fn commutator_value(&self, f: &TestFunction, g: &TestFunction) -> Result<Complex64> {
        Ok(self.dplus(f, g)? - self.dplus(g, f)?)
    }
}

/// One row of the locality convergence table.
#[derive(Debug, Clone, Copy)]
pub struct LocalityRow {
    pub level: usize,
    pub directions: usize,
    pub radial_points: usize,
    pub commutator_abs: f64,
    pub scale_abs: f64,
    pub relative: f64,
}

/// Locality certification data: the smeared commutator magnitude per
/// quadrature refinement level, normalized by |D+(f, g)| at the finest level.
#[derive(Debug, Clone)]
pub struct LocalityTable {
    pub rows: Vec<LocalityRow>,
    /// Every refinement step shrank the commutator by at least a factor 2.
    pub decay_ok: bool,
    pub final_relative: f64,
}

impl LocalityTable {
    pub fn passes(&self, loc_tol: f64) -> bool {
        self.decay_ok && self.final_relative <= loc_tol
    }
}

impl SmearedKernel {
    /// Commutator decay across `levels` resolution doublings, no geometry
    /// precondition. The timelike control case uses this entry point.
    pub fn commutator_decay_table(
        &self,
        f: &TestFunction,
        g: &TestFunction,
        levels: usize,
    ) -> Result<LocalityTable> {
        assert!(levels >= 2);
        let mut rows = Vec::with_capacity(levels);
        let mut scale = 0.0f64;
        for level in 0..levels {
            let kernel = if level == 0 {
                self.clone()
            } else {
                self.refined(1 << level)
            };
            let c = kernel.commutator_value(f, g)?.norm();
            scale = kernel.dplus(f, g)?.norm();
            rows.push(LocalityRow {
                level,
                directions: kernel.params.directions,
                radial_points: kernel.params.radial_points,
                commutator_abs: c,
                scale_abs: 0.0,
                relative: 0.0,
            });
        }
        for row in rows.iter_mut() {
            row.scale_abs = scale;
            row.relative = row.commutator_abs / scale.max(1e-300);
        }
        let decay_ok = rows
            .windows(2)
            .all(|w| w[1].commutator_abs <= 0.5 * w[0].commutator_abs);
        let final_relative = rows.last().map(|r| r.relative).unwrap_or(f64::INFINITY);
        Ok(LocalityTable {
            rows,
            decay_ok,
            final_relative,
        })
    }

    /// Locality certification for spacelike-separated Gaussian centers:
    /// requires margin |dx| - |dt| > 4 max(width), then runs the decay table.
    pub fn commutator_locality(
        &self,
        f: &TestFunction,
        g: &TestFunction,
        levels: usize,
    ) -> Result<LocalityTable> {
        let fs = self.closed_form(f)?;
        let gs = self.closed_form(g)?;
        let dt = (fs.center[0] - gs.center[0]).abs();
        let dx = ((fs.center[1] - gs.center[1]).powi(2)
            + (fs.center[2] - gs.center[2]).powi(2)
            + (fs.center[3] - gs.center[3]).powi(2))
        .sqrt();
        let margin = dx - dt;
        let required = 4.0 * fs.width.max(gs.width);
        if margin <= required {
            return Err(Error::NotSpacelike { margin, required });
        }
        self.commutator_decay_table(f, g, levels)
    }
}
