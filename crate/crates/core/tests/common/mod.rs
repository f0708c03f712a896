//! Test-side oracles, kept independent of the library's eigensolver paths.
//!
//! Shared by several test binaries; each uses a subset.
#![allow(dead_code)]

use gbcert_core::linalg::{c64, cr, CMat, CVec};
use num_complex::Complex64;

/// Hermitian eigenvalues by classical cyclic Jacobi sweeps on the real
/// symmetric embedding [[X, -Y], [Y, X]] of H = X + iY (eigenvalues come
/// out doubled). Fully independent of the nalgebra QR path the library uses.
pub fn jacobi_eigenvalues(m: &CMat, sweeps: usize) -> Vec<f64> {
    let n = m.nrows();
    if n == 0 {
        return Vec::new();
    }
    let big = 2 * n;
    let mut a = vec![vec![0.0f64; big]; big];
    for i in 0..n {
        for j in 0..n {
            let z = m[(i, j)];
            a[i][j] = z.re;
            a[i + n][j + n] = z.re;
            a[i][j + n] = -z.im;
            a[i + n][j] = z.im;
        }
    }
    for _ in 0..sweeps {
        let mut off = 0.0f64;
        for p in 0..big {
            for q in (p + 1)..big {
                off = off.max(a[p][q].abs());
            }
        }
        if off < 1e-13 {
            break;
        }
        for p in 0..big {
            for q in (p + 1)..big {
                let apq = a[p][q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let tau = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..big {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..big {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut evs: Vec<f64> = (0..big).map(|i| a[i][i]).collect();
    evs.sort_by(f64::total_cmp);
    // Doubled spectrum: keep every other entry.
    evs.into_iter().step_by(2).collect()
}

/// Sign counts from the Jacobi oracle.
pub fn jacobi_signature(m: &CMat, tol_null: f64) -> (usize, usize, usize) {
    let mut plus = 0;
    let mut zero = 0;
    let mut minus = 0;
    for v in jacobi_eigenvalues(m, 60) {
        if v.abs() <= tol_null {
            zero += 1;
        } else if v > 0.0 {
            plus += 1;
        } else {
            minus += 1;
        }
    }
    (plus, zero, minus)
}

/// Largest |eigenvalue| of a Hermitian matrix by power iteration on m^2
/// (so alternating-sign dominant pairs cannot stall), with a deterministic
/// start vector.
pub fn power_iteration_spectral_norm(m: &CMat, iterations: usize) -> f64 {
    let n = m.nrows();
    if n == 0 {
        return 0.0;
    }
    let mut v = CVec::from_fn(n, |i, _| c64(1.0 / (i as f64 + 1.0), 0.3 / (i as f64 + 2.0)));
    v /= cr(v.norm());
    let mut estimate = 0.0f64;
    for _ in 0..iterations {
        let w = m * (m * &v);
        let norm = w.norm();
        if norm < 1e-300 {
            return 0.0;
        }
        let next = w / cr(norm);
        let new_estimate = norm.sqrt();
        if (new_estimate - estimate).abs() <= 1e-13 * new_estimate.max(1.0) {
            return new_estimate;
        }
        estimate = new_estimate;
        v = next;
    }
    estimate
}

/// Multiset coefficient C(slots + n - 1, n): dimension oracle for the
/// occupation-n sector.
pub fn multiset_count(slots: usize, n: usize) -> usize {
    let mut num = 1usize;
    let mut den = 1usize;
    for i in 0..n {
        num *= slots + i;
        den *= i + 1;
    }
    num / den
}

/// Deterministic pseudo-random Hermitian matrix from a seed (splitmix64
/// stream), independent of the rand crate.
pub fn seeded_hermitian(seed: u64, n: usize, scale: f64) -> CMat {
    let mut state = seed;
    let mut next = move || {
        state = state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^= z >> 31;
        (z as f64 / u64::MAX as f64) * 2.0 - 1.0
    };
    let raw = CMat::from_fn(n, n, |_, _| c64(scale * next(), scale * next()));
    (&raw + raw.adjoint()) * cr(0.5)
}

pub fn complex_close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol
}
