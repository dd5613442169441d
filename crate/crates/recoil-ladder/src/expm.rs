//! Unitary propagators from anti-Hermitian generators.
//!
//! The exact solution of the autonomized ladder equations is a single matrix
//! exponential of a tridiagonal anti-Hermitian matrix. `iM` is Hermitian, a
//! diagonal phase gauge makes it real symmetric, and the eigendecomposition
//! then gives the propagator with unitarity guaranteed by construction.

use crate::error::{Error, Result};
use crate::linalg;
use crate::math;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64 as C64;

/// Tridiagonal anti-Hermitian matrix `M`: `M[k][k] = i*diag_im[k]`,
/// `M[k][k+1] = upper[k]`, `M[k+1][k] = -conj(upper[k])`.
#[derive(Debug, Clone)]
pub struct TridiagAntiHermitian {
    pub diag_im: Vec<f64>,
    pub upper: Vec<C64>,
}

impl TridiagAntiHermitian {
    pub fn new(diag_im: Vec<f64>, upper: Vec<C64>) -> Self {
        debug_assert_eq!(upper.len() + 1, diag_im.len().max(1));
        Self { diag_im, upper }
    }

    pub fn dim(&self) -> usize {
        self.diag_im.len()
    }

    /// Dense row-major copy, mostly for cross-checks against the series oracle.
    pub fn to_dense(&self) -> Vec<C64> {
        let n = self.dim();
        let mut a = vec![C64::new(0.0, 0.0); n * n];
        for k in 0..n {
            a[k * n + k] = C64::new(0.0, self.diag_im[k]);
        }
        for k in 0..n - 1 {
            a[k * n + k + 1] = self.upper[k];
            a[(k + 1) * n + k] = -self.upper[k].conj();
        }
        a
    }
}

/// Dense unitary propagator `U = exp(M * scale)`.
#[derive(Debug, Clone)]
pub struct Propagator {
    n: usize,
    u: Vec<C64>,
    scale: f64,
}

impl Propagator {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Evolution parameter the generator was scaled by.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.u[row * self.n + col]
    }

    pub fn apply(&self, x: &[C64]) -> Result<Vec<C64>> {
        if x.len() != self.n {
            return Err(Error::ShapeMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        let mut y = vec![C64::new(0.0, 0.0); self.n];
        for (i, yi) in y.iter_mut().enumerate() {
            let row = &self.u[i * self.n..(i + 1) * self.n];
            let mut acc = C64::new(0.0, 0.0);
            for (u, xv) in row.iter().zip(x.iter()) {
                acc += u * xv;
            }
            *yi = acc;
        }
        Ok(y)
    }

    /// Largest entry of `U^dag U - I` in absolute value.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..n {
                    acc += self.u[k * n + i].conj() * self.u[k * n + j];
                }
                if i == j {
                    acc -= 1.0;
                }
                let mag = math::sqrt(acc.norm_sqr());
                if mag > worst {
                    worst = mag;
                }
            }
        }
        worst
    }
}

/// `exp(M * scale)` for tridiagonal anti-Hermitian `M` via eigendecomposition
/// of the Hermitian matrix `-iM` (real spectrum, unitary result).
pub fn expm_structured(m: &TridiagAntiHermitian, scale: f64) -> Result<Propagator> {
    let n = m.dim();
    // H = -iM: diagonal diag_im (real), upper h_k = -i*upper[k].
    // A diagonal gauge d_{k+1} = d_k * h_k / |h_k| turns H real symmetric.
    let mut gauge = vec![C64::new(1.0, 0.0); n];
    let mut offdiag = vec![0.0; n.saturating_sub(1)];
    for k in 0..n.saturating_sub(1) {
        let h = C64::new(0.0, -1.0) * m.upper[k];
        let r = math::sqrt(h.norm_sqr());
        offdiag[k] = r;
        gauge[k + 1] = if r == 0.0 { gauge[k] } else { gauge[k] * h / r };
    }
    let (w, z) = linalg::tridiagonal_eigen(&m.diag_im, &offdiag)?;
    Ok(assemble(n, scale, &w, &z, &gauge))
}

/// `exp(M * scale)` where `M = i D^dag H' D` with `H'` real symmetric dense
/// (row-major) and `D = diag(gauge)`. Shared by the two-mode propagator.
pub(crate) fn expm_gauged_dense(
    h_real: &[f64],
    gauge: &[C64],
    n: usize,
    scale: f64,
) -> Result<Propagator> {
    let (w, z) = linalg::symmetric_eigen(h_real, n)?;
    Ok(assemble(n, scale, &w, &z, gauge))
}

/// U = D^dag V e^{i w s} V^T D
fn assemble(n: usize, scale: f64, w: &[f64], z: &[f64], gauge: &[C64]) -> Propagator {
    let phases: Vec<C64> = w.iter().map(|&wk| math::cis(wk * scale)).collect();
    let mut u = vec![C64::new(0.0, 0.0); n * n];
    for a in 0..n {
        for b in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..n {
                acc += phases[k] * (z[a * n + k] * z[b * n + k]);
            }
            u[a * n + b] = gauge[a].conj() * acc * gauge[b];
        }
    }
    Propagator { n, u, scale }
}

/// Reference matrix exponential: scaling and squaring with a high-order Taylor
/// series on a dense matrix. Slow and simple; used to validate the structured
/// path on small instances.
pub fn expm_taylor(a: &[C64], n: usize, scale: f64) -> Result<Vec<C64>> {
    debug_assert_eq!(a.len(), n * n);
    let norm1 = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| math::sqrt(a[i * n + j].norm_sqr()))
                .sum::<f64>()
        })
        .fold(0.0_f64, f64::max)
        * math::abs(scale);
    let mut squarings = 0u32;
    let mut scaled_norm = norm1;
    while scaled_norm > 0.25 {
        squarings += 1;
        scaled_norm *= 0.5;
        if squarings > 60 {
            return Err(Error::OracleNormTooLarge { norm: norm1 });
        }
    }
    let factor = scale * math::powf(0.5, f64::from(squarings));

    let mut result = identity(n);
    let mut term = identity(n);
    // ||X|| <= 0.25 makes 24 terms far below f64 resolution
    for k in 1..=24 {
        term = matmul_scaled(&term, a, n, factor / k as f64);
        for (r, t) in result.iter_mut().zip(term.iter()) {
            *r += t;
        }
    }
    for _ in 0..squarings {
        result = matmul_scaled(&result, &result, n, 1.0);
    }
    Ok(result)
}

fn identity(n: usize) -> Vec<C64> {
    let mut m = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        m[i * n + i] = C64::new(1.0, 0.0);
    }
    m
}

fn matmul_scaled(a: &[C64], b: &[C64], n: usize, s: f64) -> Vec<C64> {
    let mut c = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k] * s;
            if aik.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..n {
                c[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_matrix_gives_identity() {
        let m = TridiagAntiHermitian::new(vec![0.0; 4], vec![C64::new(0.0, 0.0); 3]);
        let u = expm_structured(&m, 1.0).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((u.entry(i, j) - want).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn two_level_rotation() {
        // off-diagonal +/- g exponentiates to the plane rotation cos/sin(g*s)
        let g = 0.731;
        let s = 1.4;
        let m = TridiagAntiHermitian::new(vec![0.0, 0.0], vec![C64::new(-g, 0.0)]);
        let u = expm_structured(&m, s).unwrap();
        let c = math::cos(g * s);
        let sn = math::sin(g * s);
        assert!((u.entry(0, 0).re - c).abs() < 1e-13);
        assert!((u.entry(0, 1).re + sn).abs() < 1e-13);
        assert!((u.entry(1, 0).re - sn).abs() < 1e-13);
        assert!((u.entry(1, 1).re - c).abs() < 1e-13);
        assert!(u.unitarity_defect() < 1e-12);
    }

    #[test]
    fn matches_taylor_oracle_on_random_instance() {
        // deterministic 12x12 ladder-like instance with complex upper diagonal
        let n = 12;
        let mut s = 0.11_f64;
        let mut next = || {
            s = math::sin(12345.678 * s + 0.5) * 0.5 + 0.5;
            2.0 * s - 1.0
        };
        let diag: Vec<f64> = (0..n).map(|_| 2.0 * next()).collect();
        let upper: Vec<C64> = (0..n - 1).map(|_| C64::new(next(), next())).collect();
        let m = TridiagAntiHermitian::new(diag, upper);
        let u = expm_structured(&m, 0.9).unwrap();
        let dense = m.to_dense();
        let reference = expm_taylor(&dense, n, 0.9).unwrap();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((u.entry(i, j) - reference[i * n + j]).norm());
            }
        }
        assert!(worst < 1e-10, "max elementwise deviation {worst:.3e}");
        assert!(u.unitarity_defect() < 1e-10);
    }

    #[test]
    fn taylor_oracle_on_nilpotent_matrix() {
        // strictly upper triangular 2x2: series truncates, exp = I + M*s
        let n = 2;
        let mut a = vec![C64::new(0.0, 0.0); 4];
        a[1] = C64::new(0.3, -0.2);
        let e = expm_taylor(&a, n, 2.0).unwrap();
        assert!((e[0] - 1.0).norm() < 1e-15);
        assert!((e[1] - a[1] * 2.0).norm() < 1e-15);
        assert!((e[2]).norm() < 1e-15);
        assert!((e[3] - 1.0).norm() < 1e-15);
    }

    #[test]
    fn taylor_oracle_diagonal() {
        let n = 3;
        let mut a = vec![C64::new(0.0, 0.0); 9];
        for i in 0..3 {
            a[i * 3 + i] = C64::new(-0.2 * i as f64, 0.4);
        }
        let e = expm_taylor(&a, n, 1.0).unwrap();
        for i in 0..3 {
            let want = (a[i * 3 + i]).exp();
            assert!((e[i * 3 + i] - want).norm() < 1e-14);
        }
    }
}
