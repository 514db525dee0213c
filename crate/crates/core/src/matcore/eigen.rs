//! Hermitian eigendecomposition and spectral functions of PSD matrices.
//!
//! 2×2 inputs go through the closed-form Pauli decomposition; anything larger
//! runs cyclic complex Jacobi rotations. Both are deterministic.

use num_complex::Complex64;

use super::matrix::{ComplexMatrix, ZERO};
use super::{TAU_HERM, TAU_PSD};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigenvalues at or below this multiple of `n·ε·λ_max` are round-off and
/// are treated as exact zeros by the PSD spectral functions.
const NOISE_FLOOR_ULPS: f64 = 8.0;

/// Eigenvalues (ascending) and the matching orthonormal eigenvectors (columns).
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V · diag(f(λ)) · V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.dim();
        let v = &self.eigenvectors;
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut s = ZERO;
                for (k, &w) in fl.iter().enumerate() {
                    if w != 0.0 {
                        s += v[(i, k)] * v[(j, k)].conj() * w;
                    }
                }
                out[(i, j)] = s;
                out[(j, i)] = s.conj();
            }
            out[(i, i)] = Complex64::new(out[(i, i)].re, 0.0);
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|l| l)
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    fn noise_floor(&self) -> f64 {
        NOISE_FLOOR_ULPS * self.dim() as f64 * f64::EPSILON * self.max().abs().max(f64::MIN_POSITIVE)
    }
}

/// Eigendecomposition of a Hermitian matrix.
pub fn herm_eig(h: &ComplexMatrix) -> Result<Spectrum> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    let deviation = h.hermitian_deviation();
    if deviation > TAU_HERM {
        return Err(Error::NotHermitian { deviation });
    }
    let h = h.hermitian_part();
    let spectrum = match h.rows() {
        0 => Spectrum {
            eigenvalues: Vec::new(),
            eigenvectors: ComplexMatrix::zeros(0, 0),
        },
        1 => Spectrum {
            eigenvalues: vec![h[(0, 0)].re],
            eigenvectors: ComplexMatrix::identity(1),
        },
        2 => eig_2x2(&h),
        _ => jacobi(h),
    };
    Ok(spectrum)
}

/// H = a0·I + ax·σx + ay·σy + az·σz, eigenvalues a0 ∓ |a|.
fn eig_2x2(h: &ComplexMatrix) -> Spectrum {
    let a0 = 0.5 * (h[(0, 0)].re + h[(1, 1)].re);
    let az = 0.5 * (h[(0, 0)].re - h[(1, 1)].re);
    let off = h[(1, 0)]; // ax + i·ay
    let r = (off.norm_sqr() + az * az).sqrt();
    if r == 0.0 {
        return Spectrum {
            eigenvalues: vec![a0, a0],
            eigenvectors: ComplexMatrix::identity(2),
        };
    }
    // Pick the better-conditioned of the two equivalent forms of the +r vector.
    let (u0, u1) = if az >= 0.0 {
        (Complex64::new(r + az, 0.0), off)
    } else {
        (off.conj(), Complex64::new(r - az, 0.0))
    };
    let norm = (u0.norm_sqr() + u1.norm_sqr()).sqrt();
    let (u0, u1) = (u0 / norm, u1 / norm);
    // Orthogonal partner for −r.
    let (w0, w1) = (-u1.conj(), u0.conj());
    Spectrum {
        eigenvalues: vec![a0 - r, a0 + r],
        eigenvectors: ComplexMatrix::from_rows(&[vec![w0, u0], vec![w1, u1]]),
    }
}

fn jacobi(mut a: ComplexMatrix) -> Spectrum {
    let n = a.rows();
    let mut v = ComplexMatrix::identity(n);
    let total: f64 = a.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();

    for sweep in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * total * 1e-2 || off == 0.0 {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let b = apq.norm();
                if b == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let g = 100.0 * b;
                if sweep > 3 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    a[(p, q)] = ZERO;
                    a[(q, p)] = ZERO;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * b);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    let t = 1.0 / (theta.abs() + (theta * theta + 1.0).sqrt());
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // Remove the phase of a_pq, then apply a real rotation.
                let phase = (apq / b).conj();
                let g_pp = Complex64::new(c, 0.0);
                let g_pq = Complex64::new(s, 0.0);
                let g_qp = phase * (-s);
                let g_qq = phase * c;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * g_pp + akq * g_qp;
                    a[(k, q)] = akp * g_pq + akq * g_qq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
                    a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * g_pp + vkq * g_qp;
                    v[(k, q)] = vkp * g_pq + vkq * g_qq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    Spectrum {
        eigenvalues: order.iter().map(|&i| a[(i, i)].re).collect(),
        eigenvectors: ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]),
    }
}

fn psd_spectrum(m: &ComplexMatrix) -> Result<Spectrum> {
    let spec = herm_eig(m)?;
    if spec.min() < -TAU_PSD {
        return Err(Error::NotPsd {
            min_eigenvalue: spec.min(),
        });
    }
    Ok(spec)
}

/// Principal square root of a PSD matrix.
pub fn matrix_sqrt_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let spec = psd_spectrum(m)?;
    let floor = spec.noise_floor();
    Ok(spec.map(|l| if l <= floor { 0.0 } else { l.sqrt() }))
}

/// Moore–Penrose inverse square root: eigenvalues above `rank_tol·λ_max` map
/// to `λ^{-1/2}`, the rest (the kernel) to zero.
pub fn inv_sqrt_psd(m: &ComplexMatrix, rank_tol: f64) -> Result<ComplexMatrix> {
    let spec = psd_spectrum(m)?;
    let lmax = spec.max();
    if lmax <= 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let cut = rank_tol * lmax;
    Ok(spec.map(|l| if l > cut { 1.0 / l.sqrt() } else { 0.0 }))
}

/// Number of eigenvalues above `rank_tol·λ_max`.
pub fn numerical_rank(m: &ComplexMatrix, rank_tol: f64) -> Result<usize> {
    let spec = psd_spectrum(m)?;
    let cut = rank_tol * spec.max();
    Ok(spec.eigenvalues.iter().filter(|&&l| l > cut).count())
}

/// Unitary matrix `exp(i·H)` for Hermitian `H`.
pub fn unitary_exp(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let spec = herm_eig(h)?;
    let v = &spec.eigenvectors;
    let phases: Vec<Complex64> = spec
        .eigenvalues
        .iter()
        .map(|&l| Complex64::from_polar(1.0, l))
        .collect();
    Ok(v.matmul(&ComplexMatrix::diag(&phases)).matmul(&v.adjoint()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::matrix::ONE;
    use crate::matcore::TAU_RECON;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_orthonormal(v: &ComplexMatrix) {
        let g = v.adjoint().matmul(v);
        assert!(g.approx_eq(&ComplexMatrix::identity(v.rows()), 1e-12), "{g}");
    }

    #[test]
    fn diagonal_spectrum_is_sorted() {
        let s = herm_eig(&ComplexMatrix::diag_real(&[3.0, 1.0])).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0, 3.0]);
        assert_orthonormal(&s.eigenvectors);
    }

    #[test]
    fn pauli_x_spectrum() {
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let s = herm_eig(&x).unwrap();
        assert!((s.eigenvalues[0] + 1.0).abs() < 1e-15);
        assert!((s.eigenvalues[1] - 1.0).abs() < 1e-15);
        assert!(s.reconstruct().approx_eq(&x, TAU_RECON));
    }

    #[test]
    fn complex_offdiagonal_spectrum() {
        // (1 − λ)² = 1/4
        let h = ComplexMatrix::from_rows(&[vec![ONE, c(0.0, 0.5)], vec![c(0.0, -0.5), ONE]]);
        let s = herm_eig(&h).unwrap();
        assert!((s.eigenvalues[0] - 0.5).abs() < 1e-15);
        assert!((s.eigenvalues[1] - 1.5).abs() < 1e-15);
        assert!(s.reconstruct().approx_eq(&h, TAU_RECON));
        assert_orthonormal(&s.eigenvectors);
    }

    #[test]
    fn jacobi_handles_complex_4x4() {
        let h = ComplexMatrix::from_rows(&[
            vec![c(2.0, 0.0), c(0.3, 0.4), c(0.0, -1.0), c(0.1, 0.0)],
            vec![c(0.3, -0.4), c(1.0, 0.0), c(0.5, 0.5), c(0.0, 0.2)],
            vec![c(0.0, 1.0), c(0.5, -0.5), c(-1.0, 0.0), c(0.7, -0.1)],
            vec![c(0.1, 0.0), c(0.0, -0.2), c(0.7, 0.1), c(0.5, 0.0)],
        ]);
        let s = herm_eig(&h).unwrap();
        assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        assert!(s.reconstruct().approx_eq(&h, TAU_RECON));
        assert_orthonormal(&s.eigenvectors);
        let trace: f64 = s.eigenvalues.iter().sum();
        assert!((trace - 2.5).abs() < 1e-12);
    }

    #[test]
    fn jacobi_degenerate_spectrum() {
        let h = ComplexMatrix::ones(3);
        let s = herm_eig(&h).unwrap();
        assert!(s.eigenvalues[0].abs() < 1e-14 && s.eigenvalues[1].abs() < 1e-14);
        assert!((s.eigenvalues[2] - 3.0).abs() < 1e-14);
        assert_orthonormal(&s.eigenvectors);
    }

    #[test]
    fn rejects_non_hermitian() {
        let h = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(herm_eig(&h), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn sqrt_examples() {
        let s = matrix_sqrt_psd(&ComplexMatrix::diag_real(&[4.0, 9.0])).unwrap();
        assert!(s.approx_eq(&ComplexMatrix::diag_real(&[2.0, 3.0]), 1e-14));

        let id = ComplexMatrix::identity(3);
        assert!(matrix_sqrt_psd(&id).unwrap().approx_eq(&id, 1e-14));

        // 2·(rank-one projector) has root √2·projector = all-ones/√2.
        let s = matrix_sqrt_psd(&ComplexMatrix::ones(2)).unwrap();
        let expect = ComplexMatrix::ones(2).scale(c(std::f64::consts::FRAC_1_SQRT_2, 0.0));
        assert!(s.approx_eq(&expect, 1e-14));
    }

    #[test]
    fn sqrt_rejects_negative_spectrum() {
        let m = ComplexMatrix::diag_real(&[1.0, -1e-6]);
        assert!(matches!(matrix_sqrt_psd(&m), Err(Error::NotPsd { .. })));
        // within τ_psd: clamped
        let m = ComplexMatrix::diag_real(&[1.0, -1e-12]);
        assert!(matrix_sqrt_psd(&m).is_ok());
    }

    #[test]
    fn inv_sqrt_examples() {
        let r = inv_sqrt_psd(&ComplexMatrix::diag_real(&[4.0, 1.0]), 1e-10).unwrap();
        assert!(r.approx_eq(&ComplexMatrix::diag_real(&[0.5, 1.0]), 1e-14));

        let r = inv_sqrt_psd(&ComplexMatrix::diag_real(&[1.0, 0.0]), 1e-10).unwrap();
        assert!(r.approx_eq(&ComplexMatrix::diag_real(&[1.0, 0.0]), 1e-14));

        assert_eq!(
            inv_sqrt_psd(&ComplexMatrix::zeros(2, 2), 1e-10).unwrap_err(),
            Error::ZeroMatrix
        );
    }

    #[test]
    fn inv_sqrt_two_by_two_branches() {
        // Eigenvectors (1, ±1)/√2 with eigenvalues 1 ± c.
        let cc = 0.5;
        let q = ComplexMatrix::from_real_rows(&[&[1.0, cc], &[cc, 1.0]]);
        let r = inv_sqrt_psd(&q, 1e-10).unwrap();
        let a = (1.0 + cc).powf(-0.5);
        let b = (1.0 - cc).powf(-0.5);
        let expect = ComplexMatrix::from_real_rows(&[
            &[(a + b) / 2.0, (a - b) / 2.0],
            &[(a - b) / 2.0, (a + b) / 2.0],
        ]);
        assert!(r.approx_eq(&expect, 1e-14));
    }

    #[test]
    fn rank_counts_range() {
        assert_eq!(numerical_rank(&ComplexMatrix::ones(3), 1e-10).unwrap(), 1);
        assert_eq!(numerical_rank(&ComplexMatrix::identity(3), 1e-10).unwrap(), 3);
    }

    #[test]
    fn unitary_exp_is_unitary() {
        let h = ComplexMatrix::from_rows(&[vec![c(0.3, 0.0), c(0.1, 0.7)], vec![c(0.1, -0.7), c(-1.2, 0.0)]]);
        let u = unitary_exp(&h).unwrap();
        assert!(u.adjoint().matmul(&u).approx_eq(&ComplexMatrix::identity(2), 1e-14));
    }
}
