use num_complex::Complex64;

use super::eigen::{herm_eig, Spectrum};
use super::matrix::{ComplexMatrix, ZERO};
use super::{ENTROPY_CLAMP, TAU_HERM, TAU_PSD, TAU_TRACE};
use crate::error::{Error, Result};

/// Hermitian, positive semidefinite, unit-trace matrix.
///
/// Construction validates all three invariants; the stored matrix is the
/// Hermitian part of the input.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        Self::check(&mat)?;
        Ok(Self {
            mat: mat.hermitian_part(),
        })
    }

    /// Pure state `|ψ⟩⟨ψ|`; the vector is normalized first.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let v: Vec<Complex64> = psi.iter().map(|z| z / norm).collect();
        Self::new(ComplexMatrix::outer(&v, &v))
    }

    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::DimensionMismatch(format!("basis index {k} in dimension {dim}")));
        }
        let mut m = ComplexMatrix::zeros(dim, dim);
        m[(k, k)] = Complex64::new(1.0, 0.0);
        Ok(Self { mat: m })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            mat: ComplexMatrix::identity(dim).scale(Complex64::new(1.0 / dim as f64, 0.0)),
        }
    }

    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::diag_real(probs))
    }

    /// Qubit state `[[p, c], [c*, 1 − p]]`.
    pub fn qubit(p: f64, coherence: Complex64) -> Result<Self> {
        Self::new(ComplexMatrix::from_rows(&[
            vec![Complex64::new(p, 0.0), coherence],
            vec![coherence.conj(), Complex64::new(1.0 - p, 0.0)],
        ]))
    }

    /// Checks the three density-matrix invariants without constructing.
    pub fn check(mat: &ComplexMatrix) -> Result<()> {
        if !mat.is_square() {
            return Err(Error::InvalidState(format!(
                "not square: {}x{}",
                mat.rows(),
                mat.cols()
            )));
        }
        let dev = mat.hermitian_deviation();
        if dev > TAU_HERM {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {dev:e})")));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TAU_TRACE || tr.im.abs() > TAU_TRACE {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let spec = herm_eig(mat)?;
        if spec.min() < -TAU_PSD {
            return Err(Error::InvalidState(format!(
                "not positive semidefinite (min eigenvalue {:e})",
                spec.min()
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.mat[(i, j)]
    }

    pub fn populations(&self) -> Vec<f64> {
        self.mat.diagonal().iter().map(|z| z.re).collect()
    }

    pub fn spectrum(&self) -> Spectrum {
        herm_eig(&self.mat).expect("density matrix is Hermitian by construction")
    }

    pub fn purity(&self) -> f64 {
        self.mat.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self {
            mat: self.mat.kron(&other.mat),
        }
    }

    /// `U ρ U†` for unitary `U`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        Self::new(self.mat.conjugate_by(u))
    }
}

/// Partial trace of a raw operator on a multipartite space.
///
/// `dims` lists subsystem dimensions, subsystem 0 being the outermost
/// (slowest) index; `keep` selects subsystems to retain, in ascending order.
pub fn partial_trace_matrix(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if !m.is_square() || m.rows() != total {
        return Err(Error::DimensionMismatch(format!(
            "subsystem dims {dims:?} (product {total}) vs {}x{} operator",
            m.rows(),
            m.cols()
        )));
    }
    if keep.is_empty() {
        return Err(Error::DimensionMismatch("keep set is empty".into()));
    }
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    if keep_sorted.len() != keep.len() || keep_sorted.iter().any(|&k| k >= dims.len()) {
        return Err(Error::DimensionMismatch(format!(
            "keep set {keep:?} is not a subset of 0..{}",
            dims.len()
        )));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep_sorted.contains(i)).collect();

    // strides[i] = product of dims after i
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let offsets = |subsystems: &[usize]| -> Vec<usize> {
        let count: usize = subsystems.iter().map(|&s| dims[s]).product();
        (0..count)
            .map(|mut idx| {
                let mut off = 0;
                for &s in subsystems.iter().rev() {
                    off += (idx % dims[s]) * strides[s];
                    idx /= dims[s];
                }
                off
            })
            .collect()
    };
    let kept = offsets(&keep_sorted);
    let env = offsets(&traced);

    let n = kept.len();
    let mut out = ComplexMatrix::zeros(n, n);
    for (a, &ka) in kept.iter().enumerate() {
        for (b, &kb) in kept.iter().enumerate() {
            let mut s = ZERO;
            for &e in &env {
                s += m[(ka + e, kb + e)];
            }
            out[(a, b)] = s;
        }
    }
    Ok(out)
}

/// Partial trace of a density matrix; the result is re-validated.
pub fn partial_trace(rho: &DensityMatrix, dims: &[usize], keep: &[usize]) -> Result<DensityMatrix> {
    DensityMatrix::new(partial_trace_matrix(rho.matrix(), dims, keep)?)
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    entropy_of_spectrum(&rho.spectrum().eigenvalues)
}

/// `−Σ λ log₂ λ` over a spectrum; tiny negative values are clamped to zero.
pub fn entropy_of_spectrum(eigenvalues: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &l in eigenvalues {
        if l < -ENTROPY_CLAMP {
            return Err(Error::InvalidState(format!(
                "eigenvalue {l:e} is below the clamp threshold"
            )));
        }
        let l = l.clamp(0.0, 1.0);
        if l > 0.0 {
            s -= l * l.log2();
        }
    }
    Ok(s.max(0.0))
}

/// Binary entropy `H(p)` in bits.
pub fn binary_entropy(p: f64) -> f64 {
    let h = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    h(p) + h(1.0 - p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn validation_rejects_each_invariant() {
        let not_herm = ComplexMatrix::from_rows(&[vec![c(0.5, 0.0), c(0.1, 0.0)], vec![ZERO, c(0.5, 0.0)]]);
        assert!(DensityMatrix::new(not_herm).is_err());
        assert!(DensityMatrix::diagonal(&[0.5, 0.6]).is_err());
        assert!(DensityMatrix::diagonal(&[1.2, -0.2]).is_err());
        assert!(DensityMatrix::diagonal(&[0.25, 0.75]).is_ok());
    }

    #[test]
    fn product_state_trace() {
        let a = DensityMatrix::qubit(0.3, c(0.1, 0.2)).unwrap();
        let b = DensityMatrix::diagonal(&[0.2, 0.5, 0.3]).unwrap();
        let ab = a.kron(&b);
        let ra = partial_trace(&ab, &[2, 3], &[0]).unwrap();
        let rb = partial_trace(&ab, &[2, 3], &[1]).unwrap();
        assert!(ra.matrix().approx_eq(a.matrix(), 1e-15));
        assert!(rb.matrix().approx_eq(b.matrix(), 1e-15));
    }

    #[test]
    fn bell_state_marginal_is_maximally_mixed() {
        let s = c(FRAC_1_SQRT_2, 0.0);
        let bell = DensityMatrix::pure(&[s, ZERO, ZERO, s]).unwrap();
        let ra = partial_trace(&bell, &[2, 2], &[0]).unwrap();
        assert!(ra.matrix().approx_eq(DensityMatrix::maximally_mixed(2).matrix(), 1e-15));
    }

    #[test]
    fn three_party_trace_keeps_order() {
        let a = DensityMatrix::diagonal(&[1.0, 0.0]).unwrap();
        let b = DensityMatrix::diagonal(&[0.0, 1.0]).unwrap();
        let cst = DensityMatrix::maximally_mixed(2);
        let abc = a.kron(&b).kron(&cst);
        let ac = partial_trace(&abc, &[2, 2, 2], &[0, 2]).unwrap();
        assert!(ac.matrix().approx_eq(a.kron(&cst).matrix(), 1e-15));
    }

    #[test]
    fn partial_trace_errors() {
        let r = DensityMatrix::maximally_mixed(4);
        assert!(partial_trace(&r, &[2, 3], &[0]).is_err());
        assert!(partial_trace(&r, &[2, 2], &[]).is_err());
        assert!(partial_trace(&r, &[2, 2], &[2]).is_err());
    }

    #[test]
    fn entropy_examples() {
        let mixed = DensityMatrix::maximally_mixed(2);
        assert!((von_neumann_entropy(&mixed).unwrap() - 1.0).abs() < 1e-15);

        let pure = DensityMatrix::pure(&[c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        assert!(von_neumann_entropy(&pure).unwrap().abs() < 1e-12);

        let d = DensityMatrix::diagonal(&[0.75, 0.25]).unwrap();
        let expect = 2.0 - 0.75 * 3f64.log2();
        assert!((von_neumann_entropy(&d).unwrap() - expect).abs() < 1e-14);
        assert!((expect - 0.811278).abs() < 1e-6);
    }

    #[test]
    fn entropy_clamp() {
        assert_eq!(entropy_of_spectrum(&[1.0, -5e-11]).unwrap(), 0.0);
        assert!(entropy_of_spectrum(&[1.0, -1e-8]).is_err());
    }

    #[test]
    fn binary_entropy_endpoints() {
        assert_eq!(binary_entropy(0.0), 0.0);
        assert_eq!(binary_entropy(1.0), 0.0);
        assert!((binary_entropy(0.5) - 1.0).abs() < 1e-15);
    }
}
