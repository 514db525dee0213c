//! Repeated soft measurements and their collective-state representation.
//!
//! After `n` identical soft measurements the meter holds `|k̃⟩^{⊗n}` for each
//! object level `k`. These `D` vectors span a `D`-dimensional active subspace
//! of `H_B^{⊗n}` whatever `n` is, so the joint state fits in a `D²×D²` matrix
//! once written in an orthonormal basis of that subspace. The basis used here
//! is `|e_k⟩ = Σ_l conj((Q^{(n)})^{-1/2})_kl |l̃⟩^{⊗n}`, in which the collective
//! meter states become the columns `ψ_i(k) = ((Q^{(n)})^{1/2})_ki`.
//!
//! Joint states use object-major ordering (`A ⊗ meter`), the same layout as
//! [`apply_soft`](crate::measurement::apply_soft).

pub mod two_level;

pub use two_level::{
    asymptotic_q_sqrt, continuous_q_sqrt, discrete_schedule, joint_dm_continuous, meter_dm_continuous,
    two_level_sq_q, ContinuousLimitParams, KappaConvention,
};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matcore::{inv_sqrt_psd, matrix_sqrt_psd, numerical_rank, ComplexMatrix, DensityMatrix, RANK_TOL};
use crate::measurement::SoftMeasurement;

/// `n` identical soft measurements accumulated on fresh meters.
#[derive(Debug, Clone, PartialEq)]
pub struct RepeatedMeasurement {
    base: SoftMeasurement,
    n: u32,
}

impl RepeatedMeasurement {
    pub fn new(base: SoftMeasurement, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParams("number of repetitions must be at least 1".into()));
        }
        base.validate().into_result()?;
        Ok(Self { base, n })
    }

    pub fn base(&self) -> &SoftMeasurement {
        &self.base
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    /// `R^{(n)}`: elementwise `n`-th power of the entanglement matrix.
    pub fn r_power(&self) -> ComplexMatrix {
        gram_power(self.base.r(), self.n)
    }

    pub fn q_power(&self) -> ComplexMatrix {
        gram_power(self.base.q(), self.n)
    }
}

/// Collective meter states after `n` repetitions.
#[derive(Debug, Clone, PartialEq)]
pub struct CollectiveRepresentation {
    /// `Q^{(n)}`.
    pub qn: ComplexMatrix,
    /// `psi[(k, i)] = ψ_i(k)`; column `i` is the meter state paired with object level `i`.
    pub psi: ComplexMatrix,
    /// Row `k` holds the coefficients of `|e_k⟩` on `|l̃⟩^{⊗n}`.
    pub basis_coeffs: ComplexMatrix,
    /// Rank of `Q^{(n)}`.
    pub active_dim: usize,
}

/// Elementwise power `(Q_kl)^n`.
pub fn gram_power(q: &ComplexMatrix, n: u32) -> ComplexMatrix {
    q.map(|z| z.powu(n))
}

pub fn collective_representation(q: &ComplexMatrix, n: u32) -> Result<CollectiveRepresentation> {
    let qn = gram_power(q, n);
    let psi = matrix_sqrt_psd(&qn)?;
    let basis_coeffs = inv_sqrt_psd(&qn, RANK_TOL)?.conj();
    let active_dim = numerical_rank(&qn, RANK_TOL)?;
    Ok(CollectiveRepresentation {
        qn,
        psi,
        basis_coeffs,
        active_dim,
    })
}

fn check_dims(rho_a: &DensityMatrix, d: usize) -> Result<()> {
    if rho_a.dim() != d {
        return Err(Error::DimensionMismatch(format!(
            "state of dimension {} for a {d}-level measurement",
            rho_a.dim()
        )));
    }
    Ok(())
}

/// Joint object ⊗ collective-meter state after `n` repetitions:
/// `⟨i,k|ρ|j,l⟩ = R_ij^n ρ_ij ψ_i(k) ψ_j(l)*`.
pub fn joint_dm_repeated(rho_a: &DensityMatrix, rm: &RepeatedMeasurement) -> Result<DensityMatrix> {
    let d = rm.dim();
    check_dims(rho_a, d)?;
    let psi = collective_representation(rm.base.q(), rm.n)?.psi;
    let rn = rm.r_power();
    DensityMatrix::new(collective_joint(rho_a.matrix(), &rn, &psi))
}

/// `⟨i,k|·|j,l⟩ = R_ij ρ_ij S_ki S_lj*` for any `D×D` coefficient matrices.
pub(crate) fn collective_joint(rho: &ComplexMatrix, r: &ComplexMatrix, s: &ComplexMatrix) -> ComplexMatrix {
    let d = rho.rows();
    ComplexMatrix::from_fn(d * d, d * d, |row, col| {
        let (i, k) = (row / d, row % d);
        let (j, l) = (col / d, col % d);
        r[(i, j)] * rho[(i, j)] * s[(k, i)] * s[(l, j)].conj()
    })
}

/// Collective meter state `Σ_j ρ_jj ψ_j ψ_j†`; independent of `R`.
pub fn meter_dm_repeated(rho_a: &DensityMatrix, q: &ComplexMatrix, n: u32) -> Result<DensityMatrix> {
    check_dims(rho_a, q.rows())?;
    let psi = collective_representation(q, n)?.psi;
    DensityMatrix::new(collective_meter(&rho_a.populations(), &psi))
}

pub(crate) fn collective_meter(pops: &[f64], s: &ComplexMatrix) -> ComplexMatrix {
    let d = pops.len();
    ComplexMatrix::from_fn(d, d, |k, l| {
        (0..d)
            .map(|j| s[(k, j)] * s[(l, j)].conj() * pops[j])
            .sum::<Complex64>()
    })
}

/// Effective entanglement matrix of `n` repetitions after `m` of the meters
/// have been discarded: `R_kl^n · Q_lk^m`.
pub fn reduced_entanglement(r: &ComplexMatrix, q: &ComplexMatrix, n: u32, m: u32) -> Result<ComplexMatrix> {
    if m > n {
        return Err(Error::InvalidParams(format!("cannot discard {m} of {n} meters")));
    }
    Ok(gram_power(r, n).hadamard(&gram_power(&q.transpose(), m)))
}

/// The repeated-measurement state on `A ⊗ B^{⊗n}` written out in the full
/// `D·m^n`-dimensional product space (meter copies in order, each with the
/// base measurement's meter vectors). Exponential in `n`; meant for checks.
pub fn joint_dm_explicit(rho_a: &DensityMatrix, rm: &RepeatedMeasurement) -> Result<DensityMatrix> {
    let d = rm.dim();
    check_dims(rho_a, d)?;
    let vecs = rm.base.meter_vectors()?;
    let tensored: Vec<Vec<Complex64>> = vecs.iter().map(|v| tensor_power(v, rm.n)).collect();
    let joint = SoftMeasurement::from_meter_vectors(rm.r_power(), tensored)?;
    DensityMatrix::new(joint.map_operator(rho_a.matrix())?)
}

fn tensor_power(v: &[Complex64], n: u32) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(1.0, 0.0)];
    for _ in 0..n {
        out = out.iter().flat_map(|&a| v.iter().map(move |&b| a * b)).collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{partial_trace, partial_trace_matrix, von_neumann_entropy, ONE, TAU_RECON, ZERO};
    use crate::measurement::{apply_soft, TwoLevelMeterParams};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn qutrit_state() -> DensityMatrix {
        DensityMatrix::new(ComplexMatrix::from_rows(&[
            vec![c(0.4, 0.0), c(0.1, 0.1), c(0.05, -0.1)],
            vec![c(0.1, -0.1), c(0.35, 0.0), c(0.0, 0.12)],
            vec![c(0.05, 0.1), c(0.0, -0.12), c(0.25, 0.0)],
        ]))
        .unwrap()
    }

    fn qutrit_measurement() -> SoftMeasurement {
        let vecs = vec![
            vec![ONE, ZERO, ZERO],
            vec![c(0.6, 0.0), c(0.0, 0.8), ZERO],
            vec![c(0.0, 0.5), c(0.5, 0.0), c(0.5, 0.5)],
        ];
        let r = ComplexMatrix::from_rows(&[
            vec![ONE, c(0.5, 0.1), c(0.2, 0.0)],
            vec![c(0.5, -0.1), ONE, c(0.0, 0.3)],
            vec![c(0.2, 0.0), c(0.0, -0.3), ONE],
        ]);
        SoftMeasurement::from_meter_vectors(r, vecs).unwrap()
    }

    #[test]
    fn gram_power_examples() {
        assert_eq!(gram_power(&ComplexMatrix::identity(3), 7), ComplexMatrix::identity(3));
        let q = ComplexMatrix::from_real_rows(&[&[1.0, 0.5], &[0.5, 1.0]]);
        assert!((gram_power(&q, 3)[(0, 1)] - c(0.125, 0.0)).norm() < 1e-16);
        let p = TwoLevelMeterParams::new(1.2, 0.0, 0.3).unwrap();
        let q5 = gram_power(&p.gram(), 5);
        let expect = Complex64::from_polar(0.6f64.cos().powi(5), 1.5);
        assert!((q5[(0, 1)] - expect).norm() < 1e-15);
    }

    #[test]
    fn rejects_zero_repetitions() {
        assert!(RepeatedMeasurement::new(SoftMeasurement::projective(2), 0).is_err());
    }

    #[test]
    fn collective_identity_and_limit() {
        let rep = collective_representation(&ComplexMatrix::identity(2), 1).unwrap();
        assert!(rep.psi.approx_eq(&ComplexMatrix::identity(2), 1e-15));
        let q = ComplexMatrix::from_real_rows(&[&[1.0, 0.9], &[0.9, 1.0]]);
        let rep = collective_representation(&q, 200).unwrap();
        assert!(rep.psi.approx_eq(&ComplexMatrix::identity(2), 1e-4));
    }

    #[test]
    fn collective_basis_is_orthonormal() {
        let m = qutrit_measurement();
        for n in [1, 2, 4] {
            let rep = collective_representation(m.q(), n).unwrap();
            assert_eq!(rep.active_dim, 3);
            let c_mat = &rep.basis_coeffs;
            // ⟨e_k|e_m⟩ = Σ conj(C_kl) C_ml' Q^{(n)}_ll'
            let gram_e = c_mat.conj().matmul(&rep.qn).matmul(&c_mat.transpose());
            assert!(gram_e.approx_eq(&ComplexMatrix::identity(3), 1e-12));
            // ⟨e_k|l̃^n⟩ = ψ_l(k)
            let overlaps = c_mat.conj().matmul(&rep.qn);
            assert!(overlaps.approx_eq(&rep.psi, 1e-12));
            for i in 0..3 {
                let norm: f64 = rep.psi.column(i).iter().map(|z| z.norm_sqr()).sum();
                assert!((norm - 1.0).abs() < 1e-12);
            }
            assert!(rep.psi.adjoint().matmul(&rep.psi).approx_eq(&rep.qn, TAU_RECON));
        }
    }

    #[test]
    fn collective_degenerate_gram() {
        let rep = collective_representation(&ComplexMatrix::ones(3), 3).unwrap();
        assert_eq!(rep.active_dim, 1);
    }

    #[test]
    fn single_repetition_matches_apply_soft() {
        let rho = qutrit_state();
        let base = qutrit_measurement();
        let synth = SoftMeasurement::new(base.r().clone(), base.q().clone()).unwrap();
        let rm = RepeatedMeasurement::new(synth.clone(), 1).unwrap();
        let a = joint_dm_repeated(&rho, &rm).unwrap();
        let b = apply_soft(&synth, &rho).unwrap();
        assert!(a.matrix().approx_eq(b.matrix(), 1e-14));
    }

    #[test]
    fn projective_single_repetition() {
        let rho = qutrit_state();
        let rm = RepeatedMeasurement::new(SoftMeasurement::projective(3), 1).unwrap();
        let out = joint_dm_repeated(&rho, &rm).unwrap();
        for row in 0..9 {
            for col in 0..9 {
                let expect = if row == col && row % 4 == 0 {
                    rho.get(row / 3, row / 3)
                } else {
                    ZERO
                };
                assert!((out.get(row, col) - expect).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn meter_marginal_of_joint() {
        let rho = qutrit_state();
        let rm = RepeatedMeasurement::new(qutrit_measurement(), 3).unwrap();
        let joint = joint_dm_repeated(&rho, &rm).unwrap();
        let meter = partial_trace(&joint, &[3, 3], &[1]).unwrap();
        let direct = meter_dm_repeated(&rho, rm.base().q(), 3).unwrap();
        assert!(meter.matrix().approx_eq(direct.matrix(), 1e-14));
    }

    #[test]
    fn collective_state_is_isometric_image_of_explicit_state() {
        // Entropies and object marginals are basis independent.
        let rho = qutrit_state();
        let rm = RepeatedMeasurement::new(qutrit_measurement(), 2).unwrap();
        let collective = joint_dm_repeated(&rho, &rm).unwrap();
        let explicit = joint_dm_explicit(&rho, &rm).unwrap();
        let s1 = von_neumann_entropy(&collective).unwrap();
        let s2 = von_neumann_entropy(&explicit).unwrap();
        assert!((s1 - s2).abs() < 1e-10);
        let a1 = partial_trace(&collective, &[3, 3], &[0]).unwrap();
        let a2 = partial_trace(&explicit, &[3, 9], &[0]).unwrap();
        assert!(a1.matrix().approx_eq(a2.matrix(), 1e-14));
    }

    #[test]
    fn discarding_meters_composes_dephasing() {
        let rho = qutrit_state();
        let base = qutrit_measurement();
        let (n, m) = (3u32, 1u32);
        let rm = RepeatedMeasurement::new(base.clone(), n).unwrap();
        let full = joint_dm_explicit(&rho, &rm).unwrap();
        // keep object and the first n − m meter copies
        let traced = partial_trace_matrix(full.matrix(), &[3, 3, 3, 3], &[0, 1, 2]).unwrap();
        let r_eff = reduced_entanglement(base.r(), base.q(), n, m).unwrap();
        let vecs: Vec<Vec<Complex64>> = base
            .meter_vectors()
            .unwrap()
            .iter()
            .map(|v| tensor_power(v, n - m))
            .collect();
        let direct = SoftMeasurement::from_meter_vectors(r_eff, vecs)
            .unwrap()
            .map_operator(rho.matrix())
            .unwrap();
        assert!(traced.approx_eq(&direct, 1e-14));
    }

    #[test]
    fn meter_state_limits() {
        let rho = DensityMatrix::diagonal(&[0.7, 0.3]).unwrap();
        let q = ComplexMatrix::from_real_rows(&[&[1.0, 0.5], &[0.5, 1.0]]);
        let meter = meter_dm_repeated(&rho, &q, 60).unwrap();
        assert!(meter.matrix().approx_eq(&ComplexMatrix::diag_real(&[0.7, 0.3]), 1e-12));

        let trivial = meter_dm_repeated(&rho, &ComplexMatrix::ones(2), 4).unwrap();
        assert!(trivial.matrix().approx_eq(&ComplexMatrix::ones(2).scale(c(0.5, 0.0)), 1e-14));
        assert!(von_neumann_entropy(&trivial).unwrap() < 1e-12);

        let p = TwoLevelMeterParams::new(0.9, 0.0, 0.4).unwrap();
        let pure_in = DensityMatrix::diagonal(&[1.0, 0.0]).unwrap();
        let out = meter_dm_repeated(&pure_in, &p.gram(), 3).unwrap();
        assert!(von_neumann_entropy(&out).unwrap() < 1e-10);
    }
}
