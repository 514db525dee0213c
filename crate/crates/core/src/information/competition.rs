//! Two parties measuring the same object: an eavesdropper (Eve) and the
//! legitimate receiver (Bob).

use num_complex::Complex64;

use super::{check_measurement, coherent_info_two_level, holevo_info, StateEnsemble};
use crate::error::{Error, Result};
use crate::matcore::{von_neumann_entropy, ComplexMatrix, DensityMatrix, TAU_RECON};
use crate::measurement::{object_dephasing, validate_entanglement_matrix, SoftMeasurement};

/// Coherent information left to Eve and to Bob after both have measured.
///
/// With `d^X_kl = R^X_kl Q^X_lk`:
/// `I_c^E = S[ρ∘d^E∘d^B] − S[ρ∘R^E∘d^B]` and
/// `I_c^B = S[ρ∘d^E∘d^B] − S[ρ∘d^E∘R^B]`.
pub fn compete_coherent(
    rho_a: &DensityMatrix,
    r_e: &ComplexMatrix,
    q_e: &ComplexMatrix,
    r_b: &ComplexMatrix,
    q_b: &ComplexMatrix,
) -> Result<(f64, f64)> {
    let d = rho_a.dim();
    check_measurement(d, r_e, q_e)?;
    check_measurement(d, r_b, q_b)?;
    let d_e = object_dephasing(r_e, q_e);
    let d_b = object_dephasing(r_b, q_b);
    let rho = rho_a.matrix();
    let entropy = |m: ComplexMatrix| von_neumann_entropy(&DensityMatrix::new(m)?);
    let both = entropy(rho.hadamard(&d_e).hadamard(&d_b))?;
    let eve_kept = entropy(rho.hadamard(r_e).hadamard(&d_b))?;
    let bob_kept = entropy(rho.hadamard(&d_e).hadamard(r_b))?;
    Ok((both - eve_kept, both - bob_kept))
}

/// Qubit competition parameters: overlaps `q_E = |Q^E_12|`, `q_B = |Q^B_12|`,
/// coherence modulus `μ` and population `p = ρ_11`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompetitionParams {
    pub q_e: f64,
    pub q_b: f64,
    pub mu: f64,
    pub p: f64,
}

impl CompetitionParams {
    pub fn new(q_e: f64, q_b: f64, mu: f64, p: f64) -> Result<Self> {
        for (name, value) in [("q_E", q_e), ("q_B", q_b), ("mu", mu), ("p", p)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::OutOfRange { name, value });
            }
        }
        Ok(Self { q_e, q_b, mu, p })
    }

    /// Equal populations, `p = ½`.
    pub fn balanced(q_e: f64, q_b: f64, mu: f64) -> Result<Self> {
        Self::new(q_e, q_b, mu, 0.5)
    }
}

/// Closed-form `(I_c^E, I_c^B)` for rigid entanglement (`R ≡ 1`):
/// Eve's value is the single-measurement formula with `q → q_B μ`, `μ → q_E`,
/// and Bob's the same with the roles exchanged.
pub fn compete_two_level(cp: &CompetitionParams) -> Result<(f64, f64)> {
    let cp = CompetitionParams::new(cp.q_e, cp.q_b, cp.mu, cp.p)?;
    let eve = coherent_info_two_level(cp.q_b * cp.mu, cp.p, cp.q_e)?;
    let bob = coherent_info_two_level(cp.q_e * cp.mu, cp.p, cp.q_b)?;
    Ok((eve, bob))
}

/// Orientation of Eve's measurement basis relative to Bob's.
#[derive(Debug, Clone, PartialEq)]
pub enum EveBasis {
    /// Qubit basis rotated by this Bloch-sphere angle about the y axis.
    Angle(f64),
    /// Columns are Eve's basis vectors in Bob's basis.
    Unitary(ComplexMatrix),
}

impl EveBasis {
    pub fn unitary(&self) -> Result<ComplexMatrix> {
        match self {
            Self::Angle(theta) => {
                let (s, c) = (theta / 2.0).sin_cos();
                Ok(ComplexMatrix::from_real_rows(&[&[c, -s], &[s, c]]))
            }
            Self::Unitary(u) => {
                if !u.is_square() || !u.adjoint().matmul(u).approx_eq(&ComplexMatrix::identity(u.rows()), TAU_RECON) {
                    return Err(Error::InvalidParams("Eve's basis matrix is not unitary".into()));
                }
                Ok(u.clone())
            }
        }
    }
}

/// Bob's semiclassical information about an ensemble after Eve's soft
/// measurement in a rotated basis.
///
/// Each state is written in Eve's basis, its coherences there are multiplied
/// by `q_dephase` (Eve's `R∘Q`), and the result is rotated back; Bob then
/// maps level `k` onto his meter state `|k̃⟩`. Returns the Holevo quantity of
/// Bob's meter states.
pub fn eve_bob_semiclassical(
    ens: &StateEnsemble,
    eve: &EveBasis,
    q_dephase: &ComplexMatrix,
    bob: &SoftMeasurement,
) -> Result<f64> {
    let d = ens.dim();
    let u = eve.unitary()?;
    if u.rows() != d || q_dephase.rows() != d || bob.dim() != d {
        return Err(Error::DimensionMismatch(format!(
            "ensemble dimension {d}, Eve basis {}, dephasing {}x{}, Bob {}",
            u.rows(),
            q_dephase.rows(),
            q_dephase.cols(),
            bob.dim()
        )));
    }
    validate_entanglement_matrix(q_dephase).into_result()?;
    bob.validate().into_result()?;
    let vecs = bob.meter_vectors()?;
    let m = bob.meter_dim();
    let u_adj = u.adjoint();
    let received = ens.map_states(|rho| {
        let in_eve = rho.matrix().conjugate_by(&u_adj);
        let after_eve = in_eve.hadamard(q_dephase).conjugate_by(&u);
        let sum = vecs
            .iter()
            .enumerate()
            .fold(ComplexMatrix::zeros(m, m), |acc, (k, v)| {
                &acc + &ComplexMatrix::outer(v, v).scale(Complex64::new(after_eve[(k, k)].re, 0.0))
            });
        DensityMatrix::new(sum)
    })?;
    holevo_info(&received)
}

/// Equiprobable Bob basis states, real Eve overlap `q`, rigid Bob.
pub fn eve_bob_two_level(theta: f64, q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::OutOfRange { name: "q", value: q });
    }
    let q_dephase = ComplexMatrix::from_real_rows(&[&[1.0, q], &[q, 1.0]]);
    eve_bob_semiclassical(
        &StateEnsemble::basis(2),
        &EveBasis::Angle(theta),
        &q_dephase,
        &SoftMeasurement::projective(2),
    )
}
