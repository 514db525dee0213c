//! Information retained by measurement channels.
//!
//! Coherent information measures how much quantum information survives the
//! object-to-object channel; the Holevo (semiclassical) information measures
//! what the meter learns about an ensemble of object states.

pub mod channel;
pub mod competition;

pub use channel::{soft_object_channel, KrausChannel, KRAUS_RANK_TOL};
pub use competition::{
    compete_coherent, compete_two_level, eve_bob_semiclassical, eve_bob_two_level, CompetitionParams, EveBasis,
};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matcore::{von_neumann_entropy, ComplexMatrix, DensityMatrix, RANK_TOL};
use crate::measurement::{meter_states_from_gram, object_dephasing, validate_entanglement_matrix, validate_gram};
use crate::repeated::KappaConvention;

/// `I_c = S(N(ρ)) − S((N ⊗ id)(|Ψ⟩⟨Ψ|))` with `Ψ` a purification of `ρ`.
///
/// The purification uses the eigenbasis of `ρ` (descending eigenvalues,
/// zero eigenvalues dropped). The result may be negative.
pub fn coherent_info_channel(ch: &KrausChannel, rho: &DensityMatrix) -> Result<f64> {
    ch.validate()?;
    if rho.dim() != ch.in_dim() {
        return Err(Error::DimensionMismatch(format!(
            "state of dimension {} for a channel on dimension {}",
            rho.dim(),
            ch.in_dim()
        )));
    }
    let spec = rho.spectrum();
    let modes: Vec<(f64, Vec<Complex64>)> = spec
        .eigenvalues
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &l)| l > RANK_TOL)
        .map(|(i, &l)| (l, spec.eigenvectors.column(i)))
        .collect();
    let r = modes.len();
    let out = ch.out_dim();
    let mut joint = ComplexMatrix::zeros(out * r, out * r);
    for (i, (li, vi)) in modes.iter().enumerate() {
        for (j, (lj, vj)) in modes.iter().enumerate() {
            let block = ch.apply_operator(&ComplexMatrix::outer(vi, vj))?;
            let w = (li * lj).sqrt();
            for a in 0..out {
                for b in 0..out {
                    joint[(a * r + i, b * r + j)] = block[(a, b)] * w;
                }
            }
        }
    }
    let s_out = von_neumann_entropy(&ch.apply(rho)?)?;
    let s_joint = von_neumann_entropy(&DensityMatrix::new(joint)?)?;
    Ok(s_out - s_joint)
}

/// Coherent information of a soft measurement from the two `D×D` matrices
/// `d∘ρ` and `(√ρ_kk d_kl √ρ_ll)`, where `d_kl = R_kl Q_lk`.
pub fn coherent_info_soft(rho_a: &DensityMatrix, r: &ComplexMatrix, q: &ComplexMatrix) -> Result<f64> {
    check_measurement(rho_a.dim(), r, q)?;
    let d = object_dephasing(r, q);
    let output = DensityMatrix::new(rho_a.matrix().hadamard(&d))?;
    let roots: Vec<f64> = rho_a.populations().iter().map(|p| p.max(0.0).sqrt()).collect();
    let n = rho_a.dim();
    let exchange = DensityMatrix::new(ComplexMatrix::from_fn(n, n, |k, l| d[(k, l)] * (roots[k] * roots[l])))?;
    Ok(von_neumann_entropy(&output)? - von_neumann_entropy(&exchange)?)
}

pub(crate) fn check_measurement(dim: usize, r: &ComplexMatrix, q: &ComplexMatrix) -> Result<()> {
    if r.rows() != dim || q.rows() != dim || !r.is_square() || !q.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "R is {}x{}, Q is {}x{}, state dimension {dim}",
            r.rows(),
            r.cols(),
            q.rows(),
            q.cols()
        )));
    }
    let mut report = validate_entanglement_matrix(r);
    report.failures.extend(validate_gram(q).failures);
    report.into_result()
}

fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::OutOfRange { name, value })
    }
}

/// `(1−x)log₂(1−x) + (1+x)log₂(1+x)` given `x` and `1 − x²`.
fn f_pair(x: f64, one_minus_x_sq: f64) -> f64 {
    let one_minus_x = one_minus_x_sq / (1.0 + x);
    let term = |y: f64| if y > 0.0 { y * y.log2() } else { 0.0 };
    term(one_minus_x) + term(1.0 + x)
}

/// Closed-form qubit coherent information for `ρ_11 = p`, `|ρ_12| = μ√(p(1−p))`
/// and `|R_12 Q_12| = q`:
///
/// `I_c = ½[f(x₁) − f(x₂)]`, `x₁ = √(1−4p(1−p)(1−q²))`, `x₂ = √(1−4p(1−p)(1−q²μ²))`.
pub fn coherent_info_two_level(q: f64, p: f64, mu: f64) -> Result<f64> {
    check_unit("q", q)?;
    check_unit("p", p)?;
    check_unit("mu", mu)?;
    let pp = 4.0 * p * (1.0 - p);
    let a1 = pp * (1.0 - q * q);
    let a2 = pp * (1.0 - q * q * mu * mu);
    let x1 = (1.0 - a1).sqrt();
    let x2 = (1.0 - a2).sqrt();
    Ok(0.5 * (f_pair(x1, a1) - f_pair(x2, a2)))
}

/// Weighted set of labelled states sharing one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct StateEnsemble {
    labels: Vec<String>,
    probs: Vec<f64>,
    states: Vec<DensityMatrix>,
}

impl StateEnsemble {
    pub fn new(labels: Vec<String>, probs: Vec<f64>, states: Vec<DensityMatrix>) -> Result<Self> {
        if labels.len() != probs.len() || probs.len() != states.len() || states.is_empty() {
            return Err(Error::DimensionMismatch(format!(
                "ensemble with {} labels, {} probabilities and {} states",
                labels.len(),
                probs.len(),
                states.len()
            )));
        }
        let dim = states[0].dim();
        if states.iter().any(|s| s.dim() != dim) {
            return Err(Error::DimensionMismatch("ensemble states differ in dimension".into()));
        }
        if probs.iter().any(|&p| p.is_nan() || p < 0.0) || (probs.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!("probabilities {probs:?} are not a distribution")));
        }
        Ok(Self { labels, probs, states })
    }

    /// Labels `0, 1, …` for the given weights and states.
    pub fn indexed(probs: Vec<f64>, states: Vec<DensityMatrix>) -> Result<Self> {
        let labels = (0..states.len()).map(|i| i.to_string()).collect();
        Self::new(labels, probs, states)
    }

    /// Equiprobable basis states `|0⟩, …, |D−1⟩`.
    pub fn basis(dim: usize) -> Self {
        let states = (0..dim)
            .map(|k| DensityMatrix::basis(dim, k).expect("index in range"))
            .collect();
        Self::indexed(vec![1.0 / dim as f64; dim], states).expect("uniform basis ensemble")
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn average(&self) -> Result<DensityMatrix> {
        let n = self.dim();
        let sum = self
            .states
            .iter()
            .zip(&self.probs)
            .fold(ComplexMatrix::zeros(n, n), |acc, (s, &p)| {
                &acc + &s.matrix().scale(Complex64::new(p, 0.0))
            });
        DensityMatrix::new(sum)
    }

    /// Same labels and weights, states replaced by `f(state)`.
    pub fn map_states(&self, f: impl Fn(&DensityMatrix) -> Result<DensityMatrix>) -> Result<Self> {
        let states = self.states.iter().map(f).collect::<Result<Vec<_>>>()?;
        Self::new(self.labels.clone(), self.probs.clone(), states)
    }
}

/// Meter states `Σ_k ρ_kk(λ) |k̃⟩⟨k̃|` left by a soft measurement on each member.
pub fn meter_ensemble(ens: &StateEnsemble, q: &ComplexMatrix) -> Result<StateEnsemble> {
    if q.rows() != ens.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} Gram matrix for {}-level states",
            q.rows(),
            q.cols(),
            ens.dim()
        )));
    }
    let vecs = meter_states_from_gram(q)?;
    let m = vecs[0].len();
    ens.map_states(|rho| {
        let pops = rho.populations();
        let sum = vecs
            .iter()
            .zip(&pops)
            .fold(ComplexMatrix::zeros(m, m), |acc, (v, &p)| {
                &acc + &ComplexMatrix::outer(v, v).scale(Complex64::new(p, 0.0))
            });
        DensityMatrix::new(sum)
    })
}

/// Holevo quantity `S(Σ p ρ) − Σ p S(ρ)`.
pub fn holevo_info(ens: &StateEnsemble) -> Result<f64> {
    let mut chi = von_neumann_entropy(&ens.average()?)?;
    for (s, &p) in ens.states.iter().zip(&ens.probs) {
        if p > 0.0 {
            chi -= p * von_neumann_entropy(s)?;
        }
    }
    Ok(chi.max(0.0))
}

/// Semiclassical information gathered by continuous measurement of an
/// equiprobable pair of basis states, `H((1+x)/2)`:
///
/// `I_s = −½[log₂((1−x²)/4) + x log₂((1+x)/(1−x))]`
///
/// with overlap `x = e^{−κt}` (`Gram`) or `x = e^{−2κt}` (`Paper`).
/// Returns 0 for `κt ≤ 0`.
pub fn semiclassical_info_continuous(kappa: f64, t: f64, convention: KappaConvention) -> f64 {
    let rate = match convention {
        KappaConvention::Gram => 1.0,
        KappaConvention::Paper => 2.0,
    };
    let kt = kappa * t;
    if kt.is_nan() || kt <= 0.0 {
        return 0.0;
    }
    let x = (-rate * kt).exp();
    if x <= 0.5 {
        // near saturation evaluate the deficit 1 − I_s, which is O(x²)
        let deficit = ((1.0 + x) * x.ln_1p() + (1.0 - x) * (-x).ln_1p()) / (2.0 * std::f64::consts::LN_2);
        return 1.0 - deficit;
    }
    // y = 1 − x keeps precision for small κt
    let y = -(-rate * kt).exp_m1();
    let log_y = y.log2();
    let log_2my = (2.0 - y).log2();
    -0.5 * ((log_y + log_2my - 2.0) + x * (log_2my - log_y))
}
