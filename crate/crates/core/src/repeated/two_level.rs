//! Two-level meter: closed-form collective states and the diffusion limit.
//!
//! Many weak measurements with step `T`, small meter angle `θ`, phase step
//! `χ = χ̇T` and entanglement `R_12 = 1 − ṙT` tend, as `T → 0` with `t = nT`
//! fixed, to a continuous measurement where `|Q^{(n)}_12| → e^{−κt}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{collective_joint, collective_meter, RepeatedMeasurement};
use crate::error::{Error, Result};
use crate::matcore::{ComplexMatrix, DensityMatrix, ONE};
use crate::measurement::{SoftMeasurement, TwoLevelMeterParams};

/// How the per-step meter angle relates to the diffusion rate.
///
/// `Gram` uses `θ² = 8κT`, for which the overlap decays as `e^{−κt}`.
/// `Paper` uses `θ² = 4κT`, which makes the overlap decay as `e^{−κt/2}` and
/// doubles the rate appearing in the semiclassical information.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KappaConvention {
    #[default]
    Gram,
    Paper,
}

impl KappaConvention {
    /// `θ²/(κT)`.
    pub fn theta_sq_per_kappa_step(self) -> f64 {
        match self {
            Self::Gram => 8.0,
            Self::Paper => 4.0,
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "gram" => Some(Self::Gram),
            "paper" => Some(Self::Paper),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Gram => "gram",
            Self::Paper => "paper",
        }
    }
}

/// Parameters of the continuous (diffusion) limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuousLimitParams {
    pub kappa: f64,
    pub chi_dot: f64,
    pub r_dot: Complex64,
    pub t: f64,
}

impl ContinuousLimitParams {
    pub fn new(kappa: f64, chi_dot: f64, r_dot: Complex64, t: f64) -> Result<Self> {
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidParams(format!("kappa must be ≥ 0, got {kappa}")));
        }
        if !(r_dot.re >= 0.0 && r_dot.is_finite()) {
            return Err(Error::InvalidParams(format!("Re(r_dot) must be ≥ 0, got {r_dot}")));
        }
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidParams(format!("t must be ≥ 0, got {t}")));
        }
        if !chi_dot.is_finite() {
            return Err(Error::InvalidParams("chi_dot must be finite".into()));
        }
        Ok(Self {
            kappa,
            chi_dot,
            r_dot,
            t,
        })
    }

    /// `e^{−κt}`.
    pub fn overlap_decay(&self) -> f64 {
        (-self.kappa * self.t).exp()
    }

    /// `R_12(t) = e^{−ṙt}`.
    pub fn dephasing(&self) -> Complex64 {
        (-self.r_dot * self.t).exp()
    }

    pub fn entanglement_matrix(&self) -> ComplexMatrix {
        let r = self.dephasing();
        ComplexMatrix::from_rows(&[vec![ONE, r], vec![r.conj(), ONE]])
    }
}

/// Closed-form `(Q^{(n)})^{1/2}` for the two-level meter.
pub fn two_level_sq_q(params: &TwoLevelMeterParams, n: u32) -> ComplexMatrix {
    let cn = (params.theta / 2.0).cos().powi(n as i32);
    let a = (1.0 - cn).max(0.0).sqrt();
    let b = (1.0 + cn).sqrt();
    let phase = Complex64::from_polar(1.0, n as f64 * params.chi);
    sqrt_from_parts(0.5 * (a + b), 0.5 * (b - a), phase)
}

fn sqrt_from_parts(s_plus: f64, s_minus: f64, phase: Complex64) -> ComplexMatrix {
    let d = Complex64::new(s_plus, 0.0);
    ComplexMatrix::from_rows(&[
        vec![d, phase * s_minus],
        vec![phase.conj() * s_minus, d],
    ])
}

/// `s_±(t) = ½(√(1+e^{−κt}) ± √(1−e^{−κt}))`.
fn s_pm(p: &ContinuousLimitParams) -> (f64, f64) {
    let x = p.kappa * p.t;
    let plus = (1.0 + (-x).exp()).sqrt();
    let minus = (-(-x).exp_m1()).sqrt();
    (0.5 * (plus + minus), 0.5 * (plus - minus))
}

/// `Q^{1/2}(t) = [[s₊, e^{iχ̇t}s₋], [e^{−iχ̇t}s₋, s₊]]`.
pub fn continuous_q_sqrt(p: &ContinuousLimitParams) -> ComplexMatrix {
    let (sp, sm) = s_pm(p);
    sqrt_from_parts(sp, sm, Complex64::from_polar(1.0, p.chi_dot * p.t))
}

/// Large-`κt` expansion of [`continuous_q_sqrt`]; not valid near `t = 0`.
pub fn asymptotic_q_sqrt(p: &ContinuousLimitParams) -> ComplexMatrix {
    let e = p.overlap_decay();
    let d = Complex64::new(1.0 - e * e / 8.0, 0.0);
    let off = Complex64::from_polar(0.5 * e, p.chi_dot * p.t);
    ComplexMatrix::from_rows(&[vec![d, off], vec![off.conj(), d]])
}

fn check_qubit(rho_a: &DensityMatrix) -> Result<()> {
    if rho_a.dim() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "continuous limit needs a qubit, got dimension {}",
            rho_a.dim()
        )));
    }
    Ok(())
}

/// Meter state during continuous measurement:
/// diagonal `½ ± ½√(1−e^{−2κt})(ρ_11 − ρ_22)`, off-diagonal `½e^{−κt ± iχ̇t}`.
pub fn meter_dm_continuous(rho_a: &DensityMatrix, p: &ContinuousLimitParams) -> Result<DensityMatrix> {
    check_qubit(rho_a)?;
    let bias = (-(-2.0 * p.kappa * p.t).exp_m1()).sqrt() * (rho_a.get(0, 0).re - rho_a.get(1, 1).re);
    let off = Complex64::from_polar(0.5 * p.overlap_decay(), p.chi_dot * p.t);
    DensityMatrix::new(ComplexMatrix::from_rows(&[
        vec![Complex64::new(0.5 + 0.5 * bias, 0.0), off],
        vec![off.conj(), Complex64::new(0.5 - 0.5 * bias, 0.0)],
    ]))
}

/// The same meter state evaluated from the collective states `Q^{1/2}(t)`.
pub fn meter_dm_continuous_from_states(rho_a: &DensityMatrix, p: &ContinuousLimitParams) -> Result<DensityMatrix> {
    check_qubit(rho_a)?;
    DensityMatrix::new(collective_meter(&rho_a.populations(), &continuous_q_sqrt(p)))
}

/// Joint object ⊗ meter state in the continuous limit (object index outer):
/// `⟨i,k|ρ|j,l⟩ = R_ij(t) ρ_ij S_ki S_lj*` with `S = Q^{1/2}(t)`.
pub fn joint_dm_continuous(rho_a: &DensityMatrix, p: &ContinuousLimitParams) -> Result<DensityMatrix> {
    check_qubit(rho_a)?;
    if p.r_dot.re < 0.0 {
        return Err(Error::InvalidParams("Re(r_dot) must be ≥ 0".into()));
    }
    DensityMatrix::new(collective_joint(
        rho_a.matrix(),
        &p.entanglement_matrix(),
        &continuous_q_sqrt(p),
    ))
}

/// Discrete repeated measurement approximating `p` with `steps` steps of
/// length `T = t/steps`: `θ = √(cκT)` (`c` from the convention), `χ = χ̇T`,
/// `R_12 = 1 − ṙT`.
pub fn discrete_schedule(
    p: &ContinuousLimitParams,
    steps: u32,
    convention: KappaConvention,
) -> Result<RepeatedMeasurement> {
    if steps == 0 {
        return Err(Error::InvalidParams("at least one step is required".into()));
    }
    let dt = p.t / steps as f64;
    let theta = (convention.theta_sq_per_kappa_step() * p.kappa * dt).sqrt();
    let meter = TwoLevelMeterParams::new(theta, 0.0, p.chi_dot * dt)?;
    let r12 = ONE - p.r_dot * dt;
    let r = ComplexMatrix::from_rows(&[vec![ONE, r12], vec![r12.conj(), ONE]]);
    RepeatedMeasurement::new(SoftMeasurement::new(r, meter.gram())?, steps)
}
