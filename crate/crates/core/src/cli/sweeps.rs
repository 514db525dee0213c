//! Sweep evaluators. Grid points run in parallel; rows come back in grid order
//! (first-named grid outermost).

use num_complex::Complex64;
use rayon::prelude::*;

use super::{CliError, SweepConfig, Table};
use crate::error::Error;
use crate::information::{
    coherent_info_channel, coherent_info_soft, coherent_info_two_level, compete_two_level, eve_bob_two_level,
    holevo_info, meter_ensemble, semiclassical_info_continuous, soft_object_channel, CompetitionParams,
    StateEnsemble,
};
use crate::matcore::{partial_trace, von_neumann_entropy, ComplexMatrix, DensityMatrix, ONE};
use crate::measurement::{apply_soft, SoftMeasurement, TwoLevelMeterParams};
use crate::repeated::{
    collective_representation, continuous_q_sqrt, gram_power, joint_dm_continuous, joint_dm_repeated,
    meter_dm_continuous, meter_dm_repeated, ContinuousLimitParams, KappaConvention, RepeatedMeasurement,
};

/// Failure while preparing inputs: a configuration problem.
fn setup(e: Error) -> CliError {
    CliError::Config(e.to_string())
}

/// Failure while evaluating a grid point.
fn invariant(e: Error) -> CliError {
    CliError::Invariant(e.to_string())
}

fn columns(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// Evaluates `f` on the outer product of two grids, outer grid slowest.
fn sweep_2d(
    outer: &[f64],
    inner: &[f64],
    f: impl Fn(f64, f64) -> Result<Vec<f64>, Error> + Sync,
) -> Result<Vec<Vec<f64>>, CliError> {
    let n = inner.len();
    (0..outer.len() * n)
        .into_par_iter()
        .map(|idx| {
            let (a, b) = (outer[idx / n], inner[idx % n]);
            let mut row = vec![a, b];
            row.extend(f(a, b)?);
            Ok(row)
        })
        .collect::<Result<Vec<_>, Error>>()
        .map_err(invariant)
}

fn sweep_1d(
    xs: &[f64],
    f: impl Fn(f64) -> Result<Vec<f64>, Error> + Sync,
) -> Result<Vec<Vec<f64>>, CliError> {
    xs.par_iter()
        .map(|&x| {
            let mut row = vec![x];
            row.extend(f(x)?);
            Ok(row)
        })
        .collect::<Result<Vec<_>, Error>>()
        .map_err(invariant)
}

fn entanglement_matrix(r12: Complex64) -> ComplexMatrix {
    ComplexMatrix::from_rows(&[vec![ONE, r12], vec![r12.conj(), ONE]])
}

/// `(q, mu, I_c)` at fixed `p`.
pub fn run_fig2a(cfg: &SweepConfig) -> Result<Table, CliError> {
    let p = cfg.real("p")?;
    let rows = sweep_2d(&cfg.grid("q")?.values(), &cfg.grid("mu")?.values(), |q, mu| {
        Ok(vec![coherent_info_two_level(q, p, mu)?])
    })?;
    Ok(Table {
        columns: columns(&["q", "mu", "I_c"]),
        rows,
    })
}

/// `(q_E, q_B, I_c_E, I_c_B)` at fixed `mu`, `p`.
pub fn run_fig2b(cfg: &SweepConfig) -> Result<Table, CliError> {
    let (mu, p) = (cfg.real("mu")?, cfg.real("p")?);
    let rows = sweep_2d(&cfg.grid("q_E")?.values(), &cfg.grid("q_B")?.values(), |q_e, q_b| {
        let (e, b) = compete_two_level(&CompetitionParams::new(q_e, q_b, mu, p)?)?;
        Ok(vec![e, b])
    })?;
    Ok(Table {
        columns: columns(&["q_E", "q_B", "I_c_E", "I_c_B"]),
        rows,
    })
}

/// `(q, theta, I_s)`: Bob's information after Eve measures in a rotated basis.
pub fn run_fig3(cfg: &SweepConfig) -> Result<Table, CliError> {
    let rows = sweep_2d(&cfg.grid("q")?.values(), &cfg.grid("theta")?.values(), |q, theta| {
        Ok(vec![eve_bob_two_level(theta, q)?])
    })?;
    Ok(Table {
        columns: columns(&["q", "theta", "I_s"]),
        rows,
    })
}

/// Meter state, entropies and semiclassical information along `t`.
pub fn run_continuous(cfg: &SweepConfig) -> Result<Table, CliError> {
    let (kappa, chi_dot, r_dot) = (cfg.real("kappa")?, cfg.real("chi_dot")?, cfg.complex("r_dot")?);
    let rho = DensityMatrix::qubit(cfg.real("p")?, cfg.complex("rho12")?).map_err(setup)?;
    ContinuousLimitParams::new(kappa, chi_dot, r_dot, 0.0).map_err(setup)?;
    let conv = cfg.kappa_convention;
    let rows = sweep_1d(&cfg.grid("t")?.values(), |t| {
        let p = ContinuousLimitParams::new(kappa, chi_dot, r_dot, t)?;
        let meter = meter_dm_continuous(&rho, &p)?;
        let joint = joint_dm_continuous(&rho, &p)?;
        let m12 = meter.get(0, 1);
        Ok(vec![
            meter.get(0, 0).re,
            meter.get(1, 1).re,
            m12.re,
            m12.im,
            von_neumann_entropy(&joint)?,
            von_neumann_entropy(&meter)?,
            semiclassical_info_continuous(kappa, t, conv),
        ])
    })?;
    Ok(Table {
        columns: columns(&[
            "t", "meter_11", "meter_22", "meter_12_re", "meter_12_im", "S_joint", "S_meter", "I_s",
        ]),
        rows,
    })
}

/// Collective states, entropies and coherent information per repetition count.
pub fn run_repeat(cfg: &SweepConfig) -> Result<Table, CliError> {
    let meter = TwoLevelMeterParams::new(cfg.real("theta")?, 0.0, cfg.real("chi")?).map_err(setup)?;
    let r = entanglement_matrix(cfg.complex("r12")?);
    let q = meter.gram();
    let base = SoftMeasurement::new(r.clone(), q.clone()).map_err(setup)?;
    base.validate().into_result().map_err(setup)?;
    let rho = DensityMatrix::qubit(cfg.real("p")?, cfg.complex("rho12")?).map_err(setup)?;
    let ns: Vec<f64> = cfg.counts("n")?.iter().map(|&n| n as f64).collect();
    let rows = sweep_1d(&ns, |nf| {
        let n = nf as u32;
        let rm = RepeatedMeasurement::new(base.clone(), n)?;
        let psi = collective_representation(&q, n)?.psi;
        let joint = joint_dm_repeated(&rho, &rm)?;
        let meter_state = meter_dm_repeated(&rho, &q, n)?;
        let ic = coherent_info_soft(&rho, &gram_power(&r, n), &gram_power(&q, n))?;
        Ok(vec![
            psi[(0, 0)].re,
            psi[(0, 1)].re,
            psi[(0, 1)].im,
            psi[(1, 1)].re,
            von_neumann_entropy(&meter_state)?,
            von_neumann_entropy(&joint)?,
            ic,
        ])
    })?;
    Ok(Table {
        columns: columns(&["n", "psi_11", "psi_12_re", "psi_12_im", "psi_22", "S_meter", "S_joint", "I_c"]),
        rows,
    })
}

/// One qubit measurement: marginal and joint entropies, coherent information
/// by the closed matrix form and through the Kraus channel, and the meter's
/// Holevo information about the two basis states.
pub fn run_single(cfg: &SweepConfig) -> Result<Table, CliError> {
    let (theta, phi, chi, p) = (cfg.real("theta")?, cfg.real("phi")?, cfg.real("chi")?, cfg.real("p")?);
    let meter = TwoLevelMeterParams::new(theta, phi, chi).map_err(setup)?;
    let r = entanglement_matrix(cfg.complex("r12")?);
    let m = SoftMeasurement::from_meter_vectors(r, meter.meter_vectors()).map_err(setup)?;
    m.validate().into_result().map_err(setup)?;
    let rho = DensityMatrix::qubit(p, cfg.complex("rho12")?).map_err(setup)?;

    let eval = || -> Result<Vec<f64>, Error> {
        let joint = apply_soft(&m, &rho)?;
        let object = partial_trace(&joint, &[2, 2], &[0])?;
        let meter_state = partial_trace(&joint, &[2, 2], &[1])?;
        let ic = coherent_info_soft(&rho, m.r(), m.q())?;
        let ic_channel = coherent_info_channel(&soft_object_channel(&m)?, &rho)?;
        let is = holevo_info(&meter_ensemble(&StateEnsemble::basis(2), m.q())?)?;
        Ok(vec![
            theta,
            phi,
            chi,
            p,
            von_neumann_entropy(&object)?,
            von_neumann_entropy(&meter_state)?,
            von_neumann_entropy(&joint)?,
            ic,
            ic_channel,
            is,
        ])
    };
    Ok(Table {
        columns: columns(&[
            "theta",
            "phi",
            "chi",
            "p",
            "S_object",
            "S_meter",
            "S_joint",
            "I_c",
            "I_c_channel",
            "I_s",
        ]),
        rows: vec![eval().map_err(invariant)?],
    })
}

/// Semiclassical information of continuous measurement: closed form and the
/// Holevo quantity of the two collective meter states.
pub fn run_isweep(cfg: &SweepConfig) -> Result<Table, CliError> {
    let kappa = cfg.real("kappa")?;
    let conv = cfg.kappa_convention;
    let rate = match conv {
        KappaConvention::Gram => kappa,
        KappaConvention::Paper => 2.0 * kappa,
    };
    let rows = sweep_1d(&cfg.grid("t")?.values(), |t| {
        let p = ContinuousLimitParams::new(rate, 0.0, Complex64::new(0.0, 0.0), t)?;
        let s = continuous_q_sqrt(&p);
        let states = (0..2)
            .map(|i| DensityMatrix::pure(&s.column(i)))
            .collect::<Result<Vec<_>, _>>()?;
        let ens = StateEnsemble::indexed(vec![0.5, 0.5], states)?;
        Ok(vec![semiclassical_info_continuous(kappa, t, conv), holevo_info(&ens)?])
    })?;
    Ok(Table {
        columns: columns(&["t", "I_s", "I_s_ensemble"]),
        rows,
    })
}
