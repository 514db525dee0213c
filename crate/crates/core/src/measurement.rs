//! Nondemolition measurement superoperators.
//!
//! A soft measurement maps an object state `ρ` on `H_A` to the joint
//! object–meter state
//!
//! ```text
//! ρ_AB = Σ_kl R_kl ρ_kl |k⟩⟨l| ⊗ |k̃⟩⟨l̃|,    ⟨k̃|l̃⟩ = Q_kl
//! ```
//!
//! where `R` is the entanglement (dephasing) matrix and `Q` the Gram matrix of
//! the meter states. `Q = I` gives the entangling measurement, `R = Q = I` the
//! projective one, and a single repeated meter state (`Q` all ones) leaves the
//! object's populations and the meter uncorrelated.
//!
//! Tracing out the meter leaves `R_kl·Q_lk·ρ_kl` on the object: the meter
//! overlap enters transposed, because `Tr |k̃⟩⟨l̃| = ⟨l̃|k̃⟩`. See
//! [`SoftMeasurement::object_dephasing`].

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matcore::{herm_eig, matrix_sqrt_psd, ComplexMatrix, DensityMatrix, ONE, TAU_HERM, TAU_PSD, ZERO};

/// Planck's constant in the generator units used here.
pub const HBAR: f64 = 1.0;

/// Tolerance on unit diagonals and `|Q_kl| ≤ 1`.
const TAU_UNIT: f64 = 1e-10;

/// One failed invariant of a measurement description.
#[derive(Debug, Clone, PartialEq)]
pub enum ValidationFailure {
    NotSquare { matrix: &'static str, rows: usize, cols: usize },
    ShapeMismatch { expected: usize, got: usize },
    NotHermitian { matrix: &'static str, deviation: f64 },
    NotPsd { matrix: &'static str, min_eigenvalue: f64 },
    DiagonalNotUnit { matrix: &'static str, index: usize, value: Complex64 },
    EntryExceedsOne { matrix: &'static str, row: usize, col: usize, modulus: f64 },
    BlockTraceNotUnit { index: usize, trace: Complex64 },
}

impl fmt::Display for ValidationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NotSquare { matrix, rows, cols } => write!(f, "{matrix} is {rows}x{cols}, not square"),
            Self::ShapeMismatch { expected, got } => {
                write!(f, "expected dimension {expected}, got {got}")
            }
            Self::NotHermitian { matrix, deviation } => {
                write!(f, "{matrix} not Hermitian (deviation {deviation:e})")
            }
            Self::NotPsd { matrix, min_eigenvalue } => {
                write!(f, "{matrix} not PSD (min eigenvalue {min_eigenvalue:e})")
            }
            Self::DiagonalNotUnit { matrix, index, value } => {
                write!(f, "{matrix}[{index},{index}] = {value}, expected 1")
            }
            Self::EntryExceedsOne { matrix, row, col, modulus } => {
                write!(f, "|{matrix}[{row},{col}]| = {modulus} > 1")
            }
            Self::BlockTraceNotUnit { index, trace } => {
                write!(f, "Tr ρ^M[{index},{index}] = {trace}, expected 1")
            }
        }
    }
}

/// Outcome of validating a measurement: every failed check, in order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub failures: Vec<ValidationFailure>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }

    /// Converts a failing report into [`Error::InvalidMeasurement`].
    pub fn into_result(self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidMeasurement(self.to_string()))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.failures.is_empty() {
            return write!(f, "valid");
        }
        for (i, failure) in self.failures.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{failure}")?;
        }
        Ok(())
    }
}

fn check_hermitian_psd(m: &ComplexMatrix, name: &'static str, out: &mut Vec<ValidationFailure>) {
    if !m.is_square() {
        out.push(ValidationFailure::NotSquare {
            matrix: name,
            rows: m.rows(),
            cols: m.cols(),
        });
        return;
    }
    let deviation = m.hermitian_deviation();
    if deviation > TAU_HERM {
        out.push(ValidationFailure::NotHermitian { matrix: name, deviation });
        return;
    }
    if let Ok(spec) = herm_eig(m) {
        if spec.min() < -TAU_PSD {
            out.push(ValidationFailure::NotPsd {
                matrix: name,
                min_eigenvalue: spec.min(),
            });
        }
    }
}

fn check_unit_diagonal(m: &ComplexMatrix, name: &'static str, out: &mut Vec<ValidationFailure>) {
    for (index, value) in m.diagonal().into_iter().enumerate() {
        if (value - ONE).norm() > TAU_UNIT {
            out.push(ValidationFailure::DiagonalNotUnit { matrix: name, index, value });
        }
    }
}

/// Checks that `r` is Hermitian, PSD and has unit diagonal.
pub fn validate_entanglement_matrix(r: &ComplexMatrix) -> ValidationReport {
    let mut failures = Vec::new();
    check_hermitian_psd(r, "R", &mut failures);
    if r.is_square() {
        check_unit_diagonal(r, "R", &mut failures);
    }
    ValidationReport { failures }
}

/// Checks that `q` is a Gram matrix of unit vectors.
pub fn validate_gram(q: &ComplexMatrix) -> ValidationReport {
    let mut failures = Vec::new();
    check_hermitian_psd(q, "Q", &mut failures);
    if q.is_square() {
        check_unit_diagonal(q, "Q", &mut failures);
        for row in 0..q.rows() {
            for col in 0..q.cols() {
                let modulus = q[(row, col)].norm();
                if modulus > 1.0 + TAU_UNIT {
                    failures.push(ValidationFailure::EntryExceedsOne {
                        matrix: "Q",
                        row,
                        col,
                        modulus,
                    });
                }
            }
        }
    }
    ValidationReport { failures }
}

/// Meter vectors realizing a Gram matrix: the columns of its principal root.
///
/// Returned vectors `v_k` satisfy `⟨v_k|v_l⟩ = Q_kl`; global phases are fixed
/// by the root being Hermitian PSD.
pub fn meter_states_from_gram(q: &ComplexMatrix) -> Result<Vec<Vec<Complex64>>> {
    let root = matrix_sqrt_psd(q)?;
    Ok((0..root.cols()).map(|j| root.column(j)).collect())
}

/// Gram matrix `G_kl = ⟨v_k|v_l⟩`.
pub fn gram_of(vectors: &[Vec<Complex64>]) -> ComplexMatrix {
    let n = vectors.len();
    ComplexMatrix::from_fn(n, n, |k, l| inner(&vectors[k], &vectors[l]))
}

pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Soft (fuzzy) nondemolition measurement of a `D`-level object.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftMeasurement {
    r: ComplexMatrix,
    q: ComplexMatrix,
    meter: Option<Vec<Vec<Complex64>>>,
}

impl SoftMeasurement {
    /// Measurement with the minimal `D`-dimensional meter synthesized from `q`.
    ///
    /// Only shapes are checked here; use [`validate`](Self::validate) for the
    /// physical invariants.
    pub fn new(r: ComplexMatrix, q: ComplexMatrix) -> Result<Self> {
        if !r.is_square() || !q.is_square() || r.rows() != q.rows() {
            return Err(Error::DimensionMismatch(format!(
                "R is {}x{}, Q is {}x{}",
                r.rows(),
                r.cols(),
                q.rows(),
                q.cols()
            )));
        }
        Ok(Self { r, q, meter: None })
    }

    /// Measurement with explicit meter vectors (any common dimension).
    pub fn from_meter_vectors(r: ComplexMatrix, vectors: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim = vectors.first().map_or(0, Vec::len);
        if vectors.iter().any(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch("meter vectors differ in length".into()));
        }
        let q = gram_of(&vectors);
        let mut m = Self::new(r, q)?;
        m.meter = Some(vectors);
        Ok(m)
    }

    /// `R = Q = I`.
    pub fn projective(dim: usize) -> Self {
        Self {
            r: ComplexMatrix::identity(dim),
            q: ComplexMatrix::identity(dim),
            meter: None,
        }
    }

    /// Entangling measurement: orthogonal meter states, `Q = I`.
    pub fn entangling(r: ComplexMatrix) -> Result<Self> {
        let d = r.rows();
        Self::new(r, ComplexMatrix::identity(d))
    }

    pub fn dim(&self) -> usize {
        self.r.rows()
    }

    pub fn r(&self) -> &ComplexMatrix {
        &self.r
    }

    pub fn q(&self) -> &ComplexMatrix {
        &self.q
    }

    pub fn meter_dim(&self) -> usize {
        self.meter.as_ref().map_or(self.dim(), |v| v.first().map_or(0, Vec::len))
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = validate_entanglement_matrix(&self.r);
        report.failures.extend(validate_gram(&self.q).failures);
        report
    }

    /// Meter vectors `|k̃⟩`, explicit or synthesized from `Q`.
    pub fn meter_vectors(&self) -> Result<Vec<Vec<Complex64>>> {
        match &self.meter {
            Some(v) => Ok(v.clone()),
            None => meter_states_from_gram(&self.q),
        }
    }

    /// Factor multiplying `ρ_kl` once the meter is traced out: `R_kl·Q_lk`.
    pub fn object_dephasing(&self) -> ComplexMatrix {
        object_dephasing(&self.r, &self.q)
    }

    /// The superoperator as a linear map on arbitrary `D×D` operators.
    pub fn map_operator(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let d = self.dim();
        if x.rows() != d || x.cols() != d {
            return Err(Error::DimensionMismatch(format!(
                "measurement on {d} levels applied to {}x{} operator",
                x.rows(),
                x.cols()
            )));
        }
        let vecs = self.meter_vectors()?;
        let m = self.meter_dim();
        Ok(ComplexMatrix::from_fn(d * m, d * m, |row, col| {
            let (k, a) = (row / m, row % m);
            let (l, b) = (col / m, col % m);
            self.r[(k, l)] * x[(k, l)] * vecs[k][a] * vecs[l][b].conj()
        }))
    }
}

/// `R_kl·Q_lk`: the object-channel factor left after tracing out the meter.
pub fn object_dephasing(r: &ComplexMatrix, q: &ComplexMatrix) -> ComplexMatrix {
    r.hadamard(&q.transpose())
}

/// Joint object ⊗ meter state after a soft measurement (object index outer).
pub fn apply_soft(m: &SoftMeasurement, rho_a: &DensityMatrix) -> Result<DensityMatrix> {
    if rho_a.dim() != m.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state of dimension {} for a {}-level measurement",
            rho_a.dim(),
            m.dim()
        )));
    }
    m.validate().into_result()?;
    DensityMatrix::new(m.map_operator(rho_a.matrix())?)
}

/// Entangling measurement: orthogonal meter states `|k⟩`, coherences `R_kl`.
pub fn apply_entangling(r: &ComplexMatrix, rho_a: &DensityMatrix) -> Result<DensityMatrix> {
    apply_soft(&SoftMeasurement::entangling(r.clone())?, rho_a)
}

/// General nondemolition measurement described by meter blocks `ρ^M_kl`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralMeasurement {
    dim: usize,
    meter_dim: usize,
    blocks: Vec<ComplexMatrix>,
}

impl GeneralMeasurement {
    /// `blocks[k*D + l]` holds `ρ^M_kl`.
    pub fn new(dim: usize, meter_dim: usize, blocks: Vec<ComplexMatrix>) -> Result<Self> {
        if blocks.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "{dim}-level measurement needs {} blocks, got {}",
                dim * dim,
                blocks.len()
            )));
        }
        if blocks.iter().any(|b| b.rows() != meter_dim || b.cols() != meter_dim) {
            return Err(Error::DimensionMismatch(format!(
                "every block must be {meter_dim}x{meter_dim}"
            )));
        }
        Ok(Self { dim, meter_dim, blocks })
    }

    /// `ρ^M_kl = ρ_0` for all `k, l`: no measurement.
    pub fn trivial(dim: usize, meter_state: &DensityMatrix) -> Self {
        Self {
            dim,
            meter_dim: meter_state.dim(),
            blocks: vec![meter_state.matrix().clone(); dim * dim],
        }
    }

    /// `ρ^M_kl = R_kl |k⟩⟨l|`.
    pub fn from_entangling(r: &ComplexMatrix) -> Self {
        let d = r.rows();
        let blocks = (0..d * d)
            .map(|idx| {
                let (k, l) = (idx / d, idx % d);
                let mut b = ComplexMatrix::zeros(d, d);
                b[(k, l)] = r[(k, l)];
                b
            })
            .collect();
        Self {
            dim: d,
            meter_dim: d,
            blocks,
        }
    }

    /// `ρ^M_kl = R_kl |k̃⟩⟨l̃|`.
    pub fn from_soft(m: &SoftMeasurement) -> Result<Self> {
        let d = m.dim();
        let vecs = m.meter_vectors()?;
        let blocks = (0..d * d)
            .map(|idx| {
                let (k, l) = (idx / d, idx % d);
                ComplexMatrix::outer(&vecs[k], &vecs[l]).scale(m.r()[(k, l)])
            })
            .collect();
        Self::new(d, m.meter_dim(), blocks)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn meter_dim(&self) -> usize {
        self.meter_dim
    }

    pub fn block(&self, k: usize, l: usize) -> &ComplexMatrix {
        &self.blocks[k * self.dim + l]
    }

    /// `Σ_kl |k⟩⟨l| ⊗ ρ^M_kl` as a `D·m` square matrix.
    pub fn block_operator(&self) -> ComplexMatrix {
        let (d, m) = (self.dim, self.meter_dim);
        ComplexMatrix::from_fn(d * m, d * m, |row, col| {
            self.block(row / m, col / m)[(row % m, col % m)]
        })
    }

    pub fn validate(&self) -> ValidationReport {
        let mut failures = Vec::new();
        check_hermitian_psd(&self.block_operator(), "block operator", &mut failures);
        for k in 0..self.dim {
            let trace = self.block(k, k).trace();
            if (trace - ONE).norm() > TAU_UNIT {
                failures.push(ValidationFailure::BlockTraceNotUnit { index: k, trace });
            }
        }
        ValidationReport { failures }
    }
}

/// `ρ_AB = Σ_kl ρ_kl |k⟩⟨l| ⊗ ρ^M_kl`.
pub fn apply_general(g: &GeneralMeasurement, rho_a: &DensityMatrix) -> Result<DensityMatrix> {
    if rho_a.dim() != g.dim {
        return Err(Error::DimensionMismatch(format!(
            "state of dimension {} for a {}-level measurement",
            rho_a.dim(),
            g.dim
        )));
    }
    g.validate().into_result()?;
    let (d, m) = (g.dim, g.meter_dim);
    DensityMatrix::new(ComplexMatrix::from_fn(d * m, d * m, |row, col| {
        let (k, l) = (row / m, col / m);
        rho_a.get(k, l) * g.block(k, l)[(row % m, col % m)]
    }))
}

/// Whether replacing both the object and meter output bases by non-orthogonal
/// sets (Gram matrices `q_object`, `q_meter`) keeps the map trace preserving:
/// `R_kk = 1` and `R_kl·Q^A_lk·Q^B_lk = 0` for every `k ≠ l`.
pub fn preserves_normalization(
    r: &ComplexMatrix,
    q_object: &ComplexMatrix,
    q_meter: &ComplexMatrix,
    tol: f64,
) -> bool {
    let d = r.rows();
    (0..d).all(|k| {
        (0..d).all(|l| {
            let w = r[(k, l)] * q_object[(l, k)] * q_meter[(l, k)];
            if k == l {
                (w - ONE).norm() <= tol
            } else {
                w.norm() <= tol
            }
        })
    })
}

/// Two-level meter state pair: `|0̃⟩ = (1, 0)`,
/// `|1̃⟩ = e^{iχ}(cos θ/2, e^{iφ} sin θ/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelMeterParams {
    pub theta: f64,
    pub phi: f64,
    pub chi: f64,
}

impl TwoLevelMeterParams {
    pub fn new(theta: f64, phi: f64, chi: f64) -> Result<Self> {
        if !(0.0..=std::f64::consts::PI).contains(&theta) || !phi.is_finite() || !chi.is_finite() {
            return Err(Error::InvalidParams(format!(
                "theta must lie in [0, π] (got {theta}); phi, chi finite"
            )));
        }
        Ok(Self { theta, phi, chi })
    }

    /// `Q_12 = e^{iχ} cos(θ/2)`; independent of `φ`.
    pub fn overlap(&self) -> Complex64 {
        Complex64::from_polar((self.theta / 2.0).cos(), self.chi)
    }

    pub fn gram(&self) -> ComplexMatrix {
        let o = self.overlap();
        ComplexMatrix::from_rows(&[vec![ONE, o], vec![o.conj(), ONE]])
    }

    pub fn meter_vectors(&self) -> Vec<Vec<Complex64>> {
        let (s, c) = (self.theta / 2.0).sin_cos();
        let e_chi = Complex64::from_polar(1.0, self.chi);
        vec![
            vec![ONE, ZERO],
            vec![e_chi * c, e_chi * Complex64::from_polar(s, self.phi)],
        ]
    }
}

/// Angular rates of the two-level meter angles during one infinitesimal step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorRates {
    pub theta_dot: f64,
    pub chi_dot: f64,
}

impl GeneratorRates {
    pub fn new(theta_dot: f64, chi_dot: f64) -> Result<Self> {
        if !theta_dot.is_finite() || !chi_dot.is_finite() {
            return Err(Error::InvalidParams("generator rates must be finite".into()));
        }
        Ok(Self { theta_dot, chi_dot })
    }
}

/// Two-level meter generators `(ε_B(0), ε_B(1))`:
/// `ε_B(0) = 0`, `ε_B(1) = ħ [[−2χ̇, iθ̇], [−iθ̇, 0]]`.
pub fn generator_two_level(rates: GeneratorRates) -> (ComplexMatrix, ComplexMatrix) {
    let eps1 = ComplexMatrix::from_rows(&[
        vec![Complex64::new(-2.0 * rates.chi_dot, 0.0), Complex64::new(0.0, rates.theta_dot)],
        vec![Complex64::new(0.0, -rates.theta_dot), ZERO],
    ])
    .scale(Complex64::new(HBAR, 0.0));
    (ComplexMatrix::zeros(2, 2), eps1)
}

/// Meter generators from per-step displacements `|δk⟩ = |k̃⟩ − |0⟩`:
///
/// `ε_B(k) = (ħ/Δt)·i·(Σ_l ⟨l|δk⟩ |l⟩⟨0| − h.c.)`,
///
/// with every element outside row and column 0 set to zero.
pub fn generator_general(delta_states: &[Vec<Complex64>], dt: f64) -> Result<Vec<ComplexMatrix>> {
    if dt <= 0.0 || !dt.is_finite() {
        return Err(Error::ZeroDt);
    }
    let m = delta_states.first().map_or(0, Vec::len);
    if m == 0 || delta_states.iter().any(|v| v.len() != m) {
        return Err(Error::DimensionMismatch(
            "displacement vectors must share a nonzero dimension".into(),
        ));
    }
    let pref = Complex64::new(0.0, HBAR / dt);
    Ok(delta_states
        .iter()
        .map(|delta| {
            let mut a = ComplexMatrix::zeros(m, m);
            for (l, &z) in delta.iter().enumerate() {
                a[(l, 0)] = z;
            }
            (&a - &a.adjoint()).scale(pref)
        })
        .collect())
}
