use crate::error::{Error, Result};
use crate::matcore::{herm_eig, partial_trace_matrix, ComplexMatrix, DensityMatrix, TAU_PSD, TAU_RECON};
use crate::measurement::SoftMeasurement;

/// Eigenvalues of a Choi matrix at or below this are dropped when extracting
/// Kraus operators.
pub const KRAUS_RANK_TOL: f64 = 1e-12;

/// Completely positive trace-preserving map in Kraus form `ρ ↦ Σ K ρ K†`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    in_dim: usize,
    out_dim: usize,
    kraus_ops: Vec<ComplexMatrix>,
}

impl KrausChannel {
    pub fn new(in_dim: usize, out_dim: usize, kraus_ops: Vec<ComplexMatrix>) -> Result<Self> {
        let ch = Self {
            in_dim,
            out_dim,
            kraus_ops,
        };
        ch.validate()?;
        Ok(ch)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            in_dim: dim,
            out_dim: dim,
            kraus_ops: vec![ComplexMatrix::identity(dim)],
        }
    }

    /// Checks operator shapes and `Σ K†K = I`.
    pub fn validate(&self) -> Result<()> {
        if self.kraus_ops.is_empty() {
            return Err(Error::InvalidChannel("no Kraus operators".into()));
        }
        if let Some(k) = self
            .kraus_ops
            .iter()
            .find(|k| k.rows() != self.out_dim || k.cols() != self.in_dim)
        {
            return Err(Error::InvalidChannel(format!(
                "Kraus operator is {}x{}, expected {}x{}",
                k.rows(),
                k.cols(),
                self.out_dim,
                self.in_dim
            )));
        }
        let sum = self.completeness();
        let dev = sum.max_abs_diff(&ComplexMatrix::identity(self.in_dim));
        if dev > TAU_RECON {
            return Err(Error::InvalidChannel(format!(
                "not trace preserving (max |ΣK†K − I| = {dev:e})"
            )));
        }
        Ok(())
    }

    /// `Σ K†K`.
    pub fn completeness(&self) -> ComplexMatrix {
        self.kraus_ops.iter().fold(ComplexMatrix::zeros(self.in_dim, self.in_dim), |acc, k| {
            &acc + &k.adjoint().matmul(k)
        })
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn kraus_ops(&self) -> &[ComplexMatrix] {
        &self.kraus_ops
    }

    /// `Σ K X K†` on an arbitrary `in_dim × in_dim` operator.
    pub fn apply_operator(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.rows() != self.in_dim || x.cols() != self.in_dim {
            return Err(Error::DimensionMismatch(format!(
                "channel on dimension {} applied to {}x{} operator",
                self.in_dim,
                x.rows(),
                x.cols()
            )));
        }
        Ok(self
            .kraus_ops
            .iter()
            .fold(ComplexMatrix::zeros(self.out_dim, self.out_dim), |acc, k| {
                &acc + &x.conjugate_by(k)
            }))
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::new(self.apply_operator(rho.matrix())?)
    }

    /// Kraus form of a map given by its Choi matrix
    /// `C = Σ_jl |j⟩⟨l| ⊗ N(|j⟩⟨l|)` (input index outer).
    pub fn from_choi(choi: &ComplexMatrix, in_dim: usize, out_dim: usize) -> Result<Self> {
        if choi.rows() != in_dim * out_dim || !choi.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "Choi matrix is {}x{}, expected {n}x{n}",
                choi.rows(),
                choi.cols(),
                n = in_dim * out_dim
            )));
        }
        let spec = herm_eig(choi)?;
        if spec.min() < -TAU_PSD {
            return Err(Error::InvalidChannel(format!(
                "Choi matrix is not PSD (min eigenvalue {:e})",
                spec.min()
            )));
        }
        let kraus_ops = spec
            .eigenvalues
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &lam)| lam > KRAUS_RANK_TOL)
            .map(|(a, &lam)| {
                let w = lam.sqrt();
                ComplexMatrix::from_fn(out_dim, in_dim, |i, j| spec.eigenvectors[(j * out_dim + i, a)] * w)
            })
            .collect();
        Self::new(in_dim, out_dim, kraus_ops)
    }

    /// Kraus form of a linear map evaluated on the matrix units `|j⟩⟨l|`.
    pub fn from_linear_map(
        in_dim: usize,
        out_dim: usize,
        map: impl Fn(&ComplexMatrix) -> Result<ComplexMatrix>,
    ) -> Result<Self> {
        let n = in_dim * out_dim;
        let mut choi = ComplexMatrix::zeros(n, n);
        for j in 0..in_dim {
            for l in 0..in_dim {
                let mut unit = ComplexMatrix::zeros(in_dim, in_dim);
                unit[(j, l)] = crate::matcore::ONE;
                let image = map(&unit)?;
                for i in 0..out_dim {
                    for m in 0..out_dim {
                        choi[(j * out_dim + i, l * out_dim + m)] = image[(i, m)];
                    }
                }
            }
        }
        Self::from_choi(&choi, in_dim, out_dim)
    }
}

/// Object-to-object channel of a soft measurement: the measurement followed
/// by discarding the meter.
pub fn soft_object_channel(m: &SoftMeasurement) -> Result<KrausChannel> {
    m.validate().into_result()?;
    let (d, md) = (m.dim(), m.meter_dim());
    KrausChannel::from_linear_map(d, d, |x| partial_trace_matrix(&m.map_operator(x)?, &[d, md], &[0]))
}
