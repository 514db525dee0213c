//! Seeded random instances shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

use softmeas::matcore::{ComplexMatrix, DensityMatrix, ONE};
use softmeas::measurement::{gram_of, SoftMeasurement};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut StdRng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn unit_vector(rng: &mut StdRng, dim: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..dim).map(|_| gaussian(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Density matrix `G G† / Tr` from a `dim × rank` Ginibre matrix.
pub fn density(rng: &mut StdRng, dim: usize, rank: usize) -> DensityMatrix {
    let g = ComplexMatrix::from_fn(dim, rank, |_, _| gaussian(rng));
    let m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    DensityMatrix::new(m.scale(Complex64::new(1.0 / tr, 0.0))).expect("Ginibre state is valid")
}

/// Full rank, pure or in between, chosen at random.
pub fn any_density(rng: &mut StdRng, dim: usize) -> DensityMatrix {
    let rank = rng.gen_range(1..=dim);
    density(rng, dim, rank)
}

/// `dim` random unit vectors in a `meter_dim`-dimensional space.
pub fn meter_vectors(rng: &mut StdRng, dim: usize, meter_dim: usize) -> Vec<Vec<Complex64>> {
    (0..dim).map(|_| unit_vector(rng, meter_dim)).collect()
}

/// Random valid entanglement matrix with diagonal exactly 1.
///
/// Built as the Gram matrix of random unit vectors, occasionally replaced by
/// the fully coherent (all ones) or fully dephasing (identity) extremes.
pub fn entanglement(rng: &mut StdRng, dim: usize) -> ComplexMatrix {
    match rng.gen_range(0..10) {
        0 => ComplexMatrix::ones(dim),
        1 => ComplexMatrix::identity(dim),
        _ => {
            let span = rng.gen_range(1..=dim);
            let mut r = gram_of(&meter_vectors(rng, dim, span));
            for k in 0..dim {
                r[(k, k)] = ONE;
            }
            r.hermitian_part()
        }
    }
}

/// Random soft measurement with an explicit meter of random dimension.
pub fn soft_measurement(rng: &mut StdRng, dim: usize) -> SoftMeasurement {
    let meter_dim = rng.gen_range(1..=dim + 1);
    let r = entanglement(rng, dim);
    SoftMeasurement::from_meter_vectors(r, meter_vectors(rng, dim, meter_dim)).expect("shapes agree")
}

/// Haar-like unitary from Gram–Schmidt on Gaussian columns.
pub fn unitary(rng: &mut StdRng, dim: usize) -> ComplexMatrix {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<Complex64> = (0..dim).map(|_| gaussian(rng)).collect();
        for c in &cols {
            let proj: Complex64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(c) {
                *x -= proj * y;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            cols.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    ComplexMatrix::from_columns(&cols)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &ComplexMatrix) -> f64 {
    softmeas::matcore::herm_eig(m).expect("Hermitian").min()
}

/// Gram matrix of random unit vectors with its diagonal set to exactly 1.
pub fn gram(rng: &mut StdRng, dim: usize, meter_dim: usize) -> ComplexMatrix {
    let mut q = gram_of(&meter_vectors(rng, dim, meter_dim));
    for k in 0..dim {
        q[(k, k)] = ONE;
    }
    q
}
