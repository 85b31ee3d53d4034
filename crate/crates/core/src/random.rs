//! Random matrices and states for property checks and demos.
//!
//! All samplers take an explicit RNG so results are reproducible from a seed.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linquant::{c, hermitian_part, r, trace, ComplexMatrix, ComplexVector, DensityOperator};

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        c(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    })
}

pub fn real_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
}

pub fn vector<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexVector {
    ComplexVector::from_fn(d, |_, _| c(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal)))
}

pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    hermitian_part(&matrix(rng, d, d))
}

/// Haar-distributed unitary via QR of a Ginibre matrix with phase correction.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    let qr = matrix(rng, d, d).qr();
    let (mut q, rr) = qr.unpack();
    for j in 0..d {
        let diag = rr[(j, j)];
        let phase = if diag.norm() > 0.0 { diag / r(diag.norm()) } else { r(1.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Positive semidefinite matrix `G G^dagger` of full rank (almost surely).
pub fn positive<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    let g = matrix(rng, d, d);
    &g * g.adjoint()
}

/// Random mixed state `G G^dagger / trace`.
pub fn density<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DensityOperator {
    let p = positive(rng, d);
    let t = trace(&p);
    DensityOperator::from_unchecked(hermitian_part(&(p / t)))
}

pub fn pure_state<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DensityOperator {
    DensityOperator::pure(&vector(rng, d)).expect("Gaussian vector is nonzero")
}
