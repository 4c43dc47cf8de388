#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wvlab::{DensityMatrix, Observable, PureState};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn entry(rng: &mut impl Rng) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// `X X† / Tr` for a `dim x rank` matrix of uniform complex entries.
pub fn random_density(rng: &mut impl Rng, dim: usize, rank: usize) -> DensityMatrix {
    loop {
        let x = DMatrix::from_fn(dim, rank, |_, _| entry(rng));
        let m = &x * x.adjoint();
        let tr = m.trace().re;
        if tr > 1e-6 {
            return DensityMatrix::new(m.unscale(tr)).unwrap();
        }
    }
}

pub fn random_pure(rng: &mut impl Rng, dim: usize) -> PureState {
    loop {
        let v = DVector::from_fn(dim, |_, _| entry(rng));
        if v.norm() > 1e-6 {
            return PureState::normalized(v).unwrap();
        }
    }
}

pub fn random_hermitian(rng: &mut impl Rng, dim: usize) -> DMatrix<C64> {
    let x = DMatrix::from_fn(dim, dim, |_, _| entry(rng));
    (&x + x.adjoint()).scale(0.5)
}

pub fn random_observable(rng: &mut impl Rng, dim: usize) -> Observable {
    Observable::from_hermitian(&random_hermitian(rng, dim)).unwrap()
}

/// Orthonormal basis from the eigenvectors of a random Hermitian matrix.
pub fn random_basis(rng: &mut impl Rng, dim: usize) -> Vec<PureState> {
    random_observable(rng, dim)
        .eigenvectors()
        .iter()
        .map(|v| PureState::new(v.clone()).unwrap())
        .collect()
}

/// `n` evenly spaced points on `[a, b]`, endpoints included.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}
