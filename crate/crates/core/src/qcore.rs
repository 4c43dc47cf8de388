//! Finite-dimensional states, observables and the two distance measures
//! (trace distance and Uhlmann fidelity).
//!
//! Every type validates its invariants at construction and is immutable
//! afterwards, so all functions here are pure and thread-safe.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Tolerance for Hermiticity, unit trace, normalization and orthonormality.
pub const STRUCTURE_TOL: f64 = 1e-12;
/// Eigenvalues down to `-POSITIVITY_TOL` are accepted as zero.
pub const POSITIVITY_TOL: f64 = 1e-10;

/// Eigenvalues of a Hermitian matrix in ascending order.
///
/// The input is symmetrized first so round-off asymmetry cannot leak into
/// the spectrum.
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let h = hermitian_part(m);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Square root of a positive semidefinite Hermitian matrix. Eigenvalues at
/// round-off level relative to the largest one are treated as zero.
pub fn psd_sqrt(m: &DMatrix<C64>) -> DMatrix<C64> {
    let eig = SymmetricEigen::new(hermitian_part(m));
    let top = eig.eigenvalues.iter().fold(0.0f64, |x, &y| x.max(y.abs()));
    let floor = 64.0 * f64::EPSILON * top * m.nrows() as f64;
    let roots = eig
        .eigenvalues
        .map(|l| C64::new(if l > floor { l.sqrt() } else { 0.0 }, 0.0));
    let v = &eig.eigenvectors;
    v * DMatrix::from_diagonal(&roots) * v.adjoint()
}

pub(crate) fn hermitian_part(m: &DMatrix<C64>) -> DMatrix<C64> {
    (m + m.adjoint()).scale(0.5)
}

fn max_hermitian_deviation(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// A normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: DVector<C64>,
}

impl PureState {
    /// Wraps a vector that must already have unit norm.
    pub fn new(amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::EmptyDimension);
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > STRUCTURE_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes an arbitrary non-zero vector.
    pub fn normalized(amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::EmptyDimension);
        }
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self {
            amplitudes: amplitudes.unscale(norm),
        })
    }

    /// Computational basis vector `|k>` in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyDimension);
        }
        if k >= dim {
            return Err(Error::IndexOutOfRange { index: k, dim });
        }
        let mut v = DVector::zeros(dim);
        v[k] = C64::new(1.0, 0.0);
        Ok(Self { amplitudes: v })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    /// `<self|other>`
    pub fn inner(&self, other: &PureState) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// `<self|v>` for a raw vector.
    pub fn overlap_with(&self, v: &DVector<C64>) -> C64 {
        self.amplitudes.dotc(v)
    }

    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix {
            elements: &self.amplitudes * self.amplitudes.adjoint(),
        }
    }

    /// The state orthogonal to a qubit state, `(-b*, a*)`.
    pub fn qubit_orthogonal(&self) -> Result<PureState> {
        if self.dim() != 2 {
            return Err(Error::NotQubit(self.dim()));
        }
        let a = self.amplitudes[0];
        let b = self.amplitudes[1];
        Ok(PureState {
            amplitudes: DVector::from_vec(vec![-b.conj(), a.conj()]),
        })
    }
}

/// A Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    elements: DMatrix<C64>,
}

impl DensityMatrix {
    pub fn new(elements: DMatrix<C64>) -> Result<Self> {
        let (r, c) = elements.shape();
        if r != c {
            return Err(Error::NotSquare(r, c));
        }
        if r == 0 {
            return Err(Error::EmptyDimension);
        }
        let dev = max_hermitian_deviation(&elements);
        if dev > STRUCTURE_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let tr = elements.trace();
        if (tr.re - 1.0).abs() > STRUCTURE_TOL || tr.im.abs() > STRUCTURE_TOL {
            return Err(Error::InvalidTrace(tr.re));
        }
        let elements = hermitian_part(&elements);
        let min = hermitian_eigenvalues(&elements)[0];
        if min < -POSITIVITY_TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(Self { elements })
    }

    /// Builds from a real matrix, e.g. the spin-1/2 closed forms.
    pub fn from_real(elements: DMatrix<f64>) -> Result<Self> {
        Self::new(elements.map(|x| C64::new(x, 0.0)))
    }

    pub fn from_pure(state: &PureState) -> Self {
        state.projector()
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyDimension);
        }
        Ok(Self {
            elements: DMatrix::identity(dim, dim).scale(1.0 / dim as f64),
        })
    }

    /// Convex mixture `sum_k w_k |psi_k><psi_k|`. Weights must be
    /// non-negative and sum to one.
    pub fn mixture(weights: &[f64], states: &[PureState]) -> Result<Self> {
        let dim = states.first().ok_or(Error::EmptyDimension)?.dim();
        if weights.len() != states.len() {
            return Err(Error::DimensionMismatch {
                expected: states.len(),
                found: weights.len(),
            });
        }
        let mut m = DMatrix::zeros(dim, dim);
        for (w, s) in weights.iter().zip(states) {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: s.dim(),
                });
            }
            m += (s.amplitudes() * s.amplitudes().adjoint()).scale(*w);
        }
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.elements.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.elements
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.elements
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.elements)
    }

    /// `Tr(rho^2)`
    pub fn purity(&self) -> f64 {
        (&self.elements * &self.elements).trace().re
    }

    /// `<psi|rho|psi>`
    pub fn population(&self, psi: &PureState) -> f64 {
        psi.amplitudes()
            .dotc(&(&self.elements * psi.amplitudes()))
            .re
    }

    /// `Tr(A rho)`
    pub fn expectation(&self, a: &Observable) -> Result<f64> {
        check_dim(self.dim(), a.dim())?;
        Ok(a.eigenvalues
            .iter()
            .zip(&a.eigenvectors)
            .map(|(val, v)| val * v.dotc(&(&self.elements * v)).re)
            .sum())
    }

    /// Matrix elements `<chi_nu|rho|chi_mu>` in the eigenbasis of `a`.
    pub fn in_eigenbasis(&self, a: &Observable) -> Result<DMatrix<C64>> {
        check_dim(self.dim(), a.dim())?;
        let v = a.basis_matrix();
        Ok(v.adjoint() * &self.elements * v)
    }

    pub fn to_bloch(&self) -> Result<BlochVector> {
        if self.dim() != 2 {
            return Err(Error::NotQubit(self.dim()));
        }
        let m = &self.elements;
        let off = m[(0, 1)];
        BlochVector::new([2.0 * off.re, -2.0 * off.im, (m[(0, 0)] - m[(1, 1)]).re])
    }

    pub fn from_bloch(r: &BlochVector) -> Self {
        let [x, y, z] = r.components();
        let elements = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(0.5 * (1.0 + z), 0.0),
                C64::new(0.5 * x, -0.5 * y),
                C64::new(0.5 * x, 0.5 * y),
                C64::new(0.5 * (1.0 - z), 0.0),
            ],
        );
        Self { elements }
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        Err(Error::DimensionMismatch { expected, found })
    } else {
        Ok(())
    }
}

/// Hermitian operator stored by its spectral decomposition
/// `A = sum_nu a_nu |chi_nu><chi_nu|`.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    eigenvalues: Vec<f64>,
    eigenvectors: Vec<DVector<C64>>,
}

impl Observable {
    pub fn new(eigenvalues: Vec<f64>, eigenvectors: Vec<DVector<C64>>) -> Result<Self> {
        let dim = eigenvectors.first().ok_or(Error::EmptyDimension)?.len();
        if dim == 0 {
            return Err(Error::EmptyDimension);
        }
        if eigenvectors.len() != dim {
            return Err(Error::IncompleteBasis {
                expected: dim,
                found: eigenvectors.len(),
            });
        }
        check_dim(dim, eigenvalues.len())?;
        if let Some(bad) = eigenvalues.iter().find(|a| !a.is_finite()) {
            return Err(Error::OutOfRange {
                name: "eigenvalue",
                value: *bad,
                range: "finite reals",
            });
        }
        let mut dev = 0.0f64;
        for (i, u) in eigenvectors.iter().enumerate() {
            check_dim(dim, u.len())?;
            for (j, v) in eigenvectors.iter().enumerate().skip(i) {
                let target = if i == j { 1.0 } else { 0.0 };
                dev = dev.max((u.dotc(v) - C64::new(target, 0.0)).norm());
            }
        }
        if dev > STRUCTURE_TOL {
            return Err(Error::NotOrthonormal(dev));
        }
        Ok(Self {
            eigenvalues,
            eigenvectors,
        })
    }

    /// Diagonalizes a Hermitian matrix. Eigenvalues come out ascending.
    pub fn from_hermitian(m: &DMatrix<C64>) -> Result<Self> {
        let (r, c) = m.shape();
        if r != c {
            return Err(Error::NotSquare(r, c));
        }
        let dev = max_hermitian_deviation(m);
        if dev > STRUCTURE_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let eig = SymmetricEigen::new(hermitian_part(m));
        let mut order: Vec<usize> = (0..r).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let eigenvectors = order
            .iter()
            .map(|&k| eig.eigenvectors.column(k).into_owned())
            .collect();
        Self::new(eigenvalues, eigenvectors)
    }

    /// Diagonal operator in the computational basis.
    pub fn diagonal(eigenvalues: Vec<f64>) -> Result<Self> {
        let dim = eigenvalues.len();
        let vectors = (0..dim)
            .map(|k| {
                let mut v = DVector::zeros(dim);
                v[k] = C64::new(1.0, 0.0);
                v
            })
            .collect();
        Self::new(eigenvalues, vectors)
    }

    pub fn dim(&self) -> usize {
        self.eigenvectors.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &[DVector<C64>] {
        &self.eigenvectors
    }

    /// Unitary whose columns are the eigenvectors.
    pub fn basis_matrix(&self) -> DMatrix<C64> {
        DMatrix::from_columns(&self.eigenvectors)
    }

    /// `sum_nu a_nu |chi_nu><chi_nu|`
    pub fn matrix(&self) -> DMatrix<C64> {
        let v = self.basis_matrix();
        let d = DMatrix::from_diagonal(&DVector::from_iterator(
            self.dim(),
            self.eigenvalues.iter().map(|&a| C64::new(a, 0.0)),
        ));
        &v * d * v.adjoint()
    }

    /// `<psi|chi_nu>` for every eigenvector.
    pub fn overlaps(&self, psi: &PureState) -> Result<Vec<C64>> {
        check_dim(self.dim(), psi.dim())?;
        Ok(self
            .eigenvectors
            .iter()
            .map(|chi| psi.overlap_with(chi))
            .collect())
    }
}

/// Bloch vector of a qubit state, `rho = (1 + r.sigma)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    r: [f64; 3],
}

impl BlochVector {
    pub fn new(r: [f64; 3]) -> Result<Self> {
        let len = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(len <= 1.0 + STRUCTURE_TOL) {
            return Err(Error::BlochOutsideBall(len));
        }
        Ok(Self { r })
    }

    pub fn components(&self) -> [f64; 3] {
        self.r
    }

    pub fn norm_squared(&self) -> f64 {
        self.r.iter().map(|x| x * x).sum()
    }
}

/// `D(a, b) = Tr|a - b| / 2`, from the eigenvalues of the Hermitian
/// difference.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    check_dim(a.dim(), b.dim())?;
    let diff = a.matrix() - b.matrix();
    let d = 0.5 * hermitian_eigenvalues(&diff).iter().map(|l| l.abs()).sum::<f64>();
    Ok(d.min(1.0))
}

/// Uhlmann fidelity `Tr sqrt(sqrt(a) b sqrt(a))` (square-root convention),
/// evaluated as the sum of singular values of `sqrt(a) sqrt(b)`.
///
/// The pointer module works with the squared, overlap convention
/// `<phi|sigma|phi>` instead; the two are not interchangeable.
pub fn uhlmann_fidelity(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    check_dim(a.dim(), b.dim())?;
    let product = psd_sqrt(a.matrix()) * psd_sqrt(b.matrix());
    let f: f64 = product.singular_values().iter().sum();
    Ok(f.clamp(0.0, 1.0))
}

/// Optimal success probability `(1 + D)/2` for telling two equiprobable
/// states apart, given their trace distance.
pub fn identification_probability(d: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&d) {
        return Err(Error::OutOfRange {
            name: "trace distance",
            value: d,
            range: "[0, 1]",
        });
    }
    Ok(0.5 * (1.0 + d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Cyclic Jacobi on the real symmetric embedding `[[Re, -Im], [Im, Re]]`;
    /// every eigenvalue of the complex matrix appears twice.
    fn jacobi_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
        let n = m.nrows();
        let mut a = vec![vec![0.0; 2 * n]; 2 * n];
        for i in 0..n {
            for j in 0..n {
                a[i][j] = m[(i, j)].re;
                a[i + n][j + n] = m[(i, j)].re;
                a[i][j + n] = -m[(i, j)].im;
                a[i + n][j] = m[(i, j)].im;
            }
        }
        let size = 2 * n;
        for _ in 0..100 {
            let off: f64 = (0..size)
                .flat_map(|i| (0..size).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[i][j] * a[i][j])
                .sum();
            if off < 1e-30 {
                break;
            }
            for p in 0..size {
                for q in p + 1..size {
                    if a[p][q].abs() < 1e-300 {
                        continue;
                    }
                    let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let cs = 1.0 / (t * t + 1.0).sqrt();
                    let sn = t * cs;
                    for k in 0..size {
                        let akp = a[k][p];
                        let akq = a[k][q];
                        a[k][p] = cs * akp - sn * akq;
                        a[k][q] = sn * akp + cs * akq;
                    }
                    for k in 0..size {
                        let apk = a[p][k];
                        let aqk = a[q][k];
                        a[p][k] = cs * apk - sn * aqk;
                        a[q][k] = sn * apk + cs * aqk;
                    }
                }
            }
        }
        let mut ev: Vec<f64> = (0..size).map(|i| a[i][i]).collect();
        ev.sort_by(|x, y| x.total_cmp(y));
        ev.iter().step_by(2).copied().collect()
    }

    fn sample_density_3() -> (DensityMatrix, DensityMatrix) {
        let x = DMatrix::from_row_slice(
            3,
            3,
            &[
                c(0.3, 0.1),
                c(-0.2, 0.5),
                c(0.7, 0.0),
                c(0.1, -0.4),
                c(0.9, 0.2),
                c(-0.3, 0.3),
                c(0.0, 0.6),
                c(0.2, 0.2),
                c(0.4, -0.1),
            ],
        );
        let y = DMatrix::from_row_slice(
            3,
            3,
            &[
                c(-0.5, 0.2),
                c(0.1, 0.1),
                c(0.3, -0.6),
                c(0.8, 0.0),
                c(0.2, -0.3),
                c(0.4, 0.4),
                c(-0.1, 0.2),
                c(0.6, 0.5),
                c(0.1, 0.0),
            ],
        );
        let to_rho = |m: DMatrix<C64>| {
            let p = &m * m.adjoint();
            let tr = p.trace();
            DensityMatrix::new(p.unscale(tr.re)).unwrap()
        };
        (to_rho(x), to_rho(y))
    }

    #[test]
    fn trace_distance_of_identical_states_is_zero() {
        let (a, _) = sample_density_3();
        assert_abs_diff_eq!(trace_distance(&a, &a).unwrap(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn trace_distance_matches_jacobi_oracle() {
        let (a, b) = sample_density_3();
        let oracle = 0.5
            * jacobi_eigenvalues(&(a.matrix() - b.matrix()))
                .iter()
                .map(|l| l.abs())
                .sum::<f64>();
        assert_abs_diff_eq!(trace_distance(&a, &b).unwrap(), oracle, epsilon = 1e-12);
        assert_abs_diff_eq!(
            trace_distance(&a, &b).unwrap(),
            trace_distance(&b, &a).unwrap(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn trace_distance_for_strong_measurement_at_alpha_zero() {
        // rho_i(0) = |+x><+x|, rho_s(0) = 1/2
        let rho_i = DensityMatrix::from_real(DMatrix::from_row_slice(2, 2, &[0.5, 0.5, 0.5, 0.5]))
            .unwrap();
        let rho_s = DensityMatrix::maximally_mixed(2).unwrap();
        assert_abs_diff_eq!(trace_distance(&rho_i, &rho_s).unwrap(), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = DensityMatrix::maximally_mixed(2).unwrap();
        let b = DensityMatrix::maximally_mixed(3).unwrap();
        assert!(matches!(
            trace_distance(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(uhlmann_fidelity(&a, &b).is_err());
    }

    #[test]
    fn fidelity_trivial_cases() {
        let (a, _) = sample_density_3();
        assert_abs_diff_eq!(uhlmann_fidelity(&a, &a).unwrap(), 1.0, epsilon = 1e-10);
        let up = PureState::basis(2, 0).unwrap().projector();
        let down = PureState::basis(2, 1).unwrap().projector();
        assert_abs_diff_eq!(uhlmann_fidelity(&up, &down).unwrap(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn qubit_fidelity_matches_closed_form() {
        // For qubits F^2 = Tr(ab) + 2 sqrt(det a det b).
        let a = DensityMatrix::new(DMatrix::from_row_slice(
            2,
            2,
            &[c(0.7, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.3, 0.0)],
        ))
        .unwrap();
        let b = DensityMatrix::new(DMatrix::from_row_slice(
            2,
            2,
            &[c(0.4, 0.0), c(-0.25, 0.05), c(-0.25, -0.05), c(0.6, 0.0)],
        ))
        .unwrap();
        let det = |m: &DMatrix<C64>| (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re;
        let f2 = (a.matrix() * b.matrix()).trace().re
            + 2.0 * (det(a.matrix()) * det(b.matrix())).sqrt();
        assert_abs_diff_eq!(uhlmann_fidelity(&a, &b).unwrap(), f2.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(
            uhlmann_fidelity(&a, &b).unwrap(),
            uhlmann_fidelity(&b, &a).unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn fidelity_with_pure_state_is_root_overlap() {
        let psi = PureState::normalized(DVector::from_vec(vec![c(1.0, 0.0), c(0.3, -0.4)])).unwrap();
        let b = DensityMatrix::new(DMatrix::from_row_slice(
            2,
            2,
            &[c(0.55, 0.0), c(0.2, 0.1), c(0.2, -0.1), c(0.45, 0.0)],
        ))
        .unwrap();
        let expect = b.population(&psi).sqrt();
        assert_abs_diff_eq!(uhlmann_fidelity(&psi.projector(), &b).unwrap(), expect, epsilon = 1e-12);
    }

    #[test]
    fn bloch_roundtrip_and_purity() {
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        assert_eq!(mixed.to_bloch().unwrap().components(), [0.0, 0.0, 0.0]);

        let psi = PureState::normalized(DVector::from_vec(vec![c(0.6, 0.1), c(-0.2, 0.7)])).unwrap();
        let rho = psi.projector();
        let r = rho.to_bloch().unwrap();
        assert_abs_diff_eq!(r.norm_squared(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.norm_squared(), 2.0 * rho.purity() - 1.0, epsilon = 1e-12);
        let back = DensityMatrix::from_bloch(&r);
        assert!((back.matrix() - rho.matrix()).norm() < 1e-12);
    }

    #[test]
    fn bloch_requires_qubit() {
        let rho = DensityMatrix::maximally_mixed(3).unwrap();
        assert_eq!(rho.to_bloch(), Err(Error::NotQubit(3)));
        assert!(matches!(
            BlochVector::new([1.0, 0.5, 0.0]),
            Err(Error::BlochOutsideBall(_))
        ));
    }

    #[test]
    fn identification_probability_values() {
        assert_eq!(identification_probability(0.0).unwrap(), 0.5);
        assert_eq!(identification_probability(1.0).unwrap(), 1.0);
        assert_abs_diff_eq!(
            identification_probability((-0.5f64).exp()).unwrap(),
            0.803265,
            epsilon = 1e-6
        );
        assert!(identification_probability(1.5).is_err());
        assert!(identification_probability(-0.1).is_err());
    }

    #[test]
    fn density_validation_rejects_bad_input() {
        let not_herm = DMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.1, 0.0), c(0.2, 0.0), c(0.5, 0.0)]);
        assert!(matches!(DensityMatrix::new(not_herm), Err(Error::NotHermitian(_))));
        let bad_trace = DMatrix::from_row_slice(2, 2, &[c(0.6, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)]);
        assert!(matches!(DensityMatrix::new(bad_trace), Err(Error::InvalidTrace(_))));
        let negative = DMatrix::from_row_slice(2, 2, &[c(1.2, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.2, 0.0)]);
        assert!(matches!(DensityMatrix::new(negative), Err(Error::NotPositive(_))));
        assert!(matches!(
            DensityMatrix::new(DMatrix::zeros(2, 3)),
            Err(Error::NotSquare(2, 3))
        ));
    }

    #[test]
    fn observable_validation() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let sx = Observable::new(
            vec![1.0, -1.0],
            vec![
                DVector::from_vec(vec![c(s, 0.0), c(s, 0.0)]),
                DVector::from_vec(vec![c(s, 0.0), c(-s, 0.0)]),
            ],
        )
        .unwrap();
        let m = sx.matrix();
        assert_abs_diff_eq!(m[(0, 1)].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(0, 0)].re, 0.0, epsilon = 1e-15);

        let skewed = Observable::new(
            vec![1.0, -1.0],
            vec![
                DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]),
                DVector::from_vec(vec![c(s, 0.0), c(s, 0.0)]),
            ],
        );
        assert!(matches!(skewed, Err(Error::NotOrthonormal(_))));

        let short = Observable::new(vec![1.0], vec![DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)])]);
        assert!(matches!(short, Err(Error::IncompleteBasis { .. })));
    }

    #[test]
    fn observable_from_hermitian_reconstructs() {
        let m = DMatrix::from_row_slice(
            3,
            3,
            &[
                c(1.0, 0.0),
                c(0.2, 0.3),
                c(0.0, -0.5),
                c(0.2, -0.3),
                c(-0.4, 0.0),
                c(0.7, 0.0),
                c(0.0, 0.5),
                c(0.7, 0.0),
                c(0.3, 0.0),
            ],
        );
        let obs = Observable::from_hermitian(&m).unwrap();
        assert!((obs.matrix() - &m).norm() < 1e-12);
        assert!(obs.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn qubit_orthogonal_is_orthogonal() {
        let psi = PureState::normalized(DVector::from_vec(vec![c(0.3, 0.4), c(-0.5, 0.2)])).unwrap();
        let perp = psi.qubit_orthogonal().unwrap();
        assert_abs_diff_eq!(psi.inner(&perp).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(perp.amplitudes().norm(), 1.0, epsilon = 1e-15);
    }
}
