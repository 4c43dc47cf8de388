//! Brute-force reference implementation on a position grid.
//!
//! The joint system ⊗ pointer state is built as a dense `(d n) x (d n)`
//! matrix from sampled, explicitly shifted Gaussians, and every observable
//! is then recomputed with plain sums: partial traces, projections and
//! quadrature. Nothing here uses the Gaussian-frame kernels of the exact
//! engine, so agreement between the two is a meaningful check.
//!
//! Row index `s * n + k` addresses system basis state `s` and grid point `k`.
//! Grid functions carry the `sqrt(w_k)` trapezoid factor (see [`Grid`]).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::engine::MeasurementSetup;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::qcore::{hermitian_eigenvalues, DensityMatrix, Observable, PureState};

/// Dense builds must have unit trace to this tolerance.
pub const DENSE_TRACE_TOL: f64 = 1e-8;
/// Post-selection probabilities below this are flagged as low statistics.
pub const LOW_STATISTICS: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct DenseJoint {
    system_dim: usize,
    grid: Grid,
    delta: f64,
    matrix: DMatrix<C64>,
}

impl DenseJoint {
    pub fn system_dim(&self) -> usize {
        self.system_dim
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `acc += w * block(s, t)`
    fn add_block(&self, acc: &mut DMatrix<C64>, s: usize, t: usize, w: C64) {
        let n = self.grid.n_points();
        acc.zip_apply(&self.matrix.view((s * n, t * n), (n, n)), |x, y| *x += w * y);
    }
}

/// Grid spanning every shift `g a_nu` with the standard margin.
pub fn grid_for(setup: &MeasurementSetup, n_points: usize) -> Result<Grid> {
    Grid::covering(&shifts(setup), setup.pointer().delta(), n_points)
}

fn shifts(setup: &MeasurementSetup) -> Vec<f64> {
    setup
        .observable()
        .eigenvalues()
        .iter()
        .map(|a| setup.g() * a)
        .collect()
}

/// `U (rho_i ⊗ |phi><phi|) U†` sampled on `grid`.
///
/// `rho_i` is split into its eigenvectors `psi_j`; each is pushed through the
/// coupling as `sum_nu |chi_nu><chi_nu|psi_j> ⊗ phi(q - g a_nu)`.
pub fn build_joint(setup: &MeasurementSetup, grid: &Grid) -> Result<DenseJoint> {
    let delta = setup.pointer().delta();
    grid.ensure_covers(&shifts(setup), delta)?;
    let d = setup.observable().dim();
    let n = grid.n_points();

    let spectral = Observable::from_hermitian(setup.rho_i().matrix())?;
    let a = setup.observable();
    let pointers: Vec<DVector<f64>> = shifts(setup)
        .iter()
        .map(|&s| grid.gaussian(delta, s))
        .collect();

    let kept: Vec<(f64, &DVector<C64>)> = spectral
        .eigenvalues()
        .iter()
        .copied()
        .zip(spectral.eigenvectors())
        .filter(|(lambda, _)| *lambda > 0.0)
        .collect();
    let mut psi = DMatrix::<C64>::zeros(d * n, kept.len());
    for (j, (lambda, v)) in kept.iter().enumerate() {
        let amp = lambda.sqrt();
        for (nu, chi) in a.eigenvectors().iter().enumerate() {
            let c = chi.dotc(v) * amp;
            for s in 0..d {
                let coeff = chi[s] * c;
                if coeff == C64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..n {
                    psi[(s * n + k, j)] += coeff * pointers[nu][k];
                }
            }
        }
    }
    let matrix = &psi * psi.adjoint();
    let dj = DenseJoint {
        system_dim: d,
        grid: grid.clone(),
        delta,
        matrix,
    };
    let tr = dj.trace();
    if (tr - 1.0).abs() > DENSE_TRACE_TOL {
        return Err(Error::InvalidTrace(tr));
    }
    Ok(dj)
}

#[derive(Debug, Clone)]
pub struct OracleObservables {
    /// Mean pointer position of the (post-selected) pointer state.
    pub q_mean: f64,
    /// Post-selection probability; 1 without post-selection.
    pub p_f: f64,
    pub rho_reduced: DensityMatrix,
    /// Normalized pointer state on the grid.
    pub sigma_reduced: DMatrix<C64>,
    /// Set when `p_f` is too small for a meaningful comparison.
    pub low_statistics: bool,
}

/// Reduced states, pointer mean and post-selection probability by direct
/// summation over the dense joint state.
pub fn oracle_observables(dj: &DenseJoint, f: Option<&PureState>) -> Result<OracleObservables> {
    let d = dj.system_dim;
    let n = dj.grid.n_points();
    let (unnormalized, rho) = match f {
        None => {
            let mut sigma = DMatrix::<C64>::zeros(n, n);
            for s in 0..d {
                dj.add_block(&mut sigma, s, s, C64::new(1.0, 0.0));
            }
            let rho = DMatrix::from_fn(d, d, |s, t| {
                (0..n).map(|k| dj.matrix[(s * n + k, t * n + k)]).sum::<C64>()
            });
            (sigma, Some(rho))
        }
        Some(f) => {
            if f.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: f.dim(),
                });
            }
            // (<f| ⊗ 1) rho (|f> ⊗ 1)
            let amps = f.amplitudes();
            let mut m = DMatrix::<C64>::zeros(n, n);
            for s in 0..d {
                for t in 0..d {
                    let w = amps[s].conj() * amps[t];
                    if w != C64::new(0.0, 0.0) {
                        dj.add_block(&mut m, s, t, w);
                    }
                }
            }
            (m, None)
        }
    };
    let p_f = unnormalized.trace().re;
    let low_statistics = p_f < LOW_STATISTICS;
    if p_f <= 0.0 {
        return Err(Error::ImpossiblePostSelection(p_f));
    }
    let mut sigma = unnormalized;
    sigma.unscale_mut(p_f);
    let q = dj.grid.points();
    let q_mean = (0..n).map(|k| q[k] * sigma[(k, k)].re).sum();
    let rho_reduced = match rho {
        Some(r) => {
            let tr = r.trace().re;
            DensityMatrix::new(r.unscale(tr))?
        }
        None => f.expect("post-selected branch").projector(),
    };
    Ok(OracleObservables {
        q_mean,
        p_f: if f.is_some() { p_f } else { 1.0 },
        rho_reduced,
        sigma_reduced: sigma,
        low_statistics,
    })
}

/// `Tr[(|f><f| ⊗ 1) rho]` from the diagonal of the projected blocks only.
pub fn postselection_probability(dj: &DenseJoint, f: &PureState) -> Result<f64> {
    let d = dj.system_dim;
    if f.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: f.dim(),
        });
    }
    let n = dj.grid.n_points();
    let amps = f.amplitudes();
    let mut p = C64::new(0.0, 0.0);
    for s in 0..d {
        for t in 0..d {
            let w = amps[s].conj() * amps[t];
            let trace: C64 = (0..n).map(|k| dj.matrix[(s * n + k, t * n + k)]).sum();
            p += w * trace;
        }
    }
    Ok(p.re)
}

/// Initial pointer `|phi><phi|` on the grid.
pub fn initial_pointer(grid: &Grid, delta: f64) -> DMatrix<C64> {
    let phi = grid.gaussian(delta, 0.0).map(|x| C64::new(x, 0.0));
    &phi * phi.adjoint()
}

/// `<phi|sigma|phi>` by quadrature.
pub fn grid_fidelity_with_initial(sigma: &DMatrix<C64>, grid: &Grid, delta: f64) -> f64 {
    let phi = grid.gaussian(delta, 0.0).map(|x| C64::new(x, 0.0));
    phi.dotc(&(sigma * &phi)).re
}

/// Trace distance between two Hermitian grid operators of low rank.
///
/// An orthonormal basis `Q` of the column space of `a - b` is found by
/// Gram-Schmidt with column pivoting, and `Q† (a - b) Q` is diagonalized.
/// The difference is never stored; every pass reads `a` and `b` directly.
pub fn grid_trace_distance(a: &DMatrix<C64>, b: &DMatrix<C64>) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: b.nrows(),
        });
    }
    let n = a.ncols();
    let mut scale = 0.0f64;
    // Squared residual norm of each column of a - b against the basis so far.
    let mut residual: Vec<f64> = (0..n)
        .map(|j| {
            let (ca, cb) = (a.column(j), b.column(j));
            scale = scale.max(ca.norm()).max(cb.norm());
            ca.iter().zip(cb.iter()).map(|(x, y)| (x - y).norm_sqr()).sum()
        })
        .collect();
    let tol = (1e-12 * scale).powi(2);

    let mut basis: Vec<DVector<C64>> = Vec::new();
    // (a - b) q_k for each basis vector, equal to (a - b)† q_k.
    let mut images: Vec<DVector<C64>> = Vec::new();
    while basis.len() < n {
        let (j, &r) = residual
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.total_cmp(y.1))
            .expect("non-empty matrix");
        if r <= tol {
            break;
        }
        let mut v: DVector<C64> = a.column(j) - b.column(j);
        for _ in 0..2 {
            for u in &basis {
                let c = u.dotc(&v);
                v -= u * c;
            }
        }
        let norm = v.norm();
        if norm <= 1e-12 * scale {
            residual[j] = 0.0;
            continue;
        }
        let v = v.unscale(norm);
        let image = a.ad_mul(&v) - b.ad_mul(&v);
        for (res, p) in residual.iter_mut().zip(image.iter()) {
            *res = (*res - p.norm_sqr()).max(0.0);
        }
        residual[j] = 0.0;
        basis.push(v);
        images.push(image);
    }
    if basis.is_empty() {
        return Ok(0.0);
    }
    let r = basis.len();
    let h = DMatrix::from_fn(r, r, |k, l| basis[k].dotc(&images[l]));
    let eig = hermitian_eigenvalues(&h);
    Ok((0.5 * eig.iter().map(|x| x.abs()).sum::<f64>()).min(1.0))
}
