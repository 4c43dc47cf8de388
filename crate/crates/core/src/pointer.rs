//! Closed-form algebra of the Gaussian measurement pointer.
//!
//! After an impulsive coupling `exp(-i g A p)` the pointer only ever occupies
//! the span of the shifted Gaussians `|phi_nu> = exp(-i g a_nu p)|phi>`. All
//! pointer operators are therefore kept as coefficient matrices over that
//! non-orthogonal frame,
//!
//! ```text
//! sigma = sum_{nu mu} c_{nu mu} |phi_nu><phi_mu|,
//! ```
//!
//! together with the Gram matrix `G_{nu mu} = <phi_nu|phi_mu>
//! = exp[-(s_nu - s_mu)^2 / (8 delta^2)]`. Traces, position moments,
//! overlaps with the initial pointer and trace distances all reduce to
//! finite sums against `G`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::qcore::{hermitian_eigenvalues, POSITIVITY_TOL, STRUCTURE_TOL};

/// Tolerance on the unit trace of pointer states.
pub const TRACE_TOL: f64 = 1e-10;

/// Initial pointer: a Gaussian centered at `q = 0` with position spread
/// `delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPointer {
    delta: f64,
}

impl GaussianPointer {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::OutOfRange {
                name: "delta",
                value: delta,
                range: "(0, inf)",
            });
        }
        Ok(Self { delta })
    }

    /// Pointer with `delta = 1`, so couplings are measured in spreads.
    pub fn unit() -> Self {
        Self { delta: 1.0 }
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn center(&self) -> f64 {
        0.0
    }

    /// `<phi|phi_shifted> = exp[-shift^2 / (8 delta^2)]`
    pub fn overlap(&self, shift_a: f64, shift_b: f64) -> f64 {
        let d = shift_a - shift_b;
        (-d * d / (8.0 * self.delta * self.delta)).exp()
    }
}

/// The shifted Gaussians spanned by the pointer after coupling, with their
/// Gram matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PointerFrame {
    pointer: GaussianPointer,
    coupling: Option<f64>,
    shifts: Vec<f64>,
    gram: DMatrix<f64>,
}

impl PointerFrame {
    /// Frame for coupling `g` to an observable with the given eigenvalues;
    /// shifts are `g a_nu`.
    pub fn new(pointer: GaussianPointer, g: f64, eigenvalues: &[f64]) -> Result<Self> {
        if !(g >= 0.0) || !g.is_finite() {
            return Err(Error::OutOfRange {
                name: "g",
                value: g,
                range: "[0, inf)",
            });
        }
        let mut frame = Self::from_shifts(pointer, eigenvalues.iter().map(|a| g * a).collect())?;
        frame.coupling = Some(g);
        Ok(frame)
    }

    /// Frame over arbitrary shifts. Repeated shifts are allowed; the Gram
    /// matrix is then singular but still positive semidefinite.
    pub fn from_shifts(pointer: GaussianPointer, shifts: Vec<f64>) -> Result<Self> {
        if shifts.is_empty() {
            return Err(Error::EmptyDimension);
        }
        if let Some(bad) = shifts.iter().find(|s| !s.is_finite()) {
            return Err(Error::OutOfRange {
                name: "shift",
                value: *bad,
                range: "finite reals",
            });
        }
        let d = shifts.len();
        let gram = DMatrix::from_fn(d, d, |i, j| pointer.overlap(shifts[i], shifts[j]));
        Ok(Self {
            pointer,
            coupling: None,
            shifts,
            gram,
        })
    }

    pub fn pointer(&self) -> &GaussianPointer {
        &self.pointer
    }

    /// The coupling `g` when the frame was built from an observable.
    pub fn coupling(&self) -> Option<f64> {
        self.coupling
    }

    pub fn len(&self) -> usize {
        self.shifts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shifts.is_empty()
    }

    pub fn shifts(&self) -> &[f64] {
        &self.shifts
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// `G_{nu mu} = <phi_nu|phi_mu>`
    pub fn overlap_kernel(&self, nu: usize, mu: usize) -> Result<f64> {
        let dim = self.len();
        for index in [nu, mu] {
            if index >= dim {
                return Err(Error::IndexOutOfRange { index, dim });
            }
        }
        Ok(self.gram[(nu, mu)])
    }

    /// `k_nu = <phi|phi_nu> = exp[-s_nu^2 / (8 delta^2)]`
    pub fn initial_overlaps(&self) -> Vec<f64> {
        self.shifts
            .iter()
            .map(|&s| self.pointer.overlap(0.0, s))
            .collect()
    }

    /// `<phi_mu|q|phi_nu> = (s_nu + s_mu)/2 * G_{nu mu}`
    pub fn position_element(&self, nu: usize, mu: usize) -> f64 {
        0.5 * (self.shifts[nu] + self.shifts[mu]) * self.gram[(nu, mu)]
    }

    fn gram_sqrt(&self) -> DMatrix<C64> {
        let eig = SymmetricEigen::new(self.gram.clone());
        let roots = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
        let v = &eig.eigenvectors;
        (v * DMatrix::from_diagonal(&roots) * v.transpose()).map(|x| C64::new(x, 0.0))
    }
}

/// Pointer operator `sum c_{nu mu} |phi_nu><phi_mu|` over a fixed frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameOperator {
    frame: PointerFrame,
    coeff: DMatrix<C64>,
}

impl FrameOperator {
    /// Wraps a Hermitian coefficient matrix. Trace and positivity are not
    /// required here; the state-level operations check them.
    pub fn new(frame: PointerFrame, coeff: DMatrix<C64>) -> Result<Self> {
        let (r, c) = coeff.shape();
        if r != c {
            return Err(Error::NotSquare(r, c));
        }
        if r != frame.len() {
            return Err(Error::DimensionMismatch {
                expected: frame.len(),
                found: r,
            });
        }
        let scale = coeff.iter().fold(1.0f64, |m, z| m.max(z.norm()));
        let mut dev = 0.0f64;
        for i in 0..r {
            for j in i..r {
                dev = dev.max((coeff[(i, j)] - coeff[(j, i)].conj()).norm());
            }
        }
        if dev > STRUCTURE_TOL * scale {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self { frame, coeff })
    }

    /// The undisturbed pointer `|phi><phi|`.
    pub fn initial(pointer: GaussianPointer) -> Self {
        let frame = PointerFrame::from_shifts(pointer, vec![0.0]).expect("single finite shift");
        Self {
            frame,
            coeff: DMatrix::from_element(1, 1, C64::new(1.0, 0.0)),
        }
    }

    pub fn frame(&self) -> &PointerFrame {
        &self.frame
    }

    pub fn coefficients(&self) -> &DMatrix<C64> {
        &self.coeff
    }

    /// `sum c_{nu mu} G_{mu nu}`
    pub fn trace(&self) -> f64 {
        let g = &self.frame.gram;
        let mut tr = C64::new(0.0, 0.0);
        for nu in 0..self.frame.len() {
            for mu in 0..self.frame.len() {
                tr += self.coeff[(nu, mu)] * g[(mu, nu)];
            }
        }
        tr.re
    }

    /// Nonzero spectrum of the operator, from `G^(1/2) c G^(1/2)`.
    pub fn spectrum(&self) -> Vec<f64> {
        let root = self.frame.gram_sqrt();
        hermitian_eigenvalues(&(&root * &self.coeff * &root))
    }

    /// Checks unit trace and frame-aware positivity.
    pub fn validate_state(&self) -> Result<()> {
        let tr = self.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidTrace(tr));
        }
        let min = self.spectrum()[0];
        if min < -POSITIVITY_TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(())
    }

    /// Trace distance between operators that may live on different frames.
    ///
    /// Both are embedded into the frame of concatenated shifts, where the
    /// difference is block diagonal in the coefficients.
    pub fn trace_distance(&self, other: &FrameOperator) -> Result<f64> {
        if self.frame.pointer != other.frame.pointer {
            return Err(Error::OutOfRange {
                name: "delta",
                value: other.frame.pointer.delta(),
                range: "equal to the first operator's spread",
            });
        }
        let (m, n) = (self.frame.len(), other.frame.len());
        let shifts = self
            .frame
            .shifts
            .iter()
            .chain(&other.frame.shifts)
            .copied()
            .collect();
        let union = PointerFrame::from_shifts(self.frame.pointer, shifts)?;
        let mut diff = DMatrix::zeros(m + n, m + n);
        diff.view_mut((0, 0), (m, m)).copy_from(&self.coeff);
        diff.view_mut((m, m), (n, n)).copy_from(&(-&other.coeff));
        let op = FrameOperator { frame: union, coeff: diff };
        let d = 0.5 * op.spectrum().iter().map(|l| l.abs()).sum::<f64>();
        Ok(d.min(1.0))
    }
}

/// `Tr(q sigma)` from `<phi_mu|q|phi_nu> = (s_nu + s_mu)/2 G_{nu mu}`.
pub fn frame_position_mean(op: &FrameOperator) -> Result<f64> {
    let tr = op.trace();
    if (tr - 1.0).abs() > TRACE_TOL {
        return Err(Error::InvalidTrace(tr));
    }
    let frame = &op.frame;
    let mut mean = C64::new(0.0, 0.0);
    for nu in 0..frame.len() {
        for mu in 0..frame.len() {
            mean += op.coeff[(nu, mu)] * frame.position_element(nu, mu);
        }
    }
    Ok(mean.re)
}

/// Overlap fidelity `<phi|sigma|phi>` with the initial pointer. This is the
/// squared convention: for pure `sigma = |psi><psi|` it gives
/// `|<phi|psi>|^2`.
pub fn fidelity_with_initial(op: &FrameOperator) -> Result<f64> {
    op.validate_state()?;
    let k = op.frame.initial_overlaps();
    let mut f = C64::new(0.0, 0.0);
    for nu in 0..k.len() {
        for mu in 0..k.len() {
            f += op.coeff[(nu, mu)] * k[nu] * k[mu];
        }
    }
    Ok(f.re.clamp(0.0, 1.0))
}

/// Dense position representation of a frame operator on `grid`, in the
/// weighted convention of [`Grid::sample`].
pub fn frame_to_grid(op: &FrameOperator, grid: &Grid) -> Result<DMatrix<C64>> {
    let frame = &op.frame;
    let delta = frame.pointer.delta();
    grid.ensure_covers(&frame.shifts, delta)?;
    let n = grid.n_points();
    let mut u = DMatrix::<C64>::zeros(n, frame.len());
    for (nu, &s) in frame.shifts.iter().enumerate() {
        let col = grid.gaussian(delta, s);
        for k in 0..n {
            u[(k, nu)] = C64::new(col[k], 0.0);
        }
    }
    Ok(&u * &op.coeff * u.transpose())
}
