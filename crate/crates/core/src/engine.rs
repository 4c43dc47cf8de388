//! Exact measurement sequence for finite-dimensional systems: impulsive
//! coupling of an observable to a Gaussian pointer, optional post-selection
//! on a pure state, and the resulting pointer readings and reduced states.
//!
//! The joint state after coupling is
//!
//! ```text
//! U (rho_i ⊗ |phi><phi|) U† = sum_{nu mu} B_{nu mu} |chi_nu><chi_mu| ⊗ |phi_nu><phi_mu|,
//! B_{nu mu} = <chi_nu|rho_i|chi_mu>,
//! ```
//!
//! so it is carried as the `d x d` block matrix `B` over a [`PointerFrame`]
//! and never expanded on a position grid.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::pointer::{fidelity_with_initial, FrameOperator, GaussianPointer, PointerFrame};
use crate::qcore::{DensityMatrix, Observable, PureState};

/// Post-selection probabilities at or below this are rejected.
pub const MIN_POSTSELECTION_PROBABILITY: f64 = 1e-300;
/// Allowed imaginary residue of the conditional pointer shift, relative to
/// its magnitude.
pub const SHIFT_IMAG_TOL: f64 = 1e-10;
const BASIS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSetup {
    rho_i: DensityMatrix,
    observable: Observable,
    g: f64,
    pointer: GaussianPointer,
}

impl MeasurementSetup {
    pub fn new(
        rho_i: DensityMatrix,
        observable: Observable,
        g: f64,
        pointer: GaussianPointer,
    ) -> Result<Self> {
        if rho_i.dim() != observable.dim() {
            return Err(Error::DimensionMismatch {
                expected: observable.dim(),
                found: rho_i.dim(),
            });
        }
        if !(g >= 0.0) || !g.is_finite() {
            return Err(Error::OutOfRange {
                name: "g",
                value: g,
                range: "[0, inf)",
            });
        }
        Ok(Self {
            rho_i,
            observable,
            g,
            pointer,
        })
    }

    pub fn rho_i(&self) -> &DensityMatrix {
        &self.rho_i
    }

    pub fn observable(&self) -> &Observable {
        &self.observable
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn pointer(&self) -> &GaussianPointer {
        &self.pointer
    }

    pub fn with_coupling(&self, g: f64) -> Result<Self> {
        Self::new(self.rho_i.clone(), self.observable.clone(), g, self.pointer)
    }
}

#[derive(Debug, Clone, PartialEq)]
struct PostSelection {
    state: PureState,
    /// `<f|chi_nu>`
    overlaps: Vec<C64>,
    probability: f64,
}

/// System ⊗ pointer state after coupling, optionally post-selected.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    observable: Observable,
    frame: PointerFrame,
    blocks: DMatrix<C64>,
    postselection: Option<PostSelection>,
}

impl JointState {
    pub fn system_dim(&self) -> usize {
        self.observable.dim()
    }

    pub fn frame(&self) -> &PointerFrame {
        &self.frame
    }

    pub fn observable(&self) -> &Observable {
        &self.observable
    }

    pub fn coupling(&self) -> f64 {
        self.frame.coupling().unwrap_or(0.0)
    }

    /// `B_{nu mu} = <chi_nu|rho_i|chi_mu>`, the pre-selection blocks.
    pub fn blocks(&self) -> &DMatrix<C64> {
        &self.blocks
    }

    pub fn postselected_on(&self) -> Option<&PureState> {
        self.postselection.as_ref().map(|p| &p.state)
    }

    /// `P(f)` for a post-selected state, otherwise 1.
    pub fn norm(&self) -> f64 {
        self.postselection.as_ref().map_or(1.0, |p| p.probability)
    }

    /// Total trace of the (normalized) joint state.
    pub fn trace(&self) -> f64 {
        let g = self.frame.gram();
        let d = self.system_dim();
        match &self.postselection {
            None => (0..d).map(|nu| self.blocks[(nu, nu)].re).sum(),
            Some(ps) => {
                let mut tr = C64::new(0.0, 0.0);
                for nu in 0..d {
                    for mu in 0..d {
                        tr += ps.overlaps[nu] * ps.overlaps[mu].conj() * self.blocks[(nu, mu)] * g[(mu, nu)];
                    }
                }
                tr.re / ps.probability
            }
        }
    }

    /// `sum <f|chi_nu><chi_mu|f> B_{nu mu} X_{nu mu}` for a real kernel `X`.
    fn postselected_sum(&self, overlaps: &[C64], kernel: impl Fn(usize, usize) -> f64) -> C64 {
        let d = self.system_dim();
        let mut acc = C64::new(0.0, 0.0);
        for nu in 0..d {
            for mu in 0..d {
                acc += overlaps[nu] * overlaps[mu].conj() * self.blocks[(nu, mu)] * kernel(nu, mu);
            }
        }
        acc
    }
}

/// Couples system and pointer with `U = exp(-i g A ⊗ p)`.
pub fn evolve(setup: &MeasurementSetup) -> JointState {
    let frame = PointerFrame::new(setup.pointer, setup.g, setup.observable.eigenvalues())
        .expect("setup validated coupling and eigenvalues");
    let blocks = setup
        .rho_i
        .in_eigenbasis(&setup.observable)
        .expect("setup validated dimensions");
    JointState {
        observable: setup.observable.clone(),
        frame,
        blocks,
        postselection: None,
    }
}

/// Partial trace over the pointer: the Hadamard product of `B` with the
/// Gram matrix, rotated back to the computational basis.
pub fn reduced_system(js: &JointState) -> Result<DensityMatrix> {
    if js.postselection.is_some() {
        // The post-selected system is |f><f| by construction; see
        // `JointState::postselected_on`.
        return Err(Error::AlreadyPostSelected);
    }
    let g = js.frame.gram();
    let dephased = DMatrix::from_fn(js.system_dim(), js.system_dim(), |nu, mu| {
        js.blocks[(nu, mu)] * g[(nu, mu)]
    });
    let v = js.observable.basis_matrix();
    DensityMatrix::new(&v * dephased * v.adjoint())
}

/// System state after coupling and discarding the pointer. This is the
/// non-selective measurement channel.
pub fn nonselective_channel(setup: &MeasurementSetup) -> Result<DensityMatrix> {
    reduced_system(&evolve(setup))
}

/// `P(f) = Tr(|f><f| U rho U†)` without forming the post-selected state.
pub fn postselection_probability(js: &JointState, f: &PureState) -> Result<f64> {
    if js.postselection.is_some() {
        return Err(Error::AlreadyPostSelected);
    }
    let overlaps = js.observable.overlaps(f)?;
    let g = js.frame.gram();
    let p = js.postselected_sum(&overlaps, |nu, mu| g[(nu, mu)]).re;
    Ok(p.clamp(0.0, 1.0))
}

/// Projects the system onto `|f>` and renormalizes. Returns the
/// post-selected state and `P(f)`.
pub fn post_select(js: &JointState, f: &PureState) -> Result<(JointState, f64)> {
    if js.postselection.is_some() {
        return Err(Error::AlreadyPostSelected);
    }
    let p = postselection_probability(js, f)?;
    if p <= MIN_POSTSELECTION_PROBABILITY {
        return Err(Error::ImpossiblePostSelection(p));
    }
    let overlaps = js.observable.overlaps(f)?;
    let selected = JointState {
        postselection: Some(PostSelection {
            state: f.clone(),
            overlaps,
            probability: p,
        }),
        ..js.clone()
    };
    Ok((selected, p))
}

/// Mean pointer position `<q>_{i,f}` of a post-selected state:
///
/// ```text
/// (g / P(f)) sum <f|chi_nu><chi_mu|f> B_{nu mu} (a_nu + a_mu)/2 G_{nu mu}
/// ```
///
/// The sum is real for Hermitian inputs; a residue above tolerance is
/// reported as an error rather than dropped silently.
pub fn conditional_pointer_shift(js: &JointState) -> Result<f64> {
    let ps = js.postselection.as_ref().ok_or(Error::NotPostSelected)?;
    let frame = &js.frame;
    let sum = js.postselected_sum(&ps.overlaps, |nu, mu| frame.position_element(nu, mu));
    let shift = sum / ps.probability;
    if shift.im.abs() > SHIFT_IMAG_TOL * shift.re.abs().max(1.0) {
        return Err(Error::NonRealShift(shift.im));
    }
    Ok(shift.re)
}

/// Pointer reading without post-selection, `g <A>_i`.
pub fn pointer_mean(js: &JointState) -> Result<f64> {
    crate::pointer::frame_position_mean(&reduced_pointer(js))
}

/// Conditional expectation of `A` after a projective measurement on the
/// pre- and post-selected ensemble:
///
/// ```text
/// sum_nu a_nu |<f|chi_nu>|^2 <chi_nu|rho_i|chi_nu> / sum_mu |<f|chi_mu>|^2 <chi_mu|rho_i|chi_mu>
/// ```
pub fn abl_expectation(rho_i: &DensityMatrix, a: &Observable, f: &PureState) -> Result<f64> {
    check_dims(rho_i, a, f)?;
    let overlaps = a.overlaps(f)?;
    let mut num = 0.0;
    let mut den = 0.0;
    for ((val, chi), ov) in a.eigenvalues().iter().zip(a.eigenvectors()).zip(&overlaps) {
        let w = ov.norm_sqr() * chi.dotc(&(rho_i.matrix() * chi)).re;
        num += val * w;
        den += w;
    }
    if den <= MIN_POSTSELECTION_PROBABILITY {
        return Err(Error::AblUndefined);
    }
    Ok(num / den)
}

/// Weak value `<f|A rho_i|f> / <f|rho_i|f>`.
pub fn weak_value(rho_i: &DensityMatrix, a: &Observable, f: &PureState) -> Result<C64> {
    check_dims(rho_i, a, f)?;
    let amps = f.amplitudes();
    let rho_f = rho_i.matrix() * amps;
    let den = amps.dotc(&rho_f).re;
    if den <= MIN_POSTSELECTION_PROBABILITY {
        return Err(Error::WeakValueDiverges(den));
    }
    let num = amps.dotc(&(a.matrix() * rho_f));
    Ok(num / den)
}

fn check_dims(rho_i: &DensityMatrix, a: &Observable, f: &PureState) -> Result<()> {
    for found in [rho_i.dim(), f.dim()] {
        if found != a.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                found,
            });
        }
    }
    Ok(())
}

/// Reduced pointer state. Without post-selection it is the incoherent
/// mixture `sum_nu B_{nu nu} |phi_nu><phi_nu|`; after post-selection the
/// coefficients are `<f|chi_nu><chi_mu|f> B_{nu mu} / P(f)`.
pub fn reduced_pointer(js: &JointState) -> FrameOperator {
    let d = js.system_dim();
    let coeff = match &js.postselection {
        None => DMatrix::from_fn(d, d, |nu, mu| {
            if nu == mu {
                js.blocks[(nu, nu)]
            } else {
                C64::new(0.0, 0.0)
            }
        }),
        Some(ps) => DMatrix::from_fn(d, d, |nu, mu| {
            ps.overlaps[nu] * ps.overlaps[mu].conj() * js.blocks[(nu, mu)] / ps.probability
        }),
    };
    FrameOperator::new(js.frame.clone(), coeff).expect("coefficients are Hermitian by construction")
}

/// Overlap fidelity `<phi|sigma|phi>` of the reduced pointer with the
/// initial pointer.
pub fn pointer_fidelity(js: &JointState) -> Result<f64> {
    fidelity_with_initial(&reduced_pointer(js))
}

/// Trace distance between the initial pointer and the reduced pointer.
pub fn pointer_disturbance(js: &JointState) -> Result<f64> {
    let initial = FrameOperator::initial(*js.frame.pointer());
    initial.trace_distance(&reduced_pointer(js))
}

/// Non-selective final measurement in `basis`: `sum_f P(f) |f><f|`.
pub fn nonselective_final(js: &JointState, basis: &[PureState]) -> Result<DensityMatrix> {
    let d = js.system_dim();
    if basis.len() != d {
        return Err(Error::IncompleteBasis {
            expected: d,
            found: basis.len(),
        });
    }
    let mut dev = 0.0f64;
    for (i, u) in basis.iter().enumerate() {
        if u.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: u.dim(),
            });
        }
        for v in &basis[i + 1..] {
            dev = dev.max(u.inner(v).norm());
        }
    }
    if dev > BASIS_TOL {
        return Err(Error::IncompleteBasis {
            expected: d,
            found: d - 1,
        });
    }
    let mut m = DMatrix::zeros(d, d);
    let mut total = 0.0;
    for f in basis {
        let p = postselection_probability(js, f)?;
        total += p;
        m += f.projector().into_matrix().scale(p);
    }
    if (total - 1.0).abs() > BASIS_TOL {
        return Err(Error::InvalidTrace(total));
    }
    DensityMatrix::new(m.unscale(total))
}
