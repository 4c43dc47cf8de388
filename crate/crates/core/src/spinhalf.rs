//! Closed forms for a spin-1/2 measured along z.
//!
//! Preparation and post-selection are spin-up states in the x-z plane at
//! angles `alpha` and `beta` from the x-axis. Basis order is `(up_z, down_z)`
//! and `sigma_z = diag(1, -1)`. All couplings are in units of the pointer
//! spread, so `g` below always means `g / delta`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::qcore::{DensityMatrix, Observable, PureState};

const SINGULAR_TOL: f64 = 1e-300;

pub fn sigma_z() -> Observable {
    Observable::diagonal(vec![1.0, -1.0]).expect("finite eigenvalues")
}

/// `cos(angle/2) |up_x> + sin(angle/2) |down_x>`.
pub fn spin_up(angle: f64) -> PureState {
    let (s, c) = (angle / 2.0).sin_cos();
    let amps = DVector::from_vec(vec![
        C64::new((c + s) * FRAC_1_SQRT_2, 0.0),
        C64::new((c - s) * FRAC_1_SQRT_2, 0.0),
    ]);
    PureState::normalized(amps).expect("unit vector")
}

/// The state orthogonal to `spin_up(angle)`.
pub fn spin_down(angle: f64) -> PureState {
    spin_up(angle + PI)
}

/// `exp(-g^2/2)`, the surviving fraction of the z-coherence.
pub fn coherence_factor(g: f64) -> f64 {
    (-g * g / 2.0).exp()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub alpha: f64,
    pub beta: f64,
    pub g_over_delta: f64,
}

impl Scenario {
    pub fn new(alpha: f64, beta: f64, g_over_delta: f64) -> Self {
        Self {
            alpha,
            beta,
            g_over_delta,
        }
    }

    fn e(&self) -> f64 {
        coherence_factor(self.g_over_delta)
    }
}

/// `<sigma_z>` conditioned on post-selection, for any coupling:
/// `(sin a + sin b) / (1 + sin a sin b + e^{-g^2/2} cos a cos b)`.
pub fn exact_conditional(s: &Scenario) -> Result<f64> {
    let (sa, ca) = s.alpha.sin_cos();
    let (sb, cb) = s.beta.sin_cos();
    let den = 1.0 + sa * sb + s.e() * ca * cb;
    if den.abs() <= SINGULAR_TOL {
        return Err(Error::Singular(den));
    }
    Ok((sa + sb) / den)
}

/// Probability of finding `spin_up(beta)` after coupling:
/// `(1 + sin a sin b + e^{-g^2/2} cos a cos b) / 2`.
pub fn postselection_probability(s: &Scenario) -> f64 {
    let (sa, ca) = s.alpha.sin_cos();
    let (sb, cb) = s.beta.sin_cos();
    0.5 * (1.0 + sa * sb + s.e() * ca * cb)
}

/// Projective limit of [`exact_conditional`].
pub fn abl_closed(alpha: f64, beta: f64) -> Result<f64> {
    let den = 1.0 + alpha.sin() * beta.sin();
    if den.abs() <= SINGULAR_TOL {
        return Err(Error::AblUndefined);
    }
    Ok((alpha.sin() + beta.sin()) / den)
}

/// Weak limit of [`exact_conditional`]: `sin((a+b)/2) / cos((a-b)/2)`,
/// which is `tan(alpha/2)` for `beta = 0`.
pub fn weak_value_closed(alpha: f64, beta: f64) -> Result<f64> {
    let den = ((alpha - beta) / 2.0).cos();
    if den.abs() <= SINGULAR_TOL {
        return Err(Error::WeakValueDiverges(den * den));
    }
    Ok(((alpha + beta) / 2.0).sin() / den)
}

fn qubit(m00: f64, m01: f64, m11: f64) -> DensityMatrix {
    DensityMatrix::from_real(DMatrix::from_row_slice(2, 2, &[m00, m01, m01, m11]))
        .expect("closed-form qubit state is valid")
}

/// `m01` factor `e` scales the coherence of the preparation.
fn prepared(alpha: f64, e: f64) -> DensityMatrix {
    let (s, c) = alpha.sin_cos();
    qubit(0.5 * (1.0 + s), 0.5 * c * e, 0.5 * (1.0 - s))
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateFamily {
    pub rho_i: DensityMatrix,
    /// After a projective sigma_z measurement.
    pub rho_s: DensityMatrix,
    /// After coupling with strength `g_over_delta`.
    pub rho_w: DensityMatrix,
    /// After post-selection on `spin_up(beta)`.
    pub rho_f: DensityMatrix,
}

pub fn state_family(s: &Scenario) -> StateFamily {
    StateFamily {
        rho_i: prepared(s.alpha, 1.0),
        rho_s: prepared(s.alpha, 0.0),
        rho_w: prepared(s.alpha, s.e()),
        rho_f: prepared(s.beta, 1.0),
    }
}

/// `D(rho_i, rho_w) = |cos a| (1 - e^{-g^2/2}) / 2`.
pub fn disturbance_weak(s: &Scenario) -> f64 {
    0.5 * s.alpha.cos().abs() * (1.0 - s.e())
}

/// `D(rho_i, rho_s) = |cos a| / 2`.
pub fn disturbance_strong(alpha: f64) -> f64 {
    0.5 * alpha.cos().abs()
}

/// Coherence retained by a finite-strength measurement relative to a
/// projective one: `D(rho_i, rho_s) - D(rho_i, rho_w)`.
pub fn preserved_coherence(s: &Scenario) -> f64 {
    0.5 * s.alpha.cos().abs() * s.e()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoEnsembleDistances {
    pub initial: f64,
    pub weak: f64,
    pub strong: f64,
}

/// Distances between the ensembles prepared at `alpha` and `alpha_prime`,
/// before measurement, after coupling at `g` and after a projective
/// measurement.
pub fn two_ensemble_distances(alpha: f64, alpha_prime: f64, g: f64) -> TwoEnsembleDistances {
    let ds = alpha.sin() - alpha_prime.sin();
    let dc = alpha.cos() - alpha_prime.cos();
    TwoEnsembleDistances {
        initial: (0.5 * (1.0 - (alpha - alpha_prime).cos())).max(0.0).sqrt(),
        weak: 0.5 * (ds * ds + dc * dc * (-g * g).exp()).sqrt(),
        strong: 0.5 * ds.abs(),
    }
}

/// `|r_s|^2 = sin^2 a`
pub fn bloch_radius_squared_strong(alpha: f64) -> f64 {
    alpha.sin().powi(2)
}

/// `|r_w|^2 = sin^2 a + cos^2 a e^{-g^2}`
pub fn bloch_radius_squared_weak(s: &Scenario) -> f64 {
    let (sa, ca) = s.alpha.sin_cos();
    sa * sa + ca * ca * (-s.g_over_delta.powi(2)).exp()
}

/// Coupling (in units of delta) inferred from the success probability of
/// telling apart the images of two orthogonal preparations.
pub fn infer_coupling(p_w: f64) -> Result<f64> {
    if p_w.is_nan() || p_w > 1.0 {
        return Err(Error::OutOfRange {
            name: "P_w",
            value: p_w,
            range: "(0.5, 1]",
        });
    }
    if p_w <= 0.5 {
        return Err(Error::NoInformation(p_w));
    }
    Ok((2.0 * (2.0 * p_w - 1.0).ln().abs()).sqrt())
}

fn a_term(alpha: f64, beta: f64) -> f64 {
    alpha.sin() * beta.cos().powi(2)
}

fn b_term(alpha: f64, beta: f64) -> f64 {
    alpha.cos() * beta.sin() * beta.cos()
}

/// `D(rho_i, rho_bar)` where `rho_bar` re-mixes both outcomes of the final
/// measurement along `beta` after coupling at `g`.
pub fn nonselective_distance(s: &Scenario) -> f64 {
    let (a, b, e) = (s.alpha, s.beta, s.e());
    let z = a_term(a, b) - b_term(a, b) * e;
    let x = a.cos() + b_term(a + PI / 2.0, b) - a_term(a + PI / 2.0, b) * e;
    0.5 * (z * z + x * x).sqrt()
}

/// Projective-coupling limit of [`nonselective_distance`].
pub fn nonselective_distance_strong(alpha: f64, beta: f64) -> f64 {
    let x = alpha.cos() + b_term(alpha + PI / 2.0, beta);
    0.5 * (a_term(alpha, beta).powi(2) + x * x).sqrt()
}

/// Weak-coupling limit of [`nonselective_distance`].
pub fn nonselective_distance_weak(alpha: f64, beta: f64) -> f64 {
    0.5 * (alpha - beta).sin().abs()
}

/// `(D(rho_i, |up_beta><up_beta|), D(rho_i, |down_beta><down_beta|))`.
pub fn postselected_distances(alpha: f64, beta: f64) -> (f64, f64) {
    let c = (alpha - beta).cos();
    ((0.5 * (1.0 - c)).max(0.0).sqrt(), (0.5 * (1.0 + c)).max(0.0).sqrt())
}

/// Lower bound on `D(rho_i, rho_f) - D(rho_i, rho_bar)` for a qubit with
/// `rho_bar = p_f |f><f| + (1 - p_f) |f_perp><f_perp|`:
/// `(1 - p_f)(|<f_perp|i>| - |<f|i>|)`.
pub fn postselection_distance_bound(i: &PureState, f: &PureState, p_f: f64) -> Result<f64> {
    if i.dim() != 2 {
        return Err(Error::NotQubit(i.dim()));
    }
    if !(0.0..=1.0).contains(&p_f) {
        return Err(Error::OutOfRange {
            name: "p_f",
            value: p_f,
            range: "[0, 1]",
        });
    }
    let f_perp = f.qubit_orthogonal()?;
    Ok((1.0 - p_f) * (f_perp.inner(i).norm() - f.inner(i).norm()))
}

/// `<phi|sigma_w|phi> = e^{-g^2/4}`, independent of the preparation.
pub fn pointer_fidelity_weak(g: f64) -> f64 {
    (-g * g / 4.0).exp()
}

/// `<phi|sigma_f|phi>` after post-selection on `up_x` (`beta = 0` only).
pub fn pointer_fidelity_final(s: &Scenario) -> Result<f64> {
    if s.beta != 0.0 {
        return Err(Error::RequiresBetaZero(s.beta));
    }
    let c = s.alpha.cos();
    let den = 1.0 + c * s.e();
    if den.abs() <= SINGULAR_TOL {
        return Err(Error::Singular(den));
    }
    Ok((1.0 + c) * pointer_fidelity_weak(s.g_over_delta) / den)
}

/// Pointer fidelity predicted by a pure shift of `g tan(alpha/2)`.
pub fn pointer_fidelity_wv(alpha: f64, g: f64) -> f64 {
    (-(g * (alpha / 2.0).tan()).powi(2) / 4.0).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Protocol {
    WithoutPostSelection,
    WithPostSelection,
}

fn check_fidelity_bound(f_b: f64) -> Result<()> {
    if f_b.is_nan() || f_b <= 0.0 {
        return Err(Error::OutOfRange {
            name: "F_b",
            value: f_b,
            range: "(0, 1)",
        });
    }
    if f_b >= 1.0 {
        return Err(Error::NoInteractionNeeded(f_b));
    }
    Ok(())
}

/// `C + sqrt(C^2 - 4 F_b^2 cos a)` with `C = 1 + cos a`.
pub fn kappa(alpha: f64, f_b: f64) -> f64 {
    let c = alpha.cos();
    let big_c = 1.0 + c;
    big_c + (big_c * big_c - 4.0 * f_b * f_b * c).max(0.0).sqrt()
}

/// Smallest coupling (units of delta) that lowers the pointer fidelity to
/// `f_b`. With post-selection the final state is `up_x`.
pub fn g_min(f_b: f64, alpha: f64, protocol: Protocol) -> Result<f64> {
    check_fidelity_bound(f_b)?;
    let log = match protocol {
        Protocol::WithoutPostSelection => f_b.ln().abs(),
        Protocol::WithPostSelection => (kappa(alpha, f_b) / (2.0 * f_b)).ln().max(0.0),
    };
    Ok(2.0 * log.sqrt())
}

/// `|cos a| D_p^2 / 2`, lower bound on the system disturbance of a
/// coupling that moves the pointer by trace distance `d_pointer`.
pub fn tradeoff_lower_bound(alpha: f64, d_pointer: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&d_pointer) {
        return Err(Error::OutOfRange {
            name: "D_pointer",
            value: d_pointer,
            range: "[0, 1]",
        });
    }
    Ok(0.5 * alpha.cos().abs() * d_pointer * d_pointer)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeoffReport {
    pub alpha: f64,
    pub beta: f64,
    pub f_b: f64,
    pub g_min_i: f64,
    pub g_min_ii: f64,
    pub d_min_i: f64,
    pub d_min_ii: f64,
    /// `|<f|i>|^2`, the weak-limit success probability.
    pub p_ap: f64,
    /// Exact success probability at `g_min_ii`.
    pub p_f: f64,
    pub kappa: f64,
    pub gamma: f64,
}

/// Minimal couplings and system disturbances for pointer fidelity `f_b`,
/// with and without post-selection on `up_x`.
pub fn tradeoff_report(alpha: f64, f_b: f64) -> Result<TradeoffReport> {
    check_fidelity_bound(f_b)?;
    let c = alpha.cos();
    let kappa = kappa(alpha, f_b);
    let gamma = 4.0 / (kappa * kappa);
    let g_min_ii = g_min(f_b, alpha, Protocol::WithPostSelection)?;
    Ok(TradeoffReport {
        alpha,
        beta: 0.0,
        f_b,
        g_min_i: g_min(f_b, alpha, Protocol::WithoutPostSelection)?,
        g_min_ii,
        d_min_i: 0.5 * c.abs() * (1.0 - f_b * f_b),
        d_min_ii: 0.5 * c.abs() * (1.0 - gamma * f_b * f_b),
        p_ap: (alpha / 2.0).cos().powi(2),
        p_f: 0.5 * (1.0 + c * coherence_factor(g_min_ii)),
        kappa,
        gamma,
    })
}
