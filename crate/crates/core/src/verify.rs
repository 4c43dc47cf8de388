//! Cross-checks between the exact engine, the spin-1/2 closed forms and the
//! grid oracle.

use std::f64::consts::PI;

use crate::engine::{self, MeasurementSetup};
use crate::error::{Error, Result};
use crate::oracle::{self, DenseJoint};
use crate::pointer::{frame_position_mean, GaussianPointer};
use crate::qcore::{trace_distance, DensityMatrix, PureState};
use crate::spinhalf::{self, sigma_z, spin_down, spin_up, Scenario};

/// Tolerance between engine and closed forms.
pub const CLOSED_FORM_TOL: f64 = 1e-12;
/// Tolerance between engine and grid oracle.
pub const ORACLE_TOL: f64 = 1e-6;

pub const LATTICE_ALPHAS: [f64; 5] = [0.1 * PI, 0.3 * PI, 0.6 * PI, 0.9 * PI, 1.3 * PI];
pub const LATTICE_G_OVER_DELTA: [f64; 5] = [0.1, 0.5, 1.0, 2.0, 5.0];
pub const LATTICE_BETAS: [f64; 3] = [0.0, 0.3 * PI, -0.2 * PI];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub n_points: usize,
    /// Error of the pointer mean.
    pub q_mean_err: f64,
    pub p_f_err: f64,
    /// Largest elementwise error of the reduced system state.
    pub rho_err: f64,
    pub fidelity_err: f64,
}

impl ConvergenceRow {
    pub fn max_err(&self) -> f64 {
        self.q_mean_err
            .max(self.p_f_err)
            .max(self.rho_err)
            .max(self.fidelity_err)
    }
}

fn max_abs_diff(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    (a.matrix() - b.matrix()).iter().fold(0.0f64, |m, z| m.max(z.norm()))
}

/// Oracle error against the engine for each grid size in `n_list`. Without
/// post-selection the reduced system is compared; with it, `|f><f|` is
/// known exactly and `rho_err` is zero.
pub fn convergence_report(
    setup: &MeasurementSetup,
    f: Option<&PureState>,
    n_list: &[usize],
) -> Result<Vec<ConvergenceRow>> {
    if n_list.is_empty() || n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidGrid("grid sizes must be ascending".into()));
    }
    let js = engine::evolve(setup);
    let (exact_q, exact_p, exact_fid, exact_rho) = match f {
        None => (
            engine::pointer_mean(&js)?,
            1.0,
            engine::pointer_fidelity(&js)?,
            Some(engine::reduced_system(&js)?),
        ),
        Some(f) => {
            let (ps, p) = engine::post_select(&js, f)?;
            (
                engine::conditional_pointer_shift(&ps)?,
                p,
                engine::pointer_fidelity(&ps)?,
                None,
            )
        }
    };
    n_list
        .iter()
        .map(|&n| {
            let grid = oracle::grid_for(setup, n)?;
            let dj = oracle::build_joint(setup, &grid)?;
            let obs = oracle::oracle_observables(&dj, f)?;
            let fid = oracle::grid_fidelity_with_initial(&obs.sigma_reduced, &grid, dj.delta());
            Ok(ConvergenceRow {
                n_points: n,
                q_mean_err: (obs.q_mean - exact_q).abs(),
                p_f_err: (obs.p_f - exact_p).abs(),
                rho_err: exact_rho.as_ref().map_or(0.0, |r| max_abs_diff(r, &obs.rho_reduced)),
                fidelity_err: (fid - exact_fid).abs(),
            })
        })
        .collect()
}

/// One quantity evaluated three ways at a lattice point.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub alpha: f64,
    pub g_over_delta: f64,
    /// `None` for quantities that do not involve post-selection.
    pub beta: Option<f64>,
    pub quantity: String,
    pub engine: f64,
    /// Absent where no spin-1/2 closed form exists.
    pub closed: Option<f64>,
    pub oracle: f64,
}

impl Comparison {
    pub fn closed_deviation(&self) -> Option<f64> {
        self.closed.map(|c| (c - self.engine).abs())
    }

    pub fn oracle_deviation(&self) -> f64 {
        (self.oracle - self.engine).abs()
    }

    pub fn passes(&self) -> bool {
        self.closed_deviation().is_none_or(|d| d <= CLOSED_FORM_TOL) && self.oracle_deviation() <= ORACLE_TOL
    }
}

struct Point<'a> {
    alpha: f64,
    g: f64,
    out: &'a mut Vec<Comparison>,
}

impl Point<'_> {
    fn push(&mut self, beta: Option<f64>, quantity: impl Into<String>, engine: f64, closed: Option<f64>, oracle: f64) {
        self.out.push(Comparison {
            alpha: self.alpha,
            g_over_delta: self.g,
            beta,
            quantity: quantity.into(),
            engine,
            closed,
            oracle,
        });
    }
}

/// Spin-1/2 comparisons at one `(alpha, g)` pair, for every `beta`.
///
/// Covers the reduced system state and its distance to the preparation, the
/// unselected pointer (mean, fidelity, distance to the initial pointer) and
/// per post-selection the probability, conditional pointer mean, pointer
/// fidelity and distance, and the distance to the re-mixed final state.
pub fn compare_spin_point(alpha: f64, g: f64, betas: &[f64], n_points: usize) -> Result<Vec<Comparison>> {
    let pointer = GaussianPointer::unit();
    let rho_i = spin_up(alpha).projector();
    let setup = MeasurementSetup::new(rho_i.clone(), sigma_z(), g, pointer)?;
    let js = engine::evolve(&setup);
    let grid = oracle::grid_for(&setup, n_points)?;
    let dj = oracle::build_joint(&setup, &grid)?;
    let sigma_i = oracle::initial_pointer(&grid, pointer.delta());

    let mut out = Vec::new();
    let mut pt = Point { alpha, g, out: &mut out };
    let s0 = Scenario::new(alpha, 0.0, g);

    let rho_w = engine::reduced_system(&js)?;
    let closed = spinhalf::state_family(&s0).rho_w;
    let unselected = oracle::oracle_observables(&dj, None)?;
    for (label, r, c) in [("rho_w[0,0]", 0, 0), ("rho_w[0,1]", 0, 1), ("rho_w[1,1]", 1, 1)] {
        let e = rho_w.matrix()[(r, c)];
        let o = unselected.rho_reduced.matrix()[(r, c)];
        let k = closed.matrix()[(r, c)];
        pt.push(None, format!("{label}.re"), e.re, Some(k.re), o.re);
        pt.push(None, format!("{label}.im"), e.im, Some(k.im), o.im);
    }
    pt.push(
        None,
        "D(rho_i,rho_w)",
        trace_distance(&rho_i, &rho_w)?,
        Some(spinhalf::disturbance_weak(&s0)),
        trace_distance(&rho_i, &unselected.rho_reduced)?,
    );
    pt.push(
        None,
        "q_mean",
        engine::pointer_mean(&js)?,
        Some(g * alpha.sin()),
        unselected.q_mean,
    );
    pt.push(
        None,
        "F(sigma_i,sigma_w)",
        engine::pointer_fidelity(&js)?,
        Some(spinhalf::pointer_fidelity_weak(g)),
        oracle::grid_fidelity_with_initial(&unselected.sigma_reduced, &grid, pointer.delta()),
    );
    pt.push(
        None,
        "D(sigma_i,sigma_w)",
        engine::pointer_disturbance(&js)?,
        None,
        oracle::grid_trace_distance(&sigma_i, &unselected.sigma_reduced)?,
    );

    for &beta in betas {
        compare_postselection(&mut pt, &js, &dj, &sigma_i, beta)?;
    }
    Ok(out)
}

fn compare_postselection(
    pt: &mut Point<'_>,
    js: &engine::JointState,
    dj: &DenseJoint,
    sigma_i: &nalgebra::DMatrix<num_complex::Complex64>,
    beta: f64,
) -> Result<()> {
    let (alpha, g) = (pt.alpha, pt.g);
    let s = Scenario::new(alpha, beta, g);
    let f = spin_up(beta);
    let (ps, p) = engine::post_select(js, &f)?;
    let obs = oracle::oracle_observables(dj, Some(&f))?;
    let b = Some(beta);

    pt.push(b, "P(f)", p, Some(spinhalf::postselection_probability(&s)), obs.p_f);
    let shift = engine::conditional_pointer_shift(&ps)?;
    pt.push(b, "q_mean|f", shift, Some(g * spinhalf::exact_conditional(&s)?), obs.q_mean);
    let sigma_f = engine::reduced_pointer(&ps);
    // The first moment of the reduced pointer is an independent route to the
    // same shift; it has no separate oracle column.
    let moment = frame_position_mean(&sigma_f)?;
    pt.push(b, "q_mean|f (moment)", moment, Some(shift), obs.q_mean);

    let closed_fid = if beta == 0.0 {
        Some(spinhalf::pointer_fidelity_final(&s)?)
    } else {
        None
    };
    pt.push(
        b,
        "F(sigma_i,sigma_f)",
        engine::pointer_fidelity(&ps)?,
        closed_fid,
        oracle::grid_fidelity_with_initial(&obs.sigma_reduced, dj.grid(), dj.delta()),
    );
    pt.push(
        b,
        "D(sigma_i,sigma_f)",
        engine::pointer_disturbance(&ps)?,
        None,
        oracle::grid_trace_distance(sigma_i, &obs.sigma_reduced)?,
    );

    let rho_i = spin_up(alpha).projector();
    let basis = [f.clone(), spin_down(beta)];
    let bar = engine::nonselective_final(js, &basis)?;
    let p_perp = oracle::postselection_probability(dj, &basis[1])?;
    let oracle_bar = DensityMatrix::mixture(&[obs.p_f, p_perp], &basis)?;
    pt.push(
        b,
        "D(rho_i,rho_bar)",
        trace_distance(&rho_i, &bar)?,
        Some(spinhalf::nonselective_distance(&s)),
        trace_distance(&rho_i, &oracle_bar)?,
    );
    pt.push(
        b,
        "D(rho_i,rho_f)",
        trace_distance(&rho_i, &f.projector())?,
        Some(spinhalf::postselected_distances(alpha, beta).0),
        trace_distance(&rho_i, &obs.rho_reduced)?,
    );
    Ok(())
}

#[derive(Debug, Clone, Default)]
pub struct TripleReport {
    pub comparisons: Vec<Comparison>,
}

impl TripleReport {
    pub fn max_closed_deviation(&self) -> f64 {
        self.comparisons
            .iter()
            .filter_map(Comparison::closed_deviation)
            .fold(0.0, f64::max)
    }

    pub fn max_oracle_deviation(&self) -> f64 {
        self.comparisons
            .iter()
            .map(Comparison::oracle_deviation)
            .fold(0.0, f64::max)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Comparison> {
        self.comparisons.iter().filter(|c| !c.passes())
    }

    pub fn passes(&self) -> bool {
        self.failures().next().is_none()
    }
}

/// Runs [`compare_spin_point`] over the product lattice, sequentially.
pub fn triple_agreement(alphas: &[f64], gs: &[f64], betas: &[f64], n_points: usize) -> Result<TripleReport> {
    let mut comparisons = Vec::new();
    for &alpha in alphas {
        for &g in gs {
            comparisons.extend(compare_spin_point(alpha, g, betas, n_points)?);
        }
    }
    Ok(TripleReport { comparisons })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spin_setup(alpha: f64, g: f64) -> MeasurementSetup {
        MeasurementSetup::new(spin_up(alpha).projector(), sigma_z(), g, GaussianPointer::unit()).unwrap()
    }

    #[test]
    fn convergence_decreases_and_reaches_tolerance() {
        let setup = spin_setup(0.3 * PI, 1.0);
        let f = spin_up(0.0);
        let err = convergence_report(&setup, Some(&f), &[64, 2048]).unwrap_err();
        assert!(matches!(err, Error::InvalidGrid(_)));
        let rows = convergence_report(&setup, Some(&f), &[256, 512, 2048]).unwrap();
        assert!(rows.last().unwrap().max_err() <= 1e-6);
        assert!(rows.windows(2).all(|w| w[1].max_err() <= w[0].max_err() + 1e-13));
    }

    #[test]
    fn convergence_at_strong_coupling() {
        let rows = convergence_report(&spin_setup(0.6, 10.0), None, &[256, 2048]).unwrap();
        assert!(rows[1].max_err() <= 1e-6, "{rows:?}");
    }

    #[test]
    fn convergence_without_coupling_is_exact() {
        let rows = convergence_report(&spin_setup(0.6, 0.0), Some(&spin_up(0.2)), &[256, 512]).unwrap();
        for r in rows {
            assert!(r.max_err() < 1e-12, "{r:?}");
        }
    }

    #[test]
    fn rejects_unsorted_sizes() {
        assert!(convergence_report(&spin_setup(0.6, 1.0), None, &[512, 256]).is_err());
        assert!(convergence_report(&spin_setup(0.6, 1.0), None, &[]).is_err());
    }

    #[test]
    fn single_point_agrees() {
        let rows = compare_spin_point(0.3 * PI, 1.0, &[0.0, 0.5], 1024).unwrap();
        for c in &rows {
            assert!(c.passes(), "{c:?}");
        }
        assert!(rows.iter().any(|c| c.quantity == "P(f)"));
    }
}
