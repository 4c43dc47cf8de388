//! Table builders for each command.
//!
//! Every row is computed by the frame engine (or a closed form where the
//! engine has nothing to add). With the oracle enabled, each row gains an
//! `oracle_max_dev` column: the largest absolute difference between the
//! row's values and the same quantities from the dense grid oracle.

use anyhow::Result;
use rayon::prelude::*;
use wvlab::engine::{self, JointState, MeasurementSetup};
use wvlab::oracle::{self, DenseJoint};
use wvlab::pointer::GaussianPointer;
use wvlab::spinhalf::{self, sigma_z, spin_down, spin_up, Protocol};
use wvlab::verify::{self, Comparison};
use wvlab::{trace_distance, DensityMatrix, PureState};

use crate::parse::{Param, ParamList};
use crate::table::{Cell, Table};

/// Invalid parameter values; reported like command-line syntax errors.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

macro_rules! usage {
    ($($t:tt)*) => {
        anyhow::Error::new(UsageError(format!($($t)*)))
    };
}

/// Grid oracle settings; `None` disables the oracle column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleOpts {
    pub points: Option<usize>,
}

impl OracleOpts {
    fn params(&self) -> Vec<(String, String)> {
        match self.points {
            Some(n) => vec![("oracle".into(), "on".into()), ("oracle_points".into(), n.to_string())],
            None => vec![("oracle".into(), "off".into())],
        }
    }

    fn column(&self, columns: &mut Vec<String>) {
        if self.points.is_some() {
            columns.push("oracle_max_dev".into());
        }
    }
}

fn setup(alpha: f64, g: f64) -> Result<MeasurementSetup> {
    Ok(MeasurementSetup::new(
        spin_up(alpha).projector(),
        sigma_z(),
        g,
        GaussianPointer::unit(),
    )?)
}

fn nan_on_err(r: wvlab::Result<f64>) -> f64 {
    r.unwrap_or(f64::NAN)
}

fn labelled(prefix: &str, key: &str, p: &Param) -> String {
    format!("{prefix}({key}={})", p.label)
}

/// Couplings are reported as g/delta with the pointer width fixed at 1.
fn table(command: &str, mut params: Vec<(String, String)>, columns: Vec<String>) -> Table {
    params.push(param("delta", 1));
    Table::new(command, params, columns)
}

fn param(k: &str, v: impl ToString) -> (String, String) {
    (k.to_string(), v.to_string())
}

/// Running maximum of absolute engine/oracle differences. Entries where
/// either side is undefined are skipped.
#[derive(Debug, Default)]
struct Deviation(f64);

impl Deviation {
    fn add(&mut self, engine: f64, oracle: f64) {
        if engine.is_finite() && oracle.is_finite() {
            self.0 = self.0.max((engine - oracle).abs());
        }
    }
}

/// Dense oracle state for a spin prepared at `alpha`.
struct Dense {
    dj: DenseJoint,
}

impl Dense {
    fn new(alpha: f64, g: f64, n: usize) -> Result<Self> {
        let s = setup(alpha, g)?;
        let grid = oracle::grid_for(&s, n)?;
        Ok(Self {
            dj: oracle::build_joint(&s, &grid)?,
        })
    }

    fn unselected(&self) -> Result<oracle::OracleObservables> {
        Ok(oracle::oracle_observables(&self.dj, None)?)
    }

    /// `None` when the post-selection is too rare to compare.
    fn selected(&self, f: &PureState) -> Result<Option<oracle::OracleObservables>> {
        let obs = oracle::oracle_observables(&self.dj, Some(f))?;
        Ok((!obs.low_statistics).then_some(obs))
    }

    fn fidelity(&self, obs: &oracle::OracleObservables) -> f64 {
        oracle::grid_fidelity_with_initial(&obs.sigma_reduced, self.dj.grid(), self.dj.delta())
    }

    fn pointer_distance(&self, obs: &oracle::OracleObservables) -> Result<f64> {
        let sigma_i = oracle::initial_pointer(self.dj.grid(), self.dj.delta());
        Ok(oracle::grid_trace_distance(&sigma_i, &obs.sigma_reduced)?)
    }

    fn remixed(&self, basis: &[PureState; 2]) -> Result<DensityMatrix> {
        let p0 = oracle::postselection_probability(&self.dj, &basis[0])?;
        let p1 = oracle::postselection_probability(&self.dj, &basis[1])?;
        Ok(DensityMatrix::mixture(&[p0, p1], basis)?)
    }
}

fn rows<T: Sync>(xs: &[T], f: impl Fn(&T) -> Result<Vec<Cell>> + Sync + Send) -> Result<Vec<Vec<Cell>>> {
    xs.par_iter().map(f).collect()
}

fn cells(values: impl IntoIterator<Item = f64>) -> Vec<Cell> {
    values.into_iter().map(Cell::Num).collect()
}

/// Conditional `<sigma_z>` versus preparation angle.
pub fn fig1(alphas: &ParamList, gs: &ParamList, beta: &Param, abl_beta: &Param, o: OracleOpts) -> Result<Table> {
    if gs.0.iter().any(|g| g.value <= 0.0) {
        return Err(usage!("fig1 needs g/delta > 0 (the exact curve is the pointer shift divided by g)"));
    }
    let mut columns: Vec<String> = ["alpha", "mean_i", "abl", "weak_value"].map(String::from).into();
    columns.extend(gs.0.iter().map(|g| labelled("exact", "g", g)));
    o.column(&mut columns);
    let mut params = vec![
        param("alpha", alphas.describe()),
        param("g_over_delta", gs.describe()),
        param("beta", &beta.label),
        param("abl_beta", &abl_beta.label),
    ];
    params.extend(o.params());
    let mut t = table("fig1", params, columns);

    let f = spin_up(beta.value);
    let f_abl = spin_up(abl_beta.value);
    t.rows = rows(&alphas.0, |a| {
        let rho = spin_up(a.value).projector();
        let mut r = vec![
            a.value,
            rho.expectation(&sigma_z())?,
            nan_on_err(engine::abl_expectation(&rho, &sigma_z(), &f_abl)),
            engine::weak_value(&rho, &sigma_z(), &f).map_or(f64::NAN, |w| w.re),
        ];
        let mut dev = Deviation::default();
        for g in &gs.0 {
            let js = engine::evolve(&setup(a.value, g.value)?);
            let shift = engine::post_select(&js, &f).and_then(|(ps, _)| engine::conditional_pointer_shift(&ps));
            let shift = nan_on_err(shift);
            r.push(shift / g.value);
            if let Some(n) = o.points {
                if let Some(obs) = Dense::new(a.value, g.value, n)?.selected(&f)? {
                    dev.add(shift, obs.q_mean);
                }
            }
        }
        if o.points.is_some() {
            r.push(dev.0);
        }
        Ok(cells(r))
    })?;
    Ok(t)
}

fn weak_state(alpha: f64, g: f64) -> Result<DensityMatrix> {
    Ok(engine::nonselective_channel(&setup(alpha, g)?)?)
}

/// Coherence kept by a finite coupling relative to a projective measurement.
pub fn fig2a(alphas: &ParamList, gs: &ParamList, o: OracleOpts) -> Result<Table> {
    let mut columns = vec!["alpha".to_string()];
    columns.extend(gs.0.iter().map(|g| labelled("preserved", "g", g)));
    o.column(&mut columns);
    let mut params = vec![param("alpha", alphas.describe()), param("g_over_delta", gs.describe())];
    params.extend(o.params());
    let mut t = table("fig2a", params, columns);

    t.rows = rows(&alphas.0, |a| {
        let rho_i = spin_up(a.value).projector();
        let strong = spinhalf::disturbance_strong(a.value);
        let mut r = vec![a.value];
        let mut dev = Deviation::default();
        for g in &gs.0 {
            let v = strong - trace_distance(&rho_i, &weak_state(a.value, g.value)?)?;
            r.push(v);
            if let Some(n) = o.points {
                let obs = Dense::new(a.value, g.value, n)?.unselected()?;
                dev.add(v, strong - trace_distance(&rho_i, &obs.rho_reduced)?);
            }
        }
        if o.points.is_some() {
            r.push(dev.0);
        }
        Ok(cells(r))
    })?;
    Ok(t)
}

/// Distinguishability of two preparations before and after measurement.
pub fn fig2b(alphas: &ParamList, alpha_prime: &Param, gs: &ParamList, o: OracleOpts) -> Result<Table> {
    let mut columns = vec!["alpha".to_string(), "initial".to_string()];
    columns.extend(gs.0.iter().map(|g| labelled("weak", "g", g)));
    columns.push("strong".into());
    o.column(&mut columns);
    let mut params = vec![
        param("alpha", alphas.describe()),
        param("alpha_prime", &alpha_prime.label),
        param("g_over_delta", gs.describe()),
    ];
    params.extend(o.params());
    let mut t = table("fig2b", params, columns);

    let ap = alpha_prime.value;
    t.rows = rows(&alphas.0, |a| {
        let initial = trace_distance(&spin_up(a.value).projector(), &spin_up(ap).projector())?;
        let mut r = vec![a.value, initial];
        let mut dev = Deviation::default();
        for g in &gs.0 {
            let v = trace_distance(&weak_state(a.value, g.value)?, &weak_state(ap, g.value)?)?;
            r.push(v);
            if let Some(n) = o.points {
                let x = Dense::new(a.value, g.value, n)?.unselected()?;
                let y = Dense::new(ap, g.value, n)?.unselected()?;
                dev.add(v, trace_distance(&x.rho_reduced, &y.rho_reduced)?);
            }
        }
        r.push(spinhalf::two_ensemble_distances(a.value, ap, 0.0).strong);
        if o.points.is_some() {
            r.push(dev.0);
        }
        Ok(cells(r))
    })?;
    Ok(t)
}

/// Distance from the preparation to the post-selected and re-mixed states.
pub fn fig3(alphas: &ParamList, beta: &Param, gs: &ParamList, o: OracleOpts) -> Result<Table> {
    let mut columns: Vec<String> = ["alpha", "d_up", "d_down", "d_bar_strong", "d_bar_weak"].map(String::from).into();
    columns.extend(gs.0.iter().map(|g| labelled("d_bar", "g", g)));
    o.column(&mut columns);
    let mut params = vec![
        param("alpha", alphas.describe()),
        param("beta", &beta.label),
        param("g_over_delta", gs.describe()),
    ];
    params.extend(o.params());
    let mut t = table("fig3", params, columns);

    let basis = [spin_up(beta.value), spin_down(beta.value)];
    t.rows = rows(&alphas.0, |a| {
        let rho_i = spin_up(a.value).projector();
        let remixed = |g: f64| -> Result<f64> {
            let js = engine::evolve(&setup(a.value, g)?);
            Ok(trace_distance(&rho_i, &engine::nonselective_final(&js, &basis)?)?)
        };
        let mut r = vec![
            a.value,
            trace_distance(&rho_i, &basis[0].projector())?,
            trace_distance(&rho_i, &basis[1].projector())?,
            spinhalf::nonselective_distance_strong(a.value, beta.value),
            remixed(0.0)?,
        ];
        let mut dev = Deviation::default();
        for g in &gs.0 {
            let v = remixed(g.value)?;
            r.push(v);
            if let Some(n) = o.points {
                let bar = Dense::new(a.value, g.value, n)?.remixed(&basis)?;
                dev.add(v, trace_distance(&rho_i, &bar)?);
            }
        }
        if o.points.is_some() {
            r.push(dev.0);
        }
        Ok(cells(r))
    })?;
    Ok(t)
}

/// Pointer fidelities versus coupling strength, post-selecting on `up_x`.
pub fn fig4(gs: &ParamList, alphas: &ParamList, o: OracleOpts) -> Result<Table> {
    if gs.0.iter().any(|g| g.value < 0.0) {
        return Err(usage!("fig4 needs g/delta >= 0"));
    }
    let mut columns = vec!["g_over_delta".to_string(), "f_w".to_string()];
    columns.extend(alphas.0.iter().map(|a| labelled("f_f", "alpha", a)));
    columns.extend(alphas.0.iter().map(|a| labelled("f_wv", "alpha", a)));
    o.column(&mut columns);
    let mut params = vec![param("g_over_delta", gs.describe()), param("alpha", alphas.describe())];
    params.extend(o.params());
    let mut t = table("fig4", params, columns);

    let f = spin_up(0.0);
    t.rows = rows(&gs.0, |g| {
        let mut f_w = f64::NAN;
        let mut f_f = Vec::new();
        let mut dev = Deviation::default();
        for a in &alphas.0 {
            let js = engine::evolve(&setup(a.value, g.value)?);
            f_w = engine::pointer_fidelity(&js)?;
            let ff = nan_on_err(engine::post_select(&js, &f).and_then(|(ps, _)| engine::pointer_fidelity(&ps)));
            f_f.push(ff);
            if let Some(n) = o.points {
                let d = Dense::new(a.value, g.value, n)?;
                dev.add(f_w, d.fidelity(&d.unselected()?));
                if let Some(obs) = d.selected(&f)? {
                    dev.add(ff, d.fidelity(&obs));
                }
            }
        }
        if alphas.0.is_empty() {
            f_w = engine::pointer_fidelity(&engine::evolve(&setup(0.0, g.value)?))?;
        }
        let mut r = vec![g.value, f_w];
        r.extend(f_f);
        r.extend(alphas.0.iter().map(|a| spinhalf::pointer_fidelity_wv(a.value, g.value)));
        if o.points.is_some() {
            r.push(dev.0);
        }
        Ok(cells(r))
    })?;
    Ok(t)
}

fn check_fidelity_bounds(fbs: &ParamList) -> Result<()> {
    if let Some(p) = fbs.0.iter().find(|p| !(p.value > 0.0 && p.value < 1.0)) {
        return Err(usage!("pointer fidelity bound must lie in (0, 1), got {}", p.label));
    }
    Ok(())
}

/// Oracle deviations for one trade-off point: system disturbance and pointer
/// fidelity at both minimal couplings, plus the success probability.
fn tradeoff_deviation(rep: &spinhalf::TradeoffReport, n: usize, dev: &mut Deviation) -> Result<()> {
    let rho_i = spin_up(rep.alpha).projector();
    let f = spin_up(rep.beta);

    let d = Dense::new(rep.alpha, rep.g_min_i, n)?;
    let obs = d.unselected()?;
    dev.add(rep.d_min_i, trace_distance(&rho_i, &obs.rho_reduced)?);
    dev.add(rep.f_b, d.fidelity(&obs));

    let d = Dense::new(rep.alpha, rep.g_min_ii, n)?;
    let obs = d.unselected()?;
    dev.add(rep.d_min_ii, trace_distance(&rho_i, &obs.rho_reduced)?);
    dev.add(rep.p_f, oracle::postselection_probability(&d.dj, &f)?);
    if let Some(sel) = d.selected(&f)? {
        dev.add(rep.f_b, d.fidelity(&sel));
    }
    Ok(())
}

/// Minimal disturbance versus the pointer fidelity bound.
pub fn fig5(fbs: &ParamList, alphas: &ParamList, o: OracleOpts) -> Result<Table> {
    check_fidelity_bounds(fbs)?;
    let mut columns = vec!["f_b".to_string(), "g_min_i".to_string()];
    for a in &alphas.0 {
        columns.push(labelled("g_min_ii", "alpha", a));
        columns.push(labelled("d_min_i", "alpha", a));
        columns.push(labelled("d_min_ii", "alpha", a));
    }
    o.column(&mut columns);
    let mut params = vec![param("f_b", fbs.describe()), param("alpha", alphas.describe())];
    params.extend(o.params());
    let mut t = table("fig5", params, columns);

    t.rows = rows(&fbs.0, |fb| {
        let mut r = vec![fb.value, spinhalf::g_min(fb.value, 0.0, Protocol::WithoutPostSelection)?];
        let mut dev = Deviation::default();
        for a in &alphas.0 {
            let rep = spinhalf::tradeoff_report(a.value, fb.value)?;
            r.extend([rep.g_min_ii, rep.d_min_i, rep.d_min_ii]);
            if let Some(n) = o.points {
                tradeoff_deviation(&rep, n, &mut dev)?;
            }
        }
        if o.points.is_some() {
            r.push(dev.0);
        }
        Ok(cells(r))
    })?;
    Ok(t)
}

pub const TRADEOFF_COLUMNS: [&str; 11] = [
    "alpha", "beta", "f_b", "g_min_i", "g_min_ii", "d_min_i", "d_min_ii", "p_ap", "p_f", "kappa", "gamma",
];

/// Full trade-off report for every `(alpha, f_b)` pair.
pub fn tradeoff(alphas: &ParamList, fbs: &ParamList, o: OracleOpts) -> Result<Table> {
    check_fidelity_bounds(fbs)?;
    let mut columns: Vec<String> = TRADEOFF_COLUMNS.map(String::from).into();
    o.column(&mut columns);
    let mut params = vec![param("alpha", alphas.describe()), param("f_b", fbs.describe())];
    params.extend(o.params());
    let mut t = table("tradeoff", params, columns);

    let pairs: Vec<(f64, f64)> = alphas
        .0
        .iter()
        .flat_map(|a| fbs.0.iter().map(move |fb| (a.value, fb.value)))
        .collect();
    t.rows = rows(&pairs, |&(a, fb)| {
        let rep = spinhalf::tradeoff_report(a, fb)?;
        let mut r = vec![
            rep.alpha, rep.beta, rep.f_b, rep.g_min_i, rep.g_min_ii, rep.d_min_i, rep.d_min_ii, rep.p_ap, rep.p_f,
            rep.kappa, rep.gamma,
        ];
        if let Some(n) = o.points {
            let mut dev = Deviation::default();
            tradeoff_deviation(&rep, n, &mut dev)?;
            r.push(dev.0);
        }
        Ok(cells(r))
    })?;
    Ok(t)
}

pub const SWEEP_COLUMNS: [&str; 15] = [
    "alpha",
    "beta",
    "g_over_delta",
    "p_f",
    "shift",
    "exact",
    "abl",
    "weak_value",
    "d_rho_w",
    "d_rho_bar",
    "d_rho_f",
    "f_w",
    "f_f",
    "d_sigma_w",
    "d_sigma_f",
];

struct SweepValues {
    p_f: f64,
    shift: f64,
    d_rho_w: f64,
    d_rho_bar: f64,
    d_rho_f: f64,
    f_w: f64,
    f_f: f64,
    d_sigma_w: f64,
    d_sigma_f: f64,
}

fn sweep_engine(js: &JointState, rho_i: &DensityMatrix, basis: &[PureState; 2]) -> Result<SweepValues> {
    let selected = engine::post_select(js, &basis[0]);
    let (p_f, shift, f_f, d_sigma_f) = match &selected {
        Ok((ps, p)) => (
            *p,
            nan_on_err(engine::conditional_pointer_shift(ps)),
            engine::pointer_fidelity(ps)?,
            engine::pointer_disturbance(ps)?,
        ),
        Err(_) => (0.0, f64::NAN, f64::NAN, f64::NAN),
    };
    Ok(SweepValues {
        p_f,
        shift,
        d_rho_w: trace_distance(rho_i, &engine::reduced_system(js)?)?,
        d_rho_bar: trace_distance(rho_i, &engine::nonselective_final(js, basis)?)?,
        d_rho_f: if selected.is_ok() {
            trace_distance(rho_i, &basis[0].projector())?
        } else {
            f64::NAN
        },
        f_w: engine::pointer_fidelity(js)?,
        f_f,
        d_sigma_w: engine::pointer_disturbance(js)?,
        d_sigma_f,
    })
}

fn sweep_deviation(v: &SweepValues, d: &Dense, rho_i: &DensityMatrix, basis: &[PureState; 2]) -> Result<f64> {
    let mut dev = Deviation::default();
    let un = d.unselected()?;
    dev.add(v.p_f, oracle::postselection_probability(&d.dj, &basis[0])?);
    dev.add(v.d_rho_w, trace_distance(rho_i, &un.rho_reduced)?);
    dev.add(v.d_rho_bar, trace_distance(rho_i, &d.remixed(basis)?)?);
    dev.add(v.f_w, d.fidelity(&un));
    dev.add(v.d_sigma_w, d.pointer_distance(&un)?);
    if let Some(sel) = d.selected(&basis[0])? {
        dev.add(v.shift, sel.q_mean);
        dev.add(v.d_rho_f, trace_distance(rho_i, &sel.rho_reduced)?);
        dev.add(v.f_f, d.fidelity(&sel));
        dev.add(v.d_sigma_f, d.pointer_distance(&sel)?);
    }
    Ok(dev.0)
}

/// Engine quantities over the product grid `alpha x beta x g`.
pub fn sweep(alphas: &ParamList, betas: &ParamList, gs: &ParamList, o: OracleOpts) -> Result<Table> {
    if gs.0.iter().any(|g| g.value < 0.0) {
        return Err(usage!("sweep needs g/delta >= 0"));
    }
    let mut columns: Vec<String> = SWEEP_COLUMNS.map(String::from).into();
    o.column(&mut columns);
    let mut params = vec![
        param("alpha", alphas.describe()),
        param("beta", betas.describe()),
        param("g_over_delta", gs.describe()),
    ];
    params.extend(o.params());
    let mut t = table("sweep", params, columns);

    let mut points = Vec::new();
    for a in alphas.values() {
        for b in betas.values() {
            for g in gs.values() {
                points.push((a, b, g));
            }
        }
    }
    t.rows = rows(&points, |&(a, b, g)| {
        let rho_i = spin_up(a).projector();
        let basis = [spin_up(b), spin_down(b)];
        let js = engine::evolve(&setup(a, g)?);
        let v = sweep_engine(&js, &rho_i, &basis)?;
        let abl = nan_on_err(engine::abl_expectation(&rho_i, &sigma_z(), &basis[0]));
        let wv = engine::weak_value(&rho_i, &sigma_z(), &basis[0]).map_or(f64::NAN, |w| w.re);
        let exact = if g > 0.0 { v.shift / g } else { f64::NAN };
        let mut r = vec![
            a, b, g, v.p_f, v.shift, exact, abl, wv, v.d_rho_w, v.d_rho_bar, v.d_rho_f, v.f_w, v.f_f, v.d_sigma_w,
            v.d_sigma_f,
        ];
        if let Some(n) = o.points {
            r.push(sweep_deviation(&v, &Dense::new(a, g, n)?, &rho_i, &basis)?);
        }
        Ok(cells(r))
    })?;
    Ok(t)
}

pub const VERIFY_COLUMNS: [&str; 10] = [
    "alpha",
    "g_over_delta",
    "beta",
    "quantity",
    "engine",
    "closed",
    "oracle",
    "closed_dev",
    "oracle_dev",
    "pass",
];

/// Engine, closed form and oracle on a lattice. Returns the table and the
/// failing comparisons.
pub fn verify(alphas: &ParamList, gs: &ParamList, betas: &ParamList, n: usize) -> Result<(Table, Vec<Comparison>)> {
    let params = vec![
        param("alpha", alphas.describe()),
        param("g_over_delta", gs.describe()),
        param("beta", betas.describe()),
        param("oracle_points", n),
        param("closed_tol", verify::CLOSED_FORM_TOL),
        param("oracle_tol", verify::ORACLE_TOL),
    ];
    let mut t = table("verify", params, VERIFY_COLUMNS.map(String::from).into());

    let mut pairs = Vec::new();
    for a in alphas.values() {
        for g in gs.values() {
            pairs.push((a, g));
        }
    }
    let bs = betas.values();
    let per_point: Vec<Vec<Comparison>> = pairs
        .par_iter()
        .map(|&(a, g)| verify::compare_spin_point(a, g, &bs, n))
        .collect::<wvlab::Result<_>>()?;
    let comparisons: Vec<Comparison> = per_point.into_iter().flatten().collect();

    t.rows = comparisons
        .iter()
        .map(|c| {
            vec![
                Cell::Num(c.alpha),
                Cell::Num(c.g_over_delta),
                Cell::Num(c.beta.unwrap_or(f64::NAN)),
                Cell::Text(c.quantity.clone()),
                Cell::Num(c.engine),
                Cell::Num(c.closed.unwrap_or(f64::NAN)),
                Cell::Num(c.oracle),
                Cell::Num(c.closed_deviation().unwrap_or(f64::NAN)),
                Cell::Num(c.oracle_deviation()),
                Cell::Flag(c.passes()),
            ]
        })
        .collect();
    let failures = comparisons.into_iter().filter(|c| !c.passes()).collect();
    Ok((t, failures))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_angle_list, parse_real_list};
    use std::f64::consts::PI;

    fn p(label: &str, value: f64) -> Param {
        Param {
            value,
            label: label.into(),
        }
    }

    const OFF: OracleOpts = OracleOpts { points: None };

    #[test]
    fn fig1_columns_and_weak_limit() {
        let a = parse_angle_list("0.2pi,0.5pi").unwrap();
        let g = parse_real_list("0.001,5").unwrap();
        let t = fig1(&a, &g, &p("0", 0.0), &p("0.3pi", 0.3 * PI), OFF).unwrap();
        assert_eq!(t.columns, ["alpha", "mean_i", "abl", "weak_value", "exact(g=0.001)", "exact(g=5)"]);
        for row in &t.rows {
            let Cell::Num(alpha) = row[0] else { panic!() };
            let Cell::Num(wv) = row[3] else { panic!() };
            let Cell::Num(ex) = row[4] else { panic!() };
            assert!((wv - (alpha / 2.0).tan()).abs() < 1e-12);
            assert!((ex - wv).abs() < 1e-5);
        }
    }

    #[test]
    fn fig1_rejects_zero_coupling() {
        let a = parse_angle_list("0").unwrap();
        let g = parse_real_list("0").unwrap();
        assert!(fig1(&a, &g, &p("0", 0.0), &p("0", 0.0), OFF).is_err());
    }

    #[test]
    fn oracle_column_is_small() {
        let a = parse_angle_list("0.3pi").unwrap();
        let b = parse_angle_list("0,0.3pi").unwrap();
        let g = parse_real_list("1").unwrap();
        let t = sweep(&a, &b, &g, OracleOpts { points: Some(512) }).unwrap();
        let k = t.column("oracle_max_dev").unwrap();
        for row in &t.rows {
            let Cell::Num(d) = row[k] else { panic!() };
            assert!(d < 1e-6, "{d}");
        }
    }

    #[test]
    fn tradeoff_matches_report() {
        let a = parse_angle_list("170deg").unwrap();
        let f = parse_real_list("0.1").unwrap();
        let t = tradeoff(&a, &f, OFF).unwrap();
        assert_eq!(t.rows.len(), 1);
        let Cell::Num(g2) = t.rows[0][t.column("g_min_ii").unwrap()] else { panic!() };
        assert!((g2 - 0.524656).abs() < 1e-6);
        assert!(tradeoff(&a, &parse_real_list("1").unwrap(), OFF).is_err());
    }
}
