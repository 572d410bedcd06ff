//! The radial process (the ½L-diffusion in the open Weyl chamber) and the
//! mirror-coupled pair.
//!
//! Stepping is Euler–Maruyama with wall-adaptive step shrinking: the step is
//! capped at `wall_safety · d²` where d is the distance to the nearest wall,
//! and a proposed move that leaves the chamber is retried with a halved step
//! (same Gaussian) up to a bounded number of times. For k ≥ 1/2 the coth
//! drift is wall-repelling and aborts are statistically absent.
//!
//! The coupled pair advances on a shared time grid; the second member is
//! driven by the first member's Gaussian reflected across the hyperplane
//! orthogonal to the current difference vector. The reflected difference
//! carries a doubled martingale: z_t = |Y_t − X_t| behaves as 2·(standard
//! Brownian motion) plus a bounded drift, so its realized quadratic variation
//! accrues at rate 4 per unit time. [`qv_rate`] reports the rate normalized
//! by that factor, making 1.0 the Brownian reference value.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, dot, Point};
use crate::ops::Model;
use crate::parallel::par_map;
use crate::rng::{ensemble_stream, TrajectoryRng};
use crate::stats::{kaplan_meier, median};

/// Knobs of the stochastic steppers. Everything downstream is deterministic
/// given this struct and the trajectory id.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StepperConfig {
    /// Base time step; steps shrink adaptively near walls.
    pub dt_max: f64,
    /// Wall-adaptive cap factor: dt ≤ wall_safety · d² with d the wall distance.
    pub wall_safety: f64,
    pub t_horizon: f64,
    pub seed: u64,
    /// Distance below which a mirror pair is declared coupled.
    pub couple_tolerance: f64,
    /// Retry budget for chamber-exiting proposals.
    pub max_step_retries: u32,
    /// Safety valve for the jump constructions.
    pub max_jumps_per_root: u32,
    /// Thinning cap: total jump intensity × dt ≤ this value.
    pub thinning_cap: f64,
    /// Record every n-th point in full trajectory records (1 = all).
    pub record_stride: usize,
    /// Multiplier on the jump rates; 1.0 for physical runs. Kept as a knob so
    /// the equivalence harness can demonstrate detection power.
    pub jump_rate_scale: f64,
}

impl Default for StepperConfig {
    fn default() -> Self {
        StepperConfig {
            dt_max: 1e-2,
            wall_safety: 0.1,
            t_horizon: 100.0,
            seed: 0,
            couple_tolerance: 1e-6,
            max_step_retries: 30,
            max_jumps_per_root: 100_000,
            thinning_cap: 0.1,
            record_stride: 1,
            jump_rate_scale: 1.0,
        }
    }
}

impl StepperConfig {
    pub fn validate(&self) -> Result<()> {
        let pos = self.dt_max > 0.0
            && self.wall_safety > 0.0
            && self.t_horizon > 0.0
            && self.couple_tolerance > 0.0
            && self.thinning_cap > 0.0
            && self.jump_rate_scale > 0.0
            && self.record_stride >= 1;
        if !pos {
            return Err(Error::InvalidStart("stepper config fields must be positive".into()));
        }
        Ok(())
    }
}

/// One recorded path of the radial process.
#[derive(Clone, Debug)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub positions: Vec<Point>,
    pub terminal: Point,
    /// Running min over t and α of ⟨α, X_t⟩ (of |⟨α, X_t⟩| for paths outside
    /// the positive chamber). Positive iff the path never touched a wall.
    pub wall_min: f64,
}

/// Streaming result of one radial trajectory.
#[derive(Clone, Debug)]
pub struct RadialSummary {
    pub terminal: Point,
    pub wall_min: f64,
    pub steps: u64,
}

/// Minimum signed pairing over the positive roots.
fn min_pairing(m: &Model, x: &[f64]) -> f64 {
    (0..m.n_positive()).map(|a| m.system.pairing(a, x)).fold(f64::INFINITY, f64::min)
}

/// One Euler–Maruyama step from a regular point, staying in its chamber copy.
/// `g` is a standard normal vector, reused across retries with halved steps.
/// Returns the accepted point and the step actually taken.
pub fn step_regular(
    m: &Model,
    cfg: &StepperConfig,
    x: &Point,
    drift: &Point,
    dt_cap: f64,
    g: &[f64],
    trajectory: u64,
    t: f64,
) -> Result<(Point, f64)> {
    let d = m.system.wall_distance(x);
    let mut dt = dt_cap.min(cfg.wall_safety * d * d);
    let signs = m.system.sign_pattern(x);
    for _retry in 0..=cfg.max_step_retries {
        let mut xp = x.clone();
        let sq = dt.sqrt();
        for i in 0..xp.len() {
            xp[i] += drift[i] * dt + sq * g[i];
        }
        let ok = (0..m.n_positive()).all(|a| {
            let p = m.system.pairing(a, &xp);
            p != 0.0 && (p > 0.0) == signs[a]
        });
        if ok {
            return Ok((xp, dt));
        }
        dt *= 0.5;
    }
    Err(Error::WallContact { trajectory, t, retries: cfg.max_step_retries })
}

/// Convenience wrapper matching the one-step contract: computes the drift at
/// `x` and takes a single adaptive step of at most `dt`.
pub fn step_radial(
    m: &Model,
    cfg: &StepperConfig,
    x: &Point,
    dt: f64,
    g: &[f64],
) -> Result<(Point, f64)> {
    let b = m.drift_raw(x);
    step_regular(m, cfg, x, &b, dt, g, 0, 0.0)
}

fn check_open_chamber_start(m: &Model, x0: &[f64]) -> Result<()> {
    if x0.len() != m.rank() {
        return Err(Error::InvalidStart(format!(
            "start point has dimension {}, system rank is {}",
            x0.len(),
            m.rank()
        )));
    }
    if !m.system.in_open_chamber(x0) {
        return Err(Error::InvalidStart(format!("{x0:?} is not in the open positive chamber")));
    }
    Ok(())
}

/// Drive one radial trajectory, invoking `observe(t, x)` after every accepted
/// step (and once for the initial state).
fn run_radial<F: FnMut(f64, &Point)>(
    m: &Model,
    x0: &[f64],
    cfg: &StepperConfig,
    trajectory: u64,
    mut observe: F,
) -> Result<RadialSummary> {
    check_open_chamber_start(m, x0)?;
    cfg.validate()?;
    let mut rng = TrajectoryRng::new(cfg.seed, trajectory);
    let mut x = linalg::point_from(x0);
    let mut t = 0.0;
    let mut wall_min = min_pairing(m, &x);
    let mut steps = 0u64;
    observe(t, &x);
    while t < cfg.t_horizon {
        let g = rng.normal_vec(m.rank());
        let b = m.drift_raw(&x);
        let dt_cap = cfg.dt_max.min(cfg.t_horizon - t);
        let (xp, dt) = step_regular(m, cfg, &x, &b, dt_cap, &g, trajectory, t)?;
        x = xp;
        t += dt;
        steps += 1;
        wall_min = wall_min.min(min_pairing(m, &x));
        observe(t, &x);
    }
    Ok(RadialSummary { terminal: x, wall_min, steps })
}

/// Full path record of one radial trajectory. Deterministic given
/// `(cfg.seed, trajectory)`.
pub fn simulate_radial(
    m: &Model,
    x0: &[f64],
    cfg: &StepperConfig,
    trajectory: u64,
) -> Result<TrajectoryRecord> {
    let mut times = Vec::new();
    let mut positions = Vec::new();
    let mut count = 0usize;
    let summary = run_radial(m, x0, cfg, trajectory, |t, x| {
        if count % cfg.record_stride == 0 {
            times.push(t);
            positions.push(x.clone());
        }
        count += 1;
    })?;
    if *times.last().unwrap() < cfg.t_horizon {
        times.push(cfg.t_horizon);
        positions.push(summary.terminal.clone());
    }
    Ok(TrajectoryRecord { times, positions, terminal: summary.terminal, wall_min: summary.wall_min })
}

/// Terminal-only radial run (no path storage).
pub fn radial_terminal(
    m: &Model,
    x0: &[f64],
    cfg: &StepperConfig,
    trajectory: u64,
) -> Result<RadialSummary> {
    run_radial(m, x0, cfg, trajectory, |_, _| {})
}

/// Independent radial trajectories, parallel across the ensemble.
pub fn radial_ensemble(
    m: &Model,
    x0: &[f64],
    cfg: &StepperConfig,
    n: usize,
    ensemble: u64,
) -> Result<Vec<RadialSummary>> {
    par_map(n, |i| radial_terminal(m, x0, cfg, ensemble_stream(ensemble, i as u64)))
        .into_iter()
        .collect()
}

/// Paired mirror-coupled paths with the distance diagnostics.
#[derive(Clone, Debug)]
pub struct CouplingRecord {
    pub x_path: TrajectoryRecord,
    pub y_path: TrajectoryRecord,
    /// z_t = |Y_t − X_t| on the shared grid.
    pub z: Vec<f64>,
    pub coupling_time: Option<f64>,
    /// Realized quadratic variation Σ (Δz)² up to the coupling time.
    pub qv: f64,
}

/// Streaming result of one coupled pair; the simulation stops at coupling.
#[derive(Clone, Debug)]
pub struct CouplingSummary {
    pub coupling_time: Option<f64>,
    pub qv: f64,
    /// sup_t |∫ (b(Y) − b(X)) ds| up to coupling or horizon.
    pub drift_gap_sup: f64,
    pub wall_min: f64,
    pub steps: u64,
}

/// Realized QV of z per unit time, normalized by the mirror martingale speed
/// (the reflected difference is twice a standard Brownian motion, so its QV
/// accrues at 4 per unit time). Brownian reference value: 1.
pub fn qv_rate(qv: f64, coupling_time: f64) -> f64 {
    qv / (4.0 * coupling_time)
}

struct PairState {
    x: Point,
    y: Point,
    t: f64,
    z: f64,
    qv: f64,
    coupled_at: Option<f64>,
    drift_int: Point,
    drift_gap_sup: f64,
    wall_min: f64,
    steps: u64,
}

/// Advance the pair one synchronous step. Returns false once coupled.
fn pair_step(m: &Model, cfg: &StepperConfig, st: &mut PairState, rng: &mut TrajectoryRng) -> Result<bool> {
    let n = m.rank();
    let g = rng.normal_vec(n);
    let u = linalg::sub(&st.y, &st.x);
    let nu = linalg::norm(&u);
    if nu <= cfg.couple_tolerance {
        st.coupled_at = Some(st.t);
        return Ok(false);
    }
    let uhat = linalg::scaled(&u, 1.0 / nu);
    let gdot = dot(&uhat, &g);
    let mut gy = g.clone();
    linalg::axpy(&mut gy, -2.0 * gdot, &uhat);

    let bx = m.drift_raw(&st.x);
    let by = m.drift_raw(&st.y);
    let d = m.system.wall_distance(&st.x).min(m.system.wall_distance(&st.y));
    let dt_cap = cfg.dt_max.min(cfg.t_horizon - st.t);
    let mut dt = dt_cap.min(cfg.wall_safety * d * d);
    let mut accepted = None;
    for _ in 0..=cfg.max_step_retries {
        let sq = dt.sqrt();
        let mut xp = st.x.clone();
        let mut yp = st.y.clone();
        for i in 0..n {
            xp[i] += bx[i] * dt + sq * g[i];
            yp[i] += by[i] * dt + sq * gy[i];
        }
        if m.system.in_open_chamber(&xp) && m.system.in_open_chamber(&yp) {
            accepted = Some((xp, yp, dt));
            break;
        }
        dt *= 0.5;
    }
    let (xp, yp, dt) = accepted.ok_or(Error::WallContact {
        trajectory: 0,
        t: st.t,
        retries: cfg.max_step_retries,
    })?;

    // Signed component of the new difference along the old direction; a
    // non-positive value means the continuous bridge crossed zero.
    let up = linalg::sub(&yp, &xp);
    let s = dot(&up, &uhat);
    let z_new = linalg::norm(&up);
    let coupled = z_new <= cfg.couple_tolerance || s <= 0.0;

    linalg::axpy(&mut st.drift_int, dt, &linalg::sub(&by, &bx));
    st.drift_gap_sup = st.drift_gap_sup.max(linalg::norm(&st.drift_int));

    let z_eff = if coupled { 0.0 } else { z_new };
    st.qv += (z_eff - st.z) * (z_eff - st.z);
    st.z = z_eff;
    st.t += dt;
    st.steps += 1;
    st.x = xp;
    if coupled {
        st.y = st.x.clone();
        st.coupled_at = Some(st.t);
    } else {
        st.y = yp;
    }
    st.wall_min = st.wall_min.min(min_pairing(m, &st.x)).min(min_pairing(m, &st.y));
    Ok(!coupled)
}

fn init_pair(m: &Model, x0: &[f64], y0: &[f64], cfg: &StepperConfig) -> Result<PairState> {
    check_open_chamber_start(m, x0)?;
    check_open_chamber_start(m, y0)?;
    cfg.validate()?;
    let x = linalg::point_from(x0);
    let y = linalg::point_from(y0);
    let z = linalg::dist(&x, &y);
    let wall_min = min_pairing(m, &x).min(min_pairing(m, &y));
    Ok(PairState {
        x,
        y,
        t: 0.0,
        z,
        qv: 0.0,
        coupled_at: None,
        drift_int: linalg::zeros(m.rank()),
        drift_gap_sup: 0.0,
        wall_min,
        steps: 0,
    })
}

/// Mirror-couple two radial processes, recording both paths to the horizon.
/// After the coupling time the two paths are identical.
pub fn mirror_couple(
    m: &Model,
    x0: &[f64],
    y0: &[f64],
    cfg: &StepperConfig,
    pair: u64,
) -> Result<CouplingRecord> {
    let mut st = init_pair(m, x0, y0, cfg)?;
    let mut rng = TrajectoryRng::new(cfg.seed, pair);
    let mut times = vec![0.0];
    let mut xs = vec![st.x.clone()];
    let mut ys = vec![st.y.clone()];
    let mut zs = vec![st.z];

    while st.t < cfg.t_horizon && st.coupled_at.is_none() {
        pair_step(m, cfg, &mut st, &mut rng)?;
        times.push(st.t);
        xs.push(st.x.clone());
        ys.push(st.y.clone());
        zs.push(st.z);
    }
    // Continue the (now single) path to the horizon.
    while st.t < cfg.t_horizon {
        let g = rng.normal_vec(m.rank());
        let b = m.drift_raw(&st.x);
        let dt_cap = cfg.dt_max.min(cfg.t_horizon - st.t);
        let (xp, dt) = step_regular(m, cfg, &st.x, &b, dt_cap, &g, pair, st.t)?;
        st.x = xp;
        st.t += dt;
        st.wall_min = st.wall_min.min(min_pairing(m, &st.x));
        times.push(st.t);
        xs.push(st.x.clone());
        ys.push(st.x.clone());
        zs.push(0.0);
    }

    let wall_min = st.wall_min;
    let x_path = TrajectoryRecord {
        times: times.clone(),
        positions: xs,
        terminal: st.x.clone(),
        wall_min,
    };
    let y_path = TrajectoryRecord {
        times,
        positions: ys,
        terminal: st.x,
        wall_min,
    };
    Ok(CouplingRecord { x_path, y_path, z: zs, coupling_time: st.coupled_at, qv: st.qv })
}

/// Streaming mirror coupling: stops as soon as the pair couples.
pub fn mirror_couple_summary(
    m: &Model,
    x0: &[f64],
    y0: &[f64],
    cfg: &StepperConfig,
    pair: u64,
) -> Result<CouplingSummary> {
    let mut st = init_pair(m, x0, y0, cfg)?;
    let mut rng = TrajectoryRng::new(cfg.seed, pair);
    while st.t < cfg.t_horizon && st.coupled_at.is_none() {
        pair_step(m, cfg, &mut st, &mut rng)?;
    }
    Ok(CouplingSummary {
        coupling_time: st.coupled_at,
        qv: st.qv,
        drift_gap_sup: st.drift_gap_sup,
        wall_min: st.wall_min,
        steps: st.steps,
    })
}

/// Independent coupled pairs, parallel across the ensemble.
pub fn coupling_ensemble(
    m: &Model,
    x0: &[f64],
    y0: &[f64],
    cfg: &StepperConfig,
    n: usize,
    ensemble: u64,
) -> Result<Vec<CouplingSummary>> {
    par_map(n, |i| mirror_couple_summary(m, x0, y0, cfg, ensemble_stream(ensemble, i as u64)))
        .into_iter()
        .collect()
}

/// Ensemble statistics of coupling times.
#[derive(Clone, Debug, Serialize)]
pub struct CouplingStats {
    pub n: usize,
    pub n_coupled: usize,
    pub fraction_coupled: f64,
    /// Sorted coupling times of the coupled pairs.
    pub times: Vec<f64>,
    pub median_time: Option<f64>,
    /// Median over coupled pairs of the normalized QV rate (1.0 = Brownian).
    pub median_qv_rate: Option<f64>,
    /// Kaplan–Meier survival curve of the coupling time, with pairs uncoupled
    /// by the horizon entering as right-censored.
    pub km_survival: Vec<(f64, f64)>,
}

pub fn coupling_statistics(summaries: &[CouplingSummary], horizon: f64) -> Result<CouplingStats> {
    if summaries.len() < 2 {
        return Err(Error::InsufficientData("need at least 2 coupling records".into()));
    }
    let mut times: Vec<f64> = summaries.iter().filter_map(|s| s.coupling_time).collect();
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let censored: Vec<f64> =
        summaries.iter().filter(|s| s.coupling_time.is_none()).map(|_| horizon).collect();
    let n_coupled = times.len();
    let rates: Vec<f64> = summaries
        .iter()
        .filter_map(|s| s.coupling_time.map(|t| qv_rate(s.qv, t)))
        .filter(|r| r.is_finite())
        .collect();
    Ok(CouplingStats {
        n: summaries.len(),
        n_coupled,
        fraction_coupled: n_coupled as f64 / summaries.len() as f64,
        median_time: if n_coupled > 0 { Some(median(&times)) } else { None },
        median_qv_rate: if rates.is_empty() { None } else { Some(median(&rates)) },
        km_survival: kaplan_meier(&times, &censored),
        times,
    })
}
