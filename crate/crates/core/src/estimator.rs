//! Monte Carlo estimators for the boundary structure of the process: the
//! chamber-stabilization probabilities h_w, martingale checks of harmonicity,
//! the coupling bound behind the triviality of the radial Poisson boundary,
//! the law of large numbers, and the rank-one change of basis between the
//! eigenfunction basis (G_{wρ}) and the probabilistic basis (h_w).
//!
//! Undetermined trajectories are excluded and reported, never imputed.

use serde::Serialize;

use crate::diffusion::{coupling_ensemble, coupling_statistics, radial_ensemble, StepperConfig};
use crate::error::{Error, Result};
use crate::jumps::{full_ensemble, Method};
use crate::linalg;
use crate::ops::{Model, ScalarField};
use crate::oracle::{Rank1Oracle, Rank1Params};
use crate::report::TestResult;
use crate::rootsys::{Family, MultiplicityFunction, Normalization, RootSystem};
use crate::stats::{mean_stderr, McEstimate};

/// Fraction of undetermined trajectories above which estimation is refused.
pub const UNDETERMINED_LIMIT: f64 = 0.20;

/// Estimated h_w table at one starting point: for each Weyl element, the
/// probability that the angular part stabilizes there.
#[derive(Clone, Debug, Serialize)]
pub struct HwTable {
    pub start: Vec<f64>,
    /// One estimate per Weyl element, indexed like `WeylGroup::elements`.
    pub per_w: Vec<McEstimate>,
    pub n: usize,
    pub excluded: usize,
}

impl HwTable {
    /// Sum of the estimates; exactly 1 over the determined trajectories.
    pub fn total(&self) -> f64 {
        self.per_w.iter().map(|e| e.value).sum()
    }
}

/// Estimate h_w(x0) from n full-process trajectories.
pub fn estimate_hw(
    m: &Model,
    x0: &[f64],
    cfg: &StepperConfig,
    n: usize,
    method: Method,
    root_order: Option<&[usize]>,
    ensemble: u64,
) -> Result<HwTable> {
    if n < 100 {
        return Err(Error::InsufficientData(format!("h_w estimation needs n >= 100, got {n}")));
    }
    let summaries = full_ensemble(m, x0, cfg, method, root_order, n, ensemble)?;
    let mut counts = vec![0usize; m.weyl.len()];
    let mut excluded = 0usize;
    for s in &summaries {
        match s.final_angular {
            Some(w) => counts[w] += 1,
            None => excluded += 1,
        }
    }
    if (excluded as f64) > UNDETERMINED_LIMIT * n as f64 {
        return Err(Error::TooManyUndetermined {
            excluded,
            total: n,
            limit: UNDETERMINED_LIMIT * 100.0,
        });
    }
    let determined = n - excluded;
    let per_w = counts
        .into_iter()
        .map(|c| McEstimate::from_count(c, determined, cfg.seed, excluded))
        .collect();
    Ok(HwTable { start: x0.to_vec(), per_w, n, excluded })
}

/// Pairwise consistency checks for the equivariance law h_w(v x) = h_{v⁻¹w}(x):
/// compares a table estimated at v·x0 against the v-shifted table at x0, at
/// 3 joint standard errors per element.
pub fn hw_equivariance_tests(
    m: &Model,
    table_at_vx: &HwTable,
    table_at_x: &HwTable,
    v: usize,
) -> Vec<TestResult> {
    let v_inv = m.weyl.inverse[v];
    (0..m.weyl.len())
        .map(|w| {
            let lhs = &table_at_vx.per_w[w];
            let rhs = &table_at_x.per_w[m.weyl.compose(v_inv, w)];
            let gap = (lhs.value - rhs.value).abs();
            let tol = 3.0 * (lhs.stderr * lhs.stderr + rhs.stderr * rhs.stderr).sqrt();
            // Degenerate cells (0 or 1 exactly on both sides) have zero
            // stderr; equality must then be exact within binomial resolution.
            let pass = gap <= tol.max(1.0 / table_at_x.n as f64);
            TestResult::bound(format!("hw_equivariance_w{w}"), gap, pass)
        })
        .collect()
}

/// Method-independence: two h_w tables at the same start agree within 3
/// joint standard errors per element.
pub fn hw_agreement_tests(label: &str, a: &HwTable, b: &HwTable) -> Vec<TestResult> {
    a.per_w
        .iter()
        .zip(&b.per_w)
        .enumerate()
        .map(|(w, (ea, eb))| {
            let gap = (ea.value - eb.value).abs();
            let tol = 3.0 * (ea.stderr * ea.stderr + eb.stderr * eb.stderr).sqrt();
            let pass = gap <= tol.max(1.0 / a.n as f64);
            TestResult::bound(format!("hw_{label}_w{w}"), gap, pass)
        })
        .collect()
}

/// Result of one martingale check E_x[f(X_t)] =? f(x).
#[derive(Clone, Debug, Serialize)]
pub struct MartingaleReport {
    pub t: f64,
    pub estimate: McEstimate,
    pub reference: f64,
    /// z-score of the discrepancy; None when the sample variance degenerates.
    pub z: Option<f64>,
    pub degenerate: bool,
    pub pass: bool,
}

/// Monte Carlo check that f is invariant under the full semigroup at time t.
pub fn martingale_check(
    m: &Model,
    f: &ScalarField,
    x0: &[f64],
    t: f64,
    cfg: &StepperConfig,
    n: usize,
    ensemble: u64,
) -> Result<MartingaleReport> {
    if !(t > 0.0) {
        return Err(Error::InvalidStart("martingale check needs t > 0".into()));
    }
    let run_cfg = StepperConfig { t_horizon: t, ..cfg.clone() };
    let summaries = full_ensemble(m, x0, &run_cfg, Method::Thinning, None, n, ensemble)?;
    let values: Vec<f64> = summaries.iter().map(|s| f.eval(&s.terminal)).collect();
    let estimate = McEstimate::from_samples(&values, cfg.seed, 0);
    let reference = f.eval(x0);
    let degenerate = !(estimate.stderr > 0.0);
    let z = if degenerate { None } else { Some((estimate.value - reference) / estimate.stderr) };
    let pass = degenerate || z.map_or(false, |z| z.abs() < 3.0);
    Ok(MartingaleReport { t, estimate, reference, z, degenerate, pass })
}

#[derive(Clone, Debug, Serialize)]
pub struct PanelEntry {
    pub name: String,
    pub mean_x: f64,
    pub stderr_x: f64,
    pub mean_y: f64,
    pub stderr_y: f64,
    pub diff: f64,
    pub coupling_bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Theorem1Report {
    pub horizon: f64,
    pub coupled_fraction: f64,
    pub panel: Vec<PanelEntry>,
    pub pass: bool,
}

/// Coupling-bound experiment for the triviality of the radial boundary: for
/// a panel of bounded W-invariant test functions f,
/// |E_x f(X^W_T) − E_y f(X^W_T)| must lie within
/// 2 sup|f| P(T_couple > T) + 3 combined stderr.
pub fn theorem1_experiment(
    m: &Model,
    x0: &[f64],
    y0: &[f64],
    cfg: &StepperConfig,
    n: usize,
) -> Result<Theorem1Report> {
    let from_x = radial_ensemble(m, x0, cfg, n, 0)?;
    let from_y = radial_ensemble(m, y0, cfg, n, 1)?;
    let pairs = coupling_ensemble(m, x0, y0, cfg, n, 2)?;
    let stats = coupling_statistics(&pairs, cfg.t_horizon)?;
    let rank = m.rank();

    // Bounded W-invariant panel: tanh of each radial coordinate, exp(-|x|),
    // and the constant 1. All have sup|f| = 1.
    let mut panel_fns: Vec<(String, Box<dyn Fn(&[f64]) -> f64 + Sync>)> = Vec::new();
    for i in 0..rank {
        panel_fns.push((format!("tanh_radial_{i}"), Box::new(move |x: &[f64]| x[i].tanh())));
    }
    panel_fns.push(("exp_neg_norm".into(), Box::new(|x: &[f64]| (-linalg::norm(x)).exp())));
    panel_fns.push(("const_one".into(), Box::new(|_: &[f64]| 1.0)));

    let mut panel = Vec::new();
    for (name, f) in &panel_fns {
        let vx: Vec<f64> = from_x.iter().map(|s| f(&s.terminal)).collect();
        let vy: Vec<f64> = from_y.iter().map(|s| f(&s.terminal)).collect();
        let (mx, sx) = mean_stderr(&vx);
        let (my, sy) = mean_stderr(&vy);
        let diff = (mx - my).abs();
        let bound = 2.0 * (1.0 - stats.fraction_coupled);
        let tol = bound + 3.0 * (sx * sx + sy * sy).sqrt();
        panel.push(PanelEntry {
            name: name.clone(),
            mean_x: mx,
            stderr_x: sx,
            mean_y: my,
            stderr_y: sy,
            diff,
            coupling_bound: bound,
            pass: diff <= tol,
        });
    }
    let pass = panel.iter().all(|e| e.pass);
    Ok(Theorem1Report {
        horizon: cfg.t_horizon,
        coupled_fraction: stats.fraction_coupled,
        panel,
        pass,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LlnReport {
    pub horizon: f64,
    pub mean_over_t: Vec<f64>,
    pub stderr: Vec<f64>,
    pub rho: Vec<f64>,
    pub z: Vec<f64>,
    pub pass: bool,
}

/// Componentwise check that X_T/T concentrates at ρ.
pub fn lln_check(m: &Model, x0: &[f64], cfg: &StepperConfig, n: usize) -> Result<LlnReport> {
    let ens = radial_ensemble(m, x0, cfg, n, 0)?;
    let t = cfg.t_horizon;
    let mut mean = Vec::new();
    let mut stderr = Vec::new();
    let mut z = Vec::new();
    for i in 0..m.rank() {
        let xs: Vec<f64> = ens.iter().map(|s| s.terminal[i] / t).collect();
        let (mu, se) = mean_stderr(&xs);
        mean.push(mu);
        stderr.push(se);
        z.push((mu - m.rho[i]) / se);
    }
    let pass = z.iter().all(|v| v.abs() < 3.0);
    Ok(LlnReport { horizon: t, mean_over_t: mean, stderr, rho: m.rho.to_vec(), z, pass })
}

#[derive(Clone, Debug, Serialize)]
pub struct BasisChangeReport {
    pub grid: Vec<f64>,
    pub h_id: Vec<McEstimate>,
    pub h_s: Vec<McEstimate>,
    /// Oracle values of G_ρ and G_{−ρ} on the grid.
    pub g_plus: Vec<f64>,
    pub g_minus: Vec<f64>,
    /// Rows: G_ρ and G_{−ρ}; columns: coefficients on (h_id, h_s).
    pub matrix: [[f64; 2]; 2],
    pub matrix_stderr: [[f64; 2]; 2],
    pub det: f64,
    pub row_sums: [f64; 2],
    pub residuals: [Vec<f64>; 2],
    pub propagated_err: [Vec<f64>; 2],
    pub tests: Vec<TestResult>,
    pub pass: bool,
}

/// Build the rank-one model matching oracle parameters.
pub fn rank1_model(params: Rank1Params) -> Result<Model> {
    let normalization = if (params.alpha - 2.0).abs() < 1e-14 {
        Normalization::Standard
    } else {
        Normalization::Scaled(params.alpha / 2.0)
    };
    let sys = RootSystem::build(Family::Rank1, 1, normalization)?;
    let k = MultiplicityFunction::uniform(&sys, params.k)?;
    Model::new(sys, k)
}

/// Weighted least squares of the oracle functions G_{±ρ} on the estimated
/// (h_id, h_s) over a grid straddling both chambers, with the sandwich
/// propagation of the h-estimate errors into the coefficients.
pub fn basis_change_rank1(
    params: Rank1Params,
    grid: &[f64],
    cfg: &StepperConfig,
    n: usize,
) -> Result<BasisChangeReport> {
    if grid.len() < 4 {
        return Err(Error::IllConditioned("basis-change grid needs at least 4 points".into()));
    }
    if !(grid.iter().any(|&x| x > 0.0) && grid.iter().any(|&x| x < 0.0)) {
        return Err(Error::IllConditioned("grid must straddle both chambers".into()));
    }
    let m = rank1_model(params)?;
    let id = 0usize;
    let s = 1usize;
    debug_assert_eq!(m.weyl.len(), 2);

    let mut h_id = Vec::new();
    let mut h_s = Vec::new();
    for (i, &x) in grid.iter().enumerate() {
        let table = estimate_hw(&m, &[x], cfg, n, Method::Thinning, None, 100 + i as u64)?;
        h_id.push(table.per_w[id].clone());
        h_s.push(table.per_w[s].clone());
    }

    let plus = Rank1Oracle::new(params, params.rho())?;
    let minus = Rank1Oracle::new(params, -params.rho())?;
    let g_plus: Vec<f64> = grid.iter().map(|&x| plus.g(x)).collect::<Result<_>>()?;
    let g_minus: Vec<f64> = grid.iter().map(|&x| minus.g(x)).collect::<Result<_>>()?;

    let fit_rows = fit_two_column(&h_id, &h_s, [&g_plus, &g_minus])?;

    let matrix = [fit_rows[0].coef, fit_rows[1].coef];
    let matrix_stderr = [fit_rows[0].coef_stderr, fit_rows[1].coef_stderr];
    let det = matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0];
    let row_sums = [matrix[0][0] + matrix[0][1], matrix[1][0] + matrix[1][1]];

    let mut tests = Vec::new();
    let mut res_all_ok = true;
    for (row, label) in fit_rows.iter().zip(["g_plus", "g_minus"]) {
        for (i, (&r, &p)) in row.residuals.iter().zip(&row.propagated).enumerate() {
            // 1/n guards the degenerate cells where the binomial stderr is 0.
            let ok = r.abs() <= (3.0 * p).max(3.0 / n as f64);
            res_all_ok &= ok;
            tests.push(TestResult::bound(format!("residual_{label}_{i}"), r.abs(), ok));
        }
    }
    tests.push(TestResult::bound("det_away_from_zero", det.abs(), det.abs() > 0.2));
    // Both bases are normalized at the origin, where h_id = h_s = 1/2, so
    // each row must sum to 2·G_{wρ}(0) = 2.
    for (w, &rs) in row_sums.iter().enumerate() {
        let var = matrix_stderr[w][0].powi(2) + matrix_stderr[w][1].powi(2);
        let tol = (4.0 * var.sqrt()).max(0.05);
        tests.push(TestResult::bound(format!("row_sum_{w}"), (rs - 2.0).abs(), (rs - 2.0).abs() <= tol));
    }
    let pass = res_all_ok && tests.iter().all(|t| t.pass);

    Ok(BasisChangeReport {
        grid: grid.to_vec(),
        h_id,
        h_s,
        g_plus,
        g_minus,
        matrix,
        matrix_stderr,
        det,
        row_sums,
        residuals: [fit_rows[0].residuals.clone(), fit_rows[1].residuals.clone()],
        propagated_err: [fit_rows[0].propagated.clone(), fit_rows[1].propagated.clone()],
        tests,
        pass,
    })
}

pub(crate) struct FitRow {
    pub coef: [f64; 2],
    pub coef_stderr: [f64; 2],
    pub residuals: Vec<f64>,
    pub propagated: Vec<f64>,
}

/// Ordinary least squares of each target on the two estimated regressors,
/// with sandwich propagation of the regressor standard errors.
pub(crate) fn fit_two_column(
    h_id: &[McEstimate],
    h_s: &[McEstimate],
    targets: [&Vec<f64>; 2],
) -> Result<Vec<FitRow>> {
    let g = h_id.len();
    let (mut s11, mut s12, mut s22) = (0.0, 0.0, 0.0);
    for i in 0..g {
        s11 += h_id[i].value * h_id[i].value;
        s12 += h_id[i].value * h_s[i].value;
        s22 += h_s[i].value * h_s[i].value;
    }
    let det = s11 * s22 - s12 * s12;
    if det.abs() < 1e-10 * (s11 * s22).max(1e-30) {
        return Err(Error::IllConditioned(format!(
            "design Gram determinant {det:.3e}; grid too one-sided"
        )));
    }
    let inv = [[s22 / det, -s12 / det], [-s12 / det, s11 / det]];

    let mut out = Vec::new();
    for target in targets {
        let (mut t1, mut t2) = (0.0, 0.0);
        for i in 0..g {
            t1 += h_id[i].value * target[i];
            t2 += h_s[i].value * target[i];
        }
        let coef = [inv[0][0] * t1 + inv[0][1] * t2, inv[1][0] * t1 + inv[1][1] * t2];
        // Local noise of the fitted value at each point, from that point's
        // regressor errors alone.
        let local: Vec<f64> = (0..g)
            .map(|i| {
                ((coef[0] * h_id[i].stderr).powi(2) + (coef[1] * h_s[i].stderr).powi(2)).sqrt()
            })
            .collect();
        // Sandwich covariance of the coefficients from the same noise.
        let mut mid = [[0.0f64; 2]; 2];
        for i in 0..g {
            let sigma2 = local[i] * local[i];
            let hi = [h_id[i].value, h_s[i].value];
            for a in 0..2 {
                for b in 0..2 {
                    mid[a][b] += hi[a] * hi[b] * sigma2;
                }
            }
        }
        let mut cov = [[0.0f64; 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                let mut acc = 0.0;
                for p in 0..2 {
                    for q in 0..2 {
                        acc += inv[a][p] * mid[p][q] * inv[q][b];
                    }
                }
                cov[a][b] = acc;
            }
        }
        let mut residuals = Vec::with_capacity(g);
        let mut propagated = Vec::with_capacity(g);
        for i in 0..g {
            let fit = coef[0] * h_id[i].value + coef[1] * h_s[i].value;
            residuals.push(target[i] - fit);
            // A residual fluctuates with the point's own noise and with the
            // fitted coefficients; at near-degenerate points the coefficient
            // term dominates, so both enter the propagated error.
            let hi = [h_id[i].value, h_s[i].value];
            let coef_term = hi[0] * hi[0] * cov[0][0]
                + 2.0 * hi[0] * hi[1] * cov[0][1]
                + hi[1] * hi[1] * cov[1][1];
            propagated.push((local[i] * local[i] + coef_term.max(0.0)).sqrt());
        }
        out.push(FitRow {
            coef,
            coef_stderr: [cov[0][0].max(0.0).sqrt(), cov[1][1].max(0.0).sqrt()],
            residuals,
            propagated,
        });
    }
    Ok(out)
}
