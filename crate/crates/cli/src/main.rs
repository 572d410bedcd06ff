//! `hop` — simulation and verification experiments for Heckman–Opdam
//! processes.
//!
//! Every subcommand accepts `--config <file>` (flat `key = value` text) with
//! flags overriding file values, writes a `manifest.json` echoing the fully
//! defaulted configuration (the only file carrying volatile fields), and
//! exits 0 iff every declared assertion of the selected experiment passed
//! (1 = an assertion failed, 2 = the run errored).

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use hop_core::config::{parse_config, Experiment, GridSpec, RunConfig};
use hop_core::diffusion::{coupling_ensemble, coupling_statistics, qv_rate, simulate_radial};
use hop_core::error::Result;
use hop_core::estimator::{
    basis_change_rank1, estimate_hw, lln_check, martingale_check, theorem1_experiment,
};
use hop_core::jumps::{compare_constructions, simulate_full};
use hop_core::ops::{Model, ScalarField};
use hop_core::oracle::Rank1Oracle;
use hop_core::parallel::with_thread_budget;
use hop_core::report::{fmt_f64, write_csv, write_json, Manifest, Report, TestResult};
use hop_core::rootsys::to_document;

#[derive(Parser)]
#[command(name = "hop", version, about = "Heckman-Opdam process laboratory")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Root system inspection.
    Rootsys {
        #[command(subcommand)]
        sub: RootsysCmd,
    },
    /// Rank-one eigenfunction oracle.
    Oracle {
        #[command(subcommand)]
        sub: OracleCmd,
    },
    /// Trajectory simulation.
    Simulate {
        #[command(subcommand)]
        sub: SimulateCmd,
    },
    /// Mirror-coupled radial pairs.
    Couple(CommonArgs),
    /// Thinning vs skew-product construction cross-validation.
    Equivalence(CommonArgs),
    /// Chamber-stabilization probabilities h_w.
    Hw(CommonArgs),
    /// Martingale checks of harmonicity for the rank-one eigenfunctions.
    Martingale(CommonArgs),
    /// Coupling bound for the triviality of the radial boundary.
    Theorem1(CommonArgs),
    /// Rank-one change of basis between (G_{w rho}) and (h_w).
    Basis(CommonArgs),
    /// Law of large numbers X_T/T -> rho.
    Lln(CommonArgs),
}

#[derive(Subcommand)]
enum RootsysCmd {
    /// Print roots, |W|, orbits, and rho; write the system document.
    Info(CommonArgs),
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Evaluate F, G, E, O on a grid and write CSV.
    Eval(CommonArgs),
}

#[derive(Subcommand)]
enum SimulateCmd {
    /// Radial process in the positive chamber.
    Radial(CommonArgs),
    /// Full jump process by thinning or skew product.
    Full(CommonArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Flat key = value configuration file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    rank: Option<usize>,
    /// standard | short_root_sq2 | scale:<factor>
    #[arg(long)]
    normalization: Option<String>,
    /// Multiplicity per orbit, comma separated (orbit order per `rootsys info`).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    k: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x0: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    y0: Option<Vec<f64>>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    paths: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Spectral parameter for the oracle.
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    /// Evaluation grid start:stop:count.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Basis-change grid points, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    basis_grid: Option<Vec<f64>>,
    /// Skew-product root order, comma separated positive-root indices.
    #[arg(long, value_delimiter = ',')]
    order: Option<Vec<usize>>,
    /// thinning | skew
    #[arg(long)]
    method: Option<String>,
    /// Martingale evaluation times, comma separated.
    #[arg(long, value_delimiter = ',')]
    t_eval: Option<Vec<f64>>,
    /// Thread budget (0 = default pool); HOP_THREADS sets the default.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl CommonArgs {
    /// File config (or defaults) overlaid with the flags.
    fn resolve(&self, experiment: Experiment) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => parse_config(&std::fs::read_to_string(path)?)?,
            None => RunConfig::default(),
        };
        let mut k_explicit = self.config.is_some();
        cfg.experiment = experiment;
        if let Some(f) = &self.family {
            cfg.family = f.parse()?;
        }
        if let Some(r) = self.rank {
            cfg.rank = r;
        }
        if let Some(n) = &self.normalization {
            cfg.normalization = n.parse()?;
        }
        if let Some(k) = &self.k {
            cfg.k = k.clone();
            k_explicit = true;
        }
        if let Some(v) = &self.x0 {
            cfg.x0 = Some(v.clone());
        }
        if let Some(v) = &self.y0 {
            cfg.y0 = Some(v.clone());
        }
        if let Some(v) = self.dt {
            cfg.dt = v;
        }
        if let Some(v) = self.horizon {
            cfg.horizon = v;
        }
        if let Some(v) = self.paths {
            cfg.paths = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.lambda {
            cfg.lambda = v;
        }
        if let Some(g) = &self.grid {
            cfg.grid = Some(GridSpec::from_str(g)?);
        }
        if let Some(v) = &self.basis_grid {
            cfg.basis_grid = v.clone();
        }
        if let Some(v) = &self.order {
            cfg.order = Some(v.clone());
        }
        if let Some(m) = &self.method {
            cfg.method = m.parse()?;
        }
        if let Some(v) = &self.t_eval {
            cfg.t_eval = v.clone();
        }
        if let Some(v) = self.threads {
            cfg.threads = v;
        } else if self.config.is_none() {
            if let Ok(env) = std::env::var("HOP_THREADS") {
                cfg.threads = env.parse().unwrap_or(0);
            }
        }
        if let Some(v) = &self.out {
            cfg.out = v.clone();
        }
        // Flags may have changed the system; re-default k if it was never
        // given explicitly.
        if !k_explicit {
            let system = hop_core::rootsys::RootSystem::build(cfg.family, cfg.rank, cfg.normalization)?;
            cfg.k = vec![1.0; system.n_orbits()];
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, experiment) = match &cli.cmd {
        Cmd::Rootsys { sub: RootsysCmd::Info(a) } => (a, Experiment::RootsysInfo),
        Cmd::Oracle { sub: OracleCmd::Eval(a) } => (a, Experiment::OracleEval),
        Cmd::Simulate { sub: SimulateCmd::Radial(a) } => (a, Experiment::SimulateRadial),
        Cmd::Simulate { sub: SimulateCmd::Full(a) } => (a, Experiment::SimulateFull),
        Cmd::Couple(a) => (a, Experiment::Couple),
        Cmd::Equivalence(a) => (a, Experiment::Equivalence),
        Cmd::Hw(a) => (a, Experiment::Hw),
        Cmd::Martingale(a) => (a, Experiment::Martingale),
        Cmd::Theorem1(a) => (a, Experiment::Theorem1),
        Cmd::Basis(a) => (a, Experiment::Basis),
        Cmd::Lln(a) => (a, Experiment::Lln),
    };
    let cfg = match args.resolve(experiment) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let started = Instant::now();
    let outcome = with_thread_budget(cfg.threads, || run(&cfg));
    match outcome {
        Ok(pass) => {
            let manifest = Manifest::new(cfg.clone(), started.elapsed().as_secs_f64());
            if let Err(e) = write_json(&cfg.out.join("manifest.json"), &manifest) {
                eprintln!("error writing manifest: {e}");
                return ExitCode::from(2);
            }
            if pass {
                println!("PASS");
                ExitCode::SUCCESS
            } else {
                println!("FAIL");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Execute the configured experiment; returns whether every declared
/// assertion passed.
fn run(cfg: &RunConfig) -> Result<bool> {
    match cfg.experiment {
        Experiment::RootsysInfo => rootsys_info(cfg),
        Experiment::OracleEval => oracle_eval(cfg),
        Experiment::SimulateRadial => run_simulate_radial(cfg),
        Experiment::SimulateFull => run_simulate_full(cfg),
        Experiment::Couple => run_couple(cfg),
        Experiment::Equivalence => run_equivalence(cfg),
        Experiment::Hw => run_hw(cfg),
        Experiment::Martingale => run_martingale(cfg),
        Experiment::Theorem1 => run_theorem1(cfg),
        Experiment::Basis => run_basis(cfg),
        Experiment::Lln => run_lln(cfg),
    }
}

fn write_report<E: serde::Serialize>(
    cfg: &RunConfig,
    estimates: E,
    tests: Vec<TestResult>,
) -> Result<bool> {
    let report = Report::new(cfg.experiment.name(), cfg.clone(), estimates, tests);
    write_json(&cfg.out.join("report.json"), &report)?;
    for t in &report.tests {
        let status = if t.pass { "pass" } else { "FAIL" };
        match t.p {
            Some(p) => println!("  [{status}] {} stat={:.4} p={:.4}", t.name, t.statistic, p),
            None => println!("  [{status}] {} value={:.6}", t.name, t.statistic),
        }
    }
    Ok(report.pass)
}

fn rootsys_info(cfg: &RunConfig) -> Result<bool> {
    let m = cfg.build_model()?;
    println!("family {} rank {} ({})", cfg.family, cfg.rank, cfg.normalization);
    println!("positive roots ({}):", m.n_positive());
    for (i, r) in m.system.positive().iter().enumerate() {
        let orbit = &m.system.orbit_names[m.system.orbit_of[i]];
        println!("  [{i}] {:?}  |a|^2 = {}  orbit = {orbit}  k = {}",
            r.as_slice(), m.system.norm2[i], m.k.value(&m.system, i));
    }
    println!("|W| = {}", m.weyl.len());
    println!("rho = {:?}", m.rho.as_slice());
    write_json(&cfg.out.join("system.json"), &to_document(&m.system, &m.k))?;
    Ok(true)
}

fn oracle_eval(cfg: &RunConfig) -> Result<bool> {
    let params = cfg.rank1_params()?;
    let oracle = Rank1Oracle::new(params, cfg.lambda)?;
    let grid = cfg.grid.unwrap_or(GridSpec { start: -5.0, stop: 5.0, count: 101 });
    let xs = grid.points();
    let values = oracle.eval_batch(&xs)?;
    write_csv(
        &cfg.out.join("oracle.csv"),
        &["x", "F", "G", "E", "O"],
        xs.iter().zip(&values).map(|(x, (f, g, e, o))| {
            vec![fmt_f64(*x), fmt_f64(*f), fmt_f64(*g), fmt_f64(*e), fmt_f64(*o)]
        }),
    )?;
    println!("wrote {} oracle rows (lambda = {})", xs.len(), cfg.lambda);
    Ok(true)
}

fn dump_trajectory(path: &std::path::Path, m: &Model, traj: &hop_core::jumps::FullTrajectory) -> Result<()> {
    let n = m.rank();
    let mut header: Vec<String> = vec!["t".into()];
    header.extend((1..=n).map(|i| format!("x{i}")));
    header.push("angular_word".into());
    header.push("jump_flag".into());
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let jump_times: Vec<f64> = traj.jumps.iter().map(|j| j.time).collect();
    let mut angular_iter = traj.angular_path.iter().peekable();
    let mut current_word = "e".to_string();
    let rows: Vec<Vec<String>> = traj
        .base
        .times
        .iter()
        .zip(&traj.base.positions)
        .map(|(&t, x)| {
            while let Some(&&(at, w)) = angular_iter.peek() {
                if at <= t {
                    current_word = m.weyl.elements[w].word_string();
                    angular_iter.next();
                } else {
                    break;
                }
            }
            let jumped = jump_times.binary_search_by(|j| j.partial_cmp(&t).unwrap()).is_ok();
            let mut row = vec![fmt_f64(t)];
            row.extend(x.iter().map(|v| fmt_f64(*v)));
            row.push(current_word.clone());
            row.push(if jumped { "1".into() } else { "0".into() });
            row
        })
        .collect();
    write_csv(path, &header_refs, rows)
}

fn run_simulate_radial(cfg: &RunConfig) -> Result<bool> {
    let m = cfg.build_model()?;
    let x0 = cfg.start_point(&m)?;
    let stepper = cfg.stepper();
    let ens = hop_core::diffusion::radial_ensemble(&m, &x0, &stepper, cfg.paths, 0)?;
    let n = m.rank();
    let mut header: Vec<String> = vec!["path".into()];
    header.extend((1..=n).map(|i| format!("x{i}")));
    header.push("wall_min".into());
    header.push("steps".into());
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    write_csv(
        &cfg.out.join("terminals.csv"),
        &header_refs,
        ens.iter().enumerate().map(|(i, s)| {
            let mut row = vec![i.to_string()];
            row.extend(s.terminal.iter().map(|v| fmt_f64(*v)));
            row.push(fmt_f64(s.wall_min));
            row.push(s.steps.to_string());
            row
        }),
    )?;
    // Full-resolution dump of the first trajectory.
    let rec = simulate_radial(&m, &x0, &stepper, hop_core::rng::ensemble_stream(0, 0))?;
    let mut header: Vec<String> = vec!["t".into()];
    header.extend((1..=n).map(|i| format!("x{i}")));
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    write_csv(
        &cfg.out.join("trajectory.csv"),
        &header_refs,
        rec.times.iter().zip(&rec.positions).map(|(&t, x)| {
            let mut row = vec![fmt_f64(t)];
            row.extend(x.iter().map(|v| fmt_f64(*v)));
            row
        }),
    )?;
    let wall_min = ens.iter().map(|s| s.wall_min).fold(f64::INFINITY, f64::min);
    let tests = vec![TestResult::bound("chamber_preserved", wall_min, wall_min > 0.0)];
    write_report(cfg, serde_json::json!({ "paths": cfg.paths, "ensemble_wall_min": wall_min }), tests)
}

fn run_simulate_full(cfg: &RunConfig) -> Result<bool> {
    let m = cfg.build_model()?;
    let x0 = cfg.start_point(&m)?;
    let stepper = cfg.stepper();
    let order = cfg.order.clone();
    let ens = hop_core::jumps::full_ensemble(
        &m,
        &x0,
        &stepper,
        cfg.method,
        order.as_deref(),
        cfg.paths,
        0,
    )?;
    let n = m.rank();
    let mut header: Vec<String> = vec!["path".into()];
    header.extend((1..=n).map(|i| format!("x{i}")));
    header.push("final_angular".into());
    header.push("n_jumps".into());
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    write_csv(
        &cfg.out.join("terminals.csv"),
        &header_refs,
        ens.iter().enumerate().map(|(i, s)| {
            let mut row = vec![i.to_string()];
            row.extend(s.terminal.iter().map(|v| fmt_f64(*v)));
            row.push(
                s.final_angular
                    .map(|w| m.weyl.elements[w].word_string())
                    .unwrap_or_else(|| "?".into()),
            );
            row.push(s.jump_times.len().to_string());
            row
        }),
    )?;
    let traj = simulate_full(
        &m,
        &x0,
        &stepper,
        cfg.method,
        order.as_deref(),
        hop_core::rng::ensemble_stream(0, 0),
    )?;
    dump_trajectory(&cfg.out.join("trajectory.csv"), &m, &traj)?;
    let undetermined = ens.iter().filter(|s| s.final_angular.is_none()).count();
    let wall_min = ens.iter().map(|s| s.wall_min).fold(f64::INFINITY, f64::min);
    let tests = vec![TestResult::bound("walls_avoided", wall_min, wall_min > 0.0)];
    write_report(
        cfg,
        serde_json::json!({
            "paths": cfg.paths,
            "method": cfg.method,
            "undetermined": undetermined,
            "mean_jumps": ens.iter().map(|s| s.jump_times.len()).sum::<usize>() as f64
                / cfg.paths as f64,
        }),
        tests,
    )
}

fn run_couple(cfg: &RunConfig) -> Result<bool> {
    let m = cfg.build_model()?;
    let x0 = cfg.start_point(&m)?;
    let y0 = cfg.second_point(&m)?;
    let stepper = cfg.stepper();
    let ens = coupling_ensemble(&m, &x0, &y0, &stepper, cfg.paths, 0)?;
    let stats = coupling_statistics(&ens, cfg.horizon)?;
    write_csv(
        &cfg.out.join("pairs.csv"),
        &["pair", "coupling_time", "qv", "qv_rate", "drift_gap_sup"],
        ens.iter().enumerate().map(|(i, s)| {
            vec![
                i.to_string(),
                s.coupling_time.map(fmt_f64).unwrap_or_default(),
                fmt_f64(s.qv),
                s.coupling_time.map(|t| fmt_f64(qv_rate(s.qv, t))).unwrap_or_default(),
                fmt_f64(s.drift_gap_sup),
            ]
        }),
    )?;
    let mut tests = Vec::new();
    if let Some(rate) = stats.median_qv_rate {
        tests.push(TestResult::bound(
            "median_qv_rate_brownian_band",
            rate,
            (0.9..=1.1).contains(&rate),
        ));
    }
    let wall_min = ens.iter().map(|s| s.wall_min).fold(f64::INFINITY, f64::min);
    tests.push(TestResult::bound("chamber_preserved", wall_min, wall_min > 0.0));
    write_report(cfg, &stats, tests)
}

fn run_equivalence(cfg: &RunConfig) -> Result<bool> {
    let m = cfg.build_model()?;
    let x0 = cfg.start_point(&m)?;
    let stepper = cfg.stepper();
    let report = compare_constructions(&m, &x0, &stepper, cfg.paths, cfg.order.as_deref())?;
    let tests = report.tests.clone();
    write_report(cfg, &report, tests)
}

fn run_hw(cfg: &RunConfig) -> Result<bool> {
    let m = cfg.build_model()?;
    let x0 = cfg.start_point(&m)?;
    let stepper = cfg.stepper();
    let table = estimate_hw(&m, &x0, &stepper, cfg.paths, cfg.method, cfg.order.as_deref(), 0)?;
    write_csv(
        &cfg.out.join("hw.csv"),
        &["w", "word", "estimate", "stderr"],
        table.per_w.iter().enumerate().map(|(w, e)| {
            vec![
                w.to_string(),
                m.weyl.elements[w].word_string(),
                fmt_f64(e.value),
                fmt_f64(e.stderr),
            ]
        }),
    )?;
    let total = table.total();
    let tests = vec![TestResult::bound(
        "row_sums_to_one",
        total,
        (total - 1.0).abs() < 1e-12,
    )];
    write_report(cfg, &table, tests)
}

fn run_martingale(cfg: &RunConfig) -> Result<bool> {
    let params = cfg.rank1_params()?;
    let m = cfg.build_model()?;
    let x0 = cfg.start_point(&m)?;
    let stepper = cfg.stepper();
    let mut tests = Vec::new();
    let mut reports = Vec::new();
    for lambda_sign in [1.0, -1.0] {
        let oracle = Rank1Oracle::new(params, lambda_sign * params.rho())?;
        let field = ScalarField::new(move |x: &[f64]| {
            oracle.g(x[0]).expect("oracle evaluation")
        });
        for &t in &cfg.t_eval {
            let rep = martingale_check(&m, &field, &x0, t, &stepper, cfg.paths, tests.len() as u64)?;
            tests.push(TestResult {
                name: format!("martingale_g_{}rho_t{t}", if lambda_sign > 0.0 { "" } else { "minus_" }),
                statistic: rep.z.unwrap_or(0.0),
                p: None,
                pass: rep.pass,
            });
            reports.push(rep);
        }
    }
    write_report(cfg, &reports, tests)
}

fn run_theorem1(cfg: &RunConfig) -> Result<bool> {
    let m = cfg.build_model()?;
    let x0 = cfg.start_point(&m)?;
    let y0 = cfg.second_point(&m)?;
    let stepper = cfg.stepper();
    let rep = theorem1_experiment(&m, &x0, &y0, &stepper, cfg.paths)?;
    let tests: Vec<TestResult> = rep
        .panel
        .iter()
        .map(|e| TestResult::bound(format!("panel_{}", e.name), e.diff, e.pass))
        .collect();
    write_report(cfg, &rep, tests)
}

fn run_basis(cfg: &RunConfig) -> Result<bool> {
    let params = cfg.rank1_params()?;
    let stepper = cfg.stepper();
    let rep = basis_change_rank1(params, &cfg.basis_grid, &stepper, cfg.paths)?;
    write_csv(
        &cfg.out.join("basis_grid.csv"),
        &["x", "h_id", "h_id_stderr", "h_s", "h_s_stderr", "g_plus", "g_minus"],
        rep.grid.iter().enumerate().map(|(i, &x)| {
            vec![
                fmt_f64(x),
                fmt_f64(rep.h_id[i].value),
                fmt_f64(rep.h_id[i].stderr),
                fmt_f64(rep.h_s[i].value),
                fmt_f64(rep.h_s[i].stderr),
                fmt_f64(rep.g_plus[i]),
                fmt_f64(rep.g_minus[i]),
            ]
        }),
    )?;
    let tests = rep.tests.clone();
    write_report(cfg, &rep, tests)
}

fn run_lln(cfg: &RunConfig) -> Result<bool> {
    let m = cfg.build_model()?;
    let x0 = cfg.start_point(&m)?;
    let stepper = cfg.stepper();
    let rep = lln_check(&m, &x0, &stepper, cfg.paths)?;
    let tests: Vec<TestResult> = rep
        .z
        .iter()
        .enumerate()
        .map(|(i, &z)| TestResult::bound(format!("lln_component_{i}"), z, z.abs() < 3.0))
        .collect();
    write_report(cfg, &rep, tests)
}
