//! Seeded, replicated experiment runs producing tabular excess-risk records.
//!
//! Every run is a pure function of `(config, master seed)`. Random streams are
//! derived from the master seed, the replicate seed and the grid-point index,
//! never from execution order, so parallel execution does not change results.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{argument, Error, Result};
use crate::kernel::{gram, kappa_sq, scale_shift, KernelSpec, MaternOrder};
use crate::linalg::{eig_sym, estimate_nu, least_squares_slope};
use crate::schedule::{choose_params, Strategy};
use crate::solver::{run_sgd, SgdConfig};
use crate::synth::{sample_dataset, RiskEvaluator, TargetFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentKind {
    Precond,
    CritBatch,
    StepSmooth,
    StepBatch,
    Rate,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        ExperimentKind::Precond,
        ExperimentKind::CritBatch,
        ExperimentKind::StepSmooth,
        ExperimentKind::StepBatch,
        ExperimentKind::Rate,
    ];

    pub fn id(self) -> &'static str {
        match self {
            ExperimentKind::Precond => "precond",
            ExperimentKind::CritBatch => "critbatch",
            ExperimentKind::StepSmooth => "step-smooth",
            ExperimentKind::StepBatch => "step-batch",
            ExperimentKind::Rate => "rate",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.id() == s)
            .ok_or_else(|| argument(format!("unknown experiment '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub n: usize,
    /// Batch size where the experiment does not sweep it.
    pub b: usize,
    /// Step size where the experiment does not sweep it.
    pub gamma: f64,
    /// Iteration count where the experiment does not derive it.
    pub iterations: usize,
    /// Effective Gaussian widths (precond).
    pub widths: Vec<f64>,
    /// Width of the Gaussian target and of the base space.
    pub base_width: f64,
    /// Matérn orders of the learning kernel.
    pub orders: Vec<f64>,
    /// Matérn order of the target, for Matérn-target experiments.
    pub target_order: f64,
    pub b_grid: Vec<usize>,
    pub gamma_grid: Vec<f64>,
    /// Sample sizes (rate).
    pub ns: Vec<usize>,
    /// Sample size whose Gram spectrum is used to estimate ν (rate).
    pub nu_probe_n: usize,
    pub seeds: Vec<u64>,
    pub master_seed: u64,
    pub noise_var: f64,
    pub m_test: usize,
}

fn pow2_grid(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|k| 2f64.powi(k)).collect()
}

impl ExperimentConfig {
    /// Defaults for each experiment.
    pub fn defaults(experiment: ExperimentKind) -> Self {
        let base = Self {
            experiment,
            n: 3000,
            b: 1,
            gamma: 1e-3,
            iterations: 1,
            widths: vec![0.5, 1.0, 2.0],
            base_width: 1.0,
            orders: vec![3.5],
            target_order: 3.5,
            b_grid: Vec::new(),
            gamma_grid: Vec::new(),
            ns: Vec::new(),
            nu_probe_n: 1024,
            seeds: (0..10).collect(),
            master_seed: 0,
            noise_var: 0.01,
            m_test: 2000,
        };
        match experiment {
            ExperimentKind::Precond => Self {
                b: 300,
                gamma: 1e-3,
                iterations: 1 << 16,
                ..base
            },
            ExperimentKind::CritBatch => Self {
                gamma: 10.0,
                iterations: 3,
                b_grid: vec![1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024, 2048, 3000],
                ..base
            },
            ExperimentKind::StepSmooth => Self {
                n: 1000,
                orders: vec![0.5, 1.5, 2.5, 3.5],
                gamma_grid: pow2_grid(-8, 1),
                ..base
            },
            ExperimentKind::StepBatch => Self {
                b_grid: vec![5, 10, 20, 40],
                gamma_grid: (0..8).map(|k| 1.25e-3 * 2f64.powi(k)).collect(),
                ..base
            },
            ExperimentKind::Rate => Self {
                ns: vec![256, 512, 1024, 2048, 4096],
                seeds: (0..20).collect(),
                ..base
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(argument(msg));
        if self.seeds.is_empty() {
            return fail("seeds must be nonempty".into());
        }
        let mut sorted = self.seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.seeds.len() {
            return fail("seeds must be distinct".into());
        }
        if self.n == 0 || self.m_test == 0 {
            return fail("n and m_test must be positive".into());
        }
        if !(self.noise_var >= 0.0) {
            return fail(format!("noise_var must be nonnegative, got {}", self.noise_var));
        }
        let need = |ok: bool, what: &str| if ok { Ok(()) } else { fail(format!("{what} must be nonempty")) };
        match self.experiment {
            ExperimentKind::Precond => {
                need(!self.widths.is_empty(), "widths")?;
                if self.b == 0 || self.b > self.n || self.iterations == 0 {
                    return fail("precond needs 1 <= b <= n and T >= 1".into());
                }
            }
            ExperimentKind::CritBatch => {
                need(!self.b_grid.is_empty(), "b_grid")?;
                need(!self.orders.is_empty(), "orders")?;
                if let Some(&b) = self.b_grid.iter().find(|&&b| b == 0 || b > self.n) {
                    return fail(format!("batch size {b} outside [1, n]"));
                }
                if self.iterations == 0 {
                    return fail("T must be positive".into());
                }
            }
            ExperimentKind::StepSmooth => {
                need(!self.orders.is_empty(), "orders")?;
                need(!self.gamma_grid.is_empty(), "gamma_grid")?;
                if self.b == 0 || !self.n.is_multiple_of(self.b) {
                    return fail(format!("one-pass runs need b dividing n, got b = {}", self.b));
                }
            }
            ExperimentKind::StepBatch => {
                need(!self.orders.is_empty(), "orders")?;
                need(!self.b_grid.is_empty(), "b_grid")?;
                need(!self.gamma_grid.is_empty(), "gamma_grid")?;
                if let Some(&b) = self.b_grid.iter().find(|&&b| b == 0 || !self.n.is_multiple_of(b)) {
                    return fail(format!("one-pass runs need T*b = n; b = {b} does not divide n = {}", self.n));
                }
            }
            ExperimentKind::Rate => {
                need(!self.orders.is_empty(), "orders")?;
                if self.ns.len() < 4 {
                    return fail("rate needs at least 4 sample sizes".into());
                }
                if self.ns.iter().any(|&n| n < 2) || self.nu_probe_n < 2 {
                    return fail("sample sizes must be at least 2".into());
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Ok,
    Diverged,
    PreTail,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Diverged => "diverged",
            Status::PreTail => "pre-tail",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub experiment: ExperimentKind,
    /// Replicate seed, or `-1` for aggregate rows.
    pub seed: i64,
    pub n: usize,
    pub b: usize,
    pub gamma: f64,
    pub iterations: usize,
    pub scale_param: f64,
    pub iteration: usize,
    pub excess_risk: f64,
    pub status: Status,
}

impl ResultRow {
    fn same_point(&self, other: &ResultRow) -> bool {
        self.experiment == other.experiment
            && self.n == other.n
            && self.b == other.b
            && self.gamma.to_bits() == other.gamma.to_bits()
            && self.iterations == other.iterations
            && self.scale_param.to_bits() == other.scale_param.to_bits()
            && self.iteration == other.iteration
    }
}

pub const CSV_HEADER: &str = "experiment,seed,n,b,gamma,T,scale_param,iteration,excess_risk,status";

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentResult {
    pub rows: Vec<ResultRow>,
}

impl ExperimentResult {
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                r.experiment,
                r.seed,
                r.n,
                r.b,
                r.gamma,
                r.iterations,
                r.scale_param,
                r.iteration,
                r.excess_risk,
                r.status.as_str()
            )?;
        }
        Ok(())
    }

    /// Rows at the final iteration of each run.
    pub fn finals(&self) -> impl Iterator<Item = &ResultRow> {
        self.rows.iter().filter(|r| r.iteration == r.iterations)
    }

    pub fn aggregates(&self) -> impl Iterator<Item = &ResultRow> {
        self.rows.iter().filter(|r| r.seed < 0)
    }

    /// True when every final per-seed row diverged.
    pub fn all_diverged(&self) -> bool {
        let mut finals = self.finals().filter(|r| r.seed >= 0).peekable();
        finals.peek().is_some() && finals.all(|r| r.status == Status::Diverged)
    }
}

/// Geometric checkpoints `{0, 1, 2, 4, ...} ∪ {T}`.
pub fn checkpoint_grid(iterations: usize) -> Vec<usize> {
    let mut grid = vec![0];
    let mut t = 1;
    while t < iterations {
        grid.push(t);
        t *= 2;
    }
    grid.push(iterations);
    grid
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of an independent stream identified by `parts` under `master`.
pub fn stream_seed(master: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(splitmix(master), |acc, &p| splitmix(acc ^ splitmix(p)))
}

const DATA_STREAM: u64 = 1;
const TEST_STREAM: u64 = 2;
const SAMPLING_STREAM: u64 = 3;

struct Run {
    grid_index: u64,
    b: usize,
    gamma: f64,
    iterations: usize,
}

/// One dataset and kernel shared by a list of runs.
struct Task {
    seed: u64,
    n: usize,
    kernel: KernelSpec,
    runs: Vec<Run>,
}

fn run_task(cfg: &ExperimentConfig, target: &TargetFunction, task: &Task) -> Result<Vec<ResultRow>> {
    let data = sample_dataset(
        target,
        task.n,
        cfg.noise_var,
        stream_seed(cfg.master_seed, &[DATA_STREAM, task.seed, task.n as u64]),
    )?;
    let g = gram(&task.kernel, &data.xs)?;
    let evaluator = RiskEvaluator::new(
        target,
        &task.kernel,
        &data.xs,
        cfg.m_test,
        stream_seed(cfg.master_seed, &[TEST_STREAM, task.seed]),
    )?;

    let mut rows = Vec::new();
    for run in &task.runs {
        let sgd = SgdConfig::new(
            run.gamma,
            run.b,
            run.iterations,
            stream_seed(cfg.master_seed, &[SAMPLING_STREAM, task.seed, run.grid_index]),
        )
        .with_checkpoints(checkpoint_grid(run.iterations));
        let (traj, diverged_at) = run_sgd(&g, &data.ys, &sgd)?;
        let row = |iteration, excess_risk, status| ResultRow {
            experiment: cfg.experiment,
            seed: task.seed as i64,
            n: task.n,
            b: run.b,
            gamma: run.gamma,
            iterations: run.iterations,
            scale_param: task.kernel.scale_param(),
            iteration,
            excess_risk,
            status,
        };
        for cp in &traj.checkpoints {
            let risk = evaluator.risk(&cp.alpha);
            let status = if !risk.is_finite() {
                Status::Diverged
            } else if cp.pre_tail {
                Status::PreTail
            } else {
                Status::Ok
            };
            rows.push(row(cp.iteration, risk, status));
        }
        if let Some(t) = diverged_at {
            log::warn!(
                "{} seed {} b={} gamma={} diverged at iteration {t}",
                cfg.experiment,
                task.seed,
                run.b,
                run.gamma
            );
            for cp in sgd.checkpoints.iter().filter(|&&c| c >= t) {
                rows.push(row(*cp, f64::INFINITY, Status::Diverged));
            }
        }
    }
    Ok(rows)
}

fn execute(cfg: &ExperimentConfig, target: &TargetFunction, tasks: Vec<Task>) -> Result<ExperimentResult> {
    let chunks: Vec<Vec<ResultRow>> = tasks
        .par_iter()
        .map(|t| run_task(cfg, target, t))
        .collect::<Result<_>>()?;
    Ok(ExperimentResult {
        rows: chunks.into_iter().flatten().collect(),
    })
}

fn expect_kind(cfg: &ExperimentConfig, kind: ExperimentKind) -> Result<()> {
    if cfg.experiment != kind {
        return Err(argument(format!(
            "config is for '{}', expected '{}'",
            cfg.experiment, kind
        )));
    }
    cfg.validate()
}

fn matern(order: f64) -> Result<KernelSpec> {
    KernelSpec::matern(MaternOrder::from_value(order)?, 1.0, 1)
}

fn matern_target(cfg: &ExperimentConfig) -> Result<TargetFunction> {
    TargetFunction::three_bumps(matern(cfg.target_order)?)
}

fn gaussian_target(cfg: &ExperimentConfig) -> Result<TargetFunction> {
    TargetFunction::three_bumps(KernelSpec::gaussian(cfg.base_width, 1)?)
}

/// Mini-batch SGD with Gaussian kernels of several widths on a Gaussian-sum target.
///
/// Each width `σ` is reached from the base space by the scale shift `s = σ - σ_0`.
pub fn exp_preconditioning(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    expect_kind(cfg, ExperimentKind::Precond)?;
    let target = gaussian_target(cfg)?;
    let base = KernelSpec::gaussian(cfg.base_width, 1)?;
    let mut tasks = Vec::new();
    for &seed in &cfg.seeds {
        for (i, &w) in cfg.widths.iter().enumerate() {
            tasks.push(Task {
                seed,
                n: cfg.n,
                kernel: scale_shift(&base, w - cfg.base_width)?,
                runs: vec![Run {
                    grid_index: i as u64,
                    b: cfg.b,
                    gamma: cfg.gamma,
                    iterations: cfg.iterations,
                }],
            });
        }
    }
    execute(cfg, &target, tasks)
}

/// Batch-size sweep at a fixed large step size and few iterations.
pub fn exp_critical_batchsize(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    expect_kind(cfg, ExperimentKind::CritBatch)?;
    let target = matern_target(cfg)?;
    let kernel = matern(cfg.orders[0])?;
    let tasks = cfg
        .seeds
        .iter()
        .map(|&seed| Task {
            seed,
            n: cfg.n,
            kernel,
            runs: cfg
                .b_grid
                .iter()
                .enumerate()
                .map(|(i, &b)| Run {
                    grid_index: i as u64,
                    b,
                    gamma: cfg.gamma,
                    iterations: cfg.iterations,
                })
                .collect(),
        })
        .collect();
    execute(cfg, &target, tasks)
}

/// One-pass SGD across Matérn smoothness levels, sweeping the step size.
pub fn exp_stepsize_smoothness(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    expect_kind(cfg, ExperimentKind::StepSmooth)?;
    let target = matern_target(cfg)?;
    let mut tasks = Vec::new();
    for &seed in &cfg.seeds {
        for (oi, &order) in cfg.orders.iter().enumerate() {
            tasks.push(Task {
                seed,
                n: cfg.n,
                kernel: matern(order)?,
                runs: cfg
                    .gamma_grid
                    .iter()
                    .enumerate()
                    .map(|(gi, &gamma)| Run {
                        grid_index: (oi * cfg.gamma_grid.len() + gi) as u64,
                        b: cfg.b,
                        gamma,
                        iterations: cfg.n / cfg.b,
                    })
                    .collect(),
            });
        }
    }
    execute(cfg, &target, tasks)
}

/// One-pass SGD (`T = n / b`) over a (batch size, step size) grid.
pub fn exp_stepsize_batchsize(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    expect_kind(cfg, ExperimentKind::StepBatch)?;
    let target = gaussian_target(cfg)?;
    let kernel = matern(cfg.orders[0])?;
    let tasks = cfg
        .seeds
        .iter()
        .map(|&seed| {
            let mut runs = Vec::new();
            for &b in &cfg.b_grid {
                for &gamma in &cfg.gamma_grid {
                    runs.push(Run {
                        grid_index: runs.len() as u64,
                        b,
                        gamma,
                        iterations: cfg.n / b,
                    });
                }
            }
            Task {
                seed,
                n: cfg.n,
                kernel,
                runs,
            }
        })
        .collect();
    execute(cfg, &target, tasks)
}

/// `λ` grid spanning `1/(γ n_max)` to `1/(γ √n_min)`, i.e. every horizon `γT`
/// an early-stopping schedule can produce over the sample sizes.
pub fn rate_lambda_grid(cfg: &ExperimentConfig, gamma: f64) -> Vec<f64> {
    let n_max = *cfg.ns.iter().max().unwrap_or(&2) as f64;
    let n_min = *cfg.ns.iter().min().unwrap_or(&2) as f64;
    let lo = 1.0 / (gamma * n_max);
    let hi = 1.0 / (gamma * n_min.sqrt());
    let k = 9;
    (0..k)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (k - 1) as f64).exp())
        .collect()
}

/// Estimates `ν` from the spectrum of `G/n` on a probe dataset.
pub fn measure_nu(cfg: &ExperimentConfig) -> Result<f64> {
    let target = matern_target(cfg)?;
    let kernel = matern(cfg.orders[0])?;
    let data = sample_dataset(
        &target,
        cfg.nu_probe_n,
        cfg.noise_var,
        stream_seed(cfg.master_seed, &[DATA_STREAM, u64::MAX, cfg.nu_probe_n as u64]),
    )?;
    let g = gram(&kernel, &data.xs)?;
    let spectrum = eig_sym(&(g.matrix() / cfg.nu_probe_n as f64))?;
    let gamma = crate::schedule::STEP_FRACTION / kappa_sq(&kernel);
    estimate_nu(spectrum.eigenvalues(), &rate_lambda_grid(cfg, gamma))
}

/// Well-specified rate check: early-stopping schedules at `β = 0` with the
/// measured `ν̂`, one run per sample size and seed.
pub fn exp_rate(cfg: &ExperimentConfig) -> Result<(ExperimentResult, f64)> {
    expect_kind(cfg, ExperimentKind::Rate)?;
    let nu_hat = measure_nu(cfg)?;
    // ν̂ is clamped to [0, 1]; the schedule exponents need ν > 0.
    let nu = nu_hat.max(1e-3);
    let target = matern_target(cfg)?;
    let kernel = matern(cfg.orders[0])?;
    let mut tasks = Vec::new();
    for &seed in &cfg.seeds {
        for (i, &n) in cfg.ns.iter().enumerate() {
            let s = choose_params(n, 0.0, nu, 1.0, 1.0, Strategy::EarlyStop, kappa_sq(&kernel))?;
            tasks.push(Task {
                seed,
                n,
                kernel,
                runs: vec![Run {
                    grid_index: i as u64,
                    b: s.batch,
                    gamma: s.gamma,
                    iterations: s.iterations,
                }],
            });
        }
    }
    Ok((execute(cfg, &target, tasks)?, nu_hat))
}

/// Empirical decay exponent: minus the least-squares slope of `log risk` on `log n`.
pub fn fit_rate(ns: &[usize], risks: &[f64]) -> Result<f64> {
    if ns.len() != risks.len() {
        return Err(argument("ns and risks differ in length"));
    }
    if ns.len() < 4 {
        return Err(argument(format!("need at least 4 points, got {}", ns.len())));
    }
    if let Some(r) = risks.iter().find(|&&r| !(r > 0.0 && r.is_finite())) {
        return Err(argument(format!("risks must be positive and finite, got {r}")));
    }
    if ns.contains(&0) {
        return Err(argument("sample sizes must be positive"));
    }
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = risks.iter().map(|r| r.ln()).collect();
    let slope = least_squares_slope(&xs, &ys).ok_or_else(|| argument("sample sizes are all equal"))?;
    Ok(-slope)
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.total_cmp(b));
    let k = values.len();
    if k == 0 {
        return f64::NAN;
    }
    if k % 2 == 1 {
        values[k / 2]
    } else {
        let (lo, hi) = (values[k / 2 - 1], values[k / 2]);
        if lo.is_infinite() || hi.is_infinite() {
            hi
        } else {
            0.5 * (lo + hi)
        }
    }
}

/// Median-over-seeds rows (seed = -1), one per configuration point and iteration,
/// in order of first appearance. Diverged seeds count as infinite risk.
pub fn aggregate(rows: &[ResultRow]) -> Vec<ResultRow> {
    let mut groups: Vec<(ResultRow, Vec<f64>, bool)> = Vec::new();
    for r in rows.iter().filter(|r| r.seed >= 0) {
        let risk = if r.status == Status::Diverged { f64::INFINITY } else { r.excess_risk };
        match groups.iter_mut().find(|(head, _, _)| head.same_point(r)) {
            Some((_, values, pre)) => {
                values.push(risk);
                *pre |= r.status == Status::PreTail;
            }
            None => groups.push((r.clone(), vec![risk], r.status == Status::PreTail)),
        }
    }
    groups
        .into_iter()
        .map(|(head, mut values, pre_tail)| {
            let m = median(&mut values);
            let status = if !m.is_finite() {
                Status::Diverged
            } else if pre_tail {
                Status::PreTail
            } else {
                Status::Ok
            };
            ResultRow {
                seed: -1,
                excess_risk: m,
                status,
                ..head
            }
        })
        .collect()
}

/// Runs the configured experiment for every seed and appends median rows.
pub fn run_replicated(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let mut result = match cfg.experiment {
        ExperimentKind::Precond => exp_preconditioning(cfg)?,
        ExperimentKind::CritBatch => exp_critical_batchsize(cfg)?,
        ExperimentKind::StepSmooth => exp_stepsize_smoothness(cfg)?,
        ExperimentKind::StepBatch => exp_stepsize_batchsize(cfg)?,
        ExperimentKind::Rate => exp_rate(cfg)?.0,
    };
    let agg = aggregate(&result.rows);
    result.rows.extend(agg);
    Ok(result)
}

/// First checkpoint at which the risk is within `factor` of the trajectory's best.
pub fn iterations_to_best(trajectory: &[(usize, f64)], factor: f64) -> Option<usize> {
    let best = trajectory
        .iter()
        .map(|&(_, r)| r)
        .filter(|r| r.is_finite())
        .fold(f64::INFINITY, f64::min);
    trajectory
        .iter()
        .find(|&&(_, r)| r.is_finite() && r <= factor * best)
        .map(|&(t, _)| t)
}

/// Population standard deviation over mean.
pub fn coefficient_of_variation(values: &[f64]) -> f64 {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / k;
    var.sqrt() / mean
}
