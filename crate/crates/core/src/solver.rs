//! Tail-averaged mini-batch SGD and batch GD for kernel least squares.
//!
//! Iterates are kept as coefficient vectors over the training points:
//! `f_t = Σ_j α_j k̃(x_j, ·)`, where `k̃` is the kernel of the shifted space the
//! recursion runs in. Every update direction `L^{-2s} K_{x_j}` is a section of
//! `k̃`, so the representation is exact.
//!
//! The estimate returned is the tail average over iterations
//! `⌊T/2⌋ + 1 ..= T`, normalized by the tail length `⌈T/2⌉`.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{argument, Error, Result};
use crate::kernel::{cross_gram, gram, kappa_sq, scale_shift, GramMatrix, KernelSpec, Points};
use crate::linalg::{apply_filter, eig_sym};
use crate::Check;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sampling {
    /// `b` indices drawn i.i.d. uniformly with replacement per step.
    IidUniform,
    /// Every step visits all `n` points in order; requires `batch = n`.
    FullBatch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SgdConfig {
    pub gamma: f64,
    pub batch: usize,
    pub iterations: usize,
    pub sampling: Sampling,
    pub seed: u64,
    /// Iterations (in `0..=iterations`) at which coefficient snapshots are kept.
    pub checkpoints: Vec<usize>,
}

impl SgdConfig {
    pub fn new(gamma: f64, batch: usize, iterations: usize, seed: u64) -> Self {
        Self {
            gamma,
            batch,
            iterations,
            sampling: Sampling::IidUniform,
            seed,
            checkpoints: Vec::new(),
        }
    }

    pub fn full_batch(n: usize, gamma: f64, iterations: usize) -> Self {
        Self {
            sampling: Sampling::FullBatch,
            ..Self::new(gamma, n, iterations, 0)
        }
    }

    pub fn with_checkpoints(mut self, checkpoints: Vec<usize>) -> Self {
        self.checkpoints = checkpoints;
        self
    }

    fn validate(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(argument("training set is empty"));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(argument(format!("step size must be finite and nonnegative, got {}", self.gamma)));
        }
        if self.batch == 0 || self.batch > n {
            return Err(argument(format!("batch size {} outside [1, {n}]", self.batch)));
        }
        if self.iterations == 0 {
            return Err(argument("need at least one iteration"));
        }
        if self.sampling == Sampling::FullBatch && self.batch != n {
            return Err(argument(format!(
                "full-batch sampling requires batch = n = {n}, got {}",
                self.batch
            )));
        }
        Ok(())
    }
}

/// Coefficient snapshot. Before the tail starts this is the plain iterate;
/// afterwards it is the tail average accumulated so far.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub iteration: usize,
    pub alpha: DVector<f64>,
    pub pre_tail: bool,
}

/// Output of a recursion on a precomputed Gram matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub alpha: DVector<f64>,
    pub checkpoints: Vec<Checkpoint>,
}

/// A learned function `x ↦ Σ_j α_j k̃(x_j, x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FitModel {
    pub spec: KernelSpec,
    pub xs: Points,
    pub alpha: DVector<f64>,
    pub checkpoints: Vec<Checkpoint>,
}

impl FitModel {
    pub fn new(spec: KernelSpec, xs: Points, alpha: DVector<f64>) -> Result<Self> {
        if xs.len() != alpha.len() {
            return Err(argument(format!(
                "{} coefficients for {} training points",
                alpha.len(),
                xs.len()
            )));
        }
        if xs.dim() != spec.dim() {
            return Err(argument("training points do not match the kernel dimension"));
        }
        Ok(Self {
            spec,
            xs,
            alpha,
            checkpoints: Vec::new(),
        })
    }

    fn from_trajectory(spec: KernelSpec, xs: &Points, traj: Trajectory) -> Self {
        Self {
            spec,
            xs: xs.clone(),
            alpha: traj.alpha,
            checkpoints: traj.checkpoints,
        }
    }

    /// Predictions at many points at once.
    pub fn predict_many(&self, points: &Points) -> Result<DVector<f64>> {
        Ok(cross_gram(&self.spec, points, &self.xs)? * &self.alpha)
    }
}

pub fn predict(model: &FitModel, x: &[f64]) -> Result<f64> {
    if x.len() != model.spec.dim() {
        return Err(argument(format!(
            "point has dimension {}, model expects {}",
            x.len(),
            model.spec.dim()
        )));
    }
    Ok(model
        .xs
        .iter()
        .zip(model.alpha.iter())
        .map(|(xj, a)| a * model.spec.eval_unchecked(xj, x))
        .sum())
}

/// Warns when `γ κ² ≥ 1/4`, outside the range covered by the excess-risk bound.
pub fn stepsize_check(gamma: f64, kappa_sq: f64) -> Check {
    let product = gamma * kappa_sq;
    if product < 0.25 {
        Check::Ok
    } else {
        Check::Warn(format!(
            "step size {gamma} with kappa^2 = {kappa_sq} gives gamma*kappa^2 = {product} >= 1/4"
        ))
    }
}

/// Tail-averaged GD filter `Ḡ_T(σ)` and its residual `R̄_T(σ) = 1 - σ Ḡ_T(σ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterValue {
    pub gbar: f64,
    pub rbar: f64,
}

/// Evaluates `Ḡ_T(σ) = (1/⌈T/2⌉) Σ_{t=⌊T/2⌋+1}^T G_t(σ)` with
/// `G_t(σ) = γ Σ_{k<t} (1 - γσ)^k`. `T = 0` is the zero estimator.
pub fn filter_gd(sigma: f64, gamma: f64, iterations: usize) -> FilterValue {
    let q = 1.0 - gamma * sigma;
    let half = iterations / 2;
    let mut g_t = 0.0;
    let mut power = 1.0;
    let mut tail_sum = 0.0;
    for t in 1..=iterations {
        g_t += gamma * power;
        power *= q;
        if t > half {
            tail_sum += g_t;
        }
    }
    let tail_len = iterations - half;
    let gbar = if tail_len == 0 { 0.0 } else { tail_sum / tail_len as f64 };
    FilterValue {
        gbar,
        rbar: 1.0 - sigma * gbar,
    }
}

/// Draws mini-batch indices.
#[derive(Debug, Clone)]
pub struct BatchSampler {
    rng: ChaCha8Rng,
    n: usize,
}

impl BatchSampler {
    pub fn new(n: usize, seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            n,
        }
    }

    pub fn fill(&mut self, batch: &mut [usize]) {
        for j in batch.iter_mut() {
            *j = self.rng.random_range(0..self.n);
        }
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    const LANES: usize = 8;
    let mut acc = [0.0; LANES];
    let ca = a.chunks_exact(LANES);
    let cb = b.chunks_exact(LANES);
    let tail: f64 = ca
        .remainder()
        .iter()
        .zip(cb.remainder())
        .map(|(x, y)| x * y)
        .sum();
    for (x, y) in ca.zip(cb) {
        for k in 0..LANES {
            acc[k] += x[k] * y[k];
        }
    }
    acc.iter().sum::<f64>() + tail
}

/// `(K̃α)_{j} − y_{j}` for each index of the batch, all at the current `α`.
fn batch_residuals(gram: &GramMatrix, ys: &[f64], alpha: &DVector<f64>, batch: &[usize], out: &mut [f64]) {
    let a = alpha.as_slice();
    for (r, &j) in out.iter_mut().zip(batch) {
        *r = dot(gram.row(j), a) - ys[j];
    }
}

/// Single mini-batch update direction `-(γ/b) Σ_i r_i e_{j_i}` in coefficient space.
pub fn sgd_direction(
    gram: &GramMatrix,
    ys: &[f64],
    alpha: &DVector<f64>,
    batch: &[usize],
    gamma: f64,
) -> DVector<f64> {
    let mut residuals = vec![0.0; batch.len()];
    batch_residuals(gram, ys, alpha, batch, &mut residuals);
    let step = gamma / batch.len() as f64;
    let mut dir = DVector::zeros(alpha.len());
    for (&j, r) in batch.iter().zip(&residuals) {
        dir[j] -= step * r;
    }
    dir
}

/// Full gradient step direction `-(γ/n)(Gα - y)`.
pub fn gd_direction(gram: &GramMatrix, ys: &[f64], alpha: &DVector<f64>, gamma: f64) -> DVector<f64> {
    let y = DVector::from_column_slice(ys);
    (gram.matrix() * alpha - y) * (-gamma / ys.len() as f64)
}

/// Running tail sum plus checkpoint capture.
struct TailAverager {
    half: usize,
    sum: DVector<f64>,
    count: usize,
    checkpoints: Vec<usize>,
    next: usize,
    captured: Vec<Checkpoint>,
}

impl TailAverager {
    fn new(n: usize, iterations: usize, checkpoints: &[usize]) -> Result<Self> {
        let mut checkpoints = checkpoints.to_vec();
        checkpoints.sort_unstable();
        checkpoints.dedup();
        if let Some(&last) = checkpoints.last() {
            if last > iterations {
                return Err(argument(format!(
                    "checkpoint {last} beyond the final iteration {iterations}"
                )));
            }
        }
        Ok(Self {
            half: iterations / 2,
            sum: DVector::zeros(n),
            count: 0,
            captured: Vec::with_capacity(checkpoints.len()),
            checkpoints,
            next: 0,
        })
    }

    fn observe(&mut self, t: usize, alpha: &DVector<f64>) {
        let in_tail = t > self.half;
        if in_tail {
            self.sum += alpha;
            self.count += 1;
        }
        if self.checkpoints.get(self.next) == Some(&t) {
            self.next += 1;
            let snapshot = if in_tail {
                &self.sum / self.count as f64
            } else {
                alpha.clone()
            };
            self.captured.push(Checkpoint {
                iteration: t,
                alpha: snapshot,
                pre_tail: !in_tail,
            });
        }
    }

    fn finish(self) -> Trajectory {
        Trajectory {
            alpha: self.sum / self.count as f64,
            checkpoints: self.captured,
        }
    }
}

fn check_targets(gram: &GramMatrix, ys: &[f64]) -> Result<()> {
    if ys.len() != gram.n() {
        return Err(argument(format!(
            "{} targets for a Gram matrix of size {}",
            ys.len(),
            gram.n()
        )));
    }
    Ok(())
}

/// Tail-averaged mini-batch SGD on a precomputed Gram matrix of the effective kernel.
pub fn sgd_on_gram(gram: &GramMatrix, ys: &[f64], config: &SgdConfig) -> Result<Trajectory> {
    match run_sgd(gram, ys, config)? {
        (traj, None) => Ok(traj),
        (_, Some(iteration)) => Err(Error::Divergence { iteration }),
    }
}

/// Like [`sgd_on_gram`], but on divergence returns the checkpoints captured so
/// far together with the iteration at which a coefficient became non-finite.
pub(crate) fn run_sgd(gram: &GramMatrix, ys: &[f64], config: &SgdConfig) -> Result<(Trajectory, Option<usize>)> {
    check_targets(gram, ys)?;
    let n = gram.n();
    config.validate(n)?;

    let mut alpha = DVector::zeros(n);
    let mut tail = TailAverager::new(n, config.iterations, &config.checkpoints)?;
    tail.observe(0, &alpha);

    let mut sampler = BatchSampler::new(n, config.seed);
    let mut batch: Vec<usize> = (0..config.batch).collect();
    let mut residuals = vec![0.0; config.batch];
    let step = config.gamma / config.batch as f64;

    for t in 1..=config.iterations {
        if config.sampling == Sampling::IidUniform {
            sampler.fill(&mut batch);
        }
        batch_residuals(gram, ys, &alpha, &batch, &mut residuals);
        for (&j, r) in batch.iter().zip(&residuals) {
            alpha[j] -= step * r;
        }
        if batch.iter().any(|&j| !alpha[j].is_finite()) {
            return Ok((tail.finish(), Some(t)));
        }
        tail.observe(t, &alpha);
    }
    Ok((tail.finish(), None))
}

/// Tail-averaged batch GD `α ← α - (γ/n)(Gα - y)` on a precomputed Gram matrix.
pub fn gd_on_gram(
    gram: &GramMatrix,
    ys: &[f64],
    gamma: f64,
    iterations: usize,
    checkpoints: &[usize],
) -> Result<Trajectory> {
    check_targets(gram, ys)?;
    let n = gram.n();
    if iterations == 0 {
        return Err(argument("need at least one iteration"));
    }
    let y = DVector::from_column_slice(ys);
    let step = gamma / n as f64;
    let mut alpha = DVector::zeros(n);
    let mut tail = TailAverager::new(n, iterations, checkpoints)?;
    tail.observe(0, &alpha);
    for t in 1..=iterations {
        let residual = gram.matrix() * &alpha - &y;
        alpha.axpy(-step, &residual, 1.0);
        if alpha.iter().any(|a| !a.is_finite()) {
            return Err(Error::Divergence { iteration: t });
        }
        tail.observe(t, &alpha);
    }
    Ok(tail.finish())
}

/// Closed-form tail-averaged GD: `ᾱ = Ḡ_T(G/n) y / n`.
pub fn spectral_on_gram(gram: &GramMatrix, ys: &[f64], gamma: f64, iterations: usize) -> Result<DVector<f64>> {
    check_targets(gram, ys)?;
    if iterations == 0 {
        return Err(argument("need at least one iteration"));
    }
    let n = gram.n() as f64;
    let spectrum = eig_sym(&(gram.matrix() / n))?;
    let y = DVector::from_column_slice(ys);
    Ok(apply_filter(&spectrum, &y, |sigma| filter_gd(sigma, gamma, iterations).gbar)? / n)
}

fn check_training(xs: &Points, ys: &[f64]) -> Result<()> {
    if xs.is_empty() {
        return Err(argument("training set is empty"));
    }
    if xs.len() != ys.len() {
        return Err(argument(format!("{} inputs but {} targets", xs.len(), ys.len())));
    }
    Ok(())
}

/// Tail-averaged mini-batch SGD in the space `H_s` of the scale generated by `base`.
pub fn sgd_fit(xs: &Points, ys: &[f64], base: &KernelSpec, s: f64, config: &SgdConfig) -> Result<FitModel> {
    check_training(xs, ys)?;
    config.validate(xs.len())?;
    let effective = scale_shift(base, s)?;
    if let Check::Warn(msg) = stepsize_check(config.gamma, kappa_sq(&effective)) {
        log::warn!("{msg}");
    }
    let g = gram(&effective, xs)?;
    let traj = sgd_on_gram(&g, ys, config)?;
    Ok(FitModel::from_trajectory(effective, xs, traj))
}

pub fn gd_fit(xs: &Points, ys: &[f64], effective: &KernelSpec, gamma: f64, iterations: usize) -> Result<FitModel> {
    gd_fit_with_checkpoints(xs, ys, effective, gamma, iterations, &[])
}

pub fn gd_fit_with_checkpoints(
    xs: &Points,
    ys: &[f64],
    effective: &KernelSpec,
    gamma: f64,
    iterations: usize,
    checkpoints: &[usize],
) -> Result<FitModel> {
    check_training(xs, ys)?;
    let g = gram(effective, xs)?;
    let traj = gd_on_gram(&g, ys, gamma, iterations, checkpoints)?;
    Ok(FitModel::from_trajectory(*effective, xs, traj))
}

pub fn spectral_fit(xs: &Points, ys: &[f64], effective: &KernelSpec, gamma: f64, iterations: usize) -> Result<FitModel> {
    check_training(xs, ys)?;
    let g = gram(effective, xs)?;
    let alpha = spectral_on_gram(&g, ys, gamma, iterations)?;
    FitModel::new(*effective, xs.clone(), alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit_kernel() -> KernelSpec {
        // k(x, x) = 1
        KernelSpec::gaussian(1.0 / (4.0 * PI), 1).unwrap()
    }

    #[test]
    fn zero_step_gives_zero_function() {
        let xs = Points::from_scalars(&[0.1, 0.5, -0.2]);
        let ys = [1.0, 2.0, 3.0];
        let cfg = SgdConfig::new(0.0, 2, 17, 3);
        let m = sgd_fit(&xs, &ys, &unit_kernel(), 0.0, &cfg).unwrap();
        assert!(m.alpha.iter().all(|&a| a == 0.0));
    }

    #[test]
    fn hand_recursion_single_point() {
        // α_{t+1} = α_t (1 - γ) + γ: α_1 = 0.5, α_2 = 0.75; tail {2}.
        let xs = Points::from_scalars(&[0.3]);
        let cfg = SgdConfig::new(0.5, 1, 2, 11);
        let m = sgd_fit(&xs, &[1.0], &unit_kernel(), 0.0, &cfg).unwrap();
        assert!((m.alpha[0] - 0.75).abs() < 1e-15);

        let m = gd_fit(&xs, &[1.0], &unit_kernel(), 0.5, 2).unwrap();
        assert!((m.alpha[0] - 0.75).abs() < 1e-15);

        let m = spectral_fit(&xs, &[1.0], &unit_kernel(), 0.5, 2).unwrap();
        assert!((m.alpha[0] - 0.75).abs() < 1e-15);

        let p = predict(&m, &[0.3]).unwrap();
        assert!((p - 0.75).abs() < 1e-15);
    }

    #[test]
    fn zero_targets_give_zero_coefficients() {
        let xs = Points::from_scalars(&[0.1, 0.4, 0.9]);
        let k = KernelSpec::gaussian(0.5, 1).unwrap();
        assert!(gd_fit(&xs, &[0.0; 3], &k, 0.1, 9).unwrap().alpha.amax() == 0.0);
        assert!(spectral_fit(&xs, &[0.0; 3], &k, 0.1, 9).unwrap().alpha.amax() == 0.0);
    }

    #[test]
    fn predict_edge_cases() {
        let xs = Points::from_scalars(&[0.0, 1.0]);
        let k = KernelSpec::gaussian(1.0, 1).unwrap();
        let zero = FitModel::new(k, xs.clone(), DVector::zeros(2)).unwrap();
        assert_eq!(predict(&zero, &[0.4]).unwrap(), 0.0);
        let e1 = FitModel::new(k, xs, DVector::from_vec(vec![1.0, 0.0])).unwrap();
        assert!((predict(&e1, &[0.0]).unwrap() - kappa_sq(&k)).abs() < 1e-15);
        assert!(predict(&e1, &[0.0, 1.0]).is_err());
        assert!(FitModel::new(k, Points::from_scalars(&[0.0]), DVector::zeros(2)).is_err());
    }

    #[test]
    fn filter_values() {
        let f = filter_gd(1.0, 0.1, 2);
        assert!((f.gbar - 0.19).abs() < 1e-15);
        assert!((f.rbar - 0.81).abs() < 1e-15);
        let f = filter_gd(0.0, 0.1, 2);
        assert!((f.gbar - 0.2).abs() < 1e-15);
        assert_eq!(f.rbar, 1.0);
        // odd T: tail {2, 3}, G_t(0) = γ t.
        let f = filter_gd(0.0, 0.1, 3);
        assert!((f.gbar - 0.25).abs() < 1e-15);
        assert_eq!(filter_gd(0.7, 0.1, 0).gbar, 0.0);
    }

    #[test]
    fn stepsize_boundary() {
        assert!(stepsize_check(1e-3, 0.282).is_ok());
        assert!(!stepsize_check(10.0, 1.0).is_ok());
        assert!(stepsize_check(0.249, 1.0).is_ok());
        assert!(!stepsize_check(0.25, 1.0).is_ok());
    }

    #[test]
    fn config_validation() {
        let xs = Points::from_scalars(&[0.0, 1.0]);
        let k = unit_kernel();
        for cfg in [
            SgdConfig::new(0.1, 0, 3, 0),
            SgdConfig::new(0.1, 3, 3, 0),
            SgdConfig::new(0.1, 1, 0, 0),
            SgdConfig::new(f64::NAN, 1, 3, 0),
            SgdConfig {
                sampling: Sampling::FullBatch,
                ..SgdConfig::new(0.1, 1, 3, 0)
            },
            SgdConfig::new(0.1, 1, 3, 0).with_checkpoints(vec![4]),
        ] {
            assert!(sgd_fit(&xs, &[1.0, 1.0], &k, 0.0, &cfg).is_err(), "{cfg:?}");
        }
        let empty = Points::from_scalars(&[]);
        assert!(sgd_fit(&empty, &[], &k, 0.0, &SgdConfig::new(0.1, 1, 1, 0)).is_err());
        assert!(gd_fit(&xs, &[1.0], &k, 0.1, 3).is_err());
    }

    #[test]
    fn divergence_reports_iteration() {
        let xs = Points::from_scalars(&[0.0, 0.01]);
        let k = unit_kernel();
        let err = gd_fit(&xs, &[1.0, 1.0], &k, 1e6, 500).unwrap_err();
        assert!(matches!(err, Error::Divergence { iteration } if iteration > 1 && iteration < 500));
        let cfg = SgdConfig::new(1e6, 1, 500, 1);
        let err = sgd_fit(&xs, &[1.0, 1.0], &k, 0.0, &cfg).unwrap_err();
        assert!(matches!(err, Error::Divergence { .. }));
    }

    #[test]
    fn checkpoints_follow_tail_convention() {
        let xs = Points::from_scalars(&[0.0]);
        let traj = {
            let g = gram(&unit_kernel(), &xs).unwrap();
            gd_on_gram(&g, &[1.0], 0.5, 4, &[0, 1, 2, 3, 4]).unwrap()
        };
        // α_t = 1 - 0.5^t
        let iterate = |t: i32| 1.0 - 0.5f64.powi(t);
        let cps = &traj.checkpoints;
        assert_eq!(cps.len(), 5);
        assert!(cps[0].pre_tail && cps[0].alpha[0] == 0.0);
        assert!(cps[2].pre_tail && (cps[2].alpha[0] - iterate(2)).abs() < 1e-15);
        assert!(!cps[3].pre_tail && (cps[3].alpha[0] - iterate(3)).abs() < 1e-15);
        let avg = (iterate(3) + iterate(4)) / 2.0;
        assert!((cps[4].alpha[0] - avg).abs() < 1e-15);
        assert_eq!(cps[4].alpha, traj.alpha);
    }

    #[test]
    fn duplicate_indices_accumulate() {
        let xs = Points::from_scalars(&[0.0, 5.0]);
        let g = gram(&unit_kernel(), &xs).unwrap();
        let alpha = DVector::zeros(2);
        let dir = sgd_direction(&g, &[1.0, 2.0], &alpha, &[1, 1], 0.5);
        // two residuals of -2 at index 1, each scaled by γ/b = 0.25
        assert!((dir[1] - 1.0).abs() < 1e-15);
        assert_eq!(dir[0], 0.0);
    }

    #[test]
    fn same_seed_same_bits() {
        let xs = Points::from_scalars(&[-0.9, -0.3, 0.2, 0.6, 0.95]);
        let ys = [0.1, -0.4, 0.3, 0.8, -0.2];
        let k = KernelSpec::gaussian(0.3, 1).unwrap();
        let cfg = SgdConfig::new(0.4, 2, 40, 99).with_checkpoints(vec![1, 8, 40]);
        let a = sgd_fit(&xs, &ys, &k, 0.1, &cfg).unwrap();
        let b = sgd_fit(&xs, &ys, &k, 0.1, &cfg).unwrap();
        assert_eq!(a, b);
        let other = sgd_fit(&xs, &ys, &k, 0.1, &SgdConfig { seed: 100, ..cfg }).unwrap();
        assert_ne!(a.alpha, other.alpha);
    }
}
