//! Synthetic ground truth, datasets and Monte-Carlo excess risk.
//!
//! Inputs are uniform on `[-1, 1]^d`. Label noise is Gaussian, drawn with the
//! ziggurat sampler of `rand_distr` from a ChaCha8 stream, so regeneration under
//! the same seed and build is bit-identical.

use std::io::{self, Write};

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{argument, Result};
use crate::kernel::{cross_gram, KernelSpec, Points};
use crate::solver::FitModel;

/// `f(x) = Σ_j w_j k(c_j, x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetFunction {
    spec: KernelSpec,
    centers: Points,
    weights: Vec<f64>,
}

impl TargetFunction {
    pub fn new(spec: KernelSpec, centers: Points, weights: Vec<f64>) -> Result<Self> {
        if centers.is_empty() || centers.len() != weights.len() {
            return Err(argument(format!(
                "target needs matching nonempty centers and weights, got {} and {}",
                centers.len(),
                weights.len()
            )));
        }
        if centers.dim() != spec.dim() {
            return Err(argument("target centers do not match the kernel dimension"));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(argument("target weights must be finite"));
        }
        Ok(Self {
            spec,
            centers,
            weights,
        })
    }

    /// Three bumps at -0.5, 0, 0.5 with weights 1, -1, 1.
    pub fn three_bumps(spec: KernelSpec) -> Result<Self> {
        if spec.dim() != 1 {
            return Err(argument("the three-bump target is one-dimensional"));
        }
        Self::new(spec, Points::from_scalars(&[-0.5, 0.0, 0.5]), vec![1.0, -1.0, 1.0])
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn centers(&self) -> &Points {
        &self.centers
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    /// The target written as a model over its own centers.
    pub fn as_model(&self) -> FitModel {
        FitModel::new(
            self.spec,
            self.centers.clone(),
            DVector::from_column_slice(&self.weights),
        )
        .expect("target invariants match model invariants")
    }

    fn eval_many(&self, points: &Points) -> Result<DVector<f64>> {
        Ok(cross_gram(&self.spec, points, &self.centers)? * DVector::from_column_slice(&self.weights))
    }
}

pub fn eval_target(target: &TargetFunction, x: &[f64]) -> Result<f64> {
    if x.len() != target.dim() {
        return Err(argument(format!(
            "point has dimension {}, target expects {}",
            x.len(),
            target.dim()
        )));
    }
    Ok(target
        .centers
        .iter()
        .zip(&target.weights)
        .map(|(c, w)| w * target.spec.eval_unchecked(c, x))
        .sum())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub xs: Points,
    pub ys: Vec<f64>,
    pub seed: u64,
    pub noise_var: f64,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.ys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ys.is_empty()
    }

    /// CSV with header `x_0,..,x_{d-1},y`, shortest round-trip number formatting.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let d = self.xs.dim();
        let header: Vec<String> = (0..d).map(|k| format!("x_{k}")).chain(["y".to_string()]).collect();
        writeln!(out, "{}", header.join(","))?;
        for (x, y) in self.xs.iter().zip(&self.ys) {
            for v in x {
                write!(out, "{v},")?;
            }
            writeln!(out, "{y}")?;
        }
        Ok(())
    }
}

/// `m` points uniform on `[-1, 1]^d`.
pub fn uniform_points(m: usize, dim: usize, rng: &mut impl Rng) -> Points {
    let data = (0..m * dim).map(|_| rng.random_range(-1.0..=1.0)).collect();
    Points::new(dim, data).expect("dimension is positive")
}

pub fn sample_dataset(target: &TargetFunction, n: usize, noise_var: f64, seed: u64) -> Result<Dataset> {
    if n == 0 {
        return Err(argument("dataset needs at least one sample"));
    }
    if !(noise_var >= 0.0 && noise_var.is_finite()) {
        return Err(argument(format!("noise variance must be nonnegative, got {noise_var}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs = uniform_points(n, target.dim(), &mut rng);
    let clean = target.eval_many(&xs)?;
    let sd = noise_var.sqrt();
    let ys = clean
        .iter()
        .map(|f| {
            let z: f64 = StandardNormal.sample(&mut rng);
            f + sd * z
        })
        .collect();
    Ok(Dataset {
        xs,
        ys,
        seed,
        noise_var,
    })
}

/// Fixed test sample for repeated risk evaluation of models over one training set.
#[derive(Debug, Clone)]
pub struct RiskEvaluator {
    cross: nalgebra::DMatrix<f64>,
    truth: DVector<f64>,
}

impl RiskEvaluator {
    /// Test points are drawn uniformly from `seed`; `cross` holds `k̃(test_k, x_j)`.
    pub fn new(
        target: &TargetFunction,
        effective: &KernelSpec,
        train: &Points,
        m_test: usize,
        seed: u64,
    ) -> Result<Self> {
        let test = test_points(target, m_test, seed)?;
        Self::with_points(target, effective, train, &test)
    }

    pub fn with_points(target: &TargetFunction, effective: &KernelSpec, train: &Points, test: &Points) -> Result<Self> {
        Ok(Self {
            cross: cross_gram(effective, test, train)?,
            truth: target.eval_many(test)?,
        })
    }

    /// Mean squared difference between the expansion `alpha` and the target.
    pub fn risk(&self, alpha: &DVector<f64>) -> f64 {
        let diff = &self.cross * alpha - &self.truth;
        diff.norm_squared() / diff.len() as f64
    }
}

pub fn test_points(target: &TargetFunction, m_test: usize, seed: u64) -> Result<Points> {
    if m_test == 0 {
        return Err(argument("need at least one test point"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(uniform_points(m_test, target.dim(), &mut rng))
}

/// Monte-Carlo estimate of `‖f̂ - f‖²_{L²(ρ_X)}` over `m_test` fresh uniform points.
pub fn excess_risk(model: &FitModel, target: &TargetFunction, m_test: usize, seed: u64) -> Result<f64> {
    if model.spec.dim() != target.dim() {
        return Err(argument("model and target dimensions differ"));
    }
    let eval = RiskEvaluator::new(target, &model.spec, &model.xs, m_test, seed)?;
    Ok(eval.risk(&model.alpha))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn target() -> TargetFunction {
        TargetFunction::three_bumps(KernelSpec::gaussian(1.0, 1).unwrap()).unwrap()
    }

    #[test]
    fn noiseless_labels_are_exact() {
        let t = target();
        let d = sample_dataset(&t, 50, 0.0, 4).unwrap();
        for (x, y) in d.xs.iter().zip(&d.ys) {
            assert_eq!(*y, eval_target(&t, x).unwrap());
        }
        assert!(d.xs.iter().all(|x| (-1.0..=1.0).contains(&x[0])));
    }

    #[test]
    fn datasets_are_reproducible() {
        let t = target();
        assert_eq!(sample_dataset(&t, 30, 0.01, 8).unwrap(), sample_dataset(&t, 30, 0.01, 8).unwrap());
        assert_ne!(sample_dataset(&t, 30, 0.01, 8).unwrap(), sample_dataset(&t, 30, 0.01, 9).unwrap());
    }

    #[test]
    fn eval_target_cases() {
        let k = KernelSpec::gaussian(1.0, 1).unwrap();
        let zero = TargetFunction::new(k, Points::from_scalars(&[0.1, 0.2]), vec![0.0, 0.0]).unwrap();
        assert_eq!(eval_target(&zero, &[0.3]).unwrap(), 0.0);
        let one = TargetFunction::new(k, Points::from_scalars(&[0.4]), vec![1.0]).unwrap();
        assert_eq!(eval_target(&one, &[0.4]).unwrap(), crate::kernel::kappa_sq(&k));
        let sym = TargetFunction::new(k, Points::from_scalars(&[-0.5, 0.5]), vec![0.7, 0.7]).unwrap();
        let at0 = eval_target(&sym, &[0.0]).unwrap();
        let bump = crate::kernel::eval_kernel(&k, &[0.5], &[0.0]).unwrap();
        assert!((at0 - 2.0 * 0.7 * bump).abs() < 1e-15);
        assert!(eval_target(&sym, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn invalid_targets() {
        let k = KernelSpec::gaussian(1.0, 1).unwrap();
        assert!(TargetFunction::new(k, Points::from_scalars(&[]), vec![]).is_err());
        assert!(TargetFunction::new(k, Points::from_scalars(&[0.0]), vec![1.0, 2.0]).is_err());
        assert!(sample_dataset(&target(), 0, 0.1, 0).is_err());
        assert!(sample_dataset(&target(), 3, -0.1, 0).is_err());
    }

    #[test]
    fn exact_model_has_zero_risk() {
        let t = target();
        let r = excess_risk(&t.as_model(), &t, 500, 3).unwrap();
        assert!(r < 1e-20, "{r}");
        let zero = FitModel::new(*t.spec(), t.centers().clone(), DVector::zeros(3)).unwrap();
        assert!(excess_risk(&zero, &t, 500, 3).unwrap() > r);
    }

    #[test]
    fn csv_layout() {
        let t = target();
        let d = sample_dataset(&t, 2, 0.0, 1).unwrap();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x_0,y");
        assert_eq!(lines.len(), 3);
        let fields: Vec<f64> = lines[1].split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(fields, vec![d.xs.point(0)[0], d.ys[0]]);
    }
}
