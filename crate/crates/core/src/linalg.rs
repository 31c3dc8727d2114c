//! Dense symmetric spectra, spectral calculus and effective dimension.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{argument, Result};

/// Eigenpairs of a symmetric matrix, eigenvalues in descending order.
#[derive(Debug, Clone)]
pub struct SymmetricSpectrum {
    eigenvalues: Vec<f64>,
    /// Column `i` is the unit eigenvector for `eigenvalues[i]`.
    eigenvectors: DMatrix<f64>,
}

impl SymmetricSpectrum {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

const SYMMETRY_TOL: f64 = 1e-10;

pub fn eig_sym(matrix: &DMatrix<f64>) -> Result<SymmetricSpectrum> {
    if !matrix.is_square() {
        return Err(argument(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            matrix.nrows(),
            matrix.ncols()
        )));
    }
    let scale = matrix.amax();
    let asym = (matrix - matrix.transpose()).amax();
    if asym > SYMMETRY_TOL * scale.max(f64::MIN_POSITIVE) {
        return Err(argument(format!(
            "matrix is not symmetric (max asymmetry {asym:e})"
        )));
    }
    if matrix.is_empty() {
        return Ok(SymmetricSpectrum {
            eigenvalues: Vec::new(),
            eigenvectors: DMatrix::zeros(0, 0),
        });
    }

    let eig = SymmetricEigen::try_new(matrix.clone(), f64::EPSILON, 0)
        .ok_or_else(|| argument("symmetric eigensolver failed to converge"))?;

    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = eig.eigenvectors.select_columns(order.iter());
    Ok(SymmetricSpectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Spectral calculus: `Σ_i φ(λ_i) ⟨v_i, v⟩ v_i`.
///
/// Negative eigenvalues are treated as zero before `φ` is applied.
pub fn apply_filter<F>(spectrum: &SymmetricSpectrum, v: &DVector<f64>, phi: F) -> Result<DVector<f64>>
where
    F: Fn(f64) -> f64,
{
    let basis = &spectrum.eigenvectors;
    if basis.nrows() != v.len() {
        return Err(argument(format!(
            "vector has length {}, spectrum acts on dimension {}",
            v.len(),
            basis.nrows()
        )));
    }
    let mut coords = basis.tr_mul(v);
    for (c, &lambda) in coords.iter_mut().zip(&spectrum.eigenvalues) {
        *c *= phi(lambda.max(0.0));
    }
    Ok(basis * coords)
}

/// `N(λ) = Σ_i σ_i / (σ_i + λ)`, the trace of `T (T + λ)^{-1}`.
pub fn effective_dimension(eigenvalues: &[f64], lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(argument(format!("regularization must be positive, got {lambda}")));
    }
    let negatives = eigenvalues.iter().filter(|&&s| s < 0.0).count();
    if negatives > 0 {
        log::warn!("clamping {negatives} negative eigenvalues to zero");
    }
    Ok(eigenvalues
        .iter()
        .map(|&s| {
            let s = s.max(0.0);
            s / (s + lambda)
        })
        .sum())
}

/// Estimates the capacity exponent `ν` in `N(λ) ≲ λ^{-ν}`.
///
/// Fits a least-squares line to `log N(λ)` against `log(1/λ)` over the grid
/// points lying strictly inside `(λ_min / 100, λ_max)` of the spectrum; at
/// least three such points are required. The slope is clamped to `[0, 1]`.
pub fn estimate_nu(eigenvalues: &[f64], lambda_grid: &[f64]) -> Result<f64> {
    let clamped: Vec<f64> = eigenvalues.iter().map(|&s| s.max(0.0)).collect();
    let positive = clamped.iter().copied().filter(|&s| s > 0.0);
    let hi = positive.clone().fold(f64::NEG_INFINITY, f64::max);
    let lo = positive.fold(f64::INFINITY, f64::min);
    if !hi.is_finite() {
        return Err(argument("spectrum has no positive eigenvalue"));
    }
    let usable: Vec<f64> = lambda_grid
        .iter()
        .copied()
        .filter(|&l| l > lo / 100.0 && l < hi)
        .collect();
    if usable.len() < 3 {
        return Err(argument(format!(
            "need at least 3 grid points inside ({:e}, {:e}), got {}",
            lo / 100.0,
            hi,
            usable.len()
        )));
    }
    let mut xs = Vec::with_capacity(usable.len());
    let mut ys = Vec::with_capacity(usable.len());
    for &l in &usable {
        xs.push(-l.ln());
        ys.push(effective_dimension(&clamped, l)?.ln());
    }
    let slope = least_squares_slope(&xs, &ys)
        .ok_or_else(|| argument("lambda grid is degenerate (all points equal)"))?;
    Ok(slope.clamp(0.0, 1.0))
}

/// Ordinary least-squares slope of `ys` on `xs`; `None` if `xs` has no spread.
pub(crate) fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx <= 0.0 {
        return None;
    }
    Some(sxy / sxx)
}
