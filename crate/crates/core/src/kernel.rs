//! Closed-form kernel families and the Hilbert-scale shifts between them.
//!
//! Two scales are supported:
//!
//! * the diffusion scale on ℝ^d, generated by the heat semigroup. Its kernels
//!   are the normalized Gaussians `K_s(x, x') = (4πs)^{-d/2} exp(-|x - x'|² / 4s)`
//!   and moving along the scale by `s` adds `s` to the width;
//! * a Sobolev-type scale realized by the half-integer Matérn kernels
//!   `ν ∈ {1/2, 3/2, 5/2, 7/2}`, where an integer shift moves the order.
//!
//! Kernels are unit-free: `width` is the heat time, not a standard deviation.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{argument, Error, Result};

/// A list of points in ℝ^d, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Points {
    dim: usize,
    data: Vec<f64>,
}

impl Points {
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(argument("point dimension must be positive"));
        }
        if !data.len().is_multiple_of(dim) {
            return Err(argument(format!(
                "{} values do not split into points of dimension {dim}",
                data.len()
            )));
        }
        Ok(Self { dim, data })
    }

    /// One-dimensional points.
    pub fn from_scalars(xs: &[f64]) -> Self {
        Self {
            dim: 1,
            data: xs.to_vec(),
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map(Vec::len).unwrap_or(1);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(argument("rows have inconsistent dimensions"));
        }
        Self::new(dim, rows.concat())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// Supported half-integer Matérn orders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MaternOrder {
    Half,
    ThreeHalves,
    FiveHalves,
    SevenHalves,
}

impl MaternOrder {
    pub const ALL: [MaternOrder; 4] = [
        MaternOrder::Half,
        MaternOrder::ThreeHalves,
        MaternOrder::FiveHalves,
        MaternOrder::SevenHalves,
    ];

    pub fn value(self) -> f64 {
        self.index() as f64 + 0.5
    }

    fn index(self) -> usize {
        match self {
            MaternOrder::Half => 0,
            MaternOrder::ThreeHalves => 1,
            MaternOrder::FiveHalves => 2,
            MaternOrder::SevenHalves => 3,
        }
    }

    pub fn from_value(nu: f64) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|o| o.value() == nu)
            .ok_or_else(|| Error::Range(format!("Matérn order {nu} is not one of 0.5, 1.5, 2.5, 3.5")))
    }

    /// Maps an integer smoothness level `m ∈ {0, 1, 2, 3}` to the order `m + 1/2`.
    pub fn from_level(m: usize) -> Result<Self> {
        Self::ALL
            .get(m)
            .copied()
            .ok_or_else(|| Error::Range(format!("smoothness level {m} is not one of 0, 1, 2, 3")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelFamily {
    /// Normalized Gaussian (heat kernel) with heat time `width`.
    Gaussian { width: f64 },
    Matern { order: MaternOrder, lengthscale: f64 },
}

/// A point in a Hilbert scale: a closed-form kernel family plus its scale parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    family: KernelFamily,
    dim: usize,
}

impl KernelSpec {
    pub fn gaussian(width: f64, dim: usize) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::Range(format!("gaussian width must be positive, got {width}")));
        }
        Self::with_dim(KernelFamily::Gaussian { width }, dim)
    }

    pub fn matern(order: MaternOrder, lengthscale: f64, dim: usize) -> Result<Self> {
        if !(lengthscale > 0.0 && lengthscale.is_finite()) {
            return Err(Error::Range(format!(
                "Matérn lengthscale must be positive, got {lengthscale}"
            )));
        }
        Self::with_dim(KernelFamily::Matern { order, lengthscale }, dim)
    }

    fn with_dim(family: KernelFamily, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(argument("kernel input dimension must be positive"));
        }
        Ok(Self { family, dim })
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The family's scale coordinate: width for Gaussians, order for Matérn.
    pub fn scale_param(&self) -> f64 {
        match self.family {
            KernelFamily::Gaussian { width } => width,
            KernelFamily::Matern { order, .. } => order.value(),
        }
    }

    /// Kernel value as a function of squared distance. Caller guarantees dimensions.
    #[inline]
    pub(crate) fn profile(&self, dist_sq: f64) -> f64 {
        match self.family {
            KernelFamily::Gaussian { width } => {
                (4.0 * PI * width).powf(-(self.dim as f64) / 2.0) * (-dist_sq / (4.0 * width)).exp()
            }
            KernelFamily::Matern { order, lengthscale } => {
                let r = dist_sq.sqrt() / lengthscale;
                match order {
                    MaternOrder::Half => (-r).exp(),
                    MaternOrder::ThreeHalves => {
                        let a = 3f64.sqrt() * r;
                        (1.0 + a) * (-a).exp()
                    }
                    MaternOrder::FiveHalves => {
                        let a = 5f64.sqrt() * r;
                        (1.0 + a + a * a / 3.0) * (-a).exp()
                    }
                    MaternOrder::SevenHalves => {
                        let a = 7f64.sqrt() * r;
                        (1.0 + a + 2.0 * a * a / 5.0 + a * a * a / 15.0) * (-a).exp()
                    }
                }
            }
        }
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
        self.profile(d2)
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            KernelFamily::Gaussian { width } => {
                write!(f, "family=gaussian width={width:?} dim={}", self.dim)
            }
            KernelFamily::Matern { order, lengthscale } => write!(
                f,
                "family=matern order={:?} lengthscale={lengthscale:?} dim={}",
                order.value(),
                self.dim
            ),
        }
    }
}

impl FromStr for KernelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut family = None;
        let mut width = None;
        let mut order = None;
        let mut lengthscale = None;
        let mut dim = None;
        for token in s.split_whitespace() {
            let (key, value) = token
                .split_once('=')
                .ok_or_else(|| argument(format!("expected key=value, got '{token}'")))?;
            let number = || {
                value
                    .parse::<f64>()
                    .map_err(|_| argument(format!("malformed number for '{key}': '{value}'")))
            };
            match key {
                "family" => family = Some(value.to_string()),
                "width" => width = Some(number()?),
                "order" => order = Some(number()?),
                "lengthscale" => lengthscale = Some(number()?),
                "dim" => {
                    dim = Some(
                        value
                            .parse::<usize>()
                            .map_err(|_| argument(format!("malformed dim '{value}'")))?,
                    )
                }
                other => return Err(argument(format!("unknown kernel key '{other}'"))),
            }
        }
        let dim = dim.unwrap_or(1);
        match family.as_deref() {
            Some("gaussian") => {
                let width = width.ok_or_else(|| argument("gaussian kernel needs 'width'"))?;
                KernelSpec::gaussian(width, dim)
            }
            Some("matern") => {
                let order = order.ok_or_else(|| argument("Matérn kernel needs 'order'"))?;
                KernelSpec::matern(MaternOrder::from_value(order)?, lengthscale.unwrap_or(1.0), dim)
            }
            Some(other) => Err(argument(format!("unknown kernel family '{other}'"))),
            None => Err(argument("kernel spec is missing 'family'")),
        }
    }
}

/// Symmetric kernel matrix `G_ij = k(x_i, x_j)` over a training set.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    entries: DMatrix<f64>,
}

impl GramMatrix {
    /// Wraps an existing square matrix. Symmetry is the caller's responsibility.
    pub fn from_matrix(entries: DMatrix<f64>) -> Result<Self> {
        if !entries.is_square() || entries.nrows() == 0 {
            return Err(argument("Gram matrix must be square and nonempty"));
        }
        Ok(Self { entries })
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Row `i`. Stored column-major, so this borrows column `i` of the symmetric matrix.
    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.n();
        &self.entries.as_slice()[i * n..(i + 1) * n]
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.entries
    }
}

fn check_dim(spec: &KernelSpec, x: &[f64]) -> Result<()> {
    if x.len() != spec.dim {
        return Err(argument(format!(
            "point has dimension {}, kernel expects {}",
            x.len(),
            spec.dim
        )));
    }
    Ok(())
}

pub fn eval_kernel(spec: &KernelSpec, x: &[f64], y: &[f64]) -> Result<f64> {
    check_dim(spec, x)?;
    check_dim(spec, y)?;
    Ok(spec.eval_unchecked(x, y))
}

/// Moves a kernel `s` steps along its Hilbert scale.
///
/// For Gaussians this is the heat semigroup, `width ↦ width + s`, which realizes
/// the update direction `L^{-2s} K_x` with `L = e^{Δ/2}`. For Matérn kernels `s`
/// must be an integer and the order moves by `s`.
pub fn scale_shift(spec: &KernelSpec, s: f64) -> Result<KernelSpec> {
    if !s.is_finite() {
        return Err(Error::Range(format!("shift must be finite, got {s}")));
    }
    match spec.family {
        KernelFamily::Gaussian { width } => {
            let shifted = width + s;
            if shifted <= 0.0 {
                return Err(Error::Range(format!(
                    "shift {s} leaves the gaussian family; admissible shifts are s > {}",
                    -width
                )));
            }
            KernelSpec::gaussian(shifted, spec.dim)
        }
        KernelFamily::Matern { order, lengthscale } => {
            let lo = -(order.index() as i64);
            let hi = (MaternOrder::ALL.len() - 1 - order.index()) as i64;
            let admissible = || {
                format!(
                    "admissible shifts for order {} are the integers {lo}..={hi}",
                    order.value()
                )
            };
            if s.fract() != 0.0 || (s as i64) < lo || (s as i64) > hi {
                return Err(Error::Range(format!(
                    "shift {s} leaves the Matérn family; {}",
                    admissible()
                )));
            }
            let target = MaternOrder::ALL[(order.index() as i64 + s as i64) as usize];
            KernelSpec::matern(target, lengthscale, spec.dim)
        }
    }
}

pub fn gram(spec: &KernelSpec, xs: &Points) -> Result<GramMatrix> {
    if xs.is_empty() {
        return Err(argument("Gram matrix needs at least one point"));
    }
    if xs.dim() != spec.dim {
        return Err(argument(format!(
            "points have dimension {}, kernel expects {}",
            xs.dim(),
            spec.dim
        )));
    }
    Ok(GramMatrix {
        entries: cross_gram(spec, xs, xs)?,
    })
}

/// `m × n` matrix `K_ij = k(a_i, b_j)`.
pub fn cross_gram(spec: &KernelSpec, a: &Points, b: &Points) -> Result<DMatrix<f64>> {
    if a.dim() != spec.dim || b.dim() != spec.dim {
        return Err(argument("point dimensions do not match the kernel"));
    }
    let m = a.len();
    // Column-major: each column is one point of `b` against all of `a`.
    let data: Vec<f64> = (0..b.len())
        .into_par_iter()
        .flat_map_iter(|j| {
            let bj = b.point(j);
            a.iter().map(move |ai| spec.eval_unchecked(ai, bj))
        })
        .collect();
    Ok(DMatrix::from_vec(m, b.len(), data))
}

/// Sup bound `κ² ≥ k(x, x')`, attained on the diagonal for these families.
pub fn kappa_sq(spec: &KernelSpec) -> f64 {
    spec.profile(0.0)
}
