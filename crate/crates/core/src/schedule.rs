//! Parameter schedules and predicted rate exponents.
//!
//! Schedules are only determined up to constants; all proportionality
//! constants are 1 and constant step sizes are `0.2 / κ²`.

use crate::error::{argument, Result};
use crate::Check;

/// Constant step size as a fraction of `1/κ²`, below the `1/4` stability bound.
pub const STEP_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothnessSpec {
    /// Benchmark smoothness of the target.
    pub a: f64,
    /// Scale index of the space the recursion runs in.
    pub s: f64,
    /// Source index used when preconditioning.
    pub r: f64,
    /// Source norm bound.
    pub big_r: f64,
    /// Label bound.
    pub m: f64,
    /// Effective-dimension exponent.
    pub nu: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// `0 ≤ s ≤ a`: regularize in a smoother space than `H`.
    Promoting,
    /// `-a/2 ≤ s ≤ 0`: regularize in a larger space, for rough targets.
    Preconditioning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    OnePass,
    EarlyStop,
    BatchGd,
}

impl std::str::FromStr for Strategy {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one-pass" => Ok(Strategy::OnePass),
            "early-stop" => Ok(Strategy::EarlyStop),
            "batch-gd" => Ok(Strategy::BatchGd),
            other => Err(argument(format!(
                "unknown strategy '{other}' (expected one-pass, early-stop or batch-gd)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    pub batch: usize,
    pub gamma: f64,
    pub iterations: usize,
}

/// Whether the target meets the benchmark smoothness of the scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Benchmark {
    Met,
    Violated,
}

/// Source exponent `β`.
pub fn beta(spec: &SmoothnessSpec, mode: Mode) -> Result<(f64, Check)> {
    let SmoothnessSpec { a, s, r, nu, .. } = *spec;
    if !(a > 0.0) {
        return Err(argument(format!("benchmark smoothness a must be positive, got {a}")));
    }
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(argument(format!("nu must lie in (0, 1], got {nu}")));
    }
    match mode {
        Mode::Promoting => {
            if !(0.0..=a).contains(&s) {
                return Err(argument(format!("promoting mode needs 0 <= s <= a = {a}, got s = {s}")));
            }
            Ok(((a - s) / (2.0 * (a + s)), Check::Ok))
        }
        Mode::Preconditioning => {
            if !(-a / 2.0..=0.0).contains(&s) {
                return Err(argument(format!(
                    "preconditioning mode needs -a/2 <= s <= 0, got s = {s}"
                )));
            }
            if r < s || r <= -a {
                return Err(argument(format!("preconditioning needs r >= s and r > -a, got r = {r}")));
            }
            let b = (r - s) / (2.0 * (a + s));
            let check = if nu + 2.0 * b > 0.0 {
                Check::Ok
            } else {
                Check::Warn(format!("nu + 2 beta = {} is not positive", nu + 2.0 * b))
            };
            Ok((b, check))
        }
    }
}

/// `⌈x⌉`, except values within floating noise of an integer snap to it.
fn ceil_snap(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.abs().max(1.0) {
        r
    } else {
        x.ceil()
    }
}

fn check_exponent(beta: f64, nu: f64) -> Result<()> {
    if !(nu + 2.0 * beta > 0.0) {
        return Err(argument(format!("need nu + 2 beta > 0, got {}", nu + 2.0 * beta)));
    }
    Ok(())
}

/// Picks `(b, γ, T)` for one of the three schedules.
pub fn choose_params(
    n: usize,
    beta: f64,
    nu: f64,
    big_r: f64,
    m: f64,
    strategy: Strategy,
    kappa_sq: f64,
) -> Result<Schedule> {
    if n < 2 {
        return Err(argument(format!("need n >= 2, got {n}")));
    }
    check_exponent(beta, nu)?;
    if !(big_r > 0.0 && m > 0.0 && kappa_sq > 0.0) {
        return Err(argument("R, M and kappa^2 must be positive"));
    }
    let nf = n as f64;
    let denom = 1.0 + 2.0 * beta + nu;
    let ratio = big_r * big_r / (m * m);
    let gamma_cap = STEP_FRACTION / kappa_sq;
    let stopping_time = || (ceil_snap((ratio * nf).powf(1.0 / denom)) as usize).max(1);

    Ok(match strategy {
        Strategy::OnePass => Schedule {
            batch: 1,
            gamma: (ratio * (1.0 / (ratio * nf)).powf((nu + 2.0 * beta) / denom)).min(gamma_cap),
            iterations: n,
        },
        Strategy::EarlyStop => Schedule {
            batch: critical_batchsize(n, beta, nu)?,
            gamma: gamma_cap,
            iterations: stopping_time(),
        },
        Strategy::BatchGd => Schedule {
            batch: n,
            gamma: gamma_cap,
            iterations: stopping_time(),
        },
    })
}

/// `⌈n^{(ν+2β)/(1+2β+ν)}⌉`, clamped to `[1, n]`.
pub fn critical_batchsize(n: usize, beta: f64, nu: f64) -> Result<usize> {
    check_exponent(beta, nu)?;
    let e = (nu + 2.0 * beta) / (1.0 + 2.0 * beta + nu);
    let b = ceil_snap((n as f64).powf(e)) as usize;
    Ok(b.clamp(1, n.max(1)))
}

/// Predicted excess-risk decay exponent in `n`.
pub fn theoretical_rate(beta: f64, nu: f64, benchmark: Benchmark) -> f64 {
    match benchmark {
        Benchmark::Met => (1.0 + 2.0 * beta) / (1.0 + 2.0 * beta + nu),
        Benchmark::Violated => 1.0 / (1.0 + nu),
    }
}

/// Checks `n ≥ γT max{1, N(1/γT)}`.
pub fn sample_size_check(n: usize, gamma: f64, iterations: usize, effdim: f64) -> Check {
    let horizon = gamma * iterations as f64;
    let needed = horizon * effdim.max(1.0);
    if n as f64 >= needed {
        Check::Ok
    } else {
        Check::Warn(format!("n = {n} is below gamma*T*max(1, N) = {needed}"))
    }
}
