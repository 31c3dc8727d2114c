//! Config parsing, number formatting and subcommand dispatch for `hsgd`.

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use hsgd_core::harness::run_replicated;
use hsgd_core::{
    choose_params, effective_dimension, estimate_nu, filter_gd, fit_rate, theoretical_rate, Benchmark,
    ExperimentConfig, ExperimentKind, Strategy,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_ALL_DIVERGED: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Missing(Vec<String>),
    Unknown(Vec<String>),
    Malformed { line: usize, message: String },
    Invalid(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Missing(keys) => write!(f, "missing required key(s): {}", keys.join(", ")),
            ConfigError::Unknown(keys) => write!(f, "unknown key(s): {}", keys.join(", ")),
            ConfigError::Malformed { line, message } => write!(f, "line {line}: {message}"),
            ConfigError::Invalid(msg) => write!(f, "invalid config: {msg}"),
        }
    }
}

impl std::error::Error for ConfigError {}

/// `key=value` pairs with their 1-based line numbers. Blank lines and `#`
/// comments are skipped.
pub fn parse_pairs<'a, I>(lines: I) -> Result<Vec<(usize, String, String)>, ConfigError>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut pairs: Vec<(usize, String, String)> = Vec::new();
    for (i, raw) in lines.into_iter().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::Malformed {
                line: i + 1,
                message: format!("expected key=value, got '{line}'"),
            });
        };
        let key = key.trim().to_string();
        if pairs.iter().any(|(_, k, _)| *k == key) {
            return Err(ConfigError::Malformed {
                line: i + 1,
                message: format!("duplicate key '{key}'"),
            });
        }
        pairs.push((i + 1, key, value.trim().to_string()));
    }
    Ok(pairs)
}

fn malformed(line: usize, key: &str, value: &str, what: &str) -> ConfigError {
    ConfigError::Malformed {
        line,
        message: format!("{key}: cannot parse '{value}' as {what}"),
    }
}

fn parse_one<T: std::str::FromStr>(line: usize, key: &str, value: &str, what: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| malformed(line, key, value, what))
}

fn parse_list<T: std::str::FromStr>(line: usize, key: &str, value: &str, what: &str) -> Result<Vec<T>, ConfigError> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_one(line, key, s, what))
        .collect()
}

/// Seeds as a comma list or a half-open range `a..b`.
fn parse_seeds(line: usize, value: &str) -> Result<Vec<u64>, ConfigError> {
    if let Some((a, b)) = value.split_once("..") {
        let a: u64 = parse_one(line, "seeds", a.trim(), "an integer")?;
        let b: u64 = parse_one(line, "seeds", b.trim(), "an integer")?;
        return Ok((a..b).collect());
    }
    parse_list(line, "seeds", value, "an integer list")
}

pub const CONFIG_KEYS: [&str; 17] = [
    "experiment",
    "n",
    "b",
    "gamma",
    "T",
    "widths",
    "base_width",
    "orders",
    "target_order",
    "b_grid",
    "gamma_grid",
    "ns",
    "nu_probe_n",
    "seeds",
    "seed",
    "noise_var",
    "m_test",
];

/// Parses a flat `key=value` experiment config. Keys not given take the
/// defaults of the named experiment.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let pairs = parse_pairs(text.lines())?;
    let unknown: Vec<String> = pairs
        .iter()
        .filter(|(_, k, _)| !CONFIG_KEYS.contains(&k.as_str()))
        .map(|(_, k, _)| k.clone())
        .collect();
    if !unknown.is_empty() {
        return Err(ConfigError::Unknown(unknown));
    }
    let Some((line, _, kind)) = pairs.iter().find(|(_, k, _)| k == "experiment") else {
        return Err(ConfigError::Missing(vec!["experiment".into()]));
    };
    let kind: ExperimentKind = kind.parse().map_err(|e: hsgd_core::Error| ConfigError::Malformed {
        line: *line,
        message: e.to_string(),
    })?;
    let mut cfg = ExperimentConfig::defaults(kind);
    for (line, key, value) in &pairs {
        let (line, v) = (*line, value.as_str());
        match key.as_str() {
            "experiment" => {}
            "n" => cfg.n = parse_one(line, key, v, "an integer")?,
            "b" => cfg.b = parse_one(line, key, v, "an integer")?,
            "gamma" => cfg.gamma = parse_one(line, key, v, "a number")?,
            "T" => cfg.iterations = parse_one(line, key, v, "an integer")?,
            "widths" => cfg.widths = parse_list(line, key, v, "a number list")?,
            "base_width" => cfg.base_width = parse_one(line, key, v, "a number")?,
            "orders" => cfg.orders = parse_list(line, key, v, "a number list")?,
            "target_order" => cfg.target_order = parse_one(line, key, v, "a number")?,
            "b_grid" => cfg.b_grid = parse_list(line, key, v, "an integer list")?,
            "gamma_grid" => cfg.gamma_grid = parse_list(line, key, v, "a number list")?,
            "ns" => cfg.ns = parse_list(line, key, v, "an integer list")?,
            "nu_probe_n" => cfg.nu_probe_n = parse_one(line, key, v, "an integer")?,
            "seeds" => cfg.seeds = parse_seeds(line, v)?,
            "seed" => cfg.master_seed = parse_one(line, key, v, "an integer")?,
            "noise_var" => cfg.noise_var = parse_one(line, key, v, "a number")?,
            "m_test" => cfg.m_test = parse_one(line, key, v, "an integer")?,
            _ => unreachable!("unknown keys rejected above"),
        }
    }
    cfg.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
    Ok(cfg)
}

fn join<T: fmt::Display>(values: &[T]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

/// Writes every key, so that `parse_config(render_config(c)) == c`.
pub fn render_config(cfg: &ExperimentConfig) -> String {
    [
        format!("experiment={}", cfg.experiment),
        format!("n={}", cfg.n),
        format!("b={}", cfg.b),
        format!("gamma={}", cfg.gamma),
        format!("T={}", cfg.iterations),
        format!("widths={}", join(&cfg.widths)),
        format!("base_width={}", cfg.base_width),
        format!("orders={}", join(&cfg.orders)),
        format!("target_order={}", cfg.target_order),
        format!("b_grid={}", join(&cfg.b_grid)),
        format!("gamma_grid={}", join(&cfg.gamma_grid)),
        format!("ns={}", join(&cfg.ns)),
        format!("nu_probe_n={}", cfg.nu_probe_n),
        format!("seeds={}", join(&cfg.seeds)),
        format!("seed={}", cfg.master_seed),
        format!("noise_var={}", cfg.noise_var),
        format!("m_test={}", cfg.m_test),
    ]
    .join("\n")
        + "\n"
}

/// Human-readable number: six decimals with trailing zeros dropped; small
/// magnitudes switch to six significant digits in exponent form.
pub fn format_number(x: f64) -> String {
    if x != 0.0 && x.is_finite() && x.abs() < 1e-3 {
        return format!("{x:.5e}");
    }
    let s = format!("{x:.6}");
    if s.contains('.') {
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" { "0".into() } else { s.into() }
    } else {
        s
    }
}

#[derive(Debug, Parser)]
#[command(name = "hsgd", version, about = "Kernel least squares with tail-averaged SGD in Hilbert scales")]
pub struct Cli {
    /// Experiment config (key=value lines); also supplies calculator parameters.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Write CSV here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Override the master seed.
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,
    /// Worker threads for the experiment harness.
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the configured experiment and write per-seed and median rows as CSV.
    Run,
    /// Batch size, step size and iteration count: n, beta, nu, strategy [, R, M, kappa_sq].
    Schedule {
        #[arg(value_name = "KEY=VALUE")]
        params: Vec<String>,
    },
    /// Effective dimension: eigenvalues with lambda, or with a lambda grid to estimate nu.
    Effdim {
        #[arg(value_name = "KEY=VALUE")]
        params: Vec<String>,
    },
    /// Fitted decay exponent from ns and risks, or the predicted one from beta and nu.
    Rate {
        #[arg(value_name = "KEY=VALUE")]
        params: Vec<String>,
    },
    /// Tail-averaged gradient-descent filter at sigma, gamma, T.
    Filter {
        #[arg(value_name = "KEY=VALUE")]
        params: Vec<String>,
    },
}

/// Failure of a subcommand, mapped to an exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Io(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<hsgd_core::Error> for Failure {
    fn from(e: hsgd_core::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

/// Calculator parameters from positional `key=value` arguments, after any config file lines.
struct Params {
    pairs: Vec<(usize, String, String)>,
}

impl Params {
    fn new(file_text: Option<&str>, args: &[String], allowed: &[&str]) -> Result<Self, ConfigError> {
        let lines: Vec<&str> = file_text
            .into_iter()
            .flat_map(str::lines)
            .chain(args.iter().map(String::as_str))
            .collect();
        let pairs = parse_pairs(lines)?;
        let unknown: Vec<String> = pairs
            .iter()
            .filter(|(_, k, _)| !allowed.contains(&k.as_str()))
            .map(|(_, k, _)| k.clone())
            .collect();
        if !unknown.is_empty() {
            return Err(ConfigError::Unknown(unknown));
        }
        Ok(Self { pairs })
    }

    fn raw(&self, key: &str) -> Option<(usize, &str)> {
        self.pairs
            .iter()
            .find(|(_, k, _)| k == key)
            .map(|(l, _, v)| (*l, v.as_str()))
    }

    fn require(&self, keys: &[&str]) -> Result<(), ConfigError> {
        let missing: Vec<String> = keys
            .iter()
            .filter(|k| self.raw(k).is_none())
            .map(|k| k.to_string())
            .collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Missing(missing))
        }
    }

    fn get<T: std::str::FromStr>(&self, key: &str, what: &str) -> Result<Option<T>, ConfigError> {
        self.raw(key).map(|(l, v)| parse_one(l, key, v, what)).transpose()
    }

    fn list<T: std::str::FromStr>(&self, key: &str, what: &str) -> Result<Option<Vec<T>>, ConfigError> {
        self.raw(key).map(|(l, v)| parse_list(l, key, v, what)).transpose()
    }
}

fn read_config(cli: &Cli) -> Result<Option<String>, Failure> {
    cli.config
        .as_ref()
        .map(|p| std::fs::read_to_string(p).map_err(|e| Failure::Io(format!("cannot read {}: {e}", p.display()))))
        .transpose()
}

fn schedule(file: Option<&str>, args: &[String]) -> Result<String, Failure> {
    let p = Params::new(file, args, &["n", "beta", "nu", "strategy", "R", "M", "kappa_sq"])?;
    p.require(&["n", "beta", "nu", "strategy"])?;
    let strategy: Strategy = p.get::<String>("strategy", "a string")?.unwrap().parse()?;
    let s = choose_params(
        p.get("n", "an integer")?.unwrap(),
        p.get("beta", "a number")?.unwrap(),
        p.get("nu", "a number")?.unwrap(),
        p.get("R", "a number")?.unwrap_or(1.0),
        p.get("M", "a number")?.unwrap_or(1.0),
        strategy,
        p.get("kappa_sq", "a number")?.unwrap_or(1.0),
    )?;
    Ok(format!("b={} gamma={} T={}", s.batch, format_number(s.gamma), s.iterations))
}

fn effdim(file: Option<&str>, args: &[String]) -> Result<String, Failure> {
    let p = Params::new(file, args, &["eigenvalues", "lambda", "grid"])?;
    p.require(&["eigenvalues"])?;
    let eigs: Vec<f64> = p.list("eigenvalues", "a number list")?.unwrap();
    let mut out = Vec::new();
    if let Some(lambda) = p.get::<f64>("lambda", "a number")? {
        out.push(format_number(effective_dimension(&eigs, lambda)?));
    }
    if let Some(grid) = p.list::<f64>("grid", "a number list")? {
        out.push(format!("nu={}", format_number(estimate_nu(&eigs, &grid)?)));
    }
    if out.is_empty() {
        return Err(Failure::Usage("effdim needs lambda or grid".into()));
    }
    Ok(out.join("\n"))
}

fn rate(file: Option<&str>, args: &[String]) -> Result<String, Failure> {
    let p = Params::new(file, args, &["ns", "risks", "beta", "nu", "benchmark"])?;
    if p.raw("ns").is_some() || p.raw("risks").is_some() {
        p.require(&["ns", "risks"])?;
        let ns: Vec<usize> = p.list("ns", "an integer list")?.unwrap();
        let risks: Vec<f64> = p.list("risks", "a number list")?.unwrap();
        return Ok(format_number(fit_rate(&ns, &risks)?));
    }
    p.require(&["beta", "nu"])?;
    let benchmark = match p.get::<String>("benchmark", "a string")?.as_deref() {
        None | Some("met") => Benchmark::Met,
        Some("violated") => Benchmark::Violated,
        Some(other) => {
            return Err(Failure::Usage(format!(
                "benchmark must be 'met' or 'violated', got '{other}'"
            )))
        }
    };
    let beta: f64 = p.get("beta", "a number")?.unwrap();
    let nu: f64 = p.get("nu", "a number")?.unwrap();
    if !(nu > 0.0 && nu <= 1.0) || !(beta >= 0.0) {
        return Err(Failure::Usage(format!("need beta >= 0 and 0 < nu <= 1, got beta={beta} nu={nu}")));
    }
    Ok(format_number(theoretical_rate(beta, nu, benchmark)))
}

fn filter(file: Option<&str>, args: &[String]) -> Result<String, Failure> {
    let p = Params::new(file, args, &["sigma", "gamma", "T"])?;
    p.require(&["sigma", "gamma", "T"])?;
    let sigma: f64 = p.get("sigma", "a number")?.unwrap();
    let gamma: f64 = p.get("gamma", "a number")?.unwrap();
    if !(sigma >= 0.0 && gamma > 0.0) {
        return Err(Failure::Usage(format!("need sigma >= 0 and gamma > 0, got {sigma}, {gamma}")));
    }
    let f = filter_gd(sigma, gamma, p.get("T", "an integer")?.unwrap());
    Ok(format!("gbar={} rbar={}", format_number(f.gbar), format_number(f.rbar)))
}

fn run_experiment(cli: &Cli, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let text = read_config(cli)?.ok_or_else(|| Failure::Usage("run needs --config PATH".into()))?;
    let mut cfg = parse_config(&text)?;
    if let Some(seed) = cli.seed {
        cfg.master_seed = seed;
    }
    let result = match cli.jobs {
        Some(0) => return Err(Failure::Usage("--jobs must be positive".into())),
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Failure::Usage(e.to_string()))?
            .install(|| run_replicated(&cfg))?,
        None => run_replicated(&cfg)?,
    };
    let written = match &cli.out {
        Some(path) => File::create(path)
            .and_then(|f| {
                let mut w = BufWriter::new(f);
                result.write_csv(&mut w)?;
                w.flush()
            })
            .map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display()))),
        None => result
            .write_csv(&mut *stdout)
            .map_err(|e| Failure::Io(format!("cannot write output: {e}"))),
    };
    written?;
    if result.all_diverged() {
        log::error!("every grid point diverged");
        return Ok(EXIT_ALL_DIVERGED);
    }
    Ok(EXIT_OK)
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let calc = |f: fn(Option<&str>, &[String]) -> Result<String, Failure>, params: &[String], stdout: &mut dyn Write| {
        let text = read_config(cli)?;
        let line = f(text.as_deref(), params)?;
        writeln!(stdout, "{line}").map_err(|e| Failure::Io(e.to_string()))?;
        Ok(EXIT_OK)
    };
    match &cli.command {
        Command::Run => run_experiment(cli, stdout),
        Command::Schedule { params } => calc(schedule, params, stdout),
        Command::Effdim { params } => calc(effdim, params, stdout),
        Command::Rate { params } => calc(rate, params, stdout),
        Command::Filter { params } => calc(filter, params, stdout),
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit code.
pub fn run<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{text}")
            } else {
                write!(stdout, "{text}")
            };
            return code;
        }
    };
    match dispatch(&cli, stdout) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Io(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_IO
        }
    }
}

/// Convenience for `main`: real process streams.
pub fn run_process() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
