//! Run configuration: flat `key=value` file merged under command-line flags.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use ellface::liealg::{build_algebra, DynamicalWeight, Family};
use ellface::qspecial::ModulusParams;
use ellface::{Params, Spec, Weight};

use crate::error::CliError;

/// Flags shared by every subcommand. Each may also be given in the config file.
#[derive(Args, Debug, Clone, Default)]
pub struct Flags {
    /// `key=value` file; flags given on the command line take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// A, B, C or D.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub rank: Option<usize>,
    /// Nome `0 < q < 1`.
    #[arg(long)]
    pub q: Option<f64>,
    /// Elliptic modulus exponent, `p = q^{2r}`.
    #[arg(long)]
    pub r: Option<f64>,
    /// Dynamical coordinates `s_0,...,s_n` with `a + ρ = Σ s_i Λ_i`.
    #[arg(long, allow_hyphen_values = true)]
    pub weights: Option<String>,
    /// Spectral values `u`: a value, a comma list, or `start:stop:count`.
    #[arg(long, allow_hyphen_values = true)]
    pub u: Option<String>,
    /// Multiplicative spectral values `z`; overrides `z = q^{2u}`.
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<String>,
    /// Depth of the truncated twistor product.
    #[arg(long = "trunc-K")]
    pub trunc_k: Option<usize>,
    #[arg(long)]
    pub series_cutoff: Option<usize>,
    #[arg(long)]
    pub product_cutoff: Option<usize>,
    /// Pass threshold for residuals.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Comma list of verification suites, or `all`.
    #[arg(long)]
    pub suite: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// json or csv.
    #[arg(long)]
    pub format: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

pub const SUITES: [&str; 12] = [
    "qybe",
    "twistor-diff",
    "dybe",
    "cocycle",
    "face-ybe",
    "unitarity",
    "inversion2",
    "crossing",
    "gauge",
    "part2-unique",
    "kappa",
    "conn-formula",
];

pub const DEFAULT_U: [f64; 6] = [0.11, 0.23, 0.37, 0.52, 0.64, 0.81];

/// A validated configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub family: Family,
    pub rank: usize,
    pub q: f64,
    pub r: f64,
    pub s: Vec<f64>,
    pub u: Vec<f64>,
    pub z: Option<Vec<f64>>,
    pub trunc_k: Option<usize>,
    pub series_cutoff: usize,
    pub product_cutoff: usize,
    pub tol: f64,
    pub suite: Vec<String>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub spec: Spec,
    pub params: Params,
    pub weight: Weight,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn read_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let mut out = BTreeMap::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("{}:{}: expected key=value", path.display(), no + 1)))?;
        let key = k.trim().replace('_', "-").to_ascii_lowercase();
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

/// Merges the config file (if any) under the flags.
pub fn merge(flags: &Flags) -> Result<Flags, CliError> {
    let Some(path) = &flags.config else { return Ok(flags.clone()) };
    let file = read_file(path)?;
    let mut f = flags.clone();
    for (k, v) in file {
        let num = |what: &str| usage(format!("config key {what}: cannot parse {v:?}"));
        match k.as_str() {
            "family" => f.family = f.family.or(Some(v)),
            "rank" => f.rank = f.rank.or(Some(v.parse().map_err(|_| num("rank"))?)),
            "q" => f.q = f.q.or(Some(v.parse().map_err(|_| num("q"))?)),
            "r" => f.r = f.r.or(Some(v.parse().map_err(|_| num("r"))?)),
            "weights" => f.weights = f.weights.or(Some(v)),
            "u" => f.u = f.u.or(Some(v)),
            "z" => f.z = f.z.or(Some(v)),
            "trunc-k" => f.trunc_k = f.trunc_k.or(Some(v.parse().map_err(|_| num("trunc-K"))?)),
            "series-cutoff" => f.series_cutoff = f.series_cutoff.or(Some(v.parse().map_err(|_| num("series_cutoff"))?)),
            "product-cutoff" => f.product_cutoff = f.product_cutoff.or(Some(v.parse().map_err(|_| num("product_cutoff"))?)),
            "tol" => f.tol = f.tol.or(Some(v.parse().map_err(|_| num("tol"))?)),
            "suite" => f.suite = f.suite.or(Some(v)),
            "out" => f.out = f.out.or(Some(PathBuf::from(v))),
            "format" => f.format = f.format.or(Some(v)),
            other => return Err(usage(format!("unknown config key {other:?}"))),
        }
    }
    Ok(f)
}

/// `v`, `v1,v2,...` or `start:stop:count` (endpoints included).
pub fn parse_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = || usage(format!("cannot parse grid {s:?}"));
    let parts: Vec<&str> = s.split(':').collect();
    let out = match parts.as_slice() {
        [start, stop, count] => {
            let (a, b): (f64, f64) = (start.trim().parse().map_err(|_| bad())?, stop.trim().parse().map_err(|_| bad())?);
            let n: usize = count.trim().parse().map_err(|_| bad())?;
            match n {
                0 => Vec::new(),
                1 => vec![a],
                _ => (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
            }
        }
        [list] => list.split(',').map(|x| x.trim().parse::<f64>().map_err(|_| bad())).collect::<Result<_, _>>()?,
        _ => return Err(bad()),
    };
    if out.is_empty() {
        return Err(usage(format!("grid {s:?} is empty")));
    }
    if out.iter().any(|x| !x.is_finite()) {
        return Err(bad());
    }
    Ok(out)
}

/// Default generic dynamical point and `r` for the ranks used in the test suite.
pub fn default_point(family: Family, rank: usize) -> Option<(Vec<f64>, f64)> {
    Some(match (family, rank) {
        (Family::A, 1) => (vec![0.0, 2.3], 10.0),
        (Family::A, 2) => (vec![0.0, 2.3, 1.9], 10.0),
        (Family::B, 2) => (vec![0.0, 2.5, 4.6], 14.0),
        (Family::C, 2) => (vec![0.0, 3.61, 4.37], 30.0),
        (Family::D, 3) => (vec![0.0, 1.3, 1.9, 4.7], 14.0),
        _ => return None,
    })
}

impl RunConfig {
    pub fn from_flags(flags: &Flags, needs_suite: bool) -> Result<Self, CliError> {
        let f = merge(flags)?;
        let family = Family::parse(f.family.as_deref().unwrap_or("A")).map_err(|_| usage("family must be A, B, C or D"))?;
        let rank = f.rank.unwrap_or(if family == Family::D { 3 } else if family == Family::A { 1 } else { 2 });
        let q = f.q.unwrap_or(0.4);
        let default = default_point(family, rank);
        let r = match (f.r, &default) {
            (Some(r), _) => r,
            (None, Some((_, r))) => *r,
            (None, None) => 14.0,
        };
        let tol = f.tol.unwrap_or(1e-8);
        if !(tol > 0.0) {
            return Err(usage("tol must be positive"));
        }
        let spec = build_algebra(family, rank, q)?;
        let mut params = ModulusParams::with_tol(q, r, tol)?;
        if let Some(c) = f.series_cutoff {
            params.series_cutoff = c;
        }
        if let Some(c) = f.product_cutoff {
            params.product_cutoff = c;
        }
        let s = match (&f.weights, default) {
            (Some(w), _) => parse_grid(w)?,
            (None, Some((s, _))) => s,
            (None, None) => return Err(usage(format!("no default point for {family}{rank}; pass --weights"))),
        };
        let weight = DynamicalWeight::new(s.clone(), &spec)?;
        let u = match &f.u {
            Some(g) => parse_grid(g)?,
            None => DEFAULT_U.to_vec(),
        };
        let z = f.z.as_deref().map(parse_grid).transpose()?;
        if let Some(zs) = &z {
            if zs.iter().any(|&x| x == 0.0) {
                return Err(usage("z = 0 is not allowed"));
            }
        }
        let suite: Vec<String> = match f.suite.as_deref() {
            None if needs_suite => return Err(usage("--suite is required")),
            None => Vec::new(),
            Some(s) => {
                let items: Vec<String> = s.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect();
                if items.iter().any(|x| x == "all") {
                    SUITES.iter().map(|x| x.to_string()).collect()
                } else {
                    items
                }
            }
        };
        if needs_suite && suite.is_empty() {
            return Err(usage("suite is empty"));
        }
        if let Some(bad) = suite.iter().find(|x| !SUITES.contains(&x.as_str())) {
            return Err(usage(format!("unknown suite {bad:?}; expected one of {}", SUITES.join(", "))));
        }
        let format = match f.format.as_deref().unwrap_or("json") {
            "json" => Format::Json,
            "csv" => Format::Csv,
            other => return Err(usage(format!("format must be json or csv, got {other:?}"))),
        };
        Ok(RunConfig {
            family,
            rank,
            q,
            r,
            s,
            u,
            z,
            trunc_k: f.trunc_k,
            series_cutoff: params.series_cutoff,
            product_cutoff: params.product_cutoff,
            tol,
            suite,
            out: f.out,
            format,
            spec,
            params,
            weight,
        })
    }

    /// `z` values: explicit, or `q^{2u}`.
    pub fn z_grid(&self) -> Vec<f64> {
        self.z.clone().unwrap_or_else(|| self.u.iter().map(|u| self.q.powf(2.0 * u)).collect())
    }
}
