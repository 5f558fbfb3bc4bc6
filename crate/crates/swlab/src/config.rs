//! Run configuration: one JSON document per run.
//!
//! Numbers are written as decimal strings (`"1e-6"`, `"0.25"`) so a config
//! round-trips losslessly; plain JSON numbers are accepted on input. Unknown
//! keys are rejected everywhere. [`RunConfig::resolve`] fills in every
//! default so the echoed `config.json` has nothing implicit left.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use swlab_core::corpus::DEFAULT_SEED;
use swlab_core::params::{MaximizerMode, ParamSet};

use crate::error::CliError;

/// A double written as a decimal string.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

/// A nonnegative integer written as a decimal string.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Int(pub u64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        // Display is the shortest string that parses back to the same double.
        s.serialize_str(&self.0.to_string())
    }
}

impl Serialize for Int {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

struct NumVisitor;

impl Visitor<'_> for NumVisitor {
    type Value = Num;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a decimal string or a number")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Num, E> {
        f64::from_str(v.trim())
            .map(Num)
            .map_err(|_| E::invalid_value(de::Unexpected::Str(v), &self))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Num, E> {
        Ok(Num(v))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Num, E> {
        Ok(Num(v as f64))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Num, E> {
        Ok(Num(v as f64))
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        d.deserialize_any(NumVisitor)
    }
}

struct IntVisitor;

impl Visitor<'_> for IntVisitor {
    type Value = Int;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a nonnegative integer, as a decimal string or a number")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Int, E> {
        u64::from_str(v.trim())
            .map(Int)
            .map_err(|_| E::invalid_value(de::Unexpected::Str(v), &self))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Int, E> {
        Ok(Int(v))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Int, E> {
        u64::try_from(v).map(Int).map_err(|_| E::invalid_value(de::Unexpected::Signed(v), &self))
    }
}

impl<'de> Deserialize<'de> for Int {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        d.deserialize_any(IntVisitor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Validate,
    Riesz,
    Heat,
    Besov,
    Verify,
    Maximize,
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Riesz => "riesz",
            Command::Heat => "heat",
            Command::Besov => "besov",
            Command::Verify => "verify",
            Command::Maximize => "maximize",
            Command::Sweep => "sweep",
        }
    }
}

/// Hypothesis sets checked by `validate`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    SteinWeiss,
    Improved,
    Ckn,
    CknImproved,
    CompactEmbedding,
    PseudoPoincare,
    BesovEmbedding,
    Maximizer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verifier {
    #[serde(alias = "stein-weiss")]
    SteinWeiss,
    Improved,
    #[serde(alias = "ckn-improved")]
    CknImproved,
    #[serde(alias = "embedding-besov")]
    EmbeddingBesov,
    #[serde(alias = "pseudo-poincare")]
    PseudoPoincare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RieszMethod {
    /// Log-convolution with the exact radial kernel.
    Direct,
    /// Time integral of the heat semigroup.
    Heat,
}

/// Input profile built on the run grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    /// `(4πt)^{-n/2} e^{-ρ²/4t}`.
    HeatKernel { t: Num },
    /// `ρ^a e^{-ρ²}`.
    PowerGaussian { a: Num },
    /// `(1+ρ²)^{-(n+1)/2}`.
    SlowDecay,
    /// `c I_s(U^{r-1})`, whose potential is `U = (1+ρ²)^{-(n-2s)/2}`.
    ConformalExtremal { s: Num },
}

impl Default for Profile {
    fn default() -> Self {
        Profile::HeatKernel { t: Num(1.0) }
    }
}

/// [`ParamSet`] with decimal-string values.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<Int>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Num>,
}

impl Params {
    pub fn to_param_set(&self) -> ParamSet {
        let f = |v: Option<Num>| v.map(|x| x.0);
        ParamSet {
            n: self.n.map(|v| v.0 as usize),
            s: f(self.s),
            p: f(self.p),
            r: f(self.r),
            q: f(self.q),
            alpha: f(self.alpha),
            beta: f(self.beta),
            gamma: f(self.gamma),
            theta: f(self.theta),
            mu: f(self.mu),
            delta: f(self.delta),
            epsilon: f(self.epsilon),
            sigma: f(self.sigma),
        }
    }

    pub fn from_param_set(ps: &ParamSet) -> Self {
        let f = |v: Option<f64>| v.map(Num);
        Self {
            n: ps.n.map(|v| Int(v as u64)),
            s: f(ps.s),
            p: f(ps.p),
            r: f(ps.r),
            q: f(ps.q),
            alpha: f(ps.alpha),
            beta: f(ps.beta),
            gamma: f(ps.gamma),
            theta: f(ps.theta),
            mu: f(ps.mu),
            delta: f(ps.delta),
            epsilon: f(ps.epsilon),
            sigma: f(ps.sigma),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<Int>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_min: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_max: Option<Num>,
    #[serde(default, rename = "N", skip_serializing_if = "Option::is_none")]
    pub nodes: Option<Int>,
}

/// `count` log-spaced values on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogRange {
    pub lo: Num,
    pub hi: Num,
    pub count: Int,
}

impl LogRange {
    pub fn new(lo: f64, hi: f64, count: u64) -> Self {
        Self {
            lo: Num(lo),
            hi: Num(hi),
            count: Int(count),
        }
    }

    pub fn values(&self) -> Vec<f64> {
        swlab_core::quad::log_space(self.lo.0, self.hi.0, self.count.0 as usize)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<Int>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<Num>,
    /// Heat times for Besov suprema and decay reports.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<LogRange>,
    /// Truncation radii for the pseudo-Poincaré rate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trunc_grid: Option<LogRange>,
    /// Radii for the heat tail report.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_grid: Option<LogRange>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<Int>,
    /// Repeat on the grid with twice the nodes and report the relative change.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refine: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<MaximizerMode>,
}

/// Options of the `heat` command.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeatConfig {
    /// Radial derivatives taken before the norm, 0 or 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<Int>,
    /// Time of the tail report, run when `params.delta` is set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_time: Option<Num>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IoConfig {
    /// Profile CSV (`r,value`) on the run grid; overrides `profile`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub io: IoConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theorem: Option<Theorem>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verifier: Option<Verifier>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<RieszMethod>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<Profile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heat: Option<HeatConfig>,
    /// Member runs of a `sweep`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub runs: Vec<RunConfig>,
}

pub const DEFAULT_DIM: u64 = 3;
pub const DEFAULT_R_MIN: f64 = 1e-6;
pub const DEFAULT_R_MAX: f64 = 1e6;
pub const DEFAULT_NODES: u64 = 512;

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            params: Params::default(),
            grid: GridConfig::default(),
            solver: SolverConfig::default(),
            io: IoConfig::default(),
            theorem: None,
            verifier: None,
            method: None,
            profile: None,
            heat: None,
            runs: Vec::new(),
        }
    }

    /// Parses a config document, reporting the path of the offending key.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let value: serde_json::Value = if text.trim().is_empty() {
            serde_json::Value::Null
        } else {
            serde_json::from_str(text).map_err(|e| CliError::Config(format!("malformed JSON: {e}")))?
        };
        if value.get("command").is_none() {
            return Err(CliError::Config("missing command".into()));
        }
        serde_path_to_error::deserialize(value).map_err(|e| {
            let path = e.path().to_string();
            CliError::Config(format!("{path}: {}", e.into_inner()))
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    /// Materializes every default. Idempotent.
    pub fn resolve(mut self) -> Result<Self, CliError> {
        let dim = match (self.params.n, self.grid.n) {
            (Some(a), Some(b)) if a != b => {
                return Err(CliError::Config(format!("grid.n = {} differs from params.n = {}", b.0, a.0)));
            }
            (a, b) => a.or(b).unwrap_or(Int(DEFAULT_DIM)),
        };
        self.grid.n = Some(dim);
        self.grid.r_min.get_or_insert(Num(DEFAULT_R_MIN));
        self.grid.r_max.get_or_insert(Num(DEFAULT_R_MAX));
        self.grid.nodes.get_or_insert(Int(DEFAULT_NODES));
        let sv = &mut self.solver;
        sv.max_iter.get_or_insert(Int(swlab_core::extremal::DEFAULT_MAX_ITER as u64));
        sv.tol.get_or_insert(Num(swlab_core::extremal::DEFAULT_TOL));
        sv.t_grid.get_or_insert(LogRange::new(1e-4, 1e4, 60));
        sv.trunc_grid.get_or_insert(LogRange::new(1e-3, 1e-1, 9));
        sv.k_grid.get_or_insert(LogRange::new(3.0, 30.0, 8));
        sv.seed.get_or_insert(Int(DEFAULT_SEED));
        sv.refine.get_or_insert(true);
        sv.mode.get_or_insert(MaximizerMode::Maximizer);
        match self.command {
            Command::Validate if self.theorem.is_none() => return Err(CliError::Config("missing theorem".into())),
            Command::Verify if self.verifier.is_none() => return Err(CliError::Config("missing verifier".into())),
            Command::Riesz => {
                self.method.get_or_insert(RieszMethod::Direct);
            }
            Command::Heat => {
                let h = self.heat.get_or_insert_with(HeatConfig::default);
                h.order.get_or_insert(Int(0));
                h.tail_time.get_or_insert(Num(1.0));
            }
            Command::Sweep if self.runs.is_empty() => return Err(CliError::Config("sweep has no runs".into())),
            _ => {}
        }
        let wants_profile = matches!(self.command, Command::Riesz | Command::Heat | Command::Besov | Command::Maximize)
            || self.verifier == Some(Verifier::PseudoPoincare);
        if wants_profile && self.io.input.is_none() {
            self.profile.get_or_insert_with(Profile::default);
        }
        self.runs = self.runs.into_iter().map(RunConfig::resolve).collect::<Result<_, _>>()?;
        if self.runs.iter().any(|r| r.command == Command::Sweep) {
            return Err(CliError::Config("sweeps cannot be nested".into()));
        }
        Ok(self)
    }
}
