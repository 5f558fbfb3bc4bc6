//! Exponent bookkeeping: one flat parameter set and a validator per theorem.
//!
//! Every validator returns one [`Check`] per hypothesis, named by the
//! inequality it tests. Chains such as `0 < s < n` are split into their
//! atomic pieces so that each can fail on its own. Identities are compared
//! to [`IDENTITY_TOLERANCE`]; strict inequalities are compared strictly and
//! an equality failure is tagged as a boundary case.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::Real;

/// Absolute tolerance for the scaling identities.
pub const IDENTITY_TOLERANCE: f64 = 1e-12;

/// All exponents that appear in the inequalities. Absent fields are `None`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamSet {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Auxiliary exponent of the CKN family, `γ = θσ + (1−θ)β`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
}

/// Keys accepted by [`ParamSet::get`] and [`ParamSet::set`], in serialization order.
pub const KEYS: [&str; 13] = [
    "n", "s", "p", "r", "q", "alpha", "beta", "gamma", "theta", "mu", "delta", "epsilon", "sigma",
];

impl ParamSet {
    /// Field by key; `n` is returned as a real.
    pub fn get(&self, key: &str) -> Option<f64> {
        match key {
            "n" => self.n.map(|n| n as f64),
            _ => *self.real_slot(key)?,
        }
    }

    /// Sets a field by key. `n` must be a non-negative integer.
    pub fn set(&mut self, key: &str, value: Option<f64>) -> Result<()> {
        if key == "n" {
            self.n = match value {
                None => None,
                Some(v) if v >= 0.0 && v.fract() == 0.0 => Some(v as usize),
                Some(_) => return Err(Error::invalid("n must be a non-negative integer")),
            };
            return Ok(());
        }
        let slot = self
            .real_slot_mut(key)
            .ok_or_else(|| Error::invalid(format!("unknown parameter {key}")))?;
        *slot = value;
        Ok(())
    }

    fn real_slot(&self, key: &str) -> Option<&Option<f64>> {
        Some(match key {
            "s" => &self.s,
            "p" => &self.p,
            "r" => &self.r,
            "q" => &self.q,
            "alpha" => &self.alpha,
            "beta" => &self.beta,
            "gamma" => &self.gamma,
            "theta" => &self.theta,
            "mu" => &self.mu,
            "delta" => &self.delta,
            "epsilon" => &self.epsilon,
            "sigma" => &self.sigma,
            _ => return None,
        })
    }

    fn real_slot_mut(&mut self, key: &str) -> Option<&mut Option<f64>> {
        Some(match key {
            "s" => &mut self.s,
            "p" => &mut self.p,
            "r" => &mut self.r,
            "q" => &mut self.q,
            "alpha" => &mut self.alpha,
            "beta" => &mut self.beta,
            "gamma" => &mut self.gamma,
            "theta" => &mut self.theta,
            "mu" => &mut self.mu,
            "delta" => &mut self.delta,
            "epsilon" => &mut self.epsilon,
            "sigma" => &mut self.sigma,
            _ => return None,
        })
    }

    fn need<const K: usize>(&self, keys: [&'static str; K]) -> Result<[f64; K]> {
        let missing: Vec<&'static str> = keys.iter().copied().filter(|k| self.get(k).is_none()).collect();
        if !missing.is_empty() {
            return Err(Error::MissingFields(missing));
        }
        Ok(keys.map(|k| self.get(k).unwrap()))
    }
}

/// Outcome of one hypothesis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub condition: String,
    pub passed: bool,
    /// A strict inequality failed by equality.
    #[serde(default, skip_serializing_if = "core::ops::Not::not")]
    pub boundary: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub theorem: String,
    pub checks: Vec<Check>,
    /// Quantities computed along the way, e.g. `delta`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub derived: BTreeMap<String, f64>,
}

impl ValidationReport {
    fn new(theorem: &str) -> Self {
        Self {
            theorem: theorem.to_string(),
            checks: Vec::new(),
            derived: BTreeMap::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn failed_conditions(&self) -> Vec<&str> {
        self.failures().map(|c| c.condition.as_str()).collect()
    }

    pub fn check(&self, condition: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.condition == condition)
    }

    /// One line per failed check, e.g. `"p ≤ q required"`.
    pub fn messages(&self) -> Vec<String> {
        self.failures()
            .map(|c| {
                if c.boundary {
                    format!("{} required (boundary)", c.condition)
                } else {
                    format!("{} required", c.condition)
                }
            })
            .collect()
    }

    /// `Ok(self)` when every check passed, otherwise [`Error::Validation`].
    pub fn into_result(self) -> Result<Self> {
        if self.passed() {
            Ok(self)
        } else {
            Err(Error::Validation(self.messages()))
        }
    }

    /// `a < b`.
    fn less(&mut self, name: &str, a: f64, b: f64) {
        self.push(name, a < b, a == b);
    }

    /// `a ≤ b`.
    fn less_eq(&mut self, name: &str, a: f64, b: f64) {
        self.push(name, a <= b, false);
    }

    fn identity(&mut self, name: &str, lhs: f64, rhs: f64) {
        self.push(name, (lhs - rhs).abs() <= IDENTITY_TOLERANCE, false);
    }

    fn push(&mut self, name: &str, passed: bool, boundary: bool) {
        self.checks.push(Check {
            condition: name.to_string(),
            passed,
            boundary: boundary && !passed,
        });
    }
}

/// `n/p′ = n(1 − 1/p)`.
fn dual_dim(n: f64, p: f64) -> f64 {
    n * (1.0 - 1.0 / p)
}

/// Hypotheses of the Stein-Weiss inequality
/// `‖|x|^γ I_s f‖_r ≤ C ‖|x|^α f‖_p`.
pub fn validate_stein_weiss(ps: &ParamSet) -> Result<ValidationReport> {
    let [n, s, p, r, alpha, gamma] = ps.need(["n", "s", "p", "r", "alpha", "gamma"])?;
    let mut rep = ValidationReport::new("stein_weiss");
    rep.less_eq("n ≥ 1", 1.0, n);
    rep.less("0 < s", 0.0, s);
    rep.less("s < n", s, n);
    rep.less("1 < p", 1.0, p);
    rep.less_eq("p ≤ r", p, r);
    rep.less("r < ∞", r, f64::INFINITY);
    rep.less("α < n/p′", alpha, dual_dim(n, p));
    rep.less("γ > −n/r", -n / r, gamma);
    rep.less_eq("α ≥ γ", gamma, alpha);
    rep.identity("1/r = 1/p + (α−γ−s)/n", 1.0 / r, 1.0 / p + (alpha - gamma - s) / n);
    Ok(rep)
}

/// Hypotheses of the improved inequality
/// `‖|x|^γ I_s f‖_r ≤ C ‖|x|^α f‖_p^θ ‖f‖_{B^{−μ−s}}^{1−θ}`.
pub fn validate_improved(ps: &ParamSet) -> Result<ValidationReport> {
    let [n, s, p, r, alpha, gamma, theta, mu] =
        ps.need(["n", "s", "p", "r", "alpha", "gamma", "theta", "mu"])?;
    let mut rep = ValidationReport::new("improved_stein_weiss");
    rep.less_eq("n ≥ 2", 2.0, n);
    rep.less("0 < s", 0.0, s);
    rep.less("s < n", s, n);
    rep.less("1 < p", 1.0, p);
    rep.less_eq("p ≤ r", p, r);
    rep.less("α < n/p′", alpha, dual_dim(n, p));
    rep.less("−γ < n/r", -gamma, n / r);
    rep.less_eq("α − γ/θ ≥ 0", 0.0, alpha - gamma / theta);
    rep.less("μ > 0", 0.0, mu);
    rep.less_eq("p/r ≤ θ", p / r, theta);
    rep.less_eq("μ/(μ+s) ≤ θ", mu / (mu + s), theta);
    rep.less_eq("θ ≤ 1", theta, 1.0);
    rep.identity(
        "γ + n/r = θ(α + n/p − s) + (1−θ)μ",
        gamma + n / r,
        theta * (alpha + n / p - s) + (1.0 - theta) * mu,
    );
    Ok(rep)
}

/// Hypotheses of the first-order Caffarelli-Kohn-Nirenberg inequality
/// `‖|x|^γ u‖_r ≤ C ‖|x|^α ∇u‖_p^θ ‖|x|^β u‖_q^{1−θ}`. When `σ` is absent it
/// is derived from `γ = θσ + (1−θ)β`.
pub fn validate_ckn(ps: &ParamSet) -> Result<ValidationReport> {
    let [n, p, q, r, alpha, beta, gamma, theta] =
        ps.need(["n", "p", "q", "r", "alpha", "beta", "gamma", "theta"])?;
    let mut rep = ValidationReport::new("ckn");
    rep.less_eq("p ≥ 1", 1.0, p);
    rep.less_eq("q ≥ 1", 1.0, q);
    rep.less("r > 0", 0.0, r);
    rep.less_eq("0 ≤ θ", 0.0, theta);
    rep.less_eq("θ ≤ 1", theta, 1.0);
    rep.less("1/p + α/n > 0", 0.0, 1.0 / p + alpha / n);
    rep.less("1/q + β/n > 0", 0.0, 1.0 / q + beta / n);
    rep.less("1/r + γ/n > 0", 0.0, 1.0 / r + gamma / n);
    let sigma = match ps.sigma {
        Some(sigma) => {
            rep.identity("γ = θσ + (1−θ)β", gamma, theta * sigma + (1.0 - theta) * beta);
            sigma
        }
        None => {
            let sigma = (gamma - (1.0 - theta) * beta) / theta;
            rep.derived.insert("sigma".to_string(), sigma);
            sigma
        }
    };
    let gradient_side = 1.0 / p + (alpha - 1.0) / n;
    let target = 1.0 / r + gamma / n;
    rep.identity(
        "1/r + γ/n = θ(1/p + (α−1)/n) + (1−θ)(1/q + β/n)",
        target,
        theta * gradient_side + (1.0 - theta) * (1.0 / q + beta / n),
    );
    // Conditional relations hold vacuously when their premise fails.
    let active = theta > 0.0;
    rep.push("0 ≤ α − σ if θ > 0", !active || alpha - sigma >= 0.0, false);
    let critical = active && (gradient_side - target).abs() <= IDENTITY_TOLERANCE;
    rep.push(
        "α − σ ≤ 1 if θ > 0 and 1/p + (α−1)/n = 1/r + γ/n",
        !critical || alpha - sigma <= 1.0,
        false,
    );
    Ok(rep)
}

/// Hypotheses of the improved CKN inequality
/// `‖|x|^γ u‖_r ≤ C ‖|x|^α ∇u‖_p^θ ‖u‖_{B^{−μ}}^{1−θ}`.
pub fn validate_ckn_improved(ps: &ParamSet) -> Result<ValidationReport> {
    let [n, p, r, alpha, gamma, theta, mu] = ps.need(["n", "p", "r", "alpha", "gamma", "theta", "mu"])?;
    let mut rep = ValidationReport::new("ckn_improved");
    rep.less("n > 1", 1.0, n);
    rep.less("1 < p", 1.0, p);
    rep.less_eq("p ≤ r", p, r);
    rep.less("α < n/p′", alpha, dual_dim(n, p));
    rep.less("−n/r < γ", -n / r, gamma);
    rep.less("γ < n/r′", gamma, dual_dim(n, r));
    rep.less_eq("α − γ/θ ≥ 0", 0.0, alpha - gamma / theta);
    rep.less("μ > 0", 0.0, mu);
    rep.less_eq("p/r ≤ θ", p / r, theta);
    rep.less_eq("μ/(μ+1) ≤ θ", mu / (mu + 1.0), theta);
    rep.less_eq("θ ≤ 1", theta, 1.0);
    rep.identity(
        "γ + n/r = θ(α + n/p − 1) + (1−θ)μ",
        gamma + n / r,
        theta * (alpha + n / p - 1.0) + (1.0 - theta) * mu,
    );
    Ok(rep)
}

/// Hypotheses of the local compact embedding `H^{s,p}_α ⊂ L^q(K, |x|^{βq})`,
/// reporting the pseudo-Poincaré rate `δ` as `derived["delta"]`.
pub fn validate_compact_embedding(ps: &ParamSet) -> Result<ValidationReport> {
    compact_checks(ps, false)
}

/// Hypotheses under which the truncation estimate
/// `‖(K_s^t f − K_s f)|x|^β‖_q ≤ C t^δ ‖|x|^α f‖_p` holds. These are the
/// compact-embedding conditions, except that `n/p − n/q + α − β = 0` is
/// admitted when `p = q` and `α = β`: the order-zero potential in the
/// argument is then the identity and the weighted norms coincide.
pub fn validate_pseudo_poincare(ps: &ParamSet) -> Result<ValidationReport> {
    compact_checks(ps, true)
}

fn compact_checks(ps: &ParamSet, allow_trivial_gap: bool) -> Result<ValidationReport> {
    let [n, s, p, q, alpha, beta] = ps.need(["n", "s", "p", "q", "alpha", "beta"])?;
    let theorem = if allow_trivial_gap { "pseudo_poincare" } else { "compact_embedding" };
    let mut rep = ValidationReport::new(theorem);
    let gap = n / p - n / q + alpha - beta;
    rep.less_eq("n ≥ 1", 1.0, n);
    rep.less("0 < s", 0.0, s);
    rep.less("s < n", s, n);
    rep.less("1 < p", 1.0, p);
    rep.less_eq("p ≤ q", p, q);
    rep.less("q < ∞", q, f64::INFINITY);
    rep.less("β > −n/q", -n / q, beta);
    rep.less("α < n/p′", alpha, dual_dim(n, p));
    rep.less_eq("α ≥ β", beta, alpha);
    rep.less("α + n/p > s", s, alpha + n / p);
    rep.less("s > n/p − n/q + α − β", gap, s);
    if allow_trivial_gap {
        let trivial = p == q && alpha == beta;
        rep.push("n/p − n/q + α − β > 0, or p = q and α = β", gap > 0.0 || trivial, false);
    } else {
        rep.less("n/p − n/q + α − β > 0", 0.0, gap);
    }
    rep.derived.insert("delta".to_string(), s - gap);
    Ok(rep)
}

/// Hypotheses of the embedding `L^p(|x|^{αp}) ⊂ Ḃ^{-μ-s}_{∞,∞}`. `μ` is
/// derived as `n/p + α − s` when absent.
pub fn validate_besov_embedding(ps: &ParamSet) -> Result<ValidationReport> {
    let [n, s, p, alpha] = ps.need(["n", "s", "p", "alpha"])?;
    let mut rep = ValidationReport::new("besov_embedding");
    let natural = n / p + alpha - s;
    let mu = match ps.mu {
        Some(mu) => {
            rep.identity("μ = n/p + α − s", mu, natural);
            mu
        }
        None => {
            rep.derived.insert("mu".to_string(), natural);
            natural
        }
    };
    rep.less("μ > 0", 0.0, mu);
    rep.less("0 < α", 0.0, alpha);
    rep.less("α < n/p′", alpha, dual_dim(n, p));
    Ok(rep)
}

/// Whether `r = 2` is admitted (operator-norm estimation at `p = r = 2`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaximizerMode {
    #[default]
    Maximizer,
    NormEstimate,
}

/// Hypotheses of the existence theorem for Stein-Weiss maximizers at `p = 2`.
pub fn validate_maximizer(ps: &ParamSet) -> Result<ValidationReport> {
    validate_maximizer_mode(ps, MaximizerMode::Maximizer)
}

/// [`validate_maximizer`] with the `2 < r` check optionally relaxed to `2 ≤ r`.
pub fn validate_maximizer_mode(ps: &ParamSet, mode: MaximizerMode) -> Result<ValidationReport> {
    let [n, s, r, alpha, gamma] = ps.need(["n", "s", "r", "alpha", "gamma"])?;
    let mut rep = ValidationReport::new("maximizer");
    if let Some(p) = ps.p {
        rep.push("p = 2", p == 2.0, false);
    }
    rep.less_eq("n ≥ 2", 2.0, n);
    rep.less("0 < s", 0.0, s);
    rep.less("s < n/2", s, n / 2.0);
    match mode {
        MaximizerMode::Maximizer => rep.less("2 < r", 2.0, r),
        MaximizerMode::NormEstimate => rep.less_eq("2 ≤ r", 2.0, r),
    }
    rep.less("r < ∞", r, f64::INFINITY);
    // α = γ = 0 is the classical unweighted case, where maximizers exist too.
    let unweighted = alpha == 0.0 && gamma == 0.0;
    if unweighted {
        rep.push("α = γ = 0 (unweighted)", true, false);
    } else {
        rep.less("0 < α", 0.0, alpha);
    }
    rep.less("α < n/2", alpha, n / 2.0);
    rep.less("−n/r < γ", -n / r, gamma);
    if !unweighted {
        rep.less("γ < α", gamma, alpha);
    }
    rep.identity("1/r − 1/2 = (α−γ−s)/n", 1.0 / r - 0.5, (alpha - gamma - s) / n);
    Ok(rep)
}

/// Fields that [`derive`] can fill in from the others.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Derivable {
    /// `1/r = 1/p + (α−γ−s)/n`.
    R,
    /// `μ = n/p + α − s` (at `p = 2` this is `n/2 + α − s`).
    Mu,
    /// `δ = s − (n/p − n/q + α − β)`.
    Delta,
    /// `2ε = μ/θ − μ`.
    Epsilon,
    /// `θ` from `γ + n/r = θ(α + n/p − s) + (1−θ)μ`.
    Theta,
    /// `σ` from `γ = θσ + (1−θ)β`.
    Sigma,
}

impl Derivable {
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "r" => Self::R,
            "mu" => Self::Mu,
            "delta" => Self::Delta,
            "epsilon" => Self::Epsilon,
            "theta" => Self::Theta,
            "sigma" => Self::Sigma,
            _ => return None,
        })
    }
}

/// Returns a copy of `ps` with `field` computed from its defining identity.
pub fn derive(ps: &ParamSet, field: Derivable) -> Result<ParamSet> {
    let mut out = *ps;
    match field {
        Derivable::R => {
            let [n, s, p, alpha, gamma] = ps.need(["n", "s", "p", "alpha", "gamma"])?;
            let inv = 1.0 / p + (alpha - gamma - s) / n;
            if inv <= 0.0 {
                return Err(Error::invalid("scaling relation gives 1/r ≤ 0"));
            }
            out.r = Some(1.0 / inv);
        }
        Derivable::Mu => {
            let [n, s, p, alpha] = ps.need(["n", "s", "p", "alpha"])?;
            out.mu = Some(n / p + alpha - s);
        }
        Derivable::Delta => {
            let [n, s, p, q, alpha, beta] = ps.need(["n", "s", "p", "q", "alpha", "beta"])?;
            out.delta = Some(s - (n / p - n / q + alpha - beta));
        }
        Derivable::Epsilon => {
            let [mu, theta] = ps.need(["mu", "theta"])?;
            out.epsilon = Some(0.5 * (mu / theta - mu));
        }
        Derivable::Theta => {
            let [n, s, p, r, alpha, gamma, mu] = ps.need(["n", "s", "p", "r", "alpha", "gamma", "mu"])?;
            let num = gamma + n / r - mu;
            let den = alpha + n / p - s - mu;
            if den.abs() <= IDENTITY_TOLERANCE {
                return Err(Error::invalid(if num.abs() <= IDENTITY_TOLERANCE {
                    "θ is undetermined: the relation reads 0 = 0 (degenerate, choose another μ)"
                } else {
                    "no θ satisfies the relation (degenerate denominator)"
                }));
            }
            out.theta = Some(num / den);
        }
        Derivable::Sigma => {
            let [beta, gamma, theta] = ps.need(["beta", "gamma", "theta"])?;
            if theta == 0.0 {
                return Err(Error::invalid("σ is undetermined when θ = 0"));
            }
            out.sigma = Some((gamma - (1.0 - theta) * beta) / theta);
        }
    }
    Ok(out)
}

/// The admissible `θ` interval `[max{p/r, μ/(μ+s)}, 1]`, or `None` if empty.
pub fn theta_range(ps: &ParamSet) -> Result<Option<(f64, f64)>> {
    let [s, p, r, mu] = ps.need(["s", "p", "r", "mu"])?;
    let lo = (p / r).max(mu / (mu + s));
    Ok((lo <= 1.0).then_some((lo, 1.0)))
}
