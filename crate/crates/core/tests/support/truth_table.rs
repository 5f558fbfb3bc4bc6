//! One-off perturbation search over the validators: for every named
//! condition, find a parameter set that fails that condition and nothing else.
//!
//! Perturbations set one or two fields to values from a fixed list, then
//! optionally restore the theorem's identities by solving them (affinely, or
//! affinely in `1/r`) for other fields. The residuals below are written out
//! independently of the validators.

use swlab_core::params::{self, ParamSet, ValidationReport};
use swlab_core::Result;

type Residual = fn(&ParamSet) -> f64;

pub struct Theorem {
    pub name: &'static str,
    pub validate: fn(&ParamSet) -> Result<ValidationReport>,
    pub bases: Vec<ParamSet>,
    pub fields: &'static [&'static str],
    /// Identity residuals and the fields each may be solved for.
    pub balances: Vec<(Residual, &'static [&'static str])>,
    /// Conditions implied by the others, with the reason.
    pub implied: &'static [(&'static str, &'static str)],
}

pub struct Outcome {
    pub theorem: &'static str,
    pub condition: String,
    pub witness: Option<ParamSet>,
    pub implied: Option<&'static str>,
}

fn g(ps: &ParamSet, k: &str) -> f64 {
    ps.get(k).unwrap_or(f64::NAN)
}

fn sw_residual(ps: &ParamSet) -> f64 {
    let (n, s, p, r) = (g(ps, "n"), g(ps, "s"), g(ps, "p"), g(ps, "r"));
    1.0 / r - 1.0 / p - (g(ps, "alpha") - g(ps, "gamma") - s) / n
}

fn improved_residual(ps: &ParamSet) -> f64 {
    let (n, s, p, r) = (g(ps, "n"), g(ps, "s"), g(ps, "p"), g(ps, "r"));
    let (a, c, th, mu) = (g(ps, "alpha"), g(ps, "gamma"), g(ps, "theta"), g(ps, "mu"));
    c + n / r - th * (a + n / p - s) - (1.0 - th) * mu
}

fn ckn_improved_residual(ps: &ParamSet) -> f64 {
    let (n, p, r) = (g(ps, "n"), g(ps, "p"), g(ps, "r"));
    let (a, c, th, mu) = (g(ps, "alpha"), g(ps, "gamma"), g(ps, "theta"), g(ps, "mu"));
    c + n / r - th * (a + n / p - 1.0) - (1.0 - th) * mu
}

fn ckn_balance(ps: &ParamSet) -> f64 {
    let (n, p, q, r) = (g(ps, "n"), g(ps, "p"), g(ps, "q"), g(ps, "r"));
    let (a, b, c, th) = (g(ps, "alpha"), g(ps, "beta"), g(ps, "gamma"), g(ps, "theta"));
    1.0 / r + c / n - th * (1.0 / p + (a - 1.0) / n) - (1.0 - th) * (1.0 / q + b / n)
}

fn ckn_sigma(ps: &ParamSet) -> f64 {
    let th = g(ps, "theta");
    g(ps, "gamma") - th * g(ps, "sigma") - (1.0 - th) * g(ps, "beta")
}

fn maximizer_residual(ps: &ParamSet) -> f64 {
    let (n, s, r) = (g(ps, "n"), g(ps, "s"), g(ps, "r"));
    1.0 / r - 0.5 - (g(ps, "alpha") - g(ps, "gamma") - s) / n
}

/// Solves `res = 0` for `field`, assuming `res` is affine in the field
/// (in `1/r` when the field is `r`).
fn solve(ps: &ParamSet, res: Residual, field: &str) -> Option<ParamSet> {
    let value = |u: f64| if field == "r" { 1.0 / u } else { u };
    let at = |u: f64| {
        let mut q = *ps;
        q.set(field, Some(value(u))).ok()?;
        Some((q, res(&q)))
    };
    let (_, r0) = at(0.0)?;
    let (_, r1) = at(1.0)?;
    let slope = r1 - r0;
    if !(slope.abs() > 1e-14) {
        return None;
    }
    let (q, rq) = at(-r0 / slope)?;
    (rq.abs() < 1e-13).then_some(q)
}

const VALUES: [f64; 29] = [
    -10.0, -3.0, -2.0, -1.5, -1.0, -0.75, -0.5, -0.25, -0.1, 0.0, 0.1, 0.2, 0.25, 0.3, 0.5, 0.6, 0.75,
    0.9, 1.0, 1.2, 1.5, 1.8, 2.0, 2.5, 3.0, 4.0, 6.0, 10.0, f64::INFINITY,
];

fn candidates(field: &str) -> Vec<f64> {
    if field == "n" {
        (1..=6).map(f64::from).collect()
    } else {
        VALUES.to_vec()
    }
}

fn plans(th: &Theorem) -> Vec<Vec<(Residual, &'static str)>> {
    let mut out = vec![Vec::new()];
    let singles: Vec<(usize, Residual, &'static str)> = th
        .balances
        .iter()
        .enumerate()
        .flat_map(|(i, (res, fs))| fs.iter().map(move |f| (i, *res, *f)))
        .collect();
    for &(_, res, f) in &singles {
        out.push(vec![(res, f)]);
    }
    for &(i, r1, f1) in &singles {
        for &(j, r2, f2) in &singles {
            if i != j && f1 != f2 {
                out.push(vec![(r1, f1), (r2, f2)]);
            }
        }
    }
    out
}

fn search(th: &Theorem) -> Vec<Outcome> {
    let names: Vec<String> = {
        let rep = (th.validate)(&th.bases[0]).expect("base tuple is complete");
        assert!(rep.passed(), "{} base fails {:?}", th.name, rep.failed_conditions());
        rep.checks.iter().map(|c| c.condition.clone()).collect()
    };
    let mut found: Vec<Option<ParamSet>> = vec![None; names.len()];
    let is_implied = |name: &str| th.implied.iter().any(|(c, _)| *c == name);
    let target = names.iter().filter(|n| !is_implied(n)).count();
    let mut covered = 0;
    let plans = plans(th);

    let try_set = |ps: &ParamSet, moved: &[&str], found: &mut Vec<Option<ParamSet>>, covered: &mut usize| {
        for plan in &plans {
            if plan.iter().any(|(_, f)| moved.contains(f)) {
                continue;
            }
            let mut q = *ps;
            let mut ok = true;
            for &(res, f) in plan {
                match solve(&q, res, f) {
                    Some(next) => q = next,
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue;
            }
            let Ok(rep) = (th.validate)(&q) else { continue };
            let failed = rep.failed_conditions();
            if failed.len() == 1 {
                let idx = names.iter().position(|n| n == failed[0]).unwrap();
                if found[idx].is_none() {
                    found[idx] = Some(q);
                    if !is_implied(failed[0]) {
                        *covered += 1;
                    }
                }
            }
        }
    };

    'bases: for base in &th.bases {
        for &f in th.fields {
            for v in candidates(f) {
                let mut ps = *base;
                if ps.set(f, Some(v)).is_err() {
                    continue;
                }
                try_set(&ps, &[f], &mut found, &mut covered);
            }
        }
        if covered == target {
            break 'bases;
        }
        for (i, &f1) in th.fields.iter().enumerate() {
            for &f2 in &th.fields[i + 1..] {
                for v1 in candidates(f1) {
                    for v2 in candidates(f2) {
                        let mut ps = *base;
                        if ps.set(f1, Some(v1)).is_err() || ps.set(f2, Some(v2)).is_err() {
                            continue;
                        }
                        try_set(&ps, &[f1, f2], &mut found, &mut covered);
                        if covered == target {
                            break 'bases;
                        }
                    }
                }
            }
        }
    }

    names
        .into_iter()
        .zip(found)
        .map(|(condition, witness)| Outcome {
            theorem: th.name,
            implied: th.implied.iter().find(|(c, _)| *c == condition).map(|(_, why)| *why),
            condition,
            witness,
        })
        .collect()
}

fn ps(pairs: &[(&str, f64)]) -> ParamSet {
    let mut out = ParamSet::default();
    for &(k, v) in pairs {
        out.set(k, Some(v)).unwrap();
    }
    out
}

fn fill(mut base: ParamSet, res: Residual, field: &str) -> ParamSet {
    base = solve(&base, res, field).expect("base identity solvable");
    base
}

pub fn theorems() -> Vec<Theorem> {
    let sw = ps(&[("n", 3.0), ("s", 1.0), ("p", 2.0), ("r", 4.0), ("alpha", 0.5), ("gamma", 0.25)]);
    let improved = fill(
        ps(&[("n", 3.0), ("s", 1.0), ("p", 2.0), ("alpha", 0.5), ("gamma", 0.25), ("theta", 0.8), ("mu", 1.2)]),
        improved_residual,
        "r",
    );
    let improved_flat = ParamSet {
        theta: Some(1.0),
        mu: Some(1.2),
        ..sw
    };
    let ckn_generic = fill(
        ps(&[
            ("n", 3.0),
            ("p", 2.0),
            ("q", 2.0),
            ("alpha", 0.5),
            ("beta", 0.0),
            ("theta", 0.5),
            ("sigma", 0.2),
            ("gamma", 0.1),
        ]),
        ckn_balance,
        "r",
    );
    // θ = 1 puts the inequality on the critical line 1/p + (α−1)/n = 1/r + γ/n.
    let ckn_critical = ps(&[
        ("n", 3.0),
        ("p", 2.0),
        ("q", 2.0),
        ("r", 4.0),
        ("alpha", 0.5),
        ("beta", 0.0),
        ("theta", 1.0),
        ("sigma", 0.25),
        ("gamma", 0.25),
    ]);
    let ckn_improved = fill(
        ps(&[("n", 3.0), ("p", 2.0), ("alpha", 0.5), ("gamma", 0.25), ("theta", 0.8), ("mu", 1.2)]),
        ckn_improved_residual,
        "r",
    );
    let compact = ps(&[("n", 3.0), ("s", 1.0), ("p", 2.0), ("q", 3.0), ("alpha", 0.5), ("beta", 0.5)]);

    vec![
        Theorem {
            name: "stein_weiss",
            validate: params::validate_stein_weiss,
            bases: vec![sw],
            fields: &["n", "s", "p", "r", "alpha", "gamma"],
            balances: vec![(sw_residual, &["r", "s", "gamma", "alpha"])],
            implied: &[
                ("n ≥ 1", "n is an integer and 0 < s < n"),
                ("s < n", "γ > −n/r and the relation give s < α + n/p, and α < n/p′"),
            ],
        },
        Theorem {
            name: "improved_stein_weiss",
            validate: params::validate_improved,
            bases: vec![improved, improved_flat],
            fields: &["n", "s", "p", "r", "alpha", "gamma", "theta", "mu"],
            balances: vec![(improved_residual, &["r", "theta", "mu", "gamma", "alpha"])],
            implied: &[],
        },
        Theorem {
            name: "ckn",
            validate: params::validate_ckn,
            bases: vec![ckn_generic, ckn_critical],
            fields: &["n", "p", "q", "r", "alpha", "beta", "gamma", "theta", "sigma"],
            balances: vec![
                (ckn_balance, &["r", "q", "gamma", "beta"]),
                (ckn_sigma, &["sigma", "gamma", "beta"]),
            ],
            implied: &[],
        },
        Theorem {
            name: "ckn_improved",
            validate: params::validate_ckn_improved,
            bases: vec![ckn_improved],
            fields: &["n", "p", "r", "alpha", "gamma", "theta", "mu"],
            balances: vec![(ckn_improved_residual, &["r", "theta", "mu", "gamma", "alpha"])],
            implied: &[(
                "γ < n/r′",
                "(1−θ)μ ≤ θ by μ/(μ+1) ≤ θ, so γ + n/r < θ(n − 1) + θ ≤ n by α < n/p′",
            )],
        },
        Theorem {
            name: "compact_embedding",
            validate: params::validate_compact_embedding,
            bases: vec![compact],
            fields: &["n", "s", "p", "q", "alpha", "beta"],
            balances: vec![],
            implied: &[
                ("n ≥ 1", "n is an integer and 0 < s < n"),
                ("0 < s", "s > n/p − n/q + α − β > 0"),
                ("s < n", "α + n/p > s and α < n/p′"),
                ("β > −n/q", "otherwise n/p − n/q + α − β ≥ n/p + α > s"),
            ],
        },
        Theorem {
            name: "maximizer",
            validate: params::validate_maximizer,
            bases: vec![sw],
            fields: &["n", "s", "p", "r", "alpha", "gamma"],
            balances: vec![(maximizer_residual, &["r", "s", "gamma", "alpha"])],
            implied: &[
                ("0 < s", "γ < α and the relation give 1/r − 1/2 > −s/n, so s ≤ 0 forces r < 2"),
                ("r < ∞", "γ < α and s < n/2 give 1/r > 1/2 − s/n > 0"),
                ("−n/r < γ", "the relation turns γ ≤ −n/r into s ≥ n/2 + α > n/2"),
            ],
        },
    ]
}

pub fn run() -> Vec<Outcome> {
    theorems().iter().flat_map(search).collect()
}
