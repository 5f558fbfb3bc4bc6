//! Dispatch of a resolved [`RunConfig`] into a run directory.
//!
//! Every run writes `config.json` (the resolved config) first and
//! `summary.json` last, also on failure, so a directory always says what was
//! asked and how it ended.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use serde_json::{json, Map, Value};
use swlab_core::corpus::{self, Corpus};
use swlab_core::extremal::{self, SolverOptions};
use swlab_core::heat::DecayParams;
use swlab_core::params::{self, MaximizerMode, ParamSet, ValidationReport};
use swlab_core::riesz::{riesz_apply_heat, RieszTimes};
use swlab_core::verify::{self, RatioTable, VerifyOptions};
use swlab_core::{Error, HeatSemigroup, RadialFunction, RadialGrid, RieszOperator, TimeGrid, Warning};

use crate::config::{Command, Profile, RieszMethod, RunConfig, Theorem, Verifier};
use crate::error::{CliError, EXIT_OK};
use crate::formats::{fmt, read_profile, write_csv, write_json, write_profile};

/// Caps the number of concurrent sweep runs.
pub const WORKERS_ENV: &str = "SWLAB_WORKERS";

/// Resolved config plus the pieces every command needs.
struct Ctx<'a> {
    cfg: &'a RunConfig,
    out: &'a Path,
    ps: ParamSet,
    summary: Map<String, Value>,
    warnings: Vec<Value>,
}

impl Ctx<'_> {
    fn put(&mut self, key: &str, value: impl serde::Serialize) {
        self.summary.insert(key.to_string(), json!(value));
    }

    fn warn(&mut self, w: Warning) {
        self.warnings.push(json!(w));
    }

    fn grid(&self) -> Result<Arc<RadialGrid>, CliError> {
        grid_of(self.cfg)
    }

    fn file(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }
}

fn grid_of(cfg: &RunConfig) -> Result<Arc<RadialGrid>, CliError> {
    let g = &cfg.grid;
    let (n, lo, hi, len) = match (g.n, g.r_min, g.r_max, g.nodes) {
        (Some(n), Some(lo), Some(hi), Some(len)) => (n.0 as usize, lo.0, hi.0, len.0 as usize),
        _ => return Err(CliError::Config("grid is not resolved".into())),
    };
    Ok(RadialGrid::new(n, lo, hi, len)?)
}

fn need(value: Option<f64>, key: &'static str) -> Result<f64, CliError> {
    value.ok_or(CliError::Core(Error::MissingFields(vec![key])))
}

/// The input profile on `grid`. Files are read on the run grid only, so a
/// refined rerun needs a built-in profile.
fn build_profile(cfg: &RunConfig, grid: &Arc<RadialGrid>) -> Result<RadialFunction, CliError> {
    if let Some(path) = &cfg.io.input {
        return read_profile(path, grid);
    }
    Ok(match cfg.profile.clone().unwrap_or_default() {
        Profile::HeatKernel { t } => corpus::heat_kernel_profile(grid, t.0),
        Profile::PowerGaussian { a } => RadialFunction::from_fn(grid, |r| r.powf(a.0) * (-r * r).exp())?,
        Profile::SlowDecay => corpus::slow_decay_profile(grid),
        Profile::ConformalExtremal { s } => extremal::conformal_extremal(grid, s.0)?,
    })
}

/// Whether a refined rerun can rebuild the input.
fn refinable(cfg: &RunConfig) -> bool {
    cfg.solver.refine == Some(true) && cfg.io.input.is_none()
}

/// Resolves `cfg`, runs it into `out` and writes the summary.
pub fn run(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let mut resolved = cfg.clone().resolve()?;
    resolved.io.out = Some(out.to_path_buf());
    fs::create_dir_all(out)?;
    fs::write(out.join("config.json"), resolved.to_json())?;
    let mut ctx = Ctx {
        cfg: &resolved,
        out,
        ps: resolved.params.to_param_set(),
        summary: Map::new(),
        warnings: Vec::new(),
    };
    ctx.put("command", resolved.command);
    let result = dispatch(&mut ctx);
    let (status, code, error) = match &result {
        Ok(()) => ("ok", EXIT_OK, None),
        Err(e) => ("error", e.exit_code(), Some(e.to_string())),
    };
    let mut summary = Map::new();
    summary.insert("status".into(), json!(status));
    summary.insert("exit_code".into(), json!(code));
    if let Some(e) = error {
        summary.insert("error".into(), json!(e));
    }
    summary.extend(ctx.summary);
    summary.insert("warnings".into(), Value::Array(ctx.warnings));
    write_json(&out.join("summary.json"), &summary)?;
    result
}

fn dispatch(ctx: &mut Ctx) -> Result<(), CliError> {
    match ctx.cfg.command {
        Command::Validate => validate(ctx),
        Command::Riesz => riesz(ctx),
        Command::Heat => heat(ctx),
        Command::Besov => besov(ctx),
        Command::Verify => verify_cmd(ctx),
        Command::Maximize => maximize(ctx),
        Command::Sweep => sweep(ctx),
    }
}

fn validator(theorem: Theorem, ps: &ParamSet, mode: MaximizerMode) -> swlab_core::Result<ValidationReport> {
    match theorem {
        Theorem::SteinWeiss => params::validate_stein_weiss(ps),
        Theorem::Improved => params::validate_improved(ps),
        Theorem::Ckn => params::validate_ckn(ps),
        Theorem::CknImproved => params::validate_ckn_improved(ps),
        Theorem::CompactEmbedding => params::validate_compact_embedding(ps),
        Theorem::PseudoPoincare => params::validate_pseudo_poincare(ps),
        Theorem::BesovEmbedding => params::validate_besov_embedding(ps),
        Theorem::Maximizer => params::validate_maximizer_mode(ps, mode),
    }
}

fn validate(ctx: &mut Ctx) -> Result<(), CliError> {
    let theorem = ctx.cfg.theorem.expect("resolved");
    let mode = ctx.cfg.solver.mode.unwrap_or_default();
    let report = validator(theorem, &ctx.ps, mode)?;
    write_json(&ctx.file("report.json"), &report)?;
    ctx.put("theorem", theorem);
    ctx.put("passed", report.passed());
    ctx.put("failed", report.failed_conditions());
    report.into_result()?;
    Ok(())
}

fn riesz(ctx: &mut Ctx) -> Result<(), CliError> {
    let s = need(ctx.ps.s, "s")?;
    let grid = ctx.grid()?;
    let f = build_profile(ctx.cfg, &grid)?;
    let method = ctx.cfg.method.expect("resolved");
    let u = match method {
        RieszMethod::Direct => {
            let (u, w) = RieszOperator::new(&grid, s)?.apply_checked(&f)?;
            if let Some(w) = w {
                ctx.warn(w);
            }
            u
        }
        RieszMethod::Heat => riesz_apply_heat(&HeatSemigroup::new(grid.dim())?, &f, s, RieszTimes::default())?,
    };
    write_profile(&ctx.file("potential.csv"), &u)?;
    ctx.put("method", method);
    ctx.put("s", s);
    ctx.put("sup", u.sup_abs());
    Ok(())
}

fn heat(ctx: &mut Ctx) -> Result<(), CliError> {
    let ps = ctx.ps;
    let hc = ctx.cfg.heat.clone().expect("resolved");
    let params = DecayParams {
        p: need(ps.p, "p")?,
        q: ps.q.unwrap_or(f64::INFINITY),
        alpha: ps.alpha.unwrap_or(0.0),
        beta: ps.beta.unwrap_or(0.0),
        order: hc.order.map_or(0, |o| o.0.min(u8::MAX as u64) as u8),
    };
    let t = ctx.cfg.solver.t_grid.expect("resolved");
    let times = TimeGrid::log_spaced(t.lo.0, t.hi.0, t.count.0 as usize)?;
    let grid = ctx.grid()?;
    let semigroup = HeatSemigroup::new(grid.dim())?;
    let f = build_profile(ctx.cfg, &grid)?;
    let report = semigroup.heat_decay_report(&f, &params, &times)?;
    write_csv(
        &ctx.file("decay.csv"),
        ["t", "C_of_t"],
        report.rows.iter().map(|r| [fmt(r.t), fmt(r.c_of_t)]),
    )?;
    for w in &report.warnings {
        ctx.warn(*w);
    }
    let endpoint = report.argmax_t == times.first() || report.argmax_t == times.last();
    if endpoint && !report.rows.is_empty() {
        ctx.warn(Warning::EndpointSupremum { t: report.argmax_t });
    }
    ctx.put("decay_params", params);
    ctx.put("exponent", params.exponent(grid.dim()));
    ctx.put("sup", report.sup);
    ctx.put("argmax_t", report.argmax_t);
    let refinement = if refinable(ctx.cfg) {
        let cfg = ctx.cfg;
        Some(verify::refinement_delta(&grid, |g| {
            let f = build_profile(cfg, g).map_err(|e| Error::Numerical(e.to_string()))?;
            Ok(semigroup.heat_decay_report(&f, &params, &times)?.sup)
        })?)
    } else {
        None
    };
    ctx.put("refinement_delta", refinement);
    if let Some(delta) = ps.delta {
        let k = ctx.cfg.solver.k_grid.expect("resolved");
        let tail_t = hc.tail_time.map_or(1.0, |t| t.0);
        let tail = semigroup.tail_decay_report(&f, tail_t, params.alpha, params.p, delta, &k.values())?;
        write_csv(
            &ctx.file("tail.csv"),
            ["k", "tail_sup"],
            tail.rows.iter().map(|r| [fmt(r.k), fmt(r.tail_sup)]),
        )?;
        for w in &tail.warnings {
            ctx.warn(*w);
        }
        ctx.put("tail_time", tail_t);
        ctx.put("tail_slope", tail.slope);
    }
    Ok(())
}

fn besov(ctx: &mut Ctx) -> Result<(), CliError> {
    let delta = need(ctx.ps.delta, "delta")?;
    let t = ctx.cfg.solver.t_grid.expect("resolved");
    let times = TimeGrid::log_spaced(t.lo.0, t.hi.0, t.count.0 as usize)?;
    let grid = ctx.grid()?;
    let f = build_profile(ctx.cfg, &grid)?;
    let b = HeatSemigroup::new(grid.dim())?.besov_norm(&f, delta, &times)?;
    write_json(&ctx.file("besov.json"), &b)?;
    if let Some(w) = b.warning() {
        ctx.warn(w);
    }
    ctx.put("value", b.value);
    ctx.put("argmax_t", b.argmax_t);
    ctx.put("endpoint_flag", b.endpoint_flag);
    Ok(())
}

fn verify_options(cfg: &RunConfig) -> Result<VerifyOptions, CliError> {
    let t = cfg.solver.t_grid.expect("resolved");
    Ok(VerifyOptions {
        besov_times: TimeGrid::log_spaced(t.lo.0, t.hi.0, t.count.0 as usize)?,
        ..VerifyOptions::default()
    })
}

/// The ratio table of a corpus verifier on `grid`, plus verifier-specific flags.
fn corpus_table(
    which: Verifier,
    grid: &Arc<RadialGrid>,
    seed: u64,
    ps: &ParamSet,
    opts: &VerifyOptions,
) -> swlab_core::Result<(RatioTable, Map<String, Value>)> {
    let corpus = Corpus::new(grid, seed)?;
    let mut flags = Map::new();
    let table = match which {
        Verifier::SteinWeiss => verify::verify_stein_weiss(&corpus, ps)?,
        Verifier::Improved => {
            let t = verify::verify_improved(&corpus, ps, opts)?;
            flags.insert("besov".into(), json!(t.besov));
            flags.insert("pointwise".into(), json!(t.pointwise));
            t.table
        }
        Verifier::CknImproved => verify::verify_ckn_improved(&corpus, ps, opts)?,
        Verifier::EmbeddingBesov => verify::verify_embedding_besov(&corpus, ps, opts)?,
        Verifier::PseudoPoincare => unreachable!("not a corpus verifier"),
    };
    Ok((table, flags))
}

fn verify_cmd(ctx: &mut Ctx) -> Result<(), CliError> {
    let which = ctx.cfg.verifier.expect("resolved");
    let grid = ctx.grid()?;
    ctx.put("verifier", which);
    ctx.put("params", ctx.ps);
    if which == Verifier::PseudoPoincare {
        let f = build_profile(ctx.cfg, &grid)?;
        let trunc = ctx.cfg.solver.trunc_grid.expect("resolved").values();
        let rep = verify::verify_pseudo_poincare(&f, &ctx.ps, &trunc)?;
        write_csv(
            &ctx.file("pseudo_poincare.csv"),
            ["t", "norm", "fit_slope"],
            rep.rows.iter().map(|r| [fmt(r.t), fmt(r.norm), fmt(rep.slope)]),
        )?;
        ctx.put("constant", rep.slope);
        ctx.put("refinement_delta", Value::Null);
        ctx.put("flags", json!({"delta": rep.delta, "holds": rep.holds, "steeper": rep.steeper}));
        return Ok(());
    }
    let seed = ctx.cfg.solver.seed.expect("resolved").0;
    let opts = verify_options(ctx.cfg)?;
    let (table, flags) = corpus_table(which, &grid, seed, &ctx.ps, &opts)?;
    write_csv(
        &ctx.file("ratios.csv"),
        ["member_id", "family", "ratio"],
        table
            .rows
            .iter()
            .map(|r| [r.member_id.to_string(), r.family.to_string(), fmt(r.ratio)]),
    )?;
    for w in &table.warnings {
        ctx.warnings.push(json!({"member_id": w.member_id, "warning": w.warning}));
    }
    let refinement = if ctx.cfg.solver.refine == Some(true) {
        let ps = ctx.ps;
        Some(verify::refinement_delta(&grid, |g| Ok(corpus_table(which, g, seed, &ps, &opts)?.0.constant))?)
    } else {
        None
    };
    ctx.put("constant", table.constant);
    ctx.put("spread", table.spread());
    ctx.put("refinement_delta", refinement);
    ctx.put("flags", flags);
    Ok(())
}

fn maximize(ctx: &mut Ctx) -> Result<(), CliError> {
    let sv = &ctx.cfg.solver;
    let opts = SolverOptions {
        max_iter: sv.max_iter.expect("resolved").0 as usize,
        tol: sv.tol.expect("resolved").0,
        mode: sv.mode.expect("resolved"),
        recenter: true,
    };
    let mut ps = ctx.ps;
    if opts.mode == MaximizerMode::NormEstimate {
        ps.p.get_or_insert(2.0);
        ps.r.get_or_insert(2.0);
    }
    let grid = ctx.grid()?;
    let f0 = build_profile(ctx.cfg, &grid)?;
    let run = extremal::power_iterate(&ps, &f0, &opts)?;
    write_csv(
        &ctx.file("trace.csv"),
        ["iter", "S_k", "t_k"],
        run.objective_trace
            .iter()
            .zip(&run.rescale_trace)
            .enumerate()
            .map(|(k, (s, t))| [k.to_string(), fmt(*s), fmt(*t)]),
    )?;
    write_profile(&ctx.file("extremal.csv"), &run.final_profile)?;
    for w in &run.warnings {
        ctx.warn(*w);
    }
    ctx.put("S_estimate", run.s_estimate);
    ctx.put("converged", run.converged);
    ctx.put("iterations", run.iterations);
    ctx.put("declined_shifts", run.declined_shifts);
    ctx.put("profile_change", run.profile_change);
    let refinement = if refinable(ctx.cfg) && run.converged {
        let cfg = ctx.cfg;
        let s0 = run.s_estimate;
        let fine = grid.refined();
        let f1 = build_profile(cfg, &fine)?;
        let s1 = extremal::power_iterate(&ps, &f1, &opts)?.s_estimate;
        Some((s1 - s0).abs() / s0)
    } else {
        None
    };
    ctx.put("refinement_delta", refinement);
    let (n, s) = (grid.dim() as f64, need(ps.s, "s")?);
    let conformal = ps.alpha == Some(0.0) && ps.gamma == Some(0.0) && ps.r == Some(2.0 * n / (n - 2.0 * s));
    if conformal {
        let anchor = extremal::known_extremal_quotient(&grid, s)?;
        ctx.put("anchor", json!({"value": anchor, "ratio": run.s_estimate / anchor}));
    }
    if opts.mode == MaximizerMode::NormEstimate {
        let oracle = extremal::mellin_oracle(&ps, &grid)?;
        ctx.put(
            "oracle",
            json!({"value": oracle.value, "tau_star": oracle.tau_star, "ratio": run.s_estimate / oracle.value}),
        );
    }
    if !run.converged {
        return Err(CliError::NotConverged {
            iterations: run.iterations,
        });
    }
    Ok(())
}

/// Worker count for sweeps: `SWLAB_WORKERS` if set, else the core count.
pub fn worker_limit() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&w| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn sweep(ctx: &mut Ctx) -> Result<(), CliError> {
    let runs = &ctx.cfg.runs;
    let dirs: Vec<String> = runs
        .iter()
        .enumerate()
        .map(|(i, r)| format!("{i:03}-{}", r.command.name()))
        .collect();
    let codes = Mutex::new(vec![EXIT_OK; runs.len()]);
    let next = AtomicUsize::new(0);
    let workers = worker_limit().min(runs.len());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= runs.len() {
                    break;
                }
                let code = match run(&runs[i], &ctx.out.join(&dirs[i])) {
                    Ok(()) => EXIT_OK,
                    Err(e) => e.exit_code(),
                };
                codes.lock().expect("no poisoned lock")[i] = code;
            });
        }
    });
    let codes = codes.into_inner().expect("no poisoned lock");
    write_csv(
        &ctx.file("sweep.csv"),
        ["index", "command", "dir", "exit_code"],
        runs.iter()
            .zip(&dirs)
            .zip(&codes)
            .enumerate()
            .map(|(i, ((r, d), c))| [i.to_string(), r.command.name().to_string(), d.clone(), c.to_string()]),
    )?;
    ctx.put("runs", runs.len());
    ctx.put("workers", workers);
    let failed = codes.iter().filter(|&&c| c != EXIT_OK).count();
    ctx.put("failed", failed);
    if failed > 0 {
        let exit_code = codes.iter().copied().max().unwrap_or(EXIT_OK);
        return Err(CliError::SweepFailed { failed, exit_code });
    }
    Ok(())
}
