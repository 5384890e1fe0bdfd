//! Subcommand implementations and the shared run harness.
//!
//! Every command resolves its parameters (flag > config file > default),
//! computes, writes its results under the output directory, and finishes by
//! dropping a `manifest.json` describing the run. A run that completes but
//! surfaces something noteworthy — disagreeing constants, an exhausted
//! budget, an angle collision — exits with code 3 and still writes all
//! outputs.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use num::complex::Complex64;
use serde_json::{json, Value};

use wlab::density::DensityError;
use wlab::sieve::{cache_entries, clear_cache, CacheError};
use wlab::{
    approximate_angle, canonical_g, compute_g, euler_product, grid_diagnostic, growth_fit,
    injectivity_scan, liouville, partial_sum, phase_scale, sector_density, summatory_checkpoints,
    theta_certified, theta_float, verify_construction, w_value, witness_factorization,
    witness_tail_deficit, zeta_ratio_ref, ConstructionStatus, GMethod, Level, SieveTable,
    StageChoice, TailTable,
};

use crate::config::{config_hash, parse_level, pick, pick_opt, FileConfig};
use crate::output::{
    write_atomic_with, write_json, CliError, ManifestConstant, RunManifest,
};
use crate::{CacheAction, Cli, Command};

const DEFAULT_EPSILON: f64 = 1e-3;
const DEFAULT_BUDGET: u64 = 1_000_000;
const DEFAULT_EULER_DEPTH: u32 = 40;

/// What a finished command hands back to the harness.
struct Outcome {
    /// Effective parameters, recorded in the manifest and hashed.
    params: BTreeMap<String, Value>,
    /// Files written, relative to the output directory.
    outputs: Vec<String>,
    sieve_limit: Option<u64>,
    /// A completed-but-noteworthy result; reported and mapped to exit 3.
    finding: Option<String>,
}

impl Outcome {
    fn new() -> Self {
        Self {
            params: BTreeMap::new(),
            outputs: Vec::new(),
            sieve_limit: None,
            finding: None,
        }
    }

    fn param(&mut self, key: &str, value: impl Into<Value>) {
        self.params.insert(key.to_string(), value.into());
    }
}

/// Shared context handed to each command.
struct Ctx {
    out_dir: PathBuf,
    cache_dir: Option<PathBuf>,
    cfg: FileConfig,
}

impl Ctx {
    /// Factor table for `1..=limit`, via the cache directory when one is
    /// configured. A corrupt cache file is an error, never silently rebuilt.
    fn sieve(&self, limit: u64) -> Result<SieveTable, CliError> {
        match &self.cache_dir {
            Some(dir) => wlab::sieve::load_or_build(limit, dir).map_err(cache_err),
            None => SieveTable::build(limit).map_err(|e| CliError::validation(e.to_string())),
        }
    }
}

fn cache_err(e: CacheError) -> CliError {
    match e {
        CacheError::Sieve(inner) => CliError::validation(inner.to_string()),
        other => CliError::io(other.to_string()),
    }
}

fn validation(e: impl std::fmt::Display) -> CliError {
    CliError::validation(e.to_string())
}

fn complex_json(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im, "modulus": z.norm() })
}

pub fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let started = Instant::now();
    let cfg = FileConfig::load(cli.config.as_deref())?;
    let out_dir = pick(
        cli.out_dir.clone(),
        cfg.out_dir.clone(),
        PathBuf::from("wlab-out"),
    );
    let cache_dir = pick_opt(cli.cache_dir.clone(), cfg.cache_dir.clone())
        .or_else(|| std::env::var_os("WLAB_CACHE_DIR").map(PathBuf::from));
    let seed = pick(cli.seed, cfg.seed, 0);
    let ctx = Ctx {
        out_dir,
        cache_dir,
        cfg,
    };

    let (name, outcome) = match &cli.command {
        Command::Constants {
            precision,
            direct_precision,
        } => ("constants", constants(&ctx, *precision, *direct_precision)?),
        Command::Wvalues { n_max, level } => ("wvalues", wvalues(&ctx, *n_max, level.clone())?),
        Command::Density {
            x,
            epsilon,
            budget,
            witness_parity,
            witness_scale,
        } => (
            "density",
            density(&ctx, *x, *epsilon, *budget, *witness_parity, *witness_scale)?,
        ),
        Command::Sector {
            x,
            y,
            n_max,
            level,
        } => ("sector", sector(&ctx, *x, *y, *n_max, level.clone())?),
        Command::Series {
            sigma,
            t,
            n_max,
            level,
            euler_cutoff,
            euler_depth,
        } => (
            "series",
            series(
                &ctx,
                *sigma,
                *t,
                *n_max,
                level.clone(),
                *euler_cutoff,
                *euler_depth,
            )?,
        ),
        Command::Growth { n_max, level } => ("growth", growth(&ctx, *n_max, level.clone())?),
        Command::Grid {
            alpha,
            n_max,
            level,
        } => ("grid", grid(&ctx, *alpha, *n_max, level.clone())?),
        Command::Inject { n_max } => ("inject", inject(&ctx, *n_max)?),
        Command::Cache { action } => ("cache", cache(&ctx, action)?),
    };

    // Hash the effective run identity: command, seed, and every resolved
    // parameter — but not the directories, so the same logical run hashes
    // the same wherever its files land.
    let mut hash_input = BTreeMap::new();
    hash_input.insert("command".to_string(), name.to_string());
    hash_input.insert("seed".to_string(), seed.to_string());
    for (k, v) in &outcome.params {
        hash_input.insert(k.clone(), v.to_string());
    }

    let g = compute_g(GMethod::MoebiusLogZeta, 1e-12).map_err(validation)?;
    let manifest = RunManifest {
        command: name.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: config_hash(&hash_input),
        parameters: outcome.params,
        prime_square_constant: ManifestConstant {
            value: g.value,
            error_bound: g.error_bound,
            method: "moebius-log-zeta".to_string(),
        },
        sieve_limit: outcome.sieve_limit,
        seed,
        wall_time_ms: started.elapsed().as_millis() as u64,
        outputs: outcome.outputs,
        finding: outcome.finding.clone(),
    };
    write_json(&ctx.out_dir, "manifest.json", &manifest)?;

    if let Some(finding) = &outcome.finding {
        println!("finding: {finding}");
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// constants
// ---------------------------------------------------------------------------

fn constants(
    ctx: &Ctx,
    precision: Option<f64>,
    direct_precision: Option<f64>,
) -> Result<Outcome, CliError> {
    let mlz_target = precision.unwrap_or(1e-12);
    let direct_target = direct_precision.unwrap_or(1e-7);
    let mut out = Outcome::new();
    out.param("precision", mlz_target);
    out.param("direct_precision", direct_target);

    let mlz = compute_g(GMethod::MoebiusLogZeta, mlz_target).map_err(validation)?;
    let direct = compute_g(GMethod::DirectTail, direct_target).map_err(validation)?;
    let gap = (mlz.value - direct.value).abs();
    let agree = gap <= mlz.error_bound + direct.error_bound;

    let report = json!({
        "moebius_log_zeta": { "value": mlz.value, "error_bound": mlz.error_bound },
        "direct_tail": { "value": direct.value, "error_bound": direct.error_bound },
        "gap": gap,
        "agree": agree,
        "canonical": canonical_g(),
        "phase_scale": phase_scale(),
    });
    write_json(&ctx.out_dir, "constants.json", &report)?;
    out.outputs.push("constants.json".to_string());

    println!(
        "G = {:.15} (log-zeta route, bound {:.1e})",
        mlz.value, mlz.error_bound
    );
    println!(
        "G = {:.15} (direct-tail route, bound {:.1e}); gap {gap:.3e}",
        direct.value, direct.error_bound
    );
    if !agree {
        out.finding = Some(format!(
            "independent routes disagree: gap {gap:.3e} exceeds combined bound {:.3e}",
            mlz.error_bound + direct.error_bound
        ));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// wvalues
// ---------------------------------------------------------------------------

fn wvalues(ctx: &Ctx, n_max: Option<u64>, level: Option<String>) -> Result<Outcome, CliError> {
    let n_max = pick(n_max, ctx.cfg.n_max, 1000);
    let level_text = pick(level, ctx.cfg.level.clone(), "1".to_string());
    let level = parse_level(&level_text)?;
    let mut out = Outcome::new();
    out.param("n_max", n_max);
    out.param("level", level.to_string());

    let sieve = ctx.sieve(n_max)?;
    out.sieve_limit = Some(sieve.limit());
    let g = canonical_g();

    write_atomic_with(&ctx.out_dir, "wvalues.csv", |w| {
        writeln!(w, "n,lambda,omega,theta,w_re,w_im,w_lambda_re,w_lambda_im")?;
        for n in 1..=n_max {
            let f = sieve
                .factorize(n)
                .expect("n stays within the sieve by construction");
            let lam = liouville(&f);
            let omega = f.omega_total();
            let theta = theta_float(&f, level, g);
            let wv = w_value(&f, level);
            let wl = w_value(&f, Level::Lambda);
            writeln!(
                w,
                "{n},{lam},{omega},{theta},{},{},{},{}",
                wv.re, wv.im, wl.re, wl.im
            )?;
        }
        Ok(())
    })?;
    out.outputs.push("wvalues.csv".to_string());
    println!("wrote {n_max} rows at level {level} to wvalues.csv");
    Ok(out)
}

// ---------------------------------------------------------------------------
// density
// ---------------------------------------------------------------------------

fn density(
    ctx: &Ctx,
    x: f64,
    epsilon: Option<f64>,
    budget: Option<u64>,
    witness_parity: Option<i8>,
    witness_scale: Option<u32>,
) -> Result<Outcome, CliError> {
    let epsilon = pick(epsilon, ctx.cfg.epsilon, DEFAULT_EPSILON);
    let budget = pick(budget, ctx.cfg.budget, DEFAULT_BUDGET);
    let mut out = Outcome::new();
    out.param("x", x);
    out.param("epsilon", epsilon);
    out.param("budget", budget);
    if let Some(p) = witness_parity {
        out.param("witness_parity", p);
        out.param("witness_scale", witness_scale.unwrap_or(1));
    }

    let table = TailTable::build(budget).map_err(validation)?;
    let construction = approximate_angle(x, epsilon, &table).map_err(validation)?;
    let verify = verify_construction(&construction, &table);

    let status_text = match construction.status {
        ConstructionStatus::Converged => "converged",
        ConstructionStatus::BudgetExhausted => "budget-exhausted",
    };
    if construction.status == ConstructionStatus::BudgetExhausted {
        out.finding = Some(format!(
            "budget of {budget} primes exhausted at |x - S| = {:.3e} (target window {epsilon:.1e})",
            (x - construction.achieved).abs()
        ));
    } else if !verify.ok {
        out.finding = Some(format!(
            "independent re-summation disagrees with the run (gap {:.3e})",
            verify.accumulator_gap
        ));
    }

    let stages: Vec<Value> = construction
        .log
        .iter()
        .map(|rec| {
            let choice = match rec.choice {
                StageChoice::Segment { b, t } => json!({
                    "kind": "segment",
                    "first_index": b,
                    "last_index": t,
                    "first_prime": table.prime(b),
                    "last_prime": table.prime(t),
                    "count": t - b + 1,
                }),
                StageChoice::Power { p, k } => json!({
                    "kind": "power", "prime": p, "exponent": k,
                }),
            };
            json!({
                "stage": rec.stage,
                "deficit": rec.deficit,
                "choice": choice,
                "sum_after": rec.s_after,
                "error_after": rec.eps_after,
            })
        })
        .collect();

    let segments: Vec<Value> = construction
        .segments
        .iter()
        .map(|&(b, t)| {
            json!({
                "first_index": b,
                "last_index": t,
                "first_prime": table.prime(b),
                "last_prime": table.prime(t),
                "count": t - b + 1,
            })
        })
        .collect();

    let witness_json = match witness_parity {
        Some(parity) if construction.converged() => {
            let k = witness_scale.unwrap_or(1);
            match witness_factorization(&construction, parity, k, &table) {
                Ok(w) => {
                    let (theta, theta_err) = theta_certified(&w.factorization, Level::Finite(1));
                    let factors = w.factorization.factors();
                    let preview: Vec<Value> = factors
                        .iter()
                        .take(20)
                        .map(|&(p, e)| json!([p, e]))
                        .collect();
                    Some(json!({
                        "parity": parity,
                        "exponent_scale": w.exponent_scale,
                        "scaled_prime_count": w.scaled_primes.len(),
                        "dagger_prime": w.dagger_prime,
                        "auxiliary_prime": w.auxiliary_prime,
                        "dagger_perturbation": w.dagger_perturbation,
                        "tail_deficit_bound": witness_tail_deficit(&w.scaled_primes, k),
                        "factor_count": factors.len(),
                        "factors_preview": preview,
                        "theta": theta,
                        "theta_error_bound": theta_err,
                    }))
                }
                Err(DensityError::NoAuxiliaryPrime) => {
                    out.finding = Some(
                        "no auxiliary prime fits the window within the budget; \
                         raise the budget to build a witness"
                            .to_string(),
                    );
                    None
                }
                Err(e) => return Err(validation(e)),
            }
        }
        _ => None,
    };

    let report = json!({
        "target": x,
        "epsilon": epsilon,
        "budget": budget,
        "status": status_text,
        "achieved": construction.achieved,
        "error": (x - construction.achieved).abs(),
        "segment_prime_count": construction.segment_prime_count(),
        "segments": segments,
        "special_powers": construction
            .special_powers
            .iter()
            .map(|&(p, k)| json!([p, k]))
            .collect::<Vec<_>>(),
        "stages": stages,
        "verification": {
            "disjoint": verify.disjoint,
            "recomputed": verify.recomputed,
            "accumulator_gap": verify.accumulator_gap,
            "within_epsilon": verify.within_epsilon,
            "ok": verify.ok,
        },
        "witness": witness_json,
    });
    write_json(&ctx.out_dir, "density.json", &report)?;
    out.outputs.push("density.json".to_string());

    println!(
        "{status_text}: S = {:.12} vs x = {x} (error {:.3e}) in {} stages, {} segment primes",
        construction.achieved,
        (x - construction.achieved).abs(),
        construction.log.len(),
        construction.segment_prime_count()
    );
    Ok(out)
}

// ---------------------------------------------------------------------------
// sector
// ---------------------------------------------------------------------------

fn sector(
    ctx: &Ctx,
    x: f64,
    y: f64,
    n_max: Option<u64>,
    level: Option<String>,
) -> Result<Outcome, CliError> {
    let n_max = pick(n_max, ctx.cfg.n_max, 100_000);
    let level_text = pick(level, ctx.cfg.level.clone(), "1".to_string());
    let level = parse_level(&level_text)?;
    let mut out = Outcome::new();
    out.param("x", x);
    out.param("y", y);
    out.param("n_max", n_max);
    out.param("level", level.to_string());

    let sieve = ctx.sieve(n_max)?;
    out.sieve_limit = Some(sieve.limit());
    let report = sector_density(x, y, n_max, level, &sieve).map_err(validation)?;

    let delta_gap = (report.delta_a() - report.delta_b()).abs();
    write_json(
        &ctx.out_dir,
        "sector.json",
        &json!({
            "x": x,
            "y": y,
            "level": level.to_string(),
            "n_max": n_max,
            "count_a": report.count_a,
            "count_b": report.count_b,
            "delta_a": report.delta_a(),
            "delta_b": report.delta_b(),
            "delta_gap": delta_gap,
            "boundary_escalations": report.boundary_escalations,
        }),
    )?;
    out.outputs.push("sector.json".to_string());

    println!(
        "sector ({x}, {y}) at level {level}: delta_A = {:.6}, delta_B = {:.6}, gap {:.2e} ({} boundary escalations)",
        report.delta_a(),
        report.delta_b(),
        delta_gap,
        report.boundary_escalations
    );
    Ok(out)
}

// ---------------------------------------------------------------------------
// series
// ---------------------------------------------------------------------------

#[allow(clippy::too_many_arguments)]
fn series(
    ctx: &Ctx,
    sigma: f64,
    t: Option<f64>,
    n_max: Option<u64>,
    level: Option<String>,
    euler_cutoff: Option<u64>,
    euler_depth: Option<u32>,
) -> Result<Outcome, CliError> {
    let t = t.unwrap_or(0.0);
    let n_max = pick(n_max, ctx.cfg.n_max, 100_000);
    let level_text = pick(level, ctx.cfg.level.clone(), "lambda".to_string());
    let level = parse_level(&level_text)?;
    let euler_cutoff = pick_opt(euler_cutoff, ctx.cfg.euler_cutoff);
    let euler_depth = pick(euler_depth, ctx.cfg.euler_depth, DEFAULT_EULER_DEPTH);

    let mut out = Outcome::new();
    out.param("sigma", sigma);
    out.param("t", t);
    out.param("n_max", n_max);
    out.param("level", level.to_string());
    if let Some(cutoff) = euler_cutoff {
        out.param("euler_cutoff", cutoff);
        out.param("euler_depth", euler_depth);
    }

    let s = Complex64::new(sigma, t);
    let sieve = ctx.sieve(n_max)?;
    out.sieve_limit = Some(sieve.limit());
    let partial = partial_sum(s, n_max, level, &sieve).map_err(validation)?;

    // The closed form zeta(2s)/zeta(s) is the limit of the parity-only
    // series; report the comparison when that is what was summed.
    let reference = if level == Level::Lambda && sigma > 1.0 {
        let reference = zeta_ratio_ref(s);
        Some((reference, (partial - reference).norm()))
    } else {
        None
    };

    let euler = match euler_cutoff {
        Some(cutoff) => {
            let prod = euler_product(s, level, cutoff, euler_depth).map_err(validation)?;
            Some(json!({
                "value": complex_json(prod.value),
                "depth_truncation_estimate": prod.depth_truncation,
                "prime_cutoff": prod.prime_cutoff,
                "depth": prod.depth,
                "gap_to_partial": (prod.value - partial).norm(),
            }))
        }
        None => None,
    };

    write_json(
        &ctx.out_dir,
        "series.json",
        &json!({
            "s": { "sigma": sigma, "t": t },
            "level": level.to_string(),
            "n_max": n_max,
            "partial_sum": complex_json(partial),
            "reference": reference.map(|(z, gap)| json!({
                "value": complex_json(z),
                "gap_to_partial": gap,
            })),
            "euler_product": euler,
        }),
    )?;
    out.outputs.push("series.json".to_string());

    println!(
        "sum over n <= {n_max} at s = {sigma} + {t}i, level {level}: {:.12} + {:.12}i",
        partial.re, partial.im
    );
    if let Some((reference, gap)) = reference {
        println!(
            "closed-form limit {:.12} + {:.12}i, gap {gap:.3e}",
            reference.re, reference.im
        );
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// growth
// ---------------------------------------------------------------------------

fn growth(ctx: &Ctx, n_max: Option<u64>, level: Option<String>) -> Result<Outcome, CliError> {
    let n_max = pick(n_max, ctx.cfg.n_max, 1_000_000);
    let level_text = pick(level, ctx.cfg.level.clone(), "lambda".to_string());
    let level = parse_level(&level_text)?;
    let mut out = Outcome::new();
    out.param("n_max", n_max);
    out.param("level", level.to_string());

    let sieve = ctx.sieve(n_max)?;
    out.sieve_limit = Some(sieve.limit());
    let checkpoints = summatory_checkpoints(n_max, level, &sieve).map_err(validation)?;

    write_atomic_with(&ctx.out_dir, "growth.csv", |w| {
        writeln!(w, "n,sum_re,sum_im,modulus")?;
        for cp in &checkpoints {
            writeln!(
                w,
                "{},{:.16e},{:.16e},{:.16e}",
                cp.n,
                cp.sum.re,
                cp.sum.im,
                cp.sum.norm()
            )?;
        }
        Ok(())
    })?;
    out.outputs.push("growth.csv".to_string());

    let fit = growth_fit(&checkpoints);
    let last = checkpoints
        .last()
        .expect("schedule always contains n_max");
    write_json(
        &ctx.out_dir,
        "growth.json",
        &json!({
            "n_max": n_max,
            "level": level.to_string(),
            "checkpoints": checkpoints.len(),
            "final": { "n": last.n, "modulus": last.sum.norm() },
            "fit": fit.map(|f| json!({
                "alpha": f.alpha,
                "ln_c": f.ln_c,
                "points_used": f.points_used,
            })),
        }),
    )?;
    out.outputs.push("growth.json".to_string());

    match fit {
        Some(f) => println!(
            "|W(N)| ~ c N^alpha with alpha = {:.4} over {} checkpoints; |W({n_max})| = {:.3}",
            f.alpha,
            f.points_used,
            last.sum.norm()
        ),
        None => println!(
            "too few checkpoints with |W| >= 1 for a growth fit; |W({n_max})| = {:.3}",
            last.sum.norm()
        ),
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// grid
// ---------------------------------------------------------------------------

fn grid(
    ctx: &Ctx,
    alpha: f64,
    n_max: Option<u64>,
    level: Option<String>,
) -> Result<Outcome, CliError> {
    let n_max = pick(n_max, ctx.cfg.n_max, 100_000);
    let level_text = pick(level, ctx.cfg.level.clone(), "1".to_string());
    let level = parse_level(&level_text)?;
    let mut out = Outcome::new();
    out.param("alpha", alpha);
    out.param("n_max", n_max);
    out.param("level", level.to_string());

    let sieve = ctx.sieve(n_max)?;
    out.sieve_limit = Some(sieve.limit());
    let report = grid_diagnostic(n_max, alpha, level, &sieve).map_err(validation)?;

    write_json(
        &ctx.out_dir,
        "grid.json",
        &json!({
            "n_max": report.n_max,
            "alpha": report.alpha,
            "level": level.to_string(),
            "rows": report.rows,
            "cols": report.cols,
            "residual": report.residual,
            "max_column_modulus": report.max_column_modulus,
            "scaled_summatory": report.scaled_summatory,
            "column_moduli": report.column_moduli,
        }),
    )?;
    out.outputs.push("grid.json".to_string());

    println!(
        "grid {} x {} (residual {}): max column |sum| = {:.3} vs row count {}, scaled summatory {:.3e}",
        report.rows,
        report.cols,
        report.residual,
        report.max_column_modulus,
        report.rows,
        report.scaled_summatory
    );
    Ok(out)
}

// ---------------------------------------------------------------------------
// inject
// ---------------------------------------------------------------------------

fn inject(ctx: &Ctx, n_max: Option<u64>) -> Result<Outcome, CliError> {
    let n_max = pick(n_max, ctx.cfg.n_max, 100_000);
    let mut out = Outcome::new();
    out.param("n_max", n_max);

    let sieve = ctx.sieve(n_max)?;
    out.sieve_limit = Some(sieve.limit());
    let report = injectivity_scan(n_max, &sieve).map_err(validation)?;

    let groups: Vec<Value> = report
        .groups
        .iter()
        .map(|g| {
            json!({
                "parity_odd": g.angle.parity_odd(),
                "r": g.angle.r().to_string(),
                "ns": g.ns,
            })
        })
        .collect();
    write_json(
        &ctx.out_dir,
        "inject.json",
        &json!({
            "scanned": report.scanned,
            "injective": report.is_injective(),
            "duplicate_groups": groups,
        }),
    )?;
    out.outputs.push("inject.json".to_string());

    if report.is_injective() {
        println!(
            "all {} exact angles distinct (checked with exact rational arithmetic)",
            report.scanned
        );
    } else {
        out.finding = Some(format!(
            "{} angle collision group(s) found below {n_max} — see inject.json",
            report.groups.len()
        ));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// cache
// ---------------------------------------------------------------------------

fn cache(ctx: &Ctx, action: &CacheAction) -> Result<Outcome, CliError> {
    let mut out = Outcome::new();
    let dir = ctx.cache_dir.clone().ok_or_else(|| {
        CliError::validation(
            "no cache directory configured; pass --cache-dir, set cache_dir in the \
             config file, or export WLAB_CACHE_DIR",
        )
    })?;

    let report = match action {
        CacheAction::Build { limit } => {
            let limit = pick(*limit, ctx.cfg.n_max, 1_000_000);
            out.param("action", "build");
            out.param("limit", limit);
            let existed = cache_entries(&dir)
                .map_err(cache_err)?
                .iter()
                .any(|&(l, _)| l == limit);
            let table = wlab::sieve::load_or_build(limit, &dir).map_err(cache_err)?;
            out.sieve_limit = Some(table.limit());
            let bytes = cache_entries(&dir)
                .map_err(cache_err)?
                .iter()
                .find(|&&(l, _)| l == limit)
                .map(|&(_, b)| b)
                .unwrap_or(0);
            println!(
                "{} factor table for 1..={limit} ({bytes} bytes) in {}",
                if existed { "loaded" } else { "built" },
                dir.display()
            );
            json!({
                "action": "build",
                "dir": dir.display().to_string(),
                "limit": limit,
                "bytes": bytes,
                "already_cached": existed,
            })
        }
        CacheAction::List => {
            out.param("action", "list");
            let entries = cache_entries(&dir).map_err(cache_err)?;
            for &(limit, bytes) in &entries {
                println!("limit {limit}: {bytes} bytes");
            }
            if entries.is_empty() {
                println!("cache at {} is empty", dir.display());
            }
            json!({
                "action": "list",
                "dir": dir.display().to_string(),
                "entries": entries
                    .iter()
                    .map(|&(limit, bytes)| json!({ "limit": limit, "bytes": bytes }))
                    .collect::<Vec<_>>(),
            })
        }
        CacheAction::Clear => {
            out.param("action", "clear");
            let removed = clear_cache(&dir).map_err(cache_err)?;
            println!("removed {removed} cached table(s) from {}", dir.display());
            json!({
                "action": "clear",
                "dir": dir.display().to_string(),
                "removed": removed,
            })
        }
    };

    write_json(&ctx.out_dir, "cache.json", &report)?;
    out.outputs.push("cache.json".to_string());
    Ok(out)
}
