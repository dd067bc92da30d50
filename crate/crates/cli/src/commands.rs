use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use redheffer::constants::{log_tail_limit, DOUBLE_SUM_GUARD};
use redheffer::operators::DETERMINANT_GUARD;
use redheffer::spectral::similarity_statistic_with;
use redheffer::summation::dot;
use redheffer::{
    cache, candidate_vector, compute_alpha, double_gcd_sum_unweighted, double_gcd_sum_weighted,
    exact_determinant, extrapolate, mertens, power_iteration, prime_vs_composite_profile,
    record_indices, sieve_tables, sum_cd_squared, tail_record_indices, DivisorTables, GcdConstants,
    RedhefferOperator, NORM_DENSITY,
};

use crate::args::{Cli, Command, Format, GlobalOpts};

/// Failure classes, each with its own exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Guard(String),
    Other(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) | Failure::Other(_) => 1,
            Failure::Guard(_) => 2,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "{m}"),
            Failure::Guard(m) => write!(f, "{m}"),
            Failure::Other(e) => write!(f, "{e:#}"),
        }
    }
}

impl From<redheffer::Error> for Failure {
    fn from(e: redheffer::Error) -> Self {
        match e {
            redheffer::Error::SizeGuard { .. } => Failure::Guard(e.to_string()),
            redheffer::Error::InvalidArgument(_) | redheffer::Error::DimensionMismatch { .. } => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Other(other.into()),
        }
    }
}

pub enum Artifact {
    Csv(String),
    Json(Value),
}

pub struct Outcome {
    pub artifact: Artifact,
    /// Power iteration hit `max_iter`; the artifact is still written.
    pub not_converged: bool,
}

type Run<T> = Result<T, Failure>;

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// 17 significant digits, enough to round-trip any f64.
fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn envelope(cli_command: &Command, global: &GlobalOpts, result: impl Serialize) -> Value {
    json!({
        "artifact_version": env!("CARGO_PKG_VERSION"),
        "command": cli_command.name(),
        "config": {
            "args": cli_command,
            "threads": global.threads,
            "force": global.force,
        },
        "result": result,
    })
}

pub fn cache_dir(global: &GlobalOpts) -> Option<PathBuf> {
    if global.no_cache {
        return None;
    }
    Some(
        global
            .cache_dir
            .clone()
            .unwrap_or_else(|| std::env::temp_dir().join("redheffer-cache")),
    )
}

fn tables(n: usize, global: &GlobalOpts) -> Run<DivisorTables> {
    if n == 0 {
        return Err(Failure::Usage("n must be at least 1".into()));
    }
    match cache_dir(global) {
        Some(dir) => {
            let (t, outcome) = cache::load_or_build(&dir, n)?;
            log::info!("sieve tables for n = {n}: {outcome:?} ({})", dir.display());
            Ok(t)
        }
        None => Ok(sieve_tables(n)?),
    }
}

fn guard_double_sum(cutoff: usize, global: &GlobalOpts) -> Run<()> {
    if cutoff > DOUBLE_SUM_GUARD && !global.force {
        return Err(Failure::Guard(format!(
            "double gcd sum at cutoff {cutoff} exceeds the guard of {DOUBLE_SUM_GUARD} (pass --force to override)"
        )));
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Run<Outcome> {
    let format = cli.global.format.unwrap_or(cli.command.default_format());
    if format == Format::Csv && !cli.command.supports_csv() {
        return Err(Failure::Usage(format!(
            "`{}` emits JSON only",
            cli.command.name()
        )));
    }
    let global = &cli.global;
    let command = &cli.command;
    let done = |value: Value| Outcome {
        artifact: Artifact::Json(envelope(command, global, value)),
        not_converged: false,
    };

    match *command {
        Command::VerifyDet { n } => verify_det(n, format, command, global),
        Command::SingularVector { n, tol, max_iter } => {
            singular_vector(n, tol, max_iter, format, command, global)
        }
        Command::Similarity { n } => {
            let t = tables(n, global)?;
            Ok(done(
                serde_json::to_value(similarity_statistic_with(n, &t)?).unwrap(),
            ))
        }
        Command::Alpha {
            cutoff,
            cutoff_lo,
            double_cutoff,
            double_cutoff_lo,
        } => alpha(cutoff, cutoff_lo, double_cutoff, double_cutoff_lo, global).map(done),
        Command::Records { n } => records(n, format, command, global),
        Command::Constants {
            cutoff,
            cutoff_lo,
            n,
        } => constants(cutoff, cutoff_lo, n, global).map(done),
        Command::Profile { n, tol, max_iter } => profile(n, tol, max_iter, command, global),
    }
}

fn verify_det(n: usize, format: Format, command: &Command, global: &GlobalOpts) -> Run<Outcome> {
    if n == 0 {
        return Err(Failure::Usage("n must be at least 1".into()));
    }
    if n > DETERMINANT_GUARD && !global.force {
        return Err(Failure::Guard(format!(
            "exact determinants up to n = {n} exceed the guard of {DETERMINANT_GUARD} (pass --force to override)"
        )));
    }
    let t = tables(n, global)?;
    let rows: Vec<(usize, String, i64)> = (1..=n)
        .into_par_iter()
        .map(|k| {
            let det = exact_determinant(k, global.force)?;
            Ok((k, det.to_string(), mertens(k, &t)?))
        })
        .collect::<Result<_, redheffer::Error>>()?;

    let artifact = match format {
        Format::Csv => {
            let mut out = String::from("n,det,mertens,match\n");
            for (k, det, m) in &rows {
                writeln!(out, "{k},{det},{m},{}", *det == m.to_string()).unwrap();
            }
            Artifact::Csv(out)
        }
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|(k, det, m)| json!({"n": k, "det": det, "mertens": m, "match": *det == m.to_string()}))
                .collect();
            let all_match = rows.iter().all(|r| r["match"] == json!(true));
            Artifact::Json(envelope(
                command,
                global,
                json!({"rows": rows, "all_match": all_match}),
            ))
        }
    };
    Ok(Outcome {
        artifact,
        not_converged: false,
    })
}

fn singular_vector(
    n: usize,
    tol: f64,
    max_iter: usize,
    format: Format,
    command: &Command,
    global: &GlobalOpts,
) -> Run<Outcome> {
    let start = Instant::now();
    let t = tables(n, global)?;
    let op = RedhefferOperator::new(n, &t)?;
    let r = power_iteration(&op.gram(), tol, max_iter)?;
    log::info!(
        "power iteration: {} iterations, rayleigh {}, residual {:e}, converged {}",
        r.iterations,
        r.rayleigh,
        r.residual,
        r.converged
    );
    let records = tail_record_indices(&r.eigenvector);
    let mut is_record = vec![false; n + 1];
    records.iter().for_each(|&i| is_record[i] = true);

    let artifact = match format {
        Format::Csv => {
            let mut out = String::from("index,entry,sigma0,sigma1_over_k,is_record\n");
            for k in 1..=n {
                writeln!(
                    out,
                    "{k},{},{},{},{}",
                    fmt_f64(r.eigenvector[k - 1]),
                    t.sigma0(k),
                    fmt_f64(t.sigma1(k) as f64 / k as f64),
                    is_record[k]
                )
                .unwrap();
            }
            Artifact::Csv(out)
        }
        Format::Json => Artifact::Json(envelope(
            command,
            global,
            json!({
                "rayleigh": r.rayleigh,
                "singular_value": r.rayleigh.sqrt(),
                "iterations": r.iterations,
                "residual": r.residual,
                "converged": r.converged,
                "records": records,
                "eigenvector": r.eigenvector,
                "elapsed_ms": elapsed_ms(start),
            }),
        )),
    };
    Ok(Outcome {
        artifact,
        not_converged: !r.converged,
    })
}

fn alpha(
    cutoff: usize,
    cutoff_lo: usize,
    double_cutoff: usize,
    double_cutoff_lo: usize,
    global: &GlobalOpts,
) -> Run<Value> {
    guard_double_sum(double_cutoff, global)?;
    let start = Instant::now();
    let bound = cutoff.max(double_cutoff);
    let t = tables(bound, global)?;
    let c = GcdConstants::closed_form(bound, &t)?;
    drop(t);
    let table_ms = elapsed_ms(start);

    let start = Instant::now();
    let s1 = extrapolate(|d| sum_cd_squared(d, &c), cutoff_lo, cutoff, 1.0)?;
    let s1_ms = elapsed_ms(start);
    let start = Instant::now();
    let s2 = extrapolate(
        |d| double_gcd_sum_weighted(d, &c),
        double_cutoff_lo,
        double_cutoff,
        1.0,
    )?;
    let s2_ms = elapsed_ms(start);
    let report = compute_alpha(&s1, &s2)?;

    // Sensitivity of the double-sum limit to a c·ln(N)/N tail instead of c/N.
    let s2_log = log_tail_limit(s2.cutoff_lo, s2.cutoff_hi, s2.sum_lo, s2.sum_hi);
    let alpha_log = redheffer::constants::alpha_from_limits(s1.limit, s2_log)?.alpha;

    Ok(json!({
        "alpha": report,
        "sensitivity": {
            "double_sum_limit_log_tail": s2_log,
            "alpha_log_tail": alpha_log,
        },
        "elapsed_ms": {"gcd_constants": table_ms, "single_sum": s1_ms, "double_sum": s2_ms},
    }))
}

fn records(n: usize, format: Format, command: &Command, global: &GlobalOpts) -> Run<Outcome> {
    let t = tables(n, global)?;
    let highly_composite = record_indices(&t.sigma0_slice()[1..]);
    let abundancy: Vec<f64> = (1..=n).map(|k| t.sigma1(k) as f64 / k as f64).collect();
    let superabundant = record_indices(&abundancy);
    let mut union: Vec<usize> = highly_composite
        .iter()
        .chain(&superabundant)
        .copied()
        .collect();
    union.sort_unstable();
    union.dedup();

    let classify = |hc: bool, sa: bool| match (hc, sa) {
        (true, true) => "both",
        (true, false) => "highly-composite-only",
        _ => "superabundant-only",
    };
    let rows: Vec<(usize, bool, bool)> = union
        .iter()
        .map(|&k| {
            (
                k,
                highly_composite.binary_search(&k).is_ok(),
                superabundant.binary_search(&k).is_ok(),
            )
        })
        .collect();

    let artifact = match format {
        Format::Csv => {
            let mut out = String::from(
                "index,sigma0,sigma1_over_k,highly_composite,superabundant,classification\n",
            );
            for &(k, hc, sa) in &rows {
                writeln!(
                    out,
                    "{k},{},{},{hc},{sa},{}",
                    t.sigma0(k),
                    fmt_f64(abundancy[k - 1]),
                    classify(hc, sa)
                )
                .unwrap();
            }
            Artifact::Csv(out)
        }
        Format::Json => Artifact::Json(envelope(
            command,
            global,
            json!({
                "highly_composite": highly_composite,
                "superabundant": superabundant,
                "rows": rows.iter().map(|&(k, hc, sa)| json!({
                    "index": k, "highly_composite": hc, "superabundant": sa, "classification": classify(hc, sa)
                })).collect::<Vec<_>>(),
            }),
        )),
    };
    Ok(Outcome {
        artifact,
        not_converged: false,
    })
}

fn constants(cutoff: usize, cutoff_lo: Option<usize>, n: usize, global: &GlobalOpts) -> Run<Value> {
    guard_double_sum(cutoff, global)?;
    let cutoff_lo = cutoff_lo.unwrap_or(cutoff / 2);
    let start = Instant::now();
    let estimate = extrapolate(double_gcd_sum_unweighted, cutoff_lo, cutoff, 1.0)?;
    let double_ms = elapsed_ms(start);

    let start = Instant::now();
    let t = tables(n, global)?;
    let v = candidate_vector(n, &t)?.entries;
    let mut sizes: Vec<usize> = std::iter::successors(Some(10usize), |&m| m.checked_mul(10))
        .take_while(|&m| m < n)
        .collect();
    sizes.push(n);
    let table: Vec<Value> = sizes
        .iter()
        .map(|&m| {
            let density = dot(&v[..m], &v[..m]) / m as f64;
            json!({"n": m, "norm_squared_over_n": density, "gap": density - NORM_DENSITY})
        })
        .collect();

    Ok(json!({
        "target": NORM_DENSITY,
        "unweighted_double_sum": estimate,
        "double_sum_gap": estimate.limit - NORM_DENSITY,
        "norm_density": table,
        "elapsed_ms": {"double_sum": double_ms, "norm_table": elapsed_ms(start)},
    }))
}

fn profile(
    n: usize,
    tol: f64,
    max_iter: usize,
    command: &Command,
    global: &GlobalOpts,
) -> Run<Outcome> {
    let t = tables(n, global)?;
    let op = RedhefferOperator::new(n, &t)?;
    let v = candidate_vector(n, &t)?;
    let r = power_iteration(&op.gram(), tol, max_iter)?;
    let value = json!({
        "candidate": prime_vs_composite_profile(&v.entries, &t)?,
        "singular_vector": prime_vs_composite_profile(&r.eigenvector, &t)?,
        "power_iteration": {
            "iterations": r.iterations,
            "rayleigh": r.rayleigh,
            "residual": r.residual,
            "converged": r.converged,
        },
    });
    Ok(Outcome {
        artifact: Artifact::Json(envelope(command, global, value)),
        not_converged: !r.converged,
    })
}
