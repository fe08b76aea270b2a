//! Command execution: building sweep specs from arguments, running them,
//! and writing the CSV/JSON artifacts atomically.

use crate::cli::{CommonArgs, FigureArgs, FileConfig, RunArgs, SweepArgs, ValidateArgs};
use anyhow::{anyhow, bail, Context, Result};
use rdb_core::channel::GainModel;
use rdb_core::engine::{BeamRule, RateMetric};
use rdb_core::scheme::{PowerConvention, SchemeTag};
use rdb_core::sweep::{figure_preset, run_sweep, RateUnit, SweepSpec, SweepTable, PRESET_IDS};
use rdb_core::validate::{run_suite, SUITE_IDS};
use rdb_core::with_worker_pool;
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub fn parse_scheme(s: &str) -> Result<SchemeTag> {
    Ok(match s {
        "single-beam" => SchemeTag::SingleBeam,
        "multi-beam-single-user" => SchemeTag::MultiBeamSingleUser,
        "multi-beam-multi-user" => SchemeTag::MultiBeamMultiUser,
        "rbf" => SchemeTag::RbfRayleigh,
        other => bail!(
            "unknown scheme '{other}' (expected single-beam, multi-beam-single-user, multi-beam-multi-user, or rbf)"
        ),
    })
}

pub fn parse_gain(s: &str) -> Result<GainModel> {
    Ok(match s {
        "unit" => GainModel::UnitGain,
        "cn" => GainModel::ComplexGaussian,
        other => bail!("unknown gain model '{other}' (expected unit or cn)"),
    })
}

pub fn parse_power(s: &str) -> Result<PowerConvention> {
    let (kind, value) = s
        .split_once(':')
        .ok_or_else(|| anyhow!("power must look like total:<P_t> or per-user:<rho>, got '{s}'"))?;
    let v: f64 = value.parse().context("power value must be a number")?;
    Ok(match kind {
        "total" => PowerConvention::FixedTotal { p_t: v },
        "per-user" => PowerConvention::FixedPerUser { rho: v },
        other => bail!("unknown power convention '{other}' (expected total or per-user)"),
    })
}

pub fn parse_metric(s: &str) -> Result<RateMetric> {
    Ok(match s {
        "sum-rate" => RateMetric::SumRate,
        "per-user-rate" => RateMetric::PerUserRate,
        other => bail!("unknown metric '{other}' (expected sum-rate or per-user-rate)"),
    })
}

fn parse_beams(s: &str) -> Result<BeamRule> {
    if s == "match-m" {
        return Ok(BeamRule::MatchAntennas);
    }
    let n: usize = s
        .parse()
        .map_err(|_| anyhow!("beam count must be an integer or 'match-m', got '{s}'"))?;
    Ok(BeamRule::Explicit { s: n })
}

/// Settings shared by run/sweep/figure after merging config and flags.
struct Resolved {
    trials: u64,
    seed: u64,
    workers: Option<usize>,
    out: Option<String>,
    unit: RateUnit,
}

fn resolve_common(common: &CommonArgs, file: &FileConfig) -> Resolved {
    Resolved {
        trials: common.trials.or(file.trials).unwrap_or(5000),
        seed: common.seed.or(file.seed).unwrap_or(1),
        workers: common.workers.or(file.workers),
        out: common.out.clone().or_else(|| file.out.clone()),
        unit: if common.bits || file.bits.unwrap_or(false) {
            RateUnit::Bits
        } else {
            RateUnit::Nats
        },
    }
}

fn apply_resolved(spec: &mut SweepSpec, r: &Resolved) {
    spec.n_trials = r.trials;
    spec.master_seed = r.seed;
    spec.rate_unit = r.unit;
}

pub fn build_run_spec(args: &RunArgs, file: &FileConfig) -> Result<SweepSpec> {
    let scheme = parse_scheme(
        args.scheme
            .as_deref()
            .or(file.scheme.as_deref())
            .ok_or_else(|| anyhow!("--scheme is required"))?,
    )?;
    let m = args
        .m
        .or_else(|| file.m.as_ref().and_then(|v| v.first().copied()))
        .ok_or_else(|| anyhow!("--M is required"))?;

    let mut spec = SweepSpec::new(
        args.label
            .clone()
            .or_else(|| file.label.clone())
            .unwrap_or_else(|| "run".to_string()),
    );
    spec.schemes = vec![scheme];
    spec.m_values = vec![m];
    let q = args
        .q
        .or_else(|| file.q.as_ref().and_then(|v| v.first().copied()));
    let k = args.k.or(file.k);
    match (q, k) {
        (Some(q), None) => spec.q_values = vec![q],
        (None, Some(k)) => spec.explicit_k = Some(k),
        (Some(_), Some(_)) => bail!("--q and --K are mutually exclusive"),
        (None, None) => bail!("one of --q or --K is required"),
    }
    let ell = args
        .ell
        .or_else(|| file.ell.as_ref().and_then(|v| v.first().copied()));
    let s_str = args.s.clone().or_else(|| file.s.clone());
    match (ell, s_str) {
        (Some(l), None) => spec.ell_values = vec![l],
        (None, Some(s)) => spec.explicit_s = Some(parse_beams(&s)?),
        (Some(_), Some(_)) => bail!("--ell and --S are mutually exclusive"),
        (None, None) => {
            if scheme == SchemeTag::RbfRayleigh {
                spec.explicit_s = Some(BeamRule::MatchAntennas);
            }
        }
    }
    fill_scheme_options(
        &mut spec,
        args.gain.as_deref(),
        args.power.as_deref(),
        args.metric.as_deref(),
        args.ratio,
        args.c_u,
        args.c_b,
        args.sigma_h2,
        args.allow_duplicate_winners,
        file,
    )?;
    Ok(spec)
}

pub fn build_sweep_spec(args: &SweepArgs, file: &FileConfig) -> Result<SweepSpec> {
    let scheme_names: Vec<String> = if !args.scheme.is_empty() {
        args.scheme.clone()
    } else if let Some(s) = &file.scheme {
        s.split(',').map(str::to_string).collect()
    } else {
        bail!("--scheme is required");
    };
    let mut spec = SweepSpec::new(
        args.label
            .clone()
            .or_else(|| file.label.clone())
            .unwrap_or_else(|| "sweep".to_string()),
    );
    spec.schemes = scheme_names
        .iter()
        .map(|s| parse_scheme(s))
        .collect::<Result<_>>()?;
    if !args.m.is_empty() {
        spec.m_values = args.m.clone();
    } else if let Some(m) = &file.m {
        spec.m_values = m.clone();
    }
    let q = if !args.q.is_empty() {
        args.q.clone()
    } else {
        file.q.clone().unwrap_or_default()
    };
    let k = args.k.or(file.k);
    match (q.is_empty(), k) {
        (false, None) => spec.q_values = q,
        (true, Some(k)) => spec.explicit_k = Some(k),
        (false, Some(_)) => bail!("--q and --K are mutually exclusive"),
        (true, None) => bail!("one of --q or --K is required"),
    }
    let ell = if !args.ell.is_empty() {
        args.ell.clone()
    } else {
        file.ell.clone().unwrap_or_default()
    };
    let s_str = args.s.clone().or_else(|| file.s.clone());
    match (ell.is_empty(), s_str) {
        (false, None) => spec.ell_values = ell,
        (true, Some(s)) => spec.explicit_s = Some(parse_beams(&s)?),
        (false, Some(_)) => bail!("--ell and --S are mutually exclusive"),
        (true, None) => {
            if spec.schemes.contains(&SchemeTag::RbfRayleigh) {
                spec.explicit_s = Some(BeamRule::MatchAntennas);
            }
        }
    }
    fill_scheme_options(
        &mut spec,
        args.gain.as_deref(),
        args.power.as_deref(),
        args.metric.as_deref(),
        args.ratio,
        args.c_u,
        args.c_b,
        args.sigma_h2,
        args.allow_duplicate_winners,
        file,
    )?;
    Ok(spec)
}

#[allow(clippy::too_many_arguments)]
fn fill_scheme_options(
    spec: &mut SweepSpec,
    gain: Option<&str>,
    power: Option<&str>,
    metric: Option<&str>,
    ratio_flag: bool,
    c_u: Option<f64>,
    c_b: Option<f64>,
    sigma_h2: Option<f64>,
    allow_dup: Option<bool>,
    file: &FileConfig,
) -> Result<()> {
    if let Some(g) = gain.or(file.gain.as_deref()) {
        spec.gain = parse_gain(g)?;
    }
    if let Some(p) = power.or(file.power.as_deref()) {
        spec.power = parse_power(p)?;
    }
    if let Some(m) = metric.or(file.metric.as_deref()) {
        spec.metric = parse_metric(m)?;
    }
    spec.ratio_to_csi = ratio_flag || file.ratio.unwrap_or(false);
    if let Some(c) = c_u.or(file.c_u) {
        spec.c_u = c;
    }
    if let Some(c) = c_b.or(file.c_b) {
        spec.c_b = c;
    }
    if let Some(v) = sigma_h2.or(file.sigma_h2) {
        spec.sigma_h2 = v;
    }
    if let Some(d) = allow_dup.or(file.allow_duplicate_winners) {
        spec.allow_duplicate_winners = d;
    }
    Ok(())
}

#[derive(Serialize)]
struct RunSummary<'a> {
    tool_version: &'static str,
    command: &'a str,
    resolved_config: &'a SweepSpec,
    master_seed: u64,
    workers: Option<usize>,
    per_point_trials: u64,
    total_points: usize,
    failed_points: usize,
    total_trials: u64,
    rate_unit: String,
    wall_time_s: f64,
    warnings: Vec<String>,
    csv_path: String,
}

/// Runs the sweep and writes `<out>.csv` and `<out>.json`; files land
/// only when the whole run succeeded, so failures leave no partial
/// outputs.
fn execute_spec(command: &str, spec: &SweepSpec, r: &Resolved) -> Result<()> {
    spec.validate().map_err(|e| anyhow!(e))?;
    let t0 = Instant::now();
    let table = with_worker_pool(r.workers, || run_sweep(spec)).map_err(|e| anyhow!(e))?;
    let wall = t0.elapsed().as_secs_f64();

    let warnings: Vec<String> = table
        .rows
        .iter()
        .filter(|row| row.status != "ok")
        .map(|row| {
            format!(
                "point m={} q={:?} ell={:?}: {}",
                row.m, row.q, row.ell, row.status
            )
        })
        .collect();
    for w in &warnings {
        eprintln!("warning: {w}");
    }

    let out = r.out.clone().unwrap_or_else(|| spec.label.clone());
    let csv_path = format!("{out}.csv");
    let json_path = format!("{out}.json");
    let summary = RunSummary {
        tool_version: env!("CARGO_PKG_VERSION"),
        command,
        resolved_config: spec,
        master_seed: spec.master_seed,
        workers: r.workers,
        per_point_trials: spec.n_trials,
        total_points: table.rows.len(),
        failed_points: warnings.len(),
        total_trials: spec.n_trials * table.rows.len() as u64,
        rate_unit: table.rate_unit.to_string(),
        wall_time_s: wall,
        warnings,
        csv_path: csv_path.clone(),
    };

    let json_text = serde_json::to_string_pretty(&summary)? + "\n";
    write_pair(
        (Path::new(&csv_path), table.to_csv().as_bytes()),
        (Path::new(&json_path), json_text.as_bytes()),
    )?;
    println!(
        "{}: {} rows in {:.2} s -> {} / {}",
        spec.label,
        table.rows.len(),
        wall,
        csv_path,
        json_path
    );
    print_table_excerpt(&table);
    Ok(())
}

fn print_table_excerpt(table: &SweepTable) {
    let n = table.rows.len();
    for (i, row) in table.rows.iter().enumerate() {
        if n > 12 && !(i < 5 || i + 5 >= n) {
            if i == 5 {
                println!("  ... {} more rows ...", n - 10);
            }
            continue;
        }
        let value = row
            .ratio_mean
            .or(row.rate_mean)
            .map(|v| format!("{v:.5}"))
            .unwrap_or_else(|| "-".into());
        println!(
            "  {} m={} q={} ell={} k={} s={} -> {} [{}]",
            row.scheme,
            row.m,
            row.q.map(|v| v.to_string()).unwrap_or_else(|| "-".into()),
            row.ell.map(|v| v.to_string()).unwrap_or_else(|| "-".into()),
            row.k,
            row.s,
            value,
            row.status
        );
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .with_context(|| format!("creating {}", parent.display()))?;
        }
    }
    let tmp = PathBuf::from(format!("{}.tmp", path.display()));
    std::fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path).with_context(|| {
        let _ = std::fs::remove_file(&tmp);
        format!("renaming {} into place", path.display())
    })?;
    Ok(())
}

/// Stages both artifacts before either lands, so a failure part-way
/// through leaves no partial outputs behind.
fn write_pair(a: (&Path, &[u8]), b: (&Path, &[u8])) -> Result<()> {
    write_atomic(a.0, a.1)?;
    if let Err(e) = write_atomic(b.0, b.1) {
        let _ = std::fs::remove_file(a.0);
        return Err(e);
    }
    Ok(())
}

pub fn cmd_run(args: &RunArgs) -> Result<()> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let r = resolve_common(&args.common, &file);
    let mut spec = build_run_spec(args, &file)?;
    apply_resolved(&mut spec, &r);
    execute_spec("run", &spec, &r)
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let r = resolve_common(&args.common, &file);
    let mut spec = build_sweep_spec(args, &file)?;
    apply_resolved(&mut spec, &r);
    execute_spec("sweep", &spec, &r)
}

pub fn cmd_figure(args: &FigureArgs) -> Result<()> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let r = resolve_common(&args.common, &file);
    let mut spec = figure_preset(&args.id).ok_or_else(|| {
        anyhow!(
            "unknown preset '{}' (expected one of {})",
            args.id,
            PRESET_IDS.join(", ")
        )
    })?;
    apply_resolved(&mut spec, &r);
    if let Some(max_m) = args.max_m.or(file.max_m) {
        spec.clamp_m(max_m);
    }
    execute_spec("figure", &spec, &r)
}

pub fn cmd_validate(args: &ValidateArgs) -> Result<bool> {
    let budget = args.budget.unwrap_or(1.0);
    if !(budget.is_finite() && budget > 0.0) {
        bail!("--budget must be positive");
    }
    let seed = args.seed.unwrap_or(1);
    let report = with_worker_pool(args.workers, || run_suite(&args.suite, budget, seed))
        .ok_or_else(|| {
            anyhow!(
                "unknown suite '{}' (expected one of {})",
                args.suite,
                SUITE_IDS.join(", ")
            )
        })?;
    let json = serde_json::to_string_pretty(&report)? + "\n";
    if let Some(out) = &args.out {
        write_atomic(Path::new(out), json.as_bytes())?;
    }
    println!("{json}");
    for c in &report.checks {
        eprintln!(
            "  {} {}: measured {:.6e}, {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.measured,
            c.expected
        );
    }
    Ok(report.passed)
}
