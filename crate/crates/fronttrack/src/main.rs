//! Configuration-driven experiment runner: exact solves, flux comparisons,
//! depth-refinement studies, artifact verification, and parameter sweeps.
//!
//! Every command reads one JSON config. Machine-readable results land in the
//! output directory; an aligned text summary goes to stdout. The exit code is
//! 0 when every checked bound holds, 1 on a violation or artifact mismatch,
//! and 2 on config, artifact, or solver errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use fronttrack::artifacts;
use fronttrack::config::ExperimentConfig;
use fronttrack::nonaut;
use fronttrack::stepfn::StepFunction;
use fronttrack::tracker::{SolveOptions, Solution};
use fronttrack::verify::{self, VerifyOptions, VerifyReport};
use fronttrack::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "fronttrack", version, about = "Exact front-tracking experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; falls back to the config's `out_dir`, then `out`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one problem and write profiles, events, and bounds.
    Solve(Common),
    /// Solve the same data under both fluxes and certify their distance.
    CompareFlux(Common),
    /// Depth-refinement study for a time-dependent flux.
    Nonaut(Common),
    /// Re-derive the artifacts in the output directory and run the full
    /// verification battery.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Seed for the entropy spot-check battery (overrides the config).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Solve every (epsilon, depth) cell of the config on a worker pool.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Worker threads.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("FT_LOG", "warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Solve(common) => {
            let (cfg, out) = load(&common)?;
            cmd_solve(&cfg, &out)
        }
        Command::CompareFlux(common) => {
            let (cfg, out) = load(&common)?;
            cmd_compare_flux(&cfg, &out)
        }
        Command::Nonaut(common) => {
            let (cfg, out) = load(&common)?;
            cmd_nonaut(&cfg, &out)
        }
        Command::Verify { common, seed } => {
            let (cfg, out) = load(&common)?;
            cmd_verify(&cfg, &out, seed)
        }
        Command::Sweep { common, jobs } => {
            let (cfg, out) = load(&common)?;
            cmd_sweep(&cfg, &out, jobs)
        }
    }
}

fn load(common: &Common) -> Result<(ExperimentConfig, PathBuf)> {
    let cfg = ExperimentConfig::from_path(&common.config)?;
    let out = common
        .out
        .clone()
        .or_else(|| cfg.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&out)?;
    Ok((cfg, out))
}

fn kv(label: &str, value: impl std::fmt::Display) {
    println!("  {label:<26} {value}");
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn verdict(b: bool) -> &'static str {
    if b {
        "PASS"
    } else {
        "FAIL"
    }
}

/// First entry of a possibly-listed parameter; sweeps iterate, single
/// commands take the head and say so.
fn head<T: Copy + std::fmt::Debug>(name: &str, list: &[T]) -> T {
    if list.len() > 1 {
        log::info!("{name} lists {list:?}; this command uses the first entry");
    }
    list[0]
}

fn solve_cell(cfg: &ExperimentConfig, eps: f64, depth: u32) -> Result<Solution> {
    let problem = cfg.problem(eps)?;
    nonaut::dyadic_solve(&problem, depth, SolveOptions::default())
}

fn sampled_rows(cfg: &ExperimentConfig, sol: &Solution) -> Result<Vec<(f64, StepFunction)>> {
    artifacts::profile_times(cfg.horizon, cfg.time_samples)
        .into_iter()
        .map(|t| Ok((t, sol.profile_at(t)?)))
        .collect()
}

fn write_solve_artifacts(
    cfg: &ExperimentConfig,
    sol: &Solution,
    out: &Path,
) -> Result<verify::BoundReport> {
    let rows = sampled_rows(cfg, sol)?;
    artifacts::write_profiles(&out.join("profiles.csv"), &rows)?;
    artifacts::write_events(&out.join("events.jsonl"), sol)?;
    let bounds = verify::bound_report(sol)?;
    artifacts::write_json(&out.join("bounds.json"), &bounds)?;
    Ok(bounds)
}

fn print_bounds(bounds: &verify::BoundReport) {
    kv("records checked", bounds.records_checked);
    kv("range margin (index)", bounds.range_margin_index);
    kv("tv margin (index)", bounds.tv_margin_index);
    kv("time lipschitz margin", format!("{:.3e}", bounds.time_lipschitz_margin));
    kv("glimm trace monotone", yes_no(bounds.glimm_trace_monotone));
    kv("v violations", bounds.v_violations);
    kv("budget violations", bounds.budget_violations);
    kv(
        "weighted-count breaks",
        format!("{} (informational)", bounds.sharp_violations),
    );
}

fn cmd_solve(cfg: &ExperimentConfig, out: &Path) -> Result<bool> {
    let eps = head("epsilon", &cfg.epsilons());
    let depth = head("depth", &cfg.depths());
    let sol = solve_cell(cfg, eps, depth)?;
    let bounds = write_solve_artifacts(cfg, &sol, out)?;
    println!("solve report");
    kv("epsilon", eps);
    kv("depth", depth);
    kv("events", sol.records().count());
    print_bounds(&bounds);
    kv("artifacts", out.display());
    kv("verdict", verdict(bounds.passes));
    Ok(bounds.passes)
}

fn cmd_compare_flux(cfg: &ExperimentConfig, out: &Path) -> Result<bool> {
    let eps = head("epsilon", &cfg.epsilons());
    let depth = head("depth", &cfg.depths());
    let sol_f = solve_cell(cfg, eps, depth)?;
    let problem_g = cfg.problem_g(eps)?;
    let sol_g = nonaut::dyadic_solve(&problem_g, depth, SolveOptions::default())?;
    let times = cfg.sample_times();
    let report = verify::flux_stability_check(&sol_f, &sol_g, &times)?;
    artifacts::write_stability(&out.join("stability.csv"), &report)?;
    println!("flux comparison");
    kv("epsilon", eps);
    kv("sampled times", report.times.len());
    kv("max excess", format!("{:.3e}", report.max_excess));
    kv("artifacts", out.display());
    let ok = report.passes();
    kv("verdict", verdict(ok));
    Ok(ok)
}

fn cmd_nonaut(cfg: &ExperimentConfig, out: &Path) -> Result<bool> {
    let depths = cfg.depths();
    let n_min = *depths.iter().min().unwrap();
    let n_max = *depths.iter().max().unwrap();
    if n_min == n_max {
        return Err(Error::Config(
            "depth: a refinement study needs at least two depths".into(),
        ));
    }
    let eps = head("epsilon", &cfg.epsilons());
    let problem = cfg.problem(eps)?;
    let study = nonaut::cauchy_study(
        &problem,
        n_min,
        n_max,
        cfg.time_samples,
        SolveOptions::default(),
    )?;
    artifacts::write_cauchy(&out.join("cauchy.csv"), &study)?;
    artifacts::write_json(&out.join("constants.json"), &study.constants)?;
    println!("depth refinement");
    kv("epsilon", eps);
    kv("splitting constant", format!("{:.6e}", study.constants.split_o));
    println!("  {:<8} {:<14} {:<14} ratio", "depth", "distance", "bound");
    for row in &study.rows {
        println!(
            "  {:<8} {:<14.6e} {:<14.6e} {:.3}",
            row.depth, row.distance, row.bound, row.ratio
        );
    }
    kv("artifacts", out.display());
    let ok = study.all_within_bound();
    kv("verdict", verdict(ok));
    Ok(ok)
}

/// Everything `verify` concluded, stored next to the artifacts it checked.
#[derive(Debug, Serialize, Deserialize)]
struct CliVerifyReport {
    artifacts_match: bool,
    mismatch: Option<String>,
    battery: VerifyReport,
}

/// Compare stored against recomputed profiles bit for bit.
fn profile_mismatch(
    stored: &[(f64, StepFunction)],
    fresh: &[(f64, StepFunction)],
) -> Option<String> {
    if stored.len() != fresh.len() {
        return Some(format!(
            "profiles.csv has {} rows, the run produces {}",
            stored.len(),
            fresh.len()
        ));
    }
    for (i, ((ts, ps), (tf, pf))) in stored.iter().zip(fresh).enumerate() {
        let row = i + 1;
        if ts.to_bits() != tf.to_bits() {
            return Some(format!("profiles.csv row {row}: time {ts} differs from {tf}"));
        }
        let same = ps.breaks().len() == pf.breaks().len()
            && ps
                .breaks()
                .iter()
                .zip(pf.breaks())
                .all(|(a, b)| a.to_bits() == b.to_bits())
            && ps
                .values()
                .iter()
                .zip(pf.values())
                .all(|(a, b)| a.to_bits() == b.to_bits());
        if !same {
            return Some(format!(
                "profiles.csv row {row} (t = {ts}): profile differs from the recomputed run"
            ));
        }
    }
    None
}

fn cmd_verify(cfg: &ExperimentConfig, out: &Path, seed: Option<u64>) -> Result<bool> {
    let eps = head("epsilon", &cfg.epsilons());
    let depth = head("depth", &cfg.depths());
    let sol = solve_cell(cfg, eps, depth)?;

    let domain = cfg.domain.to_domain().interval();
    let stored_profiles = artifacts::read_profiles(&out.join("profiles.csv"), domain)?;
    let fresh_profiles = sampled_rows(cfg, &sol)?;
    let mut mismatch = profile_mismatch(&stored_profiles, &fresh_profiles);

    if mismatch.is_none() {
        let stored_events = artifacts::read_events(&out.join("events.jsonl"))?;
        let fresh_events: Vec<_> = sol.records().cloned().collect();
        if stored_events != fresh_events {
            let row = stored_events
                .iter()
                .zip(&fresh_events)
                .position(|(a, b)| a != b)
                .map_or(stored_events.len().min(fresh_events.len()) + 1, |i| i + 1);
            mismatch = Some(format!("events.jsonl line {row} differs from the recomputed run"));
        }
    }

    if mismatch.is_none() {
        let stored_bounds: verify::BoundReport = artifacts::read_json(&out.join("bounds.json"))?;
        if stored_bounds != verify::bound_report(&sol)? {
            mismatch = Some("bounds.json differs from the recomputed audit".into());
        }
    }

    let opts = VerifyOptions {
        entropy_samples: cfg.entropy_samples,
        seed: seed.unwrap_or(cfg.seed),
    };
    let battery = verify::verify_solution(&sol, &opts)?;
    let report = CliVerifyReport {
        artifacts_match: mismatch.is_none(),
        mismatch: mismatch.clone(),
        battery,
    };
    artifacts::write_json(&out.join("report.json"), &report)?;

    println!("verification report");
    kv("artifacts match", yes_no(report.artifacts_match));
    if let Some(m) = &mismatch {
        kv("first mismatch", m);
    }
    let b = &report.battery;
    kv("ledger chain consistent", yes_no(b.chain_ok));
    kv("max speed error", format!("{:.3e}", b.max_speed_error));
    kv("min chord margin", format!("{:.3e}", b.min_chord_margin));
    kv(
        "left admissibility",
        format!(
            "{:.3e} over {} samples",
            b.left_admissibility.max_violation, b.left_admissibility.samples
        ),
    );
    match &b.right_admissibility {
        Some(r) => kv(
            "right admissibility",
            format!("{:.3e} over {} samples", r.max_violation, r.samples),
        ),
        None => kv("right admissibility", "- (half line)"),
    }
    print_bounds(&b.bounds);
    kv("entropy spot checks", b.entropy_checks);
    kv("worst entropy ratio", format!("{:.3}", b.worst_entropy_ratio));
    let ok = report.artifacts_match && b.passes;
    kv("verdict", verdict(ok));
    Ok(ok)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CellOutcome {
    epsilon: f64,
    depth: u32,
    dir: String,
    events: usize,
    passes: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn run_cell(cfg: &ExperimentConfig, eps: f64, depth: u32, dir: &Path) -> CellOutcome {
    let mut outcome = CellOutcome {
        epsilon: eps,
        depth,
        dir: dir.display().to_string(),
        events: 0,
        passes: false,
        error: None,
    };
    let attempt = (|| -> Result<(usize, bool)> {
        std::fs::create_dir_all(dir)?;
        let sol = solve_cell(cfg, eps, depth)?;
        let bounds = write_solve_artifacts(cfg, &sol, dir)?;
        Ok((sol.records().count(), bounds.passes))
    })();
    match attempt {
        Ok((events, passes)) => {
            outcome.events = events;
            outcome.passes = passes;
        }
        Err(e) => outcome.error = Some(e.to_string()),
    }
    outcome
}

fn cmd_sweep(cfg: &ExperimentConfig, out: &Path, jobs: usize) -> Result<bool> {
    let cells: Vec<(f64, u32)> = cfg
        .epsilons()
        .into_iter()
        .flat_map(|e| cfg.depths().into_iter().map(move |d| (e, d)))
        .collect();
    let dirs: Vec<PathBuf> = cells
        .iter()
        .map(|(e, d)| out.join(format!("eps-{e}_depth-{d}")))
        .collect();
    let jobs = jobs.max(1);
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<CellOutcome>>> = Mutex::new(vec![None; cells.len()]);
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(cells.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= cells.len() {
                    break;
                }
                let (eps, depth) = cells[i];
                let outcome = run_cell(cfg, eps, depth, &dirs[i]);
                results.lock().unwrap()[i] = Some(outcome);
            });
        }
    });
    let outcomes: Vec<CellOutcome> = results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|o| o.expect("every cell ran"))
        .collect();
    artifacts::write_json(&out.join("summary.json"), &outcomes)?;
    println!("sweep summary");
    println!("  {:<10} {:<7} {:<8} {:<8} cell", "epsilon", "depth", "events", "status");
    let mut all_ok = true;
    for o in &outcomes {
        let status = match &o.error {
            Some(_) => "ERROR",
            None => verdict(o.passes),
        };
        all_ok &= o.error.is_none() && o.passes;
        println!(
            "  {:<10} {:<7} {:<8} {:<8} {}",
            o.epsilon, o.depth, o.events, status, o.dir
        );
        if let Some(e) = &o.error {
            println!("           {e}");
        }
    }
    kv("verdict", verdict(all_ok));
    Ok(all_ok)
}
