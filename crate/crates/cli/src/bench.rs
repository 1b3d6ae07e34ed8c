//! Seeded benchmark trials over a directory of scenes.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Args;
use collab_tamp::{plan, validate_plan, PlannerConfig};
use serde::Serialize;

use crate::{read_scene, write, CliError, SearchArgs, EXIT_OK};

#[derive(Debug, Args)]
pub struct BenchArgs {
    pub dir: PathBuf,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed_base: u64,
    /// JSON report path.
    #[arg(long, default_value = "bench.json")]
    pub out: PathBuf,
    #[command(flatten)]
    pub search: SearchArgs,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trial {
    pub seed: u64,
    pub success: bool,
    pub planning_time: f64,
    pub makespan: Option<usize>,
    pub motion_cost: Option<usize>,
    pub handover_steps: Option<usize>,
    pub iterations: usize,
    /// No-plan reason or error text for failed trials.
    pub failure: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
}

impl Stat {
    /// Mean and sample standard deviation; `None` for no samples.
    pub fn of(xs: &[f64]) -> Option<Stat> {
        if xs.is_empty() {
            return None;
        }
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = if xs.len() > 1 { xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
        Some(Stat { mean, std: var.sqrt() })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub trials: Vec<Trial>,
    pub success_rate: f64,
    pub planning_time: Option<Stat>,
    /// Over successful trials only.
    pub makespan: Option<Stat>,
    pub motion_cost: Option<Stat>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BenchReport {
    pub scenarios: Vec<ScenarioReport>,
}

/// Runs one trial; a returned plan that fails validation is an error.
pub fn run_trial(scene: &collab_tamp::Scene, cfg: &PlannerConfig) -> Trial {
    let started = Instant::now();
    let outcome = plan(scene, cfg);
    let planning_time = started.elapsed().as_secs_f64();
    let mut t = Trial {
        seed: cfg.seed,
        success: false,
        planning_time,
        makespan: None,
        motion_cost: None,
        handover_steps: None,
        iterations: 0,
        failure: None,
    };
    match outcome {
        Err(e) => t.failure = Some(e.to_string()),
        Ok(o) => {
            t.iterations = o.iterations;
            match o.result {
                Err(np) => t.failure = Some(np.reason.to_string()),
                Ok(p) => match validate_plan(scene, &p) {
                    Ok(r) if r.valid => {
                        t.success = true;
                        t.makespan = Some(p.makespan);
                        t.motion_cost = Some(p.motion_cost);
                        t.handover_steps = Some(p.handover_steps());
                    }
                    _ => t.failure = Some("returned plan failed validation".into()),
                },
            }
        }
    }
    t
}

pub fn bench_scene(name: &str, path: &Path, trials: usize, seed_base: u64, base: &PlannerConfig) -> ScenarioReport {
    let mut report = ScenarioReport {
        scenario: name.to_string(),
        trials: Vec::new(),
        success_rate: 0.0,
        planning_time: None,
        makespan: None,
        motion_cost: None,
        error: None,
    };
    let scene = match read_scene(path) {
        Ok(s) => s,
        Err(e) => {
            report.error = Some(e.to_string());
            return report;
        }
    };
    for i in 0..trials {
        let cfg = PlannerConfig { seed: seed_base + i as u64, ..*base };
        report.trials.push(run_trial(&scene, &cfg));
    }
    let ok: Vec<&Trial> = report.trials.iter().filter(|t| t.success).collect();
    if !report.trials.is_empty() {
        report.success_rate = ok.len() as f64 / report.trials.len() as f64;
    }
    let times: Vec<f64> = report.trials.iter().map(|t| t.planning_time).collect();
    report.planning_time = Stat::of(&times);
    report.makespan = Stat::of(&ok.iter().filter_map(|t| t.makespan).map(|x| x as f64).collect::<Vec<_>>());
    report.motion_cost = Stat::of(&ok.iter().filter_map(|t| t.motion_cost).map(|x| x as f64).collect::<Vec<_>>());
    report
}

/// Scene files in `dir`, sorted by name.
pub fn scenario_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let entries = fs::read_dir(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
    let mut out: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    out.sort();
    Ok(out)
}

pub fn run_bench(dir: &Path, trials: usize, seed_base: u64, cfg: &PlannerConfig) -> Result<BenchReport, CliError> {
    let mut report = BenchReport::default();
    for path in scenario_files(dir)? {
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        report.scenarios.push(bench_scene(&name, &path, trials, seed_base, cfg));
    }
    Ok(report)
}

fn cell(s: Option<Stat>, digits: usize) -> String {
    match s {
        Some(s) => format!("{:.digits$} ± {:.digits$}", s.mean, s.std),
        None => "-".into(),
    }
}

pub fn table(report: &BenchReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<28} {:>8} {:>18} {:>14} {:>14}",
        "scenario", "success", "time (s)", "makespan", "motion cost"
    );
    for s in &report.scenarios {
        let _ = writeln!(
            out,
            "{:<28} {:>7.0}% {:>18} {:>14} {:>14}",
            s.scenario,
            100.0 * s.success_rate,
            cell(s.planning_time, 3),
            cell(s.makespan, 2),
            cell(s.motion_cost, 2)
        );
    }
    out
}

pub fn cmd_bench(args: &BenchArgs) -> Result<i32, CliError> {
    let report = run_bench(&args.dir, args.trials, args.seed_base, &args.search.config())?;
    print!("{}", table(&report));
    write(&args.out, &(serde_json::to_string_pretty(&report).expect("report serializes") + "\n"))?;
    Ok(EXIT_OK)
}
