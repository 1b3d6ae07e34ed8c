//! Command-line front end: plan, validate, render and bench.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use collab_tamp::doc::{parse_plan, plan_to_json};
use collab_tamp::mip::{compile_model, solve, write_lp, SolveStatus};
use collab_tamp::search::{open_goals, plan_with_facts};
use collab_tamp::{build_cmtg, compute_facts, load_scene, validate_plan, DocError, PlanError, PlannerConfig, Scene};
use thiserror::Error;

pub mod bench;
pub mod render;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NO_PLAN: i32 = 2;
pub const EXIT_INVALID: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "collab-tamp", version, about = "Multi-robot pick-and-place planning among movable obstacles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Plan for a scene and write the plan document.
    Plan(PlanArgs),
    /// Check a plan against a scene.
    Validate { scene: PathBuf, plan: PathBuf },
    /// Draw a scene, and optionally a plan, as SVG.
    Render {
        scene: PathBuf,
        #[arg(long)]
        plan: Option<PathBuf>,
        #[arg(long)]
        svg: PathBuf,
    },
    /// Run seeded trials over every scene in a directory.
    Bench(bench::BenchArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 200)]
    pub max_iters: usize,
    /// Seconds.
    #[arg(long, default_value_t = 60.0)]
    pub time_budget: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 4)]
    pub t_max: usize,
    #[arg(long, default_value_t = 10)]
    pub k_max: usize,
    #[arg(long)]
    pub exhaust: bool,
}

impl SearchArgs {
    pub fn config(&self) -> PlannerConfig {
        PlannerConfig {
            c: self.c,
            alpha: self.alpha,
            t_max: self.t_max,
            k_max: self.k_max,
            max_iterations: self.max_iters,
            time_budget: Duration::from_secs_f64(self.time_budget.max(0.0)),
            seed: self.seed,
            exhaust: self.exhaust,
            ..PlannerConfig::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    pub scene: PathBuf,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Plan file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub dump_facts: Option<PathBuf>,
    /// Text listing, or DOT when the path ends in `.dot`.
    #[arg(long)]
    pub dump_cmtg: Option<PathBuf>,
    #[arg(long)]
    pub dump_mip: Option<PathBuf>,
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Doc { path: PathBuf, source: DocError },
    #[error("{}: {message}", path.display())]
    Structure { path: PathBuf, message: String },
    #[error(transparent)]
    Plan(#[from] PlanError),
}

pub fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

pub fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

pub fn read_scene(path: &Path) -> Result<Scene, CliError> {
    load_scene(&read(path)?).map_err(|source| CliError::Doc { path: path.to_path_buf(), source })
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Plan(args) => cmd_plan(&args),
        Command::Validate { scene, plan } => cmd_validate(&scene, &plan),
        Command::Render { scene, plan, svg } => cmd_render(&scene, plan.as_deref(), &svg),
        Command::Bench(args) => bench::cmd_bench(&args),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        EXIT_ERROR
    })
}

/// Root model at the shortest horizon that has a solution, else at `t_max`.
fn root_lp(scene: &Scene, facts: &collab_tamp::FactSet, cfg: &PlannerConfig) -> String {
    let graph = build_cmtg(&open_goals(scene), facts, scene, &Default::default());
    let t_max = cfg.t_max.max(1);
    for t in 1..=t_max {
        let model = compile_model(&graph, t);
        if t == t_max || matches!(solve(&model, cfg.node_limit), Ok(SolveStatus::Optimal(_))) {
            return write_lp(&model);
        }
    }
    unreachable!("loop returns at t_max")
}

pub fn cmd_plan(args: &PlanArgs) -> Result<i32, CliError> {
    let scene = read_scene(&args.scene)?;
    let cfg = args.search.config();
    let facts = compute_facts(&scene);
    if let Some(p) = &args.dump_facts {
        let text = serde_json::to_string_pretty(&facts.dump(&scene)).expect("facts serialize");
        write(p, &(text + "\n"))?;
    }
    if let Some(p) = &args.dump_cmtg {
        let graph = build_cmtg(&open_goals(&scene), &facts, &scene, &Default::default());
        let dot = p.extension().is_some_and(|e| e == "dot");
        write(p, &if dot { graph.to_dot(&scene) } else { graph.dump(&scene) })?;
    }
    if let Some(p) = &args.dump_mip {
        write(p, &root_lp(&scene, &facts, &cfg))?;
    }
    let outcome = plan_with_facts(&scene, &facts, &cfg)?;
    if let Some(p) = &args.trace {
        write(p, &outcome.trace_text())?;
    }
    match outcome.result {
        Ok(plan) => {
            let text = plan_to_json(&scene, &plan);
            match &args.out {
                Some(p) => write(p, &text)?,
                None => print!("{text}"),
            }
            Ok(EXIT_OK)
        }
        Err(np) => {
            eprintln!("{np}");
            Ok(EXIT_NO_PLAN)
        }
    }
}

pub fn cmd_validate(scene_path: &Path, plan_path: &Path) -> Result<i32, CliError> {
    let scene = read_scene(scene_path)?;
    let plan = parse_plan(&scene, &read(plan_path)?)
        .map_err(|source| CliError::Doc { path: plan_path.to_path_buf(), source })?;
    let report = validate_plan(&scene, &plan)
        .map_err(|e| CliError::Structure { path: plan_path.to_path_buf(), message: e.to_string() })?;
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    Ok(if report.valid { EXIT_OK } else { EXIT_INVALID })
}

pub fn cmd_render(scene_path: &Path, plan_path: Option<&Path>, svg: &Path) -> Result<i32, CliError> {
    let scene = read_scene(scene_path)?;
    let plan = match plan_path {
        Some(p) => {
            Some(parse_plan(&scene, &read(p)?).map_err(|source| CliError::Doc { path: p.to_path_buf(), source })?)
        }
        None => None,
    };
    write(svg, &render::render_svg(&scene, plan.as_ref()))?;
    Ok(EXIT_OK)
}
