use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::json;

use recapc_core::analysis::{optimal_walk, ternary_svg, trace_policy, WalkTrace};
use recapc_core::gen::{generate, paper_fixture, GenConfig};
use recapc_core::sim::simulate;
use recapc_core::solvers::{
    best_fixed_prefix, grid_error_bound, grid_resolution_for_epsilon, myopic_prefix, solve_bb_with,
    solve_brute_force, solve_grid_dp, solve_multiset_dp, BbOptions, GridDPConfig, QueueOrder,
};
use recapc_core::value::{horizon_for_epsilon, parse_policy, value_extended, ExtendedPolicy, PolicyPrefix};
use recapc_core::{Error, Instance, Result, SeparatorReport};

use crate::args::{EvalArgs, GenArgs, Order, SeparatorArgs, SimulateArgs, SolveArgs, SolverName, WalkArgs, WalkPolicy};

/// Output locations; relative paths land under the configured directory when there is one.
pub struct Output {
    dir: Option<PathBuf>,
}

impl Output {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Output { dir }
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        match &self.dir {
            Some(dir) if path.is_relative() => dir.join(path),
            _ => path.to_path_buf(),
        }
    }

    pub fn write(&self, path: &Path, contents: &str) -> Result<PathBuf> {
        let path = self.resolve(path);
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent).map_err(|e| Error::Io(format!("{}: {e}", parent.display())))?;
        }
        std::fs::write(&path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Ok(path)
    }
}

fn check_epsilon(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument(format!("--eps must be positive, got {eps}")));
    }
    Ok(())
}

pub fn separator_lines(report: &SeparatorReport) -> String {
    format!(
        "cross_type_gap\t{}\ntop_two_gap\t{}\none_minus_pmax\t{}\nseparator\t{}\nwell_separated\t{}\n",
        report.cross_type_gap,
        report.top_two_gap,
        report.one_minus_pmax,
        report.separator,
        report.is_well_separated()
    )
}

pub fn gen(args: &GenArgs, out: &Output) -> Result<()> {
    let inst = match &args.fixture {
        Some(name) => paper_fixture(name)?,
        None => {
            let cfg = GenConfig {
                num_types: args.types.unwrap_or(0) as usize,
                num_categories: args.categories.unwrap_or(0) as usize,
                latent_dim: args.latent_dim,
                seed: args.seed,
                clip_low: args.clip_low,
                clip_high: args.clip_high,
                prior_logit_std: args.prior_logit_std,
            };
            generate(&cfg)?
        }
    };
    let path = out.write(&args.out, &inst.to_json())?;
    println!("wrote {}", path.display());
    print!("{}", separator_lines(&inst.separator()));
    Ok(())
}

/// A solver run reduced to what gets reported.
pub struct Solved {
    pub value: f64,
    pub millis: f64,
    pub nodes_expanded: Option<u64>,
    pub json: serde_json::Value,
}

pub fn run_solver(
    inst: &Instance,
    solver: SolverName,
    eps: f64,
    horizon: Option<usize>,
    resolution: Option<f64>,
    order: Order,
) -> Result<Solved> {
    check_epsilon(eps)?;
    let horizon = match horizon {
        Some(h) => h,
        None => horizon_for_epsilon(inst, eps)?,
    };
    let finite = |value: f64, prefix: PolicyPrefix, millis: f64| {
        json!({
            "solver": solver.label(),
            "value": value,
            "epsilon": eps,
            "horizon": horizon,
            "prefix": prefix.names(inst),
            "stats": { "millis": millis },
        })
    };
    let start = Instant::now();
    let solved = match solver {
        SolverName::Bb => {
            let opts = BbOptions {
                order: match order {
                    Order::Fifo => QueueOrder::Fifo,
                    Order::BestFirst => QueueOrder::BestFirst,
                },
                record_history: false,
            };
            let res = solve_bb_with(inst, &inst.prior_belief(), eps, &opts)?;
            let mut json = res.to_json(inst);
            json["solver"] = json!(solver.label());
            Solved {
                value: res.value,
                millis: res.stats.elapsed.as_secs_f64() * 1e3,
                nodes_expanded: Some(res.stats.nodes_expanded),
                json,
            }
        }
        SolverName::DpMultiset => {
            let (value, prefix) = solve_multiset_dp(inst, horizon)?;
            let millis = start.elapsed().as_secs_f64() * 1e3;
            Solved {
                value,
                millis,
                nodes_expanded: None,
                json: finite(value, prefix, millis),
            }
        }
        SolverName::Brute => {
            let (value, prefix) = solve_brute_force(inst, &inst.prior_belief(), horizon)?;
            let millis = start.elapsed().as_secs_f64() * 1e3;
            Solved {
                value,
                millis,
                nodes_expanded: None,
                json: finite(value, prefix, millis),
            }
        }
        SolverName::DpGrid => {
            let resolution = resolution.unwrap_or_else(|| grid_resolution_for_epsilon(inst, eps));
            let cfg = GridDPConfig::new(resolution, horizon)?;
            let (value, prefix) = solve_grid_dp(inst, &cfg)?;
            let millis = start.elapsed().as_secs_f64() * 1e3;
            let mut json = finite(value, prefix, millis);
            json["resolution"] = json!(resolution);
            json["error_bound"] = json!(grid_error_bound(inst, &cfg).ok());
            Solved {
                value,
                millis,
                nodes_expanded: None,
                json,
            }
        }
    };
    Ok(solved)
}

pub fn solve(args: &SolveArgs, out: &Output) -> Result<()> {
    let inst = Instance::load(&args.instance)?;
    let solved = run_solver(&inst, args.solver, args.eps, args.horizon, args.resolution, args.order)?;
    let j = &solved.json;
    let mut line = format!("solver={} value={}", args.solver.label(), solved.value);
    let prefix: Vec<String> = j["prefix"]
        .as_array()
        .map(|a| a.iter().filter_map(|v| v.as_str().map(str::to_string)).collect())
        .unwrap_or_default();
    line.push_str(&format!(" prefix=[{}]", prefix.join(",")));
    if let Some(tail) = j["tail"].as_str() {
        line.push_str(&format!(" tail={tail}"));
    }
    if let Some(n) = solved.nodes_expanded {
        line.push_str(&format!(" nodes_expanded={n}"));
    }
    println!("{line} millis={:.3}", solved.millis);
    if let Some(path) = &args.out {
        let text = serde_json::to_string_pretty(j).expect("json") + "\n";
        let path = out.write(path, &text)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

pub fn walk(args: &WalkArgs, out: &Output) -> Result<()> {
    check_epsilon(args.eps)?;
    let inst = Instance::load(&args.instance)?;
    if args.svg.is_some() && inst.num_types() != 3 {
        return Err(Error::InvalidArgument(format!(
            "--svg requires exactly 3 types, instance has {}",
            inst.num_types()
        )));
    }
    let q = inst.prior_belief();
    let policy_name = match args.policy {
        WalkPolicy::Optimal => "optimal",
        WalkPolicy::Myopic => "myopic",
        WalkPolicy::Bfa => "bfa",
    };
    let (trace, mut metadata): (WalkTrace, Vec<(&str, String)>) = match args.policy {
        WalkPolicy::Optimal => {
            let rep = optimal_walk(&inst, args.eps, args.max_steps)?;
            let meta = rep.metadata(&inst);
            (rep.walk, meta)
        }
        WalkPolicy::Myopic | WalkPolicy::Bfa => {
            if args.max_steps == 0 {
                return Err(Error::InvalidArgument("--max-steps must be at least 1".into()));
            }
            let prefix = if args.policy == WalkPolicy::Myopic {
                myopic_prefix(&inst, &q, args.max_steps)?
            } else {
                best_fixed_prefix(&inst, &q, args.max_steps)?
            };
            let tail = *prefix.as_slice().last().expect("non-empty");
            let trace = trace_policy(&inst, &q, &ExtendedPolicy::new(prefix, tail), args.max_steps)?;
            (trace, Vec::new())
        }
    };
    let terminal = trace.end.mode();
    metadata.insert(0, ("policy", policy_name.to_string()));
    metadata.push(("terminal_vertex", inst.type_names()[terminal].clone()));
    let path = out.write(&args.out, &trace.to_csv(&inst, &metadata))?;
    let summary: Vec<String> = metadata.iter().map(|(k, v)| format!("{k}={v}")).collect();
    println!("{} steps={}", summary.join(" "), trace.len());
    println!("wrote {}", path.display());
    if let Some(svg_path) = &args.svg {
        let path = out.write(svg_path, &ternary_svg(&inst, &trace)?)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

pub fn simulate_cmd(args: &SimulateArgs, out: &Output) -> Result<()> {
    let inst = Instance::load(&args.instance)?;
    let policy = parse_policy(&inst, &args.policy)?;
    let stats = simulate(&inst, &policy, args.sessions, args.seed)?;
    let analytic = value_extended(&inst, &inst.prior_belief(), &policy)?;
    let within = (stats.mean_likes - analytic).abs() <= 3.0 * stats.std_error;
    println!(
        "sessions={} mean_likes={} std_error={} analytic={} within_3se={} max_length={}",
        stats.sessions,
        stats.mean_likes,
        stats.std_error,
        analytic,
        within,
        stats.max_length()
    );
    if let Some(path) = &args.out {
        let text = format!("{}analytic\t{analytic}\n", stats.to_tsv(&inst));
        let path = out.write(path, &text)?;
        println!("wrote {}", path.display());
    }
    if let Some(path) = &args.histogram {
        let path = out.write(path, &stats.histogram_csv())?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

pub fn eval(args: &EvalArgs) -> Result<()> {
    let inst = Instance::load(&args.instance)?;
    let policy = parse_policy(&inst, &args.policy)?;
    println!("{}", value_extended(&inst, &inst.prior_belief(), &policy)?);
    Ok(())
}

pub fn separator(args: &SeparatorArgs) -> Result<()> {
    let inst = Instance::load(&args.instance)?;
    print!("{}", separator_lines(&inst.separator()));
    Ok(())
}
