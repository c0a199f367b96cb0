use std::collections::BTreeMap;
use std::fmt::Write as _;

use recapc_core::gen::{generate, GenConfig};
use recapc_core::Result;

use crate::args::{BenchArgs, Order, SolverName};
use crate::commands::{run_solver, Output};

#[derive(Debug, Clone)]
pub struct BenchRecord {
    pub instance: String,
    pub types: usize,
    pub categories: usize,
    pub run: u64,
    pub solver: SolverName,
    pub epsilon: f64,
    pub millis: Option<f64>,
    pub value: Option<f64>,
    pub nodes_expanded: Option<u64>,
    pub status: String,
}

pub const HEADER: &str = "instance,types,categories,solver,epsilon,millis,value,nodes_expanded,status";

impl BenchRecord {
    fn csv_row(&self) -> String {
        let opt = |v: Option<String>| v.unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.instance,
            self.types,
            self.categories,
            self.solver.label(),
            self.epsilon,
            opt(self.millis.map(|m| format!("{m:.3}"))),
            opt(self.value.map(|v| v.to_string())),
            opt(self.nodes_expanded.map(|n| n.to_string())),
            self.status
        )
    }
}

/// Generator seed for one benchmark instance.
fn instance_seed(seed: u64, types: usize, categories: usize, run: u64) -> u64 {
    let mut z = seed ^ ((types as u64) << 48) ^ ((categories as u64) << 32) ^ run;
    // splitmix64 finalizer
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn is_exact(solver: SolverName) -> bool {
    !matches!(solver, SolverName::DpGrid)
}

pub fn run_bench(args: &BenchArgs) -> Result<Vec<BenchRecord>> {
    let mut records = Vec::new();
    for types in args.types.0..=args.types.1 {
        for categories in args.categories.0..=args.categories.1 {
            for run in 0..args.runs {
                let cfg = GenConfig {
                    clip_high: args.clip_high,
                    ..GenConfig::new(types, categories, instance_seed(args.seed, types, categories, run))
                };
                let inst = generate(&cfg)?;
                let id = format!("m{types}k{categories}r{run}");
                for &solver in &args.solvers {
                    let outcome = run_solver(&inst, solver, args.eps, None, None, Order::Fifo);
                    let (millis, value, nodes, status) = match outcome {
                        Ok(s) => (Some(s.millis), Some(s.value), s.nodes_expanded, "ok".to_string()),
                        Err(e) => (None, None, None, e.code().to_string()),
                    };
                    records.push(BenchRecord {
                        instance: id.clone(),
                        types,
                        categories,
                        run,
                        solver,
                        epsilon: args.eps,
                        millis,
                        value,
                        nodes_expanded: nodes,
                        status,
                    });
                }
            }
        }
    }
    records.sort_by(|a, b| {
        (a.types, a.categories, a.run, a.solver.label()).cmp(&(b.types, b.categories, b.run, b.solver.label()))
    });
    Ok(records)
}

pub fn to_csv(records: &[BenchRecord]) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

/// Per-cell mean times and the fraction of instances on which the exact solvers agree.
pub fn summary(records: &[BenchRecord], eps: f64) -> String {
    let mut times: BTreeMap<(usize, usize, &str), (f64, u64, u64)> = BTreeMap::new();
    let mut values: BTreeMap<(usize, usize, u64), Vec<f64>> = BTreeMap::new();
    for r in records {
        let entry = times.entry((r.types, r.categories, r.solver.label())).or_default();
        entry.2 += 1;
        if let Some(m) = r.millis {
            entry.0 += m;
            entry.1 += 1;
        }
        if let (Some(v), true) = (r.value, is_exact(r.solver)) {
            values.entry((r.types, r.categories, r.run)).or_default().push(v);
        }
    }
    let mut agree: BTreeMap<(usize, usize), (u64, u64)> = BTreeMap::new();
    for ((types, categories, _), vals) in &values {
        if vals.len() < 2 {
            continue;
        }
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let e = agree.entry((*types, *categories)).or_default();
        e.1 += 1;
        if hi - lo <= eps + 1e-9 {
            e.0 += 1;
        }
    }
    let mut out = String::new();
    for ((types, categories, solver), (sum, ok, total)) in &times {
        let mean = if *ok > 0 { format!("{:.3}", sum / *ok as f64) } else { "-".into() };
        let _ = writeln!(
            out,
            "types={types} categories={categories} solver={solver} solved={ok}/{total} mean_millis={mean}"
        );
    }
    for ((types, categories), (ok, total)) in &agree {
        let _ = writeln!(out, "types={types} categories={categories} exact_agreement={ok}/{total}");
    }
    out
}

pub fn bench(args: &BenchArgs, out: &Output) -> Result<()> {
    if !(args.eps > 0.0 && args.eps.is_finite()) {
        return Err(recapc_core::Error::InvalidArgument(format!("--eps must be positive, got {}", args.eps)));
    }
    let records = run_bench(args)?;
    let path = out.write(&args.out, &to_csv(&records))?;
    print!("{}", summary(&records, args.eps));
    println!("wrote {}", path.display());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_differ_across_cells() {
        let a = instance_seed(1, 3, 3, 0);
        assert_ne!(a, instance_seed(1, 3, 3, 1));
        assert_ne!(a, instance_seed(1, 3, 4, 0));
        assert_ne!(a, instance_seed(2, 3, 3, 0));
        assert_eq!(a, instance_seed(1, 3, 3, 0));
    }
}
