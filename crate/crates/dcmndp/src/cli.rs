//! Subcommands of the `dcmndp` binary. Each returns the process exit code:
//! 0 on success, 1 for invalid input, 2 for I/O failures and 3 when the
//! instance is infeasible.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use dcmndp_core::{
    generate_random, run, run_timed, DirectionRule, GeneratorParams, Instance, IterationRecord,
    Rule, SolverConfig, SolverError, SolverReport, Variant,
};

use crate::format::{parse_instance, serialize_instance};
use crate::report::{assign_gaps, fmt_g, tables_for, write_csv, BenchRow, InstanceClass, RunStats, CSV_HEADER};
use crate::{StdClock, RANDOM_SUITE};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "dcmndp", version, about = "Lagrangian lower bounds for discrete cost multicommodity network design")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a seeded random instance.
    Generate(GenerateArgs),
    /// Check an instance file and list every violated invariant.
    Validate {
        path: PathBuf,
    },
    /// Compute a lower bound for one instance.
    Solve(SolveArgs),
    /// Run every (instance, variant, rule) combination and compare.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub nodes: usize,
    #[arg(long)]
    pub edges: usize,
    #[arg(long, default_value_t = 3)]
    pub facilities: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolverFlags {
    /// Weight of the current subgradient in the sg6 direction.
    #[arg(long, default_value_t = dcmndp_core::engine::direction::DEFAULT_ALPHA)]
    pub alpha: f64,
    #[arg(long, default_value_t = 100)]
    pub max_stall: usize,
    /// Upper bound for the step length instead of the built-in heuristic.
    #[arg(long)]
    pub ub: Option<f64>,
    /// Report zero wall time, making the output reproducible byte for byte.
    #[arg(long)]
    pub no_timing: bool,
}

impl Default for SolverFlags {
    fn default() -> Self {
        SolverFlags {
            alpha: dcmndp_core::engine::direction::DEFAULT_ALPHA,
            max_stall: 100,
            ub: None,
            no_timing: false,
        }
    }
}

impl SolverFlags {
    fn config(&self, variant: Variant, rule: Rule) -> SolverConfig {
        let mut cfg = SolverConfig::new(variant, rule);
        cfg.direction = DirectionRule::new(variant).with_alpha(self.alpha);
        cfg.max_stall = self.max_stall;
        cfg.upper_bound = self.ub;
        cfg
    }

    fn run(&self, inst: &Instance, cfg: &SolverConfig) -> Result<SolverReport, SolverError> {
        if self.no_timing {
            run(inst, cfg)
        } else {
            run_timed(inst, cfg, &StdClock::new())
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub path: PathBuf,
    #[arg(long, default_value = "sg3")]
    pub variant: Variant,
    #[arg(long, default_value = "r1")]
    pub rule: Rule,
    /// Recorded in the seed column.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Print one CSV line per iteration before the result.
    #[arg(long)]
    pub trace: bool,
    /// Human readable result instead of CSV.
    #[arg(long)]
    pub pretty: bool,
    /// Write the result here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverFlags,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Instance files or glob patterns, reported in the Rand. class.
    pub instances: Vec<String>,
    /// Instance files or glob patterns reported in the Real. class.
    #[arg(long, value_name = "PATTERN")]
    pub real: Vec<String>,
    /// Also generate the first COUNT instances of the random suite, seeded
    /// `seed`, `seed + 1`, ...
    #[arg(long, value_name = "COUNT")]
    pub random: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, alias = "variant", value_delimiter = ',', default_value = "sg1,sg2,sg3,sg4,sg5,sg6")]
    pub variants: Vec<Variant>,
    #[arg(long, alias = "rule", value_delimiter = ',', default_value = "r1,r2,r3,r4,r5,r6")]
    pub rules: Vec<Rule>,
    /// CSV output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Markdown tables file; standard output when `--out` is given, standard
    /// error otherwise.
    #[arg(long)]
    pub tables: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[command(flatten)]
    pub solver: SolverFlags,
}

pub fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::Generate(a) => generate(&a, out),
        Command::Validate { path } => validate(&path, out),
        Command::Solve(a) => solve(&a, out),
        Command::Bench(a) => bench(&a, out, err),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure(code, message)) => {
            let _ = writeln!(err, "error: {message}");
            code
        }
    }
}

struct Failure(i32, String);

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure(EXIT_IO, format!("cannot open {}: {e}", path.display()))
}

fn write_failure(e: std::io::Error) -> Failure {
    Failure(EXIT_IO, format!("cannot write output: {e}"))
}

fn emit(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure(EXIT_IO, format!("cannot write {}: {e}", p.display()))),
        None => out.write_all(text.as_bytes()).map_err(write_failure),
    }
}

fn instance_name(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| io_failure(path, e))
}

fn load(path: &Path) -> Result<Instance, Failure> {
    let text = read(path)?;
    parse_instance(&text, &instance_name(path)).map_err(|e| Failure(EXIT_INVALID, format!("{}: {e}", path.display())))
}

fn generate(a: &GenerateArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let params = GeneratorParams::new(a.nodes, a.edges, a.seed).with_facilities(a.facilities);
    let inst = generate_random(&params).map_err(|e| Failure(EXIT_INVALID, e.to_string()))?;
    emit(a.out.as_deref(), &serialize_instance(&inst), out)
}

fn validate(path: &Path, out: &mut dyn Write) -> Result<(), Failure> {
    let text = read(path)?;
    let inst = crate::format::parse_unchecked(&text, &instance_name(path))
        .map_err(|e| Failure(EXIT_INVALID, format!("{}: {e}", path.display())))?;
    let violations = inst.validate();
    if violations.is_empty() {
        writeln!(out, "OK").map_err(write_failure)?;
        return Ok(());
    }
    for v in &violations {
        writeln!(out, "{v}").map_err(write_failure)?;
    }
    Err(Failure(EXIT_INVALID, format!("{} violation(s) in {}", violations.len(), path.display())))
}

fn solver_failure(e: SolverError) -> Failure {
    match e {
        SolverError::Infeasible(_) => Failure(EXIT_INFEASIBLE, e.to_string()),
        _ => Failure(EXIT_INVALID, e.to_string()),
    }
}

pub const TRACE_HEADER: &str = "q,theta,best_theta,beta,lambda,grad_norm,dir_norm,exact_y";

fn trace_line(r: &IterationRecord) -> String {
    format!(
        "{},{},{},{},{},{},{},{}",
        r.q,
        fmt_g(r.theta),
        fmt_g(r.best_theta),
        fmt_g(r.beta),
        fmt_g(r.lambda),
        fmt_g(r.grad_norm),
        fmt_g(r.dir_norm),
        r.exact_y
    )
}

fn solve(a: &SolveArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let inst = load(&a.path)?;
    let cfg = a.solver.config(a.variant, a.rule);
    let report = a.solver.run(&inst, &cfg).map_err(solver_failure)?;
    let mut row = BenchRow::new(&inst.name, a.variant, a.rule, a.seed, Ok(RunStats::from(&report)));
    assign_gaps(std::slice::from_mut(&mut row));

    let mut text = String::new();
    if a.trace {
        text.push_str(TRACE_HEADER);
        text.push('\n');
        for r in &report.trajectory {
            text.push_str(&trace_line(r));
            text.push('\n');
        }
        text.push('\n');
    }
    if a.pretty {
        let s = RunStats::from(&report);
        let fields = [
            ("instance", inst.name.clone()),
            ("variant", a.variant.to_string()),
            ("rule", a.rule.to_string()),
            ("lower bound", fmt_g(s.best_lb)),
            ("upper bound", format!("{}{}", fmt_g(s.ub), if report.ub_feasible { "" } else { " (not certified)" })),
            ("iterations", s.iterations.to_string()),
            ("wall time (s)", fmt_g(s.wall_time_s)),
            ("stop reason", s.stop_reason.to_string()),
            ("exact AP_y", s.all_y_exact.to_string()),
        ];
        for (k, v) in fields {
            text.push_str(&format!("{k:<14}{v}\n"));
        }
    } else {
        text.push_str(CSV_HEADER);
        text.push('\n');
        text.push_str(&row.csv_line());
        text.push('\n');
    }
    emit(a.out.as_deref(), &text, out)
}

/// One benchmark input; `instance` holds the load error when it failed.
pub struct BenchInstance {
    pub name: String,
    pub class: InstanceClass,
    pub seed: u64,
    pub instance: Result<Instance, String>,
}

fn collect_instances(a: &BenchArgs) -> Result<Vec<BenchInstance>, Failure> {
    let mut found = Vec::new();
    let patterns = a
        .instances
        .iter()
        .map(|p| (p, InstanceClass::Rand))
        .chain(a.real.iter().map(|p| (p, InstanceClass::Real)));
    for (pattern, class) in patterns {
        let paths = glob::glob(pattern).map_err(|e| Failure(EXIT_INVALID, format!("bad pattern {pattern}: {e}")))?;
        let mut paths: Vec<PathBuf> = paths.filter_map(Result::ok).collect();
        if paths.is_empty() {
            // a plain path that does not exist still gets its error rows
            paths.push(PathBuf::from(pattern));
        }
        paths.sort();
        for p in paths {
            let instance = load(&p).map_err(|Failure(_, m)| m);
            found.push(BenchInstance { name: instance_name(&p), class, seed: a.seed, instance });
        }
    }
    for i in 0..a.random.unwrap_or(0) {
        let (n, m) = RANDOM_SUITE[i % RANDOM_SUITE.len()];
        let seed = a.seed + i as u64;
        let instance = generate_random(&GeneratorParams::new(n, m, seed)).map_err(|e| e.to_string());
        let name = instance.as_ref().map(|x| x.name.clone()).unwrap_or_else(|_| format!("rand-n{n}-m{m}-s{seed}"));
        found.push(BenchInstance { name, class: InstanceClass::Rand, seed, instance });
    }
    if found.is_empty() {
        return Err(Failure(EXIT_INVALID, "no instances given".into()));
    }
    found.sort_by(|x, y| x.name.cmp(&y.name).then(x.seed.cmp(&y.seed)));
    Ok(found)
}

/// Runs the cross product and returns rows ordered by instance, variant and
/// rule, with gaps filled in.
pub fn bench_rows(
    instances: &[BenchInstance],
    variants: &[Variant],
    rules: &[Rule],
    solver: &SolverFlags,
    jobs: usize,
) -> Vec<BenchRow> {
    let mut variants = variants.to_vec();
    variants.sort();
    variants.dedup();
    let mut rules = rules.to_vec();
    rules.sort();
    rules.dedup();
    let mut triples: Vec<(usize, Variant, Rule)> = Vec::new();
    for i in 0..instances.len() {
        for &v in &variants {
            for &r in &rules {
                triples.push((i, v, r));
            }
        }
    }
    let work = |&(i, v, r): &(usize, Variant, Rule)| {
        let b = &instances[i];
        let outcome = b.instance.as_ref().map_err(Clone::clone).and_then(|inst| {
            solver
                .run(inst, &solver.config(v, r))
                .map(|rep| RunStats::from(&rep))
                .map_err(|e| e.to_string())
        });
        BenchRow::new(&b.name, v, r, b.seed, outcome).with_class(b.class)
    };
    let mut rows: Vec<BenchRow> = match rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build() {
        Ok(pool) => pool.install(|| triples.par_iter().map(work).collect()),
        Err(_) => triples.iter().map(work).collect(),
    };
    assign_gaps(&mut rows);
    rows
}

fn bench(a: &BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    if a.variants.is_empty() || a.rules.is_empty() {
        return Err(Failure(EXIT_INVALID, "need at least one variant and one rule".into()));
    }
    let instances = collect_instances(a)?;
    let rows = bench_rows(&instances, &a.variants, &a.rules, &a.solver, a.jobs);
    for r in &rows {
        if let Err(e) = &r.outcome {
            let _ = writeln!(err, "warning: {} {} {}: {e}", r.instance, r.variant, r.rule);
        }
    }

    let mut variants = a.variants.clone();
    variants.sort();
    variants.dedup();
    let mut rules = a.rules.clone();
    rules.sort();
    rules.dedup();
    let tables: Vec<String> = tables_for(&rows, &variants, &rules).iter().map(|t| t.to_markdown()).collect();
    let tables = tables.join("\n");

    emit(a.out.as_deref(), &write_csv(&rows), out)?;
    match (&a.tables, &a.out) {
        (Some(p), _) => emit(Some(p), &tables, out),
        (None, Some(_)) => emit(None, &tables, out),
        (None, None) => emit(None, &tables, err),
    }
}
