//! Acceptance checks. Runs as a plain binary so the per-criterion lines are
//! always printed; exits nonzero when any criterion fails.

use std::fs;
use std::sync::OnceLock;
use std::time::Instant;

use clap::Parser;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dcmndp::cli::{bench_rows, execute, BenchInstance, Cli, SolverFlags};
use dcmndp::report::{GapTable, Axis, InstanceClass};
use dcmndp::{BenchRow, StdClock, RANDOM_SUITE};
use dcmndp_core::dual::MultiplierVector;
use dcmndp_core::facility_selection::{reduced_facility_costs, solve_ap_y};
use dcmndp_core::fixtures::tri3;
use dcmndp_core::oracle::{
    brute_force_ap_y, brute_force_opt, brute_force_shortest_paths, check_supergradient,
    check_weak_duality,
};
use dcmndp_core::{
    all_pairs_shortest_paths, evaluate_dual, generate_random, run, run_timed, GeneratorParams,
    Instance, Rule, SolverConfig, SolverReport, StopReason, Variant,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn random_params(rng: &mut ChaCha8Rng, max_n: usize, max_m: usize, facilities: usize) -> GeneratorParams {
    let n = rng.gen_range(2..=max_n);
    let hi = max_m.min(n * (n - 1) / 2);
    let m = rng.gen_range(n - 1..=hi);
    GeneratorParams::new(n, m, rng.gen()).with_facilities(facilities)
}

fn weights(rng: &mut ChaCha8Rng, m: usize, scale: f64) -> Vec<f64> {
    (0..m)
        .map(|_| if rng.gen_bool(0.15) { 0.0 } else { rng.gen_range(0.0..scale) })
        .collect()
}

fn shortest_paths_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for case in 0..200 {
        let inst = generate_random(&random_params(&mut rng, 8, 28, 1)).unwrap();
        let n = inst.node_count;
        let w: Vec<f64> = if case % 3 == 0 {
            (0..inst.edge_count()).map(|_| rng.gen_range(0..3) as f64).collect()
        } else {
            weights(&mut rng, inst.edge_count(), 10.0)
        };
        let sp = all_pairs_shortest_paths(&inst, &w);
        let oracle = brute_force_shortest_paths(&inst, &w).unwrap();
        for s in 0..n {
            for t in 0..n {
                worst = worst.max((sp.dist(s, t) - oracle[s * n + t]).abs());
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let msg = format!("200 graphs, max |diff| {worst:e}, {secs:.2} s");
    if worst <= 1e-9 && secs < 30.0 { Ok(msg) } else { Err(msg) }
}

fn facility_selection_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    let mut inexact = 0;
    for _ in 0..200 {
        let levels = rng.gen_range(1..=2);
        let inst = generate_random(&random_params(&mut rng, 8, 12, levels)).unwrap();
        let w = weights(&mut rng, inst.edge_count(), 4.0);
        let costs = reduced_facility_costs(&inst, &w).unwrap();
        let terminals = inst.terminal_set();
        let got = solve_ap_y(&inst, &costs, &terminals).unwrap();
        inexact += usize::from(!got.exact);
        let want = brute_force_ap_y(&inst, &costs, &terminals).unwrap();
        worst = worst.max((got.theta_y - want).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    let msg = format!("200 pairs, max |diff| {worst:e}, {inexact} inexact, {secs:.2} s");
    if worst <= 1e-9 && inexact == 0 && secs < 60.0 { Ok(msg) } else { Err(msg) }
}

fn supergradient_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut violations = 0;
    let mut inexact = 0;
    for _ in 0..10 {
        let n = rng.gen_range(5..=15);
        let m = rng.gen_range(n - 1..=(2 * n).min(n * (n - 1) / 2));
        let inst = generate_random(&GeneratorParams::new(n, m, rng.gen())).unwrap();
        for _ in 0..100 {
            let a = weights(&mut rng, m, 3.0);
            let b = weights(&mut rng, m, 3.0);
            let lambda: f64 = rng.gen_range(0.0..=1.0);
            let mid: Vec<f64> = a.iter().zip(&b).map(|(x, y)| lambda * x + (1.0 - lambda) * y).collect();
            let (a, b, mid) = (
                MultiplierVector::new(a).unwrap(),
                MultiplierVector::new(b).unwrap(),
                MultiplierVector::new(mid).unwrap(),
            );
            match check_supergradient(&inst, &a, &b).unwrap() {
                Some(true) => {}
                Some(false) => violations += 1,
                None => inexact += 1,
            }
            let ea = evaluate_dual(&inst, &a).unwrap();
            let eb = evaluate_dual(&inst, &b).unwrap();
            let em = evaluate_dual(&inst, &mid).unwrap();
            if !(ea.exact_y && eb.exact_y && em.exact_y) {
                inexact += 1;
                continue;
            }
            let chord = lambda * ea.theta + (1.0 - lambda) * eb.theta;
            if em.theta < chord - 1e-6 * (1.0 + chord.abs()) {
                violations += 1;
            }
        }
    }
    let msg = format!("1000 probes on 10 instances, {violations} violations, {inexact} inexact evaluations");
    if violations == 0 && inexact == 0 { Ok(msg) } else { Err(msg) }
}

struct SuiteRun {
    name: String,
    variant: Variant,
    rule: Rule,
    report: SolverReport,
    secs: f64,
}

/// All 36 pairs on the twenty generated instances, computed once.
fn full_suite() -> &'static Vec<SuiteRun> {
    static RUNS: OnceLock<Vec<SuiteRun>> = OnceLock::new();
    RUNS.get_or_init(|| {
        use rayon::prelude::*;
        let instances: Vec<Instance> = RANDOM_SUITE
            .iter()
            .enumerate()
            .map(|(i, &(n, m))| generate_random(&GeneratorParams::new(n, m, i as u64 + 1)).unwrap())
            .collect();
        let mut jobs = Vec::new();
        for inst in &instances {
            for v in Variant::ALL {
                for r in Rule::ALL {
                    jobs.push((inst, v, r));
                }
            }
        }
        jobs.par_iter()
            .map(|&(inst, v, r)| {
                let clock = StdClock::new();
                let report = run_timed(inst, &SolverConfig::new(v, r), &clock).unwrap();
                SuiteRun { name: inst.name.clone(), variant: v, rule: r, secs: report.wall_time_s, report }
            })
            .collect()
    })
}

fn weak_duality() -> Outcome {
    let mut bad = Vec::new();
    for s in full_suite() {
        if !check_weak_duality(&s.report, s.report.upper_bound) {
            bad.push(format!("{} {}{}", s.name, s.variant, s.rule));
        }
    }
    let inst = tri3();
    let opt = brute_force_opt(&inst).unwrap();
    let costs = reduced_facility_costs(&inst, &[0.0; 3]).unwrap();
    let theta0 = brute_force_ap_y(&inst, &costs, &inst.terminal_set()).unwrap();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in Variant::ALL {
        for r in Rule::ALL {
            let rep = run(&inst, &SolverConfig::new(v, r)).unwrap();
            lo = lo.min(rep.best_theta);
            hi = hi.max(rep.best_theta);
            if !check_weak_duality(&rep, rep.upper_bound) || !check_weak_duality(&rep, opt) || rep.best_theta < theta0 {
                bad.push(format!("TRI3 {v}{r}"));
            }
        }
    }
    let msg = format!(
        "{} runs; TRI3 bounds in [{lo}, {hi}] vs [{theta0}, {opt}]; {} violations {:?}",
        full_suite().len() + 36,
        bad.len(),
        bad
    );
    if bad.is_empty() { Ok(msg) } else { Err(msg) }
}

/// Runs on D.1 to D.13 with seeds 1 to 13, sequentially with timing.
fn ordering_rows() -> &'static Vec<BenchRow> {
    static ROWS: OnceLock<Vec<BenchRow>> = OnceLock::new();
    ROWS.get_or_init(|| {
        let instances: Vec<BenchInstance> = RANDOM_SUITE[..13]
            .iter()
            .enumerate()
            .map(|(i, &(n, m))| {
                let inst = generate_random(&GeneratorParams::new(n, m, i as u64 + 1)).unwrap();
                BenchInstance { name: inst.name.clone(), class: InstanceClass::Rand, seed: i as u64 + 1, instance: Ok(inst) }
            })
            .collect();
        let flags = SolverFlags::default();
        let mut rows = bench_rows(&instances, &Variant::ALL, &[Rule::R1], &flags, 1);
        rows.extend(bench_rows(&instances, &[Variant::Sg3, Variant::Sg5], &Rule::ALL, &flags, 1));
        rows
    })
}

fn fmt_means(cols: &[String], vals: &[f64]) -> String {
    cols.iter().zip(vals).map(|(c, v)| format!("{c}={v:.2}")).collect::<Vec<_>>().join(" ")
}

fn variant_ordering() -> Outcome {
    let rows: Vec<BenchRow> = ordering_rows().iter().filter(|r| r.rule == Rule::R1).cloned().collect();
    let t = GapTable::build(Axis::Variants(Rule::R1), &rows);
    let g = &t.rows[0].gap;
    let col = |name: &str| t.columns.iter().position(|c| c == name).unwrap();
    let others = ["SG1", "SG2", "SG4", "SG6"].map(|c| g[col(c)]);
    let ok = ["SG3", "SG5"].iter().all(|c| others.iter().all(|&o| g[col(c)] < o));
    let msg = format!("mean gap under R1 on 13 instances: {}", fmt_means(&t.columns, g));
    if ok { Ok(msg) } else { Err(msg) }
}

fn rule_ordering() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for v in [Variant::Sg3, Variant::Sg5] {
        let rows: Vec<BenchRow> = ordering_rows().iter().filter(|r| r.variant == v).cloned().collect();
        let t = GapTable::build(Axis::Rules(v), &rows);
        let r4 = t.columns.iter().position(|c| c == "R4").unwrap();
        let (g, time) = (&t.rows[0].gap, &t.rows[0].time);
        let gap_ok = (0..g.len()).all(|i| i == r4 || g[r4] < g[i]);
        let time_ok = (0..time.len()).all(|i| i == r4 || time[r4] > time[i]);
        ok &= gap_ok && time_ok;
        parts.push(format!(
            "{v}: gap {} | time {}",
            fmt_means(&t.columns, g),
            t.columns.iter().zip(time).map(|(c, x)| format!("{c}={x:.4}")).collect::<Vec<_>>().join(" ")
        ));
    }
    let msg = parts.join("; ");
    if ok { Ok(msg) } else { Err(msg) }
}

fn determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("dcmndp-acceptance-{}", std::process::id()));
    fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for k in 0..2 {
        let path = dir.join(format!("bench{k}.csv"));
        let cli = Cli::parse_from([
            "dcmndp", "bench", "--random", "4", "--seed", "7", "--variants", "sg1,sg3,sg5",
            "--rules", "r1,r4", "--jobs", "4", "--no-timing", "--out", path.to_str().unwrap(),
        ]);
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = execute(cli, &mut out, &mut err);
        if code != 0 {
            return Err(format!("bench exited with {code}: {}", String::from_utf8_lossy(&err)));
        }
        outputs.push(fs::read(&path).map_err(|e| e.to_string())?);
    }
    let _ = fs::remove_dir_all(&dir);
    let rows = outputs[0].iter().filter(|&&b| b == b'\n').count() - 1;
    let msg = format!("two bench runs, {rows} rows, {} bytes each", outputs[0].len());
    if outputs[0] == outputs[1] && rows == 24 { Ok(msg) } else { Err(msg) }
}

fn termination() -> Outcome {
    let runs = full_suite();
    let capped: Vec<String> = runs
        .iter()
        .filter(|s| s.report.stop_reason == StopReason::IterationCap || s.report.iterations >= 100_000)
        .map(|s| format!("{} {}{}", s.name, s.variant, s.rule))
        .collect();
    let slowest = runs.iter().map(|s| s.secs).fold(0.0, f64::max);
    let most = runs.iter().map(|s| s.report.iterations).max().unwrap_or(0);
    let msg = format!(
        "{} runs, {} at the cap, max {most} iterations, slowest {slowest:.3} s",
        runs.len(),
        capped.len()
    );
    if capped.is_empty() && slowest < 10.0 { Ok(msg) } else { Err(msg) }
}

fn sg1_degeneracy() -> Outcome {
    let mut iterations = 0;
    let mut mismatches = 0;
    let mut instances = vec![tri3()];
    for (i, &(n, m)) in RANDOM_SUITE[..4].iter().enumerate() {
        instances.push(generate_random(&GeneratorParams::new(n, m, i as u64 + 1)).unwrap());
    }
    for inst in &instances {
        for r in Rule::ALL {
            let mut cfg = SolverConfig::new(Variant::Sg1, r);
            cfg.record_vectors = true;
            let rep = run(inst, &cfg).unwrap();
            for rec in &rep.trajectory {
                if let Some(d) = &rec.direction {
                    iterations += 1;
                    if Some(d) != rec.subgradient.as_ref() {
                        mismatches += 1;
                    }
                }
            }
        }
    }
    let msg = format!("{iterations} recorded directions, {mismatches} differ from the subgradient");
    if mismatches == 0 && iterations > 0 { Ok(msg) } else { Err(msg) }
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("shortest paths match enumeration", shortest_paths_oracle),
        ("facility selection matches enumeration", facility_selection_oracle),
        ("supergradient and concavity", supergradient_suite),
        ("weak duality", weak_duality),
        ("SG3 and SG5 lead under R1", variant_ordering),
        ("R4 best and slowest for SG3 and SG5", rule_ordering),
        ("bench output is deterministic", determinism),
        ("every run stops before the cap", termination),
        ("SG1 directions equal subgradients", sg1_degeneracy),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (status, detail) = match check() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {} [{status}] {name}: {detail}", i + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
