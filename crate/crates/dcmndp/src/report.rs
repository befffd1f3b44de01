//! Benchmark rows, their CSV form and the markdown comparison tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use dcmndp_core::{Rule, SolverReport, StopReason, Variant};

pub const CSV_HEADER: &str =
    "instance,variant,rule,best_lb,ub,gap_pct,iterations,wall_time_s,stop_reason,all_y_exact,seed";

/// `printf("%g")`: six significant digits, trailing zeros dropped, exponent
/// form outside `1e-4 <= |x| < 1e6`.
pub fn fmt_g(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.5e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if !(-4..6).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (5 - exp) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum InstanceClass {
    Rand,
    Real,
}

impl InstanceClass {
    pub fn label(self) -> &'static str {
        match self {
            InstanceClass::Rand => "Rand.",
            InstanceClass::Real => "Real.",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunStats {
    pub best_lb: f64,
    pub ub: f64,
    pub iterations: usize,
    pub wall_time_s: f64,
    pub stop_reason: StopReason,
    pub all_y_exact: bool,
}

impl From<&SolverReport> for RunStats {
    fn from(r: &SolverReport) -> Self {
        RunStats {
            best_lb: r.best_theta,
            ub: r.upper_bound,
            iterations: r.iterations,
            wall_time_s: r.wall_time_s,
            stop_reason: r.stop_reason,
            all_y_exact: r.all_y_exact,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub instance: String,
    pub class: InstanceClass,
    pub variant: Variant,
    pub rule: Rule,
    pub seed: u64,
    /// The error message when the run failed.
    pub outcome: Result<RunStats, String>,
    pub gap_pct: f64,
    /// The gap is an absolute difference because the best bound was not positive.
    pub gap_absolute: bool,
}

impl BenchRow {
    pub fn new(instance: &str, variant: Variant, rule: Rule, seed: u64, outcome: Result<RunStats, String>) -> Self {
        BenchRow { instance: instance.to_string(), class: InstanceClass::Rand, variant, rule, seed, outcome, gap_pct: 0.0, gap_absolute: false }
    }

    pub fn with_class(mut self, class: InstanceClass) -> Self {
        self.class = class;
        self
    }

    pub fn csv_line(&self) -> String {
        let head = format!("{},{},{}", csv_field(&self.instance), self.variant, self.rule);
        match &self.outcome {
            Ok(s) => format!(
                "{head},{},{},{},{},{},{},{},{}",
                fmt_g(s.best_lb),
                fmt_g(s.ub),
                fmt_g(self.gap_pct),
                s.iterations,
                fmt_g(s.wall_time_s),
                s.stop_reason,
                s.all_y_exact,
                self.seed
            ),
            Err(_) => format!("{head},,,,,,error,,{}", self.seed),
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn write_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_line());
        out.push('\n');
    }
    out
}

/// Gap of `lb` against the best bound `best`, in percent when `best > 0` and
/// as a plain difference otherwise (second field).
pub fn gap(lb: f64, best: f64) -> (f64, bool) {
    if best > 0.0 {
        (100.0 * (best - lb) / best, false)
    } else {
        (best - lb, true)
    }
}

/// Fills `gap_pct` of every successful row against the best bound on the
/// same instance among `rows`.
pub fn assign_gaps(rows: &mut [BenchRow]) {
    let mut best: BTreeMap<String, f64> = BTreeMap::new();
    for r in rows.iter() {
        if let Ok(s) = &r.outcome {
            let b = best.entry(r.instance.clone()).or_insert(f64::NEG_INFINITY);
            *b = b.max(s.best_lb);
        }
    }
    for r in rows.iter_mut() {
        if let Ok(s) = &r.outcome {
            let (g, absolute) = gap(s.best_lb, best[&r.instance]);
            r.gap_pct = g;
            r.gap_absolute = absolute;
        }
    }
}

/// What the table columns range over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// Variants across the columns for one rule.
    Variants(Rule),
    /// Rules across the columns for one variant.
    Rules(Variant),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub label: &'static str,
    pub gap: Vec<f64>,
    pub time: Vec<f64>,
    pub flagged: Vec<bool>,
}

/// Mean gap and wall time per column and instance class. Gaps are taken
/// against the best bound among this table's columns.
#[derive(Debug, Clone, PartialEq)]
pub struct GapTable {
    pub axis: Axis,
    pub columns: Vec<String>,
    pub rows: Vec<TableRow>,
}

impl GapTable {
    pub fn build(axis: Axis, rows: &[BenchRow]) -> GapTable {
        let mut keys: Vec<(usize, String)> = Vec::new();
        let mut picked: Vec<(&BenchRow, usize, &RunStats)> = Vec::new();
        for r in rows {
            let (selected, key) = match axis {
                Axis::Variants(rule) => (r.rule == rule, (r.variant as usize, r.variant.tag().to_uppercase())),
                Axis::Rules(variant) => (r.variant == variant, (r.rule as usize, r.rule.tag().to_uppercase())),
            };
            if let (true, Ok(s)) = (selected, &r.outcome) {
                if !keys.contains(&key) {
                    keys.push(key.clone());
                }
                picked.push((r, key.0, s));
            }
        }
        keys.sort();
        let col = |k: usize| keys.iter().position(|(i, _)| *i == k).expect("column");

        let mut best: BTreeMap<&str, f64> = BTreeMap::new();
        for (r, _, s) in &picked {
            let b = best.entry(r.instance.as_str()).or_insert(f64::NEG_INFINITY);
            *b = b.max(s.best_lb);
        }

        let width = keys.len();
        // per class: summed gaps, summed times, counts, flags
        type Sums = (Vec<f64>, Vec<f64>, Vec<usize>, Vec<bool>);
        let mut classes: BTreeMap<InstanceClass, Sums> = BTreeMap::new();
        for (r, k, s) in &picked {
            let entry = classes
                .entry(r.class)
                .or_insert_with(|| (vec![0.0; width], vec![0.0; width], vec![0; width], vec![false; width]));
            let c = col(*k);
            let (g, absolute) = gap(s.best_lb, best[r.instance.as_str()]);
            entry.0[c] += g;
            entry.1[c] += s.wall_time_s;
            entry.2[c] += 1;
            entry.3[c] |= absolute;
        }
        let mut table_rows: Vec<TableRow> = classes
            .into_iter()
            .map(|(class, (g, t, n, flagged))| TableRow {
                label: class.label(),
                gap: g.iter().zip(&n).map(|(x, &c)| if c > 0 { x / c as f64 } else { f64::NAN }).collect(),
                time: t.iter().zip(&n).map(|(x, &c)| if c > 0 { x / c as f64 } else { f64::NAN }).collect(),
                flagged,
            })
            .collect();
        if table_rows.len() > 1 {
            let k = table_rows.len() as f64;
            let mean = |pick: fn(&TableRow) -> &Vec<f64>| -> Vec<f64> {
                (0..width).map(|c| table_rows.iter().map(|r| pick(r)[c]).sum::<f64>() / k).collect()
            };
            let gap = mean(|r| &r.gap);
            let time = mean(|r| &r.time);
            let flagged = (0..width).map(|c| table_rows.iter().any(|r| r.flagged[c])).collect();
            table_rows.push(TableRow { label: "Aver.", gap, time, flagged });
        }
        GapTable { axis, columns: keys.into_iter().map(|(_, name)| name).collect(), rows: table_rows }
    }

    fn subject(&self) -> String {
        match self.axis {
            Axis::Variants(rule) => rule.tag().to_uppercase(),
            Axis::Rules(variant) => variant.tag().to_uppercase(),
        }
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let header = |out: &mut String, title: String| {
            let _ = writeln!(out, "{title}\n");
            let _ = writeln!(out, "| Inst. | {} |", self.columns.join(" | "));
            let _ = writeln!(out, "|---|{}", "---:|".repeat(self.columns.len()));
        };
        header(&mut out, format!("Average GAP (%) using {}", self.subject()));
        let mut any_flag = false;
        for r in &self.rows {
            let cells: Vec<String> = r
                .gap
                .iter()
                .zip(&r.flagged)
                .map(|(g, &f)| {
                    any_flag |= f;
                    format!("{g:.2}{}", if f { "*" } else { "" })
                })
                .collect();
            let _ = writeln!(out, "| {} | {} |", r.label, cells.join(" | "));
        }
        if any_flag {
            out.push_str("\n\\* includes absolute differences where the best bound was not positive\n");
        }
        out.push('\n');
        header(&mut out, format!("CPU time (sec) using {}", self.subject()));
        for r in &self.rows {
            let cells: Vec<String> = r.time.iter().map(|t| format!("{t:.4}")).collect();
            let _ = writeln!(out, "| {} | {} |", r.label, cells.join(" | "));
        }
        out
    }
}

/// One table per rule across variants, and one per variant across rules,
/// whenever that axis has more than one entry; a single table otherwise.
pub fn tables_for(rows: &[BenchRow], variants: &[Variant], rules: &[Rule]) -> Vec<GapTable> {
    let mut tables = Vec::new();
    if variants.len() > 1 || rules.len() == 1 {
        for &rule in rules {
            tables.push(GapTable::build(Axis::Variants(rule), rows));
        }
    }
    if rules.len() > 1 {
        for &variant in variants {
            tables.push(GapTable::build(Axis::Rules(variant), rows));
        }
    }
    tables
}
