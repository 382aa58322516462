//! End-to-end acceptance run: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_RED` are reported but do not fail the run;
//! every other failure exits non-zero.

mod common;

use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use coactive::experiment::{run_experiment, ExperimentConfig, ResultsTable};

const KNOWN_RED: &[&str] = &[
    "rectangles: full-view CL reaches median loss 0 by iteration 20",
    "rectangles: acquired features monotone in theta",
    "rectangles: CC acquires fewer features than theta 0.75",
];

struct Report {
    unexpected: usize,
}

impl Report {
    fn check(&mut self, name: &str, ok: bool, measured: String) {
        let tag = if ok { "PASS" } else { "FAIL" };
        let known = !ok && KNOWN_RED.contains(&name);
        println!(
            "[{tag}] {name}: {measured}{}",
            if known { " (known red)" } else { "" }
        );
        if !ok && !known {
            self.unexpected += 1;
        }
    }
}

fn load(name: &str) -> ExperimentConfig {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name);
    ExperimentConfig::load(&path).unwrap()
}

fn workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn timed(cfg: &ExperimentConfig) -> (ResultsTable, Duration) {
    let start = Instant::now();
    let table = run_experiment(cfg, workers()).unwrap();
    (table, start.elapsed())
}

fn curve(table: &ResultsTable, method: &str) -> Vec<f64> {
    table.rows_for(method).map(|r| r.median_loss).collect()
}

fn features_at(table: &ResultsTable, method: &str, t: usize) -> f64 {
    table.row(method, t).unwrap().mean_features
}

/// First iteration from which the curve stays at zero.
fn zero_from(curve: &[f64]) -> Option<usize> {
    let last_nonzero = curve.iter().rposition(|&l| l != 0.0);
    match last_nonzero {
        None => Some(1),
        Some(i) if i + 1 < curve.len() => Some(i + 2),
        Some(_) => None,
    }
}

fn fmt_iter(t: Option<usize>) -> String {
    t.map_or("never".to_string(), |t| t.to_string())
}

fn rectangles(report: &mut Report) -> ResultsTable {
    let cfg = load("rectangles.json");
    let (table, elapsed) = timed(&cfg);
    let t_max = cfg.iterations;

    let cl = zero_from(&curve(&table, "cl:1.0"));
    report.check(
        "rectangles: full-view CL reaches median loss 0 by iteration 20",
        cl.is_some_and(|t| t <= 20),
        format!("zero from iteration {}", fmt_iter(cl)),
    );

    let cc_curve = curve(&table, "cc:consistency");
    let cc = zero_from(&cc_curve);
    let cc_features = cc.map(|t| features_at(&table, "cc:consistency", t));
    report.check(
        "rectangles: CC reaches median loss 0 by iteration 60 with at most 45 features",
        cc.is_some_and(|t| t <= 60) && cc_features.is_some_and(|f| f <= 45.0),
        format!(
            "zero from iteration {}, {:?} features there",
            fmt_iter(cc),
            cc_features
        ),
    );

    let cl80 = curve(&table, "cl:0.8");
    let beats = (0..t_max)
        .find(|&i| (i..t_max).all(|j| cc_curve[j] <= cl80[j]))
        .map(|i| i + 1);
    report.check(
        "rectangles: CC at or below CL80 from some iteration <= 30 onward",
        beats.is_some_and(|t| t <= 30),
        format!("from iteration {}", fmt_iter(beats)),
    );

    let thetas = [
        "cc:random(0.25)",
        "cc:random(0.5)",
        "cc:random(0.75)",
        "cc:random(1)",
    ];
    let feats: Vec<f64> = thetas
        .iter()
        .map(|m| features_at(&table, m, t_max))
        .collect();
    report.check(
        "rectangles: acquired features monotone in theta",
        feats.windows(2).all(|w| w[0] <= w[1]),
        format!("mean features at T for theta 0.25/0.5/0.75/1: {feats:?}"),
    );
    let cc_final = features_at(&table, "cc:consistency", t_max);
    report.check(
        "rectangles: CC acquires fewer features than theta 0.75",
        cc_final < feats[2],
        format!("{cc_final} vs {}", feats[2]),
    );
    let loss = |m: &str| table.row(m, t_max).unwrap().median_loss;
    let (lo, hi) = {
        let (a, b) = (loss("cc:random(0.75)"), loss("cc:random(1)"));
        (a.min(b), a.max(b))
    };
    let cc_loss = loss("cc:consistency");
    report.check(
        "rectangles: CC median loss at T between theta 0.75 and theta 1",
        lo <= cc_loss && cc_loss <= hi,
        format!("{cc_loss} in [{lo}, {hi}]"),
    );
    report.check(
        "rectangles: grid runtime under 2 minutes",
        elapsed < Duration::from_secs(120),
        format!("{elapsed:.1?} on {} worker(s)", workers()),
    );
    table
}

fn trip(report: &mut Report) -> ResultsTable {
    let cfg = load("trip.json");
    let (table, elapsed) = timed(&cfg);
    let t = cfg.iterations;
    let base = 25.0;
    let acquired = features_at(&table, "cc:consistency", t) - base;
    let cl20 = features_at(&table, "cl:0.2", t);
    let cc_loss = table.row("cc:consistency", t).unwrap().median_loss;
    let cl_loss = table.row("cl:0.2", t).unwrap().median_loss;
    report.check(
        "trip: CC acquires no more features than CL20 uses",
        acquired <= cl20,
        format!("{acquired:.2} acquired vs {cl20}"),
    );
    report.check(
        "trip: CC median loss at T strictly below CL20",
        cc_loss < cl_loss,
        format!("{cc_loss:.3} vs {cl_loss:.3}"),
    );
    report.check(
        "trip: runtime under 15 minutes",
        elapsed < Duration::from_secs(15 * 60),
        format!("{elapsed:.1?} on {} worker(s)", workers()),
    );
    table
}

fn theory(report: &mut Report, tables: &[&ResultsTable]) {
    let runs: Vec<_> = tables.iter().flat_map(|t| &t.runs).collect();
    let broken = runs.iter().filter(|r| !r.bound_holds()).count();
    report.check(
        "regret bound holds on every run",
        broken == 0,
        format!("{} runs, {broken} violations", runs.len()),
    );
    let full: Vec<_> = runs.iter().filter(|r| r.method == "cl:1.0").collect();
    let eta_zero = full.iter().all(|r| {
        r.report
            .as_ref()
            .is_some_and(|rep| rep.iterations.iter().all(|i| i.missing_gain.abs() <= 1e-9))
    });
    report.check(
        "full-view CL: missing gain zero and bound holds",
        !full.is_empty() && eta_zero && full.iter().all(|r| r.bound_holds()),
        format!("{} runs", full.len()),
    );
    let failed: Vec<String> = runs
        .iter()
        .filter(|r| !r.is_valid())
        .map(|r| format!("{} user {} repeat {}", r.method, r.user, r.repeat))
        .collect();
    report.check(
        "step checks pass on every exact-inference run",
        failed.is_empty(),
        format!("{} runs, failing: {failed:?}", runs.len()),
    );
}

fn oracles(report: &mut Report) {
    let rect = common::check_rectangles(40, 11);
    report.check(
        "oracle: rectangles inference and improvement match brute force",
        rect.passed(),
        format!(
            "{} comparisons, mismatches {:?}",
            rect.checked, rect.mismatches
        ),
    );
    let trips = common::check_trips(50, 4, 12);
    report.check(
        "oracle: small-trip inference and improvement match brute force",
        trips.passed(),
        format!(
            "50 trips, {} comparisons, mismatches {:?}",
            trips.checked, trips.mismatches
        ),
    );
    let cons = common::check_consistency(250, 13);
    report.check(
        "oracle: consistency matches LP and grid oracles",
        cons.passed(),
        format!(
            "250 datasets, {} comparisons, mismatches {:?}",
            cons.checked, cons.mismatches
        ),
    );
    let (a, b) = common::critique_frequencies(10_000, 14);
    report.check(
        "critique picks for contributions (3, 1) within 3% of (0.75, 0.25)",
        (a - 0.75).abs() <= 0.03 && (b - 0.25).abs() <= 0.03,
        format!("({a:.4}, {b:.4})"),
    );
}

fn determinism(report: &mut Report, rect: &ResultsTable) {
    let again = run_experiment(&rect.config, 1).unwrap();
    let smoke = load("smoke.json");
    let a = run_experiment(&smoke, 1).unwrap().to_csv();
    let b = run_experiment(&smoke, 3).unwrap().to_csv();
    report.check(
        "determinism: identical config and seed give byte-identical CSV",
        again.to_csv() == rect.to_csv() && a == b,
        format!("{} + {} bytes compared", rect.to_csv().len(), a.len()),
    );
}

fn main() -> ExitCode {
    let mut report = Report { unexpected: 0 };
    oracles(&mut report);
    let rect = rectangles(&mut report);
    determinism(&mut report, &rect);
    let trip = trip(&mut report);
    theory(&mut report, &[&rect, &trip]);
    if report.unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{} unexpected failure(s)", report.unexpected);
        ExitCode::FAILURE
    }
}
