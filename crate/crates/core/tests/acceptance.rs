//! Acceptance criteria, one PASS/FAIL line each. Tolerances are pinned here and
//! passed explicitly to the suites, so changing a suite default cannot loosen them.

use htype_ext::report::CheckReport;
use htype_ext::suite::{run_suite, Params};
use std::time::Instant;

struct Criterion {
    id: &'static str,
    suite: &'static str,
    tol: f64,
    /// Reports the criterion needs to see (at least this many).
    min_reports: usize,
    budget_s: f64,
}

const CRITERIA: &[Criterion] = &[
    Criterion { id: "01 kernel mass", suite: "phi-mass", tol: 1e-7, min_reports: 12, budget_s: 60.0 },
    Criterion { id: "02 lemma closed form", suite: "lemma-i", tol: 1e-7, min_reports: 27, budget_s: 120.0 },
    Criterion { id: "03 oscillatory integral", suite: "oscillatory", tol: 1e-5, min_reports: 20, budget_s: 180.0 },
    Criterion { id: "04 Cowling-Haagerup", suite: "cowling-haagerup", tol: 1e-6, min_reports: 27, budget_s: 120.0 },
    Criterion { id: "05 route equivalence", suite: "routes", tol: 1e-3, min_reports: 2, budget_s: 300.0 },
    Criterion { id: "06 DtN limit", suite: "dtn", tol: 1e-3, min_reports: 16, budget_s: 180.0 },
    Criterion { id: "07 singular integral", suite: "singular-integral", tol: 1e-3, min_reports: 15, budget_s: 180.0 },
    Criterion { id: "08 second limit ratio", suite: "limit2", tol: 1e-3, min_reports: 15, budget_s: 120.0 },
    Criterion { id: "09 higher-order limit", suite: "higher-order", tol: 2e-2, min_reports: 7, budget_s: 300.0 },
    Criterion { id: "10 Radon cross-section", suite: "radon", tol: 1e-6, min_reports: 64, budget_s: 60.0 },
    Criterion { id: "11 summation identity", suite: "isometry-sum", tol: 1e-8, min_reports: 32, budget_s: 30.0 },
    Criterion { id: "12 energy identity", suite: "energy", tol: 1e-2, min_reports: 2, budget_s: 300.0 },
    Criterion { id: "13 Hardy equality case", suite: "hardy-nonhomogeneous", tol: 1e-3, min_reports: 18, budget_s: 180.0 },
    Criterion { id: "14 homogeneity", suite: "homogeneity", tol: 1e-4, min_reports: 80, budget_s: 60.0 },
    Criterion { id: "15 uniform Lp bound", suite: "uniform-bound", tol: 1e-3, min_reports: 24, budget_s: 120.0 },
];

/// Spec-level invariants outside the numbered list, reported the same way.
const INVARIANTS: &[Criterion] = &[
    Criterion { id: "trace Hardy, 20 random pairs", suite: "trace-hardy", tol: 1e-3, min_reports: 21, budget_s: 600.0 },
    Criterion { id: "homogeneous Hardy, Gaussian", suite: "hardy-homogeneous", tol: 1e-3, min_reports: 1, budget_s: 300.0 },
];

fn worst(reports: &[CheckReport]) -> Option<&CheckReport> {
    reports.iter().filter(|r| r.rel_err.is_finite()).max_by(|a, b| a.rel_err.abs().total_cmp(&b.rel_err.abs()))
}

fn run(c: &Criterion, p: &Params) -> bool {
    let t = Instant::now();
    let reports = match run_suite(c.suite, p, Some(c.tol)) {
        Ok(r) => r,
        Err(e) => {
            println!("FAIL  {:<32} error: {e}", c.id);
            return false;
        }
    };
    let secs = t.elapsed().as_secs_f64();
    let failed: Vec<&CheckReport> = reports.iter().filter(|r| !r.pass).collect();
    let enough = reports.len() >= c.min_reports;
    let ok = failed.is_empty() && enough;
    let detail = match worst(&reports) {
        Some(w) => format!("worst rel {:.2e} ({})", w.rel_err.abs(), w.name),
        None => "no finite errors".to_string(),
    };
    println!(
        "{}  {:<32} {} reports, {} failed, {}, tol {:e}, {:.1}s{}",
        if ok { "PASS" } else { "FAIL" },
        c.id,
        reports.len(),
        failed.len(),
        detail,
        c.tol,
        secs,
        if secs > c.budget_s { format!(" (over the {:.0}s budget)", c.budget_s) } else { String::new() }
    );
    if !enough {
        println!("      expected at least {} reports", c.min_reports);
    }
    for r in failed.iter().take(5) {
        println!("      {} {:?} lhs {:e} rhs {:e} rel {:e} {}", r.name, r.params, r.lhs, r.rhs, r.rel_err, r.notes);
    }
    for r in reports.iter().filter(|r| r.name == "higher-order-printed-recurrence") {
        println!("      reported: printed-recurrence constant {:e} vs oracle {:e} ({})", r.lhs, r.rhs, r.notes);
    }
    ok
}

fn main() {
    // `cargo test -- <filter>` passes a filter; honour a plain substring match
    let filter: Option<String> = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let p = Params::default();
    let mut all_ok = true;
    let t = Instant::now();
    for c in CRITERIA.iter().chain(INVARIANTS) {
        if let Some(f) = &filter {
            if !c.id.contains(f.as_str()) && !c.suite.contains(f.as_str()) {
                continue;
            }
        }
        all_ok &= run(c, &p);
    }
    println!("acceptance total {:.1}s", t.elapsed().as_secs_f64());
    if !all_ok {
        std::process::exit(1);
    }
}
