//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//!
//! Slope criteria pool the top-half points of gain seeds 1, 2 and 3 into one
//! least-squares fit; the per-seed slopes are printed alongside.

use std::process::ExitCode;
use std::time::Instant;

use num_rational::Ratio;
use secdof_core::dof::{pooled_slope, theory_dof};
use secdof_core::experiment::{rerun_manifest, run_experiment, MiMethodName};
use secdof_core::verify::{
    alignment_suite, converse_reports, entropy_oracle_checks, min_distance_oracle_checks, pmf_oracle_check,
    power_suite, reconstruction_constant_checks, ConverseCounts,
};
use secdof_core::{ExperimentConfig, Manifest, PGrid, RateCurve, Topology, Verdict};

const SEEDS: [u64; 3] = [1, 2, 3];

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn curves(scheme: &str, parameter: usize, max_exp: u32, monte_carlo: bool) -> Vec<RateCurve> {
    SEEDS
        .iter()
        .map(|&seed| {
            let grid = PGrid::LogRange { lo: 1e2, hi: 10f64.powi(max_exp as i32), count: max_exp as usize - 1 };
            let mut config = ExperimentConfig::new(scheme, parameter, grid, "acceptance.csv");
            config.seed = seed;
            if monte_carlo {
                config.mi.method = MiMethodName::MonteCarlo;
            }
            run_experiment(&config).expect("sweep runs").curve
        })
        .collect()
}

fn max_leakage(curves: &[RateCurve]) -> f64 {
    curves.iter().flat_map(|c| &c.points).flat_map(|p| p.leakage.iter().copied()).fold(f64::MIN, f64::max)
}

fn per_seed(curves: &[RateCurve]) -> String {
    let s: Vec<String> = curves.iter().map(|c| format!("{:.3}", c.fitted_slope)).collect();
    s.join("/")
}

fn in_band(x: f64, lo: f64, hi: f64) -> bool {
    (lo..=hi).contains(&x)
}

fn sum_slope_case(scheme: &str, parameter: usize, band: (f64, f64), leak_cap: f64) -> Outcome {
    let c = curves(scheme, parameter, 8, false);
    let slope = pooled_slope(&c, |p| p.sum_rate);
    let leak = max_leakage(&c);
    outcome(
        in_band(slope, band.0, band.1) && leak <= leak_cap,
        format!(
            "{scheme} {parameter}: pooled slope {slope:.3} in [{}, {}] (per seed {}), max leakage {leak:.3} <= {leak_cap}",
            band.0,
            band.1,
            per_seed(&c)
        ),
    )
}

fn criterion_1() -> Outcome {
    let r = |n, d| Ratio::new(n, d);
    let mut expected = vec![(Topology::WiretapHelpers { helpers: 0 }, r(0, 1))];
    for m in 1..=6i64 {
        expected.push((Topology::WiretapHelpers { helpers: m as usize }, r(m, m + 1)));
        expected.push((Topology::BcCmHelpers { helpers: m as usize }, r(1, 1)));
        expected.push((Topology::IcCm { helpers: m as usize }, r(1, 1)));
    }
    expected.push((Topology::IcCm { helpers: 0 }, r(2, 3)));
    for k in 2..=6i64 {
        expected.push((Topology::MacWiretap { users: k as usize }, r(k * (k - 1), k * (k - 1) + 1)));
    }
    let wrong: Vec<String> = expected
        .iter()
        .filter(|(t, d)| theory_dof(*t) != *d)
        .map(|(t, d)| format!("{t}: got {} want {d}", theory_dof(*t)))
        .collect();
    outcome(wrong.is_empty(), format!("{} entries checked; mismatches: {wrong:?}", expected.len()))
}

fn criterion_4() -> Outcome {
    let c = curves("ic-cm", 0, 8, false);
    let slopes: Vec<f64> = (0..2).map(|i| pooled_slope(&c, |p| p.rates[i])).collect();
    let leak = max_leakage(&c);
    let seeds: Vec<String> = c
        .iter()
        .map(|curve| {
            let one = std::slice::from_ref(curve);
            format!("{:.3},{:.3}", pooled_slope(one, |p| p.rates[0]), pooled_slope(one, |p| p.rates[1]))
        })
        .collect();
    outcome(
        slopes.iter().all(|&s| in_band(s, 0.26, 0.36)) && leak <= 1.0,
        format!(
            "per-message pooled slopes {:.3}, {:.3} in [0.26, 0.36] (per seed {}), max leakage {leak:.3} <= 1",
            slopes[0],
            slopes[1],
            seeds.join(" / ")
        ),
    )
}

fn criterion_5() -> Outcome {
    let bc = sum_slope_case("bc-cm", 1, (0.83, 1.04), 1.0);
    let ic = sum_slope_case("ic-cm", 1, (0.83, 1.04), 1.0);
    outcome(bc.passed && ic.passed, format!("{}; {}", bc.detail, ic.detail))
}

fn criterion_6() -> Outcome {
    let k2 = sum_slope_case("mac", 2, (0.55, 0.70), 2.0);
    let c = curves("mac", 3, 6, true);
    let slope = pooled_slope(&c, |p| p.sum_rate);
    let k3 = slope >= 0.70;
    outcome(
        k2.passed && k3,
        format!("{}; mac 3 (MC, P<=1e6): pooled slope {slope:.3} >= 0.70 (per seed {})", k2.detail, per_seed(&c)),
    )
}

fn criterion_7() -> Outcome {
    let r = alignment_suite(20).expect("alignment suite runs");
    outcome(r.passed, format!("{} census checks over 20 seeds, {} failures", r.checks.len(), r.failures))
}

fn criterion_8() -> Outcome {
    let r = power_suite(20).expect("power suite runs");
    outcome(r.passed, format!("{} power checks over 20 seeds, {} failures", r.checks.len(), r.failures))
}

fn criterion_9() -> Outcome {
    let dmin = min_distance_oracle_checks(1, 50).expect("min-distance oracle runs");
    let entropy = entropy_oracle_checks(1, 50, 20_000).expect("entropy oracle runs");
    let pmf = pmf_oracle_check();
    let bad = |v: &[secdof_core::verify::SuiteCheck]| v.iter().filter(|c| !c.passed).count();
    let (bd, be) = (bad(&dmin), bad(&entropy));
    outcome(
        bd == 0 && be == 0 && pmf.passed,
        format!("min distance {bd}/50 failed, entropy {be}/50 failed, pmf entropy: {}", pmf.detail),
    )
}

fn criterion_10() -> Outcome {
    let counts = ConverseCounts { lemma1: 100, lemma2: 100, appendix: 50 };
    let reports = converse_reports(1, counts, 20_000).expect("converse suite runs");
    let fails = reports.iter().filter(|r| r.verdict == Verdict::Fail).count();
    let inconclusive = reports.iter().filter(|r| r.verdict == Verdict::Inconclusive).count();
    let min_margin = reports.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    let constants = reconstruction_constant_checks(1, 20).expect("constant checks run");
    let bad_constants = constants.iter().filter(|c| !c.passed).count();
    outcome(
        fails == 0 && bad_constants == 0,
        format!(
            "{} reports: {fails} violations, {inconclusive} inconclusive, min margin {min_margin:.4}; \
             reconstruction constant {bad_constants}/20 failed",
            reports.len()
        ),
    )
}

fn criterion_11() -> Outcome {
    let cases = [("wt-helpers", 1, false), ("ic-cm", 0, false), ("mac", 2, false), ("mac", 3, true)];
    let mut detail = Vec::new();
    let mut passed = true;
    for (scheme, parameter, mc) in cases {
        let grid = PGrid::LogRange { lo: 1e2, hi: 1e5, count: 4 };
        let mut config = ExperimentConfig::new(scheme, parameter, grid, "repro.csv");
        config.seed = 11;
        if mc {
            config.mi.method = MiMethodName::MonteCarlo;
            config.mi.samples = 4000;
        }
        let run = run_experiment(&config).expect("sweep runs");
        let text = serde_json::to_string(&run.manifest).expect("manifest serializes");
        let manifest: Manifest = serde_json::from_str(&text).expect("manifest parses");
        let again = rerun_manifest(&manifest).expect("rerun runs");
        let same = again.csv == run.csv;
        passed &= same;
        detail.push(format!("{scheme} {parameter}: {}", if same { "identical" } else { "differs" }));
    }
    outcome(passed, detail.join(", "))
}

fn main() -> ExitCode {
    let criteria: [(u32, fn() -> Outcome); 11] = [
        (1, criterion_1),
        (2, || sum_slope_case("wt-helpers", 1, (0.40, 0.52), 1.0)),
        (3, || sum_slope_case("wt-helpers", 2, (0.55, 0.70), 2.0)),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
        (11, criterion_11),
    ];
    let mut failed = 0;
    for (n, check) in criteria {
        let start = Instant::now();
        let o = check();
        let verdict = if o.passed { "PASS" } else { "FAIL" };
        println!("criterion {n}: {verdict} ({:.1}s) {}", start.elapsed().as_secs_f64(), o.detail);
        failed += usize::from(!o.passed);
    }
    println!("acceptance: {} of 11 criteria passed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
