//! Invariant suites run across sampled gain sets.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alignment::{alignment_violations, build_plan, build_plan_with_delta, receiver_space};
use crate::channel::{sample_gains, GainRange, NetworkModel, Topology};
use crate::converse::{
    appendix_ic_sumrate_check, lemma1_check, lemma2_check, random_case, reconstruction_constant, CheckOptions,
    CheckReport, PerturbationSpec, Verdict,
};
use crate::dof::receiver_constellation;
use crate::error::{Error, Result};
use crate::info::{diff_entropy, gaussian_entropy, leakage_cap, mutual_info, EntropyMethod, MiOptions, MixtureDensity};
use crate::oracle::{brute_force_min_distance, convolved_pam_pmf};
use crate::pam::{discrete_entropy, sum_pam_pmf, DEFAULT_DELTA};
use crate::rng::substream;

/// Streams for suite-level randomness, offset from every other user.
const SUITE_STREAM_BASE: u64 = 1 << 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Alignment,
    Power,
    Leakage,
    Oracle,
    Lemmas,
    All,
}

impl Suite {
    pub const EACH: [Suite; 5] = [Suite::Alignment, Suite::Power, Suite::Leakage, Suite::Oracle, Suite::Lemmas];
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "alignment" => Suite::Alignment,
            "power" => Suite::Power,
            "leakage" => Suite::Leakage,
            "oracle" => Suite::Oracle,
            "lemmas" => Suite::Lemmas,
            "all" => Suite::All,
            other => return Err(Error::InvalidParameter(format!("unknown suite {other:?}"))),
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("unit variants serialize");
        write!(f, "{}", s.as_str().unwrap_or_default())
    }
}

/// One asserted check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteCheck {
    pub id: String,
    pub passed: bool,
    pub detail: String,
}

impl SuiteCheck {
    fn new(id: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { id: id.into(), passed, detail: detail.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seeds: u64,
    pub passed: bool,
    pub failures: usize,
    pub checks: Vec<SuiteCheck>,
    /// Converse check reports; empty for other suites.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub converse: Vec<CheckReport>,
    /// Observations that are reported but not asserted.
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub notes: BTreeMap<String, String>,
}

impl SuiteReport {
    fn from_checks(suite: Suite, seeds: u64, checks: Vec<SuiteCheck>) -> Self {
        let failures = checks.iter().filter(|c| !c.passed).count();
        Self { suite, seeds, passed: failures == 0, failures, checks, converse: Vec::new(), notes: BTreeMap::new() }
    }
}

/// Every topology with `M ≤ 4` helpers and `K ≤ 4` users that has a scheme.
pub fn census_topologies() -> Vec<Topology> {
    let mut t = Vec::new();
    for m in 1..=4 {
        t.push(Topology::WiretapHelpers { helpers: m });
        t.push(Topology::BcCmHelpers { helpers: m });
    }
    for m in 0..=4 {
        t.push(Topology::IcCm { helpers: m });
    }
    for k in 2..=4 {
        t.push(Topology::MacWiretap { users: k });
    }
    t
}

/// Dimension census and alignment conditions for every topology and seed `1..=seeds`.
pub fn alignment_suite(seeds: u64) -> Result<SuiteReport> {
    let mut checks = Vec::new();
    for topo in census_topologies() {
        for seed in 1..=seeds {
            let gains = sample_gains(topo, seed, &GainRange::default())?;
            let plan = build_plan(&NetworkModel::new(topo, gains, 1e4)?)?;
            let v = alignment_violations(&plan);
            checks.push(SuiteCheck::new(format!("{topo} seed {seed}"), v.is_empty(), v.join("; ")));
        }
    }
    Ok(SuiteReport::from_checks(Suite::Alignment, seeds, checks))
}

/// The fixed grid `10², …, 10⁸` used by the power and leakage suites.
pub fn decade_grid(max_exp: i32) -> Vec<f64> {
    (2..=max_exp).map(|e| 10f64.powi(e)).collect()
}

/// `E[X_t²] ≤ P` for every transmitter, scheme, seed and grid point.
pub fn power_suite(seeds: u64) -> Result<SuiteReport> {
    let mut checks = Vec::new();
    for topo in census_topologies() {
        for seed in 1..=seeds {
            let gains = sample_gains(topo, seed, &GainRange::default())?;
            for p in decade_grid(8) {
                let model = NetworkModel::new(topo, gains.clone(), p)?;
                let plan = build_plan_with_delta(&model, DEFAULT_DELTA)?;
                let powers = plan.transmit_powers(&gains);
                let worst = powers.iter().cloned().fold(0.0, f64::max);
                checks.push(SuiteCheck::new(
                    format!("{topo} seed {seed} P={p:e}"),
                    worst <= p * (1.0 + 1e-12),
                    format!("max E[X²] = {worst}"),
                ));
            }
        }
    }
    Ok(SuiteReport::from_checks(Suite::Power, seeds, checks))
}

/// Topologies small enough for exact leakage evaluation along a sweep.
pub fn leakage_topologies() -> Vec<Topology> {
    vec![
        Topology::WiretapHelpers { helpers: 1 },
        Topology::WiretapHelpers { helpers: 2 },
        Topology::BcCmHelpers { helpers: 1 },
        Topology::IcCm { helpers: 0 },
        Topology::IcCm { helpers: 1 },
        Topology::MacWiretap { users: 2 },
    ]
}

/// Eavesdropper information stays below the analytic cap at every point.
pub fn leakage_suite(seeds: u64) -> Result<SuiteReport> {
    let opts = MiOptions::default();
    let jobs: Vec<(Topology, u64, f64)> = leakage_topologies()
        .into_iter()
        .flat_map(|t| (1..=seeds).flat_map(move |s| decade_grid(6).into_iter().map(move |p| (t, s, p))))
        .collect();
    let checks = jobs
        .par_iter()
        .map(|&(topo, seed, p)| -> Result<SuiteCheck> {
            let gains = sample_gains(topo, seed, &GainRange::default())?;
            let model = NetworkModel::new(topo, gains, p)?;
            let plan = build_plan(&model)?;
            let cap = leakage_cap(topo);
            let leaks: Vec<f64> = match topo {
                Topology::BcCmHelpers { .. } | Topology::IcCm { .. } => (0..2)
                    .map(|m| {
                        let other = &plan.messages[1 - m];
                        Ok(mutual_info(&plan, &model, plan.eavesdropper_of(m), &plan.messages[m], other, &opts)?.value)
                    })
                    .collect::<Result<_>>()?,
                _ => vec![mutual_info(&plan, &model, 1, &plan.message_symbols(), &[], &opts)?.value],
            };
            let worst = leaks.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            Ok(SuiteCheck::new(
                format!("{topo} seed {seed} P={p:e}"),
                worst <= cap + opts.tol * 4.0,
                format!("leakage {leaks:?} (cap {cap})"),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SuiteReport::from_checks(Suite::Leakage, seeds, checks))
}

/// Fast minimum distance against the all-pairs scan on `count` random
/// instances with at most 5·10³ points.
pub fn min_distance_oracle_checks(seed: u64, count: usize) -> Result<Vec<SuiteCheck>> {
    let topologies = [
        Topology::WiretapHelpers { helpers: 1 },
        Topology::WiretapHelpers { helpers: 2 },
        Topology::BcCmHelpers { helpers: 1 },
        Topology::IcCm { helpers: 0 },
        Topology::IcCm { helpers: 1 },
        Topology::MacWiretap { users: 2 },
    ];
    let mut rng = substream(seed, SUITE_STREAM_BASE);
    let mut checks = Vec::new();
    let mut attempts = 0;
    while checks.len() < count {
        attempts += 1;
        if attempts > 100 * count {
            return Err(Error::InvalidParameter("could not draw enough small constellations".into()));
        }
        let topo = topologies[rng.random_range(0..topologies.len())];
        let gain_seed: u64 = rng.random();
        let p = 10f64.powf(rng.random_range(2.0..6.0));
        let rx = rng.random_range(0..2);
        let gains = sample_gains(topo, gain_seed, &GainRange::default())?;
        let plan = build_plan(&NetworkModel::new(topo, gains.clone(), p)?)?;
        let points = match receiver_constellation(&receiver_space(&plan, rx), &gains, plan.constellation, 5000) {
            Ok(pts) => pts,
            Err(Error::EnumerationCap { .. }) => continue,
            Err(e) => return Err(e),
        };
        let fast = points.min_distance();
        let slow = brute_force_min_distance(&points.values);
        checks.push(SuiteCheck::new(
            format!("min-distance {topo} rx{} P={p:.3e} N={}", rx + 1, points.len()),
            fast == slow,
            format!("sorted {fast}, all pairs {slow}"),
        ));
    }
    Ok(checks)
}

/// A random Gaussian mixture with at most `max_components` components.
pub fn random_mixture(rng: &mut impl Rng, max_components: usize) -> MixtureDensity {
    let n = rng.random_range(2..=max_components);
    let spread = 10f64.powf(rng.random_range(0.0..3.0));
    let means: Vec<f64> = (0..n).map(|_| rng.random_range(-spread..spread)).collect();
    let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..1.0)).collect();
    let total: f64 = w.iter().sum();
    MixtureDensity::new(means, w.into_iter().map(|x| x / total).collect()).expect("valid by construction")
}

/// Quadrature against Monte Carlo differential entropy on `count` random mixtures.
pub fn entropy_oracle_checks(seed: u64, count: usize, samples: usize) -> Result<Vec<SuiteCheck>> {
    let tol = 1e-5;
    (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, SUITE_STREAM_BASE + 1 + i as u64);
            let mix = random_mixture(&mut rng, 10_000);
            let q = diff_entropy(&mix, EntropyMethod::Quadrature, tol)?;
            let mc = diff_entropy(&mix, EntropyMethod::MonteCarlo { samples, seed: rng.random() }, tol)?;
            let combined = (mc.std_error.powi(2) + q.achieved_tol.powi(2) + mc.achieved_tol.powi(2)).sqrt();
            let diff = (q.value - mc.value).abs();
            Ok(SuiteCheck::new(
                format!("entropy mixture {i} ({} components)", mix.len()),
                diff <= 3.0 * combined,
                format!("quadrature {} vs monte carlo {} ± {}", q.value, mc.value, mc.std_error),
            ))
        })
        .collect()
}

/// `sum_pam_pmf(1, 2)` entropy against floating-point convolution.
pub fn pmf_oracle_check() -> SuiteCheck {
    let exact = sum_pam_pmf(1, 2).entropy_bits();
    let conv = discrete_entropy(&convolved_pam_pmf(1, 2));
    SuiteCheck::new("sum-pmf Q=1 k=2", (exact - conv).abs() <= 1e-9, format!("{exact} vs {conv}"))
}

pub fn oracle_suite(seeds: u64) -> Result<SuiteReport> {
    let mut checks = vec![pmf_oracle_check()];
    for seed in 1..=seeds.max(1) {
        checks.extend(min_distance_oracle_checks(seed, 10)?);
        checks.extend(entropy_oracle_checks(seed, 10, 20_000)?);
    }
    Ok(SuiteReport::from_checks(Suite::Oracle, seeds, checks))
}

/// Counts per seed in the converse suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConverseCounts {
    pub lemma1: usize,
    pub lemma2: usize,
    pub appendix: usize,
}

impl Default for ConverseCounts {
    fn default() -> Self {
        Self { lemma1: 20, lemma2: 20, appendix: 10 }
    }
}

/// Secrecy-penalty, helper-entropy and interference sum-rate checks on random
/// input laws, alternating between one and two helpers.
pub fn converse_reports(seed: u64, counts: ConverseCounts, mc_samples: usize) -> Result<Vec<CheckReport>> {
    let wt = |i: usize| Topology::WiretapHelpers { helpers: 1 + i % 2 };
    let lemma1 = (0..counts.lemma1).into_par_iter().map(|i| -> Result<Vec<CheckReport>> {
        let (model, laws) = random_case(wt(i), seed, i as u64)?;
        let spec = PerturbationSpec::default_for(&model);
        let opts = CheckOptions { mc_samples, seed, stream: SUITE_STREAM_BASE + i as u64, ..Default::default() };
        lemma1_check(&model, &laws, &spec, &opts)
    });
    let lemma1: Vec<Vec<CheckReport>> = lemma1.collect::<Result<_>>()?;
    let lemma2: Vec<CheckReport> = (0..counts.lemma2)
        .into_par_iter()
        .map(|i| {
            let (model, laws) = random_case(wt(i), seed, (1 << 20) + i as u64)?;
            let spec = PerturbationSpec::default_for(&model);
            let helper = 1 + i % (laws.len() - 1);
            lemma2_check(&model, &laws, &spec, helper, &CheckOptions { seed, ..Default::default() })
        })
        .collect::<Result<_>>()?;
    let appendix: Vec<Vec<CheckReport>> = (0..counts.appendix)
        .into_par_iter()
        .map(|i| {
            let (model, laws) = random_case(Topology::IcCm { helpers: 0 }, seed, (2 << 20) + i as u64)?;
            let spec = PerturbationSpec::default_for(&model);
            appendix_ic_sumrate_check(&model, &laws, &spec, &CheckOptions { seed, ..Default::default() })
        })
        .collect::<Result<_>>()?;
    Ok(lemma1.into_iter().flatten().chain(lemma2).chain(appendix.into_iter().flatten()).collect())
}

/// The reconstruction constant is the closed form and does not move with `P`.
pub fn reconstruction_constant_checks(seed: u64, count: usize) -> Result<Vec<SuiteCheck>> {
    (0..count)
        .map(|i| {
            let (model, _) = random_case(Topology::WiretapHelpers { helpers: 2 }, seed, (3 << 20) + i as u64)?;
            let spec = PerturbationSpec::default_for(&model);
            let c = reconstruction_constant(&model, &spec)?.value;
            let c_hi = reconstruction_constant(&model.with_power(1e8)?, &spec)?.value;
            let c_lo = reconstruction_constant(&model.with_power(1e2)?, &spec)?.value;
            let var = |rx: usize| {
                1.0 + (0..3).map(|t| model.gains.gain(rx, t).powi(2) * spec.variances[t]).sum::<f64>()
            };
            let closed = gaussian_entropy(var(0)) + gaussian_entropy(var(1));
            Ok(SuiteCheck::new(
                format!("reconstruction constant {i}"),
                (c - closed).abs() <= 1e-12 && c_hi == c_lo,
                format!("{c} vs closed form {closed}; P=1e2 {c_lo}, P=1e8 {c_hi}"),
            ))
        })
        .collect()
}

pub fn lemmas_suite(seeds: u64) -> Result<SuiteReport> {
    let mut checks = Vec::new();
    let mut reports = Vec::new();
    for seed in 1..=seeds {
        checks.extend(reconstruction_constant_checks(seed, 4)?);
        reports.extend(converse_reports(seed, ConverseCounts::default(), 20_000)?);
    }
    for r in &reports {
        checks.push(SuiteCheck::new(
            r.id.clone(),
            r.verdict != Verdict::Fail,
            format!("margin {} ± {}", r.margin, r.std_error),
        ));
    }
    let inconclusive = reports.iter().filter(|r| r.verdict == Verdict::Inconclusive).count();
    let mut report = SuiteReport::from_checks(Suite::Lemmas, seeds, checks);
    report.notes.insert("inconclusive".into(), inconclusive.to_string());
    report.converse = reports;
    Ok(report)
}

/// Runs one suite (or every suite for [`Suite::All`]).
pub fn run_suite(suite: Suite, seeds: u64) -> Result<Vec<SuiteReport>> {
    match suite {
        Suite::All => Suite::EACH.iter().map(|s| run_one(*s, seeds)).collect(),
        s => Ok(vec![run_one(s, seeds)?]),
    }
}

fn run_one(suite: Suite, seeds: u64) -> Result<SuiteReport> {
    match suite {
        Suite::Alignment => alignment_suite(seeds),
        Suite::Power => power_suite(seeds),
        Suite::Leakage => leakage_suite(seeds),
        Suite::Oracle => oracle_suite(seeds),
        Suite::Lemmas => lemmas_suite(seeds),
        Suite::All => unreachable!("expanded by run_suite"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::EACH.iter().chain([Suite::All].iter()) {
            assert_eq!(s.to_string().parse::<Suite>().unwrap(), *s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn small_suites_pass() {
        assert!(alignment_suite(2).unwrap().passed);
        assert!(power_suite(1).unwrap().passed);
        assert!(pmf_oracle_check().passed);
    }

    #[test]
    fn converse_counts_scale() {
        let r = converse_reports(3, ConverseCounts { lemma1: 2, lemma2: 2, appendix: 1 }, 5000).unwrap();
        // main + one drop per input for each lemma-1 case, 1 per lemma-2, 3 per sum-rate case
        assert_eq!(r.len(), (1 + 2) + (1 + 3) + 2 + 3);
        assert!(r.iter().all(|x| x.verdict != Verdict::Fail), "{r:#?}");
    }
}
