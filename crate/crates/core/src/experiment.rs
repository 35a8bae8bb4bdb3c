//! Experiment configuration, power grids, CSV output and run manifests.

use std::fmt;
use std::path::{Component, Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::alignment::{build_plan, receiver_space};
use crate::channel::{sample_gains, ChannelGains, GainRange, NetworkModel, Topology};
use crate::dof::{sweep, RateCurve, SweepOptions};
use crate::error::{Error, Result};
use crate::info::{MiMethod, MiOptions, DEFAULT_ENUMERATION_CAP, DEFAULT_TOLERANCE};
use crate::pam::{validate_delta, DEFAULT_DELTA};

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;
/// Gain draws attempted before giving up on a non-degenerate sample.
pub const MAX_GAIN_RESAMPLES: u32 = 16;

/// Power grid: explicit list or `lo:hi:n` (log-spaced, endpoints included).
#[derive(Debug, Clone, PartialEq)]
pub enum PGrid {
    List(Vec<f64>),
    LogRange { lo: f64, hi: f64, count: usize },
}

impl PGrid {
    pub fn powers(&self) -> Vec<f64> {
        match self {
            PGrid::List(v) => v.clone(),
            PGrid::LogRange { lo, hi, count } => {
                let (a, b) = (lo.log10(), hi.log10());
                (0..*count)
                    .map(|i| {
                        let e = a + (b - a) * i as f64 / (*count - 1) as f64;
                        // integral exponents through powi so 1e2..1e8 come out exact
                        if (e - e.round()).abs() < 1e-9 {
                            10f64.powi(e.round() as i32)
                        } else {
                            10f64.powf(e)
                        }
                    })
                    .collect()
            }
        }
    }
}

impl FromStr for PGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::InvalidGrid(format!("{s:?}: {why}"));
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() == 3 {
            let lo: f64 = parts[0].trim().parse().map_err(|_| bad("bad lower bound"))?;
            let hi: f64 = parts[1].trim().parse().map_err(|_| bad("bad upper bound"))?;
            let count: usize = parts[2].trim().parse().map_err(|_| bad("bad point count"))?;
            if !(lo > 0.0 && hi > lo && hi.is_finite()) || count < 2 {
                return Err(bad("need 0 < lo < hi and at least 2 points"));
            }
            return Ok(PGrid::LogRange { lo, hi, count });
        }
        let list: std::result::Result<Vec<f64>, _> = s.split(',').map(|x| x.trim().parse::<f64>()).collect();
        list.map(PGrid::List).map_err(|_| bad("expected lo:hi:n or a comma-separated list"))
    }
}

impl fmt::Display for PGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PGrid::LogRange { lo, hi, count } => write!(f, "{lo:e}:{hi:e}:{count}"),
            PGrid::List(v) => {
                let s: Vec<String> = v.iter().map(|x| format!("{x:e}")).collect();
                write!(f, "{}", s.join(","))
            }
        }
    }
}

impl Serialize for PGrid {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            PGrid::List(v) => v.serialize(s),
            PGrid::LogRange { .. } => s.serialize_str(&self.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for PGrid {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            List(Vec<f64>),
            Spec(String),
        }
        match Raw::deserialize(d)? {
            Raw::List(v) => Ok(PGrid::List(v)),
            Raw::Spec(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// How mutual informations are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MiConfig {
    /// `quadrature` or `monte-carlo`.
    pub method: MiMethodName,
    pub samples: usize,
    pub tol: f64,
    pub cap: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MiMethodName {
    Quadrature,
    MonteCarlo,
}

impl Default for MiConfig {
    fn default() -> Self {
        Self { method: MiMethodName::Quadrature, samples: 20_000, tol: DEFAULT_TOLERANCE, cap: DEFAULT_ENUMERATION_CAP }
    }
}

/// One sweep experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// `wt-helpers`, `bc-cm`, `ic-cm` or `mac`.
    pub scheme: String,
    /// Helper count for `wt-helpers`, `bc-cm` and `ic-cm`.
    #[serde(default)]
    pub m: Option<usize>,
    /// User count for `mac`.
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    pub pgrid: PGrid,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub gain_range: GainRange,
    #[serde(default)]
    pub mi: MiConfig,
    #[serde(default = "default_ser_trials")]
    pub ser_trials: usize,
    /// CSV path relative to the output directory.
    pub out: String,
}

fn default_delta() -> f64 {
    DEFAULT_DELTA
}

fn default_seed() -> u64 {
    1
}

fn default_ser_trials() -> usize {
    2000
}

impl ExperimentConfig {
    pub fn new(scheme: &str, parameter: usize, pgrid: PGrid, out: &str) -> Self {
        let (m, k) = if scheme == "mac" { (None, Some(parameter)) } else { (Some(parameter), None) };
        Self {
            scheme: scheme.to_string(),
            m,
            k,
            delta: DEFAULT_DELTA,
            pgrid,
            seed: 1,
            gain_range: GainRange::default(),
            mi: MiConfig::default(),
            ser_trials: default_ser_trials(),
            out: out.to_string(),
        }
    }

    pub fn topology(&self) -> Result<Topology> {
        let need_m = || self.m.ok_or_else(|| Error::InvalidParameter(format!("scheme {} needs m", self.scheme)));
        let t = match self.scheme.as_str() {
            "wt-helpers" => Topology::WiretapHelpers { helpers: need_m()? },
            "bc-cm" => Topology::BcCmHelpers { helpers: need_m()? },
            "ic-cm" => Topology::IcCm { helpers: need_m()? },
            "mac" => Topology::MacWiretap {
                users: self.k.ok_or_else(|| Error::InvalidParameter("scheme mac needs k".into()))?,
            },
            other => return Err(Error::InvalidTopology(format!("unknown scheme {other:?}"))),
        };
        t.validate()?;
        if matches!(t, Topology::BcCmHelpers { helpers: 0 }) {
            return Err(Error::UnsupportedScheme("broadcast channel without helpers has no alignment scheme".into()));
        }
        Ok(t)
    }

    /// Checks every precondition before any computation.
    pub fn validate(&self) -> Result<()> {
        validate_delta(self.delta)?;
        self.topology()?;
        self.gain_range.validate()?;
        crate::dof::validate_grid(&self.pgrid.powers())?;
        if self.mi.tol.is_nan() || self.mi.tol <= 0.0 || self.mi.cap == 0 {
            return Err(Error::InvalidParameter("mi.tol and mi.cap must be positive".into()));
        }
        if self.mi.method == MiMethodName::MonteCarlo && self.mi.samples < 2 {
            return Err(Error::InvalidParameter("monte-carlo needs at least 2 samples".into()));
        }
        relative_output_path(&self.out)?;
        Ok(())
    }

    pub fn sweep_options(&self) -> SweepOptions {
        let method = match self.mi.method {
            MiMethodName::Quadrature => MiMethod::Quadrature,
            MiMethodName::MonteCarlo => MiMethod::MonteCarlo { samples: self.mi.samples },
        };
        SweepOptions {
            delta: self.delta,
            mi: MiOptions { method, tol: self.mi.tol, cap: self.mi.cap, seed: self.seed, stream: 0 },
            ser_trials: self.ser_trials,
        }
    }
}

/// Rejects absolute paths and any path that climbs out of its base.
pub fn relative_output_path(p: &str) -> Result<PathBuf> {
    let path = Path::new(p);
    if p.is_empty() {
        return Err(Error::InvalidPath("empty".into()));
    }
    for c in path.components() {
        match c {
            Component::Normal(_) | Component::CurDir => {}
            _ => return Err(Error::InvalidPath(format!("{p:?} must stay inside the output directory"))),
        }
    }
    Ok(path.to_path_buf())
}

/// Draws gains, redrawing while two receiver dimensions nearly coincide.
/// Returns the gains and the number of redraws.
pub fn sample_nondegenerate_gains(topology: Topology, seed: u64, range: &GainRange) -> Result<(ChannelGains, u32)> {
    for attempt in 0..MAX_GAIN_RESAMPLES {
        let s = seed.wrapping_add(attempt as u64 * 0x9E37_79B9_7F4A_7C15);
        let gains = sample_gains(topology, s, range)?;
        if matches!(topology, Topology::WiretapHelpers { helpers: 0 }) {
            return Ok((gains, attempt));
        }
        let plan = build_plan(&NetworkModel::new(topology, gains.clone(), 1.0)?)?;
        if (0..2).all(|rx| !receiver_space(&plan, rx).near_coincident(&gains)) {
            return Ok((gains, attempt));
        }
    }
    Err(Error::InvalidGains(format!("no non-degenerate gain draw in {MAX_GAIN_RESAMPLES} attempts")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestPoint {
    pub power: f64,
    pub q: Option<u32>,
    pub a: f64,
    pub gamma: f64,
    pub clamped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestSummary {
    pub fitted_slope: f64,
    pub theory_slope: String,
    pub scheme_slope: f64,
    pub flags: Vec<String>,
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub tool_version: String,
    pub config: ExperimentConfig,
    pub topology: Topology,
    pub gains: ChannelGains,
    pub gain_law: String,
    pub gain_resamples: u32,
    pub powers: Vec<f64>,
    pub points: Vec<ManifestPoint>,
    pub summary: ManifestSummary,
    pub csv: String,
}

/// Output of [`run_experiment`].
#[derive(Debug, Clone)]
pub struct ExperimentRun {
    pub curve: RateCurve,
    pub manifest: Manifest,
    pub csv: String,
}

/// Runs the sweep described by `config`; nothing is written.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentRun> {
    config.validate()?;
    let topology = config.topology()?;
    let (gains, resamples) = sample_nondegenerate_gains(topology, config.seed, &config.gain_range)?;
    let model = NetworkModel::new(topology, gains.clone(), 1.0)?;
    let powers = config.pgrid.powers();
    let curve = sweep(&model, &powers, config.seed, &config.sweep_options())?;
    let csv = curve_csv(&curve)?;
    let manifest = Manifest {
        schema_version: MANIFEST_SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        topology,
        gains,
        gain_law: config.gain_range.describe(),
        gain_resamples: resamples,
        powers,
        points: curve
            .points
            .iter()
            .map(|p| ManifestPoint { power: p.power, q: p.half_range, a: p.spacing, gamma: p.gamma, clamped: p.clamped })
            .collect(),
        summary: ManifestSummary {
            fitted_slope: curve.fitted_slope,
            theory_slope: curve.theory_slope.to_string(),
            scheme_slope: curve.scheme_slope,
            flags: curve.flags.clone(),
        },
        csv: config.out.clone(),
    };
    Ok(ExperimentRun { curve, manifest, csv })
}

/// Re-runs a manifest's configuration and checks that the gain draw matches.
pub fn rerun_manifest(manifest: &Manifest) -> Result<ExperimentRun> {
    if manifest.schema_version != MANIFEST_SCHEMA_VERSION {
        return Err(Error::Manifest(format!("unsupported schema version {}", manifest.schema_version)));
    }
    let run = run_experiment(&manifest.config)?;
    if run.manifest.gains != manifest.gains {
        return Err(Error::Manifest("gain draw differs from the recorded gains".into()));
    }
    Ok(run)
}

/// Column names of the CSV for `curve`.
pub fn csv_header(curve: &RateCurve) -> Vec<String> {
    let first = &curve.points[0];
    let mut h: Vec<String> = ["P", "Q", "a", "gamma"].iter().map(|s| s.to_string()).collect();
    h.extend((1..=first.rates.len()).map(|i| format!("rate_{i}")));
    h.push("sum_rate".into());
    if first.leakage.len() == 1 {
        h.push("leakage".into());
    } else {
        h.extend((1..=first.leakage.len()).map(|i| format!("leakage_{i}")));
    }
    h.extend(["mi_std_error", "dMin", "serBound", "serEmpirical", "serStdError", "kgRatio", "flags"].map(String::from));
    h
}

/// The curve as CSV text; floats use Rust's shortest round-trip formatting.
pub fn curve_csv(curve: &RateCurve) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(csv_header(curve))?;
    for p in &curve.points {
        let mut row: Vec<String> = vec![
            p.power.to_string(),
            p.half_range.map(|q| q.to_string()).unwrap_or_default(),
            p.spacing.to_string(),
            p.gamma.to_string(),
        ];
        row.extend(p.rates.iter().map(f64::to_string));
        row.push(p.sum_rate.to_string());
        row.extend(p.leakage.iter().map(f64::to_string));
        row.push(p.std_error.to_string());
        row.push(p.d_min.to_string());
        row.push(p.ser_bound.to_string());
        row.push(p.ser_empirical.map(|s| s.rate.to_string()).unwrap_or_default());
        row.push(p.ser_empirical.map(|s| s.std_error.to_string()).unwrap_or_default());
        row.push(p.kg_ratio.to_string());
        row.push(p.flags.join(";"));
        w.write_record(row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

/// Writes the CSV and `<csv stem>.manifest.json` under `out_dir`; returns both paths.
pub fn write_run(run: &ExperimentRun, out_dir: &Path) -> Result<(PathBuf, PathBuf)> {
    let rel = relative_output_path(&run.manifest.csv)?;
    let csv_path = out_dir.join(&rel);
    let manifest_path = csv_path.with_extension("manifest.json");
    if let Some(parent) = csv_path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(&csv_path, &run.csv)?;
    std::fs::write(&manifest_path, serde_json::to_string_pretty(&run.manifest)?)?;
    Ok((csv_path, manifest_path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_range_endpoints_are_exact() {
        let g: PGrid = "1e2:1e8:7".parse().unwrap();
        assert_eq!(g.powers(), vec![1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8]);
        let half: PGrid = "1e2:1e3:3".parse().unwrap();
        assert!((half.powers()[1] - 10f64.powf(2.5)).abs() < 1e-9);
    }

    #[test]
    fn grid_parsing_errors() {
        assert!("1e2:1e8".parse::<PGrid>().is_err());
        assert!("1e8:1e2:5".parse::<PGrid>().is_err());
        assert!("1e2:1e8:1".parse::<PGrid>().is_err());
        assert_eq!("100, 1000".parse::<PGrid>().unwrap(), PGrid::List(vec![100.0, 1000.0]));
    }

    #[test]
    fn grid_serde_round_trip() {
        let g: PGrid = serde_json::from_str("\"1e2:1e8:7\"").unwrap();
        let back: PGrid = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
        assert_eq!(g, back);
        let l: PGrid = serde_json::from_str("[1, 10]").unwrap();
        assert_eq!(l, PGrid::List(vec![1.0, 10.0]));
    }

    #[test]
    fn output_paths_stay_inside() {
        assert!(relative_output_path("a/b.csv").is_ok());
        assert!(relative_output_path("../b.csv").is_err());
        assert!(relative_output_path("/tmp/b.csv").is_err());
        assert!(relative_output_path("a/../../b.csv").is_err());
    }

    #[test]
    fn invalid_delta_is_rejected_first() {
        let mut c = ExperimentConfig::new("wt-helpers", 1, "1e2:1e8:7".parse().unwrap(), "x.csv");
        c.delta = 1.5;
        assert_eq!(c.validate().unwrap_err().code(), Error::DeltaOutOfRange(1.5).code());
    }

    #[test]
    fn run_is_reproducible() {
        let mut c = ExperimentConfig::new("wt-helpers", 1, "1e2:1e5:4".parse().unwrap(), "wt1.csv");
        c.ser_trials = 200;
        let a = run_experiment(&c).unwrap();
        let b = rerun_manifest(&a.manifest).unwrap();
        assert_eq!(a.csv, b.csv);
        assert_eq!(a.csv.lines().count(), 5);
        assert!(a.csv.starts_with("P,Q,a,gamma,rate_1,sum_rate,leakage,"));
    }

    #[test]
    fn manifest_survives_json() {
        let mut c = ExperimentConfig::new("ic-cm", 1, "1e2:1e5:4".parse().unwrap(), "ic.csv");
        c.seed = 11;
        c.ser_trials = 0;
        let a = run_experiment(&c).unwrap();
        let back: Manifest = serde_json::from_str(&serde_json::to_string(&a.manifest).unwrap()).unwrap();
        assert_eq!(back.gains, a.manifest.gains);
        assert_eq!(rerun_manifest(&back).unwrap().csv, a.csv);
    }

    #[test]
    fn mac_has_one_rate_column_per_message() {
        let mut c = ExperimentConfig::new("mac", 2, "1e2:1e5:4".parse().unwrap(), "mac.csv");
        c.ser_trials = 0;
        let run = run_experiment(&c).unwrap();
        let header = run.csv.lines().next().unwrap();
        assert!(header.contains("rate_1,rate_2,sum_rate"));
    }
}
