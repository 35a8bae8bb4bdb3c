//! Secure degrees of freedom: theoretical values, per-point scheme
//! evaluation (rates, leakage, minimum distance, error rates) and slope
//! fitting over a power sweep.

use num_rational::Ratio;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::alignment::{build_plan_with_delta, receiver_space, ReceiverSpace, SignalingPlan, SymbolId};
use crate::channel::{transmit_with, ChannelGains, GaussianNoise, NetworkModel, NoiseSource, Topology};
use crate::error::{Error, Result};
use crate::info::{diff_entropy, mutual_info, output_mixture, EntropyMethod, MiMethod, MiOptions};
use crate::pam::PamConstellation;
use crate::rng::{substream, SWEEP_STREAM_BASE};

/// Streams reserved per sweep point: MI calls use the first ones, the
/// error-rate simulation the last.
const STREAMS_PER_POINT: u64 = 64;

pub(crate) fn ratio_string<S: Serializer>(r: &Ratio<i64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// Secure d.o.f. (sum over messages) of a topology, with the result it comes from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoryEntry {
    pub topology: Topology,
    #[serde(serialize_with = "ratio_string")]
    pub dof: Ratio<i64>,
    pub result: &'static str,
}

/// Exact secure d.o.f. of each topology with independently faded gains.
pub fn theory_dof(topology: Topology) -> Ratio<i64> {
    match topology {
        Topology::WiretapHelpers { helpers } => Ratio::new(helpers as i64, helpers as i64 + 1),
        Topology::BcCmHelpers { helpers: 0 } => Ratio::from_integer(0),
        Topology::BcCmHelpers { .. } => Ratio::from_integer(1),
        Topology::IcCm { helpers: 0 } => Ratio::new(2, 3),
        Topology::IcCm { .. } => Ratio::from_integer(1),
        Topology::MacWiretap { users } => {
            let k = users as i64;
            Ratio::new(k * (k - 1), k * (k - 1) + 1)
        }
    }
}

fn result_name(topology: Topology) -> &'static str {
    match topology {
        Topology::WiretapHelpers { helpers: 0 } => "Gaussian wiretap channel, no helper",
        Topology::WiretapHelpers { helpers: 1 } => "wiretap channel with one helper",
        Topology::WiretapHelpers { .. } => "wiretap channel with M helpers",
        Topology::BcCmHelpers { helpers: 0 } => "broadcast channel with confidential messages",
        Topology::BcCmHelpers { .. } => "broadcast channel with confidential messages and helpers",
        Topology::IcCm { helpers: 0 } => "interference channel with confidential messages",
        Topology::IcCm { .. } => "interference channel with confidential messages and helpers",
        Topology::MacWiretap { .. } => "multiple access wiretap channel",
    }
}

pub fn theory_entry(topology: Topology) -> TheoryEntry {
    TheoryEntry { topology, dof: theory_dof(topology), result: result_name(topology) }
}

/// Table rows for helper counts `0..=max_helpers` and user counts `2..=max_users`.
pub fn theory_table(max_helpers: usize, max_users: usize) -> Vec<TheoryEntry> {
    let mut rows = Vec::new();
    for m in 0..=max_helpers {
        rows.push(theory_entry(Topology::WiretapHelpers { helpers: m }));
    }
    for m in 1..=max_helpers {
        rows.push(theory_entry(Topology::BcCmHelpers { helpers: m }));
    }
    for m in 0..=max_helpers {
        rows.push(theory_entry(Topology::IcCm { helpers: m }));
    }
    for k in 2..=max_users {
        rows.push(theory_entry(Topology::MacWiretap { users: k }));
    }
    rows
}

/// Sum-rate slope in `½log2 P` the scheme achieves for a given δ.
pub fn scheme_slope(topology: Topology, delta: f64) -> f64 {
    let (num, dims) = match topology {
        Topology::WiretapHelpers { helpers: 0 } => return 0.0,
        Topology::BcCmHelpers { helpers: 0 } => return 0.0,
        Topology::WiretapHelpers { helpers } => (helpers as f64, helpers as f64 + 1.0),
        Topology::BcCmHelpers { .. } | Topology::IcCm { helpers: 1.. } => (2.0, 2.0),
        Topology::IcCm { helpers: 0 } => (2.0, 3.0),
        Topology::MacWiretap { users } => {
            let k = (users * (users - 1)) as f64;
            (k, k + 1.0)
        }
    };
    num * (1.0 - delta) / (dims + delta)
}

/// Every point of a receiver constellation with its per-dimension lattice
/// sums, sorted by position and then lexicographically by tuple.
#[derive(Debug, Clone)]
pub struct ReceiverConstellation {
    pub values: Vec<f64>,
    /// Row-major, `dims` entries per point.
    pub tuples: Vec<i64>,
    pub dims: usize,
}

impl ReceiverConstellation {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn tuple(&self, i: usize) -> &[i64] {
        &self.tuples[i * self.dims..(i + 1) * self.dims]
    }

    /// Smallest gap between adjacent sorted points; infinite for one point.
    pub fn min_distance(&self) -> f64 {
        self.values.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }

    /// Index of the point nearest to `y`; exact ties go to the smaller tuple.
    pub fn nearest(&self, y: f64) -> usize {
        let n = self.values.len();
        let idx = self.values.partition_point(|v| *v < y);
        let mut best = if idx == n { n - 1 } else { idx };
        if idx > 0 {
            let left = idx - 1;
            let dl = y - self.values[left];
            let dr = if idx < n { self.values[idx] - y } else { f64::INFINITY };
            if dl < dr || (dl == dr && self.tuple(left) < self.tuple(idx)) {
                best = left;
            }
        }
        // step back to the first point of a run sharing the same position
        while best > 0 && self.values[best - 1] == self.values[best] {
            best -= 1;
        }
        best
    }
}

/// Enumerates the receiver constellation: each dimension contributes
/// `coefficient · a · s` for `s` in the support of its symbols' sum.
pub fn receiver_constellation(
    space: &ReceiverSpace,
    gains: &ChannelGains,
    constellation: PamConstellation,
    cap: usize,
) -> Result<ReceiverConstellation> {
    let q = constellation.half_range;
    let coeffs = space.evaluated(gains);
    let supports: Vec<(i64, i64)> = space
        .dims
        .iter()
        .map(|d| {
            let k = d.symbols.len() as i64;
            (-k * q as i64, k * q as i64)
        })
        .collect();
    let needed = supports.iter().fold(1u128, |acc, (lo, hi)| acc.saturating_mul((hi - lo + 1) as u128));
    if needed > cap as u128 {
        return Err(Error::EnumerationCap { needed, cap });
    }
    let dims = supports.len();
    let n = needed as usize;
    let mut points: Vec<(f64, Vec<i64>)> = Vec::with_capacity(n);
    let mut current: Vec<i64> = supports.iter().map(|(lo, _)| *lo).collect();
    for _ in 0..n {
        let value = current
            .iter()
            .zip(&coeffs)
            .map(|(s, c)| c * constellation.spacing * *s as f64)
            .sum();
        points.push((value, current.clone()));
        for d in (0..dims).rev() {
            if current[d] < supports[d].1 {
                current[d] += 1;
                break;
            }
            current[d] = supports[d].0;
        }
    }
    points.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    let mut values = Vec::with_capacity(n);
    let mut tuples = Vec::with_capacity(n * dims);
    for (v, t) in points {
        values.push(v);
        tuples.extend(t);
    }
    Ok(ReceiverConstellation { values, tuples, dims })
}

/// Minimum distance between distinct points of the receiver constellation.
pub fn min_distance(
    space: &ReceiverSpace,
    gains: &ChannelGains,
    constellation: PamConstellation,
    cap: usize,
) -> Result<f64> {
    Ok(receiver_constellation(space, gains, constellation, cap)?.min_distance())
}

/// `exp(-d²/8)` clamped to `[0, 1]`.
pub fn ser_bound(d_min: f64) -> f64 {
    (-d_min * d_min / 8.0).exp().clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SerEstimate {
    pub rate: f64,
    pub std_error: f64,
    pub trials: usize,
    pub errors: usize,
}

/// Symbol-error rate of nearest-point decoding of the dimension tuple at
/// receiver 0, with uniform symbols and Gaussian noise from `seed`.
pub fn ser_empirical(model: &NetworkModel, plan: &SignalingPlan, trials: usize, seed: u64, cap: usize) -> Result<SerEstimate> {
    let space = receiver_space(plan, 0);
    let points = receiver_constellation(&space, &model.gains, plan.constellation, cap)?;
    let mut rng = substream(seed, 0);
    let mut noise = GaussianNoise::from_seed(seed);
    ser_on_constellation(model, plan, &space, &points, trials, &mut rng, &mut noise)
}

/// As [`ser_empirical`] with a caller-supplied noise source.
pub fn ser_empirical_with(
    model: &NetworkModel,
    plan: &SignalingPlan,
    trials: usize,
    seed: u64,
    cap: usize,
    noise: &mut impl NoiseSource,
) -> Result<SerEstimate> {
    let space = receiver_space(plan, 0);
    let points = receiver_constellation(&space, &model.gains, plan.constellation, cap)?;
    let mut rng = substream(seed, 0);
    ser_on_constellation(model, plan, &space, &points, trials, &mut rng, noise)
}

fn ser_on_constellation(
    model: &NetworkModel,
    plan: &SignalingPlan,
    space: &ReceiverSpace,
    points: &ReceiverConstellation,
    trials: usize,
    rng: &mut impl Rng,
    noise: &mut impl NoiseSource,
) -> Result<SerEstimate> {
    let q = plan.constellation.half_range as i64;
    let a = plan.constellation.spacing;
    let dim_index: Vec<Vec<usize>> = plan
        .inputs
        .iter()
        .map(|terms| terms.iter().map(|t| space.dim_of(t.symbol).expect("every symbol has a dimension")).collect())
        .collect();
    let mut errors = 0usize;
    let mut truth = vec![0i64; space.dims.len()];
    let mut inputs = vec![0.0; plan.inputs.len()];
    for _ in 0..trials {
        truth.iter_mut().for_each(|t| *t = 0);
        for (tx, terms) in plan.inputs.iter().enumerate() {
            inputs[tx] = 0.0;
            for (term, &d) in terms.iter().zip(&dim_index[tx]) {
                let n = rng.random_range(-q..=q);
                truth[d] += n;
                inputs[tx] += term.coeff.eval(&model.gains) * a * n as f64;
            }
        }
        let (y, _) = transmit_with(model, &inputs, noise)?;
        if points.tuple(points.nearest(y)) != truth.as_slice() {
            errors += 1;
        }
    }
    let p = errors as f64 / trials.max(1) as f64;
    Ok(SerEstimate {
        rate: p,
        std_error: (p * (1.0 - p) / trials.max(1) as f64).sqrt(),
        trials,
        errors,
    })
}

/// Secrecy-rate lower bounds at one operating point, in bits per channel use.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRates {
    pub rates: Vec<f64>,
    pub sum_rate: f64,
    /// Eavesdropper-side information: per message for two-message schemes,
    /// total otherwise.
    pub leakage: Vec<f64>,
    /// Largest standard error among the information terms (zero for quadrature).
    pub std_error: f64,
}

/// `max(0, C(h1²P) - C(g1²P))` for the wiretap channel without helpers.
pub fn gaussian_wiretap_rates(model: &NetworkModel) -> PointRates {
    let c = |snr: f64| 0.5 * (1.0 + snr).log2();
    let p = model.power;
    let leak = c(model.gains.g(0).powi(2) * p);
    let r = (c(model.gains.h(0).powi(2) * p) - leak).max(0.0);
    PointRates { rates: vec![r], sum_rate: r, leakage: vec![leak], std_error: 0.0 }
}

/// Conditional informations `I(B_i; Y_rx | B_<i, given)` for successive blocks.
fn chain_informations(
    plan: &SignalingPlan,
    model: &NetworkModel,
    rx: usize,
    blocks: &[Vec<SymbolId>],
    given: &[SymbolId],
    opts: &MiOptions,
) -> Result<Vec<(f64, f64)>> {
    match opts.method {
        MiMethod::Quadrature => {
            let mut cond: std::collections::BTreeMap<SymbolId, i64> = given.iter().map(|s| (*s, 0)).collect();
            let entropy = |cond: &std::collections::BTreeMap<SymbolId, i64>| -> Result<f64> {
                let mix = output_mixture(plan, model, rx, cond, opts.cap)?;
                Ok(diff_entropy(&mix, EntropyMethod::Quadrature, opts.tol)?.value)
            };
            let mut prev = entropy(&cond)?;
            let mut out = Vec::with_capacity(blocks.len());
            for b in blocks {
                cond.extend(b.iter().map(|s| (*s, 0)));
                let next = entropy(&cond)?;
                out.push((prev - next, 0.0));
                prev = next;
            }
            Ok(out)
        }
        MiMethod::MonteCarlo { .. } => {
            let mut known: Vec<SymbolId> = given.to_vec();
            let mut out = Vec::with_capacity(blocks.len());
            for (i, b) in blocks.iter().enumerate() {
                let o = MiOptions { stream: opts.stream + i as u64, ..*opts };
                let mi = mutual_info(plan, model, rx, b, &known, &o)?;
                out.push((mi.value, mi.std_error));
                known.extend(b.iter().copied());
            }
            Ok(out)
        }
    }
}

/// Secrecy-rate lower bounds of the alignment scheme under `plan`.
///
/// * wiretap with helpers: `I(V; Y1) - I(V; Y2)` for all message symbols `V`;
/// * two-message schemes: `R_m = I(V_m; Y_m) - I(V_m; Y_other | V_other)`,
///   each floored at zero;
/// * multiple access: the chain-rule split `I(V_i; Y1 | V_<i) - I(V_i; Y2 | V_<i)`
///   per message, summing to `I(V; Y1) - I(V; Y2)`; only the sum is floored.
pub fn scheme_rates(plan: &SignalingPlan, model: &NetworkModel, opts: &MiOptions) -> Result<PointRates> {
    let stream = |k: u64| MiOptions { stream: opts.stream + 8 * k, ..*opts };
    match plan.topology {
        Topology::WiretapHelpers { .. } => {
            let v = plan.message_symbols();
            let legit = chain_informations(plan, model, 0, std::slice::from_ref(&v), &[], &stream(0))?[0];
            let eaves = chain_informations(plan, model, 1, &[v], &[], &stream(1))?[0];
            let r = (legit.0 - eaves.0).max(0.0);
            Ok(PointRates {
                rates: vec![r],
                sum_rate: r,
                leakage: vec![eaves.0],
                std_error: legit.1.max(eaves.1),
            })
        }
        Topology::BcCmHelpers { .. } | Topology::IcCm { .. } => {
            let mut rates = Vec::new();
            let mut leakage = Vec::new();
            let mut se: f64 = 0.0;
            for m in 0..2 {
                let own = plan.messages[m].clone();
                let other = plan.messages[1 - m].clone();
                let legit = chain_informations(plan, model, plan.intended[m], std::slice::from_ref(&own), &[], &stream(2 * m as u64))?[0];
                let eaves =
                    chain_informations(plan, model, plan.eavesdropper_of(m), &[own], &other, &stream(2 * m as u64 + 1))?[0];
                rates.push((legit.0 - eaves.0).max(0.0));
                leakage.push(eaves.0);
                se = se.max(legit.1).max(eaves.1);
            }
            Ok(PointRates { sum_rate: rates.iter().sum(), rates, leakage, std_error: se })
        }
        Topology::MacWiretap { .. } => {
            let legit = chain_informations(plan, model, 0, &plan.messages, &[], &stream(0))?;
            let eaves = chain_informations(plan, model, 1, &plan.messages, &[], &stream(1))?;
            let rates: Vec<f64> = legit.iter().zip(&eaves).map(|(l, e)| l.0 - e.0).collect();
            let se = legit.iter().chain(&eaves).map(|x| x.1).fold(0.0, f64::max);
            Ok(PointRates {
                sum_rate: rates.iter().sum::<f64>().max(0.0),
                rates,
                leakage: vec![eaves.iter().map(|e| e.0).sum()],
                std_error: se,
            })
        }
    }
}

/// Settings for [`sweep`] and [`evaluate_point`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub delta: f64,
    pub mi: MiOptions,
    /// Decoding trials per point; zero skips the simulation.
    pub ser_trials: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { delta: crate::pam::DEFAULT_DELTA, mi: MiOptions::default(), ser_trials: 2000 }
    }
}

/// One sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub power: f64,
    /// `None` for the Gaussian (no alignment) scheme.
    pub half_range: Option<u32>,
    pub spacing: f64,
    pub gamma: f64,
    pub clamped: bool,
    pub rates: Vec<f64>,
    pub sum_rate: f64,
    pub leakage: Vec<f64>,
    pub std_error: f64,
    pub d_min: f64,
    pub ser_bound: f64,
    pub ser_empirical: Option<SerEstimate>,
    /// `dMin · (cQ)^(m-1+δ) / a`, which stays bounded below when the gains
    /// are well approximable.
    pub kg_ratio: f64,
    pub flags: Vec<String>,
}

/// Result of a power sweep for one gain draw.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateCurve {
    pub scheme: String,
    pub topology: Topology,
    pub delta: f64,
    pub points: Vec<RatePoint>,
    /// Least-squares slope of sum rate against `½log2 P` over the top half of the grid.
    pub fitted_slope: f64,
    #[serde(serialize_with = "ratio_string")]
    pub theory_slope: Ratio<i64>,
    pub scheme_slope: f64,
    pub flags: Vec<String>,
}

/// Grid must be strictly increasing, have at least 4 points and span at least 3 decades.
pub fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 4 {
        return Err(Error::InvalidGrid(format!("need at least 4 points, got {}", grid.len())));
    }
    if grid.iter().any(|p| !(*p > 0.0 && p.is_finite())) {
        return Err(Error::InvalidGrid("powers must be positive and finite".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid("powers must be strictly increasing".into()));
    }
    if grid[grid.len() - 1] / grid[0] < 1e3 * (1.0 - 1e-12) {
        return Err(Error::InvalidGrid("grid must span at least 3 decades".into()));
    }
    Ok(())
}

/// Least-squares slope of `sums` against `½log2 P` over the last `⌈n/2⌉` points.
pub fn fit_slope(powers: &[f64], sums: &[f64]) -> f64 {
    let n = powers.len();
    let start = n - n.div_ceil(2);
    let xs: Vec<f64> = powers[start..].iter().map(|p| 0.5 * p.log2()).collect();
    let ys = &sums[start..];
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Least-squares slope against `½log2 P` pooled over several curves, each
/// contributing its top-half points; `value` picks the quantity per point.
pub fn pooled_slope(curves: &[RateCurve], value: impl Fn(&RatePoint) -> f64) -> f64 {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for c in curves {
        let n = c.points.len();
        for p in &c.points[n - n.div_ceil(2)..] {
            xs.push(p.power);
            ys.push(value(p));
        }
    }
    // every point is already in the top half, so fit them all
    let xs: Vec<f64> = xs.iter().map(|p| 0.5 * p.log2()).collect();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

fn kg_scale(topology: Topology) -> f64 {
    match topology {
        Topology::WiretapHelpers { helpers } => helpers.max(1) as f64,
        Topology::BcCmHelpers { .. } | Topology::IcCm { .. } => 2.0,
        Topology::MacWiretap { users } => users as f64,
    }
}

/// Evaluates the scheme at `power`; `index` selects the point's random streams.
pub fn evaluate_point(model: &NetworkModel, power: f64, index: usize, seed: u64, opts: &SweepOptions) -> Result<RatePoint> {
    crate::pam::validate_delta(opts.delta)?;
    let model = model.with_power(power)?;
    let base = SWEEP_STREAM_BASE + index as u64 * STREAMS_PER_POINT;
    if let Topology::WiretapHelpers { helpers: 0 } = model.topology {
        let r = gaussian_wiretap_rates(&model);
        return Ok(RatePoint {
            power,
            half_range: None,
            spacing: f64::NAN,
            gamma: f64::NAN,
            clamped: false,
            rates: r.rates,
            sum_rate: r.sum_rate,
            leakage: r.leakage,
            std_error: 0.0,
            d_min: f64::NAN,
            ser_bound: f64::NAN,
            ser_empirical: None,
            kg_ratio: f64::NAN,
            flags: Vec::new(),
        });
    }
    let plan = build_plan_with_delta(&model, opts.delta)?;
    let schedule = plan.schedule.expect("built plans carry their schedule");
    let mi = MiOptions { seed, stream: base, ..opts.mi };
    let rates = scheme_rates(&plan, &model, &mi)?;
    let mut flags = Vec::new();
    if schedule.clamped {
        flags.push("q-clamped".to_string());
    }
    let space = receiver_space(&plan, 0);
    let (d_min, ser) = match receiver_constellation(&space, &model.gains, plan.constellation, opts.mi.cap) {
        Ok(points) => {
            let ser = if opts.ser_trials > 0 {
                let mut rng = substream(seed, base + STREAMS_PER_POINT - 1);
                let mut noise = GaussianNoise(substream(seed, base + STREAMS_PER_POINT - 2));
                Some(ser_on_constellation(&model, &plan, &space, &points, opts.ser_trials, &mut rng, &mut noise)?)
            } else {
                None
            };
            (points.min_distance(), ser)
        }
        Err(Error::EnumerationCap { .. }) => {
            flags.push("dmin-not-enumerated".to_string());
            (f64::NAN, None)
        }
        Err(e) => return Err(e),
    };
    let q = schedule.constellation.half_range as f64;
    let a = schedule.constellation.spacing;
    let kg_ratio = d_min * (kg_scale(model.topology) * q).powf(schedule.dims as f64 - 1.0 + opts.delta) / a;
    Ok(RatePoint {
        power,
        half_range: Some(schedule.constellation.half_range),
        spacing: a,
        gamma: schedule.gamma,
        clamped: schedule.clamped,
        rates: rates.rates,
        sum_rate: rates.sum_rate,
        leakage: rates.leakage,
        std_error: rates.std_error,
        d_min,
        ser_bound: ser_bound(d_min),
        ser_empirical: ser,
        kg_ratio,
        flags,
    })
}

/// Evaluates every grid point (in parallel) and fits the slope.
pub fn sweep(model: &NetworkModel, grid: &[f64], seed: u64, opts: &SweepOptions) -> Result<RateCurve> {
    validate_grid(grid)?;
    crate::pam::validate_delta(opts.delta)?;
    let mut points = grid
        .par_iter()
        .enumerate()
        .map(|(i, &p)| evaluate_point(model, p, i, seed, opts))
        .collect::<Result<Vec<_>>>()?;
    for i in 1..points.len() {
        if points[i].d_min < points[i - 1].d_min {
            points[i].flags.push("dmin-nonmonotone".to_string());
        }
    }
    let mut flags = Vec::new();
    let mut peak: f64 = 0.0;
    for p in &points {
        if p.kg_ratio.is_finite() {
            peak = peak.max(p.kg_ratio);
            if p.kg_ratio * 10.0 < peak {
                flags.push("kg-ratio-decay".to_string());
                break;
            }
        }
    }
    let powers: Vec<f64> = points.iter().map(|p| p.power).collect();
    let sums: Vec<f64> = points.iter().map(|p| p.sum_rate).collect();
    Ok(RateCurve {
        scheme: model.topology.scheme_id().to_string(),
        topology: model.topology,
        delta: opts.delta,
        fitted_slope: fit_slope(&powers, &sums),
        theory_slope: theory_dof(model.topology),
        scheme_slope: scheme_slope(model.topology, opts.delta),
        points,
        flags,
    })
}
