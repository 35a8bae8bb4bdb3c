//! Information measures for discrete inputs observed in unit-variance AWGN.
//!
//! Every receiver output in this crate is a Gaussian mixture `Y = Σ c_s·S + N`
//! with `N ~ N(0, 1)`. Differential entropies are computed either by
//! trapezoidal quadrature of `-f log2 f` (refined until two successive grids
//! agree) or by Monte Carlo averaging of `-log2 f` at samples from the
//! mixture. All results are in bits.

use std::collections::BTreeMap;
use std::f64::consts::{E, PI};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::alignment::{receiver_space, GainSymbol, Monomial, SignalingPlan, SymbolId};
use crate::channel::{NetworkModel, Topology};
use crate::error::{Error, Result};
use crate::pam::sum_pam_pmf;
use crate::rng::substream;

/// Default cap on enumerated mixture components.
pub const DEFAULT_ENUMERATION_CAP: usize = 1_000_000;
/// Default quadrature tolerance in bits.
pub const DEFAULT_TOLERANCE: f64 = 1e-4;
/// Half-width, in noise standard deviations, of the integration window
/// around each component.
pub const QUADRATURE_RADIUS: f64 = 10.0;
/// Components farther than this from a Monte Carlo sample are dropped when
/// evaluating the density there.
pub const THINNING_RADIUS: f64 = 8.0;

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
const INITIAL_STEP: f64 = 0.5;
const MAX_GRID_POINTS: usize = 50_000_000;

/// Entropy of `N(0, var)` in bits.
pub fn gaussian_entropy(var: f64) -> f64 {
    0.5 * (2.0 * PI * E * var).log2()
}

fn std_normal_pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Law of `Σ c_s·S + N` with `N ~ N(0, 1)`: means sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureDensity {
    means: Vec<f64>,
    weights: Vec<f64>,
    cdf: Vec<f64>,
}

impl MixtureDensity {
    /// Weights must sum to 1 within 1e-9; they are then renormalized.
    pub fn new(means: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if means.len() != weights.len() || means.is_empty() {
            return Err(Error::InvalidMixture(format!(
                "{} means and {} weights",
                means.len(),
                weights.len()
            )));
        }
        if means.iter().any(|m| !m.is_finite()) {
            return Err(Error::InvalidMixture("non-finite mean".into()));
        }
        if weights.iter().any(|w| w.is_nan() || *w < 0.0) {
            return Err(Error::InvalidMixture("negative weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidMixture(format!("weights sum to {total}")));
        }
        let mut pairs: Vec<(f64, f64)> = means.into_iter().zip(weights.into_iter().map(|w| w / total)).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (means, weights): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let cdf = weights
            .iter()
            .scan(0.0, |acc, w| {
                *acc += w;
                Some(*acc)
            })
            .collect();
        Ok(Self { means, weights, cdf })
    }

    /// A single unit-variance Gaussian at `mean`.
    pub fn gaussian(mean: f64) -> Self {
        Self { means: vec![mean], weights: vec![1.0], cdf: vec![1.0] }
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.means.len()
    }

    pub fn is_empty(&self) -> bool {
        self.means.is_empty()
    }

    /// Density summed over components within `radius` of `y`.
    pub fn density_within(&self, y: f64, radius: f64) -> f64 {
        let lo = self.means.partition_point(|m| *m < y - radius);
        let hi = self.means.partition_point(|m| *m <= y + radius);
        self.means[lo..hi]
            .iter()
            .zip(&self.weights[lo..hi])
            .map(|(m, w)| w * std_normal_pdf(y - m))
            .sum()
    }

    pub fn density(&self, y: f64) -> f64 {
        self.density_within(y, QUADRATURE_RADIUS)
    }

    pub fn sample(&self, rng: &mut impl Rng) -> f64 {
        let u: f64 = rng.random::<f64>() * self.cdf[self.cdf.len() - 1];
        let idx = self.cdf.partition_point(|c| *c <= u).min(self.means.len() - 1);
        self.means[idx] + rng.sample::<f64, _>(StandardNormal)
    }

    /// Disjoint intervals covering `[μ - R, μ + R]` for every mean.
    fn windows(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        for &m in &self.means {
            let (lo, hi) = (m - QUADRATURE_RADIUS, m + QUADRATURE_RADIUS);
            match out.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => out.push((lo, hi)),
            }
        }
        out
    }

    /// Trapezoidal integral of `f` over the integration window.
    pub fn normalization(&self) -> f64 {
        self.windows()
            .iter()
            .map(|&(lo, hi)| {
                let n = ((hi - lo) / 0.25).ceil() as usize;
                let h = (hi - lo) / n as f64;
                let inner: f64 = (1..n).map(|i| self.density(lo + i as f64 * h)).sum();
                h * (inner + 0.5 * (self.density(lo) + self.density(hi)))
            })
            .sum()
    }

    /// Evaluates `g(f(y))` on an ascending grid with a sliding component window.
    fn sum_on_grid(&self, start: f64, step: f64, count: usize, g: impl Fn(f64) -> f64) -> f64 {
        let mut lo = 0usize;
        let mut hi = 0usize;
        let n = self.means.len();
        let mut acc = 0.0;
        for i in 0..count {
            let y = start + i as f64 * step;
            while lo < n && self.means[lo] < y - QUADRATURE_RADIUS {
                lo += 1;
            }
            if hi < lo {
                hi = lo;
            }
            while hi < n && self.means[hi] <= y + QUADRATURE_RADIUS {
                hi += 1;
            }
            let f: f64 = self.means[lo..hi]
                .iter()
                .zip(&self.weights[lo..hi])
                .map(|(m, w)| w * std_normal_pdf(y - m))
                .sum();
            acc += g(f);
        }
        acc
    }
}

fn neg_f_log2_f(f: f64) -> f64 {
    if f > 0.0 {
        -f * f.log2()
    } else {
        0.0
    }
}

/// How an entropy or mutual information value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EstimateMethod {
    Quadrature,
    MonteCarlo { samples: usize },
}

/// Method selector for entropy and mutual-information evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EntropyMethod {
    Quadrature,
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    pub value: f64,
    pub method: EstimateMethod,
    /// Zero for quadrature.
    pub std_error: f64,
    /// Difference between the last two quadrature refinements; for Monte
    /// Carlo, the bound on density mass dropped by thinning.
    pub achieved_tol: f64,
}

/// Differential entropy `h(Y)` of the mixture, in bits.
pub fn diff_entropy(mix: &MixtureDensity, method: EntropyMethod, tol: f64) -> Result<EntropyEstimate> {
    match method {
        EntropyMethod::Quadrature => quadrature_entropy(mix, tol),
        EntropyMethod::MonteCarlo { samples, seed } => Ok(mc_entropy(mix, samples, seed)),
    }
}

fn quadrature_entropy(mix: &MixtureDensity, tol: f64) -> Result<EntropyEstimate> {
    if mix.len() == 1 {
        return Ok(EntropyEstimate {
            value: gaussian_entropy(1.0),
            method: EstimateMethod::Quadrature,
            std_error: 0.0,
            achieved_tol: 0.0,
        });
    }
    // Per window: current step, point count (intervals) and the running sum
    // of g(f) over all grid nodes with endpoint weights applied.
    struct Panel {
        lo: f64,
        n: usize,
        h: f64,
        sum: f64,
    }
    let mut panels: Vec<Panel> = mix
        .windows()
        .into_iter()
        .map(|(lo, hi)| {
            let n = ((hi - lo) / INITIAL_STEP).ceil().max(1.0) as usize;
            let h = (hi - lo) / n as f64;
            let ends = 0.5 * (neg_f_log2_f(mix.density(lo)) + neg_f_log2_f(mix.density(hi)));
            let inner = mix.sum_on_grid(lo + h, h, n - 1, neg_f_log2_f);
            Panel { lo, n, h, sum: ends + inner }
        })
        .collect();
    let total = |ps: &[Panel]| ps.iter().map(|p| p.h * p.sum).sum::<f64>();
    let mut prev = total(&panels);
    let mut points: usize = panels.iter().map(|p| p.n).sum();
    loop {
        points *= 2;
        if points > MAX_GRID_POINTS {
            return Err(Error::Tolerance { best: prev, achieved: f64::NAN });
        }
        for p in &mut panels {
            let mids = mix.sum_on_grid(p.lo + 0.5 * p.h, p.h, p.n, neg_f_log2_f);
            p.sum += mids;
            p.h *= 0.5;
            p.n *= 2;
        }
        let next = total(&panels);
        let diff = (next - prev).abs();
        if diff < tol {
            return Ok(EntropyEstimate {
                value: next,
                method: EstimateMethod::Quadrature,
                std_error: 0.0,
                achieved_tol: diff,
            });
        }
        if points * 2 > MAX_GRID_POINTS {
            return Err(Error::Tolerance { best: next, achieved: diff });
        }
        prev = next;
    }
}

fn mc_entropy(mix: &MixtureDensity, samples: usize, seed: u64) -> EntropyEstimate {
    let mut rng = substream(seed, 0);
    let vals: Vec<f64> = (0..samples.max(2))
        .map(|_| {
            let y = mix.sample(&mut rng);
            -mix.density_within(y, THINNING_RADIUS).log2()
        })
        .collect();
    let (mean, se) = mean_and_se(&vals);
    EntropyEstimate {
        value: mean,
        method: EstimateMethod::MonteCarlo { samples: vals.len() },
        std_error: se,
        achieved_tol: std_normal_pdf(THINNING_RADIUS),
    }
}

pub(crate) fn mean_and_se(vals: &[f64]) -> (f64, f64) {
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}

/// Evaluated coefficient of every plan symbol at receiver `rx`.
fn symbol_coefficients(plan: &SignalingPlan, model: &NetworkModel, rx: usize) -> BTreeMap<SymbolId, f64> {
    let mut out = BTreeMap::new();
    for (tx, terms) in plan.inputs.iter().enumerate() {
        let link = Monomial::symbol(GainSymbol::link(plan.topology, tx, rx));
        for t in terms {
            out.insert(t.symbol, (&t.coeff * &link).eval(&model.gains));
        }
    }
    out
}

/// Law of receiver `rx`'s output given fixed lattice indices for some symbols.
///
/// `conditioned` maps a symbol to its lattice index `n ∈ {-Q, …, Q}`; the
/// symbol's value is `a·n`. Unconditioned symbols sharing a dimension are
/// summed through their exact convolution law, so the component count is the
/// product over dimensions of the within-dimension support sizes.
pub fn output_mixture(
    plan: &SignalingPlan,
    model: &NetworkModel,
    rx: usize,
    conditioned: &BTreeMap<SymbolId, i64>,
    cap: usize,
) -> Result<MixtureDensity> {
    let q = plan.constellation.half_range;
    let a = plan.constellation.spacing;
    let symbols = plan.symbols();
    for (s, n) in conditioned {
        if !symbols.contains(s) {
            return Err(Error::InvalidParameter(format!("{s} is not a symbol of the plan")));
        }
        if n.unsigned_abs() > q as u64 {
            return Err(Error::InvalidParameter(format!("{s} = {n} lies outside {{-{q}, …, {q}}}")));
        }
    }
    let space = receiver_space(plan, rx);
    let mut factors: Vec<(f64, crate::pam::LatticePmf)> = Vec::new();
    let mut shift = 0.0;
    let mut needed: u128 = 1;
    for (dim, c) in space.dims.iter().zip(space.evaluated(&model.gains)) {
        if c == 0.0 {
            continue;
        }
        let fixed: i64 = dim.symbols.iter().filter_map(|s| conditioned.get(s)).sum();
        let free = dim.symbols.iter().filter(|s| !conditioned.contains_key(s)).count() as u32;
        shift += c * a * fixed as f64;
        if free > 0 {
            let pmf = sum_pam_pmf(q, free);
            needed = needed.saturating_mul(pmf.probs.len() as u128);
            factors.push((c * a, pmf));
        }
    }
    if needed > cap as u128 {
        return Err(Error::EnumerationCap { needed, cap });
    }
    let mut means = vec![shift];
    let mut weights = vec![1.0];
    for (scale, pmf) in &factors {
        let mut m2 = Vec::with_capacity(means.len() * pmf.probs.len());
        let mut w2 = Vec::with_capacity(m2.capacity());
        for (m, w) in means.iter().zip(&weights) {
            for (n, p) in pmf.support().zip(&pmf.probs) {
                m2.push(m + scale * n as f64);
                w2.push(w * p);
            }
        }
        means = m2;
        weights = w2;
    }
    MixtureDensity::new(means, weights)
}

/// Options for [`mutual_info`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MiOptions {
    pub method: MiMethod,
    pub tol: f64,
    pub cap: usize,
    pub seed: u64,
    /// Substream index for the Monte Carlo path.
    pub stream: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MiMethod {
    Quadrature,
    MonteCarlo { samples: usize },
}

impl Default for MiOptions {
    fn default() -> Self {
        Self { method: MiMethod::Quadrature, tol: DEFAULT_TOLERANCE, cap: DEFAULT_ENUMERATION_CAP, seed: 0, stream: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MiEstimate {
    pub value: f64,
    pub method: EstimateMethod,
    pub std_error: f64,
}

/// `I(V; Y_rx | W)` in bits for disjoint symbol sets `V = about`, `W = given`.
///
/// Conditioning on symbol values only translates the output mixture, and
/// differential entropy is translation invariant, so
/// `I(V;Y|W) = h(Y | W = 0) - h(Y | V = 0, W = 0)`. The Monte Carlo path
/// samples `(V, rest, N)` with `W = 0` and averages
/// `log2 f(y | W=0) - log2 f(y - c·v | V=0, W=0)`.
pub fn mutual_info(
    plan: &SignalingPlan,
    model: &NetworkModel,
    rx: usize,
    about: &[SymbolId],
    given: &[SymbolId],
    opts: &MiOptions,
) -> Result<MiEstimate> {
    if about.iter().any(|s| given.contains(s)) {
        return Err(Error::InvalidParameter("`about` and `given` symbol sets overlap".into()));
    }
    let zero_w: BTreeMap<SymbolId, i64> = given.iter().map(|s| (*s, 0)).collect();
    let mut zero_vw = zero_w.clone();
    zero_vw.extend(about.iter().map(|s| (*s, 0)));
    let mix_w = output_mixture(plan, model, rx, &zero_w, opts.cap)?;
    let mix_vw = output_mixture(plan, model, rx, &zero_vw, opts.cap)?;
    match opts.method {
        MiMethod::Quadrature => {
            let h_w = quadrature_entropy(&mix_w, opts.tol)?;
            let h_vw = quadrature_entropy(&mix_vw, opts.tol)?;
            Ok(MiEstimate { value: h_w.value - h_vw.value, method: EstimateMethod::Quadrature, std_error: 0.0 })
        }
        MiMethod::MonteCarlo { samples } => {
            let coeffs = symbol_coefficients(plan, model, rx);
            let q = plan.constellation.half_range as i64;
            let a = plan.constellation.spacing;
            let free: Vec<(f64, bool)> = coeffs
                .iter()
                .filter(|(s, _)| !given.contains(s))
                .map(|(s, c)| (c * a, about.contains(s)))
                .collect();
            let mut rng = substream(opts.seed, opts.stream);
            let vals: Vec<f64> = (0..samples.max(2))
                .map(|_| {
                    let mut y = 0.0;
                    let mut v = 0.0;
                    for &(c, is_about) in &free {
                        let x = c * rng.random_range(-q..=q) as f64;
                        y += x;
                        if is_about {
                            v += x;
                        }
                    }
                    y += rng.sample::<f64, _>(StandardNormal);
                    let fw = mix_w.density_within(y, THINNING_RADIUS);
                    let fvw = mix_vw.density_within(y - v, THINNING_RADIUS);
                    fvw.log2() - fw.log2()
                })
                .collect();
            let (mean, se) = mean_and_se(&vals);
            Ok(MiEstimate { value: mean, method: EstimateMethod::MonteCarlo { samples: vals.len() }, std_error: se })
        }
    }
}

/// Analytic cap on the eavesdropper-side information of each scheme, per
/// message for the two-message schemes and in total otherwise.
///
/// Without helpers the wiretap channel uses Gaussian signaling and its
/// leakage grows with `P`; the cap is infinite there.
pub fn leakage_cap(topology: Topology) -> f64 {
    match topology {
        Topology::WiretapHelpers { helpers: 0 } => f64::INFINITY,
        Topology::WiretapHelpers { helpers } => helpers as f64,
        Topology::BcCmHelpers { .. } | Topology::IcCm { .. } => 1.0,
        Topology::MacWiretap { users } => users as f64 * (users as f64).log2(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alignment::{build_plan, SignalingPlan};
    use crate::channel::{sample_gains, ChannelGains, GainRange};
    use crate::pam::PamConstellation;
    use approx::assert_relative_eq;
    use num_rational::Ratio;

    fn single_symbol_plan(a: f64, q: u32, coeff: Monomial) -> (SignalingPlan, NetworkModel) {
        let topo = Topology::WiretapHelpers { helpers: 1 };
        let v = SymbolId::Message { tx: 0, sub: 1 };
        let plan = SignalingPlan::custom(
            topo,
            vec![vec![SignalingPlan::term(coeff, v)], vec![]],
            vec![vec![v]],
            vec![0],
            PamConstellation::new(a, q).unwrap(),
        )
        .unwrap();
        let gains = ChannelGains::new(vec![1.0, 1.0], vec![1.0, 1.0]).unwrap();
        (plan, NetworkModel::new(topo, gains, 100.0).unwrap())
    }

    fn wt1(a: f64, q: u32) -> (SignalingPlan, NetworkModel) {
        let topo = Topology::WiretapHelpers { helpers: 1 };
        let gains = sample_gains(topo, 7, &GainRange::default()).unwrap();
        let model = NetworkModel::new(topo, gains, 1e4).unwrap();
        let plan = build_plan(&model).unwrap().with_constellation(PamConstellation::new(a, q).unwrap());
        (plan, model)
    }

    const V: SymbolId = SymbolId::Message { tx: 0, sub: 1 };
    const U: SymbolId = SymbolId::Jamming { tx: 1 };

    #[test]
    fn single_symbol_mixture() {
        let (plan, model) = single_symbol_plan(2.5, 1, Monomial::one());
        let mix = output_mixture(&plan, &model, 0, &BTreeMap::new(), DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(mix.means(), &[-2.5, 0.0, 2.5]);
        for w in mix.weights() {
            assert_relative_eq!(*w, 1.0 / 3.0);
        }
    }

    #[test]
    fn eavesdropper_mixture_is_a_convolution() {
        let a = 3.0;
        let (plan, model) = wt1(a, 1);
        let mix = output_mixture(&plan, &model, 1, &BTreeMap::new(), DEFAULT_ENUMERATION_CAP).unwrap();
        let expect_w = [1.0, 2.0, 3.0, 2.0, 1.0].map(|c| c / 9.0);
        assert_eq!(mix.len(), 5);
        for (i, (m, w)) in mix.means().iter().zip(mix.weights()).enumerate() {
            assert_relative_eq!(*m, a * (i as f64 - 2.0), epsilon = 1e-12);
            assert_relative_eq!(*w, expect_w[i], epsilon = 1e-15);
        }
        let cond = BTreeMap::from([(V, 1)]);
        let mix = output_mixture(&plan, &model, 1, &cond, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(mix.len(), 3);
        for (i, m) in mix.means().iter().enumerate() {
            assert_relative_eq!(*m, a + a * (i as f64 - 1.0), epsilon = 1e-12);
        }
    }

    #[test]
    fn conditioning_checks_range_and_membership() {
        let (plan, model) = wt1(1.0, 1);
        let bad = BTreeMap::from([(V, 2)]);
        assert!(output_mixture(&plan, &model, 1, &bad, 100).is_err());
        let unknown = BTreeMap::from([(SymbolId::Jamming { tx: 0 }, 0)]);
        assert!(output_mixture(&plan, &model, 1, &unknown, 100).is_err());
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        let (plan, model) = wt1(1.0, 40);
        let err = output_mixture(&plan, &model, 0, &BTreeMap::new(), 1000).unwrap_err();
        assert_eq!(err, Error::EnumerationCap { needed: 81 * 81, cap: 1000 });
    }

    #[test]
    fn gaussian_entropy_limits() {
        let one = MixtureDensity::gaussian(3.0);
        let h = diff_entropy(&one, EntropyMethod::Quadrature, 1e-6).unwrap();
        assert_relative_eq!(h.value, gaussian_entropy(1.0), epsilon = 1e-12);
        assert!((h.value - 2.047).abs() < 1e-3);

        let two = MixtureDensity::new(vec![-50.0, 50.0], vec![0.5, 0.5]).unwrap();
        let h = diff_entropy(&two, EntropyMethod::Quadrature, 1e-8).unwrap();
        assert_relative_eq!(h.value, gaussian_entropy(1.0) + 1.0, epsilon = 1e-6);
    }

    #[test]
    fn quadrature_matches_monte_carlo_on_pam_sum() {
        let (plan, model) = wt1(10.0, 1);
        let mix = output_mixture(&plan, &model, 1, &BTreeMap::new(), DEFAULT_ENUMERATION_CAP).unwrap();
        let q = diff_entropy(&mix, EntropyMethod::Quadrature, 1e-6).unwrap();
        let mc = diff_entropy(&mix, EntropyMethod::MonteCarlo { samples: 40_000, seed: 3 }, 0.0).unwrap();
        assert!((q.value - mc.value).abs() < 3.0 * mc.std_error, "{q:?} {mc:?}");
    }

    #[test]
    fn mixture_is_normalized() {
        let (plan, model) = wt1(0.7, 6);
        let mix = output_mixture(&plan, &model, 0, &BTreeMap::new(), DEFAULT_ENUMERATION_CAP).unwrap();
        let z = mix.normalization();
        assert!(z > 1.0 - 1e-6 && z <= 1.0 + 1e-12, "{z}");
    }

    #[test]
    fn noiseless_limit_recovers_symbol_entropy() {
        let (plan, model) = wt1(1e3, 2);
        let all = plan.symbols();
        let mi = mutual_info(&plan, &model, 0, &all, &[], &MiOptions::default()).unwrap();
        assert!((mi.value - 2.0 * 5f64.log2()).abs() < 0.01, "{mi:?}");
    }

    #[test]
    fn eavesdropper_leakage_is_below_one_bit() {
        for (a, q) in [(0.3, 3), (1.0, 1), (2.0, 5), (50.0, 4), (5.0, 20)] {
            let (plan, model) = wt1(a, q);
            let mi = mutual_info(&plan, &model, 1, &[V], &[], &MiOptions::default()).unwrap();
            assert!(mi.value <= 1.0 && mi.value >= -1e-4, "a={a} Q={q}: {mi:?}");
        }
    }

    #[test]
    fn independent_symbol_carries_no_information() {
        let (plan, model) = single_symbol_plan(2.0, 2, Monomial::scalar(Ratio::from_integer(0)));
        let mi = mutual_info(&plan, &model, 0, &[V], &[], &MiOptions::default()).unwrap();
        assert!(mi.value.abs() < 1e-4);
    }

    #[test]
    fn conditioning_shift_leaves_entropy_unchanged() {
        let (plan, model) = wt1(1.3, 3);
        let h = |n: i64| {
            let mix = output_mixture(&plan, &model, 0, &BTreeMap::from([(U, n)]), 1000).unwrap();
            diff_entropy(&mix, EntropyMethod::Quadrature, 1e-7).unwrap().value
        };
        assert_relative_eq!(h(-3), h(0), epsilon = 1e-6);
        assert_relative_eq!(h(2), h(0), epsilon = 1e-6);
    }

    #[test]
    fn monte_carlo_mutual_information_agrees() {
        let (plan, model) = wt1(1.1, 4);
        let q = mutual_info(&plan, &model, 0, &[V], &[], &MiOptions::default()).unwrap();
        let opts = MiOptions { method: MiMethod::MonteCarlo { samples: 20_000 }, seed: 9, ..Default::default() };
        let mc = mutual_info(&plan, &model, 0, &[V], &[], &opts).unwrap();
        assert!((q.value - mc.value).abs() < 3.0 * mc.std_error + 1e-3, "{q:?} {mc:?}");
    }

    #[test]
    fn leakage_caps() {
        assert_eq!(leakage_cap(Topology::WiretapHelpers { helpers: 3 }), 3.0);
        assert_relative_eq!(leakage_cap(Topology::MacWiretap { users: 3 }), 3.0 * 3f64.log2());
        assert!((leakage_cap(Topology::MacWiretap { users: 3 }) - 4.755).abs() < 1e-3);
        assert_eq!(leakage_cap(Topology::IcCm { helpers: 0 }), 1.0);
    }

    #[test]
    fn rejects_overlapping_sets() {
        let (plan, model) = wt1(1.0, 1);
        assert!(mutual_info(&plan, &model, 0, &[V], &[V], &MiOptions::default()).is_err());
    }
}
