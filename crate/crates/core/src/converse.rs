//! Single-letter numeric checks of the converse inequalities.
//!
//! Each transmitter `i` gets an independent discrete input `X_i` and an
//! auxiliary Gaussian `Ñ_i ~ N(0, σ̃_i²)`; `X̃_i = X_i + Ñ_i`. With
//! `Y_r = Σ_i gain(r, i)·X_i + N_r`, the checks are
//!
//! * secrecy penalty: `h(Y1 | Y2) ≤ Σ h(X̃_i) − Σ h(Ñ_i) − h(Y2) + c`, and the
//!   same with one `h(X̃_j)` traded for `−log2|g_j|`;
//! * helper entropy: `h(X̃_j) ≤ h(Y1) − I(X_1; Y1) − log2|h_j|`;
//! * two-user interference sum rate:
//!   `2(I(X1;Y1) + I(X2;Y2)) ≤ h(Y1) + h(Y2) + c'`,
//!
//! where `c = h(−Σ h_i Ñ_i + N1) + h(−Σ g_i Ñ_i + N2)` is the entropy of the
//! reconstruction noise and `c'` collects the constants of the sum-rate chain.
//! Every quantity is in bits.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{GainRange, NetworkModel, Topology};
use crate::error::{Error, Result};
use crate::info::{diff_entropy, gaussian_entropy, mean_and_se, EntropyMethod, MixtureDensity, DEFAULT_TOLERANCE};
use crate::rng::substream;

/// First substream handed to randomly generated converse cases.
pub const CONVERSE_STREAM_BASE: u64 = 1 << 32;

/// Variances of the auxiliary noises, one per transmitter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSpec {
    pub variances: Vec<f64>,
}

impl PerturbationSpec {
    /// `σ̃_i² = ½·min(1/h_i², 1/g_i²)`.
    pub fn default_for(model: &NetworkModel) -> Self {
        let g = &model.gains;
        Self {
            variances: (0..g.transmitters())
                .map(|i| 0.5 * (1.0 / g.gain(0, i).powi(2)).min(1.0 / g.gain(1, i).powi(2)))
                .collect(),
        }
    }

    /// Requires `0 ≤ σ̃_i² < min(1/h_i², 1/g_i²)`.
    pub fn validate(&self, model: &NetworkModel) -> Result<()> {
        let g = &model.gains;
        if self.variances.len() != g.transmitters() {
            return Err(Error::InvalidPerturbation(format!(
                "{} variances for {} transmitters",
                self.variances.len(),
                g.transmitters()
            )));
        }
        for (i, v) in self.variances.iter().enumerate() {
            let bound = (1.0 / g.gain(0, i).powi(2)).min(1.0 / g.gain(1, i).powi(2));
            if !(*v >= 0.0 && *v < bound) {
                return Err(Error::InvalidPerturbation(format!(
                    "variance {v} of transmitter {} must lie in [0, {bound})",
                    i + 1
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConverseConstant {
    pub value: f64,
    pub formula: &'static str,
}

/// `½log2(2πe(1 + Σ h_i²σ̃_i²)) + ½log2(2πe(1 + Σ g_i²σ̃_i²))`.
pub fn reconstruction_constant(model: &NetworkModel, spec: &PerturbationSpec) -> Result<ConverseConstant> {
    spec.validate(model)?;
    let var = |rx: usize| -> f64 {
        1.0 + model.gains.row(rx).iter().zip(&spec.variances).map(|(c, v)| c * c * v).sum::<f64>()
    };
    Ok(ConverseConstant {
        value: gaussian_entropy(var(0)) + gaussian_entropy(var(1)),
        formula: "reconstruction-noise-entropy",
    })
}

/// A finitely supported input law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteLaw {
    pub points: Vec<f64>,
    pub probs: Vec<f64>,
}

impl DiscreteLaw {
    pub fn new(points: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if points.is_empty() || points.len() != probs.len() {
            return Err(Error::InvalidParameter("law needs matching, nonempty points and probabilities".into()));
        }
        if probs.iter().any(|p| p.is_nan() || *p < 0.0) || (probs.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter("probabilities must be nonnegative and sum to 1".into()));
        }
        Ok(Self { points, probs })
    }

    pub fn constant(x: f64) -> Self {
        Self { points: vec![x], probs: vec![1.0] }
    }

    /// Uniform on `a·{-Q, …, Q}`.
    pub fn uniform_pam(spacing: f64, half_range: u32) -> Self {
        let q = half_range as i64;
        let n = (2 * q + 1) as f64;
        Self {
            points: (-q..=q).map(|k| spacing * k as f64).collect(),
            probs: vec![1.0 / n; (2 * q + 1) as usize],
        }
    }

    /// Random law on a PAM grid: `Q ∈ {1, …, 4}`, spacing in `[0.3, 3]`,
    /// weights drawn uniformly on `[0.05, 1]` and normalized.
    pub fn random(rng: &mut impl Rng) -> Self {
        let q = rng.random_range(1..=4u32);
        let spacing = rng.random_range(0.3..3.0);
        let mut law = Self::uniform_pam(spacing, q);
        let w: Vec<f64> = law.probs.iter().map(|_| rng.random_range(0.05..1.0)).collect();
        let total: f64 = w.iter().sum();
        law.probs = w.into_iter().map(|x| x / total).collect();
        law
    }
}

/// Check outcome. `Fail` only when the violation exceeds three standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Inconclusive,
    Fail,
}

impl Verdict {
    pub fn from_margin(margin: f64, std_error: f64) -> Self {
        if margin >= 0.0 {
            Verdict::Pass
        } else if margin >= -3.0 * std_error {
            Verdict::Inconclusive
        } else {
            Verdict::Fail
        }
    }
}

/// `margin = rhs − lhs`; the inequality claims `lhs ≤ rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub id: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub std_error: f64,
    pub verdict: Verdict,
    pub details: BTreeMap<String, f64>,
}

impl CheckReport {
    fn new(id: impl Into<String>, lhs: f64, rhs: f64, std_error: f64, details: BTreeMap<String, f64>) -> Self {
        let margin = rhs - lhs;
        Self { id: id.into(), lhs, rhs, margin, std_error, verdict: Verdict::from_margin(margin, std_error), details }
    }
}

/// Settings shared by the checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckOptions {
    pub mc_samples: usize,
    pub seed: u64,
    pub stream: u64,
    pub tol: f64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self { mc_samples: 20_000, seed: 0, stream: 0, tol: DEFAULT_TOLERANCE }
    }
}

/// Joint law of the noiseless outputs: one component per input tuple.
struct JointComponents {
    means: [Vec<f64>; 2],
    weights: Vec<f64>,
}

fn joint_components(model: &NetworkModel, laws: &[DiscreteLaw], include: &[bool]) -> JointComponents {
    let mut means = [vec![0.0], vec![0.0]];
    let mut weights = vec![1.0];
    for (i, law) in laws.iter().enumerate() {
        if !include[i] {
            continue;
        }
        let (h, g) = (model.gains.gain(0, i), model.gains.gain(1, i));
        let n = weights.len() * law.points.len();
        let mut m0 = Vec::with_capacity(n);
        let mut m1 = Vec::with_capacity(n);
        let mut w = Vec::with_capacity(n);
        for k in 0..weights.len() {
            for (x, p) in law.points.iter().zip(&law.probs) {
                m0.push(means[0][k] + h * x);
                m1.push(means[1][k] + g * x);
                w.push(weights[k] * p);
            }
        }
        means = [m0, m1];
        weights = w;
    }
    JointComponents { means, weights }
}

fn output_law(model: &NetworkModel, laws: &[DiscreteLaw], rx: usize, include: &[bool]) -> Result<MixtureDensity> {
    let j = joint_components(model, laws, include);
    let [m0, m1] = j.means;
    MixtureDensity::new(if rx == 0 { m0 } else { m1 }, j.weights)
}

fn quad_entropy(mix: &MixtureDensity, tol: f64) -> Result<f64> {
    Ok(diff_entropy(mix, EntropyMethod::Quadrature, tol)?.value)
}

/// `h(X + Ñ)` with `Ñ ~ N(0, σ²)`, via `h(X/σ + Z) + log2 σ`.
pub fn smoothed_entropy(law: &DiscreteLaw, variance: f64, tol: f64) -> Result<f64> {
    if variance == 0.0 {
        return Err(Error::InvalidPerturbation("zero variance makes h(X + Ñ) infinite".into()));
    }
    let sigma = variance.sqrt();
    let mix = MixtureDensity::new(law.points.iter().map(|x| x / sigma).collect(), law.probs.clone())?;
    Ok(quad_entropy(&mix, tol)? + sigma.log2())
}

/// Monte Carlo `h(Y1, Y2)` with the exact bivariate mixture density.
fn joint_output_entropy(model: &NetworkModel, laws: &[DiscreteLaw], opts: &CheckOptions) -> (f64, f64) {
    let include = vec![true; laws.len()];
    let j = joint_components(model, laws, &include);
    let cdf: Vec<f64> = j
        .weights
        .iter()
        .scan(0.0, |acc, w| {
            *acc += w;
            Some(*acc)
        })
        .collect();
    let total = cdf[cdf.len() - 1];
    let norm = 1.0 / (2.0 * std::f64::consts::PI);
    let mut rng = substream(opts.seed, opts.stream);
    let vals: Vec<f64> = (0..opts.mc_samples.max(2))
        .map(|_| {
            let u = rng.random::<f64>() * total;
            let k = cdf.partition_point(|c| *c <= u).min(cdf.len() - 1);
            let y0 = j.means[0][k] + rng.sample::<f64, _>(rand_distr::StandardNormal);
            let y1 = j.means[1][k] + rng.sample::<f64, _>(rand_distr::StandardNormal);
            let f: f64 = (0..j.weights.len())
                .map(|c| {
                    let d0 = y0 - j.means[0][c];
                    let d1 = y1 - j.means[1][c];
                    j.weights[c] * norm * (-0.5 * (d0 * d0 + d1 * d1)).exp()
                })
                .sum();
            -f.log2()
        })
        .collect();
    mean_and_se(&vals)
}

fn check_inputs(model: &NetworkModel, laws: &[DiscreteLaw], spec: &PerturbationSpec) -> Result<()> {
    if laws.len() != model.gains.transmitters() {
        return Err(Error::InputLength { expected: model.gains.transmitters(), got: laws.len() });
    }
    spec.validate(model)
}

/// The secrecy-penalty inequality and its corollary for every dropped index.
///
/// The first report is the main inequality; report `j + 1` drops input `j`.
/// `h(Y1 | Y2) = h(Y1, Y2) − h(Y2)` with the joint term by Monte Carlo.
pub fn lemma1_check(
    model: &NetworkModel,
    laws: &[DiscreteLaw],
    spec: &PerturbationSpec,
    opts: &CheckOptions,
) -> Result<Vec<CheckReport>> {
    check_inputs(model, laws, spec)?;
    let t = laws.len();
    let c = reconstruction_constant(model, spec)?.value;
    let h_y2 = quad_entropy(&output_law(model, laws, 1, &vec![true; t])?, opts.tol)?;
    let (h_joint, se) = joint_output_entropy(model, laws, opts);
    let lhs = h_joint - h_y2;
    let h_tilde: Vec<f64> = laws
        .iter()
        .zip(&spec.variances)
        .map(|(law, v)| smoothed_entropy(law, *v, opts.tol))
        .collect::<Result<_>>()?;
    let h_aux: f64 = spec.variances.iter().map(|v| gaussian_entropy(*v)).sum();
    let sum_tilde: f64 = h_tilde.iter().sum();
    let std_error = (se * se + (t as f64 + 2.0) * opts.tol * opts.tol).sqrt();

    let mut details = BTreeMap::from([
        ("h_y1_y2".to_string(), h_joint),
        ("h_y2".to_string(), h_y2),
        ("sum_h_x_tilde".to_string(), sum_tilde),
        ("sum_h_aux_noise".to_string(), h_aux),
        ("reconstruction_constant".to_string(), c),
    ]);
    // the weaker form without the auxiliary-noise entropies
    details.insert("margin_without_aux_entropy".to_string(), sum_tilde - h_y2 + c - lhs);
    let mut out = vec![CheckReport::new("secrecy-penalty", lhs, sum_tilde - h_aux - h_y2 + c, std_error, details)];
    for (j, &h_j) in h_tilde.iter().enumerate().take(t) {
        let rhs = sum_tilde - h_j - h_aux - model.gains.gain(1, j).abs().log2() + c;
        let details = BTreeMap::from([
            ("dropped".to_string(), j as f64),
            ("h_x_tilde_dropped".to_string(), h_j),
            ("eavesdropper_gain".to_string(), model.gains.gain(1, j)),
        ]);
        out.push(CheckReport::new(format!("secrecy-penalty-drop-{}", j + 1), lhs, rhs, std_error, details));
    }
    Ok(out)
}

/// `h(X̃_j) ≤ h(Y1) − I(X_1; Y1) − log2|h_j|` for helper `j ≥ 1` (zero-based).
///
/// `h(Y1) − I(X_1; Y1) = h(Σ_{i≠1} h_i X_i + N1)`, a one-dimensional mixture.
pub fn lemma2_check(
    model: &NetworkModel,
    laws: &[DiscreteLaw],
    spec: &PerturbationSpec,
    helper: usize,
    opts: &CheckOptions,
) -> Result<CheckReport> {
    check_inputs(model, laws, spec)?;
    let t = laws.len();
    if helper == 0 || helper >= t {
        return Err(Error::InvalidParameter(format!("helper index {helper} must lie in 1..{t}")));
    }
    let hj = model.gains.gain(0, helper);
    if hj * hj * spec.variances[helper] >= 1.0 {
        return Err(Error::InvalidPerturbation("helper variance must be below 1/h_j²".into()));
    }
    let lhs = smoothed_entropy(&laws[helper], spec.variances[helper], opts.tol)?;
    let mut others = vec![true; t];
    others[0] = false;
    let h_rest = quad_entropy(&output_law(model, laws, 0, &others)?, opts.tol)?;
    let h_y1 = quad_entropy(&output_law(model, laws, 0, &vec![true; t])?, opts.tol)?;
    let rhs = h_rest - hj.abs().log2();
    let details = BTreeMap::from([
        ("h_y1".to_string(), h_y1),
        ("i_x1_y1".to_string(), h_y1 - h_rest),
        ("helper".to_string(), helper as f64),
    ]);
    Ok(CheckReport::new(format!("helper-entropy-{}", helper + 1), lhs, rhs, 2.0 * opts.tol, details))
}

/// `2(I(X1;Y1) + I(X2;Y2)) ≤ h(Y1) + h(Y2) + c'` on a two-transmitter
/// interference channel, with
/// `c' = c − h(Ñ1) − h(Ñ2) − log2(2πe) − log2|h_{2,1} h_{1,2}|`.
///
/// The first report is the combined inequality, followed by the two
/// cross-pair helper-entropy bounds it is assembled from.
pub fn appendix_ic_sumrate_check(
    model: &NetworkModel,
    laws: &[DiscreteLaw],
    spec: &PerturbationSpec,
    opts: &CheckOptions,
) -> Result<Vec<CheckReport>> {
    check_inputs(model, laws, spec)?;
    if laws.len() != 2 {
        return Err(Error::InvalidParameter("the sum-rate check needs exactly two transmitters".into()));
    }
    let g = &model.gains;
    // cross gains: transmitter 2 into receiver 1 and transmitter 1 into receiver 2
    let h21 = g.gain(0, 1);
    let h12 = g.gain(1, 0);
    if h21 * h21 * spec.variances[1] >= 1.0 || h12 * h12 * spec.variances[0] >= 1.0 {
        return Err(Error::InvalidPerturbation("cross-gain variance condition violated".into()));
    }
    let both = [true, true];
    let h_y1 = quad_entropy(&output_law(model, laws, 0, &both)?, opts.tol)?;
    let h_y2 = quad_entropy(&output_law(model, laws, 1, &both)?, opts.tol)?;
    let h_y1_given_x1 = quad_entropy(&output_law(model, laws, 0, &[false, true])?, opts.tol)?;
    let h_y2_given_x2 = quad_entropy(&output_law(model, laws, 1, &[true, false])?, opts.tol)?;
    let i1 = h_y1 - h_y1_given_x1;
    let i2 = h_y2 - h_y2_given_x2;
    let c = reconstruction_constant(model, spec)?.value;
    let h_aux: f64 = spec.variances.iter().map(|v| gaussian_entropy(*v)).sum();
    let c_prime = c - h_aux - 2.0 * gaussian_entropy(1.0) - (h12 * h21).abs().log2();
    let std_error = 4.0 * opts.tol;
    let details = BTreeMap::from([
        ("i_x1_y1".to_string(), i1),
        ("i_x2_y2".to_string(), i2),
        ("h_y1".to_string(), h_y1),
        ("h_y2".to_string(), h_y2),
        ("constant".to_string(), c_prime),
    ]);
    let main = CheckReport::new("ic-sum-rate", 2.0 * (i1 + i2), h_y1 + h_y2 + c_prime, std_error, details);
    let x2 = smoothed_entropy(&laws[1], spec.variances[1], opts.tol)?;
    let x1 = smoothed_entropy(&laws[0], spec.variances[0], opts.tol)?;
    let pair1 = CheckReport::new("ic-cross-pair-1", x2, h_y1_given_x1 - h21.abs().log2(), 2.0 * opts.tol, BTreeMap::new());
    let pair2 = CheckReport::new("ic-cross-pair-2", x1, h_y2_given_x2 - h12.abs().log2(), 2.0 * opts.tol, BTreeMap::new());
    Ok(vec![main, pair1, pair2])
}

/// A random model and input laws for converse case `index`.
pub fn random_case(topology: Topology, seed: u64, index: u64) -> Result<(NetworkModel, Vec<DiscreteLaw>)> {
    topology.validate()?;
    let mut rng = substream(seed, CONVERSE_STREAM_BASE + index);
    let range = GainRange::default();
    let t = topology.transmitters();
    let row0: Vec<f64> = (0..t).map(|_| range.sample(&mut rng)).collect();
    let row1: Vec<f64> = (0..t).map(|_| range.sample(&mut rng)).collect();
    let gains = crate::channel::ChannelGains::new(row0, row1)?;
    let model = NetworkModel::new(topology, gains, 1.0)?;
    let laws = (0..t).map(|_| DiscreteLaw::random(&mut rng)).collect();
    Ok((model, laws))
}
