//! Network topologies, channel gains and AWGN transmission.
//!
//! Every topology has two receivers. Receiver 0 is the legitimate receiver
//! (wiretap, broadcast and MAC models) or receiver 1 of the interference
//! channel; receiver 1 is the eavesdropper or receiver 2. Gains are stored as
//! a `2 × T` matrix indexed `[receiver][transmitter]`, so the wiretap-style
//! `h_i` is `gain(0, i)`, `g_i` is `gain(1, i)`, and the interference-channel
//! `h_{i,j}` (transmitter `i` to receiver `j`) is `gain(j, i)`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{substream, GAIN_STREAM, NOISE_STREAM};

/// Receiver noise variance; fixed for every receiver.
pub const NOISE_VARIANCE: f64 = 1.0;

/// One of the four network families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Topology {
    /// Wiretap channel with `helpers` independent helpers.
    WiretapHelpers { helpers: usize },
    /// Broadcast channel with confidential messages and `helpers` helpers.
    BcCmHelpers { helpers: usize },
    /// Two-user interference channel with confidential messages and `helpers` helpers.
    IcCm { helpers: usize },
    /// `users`-user multiple access wiretap channel.
    MacWiretap { users: usize },
}

impl Topology {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Topology::BcCmHelpers { helpers: 0 } => Err(Error::InvalidTopology(
                "broadcast channel with confidential messages needs at least one helper".into(),
            )),
            Topology::MacWiretap { users } if users < 2 => Err(Error::InvalidTopology(format!(
                "multiple access wiretap channel needs at least 2 users, got {users}"
            ))),
            _ => Ok(()),
        }
    }

    /// Number of transmitters (message transmitters plus helpers).
    pub fn transmitters(&self) -> usize {
        match *self {
            Topology::WiretapHelpers { helpers } | Topology::BcCmHelpers { helpers } => helpers + 1,
            Topology::IcCm { helpers } => helpers + 2,
            Topology::MacWiretap { users } => users,
        }
    }

    /// Number of independent messages.
    pub fn messages(&self) -> usize {
        match *self {
            Topology::WiretapHelpers { .. } => 1,
            Topology::BcCmHelpers { .. } | Topology::IcCm { .. } => 2,
            Topology::MacWiretap { users } => users,
        }
    }

    /// Short scheme identifier used by the CLI and in artifacts.
    pub fn scheme_id(&self) -> &'static str {
        match self {
            Topology::WiretapHelpers { .. } => "wt-helpers",
            Topology::BcCmHelpers { .. } => "bc-cm",
            Topology::IcCm { .. } => "ic-cm",
            Topology::MacWiretap { .. } => "mac",
        }
    }

    /// The size parameter: `M` for helper topologies, `K` for the MAC.
    pub fn parameter(&self) -> usize {
        match *self {
            Topology::WiretapHelpers { helpers }
            | Topology::BcCmHelpers { helpers }
            | Topology::IcCm { helpers } => helpers,
            Topology::MacWiretap { users } => users,
        }
    }

    pub fn is_interference(&self) -> bool {
        matches!(self, Topology::IcCm { .. })
    }
}

impl std::fmt::Display for Topology {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            Topology::MacWiretap { users } => write!(f, "{} K={users}", self.scheme_id()),
            _ => write!(f, "{} M={}", self.scheme_id(), self.parameter()),
        }
    }
}

/// Real channel gains, `[receiver][transmitter]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelGains {
    rows: [Vec<f64>; 2],
}

impl ChannelGains {
    pub fn new(to_rx0: Vec<f64>, to_rx1: Vec<f64>) -> Result<Self> {
        if to_rx0.len() != to_rx1.len() {
            return Err(Error::InvalidGains(format!(
                "row lengths differ: {} vs {}",
                to_rx0.len(),
                to_rx1.len()
            )));
        }
        if let Some(bad) = to_rx0.iter().chain(&to_rx1).find(|g| **g == 0.0 || !g.is_finite()) {
            return Err(Error::InvalidGains(format!("gain {bad} is zero or non-finite")));
        }
        Ok(Self { rows: [to_rx0, to_rx1] })
    }

    /// Gain from transmitter `tx` to receiver `rx`.
    pub fn gain(&self, rx: usize, tx: usize) -> f64 {
        self.rows[rx][tx]
    }

    pub fn row(&self, rx: usize) -> &[f64] {
        &self.rows[rx]
    }

    pub fn transmitters(&self) -> usize {
        self.rows[0].len()
    }

    /// Legitimate-side gain `h_i` (wiretap, broadcast and MAC naming).
    pub fn h(&self, tx: usize) -> f64 {
        self.rows[0][tx]
    }

    /// Eavesdropper-side gain `g_i`.
    pub fn g(&self, tx: usize) -> f64 {
        self.rows[1][tx]
    }
}

/// A complete parameterization of one experiment's channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkModel {
    pub topology: Topology,
    pub gains: ChannelGains,
    /// Per-transmitter average power budget `P`.
    pub power: f64,
}

impl NetworkModel {
    pub fn new(topology: Topology, gains: ChannelGains, power: f64) -> Result<Self> {
        topology.validate()?;
        if gains.transmitters() != topology.transmitters() {
            return Err(Error::InvalidGains(format!(
                "{topology} has {} transmitters but {} gains per receiver were given",
                topology.transmitters(),
                gains.transmitters()
            )));
        }
        if !(power > 0.0 && power.is_finite()) {
            return Err(Error::InvalidParameter(format!("power must be positive, got {power}")));
        }
        Ok(Self { topology, gains, power })
    }

    pub fn with_power(&self, power: f64) -> Result<Self> {
        Self::new(self.topology, self.gains.clone(), power)
    }
}

/// Support of the gain law: a finite union of closed intervals, none touching 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainRange {
    pub intervals: Vec<(f64, f64)>,
}

impl Default for GainRange {
    /// Magnitude uniform on `[0.5, 2]` with a random sign.
    fn default() -> Self {
        Self { intervals: vec![(-2.0, -0.5), (0.5, 2.0)] }
    }
}

impl GainRange {
    pub fn validate(&self) -> Result<()> {
        if self.intervals.is_empty() {
            return Err(Error::InvalidGainRange("no intervals".into()));
        }
        for &(lo, hi) in &self.intervals {
            if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
                return Err(Error::InvalidGainRange(format!("empty or unbounded interval [{lo}, {hi}]")));
            }
            if lo <= 0.0 && hi >= 0.0 {
                return Err(Error::InvalidGainRange(format!("interval [{lo}, {hi}] contains 0")));
            }
        }
        Ok(())
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(lo, hi)| x >= lo && x <= hi)
    }

    /// Uniform draw over the union (interval chosen proportionally to length).
    pub fn sample(&self, rng: &mut impl Rng) -> f64 {
        let total: f64 = self.intervals.iter().map(|(lo, hi)| hi - lo).sum();
        let mut u = rng.random::<f64>() * total;
        for &(lo, hi) in &self.intervals {
            let len = hi - lo;
            if u < len {
                return lo + u;
            }
            u -= len;
        }
        // rounding can leave u just past the end
        let (_, hi) = *self.intervals.last().unwrap();
        hi
    }

    pub fn describe(&self) -> String {
        let parts: Vec<String> = self.intervals.iter().map(|(lo, hi)| format!("[{lo}, {hi}]")).collect();
        format!("uniform on {}", parts.join(" U "))
    }
}

/// Draw independent gains for every (receiver, transmitter) pair.
///
/// The receiver-0 row is drawn first, then receiver 1, all from
/// `substream(seed, GAIN_STREAM)`.
pub fn sample_gains(topology: Topology, seed: u64, range: &GainRange) -> Result<ChannelGains> {
    topology.validate()?;
    range.validate()?;
    let mut rng = substream(seed, GAIN_STREAM);
    let t = topology.transmitters();
    let row0: Vec<f64> = (0..t).map(|_| range.sample(&mut rng)).collect();
    let row1: Vec<f64> = (0..t).map(|_| range.sample(&mut rng)).collect();
    ChannelGains::new(row0, row1)
}

/// Source of receiver noise samples.
pub trait NoiseSource {
    fn next_noise(&mut self) -> f64;
}

/// Standard normal noise from a seeded stream.
pub struct GaussianNoise(pub ChaCha8Rng);

impl GaussianNoise {
    pub fn from_seed(seed: u64) -> Self {
        Self(substream(seed, NOISE_STREAM))
    }
}

impl NoiseSource for GaussianNoise {
    fn next_noise(&mut self) -> f64 {
        self.0.sample(StandardNormal)
    }
}

/// Test hook: deterministic zero noise.
pub struct ZeroNoise;

impl NoiseSource for ZeroNoise {
    fn next_noise(&mut self) -> f64 {
        0.0
    }
}

/// One channel use: `y_r = Σ_t gain(r, t)·x_t + n_r`, with `n_1` drawn before `n_2`.
pub fn transmit_with(model: &NetworkModel, inputs: &[f64], noise: &mut impl NoiseSource) -> Result<(f64, f64)> {
    let t = model.topology.transmitters();
    if inputs.len() != t {
        return Err(Error::InputLength { expected: t, got: inputs.len() });
    }
    let project = |rx: usize| -> f64 {
        model.gains.row(rx).iter().zip(inputs).map(|(g, x)| g * x).sum()
    };
    let n1 = noise.next_noise();
    let n2 = noise.next_noise();
    Ok((project(0) + n1, project(1) + n2))
}

/// One channel use with Gaussian noise from `seed`.
pub fn transmit(model: &NetworkModel, inputs: &[f64], seed: u64) -> Result<(f64, f64)> {
    transmit_with(model, inputs, &mut GaussianNoise::from_seed(seed))
}
