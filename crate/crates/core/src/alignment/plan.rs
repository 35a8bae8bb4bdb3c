use std::fmt;

use serde::{Deserialize, Serialize};

use super::monomial::{GainSymbol, Monomial};
use crate::channel::{ChannelGains, NetworkModel, Topology};
use crate::error::{Error, Result};
use crate::pam::{gamma_for_scheme, schedule_params, scheme_dims, PamConstellation, Schedule, DEFAULT_DELTA};

/// Relative gap below which two evaluated dimension coefficients are treated
/// as a degenerate (numerically aligned) sample.
pub const COINCIDENCE_GAP: f64 = 1e-6;

/// An independent uniform PAM symbol of a scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SymbolId {
    /// Message-bearing symbol `sub` of transmitter `tx`.
    Message { tx: usize, sub: usize },
    /// Cooperative jamming symbol of transmitter `tx`.
    Jamming { tx: usize },
}

impl SymbolId {
    pub fn is_jamming(&self) -> bool {
        matches!(self, SymbolId::Jamming { .. })
    }
}

impl fmt::Display for SymbolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SymbolId::Message { tx, sub } => write!(f, "V{},{}", tx + 1, sub + 1),
            SymbolId::Jamming { tx } => write!(f, "U{}", tx + 1),
        }
    }
}

/// One summand `coeff · symbol` of a channel input.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Term {
    pub coeff: Monomial,
    pub symbol: SymbolId,
}

impl Term {
    fn new(coeff: Monomial, symbol: SymbolId) -> Self {
        Self { coeff, symbol }
    }
}

/// A scheme's channel inputs as symbolic linear combinations of PAM symbols.
#[derive(Debug, Clone, Serialize)]
pub struct SignalingPlan {
    pub scheme: String,
    pub topology: Topology,
    /// Per transmitter; an empty list means the transmitter stays silent.
    pub inputs: Vec<Vec<Term>>,
    /// Symbols carrying each message.
    pub messages: Vec<Vec<SymbolId>>,
    /// Receiver each message is intended for.
    pub intended: Vec<usize>,
    pub constellation: PamConstellation,
    pub schedule: Option<Schedule>,
}

impl SignalingPlan {
    /// A plan with hand-written inputs; checks that symbols are used once.
    pub fn custom(
        topology: Topology,
        inputs: Vec<Vec<Term>>,
        messages: Vec<Vec<SymbolId>>,
        intended: Vec<usize>,
        constellation: PamConstellation,
    ) -> Result<Self> {
        if inputs.len() != topology.transmitters() {
            return Err(Error::InvalidParameter(format!(
                "{} input lists for {} transmitters",
                inputs.len(),
                topology.transmitters()
            )));
        }
        let mut seen: Vec<SymbolId> = inputs.iter().flatten().map(|t| t.symbol).collect();
        let n = seen.len();
        seen.sort();
        seen.dedup();
        if seen.len() != n {
            return Err(Error::InvalidParameter("a symbol is used by more than one term".into()));
        }
        Ok(Self {
            scheme: topology.scheme_id().to_string(),
            topology,
            inputs,
            messages,
            intended,
            constellation,
            schedule: None,
        })
    }

    pub fn term(coeff: Monomial, symbol: SymbolId) -> Term {
        Term::new(coeff, symbol)
    }

    /// Every symbol in the plan, sorted.
    pub fn symbols(&self) -> Vec<SymbolId> {
        let mut s: Vec<SymbolId> = self.inputs.iter().flatten().map(|t| t.symbol).collect();
        s.sort();
        s
    }

    pub fn message_symbols(&self) -> Vec<SymbolId> {
        let mut s: Vec<SymbolId> = self.messages.iter().flatten().copied().collect();
        s.sort();
        s
    }

    /// Receiver that overhears message `m`.
    pub fn eavesdropper_of(&self, m: usize) -> usize {
        1 - self.intended[m]
    }

    pub fn is_silent(&self, tx: usize) -> bool {
        self.inputs[tx].is_empty()
    }

    pub fn with_constellation(mut self, constellation: PamConstellation) -> Self {
        self.constellation = constellation;
        self.schedule = None;
        self
    }

    /// Exact `E[X_t²]` for every transmitter under the uniform PAM law.
    pub fn transmit_powers(&self, gains: &ChannelGains) -> Vec<f64> {
        let moment = self.constellation.second_moment();
        self.inputs
            .iter()
            .map(|terms| terms.iter().map(|t| t.coeff.eval(gains).powi(2)).sum::<f64>() * moment)
            .collect()
    }

    /// `[Σ_terms coeff²]^{-1/2}` minimized over active transmitters: the
    /// normalizer recomputed from the plan itself.
    pub fn normalizer_from_coefficients(&self, gains: &ChannelGains) -> f64 {
        self.inputs
            .iter()
            .filter(|t| !t.is_empty())
            .map(|terms| 1.0 / terms.iter().map(|t| t.coeff.eval(gains).powi(2)).sum::<f64>().sqrt())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Builds the scheme for `model` with the default δ.
pub fn build_plan(model: &NetworkModel) -> Result<SignalingPlan> {
    build_plan_with_delta(model, DEFAULT_DELTA)
}

/// Builds the scheme's inputs and attaches the constellation from the power
/// schedule at `model.power`.
pub fn build_plan_with_delta(model: &NetworkModel, delta: f64) -> Result<SignalingPlan> {
    let topology = model.topology;
    let inputs = scheme_inputs(topology)?;
    let (messages, intended) = message_map(topology);
    let gamma = gamma_for_scheme(model)?;
    let schedule = schedule_params(model.power, delta, scheme_dims(topology)?, gamma)?;
    Ok(SignalingPlan {
        scheme: topology.scheme_id().to_string(),
        topology,
        inputs,
        messages,
        intended,
        constellation: schedule.constellation,
        schedule: Some(schedule),
    })
}

fn msg(tx: usize, sub: usize) -> SymbolId {
    SymbolId::Message { tx, sub }
}

fn jam(tx: usize) -> SymbolId {
    SymbolId::Jamming { tx }
}

fn scheme_inputs(topology: Topology) -> Result<Vec<Vec<Term>>> {
    use GainSymbol::{Cross, G, H};
    topology.validate()?;
    let p = Monomial::from_powers;
    let mut inputs: Vec<Vec<Term>> = vec![Vec::new(); topology.transmitters()];
    match topology {
        Topology::WiretapHelpers { helpers: 0 } => {
            return Err(Error::UnsupportedScheme(
                "wiretap channel without helpers uses Gaussian signaling, not an alignment plan".into(),
            ))
        }
        Topology::WiretapHelpers { helpers: 1 } => {
            // equivalent channel: X̄1 = g1 X1 = V, X̄2 = g2 X2 = U
            inputs[0].push(Term::new(p(&[(G(0), -1)]), msg(0, 1)));
            inputs[1].push(Term::new(p(&[(G(1), -1)]), jam(1)));
        }
        Topology::WiretapHelpers { helpers } => {
            for k in 1..=helpers {
                inputs[0].push(Term::new(p(&[(G(k), 1), (G(0), -1), (H(k), -1)]), msg(0, k)));
                inputs[k].push(Term::new(p(&[(H(k), -1)]), jam(k)));
            }
        }
        Topology::BcCmHelpers { .. } => {
            // X̄1 = V1 + (β/α) V2 with α = h1/g1, β = h2/g2; X̄2 = U; other helpers silent
            inputs[0].push(Term::new(p(&[(G(0), -1)]), msg(0, 0)));
            inputs[0].push(Term::new(p(&[(H(1), 1), (G(1), -1), (H(0), -1)]), msg(0, 1)));
            inputs[1].push(Term::new(p(&[(G(1), -1)]), jam(1)));
        }
        Topology::IcCm { helpers: 0 } => {
            let h = |tx, rx| Cross { tx, rx };
            inputs[0].push(Term::new(Monomial::one(), msg(0, 0)));
            inputs[0].push(Term::new(p(&[(h(1, 0), 1), (h(0, 0), -1)]), jam(0)));
            inputs[1].push(Term::new(Monomial::one(), msg(1, 0)));
            inputs[1].push(Term::new(p(&[(h(0, 1), 1), (h(1, 1), -1)]), jam(1)));
        }
        Topology::IcCm { .. } => {
            let h = |tx, rx| Cross { tx, rx };
            inputs[0].push(Term::new(p(&[(h(2, 1), 1), (h(0, 1), -1)]), msg(0, 0)));
            inputs[1].push(Term::new(p(&[(h(2, 0), 1), (h(1, 0), -1)]), msg(1, 0)));
            inputs[2].push(Term::new(Monomial::one(), jam(2)));
        }
        Topology::MacWiretap { users } => {
            for (i, input) in inputs.iter_mut().enumerate().take(users) {
                for j in (0..users).filter(|&j| j != i) {
                    input.push(Term::new(p(&[(G(j), 1), (G(i), -1), (H(j), -1)]), msg(i, j)));
                }
                input.push(Term::new(p(&[(H(i), -1)]), jam(i)));
            }
        }
    }
    Ok(inputs)
}

fn message_map(topology: Topology) -> (Vec<Vec<SymbolId>>, Vec<usize>) {
    match topology {
        Topology::WiretapHelpers { helpers: 1 } => (vec![vec![msg(0, 1)]], vec![0]),
        Topology::WiretapHelpers { helpers } => (vec![(1..=helpers).map(|k| msg(0, k)).collect()], vec![0]),
        Topology::BcCmHelpers { .. } => (vec![vec![msg(0, 0)], vec![msg(0, 1)]], vec![0, 1]),
        Topology::IcCm { .. } => (vec![vec![msg(0, 0)], vec![msg(1, 0)]], vec![0, 1]),
        Topology::MacWiretap { users } => (
            (0..users)
                .map(|i| (0..users).filter(|&j| j != i).map(|j| msg(i, j)).collect())
                .collect(),
            vec![0; users],
        ),
    }
}

/// A set of symbols that reach a receiver with one common coefficient.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dimension {
    pub coeff: Monomial,
    pub symbols: Vec<SymbolId>,
}

/// The receiver's view of a plan: one entry per distinct coefficient.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReceiverSpace {
    pub receiver: usize,
    pub dims: Vec<Dimension>,
}

impl ReceiverSpace {
    pub fn dim_of(&self, s: SymbolId) -> Option<usize> {
        self.dims.iter().position(|d| d.symbols.contains(&s))
    }

    pub fn evaluated(&self, gains: &ChannelGains) -> Vec<f64> {
        self.dims.iter().map(|d| d.coeff.eval(gains)).collect()
    }

    /// True when two distinct dimensions evaluate to coefficients within
    /// [`COINCIDENCE_GAP`] of each other (relative).
    pub fn near_coincident(&self, gains: &ChannelGains) -> bool {
        let c = self.evaluated(gains);
        c.iter().enumerate().any(|(i, a)| {
            c[i + 1..].iter().any(|b| (a - b).abs() < COINCIDENCE_GAP * a.abs().max(b.abs()))
        })
    }
}

/// Groups the plan's symbols at receiver `rx` by exact coefficient equality.
pub fn receiver_space(plan: &SignalingPlan, rx: usize) -> ReceiverSpace {
    let mut dims: Vec<Dimension> = Vec::new();
    for (tx, terms) in plan.inputs.iter().enumerate() {
        let link = Monomial::symbol(GainSymbol::link(plan.topology, tx, rx));
        for t in terms {
            let coeff = &t.coeff * &link;
            match dims.iter_mut().find(|d| d.coeff == coeff) {
                Some(d) => d.symbols.push(t.symbol),
                None => dims.push(Dimension { coeff, symbols: vec![t.symbol] }),
            }
        }
    }
    for d in &mut dims {
        d.symbols.sort();
    }
    ReceiverSpace { receiver: rx, dims }
}

/// Dimension count and the symbol groups, in dimension order.
pub fn dimension_census(space: &ReceiverSpace) -> (usize, Vec<Vec<SymbolId>>) {
    (space.dims.len(), space.dims.iter().map(|d| d.symbols.clone()).collect())
}

/// Dimension count each scheme is designed to produce at receiver `rx`.
pub fn expected_dims(topology: Topology, rx: usize) -> Option<usize> {
    Some(match (topology, rx) {
        (Topology::WiretapHelpers { helpers: 0 }, _) => return None,
        (Topology::WiretapHelpers { helpers }, 0) => helpers + 1,
        (Topology::WiretapHelpers { helpers }, _) => helpers,
        (Topology::BcCmHelpers { .. }, _) => 2,
        (Topology::IcCm { helpers: 0 }, _) => 3,
        (Topology::IcCm { .. }, _) => 2,
        (Topology::MacWiretap { users }, 0) => users * (users - 1) + 1,
        (Topology::MacWiretap { users }, _) => users,
    })
}

/// Checks the design invariants of a plan; returns one string per violation.
///
/// * each symbol sits in exactly one dimension per receiver and dimensions
///   have distinct coefficients;
/// * at every eavesdropping receiver each message symbol shares its
///   dimension with a jamming symbol;
/// * at every intended receiver each of its message symbols is alone in its
///   dimension;
/// * dimension counts equal [`expected_dims`].
pub fn alignment_violations(plan: &SignalingPlan) -> Vec<String> {
    let mut out = Vec::new();
    let symbols = plan.symbols();
    for rx in 0..2 {
        let space = receiver_space(plan, rx);
        for s in &symbols {
            let hits = space.dims.iter().filter(|d| d.symbols.contains(s)).count();
            if hits != 1 {
                out.push(format!("rx{rx}: {s} appears in {hits} dimensions"));
            }
        }
        for (i, a) in space.dims.iter().enumerate() {
            if space.dims[i + 1..].iter().any(|b| b.coeff == a.coeff) {
                out.push(format!("rx{rx}: duplicate coefficient {}", a.coeff));
            }
        }
        if let Some(n) = expected_dims(plan.topology, rx) {
            if space.dims.len() != n {
                out.push(format!("rx{rx}: {} dimensions, expected {n}", space.dims.len()));
            }
        }
        for (m, syms) in plan.messages.iter().enumerate() {
            for s in syms {
                let Some(d) = space.dim_of(*s) else { continue };
                let group = &space.dims[d].symbols;
                if plan.intended[m] == rx {
                    if group.len() != 1 {
                        out.push(format!("rx{rx}: message symbol {s} is not separable"));
                    }
                } else if !group.iter().any(|x| x.is_jamming()) {
                    out.push(format!("rx{rx}: message symbol {s} is not covered by jamming"));
                }
            }
        }
    }
    out
}
