//! PAM constellations `C(a, Q) = a·{-Q, …, Q}`, the power schedule and the
//! per-scheme power normalizers.

use serde::{Deserialize, Serialize};

use crate::channel::{NetworkModel, Topology};
use crate::error::{Error, Result};

/// Default alignment slack δ.
pub const DEFAULT_DELTA: f64 = 0.05;

/// Uniform PAM alphabet with spacing `a` and half-range `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PamConstellation {
    pub spacing: f64,
    pub half_range: u32,
}

impl PamConstellation {
    pub fn new(spacing: f64, half_range: u32) -> Result<Self> {
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::InvalidParameter(format!("PAM spacing must be positive, got {spacing}")));
        }
        Ok(Self { spacing, half_range })
    }

    pub fn cardinality(&self) -> usize {
        2 * self.half_range as usize + 1
    }

    pub fn points(&self) -> Vec<f64> {
        let q = self.half_range as i64;
        (-q..=q).map(|n| self.spacing * n as f64).collect()
    }

    /// `E[X²] = a²Q(Q+1)/3` under the uniform law.
    pub fn second_moment(&self) -> f64 {
        let q = self.half_range as f64;
        self.spacing * self.spacing * q * (q + 1.0) / 3.0
    }

    pub fn entropy_bits(&self) -> f64 {
        pam_entropy(self.half_range)
    }
}

/// A constellation produced by [`schedule_params`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub constellation: PamConstellation,
    pub delta: f64,
    pub dims: u32,
    pub gamma: f64,
    /// `Q` was raised to 1 because the closed form fell below it.
    pub clamped: bool,
}

pub fn validate_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::DeltaOutOfRange(delta))
    }
}

/// `Q = ⌊P^((1-δ)/(2(m+δ)))⌋` (at least 1) and `a = γ√P / Q`.
///
/// The floor is taken after a relative nudge of 1e-12 so that exact powers
/// such as `10^0.8 · 10^…` landing a rounding error below an integer are not
/// pushed down a whole step.
pub fn schedule_params(power: f64, delta: f64, dims: u32, gamma: f64) -> Result<Schedule> {
    validate_delta(delta)?;
    if dims == 0 {
        return Err(Error::InvalidParameter("dimension count must be at least 1".into()));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!("gamma must be positive, got {gamma}")));
    }
    if !(power > 0.0 && power.is_finite()) {
        return Err(Error::InvalidParameter(format!("power must be positive, got {power}")));
    }
    let exponent = (1.0 - delta) / (2.0 * (dims as f64 + delta));
    let raw = power.powf(exponent) * (1.0 + 1e-12);
    let (q, clamped) = if raw < 1.0 { (1u32, true) } else { (raw.floor() as u32, false) };
    let spacing = gamma * power.sqrt() / q as f64;
    Ok(Schedule {
        constellation: PamConstellation::new(spacing, q)?,
        delta,
        dims,
        gamma,
        clamped,
    })
}

/// Number of receiver dimensions the scheme packs at its decoding receiver;
/// this is the `m` in the schedule exponent.
pub fn scheme_dims(topology: Topology) -> Result<u32> {
    topology.validate()?;
    Ok(match topology {
        Topology::WiretapHelpers { helpers: 0 } => {
            return Err(Error::UnsupportedScheme(
                "wiretap channel without helpers has no alignment scheme".into(),
            ))
        }
        Topology::WiretapHelpers { helpers } => helpers as u32 + 1,
        Topology::BcCmHelpers { .. } => 2,
        Topology::IcCm { helpers: 0 } => 3,
        Topology::IcCm { .. } => 2,
        Topology::MacWiretap { users } => (users * (users - 1) + 1) as u32,
    })
}

/// Largest power normalizer γ each scheme allows.
pub fn gamma_for_scheme(model: &NetworkModel) -> Result<f64> {
    let g = &model.gains;
    let rss = |xs: &[f64]| xs.iter().map(|x| x * x).sum::<f64>().sqrt();
    let gamma = match model.topology {
        Topology::WiretapHelpers { helpers: 0 } => {
            return Err(Error::UnsupportedScheme(
                "wiretap channel without helpers has no alignment scheme".into(),
            ))
        }
        Topology::WiretapHelpers { helpers: 1 } => g.g(0).abs().min(g.g(1).abs()),
        Topology::WiretapHelpers { helpers } => {
            let coeffs: Vec<f64> = (1..=helpers).map(|k| g.g(k) / (g.g(0) * g.h(k))).collect();
            (1..=helpers).map(|k| g.h(k).abs()).fold(1.0 / rss(&coeffs), f64::min)
        }
        Topology::BcCmHelpers { .. } => {
            let alpha = g.h(0) / g.g(0);
            let beta = g.h(1) / g.g(1);
            let ratio = beta / alpha;
            (g.g(0).abs() / (1.0 + ratio * ratio).sqrt()).min(g.g(1).abs())
        }
        Topology::IcCm { helpers: 0 } => {
            // transmitter i jams with coefficient h_{j,i}/h_{i,i}
            let c1 = g.gain(0, 1) / g.gain(0, 0);
            let c2 = g.gain(1, 0) / g.gain(1, 1);
            (1.0 / (1.0 + c1 * c1).sqrt()).min(1.0 / (1.0 + c2 * c2).sqrt())
        }
        Topology::IcCm { .. } => {
            let c1 = g.gain(1, 2) / g.gain(1, 0);
            let c2 = g.gain(0, 2) / g.gain(0, 1);
            (1.0 / c1.abs()).min(1.0 / c2.abs()).min(1.0)
        }
        Topology::MacWiretap { users } => (0..users)
            .map(|i| {
                let mut c: Vec<f64> = (0..users)
                    .filter(|&j| j != i)
                    .map(|j| g.g(j) / (g.g(i) * g.h(j)))
                    .collect();
                c.push(1.0 / g.h(i));
                1.0 / rss(&c)
            })
            .fold(f64::INFINITY, f64::min),
    };
    Ok(gamma)
}

/// `log2(2Q + 1)`.
pub fn pam_entropy(half_range: u32) -> f64 {
    ((2 * half_range as u64 + 1) as f64).log2()
}

/// Exact law of a sum of independent uniform symbols on the integer lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticePmf {
    /// Smallest support point.
    pub offset: i64,
    pub probs: Vec<f64>,
}

impl LatticePmf {
    pub fn support(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.probs.len() as i64).map(move |i| self.offset + i)
    }

    pub fn entropy_bits(&self) -> f64 {
        discrete_entropy(&self.probs)
    }
}

/// Law of the sum of `k` independent uniform symbols on `{-Q, …, Q}`,
/// by iterated integer convolution with exact counts.
pub fn sum_pam_pmf(half_range: u32, k: u32) -> LatticePmf {
    let width = 2 * half_range as usize + 1;
    let mut counts: Vec<u128> = vec![1];
    for _ in 0..k {
        let mut next = vec![0u128; counts.len() + width - 1];
        for (i, &c) in counts.iter().enumerate() {
            for slot in &mut next[i..i + width] {
                *slot += c;
            }
        }
        counts = next;
    }
    let total: u128 = counts.iter().sum();
    LatticePmf {
        offset: -(k as i64) * half_range as i64,
        probs: counts.iter().map(|&c| c as f64 / total as f64).collect(),
    }
}

/// Shannon entropy in bits; zero-probability entries are skipped.
pub fn discrete_entropy(probs: &[f64]) -> f64 {
    probs.iter().filter(|p| **p > 0.0).map(|p| -p * p.log2()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ChannelGains;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn schedule_examples() {
        let s = schedule_params(1e6, 0.05, 2, 1.0).unwrap();
        assert_eq!(s.constellation.half_range, 24);
        assert_relative_eq!(s.constellation.spacing, 1000.0 / 24.0, max_relative = 1e-14);
        assert!(!s.clamped);

        let s = schedule_params(1.0 + 1e-9, 0.3, 5, 1.0).unwrap();
        assert_eq!(s.constellation.half_range, 1);

        // P = 1e4 for the K = 3 MAC (m = 7): 10^0.2695 ≈ 1.86
        let s = schedule_params(1e4, 0.05, 7, 1.0).unwrap();
        assert_eq!(s.constellation.half_range, 1);
    }

    #[test]
    fn schedule_clamps_tiny_power() {
        let s = schedule_params(0.5, 0.05, 2, 1.0).unwrap();
        assert_eq!(s.constellation.half_range, 1);
        assert!(s.clamped);
    }

    #[test]
    fn schedule_rejects_bad_delta() {
        for d in [0.0, 1.0, 1.5, -0.1, f64::NAN] {
            assert!(matches!(schedule_params(100.0, d, 2, 1.0), Err(Error::DeltaOutOfRange(_))));
        }
    }

    #[test]
    fn entropy_examples() {
        assert_relative_eq!(pam_entropy(1), 3f64.log2());
        assert_eq!(pam_entropy(0), 0.0);
        assert_relative_eq!(pam_entropy(24), 49f64.log2());
        assert!((pam_entropy(24) - 5.615).abs() < 1e-3);
    }

    #[test]
    fn pmf_examples() {
        let p = sum_pam_pmf(1, 2);
        assert_eq!(p.offset, -2);
        let expect = [1.0, 2.0, 3.0, 2.0, 1.0].map(|c| c / 9.0);
        for (a, b) in p.probs.iter().zip(expect) {
            assert_relative_eq!(*a, b, max_relative = 1e-15);
        }
        assert!((p.entropy_bits() - 2.197).abs() < 1e-3);

        let u = sum_pam_pmf(5, 1);
        assert_relative_eq!(u.entropy_bits(), pam_entropy(5), max_relative = 1e-12);

        let t = sum_pam_pmf(1, 3);
        assert_eq!(t.probs.len(), 7);
        for i in 0..7 {
            assert_eq!(t.probs[i], t.probs[6 - i]);
        }
        assert!(t.probs.windows(2).take(3).all(|w| w[0] < w[1]));
    }

    #[test]
    fn gamma_examples() {
        let wt = NetworkModel::new(
            Topology::WiretapHelpers { helpers: 1 },
            ChannelGains::new(vec![1.3, -0.7], vec![0.8, 1.5]).unwrap(),
            1e4,
        )
        .unwrap();
        assert_eq!(gamma_for_scheme(&wt).unwrap(), 0.8);

        // h_{3,2}/h_{1,2} = 2 and h_{3,1}/h_{2,1} = 0.5
        let ic = NetworkModel::new(
            Topology::IcCm { helpers: 1 },
            ChannelGains::new(vec![1.1, 1.2, 0.6], vec![0.7, 0.9, 1.4]).unwrap(),
            1e4,
        )
        .unwrap();
        assert_relative_eq!(gamma_for_scheme(&ic).unwrap(), 0.5, max_relative = 1e-15);

        let wt0 = NetworkModel::new(
            Topology::WiretapHelpers { helpers: 0 },
            ChannelGains::new(vec![1.0], vec![0.5]).unwrap(),
            1e4,
        )
        .unwrap();
        assert!(gamma_for_scheme(&wt0).is_err());
    }

    proptest! {
        #[test]
        fn schedule_is_monotone(p1 in 1.0f64..1e9, p2 in 1.0f64..1e9, m in 1u32..8, gamma in 0.1f64..3.0) {
            let (lo, hi) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
            let a = schedule_params(lo, 0.05, m, gamma).unwrap();
            let b = schedule_params(hi, 0.05, m, gamma).unwrap();
            prop_assert!(a.constellation.half_range <= b.constellation.half_range);
            let c = b.constellation;
            prop_assert!((c.spacing * c.half_range as f64 - gamma * hi.sqrt()).abs() <= 1e-12 * gamma * hi.sqrt());
        }

        #[test]
        fn sum_pmf_properties(q in 1u32..12, k in 1u32..5) {
            let p = sum_pam_pmf(q, k);
            let total: f64 = p.probs.iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            prop_assert_eq!(p.probs.len() as u32, 2 * k * q + 1);
            let h = p.entropy_bits();
            let cap = ((2 * k * q + 1) as f64).log2();
            if k >= 2 {
                prop_assert!(h < cap);
                // the leakage mechanism: H(V + U) - H(U) <= 1 bit
                let two = sum_pam_pmf(q, 2);
                prop_assert!(two.entropy_bits() - pam_entropy(q) <= 1.0);
            } else {
                prop_assert!((h - cap).abs() < 1e-12);
            }
        }
    }
}
