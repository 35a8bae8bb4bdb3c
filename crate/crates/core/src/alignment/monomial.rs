use std::collections::BTreeMap;
use std::fmt;
use std::ops::Mul;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::channel::{ChannelGains, Topology};

/// A channel gain used as an algebraic indeterminate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GainSymbol {
    /// `h_t`: transmitter `t` to the legitimate receiver.
    H(usize),
    /// `g_t`: transmitter `t` to the eavesdropper.
    G(usize),
    /// `h_{t,r}` of the interference channel.
    Cross { tx: usize, rx: usize },
}

impl GainSymbol {
    /// The gain from `tx` to `rx` in the naming `topology` uses.
    pub fn link(topology: Topology, tx: usize, rx: usize) -> Self {
        match (topology.is_interference(), rx) {
            (true, _) => GainSymbol::Cross { tx, rx },
            (false, 0) => GainSymbol::H(tx),
            (false, _) => GainSymbol::G(tx),
        }
    }

    pub fn eval(&self, gains: &ChannelGains) -> f64 {
        match *self {
            GainSymbol::H(t) => gains.gain(0, t),
            GainSymbol::G(t) => gains.gain(1, t),
            GainSymbol::Cross { tx, rx } => gains.gain(rx, tx),
        }
    }
}

impl fmt::Display for GainSymbol {
    /// One-based, matching the usual `h1, g2, h_{3,1}` notation.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GainSymbol::H(t) => write!(f, "h{}", t + 1),
            GainSymbol::G(t) => write!(f, "g{}", t + 1),
            GainSymbol::Cross { tx, rx } => write!(f, "h{},{}", tx + 1, rx + 1),
        }
    }
}

/// Rational scalar times a Laurent monomial in the gain symbols.
///
/// Zero exponents are never stored and the scalar is a reduced fraction, so
/// structural equality is algebraic equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    coeff: Ratio<i64>,
    exponents: BTreeMap<GainSymbol, i32>,
}

impl Monomial {
    pub fn one() -> Self {
        Self::scalar(Ratio::one())
    }

    pub fn scalar(coeff: Ratio<i64>) -> Self {
        Self { coeff, exponents: BTreeMap::new() }
    }

    pub fn symbol(s: GainSymbol) -> Self {
        Self::one().times(s, 1)
    }

    /// Builds `∏ s^e` from `(symbol, exponent)` pairs; repeated symbols add.
    pub fn from_powers(powers: &[(GainSymbol, i32)]) -> Self {
        powers.iter().fold(Self::one(), |m, &(s, e)| m.times(s, e))
    }

    fn times(mut self, s: GainSymbol, e: i32) -> Self {
        if self.coeff.is_zero() {
            return self;
        }
        let entry = self.exponents.entry(s).or_insert(0);
        *entry += e;
        if *entry == 0 {
            self.exponents.remove(&s);
        }
        self
    }

    pub fn coeff(&self) -> Ratio<i64> {
        self.coeff
    }

    pub fn exponents(&self) -> &BTreeMap<GainSymbol, i32> {
        &self.exponents
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn is_unit(&self) -> bool {
        self.coeff.is_one() && self.exponents.is_empty()
    }

    /// Multiplicative inverse. Panics on the zero monomial.
    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of the zero monomial");
        Self {
            coeff: self.coeff.recip(),
            exponents: self.exponents.iter().map(|(s, e)| (*s, -e)).collect(),
        }
    }

    /// Numeric value at the given gains.
    pub fn eval(&self, gains: &ChannelGains) -> f64 {
        let scalar = *self.coeff.numer() as f64 / *self.coeff.denom() as f64;
        self.exponents.iter().fold(scalar, |acc, (s, e)| acc * s.eval(gains).powi(*e))
    }
}

impl Mul for &Monomial {
    type Output = Monomial;

    fn mul(self, rhs: &Monomial) -> Monomial {
        let coeff = self.coeff * rhs.coeff;
        if coeff.is_zero() {
            return Monomial::scalar(coeff);
        }
        rhs.exponents
            .iter()
            .fold(Monomial { coeff, exponents: self.exponents.clone() }, |m, (s, e)| m.times(*s, *e))
    }
}

impl Mul for Monomial {
    type Output = Monomial;

    fn mul(self, rhs: Monomial) -> Monomial {
        &self * &rhs
    }
}

impl fmt::Display for Monomial {
    /// Renders as `num/(den)`, e.g. `g2/(g1·h2)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let power = |s: &GainSymbol, e: i32| if e == 1 { s.to_string() } else { format!("{s}^{e}") };
        let mut num: Vec<String> = Vec::new();
        let mut den: Vec<String> = Vec::new();
        if !self.coeff.abs().numer().is_one() || self.exponents.values().all(|e| *e < 0) {
            num.push(self.coeff.abs().numer().to_string());
        }
        if !self.coeff.denom().is_one() {
            den.push(self.coeff.denom().to_string());
        }
        let mut ordered: Vec<(String, &GainSymbol, i32)> =
            self.exponents.iter().map(|(s, e)| (s.to_string(), s, *e)).collect();
        ordered.sort();
        for (_, s, e) in ordered {
            if e > 0 {
                num.push(power(s, e));
            } else {
                den.push(power(s, -e));
            }
        }
        if self.coeff.is_negative() {
            write!(f, "-")?;
        }
        write!(f, "{}", num.join("·"))?;
        match den.len() {
            0 => Ok(()),
            1 => write!(f, "/{}", den[0]),
            _ => write!(f, "/({})", den.join("·")),
        }
    }
}

/// JSON form: `{"coeff": "1/2", "exponents": {"g2": 1, "h1": -1}}`.
#[derive(Serialize, Deserialize)]
struct MonomialRepr {
    coeff: String,
    exponents: BTreeMap<String, i32>,
}

impl Serialize for Monomial {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        MonomialRepr {
            coeff: self.coeff.to_string(),
            exponents: self.exponents.iter().map(|(s, e)| (s.to_string(), *e)).collect(),
        }
        .serialize(serializer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_symbol() -> impl Strategy<Value = GainSymbol> {
        prop_oneof![
            (0usize..4).prop_map(GainSymbol::H),
            (0usize..4).prop_map(GainSymbol::G),
            (0usize..4, 0usize..2).prop_map(|(tx, rx)| GainSymbol::Cross { tx, rx }),
        ]
    }

    fn arb_monomial() -> impl Strategy<Value = Monomial> {
        (
            prop::collection::vec((arb_symbol(), -3i32..4), 0..6),
            1i64..6,
            1i64..6,
            any::<bool>(),
        )
            .prop_map(|(powers, n, d, neg)| {
                let c = Ratio::new(if neg { -n } else { n }, d);
                Monomial::scalar(c) * Monomial::from_powers(&powers)
            })
    }

    #[test]
    fn canonical_form_drops_cancelled_symbols() {
        let a = Monomial::from_powers(&[(GainSymbol::G(1), 1), (GainSymbol::G(0), -1), (GainSymbol::H(1), -1)]);
        let b = Monomial::symbol(GainSymbol::H(1));
        let c = Monomial::symbol(GainSymbol::G(1)).inv();
        let prod = &(&a * &b) * &c;
        assert_eq!(prod, Monomial::symbol(GainSymbol::G(0)).inv());
        assert_eq!(a.to_string(), "g2/(g1·h2)");
        assert_eq!(Monomial::symbol(GainSymbol::H(2)).inv().to_string(), "1/h3");
    }

    #[test]
    fn evaluation_matches_arithmetic() {
        let gains = ChannelGains::new(vec![1.5, -0.75], vec![0.5, 2.0]).unwrap();
        let m = Monomial::from_powers(&[(GainSymbol::G(1), 1), (GainSymbol::G(0), -1), (GainSymbol::H(1), -1)]);
        assert_eq!(m.eval(&gains), 2.0 / (0.5 * -0.75));
    }

    #[test]
    fn zero_monomial_absorbs() {
        let z = Monomial::scalar(Ratio::from_integer(0));
        let m = Monomial::symbol(GainSymbol::H(0));
        assert_eq!(&z * &m, z);
        assert!(z.is_zero());
    }

    proptest! {
        #[test]
        fn inverse_gives_unit(m in arb_monomial()) {
            prop_assume!(!m.is_zero());
            prop_assert!((&m * &m.inv()).is_unit());
        }

        #[test]
        fn equality_is_an_equivalence(a in arb_monomial(), b in arb_monomial(), c in arb_monomial()) {
            prop_assert_eq!(&a, &a.clone());
            prop_assert_eq!(a == b, b == a);
            if a == b && b == c {
                prop_assert_eq!(&a, &c);
            }
            // multiplication is commutative and associative on canonical forms
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        }
    }
}
