use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An eigenphase 2π·k/n stored as the reduced fraction k/n with 0 ≤ k < n.
///
/// Zero is stored as 0/1. Ordering is by numeric value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "(u32, u32)", into = "(u32, u32)")]
pub struct Phase {
    num: u32,
    den: u32,
}

impl Phase {
    pub const ZERO: Phase = Phase { num: 0, den: 1 };
    pub const HALF: Phase = Phase { num: 1, den: 2 };

    /// k/n reduced modulo 1. Panics on n = 0.
    pub fn new(k: i64, n: u32) -> Phase {
        assert!(n > 0, "phase denominator must be positive");
        let k = k.rem_euclid(n as i64) as u32;
        let g = k.gcd(&n);
        Phase {
            num: k / g,
            den: n / g,
        }
    }

    pub fn numerator(self) -> u32 {
        self.num
    }

    pub fn denominator(self) -> u32 {
        self.den
    }

    /// Fraction of a full turn as a float.
    pub fn turns(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn radians(self) -> f64 {
        std::f64::consts::TAU * self.turns()
    }

    /// −φ modulo 1.
    pub fn neg(self) -> Phase {
        Phase::new(-(self.num as i64), self.den)
    }

    /// φ + ψ modulo 1, or None when the common denominator exceeds u32.
    pub fn checked_add(self, other: Phase) -> Option<Phase> {
        let den = (self.den as u64).lcm(&(other.den as u64));
        let den32 = u32::try_from(den).ok()?;
        let k = self.num as i64 * (den / self.den as u64) as i64 + other.num as i64 * (den / other.den as u64) as i64;
        Some(Phase::new(k, den32))
    }

    /// min(φ, 1 − φ), the representative of {φ, −φ} in [0, 1/2].
    pub fn folded(self) -> Phase {
        std::cmp::min(self, self.neg())
    }

    /// True for φ > 1/2.
    pub fn is_upper_half(self) -> bool {
        2 * self.num > self.den
    }

    /// Fixed by negation: 0 or 1/2.
    pub fn is_self_conjugate(self) -> bool {
        self == Phase::ZERO || self == Phase::HALF
    }

    /// Nearest multiple of 1/n to a real turn count, with the rounding error
    /// in turns.
    pub fn nearest(turns: f64, n: u32) -> (Phase, f64) {
        let scaled = turns * n as f64;
        let k = scaled.round();
        (Phase::new(k as i64, n), (scaled - k).abs() / n as f64)
    }
}

/// lcm of the denominators, saturating at u64::MAX on overflow.
pub fn denominator_lcm<'a>(phases: impl IntoIterator<Item = &'a Phase>) -> u64 {
    let mut acc: u64 = 1;
    for p in phases {
        let d = p.den as u64;
        acc = match (acc / acc.gcd(&d)).checked_mul(d) {
            Some(v) => v,
            None => return u64::MAX,
        };
    }
    acc
}

impl Ord for Phase {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as u64 * other.den as u64)
            .cmp(&(other.num as u64 * self.den as u64))
            .then(self.den.cmp(&other.den))
    }
}

impl PartialOrd for Phase {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Phase {
    type Err = Error;

    /// Parses a reduced `k/n` with 0 ≤ k < n.
    fn from_str(s: &str) -> Result<Self> {
        let (k, n) = s
            .trim()
            .split_once('/')
            .ok_or_else(|| Error::Parse(format!("phase `{s}` is not of the form k/n")))?;
        let k: u32 = k.trim().parse().map_err(|_| Error::Parse(format!("bad numerator in `{s}`")))?;
        let n: u32 = n.trim().parse().map_err(|_| Error::Parse(format!("bad denominator in `{s}`")))?;
        Phase::try_from((k, n))
    }
}

impl TryFrom<(u32, u32)> for Phase {
    type Error = Error;

    fn try_from((k, n): (u32, u32)) -> Result<Self> {
        if n == 0 || k >= n {
            return Err(Error::Parse(format!("phase {k}/{n} is outside [0, 1)")));
        }
        let p = Phase::new(k as i64, n);
        if p.num != k || p.den != n {
            return Err(Error::Parse(format!("phase {k}/{n} is not reduced")));
        }
        Ok(p)
    }
}

impl From<Phase> for (u32, u32) {
    fn from(p: Phase) -> Self {
        (p.num, p.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reduces_and_wraps() {
        assert_eq!(Phase::new(2, 4), Phase::HALF);
        assert_eq!(Phase::new(0, 7), Phase::ZERO);
        assert_eq!(Phase::new(-1, 3), Phase::new(2, 3));
        assert_eq!(Phase::new(5, 3), Phase::new(2, 3));
        assert_eq!(Phase::new(1, 3).neg(), Phase::new(2, 3));
        assert_eq!(Phase::new(1, 3).checked_add(Phase::new(2, 3)), Some(Phase::ZERO));
        assert_eq!(Phase::new(1, 4).checked_add(Phase::new(1, 6)), Some(Phase::new(5, 12)));
        assert_eq!(Phase::new(1, 4_000_000_007).checked_add(Phase::new(1, 4_000_000_009)), None);
        assert_eq!(Phase::new(2, 3).folded(), Phase::new(1, 3));
    }

    #[test]
    fn orders_by_value() {
        let mut v = vec![Phase::HALF, Phase::new(1, 3), Phase::ZERO, Phase::new(3, 4)];
        v.sort();
        assert_eq!(v, vec![Phase::ZERO, Phase::new(1, 3), Phase::HALF, Phase::new(3, 4)]);
    }

    #[test]
    fn parse_rejects_unreduced_and_out_of_range() {
        assert_eq!("1/3".parse::<Phase>().unwrap(), Phase::new(1, 3));
        assert!("2/4".parse::<Phase>().is_err());
        assert!("3/3".parse::<Phase>().is_err());
        assert!("1/0".parse::<Phase>().is_err());
        assert!("x".parse::<Phase>().is_err());
        assert!("0/2".parse::<Phase>().is_err());
        assert_eq!("0/1".parse::<Phase>().unwrap(), Phase::ZERO);
    }

    #[test]
    fn nearest_rounds() {
        let (p, err) = Phase::nearest(0.2499, 4);
        assert_eq!(p, Phase::new(1, 4));
        assert!((err - 0.0001).abs() < 1e-12);
        assert_eq!(Phase::nearest(-0.25, 4).0, Phase::new(3, 4));
    }

    proptest! {
        #[test]
        fn display_parse_round_trip(k in 0i64..1000, n in 1u32..500) {
            let p = Phase::new(k, n);
            prop_assert_eq!(p.to_string().parse::<Phase>().unwrap(), p);
            prop_assert_eq!(p.neg().neg(), p);
            prop_assert!(p.folded() <= Phase::HALF);
        }
    }
}
