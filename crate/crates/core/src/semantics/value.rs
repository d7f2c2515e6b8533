use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Zero};
use thiserror::Error;

/// An exact degree of truth in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TruthValue(Ratio<i64>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValueError {
    #[error("{0} is outside [0, 1]")]
    OutOfRange(String),
    #[error("malformed value `{0}`")]
    Malformed(String),
}

impl TruthValue {
    pub const ZERO: TruthValue = TruthValue(Ratio::new_raw(0, 1));
    pub const HALF: TruthValue = TruthValue(Ratio::new_raw(1, 2));
    pub const ONE: TruthValue = TruthValue(Ratio::new_raw(1, 1));

    pub fn new(numer: i64, denom: i64) -> Result<TruthValue, ValueError> {
        if denom == 0 {
            return Err(ValueError::Malformed(format!("{numer}/{denom}")));
        }
        Self::from_ratio(Ratio::new(numer, denom))
    }

    pub fn from_ratio(r: Ratio<i64>) -> Result<TruthValue, ValueError> {
        if r < Ratio::zero() || r > Ratio::one() {
            return Err(ValueError::OutOfRange(r.to_string()));
        }
        Ok(TruthValue(r))
    }

    /// Panicking constructor for literals known to be in range.
    pub fn of(numer: i64, denom: i64) -> TruthValue {
        TruthValue::new(numer, denom).expect("truth value literal out of range")
    }

    pub fn ratio(self) -> Ratio<i64> {
        self.0
    }

    /// `1 - x`.
    pub fn complement(self) -> TruthValue {
        TruthValue(Ratio::one() - self.0)
    }

    pub fn midpoint(self, other: TruthValue) -> TruthValue {
        TruthValue((self.0 + other.0) / Ratio::from_integer(2))
    }

    pub fn to_f64(self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }

    pub fn is_crisp(self) -> bool {
        self == Self::ZERO || self == Self::ONE
    }
}

impl fmt::Display for TruthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for TruthValue {
    type Err = ValueError;

    /// Accepts `p/q`, integers, and decimals (`0.6`, `.5`), converted exactly.
    fn from_str(s: &str) -> Result<TruthValue, ValueError> {
        let s = s.trim();
        let bad = || ValueError::Malformed(s.to_string());
        if let Some((n, d)) = s.split_once('/') {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            return TruthValue::new(n, d);
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || frac.len() > 15 || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let int: i64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
            let scale = 10i64.pow(frac.len() as u32);
            let frac: i64 = frac.parse().map_err(|_| bad())?;
            return TruthValue::new(int * scale + frac, scale);
        }
        let n: i64 = s.parse().map_err(|_| bad())?;
        TruthValue::new(n, 1)
    }
}

/// A set of admissible values: a finite set or the whole unit interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValueSet {
    /// Sorted, duplicate-free.
    Finite(Vec<TruthValue>),
    UnitInterval,
}

impl ValueSet {
    pub fn finite(values: impl IntoIterator<Item = TruthValue>) -> ValueSet {
        let set: BTreeSet<TruthValue> = values.into_iter().collect();
        ValueSet::Finite(set.into_iter().collect())
    }

    pub fn contains(&self, x: TruthValue) -> bool {
        match self {
            ValueSet::Finite(vs) => vs.binary_search(&x).is_ok(),
            ValueSet::UnitInterval => true,
        }
    }

    pub fn as_finite(&self) -> Option<&[TruthValue]> {
        match self {
            ValueSet::Finite(vs) => Some(vs),
            ValueSet::UnitInterval => None,
        }
    }

    /// A member whose complement is missing, if any. Finite sets are always
    /// closed under glb and lub, so `1 - x` is the only thing to check.
    pub fn closure_witness(&self) -> Option<TruthValue> {
        match self {
            ValueSet::UnitInterval => None,
            ValueSet::Finite(vs) => vs.iter().copied().find(|x| !self.contains(x.complement())),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.closure_witness().is_none()
    }

    /// Smallest finite closed set containing `seed`, 0 and 1.
    pub fn closure_of(seed: impl IntoIterator<Item = TruthValue>) -> ValueSet {
        let mut set: BTreeSet<TruthValue> = [TruthValue::ZERO, TruthValue::ONE].into();
        for x in seed {
            set.insert(x);
            set.insert(x.complement());
        }
        ValueSet::Finite(set.into_iter().collect())
    }
}

impl fmt::Display for ValueSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueSet::UnitInterval => f.write_str("[0,1]"),
            ValueSet::Finite(vs) => {
                let items: Vec<String> = vs.iter().map(ToString::to_string).collect();
                write!(f, "{{{}}}", items.join(","))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tv(s: &str) -> TruthValue {
        s.parse().unwrap()
    }

    #[test]
    fn parsing_is_exact() {
        assert_eq!(tv("0.6"), TruthValue::of(3, 5));
        assert_eq!(tv(".5"), TruthValue::HALF);
        assert_eq!(tv("2/4"), TruthValue::HALF);
        assert_eq!(tv("1"), TruthValue::ONE);
        assert!("1.5".parse::<TruthValue>().is_err());
        assert!("-1/3".parse::<TruthValue>().is_err());
        assert!("abc".parse::<TruthValue>().is_err());
        assert_eq!(TruthValue::of(6, 10).to_string(), "3/5");
    }

    #[test]
    fn complement_is_exact() {
        assert_eq!(tv("0.3").complement(), tv("0.7"));
        assert_eq!(TruthValue::HALF.complement(), TruthValue::HALF);
    }

    #[test]
    fn closedness() {
        assert!(ValueSet::finite([tv("0"), tv("1/2"), tv("1")]).is_closed());
        assert!(ValueSet::finite([tv("0"), tv("1")]).is_closed());
        let open = ValueSet::finite([tv("0"), tv("0.3"), tv("1")]);
        assert_eq!(open.closure_witness(), Some(tv("0.3")));
        assert!(ValueSet::UnitInterval.is_closed());
    }

    #[test]
    fn quarter_set_is_closed_by_exhaustive_complement_check() {
        let set = ValueSet::finite([tv("0"), tv("1/4"), tv("3/4"), tv("1")]);
        let vs = set.as_finite().unwrap();
        // Independent check: every member's complement is literally in the list.
        assert!(vs.iter().all(|x| vs.iter().any(|y| *y == x.complement())));
        assert!(set.is_closed());
    }

    #[test]
    fn closure_of_seeds() {
        assert_eq!(
            ValueSet::closure_of([TruthValue::HALF]),
            ValueSet::finite([tv("0"), tv("1/2"), tv("1")])
        );
        assert_eq!(
            ValueSet::closure_of([tv("0.3")]),
            ValueSet::finite([tv("0"), tv("0.3"), tv("0.7"), tv("1")])
        );
        assert_eq!(ValueSet::closure_of([]), ValueSet::finite([tv("0"), tv("1")]));
    }
}
