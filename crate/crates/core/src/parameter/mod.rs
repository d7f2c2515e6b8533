//! Parameters `<V, T, F>`: validity, the proper/symmetric/open profile and
//! the named presets.

mod literal;

use std::collections::BTreeSet;
use std::fmt;

use num_rational::Ratio;
use thiserror::Error;

use crate::semantics::{TruthValue, ValueSet};

pub use literal::{parse_parameter, ParameterParseError};

/// A designated-status set: explicit values or an interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundarySet {
    /// Sorted, duplicate-free.
    Explicit(Vec<TruthValue>),
    Interval {
        lo: TruthValue,
        lo_open: bool,
        hi: TruthValue,
        hi_open: bool,
    },
}

impl BoundarySet {
    pub fn explicit(values: impl IntoIterator<Item = TruthValue>) -> BoundarySet {
        let set: BTreeSet<TruthValue> = values.into_iter().collect();
        BoundarySet::Explicit(set.into_iter().collect())
    }

    pub fn closed(lo: TruthValue, hi: TruthValue) -> BoundarySet {
        BoundarySet::Interval {
            lo,
            lo_open: false,
            hi,
            hi_open: false,
        }
    }

    /// `(lo, 1]`.
    pub fn above(lo: TruthValue) -> BoundarySet {
        BoundarySet::Interval {
            lo,
            lo_open: true,
            hi: TruthValue::ONE,
            hi_open: false,
        }
    }

    /// `[0, hi)`.
    pub fn below(hi: TruthValue) -> BoundarySet {
        BoundarySet::Interval {
            lo: TruthValue::ZERO,
            lo_open: false,
            hi,
            hi_open: true,
        }
    }

    pub fn contains(&self, x: TruthValue) -> bool {
        match self {
            BoundarySet::Explicit(vs) => vs.binary_search(&x).is_ok(),
            BoundarySet::Interval {
                lo,
                lo_open,
                hi,
                hi_open,
            } => {
                let above = if *lo_open { x > *lo } else { x >= *lo };
                let below = if *hi_open { x < *hi } else { x <= *hi };
                above && below
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            BoundarySet::Explicit(vs) => vs.is_empty(),
            BoundarySet::Interval {
                lo,
                lo_open,
                hi,
                hi_open,
            } => lo > hi || (lo == hi && (*lo_open || *hi_open)),
        }
    }

    /// Explicit members, or the interval endpoints.
    pub fn boundary_points(&self) -> Vec<TruthValue> {
        match self {
            BoundarySet::Explicit(vs) => vs.clone(),
            BoundarySet::Interval { lo, hi, .. } => vec![*lo, *hi],
        }
    }
}

impl fmt::Display for BoundarySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundarySet::Explicit(vs) => {
                let items: Vec<String> = vs.iter().map(ToString::to_string).collect();
                write!(f, "{{{}}}", items.join(","))
            }
            BoundarySet::Interval {
                lo,
                lo_open,
                hi,
                hi_open,
            } => write!(
                f,
                "{}{lo},{hi}{}",
                if *lo_open { '(' } else { '[' },
                if *hi_open { ')' } else { ']' }
            ),
        }
    }
}

/// A triple `<V, T, F>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parameter {
    pub v: ValueSet,
    pub t: BoundarySet,
    pub f: BoundarySet,
    pub name: Option<String>,
}

/// The first violated well-formedness clause.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("V is not closed: {0} is present but 1-{0} is not")]
    NotClosed(TruthValue),
    #[error("V must contain {0}")]
    MissingValue(TruthValue),
    #[error("1 is not in T")]
    OneNotInT,
    #[error("0 is not in F")]
    ZeroNotInF,
    #[error("T contains {0}, which is not above 1/2")]
    TNotAboveHalf(TruthValue),
    #[error("F contains {0}, which is not below 1/2")]
    FNotBelowHalf(TruthValue),
    #[error("T is not an upset: {member} is in T but {missing} is not")]
    TNotUpset {
        member: TruthValue,
        missing: TruthValue,
    },
    #[error("F is not a downset: {member} is in F but {missing} is not")]
    FNotDownset {
        member: TruthValue,
        missing: TruthValue,
    },
}

/// Why an interval parameter fails openness: a subset `X` of `V` whose
/// supremum lies in `T` (or infimum in `F`) while `X` misses that set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpenWitness {
    /// `true` when the failure is on the `T` side.
    pub t_side: bool,
    /// The attained bound: lub of `X` on the `T` side, glb on the `F` side.
    pub bound: TruthValue,
}

impl OpenWitness {
    /// Membership in the witness set `X`.
    pub fn in_subset(&self, x: TruthValue) -> bool {
        if self.t_side {
            x < self.bound
        } else {
            x > self.bound
        }
    }
}

impl fmt::Display for OpenWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.t_side {
            write!(
                f,
                "X = {{x < {b}}}: lub X = {b} is in T but no member of X is",
                b = self.bound
            )
        } else {
            write!(
                f,
                "X = {{x > {b}}}: glb X = {b} is in F but no member of X is",
                b = self.bound
            )
        }
    }
}

/// Proper, symmetric and open status with witnesses for failures.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParameterProfile {
    /// A value outside `T` and `F`, when proper.
    pub proper: Option<TruthValue>,
    /// A member of `T` or `F` whose mirror is missing, when not symmetric.
    pub asymmetry: Option<TruthValue>,
    pub openness: Option<OpenWitness>,
}

impl ParameterProfile {
    pub fn is_proper(&self) -> bool {
        self.proper.is_some()
    }

    pub fn is_symmetric(&self) -> bool {
        self.asymmetry.is_none()
    }

    pub fn is_open(&self) -> bool {
        self.openness.is_none()
    }

    /// Whether validity coincides with tolerant ST validity.
    pub fn collapses_to_st(&self) -> bool {
        self.is_proper() && self.is_symmetric() && self.is_open()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum PresetError {
    #[error("unknown preset `{0}`")]
    Unknown(String),
    #[error("VN(n) needs n >= 2, got {0}")]
    TooFewValues(usize),
    #[error("DYADIC(k) needs 1 <= k <= 30, got {0}")]
    BadDepth(usize),
}

fn ratio(n: i64, d: i64) -> TruthValue {
    TruthValue::of(n, d)
}

impl Parameter {
    pub fn new(v: ValueSet, t: BoundarySet, f: BoundarySet) -> Parameter {
        Parameter {
            v,
            t,
            f,
            name: None,
        }
    }

    pub fn named(mut self, name: impl Into<String>) -> Parameter {
        self.name = Some(name.into());
        self
    }

    /// `<{0,1},{1},{0}>`.
    pub fn classical() -> Parameter {
        Parameter::vn(2).expect("two values").named("CLASSICAL")
    }

    /// `<{0,1/2,1},{1},{0}>`.
    pub fn st() -> Parameter {
        Parameter::vn(3).expect("three values").named("ST")
    }

    /// `<[0,1],(1/2,1],[0,1/2)>`.
    pub fn smith() -> Parameter {
        Parameter::new(
            ValueSet::UnitInterval,
            BoundarySet::above(TruthValue::HALF),
            BoundarySet::below(TruthValue::HALF),
        )
        .named("SMITH")
    }

    /// `<{0, 1/(n-1), ..., 1}, {1}, {0}>`.
    pub fn vn(n: usize) -> Result<Parameter, PresetError> {
        if n < 2 {
            return Err(PresetError::TooFewValues(n));
        }
        let d = (n - 1) as i64;
        Ok(Parameter::new(
            ValueSet::finite((0..=d).map(|k| ratio(k, d))),
            BoundarySet::explicit([TruthValue::ONE]),
            BoundarySet::explicit([TruthValue::ZERO]),
        )
        .named(format!("VN({n})")))
    }

    /// Truncation of the dyadic parameter: `V = {0, 1/2^n, (2^n-1)/2^n : n <= k}`,
    /// `T = [3/4, 1]`, `F = [0, 1/4]`.
    pub fn dyadic(k: usize) -> Result<Parameter, PresetError> {
        if !(1..=30).contains(&k) {
            return Err(PresetError::BadDepth(k));
        }
        let mut values = vec![TruthValue::ZERO];
        for n in 0..=k as u32 {
            let d = 1i64 << n;
            values.push(ratio(1, d));
            values.push(ratio(d - 1, d));
        }
        Ok(Parameter::new(
            ValueSet::finite(values),
            BoundarySet::closed(ratio(3, 4), TruthValue::ONE),
            BoundarySet::closed(TruthValue::ZERO, ratio(1, 4)),
        )
        .named(format!("DYADIC({k})")))
    }

    /// Looks up `CLASSICAL`, `ST`, `SMITH`, `VN(n)` or `DYADIC(k)`,
    /// ignoring case.
    pub fn preset(name: &str) -> Result<Parameter, PresetError> {
        let upper = name.trim().to_ascii_uppercase();
        let arg = |prefix: &str| -> Option<Result<usize, PresetError>> {
            let inner = upper.strip_prefix(prefix)?.strip_prefix('(')?.strip_suffix(')')?;
            Some(
                inner
                    .trim()
                    .parse()
                    .map_err(|_| PresetError::Unknown(name.to_string())),
            )
        };
        match upper.as_str() {
            "CLASSICAL" => return Ok(Parameter::classical()),
            "ST" => return Ok(Parameter::st()),
            "SMITH" => return Ok(Parameter::smith()),
            _ => {}
        }
        if let Some(n) = arg("VN") {
            return Parameter::vn(n?);
        }
        if let Some(k) = arg("DYADIC") {
            return Parameter::dyadic(k?);
        }
        Err(PresetError::Unknown(name.to_string()))
    }

    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.to_string())
    }

    pub fn in_t(&self, x: TruthValue) -> bool {
        self.t.contains(x)
    }

    pub fn in_f(&self, x: TruthValue) -> bool {
        self.f.contains(x)
    }

    /// Points at which membership in `T`, `F` and their mirrors can change,
    /// plus one interior point between each neighbouring pair and a decimal
    /// probe grid. Scanning these decides any interval property exactly.
    fn probe_points(&self) -> Vec<TruthValue> {
        let mut points: BTreeSet<TruthValue> =
            [TruthValue::ZERO, TruthValue::HALF, TruthValue::ONE].into();
        for p in self.t.boundary_points().into_iter().chain(self.f.boundary_points()) {
            points.insert(p);
            points.insert(p.complement());
        }
        let sorted: Vec<TruthValue> = points.iter().copied().collect();
        for pair in sorted.windows(2) {
            points.insert(pair[0].midpoint(pair[1]));
        }
        for k in 0..=10 {
            points.insert(ratio(k, 10));
        }
        points.into_iter().collect()
    }

    /// Values that the profile checks range over: `V` itself when finite.
    fn scan_points(&self) -> Vec<TruthValue> {
        match &self.v {
            ValueSet::Finite(vs) => vs.clone(),
            ValueSet::UnitInterval => self.probe_points(),
        }
    }

    /// Checks every well-formedness clause and reports the first failure.
    pub fn validate(&self) -> Result<(), Violation> {
        if let Some(x) = self.v.closure_witness() {
            return Err(Violation::NotClosed(x));
        }
        for end in [TruthValue::ZERO, TruthValue::ONE] {
            if !self.v.contains(end) {
                return Err(Violation::MissingValue(end));
            }
        }
        if !self.in_t(TruthValue::ONE) {
            return Err(Violation::OneNotInT);
        }
        if !self.in_f(TruthValue::ZERO) {
            return Err(Violation::ZeroNotInF);
        }
        match &self.t {
            BoundarySet::Explicit(vs) => {
                if let Some(x) = vs.iter().find(|x| **x <= TruthValue::HALF) {
                    return Err(Violation::TNotAboveHalf(*x));
                }
            }
            BoundarySet::Interval { lo, lo_open, .. } => {
                if *lo < TruthValue::HALF || (*lo == TruthValue::HALF && !lo_open) {
                    return Err(Violation::TNotAboveHalf(*lo));
                }
            }
        }
        match &self.f {
            BoundarySet::Explicit(vs) => {
                if let Some(x) = vs.iter().find(|x| **x >= TruthValue::HALF) {
                    return Err(Violation::FNotBelowHalf(*x));
                }
            }
            BoundarySet::Interval { hi, hi_open, .. } => {
                if *hi > TruthValue::HALF || (*hi == TruthValue::HALF && !hi_open) {
                    return Err(Violation::FNotBelowHalf(*hi));
                }
            }
        }
        self.check_monotone()
    }

    /// Upset/downset conditions, within `V`.
    fn check_monotone(&self) -> Result<(), Violation> {
        match &self.v {
            ValueSet::Finite(vs) => {
                for (i, &x) in vs.iter().enumerate() {
                    if self.in_t(x) {
                        if let Some(&y) = vs[i + 1..].iter().find(|y| !self.in_t(**y)) {
                            return Err(Violation::TNotUpset {
                                member: x,
                                missing: y,
                            });
                        }
                    }
                    if self.in_f(x) {
                        if let Some(&y) = vs[..i].iter().find(|y| !self.in_f(**y)) {
                            return Err(Violation::FNotDownset {
                                member: x,
                                missing: y,
                            });
                        }
                    }
                }
                Ok(())
            }
            ValueSet::UnitInterval => {
                // 1 is in T and 0 in F, so a gap can only sit between a
                // member and the far end of the interval.
                for (set, up) in [(&self.t, true), (&self.f, false)] {
                    let points = set.boundary_points();
                    let member = if up { points[0] } else { *points.last().unwrap() };
                    let far = if up { TruthValue::ONE } else { TruthValue::ZERO };
                    let probes = self.probe_points();
                    let gap = probes.into_iter().find(|&y| {
                        let between = if up { y > member && y < far } else { y < member && y > far };
                        between && !set.contains(y)
                    });
                    if let Some(missing) = gap {
                        return Err(if up {
                            Violation::TNotUpset { member, missing }
                        } else {
                            Violation::FNotDownset { member, missing }
                        });
                    }
                }
                Ok(())
            }
        }
    }

    /// A value of `V` in neither `T` nor `F`, preferring 1/2.
    pub fn proper_witness(&self) -> Option<TruthValue> {
        let outside = |x: &TruthValue| !self.in_t(*x) && !self.in_f(*x);
        if self.v.contains(TruthValue::HALF) && outside(&TruthValue::HALF) {
            return Some(TruthValue::HALF);
        }
        self.scan_points().into_iter().find(outside)
    }

    pub fn is_proper(&self) -> bool {
        self.proper_witness().is_some()
    }

    /// Candidates ordered by distance from 1/2, lower one first.
    fn witness_order(&self) -> Vec<TruthValue> {
        let mut points = self.scan_points();
        points.sort_by_key(|x| {
            let d = x.ratio() - Ratio::new(1, 2);
            (if d < Ratio::from_integer(0) { -d } else { d }, *x)
        });
        points
    }

    /// A member of `T` whose mirror is not in `F`.
    pub fn t_mirror_witness(&self) -> Option<TruthValue> {
        self.witness_order()
            .into_iter()
            .find(|&x| self.in_t(x) && !self.in_f(x.complement()))
    }

    /// A member of `F` whose mirror is not in `T`.
    pub fn f_mirror_witness(&self) -> Option<TruthValue> {
        self.witness_order()
            .into_iter()
            .find(|&x| self.in_f(x) && !self.in_t(x.complement()))
    }

    /// A member of `T` or `F` whose mirror image is missing from the other.
    pub fn asymmetry_witness(&self) -> Option<TruthValue> {
        self.witness_order().into_iter().find(|&x| {
            (self.in_t(x) && !self.in_f(x.complement()))
                || (self.in_f(x) && !self.in_t(x.complement()))
        })
    }

    pub fn is_symmetric(&self) -> bool {
        self.asymmetry_witness().is_none()
    }

    /// Failure of the openness condition. Finite `V` is always open; over
    /// the unit interval `T` must be open at its infimum and `F` at its
    /// supremum.
    pub fn openness_witness(&self) -> Option<OpenWitness> {
        if matches!(self.v, ValueSet::Finite(_)) {
            return None;
        }
        let t_min = match &self.t {
            BoundarySet::Explicit(vs) => vs.first().copied(),
            BoundarySet::Interval { lo, lo_open, .. } => (!lo_open).then_some(*lo),
        };
        if let Some(bound) = t_min.filter(|b| *b > TruthValue::ZERO) {
            return Some(OpenWitness {
                t_side: true,
                bound,
            });
        }
        let f_max = match &self.f {
            BoundarySet::Explicit(vs) => vs.last().copied(),
            BoundarySet::Interval { hi, hi_open, .. } => (!hi_open).then_some(*hi),
        };
        f_max.filter(|b| *b < TruthValue::ONE).map(|bound| OpenWitness {
            t_side: false,
            bound,
        })
    }

    pub fn is_open(&self) -> bool {
        self.openness_witness().is_none()
    }

    pub fn profile(&self) -> ParameterProfile {
        ParameterProfile {
            proper: self.proper_witness(),
            asymmetry: self.asymmetry_witness(),
            openness: self.openness_witness(),
        }
    }
}

impl fmt::Display for Parameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "V={} T={} F={}", self.v, self.t, self.f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tv(s: &str) -> TruthValue {
        s.parse().unwrap()
    }

    fn asym() -> Parameter {
        Parameter::new(
            ValueSet::UnitInterval,
            BoundarySet::explicit([TruthValue::ONE]),
            BoundarySet::below(TruthValue::HALF),
        )
    }

    fn nonopen() -> Parameter {
        Parameter::new(
            ValueSet::UnitInterval,
            BoundarySet::closed(tv("3/5"), TruthValue::ONE),
            BoundarySet::closed(TruthValue::ZERO, tv("2/5")),
        )
    }

    #[test]
    fn presets_are_valid() {
        for p in [
            Parameter::classical(),
            Parameter::st(),
            Parameter::smith(),
            Parameter::vn(7).unwrap(),
            Parameter::dyadic(3).unwrap(),
        ] {
            assert_eq!(p.validate(), Ok(()), "{}", p.label());
        }
    }

    #[test]
    fn unclosed_value_set_is_reported() {
        let p = Parameter::new(
            ValueSet::finite([TruthValue::ZERO, tv("0.3"), TruthValue::ONE]),
            BoundarySet::explicit([TruthValue::ONE]),
            BoundarySet::explicit([TruthValue::ZERO]),
        );
        assert_eq!(p.validate(), Err(Violation::NotClosed(tv("0.3"))));
    }

    #[test]
    fn status_sets_must_sit_on_their_side_of_half() {
        let p = Parameter::new(
            ValueSet::UnitInterval,
            BoundarySet::closed(TruthValue::HALF, TruthValue::ONE),
            BoundarySet::below(TruthValue::HALF),
        );
        assert_eq!(p.validate(), Err(Violation::TNotAboveHalf(TruthValue::HALF)));
        let p = Parameter::new(
            ValueSet::finite([TruthValue::ZERO, TruthValue::HALF, TruthValue::ONE]),
            BoundarySet::explicit([TruthValue::ONE]),
            BoundarySet::explicit([TruthValue::ZERO, TruthValue::HALF]),
        );
        assert_eq!(p.validate(), Err(Violation::FNotBelowHalf(TruthValue::HALF)));
    }

    #[test]
    fn upsets_are_checked_within_v() {
        let v5 = ValueSet::finite((0..=4).map(|k| TruthValue::of(k, 4)));
        let ok = Parameter::new(
            v5.clone(),
            BoundarySet::explicit([tv("3/4"), TruthValue::ONE]),
            BoundarySet::explicit([TruthValue::ZERO]),
        );
        assert_eq!(ok.validate(), Ok(()));
        let gap = Parameter::new(
            ValueSet::UnitInterval,
            BoundarySet::explicit([tv("3/4"), TruthValue::ONE]),
            BoundarySet::explicit([TruthValue::ZERO]),
        );
        assert!(matches!(gap.validate(), Err(Violation::TNotUpset { .. })));
    }

    #[test]
    fn properness() {
        assert_eq!(Parameter::st().proper_witness(), Some(TruthValue::HALF));
        assert_eq!(Parameter::classical().proper_witness(), None);
        assert_eq!(Parameter::smith().proper_witness(), Some(TruthValue::HALF));
        let p = Parameter::new(
            ValueSet::finite((0..=4).map(|k| TruthValue::of(k, 4))),
            BoundarySet::explicit([tv("3/4"), TruthValue::ONE]),
            BoundarySet::explicit([TruthValue::ZERO, tv("1/4")]),
        );
        assert_eq!(p.proper_witness(), Some(TruthValue::HALF));
    }

    #[test]
    fn symmetry() {
        assert!(Parameter::smith().is_symmetric());
        assert!(Parameter::st().is_symmetric());
        assert!(Parameter::dyadic(3).unwrap().is_symmetric());
        let w = asym().asymmetry_witness().unwrap();
        assert_eq!(w, tv("0.4"));
        assert!(asym().in_f(w) && !asym().in_t(w.complement()));
        assert_eq!(asym().f_mirror_witness(), Some(tv("0.4")));
        assert_eq!(asym().t_mirror_witness(), None);
    }

    #[test]
    fn openness() {
        assert!(Parameter::smith().is_open());
        assert!(Parameter::st().is_open());
        let w = nonopen().openness_witness().unwrap();
        assert_eq!(
            w,
            OpenWitness {
                t_side: true,
                bound: tv("3/5")
            }
        );
        assert!(!w.in_subset(tv("3/5")) && w.in_subset(tv("0.59")));
        for x in ["1/2", "3/5", "9/10"] {
            let lo = tv(x);
            let p = Parameter::new(
                ValueSet::UnitInterval,
                BoundarySet::above(lo),
                BoundarySet::below(lo.complement()),
            );
            assert!(p.is_open(), "{p}");
        }
        // {1} is attained as the lub of [0,1), which misses it.
        assert_eq!(
            asym().openness_witness(),
            Some(OpenWitness {
                t_side: true,
                bound: TruthValue::ONE
            })
        );
    }

    #[test]
    fn preset_lookup() {
        assert_eq!(Parameter::preset("vn(3)").unwrap().v, Parameter::st().v);
        assert_eq!(Parameter::preset("ST").unwrap(), Parameter::vn(3).unwrap().named("ST"));
        assert!(matches!(Parameter::preset("VN(1)"), Err(PresetError::TooFewValues(1))));
        assert!(matches!(Parameter::preset("FOO"), Err(PresetError::Unknown(_))));
        let d4 = Parameter::dyadic(4).unwrap();
        for x in ["0", "1/16", "1/8", "1/4", "1/2", "3/4", "7/8", "15/16", "1"] {
            assert!(d4.v.contains(tv(x)), "{x}");
        }
    }

    #[test]
    fn profiles() {
        let st = Parameter::st().profile();
        assert!(st.is_proper() && st.is_symmetric() && st.is_open());
        let c = Parameter::classical().profile();
        assert!(!c.is_proper() && c.is_symmetric() && c.is_open());
    }
}
