//! Edge weights over the reals extended with strict values `a⁻` and `+∞`.
//!
//! A strict weight `a⁻` encodes `Y - X < a`. Addition makes a finite sum
//! strict as soon as one operand is strict, and `a⁻` sits immediately below
//! `a` in the order, so `0⁻` counts as a negative weight.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use crate::interval::Bound;
use crate::rat::{ParseRatError, Rat};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Weight {
    Finite { value: Rat, strict: bool },
    PosInf,
}

impl Weight {
    pub fn zero() -> Self {
        Weight::exact(Rat::zero())
    }

    pub fn exact(value: impl Into<Rat>) -> Self {
        Weight::Finite { value: value.into(), strict: false }
    }

    /// `value⁻`.
    pub fn strict(value: impl Into<Rat>) -> Self {
        Weight::Finite { value: value.into(), strict: true }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Weight::Finite { .. })
    }

    pub fn value(&self) -> Option<&Rat> {
        match self {
            Weight::Finite { value, .. } => Some(value),
            Weight::PosInf => None,
        }
    }

    pub fn is_strict(&self) -> bool {
        matches!(self, Weight::Finite { strict: true, .. })
    }

    /// Strictly below `0` (this includes `0⁻`).
    pub fn is_negative(&self) -> bool {
        *self < Weight::zero()
    }

    /// Weight of the edge that encodes an upper endpoint: `b` for `…,b]`,
    /// `b⁻` for `…,b)`, `+∞` when unbounded.
    pub fn from_upper(hi: &Bound) -> Weight {
        match hi {
            Bound::Finite { value, closed } => Weight::Finite { value: value.clone(), strict: !closed },
            _ => Weight::PosInf,
        }
    }

    /// Weight of the reverse edge that encodes a lower endpoint: `-a` for
    /// `[a,…`, `(-a)⁻` for `(a,…`, `+∞` when unbounded.
    pub fn from_lower(lo: &Bound) -> Weight {
        match lo {
            Bound::Finite { value, closed } => Weight::Finite { value: -value, strict: !closed },
            _ => Weight::PosInf,
        }
    }

    /// Inverse of [`Weight::from_upper`].
    pub fn to_upper(&self) -> Bound {
        match self {
            Weight::Finite { value, strict } => Bound::Finite { value: value.clone(), closed: !strict },
            Weight::PosInf => Bound::PosInf,
        }
    }

    /// Inverse of [`Weight::from_lower`].
    pub fn to_lower(&self) -> Bound {
        match self {
            Weight::Finite { value, strict } => Bound::Finite { value: -value, closed: !strict },
            Weight::PosInf => Bound::NegInf,
        }
    }
}

/// `a + b` with `+∞` absorbing and strictness propagating.
pub fn w_add(a: &Weight, b: &Weight) -> Weight {
    match (a, b) {
        (Weight::Finite { value: x, strict: sx }, Weight::Finite { value: y, strict: sy }) => {
            Weight::Finite { value: x + y, strict: *sx || *sy }
        }
        _ => Weight::PosInf,
    }
}

/// `a < b` in the extended order.
pub fn w_less(a: &Weight, b: &Weight) -> bool {
    a < b
}

impl Add for Weight {
    type Output = Weight;
    fn add(self, rhs: Weight) -> Weight {
        w_add(&self, &rhs)
    }
}

impl<'a> Add<&'a Weight> for &'a Weight {
    type Output = Weight;
    fn add(self, rhs: &'a Weight) -> Weight {
        w_add(self, rhs)
    }
}

impl Ord for Weight {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Weight::PosInf, Weight::PosInf) => Ordering::Equal,
            (Weight::PosInf, _) => Ordering::Greater,
            (_, Weight::PosInf) => Ordering::Less,
            (Weight::Finite { value: x, strict: sx }, Weight::Finite { value: y, strict: sy }) => {
                // at equal value the strict one is smaller
                x.cmp(y).then_with(|| sy.cmp(sx))
            }
        }
    }
}

impl PartialOrd for Weight {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::PosInf => f.write_str("+inf"),
            Weight::Finite { value, strict } => write!(f, "{}{}", value, if *strict { "~" } else { "" }),
        }
    }
}

impl FromStr for Weight {
    type Err = ParseRatError;

    /// `7`, `-3/2~` (strict), `+inf`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if matches!(t, "+inf" | "inf" | "+∞" | "∞") {
            return Ok(Weight::PosInf);
        }
        match t.strip_suffix('~') {
            Some(v) => Ok(Weight::strict(v.parse::<Rat>()?)),
            None => Ok(Weight::exact(t.parse::<Rat>()?)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn addition_rules() {
        assert_eq!(w_add(&Weight::exact(3), &Weight::strict(4)), Weight::strict(7));
        assert_eq!(w_add(&Weight::exact(3), &Weight::PosInf), Weight::PosInf);
        assert_eq!(w_add(&Weight::zero(), &Weight::zero()), Weight::zero());
        assert_eq!(w_add(&Weight::strict(1), &Weight::strict(-1)), Weight::strict(0));
    }

    #[test]
    fn order_rules() {
        assert!(w_less(&Weight::strict(0), &Weight::zero()));
        assert!(Weight::strict(0).is_negative());
        assert!(w_less(&Weight::strict(2), &Weight::exact(3)));
        assert!(w_less(&Weight::exact(2), &Weight::strict(3)));
        assert!(!w_less(&Weight::exact(5), &Weight::exact(5)));
        assert!(w_less(&Weight::exact(1000), &Weight::PosInf));
        assert!(!w_less(&Weight::PosInf, &Weight::PosInf));
    }

    #[test]
    fn text_round_trip() {
        for s in ["7", "-3/2~", "+inf", "0~"] {
            assert_eq!(s.parse::<Weight>().unwrap().to_string(), s);
        }
    }
}
