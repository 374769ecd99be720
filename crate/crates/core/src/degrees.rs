//! Degree arithmetic.
//!
//! Morphisms of tape categories and state morphisms carry an ℕ degree
//! ([`Degree1`]). Terms of a freely generated ℕ²-filtered category carry a
//! [`Degree2`] `(a, b)`, read as the linear polynomial `aX + b`.
//!
//! All arithmetic is checked: an overflow is reported as
//! [`Error::DegreeOverflow`] rather than wrapping.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// ℕ-degree of a morphism or filtered-set element.
pub type Degree1 = u64;

/// An ℕ² degree `linear·X + constant`, ordered componentwise.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Degree2 {
    pub linear: u64,
    pub constant: u64,
}

impl Degree2 {
    pub const ZERO: Degree2 = Degree2 { linear: 0, constant: 0 };

    /// Degree assigned to variables of the unfiltered state category. Every
    /// output term fits under it for any state-morphism degree.
    pub const UNBOUNDED: Degree2 = Degree2 { linear: u64::MAX, constant: u64::MAX };

    pub const fn new(linear: u64, constant: u64) -> Self {
        Degree2 { linear, constant }
    }

    /// A pure constant `0·X + c`.
    pub const fn constant(c: u64) -> Self {
        Degree2 { linear: 0, constant: c }
    }

    pub fn checked_add(self, other: Degree2) -> Result<Degree2> {
        Ok(Degree2 {
            linear: self.linear.checked_add(other.linear).ok_or(Error::DegreeOverflow)?,
            constant: self.constant.checked_add(other.constant).ok_or(Error::DegreeOverflow)?,
        })
    }

    /// Componentwise `self ≤ other`.
    pub fn leq(self, other: Degree2) -> bool {
        self.linear <= other.linear && self.constant <= other.constant
    }

    /// `(a, b)` shifted by a state-morphism degree `ell`: `(a, a·ell + b)`.
    ///
    /// This is the largest output-term degree allowed for a target variable
    /// of degree `self` under a morphism of degree `ell`.
    pub fn shift(self, ell: Degree1) -> Result<Degree2> {
        let constant = self
            .linear
            .checked_mul(ell)
            .and_then(|v| v.checked_add(self.constant))
            .ok_or(Error::DegreeOverflow)?;
        Ok(Degree2 { linear: self.linear, constant })
    }

    /// `self ≤ bound.shift(ell)`, evaluated in wide arithmetic so that the
    /// check itself cannot overflow (relevant for [`Degree2::UNBOUNDED`]).
    pub fn within_shifted(self, bound: Degree2, ell: Degree1) -> bool {
        let shifted = bound.linear as u128 * ell as u128 + bound.constant as u128;
        self.linear <= bound.linear && (self.constant as u128) <= shifted
    }

    /// `k·self`, used when a variable occurs `k` times.
    pub fn checked_scale(self, k: u64) -> Result<Degree2> {
        Ok(Degree2 {
            linear: self.linear.checked_mul(k).ok_or(Error::DegreeOverflow)?,
            constant: self.constant.checked_mul(k).ok_or(Error::DegreeOverflow)?,
        })
    }
}

impl PartialOrd for Degree2 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self.leq(*other), other.leq(*self)) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Less),
            (false, true) => Some(Ordering::Greater),
            (false, false) => None,
        }
    }
}

impl fmt::Display for Degree2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.linear, self.constant)
    }
}

/// Checked sum of ℕ degrees.
pub fn add1(x: Degree1, y: Degree1) -> Result<Degree1> {
    x.checked_add(y).ok_or(Error::DegreeOverflow)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn d(a: u64, b: u64) -> Degree2 {
        Degree2::new(a, b)
    }

    #[test]
    fn addition_examples() {
        assert_eq!(d(1, 0).checked_add(d(1, 0)).unwrap(), d(2, 0));
        assert_eq!(d(0, 0).checked_add(d(3, 7)).unwrap(), d(3, 7));
        assert_eq!(d(2, 1).checked_add(d(1, 4)).unwrap(), d(3, 5));
    }

    #[test]
    fn order_examples() {
        assert!(d(1, 2).leq(d(1, 3)));
        assert!(!d(2, 0).leq(d(1, 9)));
        assert!(Degree2::ZERO.leq(d(17, 3)));
        assert_eq!(d(2, 0).partial_cmp(&d(1, 9)), None);
        assert!(d(1, 1) < d(1, 2));
    }

    #[test]
    fn shift_examples() {
        assert_eq!(d(2, 3).shift(1).unwrap(), d(2, 5));
        assert_eq!(d(4, 9).shift(0).unwrap(), d(4, 9));
        assert_eq!(d(1, 0).shift(5).unwrap(), d(1, 5));
    }

    #[test]
    fn overflow_is_an_error() {
        assert!(matches!(d(u64::MAX, 0).checked_add(d(1, 0)), Err(Error::DegreeOverflow)));
        assert!(matches!(d(u64::MAX, 0).shift(2), Err(Error::DegreeOverflow)));
        assert!(d(5, 1 << 40).within_shifted(Degree2::UNBOUNDED, 3));
    }

    fn small() -> impl Strategy<Value = Degree2> {
        (0u64..1000, 0u64..1000).prop_map(|(a, b)| d(a, b))
    }

    proptest! {
        #[test]
        fn add_is_commutative_monoid(x in small(), y in small(), z in small()) {
            prop_assert_eq!(x.checked_add(y).unwrap(), y.checked_add(x).unwrap());
            let l = x.checked_add(y).unwrap().checked_add(z).unwrap();
            let r = x.checked_add(y.checked_add(z).unwrap()).unwrap();
            prop_assert_eq!(l, r);
            prop_assert_eq!(x.checked_add(Degree2::ZERO).unwrap(), x);
        }

        #[test]
        fn order_is_partial_and_translation_invariant(x in small(), y in small(), z in small()) {
            prop_assert!(x.leq(x));
            if x.leq(y) && y.leq(x) { prop_assert_eq!(x, y); }
            if x.leq(y) && y.leq(z) { prop_assert!(x.leq(z)); }
            if x.leq(y) {
                prop_assert!(x.checked_add(z).unwrap().leq(y.checked_add(z).unwrap()));
            }
        }

        #[test]
        fn shift_distributes_over_addition(x in small(), y in small(), ell in 0u64..100) {
            let lhs = x.checked_add(y).unwrap().shift(ell).unwrap();
            let rhs = x.shift(ell).unwrap().checked_add(y.shift(ell).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            prop_assert_eq!(x.within_shifted(y, ell), x.leq(y.shift(ell).unwrap()));
        }
    }
}
