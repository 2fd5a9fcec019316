//! Scalar abstraction for the parts of the library that are pure field
//! arithmetic (pmf evaluation, majorization, T-transforms, likelihood ratio
//! statistics). Anything that decides a tie goes through [`crate::Rational`];
//! the floating instantiations exist for quick exploratory evaluation.

use std::fmt::Debug;

use num_traits::{FromPrimitive, Num};

/// Ordered field element usable by the generic routines.
pub trait Scalar: Clone + PartialOrd + Num + FromPrimitive + Debug {
    /// Embeds a nonnegative integer count.
    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("count must be representable")
    }
}

impl<T> Scalar for T where T: Clone + PartialOrd + Num + FromPrimitive + Debug {}

/// Text form used in reports: exact `num/den` for rationals, shortest
/// round-trip decimal for floats.
pub trait Render {
    fn render(&self) -> String;
}

impl Render for crate::Rational {
    fn render(&self) -> String {
        crate::exactnum::format_rational(self)
    }
}

impl Render for f64 {
    fn render(&self) -> String {
        self.to_string()
    }
}

impl Render for f32 {
    fn render(&self) -> String {
        self.to_string()
    }
}

pub(crate) fn serialize_rendered<T: Render, S: serde::Serializer>(
    v: &T,
    s: S,
) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.render())
}

pub(crate) fn serialize_rendered_vec<T: Render, S: serde::Serializer>(
    v: &[T],
    s: S,
) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(Render::render))
}

/// Sum of a slice.
pub fn sum<T: Scalar>(values: &[T]) -> T {
    values.iter().cloned().fold(T::zero(), |acc, v| acc + v)
}

/// `base^exp` with the `0^0 = 1` convention.
pub fn powu<T: Scalar>(base: &T, exp: u32) -> T {
    let mut acc = T::one();
    for _ in 0..exp {
        acc = acc * base.clone();
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    #[test]
    fn zero_to_the_zero_is_one() {
        assert_eq!(powu(&0.0f64, 0), 1.0);
        assert_eq!(powu(&Rational::from_integer(0.into()), 0), Rational::from_integer(1.into()));
    }

    #[test]
    fn sums_rationals_exactly() {
        let third = Rational::new(1.into(), 3.into());
        let v = vec![third.clone(), third.clone(), third];
        assert_eq!(sum(&v), Rational::from_integer(1.into()));
    }
}
