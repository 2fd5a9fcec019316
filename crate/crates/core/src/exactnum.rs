//! Exact arithmetic substrate: big rationals with a canonical string form,
//! binomial/factorial helpers, and odds of the form `t = base^(1/d)` with an
//! exact total order.
//!
//! Every comparison between two pmf values in this crate reduces to a
//! comparison between two rationals, possibly after raising both sides to a
//! common integer power. Nothing here goes through floating point except the
//! explicitly lossy `to_f64`/`ln_*` helpers used for display and KLD.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::Rational;

/// `num/den` as a reduced rational. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: u64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn factorial(n: u64) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Binomial coefficient `C(n, k)`, zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `r^e` for a rational, `0^0 = 1`.
pub fn pow_rational(r: &Rational, e: u32) -> Rational {
    Rational::new_raw(r.numer().pow(e), r.denom().pow(e))
}

/// Canonical `num/den` rendering; integers still carry `/1`.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `a/b` or a bare integer. Decimal and exponent notation are
/// rejected so that every accepted input is exact.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    if s.contains(['.', 'e', 'E']) {
        return Err(Error::Parse(format!(
            "'{s}' looks like a float; write probabilities as a/b"
        )));
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| Error::Parse(format!("bad numerator in '{s}'")))?;
    let den = BigInt::from_str(den).map_err(|_| Error::Parse(format!("bad denominator in '{s}'")))?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in '{s}'")));
    }
    Ok(Rational::new(num, den))
}

fn ln_bigint(x: &BigInt) -> f64 {
    debug_assert!(x.is_positive());
    let bits = x.bits();
    if bits <= 1000 {
        x.to_f64().expect("finite").ln()
    } else {
        let shift = bits - 64;
        let top: BigInt = x >> shift;
        top.to_f64().expect("finite").ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// Natural log of a positive rational, accurate to a few ulps even when
/// numerator and denominator have thousands of bits.
pub fn ln_rational(r: &Rational) -> f64 {
    if !r.is_positive() {
        return f64::NEG_INFINITY;
    }
    ln_bigint(r.numer()) - ln_bigint(r.denom())
}

pub fn to_f64(r: &Rational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    if r.numer().bits() <= 1000 && r.denom().bits() <= 1000 {
        return r.numer().to_f64().unwrap() / r.denom().to_f64().unwrap();
    }
    let mag = ln_rational(&r.abs()).exp();
    if r.is_negative() {
        -mag
    } else {
        mag
    }
}

/// Serde adapter writing a rational as its canonical string.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

pub mod serde_rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(format_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// `None` is written as `"inf"`, used for thresholds that no realized value
/// can meet.
pub mod serde_rational_or_inf {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_str(&format_rational(r)),
            None => s.serialize_str("inf"),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Rational>, D::Error> {
        let s = String::deserialize(d)?;
        if s == "inf" {
            return Ok(None);
        }
        parse_rational(&s).map(Some).map_err(serde::de::Error::custom)
    }
}

/// Writes `f64::INFINITY` as `"inf"`; finite values as JSON numbers.
pub mod serde_extended_real {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if v.is_infinite() && v.is_sign_positive() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }
}

/// An odds value `t = base^(1/root_degree)` with `base > 0`.
///
/// Values are not canonicalized: `(9/1)^(1/2)` and `3/1` are distinct
/// representations of the same real, and compare `Equal`.
#[derive(Debug, Clone)]
pub struct AlgebraicOdds {
    base: Rational,
    root_degree: u32,
}

impl AlgebraicOdds {
    pub fn new(base: Rational, root_degree: u32) -> Result<Self> {
        if !base.is_positive() {
            return Err(Error::InvalidInput("odds base must be positive".into()));
        }
        if root_degree == 0 {
            return Err(Error::InvalidInput("root degree must be at least 1".into()));
        }
        Ok(Self { base, root_degree })
    }

    pub fn rational(t: Rational) -> Result<Self> {
        Self::new(t, 1)
    }

    pub fn one() -> Self {
        Self { base: Rational::one(), root_degree: 1 }
    }

    pub fn base(&self) -> &Rational {
        &self.base
    }

    pub fn root_degree(&self) -> u32 {
        self.root_degree
    }

    /// The value as a rational, if it is one (`base` a perfect power).
    pub fn as_rational(&self) -> Option<Rational> {
        if self.root_degree == 1 {
            return Some(self.base.clone());
        }
        let d = self.root_degree;
        let num = self.base.numer().nth_root(d);
        let den = self.base.denom().nth_root(d);
        if num.pow(d) == *self.base.numer() && den.pow(d) == *self.base.denom() {
            Some(Rational::new(num, den))
        } else {
            None
        }
    }

    /// Rational bounds `lo <= t <= hi` with `hi - lo` at most
    /// `max(1, base) * 2^-bits`; both equal `t` when it is rational.
    pub fn bracket(&self, bits: u32) -> (Rational, Rational) {
        if let Some(r) = self.as_rational() {
            return (r.clone(), r);
        }
        let one = Rational::one();
        let (mut lo, mut hi) = if self.base >= one {
            (one, self.base.clone())
        } else {
            (self.base.clone(), one)
        };
        let two = int(2);
        for _ in 0..bits {
            let mid = (&lo + &hi) / &two;
            if pow_rational(&mid, self.root_degree) < self.base {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo, hi)
    }

    pub fn to_f64(&self) -> f64 {
        (ln_rational(&self.base) / self.root_degree as f64).exp()
    }
}

impl PartialEq for AlgebraicOdds {
    fn eq(&self, other: &Self) -> bool {
        cmp_algebraic(self, other) == Ordering::Equal
    }
}

impl Eq for AlgebraicOdds {}

impl PartialOrd for AlgebraicOdds {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for AlgebraicOdds {
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_algebraic(self, other)
    }
}

impl fmt::Display for AlgebraicOdds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})^(1/{})", format_rational(&self.base), self.root_degree)
    }
}

impl FromStr for AlgebraicOdds {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix('(') {
            let (base, tail) = rest
                .split_once(")^(1/")
                .ok_or_else(|| Error::Parse(format!("expected (u/v)^(1/d), got '{s}'")))?;
            let degree = tail
                .strip_suffix(')')
                .ok_or_else(|| Error::Parse(format!("missing ')' in '{s}'")))?;
            let degree: u32 = degree
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad root degree in '{s}'")))?;
            AlgebraicOdds::new(parse_rational(base)?, degree)
        } else {
            AlgebraicOdds::rational(parse_rational(s)?)
        }
    }
}

impl Serialize for AlgebraicOdds {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for AlgebraicOdds {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Exact order of `a` and `b` as real numbers: both sides are raised to
/// `lcm(d_a, d_b)` and compared as rationals.
pub fn cmp_algebraic(a: &AlgebraicOdds, b: &AlgebraicOdds) -> Ordering {
    if a.root_degree == b.root_degree {
        return a.base.cmp(&b.base);
    }
    let l = a.root_degree.lcm(&b.root_degree);
    let lhs = pow_rational(&a.base, l / a.root_degree);
    let rhs = pow_rational(&b.base, l / b.root_degree);
    lhs.cmp(&rhs)
}

/// `p / (1 - p)`.
pub fn odds_from_p(p: &Rational) -> Result<Rational> {
    if p.is_negative() || *p > Rational::one() {
        return Err(Error::InvalidInput(format!("p = {} outside [0, 1]", format_rational(p))));
    }
    if p.is_one() {
        return Err(Error::DivisionAtOne);
    }
    Ok(p / (Rational::one() - p))
}

/// `t / (1 + t)`.
pub fn p_from_odds(t: &Rational) -> Rational {
    t / (Rational::one() + t)
}

/// Odds on the extended half-line `[0, ∞]`, so that `p = 0` and `p = 1` can
/// be fed to the same rank machinery as interior points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Odds {
    Zero,
    Finite(AlgebraicOdds),
    Infinite,
}

impl Odds {
    pub fn from_p(p: &Rational) -> Result<Self> {
        if p.is_zero() {
            Ok(Odds::Zero)
        } else if p.is_one() {
            Ok(Odds::Infinite)
        } else {
            Ok(Odds::Finite(AlgebraicOdds::rational(odds_from_p(p)?)?))
        }
    }

    pub fn finite(t: AlgebraicOdds) -> Self {
        Odds::Finite(t)
    }
}

impl fmt::Display for Odds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Odds::Zero => write!(f, "0"),
            Odds::Finite(t) => write!(f, "{t}"),
            Odds::Infinite => write!(f, "inf"),
        }
    }
}

/// Exact order of the Binomial(n, p) masses at `x` and `y`, where `p` has
/// odds `t`. Compares `C(n,x) t^x` with `C(n,y) t^y` after raising both to
/// the root degree of `t`.
pub fn compare_binomial_mass(n: u64, x: u64, y: u64, t: &Odds) -> Ordering {
    assert!(x <= n && y <= n, "outcomes must lie in 0..=n");
    if x == y {
        return Ordering::Equal;
    }
    match t {
        // f_0 is the point mass at 0
        Odds::Zero => (x == 0).cmp(&(y == 0)),
        // f_1 is the point mass at n
        Odds::Infinite => (x == n).cmp(&(y == n)),
        Odds::Finite(t) => {
            let d = t.root_degree;
            let cx = Rational::from_integer(binomial(n, x).pow(d));
            let cy = Rational::from_integer(binomial(n, y).pow(d));
            let lhs = cx * pow_rational(&t.base, x as u32);
            let rhs = cy * pow_rational(&t.base, y as u32);
            lhs.cmp(&rhs)
        }
    }
}

/// Two rationals `lo < hi` with `a <= lo` and `hi <= b`, tight around the
/// gap between `a < b`. Strictly interior points can be drawn from `(lo, hi)`.
pub fn separating_bounds(a: &AlgebraicOdds, b: &AlgebraicOdds) -> (Rational, Rational) {
    assert_eq!(cmp_algebraic(a, b), Ordering::Less, "separating_bounds needs a < b");
    let mut bits = 8;
    loop {
        let (_, a_hi) = a.bracket(bits);
        let (b_lo, _) = b.bracket(bits);
        if a_hi < b_lo {
            return (a_hi, b_lo);
        }
        bits *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn odds(base: Rational, d: u32) -> AlgebraicOdds {
        AlgebraicOdds::new(base, d).unwrap()
    }

    #[test]
    fn cmp_algebraic_examples() {
        assert_eq!(cmp_algebraic(&odds(int(2), 2), &odds(int(5), 4)), Ordering::Less);
        assert_eq!(cmp_algebraic(&odds(int(3), 1), &odds(int(9), 2)), Ordering::Equal);
        assert_eq!(cmp_algebraic(&odds(int(10), 3), &odds(int(10), 2)), Ordering::Less);
    }

    #[test]
    fn odds_from_p_examples() {
        assert_eq!(odds_from_p(&rat(1, 2)).unwrap(), int(1));
        assert_eq!(odds_from_p(&int(0)).unwrap(), int(0));
        assert_eq!(odds_from_p(&rat(3, 4)).unwrap(), int(3));
        assert_eq!(odds_from_p(&int(1)), Err(Error::DivisionAtOne));
    }

    #[test]
    fn compare_binomial_mass_examples() {
        let t = Odds::Finite(odds(int(3), 2));
        assert_eq!(compare_binomial_mass(3, 1, 3, &t), Ordering::Equal);
        assert_eq!(compare_binomial_mass(3, 0, 0, &Odds::Finite(odds(rat(7, 3), 1))), Ordering::Equal);
        let t = Odds::Finite(odds(int(2), 2));
        assert_eq!(compare_binomial_mass(5, 2, 4, &t), Ordering::Equal);
    }

    #[test]
    fn compare_binomial_mass_at_extremes() {
        assert_eq!(compare_binomial_mass(4, 0, 2, &Odds::Zero), Ordering::Greater);
        assert_eq!(compare_binomial_mass(4, 1, 2, &Odds::Zero), Ordering::Equal);
        assert_eq!(compare_binomial_mass(4, 4, 2, &Odds::Infinite), Ordering::Greater);
    }

    #[test]
    fn binomial_and_factorial() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(0, 0), BigInt::from(1));
        assert_eq!(binomial(3, 4), BigInt::from(0));
        assert_eq!(factorial(5), BigInt::from(120));
        assert_eq!(factorial(0), BigInt::from(1));
    }

    #[test]
    fn rational_strings() {
        assert_eq!(format_rational(&rat(6, 16)), "3/8");
        assert_eq!(format_rational(&int(2)), "2/1");
        assert_eq!(parse_rational("3/8").unwrap(), rat(3, 8));
        assert_eq!(parse_rational(" 4 ").unwrap(), int(4));
        assert_eq!(parse_rational("-2/4").unwrap(), rat(-1, 2));
        assert!(parse_rational("0.5").is_err());
        assert!(parse_rational("1e3").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x/2").is_err());
    }

    #[test]
    fn algebraic_strings() {
        let t = odds(rat(10, 1), 3);
        assert_eq!(t.to_string(), "(10/1)^(1/3)");
        let back: AlgebraicOdds = "(10/1)^(1/3)".parse().unwrap();
        assert_eq!(back.base(), &int(10));
        assert_eq!(back.root_degree(), 3);
        let plain: AlgebraicOdds = "3/2".parse().unwrap();
        assert_eq!(plain.root_degree(), 1);
        assert!("(0/1)^(1/2)".parse::<AlgebraicOdds>().is_err());
        assert!("(3/1)^(1/0)".parse::<AlgebraicOdds>().is_err());
    }

    #[test]
    fn brackets_contain_the_root() {
        let t = odds(int(5), 4);
        let (lo, hi) = t.bracket(40);
        assert!(pow_rational(&lo, 4) < int(5));
        assert!(pow_rational(&hi, 4) > int(5));
        assert!(&hi - &lo < rat(1, 1 << 30));
        let exact = odds(int(9), 2);
        assert_eq!(exact.bracket(3), (int(3), int(3)));
        let small = odds(rat(1, 2), 2);
        let (lo, hi) = small.bracket(20);
        assert!(pow_rational(&lo, 2) < rat(1, 2) && pow_rational(&hi, 2) > rat(1, 2));
    }

    #[test]
    fn separating_bounds_are_ordered() {
        let a = odds(int(2), 2);
        let b = odds(int(5), 4);
        let (lo, hi) = separating_bounds(&a, &b);
        assert!(lo < hi);
        assert_eq!(cmp_algebraic(&a, &odds(lo.clone(), 1)), Ordering::Less);
        assert_eq!(cmp_algebraic(&odds(hi, 1), &b), Ordering::Less);
    }

    #[test]
    fn ln_rational_handles_huge_values() {
        let big = Rational::from_integer(BigInt::from(3).pow(2000));
        let got = ln_rational(&big);
        assert!((got - 2000.0 * 3f64.ln()).abs() < 1e-9 * got);
        assert!((ln_rational(&rat(3, 4)) - 0.75f64.ln()).abs() < 1e-15);
    }
}
