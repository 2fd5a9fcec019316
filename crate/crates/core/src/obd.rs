//! The ordered binomial distribution: Binomial(n, p) masses sorted
//! ascending and placed on `0..=n`. Includes the rank decomposition of
//! `sum r_p f_p` against the OBD mean and the monotonicity sweeps in `p`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::binomial::{binomial_masses, candidate_breakpoints};
use crate::error::{Error, Result};
use crate::exactnum::{binomial, format_rational, int, p_from_odds, rat, serde_rational, serde_rational_vec};
use crate::majorization::majorizes;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderedBinomial {
    pub n: u64,
    #[serde(with = "serde_rational")]
    pub p: Rational,
    #[serde(with = "serde_rational_vec")]
    pub sorted_masses: Vec<Rational>,
}

impl OrderedBinomial {
    pub fn mean(&self) -> Rational {
        self.sorted_masses.iter().enumerate().map(|(i, f)| int(i as u64) * f).sum()
    }

    /// `P[X~ <= x]` for `x = 0..=n`.
    pub fn cdf(&self) -> Vec<Rational> {
        let mut acc = Rational::zero();
        self.sorted_masses
            .iter()
            .map(|f| {
                acc += f;
                acc.clone()
            })
            .collect()
    }
}

fn check_p(p: &Rational) -> Result<()> {
    if *p < Rational::zero() || *p > Rational::one() {
        return Err(Error::InvalidInput(format!("p = {} outside [0, 1]", format_rational(p))));
    }
    Ok(())
}

pub fn obd(n: u64, p: &Rational) -> Result<OrderedBinomial> {
    check_p(p)?;
    let mut sorted_masses = binomial_masses(n, p);
    sorted_masses.sort();
    Ok(OrderedBinomial { n, p: p.clone(), sorted_masses })
}

/// `r_p(x) = |{y : f_p(y) < f_p(x)}|` for every `x`.
pub fn rank_profile_r(n: u64, p: &Rational) -> Result<Vec<u64>> {
    check_p(p)?;
    let f = binomial_masses(n, p);
    Ok(f.iter().map(|fx| f.iter().filter(|fy| *fy < fx).count() as u64).collect())
}

pub fn rank_r(n: u64, p: &Rational, x: u64) -> Result<u64> {
    if x > n {
        return Err(Error::IndexOutOfRange { index: x as usize, len: n as usize + 1 });
    }
    Ok(rank_profile_r(n, p)?[x as usize])
}

pub fn obd_mean(n: u64, p: &Rational) -> Result<Rational> {
    Ok(obd(n, p)?.mean())
}

/// Which part of the decomposition applies, after folding `p` onto `[1/2, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TieCase {
    /// All masses distinct: `delta = 0`.
    NoTies,
    /// `p = 1/2`: claimed `delta = 1/2`.
    Half,
    /// Ties with `1/2 < p < 1`: claimed `0 < delta < 1/2`.
    Ties,
    /// `p = 1`: `delta = 0`.
    One,
}

#[derive(Debug, Clone, Serialize)]
pub struct TieDecomposition {
    pub n: u64,
    #[serde(with = "serde_rational")]
    pub p: Rational,
    #[serde(with = "serde_rational")]
    pub sum_r_f: Rational,
    #[serde(with = "serde_rational")]
    pub obd_mean: Rational,
    /// `obd_mean - sum_r_f`.
    #[serde(with = "serde_rational")]
    pub delta: Rational,
    /// Unordered pairs `x < y` with `f_p(x) = f_p(y)`.
    pub tie_pair_count: u64,
    pub case: TieCase,
    pub claim: String,
    pub claim_holds: bool,
}

pub fn lemma73_decompose(n: u64, p: &Rational) -> Result<TieDecomposition> {
    check_p(p)?;
    let f = binomial_masses(n, p);
    let r = rank_profile_r(n, p)?;
    let sum_r_f: Rational = r.iter().zip(&f).map(|(&ri, fi)| int(ri) * fi).sum();
    let mean = obd_mean(n, p)?;
    let delta = &mean - &sum_r_f;
    let mut ties = 0u64;
    for x in 0..f.len() {
        for y in x + 1..f.len() {
            if f[x] == f[y] {
                ties += 1;
            }
        }
    }
    let half = rat(1, 2);
    let folded = if *p < half { Rational::one() - p } else { p.clone() };
    let (case, claim, holds) = if folded.is_one() {
        (TieCase::One, "delta = 0", delta.is_zero())
    } else if folded == half {
        (TieCase::Half, "delta = 1/2", delta == half)
    } else if ties == 0 {
        (TieCase::NoTies, "delta = 0", delta.is_zero())
    } else {
        (TieCase::Ties, "0 < delta < 1/2", delta > Rational::zero() && delta < half)
    };
    Ok(TieDecomposition {
        n,
        p: p.clone(),
        sum_r_f,
        obd_mean: mean,
        delta,
        tie_pair_count: ties,
        case,
        claim: claim.to_string(),
        claim_holds: holds,
    })
}

/// Exact `delta` at `p = 1/2`: `1/2` for odd `n`, `1/2 - C(n, n/2) / 2^(n+1)`
/// for even `n` (the unpaired central mass contributes nothing).
pub fn delta_half(n: u64) -> Rational {
    if n % 2 == 1 {
        rat(1, 2)
    } else {
        rat(1, 2) - Rational::new(binomial(n, n / 2), BigInt::one() << (n + 1))
    }
}

/// `n [1 - C(n, n/2) / 2^n] + 1/2` (even) or
/// `n [1 - C(n-1, (n-1)/2) / 2^(n-1)] + 1/2` (odd), as published.
pub fn obd_mean_half_closed_form(n: u64) -> Rational {
    let frac = if n % 2 == 0 {
        Rational::new(binomial(n, n / 2), BigInt::one() << n)
    } else {
        Rational::new(binomial(n - 1, (n - 1) / 2), BigInt::one() << (n - 1))
    };
    int(n) * (Rational::one() - frac) + rat(1, 2)
}

/// The published closed form with `1/2` replaced by the exact [`delta_half`].
pub fn obd_mean_half_corrected(n: u64) -> Rational {
    obd_mean_half_closed_form(n) - rat(1, 2) + delta_half(n)
}

/// Mode(s) of Binomial(n, p): `floor((n+1)p)`, or both `(n+1)p - 1` and
/// `(n+1)p` when `(n+1)p` is an integer.
pub fn binomial_mode(n: u64, p: &Rational) -> Result<Vec<u64>> {
    check_p(p)?;
    if p.is_zero() {
        return Ok(vec![0]);
    }
    if p.is_one() {
        return Ok(vec![n]);
    }
    let m = int(n + 1) * p;
    let fl = m.floor().to_integer();
    let fl: u64 = fl.try_into().expect("mode fits in u64");
    if m.is_integer() {
        Ok([fl.checked_sub(1), Some(fl)].into_iter().flatten().filter(|&x| x <= n).collect())
    } else {
        Ok(vec![fl.min(n)])
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Obd7xPoint {
    #[serde(with = "serde_rational")]
    pub p: Rational,
    #[serde(with = "serde_rational")]
    pub mean: Rational,
    #[serde(with = "serde_rational")]
    pub sum_r_f: Rational,
    #[serde(with = "serde_rational")]
    pub delta: Rational,
    pub ties: bool,
    /// `sum r_p f_p - sum r_{1/2} f_{1/2}`; the rank-sum inequality itself.
    #[serde(with = "serde_rational")]
    pub margin_direct: Rational,
    /// `E(X~_p) - E(X~_{1/2}) + 1/2`.
    #[serde(with = "serde_rational")]
    pub margin_half: Rational,
    /// `E(X~_p) - E(X~_{1/2}) + Λ` with `Λ = 1/2 - delta`.
    #[serde(with = "serde_rational")]
    pub margin_lambda: Rational,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairViolation {
    #[serde(with = "serde_rational")]
    pub p_lo: Rational,
    #[serde(with = "serde_rational")]
    pub p_hi: Rational,
}

#[derive(Debug, Clone, Serialize)]
pub struct Sweep7xReport {
    pub n: u64,
    pub points: Vec<Obd7xPoint>,
    /// Mean above the `p = 1/2` mean for every `p > 1/2`.
    pub mean_above_half: bool,
    #[serde(with = "serde_rational_vec")]
    pub mean_above_half_violations: Vec<Rational>,
    /// Mean strictly increasing between consecutive grid points.
    pub mean_increasing: bool,
    pub mean_increasing_violations: Vec<PairViolation>,
    /// Strict stochastic order of `X~` for every pair of grid points.
    pub stochastic_increasing: bool,
    pub stochastic_violations: Vec<PairViolation>,
    /// Strict majorization order of the sorted mass vectors, checked on its own.
    pub majorization_increasing: bool,
    pub majorization_violations: Vec<PairViolation>,
    pub rank_sum_holds: bool,
    pub margin_half_holds: bool,
    pub margin_lambda_holds: bool,
    pub passed: bool,
}

/// `j/den` for `j` covering `[1/2, 1]`, plus `1/2`, plus rational brackets on
/// both sides of every crossing odds in that range.
pub fn conjecture7x_grid(n: u64, den: u64) -> Vec<Rational> {
    let den = den.max(1);
    let mut grid: Vec<Rational> = (0..=den)
        .map(|j| Rational::new(BigInt::from(j), BigInt::from(den)))
        .filter(|p| *p >= rat(1, 2))
        .collect();
    grid.push(rat(1, 2));
    for t in candidate_breakpoints(n) {
        let (lo, hi) = t.bracket(24);
        grid.push(p_from_odds(&lo));
        grid.push(p_from_odds(&hi));
        if let Some(r) = t.as_rational() {
            grid.push(p_from_odds(&r));
        }
    }
    grid.sort();
    grid.dedup();
    grid
}

/// Stochastic `lo <= hi` coordinatewise on CDFs, with one strict coordinate.
fn strictly_dominates(cdf_lo: &[Rational], cdf_hi: &[Rational]) -> bool {
    let mut strict = false;
    for (a, b) in cdf_lo.iter().zip(cdf_hi) {
        match b.cmp(a) {
            Ordering::Greater => return false,
            Ordering::Less => strict = true,
            Ordering::Equal => {}
        }
    }
    strict
}

pub fn conjectures7x_sweep(n: u64, grid: &[Rational]) -> Result<Sweep7xReport> {
    let half = rat(1, 2);
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("grid must be strictly increasing".into()));
    }
    if grid.first() != Some(&half) || grid.last() != Some(&Rational::one()) {
        return Err(Error::InvalidInput("grid must run from 1/2 to 1".into()));
    }
    let obds: Vec<OrderedBinomial> = grid.iter().map(|p| obd(n, p)).collect::<Result<_>>()?;
    let cdfs: Vec<Vec<Rational>> = obds.iter().map(OrderedBinomial::cdf).collect();
    let decomps: Vec<TieDecomposition> = grid.iter().map(|p| lemma73_decompose(n, p)).collect::<Result<_>>()?;
    let mean_half = decomps[0].obd_mean.clone();
    let rsum_half = decomps[0].sum_r_f.clone();

    let points: Vec<Obd7xPoint> = decomps
        .iter()
        .map(|d| {
            let lambda = &half - &d.delta;
            Obd7xPoint {
                p: d.p.clone(),
                mean: d.obd_mean.clone(),
                sum_r_f: d.sum_r_f.clone(),
                delta: d.delta.clone(),
                ties: d.tie_pair_count > 0,
                margin_direct: &d.sum_r_f - &rsum_half,
                margin_half: &d.obd_mean - &mean_half + &half,
                margin_lambda: &d.obd_mean - &mean_half + lambda,
            }
        })
        .collect();

    let above: Vec<Rational> = points[1..].iter().filter(|pt| pt.mean <= mean_half).map(|pt| pt.p.clone()).collect();
    let pair = |i: usize, j: usize| PairViolation { p_lo: grid[i].clone(), p_hi: grid[j].clone() };
    let increasing: Vec<PairViolation> =
        (0..grid.len() - 1).filter(|&i| points[i + 1].mean <= points[i].mean).map(|i| pair(i, i + 1)).collect();
    let mut stochastic = Vec::new();
    for i in 0..grid.len() {
        for j in i + 1..grid.len() {
            if !strictly_dominates(&cdfs[i], &cdfs[j]) {
                stochastic.push(pair(i, j));
            }
        }
    }
    let mut major = Vec::new();
    for i in 0..grid.len() - 1 {
        let (a, b) = (&obds[i].sorted_masses, &obds[i + 1].sorted_masses);
        if !(majorizes(b, a)? && a != b) {
            major.push(pair(i, i + 1));
        }
    }
    let rest = &points[1..];
    let rank_sum = rest.iter().all(|pt| pt.margin_direct > Rational::zero());
    let m_half = rest.iter().all(|pt| pt.margin_half > Rational::zero());
    let m_lambda = rest.iter().all(|pt| pt.margin_lambda > Rational::zero());
    let passed = above.is_empty() && increasing.is_empty() && stochastic.is_empty() && major.is_empty() && rank_sum;
    Ok(Sweep7xReport {
        n,
        points,
        mean_above_half: above.is_empty(),
        mean_above_half_violations: above,
        mean_increasing: increasing.is_empty(),
        mean_increasing_violations: increasing,
        stochastic_increasing: stochastic.is_empty(),
        stochastic_violations: stochastic,
        majorization_increasing: major.is_empty(),
        majorization_violations: major,
        rank_sum_holds: rank_sum,
        margin_half_holds: m_half,
        margin_lambda_holds: m_lambda,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binomial::q_profile;
    use crate::exactnum::Odds;

    #[test]
    fn obd_examples() {
        assert_eq!(obd(3, &rat(1, 2)).unwrap().sorted_masses, vec![rat(1, 8), rat(1, 8), rat(3, 8), rat(3, 8)]);
        assert_eq!(obd(2, &int(1)).unwrap().sorted_masses, vec![int(0), int(0), int(1)]);
        assert_eq!(obd(2, &rat(3, 4)).unwrap().sorted_masses, vec![rat(1, 16), rat(6, 16), rat(9, 16)]);
        assert!(obd(2, &rat(5, 4)).is_err());
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank_profile_r(3, &rat(1, 2)).unwrap(), vec![0, 2, 2, 0]);
        assert_eq!(rank_r(3, &rat(1, 2), 1).unwrap(), 2);
        assert_eq!(rank_profile_r(2, &rat(3, 4)).unwrap(), vec![0, 1, 2]);
        assert_eq!(rank_profile_r(2, &rat(2, 3)).unwrap(), vec![0, 1, 1]);
        assert!(rank_r(2, &rat(1, 2), 3).is_err());
    }

    #[test]
    fn rank_matches_q() {
        for n in 1..=8u64 {
            for p in [rat(1, 2), rat(2, 3), rat(3, 4), rat(1, 5), int(1)] {
                let r = rank_profile_r(n, &p).unwrap();
                let q = q_profile(n, &Odds::from_p(&p).unwrap()).q;
                assert!(r.iter().zip(&q).all(|(a, b)| a + b == n + 1));
            }
        }
    }

    #[test]
    fn mean_examples() {
        assert_eq!(obd_mean(3, &rat(1, 2)).unwrap(), int(2));
        assert_eq!(obd_mean(2, &rat(3, 4)).unwrap(), rat(3, 2));
        assert_eq!(obd_mean(1, &int(1)).unwrap(), int(1));
    }

    #[test]
    fn decompose_examples() {
        let d = lemma73_decompose(2, &rat(2, 3)).unwrap();
        assert_eq!((d.sum_r_f.clone(), d.obd_mean.clone(), d.delta.clone()), (rat(8, 9), rat(4, 3), rat(4, 9)));
        assert_eq!(d.tie_pair_count, 1);
        assert_eq!(d.case, TieCase::Ties);
        assert!(d.claim_holds);
        let d = lemma73_decompose(3, &rat(1, 2)).unwrap();
        assert_eq!(d.delta, rat(1, 2));
        assert!(d.claim_holds);
        let d = lemma73_decompose(4, &int(1)).unwrap();
        assert_eq!((d.sum_r_f.clone(), d.obd_mean.clone()), (int(4), int(4)));
        assert_eq!(d.case, TieCase::One);
        assert!(d.claim_holds);
    }

    // the central mass has no partner at p = 1/2 when n is even
    #[test]
    fn even_n_half_delta() {
        for n in 1..=20u64 {
            let d = lemma73_decompose(n, &rat(1, 2)).unwrap();
            assert_eq!(d.delta, delta_half(n));
            let deficit = &d.delta - rat(1, 2);
            if n % 2 == 0 {
                let center = Rational::new(binomial(n, n / 2), BigInt::one() << n);
                assert_eq!(deficit, -center / int(2));
            } else {
                assert!(deficit.is_zero());
            }
        }
        assert_eq!(lemma73_decompose(2, &rat(1, 2)).unwrap().sum_r_f, int(1));
        assert_eq!(obd_mean(2, &rat(1, 2)).unwrap(), rat(5, 4));
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(obd_mean_half_closed_form(3), int(2));
        assert_eq!(obd_mean_half_closed_form(1), rat(1, 2));
        assert_eq!(obd_mean_half_closed_form(4), int(3));
        assert_eq!(obd_mean(4, &rat(1, 2)).unwrap(), rat(45, 16));
        for n in 1..=30 {
            assert_eq!(obd_mean_half_corrected(n), obd_mean(n, &rat(1, 2)).unwrap(), "n = {n}");
        }
    }

    #[test]
    fn mode_examples() {
        assert_eq!(binomial_mode(4, &rat(1, 2)).unwrap(), vec![2]);
        assert_eq!(binomial_mode(3, &rat(1, 2)).unwrap(), vec![1, 2]);
        assert_eq!(binomial_mode(5, &rat(2, 3)).unwrap(), vec![3, 4]);
        assert_eq!(binomial_mode(5, &int(1)).unwrap(), vec![5]);
        assert_eq!(binomial_mode(5, &int(0)).unwrap(), vec![0]);
        for n in 1..=10u64 {
            for p in [rat(1, 2), rat(2, 3), rat(5, 7), rat(9, 10), rat(1, 11)] {
                let f = binomial_masses(n, &p);
                let top = obd(n, &p).unwrap().sorted_masses[n as usize].clone();
                for m in binomial_mode(n, &p).unwrap() {
                    assert_eq!(f[m as usize], top);
                }
            }
        }
    }

    #[test]
    fn sweep_examples() {
        let grid = vec![rat(1, 2), rat(5, 8), rat(3, 4), rat(7, 8), int(1)];
        let r = conjectures7x_sweep(3, &grid).unwrap();
        assert!(r.mean_above_half && r.mean_increasing && r.rank_sum_holds);
        // P[X~ <= 1] is 1/4 at p = 1/2 but 152/512 at p = 5/8
        assert!(!r.stochastic_increasing);
        let o = obd(3, &rat(5, 8)).unwrap();
        assert_eq!(o.cdf()[1], rat(152, 512));
        let first = &r.majorization_violations[0];
        assert_eq!((first.p_lo.clone(), first.p_hi.clone()), (rat(1, 2), rat(5, 8)));
        assert_eq!(r.majorization_violations.len(), 2);
        assert!(!r.passed);
        let r = conjectures7x_sweep(1, &conjecture7x_grid(1, 16)).unwrap();
        assert!(r.passed);
        let r = conjectures7x_sweep(5, &conjecture7x_grid(5, 128)).unwrap();
        assert!(r.points.len() >= 65);
        assert!(conjectures7x_sweep(3, &[rat(1, 2), rat(3, 4)]).is_err());
    }

    #[test]
    fn mean_not_monotone() {
        // below the first crossing the sorted order is f0 < f3 < f1 < f2 and
        // f3 + 2 f1 + 3 f2 has negative slope near p = 0.63
        let (a, b) = (obd_mean(3, &rat(31, 50)).unwrap(), obd_mean(3, &rat(6339, 10000)).unwrap());
        assert_eq!(a, rat(261268, 125000));
        assert!(b < a);
        let r = conjectures7x_sweep(3, &[rat(1, 2), rat(31, 50), rat(6339, 10000), int(1)]).unwrap();
        assert!(r.mean_above_half && !r.mean_increasing);
        assert_eq!(r.mean_increasing_violations[0].p_lo, rat(31, 50));
    }

    #[test]
    fn minimum_obd_mass() {
        for n in 1..=8u64 {
            for p in [rat(1, 2), rat(3, 5), rat(7, 8)] {
                let o = obd(n, &p).unwrap();
                assert_eq!(o.sorted_masses[0], crate::exactnum::pow_rational(&(int(1) - &p), n as u32));
            }
        }
    }
}
