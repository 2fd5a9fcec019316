//! Likelihood ratio test of the composite multinomial null against the
//! uniform alternative. The statistic is `L(x) = prod x_j! / x_j^{x_j}`;
//! its p-value is the ecp tail, which is the supremum over the null by
//! Schur-concavity.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{binomial, serde_rational};
use crate::majorization::{chain_coords, check_schur_monotone, Direction, SchurReport};
use crate::scalar::Scalar;
use crate::simplex::{enumerate_simplex, pmf_ecp, pmf_multinomial, CellCounts, ProbVector};
use crate::Rational;

/// `L(x)` together with the outcome it was computed for.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LStat {
    #[serde(rename = "L", with = "serde_rational")]
    pub value: Rational,
    pub outcome: CellCounts,
}

/// `prod_j x_j! / x_j^{x_j}` in any scalar type, `0^0 = 1`.
pub fn lrt_value<T: Scalar>(x: &CellCounts) -> T {
    let mut acc = T::one();
    for &c in x.counts() {
        let c_t = T::from_count(c as u64);
        // x!/x^x = prod_{i=1..x} i/x
        for i in 1..=c as u64 {
            acc = acc * T::from_count(i) / c_t.clone();
        }
    }
    acc
}

pub fn lrt_statistic(x: &CellCounts) -> LStat {
    LStat { value: lrt_value(x), outcome: x.clone() }
}

/// `P_ecp[L(X) >= L(x0)]`.
pub fn lrt_p_value(x0: &CellCounts) -> Result<Rational> {
    let (k, n) = (x0.k(), x0.n());
    let l0: Rational = lrt_value(x0);
    Ok(enumerate_simplex(k, n)?
        .iter()
        .filter(|x| lrt_value::<Rational>(x) >= l0)
        .map(|x| pmf_ecp(k, n, x))
        .sum())
}

/// Binomial form: `P[|2X - n| <= |2 x10 - n|]` for `X ~ Bin(n, 1/2)`.
pub fn lrt_p_value_binomial(x10: u64, n: u64) -> Result<Rational> {
    if x10 > n {
        return Err(Error::InvalidInput(format!("x10 = {x10} exceeds n = {n}")));
    }
    let dev = |x: u64| (2 * x as i64 - n as i64).abs();
    let hits: BigInt = (0..=n).filter(|&x| dev(x) <= dev(x10)).map(|x| binomial(n, x)).sum();
    Ok(Rational::new(hits, BigInt::one() << n))
}

/// Moving one count from cell 1 to cell 2 when `x1 <= x2` cannot raise `L`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TStepReport {
    pub from: CellCounts,
    pub to: CellCounts,
    #[serde(with = "serde_rational")]
    pub l_from: Rational,
    #[serde(with = "serde_rational")]
    pub l_to: Rational,
    pub passed: bool,
}

pub fn check_ttransform_step(x: &CellCounts) -> Result<TStepReport> {
    let c = x.counts();
    if c.len() < 2 {
        return Err(Error::NotApplicable("need at least two cells".into()));
    }
    if c[0] == 0 {
        return Err(Error::InvalidInput("first cell must be positive".into()));
    }
    if c[0] > c[1] {
        return Err(Error::InvalidInput("step needs x1 <= x2".into()));
    }
    let mut moved = c.to_vec();
    moved[0] -= 1;
    moved[1] += 1;
    let to = CellCounts::new(moved)?;
    let l_from: Rational = lrt_value(x);
    let l_to: Rational = lrt_value(&to);
    Ok(TStepReport { from: x.clone(), to, passed: l_to <= l_from, l_from, l_to })
}

/// Outcomes of `S_{k,n}` with a per-outcome statistic, computed once and
/// reused along every chain.
struct Indexed {
    outcomes: Vec<CellCounts>,
    selected: Vec<bool>,
}

impl Indexed {
    fn tail(&self, p: &[Rational]) -> Rational {
        self.outcomes
            .iter()
            .zip(&self.selected)
            .filter(|(_, &s)| s)
            .map(|(x, _)| pmf_multinomial(p, x))
            .sum()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainCheckReport {
    pub k: usize,
    pub n: u64,
    #[serde(with = "serde_rational")]
    pub c: Rational,
    pub chains: Vec<SchurReport<Rational>>,
    /// The ecp value, which every chain point is compared against.
    #[serde(with = "serde_rational")]
    pub ecp_value: Rational,
    /// Every tested `p` sits on the correct side of `p_ecp`.
    pub ecp_bound_holds: bool,
    pub passed: bool,
}

fn chain_check(
    k: usize,
    n: u64,
    c: &Rational,
    chains: &[Vec<ProbVector>],
    select: impl Fn(&CellCounts) -> bool,
    direction: Direction,
) -> Result<ChainCheckReport> {
    if let Some(p) = chains.iter().flatten().find(|p| p.k() != k) {
        return Err(Error::DimensionMismatch(format!("chain point {p} does not have {k} cells")));
    }
    let outcomes = enumerate_simplex(k, n)?;
    let selected = outcomes.iter().map(&select).collect();
    let idx = Indexed { outcomes, selected };
    let ecp_value = idx.tail(ProbVector::ecp(k).probs());
    let mut reports = Vec::with_capacity(chains.len());
    let mut bound = true;
    for chain in chains {
        let r = check_schur_monotone(|p: &[Rational]| idx.tail(p), &chain_coords(chain), direction)?;
        bound &= r.values.iter().all(|v| match direction {
            Direction::Convex => *v >= ecp_value,
            Direction::Concave => *v <= ecp_value,
        });
        reports.push(r);
    }
    Ok(ChainCheckReport {
        k,
        n,
        c: c.clone(),
        passed: bound && reports.iter().all(|r| r.passed),
        chains: reports,
        ecp_value,
        ecp_bound_holds: bound,
    })
}

/// `p -> P_p[f_ecp(X) <= c]` is nondecreasing up each chain, and no point
/// falls below its ecp value.
pub fn prop41_check(k: usize, n: u64, c: &Rational, chains: &[Vec<ProbVector>]) -> Result<ChainCheckReport> {
    chain_check(k, n, c, chains, |x| pmf_ecp(k, n, x) <= *c, Direction::Convex)
}

/// `p -> P_p[L(X) >= c]` is nonincreasing up each chain, and no point
/// exceeds its ecp value.
pub fn prop42_check(k: usize, n: u64, c: &Rational, chains: &[Vec<ProbVector>]) -> Result<ChainCheckReport> {
    chain_check(k, n, c, chains, |x| lrt_value::<Rational>(x) >= *c, Direction::Concave)
}

/// `count` distinct values picked at evenly spaced positions of the sorted
/// distinct values, ends included.
pub fn spanning_thresholds(values: &[Rational], count: usize) -> Vec<Rational> {
    let mut v = values.to_vec();
    v.sort();
    v.dedup();
    if v.is_empty() || count == 0 {
        return Vec::new();
    }
    if count == 1 || v.len() == 1 {
        return vec![v[0].clone()];
    }
    let mut out: Vec<Rational> =
        (0..count).map(|i| v[i * (v.len() - 1) / (count - 1)].clone()).collect();
    out.dedup();
    out
}

/// Distinct realized `L` values over `S_{k,n}`, ascending.
pub fn realized_l_values(k: usize, n: u64) -> Result<Vec<Rational>> {
    let mut v: Vec<Rational> = enumerate_simplex(k, n)?.iter().map(lrt_value).collect();
    v.sort();
    v.dedup();
    Ok(v)
}

/// Under `f_ecp`, `P[π_L(X) <= u] <= u` at every realized p-value `u`.
pub fn p_value_super_uniform(k: usize, n: u64) -> Result<bool> {
    let outcomes = enumerate_simplex(k, n)?;
    let pairs: Vec<(Rational, Rational)> = outcomes
        .iter()
        .map(|x| lrt_p_value(x).map(|pv| (pv, pmf_ecp(k, n, x))))
        .collect::<Result<_>>()?;
    Ok(pairs.iter().all(|(u, _)| {
        let mass: Rational = pairs.iter().filter(|(v, _)| v <= u).map(|(_, m)| m.clone()).sum();
        mass <= *u
    }))
}

/// Binomial `L` as a function of `x1` alone: `x1! (n-x1)! / (x1^x1 (n-x1)^(n-x1))`.
pub fn lrt_binomial_value(x1: u64, n: u64) -> Rational {
    let mut acc = Rational::one();
    for c in [x1, n - x1] {
        if c.is_zero() {
            continue;
        }
        let num = crate::exactnum::factorial(c);
        acc *= Rational::new(num, BigInt::from(c).pow(c as u32));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{factorial, int, rat};

    fn cc(v: &[u32]) -> CellCounts {
        CellCounts::new(v.to_vec()).unwrap()
    }

    fn pv(v: &[(i64, i64)]) -> ProbVector {
        ProbVector::new(v.iter().map(|&(a, b)| rat(a, b)).collect()).unwrap()
    }

    #[test]
    fn statistic_examples() {
        assert_eq!(lrt_statistic(&cc(&[2, 2])).value, rat(1, 4));
        assert_eq!(lrt_statistic(&cc(&[1, 3])).value, rat(2, 9));
        let n = 5u64;
        let corner = Rational::new(factorial(n), BigInt::from(n).pow(n as u32));
        assert_eq!(lrt_statistic(&cc(&[0, 5, 0])).value, corner);
        assert_eq!(lrt_value::<Rational>(&cc(&[0, 0])), int(1));
        let f: f64 = lrt_value(&cc(&[1, 3]));
        assert!((f - 2.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn p_value_examples() {
        assert_eq!(lrt_p_value(&cc(&[2, 2])).unwrap(), rat(3, 8));
        assert_eq!(lrt_p_value(&cc(&[0, 4])).unwrap(), int(1));
        assert_eq!(lrt_p_value(&cc(&[1, 3])).unwrap(), rat(7, 8));
        assert_eq!(lrt_p_value_binomial(1, 4).unwrap(), rat(14, 16));
        assert_eq!(lrt_p_value_binomial(2, 4).unwrap(), rat(6, 16));
        assert_eq!(lrt_p_value_binomial(0, 2).unwrap(), int(1));
        assert!(lrt_p_value_binomial(5, 4).is_err());
    }

    #[test]
    fn binomial_form_agrees() {
        for n in 0..=12u64 {
            for x in 0..=n {
                assert_eq!(lrt_binomial_value(x, n), lrt_statistic(&cc(&[x as u32, (n - x) as u32])).value);
            }
        }
    }

    #[test]
    fn tstep_examples() {
        let r = check_ttransform_step(&cc(&[2, 2])).unwrap();
        assert_eq!(r.l_to, rat(2, 9));
        assert!(r.passed);
        let r = check_ttransform_step(&cc(&[1, 1])).unwrap();
        assert_eq!((r.l_from.clone(), r.l_to.clone()), (int(1), rat(1, 2)));
        assert!(r.passed);
        assert!(check_ttransform_step(&cc(&[3, 3, 0])).unwrap().passed);
        assert!(check_ttransform_step(&cc(&[0, 3])).is_err());
        assert!(check_ttransform_step(&cc(&[3, 1])).is_err());
    }

    fn chain_two() -> Vec<ProbVector> {
        vec![ProbVector::ecp(2), pv(&[(2, 3), (1, 3)]), ProbVector::vertex(2, 0)]
    }

    #[test]
    fn ecp_mass_tail_chain_examples() {
        let r = prop41_check(2, 4, &rat(4, 16), &[chain_two()]).unwrap();
        assert!(r.passed);
        let r = prop41_check(2, 4, &int(1), &[chain_two()]).unwrap();
        assert!(r.chains[0].values.iter().all(|v| *v == int(1)));
        let r = prop41_check(2, 4, &rat(1, 32), &[chain_two()]).unwrap();
        assert!(r.chains[0].values.iter().all(Zero::is_zero));
    }

    #[test]
    fn lrt_tail_chain_examples() {
        let chain = vec![ProbVector::ecp(2), pv(&[(3, 4), (1, 4)]), ProbVector::vertex(2, 0)];
        let r = prop42_check(2, 4, &rat(1, 4), &[chain]).unwrap();
        assert!(r.passed);
        assert_eq!(r.chains[0].values[0], rat(6, 16));
        assert_eq!(r.chains[0].values[2], int(0));
        let r = prop42_check(2, 4, &rat(3, 32), &[chain_two()]).unwrap();
        assert!(r.chains[0].values.iter().all(|v| *v == int(1)));
        let chain = vec![ProbVector::ecp(3), pv(&[(1, 2), (1, 2), (0, 1)])];
        assert!(prop42_check(3, 3, &int(1), &[chain]).unwrap().passed);
    }

    #[test]
    fn corner_is_global_min() {
        for k in 1..=3 {
            for n in 1..=8u64 {
                let mut corner = vec![0u32; k];
                corner[0] = n as u32;
                let lmin: Rational = lrt_value(&cc(&corner));
                let vals = realized_l_values(k, n).unwrap();
                assert_eq!(vals[0], lmin);
            }
        }
    }

    #[test]
    fn super_uniform() {
        assert!(p_value_super_uniform(2, 6).unwrap());
        assert!(p_value_super_uniform(3, 4).unwrap());
    }

    #[test]
    fn thresholds_span_range() {
        let v = realized_l_values(2, 4).unwrap();
        let t = spanning_thresholds(&v, 5);
        assert_eq!(t.first(), v.first());
        assert_eq!(t.last(), v.last());
    }
}
