//! The integer simplex `S_{k,n}`, the multinomial family on it, and the
//! uniform pmf that sits outside that family.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{binomial, factorial, format_rational, int, parse_rational, serde_rational, serde_rational_vec};
use crate::scalar::{powu, Scalar};
use crate::Rational;

pub const DEFAULT_MAX_OUTCOMES: u64 = 1_000_000;
pub const DEFAULT_MAX_REPEATED: u64 = 10_000_000;

static MAX_OUTCOMES: AtomicU64 = AtomicU64::new(DEFAULT_MAX_OUTCOMES);
static MAX_REPEATED: AtomicU64 = AtomicU64::new(DEFAULT_MAX_REPEATED);

/// Process-wide cap on `|S_{k,n}|` for single-observation enumeration.
pub fn max_outcomes() -> u64 {
    MAX_OUTCOMES.load(AtomicOrdering::Relaxed)
}

pub fn set_max_outcomes(cap: u64) {
    MAX_OUTCOMES.store(cap, AtomicOrdering::Relaxed);
}

/// Process-wide cap on `|S_{k,n}|^r` for repeated-observation enumeration.
pub fn max_repeated() -> u64 {
    MAX_REPEATED.load(AtomicOrdering::Relaxed)
}

pub fn set_max_repeated(cap: u64) {
    MAX_REPEATED.store(cap, AtomicOrdering::Relaxed);
}

pub(crate) fn check_cap(cardinality: &BigInt, cap: u64) -> Result<()> {
    if *cardinality > BigInt::from(cap) {
        return Err(Error::SpaceTooLarge { cardinality: cardinality.to_string(), cap });
    }
    Ok(())
}

/// A point of `S_{k,n}`: `k` nonnegative cell counts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CellCounts(Vec<u32>);

impl CellCounts {
    pub fn new(counts: Vec<u32>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::InvalidInput("cell counts need at least one cell".into()));
        }
        Ok(Self(counts))
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    pub fn n(&self) -> u64 {
        self.0.iter().map(|&c| c as u64).sum()
    }

    /// Applies a permutation: result cell `i` is input cell `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self(perm.iter().map(|&i| self.0[i]).collect())
    }
}

impl fmt::Display for CellCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl FromStr for CellCounts {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches(['(', '[']).trim_end_matches([')', ']']);
        let counts = s
            .split(',')
            .map(|c| c.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad count '{c}'"))))
            .collect::<Result<Vec<_>>>()?;
        CellCounts::new(counts)
    }
}

/// A point of the probability simplex `P_k` with exact coordinates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProbVector(#[serde(with = "serde_rational_vec")] Vec<Rational>);

impl ProbVector {
    pub fn new(probs: Vec<Rational>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidInput("probability vector is empty".into()));
        }
        if probs.iter().any(|p| p.is_negative() || *p > Rational::one()) {
            return Err(Error::InvalidInput("probabilities must lie in [0, 1]".into()));
        }
        let total: Rational = probs.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidInput(format!(
                "probabilities sum to {}, not 1",
                format_rational(&total)
            )));
        }
        Ok(Self(probs))
    }

    /// The equal-cell-probability point `(1/k, ..., 1/k)`.
    pub fn ecp(k: usize) -> Self {
        Self(vec![Rational::new(BigInt::one(), BigInt::from(k)); k])
    }

    /// `(p, 1 - p)`.
    pub fn binomial(p: Rational) -> Result<Self> {
        let q = Rational::one() - &p;
        Self::new(vec![p, q])
    }

    /// The extreme point with all mass on `cell`.
    pub fn vertex(k: usize, cell: usize) -> Self {
        let mut v = vec![Rational::zero(); k];
        v[cell] = Rational::one();
        Self(v)
    }

    pub fn probs(&self) -> &[Rational] {
        &self.0
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    pub fn is_ecp(&self) -> bool {
        *self == Self::ecp(self.k())
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self(perm.iter().map(|&i| self.0[i].clone()).collect())
    }
}

impl fmt::Display for ProbVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(format_rational).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl FromStr for ProbVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches(['(', '[']).trim_end_matches([')', ']']);
        let probs = s.split(',').map(parse_rational).collect::<Result<Vec<_>>>()?;
        ProbVector::new(probs)
    }
}

/// `|S_{k,n}| = C(n+k-1, k-1)`.
pub fn simplex_size(k: usize, n: u64) -> BigInt {
    assert!(k >= 1, "k must be at least 1");
    binomial(n + k as u64 - 1, k as u64 - 1)
}

/// All of `S_{k,n}` in lexicographic order, subject to the process-wide cap.
pub fn enumerate_simplex(k: usize, n: u64) -> Result<Vec<CellCounts>> {
    enumerate_simplex_capped(k, n, max_outcomes())
}

pub fn enumerate_simplex_capped(k: usize, n: u64, cap: u64) -> Result<Vec<CellCounts>> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    check_cap(&simplex_size(k, n), cap)?;
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fill(k, n as u32, &mut current, &mut out);
    Ok(out)
}

fn fill(cells_left: usize, remaining: u32, current: &mut Vec<u32>, out: &mut Vec<CellCounts>) {
    if cells_left == 1 {
        current.push(remaining);
        out.push(CellCounts(current.clone()));
        current.pop();
        return;
    }
    for first in 0..=remaining {
        current.push(first);
        fill(cells_left - 1, remaining - first, current, out);
        current.pop();
    }
}

/// `n! / prod x_j!`.
pub fn multinomial_coeff(x: &CellCounts) -> BigInt {
    let denom = x.counts().iter().fold(BigInt::one(), |acc, &c| acc * factorial(c as u64));
    factorial(x.n()) / denom
}

/// Multinomial coefficient built up in the scalar type itself, as a running
/// product of ratios so it stays exact for rationals and stable for floats.
pub fn multinomial_coeff_in<T: Scalar>(x: &CellCounts) -> T {
    let mut acc = T::one();
    let mut m = 0u64;
    for &c in x.counts() {
        for i in 1..=c as u64 {
            m += 1;
            acc = acc * T::from_count(m) / T::from_count(i);
        }
    }
    acc
}

/// `f_p(x) = C(n, x) prod p_j^{x_j}` with `0^0 = 1`.
pub fn pmf_multinomial<T: Scalar>(p: &[T], x: &CellCounts) -> T {
    assert_eq!(p.len(), x.k(), "probability vector and cell counts differ in length");
    let mut acc = multinomial_coeff_in::<T>(x);
    for (pj, &xj) in p.iter().zip(x.counts()) {
        acc = acc * powu(pj, xj);
    }
    acc
}

/// Equal-cell-probability mass `C(n, x) / k^n`.
pub fn pmf_ecp(k: usize, n: u64, x: &CellCounts) -> Rational {
    assert_eq!(x.k(), k);
    assert_eq!(x.n(), n);
    Rational::new(multinomial_coeff(x), BigInt::from(k).pow(n as u32))
}

/// Uniform mass `1 / C(n+k-1, k-1)`.
pub fn pmf_uniform(k: usize, n: u64) -> Rational {
    Rational::new(BigInt::one(), simplex_size(k, n))
}

/// Exact pmf over `S_{k,n}` in lexicographic outcome order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PmfTable {
    pub k: usize,
    pub n: u64,
    pub outcomes: Vec<CellCounts>,
    #[serde(with = "serde_rational_vec")]
    pub masses: Vec<Rational>,
}

impl PmfTable {
    pub fn from_fn(k: usize, n: u64, mass: impl Fn(&CellCounts) -> Rational) -> Result<Self> {
        let outcomes = enumerate_simplex(k, n)?;
        let masses = outcomes.iter().map(mass).collect();
        Ok(Self { k, n, outcomes, masses })
    }

    pub fn multinomial(p: &ProbVector, n: u64) -> Result<Self> {
        Self::from_fn(p.k(), n, |x| pmf_multinomial(p.probs(), x))
    }

    pub fn ecp(k: usize, n: u64) -> Result<Self> {
        Self::from_fn(k, n, |x| pmf_ecp(k, n, x))
    }

    pub fn uniform(k: usize, n: u64) -> Result<Self> {
        let u = pmf_uniform(k, n);
        Self::from_fn(k, n, |_| u.clone())
    }

    pub fn total(&self) -> Rational {
        self.masses.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }
}

/// The two-step argument that no multinomial pmf is uniform on `S_{k,n}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniformWitness {
    pub k: usize,
    pub n: u64,
    /// Equal masses at the corners `(0,..,n,..,0)` force this `p`.
    pub forced_p: ProbVector,
    pub corner: CellCounts,
    #[serde(with = "serde_rational")]
    pub corner_mass: Rational,
    pub neighbour: CellCounts,
    #[serde(with = "serde_rational")]
    pub neighbour_mass: Rational,
    #[serde(with = "serde_rational")]
    pub uniform_mass: Rational,
    /// Equality at corner and neighbour would need `p_1 = n p_2`; this is
    /// the value of `p_1 / p_2` actually forced, which is 1.
    #[serde(with = "serde_rational")]
    pub required_ratio: Rational,
    #[serde(with = "serde_rational")]
    pub forced_ratio: Rational,
    pub contradiction: bool,
}

pub fn uniform_not_in_family_witness(k: usize, n: u64) -> Result<UniformWitness> {
    if k < 2 || n < 2 {
        return Err(Error::NotApplicable(format!(
            "the multinomial family is degenerate for k = {k}, n = {n}"
        )));
    }
    let forced_p = ProbVector::ecp(k);
    let mut corner = vec![0u32; k];
    corner[0] = n as u32;
    let corner = CellCounts(corner);
    let mut neighbour = vec![0u32; k];
    neighbour[0] = n as u32 - 1;
    neighbour[1] = 1;
    let neighbour = CellCounts(neighbour);
    let corner_mass = pmf_multinomial(forced_p.probs(), &corner);
    let neighbour_mass = pmf_multinomial(forced_p.probs(), &neighbour);
    let required_ratio = int(n);
    let forced_ratio = &forced_p.probs()[0] / &forced_p.probs()[1];
    Ok(UniformWitness {
        k,
        n,
        contradiction: corner_mass != neighbour_mass && required_ratio != forced_ratio,
        forced_p,
        corner,
        corner_mass,
        neighbour,
        neighbour_mass,
        uniform_mass: pmf_uniform(k, n),
        required_ratio,
        forced_ratio,
    })
}

/// Closed form of `C(n,x) * E_nu[prod p_j^{x_j}]` for `nu` uniform on
/// `P_k`, paired with `1 / |S_{k,n}|`. The two always agree.
pub fn dirichlet_mixture_check(k: usize, n: u64, x: &CellCounts) -> (Rational, Rational) {
    assert_eq!(x.k(), k);
    assert_eq!(x.n(), n);
    let prod_fact = x.counts().iter().fold(BigInt::one(), |acc, &c| acc * factorial(c as u64));
    let integral = Rational::new(
        factorial(k as u64 - 1) * prod_fact,
        factorial(n + k as u64 - 1),
    );
    let lhs = Rational::from_integer(multinomial_coeff(x)) * integral;
    (lhs, pmf_uniform(k, n))
}

/// Cardinality as `u64` when it fits.
pub fn simplex_size_u64(k: usize, n: u64) -> Option<u64> {
    simplex_size(k, n).to_u64()
}
