//! Rank counts `q_p(x)` for Binomial(n, p), the exact breakpoint ladder in
//! odds `t = p/(1-p)`, and checks of the expected p-value inequality and
//! the identities used around it.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{
    binomial, cmp_algebraic, format_rational, int, p_from_odds, pow_rational, rat, separating_bounds, serde_rational,
    to_f64, AlgebraicOdds, Odds,
};
use crate::pst::{epv_sum_of, tail_counts};
use crate::Rational;

/// `(q_p(0), ..., q_p(n))`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankProfile {
    pub n: u64,
    pub q: Vec<u64>,
}

impl fmt::Display for RankProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.q.iter().map(u64::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Values ordered exactly like `f_p(x)` in `x`.
fn mass_keys(n: u64, t: &Odds) -> Vec<Rational> {
    match t {
        Odds::Zero => (0..=n).map(|x| if x == 0 { int(1) } else { int(0) }).collect(),
        Odds::Infinite => (0..=n).map(|x| if x == n { int(1) } else { int(0) }).collect(),
        Odds::Finite(t) => {
            let d = t.root_degree();
            // C(n,x)^d base^x, the d-th power of C(n,x) t^x
            (0..=n)
                .map(|x| Rational::from_integer(binomial(n, x).pow(d)) * pow_rational(t.base(), x as u32))
                .collect()
        }
    }
}

pub fn q_profile(n: u64, t: &Odds) -> RankProfile {
    RankProfile { n, q: tail_counts(&mass_keys(n, t)) }
}

/// `q_{1/2}(x) = 1 + |n - 2x|`.
pub fn q_half(n: u64, x: u64) -> u64 {
    assert!(x <= n);
    1 + (n as i64 - 2 * x as i64).unsigned_abs()
}

fn check_p(p: &Rational) -> Result<()> {
    if *p < Rational::zero() || *p > Rational::one() {
        return Err(Error::InvalidInput(format!("p = {} outside [0, 1]", format_rational(p))));
    }
    Ok(())
}

/// `f_p(0), ..., f_p(n)`.
pub fn binomial_masses(n: u64, p: &Rational) -> Vec<Rational> {
    let q = Rational::one() - p;
    (0..=n)
        .map(|x| {
            Rational::from_integer(binomial(n, x)) * pow_rational(p, x as u32) * pow_rational(&q, (n - x) as u32)
        })
        .collect()
}

/// `sum_x q_p(x) f_p(x)`.
pub fn epv_sum(n: u64, p: &Rational) -> Result<Rational> {
    check_p(p)?;
    Ok(epv_sum_of(&binomial_masses(n, p)))
}

/// `1 + sum_x |n - 2x| f_{1/2}(x)`, the value at `p = 1/2`.
pub fn epv_sum_half(n: u64) -> Rational {
    let num: BigInt = (0..=n).map(|x| BigInt::from(q_half(n, x)) * binomial(n, x)).sum();
    Rational::new(num, BigInt::one() << n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RowKind {
    Point,
    Interval,
}

/// One row of a ladder: a single odds value, or the open interval between
/// two consecutive ones (the last interval also contains `t = ∞`).
#[derive(Debug, Clone, Serialize)]
pub struct LadderRow {
    pub kind: RowKind,
    /// Canonical text, parseable back into odds.
    pub t_repr: String,
    pub p_repr: String,
    /// Compact form used in tables, e.g. `3^(1/2)`.
    pub t_pretty: String,
    pub q: Vec<u64>,
    #[serde(skip)]
    pub lower: AlgebraicOdds,
    /// `None` for the unbounded last interval.
    #[serde(skip)]
    pub upper: Option<AlgebraicOdds>,
}

impl LadderRow {
    pub fn profile(&self, n: u64) -> RankProfile {
        RankProfile { n, q: self.q.clone() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BreakpointLadder {
    pub n: u64,
    pub breakpoints: Vec<AlgebraicOdds>,
    pub rows: Vec<LadderRow>,
}

impl BreakpointLadder {
    pub fn point_profiles(&self) -> Vec<RankProfile> {
        self.rows.iter().filter(|r| r.kind == RowKind::Point).map(|r| r.profile(self.n)).collect()
    }

    pub fn interval_profiles(&self) -> Vec<RankProfile> {
        self.rows.iter().filter(|r| r.kind == RowKind::Interval).map(|r| r.profile(self.n)).collect()
    }
}

fn rational_text(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Canonical odds text: `u/v` when rational, `(u/v)^(1/d)` otherwise.
pub fn odds_repr(t: &AlgebraicOdds) -> String {
    match t.as_rational() {
        Some(r) => format_rational(&r),
        None => t.to_string(),
    }
}

/// Compact odds text: `3/2`, `3^(1/2)`, `(3/2)^(1/3)`.
pub fn odds_pretty(t: &AlgebraicOdds) -> String {
    match t.as_rational() {
        Some(r) => rational_text(&r),
        None if t.base().denom().is_one() => format!("{}^(1/{})", t.base().numer(), t.root_degree()),
        None => format!("({})^(1/{})", rational_text(t.base()), t.root_degree()),
    }
}

fn p_repr_of(t: &AlgebraicOdds) -> String {
    match t.as_rational() {
        Some(r) => format_rational(&p_from_odds(&r)),
        None => {
            let s = t.to_string();
            format!("{s}/(1+{s})")
        }
    }
}

/// All odds `t > 1` at which two masses tie, one per real value, keeping
/// the smallest root degree among equal representations.
pub fn candidate_breakpoints(n: u64) -> Vec<AlgebraicOdds> {
    let mut cands = Vec::new();
    for x in 0..=n {
        for y in x + 1..=n {
            let (cx, cy) = (binomial(n, x), binomial(n, y));
            if cx > cy {
                let base = Rational::new(cx, cy);
                cands.push(AlgebraicOdds::new(base, (y - x) as u32).expect("positive base"));
            }
        }
    }
    cands.sort_by(|a, b| cmp_algebraic(a, b).then(a.root_degree().cmp(&b.root_degree())));
    cands.dedup_by(|later, earlier| cmp_algebraic(later, earlier) == Ordering::Equal);
    cands
}

/// A rational strictly inside `(a, b)`; `b = None` means `+∞`.
pub fn interior_odds(a: &AlgebraicOdds, b: Option<&AlgebraicOdds>) -> Rational {
    match b {
        Some(b) => {
            let (lo, hi) = separating_bounds(a, b);
            (lo + hi) / int(2)
        }
        None => a.bracket(16).1 + int(1),
    }
}

/// `count` rationals `p` strictly inside the region `(a, b)` in odds, evenly
/// spaced in `p`. The unbounded region also includes `p = 1`.
pub fn region_samples(a: &AlgebraicOdds, b: Option<&AlgebraicOdds>, count: u32) -> Vec<Rational> {
    match b {
        Some(b) => {
            let (lo, hi) = separating_bounds(a, b);
            let (p_lo, p_hi) = (p_from_odds(&lo), p_from_odds(&hi));
            let step = (&p_hi - &p_lo) / int(count as u64 + 1);
            (1..=count).map(|j| &p_lo + &step * int(j as u64)).collect()
        }
        None => {
            let p_lo = p_from_odds(&a.bracket(16).1);
            let step = (Rational::one() - &p_lo) / int(count as u64);
            (1..=count).map(|j| &p_lo + &step * int(j as u64)).collect()
        }
    }
}

fn interval_row(n: u64, a: &AlgebraicOdds, b: Option<&AlgebraicOdds>) -> LadderRow {
    let sample = interior_odds(a, b);
    let q = q_profile(n, &Odds::Finite(AlgebraicOdds::rational(sample).unwrap())).q;
    let (t_repr, p_repr, t_pretty) = match b {
        Some(b) => (
            format!("({}, {})", odds_repr(a), odds_repr(b)),
            format!("({}, {})", p_repr_of(a), p_repr_of(b)),
            format!("({}, {})", odds_pretty(a), odds_pretty(b)),
        ),
        None => (
            format!("({}, inf]", odds_repr(a)),
            format!("({}, 1/1]", p_repr_of(a)),
            format!("({}, inf]", odds_pretty(a)),
        ),
    };
    LadderRow { kind: RowKind::Interval, t_repr, p_repr, t_pretty, q, lower: a.clone(), upper: b.cloned() }
}

fn point_row(n: u64, t: &AlgebraicOdds) -> LadderRow {
    LadderRow {
        kind: RowKind::Point,
        t_repr: odds_repr(t),
        p_repr: p_repr_of(t),
        t_pretty: odds_pretty(t),
        q: q_profile(n, &Odds::Finite(t.clone())).q,
        lower: t.clone(),
        upper: Some(t.clone()),
    }
}

/// Exact rank profiles on `t >= 1`: the point `t = 1`, then alternating
/// open intervals and breakpoints, ending with `(last, ∞]`. Candidate
/// crossings that leave the profile unchanged on both sides are merged away.
pub fn breakpoint_ladder(n: u64) -> Result<BreakpointLadder> {
    if n == 0 {
        return Err(Error::InvalidInput("ladder needs n >= 1".into()));
    }
    let one = AlgebraicOdds::one();
    let cands = candidate_breakpoints(n);
    let point_q: Vec<Vec<u64>> = cands.iter().map(|t| q_profile(n, &Odds::Finite(t.clone())).q).collect();
    let mut bounds: Vec<&AlgebraicOdds> = vec![&one];
    bounds.extend(cands.iter());
    let gap_q: Vec<Vec<u64>> = (0..bounds.len())
        .map(|i| {
            let sample = interior_odds(bounds[i], bounds.get(i + 1).copied());
            q_profile(n, &Odds::Finite(AlgebraicOdds::rational(sample).unwrap())).q
        })
        .collect();
    // candidate i sits between gaps i and i+1
    let kept: Vec<AlgebraicOdds> = cands
        .iter()
        .enumerate()
        .filter(|(i, _)| !(gap_q[*i] == point_q[*i] && point_q[*i] == gap_q[i + 1]))
        .map(|(_, t)| t.clone())
        .collect();

    let mut rows = vec![point_row(n, &one)];
    let mut prev = one.clone();
    for t in &kept {
        rows.push(interval_row(n, &prev, Some(t)));
        rows.push(point_row(n, t));
        prev = t.clone();
    }
    rows.push(interval_row(n, &prev, None));
    Ok(BreakpointLadder { n, breakpoints: kept, rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Undecided,
    /// The `t = 1` row, where both sides coincide by definition.
    Reference,
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleValue {
    #[serde(with = "serde_rational")]
    pub p: Rational,
    #[serde(with = "serde_rational")]
    pub epv_sum: Rational,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegionCheck {
    pub kind: RowKind,
    pub t_repr: String,
    pub q: Vec<u64>,
    pub status: CheckStatus,
    /// Smallest exact `lhs - epv_sum` over the rational samples.
    #[serde(serialize_with = "crate::report::serialize_opt_rational")]
    pub min_margin: Option<Rational>,
    pub samples: usize,
    /// Bits of odds precision needed to decide an irrational breakpoint.
    pub bits: Option<u32>,
    /// Rigorous upper bound on `epv_sum` at an irrational breakpoint.
    #[serde(serialize_with = "crate::report::serialize_opt_rational")]
    pub upper_bound: Option<Rational>,
    pub violations: Vec<SampleValue>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Conjecture51Report {
    pub n: u64,
    /// `1 + sum |n - 2x| f_{1/2}(x)`.
    #[serde(with = "serde_rational")]
    pub lhs: Rational,
    pub rows: Vec<RegionCheck>,
    pub violations: usize,
    pub undecided: usize,
    pub passed: bool,
}

/// Bounds on `sum q(x) f_p(x)` for `p` in `[p_lo, p_hi]` and a fixed profile.
fn epv_bounds(n: u64, q: &[u64], p_lo: &Rational, p_hi: &Rational) -> (Rational, Rational) {
    let (one_lo, one_hi) = (Rational::one() - p_hi, Rational::one() - p_lo);
    let mut lo = Rational::zero();
    let mut hi = Rational::zero();
    for x in 0..=n {
        let c = Rational::from_integer(binomial(n, x) * BigInt::from(q[x as usize]));
        let (ex, ey) = (x as u32, (n - x) as u32);
        lo += &c * pow_rational(p_lo, ex) * pow_rational(&one_lo, ey);
        hi += &c * pow_rational(p_hi, ex) * pow_rational(&one_hi, ey);
    }
    (lo, hi)
}

pub const DEFAULT_MAX_BITS: u32 = 4096;

pub fn conjecture51_region_check(n: u64, samples_per_region: u32) -> Result<Conjecture51Report> {
    conjecture51_region_check_with(n, samples_per_region, DEFAULT_MAX_BITS)
}

/// Checks `sum q_p f_p < 1 + sum |n-2x| f_{1/2}` on every ladder row with
/// `t > 1`. Interval rows use exact rational samples; rational breakpoints
/// are exact; irrational breakpoints use the breakpoint's own profile with
/// interval bounds refined up to `max_bits`, plus the two rational bracket
/// ends on either side.
pub fn conjecture51_region_check_with(n: u64, samples_per_region: u32, max_bits: u32) -> Result<Conjecture51Report> {
    if samples_per_region == 0 {
        return Err(Error::InvalidInput("need at least one sample per region".into()));
    }
    let ladder = breakpoint_ladder(n)?;
    let lhs = epv_sum_half(n);
    let mut rows = Vec::with_capacity(ladder.rows.len());
    for (i, row) in ladder.rows.iter().enumerate() {
        let mut check = RegionCheck {
            kind: row.kind,
            t_repr: row.t_repr.clone(),
            q: row.q.clone(),
            status: CheckStatus::Pass,
            min_margin: None,
            samples: 0,
            bits: None,
            upper_bound: None,
            violations: Vec::new(),
        };
        if i == 0 {
            check.status = CheckStatus::Reference;
            check.min_margin = Some(Rational::zero());
            rows.push(check);
            continue;
        }
        let mut ps: Vec<Rational> = Vec::new();
        match row.kind {
            RowKind::Interval => ps = region_samples(&row.lower, row.upper.as_ref(), samples_per_region),
            RowKind::Point => match row.lower.as_rational() {
                Some(t) => ps.push(p_from_odds(&t)),
                None => {
                    let mut bits = 16;
                    loop {
                        let (t_lo, t_hi) = row.lower.bracket(bits);
                        let (p_lo, p_hi) = (p_from_odds(&t_lo), p_from_odds(&t_hi));
                        let (lo, hi) = epv_bounds(n, &row.q, &p_lo, &p_hi);
                        if hi < lhs {
                            check.upper_bound = Some(hi);
                            check.bits = Some(bits);
                            ps.extend([p_lo, p_hi]);
                            break;
                        }
                        if lo >= lhs {
                            check.status = CheckStatus::Fail;
                            check.bits = Some(bits);
                            check.upper_bound = Some(hi);
                            break;
                        }
                        if bits >= max_bits {
                            check.status = CheckStatus::Undecided;
                            check.bits = Some(bits);
                            break;
                        }
                        bits = (bits * 2).min(max_bits);
                    }
                }
            },
        }
        for p in ps {
            let v = epv_sum(n, &p)?;
            let margin = &lhs - &v;
            if check.min_margin.as_ref().is_none_or(|m| margin < *m) {
                check.min_margin = Some(margin.clone());
            }
            if margin <= Rational::zero() {
                check.status = CheckStatus::Fail;
                check.violations.push(SampleValue { p, epv_sum: v });
            }
            check.samples += 1;
        }
        rows.push(check);
    }
    let violations = rows.iter().filter(|r| r.status == CheckStatus::Fail).count();
    let undecided = rows.iter().filter(|r| r.status == CheckStatus::Undecided).count();
    Ok(Conjecture51Report { n, lhs, rows, violations, undecided, passed: violations == 0 && undecided == 0 })
}

/// `sum_x |n - 2x| C(n, x)` and its closed form.
pub fn abs_moment_identity(n: u64) -> (BigInt, BigInt) {
    let lhs: BigInt = (0..=n)
        .map(|x| BigInt::from((n as i64 - 2 * x as i64).unsigned_abs()) * binomial(n, x))
        .sum();
    let rhs = if n % 2 == 0 {
        BigInt::from(n) * binomial(n, n / 2)
    } else {
        BigInt::from(2 * n) * binomial(n - 1, (n - 1) / 2)
    };
    (lhs, rhs)
}

#[derive(Debug, Clone, Serialize)]
pub struct KrafftReport {
    pub n: u64,
    /// `n C(n, n/2)^2`.
    pub lhs: String,
    /// `2^(2n-1)`.
    pub rhs: String,
    pub bound_holds: bool,
    /// `(n+1)^2 > 2n`, the squared form of `2^(n-1) sqrt(2/n) > 2^n/(n+1)`.
    pub consequent_holds: bool,
    /// `C(n, n/2) (n+1) > 2^n`.
    pub central_bound_holds: bool,
    pub passed: bool,
}

/// `C(n, n/2) >= 2^(n-1) sqrt(2/n)`, squared into integers.
pub fn krafft_bound_check(n: u64) -> Result<KrafftReport> {
    if n % 2 == 1 || n < 2 {
        return Err(Error::NotApplicable(format!("n = {n}; the central-coefficient bound needs even n >= 2")));
    }
    let c = binomial(n, n / 2);
    let lhs = BigInt::from(n) * &c * &c;
    let rhs = BigInt::one() << (2 * n - 1);
    let bound = lhs >= rhs;
    let consequent = (n + 1) * (n + 1) > 2 * n;
    let central = &c * BigInt::from(n + 1) > BigInt::one() << n;
    Ok(KrafftReport {
        n,
        lhs: lhs.to_string(),
        rhs: rhs.to_string(),
        bound_holds: bound,
        consequent_holds: consequent,
        central_bound_holds: central,
        passed: bound && consequent && central,
    })
}

/// `a_n(x) = (x / (n-x+1))^(1/(2x-n-1))`, the odds at which `f(x)` and
/// `f(n-x+1)` tie. Needs `2x > n + 1`.
pub fn a_n(n: u64, x: u64) -> AlgebraicOdds {
    assert!(2 * x > n + 1 && x <= n);
    AlgebraicOdds::new(rat(x as i64, (n - x + 1) as i64), (2 * x - n - 1) as u32).expect("positive")
}

/// First `x` with `2x - n - 1 > 0`.
fn x_start(n: u64) -> u64 {
    (n + 3) / 2
}

#[derive(Debug, Clone, Serialize)]
pub struct EpsilonReport {
    pub n: u64,
    pub a_check: AlgebraicOdds,
    pub argmin_x: u64,
    /// `(a - 1) / (2 (a + 1))`, rounded.
    pub eps: f64,
    /// Rational bounds on `eps`.
    #[serde(with = "serde_rational")]
    pub eps_lo: Rational,
    #[serde(with = "serde_rational")]
    pub eps_hi: Rational,
}

fn eps_of(a: &Rational) -> Rational {
    (a - Rational::one()) / (int(2) * (a + Rational::one()))
}

/// `ǎ_n = min a_n(x)` over `x = (n+3)/2..n` (odd) or `n/2+1..n` (even), and
/// `ε_n = (ǎ_n - 1) / (2(ǎ_n + 1))`.
pub fn epsilon_n(n: u64) -> Result<EpsilonReport> {
    if n < 3 {
        return Err(Error::NotApplicable(format!("n = {n}; needs n >= 3")));
    }
    let (argmin_x, a_check) = (x_start(n)..=n)
        .map(|x| (x, a_n(n, x)))
        .min_by(|a, b| cmp_algebraic(&a.1, &b.1))
        .expect("nonempty range");
    // eps is increasing in a
    let (lo, hi) = a_check.bracket(64);
    let (eps_lo, eps_hi) = (eps_of(&lo), eps_of(&hi));
    let eps = to_f64(&((&eps_lo + &eps_hi) / int(2)));
    Ok(EpsilonReport { n, a_check, argmin_x, eps, eps_lo, eps_hi })
}

#[derive(Debug, Clone, Serialize)]
pub struct Prop52Report {
    pub n: u64,
    /// `sum |n - 2x| f_{1/2}(x)`.
    #[serde(with = "serde_rational")]
    pub case1_lhs: Rational,
    /// `n (1 - p)` at `p = n/(n+1)`.
    #[serde(with = "serde_rational")]
    pub case1_rhs: Rational,
    pub case1_holds: bool,
    #[serde(with = "serde_rational")]
    pub case2_p: Rational,
    pub case2_profile: Vec<u64>,
    pub case2_expected: Vec<u64>,
    pub case2_pattern_holds: bool,
    #[serde(with = "serde_rational")]
    pub case2_epv_sum: Rational,
    #[serde(with = "serde_rational")]
    pub lhs: Rational,
    pub case2_strict_holds: bool,
    pub passed: bool,
}

/// `q_{1/2}(x)` for `x <= n/2`, one less above.
pub fn near_half_pattern(n: u64) -> Vec<u64> {
    (0..=n).map(|x| if x <= n / 2 { q_half(n, x) } else { q_half(n, x) - 1 }).collect()
}

/// Profile and strict inequality at a given `p` just above `1/2`.
pub fn prop52_case2_at(n: u64, p: &Rational) -> Result<(Vec<u64>, bool, Rational)> {
    check_p(p)?;
    let q = q_profile(n, &Odds::from_p(p)?).q;
    let v = epv_sum(n, p)?;
    Ok((q.clone(), q == near_half_pattern(n), v))
}

pub fn prop52_check(n: u64) -> Result<Prop52Report> {
    let eps = epsilon_n(n)?;
    let half_abs: BigInt = abs_moment_identity(n).0;
    let case1_lhs = Rational::new(half_abs, BigInt::one() << n);
    let case1_rhs = rat(n as i64, n as i64 + 1);
    // largest 1/2 + 2^-m below 1/2 + ε_n, found through odds
    let mut m = 2u32;
    let p = loop {
        let p = rat(1, 2) + Rational::new(BigInt::one(), BigInt::one() << m);
        let t = AlgebraicOdds::rational(crate::exactnum::odds_from_p(&p)?)?;
        if cmp_algebraic(&t, &eps.a_check) == Ordering::Less {
            break p;
        }
        m += 1;
    };
    let (profile, pattern, v) = prop52_case2_at(n, &p)?;
    let lhs = epv_sum_half(n);
    let strict = v < lhs;
    let case1 = case1_lhs > case1_rhs;
    Ok(Prop52Report {
        n,
        case1_holds: case1,
        case1_lhs,
        case1_rhs,
        case2_p: p,
        case2_profile: profile,
        case2_expected: near_half_pattern(n),
        case2_pattern_holds: pattern,
        case2_epv_sum: v,
        lhs,
        case2_strict_holds: strict,
        passed: case1 && pattern && strict,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdRow {
    pub n: u64,
    /// `((n+3)/(n-1))^(1/2)`.
    pub lhs: AlgebraicOdds,
    /// `n^(1/(n-1))`.
    pub rhs: AlgebraicOdds,
    pub ordering: String,
    /// The strict inequality `lhs < rhs`.
    pub holds: bool,
    /// What "holds for n <= 45, fails for n >= 47" predicts.
    pub claimed: bool,
    pub agrees: bool,
    /// At `n = 3` both ties concern the same pair `(1, 3)`.
    pub same_pair: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdScanReport {
    pub n_max: u64,
    pub rows: Vec<ThresholdRow>,
    pub agrees_everywhere: bool,
    pub disagreeing_n: Vec<u64>,
}

fn ordering_name(o: Ordering) -> &'static str {
    match o {
        Ordering::Less => "LT",
        Ordering::Equal => "EQ",
        Ordering::Greater => "GT",
    }
}

/// For odd `n`, whether the pair `((n-1)/2, (n+3)/2)` ties before the pair
/// `(1, n)` as `t` grows, decided exactly at degree `lcm(2, n-1)`.
pub fn first_pair_threshold_scan(n_max: u64) -> ThresholdScanReport {
    let mut rows = Vec::new();
    let mut n = 3;
    while n <= n_max {
        let lhs = AlgebraicOdds::new(rat(n as i64 + 3, n as i64 - 1), 2).unwrap();
        let rhs = AlgebraicOdds::new(int(n), (n - 1) as u32).unwrap();
        let o = cmp_algebraic(&lhs, &rhs);
        let holds = o == Ordering::Less;
        let claimed = n <= 45;
        rows.push(ThresholdRow {
            n,
            lhs,
            rhs,
            ordering: ordering_name(o).to_string(),
            holds,
            claimed,
            agrees: holds == claimed,
            same_pair: n == 3,
        });
        n += 2;
    }
    let disagreeing_n: Vec<u64> = rows.iter().filter(|r| !r.agrees).map(|r| r.n).collect();
    ThresholdScanReport { n_max, agrees_everywhere: disagreeing_n.is_empty(), rows, disagreeing_n }
}

#[derive(Debug, Clone, Serialize)]
pub struct Lemma61Report {
    pub n: usize,
    /// `x` paired with `D_x`.
    pub xs: Vec<usize>,
    #[serde(with = "crate::exactnum::serde_rational_vec")]
    pub d_x: Vec<Rational>,
    pub passed: bool,
}

/// `D_x = (2x-n-1)^{-1} sum_{m=n-x+2}^{x} d_m` (1-based `d`) is strictly
/// increasing for `x > (n+1)/2` whenever `d` is strictly convex.
pub fn lemma61_check(d: &[Rational]) -> Result<Lemma61Report> {
    let n = d.len();
    if n < 4 {
        return Err(Error::InvalidInput(format!("need at least 4 terms, got {n}")));
    }
    for i in 0..n - 2 {
        if &d[i + 2] - &d[i + 1] <= &d[i + 1] - &d[i] {
            return Err(Error::ConvexityViolation { index: i + 1 });
        }
    }
    let xs: Vec<usize> = (x_start(n as u64) as usize..=n).collect();
    let d_x: Vec<Rational> = xs
        .iter()
        .map(|&x| {
            let s: Rational = (n - x + 2..=x).map(|m| d[m - 1].clone()).sum();
            s / int((2 * x - n - 1) as u64)
        })
        .collect();
    let passed = d_x.windows(2).all(|w| w[0] < w[1]);
    Ok(Lemma61Report { n, xs, d_x, passed })
}

#[derive(Debug, Clone, Serialize)]
pub struct QMonotoneReport {
    pub n: u64,
    pub xs: Vec<u64>,
    pub q_values: Vec<AlgebraicOdds>,
    pub passed: bool,
}

/// For even `n`, `Q(x) = a_n(x)` strictly increases on `x = n/2+1..n`.
pub fn q_monotone_even_check(n: u64) -> Result<QMonotoneReport> {
    if n % 2 == 1 || n < 4 {
        return Err(Error::NotApplicable(format!("n = {n}; needs even n >= 4")));
    }
    let xs: Vec<u64> = (n / 2 + 1..=n).collect();
    let q_values: Vec<AlgebraicOdds> = xs.iter().map(|&x| a_n(n, x)).collect();
    let passed = q_values.windows(2).all(|w| cmp_algebraic(&w[0], &w[1]) == Ordering::Less);
    Ok(QMonotoneReport { n, xs, q_values, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn odds(base: Rational, d: u32) -> Odds {
        Odds::Finite(AlgebraicOdds::new(base, d).unwrap())
    }

    #[test]
    fn q_profile_examples() {
        assert_eq!(q_profile(3, &odds(int(1), 1)).q, vec![4, 2, 2, 4]);
        // 8/5 lies above 4^(1/3), so it sits in the following row
        assert_eq!(q_profile(4, &odds(rat(31, 20), 1)).q, vec![5, 3, 2, 1, 4]);
        assert_eq!(q_profile(4, &odds(rat(8, 5), 1)).q, vec![5, 4, 2, 1, 3]);
        assert_eq!(q_profile(5, &odds(int(2), 2)).q, vec![6, 4, 3, 1, 3, 5]);
        assert_eq!(q_profile(3, &Odds::Infinite).q, vec![4, 4, 4, 1]);
        assert_eq!(q_profile(3, &Odds::Zero).q, vec![1, 4, 4, 4]);
    }

    #[test]
    fn q_half_examples() {
        assert_eq!(q_half(3, 1), 2);
        assert_eq!(q_half(4, 2), 1);
        assert_eq!(q_half(5, 0), 6);
    }

    #[test]
    fn epv_sum_examples() {
        assert_eq!(epv_sum(3, &rat(1, 2)).unwrap(), rat(5, 2));
        assert_eq!(epv_sum(3, &int(1)).unwrap(), int(1));
        assert_eq!(epv_sum(3, &rat(4, 5)).unwrap(), rat(8, 5));
        assert_eq!(epv_sum_half(3), rat(5, 2));
        assert!(epv_sum(3, &rat(3, 2)).is_err());
    }

    #[test]
    fn ladder_breakpoints() {
        let l = breakpoint_ladder(3).unwrap();
        assert_eq!(l.breakpoints.iter().map(odds_pretty).collect::<Vec<_>>(), ["3^(1/2)", "3"]);
        let l = breakpoint_ladder(4).unwrap();
        assert_eq!(
            l.breakpoints.iter().map(odds_pretty).collect::<Vec<_>>(),
            ["3/2", "4^(1/3)", "6^(1/2)", "4"]
        );
        let l = breakpoint_ladder(5).unwrap();
        assert_eq!(
            l.breakpoints.iter().map(odds_pretty).collect::<Vec<_>>(),
            ["2^(1/2)", "5^(1/4)", "2", "10^(1/3)", "10^(1/2)", "5"]
        );
        assert_eq!(l.rows.len(), 14);
    }

    #[test]
    fn ladder_small_n() {
        let l = breakpoint_ladder(1).unwrap();
        assert_eq!(l.rows.len(), 2);
        assert_eq!(l.rows[1].q, vec![2, 1]);
        let l = breakpoint_ladder(2).unwrap();
        assert_eq!(l.breakpoints.len(), 1);
        assert!(breakpoint_ladder(0).is_err());
    }

    #[test]
    fn ladder_reprs() {
        let l = breakpoint_ladder(3).unwrap();
        assert_eq!(l.rows[0].t_repr, "1/1");
        assert_eq!(l.rows[0].p_repr, "1/2");
        assert_eq!(l.rows[1].t_pretty, "(1, 3^(1/2))");
        assert_eq!(l.rows[2].t_repr, "(3/1)^(1/2)");
        assert_eq!(l.rows[4].p_repr, "3/4");
        assert_eq!(l.rows[5].t_pretty, "(3, inf]");
        for r in &l.rows {
            if r.kind == RowKind::Point {
                let back: AlgebraicOdds = r.t_repr.parse().unwrap();
                assert_eq!(back, r.lower);
            }
        }
    }

    // Table 1 polynomials, the second with the stray symbol read as 2p^3
    #[test]
    fn table1_polynomials_pointwise() {
        let polys: [fn(&Rational) -> Rational; 6] = [
            |p| int(4) - int(6) * p + int(6) * p * p,
            |p| int(4) - int(6) * p + int(3) * p * p + int(2) * p * p * p,
            |p| int(4) - int(3) * p - int(3) * p * p + int(5) * p * p * p,
            |p| int(4) - int(3) * p - int(3) * p * p + int(4) * p * p * p,
            |p| int(4) - int(3) * p + p * p * p,
            |p| int(4) - int(3) * p,
        ];
        let l = breakpoint_ladder(3).unwrap();
        for (row, poly) in l.rows.iter().zip(polys) {
            let q = &row.q;
            let ps: Vec<Rational> = match row.kind {
                RowKind::Interval => region_samples(&row.lower, row.upper.as_ref(), 4),
                RowKind::Point => match row.lower.as_rational() {
                    Some(t) => vec![p_from_odds(&t)],
                    None => vec![],
                },
            };
            for p in ps {
                let direct: Rational = binomial_masses(3, &p)
                    .iter()
                    .zip(q)
                    .map(|(f, &qx)| f * int(qx))
                    .sum();
                assert_eq!(direct, poly(&p), "row {}", row.t_pretty);
            }
        }
    }

    #[test]
    fn strict_epv_inequality_small_n() {
        for n in 3..=5 {
            let r = conjecture51_region_check(n, 8).unwrap();
            assert!(r.passed, "n = {n}");
            assert_eq!(r.rows.len(), [6, 10, 14][(n - 3) as usize]);
        }
    }

    #[test]
    fn identity_examples() {
        assert_eq!(abs_moment_identity(4), (BigInt::from(24), BigInt::from(24)));
        assert_eq!(abs_moment_identity(3), (BigInt::from(12), BigInt::from(12)));
        assert_eq!(abs_moment_identity(1), (BigInt::from(2), BigInt::from(2)));
    }

    #[test]
    fn krafft_examples() {
        let r = krafft_bound_check(2).unwrap();
        assert_eq!((r.lhs.as_str(), r.rhs.as_str()), ("8", "8"));
        assert!(r.passed);
        let r = krafft_bound_check(4).unwrap();
        assert_eq!((r.lhs.as_str(), r.rhs.as_str()), ("144", "128"));
        let r = krafft_bound_check(10).unwrap();
        assert_eq!((r.lhs.as_str(), r.rhs.as_str()), ("635040", "524288"));
        assert!(matches!(krafft_bound_check(5), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn epsilon_examples() {
        let e = epsilon_n(5).unwrap();
        assert_eq!(e.a_check, AlgebraicOdds::new(int(2), 2).unwrap());
        assert!((e.eps - 0.085786).abs() < 1e-6);
        let e = epsilon_n(3).unwrap();
        assert_eq!(e.a_check, AlgebraicOdds::new(int(3), 2).unwrap());
        assert!((e.eps - 0.133975).abs() < 1e-6);
        let e = epsilon_n(4).unwrap();
        assert_eq!(e.a_check, AlgebraicOdds::rational(rat(3, 2)).unwrap());
        assert_eq!((e.eps_lo.clone(), e.eps_hi.clone()), (rat(1, 10), rat(1, 10)));
        assert!(e.eps_lo <= e.eps_hi);
    }

    #[test]
    fn near_half_profile_examples() {
        let r = prop52_check(3).unwrap();
        assert_eq!((r.case1_lhs.clone(), r.case1_rhs.clone()), (rat(3, 2), rat(3, 4)));
        assert!(r.passed);
        let (q, pattern, _) = prop52_case2_at(5, &(rat(1, 2) + rat(1, 32))).unwrap();
        assert_eq!(q, vec![6, 4, 2, 1, 3, 5]);
        assert!(pattern);
        let (q, pattern, _) = prop52_case2_at(4, &(rat(1, 2) + rat(1, 64))).unwrap();
        assert_eq!(q, vec![5, 3, 1, 2, 4]);
        assert!(pattern);
        for n in 3..=12 {
            assert!(prop52_check(n).unwrap().passed, "n = {n}");
        }
    }

    #[test]
    fn threshold_examples() {
        let r = first_pair_threshold_scan(7);
        assert_eq!(r.rows[0].ordering, "EQ");
        assert!(!r.rows[0].holds);
        assert!(r.rows[1].holds);
    }

    #[test]
    fn convexity_check_examples() {
        let sq: Vec<Rational> = (1..=6).map(|m| int(m * m)).collect();
        assert!(lemma61_check(&sq).unwrap().passed);
        let pw: Vec<Rational> = (1..=4).map(|m| int(1 << m)).collect();
        assert!(lemma61_check(&pw).unwrap().passed);
        let lin: Vec<Rational> = (1..=5).map(int).collect();
        assert!(matches!(lemma61_check(&lin), Err(Error::ConvexityViolation { .. })));
    }

    #[test]
    fn q_monotone_examples() {
        let r = q_monotone_even_check(4).unwrap();
        assert_eq!(r.q_values.len(), 2);
        assert!(r.passed);
        assert!(q_monotone_even_check(6).unwrap().passed);
        let r = q_monotone_even_check(10).unwrap();
        assert_eq!(r.q_values.len(), 5);
        assert!(r.passed);
        assert!(q_monotone_even_check(5).is_err());
    }
}
