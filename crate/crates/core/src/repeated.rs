//! Repeated multinomial observations: `r` independent rows in `S_{k,n}`.
//! Covers the joint likelihood ratio `L*`, its factorization into a
//! conditional part `V` and a column-sum part `L~`, the hypergeometric law
//! of a matrix given its column sums, and the two-part test built on them.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactnum::{format_rational, serde_rational, serde_rational_or_inf};
use crate::glrt::lrt_value;
use crate::majorization::{chain_coords, check_schur_monotone, majorizes, Direction, SchurReport};
use crate::simplex::{
    check_cap, enumerate_simplex, max_repeated, multinomial_coeff, pmf_ecp, pmf_multinomial, simplex_size, CellCounts,
    ProbVector,
};
use crate::Rational;

/// `r` rows of cell counts, all in the same `S_{k,n}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ObsMatrix {
    rows: Vec<CellCounts>,
}

impl ObsMatrix {
    pub fn new(rows: Vec<CellCounts>) -> Result<Self> {
        let first = rows.first().ok_or_else(|| Error::InvalidInput("need at least one row".into()))?;
        let (k, n) = (first.k(), first.n());
        if let Some(bad) = rows.iter().find(|r| r.k() != k || r.n() != n) {
            return Err(Error::DimensionMismatch(format!("row {bad} is not in S_({k},{n})")));
        }
        Ok(Self { rows })
    }

    pub fn from_counts(rows: &[Vec<u32>]) -> Result<Self> {
        Self::new(rows.iter().map(|r| CellCounts::new(r.clone())).collect::<Result<_>>()?)
    }

    pub fn rows(&self) -> &[CellCounts] {
        &self.rows
    }

    pub fn k(&self) -> usize {
        self.rows[0].k()
    }

    pub fn n(&self) -> u64 {
        self.rows[0].n()
    }

    pub fn r(&self) -> usize {
        self.rows.len()
    }

    pub fn column_sums(&self) -> ColumnSums {
        let mut s = vec![0u32; self.k()];
        for row in &self.rows {
            for (acc, &c) in s.iter_mut().zip(row.counts()) {
                *acc += c;
            }
        }
        ColumnSums(s)
    }

    /// Validates after deserialization, which bypasses [`ObsMatrix::new`].
    pub fn validated(self) -> Result<Self> {
        Self::new(self.rows)
    }
}

impl fmt::Display for ObsMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.rows.iter().map(|r| r.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Column totals `x_+`, a point of `S_{k, rn}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ColumnSums(Vec<u32>);

impl ColumnSums {
    pub fn new(sums: Vec<u32>) -> Result<Self> {
        if sums.is_empty() {
            return Err(Error::InvalidInput("column sums need at least one cell".into()));
        }
        Ok(Self(sums))
    }

    pub fn sums(&self) -> &[u32] {
        &self.0
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&c| c as u64).sum()
    }

    pub fn as_cells(&self) -> CellCounts {
        CellCounts::new(self.0.clone()).expect("nonempty")
    }
}

impl fmt::Display for ColumnSums {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.as_cells().fmt(f)
    }
}

fn check_repeated_cap(k: usize, n: u64, r: usize) -> Result<()> {
    check_cap(&simplex_size(k, n).pow(r as u32), max_repeated())
}

/// All of `S_{k,n}^r` in row-lexicographic order.
pub fn enumerate_obs(k: usize, n: u64, r: usize) -> Result<Vec<ObsMatrix>> {
    if r == 0 {
        return Err(Error::InvalidInput("need r >= 1".into()));
    }
    check_repeated_cap(k, n, r)?;
    let base = enumerate_simplex(k, n)?;
    let total = base.len().pow(r as u32);
    let mut out = Vec::with_capacity(total);
    let mut idx = vec![0usize; r];
    loop {
        out.push(ObsMatrix { rows: idx.iter().map(|&i| base[i].clone()).collect() });
        // odometer, last row fastest
        let mut pos = r;
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < base.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Matrices in `S_{k,n}^r` with column sums `xplus`, row-lexicographic.
pub fn fiber(n: u64, r: usize, xplus: &ColumnSums) -> Result<Vec<ObsMatrix>> {
    if xplus.total() != n * r as u64 {
        return Err(Error::DimensionMismatch(format!("column sums {xplus} do not total {r} x {n}")));
    }
    check_repeated_cap(xplus.sums().len(), n, r)?;
    let base = enumerate_simplex(xplus.sums().len(), n)?;
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(r);
    fill_fiber(&base, r, xplus.sums().to_vec(), &mut current, &mut out);
    Ok(out)
}

fn fill_fiber(base: &[CellCounts], rows_left: usize, remaining: Vec<u32>, cur: &mut Vec<CellCounts>, out: &mut Vec<ObsMatrix>) {
    if rows_left == 0 {
        out.push(ObsMatrix { rows: cur.clone() });
        return;
    }
    for row in base {
        if row.counts().iter().zip(&remaining).all(|(a, b)| a <= b) {
            let rest: Vec<u32> = remaining.iter().zip(row.counts()).map(|(b, a)| b - a).collect();
            cur.push(row.clone());
            fill_fiber(base, rows_left - 1, rest, cur, out);
            cur.pop();
        }
    }
}

/// Which null the joint pmf is taken under.
#[derive(Debug, Clone, PartialEq)]
pub enum JointModel {
    Multinomial(ProbVector),
    Ecp,
    Uniform,
}

pub fn joint_pmf(model: &JointModel, xmat: &ObsMatrix) -> Result<Rational> {
    let (k, n, r) = (xmat.k(), xmat.n(), xmat.r());
    Ok(match model {
        JointModel::Multinomial(p) => {
            if p.k() != k {
                return Err(Error::DimensionMismatch(format!("p has {} cells, rows have {k}", p.k())));
            }
            xmat.rows().iter().map(|x| pmf_multinomial(p.probs(), x)).product()
        }
        JointModel::Ecp => xmat.rows().iter().map(|x| pmf_ecp(k, n, x)).product(),
        JointModel::Uniform => Rational::new(BigInt::one(), simplex_size(k, n).pow(r as u32)),
    })
}

fn factorial_product(xmat: &ObsMatrix) -> BigInt {
    xmat.rows()
        .iter()
        .flat_map(|r| r.counts().iter())
        .map(|&c| crate::exactnum::factorial(c as u64))
        .product()
}

/// `L* = prod_ij x_ij! / prod_j x_+j^{x_+j}` with `0^0 = 1`.
pub fn lstar(xmat: &ObsMatrix) -> Rational {
    let den: BigInt = xmat.column_sums().sums().iter().map(|&c| BigInt::from(c).pow(c)).product();
    Rational::new(factorial_product(xmat), den)
}

/// `L~(x_+) = prod_j x_+j! / x_+j^{x_+j}`.
pub fn ltilde(xplus: &ColumnSums) -> Rational {
    lrt_value(&xplus.as_cells())
}

/// `V = prod_ij x_ij! / prod_j x_+j!`, so that `L* = V L~`.
pub fn v_statistic(xmat: &ObsMatrix) -> Rational {
    let den: BigInt = xmat.column_sums().sums().iter().map(|&c| crate::exactnum::factorial(c as u64)).product();
    Rational::new(factorial_product(xmat), den)
}

/// `P[X = xmat | X_+ = xplus] = prod_i C(n, x_i) / C(rn, x_+)`; zero off the fiber.
pub fn conditional_pmf(xmat: &ObsMatrix, xplus: &ColumnSums) -> Rational {
    if xmat.column_sums() != *xplus {
        return Rational::zero();
    }
    let num: BigInt = xmat.rows().iter().map(multinomial_coeff).product();
    Rational::new(num, multinomial_coeff(&xplus.as_cells()))
}

/// `P[L*(X) >= c | X_+ = xplus]`.
pub fn phi_c(n: u64, r: usize, xplus: &ColumnSums, c: &Rational) -> Result<Rational> {
    Ok(fiber(n, r, xplus)?
        .iter()
        .filter(|x| lstar(x) >= *c)
        .map(|x| conditional_pmf(x, xplus))
        .sum())
}

#[derive(Debug, Clone, Serialize)]
pub struct SchurPairViolation {
    /// The majorizing column sums.
    pub upper: ColumnSums,
    pub lower: ColumnSums,
    #[serde(with = "serde_rational")]
    pub phi_upper: Rational,
    #[serde(with = "serde_rational")]
    pub phi_lower: Rational,
}

#[derive(Debug, Clone, Serialize)]
pub struct PhiReport {
    pub k: usize,
    pub n: u64,
    pub r: usize,
    #[serde(with = "serde_rational")]
    pub c: Rational,
    pub xplus: Vec<ColumnSums>,
    #[serde(with = "crate::exactnum::serde_rational_vec")]
    pub phi: Vec<Rational>,
    /// Pairs where `x_+` majorizes `y_+` strictly yet `phi(x_+) > phi(y_+)`.
    pub schur_concavity_violations: Vec<SchurPairViolation>,
}

/// `phi_c` over every `x_+` in `S_{k, rn}`, with all strict majorization
/// pairs checked for Schur-concavity.
pub fn phi_table(k: usize, n: u64, r: usize, c: &Rational) -> Result<PhiReport> {
    let xs: Vec<ColumnSums> =
        enumerate_simplex(k, n * r as u64)?.into_iter().map(|x| ColumnSums(x.counts().to_vec())).collect();
    let phi: Vec<Rational> = xs.iter().map(|x| phi_c(n, r, x, c)).collect::<Result<_>>()?;
    let as_rat = |x: &ColumnSums| -> Vec<Rational> { x.sums().iter().map(|&v| Rational::from_integer(v.into())).collect() };
    let mut violations = Vec::new();
    for i in 0..xs.len() {
        for j in 0..xs.len() {
            let (a, b) = (as_rat(&xs[i]), as_rat(&xs[j]));
            // strict: a majorizes b but not the reverse
            if i != j && majorizes(&a, &b)? && !majorizes(&b, &a)? && phi[i] > phi[j] {
                violations.push(SchurPairViolation {
                    upper: xs[i].clone(),
                    lower: xs[j].clone(),
                    phi_upper: phi[i].clone(),
                    phi_lower: phi[j].clone(),
                });
            }
        }
    }
    Ok(PhiReport { k, n, r, c: c.clone(), xplus: xs, phi, schur_concavity_violations: violations })
}

/// `phi_c` at `x_+ = (0,4), (1,3), (2,2), (3,1), (4,0)` for `k = n = r = 2`.
pub fn counterexample_222(c: &Rational) -> Result<PhiReport> {
    phi_table(2, 2, 2, c)
}

fn serialize_threshold_map<S: Serializer>(
    m: &BTreeMap<ColumnSums, FiberThreshold>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(m.values())
}

#[derive(Debug, Clone, Serialize)]
pub struct FiberThreshold {
    pub xplus: ColumnSums,
    /// `None` (written `"inf"`) when no realized value meets the level.
    #[serde(with = "serde_rational_or_inf")]
    pub c_alpha: Option<Rational>,
    #[serde(with = "serde_rational")]
    pub tail: Rational,
}

#[derive(Debug, Clone, Serialize)]
pub struct HybridThresholds {
    pub k: usize,
    pub n: u64,
    pub r: usize,
    #[serde(with = "serde_rational")]
    pub alpha: Rational,
    #[serde(with = "serde_rational")]
    pub beta: Rational,
    #[serde(rename = "fibers", serialize_with = "serialize_threshold_map")]
    pub c_alpha: BTreeMap<ColumnSums, FiberThreshold>,
    #[serde(with = "serde_rational_or_inf")]
    pub d_beta: Option<Rational>,
    /// Largest conditional tail over all fibers.
    #[serde(with = "serde_rational")]
    pub alpha_realized: Rational,
    /// `P_ecp[L~ >= d_beta]`.
    #[serde(with = "serde_rational")]
    pub beta_realized: Rational,
}

/// Smallest realized value `v` whose tail `P[S >= v]` is at most `level`,
/// with that tail; `(None, 0)` when there is none.
fn conservative_threshold(pairs: &[(Rational, Rational)], level: &Rational) -> (Option<Rational>, Rational) {
    let mut vals: Vec<&Rational> = pairs.iter().map(|(v, _)| v).collect();
    vals.sort();
    vals.dedup();
    for v in vals {
        let tail: Rational = pairs.iter().filter(|(w, _)| w >= v).map(|(_, m)| m.clone()).sum();
        if tail <= *level {
            return (Some(v.clone()), tail);
        }
    }
    (None, Rational::zero())
}

fn check_level(name: &str, v: &Rational) -> Result<()> {
    if *v < Rational::zero() || *v > Rational::one() {
        return Err(Error::InvalidInput(format!("{name} = {} outside [0, 1]", format_rational(v))));
    }
    Ok(())
}

/// Conservative discrete thresholds: `c_alpha(x_+)` from the conditional law
/// of `V` on each fiber, `d_beta` from the ecp law of `L~` on `S_{k, rn}`.
pub fn hybrid_thresholds(k: usize, n: u64, r: usize, alpha: &Rational, beta: &Rational) -> Result<HybridThresholds> {
    check_level("alpha", alpha)?;
    check_level("beta", beta)?;
    let mut by_fiber: BTreeMap<ColumnSums, Vec<(Rational, Rational)>> = BTreeMap::new();
    for x in enumerate_obs(k, n, r)? {
        let xp = x.column_sums();
        let mass = conditional_pmf(&x, &xp);
        by_fiber.entry(xp).or_default().push((v_statistic(&x), mass));
    }
    let mut c_alpha = BTreeMap::new();
    let mut alpha_realized = Rational::zero();
    for (xp, pairs) in by_fiber {
        let (c, tail) = conservative_threshold(&pairs, alpha);
        if tail > alpha_realized {
            alpha_realized = tail.clone();
        }
        c_alpha.insert(xp.clone(), FiberThreshold { xplus: xp, c_alpha: c, tail });
    }
    let rn = n * r as u64;
    let l_pairs: Vec<(Rational, Rational)> = enumerate_simplex(k, rn)?
        .iter()
        .map(|x| (lrt_value(x), pmf_ecp(k, rn, x)))
        .collect();
    let (d_beta, beta_realized) = conservative_threshold(&l_pairs, beta);
    Ok(HybridThresholds {
        k,
        n,
        r,
        alpha: alpha.clone(),
        beta: beta.clone(),
        c_alpha,
        d_beta,
        alpha_realized,
        beta_realized,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct HybridDecision {
    pub xmat: ObsMatrix,
    pub xplus: ColumnSums,
    #[serde(with = "serde_rational")]
    pub v: Rational,
    #[serde(with = "serde_rational_or_inf")]
    pub c_alpha: Option<Rational>,
    pub v_rejects: bool,
    #[serde(with = "serde_rational")]
    pub ltilde: Rational,
    #[serde(with = "serde_rational_or_inf")]
    pub d_beta: Option<Rational>,
    pub ltilde_rejects: bool,
    pub reject: bool,
}

/// Rejects when `V >= c_alpha(X_+)` or `L~ >= d_beta`.
pub fn hybrid_test(xmat: &ObsMatrix, th: &HybridThresholds) -> Result<HybridDecision> {
    if (xmat.k(), xmat.n(), xmat.r()) != (th.k, th.n, th.r) {
        return Err(Error::DimensionMismatch(format!(
            "matrix is (k={}, n={}, r={}) but thresholds are for (k={}, n={}, r={})",
            xmat.k(),
            xmat.n(),
            xmat.r(),
            th.k,
            th.n,
            th.r
        )));
    }
    let xplus = xmat.column_sums();
    let v = v_statistic(xmat);
    let lt = ltilde(&xplus);
    let c_alpha = th.c_alpha.get(&xplus).and_then(|f| f.c_alpha.clone());
    let v_rejects = c_alpha.as_ref().is_some_and(|c| v >= *c);
    let ltilde_rejects = th.d_beta.as_ref().is_some_and(|d| lt >= *d);
    Ok(HybridDecision {
        xmat: xmat.clone(),
        xplus,
        v,
        c_alpha,
        v_rejects,
        ltilde: lt,
        d_beta: th.d_beta.clone(),
        ltilde_rejects,
        reject: v_rejects || ltilde_rejects,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelPoint {
    pub p: ProbVector,
    #[serde(with = "serde_rational")]
    pub level: Rational,
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelReport {
    pub points: Vec<LevelPoint>,
    #[serde(with = "serde_rational")]
    pub max_level: Rational,
    pub argmax: ProbVector,
    #[serde(with = "serde_rational")]
    pub realized_bound: Rational,
    #[serde(with = "serde_rational")]
    pub nominal_bound: Rational,
    pub passed: bool,
}

/// Exact rejection probability of the two-part test at each grid `p`;
/// passes when the largest stays within `alpha_realized + beta_realized`.
pub fn bonferroni_level_check(th: &HybridThresholds, p_grid: &[ProbVector]) -> Result<LevelReport> {
    if p_grid.is_empty() {
        return Err(Error::InvalidInput("empty p grid".into()));
    }
    let rejected: Vec<ObsMatrix> = enumerate_obs(th.k, th.n, th.r)?
        .into_iter()
        .map(|x| hybrid_test(&x, th).map(|d| (x, d.reject)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter_map(|(x, rej)| rej.then_some(x))
        .collect();
    let points: Vec<LevelPoint> = p_grid
        .iter()
        .map(|p| {
            let model = JointModel::Multinomial(p.clone());
            let level = rejected.iter().map(|x| joint_pmf(&model, x)).sum::<Result<Rational>>()?;
            Ok(LevelPoint { p: p.clone(), level })
        })
        .collect::<Result<_>>()?;
    let best = points.iter().fold(&points[0], |b, pt| if pt.level > b.level { pt } else { b });
    let realized = &th.alpha_realized + &th.beta_realized;
    let nominal = &th.alpha + &th.beta;
    Ok(LevelReport {
        max_level: best.level.clone(),
        argmax: best.p.clone(),
        passed: best.level <= realized && realized <= nominal,
        realized_bound: realized,
        nominal_bound: nominal,
        points,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Sweep81Report {
    pub k: usize,
    pub n: u64,
    pub r: usize,
    #[serde(with = "serde_rational")]
    pub c: Rational,
    pub chains: Vec<SchurReport<Rational>>,
    pub passed: bool,
    pub note: String,
}

/// `p -> P_p[L* >= c]` along majorization chains; expected nonincreasing.
pub fn conjecture81_sweep(
    k: usize,
    n: u64,
    r: usize,
    c: &Rational,
    chains: &[Vec<ProbVector>],
) -> Result<Sweep81Report> {
    let hits: Vec<ObsMatrix> = enumerate_obs(k, n, r)?.into_iter().filter(|x| lstar(x) >= *c).collect();
    let f = |p: &[Rational]| -> Rational {
        hits.iter()
            .map(|x| x.rows().iter().map(|row| pmf_multinomial(p, row)).product::<Rational>())
            .sum()
    };
    let mut reports = Vec::with_capacity(chains.len());
    for chain in chains {
        if let Some(bad) = chain.iter().find(|p| p.k() != k) {
            return Err(Error::DimensionMismatch(format!("chain point {bad} does not have {k} cells")));
        }
        reports.push(check_schur_monotone(f, &chain_coords(chain), Direction::Concave)?);
    }
    Ok(Sweep81Report {
        k,
        n,
        r,
        c: c.clone(),
        passed: reports.iter().all(|r| r.passed),
        chains: reports,
        note: "evidence along finite chains only; the fiber-wise route fails since phi_c need not be Schur-concave"
            .into(),
    })
}

/// Both sides of `sum_{x+} P_p[X_+ = x+] phi_c(x+) = P_p[L* >= c]`.
pub fn total_probability_check(k: usize, n: u64, r: usize, c: &Rational, p: &ProbVector) -> Result<(Rational, Rational)> {
    let rn = n * r as u64;
    let mut lhs = Rational::zero();
    for x in enumerate_simplex(k, rn)? {
        let xp = ColumnSums(x.counts().to_vec());
        lhs += pmf_multinomial(p.probs(), &x) * phi_c(n, r, &xp, c)?;
    }
    let model = JointModel::Multinomial(p.clone());
    let mut rhs = Rational::zero();
    for x in enumerate_obs(k, n, r)? {
        if lstar(&x) >= *c {
            rhs += joint_pmf(&model, &x)?;
        }
    }
    Ok((lhs, rhs))
}

/// Law of `X_+` under `f_p`, accumulated over `S_{k,n}^r`.
pub fn column_sum_marginal(k: usize, n: u64, r: usize, p: &ProbVector) -> Result<BTreeMap<ColumnSums, Rational>> {
    let model = JointModel::Multinomial(p.clone());
    let mut m: BTreeMap<ColumnSums, Rational> = BTreeMap::new();
    for x in enumerate_obs(k, n, r)? {
        *m.entry(x.column_sums()).or_insert_with(Rational::zero) += joint_pmf(&model, &x)?;
    }
    Ok(m)
}

/// Number of matrices in each fiber.
pub fn fiber_sizes(k: usize, n: u64, r: usize) -> Result<BTreeMap<ColumnSums, usize>> {
    let mut m = BTreeMap::new();
    for x in enumerate_obs(k, n, r)? {
        *m.entry(x.column_sums()).or_insert(0) += 1;
    }
    Ok(m)
}

#[derive(Debug, Clone, Serialize)]
pub struct ConjecturalPValue {
    #[serde(with = "serde_rational")]
    pub lstar: Rational,
    #[serde(with = "serde_rational")]
    pub p_value: Rational,
    /// Always `"CONJECTURAL"`: reading this ecp tail as the supremum over
    /// the null rests on an unproven Schur-concavity claim.
    pub tag: &'static str,
}

/// `P_ecp[L* >= L*(xmat0)]`.
pub fn pstar_pvalue_conjectural(xmat0: &ObsMatrix) -> Result<ConjecturalPValue> {
    let l0 = lstar(xmat0);
    let mut p_value = Rational::zero();
    for x in enumerate_obs(xmat0.k(), xmat0.n(), xmat0.r())? {
        if lstar(&x) >= l0 {
            p_value += joint_pmf(&JointModel::Ecp, &x)?;
        }
    }
    Ok(ConjecturalPValue { lstar: l0, p_value, tag: "CONJECTURAL" })
}
